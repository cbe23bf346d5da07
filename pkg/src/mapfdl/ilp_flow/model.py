"""0/1 multi-commodity flow ILP and its LP-format text form."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .network import UNIT_CAPACITY, ReducedNetwork


@dataclass
class Row:
    name: str
    terms: list[tuple[int, float]]  # (variable index, coefficient)
    sense: str  # "=", "<=" or ">="
    rhs: float


@dataclass
class IlpModel:
    """Maximization model over binary variables."""

    name: str = "mapfdl"
    var_names: list[str] = field(default_factory=list)
    objective: dict[int, float] = field(default_factory=dict)
    rows: list[Row] = field(default_factory=list)
    reduced: Optional[ReducedNetwork] = field(default=None, repr=False)
    # (commodity, arc index) for x variables, commodity for y variables
    x_index: dict[tuple[int, int], int] = field(default_factory=dict, repr=False)
    y_index: list[int] = field(default_factory=list, repr=False)

    @property
    def n_vars(self) -> int:
        return len(self.var_names)

    def add_var(self, name: str) -> int:
        self.var_names.append(name)
        return len(self.var_names) - 1

    def violations(self, values, tol: float = 1e-6) -> list[str]:
        """Names of rows (and variables) the assignment breaks."""
        bad = [self.var_names[k] for k, x in enumerate(values)
               if abs(x - round(x)) > tol or not -tol <= x <= 1 + tol]
        for row in self.rows:
            lhs = sum(c * values[k] for k, c in row.terms)
            if row.sense == "=" and abs(lhs - row.rhs) > tol:
                bad.append(row.name)
            elif row.sense == "<=" and lhs > row.rhs + tol:
                bad.append(row.name)
            elif row.sense == ">=" and lhs < row.rhs - tol:
                bad.append(row.name)
        return bad

    def objective_value(self, values) -> float:
        return sum(c * values[k] for k, c in self.objective.items())


def build_ilp(reduced: ReducedNetwork) -> IlpModel:
    net = reduced.network
    inst = reduced.instance
    model = IlpModel(name=inst.name, reduced=reduced)
    for i in range(inst.num_agents):
        model.y_index.append(model.add_var(f"y_{i}"))
        model.objective[model.y_index[i]] = 1.0
    capacity: dict[int, list[tuple[int, float]]] = {}
    for i in range(inst.num_agents):
        inflow: dict[int, list[tuple[int, float]]] = {}
        outflow: dict[int, list[tuple[int, float]]] = {}
        for k in reduced.admissible_arcs[i]:
            arc = net.arc(k)
            x = model.add_var(f"x_{i}_{arc.tail}_{arc.head}")
            model.x_index[(i, k)] = x
            outflow.setdefault(arc.tail, []).append((x, -1.0))
            inflow.setdefault(arc.head, []).append((x, 1.0))
            if arc.kind in UNIT_CAPACITY:
                capacity.setdefault(k, []).append((x, 1.0))
        src, snk = reduced.source(i), reduced.sink(i)
        y = model.y_index[i]
        for node in sorted(reduced.admissible_nodes[i]):
            terms = inflow.get(node, []) + outflow.get(node, [])
            if node == src:
                model.rows.append(Row(f"src_{i}", [(x, 1.0) for x, _ in outflow.get(node, [])] + [(y, -1.0)], "=", 0.0))
            elif node == snk:
                model.rows.append(Row(f"snk_{i}", inflow.get(node, []) + [(y, -1.0)], "=", 0.0))
            elif terms:
                model.rows.append(Row(f"f_{i}_{node}", terms, "=", 0.0))
    for k in sorted(capacity):
        terms = capacity[k]
        if len(terms) > 1:  # single binaries are already bounded by 1
            arc = net.arc(k)
            model.rows.append(Row(f"cap_{arc.tail}_{arc.head}", terms, "<=", 1.0))
    return model


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _expr(model: IlpModel, terms, per_line: int = 8) -> str:
    parts = []
    for n, (k, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        coef = "" if mag == 1 else _fmt(mag) + " "
        if n == 0:
            parts.append(("-" if c < 0 else "") + coef + model.var_names[k])
        else:
            parts.append(f"{sign} {coef}{model.var_names[k]}")
    lines = [" ".join(parts[j:j + per_line]) for j in range(0, len(parts), per_line)]
    return "\n   ".join(lines) if lines else "0"


def export_model(model: IlpModel) -> str:
    """Plain-text LP format; byte-identical for identical models."""
    out = [f"\\ {model.name}", "Maximize", " obj: " + _expr(model, sorted(model.objective.items())),
           "Subject To"]
    for row in model.rows:
        out.append(f" {row.name}: {_expr(model, row.terms)} {row.sense} {_fmt(row.rhs)}")
    out.append("Binary")
    out.extend(f" {name}" for name in model.var_names)
    out.append("End")
    return "\n".join(out) + "\n"


_SECTIONS = {
    "maximize": "max", "maximum": "max", "max": "max",
    "minimize": "min", "minimum": "min", "min": "min",
    "subject to": "st", "such that": "st", "st": "st", "s.t.": "st",
    "bounds": "bounds", "binary": "bin", "binaries": "bin", "bin": "bin",
    "general": "gen", "generals": "gen", "end": "end",
}
_TOKEN = re.compile(r"[<>=]+|[+-]|[^\s<>=+-]+")


def _parse_expr(tokens, names: dict[str, int], model: IlpModel) -> list[tuple[int, float]]:
    terms = []
    sign, coef = 1.0, None
    for tok in tokens:
        if tok in "+-":
            sign = -1.0 if tok == "-" else 1.0
            continue
        try:
            coef = float(tok)
            continue
        except ValueError:
            pass
        if tok not in names:
            names[tok] = model.add_var(tok)
        terms.append((names[tok], sign * (1.0 if coef is None else coef)))
        sign, coef = 1.0, None
    return terms


def parse_lp(text: str) -> IlpModel:
    """Parse LP-format text with binary variables, as written by ``export_model``."""
    model = IlpModel()
    names: dict[str, int] = {}
    section = None
    chunks: dict[str, list[str]] = {}
    sense = "max"
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if raw.startswith("\\") and section is None and raw[1:].strip():
            model.name = raw[1:].strip()
        if not line:
            continue
        key = _SECTIONS.get(line.lower())
        if key is not None:
            section = key
            if key in ("max", "min"):
                sense = key
                section = "obj"
            continue
        chunks.setdefault(section, []).append(line)
    if sense != "max":
        raise ValueError("only maximization models are supported")

    obj = " ".join(chunks.get("obj", []))
    obj = obj.split(":", 1)[1] if ":" in obj else obj
    model.objective = {k: c for k, c in _parse_expr(_TOKEN.findall(obj), names, model)}

    st = " ".join(chunks.get("st", []))
    for m in re.finditer(r"([^\s:]+)\s*:(.*?)(?=(?:\s[^\s:]+\s*:)|$)", st):
        name, body = m.group(1), m.group(2)
        toks = _TOKEN.findall(body)
        op = next(k for k, tk in enumerate(toks) if tk[0] in "<>=")
        rel = {"<=": "<=", "=<": "<=", "<": "<=", ">=": ">=", "=>": ">=", ">": ">=", "=": "="}[toks[op]]
        rhs_toks = toks[op + 1:]
        rhs = float("".join(rhs_toks))
        model.rows.append(Row(name, _parse_expr(toks[:op], names, model), rel, rhs))
    for line in chunks.get("bin", []):
        for tok in line.split():
            if tok not in names:
                names[tok] = model.add_var(tok)
    return model
