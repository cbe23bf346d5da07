"""Stand-alone LP solver process: ``python -m mapfdl.ilp_flow.runner MODEL SOLUTION [TIME_LIMIT]``.

Reads an LP-format binary model, solves it with HiGHS and writes a
CBC-style solution file. Lets the command backend run without an external
solver installed.
"""
import sys

from .model import parse_lp
from .solve import ScipyBackend, write_cbc_solution


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) not in (2, 3):
        print(__doc__, file=sys.stderr)
        return 2
    with open(argv[0], encoding="utf-8") as f:
        model = parse_lp(f.read())
    limit = float(argv[2]) if len(argv) == 3 else None
    sol = ScipyBackend().solve(model, limit)
    with open(argv[1], "w", encoding="utf-8") as f:
        f.write(write_cbc_solution(sol, model))
    return 0


if __name__ == "__main__":
    sys.exit(main())
