"""Print measurement rounds and total depth for GHZ(n) and controlled-U under each absorption mode."""

from __future__ import annotations

import argparse

from mcalc import zoo
from mcalc.analysis import schedule
from mcalc.core import Angle
from mcalc.rewrite import ABSORB_MODES, shift_signals, standardize

CU_ANGLES = (Angle.pi(1, 5), Angle.pi(1, 3), Angle.pi(1, 7), Angle.pi(2, 9))


def rows(ghz_sizes):
    for n in ghz_sizes:
        s = standardize(zoo.GHZ(n))
        for shifted, p in (("no", s), ("yes", shift_signals(s))):
            sch = schedule(p)
            yield f"GHZ({n})", "xy", shifted, len(sch.rounds), sch.depth
    for mode in ABSORB_MODES:
        s = standardize(zoo.CU(*CU_ANGLES), absorb=mode)
        for shifted, p in (("no", s), ("yes", shift_signals(s))):
            sch = schedule(p)
            yield "CU", mode, shifted, len(sch.rounds), sch.depth


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ghz", type=int, nargs="*", default=[3, 5, 8])
    args = ap.parse_args(argv)
    print(f"{'pattern':<8} {'absorb':<6} {'shifted':<7} {'rounds':>6} {'depth':>5}")
    for name, mode, shifted, r, d in rows(args.ghz):
        print(f"{name:<8} {mode:<6} {shifted:<7} {r:>6} {d:>5}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
