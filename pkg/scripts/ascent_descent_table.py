"""Ascent and descent for the shift examples and Jordan blocks.

The shift examples show the two quantities can disagree (one is 0, the
other unbounded); for a pole of order m both equal m.

    python3 scripts/ascent_descent_table.py --trunc 16 --probe-limit 10
"""
import argparse
from dataclasses import dataclass

from pencil_resolvent.chains import ascent_descent
from pencil_resolvent.zoo import FamilySpec, build


@dataclass
class TableConfig:
    truncation: int = 16
    probe_limit: int = 10
    max_block: int = 5


def rows(cfg: TableConfig):
    specs = [FamilySpec("example1", truncation=cfg.truncation),
             FamilySpec("example2", truncation=cfg.truncation)]
    specs += [FamilySpec("jordan_block", {"m": m}) for m in range(1, cfg.max_block + 1)]
    for spec in specs:
        rep = ascent_descent(build(spec), cfg.probe_limit)
        label = spec.name if spec.name != "jordan_block" else f"jordan_block m={spec.params['m']}"
        yield (label, rep.describe(rep.ascent), rep.describe(rep.descent),
               rep.describe(rep.descent_direct), rep.window)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trunc", type=int, default=TableConfig.truncation)
    ap.add_argument("--probe-limit", type=int, default=TableConfig.probe_limit)
    ap.add_argument("--max-block", type=int, default=TableConfig.max_block)
    a = ap.parse_args()
    print(f"{'pencil':<18} {'ascent':>12} {'descent':>12} {'direct sum':>12} {'window':>7}")
    for label, asc, desc, direct, window in rows(TableConfig(a.trunc, a.probe_limit, a.max_block)):
        print(f"{label:<18} {asc:>12} {desc:>12} {direct:>12} {str(window):>7}")


if __name__ == "__main__":
    main()
