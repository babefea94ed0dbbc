"""Freeze contour-quadrature reference values used by the test suite.

The values come only from direct inversion of A(z) on a circle, never from
the chain/projection pipeline, so tests comparing against them are an
independent check.

    python3 scripts/freeze_oracles.py  # rewrites tests/data/oracle_frozen.json
"""
import json
from pathlib import Path

import numpy as np

from pencil_resolvent.resolvent import OracleConfig, contour_oracle
from pencil_resolvent.zoo import FamilySpec, build, family_annulus, random_regular

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "oracle_frozen.json"


def pairs(m):
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def main():
    data = {}
    p = build(FamilySpec("example3"))
    for region in ("near-zero", "near-infinity"):
        ann = family_annulus(p, region)
        exp = contour_oracle(p, OracleConfig.for_annulus(ann, 1024), -3, 3)
        rm1, r0 = exp[-1], exp[0]
        data[f"example3/{region}"] = {
            "radius": ann.contour_radius(),
            "R_-1": pairs(rm1), "R_0": pairs(r0),
            "P": pairs(rm1 @ p.a1), "Q": pairs(p.a1 @ rm1),
        }
    p = random_regular(4, 7)
    exp = contour_oracle(p, OracleConfig(1.0, 1024), -5, 5)
    data["random_regular/n4_seed7"] = {
        "a0": pairs(p.a0),
        **{f"R_{j}": pairs(exp[j]) for j in range(-5, 6)},
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(data))
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
