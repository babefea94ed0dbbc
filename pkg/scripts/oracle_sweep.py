"""Compare pipeline coefficients with the contour-quadrature oracle over many seeds.

    python3 scripts/oracle_sweep.py --sizes 2 4 6 --seeds 50 --jmax 5
"""
import argparse
from dataclasses import dataclass, field

import numpy as np

from pencil_resolvent.pipeline import PipelineConfig, run_pipeline
from pencil_resolvent.resolvent import OracleConfig, coefficient_rel_errors, contour_oracle
from pencil_resolvent.zoo import family_annulus, random_regular


@dataclass
class SweepConfig:
    sizes: list[int] = field(default_factory=lambda: [2, 4, 6])
    seeds: int = 20
    j_max: int = 5
    nodes: int = 512


def sweep(cfg: SweepConfig) -> dict[int, np.ndarray]:
    out = {}
    for n in cfg.sizes:
        errs = []
        for seed in range(cfg.seeds):
            p = random_regular(n, seed)
            res = run_pipeline(p, family_annulus(p),
                               PipelineConfig(k_max=cfg.j_max, l_max=cfg.j_max))
            ora = contour_oracle(p, OracleConfig(1.0, cfg.nodes), -cfg.j_max, cfg.j_max)
            js = range(-cfg.j_max, cfg.j_max + 1)
            errs.append(max(coefficient_rel_errors(ora, res.expansion, js).values()))
        out[n] = np.array(errs)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 6])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--jmax", type=int, default=5)
    ap.add_argument("--nodes", type=int, default=512)
    a = ap.parse_args()
    res = sweep(SweepConfig(a.sizes, a.seeds, a.jmax, a.nodes))
    print(f"{'n':>3} {'median':>10} {'max':>10}")
    for n, errs in res.items():
        print(f"{n:>3} {np.median(errs):10.2e} {errs.max():10.2e}")


if __name__ == "__main__":
    main()
