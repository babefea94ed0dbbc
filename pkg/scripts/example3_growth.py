"""Coefficient growth of the two-periodic example on both sides of |beta|.

Writes one growth CSV per region and prints the fitted rates, which should
approach 1/|beta| (outer rate near zero) and |beta| (inner rate near infinity).

    python3 scripts/example3_growth.py --beta 2 --terms 40 --outdir out/
"""
import argparse
from dataclasses import dataclass
from pathlib import Path

from pencil_resolvent.cli import emit_growth_csv
from pencil_resolvent.pipeline import PipelineConfig, run_pipeline
from pencil_resolvent.zoo import FamilySpec, build, family_annulus


@dataclass
class GrowthConfig:
    beta: float = 2.0
    truncation: int = 12
    terms: int = 40
    outdir: Path = Path("out")


def run(cfg: GrowthConfig) -> dict:
    p = build(FamilySpec("example3", {"beta": cfg.beta}, cfg.truncation))
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    rates = {}
    for region in ("near-zero", "near-infinity"):
        pc = PipelineConfig(k_max=cfg.terms, l_max=cfg.terms)
        res = run_pipeline(p, family_annulus(p, region), pc)
        path = cfg.outdir / f"example3_{region}.csv"
        emit_growth_csv(res.expansion, path)
        rates[region] = (res.expansion.inner_rate, res.expansion.outer_rate)
        print(f"{region:14s} inner {res.expansion.inner_rate:.6f}  "
              f"outer {res.expansion.outer_rate:.6f}  -> {path}")
    print(f"expected: outer near zero {1 / abs(cfg.beta):.6f}, "
          f"inner near infinity {abs(cfg.beta):.6f}")
    return rates


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--beta", type=float, default=GrowthConfig.beta)
    ap.add_argument("--trunc", type=int, default=GrowthConfig.truncation)
    ap.add_argument("--terms", type=int, default=GrowthConfig.terms)
    ap.add_argument("--outdir", type=Path, default=GrowthConfig.outdir)
    a = ap.parse_args()
    run(GrowthConfig(a.beta, a.trunc, a.terms, a.outdir))


if __name__ == "__main__":
    main()
