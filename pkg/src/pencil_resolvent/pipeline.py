"""End-to-end runs: generating subspaces, projections, basic solution, expansion."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .chains import DEFAULT_DEPTH, DEFAULT_MARGIN, DEFAULT_PROBE_LIMIT
from .linalg_core import DEFAULT_TOL, Tolerances
from .pencil import Annulus, BasicSolution, OperatorPencil, interior_size
from .projections import SpectralDecomposition, decompose
from .resolvent import DEFAULT_NODES, LaurentExpansion, laurent_coeffs, solve_basic
from .zoo import REGIONS, family_annulus


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs of a pipeline run; every field is echoed in CLI reports."""

    tol: Tolerances = field(default_factory=Tolerances)
    depth: int = DEFAULT_DEPTH
    probe_limit: int = DEFAULT_PROBE_LIMIT
    margin: int = DEFAULT_MARGIN
    k_max: int = 20
    l_max: int = 20
    nodes: int = DEFAULT_NODES

    def as_dict(self) -> dict:
        return {"tolerances": self.tol.as_dict(), "probe_depth": self.depth,
                "probe_limit": self.probe_limit, "margin": self.margin,
                "k_max": self.k_max, "l_max": self.l_max, "oracle_nodes": self.nodes}


@dataclass(frozen=True, eq=False)
class PipelineResult:
    pencil: OperatorPencil
    annulus: Annulus
    decomposition: SpectralDecomposition
    basic: BasicSolution
    expansion: LaurentExpansion
    block: int

    @property
    def coeffs(self) -> dict:
        return self.expansion.coeffs


def spectral_annulus(p: OperatorPencil, region: str = "near-zero") -> Annulus:
    """Annulus next to the origin or to infinity that avoids all finite eigenvalues.

    Near zero the inner radius is 0 and the outer radius is the smallest
    nonzero eigenvalue modulus. Near infinity the inner radius is the
    largest eigenvalue modulus.
    """
    if region not in REGIONS:
        raise ValueError(f"region must be one of {REGIONS}, got {region!r}")
    with np.errstate(all="ignore"):
        ev = sla.eigvals(p.a0, -p.a1)
    mods = np.abs(ev[np.isfinite(ev)])
    scale = max(float(np.linalg.norm(p.a0, 2)), float(np.linalg.norm(p.a1, 2)), 1.0)
    nonzero = mods[mods > 1e-8 * scale]
    if region == "near-zero":
        return Annulus(0.0, float(nonzero.min()) if nonzero.size else math.inf)
    return Annulus(float(mods.max()) if mods.size else 0.0, math.inf)


def resolve_annulus(p: OperatorPencil, region: str = "near-zero",
                    hint: Annulus | None = None) -> Annulus:
    """The hint if given, else the family annulus, else the spectral default."""
    if hint is not None:
        return hint
    if p.provenance is not None:
        return family_annulus(p, region)
    return spectral_annulus(p, region)


def default_samples(annulus: Annulus, count: int = 3) -> list[complex]:
    """Points spread over the annulus at fixed angles."""
    ts = np.linspace(0.3, 0.7, count)
    angles = 0.3 + 1.7 * np.arange(count)
    s, r = annulus.s, annulus.r
    if s == 0 and math.isinf(r):
        radii = 2.0 ** (2 * ts - 1)
    elif s == 0:
        radii = r * ts
    elif math.isinf(r):
        radii = s * (1 + 4 * ts)
    else:
        radii = s ** (1 - ts) * r ** ts
    return [complex(rad * np.exp(1j * a)) for rad, a in zip(radii, angles)]


def run_pipeline(p: OperatorPencil, annulus: Annulus,
                 cfg: PipelineConfig = PipelineConfig()) -> PipelineResult:
    """Decompose, solve for the basic solution and expand on ``annulus``."""
    dec = decompose(p, annulus, cfg.tol, cfg.depth)
    b = solve_basic(p, dec, cfg.tol)
    exp = laurent_coeffs(b, p, cfg.k_max, cfg.l_max)
    return PipelineResult(p, annulus, dec, b, exp, interior_size(p, cfg.margin))


__all__ = ["PipelineConfig", "PipelineResult", "default_samples", "resolve_annulus",
           "run_pipeline", "spectral_annulus", "DEFAULT_TOL"]
