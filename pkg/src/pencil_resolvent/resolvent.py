"""Basic solution, Laurent coefficients, evaluation and the quadrature oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyWindow, NotInvertibleOnSubspace, OutsideAnnulus, SingularNode
from .linalg_core import DEFAULT_TOL, Tolerances, growth_rate, solve
from .pencil import (Annulus, BasicSolution, OperatorPencil, basic_residuals,
                     closed_form_resolvent, eval_pencil, fundamental_residuals)
from .projections import SpectralDecomposition
from .report import Check

DEFAULT_NODES = 512


@dataclass(frozen=True, eq=False)
class LaurentExpansion:
    """Coefficients ``R_j`` for a contiguous index range containing -1 and 0.

    ``inner_rate`` and ``outer_rate`` are fitted growth rates of
    ``||R_{-k}||`` and ``||R_l||``; they estimate ``s`` and ``1/r``.
    """

    coeffs: dict
    annulus: Annulus | None = None
    inner_rate: float | None = None
    outer_rate: float | None = None
    aliasing_bound: float | None = None

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("expansion has no coefficients")
        keys = sorted(self.coeffs)
        if keys != list(range(keys[0], keys[-1] + 1)):
            raise ValueError("coefficient indices must be contiguous")

    @property
    def j_min(self) -> int:
        return min(self.coeffs)

    @property
    def j_max(self) -> int:
        return max(self.coeffs)

    def __getitem__(self, j: int) -> np.ndarray:
        return self.coeffs[j]

    def norms(self) -> dict[int, float]:
        return {j: float(np.linalg.norm(r)) for j, r in sorted(self.coeffs.items())}

    def estimated_annulus(self) -> Annulus | None:
        """``(inner_rate, 1/outer_rate)`` when both rates are known and ordered."""
        if self.inner_rate is None or self.outer_rate is None:
            return None
        r = math.inf if self.outer_rate == 0 else 1.0 / self.outer_rate
        if not self.inner_rate < r:
            return None
        return Annulus(self.inner_rate, r)


@dataclass(frozen=True)
class OracleConfig:
    """Circle ``|z| = radius`` sampled at ``nodes`` equispaced points."""

    radius: float
    nodes: int = DEFAULT_NODES

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be positive and finite, got {self.radius}")
        if self.nodes < 16:
            raise ValueError(f"need at least 16 nodes, got {self.nodes}")

    @classmethod
    def for_annulus(cls, annulus: Annulus, nodes: int = DEFAULT_NODES) -> "OracleConfig":
        return cls(annulus.contour_radius(), nodes)


def solve_basic(p: OperatorPencil, dec: SpectralDecomposition,
                tol: Tolerances = DEFAULT_TOL) -> BasicSolution:
    """``R_{-1} = L (A1 L)^+ Q`` and ``R_0 = M (A0 M)^+ Qc``.

    ``A1`` maps the singular generating subspace one-to-one onto its image,
    and ``A0`` does the same for the regular one, so both pseudo-inverses are
    genuine inverses on the relevant ranges.

    Raises
    ------
    NotInvertibleOnSubspace
        When ``A1 L`` or ``A0 M`` loses rank.
    """
    L, M = dec.frame.l, dec.frame.m
    pieces = []
    for name, op, basis, target in (("A1 L", p.a1, L, dec.q), ("A0 M", p.a0, M, dec.qc)):
        if basis.shape[1] == 0:
            pieces.append(np.zeros((p.n, p.n), dtype=complex))
            continue
        block = op @ basis
        sv = np.linalg.svd(block, compute_uv=False)
        if sv[-1] <= tol.rank_rel * max(sv[0], float(np.linalg.norm(op, 2))):
            raise NotInvertibleOnSubspace(f"{name} is rank deficient (sigma_min={sv[-1]:.3g})")
        pieces.append(basis @ solve(block, target, tol))
    return BasicSolution(pieces[0], pieces[1], dec.annulus)


def _rate(norms: list[float], start: int) -> float | None:
    try:
        return growth_rate(norms, start=start)
    except EmptyWindow:
        return None


def laurent_coeffs(b: BasicSolution, p: OperatorPencil, k_max: int, l_max: int) -> LaurentExpansion:
    """``R_{-k} = (-R_{-1}A0)^{k-1} R_{-1}`` and ``R_l = (-R_0A1)^l R_0``.

    ``k_max`` must be at least 1 and ``l_max`` at least 0. Fitted growth
    rates of both tails are attached as an annulus estimate.
    """
    if k_max < 1 or l_max < 0:
        raise ValueError("need k_max >= 1 and l_max >= 0")
    down = -(b.r_m1 @ p.a0)
    up = -(b.r_0 @ p.a1)
    coeffs = {-1: b.r_m1, 0: b.r_0}
    for k in range(2, k_max + 1):
        coeffs[-k] = down @ coeffs[-k + 1]
    for l in range(1, l_max + 1):
        coeffs[l] = up @ coeffs[l - 1]
    inner = _rate([float(np.linalg.norm(coeffs[-k])) for k in range(1, k_max + 1)], 1)
    outer = _rate([float(np.linalg.norm(coeffs[l])) for l in range(1, l_max + 1)], 1)
    return LaurentExpansion(coeffs, b.annulus, inner, outer)


def _tail_bound(exp: LaurentExpansion, z: complex) -> float:
    """Geometric bound on the omitted terms, from the fitted rates."""
    az = abs(z)
    bound = 0.0
    for rate, last, ratio in (
        (exp.inner_rate, exp.j_min, None if exp.inner_rate is None else exp.inner_rate / az),
        (exp.outer_rate, exp.j_max, None if exp.outer_rate is None else exp.outer_rate * az),
    ):
        if rate is None or ratio is None:
            continue
        edge = float(np.linalg.norm(exp.coeffs[last])) * az ** last
        if edge == 0 or rate == 0:
            continue
        bound += math.inf if ratio >= 1 else edge * ratio / (1 - ratio)
    return bound


def eval_laurent(exp: LaurentExpansion, z: complex, *, return_tail: bool = False):
    """Partial sum ``sum_j R_j z^j`` over the stored coefficients.

    Raises
    ------
    OutsideAnnulus
        When ``z`` lies outside the expansion's annulus.
    """
    if exp.annulus is not None and not exp.annulus.contains(z):
        raise OutsideAnnulus(f"|z| = {abs(z):.6g} is outside "
                             f"({exp.annulus.s:.6g}, {exp.annulus.r:.6g})")
    if z == 0 and exp.j_min < 0:
        raise OutsideAnnulus("z = 0 is not in any annulus with negative powers")
    total = None
    for j in range(exp.j_min, exp.j_max + 1):
        term = exp.coeffs[j] * complex(z) ** j
        total = term if total is None else total + term
    return (total, _tail_bound(exp, z)) if return_tail else total


def contour_oracle(p: OperatorPencil, cfg: OracleConfig, j_min: int, j_max: int,
                   tol: Tolerances = DEFAULT_TOL) -> LaurentExpansion:
    """Laurent coefficients by trapezoidal quadrature on ``|z| = radius``.

    ``R_j ~ (1/N) sum_k A(z_k)^{-1} z_k^{-j}``, computed for all ``j`` at
    once with an FFT. Coefficients ``N`` apart alias onto each other, so the
    attached ``aliasing_bound`` is the size of the scaled coefficients near
    ``|j| = N/2`` relative to the largest one.

    Raises
    ------
    SingularNode
        When ``A(z_k)`` is numerically singular at some node.
    """
    n_nodes = cfg.nodes
    if j_max < j_min or j_max - j_min >= n_nodes:
        raise ValueError(f"index range [{j_min}, {j_max}] must be shorter than {n_nodes} nodes")
    z = cfg.radius * np.exp(2j * np.pi * np.arange(n_nodes) / n_nodes)
    eye = np.eye(p.n)
    n0, n1 = float(np.linalg.norm(p.a0, 2)), float(np.linalg.norm(p.a1, 2))
    values = np.empty((n_nodes, p.n, p.n), dtype=complex)
    for k, zk in enumerate(z):
        a = eval_pencil(p, zk)
        sv = np.linalg.svd(a, compute_uv=False)
        # measured against the pencil's size at this node, not A(z_k) alone
        if sv[-1] <= tol.rank_rel * max(sv[0], n0 + abs(zk) * n1):
            raise SingularNode(k, complex(zk))
        values[k] = np.linalg.solve(a, eye)
    spectrum = np.fft.fft(values, axis=0) / n_nodes
    coeffs = {j: spectrum[j % n_nodes] * cfg.radius ** (-j) for j in range(j_min, j_max + 1)}

    scaled = np.linalg.norm(spectrum, axis=(1, 2))
    half = n_nodes // 2
    band = scaled[half - 2: half + 3]
    aliasing = float(band.max() / scaled.max()) if scaled.max() > 0 else 0.0
    return LaurentExpansion(coeffs, None, aliasing_bound=aliasing)


def coefficient_rel_errors(a: LaurentExpansion, b: LaurentExpansion, js) -> dict[int, float]:
    """Per-index relative Frobenius difference, relative to ``b``."""
    out = {}
    for j in js:
        ref = float(np.linalg.norm(b[j]))
        diff = float(np.linalg.norm(a[j] - b[j]))
        out[j] = diff / ref if ref > 0 else diff
    return out


def terms_for(exp_rates: tuple[float | None, float | None], z: complex,
              eps: float = 1e-14, cap: int = 400) -> tuple[int, int]:
    """Numbers of negative and nonnegative terms that bring both tails below ``eps``."""
    inner, outer = exp_rates
    az = abs(z)

    def count(ratio):
        if ratio is None or ratio <= 0:
            return 2
        if ratio >= 1:
            return cap
        return int(min(cap, max(2, math.ceil(math.log(eps) / math.log(ratio)) + 2)))

    return count(None if inner is None else inner / az), count(None if outer is None else outer * az)


def _block(m: np.ndarray, k: int | None) -> np.ndarray:
    return m if k is None else m[:k, :k]


def validate_resolvent(p: OperatorPencil, b: BasicSolution, exp: LaurentExpansion,
                       sample_z, tol: Tolerances = DEFAULT_TOL, *, block: int | None = None,
                       bound: float = 1e-7) -> list[Check]:
    """Check both resolvent evaluations against ``A(z)`` at sample points.

    Reports the largest ``||A(z)R(z) - I||`` and ``||R(z)A(z) - I||``
    (relative to ``max(||A(z)||, 1)``) over the samples, for the closed form
    and for the Laurent partial sum, plus the fundamental residuals per index.
    The residual bound at index ``j`` is ``residual_abs`` times
    ``max(1, ||R_{j-1}|| + ||R_j||)``, since long expansions can hold
    coefficients far larger than one.

    Raises
    ------
    OutsideAnnulus
        When a sample lies outside the expansion's annulus.
    """
    eye = np.eye(p.n)
    worst = {"closed_form": 0.0, "laurent": 0.0}
    for z in sample_z:
        a = eval_pencil(p, z)
        scale = max(float(np.linalg.norm(a, 2)), 1.0)
        rc = closed_form_resolvent(b, p, z, tol)
        rl = eval_laurent(exp, z)
        for name, r in (("closed_form", rc), ("laurent", rl)):
            dev = max(np.linalg.norm(_block(a @ r - eye, block)),
                      np.linalg.norm(_block(r @ a - eye, block))) / scale
            worst[name] = max(worst[name], float(dev))
    checks = [Check(f"{name} inverse deviation", value, bound)
              for name, value in worst.items()]
    fund = fundamental_residuals(p, exp, block=block)
    for j, left, right in fund.rows():
        size = max(1.0, float(np.linalg.norm(exp[j - 1]) + np.linalg.norm(exp[j])))
        checks.append(Check(f"fundamental residual j={j}", max(left, right),
                            tol.residual_abs * size))
    return checks


def basic_checks(p: OperatorPencil, b: BasicSolution, dec: SpectralDecomposition,
                 tol: Tolerances = DEFAULT_TOL, block: int | None = None) -> list[Check]:
    """The six identities tying ``{R_-1, R_0}`` to the projections, plus orthogonality."""
    def nrm(m):
        return float(np.linalg.norm(_block(m, block)))

    rm1, r0 = b.r_m1, b.r_0
    checks = [
        Check("R_-1 A1 - P", nrm(rm1 @ p.a1 - dec.p), tol.residual_abs),
        Check("R_0 A0 - Pc", nrm(r0 @ p.a0 - dec.pc), tol.residual_abs),
        Check("A1 R_-1 - Q", nrm(p.a1 @ rm1 - dec.q), tol.residual_abs),
        Check("A0 R_0 - Qc", nrm(p.a0 @ r0 - dec.qc), tol.residual_abs),
        Check("R_-1 - P R_-1 Q", nrm(rm1 - dec.p @ rm1 @ dec.q), tol.residual_abs),
        Check("R_0 - Pc R_0 Qc", nrm(r0 - dec.pc @ r0 @ dec.qc), tol.residual_abs),
    ]
    for name, value in basic_residuals(p, b).items():
        checks.append(Check(name, value, tol.residual_abs))
    return checks
