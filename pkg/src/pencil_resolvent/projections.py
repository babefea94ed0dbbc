"""Spectral separation projections assembled from generating subspaces.

Given complementary subspaces ``xs`` and ``xr`` of the domain, the matrix
``E = [L | M]`` of their bases is invertible. Splitting ``E^{-1}`` into row
blocks ``F`` and ``G`` gives ``P = L F`` and ``Pc = M G``. The range
projections come from the same construction on ``[A1 L | A0 M]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import DEFAULT_DEPTH, generating_subspace
from .errors import NotComplementary
from .linalg_core import DEFAULT_TOL, Subspace, Tolerances, image, intersect
from .pencil import Annulus, BasicSolution, OperatorPencil


@dataclass(frozen=True, eq=False)
class FrameAssembly:
    """Bases ``l``, ``m``, the frame ``e = [l | m]`` and ``e^{-1} = [f; g]``."""

    l: np.ndarray
    m: np.ndarray
    e: np.ndarray
    f: np.ndarray
    g: np.ndarray

    def deviations(self) -> dict[str, float]:
        n = self.e.shape[0]
        kl, km = self.l.shape[1], self.m.shape[1]
        return {
            "LF+MG-I": float(np.linalg.norm(self.l @ self.f + self.m @ self.g - np.eye(n))),
            "FL-I": float(np.linalg.norm(self.f @ self.l - np.eye(kl))),
            "GM-I": float(np.linalg.norm(self.g @ self.m - np.eye(km))),
            "FM": float(np.linalg.norm(self.f @ self.m)),
            "GL": float(np.linalg.norm(self.g @ self.l)),
        }


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Domain projections ``p``, ``pc``, range projections ``q``, ``qc`` and their data."""

    p: np.ndarray
    pc: np.ndarray
    q: np.ndarray
    qc: np.ndarray
    xs: Subspace
    xr: Subspace
    ys: Subspace
    yr: Subspace
    frame: FrameAssembly
    range_frame: FrameAssembly
    annulus: Annulus | None = None


def _frame(lb: np.ndarray, mb: np.ndarray, tol: Tolerances, what: str) -> FrameAssembly:
    n = lb.shape[0]
    kl, km = lb.shape[1], mb.shape[1]
    if kl + km != n:
        raise NotComplementary(f"{what}: dimensions {kl} + {km} do not add up to {n}",
                               (kl, km, n))
    e = np.hstack([lb, mb])
    sv = np.linalg.svd(e, compute_uv=False)
    if n and sv[-1] <= tol.rank_rel * sv[0]:
        raise NotComplementary(f"{what}: frame is singular (sigma_min={sv[-1]:.3g})",
                               (kl, km, n))
    inv = np.linalg.solve(e, np.eye(n))
    return FrameAssembly(lb, mb, e, inv[:kl], inv[kl:])


def assemble_domain(xs: Subspace, xr: Subspace, tol: Tolerances = DEFAULT_TOL):
    """Oblique projections onto ``xs`` along ``xr`` and back.

    Returns
    -------
    frame : FrameAssembly
    p, pc : ndarray
        ``P = L F`` onto ``xs`` and ``Pc = M G`` onto ``xr``.

    Raises
    ------
    NotComplementary
        When the dimensions do not add up or the subspaces overlap. The
        error's ``dims`` holds ``(dim xs, dim xr, n)``.
    """
    if xs.ambient_dim != xr.ambient_dim:
        raise NotComplementary("subspaces live in different spaces",
                               (xs.ambient_dim, xr.ambient_dim))
    if xs.dim + xr.dim == xs.ambient_dim and intersect(xs, xr, tol).dim:
        raise NotComplementary("subspaces intersect nontrivially",
                               (xs.dim, xr.dim, xs.ambient_dim))
    fr = _frame(xs.basis, xr.basis, tol, "domain")
    return fr, fr.l @ fr.f, fr.m @ fr.g


def assemble_range(p: OperatorPencil, xs: Subspace, xr: Subspace,
                   tol: Tolerances = DEFAULT_TOL):
    """Range projections from the frame ``[A1 L | A0 M]``.

    Returns
    -------
    q, qc : ndarray
        ``Q`` onto ``ys = A1(xs)`` along ``yr = A0(xr)``, and ``I - Q``.
    ys, yr : Subspace
    frame : FrameAssembly
    """
    ys = image(p.a1, xs, tol)
    yr = image(p.a0, xr, tol)
    if ys.dim != xs.dim or yr.dim != xr.dim:
        raise NotComplementary("A1 is not injective on xs or A0 is not injective on xr",
                               (ys.dim, yr.dim, p.n))
    fr = _frame(p.a1 @ xs.basis, p.a0 @ xr.basis, tol, "range")
    q = fr.l @ fr.f
    return q, np.eye(p.n) - q, ys, yr, fr


def build_decomposition(p: OperatorPencil, xs: Subspace, xr: Subspace,
                        tol: Tolerances = DEFAULT_TOL,
                        annulus: Annulus | None = None) -> SpectralDecomposition:
    """Assemble both frames from given generating subspaces."""
    fr, pp, _ = assemble_domain(xs, xr, tol)
    q, qc, ys, yr, rfr = assemble_range(p, xs, xr, tol)
    return SpectralDecomposition(pp, np.eye(p.n) - pp, q, qc, xs, xr, ys, yr, fr, rfr, annulus)


def decompose(p: OperatorPencil, annulus: Annulus, tol: Tolerances = DEFAULT_TOL,
              depth: int = DEFAULT_DEPTH) -> SpectralDecomposition:
    """Generating subspaces for ``annulus`` and the projections built from them."""
    xs = generating_subspace(p, "singular", depth, tol=tol, annulus=annulus)
    xr = generating_subspace(p, "regular", depth, tol=tol, annulus=annulus)
    return build_decomposition(p, xs, xr, tol, annulus)


def verify_projection_identities(p: OperatorPencil, dec: SpectralDecomposition,
                    block: int | None = None) -> dict[str, float]:
    """Frobenius deviations of the structural identities of the projections.

    Covers idempotence, complementarity, the splitting
    ``A_i = Q A_i P + Qc A_i Pc`` and the four intertwining relations.
    ``block`` restricts every norm to the leading block.
    """
    def nrm(m):
        return float(np.linalg.norm(m if block is None else m[:block, :block]))

    eye = np.eye(p.n)
    P, Pc, Q, Qc = dec.p, dec.pc, dec.q, dec.qc
    a0, a1 = p.a0, p.a1
    return {
        "P^2-P": nrm(P @ P - P),
        "Q^2-Q": nrm(Q @ Q - Q),
        "P+Pc-I": nrm(P + Pc - eye),
        "Q+Qc-I": nrm(Q + Qc - eye),
        "P*Pc": nrm(P @ Pc),
        "Q*Qc": nrm(Q @ Qc),
        "A0-split": nrm(a0 - Q @ a0 @ P - Qc @ a0 @ Pc),
        "A1-split": nrm(a1 - Q @ a1 @ P - Qc @ a1 @ Pc),
        "QA1-A1P": nrm(Q @ a1 - a1 @ P),
        "QcA0-A0Pc": nrm(Qc @ a0 - a0 @ Pc),
        "QA0-A0P": nrm(Q @ a0 - a0 @ P),
        "QcA1-A1Pc": nrm(Qc @ a1 - a1 @ Pc),
    }


def separated_operators(p: OperatorPencil, dec: SpectralDecomposition, b: BasicSolution,
                        tol: Tolerances = DEFAULT_TOL) -> dict[str, float]:
    """Check that the separated systems invert each other in frame coordinates.

    With ``L``, ``M`` the domain bases and orthonormal bases ``Ys``, ``Yr`` of
    the range pieces, the restricted operators are ``Ys^H A1 L`` and
    ``Yr^H A0 M``; the restricted coefficients are ``F R_{-1} Ys`` and
    ``G R_0 Yr``. Each pair must multiply to the identity in both orders.
    Empty pieces pass vacuously.
    """
    L, M = dec.frame.l, dec.frame.m
    F, G = dec.frame.f, dec.frame.g
    ys, yr = dec.ys.basis, dec.yr.basis
    a1s = ys.conj().T @ (dec.q @ p.a1 @ dec.p) @ L
    n1s = F @ (dec.p @ b.r_m1 @ dec.q) @ ys
    a0r = yr.conj().T @ (dec.qc @ p.a0 @ dec.pc) @ M
    n0r = G @ (dec.pc @ b.r_0 @ dec.qc) @ yr

    def dev(x):
        return float(np.linalg.norm(x - np.eye(x.shape[0]))) if x.size else 0.0

    return {
        "N-1 A1 on Xs": dev(n1s @ a1s),
        "A1 N-1 on Ys": dev(a1s @ n1s),
        "Nc0 Ac0 on Xr": dev(n0r @ a0r),
        "Ac0 Nc0 on Yr": dev(a0r @ n0r),
    }
