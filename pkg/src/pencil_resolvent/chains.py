"""Subspace chains, ascent and descent, and Jordan-chain generating subspaces.

A singular chain satisfies ``A0 x_{-n} + A1 x_{-n-1} = 0``; a regular chain
satisfies ``A1 x_n + A0 x_{n+1} = 0`` and is the singular chain of the
flipped pencil.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg as sla

from .errors import ChainBlocked, InvalidShape
from .linalg_core import (DEFAULT_TOL, Subspace, Tolerances, contains, growth_rate, image,
                          intersect, max_angle, nullspace, preimage,
                          range_space, subspace_sum)
from .pencil import Annulus, OperatorPencil, flip_pencil

DEFAULT_DEPTH = 24
DEFAULT_PROBE_LIMIT = 10
DEFAULT_MARGIN = 2

ChainKind = Literal["S", "T", "U", "V", "U_sg", "V_sg", "U_rg", "V_rg"]
CHAIN_KINDS = ("S", "T", "U", "V", "U_sg", "V_sg", "U_rg", "V_rg")
DECREASING = ("S", "T")


@dataclass(frozen=True)
class ChainFamily:
    """Subspaces ``spaces[m]`` for ``m = 0..m_max`` of one chain kind."""

    kind: str
    spaces: tuple[Subspace, ...]

    def dims(self) -> list[int]:
        return [s.dim for s in self.spaces]

    def is_monotone(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        pairs = zip(self.spaces[:-1], self.spaces[1:])
        if self.kind in DECREASING:
            return all(contains(a, b, tol) for a, b in pairs)
        return all(contains(b, a, tol) for a, b in pairs)


@dataclass(frozen=True, eq=False)
class JordanChainRecord:
    """A computed Jordan chain.

    ``vectors[0]`` is the generator (``x_{-1}`` or ``x_1``) and
    ``vectors[n-1]`` is ``x_{-n}`` or ``x_n``.
    """

    kind: str
    generator: np.ndarray
    vectors: tuple[np.ndarray, ...]
    rate: float
    residuals: tuple[float, ...] = ()

    @property
    def norms(self) -> list[float]:
        return [float(np.linalg.norm(v)) for v in self.vectors]

    def nonzero_count(self) -> int:
        return sum(1 for v in self.vectors if np.any(v != 0))


@dataclass
class AscentDescentReport:
    """Ascent and descent of ``A0`` relative to ``A1``.

    ``None`` means no ``m <= probe_limit`` qualified. ``descent`` uses the
    sum form ``A0(X) + V_m = Y``; ``descent_direct`` uses the direct-sum form
    ``A0(X) ⊕ V_m = Y``.
    """

    ascent: int | None
    descent: int | None
    descent_direct: int | None
    probe_limit: int
    window: int | None
    evidence: list[dict] = field(default_factory=list)

    def describe(self, value: int | None) -> str:
        return str(value) if value is not None else f"exceeds {self.probe_limit}"

    def as_dict(self) -> dict:
        return {
            "ascent": self.describe(self.ascent),
            "descent": self.describe(self.descent),
            "descent_direct_sum": self.describe(self.descent_direct),
            "probe_limit": self.probe_limit,
            "window": self.window,
            "evidence": self.evidence,
        }


def _swap(p: OperatorPencil, kind: str) -> tuple[OperatorPencil, str]:
    if kind in ("U_rg", "V_rg"):
        return flip_pencil(p), kind[0]
    if kind in ("U_sg", "V_sg"):
        return p, kind[0]
    return p, kind


def chain_family(p: OperatorPencil, kind: str, m_max: int,
                 tol: Tolerances = DEFAULT_TOL) -> ChainFamily:
    """Build ``spaces[0..m_max]`` of a subspace chain.

    ``S_m = A1^{-1}(A0 S_{m-1})`` and ``T_m = A0(S_{m-1})`` decrease from the
    full space. ``U_m = A0^{-1}(V_{m-1})`` and ``V_m = A1(U_m)`` increase from
    ``{0}``. The ``_sg`` kinds equal ``U`` and ``V``; the ``_rg`` kinds are the
    same construction with ``A0`` and ``A1`` exchanged.
    """
    if kind not in CHAIN_KINDS:
        raise ValueError(f"unknown chain kind {kind!r}; expected one of {CHAIN_KINDS}")
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    q, base = _swap(p, kind)
    n = q.n
    spaces: list[Subspace] = []
    if base in ("S", "T"):
        s = Subspace.full(n, tol.rank_rel)
        spaces.append(s)
        for _ in range(m_max):
            nxt = preimage(q.a1, image(q.a0, s, tol), tol)
            spaces.append(nxt if base == "S" else image(q.a0, s, tol))
            s = nxt
    else:
        u = Subspace.zero(n, tol.rank_rel)
        v = Subspace.zero(n, tol.rank_rel)
        spaces.append(u)
        for _ in range(m_max):
            u = preimage(q.a0, v, tol)
            v = image(q.a1, u, tol)
            spaces.append(u if base == "U" else v)
    return ChainFamily(kind, tuple(spaces))


def _window_rank(s: Subspace, w: int | None, tol: Tolerances) -> int:
    """Rank of the subspace basis restricted to its first ``w`` coordinates."""
    basis = s.basis if w is None else s.basis[:w]
    if basis.size == 0:
        return 0
    sv = np.linalg.svd(basis, compute_uv=False)
    return int(np.sum(sv > tol.angle_tol))


def default_window(p: OperatorPencil, m_max: int, margin: int = DEFAULT_MARGIN) -> int | None:
    """Interior coordinate window for truncated families, ``N - m_max - margin``."""
    prov = p.provenance
    if prov is None or getattr(prov, "truncation", None) is None:
        return None
    return max(p.n - m_max - margin, 1)


def ascent_descent(p: OperatorPencil, m_max: int = DEFAULT_PROBE_LIMIT,
                   tol: Tolerances = DEFAULT_TOL, *, window: int | None | str = "auto",
                   margin: int = DEFAULT_MARGIN) -> AscentDescentReport:
    """Ascent and descent of ``A0`` relative to ``A1``, probing ``m = 0..m_max``.

    For truncations of semi-infinite operators the predicates only look at
    the first ``window`` coordinates, where the truncated chains agree with
    the infinite ones. ``window="auto"`` picks ``N - m_max - margin`` for
    zoo families and the full space otherwise.
    """
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    if window == "auto":
        window = default_window(p, m_max, margin)
    n = p.n
    w_dim = n if window is None else window
    kernel = nullspace(p.a0, tol)
    t1 = range_space(p.a0, tol)
    s_fam = chain_family(p, "S", m_max, tol).spaces
    v_fam = chain_family(p, "V", m_max, tol).spaces

    ascent = descent = direct = None
    evidence = []
    for m in range(m_max + 1):
        cap = intersect(kernel, s_fam[m], tol)
        total = subspace_sum(t1, v_fam[m], tol)
        overlap = intersect(t1, v_fam[m], tol)
        cap_rank = _window_rank(cap, window, tol)
        sum_rank = _window_rank(total, window, tol)
        overlap_rank = _window_rank(overlap, window, tol)
        evidence.append({
            "m": m, "dim_S": s_fam[m].dim, "dim_V": v_fam[m].dim,
            "ker_cap_S": cap_rank, "T1_plus_V": sum_rank, "T1_cap_V": overlap_rank,
            "window": w_dim,
        })
        if ascent is None and cap_rank == 0:
            ascent = m
        if descent is None and sum_rank == w_dim:
            descent = m
        if direct is None and sum_rank == w_dim and overlap_rank == 0:
            direct = m
    return AscentDescentReport(ascent, descent, direct, m_max, window, evidence)


def extendable_spaces(p: OperatorPencil, depth: int,
                      tol: Tolerances = DEFAULT_TOL) -> list[Subspace]:
    """``W[k]``: generators of singular chains with ``k`` further vectors.

    ``W[0]`` is the full space and ``W[k] = A0^{-1}(A1 W[k-1])``. Once two
    consecutive spaces coincide the sequence is constant, and the limit is
    the set of generators of infinite singular chains.
    """
    spaces = [Subspace.full(p.n, tol.rank_rel)]
    for _ in range(depth):
        nxt = preimage(p.a0, image(p.a1, spaces[-1], tol), tol)
        spaces.append(nxt)
    return spaces


def infinite_chain_space(p: OperatorPencil, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Fixed point of the extendable-generator iteration."""
    w = Subspace.full(p.n, tol.rank_rel)
    for _ in range(p.n + 1):
        nxt = preimage(p.a0, image(p.a1, w, tol), tol)
        if nxt.dim == w.dim:
            return nxt
        w = nxt
    return w


def stacked_chain_generators(p: OperatorPencil, length: int,
                             tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Generators of singular chains of ``length`` vectors, from one big system.

    Solves ``A0 x_{-n} + A1 x_{-n-1} = 0`` for ``n < length`` as a single
    block-bidiagonal kernel and projects onto the first block. Cheap only for
    small problems; it serves as an independent check of
    :func:`extendable_spaces`.
    """
    n = p.n
    if length < 2:
        return Subspace.full(n, tol.rank_rel)
    big = np.zeros(((length - 1) * n, length * n), dtype=complex)
    for i in range(length - 1):
        big[i * n:(i + 1) * n, i * n:(i + 1) * n] = p.a0
        big[i * n:(i + 1) * n, (i + 1) * n:(i + 2) * n] = p.a1
    ker = nullspace(big, tol)
    if ker.dim == 0:
        return Subspace.zero(n, tol.rank_rel)
    return range_space(ker.basis[:n], tol, scale=1.0)


def chain_operator(p: OperatorPencil, w: Subspace, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Matrix ``C`` with ``A1 W C = -A0 W`` for an orthonormal basis ``W``.

    A chain generated by ``W c`` continues as ``W C c, W C^2 c, ...``, so the
    eigenvalues of ``C`` are the pencil eigenvalues carried by ``w``.
    """
    if w.dim == 0:
        return np.zeros((0, 0), dtype=complex)
    lhs = p.a1 @ w.basis
    c, *_ = np.linalg.lstsq(lhs, -(p.a0 @ w.basis), rcond=tol.rank_rel)
    return c


def _singular_generating(p: OperatorPencil, rho: float, tol: Tolerances):
    w = infinite_chain_space(p, tol)
    if w.dim == 0 or math.isinf(rho):
        return w, w, chain_operator(p, w, tol)
    c = chain_operator(p, w, tol)
    _, z, sdim = sla.schur(c, output="complex", sort=lambda x: abs(x) <= rho)
    return Subspace(w.basis @ z[:, :sdim], tol.rank_rel), w, c


def generating_subspace(p: OperatorPencil, kind: str, depth: int = DEFAULT_DEPTH,
                        rho: float | None = None, tol: Tolerances = DEFAULT_TOL, *,
                        annulus: Annulus | None = None) -> Subspace:
    """Generators of infinite chains whose growth rate is at most ``rho``.

    Parameters
    ----------
    kind : {"singular", "regular"}
        Regular chains are handled as singular chains of the flipped pencil.
        An explicit ``rho`` applies to the chain that is actually built,
        while ``annulus`` is always given in the original variable.
    depth : int
        Minimum certified chain length; every returned generator extends
        indefinitely, which covers any depth.
    rho : float, optional
        Growth-rate threshold. Defaults to ``annulus.rate_threshold()`` of the
        relevant (possibly flipped) annulus, or infinity without an annulus.

    Notes
    -----
    Generators of infinite chains form the fixed point of
    ``W -> A0^{-1}(A1 W)``. On that space the chain recursion acts through
    :func:`chain_operator`, whose eigenvalue moduli are the growth rates, so
    an ordered Schur form splits off the slowly growing chains.
    """
    if depth < 4:
        raise ValueError("probe depth must be at least 4")
    if kind not in ("singular", "regular"):
        raise ValueError(f"kind must be 'singular' or 'regular', got {kind!r}")
    q = p if kind == "singular" else flip_pencil(p)
    if rho is None:
        if annulus is None:
            rho = math.inf
        else:
            rho = (annulus if kind == "singular" else annulus.flipped()).rate_threshold()
    return _singular_generating(q, rho, tol)[0]


def chain_rates(p: OperatorPencil, kind: str, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Moduli of the chain-operator eigenvalues, i.e. the possible chain growth rates."""
    q = p if kind == "singular" else flip_pencil(p)
    w = infinite_chain_space(q, tol)
    c = chain_operator(q, w, tol)
    return np.sort(np.abs(np.linalg.eigvals(c))) if c.size else np.zeros(0)


def _contained_vector(x: np.ndarray, w: Subspace, tol: Tolerances) -> bool:
    nx = np.linalg.norm(x)
    if nx == 0:
        return True
    resid = x - w.basis @ (w.basis.conj().T @ x)
    return np.linalg.norm(resid) <= math.sqrt(tol.angle_tol) * nx


def _stable_spaces(p: OperatorPencil, tol: Tolerances) -> list[Subspace]:
    """``W[0..K]`` of :func:`extendable_spaces`, stopped at the fixed point ``W[K]``."""
    spaces = [Subspace.full(p.n, tol.rank_rel)]
    while True:
        nxt = preimage(p.a0, image(p.a1, spaces[-1], tol), tol)
        if nxt.dim == spaces[-1].dim:
            return spaces
        spaces.append(nxt)


ROUNDOFF = 64 * np.finfo(float).eps


def extend_chain(p: OperatorPencil, kind: str, generator, length: int = DEFAULT_DEPTH,
                 tol: Tolerances = DEFAULT_TOL) -> JordanChainRecord:
    """Extend ``generator`` to a Jordan chain of ``length`` vectors.

    Each step takes the minimum-norm continuation among vectors that can
    themselves be continued far enough, so a valid generator is never
    stranded on a dead branch. Generators of infinite chains stay inside the
    infinite-chain space throughout. A step whose right-hand side is at
    rounding level produces an exact zero.

    Raises
    ------
    ChainBlocked
        When no chain of the requested length starts at ``generator``.
        ``step`` is the index of the first vector that cannot be produced.
    """
    if kind not in ("singular", "regular"):
        raise ValueError(f"kind must be 'singular' or 'regular', got {kind!r}")
    x = np.asarray(generator, dtype=complex).ravel()
    if x.shape != (p.n,):
        raise InvalidShape(f"generator must have length {p.n}")
    if not np.any(x):
        raise ValueError("generator must be nonzero")
    q = p if kind == "singular" else flip_pencil(p)
    spaces = _stable_spaces(q, tol)
    top = len(spaces) - 1
    level = max(k for k in range(top + 1) if _contained_vector(x, spaces[k], tol))
    if level < top and level < length - 1:
        raise ChainBlocked(level + 2, f"generator supports only {level + 1} chain vectors, "
                                      f"{length} requested")
    a0_norm = float(np.linalg.norm(q.a0, 2))
    vectors = [x]
    residuals = []
    for n in range(1, length):
        if level < top:
            level -= 1
        w = spaces[level]
        cur = vectors[-1]
        rhs = -(q.a0 @ cur)
        if np.linalg.norm(rhs) <= ROUNDOFF * a0_norm * np.linalg.norm(cur):
            nxt = np.zeros_like(cur)
        else:
            coef, *_ = np.linalg.lstsq(q.a1 @ w.basis, rhs, rcond=tol.rank_rel)
            nxt = w.basis @ coef
        res = float(np.linalg.norm(q.a0 @ cur + q.a1 @ nxt))
        if res > tol.residual_abs * max(np.linalg.norm(cur), 1.0):
            raise ChainBlocked(n + 1, f"no continuation at step {n + 1} (residual {res:.3g})")
        residuals.append(res)
        vectors.append(nxt)
    norms = [float(np.linalg.norm(v)) for v in vectors]
    rate = growth_rate(norms, start=1) if length >= 3 else float("nan")
    return JordanChainRecord(kind, x, tuple(vectors), rate, tuple(residuals))


def verify_generating_inclusion(xs: Subspace, proj, tol: Tolerances = DEFAULT_TOL):
    """Compare ``xs`` with ``range(proj)``.

    Returns
    -------
    ok : bool
    angle : float
        Largest principal angle, or ``pi/2`` when the dimensions differ.
    """
    rng = range_space(proj, tol)
    angle = max_angle(xs, rng)
    return angle <= tol.angle_tol, angle


__all__ = [
    "AscentDescentReport", "ChainFamily", "JordanChainRecord", "ascent_descent",
    "chain_family", "chain_operator", "chain_rates", "extend_chain", "extendable_spaces",
    "generating_subspace", "infinite_chain_space", "stacked_chain_generators",
    "verify_generating_inclusion",
]
