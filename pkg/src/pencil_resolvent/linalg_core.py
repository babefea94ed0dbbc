"""Dense complex linear algebra and subspace calculus.

Subspaces are carried as orthonormal column bases. Rank decisions use a
relative singular-value cutoff, and equality or containment of subspaces is
judged by principal angles rather than by comparing basis matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyWindow, InvalidShape


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used throughout the package.

    Parameters
    ----------
    rank_rel : float
        Singular values at or below ``rank_rel * sigma_max`` count as zero.
    residual_abs : float
        Absolute bound for residual checks.
    angle_tol : float
        Largest principal angle (radians) at which two directions coincide.
    """

    rank_rel: float = 1e-10
    residual_abs: float = 1e-9
    angle_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rel", "residual_abs", "angle_tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if self.rank_rel >= 1:
            raise ValueError("rank_rel must be < 1")

    def as_dict(self) -> dict:
        return {"rank_rel": self.rank_rel, "residual_abs": self.residual_abs,
                "angle_tol": self.angle_tol}


DEFAULT_TOL = Tolerances()


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite complex 2-D array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise InvalidShape(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of C^n given by an orthonormal basis.

    Parameters
    ----------
    basis : ndarray, shape (n, k)
        Orthonormal columns.
    tol : float
        Relative rank threshold the basis was computed with.
    """

    basis: np.ndarray
    tol: float = DEFAULT_TOL.rank_rel

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[1] > b.shape[0]:
            raise InvalidShape(f"subspace basis must be n x k with k <= n, got {b.shape}")
        object.__setattr__(self, "basis", b)
        if b.shape[1]:
            err = np.linalg.norm(b.conj().T @ b - np.eye(b.shape[1]))
            if err > 10 * max(self.tol, 1e-12):
                raise ValueError(f"basis is not orthonormal (deviation {err:.3g})")

    @classmethod
    def zero(cls, n: int, tol: float = DEFAULT_TOL.rank_rel) -> "Subspace":
        return cls(np.zeros((n, 0), dtype=complex), tol)

    @classmethod
    def full(cls, n: int, tol: float = DEFAULT_TOL.rank_rel) -> "Subspace":
        return cls(np.eye(n, dtype=complex), tol)

    @classmethod
    def span(cls, vectors, tol: Tolerances = DEFAULT_TOL) -> "Subspace":
        """Orthonormalize the columns of ``vectors``."""
        v = as_matrix(vectors, "vectors")
        return _range(v, tol)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the subspace."""
        return self.basis @ self.basis.conj().T

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def _cutoff(s: np.ndarray, tol: Tolerances, scale: float | None) -> float:
    top = s[0] if s.size else 0.0
    if scale is not None:
        top = max(top, scale)
    return tol.rank_rel * top


def _range(a: np.ndarray, tol: Tolerances, scale: float | None = None) -> Subspace:
    n = a.shape[0]
    if a.shape[1] == 0 or n == 0:
        return Subspace.zero(n, tol.rank_rel)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    r = int(np.sum(s > _cutoff(s, tol, scale))) if s[0] > 0 else 0
    return Subspace(u[:, :r], tol.rank_rel)


def _nullspace(a: np.ndarray, tol: Tolerances, scale: float | None = None) -> Subspace:
    n = a.shape[1]
    if a.shape[0] == 0 or n == 0:
        return Subspace.full(n, tol.rank_rel)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    r = int(np.sum(s > _cutoff(s, tol, scale))) if s[0] > 0 else 0
    return Subspace(vh[r:].conj().T, tol.rank_rel)


def _check_nonempty(a: np.ndarray):
    if a.size == 0:
        raise InvalidShape(f"matrix has a zero dimension: {a.shape}")


def nullspace(a, tol: Tolerances = DEFAULT_TOL, *, scale: float | None = None) -> Subspace:
    """Kernel of ``a`` under the relative rank cutoff.

    ``scale`` raises the reference magnitude of the cutoff above
    ``sigma_max(a)``; pass it when ``a`` derives from a larger operator.
    """
    a = as_matrix(a)
    _check_nonempty(a)
    return _nullspace(a, tol, scale)


def range_space(a, tol: Tolerances = DEFAULT_TOL, *, scale: float | None = None) -> Subspace:
    """Column space of ``a`` under the relative rank cutoff."""
    a = as_matrix(a)
    _check_nonempty(a)
    return _range(a, tol, scale)


def image(a, u: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """The subspace ``a(u)``; the rank cutoff is relative to ``||a||_2``."""
    a = as_matrix(a)
    if a.shape[1] != u.ambient_dim:
        raise InvalidShape(f"cannot apply {a.shape} matrix to subspace of C^{u.ambient_dim}")
    scale = float(np.linalg.norm(a, 2)) if a.size else 0.0
    return _range(a @ u.basis, tol, scale)


def preimage(a, t: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """The subspace ``{x : a x in t}``, as the kernel of ``(I - t t^H) a``."""
    a = as_matrix(a)
    if a.shape[0] != t.ambient_dim:
        raise InvalidShape(f"{a.shape} matrix maps into C^{a.shape[0]}, "
                           f"subspace lives in C^{t.ambient_dim}")
    tb = t.basis
    residual = a - tb @ (tb.conj().T @ a)
    scale = float(np.linalg.norm(a, 2)) if a.size else 0.0
    return _nullspace(residual, tol, scale)


def _same_ambient(u: Subspace, v: Subspace):
    if u.ambient_dim != v.ambient_dim:
        raise InvalidShape(f"ambient dimensions differ: {u.ambient_dim} vs {v.ambient_dim}")


def principal_angles(u: Subspace, v: Subspace) -> np.ndarray:
    """Principal angles between ``u`` and ``v`` in ascending order.

    Small angles come from sines and large ones from cosines, so both ends
    of the range are accurate.
    """
    _same_ambient(u, v)
    if u.dim < v.dim:
        u, v = v, u
    k = v.dim
    if k == 0:
        return np.zeros(0)
    ub, vb = u.basis, v.basis
    cos = np.linalg.svd(ub.conj().T @ vb, compute_uv=False)
    cos = np.clip(cos, 0.0, 1.0)
    sin = np.linalg.svd(vb - ub @ (ub.conj().T @ vb), compute_uv=False)
    sin = np.clip(np.sort(sin), 0.0, 1.0)
    from_cos = np.arccos(cos)  # ascending, since cos is descending
    from_sin = np.arcsin(sin)
    return np.where(from_cos < math.pi / 4, from_sin, from_cos)


def _shared_directions(u: Subspace, v: Subspace, tol: Tolerances):
    """Count principal angles within ``angle_tol`` and return the SVD factors."""
    y, c, zh = np.linalg.svd(u.basis.conj().T @ v.basis, full_matrices=True)
    angles = principal_angles(u, v) if u.dim and v.dim else np.zeros(0)
    k0 = int(np.sum(angles <= tol.angle_tol))
    return k0, y, zh


def intersect(u: Subspace, v: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """``u ∩ v`` via principal vectors whose angle is at most ``angle_tol``."""
    _same_ambient(u, v)
    if u.dim == 0 or v.dim == 0:
        return Subspace.zero(u.ambient_dim, tol.rank_rel)
    k0, y, _ = _shared_directions(u, v, tol)
    return Subspace(u.basis @ y[:, :k0], tol.rank_rel)


def subspace_sum(u: Subspace, v: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """``u + v``: ``u`` extended by the principal directions of ``v`` it lacks."""
    _same_ambient(u, v)
    if v.dim == 0:
        return u
    if u.dim == 0:
        return v
    k0, _, zh = _shared_directions(u, v, tol)
    extra = v.basis @ zh.conj().T[:, k0:]
    extra = extra - u.basis @ (u.basis.conj().T @ extra)
    if extra.shape[1] == 0:
        return u
    q, _ = np.linalg.qr(extra)
    q = q - u.basis @ (u.basis.conj().T @ q)
    q, _ = np.linalg.qr(q)
    return Subspace(np.hstack([u.basis, q]), tol.rank_rel)


def max_angle(u: Subspace, v: Subspace) -> float:
    """Largest principal angle; ``pi/2`` when the dimensions differ."""
    _same_ambient(u, v)
    if u.dim != v.dim:
        return math.pi / 2
    angles = principal_angles(u, v)
    return float(angles.max()) if angles.size else 0.0


def same_subspace(u: Subspace, v: Subspace, tol: Tolerances = DEFAULT_TOL) -> bool:
    return max_angle(u, v) <= tol.angle_tol


def contains(big: Subspace, small: Subspace, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when ``small ⊆ big`` within ``angle_tol``."""
    _same_ambient(big, small)
    if small.dim > big.dim:
        return False
    if small.dim == 0:
        return True
    residual = small.basis - big.basis @ (big.basis.conj().T @ small.basis)
    return float(np.linalg.norm(residual, 2)) <= math.sin(tol.angle_tol)


def solve(a, b, tol: Tolerances = DEFAULT_TOL, *, return_residual: bool = False):
    """Minimum-norm least-squares solution of ``a x = b``.

    Returns
    -------
    x : ndarray
    residual : float
        ``||a x - b||_F``, only when ``return_residual`` is set.
    """
    a = as_matrix(a, "a")
    b_arr = np.asarray(b, dtype=complex)
    vector = b_arr.ndim == 1
    b2 = b_arr.reshape(-1, 1) if vector else as_matrix(b_arr, "b")
    if a.shape[0] != b2.shape[0]:
        raise InvalidShape(f"row mismatch: a is {a.shape}, b is {b2.shape}")
    _check_nonempty(a)
    x, *_ = np.linalg.lstsq(a, b2, rcond=tol.rank_rel)
    if return_residual:
        res = float(np.linalg.norm(a @ x - b2))
    if vector:
        x = x[:, 0]
    return (x, res) if return_residual else x


def growth_rate(norms: Sequence[float], window: tuple[int, int] | None = None,
                *, start: int = 0) -> float:
    """Geometric growth rate of a norm sequence.

    Fits ``log(norms[n])`` against ``n`` by least squares and returns
    ``exp(slope)``, which discounts polynomial prefactors that distort a
    plain n-th root.

    Parameters
    ----------
    norms : sequence of float
        ``norms[i]`` belongs to index ``start + i``.
    window : (lo, hi), optional
        Inclusive index range of the fit. Defaults to the last two-thirds
        of the available indices.
    start : int
        Index of ``norms[0]``.

    Returns
    -------
    float
        The rate; 0 when any norm in the window is zero.
    """
    values = np.asarray(norms, dtype=float)
    if values.ndim != 1:
        raise ValueError("norms must be one-dimensional")
    if window is None:
        lo = start + len(values) // 3
        hi = start + len(values) - 1
    else:
        lo, hi = window
    if lo < start or hi > start + len(values) - 1 or hi - lo < 1:
        raise EmptyWindow(f"window [{lo}, {hi}] needs two points inside "
                          f"[{start}, {start + len(values) - 1}]")
    seg = values[lo - start: hi - start + 1]
    if np.any(seg < 0):
        raise ValueError("norms must be nonnegative")
    if np.any(seg == 0):
        return 0.0
    n = np.arange(lo, hi + 1, dtype=float)
    slope = np.polyfit(n, np.log(seg), 1)[0]
    return float(np.exp(slope))
