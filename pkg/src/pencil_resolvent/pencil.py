"""Linear pencils A(z) = A0 + z A1, fundamental-equation residuals and the
closed-form resolvent."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Mapping

import numpy as np

from .errors import InvalidShape, MissingCoefficient, SingularShift
from .linalg_core import DEFAULT_TOL, Tolerances, as_matrix

if TYPE_CHECKING:
    from .zoo import FamilySpec


@dataclass(frozen=True, eq=False)
class OperatorPencil:
    """The pair ``(A0, A1)`` of square complex matrices.

    ``provenance`` names the family the pencil came from, if any. ``flipped``
    records that the pencil is the swap ``(A1, A0)`` of the family member.
    """

    a0: np.ndarray
    a1: np.ndarray
    provenance: "FamilySpec | None" = None
    flipped: bool = False

    def __post_init__(self):
        a0 = as_matrix(self.a0, "a0").copy()
        a1 = as_matrix(self.a1, "a1").copy()
        if a0.shape[0] != a0.shape[1] or a0.shape != a1.shape or a0.shape[0] == 0:
            raise InvalidShape(f"a0 and a1 must be square of equal size, "
                               f"got {a0.shape} and {a1.shape}")
        a0.flags.writeable = False
        a1.flags.writeable = False
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "a1", a1)

    @property
    def n(self) -> int:
        return self.a0.shape[0]

    def __call__(self, z: complex) -> np.ndarray:
        return eval_pencil(self, z)

    def __eq__(self, other):
        if not isinstance(other, OperatorPencil):
            return NotImplemented
        return (np.array_equal(self.a0, other.a0) and np.array_equal(self.a1, other.a1)
                and self.flipped == other.flipped)

    __hash__ = None


@dataclass(frozen=True)
class Annulus:
    """The open region ``s < |z| < r``; ``r`` may be ``inf``."""

    s: float
    r: float

    def __post_init__(self):
        if not (self.s >= 0 and self.r > self.s) or math.isnan(self.s) or math.isinf(self.s):
            raise ValueError(f"need 0 <= s < r <= inf, got s={self.s}, r={self.r}")

    def contains(self, z: complex) -> bool:
        return self.s < abs(z) < self.r

    def flipped(self) -> "Annulus":
        """The image region under ``w = 1/z``."""
        inner = 0.0 if math.isinf(self.r) else 1.0 / self.r
        outer = math.inf if self.s == 0 else 1.0 / self.s
        return Annulus(inner, outer)

    def rate_threshold(self) -> float:
        """Chain-growth cut ``s + 0.1 (r - s)``; infinite when ``r`` is."""
        if math.isinf(self.r):
            return math.inf
        return self.s + 0.1 * (self.r - self.s)

    def contour_radius(self) -> float:
        """Default quadrature radius inside the annulus."""
        if self.s == 0 and math.isinf(self.r):
            return 1.0
        if self.s == 0:
            return self.r / 2
        if math.isinf(self.r):
            return 2 * self.s
        return math.sqrt(self.s * self.r)

    def as_list(self) -> list:
        return [self.s, self.r]


@dataclass(frozen=True, eq=False)
class BasicSolution:
    """The coefficients ``R_{-1}`` and ``R_0`` that determine the expansion."""

    r_m1: np.ndarray
    r_0: np.ndarray
    annulus: Annulus | None = None


@dataclass
class FundamentalReport:
    """Per-index Frobenius residuals of the left and right fundamental equations."""

    js: list[int] = field(default_factory=list)
    left: list[float] = field(default_factory=list)
    right: list[float] = field(default_factory=list)

    def max(self) -> float:
        return max(self.left + self.right, default=0.0)

    def rows(self):
        return list(zip(self.js, self.left, self.right))


def eval_pencil(p: OperatorPencil, z: complex) -> np.ndarray:
    """``A0 + z A1``."""
    return p.a0 + z * p.a1


def flip_pencil(p: OperatorPencil) -> OperatorPencil:
    """The swapped pencil ``(A1, A0)``, whose variable is ``w = 1/z``."""
    return OperatorPencil(p.a1, p.a0, p.provenance, not p.flipped)


def interior_size(p: OperatorPencil, margin: int | None = None) -> int:
    """Leading block size on which truncated-family identities are asserted.

    Finite pencils use the whole matrix; truncations drop ``margin``
    trailing indices (default 2).
    """
    prov = p.provenance
    if prov is None or getattr(prov, "truncation", None) is None:
        return p.n
    margin = 2 if margin is None else margin
    return max(p.n - margin, 0)


def _block(m: np.ndarray, k: int | None) -> np.ndarray:
    return m if k is None else m[:k, :k]


def fundamental_residuals(p: OperatorPencil, coeffs, js=None,
                          block: int | None = None) -> FundamentalReport:
    """Residuals of ``R_{j-1}A1 + R_jA0 = d_j0 I`` and ``A1R_{j-1} + A0R_j = d_j0 I``.

    Parameters
    ----------
    coeffs : LaurentExpansion or mapping
        Coefficients keyed by index.
    js : iterable of int, optional
        Indices to check. Defaults to every ``j`` with ``j - 1`` stored.
    block : int, optional
        Restrict the norms to the leading ``block x block`` entries.
    """
    table: Mapping[int, Any] = getattr(coeffs, "coeffs", coeffs)
    if js is None:
        keys = sorted(table)
        js = [j for j in keys if j - 1 in table]
    eye = np.eye(p.n)
    report = FundamentalReport()
    for j in js:
        if j - 1 not in table:
            raise MissingCoefficient(j - 1)
        if j not in table:
            raise MissingCoefficient(j)
        prev, cur = table[j - 1], table[j]
        delta = eye if j == 0 else 0.0
        left = prev @ p.a1 + cur @ p.a0 - delta
        right = p.a1 @ prev + p.a0 @ cur - delta
        report.js.append(int(j))
        report.left.append(float(np.linalg.norm(_block(left, block))))
        report.right.append(float(np.linalg.norm(_block(right, block))))
    return report


def basic_residuals(p: OperatorPencil, b: BasicSolution) -> dict[str, float]:
    """Frobenius deviations of the defining identities of a basic solution."""
    eye = np.eye(p.n)
    rm1, r0 = b.r_m1, b.r_0
    out = {
        "left_identity": rm1 @ p.a1 + r0 @ p.a0 - eye,
        "right_identity": p.a1 @ rm1 + p.a0 @ r0 - eye,
        "Rm1_A0_R0": rm1 @ p.a0 @ r0,
        "Rm1_A1_R0": rm1 @ p.a1 @ r0,
        "R0_A0_Rm1": r0 @ p.a0 @ rm1,
        "R0_A1_Rm1": r0 @ p.a1 @ rm1,
    }
    return {k: float(np.linalg.norm(v)) for k, v in out.items()}


def _checked_solve(m: np.ndarray, rhs: np.ndarray, tol: Tolerances, z: complex, which: str):
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] <= tol.rank_rel * max(s[0], 1.0):
        raise SingularShift(f"{which} is singular at z={z} (sigma_min={s[-1]:.3g})")
    x = np.linalg.solve(m, rhs)
    return x, float(np.linalg.norm(m @ x - rhs))


def closed_form_resolvent(b: BasicSolution, p: OperatorPencil, z: complex,
                          tol: Tolerances = DEFAULT_TOL, *, return_residual: bool = False):
    """``(zI + R_{-1}A0)^{-1} R_{-1} + (I + z R_0 A1)^{-1} R_0``.

    Each term is a separate linear solve. A singular shift means ``z`` is
    outside the annulus where the basic solution is valid.

    Returns
    -------
    R : ndarray
    residual : float
        Larger of the two solve residuals, when ``return_residual`` is set.
    """
    if z == 0:
        raise SingularShift("the closed form is undefined at z = 0")
    eye = np.eye(p.n)
    x1, res1 = _checked_solve(z * eye + b.r_m1 @ p.a0, b.r_m1, tol, z, "zI + R_{-1}A0")
    x2, res2 = _checked_solve(eye + z * (b.r_0 @ p.a1), b.r_0, tol, z, "I + z R_0 A1")
    value = x1 + x2
    return (value, max(res1, res2)) if return_residual else value
