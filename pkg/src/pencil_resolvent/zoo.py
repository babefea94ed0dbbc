"""Named pencil families, their truncations and closed-form references.

``example1`` is ``(B, I)`` with ``B`` the weighted upper shift, ``example2``
is ``(C, I)`` with ``C`` the weighted lower shift, and ``example3`` is the
two-periodic bidiagonal pencil with an essential singularity at the origin
and a simple pole at ``-beta``. All three are leading ``N x N`` truncations
of semi-infinite operators.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParams, NoReference, ResampleLimitExceeded
from .pencil import Annulus, OperatorPencil

FAMILIES = ("example1", "example2", "example3", "jordan_block", "diag_split", "random_regular")
REGIONS = ("near-zero", "near-infinity")
SEQUENCE_RULES = ("factorial", "gaussian", "geometric", "custom")
SEED_ENV = "PENCIL_RESOLVENT_SEED"

DEFAULT_TRUNCATION = {"example1": 16, "example2": 16, "example3": 12}


@dataclass(frozen=True)
class FamilySpec:
    """A named family with its parameters and truncation order."""

    name: str
    params: dict = field(default_factory=dict)
    truncation: int | None = None

    def as_dict(self) -> dict:
        params = {k: v for k, v in self.params.items() if not callable(v)}
        return {"family": self.name, "params": params, "truncation": self.truncation}


def sequence(params: dict, count: int) -> np.ndarray:
    """The weights ``w_1..w_count`` of a whitelisted sequence rule.

    Rules: ``factorial`` gives ``1/n!``; ``gaussian`` gives ``c**(n*n)`` with
    ``|c| < 1``; ``geometric`` gives ``c * q**n`` and warns, since its n-th
    roots do not tend to zero; ``custom`` takes ``values`` (list or callable)
    and requires ``unchecked=True``.
    """
    rule = params.get("rule", "factorial")
    n = np.arange(1, count + 1)
    if rule == "factorial":
        return np.array([1.0 / math.factorial(int(k)) for k in n])
    if rule == "gaussian":
        c = float(params.get("c", 0.5))
        if not 0 < abs(c) < 1:
            raise InvalidParams(f"gaussian rule needs 0 < |c| < 1, got {c}")
        return np.array([c ** (int(k) ** 2) for k in n])
    if rule == "geometric":
        c, q = float(params.get("c", 1.0)), float(params.get("q", 0.5))
        if c == 0 or q == 0:
            raise InvalidParams("geometric rule needs nonzero c and q")
        warnings.warn("geometric weights do not have n-th roots tending to zero; "
                      "the singularity at the origin is not essential", stacklevel=3)
        return c * q ** n.astype(float)
    if rule == "custom":
        if not params.get("unchecked", False):
            raise InvalidParams("custom sequences require unchecked=True")
        values = params.get("values")
        if callable(values):
            return np.array([values(int(k)) for k in n], dtype=complex)
        if values is None or len(values) < count:
            raise InvalidParams(f"custom sequence needs at least {count} values")
        return np.asarray(values[:count], dtype=complex)
    raise InvalidParams(f"unknown sequence rule {rule!r}; expected one of {SEQUENCE_RULES}")


def _need_int(params: dict, key: str, minimum: int) -> int:
    if key not in params:
        raise InvalidParams(f"missing parameter {key!r}")
    value = params[key]
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise InvalidParams(f"{key} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def _truncation(spec: FamilySpec) -> int:
    n = spec.truncation if spec.truncation is not None else DEFAULT_TRUNCATION[spec.name]
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidParams(f"truncation must be an integer >= 2, got {n!r}")
    return int(n)


def build(spec: FamilySpec) -> OperatorPencil:
    """Build the pencil of a family; truncations are leading principal blocks."""
    name, params = spec.name, dict(spec.params)
    if name == "example1" or name == "example2":
        n = _truncation(spec)
        w = sequence(params, n - 1)
        shift = np.diag(w, 1) if name == "example1" else np.diag(w, -1)
        return OperatorPencil(shift, np.eye(n), FamilySpec(name, params, n))
    if name == "example3":
        n = _truncation(spec)
        if n < 6 or n % 2:
            raise InvalidParams(f"example3 needs an even truncation >= 6, got {n}")
        beta = complex(params.setdefault("beta", 2.0))
        if beta == 0:
            raise InvalidParams("example3 needs beta != 0")
        alpha = sequence(params, n - 1)
        a0 = np.diag(alpha, 1).astype(complex)
        a0[np.arange(0, n, 2), np.arange(0, n, 2)] = 1.0
        a0[1, 1] = beta
        a1 = np.diag(np.tile([0.0, 1.0], n // 2))
        return OperatorPencil(a0, a1, FamilySpec(name, params, n))
    if name == "jordan_block":
        m = _need_int(params, "m", 1)
        return OperatorPencil(np.eye(m, k=1), np.eye(m), FamilySpec(name, {"m": m}))
    if name == "diag_split":
        n = _need_int(params, "n", 1)
        k = _need_int(params, "k", 0)
        if k > n:
            raise InvalidParams(f"diag_split needs k <= n, got k={k}, n={n}")
        d = np.r_[np.ones(k), np.zeros(n - k)]
        return OperatorPencil(np.diag(d), np.diag(1 - d), FamilySpec(name, {"n": n, "k": k}))
    if name == "random_regular":
        n = _need_int(params, "n", 2)
        seed = params.get("seed", 0)
        radius = float(params.get("radius", 1.0))
        return random_regular(n, seed, radius=radius)
    raise InvalidParams(f"unknown family {name!r}; expected one of {FAMILIES}")


def _resolve_seed(seed):
    import os

    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise InvalidParams(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return seed


def random_regular(n: int, seed=0, *, radius: float = 1.0, min_sigma: float = 1e-3,
                   gap: float = 1.25, nodes: int = 512, max_tries: int = 200) -> OperatorPencil:
    """Seeded pencil ``(A0, I)`` with a complex Gaussian ``A0``.

    Draws are rejected until ``A(z)`` has smallest singular value at least
    ``min_sigma`` at every quadrature node on ``|z| = radius`` and every
    eigenvalue modulus is outside ``[radius/gap, radius*gap]``. The seed is
    replaced by the ``PENCIL_RESOLVENT_SEED`` environment variable when set.
    """
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidParams(f"random_regular needs n >= 2, got {n!r}")
    if not radius > 0:
        raise InvalidParams("radius must be positive")
    n = int(n)
    seed = _resolve_seed(seed)
    rng = np.random.default_rng(seed)
    z = radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    eye = np.eye(n)
    for _ in range(max_tries):
        a0 = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
        mods = np.abs(np.linalg.eigvals(a0))
        if np.any((mods > radius / gap) & (mods < radius * gap)):
            continue
        sig = np.linalg.svd(a0[None] + z[:, None, None] * eye, compute_uv=False)[:, -1]
        if sig.min() < min_sigma:
            continue
        spec = FamilySpec("random_regular", {"n": n, "seed": seed, "radius": radius})
        return OperatorPencil(a0, eye, spec)
    raise ResampleLimitExceeded(f"no acceptable draw in {max_tries} tries (n={n}, seed={seed})")


def spectrum_annulus(p: OperatorPencil, radius: float = 1.0) -> Annulus:
    """Largest annulus around ``|z| = radius`` free of finite pencil eigenvalues."""
    import scipy.linalg as sla

    ev = sla.eigvals(p.a0, -p.a1)
    mods = np.abs(ev[np.isfinite(ev)])
    inner = mods[mods < radius]
    outer = mods[mods > radius]
    s = float(inner.max()) if inner.size else 0.0
    r = float(outer.min()) if outer.size else math.inf
    return Annulus(s, r)


def family_annulus(p: OperatorPencil, region: str = "near-zero") -> Annulus:
    """Annulus of analyticity for a family member and region."""
    spec = p.provenance
    if spec is None:
        raise NoReference("pencil has no family provenance")
    if region not in REGIONS:
        raise InvalidParams(f"region must be one of {REGIONS}, got {region!r}")
    if spec.name == "example3":
        beta = abs(complex(spec.params.get("beta", 2.0)))
        return Annulus(0.0, beta) if region == "near-zero" else Annulus(beta, math.inf)
    if spec.name == "random_regular":
        return spectrum_annulus(p, float(spec.params.get("radius", 1.0)))
    return Annulus(0.0, math.inf)


@dataclass(frozen=True, eq=False)
class Reference:
    """Closed-form matrices of one family and region.

    ``matrices`` holds ``P``, ``Pc``, ``Q``, ``Qc``, ``R_-1`` and ``R_0``.
    ``coefficient(j)`` returns ``R_j`` where a closed form exists.
    """

    region: str
    annulus: Annulus
    matrices: dict
    pole_order: int | None = None
    coefficient: Callable[[int], np.ndarray] | None = None


def _prod(alpha: np.ndarray, i: int, j: int) -> complex:
    """``alpha_i * ... * alpha_j`` with 1-based indices; empty products are 1."""
    if j < i:
        return 1.0
    return complex(np.prod(alpha[i - 1:j]))


def _example3_near_zero(alpha: np.ndarray, beta: complex, n: int) -> dict:
    def e(i):
        v = np.zeros(n, dtype=complex)
        v[i - 1] = 1.0
        return v

    def p_vec(m):
        return ((-1) ** m * _prod(alpha, 1, 2 * m + 1) / beta ** m * e(1)
                + (-1) ** (m - 1) * _prod(alpha, 2, 2 * m + 1) / beta ** m * e(2)
                - alpha[2 * m] * e(2 * m + 1) + e(2 * m + 2))

    def q_vec(m):
        return (-1) ** (m - 1) * _prod(alpha, 2, 2 * m + 1) / beta ** m * e(2) + e(2 * m + 2)

    P = np.zeros((n, n), dtype=complex)
    Q = np.zeros((n, n), dtype=complex)
    Rm1 = np.zeros((n, n), dtype=complex)
    for k in range(2, n // 2 + 1):
        pv, qv = p_vec(k - 1), q_vec(k - 1)
        P[:, 2 * k - 1] = pv
        Q[:, 2 * k - 1] = qv
        Rm1[:, 2 * k - 1] = pv
        if 2 * k + 1 <= n:
            Q[:, 2 * k] = -alpha[2 * k - 1] * qv
            Rm1[:, 2 * k] = -alpha[2 * k - 1] * pv
    R0 = np.zeros((n, n), dtype=complex)
    R0[0, 0] = 1.0
    for k in range(1, n // 2 + 1):
        R0[0, 2 * k - 1] = (-1) ** k * _prod(alpha, 1, 2 * k - 1) / beta ** k
        R0[1, 2 * k - 1] = (-1) ** (k + 1) * _prod(alpha, 2, 2 * k - 1) / beta ** k
        if 2 * k + 1 <= n:
            R0[0, 2 * k] = (-1) ** (k + 1) * _prod(alpha, 1, 2 * k) / beta ** k
            R0[1, 2 * k] = (-1) ** k * _prod(alpha, 2, 2 * k) / beta ** k
    for j in range(3, n + 1, 2):
        R0[j - 1, j - 1] = 1.0
    eye = np.eye(n)
    return {"P": P, "Pc": eye - P, "Q": Q, "Qc": eye - Q, "R_-1": Rm1, "R_0": R0}


def _example3_near_infinity(alpha: np.ndarray, n: int) -> dict:
    P = np.zeros((n, n), dtype=complex)
    Pc = np.zeros((n, n), dtype=complex)
    Q = np.zeros((n, n), dtype=complex)
    Qc = np.zeros((n, n), dtype=complex)
    Rm1 = np.zeros((n, n), dtype=complex)
    Qc[0, 0] = 1.0
    for m in range(1, n // 2 + 1):
        odd, even = 2 * m - 2, 2 * m - 1  # 0-based positions of e_{2m-1}, e_{2m}
        a_odd = alpha[2 * m - 2]
        P[odd, even], P[even, even] = -a_odd, 1.0
        Pc[odd, odd], Pc[odd, even] = 1.0, a_odd
        Q[even, even] = 1.0
        Rm1[odd, even], Rm1[even, even] = -a_odd, 1.0
        nxt = 2 * m  # 0-based column of e_{2m+1}
        if nxt < n:
            a_even = alpha[2 * m - 1]
            Q[even, nxt] = -a_even
            Qc[even, nxt], Qc[nxt, nxt] = a_even, 1.0
            Rm1[odd, nxt], Rm1[even, nxt] = a_odd * a_even, -a_even
    R0 = np.diag(np.tile([1.0, 0.0], n // 2)).astype(complex)
    return {"P": P, "Pc": Pc, "Q": Q, "Qc": Qc, "R_-1": Rm1, "R_0": R0}


def analytic_reference(spec: FamilySpec, region: str = "near-zero") -> Reference:
    """Closed-form projections and basic solution of a family.

    Raises
    ------
    NoReference
        For ``random_regular``, or a region the family does not have.
    """
    if region not in REGIONS:
        raise InvalidParams(f"region must be one of {REGIONS}, got {region!r}")
    p = build(spec)
    spec = p.provenance
    n = p.n
    eye = np.eye(n, dtype=complex)
    zero = np.zeros((n, n), dtype=complex)
    if spec.name == "random_regular":
        raise NoReference("random_regular has no closed form")
    if spec.name == "example3":
        beta = complex(spec.params["beta"])
        alpha = sequence(spec.params, n - 1)
        if region == "near-zero":
            mats = _example3_near_zero(alpha, beta, n)
            annulus = Annulus(0.0, abs(beta))
        else:
            mats = _example3_near_infinity(alpha, n)
            annulus = Annulus(abs(beta), math.inf)
        return Reference(region, annulus, mats)
    if region != "near-zero":
        raise NoReference(f"{spec.name} is analytic on the punctured plane; "
                          "use the near-zero region")
    annulus = Annulus(0.0, math.inf)
    if spec.name in ("example1", "example2", "jordan_block"):
        shift = p.a0

        def coefficient(j: int) -> np.ndarray:
            if j >= 0:
                return zero.copy()
            return np.linalg.matrix_power(-shift, -j - 1)

        mats = {"P": eye, "Pc": zero, "Q": eye, "Qc": zero, "R_-1": eye, "R_0": zero}
        order = spec.params["m"] if spec.name == "jordan_block" else None
        return Reference(region, annulus, mats, order, coefficient)
    if spec.name == "diag_split":
        d = np.diag(p.a0).real
        keep, drop = np.diag(d).astype(complex), np.diag(1 - d).astype(complex)

        def coefficient(j: int) -> np.ndarray:
            return drop.copy() if j == -1 else keep.copy() if j == 0 else zero.copy()

        mats = {"P": drop, "Pc": keep, "Q": drop, "Qc": keep, "R_-1": drop, "R_0": keep}
        order = 1 if spec.params["k"] < n else 0
        return Reference(region, annulus, mats, order, coefficient)
    raise NoReference(f"no closed form for {spec.name}")
