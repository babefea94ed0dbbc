"""Random test pencils with a known spectral split."""
import numpy as np

from pencil_resolvent.pencil import Annulus, OperatorPencil


def conditioned(rng, n, lo=0.5, hi=2.0):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    q2, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q @ np.diag(rng.uniform(lo, hi, n)) @ q2


def weierstrass_pencil(rng, n_small=2, n_zero=1, n_large=2, n_inf=2):
    """Pencil ``S diag(J + zI, I + zN) T`` with a chosen eigenvalue layout.

    ``J`` carries ``n_small`` eigenvalues of modulus in (0.05, 0.4), a
    nilpotent Jordan block of size ``n_zero`` (a pole at 0) and ``n_large``
    eigenvalues of modulus in (2.5, 6). ``N`` is a nilpotent Jordan block of
    size ``n_inf``, so ``A1`` is singular whenever ``n_inf > 0``.

    Returns the pencil and its annulus ``(s, r)`` around ``|z| = 1``.
    """
    small = rng.uniform(0.05, 0.4, n_small) * np.exp(2j * np.pi * rng.random(n_small))
    large = rng.uniform(2.5, 6.0, n_large) * np.exp(2j * np.pi * rng.random(n_large))
    nf = n_small + n_zero + n_large
    j = np.zeros((nf, nf), dtype=complex)
    j[np.arange(n_small), np.arange(n_small)] = -small
    if n_zero:
        j[n_small:n_small + n_zero, n_small:n_small + n_zero] = np.eye(n_zero, k=1)
    k = n_small + n_zero
    j[np.arange(k, nf), np.arange(k, nf)] = -large
    n = nf + n_inf
    b0 = np.zeros((n, n), dtype=complex)
    b1 = np.zeros((n, n), dtype=complex)
    b0[:nf, :nf] = j
    b1[:nf, :nf] = np.eye(nf)
    b0[nf:, nf:] = np.eye(n_inf)
    b1[nf:, nf:] = np.eye(n_inf, k=1)
    s_mat, t_mat = conditioned(rng, n), conditioned(rng, n)
    s = float(np.abs(small).max()) if n_small else 0.0
    r = float(np.abs(large).min()) if n_large else np.inf
    return OperatorPencil(s_mat @ b0 @ t_mat, s_mat @ b1 @ t_mat), Annulus(s, r)


def nilpotent_similar(rng, m, extra=0):
    """``(S J S^-1 (+) D, I)`` with ``J`` an ``m x m`` Jordan block and ``D``
    an invertible diagonal of size ``extra``; the pole order at 0 is ``m``."""
    n = m + extra
    a = np.zeros((n, n), dtype=complex)
    a[:m, :m] = np.eye(m, k=1)
    a[np.arange(m, n), np.arange(m, n)] = rng.uniform(1.0, 3.0, extra)
    s = conditioned(rng, n)
    return OperatorPencil(s @ a @ np.linalg.inv(s), np.eye(n))
