"""Special-function and quadrature kernels used by every basis.

Conventions
-----------
* Hermite polynomials H_n are the physicists' family,
  H_{n+1}(xi) = 2 xi H_n(xi) - 2 n H_{n-1}(xi).
* Hermite functions h_n(xi) = (2^n n! sqrt(pi))^(-1/2) exp(-xi^2/2) H_n(xi)
  form an orthonormal set on the real line.  They are generated by a
  recurrence directly on h_n so that no factorial ever overflows.
* theta_lm is the polar factor of the spherical harmonic,
  Y_lm(theta, phi) = theta_lm(theta) * exp(i m phi) / sqrt(2 pi),
  normalized so that integral over [0, pi] of theta_lm^2 sin(theta) equals 1.
  The Condon-Shortley phase is included; all moduli and inequalities are
  insensitive to that choice, consistency is what matters.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss

TWO_PI = 2.0 * np.pi

# float64 overflows the polynomial recurrence far beyond these; the function
# recurrence is normalized and stays O(1), the cap just bounds work.
_HERMITE_POLY_MAX = 250
_HERMITE_FUNC_MAX = 600
_THETA_MAX_L = 64


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights over one of the three supported domains."""

    nodes: np.ndarray
    weights: np.ndarray
    domain: str  # "periodic-circle" | "finite-interval" | "real-line"


def hermite_polynomial(n, xi):
    """H_n(xi), physicists' convention, by the three-term recurrence."""
    if n < 0:
        raise ValueError("hermite_polynomial: n must be nonnegative")
    if n > _HERMITE_POLY_MAX:
        raise ValueError(
            f"hermite_polynomial: n={n} outside supported range (max {_HERMITE_POLY_MAX})"
        )
    xi = np.asarray(xi, dtype=float)
    h_prev = np.ones_like(xi)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h_cur = 2.0 * xi
    for k in range(1, n):
        h_prev, h_cur = h_cur, 2.0 * xi * h_cur - 2.0 * k * h_prev
    return h_cur if h_cur.ndim else float(h_cur)


def hermite_function(n, xi):
    """Orthonormal oscillator eigenfunction h_n(xi).

    Uses the normalized recurrence
        h_0 = pi^(-1/4) exp(-xi^2/2),
        h_n = xi sqrt(2/n) h_{n-1} - sqrt((n-1)/n) h_{n-2},
    which keeps every intermediate O(1).
    """
    if n < 0:
        raise ValueError("hermite_function: n must be nonnegative")
    if n > _HERMITE_FUNC_MAX:
        raise ValueError(
            f"hermite_function: n={n} outside supported range (max {_HERMITE_FUNC_MAX})"
        )
    xi = np.asarray(xi, dtype=float)
    h_prev = np.pi ** (-0.25) * np.exp(-0.5 * xi * xi)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h_cur = xi * np.sqrt(2.0) * h_prev
    for k in range(2, n + 1):
        h_prev, h_cur = h_cur, xi * np.sqrt(2.0 / k) * h_cur - np.sqrt((k - 1.0) / k) * h_prev
    return h_cur if h_cur.ndim else float(h_cur)


def hermite_function_table(nmax, xi):
    """Array of h_0..h_nmax evaluated at xi, shape (nmax+1,) + shape(xi)."""
    if nmax < 0:
        raise ValueError("hermite_function_table: nmax must be nonnegative")
    if nmax > _HERMITE_FUNC_MAX:
        raise ValueError(f"hermite_function_table: nmax={nmax} outside supported range")
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.zeros((nmax + 1,) + xi.shape)
    out[0] = np.pi ** (-0.25) * np.exp(-0.5 * xi * xi)
    if nmax >= 1:
        out[1] = xi * np.sqrt(2.0) * out[0]
    for k in range(2, nmax + 1):
        out[k] = xi * np.sqrt(2.0 / k) * out[k - 1] - np.sqrt((k - 1.0) / k) * out[k - 2]
    return out


def legendre_polynomial(n, x):
    """Legendre polynomial P_n(x) (helper for the Gauss-Legendre solver)."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p_cur = x.copy()
    for k in range(1, n):
        p_prev, p_cur = p_cur, ((2 * k + 1) * x * p_cur - k * p_prev) / (k + 1)
    return p_cur if p_cur.ndim else float(p_cur)


def gauss_legendre(n):
    """Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on P_n."""
    if n < 2:
        raise ValueError("gauss_legendre: need n >= 2")
    # initial guesses, then Newton with P'_n from the standard identity
    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    for _ in range(100):
        p = legendre_polynomial(n, x)
        p1 = legendre_polynomial(n - 1, x)
        dp = n * (x * p - p1) / (x * x - 1.0)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-14:
            break
    p1 = legendre_polynomial(n - 1, x)
    dp = n * (x * legendre_polynomial(n, x) - p1) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    return QuadratureRule(nodes=x[order], weights=w[order], domain="finite-interval")


def gauss_hermite(n):
    """Gauss-Hermite rule for integral(exp(-x^2) f(x) dx) over the line."""
    if n < 2:
        raise ValueError("gauss_hermite: need n >= 2")
    x, w = hermgauss(n)
    return QuadratureRule(nodes=x, weights=w, domain="real-line")


def periodic_trapezoid(n):
    """n equispaced nodes on [0, 2 pi), weight 2 pi / n each."""
    if n < 2:
        raise ValueError("periodic_trapezoid: need n >= 2")
    nodes = TWO_PI * np.arange(n) / n
    weights = np.full(n, TWO_PI / n)
    return QuadratureRule(nodes=nodes, weights=weights, domain="periodic-circle")


def _theta_rows(l, x, sx):
    """theta_lm rows for m = 0..l at x = cos(theta), sx = sin(theta) >= 0."""
    rows = np.zeros((l + 1,) + x.shape)
    diag = np.full(x.shape, 1.0 / np.sqrt(2.0))  # theta_00
    for m in range(l + 1):
        if m > 0:
            diag = -np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * sx * diag
        if m == l:
            rows[m] = diag
            break
        prev = diag
        cur = np.sqrt(2.0 * m + 3.0) * x * diag
        for ll in range(m + 2, l + 1):
            a = np.sqrt((4.0 * ll * ll - 1.0) / (ll * ll - m * m))
            b = np.sqrt(((ll - 1.0) ** 2 - m * m) / (4.0 * (ll - 1.0) ** 2 - 1.0))
            prev, cur = cur, a * (x * cur - b * prev)
        rows[m] = cur
    return rows


def theta_lm(l, m, theta):
    """Polar factor of Y_lm, unit-normalized against sin(theta) d(theta)."""
    if l < 0 or l > _THETA_MAX_L:
        raise ValueError(f"theta_lm: l={l} outside supported range [0, {_THETA_MAX_L}]")
    if abs(m) > l:
        raise ValueError(f"theta_lm: |m|={abs(m)} exceeds l={l}")
    theta = np.asarray(theta, dtype=float)
    scalar = theta.ndim == 0
    theta = np.atleast_1d(theta)
    x, sx = np.cos(theta), np.sin(theta)
    rows = _theta_rows(l, x, sx)
    val = rows[abs(m)]
    if m < 0 and abs(m) % 2 == 1:
        val = -val
    return float(val[0]) if scalar else val


def theta_lm_table(l, theta):
    """theta_lm for all m in [-l, l]; row index i corresponds to m = i - l."""
    if l < 0 or l > _THETA_MAX_L:
        raise ValueError(f"theta_lm_table: l={l} outside supported range")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    rows = _theta_rows(l, np.cos(theta), np.sin(theta))
    out = np.zeros((2 * l + 1,) + theta.shape)
    for m in range(-l, l + 1):
        sign = -1.0 if (m < 0 and (-m) % 2 == 1) else 1.0
        out[m + l] = sign * rows[abs(m)]
    return out


def spherical_harmonic(l, m, theta, phi):
    """Y_lm(theta, phi), orthonormal over sin(theta) d(theta) d(phi)."""
    if abs(m) > l:
        raise ValueError(f"spherical_harmonic: |m|={abs(m)} exceeds l={l}")
    th = theta_lm(l, m, theta)
    phase = np.exp(1j * m * np.asarray(phi, dtype=float))
    val = th * phase / np.sqrt(TWO_PI)
    return complex(val) if np.ndim(val) == 0 else val
