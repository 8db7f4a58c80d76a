"""Operator algebra and moments for the three state families.

The observables L_z = -i hbar d/dphi and phi (multiplication) act on
coefficient vectors.  On the circle the product phi * psi leaves the span
of e^{i m phi}, so circle (and sphere) kets are represented exactly as

    f(phi) = sum_d phi^d * sum_k u_{d k} e^{i k phi} / sqrt(2 pi),

where the power d grows by one per application of phi and the derivative
acts by the Leibniz rule.  With the range [0, 2 pi) and one-sided
derivatives at its ends, d/dphi of phi^d times a smooth periodic factor is
the plain pointwise derivative, so operator products are evaluated exactly
and the boundary anomaly of the L_z, phi pair comes out of the algebra
instead of being special-cased.  Inner products reduce to closed-form
matrix elements

    (e_a, phi^p e_b) = (2 pi)^p / (p + 1)                      (a == b)
    (e_a, phi^p e_b) = sum_{j=0}^{p-1} (-1)^j p!/(p-j)!
                       (i s)^{-(j+1)} (2 pi)^{p-j-1},  s = b - a.

On the line the Hermite-function ladder gives exact tridiagonal actions,
    xi h_n   = sqrt(n/2) h_{n-1} + sqrt((n+1)/2) h_{n+1},
    d/dxi h_n = sqrt(n/2) h_{n-1} - sqrt((n+1)/2) h_{n+1},
and multiplication by a trigonometric polynomial of phi = xi / lam uses a
Gauss-Hermite matrix that is exact to machine precision at the padded
working dimension.

Sphere kets carry the circle representation per polar row; the theta
factors enter only through their Gauss-Legendre overlap matrix.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import specfun
from .specfun import TWO_PI
from .states import OscillatorState, PeriodicState, SphereState

_KPAD = 4  # head-room in the Fourier band for trig multiplications
_NPAD = 48  # head-room in the Hermite band; trig tails decay superfactorially
_MEAN_IMAG_TOL = 1e-10


class UnsupportedObservable(ValueError):
    """Raised when an observable does not act on the given family."""


@dataclass(frozen=True)
class Observable:
    """A named operator.

    ``fourier`` marks multiplication by sum_k f_k e^{i k phi}; ``action``
    is an optional custom coefficient-space action ket -> ket.  ``hermitian``
    gates the mean / standard-deviation paths.
    """

    tag: str
    hermitian: bool = True
    fourier: tuple = None
    action: object = None

    @property
    def label(self):
        return self.tag


LZ = Observable("Lz")
PHI = Observable("Phi")
PHI2 = Observable("Phi2")
SIN_PHI = Observable("SinPhi", fourier=((1, -0.5j), (-1, 0.5j)))
COS_PHI = Observable("CosPhi", fourier=((1, 0.5 + 0.0j), (-1, 0.5 + 0.0j)))
HAMILTONIAN = Observable("Hamiltonian")

_BY_TAG = {o.tag: o for o in (LZ, PHI, PHI2, SIN_PHI, COS_PHI, HAMILTONIAN)}


def trig_observable(label, coeffs):
    """Multiplication by f(phi) = sum_k f_k e^{i k phi} (k integer)."""
    items = tuple(sorted((int(k), complex(v)) for k, v in coeffs.items() if v != 0))
    if not items:
        raise ValueError("trig_observable: empty coefficient set")
    table = dict(items)
    hermitian = all(abs(table.get(-k, 0.0) - np.conj(v)) < 1e-14 for k, v in items)
    return Observable(label, hermitian=hermitian, fourier=items)


def resolve_observable(obs):
    if isinstance(obs, Observable):
        return obs
    try:
        return _BY_TAG[obs]
    except KeyError:
        raise UnsupportedObservable(f"unknown observable tag {obs!r}") from None


# -- circle matrix elements ---------------------------------------------------


@lru_cache(maxsize=None)
def _phi_power_block(power, kmax):
    """(e_a, phi^power e_b) for a, b in [-kmax, kmax]; exactly Hermitian."""
    k = np.arange(-kmax, kmax + 1)
    s = k[None, :] - k[:, None]
    out = np.zeros(s.shape, dtype=complex)
    diag = s == 0
    out[diag] = TWO_PI**power / (power + 1.0)
    if power >= 1:
        ss = s[~diag].astype(float)
        inv_is = 1.0 / (1j * ss)
        acc = np.zeros(ss.shape, dtype=complex)
        coef = 1.0
        for j in range(power):
            if j > 0:
                coef *= power - j + 1
            acc += (-1.0) ** j * coef * inv_is ** (j + 1) * TWO_PI ** (power - j - 1)
        out[~diag] = acc
    out.setflags(write=False)
    return out


def phi_matrix(truncation):
    """Matrix of phi on the circle basis, indices m in [-truncation, truncation]."""
    return _phi_power_block(1, truncation).copy()


def phi2_matrix(truncation):
    """Matrix of phi^2 on the circle basis."""
    return _phi_power_block(2, truncation).copy()


@lru_cache(maxsize=None)
def _theta_overlap(l):
    """O_{m r} = integral(theta_lm theta_lr sin(theta) d theta), real symmetric."""
    rule = specfun.gauss_legendre(max(64, 2 * l + 4))
    theta = np.arccos(rule.nodes)
    table = specfun.theta_lm_table(l, theta)
    out = (table * rule.weights) @ table.T
    out.setflags(write=False)
    return out


# -- kets ---------------------------------------------------------------------


class CircleKet:
    """Exact representation sum_d phi^d * (Fourier band) on [0, 2 pi)."""

    __slots__ = ("coeffs", "kmax", "hbar")

    def __init__(self, coeffs, kmax, hbar):
        self.coeffs = coeffs  # shape (D+1, 2*kmax+1), complex
        self.kmax = kmax
        self.hbar = hbar

    @property
    def family(self):
        return "periodic"

    def scaled(self, z):
        return CircleKet(z * self.coeffs, self.kmax, self.hbar)

    def plus(self, other):
        a, b, kmax = _align_circle(self, other)
        return CircleKet(a + b, kmax, self.hbar)

    def lz(self):
        c = self.coeffs
        k = np.arange(-self.kmax, self.kmax + 1)
        out = (self.hbar * k) * c.astype(complex)
        depth = c.shape[0]
        if depth > 1:
            d = np.arange(1, depth)[:, None]
            out[:-1] += -1j * self.hbar * d * c[1:]
        return CircleKet(out, self.kmax, self.hbar)

    def mul_phi(self):
        depth, width = self.coeffs.shape
        out = np.zeros((depth + 1, width), dtype=complex)
        out[1:] = self.coeffs
        return CircleKet(out, self.kmax, self.hbar)

    def mul_trig(self, fourier):
        grow = max(abs(k) for k, _ in fourier)
        kmax = self.kmax + grow
        depth, width = self.coeffs.shape
        out = np.zeros((depth, 2 * kmax + 1), dtype=complex)
        for k, coef in fourier:
            lo = grow + k
            out[:, lo : lo + width] += coef * self.coeffs
        return CircleKet(out, kmax, self.hbar)

    def inner(self, other):
        a, b, kmax = _align_circle(self, other)
        total = 0.0 + 0.0j
        for d in range(a.shape[0]):
            for e in range(b.shape[0]):
                if d + e == 0:
                    total += np.vdot(a[d], b[e])
                else:
                    total += a[d].conj() @ _phi_power_block(d + e, kmax) @ b[e]
        return complex(total)

    def norm(self):
        return float(np.sqrt(max(self.inner(self).real, 0.0)))


def _align_circle(x, y):
    kmax = max(x.kmax, y.kmax)
    depth = max(x.coeffs.shape[0], y.coeffs.shape[0])
    return _embed_circle(x, depth, kmax), _embed_circle(y, depth, kmax), kmax


def _embed_circle(ket, depth, kmax):
    d0, w0 = ket.coeffs.shape
    out = np.zeros((depth, 2 * kmax + 1), dtype=complex)
    off = kmax - ket.kmax
    out[:d0, off : off + w0] = ket.coeffs
    return out


class LineKet:
    """Hermite-band vector with the pendulum's scale parameters attached."""

    __slots__ = ("coeffs", "lam", "hbar", "inertia", "frequency")

    def __init__(self, coeffs, lam, hbar, inertia, frequency):
        self.coeffs = coeffs  # shape (K,), complex
        self.lam = lam
        self.hbar = hbar
        self.inertia = inertia
        self.frequency = frequency

    @property
    def family(self):
        return "oscillator"

    def _like(self, coeffs):
        return LineKet(coeffs, self.lam, self.hbar, self.inertia, self.frequency)

    def scaled(self, z):
        return self._like(z * self.coeffs)

    def plus(self, other):
        a, b = _align_line(self.coeffs, other.coeffs)
        return self._like(a + b)

    def _ladder(self, sign):
        # (result)_n = sqrt(n/2) c_{n-1} + sign * sqrt((n+1)/2) c_{n+1}
        c = self.coeffs
        n = np.arange(c.size)
        out = np.zeros_like(c)
        out[1:] += np.sqrt(n[1:] / 2.0) * c[:-1]
        out[:-1] += sign * np.sqrt((n[:-1] + 1) / 2.0) * c[1:]
        return out

    def lz(self):
        # -i hbar lam d/dxi; the derivative matrix is minus the odd ladder
        return self._like(1j * self.hbar * self.lam * self._ladder(-1.0))

    def mul_phi(self):
        return self._like(self._ladder(+1.0) / self.lam)

    def mul_trig(self, fourier):
        mat = _line_mult_matrix(self.coeffs.size, float(self.lam), fourier)
        return self._like(mat @ self.coeffs)

    def hamiltonian(self):
        kin = self.lz().lz().scaled(1.0 / (2.0 * self.inertia))
        pot = self.mul_phi().mul_phi().scaled(0.5 * self.inertia * self.frequency**2)
        return kin.plus(pot)

    def inner(self, other):
        a, b = _align_line(self.coeffs, other.coeffs)
        return complex(np.vdot(a, b))

    def norm(self):
        return float(np.linalg.norm(self.coeffs))


def _align_line(a, b):
    size = max(a.size, b.size)
    if a.size < size:
        a = np.concatenate([a, np.zeros(size - a.size, dtype=complex)])
    if b.size < size:
        b = np.concatenate([b, np.zeros(size - b.size, dtype=complex)])
    return a, b


@lru_cache(maxsize=128)
def _line_mult_matrix(dim, lam, fourier):
    """Matrix of f(phi) = sum_k f_k e^{i k phi} on h_0..h_{dim-1}, phi = xi/lam.

    Gauss-Hermite with dim + 48 nodes; exact for the polynomial part and
    converged to machine precision for the entire trigonometric factor.
    """
    rule = specfun.gauss_hermite(dim + 48)
    x, w = rule.nodes, rule.weights
    wt = w * np.exp(x * x)  # plain-dxi weights against h_n h_k
    table = specfun.hermite_function_table(dim - 1, x)
    fvals = np.zeros(x.shape, dtype=complex)
    for k, coef in fourier:
        fvals += coef * np.exp(1j * k * x / lam)
    mat = (table * (wt * fvals)) @ table.T
    mat.setflags(write=False)
    return mat


class SphereKet:
    """Per-polar-row circle representation at fixed l."""

    __slots__ = ("coeffs", "l", "kmax", "hbar")

    def __init__(self, coeffs, l, kmax, hbar):
        self.coeffs = coeffs  # shape (2l+1, D+1, 2*kmax+1)
        self.l = l
        self.kmax = kmax
        self.hbar = hbar

    @property
    def family(self):
        return "sphere"

    def scaled(self, z):
        return SphereKet(z * self.coeffs, self.l, self.kmax, self.hbar)

    def plus(self, other):
        a, b, kmax = _align_sphere(self, other)
        return SphereKet(a + b, self.l, kmax, self.hbar)

    def lz(self):
        c = self.coeffs
        k = np.arange(-self.kmax, self.kmax + 1)
        out = (self.hbar * k) * c.astype(complex)
        depth = c.shape[1]
        if depth > 1:
            d = np.arange(1, depth)[None, :, None]
            out[:, :-1, :] += -1j * self.hbar * d * c[:, 1:, :]
        return SphereKet(out, self.l, self.kmax, self.hbar)

    def mul_phi(self):
        rows, depth, width = self.coeffs.shape
        out = np.zeros((rows, depth + 1, width), dtype=complex)
        out[:, 1:, :] = self.coeffs
        return SphereKet(out, self.l, self.kmax, self.hbar)

    def mul_trig(self, fourier):
        grow = max(abs(k) for k, _ in fourier)
        kmax = self.kmax + grow
        rows, depth, width = self.coeffs.shape
        out = np.zeros((rows, depth, 2 * kmax + 1), dtype=complex)
        for k, coef in fourier:
            lo = grow + k
            out[:, :, lo : lo + width] += coef * self.coeffs
        return SphereKet(out, self.l, kmax, self.hbar)

    def inner(self, other):
        a, b, kmax = _align_sphere(self, other)
        overlap = _theta_overlap(self.l)
        total = 0.0 + 0.0j
        for d in range(a.shape[1]):
            for e in range(b.shape[1]):
                block = _phi_power_block(d + e, kmax)
                total += np.einsum(
                    "mk,mn,kl,nl->", a[:, d, :].conj(), overlap, block, b[:, e, :]
                )
        return complex(total)

    def norm(self):
        return float(np.sqrt(max(self.inner(self).real, 0.0)))


def _align_sphere(x, y):
    kmax = max(x.kmax, y.kmax)
    depth = max(x.coeffs.shape[1], y.coeffs.shape[1])
    return _embed_sphere(x, depth, kmax), _embed_sphere(y, depth, kmax), kmax


def _embed_sphere(ket, depth, kmax):
    rows, d0, w0 = ket.coeffs.shape
    out = np.zeros((rows, depth, 2 * kmax + 1), dtype=complex)
    off = kmax - ket.kmax
    out[:, :d0, off : off + w0] = ket.coeffs
    return out


# -- lifting and operator dispatch -------------------------------------------


def lift(state):
    """Coefficient-space ket for a state; kets pass through unchanged."""
    if isinstance(state, (CircleKet, LineKet, SphereKet)):
        return state
    if isinstance(state, PeriodicState):
        band = max(abs(m) for m in state.coefficients)
        kmax = max(state.truncation, band) + _KPAD
        coeffs = np.zeros((1, 2 * kmax + 1), dtype=complex)
        for m, a in state.coefficients.items():
            coeffs[0, m + kmax] = a
        return CircleKet(coeffs, kmax, state.hbar)
    if isinstance(state, OscillatorState):
        dim = max(state.coefficients) + 1 + _NPAD
        coeffs = np.zeros(dim, dtype=complex)
        for n, b in state.coefficients.items():
            coeffs[n] = b
        return LineKet(coeffs, state.scale, state.hbar, state.inertia, state.frequency)
    if isinstance(state, SphereState):
        kmax = state.l + _KPAD
        coeffs = np.zeros((2 * state.l + 1, 1, 2 * kmax + 1), dtype=complex)
        for m, c in state.coefficients.items():
            coeffs[m + state.l, 0, m + kmax] = c
        return SphereKet(coeffs, state.l, kmax, state.hbar)
    raise TypeError(f"lift: unsupported state type {type(state)!r}")


def apply(obs, state):
    """Act with an observable on a state or ket, returning a ket."""
    obs = resolve_observable(obs)
    ket = lift(state)
    if obs.action is not None:
        return obs.action(ket)
    if obs.fourier is not None:
        return ket.mul_trig(obs.fourier)
    if obs.tag == "Lz":
        return ket.lz()
    if obs.tag == "Phi":
        return ket.mul_phi()
    if obs.tag == "Phi2":
        return ket.mul_phi().mul_phi()
    if obs.tag == "Hamiltonian":
        if not isinstance(ket, LineKet):
            raise UnsupportedObservable("Hamiltonian acts on the oscillator family only")
        return ket.hamiltonian()
    raise UnsupportedObservable(f"observable {obs.tag!r} has no action")


def apply_lz(state):
    return apply(LZ, state)


def apply_phi(state):
    return apply(PHI, state)


def inner_product(x, y):
    """(x, y), conjugate-linear in the first slot."""
    return lift(x).inner(lift(y))


def mean(obs, state):
    """Expected value (psi, A psi); rejects non-Hermitian observables."""
    obs = resolve_observable(obs)
    if not obs.hermitian:
        raise UnsupportedObservable(
            f"mean: observable {obs.label!r} is not Hermitian; expectation undefined"
        )
    ket = lift(state)
    val = ket.inner(apply(obs, ket))
    if abs(val.imag) > _MEAN_IMAG_TOL * max(1.0, abs(val.real)):
        raise ArithmeticError(
            f"mean of {obs.label}: imaginary residue {val.imag:.3e} exceeds {_MEAN_IMAG_TOL}"
        )
    return float(val.real)


@dataclass(frozen=True)
class DeviationVector:
    """delta_A psi = A psi - <A> psi together with its provenance."""

    vector: object
    observable: Observable
    base: object
    mean: float

    def inner(self, other):
        vec = other.vector if isinstance(other, DeviationVector) else other
        return self.vector.inner(vec)

    def norm(self):
        return self.vector.norm()


def deviation_vector(obs, state):
    obs = resolve_observable(obs)
    ket = lift(state)
    mu = mean(obs, ket)
    vec = apply(obs, ket).plus(ket.scaled(-mu))
    return DeviationVector(vector=vec, observable=obs, base=ket, mean=mu)


def std_dev(obs, state):
    """Standard deviation, the norm of the deviation vector."""
    return deviation_vector(obs, state).norm()


def sphere_variances(state):
    """Closed-form variances for a fixed-l sphere state.

    var_Lz comes from the diagonal m sums; var_phi from the double sums
    over (Y_lm, phi Y_lr) and (Y_lm, phi^2 Y_lr), each of which factors
    into a theta overlap times a circle matrix element.
    """
    if not isinstance(state, SphereState):
        raise TypeError("sphere_variances: need a SphereState")
    l = state.l
    c = np.zeros(2 * l + 1, dtype=complex)
    for m, v in state.coefficients.items():
        c[m + l] = v
    mvals = np.arange(-l, l + 1)
    w = np.abs(c) ** 2
    mean_lz = state.hbar * float(w @ mvals)
    var_lz = state.hbar**2 * float(w @ mvals**2) - mean_lz**2
    overlap = _theta_overlap(l)
    phi1 = overlap * _phi_power_block(1, l)
    phi2 = overlap * _phi_power_block(2, l)
    mean_phi = (c.conj() @ phi1 @ c).real
    mean_phi2 = (c.conj() @ phi2 @ c).real
    return {"var_Lz": var_lz, "var_phi": float(mean_phi2 - mean_phi**2)}


def qtp_energy_mean(state):
    """<H> for the torsion pendulum; hbar omega (n + 1/2) on eigenstates."""
    if not isinstance(state, (OscillatorState, LineKet)):
        raise TypeError("qtp_energy_mean: need an oscillator state")
    return mean(HAMILTONIAN, state)


def commutator_residual(state, resolution=1024):
    """max interior |[L_z, phi] psi + i hbar psi| on a sampling grid.

    Evaluated with the grid oracle's differencing (one-sided stencils at
    the extremities, never wrap-around), so it is an independent check of
    the canonical commutator on the half-open range.
    """
    from . import oracle  # local import keeps module dependencies one-way

    if isinstance(state, PeriodicState):
        grid = oracle.circle_grid(resolution)
    elif isinstance(state, OscillatorState):
        grid = oracle.line_grid_for(state, n=resolution, half_width_floor=9.0, margin=5.0)
    else:
        raise TypeError("commutator_residual: circle or line families only")
    psi = oracle.sample(state, grid)
    phi = grid.points
    dpsi = oracle.numeric_derivative(psi, grid)
    dphipsi = oracle.numeric_derivative(phi * psi, grid)
    residual = state.hbar * np.abs(dphipsi - phi * dpsi - psi)
    return float(np.max(residual[2:-2]))
