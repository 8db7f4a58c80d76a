"""State families on the circle, the line, and the sphere.

Three families are supported:

* ``PeriodicState``: psi(phi) = sum_m a_m e^{i m phi} / sqrt(2 pi) on
  phi in [0, 2 pi).  Periodicity psi(2 pi - 0) = psi(0) is automatic.
* ``OscillatorState``: psi(phi) = sum_n b_n sqrt(lam) h_n(lam phi) on the
  whole line, lam = sqrt(J omega / hbar).
* ``SphereState``: psi(theta, phi) = sum_m c_m Y_lm(theta, phi) at a fixed
  orbital number l.

All constructors rescale the supplied coefficients to unit norm, dividing
by the (real) norm only so the global phase of the input survives.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .specfun import TWO_PI


@dataclass(frozen=True)
class PeriodicState:
    coefficients: dict  # m -> complex amplitude, sum |a_m|^2 == 1
    truncation: int
    hbar: float = 1.0
    family: str = field(default="periodic", init=False, repr=False)


@dataclass(frozen=True)
class OscillatorState:
    coefficients: dict  # n -> complex amplitude, n >= 0
    truncation: int
    inertia: float = 1.0
    frequency: float = 1.0
    hbar: float = 1.0
    family: str = field(default="oscillator", init=False, repr=False)

    @property
    def scale(self):
        """lam = sqrt(J omega / hbar), the natural length of the pendulum."""
        return np.sqrt(self.inertia * self.frequency / self.hbar)


@dataclass(frozen=True)
class SphereState:
    l: int
    coefficients: dict  # m -> complex amplitude, |m| <= l
    hbar: float = 1.0
    family: str = field(default="sphere", init=False, repr=False)


def _normalized(coeffs):
    vals = {int(k): complex(v) for k, v in coeffs.items() if v != 0}
    if not vals:
        raise ValueError("state coefficients are all zero")
    norm = np.sqrt(sum(abs(v) ** 2 for v in vals.values()))
    return {k: v / norm for k, v in sorted(vals.items())}


def scr_eigenstate(m, truncation=64, hbar=1.0):
    """Sharp circular rotation eigenstate e^{i m phi} / sqrt(2 pi)."""
    if abs(m) > truncation:
        raise ValueError(f"scr_eigenstate: |m|={abs(m)} exceeds truncation {truncation}")
    return PeriodicState({int(m): 1.0 + 0.0j}, truncation=truncation, hbar=hbar)


def periodic_superposition(coeffs, truncation=None, hbar=1.0):
    """Normalized superposition of circle modes; keys are Fourier indices."""
    vals = _normalized(coeffs)
    band = max(abs(k) for k in vals)
    if truncation is None:
        truncation = max(band, 8)
    if band > truncation:
        raise ValueError(f"periodic_superposition: band {band} exceeds truncation {truncation}")
    return PeriodicState(vals, truncation=truncation, hbar=hbar)


def qtp_eigenstate(n, inertia=1.0, frequency=1.0, truncation=64, hbar=1.0):
    """Torsion-pendulum eigenstate; its energy is hbar omega (n + 1/2)."""
    if n < 0:
        raise ValueError("qtp_eigenstate: n must be nonnegative")
    if n > truncation:
        raise ValueError(f"qtp_eigenstate: n={n} exceeds truncation {truncation}")
    return OscillatorState(
        {int(n): 1.0 + 0.0j},
        truncation=truncation,
        inertia=inertia,
        frequency=frequency,
        hbar=hbar,
    )


def oscillator_superposition(coeffs, inertia=1.0, frequency=1.0, truncation=None, hbar=1.0):
    vals = _normalized(coeffs)
    if min(vals) < 0:
        raise ValueError("oscillator_superposition: indices must be nonnegative")
    top = max(vals)
    if truncation is None:
        truncation = max(top, 8)
    if top > truncation:
        raise ValueError(f"oscillator_superposition: index {top} exceeds truncation {truncation}")
    return OscillatorState(
        vals, truncation=truncation, inertia=inertia, frequency=frequency, hbar=hbar
    )


def sphere_state(l, coeffs, hbar=1.0):
    """Fixed-l sphere state sum_m c_m Y_lm; degenerate when several m mix."""
    if l < 0:
        raise ValueError("sphere_state: l must be nonnegative")
    vals = _normalized(coeffs)
    if any(abs(m) > l for m in vals):
        bad = [m for m in vals if abs(m) > l]
        raise ValueError(f"sphere_state: coefficients at |m| > l: {bad}")
    return SphereState(l=int(l), coefficients=vals, hbar=hbar)


def evaluate(state, point):
    """Pointwise value of the wave function from its coefficient expansion.

    ``point`` is phi for the circle and line families and (theta, phi) for
    the sphere.  Arrays are accepted and evaluated elementwise.
    """
    if isinstance(state, PeriodicState):
        phi = np.asarray(point, dtype=float)
        if np.any(phi < 0.0) or np.any(phi >= TWO_PI):
            raise ValueError("evaluate: circle states live on phi in [0, 2 pi)")
        out = np.zeros(phi.shape, dtype=complex)
        for m, a in state.coefficients.items():
            out = out + a * np.exp(1j * m * phi)
        out = out / np.sqrt(TWO_PI)
        return complex(out) if out.ndim == 0 else out
    if isinstance(state, OscillatorState):
        phi = np.asarray(point, dtype=float)
        lam = state.scale
        nmax = max(state.coefficients)
        table = specfun.hermite_function_table(nmax, lam * np.atleast_1d(phi))
        out = np.zeros(np.atleast_1d(phi).shape, dtype=complex)
        for n, b in state.coefficients.items():
            out = out + b * table[n]
        out = out * np.sqrt(lam)
        return complex(out[0]) if phi.ndim == 0 else out
    if isinstance(state, SphereState):
        theta, phi = point
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        if np.any(theta < 0.0) or np.any(theta > np.pi):
            raise ValueError("evaluate: theta must lie in [0, pi]")
        if np.any(phi < 0.0) or np.any(phi >= TWO_PI):
            raise ValueError("evaluate: phi must lie in [0, 2 pi)")
        out = np.zeros(np.broadcast(theta, phi).shape, dtype=complex)
        for m, c in state.coefficients.items():
            out = out + c * specfun.theta_lm(state.l, m, theta) * np.exp(1j * m * phi)
        out = out / np.sqrt(TWO_PI)
        return complex(out) if out.ndim == 0 else out
    raise TypeError(f"evaluate: unsupported state type {type(state)!r}")


def boundary_value(state):
    """psi(2 pi - 0), which equals psi(0) for any PeriodicState."""
    if not isinstance(state, PeriodicState):
        raise TypeError("boundary_value: only circle states have a boundary")
    return complex(sum(state.coefficients.values()) / np.sqrt(TWO_PI))


# -- JSON round trip ---------------------------------------------------------
#
# {"family": "periodic" | "oscillator" | "sphere",
#  "params": {...},
#  "coefficients": [[index, re, im], ...]}


def to_json(state):
    coeffs = [[int(k), float(v.real), float(v.imag)] for k, v in sorted(state.coefficients.items())]
    if isinstance(state, PeriodicState):
        params = {"truncation": state.truncation, "hbar": state.hbar}
    elif isinstance(state, OscillatorState):
        params = {
            "truncation": state.truncation,
            "inertia": state.inertia,
            "frequency": state.frequency,
            "hbar": state.hbar,
        }
    elif isinstance(state, SphereState):
        params = {"l": state.l, "hbar": state.hbar}
    else:
        raise TypeError(f"to_json: unsupported state type {type(state)!r}")
    return {"family": state.family, "params": params, "coefficients": coeffs}


def from_json(doc):
    family = doc.get("family")
    params = doc.get("params", {})
    coeffs = {int(k): complex(re, im) for k, re, im in doc.get("coefficients", [])}
    if family == "periodic":
        return periodic_superposition(
            coeffs, truncation=params.get("truncation"), hbar=params.get("hbar", 1.0)
        )
    if family == "oscillator":
        return oscillator_superposition(
            coeffs,
            inertia=params.get("inertia", 1.0),
            frequency=params.get("frequency", 1.0),
            truncation=params.get("truncation"),
            hbar=params.get("hbar", 1.0),
        )
    if family == "sphere":
        return sphere_state(params["l"], coeffs, hbar=params.get("hbar", 1.0))
    raise ValueError(f"from_json: unknown family {family!r}")


def save(state, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json(state), fh, sort_keys=True, indent=2)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return from_json(json.load(fh))


# -- seeded random states (shared by the test sweeps and the CLI) ------------
#
# The generator contract is numpy's PCG64 via np.random.default_rng(seed);
# draws happen in a fixed order so identical seeds give identical states.
# A quarter of the draws are "peaked" states, one dominant mode plus 1e-2
# noise, so sweeps also visit the near-eigenstate corner of state space.


def random_periodic(rng, band=8, hbar=1.0):
    m = np.arange(-band, band + 1)
    amps = rng.standard_normal(m.size) + 1j * rng.standard_normal(m.size)
    if rng.uniform() < 0.25:
        spike = int(rng.integers(-band, band + 1))
        amps = 0.01 * amps
        amps[spike + band] += 1.0
    return periodic_superposition(dict(zip(m, amps)), truncation=band, hbar=hbar)


def random_oscillator(rng, nmax=10, inertia=1.0, frequency=1.0, hbar=1.0):
    n = np.arange(nmax + 1)
    amps = rng.standard_normal(n.size) + 1j * rng.standard_normal(n.size)
    if rng.uniform() < 0.25:
        spike = int(rng.integers(0, nmax + 1))
        amps = 0.01 * amps
        amps[spike] += 1.0
    return oscillator_superposition(
        dict(zip(n, amps)), inertia=inertia, frequency=frequency, hbar=hbar
    )


def random_sphere(rng, l, hbar=1.0):
    m = np.arange(-l, l + 1)
    amps = rng.standard_normal(m.size) + 1j * rng.standard_normal(m.size)
    if rng.uniform() < 0.25:
        spike = int(rng.integers(-l, l + 1))
        amps = 0.01 * amps
        amps[spike + l] += 1.0
    return sphere_state(l, dict(zip(m, amps)), hbar=hbar)
