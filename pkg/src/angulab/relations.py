"""The inequality and identity hierarchy for observable pairs.

Central objects:

* ``csf``: Delta_A Delta_B >= |(delta_A psi, delta_B psi)|, the
  Cauchy-Schwarz formula.  Valid for every state and observable pair.
* ``adjointness_mismatch``: the matrix Delta_jk = (A_j psi, A_k psi) -
  (psi, A_j A_k psi).  A nonzero entry voids the usual derivation of the
  Robertson-Schrodinger relation.
* ``rsur``: Delta_A Delta_B >= |<[A, B]>| / 2.  The commutator mean is
  taken from the real/imaginary split of (delta_A psi, delta_B psi) when
  the mismatch vanishes and by direct operator composition otherwise, so
  the relation can be exhibited exactly where it fails.
* ``boundary_bound``: the circle-family bound whose right-hand side is
  (hbar/2) |1 - 2 pi B| with B the boundary probability density
  |psi(2 pi - 0)|^2.  The identity
  Im (delta_Lz psi, delta_phi psi) = -(hbar/2) (1 - 2 pi B) makes it an
  unconditional consequence of Cauchy-Schwarz.  (With a single modulus
  instead of the density the bound is violated by every sharp-rotation
  eigenstate; the squared form is the consistent reading.  Set
  ``squared_density=False`` to evaluate the single-modulus variant for
  comparison.)
* ``gram_det``: determinant (and minimum eigenvalue) of the deviation
  Gram matrix, nonnegative because the matrix is Hermitian PSD.
* ``adjusted_relation``: the pluggable evaluator for the literature's
  substitute relations, with trig presets.
"""

from dataclasses import dataclass, field

import numpy as np

from . import operators
from .operators import (
    COS_PHI,
    LZ,
    PHI,
    SIN_PHI,
    UnsupportedObservable,
    apply,
    deviation_vector,
    lift,
    resolve_observable,
    trig_observable,
)
from .states import PeriodicState, SphereState, boundary_value, sphere_state

TOL_INEQUALITY = 1e-10
TOL_IDENTITY = 1e-8
TOL_GRAM = 1e-9
TOL_COMMUTATOR = 1e-6


def _cnum(z):
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


@dataclass
class RelationReport:
    relation: str
    lhs: float
    rhs: float
    slack: float
    satisfied: bool
    tolerance: float
    details: dict = field(default_factory=dict)

    def to_json(self):
        det = {}
        for key, val in self.details.items():
            if isinstance(val, complex):
                det[key] = _cnum(val)
            elif isinstance(val, (bool, str, int)):
                det[key] = val
            else:
                det[key] = float(val)
        return {
            "relation": self.relation,
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "slack": float(self.slack),
            "satisfied": bool(self.satisfied),
            "tolerance": float(self.tolerance),
            "details": det,
        }


def _inequality_report(name, lhs, rhs, tolerance, details):
    slack = lhs - rhs
    return RelationReport(
        relation=name,
        lhs=float(lhs),
        rhs=float(rhs),
        slack=float(slack),
        satisfied=bool(slack >= -tolerance),
        tolerance=tolerance,
        details=details,
    )


def identity_report(name, deviation, tolerance, details):
    """Equality checks: lhs 0, rhs |deviation|, satisfied iff within tolerance."""
    dev = abs(deviation)
    return RelationReport(
        relation=name,
        lhs=0.0,
        rhs=float(dev),
        slack=float(-dev),
        satisfied=bool(dev <= tolerance),
        tolerance=tolerance,
        details=details,
    )


@dataclass
class MismatchMatrix:
    entries: np.ndarray
    observables: list
    state: object

    @property
    def max_modulus(self):
        return float(np.max(np.abs(self.entries)))

    def to_json(self):
        return {
            "observables": [o.label for o in self.observables],
            "entries": [[_cnum(z) for z in row] for row in self.entries],
            "max_modulus": self.max_modulus,
        }


def adjointness_mismatch(obs_a, obs_b, state):
    """Delta_jk = (A_j psi, A_k psi) - (psi, A_j A_k psi) over the pair."""
    obs = [resolve_observable(obs_a), resolve_observable(obs_b)]
    psi = lift(state)
    acted = [apply(o, psi) for o in obs]
    entries = np.zeros((2, 2), dtype=complex)
    for j in range(2):
        for k in range(2):
            entries[j, k] = acted[j].inner(acted[k]) - psi.inner(apply(obs[j], acted[k]))
    return MismatchMatrix(entries=entries, observables=obs, state=state)


def csf(obs_a, obs_b, state, tolerance=TOL_INEQUALITY):
    """Delta_A Delta_B >= |(delta_A psi, delta_B psi)| for any pair."""
    psi = lift(state)
    da = deviation_vector(obs_a, psi)
    db = deviation_vector(obs_b, psi)
    cross = da.inner(db)
    std_a, std_b = da.norm(), db.norm()
    details = {
        "std_a": std_a,
        "std_b": std_b,
        "mean_a": da.mean,
        "mean_b": db.mean,
        "cross": complex(cross),
    }
    return _inequality_report("csf", std_a * std_b, abs(cross), tolerance, details)


def rsur(obs_a, obs_b, state, tolerance=TOL_IDENTITY, mismatch_threshold=TOL_IDENTITY):
    """Delta_A Delta_B >= |<[A, B]>| / 2, with its entitlement on record.

    An unsatisfied report is data, not an error; the mismatch norm in the
    details says whether the relation was entitled to hold.
    """
    psi = lift(state)
    da = deviation_vector(obs_a, psi)
    db = deviation_vector(obs_b, psi)
    std_a, std_b = da.norm(), db.norm()
    mm = adjointness_mismatch(obs_a, obs_b, psi)
    if mm.max_modulus < mismatch_threshold:
        # split of (delta_A psi, delta_B psi): the imaginary part carries
        # the commutator mean when the adjointness conditions hold
        rhs = abs(da.inner(db).imag)
        route = "deviation-split"
    else:
        a_b = psi.inner(apply(obs_a, apply(obs_b, psi)))
        b_a = psi.inner(apply(obs_b, apply(obs_a, psi)))
        rhs = 0.5 * abs(a_b - b_a)
        route = "direct"
    details = {
        "std_a": std_a,
        "std_b": std_b,
        "mismatch_max": mm.max_modulus,
        "mismatch_ab": complex(mm.entries[0, 1]),
        "commutator_route": route,
    }
    return _inequality_report("rsur", std_a * std_b, rhs, tolerance, details)


@dataclass
class DecompositionResult:
    symmetric: float
    antisymmetric: float
    residual: float
    applicable: bool
    mismatch_max: float


def covariance_decomposition(obs_a, obs_b, state, mismatch_threshold=TOL_IDENTITY):
    """Split (delta_A psi, delta_B psi) into real and imaginary parts.

    The real part is the symmetrized covariance, the imaginary part is
    -1/2 the mean of i[A, B]; the residual checks that reassembly.  The
    identity is only claimed when the adjointness mismatch is below the
    caller's threshold; outside that the result is flagged not applicable.
    """
    psi = lift(state)
    da = deviation_vector(obs_a, psi)
    db = deviation_vector(obs_b, psi)
    cross = da.inner(db)
    mm = adjointness_mismatch(obs_a, obs_b, psi)
    # <delta_A delta_B> and <delta_B delta_A> by straight composition
    dbpsi, dapsi = db.vector, da.vector
    dadb = psi.inner(apply(obs_a, dbpsi).plus(dbpsi.scaled(-da.mean)))
    dbda = psi.inner(apply(obs_b, dapsi).plus(dapsi.scaled(-db.mean)))
    sym_term = 0.5 * (dadb + dbda)
    icomm_term = 1j * (dadb - dbda)  # (psi, i[A, B] psi)
    assembled = sym_term - 0.5j * icomm_term
    residual = abs(cross - assembled)
    return DecompositionResult(
        symmetric=float(cross.real),
        antisymmetric=float(cross.imag),
        residual=float(residual),
        applicable=bool(mm.max_modulus < mismatch_threshold),
        mismatch_max=mm.max_modulus,
    )


def boundary_bound(state, tolerance=TOL_IDENTITY, squared_density=True):
    """Circle bound (hbar/2)|1 - 2 pi B| on both the deviation inner
    product and, through Cauchy-Schwarz, the Delta product."""
    if not isinstance(state, (PeriodicState,)):
        raise UnsupportedObservable("boundary_bound: circle states only")
    psi = lift(state)
    da = deviation_vector(LZ, psi)
    db = deviation_vector(PHI, psi)
    bval = boundary_value(state)
    density = abs(bval) ** 2 if squared_density else abs(bval)
    rhs = 0.5 * state.hbar * abs(1.0 - 2.0 * np.pi * density)
    cross = da.inner(db)
    lhs = abs(cross)
    product_lhs = da.norm() * db.norm()
    slack = lhs - rhs
    product_slack = product_lhs - rhs
    details = {
        "boundary_value": complex(bval),
        "boundary_density": float(density),
        "cross": complex(cross),
        "product_lhs": float(product_lhs),
        "product_slack": float(product_slack),
        "squared_density": bool(squared_density),
    }
    return RelationReport(
        relation="boundary",
        lhs=float(lhs),
        rhs=float(rhs),
        slack=float(slack),
        satisfied=bool(slack >= -tolerance and product_slack >= -tolerance),
        tolerance=tolerance,
        details=details,
    )


# -- adjusted (mimic) relations ----------------------------------------------


@dataclass(frozen=True)
class AdjustedRelation:
    """Caller-specified substitute relation.

    form "function-pair":  Delta_Lz * Delta_f >= hbar |<g>|
    form "quadratic":      (Delta_Lz)^2 + hbar^2 (Delta_u)^2 >= hbar^2 <v>^2
    form "ratio":          Delta_Lz * Delta_phi / a(Delta_phi) >= hbar |<b>|

    The trig presets pair f = sin phi with g = cos(phi)/2 (and the cosine
    mirror), which reproduces the commutator right-hand side
    (hbar/2)|<cos phi>|; no preset is shipped for the "ratio" form since
    its scaling functions are a free choice of the caller.
    """

    label: str
    form: str
    f: object = None
    g: object = None
    u: object = None
    v: object = None
    a: object = None
    b: object = None


EQ8_SIN = AdjustedRelation(
    "eq8-sin",
    "function-pair",
    f=SIN_PHI,
    g=trig_observable("HalfCosPhi", {1: 0.25, -1: 0.25}),
)
EQ8_COS = AdjustedRelation(
    "eq8-cos",
    "function-pair",
    f=COS_PHI,
    g=trig_observable("HalfSinPhi", {1: -0.25j, -1: 0.25j}),
)
EQ9_TRIG = AdjustedRelation("eq9-trig", "quadratic", u=SIN_PHI, v=COS_PHI)

ADJUSTED_PRESETS = {rel.label: rel for rel in (EQ8_SIN, EQ8_COS, EQ9_TRIG)}


def adjusted_relation(rel, state, tolerance=TOL_IDENTITY):
    if isinstance(rel, str):
        try:
            rel = ADJUSTED_PRESETS[rel]
        except KeyError:
            raise UnsupportedObservable(f"no adjusted-relation preset {rel!r}") from None
    psi = lift(state)
    hbar = psi.hbar
    if rel.form == "function-pair":
        lhs = operators.std_dev(LZ, psi) * operators.std_dev(rel.f, psi)
        rhs = hbar * abs(operators.mean(rel.g, psi))
        details = {"form": rel.form}
    elif rel.form == "quadratic":
        lhs = operators.std_dev(LZ, psi) ** 2 + hbar**2 * operators.std_dev(rel.u, psi) ** 2
        rhs = hbar**2 * operators.mean(rel.v, psi) ** 2
        details = {"form": rel.form}
    elif rel.form == "ratio":
        d_phi = operators.std_dev(PHI, psi)
        lhs = operators.std_dev(LZ, psi) * d_phi / rel.a(d_phi)
        rhs = hbar * abs(operators.mean(rel.b, psi))
        details = {"form": rel.form}
    else:
        raise UnsupportedObservable(f"unknown adjusted-relation form {rel.form!r}")
    return _inequality_report(rel.label, lhs, rhs, tolerance, details)


def gram_det(observables, state, tolerance=TOL_GRAM):
    """det[(delta_j psi, delta_k psi)] >= 0 and its minimum eigenvalue."""
    if len(observables) < 2:
        raise ValueError("gram_det: need at least two observables")
    psi = lift(state)
    devs = [deviation_vector(o, psi) for o in observables]
    r = len(devs)
    gram = np.zeros((r, r), dtype=complex)
    for j in range(r):
        for k in range(r):
            gram[j, k] = devs[j].inner(devs[k])
    det = np.linalg.det(gram)
    if abs(det.imag) > 1e-10 * max(1.0, abs(det.real)):
        raise ArithmeticError(f"gram_det: determinant imaginary residue {det.imag:.3e}")
    herm = 0.5 * (gram + gram.conj().T)
    min_eig = float(np.linalg.eigvalsh(herm)[0])
    details = {"min_eigenvalue": min_eig, "order": len(devs)}
    for j in range(r):
        for k in range(r):
            details[f"gram_{j}{k}"] = complex(gram[j, k])
    return _inequality_report("gram", float(det.real), 0.0, tolerance, details)


# -- sphere anomaly -----------------------------------------------------------


def sphere_mismatch(state):
    """Direct (Lz psi, phi psi) - (psi, Lz phi psi) for a sphere state."""
    mm = adjointness_mismatch(LZ, PHI, state)
    return complex(mm.entries[0, 1])


def sphere_anomaly(state):
    """First-principles mismatch next to the printed bracket expression.

    The bracket form i hbar {1 + 2 Im[sum c_m* c_r hbar m (Y_lm, phi Y_lr)]}
    carries an extra hbar inside the bracket; it is evaluated exactly as
    printed and reported alongside the direct value without asserting
    their equality.
    """
    if not isinstance(state, SphereState):
        raise UnsupportedObservable("sphere_anomaly: sphere states only")
    direct = sphere_mismatch(state)
    l, hbar = state.l, state.hbar
    c = np.zeros(2 * l + 1, dtype=complex)
    for m, v in state.coefficients.items():
        c[m + l] = v
    mvals = np.arange(-l, l + 1, dtype=float)
    phi1 = operators._theta_overlap(l) * operators._phi_power_block(1, l)
    bracket_sum = complex(c.conj() @ ((hbar * mvals)[:, None] * phi1) @ c)
    bracket = 1j * hbar * (1.0 + 2.0 * bracket_sum.imag)
    return {
        "direct_mismatch": direct,
        "bracket_formula": complex(bracket),
        "discrepancy": float(abs(direct - bracket)),
    }


def annul_sphere_mismatch(l=1, hbar=1.0, scan_points=2001, refine_steps=60):
    """Search the one-parameter family c = (s, sqrt(1 - 2 s^2), s) for the
    coefficient vector that annuls the direct mismatch (l = 1 layout; for
    larger l the same symmetric family is scanned over the outer modes)."""

    def candidate(s):
        middle = np.sqrt(max(1.0 - 2.0 * s * s, 0.0))
        return sphere_state(l, {-l: s, 0: middle, l: s}, hbar=hbar)

    s_hi = 1.0 / np.sqrt(2.0)
    grid = np.linspace(0.0, s_hi, scan_points)
    vals = [abs(sphere_mismatch(candidate(s))) for s in grid]
    best = int(np.argmin(vals))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, scan_points - 1)]
    for _ in range(refine_steps):
        third = (hi - lo) / 3.0
        s1, s2 = lo + third, hi - third
        if abs(sphere_mismatch(candidate(s1))) < abs(sphere_mismatch(candidate(s2))):
            hi = s2
        else:
            lo = s1
    s_best = 0.5 * (lo + hi)
    return candidate(s_best)
