import numpy as np
import pytest

from angulab import oracle
from angulab.operators import (
    COS_PHI,
    LZ,
    PHI,
    PHI2,
    SIN_PHI,
    UnsupportedObservable,
    apply,
    apply_lz,
    apply_phi,
    commutator_residual,
    deviation_vector,
    inner_product,
    lift,
    mean,
    phi2_matrix,
    phi_matrix,
    qtp_energy_mean,
    sphere_variances,
    std_dev,
    trig_observable,
)
from angulab.states import (
    oscillator_superposition,
    periodic_superposition,
    qtp_eigenstate,
    random_oscillator,
    random_periodic,
    random_sphere,
    scr_eigenstate,
    sphere_state,
)

PI = np.pi
ALL_OBS = (LZ, PHI, SIN_PHI, COS_PHI)


class TestPhiMatrices:
    def test_diagonals(self):
        m1 = phi_matrix(6)
        m2 = phi2_matrix(6)
        assert np.allclose(np.diag(m1), PI, atol=0)
        assert np.allclose(np.diag(m2), 4 * PI**2 / 3, atol=1e-14)

    def test_off_diagonal_entries(self):
        m1 = phi_matrix(3)
        # basis row/col order is m = -3..3, so (m=0, r=1) sits at [3, 4]
        assert m1[3, 4] == pytest.approx(-1j, abs=1e-14)
        assert m1[4, 3] == pytest.approx(1j, abs=1e-14)
        m2 = phi2_matrix(3)
        assert m2[3, 4] == pytest.approx(-2 * PI * 1j + 2.0, rel=1e-14)

    def test_exact_hermiticity(self):
        for mat in (phi_matrix(12), phi2_matrix(12)):
            assert np.array_equal(mat, mat.conj().T)

    def test_entries_match_quadrature(self):
        # (1 / 2 pi) integral(phi e^{i k phi}) cross-checked on the grid
        grid = oracle.circle_grid(32768)
        e0 = np.exp(0j * grid.points) / np.sqrt(2 * PI)
        e1 = np.exp(1j * grid.points) / np.sqrt(2 * PI)
        val = oracle.quad_inner(e0, grid.points * e1, grid)
        assert val == pytest.approx(-1j, abs=1e-8)
        diag = oracle.quad_inner(e1, grid.points * e1, grid)
        assert diag == pytest.approx(PI, abs=1e-8)


class TestApplyLz:
    def test_scr_eigenvector(self):
        s = scr_eigenstate(2)
        ket = lift(s)
        out = apply_lz(s)
        diff = out.plus(ket.scaled(-2.0))
        assert diff.norm() < 1e-14

    @pytest.mark.parametrize("m", range(-12, 13))
    def test_eigen_relation(self, m):
        s = scr_eigenstate(m, truncation=12)
        out = apply_lz(s)
        diff = out.plus(lift(s).scaled(-float(m)))
        assert diff.norm() < 1e-13

    def test_qtp_ground(self):
        q = qtp_eigenstate(0, inertia=2.0, frequency=2.0)
        out = apply_lz(q)
        lam = q.scale
        coeffs = out.coeffs
        assert abs(coeffs[1]) == pytest.approx(lam / np.sqrt(2), rel=1e-13)
        assert np.max(np.abs(np.delete(coeffs, 1))) < 1e-15

    def test_sphere_eigenvalue(self):
        s = sphere_state(1, {-1: 1.0})
        out = apply_lz(s)
        diff = out.plus(lift(s).scaled(1.0))  # eigenvalue -hbar
        assert diff.norm() < 1e-14


class TestApplyPhi:
    def test_qtp_ground(self):
        q = qtp_eigenstate(0)
        out = apply_phi(q)
        assert out.coeffs[1] == pytest.approx(1 / np.sqrt(2), rel=1e-13)

    def test_scr_mean(self):
        assert mean(PHI, scr_eigenstate(5)) == pytest.approx(PI, rel=1e-14)

    def test_qtp_mean(self):
        assert mean(PHI, qtp_eigenstate(0)) == pytest.approx(0.0, abs=1e-14)


class TestInnerProductAndMean:
    def test_conjugate_linear_first_slot(self):
        s = periodic_superposition({0: 1, 1: 1j})
        ket = lift(s)
        a = ket.scaled(1j).inner(ket)
        b = ket.inner(ket)
        assert a == pytest.approx(-1j * b, abs=1e-14)

    def test_non_hermitian_rejected(self):
        lop = trig_observable("raise", {1: 1.0})
        assert not lop.hermitian
        with pytest.raises(UnsupportedObservable):
            mean(lop, scr_eigenstate(0))

    def test_deviation_orthogonality(self):
        rng = np.random.default_rng(17)
        families = [random_periodic(rng), random_oscillator(rng), random_sphere(rng, 2)]
        for state in families:
            ket = lift(state)
            for obs in ALL_OBS:
                dv = deviation_vector(obs, state)
                assert abs(ket.inner(dv.vector)) < 1e-10

    def test_inner_product_of_states(self):
        a = scr_eigenstate(1)
        b = scr_eigenstate(2)
        assert inner_product(a, b) == pytest.approx(0.0, abs=1e-15)
        assert inner_product(a, a) == pytest.approx(1.0, abs=1e-15)


class TestStdDev:
    def test_scr_moments(self):
        for m in (-3, 0, 4):
            s = scr_eigenstate(m)
            assert std_dev(LZ, s) == 0.0
            assert std_dev(PHI, s) == pytest.approx(PI / np.sqrt(3), abs=1e-13)

    @pytest.mark.parametrize("n", range(21))
    def test_qtp_closed_forms(self, n):
        q = qtp_eigenstate(n, inertia=2.0, frequency=0.5, hbar=1.0)
        want_lz = np.sqrt(1.0 * 2.0 * 0.5 * (n + 0.5))
        want_phi = np.sqrt(1.0 * (n + 0.5) / (2.0 * 0.5))
        assert std_dev(LZ, q) == pytest.approx(want_lz, abs=1e-10)
        assert std_dev(PHI, q) == pytest.approx(want_phi, abs=1e-10)

    def test_hbar_scaling(self):
        s = scr_eigenstate(2, hbar=3.7)
        assert std_dev(LZ, s) == 0.0
        q = qtp_eigenstate(1, hbar=0.5)
        assert std_dev(LZ, q) == pytest.approx(np.sqrt(0.5 * 1.5), rel=1e-12)


class TestSphereVariances:
    def test_single_m(self):
        v = sphere_variances(sphere_state(2, {1: 1.0}))
        assert v["var_Lz"] == 0.0
        assert v["var_phi"] == pytest.approx(PI**2 / 3, abs=1e-12)

    def test_hand_sum(self):
        v = sphere_variances(sphere_state(1, {-1: 1 / np.sqrt(2), 1: 1 / np.sqrt(2)}))
        assert v["var_Lz"] == pytest.approx(1.0, abs=1e-12)

    def test_matches_generic_path(self):
        rng = np.random.default_rng(9)
        for l in (1, 2, 3):
            for _ in range(10):
                s = random_sphere(rng, l)
                v = sphere_variances(s)
                assert v["var_Lz"] == pytest.approx(std_dev(LZ, s) ** 2, abs=1e-10)
                assert v["var_phi"] == pytest.approx(std_dev(PHI, s) ** 2, abs=1e-10)


class TestSpectralVsOracle:
    @pytest.mark.parametrize("family", ["periodic", "oscillator", "sphere"])
    def test_randomized_moments(self, family):
        seeds = {"periodic": 101, "oscillator": 202, "sphere": 303}
        rng = np.random.default_rng(seeds[family])
        count = 200
        for i in range(count):
            if family == "periodic":
                state = random_periodic(rng)
                grid = oracle.circle_grid(16384)
            elif family == "oscillator":
                state = random_oscillator(rng)
                grid = oracle.line_grid_for(state)
            else:
                state = random_sphere(rng, 1 + i % 3)
                grid = oracle.sphere_grid(n_phi=2048)
            table = oracle.moment_table(state, ("Lz", "Phi", "SinPhi", "CosPhi"), grid)
            for obs in ALL_OBS:
                mu, sd = table[obs.tag]
                scale = max(1.0, abs(mu))
                assert abs(mean(obs, state) - mu) < 2e-6 * scale
                assert abs(std_dev(obs, state) - sd) < 2e-6 * max(1.0, sd)


class TestCommutatorResidual:
    def test_scr(self):
        assert commutator_residual(scr_eigenstate(1), 512) < 1e-6

    def test_qtp(self):
        assert commutator_residual(qtp_eigenstate(0), 1024) < 1e-6

    def test_hbar_linearity(self):
        s1 = periodic_superposition({0: 1, 2: 1j}, hbar=1.0)
        s2 = periodic_superposition({0: 1, 2: 1j}, hbar=2.0)
        r1 = commutator_residual(s1, 512)
        r2 = commutator_residual(s2, 512)
        assert r2 == pytest.approx(2 * r1, rel=1e-9)

    def test_family_guard(self):
        with pytest.raises(TypeError):
            commutator_residual(sphere_state(1, {0: 1}))


class TestEnergy:
    def test_ground(self):
        assert qtp_energy_mean(qtp_eigenstate(0)) == pytest.approx(0.5, abs=1e-12)

    def test_excited_frequency(self):
        q = qtp_eigenstate(3, frequency=2.0)
        assert qtp_energy_mean(q) == pytest.approx(7.0, abs=1e-10)

    def test_superposition_average(self):
        q = oscillator_superposition({0: 1, 1: 1})
        assert qtp_energy_mean(q) == pytest.approx(1.0, abs=1e-12)

    def test_hamiltonian_family_guard(self):
        with pytest.raises(UnsupportedObservable):
            apply("Hamiltonian", scr_eigenstate(0))

    def test_phi2_consistency(self):
        # <phi^2> through the squared operator equals variance + mean^2
        rng = np.random.default_rng(2)
        s = random_periodic(rng)
        m2 = mean(PHI2, s)
        assert m2 == pytest.approx(std_dev(PHI, s) ** 2 + mean(PHI, s) ** 2, abs=1e-10)
