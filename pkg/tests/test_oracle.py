import numpy as np
import pytest

from angulab import oracle
from angulab.oracle import (
    Grid1D,
    circle_grid,
    line_grid,
    line_grid_for,
    numeric_derivative,
    quad_inner,
    sample,
    sphere_grid,
)
from angulab.states import (
    qtp_eigenstate,
    random_periodic,
    scr_eigenstate,
    sphere_state,
)

PI = np.pi
TWO_PI = 2 * np.pi


class TestGrids:
    def test_circle_grid_half_open(self):
        g = circle_grid(512)
        assert g.points[0] > 0.0
        assert g.points[-1] < TWO_PI
        assert np.all(np.diff(g.points) > 0)
        assert g.spacing * len(g.points) == pytest.approx(TWO_PI, rel=1e-14)

    def test_sphere_grid_measure(self):
        g = sphere_grid(64, 512)
        assert oracle.total_weight(g) == pytest.approx(4 * PI, abs=1e-10)

    def test_line_grid_for_scales(self):
        q = qtp_eigenstate(1)
        g = line_grid_for(q)
        assert g.points[0] == pytest.approx(-12.0)
        q2 = qtp_eigenstate(1, inertia=4.0)  # lam = 2
        g2 = line_grid_for(q2)
        assert g2.points[-1] == pytest.approx(6.0)


class TestQuadInner:
    def test_normalization(self):
        g = circle_grid(512)
        psi = sample(scr_eigenstate(0), g)
        assert quad_inner(psi, psi, g) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonality(self):
        g = circle_grid(512)
        p1 = sample(scr_eigenstate(1), g)
        p2 = sample(scr_eigenstate(2), g)
        assert abs(quad_inner(p1, p2, g)) < 1e-10

    def test_phi_moment(self):
        g = circle_grid()
        e0 = sample(scr_eigenstate(0), g)
        assert quad_inner(e0, g.points * e0, g) == pytest.approx(PI, abs=1e-8)

    def test_length_mismatch(self):
        g = circle_grid(512)
        with pytest.raises(ValueError):
            quad_inner(np.ones(3), np.ones(3), g)


class TestNumericDerivative:
    def test_plane_wave(self):
        g = circle_grid(1024)
        f = np.exp(1j * g.points)
        df = numeric_derivative(f, g)
        err = np.abs(df[2:-2] - 1j * f[2:-2])
        assert np.max(err) < 1e-7

    def test_constant(self):
        g = circle_grid(64)
        df = numeric_derivative(np.ones(64, dtype=complex), g)
        assert np.max(np.abs(df)) < 1e-12

    def test_sawtooth_no_boundary_spike(self):
        # phi itself: one-sided stencils keep the ends exact, no wrap
        g = circle_grid(1024)
        df = numeric_derivative(g.points.astype(complex), g)
        assert np.max(np.abs(df - 1.0)) < 1e-7

    def test_too_short(self):
        with pytest.raises(ValueError):
            numeric_derivative(np.ones(4), Grid1D(np.arange(4.0), 1.0, "line"))

    def test_fourth_order_convergence(self):
        errs = []
        for n in (256, 512, 1024):
            g = circle_grid(n)
            f = np.exp(2j * g.points)
            df = numeric_derivative(f, g)
            errs.append(np.max(np.abs(df[2:-2] - 2j * f[2:-2])))
        assert errs[0] / errs[1] > 12  # h^4 scaling gives 16
        assert errs[1] / errs[2] > 12


class TestGridRefinement:
    def test_variance_error_quarters_until_small(self):
        # midpoint-rule error on the angle variance scales like h^2
        target = PI / np.sqrt(3)
        s = scr_eigenstate(2)
        prev = None
        reached = False
        n = 256
        while n <= 65536:
            table = oracle.moment_table(s, ("Phi",), circle_grid(n))
            err = abs(table["Phi"][1] - target)
            if err <= 1e-9:
                reached = True
                break
            if prev is not None:
                assert prev / err >= 3.8
            prev = err
            n *= 2
        assert reached

    def test_line_truncation_tail(self):
        # tail mass beyond |phi| = 12 for n <= 10 is Gaussian-small
        for n in (0, 5, 10):
            q = qtp_eigenstate(n)
            g = line_grid(20.0, 8192)
            psi = sample(q, g)
            outside = np.abs(g.points) > 12.0
            tail = g.spacing * np.sum(np.abs(psi[outside]) ** 2)
            assert tail < 1e-12


class TestOracleReports:
    def test_scr_moments(self):
        table = oracle.moment_table(scr_eigenstate(2), ("Lz", "Phi"))
        assert abs(table["Lz"][1]) < 1e-7
        assert table["Phi"][1] == pytest.approx(PI / np.sqrt(3), abs=1e-6)

    def test_qtp_moments(self):
        q = qtp_eigenstate(1)
        table = oracle.moment_table(q, ("Lz", "Phi"), line_grid(12.0, 4096))
        assert table["Lz"][1] == pytest.approx(np.sqrt(1.5), abs=1e-6)
        assert table["Phi"][1] == pytest.approx(np.sqrt(1.5), abs=1e-6)

    def test_scr_condition19(self):
        mm = oracle.mismatch_entries(scr_eigenstate(0, hbar=1.0), "Lz", "Phi")
        assert mm[0, 1] == pytest.approx(1j, abs=1e-6)

    def test_descriptor_api(self):
        rep = oracle.oracle_report(
            {"family": "scr", "params": {"m": 2}, "relation": "moments"}
        )
        assert rep["std_Phi"] == pytest.approx(PI / np.sqrt(3), abs=1e-6)
        rep = oracle.oracle_report(
            {"family": "qtp", "params": {"n": 1}, "relation": "rsur"}
        )
        assert rep["lhs"] == pytest.approx(1.5, abs=1e-5)
        with pytest.raises(ValueError):
            oracle.oracle_report({"family": "scr", "params": {}, "relation": "nope"})

    def test_boundary_sides_match_spectral(self):
        from angulab.relations import boundary_bound

        rng = np.random.default_rng(44)
        for _ in range(5):
            s = random_periodic(rng)
            o = oracle.boundary_sides(s)
            r = boundary_bound(s)
            assert o["lhs"] == pytest.approx(r.lhs, abs=2e-6)
            assert o["rhs"] == pytest.approx(r.rhs, abs=2e-6)

    def test_sphere_csf_sides(self):
        from angulab.relations import csf
        from angulab.operators import LZ, PHI

        s = sphere_state(2, {-1: 1, 2: 1j})
        o = oracle.csf_sides(s, "Lz", "Phi")
        r = csf(LZ, PHI, s)
        assert o["lhs"] == pytest.approx(r.lhs, abs=2e-6)
        assert o["rhs"] == pytest.approx(r.rhs, abs=2e-6)
