"""Time-dependent integrals and finite symmetry transformations."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from galconf.coadjoint import rotation_matrix
from galconf.dynamics import FREE, integrate, verify_motion_order
from galconf.errors import NonOrthogonalRotation, SingularTime, UnsupportedClosedForm
from galconf.poisson import PhasePoint, generators_at, random_point
from galconf.symmetry import (
    ConformalMap,
    GalileiMap,
    GalileiParams,
    conformal_time,
    conformal_transform,
    galilei_transform,
    integrals_of_motion,
    map_trajectory,
    schrodinger_integrals,
)


def schrodinger_point(x, p, m=1.0, s=(0, 0, 0), chi=(0, 0, 0)):
    return PhasePoint(q=[list(x)], p=[list(p)], s=list(s), chi=list(chi), m=m)


class TestIntegralsOfMotion:
    def test_uniform_motion_example(self):
        # x(t) = t e1, p = e1, m = 1: the shifted d and k integrals vanish
        for t in (0.0, 0.4, 1.7):
            pt = schrodinger_point([t, 0, 0], [1, 0, 0])
            vals = schrodinger_integrals(pt, t)
            assert vals["d_shifted"] == pytest.approx(0.0, abs=1e-14)
            assert vals["k_shifted"] == pytest.approx(0.0, abs=1e-14)
            assert vals["h"] == pytest.approx(0.5)

    def test_reduces_to_generators_at_time_zero(self):
        pt = random_point(np.random.default_rng(0), 3, 3)
        vals = integrals_of_motion(pt, 0.0)
        g = generators_at(pt)
        for key in ("h", "d", "k"):
            assert vals[key] == pytest.approx(g[key], abs=1e-14)
        assert np.allclose(vals["j"], g["j"])

    @pytest.mark.parametrize("N,dim", [(1, 3), (3, 3), (2, 2)])
    def test_constant_along_rk4_flow(self, N, dim):
        pt = random_point(np.random.default_rng(N), N, dim)
        tr = integrate(pt, FREE, 1.0, 1e-3, "rk4", record=False)
        base = integrals_of_motion(tr.states[0], 0.0)
        for i in range(0, len(tr.times), 111):
            cur = integrals_of_motion(tr.states[i], float(tr.times[i]))
            for key in base:
                drift = np.max(np.abs(np.asarray(cur[key]) - np.asarray(base[key])))
                assert drift < 1e-8, (key, drift)

    def test_printed_forms_match_pullback(self):
        pt = random_point(np.random.default_rng(5), 1, 3, m=1.7)
        tr = integrate(pt, FREE, 1.0, 0.01, "closed", record=False)
        for i in (0, 41, 100):
            st_, t = tr.states[i], float(tr.times[i])
            printed = schrodinger_integrals(st_, t)
            pulled = integrals_of_motion(st_, t)
            assert printed["h"] == pytest.approx(pulled["h"], abs=1e-11)
            assert printed["d_shifted"] == pytest.approx(pulled["d"], abs=1e-11)
            assert printed["k_shifted"] == pytest.approx(pulled["k"], abs=1e-11)
            xi = np.array([pulled["c0_1"], pulled["c0_2"], pulled["c0_3"]])
            zeta = np.array([pulled["c1_1"], pulled["c1_2"], pulled["c1_3"]])
            assert np.allclose(printed["p"], xi, atol=1e-11)
            assert np.allclose(printed["x_boost"], zeta / st_.m, atol=1e-11)

    def test_printed_forms_need_schrodinger_case(self):
        with pytest.raises(UnsupportedClosedForm):
            schrodinger_integrals(random_point(np.random.default_rng(1), 3, 3), 0.0)


class TestConformalTime:
    def test_printed_value(self):
        assert conformal_time(1.0, 1.0) == 0.5

    def test_identity_at_zero_parameter(self):
        assert conformal_time(2.7, 0.0) == 2.7

    def test_pole(self):
        with pytest.raises(SingularTime):
            conformal_time(1.0, -1.0)

    @settings(max_examples=50, deadline=None)
    @given(t=st.floats(-0.3, 0.3), c1=st.floats(-0.3, 0.3), c2=st.floats(-0.3, 0.3))
    def test_group_law(self, t, c1, c2):
        lhs = conformal_time(conformal_time(t, c1), c2)
        assert lhs == pytest.approx(conformal_time(t, c1 + c2), abs=1e-12)


class TestConformalTransform:
    def test_rest_particle(self):
        # x(t) = e1 at rest, m=1, c=1: x'(t') = (1-t') e1 with p' = -e1
        for t in (0.0, 0.5, 2.0):
            x, p, tp = conformal_transform([1, 0, 0], [0, 0, 0], t, 1.0, 1.0)
            assert np.allclose(x, [(1 - tp), 0, 0]) or t == 0.0
            assert np.allclose(p, [-1.0, 0, 0])
            assert tp == pytest.approx(t / (1 + t))

    def test_identity(self):
        x, p, tp = conformal_transform([0.2, 0.1, 0.0], [1.0, 0, 0], 0.7, 0.0, 2.0)
        assert np.allclose(x, [0.2, 0.1, 0.0]) and np.allclose(p, [1.0, 0, 0])
        assert tp == 0.7

    def test_singular(self):
        with pytest.raises(SingularTime):
            conformal_transform([1, 0, 0], [0, 0, 0], 1.0, -1.0, 1.0)

    def test_generator_values_follow_the_column(self):
        """Active map at t=0 against the conformal coadjoint column with u=-c."""
        rng = np.random.default_rng(3)
        for _ in range(25):
            m = float(rng.uniform(0.5, 2.0))
            x0 = rng.uniform(-1, 1, 3)
            p0 = rng.uniform(-1, 1, 3)
            c = float(rng.uniform(-0.8, 0.8))
            g = generators_at(schrodinger_point(x0, p0, m=m))
            x1, p1, _ = conformal_transform(x0, p0, 0.0, c, m)
            g2 = generators_at(schrodinger_point(x1, p1, m=m))
            u = -c
            assert g2["h"] == pytest.approx(g["h"] + 2 * u * g["d"] + u * u * g["k"],
                                            abs=1e-12)
            assert g2["d"] == pytest.approx(g["d"] + u * g["k"], abs=1e-12)
            assert g2["k"] == pytest.approx(g["k"], abs=1e-12)


class TestGalileiTransform:
    def test_boost_of_rest_state(self):
        m = 2.0
        params = GalileiParams(v=(1.0, 0.0, 0.0))
        for t in (0.0, 0.5, 1.0):
            x, p, tp = galilei_transform([0, 0, 0], [0, 0, 0], t, params, m)
            assert np.allclose(x, [t, 0, 0])
            assert np.allclose(p, [2.0, 0, 0])
            assert tp == t

    def test_identity(self):
        x, p, tp = galilei_transform([0.3, 0, 0], [0, 1, 0], 0.4, GalileiParams(), 1.0)
        assert np.allclose(x, [0.3, 0, 0]) and np.allclose(p, [0, 1, 0]) and tp == 0.4

    def test_rotation(self):
        R = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        x, p, _ = galilei_transform([0, 0, 0], [1, 0, 0], 0.0,
                                    GalileiParams(R=R), 1.0)
        assert np.allclose(p, [0, 1, 0])

    def test_rejects_non_orthogonal_rotation(self):
        with pytest.raises(NonOrthogonalRotation):
            galilei_transform([0, 0, 0], [0, 0, 0], 0.0,
                              GalileiParams(R=np.eye(3) * 2.0), 1.0)


class TestMapTrajectory:
    def make_free(self, seed=11, m=1.5):
        pt = random_point(np.random.default_rng(seed), 1, 3, m=m)
        pt.chi[:] = 0.0
        return integrate(pt, FREE, 1.0, 1e-3, "rk4", record=False), m

    def test_identity_map(self):
        tr, m = self.make_free()
        tr2 = map_trajectory(tr, GalileiMap(GalileiParams(), m))
        assert np.allclose(tr2.times, tr.times)
        for a, b in zip(tr.states[::100], tr2.states[::100]):
            assert np.max(np.abs(a.q - b.q)) < 1e-12
            assert np.max(np.abs(a.p - b.p)) < 1e-12

    @pytest.mark.parametrize("c", [0.5, -0.5, 1.0])
    def test_conformal_maps_solutions_to_solutions(self, c):
        tr, m = self.make_free()
        tr2 = map_trajectory(tr, ConformalMap(c, m))
        res, _ = verify_motion_order(tr2)
        assert res < 1e-7
        p0 = np.array([st.p[0] for st in tr2.states])
        assert np.max(np.abs(p0 - p0[0])) < 1e-7
        h = tr2.recorded["h"]
        assert np.max(np.abs(h - h[0])) < 1e-7

    def test_galilei_maps_solutions_to_solutions(self):
        tr, m = self.make_free(seed=13)
        params = GalileiParams(a=(0.5, -0.2, 0.1), v=(0.3, 0.0, -0.4), tau=0.25,
                               R=rotation_matrix([0.2, 0.5, -0.3]))
        tr2 = map_trajectory(tr, GalileiMap(params, m))
        res, _ = verify_motion_order(tr2)
        assert res < 1e-7

    def test_singular_range_rejected(self):
        tr, m = self.make_free()
        with pytest.raises(SingularTime):
            map_trajectory(tr, ConformalMap(-1.5, m))  # pole at t = 2/3

    def test_only_schrodinger_case(self):
        pt = random_point(np.random.default_rng(14), 3, 3)
        tr = integrate(pt, FREE, 0.5, 0.01, record=False)
        with pytest.raises(UnsupportedClosedForm):
            map_trajectory(tr, ConformalMap(0.1, 1.0))
