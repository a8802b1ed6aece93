import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdcr_sim.controllers import (BacksteppingGains, PlantTerms, SmcGains, backstepping_control, clamp_and_convert,
                                  lyapunov_values, plant_terms, smc_control, tendon_displacements)
from tdcr_sim.dynamics import RodModel, bdf_coeffs, propagate
from tdcr_sim.errors import InvalidArgumentError, UncontrollableConfigurationError
from tdcr_sim.rod import default_paper_rod
from tdcr_sim.scenarios import ReferenceTrajectory
from tdcr_sim.shooting import RodSimulator

SMC = SmcGains()
BS = BacksteppingGains()
num = st.floats(-10.0, 10.0)


def z_dynamics(plant, ref, U, gains):
    """Closed-loop error derivatives from the double-integrator tip model."""
    x_d, xd_d, xdd_d = ref
    z1 = x_d - plant.X1
    z2 = plant.X2 - xd_d - gains.alpha1 * z1
    z1_dot = xd_d - plant.X2
    z2_dot = plant.a_c + plant.b_c * U - xdd_d - gains.alpha1 * z1_dot
    return z1, z2, z1_dot, z2_dot


class TestSmc:
    def test_on_target(self):
        assert smc_control(PlantTerms(0.0, 1.0, 0.3, 0.0), (0.3, 0.0, 0.0), SmcGains(eps=0.0)) == 0.0

    def test_hand_value(self):
        # S = 2100 * 0.01 = 21; U = 0.005 + 12 * 21
        U = smc_control(PlantTerms(0.0, 1.0, 0.0, 0.0), (0.01, 0.0, 0.0), SMC)
        assert U == pytest.approx(252.005, rel=1e-12)

    def test_odd_in_error(self):
        p = PlantTerms(0.0, 1.0, 0.0, 0.0)
        assert smc_control(p, (-0.01, 0, 0), SMC) == pytest.approx(-smc_control(p, (0.01, 0, 0), SMC))

    @given(num, num, num, num, num, st.floats(0.1, 100.0))
    def test_reaching_law(self, x1, x2, xd, xdd, a, b):
        # under the law, S' = -eps sgn(S) - k S with S = e' + c e
        plant = PlantTerms(a, b, x1, x2)
        ref = (xd, 0.3, xdd)
        U = smc_control(plant, ref, SMC)
        e, e_dot = xd - x1, 0.3 - x2
        S = e_dot + SMC.c * e
        S_dot = (xdd - (a + b * U)) + SMC.c * e_dot
        expect = -SMC.eps * np.sign(S) - SMC.k * S
        assert S_dot == pytest.approx(expect, rel=1e-9, abs=1e-9 * max(1.0, abs(SMC.c * e_dot)))

    def test_gain_validation(self):
        with pytest.raises(InvalidArgumentError):
            SmcGains(c=0.0)
        with pytest.raises(InvalidArgumentError):
            BacksteppingGains(alpha2=-1.0)


class TestBackstepping:
    def test_on_target(self):
        assert backstepping_control(PlantTerms(0.0, 1.0, 0.2, 0.0), (0.2, 0.0, 0.0), BS) == 0.0

    def test_hand_value(self):
        # z1 = 0.001, X2 = xd_dot so z2 = -1.5; U = (1 + a1 a2) z1 + (a1 + a2) * 0
        U = backstepping_control(PlantTerms(0.0, 1.0, 0.0, 0.0), (0.001, 0.0, 0.0), BS)
        assert U == pytest.approx(0.001 + 2250 - 2250 + 18.75, rel=1e-12)
        assert U == pytest.approx(18.751, rel=1e-12)

    def test_linear_in_z1(self):
        p = PlantTerms(0.0, 1.0, 0.0, 0.0)
        assert backstepping_control(p, (0.002, 0, 0), BS) == pytest.approx(2 * backstepping_control(p, (0.001, 0, 0), BS))

    @settings(max_examples=200)
    @given(num, num, num, num, num, num, st.floats(0.01, 100.0).map(lambda b: b), st.booleans())
    def test_lyapunov_derivative_identity(self, x1, x2, xd, xd_dot, xdd, a, b, neg):
        plant = PlantTerms(a, -b if neg else b, x1, x2)
        ref = (xd, xd_dot, xdd)
        U = backstepping_control(plant, ref, BS)
        z1, z2, z1_dot, z2_dot = z_dynamics(plant, ref, U, BS)
        V_dot = z1 * z1_dot + z2 * z2_dot
        expect = -BS.alpha1 * z1**2 - BS.alpha2 * z2**2
        scale = max(abs(expect), abs(z2 * BS.alpha1 * z1_dot), abs(z2 * plant.b_c * U), 1e-300)
        assert abs(V_dot - expect) <= 1e-9 * scale


class TestLyapunov:
    def test_on_target(self):
        vals = lyapunov_values(PlantTerms(0, 1, 0.1, 0.5), (0.1, 0.5, 0.0))
        assert vals == {"backstepping": 0.0, "smc": 0.0}

    def test_definition(self):
        # z1 = 0.01 and X2 chosen so that z2 = 0
        vals = lyapunov_values(PlantTerms(0, 1, 0.0, 0.0 + BS.alpha1 * 0.01), (0.01, 0.0, 0.0))
        assert vals["backstepping"] == pytest.approx(5e-5, rel=1e-12)


class TestPlantTerms:
    def test_rest_state(self, weightless_model):
        step = propagate(weightless_model, np.zeros(3), np.zeros(3), np.zeros(4))
        plant = plant_terms(step, weightless_model, b_min=None)
        assert plant.X1 == 0.0 and plant.X2 == 0.0 and plant.b_c == 0.0
        with pytest.raises(UncontrollableConfigurationError):
            plant_terms(step, weightless_model)

    def test_input_sign_on_straight_rod(self, weightless_model):
        sim = RodSimulator(weightless_model, bdf_coeffs(0.01))
        sim.initialize(np.zeros(4))
        step, _ = sim.dynamic_step([0.5, 0, 0, 0])
        assert plant_terms(step, weightless_model).b_c > 0

    def test_finite_difference_consistency(self):
        # (X2(t+dt) - X2(t)) / dt against a_c + b_c U evaluated at the new state
        params, layout = default_paper_rod(nodes=40)
        model = RodModel(params, layout)
        sim = RodSimulator(model, bdf_coeffs(0.01))
        step, _ = sim.initialize(np.zeros(4))
        traj = ReferenceTrajectory()
        rel = []
        for k in range(70):
            prev = plant_terms(step, model)
            T = clamp_and_convert(backstepping_control(prev, traj(sim.t), BS), step, layout, params.length).tensions
            step, _ = sim.dynamic_step(T)
            new = plant_terms(step, model)
            fd = (new.X2 - prev.X2) / 0.01
            if k >= 40:
                rel.append(abs(fd - (new.a_c + new.b_c * T[0])) / abs(fd))
        assert np.median(rel) < 0.10


class TestClampConvert:
    def test_straight_rod_zero_displacement(self, weightless_model):
        step = propagate(weightless_model, np.zeros(3), np.zeros(3), np.zeros(4))
        d = tendon_displacements(step, weightless_model.layout, 0.5)
        np.testing.assert_allclose(d, 0.0, atol=1e-15)

    @pytest.mark.parametrize("U,T,clamped", [(-3.0, 0.0, True), (60.0, 50.0, True), (12.5, 12.5, False)])
    def test_clamp(self, weightless_model, U, T, clamped):
        step = propagate(weightless_model, np.zeros(3), np.zeros(3), np.zeros(4))
        cmd = clamp_and_convert(U, step, weightless_model.layout, 0.5)
        np.testing.assert_array_equal(cmd.tensions, [T, 0, 0, 0])
        assert cmd.clamped is clamped and cmd.raw == U

    def test_bend_shortens_inner_tendon(self, weightless_model):
        from tdcr_sim.shooting import solve
        _, step, _ = solve(weightless_model, np.zeros(6), [10.0, 0, 0, 0])
        d = tendon_displacements(step, weightless_model.layout, 0.5)
        # constant curvature: tendon i shortens by kappa * (r_i . x_hat) * L (plus axial strain)
        kappa = np.mean(step.u[:, 1])
        assert d[0] == pytest.approx(kappa * 0.02 * 0.5, rel=0.02)
        assert d[2] == pytest.approx(-kappa * 0.02 * 0.5, rel=0.02)
