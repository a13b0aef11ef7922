"""Dynamics tests: velocity evaluation, stepping, conservation, simulate."""

import math

import numpy as np
import pytest

from cylvort.dynamics import (
    ProbeSpec,
    SimConfig,
    _step_plan,
    self_induced_velocities,
    simulate,
    step,
    sup_u1_profile,
    velocity_at,
)
from cylvort.ensemble import (
    VorticityEnsemble,
    horizontal_center,
    regularized_energy,
    total_mass,
)
from cylvort.errors import SimulationAbort, SingularityError
from cylvort.kernels import CylinderPoint, Displacement, regularized_kernel


def make(xs, ys, gammas, delta, nonneg=False):
    xs = np.asarray(xs, dtype=float)
    return VorticityEnsemble(
        xs,
        np.asarray(ys, dtype=float),
        np.asarray(gammas, dtype=float),
        np.full_like(xs, delta),
        nonneg_mode=nonneg,
    )


def pair(a=0.5):
    return make([a, -a], [0.0, 0.0], [1.0, 1.0], 0.0)


def random_cloud(rng, n=30, delta=0.1):
    return make(
        rng.uniform(-1, 1, n),
        rng.uniform(0, 2 * math.pi, n),
        rng.uniform(0.1, 1.0, n) / n,
        delta,
        nonneg=True,
    )


class TestVelocityAt:
    def test_pair_frozen_value(self):
        # source at (-0.5, 0) seen from (0.5, 0): k2 = coth(1/2)/2
        v = velocity_at(pair(), CylinderPoint(0.5, 0.0), exclude=0)
        assert v.u1 == pytest.approx(0.0, abs=1e-15)
        assert v.u2 == pytest.approx(1.0819767068693265, rel=1e-13)

    def test_matches_scalar_kernel_sum(self):
        # dual route: vectorized pairwise vs explicit per-blob kernel calls
        rng = np.random.default_rng(2)
        ens = random_cloud(rng, n=17)
        for xt, yt in [(0.3, 1.0), (-2.0, 5.5), (4.0, 0.0)]:
            z = CylinderPoint(xt, yt)
            v = velocity_at(ens, z)
            u1 = u2 = 0.0
            for xi, yi, gi, di in zip(ens.x, ens.y, ens.circulation, ens.core_radius):
                k = regularized_kernel(Displacement(z.x - xi, z.y - yi), di)
                u1 += gi * k.u1
                u2 += gi * k.u2
            assert v.u1 == pytest.approx(u1, rel=1e-12, abs=1e-15)
            assert v.u2 == pytest.approx(u2, rel=1e-12, abs=1e-15)

    def test_exclude_out_of_range(self):
        with pytest.raises(IndexError):
            velocity_at(pair(), CylinderPoint(0, 0), exclude=5)

    def test_singular_probe_raises(self):
        with pytest.raises(SingularityError):
            velocity_at(pair(), CylinderPoint(0.5, 0.0))

    def test_same_y_gives_vertical_velocity(self):
        ens = make([1.0, -1.0, 0.3], [2.0, 2.0, 2.0], [1.0, 0.5, 2.0], 0.1)
        v = velocity_at(ens, CylinderPoint(5.0, 2.0))
        assert v.u1 == pytest.approx(0.0, abs=1e-15)


class TestSelfInduced:
    def test_pair_antisymmetric(self):
        vs = self_induced_velocities(pair())
        assert vs[0].u1 == pytest.approx(-vs[1].u1, abs=1e-15)
        assert vs[0].u2 == pytest.approx(-vs[1].u2, abs=1e-15)
        assert vs[0].u2 == pytest.approx(1.0819767068693265, rel=1e-13)

    def test_single_blob_is_still(self):
        ens = make([0.7], [1.0], [3.0], 0.1)
        (v,) = self_induced_velocities(ens)
        assert (v.u1, v.u2) == (0.0, 0.0)

    def test_zero_circulations_zero_velocity(self):
        ens = make([0.0, 1.0], [0.0, 3.0], [0.0, 0.0], 0.1)
        for v in self_induced_velocities(ens):
            assert (v.u1, v.u2) == (0.0, 0.0)

    def test_deterministic_bitwise(self):
        rng = np.random.default_rng(8)
        ens = random_cloud(rng)
        a = self_induced_velocities(ens)
        b = self_induced_velocities(ens)
        assert all(p == q for p, q in zip(a, b))


class TestStep:
    def test_zero_circulation_fixed_point(self):
        ens = make([0.5, -0.2], [1.0, 2.0], [0.0, 0.0], 0.1)
        out = step(ens, 0.1)
        np.testing.assert_array_equal(out.x, ens.x)
        np.testing.assert_array_equal(out.y, ens.y)

    def test_circulations_and_radii_untouched(self):
        rng = np.random.default_rng(4)
        ens = random_cloud(rng)
        out = step(ens, 0.05)
        np.testing.assert_array_equal(out.circulation, ens.circulation)
        np.testing.assert_array_equal(out.core_radius, ens.core_radius)

    def test_y_wrapped_after_step(self):
        ens = make([0.5, -0.5], [6.2, 6.2], [5.0, 5.0], 0.2)
        out = step(ens, 0.2)
        assert np.all((out.y >= 0.0) & (out.y < 2 * math.pi))

    def test_mass_exactly_conserved(self):
        rng = np.random.default_rng(6)
        ens = random_cloud(rng)
        m0 = total_mass(ens)
        out = step(ens, 0.05)
        assert total_mass(out) == m0

    def test_h_conserved_to_roundoff(self):
        rng = np.random.default_rng(7)
        ens = random_cloud(rng)
        h0 = horizontal_center(ens)
        state = ens
        for _ in range(50):
            state = step(state, 0.02)
        assert abs(horizontal_center(state) - h0) < 1e-12

    def test_energy_drift_small_and_fourth_order(self):
        rng = np.random.default_rng(11)
        ens = random_cloud(rng, n=20)
        e0 = regularized_energy(ens)

        def drift(dt, nsteps):
            state = ens
            for _ in range(nsteps):
                state = step(state, dt)
            return abs(regularized_energy(state) - e0)

        d1 = drift(0.1, 20)
        d2 = drift(0.05, 40)
        assert d1 < 1e-7
        # order ~4 once above roundoff
        if d1 > 1e-12:
            assert d2 < d1 / 6.0

    def test_rk4_self_convergence_order(self):
        # two-blob orbit to T=1; observed order must be >= 3.7
        def final_state(dt):
            state = pair()
            n = round(1.0 / dt)
            for _ in range(n):
                state = step(state, dt)
            return np.concatenate([state.x, state.y])

        s1, s2, s3 = final_state(0.1), final_state(0.05), final_state(0.025)
        e1 = np.linalg.norm(s1 - s2)
        e2 = np.linalg.norm(s2 - s3)
        order = math.log2(e1 / e2)
        assert order >= 3.7

    def test_rk2_self_convergence_order(self):
        def final_state(dt):
            state = pair()
            for _ in range(round(1.0 / dt)):
                state = step(state, dt, integrator="rk2")
            return np.concatenate([state.x, state.y])

        e1 = np.linalg.norm(final_state(0.1) - final_state(0.05))
        e2 = np.linalg.norm(final_state(0.05) - final_state(0.025))
        assert 1.7 <= math.log2(e1 / e2) <= 2.6

    def test_mirror_equivariance(self):
        # negating all x and y conjugates the flow (kernel oddness)
        rng = np.random.default_rng(13)
        ens = random_cloud(rng, n=12)
        mirrored = ens.with_positions(-ens.x, -ens.y)
        a = step(ens, 0.07)
        b = step(mirrored, 0.07)
        np.testing.assert_allclose(b.x, -a.x, rtol=0, atol=1e-12)
        dy = (b.y + a.y) % (2 * math.pi)
        dy = np.minimum(dy, 2 * math.pi - dy)
        np.testing.assert_allclose(dy, 0.0, rtol=0, atol=1e-12)

    def test_empty_rejected(self):
        ens = VorticityEnsemble(
            np.empty(0), np.empty(0), np.empty(0), np.empty(0)
        )
        with pytest.raises(ValueError):
            step(ens, 0.1)


class TestProbe:
    def test_probe_validation(self):
        with pytest.raises(ValueError):
            ProbeSpec(num_y=8)
        with pytest.raises(ValueError):
            ProbeSpec(x_min=1.0, x_max=-1.0)

    def test_zero_circulation_profile_is_zero(self):
        ens = make([0.0], [0.0], [0.0], 0.1)
        profile, gmax = sup_u1_profile(ens, ProbeSpec(-2, 2, 5, 16))
        assert gmax == 0.0
        assert all(v == 0.0 for _, v in profile)

    def test_far_field_u1_decays(self):
        rng = np.random.default_rng(17)
        ens = random_cloud(rng)
        m = total_mass(ens)
        profile, _ = sup_u1_profile(ens, ProbeSpec(12.0, 12.0, 1, 32))
        assert profile[0][1] <= m * math.exp(-5.0)


class TestSimulate:
    def test_step_plan(self):
        assert _step_plan(0.005, 20.0) == (4000, 0.0)
        assert _step_plan(0.001, 10.0) == (10000, 0.0)
        n, rem = _step_plan(0.4, 1.0)
        assert n == 2 and rem == pytest.approx(0.2, rel=1e-12)
        assert _step_plan(0.1, 0.0) == (0, 0.0)

    def test_record_times(self):
        rng = np.random.default_rng(23)
        ens = random_cloud(rng, n=8)
        cfg = SimConfig(dt=0.05, t_end=0.5, output_every=3,
                        sup_u1_probe=ProbeSpec(-2, 2, 3, 16))
        records, final = simulate(ens, cfg)
        times = [r.t for r in records]
        assert times[0] == 0.0
        assert times[-1] == 0.5
        assert all(b > a for a, b in zip(times, times[1:]))
        # interior records at every 3rd step
        assert times[1] == pytest.approx(0.15)

    def test_t_end_zero_single_record(self):
        rng = np.random.default_rng(29)
        ens = random_cloud(rng, n=5)
        cfg = SimConfig(dt=0.1, t_end=0.0, sup_u1_probe=ProbeSpec(-2, 2, 3, 16))
        records, final = simulate(ens, cfg)
        assert len(records) == 1 and records[0].t == 0.0
        np.testing.assert_array_equal(final.x, ens.x)

    def test_closing_partial_step_lands_on_t_end(self):
        rng = np.random.default_rng(31)
        ens = random_cloud(rng, n=5)
        cfg = SimConfig(dt=0.4, t_end=1.0, sup_u1_probe=ProbeSpec(-2, 2, 3, 16))
        records, _ = simulate(ens, cfg)
        assert records[-1].t == 1.0

    def test_mass_column_exactly_constant(self):
        rng = np.random.default_rng(37)
        ens = random_cloud(rng, n=10)
        cfg = SimConfig(dt=0.05, t_end=1.0, sup_u1_probe=ProbeSpec(-2, 2, 3, 16))
        records, _ = simulate(ens, cfg)
        assert len({r.mass for r in records}) == 1

    def test_energy_nan_for_zero_core(self):
        cfg = SimConfig(dt=0.01, t_end=0.02, sup_u1_probe=ProbeSpec(-3, 3, 4, 16))
        records, _ = simulate(pair(), cfg)
        assert math.isnan(records[0].energy)

    def test_abort_flushes_partial_records(self):
        # two coincident zero-core blobs are singular at the first step
        ens = make([0.3, 0.3], [1.0, 1.0], [1.0, 1.0], 0.0)
        cfg = SimConfig(dt=0.01, t_end=1.0, sup_u1_probe=ProbeSpec(-2, 2, 3, 16))
        seen = []
        with pytest.raises(SimulationAbort) as err:
            simulate(ens, cfg, on_record=lambda rec, state: seen.append(rec))
        assert len(seen) == 1 and seen[0].t == 0.0
        assert err.value.records == seen

    def test_deterministic_repeat(self):
        rng = np.random.default_rng(41)
        ens = random_cloud(rng, n=12)
        cfg = SimConfig(dt=0.02, t_end=0.5, sup_u1_probe=ProbeSpec(-2, 2, 3, 16))
        r1, f1 = simulate(ens, cfg)
        r2, f2 = simulate(ens, cfg)
        np.testing.assert_array_equal(f1.x, f2.x)
        np.testing.assert_array_equal(f1.y, f2.y)
        assert [r.energy for r in r1] == [r.energy for r in r2]
        assert [r.sup_u1 for r in r1] == [r.sup_u1 for r in r2]
