"""Tests for run-diagnostics analysis: drift, tail inequality, growth fit."""

import math

import numpy as np
import pytest

from cylvort.analysis import (
    choose_domination_L,
    conservation_drift,
    empirical_tail_inequality,
    envelope_comparison,
    fit_growth_exponent,
    growth_fit_report,
)
from cylvort.ensemble import DiagnosticsRecord
from cylvort.errors import ConfigError


def make_records(ts, diam=None, mass=1.0, h=0.0, energy=-1.0, tails=None,
                 abs_moment=1.0):
    out = []
    for k, t in enumerate(ts):
        out.append(DiagnosticsRecord(
            t=float(t),
            mass=mass if np.isscalar(mass) else mass[k],
            h_center=h if np.isscalar(h) else h[k],
            energy=energy if np.isscalar(energy) else energy[k],
            abs_moment=abs_moment,
            diameter=1.0 if diam is None else float(diam[k]),
            tails=[] if tails is None else [float(v) for v in tails[k]],
            sup_u1=0.0,
        ))
    return out


class TestConservationDrift:
    def test_zero_drift(self):
        recs = make_records(np.linspace(0, 10, 11))
        d = conservation_drift(recs)
        assert d["mass_drift"] == 0.0
        assert d["h_drift"] == 0.0
        assert d["energy_drift"] == 0.0

    def test_reports_max_abs_deviation(self):
        ts = np.linspace(0, 1, 5)
        mass = np.array([2.0, 2.0, 2.5, 2.0, 1.9])
        d = conservation_drift(make_records(ts, mass=mass))
        assert d["mass_drift"] == 0.5

    def test_nan_energy_reported_as_none(self):
        recs = make_records([0.0, 1.0], energy=math.nan)
        d = conservation_drift(recs)
        assert d["energy_drift"] is None
        assert d["energy_drift_rel"] is None

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            conservation_drift([])


class TestTailInequality:
    def _records_with_tails(self, ts, inner, outer):
        # tails list ordered by exponents [0, 1, 2]: mass, f_1, f_2
        tails = [[1.0, i, o] for i, o in zip(inner, outer)]
        return make_records(ts, tails=tails)

    def test_constant_inner_linear_rhs(self):
        # inner tail w constant: RHS(t) = (w^2 + e^{-2} w) t for a = 8
        ts = np.linspace(0.0, 4.0, 9)
        w = 0.25
        recs = self._records_with_tails(ts, [w] * 9, [0.0] * 9)
        rep = empirical_tail_inequality(recs, [0, 1, 2], a=8.0)
        expect = (w * w + math.exp(-2.0) * w) * ts[-1]
        assert rep.rhs[-1] == pytest.approx(expect, rel=1e-12)
        assert rep.max_C == 0.0  # outer tail identically zero

    def test_empirical_constant_value(self):
        ts = [0.0, 1.0, 2.0]
        recs = self._records_with_tails(ts, [0.5, 0.5, 0.5], [0.0, 0.1, 0.1])
        rep = empirical_tail_inequality(recs, [0, 1, 2], a=8.0)
        g = 0.25 + math.exp(-2.0) * 0.5
        assert rep.C_values[1] == pytest.approx(0.1 * 64.0 / g, rel=1e-12)
        assert rep.max_C == pytest.approx(0.1 * 64.0 / g, rel=1e-12)
        assert rep.t_at_max == 1.0

    def test_rhs_nondecreasing(self):
        rng = np.random.default_rng(3)
        ts = np.linspace(0.0, 5.0, 20)
        inner = rng.uniform(0.0, 1.0, size=20)
        recs = self._records_with_tails(ts, inner, inner * 0.1)
        rep = empirical_tail_inequality(recs, [0, 1, 2], a=8.0)
        assert np.all(np.diff(rep.rhs) >= 0.0)

    def test_missing_exponent_is_config_error(self):
        recs = self._records_with_tails([0.0, 1.0], [0.1, 0.1], [0.0, 0.0])
        with pytest.raises(ConfigError, match="tail exponents"):
            empirical_tail_inequality(recs, [0, 1, 2], a=32.0)  # needs f_2, f_3

    def test_non_dyadic_threshold_rejected(self):
        recs = self._records_with_tails([0.0, 1.0], [0.1, 0.1], [0.0, 0.0])
        with pytest.raises(ConfigError, match="2\\*4"):
            empirical_tail_inequality(recs, [0, 1, 2], a=10.0)

    def test_a_equal_2_unservable(self):
        # the exponent-0 slot records total mass, not tail(1)
        recs = self._records_with_tails([0.0, 1.0], [0.1, 0.1], [0.0, 0.0])
        with pytest.raises(ConfigError):
            empirical_tail_inequality(recs, [0, 1, 2], a=2.0)

    def test_small_a_rejected(self):
        recs = self._records_with_tails([0.0, 1.0], [0.1, 0.1], [0.0, 0.0])
        with pytest.raises(ValueError):
            empirical_tail_inequality(recs, [0, 1, 2], a=1.0)

    def test_to_dict_shape(self):
        recs = self._records_with_tails([0.0, 1.0], [0.5, 0.5], [0.0, 0.1])
        d = empirical_tail_inequality(recs, [0, 1, 2], a=8.0).to_dict()
        assert set(d) == {"a", "inner_exponent", "max_C", "t_at_max",
                          "final_lhs", "final_rhs", "n_evaluations"}


class TestGrowthFit:
    def test_exact_cube_root_power_law(self):
        ts = np.linspace(0.0, 200.0, 101)
        d = (1.0 + ts) ** (1.0 / 3.0)
        p, pref = fit_growth_exponent(make_records(ts, diam=d))
        assert p == pytest.approx(1.0 / 3.0, abs=1e-3)
        assert pref == pytest.approx(1.0, rel=1e-3)

    def test_constant_diameter(self):
        ts = np.linspace(0.0, 100.0, 50)
        p, pref = fit_growth_exponent(make_records(ts, diam=np.full(50, 3.0)))
        assert p == pytest.approx(0.0, abs=1e-12)
        assert pref == pytest.approx(3.0, rel=1e-12)

    def test_envelope_ignores_transient_dips(self):
        ts = np.linspace(0.0, 200.0, 101)
        d = (1.0 + ts) ** 0.5
        d[::7] *= 0.2  # dips must not drag the monotone envelope down
        p, _ = fit_growth_exponent(make_records(ts, diam=d))
        assert p == pytest.approx(0.5, abs=0.02)

    def test_too_few_records(self):
        ts = np.linspace(0.0, 200.0, 5)
        with pytest.raises(ValueError, match="10 records"):
            fit_growth_exponent(make_records(ts, diam=1.0 + ts))

    def test_insufficient_span(self):
        ts = np.linspace(0.0, 5.0, 20)
        with pytest.raises(ValueError, match="decade|span"):
            fit_growth_exponent(make_records(ts, diam=1.0 + ts))

    def test_report_window_is_last_decade(self):
        ts = np.linspace(0.0, 200.0, 101)
        rep = growth_fit_report(make_records(ts, diam=(1.0 + ts) ** 0.4))
        assert rep["window_t"][0] >= (1.0 + 200.0) / 10.0 - 1.0 - 1e-9
        assert rep["window_t"][1] == 200.0
        assert rep["n_points"] >= 2


class TestEnvelopeComparison:
    def test_auto_L_dominates_at_tref(self):
        ts = np.linspace(0.0, 200.0, 101)
        d = 2.0 * (1.0 + ts) ** (1.0 / 3.0)
        rep = envelope_comparison(make_records(ts, diam=d), c5=7.5e-4, c4=0.25)
        assert rep["L_auto_chosen"]
        assert rep["dominated_fraction"] > 0.0
        first = rep["t_ref"]
        assert first >= 20.0

    def test_explicit_L_and_violation_detection(self):
        ts = np.linspace(0.0, 100.0, 51)
        d = np.full(51, 1e9)  # absurd diameter: barrier must lose
        rep = envelope_comparison(
            make_records(ts, diam=d), c5=7.5e-4, c4=0.25, L=0.5
        )
        assert not rep["holds_throughout"]
        assert rep["dominated_fraction"] == 0.0
        assert rep["first_violation_t"] == rep["t_ref"]

    def test_domination_choice_inverts_phi(self):
        L = choose_domination_L(7.5e-4, 0.25, t_ref=20.0, d_ref=50.0)
        from cylvort.envelope import EnvelopeParams, envelope_R

        env = EnvelopeParams(c5=7.5e-4, c4=0.25, L=L)
        assert 2.0 * envelope_R(env, 20.0) >= 50.0

    def test_small_diameter_uses_near_critical_L(self):
        # barrier's additive constant alone covers d_ref <= 4
        L = choose_domination_L(7.5e-4, 0.25, t_ref=20.0, d_ref=3.0)
        assert L == pytest.approx(1.0 / 3.0, abs=1e-8)

    def test_no_records_past_tref(self):
        ts = np.linspace(0.0, 5.0, 10)
        with pytest.raises(ValueError, match="t_ref"):
            envelope_comparison(make_records(ts), c5=7.5e-4, c4=0.25)
