"""Periodicity detection, loop signatures, regime labels, boundaries, waves."""

import numpy as np
import pytest
from dataclasses import replace

from fhnchain.errors import (
    BoundaryInconsistencyError,
    InsufficientDataError,
    ParameterError,
)
from fhnchain.integrator import simulate
from fhnchain.model import ModelParams, cubic
from fhnchain.analysis import (
    BLOCKED,
    COMPLEX_MMO,
    SIMPLE_MMO,
    SIMPLE_PERIODIC,
    UNCLASSIFIED,
    classify_regime,
    default_transient,
    detect_period,
    extract_loops,
    filtering_report,
    locate_boundary,
    propagation_lag,
    spike_trains,
    wave_diagnostics,
)


def P(alpha, **kw):
    kw.setdefault("t_transient", default_transient(alpha))
    kw.setdefault("t_end", 600.0)
    return ModelParams(alpha=alpha, **kw)


class TestDetectPeriod:
    def test_constant_samples_have_unit_block(self):
        states = np.tile([[-1.2, -1.872]], (8, 1))
        times = 50.0 * np.arange(8)
        verdict = detect_period(states, times)
        assert verdict.periodic and verdict.n_intervals == 1
        assert verdict.period == pytest.approx(50.0)

    def test_alternating_states_have_two_blocks(self):
        states = np.array([[0.0, 0.0], [1.0, 1.0]] * 4)
        times = 8.0 * np.arange(8)
        verdict = detect_period(states, times)
        assert verdict.periodic and verdict.n_intervals == 2
        assert verdict.period == pytest.approx(16.0)

    def test_drifting_samples_are_aperiodic(self):
        states = np.linspace(0.0, 1.0, 10)[:, None] * np.ones((1, 2))
        verdict = detect_period(states, np.arange(10.0))
        assert not verdict.periodic

    def test_too_few_kicks(self):
        with pytest.raises(InsufficientDataError):
            detect_period(np.zeros((5, 2)), np.arange(5.0))


class TestExtractLoops:
    def test_labels_by_peak(self):
        t = np.linspace(0.0, 2.0, 201)
        u = np.where(t < 1.0, 1.9 * np.sin(np.pi * t), -0.8)
        labels = extract_loops(t, u, np.array([0.0, 1.0, 2.0]), 0.0)
        assert labels == ["Large", "small"]

    def test_needs_two_kicks(self):
        with pytest.raises(InsufficientDataError):
            extract_loops(np.arange(4.0), np.zeros(4), np.array([0.0]), 0.0)


class TestClassifyRegime:
    @pytest.mark.parametrize("alpha,label,n_large,n_small,period_mult", [
        (50.0, SIMPLE_PERIODIC, 1, 0, 1.0),
        (8.0, SIMPLE_MMO, 1, 1, 2.0),
        (8.3, COMPLEX_MMO, 2, 1, 3.0),
        (8.4, COMPLEX_MMO, 3, 1, 4.0),
        (8.5, SIMPLE_PERIODIC, 1, 0, 1.0),
        (4.0, SIMPLE_PERIODIC, 1, 1, 2.0),  # early-kick glide, not an MMO
    ])
    def test_front_node_labels(self, alpha, label, n_large, n_small, period_mult):
        rep = classify_regime(P(alpha))
        assert rep.label == label
        assert rep.signature.n_large == n_large
        assert rep.signature.n_small == n_small
        assert rep.steady_period == pytest.approx(period_mult * alpha, rel=1e-2)

    def test_glide_versus_flutter_distinction(self):
        below = classify_regime(P(7.4)).signature
        above = classify_regime(P(7.6)).signature
        assert below.flutter_count == 0 and above.flutter_count == 1
        assert below.pattern == above.pattern  # same Large/small skeleton

    def test_blocked_at_very_fast_forcing(self):
        rep = classify_regime(P(0.3, t_end=400.0, t_transient=100.0))
        assert rep.label == BLOCKED

    def test_blocked_when_stepper_diverges(self):
        rep = classify_regime(ModelParams(alpha=1.0, epsilon=0.001, dt=0.01,
                                          t_end=10.0, t_transient=0.0))
        assert rep.label == BLOCKED

    def test_unclassified_on_short_window(self):
        rep = classify_regime(P(8.0, t_end=230.0, t_transient=200.0))
        assert rep.label == UNCLASSIFIED

    def test_doubled_horizon_reproduces_verdict(self):
        short = classify_regime(P(8.3))
        long = classify_regime(P(8.3, t_end=1200.0))
        assert short.label == long.label
        assert short.signature.pattern == long.signature.pattern
        assert short.steady_period == pytest.approx(long.steady_period, rel=1e-6)


class TestFiltering:
    def test_period_doubling_cascade_alpha4(self):
        r = simulate(ModelParams(alpha=4.0, n_cells=5, t_end=400.0,
                                 t_transient=200.0))
        reports = filtering_report(r)
        assert reports[0].steady_period == pytest.approx(8.0, rel=1e-2)
        assert reports[1].label == SIMPLE_MMO
        assert reports[1].steady_period == pytest.approx(16.0, rel=1e-2)
        assert reports[2].label == SIMPLE_PERIODIC
        assert reports[2].steady_period == pytest.approx(16.0, rel=1e-2)

    def test_burst_cascade_alpha42(self):
        r = simulate(ModelParams(alpha=4.2, n_cells=5, t_end=600.0,
                                 t_transient=250.0))
        reports = filtering_report(r)
        assert reports[1].label == COMPLEX_MMO
        assert reports[1].signature.n_large == 3
        assert reports[1].signature.n_small == 1
        assert reports[1].steady_period == pytest.approx(8 * 4.2, rel=1e-2)
        assert reports[2].signature.n_large == 3
        assert reports[2].signature.n_small == 0
        assert reports[3].signature.pattern == reports[2].signature.pattern

    @pytest.mark.parametrize("alpha,n_cells,t_end,transient", [
        (8.41, 3, 600.0, 200.0),
        (4.2, 4, 600.0, 250.0),
        (1.1, 3, 600.0, 200.0),
    ])
    def test_complexity_never_grows_down_the_chain(self, alpha, n_cells,
                                                   t_end, transient):
        # Measured from the first node carrying a genuine sub-threshold
        # flutter (mixed-mode complexity can first appear one node in when
        # the front node's response is a plain multiple-period train).
        r = simulate(ModelParams(alpha=alpha, n_cells=n_cells, t_end=t_end,
                                 t_transient=transient))
        sigs = [rep.signature for rep in filtering_report(r)
                if rep.signature is not None]
        first = next(i for i, s in enumerate(sigs) if s.flutter_count > 0)
        runs = [s.max_consecutive_large for s in sigs[first:]]
        assert len(runs) >= 2
        assert all(b <= a for a, b in zip(runs, runs[1:]))

    def test_spike_trains_strictly_increasing(self):
        r = simulate(ModelParams(alpha=8.0, n_cells=4, t_end=300.0,
                                 t_transient=100.0))
        for train in spike_trains(r):
            assert np.all(np.diff(train.times) > 0)


class TestLocateBoundary:
    def test_width_and_grid_snap(self):
        alpha1 = locate_boundary(P(8.0), SIMPLE_MMO, COMPLEX_MMO, (8.1, 8.3))
        assert 8.1 < alpha1 < 8.3
        assert abs(alpha1 - 8.2) <= 0.15

    def test_rejects_equal_labels(self):
        with pytest.raises(ParameterError):
            locate_boundary(P(8.0), SIMPLE_MMO, SIMPLE_MMO, (8.0, 8.1))

    def test_rejects_mismatched_end_labels(self):
        with pytest.raises(ParameterError):
            locate_boundary(P(8.0), COMPLEX_MMO, SIMPLE_PERIODIC, (8.0, 8.1))

    def test_inconsistent_midpoint_reports_sub_brackets(self):
        # The stretch between these ends holds a third regime, so the first
        # midpoint label matches neither end.
        with pytest.raises(BoundaryInconsistencyError) as err:
            locate_boundary(P(7.4), SIMPLE_PERIODIC, COMPLEX_MMO, (7.4, 8.3))
        exc = err.value
        assert exc.label_mid == SIMPLE_MMO
        assert exc.bracket_low[0] <= exc.alpha_mid <= exc.bracket_high[1]


@pytest.fixture(scope="module")
def chain20():
    return simulate(ModelParams(alpha=50.0, n_cells=20, t_end=300.0,
                                t_transient=100.0))


class TestWaves:
    def test_lag_formula_matches_independent_trapezoid(self):
        p = P(50.0)
        rest_v = cubic(p.c)
        xs = np.linspace(p.c, p.K, 200001)
        ys = 1.0 / (np.array([cubic(x) for x in xs]) - rest_v + p.A)
        reference = np.trapezoid(ys, xs)
        assert propagation_lag(p) == pytest.approx(p.epsilon * reference, rel=1e-6)

    def test_lag_decreases_with_kick_size(self):
        lags = [propagation_lag(replace(P(50.0), A=a)) for a in (1.0, 2.0, 4.0)]
        assert lags[0] > lags[1] > lags[2]

    def test_delays_converge_to_node_independent_constant(self, chain20):
        report = wave_diagnostics(chain20)
        assert report.propagated
        late = report.delays[-1]
        assert np.max(np.abs(late - report.beta)) < 1e-2
        # and successive pulses agree too
        assert np.max(np.abs(report.delays[-2] - report.beta)) < 1e-2

    def test_speed_is_reciprocal_delay(self, chain20):
        report = wave_diagnostics(chain20)
        assert report.speed == pytest.approx(1.0 / report.beta)
        assert report.relative_discrepancy < 0.25

    def test_needs_three_nodes(self):
        r = simulate(ModelParams(alpha=50.0, n_cells=2, t_end=120.0,
                                 t_transient=0.0))
        with pytest.raises(ParameterError):
            wave_diagnostics(r)

    def test_propagation_failure_is_a_finding(self):
        # Sub-threshold kicks never fire the front node, so nothing travels.
        p = ModelParams(alpha=50.0, A=0.05, n_cells=3, t_end=120.0,
                        t_transient=0.0)
        report = wave_diagnostics(simulate(p))
        assert not report.propagated
        assert report.first_silent_node == 2
