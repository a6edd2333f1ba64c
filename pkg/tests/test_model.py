"""Cubic nonlinearity, branch inverses, landmarks, and parameter validation."""

import numpy as np
import pytest

from fhnchain.errors import BranchDomainError, ExcitabilityError, ParameterError
from fhnchain.model import (
    ModelParams,
    cubic,
    cubic_inverse,
    cubic_slope,
    landmarks,
)


def bisect_cubic(v, lo, hi, tol=1e-14):
    """Independent root isolator for cubic(u) = v on a monotone interval."""
    flo = cubic(lo) - v
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = cubic(mid) - v
        if (fm > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


class TestCubic:
    def test_point_values(self):
        assert cubic(-1.2) == pytest.approx(-1.872, abs=1e-12)
        assert cubic(1.0) == pytest.approx(2.0, abs=0)
        assert cubic(-1.0) == pytest.approx(-2.0, abs=0)
        assert cubic(0.0) == 0.0

    def test_slope_values(self):
        assert cubic_slope(1.0) == 0.0
        assert cubic_slope(-1.0) == 0.0
        assert cubic_slope(0.0) == 3.0
        assert cubic_slope(-1.2) == pytest.approx(-1.32, abs=1e-12)

    def test_odd_symmetry(self):
        rng = np.random.default_rng(7)
        for u in rng.uniform(-3, 3, 100):
            assert cubic(-u) == pytest.approx(-cubic(u), abs=1e-12)


class TestCubicInverse:
    def test_fold_landings(self):
        assert cubic_inverse(2.0, "left") == pytest.approx(-2.0, abs=1e-12)
        assert cubic_inverse(-2.0, "right") == pytest.approx(2.0, abs=1e-12)

    def test_left_branch_against_bisection(self):
        expected = bisect_cubic(-1.872, -3.0, -1.0)
        assert expected == pytest.approx(-1.2, abs=1e-9)
        assert cubic_inverse(-1.872, "left") == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("branch,vlo,vhi", [
        ("left", -2.0, 40.0),
        ("middle", -2.0, 2.0),
        ("right", -40.0, 2.0),
    ])
    def test_round_trip(self, branch, vlo, vhi):
        rng = np.random.default_rng(11)
        for v in rng.uniform(vlo, vhi, 1000):
            u = cubic_inverse(float(v), branch)
            assert cubic(u) == pytest.approx(v, abs=1e-10)

    def test_branch_ordering(self):
        rng = np.random.default_rng(13)
        for v in rng.uniform(-2.0, 2.0, 200):
            v = float(v)
            left = cubic_inverse(v, "left")
            mid = cubic_inverse(v, "middle")
            right = cubic_inverse(v, "right")
            assert left <= -1.0 + 1e-12
            assert -1.0 - 1e-12 <= mid <= 1.0 + 1e-12
            assert right >= 1.0 - 1e-12
            assert left <= mid <= right

    @pytest.mark.parametrize("v,branch", [
        (-2.5, "left"), (2.5, "right"), (2.5, "middle"), (-2.5, "middle"),
    ])
    def test_out_of_range(self, v, branch):
        with pytest.raises(BranchDomainError):
            cubic_inverse(v, branch)

    def test_unknown_branch(self):
        with pytest.raises(ValueError):
            cubic_inverse(0.0, "top")


class TestLandmarks:
    def test_self_consistency(self):
        lm = landmarks(-1.2)
        assert lm.equilibrium == (-1.2, cubic(-1.2))
        for u, v in (lm.fold_right, lm.fold_left):
            assert cubic(u) == v
            assert cubic_slope(u) == 0.0
        assert cubic(lm.landing_from_right_fold) == lm.fold_right[1]
        assert cubic(lm.landing_from_left_fold) == lm.fold_left[1]


class TestModelParams:
    def test_defaults_accepted(self):
        p = ModelParams(alpha=8.0)
        assert p.epsilon == 0.1 and p.c == -1.2 and p.A == 1.0 and p.K == 0.0
        assert p.kick_stride == 8000
        assert p.n_steps == 600000

    def test_singular_epsilon_allowed(self):
        assert ModelParams(alpha=10.0, epsilon=0.0).epsilon == 0.0

    def test_rest_state(self):
        p = ModelParams(alpha=8.0)
        assert p.equilibrium == (-1.2, cubic(-1.2))

    @pytest.mark.parametrize("kwargs,field", [
        (dict(alpha=8.0, epsilon=-0.1), "epsilon"),
        (dict(alpha=8.0, dt=0.0), "dt"),
        (dict(alpha=-1.0), "alpha"),
        (dict(alpha=8.0, A=0.0), "A"),
        (dict(alpha=8.0, n_cells=0), "n_cells"),
        (dict(alpha=8.0, t_transient=-1.0), "t_transient"),
        (dict(alpha=8.0, t_end=100.0, t_transient=100.0), "t_end"),
        (dict(alpha=8.0005), "alpha"),  # off the dt grid
    ])
    def test_rejects_bad_values(self, kwargs, field):
        with pytest.raises(ParameterError) as err:
            ModelParams(**kwargs)
        assert err.value.field == field

    def test_excitability_is_distinct_error(self):
        with pytest.raises(ExcitabilityError) as err:
            ModelParams(alpha=8.0, c=-0.5)
        assert err.value.field == "c"
        assert isinstance(err.value, ParameterError)

    def test_alpha_grid_accepts_paper_values(self):
        for alpha in (8.3, 8.4, 8.41, 8.45, 7.5, 4.2, 1.1, 50.0):
            ModelParams(alpha=alpha)
