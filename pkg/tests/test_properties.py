import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pastvar import Exponential, Power, Uniform, Weibull, linear_transform, monotonic_transform
from pastvar import measures as ms
from pastvar import properties as pr

from conftest import ZOO

GRID01 = list(np.linspace(0.1, 0.9, 9))


# derivative identities


def test_varentropy_derivative_examples():
    assert pr.check_varentropy_derivative(Uniform(1.0), 0.5) < 1e-8
    assert pr.check_varentropy_derivative(Power(2.0), 0.5) < 1e-8
    assert pr.check_varentropy_derivative(Exponential(1.0), 1.0) < 1e-5


def test_entropy_derivative_quadrature_route():
    assert pr.check_entropy_derivative(Exponential(1.0), 1.0, method="quadrature") < 1e-6


def test_derivative_step_shrinks_near_boundary():
    # t close to the lower end of a density with a log singularity
    d = Weibull(0.5)
    t = float(d.quantile(0.1))
    assert pr.check_entropy_derivative(d, t) < 1e-5
    assert pr.check_varentropy_derivative(d, t) < 1e-5


# constancy characterizations


def test_constant_varentropy_uniform():
    rep = pr.check_constant_varentropy(Uniform(1.0), GRID01)
    assert rep.applicable and rep.passed
    assert "v=0" in rep.detail


def test_constant_varentropy_power2():
    rep = pr.check_constant_varentropy(Power(2.0), GRID01)
    assert rep.applicable and rep.passed
    assert rep.max_residual < 1e-10


def test_constant_varentropy_exponential_not_applicable():
    rep = pr.check_constant_varentropy(Exponential(1.0), pr.default_t_grid(Exponential(1.0)))
    assert not rep.applicable and rep.ok


def test_constant_sum_form_examples():
    assert pr.check_constant_sum_form(Uniform(1.0), 0.0, GRID01).passed
    assert pr.check_constant_sum_form(Power(2.0), 0.5, GRID01).passed


@pytest.mark.parametrize("k", [1.0, 2.0, 3.0, 5.0])
def test_constant_sum_form_power_family(k):
    rep = pr.check_constant_sum_form(Power(k), None, GRID01)
    assert rep.applicable and rep.passed
    # H + log q = (k - 1)/k for F = x^k
    c = float(rep.detail.split("c=")[1])
    assert abs(c - (k - 1) / k) <= 1e-9


def test_constant_sum_not_applicable_for_exponential():
    rep = pr.check_constant_sum_form(Exponential(1.0), None, pr.default_t_grid(Exponential(1.0)))
    assert not rep.applicable


def test_generalized_hazard_power2():
    rep = pr.check_generalized_hazard_equivalence(Power(2.0), 0.5, GRID01)
    assert rep.passed
    q = ms.generalized_reversed_hazard(Power(2.0), np.array(GRID01), 0.5)
    assert np.max(np.abs(q - 2.0)) <= 1e-8
    assert abs(math.exp(0.5 - ms.entropy(Power(2.0)).value) - 2.0) <= 1e-8


def test_generalized_hazard_uniform():
    rep = pr.check_generalized_hazard_equivalence(Uniform(1.0), 0.0, GRID01)
    assert rep.passed and "exp(c-H)=1" in rep.detail


def test_generalized_hazard_exponential_fails_together():
    rep = pr.check_generalized_hazard_equivalence(Exponential(1.0), 0.3, pr.default_t_grid(Exponential(1.0)))
    assert rep.passed
    spread = float(rep.detail.split("spread=")[1].split(",")[0])
    deviation = float(rep.detail.split("deviation=")[1])
    assert spread > 1e-3 and deviation > 1e-3


# transforms


def test_linear_transform_examples():
    assert pr.check_linear_transform(Uniform(1.0), 2.0, 0.0, [1.0]).passed
    rep = pr.check_linear_transform(Exponential(1.0), 3.0, 2.0, [5.0])
    assert rep.passed and rep.max_residual <= 1e-5
    y = linear_transform(Exponential(1.0), 3.0, 2.0)
    # V at t=1 of exponential(1), frozen from mpmath
    assert abs(ms.past_varentropy(y, 5.0).value - 0.079326405792207681) <= 1e-7
    same = pr.check_linear_transform(Power(2.0), 1.0, 0.0, GRID01)
    assert same.max_residual == 0.0


@given(a=st.floats(0.2, 5), b=st.floats(0, 3), p=st.floats(0.05, 0.95))
def test_linear_transform_property(a, b, p):
    base = Weibull(2.0)
    t = a * float(base.quantile(p)) + b
    assert pr.check_linear_transform(base, a, b, [t]).passed


def _identity(base):
    return monotonic_transform(base, lambda x: x, lambda y: y, lambda x: np.ones_like(x), "identity")


def test_monotonic_identity_reduces():
    y = _identity(Exponential(1.0))
    t = 1.0
    h_rhs, v_rhs = pr.monotonic_transform_rhs(y, t)
    assert abs(h_rhs - ms.past_entropy(Exponential(1.0), t).value) <= 1e-12
    assert abs(v_rhs - ms.past_varentropy(Exponential(1.0), t).value) <= 1e-12
    assert pr.check_monotonic_transform(y, [0.5, 1.0, 2.0]).passed


def test_monotonic_affine_matches_linear_route():
    base = Exponential(1.0)
    y = monotonic_transform(base, lambda x: 2 * x + 1, lambda v: (v - 1) / 2,
                            lambda x: np.full_like(x, 2.0), "affine")
    grid = [1.5, 3.0, 5.0]
    assert pr.check_monotonic_transform(y, grid).passed
    lin = linear_transform(base, 2.0, 1.0)
    for t in grid:
        h_rhs, v_rhs = pr.monotonic_transform_rhs(y, t)
        assert abs(h_rhs - ms.past_entropy(lin, t).value) <= 1e-8
        assert abs(v_rhs - ms.past_varentropy(lin, t).value) <= 1e-8


def test_monotonic_square_on_uniform():
    y = monotonic_transform(Uniform(1.0), np.square, np.sqrt, lambda x: 2 * x, "square")
    rep = pr.check_monotonic_transform(y, [0.25])
    assert rep.passed
    # mpmath on Y = X^2, t = 1/4: H = 1 - 2 log 2 - ... frozen values
    assert abs(ms.past_entropy(y, 0.25).value + 1.6931471805599453) <= 1e-8
    assert abs(ms.past_varentropy(y, 0.25).value - 1.0) <= 1e-7


def test_monotonic_reciprocal_on_exponential_uses_residual():
    y = monotonic_transform(Exponential(1.0), lambda x: 1 / x, lambda v: 1 / v,
                            lambda x: -1 / x ** 2, "reciprocal")
    assert y.direction == "decreasing"
    rep = pr.check_monotonic_transform(y, [0.5, 1.0, 2.0])
    assert rep.passed
    # mpmath: past measures of Y = 1/X at t = 2
    h_rhs, v_rhs = pr.monotonic_transform_rhs(y, 2.0)
    assert abs(h_rhs - 0.54047309615242968) <= 1e-7
    assert abs(v_rhs - 0.16433257647681595) <= 1e-6


# consistency relations and PRHR


def test_reversed_hazard_relations(zoo_dist):
    rep = pr.check_reversed_hazard_relations(zoo_dist, pr.default_t_grid(zoo_dist, 5))
    assert rep.passed


@pytest.mark.parametrize("a", [0.5, 2.0])
def test_prhr_dual_route(zoo_dist, a):
    assert pr.check_prhr_dual_route(zoo_dist, a, pr.default_t_grid(zoo_dist, 4)).passed


# omega function and bounds


def test_omega_uniform_closed_form():
    t = 0.8
    om = pr.omega_function(Uniform(1.0), t)
    x = om.grid
    assert np.max(np.abs(om.omega_values - 6 * x * (t - x) / t ** 2)) <= 1e-10
    assert abs(om.expected_derivative()) <= 1e-10
    assert om.relation_residual < 1e-7


def test_omega_relation_residual(zoo_dist):
    om = pr.omega_function(zoo_dist, float(zoo_dist.quantile(0.5)))
    assert om.relation_residual < 1e-7
    assert om.sigma2 > 0


def test_lower_bound_examples():
    rep = pr.check_lower_bound(Uniform(1.0), [0.5])
    assert rep.passed and abs(rep.lhs[0]) <= 1e-12 and abs(rep.rhs[0]) <= 1e-12
    rep = pr.check_lower_bound(Power(2.0), [0.5])
    assert rep.passed and abs(rep.lhs[0] - 0.25) <= 1e-12
    rep = pr.check_lower_bound(Exponential(1.0), [0.5, 1.0, 2.0])
    assert rep.passed and rep.orientation == "ge"


def test_bound_report_semantics():
    rep = pr.BoundReport.build("x", [1, 2], [1.0, 0.5], [0.9, 0.5 + 5e-7], "ge", 1e-6)
    assert rep.satisfied == (True, True) and rep.passed
    rep = pr.BoundReport.build("x", [1], [2.0], [1.0], "le", 1e-6)
    assert rep.satisfied == (False,) and not rep.passed and rep.max_residual == 1.0


def test_upper_bound_logconcave():
    assert pr.check_upper_bound_logconcave(Uniform(1.0), GRID01).passed
    grid = list(np.linspace(0.1, 10, 12))
    rep = pr.check_upper_bound_logconcave(Exponential(1.0), grid)
    assert rep.passed and max(rep.lhs) <= 1 + 1e-6


def test_upper_bound_not_applicable_for_weibull_half():
    d = Weibull(0.5)
    assert not pr.is_log_concave(d)
    rep = pr.check_upper_bound_logconcave(d, pr.default_t_grid(d))
    assert not rep.applicable and rep.ok
    assert "log-concavity failed" in rep.detail


def test_log_concavity_gate():
    assert pr.is_log_concave(Weibull(2.0))
    assert pr.is_log_concave(Power(2.0))
    assert not pr.is_log_concave(Power(0.5))


def test_reports_are_immutable():
    rep = pr.check_constant_varentropy(Power(2.0), GRID01)
    with pytest.raises(AttributeError):
        rep.passed = False
