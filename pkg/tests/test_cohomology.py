import numpy as np
import pytest

from focusfocus.cohomology import (
    circle_average,
    circle_solve,
    contract_moment_differential,
    contract_moment_numeric,
    default_offaxis_points,
    fiber_section,
    moment_right_inverse,
    poisson_bracket_fd,
    poisson_bracket_fd_values,
    scaled_right_inverse,
    solve_bracket_system,
    transport_integral,
    transport_time,
    transport_time_field,
)
from focusfocus.errors import (
    CrossCommutingViolation,
    EvalAtOrigin,
    OnSingularAxis,
    VerificationFailure,
)
from focusfocus.fields import (
    PhasePoint,
    QuadratureConfig,
    ScalarField,
    q1_field,
    q2_field,
    q1_value,
    q2_value,
    rho2_value,
)
from focusfocus.sampling import random_real_series, rng_for
from focusfocus.series import (
    from_real_basis,
    mul,
    poisson_bracket,
    q1_series,
    q2_series,
    rho2_series,
    x1_series,
    xi2_series,
)

P = PhasePoint(0.4, -0.3, 0.6, 0.2)


def field_of(poly, order):
    return ScalarField.from_series(from_real_basis(poly, order))


# -- right inverse ----------------------------------------------------------

def test_right_inverse_matrix_readoff():
    rho2 = ScalarField.from_function(rho2_value)
    zero = ScalarField.zero()
    y = moment_right_inverse(rho2, zero)
    assert y(P) == pytest.approx([P.xi1, P.xi2, P.x1, P.x2])
    y2 = moment_right_inverse(zero, rho2)
    assert y2(P) == pytest.approx([P.xi2, -P.xi1, -P.x2, P.x1])
    dq1, dq2 = contract_moment_numeric(y2, P.z1, P.z2)
    assert dq1 == pytest.approx(0.0, abs=1e-14)
    assert dq2 == pytest.approx(rho2_value(P.z1, P.z2))


def test_right_inverse_zero_input():
    y = moment_right_inverse(ScalarField.zero(), ScalarField.zero())
    assert y(P) == pytest.approx([0, 0, 0, 0])


def test_right_inverse_origin_raises():
    y = moment_right_inverse(q1_field(), q2_field())
    with pytest.raises(EvalAtOrigin):
        y(PhasePoint(0, 0, 0, 0))


def test_right_inverse_symbolic_identity():
    rng = rng_for(2, "psi-symbolic")
    for _ in range(5):
        p1 = random_real_series(rng, degrees=(0, 1, 2, 3), terms_per_degree=2, order=3)
        p2 = random_real_series(rng, degrees=(1, 2), terms_per_degree=2, order=3)
        components = scaled_right_inverse(p1, p2)
        got1, got2 = contract_moment_differential(components)
        n = got1.truncation_order
        assert got1 == mul(rho2_series(n), p1, n)
        assert got2 == mul(rho2_series(n), p2, n)


# -- circle average -----------------------------------------------------------

def test_average_of_invariant_field_is_identity():
    avg = circle_average(q2_field(), 32)
    assert avg(P) == pytest.approx(q2_field()(P), abs=1e-14)


def test_average_of_x1_vanishes():
    avg = circle_average(field_of({(1, 0, 0, 0): 1}, 1), 32)
    assert avg(P) == pytest.approx(0.0, abs=1e-15)


def test_average_of_z1_modulus_squared_fixed():
    f = field_of({(2, 0, 0, 0): 1, (0, 0, 2, 0): 1}, 2)   # x1^2 + x2^2
    avg = circle_average(f, 32)
    assert avg(P) == pytest.approx(f(P), abs=1e-14)


def test_average_is_projection():
    f = field_of({(2, 0, 0, 0): 1, (1, 0, 0, 1): -2}, 3)
    once = circle_average(f, 64)
    twice = circle_average(once, 64)
    assert twice(P) == pytest.approx(once(P), abs=1e-13)


def test_average_commutes_with_circle_flow():
    from focusfocus.flows import q2_flow
    f = field_of({(2, 0, 0, 0): 1, (1, 1, 0, 0): 3}, 3)
    avg = circle_average(f, 64)
    for s in (0.3, 1.2, 4.0):
        assert avg(q2_flow(s, P)) == pytest.approx(avg(P), abs=1e-13)


def test_average_matches_symbolic_projection():
    # independent oracle: the average of a polynomial keeps exactly the
    # monomials with vanishing circle weight
    from focusfocus.indices import packed_weight2
    from focusfocus.series import FormalSeries
    rng = rng_for(4, "avg-oracle")
    series = random_real_series(rng, degrees=(1, 2, 3, 4), terms_per_degree=3, order=4)
    projected = FormalSeries(
        {m: c for m, c in series.terms() if m.weight2() == 0},
        series.truncation_order)
    avg = circle_average(ScalarField.from_series(series), 64)
    want = ScalarField.from_series(projected)
    for point in (P, PhasePoint(0.1, 0.9, -0.4, 0.3)):
        assert avg(point) == pytest.approx(want(point), abs=1e-13)


# -- circle solve ---------------------------------------------------------------

def test_circle_solve_zero():
    assert circle_solve(ScalarField.zero(), 32)(P) == pytest.approx(0.0)


def test_circle_solve_x1_gives_minus_x2():
    f2 = circle_solve(field_of({(1, 0, 0, 0): 1}, 1), 32)
    assert f2(P) == pytest.approx(-P.x2, abs=1e-13)


def test_circle_solve_xi2_gives_xi1():
    f2 = circle_solve(ScalarField.from_series(xi2_series(1)), 32)
    assert f2(P) == pytest.approx(P.xi1, abs=1e-13)


def test_circle_solve_output_has_zero_average():
    f = field_of({(2, 0, 0, 0): 1, (1, 0, 0, 1): -2, (0, 1, 1, 0): 1}, 3)
    f2 = circle_solve(f, 64)
    avg = circle_average(f2, 64)
    assert avg(P) == pytest.approx(0.0, abs=1e-13)


def test_circle_solve_solves_circle_equation():
    # {f2, q2} = r2 - average(r2), checked by finite differences
    f = field_of({(1, 0, 0, 0): 1, (2, 0, 0, 0): 1}, 2)
    f2 = circle_solve(f, 64)
    target = f - circle_average(f, 64)
    got = poisson_bracket_fd(f2, q2_field(), P, 1e-5)
    assert got == pytest.approx(target(P), abs=1e-8)


# -- fiber section ----------------------------------------------------------------

def test_fiber_section_recovers_model_values():
    assert fiber_section(q1_field())(0.3, -0.8) == pytest.approx(0.3)
    assert fiber_section(q2_field())(0.3, -0.8) == pytest.approx(-0.8)


def test_fiber_section_on_radius_function():
    h = ScalarField.from_function(lambda z1, z2: q1_value(z1, z2) ** 2
                                  + q2_value(z1, z2) ** 2)
    sec = fiber_section(h)
    assert sec(0.5, 0.7) == pytest.approx(0.5**2 + 0.7**2)


# -- transport time ----------------------------------------------------------------

def test_transport_time_values():
    assert transport_time(PhasePoint.from_z(1, 1)) == pytest.approx(0.0)
    assert transport_time(PhasePoint.from_z(1, np.exp(2))) == pytest.approx(1.0)
    assert transport_time(PhasePoint.from_z(np.e, 1)) == pytest.approx(-0.5)


def test_transport_time_lands_on_diagonal():
    from focusfocus.flows import q1_flow
    z = PhasePoint.from_z(0.3 + 0.4j, 1.2 - 0.1j)
    t = transport_time(z)
    moved = q1_flow(t, z)
    assert abs(moved.z1) == pytest.approx(abs(moved.z2), rel=1e-12)


def test_transport_time_singular_axis():
    with pytest.raises(OnSingularAxis):
        transport_time(PhasePoint.from_z(0, 1))


def test_transport_brackets_by_fd():
    z = PhasePoint.from_z(1, 1 + 0.5j)
    t = transport_time_field()
    assert poisson_bracket_fd(t, q1_field(), z) == pytest.approx(1.0, abs=1e-6)
    assert poisson_bracket_fd(t, q2_field(), z) == pytest.approx(0.0, abs=1e-6)


def test_transport_integral_solves_hyperbolic_equation():
    # r invariant under the circle flow: f = transport integral solves
    # {f, q1} = r, {f, q2} = 0
    r = ScalarField.from_function(lambda z1, z2: q1_value(z1, z2) ** 2)
    f = transport_integral(r, 48)
    z1, z2 = default_offaxis_points(8, seed=42)
    got = poisson_bracket_fd_values(f, q1_field(), z1, z2, 1e-4)
    want = r.sample(z1, z2)
    assert np.max(np.abs(got - want)) < 1e-6
    got2 = poisson_bracket_fd_values(f, q2_field(), z1, z2, 1e-4)
    assert np.max(np.abs(got2)) < 1e-6


# -- finite-difference brackets ------------------------------------------------------

def test_fd_bracket_canonical_pair():
    xi1 = ScalarField.from_function(lambda z1, z2: np.real(z2))
    x1 = ScalarField.from_function(lambda z1, z2: np.real(z1))
    assert poisson_bracket_fd(xi1, x1, P) == pytest.approx(1.0, abs=1e-10)


def test_fd_bracket_model_pair_commutes():
    assert poisson_bracket_fd(q1_field(), q2_field(), P) == pytest.approx(0.0, abs=1e-10)


def test_fd_bracket_matches_exact_bracket():
    rng = rng_for(6, "fd-vs-exact")
    f = random_real_series(rng, degrees=(2, 3), terms_per_degree=2, order=3)
    g = random_real_series(rng, degrees=(2, 3), terms_per_degree=2, order=3)
    exact = poisson_bracket(f, g, 4)
    got = poisson_bracket_fd(ScalarField.from_series(f), ScalarField.from_series(g), P)
    assert got == pytest.approx(float(exact.evaluate(P.z1, P.z2).real), abs=1e-7)


# -- the composite solver --------------------------------------------------------------

def oracle_pair(g_series, order):
    r1 = poisson_bracket(g_series, q1_series(order), order)
    r2 = poisson_bracket(g_series, q2_series(order), order)
    return ScalarField.from_series(r1), ScalarField.from_series(r2)


def test_solver_zero_input():
    sol = solve_bracket_system(ScalarField.zero(), ScalarField.zero())
    assert sol.max_residual_q1 < 1e-12
    assert sol.max_residual_q2 < 1e-12
    assert sol.phi2(0.2, 0.3) == pytest.approx(0.0)


def test_solver_on_x1_squared_oracle():
    # g = x1^2: r1 = -2 x1^2, r2 = 2 x1 x2; residuals verified, not f itself,
    # because solutions differ by kernel elements
    r1, r2 = oracle_pair(from_real_basis({(2, 0, 0, 0): 1}, 2), 4)
    sol = solve_bracket_system(r1, r2, QuadratureConfig(nodes=64, tolerance=1e-5))
    assert sol.max_residual_q1 < 1e-5
    assert sol.max_residual_q2 < 1e-5


def test_solver_pure_average_case():
    # r1 = 0, r2 = q2: everything sits in the average, phi2(c1, c2) = c2
    sol = solve_bracket_system(ScalarField.zero(), q2_field())
    assert sol.max_residual_q1 < 1e-8
    assert sol.max_residual_q2 < 1e-8
    assert sol.phi2(0.25, -0.6) == pytest.approx(-0.6, abs=1e-12)


def test_solver_phi2_matches_direct_average():
    g = from_real_basis({(1, 1, 0, 0): 1, (0, 0, 2, 0): -1}, 3)
    r1, r2 = oracle_pair(g, 4)
    sol = solve_bracket_system(r1, r2)
    z1, z2 = default_offaxis_points(12, seed=7)
    direct = circle_average(r2, 64).sample(z1, z2)
    through_section = sol.phi2(q1_value(z1, z2), q2_value(z1, z2))
    assert np.max(np.abs(direct - through_section)) < 1e-8


def test_solver_rejects_incompatible_pair():
    # r1 = x1, r2 = 0 violates the cross-commuting relation
    with pytest.raises(CrossCommutingViolation):
        solve_bracket_system(field_of({(1, 0, 0, 0): 1}, 1), ScalarField.zero())


def test_solver_reports_verification_failure():
    # skipping the compatibility check funnels an unsolvable pair through the
    # constructions, whose residuals must then fail loudly
    with pytest.raises(VerificationFailure):
        solve_bracket_system(field_of({(1, 0, 0, 0): 1}, 1), ScalarField.zero(),
                             check_cross_commuting=False)
