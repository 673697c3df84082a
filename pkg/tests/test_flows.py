import math

import numpy as np
import pytest

from focusfocus.errors import StepOverflow
from focusfocus.fields import PhasePoint, q1_value, q2_value
from focusfocus.flows import (
    FlowSpec,
    action_integral,
    exact_flow,
    liouville_pairing,
    numeric_flow,
    q1_flow,
    q2_flow,
    run_flow,
    taylor_flow_check,
)
from focusfocus.sampling import random_ball_points, random_generator_series, rng_for
from focusfocus.series import FormalSeries, from_real_basis, q1_series, q2_series

Z = PhasePoint.from_z(0.8 - 0.2j, 0.3 + 0.5j)


# -- exact model flows ---------------------------------------------------------

def test_q1_flow_scales_hyperbolically():
    out = q1_flow(math.log(2), PhasePoint.from_z(1, 1))
    assert out.z1 == pytest.approx(2.0)
    assert out.z2 == pytest.approx(0.5)


def test_q2_flow_is_periodic():
    out = q2_flow(2 * math.pi, Z)
    assert out.z1 == pytest.approx(Z.z1, abs=1e-15)
    assert out.z2 == pytest.approx(Z.z2, abs=1e-15)


def test_exact_flows_preserve_model_values():
    for which, t in (("q1", 0.7), ("q2", 1.9)):
        moved = exact_flow(which, t, Z)
        assert q1_value(moved.z1, moved.z2) == pytest.approx(q1_value(Z.z1, Z.z2),
                                                             rel=1e-14)
        assert q2_value(moved.z1, moved.z2) == pytest.approx(q2_value(Z.z1, Z.z2),
                                                             rel=1e-14)


def test_flow_group_law():
    for which in ("q1", "q2"):
        a = exact_flow(which, 0.3 + 0.4, Z)
        b = exact_flow(which, 0.3, exact_flow(which, 0.4, Z))
        assert a.as_array() == pytest.approx(b.as_array(), abs=1e-14)


def test_exact_flow_rejects_unknown_tag():
    with pytest.raises(ValueError):
        exact_flow("q3", 1.0, Z)


# -- numeric integration ---------------------------------------------------------

def test_numeric_flow_matches_exact_q1():
    got = numeric_flow(q1_series(2), 1.0, PhasePoint.from_z(1, 1), steps=1000)
    assert abs(got.z1 - math.e) < 1e-8
    assert abs(got.z2 - 1 / math.e) < 1e-8


def test_numeric_flow_q2_periodicity():
    got = numeric_flow(q2_series(2), 2 * math.pi, Z, steps=1000)
    assert abs(got.z1 - Z.z1) < 1e-8
    assert abs(got.z2 - Z.z2) < 1e-8


def test_numeric_flow_conserves_energy():
    h = q1_series(4) + from_real_basis({(3, 0, 0, 0): 1, (0, 2, 1, 0): -2}, 4)
    start = float(h.evaluate(Z.z1, Z.z2).real)
    state = Z
    for _ in range(5):
        state = numeric_flow(h, 0.2, state, steps=200)
    end = float(h.evaluate(state.z1, state.z2).real)
    assert end == pytest.approx(start, rel=1e-8)


def test_numeric_flow_overflow():
    # the q1-flow grows like e^t; a huge time escapes any bound
    with pytest.raises(StepOverflow):
        numeric_flow(q1_series(2), 40.0, PhasePoint.from_z(1, 1), steps=400,
                     overflow=1e6)


def test_run_flow_dispatch():
    spec = FlowSpec("q1", math.log(2))
    assert run_flow(spec, PhasePoint.from_z(1, 1)).z1 == pytest.approx(2.0)
    spec2 = FlowSpec(q1_series(2), math.log(2), steps=500)
    assert run_flow(spec2, PhasePoint.from_z(1, 1)).z1 == pytest.approx(2.0, abs=1e-9)


# -- Liouville pairing -------------------------------------------------------------

def test_liouville_pairing_q2():
    assert liouville_pairing(q2_series(2)) == q2_series(2)


def test_liouville_pairing_xi1_squared():
    f = from_real_basis({(0, 2, 0, 0): 1}, 2)
    assert liouville_pairing(f) == f.scale(2)


def test_liouville_pairing_kills_x_only_terms():
    f = from_real_basis({(1, 0, 0, 0): 1}, 1)
    assert liouville_pairing(f).is_zero()


def test_liouville_pairing_euler_identity_randomized():
    # xi-homogeneous series of xi-degree n <= 4: pairing equals n * series
    rng = rng_for(12, "euler")
    for n in range(5):
        terms = {}
        for _ in range(4):
            i = int(rng.integers(0, 3))
            k = int(rng.integers(0, 3))
            j = int(rng.integers(0, n + 1))
            expo = (i, j, k, n - j)
            terms[expo] = terms.get(expo, 0) + 1
        f = from_real_basis(terms, 8)
        assert liouville_pairing(f) == f.scale(n)


# -- loop action --------------------------------------------------------------------

def test_action_integral_unit_point():
    assert action_integral(PhasePoint.from_z(1, 1j)) == pytest.approx(1.0, abs=1e-10)


def test_action_integral_origin_is_zero():
    assert action_integral(PhasePoint(0, 0, 0, 0)) == 0.0


def test_action_integral_equals_q2_at_random_points():
    rng = rng_for(18, "action-unit")
    z1s, z2s = random_ball_points(rng, 50, 1.0)
    for a, b in zip(z1s, z2s):
        k = action_integral(PhasePoint.from_z(a, b))
        assert abs(k - q2_value(a, b)) <= 1e-10


def test_action_integral_invariant_under_circle_flow():
    for s in (0.4, 1.7, 5.0):
        moved = q2_flow(s, Z)
        assert abs(action_integral(moved) - action_integral(Z)) <= 1e-10


# -- order-of-contact scaling ---------------------------------------------------------

def test_taylor_check_zero_generator_has_exact_contact():
    report = taylor_flow_check(FormalSeries.zero(4), q1_series(4), 4, seed=3)
    assert report.exact_contact()
    assert report.passes()
    assert max(report.errors) <= report.noise_floor


def test_taylor_check_terminating_series_hits_integrator_floor():
    # generator x1^3: the bracket series for q1 terminates, so the flow
    # pullback equals the polynomial exactly and only integrator error remains
    a = from_real_basis({(3, 0, 0, 0): 1}, 5)
    report = taylor_flow_check(a, q1_series(5), 5, steps=600, seed=3)
    assert report.exact_contact()
    assert report.passes()


def test_taylor_check_generic_slope():
    rng = rng_for(21, "taylor-unit")
    a = random_generator_series(rng, 4, degrees=(3,), terms_per_degree=3)
    report = taylor_flow_check(a, q1_series(4), 4, seed=5)
    assert report.slope is not None
    assert report.slope >= 4.7
    assert report.passes(margin=0.3)
