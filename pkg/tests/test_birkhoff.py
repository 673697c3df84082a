from fractions import Fraction

import pytest

from focusfocus.birkhoff import (
    LeadingMatrix,
    SystemSpec,
    birkhoff_normalize,
    commutation_residual,
    exp_ad,
    extract_leading,
    homological_step,
    reduce_leading,
    resonant_to_bivariate,
)
from focusfocus.errors import (
    CocycleViolation,
    DegenerateLeading,
    GeneratorTooLow,
    NonCommuting,
    NonCritical,
    NonResonantTerm,
)
from focusfocus.rationals import GaussianRational, I
from focusfocus.sampling import random_generator_series, random_real_series, rng_for
from focusfocus.series import (
    BivariateSeries,
    FormalSeries,
    from_real_basis,
    mul,
    poisson_bracket,
    q1_series,
    q2_series,
)

T1 = lambda n: BivariateSeries.variable(1, n)
T2 = lambda n: BivariateSeries.variable(2, n)


def x1_cubed(order=5):
    return from_real_basis({(3, 0, 0, 0): 1}, order)


# -- leading part -------------------------------------------------------------

def test_extract_leading_reads_off_matrix():
    f1 = q1_series(4).scale(2) + q2_series(4) + x1_cubed(4)
    f2 = q1_series(4) + q2_series(4)
    m = extract_leading(f1, f2)
    assert (m.a, m.b, m.c, m.d) == (2, 1, 1, 1)


def test_extract_leading_singular_pair():
    with pytest.raises(DegenerateLeading):
        extract_leading(q1_series(2), q1_series(2).scale(2))


def test_extract_leading_noncritical():
    f1 = q1_series(2) + from_real_basis({(1, 0, 0, 0): 1}, 2)
    with pytest.raises(NonCritical):
        extract_leading(f1, q2_series(2))


def test_extract_leading_rejects_non_model_quadratic():
    f1 = q1_series(2) + from_real_basis({(2, 0, 0, 0): 1}, 2)
    with pytest.raises(DegenerateLeading):
        extract_leading(f1, q2_series(2))


def test_reduce_leading_normalizes_quadratic_parts():
    f1 = q1_series(4).scale(2) + q2_series(4)
    f2 = q1_series(4) + q2_series(4)
    spec = SystemSpec(f1, f2, 4)
    reduced = reduce_leading(spec, extract_leading(f1, f2))
    assert reduced.f1 == q1_series(4)
    assert reduced.f2 == q2_series(4)


def test_reduce_leading_identity_matrix():
    spec = SystemSpec(q1_series(3), q2_series(3), 3)
    m = LeadingMatrix(Fraction(1), Fraction(0), Fraction(0), Fraction(1))
    reduced = reduce_leading(spec, m)
    assert reduced.f1 == spec.f1 and reduced.f2 == spec.f2


def test_reduce_leading_swap():
    # F = (q2 + x1^3, q1) with the swap matrix reduces to (q1, q2 + x1^3)
    f1 = q2_series(5) + x1_cubed()
    f2 = q1_series(5)
    m = LeadingMatrix(Fraction(0), Fraction(1), Fraction(1), Fraction(0))
    reduced = reduce_leading(SystemSpec(f1, f2, 5), m)
    assert reduced.f1 == q1_series(5)
    assert reduced.f2 == q2_series(5) + x1_cubed()


# -- exp_ad -------------------------------------------------------------------

def test_exp_ad_zero_generator():
    f = q1_series(5) + x1_cubed()
    assert exp_ad(FormalSeries.zero(5), f, 5) == f


def test_exp_ad_resonant_generator_fixes_q1():
    a = mul(q1_series(4), q2_series(4), 4)   # resonant, degree 4
    assert exp_ad(a, q1_series(4), 4) == q1_series(4)


def test_exp_ad_x1_cubed_on_model_pair():
    # single surviving bracket, checked by hand Leibniz expansion
    a = x1_cubed()
    got1 = exp_ad(a, q1_series(5), 5)
    assert got1 == q1_series(5) - x1_cubed().scale(3)
    got2 = exp_ad(a, q2_series(5), 5)
    want2 = q2_series(5) + from_real_basis({(2, 0, 1, 0): 3}, 5)  # +3 x1^2 x2
    assert got2 == want2


def test_exp_ad_rejects_low_generator():
    with pytest.raises(GeneratorTooLow):
        exp_ad(q1_series(3), q2_series(3), 3)


def test_exp_ad_is_poisson_morphism():
    # {exp_ad f, exp_ad g} = exp_ad {f, g} at margin-safe truncation
    rng = rng_for(5, "morphism-unit")
    order = 10
    a = random_generator_series(rng, order, degrees=(3,), terms_per_degree=3)
    f = random_real_series(rng, degrees=(2, 3, 4), terms_per_degree=2, order=4)
    g = random_real_series(rng, degrees=(2, 4), terms_per_degree=2, order=4)
    lhs = poisson_bracket(exp_ad(a, f, order), exp_ad(a, g, order), order)
    rhs = exp_ad(a, poisson_bracket(f, g, order), order)
    margin = order - (4 + 4 - 2)
    assert lhs.truncate(margin) == rhs.truncate(margin)


# -- homological step -----------------------------------------------------------

def test_homological_step_zero_input():
    step = homological_step(FormalSeries.zero(3), FormalSeries.zero(3), 3)
    assert step.generator.is_zero()
    assert step.g1.is_zero() and step.g2.is_zero()


def test_homological_step_resonant_passthrough():
    r1 = mul(q1_series(4), q1_series(4), 4)   # q1^2, resonant
    step = homological_step(r1, FormalSeries.zero(4), 4)
    assert step.generator.is_zero()
    assert step.g1 == BivariateSeries({(2, 0): 1}, 2)
    assert step.g2.is_zero()


def test_homological_step_x1_cubed_remainder():
    # r1 = x1^3: all four monomials have weight1 = 3; the step must solve
    # {A, q1} + r1 = 0 exactly, which forces A = r1 / 3 on each monomial
    r1 = x1_cubed(3)
    r2 = FormalSeries({m: c * (I * m.weight2()) / m.weight1()
                       for m, c in r1.terms()}, 3)   # forced by the cocycle
    step = homological_step(r1, r2, 3)
    assert step.g1.is_zero() and step.g2.is_zero()
    assert step.generator == r1.scale(Fraction(1, 3))
    # postcondition: the new degree-3 contribution cancels both remainders
    assert (poisson_bracket(step.generator, q1_series(3), 3) + r1).is_zero()
    assert (poisson_bracket(step.generator, q2_series(3), 3) + r2).is_zero()


def test_homological_step_detects_cocycle_violation():
    r1 = x1_cubed(3)
    r2 = FormalSeries.zero(3)   # incompatible: cocycle forces r2 != 0 here
    with pytest.raises(CocycleViolation):
        homological_step(r1, r2, 3)


def test_homological_step_solution_is_forced_off_resonance():
    # perturbing the generator on any monomial with weight1 != 0 breaks the
    # postcondition that the remainder is absorbed
    r1 = x1_cubed(3)
    r2 = FormalSeries({m: c * (I * m.weight2()) / m.weight1()
                       for m, c in r1.terms()}, 3)
    step = homological_step(r1, r2, 3)
    index = next(m for m, _ in step.generator.terms() if m.weight1() != 0)
    perturbed = step.generator + FormalSeries.monomial(index, Fraction(1, 7), 3)
    residual = poisson_bracket(perturbed, q1_series(3), 3) + r1
    assert not residual.is_zero()
    assert any(not m.is_resonant() for m, _ in residual.terms())


# -- resonant_to_bivariate --------------------------------------------------------

def test_resonant_to_bivariate_q1():
    assert resonant_to_bivariate(q1_series(2)) == T1(1)


def test_resonant_to_bivariate_q1q2_cross_terms():
    f = mul(q1_series(4), q2_series(4), 4)
    assert resonant_to_bivariate(f) == BivariateSeries({(1, 1): 1}, 2)


def test_resonant_to_bivariate_rejects_nonresonant():
    with pytest.raises(NonResonantTerm):
        resonant_to_bivariate(FormalSeries.monomial((3, 0, 0, 0), order=3))


def test_resonant_to_bivariate_rejects_nonreal():
    from focusfocus.errors import NonRealCoefficient
    # the bare monomial zbar1*z2 is resonant but not real-valued
    with pytest.raises(NonRealCoefficient):
        resonant_to_bivariate(FormalSeries.monomial((0, 1, 1, 0), order=2))


def test_resonant_to_bivariate_inverts_compose():
    g = BivariateSeries({(1, 0): Fraction(1), (2, 0): Fraction(-2, 3),
                         (1, 1): Fraction(1, 5), (0, 3): Fraction(4, 7)}, 3)
    assert resonant_to_bivariate(g.compose(6)) == g


# -- the full normalization -------------------------------------------------------

def test_normalize_model_pair_is_fixed():
    res = birkhoff_normalize(SystemSpec(q1_series(4), q2_series(4), 4))
    assert res.generator.is_zero()
    assert res.g1 == T1(2) and res.g2 == T2(2)
    assert res.leading.is_identity()


def test_normalize_resonant_input_passes_through():
    f1 = q1_series(4) + mul(q1_series(4), q2_series(4), 4)
    res = birkhoff_normalize(SystemSpec(f1, q2_series(4), 4))
    assert res.generator.is_zero()
    assert res.g1 == BivariateSeries({(1, 0): 1, (1, 1): 1}, 2)
    assert res.g2 == T2(2)


def test_normalize_x1_cubed_roundtrip():
    n = 5
    a0 = x1_cubed(n)
    f1 = exp_ad(a0, q1_series(n), n)
    f2 = exp_ad(a0, q2_series(n), n)
    res = birkhoff_normalize(SystemSpec(f1, f2, n))
    assert res.g1 == T1(2) and res.g2 == T2(2)
    # the generator need not equal a0, but must normalize the pair exactly
    assert exp_ad(res.generator, f1, n) == q1_series(n)
    assert exp_ad(res.generator, f2, n) == q2_series(n)


def test_normalize_roundtrip_with_nontrivial_normal_form():
    # f_i = exp_ad(A0, h_i(q1, q2)): the engine must recover g_i = h_i exactly
    n = 6
    rng = rng_for(8, "mixed-oracle")
    a0 = random_generator_series(rng, n, degrees=(3, 4), terms_per_degree=2)
    h1 = BivariateSeries({(1, 0): 1, (2, 0): Fraction(1, 2), (1, 1): Fraction(-1, 3)}, 3)
    h2 = BivariateSeries({(0, 1): 1, (0, 2): Fraction(2, 7)}, 3)
    f1 = exp_ad(a0, h1.compose(n), n)
    f2 = exp_ad(a0, h2.compose(n), n)
    res = birkhoff_normalize(SystemSpec(f1, f2, n))
    assert res.g1 == h1.with_truncation(3)
    assert res.g2 == h2.with_truncation(3)
    assert (exp_ad(res.generator, f1, n) - res.g1.compose(n)).is_zero()


def test_normalize_with_nontrivial_leading_matrix():
    n = 5
    a0 = x1_cubed(n)
    g1 = exp_ad(a0, q1_series(n), n)
    g2 = exp_ad(a0, q2_series(n), n)
    f1 = g1.scale(2) + g2                      # leading matrix (2 1; 1 1)
    f2 = g1 + g2
    res = birkhoff_normalize(SystemSpec(f1, f2, n))
    assert (res.leading.a, res.leading.b, res.leading.c, res.leading.d) == (2, 1, 1, 1)
    assert res.g1 == T1(2) and res.g2 == T2(2)
    # normal forms of the caller's components combine through the matrix
    assert res.normal_form_of_input(1) == BivariateSeries({(1, 0): 2, (0, 1): 1}, 2)
    assert res.normal_form_of_input(2) == BivariateSeries({(1, 0): 1, (0, 1): 1}, 2)
    # and the headline identity holds for the original components
    want1 = res.normal_form_of_input(1).compose(n)
    assert exp_ad(res.generator, f1, n) == want1


def test_normalize_rejects_noncommuting_pair():
    f2 = q2_series(5) + x1_cubed()
    with pytest.raises(NonCommuting):
        birkhoff_normalize(SystemSpec(q1_series(5), f2, 5))
    assert not commutation_residual(q1_series(5), f2, 5).is_zero()


def test_normalize_random_roundtrips_residual_zero():
    for k, n in ((0, 5), (1, 6)):
        rng = rng_for(100 + k, "unit-roundtrip")
        a0 = random_generator_series(rng, n, degrees=(3, 4), terms_per_degree=2)
        f1 = exp_ad(a0, q1_series(n), n)
        f2 = exp_ad(a0, q2_series(n), n)
        res = birkhoff_normalize(SystemSpec(f1, f2, n))
        assert res.g1 == T1(n // 2) and res.g2 == T2(n // 2)
        assert (exp_ad(res.generator, f1, n) - res.g1.compose(n)).is_zero()
        assert (exp_ad(res.generator, f2, n) - res.g2.compose(n)).is_zero()
        assert res.generator.is_real_valued()
        md = res.generator.min_degree()
        assert md is None or md >= 3


def test_normalize_ledger_accounts_each_degree():
    n = 5
    f1 = exp_ad(x1_cubed(n), q1_series(n), n)
    f2 = exp_ad(x1_cubed(n), q2_series(n), n)
    res = birkhoff_normalize(SystemSpec(f1, f2, n))
    degrees = [e.degree for e in res.ledger]
    assert degrees == [3, 4, 5]
    assert res.ledger[0].remainder_terms == (4, 4)
    assert res.ledger[0].generator_terms == 4
