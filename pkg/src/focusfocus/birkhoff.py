"""Degree-by-degree normalization of a commuting pair at a focus-focus point.

Given real-valued series f1, f2 with invertible quadratic parts spanned by
the model pair (q1, q2) and {f1, f2} = 0 through the truncation order, the
engine produces a real generator A of lowest degree >= 3 and bivariate
series g1, g2 with

    exp(ad_A) f_i = g_i(q1, q2)        exactly through the truncation order,

where ad_A = {A, .}.  Each homogeneous degree is solved coefficientwise in
the complex monomial basis: at a monomial with weights (w1, w2) the two
equations read

    r1_m - w1 * A_m = g1_m,      r2_m - i * w2 * A_m = g2_m,

so A_m = r1_m / w1 when w1 != 0, else A_m = r2_m / (i w2) when w2 != 0, and
monomials with w1 = w2 = 0 (the resonant ones, a1 = b2 and a2 = b1) pass
straight into the normal form.  Compatibility of the two choices is exactly
the cross-commuting relation i * w2 * r1_m = w1 * r2_m, which is checked at
every index and reported as CocycleViolation when it fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import (
    CocycleViolation,
    DegenerateLeading,
    GeneratorTooLow,
    NonCommuting,
    NonCritical,
    NonRealCoefficient,
    NonResonantTerm,
    ValidationError,
)
from .indices import MultiIndex, pack, packed_weight1, packed_weight2
from .rationals import GaussianRational, I, ZERO
from .series import BivariateSeries, FormalSeries, poisson_bracket

_KEY_QBAR_PART = pack(1, 0, 0, 1)   # z1 * zbar2, the conjugate-of-q monomial
_KEY_Q_PART = pack(0, 1, 1, 0)      # zbar1 * z2, the q monomial


@dataclass(frozen=True)
class SystemSpec:
    """Input pair and requested truncation order."""

    f1: FormalSeries
    f2: FormalSeries
    order: int

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("truncation order must be at least 2")
        object.__setattr__(self, "f1", self.f1.truncate(self.order))
        object.__setattr__(self, "f2", self.f2.truncate(self.order))


@dataclass(frozen=True)
class LeadingMatrix:
    """Coefficients of the quadratic parts over (q1, q2): f1 = a q1 + b q2 + ...,
    f2 = c q1 + d q2 + ..."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def determinant(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def rows(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        return ((self.a, self.b), (self.c, self.d))

    def is_identity(self) -> bool:
        return (self.a, self.b, self.c, self.d) == (1, 0, 0, 1)

    def inverse_apply(self, f1: FormalSeries, f2: FormalSeries):
        """Componentwise M^-1 (f1, f2), exactly."""
        det = self.determinant()
        if det == 0:
            raise DegenerateLeading("leading matrix is singular")
        g1 = f1.scale(Fraction(self.d, 1) / det) + f2.scale(Fraction(-self.b, 1) / det)
        g2 = f1.scale(Fraction(-self.c, 1) / det) + f2.scale(Fraction(self.a, 1) / det)
        return g1, g2


def _leading_coefficients(f: FormalSeries, label: str) -> tuple[Fraction, Fraction]:
    md = f.min_degree()
    if md is not None and md < 2:
        raise NonCritical(f"{label} has terms of degree < 2")
    part = f.homogeneous_part(2)
    for index, _ in part.terms():
        key = index.pack()
        if key not in (_KEY_Q_PART, _KEY_QBAR_PART):
            raise DegenerateLeading(
                f"{label} quadratic part has the non-model monomial z^{tuple(index)}")
    c_q = part.coeff(_KEY_Q_PART)
    c_qbar = part.coeff(_KEY_QBAR_PART)
    a = c_q + c_qbar
    b = I * (c_q - c_qbar)
    if not (a.is_real() and b.is_real()):
        raise DegenerateLeading(f"{label} quadratic part is not real")
    return a.re, b.re


def extract_leading(f1: FormalSeries, f2: FormalSeries) -> LeadingMatrix:
    """Read off the invertible 2x2 matrix of quadratic parts over (q1, q2)."""
    a, b = _leading_coefficients(f1, "f1")
    c, d = _leading_coefficients(f2, "f2")
    matrix = LeadingMatrix(a, b, c, d)
    if matrix.determinant() == 0:
        raise DegenerateLeading("quadratic parts are linearly dependent")
    return matrix


def reduce_leading(spec: SystemSpec, matrix: LeadingMatrix) -> SystemSpec:
    """Left-compose the pair with the inverse leading matrix, so the
    quadratic parts become exactly (q1, q2)."""
    g1, g2 = matrix.inverse_apply(spec.f1, spec.f2)
    return SystemSpec(g1, g2, spec.order)


def exp_ad(generator: FormalSeries, f: FormalSeries, order: int) -> FormalSeries:
    """sum_k ad_A^k(f) / k!, truncated at `order`.

    Finite because the generator has lowest degree >= 3, so each bracket
    raises the minimum degree by at least one.
    """
    md = generator.min_degree()
    if md is not None and md < 3:
        raise GeneratorTooLow(f"generator has terms of degree {md} < 3")
    total = f.truncate(order)
    term = total
    for k in range(1, order + 2):
        term = poisson_bracket(generator, term, order).scale(Fraction(1, k))
        if term.is_zero():
            return total
        total = total + term
    raise RuntimeError("exp_ad failed to terminate; filtration violated")


@lru_cache(maxsize=None)
def _q_monomial_bivariate(lam: int, mu: int) -> tuple:
    """(t1 + i t2)^lam * (t1 - i t2)^mu expanded over t1^k t2^l, exactly."""
    out: dict[tuple[int, int], GaussianRational] = {}
    for j in range(lam + 1):
        cj = GaussianRational(comb(lam, j)) * (I ** j if j else GaussianRational(1))
        for m in range(mu + 1):
            cm = GaussianRational(comb(mu, m)) * ((-I) ** m if m else GaussianRational(1))
            expo = (lam - j + mu - m, j + m)
            c = cj * cm
            prev = out.get(expo)
            s = c if prev is None else prev + c
            if s.is_zero():
                out.pop(expo, None)
            else:
                out[expo] = s
    return tuple(sorted(out.items()))


def resonant_to_bivariate(f: FormalSeries) -> BivariateSeries:
    """Rewrite a resonant-supported series as a real polynomial in (t1, t2).

    Resonant monomials are (zbar1 z2)^lam (z1 zbar2)^mu; substituting
    q = t1 + i t2 and collecting must yield real coefficients when the input
    is real-valued.
    """
    acc: dict[tuple[int, int], GaussianRational] = {}
    for index, coeff in f.terms():
        if not index.is_resonant():
            raise NonResonantTerm(f"monomial z^{tuple(index)} is not resonant")
        lam, mu = index.a2, index.a1
        for expo, c in _q_monomial_bivariate(lam, mu):
            v = coeff * c
            prev = acc.get(expo)
            s = v if prev is None else prev + v
            if s.is_zero():
                acc.pop(expo, None)
            else:
                acc[expo] = s
    terms: dict[tuple[int, int], Fraction] = {}
    for expo, c in acc.items():
        if not c.is_real():
            raise NonRealCoefficient(
                f"coefficient of t1^{expo[0]} t2^{expo[1]} is {c!r}")
        terms[expo] = c.re
    return BivariateSeries(terms, f.truncation_order // 2)


@dataclass(frozen=True)
class HomologicalStep:
    """Solution of one homogeneous degree of the cohomological system."""

    generator: FormalSeries
    g1: BivariateSeries
    g2: BivariateSeries


def homological_step(r1: FormalSeries, r2: FormalSeries, degree: int) -> HomologicalStep:
    """Solve {A_d, q_i} + r_i = g_i(q1, q2) for one homogeneous degree.

    Parameters
    ----------
    r1, r2 : FormalSeries
        Homogeneous remainders of the given degree satisfying the
        cross-commuting relation i*weight2(m)*r1_m = weight1(m)*r2_m.
    degree : int
        Common homogeneous degree of the remainders.

    Returns
    -------
    HomologicalStep
        Generator piece (zero on doubly-resonant monomials) and the bivariate
        contributions absorbed into the normal forms.

    Raises
    ------
    CocycleViolation
        If the cross-commuting relation fails at some monomial; this means
        the input pair did not commute (or an upstream arithmetic bug).
    """
    for r in (r1, r2):
        bad = [m for m, _ in r.terms() if m.degree() != degree]
        if bad:
            raise ValueError(f"remainder is not homogeneous of degree {degree}: {bad[0]}")
    keys = set(r1._terms) | set(r2._terms)
    gen: dict[int, GaussianRational] = {}
    res1: dict[int, GaussianRational] = {}
    res2: dict[int, GaussianRational] = {}
    for k in sorted(keys):
        c1 = r1._terms.get(k, ZERO)
        c2 = r2._terms.get(k, ZERO)
        w1 = packed_weight1(k)
        w2 = packed_weight2(k)
        if c1 * (I * w2) != c2 * w1:
            raise CocycleViolation(MultiIndex.from_packed(k))
        if w1 != 0:
            a = c1 / w1
            if not a.is_zero():
                gen[k] = a
        elif w2 != 0:
            a = c2 / (I * w2)
            if not a.is_zero():
                gen[k] = a
        else:
            # doubly resonant: the generator coefficient is a free choice,
            # fixed to zero for determinism
            if not c1.is_zero():
                res1[k] = c1
            if not c2.is_zero():
                res2[k] = c2
    g1 = resonant_to_bivariate(FormalSeries._raw(res1, degree))
    g2 = resonant_to_bivariate(FormalSeries._raw(res2, degree))
    return HomologicalStep(FormalSeries._raw(gen, degree), g1, g2)


@dataclass(frozen=True)
class DegreeLedgerEntry:
    """Exact per-degree accounting of one induction step."""

    degree: int
    remainder_terms: tuple[int, int]
    resonant_terms: tuple[int, int]
    generator_terms: int


@dataclass(frozen=True)
class NormalFormResult:
    """Output of `birkhoff_normalize`.

    `g1`, `g2` are the normal forms of the *reduced* pair (quadratic parts
    exactly q1, q2), so g1 = t1 + higher and g2 = t2 + higher; `leading`
    maps them back to the caller's components.
    """

    generator: FormalSeries
    g1: BivariateSeries
    g2: BivariateSeries
    leading: LeadingMatrix
    ledger: tuple[DegreeLedgerEntry, ...]
    order: int

    def normal_form_of_input(self, which: int) -> BivariateSeries:
        """Bivariate normal form of the original f1 (which=1) or f2 (which=2)."""
        row = self.leading.rows()[which - 1]
        return self.g1.scale(row[0]) + self.g2.scale(row[1])


def commutation_residual(f1: FormalSeries, f2: FormalSeries, order: int) -> FormalSeries:
    """{f1, f2} truncated at `order`; zero iff the pair commutes through it."""
    return poisson_bracket(f1, f2, order)


def birkhoff_normalize(spec: SystemSpec) -> NormalFormResult:
    """Run the full induction and verify the final residual is exactly zero.

    Raises NonCritical / DegenerateLeading for bad quadratic parts,
    ValidationError for non-real input, NonCommuting when {f1, f2} != 0
    through the truncation order, and propagates CocycleViolation (which,
    for commuting input, can only signal an internal arithmetic bug).
    """
    order = spec.order
    matrix = extract_leading(spec.f1, spec.f2)
    for label, f in (("f1", spec.f1), ("f2", spec.f2)):
        if not f.is_real_valued():
            raise ValidationError(f"{label} is not a real-valued series")
    bracket = commutation_residual(spec.f1, spec.f2, order)
    if not bracket.is_zero():
        raise NonCommuting(
            f"{{f1, f2}} has {len(bracket)} nonzero coefficients through degree {order}")
    reduced1, reduced2 = matrix.inverse_apply(spec.f1, spec.f2)

    generator = FormalSeries.zero(order)
    g1 = BivariateSeries.variable(1, order // 2)
    g2 = BivariateSeries.variable(2, order // 2)
    ledger: list[DegreeLedgerEntry] = []
    for d in range(3, order + 1):
        h1 = exp_ad(generator, reduced1, d)
        h2 = exp_ad(generator, reduced2, d)
        rem1 = h1 - g1.compose(d)
        rem2 = h2 - g2.compose(d)
        for rem in (rem1, rem2):
            md = rem.min_degree()
            if md is not None and md < d:
                raise RuntimeError(
                    f"induction invariant broken at degree {d}: residual starts at {md}")
        step = homological_step(rem1.homogeneous_part(d), rem2.homogeneous_part(d), d)
        generator = generator + step.generator.truncate(order)
        g1 = g1 + step.g1.with_truncation(order // 2)
        g2 = g2 + step.g2.with_truncation(order // 2)
        ledger.append(DegreeLedgerEntry(
            degree=d,
            remainder_terms=(len(rem1), len(rem2)),
            resonant_terms=(len(step.g1.terms()), len(step.g2.terms())),
            generator_terms=len(step.generator),
        ))

    final1 = exp_ad(generator, reduced1, order) - g1.compose(order)
    final2 = exp_ad(generator, reduced2, order) - g2.compose(order)
    if not (final1.is_zero() and final2.is_zero()):
        raise RuntimeError("normalization left a nonzero residual; arithmetic bug")
    return NormalFormResult(
        generator=generator,
        g1=g1,
        g2=g2,
        leading=matrix,
        ledger=tuple(ledger),
        order=order,
    )
