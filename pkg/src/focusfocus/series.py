"""Sparse truncated formal power series over the complex monomial basis.

The phase space is R^4 with coordinates (x1, x2, xi1, xi2) and canonical
symplectic form d(xi1)^d(x1) + d(xi2)^d(x2).  Series are stored over the
complex monomial basis built from

    z1 = x1 + i*x2,   z2 = xi1 + i*xi2,

because the model pair

    q1 = x1*xi1 + x2*xi2,   q2 = x1*xi2 - x2*xi1,    q = q1 + i*q2 = zbar1*z2

acts diagonally there: {q1, z^m} = weight1(m) * z^m and
{q2, z^m} = i * weight2(m) * z^m.

Sign convention (prominent, since the opposite one is also common):

    {A, B} = dA/dxi1 * dB/dx1 + dA/dxi2 * dB/dx2
           - dA/dx1 * dB/dxi1 - dA/dx2 * dB/dxi2

so that {xi1, x1} = 1 and {q1, z1} = z1.  Pushed through the basis change,
this canonical formula becomes, for arbitrary complex coefficients,

    {A, B} = 2 * ( A_z2 * B_zbar1 + A_zbar2 * B_z1
                 - A_z1 * B_zbar2 - A_zbar1 * B_z2 )

which is what `poisson_bracket` computes.  `poisson_bracket_real_route`
evaluates the same bracket literally in the real basis; the two agree
exactly on every series and the test suite asserts it.

Coefficients are exact Gaussian rationals; every operation that could
create a term above the truncation order discards it.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, reduce
from math import lcm
from typing import Iterable, Mapping

import numpy as np

from .indices import (
    MultiIndex,
    as_packed,
    pack,
    packed_conjugate,
    packed_degree,
    unpack,
)
from .rationals import GaussianRational, I, ONE, ZERO

MAX_TRUNCATION = 100

_VAR_Z1, _VAR_Z2, _VAR_ZB1, _VAR_ZB2 = 0, 1, 2, 3
_VAR_SHIFT = (1, 1 << 8, 1 << 16, 1 << 24)


def _coerce_coeff(value) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(value)
    raise TypeError(f"cannot use {value!r} as a series coefficient")


class FormalSeries:
    """Truncated formal power series with exact coefficients.

    Immutable.  `terms` maps exponent tuples (or MultiIndex, or packed keys)
    to coefficients; terms of degree above `truncation_order` are discarded,
    zero coefficients are never stored.
    """

    __slots__ = ("_terms", "truncation_order", "_scaled")

    def __init__(self, terms: Mapping, truncation_order: int):
        if truncation_order < 0 or truncation_order > MAX_TRUNCATION:
            raise ValueError(f"truncation order {truncation_order} out of range")
        clean: dict[int, GaussianRational] = {}
        for index, value in terms.items():
            coeff = _coerce_coeff(value)
            if coeff.is_zero():
                continue
            key = as_packed(index)
            if packed_degree(key) > truncation_order:
                continue
            clean[key] = coeff
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "truncation_order", truncation_order)
        object.__setattr__(self, "_scaled", None)

    def __setattr__(self, name, value):
        raise AttributeError("FormalSeries is immutable")

    @classmethod
    def _raw(cls, packed_terms: dict[int, GaussianRational], order: int) -> "FormalSeries":
        """Internal constructor: trusts keys/coefficients already normalized."""
        out = object.__new__(cls)
        object.__setattr__(out, "_terms", packed_terms)
        object.__setattr__(out, "truncation_order", order)
        object.__setattr__(out, "_scaled", None)
        return out

    @classmethod
    def zero(cls, order: int) -> "FormalSeries":
        return cls._raw({}, order)

    @classmethod
    def monomial(cls, index, coeff=1, order: int | None = None) -> "FormalSeries":
        key = as_packed(index)
        if order is None:
            order = packed_degree(key)
        return cls({key: coeff}, order)

    @classmethod
    def constant(cls, value, order: int) -> "FormalSeries":
        return cls({0: value}, order)

    # -- inspection ------------------------------------------------------

    def terms(self) -> list[tuple[MultiIndex, GaussianRational]]:
        """Terms sorted by (degree, exponents); deterministic."""
        items = [(MultiIndex.from_packed(k), c) for k, c in self._terms.items()]
        items.sort(key=lambda t: (t[0].degree(), t[0]))
        return items

    def coeff(self, index) -> GaussianRational:
        return self._terms.get(as_packed(index), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def min_degree(self) -> int | None:
        if not self._terms:
            return None
        return min(packed_degree(k) for k in self._terms)

    def max_degree(self) -> int | None:
        if not self._terms:
            return None
        return max(packed_degree(k) for k in self._terms)

    def homogeneous_part(self, degree: int) -> "FormalSeries":
        part = {k: c for k, c in self._terms.items() if packed_degree(k) == degree}
        return FormalSeries._raw(part, self.truncation_order)

    def truncate(self, order: int) -> "FormalSeries":
        if order >= self.truncation_order:
            return FormalSeries._raw(dict(self._terms), order)
        kept = {k: c for k, c in self._terms.items() if packed_degree(k) <= order}
        return FormalSeries._raw(kept, order)

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return (self.truncation_order == other.truncation_order
                and self._terms == other._terms)

    def same_terms(self, other: "FormalSeries") -> bool:
        """Equality of coefficients, ignoring the recorded truncation order."""
        return self._terms == other._terms

    def __repr__(self):
        inner = " + ".join(
            f"({c})*z^{tuple(m)}" for m, c in self.terms()[:6]
        ) or "0"
        extra = "" if len(self._terms) <= 6 else f" + ... [{len(self._terms)} terms]"
        return f"<FormalSeries O({self.truncation_order + 1}) {inner}{extra}>"

    # -- linear structure --------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        order = min(self.truncation_order, other.truncation_order)
        out = {k: c for k, c in self._terms.items() if packed_degree(k) <= order}
        for k, c in other._terms.items():
            if packed_degree(k) > order:
                continue
            prev = out.get(k)
            s = c if prev is None else prev + c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return FormalSeries._raw(out, order)

    def __neg__(self):
        return FormalSeries._raw({k: -c for k, c in self._terms.items()},
                                 self.truncation_order)

    def __sub__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, value) -> "FormalSeries":
        c = _coerce_coeff(value)
        if c.is_zero():
            return FormalSeries.zero(self.truncation_order)
        return FormalSeries._raw({k: v * c for k, v in self._terms.items()},
                                 self.truncation_order)

    def __mul__(self, other):
        if isinstance(other, FormalSeries):
            return mul(self, other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    # -- conjugation / reality ---------------------------------------------

    def conjugate(self) -> "FormalSeries":
        return FormalSeries._raw(
            {packed_conjugate(k): c.conjugate() for k, c in self._terms.items()},
            self.truncation_order,
        )

    def reality_residual(self) -> "FormalSeries":
        """f minus its reality symmetrization; zero iff f is real-valued.

        A series is real-valued iff coeff(m) == conj(coeff(swap m)) where
        swap exchanges the holomorphic and antiholomorphic exponents.
        """
        out: dict[int, GaussianRational] = {}
        half = GaussianRational(Fraction(1, 2))
        keys = set(self._terms)
        keys.update(packed_conjugate(k) for k in self._terms)
        for k in keys:
            c = self._terms.get(k, ZERO)
            cc = self._terms.get(packed_conjugate(k), ZERO)
            r = (c - cc.conjugate()) * half
            if not r.is_zero():
                out[k] = r
        return FormalSeries._raw(out, self.truncation_order)

    def is_real_valued(self) -> bool:
        return self.reality_residual().is_zero()

    # -- calculus ----------------------------------------------------------

    def derivative(self, var: int) -> "FormalSeries":
        """Partial derivative with respect to z1, z2, zbar1, zbar2 (var=0..3)."""
        shift = 8 * var
        step = _VAR_SHIFT[var]
        out = {}
        for k, c in self._terms.items():
            e = (k >> shift) & 0xFF
            if e:
                out[k - step] = c * e
        return FormalSeries._raw(out, max(self.truncation_order - 1, 0))

    def weighted_by_xi_degree(self) -> "FormalSeries":
        """xi1*d/dxi1 + xi2*d/dxi2 applied to the series.

        In the complex basis this is z2*d/dz2 + zbar2*d/dzbar2, i.e. each
        monomial is scaled by its total degree in (xi1, xi2).  Equals n*f
        on series homogeneous of degree n in the xi variables.
        """
        out = {}
        for k, c in self._terms.items():
            n = ((k >> 8) & 0xFF) + ((k >> 24) & 0xFF)
            if n:
                out[k] = c * n
        return FormalSeries._raw(out, self.truncation_order)

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, z1, z2):
        """Numeric value at z1 = x1 + i*x2, z2 = xi1 + i*xi2.

        Accepts scalars or numpy arrays (broadcast together); coefficients
        are converted to floating point.  Returns a complex scalar for
        scalar input, else a complex ndarray.
        """
        z1a = np.asarray(z1, dtype=complex)
        z2a = np.asarray(z2, dtype=complex)
        z1a, z2a = np.broadcast_arrays(z1a, z2a)
        total = np.zeros(z1a.shape, dtype=complex)
        if self._terms:
            z1c = np.conj(z1a)
            z2c = np.conj(z2a)
            pows = {}
            for base_id, base in (("z1", z1a), ("z2", z2a), ("c1", z1c), ("c2", z2c)):
                pows[base_id] = _power_table(base, self._max_exponent(base_id))
            for k, c in self._terms.items():
                a1, a2, b1, b2 = unpack(k)
                total += complex(c) * (pows["z1"][a1] * pows["z2"][a2]
                                       * pows["c1"][b1] * pows["c2"][b2])
        if total.ndim == 0:
            return complex(total)
        return total

    def _max_exponent(self, which: str) -> int:
        pos = {"z1": 0, "z2": 8, "c1": 16, "c2": 24}[which]
        if not self._terms:
            return 0
        return max((k >> pos) & 0xFF for k in self._terms)

    # -- internals -----------------------------------------------------------

    def _scaled_terms(self):
        """Common-denominator view: (den, [(degree, key, num_re, num_im)]).

        The list is sorted by degree so multiplication can stop early once
        the product degree would exceed the truncation order.  Cached; the
        cache is value-identical however many threads fill it.
        """
        cached = self._scaled
        if cached is not None:
            return cached
        if not self._terms:
            scaled = (1, [])
        else:
            den = reduce(lcm, (c.den for c in self._terms.values()), 1)
            rows = []
            for k, c in self._terms.items():
                m = den // c.den
                rows.append((packed_degree(k), k, c.num_re * m, c.num_im * m))
            rows.sort(key=lambda r: (r[0], r[1]))
            scaled = (den, rows)
        object.__setattr__(self, "_scaled", scaled)
        return scaled


def _power_table(base: np.ndarray, max_exp: int) -> list:
    table = [np.ones_like(base)]
    for _ in range(max_exp):
        table.append(table[-1] * base)
    return table


# -- ring operations ----------------------------------------------------------

def mul(f: FormalSeries, g: FormalSeries, order: int | None = None) -> FormalSeries:
    """Product with every term of degree above `order` discarded.

    `order` defaults to the smaller of the two truncation orders.
    """
    n = min(f.truncation_order, g.truncation_order) if order is None else order
    den_f, fa = f._scaled_terms()
    den_g, ga = g._scaled_terms()
    den = den_f * den_g
    acc: dict[int, list] = {}
    for d1, k1, a1, b1 in fa:
        dmax = n - d1
        if dmax < 0:
            break
        for d2, k2, a2, b2 in ga:
            if d2 > dmax:
                break
            k = k1 + k2
            re = a1 * a2 - b1 * b2
            im = a1 * b2 + b1 * a2
            e = acc.get(k)
            if e is None:
                acc[k] = [re, im]
            else:
                e[0] += re
                e[1] += im
    out = {}
    for k, (re, im) in acc.items():
        if re or im:
            out[k] = GaussianRational._make(re, im, den)
    return FormalSeries._raw(out, n)


def pow_truncated(f: FormalSeries, exponent: int, order: int) -> FormalSeries:
    if exponent < 0:
        raise ValueError("negative powers are not representable")
    result = FormalSeries.constant(1, order)
    base = f.truncate(order)
    e = exponent
    while e:
        if e & 1:
            result = mul(result, base, order)
        e >>= 1
        if e:
            base = mul(base, base, order)
    return result


def poisson_bracket(f: FormalSeries, g: FormalSeries,
                    order: int | None = None) -> FormalSeries:
    """Canonical Poisson bracket, truncated at `order`.

    Computed in the complex basis through the exact chain-rule image of the
    real-basis formula (see the module docstring for the sign convention).
    Satisfies {D_N, D_M} in D_{N+M-2} and {q1, z^m} = weight1(m) z^m.
    """
    n = min(f.truncation_order, g.truncation_order) if order is None else order
    f_z1 = f.derivative(_VAR_Z1)
    f_z2 = f.derivative(_VAR_Z2)
    f_b1 = f.derivative(_VAR_ZB1)
    f_b2 = f.derivative(_VAR_ZB2)
    g_z1 = g.derivative(_VAR_Z1)
    g_z2 = g.derivative(_VAR_Z2)
    g_b1 = g.derivative(_VAR_ZB1)
    g_b2 = g.derivative(_VAR_ZB2)
    total = (mul(f_z2, g_b1, n) + mul(f_b2, g_z1, n)
             - mul(f_z1, g_b2, n) - mul(f_b1, g_z2, n))
    return total.scale(2)


# -- model series ---------------------------------------------------------------

@lru_cache(maxsize=None)
def q1_series(order: int = 2) -> FormalSeries:
    """q1 = x1*xi1 + x2*xi2 = (zbar1*z2 + z1*zbar2) / 2."""
    h = Fraction(1, 2)
    return FormalSeries({(0, 1, 1, 0): h, (1, 0, 0, 1): h}, order)


@lru_cache(maxsize=None)
def q2_series(order: int = 2) -> FormalSeries:
    """q2 = x1*xi2 - x2*xi1 = (zbar1*z2 - z1*zbar2) / (2i)."""
    h = Fraction(1, 2)
    return FormalSeries(
        {(0, 1, 1, 0): GaussianRational(0, -h), (1, 0, 0, 1): GaussianRational(0, h)},
        order,
    )


@lru_cache(maxsize=None)
def q_series(order: int = 2) -> FormalSeries:
    """q = q1 + i*q2 = zbar1*z2."""
    return FormalSeries({(0, 1, 1, 0): 1}, order)


@lru_cache(maxsize=None)
def _real_variable_series(var: int, order: int) -> FormalSeries:
    half = Fraction(1, 2)
    minus_half_i = GaussianRational(0, -half)
    plus_half_i = GaussianRational(0, half)
    if var == 0:    # x1 = (z1 + zbar1)/2
        return FormalSeries({(1, 0, 0, 0): half, (0, 0, 1, 0): half}, order)
    if var == 1:    # xi1 = (z2 + zbar2)/2
        return FormalSeries({(0, 1, 0, 0): half, (0, 0, 0, 1): half}, order)
    if var == 2:    # x2 = (z1 - zbar1)/(2i)
        return FormalSeries({(1, 0, 0, 0): minus_half_i, (0, 0, 1, 0): plus_half_i}, order)
    if var == 3:    # xi2 = (z2 - zbar2)/(2i)
        return FormalSeries({(0, 1, 0, 0): minus_half_i, (0, 0, 0, 1): plus_half_i}, order)
    raise ValueError(var)


def x1_series(order: int = 1) -> FormalSeries:
    return _real_variable_series(0, order)


def xi1_series(order: int = 1) -> FormalSeries:
    return _real_variable_series(1, order)


def x2_series(order: int = 1) -> FormalSeries:
    return _real_variable_series(2, order)


def xi2_series(order: int = 1) -> FormalSeries:
    return _real_variable_series(3, order)


def rho2_series(order: int = 2) -> FormalSeries:
    """x1^2 + x2^2 + xi1^2 + xi2^2 = |z1|^2 + |z2|^2."""
    return FormalSeries({(1, 0, 1, 0): 1, (0, 1, 0, 1): 1}, order)


# -- real-basis conversion -------------------------------------------------------
#
# Real-basis polynomials are dictionaries over exponent tuples (i, j, k, l)
# meaning x1^i * xi1^j * x2^k * xi2^l, with exact coefficients.  This is the
# monomial order used by the system-document JSON schema.

RealPolynomial = dict  # {(i, j, k, l): GaussianRational}

_REAL_ORDER = (0, 1, 2, 3)  # x1, xi1, x2, xi2 -> _real_variable_series slots


def _real_mul(p: RealPolynomial, q: RealPolynomial) -> RealPolynomial:
    out: RealPolynomial = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3])
            c = c1 * c2
            prev = out.get(e)
            s = c if prev is None else prev + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
    return out


@lru_cache(maxsize=None)
def _z_variable_real(var: int) -> tuple:
    # z1 = x1 + i*x2, z2 = xi1 + i*xi2, and conjugates
    i = I
    table = {
        _VAR_Z1: {(1, 0, 0, 0): ONE, (0, 0, 1, 0): i},
        _VAR_Z2: {(0, 1, 0, 0): ONE, (0, 0, 0, 1): i},
        _VAR_ZB1: {(1, 0, 0, 0): ONE, (0, 0, 1, 0): -i},
        _VAR_ZB2: {(0, 1, 0, 0): ONE, (0, 0, 0, 1): -i},
    }
    return tuple(table[var].items())


@lru_cache(maxsize=None)
def _z_power_real(var: int, exponent: int) -> tuple:
    if exponent == 0:
        return (((0, 0, 0, 0), ONE),)
    lower = dict(_z_power_real(var, exponent - 1))
    return tuple(sorted(_real_mul(lower, dict(_z_variable_real(var))).items()))


def to_real_basis(f: FormalSeries) -> RealPolynomial:
    """Exact expansion over x1^i * xi1^j * x2^k * xi2^l monomials.

    Real-valued series produce coefficients with zero imaginary part.
    """
    out: RealPolynomial = {}
    for index, coeff in f.terms():
        term = {(0, 0, 0, 0): coeff}
        for var, e in zip((_VAR_Z1, _VAR_Z2, _VAR_ZB1, _VAR_ZB2), index):
            if e:
                term = _real_mul(term, dict(_z_power_real(var, e)))
        for expo, c in term.items():
            prev = out.get(expo)
            s = c if prev is None else prev + c
            if s.is_zero():
                out.pop(expo, None)
            else:
                out[expo] = s
    return out


def from_real_basis(poly: Mapping, order: int) -> FormalSeries:
    """Substitute x1 = (z1 + zbar1)/2, etc., truncating at `order`.

    `poly` maps (i, j, k, l) exponent tuples to coefficients; the inverse of
    `to_real_basis` on polynomials of degree <= order.
    """
    total = FormalSeries.zero(order)
    for expo, value in poly.items():
        if len(expo) != 4 or any(e < 0 for e in expo):
            raise ValueError(f"bad real-basis exponent tuple {expo!r}")
        coeff = _coerce_coeff(value)
        if coeff.is_zero():
            continue
        term = FormalSeries.constant(coeff, order)
        for var, e in zip(_REAL_ORDER, expo):
            if e:
                term = mul(term, _real_power_series(var, e, order), order)
        total = total + term
    return total


@lru_cache(maxsize=None)
def _real_power_series(var: int, exponent: int, order: int) -> FormalSeries:
    return pow_truncated(_real_variable_series(var, order), exponent, order)


def poisson_bracket_real_route(f: FormalSeries, g: FormalSeries,
                               order: int | None = None) -> FormalSeries:
    """The same bracket computed literally in the real basis.

    Slow reference path: expand both series over the real monomials, apply
    the canonical formula there with exact arithmetic, convert back.  Used
    as the independent cross-check for `poisson_bracket`.
    """
    n = min(f.truncation_order, g.truncation_order) if order is None else order
    fp = to_real_basis(f)
    gp = to_real_basis(g)

    def partial(p: RealPolynomial, slot: int) -> RealPolynomial:
        out = {}
        for e, c in p.items():
            if e[slot]:
                ne = list(e)
                ne[slot] -= 1
                out[tuple(ne)] = c * e[slot]
        return out

    # slots in (i, j, k, l) order: x1=0, xi1=1, x2=2, xi2=3
    total: RealPolynomial = {}
    for df, dg, sign in (
        (partial(fp, 1), partial(gp, 0), 1),     # f_xi1 * g_x1
        (partial(fp, 3), partial(gp, 2), 1),     # f_xi2 * g_x2
        (partial(fp, 0), partial(gp, 1), -1),    # -f_x1 * g_xi1
        (partial(fp, 2), partial(gp, 3), -1),    # -f_x2 * g_xi2
    ):
        prod = _real_mul(df, dg)
        for e, c in prod.items():
            c = c if sign > 0 else -c
            prev = total.get(e)
            s = c if prev is None else prev + c
            if s.is_zero():
                total.pop(e, None)
            else:
                total[e] = s
    return from_real_basis(total, n)


# -- bivariate normal-form series -----------------------------------------------

class BivariateSeries:
    """Real polynomial/series in the two model values (t1, t2).

    Coefficients are exact real rationals; the composition with (q1, q2)
    recovers a resonant-supported, real-valued FormalSeries.
    """

    __slots__ = ("_terms", "truncation")

    def __init__(self, terms: Mapping, truncation: int):
        clean: dict[tuple[int, int], Fraction] = {}
        for expo, value in terms.items():
            k, l = expo
            if k < 0 or l < 0:
                raise ValueError(f"bad bivariate exponent {expo!r}")
            if isinstance(value, GaussianRational):
                if not value.is_real():
                    raise ValueError(f"bivariate coefficient {value!r} is not real")
                value = value.re
            frac = value if isinstance(value, Fraction) else Fraction(value)
            if frac == 0 or k + l > truncation:
                continue
            clean[(k, l)] = frac
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "truncation", truncation)

    def __setattr__(self, name, value):
        raise AttributeError("BivariateSeries is immutable")

    @classmethod
    def zero(cls, truncation: int) -> "BivariateSeries":
        return cls({}, truncation)

    @classmethod
    def variable(cls, which: int, truncation: int) -> "BivariateSeries":
        """t1 (which=1) or t2 (which=2)."""
        expo = (1, 0) if which == 1 else (0, 1)
        return cls({expo: 1}, truncation)

    def terms(self) -> list[tuple[tuple[int, int], Fraction]]:
        return sorted(self._terms.items(), key=lambda t: (t[0][0] + t[0][1], t[0]))

    def coeff(self, k: int, l: int) -> Fraction:
        return self._terms.get((k, l), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        return self._terms == other._terms and self.truncation == other.truncation

    def __add__(self, other):
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        trunc = min(self.truncation, other.truncation)
        out = {e: c for e, c in self._terms.items() if e[0] + e[1] <= trunc}
        for e, c in other._terms.items():
            if e[0] + e[1] > trunc:
                continue
            s = out.get(e, Fraction(0)) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return BivariateSeries(out, trunc)

    def __neg__(self):
        return BivariateSeries({e: -c for e, c in self._terms.items()}, self.truncation)

    def __sub__(self, other):
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, value) -> "BivariateSeries":
        c = value if isinstance(value, Fraction) else Fraction(value)
        if c == 0:
            return BivariateSeries.zero(self.truncation)
        return BivariateSeries({e: v * c for e, v in self._terms.items()},
                               self.truncation)

    def with_truncation(self, truncation: int) -> "BivariateSeries":
        return BivariateSeries(dict(self._terms), truncation)

    def __repr__(self):
        body = " + ".join(f"({c})*t1^{e[0]}*t2^{e[1]}" for e, c in self.terms()) or "0"
        return f"<BivariateSeries {body}>"

    def evaluate(self, t1, t2):
        t1a = np.asarray(t1, dtype=float)
        t2a = np.asarray(t2, dtype=float)
        t1a, t2a = np.broadcast_arrays(t1a, t2a)
        total = np.zeros(t1a.shape, dtype=float)
        for (k, l), c in self._terms.items():
            total += float(c) * t1a**k * t2a**l
        if total.ndim == 0:
            return float(total)
        return total

    def compose(self, order: int) -> FormalSeries:
        """Substitute t1 -> q1, t2 -> q2 and truncate at `order`.

        The result is real-valued and supported on resonant monomials.
        """
        total = FormalSeries.zero(order)
        for (k, l), c in self._terms.items():
            if 2 * (k + l) > order:
                continue
            total = total + _q_power(k, l, order).scale(c)
        return total


@lru_cache(maxsize=None)
def _q_power(k: int, l: int, order: int) -> FormalSeries:
    if k > 0:
        return mul(_q_power(k - 1, l, order), q1_series(order), order)
    if l > 0:
        return mul(_q_power(k, l - 1, order), q2_series(order), order)
    return FormalSeries.constant(1, order)
