"""Seeded random inputs for the verification suites.

Every suite derives its generator from (seed, stream-name) so that distinct
suites never share a stream and a fixed config reproduces byte-identical
reports.
"""

from __future__ import annotations

import zlib
from fractions import Fraction

import numpy as np

from .series import FormalSeries, from_real_basis

_REAL_MONOMIALS_CACHE: dict[int, list[tuple[int, int, int, int]]] = {}


def rng_for(seed: int, stream: str) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFF, zlib.crc32(stream.encode())])


def _real_monomials(degree: int) -> list[tuple[int, int, int, int]]:
    got = _REAL_MONOMIALS_CACHE.get(degree)
    if got is None:
        got = [
            (i, j, k, degree - i - j - k)
            for i in range(degree + 1)
            for j in range(degree + 1 - i)
            for k in range(degree + 1 - i - j)
        ]
        _REAL_MONOMIALS_CACHE[degree] = got
    return got


def random_fraction(rng: np.random.Generator, max_num: int = 3, max_den: int = 4) -> Fraction:
    num = int(rng.integers(-max_num, max_num + 1))
    if num == 0:
        num = 1
    den = int(rng.integers(1, max_den + 1))
    return Fraction(num, den)


def random_real_series(rng: np.random.Generator, degrees, terms_per_degree: int,
                       order: int) -> FormalSeries:
    """Random real-valued series: rational coefficients on random real-basis
    monomials of the requested degrees."""
    poly: dict[tuple[int, int, int, int], Fraction] = {}
    for d in degrees:
        monos = _real_monomials(d)
        count = min(terms_per_degree, len(monos))
        picks = rng.choice(len(monos), size=count, replace=False)
        for idx in sorted(int(i) for i in picks):
            expo = monos[idx]
            poly[expo] = poly.get(expo, Fraction(0)) + random_fraction(rng)
    return from_real_basis(poly, order)


def random_generator_series(rng: np.random.Generator, order: int,
                            degrees=(3, 4), terms_per_degree: int = 3) -> FormalSeries:
    """Random admissible generator: real-valued, lowest degree >= 3."""
    return random_real_series(rng, degrees, terms_per_degree, order)


def random_ball_points(rng: np.random.Generator, count: int,
                       radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Uniform points of the 4-ball of the given radius, as (z1, z2)."""
    v = rng.normal(size=(count, 4))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = radius * rng.uniform(0.0, 1.0, size=(count, 1)) ** 0.25
    pts = r * v
    return pts[:, 0] + 1j * pts[:, 1], pts[:, 2] + 1j * pts[:, 3]


def random_offaxis_points(rng: np.random.Generator, count: int,
                          min_modulus: float = 0.1, max_modulus: float = 1.0
                          ) -> tuple[np.ndarray, np.ndarray]:
    """Points with both |z1| and |z2| in [min_modulus, max_modulus]."""
    m1 = rng.uniform(min_modulus, max_modulus, size=count)
    m2 = rng.uniform(min_modulus, max_modulus, size=count)
    ph = rng.uniform(0.0, 2.0 * np.pi, size=(2, count))
    return m1 * np.exp(1j * ph[0]), m2 * np.exp(1j * ph[1])
