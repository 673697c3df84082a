"""Numeric phase-space values: points, scalar fields, vector fields.

Points of R^4 are identified with C^2 through z1 = x1 + i*x2 and
z2 = xi1 + i*xi2.  Scalar fields evaluate vectorized over numpy arrays of
(z1, z2); everything is immutable after construction and safe to evaluate
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .series import FormalSeries


@dataclass(frozen=True)
class PhasePoint:
    """A numeric point of R^4 = C^2."""

    x1: float
    x2: float
    xi1: float
    xi2: float

    def __post_init__(self):
        for v in (self.x1, self.x2, self.xi1, self.xi2):
            if not math.isfinite(v):
                raise ValueError("phase point coordinates must be finite")

    @property
    def z1(self) -> complex:
        return complex(self.x1, self.x2)

    @property
    def z2(self) -> complex:
        return complex(self.xi1, self.xi2)

    @classmethod
    def from_z(cls, z1: complex, z2: complex) -> "PhasePoint":
        z1, z2 = complex(z1), complex(z2)
        return cls(z1.real, z1.imag, z2.real, z2.imag)

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.xi1, self.xi2], dtype=float)

    @classmethod
    def from_array(cls, arr) -> "PhasePoint":
        x1, x2, xi1, xi2 = (float(v) for v in arr)
        return cls(x1, x2, xi1, xi2)

    def norm(self) -> float:
        return math.sqrt(self.x1**2 + self.x2**2 + self.xi1**2 + self.xi2**2)


def q1_value(z1, z2):
    """q1 = Re(zbar1 * z2), vectorized."""
    return (np.conj(z1) * z2).real


def q2_value(z1, z2):
    """q2 = Im(zbar1 * z2), vectorized."""
    return (np.conj(z1) * z2).imag


def rho2_value(z1, z2):
    """|z1|^2 + |z2|^2 = x1^2 + x2^2 + xi1^2 + xi2^2, vectorized."""
    return np.abs(z1) ** 2 + np.abs(z2) ** 2


class ScalarField:
    """Real-valued function of a phase point, with vectorized evaluation.

    Wraps an evaluator f(z1, z2) -> real array; optionally carries the
    FormalSeries it came from, when the field is polynomial.
    """

    __slots__ = ("_eval", "series", "label")

    def __init__(self, evaluator: Callable, series: Optional[FormalSeries] = None,
                 label: str = ""):
        object.__setattr__(self, "_eval", evaluator)
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "label", label)

    def __setattr__(self, name, value):
        raise AttributeError("ScalarField is immutable")

    @classmethod
    def from_series(cls, series: FormalSeries, label: str = "") -> "ScalarField":
        def evaluator(z1, z2):
            return np.real(series.evaluate(z1, z2))
        return cls(evaluator, series=series, label=label)

    @classmethod
    def from_function(cls, fn: Callable, label: str = "") -> "ScalarField":
        return cls(fn, series=None, label=label)

    @classmethod
    def constant(cls, value: float, label: str = "") -> "ScalarField":
        v = float(value)

        def evaluator(z1, z2):
            z1a = np.asarray(z1)
            return np.full(np.broadcast_shapes(z1a.shape, np.asarray(z2).shape), v)
        return cls(evaluator, label=label)

    @classmethod
    def zero(cls) -> "ScalarField":
        return cls.constant(0.0, label="0")

    def sample(self, z1, z2):
        """Evaluate at arrays of complex (z1, z2); returns a real array."""
        return self._eval(z1, z2)

    def __call__(self, point: PhasePoint) -> float:
        return float(self._eval(point.z1, point.z2))

    # pointwise algebra (closures; series backing kept when available)

    def __add__(self, other):
        if not isinstance(other, ScalarField):
            return NotImplemented
        series = None
        if self.series is not None and other.series is not None:
            series = self.series + other.series
        return ScalarField(lambda z1, z2: self._eval(z1, z2) + other._eval(z1, z2),
                           series=series)

    def __sub__(self, other):
        if not isinstance(other, ScalarField):
            return NotImplemented
        series = None
        if self.series is not None and other.series is not None:
            series = self.series - other.series
        return ScalarField(lambda z1, z2: self._eval(z1, z2) - other._eval(z1, z2),
                           series=series)

    def __neg__(self):
        series = -self.series if self.series is not None else None
        return ScalarField(lambda z1, z2: -self._eval(z1, z2), series=series)

    def scaled(self, factor: float) -> "ScalarField":
        f = float(factor)
        return ScalarField(lambda z1, z2: f * self._eval(z1, z2))


_Q1_FIELD = ScalarField(q1_value, label="q1")
_Q2_FIELD = ScalarField(q2_value, label="q2")


def q1_field() -> ScalarField:
    return _Q1_FIELD


def q2_field() -> ScalarField:
    return _Q2_FIELD


class VectorField4:
    """Vector field on R^4 in the basis (d/dx1, d/dx2, d/dxi1, d/dxi2)."""

    __slots__ = ("components",)

    def __init__(self, components):
        comps = tuple(components)
        if len(comps) != 4:
            raise ValueError("a vector field needs exactly 4 components")
        object.__setattr__(self, "components", comps)

    def __setattr__(self, name, value):
        raise AttributeError("VectorField4 is immutable")

    def sample(self, z1, z2) -> np.ndarray:
        """Stacked component values, shape (4,) + broadcast shape."""
        return np.stack([c.sample(z1, z2) for c in self.components])

    def __call__(self, point: PhasePoint) -> np.ndarray:
        return np.array([c(point) for c in self.components], dtype=float)


@dataclass(frozen=True)
class QuadratureConfig:
    """Shared numeric settings: circle-quadrature nodes, finite-difference
    step, and the acceptance threshold for residual checks."""

    nodes: int = 64
    fd_step: float = 1e-4
    tolerance: float = 1e-5

    def __post_init__(self):
        if self.nodes < 8:
            raise ValueError("at least 8 quadrature nodes are required")
        if not (self.fd_step > 0):
            raise ValueError("finite-difference step must be positive")
        if not (self.tolerance > 0):
            raise ValueError("tolerance must be positive")
