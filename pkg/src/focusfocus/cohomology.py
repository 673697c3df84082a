"""Numeric solvers for the two cohomological equations {f, q1} = r1 and
{f, q2} = r2 - phi2(q1, q2).

The circle equation is handled by averaging along the 2*pi-periodic flow of
q2; the hyperbolic equation by transporting along the flow of q1 up to the
time that lands on the hypersurface |z1| = |z2|.  Everything is verified a
posteriori through finite-difference Poisson brackets, because solutions are
unique only up to functions commuting with both model Hamiltonians.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    CrossCommutingViolation,
    EvalAtOrigin,
    OnSingularAxis,
    VerificationFailure,
)
from .fields import (
    PhasePoint,
    QuadratureConfig,
    ScalarField,
    VectorField4,
    q1_field,
    q2_field,
    q1_value,
    q2_value,
    rho2_value,
)
from .series import FormalSeries, mul, x1_series, x2_series, xi1_series, xi2_series


# --------------------------------------------------------------------------
# right inverse of the differential of the model map
# --------------------------------------------------------------------------

def moment_right_inverse(u1: ScalarField, u2: ScalarField) -> VectorField4:
    """Vector field Y with dq1(Y) = u1 and dq2(Y) = u2 away from the origin.

    Y = (1/rho^2) * M * (u1, u2)^T with rho^2 = x1^2+x2^2+xi1^2+xi2^2 and
    M rows (xi1, xi2), (xi2, -xi1), (x1, -x2), (x2, x1).  Evaluation at the
    origin raises EvalAtOrigin; smoothness of Y requires (u1, u2) to vanish
    to order >= 2 there, which is the caller's concern.
    """

    def component(row: int) -> ScalarField:
        def evaluator(z1, z2):
            z1a = np.asarray(z1, dtype=complex)
            z2a = np.asarray(z2, dtype=complex)
            rho2 = rho2_value(z1a, z2a)
            if np.any(rho2 == 0.0):
                raise EvalAtOrigin("right inverse evaluated at the origin")
            x1, x2 = z1a.real, z1a.imag
            xi1, xi2 = z2a.real, z2a.imag
            v1 = u1.sample(z1a, z2a)
            v2 = u2.sample(z1a, z2a)
            rows = (
                xi1 * v1 + xi2 * v2,
                xi2 * v1 - xi1 * v2,
                x1 * v1 - x2 * v2,
                x2 * v1 + x1 * v2,
            )
            return rows[row] / rho2
        return ScalarField(evaluator)

    return VectorField4([component(r) for r in range(4)])


def scaled_right_inverse(p1: FormalSeries, p2: FormalSeries,
                         order: Optional[int] = None) -> tuple[FormalSeries, ...]:
    """Exact right inverse applied to (rho^2 * p1, rho^2 * p2).

    The 1/rho^2 factor cancels, leaving the polynomial field M * (p1, p2)^T;
    returned as four series in the same basis ordering (d/dx1, d/dx2,
    d/dxi1, d/dxi2).
    """
    n = (max(p1.truncation_order, p2.truncation_order) + 1) if order is None else order
    x1, x2 = x1_series(n), x2_series(n)
    xi1, xi2 = xi1_series(n), xi2_series(n)
    return (
        mul(xi1, p1, n) + mul(xi2, p2, n),
        mul(xi2, p1, n) - mul(xi1, p2, n),
        mul(x1, p1, n) - mul(x2, p2, n),
        mul(x2, p1, n) + mul(x1, p2, n),
    )


def contract_moment_differential(components: Sequence[FormalSeries],
                                 order: Optional[int] = None
                                 ) -> tuple[FormalSeries, FormalSeries]:
    """Exact contractions (dq1(Y), dq2(Y)) of a polynomial vector field.

    dq1 = xi1 dx1 + xi2 dx2 + x1 dxi1 + x2 dxi2 and
    dq2 = xi2 dx1 - xi1 dx2 - x2 dxi1 + x1 dxi2.
    """
    y1, y2, y3, y4 = components
    n = order if order is not None else max(c.truncation_order for c in components) + 1
    x1, x2 = x1_series(n), x2_series(n)
    xi1, xi2 = xi1_series(n), xi2_series(n)
    along_q1 = (mul(xi1, y1, n) + mul(xi2, y2, n)
                + mul(x1, y3, n) + mul(x2, y4, n))
    along_q2 = (mul(xi2, y1, n) - mul(xi1, y2, n)
                - mul(x2, y3, n) + mul(x1, y4, n))
    return along_q1, along_q2


def contract_moment_numeric(field: VectorField4, z1, z2) -> tuple[np.ndarray, np.ndarray]:
    """Numeric contractions (dq1(Y), dq2(Y)) of a vector field at points."""
    z1a = np.asarray(z1, dtype=complex)
    z2a = np.asarray(z2, dtype=complex)
    y = field.sample(z1a, z2a)
    x1, x2 = z1a.real, z1a.imag
    xi1, xi2 = z2a.real, z2a.imag
    along_q1 = xi1 * y[0] + xi2 * y[1] + x1 * y[2] + x2 * y[3]
    along_q2 = xi2 * y[0] - xi1 * y[1] - x2 * y[2] + x1 * y[3]
    return along_q1, along_q2


# --------------------------------------------------------------------------
# circle averaging along the q2-flow
# --------------------------------------------------------------------------

def _orbit_samples(r: ScalarField, z1, z2, nodes: int) -> np.ndarray:
    """Values of r along the q2-orbit of each point; sample axis last."""
    z1a = np.asarray(z1, dtype=complex)
    z2a = np.asarray(z2, dtype=complex)
    z1a, z2a = np.broadcast_arrays(z1a, z2a)
    phases = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    return r.sample(z1a[..., None] * phases, z2a[..., None] * phases)


def circle_average(r: ScalarField, nodes: int = 64) -> ScalarField:
    """Average of r over the 2*pi-periodic q2-flow, by the periodic
    trapezoid rule (node mean); exact for trigonometric polynomials of
    degree < nodes in the flow parameter."""

    def evaluator(z1, z2):
        return _orbit_samples(r, z1, z2, nodes).mean(axis=-1)

    return ScalarField(evaluator, label=f"avg[{r.label}]" if r.label else "")


def circle_solve(r2: ScalarField, nodes: int = 64) -> ScalarField:
    """Solve {f2, q2} = r2 - (circle average of r2) along each orbit.

    Computed as f2 = -(1/2*pi) * integral of s * (flow_s^* r2_checked) ds,
    evaluated through the Fourier coefficients of the orbit samples:
    f2 = -sum_{k != 0} c_k / (i k).  The mean mode is dropped, which is the
    subtraction of the average; the result has zero circle average itself.
    """

    def evaluator(z1, z2):
        samples = _orbit_samples(r2, z1, z2, nodes)
        coeffs = np.fft.fft(samples, axis=-1) / nodes
        freqs = np.fft.fftfreq(nodes, d=1.0 / nodes)
        with np.errstate(divide="ignore", invalid="ignore"):
            weights = np.where(freqs == 0.0, 0.0, -1.0 / (1j * freqs))
        return np.real(coeffs @ weights)

    return ScalarField(evaluator, label=f"circle_solve[{r2.label}]" if r2.label else "")


def fiber_section(h: ScalarField) -> Callable:
    """Collapse a fiberwise-constant field to a function of the model values.

    Returns (c1, c2) -> h at the section point (x1, x2, xi1, xi2) =
    (c1, -c2, 1, 0), which satisfies (q1, q2) = (c1, c2).
    """

    def g(c1, c2):
        c1a = np.asarray(c1, dtype=float)
        c2a = np.asarray(c2, dtype=float)
        value = h.sample(c1a - 1j * c2a, np.ones_like(c1a, dtype=complex))
        if np.ndim(value) == 0:
            return float(value)
        return value

    return g


# --------------------------------------------------------------------------
# transport along the q1-flow
# --------------------------------------------------------------------------

def transport_time_values(z1, z2):
    """T = (ln|z2|^2 - ln|z1|^2) / 4, vectorized; requires both moduli > 0.

    Satisfies {T, q1} = 1 and {T, q2} = 0 away from the axes; the q1-flow at
    time T carries the point onto the hypersurface |z1| = |z2|.
    """
    z1a = np.asarray(z1, dtype=complex)
    z2a = np.asarray(z2, dtype=complex)
    m1 = np.abs(z1a)
    m2 = np.abs(z2a)
    if np.any(m1 == 0.0) or np.any(m2 == 0.0):
        raise OnSingularAxis("transport time is undefined on z1 = 0 or z2 = 0")
    return 0.5 * (np.log(m2) - np.log(m1))


def transport_time(z: PhasePoint) -> float:
    return float(transport_time_values(z.z1, z.z2))


def transport_time_field() -> ScalarField:
    return ScalarField(transport_time_values, label="T")


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre_01(n: int) -> tuple[np.ndarray, np.ndarray]:
    got = _GL_CACHE.get(n)
    if got is None:
        x, w = np.polynomial.legendre.leggauss(n)
        got = (0.5 * (x + 1.0), 0.5 * w)
        _GL_CACHE[n] = got
    return got


def transport_integral(r: ScalarField, nodes: int = 48) -> ScalarField:
    """f(z) = integral of r along the q1-flow from time 0 to T(z).

    When {r, q2} = 0, this solves {f, q1} = r with {f, q2} = 0 away from the
    axes.  Gauss-Legendre in the rescaled time variable; the integrand is
    analytic in the flow parameter, so convergence is spectral.
    """
    u, w = _gauss_legendre_01(nodes)

    def evaluator(z1, z2):
        z1a = np.asarray(z1, dtype=complex)
        z2a = np.asarray(z2, dtype=complex)
        z1a, z2a = np.broadcast_arrays(z1a, z2a)
        t = transport_time_values(z1a, z2a)
        s = t[..., None] * u
        factor = np.exp(s)
        values = r.sample(z1a[..., None] * factor, z2a[..., None] / factor)
        return t * (values @ w)

    return ScalarField(evaluator)


# --------------------------------------------------------------------------
# finite-difference brackets
# --------------------------------------------------------------------------

def _fd_gradient(f: ScalarField, z1, z2, h: float) -> tuple[np.ndarray, ...]:
    """Central-difference partials (f_x1, f_x2, f_xi1, f_xi2), O(h^2)."""
    out = []
    for dz1, dz2 in ((h, 0), (1j * h, 0), (0, h), (0, 1j * h)):
        plus = f.sample(z1 + dz1, z2 + dz2)
        minus = f.sample(z1 - dz1, z2 - dz2)
        out.append((plus - minus) / (2.0 * h))
    return tuple(out)


def poisson_bracket_fd_values(f: ScalarField, g: ScalarField, z1, z2, h: float = 1e-4):
    """Central-difference canonical bracket, vectorized; O(h^2) accurate."""
    fx1, fx2, fxi1, fxi2 = _fd_gradient(f, z1, z2, h)
    gx1, gx2, gxi1, gxi2 = _fd_gradient(g, z1, z2, h)
    return fxi1 * gx1 + fxi2 * gx2 - fx1 * gxi1 - fx2 * gxi2


def poisson_bracket_fd(f: ScalarField, g: ScalarField, z: PhasePoint,
                       h: float = 1e-4) -> float:
    """{f, g}(z) by central differences (sign convention: d/dxi first)."""
    return float(poisson_bracket_fd_values(f, g, z.z1, z.z2, h))


# --------------------------------------------------------------------------
# the composite solver
# --------------------------------------------------------------------------

_DEFAULT_POINT_SEED = 0x5EED


def default_offaxis_points(count: int = 24, min_modulus: float = 0.25,
                           max_modulus: float = 0.9,
                           seed: int = _DEFAULT_POINT_SEED) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic sample points with both moduli in [min, max]."""
    rng = np.random.default_rng(seed)
    m1 = rng.uniform(min_modulus, max_modulus, size=count)
    m2 = rng.uniform(min_modulus, max_modulus, size=count)
    ph1 = rng.uniform(0.0, 2.0 * np.pi, size=count)
    ph2 = rng.uniform(0.0, 2.0 * np.pi, size=count)
    return m1 * np.exp(1j * ph1), m2 * np.exp(1j * ph2)


@dataclass(frozen=True)
class BracketSystemSolution:
    """Reconstructed solution of the pair of bracket equations, plus the
    residuals measured at the verification points."""

    f: ScalarField
    phi2: Callable
    max_residual_q1: float
    max_residual_q2: float
    worst_point_q1: PhasePoint
    worst_point_q2: PhasePoint


def solve_bracket_system(r1: ScalarField, r2: ScalarField,
                         cfg: QuadratureConfig = QuadratureConfig(),
                         points: Optional[tuple[np.ndarray, np.ndarray]] = None,
                         check_cross_commuting: bool = True) -> BracketSystemSolution:
    """Solve {f, q1} = r1, {f, q2} = r2 - phi2(q1, q2) numerically.

    The circle part is split off first: phi2 recomposes the circle average
    of r2 through the section of the model map, and f2 = circle_solve(r2)
    handles the zero-average remainder.  What is left of the first equation
    after subtracting {f2, q1} is the circle average of r1 (an identity that
    follows from the cross-commuting relation by integration by parts), and
    is q2-invariant, so the transport integral along the q1-flow finishes
    the job: f = f2 + transport_integral(average of r1).

    Residuals of both equations are measured by finite-difference brackets
    at the verification points (default: a fixed off-axis sample away from
    the singular axes, where the transport time stays bounded).

    Raises CrossCommutingViolation if {r1, q2} != {r2, q1} at the sample
    points, and VerificationFailure (with a worst-point report) when the
    reconstructed solution misses cfg.tolerance.
    """
    if points is None:
        points = default_offaxis_points()
    z1, z2 = points
    h = cfg.fd_step

    if check_cross_commuting:
        lhs = poisson_bracket_fd_values(r1, q2_field(), z1, z2, h)
        rhs = poisson_bracket_fd_values(r2, q1_field(), z1, z2, h)
        dev = np.abs(lhs - rhs)
        worst = int(np.argmax(dev))
        scale = 1.0 + np.abs(lhs).max()
        if dev[worst] > 200.0 * max(cfg.tolerance, h * h) * scale:
            raise CrossCommutingViolation(
                f"{{r1, q2}} != {{r2, q1}} (deviation {dev[worst]:.3e})",
                worst_point=PhasePoint.from_z(z1[worst], z2[worst]),
                deviation=float(dev[worst]))

    averaged_r2 = circle_average(r2, cfg.nodes)
    phi2 = fiber_section(averaged_r2)
    f2 = circle_solve(r2, cfg.nodes)
    averaged_r1 = circle_average(r1, cfg.nodes)
    f = f2 + transport_integral(averaged_r1, max(cfg.nodes // 2, 24))

    res_q1 = np.abs(poisson_bracket_fd_values(f, q1_field(), z1, z2, h)
                    - r1.sample(z1, z2))
    target_q2 = r2.sample(z1, z2) - np.asarray(phi2(q1_value(z1, z2), q2_value(z1, z2)))
    res_q2 = np.abs(poisson_bracket_fd_values(f, q2_field(), z1, z2, h) - target_q2)

    w1 = int(np.argmax(res_q1))
    w2 = int(np.argmax(res_q2))
    solution = BracketSystemSolution(
        f=f,
        phi2=phi2,
        max_residual_q1=float(res_q1[w1]),
        max_residual_q2=float(res_q2[w2]),
        worst_point_q1=PhasePoint.from_z(z1[w1], z2[w1]),
        worst_point_q2=PhasePoint.from_z(z1[w2], z2[w2]),
    )
    if solution.max_residual_q1 > cfg.tolerance or solution.max_residual_q2 > cfg.tolerance:
        worst = max(solution.max_residual_q1, solution.max_residual_q2)
        point = (solution.worst_point_q1
                 if solution.max_residual_q1 >= solution.max_residual_q2
                 else solution.worst_point_q2)
        raise VerificationFailure(
            f"bracket residual {worst:.3e} exceeds tolerance {cfg.tolerance:.1e} at {point}",
            worst_point=point, residual=worst)
    return solution
