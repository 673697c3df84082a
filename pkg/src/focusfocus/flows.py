"""Model flows, numeric Hamiltonian integration, and the flow-vs-series
contact checks.

The model flows are exact in the complex coordinates:

    q1-flow:  (z1, z2) -> (e^t  z1, e^-t z2)
    q2-flow:  (z1, z2) -> (e^is z1, e^is z2)      (2*pi periodic)

Everything else integrates Hamilton's equations xdot = dH/dxi,
xidot = -dH/dx with a classical 4th-order one-step method, using the exact
symbolic gradients of the series evaluated numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import StepOverflow
from .fields import PhasePoint
from .rationals import I
from .series import FormalSeries

Q1, Q2 = "q1", "q2"


def q1_flow(t: float, z: PhasePoint) -> PhasePoint:
    e = float(np.exp(t))
    return PhasePoint.from_z(e * z.z1, z.z2 / e)


def q2_flow(s: float, z: PhasePoint) -> PhasePoint:
    rot = complex(np.exp(1j * s))
    return PhasePoint.from_z(rot * z.z1, rot * z.z2)


def exact_flow(which: str, t: float, z: PhasePoint) -> PhasePoint:
    """Exact model flow; `which` is "q1" or "q2"."""
    if which == Q1:
        return q1_flow(t, z)
    if which == Q2:
        return q2_flow(t, z)
    raise ValueError(f"unknown model Hamiltonian {which!r}")


@dataclass(frozen=True)
class FlowSpec:
    """A numeric-integration request: Hamiltonian (series or model tag),
    total time, and step count."""

    hamiltonian: FormalSeries | str
    time: float
    steps: int = 400

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("at least one step is required")


def _gradient_series(h: FormalSeries) -> tuple[FormalSeries, ...]:
    """Exact (dH/dx1, dH/dx2, dH/dxi1, dH/dxi2) via the chain rule."""
    hz1, hz2 = h.derivative(0), h.derivative(1)
    hb1, hb2 = h.derivative(2), h.derivative(3)
    return (
        hz1 + hb1,
        (hz1 - hb1).scale(I),
        hz2 + hb2,
        (hz2 - hb2).scale(I),
    )


def _scalar_terms(series: FormalSeries) -> list:
    """(a1, a2, b1, b2, complex coeff) rows for a tight scalar evaluator."""
    return [(m.a1, m.a2, m.b1, m.b2, complex(c)) for m, c in series.terms()]


def hamiltonian_velocity(h: FormalSeries):
    """Returns v(state) for Hamilton's equations of the real-valued series h.

    state is (x1, x2, xi1, xi2); v = (dH/dxi1, dH/dxi2, -dH/dx1, -dH/dx2).
    The gradients are exact series, evaluated with plain complex arithmetic
    (this sits inside every integrator step).
    """
    dx1, dx2, dxi1, dxi2 = (_scalar_terms(s) for s in _gradient_series(h))

    def velocity(state: np.ndarray) -> np.ndarray:
        z1 = complex(state[0], state[1])
        z2 = complex(state[2], state[3])
        c1, c2 = z1.conjugate(), z2.conjugate()
        out = np.empty(4)
        for slot, (terms, sign) in enumerate(
                ((dxi1, 1.0), (dxi2, 1.0), (dx1, -1.0), (dx2, -1.0))):
            total = 0.0
            for a1, a2, b1, b2, c in terms:
                total += (c * z1**a1 * z2**a2 * c1**b1 * c2**b2).real
            out[slot] = sign * total
        return out

    return velocity


def numeric_flow(h: FormalSeries, t: float, z: PhasePoint, steps: int = 400,
                 overflow: float = 1e6) -> PhasePoint:
    """Classical RK4 integration of the Hamiltonian flow of h up to time t.

    Global error O(steps^-4).  Raises StepOverflow when the trajectory norm
    exceeds `overflow` (the flow escaped the chart).
    """
    if steps < 1:
        raise ValueError("at least one step is required")
    velocity = hamiltonian_velocity(h)
    dt = t / steps
    state = z.as_array()
    for _ in range(steps):
        k1 = velocity(state)
        k2 = velocity(state + 0.5 * dt * k1)
        k3 = velocity(state + 0.5 * dt * k2)
        k4 = velocity(state + dt * k3)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(state)) or np.max(np.abs(state)) > overflow:
            raise StepOverflow("trajectory escaped the chart")
    return PhasePoint.from_array(state)


def run_flow(spec: FlowSpec, z: PhasePoint) -> PhasePoint:
    if isinstance(spec.hamiltonian, str):
        return exact_flow(spec.hamiltonian, spec.time, z)
    return numeric_flow(spec.hamiltonian, spec.time, z, spec.steps)


# --------------------------------------------------------------------------
# order-of-contact scaling check for exp(ad_A) vs the time-1 flow pullback
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ContactScalingReport:
    """Measured contact errors e(r) between f(flow(z)) and the truncated
    exp(ad_A) f evaluated at z, across sample radii."""

    order: int
    radii: tuple[float, ...]
    errors: tuple[float, ...]
    slope: Optional[float]
    noise_floor: float

    def exact_contact(self) -> bool:
        """True when the errors sit at the integrator noise floor, so there
        is no scaling law to fit (the bracket series terminated)."""
        return self.slope is None

    def passes(self, margin: float = 0.3) -> bool:
        """Slope >= order + 1 - margin, or contact is exact."""
        if self.slope is None:
            return True
        return self.slope >= self.order + 1 - margin


def _sphere_points(rng: np.random.Generator, count: int) -> np.ndarray:
    v = rng.normal(size=(count, 4))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def taylor_flow_check(generator: FormalSeries, f: FormalSeries, order: int,
                      radii=(0.3, 0.21, 0.15, 0.1), points_per_radius: int = 10,
                      steps: int = 400, seed: int = 0,
                      noise_floor: float = 1e-10) -> ContactScalingReport:
    """Measure how fast f(flow_A^1(z)) approaches the degree-`order`
    exp(ad_A) f as |z| -> 0.

    The truncation discards degrees > order, so the contact error should
    scale like |z|^(order+1); the report carries the fitted log-log slope.
    A zero or terminating bracket series leaves only integrator error, in
    which case the errors sit at the noise floor and the slope fit is
    meaningless (`exact_contact` is set instead).
    """
    from .birkhoff import exp_ad

    truncated = exp_ad(generator, f, order)
    rng = np.random.default_rng(seed)
    directions = _sphere_points(rng, points_per_radius)
    errors = []
    for r in radii:
        worst = 0.0
        for d in directions:
            z = PhasePoint.from_array(r * d)
            flowed = numeric_flow(generator, 1.0, z, steps)
            lhs = f.evaluate(flowed.z1, flowed.z2).real
            rhs = truncated.evaluate(z.z1, z.z2).real
            worst = max(worst, abs(lhs - rhs))
        errors.append(worst)
    # fit only where the contact error dominates the integrator error;
    # fewer than 3 usable radii means the bracket series terminated and
    # there is nothing to fit
    usable = [(r, e) for r, e in zip(radii, errors) if e > noise_floor]
    slope = None
    if len(usable) >= 3:
        rs, es = zip(*usable)
        slope = float(np.polyfit(np.log(rs), np.log(es), 1)[0])
    return ContactScalingReport(order=order, radii=tuple(radii),
                                errors=tuple(errors), slope=slope,
                                noise_floor=noise_floor)


# --------------------------------------------------------------------------
# Liouville pairing and the loop action
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CircleOrbit:
    """The closed circle orbit of a base point: t -> (e^{2 pi i t} z1,
    e^{2 pi i t} z2) for t in [0, 1]; a single point when the base is 0."""

    base: PhasePoint

    def at(self, t: float) -> PhasePoint:
        rot = complex(np.exp(2j * np.pi * t))
        return PhasePoint.from_z(rot * self.base.z1, rot * self.base.z2)

    def degenerate(self) -> bool:
        return self.base.z1 == 0 and self.base.z2 == 0


def liouville_pairing(h: FormalSeries) -> FormalSeries:
    """xi1 * dH/dxi1 + xi2 * dH/dxi2, exactly.

    This is the Liouville 1-form paired with the Hamiltonian vector field
    of h; it equals n*h whenever h is homogeneous of degree n in the xi
    variables (Euler's identity).
    """
    return h.weighted_by_xi_degree()


def action_integral(z: PhasePoint, nodes: int = 256) -> float:
    """(1/2*pi) times the loop integral of xi1 dx1 + xi2 dx2 over the
    circle orbit t -> (e^{2*pi*i*t} z1, e^{2*pi*i*t} z2), t in [0, 1].

    Periodic trapezoid quadrature; equals q2(z) up to quadrature error, and
    exactly 0 at the origin where the loop degenerates to a point.
    """
    orbit = CircleOrbit(z)
    if orbit.degenerate():
        return 0.0
    t = np.arange(nodes) / nodes
    rot = np.exp(2j * np.pi * t)
    z1t = z.z1 * rot
    z2t = z.z2 * rot
    z1dot = 2j * np.pi * z1t
    # xi1*x1dot + xi2*x2dot = Re(conj(z2) * z1dot)
    integrand = np.real(np.conj(z2t) * z1dot)
    return float(integrand.mean() / (2.0 * np.pi))
