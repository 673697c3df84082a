"""Normalize-and-verify pipeline producing deterministic JSON reports.

Stages mirror the full reduction chain: leading extraction, leading
reduction, exact commutation check, the formal normal form, and (optionally)
the numeric verification suites.  The smooth-category stages that a complete
reduction would continue with (Borel resummation of the generator, the
equivariant flat Morse step, the singular Darboux step) have no finite
representation and are recorded as explicit out-of-scope entries so the
report stays auditable against the full chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import __version__
from .birkhoff import (
    birkhoff_normalize,
    commutation_residual,
    extract_leading,
    reduce_leading,
)
from .cohomology import (
    contract_moment_differential,
    contract_moment_numeric,
    moment_right_inverse,
    poisson_bracket_fd_values,
    scaled_right_inverse,
    transport_time_field,
)
from .errors import FocusFocusError, NonCommuting
from .fields import (
    PhasePoint,
    QuadratureConfig,
    ScalarField,
    q1_field,
    q2_field,
    q2_value,
)
from .flows import action_integral, taylor_flow_check
from .sampling import (
    random_ball_points,
    random_offaxis_points,
    random_real_series,
    rng_for,
)
from .series import mul, rho2_series
from .systemio import (
    bivariate_document,
    dump_json,
    parse_system_document,
    series_document,
)

TAYLOR_SLOPE_MARGIN = 0.3          # slope must reach order + 1 - margin
ACTION_TOLERANCE = 1e-10
RIGHT_INVERSE_RELATIVE = 1e-12
TRANSPORT_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PipelineConfig:
    """Everything the pipeline needs besides the system document."""

    order: int | None = None
    verify_numeric: bool = False
    samples: int = 50
    radius: float = 1.0
    seed: int = 0
    nodes: int = 64
    fd_step: float = 1e-4
    tolerance: float = 1e-5

    def __post_init__(self):
        if self.order is not None and self.order < 2:
            raise ValueError("order must be >= 2")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not (self.radius > 0):
            raise ValueError("radius must be positive")

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(nodes=self.nodes, fd_step=self.fd_step,
                                tolerance=self.tolerance)


# --------------------------------------------------------------------------
# numeric verification suites
# --------------------------------------------------------------------------

def right_inverse_suite(seed: int, pairs: int = 20, points: int = 100) -> dict:
    """Exact and numeric checks of dq_i(Y(U)) = u_i for U = (rho^2 p1, rho^2 p2)."""
    rng = rng_for(seed, "right-inverse")
    z1, z2 = random_offaxis_points(rng, points, 0.1, 1.0)
    symbolic_ok = True
    max_rel = 0.0
    for _ in range(pairs):
        p1 = random_real_series(rng, degrees=(0, 1, 2, 3), terms_per_degree=2, order=3)
        p2 = random_real_series(rng, degrees=(0, 1, 2, 3), terms_per_degree=2, order=3)
        components = scaled_right_inverse(p1, p2)
        got1, got2 = contract_moment_differential(components)
        rho2 = rho2_series(got1.truncation_order)
        if not (got1.same_terms(mul(rho2, p1, got1.truncation_order))
                and got2.same_terms(mul(rho2, p2, got2.truncation_order))):
            symbolic_ok = False
        u1 = ScalarField.from_series(mul(rho2, p1, 5))
        u2 = ScalarField.from_series(mul(rho2, p2, 5))
        field = moment_right_inverse(u1, u2)
        along1, along2 = contract_moment_numeric(field, z1, z2)
        want1 = u1.sample(z1, z2)
        want2 = u2.sample(z1, z2)
        # the operator is linear in U jointly, so its numeric conditioning is
        # set by ||U(z)||, not by either component alone
        scale = np.maximum(np.maximum(np.abs(want1), np.abs(want2)), 1e-300)
        max_rel = max(max_rel,
                      float(np.max(np.abs(along1 - want1) / scale)),
                      float(np.max(np.abs(along2 - want2) / scale)))
    return {
        "pairs": pairs,
        "points": points,
        "symbolic_exact": symbolic_ok,
        "max_relative_error": max_rel,
    }


def transport_suite(seed: int, points: int = 100, fd_step: float = 1e-4,
                    min_modulus: float = 0.1, max_modulus: float = 1.0) -> dict:
    """Finite-difference brackets of the transport time with the model pair."""
    rng = rng_for(seed, "transport")
    z1, z2 = random_offaxis_points(rng, points, min_modulus, max_modulus)
    t_field = transport_time_field()
    with_q1 = poisson_bracket_fd_values(t_field, q1_field(), z1, z2, fd_step)
    with_q2 = poisson_bracket_fd_values(t_field, q2_field(), z1, z2, fd_step)
    return {
        "points": points,
        "fd_step": fd_step,
        "max_deviation_q1": float(np.max(np.abs(with_q1 - 1.0))),
        "max_deviation_q2": float(np.max(np.abs(with_q2))),
    }


def action_suite(seed: int, points: int = 50, radius: float = 1.0,
                 nodes: int = 256) -> dict:
    """Loop action versus q2 at random points of the ball."""
    rng = rng_for(seed, "action")
    z1, z2 = random_ball_points(rng, points, radius)
    worst = 0.0
    for a, b in zip(z1, z2):
        k = action_integral(PhasePoint.from_z(a, b), nodes)
        worst = max(worst, abs(k - float(q2_value(a, b))))
    return {"points": points, "radius": radius, "max_deviation": worst}


def taylor_suite(generator, order: int, radius: float, seed: int,
                 steps: int = 400) -> dict:
    """Order-of-contact scaling of exp(ad_A) against the integrated flow."""
    from .series import q1_series

    radii = tuple(radius * r for r in (0.3, 0.21, 0.15, 0.1))
    report = taylor_flow_check(generator, q1_series(order), order,
                               radii=radii, steps=steps, seed=seed)
    return {
        "order": order,
        "radii": list(report.radii),
        "max_errors": list(report.errors),
        "slope": report.slope,
        "exact_contact": report.exact_contact(),
        "threshold": order + 1 - TAYLOR_SLOPE_MARGIN,
        "passed": report.passes(TAYLOR_SLOPE_MARGIN),
    }


# --------------------------------------------------------------------------
# report assembly
# --------------------------------------------------------------------------

_OUT_OF_SCOPE_STAGES = (
    ("borel_resummation",
     "resummation of the formal generator to a smooth function"),
    ("equivariant_morse_reduction",
     "absorbing the flat remainder into the singular fibration"),
    ("singular_darboux",
     "restoring the symplectic form while preserving the fibration"),
)


def _criterion(name: str, passed: bool, detail: str) -> dict:
    return {"name": name, "passed": bool(passed), "detail": detail}


def run_pipeline(document: dict, config: PipelineConfig) -> dict:
    """Parse, normalize, verify, and assemble the JSON-ready report.

    ParseError / ValidationError propagate (the document never made it into
    the pipeline); every later failure is recorded inside the report and
    reflected in its exit_code.
    """
    spec = parse_system_document(document, config.order)
    order = spec.order

    stages: list[dict] = []
    criteria: list[dict] = []
    report: dict = {
        "tool": {"name": "focusfocus", "version": __version__},
        "config": {
            "order": order,
            "verify_numeric": config.verify_numeric,
            "samples": config.samples,
            "radius": config.radius,
            "seed": config.seed,
            "nodes": config.nodes,
            "fd_step": config.fd_step,
            "tolerance": config.tolerance,
        },
        "input": {
            "f1": series_document(spec.f1),
            "f2": series_document(spec.f2),
        },
        "stages": stages,
        "criteria": criteria,
    }

    normal_form = None
    try:
        matrix = extract_leading(spec.f1, spec.f2)
        stages.append({
            "name": "leading_extraction",
            "status": "ok",
            "matrix": [[str(v) for v in row] for row in matrix.rows()],
        })
        reduced = reduce_leading(spec, matrix)
        stages.append({"name": "leading_reduction", "status": "ok",
                       "identity": matrix.is_identity()})

        bracket = commutation_residual(spec.f1, spec.f2, order)
        if not bracket.is_zero():
            raise NonCommuting(
                f"{{f1, f2}} has {len(bracket)} nonzero coefficients "
                f"through degree {order}")
        stages.append({"name": "commutation_check", "status": "ok",
                       "nonzero_bracket_terms": 0})
        criteria.append(_criterion(
            "commutation", True, f"{{f1, f2}} = 0 exactly through degree {order}"))

        result = birkhoff_normalize(reduced)
        normal_form = result
        stages.append({
            "name": "formal_normal_form",
            "status": "ok",
            "ledger": [
                {
                    "degree": entry.degree,
                    "remainder_terms": list(entry.remainder_terms),
                    "resonant_terms": list(entry.resonant_terms),
                    "generator_terms": entry.generator_terms,
                }
                for entry in result.ledger
            ],
        })
        report["normal_form"] = {
            "leading_matrix": [[str(v) for v in row] for row in matrix.rows()],
            "generator": series_document(result.generator),
            "g1": bivariate_document(result.g1),
            "g2": bivariate_document(result.g2),
            "g1_of_input": bivariate_document(result.normal_form_of_input(1)),
            "g2_of_input": bivariate_document(result.normal_form_of_input(2)),
        }
        criteria.append(_criterion(
            "normal_form_residual", True,
            f"exp(ad_A) f_i - g_i(q1, q2) = 0 exactly through degree {order}"))
        criteria.append(_criterion(
            "normal_form_real", True,
            "g1, g2 have exact real coefficients"))
    except FocusFocusError as exc:
        stages.append({
            "name": "formal_normal_form",
            "status": "failed",
            "error": {"type": type(exc).__name__, "message": str(exc)},
        })
        criteria.append(_criterion("commutation", False,
                                   f"{type(exc).__name__}: {exc}"))

    if config.verify_numeric and normal_form is not None:
        verification: dict = {}
        taylor = taylor_suite(normal_form.generator, order, config.radius, config.seed)
        verification["taylor_contact"] = taylor
        criteria.append(_criterion(
            "taylor_contact", taylor["passed"],
            "contact error scales at the truncation order"
            + (f" (slope {taylor['slope']:.3f})" if taylor["slope"] is not None
               else " (exact contact)")))

        action = action_suite(config.seed, config.samples, config.radius,
                              max(config.nodes, 256))
        verification["action_integral"] = action
        criteria.append(_criterion(
            "action_integral", action["max_deviation"] <= ACTION_TOLERANCE,
            f"max |K(z) - q2(z)| = {action['max_deviation']:.3e}"))

        psi = right_inverse_suite(config.seed)
        verification["right_inverse"] = psi
        criteria.append(_criterion(
            "right_inverse_symbolic", psi["symbolic_exact"],
            "dq_i(Y(U)) = u_i exactly as polynomials"))
        criteria.append(_criterion(
            "right_inverse_numeric",
            psi["max_relative_error"] <= RIGHT_INVERSE_RELATIVE,
            f"max relative error {psi['max_relative_error']:.3e}"))

        transport = transport_suite(config.seed, 100, config.fd_step)
        verification["transport_brackets"] = transport
        passed = (transport["max_deviation_q1"] <= TRANSPORT_TOLERANCE
                  and transport["max_deviation_q2"] <= TRANSPORT_TOLERANCE)
        criteria.append(_criterion(
            "transport_brackets", passed,
            f"max |{{T,q1}}-1| = {transport['max_deviation_q1']:.3e}, "
            f"max |{{T,q2}}| = {transport['max_deviation_q2']:.3e}"))

        stages.append({"name": "numeric_verification", "status": "ok"})
        report["verification"] = verification
    elif config.verify_numeric:
        stages.append({"name": "numeric_verification", "status": "skipped"})

    for name, detail in _OUT_OF_SCOPE_STAGES:
        stages.append({"name": name, "status": "out_of_scope", "detail": detail})

    all_passed = all(c["passed"] for c in criteria)
    report["status"] = "pass" if all_passed else "fail"
    report["exit_code"] = 0 if all_passed else 1
    return report


def render_report(report: dict) -> str:
    return dump_json(report)
