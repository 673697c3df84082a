"""Parsing and serialization of system documents, series, and normal forms.

A system document is JSON of the form

    {
      "variables": "real" | "complex",
      "f1": [ {"exponents": [i, j, k, l], "coeff": "p/q" | ["p/q", "r/s"]}, ... ],
      "f2": [ ... ],
      "order": N
    }

For "real" variables the exponents are powers of x1^i xi1^j x2^k xi2^l; for
"complex" they are powers of z1^a1 z2^a2 zbar1^b1 zbar2^b2.  Coefficients
are exact rational strings ("p/q"), or a [real, imaginary] pair of them;
floats are rejected so nothing silently loses exactness.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .birkhoff import SystemSpec, extract_leading
from .errors import ParseError, ValidationError
from .indices import MultiIndex
from .rationals import GaussianRational
from .series import BivariateSeries, FormalSeries, from_real_basis, to_real_basis

REAL, COMPLEX = "real", "complex"


def _parse_fraction(text, where: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ParseError(f"{where}: coefficient component {text!r} must be an "
                         "exact rational string like \"-3/4\"")
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: {text!r} is not an exact rational") from exc


def parse_coefficient(raw, where: str) -> GaussianRational:
    if isinstance(raw, (str, int)) and not isinstance(raw, bool):
        return GaussianRational(_parse_fraction(raw, where))
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        return GaussianRational(_parse_fraction(raw[0], where),
                                _parse_fraction(raw[1], where))
    raise ParseError(f"{where}: coefficient must be \"p/q\" or [\"p/q\", \"r/s\"], "
                     f"got {raw!r}")


def _parse_terms(raw_terms, variables: str, order: int, label: str) -> FormalSeries:
    if not isinstance(raw_terms, list):
        raise ParseError(f"{label} must be a list of terms")
    real_poly = {}
    complex_terms = {}
    for pos, raw in enumerate(raw_terms):
        where = f"{label} term {pos}"
        if not isinstance(raw, dict) or set(raw) - {"exponents", "coeff"}:
            raise ParseError(f"{where}: expected an object with 'exponents' and 'coeff'")
        expo = raw.get("exponents")
        if (not isinstance(expo, list) or len(expo) != 4
                or not all(isinstance(e, int) and not isinstance(e, bool) and e >= 0
                           for e in expo)):
            raise ParseError(f"{where}: 'exponents' must be 4 nonnegative integers")
        coeff = parse_coefficient(raw.get("coeff"), where)
        if sum(expo) > order:
            raise ValidationError(
                f"{where}: degree {sum(expo)} exceeds the truncation order {order}")
        key = tuple(expo)
        if variables == REAL:
            prev = real_poly.get(key)
            real_poly[key] = coeff if prev is None else prev + coeff
        else:
            prev = complex_terms.get(key)
            complex_terms[key] = coeff if prev is None else prev + coeff
    if variables == REAL:
        return from_real_basis(real_poly, order)
    return FormalSeries(complex_terms, order)


def parse_system_document(doc, order_override: int | None = None) -> SystemSpec:
    """Build a validated SystemSpec from a decoded JSON document.

    Validation reuses the leading-part checks (NonCritical and
    DegenerateLeading surface as ValidationError) and rejects non-real
    series.  Commutation is a pipeline stage, not a parse check.
    """
    if not isinstance(doc, dict):
        raise ParseError("system document must be a JSON object")
    unknown = set(doc) - {"variables", "f1", "f2", "order"}
    if unknown:
        raise ParseError(f"unknown document fields: {sorted(unknown)}")
    variables = doc.get("variables", REAL)
    if variables not in (REAL, COMPLEX):
        raise ParseError(f"'variables' must be 'real' or 'complex', got {variables!r}")
    order = order_override if order_override is not None else doc.get("order")
    if not isinstance(order, int) or isinstance(order, bool) or order < 2:
        raise ParseError("'order' must be an integer >= 2")
    if "f1" not in doc or "f2" not in doc:
        raise ParseError("document needs both 'f1' and 'f2'")
    f1 = _parse_terms(doc["f1"], variables, order, "f1")
    f2 = _parse_terms(doc["f2"], variables, order, "f2")
    for label, f in (("f1", f1), ("f2", f2)):
        if not f.is_real_valued():
            raise ValidationError(f"{label} is not a real-valued series")
    try:
        extract_leading(f1, f2)
    except Exception as exc:  # NonCritical / DegenerateLeading
        raise ValidationError(str(exc)) from exc
    return SystemSpec(f1, f2, order)


def parse_system(path) -> SystemSpec:
    """Parse a system-document file; ParseError carries JSON line context."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
                         f"{exc.msg}") from exc
    return parse_system_document(doc)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def coefficient_document(c: GaussianRational):
    if c.is_real():
        return str(c.re)
    return [str(c.re), str(c.im)]


def series_document(f: FormalSeries, variables: str = COMPLEX) -> dict:
    """JSON form of a series, deterministic term order."""
    if variables == REAL:
        poly = to_real_basis(f)
        terms = [
            {"exponents": list(expo), "coeff": coefficient_document(c)}
            for expo, c in sorted(poly.items(), key=lambda t: (sum(t[0]), t[0]))
        ]
    else:
        terms = [
            {"exponents": list(index), "coeff": coefficient_document(c)}
            for index, c in f.terms()
        ]
    return {"variables": variables, "order": f.truncation_order, "terms": terms}


def bivariate_document(g: BivariateSeries) -> dict:
    return {
        "terms": [
            {"powers": list(expo), "coeff": str(c)}
            for expo, c in g.terms()
        ]
    }


def system_document(spec: SystemSpec, variables: str = REAL) -> dict:
    """Round-trippable document for a SystemSpec."""
    doc_f1 = series_document(spec.f1, variables)
    doc_f2 = series_document(spec.f2, variables)
    return {
        "variables": variables,
        "f1": doc_f1["terms"],
        "f2": doc_f2["terms"],
        "order": spec.order,
    }


def dump_json(document: dict) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(document, indent=2, sort_keys=True) + "\n"
