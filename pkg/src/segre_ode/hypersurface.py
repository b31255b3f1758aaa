"""Prenormalized nonminimal hypersurface data and the hypersurface/ODE correspondence.

A hypersurface of class P0 is stored through the four coefficient functions
``phi22, phi23, phi32, phi33`` of its exponential defining equation.  These
are the only coefficients that enter the associated ODE.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidHypersurface, RelationsViolated, SchemaError
from .ode import NonminimalODE, _sign_value, check_relations, expected_C, expected_D
from .series import DEFAULT_ORDER, INF, ORD_TOL, TruncatedSeries, conjugate_bar, max_abs_diff, ord0

PHI_KEYS = ((2, 2), (2, 3), (3, 2), (3, 3))
REALITY_TOL = 1e-10


@dataclass(frozen=True)
class P0Hypersurface:
    m: int
    sign: int
    phi: dict

    def __post_init__(self):
        object.__setattr__(self, "sign", _sign_value(self.sign))
        phi = {}
        known = [s.truncation_order for s in self.phi.values() if s is not None]
        order = max(known) if known else DEFAULT_ORDER
        for key in PHI_KEYS:
            s = self.phi.get(key)
            phi[key] = s if s is not None else TruncatedSeries.zero(order)
        extra = set(self.phi) - set(PHI_KEYS)
        if extra:
            raise SchemaError(f"unsupported phi coefficients {sorted(extra)}")
        object.__setattr__(self, "phi", phi)

    @property
    def sign_str(self) -> str:
        return "+" if self.sign > 0 else "-"

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "m": self.m,
            "sign": self.sign_str,
            "phi": {f"{k}{l}": self.phi[(k, l)].to_json() for k, l in PHI_KEYS},
        }

    @classmethod
    def from_json(cls, obj, order: int | None = None) -> P0Hypersurface:
        if not isinstance(obj, dict):
            raise SchemaError("hypersurface must be a JSON object")
        m = obj.get("m")
        if not isinstance(m, int) or isinstance(m, bool):
            raise SchemaError("hypersurface field 'm' must be an integer")
        if obj.get("sign") not in ("+", "-"):
            raise SchemaError("hypersurface field 'sign' must be '+' or '-'")
        raw = obj.get("phi", {})
        if not isinstance(raw, dict):
            raise SchemaError("hypersurface field 'phi' must be an object")
        allowed = {f"{k}{l}": (k, l) for k, l in PHI_KEYS}
        extra = sorted(set(raw) - set(allowed))
        if extra:
            raise SchemaError(f"unsupported phi keys {extra}; only 22, 23, 32, 33 are accepted")
        phi = {allowed[k]: TruncatedSeries.from_json(v, order) for k, v in raw.items()}
        return cls(m, obj["sign"], phi)


@dataclass
class ValidationReport:
    checks: dict
    reality_residual: float
    low_confidence: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self):
        return {"passed": self.passed, "checks": self.checks,
                "reality_residual": self.reality_residual,
                "low_confidence": self.low_confidence}


def validate_hypersurface(h: P0Hypersurface, tolerance: float = REALITY_TOL,
                          tol_ord: float = ORD_TOL) -> ValidationReport:
    """Check ``m >= 1``, ``phi32 = conj(phi23)`` and pole-freeness of the data."""
    p23, p32 = h.phi[(2, 3)], h.phi[(3, 2)]
    reality = max_abs_diff(p32, conjugate_bar(p23))
    checks = {
        "m >= 1": isinstance(h.m, int) and h.m >= 1,
        "phi32 = conj(phi23)": reality < tolerance,
        "pole-free": all(ord0(s, tol_ord) >= 0 for s in h.phi.values()),
    }
    low = [f"phi{k}{l}" for (k, l), s in h.phi.items()
           if ord0(s, tol_ord) == INF and s.truncation_order < 8]
    return ValidationReport(checks, reality, low)


def _w_power(k: int, order: int) -> TruncatedSeries:
    return TruncatedSeries.monomial(k, 1.0, order)


def associate_ode(h: P0Hypersurface) -> NonminimalODE:
    """The ODE satisfied by the Segre graphs of ``h``."""
    report = validate_hypersurface(h)
    if not report.passed:
        failed = [k for k, v in report.checks.items() if not v]
        raise InvalidHypersurface("hypersurface fails " + ", ".join(failed))
    m, s = h.m, h.sign
    p22 = h.phi[(2, 2)].holomorphic_part()
    p23 = h.phi[(2, 3)].holomorphic_part()
    p32 = h.phi[(3, 2)].holomorphic_part()
    p33 = h.phi[(3, 3)].holomorphic_part()
    order = max(s_.truncation_order for s_ in (p22, p23, p32, p33)) + 2 * m
    F = 2 * p23
    A = 6j * s * p32
    B = 2j * s * p22 - _w_power(m - 1, order)
    E = (6 * p33 + (2j * s * (m - 1)) * p22.shift(m - 1) - 8 * p22 * p22
         - (2j * s) * p22.derivative().shift(m))
    C = expected_C(A)
    D = expected_D(A, B, m)
    return NonminimalODE(m, A, B, C, D, E, F)


def recover_hypersurface(ode: NonminimalODE, sign, tolerance: float = 1e-10) -> P0Hypersurface:
    """Invert :func:`associate_ode` for the given sign."""
    s = _sign_value(sign)
    report = check_relations(ode, s, tolerance)
    if not report.passed:
        bad = {k: v for k, v in report.residuals.items()}
        raise RelationsViolated(f"ODE does not satisfy the structural relations: {bad}")
    m = ode.m
    p23 = ode.F / 2
    p32 = ode.A / (6j * s)
    p22 = (ode.B + _w_power(m - 1, ode.B.truncation_order + m)) / (2j * s)
    p33 = (ode.E - (2j * s * (m - 1)) * p22.shift(m - 1) + 8 * p22 * p22
           + (2j * s) * p22.derivative().shift(m)) / 6
    phi = {(2, 2): p22, (2, 3): p23, (3, 2): p32, (3, 3): p33}
    return P0Hypersurface(m, s, phi)


__all__ = ["P0Hypersurface", "ValidationReport", "validate_hypersurface", "associate_ode",
           "recover_hypersurface", "PHI_KEYS"]
