"""The associated singular ODE

    z'' = (1/w^m)(A z + B) z' + (1/w^(2m))(C z^3 + D z^2 + E z + F)

and the operations on it: structural relation checks, Fuchsian
classification, reduction to Briot-Bouquet form, extension verdicts and
reconstruction of the ODE from a linear-fractional map.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .errors import (DegenerateMap, InconsistentInputs, NotFuchsian, PoleAfterReduction,
                     SchemaError)
from .series import INF, ORD_TOL, TruncatedSeries, conjugate_bar, max_abs_diff, ord0

NAMES = ("A", "B", "C", "D", "E", "F")
RELATION_TOL = 1e-10
# an infinite order on a series shorter than this is reported as low-confidence
SHORT_SERIES = 8


def _sign_value(sign) -> int:
    if sign in (1, "+", "positive", "pos"):
        return 1
    if sign in (-1, "-", "negative", "neg"):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def _pole_free(s: TruncatedSeries, name: str) -> TruncatedSeries:
    try:
        return s.holomorphic_part()
    except ValueError as exc:
        raise PoleAfterReduction(f"coefficient {name}: {exc}") from None


@dataclass(frozen=True)
class NonminimalODE:
    m: int
    A: TruncatedSeries
    B: TruncatedSeries
    C: TruncatedSeries
    D: TruncatedSeries
    E: TruncatedSeries
    F: TruncatedSeries

    def __post_init__(self):
        if int(self.m) < 1:
            raise ValueError("m must be a positive integer")
        for name in NAMES:
            s = getattr(self, name)
            if s.valuation < 0:
                object.__setattr__(self, name, _pole_free(s, name))

    @property
    def coefficients(self):
        return tuple(getattr(self, n) for n in NAMES)

    @property
    def order(self) -> int:
        return min(s.truncation_order for s in self.coefficients)

    def is_linear(self, tol: float = ORD_TOL) -> bool:
        return all(ord0(getattr(self, n), tol) == INF for n in "ACDF")

    def rhs(self, w, z, dz):
        """Right-hand side ``z''`` at a point (for residual checks)."""
        a, b, c, d, e, f = (s(w) for s in self.coefficients)
        return (a * z + b) * dz / w ** self.m + (((c * z + d) * z + e) * z + f) / w ** (2 * self.m)

    def to_json(self) -> dict:
        out = {"schema": 1, "m": self.m}
        out.update({n: getattr(self, n).to_json() for n in NAMES})
        return out

    @classmethod
    def from_json(cls, obj, order: int | None = None) -> NonminimalODE:
        if not isinstance(obj, dict):
            raise SchemaError("ODE must be a JSON object")
        m = obj.get("m")
        if not isinstance(m, int) or isinstance(m, bool) or m < 1:
            raise SchemaError("ODE field 'm' must be a positive integer")
        missing = [n for n in NAMES if n not in obj]
        if missing:
            raise SchemaError(f"ODE is missing coefficients {missing}")
        try:
            return cls(m, *(TruncatedSeries.from_json(obj[n], order) for n in NAMES))
        except PoleAfterReduction as exc:
            raise SchemaError(f"ODE coefficients must be holomorphic at 0: {exc}") from None

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha1(blob).hexdigest()[:16]


@dataclass(frozen=True)
class ReducedODE:
    """``Z'' = (1/W)(A^ Z + B^) Z' + (1/W^2)(C^ Z^3 + D^ Z^2 + E^ Z + F^)``.

    ``P_coeffs`` is ``(A^, B^)`` and ``Q_coeffs`` is ``(C^, D^, E^, F^)``,
    highest z-degree first.
    """

    P_coeffs: tuple
    Q_coeffs: tuple
    l: int = 0

    def __post_init__(self):
        object.__setattr__(self, "P_coeffs", tuple(_pole_free(s, "P") for s in self.P_coeffs))
        object.__setattr__(self, "Q_coeffs", tuple(_pole_free(s, "Q") for s in self.Q_coeffs))
        if len(self.P_coeffs) != 2 or len(self.Q_coeffs) != 4:
            raise ValueError("P needs 2 coefficient series and Q needs 4")

    @property
    def m(self) -> int:
        return 1

    @property
    def coefficients(self):
        return self.P_coeffs + self.Q_coeffs

    @property
    def order(self) -> int:
        return min(s.truncation_order for s in self.coefficients)

    def as_nonminimal(self) -> NonminimalODE:
        return NonminimalODE(1, *self.coefficients)

    def is_linear(self, tol: float = ORD_TOL) -> bool:
        return self.as_nonminimal().is_linear(tol)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "kind": "reduced",
            "l": self.l,
            "P": [s.to_json() for s in self.P_coeffs],
            "Q": [s.to_json() for s in self.Q_coeffs],
        }

    @classmethod
    def from_json(cls, obj, order: int | None = None) -> ReducedODE:
        if not isinstance(obj, dict) or "P" not in obj or "Q" not in obj:
            raise SchemaError("reduced ODE needs 'P' (2 series) and 'Q' (4 series)")
        P, Q = obj["P"], obj["Q"]
        if not (isinstance(P, list) and len(P) == 2 and isinstance(Q, list) and len(Q) == 4):
            raise SchemaError("reduced ODE needs 'P' (2 series) and 'Q' (4 series)")
        l = obj.get("l", 0)
        if not isinstance(l, int) or l < 0:
            raise SchemaError("'l' must be a nonnegative integer")
        try:
            return cls(tuple(TruncatedSeries.from_json(s, order) for s in P),
                       tuple(TruncatedSeries.from_json(s, order) for s in Q), l)
        except PoleAfterReduction as exc:
            raise SchemaError(str(exc)) from None

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha1(blob).hexdigest()[:16]


# -- relations -----------------------------------------------------------------

@dataclass
class RelationsReport:
    sign: int
    residuals: dict
    tolerance: float
    passed: bool
    structural_passed: bool

    def to_json(self):
        return {
            "sign": "+" if self.sign > 0 else "-",
            "residuals": self.residuals,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "structural_passed": self.structural_passed,
        }


def expected_C(A: TruncatedSeries) -> TruncatedSeries:
    return -(A * A) / 9


def expected_D(A: TruncatedSeries, B: TruncatedSeries, m: int) -> TruncatedSeries:
    # w^(2m) (A/w^m)' expanded so that no pole appears: w^m A' - m w^(m-1) A
    return (A.derivative().shift(m) - m * A.shift(m - 1)) / 3 - (A * B) / 3


def check_relations(ode: NonminimalODE, sign, tolerance: float = RELATION_TOL) -> RelationsReport:
    """Residuals of ``A = ±3i conj(F)``, ``C = -A^2/9`` and the D relation.

    ``passed`` covers all three; ``structural_passed`` only the C and D
    relations, which hold for any ODE coming from a linear-fractional map
    (the first relation encodes the reality of the hypersurface).
    """
    s = _sign_value(sign)
    A, B, C, D, F = ode.A, ode.B, ode.C, ode.D, ode.F
    diffs = {
        "A=±3i·conj(F)": (A, 3j * s * conjugate_bar(F)),
        "C=-A²/9": (C, expected_C(A)),
        "D=w^2m(A/w^m)'/3-AB/3": (D, expected_D(A, B, ode.m)),
    }
    residuals = {}
    ok = {}
    for key, (lhs, rhs) in diffs.items():
        r = max_abs_diff(lhs, rhs)
        scale = max(lhs.scale(), rhs.scale())
        residuals[key] = r
        ok[key] = r < tolerance * scale
    keys = list(diffs)
    return RelationsReport(s, residuals, tolerance, all(ok.values()),
                           ok[keys[1]] and ok[keys[2]])


# -- Fuchsian classification ---------------------------------------------------

@dataclass
class FuchsianReport:
    fuchsian: bool
    side: str
    m: int
    orders: dict
    conditions: dict
    failed: list
    low_confidence: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    tolerance: float = ORD_TOL

    @property
    def verdict(self) -> str:
        return "Fuchsian" if self.fuchsian else "NonFuchsian"

    def to_json(self):
        return {
            "verdict": self.verdict,
            "fuchsian": self.fuchsian,
            "side": self.side,
            "m": self.m,
            "orders": {k: _ord_json(v) for k, v in self.orders.items()},
            "conditions": self.conditions,
            "failed": self.failed,
            "low_confidence": self.low_confidence,
            "warnings": self.warnings,
            "tol_ord": self.tolerance,
        }


def _ord_json(v):
    return "inf" if v == INF else int(v)


def _low_conf(series_by_name, orders):
    return [n for n, s in series_by_name.items()
            if orders[n] == INF and s.truncation_order < SHORT_SERIES]


def fuchsian_test(subject, tolerance: float = ORD_TOL) -> FuchsianReport:
    """Fuchsian-type test on either a hypersurface or an associated ODE.

    ODE side: ``ord B >= m-1``, ``ord E >= 2m-2`` and ``2 ord F >= 3(m-1)``;
    a violation of ``ord A = ord F`` is reported as a warning.  Hypersurface side: ``ord phi22 >= m-1``,
    ``ord phi33 >= 2m-2``, ``2 ord phi23 >= 3(m-1)``.
    """
    m = subject.m
    if hasattr(subject, "phi"):
        series = {"phi22": subject.phi[(2, 2)], "phi33": subject.phi[(3, 3)],
                  "phi23": subject.phi[(2, 3)]}
        orders = {k: ord0(s, tolerance) for k, s in series.items()}
        conditions = {
            "ord phi22 >= m-1": orders["phi22"] >= m - 1,
            "ord phi33 >= 2m-2": orders["phi33"] >= 2 * m - 2,
            "2 ord phi23 >= 3(m-1)": 2 * orders["phi23"] >= 3 * (m - 1),
        }
        side = "hypersurface"
        warns = []
    else:
        series = {n: getattr(subject, n) for n in "ABEF"}
        orders = {k: ord0(s, tolerance) for k, s in series.items()}
        conditions = {
            "ord B >= m-1": orders["B"] >= m - 1,
            "ord E >= 2m-2": orders["E"] >= 2 * m - 2,
            "2 ord F >= 3(m-1)": 2 * orders["F"] >= 3 * (m - 1),
        }
        side = "ode"
        # ord A = ord F follows from the reality relation, so a mismatch flags
        # inconsistent data rather than a non-Fuchsian equation
        warns = [] if orders["A"] == orders["F"] else [
            "ord A != ord F: the data violates the reality relation A = ±3i conj(F)"]
    failed = [k for k, v in conditions.items() if not v]
    return FuchsianReport(not failed, side, m, orders, conditions, failed,
                          _low_conf(series, orders), warns, tolerance)


# -- reduction -----------------------------------------------------------------

def reduce(ode: NonminimalODE, tolerance: float = ORD_TOL) -> ReducedODE:
    """Substitute ``z = Z W^-l`` with ``l = ord F - m + 1`` (``l = 0`` if ``F = 0``)."""
    report = fuchsian_test(ode, tolerance)
    if not report.fuchsian:
        raise NotFuchsian("ODE is not of Fuchsian type: failed " + ", ".join(report.failed))
    m = ode.m
    ordF = report.orders["F"]
    l = 0 if ordF == INF else int(ordF) - m + 1
    A, B, C, D, E, F = ode.coefficients
    hat = {
        "A": A.shift(-(m + l - 1)),
        "B": B.shift(-(m - 1)) + 2 * l,
        "C": C.shift(-(2 * m + 2 * l - 2)),
        "D": D.shift(-(2 * m + l - 2)) - l * A.shift(-(m + l - 1)),
        "E": E.shift(-(2 * m - 2)) - l * B.shift(-(m - 1)) - l * (l + 1),
        "F": F.shift(l - 2 * m + 2),
    }
    clean = {}
    for n, s in hat.items():
        try:
            clean[n] = s.holomorphic_part(tolerance)
        except ValueError as exc:
            raise PoleAfterReduction(f"reduced coefficient {n}: {exc}") from None
    if ordF != INF and ord0(clean["C"], tolerance) != 0:
        raise PoleAfterReduction("reduced C does not satisfy C^(0) != 0; inconsistent input orders")
    return ReducedODE((clean["A"], clean["B"]), (clean["C"], clean["D"], clean["E"], clean["F"]), l)


# -- extension verdict ---------------------------------------------------------

EXTENDS = "Extends"
BRANCHES = "Branches"
NO_EXTENSION_IRREGULAR = "NoExtensionIrregular"
UNDETERMINED = "Undetermined"


@dataclass
class Verdict:
    verdict: str
    fuchsian: bool
    monodromy_trivial: bool
    reasons: list

    def to_json(self):
        return {"verdict": self.verdict, "fuchsian": self.fuchsian,
                "monodromy_trivial": self.monodromy_trivial, "reasons": self.reasons}


def _reduced_fingerprints(ode: NonminimalODE, fuchsian: bool, tolerance: float) -> set:
    """Fingerprints of the reduced forms a formal solution of ``ode`` may carry."""
    out = set()
    if ode.m == 1:
        A, B, C, D, E, F = ode.coefficients
        out.add(ReducedODE((A, B), (C, D, E, F), 0).fingerprint())
    if fuchsian:
        try:
            out.add(reduce(ode, tolerance).fingerprint())
        except PoleAfterReduction:
            pass
    return out


def extension_verdict(ode: NonminimalODE, monodromy, formal=None, growth=None,
                      tolerance: float = ORD_TOL) -> Verdict:
    """Combine classification, monodromy, formal-solution and growth evidence.

    Never claims more than the evidence licenses: a non-Fuchsian ODE with
    trivial monodromy and no irregular growth is ``Undetermined``.
    """
    fp = ode.fingerprint()
    growth_list = [] if growth is None else (list(growth) if isinstance(growth, (list, tuple))
                                             else [growth])
    fuchs = fuchsian_test(ode, tolerance)
    # a formal solution may be attributed to the reduced form of the same ODE
    formal_fps = {fp}
    if formal is not None:
        formal_fps |= _reduced_fingerprints(ode, fuchs.fuchsian, tolerance)
    checks = [(monodromy, {fp}), (formal, formal_fps)] + [(g, {fp}) for g in growth_list]
    for rep, allowed in checks:
        if rep is not None and getattr(rep, "ode_fingerprint", None) not in (None, *allowed):
            raise InconsistentInputs(f"{type(rep).__name__} was computed for a different ODE")
    reasons = [f"fuchsian_test: {fuchs.verdict}"]
    if not monodromy.trivial:
        reasons.append("nontrivial monodromy: some solution branches around w=0")
        return Verdict(BRANCHES, fuchs.fuchsian, False, reasons)
    reasons.append(monodromy.summary())
    if formal is not None and formal.status == "Obstructed":
        reasons.append(f"formal solution obstructed at r={formal.obstruction[0]}: "
                       "some solution branches in an annulus")
        return Verdict(BRANCHES, fuchs.fuchsian, True, reasons)
    if fuchs.fuchsian:
        reasons.append("Fuchsian type with single-valued solutions: the map extends")
        return Verdict(EXTENDS, True, True, reasons)
    irregular = [g for g in growth_list if g.super_polynomial]
    if irregular:
        g = irregular[0]
        reasons.append(f"super-polynomial growth along ray theta={g.theta:.6g}: "
                       "some solution is not meromorphic at 0")
        return Verdict(NO_EXTENSION_IRREGULAR, False, True, reasons)
    reasons.append("non-Fuchsian with no branching and no irregular growth detected")
    return Verdict(UNDETERMINED, False, True, reasons)


# -- ODE from a linear-fractional map -----------------------------------------

def ode_from_map(alpha, a, beta, b, delta, m: int, tolerance: float = ORD_TOL) -> NonminimalODE:
    """ODE satisfied by the preimages of lines under ``(alpha/(z+delta)+beta, a/(z+delta)+b)``.

    The second-order equation ``w'' = I2 (w')^2 + I3 (w')^3`` of the map is
    linear in ``z`` for ``I2`` and cubic for ``I3``; matching
    ``I2 = -(Az+B)/w^m`` and ``I3 = -(Cz^3+Dz^2+Ez+F)/w^(2m)`` yields the
    six coefficients.
    """
    d = lambda s: s.derivative()  # noqa: E731
    a1, a2 = d(a), d(d(a))
    al1, al2 = d(alpha), d(d(alpha))
    be1, be2 = d(beta), d(d(beta))
    b1, b2 = d(b), d(d(b))
    de1, de2 = d(delta), d(d(delta))
    jac = a1 * alpha - al1 * a
    if ord0(jac, tolerance) == INF:
        raise DegenerateMap("a'alpha - alpha'a vanishes identically")
    c0 = (a * al2 - alpha * a2) / jac
    c1 = 3 * (b1 * al1 - be1 * a1) / jac
    d0 = de2 + de1 * c0
    d1 = (a2 * al1 - al2 * a1) / jac + de1 * c1
    d2 = (be1 * a2 - b1 * al2 + al1 * b2 - a1 * be2) / jac
    d3 = (be1 * b2 - b1 * be2) / jac
    # I2 = (c0 + c1 delta) + c1 z ; I3 expanded in powers of z
    e3 = d3
    e2 = d2 + 3 * d3 * delta
    e1 = d1 + 2 * d2 * delta + 3 * d3 * delta * delta
    e0 = d0 + d1 * delta + d2 * delta * delta + d3 * delta * delta * delta
    wm, w2m = m, 2 * m
    coeffs = {
        "A": -c1.shift(wm),
        "B": -(c0 + c1 * delta).shift(wm),
        "C": -e3.shift(w2m),
        "D": -e2.shift(w2m),
        "E": -e1.shift(w2m),
        "F": -e0.shift(w2m),
    }
    out = {}
    for n, s in coeffs.items():
        try:
            out[n] = s.holomorphic_part(tolerance)
        except ValueError as exc:
            raise PoleAfterReduction(f"coefficient {n} of the map ODE: {exc}; "
                                     f"m={m} is too small for this map") from None
    return NonminimalODE(m, *(out[n] for n in NAMES))


def ode_from_json_any(obj, order: int | None = None):
    """Parse either a full or a reduced ODE document."""
    if isinstance(obj, dict) and obj.get("kind") == "reduced":
        return ReducedODE.from_json(obj, order)
    return NonminimalODE.from_json(obj, order)


def orders_summary(ode: NonminimalODE, tolerance: float = ORD_TOL) -> dict:
    return {n: _ord_json(ord0(getattr(ode, n), tolerance)) for n in NAMES}


__all__ = [
    "NonminimalODE", "ReducedODE", "RelationsReport", "FuchsianReport", "Verdict",
    "check_relations", "fuchsian_test", "reduce", "extension_verdict", "ode_from_map",
    "EXTENDS", "BRANCHES", "NO_EXTENSION_IRREGULAR", "UNDETERMINED",
]
