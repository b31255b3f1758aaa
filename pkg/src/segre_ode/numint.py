"""Numerical continuation of solutions of the singular ODE in the punctured disc.

Solutions are carried in the state ``(z, u)`` with ``u = w z'``, which obeys

    dz/dw = u / w
    du/dw = u / w + (A z + B) u / w^m + (C z^3 + D z^2 + E z + F) / w^(2m-1)

and is integrated along parametrized paths with an embedded Dormand-Prince
5(4) pair.  On top of the integrator sit monodromy matrices (linear case),
single-solution branching probes, growth-exponent fits along rays, the
associated linear-fractional map of a linear ODE and Segre-graph residuals.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NotLinear, PathTooClose, Psi1Vanishes, RadiusWarning, SchemaError, StepUnderflow
from .ode import NonminimalODE, ReducedODE

ATOL = 1e-10
RTOL = 1e-10
TRIVIAL_TOL = 1e-6
DEFAULT_RADIUS = 0.5
DEFAULT_CLEARANCE = 1e-3


# -- Dormand-Prince 5(4) tableau ----------------------------------------------

_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


# -- paths ----------------------------------------------------------------------

@dataclass(frozen=True)
class StepControl:
    atol: float = ATOL
    rtol: float = RTOL
    max_step: float | None = None  # in arc length; default depends on the path
    max_steps: int = 200_000
    fixed_steps: int | None = None  # fixed-step mode (order checks)

    def __post_init__(self):
        if self.atol <= 0 or self.rtol <= 0:
            raise ValueError("integrator tolerances must be positive")


@dataclass(frozen=True)
class _Piece:
    kind: str
    t0: float
    t1: float
    a: complex  # circle: radius*e^{i theta0}; segment: start
    b: complex  # circle: angular direction (+1/-1); segment: end
    speed: float  # |dw/dt|

    def w(self, t):
        if self.kind == "circle":
            return self.a * np.exp(1j * self.b.real * t)
        return self.a + t * (self.b - self.a)

    def dw(self, t):
        if self.kind == "circle":
            return 1j * self.b.real * self.a * np.exp(1j * self.b.real * t)
        return self.b - self.a

    def clearance(self) -> float:
        if self.kind == "circle":
            return abs(self.a)
        d = self.b - self.a
        if d == 0:
            return abs(self.a)
        t = min(1.0, max(0.0, -(self.a.conjugate() * d).real / abs(d) ** 2))
        return abs(self.a + t * d)


@dataclass(frozen=True)
class PathSpec:
    """A circle, a segment or a polyline in the punctured w-plane."""

    kind: str = "circle"
    radius: float = DEFAULT_RADIUS
    theta0: float = 0.0
    turns: float = 1.0
    points: tuple = ()
    clearance: float = DEFAULT_CLEARANCE
    control: StepControl = field(default_factory=StepControl)

    @classmethod
    def circle(cls, radius=DEFAULT_RADIUS, theta0=0.0, turns=1.0, **kw):
        return cls("circle", float(radius), float(theta0), float(turns), **kw)

    @classmethod
    def segment(cls, start, end, **kw):
        return cls("segment", points=(complex(start), complex(end)), **kw)

    @classmethod
    def polyline(cls, points, **kw):
        pts = tuple(complex(p) for p in points)
        if len(pts) < 2:
            raise ValueError("a polyline needs at least two points")
        return cls("polyline", points=pts, **kw)

    @property
    def start(self) -> complex:
        if self.kind == "circle":
            return complex(self.radius * np.exp(1j * self.theta0))
        return self.points[0]

    @property
    def end(self) -> complex:
        if self.kind == "circle":
            return complex(self.radius * np.exp(1j * (self.theta0 + 2 * np.pi * self.turns)))
        return self.points[-1]

    def pieces(self):
        if self.kind == "circle":
            if self.radius <= 0:
                raise ValueError("circle radius must be positive")
            direction = 1.0 if self.turns >= 0 else -1.0
            span = 2 * np.pi * abs(self.turns)
            return [_Piece("circle", 0.0, span, self.start, complex(direction), self.radius)]
        if self.kind in ("segment", "polyline"):
            return [_Piece("segment", 0.0, 1.0, a, b, abs(b - a))
                    for a, b in zip(self.points[:-1], self.points[1:])]
        raise ValueError(f"unknown path kind {self.kind!r}")

    def min_abs(self) -> float:
        return min(p.clearance() for p in self.pieces())

    def max_abs(self) -> float:
        if self.kind == "circle":
            return self.radius
        return max(abs(p) for p in self.points)

    def to_json(self):
        if self.kind == "circle":
            return {"kind": "circle", "radius": self.radius, "theta0": self.theta0,
                    "turns": self.turns}
        return {"kind": self.kind, "points": [[p.real, p.imag] for p in self.points]}

    @classmethod
    def from_json(cls, obj, **kw) -> PathSpec:
        if not isinstance(obj, dict) or "kind" not in obj:
            raise SchemaError("path must be an object with a 'kind'")
        kind = obj["kind"]
        try:
            if kind == "circle":
                return cls.circle(float(obj.get("radius", DEFAULT_RADIUS)),
                                  float(obj.get("theta0", 0.0)), float(obj.get("turns", 1)), **kw)
            pts = [complex(p[0], p[1]) if isinstance(p, list) else complex(p)
                   for p in obj["points"]]
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise SchemaError(f"malformed path: {exc}") from None
        if kind == "segment" and len(pts) == 2:
            return cls.segment(*pts, **kw)
        if kind == "polyline" and len(pts) >= 2:
            return cls.polyline(pts, **kw)
        raise SchemaError(f"malformed path of kind {kind!r}")


# -- right-hand side -------------------------------------------------------------

class _Field:
    """Vectorized right-hand side of the ``(z, u)`` system for one ODE."""

    def __init__(self, ode):
        if isinstance(ode, ReducedODE):
            ode = ode.as_nonminimal()
        self.ode = ode
        self.m = ode.m
        L = max(1, min(s.truncation_order for s in ode.coefficients))
        coef = np.array([s.dense(0, L) for s in ode.coefficients])
        # polynomial coefficients need no powers beyond their degree
        nz = np.nonzero(np.any(coef != 0, axis=0))[0]
        L = int(nz[-1]) + 1 if nz.size else 1
        self.coef = coef[:, :L]
        self.powers = np.arange(L)
        self.radius = min(s.radius_estimate() for s in ode.coefficients)

    def coefficients_at(self, w):
        return self.coef @ (w ** self.powers)

    def __call__(self, w, y):
        a, b, c, d, e, f = self.coefficients_at(w)
        z, u = y[0], y[1]
        dz = u / w
        du = dz + (a * z + b) * u / w ** self.m \
            + (((c * z + d) * z + e) * z + f) / w ** (2 * self.m - 1)
        return np.array([dz, du])


def _field(ode):
    return ode if isinstance(ode, _Field) else _Field(ode)


@dataclass
class IntegrationResult:
    w_end: complex
    z: np.ndarray
    dz: np.ndarray
    error_estimate: float
    steps: int
    rejected: int

    @property
    def state(self) -> np.ndarray:
        return np.array([self.z, self.dz])


def _dopri_piece(f, piece: _Piece, y, control: StepControl, max_arc: float):
    """Integrate ``y`` over one path piece; returns (y, error, steps, rejected)."""

    def rhs(t, y_):
        return piece.dw(t) * f(piece.w(t), y_)

    t, t1 = piece.t0, piece.t1
    span = t1 - t
    h_max = span if piece.speed == 0 else min(span, max_arc / piece.speed)
    steps = rejected = 0
    err_total = 0.0
    if control.fixed_steps:
        h = span / control.fixed_steps
        for _ in range(control.fixed_steps):
            y, _ = _dopri_step(rhs, t, y, h, rhs(t, y))
            t += h
        return y, 0.0, control.fixed_steps, 0
    h = min(h_max, 0.01 * span)
    k1 = rhs(t, y)
    h_min = 1e-13 * span
    while t < t1:
        if t + h > t1:
            h = t1 - t
        y_new, (err_vec, k_last) = _dopri_step(rhs, t, y, h, k1)
        sc = control.atol + control.rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(err_vec) / sc)) if y.size else 0.0
        if not np.isfinite(err):
            err = np.inf
        if err <= 1.0:
            t += h
            y = y_new
            k1 = k_last
            err_total += float(np.max(np.abs(err_vec)))
            steps += 1
            factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            rejected += 1
            factor = max(0.1, 0.9 * err ** -0.2) if np.isfinite(err) else 0.1
        h = min(h_max, h * factor)
        if t < t1 and h < h_min:
            raise StepUnderflow(f"step size underflow at w = {piece.w(t):.6g}")
        if steps + rejected > control.max_steps:
            raise StepUnderflow(f"step budget {control.max_steps} exhausted at w = {piece.w(t):.6g}")
    return y, err_total, steps, rejected


_A_ROWS = [np.array(row) for row in _A]


def _dopri_step(rhs, t, y, h, k1):
    ks = np.empty((7,) + y.shape, dtype=complex)
    ks[0] = k1
    for i in range(1, 7):
        yi = y + h * np.tensordot(_A_ROWS[i], ks[:i], axes=1)
        ks[i] = rhs(t + _C[i] * h, yi)
    y_new = y + h * np.tensordot(_B5, ks, axes=1)
    err = h * np.tensordot(_E, ks, axes=1)
    return y_new, (err, ks[6])


def integrate_path(ode, init, path: PathSpec, control: StepControl | None = None,
                   warn: bool = True) -> IntegrationResult:
    """Continue the solution with ``(z, z')`` = ``init`` at ``path.start`` to ``path.end``.

    ``init`` may hold arrays, in which case several solutions are transported
    together.
    """
    fld = _field(ode)
    control = control or path.control
    if path.min_abs() < path.clearance:
        raise PathTooClose(f"path comes within {path.min_abs():.3g} of w = 0 "
                           f"(clearance {path.clearance:.3g})")
    if warn and path.max_abs() > fld.radius:
        warnings.warn(f"path reaches |w| = {path.max_abs():.3g} beyond the estimated "
                      f"convergence radius {fld.radius:.3g}", RadiusWarning, stacklevel=2)
    z0 = np.asarray(init[0], dtype=complex)
    dz0 = np.asarray(init[1], dtype=complex)
    w0 = path.start
    y = np.array([z0, w0 * dz0])
    err = 0.0
    steps = rejected = 0
    for piece in path.pieces():
        max_arc = control.max_step if control.max_step else piece.clearance() / 64
        y, e, s, r = _dopri_piece(fld, piece, y, control, max_arc)
        err += e
        steps += s
        rejected += r
    w1 = path.end
    return IntegrationResult(w1, y[0], y[1] / w1, err, steps, rejected)


# -- monodromy -------------------------------------------------------------------

@dataclass
class MonodromyReport:
    matrix: np.ndarray | None
    eigenvalues: np.ndarray
    probe_deviation: float | None
    trivial: bool
    tolerance: float
    radius: float
    theta0: float
    turns: float
    method: str
    probes: int = 2
    ode_fingerprint: str | None = None

    def summary(self) -> str:
        if self.method == "linear":
            return ("monodromy matrix trivial" if self.trivial
                    else "monodromy matrix nontrivial")
        if self.trivial:
            return f"no branching detected ({self.probes} probes)"
        return f"branching detected (deviation {self.probe_deviation:.3g})"

    def to_json(self):
        out = {
            "method": self.method,
            "trivial": self.trivial,
            "eigenvalues": [[float(e.real), float(e.imag)] for e in self.eigenvalues],
            "tolerance": self.tolerance,
            "radius": self.radius,
            "theta0": self.theta0,
            "turns": self.turns,
            "probes": self.probes,
            "summary": self.summary(),
        }
        if self.matrix is not None:
            out["matrix"] = [[[float(c.real), float(c.imag)] for c in row] for row in self.matrix]
        if self.probe_deviation is not None:
            out["probe_deviation"] = self.probe_deviation
        return out


def _nonminimal(ode):
    return ode.as_nonminimal() if isinstance(ode, ReducedODE) else ode


def monodromy_linear(ode, radius: float = DEFAULT_RADIUS, theta0: float = 0.0,
                     turns: float = 1.0, tolerance: float = TRIVIAL_TOL,
                     control: StepControl | None = None) -> MonodromyReport:
    """Monodromy matrix of a linear ODE in the basis ``(z, z') = (1, 0), (0, 1)``.

    Column ``j`` of the matrix is the continuation of the ``j``-th basis
    solution, written in the same basis at the basepoint.
    """
    nm = _nonminimal(ode)
    if not nm.is_linear():
        raise NotLinear("monodromy_linear needs A = C = D = F = 0")
    path = PathSpec.circle(radius, theta0, turns)
    res = integrate_path(nm, (np.array([1, 0]), np.array([0, 1])), path, control)
    M = np.array([res.z, res.dz], dtype=complex)
    ev = np.linalg.eigvals(M)
    ev = ev[np.lexsort((ev.real, ev.imag))]
    trivial = bool(np.linalg.norm(M - np.eye(2)) < tolerance)
    return MonodromyReport(M, ev, None, trivial, tolerance, radius, theta0, turns, "linear",
                           2, nm.fingerprint())


DEFAULT_PROBES = ((1.0, 1.0), (0.3 - 0.2j, -0.7 + 0.4j), (-0.5j, 0.25))


def monodromy_probe(ode, init=None, radius: float = DEFAULT_RADIUS, theta0: float = 0.0,
                    turns: float = 1.0, tolerance: float = TRIVIAL_TOL,
                    control: StepControl | None = None) -> MonodromyReport:
    """Transport one or more solutions around the loop and measure the mismatch.

    The deviation is ``|end - start|`` in ``(z, z')``; the verdict is trivial
    when it is below ``tolerance * max(1, |start|)`` for every probe.
    """
    nm = _nonminimal(ode)
    inits = DEFAULT_PROBES if init is None else [init]
    path = PathSpec.circle(radius, theta0, turns)
    worst = 0.0
    trivial = True
    for z0, dz0 in inits:
        res = integrate_path(nm, (complex(z0), complex(dz0)), path, control)
        start = np.array([z0, dz0], dtype=complex)
        dev = float(np.linalg.norm(res.state - start))
        worst = max(worst, dev)
        if dev >= tolerance * max(1.0, float(np.linalg.norm(start))):
            trivial = False
    ev = np.array([np.nan + 0j, np.nan + 0j])
    return MonodromyReport(None, ev, worst, trivial, tolerance, radius, theta0, turns, "probe",
                           len(inits), nm.fingerprint())


def monodromy(ode, radius=DEFAULT_RADIUS, theta0=0.0, turns=1.0, tolerance=TRIVIAL_TOL,
              control=None) -> MonodromyReport:
    """Matrix monodromy for linear ODEs, probes otherwise."""
    nm = _nonminimal(ode)
    if nm.is_linear():
        return monodromy_linear(nm, radius, theta0, turns, tolerance, control)
    return monodromy_probe(nm, None, radius, theta0, turns, tolerance, control)


# -- growth ----------------------------------------------------------------------

SLOPE_SPREAD = 0.1
FIT_RESIDUAL = 0.05
# slope fits do not need the tight loop tolerances
GROWTH_CONTROL = StepControl(atol=1e-8, rtol=1e-8)
OVERFLOW_LOG = 500.0


@dataclass
class GrowthReport:
    theta: float
    exponent: float
    residual: float
    verdict: str
    window_slopes: list
    note: str = ""
    ode_fingerprint: str | None = None
    diverging: bool = False

    @property
    def super_polynomial(self) -> bool:
        """Irregular with slopes that keep growing window after window.

        A mixture of power laws can also spread the window slopes, but its
        local slope settles; exponential growth makes it blow up.
        """
        return self.verdict == "irregular" and self.diverging

    def to_json(self):
        return {"theta": self.theta, "exponent": self.exponent, "residual": self.residual,
                "verdict": self.verdict, "window_slopes": self.window_slopes, "note": self.note,
                "diverging": self.diverging,
                "slope_spread_tol": SLOPE_SPREAD, "fit_residual_tol": FIT_RESIDUAL}


def growth_exponent(ode, init=(1.0, 1.0), theta: float = 0.0, r0: float = DEFAULT_RADIUS,
                    r_min: float | None = None, windows: int = 5, samples_per_window: int = 8,
                    control: StepControl | None = None) -> GrowthReport:
    """Fit ``log |(z, w z')|`` against ``log(1/t)`` along ``w = t e^{i theta}``.

    The fit runs from ``t = r0`` down to ``r_min`` (default ``r0 / 2^windows``).
    The verdict is ``irregular`` when slopes of the dyadic windows spread by
    more than 0.1, when the overall fit is not linear, or when the step size
    underflows on the way in.
    """
    nm = _nonminimal(ode)
    if r_min is None:
        r_min = r0 / 2 ** windows
    if not 0 < r_min < r0:
        raise ValueError("growth_exponent needs 0 < r_min < r0")
    windows = max(1, int(round(math.log2(r0 / r_min))))
    n = windows * samples_per_window
    ts = r0 * (r_min / r0) ** (np.arange(n + 1) / n)
    direction = np.exp(1j * theta)
    ws = ts * direction
    z, dz = complex(init[0]), complex(init[1])
    logs = [math.log(np.hypot(abs(z), abs(ws[0] * dz)))]
    fp = nm.fingerprint()
    fld = _Field(nm)
    control = control or GROWTH_CONTROL
    for k in range(n):
        path = PathSpec.segment(ws[k], ws[k + 1], clearance=min(r_min / 2, DEFAULT_CLEARANCE))
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                res = integrate_path(fld, (z, dz), path, control, warn=False)
        except StepUnderflow as exc:
            return GrowthReport(theta, math.inf, math.inf, "irregular", [],
                                f"step underflow at t = {ts[k]:.4g}: {exc}", fp, True)
        z, dz = complex(res.z), complex(res.dz)
        norm = np.hypot(abs(z), abs(ws[k + 1] * dz))
        if not np.isfinite(norm) or norm == 0:
            return GrowthReport(theta, math.inf, math.inf, "irregular", [],
                                f"state degenerated at t = {ts[k + 1]:.4g}", fp, not np.isfinite(norm))
        logs.append(math.log(norm))
        if logs[-1] > OVERFLOW_LOG:
            return GrowthReport(theta, math.inf, math.inf, "irregular", [],
                                f"|state| exceeded e^{OVERFLOW_LOG:g} at t = {ts[k + 1]:.4g}",
                                fp, True)
    x = np.log(1 / ts)
    yv = np.array(logs)
    slope, icpt = np.polyfit(x, yv, 1)
    resid = float(np.sqrt(np.mean((yv - (slope * x + icpt)) ** 2)))
    wslopes = []
    for j in range(windows):
        sl = slice(j * samples_per_window, (j + 1) * samples_per_window + 1)
        wslopes.append(float(np.polyfit(x[sl], yv[sl], 1)[0]))
    spread = max(wslopes) - min(wslopes)
    irregular = spread > SLOPE_SPREAD or resid > FIT_RESIDUAL
    note = f"window slope spread {spread:.3g}, fit residual {resid:.3g}"
    return GrowthReport(theta, float(-slope), resid, "irregular" if irregular else "moderate",
                        wslopes, note, fp, _diverging(wslopes))


def _diverging(slopes) -> bool:
    inc = np.diff(slopes)
    if inc.size == 0 or np.any(inc <= 0) or inc[-1] <= SLOPE_SPREAD:
        return False
    return bool(inc.size == 1 or inc[-1] >= 0.5 * inc[-2])


# -- associated map of a linear ODE ------------------------------------------------

def collinearity_residual(points) -> float:
    """Relative distance of points in C^2 from the best complex affine line."""
    P = np.asarray(points, dtype=complex)
    if P.shape[0] < 3:
        return 0.0
    X = P - P.mean(axis=0)
    s = np.linalg.svd(X, compute_uv=False)
    if s[0] == 0:
        return 0.0
    return float(s[-1] / s[0])


@dataclass
class AssociatedMap:
    """Evaluator ``(z, w) -> (z / psi1(w), psi2(w) / psi1(w))`` for a linear ODE."""

    ode: NonminimalODE
    basepoint: complex
    init1: tuple
    init2: tuple
    control: StepControl = field(default_factory=StepControl)
    psi_tol: float = 1e-12

    def psi(self, ws):
        """Continue ``psi1, psi2`` from the basepoint through the points ``ws`` in order."""
        ws = np.atleast_1d(np.asarray(ws, dtype=complex))
        state = (np.array([self.init1[0], self.init2[0]], dtype=complex),
                 np.array([self.init1[1], self.init2[1]], dtype=complex))
        prev = self.basepoint
        out = np.zeros((ws.size, 2), complex)
        fld = _Field(self.ode)
        for j, w in enumerate(ws):
            if w != prev:
                res = integrate_path(fld, state, PathSpec.segment(prev, w), self.control, warn=False)
                state = (res.z, res.dz)
                prev = w
            out[j] = state[0]
        return out

    def __call__(self, z, ws):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        psi = self.psi(ws)
        p1 = psi[:, 0]
        scale = max(1.0, float(np.max(np.abs(psi))))
        if np.any(np.abs(p1) < self.psi_tol * scale):
            raise Psi1Vanishes("psi1 vanishes at a sample point")
        return np.stack([z / p1, psi[:, 1] / p1], axis=1)

    def collinearity(self, z, ws) -> float:
        return collinearity_residual(self(z, ws))


def associated_map_linear(ode, basepoint: complex = 1.0, init1=(1.0, 0.0), init2=(0.0, 1.0),
                          control: StepControl | None = None) -> AssociatedMap:
    nm = _nonminimal(ode)
    if not nm.is_linear():
        raise NotLinear("associated_map_linear needs A = C = D = F = 0")
    return AssociatedMap(nm, complex(basepoint), tuple(init1), tuple(init2),
                         control or StepControl())


# -- Segre residual -------------------------------------------------------------

def segre_residual(ode, w, z, dz, d2z) -> float:
    """Largest ``|z'' - (Az+B) z'/w^m - (Cz^3+Dz^2+Ez+F)/w^(2m)|`` over the samples."""
    nm = _nonminimal(ode)
    w, z, dz, d2z = (np.atleast_1d(np.asarray(x, dtype=complex)) for x in (w, z, dz, d2z))
    if np.any(w == 0):
        raise PathTooClose("Segre residual samples must avoid w = 0")
    fld = _Field(nm)
    res = []
    for j in range(w.size):
        a, b, c, d, e, f = fld.coefficients_at(w[j])
        rhs = (a * z[j] + b) * dz[j] / w[j] ** nm.m \
            + (((c * z[j] + d) * z[j] + e) * z[j] + f) / w[j] ** (2 * nm.m)
        res.append(abs(d2z[j] - rhs))
    return float(max(res)) if res else 0.0


__all__ = ["PathSpec", "StepControl", "IntegrationResult", "MonodromyReport", "GrowthReport",
           "AssociatedMap", "integrate_path", "monodromy_linear", "monodromy_probe", "monodromy",
           "growth_exponent", "associated_map_linear", "collinearity_residual", "segre_residual"]
