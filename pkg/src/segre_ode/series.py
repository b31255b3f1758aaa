"""Truncated Laurent series with complex double-precision coefficients.

A series stores the coefficients ``c_v, ..., c_{T-1}`` where ``v`` is the
storage valuation and ``T`` the truncation order.  Exponents ``>= T`` are
unknown (not zero), and every operation propagates ``T`` pessimistically so
that no coefficient is ever fabricated beyond what the inputs determine.

The storage valuation is only where storage starts; leading stored
coefficients may vanish.  The order of vanishing is a tolerance judgment
and is computed by :func:`ord0`.
"""

from __future__ import annotations

import math
import numbers
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DivByZeroSeries, EvalAtPole, RadiusWarning, SchemaError

DEFAULT_ORDER = 32
ORD_TOL = 1e-9
INF = math.inf


def _as_array(coeffs):
    arr = np.array(coeffs, dtype=complex).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    valuation: int
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "valuation", int(self.valuation))
        if not isinstance(self.coeffs, np.ndarray) or self.coeffs.flags.writeable:
            object.__setattr__(self, "coeffs", _as_array(self.coeffs))

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs, valuation=0, order=None):
        """Series ``sum c_j w^(valuation+j)``, zero-padded up to ``order``."""
        arr = np.array(coeffs, dtype=complex).reshape(-1)
        if order is not None:
            n = max(order - valuation, 0)
            if n >= arr.size:
                arr = np.concatenate([arr, np.zeros(n - arr.size, complex)])
            else:
                arr = arr[:n]
        return cls(valuation, arr)

    @classmethod
    def zero(cls, order=DEFAULT_ORDER):
        return cls(0, np.zeros(max(order, 0), complex))

    @classmethod
    def constant(cls, c, order=DEFAULT_ORDER):
        return cls.from_coeffs([c], 0, order)

    @classmethod
    def monomial(cls, k, c=1.0, order=DEFAULT_ORDER):
        """``c * w^k`` known through ``order`` (at least the term itself)."""
        return cls.from_coeffs([c], k, max(order, k + 1))

    # -- basic accessors --------------------------------------------------

    @property
    def truncation_order(self) -> int:
        return self.valuation + self.coeffs.size

    def __len__(self):
        return self.coeffs.size

    def coeff(self, k: int) -> complex:
        """Coefficient of ``w^k``; zero below storage, error beyond truncation."""
        if k >= self.truncation_order:
            raise IndexError(f"w^{k} lies beyond truncation order {self.truncation_order}")
        if k < self.valuation:
            return 0j
        return complex(self.coeffs[k - self.valuation])

    def dense(self, start: int, stop: int) -> np.ndarray:
        """Coefficients for exponents ``start..stop-1`` (zeros outside storage)."""
        out = np.zeros(max(stop - start, 0), complex)
        lo = max(start, self.valuation)
        hi = min(stop, self.truncation_order)
        if hi > lo:
            out[lo - start:hi - start] = self.coeffs[lo - self.valuation:hi - self.valuation]
        return out

    def truncate(self, order: int) -> TruncatedSeries:
        order = min(order, self.truncation_order)
        v = min(self.valuation, order)
        return TruncatedSeries(v, self.coeffs[: order - v])

    def scale(self) -> float:
        return 1.0 + (float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        if isinstance(other, numbers.Number):
            return None
        return NotImplemented

    def __neg__(self):
        return TruncatedSeries(self.valuation, -self.coeffs)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return self._add_scalar(complex(other))
        return add(self, o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return self._add_scalar(-complex(other))
        return add(self, -o)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return TruncatedSeries(self.valuation, self.coeffs * complex(other))
        return mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            c = complex(other)
            if c == 0:
                raise DivByZeroSeries("division by scalar zero")
            return TruncatedSeries(self.valuation, self.coeffs / c)
        return div(self, o)

    def __rtruediv__(self, other):
        if not isinstance(other, numbers.Number):
            return NotImplemented
        return div(TruncatedSeries.constant(other, max(len(self), 1)), self)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        # an exact 1 long enough not to limit the product's truncation
        out = TruncatedSeries.constant(1.0, max(len(self), 1))
        for _ in range(n):
            out = out * self
        return out

    def _add_scalar(self, c: complex):
        if c == 0:
            return self
        T = self.truncation_order
        if T <= 0:
            return self
        v = min(self.valuation, 0)
        arr = self.dense(v, T)
        arr[-v] += c
        return TruncatedSeries(v, arr)

    def shift(self, k: int) -> TruncatedSeries:
        """Multiply by ``w^k`` (exact, any integer ``k``)."""
        return TruncatedSeries(self.valuation + k, self.coeffs)

    def derivative(self) -> TruncatedSeries:
        return differentiate(self)

    def antiderivative(self) -> TruncatedSeries:
        """Termwise antiderivative with zero constant term; requires no ``w^-1`` term."""
        if self.valuation <= -1 < self.truncation_order and abs(self.coeff(-1)) > 0:
            raise ValueError("series has a residue; antiderivative would need log w")
        ks = np.arange(self.valuation, self.truncation_order) + 1
        with np.errstate(divide="ignore", invalid="ignore"):
            arr = np.where(ks != 0, self.coeffs / np.where(ks != 0, ks, 1), 0)
        return TruncatedSeries(self.valuation + 1, arr)

    def conj(self) -> TruncatedSeries:
        return conjugate_bar(self)

    def ord0(self, tolerance: float = ORD_TOL, scale: float | None = None):
        return ord0(self, tolerance, scale)

    def __call__(self, w):
        return evaluate(self, w)

    def holomorphic_part(self, tolerance: float = ORD_TOL) -> TruncatedSeries:
        """Drop negative-exponent storage, which must be numerically zero."""
        if self.valuation >= 0:
            return self
        k = ord0(self, tolerance)
        if k < 0:
            raise ValueError(f"series has a pole of order {-k}")
        return TruncatedSeries(0, self.coeffs[-self.valuation:]) if self.truncation_order > 0 \
            else TruncatedSeries(0, np.zeros(0, complex))

    def allclose(self, other: TruncatedSeries, atol: float = 1e-10, upto: int | None = None) -> bool:
        return max_abs_diff(self, other, upto) <= atol

    def radius_estimate(self) -> float:
        """Ratio-test estimate of the convergence radius from the stored tail."""
        c = np.abs(self.coeffs)
        nz = np.nonzero(c > 1e-300)[0]
        if nz.size < 4:
            return INF
        tail = c[nz[0]:]
        n = tail.size
        if n < 4:
            return INF
        half = tail[n // 2:]
        if np.all(half <= 1e-14 * c.max()):
            return INF
        pairs = [(half[i], half[i + 1]) for i in range(half.size - 1) if half[i + 1] > 0 and half[i] > 0]
        if not pairs:
            return INF
        ratios = [a / b for a, b in pairs]
        return float(np.median(ratios))

    def __repr__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if c != 0:
                terms.append(f"({c:.6g})w^{self.valuation + j}")
        body = " + ".join(terms) if terms else "0"
        return f"TruncatedSeries({body} + O(w^{self.truncation_order}))"

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "valuation": self.valuation,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
            "truncation_order": self.truncation_order,
        }

    @classmethod
    def from_json(cls, obj, order: int | None = None) -> TruncatedSeries:
        """Parse ``{"valuation", "coeffs"[, "truncation_order"]}``.

        Without an explicit ``truncation_order`` the listed coefficients are
        all that is known, unless ``order`` is given, in which case they are
        read as an exact polynomial and zero-padded up to ``order``.
        """
        if not isinstance(obj, dict) or "coeffs" not in obj:
            raise SchemaError("series must be an object with 'valuation' and 'coeffs'")
        extra = set(obj) - {"valuation", "coeffs", "truncation_order"}
        if extra:
            raise SchemaError(f"unexpected series keys {sorted(extra)}")
        v = obj.get("valuation", 0)
        if not isinstance(v, int) or isinstance(v, bool):
            raise SchemaError("series 'valuation' must be an integer")
        coeffs = obj["coeffs"]
        if not isinstance(coeffs, list):
            raise SchemaError("series 'coeffs' must be a list")
        values = [parse_complex(c) for c in coeffs]
        t = obj.get("truncation_order")
        if t is not None:
            if not isinstance(t, int) or isinstance(t, bool) or t < v:
                raise SchemaError("series 'truncation_order' must be an integer >= valuation")
            return cls.from_coeffs(values, v, t)
        if order is not None and order > v + len(values):
            return cls.from_coeffs(values, v, order)
        return cls(v, values)


def parse_complex(c) -> complex:
    if isinstance(c, bool):
        raise SchemaError("boolean is not a number")
    if isinstance(c, numbers.Real):
        return complex(float(c), 0.0)
    if isinstance(c, (list, tuple)) and len(c) == 2 and all(
            isinstance(x, numbers.Real) and not isinstance(x, bool) for x in c):
        return complex(float(c[0]), float(c[1]))
    raise SchemaError(f"expected [re, im] pair, got {c!r}")


def complex_to_json(c) -> list:
    c = complex(c)
    return [c.real, c.imag]


# -- module-level operations ---------------------------------------------------

def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    T = min(a.truncation_order, b.truncation_order)
    v = min(a.valuation, b.valuation, T)
    return TruncatedSeries(v, a.dense(v, T) + b.dense(v, T))


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    v = a.valuation + b.valuation
    T = min(a.valuation + b.truncation_order, b.valuation + a.truncation_order)
    n = T - v
    if n <= 0:
        return TruncatedSeries(T, np.zeros(0, complex))
    prod = np.convolve(a.coeffs[:n], b.coeffs[:n])[:n]
    return TruncatedSeries(v, prod)


def div(a: TruncatedSeries, b: TruncatedSeries, tolerance: float = ORD_TOL) -> TruncatedSeries:
    k = ord0(b, tolerance)
    if k == INF:
        raise DivByZeroSeries("divisor is numerically zero through its truncation order")
    bt = b.coeffs[k - b.valuation:]
    n = min(a.coeffs.size, bt.size)
    q = np.zeros(n, complex)
    ac = a.coeffs
    b0 = bt[0]
    for i in range(n):
        acc = ac[i]
        if i:
            m = min(i, bt.size - 1)
            acc -= np.dot(bt[1:m + 1], q[i - 1::-1][:m])
        q[i] = acc / b0
    return TruncatedSeries(a.valuation - k, q)


def arithmetic(a: TruncatedSeries, b: TruncatedSeries, op: str) -> TruncatedSeries:
    if op == "add":
        return add(a, b)
    if op == "sub":
        return add(a, -b)
    if op == "mul":
        return mul(a, b)
    if op == "div":
        return div(a, b)
    raise ValueError(f"unknown op {op!r}")


def differentiate(s: TruncatedSeries) -> TruncatedSeries:
    ks = np.arange(s.valuation, s.truncation_order)
    d = s.coeffs * ks
    if s.valuation == 0:
        # the w^-1 slot of a derivative of a holomorphic series is structurally zero
        return TruncatedSeries(0, d[1:]) if d.size else TruncatedSeries(-1, d)
    return TruncatedSeries(s.valuation - 1, d)


def ord0(s: TruncatedSeries, tolerance: float = ORD_TOL, scale: float | None = None):
    """Order of vanishing: smallest exponent whose coefficient exceeds ``tolerance*scale``.

    ``scale`` defaults to ``1 + max |c_k|``.  Returns ``math.inf`` when no
    stored coefficient clears the threshold.
    """
    if scale is None:
        scale = s.scale()
    idx = np.nonzero(np.abs(s.coeffs) > tolerance * scale)[0]
    if idx.size == 0:
        return INF
    return s.valuation + int(idx[0])


def conjugate_bar(s: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(s.valuation, np.conj(s.coeffs))


def evaluate(s: TruncatedSeries, w, warn: bool = True) -> complex:
    """Partial sum of the stored terms at ``w``.

    Warns with :class:`RadiusWarning` when ``|w|`` exceeds the ratio-test
    radius estimate.
    """
    w = complex(w)
    if w == 0:
        if s.valuation < 0:
            raise EvalAtPole("evaluation at w=0 of a series with negative valuation")
        return complex(s.coeffs[0]) if s.valuation == 0 and s.coeffs.size else 0j
    if warn and abs(w) > s.radius_estimate():
        warnings.warn(f"|w|={abs(w):.3g} exceeds estimated radius {s.radius_estimate():.3g}",
                      RadiusWarning, stacklevel=2)
    acc = 0j
    for c in s.coeffs[::-1]:
        acc = acc * w + c
    return acc * w ** s.valuation


def max_abs_diff(a: TruncatedSeries, b: TruncatedSeries, upto: int | None = None) -> float:
    """Largest coefficient difference over the exponents both series determine."""
    T = min(a.truncation_order, b.truncation_order)
    if upto is not None:
        T = min(T, upto)
    v = min(a.valuation, b.valuation)
    if T <= v:
        return 0.0
    return float(np.max(np.abs(a.dense(v, T) - b.dense(v, T))))


def poly_eval(coeffs, z):
    """Evaluate ``sum coeffs[k] z^k`` for plain numbers (lowest degree first)."""
    acc = 0j
    for c in reversed(list(coeffs)):
        acc = acc * z + c
    return acc
