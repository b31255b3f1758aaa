"""Named example hypersurfaces, ODEs and closed-form Segre graphs.

``m-gamma:<g>``  the rotation-type hypersurface with ``phi33 = g^2/6``; its ODE
                 ``z'' = -z'/w + g^2 z/w^2`` has solutions ``w^g`` and ``w^-g``.
``mm0:<m>``      the ODE ``z'' = (2i/w^m - m/w) z'`` (linear, non-Fuchsian for
                 ``m >= 2``) and the hypersurface data it comes from.
``ex68``         the ODE ``z'' = -(2/w) z'`` with ``m = 2``, Fuchsian, solutions
                 ``c0 + c1/w``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SchemaError
from .hypersurface import P0Hypersurface, recover_hypersurface
from .ode import NonminimalODE
from .series import DEFAULT_ORDER, TruncatedSeries


@dataclass(frozen=True)
class Fixture:
    name: str
    hypersurface: P0Hypersurface
    ode: NonminimalODE


def _zero(order):
    return TruncatedSeries.zero(order)


def m_gamma_hypersurface(gamma: float, order: int = DEFAULT_ORDER) -> P0Hypersurface:
    z = _zero(order)
    phi = {(2, 2): z, (2, 3): z, (3, 2): z, (3, 3): TruncatedSeries.constant(gamma ** 2 / 6, order)}
    return P0Hypersurface(1, "+", phi)


def m_gamma_ode(gamma: float, order: int = DEFAULT_ORDER) -> NonminimalODE:
    z = _zero(order)
    return NonminimalODE(1, z, TruncatedSeries.constant(-1, order), z, z,
                         TruncatedSeries.constant(gamma ** 2, order), z)


def mm0_ode(m: int, order: int = DEFAULT_ORDER) -> NonminimalODE:
    z = _zero(order)
    B = TruncatedSeries.constant(2j, order) - m * TruncatedSeries.monomial(m - 1, 1.0, order)
    return NonminimalODE(m, z, B, z, z, z, z)


def mm0_hypersurface(m: int, order: int = DEFAULT_ORDER) -> P0Hypersurface:
    return recover_hypersurface(mm0_ode(m, order), "+")


def ex68_ode(order: int = DEFAULT_ORDER) -> NonminimalODE:
    z = _zero(order)
    return NonminimalODE(2, z, TruncatedSeries.monomial(1, -2.0, order), z, z, z, z)


def ex68_hypersurface(order: int = DEFAULT_ORDER) -> P0Hypersurface:
    return recover_hypersurface(ex68_ode(order), "+")


def parse_example(example: str, order: int = DEFAULT_ORDER) -> Fixture:
    """Build a fixture from ``m-gamma:<g>``, ``mm0:<m>`` or ``ex68``."""
    name, _, arg = example.partition(":")
    try:
        if name == "m-gamma":
            g = _parse_gamma(arg)
            return Fixture(example, m_gamma_hypersurface(g, order), m_gamma_ode(g, order))
        if name == "mm0":
            m = int(arg)
            if m < 1:
                raise ValueError
            return Fixture(example, mm0_hypersurface(m, order), mm0_ode(m, order))
        if name == "ex68" and not arg:
            return Fixture(example, ex68_hypersurface(order), ex68_ode(order))
    except ValueError:
        pass
    raise SchemaError(f"unknown example {example!r}; expected m-gamma:<g>, mm0:<m> or ex68")


def _parse_gamma(text: str) -> float:
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


# -- closed-form graphs ---------------------------------------------------------

def m_gamma_graph(gamma: float, w, abar: complex = 1.0, bbar: complex = 1.0):
    """``z = (w^g/b^g - b^g/w^g) / (2i a)`` with its first two derivatives."""
    w = np.asarray(w, dtype=complex)
    g = gamma
    bg = bbar ** g
    k = 1 / (2j * abar)
    z = k * (w ** g / bg - bg * w ** (-g))
    dz = k * (g * w ** (g - 1) / bg + g * bg * w ** (-g - 1))
    d2z = k * (g * (g - 1) * w ** (g - 2) / bg - g * (g + 1) * bg * w ** (-g - 2))
    return z, dz, d2z


def log_graph(w, abar: complex = 1.0, bbar: complex = 1.0):
    """``z = log(w/b) / (i a)``, a Segre graph of the hypersurface with all phi zero."""
    w = np.asarray(w, dtype=complex)
    k = 1 / (1j * abar)
    return k * np.log(w / bbar), k / w, -k / w ** 2


def mm0_solution(w, c0: complex = 0.0, c1: complex = 1.0):
    """Closed-form solution ``c0 + c1 (1/2i) e^{-2i/w}`` of the ``mm0:2`` ODE."""
    w = np.asarray(w, dtype=complex)
    e = np.exp(-2j / w)
    return c0 + c1 * e / 2j, c1 * e / w ** 2


def graph_samples(n: int = 50, r_range=(0.5, 1.5), theta_range=(-2.5, 2.5)) -> np.ndarray:
    """Deterministic sample points on an annular sector avoiding the negative axis."""
    rng = np.random.default_rng(20240607)
    r = rng.uniform(*r_range, n)
    th = rng.uniform(*theta_range, n)
    return r * np.exp(1j * th)


def fixture_graph(example: str, w):
    """Closed-form Segre graph ``(z, z', z'')`` of a named example at the points ``w``."""
    name, _, arg = example.partition(":")
    w = np.asarray(w, dtype=complex)
    if name == "m-gamma":
        g = _parse_gamma(arg)
        return log_graph(w) if g == 0 else m_gamma_graph(g, w)
    if name == "mm0" and arg == "2":
        z, dz = mm0_solution(w, 1.0, 1.0)
        return z, dz, dz * (2j / w ** 2 - 2 / w)
    if name == "ex68":
        return 1 + 1 / w, -1 / w ** 2, 2 / w ** 3
    raise SchemaError(f"no closed-form graph for example {example!r}")


__all__ = ["Fixture", "parse_example", "m_gamma_hypersurface", "m_gamma_ode", "mm0_ode",
           "mm0_hypersurface", "ex68_ode", "ex68_hypersurface", "m_gamma_graph", "log_graph",
           "mm0_solution", "graph_samples", "fixture_graph"]
