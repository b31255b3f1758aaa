"""Formal holomorphic solutions of Briot-Bouquet type equations.

A reduced equation ``Z'' = (1/W) P(Z,W) Z' + (1/W^2) Q(Z,W)`` is rewritten as
the first-order system ``w z' = u``, ``w u' = (1 + P) u + Q``.  Around a base
root ``z0`` of ``Q(., 0)`` the coefficients ``h_r = (a_r, b_r)`` of
``z = z0 + sum a_r w^r``, ``u = sum b_r w^r`` obey

    (r I - L) h_r = (0, K_r),      L = [[0, 1], [q10, p00]],

where ``K_r`` only depends on ``h_1 .. h_{r-1}``.  A positive integer
eigenvalue of ``L`` is a resonance; if ``K_r`` does not vanish there, no formal
solution through ``z0`` exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import comb

import numpy as np

from .errors import BaseNotRoot, NoRoot
from .ode import ReducedODE
from .series import DEFAULT_ORDER, TruncatedSeries

RESONANCE_TOL = 1e-8
TOL_RES = 1e-9
RESIDUAL_TOL = 1e-9
ROOT_TOL = 1e-9

UNIQUE = "Unique"
RESONANT_SOLVABLE = "ResonantSolvable"
OBSTRUCTED = "Obstructed"


# -- coefficient-array helpers (index = exponent of w) ------------------------

def _series_array(s: TruncatedSeries, n: int) -> np.ndarray:
    """Coefficients of ``s`` at ``w^0 .. w^(n-1)`` (zero-padded beyond truncation)."""
    return s.dense(0, min(n, s.truncation_order)) if n > 0 else np.zeros(0, complex)


def _mul(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, complex)
    prod = np.convolve(a[:n], b[:n])[:n]
    out[:prod.size] = prod
    return out


def _poly_compose(coeffs, z: np.ndarray, n: int) -> np.ndarray:
    """``sum_k c_k(w) z(w)^k`` through ``w^(n-1)``; ``coeffs`` lowest degree first."""
    acc = np.zeros(n, complex)
    for c in reversed(coeffs):
        acc = _mul(acc, z, n)
        acc[:min(n, c.size)] += c[:n]
    return acc


def shift_polynomial(coeffs, z0: complex):
    """Recenter ``sum c_j z^j`` at ``z0``: coefficients of ``z -> z + z0`` (lowest first)."""
    d = len(coeffs)
    out = []
    for k in range(d):
        acc = None
        for j in range(k, d):
            term = coeffs[j] * (comb(j, k) * z0 ** (j - k))
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


# -- base root -----------------------------------------------------------------

def choose_base_root(Q_at_zero, tolerance: float = ROOT_TOL) -> complex:
    """Root of smallest modulus of ``Q(., 0)`` (coefficients highest degree first).

    Ties in modulus are broken by the smallest argument in ``[0, 2pi)``.
    """
    c = np.asarray(Q_at_zero, dtype=complex).ravel()
    scale = 1.0 + (np.max(np.abs(c)) if c.size else 0.0)
    nz = np.nonzero(np.abs(c) > tolerance * scale)[0]
    if nz.size == 0:
        return 0j
    c = c[nz[0]:]
    if c.size == 1:
        raise NoRoot(f"Q(z,0) is the nonzero constant {complex(c[0])}")
    roots = np.roots(c)
    roots = np.array([_polish(c, r) for r in roots])
    roots[np.abs(roots) < tolerance] = 0
    mods = np.abs(roots)
    m0 = mods.min()
    cands = roots[mods <= m0 + tolerance * (1 + m0)]
    args = np.mod(np.angle(cands), 2 * np.pi)
    args[np.isclose(args, 2 * np.pi, atol=1e-12)] = 0.0
    return complex(cands[int(np.argmin(args))])


def _polish(c, r, steps: int = 3):
    dc = np.polyder(c)
    for _ in range(steps):
        d = np.polyval(dc, r)
        if d == 0:
            break
        r = r - np.polyval(c, r) / d
    return complex(r)


# -- linearization --------------------------------------------------------------

@dataclass(frozen=True)
class BBSystem:
    """Briot-Bouquet system recentered at the base root ``z0``.

    ``P`` and ``Q`` hold the recentered z-polynomial coefficients, lowest
    degree first, so that ``P[k]`` multiplies ``(z - z0)^k``.
    """

    P: tuple
    Q: tuple
    z0: complex
    p00: complex
    q10: complex
    q01: complex
    fingerprint: str | None = None

    @property
    def L(self) -> np.ndarray:
        return np.array([[0, 1], [self.q10, self.p00]], dtype=complex)

    @property
    def eigenvalues(self) -> np.ndarray:
        ev = np.roots([1, -self.p00, -self.q10])
        return ev[np.lexsort((ev.imag, -ev.real))]

    @property
    def order(self) -> int:
        return min(s.truncation_order for s in self.P + self.Q)

    def to_json(self):
        from .series import complex_to_json
        return {
            "z0": complex_to_json(self.z0),
            "p00": complex_to_json(self.p00),
            "q10": complex_to_json(self.q10),
            "q01": complex_to_json(self.q01),
            "eigenvalues": [complex_to_json(e) for e in self.eigenvalues],
        }


def _poly_from_reduced(reduced: ReducedODE):
    # ReducedODE stores highest degree first
    return list(reversed(reduced.P_coeffs)), list(reversed(reduced.Q_coeffs))


def linearize(reduced: ReducedODE, z0: complex | None = None,
              tolerance: float = ROOT_TOL) -> BBSystem:
    """Recenter at ``z0`` (default: :func:`choose_base_root`) and extract ``L``."""
    P, Q = _poly_from_reduced(reduced)
    q_at_0 = [s.coeff(0) for s in Q]
    if z0 is None:
        z0 = choose_base_root(list(reversed(q_at_0)), tolerance)
    z0 = complex(z0)
    value = sum(c * z0 ** k for k, c in enumerate(q_at_0))
    scale = 1.0 + max(abs(c) for c in q_at_0)
    if abs(value) > tolerance * scale:
        raise BaseNotRoot(f"|Q(z0,0)| = {abs(value):.3e} at z0 = {z0}")
    Ps = shift_polynomial(P, z0)
    Qs = shift_polynomial(Q, z0)
    p00 = 1 + Ps[0].coeff(0)
    q10 = Qs[1].coeff(0)
    q01 = Qs[0].coeff(1) if Qs[0].truncation_order > 1 else 0j
    return BBSystem(tuple(Ps), tuple(Qs), z0, complex(p00), complex(q10), complex(q01),
                    reduced.fingerprint())


# -- formal solution -------------------------------------------------------------

@dataclass(frozen=True)
class FormalSolution:
    coeffs: tuple
    u_coeffs: tuple
    status: str
    resonances: tuple = ()
    obstruction: tuple | None = None
    residual_order: int | None = None
    z0: complex = 0j
    N: int = 0
    ode_fingerprint: str | None = None
    eigenvalues: tuple = field(default=())

    @property
    def series(self) -> TruncatedSeries:
        """``z(w) = z0 + sum a_r w^r`` as a truncated series."""
        return TruncatedSeries(0, [self.z0, *self.coeffs])

    def to_json(self):
        from .series import complex_to_json
        out = {
            "status": self.status,
            "z0": complex_to_json(self.z0),
            "coeffs": [complex_to_json(c) for c in self.coeffs],
            "u_coeffs": [complex_to_json(c) for c in self.u_coeffs],
            "resonances": list(self.resonances),
            "residual_order": self.residual_order,
            "eigenvalues": [complex_to_json(e) for e in self.eigenvalues],
            "N": self.N,
        }
        if self.obstruction is not None:
            out["obstruction"] = {"r": self.obstruction[0], "abs_K": self.obstruction[1]}
        return out


def _arrays(sys: BBSystem, n: int):
    return ([_series_array(s, n) for s in sys.P], [_series_array(s, n) for s in sys.Q])


def _resonant(r: int, ev, p00: complex, q10: complex, tol: float) -> bool:
    # the characteristic polynomial catches double eigenvalues, whose numerical
    # eigenvalues are only accurate to about sqrt(machine epsilon)
    chi = r * r - p00 * r - q10
    return bool(np.min(np.abs(r - ev)) <= tol or abs(chi) <= tol * (1 + r * r))


def formal_solve(sys: BBSystem, N: int = DEFAULT_ORDER, tol_res: float = TOL_RES,
                 resonance_tol: float = RESONANCE_TOL) -> FormalSolution:
    """Run the coefficient recursion for ``r = 1 .. N``.

    ``N`` is clipped to the truncation order of the system coefficients so
    that no unknown coefficient is ever used.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    N = min(N, sys.order - 1) if sys.order - 1 >= 1 else 1
    n = N + 1
    P, Q = _arrays(sys, n)
    one_plus_P = [p.copy() for p in P]
    one_plus_P[0][0] += 1
    ev = sys.eigenvalues
    L = sys.L
    z = np.zeros(n, complex)  # z - z0
    u = np.zeros(n, complex)
    resonances = []
    status = UNIQUE
    obstruction = None
    last = 0
    for r in range(1, N + 1):
        m = r + 1
        rhs = _mul(_poly_compose(one_plus_P, z[:m], m), u[:m], m) + _poly_compose(Q, z[:m], m)
        K = rhs[r]
        if not _resonant(r, ev, sys.p00, sys.q10, resonance_tol):
            h = np.linalg.solve(r * np.eye(2) - L, np.array([0, K]))
        else:
            scale = 1.0 + max(np.max(np.abs(z[:r])), np.max(np.abs(u[:r])))
            if abs(K) <= tol_res * scale:
                h = np.zeros(2, complex)
                resonances.append(r)
                status = RESONANT_SOLVABLE
            else:
                status = OBSTRUCTED
                obstruction = (r, float(abs(K)))
                break
        z[r], u[r] = h
        last = r
    sol = FormalSolution(
        coeffs=tuple(complex(c) for c in z[1:last + 1]),
        u_coeffs=tuple(complex(c) for c in u[1:last + 1]),
        status=status,
        resonances=tuple(resonances),
        obstruction=obstruction,
        z0=sys.z0,
        N=N,
        ode_fingerprint=sys.fingerprint,
        eigenvalues=tuple(complex(e) for e in ev),
    )
    if status != OBSTRUCTED:
        sol = replace(sol, residual_order=residual(sys, sol))
    return sol


def residual(sys: BBSystem, sol: FormalSolution, tolerance: float = RESIDUAL_TOL):
    """Lowest exponent where ``W^2 Z'' - W P Z' - Q`` is numerically nonzero.

    Returns the truncation order ``N + 1`` when the residual vanishes through
    every computable exponent.
    """
    if sol.status == OBSTRUCTED:
        raise ValueError("residual is undefined for an obstructed solve")
    N = len(sol.coeffs)
    n = min(N + 1, sys.order)
    z = np.zeros(n, complex)
    z[1:n] = np.asarray(sol.coeffs[:n - 1])
    r = np.arange(n)
    w2z2 = r * (r - 1) * z
    wz1 = r * z
    P, Q = _arrays(sys, n)
    res = w2z2 - _mul(_poly_compose(P, z, n), wz1, n) - _poly_compose(Q, z, n)
    scale = 1.0 + max(float(np.max(np.abs(z))), max(float(np.max(np.abs(q))) for q in Q))
    bad = np.nonzero(np.abs(res) > tolerance * scale)[0]
    return int(bad[0]) if bad.size else n


def solve_reduced(reduced: ReducedODE, N: int = DEFAULT_ORDER, tol_res: float = TOL_RES,
                  z0: complex | None = None) -> tuple[BBSystem, FormalSolution]:
    sys = linearize(reduced, z0)
    return sys, formal_solve(sys, N, tol_res)


__all__ = ["BBSystem", "FormalSolution", "choose_base_root", "linearize", "formal_solve",
           "residual", "solve_reduced", "shift_polynomial", "UNIQUE", "RESONANT_SOLVABLE",
           "OBSTRUCTED"]
