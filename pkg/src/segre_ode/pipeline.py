"""End-to-end extension verdict: classify, monodromy, formal solve, growth."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .bbsolver import solve_reduced
from .errors import NoRoot
from .numint import DEFAULT_RADIUS, TRIVIAL_TOL, growth_exponent, monodromy
from .ode import NonminimalODE, extension_verdict, fuchsian_test, reduce
from .series import DEFAULT_ORDER, ORD_TOL

GROWTH_RAYS = 8


@dataclass(frozen=True)
class VerdictParams:
    order: int = DEFAULT_ORDER
    tol_ord: float = ORD_TOL
    tol_res: float = 1e-9
    tol_trivial: float = TRIVIAL_TOL
    loop_radius: float = DEFAULT_RADIUS
    turns: float = 1.0
    rays: int = GROWTH_RAYS
    growth_init: tuple = (1.0, 1.0)


@dataclass
class PipelineResult:
    fuchsian: object
    monodromy: object
    formal: object = None
    growth: list = field(default_factory=list)
    verdict: object = None

    def growth_label(self):
        if not self.growth:
            return None
        return "irregular" if any(g.super_polynomial for g in self.growth) else "moderate"

    def to_json(self):
        out = {
            "fuchsian": self.fuchsian.fuchsian,
            "monodromy_trivial": self.monodromy.trivial,
            "verdict": self.verdict.verdict,
            "reasons": self.verdict.reasons,
            "classification": self.fuchsian.to_json(),
            "monodromy": self.monodromy.to_json(),
        }
        if self.formal is not None:
            out["formal"] = {"status": self.formal.status,
                             "resonances": list(self.formal.resonances),
                             "residual_order": self.formal.residual_order}
        if self.growth:
            out["growth"] = self.growth_label()
            out["growth_rays"] = [g.to_json() for g in self.growth]
        return out


def growth_rays(n: int = GROWTH_RAYS):
    return [2 * math.pi * k / n for k in range(n)]


def run_verdict(ode: NonminimalODE, params: VerdictParams = VerdictParams()) -> PipelineResult:
    """Compose the individual analyses into one extension verdict.

    Growth rays are only integrated for a non-Fuchsian ODE without detected
    branching, and the sweep stops at the first ray showing super-polynomial
    growth.
    """
    fuchs = fuchsian_test(ode, params.tol_ord)
    mono = monodromy(ode, params.loop_radius, 0.0, params.turns, params.tol_trivial)
    result = PipelineResult(fuchs, mono)
    if fuchs.fuchsian:
        try:
            _, result.formal = solve_reduced(reduce(ode, params.tol_ord), params.order,
                                             params.tol_res)
        except NoRoot:
            result.formal = None
    elif mono.trivial:
        for theta in growth_rays(params.rays):
            g = growth_exponent(ode, params.growth_init, theta, params.loop_radius)
            result.growth.append(g)
            if g.super_polynomial:
                break
    result.verdict = extension_verdict(ode, mono, result.formal, result.growth or None,
                                       params.tol_ord)
    return result


__all__ = ["VerdictParams", "PipelineResult", "run_verdict", "growth_rays"]
