"""Run the built-in fixtures end to end and print a one-line summary each.

Usage: python3 scripts/example_chains.py
"""

import numpy as np

from segre_ode.bbsolver import solve_reduced
from segre_ode.fixtures import graph_samples, fixture_graph, parse_example
from segre_ode.hypersurface import associate_ode, recover_hypersurface
from segre_ode.numint import segre_residual
from segre_ode.ode import fuchsian_test, reduce
from segre_ode.pipeline import run_verdict
from segre_ode.series import max_abs_diff

EXAMPLES = ["m-gamma:1/2", "m-gamma:1", "m-gamma:2", "m-gamma:3", "mm0:2", "ex68"]


def chain(example: str) -> str:
    fx = parse_example(example)
    ode = associate_ode(fx.hypersurface)
    drift = max(max_abs_diff(a, b) for a, b in zip(ode.coefficients, fx.ode.coefficients))
    back = recover_hypersurface(ode, fx.hypersurface.sign)
    trip = max(max_abs_diff(back.phi[k], fx.hypersurface.phi[k]) for k in back.phi)
    fuchs = fuchsian_test(ode)
    formal = "-"
    if fuchs.fuchsian:
        _, sol = solve_reduced(reduce(ode))
        formal = sol.status
    w = graph_samples()
    seg = segre_residual(ode, w, *fixture_graph(example, w))
    res = run_verdict(ode)
    ev = np.round(res.monodromy.eigenvalues, 6)
    return (f"{example:12s} assoc drift {drift:.1e}  round trip {trip:.1e}  {fuchs.verdict:11s}  "
            f"formal {formal:16s}  segre {seg:.1e}  eig {ev}  -> {res.verdict.verdict}")


def main():
    for example in EXAMPLES:
        print(chain(example))


if __name__ == "__main__":
    main()
