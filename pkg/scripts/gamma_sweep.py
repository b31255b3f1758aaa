"""Monodromy eigenvalues and extension verdicts across the rotation family.

Usage: python3 scripts/gamma_sweep.py [--gammas 0.25 0.5 1 1.5 2] [--jobs 4]
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from segre_ode.fixtures import m_gamma_ode
from segre_ode.pipeline import VerdictParams, run_verdict


@dataclass(frozen=True)
class SweepConfig:
    gammas: tuple = (0.25, 1 / 3, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0)
    order: int = 32
    loop_radius: float = 0.5
    jobs: int = 1


def one(gamma: float, cfg: SweepConfig):
    ode = m_gamma_ode(gamma, cfg.order)
    res = run_verdict(ode, VerdictParams(order=cfg.order, loop_radius=cfg.loop_radius))
    ev = np.asarray(res.monodromy.eigenvalues)
    want = np.exp(2j * np.pi * gamma * np.array([1, -1]))
    err = min(np.max(np.abs(ev - want)), np.max(np.abs(ev - want[::-1])))
    return gamma, ev, float(err), res.verdict.verdict


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--gammas", type=float, nargs="+")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--loop-radius", type=float, default=0.5)
    a = p.parse_args()
    cfg = SweepConfig(tuple(a.gammas) if a.gammas else SweepConfig.gammas,
                      loop_radius=a.loop_radius, jobs=a.jobs)
    with ProcessPoolExecutor(cfg.jobs) as pool:
        rows = list(pool.map(one, cfg.gammas, [cfg] * len(cfg.gammas)))
    print(f"{'gamma':>8}  {'eigenvalue 1':>24}  {'eigenvalue 2':>24}  {'error':>9}  verdict")
    for g, ev, err, verdict in rows:
        fmt = lambda c: f"{c.real:+.8f}{c.imag:+.8f}i"  # noqa: E731
        print(f"{g:8.4f}  {fmt(ev[0]):>24}  {fmt(ev[1]):>24}  {err:9.2e}  {verdict}")


if __name__ == "__main__":
    main()
