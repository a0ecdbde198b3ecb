"""How far from the zero section does the thickened structure stay Jacobi?

Thickens the slice structure of the worked example and reports, for growing
fiber half-widths, the largest rank of the intersection with Der L over the
sampled points and the smallest singular value of the jet block.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

import numpy as np

from omnilie.linebundle import Derivation
from omnilie.morphisms import backward_image_slice, thicken
from omnilie.omni import split
from omnilie.scalars import Chart, Oracle
from omnilie.zoo import JacobiMatrix, from_jacobi


@dataclass
class Config:
    seed: int = 0
    samples: int = 64
    widths: list[float] = field(default_factory=lambda: [0.05, 0.1, 0.5, 1.0, 2.0])


def run(cfg: Config) -> None:
    oracle = Oracle(seed=cfg.seed, samples=cfg.samples)
    chart = Chart(("x", "y"))
    x2 = chart.coordinate("x")
    sl = backward_image_slice(from_jacobi(JacobiMatrix.from_parts(chart, [-x2], [0, 1])), {"y": 0.0}, oracle)
    x = sl.chart.coordinate("x")
    print(f"{'width':>8} {'max rank L&DL':>14} {'min sigma(jet)':>15}  checks")
    for w in cfg.widths:
        th = thicken(sl, [Derivation(sl.chart, (x,), 1)], [Derivation.coordinate(sl.chart, 0)], oracle, fiber_domain=(-w, w))
        tchart = th.frame.chart
        mats = th.frame.matrices(oracle.points(tchart))
        jets = [split(m, tchart).jet for m in mats]
        ranks = [m.shape[1] - np.linalg.matrix_rank(j, tol=oracle.atol) for m, j in zip(mats, jets)]
        sig = min(np.linalg.svd(j, compute_uv=False)[-1] for j in jets)
        status = ",".join(f"{k}={v['ok']}" for k, v in th.checks.items())
        print(f"{w:8.2f} {max(ranks):14d} {sig:15.3e}  {status}")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--widths", type=float, nargs="+", default=None)
    a = p.parse_args()
    cfg = Config(seed=a.seed, samples=a.samples)
    if a.widths:
        cfg.widths = a.widths
    run(cfg)


if __name__ == "__main__":
    main()
