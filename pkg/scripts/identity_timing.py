"""Time the randomized identity suites as the instance count and dimension grow."""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

from omnilie.scalars import Oracle
from omnilie.selftest import cartan_suite, courant_suite, tensoriality_suite


@dataclass
class Config:
    seed: int = 0
    samples: int = 32
    dimensions: list[int] = field(default_factory=lambda: [1, 2, 3])
    instances: list[int] = field(default_factory=lambda: [25, 100])


def run(cfg: Config) -> None:
    oracle = Oracle(seed=cfg.seed, samples=cfg.samples)
    print(f"{'suite':>13} {'n':>2} {'instances':>9} {'failures':>8} {'seconds':>8}")
    for n in cfg.dimensions:
        for k in cfg.instances:
            for suite in (cartan_suite, courant_suite, tensoriality_suite):
                start = time.perf_counter()
                res = suite(n, k, oracle, seed=cfg.seed + n)
                print(f"{res.name:>13} {n:2d} {k:9d} {res.failures:8d} {time.perf_counter() - start:8.2f}")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--dimensions", type=int, nargs="+", default=None)
    p.add_argument("--instances", type=int, nargs="+", default=None)
    a = p.parse_args()
    cfg = Config(seed=a.seed, samples=a.samples)
    if a.dimensions:
        cfg.dimensions = a.dimensions
    if a.instances:
        cfg.instances = a.instances
    run(cfg)


if __name__ == "__main__":
    main()
