"""Sector census around the origin of each fixture, for both foliations of the pair.

    python3 scripts/census_demo.py --fixtures J1 J2 --foliations F1
"""

import argparse
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from pumbilic.io import load_jet
from pumbilic.jet_model import MongeImmersion
from pumbilic.tracer import CensusParams, sector_census

JETS = Path(__file__).resolve().parents[1] / "jets"


@dataclass
class Config:
    fixtures: list = field(default_factory=lambda: ["J1", "J2", "J3", "J4"])
    foliations: list = field(default_factory=lambda: ["F1", "F2"])
    radius: float = 1e-2
    seeds: int = 64
    out: str | None = None


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixtures", nargs="+", default=Config().fixtures)
    ap.add_argument("--foliations", nargs="+", default=Config().foliations, choices=("F1", "F2"))
    ap.add_argument("--radius", type=float, default=Config.radius)
    ap.add_argument("--seeds", type=int, default=Config.seeds)
    ap.add_argument("--out")
    cfg = Config(**vars(ap.parse_args()))
    results = []
    for name in cfg.fixtures:
        imm = MongeImmersion(load_jet(JETS / f"{name}.json"))
        for which in cfg.foliations:
            t0 = time.perf_counter()
            rep = sector_census(imm, np.zeros(3), cfg.radius, which, CensusParams(n_seeds=cfg.seeds))
            counts = rep.counts()
            rays = ", ".join(f"{r.angle_deg:.1f} deg {r.kind}" for r in rep.rays)
            print(f"{name} {which}: {counts['separatrix_pairs']} separatrices, {counts['wedge-like']} wedge, "
                  f"{counts['isolated']} isolated, {counts['one-sided']} one-sided  [{rays}]  "
                  f"{time.perf_counter() - t0:.1f} s")
            results.append(dict(fixture=name, foliation=which, counts=counts,
                                rays=[asdict(r) for r in rep.rays], wedges_deg=rep.wedges_deg))
    if cfg.out:
        Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.out).write_text(json.dumps({"config": asdict(cfg), "results": results}, indent=1))


if __name__ == "__main__":
    main()
