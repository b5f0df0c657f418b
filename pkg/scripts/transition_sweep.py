"""Type of the origin and of the continued curve across the two transition families.

Family a = 2b + s on the D12 fixture and a = b + s on the D23 fixture.

    python3 scripts/transition_sweep.py --n 21 --out results/sweep.json
"""

import argparse
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from pumbilic.classifier import ContinuationParams, arc_pattern, classify_point, continue_pu_curve
from pumbilic.errors import PumbilicError
from pumbilic.io import load_jet
from pumbilic.jet_model import MongeImmersion
from pumbilic.lie_cartan import cubic_coefficients, cubic_discriminant

JETS = Path(__file__).resolve().parents[1] / "jets"


@dataclass
class Config:
    n: int = 21
    half_width: float = 0.1
    step: float = 5e-3
    n_steps: int = 8
    out: str | None = None


def sweep(base, offset, cfg):
    rows = []
    params = ContinuationParams(step=cfg.step, n_steps=cfg.n_steps)
    for s in np.linspace(-cfg.half_width, cfg.half_width, cfg.n):
        jet = base.replace(a=offset * base.b + s)
        imm = MongeImmersion(jet)
        disc = cubic_discriminant(cubic_coefficients(imm, np.zeros(3)))
        try:
            pattern = arc_pattern(imm, continue_pu_curve(imm, params=params), params)
        except PumbilicError as exc:
            pattern = type(exc).__name__
        rows.append(dict(s=float(s), origin=str(classify_point(jet)), raw_disc=float(disc), curve=pattern))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--half-width", type=float, default=Config.half_width)
    ap.add_argument("--out")
    a = ap.parse_args()
    cfg = Config(n=a.n, half_width=a.half_width, out=a.out)
    result = {}
    for name, fixture, offset in (("a = 2b + s", "J4", 2.0), ("a = b + s", "J5", 1.0)):
        rows = sweep(load_jet(JETS / f"{fixture}.json"), offset, cfg)
        result[name] = rows
        print(f"{name} on {fixture}")
        for r in rows:
            print(f"  s={r['s']:+.3f}  origin {r['origin']:4s}  raw disc {r['raw_disc']:+.3e}  curve {r['curve']}")
    if cfg.out:
        Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.out).write_text(json.dumps(result, indent=1))


if __name__ == "__main__":
    main()
