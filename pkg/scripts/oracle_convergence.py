"""Observed orders of every series entry, hand-expanded and exact expansion side by side.

    python3 scripts/oracle_convergence.py --jets 200 --out results/convergence.json
"""

import argparse
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from pumbilic.oracles import convergence_report


@dataclass
class Config:
    jets: int = 200
    seed: int = 0
    coeff: float = 1.0
    hs: tuple = (0.1, 0.05, 0.025)
    out: str | None = None


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--jets", type=int, default=Config.jets)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--coeff", type=float, default=Config.coeff)
    ap.add_argument("--out")
    cfg = Config(**vars(ap.parse_args()))
    t0 = time.perf_counter()
    res = convergence_report(cfg.jets, cfg.seed, cfg.hs, cfg.coeff)
    elapsed = time.perf_counter() - t0
    print(f"{'entry':10s} {'group':18s} {'need':>4s} {'printed':>8s} {'expansion':>9s}")
    for r in res:
        flag = "" if r.passed else "  <- printed series below order"
        print(f"{r.name:10s} {r.group:18s} {r.required:4d} {r.printed_order:8.2f} "
              f"{r.expansion_order:9.2f}{flag}")
    print(f"{sum(r.passed for r in res)}/{len(res)} printed entries pass, "
          f"{sum(r.numerics_passed for r in res)}/{len(res)} against the expansion; {elapsed:.1f} s")
    if cfg.out:
        Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.out).write_text(json.dumps({
            "config": asdict(cfg),
            "entries": [dict(name=r.name, group=r.group, required=r.required,
                             printed=r.printed_order, expansion=r.expansion_order) for r in res]},
            indent=1))


if __name__ == "__main__":
    main()
