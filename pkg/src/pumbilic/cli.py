"""Command-line entry point: ``pumbilic <verb> [options]``.

Exit codes: 0 success, 1 a verification check failed, 2 bad input or a
numerical failure reported by the library.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .classifier import ContinuationParams, arc_pattern, classify_point, continue_pu_curve, \
    curve_plane_contact, plane_omega
from .errors import NotNormallyHyperbolic, ParseError, PumbilicError
from .io import load_jet, polyline_to_dict, write_polyline
from .jet_model import MongeImmersion
from .lie_cartan import find_singular_branches
from .oracles import ENTRIES, coefficient_diff
from .tracer import CensusParams, TraceParams, sector_census, trace_principal_line, \
    trace_separatrix_family
from .verify import verify_jet, verify_random

EXIT_OK, EXIT_CHECK, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    """Options shared by every verb.

    ``tol`` is the classification tolerance, ``seed`` seeds every random
    choice, ``threads`` bounds parallel work over branches or random jets.
    """
    tol: float = 1e-9
    out: Path | None = None
    fmt: str = "json"
    seed: int = 0
    threads: int = 1
    params: dict = field(default_factory=dict)  # verb-specific values, echoed in reports

    def __post_init__(self):
        if not self.tol > 0:
            raise ParseError("--tol must be strictly positive")
        if self.threads < 1:
            raise ParseError("--threads must be at least 1")


def _finite_point(vals, flag):
    p = np.asarray(vals, dtype=float)
    if p.shape != (3,) or not np.all(np.isfinite(p)):
        raise ParseError(f"{flag} needs three finite coordinates")
    return p


def _emit(cfg: RunConfig, report: dict, text: str | None = None):
    if text:
        print(text)
    if cfg.out is not None and report is not None:
        cfg.out.parent.mkdir(parents=True, exist_ok=True)
        cfg.out.write_text(json.dumps(report, indent=1, default=_json_default))
    elif not text:
        print(json.dumps(report, indent=1, default=_json_default))


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    return str(o)


# ------------------------------------------------------------------ verbs

def cmd_classify(args, cfg):
    jet = load_jet(args.jet)
    cls = classify_point(jet, tol=cfg.tol)
    inv = cls.invariants
    lines = [f"kind: {cls}"]
    for key in ("T", "disc", "quad_disc", "chi12", "chi12star", "chi23", "d23_regularity"):
        lines.append(f"{key}: {inv[key]:.12g}")
    a, b, c = jet.a, jet.b, jet.c
    if b != 0:
        border = (c / (2 * b)) ** 2 + 2
        margins = {"a/b - 1": a / b - 1, "a/b - 2": a / b - 2, "a/b - border": a / b - border}
        for k, v in margins.items():
            lines.append(f"margin {k}: {v:.12g}")
    else:
        margins = {}
    lines.append(f"margin (relative): {cls.margin:.6g}")
    report = {"kind": cls.kind.value, "label": str(cls), "reason": cls.reason,
              "invariants": inv, "margins": margins, "margin": cls.margin}
    _emit(cfg, report, "\n".join(lines))
    return EXIT_OK


def cmd_curve(args, cfg):
    jet = load_jet(args.jet)
    seed = _finite_point(args.at, "--at")
    params = ContinuationParams(step=args.step, n_steps=max(1, int(np.ceil(args.range / args.step))))
    imm = MongeImmersion(jet)
    pts = continue_pu_curve(imm, seed, params)
    pattern = arc_pattern(imm, pts, params)
    contact = curve_plane_contact(pts, plane_omega(imm))
    samples = [{"arc": p.arc, "u": p.u, "tangent": p.tangent, "kind": str(p.classification),
                "gap": p.gap23} for p in pts]
    report = {"pattern": pattern, "samples": samples,
              "contact": [asdict(c) for c in contact]}
    _emit(cfg, report, f"pattern: {pattern}\nsamples: {len(pts)}  "
                       f"arc range: [{pts[0].arc:.4g}, {pts[-1].arc:.4g}]")
    return EXIT_OK


def cmd_trace(args, cfg):
    jet = load_jet(args.jet)
    seed = _finite_point(args.at, "--at")
    params = TraceParams(max_length=args.length)
    pl = trace_principal_line(MongeImmersion(jet), seed, args.foliation, params)
    text = (f"{args.foliation}: {len(pl)} points, length {pl.length:.6g}, "
            f"termination {pl.termination}")
    if cfg.out is not None:
        write_polyline(pl, cfg.out, cfg.fmt)
        print(text + f"\nwritten to {cfg.out}")
    else:
        print(text)
    return EXIT_OK


def _family_record(fam, note):
    return {"branch": fam.branch, "side": fam.side, "nh_type": fam.nh_type, "partial": fam.partial,
            "note": note, "flagged": fam.flagged,
            "max_sensitivity": float(max(fam.sensitivity)) if fam.sensitivity else None,
            "leaves": [polyline_to_dict(lf) for lf in fam.leaves]}


def _write_family_csv(rec, path):
    lines = [f"# branch={rec['branch']} side={rec['side']} nh_type={rec['nh_type']} "
             f"partial={rec['partial']}", "leaf,foliation,termination,u1,u2,u3"]
    for i, lf in enumerate(rec["leaves"]):
        for p in lf["points"]:
            lines.append(f"{i},{lf['foliation']},{lf['termination']}," + ",".join(f"{x:.17g}" for x in p))
    path.write_text("\n".join(lines) + "\n")


def cmd_separatrix(args, cfg):
    jet = load_jet(args.jet)
    branches = find_singular_branches(jet)
    if args.branch != "all":
        wanted = set(args.branch.split(","))
        branches = [b for b in branches if b.label in wanted]
        if not branches:
            raise ParseError(f"no branch named {args.branch!r}")

    def one(br):
        note = ""
        try:
            fam = trace_separatrix_family(br, n_leaves=args.leaves)
        except NotNormallyHyperbolic:
            note = f"{br.nh_type} branch: strong-direction leaves only (partial family)"
            fam = trace_separatrix_family(br, n_leaves=args.leaves, allow_partial=True)
        return _family_record(fam, note)

    with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
        records = list(ex.map(one, branches))
    outdir = cfg.out or Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    lines = []
    for rec in records:
        path = outdir / f"{rec['branch']}.{cfg.fmt}"
        if cfg.fmt == "csv":
            _write_family_csv(rec, path)
        else:
            path.write_text(json.dumps(rec, default=_json_default))
        lines.append(f"{rec['branch']}: {rec['nh_type']}, {len(rec['leaves'])} leaves, "
                     f"side {rec['side']}" + (f"  [{rec['note']}]" if rec["note"] else "") + f" -> {path}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_census(args, cfg):
    jet = load_jet(args.jet)
    rep = sector_census(MongeImmersion(jet), _finite_point(args.at, "--at"), radius=args.radius,
                        which=args.foliation, params=CensusParams(n_seeds=args.seeds))
    counts = rep.counts()
    report = {"counts": counts, "rays": [asdict(r) for r in rep.rays], "wedges_deg": rep.wedges_deg,
              "outcomes": rep.outcomes, "thresholds": rep.thresholds}
    text = "\n".join([f"{k}: {v}" for k, v in counts.items()]
                     + [f"ray {r.angle_deg:8.3f} deg: {r.kind}" for r in rep.rays])
    _emit(cfg, report, text)
    return EXIT_OK


def cmd_verify(args, cfg):
    if args.random:
        if args.jet:
            raise ParseError("give either a jet file or --random, not both")
        chunks = [(i, 1) for i in range(args.random)]
        idx = lambda i: verify_random(1, args.kind, seed=cfg.seed + i)[0]
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            reports = list(ex.map(lambda c: idx(c[0]), chunks))
        for i, r in enumerate(reports):
            r.label = f"{args.kind}#{i}"
    else:
        if not args.jet:
            raise ParseError("verify needs a jet file or --random N --class KIND")
        jet = load_jet(args.jet)
        reports = [verify_jet(jet, Path(args.jet).stem, seed=cfg.seed)]
    lines = []
    for r in reports:
        lines.extend(r.lines() if (args.verbose or not args.random) else
                     [f"{r.label}: {'pass' if r.passed else 'FAIL'}"] + [f"  {x}" for x in r.lines() if "[FAIL]" in x])
    ok = all(r.passed for r in reports)
    lines.append(f"{sum(r.passed for r in reports)}/{len(reports)} passed"
                 + ("" if not any(r.skipped for r in reports) else
                    f" ({sum(bool(r.skipped) for r in reports)} skipped)"))
    _emit(cfg, {"passed": ok, "reports": [r.as_dict() for r in reports]}, "\n".join(lines))
    return EXIT_OK if ok else EXIT_CHECK


def cmd_oracle_diff(args, cfg):
    jet = load_jet(args.jet)
    names = [e.name for e in ENTRIES] if args.entry == "all" else args.entry.split(",")
    report, lines = {}, []
    for nm in names:
        try:
            diff = coefficient_diff(jet, nm)
        except KeyError:
            raise ParseError(f"unknown series entry {nm!r}") from None
        report[nm] = [{"monomial": "".join(map(str, m)), "printed": p, "expansion": x} for m, p, x in diff]
        for m, p, x in diff:
            lines.append(f"{nm:9s} u^{''.join(map(str, m))}: printed {p:.12g}  expansion {x:.12g}")
    if not lines:
        lines.append("no differences")
    _emit(cfg, report, "\n".join(lines))
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    glob = argparse.ArgumentParser(add_help=False)
    glob.add_argument("--tol", type=float, default=1e-9, help="classification tolerance (default 1e-9)")
    glob.add_argument("--out", type=Path, help="output file (directory for separatrix)")
    glob.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    glob.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    glob.add_argument("--threads", type=int, default=1)

    p = argparse.ArgumentParser(prog="pumbilic", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)
    origin = [0.0, 0.0, 0.0]

    s = sub.add_parser("classify", parents=[glob], help="type of the origin of a jet")
    s.add_argument("jet")
    s.set_defaults(run=cmd_classify)

    s = sub.add_parser("curve", parents=[glob], help="continue the partially umbilic curve")
    s.add_argument("jet")
    s.add_argument("--at", nargs=3, type=float, default=origin, metavar=("U1", "U2", "U3"))
    s.add_argument("--range", type=float, default=0.05, help="arclength each way (default 0.05)")
    s.add_argument("--step", type=float, default=5e-3)
    s.set_defaults(run=cmd_curve)

    s = sub.add_parser("trace", parents=[glob], help="trace one principal line")
    s.add_argument("jet")
    s.add_argument("--at", nargs=3, type=float, required=True, metavar=("U1", "U2", "U3"))
    s.add_argument("--foliation", choices=("F1", "F2", "F3"), default="F1")
    s.add_argument("--length", type=float, default=0.2)
    s.set_defaults(run=cmd_trace)

    s = sub.add_parser("separatrix", parents=[glob], help="leaf families of separatrix surfaces")
    s.add_argument("jet")
    s.add_argument("--branch", default="all", help="branch labels, comma separated, or all")
    s.add_argument("--leaves", type=int, default=16)
    s.set_defaults(run=cmd_separatrix)

    s = sub.add_parser("census", parents=[glob], help="separatrix/sector census around a curve point")
    s.add_argument("jet")
    s.add_argument("--at", nargs=3, type=float, default=origin, metavar=("U1", "U2", "U3"))
    s.add_argument("--radius", type=float, default=1e-2)
    s.add_argument("--foliation", choices=("F1", "F2"), default="F1")
    s.add_argument("--seeds", type=int, default=64)
    s.set_defaults(run=cmd_census)

    s = sub.add_parser("verify", parents=[glob], help="run the invariant suite")
    s.add_argument("jet", nargs="?")
    s.add_argument("--random", type=int, default=0, metavar="N")
    s.add_argument("--class", dest="kind", choices=("D1", "D2", "D3", "D12", "D23"), default="D1")
    s.add_argument("--verbose", action="store_true")
    s.set_defaults(run=cmd_verify)

    s = sub.add_parser("oracle-diff", parents=[glob],
                       help="monomials where a hand-expanded series departs from the exact expansion")
    s.add_argument("jet")
    s.add_argument("--entry", default="all")
    s.set_defaults(run=cmd_oracle_diff)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(tol=args.tol, out=args.out, fmt=args.fmt, seed=args.seed, threads=args.threads)
        return args.run(args, cfg)
    except PumbilicError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
