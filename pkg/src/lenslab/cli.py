"""Command-line front end.

Exit codes: 0 success / law holds, 1 law or rule violation found, 2 input or
usage error, 3 open verdict.  Defaults for scale, budget, window and workers
come from ``LENSLAB_MAX_S``, ``LENSLAB_MAX_V``, ``LENSLAB_BUDGET``,
``LENSLAB_WINDOW`` and ``LENSLAB_WORKERS``; flags take precedence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

from . import gallery, implication, search
from .errors import LensLabError
from .laws import (
    ALL_LAWS,
    PUT_LAWS,
    FiniteLens,
    Law,
    check_law,
    format_laws,
    law_profile,
    sorted_laws,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_OPEN = 0, 1, 2, 3
SCHEMA = "lenslab/{}/1"
ARROWS = ("->", "=>")


class UsageError(Exception):
    pass


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"environment variable {name}={raw!r} is not an integer") from None


def _parse_laws(names: Sequence[str]) -> list[Law]:
    out = []
    for chunk in names:
        for name in chunk.split(","):
            if name.strip():
                try:
                    out.append(Law.parse(name))
                except ValueError as exc:
                    raise UsageError(str(exc)) from None
    return out


def load_lens(path: str) -> FiniteLens:
    try:
        if path == "-":
            doc = json.load(sys.stdin)
        else:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not a valid lens document: {exc}") from None
    return FiniteLens.from_dict(doc)


def lens_json(lens: FiniteLens) -> str:
    return json.dumps(lens.to_dict(), separators=(", ", ": "))


class Output:
    def __init__(self, args: argparse.Namespace):
        self.structured = args.format == "structured"
        self.path = getattr(args, "out", None)
        self.lines: list[str] = []

    def line(self, text: str = "") -> None:
        self.lines.append(text)

    def emit(self, command: str, payload: dict[str, Any]) -> None:
        if self.structured:
            text = json.dumps({"schema": SCHEMA.format(command), **payload}, indent=2, ensure_ascii=False) + "\n"
        else:
            text = "".join(line + "\n" for line in self.lines)
        if self.path:
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


# -- commands ----------------------------------------------------------------------

def cmd_laws(args: argparse.Namespace) -> int:
    out = Output(args)
    rows = []
    for law in ALL_LAWS:
        families = ", ".join(sorted(f.value for f in law.families))
        tag = "put-only" if law.put_only else "get/put"
        out.line(f"{law.name:<3} {law.long_name:<18} [{families}] ({tag})")
        out.line(f"    {law.equation}")
        rows.append({
            "name": law.name,
            "long_name": law.long_name,
            "equation": law.equation,
            "families": sorted(f.value for f in law.families),
            "put_only": law.put_only,
        })
    out.emit("laws", {"laws": rows})
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    lens = load_lens(args.path)
    requested = _parse_laws(args.laws) if args.laws else list(PUT_LAWS if lens.put_only else ALL_LAWS)
    requested = sorted_laws(set(requested))
    witnesses = {law: check_law(lens, law) for law in requested}
    profile = law_profile(lens)
    out = Output(args)
    out.line(f"lens: {lens_json(lens)}")
    out.line(f"profile: {format_laws(profile)}")
    failed = [law for law in requested if witnesses[law] is not None]
    for law in requested:
        w = witnesses[law]
        out.line(f"  {law.name}: holds" if w is None else f"  {law.name}: FAILS  {w}")
    out.emit("check", {
        "lens": lens.to_dict(),
        "profile": [law.name for law in sorted_laws(profile)],
        "requested": [law.name for law in requested],
        "failed": [law.name for law in failed],
        "witnesses": {law.name: witnesses[law].to_dict() for law in failed},
    })
    return EXIT_VIOLATION if failed else EXIT_OK


def cmd_closure(args: argparse.Namespace) -> int:
    start = _parse_laws(args.laws)
    closed, trace = implication.closure(start)
    out = Output(args)
    out.line(f"closure {format_laws(start)} = {format_laws(closed)}")
    for chain in trace.values():
        out.line(f"  {chain}")
    out.emit("closure", {
        "start": [law.name for law in sorted_laws(set(start))],
        "closure": [law.name for law in sorted_laws(closed)],
        "trace": {law.name: [rule.name for rule in chain.steps] for law, chain in trace.items()},
    })
    return EXIT_OK


def cmd_implies(args: argparse.Namespace) -> int:
    tokens = list(args.terms)
    if any(t in ARROWS for t in tokens):
        i = next(i for i, t in enumerate(tokens) if t in ARROWS)
        premise_tokens, goal_tokens = tokens[:i], tokens[i + 1:]
    else:
        premise_tokens, goal_tokens = tokens[:-1], tokens[-1:]
    premises = _parse_laws(premise_tokens)
    goal = _parse_laws(goal_tokens)
    if len(goal) != 1 or not premises:
        raise UsageError("usage: implies LAW [LAW ...] -> LAW")
    (goal,) = goal
    if goal in premises:
        raise UsageError(f"{goal.name} is already a premise")
    if args.samples is not None and args.seed is None:
        raise UsageError("--samples requires an explicit --seed")

    out = Output(args)
    head = f"{format_laws(premises)} => {goal.name}"
    report = search.classify_candidate(premises, goal, args.max_s, args.max_v, args.budget, args.workers)
    sampled = None
    if report.status == "open" and args.samples is not None:
        n = args.sample_s or args.max_s
        m = args.sample_v or args.max_v
        found = search.random_search(premises, goal, n, m, args.samples, args.seed)
        if isinstance(found, search.Counterexample):
            report = search.CandidateReport(report.premises, goal, "refuted", counterexample=found)
        sampled = {"s_size": n, "v_size": m, "samples": args.samples, "seed": args.seed}

    if report.status == "derivable":
        out.line(f"{head}: derivable")
        for rule in report.chain.steps:
            out.line(f"  {rule}")
        code = EXIT_OK
    elif report.status == "refuted":
        cx = report.counterexample
        out.line(f"{head}: refuted")
        out.line(f"  lens: {lens_json(cx.lens)}")
        out.line(f"  witness: {cx.witness}")
        code = EXIT_VIOLATION
    else:
        out.line(f"{head}: open (searched up to s_size={args.max_s}, v_size={args.max_v})")
        code = EXIT_OPEN
    payload = report.to_dict()
    if sampled is not None:
        payload["sampled"] = sampled
    out.emit("implies", payload)
    return code


def cmd_sweep(args: argparse.Namespace) -> int:
    report = search.soundness_sweep(args.max_s, args.max_v, budget=args.budget, workers=args.workers)
    out = Output(args)
    for sp in report.spaces:
        bad = sum(sp.violations.values())
        out.line(f"({sp.s_size}, {sp.v_size}): {sp.lenses} lenses, {sp.distinct_profiles} profiles, {bad} violations")
    for name, cx in report.first_violations.items():
        out.line(f"  {name} violated by {lens_json(cx.lens)}")
    out.line(f"total: {report.total} lenses, {report.violations} violations")
    out.emit("sweep", report.to_dict())
    return EXIT_VIOLATION if report.violations else EXIT_OK


def cmd_census(args: argparse.Namespace) -> int:
    census = search.profile_census(args.n, args.m, budget=args.budget, workers=args.workers)
    out = Output(args)
    out.line(f"census ({args.n}, {args.m}): {sum(census.values())} lenses, {len(census)} profiles")
    rows = []
    for profile, count in census.items():
        out.line(f"  {count:>8}  {format_laws(profile)}")
        rows.append({"profile": [law.name for law in sorted_laws(profile)], "count": count})
    out.emit("census", {"s_size": args.n, "v_size": args.m, "total": sum(census.values()), "profiles": rows})
    return EXIT_OK


def cmd_survey(args: argparse.Namespace) -> int:
    reports = search.candidate_survey(args.k, args.max_s, args.max_v, args.budget, args.workers)
    out = Output(args)
    tally = {"derivable": 0, "refuted": 0, "open": 0}
    for r in reports:
        tally[r.status] += 1
        out.line(str(r))
    out.line(f"total: {len(reports)} candidates, " + ", ".join(f"{v} {k}" for k, v in tally.items()))
    out.emit("survey", {
        "max_premise_size": args.k,
        "max_s": args.max_s,
        "max_v": args.max_v,
        "summary": tally,
        "candidates": [r.to_dict() for r in reports],
    })
    return EXIT_OK


def cmd_dot(args: argparse.Namespace) -> int:
    text = implication.export_graph()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_gallery(args: argparse.Namespace) -> int:
    names = [args.name] if args.name else [e.name for e in gallery.list_gallery()]
    reports = [gallery.gallery_check(name, args.window) for name in names]
    out = Output(args)
    for report in reports:
        entry = gallery.get_entry(report.entry)
        out.line(f"{report.entry}: {entry.formula}  (window {report.window})")
        for v in report.verdicts:
            line = f"  {v.law.name}: {v.status.value}"
            if v.witness is not None:
                line += f"  {v.witness}"
                if v.bounded:
                    line += f"  [existential searched over [-{report.window}, {report.window}]]"
            out.line(line)
    out.emit("gallery", {"reports": [r.to_dict() for r in reports]})
    return EXIT_OK if all(r.conforms for r in reports) else EXIT_VIOLATION


# -- argument parsing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--out", help="write output to this file instead of stdout")

    scale = argparse.ArgumentParser(add_help=False)
    scale.add_argument("--max-s", type=int, default=_env_int("LENSLAB_MAX_S", search.DEFAULT_MAX_N))
    scale.add_argument("--max-v", type=int, default=_env_int("LENSLAB_MAX_V", search.DEFAULT_MAX_V))

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--budget", type=int, default=_env_int("LENSLAB_BUDGET", search.DEFAULT_BUDGET))
    budget.add_argument("--workers", type=int, default=_env_int("LENSLAB_WORKERS", 1))

    parser = argparse.ArgumentParser(prog="lenslab", description="Lens-law laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("laws", parents=[common], help="list the lens laws")
    p.set_defaults(func=cmd_laws)

    p = sub.add_parser("check", parents=[common], help="check a lens table against the laws")
    p.add_argument("path", help="lens document (JSON), or - for stdin")
    p.add_argument("--laws", nargs="+", help="only check these laws")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("closure", parents=[common], help="closure of a law set under the rules")
    p.add_argument("laws", nargs="*")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("implies", parents=[common, scale, budget], help="decide LAW ... -> LAW")
    p.add_argument("terms", nargs="+")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, help="random samples to draw if the exhaustive search is open")
    p.add_argument("--sample-s", type=int)
    p.add_argument("--sample-v", type=int)
    p.set_defaults(func=cmd_implies)

    p = sub.add_parser("sweep", parents=[common, scale, budget], help="check all rules on all small lenses")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("census", parents=[common, budget], help="count law profiles over one space")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("survey", parents=[common, scale, budget], help="classify candidate implications")
    p.add_argument("k", type=int, nargs="?", default=2, choices=(1, 2, 3))
    p.set_defaults(func=cmd_survey)

    p = sub.add_parser("dot", help="export the implication graph as DOT")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("gallery", parents=[common], help="check the integer example lenses")
    p.add_argument("name", nargs="?")
    p.add_argument("--window", type=int, default=_env_int("LENSLAB_WINDOW", gallery.DEFAULT_WINDOW))
    p.set_defaults(func=cmd_gallery)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # "->" would otherwise be read as an option flag
    argv = ["=>" if a == "->" else a for a in argv]
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"lenslab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, LensLabError, ValueError) as exc:
        print(f"lenslab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
