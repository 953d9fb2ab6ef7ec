"""Command-line entry point: ``tristable <command> ...``.

Results go to stdout as ``key=value`` lines, followed by a ``manifest=``
line holding a JSON run manifest. ``tristable replay MANIFEST`` re-runs a
recorded command and checks that its result summary is unchanged.

Exit codes: 0 success, 1 domain failure (a claim fails, a file does not
validate, a counterexample turns up), 2 usage error.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import logging
import sys
import time
from contextlib import redirect_stdout
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import __version__
from .constructive import construct_stable, content_levels
from .fixtures import circular_strong_counterexample, weakest_link_counterexample
from .market import AgentId, Kind, Market, MarketError, Matching, pad_market, parse_market, serialize_market
from .rules import RuleError, TripleRule
from .scarf import is_balanced_collection, parse_collection, verify_not_balanced_game
from .search import (
    ConfigError,
    SearchConfig,
    conjecture_campaign,
    exhaustive_campaign,
    local_search_min_stable,
    random_market,
)
from .stability import GuardError, Mode, count_stable, is_stable

log = logging.getLogger("tristable")


class UsageError(Exception):
    pass


def _fmt_matching(mt: Matching) -> str:
    return "; ".join(str(t) for t in mt.triples())


def _file_hash(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()[:16]


def _read_market(path: str, inputs: dict) -> Market:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    m = parse_market(p.read_text(encoding="utf-8"))
    inputs[path] = m.fingerprint()
    return m


class Run:
    """Collects output lines and the result summary of one command."""

    def __init__(self) -> None:
        self.summary: dict = {}
        self.inputs: dict[str, str] = {}
        self.seeds: list[int] = []

    def emit(self, key: str, value) -> None:
        if isinstance(value, bool):
            value = str(value).lower()
        print(f"{key}={value}")

    def result(self, key: str, value) -> None:
        self.summary[key] = value
        self.emit(key, value)


# -- commands ------------------------------------------------------------------

def cmd_verify_paper(args, run: Run) -> int:
    weakest = _read_market(args.weakest, run.inputs) if args.weakest else weakest_link_counterexample()
    circular = _read_market(args.circular, run.inputs) if args.circular else circular_strong_counterexample()

    def weakest_claim():
        k = count_stable(weakest, TripleRule.WEAKEST, Mode.STRICT, jobs=args.jobs).count
        return k == 0, f"stable={k}"

    def strong_claim():
        k = count_stable(circular, TripleRule.CIRCULAR, Mode.WEAK, jobs=args.jobs).count
        return k == 0, f"strongly_stable={k}"

    def stable_claim():
        k = count_stable(circular, TripleRule.CIRCULAR, Mode.STRICT, jobs=args.jobs).count
        return k >= 1, f"stable={k}"

    def scarf_claim():
        rep = verify_not_balanced_game()
        return rep.ok, "stages=" + ",".join(f"{s.name}:{'ok' if s.passed else 'FAIL'}" for s in rep.stages)

    claims: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
        ("weakest-link-no-stable", weakest_claim),
        ("circular-no-strongly-stable", strong_claim),
        ("circular-has-stable", stable_claim),
        ("circular-not-balanced", scarf_claim),
    ]
    failed = []
    for name, fn in claims:
        ok, detail = fn()
        run.result(name, "PASS" if ok else "FAIL")
        run.result(f"{name}.detail", detail)
        if not ok:
            failed.append(name)
    run.result("passed", f"{len(claims) - len(failed)}/{len(claims)}")
    return 1 if failed else 0


def cmd_count(args, run: Run) -> int:
    m = _read_market(args.file, run.inputs)
    res = count_stable(m, TripleRule(args.rule), Mode(args.mode), with_list=args.list, jobs=args.jobs)
    run.result("rule", args.rule)
    run.result("mode", args.mode)
    run.result("n", m.n)
    run.result("stable", res.count)
    if res.first is not None:
        run.result("first", _fmt_matching(res.first))
    if args.list:
        for mt in res.matchings or ():
            run.emit("matching", _fmt_matching(mt))
    return 0


def _write_market(directory: Path, m: Market, suffix: str = "3gsm") -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{m.fingerprint()}.{suffix}"
    path.write_text(serialize_market(m), encoding="utf-8")
    return path


def cmd_search(args, run: Run) -> int:
    rule = TripleRule(args.rule)
    mode = Mode(args.mode)
    run.seeds.append(args.seed)
    out = Path(args.out) if args.out else Path("counterexamples")
    if args.samples is not None or args.exhaustive_space:
        if args.sweeps is not None:
            raise UsageError("--samples/--exhaustive-space and --sweeps are exclusive")
        if args.exhaustive_space:
            rep = exhaustive_campaign(args.n, rule, args.samples, mode)
        else:
            rep = conjecture_campaign(args.n, rule, args.samples, args.seed, mode, jobs=args.jobs)
        summary = rep.summary()
        for key in ("n", "rule", "mode", "samples", "seed", "min", "argmin", "argmin_index", "violations"):
            run.result(key, summary[key])
        run.result("histogram", json.dumps({str(k): v for k, v in sorted(rep.histogram.items())}))
        for v in rep.violations:
            path = _write_market(out, v.market)
            run.emit("violation", f"{','.join(v.conjectures)} index={v.index} stable={v.count} file={path}")
        return 1 if rep.violations else 0

    start = _read_market(args.start, run.inputs) if args.start else None
    cfg = SearchConfig(
        n=args.n, rule=rule, mode=mode, seed=args.seed,
        max_sweeps=args.sweeps or 1000, neighbors=args.neighbors, start=start,
    )
    trace = local_search_min_stable(cfg, jobs=args.jobs)
    for rec in trace.records():
        print(json.dumps(rec, sort_keys=True))
    run.result("final", trace.final.fingerprint())
    run.result("stable", trace.final_count)
    run.result("steps", len(trace.steps))
    run.result("sweeps", trace.sweeps)
    run.result("reason", trace.reason)
    run.result("counterexample", trace.counterexample)
    if trace.counterexample:
        run.emit("COUNTEREXAMPLE", _write_market(out, trace.final))
    return 0


def cmd_construct(args, run: Run) -> int:
    m = _read_market(args.file, run.inputs)
    if m.kind is not Kind.CIRCULAR or m.n > 4:
        raise UsageError("construct needs a circular market with n <= 4")
    x = AgentId.parse(args.distinguished)
    res = construct_stable(m, x)
    run.result("branch", res.branch)
    run.result("fallback", res.fallback)
    if res.matching is None:
        run.result("oracle", "no-stable-matching")
        run.emit("COUNTEREXAMPLE", "circular market without a stable matching")
    else:
        run.result("matching", _fmt_matching(res.matching))
        levels = content_levels(m, res.matching)
        run.result("content", " ".join(f"{a}:{lv}" for a, lv in levels.items()))
        run.result("oracle", "stable" if is_stable(m, TripleRule.CIRCULAR, res.matching) else "UNSTABLE")
    if res.discrepancy:
        target = Path(args.out) if args.out else Path(args.file).parent
        target.mkdir(parents=True, exist_ok=True)
        path = target / f"{Path(args.file).stem}.discrepancy.json"
        path.write_text(json.dumps(res.discrepancy, indent=2), encoding="utf-8")
        run.emit("DISCREPANCY", path)
    return 0 if res.matching is not None and not res.fallback else 1


def cmd_scarf(args, run: Run) -> int:
    rep = verify_not_balanced_game()
    for st in rep.stages:
        run.result(f"stage.{st.name}", "PASS" if st.passed else "FAIL")
        run.emit(f"stage.{st.name}.detail", st.detail)
    run.result("verdict", rep.message)
    return 0 if rep.ok else 1


def cmd_balanced(args, run: Run) -> int:
    p = Path(args.file)
    if not p.is_file():
        raise UsageError(f"no such file: {args.file}")
    run.inputs[args.file] = _file_hash(p)
    coll = parse_collection(p.read_text(encoding="utf-8"), args.n)
    w = is_balanced_collection(coll)
    if w is None:
        run.result("balanced", False)
        print("not balanced")
        return 0
    run.result("balanced", True)
    for t, wt in w.items():
        run.result(f"weight[{t.a + 1} {t.b + 1} {t.c + 1}]", str(wt))
    return 0


def cmd_random(args, run: Run) -> int:
    run.seeds.append(args.seed)
    m = random_market(args.n, Kind(args.kind), args.seed)
    text = serialize_market(m)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        run.emit("written", args.out)
    else:
        sys.stdout.write(text)
    run.result("fingerprint", m.fingerprint())
    return 0


def cmd_pad(args, run: Run) -> int:
    m = _read_market(args.file, run.inputs)
    padded = pad_market(m, args.n)
    text = serialize_market(padded)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        run.emit("written", args.out)
    else:
        sys.stdout.write(text)
    run.result("fingerprint", padded.fingerprint())
    return 0


def cmd_replay(args, run: Run) -> int:
    p = Path(args.recorded)
    if not p.is_file():
        raise UsageError(f"no such file: {args.recorded}")
    last = p.read_text(encoding="utf-8").strip().splitlines()[-1]
    recorded = json.loads(last.removeprefix("manifest="))
    buf = io.StringIO()
    with redirect_stdout(buf):
        code, summary = execute(recorded["command"])
    same = summary == recorded["summary"] and code == recorded["exit_code"]
    run.result("replay", "identical" if same else "differs")
    if not same:
        run.emit("recorded", json.dumps(recorded["summary"], sort_keys=True))
        run.emit("replayed", json.dumps(summary, sort_keys=True))
    return 0 if same else 1


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tristable", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--manifest", metavar="PATH", help="also write the run manifest to PATH")
    sub = p.add_subparsers(dest="command", required=True)

    def jobs(sp):
        sp.add_argument("--jobs", type=int, default=1, help="worker processes (results do not depend on it)")

    sp = sub.add_parser("verify-paper", help="check the built-in counterexamples and the non-balanced witness")
    sp.add_argument("--weakest", metavar="FILE", help="replace the built-in weakest-link market")
    sp.add_argument("--circular", metavar="FILE", help="replace the built-in circular market")
    jobs(sp)
    sp.set_defaults(func=cmd_verify_paper)

    sp = sub.add_parser("count", help="count stable matchings of a market file")
    sp.add_argument("file")
    sp.add_argument("--rule", choices=[r.value for r in TripleRule], required=True)
    sp.add_argument("--mode", choices=[m.value for m in Mode], default="strict")
    sp.add_argument("--list", action="store_true", help="print every stable matching")
    jobs(sp)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("search", help="sampled campaign (--samples) or local search (--sweeps)")
    sp.add_argument("--rule", choices=[r.value for r in TripleRule], required=True)
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--mode", choices=[m.value for m in Mode], default="strict")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--sweeps", type=int)
    sp.add_argument("--neighbors", type=int, help="sample this many alternative lists per agent")
    sp.add_argument("--exhaustive-space", action="store_true",
                    help="walk every market in order instead of sampling (limit with --samples)")
    sp.add_argument("--start", metavar="FILE", help="start local search from this market")
    sp.add_argument("--out", metavar="DIR", help="directory for counterexample files")
    jobs(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("construct", help="build a stable matching for a circular market with n <= 4")
    sp.add_argument("file")
    sp.add_argument("--distinguished", default="a_1", help="agent given the n=3 content guarantee")
    sp.add_argument("--out", metavar="DIR", help="directory for discrepancy records")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("scarf-verify", help="three-stage non-balancedness check")
    sp.set_defaults(func=cmd_scarf)

    sp = sub.add_parser("balanced", help="decide whether a collection of triples is balanced")
    sp.add_argument("file")
    sp.add_argument("-n", type=int)
    sp.set_defaults(func=cmd_balanced)

    sp = sub.add_parser("random", help="write a random market")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--kind", choices=[k.value for k in Kind], default="circular")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", metavar="FILE")
    sp.set_defaults(func=cmd_random)

    sp = sub.add_parser("pad", help="pad a market with dummy agents")
    sp.add_argument("file")
    sp.add_argument("-n", type=int, required=True, help="target size")
    sp.add_argument("--out", metavar="FILE")
    sp.set_defaults(func=cmd_pad)

    sp = sub.add_parser("replay", help="re-run a manifest and compare result summaries")
    sp.add_argument("recorded", metavar="MANIFEST")
    sp.set_defaults(func=cmd_replay)
    return p


def _dispatch(args) -> tuple[int, Run]:
    run = Run()
    try:
        code = args.func(args, run)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, run
    except (MarketError, RuleError, GuardError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        run.result("error", str(exc))
        code = 1
    return code, run


def execute(argv: Sequence[str]) -> tuple[int, dict]:
    """Run one command; returns the exit code and the result summary."""
    code, run = _dispatch(build_parser().parse_args(list(argv)))
    return code, run.summary


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    t0 = time.perf_counter()
    code, run = _dispatch(args)
    if code == 2:
        return code
    manifest = {
        "command": argv,
        "seeds": run.seeds,
        "version": __version__,
        "inputs": run.inputs,
        "wall_time": round(time.perf_counter() - t0, 6),
        "summary": run.summary,
        "exit_code": code,
    }
    line = json.dumps(manifest, sort_keys=True)
    print(f"manifest={line}")
    if args.manifest:
        Path(args.manifest).write_text(line + "\n", encoding="utf-8")
    return code


if __name__ == "__main__":
    sys.exit(main())
