"""Command-line interface.

Verbs: run, fuzz, compare, amplify, diagram, list-scenarios.  Exit codes
are a stable scripting contract: 0 success/clean, 1 oracle findings
(useless checkpoints or timestamping violations, with --check), 2 usage
error, 3 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import oracle, report
from ._kernel import KERNEL
from .diagram import ascii_diagram, svg_diagram
from .protocols import PROTOCOL_NAMES, ProtocolError
from .rng import SplitMix64
from .scenarios import (
    FIXTURE_NAMES,
    FuzzParams,
    ScenarioParseError,
    UnknownScenarioError,
    builtin,
    builtin_description,
    parse_scenario,
    random_scenario,
    serialize_scenario,
)
from .simulator import ScenarioError, amplify_violation, compare_runs, run_scenario

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


def _load_scenario(ref: str):
    if ref in FIXTURE_NAMES:
        scen, _ = builtin(ref)
        return scen, serialize_scenario(scen)
    if os.path.exists(ref):
        with open(ref, encoding="utf-8") as fh:
            text = fh.read()
        return parse_scenario(text, name=os.path.basename(ref)), text
    raise UsageError(
        f"unknown scenario {ref!r}: not a built-in name or readable file; "
        f"built-ins: {', '.join(FIXTURE_NAMES)}"
    )


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _print_human(rep: dict) -> None:
    s = rep["summary"]
    print(f"scenario  {rep['scenario']['id']} (hash {rep['scenario']['hash']})")
    print(f"protocol  {rep['protocol']}")
    print(
        f"checkpoints {s['total_checkpoints']}  forced {s['forced']}  "
        f"useless {s['useless']}  violations {s['violations']}"
    )
    for f in rep["forced_events"]:
        print(
            f"  forced at step {f['step']}: P{f['process']} before delivering "
            f"{f['message']} via {'+'.join(f['conditions'])} (t={f['t']})"
        )
    for z in rep["oracle"]["z_cycles"]:
        print(
            f"  z-cycle on C_{z['checkpoint'][0]}^{z['checkpoint'][1]}: "
            f"{', '.join(z['messages'])}"
        )
    for v in rep["oracle"]["violations"]:
        print(
            f"  violation: C_{v['from'][0]}^{v['from'][1]} (t={v['from_t']}) "
            f"zigzags to C_{v['to'][0]}^{v['to'][1]} (t={v['to_t']}) "
            f"via {', '.join(v['messages'])}"
        )


def cmd_run(args) -> int:
    scen, text = _load_scenario(args.scenario)
    run = run_scenario(scen, args.protocol)
    orep = oracle.oracle_report(run.trace)
    rep = report.run_report(run, orep, text, scenario_id=args.scenario)
    if args.json:
        _write(report.to_json(rep), args.out)
    else:
        _print_human(rep)
    if args.check and (orep.useless or orep.violations):
        return EXIT_FINDINGS
    return EXIT_OK


def _fuzz_params(args, seed: int) -> FuzzParams:
    prng = SplitMix64(seed ^ 0xC1C51A8)
    if args.procs_max > args.procs_min:
        n = args.procs_min + prng.below(args.procs_max - args.procs_min + 1)
    else:
        n = args.procs_min
    if args.p_ckpt:
        rates = args.p_ckpt if len(args.p_ckpt) > 1 else args.p_ckpt[0]
        if isinstance(rates, list) and len(rates) != n:
            raise UsageError("--p-ckpt repeated must match the process count")
    else:
        # Asymmetric by default: every process draws its own rate.
        rates = tuple(0.02 + 0.28 * prng.random() for _ in range(n))
    return FuzzParams(
        n=n,
        events=args.events,
        p_ckpt=rates,
        p_send=args.p_send,
        max_in_flight=args.max_in_flight,
        seed=seed,
    )


def cmd_fuzz(args) -> int:
    protocols = args.protocols.split(",")
    for p in protocols:
        if p not in PROTOCOL_NAMES:
            raise UsageError(f"unknown protocol {p!r}; known: {', '.join(PROTOCOL_NAMES)}")
    forced_totals = {p: 0 for p in protocols}
    findings = []
    for seed in range(args.seed, args.seed + args.runs):
        params = _fuzz_params(args, seed)
        scen = random_scenario(params)
        for proto in protocols:
            run = run_scenario(scen, proto)
            forced_totals[proto] += run.forced_count
            useless, violations = oracle.quick_findings(run.trace)
            if useless or violations:
                findings.append(
                    {
                        "seed": seed,
                        "protocol": proto,
                        "useless": useless,
                        "violations": violations,
                        "hash": report.scenario_hash(serialize_scenario(scen)),
                    }
                )
    findings.sort(key=lambda f: (f["seed"], f["protocol"]))
    if args.json:
        body = {
            "runs": args.runs,
            "seed0": args.seed,
            "protocols": protocols,
            "forced_totals": forced_totals,
            "findings": findings,
            "kernel": KERNEL,
        }
        _write(report.to_json(body), args.out)
    else:
        print(f"fuzz: {args.runs} scenarios, seeds {args.seed}..{args.seed + args.runs - 1}")
        for proto in protocols:
            print(f"  {proto:12s} forced checkpoints total: {forced_totals[proto]}")
        if findings:
            print(f"  findings ({len(findings)}):")
            for f in findings:
                print(
                    f"    seed {f['seed']} {f['protocol']}: useless={f['useless']} "
                    f"violations={f['violations']} (scenario {f['hash']})"
                )
        else:
            print("  findings: none")
    if args.check and findings:
        return EXIT_FINDINGS
    return EXIT_OK


def cmd_compare(args) -> int:
    scen, _ = _load_scenario(args.scenario)
    protocols = args.protocols.split(",")
    rows = compare_runs(scen, protocols)
    print(f"{'protocol':14s} {'forced':>6s} {'ckpts':>6s} {'useless':>8s} {'z-consistent':>13s}")
    for r in rows:
        print(
            f"{r.protocol:14s} {r.forced:6d} {r.checkpoints:6d} {r.useless:8d} "
            f"{str(r.z_consistent):>13s}"
        )
    return EXIT_OK


def cmd_amplify(args) -> int:
    scen, _ = _load_scenario(args.scenario)
    result = amplify_violation(scen, args.protocol)
    if result is None:
        print("nothing to amplify: the run has no cross-process timestamp violation")
        return EXIT_OK
    text = serialize_scenario(result.scenario)
    if args.json:
        rep = report.run_report(result.run, result.report, text, scenario_id="amplified")
        rep["amplified"] = {
            "inserted_message": result.inserted_message,
            "violation": [
                [result.violation[0].process, result.violation[0].ordinal],
                [result.violation[1].process, result.violation[1].ordinal],
            ],
        }
        _write(report.to_json(rep), args.out)
    else:
        src, dst = result.violation
        print(
            f"amplified violation {src.label()} -> {dst.label()} with new "
            f"message {result.inserted_message}"
        )
        print(text, end="")
        print(
            f"result: useless={len(result.report.useless)} "
            f"violations={len(result.report.violations)}"
        )
    if args.check and (result.report.useless or result.report.violations):
        return EXIT_FINDINGS
    return EXIT_OK


def cmd_diagram(args) -> int:
    scen, _ = _load_scenario(args.scenario)
    run = run_scenario(scen, args.protocol)
    text = ascii_diagram(run) if args.format == "ascii" else svg_diagram(run)
    _write(text, args.out)
    return EXIT_OK


def cmd_list_scenarios(args) -> int:
    for name in FIXTURE_NAMES:
        scen, _ = builtin(name)
        print(f"{name:26s} procs={scen.n} steps={len(scen.steps):3d}  "
              f"{builtin_description(name)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cicsim",
        description="simulate and verify index-based communication-induced "
        "checkpointing protocols",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario under one protocol")
    p.add_argument("scenario", help="built-in name or scenario file path")
    p.add_argument("protocol", choices=PROTOCOL_NAMES)
    p.add_argument("--json", action="store_true")
    p.add_argument("--check", action="store_true",
                   help="exit 1 if the oracle finds useless checkpoints or violations")
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("fuzz", help="run seeded random scenarios")
    p.add_argument("--protocols", default="fi",
                   help="comma-separated protocol names")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--procs", default="3-5",
                   help="process count, N or MIN-MAX (per-seed random)")
    p.add_argument("--events", type=int, default=40)
    p.add_argument("--p-ckpt", type=float, action="append", default=None,
                   help="basic-checkpoint probability; repeat for per-process "
                        "asymmetric rates (default: random per process)")
    p.add_argument("--p-send", type=float, default=0.35)
    p.add_argument("--max-in-flight", type=int, default=8)
    p.add_argument("--json", action="store_true")
    p.add_argument("--check", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("compare", help="compare protocols on one scenario")
    p.add_argument("scenario")
    p.add_argument("--protocols", default="none,pi,fi")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("amplify", help="extend a violating run into a Z-cycle")
    p.add_argument("scenario")
    p.add_argument("protocol", choices=PROTOCOL_NAMES)
    p.add_argument("--json", action="store_true")
    p.add_argument("--check", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_amplify)

    p = sub.add_parser("diagram", help="render a space-time diagram")
    p.add_argument("scenario")
    p.add_argument("protocol", choices=PROTOCOL_NAMES)
    p.add_argument("--format", choices=("ascii", "svg"), default="ascii")
    p.add_argument("--out")
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("list-scenarios", help="list built-in scenarios")
    p.set_defaults(func=cmd_list_scenarios)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if hasattr(args, "procs"):
        spec = str(args.procs)
        try:
            if "-" in spec:
                lo, hi = spec.split("-", 1)
                args.procs_min, args.procs_max = int(lo), int(hi)
            else:
                args.procs_min = args.procs_max = int(spec)
        except ValueError:
            print(f"cicsim: bad --procs value {spec!r}", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, UnknownScenarioError, ScenarioParseError, ScenarioError,
            ProtocolError) as exc:
        print(f"cicsim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK
    except Exception as exc:  # pragma: no cover - defensive
        print(f"cicsim: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
