"""JSON report schema for runs and fuzz campaigns.

Reports are plain dicts serialized with sorted keys and fixed separators,
so parsing and re-serializing a report is byte-identical.  Every report
embeds a content digest of the canonical scenario text, which makes fuzz
findings reproducible from (seed, params) alone.
"""

from __future__ import annotations

import hashlib
import json

from .oracle import OracleReport
from .simulator import AnnotatedTrace


def scenario_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _witness(w) -> dict:
    return {
        "from": [w.source.process, w.source.ordinal],
        "to": [w.target.process, w.target.ordinal],
        "messages": list(w.messages),
        "causal": w.causal,
    }


def run_report(run: AnnotatedTrace, oracle_report: OracleReport, scenario_text: str,
               scenario_id: str | None = None) -> dict:
    per_process = []
    for p in range(1, run.scenario.n + 1):
        ckpts = [
            {"ordinal": r.ordinal, "kind": r.kind, "t": r.timestamp}
            for (q, _), r in sorted(run.trace.checkpoints.items())
            if q == p
        ]
        per_process.append({"process": p, "checkpoints": ckpts})
    forced = [
        {
            "step": f.step_index,
            "process": f.process,
            "message": f.message,
            "conditions": sorted(f.decision.fired),
            "t": f.record.timestamp,
        }
        for f in run.forced
    ]
    piggybacks = [
        {"step": step, "message": name, **pb.fields()}
        for step, name, pb in run.piggybacks
    ]
    rep = {
        "scenario": {
            "id": scenario_id or (run.scenario.name or "inline"),
            "hash": scenario_hash(scenario_text),
            "procs": run.scenario.n,
            "steps": len(run.scenario.steps),
        },
        "protocol": run.protocol,
        "processes": per_process,
        "forced_events": forced,
        "piggybacks": piggybacks,
        "oracle": {
            "z_cycles": [
                {"checkpoint": [r.process, r.ordinal], **_witness(w)}
                for r, w in oracle_report.z_cycles
            ],
            "useless": sorted([r.process, r.ordinal] for r in oracle_report.useless),
            "violations": [
                {
                    "from": [a.process, a.ordinal],
                    "from_t": a.timestamp,
                    "to": [b.process, b.ordinal],
                    "to_t": b.timestamp,
                    "messages": list(w.messages),
                }
                for a, b, w in oracle_report.violations
            ],
            "stats": dict(oracle_report.stats),
        },
        "summary": {
            "forced": run.forced_count,
            "total_checkpoints": run.checkpoint_total,
            "useless": len(oracle_report.useless),
            "violations": len(oracle_report.violations),
            "z_consistent": not oracle_report.violations,
        },
    }
    return rep


def to_json(report: dict) -> str:
    """Canonical serialization: stable key order, fixed separators."""
    return json.dumps(report, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"
