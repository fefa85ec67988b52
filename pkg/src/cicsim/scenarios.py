"""Scenario text format, the built-in fixture library, and the fuzzer.

Scenario files are line oriented::

    procs 3          # header: process count
    send 1 2 m1      # P1 sends message m1 to P2
    recv 2 m1        # P2 delivers m1
    ckpt 3           # P3 takes a basic checkpoint

``#`` starts a comment; file order is the global simulation order.  Every
built-in fixture reconstructs a small checkpoint-and-communication pattern
whose interesting behavior (forced or declined checkpoints, zigzag paths,
Z-cycles, timestamp collisions) is pinned down by machine-checkable
claims, so the fixture library doubles as an executable test corpus.

Where a pattern under-determines the exact event order, the chosen order
is documented inline; the claims, not the drawing, are authoritative.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import oracle
from .computation import causally_precedes, interval_of, is_consistent_global_checkpoint
from .rng import SplitMix64
from .simulator import Scenario, Step, run_scenario


class ScenarioParseError(ValueError):
    """Carries (line number, message) pairs for every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"line {ln}: {msg}" for ln, msg in self.errors))


class UnknownScenarioError(KeyError):
    def __init__(self, name):
        super().__init__(
            f"unknown scenario {name!r}; available: {', '.join(FIXTURE_NAMES)}"
        )


def parse_scenario(text: str, name: str | None = None) -> Scenario:
    """Parse the line-oriented scenario format, rejecting ill-formed input
    with line-numbered errors."""
    errors: list[tuple[int, str]] = []
    n: int | None = None
    steps: list[Step] = []
    sends: dict[str, int] = {}
    received: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) == 2 and parts[0] == "procs" and parts[1].isdigit():
                n = int(parts[1])
                if n < 2:
                    errors.append((lineno, f"process count {n} < 2"))
            else:
                errors.append((lineno, "expected 'procs N' header"))
                break
            continue
        kind = parts[0]
        if kind == "ckpt" and len(parts) == 2 and parts[1].isdigit():
            p = int(parts[1])
            if not 1 <= p <= n:
                errors.append((lineno, f"process {p} out of range 1..{n}"))
            steps.append(Step("ckpt", p))
        elif kind == "send" and len(parts) == 4 and parts[1].isdigit() and parts[2].isdigit():
            p, q, msg = int(parts[1]), int(parts[2]), parts[3]
            if not 1 <= p <= n or not 1 <= q <= n:
                errors.append((lineno, "process out of range"))
            elif p == q:
                errors.append((lineno, f"self-send by P{p}"))
            if msg in sends:
                errors.append((lineno, f"message {msg} already sent"))
            sends[msg] = q
            steps.append(Step("send", p, q, msg))
        elif kind == "recv" and len(parts) == 3 and parts[1].isdigit():
            p, msg = int(parts[1]), parts[2]
            if not 1 <= p <= n:
                errors.append((lineno, f"process {p} out of range 1..{n}"))
            if msg not in sends:
                errors.append((lineno, f"receive of {msg} before its send"))
            elif sends[msg] != p:
                errors.append((lineno, f"{msg} was addressed to P{sends[msg]}"))
            if msg in received:
                errors.append((lineno, f"message {msg} already received"))
            received.add(msg)
            steps.append(Step("recv", p, message=msg))
        else:
            errors.append((lineno, f"cannot parse step {line!r}"))
    if n is None:
        errors.append((0, "empty scenario text"))
    if errors:
        raise ScenarioParseError(errors)
    return Scenario(n, tuple(steps), name=name)


def serialize_scenario(s: Scenario) -> str:
    """Canonical text form; parse(serialize(s)) == s."""
    lines = [f"procs {s.n}"]
    lines.extend(st.text() for st in s.steps)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Fixture claims.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FixtureClaim:
    """One machine-checkable assertion about a fixture under a protocol.

    ``kind`` selects the check, ``expect`` carries its arguments, and
    ``note`` states in plain words which behavior the claim pins down.
    """

    kind: str
    protocol: str
    expect: tuple
    note: str = ""


def _c(kind, protocol, *expect, note=""):
    return FixtureClaim(kind, protocol, tuple(expect), note)


def _eval_claim(claim: FixtureClaim, scen: Scenario, run_for, report_for):
    kind, e = claim.kind, claim.expect
    run = run_for(claim.protocol)
    trace = run.trace
    if kind == "forced_at":
        msg, conds = e
        step = scen.recv_step_index(msg)
        hits = [f for f in run.forced if f.step_index == step]
        if not hits:
            return False, f"no forced checkpoint at recv {msg}"
        if conds is not None and hits[0].decision.fired != frozenset(conds):
            return False, f"fired {set(hits[0].decision.fired)}, expected {set(conds)}"
        return True, ""
    if kind == "not_forced_at":
        (msg,) = e
        step = scen.recv_step_index(msg)
        if any(f.step_index == step for f in run.forced):
            return False, f"unexpected forced checkpoint at recv {msg}"
        return True, ""
    if kind == "forced_total":
        (count,) = e
        got = run.forced_count
        return got == count, f"forced {got}, expected {count}"
    if kind == "timestamp":
        key, t = e
        got = trace.checkpoints[tuple(key)].timestamp
        return got == t, f"C_{key[0]}^{key[1]}.t = {got}, expected {t}"
    if kind == "message_t":
        msg, t = e
        pb = next(p for _, nm, p in run.piggybacks if nm == msg)
        return pb.t == t, f"{msg}.t = {pb.t}, expected {t}"
    if kind in ("zigzag", "no_zigzag"):
        src = trace.checkpoints[tuple(e[0])]
        dst = trace.checkpoints[tuple(e[1])]
        w = oracle.zigzag_exists(src, dst, trace)
        if kind == "no_zigzag":
            return w is None, f"unexpected zigzag {getattr(w, 'messages', None)}"
        if w is None:
            return False, "no zigzag path found"
        msgs, causal = e[2], e[3] if len(e) > 3 else None
        if msgs is not None and w.messages != tuple(msgs):
            return False, f"witness {list(w.messages)}, expected {list(msgs)}"
        if causal is not None and w.causal != causal:
            return False, f"causal={w.causal}, expected {causal}"
        return True, ""
    if kind == "z_cycle":
        key, msgs = e
        rep = report_for(claim.protocol)
        for rec, w in rep.z_cycles:
            if rec.key() == tuple(key) and w.messages == tuple(msgs):
                return True, ""
        got = [(r.label(), list(w.messages)) for r, w in rep.z_cycles]
        return False, f"cycle {list(msgs)} on C_{key[0]}^{key[1]} not in {got}"
    if kind == "z_cycles_exact":
        key, expected = e
        rep = report_for(claim.protocol)
        got = [list(w.messages) for r, w in rep.z_cycles if r.key() == tuple(key)]
        want = [list(m) for m in expected]
        return got == want, f"witnesses {got}, expected {want}"
    if kind == "useless":
        keys, exact = e
        rep = report_for(claim.protocol)
        got = {r.key() for r in rep.useless}
        want = {tuple(k) for k in keys}
        if exact:
            return got == want, f"useless {sorted(got)}, expected {sorted(want)}"
        return want <= got, f"useless {sorted(got)} misses {sorted(want - got)}"
    if kind == "violation":
        a, b = e
        rep = report_for(claim.protocol)
        pairs = {(x.key(), y.key()) for x, y, _ in rep.violations}
        return (tuple(a), tuple(b)) in pairs, f"violation pairs {sorted(pairs)}"
    if kind == "clean":
        rep = report_for(claim.protocol)
        return rep.clean, (
            f"{len(rep.z_cycles)} cycles, {len(rep.violations)} violations"
        )
    if kind == "consistent":
        keys, expected = e
        recs = [trace.checkpoints[tuple(k)] for k in keys]
        got = is_consistent_global_checkpoint(recs, trace)
        return got == expected, f"consistent={got}, expected {expected}"
    if kind == "causal":
        a, b, expected = e
        ea = trace.checkpoint_event(trace.checkpoints[tuple(a)])
        eb = trace.checkpoint_event(trace.checkpoints[tuple(b)])
        got = causally_precedes(ea, eb, trace)
        return got == expected, f"causally_precedes={got}, expected {expected}"
    if kind == "interval":
        msg, key = e
        pos = trace.message_recvs[msg][0]
        iv = interval_of(trace.events[pos], trace)
        return (iv.process, iv.index) == tuple(key), f"recv {msg} in {iv.label()}"
    raise ValueError(f"unknown claim kind {kind!r}")


def verify_fixture(name: str) -> list[str]:
    """Replay a fixture through every protocol its claims mention and
    return one message per failed claim (empty list: fixture verified)."""
    scen, claims = builtin(name)
    runs: dict[str, object] = {}
    reports: dict[str, oracle.OracleReport] = {}

    def run_for(proto):
        if proto not in runs:
            runs[proto] = run_scenario(scen, proto)
        return runs[proto]

    def report_for(proto):
        if proto not in reports:
            reports[proto] = oracle.oracle_report(run_for(proto).trace)
        return reports[proto]

    failures = []
    for claim in claims:
        try:
            ok, detail = _eval_claim(claim, scen, run_for, report_for)
        except Exception as exc:  # claim machinery must not mask fixture bugs
            ok, detail = False, f"raised {exc!r}"
        if not ok:
            failures.append(
                f"{name} [{claim.protocol}] {claim.kind}{claim.expect}: {detail}"
                + (f" ({claim.note})" if claim.note else "")
            )
    return failures


# ---------------------------------------------------------------------------
# Fixture library.
# ---------------------------------------------------------------------------

_CCP_TEXT = """\
procs 3
# Motivating pattern: three processes, six messages, basic checkpoints
# placed so that P3's third checkpoint sits on two zigzag cycles while
# every other checkpoint stays useful.  m3 is sent before m4 arrives and
# m5/m6 cross, giving the non-causal links the cycles need.
send 1 2 m1
recv 2 m1
send 2 3 m2
recv 3 m2
ckpt 2
ckpt 3
ckpt 1
send 2 3 m3
recv 3 m3
ckpt 3
send 1 2 m4
recv 2 m4
send 2 1 m5
send 3 2 m6
recv 2 m6
recv 1 m5
ckpt 1
"""


def _ccp_claims():
    return [
        _c("timestamp", "none", (3, 3), 3, note="bare clock rules stamp C_3^3 with 3"),
        _c("timestamp", "none", (1, 3), 3, note="C_1^3 collides with C_3^3"),
        _c("z_cycles_exact", "none", (3, 3), ((("m6", "m3")), ("m6", "m5", "m4", "m3")),
           note="both cycles through C_3^3, shortest first"),
        _c("useless", "none", ((3, 3),), True, note="exactly one useless checkpoint"),
        _c("zigzag", "none", (1, 1), (3, 2), ("m1", "m2"), True,
           note="causal zigzag example"),
        _c("zigzag", "none", (1, 2), (3, 3), ("m4", "m3"), False,
           note="non-causal zigzag example"),
        _c("violation", "none", (3, 3), (1, 3),
           note="equal timestamps across a zigzag path"),
        _c("consistent", "none", ((1, 2), (2, 2), (3, 2)), True,
           note="the all-second-checkpoints line is consistent"),
        _c("consistent", "none", ((1, 1), (2, 1), (3, 2)), False,
           note="C_1^1 causally precedes C_3^2"),
        _c("causal", "none", (1, 1), (3, 2), True),
        _c("forced_total", "fi-greater", 1,
           note="one forced checkpoint repairs the pattern"),
        _c("forced_at", "fi-greater", "m6", None),
        _c("clean", "fi-greater", note="fully-informed run is zigzag-consistent"),
        _c("useless", "fi-greater", (), True),
        _c("forced_total", "fi-clockv", 1),
        _c("forced_at", "fi-clockv", "m6", None),
        _c("clean", "fi-clockv"),
        _c("forced_total", "pi", 1),
        _c("clean", "pi"),
    ]


_Z_CONSISTENT_TEXT = """\
procs 3
# The ccp pattern with one extra checkpoint on P2 before m6 is delivered;
# the addition breaks both cycles and makes the bare-clock timestamps
# zigzag-consistent.
send 1 2 m1
recv 2 m1
send 2 3 m2
recv 3 m2
ckpt 2
ckpt 3
ckpt 1
send 2 3 m3
recv 3 m3
ckpt 3
send 1 2 m4
recv 2 m4
send 2 1 m5
send 3 2 m6
ckpt 2
recv 2 m6
recv 1 m5
ckpt 1
"""


def _z_consistent_claims():
    return [
        _c("clean", "none", note="one added checkpoint restores consistency"),
        _c("useless", "none", (), True),
        _c("timestamp", "none", (2, 3), 3),
        _c("forced_total", "none", 0),
    ]


_STRICT_A_TEXT = """\
procs 3
# Two-message zigzag where the incoming timestamp equals the timestamp of
# the earlier outgoing message; no forced checkpoint is needed.
send 2 3 m1
recv 3 m1
ckpt 3
send 1 2 m2
recv 2 m2
"""


def _strict_a_claims():
    return [
        _c("forced_total", "pi", 0, note="equal timestamps force nothing"),
        _c("not_forced_at", "pi", "m2"),
        _c("clean", "pi"),
        _c("zigzag", "pi", (1, 1), (3, 2), ("m2", "m1"), False,
           note="the two-message zigzag the condition watches"),
        _c("clean", "none"),
    ]


_STRICT_B_TEXT = """\
procs 3
# Same shape with the sender one checkpoint ahead: the incoming timestamp
# exceeds the first outgoing one and the receiver must force, otherwise
# C_1^2 reaches C_3^2 over [m2, m1] with equal timestamps.
ckpt 1
send 2 3 m1
recv 3 m1
ckpt 3
send 1 2 m2
recv 2 m2
"""


def _strict_b_claims():
    return [
        _c("forced_at", "pi", "m2", ("C1",), note="partly-informed condition fires"),
        _c("forced_total", "pi", 1),
        _c("clean", "pi"),
        _c("violation", "none", (1, 2), (3, 2),
           note="without the force the timestamps collide"),
        _c("useless", "none", (), True,
           note="a violation without any Z-cycle yet"),
        _c("timestamp", "none", (1, 2), 2),
        _c("timestamp", "none", (3, 2), 2),
    ]


_CLOCKV_A_TEXT = """\
procs 3
# The sender of m3 has piggybacked knowledge that P3's clock already
# reached m3.t, so the integer-vector refinement can skip the forced
# checkpoint the partly-informed rule would take.  m1 is delivered late,
# after C_3^2.
send 2 3 m1
ckpt 3
send 3 1 m2
ckpt 1
recv 1 m2
recv 3 m1
send 1 2 m3
recv 2 m3
ckpt 3
"""


def _clockv_a_claims():
    return [
        _c("not_forced_at", "fi-clockv", "m3",
           note="m3.clockv already covers P3's clock"),
        _c("forced_total", "fi-clockv", 0),
        _c("forced_at", "pi", "m3", ("C1",), note="partly informed still forces"),
        _c("forced_total", "fi-greater", 0, note="boolean encoding agrees"),
        _c("clean", "fi-clockv"),
        _c("zigzag", "fi-clockv", (1, 2), (3, 3), ("m3", "m1"), None,
           note="the path stays consistent: 2 < 3"),
        _c("timestamp", "fi-clockv", (1, 2), 2),
        _c("timestamp", "fi-clockv", (3, 3), 3),
    ]


_CLOCKV_B_TEXT = """\
procs 3
# Same refinement with the knowledge arriving at the receiver itself:
# m2 teaches P2 that P3 reached clock 2, so neither m2 nor the later m3
# needs a forced checkpoint.
send 2 3 m1
ckpt 3
send 3 2 m2
recv 3 m1
recv 2 m2
ckpt 1
send 1 2 m3
recv 2 m3
ckpt 3
"""


def _clockv_b_claims():
    return [
        _c("not_forced_at", "fi-clockv", "m2"),
        _c("not_forced_at", "fi-clockv", "m3",
           note="receiver-side clock knowledge suppresses the force"),
        _c("forced_total", "fi-clockv", 0),
        _c("forced_at", "pi", "m2", ("C1",)),
        _c("forced_total", "pi", 1),
        _c("forced_total", "fi-greater", 0),
        _c("clean", "fi-clockv"),
        _c("zigzag", "fi-clockv", (1, 2), (3, 3), ("m3", "m1"), None),
    ]


_GREATER_C_TEXT = """\
procs 3
# Boolean encoding of the same information: m3 arrives with a greater
# clock and its sender believes P3 is still behind, so the receiver must
# force before delivering.
send 2 3 m1
send 3 2 m2
recv 2 m2
ckpt 1
send 1 2 m3
recv 2 m3
recv 3 m1
ckpt 3
"""


def _greater_c_claims():
    return [
        _c("forced_at", "fi-greater", "m3", ("C1",),
           note="m3.greater[3] with a greater timestamp forces"),
        _c("forced_total", "fi-greater", 1),
        _c("forced_at", "fi-clockv", "m3", None, note="encodings force together"),
        _c("forced_total", "fi-clockv", 1),
        _c("clean", "fi-greater"),
        _c("violation", "none", (1, 2), (3, 2),
           note="skipping the force collides the timestamps"),
        _c("useless", "none", (), True),
    ]


_TAKEN_TEXT = """\
procs 3
# Why the checkpoint-count vector with taken marks is needed: the first
# condition stays quiet at m3 (the sender knows P3's clock caught up),
# but delivering m3 in P2's current interval would close the cycle
# [m2, m3, m1] through C_3^2.  The second condition catches it.
send 2 3 m1
recv 3 m1
ckpt 3
send 3 1 m2
recv 1 m2
send 1 2 m3
recv 2 m3
"""


def _taken_claims():
    return [
        _c("forced_at", "fi-greater", "m3", ("C2",),
           note="only the causal-chain-with-checkpoint test fires"),
        _c("forced_total", "fi-greater", 1),
        _c("clean", "fi-greater"),
        _c("forced_at", "fi-clockv", "m3", ("C2",)),
        _c("useless", "none", ((3, 2),), True,
           note="without the force C_3^2 is useless"),
        _c("z_cycle", "none", (3, 2), ("m2", "m3", "m1")),
    ]


_LAZY_A_TEXT = """\
procs 3
# Lazy increments: P2 receives only a lower-stamped message in its
# interval, so the next basic checkpoint may reuse timestamp 2.
send 3 2 m1
recv 2 m1
ckpt 2
send 1 2 m2
recv 2 m2
ckpt 2
"""


def _lazy_a_claims():
    return [
        _c("forced_total", "lazy-fi", 0),
        _c("timestamp", "lazy-fi", (2, 2), 2),
        _c("timestamp", "lazy-fi", (2, 3), 2, note="timestamp reused"),
        _c("clean", "lazy-fi"),
        _c("timestamp", "fi-greater", (2, 3), 3,
           note="the eager protocol spends a fresh timestamp here"),
    ]


_LAZY_B_TEXT = """\
procs 3
# An equal-stamped message arrives in the interval, so the next basic
# checkpoint must increment: reusing 2 would equal C_1^2 across [m3].
send 3 2 m1
recv 2 m1
ckpt 2
send 3 1 m2
recv 1 m2
ckpt 1
send 1 2 m3
recv 2 m3
ckpt 2
"""


def _lazy_b_claims():
    return [
        _c("forced_total", "lazy-fi", 0),
        _c("timestamp", "lazy-fi", (2, 2), 2),
        _c("timestamp", "lazy-fi", (1, 2), 2),
        _c("timestamp", "lazy-fi", (2, 3), 3, note="increment on equal clock"),
        _c("clean", "lazy-fi"),
        _c("zigzag", "lazy-fi", (1, 2), (2, 3), ("m3",), None),
    ]


_LAZY_C_TEXT = """\
procs 3
# A greater-stamped message arrives; the clock jumps and the next basic
# checkpoint increments past it.  P2's first basic checkpoint closes an
# empty interval and legitimately reuses timestamp 1.
send 2 3 m1
ckpt 2
recv 3 m1
ckpt 3
send 3 1 m2
recv 1 m2
ckpt 1
send 1 2 m3
recv 2 m3
ckpt 2
"""


def _lazy_c_claims():
    return [
        _c("forced_total", "lazy-fi", 0),
        _c("timestamp", "lazy-fi", (2, 2), 1, note="empty interval reuses 1"),
        _c("timestamp", "lazy-fi", (3, 2), 2),
        _c("timestamp", "lazy-fi", (1, 2), 3),
        _c("timestamp", "lazy-fi", (2, 3), 4, note="increment past the jump"),
        _c("clean", "lazy-fi"),
    ]


_LAZY_GREATER_A_TEXT = """\
procs 4
# Why the eager boolean vector is not enough under lazy increments: P1
# knows P3's clock equals m5.t, but not whether P3 will increment before
# its next checkpoint, so P2 must force before delivering m5.  The eager
# protocol, which increments unconditionally, needs no force here.
send 4 3 m1
recv 3 m1
ckpt 3
send 2 3 m2
send 3 1 m3
send 2 1 m4
recv 1 m3
send 1 2 m5
recv 1 m4
recv 2 m5
recv 3 m2
ckpt 3
"""


def _lazy_greater_a_claims():
    return [
        _c("forced_at", "lazy-fi", "m5", ("C1",),
           note="equal_incr gives no increment promise for P3"),
        _c("forced_total", "lazy-fi", 1),
        _c("clean", "lazy-fi"),
        _c("timestamp", "lazy-fi", (3, 3), 2, note="P3 indeed reuses its stamp"),
        _c("forced_total", "fi-greater", 0,
           note="eager increments make the same pattern safe"),
        _c("clean", "fi-greater"),
        _c("timestamp", "fi-greater", (3, 3), 3),
    ]


_LAZY_GREATER_B_TEXT = """\
procs 5
# The increment promise travels: P5's reply re-arms P3's increment flag
# after its checkpoint, m6 carries equal_incr[3], and P2 can deliver m7
# without forcing.
send 4 3 m1
recv 3 m1
ckpt 3
send 2 3 m2
send 3 5 m3
send 2 1 m4
recv 5 m3
send 5 3 m5
recv 3 m5
send 3 1 m6
recv 1 m4
recv 1 m6
send 1 2 m7
recv 2 m7
recv 3 m2
ckpt 3
"""


def _lazy_greater_b_claims():
    return [
        _c("not_forced_at", "lazy-fi", "m7",
           note="the piggybacked increment promise suppresses the force"),
        _c("forced_total", "lazy-fi", 0),
        _c("clean", "lazy-fi"),
        _c("timestamp", "lazy-fi", (3, 3), 3, note="P3 keeps the promise"),
    ]


_LAZY_GREATER_C_TEXT = """\
procs 5
# Even with the increment promise, the checkpoint-count machinery is
# still needed: delivering m7 in P2's interval would close the cycle
# [m7, m4, m6] through C_1^2.  m4 is named for its place in that cycle;
# it is sent before m3 in the global order.
send 4 3 m1
recv 3 m1
send 2 1 m2
send 2 3 m4
recv 3 m4
ckpt 3
send 3 5 m3
recv 5 m3
send 5 3 m5
recv 3 m5
send 3 1 m6
recv 1 m2
recv 1 m6
ckpt 1
send 1 2 m7
recv 2 m7
"""


def _lazy_greater_c_claims():
    return [
        _c("forced_at", "lazy-fi", "m7", ("C1", "C2"),
           note="the count/taken test detects the pending cycle"),
        _c("forced_total", "lazy-fi", 1),
        _c("clean", "lazy-fi"),
        _c("z_cycle", "none", (1, 2), ("m7", "m4", "m6"),
           note="the cycle the force breaks"),
        _c("useless", "none", ((1, 2),), False),
    ]


_FINE_PROPOSAL_TEXT = """\
procs 3
# The weakened first condition in action: at m3 every classic trigger is
# up (greater clock, sender thinks P3 is behind) but no checkpoint is
# known on the closing chain, so fine declines the forced checkpoint the
# fully-informed protocol takes.  The price: C_1^2 reaches C_3^2 over
# [m3, m1] with equal timestamps.  m2 is delivered late, after C_1^2.
send 2 3 m1
recv 3 m1
send 3 1 m2
ckpt 3
ckpt 1
recv 1 m2
send 1 2 m3
recv 2 m3
"""


def _fine_proposal_claims():
    return [
        _c("not_forced_at", "fine", "m3", note="no known checkpoint on the chain"),
        _c("forced_total", "fine", 0),
        _c("message_t", "fine", "m1", 1),
        _c("message_t", "fine", "m3", 2),
        _c("violation", "fine", (1, 2), (3, 2),
           note="the run is not zigzag-consistent"),
        _c("useless", "fine", (), True, note="but nothing is useless yet"),
        _c("timestamp", "fine", (1, 2), 2),
        _c("timestamp", "fine", (3, 2), 2),
        _c("interval", "fine", "m3", (2, 1)),
        _c("forced_at", "fi-greater", "m3", ("C1",),
           note="the fully-informed protocol forces here"),
        _c("forced_total", "fi-greater", 1),
        _c("clean", "fi-greater"),
        _c("forced_total", "fine-ri", 0,
           note="the receiver-index variant also declines"),
    ]


_FINE_COUNTEREXAMPLE_TEXT = """\
procs 3
# Continuation of fine-proposal produced by the violation amplifier: m4
# leaves P3 right after C_3^2 and lands at P1 inside the interval where
# m3 was sent, closing the cycle [m4, m3, m1].  fine still sees no reason
# to force anywhere and C_3^2 becomes useless.
send 2 3 m1
recv 3 m1
send 3 1 m2
ckpt 3
send 3 1 m4
ckpt 1
recv 1 m2
send 1 2 m3
recv 1 m4
recv 2 m3
"""


def _fine_counterexample_claims():
    return [
        _c("forced_total", "fine", 0, note="zero forced checkpoints"),
        _c("useless", "fine", ((3, 2),), True,
           note="P3's second checkpoint is useless"),
        _c("z_cycle", "fine", (3, 2), ("m4", "m3", "m1")),
        _c("forced_total", "fi-greater", 1),
        _c("useless", "fi-greater", (), True,
           note="the fully-informed protocol survives the same scenario"),
        _c("clean", "fi-greater"),
        _c("forced_total", "fine-ri", 0),
        _c("useless", "fine-ri", ((3, 2),), True,
           note="the receiver-index variant fails here too"),
    ]


_LAZY_FINE_COUNTEREXAMPLE_TEXT = """\
procs 4
# The lazy variant of the same failure.  m3 teaches P2 about P4 before
# P4 checkpoints; m4 then carries a greater clock to P3, which has sent
# m2 to P4 in its current interval.  lazy-fi forces at m4; lazy-fine sees
# taken[4] false and declines.  m5 closes the cycle [m5, m4, m2] through
# C_4^2 with an equal clock at P2, firing nothing.
send 1 2 m1
recv 2 m1
ckpt 2
send 3 4 m2
send 4 2 m3
recv 4 m2
recv 2 m3
ckpt 4
send 2 3 m4
recv 3 m4
send 4 2 m5
recv 2 m5
"""


def _lazy_fine_counterexample_claims():
    return [
        _c("not_forced_at", "lazy-fine", "m4",
           note="no checkpoint known behind the witness"),
        _c("not_forced_at", "lazy-fine", "m5", note="equal clock fires nothing"),
        _c("forced_total", "lazy-fine", 0),
        _c("z_cycle", "lazy-fine", (4, 2), ("m5", "m4", "m2")),
        _c("useless", "lazy-fine", ((4, 2),), True,
           note="exactly one useless checkpoint"),
        _c("forced_at", "lazy-fi", "m4", ("C1",),
           note="the unweakened condition breaks the cycle at m4"),
        _c("forced_total", "lazy-fi", 1),
        _c("useless", "lazy-fi", (), True),
        _c("clean", "lazy-fi"),
        _c("forced_at", "lazy-fine-ri", "m4", None,
           note="receiver-index variant forces here and misses the failure"),
    ]


_THEOREM1_A_TEXT = """\
procs 3
# Minimal violating-but-harmless computation: C_1^2 reaches C_3^2 over
# the non-causal chain [m1, m2] with equal timestamps, yet no Z-cycle
# exists.  Input for the violation amplifier.
send 2 3 m2
ckpt 1
send 1 2 m1
recv 2 m1
recv 3 m2
ckpt 3
"""


def _theorem1_a_claims():
    return [
        _c("violation", "none", (1, 2), (3, 2)),
        _c("useless", "none", (), True, note="violation without a cycle"),
        _c("zigzag", "none", (1, 2), (3, 2), ("m1", "m2"), False),
        _c("timestamp", "none", (1, 2), 2),
        _c("timestamp", "none", (3, 2), 2),
    ]


_THEOREM1_B_TEXT = """\
procs 3
# theorem1-a extended by the amplifier: m3 leaves P3 right after C_3^2
# and lands at P1 after m1 was sent, closing the cycle [m3, m1, m2].
send 2 3 m2
ckpt 1
send 1 2 m1
recv 2 m1
recv 3 m2
ckpt 3
send 3 1 m3
recv 1 m3
"""


def _theorem1_b_claims():
    return [
        _c("useless", "none", ((3, 2),), True),
        _c("z_cycle", "none", (3, 2), ("m3", "m1", "m2")),
    ]


@dataclass(frozen=True)
class _Fixture:
    description: str
    text: str
    claims: tuple


_FIXTURES: dict[str, _Fixture] = {
    "ccp": _Fixture(
        "three processes, six messages, one useless checkpoint (C_3^3)",
        _CCP_TEXT, tuple(_ccp_claims())),
    "z-consistent": _Fixture(
        "ccp plus one checkpoint on P2; zigzag-consistent under bare clocks",
        _Z_CONSISTENT_TEXT, tuple(_z_consistent_claims())),
    "strict-a": _Fixture(
        "two-message zigzag, equal timestamps: partly informed stays quiet",
        _STRICT_A_TEXT, tuple(_strict_a_claims())),
    "strict-b": _Fixture(
        "two-message zigzag, greater timestamp: partly informed forces",
        _STRICT_B_TEXT, tuple(_strict_b_claims())),
    "clockv-a": _Fixture(
        "sender-side clock knowledge suppresses the partly-informed force",
        _CLOCKV_A_TEXT, tuple(_clockv_a_claims())),
    "clockv-b": _Fixture(
        "receiver-side clock knowledge suppresses the partly-informed force",
        _CLOCKV_B_TEXT, tuple(_clockv_b_claims())),
    "greater-c": _Fixture(
        "boolean clock encoding: greater flag plus greater timestamp forces",
        _GREATER_C_TEXT, tuple(_greater_c_claims())),
    "taken": _Fixture(
        "checkpoint counts with taken marks catch a cycle the clock test misses",
        _TAKEN_TEXT, tuple(_taken_claims())),
    "lazy-a": _Fixture(
        "lazy increments: lower-stamped receive lets a checkpoint reuse its stamp",
        _LAZY_A_TEXT, tuple(_lazy_a_claims())),
    "lazy-b": _Fixture(
        "lazy increments: equal-stamped receive requires an increment",
        _LAZY_B_TEXT, tuple(_lazy_b_claims())),
    "lazy-c": _Fixture(
        "lazy increments: greater-stamped receive bumps the clock then increments",
        _LAZY_C_TEXT, tuple(_lazy_c_claims())),
    "lazy-greater-a": _Fixture(
        "lazy run where the eager boolean vector is not informative enough",
        _LAZY_GREATER_A_TEXT, tuple(_lazy_greater_a_claims())),
    "lazy-greater-b": _Fixture(
        "increment promises propagate and suppress the forced checkpoint",
        _LAZY_GREATER_B_TEXT, tuple(_lazy_greater_b_claims())),
    "lazy-greater-c": _Fixture(
        "increment promise present but a pending cycle still forces",
        _LAZY_GREATER_C_TEXT, tuple(_lazy_greater_c_claims())),
    "fine-proposal": _Fixture(
        "fine declines a force and loses zigzag-consistent timestamps",
        _FINE_PROPOSAL_TEXT, tuple(_fine_proposal_claims())),
    "fine-counterexample": _Fixture(
        "amplified continuation: fine admits a useless checkpoint",
        _FINE_COUNTEREXAMPLE_TEXT, tuple(_fine_counterexample_claims())),
    "lazy-fine-counterexample": _Fixture(
        "lazy-fine admits a useless checkpoint where lazy-fi stays safe",
        _LAZY_FINE_COUNTEREXAMPLE_TEXT, tuple(_lazy_fine_counterexample_claims())),
    "theorem1-a": _Fixture(
        "timestamp violation without any Z-cycle (amplifier input)",
        _THEOREM1_A_TEXT, tuple(_theorem1_a_claims())),
    "theorem1-b": _Fixture(
        "theorem1-a plus the amplifier's message: the cycle closes",
        _THEOREM1_B_TEXT, tuple(_theorem1_b_claims())),
}

FIXTURE_NAMES = tuple(_FIXTURES)


def builtin(name: str) -> tuple[Scenario, list[FixtureClaim]]:
    """Reconstructed scenario and its claims; unknown names list the
    registry."""
    try:
        fx = _FIXTURES[name]
    except KeyError:
        raise UnknownScenarioError(name) from None
    return parse_scenario(fx.text, name=name), list(fx.claims)


def builtin_description(name: str) -> str:
    try:
        return _FIXTURES[name].description
    except KeyError:
        raise UnknownScenarioError(name) from None


# ---------------------------------------------------------------------------
# Random scenarios.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FuzzParams:
    """Knobs for the seeded scenario generator.

    ``p_ckpt`` is either one probability or a per-process sequence, which
    is how asymmetric checkpointing rates are expressed.
    """

    n: int
    events: int = 40
    p_ckpt: float | tuple = 0.15
    p_send: float = 0.35
    max_in_flight: int = 8
    seed: int = 0


def random_scenario(params: FuzzParams) -> Scenario:
    """Seeded, reproducible scenario.

    Every draw comes from one splitmix64 stream, so equal params give
    bit-identical scenarios on any platform.  Deliveries pick uniformly
    among in-flight messages (channels are not FIFO); pending messages are
    drained at the end while the event budget lasts, so sends are received
    unless the budget truncates the trace.
    """
    if params.n < 2:
        raise ValueError(f"need at least 2 processes, got {params.n}")
    if isinstance(params.p_ckpt, (int, float)):
        p_ckpt = [float(params.p_ckpt)] * params.n
    else:
        p_ckpt = [float(x) for x in params.p_ckpt]
        if len(p_ckpt) != params.n:
            raise ValueError("p_ckpt must have one entry per process")
    for prob in p_ckpt + [params.p_send]:
        if not 0.0 <= prob <= 1.0:
            raise ValueError(f"probability {prob} outside [0, 1]")

    rng = SplitMix64(params.seed)
    steps: list[Step] = []
    in_flight: list[tuple[str, int]] = []
    counter = 0
    attempts = 0
    while len(steps) < params.events and attempts < params.events * 8:
        attempts += 1
        p = 1 + rng.below(params.n)
        r = rng.random()
        if r < p_ckpt[p - 1]:
            steps.append(Step("ckpt", p))
        elif r < p_ckpt[p - 1] + params.p_send and len(in_flight) < params.max_in_flight:
            q = 1 + rng.below(params.n - 1)
            if q >= p:
                q += 1
            counter += 1
            name = f"m{counter}"
            steps.append(Step("send", p, q, name))
            in_flight.append((name, q))
        elif in_flight:
            name, dest = in_flight.pop(rng.below(len(in_flight)))
            steps.append(Step("recv", dest, message=name))
    while in_flight and len(steps) < params.events:
        name, dest = in_flight.pop(rng.below(len(in_flight)))
        steps.append(Step("recv", dest, message=name))
    return Scenario(params.n, tuple(steps))
