import pytest

from cicsim.computation import (
    CKPT_INITIAL,
    CheckpointRecord,
    Event,
    Interval,
    Trace,
    causally_precedes,
    interval_of,
    is_consistent_global_checkpoint,
    validate_trace,
)
from cicsim.scenarios import FuzzParams, random_scenario
from cicsim.simulator import run_scenario


def initial_events(n):
    return [
        Event(i, 1, "ckpt", checkpoint=CheckpointRecord(i, 1, CKPT_INITIAL, 1))
        for i in range(1, n + 1)
    ]


def test_minimal_trace_is_valid():
    trace = Trace(3, initial_events(3))
    assert validate_trace(trace) == []


def test_receive_before_send_is_flagged():
    events = initial_events(2)
    events.append(Event(2, 2, "recv", message="m1"))
    events.append(Event(1, 2, "send", message="m1"))
    bad = validate_trace(Trace(2, events))
    assert any("receive precedes its send" in msg for msg in bad)


def test_orphan_receive_and_double_send_flagged():
    events = initial_events(2)
    events.append(Event(1, 2, "send", message="m1"))
    events.append(Event(1, 3, "send", message="m1"))
    events.append(Event(2, 2, "recv", message="mx"))
    bad = validate_trace(Trace(2, events))
    assert any("sent 2 times" in msg for msg in bad)
    assert any("never sent" in msg for msg in bad)


def test_ordinal_gaps_flagged():
    events = initial_events(2)
    events.append(Event(1, 5, "internal"))
    bad = validate_trace(Trace(2, events))
    assert any("ordinal 5, expected 2" in msg for msg in bad)


def test_fixture_traces_validate(fixture_run):
    for name in ("ccp", "fine-proposal", "lazy-fine-counterexample"):
        for protocol in ("none", "fi"):
            assert validate_trace(fixture_run(name, protocol).trace) == []


def test_send_precedes_receive(fixture_run):
    trace = fixture_run("ccp", "none").trace
    for name in trace.delivered_messages():
        s = trace.events[trace.message_sends[name][0]]
        r = trace.events[trace.message_recvs[name][0]]
        assert causally_precedes(s, r, trace)
        assert not causally_precedes(r, s, trace)


def test_causality_is_irreflexive(fixture_run):
    trace = fixture_run("ccp", "none").trace
    for ev in trace.events:
        assert not causally_precedes(ev, ev, trace)


def test_ccp_initial_checkpoint_precedes_c32(fixture_run):
    trace = fixture_run("ccp", "none").trace
    c11 = trace.checkpoint_event(trace.checkpoints[(1, 1)])
    c32 = trace.checkpoint_event(trace.checkpoints[(3, 2)])
    assert causally_precedes(c11, c32, trace)
    assert not causally_precedes(c32, c11, trace)


def test_unknown_event_rejected(fixture_run):
    trace = fixture_run("ccp", "none").trace
    stranger = Event(1, 99, "internal")
    with pytest.raises(ValueError):
        causally_precedes(stranger, trace.events[0], trace)


def test_causality_is_transitive_on_random_traces():
    for seed in (3, 11):
        scen = random_scenario(FuzzParams(n=3, events=24, seed=seed))
        trace = run_scenario(scen, "none").trace
        evs = trace.events
        rel = [
            [causally_precedes(a, b, trace) for b in evs]
            for a in evs
        ]
        n = len(evs)
        for a in range(n):
            for b in range(n):
                if not rel[a][b]:
                    continue
                for c in range(n):
                    if rel[b][c]:
                        assert rel[a][c]


def test_interval_of_checkpoint_event(fixture_run):
    trace = fixture_run("ccp", "none").trace
    c22 = trace.checkpoint_event(trace.checkpoints[(2, 2)])
    assert interval_of(c22, trace) == Interval(2, 2)


def test_interval_before_any_basic_checkpoint(fixture_run):
    trace = fixture_run("ccp", "none").trace
    first_send = trace.events[trace.message_sends["m1"][0]]
    assert interval_of(first_send, trace) == Interval(1, 1)


def test_interval_of_m3_receive_in_fine_proposal(fixture_run):
    trace = fixture_run("fine-proposal", "none").trace
    recv_m3 = trace.events[trace.message_recvs["m3"][0]]
    assert interval_of(recv_m3, trace) == Interval(2, 1)


def test_consistent_global_checkpoint_examples(fixture_run):
    trace = fixture_run("ccp", "none").trace
    picks = lambda *keys: [trace.checkpoints[k] for k in keys]
    assert is_consistent_global_checkpoint(picks((1, 2), (2, 2), (3, 2)), trace)
    assert is_consistent_global_checkpoint(picks((1, 1), (2, 1), (3, 1)), trace)
    assert not is_consistent_global_checkpoint(picks((1, 1), (2, 1), (3, 2)), trace)


def test_consistent_set_rejects_duplicates(fixture_run):
    trace = fixture_run("ccp", "none").trace
    recs = [trace.checkpoints[(1, 1)], trace.checkpoints[(1, 2)], trace.checkpoints[(3, 1)]]
    with pytest.raises(ValueError):
        is_consistent_global_checkpoint(recs, trace)


def test_initial_checkpoints_always_consistent():
    for seed in range(6):
        scen = random_scenario(FuzzParams(n=4, events=30, seed=seed))
        trace = run_scenario(scen, "none").trace
        initials = [trace.checkpoints[(p, 1)] for p in range(1, 5)]
        assert is_consistent_global_checkpoint(initials, trace)
