"""Discrete-time simulation semantics."""
import pytest
from hypothesis import given, settings, strategies as st

from scjcircus import ast, frameworks, sim
from scjcircus.parser import parse_action, parse_process

from oracles import SAFELET_FW_DEPTH6


def action_config(text: str, consts=None, channels=None, nat_values=(0, 1, 2),
                  constants=frozenset()) -> sim.Config:
    action, diags = parse_action(text, constants=constants)
    assert not diags, diags
    process = ast.BasicProcess((), (), action)
    env = dict(channels or {})
    env.setdefault("a", ())
    env.setdefault("b", ())
    env.setdefault("c", ("nat",))
    env.setdefault("d", ("nat",))
    return sim.build_config(process, consts=consts, channels=env,
                            nat_values=nat_values)


def labels(config: sim.Config) -> set[str]:
    return {e.label for e in sim.enabled(config)}


def run_labels(trace) -> list[str]:
    return [e.label for _, e in trace]


# ---------------------------------------------------------------------------
# enabled / step basics

def test_wait_only_lets_time_pass():
    c = action_config("wait 3")
    assert labels(c) == {"tick"}


def test_wait_zero_is_immediate():
    c = action_config("wait 0 ; c!1 -> Skip")
    assert labels(c) == {"c.1", "tick"} and c.clock == 0


def test_hidden_communication_preempts_tick():
    c = action_config("(c!1 -> wait 1) \\ {| c |}")
    events = sim.enabled(c)
    assert [e.kind for e in events] == ["internal"]


def test_choice_offers_union():
    c = action_config("a -> Skip [] b -> Skip")
    assert labels(c) == {"a", "b", "tick"}


def test_step_resolves_choice():
    c = action_config("a -> c!1 -> Skip [] b -> c!2 -> Skip")
    after = sim.step(c, sim.Event("comm", "a"))
    assert labels(after) == {"c.1", "tick"}


def test_step_rejects_disabled_event():
    c = action_config("a -> Skip")
    with pytest.raises(sim.IllegalStep):
        sim.step(c, sim.Event("comm", "b"))


def test_input_offers_candidate_values():
    c = action_config("c?x -> Skip")
    assert labels(c) == {"c.0", "c.1", "c.2", "tick"}


def test_input_binds_continuation():
    c = action_config("c?x -> d!(x + 1) -> Skip")
    after = sim.step(c, sim.Event("comm", "c", (1,)))
    assert labels(after) == {"d.2", "tick"}


def test_assignment_updates_store():
    c = action_config("var v : nat @ v := 2 ; c!v -> Skip")
    assert labels(c) == {"c.2", "tick"}


def test_alternation_takes_first_true_guard():
    c = action_config(
        "var v : nat @ if v == 0 then c!7 -> Skip [] v == 0 then c!8 -> Skip"
        " fi")
    assert labels(c) == {"c.7", "tick"}


def test_alternation_with_no_true_guard_stops():
    c = action_config("var v : nat @ if v == 1 then c!7 -> Skip fi")
    assert labels(c) == {"tick"}


def test_internal_choice_resolves_internally():
    c = action_config("(a -> Skip) |~| (b -> Skip)")
    events = sim.enabled(c)
    assert all(e.kind == "internal" for e in events)
    follow = {frozenset(labels(nxt)) for _, nxt in sim.successors(c)}
    assert follow == {frozenset({"a", "tick"}), frozenset({"b", "tick"})}


def test_synchronization_requires_both_sides():
    c = action_config("(c!1 -> Skip) [| {} | {| c |} | {} |] (c?x -> Skip)")
    assert labels(c) == {"c.1", "tick"}


def test_interleaving_does_not_synchronize():
    c = action_config("(a -> Skip) ||| (a -> Skip)")
    after = sim.step(c, sim.Event("comm", "a"))
    assert labels(after) == {"a", "tick"}


def test_interrupt_trigger_discards_body():
    c = action_config("(c!1 -> c!2 -> Skip) /\\ a -> b -> Skip")
    assert labels(c) == {"c.1", "a", "tick"}
    after = sim.step(c, sim.Event("comm", "a"))
    assert labels(after) == {"b", "tick"}


def test_interrupted_body_keeps_trigger_armed():
    c = action_config("(c!1 -> c!2 -> Skip) /\\ a -> Skip")
    after = sim.step(c, sim.Event("comm", "c", (1,)))
    assert labels(after) == {"c.2", "a", "tick"}


# ---------------------------------------------------------------------------
# time

def test_tick_decrements_wait():
    c = action_config("wait 2 ; c!1 -> Skip")
    c = sim.step(c, sim.TICK)
    assert labels(c) == {"tick"}
    c = sim.step(c, sim.TICK)
    assert labels(c) == {"c.1", "tick"} and c.clock == 2


def test_wait_range_commits_internally():
    c = action_config("wait 1..2 ; c!1 -> Skip")
    events = sim.enabled(c)
    assert all(e.kind == "internal" for e in events)
    assert len(sim.successors(c)) == 2


def test_wait_range_with_zero_low_can_skip_waiting():
    c = action_config("wait 0..1 ; c!1 -> Skip")
    follow = {frozenset(labels(nxt)) for _, nxt in sim.successors(c)}
    # Committing to zero delay exposes the prefix at once; committing to one
    # leaves only the tick.
    assert follow == {frozenset({"c.1", "tick"}), frozenset({"tick"})}


def test_deadline_blocks_tick_at_zero():
    c = action_config("(c!1 -> Skip) endby 0")
    assert labels(c) == {"c.1"}


def test_deadline_allows_tick_while_budget_remains():
    c = action_config("(c!1 -> Skip) endby 2")
    assert labels(c) == {"c.1", "tick"}
    c2 = sim.step(sim.step(c, sim.TICK), sim.TICK)
    assert labels(c2) == {"c.1"}


def test_startby_discharged_by_first_communication():
    c = action_config("(c!1 -> wait 5) startby 0")
    after = sim.step(c, sim.Event("comm", "c", (1,)))
    assert labels(after) == {"tick"}


def test_endby_not_discharged_by_communication():
    c = action_config("(c!1 -> wait 5) endby 2")
    after = sim.step(c, sim.Event("comm", "c", (1,)))
    c2 = sim.step(sim.step(after, sim.TICK), sim.TICK)
    assert labels(c2) == set()


def test_wait_range_commit_respects_enclosing_deadline():
    c = action_config("(wait 0..5 ; c!1 -> Skip) endby 2")
    waits = {nxt for _, nxt in sim.successors(c)}
    assert len(waits) == 3  # durations 0, 1, 2 only


def test_deadline_budget_evaluated_at_entry():
    c = action_config("wait 2 ; (c!1 -> Skip) endby T", consts={"T": 1},
                      constants=frozenset({"T"}))
    c = sim.step(sim.step(c, sim.TICK), sim.TICK)
    assert labels(c) == {"c.1", "tick"}


def test_urgency_and_time_additivity():
    c = action_config("wait 2")
    c = sim.step(c, sim.TICK)
    c = sim.step(c, sim.TICK)
    assert sim.terminated(c.tree) and c.clock == 2


# ---------------------------------------------------------------------------
# run

def test_run_skip_is_ok_at_clock_zero():
    c = action_config("Skip")
    trace, verdict = sim.run(c, max_ticks=10)
    assert trace == [] and verdict == sim.Verdict("ok", 0)


def test_run_stop_reports_deadlock():
    c = action_config("Stop")
    _, verdict = sim.run(c, max_ticks=10)
    assert verdict.kind == "deadlock" and verdict.clock == 0


def test_run_reports_deadline_violation():
    c = action_config("(c!1 -> Skip) endby 1 "
                      "[| {} | {| c |} | {} |] (wait 3 ; c?x -> Skip)")
    _, verdict = sim.run(c, max_ticks=10)
    assert verdict.kind == "deadline_violation"
    assert verdict.operator == "endby" and verdict.clock == 1


def test_run_is_reproducible():
    text = "c?x -> d!x -> (a -> Skip [] b -> Skip)"
    for seed in range(5):
        one = sim.run(action_config(text), max_ticks=5, seed=seed)
        two = sim.run(action_config(text), max_ticks=5, seed=seed)
        assert run_labels(one[0]) == run_labels(two[0]) and one[1] == two[1]


def test_run_prefers_ranked_channels():
    c = action_config("a -> Skip [] b -> Skip")
    trace, _ = sim.run(c, max_ticks=5, prefer=("b",))
    assert run_labels(trace)[0] == "b"


def test_run_internal_before_visible():
    c = action_config("(c!1 -> Skip) \\ {| c |} ||| (a -> Skip)")
    trace, _ = sim.run(c, max_ticks=5, seed=3)
    kinds = [e.kind for _, e in trace]
    assert kinds.index("internal") < kinds.index("comm")


def test_run_caps_zeno_loops():
    c = action_config("(mu X @ c!1 -> X) \\ {| c |}")
    _, verdict = sim.run(c, max_ticks=5, event_cap=100)
    assert verdict.kind == "depth_exhausted"


def test_unproductive_recursion_is_rejected():
    with pytest.raises(sim.SimError):
        action_config("mu X @ X")


# ---------------------------------------------------------------------------
# trace enumeration

def test_enumerate_skip():
    assert sim.enumerate_traces(action_config("Skip"), 5).traces == {()}


def test_enumerate_choice_depth_one():
    out = sim.enumerate_traces(action_config("a -> Skip [] b -> Skip"), 1)
    assert out.traces == {(), ("a",), ("b",)} and out.complete


def test_enumerate_counts_ticks():
    out = sim.enumerate_traces(action_config("wait 2 ; a -> Skip"), 2)
    assert out.traces == {(), ("tick",), ("tick", "tick")}


def test_enumerate_elides_idle_ticks():
    out = sim.enumerate_traces(action_config("a -> Skip"), 3)
    assert out.traces == {(), ("a",)}


def test_enumerate_elides_internal_events():
    out = sim.enumerate_traces(
        action_config("(c!1 -> a -> Skip) \\ {| c |}"), 2)
    assert out.traces == {(), ("a",)}


def test_enumerate_survives_hidden_divergence():
    out = sim.enumerate_traces(
        action_config("(mu X @ c!1 -> X) \\ {| c |} ||| (a -> Skip)"), 1)
    assert out.traces == {(), ("a",)}


def test_enumerate_reports_cap_exhaustion():
    # Echoing the input keeps one continuation per value alive, so the
    # state count outgrows the cap.
    out = sim.enumerate_traces(action_config("c?x -> c!x -> Skip"), 2, cap=2)
    assert not out.complete


# ---------------------------------------------------------------------------
# framework behaviour

SID = ast.const("SafeletID")


def test_safelet_fw_traces_match_oracle():
    config = sim.build_config(frameworks.make_safelet_fw(SID), name="Safelet")
    out = sim.enumerate_traces(config, 6)
    assert out.complete
    assert out.traces == SAFELET_FW_DEPTH6


def test_safelet_fw_null_branch_ends_the_run():
    config = sim.build_config(frameworks.make_safelet_fw(SID), name="Safelet")
    null_ret = sim.Event("comm", "getSequencerRet",
                         (sim.IdVal("SafeletID"), sim.IdVal("SafeletID"),
                          sim.NULL))
    for event in [sim.Event("comm", "safeletInitializeCall",
                            (sim.IdVal("SafeletID"),) * 2),
                  sim.Event("comm", "safeletInitializeRet",
                            (sim.IdVal("SafeletID"),) * 2),
                  sim.Event("comm", "getSequencerCall",
                            (sim.IdVal("SafeletID"),) * 2),
                  null_ret,
                  sim.Event("comm", "end_safelet_app")]:
        config = sim.step(config, event)
    assert sim.terminated(config.tree)


def _driver(channel: str, values: str) -> ast.Process:
    text = "begin @ %s%s -> Stop end" % (channel, values)
    process, diags = parse_process(text, constants=frozenset(
        {"HID", "AID", "MissionID"}))
    assert not diags, diags
    return process


def _peh_config(start: int, period: int) -> sim.Config:
    fw = frameworks.make_peh_fw(ast.const("HID"))
    driver = _driver("start_peh", "!null!HID!%d!%d" % (start, period))
    composed = ast.ProcPar(
        driver, (ast.chan("start_peh"), ast.chan("done_handler")), fw)
    return sim.build_config(composed, name="PEH")


@pytest.mark.parametrize("start,period", [(0, 5), (2, 3), (1, 1), (3, 5)])
def test_peh_fw_calls_are_periodic(start, period):
    config = _peh_config(start, period)
    horizon = start + 4 * period + 1
    trace, verdict = sim.run(config, max_ticks=horizon, seed=1)
    calls = [clock for clock, e in trace
             if e.kind == "comm" and e.channel == "handleAsyncEventCall"]
    assert verdict.kind == "ok"
    assert calls[:5] == [start + i * period for i in range(len(calls[:5]))]
    assert len(calls) >= 4


@given(st.integers(0, 5), st.integers(1, 5), st.integers(0, 2 ** 31))
@settings(max_examples=25, deadline=None)
def test_peh_fw_periodicity_any_seed(start, period, seed):
    config = _peh_config(start, period)
    trace, _ = sim.run(config, max_ticks=start + 2 * period + 1, seed=seed)
    calls = [clock for clock, e in trace
             if e.kind == "comm" and e.channel == "handleAsyncEventCall"]
    expected = [start + i * period for i in range(len(calls))]
    assert calls == expected


def test_apeh_fw_offers_no_call_before_release():
    fw = frameworks.make_apeh_fw(ast.const("AID"))
    config = sim.build_config(fw, name="APEH")
    out = sim.enumerate_traces(config, 6)
    assert out.complete
    for trace in out.traces:
        for i, label in enumerate(trace):
            if label.startswith("handleAsyncEventCall"):
                assert any(t.startswith("release") for t in trace[:i])


def test_apeh_fw_release_forces_immediate_call():
    fw = frameworks.make_apeh_fw(ast.const("AID"))
    config = sim.build_config(fw, name="APEH")
    config = sim.step(config, sim.Event(
        "comm", "start_apeh", (sim.NULL, sim.IdVal("AID"))))
    config = sim.step(config, sim.Event(
        "comm", "release", (sim.IdVal("AID"),)))
    assert sim.TICK not in sim.enabled(config)
    assert "handleAsyncEventCall.AID.AID" in labels(config)


def test_sequencer_fw_null_first_shows_no_start_mission():
    fw = frameworks.make_sequencer_fw(ast.const("QID"))
    config = sim.build_config(fw, name="Sequencer")
    config = sim.step(config, sim.Event("comm", "start_sequencer"))
    config = sim.step(config, sim.Event(
        "comm", "getNextMissionCall", (sim.IdVal("QID"),) * 2))
    config = sim.step(config, sim.Event(
        "comm", "getNextMissionRet",
        (sim.IdVal("QID"), sim.IdVal("QID"), sim.NULL)))
    assert labels(config) == {"end_sequencer_app", "tick"}


def test_mission_fw_zero_handlers_runs_termination_protocol():
    fw = frameworks.make_mission_fw(ast.const("MID"))
    config = sim.build_config(fw, name="Mission")
    mid = sim.IdVal("MID")
    for event in [sim.Event("comm", "start_mission", (mid,)),
                  sim.Event("comm", "missionInitializeCall", (mid, mid)),
                  sim.Event("comm", "missionInitializeRet", (mid, mid)),
                  sim.Event("comm", "requestTerminationCall", (sim.NULL, mid)),
                  sim.Event("comm", "requestTerminationRet", (sim.NULL, mid)),
                  sim.Event("comm", "missionCleanupCall", (mid, mid)),
                  sim.Event("comm", "missionCleanupRet", (mid, mid))]:
        config = sim.step(config, event)
    assert "done_mission.MID" in labels(config)


@pytest.mark.parametrize("kind", sorted(frameworks.BUILDERS))
def test_frameworks_alone_never_violate_deadlines(kind):
    ids = {"safelet": "SID", "sequencer": "QID", "mission": "MID",
           "peh": "HID", "apeh": "AID"}
    fw = frameworks.BUILDERS[kind](ast.const(ids[kind]))
    for seed in range(5):
        config = sim.build_config(fw, name=kind)
        _, verdict = sim.run(config, max_ticks=50, seed=seed, event_cap=2000)
        assert verdict.kind != "deadline_violation"
