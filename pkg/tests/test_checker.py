"""Well-formedness rules and the lockstep timing conditions."""
import pytest

from scjcircus import ast, checker
from scjcircus.diagnostics import has_errors
from scjcircus.parser import parse_program


def check(text: str):
    program, diags = parse_program(text)
    assert not diags, diags
    return checker.check_program(program)


def codes(diags) -> list[str]:
    return [d.code for d in diags]


MINIMAL = {
    "safelet": """
safelet S = begin
  initialize = Skip
  getSequencer = res r : sequencer @ r := null
  {extra}
end
""",
    "sequencer": """
sequencer Q = begin
  getNextMission = res r : mission @ r := null
  {extra}
end
""",
    "mission": """
mission M = begin
  initialize = Skip
  {extra}
end
""",
    "handler": """
mission M = begin
  initialize = Skip
  handlers [ H ]
end
aperiodic handler H = begin
  handleAsyncEvent = Skip
  {extra}
end
""",
}


def component(kind: str, extra: str = "") -> str:
    return MINIMAL[kind].format(extra=extra)


# ---------------------------------------------------------------------------
# clean programs

def test_minimal_components_check_clean():
    for kind in MINIMAL:
        assert check(component(kind)) == []


def test_redundancy_program_checks_clean(redundancy_program):
    assert checker.check_program(redundancy_program) == []


# ---------------------------------------------------------------------------
# allocation policy

ALLOC_MATRIX = [
    ("safelet", "newI", True),
    ("safelet", "newM", False),
    ("safelet", "newPR", False),
    ("safelet", "newPM", False),
    ("sequencer", "newI", True),
    ("sequencer", "newM", True),
    ("sequencer", "newPR", False),
    ("sequencer", "newPM", False),
    ("mission", "newI", True),
    ("mission", "newM", True),
    ("mission", "newPR", False),
    ("mission", "newPM", False),
    ("handler", "newI", True),
    ("handler", "newM", True),
    ("handler", "newPR", True),
    ("handler", "newPM", True),
]

ALLOC_BODY = {
    "safelet": "initialize = t := {new} S()",
    "sequencer": "initial = t := {new} Q()",
    "mission": "initialize = t := {new} M()",
    "handler": "handleAsyncEvent = t := {new} H()",
}


def alloc_program(kind: str, new: str) -> str:
    # The allocation overrides the minimal body of the kind's main slot and
    # targets the component itself, so E-REF stays out of the picture.
    body = ALLOC_BODY[kind].format(new=new)
    slot = body.split(" = ")[0]
    marker = "aperiodic" if kind == "handler" else kind
    out = []
    for ln in component(kind).splitlines():
        stripped = ln.strip()
        if stripped.startswith(slot + " ="):
            continue
        out.append(ln)
        if stripped.startswith(marker) and stripped.endswith("begin"):
            out.append("  state [ t : ID ]")
            out.append("  " + body)
    return "\n".join(out)


@pytest.mark.parametrize("kind,new,accept", ALLOC_MATRIX)
def test_allocation_matrix(kind, new, accept):
    diags = check(alloc_program(kind, new))
    alloc_diags = [d for d in diags if d.code == "E-ALLOC"]
    if accept:
        assert alloc_diags == []
    else:
        assert len(alloc_diags) == 1
        assert kind in alloc_diags[0].message


def test_allocation_matrix_shape():
    accepts = sum(1 for _, _, ok in ALLOC_MATRIX if ok)
    assert len(ALLOC_MATRIX) == 16 and accepts == 9


def test_allocation_outside_component():
    program, diags = parse_program(
        "process P = begin @ x := newI P2() end\n"
        "process P2 = begin @ Skip end\n")
    assert not diags
    out = checker.check_program(program)
    assert "E-ALLOC" in codes(out)


def test_allocation_of_undeclared_class():
    diags = check(component("mission", "work = t := newI Ghost()")
                  .replace("begin\n", "begin\n  state [ t : ID ]\n", 1))
    assert "E-REF" in codes(diags)


# ---------------------------------------------------------------------------
# duplicates and mandatory methods

def test_duplicate_paragraph_name():
    text = component("safelet") + component("safelet")
    assert codes(check(text)).count("E-DUP") >= 1


def test_duplicate_special_method():
    text = component("safelet", "initialize = Skip")
    assert "E-DUP" in codes(check(text))


def test_duplicate_plain_method():
    text = component("safelet", "work = Skip\n  work = Skip")
    assert "E-DUP" in codes(check(text))


def test_method_colliding_with_generated_channel():
    text = component("safelet", "handleAsyncEvent = Skip")
    assert "E-DUP" in codes(check(text))


def test_paragraph_colliding_with_generated_channel():
    text = component("safelet") + "process start_peh = begin @ Skip end\n"
    assert "E-DUP" in codes(check(text))


def test_user_channel_reserved_name():
    text = "channel release : nat\n" + component("safelet")
    assert "E-DUP" in codes(check(text))


@pytest.mark.parametrize("kind,slot", [
    ("safelet", "initialize"),
    ("safelet", "getSequencer"),
    ("sequencer", "getNextMission"),
    ("mission", "initialize"),
    ("handler", "handleAsyncEvent"),
])
def test_missing_mandatory_method(kind, slot):
    text = "\n".join(ln for ln in component(kind).splitlines()
                     if not ln.strip().startswith(slot + " ="))
    diags = check(text)
    assert "E-METH" in codes(diags)
    assert any(slot in d.message for d in diags if d.code == "E-METH")


# ---------------------------------------------------------------------------
# channels

def test_undeclared_channel():
    text = component("mission", "work = mystery!1 -> Skip")
    diags = check(text)
    assert codes(diags) == ["E-CHAN"]
    assert "mystery" in diags[0].message


def test_channel_arity_mismatch():
    text = "channel c : nat\n" + component("mission", "work = c -> Skip")
    assert codes(check(text)) == ["E-CHAN"]


def test_generated_channels_usable_in_source():
    text = component("mission", "work = requestTerminationCall!null!null -> "
                     "requestTerminationRet!null!null -> Skip")
    assert check(text) == []


def test_hiding_set_checked():
    program, diags = parse_program(
        "process P = begin @ (Skip) \\ {| ghost |} end\n")
    assert not diags
    assert "E-CHAN" in codes(checker.check_program(program))


# ---------------------------------------------------------------------------
# references

def test_mission_handler_reference():
    text = """
mission M = begin
  initialize = Skip
  handlers [ Ghost ]
end
"""
    diags = check(text)
    assert "E-REF" in codes(diags)
    assert "Ghost" in diags[0].message


def test_res_method_wrong_target_kind():
    text = """
safelet S = begin
  initialize = Skip
  getSequencer = res r : sequencer @ r := M
end
mission M = begin
  initialize = Skip
end
"""
    diags = check(text)
    assert "E-REF" in codes(diags)


def test_release_needs_periodic_context():
    text = component("handler").replace(
        "handleAsyncEvent = Skip", "handleAsyncEvent = release -> Skip")
    assert "E-REF" in codes(check(text))


def test_release_needs_unique_aperiodic_sibling():
    text = """
mission M = begin
  initialize = Skip
  handlers [ P ]
end
periodic handler P = begin
  start 0 period 5
  handleAsyncEvent = release -> Skip
end
"""
    assert "E-REF" in codes(check(text))


def test_release_with_unique_sibling_is_clean():
    text = """
mission M = begin
  initialize = Skip
  handlers [ P, A ]
end
periodic handler P = begin
  start 0 period 5
  handleAsyncEvent = release -> Skip
end
aperiodic handler A = begin
  handleAsyncEvent = Skip
end
"""
    assert check(text) == []


def test_undeclared_process_reference():
    program, diags = parse_program("process P = begin @ Skip end\n"
                                   "process Q = P2\n")
    assert not diags
    assert "E-REF" in codes(checker.check_program(program))


def test_process_instantiation_arity():
    program, diags = parse_program(
        "process P(x : nat) = begin @ wait x end\n"
        "process Q = P(1, 2)\n")
    assert not diags
    out = checker.check_program(program)
    assert "E-REF" in codes(out)


# ---------------------------------------------------------------------------
# binding

def test_unbound_variable():
    text = component("mission", "work = t := 1")
    diags = check(text)
    assert "E-BIND" in codes(diags)


def test_state_variable_binds():
    text = component("mission", "work = t := 1").replace(
        "begin\n", "begin\n  state [ t : nat ]\n", 1)
    assert check(text) == []


def test_this_requires_state_variable():
    text = component("mission", "work = this.t := 1")
    assert "E-BIND" in codes(check(text))


def test_input_binder_scopes_continuation():
    text = ("channel c : nat\nchannel d : nat\n"
            + component("mission", "work = c?x -> d!x -> Skip"))
    assert check(text) == []


def test_input_binder_does_not_leak():
    text = ("channel c : nat\nchannel d : nat\n"
            + component("mission", "work = (c?x -> Skip) ; d!x -> Skip"))
    assert "E-BIND" in codes(check(text))


def test_var_block_binds():
    text = component("mission", "work = var v : nat @ v := 1")
    assert check(text) == []


def test_constructor_param_binds():
    text = """
mission M = begin
  initialize = Skip
  handlers [ H ]
end
aperiodic handler H = begin
  state [ owner : ID ]
  initial = o : ID @ this.owner := o
  handleAsyncEvent = Skip
end
"""
    assert check(text) == []


def test_constructor_param_must_be_id():
    text = """
mission M = begin
  initialize = Skip
  handlers [ H ]
end
aperiodic handler H = begin
  initial = o : nat @ Skip
  handleAsyncEvent = Skip
end
"""
    assert "E-BIND" in codes(check(text))


def test_constructor_param_only_on_handlers():
    text = """
sequencer Q = begin
  initial = o : ID @ Skip
  getNextMission = res r : mission @ r := null
end
"""
    assert "E-BIND" in codes(check(text))


def test_undefined_action_reference():
    text = component("mission", "work = Helper")
    assert "E-BIND" in codes(check(text))


def test_mu_bound_action_reference():
    text = ("channel c : nat\n"
            + component("mission", "work = mu X @ c!0 -> X"))
    assert check(text) == []


def test_unknown_set_name():
    text = component("mission", "work = var v : boolean @ "
                     "v := <1> in other")
    assert "E-BIND" in codes(check(text))


# ---------------------------------------------------------------------------
# partition and time

def test_overlapping_namesets():
    program, diags = parse_program("""
channel c
process P = begin
  state [ x : nat ]
  @ Skip [| { x } | {| c |} | { x } |] Skip
end
""")
    assert not diags
    assert "E-PART" in codes(checker.check_program(program))


def test_empty_literal_wait_range():
    text = component("mission", "work = wait 3..1")
    assert "E-TIME" in codes(check(text))


def test_symbolic_wait_range_not_flagged_statically():
    text = ("constant A : nat\nconstant B : nat\n"
            + component("mission", "work = wait A..B"))
    assert check(text) == []


# ---------------------------------------------------------------------------
# timing conditions

GOOD = {"P": 10, "ID": 2, "PTB": 3, "PD": 6, "AD": 4, "ATB": 1, "OD": 2}


def test_timing_conditions_satisfied(redundancy_program):
    assert checker.check_timing_conditions(redundancy_program, GOOD) == []


def test_timing_conditions_period_overrun(redundancy_program):
    bad = dict(GOOD, PD=8)
    diags = checker.check_timing_conditions(redundancy_program, bad)
    assert [d.code for d in diags] == ["W-TIMING"]
    assert "8 + 4 > 10" in diags[0].message
    assert not has_errors(diags)


def test_timing_conditions_deadline_overrun(redundancy_program):
    bad = dict(GOOD, PTB=5)
    diags = checker.check_timing_conditions(redundancy_program, bad)
    assert [d.code for d in diags] == ["W-TIMING"]
    assert "2 + 5 > 6" in diags[0].message


def test_timing_conditions_unbound_constant(redundancy_program):
    diags = checker.check_timing_conditions(redundancy_program, {"P": 10})
    assert set(codes(diags)) == {"E-UNBOUND"}
    assert sorted(d.message.split()[-1] for d in diags) == [
        "AD", "ATB", "ID", "OD", "PD", "PTB"]


def test_timing_conditions_empty_range(redundancy_program):
    bad = dict(GOOD, PTB=0)
    program = redundancy_program
    # 0..PTB stays a valid range at PTB=0; force an empty one via ATB.
    diags = checker.check_timing_conditions(program, dict(GOOD, ATB=0))
    assert diags == []


def test_timing_conditions_need_release_pair():
    text = """
mission M = begin
  initialize = Skip
  handlers [ P, A ]
end
periodic handler P = begin
  start 0 period 5
  handleAsyncEvent = Skip
end
aperiodic handler A = begin
  handleAsyncEvent = Skip
end
"""
    program, diags = parse_program(text)
    assert not diags
    # No release, hence no lockstep pair and nothing to warn about.
    assert checker.check_timing_conditions(program, {}) == []
