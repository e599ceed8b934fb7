"""Structural checks on the framework process templates."""
import pytest

from scjcircus import ast, frameworks
from scjcircus.analysis import unbound_action_refs, used_channels
from scjcircus.parser import parse_process
from scjcircus.pretty import pretty_process

IDS = {
    "safelet": ast.const("SID"),
    "sequencer": ast.const("QID"),
    "mission": ast.const("MID"),
    "peh": ast.const("HID"),
    "apeh": ast.const("AID"),
}


def build(kind: str) -> ast.BasicProcess:
    if kind == "mission":
        return frameworks.make_mission_fw(IDS[kind], (ast.const("HID"),))
    return frameworks.BUILDERS[kind](IDS[kind])


@pytest.mark.parametrize("kind", sorted(frameworks.BUILDERS))
def test_channel_discipline(kind):
    assert used_channels(build(kind)) == set(frameworks.INTERFACES[kind])


@pytest.mark.parametrize("kind", sorted(frameworks.BUILDERS))
def test_no_dangling_action_references(kind):
    fw = build(kind)
    defined = frozenset(name for name, _ in fw.paragraphs)
    assert unbound_action_refs(fw.main, defined) == set()
    for _, action in fw.paragraphs:
        assert unbound_action_refs(action, defined) == set()


@pytest.mark.parametrize("kind", sorted(frameworks.BUILDERS))
def test_pretty_parse_round_trip(kind):
    fw = build(kind)
    text = pretty_process(fw)
    reparsed, diags = parse_process(text, constants=frozenset(
        i.text for i in IDS.values()))
    assert not diags, diags
    assert reparsed == fw


def test_mission_fw_stops_each_handler_in_order():
    h1, h2 = ast.const("H1ID"), ast.const("H2ID")
    fw = frameworks.make_mission_fw(ast.const("MID"), (h1, h2))
    stops = [n.items[0].expr.ident.text for n in ast.walk(fw)
             if isinstance(n, ast.Prefix) and n.channel.text == "done_handler"]
    assert stops == ["H1ID", "H2ID"]


def test_mission_fw_zero_handlers_has_no_done_handler():
    fw = frameworks.make_mission_fw(ast.const("MID"))
    assert "done_handler" not in used_channels(fw)


def test_peh_fw_waits_for_start_before_dispatching():
    fw = frameworks.make_peh_fw(ast.const("HID"))
    execute = dict(fw.paragraphs)["Execute"]
    assert isinstance(execute, ast.Seq)
    assert execute.first == ast.Wait(ast.TConst(ast.const("start")))
    assert isinstance(execute.second, ast.ActPar)


def test_peh_fw_state_carries_start_and_period():
    fw = frameworks.make_peh_fw(ast.const("HID"))
    assert fw.state == (ast.Decl("start", "nat"), ast.Decl("period", "nat"))


def test_apeh_fw_guards_release_by_identifier():
    fw = frameworks.make_apeh_fw(ast.const("AID"))
    releases = [n for n in ast.walk(fw)
                if isinstance(n, ast.Prefix) and n.channel.text == "release"]
    assert len(releases) == 1
    assert releases[0].items == (ast.DotItem(ast.Name(ast.const("AID"))),)


def test_urgency_budgets_are_zero():
    for kind in ("peh", "apeh"):
        starts = [n for n in ast.walk(build(kind))
                  if isinstance(n, ast.StartBy)]
        assert len(starts) == 1
        assert starts[0].budget == ast.TLit(0)
