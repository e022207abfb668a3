import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ethercpn.cli import run_command
from ethercpn.config import ConfigError, load_scenario, normalize, parse_config
from ethercpn.metrics import parse_records_csv
from ethercpn.netdump import dump_net
from ethercpn.kernel import Page, flatten
from ethercpn.switch import BUILTIN, WRR, build_net

MINIMAL = """\
sources:
  - period: 5
    emissions:
      - {inp: I1, outp: O1, prio: H}
consumers:
  - {port: O1}
"""


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


# -- config ---------------------------------------------------------------------


def test_builtin_wrr_base():
    sc = load_scenario("wrr-base")
    assert sc.scheduler == WRR((6, 3, 1))
    assert (sc.stop.max_steps, sc.stop.max_time) == (10000, 565)


def test_defaults_are_filled_and_echoed():
    text = normalize(parse_config(MINIMAL))
    for key in ("seed: 1", "policy: sp", "max_steps: 10000", "ingress_fifo: 2", "start_offset: 0", "capacity: 3"):
        assert key in text


def test_period_zero_rejected_with_line():
    bad = MINIMAL.replace("period: 5", "period: 0")
    with pytest.raises(ConfigError) as exc:
        parse_config(bad)
    assert exc.value.line == 2


def test_unknown_key_reported_with_line():
    with pytest.raises(ConfigError) as exc:
        parse_config(MINIMAL + "colour: blue\n")
    assert exc.value.line == 7 and "colour" in str(exc.value)


def test_nested_unknown_key():
    with pytest.raises(ConfigError) as exc:
        parse_config(MINIMAL.replace("{port: O1}", "{port: O1, rate: 2}"))
    assert exc.value.line == 6


def test_syntax_error_has_line():
    with pytest.raises(ConfigError) as exc:
        parse_config("sources: [\n  {period: 5\n")
    assert exc.value.line is not None


def test_wrong_types_rejected():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "seed: abc\n")
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "scheduler: {policy: wrr, weights: [6, 3]}\n")
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "scheduler: {policy: edf}\n")


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_normalize_is_a_fixed_point(name):
    sc = BUILTIN[name]()
    text = normalize(sc)
    again = parse_config(text)
    assert again == sc and normalize(again) == text


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 99), st.lists(st.integers(1, 9), min_size=3, max_size=3),
       st.integers(1, 7), st.integers(0, 3))
def test_round_trip_on_generated_scenarios(seed, weights, period, offset):
    text = MINIMAL.replace("period: 5", "period: %d\n    start_offset: %d" % (period, offset))
    text += "seed: %d\nscheduler: {policy: wrr, weights: %s}\n" % (seed, weights)
    sc = parse_config(text)
    assert parse_config(normalize(sc)) == sc


# -- run_command ----------------------------------------------------------------


def test_sp_base_default_seed(tmp_path):
    code, out, _ = cli("--scenario", "sp-base", "--out", str(tmp_path))
    assert code == 0
    h = [line for line in out.splitlines() if line.startswith("H ")][0].split()
    assert float(h[3]) > 95
    low = [line for line in out.splitlines() if line.startswith("L ")][0]
    assert low.endswith("yes")
    assert (tmp_path / "scenario.yaml").exists() and (tmp_path / "stats.csv").exists()


def test_zero_steps(tmp_path):
    code, _, _ = cli("--scenario", "sp-base", "--stop-steps", "0", "--out", str(tmp_path))
    assert code == 0
    assert parse_records_csv((tmp_path / "records.csv").read_text()) == []
    stats = (tmp_path / "stats.csv").read_text().splitlines()[1:]
    assert all(row.split(",")[1:3] == ["0", "0"] for row in stats)


def test_same_invocation_twice_is_byte_identical(tmp_path):
    args = ["--scenario", "wrr-base", "--seed", "7", "--stop-time", "120", "--emit", "stats,records,trace,net"]
    assert cli(*args, "--out", str(tmp_path / "a"))[0] == 0
    assert cli(*args, "--out", str(tmp_path / "b"))[0] == 0
    for name in ("scenario.yaml", "stats.csv", "records.csv", "trace.txt", "net.dot"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_weights_override(tmp_path):
    code, _, _ = cli("--scenario", "wrr-base", "--weights", "1,1,1", "--stop-time", "50", "--out", str(tmp_path))
    assert code == 0
    assert "weights: [1, 1, 1]" in (tmp_path / "scenario.yaml").read_text()


@pytest.mark.parametrize("argv", [
    ["--scenario", "no-such-thing"],
    ["--scenario", "sp-base", "--weights", "1,2,3"],
    ["--scenario", "wrr-base", "--weights", "1,x"],
    ["--scenario", "wrr-base", "--weights", "1,2"],
    ["--scenario", "sp-base", "--stop-steps", "-4"],
    ["--scenario", "sp-base", "--emit", "pictures"],
    [],
])
def test_bad_invocations_exit_2(argv):
    assert cli(*argv)[0] == 2


def test_bad_file_exit_2_with_line(tmp_path):
    f = tmp_path / "s.yaml"
    f.write_text(MINIMAL + "bogus: 1\n")
    code, _, err = cli("--scenario", str(f))
    assert code == 2 and "line 7" in err


def test_runtime_failure_exit_3(monkeypatch):
    from ethercpn import cli as cli_mod
    from ethercpn.kernel import FiringError

    def boom(*a, **k):
        raise FiringError("injected")

    monkeypatch.setattr(cli_mod, "simulate", boom)
    assert cli("--scenario", "sp-base")[0] == 3


def test_seed_sweep_writes_one_directory_per_seed(tmp_path):
    code, out, _ = cli("--scenario", "sp-base", "--seed", "3", "--sweep", "2", "--jobs", "2",
                       "--stop-time", "40", "--out", str(tmp_path))
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["seed-3", "seed-4"]
    assert "seed: 4" in (tmp_path / "seed-4" / "scenario.yaml").read_text()
    assert out.count("stopped on") == 2


# -- net dump ---------------------------------------------------------------------


def test_empty_page_dump_has_no_nodes():
    text = dump_net(flatten(Page("empty")))
    assert "shape=" not in text and text.startswith("digraph")


def test_dump_node_count_matches_net():
    net = build_net(BUILTIN["sp-base"]())
    text = dump_net(net)
    assert text.count("shape=ellipse") == len(net.places)
    assert text.count("shape=box") == len(net.transitions)
    arcs = sum(len(t.inputs) + len(t.outputs) for t in net.transitions.values())
    assert text.count(" -> ") == arcs


def test_root_places_sit_outside_clusters():
    text = dump_net(build_net(BUILTIN["sp-base"]()))
    depth = 0
    root_nodes = []
    for line in text.splitlines()[1:]:
        if line.strip().startswith("subgraph"):
            depth += 1
        elif line.strip() == "}":
            depth -= 1
        elif depth == 0 and "shape=" in line:
            root_nodes.append(line.split('"')[1])
    assert {"Ptr1", "Ptr2", "Ptr2'", "Pbp1", "Pbp2"} <= set(root_nodes)
    assert '"cluster_switch/scheduler_O1"' in text
