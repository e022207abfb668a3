"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest, or directly with ``python tests/test_acceptance.py``.
"""

import dataclasses
import functools
import random
import statistics
import sys
import tempfile
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import brute_force, engine_keys, equivalence_mismatches, random_small_net  # noqa: E402
from test_flatten import NETS  # noqa: E402

from ethercpn.cli import FILES, SCENARIO_FILE, run_command, simulate  # noqa: E402
from ethercpn.kernel import enabled_bindings, flatten, format_trace, initial_marking, markings_equal, replay, run  # noqa: E402
from ethercpn.properties import all_violations  # noqa: E402
from ethercpn.schedulers import WRR, StaticPriority  # noqa: E402
from ethercpn.switch import BUILTIN  # noqa: E402

TIME_LIMIT = 10.0
SP_SEEDS = range(1, 21)


@functools.lru_cache(maxsize=None)
def timed_run(name, seed=None):
    sc = BUILTIN[name]()
    if seed is not None:
        sc = dataclasses.replace(sc, seed=seed)
    t0 = time.perf_counter()
    out = simulate(sc)
    return out, time.perf_counter() - t0


def acceptance_runs():
    runs = [timed_run("sp-base", s) for s in SP_SEEDS]
    runs += [timed_run(name) for name in ("sp-congested", "wrr-base", "wrr-congested")]
    return [out for out, _ in runs]


def _fmt(x):
    return "n/a" if x is None else "%.3f" % x


# -- criteria -----------------------------------------------------------------


def criterion_1():
    outs = [timed_run("sp-base", s) for s in SP_SEEDS]
    frac = {p: statistics.median(o.stats[p].consumed_fraction for o, _ in outs) for p in "HML"}
    latency = outs[0][0].scenario.switch.stage_delays.pipeline_latency
    low_zero = all(o.stats["L"].consumed == 0 for o, _ in outs)
    constant = all(o.stats["H"].delay_std == 0 and o.stats["H"].delay_mean == latency for o, _ in outs)
    slowest = max(dt for _, dt in outs)
    ok = frac["H"] >= 0.95 and frac["M"] <= 0.05 and low_zero and constant and slowest < TIME_LIMIT
    return ok, "median H=%.4f M=%.4f, L consumed zero=%s, H delay constant %d=%s, slowest %.2fs" % (
        frac["H"], frac["M"], low_zero, latency, constant, slowest)


def criterion_2():
    out, dt = timed_run("sp-congested")
    base, _ = timed_run("sp-base")
    h = out.stats["H"]
    ok = (h.delay_mean >= 3 * base.stats["H"].delay_mean and h.delay_std > 10 and h.delay_max > 200
          and h.consumed < h.generated and out.stats["M"].consumed == 0 and out.stats["L"].consumed == 0
          and dt < TIME_LIMIT)
    return ok, "H mean=%.2f std=%.2f max=%d consumed %d/%d, M=%d L=%d, %.2fs" % (
        h.delay_mean, h.delay_std, h.delay_max, h.consumed, h.generated,
        out.stats["M"].consumed, out.stats["L"].consumed, dt)


def criterion_3():
    out, dt = timed_run("wrr-base")
    assert out.scenario.scheduler == WRR((6, 3, 1))
    target = {"H": 0.60, "M": 0.30, "L": 0.10}
    frac = {p: out.stats[p].consumed_fraction for p in "HML"}
    bands = all(abs(frac[p] - target[p]) <= 0.05 for p in "HML")
    famine = [p for p in "HML" if out.stats[p].famine]
    stds = {p: out.stats[p].delay_std for p in "HML"}
    std_ok = all(s is not None and s <= 3 for s in stds.values())
    ok = bands and not famine and std_ok and dt < TIME_LIMIT
    return ok, "fractions %s (bands %s), famished %s, std %s (<=3: %s), %.2fs" % (
        "/".join("%.4f" % frac[p] for p in "HML"), bands, famine or "none",
        "/".join(_fmt(stds[p]) for p in "HML"), std_ok, dt)


def criterion_4():
    out, dt = timed_run("wrr-congested")
    consumed = {p: out.stats[p].consumed for p in "HML"}
    total = sum(consumed.values())
    target = {"H": 0.6, "M": 0.3, "L": 0.1}
    share = {p: consumed[p] / total if total else 0.0 for p in "HML"}
    ratio_ok = all(abs(share[p] - target[p]) <= 0.25 * target[p] for p in "HML")
    stds = {p: out.stats[p].delay_std for p in "HML"}
    means = {p: out.stats[p].delay_mean for p in "HML"}
    std_ok = all(s is not None and s <= 3 for s in stds.values())
    mean_ok = all(m is not None and 8 <= m <= 13 for m in means.values())
    ok = ratio_ok and std_ok and mean_ok and dt < TIME_LIMIT
    return ok, "counts %s (ratio %s), std %s (<=3: %s), mean %s (in [8,13]: %s), %.2fs" % (
        "/".join(str(consumed[p]) for p in "HML"), ratio_ok,
        "/".join(_fmt(stds[p]) for p in "HML"), std_ok,
        "/".join(_fmt(means[p]) for p in "HML"), mean_ok, dt)


def criterion_5():
    sp = equivalence_mismatches(StaticPriority(), count=200)
    wrr = equivalence_mismatches(WRR((6, 3, 1)), count=200)
    return not sp and not wrr, "mismatches sp=%d wrr=%d over 200 patterns each" % (len(sp), len(wrr))


def criterion_6():
    problems = []
    # conservation and monotone clock: replay re-checks every firing
    for out in acceptance_runs():
        trace = out.result.trace
        if not markings_equal(replay(out.net, trace), out.result.marking):
            problems.append("replay diverged for %s" % out.scenario.name)
        clocks = [e.clock for e in trace]
        if clocks != sorted(clocks):
            problems.append("clock went backwards in %s" % out.scenario.name)
    for name in sorted(BUILTIN):
        a = format_trace(timed_run(name)[0].result.trace)
        b = format_trace(simulate(BUILTIN[name]()).result.trace)
        if a != b:
            problems.append("trace of %s not reproducible" % name)
    rng = random.Random(20240601)
    nets = 0
    for _ in range(600):
        net, clock = random_small_net(rng)
        t = net.transitions["T"]
        got = enabled_bindings(net, initial_marking(net), t, clock)
        nets += 1
        if len(engine_keys(got)) != len(got) or engine_keys(got) != brute_force(net, t, clock):
            problems.append("binding mismatch on small net %d" % nets)
    for build in NETS:
        root, manual = build()
        net = flatten(root)
        same_shape = list(net.places) == list(manual.places) and list(net.transitions) == list(manual.transitions)
        same_runs = all(format_trace(run(net, 300, 200, s).trace) == format_trace(run(manual, 300, 200, s).trace)
                        for s in range(5))
        if not (same_shape and same_runs):
            problems.append("flattening differs for %s" % build.__name__)
    return not problems, "%s; %d small nets, %d hierarchical nets" % (
        "; ".join(problems[:3]) or "no violations", nets, len(NETS))


def criterion_7():
    bad = {}
    outs = acceptance_runs()
    for i, out in enumerate(outs):
        for prop, found in all_violations(out.scenario, out.net, out.result.trace).items():
            if found:
                bad.setdefault(prop, []).append("%s#%d: %s" % (out.scenario.name, i, found[0]))
    return not bad, ("%d runs clean" % len(outs)) if not bad else "; ".join(
        "%s: %s" % (k, v[0]) for k, v in sorted(bad.items()))


def criterion_8():
    emit = "stats,records,trace,net"
    diffs = []
    with tempfile.TemporaryDirectory() as tmp:
        for name in sorted(BUILTIN):
            first, second = Path(tmp, name, "a"), Path(tmp, name, "b")
            codes = [run_command(["--scenario", name, "--emit", emit, "--out", str(first)], _Null(), _Null())]
            codes.append(run_command(["--scenario", str(first / SCENARIO_FILE), "--emit", emit,
                                      "--out", str(second)], _Null(), _Null()))
            if codes != [0, 0]:
                diffs.append("%s exit codes %s" % (name, codes))
                continue
            for fname in (SCENARIO_FILE,) + tuple(FILES.values()):
                if (first / fname).read_bytes() != (second / fname).read_bytes():
                    diffs.append("%s/%s" % (name, fname))
    return not diffs, "differences: %s" % (", ".join(diffs) if diffs else "none")


class _Null:
    def write(self, _text):
        pass


CRITERIA = [
    (1, "SP uncongested", criterion_1),
    (2, "SP congested", criterion_2),
    (3, "WRR uncongested", criterion_3),
    (4, "WRR congested", criterion_4),
    (5, "scheduler oracle equivalence", criterion_5),
    (6, "kernel properties", criterion_6),
    (7, "scheduler properties", criterion_7),
    (8, "reproducible reruns", criterion_8),
]


def report(number, title, check):
    ok, detail = check()
    line = "criterion %d %-29s %s  %s" % (number, title, "PASS" if ok else "FAIL", detail)
    return ok, line


@pytest.mark.parametrize("number,title,check", CRITERIA, ids=["c%d" % c[0] for c in CRITERIA])
def test_criterion(number, title, check, capsys):
    ok, line = report(number, title, check)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for number, title, check in CRITERIA:
        ok, line = report(number, title, check)
        print(line, flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
