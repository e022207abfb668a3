"""Per-packet delivery records and per-priority statistics of a switch run."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

from .switch.colours import INP, OUTP, PRIO, SEQ
from .switch.scenario import DEFAULT_PRIORITIES

RECORD_COLUMNS = ("seq", "prio", "port", "created", "consumed", "delay")
STATS_COLUMNS = ("prio", "generated", "consumed", "consumed_fraction",
                 "delay_mean", "delay_std", "delay_max", "famine")


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class DeliveryRecord:
    seq: int
    prio: str
    outp: str
    created_at: int
    consumed_at: Optional[int] = None
    inp: Optional[str] = None

    def __post_init__(self):
        if self.consumed_at is not None and self.consumed_at < self.created_at:
            raise MetricsError("packet %d consumed at %d before creation at %d"
                               % (self.seq, self.consumed_at, self.created_at))

    @property
    def delay(self) -> Optional[int]:
        if self.consumed_at is None:
            return None
        return self.consumed_at - self.created_at


@dataclass(frozen=True)
class PriorityStats:
    prio: str
    generated: int
    consumed: int
    delay_mean: Optional[float]
    delay_std: Optional[float]
    delay_max: Optional[int]

    @property
    def consumed_fraction(self) -> Optional[float]:
        if self.generated == 0:
            return None
        return self.consumed / self.generated

    @property
    def famine(self) -> bool:
        return self.generated > 0 and self.consumed == 0


@dataclass(frozen=True)
class RunStats:
    by_prio: Dict[str, PriorityStats]

    def __getitem__(self, prio: str) -> PriorityStats:
        return self.by_prio[prio]

    def __iter__(self):
        return iter(self.by_prio.values())

    @property
    def priorities(self) -> List[str]:
        return list(self.by_prio)


# -- trace -> records ---------------------------------------------------------


def _kind(tid: str) -> str:
    head, _, local = tid.rpartition("/")
    top = tid.split("/", 1)[0]
    if top.startswith("traffic_source") and local == "emit":
        return "emit"
    if top == "consumers" and local == "consume":
        return "consume"
    if top in ("switch", "consumers") and head:
        return "internal"
    raise MetricsError("transition %r does not belong to a switch model" % tid)


def extract_records(trace: Iterable) -> List[DeliveryRecord]:
    """One record per emitted packet, ordered by sequence number."""
    created: Dict[int, tuple] = {}
    consumed: Dict[int, int] = {}
    for e in trace:
        kind = _kind(e.transition)
        if kind == "emit":
            for _, tok in e.produced:
                pkt = tok.value
                if isinstance(pkt, tuple) and len(pkt) == 4:
                    if pkt[SEQ] in created:
                        raise MetricsError("packet %d emitted twice" % pkt[SEQ])
                    created[pkt[SEQ]] = (pkt, e.clock)
        elif kind == "consume":
            pkt = dict(e.binding)["p"]
            if pkt[SEQ] not in created:
                raise MetricsError("packet %d consumed but never emitted" % pkt[SEQ])
            if pkt[SEQ] in consumed:
                raise MetricsError("packet %d consumed twice" % pkt[SEQ])
            consumed[pkt[SEQ]] = e.clock
    out = []
    for seq in sorted(created):
        pkt, t = created[seq]
        out.append(DeliveryRecord(seq, pkt[PRIO], pkt[OUTP], t, consumed.get(seq), pkt[INP]))
    return out


# -- statistics ---------------------------------------------------------------


def _order(prios: Iterable[str], priorities: Optional[Sequence[str]]) -> List[str]:
    base = list(priorities) if priorities is not None else list(DEFAULT_PRIORITIES)
    extra = sorted(set(prios) - set(base))
    return base + extra


def summarize(records: Iterable[DeliveryRecord],
              priorities: Optional[Sequence[str]] = None) -> RunStats:
    """Aggregate per priority. Delay statistics cover consumed packets only;
    the standard deviation is the population one."""
    records = list(records)
    groups: Dict[str, List[DeliveryRecord]] = {}
    for r in records:
        groups.setdefault(r.prio, []).append(r)
    by_prio = {}
    for pr in _order(groups, priorities):
        rs = groups.get(pr, [])
        delays = sorted(r.delay for r in rs if r.consumed_at is not None)
        if delays:
            mean = math.fsum(delays) / len(delays)
            var = math.fsum((d - mean) ** 2 for d in delays) / len(delays)
            std = 0.0 if delays[0] == delays[-1] else math.sqrt(var)
            by_prio[pr] = PriorityStats(pr, len(rs), len(delays), mean, std, delays[-1])
        else:
            by_prio[pr] = PriorityStats(pr, len(rs), 0, None, None, None)
    return RunStats(by_prio)


def famine_check(stats: RunStats, threshold_fraction: float) -> Dict[str, bool]:
    if not 0 <= threshold_fraction <= 1:
        raise ValueError("threshold must lie in [0, 1]")
    flags = {}
    for s in stats:
        frac = s.consumed_fraction
        flags[s.prio] = frac is not None and frac < threshold_fraction
    return flags


# -- CSV ----------------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "%.6f" % x
    return str(x)


def _write(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def records_csv(records: Iterable[DeliveryRecord]) -> str:
    rows = sorted(records, key=lambda r: r.seq)
    return _write(RECORD_COLUMNS, ((r.seq, r.prio, r.outp, r.created_at, r.consumed_at, r.delay)
                                   for r in rows))


def stats_csv(stats: RunStats) -> str:
    return _write(STATS_COLUMNS, ((s.prio, s.generated, s.consumed, s.consumed_fraction,
                                   s.delay_mean, s.delay_std, s.delay_max, s.famine)
                                  for s in stats))


def export_csv(obj) -> str:
    """CSV text for a record list or a RunStats."""
    if isinstance(obj, RunStats):
        return stats_csv(obj)
    return records_csv(obj)


def parse_records_csv(text: str) -> List[DeliveryRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != RECORD_COLUMNS:
        raise MetricsError("not a records CSV")
    out = []
    for row in rows[1:]:
        seq, prio, port, created, cons, delay = row
        rec = DeliveryRecord(int(seq), prio, port, int(created), int(cons) if cons else None)
        if _fmt(rec.delay) != delay:
            raise MetricsError("inconsistent delay for packet %s" % seq)
        out.append(rec)
    return out


def parse_stats_csv(text: str) -> List[Mapping[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


# -- console table ------------------------------------------------------------


def format_table(stats: RunStats) -> str:
    def num(x, spec):
        return "-" if x is None else format(x, spec)

    lines = ["%-5s %9s %9s %8s %9s %9s %9s  %s" % ("prio", "generated", "consumed", "%",
                                                 "mean", "std", "max", "famine")]
    for s in stats:
        pct = None if s.consumed_fraction is None else 100 * s.consumed_fraction
        lines.append("%-5s %9d %9d %8s %9s %9s %9s  %s" % (
            s.prio, s.generated, s.consumed, num(pct, ".2f"), num(s.delay_mean, ".2f"),
            num(s.delay_std, ".2f"), num(s.delay_max, "d"), "yes" if s.famine else "no"))
    return "\n".join(lines) + "\n"
