"""Timestamped edge lists: parsing, snapshots, dataset statistics and replay.

The text format is one event per line, ``src dst time [+|-]``, whitespace
separated, with ``#`` comments. A missing op means an addition.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Iterator, TextIO, Union

from .dynamics import Expansion, _edge
from .graph_core import (
    Graph,
    center_profile,
    clustering_coefficient,
    cp_coefficient,
    is_connected,
    largest_component,
)


class IngestError(ValueError):
    pass


class Op(enum.Enum):
    ADD = "+"
    REMOVE = "-"


@dataclass(frozen=True)
class EdgeEvent:
    time: float
    a: int
    b: int
    op: Op = Op.ADD

    @property
    def edge(self) -> tuple[int, int]:
        return _edge(self.a, self.b)


class LabelTable:
    """Maps file labels to integer ids.

    If every label in a file is a non-negative integer the labels are used as
    ids directly; otherwise ids are assigned densely in order of first
    appearance.
    """

    def __init__(self):
        self._ids: dict[str, int] = {}

    def __len__(self):
        return len(self._ids)

    def __getitem__(self, label: str) -> int:
        return self._ids[label]

    def items(self):
        return self._ids.items()

    def label_of(self) -> dict[int, str]:
        return {i: s for s, i in self._ids.items()}

    @classmethod
    def from_labels(cls, labels: Iterable[str]) -> LabelTable:
        table = cls()
        labels = list(labels)
        if all(s.isdigit() for s in labels):
            for s in labels:
                table._ids.setdefault(s, int(s))
        else:
            for s in labels:
                if s not in table._ids:
                    table._ids[s] = len(table._ids)
        return table

    def write(self, stream: TextIO) -> None:
        for label, i in sorted(self._ids.items(), key=lambda kv: kv[1]):
            stream.write(f"{label}\t{i}\n")

    @classmethod
    def read(cls, stream: TextIO) -> LabelTable:
        table = cls()
        for n, line in enumerate(stream, 1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            try:
                label, i = line.split("\t")
                table._ids[label] = int(i)
            except ValueError:
                raise IngestError(f"line {n}: bad label table row {line!r}") from None
        return table


@dataclass
class EventStream:
    events: list[EdgeEvent]
    labels: LabelTable
    warnings: Counter = field(default_factory=Counter)


def _parse_time(tok: str, n: int) -> float:
    try:
        t: float = int(tok)
    except ValueError:
        try:
            t = float(tok)
        except ValueError:
            raise IngestError(f"line {n}: bad time {tok!r}") from None
    if not math.isfinite(t):
        raise IngestError(f"line {n}: bad time {tok!r}")
    if t < 0:
        raise IngestError(f"line {n}: negative time {tok}")
    return t


def read_events(source: Union[str, TextIO, Iterable[str]]) -> EventStream:
    """Parse an event file into sorted, de-duplicated events.

    Self-loops, additions of present edges and removals of absent edges are
    dropped and counted in ``warnings``.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    raw = []
    for n, line in enumerate(source, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) not in (3, 4):
            raise IngestError(f"line {n}: expected 'src dst time [+|-]', got {line!r}")
        op = Op.ADD
        if len(toks) == 4:
            if toks[3] not in ("+", "-"):
                raise IngestError(f"line {n}: bad op {toks[3]!r}")
            op = Op(toks[3])
        raw.append((_parse_time(toks[2], n), toks[0], toks[1], op))
    labels = LabelTable.from_labels(s for _, a, b, _ in raw for s in (a, b))
    raw.sort(key=lambda r: r[0])  # stable
    warnings: Counter = Counter()
    present: set[tuple[int, int]] = set()
    events = []
    for t, sa, sb, op in raw:
        a, b = labels[sa], labels[sb]
        if a == b:
            warnings["self_loop"] += 1
            continue
        e = _edge(a, b)
        if op is Op.ADD:
            if e in present:
                warnings["duplicate_add"] += 1
                continue
            present.add(e)
        else:
            if e not in present:
                warnings["missing_remove"] += 1
                continue
            present.discard(e)
        events.append(EdgeEvent(t, a, b, op))
    return EventStream(events, labels, warnings)


def parse_events(source: Union[str, TextIO, Iterable[str]]) -> list[EdgeEvent]:
    return read_events(source).events


def _fmt_time(t: float) -> str:
    return str(int(t)) if float(t).is_integer() else repr(float(t))


def export_events(events: Iterable[EdgeEvent], labels: LabelTable | None = None) -> str:
    names = labels.label_of() if labels is not None else {}
    out = []
    for ev in events:
        a, b = names.get(ev.a, str(ev.a)), names.get(ev.b, str(ev.b))
        out.append(f"{a} {b} {_fmt_time(ev.time)} {ev.op.value}\n")
    return "".join(out)


def events_from_expansions(initial: Graph, expansions: Iterable[Expansion], t0: int = 0) -> list[EdgeEvent]:
    """Event form of a generated stream: the initial edges at ``t0``, then one timestamp per expansion."""
    events = [EdgeEvent(t0, a, b) for a, b in sorted(initial.edges())]
    for i, f in enumerate(expansions, t0 + 1):
        events.extend(EdgeEvent(i, a, b, Op.REMOVE) for a, b in sorted(f.removed_edges))
        events.extend(EdgeEvent(i, a, b) for a, b in sorted(f.new_edges))
    return events


@dataclass(frozen=True)
class PerEvent:
    pass


@dataclass(frozen=True)
class FixedPeriod:
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("period width must be positive")


@dataclass(frozen=True)
class EveryN:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")


SnapshotPolicy = Union[PerEvent, FixedPeriod, EveryN]


def parse_policy(text: str) -> SnapshotPolicy:
    """``event``, ``period:<width>`` or ``every:<n>``."""
    kind, _, arg = text.partition(":")
    if kind == "event" and not arg:
        return PerEvent()
    if kind == "period":
        return FixedPeriod(float(arg))
    if kind == "every":
        return EveryN(int(arg))
    raise ValueError(f"unknown snapshot policy {text!r}")


def _apply_event(g: Graph, ev: EdgeEvent, additive: bool, warnings: Counter | None) -> None:
    if ev.op is Op.ADD:
        g.add_edge(ev.a, ev.b)
    elif additive:
        if warnings is not None:
            warnings["ignored_remove"] += 1
    else:
        g.remove_edge(ev.a, ev.b)


def _groups(events: list[EdgeEvent], policy: SnapshotPolicy) -> Iterator[list[EdgeEvent]]:
    """Events between consecutive snapshots."""
    if isinstance(policy, PerEvent):
        for ev in events:
            yield [ev]
    elif isinstance(policy, EveryN):
        for i in range(0, len(events), policy.n):
            yield events[i : i + policy.n]  # the last group may be short
    elif isinstance(policy, FixedPeriod):
        if not events:
            return
        w = policy.width
        first = math.ceil(events[0].time / w)
        last = math.ceil(events[-1].time / w)
        pos = 0
        for k in range(first, last + 1):
            bound = k * w
            start = pos
            while pos < len(events) and events[pos].time <= bound:
                pos += 1
            yield events[start:pos]
    else:
        raise TypeError(f"unknown policy {policy!r}")


def snapshots(events: list[EdgeEvent], policy: SnapshotPolicy = PerEvent(), additive: bool = False,
              warnings: Counter | None = None) -> Iterator[Graph]:
    """Cumulative graphs, one per timestamp of ``policy``.

    With ``additive`` removals are skipped and counted under
    ``warnings["ignored_remove"]``.
    """
    g = Graph()
    for group in _groups(events, policy):
        for ev in group:
            _apply_event(g, ev, additive, warnings)
        yield g.copy()


def last_snapshot(events: list[EdgeEvent], policy: SnapshotPolicy = PerEvent()) -> tuple[Graph, int]:
    """Final graph and the number of timestamps under ``policy``, without materializing every snapshot."""
    g = Graph()
    count = 0
    for group in _groups(events, policy):
        for ev in group:
            _apply_event(g, ev, False, None)
        count += 1
    return g, count


@dataclass(frozen=True)
class DatasetStats:
    vertices: int
    edges: int
    clust_coef: float
    max_degree: int
    diameter: int
    center_size: int
    timestamps: int
    cp_coef: float | None
    largest_component: bool = False  # stats taken on the largest component

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def csv_header(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def csv_row(self) -> list:
        d = asdict(self)
        return [_csv_value(d[k]) for k in self.csv_header()]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.csv_header())
        w.writerow(self.csv_row())
        return buf.getvalue()


def _csv_value(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6f}"
    return x


def dataset_stats(g: Graph, n_timestamps: int, cp_null_samples: int = 20, seed: int = 0) -> DatasetStats:
    """Table-style statistics; ``cp_null_samples=0`` skips the cp-coefficient."""
    flagged = False
    if not is_connected(g):
        g = largest_component(g)
        flagged = True
    prof = center_profile(g)
    cp = cp_coefficient(g, null_samples=cp_null_samples, rng_seed=seed) if cp_null_samples > 0 else None
    return DatasetStats(
        vertices=len(g),
        edges=g.number_of_edges(),
        clust_coef=clustering_coefficient(g),
        max_degree=max(g.degrees().values(), default=0),
        diameter=int(prof.diameter),
        center_size=len(prof.center),
        timestamps=n_timestamps,
        cp_coef=cp,
        largest_component=flagged,
    )


class ReplayTrace:
    """A dataset replayed as the environment of an integration process.

    The initial graph is the largest component of snapshot ``start_at``. Each
    expansion consumes the next ``interval`` events; removals are ignored
    (counted in ``warnings``) and additions that do not yet touch the graph are
    held back until some later edge connects them.
    """

    def __init__(self, events: list[EdgeEvent], interval: int, start_at: int = 0,
                 policy: SnapshotPolicy = PerEvent()):
        if interval < 1:
            raise ValueError("interval must be >= 1")
        if start_at < 0:
            raise ValueError("start_at must be >= 0")
        self.interval = interval
        self.warnings: Counter = Counter()
        g = Graph()
        consumed = 0
        found = False
        for idx, group in enumerate(_groups(events, policy)):
            for ev in group:
                _apply_event(g, ev, False, None)
            consumed += len(group)
            if idx == start_at:
                found = True
                break
        if not found:
            raise IngestError(f"start_at {start_at} is beyond the event stream")
        self.initial = largest_component(g) if len(g) else g
        ids = [v for ev in events for v in (ev.a, ev.b)]
        self.newcomer = max(ids, default=-1) + 1
        self._rest = events[consumed:]
        self._pos = 0
        self._pending: list[tuple[int, int]] = []

    @property
    def pending(self) -> list[tuple[int, int]]:
        return list(self._pending)

    def next_expansion(self, g: Graph, pending, u: int) -> Expansion | None:
        if self._pos >= len(self._rest):
            return None
        batch = self._rest[self._pos : self._pos + self.interval]
        self._pos += len(batch)
        cand = list(self._pending)
        for ev in batch:
            if ev.op is Op.REMOVE:
                self.warnings["ignored_remove"] += 1
            else:
                cand.append(ev.edge)
        # keep the additions whose component reaches g
        parent: dict[int, int] = {}

        def find(x):
            while parent.get(x, x) != x:
                x = parent[x]
            return x

        for a, b in cand:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        anchored = {find(v) for e in cand for v in e if v in g}
        edges, held = set(), []
        for e in cand:
            if g.has_edge(*e):
                continue
            if find(e[0]) in anchored:
                edges.add(e)
            else:
                held.append(e)
        self._pending = held
        return Expansion.from_edges(g, edges)


def replay_trace(events: list[EdgeEvent], interval: int, start_at: int = 0,
                 policy: SnapshotPolicy = PerEvent()) -> ReplayTrace:
    return ReplayTrace(events, interval, start_at, policy)
