"""Multi-branch inference DAGs: construction, ordering, validation, serialization.

A generated graph has one chain of jobs per sensing band feeding a small
cross-branch tail: one alignment node per group, optionally followed by a
three-node head (Fusion, Classifier, Output). Ids are assigned chain by
chain with tail nodes last, so ascending id order is a topological order of
every generated graph.
"""

from __future__ import annotations

import heapq
import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

# Branch label shared by alignment and head nodes. On-chip forwarding needs
# producer and consumer on the same core *and* the same branch label, so a
# chain-to-alignment edge always pays the off-chip cost.
CROSS_BRANCH = 0

_NODE_FIELDS = ("id", "branch", "label", "d_cmp", "r_on", "w_on", "r_off", "w_off")


class CycleError(ValueError):
    """A graph that must be acyclic contains a cycle."""

    def __init__(self, edge: tuple[int, int]):
        self.edge = edge
        super().__init__(f"cycle detected through edge {edge[0]}->{edge[1]}")


@dataclass(frozen=True)
class DagNode:
    """One non-preemptive job: compute time plus memory access latencies (ms).

    r_*/w_* are read (input) and write (output) latencies against on-chip and
    off-chip memory; on-chip access is never slower than off-chip.
    """

    id: int
    branch_id: int
    d_cmp: float
    r_on: float
    w_on: float
    r_off: float
    w_off: float
    label: str = ""


@dataclass(frozen=True)
class CostRanges:
    """Uniform sampling ranges [lo, hi] in ms for generated node costs."""

    d_cmp: tuple[float, float] = (1.0, 11.0)
    r_on: tuple[float, float] = (0.1, 0.6)
    w_on: tuple[float, float] = (0.1, 0.6)
    r_off: tuple[float, float] = (2.0, 8.0)
    w_off: tuple[float, float] = (2.0, 8.0)

    def check(self) -> None:
        for name in ("d_cmp", "r_on", "w_on", "r_off", "w_off"):
            lo, hi = getattr(self, name)
            if lo < 0 or lo > hi:
                raise ValueError(f"bad cost range {name}=[{lo}, {hi}]")


@dataclass(frozen=True)
class DagTopologySpec:
    """Deterministic recipe for one chain-per-band graph."""

    branch_node_counts: tuple[int, ...]
    align_groups: tuple[int, ...]
    fusion_head: bool = True
    cost_ranges: CostRanges = CostRanges()
    seed: int = 0


@dataclass(frozen=True)
class DagGraph:
    """Immutable job graph. Safe to share read-only across workers.

    `preds`/`succs` are adjacency caches indexed by node id; they are only
    meaningful when ids are dense in [0, V), which `validate` reports.
    """

    nodes: tuple[DagNode, ...]
    edges: tuple[tuple[int, int], ...]
    entry_of_branch: dict[int, int]
    preds: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    succs: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nodes = tuple(self.nodes)
        if {n.id for n in nodes} == set(range(len(nodes))):
            nodes = tuple(sorted(nodes, key=lambda n: n.id))
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        n = len(nodes)
        preds: list[list[int]] = [[] for _ in range(n)]
        succs: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if 0 <= u < n and 0 <= v < n:
                preds[v].append(u)
                succs[u].append(v)
        object.__setattr__(self, "preds", tuple(tuple(p) for p in preds))
        object.__setattr__(self, "succs", tuple(tuple(s) for s in succs))

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def branches(self) -> tuple[int, ...]:
        return tuple(sorted(self.entry_of_branch))


def build_dag(spec: DagTopologySpec) -> DagGraph:
    """Generate the chain-per-band graph described by `spec`.

    Each branch k is a simple chain whose last node feeds its alignment
    group's node; alignment nodes feed Fusion -> Classifier -> Output when
    the fusion head is enabled. Costs are drawn uniformly per node, in id
    order, from a generator seeded by spec.seed, so equal specs produce
    bit-identical graphs.
    """
    counts = tuple(int(c) for c in spec.branch_node_counts)
    groups = tuple(int(g) for g in spec.align_groups)
    if len(counts) == 0:
        raise ValueError("at least one branch is required")
    if any(c <= 0 for c in counts):
        raise ValueError(f"branch node counts must be positive: {counts}")
    if len(groups) != len(counts):
        raise ValueError("align_groups must have one label per branch")
    num_groups = max(groups)
    if sorted(set(groups)) != list(range(1, num_groups + 1)):
        raise ValueError(f"align group labels must cover 1..G contiguously: {groups}")
    ranges = spec.cost_ranges
    ranges.check()

    rng = np.random.default_rng(spec.seed)

    def draw(lohi: tuple[float, float]) -> float:
        return float(rng.uniform(lohi[0], lohi[1]))

    def make_node(nid: int, branch: int, label: str) -> DagNode:
        d = draw(ranges.d_cmp)
        r_on, w_on = draw(ranges.r_on), draw(ranges.w_on)
        r_off, w_off = draw(ranges.r_off), draw(ranges.w_off)
        # Overlapping on/off ranges could invert the on<=off invariant; keep
        # the smaller draw on-chip. No-op for disjoint ranges like the defaults.
        if r_on > r_off:
            r_on, r_off = r_off, r_on
        if w_on > w_off:
            w_on, w_off = w_off, w_on
        return DagNode(nid, branch, d, r_on, w_on, r_off, w_off, label)

    nodes: list[DagNode] = []
    edges: list[tuple[int, int]] = []
    entries: dict[int, int] = {}
    for k, count in enumerate(counts, start=1):
        entries[k] = len(nodes)
        for i in range(count):
            nid = len(nodes)
            nodes.append(make_node(nid, k, f"Slice{k}.{i + 1}"))
            if i > 0:
                edges.append((nid - 1, nid))
    align_id: dict[int, int] = {}
    for g in range(1, num_groups + 1):
        align_id[g] = len(nodes)
        nodes.append(make_node(align_id[g], CROSS_BRANCH, f"Align {g}"))
    for k in range(1, len(counts) + 1):
        last = entries[k] + counts[k - 1] - 1
        edges.append((last, align_id[groups[k - 1]]))
    if spec.fusion_head:
        fusion = len(nodes)
        nodes.append(make_node(fusion, CROSS_BRANCH, "Fusion"))
        classifier = len(nodes)
        nodes.append(make_node(classifier, CROSS_BRANCH, "Classifier"))
        output = len(nodes)
        nodes.append(make_node(output, CROSS_BRANCH, "Output"))
        for g in range(1, num_groups + 1):
            edges.append((align_id[g], fusion))
        edges.append((fusion, classifier))
        edges.append((classifier, output))
    return DagGraph(tuple(nodes), tuple(edges), entries)


def topological_order(g: DagGraph) -> list[int]:
    """Kahn's algorithm emitting the smallest ready id first.

    Raises CycleError naming one edge on a cycle when the graph is cyclic.
    """
    n = g.num_nodes
    indeg = [len(p) for p in g.preds]
    heap = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(heap)
    order: list[int] = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in g.succs[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if len(order) < n:
        left = set(range(n)) - set(order)
        edge = min((u, v) for u, v in g.edges if u in left and v in left)
        raise CycleError(edge)
    return order


def validate(g: DagGraph) -> list[str]:
    """Report every invariant violation; an empty list means the graph is valid.

    Reports rather than raises, so callers can collect all defects at once.
    """
    problems: list[str] = []
    n = len(g.nodes)
    ids = [nd.id for nd in g.nodes]
    id_counts = Counter(ids)
    dupes = sorted(i for i, c in id_counts.items() if c > 1)
    if dupes:
        problems.append(f"duplicate node ids: {dupes}")
    elif set(ids) != set(range(n)):
        problems.append(f"node ids not dense in [0, {n})")

    for nd in g.nodes:
        for name in ("d_cmp", "r_on", "w_on", "r_off", "w_off"):
            val = getattr(nd, name)
            if not math.isfinite(val) or val < 0:
                problems.append(f"node {nd.id}: {name}={val} not finite and >= 0")
        if nd.r_on > nd.r_off:
            problems.append(f"node {nd.id}: r_on {nd.r_on} > r_off {nd.r_off}")
        if nd.w_on > nd.w_off:
            problems.append(f"node {nd.id}: w_on {nd.w_on} > w_off {nd.w_off}")

    known = set(ids)
    seen: set[tuple[int, int]] = set()
    endpoints_ok = True
    for u, v in g.edges:
        if u not in known or v not in known:
            problems.append(f"edge ({u}, {v}) references a missing node")
            endpoints_ok = False
            continue
        if (u, v) in seen:
            problems.append(f"duplicate edge: ({u}, {v})")
        seen.add((u, v))

    if endpoints_ok and not dupes and set(ids) == set(range(n)):
        try:
            topological_order(g)
        except CycleError as exc:
            problems.append(f"cycle detected through edge {exc.edge}")

    branch_ids = {nd.branch_id for nd in g.nodes if nd.branch_id != CROSS_BRANCH}
    expected = set(range(1, len(branch_ids) + 1))
    if branch_ids != expected:
        problems.append(f"branch ids not contiguous from 1: {sorted(branch_ids)}")
    if set(g.entry_of_branch) != branch_ids:
        problems.append(
            f"entry map covers branches {sorted(g.entry_of_branch)}, "
            f"graph has branches {sorted(branch_ids)}"
        )
    by_id = {nd.id: nd for nd in g.nodes}
    indeg = Counter(v for _, v in g.edges)
    outdeg = Counter(u for u, _ in g.edges)
    for k, nid in sorted(g.entry_of_branch.items()):
        if nid not in by_id:
            problems.append(f"entry of branch {k} references missing node {nid}")
            continue
        if by_id[nid].branch_id != k:
            problems.append(
                f"entry of branch {k} is node {nid} with branch_id {by_id[nid].branch_id}"
            )
        if indeg[nid] > 0:
            problems.append(f"entry node has predecessors: branch {k} entry {nid}")
    if any(nd.label == "Fusion" for nd in g.nodes):
        sinks = sorted(nd.id for nd in g.nodes if outdeg[nd.id] == 0)
        if len(sinks) != 1:
            problems.append(f"fusion head present but sinks are {sinks}, expected one")
    return problems


def to_record(g: DagGraph) -> dict:
    """Plain-data form of a graph; field names are part of the file contract."""
    return {
        "nodes": [
            {
                "id": nd.id,
                "branch": nd.branch_id,
                "label": nd.label,
                "d_cmp": nd.d_cmp,
                "r_on": nd.r_on,
                "w_on": nd.w_on,
                "r_off": nd.r_off,
                "w_off": nd.w_off,
            }
            for nd in g.nodes
        ],
        "edges": [[u, v] for u, v in g.edges],
        "entries": {str(k): v for k, v in sorted(g.entry_of_branch.items())},
    }


def from_record(rec: dict) -> DagGraph:
    if set(rec) != {"nodes", "edges", "entries"}:
        raise ValueError(f"graph record must have keys nodes/edges/entries, got {sorted(rec)}")
    nodes = []
    for nd in rec["nodes"]:
        if set(nd) != set(_NODE_FIELDS):
            raise ValueError(f"graph node record has keys {sorted(nd)}, expected {sorted(_NODE_FIELDS)}")
        nodes.append(
            DagNode(
                int(nd["id"]),
                int(nd["branch"]),
                float(nd["d_cmp"]),
                float(nd["r_on"]),
                float(nd["w_on"]),
                float(nd["r_off"]),
                float(nd["w_off"]),
                str(nd["label"]),
            )
        )
    edges = tuple((int(u), int(v)) for u, v in rec["edges"])
    entries = {int(k): int(v) for k, v in rec["entries"].items()}
    return DagGraph(tuple(nodes), edges, entries)


def dumps(g: DagGraph) -> str:
    """Canonical JSON text; equal graphs serialize to identical bytes."""
    return json.dumps(to_record(g), sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str) -> DagGraph:
    return from_record(json.loads(text))


def save(g: DagGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(g))


def load(path) -> DagGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())
