"""Realisability of supports: which B-families carry weighted annotations.

A locally consistent B-family fixes a support; whether some N- or
Q-family exists with exactly that support is the realisability question.
Over *chordless-cycle* context sets (n >= 3 maximal contexts whose
intersection graph is a single cycle) the question has a purely
graph-theoretic answer: build the overlap projection graph, whose
vertices are boundary values and whose edges are the supported rows, and
ask whether every edge lies on a cycle.  Sufficiency is witnessed
constructively by summing uniform lifts of simple cycles; necessity needs
positivity and cancellativity of the annotation monoid.

For arbitrary context sets the package falls back to exact rational
feasibility over one unknown weight per supported row (see
:mod:`ctxfam.feasibility`); a natural-valued witness follows from a
rational one by clearing denominators, because the marginal-agreement
constraints are homogeneous.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .family import ContextSet, ContextualFamily
from .feasibility import find_rational_solution
from .monoid import MonoidKind, MonoidValue, subtract
from .relation import Assignment, KRelation, scalar_fill


class NotChordlessCycleError(ValueError):
    """Raised when a context set is not a chordless cycle of contexts."""


class NotSimplyCyclicError(ValueError):
    """Raised when a family is not a single simple cycle of assignments."""


class NotRealisableError(ValueError):
    """Raised when a requested realisation does not exist."""

    def __init__(self, message: str, uncovered: Tuple["OpgEdge", ...] = ()):
        super().__init__(message)
        self.uncovered = uncovered


@dataclass(frozen=True)
class CycleOrdering:
    """Maximal contexts arranged so neighbours, and only neighbours,
    intersect.  Index arithmetic is cyclic."""

    contexts: Tuple[FrozenSet[str], ...]

    def __len__(self) -> int:
        return len(self.contexts)

    def boundary(self, i: int) -> FrozenSet[str]:
        """Shared variables of context i and context i+1 (cyclically)."""
        n = len(self.contexts)
        return self.contexts[i % n] & self.contexts[(i + 1) % n]


def classify_chordless_cycle(contexts: ContextSet) -> CycleOrdering:
    """Arrange a context set as a chordless cycle, or explain why not.

    Requirements: at least three maximal contexts, every context
    intersecting exactly two others, and the intersection graph connected
    (a single cycle).  The returned ordering starts at the least context
    and proceeds toward its lesser neighbour, so it is deterministic.
    """
    sets = list(contexts)
    m = len(sets)
    if m < 3:
        raise NotChordlessCycleError(
            f"a chordless cycle needs at least 3 contexts, got {m}"
        )
    neighbours: List[List[int]] = [[] for _ in range(m)]
    for i in range(m):
        for j in range(m):
            if i != j and sets[i] & sets[j]:
                neighbours[i].append(j)
    for i in range(m):
        if len(neighbours[i]) != 2:
            raise NotChordlessCycleError(
                f"context {{{','.join(sorted(sets[i]))}}} intersects "
                f"{len(neighbours[i])} other contexts, expected exactly 2"
            )
    start = 0  # sets come sorted from ContextSet
    order = [start]
    current = min(neighbours[start])
    previous = start
    while current != start:
        order.append(current)
        nxt = [j for j in neighbours[current] if j != previous]
        previous, current = current, nxt[0]
    if len(order) != m:
        raise NotChordlessCycleError(
            "the intersection graph of the contexts is not connected"
        )
    return CycleOrdering(tuple(sets[i] for i in order))


@dataclass(frozen=True)
class OpgVertex:
    """A boundary value: (layer index, assignment on that boundary)."""

    layer: int
    boundary: Assignment

    @property
    def sort_key(self) -> Tuple:
        return (self.layer, self.boundary.sort_key)

    def __str__(self) -> str:
        values = ",".join(str(val) for _, val in self.boundary.items())
        return f"{self.layer}:{values}"


@dataclass(frozen=True)
class OpgEdge:
    """One supported row, drawn from its incoming boundary value to its
    outgoing one.  ``context_index`` names the layer whose relation holds
    the generating assignment."""

    source: OpgVertex
    target: OpgVertex
    label: Assignment
    context_index: int

    @property
    def sort_key(self) -> Tuple:
        return (self.context_index, self.label.sort_key)

    def describe(self) -> str:
        return f"{self.source} -> {self.target}  {self.label}"


class OverlapProjectionGraph:
    """The boundary-value graph of a family over a chordless cycle.

    Layer i holds the values of the boundary shared by contexts i and
    i+1; each row of context i contributes one edge from its value on
    boundary i-1 to its value on boundary i.  The graph is cyclically
    n-partite: every edge advances the layer by one, modulo n.
    """

    __slots__ = ("ordering", "vertices", "edges", "_out", "_in")

    def __init__(self, ordering: CycleOrdering, edges: Iterable[OpgEdge]):
        self.ordering = ordering
        self.edges = tuple(sorted(edges, key=lambda e: e.sort_key))
        verts = {e.source for e in self.edges} | {e.target for e in self.edges}
        self.vertices = tuple(sorted(verts, key=lambda v: v.sort_key))
        out: Dict[OpgVertex, List[OpgEdge]] = {v: [] for v in self.vertices}
        inc: Dict[OpgVertex, List[OpgEdge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.source].append(e)
            inc[e.target].append(e)
        self._out = out
        self._in = inc

    def out_edges(self, v: OpgVertex) -> List[OpgEdge]:
        return self._out[v]

    def in_edges(self, v: OpgVertex) -> List[OpgEdge]:
        return self._in[v]

    def strongly_connected_components(self) -> List[FrozenSet[OpgVertex]]:
        """Kosaraju's two-pass sweep, in deterministic vertex order."""
        finish: List[OpgVertex] = []
        seen = set()
        for root in self.vertices:
            if root in seen:
                continue
            stack: List[Tuple[OpgVertex, int]] = [(root, 0)]
            seen.add(root)
            while stack:
                node, i = stack.pop()
                succs = self._out[node]
                if i < len(succs):
                    stack.append((node, i + 1))
                    nxt = succs[i].target
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append((nxt, 0))
                else:
                    finish.append(node)
        component: Dict[OpgVertex, int] = {}
        labels = 0
        for root in reversed(finish):
            if root in component:
                continue
            stack2 = [root]
            component[root] = labels
            while stack2:
                node = stack2.pop()
                for e in self._in[node]:
                    if e.source not in component:
                        component[e.source] = labels
                        stack2.append(e.source)
            labels += 1
        groups: Dict[int, List[OpgVertex]] = {}
        for v, c in component.items():
            groups.setdefault(c, []).append(v)
        comps = [frozenset(g) for g in groups.values()]
        return sorted(comps, key=lambda c: min(v.sort_key for v in c))

    def uncovered_edges(self) -> Tuple[OpgEdge, ...]:
        """Edges lying on no cycle: endpoints in different components."""
        component: Dict[OpgVertex, int] = {}
        for i, comp in enumerate(self.strongly_connected_components()):
            for v in comp:
                component[v] = i
        return tuple(
            e for e in self.edges if component[e.source] != component[e.target]
        )

    @property
    def has_edge_cycle_cover(self) -> bool:
        return not self.uncovered_edges()

    def to_dot(self) -> str:
        """Deterministic DOT text: sorted vertices, then sorted edges."""
        lines = ["digraph opg {", "  rankdir=LR;"]
        for v in self.vertices:
            lines.append(f'  "{v}";')
        for e in self.edges:
            lines.append(f'  "{e.source}" -> "{e.target}" [label="{e.label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_opg(
    family: ContextualFamily, ordering: Optional[CycleOrdering] = None
) -> OverlapProjectionGraph:
    """The overlap projection graph of a family's support.

    The family's context set must classify as a chordless cycle.  Only
    the support matters, so any kind is accepted.
    """
    if ordering is None:
        ordering = classify_chordless_cycle(family.contexts)
    n = len(ordering)
    edges: List[OpgEdge] = []
    for i in range(n):
        context = ordering.contexts[i]
        before = ordering.boundary(i - 1)
        after = ordering.boundary(i)
        rel = family.relation_at(context)
        for row, _ in rel.rows():
            source = OpgVertex((i - 1) % n, row.restrict(before))
            target = OpgVertex(i, row.restrict(after))
            edges.append(OpgEdge(source, target, row, i))
    return OverlapProjectionGraph(ordering, edges)


def find_simple_cycle_through(
    graph: OverlapProjectionGraph, edge: OpgEdge
) -> List[OpgEdge]:
    """A shortest simple cycle whose first edge is the given one.

    Breadth-first search from the edge's target back to its source, with
    neighbours expanded in sorted order, so the result is deterministic.
    Raises :class:`NotRealisableError` when the edge lies on no cycle.
    """
    start = edge.target
    goal = edge.source
    if start == goal:
        return [edge]
    parent: Dict[OpgVertex, OpgEdge] = {}
    queue = [start]
    seen = {start}
    while queue:
        fresh: List[OpgVertex] = []
        for node in queue:
            for e in graph.out_edges(node):
                if e.target == goal:
                    path = [e]
                    walk = node
                    while walk != start:
                        back = parent[walk]
                        path.append(back)
                        walk = back.source
                    path.reverse()
                    return [edge] + path
                if e.target not in seen:
                    seen.add(e.target)
                    parent[e.target] = e
                    fresh.append(e.target)
        queue = fresh
    raise NotRealisableError(
        f"edge {edge.describe()} lies on no cycle", uncovered=(edge,)
    )


def _family_from_labels(
    contexts: ContextSet, labels: Iterable[Assignment]
) -> ContextualFamily:
    """Group cycle labels by their context and form the B-family."""
    grouped: Dict[FrozenSet[str], List[Assignment]] = {c: [] for c in contexts}
    for label in labels:
        grouped[label.variables].append(label)
    relations = [
        KRelation.boolean(c, rows) for c, rows in grouped.items()
    ]
    return ContextualFamily(relations)


def lift_uniform(sub: ContextualFamily, weight: MonoidValue) -> ContextualFamily:
    """Annotate a simply cyclic B-family uniformly with one nonzero weight.

    The input must be a B-family whose overlap projection graph is a
    single simple cycle through every supported row.  Such a cycle meets
    every layer the same number of times, which is exactly why the
    uniform annotation is consistent for any annotation monoid.
    """
    if sub.kind is not MonoidKind.B:
        raise ValueError("lift_uniform expects a B-family")
    if weight.is_zero:
        raise ValueError("lift weight must be nonzero")
    graph = build_opg(sub)
    if not graph.vertices:
        raise NotSimplyCyclicError("the empty family is not a cycle")
    for v in graph.vertices:
        if len(graph.out_edges(v)) != 1 or len(graph.in_edges(v)) != 1:
            raise NotSimplyCyclicError(
                f"vertex {v} has degree other than one in each direction"
            )
    comps = graph.strongly_connected_components()
    if len(comps) != 1:
        raise NotSimplyCyclicError("the support splits into several cycles")
    lifted = [
        scalar_fill(weight, rel.variables, rel.support)
        for rel in sub.maximal_relations()
    ]
    return ContextualFamily(lifted)


def realisable_chordless(family: ContextualFamily, kind: MonoidKind) -> bool:
    """Whether the support admits any family in a cancellative kind.

    Decided structurally: realisable exactly when every edge of the
    overlap projection graph lies on a cycle.  The argument needs
    positivity and cancellativity, so B is rejected (where the question
    is trivial anyway: the B-family is its own realisation).
    """
    if not kind.is_cancellative:
        raise ValueError("the cycle-cover criterion needs a cancellative kind")
    if family.kind is not MonoidKind.B:
        raise ValueError("realisability is a property of a B-family support")
    return build_opg(family).has_edge_cycle_cover


def realise(
    family: ContextualFamily,
    kind: MonoidKind,
    weight: Optional[MonoidValue] = None,
) -> ContextualFamily:
    """A family of the requested kind with exactly the given support.

    Sums one uniform cycle lift per supported row; a row crossed by k of
    the chosen cycles ends up annotated k times the base weight, which is
    fine since only the support is prescribed.  Raises
    :class:`NotRealisableError`, carrying the uncovered edges, when no
    realisation exists.
    """
    if family.kind is not MonoidKind.B:
        raise ValueError("realise expects a B-family support")
    if weight is None:
        weight = MonoidValue.one(kind)
    if weight.kind is not kind:
        raise ValueError(f"weight {weight} is not of kind {kind}")
    if weight.is_zero:
        raise ValueError("realisation weight must be nonzero")
    graph = build_opg(family)
    uncovered = graph.uncovered_edges()
    if uncovered:
        listing = "; ".join(e.describe() for e in uncovered)
        raise NotRealisableError(f"support is not realisable: {listing}", uncovered)
    if not graph.edges:
        empty = [
            KRelation(rel.variables, kind, {}) for rel in family.maximal_relations()
        ]
        return ContextualFamily(empty)
    total: Optional[ContextualFamily] = None
    for edge in graph.edges:
        cycle = find_simple_cycle_through(graph, edge)
        sub = _family_from_labels(family.contexts, (e.label for e in cycle))
        part = lift_uniform(sub, weight)
        total = part if total is None else total + part
    assert total is not None
    if total.support() != family.support():
        raise AssertionError("realisation changed the support; internal bug")
    return total


def decompose_cycles(
    family: ContextualFamily,
) -> List[Tuple[MonoidValue, ContextualFamily]]:
    """Peel a weighted family into uniform simple cycles.

    Repeatedly picks the deterministic simple cycle through the least
    vertex of the current support's graph, subtracts the least annotation
    along it, and recurses; cancellativity keeps every remainder a valid
    family.  The parts reconstruct the input exactly:
    sum of ``lift_uniform(part, weight)`` equals the family.
    """
    if not family.kind.is_cancellative:
        raise ValueError("decomposition needs a cancellative kind")
    parts: List[Tuple[MonoidValue, ContextualFamily]] = []
    current = family
    while any(len(rel) for rel in current.maximal_relations()):
        graph = build_opg(current.support())
        start = graph.vertices[0]
        cycle = _shortest_cycle_at(graph, start)
        labels = [e.label for e in cycle]
        sub = _family_from_labels(current.contexts, labels)
        least = min(
            (current.relation_at(lab.variables).annotation(lab) for lab in labels),
            key=lambda v: v.payload,
        )
        parts.append((least, sub))
        current = _subtract_uniform(current, labels, least)
    return parts


def _shortest_cycle_at(
    graph: OverlapProjectionGraph, start: OpgVertex
) -> List[OpgEdge]:
    """Shortest cycle through a vertex, ties broken by sorted edge order."""
    best: Optional[List[OpgEdge]] = None
    for first in graph.out_edges(start):
        closing = find_simple_cycle_through(graph, first)
        if best is None or len(closing) < len(best):
            best = closing
    if best is None:
        raise NotRealisableError(f"vertex {start} has no outgoing edge")
    return best


def _subtract_uniform(
    family: ContextualFamily, labels: List[Assignment], amount: MonoidValue
) -> ContextualFamily:
    """Remove a uniform amount along the given rows, dropping zeros.

    Subtracting a simple cycle lowers both marginals at every visited
    boundary value equally, so the remainder stays locally consistent.
    """
    chosen: Dict[FrozenSet[str], List[Assignment]] = {}
    for lab in labels:
        chosen.setdefault(lab.variables, []).append(lab)
    updated: List[KRelation] = []
    for rel in family.maximal_relations():
        rows = {row: value for row, value in rel.rows()}
        for lab in chosen.get(rel.variables, []):
            remaining = subtract(rows[lab], amount)
            if remaining.is_zero:
                del rows[lab]
            else:
                rows[lab] = remaining
        updated.append(KRelation(rel.variables, rel.kind, rows))
    return ContextualFamily(updated)


def realisable_lp(
    family: ContextualFamily, kind: MonoidKind
) -> Optional[Dict[Assignment, MonoidValue]]:
    """Realisability of an arbitrary support by exact rational feasibility.

    One unknown per supported row, each at least one, with the pairwise
    marginal-agreement equations (the empty overlap contributes equality
    of total masses).  The constraints are homogeneous, so scaling a
    rational witness by the least common denominator yields a natural
    witness: feasibility does not depend on the cancellative kind chosen.
    Returns the witness weights, or None when the support is not
    realisable.
    """
    if family.kind is not MonoidKind.B:
        raise ValueError("realisable_lp expects a B-family support")
    if not kind.is_cancellative:
        raise ValueError("realisability concerns the kinds N and Q")
    labels = family.labels()
    if not labels:
        return {}
    equalities: List[Tuple[Dict[Assignment, Fraction], Fraction]] = []
    contexts = list(family.contexts)
    by_context: Dict[FrozenSet[str], List[Assignment]] = {
        c: [row for row, _ in family.relation_at(c).rows()] for c in contexts
    }
    for i, ci in enumerate(contexts):
        for cj in contexts[i + 1 :]:
            shared = ci & cj
            groups: Dict[Assignment, Dict[Assignment, Fraction]] = {}
            for row in by_context[ci]:
                groups.setdefault(row.restrict(shared), {})[row] = Fraction(1)
            for row in by_context[cj]:
                cell = groups.setdefault(row.restrict(shared), {})
                cell[row] = cell.get(row, Fraction(0)) - Fraction(1)
            for key in sorted(groups, key=lambda a: a.sort_key):
                equalities.append((groups[key], Fraction(0)))
    lower = {row: Fraction(1) for row in labels}
    solution = find_rational_solution(equalities, lower, labels)
    if solution is None:
        return None
    if kind is MonoidKind.Q:
        return {row: MonoidValue.of(MonoidKind.Q, w) for row, w in solution.items()}
    scale = 1
    for w in solution.values():
        scale = scale * w.denominator // _gcd(scale, w.denominator)
    return {
        row: MonoidValue.of(MonoidKind.N, int(w * scale))
        for row, w in solution.items()
    }


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def family_from_weights(
    contexts: ContextSet,
    weights: Dict[Assignment, MonoidValue],
    kind: Optional[MonoidKind] = None,
) -> ContextualFamily:
    """Assemble a family from per-row weights (as produced by
    :func:`realisable_lp`); rows group by their variable sets.  The kind
    argument is only needed when the weight map is empty."""
    kinds = {w.kind for w in weights.values()}
    if kind is not None:
        kinds.add(kind)
    if len(kinds) != 1:
        raise ValueError("weights must share one kind" if kinds else "empty weights need an explicit kind")
    kind = kinds.pop()
    grouped: Dict[FrozenSet[str], Dict[Assignment, MonoidValue]] = {
        c: {} for c in contexts
    }
    for row, value in weights.items():
        grouped[row.variables][row] = value
    return ContextualFamily(
        [KRelation(c, kind, rows) for c, rows in grouped.items()]
    )
