"""Functional dependencies over contextual families.

Satisfaction is support-based: a dependency X -> Y holds in a family when
the relation at the context of its variables is functional from X to Y.
Entailment quantifies over all locally consistent families whose context
sets contain the variables of every stated dependency.  That quantifier
is weaker than the classical one: transitivity fails, because premises
living in different contexts need not be reconcilable in a single
relation.

What survives is decidedly structural.  Reflexivity always holds.  A
cycle of dependencies x1 -> x2 -> ... -> xk -> x1 can be inverted
(x1 -> xk), with no context conditions at all.  And a chain
x1 -> ... -> xn can be composed when enough three-variable contexts are
available to carry intermediate "certificates" c_i -> xn alongside it;
which contexts exist is part of the input, via the constraint
dependencies (CDs, dependencies with equal sides) whose variable sets
declare them.  Derivations may only mention variable sets contained in
some stated dependency's variables; the engine enforces that throughout.

Four rule systems are offered: ``CR`` (reflexivity + cycle rule), which
is complete for unary dependencies with at most binary CDs; ``FULL``
(CR + the chain rule); and ``CLASSICAL``/``NRA``, the Armstrong-style
systems that apply when a single CD covers all variables, the latter
replacing transitivity with its context-guarded form.
"""

from __future__ import annotations

import enum
import itertools
from bisect import insort
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .family import ContextSet, ContextualFamily
from .monoid import MonoidKind, MonoidValue
from .relation import Assignment, KRelation


class UnsupportedDependencyError(ValueError):
    """Raised when a rule system is given dependencies outside its scope."""


class MissingCoveringContextError(ValueError):
    """Raised when CLASSICAL or NRA lack a CD covering all variables."""


@dataclass(frozen=True)
class FD:
    """A functional dependency between nonempty variable sets.

    A dependency with equal sides is a constraint dependency (CD): it is
    satisfied by every relation and serves purely to declare that its
    variables share a context.
    """

    lhs: FrozenSet[str]
    rhs: FrozenSet[str]

    def __post_init__(self) -> None:
        if not self.lhs or not self.rhs:
            raise ValueError("dependency sides must be nonempty")

    @staticmethod
    def unary(x: str, y: str) -> "FD":
        return FD(frozenset({str(x)}), frozenset({str(y)}))

    @staticmethod
    def cd(variables: Iterable[str]) -> "FD":
        vs = frozenset(str(v) for v in variables)
        return FD(vs, vs)

    @property
    def is_cd(self) -> bool:
        return self.lhs == self.rhs

    @property
    def is_unary(self) -> bool:
        return len(self.lhs) == 1 and len(self.rhs) == 1

    @property
    def variables(self) -> FrozenSet[str]:
        return self.lhs | self.rhs

    def display(self) -> str:
        if self.is_cd:
            return "cd " + " ".join(sorted(self.lhs))
        return " ".join(sorted(self.lhs)) + " -> " + " ".join(sorted(self.rhs))

    def __str__(self) -> str:
        return self.display()

    @property
    def sort_key(self) -> Tuple:
        return (tuple(sorted(self.lhs)), tuple(sorted(self.rhs)))


class RuleSet(enum.Enum):
    """Which derivation rules are in force."""

    CR = "cr"
    FULL = "full"
    CLASSICAL = "classical"
    NRA = "nra"

    @staticmethod
    def from_string(text: str) -> "RuleSet":
        try:
            return RuleSet(text.lower())
        except ValueError:
            raise ValueError(f"unknown rule set {text!r}") from None


@dataclass(frozen=True)
class TraceStep:
    """One derivation step: a dependency, its rule, and its antecedents
    (indices of earlier steps).  ``detail`` carries the instantiation
    needed to replay chain and augmentation steps."""

    fd: FD
    rule: str
    antecedents: Tuple[int, ...] = ()
    detail: Tuple = ()


@dataclass(frozen=True)
class DerivationTrace:
    steps: Tuple[TraceStep, ...]

    @property
    def goal(self) -> FD:
        return self.steps[-1].fd

    def __str__(self) -> str:
        return format_trace(self)


def format_trace(trace: DerivationTrace) -> str:
    """Numbered steps, one per line, antecedents as 1-based indices."""
    lines = []
    for i, step in enumerate(trace.steps, start=1):
        if step.antecedents:
            refs = ",".join(str(j + 1) for j in step.antecedents)
            rule = f"{step.rule}({refs})"
        else:
            rule = step.rule
        lines.append(f"{i}. {step.fd.display()}  [{rule}]")
    return "\n".join(lines)


def _available(variables: FrozenSet[str], context_sets: Sequence[FrozenSet[str]]) -> bool:
    return any(variables <= c for c in context_sets)


def verify_trace(trace: DerivationTrace, sigma: Iterable[FD], goal: FD) -> bool:
    """Replay a trace: every step must be a premise, a reflexivity
    instance, or a correct single application of a rule to earlier steps,
    and must mention only variable sets inside some stated dependency's
    variables (the goal's included)."""
    premises = set(sigma)
    context_sets = [fd.variables for fd in premises] + [goal.variables]
    steps = trace.steps
    if not steps or steps[-1].fd != goal:
        return False
    for i, step in enumerate(steps):
        if any(j >= i or j < 0 for j in step.antecedents):
            return False
        if not _available(step.fd.variables, context_sets):
            return False
        ants = [steps[j].fd for j in step.antecedents]
        if step.rule == "premise":
            if step.fd not in premises or ants:
                return False
        elif step.rule == "reflexivity":
            if not step.fd.rhs <= step.fd.lhs or ants:
                return False
        elif step.rule == "cycle":
            if not _check_cycle_step(step.fd, ants):
                return False
        elif step.rule == "chain":
            if not _check_chain_step(step.fd, ants, step.detail, context_sets):
                return False
        elif step.rule == "augmentation":
            if len(ants) != 1 or not step.detail:
                return False
            (base,) = ants
            added = frozenset(step.detail[0])
            if step.fd != FD(base.lhs | added, base.rhs | added):
                return False
        elif step.rule == "transitivity":
            if len(ants) != 2:
                return False
            first, second = ants
            if first.rhs != second.lhs or step.fd != FD(first.lhs, second.rhs):
                return False
        else:
            return False
    return True


def _check_cycle_step(conclusion: FD, ants: List[FD]) -> bool:
    if not conclusion.is_unary or len(ants) < 2:
        return False
    path, closing = ants[:-1], ants[-1]
    if any(not f.is_unary for f in ants):
        return False
    (x,) = conclusion.lhs
    (y,) = conclusion.rhs
    walk = x
    for f in path:
        if f.lhs != frozenset({walk}):
            return False
        (walk,) = f.rhs
    return walk == y and closing == FD.unary(y, x)


def _check_chain_step(
    conclusion: FD,
    ants: List[FD],
    detail: Tuple,
    context_sets: Sequence[FrozenSet[str]],
) -> bool:
    have = set(ants)
    if detail and detail[0] == "sets":
        # Context-guarded transitivity on variable sets: X -> Y, Y -> Z
        # together with a CD over all variables involved.
        _, left, mid, right = detail
        left, mid, right = frozenset(left), frozenset(mid), frozenset(right)
        needed = [FD(left, mid), FD(mid, right), FD.cd(left | mid | right)]
        return (
            conclusion == FD(left, right)
            and all(f in have for f in needed)
            and _available(left | mid | right, context_sets)
        )
    if not detail or detail[0] != "unary":
        return False
    _, xs, cs = detail
    n = len(xs)
    if n < 2 or len(cs) != n - 1:
        return False
    if conclusion != FD.unary(xs[0], xs[-1]):
        return False
    target = xs[-1]
    needed_fds = [FD.unary(xs[i], xs[i + 1]) for i in range(n - 1)]
    needed_fds += [FD.unary(c, target) for c in cs]
    needed_cds = [frozenset({xs[0], cs[0], target})]
    needed_cds += [frozenset({xs[i], cs[i], xs[i + 1]}) for i in range(n - 1)]
    needed_cds += [frozenset({cs[i], xs[i + 1], cs[i + 1]}) for i in range(n - 2)]
    needed_cds += [frozenset({cs[i], cs[i + 1], target}) for i in range(n - 2)]
    if any(f not in have for f in needed_fds):
        return False
    for s in needed_cds:
        if FD(s, s) not in have or not _available(s, context_sets):
            return False
    return True


def reflexivity_expand(sigma: Iterable[FD]) -> FrozenSet[FD]:
    """All reflexivity instances the premises make available.

    For each premise variable set: CDs on its subsets of up to three
    variables, and every dependency whose right side is contained in its
    left side (projections such as ``xy -> x``).  Meant for the bounded
    fragment where premise variable sets are small.
    """
    out: Set[FD] = set()
    for fd in sigma:
        out.add(fd)
        vs = sorted(fd.variables)
        for size in (1, 2, 3):
            if size <= len(vs):
                for combo in itertools.combinations(vs, size):
                    out.add(FD.cd(combo))
        for lsize in range(1, len(vs) + 1):
            for lhs in itertools.combinations(vs, lsize):
                for rsize in range(1, lsize + 1):
                    for rhs in itertools.combinations(lhs, rsize):
                        out.add(FD(frozenset(lhs), frozenset(rhs)))
    return frozenset(out)


def classical_closure(sigma: Iterable[FD], attributes: Iterable[str]) -> FrozenSet[str]:
    """Attribute closure under all premises, context-blind."""
    closure = set(str(a) for a in attributes)
    fds = sorted(sigma, key=lambda f: f.sort_key)
    changed = True
    while changed:
        changed = False
        for fd in fds:
            if fd.lhs <= closure and not fd.rhs <= closure:
                closure |= fd.rhs
                changed = True
    return frozenset(closure)


# ---------------------------------------------------------------------------
# The unary closure engine (CR and FULL)


def _context_atoms(context_sets: Iterable[FrozenSet[str]]) -> FrozenSet[FrozenSet[str]]:
    """Every variable set of size one to three inside some stated set.
    Chain-rule side conditions only ever ask about such sets."""
    atoms: Set[FrozenSet[str]] = set()
    for c in context_sets:
        vs = sorted(c)
        for size in (1, 2, 3):
            if size <= len(vs):
                for combo in itertools.combinations(vs, size):
                    atoms.add(frozenset(combo))
    return frozenset(atoms)


def _third_elements(atoms: FrozenSet[FrozenSet[str]]) -> Dict[FrozenSet[str], Tuple[str, ...]]:
    """For each pair {u, v} (or singleton {u}), the sorted ws such that
    the collapsed set {u, v, w} is an available atom."""
    table: Dict[FrozenSet[str], Set[str]] = {}
    for atom in atoms:
        vs = sorted(atom)
        if len(vs) == 1:
            (a,) = vs
            table.setdefault(frozenset({a}), set()).add(a)
        elif len(vs) == 2:
            a, b = vs
            table.setdefault(frozenset({a, b}), set()).update((a, b))
            table.setdefault(frozenset({a}), set()).add(b)
            table.setdefault(frozenset({b}), set()).add(a)
        else:
            a, b, c = vs
            table.setdefault(frozenset({a, b}), set()).add(c)
            table.setdefault(frozenset({a, c}), set()).add(b)
            table.setdefault(frozenset({b, c}), set()).add(a)
    return {k: tuple(sorted(v)) for k, v in table.items()}


def _chain_states(
    variables: Sequence[str],
    edges: Set[Tuple[str, str]],
    in_adj: Dict[str, List[str]],
    atoms: FrozenSet[FrozenSet[str]],
    thirds: Dict[FrozenSet[str], Tuple[str, ...]],
    target: str,
) -> Tuple[Dict[Tuple[str, str], Optional[Tuple[str, str]]], Tuple[str, ...]]:
    """Backward reachability in the chain-rule state graph for one target.

    A state (a, c) stands for "the chain currently ends at a with
    certificate c -> target in force".  The returned map sends each state
    that can reach acceptance to its successor state (None marks a state
    that accepts immediately because a -> target is an edge).
    """
    witnesses = tuple(
        c
        for c in variables
        if (c, target) in edges and frozenset({c, target}) in atoms
    )
    witness_set = set(witnesses)
    succ: Dict[Tuple[str, str], Optional[Tuple[str, str]]] = {}
    frontier: List[Tuple[str, str]] = []
    for a in in_adj.get(target, []):
        for c in thirds.get(frozenset({a, target}), ()):
            if c in witness_set and (a, c) not in succ:
                succ[(a, c)] = None
                frontier.append((a, c))
    frontier.sort()
    while frontier:
        fresh: List[Tuple[str, str]] = []
        for b, c2 in frontier:
            limit = thirds.get(frozenset({c2, target}), ())
            for c1 in thirds.get(frozenset({b, c2}), ()):
                if c1 not in witness_set or c1 not in limit:
                    continue
                for a in thirds.get(frozenset({c1, b}), ()):
                    if (a, b) in edges and (a, c1) not in succ:
                        succ[(a, c1)] = (b, c2)
                        fresh.append((a, c1))
        fresh.sort()
        frontier = fresh
    return succ, witnesses


class _ClosureEngine:
    """Fixpoint of the unary rules, with justifications for tracing.

    Each pass scans every variable pair in sorted order, testing one
    cycle-rule application (and, under FULL, one chain-rule application)
    against the current derived set; newly derived dependencies take
    effect on the next pass, and the loop stops on an unchanged pass.
    """

    def __init__(
        self,
        variables: Iterable[str],
        premise_edges: Iterable[Tuple[str, str]],
        context_sets: Iterable[FrozenSet[str]],
        use_chain: bool,
    ):
        self.variables: Tuple[str, ...] = tuple(sorted(set(variables)))
        self.atoms = _context_atoms(context_sets)
        self.thirds = _third_elements(self.atoms)
        self.use_chain = use_chain
        self.edges: Dict[Tuple[str, str], Tuple] = {}
        self.out_adj: Dict[str, List[str]] = {v: [] for v in self.variables}
        self.in_adj: Dict[str, List[str]] = {v: [] for v in self.variables}
        for u, v in sorted(set(premise_edges)):
            self._add((u, v), ("premise",))
        for v in self.variables:
            if (v, v) not in self.edges:
                self._add((v, v), ("reflexivity",))
        self._run()

    def _add(self, edge: Tuple[str, str], justification: Tuple) -> None:
        if edge in self.edges:
            return
        self.edges[edge] = justification
        insort(self.out_adj[edge[0]], edge[1])
        insort(self.in_adj[edge[1]], edge[0])

    def _reach(self, x: str) -> Tuple[Dict[str, Optional[str]], List[str]]:
        """Vertices reachable from x along at least one edge, with the
        predecessor map of the breadth-first tree."""
        parent: Dict[str, Optional[str]] = {}
        frontier = []
        for b in self.out_adj[x]:
            if b not in parent:
                parent[b] = x
                frontier.append(b)
        order = list(frontier)
        while frontier:
            fresh = []
            for a in frontier:
                for b in self.out_adj[a]:
                    if b not in parent:
                        parent[b] = a
                        fresh.append(b)
            fresh.sort()
            order.extend(fresh)
            frontier = fresh
        return parent, order

    def _path_edges(
        self, x: str, y: str, parent: Dict[str, Optional[str]]
    ) -> Tuple[Tuple[str, str], ...]:
        path = []
        walk = y
        while walk != x:
            prev = parent[walk]
            path.append((prev, walk))
            if prev == x:
                break
            walk = prev
        path.reverse()
        return tuple(path)

    def _run(self) -> None:
        while True:
            additions: Dict[Tuple[str, str], Tuple] = {}
            for x in self.variables:
                parent, order = self._reach(x)
                for y in order:
                    if y == x or (x, y) in self.edges or (x, y) in additions:
                        continue
                    if (y, x) in self.edges:
                        path = self._path_edges(x, y, parent)
                        additions[(x, y)] = ("cycle", path, (y, x))
            if self.use_chain:
                edge_set = set(self.edges)
                for y in self.variables:
                    succ, witnesses = _chain_states(
                        self.variables, edge_set, self.in_adj, self.atoms, self.thirds, y
                    )
                    if not succ:
                        continue
                    for x in self.variables:
                        if x == y or (x, y) in self.edges or (x, y) in additions:
                            continue
                        for c1 in witnesses:
                            if (x, c1) not in succ:
                                continue
                            if frozenset({x, c1, y}) not in self.atoms:
                                continue
                            xs, cs = self._instantiation(x, c1, succ, y)
                            additions[(x, y)] = ("chain", tuple(xs), tuple(cs))
                            break
            if not additions:
                return
            for edge in sorted(additions):
                self._add(edge, additions[edge])

    @staticmethod
    def _instantiation(
        x: str,
        c1: str,
        succ: Dict[Tuple[str, str], Optional[Tuple[str, str]]],
        target: str,
    ) -> Tuple[List[str], List[str]]:
        xs = [x]
        cs = [c1]
        state = (x, c1)
        while succ[state] is not None:
            state = succ[state]
            xs.append(state[0])
            cs.append(state[1])
        xs.append(target)
        return xs, cs


def _split_premises(sigma: Sequence[FD]) -> Tuple[List[Tuple[str, str]], List[FrozenSet[str]], List[str]]:
    """Unary edges, context sets, and variables of a premise list;
    rejects dependencies outside the unary + CD fragment."""
    edges: List[Tuple[str, str]] = []
    contexts: List[FrozenSet[str]] = []
    variables: Set[str] = set()
    for fd in sigma:
        if fd.is_unary:
            (u,) = fd.lhs
            (v,) = fd.rhs
            edges.append((u, v))
        elif not fd.is_cd:
            raise UnsupportedDependencyError(
                f"{fd.display()} is neither unary nor a CD; "
                "only CLASSICAL and NRA accept general dependencies"
            )
        contexts.append(fd.variables)
        variables |= fd.variables
    return edges, contexts, sorted(variables)


def cycle_rule_derives(sigma: Iterable[FD], x: str, y: str) -> bool:
    """One cycle-rule application from the premises as given: a directed
    path x to y among the stated unary dependencies, closed by the stated
    edge y -> x."""
    edges, _, variables = _split_premises(list(sigma))
    if (y, x) not in set(edges):
        return False
    adj: Dict[str, List[str]] = {v: [] for v in variables}
    for u, v in sorted(set(edges)):
        adj[u].append(v)
    if x not in adj or y not in adj:
        return False
    seen: Set[str] = set()
    frontier = list(adj[x])
    seen.update(frontier)
    while frontier:
        fresh = []
        for a in frontier:
            for b in adj[a]:
                if b not in seen:
                    seen.add(b)
                    fresh.append(b)
        frontier = fresh
    return y in seen


def chain_rule_derives(sigma: Iterable[FD], x: str, y: str) -> bool:
    """One chain-rule application from the premises as given.

    True when some chain x = x1 -> ... -> xn = y exists among the stated
    unary dependencies together with certificates c_i -> y, such that all
    the required three-variable contexts (drawn from the premises'
    variable sets) are available.
    """
    premises = list(sigma)
    edges, contexts, variables = _split_premises(premises)
    if x not in variables or y not in variables:
        return False
    atoms = _context_atoms(contexts)
    thirds = _third_elements(atoms)
    edge_set = set(edges)
    in_adj: Dict[str, List[str]] = {v: [] for v in variables}
    for u, v in sorted(edge_set):
        in_adj[v].append(u)
    succ, witnesses = _chain_states(variables, edge_set, in_adj, atoms, thirds, y)
    for c1 in witnesses:
        if (x, c1) in succ and frozenset({x, c1, y}) in atoms:
            return True
    return False


def derivation_closure(
    sigma: Iterable[FD],
    rules: RuleSet = RuleSet.CR,
    extra_context_sets: Iterable[FrozenSet[str]] = (),
) -> FrozenSet[FD]:
    """All unary dependencies derivable from the premises.

    ``extra_context_sets`` admits additional variable sets (a goal's, in
    particular) without adding premises.  Only CR and FULL are closure
    systems here; CLASSICAL and NRA answer via attribute closure in
    :func:`derives`.
    """
    if rules not in (RuleSet.CR, RuleSet.FULL):
        raise ValueError("closure is defined for the CR and FULL rule sets")
    premises = list(sigma)
    edges, contexts, variables = _split_premises(premises)
    extra = [frozenset(s) for s in extra_context_sets]
    for s in extra:
        variables = sorted(set(variables) | s)
    engine = _ClosureEngine(
        variables, edges, contexts + extra, use_chain=(rules is RuleSet.FULL)
    )
    return frozenset(FD.unary(u, v) for (u, v) in engine.edges)


def _trace_from_engine(
    engine: _ClosureEngine, sigma: Sequence[FD], goal: Tuple[str, str]
) -> DerivationTrace:
    premise_cds = {fd.lhs for fd in sigma if fd.is_cd}
    steps: List[TraceStep] = []
    index: Dict[Tuple, int] = {}

    def emit_cd(vs: FrozenSet[str]) -> int:
        key = ("cd", vs)
        if key in index:
            return index[key]
        rule = "premise" if vs in premise_cds else "reflexivity"
        steps.append(TraceStep(FD(vs, vs), rule))
        index[key] = len(steps) - 1
        return index[key]

    def emit_fd(edge: Tuple[str, str]) -> int:
        key = ("fd", edge)
        if key in index:
            return index[key]
        just = engine.edges[edge]
        if just[0] in ("premise", "reflexivity"):
            steps.append(TraceStep(FD.unary(*edge), just[0]))
        elif just[0] == "cycle":
            _, path, closing = just
            ants = [emit_fd(e) for e in path] + [emit_fd(closing)]
            steps.append(TraceStep(FD.unary(*edge), "cycle", tuple(ants)))
        else:
            _, xs, cs = just
            target = xs[-1]
            n = len(xs)
            ants: List[int] = []
            for i in range(n - 1):
                ants.append(emit_fd((xs[i], xs[i + 1])))
            for c in cs:
                ants.append(emit_fd((c, target)))
            cd_sets = [frozenset({xs[0], cs[0], target})]
            cd_sets += [frozenset({xs[i], cs[i], xs[i + 1]}) for i in range(n - 1)]
            cd_sets += [frozenset({cs[i], xs[i + 1], cs[i + 1]}) for i in range(n - 2)]
            cd_sets += [frozenset({cs[i], cs[i + 1], target}) for i in range(n - 2)]
            for s in cd_sets:
                ants.append(emit_cd(s))
            deduped = tuple(dict.fromkeys(ants))
            steps.append(
                TraceStep(FD.unary(*edge), "chain", deduped, ("unary", xs, cs))
            )
        index[key] = len(steps) - 1
        return index[key]

    emit_fd(goal)
    return DerivationTrace(tuple(steps))


def _derives_unary(
    sigma: Sequence[FD], phi: FD, rules: RuleSet
) -> Tuple[bool, Optional[DerivationTrace]]:
    edges, contexts, variables = _split_premises(sigma)
    if phi.rhs <= phi.lhs:
        return True, DerivationTrace((TraceStep(phi, "reflexivity"),))
    if not phi.is_unary:
        raise UnsupportedDependencyError(
            f"goal {phi.display()} is neither unary nor a CD; use CLASSICAL or NRA"
        )
    (x,) = phi.lhs
    (y,) = phi.rhs
    variables = sorted(set(variables) | phi.variables)
    engine = _ClosureEngine(
        variables,
        edges,
        contexts + [phi.variables],
        use_chain=(rules is RuleSet.FULL),
    )
    if (x, y) not in engine.edges:
        return False, None
    return True, _trace_from_engine(engine, sigma, (x, y))


def _derives_covering(
    sigma: Sequence[FD], phi: FD, rules: RuleSet
) -> Tuple[bool, Optional[DerivationTrace]]:
    allvars = phi.variables
    for fd in sigma:
        allvars = allvars | fd.variables
    covers = sorted(
        (fd.lhs for fd in sigma if fd.is_cd and allvars <= fd.lhs),
        key=lambda s: (len(s), tuple(sorted(s))),
    )
    if not covers:
        raise MissingCoveringContextError(
            "CLASSICAL and NRA need a premise CD containing every variable "
            f"({' '.join(sorted(allvars))})"
        )
    if not phi.rhs <= classical_closure(sigma, phi.lhs):
        return False, None

    steps: List[TraceStep] = []

    def push(step: TraceStep) -> int:
        steps.append(step)
        return len(steps) - 1

    def compose(i: int, j: int) -> int:
        """From steps i: X -> S and j: S -> T conclude X -> T, via plain
        transitivity or its context-guarded replacement."""
        left, mid = steps[i].fd.lhs, steps[i].fd.rhs
        right = steps[j].fd.rhs
        if rules is RuleSet.CLASSICAL:
            return push(TraceStep(FD(left, right), "transitivity", (i, j)))
        union = left | mid | right
        cd = FD.cd(union)
        rule = "premise" if cd in set(sigma) else "reflexivity"
        k = push(TraceStep(cd, rule))
        return push(
            TraceStep(
                FD(left, right),
                "chain",
                (i, j, k),
                ("sets", tuple(sorted(left)), tuple(sorted(mid)), tuple(sorted(right))),
            )
        )

    if phi.rhs <= phi.lhs:
        push(TraceStep(phi, "reflexivity"))
        return True, DerivationTrace(tuple(steps))

    known = set(phi.lhs)
    current = push(TraceStep(FD(phi.lhs, phi.lhs), "reflexivity"))
    ordered = sorted((fd for fd in sigma if not fd.is_cd), key=lambda f: f.sort_key)
    progress = True
    while progress and not phi.rhs <= known:
        progress = False
        for fd in ordered:
            if fd.lhs <= known and not fd.rhs <= known:
                i = push(TraceStep(fd, "premise"))
                grown = known | fd.rhs
                j = push(
                    TraceStep(
                        FD(frozenset(known), frozenset(grown)),
                        "augmentation",
                        (i,),
                        (tuple(sorted(known)),),
                    )
                )
                current = compose(current, j)
                known = grown
                progress = True
    if not phi.rhs <= known:
        raise AssertionError("closure said derivable but saturation stalled")
    if steps[current].fd.rhs != phi.rhs:
        j = push(TraceStep(FD(frozenset(known), phi.rhs), "reflexivity"))
        current = compose(current, j)
    assert steps[current].fd == phi
    return True, DerivationTrace(tuple(steps))


def derives(
    sigma: Iterable[FD], phi: FD, rules: RuleSet = RuleSet.CR
) -> Tuple[bool, Optional[DerivationTrace]]:
    """Decide derivability and, when derivable, produce a replayable trace.

    CR and FULL work in the unary + CD fragment and respect contexts: a
    derivation may only mention variable sets inside the variables of
    some premise or of the goal.  CLASSICAL and NRA require a premise CD
    covering every variable and then answer by attribute closure.
    """
    premises = list(sigma)
    if rules in (RuleSet.CLASSICAL, RuleSet.NRA):
        return _derives_covering(premises, phi, rules)
    return _derives_unary(premises, phi, rules)


# ---------------------------------------------------------------------------
# Counterexamples and the bounded semantic oracle


def build_counterexample(
    sigma: Iterable[FD], phi: FD, kind: MonoidKind = MonoidKind.B
) -> ContextualFamily:
    """A locally consistent family satisfying the premises and violating
    the goal, for goals the cycle rule cannot derive.

    Works in the fragment behind the completeness argument: unary
    premises with at most binary CDs and a unary goal.  Two shapes cover
    everything.  With no premise path from x to y, two global rows
    (all zeroes, and the indicator of the non-reachable part) project to
    a globally consistent counterexample.  With such a path, the goal's
    context gets all four rows over {x, y} while every other context gets
    the two diagonal rows; weighted kinds annotate the four rows a = 1
    and the diagonals b = 2, using a + a = b to balance the marginals.
    """
    premises = list(sigma)
    for fd in premises:
        if not fd.is_unary and not (fd.is_cd and len(fd.lhs) <= 2):
            raise UnsupportedDependencyError(
                f"counterexample construction covers unary premises and "
                f"binary CDs; got {fd.display()}"
            )
    if not phi.is_unary:
        raise UnsupportedDependencyError("the goal must be a unary dependency")
    (x,) = phi.lhs
    (y,) = phi.rhs
    if x == y:
        raise ValueError(f"{phi.display()} is reflexive, hence always derivable")
    closure = derivation_closure(premises, RuleSet.CR, [phi.variables])
    if phi in closure:
        raise ValueError(f"{phi.display()} is derivable; no counterexample exists")

    contexts = ContextSet.from_sets(
        [fd.variables for fd in premises] + [phi.variables]
    )
    variables = sorted(contexts.variables)
    adjacency: Dict[str, Set[str]] = {v: set() for v in variables}
    for fd in premises:
        if fd.is_unary:
            (u,) = fd.lhs
            (v,) = fd.rhs
            adjacency[u].add(v)
    reached: Set[str] = set()
    frontier = sorted(adjacency[x])
    reached.update(frontier)
    while frontier:
        fresh = []
        for a in frontier:
            for b in sorted(adjacency[a]):
                if b not in reached:
                    reached.add(b)
                    fresh.append(b)
        frontier = fresh

    if y not in reached:
        closed = {x} | reached
        row_zero = Assignment({v: "0" for v in variables})
        row_split = Assignment({v: "0" if v in closed else "1" for v in variables})
        if kind is MonoidKind.B:
            total = KRelation.boolean(variables, [row_zero, row_split])
        else:
            one = MonoidValue.one(kind)
            total = KRelation(variables, kind, {row_zero: one, row_split: one})
        family = ContextualFamily([total.marginalise(c) for c in contexts])
    else:
        small = MonoidValue.one(kind)
        big = small + small if kind is not MonoidKind.B else small
        relations = []
        for c in contexts:
            if c == phi.variables:
                rows = [
                    Assignment({x: a, y: b})
                    for a in ("0", "1")
                    for b in ("0", "1")
                ]
                value = small
            else:
                rows = [
                    Assignment({v: "0" for v in c}),
                    Assignment({v: "1" for v in c}),
                ]
                value = big
            if kind is MonoidKind.B:
                relations.append(KRelation.boolean(c, rows))
            else:
                relations.append(KRelation(c, kind, {r: value for r in rows}))
        family = ContextualFamily(relations)

    for fd in premises:
        if not family.satisfies(fd):
            raise AssertionError(f"construction violates premise {fd.display()}")
    if family.satisfies(phi):
        raise AssertionError("construction fails to violate the goal")
    return family


@dataclass(frozen=True)
class EntailmentVerdict:
    """Outcome of the bounded semantic search.  ``conclusive`` is True
    when the bounds are known sufficient (the unary/binary fragment with
    domain size >= 2 and at least four rows per context) or when a
    concrete counterexample was found."""

    holds: bool
    counterexample: Optional[ContextualFamily]
    conclusive: bool


def _rows_satisfy(
    rows: Iterable[Tuple[str, ...]], positions: Dict[str, int], fd: FD
) -> bool:
    lhs = [positions[v] for v in sorted(fd.lhs)]
    rhs = [positions[v] for v in sorted(fd.rhs)]
    seen: Dict[Tuple[str, ...], Tuple[str, ...]] = {}
    for row in rows:
        left = tuple(row[i] for i in lhs)
        right = tuple(row[i] for i in rhs)
        prior = seen.get(left)
        if prior is None:
            seen[left] = right
        elif prior != right:
            return False
    return True


def _context_candidates(
    context: FrozenSet[str],
    sigma: Sequence[FD],
    phi: Optional[FD],
    domain: Sequence[str],
    max_rows: int,
) -> Tuple[Tuple[str, ...], List[FrozenSet[Tuple[str, ...]]]]:
    """All admissible supports for one context: nonempty, within the row
    budget, satisfying the premises that fit the context, and violating
    the goal when the goal fits."""
    vs = tuple(sorted(context))
    positions = {v: i for i, v in enumerate(vs)}
    all_rows = sorted(itertools.product(domain, repeat=len(vs)))
    relevant = [fd for fd in sigma if fd.variables <= context]
    check_phi = phi is not None and phi.variables <= context
    out: List[FrozenSet[Tuple[str, ...]]] = []
    for size in range(1, min(max_rows, len(all_rows)) + 1):
        for combo in itertools.combinations(all_rows, size):
            if any(not _rows_satisfy(combo, positions, fd) for fd in relevant):
                continue
            if check_phi and _rows_satisfy(combo, positions, phi):
                continue
            out.append(frozenset(combo))
    return vs, out


def _family_from_choice(
    contexts: Sequence[FrozenSet[str]],
    vs_list: Sequence[Tuple[str, ...]],
    chosen: Sequence[FrozenSet[Tuple[str, ...]]],
) -> ContextualFamily:
    relations = []
    for context, vs, rows in zip(contexts, vs_list, chosen):
        assignments = [Assignment(zip(vs, row)) for row in sorted(rows)]
        relations.append(KRelation.boolean(context, assignments))
    return ContextualFamily(relations)


def _backtrack_family(
    contexts: Sequence[FrozenSet[str]],
    sigma: Sequence[FD],
    phi: Optional[FD],
    domain: Sequence[str],
    max_rows: int,
    rng=None,
) -> Optional[ContextualFamily]:
    """Depth-first search over per-context supports with pairwise
    agreement pruning.  ``phi`` (when given) must be violated wherever
    its variables fit.  A supplied random generator shuffles candidate
    order, turning the search into a sampler."""
    vs_list: List[Tuple[str, ...]] = []
    candidate_lists: List[List[FrozenSet[Tuple[str, ...]]]] = []
    for c in contexts:
        vs, cands = _context_candidates(c, sigma, phi, domain, max_rows)
        if not cands:
            return None
        if rng is not None:
            cands = list(cands)
            rng.shuffle(cands)
        vs_list.append(vs)
        candidate_lists.append(cands)

    overlaps: List[List[Tuple[int, Tuple[int, ...], Tuple[int, ...]]]] = []
    for i, ci in enumerate(contexts):
        cell = []
        for j in range(i):
            shared = sorted(ci & contexts[j])
            mine = tuple(vs_list[i].index(v) for v in shared)
            theirs = tuple(vs_list[j].index(v) for v in shared)
            cell.append((j, mine, theirs))
        overlaps.append(cell)

    def restrict(rows: FrozenSet[Tuple[str, ...]], idx: Tuple[int, ...]) -> FrozenSet:
        return frozenset(tuple(row[i] for i in idx) for row in rows)

    chosen: List[FrozenSet[Tuple[str, ...]]] = []

    def walk(depth: int) -> bool:
        if depth == len(contexts):
            return True
        for cand in candidate_lists[depth]:
            ok = True
            for j, mine, theirs in overlaps[depth]:
                if restrict(cand, mine) != restrict(chosen[j], theirs):
                    ok = False
                    break
            if ok:
                chosen.append(cand)
                if walk(depth + 1):
                    return True
                chosen.pop()
        return False

    if not walk(0):
        return None
    return _family_from_choice(contexts, vs_list, chosen)


def _profile_family(
    contexts: Sequence[FrozenSet[str]],
    sigma: Sequence[FD],
    phi: FD,
    domain: Sequence[str],
    max_rows: int,
) -> Optional[ContextualFamily]:
    """Counterexample search specialised to contexts of at most two
    variables.  There, pairwise agreement only constrains each variable's
    unary marginal, so fixing a per-variable value-set profile decouples
    the contexts entirely and the search is a product scan."""
    variables = sorted({v for c in contexts for v in c})
    profiles = [
        tuple(combo)
        for size in range(1, len(domain) + 1)
        for combo in itertools.combinations(domain, size)
    ]
    cover = [c for c in contexts if phi.variables <= c]
    assert len(cover) == 1

    tables = []
    for c in contexts:
        vs = tuple(sorted(c))
        positions = {v: i for i, v in enumerate(vs)}
        relevant = [fd for fd in sigma if fd.variables <= c]
        need_violation = c == cover[0]
        table: Dict[Tuple[int, ...], FrozenSet[Tuple[str, ...]]] = {}
        if len(vs) == 1:
            for pi, profile in enumerate(profiles):
                rows = frozenset((val,) for val in profile)
                if len(rows) > max_rows:
                    continue
                if any(not _rows_satisfy(rows, positions, fd) for fd in relevant):
                    continue
                if need_violation and _rows_satisfy(rows, positions, phi):
                    continue
                table[(pi,)] = rows
        else:
            for pu, mu in enumerate(profiles):
                for pv, mv in enumerate(profiles):
                    best = None
                    for size in range(1, max_rows + 1):
                        for combo in itertools.combinations(
                            sorted(itertools.product(mu, mv)), size
                        ):
                            if frozenset(r[0] for r in combo) != frozenset(mu):
                                continue
                            if frozenset(r[1] for r in combo) != frozenset(mv):
                                continue
                            rows = frozenset(combo)
                            if any(
                                not _rows_satisfy(rows, positions, fd)
                                for fd in relevant
                            ):
                                continue
                            if need_violation and _rows_satisfy(rows, positions, phi):
                                continue
                            best = rows
                            break
                        if best is not None:
                            break
                    if best is not None:
                        table[(pu, pv)] = best
        tables.append((vs, table))

    index_of = {v: i for i, v in enumerate(variables)}
    keys = []
    for c, (vs, _) in zip(contexts, tables):
        keys.append(tuple(index_of[v] for v in vs))
    for assignment in itertools.product(range(len(profiles)), repeat=len(variables)):
        chosen = []
        ok = True
        for (vs, table), key in zip(tables, keys):
            cell = table.get(tuple(assignment[i] for i in key))
            if cell is None:
                ok = False
                break
            chosen.append(cell)
        if ok:
            return _family_from_choice(contexts, [t[0] for t in tables], chosen)
    return None


def semantic_entails_oracle(
    sigma: Iterable[FD],
    phi: FD,
    kind: MonoidKind = MonoidKind.B,
    domain_size: int = 2,
    max_rows: int = 4,
) -> EntailmentVerdict:
    """Bounded exhaustive search for a counterexample family.

    Enumerates locally consistent B-families over the contexts named by
    the premises and the goal, with the given domain size and per-context
    row budget.  In the unary/binary fragment the default bounds are
    sufficient, so "no counterexample" is conclusive there; elsewhere the
    verdict is flagged bounded-only.
    """
    if kind is not MonoidKind.B:
        raise ValueError("the oracle enumerates B-families")
    if domain_size < 1 or max_rows < 1:
        raise ValueError("domain size and row budget must be positive")
    premises = sorted(set(sigma), key=lambda f: f.sort_key)
    fragment = phi.is_unary and all(
        fd.is_unary or (fd.is_cd and len(fd.lhs) <= 2) for fd in premises
    )
    conclusive = fragment and domain_size >= 2 and max_rows >= 4
    if phi.rhs <= phi.lhs:
        return EntailmentVerdict(True, None, True)
    contexts = list(
        ContextSet.from_sets([fd.variables for fd in premises] + [phi.variables])
    )
    domain = [str(i) for i in range(domain_size)]
    variables = {v for c in contexts for v in c}
    binary = all(len(c) <= 2 for c in contexts)
    profile_space = (2 ** domain_size - 1) ** len(variables)
    if binary and profile_space <= 300_000:
        counterexample = _profile_family(contexts, premises, phi, domain, max_rows)
    else:
        counterexample = _backtrack_family(contexts, premises, phi, domain, max_rows)
    if counterexample is not None:
        return EntailmentVerdict(False, counterexample, True)
    return EntailmentVerdict(True, None, conclusive)


def random_family_satisfying(
    sigma: Iterable[FD],
    rng,
    domain_size: int = 2,
    max_rows: int = 4,
    extra_context_sets: Iterable[FrozenSet[str]] = (),
) -> Optional[ContextualFamily]:
    """A pseudo-random locally consistent B-family over the premises'
    contexts (plus any extra sets) satisfying every premise, or None when
    even the bounded search space holds no such family."""
    premises = sorted(set(sigma), key=lambda f: f.sort_key)
    sets = [fd.variables for fd in premises] + [frozenset(s) for s in extra_context_sets]
    contexts = list(ContextSet.from_sets(sets))
    domain = [str(i) for i in range(domain_size)]
    return _backtrack_family(contexts, premises, None, domain, max_rows, rng=rng)
