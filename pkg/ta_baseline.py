# ta_baseline.py
"""
Tidén-Arnborg unification modulo one-sided distributivity.

Rules, applied to a standard-form system:
  (a) U = V with U occurring elsewhere: replace U by V
  (b) U = V*W, U = X*Y  ->  U = V*W, V = X, W = Y
  (c) the same for sums
  (d) U = V*W, U = X+Y  ->  U = V*W, W = W1+W2, X = V*W1, Y = V*W2
Rule (d) only fires when (a)-(c) cannot; one (d) plus the (a)-(c) closure
after it is a sum transformation. Cycles in the dependency graph or the sum
propagation graph mean the system has no (finite) unifier.

This is the reference decider and the exponential baseline of the benchmarks.
"""
import logging
from collections import deque
from typing import Optional

import networkx as nx

from config import get_settings
from errors import InvariantViolation, StandardFormError
from results import FailureReason, Outcome, RunStats, Verdict
from terms import Equation, FreshSupply, StandardSystem, plus, times, var
from tools import find_cycle, graph_cycle, partition

logger = logging.getLogger(__name__)

DepGraph = nx.MultiDiGraph
PropGraph = nx.DiGraph


def build_dep_graph(s: StandardSystem) -> DepGraph:
    """D(S): one l+/r+ pair per sum, one l*/r* pair per product."""
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(s.variables)
    for eq in s.equations:
        if eq.kind == "sum":
            graph.add_edge(eq.lhs, eq.rhs.left.name, label="l+")
            graph.add_edge(eq.lhs, eq.rhs.right.name, label="r+")
        elif eq.kind == "product":
            graph.add_edge(eq.lhs, eq.rhs.left.name, label="l*")
            graph.add_edge(eq.lhs, eq.rhs.right.name, label="r*")
    return graph


def build_prop_graph(d: DepGraph) -> PropGraph:
    """P(S): classes of the r*-closure, with an edge wherever l+/r+ crosses into a class."""
    links = [(u, v) for u, v, label in d.edges(data="label") if label == "r*"]
    rep = partition(d.nodes, links)
    members: dict = {}
    for node, root in rep.items():
        members.setdefault(root, set()).add(node)
    classes = {root: frozenset(group) for root, group in members.items()}
    graph = nx.DiGraph()
    graph.add_nodes_from(classes.values())
    for u, v, label in d.edges(data="label"):
        if label in ("l+", "r+"):
            graph.add_edge(classes[rep[u]], classes[rep[v]])
    return graph


def has_cycle(graph) -> bool:
    return graph_cycle(graph) is not None


class _Baseline:
    """Mutable run state: union-find over variables plus sum/product lists per representative."""

    def __init__(self, s: StandardSystem, stats: RunStats, budget: int):
        self.stats = stats
        self.budget = budget
        self.fresh = FreshSupply(s.variables)
        self.rank = {name: i for i, name in enumerate(s.variables)}
        self.parent = {name: name for name in s.variables}
        self.sums: dict[str, list[tuple[str, str]]] = {}
        self.prods: dict[str, list[tuple[str, str]]] = {}
        self.queue: deque[str] = deque()
        self.mixed: set[str] = set()
        self.check = get_settings().check_invariants
        for eq in s.equations:
            if eq.kind == "var":
                self.merge(eq.lhs, eq.rhs.name, eq)
            elif eq.kind == "sum":
                self._add(self.sums, eq.lhs, (eq.rhs.left.name, eq.rhs.right.name))
            elif eq.kind == "product":
                self._add(self.prods, eq.lhs, (eq.rhs.left.name, eq.rhs.right.name))
            else:
                raise StandardFormError(f"'{eq}' is not a baseline equation")

    def find(self, name: str) -> str:
        root = name
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[name] != root:
            self.parent[name], name = root, self.parent[name]
        return root

    def _touch(self, node: str):
        if len(self.sums.get(node, ())) > 1 or len(self.prods.get(node, ())) > 1:
            self.queue.append(node)
        if self.sums.get(node) and self.prods.get(node):
            self.mixed.add(node)
        else:
            self.mixed.discard(node)

    def _add(self, table: dict, lhs: str, pair: tuple[str, str]):
        node = self.find(lhs)
        table.setdefault(node, []).append(pair)
        self._touch(node)

    def _spend(self):
        if self.stats.total_rules > self.budget:
            raise _BudgetSpent

    def merge(self, u: str, v: str, *why) -> None:
        """Rule (a): the younger representative is replaced by the older one."""
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return
        survivor, loser = (ru, rv) if self.rank[ru] < self.rank[rv] else (rv, ru)
        self.parent[loser] = survivor
        self.stats.bump("a", f"{loser} = {survivor}", *why)
        for table in (self.sums, self.prods):
            moved = table.pop(loser, None)
            if moved:
                table.setdefault(survivor, []).extend(moved)
        self.mixed.discard(loser)
        self._touch(survivor)
        self._spend()

    def cancel(self) -> None:
        """Exhaust rules (b) and (c)."""
        while self.queue:
            node = self.find(self.queue.popleft())
            for rule, table in (("b", self.prods), ("c", self.sums)):
                while len(table.get(node, ())) > 1:
                    (l1, r1), (l2, r2) = table[node][0], table[node].pop()
                    self.stats.bump(rule, node)
                    self._spend()
                    self.merge(l1, l2)
                    self.merge(r1, r2)
                    node = self.find(node)
            self._touch(node)

    def split(self) -> bool:
        """Rule (d) at the oldest variable defined both as a product and a sum."""
        if not self.mixed:
            return False
        if self.check:
            busy = [n for n in set(self.sums) | set(self.prods)
                    if len(self.sums.get(n, ())) > 1 or len(self.prods.get(n, ())) > 1]
            if busy:
                raise InvariantViolation(f"rule (d) attempted while (b)/(c) apply at {sorted(busy)}")
        node = min(self.mixed, key=self.rank.__getitem__)
        v, w = self.prods[node][0]
        x, y = self.sums[node].pop(0)
        if not self.sums[node]:
            del self.sums[node]
        w1, w2 = self.fresh(), self.fresh()
        for name in (w1, w2):
            self.parent[name] = name
            self.rank[name] = len(self.rank)
        self.stats.bump("d", f"{node} = {v} * {w}", f"{node} = {x} + {y}")
        self.stats.fresh_variables += 2
        self.stats.sum_transformations += 1
        self._touch(node)
        self._add(self.sums, w, (w1, w2))
        self._add(self.prods, x, (v, w1))
        self._add(self.prods, y, (v, w2))
        self._spend()
        return True

    def cycle(self) -> Optional[tuple[FailureReason, list]]:
        successors: dict[str, list[str]] = {}
        links = []
        for table in (self.sums, self.prods):
            for node, pairs in table.items():
                for left, right in pairs:
                    left, right = self.find(left), self.find(right)
                    successors.setdefault(node, []).extend((left, right))
                    if table is self.prods:
                        links.append((node, right))
        witness = find_cycle(successors)
        if witness is not None:
            return FailureReason.DEPENDENCY_CYCLE, witness
        nodes = {n for n in self.parent if self.parent[n] == n}
        rep = partition(nodes, links)
        classes: dict[str, set[str]] = {}
        for node, pairs in self.sums.items():
            for pair in pairs:
                for child in pair:
                    classes.setdefault(rep[node], set()).add(rep[self.find(child)])
        witness = find_cycle(classes)
        if witness is not None:
            return FailureReason.PROPAGATION_CYCLE, witness
        return None

    def solved(self, s: StandardSystem) -> StandardSystem:
        equations = []
        for name in self.parent:
            root = self.find(name)
            if root != name:
                equations.append(Equation(name, var(root)))
        for table, build in ((self.sums, plus), (self.prods, times)):
            for node, pairs in table.items():
                for left, right in pairs:
                    equations.append(Equation(node, build(var(self.find(left)), var(self.find(right)))))
        return StandardSystem(tuple(equations), s.originals, s.fresh + tuple(self.fresh.created))


class _BudgetSpent(Exception):
    pass


def ta_unify(s: StandardSystem, budget: Optional[int] = None, *, trace: Optional[bool] = None) -> Outcome:
    """
    Decides unifiability of a symmetric standard-form system.

    Args:
        s: the system
        budget: rule-application limit (defaults to the configured baseline budget)
        trace: record one trace entry per rule application

    Returns:
        Outcome: UNIFIABLE with the dag-solved form, NOT_UNIFIABLE with a reason
        and a cycle witness, or BUDGET_EXCEEDED.
    """
    if s.asymmetric:
        raise StandardFormError("the baseline takes symmetric systems; use symmetric_erasure first")
    settings = get_settings()
    budget = settings.ta_budget if budget is None else budget
    stats = RunStats(algorithm="ta", splitting_rules=["d"]).enable_trace(settings.trace if trace is None else trace)

    try:
        run = _Baseline(s, stats, budget)
        run.cancel()
        failure = run.cycle()
        while failure is None and run.split():
            run.cancel()
            failure = run.cycle()
    except _BudgetSpent:
        logger.warning("baseline budget of %d rule applications exhausted", budget)
        return Outcome(Verdict.BUDGET_EXCEEDED, stats.stop_clock())

    stats.stop_clock()
    if failure is not None:
        reason, witness = failure
        logger.info("baseline: %s through %s", reason.value, witness)
        return Outcome(Verdict.NOT_UNIFIABLE, stats, reason=reason, witness=witness)
    logger.info("baseline: unifiable after %d sum transformations", stats.sum_transformations)
    return Outcome(Verdict.UNIFIABLE, stats, solved=run.solved(s))
