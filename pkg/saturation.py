# saturation.py
"""
Saturation of the path-labelled dependency graph (LD) and its propagation
graph (LP).

Nodes are variables. A product X = A * Y is a lateral edge X -[A]-> Y, and a
lateral edge X -[pi]-> Y with a longer label stands for X = a1*(a2*(...*Y)).
Sums stay as downward pairs on their node. Labels are opaque to this module;
a LabelAlgebra supplies equality, prefix tests, suffixes and concatenation,
so the same engine runs over SLP labels (general case) and over plain
lengths (single homomorphism).

The engine keeps S as the original equations plus the variable identities
derived so far. When two label variables are identified the graphs are
rebuilt from S (fresh variables vanish) and saturation starts over.
"""
import heapq
import logging
from abc import ABC, abstractmethod
from collections import deque
from typing import Hashable, NamedTuple, Optional

import networkx as nx

import slp
from config import get_settings
from errors import InvariantViolation, NotDagSolvedError, StandardFormError
from results import FailureReason, Outcome, RunStats, Verdict
from slp import Slp
from terms import Equation, FreshSupply, Path, StandardSystem, plus, times, var
from tools import find_cycle, ordered_classes, partition

logger = logging.getLogger(__name__)


class LabelAlgebra(ABC):
    """Operations the engine needs on lateral path labels."""

    @abstractmethod
    def atom(self, name: str) -> Hashable: ...

    @abstractmethod
    def length(self, label) -> int: ...

    @abstractmethod
    def equal(self, a, b) -> bool: ...

    @abstractmethod
    def first_mismatch(self, a, b) -> Optional[tuple[int, str, str]]:
        """None when the shorter label is a prefix of the longer one."""

    @abstractmethod
    def suffix(self, label, keep: int): ...

    @abstractmethod
    def concat(self, a, b): ...

    @abstractmethod
    def terminals(self, label) -> frozenset: ...

    @abstractmethod
    def to_slp(self, label) -> Slp: ...

    def observe(self, label, stats: RunStats) -> None:
        """Record size statistics of a newly built label."""


class Edge(NamedTuple):
    src: str
    label: Hashable
    dst: str

    def __str__(self) -> str:
        return f"{self.src} -[{self.label}]-> {self.dst}"


# engine rule keys; each decider maps them onto its own numbering
RULE_KEYS = ("zero", "sum", "target", "source", "prefix", "mismatch", "shorter", "concat", "propagate", "fresh", "cycle")


class BudgetSpent(Exception):
    pass


class SaturationState:
    """LD graph of one system plus the identities derived so far.

    Args:
        s: symmetric standard-form system (no lateral paths)
        algebra: label operations
        rules: engine rule key -> rule name used in stats and traces
        stats: counters to update
        budget: rule-application limit
        prefix_in_cleanup: also split prefixes during cleanup (single homomorphism)
    """

    def __init__(self, s: StandardSystem, algebra: LabelAlgebra, rules: dict[str, str], stats: RunStats,
                 budget: int, *, prefix_in_cleanup: bool = False):
        if s.asymmetric:
            raise StandardFormError("saturation takes symmetric systems")
        for eq in s.equations:
            if eq.kind == "path":
                raise StandardFormError(f"'{eq}' is already a lateral path; give the system in standard form")
        self.s = s
        self.algebra = algebra
        self.rules = rules
        self.stats = stats
        self.budget = budget
        self.prefix_in_cleanup = prefix_in_cleanup
        self.check = get_settings().check_invariants
        self.fresh = FreshSupply(s.variables)
        self.alias: dict[str, str] = {}
        self.epoch = 0
        self._label_count: Optional[int] = None
        self.build()

    # ---------- step 1: graphs from S ----------

    def build(self) -> None:
        """(Re)build the LD graph from the original equations under the current aliases."""
        self.epoch += 1
        self.parent: dict[str, str] = {}
        self.rank: dict[str, int] = {}
        self.nodes: set[str] = set()
        self.out: dict[str, set[Edge]] = {}
        self.inn: dict[str, set[Edge]] = {}
        self.sums: dict[str, list[tuple[str, str]]] = {}
        self.restart_pending = False
        self.dirty: deque[str] = deque()
        self._class_count: Optional[int] = None
        for name in self.s.variables:
            self._add_node(name)
        for name, root in self.alias.items():
            self.parent[name] = root
            self.nodes.discard(name)
        self.labels: set[str] = {
            self.find(eq.rhs.left.name) for eq in self.s.equations if eq.kind == "product"
        }
        if self.epoch == 1:
            self.stats.label_vars_initial = len(self.labels)
        self._check_label_count()

        for eq in self.s.equations:
            if eq.kind == "var":
                self.merge(eq.lhs, eq.rhs.name, "zero", eq)
            elif eq.kind == "sum":
                self.sums.setdefault(self.find(eq.lhs), []).append((eq.rhs.left.name, eq.rhs.right.name))
            else:
                label = self.algebra.atom(self.find(eq.rhs.left.name))
                self.add_edge(self.find(eq.lhs), label, self.find(eq.rhs.right.name))
        logger.debug("epoch %d: %d nodes, %d label variables", self.epoch, len(self.nodes), len(self.labels))

    def _add_node(self, name: str) -> None:
        self.parent[name] = name
        self.rank[name] = len(self.rank)
        self.nodes.add(name)

    def _check_label_count(self) -> None:
        if self.check and self._label_count is not None and len(self.labels) > self._label_count:
            raise InvariantViolation(f"label variables grew from {self._label_count} to {len(self.labels)}")
        self._label_count = len(self.labels)

    def restart(self) -> None:
        """Step 5: keep the identities between original variables and rebuild."""
        self.alias = {name: self.find(name) for name in self.s.originals if self.find(name) != name}
        self.stats.restarts += 1
        if self.check and self.stats.restarts > self.stats.label_vars_initial:
            raise InvariantViolation(f"{self.stats.restarts} restarts with {self.stats.label_vars_initial} label variables")
        logger.info("label variables identified, restart %d", self.stats.restarts)
        self.build()

    # ---------- graph primitives ----------

    def find(self, name: str) -> str:
        root = name
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[name] != root:
            self.parent[name], name = root, self.parent[name]
        return root

    def add_edge(self, src: str, label, dst: str) -> Edge:
        edge = Edge(src, label, dst)
        self.out.setdefault(src, set()).add(edge)
        self.inn.setdefault(dst, set()).add(edge)
        return edge

    def remove_edge(self, edge: Edge) -> None:
        self.out[edge.src].discard(edge)
        self.inn[edge.dst].discard(edge)

    def out_edges(self, node: str) -> set[Edge]:
        return self.out.get(node, set())

    def in_edges(self, node: str) -> set[Edge]:
        return self.inn.get(node, set())

    def sum_of(self, node: str) -> list[tuple[str, str]]:
        return [(self.find(a), self.find(b)) for a, b in self.sums.get(node, ())]

    def bump(self, key: str, *items) -> None:
        self.stats.bump(self.rules[key], *items)
        if self.stats.total_rules > self.budget:
            raise BudgetSpent

    def key(self, name: str) -> int:
        return self.rank[name]

    def merge(self, u: str, v: str, key: str = "zero", *why) -> Optional[str]:
        """Rule (0): identify u and v; a label variable survives over a non-label one.

        Returns the survivor, or None when u and v were already identified.
        Identifying two label variables flags a restart.
        """
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return None
        lu, lv = ru in self.labels, rv in self.labels
        if lu != lv:
            survivor, loser = (ru, rv) if lu else (rv, ru)
        else:
            survivor, loser = (ru, rv) if self.rank[ru] < self.rank[rv] else (rv, ru)
        if lu and lv:
            self.labels.discard(loser)
            self.restart_pending = True
        self.parent[loser] = survivor
        self.nodes.discard(loser)
        moved = self.out.pop(loser, set()) | self.inn.pop(loser, set())
        for edge in moved:
            self.out.get(edge.src, set()).discard(edge)
            self.inn.get(edge.dst, set()).discard(edge)
        for edge in moved:
            src = survivor if edge.src == loser else edge.src
            dst = survivor if edge.dst == loser else edge.dst
            self.add_edge(src, edge.label, dst)
        pairs = self.sums.pop(loser, None)
        if pairs:
            self.sums.setdefault(survivor, []).extend(pairs)
        if key != "zero":
            self.bump(key, *why)
        self.bump("zero", f"{loser} = {survivor}")
        self.dirty.append(survivor)
        return survivor

    # ---------- step 2: cancellation ----------

    def _equal_pair(self, edges, end) -> Optional[tuple[Edge, Edge]]:
        """Two edges with equal labels, distinct at `end` (dst for sources, src for targets)."""
        by_length: dict[int, list[Edge]] = {}
        for edge in sorted(edges, key=self._edge_order):
            by_length.setdefault(self.algebra.length(edge.label), []).append(edge)
        for group in by_length.values():
            for i, first in enumerate(group):
                for second in group[i + 1:]:
                    if end is not None and getattr(first, end) == getattr(second, end):
                        continue
                    if self.algebra.equal(first.label, second.label):
                        return first, second
        return None

    def _edge_order(self, edge: Edge):
        return self.algebra.length(edge.label), self.rank[edge.src], self.rank[edge.dst], str(edge.label)

    def tidy_node(self, node: str) -> None:
        """Exhaust rules (i), (ii), (iii) (and (iv) when configured) at one node."""
        while not self.restart_pending and node in self.nodes:
            pairs = self.sums.get(node)
            if pairs and len(pairs) > 1:
                (a, b), (c, d) = pairs[0], pairs.pop()
                self.bump("sum", f"{node} = {a} + {b}", f"{node} = {c} + {d}")
                self.merge(a, c)
                self.merge(b, d)
                node = self.find(node)
                continue
            pair = self._equal_pair(self.out_edges(node), None)
            if pair is not None:
                first, second = pair
                self.remove_edge(second)
                if first.dst != second.dst:
                    self.merge(first.dst, second.dst, "source", first, second)
                else:
                    self.bump("source", first, second)
                node = self.find(node)
                continue
            pair = self._equal_pair(self.in_edges(node), "src")
            if pair is not None:
                first, second = pair
                self.remove_edge(second)
                self.merge(first.src, second.src, "target", first, second)
                node = self.find(node)
                continue
            if self.prefix_in_cleanup and len(self.out_edges(node)) > 1:
                self.split_node(node)
                node = self.find(node)
                continue
            return

    def tidy(self) -> None:
        """Step 2 over the whole graph."""
        self.dirty: deque[str] = deque(sorted(self.nodes, key=self.key))
        while self.dirty and not self.restart_pending:
            node = self.find(self.dirty.popleft())
            self.tidy_node(node)

    # ---------- step 3: cycles ----------

    def lateral_links(self):
        for node in self.nodes:
            for edge in self.out_edges(node):
                yield edge.src, edge.dst

    def cycle_check(self) -> Optional[tuple[FailureReason, list]]:
        """Rule (ix): relation edges are generated here and dropped afterwards."""
        successors: dict[str, list[str]] = {}
        for node in self.nodes:
            targets = successors.setdefault(node, [])
            for edge in self.out_edges(node):
                targets.append(edge.dst)
                targets.extend(sorted(self.algebra.terminals(edge.label)))
            for pair in self.sum_of(node):
                targets.extend(pair)
        witness = find_cycle(successors)
        if witness is not None:
            self.bump("cycle", *witness)
            return FailureReason.DEPENDENCY_CYCLE, witness
        rep = self.classes()
        lp: dict[str, set[str]] = {}
        for node, pairs in self.sums.items():
            for pair in pairs:
                for child in pair:
                    lp.setdefault(rep[node], set()).add(rep[self.find(child)])
        witness = find_cycle(lp)
        if witness is not None:
            self.bump("cycle", *witness)
            return FailureReason.PROPAGATION_CYCLE, witness
        return None

    def classes(self) -> dict[str, str]:
        """node -> oldest member of its class (weak components of the lateral edges)."""
        return partition(self.nodes, self.lateral_links(), key=self.key)

    def ld_graph(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.nodes)
        for node in self.nodes:
            for edge in self.out_edges(node):
                graph.add_edge(edge.src, edge.dst, kind="lateral", label=edge.label)
                for name in sorted(self.algebra.terminals(edge.label)):
                    graph.add_edge(edge.src, name, kind="relation")
            for child in {c for pair in self.sum_of(node) for c in pair}:
                graph.add_edge(node, child, kind="downward")
        return graph

    def lp_graph(self) -> nx.DiGraph:
        rep = self.classes()
        members: dict[str, set[str]] = {}
        for node, root in rep.items():
            members.setdefault(root, set()).add(node)
        frozen = {root: frozenset(group) for root, group in members.items()}
        graph = nx.DiGraph()
        graph.add_nodes_from(frozen.values())
        for node in self.nodes:
            for pair in self.sum_of(node):
                for child in pair:
                    graph.add_edge(frozen[rep[node]], frozen[rep[child]])
        return graph

    # ---------- step 4: class processing ----------

    def locally_solved(self, node: str) -> bool:
        out = self.out_edges(node)
        pairs = self.sums.get(node, ())
        return len(out) <= 1 and len(pairs) <= 1 and not (out and pairs)

    def is_dag_solved(self) -> bool:
        return all(self.locally_solved(node) for node in self.nodes)

    def select_class(self) -> Optional[list[str]]:
        """First class in LP's topological order (oldest member breaks ties) that still needs work."""
        rep = self.classes()
        count = len(set(rep.values()))
        if self.check and self._class_count is not None and count > self._class_count:
            raise InvariantViolation(f"class count grew from {self._class_count} to {count}")
        self._class_count = count
        self.stats.class_count = count
        edges = {(rep[node], rep[child]) for node in self.nodes for pair in self.sum_of(node) for child in pair}
        members: dict[str, list[str]] = {}
        for node in sorted(self.nodes, key=self.key):
            members.setdefault(rep[node], []).append(node)
        for root in ordered_classes(rep, edges, key=self.key):
            if not all(self.locally_solved(node) for node in members[root]):
                return members[root]
        return None

    def component(self, seed: str) -> list[str]:
        seed = self.find(seed)
        seen = {seed}
        queue = deque([seed])
        while queue:
            node = queue.popleft()
            for edge in self.out_edges(node) | self.in_edges(node):
                for other in (edge.src, edge.dst):
                    if other not in seen:
                        seen.add(other)
                        queue.append(other)
        return sorted(seen, key=self.key)

    def split_node(self, node: str) -> None:
        """Compare the two shortest labels leaving node and apply (iii), (iv), (v) or (vi)."""
        first, second = sorted(self.out_edges(node), key=self._edge_order)[:2]
        eta, pi = first.label, second.label
        short, long = self.algebra.length(eta), self.algebra.length(pi)
        if short == long and self.algebra.equal(eta, pi):
            self.remove_edge(second)
            if first.dst != second.dst:
                self.merge(first.dst, second.dst, "source", first, second)
            else:
                self.bump("source", first, second)
            return
        mismatch = self.algebra.first_mismatch(eta, pi)
        if mismatch is None:
            self.remove_edge(second)
            rest = self.algebra.suffix(pi, long - short)
            self.algebra.observe(rest, self.stats)
            self.add_edge(first.dst, rest, second.dst)
            self.bump("prefix", first, second)
            self.dirty.append(first.dst)
            return
        _, a, b = mismatch
        key = "mismatch" if short == long else "shorter"
        survivor = self.merge(a, b, key, first, second)
        if survivor is None or not self.restart_pending:
            raise InvariantViolation(f"mismatch between {a} and {b} did not identify two label variables")

    def process_class(self, members: list[str]) -> Optional[tuple[FailureReason, list]]:
        """(v + vi)(iv)! then (x)! then (viii)(vii)! on one class."""
        seed = members[0]
        graph = nx.DiGraph()
        graph.add_nodes_from(members)
        graph.add_edges_from((e.src, e.dst) for n in members for e in self.out_edges(n))
        order = {n: i for i, n in enumerate(nx.lexicographical_topological_sort(graph, key=self.key))}

        # source to sink
        heap = [(order[n], n) for n in members if len(self.out_edges(n)) > 1]
        heapq.heapify(heap)
        while heap and not self.restart_pending:
            _, node = heapq.heappop(heap)
            node = self.find(node)
            if node not in self.nodes or len(self.out_edges(node)) < 2:
                continue
            self.split_node(node)
            self.dirty.append(node)
            while self.dirty:
                other = self.find(self.dirty.popleft())
                if len(self.out_edges(other)) > 1:
                    heapq.heappush(heap, (order.get(other, len(order)), other))
        if self.restart_pending:
            return None

        failure = self.cycle_check()
        if failure is not None:
            return failure

        members = self.component(seed)
        sinks = [n for n in members if not self.out_edges(n)]
        if len(sinks) != 1:
            raise InvariantViolation(f"class of {seed} has sinks {sinks} after splitting")
        sink = sinks[0]

        # sink backwards
        queue = deque([sink])
        while queue:
            node = queue.popleft()
            tail = None if node == sink else next(iter(self.out_edges(node)))
            for edge in sorted(self.in_edges(node), key=self._edge_order):
                if tail is not None:
                    self.remove_edge(edge)
                    label = self.algebra.concat(edge.label, tail.label)
                    self.algebra.observe(label, self.stats)
                    self.add_edge(edge.src, label, sink)
                    self.bump("concat", edge, tail)
                queue.append(edge.src)

        created = 0
        for node in members:
            if node == sink or not self.sums.get(node):
                continue
            (path,) = self.out_edges(node)
            if not self.sums.get(sink):
                w1, w2 = self.fresh(), self.fresh()
                self._add_node(w1)
                self._add_node(w2)
                self.sums[sink] = [(w1, w2)]
                self.stats.fresh_variables += 2
                created += 1
                if self.check and created > 1:
                    raise InvariantViolation(f"class of {seed} created fresh variables twice")
                rule = "fresh"
            else:
                rule = "propagate"
            w1, w2 = self.sum_of(sink)[0]
            for u1, u2 in self.sum_of(node):
                self.add_edge(u1, path.label, w1)
                self.add_edge(u2, path.label, w2)
                self.stats.sum_transformations += 1
                self.bump(rule, path, f"{node} = {u1} + {u2}", f"{sink} = {w1} + {w2}")
                rule = "propagate"
            del self.sums[node]
        return None

    # ---------- result ----------

    def to_dag_solved(self) -> StandardSystem:
        """The final graph as a compressed dag-solved system."""
        if not self.is_dag_solved():
            bad = sorted((n for n in self.nodes if not self.locally_solved(n)), key=self.key)
            raise NotDagSolvedError(f"nodes {bad} are not solved")
        equations = []
        for name in self.rank:
            root = self.find(name)
            if root != name:
                equations.append(Equation(name, var(root)))
        longest = 0
        for node in sorted(self.nodes, key=self.key):
            for a, b in self.sum_of(node):
                equations.append(Equation(node, plus(var(a), var(b))))
            for edge in self.out_edges(node):
                label = self.algebra.to_slp(edge.label)
                longest = max(longest, label.length)
                self.stats.max_slp_size = max(self.stats.max_slp_size, slp.size(label))
                self.stats.max_slp_depth = max(self.stats.max_slp_depth, label.depth)
                if label.is_terminal:
                    equations.append(Equation(node, times(var(label.label), var(edge.dst))))
                else:
                    equations.append(Equation(node, Path(label, edge.dst)))
        self.stats.max_label_length = longest
        self.stats.class_count = len(set(self.classes().values()))
        self.stats.label_vars_final = len(self.labels)
        fresh = tuple(n for n in self.fresh.created if n in self.rank)
        return StandardSystem(tuple(equations), self.s.originals, fresh)


def saturate(state: SaturationState) -> Outcome:
    """Steps 2 to 5 until success, failure, or an exhausted budget."""
    stats = state.stats
    try:
        while True:
            if state.restart_pending:
                state.restart()
                continue
            state.tidy()
            if state.restart_pending:
                continue
            failure = state.cycle_check()
            if failure is None and state.is_dag_solved():
                break
            if failure is None:
                failure = state.process_class(state.select_class())
            if failure is not None:
                reason, witness = failure
                stats.label_vars_final = len(state.labels)
                logger.info("%s: %s through %s", stats.algorithm, reason.value, witness)
                return Outcome(Verdict.NOT_UNIFIABLE, stats.stop_clock(), reason=reason, witness=witness)
    except BudgetSpent:
        logger.warning("%s: budget of %d rule applications exhausted", stats.algorithm, state.budget)
        return Outcome(Verdict.BUDGET_EXCEEDED, stats.stop_clock())
    solved = state.to_dag_solved()
    logger.info("%s: unifiable after %d restarts", stats.algorithm, stats.restarts)
    return Outcome(Verdict.UNIFIABLE, stats.stop_clock(), solved=solved)


def run(s: StandardSystem, algebra: LabelAlgebra, rules: dict[str, str], stats: RunStats, budget: int,
        **options) -> Outcome:
    """Build the state for s and saturate it."""
    try:
        state = SaturationState(s, algebra, rules, stats, budget, **options)
    except BudgetSpent:
        logger.warning("%s: budget of %d rule applications exhausted while building", stats.algorithm, budget)
        return Outcome(Verdict.BUDGET_EXCEEDED, stats.stop_clock())
    return saturate(state)
