# terms.py
"""
Terms over {+, *} and variables, standard-form equations and systems,
substitutions, and rewriting with X*(Y+Z) -> X*Y + X*Z.

Terms are hash-consed: building the same structure twice returns the same
object, so syntactic equality is `is`, and normal forms are cached on the
node. All traversals are iterative; chains produced by long lateral paths
are far deeper than the interpreter's recursion limit.
"""
import logging
import threading
import weakref
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Iterable, Mapping, Optional, Union

import networkx as nx

import slp
from config import get_settings
from errors import MaterializationError, NotDagSolvedError, SignatureError, StandardFormError
from slp import Slp

logger = logging.getLogger(__name__)

FRESH_PREFIX = "_v"


class Op(str, Enum):
    PLUS = "+"
    TIMES = "*"


class Term:
    __slots__ = ("size", "_nf", "__weakref__")

    def __repr__(self) -> str:
        if self.size > 64:
            return f"<term of size {self.size}>"
        return format_term(self)


class Var(Term):
    __slots__ = ("name",)


class App(Term):
    __slots__ = ("op", "left", "right")


_lock = threading.Lock()
_vars: "weakref.WeakValueDictionary[str, Var]" = weakref.WeakValueDictionary()
_apps: "weakref.WeakValueDictionary[tuple, App]" = weakref.WeakValueDictionary()


def var(name: str) -> Var:
    node = _vars.get(name)
    if node is not None:
        return node
    with _lock:
        node = _vars.get(name)
        if node is None:
            node = Var()
            node.name = name
            node.size = 1
            node._nf = node
            _vars[name] = node
        return node


def app(op: Op, left: Term, right: Term) -> App:
    if not isinstance(op, Op):
        raise SignatureError(f"unknown operator {op!r}")
    if not isinstance(left, Term) or not isinstance(right, Term):
        raise SignatureError(f"operands of {op.value} must be terms")
    # the table keeps its children alive, so their ids are not reused
    key = (op, id(left), id(right))
    node = _apps.get(key)
    if node is not None:
        return node
    with _lock:
        node = _apps.get(key)
        if node is None:
            node = App()
            node.op = op
            node.left = left
            node.right = right
            node.size = 1 + left.size + right.size
            node._nf = None
            _apps[key] = node
        return node


def plus(left: Term, right: Term) -> App:
    return app(Op.PLUS, left, right)


def times(left: Term, right: Term) -> App:
    return app(Op.TIMES, left, right)


def fold(term: Term, on_var: Callable[[Var], object], on_app: Callable[[App, object, object], object]):
    """Bottom-up evaluation over the term dag, each shared node visited once."""
    memo: dict[int, object] = {}
    stack = [term]
    while stack:
        node = stack[-1]
        if id(node) in memo:
            stack.pop()
            continue
        if isinstance(node, Var):
            memo[id(node)] = on_var(node)
            stack.pop()
            continue
        pending = False
        if id(node.right) not in memo:
            stack.append(node.right)
            pending = True
        if id(node.left) not in memo:
            stack.append(node.left)
            pending = True
        if pending:
            continue
        stack.pop()
        memo[id(node)] = on_app(node, memo[id(node.left)], memo[id(node.right)])
    return memo[id(term)]


def variables(term: Term) -> set[str]:
    found: set[str] = set()
    seen: set[int] = set()
    stack = [term]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Var):
            found.add(node.name)
        else:
            stack.append(node.left)
            stack.append(node.right)
    return found


def format_term(term: Term) -> str:
    return fold(term, lambda v: v.name, lambda n, l, r: f"({l} {n.op.value} {r})")


def _mark_normal(term: Term) -> Term:
    term._nf = term
    return term


def _is_sum(term: Term) -> bool:
    return isinstance(term, App) and term.op is Op.PLUS


def _distribute(left: Term, right: Term) -> Term:
    """Normal form of left * right for normal left and a normal sum right."""
    memo: dict[int, Term] = {}
    stack = [right]
    while stack:
        node = stack[-1]
        if id(node) in memo:
            stack.pop()
            continue
        if not _is_sum(node):
            memo[id(node)] = _mark_normal(times(left, node))
            stack.pop()
            continue
        pending = False
        for child in (node.right, node.left):
            if id(child) not in memo:
                stack.append(child)
                pending = True
        if pending:
            continue
        stack.pop()
        memo[id(node)] = _mark_normal(plus(memo[id(node.left)], memo[id(node.right)]))
    return memo[id(right)]


def normalize(term: Term) -> Term:
    """Unique normal form under X*(Y+Z) -> X*Y + X*Z, computed bottom-up."""
    stack = [term]
    while stack:
        node = stack[-1]
        if node._nf is not None:
            stack.pop()
            continue
        left, right = node.left, node.right
        if left._nf is None or right._nf is None:
            if right._nf is None:
                stack.append(right)
            if left._nf is None:
                stack.append(left)
            continue
        stack.pop()
        l, r = left._nf, right._nf
        if node.op is Op.TIMES and _is_sum(r):
            node._nf = _distribute(l, r)
        else:
            node._nf = _mark_normal(app(node.op, l, r))
    return term._nf


def is_normal(term: Term) -> bool:
    return normalize(term) is term


def e_equal(t1: Term, t2: Term) -> bool:
    return normalize(t1) is normalize(t2)


@dataclass(frozen=True)
class Path:
    """Lateral path: label * tail, where the label spells a chain of left factors."""

    label: Slp
    tail: str

    def __str__(self) -> str:
        return f"[slp:{self.label}] * {self.tail}"


Rhs = Union[Var, App, Path]


@dataclass(frozen=True)
class Equation:
    """lhs = rhs in standard form.

    For asymmetric equations `term_first` records how the line was written:
    False is ``X =d t`` (the instance of t must stay irreducible), True is
    ``t =d X`` (the instance of X must).
    """

    lhs: str
    rhs: Rhs
    asymmetric: bool = False
    term_first: bool = False

    def __post_init__(self):
        rhs = self.rhs
        if isinstance(rhs, Var):
            if rhs.name == self.lhs:
                raise StandardFormError(f"trivial equation {self.lhs} = {self.lhs}")
        elif isinstance(rhs, App):
            if not isinstance(rhs.left, Var) or not isinstance(rhs.right, Var):
                raise StandardFormError(f"right-hand side of {self.lhs} is deeper than one operator")
        elif not isinstance(rhs, Path):
            raise StandardFormError(f"unsupported right-hand side {rhs!r}")
        if self.term_first and not self.asymmetric:
            raise StandardFormError("term_first only applies to asymmetric equations")

    @property
    def kind(self) -> str:
        if isinstance(self.rhs, Var):
            return "var"
        if isinstance(self.rhs, Path):
            return "path"
        return "sum" if self.rhs.op is Op.PLUS else "product"

    def rhs_variables(self) -> set[str]:
        """Variables occurring on the right; path labels contribute their terminals."""
        rhs = self.rhs
        if isinstance(rhs, Var):
            return {rhs.name}
        if isinstance(rhs, Path):
            return {rhs.tail} | set(rhs.label.terminals)
        return {rhs.left.name, rhs.right.name}

    def variables(self) -> set[str]:
        return {self.lhs} | self.rhs_variables()

    def rhs_text(self) -> str:
        rhs = self.rhs
        if isinstance(rhs, Var):
            return rhs.name
        if isinstance(rhs, Path):
            return str(rhs)
        return f"{rhs.left.name} {rhs.op.value} {rhs.right.name}"

    def erase(self) -> "Equation":
        return Equation(self.lhs, self.rhs) if self.asymmetric else self

    def __str__(self) -> str:
        if not self.asymmetric:
            return f"{self.lhs} = {self.rhs_text()}"
        if self.term_first:
            return f"{self.rhs_text()} =d {self.lhs}"
        return f"{self.lhs} =d {self.rhs_text()}"


def is_fresh_name(name: str) -> bool:
    return name.startswith(FRESH_PREFIX)


class FreshSupply:
    """Deterministic fresh names _v1, _v2, ... continuing after any already taken."""

    def __init__(self, taken: Iterable[str] = ()):
        self._next = 1
        for name in taken:
            if is_fresh_name(name) and name[len(FRESH_PREFIX):].isdigit():
                self._next = max(self._next, int(name[len(FRESH_PREFIX):]) + 1)
        self.created: list[str] = []

    def __call__(self) -> str:
        name = f"{FRESH_PREFIX}{self._next}"
        self._next += 1
        self.created.append(name)
        return name


@dataclass(frozen=True)
class StandardSystem:
    equations: tuple[Equation, ...]
    originals: tuple[str, ...] = ()
    fresh: tuple[str, ...] = ()
    asymmetric: bool = False

    def __post_init__(self):
        # ordered set semantics
        object.__setattr__(self, "equations", tuple(dict.fromkeys(self.equations)))
        registry = set(self.originals) | set(self.fresh)
        for eq in self.equations:
            missing = eq.variables() - registry
            if missing:
                raise StandardFormError(f"variables {sorted(missing)} of '{eq}' are not registered")
            if eq.asymmetric != self.asymmetric:
                raise StandardFormError(f"'{eq}' does not match the system's orientation")

    @classmethod
    def of(cls, equations: Iterable[Equation], *, asymmetric: Optional[bool] = None, extra: Iterable[str] = ()) -> "StandardSystem":
        """Build a system, registering variables in first-appearance order."""
        equations = tuple(equations)
        seen: dict[str, None] = dict.fromkeys(extra)
        for eq in equations:
            seen.setdefault(eq.lhs)
            for name in sorted(eq.rhs_variables()):
                seen.setdefault(name)
        originals = tuple(n for n in seen if not is_fresh_name(n))
        fresh = tuple(n for n in seen if is_fresh_name(n))
        if asymmetric is None:
            asymmetric = any(eq.asymmetric for eq in equations)
        return cls(equations, originals, fresh, asymmetric)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.originals + self.fresh

    @cached_property
    def label_variables(self) -> frozenset:
        labels = set()
        for eq in self.equations:
            if eq.kind == "product":
                labels.add(eq.rhs.left.name)
            elif eq.kind == "path":
                labels |= eq.rhs.label.terminals
        return frozenset(labels)

    @cached_property
    def _ranks(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.variables)}

    def rank(self, name: str) -> int:
        """Age of a variable: originals first in registry order, then fresh ones."""
        return self._ranks.get(name, len(self._ranks))

    def __len__(self) -> int:
        return len(self.equations)

    def __str__(self) -> str:
        return "\n".join(str(eq) for eq in self.equations)


def symmetric_erasure(s: StandardSystem) -> StandardSystem:
    return StandardSystem(tuple(eq.erase() for eq in s.equations), s.originals, s.fresh, False)


def is_abc_reduced(s: StandardSystem) -> bool:
    """No baseline variable-elimination or cancellation redex."""
    sums: set[str] = set()
    products: set[str] = set()
    occurrences: dict[str, int] = {}
    for eq in s.equations:
        for name in eq.variables():
            occurrences[name] = occurrences.get(name, 0) + 1
    for eq in s.equations:
        if eq.kind == "sum":
            if eq.lhs in sums:
                return False
            sums.add(eq.lhs)
        elif eq.kind == "product":
            if eq.lhs in products:
                return False
            products.add(eq.lhs)
        elif eq.kind == "var":
            if occurrences[eq.lhs] > 1 or occurrences[eq.rhs.name] > 1:
                return False
    return True


def _check_signature(term) -> Term:
    if not isinstance(term, Term):
        raise SignatureError(f"{term!r} is not a term over + and *")
    return term


def decompose(problem: Iterable[tuple[Term, Term]], *, asymmetric: bool = False) -> StandardSystem:
    """Flatten general equations s = t into standard form.

    Every non-variable subterm gets one name; shared subterms share it.
    In asymmetric mode the pairs read ``s =d t``: subterms of t get
    restricted equations, subterms of s unrestricted term-first ones.
    """
    pairs = [(_check_signature(s), _check_signature(t)) for s, t in problem]
    originals: dict[str, None] = {}
    for s, t in pairs:
        for side in (s, t):
            for name in sorted(variables(side)):
                if is_fresh_name(name):
                    raise SignatureError(f"identifier {name} uses the reserved prefix {FRESH_PREFIX}")
                originals.setdefault(name)
    fresh = FreshSupply()
    names: dict[Term, str] = {}
    flat: dict[Term, App] = {}
    restricted: set[Term] = set()
    entries: list[tuple] = []

    def mark_restricted(term: Term):
        stack = [term]
        while stack:
            node = stack.pop()
            if isinstance(node, App) and node not in restricted:
                restricted.add(node)
                stack.extend((node.left, node.right))

    def name_of(term: Term, restrict: bool, preferred: Optional[str] = None) -> str:
        if isinstance(term, Var):
            return term.name
        if restrict:
            mark_restricted(term)
        if term in names:
            if preferred is not None and names[term] != preferred:
                entries.append(("var", preferred, names[term]))
            return names[term]
        # post-order, so children are named before their parent
        stack: list[tuple[Term, bool]] = [(term, False)]
        while stack:
            node, ready = stack.pop()
            if not isinstance(node, App) or node in names:
                continue
            if not ready:
                stack.append((node, True))
                stack.append((node.right, False))
                stack.append((node.left, False))
                continue
            left = names.get(node.left, getattr(node.left, "name", None))
            right = names.get(node.right, getattr(node.right, "name", None))
            label = preferred if node is term and preferred is not None else fresh()
            names[node] = label
            flat[node] = app(node.op, var(left), var(right))
            entries.append(("def", label, node))
        return names[term]

    for s, t in pairs:
        if s is t:
            continue
        if isinstance(s, Var) and isinstance(t, Var):
            entries.append(("var", s.name, t.name))
        elif isinstance(s, Var):
            name_of(t, asymmetric, preferred=s.name)
        elif isinstance(t, Var):
            name_of(s, False, preferred=t.name)
        else:
            name_of(t, asymmetric, preferred=name_of(s, False))

    equations = []
    for kind, name, payload in entries:
        if kind == "var":
            equations.append(Equation(name, var(payload), asymmetric))
        elif asymmetric:
            equations.append(Equation(name, flat[payload], True, term_first=payload not in restricted))
        else:
            equations.append(Equation(name, flat[payload]))
    logger.debug("decomposed %d equations into %d, %d fresh", len(pairs), len(equations), len(fresh.created))
    return StandardSystem(tuple(equations), tuple(originals), tuple(fresh.created), asymmetric)


def _solved_graph(s: StandardSystem) -> nx.DiGraph:
    graph = nx.DiGraph()
    for eq in s.equations:
        graph.add_node(eq.lhs)
        for name in eq.rhs_variables():
            graph.add_edge(eq.lhs, name)
    return graph


def is_dag_solved(s: StandardSystem) -> bool:
    lhs = [eq.lhs for eq in s.equations]
    if len(lhs) != len(set(lhs)):
        return False
    return nx.is_directed_acyclic_graph(_solved_graph(s))


def _chain(symbols: Iterable[Term], tail: Term) -> Term:
    result = tail
    for symbol in reversed(list(symbols)):
        result = times(symbol, result)
    return result


@dataclass(frozen=True)
class Substitution:
    """Finite map from variables to terms.

    `lateral` keeps bindings X -> label * tail compressed; bindings may then
    mention laterally bound variables until materialize() expands them.
    """

    bindings: Mapping[str, Term] = field(default_factory=dict)
    lateral: Mapping[str, Path] = field(default_factory=dict)

    @property
    def domain(self) -> set[str]:
        return set(self.bindings) | set(self.lateral)

    @property
    def is_compressed(self) -> bool:
        return bool(self.lateral)

    def restrict(self, names: Iterable[str]) -> "Substitution":
        keep = set(names)
        return Substitution(
            {k: v for k, v in self.bindings.items() if k in keep},
            {k: v for k, v in self.lateral.items() if k in keep},
        )

    def _resolve(self, name: str, cap: int, memo: dict[str, Term], active: set[str]) -> Term:
        if name in memo:
            return memo[name]
        if name in active:
            raise NotDagSolvedError(f"binding of {name} refers to itself")
        active.add(name)
        if name in self.lateral:
            path = self.lateral[name]
            symbols = slp.expand(path.label, cap)
            images = {a: self._resolve(a, cap, memo, active) for a in set(symbols)}
            result = _chain((images[a] for a in symbols), self._resolve(path.tail, cap, memo, active))
        elif name in self.bindings:
            result = self._apply(self.bindings[name], cap, memo, active)
        else:
            result = var(name)
        active.discard(name)
        if result.size > cap:
            raise MaterializationError(f"binding of {name}", result.size, cap)
        memo[name] = result
        return result

    def _apply(self, term: Term, cap: int, memo: dict[str, Term], active: set[str]) -> Term:
        images = {name: self._resolve(name, cap, memo, active) for name in variables(term)}
        return fold(term, lambda v: images[v.name], lambda n, l, r: app(n.op, l, r))

    def apply(self, term: Term, cap: Optional[int] = None) -> Term:
        cap = get_settings().materialization_cap if cap is None else cap
        result = self._apply(term, cap, {}, set())
        if result.size > cap:
            raise MaterializationError("instantiated term", result.size, cap)
        return result

    def image(self, name: str, cap: Optional[int] = None) -> Term:
        cap = get_settings().materialization_cap if cap is None else cap
        return self._resolve(name, cap, {}, set())

    def materialize(self, cap: Optional[int] = None) -> "Substitution":
        cap = get_settings().materialization_cap if cap is None else cap
        memo: dict[str, Term] = {}
        bound = {name: self._resolve(name, cap, memo, set()) for name in sorted(self.domain)}
        return Substitution(bound)


def extract_unifier(s: StandardSystem, *, compressed: bool = False, cap: Optional[int] = None) -> Substitution:
    """Back-substitute a dag-solved system into its most general unifier."""
    if not is_dag_solved(s):
        raise NotDagSolvedError("system is not in dag-solved form")
    cap = get_settings().materialization_cap if cap is None else cap
    by_lhs = {eq.lhs: eq for eq in s.equations}
    order = [n for n in reversed(list(nx.topological_sort(_solved_graph(s)))) if n in by_lhs]
    bindings: dict[str, Term] = {}
    lateral: dict[str, Path] = {}
    for name in order:
        rhs = by_lhs[name].rhs
        if isinstance(rhs, Path):
            lateral[name] = rhs
            continue
        images = {v: bindings.get(v, var(v)) for v in variables(rhs)}
        bindings[name] = fold(rhs, lambda v: images[v.name], lambda n, l, r: app(n.op, l, r))
    sigma = Substitution(bindings, lateral)
    if compressed or not lateral:
        return sigma
    return sigma.materialize(cap)
