# asym_unify.py
"""
Asymmetric unification for the decomposition R = {X*(Y+Z) -> X*Y + X*Z}, E = {}.

Equations are ``U =d t`` (the instance of t must stay irreducible) or
``t =d U`` (the instance of U must). Substitutions are assumed normalized, so
the only restriction with content is on a var-first product U =d V*W: the
instance of W must not be a sum.

Rules:
  (a)        variable elimination
  (b)(c)(d)  cancellation of two definitions with the same operator; (b) both
             var-first, (c) one of each, (d) both term-first
  (e)(e')    FAIL: U =d V*W with U =d X+Y, or with W =d X+Y
  (f)(f')    FAIL: U =d V*W with X+Y =d U, or with X+Y =d W
  (g)(h)     V*W =d U with U =d X+Y (g) or X+Y =d U (h) becomes
             W1+W2 =d W, V*W1 =d X, V*W2 =d Y
Failure rules run first, then cancellation, then splitting. Cycles in the
dependency or propagation graph fail exactly as in the baseline.
"""
import logging
from collections import deque
from dataclasses import dataclass
from typing import Optional

from config import get_settings
from errors import StandardFormError
from results import FailureReason, Outcome, RunStats, Verdict
from terms import Equation, FreshSupply, Op, StandardSystem, Substitution, app, extract_unifier, normalize, var
from tools import find_cycle, partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Definition:
    op: Op
    left: str
    right: str
    term_first: bool

    @property
    def restricted_product(self) -> bool:
        return self.op is Op.TIMES and not self.term_first

    def render(self, lhs: str) -> str:
        rhs = f"{self.left} {self.op.value} {self.right}"
        return f"{rhs} =d {lhs}" if self.term_first else f"{lhs} =d {rhs}"


# (rule, sum is term-first) -> (reported rule, reason)
_FAILURES = {
    ("e", False): ("e", FailureReason.RULE_E),
    ("e", True): ("f", FailureReason.RULE_F),
    ("e'", False): ("e'", FailureReason.RULE_E_PRIME),
    ("e'", True): ("f'", FailureReason.RULE_F_PRIME),
}


class _Failure(Exception):
    def __init__(self, reason: FailureReason, witness: list):
        super().__init__(reason.value)
        self.reason = reason
        self.witness = witness


class _BudgetSpent(Exception):
    pass


class _AsymRun:
    """Union-find over variables plus oriented definitions per representative."""

    def __init__(self, s: StandardSystem, stats: RunStats, budget: int):
        self.stats = stats
        self.budget = budget
        self.fresh = FreshSupply(s.variables)
        self.rank = {name: i for i, name in enumerate(s.variables)}
        self.parent = {name: name for name in s.variables}
        self.defs: dict[str, list[Definition]] = {}
        # rep of W -> lhs of every var-first product U =d V*W
        self.users: dict[str, set[str]] = {}
        self.dirty: deque[str] = deque()
        self.mixed: set[str] = set()
        for eq in s.equations:
            if eq.kind == "var":
                self.merge(eq.lhs, eq.rhs.name, eq)
            elif eq.kind in ("sum", "product"):
                self.define(eq.lhs, Definition(eq.rhs.op, eq.rhs.left.name, eq.rhs.right.name, eq.term_first))
            else:
                raise StandardFormError(f"'{eq}' is not an asymmetric standard-form equation")

    def find(self, name: str) -> str:
        root = name
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[name] != root:
            self.parent[name], name = root, self.parent[name]
        return root

    def bump(self, rule: str, *eqs) -> None:
        self.stats.bump(rule, *eqs)
        if self.stats.total_rules > self.budget:
            raise _BudgetSpent

    def _touch(self, node: str) -> None:
        self.dirty.append(node)
        ops = {d.op for d in self.defs.get(node, ())}
        if len(ops) == 2:
            self.mixed.add(node)
        else:
            self.mixed.discard(node)

    def define(self, lhs: str, d: Definition) -> None:
        node = self.find(lhs)
        self.defs.setdefault(node, []).append(d)
        if d.restricted_product:
            self.users.setdefault(self.find(d.right), set()).add(node)
            self.dirty.append(self.find(d.right))
        self._touch(node)

    def merge(self, u: str, v: str, *why) -> None:
        """Rule (a), oriented toward the older variable."""
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return
        survivor, loser = (ru, rv) if self.rank[ru] < self.rank[rv] else (rv, ru)
        self.parent[loser] = survivor
        self.bump("a", f"{loser} =d {survivor}", *why)
        moved = self.defs.pop(loser, None)
        if moved:
            self.defs.setdefault(survivor, []).extend(moved)
        users = self.users.pop(loser, None)
        if users:
            self.users.setdefault(survivor, set()).update(users)
        self.mixed.discard(loser)
        self._touch(survivor)

    # ---------- failure rules ----------

    def _sums(self, node: str) -> list[Definition]:
        return [d for d in self.defs.get(node, ()) if d.op is Op.PLUS]

    def failure_at(self, node: str) -> None:
        """Rules (e), (e'), (f), (f') around node, as lhs and as right factor."""
        defs = self.defs.get(node, ())
        for product in (d for d in defs if d.restricted_product):
            for total in self._sums(node):
                self._fail("e", total, node, product, node)
            w = self.find(product.right)
            for total in self._sums(w):
                self._fail("e'", total, node, product, w)
        for user in sorted(self.users.get(node, ()), key=self.rank.__getitem__):
            user = self.find(user)
            for product in (d for d in self.defs.get(user, ()) if d.restricted_product):
                if self.find(product.right) == node:
                    for total in self._sums(node):
                        self._fail("e'", total, user, product, node)

    def _fail(self, rule: str, total: Definition, u: str, product: Definition, at: str) -> None:
        name, reason = _FAILURES[(rule, total.term_first)]
        witness = [product.render(u), total.render(at)]
        self.bump(name, *witness)
        self.stats.failure_rule = name
        raise _Failure(reason, witness)

    # ---------- cancellation (b) (c) (d) ----------

    def cancel_at(self, node: str) -> bool:
        defs = self.defs.get(node, [])
        for op in (Op.TIMES, Op.PLUS):
            same = [d for d in defs if d.op is op]
            if len(same) < 2:
                continue
            keep = next((d for d in same if not d.term_first), same[0])
            other = next(d for d in same if d is not keep)
            if not keep.term_first and not other.term_first:
                rule = "b"
            elif keep.term_first and other.term_first:
                rule = "d"
            else:
                rule = "c"
            defs.remove(other)
            self.bump(rule, keep.render(node), other.render(node))
            self.merge(keep.left, other.left)
            self.merge(keep.right, other.right)
            self._touch(self.find(node))
            return True
        return False

    def settle(self) -> None:
        """Failure rules and cancellation to exhaustion; raises _Failure."""
        while self.dirty:
            node = self.find(self.dirty.popleft())
            self.failure_at(node)
            if self.cancel_at(node):
                continue
            self._touch_quiet(node)

    def _touch_quiet(self, node: str) -> None:
        ops = {d.op for d in self.defs.get(node, ())}
        if len(ops) == 2:
            self.mixed.add(node)
        else:
            self.mixed.discard(node)

    # ---------- splitting (g) (h) ----------

    def split(self) -> bool:
        if not self.mixed:
            return False
        node = min(self.mixed, key=self.rank.__getitem__)
        defs = self.defs[node]
        product = next(d for d in defs if d.op is Op.TIMES)
        total = next(d for d in defs if d.op is Op.PLUS)
        defs.remove(total)
        w1, w2 = self.fresh(), self.fresh()
        for name in (w1, w2):
            self.parent[name] = name
            self.rank[name] = len(self.rank)
        rule = "h" if total.term_first else "g"
        self.bump(rule, product.render(node), total.render(node))
        self.stats.fresh_variables += 2
        self.stats.sum_transformations += 1
        self._touch_quiet(node)
        self.define(product.right, Definition(Op.PLUS, w1, w2, True))
        self.define(total.left, Definition(Op.TIMES, product.left, w1, True))
        self.define(total.right, Definition(Op.TIMES, product.left, w2, True))
        return True

    # ---------- graphs ----------

    def cycle(self) -> Optional[tuple[FailureReason, list]]:
        successors: dict[str, list[str]] = {}
        links = []
        sums: dict[str, list[str]] = {}
        for node, defs in self.defs.items():
            for d in defs:
                left, right = self.find(d.left), self.find(d.right)
                successors.setdefault(node, []).extend((left, right))
                if d.op is Op.TIMES:
                    links.append((node, right))
                else:
                    sums.setdefault(node, []).extend((left, right))
        witness = find_cycle(successors)
        if witness is not None:
            return FailureReason.DEPENDENCY_CYCLE, witness
        nodes = {n for n in self.parent if self.parent[n] == n}
        rep = partition(nodes, links)
        classes: dict[str, set[str]] = {}
        for node, children in sums.items():
            for child in children:
                classes.setdefault(rep[node], set()).add(rep[child])
        witness = find_cycle(classes)
        if witness is not None:
            return FailureReason.PROPAGATION_CYCLE, witness
        return None

    def forced_redex(self) -> Optional[list]:
        """A var-first product whose right factor ends up a sum through a chain of products."""
        memo: dict[str, bool] = {}

        def sum_valued(node: str) -> bool:
            chain = []
            while node not in memo:
                defs = self.defs.get(node, ())
                if any(d.op is Op.PLUS for d in defs):
                    memo[node] = True
                    break
                product = next((d for d in defs if d.op is Op.TIMES), None)
                if product is None:
                    memo[node] = False
                    break
                chain.append(node)
                node = self.find(product.right)
            for link in chain:
                memo[link] = memo[node]
            return memo[node]

        for node in sorted(self.defs, key=self.rank.__getitem__):
            for d in self.defs[node]:
                if d.restricted_product and sum_valued(self.find(d.right)):
                    return [d.render(node)]
        return None

    def solved(self, s: StandardSystem) -> StandardSystem:
        equations = []
        for name in self.parent:
            root = self.find(name)
            if root != name:
                equations.append(Equation(name, var(root), True))
        for node, defs in self.defs.items():
            for d in defs:
                rhs = app(d.op, var(self.find(d.left)), var(self.find(d.right)))
                equations.append(Equation(node, rhs, True, term_first=d.term_first))
        return StandardSystem(tuple(equations), s.originals, s.fresh + tuple(self.fresh.created), True)


def normalize_substitution(sigma: Substitution, cap: Optional[int] = None) -> Substitution:
    """Every binding replaced by its normal form; compressed bindings are materialized first."""
    if sigma.is_compressed:
        sigma = sigma.materialize(cap)
    return Substitution({name: normalize(term) for name, term in sigma.bindings.items()})


def check_asymmetry(sigma: Substitution, s: StandardSystem, cap: Optional[int] = None) -> bool:
    """sigma unifies every equation and keeps every restricted side irreducible."""
    from checker import check_unifier

    return check_unifier(s, sigma, cap)["passed"]


def asym_unify(s: StandardSystem, budget: Optional[int] = None, *, trace: Optional[bool] = None) -> Outcome:
    """
    Asymmetric unification of an asymmetric standard-form system.

    Args:
        s: the system; every equation carries its orientation
        budget: rule-application limit (defaults to the configured baseline budget)
        trace: record one trace entry per rule application

    Returns:
        Outcome: UNIFIABLE with the normalized most general asymmetric unifier,
        NOT_UNIFIABLE with the failure rule or cycle, or BUDGET_EXCEEDED.
    """
    if not s.asymmetric:
        raise StandardFormError("asym_unify takes asymmetric systems (=d equations)")
    settings = get_settings()
    budget = settings.ta_budget if budget is None else budget
    stats = RunStats(algorithm="asym", splitting_rules=["g", "h"]).enable_trace(settings.trace if trace is None else trace)

    failure: Optional[tuple[FailureReason, list]] = None
    try:
        run = _AsymRun(s, stats, budget)
        run.settle()
        failure = run.cycle()
        while failure is None and run.split():
            run.settle()
            failure = run.cycle()
        if failure is None:
            witness = run.forced_redex()
            if witness is not None:
                stats.failure_rule = FailureReason.FORCED_REDEX.value
                failure = FailureReason.FORCED_REDEX, witness
    except _Failure as e:
        failure = e.reason, e.witness
    except _BudgetSpent:
        logger.warning("asymmetric budget of %d rule applications exhausted", budget)
        return Outcome(Verdict.BUDGET_EXCEEDED, stats.stop_clock())

    stats.stop_clock()
    if failure is not None:
        reason, witness = failure
        if stats.failure_rule is None:
            stats.failure_rule = reason.value
        logger.info("asym: %s at %s", reason.value, witness)
        return Outcome(Verdict.NOT_UNIFIABLE, stats, reason=reason, witness=witness)
    solved = run.solved(s)
    sigma = normalize_substitution(extract_unifier(solved))
    logger.info("asym: unifiable after %d splits", stats.splitting)
    return Outcome(Verdict.UNIFIABLE, stats, solved=solved, substitution=sigma)
