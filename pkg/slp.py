# slp.py
"""
Straight-line programs over label variables.

A program is a handle into an append-only production store. Productions have
two shapes, ``N -> a`` and ``N -> Nj Nk`` (with j, k older than N), and are
hash-consed, so structurally identical programs share one id. Lengths are
Python ints and never overflow; depth and terminal sets are cached per
production.

Comparisons (equal, is_prefix, first_mismatch) never decompress. They share
one position-indexed comparison memoised on (nonterminal, nonterminal, offset).
"""
import threading
from dataclasses import dataclass, field
from typing import Iterable, Optional

from config import get_settings
from errors import MaterializationError, SlpRangeError


_LEAF = -1


class SlpStore:
    """Append-only production store. Appends are serialized; reads are lock free."""

    def __init__(self):
        self._lock = threading.Lock()
        # index 0 is unused so that ids read as N1, N2, ...
        self._left: list[int] = [_LEAF]
        self._right: list[int] = [_LEAF]
        self._label: list[Optional[str]] = [None]
        self._length: list[int] = [0]
        self._depth: list[int] = [0]
        self._terminals: list[frozenset] = [frozenset()]
        self._index: dict[tuple, int] = {}
        self._equal_cache: dict[tuple[int, int], bool] = {}

    def __len__(self) -> int:
        return len(self._left) - 1

    def _intern(self, key: tuple, left: int, right: int, label: Optional[str]) -> int:
        found = self._index.get(key)
        if found is not None:
            return found
        with self._lock:
            found = self._index.get(key)
            if found is not None:
                return found
            if label is not None:
                length, depth, terms = 1, 0, frozenset((label,))
            else:
                length = self._length[left] + self._length[right]
                depth = 1 + max(self._depth[left], self._depth[right])
                terms = self._terminals[left] | self._terminals[right]
            self._left.append(left)
            self._right.append(right)
            self._label.append(label)
            self._length.append(length)
            self._depth.append(depth)
            self._terminals.append(terms)
            new_id = len(self._left) - 1
            self._index[key] = new_id
            return new_id

    def terminal(self, label: str) -> int:
        return self._intern(("t", label), _LEAF, _LEAF, label)

    def pair(self, left: int, right: int) -> int:
        return self._intern(("p", left, right), left, right, None)

    def handle(self, node: int) -> "Slp":
        return Slp(node, self)


STORE = SlpStore()


@dataclass(frozen=True)
class Slp:
    """Immutable handle on one program. Equality is identity of the stored production."""

    id: int
    store: SlpStore = field(default=STORE, compare=False, repr=False)

    @property
    def length(self) -> int:
        return self.store._length[self.id]

    @property
    def depth(self) -> int:
        return self.store._depth[self.id]

    @property
    def terminals(self) -> frozenset:
        return self.store._terminals[self.id]

    @property
    def is_terminal(self) -> bool:
        return self.store._label[self.id] is not None

    @property
    def label(self) -> Optional[str]:
        return self.store._label[self.id]

    @property
    def left(self) -> "Slp":
        return Slp(self.store._left[self.id], self.store)

    @property
    def right(self) -> "Slp":
        return Slp(self.store._right[self.id], self.store)

    def __str__(self) -> str:
        return f"N{self.id}"


def atom(label: str, store: SlpStore = STORE) -> Slp:
    return Slp(store.terminal(label), store)


def concat(i: Slp, j: Slp) -> Slp:
    """Program producing expand(i) followed by expand(j); adds at most one production."""
    return Slp(i.store.pair(i.id, j.id), i.store)


def power(i: Slp, k: int) -> Slp:
    """k copies of expand(i), built by repeated doubling."""
    if k < 1:
        raise SlpRangeError(f"power needs k >= 1, got {k}")
    result = None
    base = i
    while True:
        if k & 1:
            result = base if result is None else concat(result, base)
        k >>= 1
        if not k:
            return result
        base = concat(base, base)


def reachable(i: Slp) -> set[int]:
    store = i.store
    seen = set()
    stack = [i.id]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if store._label[node] is None:
            stack.append(store._left[node])
            stack.append(store._right[node])
    return seen


def size(i: Slp) -> int:
    """|S|: number of productions the program uses."""
    return len(reachable(i))


def char_at(i: Slp, pos: int) -> str:
    if not 0 <= pos < i.length:
        raise SlpRangeError(f"position {pos} outside [0, {i.length})")
    store = i.store
    node = i.id
    while store._label[node] is None:
        left = store._left[node]
        if pos < store._length[left]:
            node = left
        else:
            pos -= store._length[left]
            node = store._right[node]
    return store._label[node]


def expand(i: Slp, cap: Optional[int] = None) -> tuple[str, ...]:
    """Decompress. Meant for oracles and small outputs only."""
    if cap is None:
        cap = get_settings().expand_cap
    if i.length > cap:
        raise MaterializationError(f"SLP {i}", i.length, cap)
    store = i.store
    out: list[str] = []
    stack = [i.id]
    while stack:
        node = stack.pop()
        label = store._label[node]
        if label is not None:
            out.append(label)
        else:
            stack.append(store._right[node])
            stack.append(store._left[node])
    return tuple(out)


def _eq_at(store: SlpStore, a: int, b: int, off: int, memo: dict) -> bool:
    """expand(a) == expand(b)[off : off + length(a)], assuming the window fits in b.

    Iterative over an explicit stack; each frame is [key, a, b, off, phase].
    """
    lengths, lefts, rights, labels = store._length, store._left, store._right, store._label
    stack: list[list] = []
    call: Optional[tuple[int, int, int]] = (a, b, off)
    result = False
    while True:
        if call is not None:
            a, b, off = call
            call = None
            width = lengths[a]
            # shrink b to the smallest production that still covers the window
            while labels[b] is None:
                lb = lefts[b]
                if off + width <= lengths[lb]:
                    b = lb
                elif off >= lengths[lb]:
                    off -= lengths[lb]
                    b = rights[b]
                else:
                    break
            key = (a, b, off)
            hit = memo.get(key)
            if a == b and off == 0:
                result = True
            elif hit is not None:
                result = hit
            elif labels[a] is not None:
                # a one-symbol window always lands on a terminal of b
                result = labels[a] == labels[b]
                memo[key] = result
            else:
                stack.append([key, a, b, off, 0])
                call = (lefts[a], b, off)
                continue
        if not stack:
            return result
        frame = stack[-1]
        key, a, b, off, phase = frame
        if phase == 0 and result:
            frame[4] = 1
            call = (rights[a], b, off + lengths[lefts[a]])
            continue
        memo[key] = result
        stack.pop()


def equal(i: Slp, j: Slp) -> bool:
    if i.id == j.id:
        return True
    if i.length != j.length:
        return False
    store = i.store
    key = (i.id, j.id) if i.id < j.id else (j.id, i.id)
    hit = store._equal_cache.get(key)
    if hit is None:
        hit = _eq_at(store, i.id, j.id, 0, {})
        store._equal_cache[key] = hit
    return hit


def is_prefix(i: Slp, j: Slp) -> bool:
    if i.length > j.length:
        return False
    if i.length == j.length:
        return equal(i, j)
    return _eq_at(i.store, i.id, j.id, 0, {})


def _mismatch_in(store: SlpStore, a: int, b: int, memo: dict) -> Optional[int]:
    """First position p with expand(a)[p] != expand(b)[p]; a is no longer than b."""
    if _eq_at(store, a, b, 0, memo):
        return None
    base = 0
    while store._label[a] is None:
        left = store._left[a]
        if _eq_at(store, left, b, base, memo):
            # left half matches, so the difference is in the right half
            base += store._length[left]
            a = store._right[a]
        else:
            a = left
    return base


def first_mismatch(i: Slp, j: Slp) -> Optional[tuple[int, str, str]]:
    """Least 0-based position where the strings differ, with both symbols there.

    None when the shorter string is a prefix of the longer one.
    """
    if i.length <= j.length:
        pos = _mismatch_in(i.store, i.id, j.id, {})
    else:
        pos = _mismatch_in(i.store, j.id, i.id, {})
    if pos is None:
        return None
    return pos, char_at(i, pos), char_at(j, pos)


def suffix(i: Slp, keep: int) -> Slp:
    """Program for the last `keep` symbols of expand(i).

    Walks right children while they still cover the suffix, then rebuilds the
    left spine, so at most depth(i) productions are added and none removed.
    """
    if not 1 <= keep <= i.length:
        raise SlpRangeError(f"suffix keep={keep} outside [1, {i.length}]")
    store = i.store
    node = i.id
    spine: list[int] = []
    while True:
        while store._label[node] is None and store._length[store._right[node]] >= keep:
            node = store._right[node]
        if store._length[node] == keep:
            break
        right = store._right[node]
        spine.append(right)
        keep -= store._length[right]
        node = store._left[node]
    for right in reversed(spine):
        node = store.pair(node, right)
    return Slp(node, store)


def dump(roots: Iterable[Slp]) -> list[str]:
    """Serialize every production reachable from `roots`, ids ascending."""
    roots = list(roots)
    if not roots:
        return []
    store = roots[0].store
    nodes: set[int] = set()
    for root in roots:
        nodes |= reachable(root)
    lines = []
    for node in sorted(nodes):
        label = store._label[node]
        if label is not None:
            lines.append(f"N{node} -> '{label}'")
        else:
            lines.append(f"N{node} -> N{store._left[node]} N{store._right[node]}")
    return lines


def load(lines: Iterable[str], store: SlpStore = STORE) -> dict[int, Slp]:
    """Read productions written by dump(); returns file id -> handle in `store`."""
    mapping: dict[int, Slp] = {}
    for raw in lines:
        text = raw.strip()
        if not text:
            continue
        head, _, body = text.partition("->")
        head, parts = head.strip(), body.split()
        if not head.startswith("N") or not parts:
            raise SlpRangeError(f"bad production: {raw!r}")
        try:
            file_id = int(head[1:])
        except ValueError:
            raise SlpRangeError(f"bad nonterminal {head!r}") from None
        if len(parts) == 1 and len(parts[0]) > 2 and parts[0][0] == parts[0][-1] == "'":
            mapping[file_id] = atom(parts[0][1:-1], store)
        elif len(parts) == 2:
            try:
                left, right = (int(p[1:]) for p in parts)
            except ValueError:
                raise SlpRangeError(f"bad production: {raw!r}") from None
            if left not in mapping or right not in mapping:
                raise SlpRangeError(f"production {head} refers to an undefined nonterminal")
            mapping[file_id] = concat(mapping[left], mapping[right])
        else:
            raise SlpRangeError(f"bad production: {raw!r}")
    return mapping
