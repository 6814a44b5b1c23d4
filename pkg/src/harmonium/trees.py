"""Feasible-parse-tree machinery for binary-tree Harmony grammars.

A binary tree is *feasible* when some total symbol assignment reaches the
maximum subtree harmony of -1 (computed without the root bonus); complete
parse trees additionally reach 0 once the root bonus is counted.  This
module provides:

* memoized recursive enumeration of all harmony -1 labeled trees with a
  given leaf count and depth bound,
* annealed tree morphing that edits an arbitrary tree into a feasible one
  with elementary leaf moves (delete / create / fork),
* seeded random-tree growth and feasibility-rate baselines.

Trees are arena-backed: nodes live in slot arrays with parent/child links,
ids are stable across edits, and freed slots are recycled.  ``copy()`` is
cheap and morphing works on copies, so rejected moves never mutate the
current tree.
"""
from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .annealer import CoolingSchedule, derive_seed
from .grammar import (
    LEFT,
    RIGHT,
    Assignment,
    GrammarSpec,
    TreeTopology,
    max_harmony_dp,
    parens_grammar,
)

UNLABELED = "_"


class BinaryTree:
    """Mutable arena-backed binary tree with optional node labels.

    Links: ``parent[i]`` (-1 for root), ``left[i]``/``right[i]`` (-1 when
    absent).  An only child is always stored on the left.  Freed slots are
    kept on a free list and reused; ``alive`` tracks live slots.
    """

    __slots__ = ("parent", "left", "right", "label", "alive", "root", "_free")

    def __init__(self, label: str = UNLABELED):
        self.parent = [-1]
        self.left = [-1]
        self.right = [-1]
        self.label = [label]
        self.alive = [True]
        self.root = 0
        self._free: list[int] = []

    # -- construction and copying -------------------------------------------

    def copy(self) -> "BinaryTree":
        t = BinaryTree.__new__(BinaryTree)
        t.parent = self.parent[:]
        t.left = self.left[:]
        t.right = self.right[:]
        t.label = self.label[:]
        t.alive = self.alive[:]
        t.root = self.root
        t._free = self._free[:]
        return t

    def _alloc(self, label: str) -> int:
        if self._free:
            i = self._free.pop()
            self.parent[i] = -1
            self.left[i] = -1
            self.right[i] = -1
            self.label[i] = label
            self.alive[i] = True
            return i
        self.parent.append(-1)
        self.left.append(-1)
        self.right.append(-1)
        self.label.append(label)
        self.alive.append(True)
        return len(self.parent) - 1

    # -- queries --------------------------------------------------------------

    def nodes(self) -> list[int]:
        return [i for i, a in enumerate(self.alive) if a]

    @property
    def node_count(self) -> int:
        return sum(self.alive)

    def children(self, v: int) -> list[int]:
        out = []
        if self.left[v] != -1:
            out.append(self.left[v])
        if self.right[v] != -1:
            out.append(self.right[v])
        return out

    def is_leaf(self, v: int) -> bool:
        return self.left[v] == -1 and self.right[v] == -1

    def leaves(self) -> list[int]:
        return [v for v in self.nodes() if self.is_leaf(v)]

    def leaf_count(self) -> int:
        return len(self.leaves())

    def depth(self, v: int | None = None) -> int:
        """Depth of node v (root = 0), or the whole tree's depth."""
        if v is not None:
            d = 0
            while self.parent[v] != -1:
                v = self.parent[v]
                d += 1
            return d
        out = 0
        stack = [(self.root, 0)]
        while stack:
            u, d = stack.pop()
            out = max(out, d)
            for c in self.children(u):
                stack.append((c, d + 1))
        return out

    def validate(self) -> None:
        """Check link consistency; raises ValueError on corruption."""
        seen = set()
        stack = [self.root]
        if not self.alive[self.root] or self.parent[self.root] != -1:
            raise ValueError("bad root")
        while stack:
            v = stack.pop()
            if v in seen:
                raise ValueError("cycle in tree links")
            seen.add(v)
            for c in self.children(v):
                if not self.alive[c] or self.parent[c] != v:
                    raise ValueError(f"bad child link {v}->{c}")
                stack.append(c)
        if seen != set(self.nodes()):
            raise ValueError("disconnected nodes in arena")

    # -- elementary moves ------------------------------------------------------

    def add_child(self, v: int, slot: int, label: str = UNLABELED) -> int:
        """Attach a new leaf to ``v`` on LEFT or RIGHT; the slot must be free."""
        arr = self.left if slot == LEFT else self.right
        if arr[v] != -1:
            raise ValueError(f"slot {slot} of node {v} is occupied")
        c = self._alloc(label)
        arr[v] = c
        self.parent[c] = v
        return c

    def add_second_child(self, v: int, label: str = UNLABELED) -> int:
        """Attach a leaf to a node with exactly one child."""
        if self.left[v] == -1 and self.right[v] != -1:
            return self.add_child(v, LEFT, label)
        if self.left[v] != -1 and self.right[v] == -1:
            return self.add_child(v, RIGHT, label)
        raise ValueError(f"node {v} does not have exactly one child")

    def fork_leaf(self, v: int, label: str = UNLABELED) -> tuple[int, int]:
        """Turn a leaf into an interior node with two fresh leaves."""
        if not self.is_leaf(v):
            raise ValueError(f"node {v} is not a leaf")
        return self.add_child(v, LEFT, label), self.add_child(v, RIGHT, label)

    def delete_leaf(self, v: int) -> int:
        """Remove a leaf and its parent edge; returns the old parent id."""
        if not self.is_leaf(v):
            raise ValueError(f"node {v} is not a leaf")
        p = self.parent[v]
        if p == -1:
            raise ValueError("cannot delete the root")
        if self.left[p] == v:
            self.left[p] = -1
        else:
            self.right[p] = -1
        self.alive[v] = False
        self.parent[v] = -1
        self._free.append(v)
        return p

    # -- conversions -----------------------------------------------------------

    def to_topology(self) -> tuple[TreeTopology, list[int]]:
        """Preorder TreeTopology plus the node-id order used for it."""
        order: list[int] = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            for c in reversed(self.children(v)):
                stack.append(c)
        index = {v: i for i, v in enumerate(order)}
        parents = []
        kinds = []
        for v in order:
            p = self.parent[v]
            if p == -1:
                parents.append(-1)
                kinds.append(-1)
            else:
                parents.append(index[p])
                kinds.append(LEFT if self.left[p] == v else RIGHT)
        return TreeTopology(tuple(parents), tuple(kinds)), order

    def assignment_ids(self, g: GrammarSpec, order: list[int]) -> Assignment:
        return [0 if self.label[v] == UNLABELED else g.symbol_id(self.label[v])
                for v in order]

    def set_labels(self, g: GrammarSpec, order: list[int],
                   assignment: Assignment) -> None:
        for v, s in zip(order, assignment):
            self.label[v] = UNLABELED if s == 0 else g.symbol_name(s)

    # -- serialization -----------------------------------------------------------

    def to_string(self, v: int | None = None) -> str:
        """Bracketed preorder form, e.g. ``S[C[S[B[( )]] S[B[( )]]]]``."""
        if v is None:
            v = self.root
        kids = self.children(v)
        if not kids:
            return self.label[v]
        inner = " ".join(self.to_string(c) for c in kids)
        return f"{self.label[v]}[{inner}]"

    def __repr__(self) -> str:
        return f"BinaryTree({self.to_string()!r})"


def parse_tree(text: str) -> BinaryTree:
    """Parse the bracketed serialization back into a tree."""
    pos = 0

    def parse_name() -> str:
        nonlocal pos
        start = pos
        while pos < len(text) and text[pos] not in "[] \t\n":
            pos += 1
        if pos == start:
            raise ValueError(f"expected a label at position {start}: {text!r}")
        return text[start:pos]

    def skip_ws() -> None:
        nonlocal pos
        while pos < len(text) and text[pos] in " \t\n":
            pos += 1

    def parse_node(tree: BinaryTree, parent: int, slot: int) -> None:
        nonlocal pos
        name = parse_name()
        if parent == -1:
            tree.label[tree.root] = name
            v = tree.root
        else:
            v = tree.add_child(parent, slot, name)
        if pos < len(text) and text[pos] == "[":
            pos += 1
            skip_ws()
            parse_node(tree, v, LEFT)
            skip_ws()
            if pos < len(text) and text[pos] != "]":
                parse_node(tree, v, RIGHT)
                skip_ws()
            if pos >= len(text) or text[pos] != "]":
                raise ValueError(f"unbalanced brackets in {text!r}")
            pos += 1

    tree = BinaryTree()
    skip_ws()
    parse_node(tree, -1, LEFT)
    skip_ws()
    if pos != len(text):
        raise ValueError(f"trailing characters after tree in {text!r}")
    return tree


# ---------------------------------------------------------------------------
# Feasibility
# ---------------------------------------------------------------------------

def subtree_max_harmony(tree: BinaryTree, g: GrammarSpec
                        ) -> tuple[float, Assignment, list[int]]:
    """DP maximum harmony without the root bonus, plus the node order."""
    topo, order = tree.to_topology()
    value, assignment = max_harmony_dp(g, topo, include_root_bonus=False)
    return value, assignment, order


def is_feasible(tree: BinaryTree, g: GrammarSpec) -> tuple[bool, Assignment]:
    """True when the best subtree harmony is exactly -1."""
    value, assignment, _ = subtree_max_harmony(tree, g)
    return value == -1.0, assignment


def is_grammatical(tree: BinaryTree, g: GrammarSpec) -> tuple[bool, Assignment]:
    """Full-tree test: with the root bonus the best harmony is exactly 0."""
    topo, _ = tree.to_topology()
    value, assignment = max_harmony_dp(g, topo, include_root_bonus=True)
    return value == 0.0, assignment


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

class EnumCache:
    """Shared (leaf count, depth) -> canonical tree strings memo.

    A missing key is computed once under a lock; concurrent readers of
    existing keys never block each other on CPython (dict reads are
    atomic).  Entries are immutable tuples sorted canonically.
    """

    def __init__(self) -> None:
        self._entries: dict[tuple[int, int], tuple[str, ...]] = {}
        self._lock = threading.RLock()  # the fill recursion re-enters

    def __contains__(self, key: tuple[int, int]) -> bool:
        return key in self._entries

    def get(self, key: tuple[int, int]) -> tuple[str, ...] | None:
        return self._entries.get(key)

    def entries(self) -> dict[tuple[int, int], tuple[str, ...]]:
        return dict(self._entries)


_DEFAULT_CACHE = EnumCache()


def enum_subtrees(leaves: int, depth: int, g: GrammarSpec | None = None,
                  cache: EnumCache | None = None) -> list[BinaryTree]:
    """All harmony -1 labeled trees with exactly ``leaves`` leaves and depth
    <= ``depth``, canonically ordered.

    The recursion composes smaller harmony -1 trees: single nodes are the
    depth-0 base case, a one-child root or a two-child root (over every
    split of the leaf count) is tried for every symbol, and candidates are
    kept when the composed harmony is exactly -1.  Completeness rests on
    the subtree property of the built-in grammar: every child subtree of a
    -1 tree is itself a -1 tree.  Results are memoized per (L, D).
    """
    if leaves < 0 or depth < 0:
        raise ValueError("leaf count and depth must be nonnegative")
    if g is None:
        g = parens_grammar()
        cache = cache if cache is not None else _DEFAULT_CACHE
    elif cache is None:
        cache = EnumCache()
    strings = _enum_strings(leaves, depth, g, cache)
    return [parse_tree(s) for s in strings]


def _enum_strings(leaves: int, depth: int, g: GrammarSpec,
                  cache: EnumCache) -> tuple[str, ...]:
    key = (leaves, depth)
    hit = cache.get(key)
    if hit is not None:
        return hit
    with cache._lock:
        hit = cache._entries.get(key)
        if hit is not None:
            return hit
        result = _enum_compute(leaves, depth, g, cache)
        cache._entries[key] = result
        return result


def _root_symbol(text: str) -> str:
    cut = text.find("[")
    return text if cut == -1 else text[:cut]


def _enum_compute(leaves: int, depth: int, g: GrammarSpec,
                  cache: EnumCache) -> tuple[str, ...]:
    tb = g.tables
    out: list[str] = []
    if leaves == 0:
        return ()
    if depth == 0:
        if leaves == 1:
            for s in g.symbols:
                if g.unary.get(s, 0.0) == -1.0:
                    out.append(s)
        return tuple(sorted(out))

    seen: set[str] = set()

    def emit(text: str) -> None:
        if text not in seen:
            seen.add(text)
            out.append(text)

    # depth-0 singles also qualify under a larger depth bound
    for text in _enum_strings(leaves, 0, g, cache) if leaves == 1 else ():
        emit(text)

    # one-child roots over all smaller trees
    for child in _enum_strings(leaves, depth - 1, g, cache):
        c_sym = g.symbol_id(_root_symbol(child))
        for s in g.symbols:
            sid = g.symbol_id(s)
            h = -1.0 + tb.unary[sid] + tb.bonus[LEFT][sid][c_sym]
            if h == -1.0:
                emit(f"{s}[{child}]")

    # two-child roots over every split of the leaf count
    for lcount in range(1, leaves):
        left_trees = _enum_strings(lcount, depth - 1, g, cache)
        right_trees = _enum_strings(leaves - lcount, depth - 1, g, cache)
        for lt in left_trees:
            l_sym = g.symbol_id(_root_symbol(lt))
            for rt in right_trees:
                r_sym = g.symbol_id(_root_symbol(rt))
                for s in g.symbols:
                    sid = g.symbol_id(s)
                    h = (-2.0 + tb.unary[sid]
                         + tb.bonus[LEFT][sid][l_sym]
                         + tb.bonus[RIGHT][sid][r_sym])
                    if h == -1.0:
                        emit(f"{s}[{lt} {rt}]")

    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# Random trees
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def count_shapes(leaves: int, depth: int) -> int:
    """Number of binary-tree shapes with exactly ``leaves`` leaves and depth
    <= ``depth`` (an only child always sits on the left)."""
    if leaves < 1 or depth < 0:
        return 0
    total = 1 if leaves == 1 else 0
    if depth >= 1:
        total += count_shapes(leaves, depth - 1)
        for l in range(1, leaves):
            total += count_shapes(l, depth - 1) * count_shapes(leaves - l, depth - 1)
    return total


def _randint_below(rng: np.random.Generator, n: int) -> int:
    """Exact uniform integer in [0, n) for arbitrarily large n."""
    if n <= 0:
        raise ValueError("empty range")
    if n <= 2 ** 62:
        return int(rng.integers(n))
    nbytes = (n.bit_length() + 7) // 8
    mask = (1 << (nbytes * 8)) - 1
    while True:
        r = int.from_bytes(rng.bytes(nbytes), "big") & mask
        if r < n:
            return r


def random_binary_tree(leaves: int, depth: int, seed: int) -> BinaryTree:
    """A uniformly random tree shape with exactly ``leaves`` leaves and
    depth <= ``depth``, grown top-down with shape-counted branch weights.

    Deterministic per seed.  Raises for (leaves, depth) combinations that
    admit no shape at all.
    """
    if leaves < 1:
        raise ValueError("leaf count must be >= 1")
    if count_shapes(leaves, depth) == 0:
        raise ValueError(f"no tree has {leaves} leaves within depth {depth}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    tree = BinaryTree()
    _grow_uniform(tree, tree.root, leaves, depth, rng)
    return tree


def _grow_uniform(tree: BinaryTree, v: int, leaves: int, depth: int,
                  rng: np.random.Generator) -> None:
    w_leaf = 1 if leaves == 1 else 0
    w_one = count_shapes(leaves, depth - 1) if depth >= 1 else 0
    splits = []
    if depth >= 1:
        for l in range(1, leaves):
            w = count_shapes(l, depth - 1) * count_shapes(leaves - l, depth - 1)
            if w:
                splits.append((l, w))
    r = _randint_below(rng, w_leaf + w_one + sum(w for _, w in splits))
    if r < w_leaf:
        return
    r -= w_leaf
    if r < w_one:
        _grow_uniform(tree, tree.add_child(v, LEFT), leaves, depth - 1, rng)
        return
    r -= w_one
    for l, w in splits:
        if r < w:
            left = tree.add_child(v, LEFT)
            right = tree.add_child(v, RIGHT)
            _grow_uniform(tree, left, l, depth - 1, rng)
            _grow_uniform(tree, right, leaves - l, depth - 1, rng)
            return
        r -= w
    raise AssertionError("shape weights out of sync")


def feasibility_rate(leaves: int, depth: int, samples: int, seed: int,
                     g: GrammarSpec | None = None) -> float:
    """Fraction of seeded random trees that are feasible."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if g is None:
        g = parens_grammar()
    hits = 0
    for i in range(samples):
        tree = random_binary_tree(leaves, depth, derive_seed(seed, "sample", i))
        if is_feasible(tree, g)[0]:
            hits += 1
    return hits / samples


# ---------------------------------------------------------------------------
# Morphing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MorphConfig:
    """Morphing parameters.

    ``max_updates`` proposals are made at each of the schedule's
    temperature steps (defaults: 10 * leaf_target proposals over 100
    geometric steps).  ``tabu_window`` accepted moves are protected from
    reversal: no adding at a site that recently lost a leaf, no deleting a
    recently added leaf.
    """

    leaf_target: int
    max_depth: int
    max_updates: int | None = None
    schedule: CoolingSchedule | None = None
    tabu_window: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.leaf_target < 1:
            raise ValueError("leaf_target must be >= 1")
        if self.leaf_target > 1 and self.max_depth <= _log2(self.leaf_target):
            raise ValueError(
                f"max_depth {self.max_depth} must exceed log2(leaf_target) "
                f"= {_log2(self.leaf_target):.2f} to avoid deadlock")

    def resolved_updates(self) -> int:
        return self.max_updates if self.max_updates is not None \
            else 10 * self.leaf_target

    def resolved_schedule(self) -> CoolingSchedule:
        return self.schedule if self.schedule is not None \
            else CoolingSchedule.geometric(100)


def _log2(x: int) -> float:
    import math
    return math.log2(x)


@dataclass(frozen=True)
class MoveRecord:
    index: int
    kind: str            # "delete" | "create" | "fork"
    target: int          # the leaf deleted or the node grown at
    site: int            # the parent left behind (delete) or the target
    created: tuple[int, ...]
    accepted: bool
    harmony: float       # subtree max harmony of the tree after the proposal
    leaf_count: int
    depth: int


@dataclass
class MorphResult:
    converged: bool
    tree: BinaryTree
    move_count: int
    trace: tuple[MoveRecord, ...]
    harmony: float
    assignment: Assignment


def morph_tree(t0: BinaryTree, cfg: MorphConfig,
               g: GrammarSpec | None = None) -> MorphResult:
    """Anneal a tree into a feasible one with elementary leaf moves.

    While the leaf count is below the target an additive move is proposed
    (fork a random leaf, or add a second child to a one-child interior
    node, chosen uniformly among the applicable kinds); otherwise a random
    leaf is deleted.  Moves that would exceed the depth bound are never
    proposed.  A proposal is accepted when the DP maximum harmony does not
    drop, or with the Metropolis probability otherwise; the run returns as
    soon as the current tree is feasible.  If the budget runs out the
    best-seen tree is returned with ``converged=False``.
    """
    if g is None:
        g = parens_grammar()
    if t0.depth() > cfg.max_depth:
        raise ValueError("initial tree exceeds the depth bound")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed)))
    tree = t0.copy()
    value, assignment, order = subtree_max_harmony(tree, g)
    if value == -1.0:
        tree.set_labels(g, order, assignment)
        return MorphResult(True, tree, 0, (), value, assignment)

    best = (value, tree.copy())
    # tabu entries: (move_index, site) / (move_index, created ids); an
    # entry protects its site for the next ``tabu_window`` proposals
    recent_deleted_sites: deque[tuple[int, int]] = deque()
    recent_added_leaves: deque[tuple[int, tuple[int, ...]]] = deque()
    trace: list[MoveRecord] = []
    moves = 0
    h = value
    max_updates = cfg.resolved_updates()
    import math as _math

    for temp in cfg.resolved_schedule().temperatures:
        beta = 1.0 / temp
        for _ in range(max_updates):
            while recent_deleted_sites and \
                    recent_deleted_sites[0][0] <= moves - cfg.tabu_window:
                recent_deleted_sites.popleft()
            while recent_added_leaves and \
                    recent_added_leaves[0][0] <= moves - cfg.tabu_window:
                recent_added_leaves.popleft()
            banned_sites = {s for _, s in recent_deleted_sites}
            banned_leaves = {v for _, grp in recent_added_leaves for v in grp}
            proposal = _propose(tree, cfg, rng, banned_sites, banned_leaves)
            if proposal is None:
                # every candidate is tabu; deadlock-freedom wins over the
                # exclusion heuristic
                proposal = _propose(tree, cfg, rng, set(), set())
            if proposal is None:
                continue
            kind, site = proposal
            cand = tree.copy()
            if kind == "delete":
                parent = cand.delete_leaf(site)
                created: tuple[int, ...] = ()
                tabu_site = parent
            elif kind == "create":
                created = (cand.add_second_child(site),)
                tabu_site = site
            else:  # fork
                created = cand.fork_leaf(site)
                tabu_site = site
            moves += 1
            cand_value, cand_assignment, cand_order = subtree_max_harmony(cand, g)
            accept = cand_value >= h or \
                float(rng.random()) < _math.exp(beta * (cand_value - h))
            trace.append(MoveRecord(moves, kind, site, tabu_site, created,
                                    accept, cand_value,
                                    cand.leaf_count(), cand.depth()))
            if not accept:
                continue
            tree = cand
            h = cand_value
            if kind == "delete":
                recent_deleted_sites.append((moves, tabu_site))
            else:
                recent_added_leaves.append((moves, created))
            if h > best[0]:
                best = (h, tree.copy())
            if h == -1.0:
                tree.set_labels(g, cand_order, cand_assignment)
                return MorphResult(True, tree, moves, tuple(trace), h,
                                   cand_assignment)

    value, assignment, order = subtree_max_harmony(best[1], g)
    best[1].set_labels(g, order, assignment)
    return MorphResult(False, best[1], moves, tuple(trace), value, assignment)


def _propose(tree: BinaryTree, cfg: MorphConfig, rng: np.random.Generator,
             banned_sites: set[int], banned_leaves: set[int]):
    """Pick a move kind uniformly among applicable kinds, then a site."""
    depth_of = {}
    stack = [(tree.root, 0)]
    while stack:
        v, d = stack.pop()
        depth_of[v] = d
        for c in tree.children(v):
            stack.append((c, d + 1))

    if tree.leaf_count() < cfg.leaf_target:
        forks = [v for v in tree.nodes() if tree.is_leaf(v)
                 and depth_of[v] + 1 <= cfg.max_depth and v not in banned_sites]
        seconds = [v for v in tree.nodes() if len(tree.children(v)) == 1
                   and depth_of[v] + 1 <= cfg.max_depth and v not in banned_sites]
        kinds = []
        if forks:
            kinds.append(("fork", forks))
        if seconds:
            kinds.append(("create", seconds))
        if not kinds:
            return None
        kind, sites = kinds[int(rng.integers(len(kinds)))]
        return kind, sites[int(rng.integers(len(sites)))]

    deletable = [v for v in tree.leaves()
                 if tree.parent[v] != -1 and v not in banned_leaves]
    if not deletable:
        return None
    return "delete", deletable[int(rng.integers(len(deletable)))]


@dataclass(frozen=True)
class MorphTrialRecord:
    trial: int
    seed: int
    converged: bool
    moves: int
    harmony: float
    leaf_count: int
    depth: int
    tree: str


def run_morph_experiment(leaf_target: int, max_depth: int, trials: int,
                         seed: int, cfg: MorphConfig | None = None,
                         g: GrammarSpec | None = None
                         ) -> list[MorphTrialRecord]:
    """Morph seeded random trees; one record per trial, deterministic."""
    if g is None:
        g = parens_grammar()
    base = cfg if cfg is not None else MorphConfig(leaf_target, max_depth)
    records = []
    for trial in range(trials):
        tree_seed = derive_seed(seed, "morph-init", leaf_target, max_depth, trial)
        morph_seed = derive_seed(seed, "morph-run", leaf_target, max_depth, trial)
        t0 = random_binary_tree(leaf_target, max_depth, tree_seed)
        result = morph_tree(t0, replace(base, seed=morph_seed), g)
        records.append(MorphTrialRecord(
            trial=trial,
            seed=morph_seed,
            converged=result.converged,
            moves=result.move_count,
            harmony=result.harmony,
            leaf_count=result.tree.leaf_count(),
            depth=result.tree.depth(),
            tree=result.tree.to_string(),
        ))
    return records
