"""Harmony functions over tree topologies.

A grammar assigns a unary harmony to every symbol, a bonus to selected
(parent, child) symbol pairs on left/center/right edges, and a bonus to
selected root symbols.  The harmony of a symbol assignment is the plain
sum of those contributions; grammatical structures are the ones attaining
the global maximum (0 by convention for complete parse trees).

Symbols are small integer ids. Id 0 is the empty symbol: it scores
``empty_penalty`` (0 by default) and matches no rule, so the evaluator is
total even on partially labeled trees.  The exact maximizer
:func:`max_harmony_dp`, however, optimizes over proper symbols only; this
is what makes "maximum harmony -1" a meaningful feasibility predicate.

GrammarSpec and TreeTopology are immutable after construction and freely
shareable; assignments are plain lists owned by their caller.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

EMPTY_SYMBOL = 0

LEFT, CENTER, RIGHT = 0, 1, 2
_KIND_NAMES = {LEFT: "left", CENTER: "center", RIGHT: "right"}

Assignment = list[int]


@dataclass(frozen=True)
class GrammarSpec:
    """Symbol harmonies plus edge and root bonuses.

    ``symbols`` fixes the id order: symbol i has id i+1 (0 is empty).
    Every symbol referenced by a rule must be declared.
    """

    symbols: tuple[str, ...]
    unary: Mapping[str, float]
    left_rules: Mapping[tuple[str, str], float] = field(default_factory=dict)
    center_rules: Mapping[tuple[str, str], float] = field(default_factory=dict)
    right_rules: Mapping[tuple[str, str], float] = field(default_factory=dict)
    root_bonus: Mapping[str, float] = field(default_factory=dict)
    empty_penalty: float = 0.0

    def __post_init__(self) -> None:
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("symbol names must be unique")
        if not self.symbols:
            raise ValueError("grammar needs at least one symbol")
        declared = set(self.symbols)
        for name in self.unary:
            if name not in declared:
                raise ValueError(f"unary harmony for undeclared symbol {name!r}")
        for rules in (self.left_rules, self.center_rules, self.right_rules):
            for (p, c), bonus in rules.items():
                if p not in declared or c not in declared:
                    raise ValueError(f"rule ({p!r}, {c!r}) uses undeclared symbol")
                _require_finite(bonus, f"rule ({p!r}, {c!r})")
        for name, bonus in self.root_bonus.items():
            if name not in declared:
                raise ValueError(f"root bonus for undeclared symbol {name!r}")
            _require_finite(bonus, f"root bonus {name!r}")
        for name, h in self.unary.items():
            _require_finite(h, f"unary harmony {name!r}")

    @property
    def num_symbols(self) -> int:
        return len(self.symbols)

    def symbol_id(self, name: str) -> int:
        """Id of a symbol name; the empty symbol '' has id 0."""
        if name == "":
            return EMPTY_SYMBOL
        try:
            return self.symbols.index(name) + 1
        except ValueError:
            raise ValueError(f"unknown symbol {name!r}") from None

    def symbol_name(self, sid: int) -> str:
        if sid == EMPTY_SYMBOL:
            return ""
        return self.symbols[sid - 1]

    @cached_property
    def tables(self) -> "_Tables":
        n = self.num_symbols
        unary = [self.empty_penalty] + [float(self.unary.get(s, 0.0))
                                        for s in self.symbols]
        root = [0.0] + [float(self.root_bonus.get(s, 0.0)) for s in self.symbols]
        bonus = []
        for rules in (self.left_rules, self.center_rules, self.right_rules):
            table = [[0.0] * (n + 1) for _ in range(n + 1)]
            for (p, c), b in rules.items():
                table[self.symbol_id(p)][self.symbol_id(c)] = float(b)
            bonus.append(tuple(tuple(row) for row in table))
        return _Tables(tuple(unary), tuple(bonus), tuple(root))


@dataclass(frozen=True)
class _Tables:
    """Dense id-indexed lookup tables compiled from a GrammarSpec."""

    unary: tuple[float, ...]
    bonus: tuple[tuple[tuple[float, ...], ...], ...]  # [kind][parent][child]
    root: tuple[float, ...]


def _require_finite(x: float, what: str) -> None:
    if not (float("-inf") < float(x) < float("inf")):
        raise ValueError(f"{what} must be finite, got {x}")


@dataclass(frozen=True)
class TreeTopology:
    """Arena of tree nodes with parent links and left/center/right kinds.

    ``parents[i]`` is -1 exactly for the root; ``kinds[i]`` tags the edge
    from node i to its parent (ignored for the root).  Child order within a
    parent follows kind order, then node index.  Node order is declaration
    order and is used by all serialization.
    """

    parents: tuple[int, ...]
    kinds: tuple[int, ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        n = len(self.parents)
        if len(self.kinds) != n:
            raise ValueError("parents and kinds must have equal length")
        if self.names is not None and len(self.names) != n:
            raise ValueError("names must match node count")
        roots = [i for i, p in enumerate(self.parents) if p == -1]
        if len(roots) != 1:
            raise ValueError(f"expected exactly one root, found {len(roots)}")
        for i, p in enumerate(self.parents):
            if p != -1 and not 0 <= p < n:
                raise ValueError(f"parent of node {i} out of range: {p}")
            if p != -1 and self.kinds[i] not in (LEFT, CENTER, RIGHT):
                raise ValueError(f"node {i} has invalid child kind {self.kinds[i]}")
        kids: dict[int, list[int]] = {}
        for i, p in enumerate(self.parents):
            if p != -1:
                kids.setdefault(p, []).append(i)
        for p, cs in kids.items():
            ks = [self.kinds[c] for c in cs]
            if len(cs) > 3 or len(set(ks)) != len(ks):
                raise ValueError(f"node {p} has conflicting children {cs}")
        # acyclicity: every node must reach the root
        for i in range(n):
            seen = 0
            v = i
            while self.parents[v] != -1:
                v = self.parents[v]
                seen += 1
                if seen > n:
                    raise ValueError("parent links contain a cycle")

    @cached_property
    def root(self) -> int:
        return self.parents.index(-1)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in self.parents]
        for i, p in enumerate(self.parents):
            if p != -1:
                kids[p].append(i)
        for cs in kids:
            cs.sort(key=lambda c: (self.kinds[c], c))
        return tuple(tuple(cs) for cs in kids)

    @property
    def num_nodes(self) -> int:
        return len(self.parents)

    @cached_property
    def postorder(self) -> tuple[int, ...]:
        order: list[int] = []
        stack = [(self.root, False)]
        while stack:
            v, expanded = stack.pop()
            if expanded:
                order.append(v)
            else:
                stack.append((v, True))
                for c in reversed(self.children[v]):
                    stack.append((c, False))
        return tuple(order)


def harmony(g: GrammarSpec, t: TreeTopology, a: Sequence[int]) -> float:
    """Total harmony of an assignment: unary + edge bonuses + root bonus."""
    _check_assignment(g, t, a)
    tb = g.tables
    total = tb.root[a[t.root]]
    for v in range(t.num_nodes):
        total += tb.unary[a[v]]
        p = t.parents[v]
        if p != -1:
            total += tb.bonus[t.kinds[v]][a[p]][a[v]]
    return total


def delta_harmony(g: GrammarSpec, t: TreeTopology, a: Sequence[int],
                  node: int, new_symbol: int) -> float:
    """harmony(a') - harmony(a) for a' differing from a only at ``node``.

    Touches only the node, its parent and its children.
    """
    _check_assignment(g, t, a)
    if not 0 <= node < t.num_nodes:
        raise ValueError(f"node {node} out of range")
    if not 0 <= new_symbol <= g.num_symbols:
        raise ValueError(f"symbol {new_symbol} out of range")
    old = a[node]
    if new_symbol == old:
        return 0.0
    tb = g.tables
    d = tb.unary[new_symbol] - tb.unary[old]
    p = t.parents[node]
    if p == -1:
        d += tb.root[new_symbol] - tb.root[old]
    else:
        row = tb.bonus[t.kinds[node]][a[p]]
        d += row[new_symbol] - row[old]
    for c in t.children[node]:
        table = tb.bonus[t.kinds[c]]
        sc = a[c]
        d += table[new_symbol][sc] - table[old][sc]
    return d


def max_harmony_dp(g: GrammarSpec, t: TreeTopology,
                   include_root_bonus: bool = True) -> tuple[float, Assignment]:
    """Exact maximum harmony over all total symbol assignments.

    Bottom-up dynamic programming over (node, symbol); tables are
    |nodes| x |symbols|.  The optimum ranges over proper symbols only
    (the empty symbol is an evaluator concept, not a parse choice).
    Returns the maximum and one assignment attaining it.
    """
    tb = g.tables
    n_sym = g.num_symbols
    best: list[list[float]] = [[0.0] * (n_sym + 1) for _ in range(t.num_nodes)]
    choice: list[list[tuple[int, ...]]] = [[()] * (n_sym + 1)
                                           for _ in range(t.num_nodes)]
    for v in t.postorder:
        kids = t.children[v]
        for s in range(1, n_sym + 1):
            total = tb.unary[s]
            picks = []
            for c in kids:
                table = tb.bonus[t.kinds[c]][s]
                row = best[c]
                best_val = None
                best_sym = 1
                for cs in range(1, n_sym + 1):
                    val = row[cs] + table[cs]
                    if best_val is None or val > best_val:
                        best_val = val
                        best_sym = cs
                total += best_val  # type: ignore[operator]
                picks.append(best_sym)
            best[v][s] = total
            choice[v][s] = tuple(picks)
    root = t.root
    root_scores = [
        best[root][s] + (tb.root[s] if include_root_bonus else 0.0)
        for s in range(1, n_sym + 1)
    ]
    top = max(range(n_sym), key=lambda i: root_scores[i])
    assignment: Assignment = [0] * t.num_nodes
    stack = [(root, top + 1)]
    while stack:
        v, s = stack.pop()
        assignment[v] = s
        for c, cs in zip(t.children[v], choice[v][s]):
            stack.append((c, cs))
    return root_scores[top], assignment


def _check_assignment(g: GrammarSpec, t: TreeTopology, a: Sequence[int]) -> None:
    if len(a) != t.num_nodes:
        raise ValueError(f"assignment length {len(a)} != node count {t.num_nodes}")
    n = g.num_symbols
    for s in a:
        if not 0 <= s <= n:
            raise ValueError(f"symbol id {s} out of range 0..{n}")


# ---------------------------------------------------------------------------
# Built-in grammars
# ---------------------------------------------------------------------------

def herringbone(depth: int) -> TreeTopology:
    """Ternary caterpillar with roles c_0, l_1, c_1, r_1, ..., l_n, c_n, r_n.

    The root c_0 has children l_1 (left), c_1 (center), r_1 (right); each
    c_d likewise until depth n.  3*depth + 1 nodes total.
    """
    if depth < 1:
        raise ValueError(f"herringbone depth must be >= 1, got {depth}")
    parents = [-1]
    kinds = [-1]
    names = ["c_0"]
    spine = 0
    for d in range(1, depth + 1):
        for suffix, kind in (("l", LEFT), ("c", CENTER), ("r", RIGHT)):
            parents.append(spine)
            kinds.append(kind)
            names.append(f"{suffix}_{d}")
        spine = len(parents) - 2  # the center child just added
    return TreeTopology(tuple(parents), tuple(kinds), tuple(names))


def anbn_grammar(depth: int) -> tuple[GrammarSpec, TreeTopology]:
    """Grammar and herring-bone topology for the language A^n . B^n.

    S costs -4 anywhere but earns +1 at the root (net -3 there); terminals
    cost -1; an S parent earns +2 for each of: S or '.' in its center
    child, A in its left child, B in its right child.  The unique
    zero-harmony assignment puts S along the spine, A/B on the flanks and
    '.' at the bottom.
    """
    spec = GrammarSpec(
        symbols=("S", "A", "B", "."),
        unary={"S": -4.0, "A": -1.0, "B": -1.0, ".": -1.0},
        left_rules={("S", "A"): 2.0},
        center_rules={("S", "S"): 2.0, ("S", "."): 2.0},
        right_rules={("S", "B"): 2.0},
        root_bonus={"S": 1.0},
    )
    return spec, herringbone(depth)


def parens_grammar() -> GrammarSpec:
    """Balanced-parentheses grammar over {S, A, B, C, (, )}.

    Rule bonuses mirror the rewrite rules S->B, S->C, B->(A, B->(),
    A->S), C->SS; a +1 root bonus rewards S at the root.  Complete parse
    trees score 0; every proper subtree of one scores -1.
    """
    return GrammarSpec(
        symbols=("S", "A", "B", "C", "(", ")"),
        unary={"S": -2.0, "A": -3.0, "B": -3.0, "C": -3.0, "(": -1.0, ")": -1.0},
        left_rules={("S", "B"): 2.0, ("S", "C"): 2.0, ("B", "("): 2.0,
                    ("A", "S"): 2.0, ("C", "S"): 2.0},
        right_rules={("B", "A"): 2.0, ("B", ")"): 2.0, ("A", ")"): 2.0,
                     ("C", "S"): 2.0},
        root_bonus={"S": 1.0},
    )


# ---------------------------------------------------------------------------
# Grammar-spec text files
# ---------------------------------------------------------------------------

_SECTIONS = ("SYMBOLS", "LEFT_RULES", "CENTER_RULES", "RIGHT_RULES",
             "ROOT_BONUS", "EMPTY_PENALTY")


def grammar_to_text(g: GrammarSpec) -> str:
    """Render a grammar in the whitespace-delimited section format."""
    lines = ["SYMBOLS"]
    for s in g.symbols:
        lines.append(f"{s} {_fmt(g.unary.get(s, 0.0))}")
    for section, rules in (("LEFT_RULES", g.left_rules),
                           ("CENTER_RULES", g.center_rules),
                           ("RIGHT_RULES", g.right_rules)):
        if rules:
            lines.append(section)
            for (p, c) in sorted(rules):
                lines.append(f"{p} {c} {_fmt(rules[(p, c)])}")
    if g.root_bonus:
        lines.append("ROOT_BONUS")
        for s in sorted(g.root_bonus):
            lines.append(f"{s} {_fmt(g.root_bonus[s])}")
    if g.empty_penalty != 0.0:
        lines.append("EMPTY_PENALTY")
        lines.append(_fmt(g.empty_penalty))
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return repr(float(x))


def parse_grammar_text(text: str) -> GrammarSpec:
    """Parse the section format produced by :func:`grammar_to_text`.

    ``#`` starts a comment; tokens are whitespace-delimited; values are
    decimal literals.
    """
    symbols: list[str] = []
    unary: dict[str, float] = {}
    rules: dict[str, dict[tuple[str, str], float]] = {
        "LEFT_RULES": {}, "CENTER_RULES": {}, "RIGHT_RULES": {}}
    root_bonus: dict[str, float] = {}
    empty_penalty = 0.0
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line in _SECTIONS:
            section = line
            continue
        tokens = re.split(r"\s+", line)
        try:
            if section == "SYMBOLS":
                name, value = tokens
                symbols.append(name)
                unary[name] = float(value)
            elif section in ("LEFT_RULES", "CENTER_RULES", "RIGHT_RULES"):
                parent, child, value = tokens
                rules[section][(parent, child)] = float(value)
            elif section == "ROOT_BONUS":
                name, value = tokens
                root_bonus[name] = float(value)
            elif section == "EMPTY_PENALTY":
                (value,) = tokens
                empty_penalty = float(value)
            else:
                raise ValueError("content before any section header")
        except ValueError as exc:
            raise ValueError(f"grammar file line {lineno}: {exc}") from None
    return GrammarSpec(
        symbols=tuple(symbols),
        unary=unary,
        left_rules=rules["LEFT_RULES"],
        center_rules=rules["CENTER_RULES"],
        right_rules=rules["RIGHT_RULES"],
        root_bonus=root_bonus,
        empty_penalty=empty_penalty,
    )


def load_grammar(path) -> GrammarSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_grammar_text(fh.read())


def save_grammar(g: GrammarSpec, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(grammar_to_text(g))
