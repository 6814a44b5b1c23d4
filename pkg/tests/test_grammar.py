import random

import pytest

from harmonium.grammar import (
    CENTER,
    LEFT,
    RIGHT,
    GrammarSpec,
    TreeTopology,
    anbn_grammar,
    delta_harmony,
    grammar_to_text,
    harmony,
    herringbone,
    max_harmony_dp,
    parens_grammar,
    parse_grammar_text,
)
from oracles import (
    exhaustive_max_harmony,
    random_assignment,
    random_grammar,
    random_topology,
)


def names_to_ids(g, names):
    return [g.symbol_id(n) for n in names]


class TestAnbnGrammar:
    def test_node_counts(self):
        assert herringbone(1).num_nodes == 4
        assert herringbone(1024).num_nodes == 3073

    def test_depth_one_grammatical_assignment_scores_zero(self):
        g, t = anbn_grammar(1)
        assert harmony(g, t, names_to_ids(g, ["S", "A", ".", "B"])) == 0.0

    def test_depth_one_all_s(self):
        g, t = anbn_grammar(1)
        a = [g.symbol_id("S")] * 4
        assert harmony(g, t, a) == -13.0

    def test_unique_zero_assignment(self):
        for n in (1, 2, 3):
            g, t = anbn_grammar(n)
            val, a = max_harmony_dp(g, t)
            assert val == 0.0
            assert exhaustive_max_harmony(g, t) == 0.0 if t.num_nodes <= 7 else True
            # spine of S, flanks A/B, final '.',
            names = [g.symbol_name(s) for s in a]
            assert names[0] == "S"
            assert names[-2] == "."  # center of the deepest triple
            # count zeros: the optimum must be unique
            if t.num_nodes <= 7:
                import itertools
                zeros = 0
                for cand in itertools.product(range(1, 5), repeat=t.num_nodes):
                    if harmony(g, t, list(cand)) == 0.0:
                        zeros += 1
                assert zeros == 1

    def test_grammar_rejects_zero_depth(self):
        with pytest.raises(ValueError):
            anbn_grammar(0)


class TestParensGrammar:
    def test_table_values(self):
        g = parens_grammar()
        assert g.unary["S"] == -2.0
        assert g.right_rules[("A", ")")] == 2.0
        assert g.root_bonus["S"] == 1.0

    def test_figure_tree_scores_zero(self):
        g = parens_grammar()
        parents = (-1, 0, 1, 2, 3, 3, 1, 6, 7, 7)
        kinds = (-1, LEFT, LEFT, LEFT, LEFT, RIGHT, RIGHT, LEFT, LEFT, RIGHT)
        t = TreeTopology(parents, kinds)
        a = names_to_ids(g, ["S", "C", "S", "B", "(", ")", "S", "B", "(", ")"])
        assert harmony(g, t, a) == 0.0
        assert max_harmony_dp(g, t)[0] == 0.0

    def test_single_node_max(self):
        g = parens_grammar()
        t = TreeTopology((-1,), (-1,))
        val, a = max_harmony_dp(g, t, include_root_bonus=False)
        assert val == -1.0
        assert g.symbol_name(a[0]) in ("(", ")")

    def test_two_leaf_tree(self):
        g = parens_grammar()
        t = TreeTopology((-1, 0, 0), (-1, LEFT, RIGHT))
        val, a = max_harmony_dp(g, t)
        assert val == -1.0
        assert [g.symbol_name(s) for s in a] == ["B", "(", ")"]


class TestDeltaHarmony:
    def test_identity_move(self):
        g, t = anbn_grammar(1)
        a = names_to_ids(g, ["S", "A", ".", "B"])
        assert delta_harmony(g, t, a, 2, a[2]) == 0.0

    def test_anbn_change_right_leaf(self):
        g, t = anbn_grammar(1)
        a = names_to_ids(g, ["S", "A", ".", "B"])
        d = delta_harmony(g, t, a, 3, g.symbol_id("S"))
        assert d == -5.0
        a2 = list(a)
        a2[3] = g.symbol_id("S")
        assert harmony(g, t, a2) == -5.0

    def test_parens_single_node_swap(self):
        g = parens_grammar()
        t = TreeTopology((-1,), (-1,))
        a = [g.symbol_id("(")]
        assert delta_harmony(g, t, a, 0, g.symbol_id(")")) == 0.0

    def test_consistency_random(self):
        rng = random.Random(42)
        for _ in range(1000):
            g = random_grammar(rng)
            t = random_topology(rng)
            a = random_assignment(rng, g, t)
            node = rng.randrange(t.num_nodes)
            new_sym = rng.randint(0, g.num_symbols)
            d = delta_harmony(g, t, a, node, new_sym)
            a2 = list(a)
            a2[node] = new_sym
            assert harmony(g, t, a2) == harmony(g, t, a) + d


class TestMaxHarmonyDP:
    @pytest.mark.parametrize("seed", range(30))
    def test_matches_exhaustive_random(self, seed):
        rng = random.Random(seed)
        g = random_grammar(rng, max_symbols=3)
        t = random_topology(rng, max_nodes=6)
        for with_root in (True, False):
            val, a = max_harmony_dp(g, t, include_root_bonus=with_root)
            got = harmony(g, t, a)
            if with_root:
                assert got == val
            else:
                assert got - g.tables.root[a[t.root]] == val
            assert val == exhaustive_max_harmony(g, t, with_root)

    def test_herringbone_dp(self):
        g, t = anbn_grammar(2)
        assert max_harmony_dp(g, t)[0] == 0.0
        assert max_harmony_dp(g, t, include_root_bonus=False)[0] == -1.0


class TestTopologyValidation:
    def test_two_roots_rejected(self):
        with pytest.raises(ValueError):
            TreeTopology((-1, -1), (-1, -1))

    def test_cycle_rejected(self):
        with pytest.raises(ValueError):
            TreeTopology((1, 0, -1), (LEFT, LEFT, -1))

    def test_duplicate_kind_rejected(self):
        with pytest.raises(ValueError):
            TreeTopology((-1, 0, 0), (-1, LEFT, LEFT))

    def test_children_ordered_by_kind(self):
        t = TreeTopology((-1, 0, 0, 0), (-1, RIGHT, LEFT, CENTER))
        assert t.children[0] == (2, 3, 1)


class TestGrammarValidation:
    def test_undeclared_rule_symbol(self):
        with pytest.raises(ValueError):
            GrammarSpec(symbols=("a",), unary={"a": -1.0},
                        left_rules={("a", "b"): 1.0})

    def test_unknown_symbol_lookup(self):
        g = parens_grammar()
        with pytest.raises(ValueError):
            g.symbol_id("Q")

    def test_assignment_validation(self):
        g, t = anbn_grammar(1)
        with pytest.raises(ValueError):
            harmony(g, t, [1, 2, 3])
        with pytest.raises(ValueError):
            harmony(g, t, [9, 1, 1, 1])


class TestGrammarFiles:
    def test_round_trip_builtins(self):
        for g in (parens_grammar(), anbn_grammar(1)[0]):
            g2 = parse_grammar_text(grammar_to_text(g))
            assert g2.symbols == g.symbols
            assert g2.unary == {s: g.unary.get(s, 0.0) for s in g.symbols}
            assert dict(g2.left_rules) == dict(g.left_rules)
            assert dict(g2.center_rules) == dict(g.center_rules)
            assert dict(g2.right_rules) == dict(g.right_rules)
            assert dict(g2.root_bonus) == dict(g.root_bonus)

    def test_comments_and_blank_lines(self):
        text = """
# a tiny grammar
SYMBOLS
x -1.5   # inline comment
y -2.0

LEFT_RULES
x y 2.0
ROOT_BONUS
x 1.0
"""
        g = parse_grammar_text(text)
        assert g.symbols == ("x", "y")
        assert g.unary["x"] == -1.5
        assert g.left_rules[("x", "y")] == 2.0

    def test_malformed_line_reports_position(self):
        with pytest.raises(ValueError, match="line 3"):
            parse_grammar_text("SYMBOLS\nx -1\ny\n")

    def test_content_before_section_rejected(self):
        with pytest.raises(ValueError):
            parse_grammar_text("x -1\n")
