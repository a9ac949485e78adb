#!/usr/bin/env python
#
# Tests for the branch encoding

import os
import sys
import unittest

from test_helper import *

if __name__ == '__main__':
    # set up include path for direct test invocation during development
    sys.path.append(os.path.dirname(__file__) + "/..")

from modal.formula import LogicSpec, parse, parse_logic, size
from modal.modelcheck import check
from modal.muencode import *
from modal.oracle import NoneWithin, is_found, sat_bounded
from modal.tableau import EPSILON, Branch, applicable_rules, apply_in_place, solve

K = LogicSpec()
TINY = ("tt", "p", "p & ~p", "<a>p", "[a]p & <a>q", FIX)


def encoded_sat(text, logic="", states=2):
    spec = parse_logic(logic) if logic else K
    g, enc = encode(parse(text), spec)
    return sat_bounded(g, LogicSpec(), states, exclusive=enc.graph_names())


class TestGraphs(unittest.TestCase):
    """Unittests for the enumeration of compatible dependency graphs"""

    def test_diamond_graphs(self):
        """Assert that <a>p has six graphs and one encoded agent"""
        enc = Encoder(parse("<a>p"), K)
        self.assertEqual(len(enc.graphs()), 6)
        self.assertEqual([a.name for a in enc.agents], ['a__1'])
        for g in enc.graphs():
            if Diamond('a', Prop('p')) in g.phi:
                self.assertTrue(g.has(Diamond('a', Prop('p')), OUT, BOT))

    def test_fixpoint_graphs(self):
        """Ensure that mu X.[a]X has nine graphs and no agents over K"""
        enc = Encoder(parse(FIX), K)
        self.assertEqual(len(enc.graphs()), 9)
        self.assertEqual(enc.agents, [])
        for g in enc.graphs():
            if Var('X') in g.phi:
                self.assertIn(parse(FIX), g.phi)
                self.assertIn(('X', Var('X'), parse(FIX)), g.edges)

    def test_serial_box_gets_agent(self):
        enc = Encoder(parse(FIX), parse_logic("a=D"))
        self.assertEqual([a.name for a in enc.agents], ['a__2'])
        self.assertEqual(len(enc.graphs()), 5)

    def test_contradiction_has_no_graph_with_root(self):
        enc = Encoder(parse("p & ~p"), K)
        self.assertFalse(any(enc.f in g.phi for g in enc.graphs()))

    def test_names_are_stable(self):
        g = DepGraph(frozenset([Prop('p')]))
        self.assertEqual(g.name, DepGraph(frozenset([Prop('p')])).name)
        self.assertTrue(g.name.startswith('g_'))
        self.assertEqual(len(g.name), 12)
        self.assertEqual(g.serialize(), "V{p}E{}L{}")

    def test_cap(self):
        """Ensure that the default cap admits |sub(f)| = 5 and no more"""
        self.assertEqual(len(Encoder(parse("[a]p & <a>q"), K).sub), 5)
        self.assertRaises(GraphCapExceeded, Encoder, parse("[a]p & <a>(q | p)"), K)
        self.assertRaises(GraphCapExceeded, Encoder, parse("[a]p & <a>q"), K, 4)

    def test_euclidean_rejected(self):
        self.assertRaises(EncodingError, Encoder, parse("<a>p"), parse_logic("a=K5"))

    def test_table(self):
        enc = Encoder(parse("<a>p"), K)
        text = format_table(enc)
        self.assertEqual(len(text.splitlines()), 7)
        self.assertTrue(text.splitlines()[-1].startswith("a__1 "))
        self.assertIn('a__1', enc.table())


class TestBranchGraphs(unittest.TestCase):
    """Unittests for graphs read off tableau branches"""

    def test_phi1_branch(self):
        """Assert that both prefixes of the PHI1 branch give compatible graphs"""
        f = parse(PHI1)
        branch = solve(f, K).branch
        enc = Encoder(f, K, cap=size(f))
        (child,) = branch.children(EPSILON)
        g_root = branch_to_graph(branch, EPSILON, enc)
        g_child = branch_to_graph(branch, child, enc)
        self.assertTrue(enc.com(g_root))
        self.assertTrue(enc.com(g_child))
        self.assertTrue(enc.child(g_root, g_child, 'a', Prop('p')))
        self.assertTrue(enc.child(g_root, g_child, 'a'))
        self.assertTrue(g_root.has(Diamond('a', Prop('p')), OUT, BOT))
        self.assertTrue(g_child.has(Var('X'), IN, TOP))

    def test_child_needs_box_bodies(self):
        """Ensure that a child missing a box body is rejected"""
        f = parse(PHI1)
        branch = solve(f, K).branch
        enc = Encoder(f, K, cap=size(f))
        g_root = branch_to_graph(branch, EPSILON, enc)
        bare = DepGraph(frozenset([Prop('p')]), labels=frozenset([(Prop('p'), IN, TOP)]))
        self.assertFalse(enc.child(g_root, bare, 'a', Prop('p')))

    def test_closed_branch(self):
        b = Branch.initial(parse("p & ~p"), K)
        for inst in applicable_rules(b):
            apply_in_place(b, inst)
        enc = Encoder(parse("p & ~p"), K)
        self.assertRaises(EncodingError, branch_to_graph, b, EPSILON, enc)

    def test_branch_model_satisfies_rules(self):
        """Assert that an open branch gives a model of the encoding"""
        for text in ("tt", "<a>p"):
            f = parse(text)
            g, enc = encode(f, K)
            pm = branch_to_model(solve(f, K).branch, enc)
            self.assertTrue(check(pm, enc.build_rules()), text)
            self.assertTrue(check(pm, g), text)


class TestEncoding(unittest.TestCase):
    """Unittests for satisfiability of the encoding against the oracle"""

    def test_satisfiable(self):
        for text in ("tt", "p", "<a>p"):
            self.assertTrue(is_found(encoded_sat(text)), text)

    def test_contradiction(self):
        g, _ = encode(parse("p & ~p"), K)
        self.assertEqual(g.right, FF)
        self.assertIsInstance(encoded_sat("p & ~p"), NoneWithin)

    def test_well_founded_fixpoint(self):
        """Ensure that mu X.[a]X is encoded satisfiable over K only"""
        self.assertTrue(is_found(encoded_sat(FIX, states=1)))
        self.assertIsInstance(encoded_sat(FIX, "a=T"), NoneWithin)
        self.assertIsInstance(encoded_sat(FIX, "a=D"), NoneWithin)

    def test_infinite_path_forbidden(self):
        """Assert that X recurring inside one graph is an infinite path"""
        enc = Encoder(parse(FIX), parse_logic("a=T"))
        self.assertNotEqual(enc.fp_x(EMPTY, (), 'X'), FF)
        self.assertEqual(Encoder(parse(FIX), K).inf_path(), FF)

    def test_module_helpers(self):
        f = parse("<a>p")
        self.assertEqual(len(enumerate_graphs(f)), 6)
        self.assertIsInstance(build_rules(f), Nu)

    def test_tiny_suite(self):
        """Assert that the encoding is satisfiable exactly when f is, over K, T and D"""
        for text in TINY:
            f = parse(text)
            for logic in ("", "a=T", "a=D"):
                spec = parse_logic(logic) if logic else K
                expected = is_found(sat_bounded(f, spec, 3))
                g, enc = encode(f, spec)
                if len(enc.sub) <= 3:
                    got = is_found(sat_bounded(g, K, 2, exclusive=enc.graph_names()))
                else:
                    verdict = solve(f, spec)
                    got = verdict.name == 'SAT' and \
                        check(branch_to_model(verdict.branch, enc), g)
                self.assertEqual(got, expected, (text, logic))



if __name__ == '__main__':
    unittest.main()
