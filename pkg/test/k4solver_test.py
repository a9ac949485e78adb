#!/usr/bin/env python
#
# Tests for the single-agent transitive solver

import os
import sys
import unittest

from test_helper import *

if __name__ == '__main__':
    # set up include path for direct test invocation during development
    sys.path.append(os.path.dirname(__file__) + "/..")

from modal.formula import LogicSpec, parse, size
from modal.k4solver import *
from modal.kripke import satisfies_spec
from modal.modelcheck import check
from modal.oracle import check_corpus, corpus, is_found, sat_bounded


class TestK4Solver(unittest.TestCase):
    """Unittests for verdicts over K4, D4 and S4"""

    CASES = [
        (FIX, {'K4': 'SAT', 'D4': 'UNSAT', 'S4': 'UNSAT'}),
        ("[a]ff", {'K4': 'SAT', 'D4': 'UNSAT', 'S4': 'UNSAT'}),
        ("~p & [a]p", {'K4': 'SAT', 'D4': 'SAT', 'S4': 'UNSAT'}),
        ("[a]p & <a><a>~p", {'K4': 'UNSAT', 'D4': 'UNSAT', 'S4': 'UNSAT'}),
        ("<a>p & [a]<a>p", {'K4': 'SAT', 'D4': 'SAT', 'S4': 'SAT'}),
        ("nu X.<a>X", {'K4': 'SAT', 'D4': 'SAT', 'S4': 'SAT'}),
    ]

    def test_cases(self):
        for text, expected in self.CASES:
            for logic in LOGICS:
                verdict, stats = solve_k4(parse(text), logic)
                self.assertEqual(verdict.name, expected[logic], "%s over %s" % (text, logic))

    def test_witness_is_transitive(self):
        """Assert that a SAT witness satisfies f and the frame conditions"""
        f = parse("<a>p & [a]<a>p")
        for logic in LOGICS:
            verdict, _ = solve_k4(f, logic)
            self.assertTrue(check(verdict.witness, f))
            spec = LogicSpec({'a': logic_conditions(logic)})
            self.assertTrue(satisfies_spec(verdict.witness.model, spec))

    def test_agrees_with_bounded_search(self):
        """Ensure that each SAT case also has a small model and UNSAT none"""
        for text, expected in self.CASES:
            f = parse(text)
            found = sat_bounded(f, LogicSpec({'a': {'4'}}), 3)
            self.assertEqual(is_found(found), expected['K4'] == 'SAT', text)

    def test_loop_back_keeps_chain_short(self):
        _, stats = solve_k4(parse("nu X.<a>X"), 'K4')
        self.assertEqual(stats.max_depth, 1)
        self.assertTrue(stats.depth_within_bound(parse("nu X.<a>X")))

    def test_step_budget(self):
        verdict, stats = solve_k4(parse("<a>p"), 'K4', max_steps=0)
        self.assertEqual(verdict.name, 'UNKNOWN')
        self.assertEqual(verdict.bound_hit, 'max_steps')

    def test_single_agent_only(self):
        self.assertRaises(K4Error, solve_k4, parse("<a>p & <b>p"), 'K4')

    def test_logic_names(self):
        self.assertEqual(logic_conditions('S4'), frozenset('T4'))
        self.assertEqual(logic_conditions('KD4'), frozenset('D4'))
        self.assertRaises(K4Error, logic_conditions, 'K')
        self.assertRaises(K4Error, logic_conditions, 'S5')

    def test_small_model_bound(self):
        self.assertEqual(small_model_bound(3), 11)
        self.assertEqual(small_model_bound(parse("<a>p")), 3)

    def test_seeded_corpus(self):
        """Assert that a seeded corpus agrees with bounded search and is always decided"""
        cases = check_corpus('k4', 7, 12, depth=2, caps=(3, 3, 3))
        for c in cases:
            self.assertTrue(c.ok, c.line())
            self.assertNotEqual(c.detail['k4'], 'UNKNOWN')

    def test_small_models_within_bound(self):
        """Ensure that small satisfiable formulas have a model within the bound"""
        spec = LogicSpec({'a': {'4'}})
        for f in corpus(3, 30, depth=1, agent_pool=('a',)):
            if size(f) > 3:
                continue
            verdict, _ = solve_k4(f, 'K4')
            found = sat_bounded(f, spec, min(small_model_bound(f), 3))
            self.assertEqual(verdict.name == 'SAT', is_found(found), str(f))


if __name__ == '__main__':
    unittest.main()
