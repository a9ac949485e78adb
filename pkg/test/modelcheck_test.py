#!/usr/bin/env python
#
# Tests for the fixpoint model checker

import os
import random
import sys
import unittest

from test_helper import *

if __name__ == '__main__':
    # set up include path for direct test invocation during development
    sys.path.append(os.path.dirname(__file__) + "/..")

from hypothesis import given, settings

from modal.formula import parse
from modal.kripke import (KripkeModel, PointedModel, duplicate_state, enumerate_models,
                          random_model)
from modal.modelcheck import *


class TestModelCheck(unittest.TestCase):
    """Unittests for evaluation on hand-built models"""

    def test_modalities(self):
        m = two_state_chain()
        self.assertEqual(evaluate(m, parse("<a>p")), frozenset(['s0']))
        self.assertEqual(evaluate(m, parse("[a]p")), frozenset(['s0', 's1']))
        self.assertEqual(evaluate(m, parse("[a]ff")), frozenset(['s1']))

    def test_well_founded_box_fixpoint(self):
        """Assert that mu X.[a]X holds exactly where every path ends"""
        self.assertTrue(check(PointedModel(edgeless_point(), 's0'), parse(FIX)))
        self.assertFalse(check(PointedModel(reflexive_point(), 's0'), parse(FIX)))
        self.assertEqual(evaluate(two_state_chain(), parse(FIX)), frozenset(['s0', 's1']))

    def test_reachability(self):
        """Ensure that mu X.(p | <a>X) finds p along a path"""
        m = three_state_line()
        self.assertEqual(evaluate(m, parse("mu X.(p | <a>X)")), frozenset(['s0', 's1', 's2']))
        self.assertEqual(evaluate(m, parse("mu X.(q | <a>X)")), frozenset(['s0', 's1']))

    def test_infinitely_often(self):
        """Assert that nu X.mu Y.((p & <a>X) | <a>Y) needs p again and again"""
        g = parse("nu X.mu Y.((p & <a>X) | <a>Y)")
        self.assertEqual(evaluate(two_state_loop(), g), frozenset())
        self.assertEqual(evaluate(reflexive_point(), g), frozenset(['s0']))

    def test_phi1_witness(self):
        """Ensure that the first worked formula holds at the root of a 2-state chain"""
        m = KripkeModel(['s0', 's1'], {'a': [('s0', 's1')]}, {'s0': {'p'}, 's1': {'p'}})
        self.assertTrue(check(PointedModel(m, 's0'), parse(PHI1)))

    def test_unassigned_variable(self):
        self.assertRaises(UnassignedVariable, evaluate, edgeless_point(),
                          parse("<a>X | X", open=True))

    def test_environment(self):
        g = parse("<a>X", open=True)
        self.assertEqual(evaluate(two_state_chain(), g, {'X': ['s1']}), frozenset(['s0']))

    def test_unknown_agent_is_empty(self):
        m = edgeless_point()
        self.assertTrue(check(PointedModel(m, 's0'), parse("[b]ff")))
        self.assertFalse(check(PointedModel(m, 's0'), parse("<b>tt")))

    def test_satisfying_states_in_model_order(self):
        m = three_state_line()
        self.assertEqual(satisfying_states(m, parse("tt")), ['s0', 's1', 's2'])

    def test_valid_in(self):
        self.assertTrue(valid_in(reflexive_point(), parse("<a>tt")))
        self.assertFalse(valid_in(two_state_chain(), parse("<a>tt")))

    def test_two_agents(self):
        m = two_agent_model()
        self.assertTrue(check(PointedModel(m, 's0'), parse("<a>p & <b>q & [b]nu X.(q & <b>X)")))


class TestAgainstBruteForce(unittest.TestCase):
    """Iteration agrees with the subset-search definition of fixpoints"""

    def test_fixpoint_suite_on_small_models(self):
        """Assert equality on every model of at most two states"""
        suite = [parse(t) for t in FIXPOINT_SUITE]
        for n in (1, 2):
            for m in enumerate_models(n, ['a'], ['p']):
                for g in suite:
                    self.assertEqual(evaluate(m, g), brute_eval(m, g), (str(m), str(g)))

    @settings(deadline=None, max_examples=50)
    @given(models(max_states=3))
    def test_fixpoint_suite_three_states(self, m):
        for text in FIXPOINT_SUITE:
            g = parse(text)
            self.assertEqual(evaluate(m, g), brute_eval(m, g), text)


class TestBisimulationInvariance(unittest.TestCase):
    """Bisimilar pointed models satisfy the same closed formulas"""

    def test_duplicated_point(self):
        rng = random.Random(3)
        for _ in range(10):
            m = random_model(rng, 3, ['a'], ['p'], 0.4)
            pm = PointedModel(m, 's0')
            twin = PointedModel(duplicate_state(m, 's0'), "s0'")
            for _ in range(15):
                g = random_formula(rng, 3, ('p',), ('a',))
                self.assertEqual(check(pm, g), check(twin, g), str(g))


if __name__ == '__main__':
    unittest.main()
