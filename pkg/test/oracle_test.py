#!/usr/bin/env python
#
# Tests for the bounded oracle, differential checks and corpora

import os
import random
import sys
import unittest
from unittest import mock

from test_helper import *

if __name__ == '__main__':
    # set up include path for direct test invocation during development
    sys.path.append(os.path.dirname(__file__) + "/..")

from hypothesis import given, settings

from modal.formula import LogicSpec, parse, parse_logic, size
from modal import oracle
from modal.kripke import CapExceeded, satisfies_spec
from modal.modelcheck import check
from modal.oracle import *
from modal.translate import translate_T_mu

K = LogicSpec()


class TestSatBounded(unittest.TestCase):
    """Unittests for exhaustive search over small models"""

    def test_well_founded_fixpoint(self):
        """Assert that mu X.[a]X has a 1-state K model and no T model"""
        found = sat_bounded(parse(FIX), K, 1)
        self.assertEqual(found.name, 'FOUND')
        self.assertEqual(found.n_states, 1)
        none = sat_bounded(parse(FIX), parse_logic("a=T"), 3)
        self.assertEqual(none.name, 'NONE')
        self.assertEqual(none.n_states, 3)

    def test_spec_agents_get_frames(self):
        """Ensure that agents named only by the logic still get a relation"""
        found = sat_bounded(parse("tt"), parse_logic("a=D"), 1)
        self.assertTrue(is_found(found))
        self.assertIn(('s0', 's0'), found.witness.model.relation('a'))

    def test_smallest_model_first(self):
        found = sat_bounded(parse("<a>p & <a>~p"), K, 3)
        self.assertEqual(found.n_states, 2)

    def test_exclusive_propositions(self):
        found = sat_bounded(parse("p & q"), K, 2, exclusive=('p', 'q'))
        self.assertFalse(is_found(found))

    def test_cap(self):
        self.assertRaises(CapExceeded, sat_bounded, parse("p & ~p"), K, 3, (), 2)

    @settings(deadline=None, max_examples=30)
    @given(formulas(max_depth=2, agent_pool=('a',)))
    def test_witness_verifies(self, f):
        """Assert that every witness satisfies f over a frame of the logic"""
        spec = parse_logic("a=T")
        found = sat_bounded(f, spec, 2)
        if is_found(found):
            self.assertTrue(check(found.witness, f))
            self.assertTrue(satisfies_spec(found.witness.model, spec))


class TestDifferential(unittest.TestCase):
    """Unittests for comparing two formulas across logics"""

    def test_translation_agrees(self):
        f = parse(FIX)
        rep = differential(f, translate_T_mu(f, ['a']), parse_logic("a=T"), K, 2, 2)
        self.assertTrue(rep.consistent)
        self.assertEqual(rep.as_dict()['oracle_f'], 'NONE')
        self.assertEqual(rep.as_dict()['tableau_g'], 'UNSAT')

    def test_disagreement_is_reported(self):
        """Ensure that a satisfiable f against an unsatisfiable g is a contradiction"""
        rep = differential(parse("p"), parse("p & ~p"), K, K, 1, 1)
        self.assertFalse(rep.consistent)
        self.assertIn("f has a model but g is UNSAT", rep.contradictions)

    def test_without_tableau(self):
        rep = differential(parse("p"), parse("p & ~p"), K, K, 1, 1, use_tableau=False)
        self.assertTrue(rep.consistent)
        self.assertIsNone(rep.as_dict()['tableau_f'])


class TestCorpus(unittest.TestCase):
    """Unittests for random formulas, shrinking and corpus drivers"""

    def test_random_formulas_are_closed(self):
        rng = random.Random(0)
        for _ in range(50):
            f = random_formula(rng, 3)
            self.assertTrue(is_closed(f))
            names = bound_vars(f)
            self.assertEqual(len(names), len(set(names)))

    def test_corpus_is_reproducible(self):
        self.assertEqual(corpus(4, 10), corpus(4, 10))

    def test_shrink(self):
        """Assert that shrinking keeps the failure and never grows"""
        f = parse("(<a>(p & q) | [b]p) & mu X.(q | <a>X)")
        still = lambda g: 'q' in props(g)
        small = shrink(f, still)
        self.assertTrue(still(small))
        self.assertEqual(small, Prop('q'))

    def test_shrink_keeps_unshrinkable(self):
        f = parse("p")
        self.assertEqual(shrink(f, lambda g: g == f), f)

    def test_check_corpus(self):
        cases = check_corpus('tableau', 1, 5, depth=1)
        self.assertEqual([c.index for c in cases], list(range(5)))
        for c in cases:
            self.assertIn(c.detail['tableau'], ('SAT', 'UNSAT', 'UNKNOWN'))
            self.assertTrue(c.line().startswith("%d " % c.index))

    def test_encode_corpus_respects_cap(self):
        for c in check_corpus('encode', 2, 3, depth=1, caps=(1, 1, 2)):
            self.assertTrue(size(c.formula) <= 2)

    def test_unknown_kind(self):
        self.assertRaises(ValueError, check_corpus, 'nope', 0, 1)

    def test_contradictions_are_shrunk(self):
        """Assert that each failing case carries a minimized formula"""
        failing = lambda f, rng, caps: ({}, False)
        with mock.patch.dict(oracle._CHECKS, {'tableau': failing}):
            cases = check_corpus('tableau', 3, 4)
        for c in cases:
            self.assertFalse(c.ok)
            self.assertEqual(size(c.shrunk), 1)
            self.assertTrue(is_closed(c.shrunk))
            self.assertIn(" shrunk=", c.line())

    def test_passing_cases_are_not_shrunk(self):
        with mock.patch.dict(oracle._CHECKS, {'tableau': lambda f, rng, caps: ({}, True)}):
            cases = check_corpus('tableau', 3, 2)
        self.assertEqual([c.shrunk for c in cases], [None, None])

    def test_translation_corpus(self):
        """Ensure that a seeded translation corpus has no contradictions"""
        cases = check_corpus('translations', 5, 4, depth=1, caps=(2, 2, 3),
                             agent_pool=('a',))
        for c in cases:
            self.assertTrue(c.ok, c.line())
            self.assertIn(c.detail['translation'][0], 'DT4BKo')



if __name__ == '__main__':
    unittest.main()
