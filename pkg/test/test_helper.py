#!/usr/bin/env python
#
# Model and formula factories shared by the test modules

from itertools import combinations
import os
import random
import sys

sys.path.append(os.path.dirname(__file__) + "/..")

from hypothesis import strategies as st

from modal.formula import *
from modal.kripke import KripkeModel
from modal.oracle import random_formula

###############################################################################
# Models
###############################################################################

def edgeless_point(props=()):
    return KripkeModel(['s0'], {'a': []}, {'s0': set(props)})


def reflexive_point(props=('p',)):
    return KripkeModel(['s0'], {'a': [('s0', 's0')]}, {'s0': set(props)})


def two_state_chain():
    """s0 -a-> s1, p at s1 only."""
    return KripkeModel(['s0', 's1'], {'a': [('s0', 's1')]}, {'s1': {'p'}})


def two_state_loop():
    """s0 -a-> s1 -a-> s1, p at s0."""
    return KripkeModel(['s0', 's1'], {'a': [('s0', 's1'), ('s1', 's1')]},
                       {'s0': {'p'}})


def euclidean_witness():
    """{(s,t),(t,t)}: euclidean but neither reflexive nor symmetric."""
    return KripkeModel(['s', 't'], {'a': [('s', 't'), ('t', 't')]}, {'t': {'p'}})


def three_state_line():
    """s0 -a-> s1 -a-> s2, p at s2, q at s1."""
    return KripkeModel(['s0', 's1', 's2'], {'a': [('s0', 's1'), ('s1', 's2')]},
                       {'s1': {'q'}, 's2': {'p'}})


def two_agent_model():
    return KripkeModel(['s0', 's1', 's2'],
                       {'a': [('s0', 's1')], 'b': [('s0', 's2'), ('s2', 's2')]},
                       {'s1': {'p'}, 's2': {'q'}})

###############################################################################
# Formulas
###############################################################################

PHI1 = "(p & <a>p) & mu X.(~p | [a]X)"
PHI2 = "<b>p & mu X.([b]~p | [b]X)"
FIX = "mu X.[a]X"

# one agent, one proposition; used against the brute-force evaluator
FIXPOINT_SUITE = [
    "tt", "ff", "p", "~p",
    "<a>p", "[a]p", "<a>[a]p", "[a]<a>p",
    "mu X.[a]X", "nu X.<a>X", "mu X.<a>X", "nu X.[a]X",
    "mu X.(p | <a>X)", "nu X.(p & [a]X)", "mu X.(p | [a]X)", "nu X.(p & <a>X)",
    "nu X.mu Y.((p & <a>X) | <a>Y)", "mu X.nu Y.((p | [a]X) & [a]Y)",
    "nu X.(<a>tt & [a]X)", "mu X.(~p | <a>(p & X))",
]

TINY_SUITE = ["tt", "p", "p & ~p", "<a>p", "[a]p & <a>q", FIX]

###############################################################################
# Brute-force fixpoint semantics
###############################################################################

def _subsets(states):
    for k in range(len(states) + 1):
        for combo in combinations(states, k):
            yield frozenset(combo)


def brute_eval(m, g, env=None):
    """Evaluate by searching all subsets for pre- and post-fixpoints."""
    env = env or {}
    states = frozenset(m.states)
    if isinstance(g, Tt):
        return states
    if isinstance(g, Ff):
        return frozenset()
    if isinstance(g, Prop):
        return frozenset(s for s in m.states if g.name in m.valuation[s])
    if isinstance(g, NegProp):
        return frozenset(s for s in m.states if g.name not in m.valuation[s])
    if isinstance(g, Var):
        val = env[g.name]
        return states - val if g.dual else val
    if isinstance(g, And):
        return brute_eval(m, g.left, env) & brute_eval(m, g.right, env)
    if isinstance(g, Or):
        return brute_eval(m, g.left, env) | brute_eval(m, g.right, env)
    if isinstance(g, (Box, Diamond)):
        body = brute_eval(m, g.body, env)
        rel = m.relations.get(g.agent, frozenset())
        out = set()
        for s in m.states:
            succ = set(t for u, t in rel if u == s)
            if isinstance(g, Box) and succ <= body:
                out.add(s)
            if isinstance(g, Diamond) and succ & body:
                out.add(s)
        return frozenset(out)
    if isinstance(g, Mu):
        out = states
        for cand in _subsets(sorted(states)):
            inner = dict(env)
            inner[g.var] = cand
            if brute_eval(m, g.body, inner) <= cand:
                out = out & cand
        return out
    if isinstance(g, Nu):
        out = frozenset()
        for cand in _subsets(sorted(states)):
            inner = dict(env)
            inner[g.var] = cand
            if cand <= brute_eval(m, g.body, inner):
                out = out | cand
        return out
    raise TypeError(g)

###############################################################################
# Hypothesis strategies
###############################################################################

def formulas(max_depth=3, prop_pool=('p', 'q'), agent_pool=('a', 'b'), fix_prob=0.3):
    """Closed formulas drawn with the seeded corpus generator."""
    return st.integers(min_value=0, max_value=2 ** 32 - 1).map(
        lambda seed: random_formula(random.Random(seed), max_depth, prop_pool,
                                    agent_pool, fix_prob))


@st.composite
def models(draw, max_states=3, agent_pool=('a',), prop_pool=('p',)):
    n = draw(st.integers(min_value=1, max_value=max_states))
    states = ["s%d" % i for i in range(n)]
    pairs = [(s, t) for s in states for t in states]
    rels = {}
    for a in agent_pool:
        rels[a] = draw(st.sets(st.sampled_from(pairs)))
    val = {}
    for s in states:
        val[s] = draw(st.sets(st.sampled_from(list(prop_pool))))
    return KripkeModel(states, rels, val)
