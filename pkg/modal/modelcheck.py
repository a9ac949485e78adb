#!/usr/bin/env python
#
# modalmu: fixpoint model checking

'''Evaluate formulas on finite Kripke models.

State sets are int bit-vectors indexed by the model's state order.
Fixpoints are computed by plain iteration, innermost first: mu from the
empty set, nu from the full set.
'''

import logging

from modal.formula import (Tt, Ff, Prop, NegProp, Var, And, Or, Box, Diamond,
                           Mu, Nu, free_vars)

logger = logging.getLogger(__name__)


class UnassignedVariable(KeyError):
    pass


class ModelChecker(object):
    """Bit-vector evaluator bound to one model."""

    def __init__(self, model):
        self.model = model
        self.n = len(model.states)
        self.full = (1 << self.n) - 1
        self.prop_mask = {}
        for i, s in enumerate(model.states):
            for p in model.valuation[s]:
                self.prop_mask[p] = self.prop_mask.get(p, 0) | (1 << i)
        self.succ_mask = {}
        for agent, pairs in model.relations.items():
            masks = [0] * self.n
            for s, t in pairs:
                masks[model.index[s]] |= 1 << model.index[t]
            self.succ_mask[agent] = masks
        self.iterations = 0

    def to_mask(self, states):
        mask = 0
        for s in states:
            mask |= 1 << self.model.index[s]
        return mask

    def to_states(self, mask):
        return frozenset(s for i, s in enumerate(self.model.states) if mask >> i & 1)

    def eval_mask(self, f, env):
        if isinstance(f, Tt):
            return self.full
        if isinstance(f, Ff):
            return 0
        if isinstance(f, Prop):
            return self.prop_mask.get(f.name, 0)
        if isinstance(f, NegProp):
            return self.full & ~self.prop_mask.get(f.name, 0)
        if isinstance(f, Var):
            if f.name not in env:
                raise UnassignedVariable(f.name)
            mask = env[f.name]
            return self.full & ~mask if f.dual else mask
        if isinstance(f, And):
            left = self.eval_mask(f.left, env)
            if not left:
                return 0
            return left & self.eval_mask(f.right, env)
        if isinstance(f, Or):
            left = self.eval_mask(f.left, env)
            if left == self.full:
                return left
            return left | self.eval_mask(f.right, env)
        if isinstance(f, Box):
            body = self.eval_mask(f.body, env)
            succ = self.succ_mask.get(f.agent)
            if succ is None:
                return self.full
            out = 0
            for i in range(self.n):
                if not succ[i] & ~body:
                    out |= 1 << i
            return out
        if isinstance(f, Diamond):
            body = self.eval_mask(f.body, env)
            succ = self.succ_mask.get(f.agent)
            if succ is None or not body:
                return 0
            out = 0
            for i in range(self.n):
                if succ[i] & body:
                    out |= 1 << i
            return out
        if isinstance(f, (Mu, Nu)):
            current = 0 if isinstance(f, Mu) else self.full
            inner = dict(env)
            while True:
                self.iterations += 1
                inner[f.var] = current
                nxt = self.eval_mask(f.body, inner)
                if nxt == current:
                    return current
                current = nxt
        raise TypeError("not a formula: %r" % (f,))


def evaluate(m, f, env=None):
    """The set of states of m satisfying f under env (var -> states)."""
    mc = ModelChecker(m)
    masks = dict((k, mc.to_mask(v)) for k, v in (env or {}).items())
    missing = free_vars(f) - set(masks)
    if missing:
        raise UnassignedVariable(", ".join(sorted(missing)))
    return mc.to_states(mc.eval_mask(f, masks))


def satisfying_states(m, f, env=None):
    sat = evaluate(m, f, env)
    return [s for s in m.states if s in sat]


def check(pm, f):
    return pm.point in evaluate(pm.model, f)


def valid_in(m, f):
    return len(evaluate(m, f)) == len(m.states)
