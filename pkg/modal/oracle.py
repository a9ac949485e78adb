#!/usr/bin/env python
#
# modalmu: bounded satisfiability oracle and differential testing

'''Exhaustive search over small models, and corpus drivers built on it.

`sat_bounded` walks every model with 1, 2, ... n states whose frame
satisfies the logic and reports the first pointed model of f. It is the
reference every other decision procedure is compared against.
'''

from dataclasses import dataclass, field
import logging
import random

from modal.formula import (TT, FF, Prop, NegProp, Var, And, Or, Box, Diamond, Mu,
                           Nu, CONDITIONS, LogicSpec, agents, children, has_mu,
                           is_closed, is_recursion_free, props, rebuild, rename_binders,
                           size, subformulas)
from modal.kripke import MAX_ENUM_STATES, PointedModel, enumerate_models, satisfies_spec
from modal.modelcheck import check, satisfying_states
from modal.k4solver import solve_k4
from modal.muencode import encode
from modal.tableau import TableauConfig, solve
from modal.translate import (translate_4_mu, translate_B_mu, translate_D_mu,
                             translate_K_mu, translate_onestep, translate_T_mu)

logger = logging.getLogger(__name__)

PROP_POOL = ('p', 'q')
AGENT_POOL = ('a', 'b')
FIX_PROB = 0.3
CORPUS_KINDS = ('translations', 'tableau', 'k4', 'encode')
TRANSLATIONS = ('D', 'T', '4', 'B', 'K', 'onestep')
# target conditions for the K embedding
K_TARGETS = ('T', 'D', 'B', 'TB', 'DTB')


@dataclass
class Found(object):
    witness: PointedModel
    n_states: int
    name = 'FOUND'


@dataclass
class NoneWithin(object):
    n_states: int
    name = 'NONE'


def sat_bounded(f, spec=None, max_states=3, exclusive=(), cap=MAX_ENUM_STATES):
    """Least model of f over frames of spec, up to max_states states.

    exclusive: propositions of which exactly one holds at every state
    """
    spec = spec or LogicSpec()
    names = sorted(set(agents(f)) | set(spec.agents))
    free = sorted(set(props(f)) - set(exclusive))
    for n in range(1, max_states + 1):
        for m in enumerate_models(n, names, free, spec, exclusive, cap):
            sats = satisfying_states(m, f)
            if sats:
                pm = PointedModel(m, sats[0])
                assert check(pm, f) and satisfies_spec(m, spec)
                logger.debug("model of %d states for %s", n, f)
                return Found(pm, n)
    logger.debug("no model of at most %d states for %s", max_states, f)
    return NoneWithin(max_states)


def is_found(result):
    return isinstance(result, Found)

###############################################################################
# Differential testing
###############################################################################

@dataclass
class DiffReport(object):
    f: object
    g: object
    oracle_f: object
    oracle_g: object
    tableau_f: object = None
    tableau_g: object = None
    contradictions: list = field(default_factory=list)

    @property
    def consistent(self):
        return not self.contradictions

    def as_dict(self):
        def verdict(v):
            return None if v is None else v.name
        return {'f': str(self.f), 'g': str(self.g),
                'oracle_f': verdict(self.oracle_f), 'oracle_g': verdict(self.oracle_g),
                'tableau_f': verdict(self.tableau_f), 'tableau_g': verdict(self.tableau_g),
                'contradictions': list(self.contradictions)}


def _tableau(f, spec, cfg):
    return solve(f, spec, cfg or TableauConfig(max_nodes=2000))


def _against(found, verdict):
    return found is not None and is_found(found) and verdict is not None \
        and verdict.name == 'UNSAT'


def differential(f, g, spec_f=None, spec_g=None, cap_f=4, cap_g=5,
                 use_tableau=True, cfg=None):
    """Compare f over spec_f with g over spec_g, which should agree."""
    spec_f = spec_f or LogicSpec()
    spec_g = spec_g or LogicSpec()
    rep = DiffReport(f, g, sat_bounded(f, spec_f, cap_f), sat_bounded(g, spec_g, cap_g))
    if use_tableau:
        rep.tableau_f = _tableau(f, spec_f, cfg)
        rep.tableau_g = rep.tableau_f if (f == g and spec_f == spec_g) else _tableau(g, spec_g, cfg)
    if _against(rep.oracle_f, rep.tableau_g):
        rep.contradictions.append("f has a model but g is UNSAT")
    if _against(rep.oracle_g, rep.tableau_f):
        rep.contradictions.append("g has a model but f is UNSAT")
    if _against(rep.oracle_f, rep.tableau_f):
        rep.contradictions.append("f has a model but the tableau says UNSAT")
    if _against(rep.oracle_g, rep.tableau_g):
        rep.contradictions.append("g has a model but the tableau says UNSAT")
    for c in rep.contradictions:
        logger.error("%s: %s / %s", c, f, g)
    return rep

###############################################################################
# Corpus generation and shrinking
###############################################################################

def random_formula(rng, depth=3, prop_pool=PROP_POOL, agent_pool=AGENT_POOL,
                   fix_prob=FIX_PROB):
    """A random closed formula with every variable bound once."""
    return rename_binders(_random(rng, depth, prop_pool, agent_pool, fix_prob, ()))


def _random(rng, depth, prop_pool, agent_pool, fix_prob, _scope):
    leaves = [TT, FF] + [Prop(p) for p in prop_pool] + [NegProp(p) for p in prop_pool]
    leaves += [Var(x) for x in _scope]
    if depth <= 0:
        return rng.choice(leaves)
    if rng.random() < fix_prob:
        x = "X%d" % len(_scope)
        body = _random(rng, depth - 1, prop_pool, agent_pool, fix_prob, _scope + (x,))
        return (Mu if rng.random() < 0.5 else Nu)(x, body)
    kind = rng.choice(('leaf', 'and', 'or', 'box', 'diamond'))
    sub = lambda: _random(rng, depth - 1, prop_pool, agent_pool, fix_prob, _scope)
    if kind == 'leaf':
        return rng.choice(leaves)
    if kind == 'and':
        return And(sub(), sub())
    if kind == 'or':
        return Or(sub(), sub())
    agent = rng.choice(agent_pool)
    return (Box if kind == 'box' else Diamond)(agent, sub())


def corpus(seed, count, depth=3, **kw):
    rng = random.Random(seed)
    return [random_formula(rng, depth, **kw) for _ in range(count)]


def _replacements(f):
    """f with one subformula replaced by a child, tt or ff."""
    for target in subformulas(f):
        options = list(children(target)) + [TT, FF]
        for new in options:
            if new == target:
                continue
            yield _replace(f, target, new)


def _replace(f, target, new):
    if f == target:
        return new
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, [_replace(c, target, new) for c in kids])


def shrink(f, still_fails, max_rounds=100):
    """Greedy minimization of f keeping still_fails(f) true."""
    for _ in range(max_rounds):
        best = None
        for cand in _replacements(f):
            if not is_closed(cand) or size(cand) >= size(f):
                continue
            if still_fails(cand) and (best is None or size(cand) < size(best)):
                best = cand
        if best is None:
            return f
        logger.debug("shrunk to %s", best)
        f = best
    return f

###############################################################################
# Corpus checks
###############################################################################

@dataclass
class CorpusCase(object):
    index: int
    formula: object
    detail: dict
    ok: bool
    shrunk: object = None

    def line(self):
        out = "%d %s %s %s" % (self.index, "ok" if self.ok else "CONTRADICTION",
                               self.formula, " ".join("%s=%s" % kv for kv in
                                                      sorted(self.detail.items())))
        if self.shrunk is not None:
            out += " shrunk=%s" % self.shrunk
        return out


_RECURSIVE = {'D': translate_D_mu, 'T': translate_T_mu, '4': translate_4_mu,
              'B': translate_B_mu}


def translation_case(f, kind, agent_set, cond=None):
    """(source spec, translation of f, target spec) for one translation.

    cond is the removed condition for 'onestep' and the target
    conditions for 'K'.
    """
    def each(conds):
        return LogicSpec(dict((a, set(conds)) for a in agent_set))

    if kind == 'K':
        return LogicSpec(), translate_K_mu(f, agent_set), each(cond or 'T')
    if kind == 'onestep':
        x = cond or 'T'
        return each(x), translate_onestep(f, agent_set, x), LogicSpec()
    if kind not in _RECURSIVE:
        raise ValueError("unknown translation %r, expected one of %s" %
                         (kind, ", ".join(TRANSLATIONS)))
    return each(kind), _RECURSIVE[kind](f, agent_set), LogicSpec()


def check_translation(f, kind, cond=None, caps=(3, 4), use_tableau=True):
    names = agents(f) or ['a']
    src, g, tgt = translation_case(f, kind, names, cond)
    return differential(f, g, src, tgt, caps[0], caps[1], use_tableau)


def applicable_translations(f):
    out = ['D', 'T', '4', 'K']
    if not has_mu(f):
        out.append('B')
    if is_recursion_free(f):
        out.append('onestep')
    return out


def _check_translations(f, rng, caps):
    kind = rng.choice(applicable_translations(f))
    cond = None
    if kind == 'onestep':
        cond = rng.choice(CONDITIONS)
    elif kind == 'K':
        cond = rng.choice(K_TARGETS)
    rep = check_translation(f, kind, cond, caps)
    return dict(translation=kind + (cond or ''), **_short(rep)), rep.consistent


def _short(rep):
    d = rep.as_dict()
    return dict((k, d[k]) for k in ('oracle_f', 'oracle_g', 'tableau_f', 'tableau_g'))


def _check_tableau(f, rng, caps):
    spec = LogicSpec(dict((a, set(rng.choice(('', 'D', 'T', '4', 'B')))) for a in agents(f)))
    found = sat_bounded(f, spec, caps[0])
    verdict = solve(f, spec, TableauConfig(max_nodes=2000))
    ok = not _against(found, verdict)
    if verdict.name == 'SAT' and len(verdict.witness.model) <= caps[0]:
        ok = ok and is_found(found)
    return {'logic': str(spec), 'oracle': found.name, 'tableau': verdict.name}, ok


def _check_k4(f, rng, caps):
    logic = rng.choice(('K4', 'D4', 'S4'))
    spec = LogicSpec({'a': {'K4': {'4'}, 'D4': {'D', '4'}, 'S4': {'T', '4'}}[logic]})
    found = sat_bounded(f, spec, caps[0])
    verdict, stats = solve_k4(f, logic)
    ok = not _against(found, verdict)
    if verdict.name == 'SAT' and len(verdict.witness.model) <= caps[0]:
        ok = ok and is_found(found)
    return {'logic': logic, 'oracle': found.name, 'k4': verdict.name,
            'depth': stats.max_depth}, ok


def _check_encode(f, rng, caps):
    spec = LogicSpec(dict((a, set(rng.choice(('', 'D', 'T')))) for a in agents(f)))
    enc, encoder = encode(f, spec, cap=caps[2])
    found = sat_bounded(enc, LogicSpec(), caps[0], exclusive=encoder.graph_names())
    verdict = solve(f, spec)
    return {'logic': str(spec), 'encoding': found.name, 'tableau': verdict.name}, \
        not _against(found, verdict)


_CHECKS = {'translations': _check_translations, 'tableau': _check_tableau,
           'k4': _check_k4, 'encode': _check_encode}


def _fails(kind, case_seed, caps):
    def still_fails(g):
        return not _CHECKS[kind](g, random.Random(case_seed), caps)[1]
    return still_fails


def check_corpus(kind, seed, count, depth=2, caps=(3, 4, 3), agent_pool=None,
                 minimize=True):
    """Run one corpus check; caps = (source states, target states, graph cap).

    Each contradiction is shrunk, replaying the case's own logic choices.
    """
    if kind not in _CHECKS:
        raise ValueError("unknown corpus kind %r, expected one of %s" %
                         (kind, ", ".join(CORPUS_KINDS)))
    rng = random.Random(seed)
    if agent_pool is None:
        agent_pool = ('a',) if kind == 'k4' else AGENT_POOL
    out = []
    i = 0
    while len(out) < count:
        f = random_formula(rng, depth, agent_pool=agent_pool)
        if kind == 'encode' and len(subformulas(f)) > caps[2]:
            continue
        case_seed = rng.getrandbits(32)
        detail, ok = _CHECKS[kind](f, random.Random(case_seed), caps)
        case = CorpusCase(i, f, detail, ok)
        if not ok and minimize:
            case.shrunk = shrink(f, _fails(kind, case_seed, caps))
            logger.warning("contradiction %d shrunk to %s", i, case.shrunk)
        out.append(case)
        i += 1
        logger.debug("%s %d/%d\r", kind, i, count, extra={'partial': True})
    bad = sum(1 for c in out if not c.ok)
    logger.info("%s corpus: %d cases, %d contradictions", kind, len(out), bad)
    return out
