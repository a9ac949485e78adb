#!/usr/bin/env python
#
# modalmu: satisfiability-preserving translations between logics

'''Translations that remove frame conditions.

Each translation maps a formula satisfiable over frames with some
condition for the agents in A to a formula satisfiable over frames
without it. `pipeline` chains them between two logic specifications.
'''

import logging

from modal.formula import (TT, Prop, NegProp, And, Or, Box, Diamond,
                           CONDITIONS, NameSupply, agents, children,
                           closed_subbar, conj, has_mu, implies, inv, inv_a,
                           eve_a, inv_d, is_recursion_free, modal_depth,
                           props, rebuild, rename_binders, size, subbar)

logger = logging.getLogger(__name__)

MARKER_P = '_p'
MARKER_Q = '_q'


class TranslationError(ValueError):
    pass


class UnsupportedTranslation(TranslationError):
    pass

###############################################################################
# Axioms
###############################################################################

class AxiomInstance(object):
    """The axiom for condition x and agent, with psi plugged in for p."""

    def __init__(self, x, agent, psi):
        if x not in CONDITIONS:
            raise TranslationError("unknown frame condition %r" % (x,))
        self.x = x
        self.agent = agent
        self.psi = psi

    def formula(self):
        a, psi = self.agent, self.psi
        if self.x == 'D':
            return Diamond(a, TT)
        if self.x == 'T':
            return implies(Box(a, psi), psi)
        if self.x == 'B':
            return implies(Diamond(a, Box(a, psi)), psi)
        if self.x == '4':
            return implies(Box(a, psi), Box(a, Box(a, psi)))
        return implies(Diamond(a, Box(a, psi)), Box(a, psi))

    def __str__(self):
        return "ax%s_%s[%s]" % (self.x, self.agent, self.psi)


def axiom(x, agent, psi):
    return AxiomInstance(x, agent, psi).formula()


def _all_agents(f, agent_set):
    return sorted(set(agents(f)) | set(agent_set))


def _unique(formulas):
    seen = set()
    out = []
    for f in formulas:
        if f not in seen:
            seen.add(f)
            out.append(f)
    return out


def _log_growth(name, f, out):
    logger.debug("%s: |f| = %d -> %d", name, size(f), size(out))
    return out

###############################################################################
# Recursion-free formulas
###############################################################################

def translate_onestep(f, agent_set, x):
    """f & Inv_d(conjunction of ax^x_a[psi/p], psi in subbar(f), a in A)."""
    if not is_recursion_free(f):
        raise TranslationError("the one-step translation needs a recursion-free formula")
    md = modal_depth(f)
    d = md * size(f) if x in ('4', '5') else md
    axioms = _unique(axiom(x, a, psi) for psi in subbar(f) for a in sorted(agent_set))
    out = And(f, inv_d(conj(axioms), d, _all_agents(f, agent_set)))
    return _log_growth("onestep %s" % x, f, out)

###############################################################################
# Formulas with recursion
###############################################################################

def translate_D_mu(f, agent_set):
    """f & Inv(<a>tt for a in A)."""
    serial = conj(Diamond(a, TT) for a in sorted(agent_set))
    supply = NameSupply(f)
    out = And(f, inv(serial, _all_agents(f, agent_set), supply()))
    return _log_growth("D-mu", f, out)


def _homomorphic(f, modal_case):
    def t(g):
        if isinstance(g, (Box, Diamond)):
            done = modal_case(g, t)
            if done is not None:
                return done
        kids = children(g)
        if not kids:
            return g
        return rebuild(g, [t(c) for c in kids])
    return t(f)


def translate_T_mu(f, agent_set):
    """[a]g -> [a]t(g) & t(g) and <a>g -> <a>t(g) | t(g), a in A."""
    agent_set = set(agent_set)

    def modal(g, t):
        if g.agent not in agent_set:
            return None
        body = t(g.body)
        if isinstance(g, Box):
            return And(Box(g.agent, body), body)
        return Or(Diamond(g.agent, body), body)

    return _log_growth("T-mu", f, rename_binders(_homomorphic(f, modal)))


def translate_4_mu(f, agent_set):
    """[a]g -> Inv^a([a]t(g)) and <a>g -> Eve^a(<a>t(g)), a in A."""
    agent_set = set(agent_set)
    supply = NameSupply(f)

    def modal(g, t):
        if g.agent not in agent_set:
            return None
        body = t(g.body)
        if isinstance(g, Box):
            return inv_a(Box(g.agent, body), g.agent, supply())
        return eve_a(Diamond(g.agent, body), g.agent, supply())

    return _log_growth("4-mu", f, rename_binders(_homomorphic(f, modal)))


def fresh_prop(f, stem):
    taken = set(props(f))
    i = 0
    while "%s%d" % (stem, i) in taken:
        i += 1
    return "%s%d" % (stem, i)


def translate_B_mu(f, agent_set):
    """Symmetry for mu-free formulas via a fresh marker proposition.

    Marked states stand in for the state an edge came from: every edge
    gets a marked continuation, every closure formula travels two steps
    into marked states, and diamonds are met at unmarked successors.
    """
    if has_mu(f):
        raise UnsupportedTranslation("the symmetry translation needs a formula without mu")
    mark = fresh_prop(f, '_s')
    p, notp = Prop(mark), NegProp(mark)
    closure = closed_subbar(f)
    everyone = _all_agents(f, agent_set)
    supply = NameSupply(f)
    parts = []
    for a in sorted(agent_set):
        cycle = Box(a, implies(notp, Diamond(a, p)))
        carried = conj(implies(c, Box(a, Box(a, implies(p, c)))) for c in closure)
        met = conj(implies(d, Diamond(a, And(notp, d.body)))
                   for d in closure if isinstance(d, Diamond) and d.agent == a)
        parts.append(inv(conj([cycle, carried, met]), everyone, supply()))
    out = And(f, conj(parts))
    return _log_growth("B-mu", f, out)


MARKERS = (
    (And(Prop(MARKER_P), Prop(MARKER_Q)), And(Prop(MARKER_P), NegProp(MARKER_Q))),
    (And(Prop(MARKER_P), NegProp(MARKER_Q)), And(NegProp(MARKER_P), Prop(MARKER_Q))),
    (And(NegProp(MARKER_P), Prop(MARKER_Q)), And(Prop(MARKER_P), Prop(MARKER_Q))),
)


def next_marker(vec):
    for cur, nxt in MARKERS:
        if cur == vec:
            return nxt
    raise TranslationError("not a marker conjunction: %s" % (vec,))


def translate_K_mu(f, agent_set):
    """Embed K into logics with conditions among D, T, B.

    Successors of interest carry the next marker in the cycle
    (p & q) -> (p & ~q) -> (~p & q) -> (p & q), so loops and back edges
    added by the target frame conditions can be told apart.
    """
    if {MARKER_P, MARKER_Q} & set(props(f)):
        raise TranslationError("formula uses reserved propositions %s, %s" %
                               (MARKER_P, MARKER_Q))
    agent_set = set(agent_set)
    touched = [False]

    def modal(g, t):
        if g.agent not in agent_set:
            return None
        touched[0] = True
        body = t(g.body)
        if isinstance(g, Diamond):
            return conj(implies(vec, Diamond(g.agent, And(nxt, body))) for vec, nxt in MARKERS)
        return conj(implies(vec, Box(g.agent, implies(nxt, body))) for vec, nxt in MARKERS)

    out = _homomorphic(f, modal)
    if touched[0]:
        # the point itself starts the marker cycle
        out = And(MARKERS[0][0], out)
    return _log_growth("K-mu", f, rename_binders(out))

###############################################################################
# Composition
###############################################################################

RECURSIVE_ORDER = ('4', 'T', 'B', 'D')
ONESTEP_ORDER = tuple(reversed(CONDITIONS))

_ALLOWED_RESIDUE = {
    '4': frozenset('DTB'),
    'T': frozenset('DB'),
    'B': frozenset('D'),
    'D': frozenset(),
}


def remove_condition(f, agent_set, x):
    """Remove x for the agents in A with the matching single translation."""
    if is_recursion_free(f):
        return translate_onestep(f, agent_set, x)
    if x == '5':
        raise UnsupportedTranslation("condition 5 cannot be removed from a recursive formula")
    return {'D': translate_D_mu, 'T': translate_T_mu,
            '4': translate_4_mu, 'B': translate_B_mu}[x](f, agent_set)


def _residual(current, agent_set, x):
    return dict((a, current[a] - {x}) for a in agent_set)


def _remove_all(f, current, target):
    recursion_free = is_recursion_free(f)
    order = ONESTEP_ORDER if recursion_free else RECURSIVE_ORDER
    if not recursion_free:
        for a, conds in current.items():
            if '5' in conds:
                raise UnsupportedTranslation(
                    "condition 5 of agent %s cannot be handled for a recursive formula" % a)
    for x in order:
        A = sorted(a for a, conds in current.items() if x in conds and x not in target[a])
        if not A:
            continue
        residue = _residual(current, A, x)
        if recursion_free:
            later = CONDITIONS[CONDITIONS.index(x) + 1:]
            for a in A:
                if residue[a] & set(later):
                    raise UnsupportedTranslation(
                        "cannot remove %s from agent %s while keeping %s" %
                        (x, a, "".join(sorted(residue[a] & set(later)))))
        else:
            for a in A:
                if not residue[a] <= _ALLOWED_RESIDUE[x]:
                    raise UnsupportedTranslation(
                        "removing %s from agent %s leaves %s" %
                        (x, a, "".join(sorted(residue[a]))))
            if x == 'D' and any(current[a] - ({x} if a in A else set())
                                for a in current):
                raise UnsupportedTranslation("removing D needs every other agent to be K")
        f = remove_condition(f, A, x)
        for a in A:
            current[a] = current[a] - {x}
        logger.info("removed %s for %s", x, ",".join(A))
    return f


def pipeline(f, from_spec, to_spec):
    """Translate f so that from_spec-satisfiability becomes to_spec-satisfiability."""
    if from_spec == to_spec:
        return f
    names = set(from_spec.agents) | set(to_spec.agents) | set(agents(f))
    current = dict((a, set(from_spec.conditions(a))) for a in names)
    adding = [a for a in names if to_spec.conditions(a) - current[a]]
    if adding:
        target = dict((a, frozenset()) for a in names)
    else:
        target = dict((a, to_spec.conditions(a)) for a in names)
    f = _remove_all(f, current, target)
    if adding:
        extra = set()
        for a in names:
            extra |= to_spec.conditions(a)
        if not extra <= set('DTB'):
            raise UnsupportedTranslation("only D, T and B can be added to K")
        f = translate_K_mu(f, sorted(a for a in names if to_spec.conditions(a)))
    return f
