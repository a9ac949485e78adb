#!/usr/bin/env python
#
# modalmu: encoding tableau branches as mu-calculus formulas

'''Describe an open, maximal tableau branch for f by a K formula.

Every dependency graph g (the formulas carrying one prefix, the local
dependence edges for each least fixpoint variable, and labels marking
interaction with the parent (top) or children (bot)) becomes a
proposition named `g_<hash>`. Every pair of an agent and a subformula
becomes an agent `<agent>__<index>`. The result is satisfiable iff f is
satisfiable over the frames of the logic; only logics without 5 are
handled.
'''

from dataclasses import dataclass
from hashlib import sha1
from itertools import combinations, product
import logging
import sys

import networkx as nx

from modal.formula import (TT, FF, Ff, Prop, NegProp, Var, And, Or, Box, Diamond,
                           Mu, Nu, FIXPOINT, LogicSpec, NameSupply, conj,
                           disj, fixpoints, inv, negate, rename_binders,
                           subformulas, var_lt)
from modal.kripke import KripkeModel, PointedModel
from modal.tableau import dependency_view, is_prop_closed

logger = logging.getLogger(__name__)

DEFAULT_GRAPH_CAP = 5
EMPTY = ()
IN, OUT, TOP, BOT = 'in', 'out', 'top', 'bot'

# nested fixpoints go deep
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class EncodingError(ValueError):
    pass


class GraphCapExceeded(EncodingError):
    pass

###############################################################################
# Dependency graphs
###############################################################################

@dataclass(frozen=True)
class DepGraph(object):
    phi: frozenset
    edges: frozenset = frozenset()
    labels: frozenset = frozenset()

    def has(self, f, io, tb):
        return (f, io, tb) in self.labels

    def edges_for(self, x):
        return set((a, b) for y, a, b in self.edges if y == x)

    def serialize(self):
        vs = sorted(str(f) for f in self.phi)
        es = sorted("%s:%s->%s" % (x, a, b) for x, a, b in self.edges)
        ls = sorted("%s:%s,%s" % (f, io, tb) for f, io, tb in self.labels)
        return "V{%s}E{%s}L{%s}" % ("|".join(vs), "|".join(es), "|".join(ls))

    @property
    def name(self):
        return "g_" + sha1(self.serialize().encode('utf-8')).hexdigest()[:10]

    def __str__(self):
        return self.serialize()


@dataclass(frozen=True)
class EncAgent(object):
    agent: str
    formula: object
    index: int

    @property
    def name(self):
        return "%s__%d" % (self.agent, self.index)

    def __str__(self):
        return "%s<%s>" % (self.agent, self.formula)


def _subsets(items):
    for k in range(len(items) + 1):
        for combo in combinations(items, k):
            yield combo


def _walk_covers(nodes, edges, start, end, required):
    """required lie on a walk from start to end, with end -> start added."""
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    g.add_edges_from(edges)
    if start not in g or end not in g:
        return False
    g.add_edge(end, start)
    comp = {start} | (nx.descendants(g, start) & nx.ancestors(g, start))
    return end in comp and set(required) <= comp


def _cycle_covers(nodes, edges, required):
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    g.add_edges_from(edges)
    for comp in nx.strongly_connected_components(g):
        cyclic = len(comp) > 1 or any(g.has_edge(n, n) for n in comp)
        if cyclic and set(required) <= comp:
            return True
    return False


def _and(*parts):
    parts = [p for p in parts if p != TT]
    if any(isinstance(p, Ff) for p in parts):
        return FF
    return conj(parts)


def _or(parts):
    return disj([p for p in parts if not isinstance(p, Ff)])


def _implies_prop(name, f):
    return Or(NegProp(name), f)

###############################################################################
# The encoder
###############################################################################

class Encoder(object):
    """Graphs, predicates and formula builders for one f and spec."""

    def __init__(self, f, spec=None, cap=DEFAULT_GRAPH_CAP):
        spec = spec or LogicSpec()
        if spec.uses('5'):
            raise EncodingError("logics with condition 5 cannot be encoded")
        self.f = rename_binders(f)
        self.spec = spec
        self.sub = subformulas(self.f)
        if len(self.sub) > cap:
            raise GraphCapExceeded("|sub(f)| = %d exceeds the graph cap of %d" %
                                   (len(self.sub), cap))
        self.index = dict((g, i) for i, g in enumerate(self.sub))
        self.fix = fixpoints(self.f)
        self.mv = sorted(x for x, g in self.fix.items() if isinstance(g, Mu))
        self.agents = self._enc_agents()
        self.supply = NameSupply(self.f)
        self._graphs = None

    def _enc_agents(self):
        out = []
        for g in self.sub:
            if isinstance(g, Diamond) or (isinstance(g, Box) and self.spec.has(g.agent, 'D')):
                a = EncAgent(g.agent, g.body, self.index[g.body])
                if a not in out:
                    out.append(a)
        return out

    def agent_name(self, agent, f):
        return "%s__%d" % (agent, self.index[f])

    def agents_of(self, agent):
        return [a.name for a in self.agents if a.agent == agent]

    def conds(self, agent):
        return self.spec.conditions(agent)

    ###########################################################################
    # Local rules
    ###########################################################################

    def local_conclusions(self, f):
        """Single-prefix conclusions: (kind, formulas)."""
        if isinstance(f, FIXPOINT):
            return ('one', [f.body])
        if isinstance(f, Var) and not f.dual:
            return ('one', [self.fix[f.name]])
        if isinstance(f, And):
            return ('all', [f.left, f.right])
        if isinstance(f, Or):
            return ('any', [f.left, f.right])
        if isinstance(f, Box) and 'T' in self.conds(f.agent):
            return ('one', [f.body])
        return (None, [])

    def exempt(self, f, x):
        return isinstance(f, Var) and f.name != x and var_lt(x, f.name, self.f)

    def forced_labels(self, f):
        if isinstance(f, Diamond):
            return {(f, OUT, BOT)}
        if isinstance(f, Box) and 'D' in self.conds(f.agent):
            return {(f, OUT, BOT)}
        return set()

    def optional_labels(self, f):
        """Labels some rule of the logic could give f; nothing else is tried."""
        out = []
        for g in self.sub:
            if isinstance(g, (Box, Diamond)) and g.body == f:
                out.append((f, IN, TOP))
                break
        if isinstance(f, Box):
            conds = self.conds(f.agent)
            if '4' in conds:
                out.append((f, IN, TOP))
            if 'D' not in conds:
                out.append((f, OUT, BOT))
            if 'B' in conds:
                out.append((f, OUT, TOP))
                if '4' in conds:
                    out.append((f, IN, BOT))
        for g in self.sub:
            if isinstance(g, Box) and g.body == f and 'B' in self.conds(g.agent):
                out.append((f, IN, BOT))
                break
        return sorted(set(out) - self.forced_labels(f), key=str)

    ###########################################################################
    # com(g)
    ###########################################################################

    def com(self, g):
        """g is locally compatible with the tableau rules."""
        for f in g.phi:
            if isinstance(f, Ff) or negate(f) in g.phi:
                return False
            kind, concl = self.local_conclusions(f)
            if kind in ('one', 'all') and not all(c in g.phi for c in concl):
                return False
            if kind == 'any' and not any(c in g.phi for c in concl):
                return False
            for x in self.mv:
                if self.exempt(f, x):
                    continue
                es = g.edges_for(x)
                if kind in ('one', 'all') and not all((f, c) in es for c in concl):
                    return False
                if kind == 'any' and not any(c in g.phi and (f, c) in es for c in concl):
                    return False
            if not self.forced_labels(f) <= g.labels:
                return False
        return True

    def _candidates(self, phi):
        ors = [f for f in self.sub if f in phi and isinstance(f, Or)]
        choices = [[d for d in (f.left, f.right) if d in phi] for f in ors]
        label_opts = []
        for f in self.sub:
            if f in phi:
                label_opts.append([frozenset(c) for c in _subsets(self.optional_labels(f))])
        forced = set()
        for f in phi:
            forced |= self.forced_labels(f)
        for picks in product(*choices):
            base = set()
            for f in phi:
                kind, concl = self.local_conclusions(f)
                if kind in ('one', 'all'):
                    base.update((f, c) for c in concl)
            base.update(zip(ors, picks))
            edges = frozenset((x, a, b) for x in self.mv for a, b in base
                              if not self.exempt(a, x))
            for opts in product(*label_opts):
                labels = frozenset(forced).union(*opts) if opts else frozenset(forced)
                yield DepGraph(frozenset(phi), edges, labels)

    def graphs(self):
        if self._graphs is None:
            seen = set()
            out = []
            for phi in _subsets(self.sub):
                for g in self._candidates(phi):
                    if g not in seen and self.com(g):
                        seen.add(g)
                        out.append(g)
            self._graphs = out
            logger.info("%d compatible graphs over %d subformulas", len(out), len(self.sub))
        return self._graphs

    ###########################################################################
    # Children
    ###########################################################################

    def child(self, h, g, agent, chi=None):
        """g is a prospective agent<chi>-child of h (an agent-child if chi is None)."""
        conds = self.conds(agent)
        if chi is not None:
            gen = Diamond(agent, chi) in h.phi or \
                ('D' in conds and Box(agent, chi) in h.phi)
            if not (gen and chi in g.phi and g.has(chi, IN, TOP)):
                return False
        for f in h.phi:
            if isinstance(f, Box) and f.agent == agent:
                down = [f.body] + ([f] if '4' in conds else [])
                if not all(d in g.phi and g.has(d, IN, TOP) for d in down):
                    return False
        if 'B' in conds:
            for f in g.phi:
                if isinstance(f, Box) and f.agent == agent:
                    up = [f.body] + ([f] if '4' in conds else [])
                    if not all(u in h.phi and h.has(u, IN, BOT) for u in up):
                        return False
        return True

    ###########################################################################
    # rules
    ###########################################################################

    def _box_any(self, agent, f):
        return conj(Box(n, f) for n in self.agents_of(agent))

    def build_rules(self):
        gs = self.graphs()
        names = [g.name for g in gs]
        parts = [disj(Prop(n) for n in names)]
        parts.extend(Or(NegProp(a), NegProp(b)) for a, b in combinations(names, 2))
        for g in gs:
            for f in self.sub:
                if f not in g.phi:
                    continue
                if isinstance(f, Diamond) or (isinstance(f, Box) and 'D' in self.conds(f.agent)):
                    kids = [h.name for h in gs if self.child(g, h, f.agent, f.body)]
                    parts.append(_implies_prop(
                        g.name, Diamond(self.agent_name(f.agent, f.body),
                                        disj(Prop(n) for n in kids))))
            for agent in sorted(set(a.agent for a in self.agents)):
                kids = [h.name for h in gs if self.child(g, h, agent)]
                parts.append(_implies_prop(g.name, self._box_any(agent, disj(Prop(n) for n in kids))))
        return inv(conj(parts), [a.name for a in self.agents], self.supply())

    ###########################################################################
    # Paths inside one graph
    ###########################################################################

    def forward(self, f):
        """What a modal formula sends down to a child."""
        if isinstance(f, Diamond):
            return [f.body]
        if isinstance(f, Box):
            return [f.body] + ([f] if '4' in self.conds(f.agent) else [])
        return []

    def backward(self, f, agent):
        """Child formulas that send f up with (b) or (b4)."""
        conds = self.conds(agent)
        out = []
        if 'B' in conds:
            if Box(agent, f) in self.index:
                out.append(Box(agent, f))
            if '4' in conds and isinstance(f, Box) and f.agent == agent:
                out.append(f)
        return out

    def nx_pair(self, s):
        a, b = s
        return [(fw, bw) for fw in self.forward(a) for bw in self.backward(b, a.agent)]

    def diamond_of(self, f, body):
        """<alpha(f)> body: one agent for diamonds, any child agent for boxes."""
        if isinstance(body, Ff):
            return FF
        if isinstance(f, Diamond):
            return Diamond(self.agent_name(f.agent, f.body), body)
        return _or([Diamond(n, body) for n in self.agents_of(f.agent)])

    def excursions(self, g):
        pairs = []
        for a in sorted(g.phi, key=self.index.get):
            if not isinstance(a, (Box, Diamond)) or not g.has(a, OUT, BOT):
                continue
            for b in sorted(g.phi, key=self.index.get):
                if g.has(b, IN, BOT) and self.nx_pair((a, b)):
                    pairs.append((a, b))
        return list(_subsets(pairs))

    def _required(self, g, S, x, with_x):
        req = set()
        for a, b in S:
            req.update((a, b))
        if with_x:
            if Var(x) not in g.phi:
                return None
            req.add(Var(x))
        return req

    def _s_ok(self, g, S):
        return all(a in g.phi and b in g.phi and g.has(a, OUT, BOT) and g.has(b, IN, BOT)
                   for a, b in S)

    def rel_pair(self, g, T, S, x, with_x):
        """T ->(g[,X]) S."""
        a, b = T
        if not (a in g.phi and b in g.phi and g.has(a, IN, TOP) and g.has(b, OUT, TOP)):
            return False
        req = self._required(g, S, x, with_x)
        if req is None or not self._s_ok(g, S):
            return False
        return _walk_covers(g.phi, g.edges_for(x) | set(S), a, b, req)

    def rel_empty(self, g, S, x, with_x):
        """{} ->(g[,X]) S."""
        req = self._required(g, S, x, with_x)
        if req is None or not self._s_ok(g, S):
            return False
        return _cycle_covers(g.phi, g.edges_for(x) | set(S), req)

    def rel_open(self, g, start, S, end, x, with_x):
        """start ->(g[,X]) S, end."""
        if not (start in g.phi and end in g.phi and g.has(end, OUT, BOT)):
            return False
        req = self._required(g, S, x, with_x)
        if req is None or not self._s_ok(g, S):
            return False
        return _walk_covers(g.phi, g.edges_for(x) | set(S), start, end, req)

    def in_graph(self, T, g):
        a, b = T
        return a in g.phi and b in g.phi and g.has(a, IN, TOP) and g.has(b, OUT, TOP)

    ###########################################################################
    # Finite paths
    ###########################################################################

    def _lookup(self, memo, key):
        for k, name in memo:
            if k == key:
                return name
        return None

    def _down(self, s, build):
        """<alpha(s)> (disjunction of build(t) over nx(s))."""
        return self.diamond_of(s[0], _or([build(t) for t in self.nx_pair(s)]))

    def fp_x(self, T, memo, x):
        """A finite path for T, or a cycle for T = (), on which X occurs."""
        if T == EMPTY:
            parts = []
            for g in self.graphs():
                if self.rel_empty(g, (), x, True):
                    parts.append(Prop(g.name))
                else:
                    inner = self._fp_x_in(T, memo, g, x)
                    if not isinstance(inner, Ff):
                        parts.append(And(Prop(g.name), inner))
            return _or(parts)
        found = self._lookup(memo, T)
        if found:
            return Var(found)
        name = self.supply()
        memo = memo + ((T, name),)
        parts = []
        for g in self.graphs():
            if not self.in_graph(T, g):
                continue
            if self.rel_pair(g, T, (), x, True):
                parts.append(Prop(g.name))
            else:
                inner = self._fp_x_in(T, memo, g, x)
                if not isinstance(inner, Ff):
                    parts.append(And(Prop(g.name), inner))
        body = _or(parts)
        return FF if isinstance(body, Ff) else Mu(name, body)

    def _fp_x_in(self, T, memo, g, x):
        rel = (lambda S, wx: self.rel_empty(g, S, x, wx)) if T == EMPTY else \
            (lambda S, wx: self.rel_pair(g, T, S, x, wx))
        out = []
        for S in self.excursions(g):
            if not S:
                continue
            plain = _and(*[self._down(s, lambda t: self.fp(t, (), x)) for s in S])
            if isinstance(plain, Ff):
                continue
            if rel(S, False):
                some = _or([self._down(s, lambda t: self.fp_x(t, memo, x)) for s in S])
                out.append(_and(some, plain))
            if rel(S, True):
                out.append(plain)
        return _or(out)

    def fp(self, T, memo, x):
        """A finite path for the pair T."""
        found = self._lookup(memo, T)
        if found:
            return Var(found)
        name = self.supply()
        memo = memo + ((T, name),)
        parts = []
        for g in self.graphs():
            if not self.in_graph(T, g):
                continue
            if self.rel_pair(g, T, (), x, False):
                parts.append(Prop(g.name))
                continue
            out = []
            for S in self.excursions(g):
                if S and self.rel_pair(g, T, S, x, False):
                    out.append(_and(*[self._down(s, lambda t: self.fp(t, memo, x)) for s in S]))
            inner = _or(out)
            if not isinstance(inner, Ff):
                parts.append(And(Prop(g.name), inner))
        body = _or(parts)
        return FF if isinstance(body, Ff) else Mu(name, body)

    ###########################################################################
    # Infinite paths
    ###########################################################################

    def ip(self, f, memo, memo_x, x):
        """An infinite path from f on which X occurs infinitely often."""
        for g0, nu, mu in memo:
            if g0 == f:
                return Var(mu) if f in memo_x else Var(nu)
        nu, mu = self.supply(), self.supply()
        memo = memo + ((f, nu, mu),)
        parts = []
        for g in self.graphs():
            if f not in g.phi:
                continue
            inner = self._ip_in(f, memo, memo_x, g, x)
            if not isinstance(inner, Ff):
                parts.append(And(Prop(g.name), inner))
        body = _or(parts)
        return FF if isinstance(body, Ff) else Nu(nu, Mu(mu, body))

    def _ip_in(self, f, memo, memo_x, g, x):
        out = []
        for end in sorted(g.phi, key=self.index.get):
            if not isinstance(end, (Box, Diamond)) or not g.has(end, OUT, BOT):
                continue
            for S in self.excursions(g):
                plain = _and(*[self._down(s, lambda t: self.fp(t, (), x)) for s in S])
                if isinstance(plain, Ff):
                    continue
                with_x = self.rel_open(g, f, S, end, x, True)
                without = self.rel_open(g, f, S, end, x, False)
                if not (with_x or without):
                    continue
                reset = self.diamond_of(end, _or([self.ip(t, memo, (), x)
                                                  for t in self.forward(end)]))
                if with_x:
                    out.append(_and(plain, reset))
                if without:
                    if S:
                        some = _or([self._down(s, lambda t: self.fp_x(t, (), x)) for s in S])
                        out.append(_and(some, plain, reset))
                    keep = self.diamond_of(end, _or([self.ip(t, memo, memo_x + (f,), x)
                                                     for t in self.forward(end)]))
                    out.append(_and(plain, keep))
        return _or(out)

    def inf_path(self):
        parts = []
        for x in self.mv:
            parts.append(self.fp_x(EMPTY, (), x))
            parts.extend(self.ip(f, (), (), x) for f in self.sub)
        return _or(parts)

    ###########################################################################
    # encode
    ###########################################################################

    def encode(self):
        rules = self.build_rules()
        never = inv(negate(self.inf_path()), [a.name for a in self.agents], self.supply())
        start = disj(Prop(g.name) for g in self.graphs() if self.f in g.phi)
        return And(And(rules, never), start)

    def table(self):
        out = dict((g.name, g) for g in self.graphs())
        out.update((a.name, a) for a in self.agents)
        return out

    def graph_names(self):
        return [g.name for g in self.graphs()]

###############################################################################
# Module-level operations
###############################################################################

def enumerate_graphs(f, spec=None, cap=DEFAULT_GRAPH_CAP):
    return Encoder(f, spec, cap).graphs()


def build_rules(f, spec=None, cap=DEFAULT_GRAPH_CAP):
    return Encoder(f, spec, cap).build_rules()


def encode(f, spec=None, cap=DEFAULT_GRAPH_CAP):
    enc = Encoder(f, spec, cap)
    out = enc.encode()
    logger.info("encoding has %d graphs and %d agents", len(enc.graphs()), len(enc.agents))
    return out, enc


def format_table(enc):
    lines = []
    for g in enc.graphs():
        lines.append("%s %s" % (g.name, g.serialize()))
    for a in enc.agents:
        lines.append("%s %s" % (a.name, a))
    return "\n".join(lines) + "\n"

###############################################################################
# Branches as graphs and models
###############################################################################

def _strictly_above(p, q):
    return len(p) < len(q) and q[:len(p)] == p


def branch_to_graph(branch, prefix, enc):
    """g_b(prefix): formulas, local X-edges and interaction labels."""
    if is_prop_closed(branch):
        raise EncodingError("branch is propositionally closed")
    phi = frozenset(branch.phi[prefix])
    edges = set()
    for x in enc.mv:
        view = dependency_view(branch, x)
        for u, v in view.edges():
            if u.prefix == prefix and v.prefix == prefix:
                edges.add((x, u.formula, v.formula))
    labels = set()
    for u, v in branch.deps.edges():
        if v.prefix == prefix and _strictly_above(u.prefix, prefix):
            labels.add((v.formula, IN, TOP))
        if v.prefix == prefix and _strictly_above(prefix, u.prefix):
            labels.add((v.formula, IN, BOT))
        if u.prefix == prefix and _strictly_above(v.prefix, prefix):
            labels.add((u.formula, OUT, TOP))
        if u.prefix == prefix and _strictly_above(prefix, v.prefix):
            labels.add((u.formula, OUT, BOT))
    return DepGraph(phi, frozenset(edges), frozenset(labels))


def branch_to_model(branch, enc):
    """Prefixes as states, prefix extension per encoded agent, one graph each."""
    names = dict((p, "s%d" % i) for i, p in enumerate(branch.prefixes))
    rels = dict((a.name, set()) for a in enc.agents)
    val = {}
    for p in branch.prefixes:
        val[names[p]] = {branch_to_graph(branch, p, enc).name}
        if p:
            agent, f = p[-1]
            rels.setdefault(enc.agent_name(agent, f), set()).add((names[p[:-1]], names[p]))
    m = KripkeModel([names[p] for p in branch.prefixes], rels, val)
    return PointedModel(m, names[()])
