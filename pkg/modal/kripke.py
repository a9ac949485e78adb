#!/usr/bin/env python
#
# modalmu: Kripke models and frame conditions

'''Finite Kripke models, frame-condition predicates and closures, tree
unfolding, bisimulation and model enumeration.

Relations are kept as frozensets of (state, state) pairs; closures that
are graph problems are handed to networkx.
'''

from itertools import combinations, product
import logging
import random
import re

import networkx as nx

from modal.formula import CONDITIONS, LogicSpec

logger = logging.getLogger(__name__)

MAX_ENUM_STATES = 6
CLOSURE_ORDER = CONDITIONS


class ModelError(ValueError):
    pass


class CapExceeded(ModelError):
    pass


class KripkeModel(object):
    """A triple (W, R, V): ordered states, per-agent relations, valuation."""

    def __init__(self, states, relations=None, valuation=None):
        self.states = tuple(states)
        if len(set(self.states)) != len(self.states):
            raise ModelError("duplicate state ids")
        self.index = dict((s, i) for i, s in enumerate(self.states))
        self.relations = {}
        for agent, pairs in (relations or {}).items():
            pairs = frozenset(tuple(p) for p in pairs)
            for s, t in pairs:
                if s not in self.index or t not in self.index:
                    raise ModelError("relation %s uses undeclared state in (%s, %s)" %
                                     (agent, s, t))
            self.relations[agent] = pairs
        self.valuation = dict((s, frozenset()) for s in self.states)
        for s, ps in (valuation or {}).items():
            if s not in self.index:
                raise ModelError("valuation of undeclared state %s" % s)
            self.valuation[s] = frozenset(ps)
        self._succ = {}

    @property
    def agents(self):
        return sorted(self.relations)

    @property
    def props(self):
        out = set()
        for ps in self.valuation.values():
            out |= ps
        return sorted(out)

    def relation(self, agent):
        if agent not in self.relations:
            raise ModelError("unknown agent %s" % agent)
        return self.relations[agent]

    def successors(self, agent, s):
        key = (agent, s)
        if key not in self._succ:
            rel = self.relations.get(agent, frozenset())
            self._succ[key] = tuple(t for t in self.states if (s, t) in rel)
        return self._succ[key]

    def holds(self, prop, s):
        return prop in self.valuation[s]

    def graph(self, agent):
        g = nx.DiGraph()
        g.add_nodes_from(self.states)
        g.add_edges_from(self.relation(agent))
        return g

    def with_relation(self, agent, pairs):
        rels = dict(self.relations)
        rels[agent] = pairs
        return KripkeModel(self.states, rels, self.valuation)

    def with_valuation(self, valuation):
        return KripkeModel(self.states, self.relations, valuation)

    def __eq__(self, other):
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (self.states == other.states and
                self.relations == other.relations and
                self.valuation == other.valuation)

    def __hash__(self):
        return hash((self.states, frozenset(self.relations.items())))

    def __len__(self):
        return len(self.states)

    def __str__(self):
        return format_model(self)

    def __repr__(self):
        return "KripkeModel(%d states, agents=%s)" % (len(self.states), self.agents)


class PointedModel(object):

    def __init__(self, model, point):
        if point not in model.index:
            raise ModelError("point %s is not a state of the model" % (point,))
        self.model = model
        self.point = point

    def __eq__(self, other):
        if not isinstance(other, PointedModel):
            return NotImplemented
        return self.model == other.model and self.point == other.point

    def __hash__(self):
        return hash((self.model, self.point))

    def __repr__(self):
        return "PointedModel(%r, %s)" % (self.model, self.point)

###############################################################################
# Frame conditions
###############################################################################

def relation_has(states, rel, x):
    """First-order frame property x of a relation over states."""
    if x == 'D':
        sources = set(s for s, _ in rel)
        return all(s in sources for s in states)
    if x == 'T':
        return all((s, s) in rel for s in states)
    if x == 'B':
        return all((t, s) in rel for s, t in rel)
    if x == '4':
        succ = _successor_map(states, rel)
        return all((s, v) in rel for s, t in rel for v in succ[t])
    if x == '5':
        succ = _successor_map(states, rel)
        return all((u, v) in rel for s in states
                   for u in succ[s] for v in succ[s])
    raise ModelError("unknown frame condition %r" % (x,))


def _successor_map(states, rel):
    succ = dict((s, set()) for s in states)
    for s, t in rel:
        succ[s].add(t)
    return succ


def has_condition(m, agent, x):
    return relation_has(m.states, m.relation(agent), x)


def close_relation(states, rel, x):
    """Least superset of rel with property x (D adds loops to dead ends)."""
    rel = set(rel)
    if x == 'D':
        sources = set(s for s, _ in rel)
        rel.update((s, s) for s in states if s not in sources)
    elif x == 'T':
        rel.update((s, s) for s in states)
    elif x == 'B':
        rel.update([(t, s) for s, t in rel])
    elif x == '4':
        g = nx.DiGraph()
        g.add_nodes_from(states)
        g.add_edges_from(rel)
        rel = set(nx.transitive_closure(g, reflexive=False).edges())
    elif x == '5':
        # (s, u), (s, v) => (u, v), until nothing changes
        succ = _successor_map(states, rel)
        changed = True
        while changed:
            changed = False
            for s in states:
                for u in list(succ[s]):
                    missing = succ[s] - succ[u]
                    if missing:
                        succ[u] |= missing
                        changed = True
        rel = set((s, t) for s in states for t in succ[s])
    else:
        raise ModelError("unknown frame condition %r" % (x,))
    return frozenset(rel)


def close(m, agent, x):
    return m.with_relation(agent, close_relation(m.states, m.relation(agent), x))


def close_logic(m, spec):
    """Apply each agent's closures in the order D, T, B, 4, 5.

    The pass repeats until the relation is stable: the 5-closure of a
    transitive relation need not be transitive.
    """
    rels = dict(m.relations)
    for agent in spec.agents:
        rel = rels.get(agent, frozenset())
        while True:
            before = rel
            for x in CLOSURE_ORDER:
                if spec.has(agent, x):
                    rel = close_relation(m.states, rel, x)
            if rel == before:
                break
        rels[agent] = rel
    return KripkeModel(m.states, rels, m.valuation)


def satisfies_spec(m, spec):
    for agent in spec.agents:
        rel = m.relations.get(agent, frozenset())
        for x in spec.conditions(agent):
            if not relation_has(m.states, rel, x):
                return False
    return True

###############################################################################
# Unfolding, reachability, bisimulation
###############################################################################

def unfold(pm, depth):
    """Tree unfolding of pm cut at paths of length depth.

    States are paths (s0, a1, s1, ..., an, sn) as tuples.
    """
    m = pm.model
    root = (pm.point,)
    last = {root: pm.point}
    rels = dict((a, set()) for a in m.agents)
    frontier = [root]
    for _ in range(depth):
        nxt = []
        for path in frontier:
            for agent in m.agents:
                for t in m.successors(agent, last[path]):
                    child = path + (agent, t)
                    last[child] = t
                    rels[agent].add((path, child))
                    nxt.append(child)
        frontier = nxt
    states = list(last)
    valuation = dict((p, m.valuation[s]) for p, s in last.items())
    return PointedModel(KripkeModel(states, rels, valuation), root)


def reachable(m, s, agent_set=None):
    g = nx.DiGraph()
    g.add_nodes_from(m.states)
    for agent in (m.agents if agent_set is None else agent_set):
        g.add_edges_from(m.relations.get(agent, ()))
    return nx.descendants(g, s) | {s}


def restrict_reachable(pm):
    keep = reachable(pm.model, pm.point)
    m = pm.model
    states = [s for s in m.states if s in keep]
    rels = dict((a, [(s, t) for s, t in r if s in keep and t in keep])
                for a, r in m.relations.items())
    val = dict((s, m.valuation[s]) for s in states)
    return PointedModel(KripkeModel(states, rels, val), pm.point)


def _tag(t, s):
    return "%s:%s" % (t, s)


def disjoint_union(m1, m2, tags=('l', 'r')):
    """Union with states renamed to '<tag>:<state>'."""
    states = [_tag(tags[0], s) for s in m1.states] + [_tag(tags[1], s) for s in m2.states]
    rels = {}
    for t, m in zip(tags, (m1, m2)):
        for agent, pairs in m.relations.items():
            rels.setdefault(agent, set()).update((_tag(t, s), _tag(t, u)) for s, u in pairs)
    val = {}
    for t, m in zip(tags, (m1, m2)):
        for s in m.states:
            val[_tag(t, s)] = m.valuation[s]
    return KripkeModel(states, rels, val)


def duplicate_state(m, s, copy=None):
    """Add a copy of s with the same valuation and successors, and the
    same predecessors; the copy is bisimilar to s."""
    copy = copy or "%s'" % s
    states = list(m.states) + [copy]
    rels = {}
    for agent, pairs in m.relations.items():
        new = set(pairs)
        for u, v in pairs:
            if u == s:
                new.add((copy, copy if v == s else v))
            if v == s:
                new.add((copy if u == s else u, copy))
        rels[agent] = new
    val = dict(m.valuation)
    val[copy] = m.valuation[s]
    return KripkeModel(states, rels, val)


def bisimulation_classes(m):
    """Coarsest bisimulation of m as a map state -> block number."""
    block = {}
    labels = {}
    for s in m.states:
        block[s] = labels.setdefault(m.valuation[s], len(labels))
    count = len(labels)
    while True:
        sigs = {}
        new = {}
        for s in m.states:
            sig = (block[s], frozenset((a, block[t]) for a in m.agents
                                       for t in m.successors(a, s)))
            new[s] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == count:
            return new
        block, count = new, len(sigs)


def bisimilar(pm1, pm2):
    union = disjoint_union(pm1.model, pm2.model)
    classes = bisimulation_classes(union)
    return classes[_tag('l', pm1.point)] == classes[_tag('r', pm2.point)]

###############################################################################
# Enumeration
###############################################################################

def _subsets_by_size(items):
    for k in range(len(items) + 1):
        for combo in combinations(items, k):
            yield frozenset(combo)


def enumerate_frames(states, agents, spec, cap=MAX_ENUM_STATES):
    if len(states) > cap:
        raise CapExceeded("%d states exceeds the enumeration cap of %d" %
                          (len(states), cap))
    pairs = [(s, t) for s in states for t in states]
    per_agent = []
    for agent in agents:
        rels = [r for r in _subsets_by_size(pairs)
                if all(relation_has(states, r, x) for x in spec.conditions(agent))]
        per_agent.append(rels)
    for combo in product(*per_agent):
        yield dict(zip(agents, combo))


def enumerate_valuations(states, props, exclusive=()):
    """Valuations in order of increasing number of true atoms.

    exclusive: propositions of which exactly one holds at each state
    """
    slots = [(s, p) for s in states for p in props]
    choices = list(product(exclusive, repeat=len(states))) if exclusive else [()]
    for k in range(len(slots) + 1):
        for combo in combinations(slots, k):
            base = dict((s, set()) for s in states)
            for s, p in combo:
                base[s].add(p)
            for choice in choices:
                val = dict((s, frozenset(base[s])) for s in states)
                for s, p in zip(states, choice):
                    val[s] = val[s] | {p}
                yield val


def enumerate_models(n_states, agents, props, spec=None, exclusive=(),
                     cap=MAX_ENUM_STATES):
    """Yield every model on states s0..s{n-1} whose frame satisfies spec."""
    if n_states < 1:
        raise ModelError("at least one state is required")
    if n_states > cap:
        raise CapExceeded("%d states exceeds the enumeration cap of %d" %
                          (n_states, cap))
    spec = spec or LogicSpec()
    states = ["s%d" % i for i in range(n_states)]
    agents = sorted(agents)
    for rels in enumerate_frames(states, agents, spec, cap):
        for val in enumerate_valuations(states, sorted(props), tuple(exclusive)):
            yield KripkeModel(states, rels, val)


def random_relation(rng, states, density=0.3):
    return frozenset((s, t) for s in states for t in states if rng.random() < density)


def random_model(rng, n_states, agents, props, density=0.3):
    states = ["s%d" % i for i in range(n_states)]
    rels = dict((a, random_relation(rng, states, density)) for a in agents)
    val = dict((s, frozenset(p for p in props if rng.random() < 0.5)) for s in states)
    return KripkeModel(states, rels, val)

###############################################################################
# Preservation of frame conditions under closures
###############################################################################

# (x, y): relation with x whose y-closure loses x
COUNTEREXAMPLES = {
    ('4', 'B'): (('s', 't'), frozenset([('s', 't')])),
    ('5', 'T'): (('s', 't'), frozenset([('s', 't'), ('t', 't')])),
    ('5', 'B'): (('s', 't'), frozenset([('s', 't'), ('t', 't')])),
    ('4', '5'): (('s0', 's1', 's2'), frozenset([('s0', 's0'), ('s0', 's2'), ('s1', 's2')])),
}

NOT_PRESERVED = frozenset(COUNTEREXAMPLES)


def preserves(states, rel, x, y):
    """Whether closing rel (which has x) under y keeps x."""
    return relation_has(states, close_relation(states, rel, y), x)


def preservation_sweep(samples=200, max_states=5, seed=0):
    """Sample frames with property x and close them under y.

    Returns (matrix, witnesses): matrix[(x, y)] is True when no sample
    lost x; witnesses holds one failing relation per non-preserving pair.
    """
    rng = random.Random(seed)
    matrix = {}
    witnesses = {}
    for x in CONDITIONS:
        for y in CONDITIONS:
            if x == y:
                continue
            ok = True
            for _ in range(samples):
                states = ["s%d" % i for i in range(rng.randint(1, max_states))]
                rel = close_relation(states, random_relation(rng, states), x)
                if not preserves(states, rel, x, y):
                    ok = False
                    witnesses.setdefault((x, y), (tuple(states), rel))
                    break
            if ok and (x, y) in COUNTEREXAMPLES:
                states, rel = COUNTEREXAMPLES[(x, y)]
                if relation_has(states, rel, x) and not preserves(states, rel, x, y):
                    ok = False
                    witnesses[(x, y)] = (states, rel)
            matrix[(x, y)] = ok
            logger.debug("preservation %s under %s-closure: %s", x, y, ok)
    return matrix, witnesses

###############################################################################
# Text format
###############################################################################

_LINE = re.compile(r'^(states|rel|val)\b\s*([^:]*?)\s*:(.*)$')


def parse_model(text):
    states = []
    rels = {}
    val = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ModelError("line %d: cannot parse %r" % (lineno, raw))
        kind, name, rest = m.groups()
        if kind == 'states':
            for s in rest.split():
                if s not in states:
                    states.append(s)
        elif kind == 'rel':
            if not name:
                raise ModelError("line %d: relation without agent" % lineno)
            pairs = rels.setdefault(name, set())
            for chunk in rest.split(';'):
                ends = chunk.split()
                if not ends:
                    continue
                if len(ends) != 2:
                    raise ModelError("line %d: expected a pair, got %r" %
                                     (lineno, chunk.strip()))
                pairs.add(tuple(ends))
        else:
            if not name:
                raise ModelError("line %d: valuation without proposition" % lineno)
            for s in rest.split():
                val.setdefault(s, set()).add(name)
    known = set(states)
    for agent, pairs in rels.items():
        for s, t in pairs:
            if s not in known or t not in known:
                raise ModelError("relation %s uses undeclared state" % agent)
    for s in val:
        if s not in known:
            raise ModelError("valuation uses undeclared state %s" % s)
    if not states:
        raise ModelError("model declares no states")
    return KripkeModel(states, rels, val)


def format_model(m):
    lines = ["states: " + " ".join(m.states)]
    order = m.index
    for agent in m.agents:
        pairs = sorted(m.relations[agent], key=lambda p: (order[p[0]], order[p[1]]))
        lines.append(("rel %s: " % agent + " ; ".join("%s %s" % p for p in pairs)).rstrip())
    for prop in m.props:
        holders = [s for s in m.states if prop in m.valuation[s]]
        lines.append("val %s: %s" % (prop, " ".join(holders)))
    return "\n".join(lines) + "\n"
