#!/usr/bin/env python
#
# modalmu: decision procedure for single-agent K4, D4 and S4

'''Depth-first search for terse branches over transitive frames.

A level is one prefix: a locally saturated set of subformulas and the
formula that generated it. Boxes travel down with rules (B) and (4), so
boxes only grow along a chain. A diamond is discharged either by a new
child level or by an edge back to a level on the current chain that
already carries everything the boxes demand. Levels repeating an
ancestor's formula set are never created: the search loops back instead.

Each edge also records dependence edges between (level, formula) nodes.
A chain is rejected as soon as that graph has a cycle through a least
fixpoint variable X in the X-view.
'''

from dataclasses import dataclass, field
from itertools import combinations
from math import factorial
import logging

import networkx as nx

from modal.formula import (Ff, Prop, NegProp, Var, And, Or, Box, Diamond, Mu,
                           FIXPOINT, LogicSpec, agents, fixpoints, parse_logic_name,
                           size, subformulas, var_lt)
from modal.kripke import KripkeModel, PointedModel, close_logic, satisfies_spec
from modal.modelcheck import check
from modal.tableau import Sat, Unsat, Unknown

logger = logging.getLogger(__name__)

LOGICS = ('K4', 'D4', 'S4')
DEFAULT_AGENT = 'a'
MAX_STEPS = None


class K4Error(ValueError):
    pass


def small_model_bound(f):
    """2 |f|! - 1, the state count a satisfiable formula never needs to exceed."""
    n = f if isinstance(f, int) else size(f)
    return 2 * factorial(n) - 1


def logic_conditions(logic):
    conds = parse_logic_name(logic) if isinstance(logic, str) else frozenset(logic)
    if '4' not in conds or not conds <= {'D', 'T', '4'}:
        raise K4Error("expected one of %s, got %s" % (", ".join(LOGICS), logic))
    return conds


@dataclass
class K4Stats(object):
    steps: int = 0
    levels: int = 0
    backtracks: int = 0
    max_depth: int = 0
    signatures: set = field(default_factory=set)

    def depth_within_bound(self, f):
        return self.max_depth <= size(f) * max(1, len(self.signatures))


@dataclass
class Level(object):
    id: int
    formulas: frozenset
    marker: object
    parent: object = None
    depth: int = 0

    def boxes(self):
        return [g for g in self.formulas if isinstance(g, Box)]

    def chain(self):
        """self, then ancestors up to the root."""
        out = []
        lv = self
        while lv is not None:
            out.append(lv)
            lv = lv.parent
        return out


class K4Search(object):
    """One search for f; mutable state is undone on backtracking."""

    def __init__(self, f, conds, max_steps=MAX_STEPS):
        names = agents(f)
        if len(names) > 1:
            raise K4Error("single-agent formulas only, got agents %s" % ", ".join(names))
        self.f = f
        self.agent = names[0] if names else DEFAULT_AGENT
        self.conds = conds
        self.spec = LogicSpec({self.agent: conds})
        self.fix = fixpoints(f)
        self.mu_vars = [x for x, g in self.fix.items() if isinstance(g, Mu)]
        self.order = dict((g, i) for i, g in enumerate(subformulas(f)))
        self.guessable = self._guessable()
        self.levels = []
        self.edges = set()
        self.deps = nx.DiGraph()
        self.stats = K4Stats()
        self.max_steps = max_steps

    def _guessable(self):
        out = []
        for g in subformulas(self.f):
            if isinstance(g, Box):
                out.extend([g, g.body])
            elif isinstance(g, Diamond):
                out.append(g.body)
        seen = set()
        return [g for g in out if not (g in seen or seen.add(g))]

    def _sorted(self, formulas):
        return sorted(formulas, key=lambda g: self.order.get(g, len(self.order)))

    ###########################################################################
    # Local saturation
    ###########################################################################

    def _consistent(self, typ):
        for g in typ:
            if isinstance(g, Ff):
                return False
            if isinstance(g, Prop) and NegProp(g.name) in typ:
                return False
        return True

    def _close(self, typ, edges, queue):
        """Yield (formulas, local edges) for every (or)-choice."""
        typ = set(typ)
        edges = list(edges)
        queue = list(queue)
        while queue:
            g = queue.pop()
            if isinstance(g, Ff) or (isinstance(g, Prop) and NegProp(g.name) in typ) \
                    or (isinstance(g, NegProp) and Prop(g.name) in typ):
                return
            if isinstance(g, Or):
                for d in (g.left, g.right):
                    extra = [] if d in typ else [d]
                    yield from self._close(typ | {d}, edges + [(g, d)], queue + extra)
                return
            succ = []
            if isinstance(g, FIXPOINT):
                succ = [g.body]
            elif isinstance(g, Var) and not g.dual:
                succ = [self.fix[g.name]]
            elif isinstance(g, And):
                succ = [g.left, g.right]
            elif isinstance(g, Box) and 'T' in self.conds:
                succ = [g.body]
            for s in succ:
                edges.append((g, s))
                if s not in typ:
                    typ.add(s)
                    queue.append(s)
        if self._consistent(typ):
            yield frozenset(typ), tuple(edges)

    def _types(self, seeds):
        """Saturated sets over seeds, fewest guessed formulas first."""
        seeds = frozenset(seeds)
        optional = [g for g in self.guessable if g not in seeds]
        seen = set()
        for k in range(len(optional) + 1):
            for extra in combinations(optional, k):
                start = seeds | set(extra)
                for typ, edges in self._close(start, (), self._sorted(start)):
                    key = (typ, frozenset(edges))
                    if key in seen:
                        continue
                    seen.add(key)
                    yield typ, edges

    ###########################################################################
    # Mutations with undo
    ###########################################################################

    def _add_dep(self, u, v, undo):
        for n in (u, v):
            if n not in self.deps:
                self.deps.add_node(n)
                undo.append(('node', n))
        if not self.deps.has_edge(u, v):
            self.deps.add_edge(u, v)
            undo.append(('dep', (u, v)))

    def _new_level(self, typ, local, marker, parent, undo):
        lv = Level(len(self.levels), typ, marker, parent,
                   0 if parent is None else parent.depth + 1)
        self.levels.append(lv)
        undo.append(('level', lv))
        for g in typ:
            if (lv.id, g) not in self.deps:
                self.deps.add_node((lv.id, g))
                undo.append(('node', (lv.id, g)))
        for u, v in local:
            self._add_dep((lv.id, u), (lv.id, v), undo)
        self.stats.levels += 1
        self.stats.max_depth = max(self.stats.max_depth, lv.depth)
        self.stats.signatures.add((typ, marker))
        return lv

    def _link(self, src, dst, premise, body, undo):
        """Model edge src -> dst discharging premise, with (B) and (4) edges."""
        if (src.id, dst.id) not in self.edges:
            self.edges.add((src.id, dst.id))
            undo.append(('edge', (src.id, dst.id)))
        self._add_dep((src.id, premise), (dst.id, body), undo)
        for box in src.boxes():
            self._add_dep((src.id, box), (dst.id, box.body), undo)
            self._add_dep((src.id, box), (dst.id, box), undo)

    def _undo(self, undo):
        for kind, item in reversed(undo):
            if kind == 'level':
                self.levels.pop()
            elif kind == 'edge':
                self.edges.discard(item)
            elif kind == 'dep':
                self.deps.remove_edge(*item)
            elif kind == 'node':
                self.deps.remove_node(item)
        del undo[:]
        self.stats.backtracks += 1

    ###########################################################################
    # Checks
    ###########################################################################

    def has_x_cycle(self):
        for x in self.mu_vars:
            view = nx.DiGraph()
            view.add_nodes_from(self.deps.nodes())
            for u, v in self.deps.edges():
                g = u[1]
                if isinstance(g, Var) and g.name != x and var_lt(x, g.name, self.f):
                    continue
                view.add_edge(u, v)
            for comp in nx.strongly_connected_components(view):
                if not any(isinstance(n[1], Var) and n[1].name == x for n in comp):
                    continue
                if len(comp) > 1 or any(view.has_edge(n, n) for n in comp):
                    logger.debug("cycle through %s", x)
                    return True
        return False

    def _accepts(self, src, dst, body):
        if body not in dst.formulas:
            return False
        for box in src.boxes():
            if box not in dst.formulas or box.body not in dst.formulas:
                return False
        return True

    def _tick(self):
        self.stats.steps += 1
        if self.max_steps is not None and self.stats.steps > self.max_steps:
            raise _Budget()

    ###########################################################################
    # Search
    ###########################################################################

    def obligations(self, lv):
        out = [(g, g.body) for g in self._sorted(lv.formulas) if isinstance(g, Diamond)]
        if not out and 'D' in self.conds and 'T' not in self.conds:
            boxes = self._sorted(lv.boxes())
            if boxes:
                out.append((boxes[0], boxes[0].body))
        return out

    def children(self, lv):
        return [c for c in self.levels if c.parent is lv]

    def solve_level(self, lv):
        yield from self._discharge(lv, self.obligations(lv), 0)

    def _discharge(self, lv, obs, i):
        if i == len(obs):
            yield lv
            return
        self._tick()
        premise, body = obs[i]
        undo = []
        # back to the chain
        for target in lv.chain():
            if self._accepts(lv, target, body):
                self._link(lv, target, premise, body, undo)
                if not self.has_x_cycle():
                    yield from self._discharge(lv, obs, i + 1)
                self._undo(undo)
        # a child made for an earlier diamond
        for child in self.children(lv):
            if body in child.formulas:
                self._link(lv, child, premise, body, undo)
                if not self.has_x_cycle():
                    yield from self._discharge(lv, obs, i + 1)
                self._undo(undo)
        # a fresh child
        seeds = {body}
        for box in lv.boxes():
            seeds.update((box, box.body))
        taken = set(a.formulas for a in lv.chain())
        for typ, local in self._types(seeds):
            self._tick()
            if typ in taken:
                continue
            child = self._new_level(typ, local, body, lv, undo)
            self._link(lv, child, premise, body, undo)
            if not self.has_x_cycle():
                for _ in self.solve_level(child):
                    yield from self._discharge(lv, obs, i + 1)
            self._undo(undo)

    def roots(self):
        for typ, local in self._types({self.f}):
            undo = []
            root = self._new_level(typ, local, None, None, undo)
            if not self.has_x_cycle():
                yield root
            self._undo(undo)

    def model(self):
        names = dict((lv.id, "s%d" % lv.id) for lv in self.levels)
        rel = set((names[u], names[v]) for u, v in self.edges)
        val = dict((names[lv.id], set(g.name for g in lv.formulas if isinstance(g, Prop)))
                   for lv in self.levels)
        m = KripkeModel([names[lv.id] for lv in self.levels], {self.agent: rel}, val)
        return PointedModel(close_logic(m, self.spec), names[0])


class _Budget(Exception):
    pass


def solve_k4(f, logic='K4', max_steps=MAX_STEPS):
    """Decide f over single-agent K4, D4 or S4 frames.

    Returns (verdict, stats). Sat witnesses are model checked. Without
    max_steps the search runs to completion and never returns Unknown.
    """
    conds = logic_conditions(logic)
    search = K4Search(f, conds, max_steps)
    try:
        for root in search.roots():
            for _ in search.solve_level(root):
                pm = search.model()
                if check(pm, f) and satisfies_spec(pm.model, search.spec):
                    logger.info("witness with %d states after %d steps",
                                len(pm.model), search.stats.steps)
                    return Sat(pm), search.stats
                logger.debug("candidate of %d levels failed the model check",
                             len(search.levels))
    except _Budget:
        logger.warning("search budget of %d steps exhausted", max_steps)
        return Unknown('max_steps'), search.stats
    return Unsat(None), search.stats
