#!/usr/bin/env python
#
# modalmu: prefixed tableaux

'''Prefixed tableau for the mu-calculus over frames given by a LogicSpec.

A prefix is a tuple of steps (agent, formula); the step records the
diamond (or box, for rule d) that generated it. The dependence relation
between prefixed formulas is one networkx DiGraph; the view for a least
fixpoint variable X drops the edges leaving `sigma Y` whenever X < Y.
'''

from dataclasses import dataclass, field
import logging

import networkx as nx

from modal.formula import (Ff, Prop, NegProp, Var, And, Or, Box, Diamond, Mu,
                           FIXPOINT, LogicSpec, agents, fixpoints, size,
                           subformulas, var_lt)
from modal.kripke import KripkeModel, PointedModel, close_logic, satisfies_spec
from modal.modelcheck import check

logger = logging.getLogger(__name__)


class TableauError(ValueError):
    pass


@dataclass
class TableauConfig(object):
    kappa: int = 3
    max_prefix_len: int = 12
    max_nodes: int = 5000
    exact_bound: bool = False

    def __post_init__(self):
        for name in ('kappa', 'max_prefix_len', 'max_nodes'):
            if getattr(self, name) < 1:
                raise TableauError("%s must be positive" % name)

    def prefix_bound(self, f, n_agents):
        if not self.exact_bound:
            return self.max_prefix_len
        n = size(f)
        return max(1, n_agents) * self.kappa ** (n * n) * 2 ** (n + 1)

###############################################################################
# Prefixes and prefixed formulas
###############################################################################

EPSILON = ()


def format_prefix(prefix):
    if not prefix:
        return "e"
    return ".".join("%s<%s>" % (a, f) for a, f in prefix)


def extend(prefix, agent, f):
    return prefix + ((agent, f),)


def last_agent(prefix):
    return prefix[-1][0] if prefix else None


def is_flat(prefix, agent, spec):
    """sigma is agent-flat: agent has 5 and sigma ends in an agent step."""
    return spec.has(agent, '5') and last_agent(prefix) == agent


@dataclass(frozen=True)
class PrefixedFormula(object):
    prefix: tuple
    formula: object

    def __str__(self):
        return "%s %s" % (format_prefix(self.prefix), self.formula)


@dataclass(frozen=True)
class RuleInstance(object):
    rule: str
    premise: PrefixedFormula
    conclusions: tuple
    creates: tuple = None

    @property
    def key(self):
        return (self.rule, self.premise, self.conclusions)

    def __str__(self):
        return "(%s) %s => %s" % (self.rule, self.premise,
                                  " | ".join(str(c) for c in self.conclusions))

###############################################################################
# Branches
###############################################################################

class Branch(object):
    """Prefixed formulas, dependence edges and rule bookkeeping."""

    def __init__(self, root, spec):
        self.root = root
        self.spec = spec
        self.fixpoints = fixpoints(root)
        self.prefixes = []
        self.phi = {}
        self.deps = nx.DiGraph()
        self.applied = set()
        self.split = set()
        self.log = []
        self.truncated = False

    @classmethod
    def initial(cls, root, spec):
        b = cls(root, spec)
        b.add(PrefixedFormula(EPSILON, root))
        return b

    def copy(self):
        b = Branch.__new__(Branch)
        b.root = self.root
        b.spec = self.spec
        b.fixpoints = self.fixpoints
        b.prefixes = list(self.prefixes)
        b.phi = dict((p, dict(fs)) for p, fs in self.phi.items())
        b.deps = self.deps.copy()
        b.applied = set(self.applied)
        b.split = set(self.split)
        b.log = list(self.log)
        b.truncated = self.truncated
        return b

    def has(self, pf):
        return pf.formula in self.phi.get(pf.prefix, ())

    def add(self, pf):
        if pf.prefix not in self.phi:
            self.phi[pf.prefix] = {}
            self.prefixes.append(pf.prefix)
        new = pf.formula not in self.phi[pf.prefix]
        self.phi[pf.prefix][pf.formula] = None
        self.deps.add_node(pf)
        return new

    def formulas(self):
        for p in self.prefixes:
            for f in self.phi[p]:
                yield PrefixedFormula(p, f)

    def children(self, prefix):
        n = len(prefix)
        return [p for p in self.prefixes if len(p) == n + 1 and p[:n] == prefix]

    def children_of_agent(self, prefix, agent):
        return [p for p in self.children(prefix) if p[-1][0] == agent]

    def ancestors(self, prefix):
        return [prefix[:i] for i in range(len(prefix))]

    def render(self):
        lines = []
        for p in self.prefixes:
            for f in self.phi[p]:
                lines.append("%s %s" % (format_prefix(p), f))
        return "\n".join(lines)

    def __len__(self):
        return sum(len(fs) for fs in self.phi.values())

###############################################################################
# Rules
###############################################################################

def _pf(prefix, f):
    return PrefixedFormula(prefix, f)


def _local_instances(b, spec, prefix, f):
    """Instances of the rules that never create prefixes, (or) excluded."""
    premise = _pf(prefix, f)
    if isinstance(f, FIXPOINT):
        yield RuleInstance('fix', premise, (_pf(prefix, f.body),))
    elif isinstance(f, Var) and not f.dual:
        yield RuleInstance('X', premise, (_pf(prefix, b.fixpoints[f.name]),))
    elif isinstance(f, And):
        yield RuleInstance('and', premise, (_pf(prefix, f.left), _pf(prefix, f.right)))
    elif isinstance(f, Box):
        a = f.agent
        conds = spec.conditions(a)
        if 'T' in conds:
            yield RuleInstance('t', premise, (_pf(prefix, f.body),))
        for child in b.children_of_agent(prefix, a):
            yield RuleInstance('B', premise, (_pf(child, f.body),))
            if '4' in conds:
                yield RuleInstance('4', premise, (_pf(child, f),))
        if last_agent(prefix) == a:
            parent = prefix[:-1]
            if 'B' in conds:
                yield RuleInstance('b', premise, (_pf(parent, f.body),))
                if '4' in conds:
                    yield RuleInstance('b4', premise, (_pf(parent, f),))
            if '5' in conds:
                yield RuleInstance('B5', premise, (_pf(parent, f),))
                for sibling in b.children_of_agent(parent, a):
                    if sibling != prefix:
                        yield RuleInstance('B55', premise, (_pf(sibling, f),))


def _generating_instances(b, spec, prefix, f):
    """Instances of (D), (d), (D5), (D55); some may reuse an existing prefix."""
    premise = _pf(prefix, f)
    if isinstance(f, Diamond):
        a, phi = f.agent, f.body
        if not is_flat(prefix, a, spec):
            target = extend(prefix, a, phi)
            yield RuleInstance('D', premise, (_pf(target, phi),), target)
        elif spec.has(a, '5'):
            # prefix = sigma . a<psi>, or deeper sigma . a<psi> . a<psi'>
            parent = prefix[:-1]
            flat_parent = is_flat(parent, a, spec)
            rule = 'D55' if flat_parent else 'D5'
            home = parent[:-1] if flat_parent else parent
            base = parent if flat_parent else prefix
            if b.has(_pf(home, f)):
                # already discharged from the shorter prefix
                done = _pf(extend(home, a, phi), phi)
                if b.has(done):
                    yield RuleInstance('discharge', premise, (done,))
            else:
                target = extend(base, a, phi)
                yield RuleInstance(rule, premise, (_pf(target, phi),), target)
    elif isinstance(f, Box) and spec.has(f.agent, 'D'):
        target = extend(prefix, f.agent, f.body)
        yield RuleInstance('d', premise, (_pf(target, f.body),), target)


def _finalize(b, inst):
    """Mark creates only when the target prefix is new."""
    if inst.creates is not None and inst.creates in b.phi:
        return RuleInstance(inst.rule, inst.premise, inst.conclusions, None)
    return inst


def applicable_rules(b, spec=None):
    """Every enabled, not yet applied rule instance on the branch."""
    spec = spec or b.spec
    out = []
    for pf in b.formulas():
        p, f = pf.prefix, pf.formula
        if isinstance(f, Or):
            if pf not in b.split:
                out.append(RuleInstance('or', pf, (_pf(p, f.left), _pf(p, f.right))))
            continue
        for inst in _local_instances(b, spec, p, f):
            if inst.key not in b.applied:
                out.append(inst)
        for inst in _generating_instances(b, spec, p, f):
            if inst.key not in b.applied:
                out.append(_finalize(b, inst))
    return out


def _record(b, inst, conclusions):
    b.applied.add(inst.key)
    for c in conclusions:
        b.add(c)
        b.deps.add_edge(inst.premise, c)
    b.log.append(inst)
    logger.debug("apply %s", inst)


def apply(b, inst):
    """Apply inst; returns the successor branches (two for (or))."""
    if inst.rule == 'or':
        left, right = b.copy(), b.copy()
        for branch, c in ((left, inst.conclusions[0]), (right, inst.conclusions[1])):
            branch.split.add(inst.premise)
            _record(branch, inst, (c,))
        return [left, right]
    out = b.copy()
    _record(out, inst, inst.conclusions)
    return [out]


def apply_in_place(b, inst):
    _record(b, inst, inst.conclusions)

###############################################################################
# Closure
###############################################################################

def is_prop_closed(b):
    for p in b.prefixes:
        fs = b.phi[p]
        for f in fs:
            if isinstance(f, Ff):
                return True
            if isinstance(f, Prop) and NegProp(f.name) in fs:
                return True
    return False


def least_vars(b):
    return [x for x, g in b.fixpoints.items() if isinstance(g, Mu)]


def dependency_view(b, x):
    """deps without edges leaving sigma Y for X < Y."""
    g = nx.DiGraph()
    g.add_nodes_from(b.deps.nodes())
    for u, v in b.deps.edges():
        f = u.formula
        if isinstance(f, Var) and f.name != x and var_lt(x, f.name, b.root):
            continue
        g.add_edge(u, v)
    return g


def _is_x(node, x):
    return isinstance(node.formula, Var) and node.formula.name == x


def x_counters(b, x):
    """Per node, the largest number of sigma X on a path ending there.

    None means the node sits on a path with X recurring forever.
    """
    view = dependency_view(b, x)
    cond = nx.condensation(view)
    members = cond.graph['mapping']
    infinite = set()
    weight = {}
    for c, data in cond.nodes(data=True):
        nodes = data['members']
        xs = sum(1 for n in nodes if _is_x(n, x))
        cyclic = len(nodes) > 1 or any(view.has_edge(n, n) for n in nodes)
        if xs and cyclic:
            infinite.add(c)
        weight[c] = xs
    best = {}
    for c in nx.topological_sort(cond):
        preds = list(cond.predecessors(c))
        if c in infinite or any(best[q] is None for q in preds):
            best[c] = None
            continue
        best[c] = weight[c] + max([best[q] for q in preds] or [0])
    return dict((n, best[members[n]]) for n in view.nodes())


def is_fp_closed(b, kappa):
    for x in least_vars(b):
        for count in x_counters(b, x).values():
            if count is None or count > kappa:
                logger.debug("fixpoint closure on %s", x)
                return True
    return False


def is_closed(b, kappa):
    return is_prop_closed(b) or is_fp_closed(b, kappa)

###############################################################################
# Blocking and model extraction
###############################################################################

def _signatures(b):
    xs = least_vars(b)
    counters = [x_counters(b, x) for x in xs]
    sig = {}
    for p in b.prefixes:
        row = []
        for cnt in counters:
            vals = [cnt.get(_pf(p, f), 0) for f in b.phi[p]]
            vals = [-1 if v is None else v for v in vals]
            row.append(max(vals or [0]))
        sig[p] = (frozenset(b.phi[p]), tuple(row))
    return sig


def blocking(b, spec):
    """Map each blocked prefix to the ancestor standing in for it."""
    sig = _signatures(b)
    blocked = {}
    dead = set()
    for p in b.prefixes:
        if not p:
            continue
        if any(a in blocked or a in dead for a in b.ancestors(p)):
            dead.add(p)
            continue
        agent = last_agent(p)
        for anc in b.ancestors(p)[1:]:
            if last_agent(anc) != agent or sig[anc] != sig[p]:
                continue
            if spec.has(agent, '5') and frozenset(b.phi[anc[:-1]]) != frozenset(b.phi[p[:-1]]):
                continue
            blocked[p] = anc
            break
    return blocked


def live_prefixes(b, blocked):
    out = []
    for p in b.prefixes:
        if p in blocked or any(a in blocked for a in b.ancestors(p)):
            continue
        out.append(p)
    return out


def extract_model(b, spec=None, blocked=None):
    """Prefixes as states, prefix extension as R0, then frame closures."""
    spec = spec or b.spec
    if is_prop_closed(b):
        raise TableauError("cannot extract a model from a closed branch")
    if blocked is None:
        blocked = blocking(b, spec)
    alive = live_prefixes(b, blocked)
    names = dict((p, "s%d" % i) for i, p in enumerate(alive))
    rels = dict((a, set()) for a in set(agents(b.root)) | set(spec.agents))
    for p in b.prefixes:
        if not p:
            continue
        parent = p[:-1]
        if parent not in names:
            continue
        target = names.get(p) or names.get(blocked.get(p))
        if target is None:
            continue
        rels.setdefault(last_agent(p), set()).add((names[parent], target))
    val = {}
    for p in alive:
        val[names[p]] = set(f.name for f in b.phi[p] if isinstance(f, Prop))
    model = KripkeModel([names[p] for p in alive], rels, val)
    model = close_logic(model, spec)
    logger.debug("extracted %d states from %d prefixes", len(alive), len(b.prefixes))
    return PointedModel(model, names[EPSILON])

###############################################################################
# Search
###############################################################################

@dataclass
class Sat(object):
    witness: PointedModel
    branch: Branch = field(default=None, repr=False)
    name = 'SAT'


@dataclass
class Unsat(object):
    relative_to: TableauConfig
    name = 'UNSAT'


@dataclass
class Unknown(object):
    bound_hit: str
    name = 'UNKNOWN'


def _pick_creating(b, spec, instances, bound, blocked):
    """First prefix-creating instance at the earliest unblocked prefix."""
    best = None
    order = dict((p, i) for i, p in enumerate(b.prefixes))
    for inst in instances:
        if inst.creates is None:
            continue
        home = inst.premise.prefix
        if home in blocked or any(a in blocked for a in b.ancestors(home)):
            continue
        if len(inst.creates) > bound:
            b.truncated = True
            continue
        if best is None or order[home] < order[best.premise.prefix]:
            best = inst
    return best


def verify(pm, f, spec):
    return check(pm, f) and satisfies_spec(pm.model, spec)


def solve(f, spec=None, cfg=None):
    """Depth-first search for an open branch for f."""
    spec = spec or LogicSpec()
    cfg = cfg or TableauConfig()
    bound = cfg.prefix_bound(f, len(set(agents(f)) | set(spec.agents)))
    stack = [Branch.initial(f, spec)]
    steps = 0
    undecided = None
    while stack:
        b = stack.pop()
        while True:
            steps += 1
            if steps > cfg.max_nodes:
                logger.info("tableau gave up after %d steps", steps)
                return Unknown('max_nodes')
            if is_prop_closed(b):
                break
            instances = applicable_rules(b, spec)
            local = [i for i in instances if i.rule != 'or' and i.creates is None]
            if local:
                for inst in local:
                    if inst.key not in b.applied:
                        apply_in_place(b, inst)
                continue
            splits = [i for i in instances if i.rule == 'or']
            if splits:
                left, right = apply(b, splits[0])
                stack.append(right)
                b = left
                continue
            if is_fp_closed(b, cfg.kappa):
                break
            blocked = {} if cfg.exact_bound else blocking(b, spec)
            inst = _pick_creating(b, spec, instances, bound, blocked)
            if inst is not None:
                apply_in_place(b, inst)
                continue
            pm = extract_model(b, spec, blocked)
            if verify(pm, f, spec):
                logger.info("open branch with %d prefixes, witness of %d states",
                            len(b.prefixes), len(pm.model))
                return Sat(pm, b)
            logger.info("open branch did not yield a model; continuing")
            undecided = 'max_prefix_len' if b.truncated else 'unverified_branch'
            break
    if undecided:
        return Unknown(undecided)
    return Unsat(cfg)


def subformula_closure_holds(b):
    """Every prefixed formula is a subformula of the root."""
    sub = set(subformulas(b.root))
    return all(pf.formula in sub for pf in b.formulas())
