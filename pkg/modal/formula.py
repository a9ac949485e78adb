#!/usr/bin/env python
#
# modalmu: formulas of the multi-agent modal mu-calculus

'''Formula AST, concrete syntax and syntactic measures.

Formulas are in negation normal form: negation only occurs on
propositions. Every formula produced by `parse` has its fixpoint binders
renamed apart, and all the helpers below assume that.
'''

from dataclasses import dataclass
import logging
import re

from lark import Lark, Token
from lark.exceptions import UnexpectedInput

logger = logging.getLogger(__name__)

CONDITIONS = ('D', 'T', 'B', '4', '5')
RESERVED_VAR_PREFIX = '_Z'

###############################################################################
# Errors
###############################################################################

class FormulaError(ValueError):
    pass


class ParseError(FormulaError):
    def __init__(self, message, line=None, column=None):
        if line is not None and line > 0:
            message = "%s (line %d, column %d)" % (message, line, column)
        FormulaError.__init__(self, message)
        self.line = line
        self.column = column


class UnboundVariableError(FormulaError):
    pass


class LogicSpecError(FormulaError):
    pass

###############################################################################
# AST
###############################################################################

class Formula(object):
    """Base class; nodes are immutable and compare structurally."""

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True, repr=False)
class Tt(Formula):
    def __repr__(self):
        return 'Tt()'


@dataclass(frozen=True, repr=False)
class Ff(Formula):
    def __repr__(self):
        return 'Ff()'


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class NegProp(Formula):
    name: str


@dataclass(frozen=True)
class Var(Formula):
    """Recursion variable; `dual` marks the complement of a free variable."""
    name: str
    dual: bool = False


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    agent: str
    body: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    agent: str
    body: Formula


@dataclass(frozen=True)
class Mu(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Nu(Formula):
    var: str
    body: Formula


TT = Tt()
FF = Ff()

BINARY = (And, Or)
MODAL = (Box, Diamond)
FIXPOINT = (Mu, Nu)


def children(f):
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, MODAL) or isinstance(f, FIXPOINT):
        return (f.body,)
    return ()


def rebuild(f, kids):
    """Return a node of f's kind over new children."""
    if isinstance(f, BINARY):
        return type(f)(kids[0], kids[1])
    if isinstance(f, MODAL):
        return type(f)(f.agent, kids[0])
    if isinstance(f, FIXPOINT):
        return type(f)(f.var, kids[0])
    return f

###############################################################################
# Parsing
###############################################################################

GRAMMAR = r'''
MU.2: /mu\b/
NU.2: /nu\b/
TT.2: /tt\b/
FF.2: /ff\b/
NEG.2: /neg\b/
NAME: /[a-z][a-zA-Z0-9_]*/
VAR: /[A-Z][a-zA-Z0-9_]*/
RVAR: /_Z[a-zA-Z0-9_]*/
RPROP: /_[a-z][a-zA-Z0-9_]*/

?start: formula

?formula: fixpoint
    | disjunction

fixpoint: (MU | NU) variable "." formula

?disjunction: conjunction
    | conjunction "|" disj_rest -> or_

?disj_rest: disjunction
    | fixpoint

?conjunction: modal
    | modal "&" conj_rest -> and_

?conj_rest: conjunction
    | fixpoint

?modal: atom
    | "<" NAME ">" modal_body -> diamond
    | "[" NAME "]" modal_body -> box

?modal_body: modal
    | fixpoint

?atom: TT -> tt
    | FF -> ff
    | proposition
    | "~" proposition -> negprop
    | variable
    | "~" variable -> dualvar
    | NEG "(" formula ")" -> neg
    | "(" formula ")"

?proposition: NAME | RPROP
?variable: VAR | RVAR

%import common.WS
%ignore WS
%ignore /#[^\n]*/
'''


class FormulaParser(object):
    """LALR parser for the formula grammar.

    Shift/reduce conflicts are resolved as shift, which gives fixpoints
    their maximal scope to the right.
    """

    def __init__(self):
        self.parser = Lark(GRAMMAR, parser='lalr')

    def raw_parse(self, text):
        try:
            return self.parser.parse(text)
        except UnexpectedInput as e:
            raise ParseError("syntax error near %r" % _context(text, e),
                             getattr(e, 'line', None),
                             getattr(e, 'column', None))

    def parse(self, text, open=False, allow_reserved=False):
        tree = self.raw_parse(text)
        self._check_reserved(tree, allow_reserved)
        f = self._translate(tree)
        free = free_vars(f)
        if free and not open:
            raise UnboundVariableError("unbound recursion variable(s): %s" %
                                       ", ".join(sorted(free)))
        if not open and has_dual_vars(f):
            raise FormulaError("'~' on a variable is only allowed in open formulas")
        return rename_binders(f)

    def _check_reserved(self, tree, allow_reserved):
        if allow_reserved:
            return
        if isinstance(tree, Token):
            tokens = [tree]
        else:
            tokens = tree.scan_values(lambda v: isinstance(v, Token))
        for tok in tokens:
            if tok.type in ('RVAR', 'RPROP'):
                raise ParseError("reserved name %r" % tok.value,
                                 tok.line, tok.column)

    def _translate(self, ast):
        if isinstance(ast, Token):
            if ast.type in ('NAME', 'RPROP'):
                return Prop(ast.value)
            if ast.type in ('VAR', 'RVAR'):
                return Var(ast.value)
            raise ParseError("unexpected token %r" % ast.value,
                             ast.line, ast.column)

        kind = ast.data
        args = [a for a in ast.children
                if not (isinstance(a, Token) and a.type in ('MU', 'NU', 'NEG'))]
        if kind == 'tt':
            return TT
        if kind == 'ff':
            return FF
        if kind == 'negprop':
            return NegProp(args[0].value)
        if kind == 'dualvar':
            return Var(args[0].value, dual=True)
        if kind == 'neg':
            return negate(self._translate(args[0]))
        if kind == 'and_':
            return And(self._translate(args[0]), self._translate(args[1]))
        if kind == 'or_':
            return Or(self._translate(args[0]), self._translate(args[1]))
        if kind == 'diamond':
            return Diamond(args[0].value, self._translate(args[1]))
        if kind == 'box':
            return Box(args[0].value, self._translate(args[1]))
        if kind == 'fixpoint':
            binder = ast.children[0].type
            node = Mu if binder == 'MU' else Nu
            return node(args[0].value, self._translate(args[1]))
        raise ValueError('unexpected parse node %s' % kind)


def _context(text, e):
    pos = getattr(e, 'pos_in_stream', None)
    if pos is None:
        return text[-10:]
    return text[pos:pos + 10]


_parser = None


def parse(text, open=False, allow_reserved=False):
    """Parse a formula.

    open: accept free recursion variables (and '~X')
    allow_reserved: accept generated names (_Z..., _p, ...)
    """
    global _parser
    if _parser is None:
        _parser = FormulaParser()
    return _parser.parse(text, open=open, allow_reserved=allow_reserved)

###############################################################################
# Printing
###############################################################################

def _open_right(f):
    """True when f's text ends in a fixpoint whose scope is not closed."""
    if isinstance(f, FIXPOINT):
        return True
    if isinstance(f, MODAL):
        return not isinstance(f.body, BINARY) and _open_right(f.body)
    if isinstance(f, And):
        return not isinstance(f.right, Or) and _open_right(f.right)
    if isinstance(f, Or):
        return _open_right(f.right)
    return False


def _paren(s):
    return "(" + s + ")"


def format_formula(f):
    if isinstance(f, Tt):
        return "tt"
    if isinstance(f, Ff):
        return "ff"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, NegProp):
        return "~" + f.name
    if isinstance(f, Var):
        return ("~" if f.dual else "") + f.name
    if isinstance(f, FIXPOINT):
        word = "mu" if isinstance(f, Mu) else "nu"
        return "%s %s. %s" % (word, f.var, format_formula(f.body))
    if isinstance(f, MODAL):
        body = format_formula(f.body)
        if isinstance(f.body, BINARY):
            body = _paren(body)
        if isinstance(f, Box):
            return "[%s] %s" % (f.agent, body)
        return "<%s> %s" % (f.agent, body)
    if isinstance(f, And):
        left = format_formula(f.left)
        if isinstance(f.left, BINARY + FIXPOINT) or _open_right(f.left):
            left = _paren(left)
        right = format_formula(f.right)
        if isinstance(f.right, Or):
            right = _paren(right)
        return "%s & %s" % (left, right)
    if isinstance(f, Or):
        left = format_formula(f.left)
        if isinstance(f.left, (Or,) + FIXPOINT) or _open_right(f.left):
            left = _paren(left)
        return "%s | %s" % (left, format_formula(f.right))
    raise TypeError("not a formula: %r" % (f,))

###############################################################################
# Traversals
###############################################################################

def walk(f):
    """Pre-order, left first, repeats included."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def subformulas(f):
    """sub(f) as a list in pre-order of first occurrence."""
    seen = set()
    out = []
    for g in walk(f):
        if g not in seen:
            seen.add(g)
            out.append(g)
    return out


def size(f):
    return len(subformulas(f))


def free_vars(f, bound=frozenset()):
    if isinstance(f, Var):
        return set() if f.name in bound else {f.name}
    if isinstance(f, FIXPOINT):
        return free_vars(f.body, bound | {f.var})
    out = set()
    for c in children(f):
        out |= free_vars(c, bound)
    return out


def is_closed(f):
    return not free_vars(f)


def has_dual_vars(f):
    return any(isinstance(g, Var) and g.dual for g in walk(f))


def is_recursion_free(f):
    return not any(isinstance(g, FIXPOINT + (Var,)) for g in walk(f))


def has_mu(f):
    return any(isinstance(g, Mu) for g in walk(f))


def agents(f):
    return sorted({g.agent for g in walk(f) if isinstance(g, MODAL)})


def props(f):
    return sorted({g.name for g in walk(f) if isinstance(g, (Prop, NegProp))})


def bound_vars(f):
    return [g.var for g in walk(f) if isinstance(g, FIXPOINT)]


def var_names(f):
    names = set(bound_vars(f))
    names.update(g.name for g in walk(f) if isinstance(g, Var))
    return names

###############################################################################
# Fresh names and binder renaming
###############################################################################

class NameSupply(object):
    """Deterministic generator of unused recursion variables."""

    def __init__(self, *formulas, prefix=RESERVED_VAR_PREFIX):
        self.prefix = prefix
        self.used = set()
        for f in formulas:
            self.used |= var_names(f)
        self.counter = 0

    def avoid(self, f):
        self.used |= var_names(f)

    def __call__(self, base=None):
        if base is not None and base not in self.used:
            self.used.add(base)
            return base
        stem = self.prefix if base is None else base + "_"
        while True:
            name = "%s%d" % (stem, self.counter)
            self.counter += 1
            if name not in self.used:
                self.used.add(name)
                return name


def fresh_var(*formulas):
    return NameSupply(*formulas)()


def substitute(f, name, g):
    """Replace free occurrences of Var(name) by g (~name by negate(g))."""
    if isinstance(f, Var):
        if f.name != name:
            return f
        return negate(g) if f.dual else g
    if isinstance(f, FIXPOINT) and f.var == name:
        return f
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, [substitute(c, name, g) for c in kids])


def rename_binders(f):
    """Rename fixpoint binders so that each variable is bound once."""
    free = free_vars(f)
    supply = NameSupply()
    supply.used |= free

    def go(g, env):
        if isinstance(g, Var):
            return Var(env.get(g.name, g.name), g.dual)
        if isinstance(g, FIXPOINT):
            base = g.var
            name = supply(base)
            inner = dict(env)
            inner[g.var] = name
            return type(g)(name, go(g.body, inner))
        kids = children(g)
        if not kids:
            return g
        return rebuild(g, [go(c, env) for c in kids])

    return go(f, {})

###############################################################################
# Negation, closure and fixpoint lookup
###############################################################################

def negate(f, _bound=frozenset()):
    """NNF dual of f. Free variables become dual occurrences."""
    if isinstance(f, Tt):
        return FF
    if isinstance(f, Ff):
        return TT
    if isinstance(f, Prop):
        return NegProp(f.name)
    if isinstance(f, NegProp):
        return Prop(f.name)
    if isinstance(f, Var):
        if f.name in _bound:
            return f
        return Var(f.name, not f.dual)
    if isinstance(f, And):
        return Or(negate(f.left, _bound), negate(f.right, _bound))
    if isinstance(f, Or):
        return And(negate(f.left, _bound), negate(f.right, _bound))
    if isinstance(f, Box):
        return Diamond(f.agent, negate(f.body, _bound))
    if isinstance(f, Diamond):
        return Box(f.agent, negate(f.body, _bound))
    if isinstance(f, Mu):
        return Nu(f.var, negate(f.body, _bound | {f.var}))
    if isinstance(f, Nu):
        return Mu(f.var, negate(f.body, _bound | {f.var}))
    raise TypeError("not a formula: %r" % (f,))


def subbar(f):
    """sub(f) followed by the negations of its members, without repeats."""
    out = subformulas(f)
    seen = set(out)
    for g in list(out):
        n = negate(g)
        if n not in seen:
            seen.add(n)
            out.append(n)
    return out


def fixpoints(f):
    return {g.var: g for g in walk(f) if isinstance(g, FIXPOINT)}


def fx(name, f):
    """The fixpoint subformula of f binding `name`."""
    for g in walk(f):
        if isinstance(g, FIXPOINT) and g.var == name:
            return g
    raise UnboundVariableError("variable %s is not bound in %s" % (name, f))


def var_leq(x, y, f):
    """X <= Y iff fx(X) is a subformula of fx(Y)."""
    fy = fx(y, f)
    fxx = fx(x, f)
    return any(g == fxx for g in walk(fy))


def var_lt(x, y, f):
    return x != y and var_leq(x, y, f)


def cl(f, root):
    """Close f by substituting its free variables with their fixpoints."""
    table = fixpoints(root)
    while True:
        free = free_vars(f)
        if not free:
            return f
        for name in free:
            if name not in table:
                raise UnboundVariableError("variable %s is not bound in %s" %
                                           (name, root))
        # innermost first
        name = min(free, key=lambda n: size(table[n]))
        f = substitute(f, name, table[name])


def closed_subbar(f):
    """cl(psi) and its negation for every psi in sub(f), without repeats."""
    out = []
    seen = set()
    for g in subformulas(f):
        c = cl(g, f)
        for h in (c, negate(c)):
            if h not in seen:
                seen.add(h)
                out.append(h)
    return out


def modal_depth(f):
    if not is_recursion_free(f):
        raise FormulaError("modal depth is only defined for recursion-free formulas")

    def md(g):
        if isinstance(g, MODAL):
            return 1 + md(g.body)
        if isinstance(g, BINARY):
            return max(md(g.left), md(g.right))
        return 0

    return md(f)

###############################################################################
# Constructors
###############################################################################

def conj(formulas):
    """Balanced conjunction; the empty conjunction is tt."""
    formulas = list(formulas)
    if not formulas:
        return TT
    if len(formulas) == 1:
        return formulas[0]
    mid = len(formulas) // 2
    return And(conj(formulas[:mid]), conj(formulas[mid:]))


def disj(formulas):
    """Balanced disjunction; the empty disjunction is ff."""
    formulas = list(formulas)
    if not formulas:
        return FF
    if len(formulas) == 1:
        return formulas[0]
    mid = len(formulas) // 2
    return Or(disj(formulas[:mid]), disj(formulas[mid:]))


def implies(a, b):
    return Or(negate(a), b)


def box_all(agent_set, f):
    return conj(Box(a, f) for a in sorted(agent_set))


def diamond_any(agent_set, f):
    return disj(Diamond(a, f) for a in sorted(agent_set))


def inv(f, agent_set, var=None):
    """nu Z. (f & [A] Z): f holds at every reachable state."""
    var = var or fresh_var(f)
    return Nu(var, And(f, box_all(agent_set, Var(var))))


def eve(f, agent_set, var=None):
    """mu Z. (f | <A> Z): f holds at some reachable state."""
    var = var or fresh_var(f)
    return Mu(var, Or(f, diamond_any(agent_set, Var(var))))


def inv_a(f, agent, var=None):
    """nu Z. (f & [a] Z), invariance along a single agent."""
    return inv(f, [agent], var)


def eve_a(f, agent, var=None):
    return eve(f, [agent], var)


def inv_d(f, d, agent_set):
    """f & [A]f & ... & [A]^d f."""
    layers = [f]
    for _ in range(d):
        layers.append(box_all(agent_set, layers[-1]))
    return conj_right(layers)


def conj_right(formulas):
    """Right-nested conjunction, keeping the written order."""
    formulas = list(formulas)
    if not formulas:
        return TT
    out = formulas[-1]
    for g in reversed(formulas[:-1]):
        out = And(g, out)
    return out

###############################################################################
# Logic specifications
###############################################################################

ALIASES = {'S4': 'T4', 'S5': 'T45'}

_SPEC_ENTRY = re.compile(r'^\s*([a-z][a-zA-Z0-9_]*)\s*=\s*([A-Za-z0-9]+)\s*$')


def parse_logic_name(name):
    """'K4' -> {'4'}, 'S5' -> {'T', '4', '5'}."""
    name = ALIASES.get(name.upper(), name.upper())
    conds = set()
    for ch in name:
        if ch == 'K':
            continue
        if ch not in CONDITIONS:
            raise LogicSpecError("unknown frame condition %r in logic %r" % (ch, name))
        conds.add(ch)
    return frozenset(conds)


class LogicSpec(object):
    """Per-agent frame conditions; absent agents are K."""

    def __init__(self, conditions=None):
        self.table = {}
        for agent, conds in (conditions or {}).items():
            conds = frozenset(conds)
            bad = conds - set(CONDITIONS)
            if bad:
                raise LogicSpecError("unknown frame conditions %s" % sorted(bad))
            self.table[agent] = conds

    def conditions(self, agent):
        return self.table.get(agent, frozenset())

    def has(self, agent, x):
        return x in self.conditions(agent)

    @property
    def agents(self):
        return sorted(self.table)

    def with_conditions(self, agent, conds):
        table = dict(self.table)
        table[agent] = frozenset(conds)
        return LogicSpec(table)

    def uses(self, x):
        return any(x in c for c in self.table.values())

    def __eq__(self, other):
        if not isinstance(other, LogicSpec):
            return NotImplemented
        keys = set(self.table) | set(other.table)
        return all(self.conditions(k) == other.conditions(k) for k in keys)

    def __hash__(self):
        return hash(frozenset((k, v) for k, v in self.table.items() if v))

    def __str__(self):
        return format_logic(self)

    __repr__ = __str__


def parse_logic(text):
    """Parse 'a=K4;b=S5' into a LogicSpec."""
    table = {}
    for entry in re.split(r'[;,]', text or ''):
        if not entry.strip():
            continue
        m = _SPEC_ENTRY.match(entry)
        if not m:
            raise LogicSpecError("malformed logic entry %r" % entry.strip())
        agent, name = m.groups()
        table[agent] = table.get(agent, frozenset()) | parse_logic_name(name)
    return LogicSpec(table)


def format_logic(spec):
    parts = []
    for agent in spec.agents:
        conds = spec.conditions(agent)
        name = "".join(c for c in CONDITIONS if c in conds) or "K"
        if name[0].isdigit():
            name = "K" + name
        parts.append("%s=%s" % (agent, name))
    return ";".join(parts)
