#!/usr/bin/env python
#
# modalmu: command-line surface

'''Subcommands over formulas, models and logics.

Exit codes: 0 for success, true, SAT or FOUND; 1 for false, UNSAT or
NONE; 2 for UNKNOWN (and for any error of `mc`); 3 for usage and input
errors.
'''

import argparse
import logging
import os
import sys

from modal import __version__
from modal.formula import (FormulaError, ParseError, format_formula, parse,
                           parse_logic, size)
from modal.k4solver import K4Error, LOGICS, solve_k4
from modal.kripke import (ModelError, PointedModel, bisimilar, close_logic,
                          format_model, parse_model)
from modal.log import LEVELS, setLogLevel
from modal.modelcheck import UnassignedVariable, check
from modal.muencode import DEFAULT_GRAPH_CAP, EncodingError, encode, format_table
from modal.oracle import CORPUS_KINDS, check_corpus, sat_bounded
from modal.tableau import TableauConfig, TableauError, solve
from modal.translate import TranslationError, pipeline, remove_condition

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3
VERDICT_EXIT = {'SAT': EXIT_OK, 'UNSAT': EXIT_NO, 'UNKNOWN': EXIT_UNKNOWN,
                'FOUND': EXIT_OK, 'NONE': EXIT_NO}
ERRORS = (FormulaError, ModelError, TranslationError, TableauError, K4Error,
          EncodingError, UnassignedVariable, OSError, ValueError)


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """ArgumentParser raising instead of exiting, so usage maps to exit 3."""

    def error(self, message):
        raise UsageError(message)

    def exit(self, status=0, message=None):
        if message:
            self._print_message(message, sys.stderr)
        raise SystemExit(status)

###############################################################################
# Input helpers
###############################################################################

def read_text(arg, as_file=False, stdin=None):
    if arg == '-':
        return (stdin or sys.stdin).read()
    if as_file or (os.sep in arg and os.path.exists(arg)):
        with open(arg) as fh:
            return fh.read()
    return arg


def read_formula(args, stdin=None, allow_reserved=False):
    return parse(read_text(args.formula, args.file, stdin), allow_reserved=allow_reserved)


def read_model(path):
    with open(path) as fh:
        return parse_model(fh.read())


def write_model(path, pm):
    with open(path, 'w') as fh:
        fh.write("# point: %s\n" % pm.point)
        fh.write(format_model(pm.model))


def _agents(text):
    return [a.strip() for a in text.split(',') if a.strip()]

###############################################################################
# Commands
###############################################################################

def cmd_fmt(args, out, stdin):
    out.write(format_formula(read_formula(args, stdin, allow_reserved=True)) + "\n")
    return EXIT_OK


def cmd_mc(args, out, stdin):
    m = read_model(args.model)
    if args.state not in m.index:
        raise ModelError("unknown state %s" % args.state)
    f = read_formula(args, stdin, allow_reserved=True)
    ok = check(PointedModel(m, args.state), f)
    out.write("true\n" if ok else "false\n")
    return EXIT_OK if ok else EXIT_NO


def cmd_sat(args, out, stdin):
    f = read_formula(args, stdin)
    cfg = TableauConfig(kappa=args.kappa, max_prefix_len=args.max_prefix,
                        max_nodes=args.max_nodes, exact_bound=args.exact_bound)
    verdict = solve(f, parse_logic(args.logic), cfg)
    return _report(verdict, args, out)


def cmd_sat_k4(args, out, stdin):
    f = read_formula(args, stdin)
    verdict, stats = solve_k4(f, args.logic)
    logger.info("k4 search: %d steps, depth %d, %d signatures",
                stats.steps, stats.max_depth, len(stats.signatures))
    return _report(verdict, args, out)


def _report(verdict, args, out):
    out.write(verdict.name + "\n")
    if verdict.name == 'UNKNOWN':
        logger.warning("undecided: %s", verdict.bound_hit)
    if verdict.name == 'SAT' and args.emit_model:
        write_model(args.emit_model, verdict.witness)
    return VERDICT_EXIT[verdict.name]


def cmd_translate(args, out, stdin):
    f = read_formula(args, stdin)
    if args.remove:
        if args.source or args.target:
            raise UsageError("--remove cannot be combined with --from/--to")
        if not args.agents:
            raise UsageError("--remove needs --agents")
        g = remove_condition(f, _agents(args.agents), args.remove)
    elif args.source is not None and args.target is not None:
        g = pipeline(f, parse_logic(args.source), parse_logic(args.target))
    else:
        raise UsageError("give either --remove with --agents, or --from and --to")
    logger.info("translated size %d -> %d", size(f), size(g))
    out.write(format_formula(g) + "\n")
    return EXIT_OK


def cmd_encode(args, out, stdin):
    f = read_formula(args, stdin)
    g, enc = encode(f, parse_logic(args.logic), args.graph_cap)
    if args.emit_table:
        with open(args.emit_table, 'w') as fh:
            fh.write(format_table(enc))
    out.write(format_formula(g) + "\n")
    return EXIT_OK


def cmd_oracle(args, out, stdin):
    f = read_formula(args, stdin, allow_reserved=True)
    res = sat_bounded(f, parse_logic(args.logic), args.max_states)
    out.write("%s %d\n" % (res.name, res.n_states))
    if res.name == 'FOUND':
        out.write("# point: %s\n" % res.witness.point)
        out.write(format_model(res.witness.model))
    return VERDICT_EXIT[res.name]


def cmd_closure(args, out, stdin):
    m = close_logic(read_model(args.model), parse_logic(args.logic))
    out.write(format_model(m))
    return EXIT_OK


def cmd_bisim(args, out, stdin):
    m1, m2 = read_model(args.model1), read_model(args.model2)
    for m, s in ((m1, args.state1), (m2, args.state2)):
        if s not in m.index:
            raise ModelError("unknown state %s" % s)
    ok = bisimilar(PointedModel(m1, args.state1), PointedModel(m2, args.state2))
    out.write("true\n" if ok else "false\n")
    return EXIT_OK if ok else EXIT_NO


def cmd_corpus(args, out, stdin):
    cases = check_corpus(args.check, args.seed, args.count, args.depth)
    for case in cases:
        out.write(case.line() + "\n")
    bad = [c for c in cases if not c.ok]
    out.write("%d cases, %d contradictions\n" % (len(cases), len(bad)))
    return EXIT_NO if bad else EXIT_OK

###############################################################################
# Argument parsing
###############################################################################

def _formula_arg(p):
    p.add_argument('formula', help="formula text, a file, or - for stdin")
    p.add_argument('--file', action='store_true', dest='file',
                   help="read the formula argument as a path")


def build_parser():
    parser = Parser(prog='mucalc', description="multi-agent modal mu-calculus tools")
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('--verbosity', '-v', choices=sorted(LEVELS), default=None,
                        help="log level")
    sub = parser.add_subparsers(dest='command', parser_class=Parser)

    p = sub.add_parser('fmt', help="print a formula canonically")
    _formula_arg(p)
    p.set_defaults(run=cmd_fmt)

    p = sub.add_parser('mc', help="model check a formula at a state")
    p.add_argument('model')
    p.add_argument('state')
    _formula_arg(p)
    p.set_defaults(run=cmd_mc)

    p = sub.add_parser('sat', help="tableau satisfiability")
    _formula_arg(p)
    p.add_argument('--logic', default='')
    p.add_argument('--kappa', type=int, default=TableauConfig.kappa)
    p.add_argument('--max-prefix', type=int, default=TableauConfig.max_prefix_len,
                   dest='max_prefix')
    p.add_argument('--max-nodes', type=int, default=TableauConfig.max_nodes,
                   dest='max_nodes')
    p.add_argument('--exact-bound', action='store_true', dest='exact_bound')
    p.add_argument('--emit-model', dest='emit_model')
    p.set_defaults(run=cmd_sat)

    p = sub.add_parser('sat-k4', help="K4, D4 or S4 satisfiability")
    _formula_arg(p)
    p.add_argument('--logic', choices=LOGICS, default='K4')
    p.add_argument('--emit-model', dest='emit_model')
    p.set_defaults(run=cmd_sat_k4)

    p = sub.add_parser('translate', help="remove frame conditions")
    _formula_arg(p)
    p.add_argument('--agents')
    p.add_argument('--remove', choices=('D', 'T', 'B', '4', '5'))
    p.add_argument('--from', dest='source')
    p.add_argument('--to', dest='target')
    p.set_defaults(run=cmd_translate)

    p = sub.add_parser('encode', help="encode tableau branches as a K formula")
    _formula_arg(p)
    p.add_argument('--logic', default='')
    p.add_argument('--graph-cap', type=int, default=DEFAULT_GRAPH_CAP, dest='graph_cap')
    p.add_argument('--emit-table', dest='emit_table')
    p.set_defaults(run=cmd_encode)

    p = sub.add_parser('oracle', help="bounded brute-force satisfiability")
    _formula_arg(p)
    p.add_argument('--logic', default='')
    p.add_argument('--max-states', type=int, default=3, dest='max_states')
    p.set_defaults(run=cmd_oracle)

    p = sub.add_parser('closure', help="close a model under frame conditions")
    p.add_argument('model')
    p.add_argument('--logic', required=True)
    p.set_defaults(run=cmd_closure)

    p = sub.add_parser('bisim', help="bisimilarity of two pointed models")
    p.add_argument('model1')
    p.add_argument('state1')
    p.add_argument('model2')
    p.add_argument('state2')
    p.set_defaults(run=cmd_bisim)

    p = sub.add_parser('corpus', help="seeded differential checks")
    p.add_argument('--seed', type=int, required=True)
    p.add_argument('--count', type=int, default=20)
    p.add_argument('--depth', type=int, default=2)
    p.add_argument('--check', choices=CORPUS_KINDS, required=True)
    p.set_defaults(run=cmd_corpus)
    return parser


def main(argv=None, out=None, err=None, stdin=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        err.write("usage error: %s\n" % e)
        return EXIT_USAGE
    except SystemExit as e:
        return e.code or EXIT_OK
    if not getattr(args, 'command', None):
        err.write(parser.format_usage())
        return EXIT_USAGE
    if args.verbosity:
        setLogLevel(args.verbosity)
    failure = EXIT_UNKNOWN if args.command == 'mc' else EXIT_USAGE
    try:
        return args.run(args, out, stdin)
    except UsageError as e:
        err.write("usage error: %s\n" % e)
        return failure
    except ParseError as e:
        err.write("error: %s\n" % e)
        return failure
    except ERRORS as e:
        err.write("error: %s\n" % e)
        return failure


if __name__ == '__main__':
    sys.exit(main())
