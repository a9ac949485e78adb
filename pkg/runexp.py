#!/usr/bin/env python
#
# Run the reproducible experiments and dump one JSON log each under logs/

import argparse
import json
import logging
import logging.config
import os
import sys

from modal.formula import LogicSpec, parse, parse_logic, size
from modal.k4solver import small_model_bound, solve_k4
from modal.kripke import preservation_sweep
from modal.modelcheck import check
from modal.muencode import GraphCapExceeded, branch_to_model, encode
from modal.oracle import check_corpus, sat_bounded
from modal.tableau import TableauConfig, solve

parser = argparse.ArgumentParser()
parser.add_argument('--experiments', '-e',
                    help="experiments to run",
                    action="store",
                    nargs='+',
                    default=['tableaux', 'fixpoint', 'preservation', 'translations',
                             'k4', 'encoding'],
                    dest="experiments")
parser.add_argument('--seed', '-s',
                    help="seed for sampled frames and formula corpora",
                    action="store",
                    type=int,
                    default=0,
                    dest="seed")
parser.add_argument('--count', '-c',
                    help="corpus size per check",
                    action="store",
                    type=int,
                    default=100,
                    dest="count")
parser.add_argument('--samples', '-n',
                    help="random frames per preservation pair",
                    action="store",
                    type=int,
                    default=200,
                    dest="samples")
parser.add_argument('--graph-cap', '-g',
                    help="largest |sub(f)| handed to the encoder",
                    action="store",
                    type=int,
                    default=5,
                    dest="graph_cap")
args = parser.parse_args()

logging.config.fileConfig('setup.cfg', disable_existing_loggers=False)
logger = logging.getLogger(__name__)

PHI1 = "(p & <a>p) & mu X.(~p | [a]X)"
PHI2 = "<b>p & mu X.([b]~p | [b]X)"
FIX = "mu X.[a]X"
TINY = ["tt", "p", "p & ~p", "<a>p", "[a]p & <a>q", FIX]


def dump(name, result):
    if not os.path.isdir('logs'):
        os.makedirs('logs')
    with open(os.path.join('logs', name + '.json'), 'w') as fh:
        fh.write(json.dumps(result, sort_keys=True, indent=4))
        fh.write("\n")
    logger.info("wrote logs/%s.json", name)


def tableaux():
    """The two worked tableaux: an open branch for PHI1, closure for PHI2."""
    out = {}
    for name, text, logic, kappa in (('phi1', PHI1, 'a=K', 3), ('phi2', PHI2, 'b=K5', 2)):
        verdict = solve(parse(text), parse_logic(logic), TableauConfig(kappa=kappa))
        out[name] = {'formula': text, 'logic': logic, 'kappa': kappa,
                     'verdict': verdict.name}
        if verdict.name == 'SAT':
            out[name]['witness_states'] = len(verdict.witness.model)
            out[name]['branch'] = verdict.branch.render().splitlines()
    return out


def fixpoint():
    """mu X.[a]X: satisfiable over K, not over reflexive frames."""
    f = parse(FIX)
    out = {}
    for logic in ('a=K', 'a=T', 'a=S4'):
        spec = parse_logic(logic)
        out[logic] = {'tableau': solve(f, spec).name,
                      'oracle': sat_bounded(f, spec, 3).name}
    for logic in ('K4', 'S4'):
        out['k4:' + logic] = solve_k4(f, logic)[0].name
    return out


def preservation():
    matrix, witnesses = preservation_sweep(args.samples, 5, args.seed)
    return {'preserved': sorted("%s->%s" % k for k, v in matrix.items() if v),
            'lost': dict(("%s->%s" % k, sorted("%s %s" % p for p in rel))
                         for k, (states, rel) in witnesses.items())}


def corpus_summary(kind):
    cases = check_corpus(kind, args.seed, args.count)
    return {'cases': len(cases),
            'contradictions': [c.line() for c in cases if not c.ok]}


def k4():
    """Verdicts plus the small-model check for tiny satisfiable formulas."""
    out = corpus_summary('k4')
    violations = []
    for case in check_corpus('k4', args.seed, args.count, depth=1):
        f = case.formula
        if size(f) > 3:
            continue
        found = sat_bounded(f, LogicSpec({'a': {'4'}}), 4)
        if found.name == 'FOUND' and found.n_states > small_model_bound(f):
            violations.append(str(f))
    out['small_model_violations'] = violations
    return out


def encoding():
    """Encoding size and agreement with f's verdict on the tiny suite."""
    out = {}
    for text in TINY:
        f = parse(text)
        for logic in ('a=K', 'a=T', 'a=D'):
            spec = parse_logic(logic)
            key = "%s @ %s" % (text, logic)
            try:
                g, enc = encode(f, spec, args.graph_cap)
            except GraphCapExceeded as e:
                out[key] = {'skipped': str(e)}
                continue
            verdict = solve(f, spec)
            satisfiable = sat_bounded(f, spec, 3).name == 'FOUND'
            if len(enc.sub) <= 3:
                encoded = sat_bounded(g, LogicSpec(), 3, exclusive=enc.graph_names()).name == 'FOUND'
            else:
                # the open branch as witness
                encoded = verdict.name == 'SAT' and check(branch_to_model(verdict.branch, enc), g)
            out[key] = {'size_f': size(f), 'size_encoding': size(g),
                        'graphs': len(enc.graphs()), 'agents': len(enc.agents),
                        'tableau': verdict.name, 'oracle': satisfiable,
                        'encoding_oracle': encoded, 'agrees': encoded == satisfiable}
    return out



EXPERIMENTS = {'tableaux': tableaux, 'fixpoint': fixpoint, 'preservation': preservation,
               'translations': lambda: corpus_summary('translations'), 'k4': k4,
               'encoding': encoding}


def main():
    print("Seed = %d" % args.seed)
    print("Experiments = %s\n" % " ".join(args.experiments))
    for name in args.experiments:
        if name not in EXPERIMENTS:
            logger.error("unknown experiment %s", name)
            return 3
        logger.info("starting %s", name)
        dump(name, EXPERIMENTS[name]())
        logger.info("ending %s", name)
    return 0


if __name__ == '__main__':
    sys.exit(main())
