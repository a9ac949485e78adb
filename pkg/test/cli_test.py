#!/usr/bin/env python
#
# Tests for the mucalc command line

import io
import os
import shutil
import sys
import tempfile
import unittest

from test_helper import *

if __name__ == '__main__':
    # set up include path for direct test invocation during development
    sys.path.append(os.path.dirname(__file__) + "/..")

from modal.cli import main
from modal.kripke import parse_model
from modal.translate import translate_onestep

MODEL = """states: s0 s1
rel a: s0 s1
val p: s1
"""


class TestCli(unittest.TestCase):
    """Unittests for subcommands and exit codes"""

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.model = os.path.join(self.tmp, "chain.txt")
        with open(self.model, 'w') as fh:
            fh.write(MODEL)

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def run_cli(self, *argv, **kw):
        out, err = io.StringIO(), io.StringIO()
        rc = main(list(argv), out, err, kw.get('stdin'))
        return rc, out.getvalue(), err.getvalue()

    def test_fmt(self):
        """Assert that fmt prints the canonical form"""
        rc, out, _ = self.run_cli('fmt', 'mu X.[a]X')
        self.assertEqual((rc, out), (0, "mu X. [a] X\n"))

    def test_fmt_stdin(self):
        rc, out, _ = self.run_cli('fmt', '-', stdin=io.StringIO("p&q"))
        self.assertEqual((rc, out), (0, "p & q\n"))

    def test_formula_from_file(self):
        path = os.path.join(self.tmp, "f.mu")
        with open(path, 'w') as fh:
            fh.write("<a> p\n")
        rc, out, _ = self.run_cli('fmt', path)
        self.assertEqual(out, "<a> p\n")

    def test_sat_verdicts(self):
        """Ensure that sat exits 0 on SAT and 1 on UNSAT"""
        rc, out, _ = self.run_cli('sat', PHI1)
        self.assertEqual((rc, out), (0, "SAT\n"))
        rc, out, _ = self.run_cli('sat', PHI2, '--logic', 'b=K5', '--kappa', '2')
        self.assertEqual((rc, out), (1, "UNSAT\n"))

    def test_sat_unknown(self):
        rc, out, _ = self.run_cli('sat', PHI1, '--max-nodes', '1')
        self.assertEqual((rc, out), (2, "UNKNOWN\n"))

    def test_sat_emit_model(self):
        path = os.path.join(self.tmp, "witness.txt")
        rc, _, _ = self.run_cli('sat', PHI1, '--emit-model', path)
        self.assertEqual(rc, 0)
        with open(path) as fh:
            text = fh.read()
        self.assertTrue(text.startswith("# point: s0\n"))
        self.assertEqual(len(parse_model(text)), 2)

    def test_sat_k4(self):
        rc, out, _ = self.run_cli('sat-k4', FIX, '--logic', 'S4')
        self.assertEqual((rc, out), (1, "UNSAT\n"))
        rc, out, _ = self.run_cli('sat-k4', FIX)
        self.assertEqual((rc, out), (0, "SAT\n"))

    def test_parse_error(self):
        """Assert that a malformed formula is a usage error"""
        rc, out, err = self.run_cli('sat', 'p & & q')
        self.assertEqual(rc, 3)
        self.assertTrue(err.startswith("error: "))

    def test_usage_errors(self):
        self.assertEqual(self.run_cli()[0], 3)
        rc, _, err = self.run_cli('sat', PHI1, '--bogus')
        self.assertEqual(rc, 3)
        self.assertTrue(err.startswith("usage error: "))
        self.assertEqual(self.run_cli('sat', 'p', '--kappa', '0')[0], 3)

    def test_mc(self):
        """Ensure that mc prints true or false and errors exit 2"""
        self.assertEqual(self.run_cli('mc', self.model, 's0', '<a>p')[:2], (0, "true\n"))
        self.assertEqual(self.run_cli('mc', self.model, 's0', '[a]~p')[:2], (1, "false\n"))
        self.assertEqual(self.run_cli('mc', self.model, 's9', 'p')[0], 2)
        self.assertEqual(self.run_cli('mc', self.model, 's0', '<a>X')[0], 2)
        self.assertEqual(self.run_cli('mc', os.path.join(self.tmp, "missing"), 's0', 'p')[0], 2)

    def test_translate(self):
        rc, out, _ = self.run_cli('translate', '[a]p', '--remove', 'T', '--agents', 'a')
        self.assertEqual(rc, 0)
        self.assertEqual(parse(out), translate_onestep(parse("[a]p"), ["a"], "T"))
        self.assertEqual(self.run_cli('translate', '[a]p', '--remove', 'T')[0], 3)
        self.assertEqual(self.run_cli('translate', '[a]p')[0], 3)

    def test_translate_unsupported(self):
        rc, _, err = self.run_cli('translate', FIX, '--from', 'a=S5', '--to', '')
        self.assertEqual(rc, 3)
        self.assertIn("5", err)

    def test_encode(self):
        path = os.path.join(self.tmp, "table.txt")
        rc, out, _ = self.run_cli('encode', 'p', '--emit-table', path)
        self.assertEqual(rc, 0)
        self.assertIn("g_", out)
        with open(path) as fh:
            self.assertEqual(len(fh.read().splitlines()), 2)

    def test_encode_cap(self):
        rc, _, err = self.run_cli('encode', '[a]p & <a>(q | p)')
        self.assertEqual(rc, 3)
        self.assertIn("graph cap", err)

    def test_oracle(self):
        rc, out, _ = self.run_cli('oracle', FIX, '--logic', 'a=T', '--max-states', '2')
        self.assertEqual((rc, out), (1, "NONE 2\n"))
        rc, out, _ = self.run_cli('oracle', '<a>p')
        self.assertEqual(rc, 0)
        self.assertTrue(out.startswith("FOUND 1\n# point: s0\n"))
        path = os.path.join(self.tmp, "found.txt")
        with open(path, 'w') as fh:
            fh.write(out.split("\n", 1)[1])
        self.assertEqual(self.run_cli('mc', path, 's0', '<a>p')[:2], (0, "true\n"))

    def test_closure(self):
        rc, out, _ = self.run_cli('closure', self.model, '--logic', 'a=T')
        self.assertEqual(rc, 0)
        rel = parse_model(out).relation('a')
        self.assertEqual(rel, frozenset([('s0', 's1'), ('s0', 's0'), ('s1', 's1')]))

    def test_bisim(self):
        self.assertEqual(self.run_cli('bisim', self.model, 's1', self.model, 's1')[:2],
                         (0, "true\n"))
        self.assertEqual(self.run_cli('bisim', self.model, 's0', self.model, 's1')[:2],
                         (1, "false\n"))

    def test_corpus(self):
        rc, out, _ = self.run_cli('corpus', '--seed', '0', '--count', '2',
                                  '--depth', '1', '--check', 'tableau')
        lines = out.splitlines()
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[-1].startswith("2 cases, "))
        self.assertEqual(rc, 0 if lines[-1].endswith(" 0 contradictions") else 1)


if __name__ == '__main__':
    unittest.main()
