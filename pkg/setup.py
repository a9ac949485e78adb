#!/usr/bin/env python
# setup.cfg doubles as the logging.config.fileConfig file for mucalc.py and
# runexp.py; its %(...)s format strings break setuptools' config parsing, so
# the packaging metadata (mirrored from setup.cfg) lives here instead.

from setuptools import setup
from setuptools.dist import Distribution


class NoCfgDistribution(Distribution):
    def find_config_files(self):
        return [f for f in super().find_config_files()
                if not f.endswith('setup.cfg')]


setup(
    name='modalmu',
    version='0.1.0',
    description='Multi-agent modal mu-calculus: model checking, tableaux, translations',
    packages=['modal'],
    install_requires=['networkx', 'lark', 'hypothesis', 'nose'],
    distclass=NoCfgDistribution,
)
