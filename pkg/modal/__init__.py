'''Multi-agent modal mu-calculus over restricted Kripke frames.'''

__version__ = '0.1.0'
