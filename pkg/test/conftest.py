# Make nose-style `from test_helper import *` importable under pytest.
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
