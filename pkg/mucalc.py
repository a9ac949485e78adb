#!/usr/bin/env python
#
# modalmu command-line entry point

import logging
import logging.config
import os
import sys

from modal.cli import main

logging.config.fileConfig(os.path.join(os.path.dirname(os.path.abspath(__file__)), 'setup.cfg'),
                          disable_existing_loggers=False)
# setup.cfg handlers replace the package default
logging.getLogger('modal').handlers = []

if __name__ == '__main__':
    sys.exit(main())
