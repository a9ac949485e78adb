#!/usr/bin/env python
#
# modalmu: logging utility

'''Logging utility for the solver and its command-line tools.

Modules log through `logging.getLogger(__name__)`; the tools configure
handlers from setup.cfg, or fall back to this package-wide logger.
'''

import logging
from logging import Logger

LEVELS = {'debug': logging.DEBUG,
          'info': logging.INFO,
          'warning': logging.WARNING,
          'error': logging.ERROR,
          'critical': logging.CRITICAL}

LOGLEVELDEFAULT = logging.WARNING

LOGMSGFORMAT = '%(name)s: %(message)s'


class StreamHandlerNoNewline(logging.StreamHandler):
    """StreamHandler that adds a newline unless the record is partial.

    Corpus progress counters are partial and end in a carriage return."""

    def emit(self, record):
        try:
            msg = self.format(record)
            if not msg.endswith('\n') and not getattr(record, 'partial', False):
                msg += '\n'
            self.stream.write(msg)
            self.flush()
        except (KeyboardInterrupt, SystemExit):
            raise
        except Exception:
            self.handleError(record)


class Singleton(type):
    """Metaclass allowing a single instance per class."""

    def __init__(mcs, name, bases, dict_):
        super(Singleton, mcs).__init__(name, bases, dict_)
        mcs.instance = None

    def __call__(mcs, *args, **kw):
        if mcs.instance is None:
            mcs.instance = super(Singleton, mcs).__call__(*args, **kw)
        return mcs.instance


class ModalLogger(Logger, metaclass=Singleton):
    """Package logger named 'modal', parent of every module logger."""

    def __init__(self):
        Logger.__init__(self, "modal")
        ch = StreamHandlerNoNewline()
        ch.setFormatter(logging.Formatter(LOGMSGFORMAT))
        self.addHandler(ch)
        self.setLogLevel()

    def setLogLevel(self, levelname=None):
        """Set the level from a lowercase name in LEVELS."""
        level = LOGLEVELDEFAULT
        if levelname is not None:
            if levelname not in LEVELS:
                raise ValueError('unknown level name %r' % (levelname,))
            level = LEVELS[levelname]
        self.setLevel(level)
        self.handlers[0].setLevel(level)


lg = ModalLogger()
# module loggers under "modal." report through lg
logging.getLogger('modal').handlers = lg.handlers
logging.getLogger('modal').setLevel(lg.level)


def setLogLevel(levelname=None):
    lg.setLogLevel(levelname)
    logging.getLogger('modal').setLevel(lg.level)
