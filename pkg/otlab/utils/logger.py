# -*- coding: utf-8 -*-

"""
otlab.utils.logger
###############################
"""

import logging
import os
import re

import colorlog
from colorama import init

from otlab.utils.utils import get_local_time, ensure_dir

log_colors_config = {
    'DEBUG': 'cyan',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'red',
}

_ANSI_ESCAPE = re.compile(r'\x1B(?:[@-Z\\-_]|\[[0-?]*[ -/]*[@-~])')


class RemoveColorFilter(logging.Filter):

    def filter(self, record):
        if record:
            record.msg = _ANSI_ESCAPE.sub('', str(record.msg))
        return True


def set_color(log, color, highlight=True):
    color_set = ['black', 'red', 'green', 'yellow', 'blue', 'pink', 'cyan', 'white']
    try:
        index = color_set.index(color)
    except ValueError:
        index = len(color_set) - 1
    prev_log = '\033['
    if highlight:
        prev_log += '1;3'
    else:
        prev_log += '0;3'
    prev_log += str(index) + 'm'
    return prev_log + log + '\033[0m'


def _level_of(state):
    levels = {
        'debug': logging.DEBUG,
        'info': logging.INFO,
        'warning': logging.WARNING,
        'error': logging.ERROR,
        'critical': logging.CRITICAL,
    }
    if state is None:
        return logging.INFO
    return levels.get(str(state).lower(), logging.INFO)


def init_logger(config, enable_fh=True, logfilename=None):
    """
    A logger that shows messages on standard output and writes them into
    ``<out_dir>/log/<family>/<logfilename>`` simultaneously.

    Args:
        config (Config): An instance object of Config, used to record parameter information.
        enable_fh (bool): whether to attach the file handler.
        logfilename (str, optional): name of the log file, defaults to ``<family>-<time>.log``.

    Example:
        >>> logger = logging.getLogger(__name__)
        >>> logger.info(set_color('E_R', 'blue') + f': {0.01}')
    """
    init(autoreset=True)
    level = _level_of(config['state'])

    sfmt = "%(log_color)s%(asctime)-15s %(levelname)s  %(message)s"
    sdatefmt = "%d %b %H:%M"
    sformatter = colorlog.ColoredFormatter(sfmt, sdatefmt, log_colors=log_colors_config)
    sh = logging.StreamHandler()
    sh.setLevel(level)
    sh.setFormatter(sformatter)
    handlers = [sh]

    if enable_fh:
        out_dir = config['out_dir'] or './output'
        family_dir = os.path.join(out_dir, 'log', str(config['family']))
        ensure_dir(family_dir)
        if logfilename is None:
            logfilename = '{}-{}.log'.format(config['family'], get_local_time())
        filefmt = "%(asctime)-15s %(levelname)s  %(message)s"
        filedatefmt = "%a %d %b %Y %H:%M:%S"
        fh = logging.FileHandler(os.path.join(family_dir, logfilename))
        fh.setLevel(level)
        fh.setFormatter(logging.Formatter(filefmt, filedatefmt))
        fh.addFilter(RemoveColorFilter())
        handlers.append(fh)

    logging.basicConfig(level=level, handlers=handlers, force=True)
