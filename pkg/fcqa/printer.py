from __future__ import absolute_import
import argparse
import json
import sys
from fcqa.utils import _u

COLOR_NAMES = set(('default', 'black', 'red', 'green', 'yellow', 'blue',
                   'magenta', 'cyan', 'white', 'brightblack', 'brightred',
                   'brightgreen', 'brightyellow', 'brightblue',
                   'brightmagenta', 'brightcyan', 'brightwhite'))


def valid_color_name(value):
    if value not in COLOR_NAMES:
        raise argparse.ArgumentTypeError("%s is not a valid color" % value)
    return value


class Printer(object):
    """Provide methods for terminal output with color (or not)"""

    def __init__(self, use_color=True, debug=False, color_true="brightgreen",
                 color_false="brightyellow",
                 stdout=sys.stdout, stderr=sys.stderr):
        self.use_color = use_color
        self.debug = debug
        self.answer_colors = {True: color_true, False: color_false}
        self.colors = {
                'default': '\033[0m',
                'black': '\033[0;30m',
                'brightblack': '\033[30;1m',
                'red': '\033[0;31m',
                'brightred': '\033[31;1m',
                'green': '\033[0;32m',
                'brightgreen': '\033[32;1m',
                'yellow': '\033[0;33m',
                'brightyellow': '\033[33;1m',
                'blue': '\033[0;34m',
                'brightblue': '\033[34;1m',
                'magenta': '\033[0;35m',
                'brightmagenta': '\033[35;1m',
                'cyan': '\033[0;36m',
                'brightcyan': '\033[36;1m',
                'white': '\033[0;37m',
                'brightwhite': '\033[37;1m',
                None: '\033[0m'}

        self.stdout = stdout
        self.stderr = stderr

    def get_colorcode(self, colorname):
        return self.colors.get(colorname, '')

    def msg(self, msg, colorname='default', file=None):
        file = file or self.stdout
        if self.use_color:
            msg = self.get_colorcode(colorname) + msg + self.colors['default']
        file.write(_u(msg))

    def err_msg(self, msg):
        self.msg(msg, 'brightred', file=self.stderr)

    def debug_msg(self, msg):
        if self.debug:
            self.msg(msg, 'yellow', file=self.stderr)

    def answer_msg(self, answer):
        self.msg("%s\n" % ("true" if answer else "false"),
                 self.answer_colors[bool(answer)])

    def json_msg(self, report):
        """Machine output is never colored"""
        self.stdout.write(json.dumps(report, sort_keys=True, indent=2) + '\n')
