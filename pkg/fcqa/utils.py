import itertools
import locale
import os
import random
import re
import six

SEED_ENV = 'FCQA_SEED'


def _u(text):
    encoding = locale.getlocale()[1] or \
            locale.getpreferredencoding(False) or "UTF-8"
    if issubclass(type(text), six.text_type):
        return text
    if not issubclass(type(text), six.string_types):
        if six.PY3:
            if isinstance(text, bytes):
                return six.text_type(text, encoding, 'replace')
            else:
                return six.text_type(text)
        elif hasattr(text, '__unicode__'):
            return six.text_type(text)
        else:
            return six.text_type(bytes(text), encoding, 'replace')
    else:
        return text.decode(encoding, 'replace')


def resolve_seed(seed=0, environ=None):
    """FCQA_SEED, when set, wins over the command line seed"""
    environ = os.environ if environ is None else environ
    value = environ.get(SEED_ENV)
    if value is None or value == '':
        return seed
    try:
        return int(value)
    except ValueError:
        raise ValueError('%s must be an integer, got %r' % (SEED_ENV, value))


def make_rng(seed, *salt):
    """Independent, reproducible stream for one randomized stage"""
    return random.Random('%s/%s' % (seed, '/'.join(str(s) for s in salt)))


class FreshNames(object):
    """Supply of element names with a reserved prefix.

    Names already in `taken` are skipped so that fresh elements never
    collide with existing ones.
    """

    def __init__(self, prefix, taken=()):
        self.prefix = prefix
        self.taken = set(taken)
        self.counter = itertools.count(1)

    def __call__(self):
        while True:
            name = '%s%d' % (self.prefix, next(self.counter))
            if name not in self.taken:
                self.taken.add(name)
                return name


def natural_key(text):
    return [int(c) if c.isdigit() else c for c in re.split(r'(\d+)', text)]
