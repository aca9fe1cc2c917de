"""Balanced pssinstances and their piecewise realizations.

A pssinstance adds helper elements to an instance, each assigned to a class
of positions related by UIDs in both directions. It is balanced when
positions determining each other want the same number of elements, which
is what lets a realization pair those elements into tuples.
"""
from collections import OrderedDict

from fcqa.builder.partition import fun_classes, id_classes, inner_positions
from fcqa.errors import UsageError
from fcqa.model import project, project_position
from fcqa.utils import FreshNames, natural_key

HELPER_PREFIX = '~h'


def appelem(instance, position, uids):
    """Elements that some UID of uids wants at the position"""
    wanted = set()
    for uid in uids:
        if uid.target == position:
            wanted |= project_position(instance, uid.source)
    return wanted - project_position(instance, position)


def ufd_violations(instance, fds):
    """Pairs of facts violating a unary FD"""
    found = []
    for fd in sorted(f for f in fds if f.is_unary):
        seen = {}
        for fact in instance.by_relation(fd.relation):
            key = fact.at(fd.source.index)
            other = seen.setdefault(key, fact)
            if other.at(fd.rhs) != fact.at(fd.rhs):
                found.append((fd, other, fact))
    return found


class PSSInstance(object):
    """Instance with helpers, lam maps each helper to its UID class"""

    def __init__(self, base, uids, helpers=(), lam=None):
        self.base = base
        self.uids = frozenset(uids)
        self.helpers = tuple(helpers)
        self.lam = dict(lam or {})
        overlap = set(self.helpers) & base.domain
        if overlap:
            raise UsageError('helpers %s already occur in the instance'
                             % ', '.join(sorted(overlap)))

    def __repr__(self):
        return 'PSSInstance(%d facts, %d helpers)' % (len(self.base),
                                                      len(self.helpers))

    def appelem(self, position):
        wanted = appelem(self.base, position, self.uids)
        return wanted | {h for h in self.helpers if position in self.lam[h]}

    def helpers_of(self, id_class):
        return [h for h in self.helpers if self.lam[h] == id_class]


def occupancy(instance, id_class, uids):
    """Elements occurring or wanted at the positions of the class"""
    found = set()
    for position in id_class:
        found |= project_position(instance, position)
        found |= appelem(instance, position, uids)
    return found


def balance(instance, uids, fds, fresh=None):
    """Balanced pssinstance: every UID class ends up with the same number
    of wanted or present elements"""
    if ufd_violations(instance, fds):
        raise UsageError('the instance violates %s'
                         % (ufd_violations(instance, fds)[0][0],))
    fresh = fresh or FreshNames(HELPER_PREFIX, instance.domain)
    classes = id_classes(uids)
    sizes = OrderedDict((c, len(occupancy(instance, c, uids)))
                        for c in classes)
    target = max(sizes.values(), default=0)
    helpers, lam = [], {}
    for id_class, size in sizes.items():
        for _ in range(target - size):
            h = fresh()
            helpers.append(h)
            lam[h] = id_class
    return PSSInstance(instance, uids, helpers, lam)


def realized_classes(uids, fds, schema):
    """Classes of mutually determining positions, each cut down to the
    positions occurring in the UIDs; classes without such positions are
    dropped"""
    inner = inner_positions(uids)
    found = []
    for block in fun_classes(fds, schema):
        kept = tuple(sorted(p for p in block if p in inner))
        if kept:
            found.append(kept)
    return found


def is_balanced(pss, fds, schema):
    return all(len({len(pss.appelem(p)) for p in block}) == 1
               for block in realized_classes(pss.uids, fds, schema))


class PiecewiseRealization(object):
    """One set of tuples per class of mutually determining positions.

    Tuples list the values in the order of `classes[i]`.
    """

    def __init__(self, classes, blocks, base_tuples):
        self.classes = [tuple(c) for c in classes]
        self.blocks = [set(b) for b in blocks]
        self.base_tuples = [set(b) for b in base_tuples]
        self._class_of = {p: i for i, c in enumerate(self.classes)
                          for p in c}
        self._index = {}
        for i, (block, positions) in enumerate(zip(self.blocks,
                                                   self.classes)):
            for t in block:
                for j, position in enumerate(positions):
                    self._index.setdefault((position, t[j]), []).append(
                        (i, t))

    def __repr__(self):
        return 'PiecewiseRealization(%s)' % ', '.join(
            '%s: %d' % ('/'.join(str(p) for p in c), len(b))
            for c, b in zip(self.classes, self.blocks))

    def class_of(self, position):
        """Index of the class containing the position, None if outside"""
        return self._class_of.get(position)

    def tuple_for(self, position, element):
        """The unique tuple with the element at the position"""
        found = self._index.get((position, element), [])
        if len(found) != 1:
            return None
        return found[0][1]

    def project(self, position):
        i = self._class_of[position]
        j = self.classes[i].index(position)
        return {t[j] for t in self.blocks[i]}

    def ufd_problems(self):
        problems = []
        for positions, block in zip(self.classes, self.blocks):
            for j, position in enumerate(positions):
                values = [t[j] for t in block]
                if len(values) != len(set(values)):
                    problems.append(position)
        return problems

    def uid_problems(self, uids):
        return sorted(u for u in uids
                      if u.source in self._class_of and
                      u.target in self._class_of and
                      not self.project(u.source) <= self.project(u.target))

    def is_compliant(self, uids):
        return not self.ufd_problems() and not self.uid_problems(uids)


def piecewise_realization(pss, fds, schema, rng):
    """Realization pairing wanted elements through seeded bijections"""
    classes = realized_classes(pss.uids, fds, schema)
    blocks, base_tuples = [], []
    for positions in classes:
        existing = project(pss.base, positions)
        columns = []
        for position in positions:
            wanted = sorted(pss.appelem(position), key=natural_key)
            rng.shuffle(wanted)
            columns.append(wanted)
        if len({len(c) for c in columns}) > 1:
            raise UsageError('the pssinstance is not balanced on %s'
                             % ', '.join(str(p) for p in positions))
        fresh = set(zip(*columns)) if columns else set()
        base_tuples.append(existing)
        blocks.append(existing | fresh)
    return PiecewiseRealization(classes, blocks, base_tuples)
