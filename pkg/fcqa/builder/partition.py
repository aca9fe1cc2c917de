"""Position equivalences and manageable partitions.

A manageable partition orders the UIDs SCC by SCC of the constraint graph:
the UIDs inside an SCC form a reversible main class, and each UID leaving
the SCC is a trivial singleton class.
"""
from collections import namedtuple

import networkx as nx

from fcqa.closure import fd_attribute_closure, uid_transitive_closure
from fcqa.errors import UsageError
from fcqa.graph import ConstraintGraph

REVERSIBLE = 'reversible'
TRIVIAL = 'trivial'

PartitionClass = namedtuple('PartitionClass', ['kind', 'uids', 'component'])


def inner_positions(uids):
    return {p for uid in uids for p in (uid.source, uid.target)}


def exported_positions(uids):
    return sorted({uid.target for uid in uids})


def id_classes(uids):
    """Classes of positions related by UIDs in both directions"""
    graph = nx.DiGraph()
    graph.add_nodes_from(inner_positions(uids))
    closed = uid_transitive_closure(uids)
    graph.add_edges_from((u.source, u.target) for u in closed)
    return sorted((frozenset(c) for c in
                   nx.strongly_connected_components(graph)), key=min)


def fun_classes(fds, schema, positions=None):
    """Classes of positions of one relation determining each other"""
    positions = schema.positions() if positions is None else positions
    classes = []
    seen = set()
    for p in sorted(positions):
        if p in seen:
            continue
        forward = fd_attribute_closure(fds, p.relation, [p.index])
        block = {p}
        for q in sorted(positions):
            if (q.relation == p.relation and q != p and
                    q.index in forward and
                    p.index in fd_attribute_closure(fds, q.relation,
                                                    [q.index])):
                block.add(q)
        seen |= block
        classes.append(frozenset(block))
    return classes


def fun_class_of(position, fds, schema):
    forward = fd_attribute_closure(fds, position.relation, [position.index])
    return frozenset(
        q for q in schema.positions(position.relation)
        if q == position or (
            q.index in forward and position.index in fd_attribute_closure(
                fds, q.relation, [q.index])))


def follows(first, second, fds):
    """first >-> second: second starts in the relation first exports to,
    at another position that determines the exported one"""
    target = first.target
    return (second.source.relation == target.relation and
            second.source != target and
            target.index in fd_attribute_closure(fds, target.relation,
                                                 [second.source.index]))


def is_reversible(uids, fds):
    uids = frozenset(uids)
    if uid_transitive_closure(uids) != uids:
        return False
    if any(uid.reverse() not in uids for uid in uids):
        return False
    inner = inner_positions(uids)
    for p in inner:
        determined = fd_attribute_closure(fds, p.relation, [p.index])
        for q in inner:
            if q.relation != p.relation or q == p:
                continue
            if q.index in determined and p.index not in fd_attribute_closure(
                    fds, q.relation, [q.index]):
                return False
    return True


class ManageablePartition(object):
    """Ordered partition of the UIDs into reversible and trivial classes"""

    def __init__(self, classes):
        self.classes = list(classes)

    def __iter__(self):
        return iter(self.classes)

    def __len__(self):
        return len(self.classes)

    def __getitem__(self, i):
        return self.classes[i]

    @property
    def uids(self):
        return frozenset(u for c in self.classes for u in c.uids)

    @classmethod
    def from_dependencies(cls, deps, schema):
        if not deps.finitely_closed:
            raise UsageError('a manageable partition needs finitely '
                             'closed dependencies')
        graph = ConstraintGraph.from_dependencies(deps, schema)
        classes = []
        for component in graph.scc_order():
            main = sorted(u for u in deps.uids
                          if u.source in component and u.target in component)
            if main:
                classes.append(PartitionClass(REVERSIBLE, tuple(main),
                                              component))
            for uid in sorted(u for u in deps.uids
                              if u.source in component and
                              u.target not in component):
                classes.append(PartitionClass(TRIVIAL, (uid,), component))
        partition = cls(classes)
        problems = partition.problems(deps.fds)
        if problems:
            raise UsageError('dependencies are not finitely closed: %s'
                             % problems[0])
        return partition

    def is_ordered(self, fds):
        index = {u: i for i, c in enumerate(self.classes) for u in c.uids}
        return all(index[a] <= index[b]
                   for a in index for b in index if follows(a, b, fds))

    def problems(self, fds):
        found = []
        if not self.is_ordered(fds):
            found.append('the classes are not ordered')
        for c in self.classes:
            if c.kind == REVERSIBLE and not is_reversible(c.uids, fds):
                found.append('class %s is not reversible'
                             % ', '.join(str(u) for u in c.uids))
            if c.kind == TRIVIAL and (len(c.uids) != 1 or
                                      follows(c.uids[0], c.uids[0], fds)):
                found.append('class %s is not trivial'
                             % ', '.join(str(u) for u in c.uids))
        return found

    def check(self, fds):
        return not self.problems(fds)

    def describe(self):
        return ['%s: %s' % (c.kind, ', '.join(str(u)[4:] for u in c.uids))
                for c in self.classes]
