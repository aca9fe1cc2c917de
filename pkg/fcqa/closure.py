"""Implication of UIDs and FDs, unrestricted and finite.

The finite closure is the fixpoint of three rules: FD implication (kept as
the declared FDs plus every implied unary FD), UID transitivity, and the
cycle rule, which reverses every UID and unary FD lying on a cycle of the
constraint graph.

For an exported position S^q, a position S^r != S^q is dangerous when it
determines S^q; the non-dangerous positions are the rest of the relation.
"""
from collections import namedtuple

import networkx as nx

from fcqa.graph import ConstraintGraph
from fcqa.model import FD, UID, Position, fd_key

TraceStep = namedtuple('TraceStep', ['rule', 'premises', 'conclusion'])

RULES = ('uid-trans', 'fd-trans', 'fd-augment', 'cycle')


class DerivationTrace(object):
    """Record of the rule applications performed by finite_closure"""

    def __init__(self):
        self.steps = []

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def add(self, rule, premises, conclusion):
        assert rule in RULES
        self.steps.append(TraceStep(rule, tuple(premises), conclusion))

    def conclusions(self):
        return [s.conclusion for s in self.steps]

    def lines(self):
        return ['%s: %s => %s' % (s.rule, '; '.join(str(p) for p in s.premises),
                                  s.conclusion) for s in self.steps]

    def check(self):
        """Each conclusion follows from its premises by its rule"""
        return all(_step_is_valid(s) for s in self.steps)


def _step_is_valid(step):
    premises, conclusion = step.premises, step.conclusion
    if step.rule == 'uid-trans':
        if not premises or not all(isinstance(p, UID) for p in premises):
            return False
        chained = all(a.target == b.source
                      for a, b in zip(premises, premises[1:]))
        return (chained and premises[0].source == conclusion.source and
                premises[-1].target == conclusion.target)
    if step.rule in ('fd-trans', 'fd-augment'):
        return conclusion.rhs in fd_attribute_closure(
            premises, conclusion.relation, conclusion.lhs)
    if step.rule == 'cycle':
        if not premises or premises[0].reverse() != conclusion:
            return False
        edges = [_edge(p) for p in premises]
        return all(a[1] == b[0] for a, b in zip(edges, edges[1:] + edges[:1]))
    return False


def _edge(dependency):
    if isinstance(dependency, UID):
        return (dependency.source, dependency.target)
    return (dependency.target, dependency.source)


def fd_attribute_closure(fds, relation, lhs, fired=None):
    """Largest set of indices determined by lhs on the relation.

    When `fired` is a list, the FDs used are appended to it.
    """
    closure = set(lhs)
    pending = [fd for fd in fds if fd.relation == relation]
    changed = True
    while changed:
        changed = False
        for fd in list(pending):
            if fd.lhs <= closure:
                pending.remove(fd)
                if fd.rhs not in closure:
                    closure.add(fd.rhs)
                    if fired is not None:
                        fired.append(fd)
                changed = True
    return frozenset(closure)


def _arity(position, fds, schema):
    if schema is not None:
        return schema.arity(position.relation)
    indices = {position.index}
    for fd in fds:
        if fd.relation == position.relation:
            indices |= fd.lhs | {fd.rhs}
    return max(indices)


def dangerous(position, fds, schema=None):
    """Positions of the relation that determine the exported position"""
    found = []
    for i in range(1, _arity(position, fds, schema) + 1):
        if i == position.index:
            continue
        if position.index in fd_attribute_closure(fds, position.relation,
                                                  [i]):
            found.append(Position(position.relation, i))
    return found


def non_dangerous(position, fds, schema=None):
    danger = set(dangerous(position, fds, schema))
    return [Position(position.relation, i)
            for i in range(1, _arity(position, fds, schema) + 1)
            if i != position.index and
            Position(position.relation, i) not in danger]


def is_safe(position, fds, schema=None):
    """No FD from the non-dangerous positions leaves them"""
    others = {p.index for p in non_dangerous(position, fds, schema)}
    if not others:
        return True
    return fd_attribute_closure(fds, position.relation, others) <= others


def uid_transitive_closure(uids, trace=None):
    graph = nx.DiGraph()
    graph.add_edges_from((u.source, u.target, {'uid': u}) for u in uids)
    closed = set(uids)
    for source, target in nx.transitive_closure(graph, reflexive=None).edges:
        if source == target:
            continue
        uid = UID(source, target)
        if uid not in closed:
            closed.add(uid)
            if trace is not None:
                path = nx.shortest_path(graph, source, target)
                trace.add('uid-trans', [graph[a][b]['uid']
                                        for a, b in zip(path, path[1:])], uid)
    return frozenset(closed)


def implied_ufds(fds, trace=None):
    """Every unary FD implied by the given FDs under Armstrong's rules"""
    found = set()
    for relation in sorted({fd.relation for fd in fds}):
        indices = set()
        for fd in fds:
            if fd.relation == relation:
                indices |= fd.lhs | {fd.rhs}
        for index in sorted(indices):
            fired = []
            for rhs in sorted(fd_attribute_closure(fds, relation, [index],
                                                   fired) - {index}):
                ufd = FD(relation, [index], rhs)
                found.add(ufd)
                if trace is not None and ufd not in fds:
                    used = _premises_for(fired, relation, index, rhs)
                    rule = ('fd-trans' if all(p.is_unary for p in used)
                            else 'fd-augment')
                    trace.add(rule, used, ufd)
    return frozenset(found)


def _premises_for(fired, relation, index, rhs):
    """Shortest prefix of the fired FDs that already yields rhs"""
    for n in range(1, len(fired) + 1):
        if rhs in fd_attribute_closure(fired[:n], relation, [index]):
            return fired[:n]
    return fired


def transitively_closed(deps):
    """Dependencies with the UIDs closed under transitivity"""
    if deps.uid_transitively_closed:
        return deps
    return deps.replace(uids=uid_transitive_closure(deps.uids),
                        uid_transitively_closed=True)


def finite_closure(deps, trace=None):
    """Dependencies finitely implied by deps, flagged as finitely closed.

    Higher-arity FDs are kept as declared; every implied unary FD is
    explicit.
    """
    if deps.finitely_closed and trace is None:
        return deps
    uids, fds = set(deps.uids), set(deps.fds)
    changed = True
    while changed:
        changed = False
        for ufd in implied_ufds(fds, trace) - fds:
            fds.add(ufd)
            changed = True
        for uid in uid_transitive_closure(uids, trace) - uids:
            uids.add(uid)
            changed = True
        graph = ConstraintGraph(uids, [fd for fd in fds if fd.is_unary])
        for u, v in graph.cyclic_edges():
            for dependency in sorted(graph.provenance(u, v), key=str):
                reverse = dependency.reverse()
                target = uids if isinstance(reverse, UID) else fds
                if reverse in target:
                    continue
                target.add(reverse)
                changed = True
                if trace is not None:
                    cycle = graph.cycle_through(u, v)
                    premises = [dependency] + [
                        sorted(graph.provenance(a, b), key=str)[0]
                        for a, b in cycle[1:]]
                    trace.add('cycle', premises, reverse)
    return deps.replace(uids=uids, fds=fds, uid_transitively_closed=True,
                        fd_closed=True, finitely_closed=True)


def finitely_implies(deps, dependency):
    closed = finite_closure(deps)
    if isinstance(dependency, UID):
        return dependency in closed.uids
    return dependency.rhs in fd_attribute_closure(
        closed.fds, dependency.relation, dependency.lhs)


def implies(deps, dependency):
    """Unrestricted implication, where UIDs and FDs do not interact"""
    if isinstance(dependency, UID):
        return dependency in uid_transitive_closure(deps.uids)
    return dependency.rhs in fd_attribute_closure(
        deps.fds, dependency.relation, dependency.lhs)


def added_dependencies(deps, closed):
    """Dependencies of the closure that were not declared"""
    return (sorted(closed.uids - deps.uids),
            sorted(closed.fds - deps.fds, key=fd_key))
