"""Schemas, instances, dependencies and conjunctive queries.

All values here are immutable once built: operations that change an
instance return a new one.
"""
import json
from collections import namedtuple, defaultdict

from fcqa.errors import UsageError

NULL_PREFIX = '~n'


class Position(namedtuple('Position', ['relation', 'index'])):
    """Position R^p, the index is 1-based"""
    __slots__ = ()

    def __str__(self):
        return '%s[%d]' % (self.relation, self.index)


class Fact(namedtuple('Fact', ['relation', 'args'])):
    __slots__ = ()

    def __new__(cls, relation, args):
        return super(Fact, cls).__new__(cls, relation, tuple(args))

    @property
    def arity(self):
        return len(self.args)

    def at(self, index):
        return self.args[index - 1]

    def positions(self):
        return [Position(self.relation, i)
                for i in range(1, len(self.args) + 1)]

    def __str__(self):
        return '%s(%s)' % (self.relation, ', '.join(self.args))


class UID(namedtuple('UID', ['source', 'target'])):
    """Unary inclusion dependency ui(source <= target)"""
    __slots__ = ()

    def __new__(cls, source, target):
        source, target = Position(*source), Position(*target)
        if source == target:
            raise UsageError('trivial UID %s <= %s' % (source, target))
        return super(UID, cls).__new__(cls, source, target)

    def reverse(self):
        return UID(self.target, self.source)

    def __str__(self):
        return 'uid %s <= %s' % (self.source, self.target)


class FD(namedtuple('FD', ['relation', 'lhs', 'rhs'])):
    """Functional dependency R^lhs -> R^rhs over 1-based indices"""
    __slots__ = ()

    def __new__(cls, relation, lhs, rhs):
        lhs = frozenset(lhs)
        if not lhs:
            raise UsageError('FD on %s with empty left-hand side' % relation)
        if rhs in lhs:
            raise UsageError('trivial FD %s[%s] -> %s[%d]' % (
                relation, ','.join(str(i) for i in sorted(lhs)),
                relation, rhs))
        return super(FD, cls).__new__(cls, relation, lhs, rhs)

    @property
    def is_unary(self):
        return len(self.lhs) == 1

    @property
    def source(self):
        """The single determining position of a unary FD"""
        (index,) = self.lhs
        return Position(self.relation, index)

    @property
    def target(self):
        return Position(self.relation, self.rhs)

    def reverse(self):
        return FD(self.relation, [self.rhs], self.source.index)

    def __str__(self):
        return 'fd %s[%s] -> %s[%d]' % (
            self.relation, ','.join(str(i) for i in sorted(self.lhs)),
            self.relation, self.rhs)


def fd_key(fd):
    return (fd.relation, sorted(fd.lhs), fd.rhs)


class Schema(object):

    def __init__(self, relations=None):
        self.relations = {}
        for name, arity in dict(relations or {}).items():
            if arity < 1:
                raise UsageError('relation %s has arity %d, expected >= 1'
                                 % (name, arity))
            self.relations[name] = arity

    def __contains__(self, name):
        return name in self.relations

    def __eq__(self, other):
        return isinstance(other, Schema) and self.relations == other.relations

    def __repr__(self):
        return 'Schema(%r)' % (self.relations,)

    def arity(self, name):
        try:
            return self.relations[name]
        except KeyError:
            raise UsageError('unknown relation %s' % name)

    @property
    def max_arity(self):
        return max(self.relations.values()) if self.relations else 0

    def names(self):
        return sorted(self.relations)

    def positions(self, name=None):
        names = [name] if name is not None else self.names()
        return [Position(n, i) for n in names
                for i in range(1, self.arity(n) + 1)]

    def check_position(self, position):
        if not 1 <= position.index <= self.arity(position.relation):
            raise UsageError('position %s out of range for arity %d' % (
                position, self.arity(position.relation)))

    def check_fact(self, fact):
        if self.arity(fact.relation) != len(fact.args):
            raise UsageError('fact %s has %d arguments, %s has arity %d' % (
                fact, len(fact.args), fact.relation,
                self.arity(fact.relation)))

    def extend(self, relations):
        merged = dict(self.relations)
        for name, arity in relations.items():
            if merged.get(name, arity) != arity:
                raise UsageError('relation %s redeclared with arity %d'
                                 % (name, arity))
            merged[name] = arity
        return Schema(merged)

    def without(self, names):
        names = set(names)
        return Schema({n: a for n, a in self.relations.items()
                       if n not in names})


class Instance(object):
    """A finite set of facts with its active domain"""

    __slots__ = ('facts', '_domain', '_by_relation', '_occurrences')

    def __init__(self, facts=()):
        self.facts = frozenset(
            f if isinstance(f, Fact) else Fact(*f) for f in facts)
        self._domain = None
        self._by_relation = None
        self._occurrences = None

    def __len__(self):
        return len(self.facts)

    def __iter__(self):
        return iter(self.sorted_facts())

    def __contains__(self, fact):
        return fact in self.facts

    def __eq__(self, other):
        return isinstance(other, Instance) and self.facts == other.facts

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.facts)

    def __repr__(self):
        return 'Instance({%s})' % ', '.join(str(f) for f in self)

    def sorted_facts(self):
        return sorted(self.facts)

    @property
    def domain(self):
        if self._domain is None:
            self._domain = frozenset(a for f in self.facts for a in f.args)
        return self._domain

    def relations(self):
        return set(self.by_relation())

    def by_relation(self, name=None):
        if self._by_relation is None:
            index = defaultdict(list)
            for fact in self.sorted_facts():
                index[fact.relation].append(fact)
            self._by_relation = dict(index)
        if name is None:
            return self._by_relation
        return self._by_relation.get(name, [])

    def occurrences(self, element):
        """(fact, index) pairs where the element occurs"""
        if self._occurrences is None:
            index = defaultdict(list)
            for fact in self.sorted_facts():
                for i, a in enumerate(fact.args, start=1):
                    index[a].append((fact, i))
            self._occurrences = dict(index)
        return self._occurrences.get(element, [])

    def facts_of(self, element):
        seen = []
        for fact, _ in self.occurrences(element):
            if not seen or seen[-1] != fact:
                seen.append(fact)
        return seen

    def positions_of(self, element):
        return {Position(f.relation, i) for f, i in self.occurrences(element)}

    def union(self, other):
        other_facts = other.facts if isinstance(other, Instance) else other
        return Instance(self.facts | frozenset(other_facts))

    def restrict(self, names):
        names = set(names)
        return Instance(f for f in self.facts if f.relation in names)

    def without_relations(self, names):
        names = set(names)
        return Instance(f for f in self.facts if f.relation not in names)

    def rename(self, mapping):
        return Instance(Fact(f.relation, [mapping.get(a, a) for a in f.args])
                        for f in self.facts)


class DependencySet(object):
    """UIDs and FDs together with the closure status flags"""

    def __init__(self, uids=(), fds=(), uid_transitively_closed=False,
                 fd_closed=False, finitely_closed=False):
        self.uids = frozenset(uids)
        self.fds = frozenset(fds)
        self.uid_transitively_closed = uid_transitively_closed
        self.fd_closed = fd_closed
        self.finitely_closed = finitely_closed

    def __eq__(self, other):
        return (isinstance(other, DependencySet) and
                self.uids == other.uids and self.fds == other.fds)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.uids, self.fds))

    def __repr__(self):
        return 'DependencySet(%d UIDs, %d FDs%s)' % (
            len(self.uids), len(self.fds),
            ', finitely closed' if self.finitely_closed else '')

    def __contains__(self, dependency):
        return dependency in self.uids or dependency in self.fds

    @property
    def ufds(self):
        return frozenset(fd for fd in self.fds if fd.is_unary)

    def fds_of(self, relation):
        return [fd for fd in self.fds if fd.relation == relation]

    def sorted_uids(self):
        return sorted(self.uids)

    def sorted_fds(self):
        return sorted(self.fds, key=fd_key)

    def relations(self):
        names = {u.source.relation for u in self.uids}
        names |= {u.target.relation for u in self.uids}
        names |= {fd.relation for fd in self.fds}
        return names

    def check(self, schema):
        for uid in self.uids:
            schema.check_position(uid.source)
            schema.check_position(uid.target)
        for fd in self.fds:
            for index in set(fd.lhs) | {fd.rhs}:
                schema.check_position(Position(fd.relation, index))

    def replace(self, uids=None, fds=None, **flags):
        options = dict(uid_transitively_closed=self.uid_transitively_closed,
                       fd_closed=self.fd_closed,
                       finitely_closed=self.finitely_closed)
        options.update(flags)
        return DependencySet(self.uids if uids is None else uids,
                             self.fds if fds is None else fds, **options)


Var = namedtuple('Var', ['name'])
Const = namedtuple('Const', ['value'])


class Atom(namedtuple('Atom', ['relation', 'terms'])):
    __slots__ = ()

    def __new__(cls, relation, terms):
        return super(Atom, cls).__new__(cls, relation, tuple(terms))

    def variables(self):
        return [t.name for t in self.terms if isinstance(t, Var)]

    def __str__(self):
        return '%s(%s)' % (self.relation, ', '.join(
            t.name if isinstance(t, Var) else json.dumps(t.value)
            for t in self.terms))


class CQ(object):
    """Conjunctive query; no free variables means Boolean"""

    def __init__(self, atoms, free_vars=()):
        self.atoms = tuple(atoms)
        self.free_vars = tuple(free_vars)
        if not self.atoms:
            raise UsageError('query without atoms')
        occurring = set(self.variables())
        for name in self.free_vars:
            if name not in occurring:
                raise UsageError('free variable %s occurs in no atom' % name)

    def __len__(self):
        return len(self.atoms)

    @property
    def size(self):
        return len(self.atoms)

    @property
    def is_boolean(self):
        return not self.free_vars

    def __eq__(self, other):
        return (isinstance(other, CQ) and self.atoms == other.atoms and
                self.free_vars == other.free_vars)

    def __hash__(self):
        return hash((self.atoms, self.free_vars))

    def __repr__(self):
        return 'CQ(%s)' % self

    def __str__(self):
        head = '?' if self.is_boolean else '?(%s)' % ', '.join(self.free_vars)
        return '%s :- %s .' % (head, ', '.join(str(a) for a in self.atoms))

    def variables(self):
        seen = []
        for atom in self.atoms:
            for name in atom.variables():
                if name not in seen:
                    seen.append(name)
        return seen

    def constants(self):
        return sorted({t.value for a in self.atoms for t in a.terms
                       if isinstance(t, Const)})

    def relations(self):
        return {a.relation for a in self.atoms}

    def check(self, schema):
        for atom in self.atoms:
            if schema.arity(atom.relation) != len(atom.terms):
                raise UsageError('atom %s does not match arity %d' % (
                    atom, schema.arity(atom.relation)))

    def substitute(self, assignment):
        """Boolean query obtained by fixing some variables to constants"""
        atoms = [Atom(a.relation, [
            Const(assignment[t.name])
            if isinstance(t, Var) and t.name in assignment else t
            for t in a.terms]) for a in self.atoms]
        return CQ(atoms, [v for v in self.free_vars if v not in assignment])


def project(instance, positions):
    """Projection of the instance on positions of a single relation.

    Tuples list the values in increasing position index order.
    """
    positions = sorted(Position(*p) for p in positions)
    relations = {p.relation for p in positions}
    if len(relations) > 1:
        raise UsageError('projection mixes relations %s'
                         % ', '.join(sorted(relations)))
    if not positions:
        return set()
    (relation,) = relations
    return {tuple(f.args[p.index - 1] for p in positions)
            for f in instance.by_relation(relation)}


def project_position(instance, position):
    """Elements occurring at a single position"""
    return {t[0] for t in project(instance, [position])}


def active_elements(instance, uid):
    """Elements of the instance violating the UID"""
    return (project_position(instance, uid.source) -
            project_position(instance, uid.target))


def is_null(element):
    return element.startswith(NULL_PREFIX)
