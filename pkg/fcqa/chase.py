"""The UID chase.

`truncated_chase` materializes rounds breadth first: a core-first round,
then plain rounds. `LazyChase` represents the whole (generally infinite)
core chase and creates facts only when they are looked at.
"""
from collections import defaultdict, namedtuple
from dataclasses import dataclass, field
from functools import cached_property

from fcqa.closure import uid_transitive_closure
from fcqa.errors import UsageError
from fcqa.model import (DependencySet, Fact, Instance, NULL_PREFIX, Position,
                        Schema, project_position)
from fcqa.utils import FreshNames

CORE_FIRST = 'core-first'
PLAIN = 'plain'
MODES = (CORE_FIRST, PLAIN)

CreatedBy = namedtuple('CreatedBy', ['uid', 'exported', 'round'])
NullRecord = namedtuple('NullRecord',
                        ['fact', 'intro', 'exported', 'parent', 'depth', 'uid'])


def checked_uids(uids):
    """The UIDs as a frozenset, which must be transitively closed"""
    if isinstance(uids, DependencySet):
        if not (uids.uid_transitively_closed or uids.finitely_closed):
            raise UsageError('the UIDs must be transitively closed '
                             'before chasing')
        return frozenset(uids.uids)
    uids = frozenset(uids)
    if uid_transitive_closure(uids) != uids:
        raise UsageError('the UIDs must be transitively closed '
                         'before chasing')
    return uids


def infer_schema(instance, uids=()):
    relations = {}
    for fact in instance.facts:
        relations[fact.relation] = fact.arity
    for uid in uids:
        for position in (uid.source, uid.target):
            if position.relation not in relations:
                raise UsageError('arity of %s is unknown, a schema is needed'
                                 % position.relation)
    return Schema(relations)


def _uid_index(uids):
    index = defaultdict(list)
    for uid in sorted(uids):
        index[uid.source].append(uid)
    return index


def element_order(instance):
    """Elements in order of first occurrence in the sorted facts"""
    seen = {}
    for fact in instance.sorted_facts():
        for a in fact.args:
            seen.setdefault(a, len(seen))
    return sorted(seen, key=seen.get)


@dataclass(frozen=True)
class ChasePrefix:
    """A finite prefix of the chase with its forest structure"""
    base: Instance
    schema: Schema
    facts: tuple = ()
    parent: dict = field(default_factory=dict)
    created_by: dict = field(default_factory=dict)
    depth: dict = field(default_factory=dict)

    @classmethod
    def from_base(cls, base, schema=None):
        schema = schema or infer_schema(base)
        return cls(base, schema, tuple(base.sorted_facts()), {}, {},
                   {f: 0 for f in base.facts})

    @cached_property
    def instance(self):
        return Instance(self.facts)

    @property
    def rounds(self):
        return max(self.depth.values(), default=0)

    def __len__(self):
        return len(self.facts)

    def is_base(self, fact):
        return fact not in self.created_by

    def non_base_facts(self):
        return [f for f in self.facts if f in self.created_by]

    def facts_up_to(self, depth):
        return [f for f in self.facts if self.depth[f] <= depth]

    def exported_element(self, fact):
        return fact.at(self.created_by[fact].exported.index)

    @cached_property
    def _introductions(self):
        intro = {}
        for fact in self.non_base_facts():
            exported = self.created_by[fact].exported
            for position in fact.positions():
                if position != exported:
                    intro.setdefault(fact.at(position.index),
                                     (fact, position))
        return intro

    def introduction(self, element):
        """(fact, position) creating a null, None for base elements"""
        return self._introductions.get(element)

    def element_depth(self, element):
        found = self.introduction(element)
        return 0 if found is None else self.depth[found[0]]


def _witness(uid, element, arity, fresh):
    return Fact(uid.target.relation,
                [element if i == uid.target.index else fresh()
                 for i in range(1, arity + 1)])


def chase_round(prefix, uids, mode=PLAIN, fresh=None):
    """Apply every chase step that is applicable at the start of the round.

    In core-first mode there is one new fact per (element, target
    position); in plain mode one per (active fact, UID).
    """
    if mode not in MODES:
        raise UsageError('unknown chase mode %s' % mode)
    if mode == CORE_FIRST and prefix.rounds > 0:
        raise UsageError('a core-first round must be the first round')
    by_source = _uid_index(checked_uids(uids))
    instance = prefix.instance
    fresh = fresh or FreshNames(NULL_PREFIX, instance.domain)
    projections = {}

    def occupied(position):
        if position not in projections:
            projections[position] = project_position(instance, position)
        return projections[position]

    facts = list(prefix.facts)
    parent, created_by = dict(prefix.parent), dict(prefix.created_by)
    depth = dict(prefix.depth)
    handled = set()
    for fact in prefix.facts:
        for position in fact.positions():
            a = fact.at(position.index)
            for uid in by_source.get(position, ()):
                if a in occupied(uid.target):
                    continue
                key = (a, uid.target) if mode == CORE_FIRST else (fact, uid)
                if key in handled:
                    continue
                handled.add(key)
                new = _witness(uid, a,
                               prefix.schema.arity(uid.target.relation), fresh)
                facts.append(new)
                parent[new] = fact
                depth[new] = depth[fact] + 1
                created_by[new] = CreatedBy(uid, uid.target, depth[new])
    return ChasePrefix(prefix.base, prefix.schema, tuple(facts), parent,
                       created_by, depth)


def truncated_chase(base, uids, rounds, schema=None):
    """Core-first round followed by plain rounds, stopping at a fixpoint"""
    if rounds < 0:
        raise UsageError('rounds must be >= 0, got %d' % rounds)
    uids = checked_uids(uids)
    prefix = ChasePrefix.from_base(base, schema or infer_schema(base, uids))
    fresh = FreshNames(NULL_PREFIX, base.domain)
    for r in range(rounds):
        following = chase_round(prefix, uids, CORE_FIRST if r == 0 else PLAIN,
                                fresh)
        if len(following) == len(prefix):
            break
        prefix = following
    return prefix


def verify_unique_witness(prefix):
    """A non-base element occurs at each position in at most one fact"""
    seen = defaultdict(list)
    for fact in prefix.facts:
        for position in fact.positions():
            seen[(fact.at(position.index), position)].append(fact)
    return all(all(prefix.is_base(f) for f in facts)
               for facts in seen.values() if len(facts) > 1)


class LazyChase(object):
    """The core chase of base by uids, materialized on demand.

    A null is created at most once per (parent element, exported position),
    so repeated lookups return the same facts. The view of an element
    summarizes its radius-n neighbourhood: elements with equal views of
    depth n have isomorphic radius-n neighbourhoods.
    """

    def __init__(self, base, uids, schema=None):
        self.base = base
        self.uids = checked_uids(uids)
        self.schema = schema or infer_schema(base, self.uids)
        self.by_source = _uid_index(self.uids)
        self.fresh = FreshNames(NULL_PREFIX, base.domain)
        self.nulls = {}
        self.children = {}
        self.exporter = {}
        self._wants = {}
        self._views = {}
        self._base_projections = {}

    def __contains__(self, element):
        return element in self.nulls or element in self.base.domain

    def is_null(self, element):
        return element in self.nulls

    def _in_base(self, element, position):
        if position not in self._base_projections:
            self._base_projections[position] = project_position(
                self.base, position)
        return element in self._base_projections[position]

    def wants(self, element):
        """(target position, UID) pairs the element is chased along"""
        if element not in self._wants:
            if element in self.nulls:
                sources = [self.nulls[element].intro]
            else:
                sources = sorted(self.base.positions_of(element))
            targets = {}
            for source in sources:
                for uid in self.by_source.get(source, ()):
                    if (element not in self.nulls and
                            self._in_base(element, uid.target)):
                        continue
                    targets.setdefault(uid.target, uid)
            self._wants[element] = sorted(targets.items())
        return self._wants[element]

    def depth(self, element):
        record = self.nulls.get(element)
        return 0 if record is None else record.depth

    def intro(self, element):
        record = self.nulls.get(element)
        return None if record is None else record.intro

    def parent(self, element):
        record = self.nulls.get(element)
        return None if record is None else record.parent

    def creating_uid(self, element):
        record = self.nulls.get(element)
        return None if record is None else record.uid

    def creating_fact(self, element):
        record = self.nulls.get(element)
        return None if record is None else record.fact

    def child_fact(self, element, target):
        key = (element, target)
        if key not in self.children:
            uid = dict(self.wants(element)).get(target)
            if uid is None:
                raise UsageError('%s does not want to be at %s'
                                 % (element, target))
            fact = _witness(uid, element,
                            self.schema.arity(target.relation), self.fresh)
            depth = self.depth(element) + 1
            for position in fact.positions():
                if position != target:
                    self.nulls[fact.at(position.index)] = NullRecord(
                        fact, position, target, element, depth, uid)
            self.children[key] = fact
            self.exporter[fact] = (element, uid, depth)
        return self.children[key]

    def child_facts(self, element):
        return [self.child_fact(element, target)
                for target, _ in self.wants(element)]

    def fact_depth(self, fact):
        info = self.exporter.get(fact)
        return 0 if info is None else info[2]

    def exported_element(self, fact):
        return self.exporter[fact][0]

    def facts_of(self, element, max_depth=None):
        if element in self.nulls:
            facts = [self.nulls[element].fact]
        else:
            facts = list(self.base.facts_of(element))
        if max_depth is None or self.depth(element) + 1 <= max_depth:
            facts.extend(self.child_facts(element))
        return facts

    def neighbours(self, element, max_depth=None):
        found = []
        for fact in self.facts_of(element, max_depth):
            for a in fact.args:
                if a != element and a not in found:
                    found.append(a)
        return found

    def view(self, element, n):
        if n <= 0:
            return None
        key = (element, n)
        if key not in self._views:
            record = self.nulls.get(element)
            if record is None:
                self._views[key] = ('base', element)
            else:
                self._views[key] = (record.exported, record.intro,
                                    self.view(record.parent, n - 1))
        return self._views[key]

    def last_uids(self, element, n):
        """UIDs of the last n chase steps leading to the element"""
        found = []
        while len(found) < n and element in self.nulls:
            record = self.nulls[element]
            found.append(record.uid)
            element = record.parent
        return found

    def parent_fact(self, element, uid):
        record = self.nulls.get(element)
        if record is not None:
            return record.fact
        for fact, index in self.base.occurrences(element):
            if Position(fact.relation, index) == uid.source:
                return fact
        raise UsageError('%s does not occur at %s' % (element, uid.source))

    def prefix(self, rounds):
        """ChasePrefix of the given number of rounds, isomorphic to the
        truncated chase"""
        facts = list(self.base.sorted_facts())
        parent, created_by = {}, {}
        depth = {f: 0 for f in facts}
        frontier = element_order(self.base)
        for r in range(1, rounds + 1):
            following = []
            for element in frontier:
                for target, uid in self.wants(element):
                    fact = self.child_fact(element, target)
                    facts.append(fact)
                    parent[fact] = self.parent_fact(element, uid)
                    created_by[fact] = CreatedBy(uid, target, r)
                    depth[fact] = r
                    following.extend(a for a in fact.args if a != element)
            frontier = following
        return ChasePrefix(self.base, self.schema, tuple(facts), parent,
                           created_by, depth)

    def instance(self, max_depth):
        return Instance(self.prefix(max_depth).facts)


def chase_to_dot(prefix):
    """DOT rendering of the chase forest"""
    names = {fact: 'f%d' % i for i, fact in enumerate(prefix.facts)}
    lines = ['digraph chase {']
    for fact in prefix.facts:
        shape = 'box' if prefix.is_base(fact) else 'ellipse'
        lines.append('  %s [label="%s", shape=%s];'
                     % (names[fact], str(fact).replace('"', '\\"'), shape))
    for fact in prefix.non_base_facts():
        lines.append('  %s -> %s [label="%s"];' % (
            names[prefix.parent[fact]], names[fact],
            str(prefix.created_by[fact].uid)[4:]))
    lines.append('}')
    return '\n'.join(lines) + '\n'
