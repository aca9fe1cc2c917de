"""Aligned superinstances, fact classes and envelopes.

An aligned superinstance is an instance together with a map cov into the
chase, such that every element is k-bounded simulated by its cov image
and every non-base element occurs at the position where its cov image was
introduced. Saturation produces the first aligned superinstance of the
construction: enough of the chase to achieve every fact class, and an
envelope of reusable tuples for each class.
"""
from collections import OrderedDict, defaultdict, deque, namedtuple

from fcqa.builder.dense import (cover, dense_interpretation, fd_projection)
from fcqa.chase import LazyChase, element_order
from fcqa.closure import is_safe, non_dangerous
from fcqa.errors import EnvelopeExhausted, InternalError, ResourceError
from fcqa.model import Fact, Instance, Position
from fcqa.simulation import SimCertificate
from fcqa.utils import FreshNames, natural_key

FRESH_PREFIX = '~f'
COPY_PREFIX = '~c'

RELATION = 'relation'
FACT = 'fact'
ENVELOPE = 'envelope'
LEVELS = (RELATION, FACT, ENVELOPE)

MAX_KEYS = 5000

FactClassKey = namedtuple('FactClassKey', ['exported', 'view'])


class AlignedSuperinstance(object):
    """Growing instance over base with cov into a LazyChase.

    base holds the initial instance and its disjoint copies; cov maps
    their elements to the elements they copy.
    """

    def __init__(self, chase, k, base, cov=None):
        self.chase = chase
        self.k = k
        self.base = base
        self.facts = []
        self.cov = {}
        self._fact_set = set()
        self._at = defaultdict(set)
        self._occurrences = defaultdict(list)
        self._instance = None
        self.fresh = FreshNames(FRESH_PREFIX, base.domain)
        cov = cov or {}
        for a in base.domain:
            self.cov[a] = cov.get(a, a)
        for fact in base.sorted_facts():
            self.add(fact)

    def __len__(self):
        return len(self.facts)

    def __contains__(self, fact):
        return fact in self._fact_set

    @property
    def view_depth(self):
        return max(self.k, 1)

    @property
    def instance(self):
        if self._instance is None:
            self._instance = Instance(self.facts)
        return self._instance

    @property
    def domain(self):
        return set(self._occurrences)

    def add(self, fact, cov=None):
        """Add a fact, with cov images for its new elements"""
        if fact in self._fact_set:
            return False
        for a, image in (cov or {}).items():
            self.cov.setdefault(a, image)
        for i, a in enumerate(fact.args, start=1):
            if a not in self.cov:
                raise InternalError('no cov image for %s in %s' % (a, fact))
            self._at[Position(fact.relation, i)].add(a)
            self._occurrences[a].append((fact, i))
            self.fresh.taken.add(a)
        self.facts.append(fact)
        self._fact_set.add(fact)
        self._instance = None
        return True

    def occupied(self, position):
        return self._at.get(position, set())

    def occurrences(self, element):
        return self._occurrences.get(element, [])

    def is_base(self, element):
        return element in self.base.domain

    def has_projection(self, positions, values):
        """Some fact carries the values at the positions"""
        first = positions[0]
        for fact, i in self.occurrences(values[0]):
            if (fact.relation == first.relation and i == first.index and
                    all(fact.at(p.index) == v
                        for p, v in zip(positions, values))):
                return True
        return False

    def violations(self, uids):
        """(element, UID) pairs to repair, one per element and target"""
        found = {}
        for uid in sorted(uids):
            for a in self.occupied(uid.source) - self.occupied(uid.target):
                found.setdefault((a, uid.target), uid)
        return [(a, uid) for (a, target), uid in
                sorted(found.items(),
                       key=lambda kv: (natural_key(kv[0][0]), kv[0][1]))]

    def satisfies(self, uids):
        return all(self.occupied(u.source) <= self.occupied(u.target)
                   for u in uids)

    def key_for(self, element, target):
        return FactClassKey(target, self.chase.view(self.cov[element],
                                                    self.view_depth))

    def certificate(self):
        return SimCertificate(self.k, dict(self.cov), self.instance,
                              self.chase)

    def directionality_problems(self):
        problems = []
        for a in sorted(self.domain, key=natural_key):
            if self.is_base(a):
                continue
            intro = self.chase.intro(self.cov[a])
            if intro is None:
                problems.append('%s covers base element %s' % (a,
                                                                self.cov[a]))
            elif a not in self.occupied(intro):
                problems.append('%s does not occur at %s' % (a, intro))
        return problems


class Envelope(object):
    """Reusable tuples over the non-dangerous positions of a fact class.

    A safe envelope has one tuple, reused at will. An unsafe one hands out
    each tuple at most once.
    """

    def __init__(self, key, positions, tuples, safe, used=()):
        self.key = key
        self.positions = tuple(positions)
        self.tuples = [tuple(t) for t in tuples]
        self.safe = safe
        self.used = set(used)
        if not self.tuples:
            raise InternalError('empty envelope for %s' % (key,))

    def __repr__(self):
        return 'Envelope(%s, %d tuples, %d remaining%s)' % (
            self.key.exported, len(self.tuples), self.remaining(),
            ', safe' if self.safe else '')

    @property
    def domain(self):
        return {a for t in self.tuples for a in t}

    def remaining(self):
        if self.safe:
            return len(self.tuples)
        return len(self.tuples) - len(self.used)

    def take(self):
        if self.safe:
            return self.tuples[0]
        for t in self.tuples:
            if t not in self.used:
                self.used.add(t)
                return t
        raise EnvelopeExhausted('envelope of %s at %s is exhausted'
                                % (self.key.exported, len(self.tuples)))

    def problems(self, instance, fds):
        relation = self.key.exported.relation
        indices = [p.index for p in self.positions]
        found = []
        for fd in fd_projection(fds, relation, indices):
            seen = {}
            for t in self.tuples:
                row = dict(zip(indices, t))
                lhs = tuple(row[i] for i in sorted(fd.lhs))
                if seen.setdefault(lhs, row[fd.rhs]) != row[fd.rhs]:
                    found.append('%s fails on the envelope' % fd)
                    break
        where = {}
        for t in self.tuples:
            for p, a in zip(self.positions, t):
                if where.setdefault(a, p) != p:
                    found.append('%s occurs at two positions' % a)
        for a, p in sorted(where.items()):
            if a not in {f.at(p.index) for f in instance.facts_of(a)
                         if f.relation == relation}:
                found.append('%s is not at %s' % (a, p))
        tuples = set(self.tuples)
        for fact in instance.by_relation(relation):
            if any(fact.at(p.index) in where and where[fact.at(p.index)] == p
                   for p in self.positions):
                if tuple(fact.at(i) for i in indices) not in tuples:
                    found.append('%s reuses part of a tuple' % (fact,))
        return found


class GlobalEnvelope(OrderedDict):
    """FactClassKey -> Envelope, with pairwise disjoint domains"""

    def get_envelope(self, key):
        try:
            return self[key]
        except KeyError:
            raise InternalError('fact class %s of %s has no envelope'
                                % (key.exported, key.view))

    def unsafe(self):
        return [e for e in self.values() if not e.safe]

    def min_remaining(self):
        return min((e.remaining() for e in self.unsafe()), default=None)

    def problems(self, instance, fds):
        found = []
        seen = {}
        for envelope in self.values():
            for a in envelope.domain:
                if seen.setdefault(a, envelope.key) != envelope.key:
                    found.append('%s is in two envelopes' % a)
            found.extend(envelope.problems(instance, fds))
        return found


def creation_chain(chase, element):
    """Chase facts leading from the base to the element, in order"""
    chain = []
    while chase.is_null(element):
        chain.append(chase.creating_fact(element))
        element = chase.parent(element)
    return chain[::-1]


def fact_class_keys(chase, k, fds, schema, max_keys=MAX_KEYS):
    """Achieved fact classes with a representative exported element.

    Chase elements are explored breadth first, one per view of depth k,
    which determines the views of their children.
    """
    depth = max(k, 1)
    found = OrderedDict()
    queue = deque(element_order(chase.base))
    seen = {chase.view(a, depth) for a in queue}
    while queue:
        x = queue.popleft()
        for target, _ in chase.wants(x):
            key = FactClassKey(target, chase.view(x, depth))
            if key not in found and non_dangerous(target, fds, schema):
                found[key] = x
            for y in chase.child_fact(x, target).args:
                view = chase.view(y, depth)
                if view not in seen:
                    seen.add(view)
                    queue.append(y)
                    if len(seen) > max_keys:
                        raise ResourceError(
                            'more than %d element views at depth %d'
                            % (max_keys, depth))
    return found


EnvelopeBuild = namedtuple('EnvelopeBuild',
                           ['base_facts', 'facts', 'cov', 'envelope'])


def build_envelope(chase, key, representative, fds, schema, K, tag,
                   copies, rng=None):
    """Disjoint copies of the chase part achieving an unsafe class, glued
    through a dense interpretation over its non-dangerous positions.

    `copies` supplies copy numbers. Returns the copied base facts, the
    other new facts, cov on the new elements and the envelope.
    """
    exported = key.exported
    achiever = chase.child_fact(representative, exported)
    chain = creation_chain(chase, representative)
    outside = non_dangerous(exported, fds, schema)
    indices = [p.index for p in outside]
    dense, _ = dense_interpretation(exported.relation, indices, fds, K,
                                    prefix='~d%d.' % tag)
    chosen = cover(dense)
    chosen_set = set(chosen)
    rest = [f for f in dense.sorted_facts() if f not in chosen_set]
    if rng is not None:
        rng.shuffle(rest)
    base_facts, facts, cov = [], [], {}
    for fact in chosen:
        number = copies()
        rename = {}

        def renamed(a):
            if a not in rename:
                rename[a] = '%s%d.%s' % (COPY_PREFIX, number, a)
                cov[rename[a]] = a
            return rename[a]

        for f in chase.base.sorted_facts():
            base_facts.append(Fact(f.relation, [renamed(a) for a in f.args]))
        for f in chain:
            facts.append(Fact(f.relation, [renamed(a) for a in f.args]))
        dense_at = dict(zip(indices, fact.args))
        args = []
        for i, a in enumerate(achiever.args, start=1):
            if i in dense_at:
                args.append(dense_at[i])
                cov[dense_at[i]] = a
            else:
                args.append(renamed(a))
        facts.append(Fact(exported.relation, args))
    tuples = [f.args for f in chosen] + [f.args for f in rest]
    envelope = Envelope(key, outside, tuples, safe=False,
                        used=[f.args for f in chosen])
    return EnvelopeBuild(base_facts, facts, cov, envelope)


def relation_saturation(chase, max_rounds=None):
    """Smallest chase prefix where every relation reachable through the
    UIDs has a fact"""
    reachable = set(chase.base.relations())
    changed = True
    while changed:
        changed = False
        for uid in chase.uids:
            if (uid.source.relation in reachable and
                    uid.target.relation not in reachable):
                reachable.add(uid.target.relation)
                changed = True
    limit = len(chase.schema.names()) + 1 if max_rounds is None \
        else max_rounds
    rounds = 0
    prefix = chase.prefix(0)
    while not reachable <= prefix.instance.relations() and rounds < limit:
        rounds += 1
        prefix = chase.prefix(rounds)
    return prefix


def saturate(base, deps, k, level=ENVELOPE, K=2, rng=None, schema=None,
             max_keys=MAX_KEYS):
    """First aligned superinstance of the construction and its envelope.

    relation: a chase prefix reaching every reachable relation.
    fact: the base with one achiever and its creation chain per fact class,
    each class with a singleton envelope.
    envelope: as fact, but unsafe classes get disjoint copies glued by a
    dense interpretation, leaving at least K tuples per element unused.
    """
    if level not in LEVELS:
        raise InternalError('unknown saturation level %s' % level)
    chase = LazyChase(base, deps.uids, schema)
    if level == RELATION:
        J = AlignedSuperinstance(chase, k, base)
        for fact in relation_saturation(chase).facts:
            J.add(fact, {a: a for a in fact.args})
        return J, None
    schema = chase.schema
    fds = deps.fds
    keys = fact_class_keys(chase, k, fds, schema, max_keys)
    envelope = GlobalEnvelope()
    base_facts, facts, cov = list(base.sorted_facts()), [], {}
    counter = iter(range(1, 1 << 30))
    tag = 0
    for key, x in keys.items():
        achiever = chase.child_fact(x, key.exported)
        outside = non_dangerous(key.exported, fds, schema)
        if level == FACT or is_safe(key.exported, fds, schema):
            for fact in creation_chain(chase, x) + [achiever]:
                facts.append(fact)
                cov.update((a, a) for a in fact.args)
            envelope[key] = Envelope(
                key, outside, [tuple(achiever.at(p.index) for p in outside)],
                safe=is_safe(key.exported, fds, schema))
            continue
        tag += 1
        built = build_envelope(chase, key, x, fds, schema, K, tag,
                               lambda: next(counter), rng)
        base_facts.extend(built.base_facts)
        facts.extend(built.facts)
        cov.update(built.cov)
        envelope[key] = built.envelope
    all_base = Instance(base_facts)
    J = AlignedSuperinstance(chase, k, all_base,
                             {a: cov.get(a, a) for a in all_base.domain})
    for fact in facts:
        J.add(fact, {a: cov.get(a, a) for a in fact.args})
    return J, envelope
