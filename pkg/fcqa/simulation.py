"""Bounded simulations between instances and against the chase.

(I, a) <=_n (I', b) holds when every fact of I where a occurs at some
position has a counterpart in I' with b at the same position, whose other
elements are related by <=_{n-1}. Every pair is related at n = 0.
"""
from collections import OrderedDict, namedtuple

from fcqa.closure import non_dangerous
from fcqa.model import Fact, Instance
from fcqa.utils import natural_key

FactClass = namedtuple('FactClass', ['exported', 'classes'])


def _signature(instance, element):
    return {(f.relation, i) for f, i in instance.occurrences(element)}


def simulation_relation(source, target, n):
    """All pairs (a, b) with (source, a) <=_n (target, b)"""
    pairs = {(a, b) for a in source.domain for b in target.domain}
    if n <= 0:
        return frozenset(pairs)
    signatures = {b: _signature(target, b) for b in target.domain}
    pairs = {(a, b) for a, b in pairs
             if _signature(source, a) <= signatures[b]}
    for _ in range(n - 1):
        refined = {(a, b) for a, b in pairs
                   if _step_holds(source, target, a, b, pairs)}
        if refined == pairs:
            break
        pairs = refined
    return frozenset(pairs)


def _step_holds(source, target, a, b, related):
    for fact, index in source.occurrences(a):
        if not any(other.relation == fact.relation and
                   all((x, y) in related for x, y in zip(fact.args,
                                                          other.args))
                   for other, j in target.occurrences(b) if j == index):
            return False
    return True


def bounded_sim_leq(source, a, target, b, n):
    return _LocalSimulation(source, target).leq(a, b, n)


class _LocalSimulation(object):
    """Memoized <=_n between two finite instances, explored from one pair"""

    def __init__(self, source, target):
        self.source = source
        self.target = target
        self.memo = {}

    def leq(self, a, b, n):
        if n <= 0:
            return True
        key = (a, b, n)
        if key not in self.memo:
            self.memo[key] = all(
                any(other.relation == fact.relation and j == index and
                    all(self.leq(x, y, n - 1)
                        for x, y in zip(fact.args, other.args))
                    for other, j in self.target.occurrences(b))
                for fact, index in self.source.occurrences(a))
        return self.memo[key]


def simeq_classes(instance, k):
    """Partition of the domain into ~=_k classes, in a stable order"""
    related = simulation_relation(instance, instance, k)
    blocks = []
    for a in sorted(instance.domain, key=natural_key):
        for block in blocks:
            r = block[0]
            if (a, r) in related and (r, a) in related:
                block.append(a)
                break
        else:
            blocks.append([a])
    return [frozenset(b) for b in blocks]


def class_index(partition):
    return {a: i for i, block in enumerate(partition) for a in block}


def quotient(instance, partition, names=None):
    """Quotient instance and the surjective map onto it.

    Each block is named after `names[i]` when given, else after its least
    member.
    """
    mapping = {}
    for i, block in enumerate(partition):
        name = (names[i] if names is not None
                else min(block, key=natural_key))
        for a in block:
            mapping[a] = name
    missing = instance.domain - set(mapping)
    if missing:
        raise ValueError('partition misses %s'
                         % ', '.join(sorted(missing, key=natural_key)))
    return instance.rename(mapping), mapping


def is_homomorphism(source, target, mapping):
    return all(Fact(f.relation, [mapping[a] for a in f.args]) in target
               for f in source.facts)


def achieved_fact_classes(prefix, k, ufds):
    """Achieved fact classes of the chase prefix, each with its achiever.

    Only facts far enough from the frontier are classified, so that their
    elements have complete radius-k neighbourhoods in the prefix.
    """
    partition = simeq_classes(prefix.instance, k)
    index = class_index(partition)
    limit = prefix.rounds - k - 1
    found = OrderedDict()
    for fact in prefix.non_base_facts():
        if prefix.depth[fact] > limit:
            continue
        exported = prefix.created_by[fact].exported
        if not non_dangerous(exported, ufds, prefix.schema):
            continue
        key = FactClass(exported, tuple(index[a] for a in fact.args))
        found.setdefault(key, fact)
    return found


class ChaseSimulator(object):
    """<=_n and ~=_n against a LazyChase, memoized on element views"""

    def __init__(self, chase):
        self.chase = chase
        self.memo = {}
        self.inner = {}

    def leq(self, instance, a, b, n):
        """(instance, a) <=_n (chase, b)"""
        if n <= 0:
            return True
        key = (id(instance), a, self.chase.view(b, n), n)
        if key not in self.memo:
            self.memo[key] = all(
                self._has_counterpart(
                    fact, index, b,
                    lambda x, y: self.leq(instance, x, y, n - 1))
                for fact, index in instance.occurrences(a))
        return self.memo[key]

    def chase_leq(self, x, y, n):
        """(chase, x) <=_n (chase, y)"""
        if n <= 0:
            return True
        vx, vy = self.chase.view(x, n), self.chase.view(y, n)
        if vx == vy:
            return True
        key = (vx, vy, n)
        if key not in self.inner:
            self.inner[key] = all(
                self._has_counterpart(
                    fact, i, y, lambda u, v: self.chase_leq(u, v, n - 1))
                for fact in self.chase.facts_of(x)
                for i, arg in enumerate(fact.args, start=1) if arg == x)
        return self.inner[key]

    def simeq(self, x, y, n):
        return self.chase_leq(x, y, n) and self.chase_leq(y, x, n)

    def _has_counterpart(self, fact, index, b, related):
        for other in self.chase.facts_of(b):
            if (other.relation == fact.relation and
                    other.at(index) == b and
                    all(related(u, v) for u, v in zip(fact.args, other.args))):
                return True
        return False


def chase_leq(instance, a, chase, b, n, simulator=None):
    simulator = simulator or ChaseSimulator(chase)
    return simulator.leq(instance, a, b, n)


def chase_simeq(chase, x, y, n, simulator=None):
    simulator = simulator or ChaseSimulator(chase)
    return simulator.simeq(x, y, n)


class SimCertificate(namedtuple('SimCertificate',
                                ['k', 'cov', 'source', 'target'])):
    """cov is claimed to be a k-bounded simulation from source to target.

    The target is an Instance or a LazyChase.
    """
    __slots__ = ()

    def failures(self, simulator=None):
        if isinstance(self.target, Instance):
            local = _LocalSimulation(self.source, self.target)
            return sorted(a for a in self.source.domain
                          if a not in self.cov or
                          not local.leq(a, self.cov[a], self.k))
        simulator = simulator or ChaseSimulator(self.target)
        return sorted(a for a in self.source.domain
                      if a not in self.cov or
                      not simulator.leq(self.source, a, self.cov[a], self.k))


def check_certificate(certificate, simulator=None):
    return not certificate.failures(simulator)


def is_essential(chase, element, n, uids=None):
    """The last n UIDs creating the element are reversible in uids"""
    if n <= 0:
        return True
    uids = chase.uids if uids is None else uids
    last = chase.last_uids(element, n)
    return len(last) == n and all(
        uid in uids and uid.reverse() in uids for uid in last)


def stable_fact_classes(chase, k, ufds, max_rounds):
    """Smallest prefix after which one more round adds no fact class.

    Returns (rounds, classes); the criterion is practical, not a bound.
    """
    previous = None
    rounds = k + 2
    while True:
        classes = achieved_fact_classes(chase.prefix(rounds), k, ufds)
        if previous is not None and len(classes) == len(previous):
            return rounds - 1, previous
        if rounds >= max_rounds:
            return rounds, classes
        previous = classes
        rounds += 1
