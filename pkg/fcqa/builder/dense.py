"""Dense interpretations: many facts over few elements, FDs preserved.

The full construction works on a relation whose positions are the
non-empty subsets s of T = {1..D}. Each total function f: T -> {1..n}
gives one fact, whose value at s is f restricted to T \\ s. Every pair of
facts then overlaps on a set of positions with a unary key, so the
overlaps are tame and the FDs hold. The construction is transported to an
arbitrary relation through a minimum key of D positions.
"""
import itertools

from fcqa.closure import fd_attribute_closure
from fcqa.errors import UsageError
from fcqa.model import FD, Fact, Instance

DENSE_PREFIX = '~d'


def fd_projection(fds, relation, positions):
    """FDs inside the positions, with FDs leaving them turned into keys.

    Returned as FDs of the relation over the original indices.
    """
    positions = sorted(positions)
    inside = set(positions)
    found = set()
    for size in range(1, len(positions)):
        for lhs in itertools.combinations(positions, size):
            closure = fd_attribute_closure(fds, relation, lhs)
            if closure - inside:
                targets = inside - set(lhs)
            else:
                targets = (closure & inside) - set(lhs)
            for rhs in targets:
                found.add(FD(relation, lhs, rhs))
    return sorted(found, key=lambda fd: (sorted(fd.lhs), fd.rhs))


def _determines(fds, relation, p, q):
    return p == q or q in fd_attribute_closure(fds, relation, [p])


def min_key(fds, relation, positions):
    """Smallest set of positions such that every position is determined by
    one of them alone"""
    positions = sorted(positions)
    for size in range(1, len(positions) + 1):
        for key in itertools.combinations(positions, size):
            if all(any(_determines(fds, relation, k, p) for k in key)
                   for p in positions):
                return list(key)
    return positions


def is_tame(overlap, fds, relation, positions):
    """Empty, or every position outside the overlap escapes some position
    determining the whole overlap"""
    overlap = set(overlap)
    if not overlap:
        return True
    for p in positions:
        if p in overlap:
            continue
        if not any(all(_determines(fds, relation, q, s) for s in overlap) and
                   not _determines(fds, relation, q, p)
                   for q in positions):
            return False
    return True


def overlap(first, second, positions):
    return {p for j, p in enumerate(positions)
            if first.args[j] == second.args[j]}


def has_tame_overlaps(instance, fds, relation, positions):
    facts = instance.sorted_facts()
    return all(is_tame(overlap(f, g, positions), fds, relation, positions)
               for f, g in itertools.combinations(facts, 2))


def is_disjoint(instance):
    """Every element occurs at exactly one position"""
    seen = {}
    for fact in instance.facts:
        for j, a in enumerate(fact.args):
            if seen.setdefault(a, j) != j:
                return False
    return True


def full_subsets(D):
    """Positions of the full relation: non-empty subsets of 1..D"""
    return [frozenset(s) for size in range(1, D + 1)
            for s in itertools.combinations(range(1, D + 1), size)]


def full_fds(D, relation='Full'):
    """UFDs of the full relation: position s determines every superset"""
    subsets = full_subsets(D)
    return [FD(relation, [i + 1], j + 1)
            for i, s in enumerate(subsets) for j, t in enumerate(subsets)
            if s < t]


def _restrict(f, removed):
    return tuple((t, v) for t, v in enumerate(f, start=1)
                 if t not in removed)


def dense_full(D, n, relation='Full'):
    """Instance of the full relation with n^D facts"""
    if D < 1 or n < 1:
        raise UsageError('dense_full needs D >= 1 and n >= 1')
    subsets = full_subsets(D)
    facts = []
    for f in itertools.product(range(1, n + 1), repeat=D):
        facts.append(Fact(relation, [_element_name(_restrict(f, s))
                                     for s in subsets]))
    return Instance(facts)


def _element_name(partial):
    return DENSE_PREFIX + '{%s}' % ','.join('%d:%d' % tv for tv in partial)


def dense_size(D, n, mu):
    """(facts, elements) of the transported construction"""
    return n ** D, sum(n ** (D - len(m)) for m in mu)


def _transport(fds, relation, positions):
    key = min_key(fds, relation, positions)
    label = {k: t for t, k in enumerate(key, start=1)}
    mu = [frozenset(label[k] for k in key
                    if _determines(fds, relation, k, p))
          for p in positions]
    return key, mu


def dense_interpretation(relation, positions, fds, K, prefix=DENSE_PREFIX):
    """FD-satisfying instance over the positions with |facts| >= K * |dom|.

    Facts are over `relation` restricted to the sorted positions, elements
    are disjoint across positions. Returns (instance, N) with N = |dom|.
    """
    positions = sorted(positions)
    if not positions:
        raise UsageError('dense interpretation over no position')
    projected = fd_projection(fds, relation, positions)
    key, mu = _transport(projected, relation, positions)
    D = len(key)
    if D < 2:
        raise UsageError('%s[%d] is a unary key, no dense interpretation'
                         % (relation, key[0]))
    n = 2
    while True:
        facts, elements = dense_size(D, n, mu)
        if facts >= K * elements:
            break
        n += 1
    names = {}
    built = []
    for f in itertools.product(range(1, n + 1), repeat=D):
        args = []
        for j, (p, m) in enumerate(zip(positions, mu)):
            value = (p, _restrict(f, m))
            if value not in names:
                names[value] = '%s%d.%d' % (prefix, p, len(names) + 1)
            args.append(names[value])
        built.append(Fact(relation, args))
    instance = Instance(built)
    return instance, len(instance.domain)


def cover(instance):
    """Facts covering every element, greedily in sorted order"""
    chosen, seen = [], set()
    for fact in instance.sorted_facts():
        if not set(fact.args) <= seen:
            chosen.append(fact)
            seen |= set(fact.args)
    return chosen


def check_dense(instance, fds, relation, positions, K):
    """Problems with a dense interpretation, empty when it is sound"""
    positions = sorted(positions)
    projected = fd_projection(fds, relation, positions)
    problems = []
    if len(instance) < K * len(instance.domain):
        problems.append('%d facts for %d elements, factor %d not reached'
                        % (len(instance), len(instance.domain), K))
    if not is_disjoint(instance):
        problems.append('an element occurs at two positions')
    if not has_tame_overlaps(instance, projected, relation, positions):
        problems.append('some overlap is not tame')
    return problems
