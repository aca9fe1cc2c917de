"""Blowing up short cycles with products by groups of large girth.

A finite model that is k-sound for acyclic queries can still satisfy
cyclic queries the chase does not. Taking its product with a group whose
Cayley graph has no short cycles, each non-base fact twisted by its own
generators, removes those cycles while preserving the dependencies, as
long as overlapping facts are collapsed consistently (cautiousness).

Two group strategies are available. `girth` certifies that no reduced
word over all the labels shorter than the girth is the identity.
`cycles` only asks this of the words read along the closed walks of the
labelled instance, which are the words a short cycle of the product
projects to; it finds groups of a much smaller order.
"""
import itertools
import math
from collections import OrderedDict, defaultdict, deque
from dataclasses import dataclass, field

from fcqa.builder.completion import complete_acq_universal
from fcqa.builder.steps import record_json
from fcqa.chase import infer_schema
from fcqa.closure import finite_closure
from fcqa.errors import InternalError, ResourceError, UsageError
from fcqa.model import Fact, Instance
from fcqa.oracle import verify_k_sound, verify_model
from fcqa.qa import fd_violations, uid_violations
from fcqa.simulation import simeq_classes, quotient
from fcqa.utils import make_rng, natural_key

INDIVIDUAL_PREFIX = '~I.'
GROUP_SEPARATOR = '~g'
MAX_GROUP_ORDER = 5000
MAX_WORDS = 200000
TRIALS = 20
MAX_DEGREE = 16
MAX_CYCLIC = 64
CYCLES = 'cycles'
GIRTH = 'girth'
GROUPS = [CYCLES, GIRTH]


def identity(n):
    return tuple(range(n))


def compose(p, q):
    """p . q, applying q first"""
    return tuple(p[q[i]] for i in range(len(p)))


def inverse(p):
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def rotation(n, shift):
    return tuple((i + shift) % n for i in range(n))


def order(p):
    """Least m > 0 with p^m the identity"""
    seen = set()
    result = 1
    for start in range(len(p)):
        length = 0
        i = start
        while i not in seen:
            seen.add(i)
            i = p[i]
            length += 1
        if length:
            result = result * length // math.gcd(result, length)
    return result


def individualize(instance):
    """Instance with a private unary fact for each element, and the names
    of the relations added"""
    if any(r.startswith(INDIVIDUAL_PREFIX) for r in instance.relations()):
        raise UsageError('the instance is already individualizing')
    added = {}
    for a in instance.domain:
        added[INDIVIDUAL_PREFIX + a] = Fact(INDIVIDUAL_PREFIX + a, [a])
    return instance.union(added.values()), set(added)


def strip_individualizing(instance):
    return Instance(f for f in instance.facts
                    if not f.relation.startswith(INDIVIDUAL_PREFIX))


def fact_labels(instance, base):
    """Labels (fact, i) for the positions of every non-base fact"""
    return [(fact, i) for fact in instance.sorted_facts() if fact not in base
            for i in range(1, fact.arity + 1)]


@dataclass
class AcyclicGroup:
    """Permutation group generated by one permutation per label.

    girth_certified is the girth the group was checked for: over all
    reduced words for the girth strategy, over the closed-walk words of
    an instance for the cycles strategy, `cycles` counting them.
    """
    degree: int
    generators: dict
    girth_certified: int = 0
    elements: list = field(default_factory=list)
    strategy: str = GIRTH
    cycles: int = 0

    @property
    def identity(self):
        return identity(self.degree)

    def __len__(self):
        return len(self.elements)

    def index(self):
        return {g: i for i, g in enumerate(self.elements)}

    def value(self, word):
        """Group element of a word of (label, +1 or -1) letters"""
        result = self.identity
        for label, sign in word:
            p = self.generators[label]
            result = compose(result, p if sign > 0 else inverse(p))
        return result

    def separates(self, words):
        """No word evaluates to the identity"""
        unit = self.identity
        return all(self.value(w) != unit for w in words)


def cyclic_group(order, labels, assignment=None):
    """Z/order with each label acting as a rotation, by 1 unless the
    assignment says otherwise"""
    assignment = assignment or {}
    return AcyclicGroup(order, OrderedDict(
        (label, rotation(order, assignment.get(label, 1)))
        for label in labels))


def _reduced_words(generators, length):
    """Values of the reduced words of length <= length, with repetitions"""
    letters = []
    for label, p in generators.items():
        letters.append(((label, 1), p))
        letters.append(((label, -1), inverse(p)))
    n = len(next(iter(generators.values())))
    values = [identity(n)]
    frontier = [(None, identity(n))]
    for _ in range(length):
        following = []
        for last, value in frontier:
            for letter, p in letters:
                if last is not None and letter[0] == last[0] and \
                        letter[1] == -last[1]:
                    continue
                word = compose(value, p)
                values.append(word)
                following.append((letter, word))
        frontier = following
    return values


def ball_size(generators, length):
    """Number of reduced words of length <= length"""
    m = 2 * generators
    return 1 + sum(m * (m - 1) ** (j - 1) for j in range(1, length + 1))


def verify_girth(group, girth):
    """Distinct reduced words up to half the girth give distinct values"""
    if not group.generators:
        return True
    values = _reduced_words(group.generators, girth // 2)
    return len(values) == len(set(values))


def _random_permutation(degree, least_order, rng, attempts=TRIALS):
    p = identity(degree)
    for _ in range(attempts):
        shuffled = list(range(degree))
        rng.shuffle(shuffled)
        p = tuple(shuffled)
        if order(p) >= least_order:
            break
    return p


def acyclic_group(labels, girth, rng, max_words=MAX_WORDS, trials=TRIALS,
                  max_degree=MAX_DEGREE):
    """Group generated by the labels with no relation shorter than girth.

    The search starts at the least degree whose symmetric group is large
    enough for the reduced words of half the girth not to collide by
    chance, with generators of order at least the girth.
    """
    labels = list(labels)
    if not labels:
        raise UsageError('acyclic group over no label')
    if girth < 3:
        raise UsageError('girth %d, expected >= 3' % girth)
    half = girth // 2
    if len(labels) == 1:
        group = cyclic_group(2 * half + 1, labels)
        group.girth_certified = girth
        return group
    words = ball_size(len(labels), half)
    if words > max_words:
        raise ResourceError('%d reduced words to certify, the limit is %d'
                            % (words, max_words))
    degree = 3
    while math.factorial(degree) < 2 * words * words:
        degree += 1
    while degree <= max_degree:
        for _ in range(trials):
            generators = OrderedDict(
                (label, _random_permutation(degree, girth, rng))
                for label in labels)
            group = AcyclicGroup(degree, generators)
            if verify_girth(group, girth):
                group.girth_certified = girth
                return group
        degree += 1
    raise ResourceError('no certified generators up to degree %d'
                        % max_degree)


def _reduce(word, letters):
    word = list(word)
    for label, sign in letters:
        if word and word[-1] == (label, -sign):
            word.pop()
        else:
            word.append((label, sign))
    return tuple(word)


def closed_walk_words(instance, base, length):
    """Freely reduced label words of the closed walks through at most
    `length` facts, leaving out those that reduce to nothing.

    Crossing a fact F from position i to position j reads the letters
    (F, i)^-1 (F, j); facts of the base read nothing.
    """
    steps = defaultdict(list)
    for fact in instance.sorted_facts():
        untwisted = fact in base
        for (i, a), (j, b) in itertools.permutations(
                enumerate(fact.args, start=1), 2):
            letters = () if untwisted else (((fact, i), -1), ((fact, j), 1))
            steps[a].append((b, letters))
    found = OrderedDict()

    def walk(start, at, word, left):
        for target, letters in steps[at]:
            reduced = _reduce(word, letters)
            if target == start and reduced:
                found[reduced] = True
            if left > 1:
                walk(start, target, reduced, left - 1)

    for start in sorted(steps, key=natural_key):
        walk(start, start, (), length)
    return list(found)


def _balanced(word):
    """Every label occurs as often inverted as not, so that every abelian
    group sends the word to the identity"""
    total = defaultdict(int)
    for label, sign in word:
        total[label] += sign
    return not any(total.values())


def cycle_group(labels, words, girth, rng, max_order=MAX_GROUP_ORDER,
                trials=TRIALS, max_degree=MAX_DEGREE):
    """Smallest group found that sends none of the words to the identity.

    Tries the trivial group, then cyclic groups with random shifts, then
    random permutation groups of growing degree within max_order.
    """
    labels = list(labels)
    words = list(words)
    if not words:
        group = cyclic_group(1, labels)
    else:
        group = None
    abelian = not any(_balanced(w) for w in words)
    for n in range(2, min(max_order, MAX_CYCLIC) + 1):
        if group is not None or not abelian:
            break
        for _ in range(trials):
            candidate = cyclic_group(n, labels, {
                label: rng.randrange(n) for label in labels})
            if candidate.separates(words):
                group = candidate
                break
    degree = 3
    while group is None and degree <= max_degree:
        for _ in range(trials):
            candidate = AcyclicGroup(degree, OrderedDict(
                (label, _random_permutation(degree, 2, rng))
                for label in labels))
            if not candidate.separates(words):
                continue
            try:
                enumerate_group(candidate, max_order)
            except ResourceError:
                continue
            group = candidate
            break
        degree += 1
    if group is None:
        raise ResourceError('no group of order at most %d separates the %d '
                            'short cycles' % (max_order, len(words)))
    group.strategy = CYCLES
    group.girth_certified = girth
    group.cycles = len(words)
    return group


def verify_cycles(group, instance, base, girth):
    """Independent check of a cycles group against the instance"""
    return group.separates(closed_walk_words(instance, base, girth // 2))


def enumerate_group(group, max_order=MAX_GROUP_ORDER):
    """All elements, breadth first from the identity"""
    start = group.identity
    elements = [start]
    seen = {start}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for p in group.generators.values():
            h = compose(g, p)
            if h not in seen:
                seen.add(h)
                elements.append(h)
                queue.append(h)
                if len(elements) > max_order:
                    raise ResourceError('group order exceeds %d' % max_order)
    group.elements = elements
    return elements


def _pair_name(a, i):
    return a if i == 0 else '%s%s%d' % (a, GROUP_SEPARATOR, i)


def mixed_product(instance, base, mapping, group):
    """Product of the instance by the group preserving the base, twisting
    each other fact F by the labels of its image under mapping.

    Returns the product and the map sending each product element to the
    instance element it copies. The identity copy keeps the names.
    """
    if not group.elements:
        enumerate_group(group)
    for a in base.domain:
        if mapping.get(a, a) != a:
            raise UsageError('mapping moves base element %s' % a)
    index = group.index()
    origin = {}
    facts = []

    def name(a, g):
        out = _pair_name(a, index[g])
        origin[out] = a
        return out

    for fact in instance.sorted_facts():
        image = Fact(fact.relation, [mapping.get(a, a) for a in fact.args])
        if fact in base:
            for g in group.elements:
                facts.append(Fact(fact.relation,
                                  [name(a, g) for a in fact.args]))
            continue
        if image in base:
            raise UsageError('%s is mapped into the base' % (fact,))
        twists = [group.generators[(image, i)]
                  for i in range(1, fact.arity + 1)]
        for g in group.elements:
            facts.append(Fact(fact.relation,
                              [name(a, compose(g, t))
                               for a, t in zip(fact.args, twists)]))
    return Instance(facts), origin


def simple_product(instance, base, group):
    return mixed_product(instance, base, {}, group)


def check_cautious(instance, base, mapping):
    """Overlapping facts are both in the base or have the same image"""
    for relation, facts in instance.by_relation().items():
        for f, g in itertools.combinations(facts, 2):
            if not any(a == b for a, b in zip(f.args, g.args)):
                continue
            if f in base and g in base:
                continue
            if any(mapping.get(a, a) != mapping.get(b, b)
                   for a, b in zip(f.args, g.args)):
                return False
    return True


def cautious_quotient(instance, base, k):
    """Quotient by ~=_k, with the base elements kept apart"""
    blocks = []
    for block in simeq_classes(instance, k):
        rest = frozenset(a for a in block if a not in base.domain)
        if rest:
            blocks.append(rest)
        blocks.extend(frozenset([a]) for a in sorted(block & base.domain,
                                                     key=natural_key))
    return quotient(instance, blocks)


def _group_for(folded, base, girth, strategy, rng, max_order):
    labels = fact_labels(folded, base)
    if not labels:
        group = AcyclicGroup(1, OrderedDict(), girth, strategy=strategy)
    elif strategy == GIRTH:
        group = acyclic_group(labels, girth, rng)
    else:
        words = closed_walk_words(folded, base, girth // 2)
        group = cycle_group(labels, words, girth, rng, max_order)
    enumerate_group(group, max_order)
    if strategy == GIRTH:
        verified = verify_girth(group, girth)
    else:
        verified = verify_cycles(group, folded, base, girth)
    if not verified:
        raise InternalError('the %s group fails its re-verification'
                            % strategy)
    return group, labels


def _group_certificate(group, labels):
    return OrderedDict([
        ('strategy', group.strategy), ('girth', group.girth_certified),
        ('degree', group.degree), ('order', len(group)),
        ('labels', len(labels)), ('cycles', group.cycles)])


def _simulation_certificate(J):
    return OrderedDict([('k', J.k), ('elements', len(J.cov)),
                        ('failures', J.certificate().failures())])


def build_universal_model(base, deps, k, seed=0, max_group_order=None,
                          retries=None, debug=False, skip_if_sound=False,
                          girth=None, max_keys=None, schema=None,
                          group=CYCLES):
    """Finite superinstance of base satisfying deps, k-sound for all CQs.

    The completion at k' = k * (arity + 1) of the individualized base is
    folded by ~=_k', then multiplied by a group of girth 2k+1 unless told
    otherwise. With skip_if_sound, the completion at k is audited against
    every CQ of at most k atoms first, and returned as is when it passes.
    schema is inferred from base when not given. Returns the model and a
    certificate dict.
    """
    if k < 1:
        raise UsageError('k must be at least 1, got %d' % k)
    if group not in GROUPS:
        raise UsageError('unknown group strategy %s' % group)
    girth = 2 * k + 1 if girth is None else girth
    if girth < 2 * k + 1:
        raise UsageError('girth %d is below 2k+1 = %d' % (girth, 2 * k + 1))
    closed = finite_closure(deps)
    violated = fd_violations(base, closed.fds)
    if violated:
        raise UsageError('the instance violates %s, every query is certain'
                         % (violated[0][0],))
    schema = schema or infer_schema(base, closed.uids)
    options = {'seed': seed, 'debug': debug}
    if retries is not None:
        options['retries'] = retries
    if max_keys is not None:
        options['max_keys'] = max_keys
    max_order = max_group_order or MAX_GROUP_ORDER
    individual, added = individualize(base)
    individual_schema = schema.extend({name: 1 for name in added})
    certificate = OrderedDict([
        ('k', k), ('seed', seed),
        ('closure', sorted(str(d) for d in
                           list(closed.uids) + list(closed.fds)))])
    if skip_if_sound:
        first = complete_acq_universal(individual, closed, k,
                                       schema=individual_schema, **options)
        model = strip_individualizing(first.instance)
        if _passes_audit(model, base, closed, k, schema):
            certificate.update([
                ('blowup', 'skipped'), ('k_inflated', k),
                ('steps', len(first.log)), ('density', first.density),
                ('simulation', _simulation_certificate(first.J)),
                ('cautious', check_cautious(first.instance, first.J.base,
                                            {})),
                ('group', _group_certificate(
                    AcyclicGroup(1, OrderedDict(), girth, [identity(1)],
                                 strategy='none'), [])),
                ('audit', True),
                ('log', [record_json(r) for r in first.log])])
            return model, certificate
    inflated = k * (max(individual_schema.max_arity, 1) + 1)
    second = complete_acq_universal(individual, closed, inflated,
                                    schema=individual_schema, **options)
    J = second.J
    base_part = J.base
    folded, mapping = cautious_quotient(J.instance, base_part, inflated)
    cautious = check_cautious(J.instance, base_part, mapping)
    if not cautious:
        raise InternalError('the completion is not cautious for its '
                            'quotient')
    chosen, labels = _group_for(folded, base_part, girth, group,
                                make_rng(seed, 'group'), max_order)
    product, _ = mixed_product(J.instance, base_part, mapping, chosen)
    model = strip_individualizing(product)
    if fd_violations(model, closed.fds):
        raise InternalError('the product violates %s'
                            % (fd_violations(model, closed.fds)[0][0],))
    if uid_violations(model, closed.uids):
        raise InternalError('the product violates %s'
                            % (uid_violations(model, closed.uids)[0][0],))
    certificate.update([
        ('blowup', 'mixed'), ('k_inflated', inflated),
        ('steps', len(second.log)), ('density', second.density),
        ('simulation', _simulation_certificate(J)),
        ('cautious', cautious),
        ('group', _group_certificate(chosen, labels))])
    if debug:
        certificate['audit'] = _passes_audit(model, base, closed, k, schema)
        if not certificate['audit']:
            raise InternalError('the product is not %d-sound' % k)
    certificate['log'] = [record_json(r) for r in second.log]
    return model, certificate


def _passes_audit(model, base, deps, k, schema):
    return (verify_model(model, deps).ok and
            verify_k_sound(model, base, deps, k, schema=schema).ok)
