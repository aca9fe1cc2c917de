"""Brute-force checks the constructions are audited with.

Everything here is deliberately naive: dependency satisfaction by pairwise
comparison, CQs enumerated up to isomorphism, soundness by deciding every
matched query on the chase, and finite counterexamples by exhaustive
search.
"""
import itertools
from collections import OrderedDict, namedtuple

from fcqa.chase import LazyChase, infer_schema
from fcqa.closure import transitively_closed
from fcqa.errors import ResourceError, UsageError
from fcqa.model import CQ, Atom, Fact, Instance, Var
from fcqa.qa import (connected_components, default_depth, fd_violations,
                     find_match, is_acyclic, match_chase, uid_violations)
from fcqa.utils import FreshNames, natural_key

ALL = 'all'
ACYCLIC = 'acyclic'
DFS = 'dfs'
Z3 = 'z3'
MAX_NODES = 200000
SEARCH_PREFIX = '~m'


class AuditReport(object):
    """Counts of checked items per property and the failures found"""

    def __init__(self):
        self.checked = OrderedDict()
        self.failures = []

    def __repr__(self):
        return 'AuditReport(%s, %d failures)' % (dict(self.checked),
                                                 len(self.failures))

    @property
    def ok(self):
        return not self.failures

    def count(self, prop, n=1):
        self.checked[prop] = self.checked.get(prop, 0) + n

    def fail(self, prop, counterexample):
        self.failures.append((prop, counterexample))

    def merge(self, other):
        for prop, n in other.checked.items():
            self.count(prop, n)
        self.failures.extend(other.failures)
        return self

    def to_json(self):
        return {'checked': dict(self.checked),
                'failures': [{'property': p, 'counterexample': str(c)}
                             for p, c in self.failures]}


def verify_model(instance, deps):
    report = AuditReport()
    report.count('fd', len(deps.fds))
    report.count('uid', len(deps.uids))
    for fd, first, second in fd_violations(instance, deps.fds):
        report.fail('fd', '%s: %s, %s' % (fd, first, second))
    for uid, a in uid_violations(instance, deps.uids):
        report.fail('uid', '%s: %s' % (uid, a))
    return report


def canonical_form(atoms):
    """Least relabeling of the atoms over all their orderings"""
    best = None
    for order in itertools.permutations(atoms):
        names = {}
        form = []
        for relation, terms in order:
            form.append((relation, tuple(names.setdefault(t, len(names))
                                         for t in terms)))
        form = tuple(form)
        if best is None or form < best:
            best = form
    return best


def _query_of(form):
    return CQ([Atom(relation, [Var('x%d' % i) for i in terms])
               for relation, terms in form])


def _labelings(slots):
    """Restricted growth strings: variable patterns up to renaming"""
    def grow(prefix, top):
        if len(prefix) == slots:
            yield tuple(prefix)
            return
        for v in range(top + 2):
            for rest in grow(prefix + [v], max(top, v)):
                yield rest
    return grow([], -1)


def enumerate_cqs(schema, k, kind=ALL):
    """Connected Boolean constant-free CQs of at most k atoms, one per
    isomorphism class, smaller queries first"""
    if k < 1:
        raise UsageError('k must be at least 1, got %d' % k)
    if kind not in (ALL, ACYCLIC):
        raise UsageError('unknown query class %s' % kind)
    names = schema.names()
    for size in range(1, k + 1):
        seen = set()
        for relations in itertools.combinations_with_replacement(names,
                                                                 size):
            arities = [schema.arity(r) for r in relations]
            for pattern in _labelings(sum(arities)):
                atoms, start = [], 0
                for relation, arity in zip(relations, arities):
                    atoms.append((relation, pattern[start:start + arity]))
                    start += arity
                form = canonical_form(atoms)
                if form in seen:
                    continue
                seen.add(form)
                query = _query_of(form)
                if len(connected_components(query)) != 1:
                    continue
                if kind == ACYCLIC and not is_acyclic(query):
                    continue
                yield query


def verify_k_sound(instance, base, deps, k, kind=ALL, schema=None):
    """Every enumerated query true in the instance is certain for base"""
    report = AuditReport()
    deps = transitively_closed(deps)
    schema = schema or infer_schema(base, deps.uids).extend(
        infer_schema(instance).relations)
    vacuous = bool(fd_violations(base, deps.fds))
    chase = LazyChase(base, deps.uids, schema)
    for query in enumerate_cqs(schema, k, kind):
        report.count('query')
        match = find_match(query, instance)
        if match is None or vacuous:
            continue
        report.count('matched')
        if match_chase(chase, query,
                       default_depth(query, schema)) is None:
            shown = ', '.join('%s=%s' % kv for kv in sorted(match.items()))
            report.fail('unsound', '%s with %s' % (query, shown))
    return report


SearchResult = namedtuple('SearchResult', ['counterexample', 'complete',
                                           'nodes'])


def _repairs(instance, uid, element, arity, domain):
    target = uid.target
    others = [i for i in range(1, arity + 1) if i != target.index]
    for values in itertools.product(domain, repeat=len(others)):
        args = dict(zip(others, values))
        args[target.index] = element
        yield Fact(target.relation, [args[i] for i in range(1, arity + 1)])


def _dfs(base, deps, query, max_domain, schema, max_nodes):
    fresh = FreshNames(SEARCH_PREFIX, base.domain)
    spare = [fresh() for _ in range(max(0, max_domain - len(base.domain)))]
    nodes = [0]

    def search(instance):
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise ResourceError('model search visited %d nodes' % max_nodes)
        if find_match(query, instance) is not None:
            return None
        violated = uid_violations(instance, deps.uids)
        if not violated:
            return instance
        uid, element = violated[0]
        used = sorted(instance.domain, key=natural_key)
        unused = [a for a in spare if a not in instance.domain]
        domain = used + unused[:schema.arity(uid.target.relation) - 1]
        for fact in _repairs(instance, uid, element,
                             schema.arity(uid.target.relation), domain):
            grown = instance.union([fact])
            if fd_violations(grown, deps.fds):
                continue
            found = search(grown)
            if found is not None:
                return found
        return None

    try:
        return SearchResult(search(base), True, nodes[0])
    except ResourceError:
        return SearchResult(None, False, nodes[0])


def _z3(base, deps, query, max_domain, schema):
    try:
        import z3
    except ImportError:
        raise UsageError('the z3 backend needs z3-solver, install '
                         'fcqa[z3]')
    fresh = FreshNames(SEARCH_PREFIX, base.domain)
    domain = sorted(base.domain, key=natural_key)
    domain += [fresh() for _ in range(max(0, max_domain - len(domain)))]
    holds = {}
    for name in schema.names():
        for args in itertools.product(domain, repeat=schema.arity(name)):
            fact = Fact(name, args)
            holds[fact] = z3.Bool(str(fact))
    solver = z3.Solver()
    for fact in base.facts:
        solver.add(holds[fact])
    for uid in deps.uids:
        for fact, var in holds.items():
            if fact.relation != uid.source.relation:
                continue
            element = fact.at(uid.source.index)
            solver.add(z3.Implies(var, z3.Or([
                w for f, w in holds.items()
                if f.relation == uid.target.relation and
                f.at(uid.target.index) == element])))
    for fd in deps.fds:
        lhs = sorted(fd.lhs)
        facts = [f for f in holds if f.relation == fd.relation]
        for f, g in itertools.combinations(facts, 2):
            if all(f.at(i) == g.at(i) for i in lhs) and \
                    f.at(fd.rhs) != g.at(fd.rhs):
                solver.add(z3.Not(z3.And(holds[f], holds[g])))
    names = query.variables()
    for values in itertools.product(domain, repeat=len(names)):
        assignment = dict(zip(names, values))
        atoms = [Fact(a.relation, [assignment[t.name] if isinstance(t, Var)
                                   else t.value for t in a.terms])
                 for a in query.atoms]
        if all(f in holds for f in atoms):
            solver.add(z3.Not(z3.And([holds[f] for f in atoms])))
    if solver.check() != z3.sat:
        return SearchResult(None, True, 1)
    model = solver.model()
    found = Instance(f for f, var in holds.items()
                     if z3.is_true(model.eval(var)))
    return SearchResult(found, True, 1)


def bounded_model_search(base, deps, query, max_domain, backend=DFS,
                         max_nodes=MAX_NODES, schema=None):
    """Finite superinstance with at most max_domain elements satisfying
    deps where the Boolean query is false.

    complete is False when the node cap stopped the search early.
    """
    if max_domain < len(base.domain):
        raise UsageError('max_domain %d is below the %d base elements'
                         % (max_domain, len(base.domain)))
    if not query.is_boolean:
        raise UsageError('model search needs a Boolean query')
    schema = schema or infer_schema(base, deps.uids)
    for atom in query.atoms:
        if atom.relation not in schema:
            schema = schema.extend({atom.relation: len(atom.terms)})
    if fd_violations(base, deps.fds):
        return SearchResult(None, True, 0)
    if backend == DFS:
        return _dfs(base, deps, query, max_domain, schema, max_nodes)
    if backend == Z3:
        return _z3(base, deps, query, max_domain, schema)
    raise UsageError('unknown search backend %s' % backend)
