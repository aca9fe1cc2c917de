"""Query analysis, homomorphism search and open-world query answering.

UQA is decided on the chase by the UIDs alone once the instance satisfies
the FDs; FQA is UQA over the finite closure of the dependencies.
"""
import itertools
from collections import deque, namedtuple

import networkx as nx

from fcqa.chase import LazyChase, element_order, infer_schema
from fcqa.closure import finite_closure, transitively_closed
from fcqa.errors import StabilityError, UsageError
from fcqa.model import CQ, Atom, Const, Fact, Instance, Var, \
    active_elements
from fcqa.utils import natural_key

CONSTANT_RELATION = '~P.'
CONSTANT_VARIABLE = '~x.'

QueryAnalysis = namedtuple('QueryAnalysis', ['connected_components',
                                             'is_acyclic', 'constant_rewrite'])

Answer = namedtuple('Answer', ['value', 'witness', 'depth', 'vacuous'])


def connected_components(query):
    """Subqueries whose atoms are linked through shared variables"""
    graph = nx.Graph()
    graph.add_nodes_from(range(len(query.atoms)))
    first = {}
    for i, atom in enumerate(query.atoms):
        for name in atom.variables():
            if name in first:
                graph.add_edge(first[name], i)
            else:
                first[name] = i
    found = []
    for block in sorted(nx.connected_components(graph), key=min):
        atoms = [query.atoms[i] for i in sorted(block)]
        names = {n for a in atoms for n in a.variables()}
        found.append(CQ(atoms, [v for v in query.free_vars if v in names]))
    return found


def incidence_multigraph(query):
    """Atoms and variables, one edge per occurrence of a variable"""
    graph = nx.MultiGraph()
    for i, atom in enumerate(query.atoms):
        graph.add_node(('atom', i))
        for name in atom.variables():
            graph.add_edge(('atom', i), ('var', name))
    return graph


def is_acyclic(query):
    """No Berge cycle: the incidence multigraph is a forest"""
    graph = incidence_multigraph(query)
    return (graph.number_of_edges() ==
            graph.number_of_nodes() - nx.number_connected_components(graph))


def constant_rewrite(query):
    """Query with each constant c replaced by a variable guarded by a
    private unary atom, and the facts to add for those atoms"""
    names = {}
    atoms = []
    for atom in query.atoms:
        terms = []
        for t in atom.terms:
            if isinstance(t, Const):
                names.setdefault(t.value, CONSTANT_VARIABLE + t.value)
                terms.append(Var(names[t.value]))
            else:
                terms.append(t)
        atoms.append(Atom(atom.relation, terms))
    for value, name in sorted(names.items()):
        atoms.append(Atom(CONSTANT_RELATION + value, [Var(name)]))
    facts = {Fact(CONSTANT_RELATION + value, [value]) for value in names}
    return CQ(atoms, query.free_vars), facts


def analyze_query(query):
    parts = connected_components(query)
    return QueryAnalysis(parts, [is_acyclic(p) for p in parts],
                         constant_rewrite(query))


def _candidates(instance, atom, assignment):
    """Facts that can match the atom under the partial assignment"""
    for i, t in enumerate(atom.terms, start=1):
        value = t.value if isinstance(t, Const) else assignment.get(t.name)
        if value is not None:
            return [f for f, j in instance.occurrences(value)
                    if j == i and f.relation == atom.relation]
    return instance.by_relation(atom.relation)


def _extend(atom, fact, assignment):
    if len(fact.args) != len(atom.terms):
        return None
    added = {}
    for t, value in zip(atom.terms, fact.args):
        if isinstance(t, Const):
            if t.value != value:
                return None
            continue
        bound = assignment.get(t.name, added.get(t.name))
        if bound is None:
            added[t.name] = value
        elif bound != value:
            return None
    return added


def find_match(query, instance, fixed=None):
    """Homomorphism from the atoms into the instance, or None.

    `fixed` pre-assigns variables. The atom with the fewest candidate facts
    is matched first at every level.
    """
    assignment = dict(fixed or {})

    def search(pending):
        if not pending:
            return True
        best, best_facts = None, None
        for atom in pending:
            facts = _candidates(instance, atom, assignment)
            if best is None or len(facts) < len(best_facts):
                best, best_facts = atom, facts
                if not facts:
                    return False
        rest = [a for a in pending if a is not best]
        for fact in best_facts:
            added = _extend(best, fact, assignment)
            if added is None:
                continue
            assignment.update(added)
            if search(rest):
                return True
            for name in added:
                del assignment[name]
        return False

    if search(list(query.atoms)):
        return assignment
    return None


def fd_violations(instance, fds):
    """(fd, first, second) for facts agreeing on the lhs but not the rhs"""
    found = []
    for fd in sorted(fds, key=lambda f: (f.relation, sorted(f.lhs), f.rhs)):
        seen = {}
        lhs = sorted(fd.lhs)
        for fact in instance.by_relation(fd.relation):
            key = tuple(fact.at(i) for i in lhs)
            other = seen.setdefault(key, fact)
            if other.at(fd.rhs) != fact.at(fd.rhs):
                found.append((fd, other, fact))
    return found


def uid_violations(instance, uids):
    """(uid, element) for elements missing at the target position"""
    return [(uid, a) for uid in sorted(uids)
            for a in sorted(active_elements(instance, uid), key=natural_key)]


def satisfies(instance, deps):
    return (not fd_violations(instance, deps.fds) and
            not uid_violations(instance, deps.uids))


def default_depth(query, schema):
    return len(query) * (len(schema.positions()) + 1)


def _ball(chase, center, radius, max_depth):
    """Chase facts of depth <= max_depth within radius atoms of center"""
    facts = set()
    distance = {center: 0}
    queue = deque([center])
    while queue:
        x = queue.popleft()
        if distance[x] >= radius:
            continue
        for fact in chase.facts_of(x, max_depth):
            facts.add(fact)
            for y in fact.args:
                if y not in distance:
                    distance[y] = distance[x] + 1
                    queue.append(y)
    return Instance(facts)


def _anchors(chase, size, max_depth):
    """Base elements, then one null per (view, depth) down to max_depth"""
    anchors = list(element_order(chase.base))
    seen = set()
    frontier = list(anchors)
    for _ in range(max_depth):
        following = []
        for x in frontier:
            for target, _ in chase.wants(x):
                for y in chase.child_fact(x, target).args:
                    if y == x:
                        continue
                    key = (chase.view(y, size + 1), chase.depth(y))
                    if key not in seen:
                        seen.add(key)
                        anchors.append(y)
                        following.append(y)
        frontier = following
    return anchors


def match_chase(chase, query, max_depth):
    """Match of a Boolean query in the chase truncated at max_depth"""
    witness = {}
    for part in connected_components(query):
        constants = part.constants()
        if constants:
            if constants[0] not in chase.base.domain:
                return None
            anchors = [constants[0]]
        else:
            anchors = _anchors(chase, len(part), max_depth)
        for x in anchors:
            found = find_match(part, _ball(chase, x, len(part), max_depth))
            if found is not None:
                witness.update(found)
                break
        else:
            return None
    return witness


def _check_query(query, schema):
    for atom in query.atoms:
        if atom.relation in schema and \
                schema.arity(atom.relation) != len(atom.terms):
            raise UsageError('atom %s does not match arity %d'
                             % (atom, schema.arity(atom.relation)))


def decide_uqa(instance, deps, query, depth=None, stability_check=False,
               schema=None):
    """Whether the Boolean query holds in every superinstance satisfying
    deps, finite or not"""
    if not query.is_boolean:
        raise UsageError('decide_uqa needs a Boolean query, use '
                         'certain_answers')
    deps = transitively_closed(deps)
    if fd_violations(instance, deps.fds):
        return Answer(True, None, 0, True)
    schema = schema or infer_schema(instance, deps.uids)
    _check_query(query, schema)
    depth = default_depth(query, schema) if depth is None else depth
    chase = LazyChase(instance, deps.uids, schema)
    witness = match_chase(chase, query, depth)
    if stability_check:
        again = match_chase(chase, query, 2 * depth)
        if (again is None) != (witness is None):
            raise StabilityError('answer changes between chase depth %d '
                                 'and %d' % (depth, 2 * depth))
    return Answer(witness is not None, witness, depth, False)


def decide_fqa(instance, deps, query, depth=None, stability_check=False,
               schema=None):
    """Whether the Boolean query holds in every finite superinstance
    satisfying deps"""
    return decide_uqa(instance, finite_closure(deps), query, depth,
                      stability_check, schema)


def certain_answers(instance, deps, query, finite=True, depth=None,
                    schema=None):
    """Sorted tuples over dom(instance) whose substitution is certain"""
    decide = decide_fqa if finite else decide_uqa
    if query.is_boolean:
        return [()] if decide(instance, deps, query, depth,
                              schema=schema).value else []
    found = []
    domain = sorted(instance.domain, key=natural_key)
    for values in itertools.product(domain, repeat=len(query.free_vars)):
        grounded = query.substitute(dict(zip(query.free_vars, values)))
        if decide(instance, deps, grounded, depth, schema=schema).value:
            found.append(values)
    return found
