"""Random problems for the property suites and `fcqa gen`"""
import itertools
import string

from fcqa.closure import finite_closure
from fcqa.errors import UsageError
from fcqa.model import (CQ, FD, UID, Atom, DependencySet, Fact, Instance,
                        Schema, Var)
from fcqa.qa import fd_violations
from fcqa.textio import Problem

RELATION_NAMES = 'RSTUVW'


def random_schema(rng, relations, max_arity):
    if not 1 <= relations <= len(RELATION_NAMES):
        raise UsageError('between 1 and %d relations, got %d'
                         % (len(RELATION_NAMES), relations))
    return Schema({name: rng.randint(1, max_arity)
                   for name in RELATION_NAMES[:relations]})


def random_dependencies(rng, schema, uid_density, fd_density):
    positions = schema.positions()
    uids = [UID(p, q) for p, q in itertools.permutations(positions, 2)
            if rng.random() < uid_density]
    fds = []
    for name in schema.names():
        indices = range(1, schema.arity(name) + 1)
        for p, q in itertools.permutations(indices, 2):
            if rng.random() < fd_density:
                fds.append(FD(name, [p], q))
        if schema.arity(name) >= 3:
            for lhs in itertools.combinations(indices, 2):
                rest = [i for i in indices if i not in lhs]
                if rng.random() < fd_density / 2:
                    fds.append(FD(name, lhs, rng.choice(rest)))
    return DependencySet(uids, fds)


def random_instance(rng, schema, facts, fds=()):
    """Up to `facts` facts over a small domain, skipping FD violations"""
    domain = list(string.ascii_lowercase[:max(2, facts + 1)])
    chosen = Instance()
    for _ in range(facts):
        name = rng.choice(schema.names())
        fact = Fact(name, [rng.choice(domain)
                           for _ in range(schema.arity(name))])
        grown = chosen.union([fact])
        if not fd_violations(grown, fds):
            chosen = grown
    return chosen


def random_query(rng, schema, atoms):
    """Connected Boolean query: each atom reuses a variable of the earlier
    ones"""
    names = []
    built = []
    for n in range(atoms):
        relation = rng.choice(schema.names())
        terms = []
        for i in range(schema.arity(relation)):
            if names and (i == 0 and n > 0 or rng.random() < 0.5):
                terms.append(Var(rng.choice(names)))
            else:
                names.append('x%d' % len(names))
                terms.append(Var(names[-1]))
        built.append(Atom(relation, terms))
    return CQ(built)


def random_problem(rng, relations=2, max_arity=2, facts=3, uid_density=0.3,
                   fd_density=0.2, query_atoms=2, closed=True):
    schema = random_schema(rng, relations, max_arity)
    deps = random_dependencies(rng, schema, uid_density, fd_density)
    if closed:
        deps = finite_closure(deps)
    instance = random_instance(rng, schema, facts, deps.fds)
    queries = [random_query(rng, schema, query_atoms)] if query_atoms else []
    return Problem(schema, deps, instance, queries)
