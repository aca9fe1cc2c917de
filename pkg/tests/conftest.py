import os

import pytest

from fcqa.closure import finite_closure
from fcqa.model import FD, UID, DependencySet, Fact, Instance, Schema
from fcqa.textio import read_problem

DATA = os.path.join(os.path.dirname(__file__), 'data')


def data_path(name):
    return os.path.join(DATA, name)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run the random corpora at full size")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def corpus_size(request):
    """Number of random problems of a property suite"""
    def size(full, reduced):
        return full if request.config.getoption("--runslow") else reduced
    return size


def facts(*specs):
    """facts('R a b', 'S c') -> Instance"""
    return Instance(Fact(s.split()[0], s.split()[1:]) for s in specs)


def uid(source, target):
    """uid('R2', 'S1') -> UID(R[2] <= S[1])"""
    return UID((source[0], int(source[1:])), (target[0], int(target[1:])))


def reversible(*pairs):
    found = []
    for source, target in pairs:
        found.append(uid(source, target))
        found.append(uid(target, source))
    return found


def both_ways(relation, p, q):
    return [FD(relation, [p], q), FD(relation, [q], p)]


def triangle_dependencies():
    fds = []
    for name in 'RSTU':
        fds += both_ways(name, 1, 2)
    return DependencySet(reversible(('R2', 'S1'), ('S2', 'T1'),
                                    ('T2', 'R1')), fds)


BINARY = Schema({'R': 2, 'S': 2, 'T': 2, 'U': 2})


@pytest.fixture
def fixture_a():
    base = facts('R a b', 'U b c', 'S c d', 'T d e', 'S g f', 'R g g',
                 'T h g')
    return base, triangle_dependencies(), BINARY


@pytest.fixture
def fixture_b():
    return facts('R a b'), triangle_dependencies(), BINARY


@pytest.fixture
def fixture_c():
    deps = DependencySet(
        [uid('R1', 'R2'), uid('S2', 'S3'), uid('R3', 'S1')],
        [FD('R', [1], 2), FD('S', [2], 3), FD('R', [3], 1),
         FD('S', [3], 1)])
    return deps, Schema({'R': 3, 'S': 3})


@pytest.fixture
def fixture_d():
    deps = DependencySet(reversible(('R2', 'S1'), ('S2', 'R1')))
    return facts('R a b'), deps, Schema({'R': 2, 'S': 2})


@pytest.fixture
def fixture_e():
    deps = DependencySet([uid('S1', 'R1'), uid('T1', 'R1')],
                         [FD('R', [2, 3], 1)])
    return facts('S a', 'T z'), deps, Schema({'S': 1, 'T': 1, 'R': 3})


@pytest.fixture
def fixture_f():
    fds = [FD('R', [1], 5), FD('R', [2], 4), FD('R', [2], 5),
           FD('R', [3], 4), FD('R', [3], 5)]
    return fds, Schema({'R': 5})


@pytest.fixture
def fixture_g():
    return read_problem(data_path('fixture_g.dsl'))


@pytest.fixture
def four_ary():
    deps = DependencySet(reversible(('R1', 'R2'), ('R3', 'R4')),
                         both_ways('R', 1, 2) + both_ways('R', 3, 4))
    return facts('R a b c d'), finite_closure(deps), Schema({'R': 4})
