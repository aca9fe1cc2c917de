import pytest

from conftest import facts, uid
from fcqa.errors import UsageError
from fcqa.model import CQ, FD, Atom, Const, DependencySet, Fact, Schema, \
    Var
from fcqa.qa import (CONSTANT_RELATION, analyze_query, certain_answers,
                     connected_components, constant_rewrite, decide_fqa,
                     decide_uqa, fd_violations, find_match, is_acyclic,
                     satisfies, uid_violations)
from fcqa.textio import parse_problem


def query(text):
    return parse_problem('rel R/2 .\nrel S/2 .\nrel T/2 .\n' + text
                         ).queries[0]


class TestAnalysis:

    def test_components(self):
        parts = connected_components(
            query('?(y) :- R(x, y), S(z, w), T(y, u) .'))
        assert [len(p) for p in parts] == [2, 1]
        assert parts[0].free_vars == ('y',)
        assert parts[1].is_boolean

    def test_acyclic(self):
        assert is_acyclic(query('? :- R(x, y), S(y, z) .'))
        assert not is_acyclic(query('? :- R(x, y), S(y, x) .'))
        assert not is_acyclic(query('? :- R(x, x) .'))
        assert is_acyclic(query('? :- R(x, "a"), S("a", x) .'))

    def test_constant_rewrite(self):
        rewritten, added = constant_rewrite(query('? :- R(x, "a") .'))
        guard = CONSTANT_RELATION + 'a'
        assert rewritten.atoms[-1].relation == guard
        assert rewritten.atoms[0].terms[1] == rewritten.atoms[-1].terms[0]
        assert rewritten.constants() == []
        assert added == {Fact(guard, ['a'])}

    def test_analyze(self):
        analysis = analyze_query(query('? :- R(x, y), S(y, x), T(z, z) .'))
        assert analysis.is_acyclic == [False, False]


class TestMatch:

    def setup_class(self):
        self.instance = facts('R a b', 'S b c', 'S b d')

    def test_match(self):
        found = find_match(query('? :- R(x, y), S(y, z) .'), self.instance)
        assert found['x'] == 'a' and found['y'] == 'b'
        assert found['z'] in ('c', 'd')

    def test_fixed(self):
        q = query('? :- R(x, y), S(y, z) .')
        assert find_match(q, self.instance, {'z': 'd'}) == {
            'x': 'a', 'y': 'b', 'z': 'd'}
        assert find_match(q, self.instance, {'x': 'b'}) is None

    def test_constants(self):
        assert find_match(query('? :- S("b", "c") .'), self.instance) == {}
        assert find_match(query('? :- S("c", x) .'), self.instance) is None


class TestViolations:

    def test_fd(self):
        instance = facts('R a b', 'R a c', 'R d d')
        fd = FD('R', [1], 2)
        assert fd_violations(instance, [fd]) == [
            (fd, Fact('R', ['a', 'b']), Fact('R', ['a', 'c']))]

    def test_uid(self):
        instance = facts('R a b', 'S b c')
        assert uid_violations(instance, [uid('R2', 'S1'),
                                         uid('R1', 'S1')]) == [
            (uid('R1', 'S1'), 'a')]
        assert not satisfies(instance, DependencySet([uid('R1', 'S1')]))
        assert satisfies(instance, DependencySet([uid('R2', 'S1')]))


class TestFixtureG:
    """The finite closure turns a false unrestricted answer into true"""

    def test_unrestricted(self, fixture_g):
        answer = decide_uqa(fixture_g.instance, fixture_g.deps,
                            fixture_g.queries[0], schema=fixture_g.schema)
        assert not answer.value and not answer.vacuous

    def test_finite(self, fixture_g):
        answer = decide_fqa(fixture_g.instance, fixture_g.deps,
                            fixture_g.queries[0], schema=fixture_g.schema,
                            stability_check=True)
        assert answer.value
        assert answer.witness['x'] not in fixture_g.instance.domain

    def test_certain_answers(self, fixture_g):
        q = CQ([Atom('R', [Var('x'), Var('y')])], ['y'])
        args = fixture_g.instance, fixture_g.deps, q
        assert certain_answers(*args, finite=False) == [('b',)]
        assert certain_answers(*args) == [('a',), ('b',)]
        assert certain_answers(fixture_g.instance, fixture_g.deps,
                               fixture_g.queries[0]) == [()]


def test_fixture_d_is_false_both_ways(fixture_d):
    base, deps, schema = fixture_d
    q = query('? :- R(x, y), S(y, x) .')
    assert not decide_uqa(base, deps, q, schema=schema).value
    assert not decide_fqa(base, deps, q, schema=schema).value


def test_chase_depth_bounds_the_match():
    deps = DependencySet([uid('R2', 'R1')])
    base = facts('R a b')
    q = query('? :- R(x, y), R(y, z), R(z, w) .')
    assert not decide_uqa(base, deps, q, depth=1).value
    assert decide_uqa(base, deps, q, depth=2).value


def test_fd_violation_is_vacuous():
    deps = DependencySet(fds=[FD('R', [1], 2)])
    answer = decide_uqa(facts('R a b', 'R a c'), deps,
                        query('? :- S(x, x) .'))
    assert answer.value and answer.vacuous


def test_unknown_constant_is_false():
    deps = DependencySet([uid('R2', 'R1')])
    assert not decide_uqa(facts('R a b'), deps,
                          query('? :- R("z", x) .')).value


def test_non_boolean_needs_certain_answers():
    with pytest.raises(UsageError):
        decide_uqa(facts('R a b'), DependencySet(), query('?(x) :- R(x, y) .'))


def test_arity_mismatch():
    q = CQ([Atom('R', [Var('x')])])
    with pytest.raises(UsageError):
        decide_uqa(facts('R a b'), DependencySet(), q, schema=Schema({'R': 2}))


def test_constant_term_type():
    assert query('? :- R(x, "a") .').atoms[0].terms[1] == Const('a')
