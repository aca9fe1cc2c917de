import pytest

from conftest import data_path, facts
from fcqa.errors import ParseError
from fcqa.model import CQ, FD, UID, Atom, Const, Fact, Var
from fcqa.textio import (format_element, format_fact, parse_problem,
                         read_problem, report_json, serialize_instance,
                         serialize_problem)


class TestParse:

    def setup_class(self):
        self.problem = parse_problem('''
            rel R/2 .   # comment
            rel S/3 .
            uid R[2] <= S[1] .
            fd S[1,2] -> S[3] .
            R(a, "b c") .
            S(1, a, a) .
            ? :- R(x, "a"), S(x, Y, y) .
            ?(x) :- R(x, y) .
        ''')

    def test_schema(self):
        assert self.problem.schema.relations == {'R': 2, 'S': 3}

    def test_dependencies(self):
        assert self.problem.deps.uids == {UID(('R', 2), ('S', 1))}
        assert self.problem.deps.fds == {FD('S', [1, 2], 3)}

    def test_facts(self):
        assert self.problem.instance.facts == {
            Fact('R', ['a', 'b c']), Fact('S', ['1', 'a', 'a'])}

    def test_terms(self):
        boolean, unary = self.problem.queries
        assert boolean.is_boolean
        assert boolean.atoms[0].terms == (Var('x'), Const('a'))
        assert boolean.atoms[1].terms == (Var('x'), Const('Y'), Var('y'))
        assert unary.free_vars == ('x',)


@pytest.mark.parametrize('text,line', [
    ('rel R/2 .\nR(a) .\n', 2),
    ('rel R/2 .\nuid R[3] <= R[1] .\n', 2),
    ('rel R/2 .\nfd R[1] -> S[2] .\n', 2),
    ('rel R/2 .\nR(a, b) .\nR(a b) .\n', 3),
])
def test_errors_carry_the_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_problem(text)
    assert info.value.line == line


def test_undeclared_relation():
    with pytest.raises(ParseError):
        parse_problem('R(a, b) .\n')


def test_bad_arity_file():
    with pytest.raises(ParseError):
        read_problem(data_path('bad_arity.dsl'))


def test_format_element_quotes_reserved_names():
    assert format_element('a') == 'a'
    assert format_element('~f1') == '"~f1"'
    assert format_element('rel') == '"rel"'
    assert format_fact(Fact('R', ['a', '~n1'])) == 'R(a, "~n1")'


def test_printed_query_keeps_quotes_in_constants():
    tricky = Const('say "hi" \\ bye')
    query = CQ([Atom('R', [Var('x'), tricky])])
    again = parse_problem('rel R/2 .\n%s\n' % query).queries[0]
    assert again.atoms[0].terms == (Var('x'), tricky)


def test_serialized_problem_parses_back():
    problem = read_problem(data_path('fixture_e.dsl'))
    again = parse_problem(serialize_problem(problem))
    assert again.schema == problem.schema
    assert again.deps == problem.deps
    assert again.instance == problem.instance


def test_serialized_instance_is_sorted():
    text = serialize_instance(facts('S b', 'R a b'))
    assert text == 'R(a, b) .\nS(b) .\n'


def test_report_fields():
    report = report_json(True, {'x': 'a'}, {'depth': 3}, query='q')
    assert report == {'answer': True, 'witness': {'x': 'a'},
                      'stats': {'depth': 3}, 'query': 'q'}
