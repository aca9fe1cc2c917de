"""Reading and writing the problem language.

One statement per `.`-terminated line::

    rel R/2 .
    uid R[2] <= S[1] .
    fd R[1,2] -> R[3] .
    R(a, b) .
    ? :- R(x, "a"), S(x, y) .
    ?(x) :- R(x, y) .

In facts every token is a constant. In queries, identifiers starting with a
lowercase letter or an underscore are variables, while quoted strings,
numbers and capitalized identifiers are constants.
"""
import json
import re
from collections import namedtuple

from lark import Lark, Transformer
from lark.exceptions import LarkError, UnexpectedInput, VisitError

from fcqa.errors import ParseError, UsageError
from fcqa.model import (Atom, Const, CQ, DependencySet, FD, Fact, Instance,
                        Position, Schema, UID, Var, fd_key)

grammar = r"""
start: statement*

?statement: relation_decl
          | uid_decl
          | fd_decl
          | fact
          | query

relation_decl: "rel" IDENT "/" INT "."
uid_decl: "uid" position "<=" position "."
fd_decl: "fd" IDENT "[" index_list "]" "->" IDENT "[" INT "]" "."
index_list: INT ("," INT)*
position: IDENT "[" INT "]"

fact: IDENT "(" element ("," element)* ")" "."
element: IDENT | INT | ESCAPED_STRING

query: "?" head? ":-" atom ("," atom)* "."
head: "(" IDENT ("," IDENT)* ")"
atom: IDENT "(" term ("," term)* ")"
term: IDENT | INT | ESCAPED_STRING

IDENT: /[A-Za-z_][A-Za-z0-9_']*/
COMMENT: /#[^\n]*/

%import common.INT
%import common.ESCAPED_STRING
%import common.WS
%ignore WS
%ignore COMMENT
"""

KEYWORDS = frozenset(['rel', 'uid', 'fd'])
PLAIN_ELEMENT = re.compile(r"^(?:[A-Za-z_][A-Za-z0-9_']*|[0-9]+)$")

Problem = namedtuple('Problem', ['schema', 'deps', 'instance', 'queries'])
Statement = namedtuple('Statement', ['kind', 'value', 'line', 'column'])


def _unquote(token):
    return json.loads(str(token))


def _where(token):
    return getattr(token, 'line', None), getattr(token, 'column', None)


class ProblemTransformer(Transformer):
    """Turns the parse tree into located statements"""

    def start(self, statements):
        return statements

    def relation_decl(self, x):
        [name, arity] = x
        return Statement('rel', (str(name), int(arity)), *_where(name))

    def position(self, x):
        [name, index] = x
        return (Position(str(name), int(index)), name)

    def uid_decl(self, x):
        [(source, token), (target, _)] = x
        return Statement('uid', (source, target), *_where(token))

    def index_list(self, x):
        return [int(i) for i in x]

    def fd_decl(self, x):
        [name, lhs, rhs_name, rhs] = x
        return Statement('fd', (str(name), lhs, str(rhs_name), int(rhs)),
                         *_where(name))

    def element(self, x):
        [token] = x
        if token.type == 'ESCAPED_STRING':
            return _unquote(token)
        return str(token)

    def fact(self, x):
        [name, *args] = x
        return Statement('fact', Fact(str(name), args), *_where(name))

    def term(self, x):
        [token] = x
        if token.type == 'ESCAPED_STRING':
            return Const(_unquote(token))
        text = str(token)
        if token.type == 'INT' or text[0].isupper():
            return Const(text)
        return Var(text)

    def head(self, x):
        return [str(t) for t in x]

    def atom(self, x):
        [name, *terms] = x
        return (Atom(str(name), terms), name)

    def query(self, x):
        free_vars = []
        if x and isinstance(x[0], list):
            free_vars, x = x[0], x[1:]
        atoms = [a for a, _ in x]
        return Statement('query', (atoms, free_vars), *_where(x[0][1]))


parser = Lark(grammar, parser='lalr', propagate_positions=True)


def parse_problem(text):
    """Parse a problem, with line and column in every diagnostic"""
    try:
        tree = parser.parse(text)
    except UnexpectedInput as e:
        raise ParseError('syntax error\n' + e.get_context(text),
                         e.line, e.column, e.get_context(text))
    except LarkError as e:
        raise ParseError('syntax error: %s' % e)
    try:
        statements = ProblemTransformer().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, UsageError):
            raise ParseError(str(e.orig_exc))
        raise
    return build_problem(statements)


def build_problem(statements):
    relations = {}
    for s in statements:
        if s.kind != 'rel':
            continue
        name, arity = s.value
        if relations.get(name, arity) != arity:
            raise ParseError('relation %s redeclared with arity %d'
                             % (name, arity), s.line, s.column)
        relations[name] = arity
    try:
        schema = Schema(relations)
    except UsageError as e:
        raise ParseError(str(e))

    uids, fds, facts, queries = [], [], [], []
    for s in statements:
        try:
            if s.kind == 'uid':
                source, target = s.value
                schema.check_position(source)
                schema.check_position(target)
                uids.append(UID(source, target))
            elif s.kind == 'fd':
                name, lhs, rhs_name, rhs = s.value
                if rhs_name != name:
                    raise UsageError('FD relates %s to %s' % (name, rhs_name))
                fd = FD(name, lhs, rhs)
                for index in set(lhs) | {rhs}:
                    schema.check_position(Position(name, index))
                fds.append(fd)
            elif s.kind == 'fact':
                schema.check_fact(s.value)
                facts.append(s.value)
            elif s.kind == 'query':
                atoms, free_vars = s.value
                query = CQ(atoms, free_vars)
                query.check(schema)
                queries.append(query)
        except UsageError as e:
            raise ParseError(str(e), s.line, s.column)
    return Problem(schema, DependencySet(uids, fds), Instance(facts), queries)


def format_element(element):
    if PLAIN_ELEMENT.match(element) and element not in KEYWORDS:
        return element
    return json.dumps(element)


def format_fact(fact):
    return '%s(%s)' % (fact.relation,
                       ', '.join(format_element(a) for a in fact.args))


def serialize_instance(instance):
    return ''.join('%s .\n' % format_fact(f) for f in instance.sorted_facts())


def serialize_schema(schema):
    return ''.join('rel %s/%d .\n' % (name, schema.arity(name))
                   for name in schema.names())


def serialize_dependencies(deps):
    lines = ['%s .\n' % (uid,) for uid in sorted(deps.uids)]
    lines += ['%s .\n' % (fd,) for fd in sorted(deps.fds, key=fd_key)]
    return ''.join(lines)


def serialize_query(query):
    return '%s\n' % query


def serialize_problem(problem):
    parts = [serialize_schema(problem.schema),
             serialize_dependencies(problem.deps),
             serialize_instance(problem.instance),
             ''.join(serialize_query(q) for q in problem.queries)]
    return ''.join(p for p in parts if p)


def read_problem(path):
    with open(path, 'r') as fh:
        return parse_problem(fh.read())


def instance_json(instance):
    return [[f.relation] + list(f.args) for f in instance.sorted_facts()]


def report_json(answer, witness=None, stats=None, **extra):
    """Report with the fixed top-level fields answer, witness and stats"""
    report = {'answer': answer, 'witness': witness, 'stats': stats or {}}
    report.update(extra)
    return report