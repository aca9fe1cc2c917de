__program__ = 'fcqa'
__version__ = 'v0.1.0'
__author__ = 'The fcqa developers'
from fcqa.model import (CQ, FD, UID, Atom, Const, DependencySet,  # noqa F401
                        Fact, Instance, Position, Schema, Var)
from fcqa.closure import finite_closure  # noqa F401
from fcqa.qa import certain_answers, decide_fqa, decide_uqa  # noqa F401
from fcqa.textio import parse_problem, read_problem  # noqa F401
