from __future__ import absolute_import
import argparse
import fcqa
from fcqa.blowup import CYCLES, GROUPS
from fcqa.oracle import ACYCLIC, ALL, DFS, Z3
from fcqa.printer import valid_color_name
from sys import stdout

STAGES = ['weak', 'full']


def valid_k(value):
    ival = int(value)
    if ival < 1:
        raise argparse.ArgumentTypeError("k must be a number >= 1")
    return ival


def valid_girth(value):
    ival = int(value)
    if ival < 3:
        raise argparse.ArgumentTypeError("Girth must be a number >= 3")
    return ival


def valid_depth(value):
    ival = int(value)
    if ival < 0:
        raise argparse.ArgumentTypeError("Depth must be a number >= 0")
    return ival


def valid_positive(value):
    ival = int(value)
    if ival < 1:
        raise argparse.ArgumentTypeError("Must be a number >= 1")
    return ival


def valid_density(value):
    fval = float(value)
    if not 0.0 <= fval <= 1.0:
        raise argparse.ArgumentTypeError(
                "Density must be between 0 and 1: %s" % value)
    return fval


def get_problem_parser():
    problem_parser = argparse.ArgumentParser(add_help=False)
    problem_parser.add_argument(
        "problem", type=str, help="Problem file (rel/uid/fd/facts/queries)")
    return problem_parser


def get_k_parser():
    k_parser = argparse.ArgumentParser(add_help=False)
    k_parser.add_argument(
        "-k", "--k", default=2, type=valid_k,
        help="Query size the result is sound for")
    return k_parser


def get_seed_parser():
    seed_parser = argparse.ArgumentParser(add_help=False)
    seed_parser.add_argument(
        "--seed", default=0, type=int,
        help="Seed of every randomized stage (FCQA_SEED overrides it)")
    return seed_parser


def get_output_parser(parents=[]):
    output_parser = argparse.ArgumentParser(add_help=False, parents=parents)
    output_parser.add_argument(
        "--json", action="store_true", default=False,
        help="Print a JSON report instead of text")
    output_parser.add_argument(
        "--color_true", default="brightgreen", type=valid_color_name,
        help="Color for true answers")
    output_parser.add_argument(
        "--color_false", default="brightyellow", type=valid_color_name,
        help="Color for false answers")
    return output_parser


def get_depth_parser():
    depth_parser = argparse.ArgumentParser(add_help=False)
    depth_parser.add_argument(
        "--chase-depth", type=valid_depth, default=None, dest="chase_depth",
        help="Chase depth, default |q|*(|positions|+1)")
    depth_parser.add_argument(
        "--stability-check", action="store_true", default=False,
        dest="stability_check",
        help="Fail when the answer changes at twice the depth")
    return depth_parser


def get_build_parser():
    build_parser = argparse.ArgumentParser(add_help=False)
    build_parser.add_argument(
        "--out", default=None, type=str,
        help="Write the model to this file instead of stdout")
    build_parser.add_argument(
        "--retries", default=6, type=valid_positive,
        help="Attempts, doubling the envelope density after each")
    build_parser.add_argument(
        "--max-achievers", default=5000, type=valid_positive,
        dest="max_achievers",
        help="Cap on the chase elements explored for fact classes")
    return build_parser


def fill_gen_parser(gen):
    gen.add_argument('-r', '--relations', type=valid_positive, default=2,
                     help='Number of relations')
    gen.add_argument('-a', '--max-arity', type=valid_positive, default=2,
                     dest='max_arity', help='Largest relation arity')
    gen.add_argument('-f', '--facts', type=valid_depth, default=3,
                     help='Facts to draw (FD violations are dropped)')
    gen.add_argument('-u', '--uid-density', type=valid_density, default=0.3,
                     dest='uid_density', help='Probability of each UID')
    gen.add_argument('-d', '--fd-density', type=valid_density, default=0.2,
                     dest='fd_density', help='Probability of each FD')
    gen.add_argument('-q', '--query-atoms', type=valid_depth, default=2,
                     dest='query_atoms', help='Atoms of the query')
    gen.add_argument('--open', action='store_false', dest='closed',
                     default=True,
                     help='Do not close the dependencies under finite '
                     'implication')
    return gen


def get_argument_parser():
    parser = argparse.ArgumentParser(
        prog='fcqa',
        description='Finite and unrestricted query answering under '
        'unary inclusion and functional dependencies',
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        fromfile_prefix_chars="@")

    parser.add_argument(
        "--version", action="version", version="%%(prog)s %s (%s)" %
        (fcqa.__version__, fcqa.__author__))
    parser.add_argument(
        "--nocolor", action="store_false",
        default=stdout.isatty(), dest="color",
        help="Enable/Disable all color output")
    parser.add_argument(
        "--stack_trace", action="store_true", default=False,
        help="Print stack trace using traceback.print_exc()")
    parser.add_argument(
        "--debug", action="store_true", default=False,
        help="Run the builder validators after every step and print "
        "stage summaries")

    problem_parser = get_problem_parser()
    k_parser = get_k_parser()
    seed_parser = get_seed_parser()
    output_parser = get_output_parser()
    depth_parser = get_depth_parser()
    build_parser = get_build_parser()

    sub = parser.add_subparsers(
        help="Invoking a subcommand with --help prints subcommand usage.",
        dest="command")

    closure = sub.add_parser(
        "closure", aliases=['c'], parents=[problem_parser, output_parser])
    closure.add_argument(
        "--trace", action="store_true", default=False,
        help="Show the rule applications")

    chase = sub.add_parser(
        "chase", aliases=['ch'], parents=[problem_parser, output_parser])
    chase.add_argument(
        "-n", "--rounds", type=valid_depth, default=3,
        help="Chase rounds")
    chase.add_argument(
        "--dot", default=None, type=str,
        help="Write the chase forest in DOT to this file, - for stdout")

    simeq = sub.add_parser(
        "simeq", aliases=['s'],
        parents=[problem_parser, k_parser, output_parser])
    simeq.add_argument(
        "-n", "--rounds", type=valid_depth, default=None,
        help="Chase rounds, default k+2")

    factclasses = sub.add_parser(
        "factclasses", aliases=['fc'],
        parents=[problem_parser, k_parser, output_parser])
    factclasses.add_argument(
        "-n", "--rounds", type=valid_depth, default=None,
        help="Classify this chase prefix instead of growing it until the "
        "classes are stable")
    factclasses.add_argument(
        "--max-rounds", type=valid_positive, default=12, dest="max_rounds",
        help="Give up when the classes do not stabilize by then")

    sub.add_parser(
        "uqa", aliases=['u'],
        parents=[problem_parser, output_parser, depth_parser])
    fqa = sub.add_parser(
        "fqa", aliases=['f'],
        parents=[problem_parser, output_parser, depth_parser])
    fqa.add_argument(
        "--search-domain", type=valid_positive, default=None,
        dest="search_domain",
        help="Also look for a finite counterexample with this many "
        "elements")
    fqa.add_argument(
        "--backend", choices=[DFS, Z3], default=DFS,
        help="Counterexample search backend")
    fqa.add_argument(
        "--max-nodes", type=valid_positive, default=200000,
        dest="max_nodes", help="Cap on the search nodes")

    build_acq = sub.add_parser(
        "build-acq", aliases=['ba'],
        parents=[problem_parser, k_parser, seed_parser, output_parser,
                 build_parser])
    build_acq.add_argument(
        "--stage", choices=STAGES, default='full',
        help="weak: finite model only, full: k-sound for acyclic queries")
    build_acq.add_argument(
        "--log", default=None, type=str,
        help="Write the construction log as JSON lines")

    build = sub.add_parser(
        "build", aliases=['b'],
        parents=[problem_parser, k_parser, seed_parser, output_parser,
                 build_parser])
    build.add_argument(
        "--cert", default=None, type=str,
        help="Write the certificate as JSON")
    build.add_argument(
        "--max-group-order", type=valid_positive, default=5000,
        dest="max_group_order", help="Cap on the order of the group")
    build.add_argument(
        "--girth", type=valid_girth, default=None,
        help="Girth of the group, default 2k+1")
    build.add_argument(
        "--group", choices=GROUPS, default=CYCLES,
        help="How the group is certified: against the short cycles of the "
        "folded model, or by its girth over all labels")
    build.add_argument(
        "--skip-if-sound", action="store_true", dest="skip_if_sound",
        default=False,
        help="Return the first model without the product stage when it "
        "already passes the audit")

    verify = sub.add_parser(
        "verify", aliases=['v'], parents=[k_parser, output_parser])
    verify.add_argument("model", type=str, help="Model file (facts)")
    verify.add_argument(
        "--against", required=True, type=str,
        help="Problem file the model was built for")
    verify.add_argument(
        "--queries", choices=[ALL, ACYCLIC], default=ALL,
        help="Queries to audit")

    gen = sub.add_parser(
        "gen", aliases=['g'], parents=[seed_parser, output_parser])
    fill_gen_parser(gen)
    return parser
