#!/usr/bin/env python3

# ** The MIT License **
#
# Copyright (c) 2026 The fcqa developers
#
# Permission is hereby granted, free of charge, to any person
# obtaining a copy of this software and associated documentation
# files (the "Software"), to deal in the Software without restriction,
# including without limitation the rights to use, copy, modify,
# merge, publish, distribute, sublicense, and/or sell copies of
# the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
# The above copyright notice and this permission notice shall be
# included in all copies or substantial portions of the Software.
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND,
# EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES
# OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND
# NONINFRINGEMENT. IN NO EVENT SHALL THE AUTHORS OR COPYRIGHT HOLDERS
# BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN
# ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF
# OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS
# IN THE SOFTWARE.

# These are standard libraries and should never fail
import sys
import json
import signal
from traceback import print_exc

# Required 3rd party libraries
try:
    import networkx  # noqa: F401
    import lark  # noqa: F401
except ImportError as exc:  # pragma: no cover
    print("ERROR: Missing module - %s" % exc.args[0])
    sys.exit(1)


# Package local imports

from fcqa.argparsers import get_argument_parser
from fcqa.blowup import CYCLES, build_universal_model
from fcqa.builder.completion import complete_acq_universal, weak_completion
from fcqa.builder.steps import record_json
from fcqa.chase import LazyChase, chase_to_dot, truncated_chase, \
    verify_unique_witness
from fcqa.closure import DerivationTrace, added_dependencies, finite_closure, \
    transitively_closed
from fcqa.errors import EXIT_FALSE, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE, \
    FcqaError, InternalError, UsageError
from fcqa.gen import random_problem
from fcqa.oracle import bounded_model_search, verify_k_sound, verify_model
from fcqa.printer import Printer
from fcqa.qa import certain_answers, decide_fqa, decide_uqa
from fcqa.simulation import achieved_fact_classes, simeq_classes, \
    stable_fact_classes
from fcqa.textio import format_element, format_fact, instance_json, \
    read_problem, report_json, serialize_dependencies, serialize_instance, \
    serialize_problem, serialize_schema
from fcqa.utils import make_rng, natural_key, resolve_seed


def _block(block):
    return sorted(block, key=natural_key)


def _shown(witness):
    return ', '.join('%s=%s' % (v, format_element(a))
                     for v, a in sorted(witness.items()))


class FcqaInterface:
    """One method per subcommand; each returns the exit code"""

    def __init__(self, printer, json_mode=False, debug=False):
        self.printer = printer
        self.json_mode = json_mode
        self.debug = debug

    def emit(self, report, text):
        if self.json_mode:
            self.printer.json_msg(report)
        else:
            self.printer.msg(text)

    def write(self, path, text):
        with open(path, 'w') as fh:
            fh.write(text)

    def closure(self, problem, show_trace=False):
        trace = DerivationTrace() if show_trace else None
        closed = finite_closure(problem.deps, trace)
        uids, fds = added_dependencies(problem.deps, closed)
        added = [str(d) for d in uids] + [str(d) for d in fds]
        report = report_json(
            True, result=[str(d) for d in closed.sorted_uids()] +
            [str(d) for d in closed.sorted_fds()],
            stats={'uids': len(closed.uids), 'fds': len(closed.fds),
                   'added': len(added)},
            added=added)
        text = serialize_dependencies(closed)
        if trace is not None:
            report['trace'] = trace.lines()
            text += ''.join('# %s\n' % line for line in trace.lines())
        self.emit(report, text)
        return EXIT_OK

    def chase(self, problem, rounds, dot=None):
        prefix = truncated_chase(problem.instance,
                                 transitively_closed(problem.deps).uids,
                                 rounds, problem.schema)
        if dot == '-':
            self.printer.msg(chase_to_dot(prefix))
            return EXIT_OK
        if dot is not None:
            self.write(dot, chase_to_dot(prefix))
        report = report_json(
            True, result=instance_json(prefix.instance),
            stats={'facts': len(prefix), 'rounds': prefix.rounds,
                   'elements': len(prefix.instance.domain)},
            unique_witness=verify_unique_witness(prefix))
        self.emit(report, serialize_instance(prefix.instance))
        return EXIT_OK

    def simeq(self, problem, k, rounds=None):
        rounds = k + 2 if rounds is None else rounds
        prefix = truncated_chase(problem.instance,
                                 transitively_closed(problem.deps).uids,
                                 rounds, problem.schema)
        partition = [_block(b) for b in simeq_classes(prefix.instance, k)]
        report = report_json(True, result=partition,
                             stats={'classes': len(partition),
                                    'rounds': prefix.rounds, 'k': k})
        self.emit(report, ''.join(
            '{%s}\n' % ', '.join(format_element(a) for a in block)
            for block in partition))
        return EXIT_OK

    def factclasses(self, problem, k, rounds=None, max_rounds=12):
        closed = finite_closure(problem.deps)
        chase = LazyChase(problem.instance, closed.uids, problem.schema)
        if rounds is None:
            rounds, classes = stable_fact_classes(chase, k, closed.ufds,
                                                  max_rounds)
        else:
            classes = achieved_fact_classes(chase.prefix(rounds), k,
                                            closed.ufds)
        rows = [{'exported': str(key.exported), 'classes': list(key.classes),
                 'achiever': format_fact(fact)}
                for key, fact in classes.items()]
        report = report_json(True, result=rows,
                             stats={'classes': len(rows),
                                    'rounds': rounds, 'k': k})
        self.emit(report, ''.join(
            '%s %s: %s\n' % (r['exported'], tuple(r['classes']),
                             r['achiever']) for r in rows))
        return EXIT_OK

    def answer(self, problem, finite, depth=None, stability_check=False,
               search_domain=None, backend=None, max_nodes=None):
        if not problem.queries:
            raise UsageError('the problem has no query')
        decide = decide_fqa if finite else decide_uqa
        entries = []
        for query in problem.queries:
            if not query.is_boolean:
                found = certain_answers(problem.instance, problem.deps, query,
                                        finite, depth, problem.schema)
                entries.append({'query': str(query), 'answer': bool(found),
                                'answers': [list(t) for t in found]})
                continue
            answer = decide(problem.instance, problem.deps, query, depth,
                            stability_check, problem.schema)
            entry = {'query': str(query), 'answer': answer.value,
                     'witness': answer.witness, 'depth': answer.depth,
                     'vacuous': answer.vacuous}
            if finite and search_domain is not None and answer.value:
                entry['search'] = self.search(problem, query, search_domain,
                                              backend, max_nodes)
            entries.append(entry)
        value = all(e['answer'] for e in entries)
        if self.json_mode:
            first = entries[0]
            report = report_json(value, first.get('witness'),
                                 stats={'depth': first.get('depth'),
                                        'queries': len(entries)},
                                 queries=entries)
            self.printer.json_msg(report)
        else:
            for entry in entries:
                self.printer.msg(entry['query'] + ' ')
                self.printer.answer_msg(entry['answer'])
                if entry.get('witness'):
                    self.printer.msg('  %s\n' % _shown(entry['witness']))
                for values in entry.get('answers', []):
                    self.printer.msg('  (%s)\n' % ', '.join(
                        format_element(a) for a in values))
        return EXIT_OK if value else EXIT_FALSE

    def search(self, problem, query, max_domain, backend, max_nodes):
        closed = finite_closure(problem.deps)
        result = bounded_model_search(problem.instance, closed, query,
                                      max_domain, backend, max_nodes,
                                      problem.schema)
        if result.counterexample is not None:
            raise InternalError('finite counterexample to a certain query: '
                                '%s' % serialize_instance(
                                    result.counterexample).strip())
        self.printer.debug_msg('no counterexample with %d elements (%s, %d '
                               'nodes)\n' % (max_domain, 'complete'
                                             if result.complete else 'capped',
                                             result.nodes))
        return {'complete': result.complete, 'nodes': result.nodes,
                'max_domain': max_domain}

    def model_out(self, problem, model, out):
        text = serialize_schema(problem.schema) + serialize_instance(model)
        if out is None:
            if not self.json_mode:
                self.printer.msg(text)
        else:
            self.write(out, text)

    def build_acq(self, problem, k, seed, stage='full', log=None, out=None,
                  retries=6, max_achievers=5000):
        if stage == 'weak':
            completion = weak_completion(problem.instance, problem.deps,
                                         seed=seed, schema=problem.schema)
        else:
            completion = complete_acq_universal(
                problem.instance, problem.deps, k, seed=seed,
                retries=retries, debug=self.debug, schema=problem.schema,
                max_keys=max_achievers)
        stats = completion.stats()
        self.printer.debug_msg('%s completion: %d facts, %d steps, density '
                               '%s, %d attempts\n' % (
                                   stage, stats['facts'], stats['steps'],
                                   stats['density'], stats['attempts']))
        if log is not None:
            self.write(log, ''.join(json.dumps(record_json(r),
                                               sort_keys=True) + '\n'
                                    for r in completion.log))
        model = completion.instance
        self.model_out(problem, model, out)
        if self.json_mode:
            self.printer.json_msg(report_json(
                True, stats=stats, model=instance_json(model)))
        return EXIT_OK

    def build(self, problem, k, seed, out=None, cert=None, retries=6,
              max_achievers=5000, max_group_order=5000, girth=None,
              skip_if_sound=False, group=CYCLES):
        model, certificate = build_universal_model(
            problem.instance, problem.deps, k, seed=seed,
            max_group_order=max_group_order, retries=retries,
            debug=self.debug, skip_if_sound=skip_if_sound, girth=girth,
            max_keys=max_achievers, schema=problem.schema, group=group)
        self.printer.debug_msg('blowup %s, %d facts\n' % (
            certificate['blowup'], len(model)))
        if cert is not None:
            self.write(cert, json.dumps(certificate, sort_keys=True,
                                        indent=2) + '\n')
        self.model_out(problem, model, out)
        if self.json_mode:
            self.printer.json_msg(report_json(
                True, stats={'facts': len(model),
                             'elements': len(model.domain)},
                model=instance_json(model), certificate=certificate))
        return EXIT_OK

    def verify(self, model_path, problem, k, queries):
        model = read_problem(model_path).instance
        report = verify_model(model, problem.deps)
        report.count('base', len(problem.instance))
        for fact in problem.instance.sorted_facts():
            if fact not in model:
                report.fail('base', format_fact(fact))
        report.merge(verify_k_sound(model, problem.instance, problem.deps, k,
                                    queries, problem.schema))
        audit = report.to_json()
        if self.json_mode:
            self.printer.json_msg(report_json(report.ok,
                                              stats=audit['checked'],
                                              failures=audit['failures']))
        else:
            for prop, n in sorted(report.checked.items()):
                self.printer.msg('%s: %d checked\n' % (prop, n))
            for failure in audit['failures']:
                self.printer.err_msg('%(property)s: %(counterexample)s\n'
                                     % failure)
            self.printer.answer_msg(report.ok)
        return EXIT_OK if report.ok else EXIT_FALSE

    def gen(self, seed, **options):
        problem = random_problem(make_rng(seed, 'gen'), **options)
        text = serialize_problem(problem)
        self.emit(report_json(True, result=text, stats={
            'relations': len(problem.schema.names()),
            'uids': len(problem.deps.uids), 'fds': len(problem.deps.fds),
            'facts': len(problem.instance)}), text)
        return EXIT_OK


def dispatch(fcqa, FLAGS):
    if FLAGS.command in ['c', 'closure']:
        return fcqa.closure(read_problem(FLAGS.problem), FLAGS.trace)

    elif FLAGS.command in ['ch', 'chase']:
        return fcqa.chase(read_problem(FLAGS.problem), FLAGS.rounds,
                          FLAGS.dot)

    elif FLAGS.command in ['s', 'simeq']:
        return fcqa.simeq(read_problem(FLAGS.problem), FLAGS.k, FLAGS.rounds)

    elif FLAGS.command in ['fc', 'factclasses']:
        return fcqa.factclasses(read_problem(FLAGS.problem), FLAGS.k,
                                FLAGS.rounds, FLAGS.max_rounds)

    elif FLAGS.command in ['u', 'uqa']:
        return fcqa.answer(read_problem(FLAGS.problem), False,
                           FLAGS.chase_depth, FLAGS.stability_check)

    elif FLAGS.command in ['f', 'fqa']:
        return fcqa.answer(read_problem(FLAGS.problem), True,
                           FLAGS.chase_depth, FLAGS.stability_check,
                           FLAGS.search_domain, FLAGS.backend,
                           FLAGS.max_nodes)

    elif FLAGS.command in ['ba', 'build-acq']:
        return fcqa.build_acq(read_problem(FLAGS.problem), FLAGS.k,
                              resolve_seed(FLAGS.seed), FLAGS.stage,
                              FLAGS.log, FLAGS.out, FLAGS.retries,
                              FLAGS.max_achievers)

    elif FLAGS.command in ['b', 'build']:
        return fcqa.build(read_problem(FLAGS.problem), FLAGS.k,
                          resolve_seed(FLAGS.seed), FLAGS.out, FLAGS.cert,
                          FLAGS.retries, FLAGS.max_achievers,
                          FLAGS.max_group_order, FLAGS.girth,
                          FLAGS.skip_if_sound, FLAGS.group)

    elif FLAGS.command in ['v', 'verify']:
        return fcqa.verify(FLAGS.model, read_problem(FLAGS.against), FLAGS.k,
                           FLAGS.queries)

    elif FLAGS.command in ['g', 'gen']:
        return fcqa.gen(resolve_seed(FLAGS.seed), relations=FLAGS.relations,
                        max_arity=FLAGS.max_arity, facts=FLAGS.facts,
                        uid_density=FLAGS.uid_density,
                        fd_density=FLAGS.fd_density,
                        query_atoms=FLAGS.query_atoms, closed=FLAGS.closed)
    raise UsageError('unknown command %s' % FLAGS.command)


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = get_argument_parser()
    try:
        FLAGS = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code or EXIT_OK
    if FLAGS.command is None:
        parser.print_usage(stderr)
        return EXIT_USAGE
    printer = Printer(
        use_color=FLAGS.color, debug=FLAGS.debug,
        color_true=getattr(FLAGS, 'color_true', 'brightgreen'),
        color_false=getattr(FLAGS, 'color_false', 'brightyellow'),
        stdout=stdout, stderr=stderr)
    fcqa = FcqaInterface(printer, json_mode=FLAGS.json, debug=FLAGS.debug)
    try:
        return dispatch(fcqa, FLAGS)
    except FcqaError as exc:
        printer.err_msg(str(exc)+'\n')
        if FLAGS.stack_trace:
            print_exc()
        return exc.exit_code
    except (ValueError, OSError) as exc:
        printer.err_msg(str(exc)+'\n')
        if FLAGS.stack_trace:
            print_exc()
        return EXIT_USAGE
    except Exception as exc:
        printer.err_msg(str(exc)+'\n')
        if FLAGS.stack_trace:
            print_exc()
        return EXIT_INTERNAL


def main():
    signal.signal(signal.SIGINT, SIGINT_handler)
    sys.exit(run(sys.argv[1:]))


def SIGINT_handler(signum, frame):
    sys.stderr.write('Signal caught, bye!\n')
    sys.exit(1)


if __name__ == '__main__':
    main()
