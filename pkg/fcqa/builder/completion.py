"""Completion of an initial instance into a finite k-sound superinstance.

complete_acq_universal saturates the instance, then satisfies the classes
of a manageable partition one at a time: a trivial class by one round of
fresh steps, a reversible class by fresh rounds followed by envelope steps
along a balanced piecewise realization. When an envelope runs dry the
whole construction is restarted with a larger density factor.

weak_completion is the simpler construction for reversible UIDs and unary
FDs only, which gives a finite model without any soundness guarantee.
"""
from fcqa.builder.balance import HELPER_PREFIX, balance, \
    piecewise_realization
from fcqa.builder.partition import REVERSIBLE, ManageablePartition, \
    is_reversible
from fcqa.builder.saturation import ENVELOPE as ENVELOPE_LEVEL, MAX_KEYS, \
    RELATION as RELATION_LEVEL, saturate
from fcqa.builder.steps import ENVELOPE, RELATION, apply_thrifty_step, \
    ensure_essentiality, fresh_round
from fcqa.chase import infer_schema
from fcqa.closure import finite_closure, is_safe, non_dangerous, \
    transitively_closed
from fcqa.errors import EnvelopeExhausted, InternalError, UsageError
from fcqa.qa import fd_violations, uid_violations
from fcqa.utils import FreshNames, make_rng

RETRIES = 6


class Completion(object):
    """Result of a completion: the superinstance and what it took"""

    def __init__(self, J, log, partition, envelope, density, attempts):
        self.J = J
        self.log = log
        self.partition = partition
        self.envelope = envelope
        self.density = density
        self.attempts = attempts

    @property
    def instance(self):
        return self.J.instance

    @property
    def cov(self):
        return self.J.cov

    def stats(self):
        variants = {}
        for record in self.log:
            variants[record.variant] = variants.get(record.variant, 0) + 1
        return {'facts': len(self.J), 'elements': len(self.J.domain),
                'steps': len(self.log), 'variants': variants,
                'classes': len(self.partition) if self.partition else 0,
                'density': self.density, 'attempts': self.attempts}


def _validate(J, fds, satisfied, envelope, where):
    problems = ['%s fails' % fd for fd, _, _ in fd_violations(J.instance,
                                                             fds)[:1]]
    problems += J.directionality_problems()[:1]
    problems += ['%s not k-simulated by %s' % (a, J.cov[a])
                 for a in J.certificate().failures()[:1]]
    problems += ['%s fails on %s' % (uid, a)
                 for uid, a in uid_violations(J.instance, satisfied)[:1]]
    if envelope is not None:
        problems += envelope.problems(J.instance, fds)[:1]
    if problems:
        raise InternalError('%s: %s' % (where, '; '.join(problems)))


def envelope_budget(partition, fds, schema):
    """Initial envelope density: twice the product over the classes of
    1 + the number of non-dangerous positions the class fills from
    unsafe envelopes"""
    budget = 2
    for part in partition:
        targets = {uid.target for uid in part.uids}
        budget *= 1 + sum(len(non_dangerous(p, fds, schema))
                          for p in targets if not is_safe(p, fds, schema))
    return budget


def _helpers(J):
    return FreshNames(HELPER_PREFIX, J.domain)


def complete_reversible(J, part, k, fds, schema, envelope, rng):
    """Satisfy a reversible class: fresh rounds, then envelope steps"""
    uids = part.uids
    log = ensure_essentiality(J, uids, k, fds, schema, envelope)
    if not J.violations(uids):
        return log
    pss = balance(J.instance, uids, fds, fresh=_helpers(J))
    realization = piecewise_realization(pss, fds, schema, rng)
    pending = J.violations(uids)
    while pending:
        for element, uid in pending:
            if element in J.occupied(uid.target):
                continue
            log.append(apply_thrifty_step(
                J, uid, element, ENVELOPE, fds, schema, envelope=envelope,
                realization=realization))
        pending = J.violations(uids)
    return log


def _complete(base, deps, schema, partition, k, seed, density, debug,
              max_keys):
    rng = make_rng(seed, 'complete', density)
    J, envelope = saturate(base, deps, k, ENVELOPE_LEVEL, density, rng,
                           schema, max_keys)
    fds = deps.fds
    log = []
    satisfied = set()
    if debug:
        _validate(J, fds, satisfied, envelope, 'saturation')
    for number, part in enumerate(partition):
        if part.kind == REVERSIBLE:
            log.extend(complete_reversible(J, part, k, fds, schema, envelope,
                                           rng))
        else:
            log.extend(fresh_round(J, part.uids, fds, schema, envelope))
        satisfied |= set(part.uids)
        if debug:
            _validate(J, fds, satisfied, envelope, 'class %d' % number)
        elif not J.satisfies(satisfied):
            raise InternalError('class %d broke an earlier class' % number)
    if fd_violations(J.instance, fds):
        raise InternalError('completion violates %s'
                            % (fd_violations(J.instance, fds)[0][0],))
    if uid_violations(J.instance, deps.uids):
        raise InternalError('completion violates %s'
                            % (uid_violations(J.instance, deps.uids)[0][0],))
    return J, log, envelope


def complete_acq_universal(base, deps, k, seed=0, retries=RETRIES,
                           debug=False, schema=None,
                           density=None, max_keys=MAX_KEYS):
    """Finite superinstance of base satisfying deps and k-sound for ACQs.

    deps are closed under finite implication first. Raises UsageError when
    base violates the FDs, InternalError when a check fails and
    EnvelopeExhausted when no density up to the last retry suffices. The
    density starts at envelope_budget unless given, and doubles on each
    retry.
    """
    deps = finite_closure(deps)
    schema = schema or infer_schema(base, deps.uids)
    deps.check(schema)
    violated = fd_violations(base, deps.fds)
    if violated:
        raise UsageError('the instance violates %s' % (violated[0][0],))
    partition = ManageablePartition.from_dependencies(deps, schema)
    if density is None:
        density = envelope_budget(partition, deps.fds, schema)
    attempts = 0
    while True:
        attempts += 1
        try:
            J, log, envelope = _complete(base, deps, schema, partition, k,
                                         seed, density, debug, max_keys)
            return Completion(J, log, partition, envelope, density, attempts)
        except EnvelopeExhausted:
            if attempts >= retries:
                raise
            density *= 2


def weak_completion(base, deps, seed=0, schema=None):
    """Finite model for reversible UIDs and unary FDs.

    The relations reachable through the UIDs are populated from the chase,
    then every violation is repaired with a realization tuple, copying the
    other positions from an existing fact of the relation.
    """
    if any(not fd.is_unary for fd in deps.fds):
        raise UsageError('weak completion supports unary FDs only')
    deps = transitively_closed(deps)
    if not is_reversible(deps.uids, deps.fds):
        raise UsageError('weak completion needs reversible UIDs')
    schema = schema or infer_schema(base, deps.uids)
    violated = fd_violations(base, deps.fds)
    if violated:
        raise UsageError('the instance violates %s' % (violated[0][0],))
    J, _ = saturate(base, deps, 0, RELATION_LEVEL, schema=schema)
    log = []
    if not J.violations(deps.uids):
        return Completion(J, log, None, None, None, 1)
    pss = balance(J.instance, deps.uids, deps.fds, fresh=_helpers(J))
    realization = piecewise_realization(pss, deps.fds, schema,
                                        make_rng(seed, 'weak'))
    pending = J.violations(deps.uids)
    while pending:
        for element, uid in pending:
            if element in J.occupied(uid.target):
                continue
            reuse = J.instance.by_relation(uid.target.relation)
            log.append(apply_thrifty_step(
                J, uid, element, RELATION, deps.fds, schema,
                realization=realization, reuse=reuse[0] if reuse else None))
        pending = J.violations(deps.uids)
    if uid_violations(J.instance, deps.uids):
        raise InternalError('weak completion violates %s'
                            % (uid_violations(J.instance, deps.uids)[0][0],))
    return Completion(J, log, None, None, None, 1)
