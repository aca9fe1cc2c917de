"""Thrifty chase steps on an aligned superinstance.

A step repairs one UID violation (a, S^q) with one new S-fact that carries
a at S^q. The variants differ in where the other elements come from:

fresh      new elements everywhere, the envelope at the non-dangerous
           positions
fact       new elements at the dangerous positions, the non-dangerous
           ones copied from an existing fact
envelope   the realization at the positions determining S^q, new
           elements at the other dangerous positions, the envelope at the
           non-dangerous ones
relation   the realization at the positions determining S^q, the
           non-dangerous ones copied from an existing fact
"""
from collections import namedtuple

from fcqa.closure import non_dangerous
from fcqa.errors import InternalError, UsageError
from fcqa.model import Fact

FRESH = 'fresh'
FACT = 'fact'
ENVELOPE = 'envelope'
RELATION = 'relation'
VARIANTS = (FRESH, FACT, ENVELOPE, RELATION)

StepRecord = namedtuple('StepRecord', ['uid', 'exported', 'variant',
                                       'new_fact', 'envelope_class'])


def witness(J, element, target):
    """Chase fact exporting the cov image of the element to the target"""
    return J.chase.child_fact(J.cov[element], target)


def record_json(record):
    out = {'uid': str(record.uid), 'exported': str(record.exported),
           'variant': record.variant, 'new_fact': str(record.new_fact)}
    if record.envelope_class is not None:
        out['envelope_class'] = str(record.envelope_class.exported)
    return out


def apply_thrifty_step(J, uid, element, variant, fds, schema,
                       envelope=None, realization=None, reuse=None):
    """Add the fact repairing `element` for `uid`, returns its StepRecord"""
    if variant not in VARIANTS:
        raise UsageError('unknown step variant %s' % variant)
    target = uid.target
    if element not in J.occupied(uid.source):
        raise UsageError('%s does not occur at %s' % (element, uid.source))
    if element in J.occupied(target):
        raise UsageError('%s already occurs at %s' % (element, target))
    chased = witness(J, element, target)
    args = {target.index: element}
    cov = {}
    if variant in (ENVELOPE, RELATION):
        i = realization.class_of(target)
        if i is None:
            raise InternalError('%s is outside the realization' % target)
        positions = realization.classes[i]
        values = realization.tuple_for(target, element)
        if values is None:
            raise InternalError('no realization tuple for %s at %s'
                                % (element, target))
        if J.has_projection(positions, values):
            raise InternalError('realization tuple %s is already used'
                                % (values,))
        for p, v in zip(positions, values):
            args[p.index] = v
            cov[v] = chased.at(p.index)
    key = None
    outside = non_dangerous(target, fds, schema)
    if outside:
        if variant in (FACT, RELATION):
            if reuse is None or reuse.relation != target.relation:
                raise UsageError('%s step needs a %s fact to reuse'
                                 % (variant, target.relation))
            for p in outside:
                args[p.index] = reuse.at(p.index)
        else:
            key = J.key_for(element, target)
            chosen = envelope.get_envelope(key)
            for p, v in zip(chosen.positions, chosen.take()):
                args[p.index] = v
    for i in range(1, schema.arity(target.relation) + 1):
        if i not in args:
            args[i] = J.fresh()
            cov[args[i]] = chased.at(i)
    fact = Fact(target.relation, [args[i] for i in sorted(args)])
    J.add(fact, cov)
    return StepRecord(uid, target, variant, fact, key)


def fresh_round(J, uids, fds, schema, envelope):
    """One fresh step per violation present at the start of the round"""
    records = []
    for element, uid in J.violations(uids):
        if element not in J.occupied(uid.target):
            records.append(apply_thrifty_step(J, uid, element, FRESH, fds,
                                              schema, envelope=envelope))
    return records


def ensure_essentiality(J, uids, n, fds, schema, envelope):
    """n + 1 fresh rounds, so that elements still violating the UIDs
    afterwards are n-essential or new"""
    records = []
    for _ in range(n + 1):
        done = fresh_round(J, uids, fds, schema, envelope)
        if not done:
            break
        records.extend(done)
    return records
