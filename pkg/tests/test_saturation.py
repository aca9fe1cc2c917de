import pytest

from conftest import facts
from fcqa.builder.saturation import (ENVELOPE, FACT, RELATION,
                                     AlignedSuperinstance, Envelope,
                                     FactClassKey, GlobalEnvelope,
                                     creation_chain, fact_class_keys,
                                     relation_saturation, saturate)
from fcqa.chase import LazyChase
from fcqa.closure import finite_closure
from fcqa.errors import EnvelopeExhausted, InternalError, ResourceError
from fcqa.model import Fact, Position
from fcqa.qa import fd_violations
from fcqa.simulation import check_certificate
from fcqa.utils import make_rng


@pytest.fixture
def zigzag(fixture_d):
    base, deps, schema = fixture_d
    return LazyChase(base, finite_closure(deps).uids, schema)


class TestFactClasses:

    def test_keys(self, zigzag):
        keys = fact_class_keys(zigzag, 1, [], zigzag.schema)
        assert len(keys) == 6
        assert sorted(set(str(k.exported) for k in keys)) == [
            'R[1]', 'R[2]', 'S[1]', 'S[2]']
        assert keys[FactClassKey(Position('S', 1), ('base', 'b'))] == 'b'

    def test_key_cap(self, zigzag):
        with pytest.raises(ResourceError):
            fact_class_keys(zigzag, 1, [], zigzag.schema, max_keys=2)

    def test_creation_chain(self, zigzag):
        first = zigzag.child_fact('b', Position('S', 1))
        null = first.at(2)
        second = zigzag.child_fact(null, Position('R', 1))
        assert creation_chain(zigzag, second.at(2)) == [first, second]
        assert creation_chain(zigzag, 'a') == []

    def test_relation_saturation(self, zigzag):
        prefix = relation_saturation(zigzag)
        assert prefix.rounds == 1 and len(prefix) == 3
        assert prefix.instance.relations() == {'R', 'S'}


class TestAligned:

    def test_base_covers_itself(self, zigzag):
        J = AlignedSuperinstance(zigzag, 2, zigzag.base)
        assert J.cov == {'a': 'a', 'b': 'b'}
        assert len(J.violations(zigzag.uids)) == 2
        assert check_certificate(J.certificate())
        assert not J.add(Fact('R', ['a', 'b']))

    def test_new_elements_need_cov(self, zigzag):
        J = AlignedSuperinstance(zigzag, 1, zigzag.base)
        with pytest.raises(InternalError):
            J.add(Fact('S', ['b', 'x']))

    def test_directionality(self, zigzag):
        J = AlignedSuperinstance(zigzag, 1, zigzag.base)
        chased = zigzag.child_fact('b', Position('S', 1))
        J.add(Fact('S', ['x', 'b']), {'x': chased.at(2)})
        assert J.directionality_problems() == [
            'x does not occur at %s' % Position('S', 2)]


class TestEnvelope:

    def setup_method(self):
        self.key = FactClassKey(Position('R', 1), ('base', 'a'))
        self.positions = [Position('R', 2), Position('R', 3)]

    def test_unsafe_hands_out_once(self):
        envelope = Envelope(self.key, self.positions, [('x', 'y')], False)
        assert envelope.take() == ('x', 'y')
        assert envelope.remaining() == 0
        with pytest.raises(EnvelopeExhausted):
            envelope.take()

    def test_safe_is_reused(self):
        envelope = Envelope(self.key, self.positions, [('x', 'y')], True)
        assert envelope.take() == envelope.take() == ('x', 'y')
        assert envelope.remaining() == 1

    def test_empty(self):
        with pytest.raises(InternalError):
            Envelope(self.key, self.positions, [], False)

    def test_missing_class(self):
        with pytest.raises(InternalError):
            GlobalEnvelope().get_envelope(self.key)

    def test_partial_reuse(self):
        envelope = Envelope(self.key, self.positions, [('x', 'y')], False)
        instance = facts('R a x y', 'R b x z')
        assert envelope.problems(instance, []) == [
            'R(b, x, z) reuses part of a tuple']


class TestSaturateFixtureE:

    @pytest.fixture(autouse=True)
    def closed(self, fixture_e):
        self.base, deps, self.schema = fixture_e
        self.deps = finite_closure(deps)

    def test_fact_level(self):
        J, envelope = saturate(self.base, self.deps, 1, FACT,
                               schema=self.schema)
        assert len(J) == 4 and len(envelope) == 2
        assert all(len(e.tuples) == 1 for e in envelope.values())
        assert J.satisfies(self.deps.uids)

    def test_envelope_level(self):
        J, envelope = saturate(self.base, self.deps, 1, ENVELOPE, K=2,
                               rng=make_rng(0), schema=self.schema)
        assert len(envelope) == 2 and not any(e.safe for e in
                                              envelope.values())
        assert envelope.min_remaining() > 0
        assert envelope.problems(J.instance, self.deps.fds) == []
        assert not fd_violations(J.instance, self.deps.fds)
        assert J.directionality_problems() == []
        assert check_certificate(J.certificate())

    def test_relation_level(self):
        J, envelope = saturate(self.base, self.deps, 1, RELATION,
                               schema=self.schema)
        assert envelope is None
        assert 'R' in J.instance.relations()

    def test_unknown_level(self):
        with pytest.raises(InternalError):
            saturate(self.base, self.deps, 1, 'chase', schema=self.schema)
