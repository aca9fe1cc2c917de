import pytest

from conftest import both_ways, reversible, uid
from fcqa.builder.partition import (REVERSIBLE, TRIVIAL, ManageablePartition,
                                    PartitionClass, follows, fun_class_of,
                                    fun_classes, id_classes, is_reversible)
from fcqa.closure import dangerous, finite_closure, is_safe, non_dangerous
from fcqa.errors import UsageError
from fcqa.model import FD, Position, Schema


class TestDangerous:

    def test_wide_key_is_not_dangerous(self, fixture_e):
        _, deps, schema = fixture_e
        exported = Position('R', 1)
        assert dangerous(exported, deps.fds, schema) == []
        assert non_dangerous(exported, deps.fds, schema) == [
            Position('R', 2), Position('R', 3)]
        assert not is_safe(exported, deps.fds, schema)

    def test_unary_keys_are_dangerous(self, fixture_f):
        fds, schema = fixture_f
        exported = Position('R', 5)
        assert dangerous(exported, fds, schema) == [
            Position('R', i) for i in (1, 2, 3)]
        assert non_dangerous(exported, fds, schema) == [Position('R', 4)]
        assert is_safe(exported, fds, schema)

    def test_arity_from_fds(self):
        assert non_dangerous(Position('R', 1), [FD('R', [3], 1)]) == [
            Position('R', 2)]

    def test_no_fds_is_safe(self):
        assert is_safe(Position('R', 1), [], Schema({'R': 3}))


def test_id_classes():
    uids = reversible(('R2', 'S1')) + [uid('S2', 'T1')]
    assert id_classes(uids) == [
        frozenset([Position('R', 2), Position('S', 1)]),
        frozenset([Position('S', 2)]), frozenset([Position('T', 1)])]


def test_fun_classes(four_ary):
    _, deps, schema = four_ary
    assert fun_classes(deps.fds, schema) == [
        frozenset([Position('R', 1), Position('R', 2)]),
        frozenset([Position('R', 3), Position('R', 4)])]
    assert fun_class_of(Position('R', 4), deps.fds, schema) == frozenset(
        [Position('R', 3), Position('R', 4)])


def test_follows():
    first, second = uid('R1', 'S1'), uid('S2', 'T1')
    assert follows(first, second, [FD('S', [2], 1)])
    assert not follows(first, second, [])
    assert not follows(second, first, [FD('S', [2], 1)])


def test_reversible():
    uids = reversible(('R1', 'S1'), ('R2', 'S2'))
    assert is_reversible(uids, both_ways('R', 1, 2))
    assert not is_reversible(uids, [FD('R', [1], 2)])
    assert not is_reversible(uids[:1], [])


class TestManageablePartition:

    def test_fixture_c(self, fixture_c):
        deps, schema = fixture_c
        partition = ManageablePartition.from_dependencies(
            finite_closure(deps), schema)
        assert [c.kind for c in partition] == [REVERSIBLE, TRIVIAL,
                                               REVERSIBLE]
        assert partition.describe() == [
            'reversible: R[1] <= R[2], R[2] <= R[1]',
            'trivial: R[3] <= S[1]',
            'reversible: S[2] <= S[3], S[3] <= S[2]']
        assert partition.check(finite_closure(deps).fds)
        assert len(partition.uids) == 5

    def test_needs_finite_closure(self, fixture_c):
        deps, schema = fixture_c
        with pytest.raises(UsageError):
            ManageablePartition.from_dependencies(deps, schema)

    def test_trivial_only(self, fixture_e):
        _, deps, schema = fixture_e
        partition = ManageablePartition.from_dependencies(
            finite_closure(deps), schema)
        assert [c.kind for c in partition] == [TRIVIAL, TRIVIAL]

    def test_reordered_classes_are_flagged(self):
        fds = [FD('S', [2], 1)]
        first, second = uid('R1', 'S1'), uid('S2', 'T1')
        partition = ManageablePartition([
            PartitionClass(TRIVIAL, (second,), None),
            PartitionClass(TRIVIAL, (first,), None)])
        assert not partition.is_ordered(fds)
        assert partition.problems(fds) == ['the classes are not ordered']
