import pytest

from conftest import both_ways, facts
from fcqa.builder.dense import (check_dense, cover, dense_full,
                                dense_interpretation, dense_size,
                                fd_projection, full_fds, full_subsets,
                                has_tame_overlaps, is_disjoint, is_tame,
                                min_key)
from fcqa.errors import UsageError
from fcqa.model import FD


class TestFullConstruction:

    @pytest.mark.parametrize('D,n,elements', [(1, 3, 1), (2, 2, 5),
                                              (3, 2, 19)])
    def test_sizes(self, D, n, elements):
        instance = dense_full(D, n)
        assert len(instance) == n ** D
        assert len(instance.domain) == elements

    @pytest.mark.parametrize('D', [2, 3])
    def test_overlaps_are_tame(self, D):
        positions = list(range(1, 2 ** D))
        assert len(full_subsets(D)) == len(positions)
        assert has_tame_overlaps(dense_full(D, 2), full_fds(D), 'Full',
                                 positions)

    def test_bad_sizes(self):
        with pytest.raises(UsageError):
            dense_full(0, 2)


@pytest.mark.parametrize('overlap,tame', [
    ({1, 5}, True), ({4, 5}, True), ({4}, True), ({5}, True), (set(), True),
    ({1, 4}, False), ({2, 4}, False)])
def test_tame_overlaps(fixture_f, overlap, tame):
    fds, _ = fixture_f
    assert is_tame(overlap, fds, 'R', [1, 2, 3, 4, 5]) == tame


def test_projection_turns_leaving_fds_into_keys():
    fds = [FD('R', [1], 3), FD('R', [3], 2)]
    assert fd_projection(fds, 'R', [1, 2]) == [FD('R', [1], 2)]
    assert fd_projection([FD('R', [2, 3], 1)], 'R', [2, 3]) == []


def test_min_key():
    fds = both_ways('R', 1, 2)
    assert min_key(fds, 'R', [1, 2, 3]) == [1, 3]
    assert min_key([], 'R', [2, 3]) == [2, 3]


class TestFixtureE:
    """Dense interpretation over R[2], R[3] under R[2,3] -> R[1]"""

    def test_smallest_n(self, fixture_e):
        _, deps, _ = fixture_e
        instance, N = dense_interpretation('R', [2, 3], deps.fds, 1)
        assert len(instance) == 4 and N == 4
        assert dense_size(2, 2, [{1}, {2}]) == (4, 4)
        assert is_disjoint(instance)

    def test_density_grows_with_K(self, fixture_e):
        _, deps, _ = fixture_e
        instance, N = dense_interpretation('R', [2, 3], deps.fds, 2)
        assert len(instance) == 16 and N == 8

    def test_sound(self, fixture_e):
        _, deps, _ = fixture_e
        instance, _ = dense_interpretation('R', [2, 3], deps.fds, 1)
        assert check_dense(instance, deps.fds, 'R', [2, 3], 1) == []

    def test_cover(self, fixture_e):
        _, deps, _ = fixture_e
        instance, _ = dense_interpretation('R', [2, 3], deps.fds, 2)
        chosen = cover(instance)
        assert {a for f in chosen for a in f.args} == instance.domain


def test_unary_key_has_no_dense_interpretation():
    with pytest.raises(UsageError):
        dense_interpretation('R', [2, 3], [FD('R', [2], 3)], 1)
    with pytest.raises(UsageError):
        dense_interpretation('R', [], [], 1)


def test_check_dense_reports():
    problems = check_dense(facts('R x y'), [], 'R', [2, 3], 1)
    assert problems == ['1 facts for 2 elements, factor 1 not reached']
    assert not is_disjoint(facts('R a a'))
