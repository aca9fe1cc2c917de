from conftest import uid
from fcqa.closure import (DerivationTrace, added_dependencies,
                          fd_attribute_closure, finite_closure,
                          finitely_implies, implied_ufds, implies,
                          transitively_closed, uid_transitive_closure)
from fcqa.model import FD, DependencySet


class TestFixtureC:
    """Finite closure adds the reverses inside the SCCs and the implied
    UFDs, nothing else"""

    def test_added(self, fixture_c):
        deps, _ = fixture_c
        closed = finite_closure(deps)
        uids, fds = added_dependencies(deps, closed)
        assert set(uids) == {uid('R2', 'R1'), uid('S3', 'S2')}
        assert set(fds) == {FD('R', [2], 1), FD('S', [3], 2),
                            FD('R', [3], 2), FD('S', [2], 1)}

    def test_flags(self, fixture_c):
        closed = finite_closure(fixture_c[0])
        assert closed.finitely_closed and closed.uid_transitively_closed
        assert finite_closure(closed) is closed

    def test_idempotent(self, fixture_c):
        closed = finite_closure(fixture_c[0])
        assert finite_closure(closed.replace(finitely_closed=False)) == closed

    def test_trace_checks(self, fixture_c):
        trace = DerivationTrace()
        closed = finite_closure(fixture_c[0], trace)
        assert trace.check()
        uids, fds = added_dependencies(fixture_c[0], closed)
        assert set(trace.conclusions()) == set(uids) | set(fds)
        assert any(line.startswith('cycle: ') for line in trace.lines())

    def test_finite_but_not_unrestricted(self, fixture_c):
        deps = fixture_c[0]
        assert finitely_implies(deps, FD('S', [2], 1))
        assert implies(deps, FD('S', [2], 1))
        assert finitely_implies(deps, uid('R2', 'R1'))
        assert not implies(deps, uid('R2', 'R1'))


def test_attribute_closure():
    fds = [FD('R', [1], 2), FD('R', [2, 3], 4)]
    assert fd_attribute_closure(fds, 'R', [1]) == {1, 2}
    assert fd_attribute_closure(fds, 'R', [1, 3]) == {1, 2, 3, 4}
    fired = []
    fd_attribute_closure(fds, 'R', [1, 3], fired)
    assert fired == fds


def test_implied_ufds_from_wide_fds():
    fds = {FD('R', [1], 2), FD('R', [2], 3), FD('R', [1, 3], 4)}
    assert implied_ufds(fds) == {FD('R', [1], 2), FD('R', [1], 3),
                                 FD('R', [1], 4), FD('R', [2], 3)}


def test_uid_transitive_closure():
    closed = uid_transitive_closure([uid('R1', 'S1'), uid('S1', 'T2')])
    assert uid('R1', 'T2') in closed and len(closed) == 3


def test_transitively_closed_keeps_fds():
    deps = DependencySet([uid('R1', 'S1'), uid('S1', 'R1')],
                         [FD('R', [1], 2)])
    closed = transitively_closed(deps)
    assert closed.uid_transitively_closed
    assert closed.uids == deps.uids and closed.fds == deps.fds


def test_cycle_through_fd_edges():
    # ui(R1 <= R2) and R1 -> R2 close a cycle of length two
    deps = DependencySet([uid('R1', 'R2')], [FD('R', [1], 2)])
    closed = finite_closure(deps)
    assert uid('R2', 'R1') in closed.uids
    assert FD('R', [2], 1) in closed.fds


def test_no_cycle_no_change():
    deps = DependencySet([uid('R1', 'S1')], [FD('S', [1], 2)])
    closed = finite_closure(deps)
    assert closed == deps
