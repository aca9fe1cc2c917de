from conftest import uid
from fcqa.graph import ConstraintGraph
from fcqa.model import FD, Position


class TestConstraintGraph:

    def setup_class(self):
        self.graph = ConstraintGraph([uid('R1', 'R2'), uid('R3', 'S1')],
                                     [FD('R', [1], 2)])

    def test_fd_edges_are_reversed(self):
        assert self.graph.has_edge(Position('R', 2), Position('R', 1))
        assert not self.graph.has_edge(Position('R', 1), Position('R', 3))

    def test_cyclic_edges(self):
        assert self.graph.cyclic_edges() == [
            (Position('R', 1), Position('R', 2)),
            (Position('R', 2), Position('R', 1))]

    def test_scc_order_is_topological(self):
        order = self.graph.scc_order()
        assert order.index(frozenset([Position('R', 3)])) < \
            order.index(frozenset([Position('S', 1)]))

    def test_dot(self):
        dot = self.graph.to_dot()
        assert '"R[2]" -> "R[1]" [style=dashed, color=red];' in dot
