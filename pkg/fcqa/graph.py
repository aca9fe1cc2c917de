"""The constraint graph over positions.

There is an edge R^p -> S^q for every UID ui(R^p <= S^q) and for every
unary FD S^q -> R^p (FD edges are reversed). Parallel dependencies share one
edge and are kept as its provenance.
"""
import networkx as nx

from fcqa.model import UID


class ConstraintGraph(object):

    def __init__(self, uids=(), ufds=(), positions=()):
        self.graph = nx.DiGraph()
        self.graph.add_nodes_from(positions)
        for uid in uids:
            self._add(uid.source, uid.target, uid)
        for fd in ufds:
            if fd.is_unary:
                self._add(fd.target, fd.source, fd)
        self._scc_of = None

    @classmethod
    def from_dependencies(cls, deps, schema=None):
        positions = schema.positions() if schema is not None else ()
        return cls(deps.uids, deps.ufds, positions)

    def _add(self, u, v, dependency):
        if u == v:
            return
        if self.graph.has_edge(u, v):
            self.graph[u][v]['deps'].add(dependency)
        else:
            self.graph.add_edge(u, v, deps={dependency})

    def vertices(self):
        return sorted(self.graph.nodes)

    def edges(self):
        return sorted(self.graph.edges)

    def provenance(self, u, v):
        return frozenset(self.graph[u][v]['deps'])

    def has_edge(self, u, v):
        return self.graph.has_edge(u, v)

    def sccs(self):
        """Strongly connected components, each as a frozenset"""
        return [frozenset(c) for c in nx.strongly_connected_components(
            self.graph)]

    def scc_of(self, position):
        if self._scc_of is None:
            self._scc_of = {}
            for component in self.sccs():
                for p in component:
                    self._scc_of[p] = component
        return self._scc_of.get(position, frozenset([position]))

    def cyclic_edges(self):
        """Edges lying on a directed cycle, i.e. inside one SCC"""
        return [(u, v) for u, v in self.edges()
                if v in self.scc_of(u)]

    def cycle_through(self, u, v):
        """Edges of a cycle using the edge (u, v)"""
        path = nx.shortest_path(self.graph, v, u)
        return [(u, v)] + list(zip(path, path[1:]))

    def reaches(self, u, v):
        return u == v or (u in self.graph and v in self.graph and
                          nx.has_path(self.graph, u, v))

    def scc_order(self):
        """SCCs in a deterministic topological order of the condensation"""
        condensed = nx.condensation(self.graph)
        members = nx.get_node_attributes(condensed, 'members')
        order = nx.lexicographical_topological_sort(
            condensed, key=lambda n: min(members[n]))
        return [frozenset(members[n]) for n in order]

    def uid_edges(self):
        return [(u, v) for u, v in self.edges()
                if any(isinstance(d, UID) for d in self.provenance(u, v))]

    def to_dot(self):
        lines = ['digraph constraints {']
        for u, v in self.edges():
            style = ''
            if not any(isinstance(d, UID) for d in self.provenance(u, v)):
                style = ' [style=dashed, color=red]'
            lines.append('  "%s" -> "%s"%s;' % (u, v, style))
        lines.append('}')
        return '\n'.join(lines) + '\n'
