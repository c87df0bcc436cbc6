"""Edge-colored multigraphs encoding triangulated manifolds.

A graph of dimension n is (n+1)-regular, loopless and properly
edge-colored with colors 0..n.  Vertices are 0..2p-1.  Parallel edges
with distinct colors are allowed; a proper coloring makes a second
parallel edge with the same color impossible.

Edges are kept in a canonical order (color, low endpoint, high
endpoint) and are addressed everywhere by their index in that order.
"""

from __future__ import annotations

import itertools
from collections import deque


class GemError(ValueError):
    """Base class for structural violations of the gem contract."""


class LoopEdgeError(GemError):
    pass


class NotProperError(GemError):
    pass


class NotRegularError(GemError):
    pass


class OddOrderError(GemError):
    pass


class DisconnectedError(GemError):
    pass


class DimensionMismatchError(GemError):
    pass


class ColoredGraph:
    """Immutable properly edge-colored (n+1)-regular multigraph.

    Attributes:
        n: dimension (colors are 0..n).
        nv: number of vertices (always even).
        edges: tuple of (u, v, c) triples with u < v, sorted by (c, u, v).
    """

    __slots__ = ("n", "nv", "edges", "_inc", "_residue_cache", "_bipart")

    def __init__(self, n, nv, edges, _inc):
        self.n = n
        self.nv = nv
        self.edges = edges
        self._inc = _inc  # per vertex: tuple of edge ids indexed by color
        self._residue_cache = {}
        self._bipart = None

    # -- construction ------------------------------------------------

    @staticmethod
    def build(n, edge_list):
        """Validate an (u, v, c) edge list and return a ColoredGraph.

        Raises a GemError subclass naming the first violated rule:
        loops, proper coloring, regularity, even order, connectivity.
        """
        if n < 1:
            raise GemError("dimension must be at least 1")
        colors = range(n + 1)
        verts = set()
        for u, v, c in edge_list:
            verts.add(u)
            verts.add(v)
        if not verts:
            raise GemError("empty edge list")
        nv = max(verts) + 1
        if verts != set(range(nv)):
            raise GemError("vertex ids must be 0..%d with no gaps" % (nv - 1))
        inc = [[None] * (n + 1) for _ in range(nv)]
        canon = []
        for u, v, c in edge_list:
            if c not in colors:
                raise GemError("color %r outside 0..%d" % (c, n))
            if u == v:
                raise LoopEdgeError("loop at vertex %d (color %d)" % (u, c))
            canon.append((c, min(u, v), max(u, v)))
        canon.sort()
        for eid, (c, u, v) in enumerate(canon):
            for w in (u, v):
                if inc[w][c] is not None:
                    raise NotProperError(
                        "vertex %d has two edges of color %d" % (w, c))
                inc[w][c] = eid
        for w in range(nv):
            missing = [c for c in colors if inc[w][c] is None]
            if missing:
                raise NotRegularError(
                    "vertex %d missing colors %s" % (w, missing))
        if nv % 2:
            raise OddOrderError("odd number of vertices (%d)" % nv)
        edges = tuple((u, v, c) for c, u, v in canon)
        g = ColoredGraph(n, nv, edges, tuple(tuple(r) for r in inc))
        if len(_component(g, frozenset(colors), 0)) != nv:
            raise DisconnectedError("graph is not connected")
        return g

    # -- basic queries -----------------------------------------------

    @property
    def colors(self):
        return range(self.n + 1)

    def edge_ids(self, color=None):
        if color is None:
            return range(len(self.edges))
        return [i for i, (u, v, c) in enumerate(self.edges) if c == color]

    def incident(self, v, c):
        """Edge id of the unique c-colored edge at vertex v."""
        return self._inc[v][c]

    def neighbor(self, v, c):
        """(vertex, edge id) across the c-colored edge at v."""
        eid = self._inc[v][c]
        u, w, _ = self.edges[eid]
        return (w if u == v else u, eid)

    def other_end(self, eid, v):
        u, w, _ = self.edges[eid]
        return w if u == v else u

    def __eq__(self, other):
        return (isinstance(other, ColoredGraph)
                and self.n == other.n and self.edges == other.edges)

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return "ColoredGraph(n=%d, order=%d, edges=%d)" % (
            self.n, self.nv, len(self.edges))


def build_graph(n, edge_list):
    return ColoredGraph.build(n, edge_list)


# -- residues ---------------------------------------------------------

class Residue:
    """Connected component of the subgraph induced by a color subset."""

    __slots__ = ("colors", "vertices", "edge_ids")

    def __init__(self, colors, vertices, edge_ids):
        self.colors = colors            # frozenset
        self.vertices = vertices        # sorted tuple
        self.edge_ids = edge_ids        # sorted tuple

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return "Residue(colors=%s, order=%d)" % (
            sorted(self.colors), len(self.vertices))


def _component(g, colorset, start):
    """Vertices reachable from start using only colorset edges."""
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for c in colorset:
            w, _ = g.neighbor(v, c)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def residues(g, colorset):
    """Components of the colorset-induced subgraph, by minimum vertex.

    An empty colorset yields one residue per vertex.
    """
    colorset = frozenset(colorset)
    cached = g._residue_cache.get(colorset)
    if cached is not None:
        return cached
    out = []
    unseen = set(range(g.nv))
    while unseen:
        start = min(unseen)
        comp = _component(g, colorset, start)
        unseen -= comp
        eids = {g.incident(v, c) for v in comp for c in colorset}
        out.append(Residue(colorset, tuple(sorted(comp)), tuple(sorted(eids))))
    out = tuple(out)
    g._residue_cache[colorset] = out
    return out


class ResidueCensus:
    """Counts of colorset residues; pairs and triples precomputed."""

    def __init__(self, g):
        self._g = g
        self.counts = {}
        cols = list(g.colors)
        for r in (2, 3):
            for sub in itertools.combinations(cols, r):
                key = frozenset(sub)
                self.counts[key] = len(residues(g, key))

    def g_of(self, *colors):
        key = frozenset(colors)
        if key not in self.counts:
            self.counts[key] = len(residues(self._g, key))
        return self.counts[key]


def residue_census(g):
    return ResidueCensus(g)


# -- bipartiteness -----------------------------------------------------

def is_bipartite(g):
    """(True, class list) or (False, odd closed walk as vertex list).

    The class list assigns 0/1 per vertex with class(0) == 0.
    """
    if g._bipart is not None:
        return g._bipart
    cls = [None] * g.nv
    parent = [None] * g.nv          # (prev vertex) for witness recovery
    cls[0] = 0
    queue = deque([0])
    result = None
    while queue and result is None:
        v = queue.popleft()
        for c in g.colors:
            w, _ = g.neighbor(v, c)
            if cls[w] is None:
                cls[w] = cls[v] ^ 1
                parent[w] = v
                queue.append(w)
            elif cls[w] == cls[v]:
                result = (False, _odd_walk(parent, v, w))
                break
    if result is None:
        result = (True, tuple(cls))
    g._bipart = result
    return result


def _odd_walk(parent, v, w):
    """Closed odd walk using BFS tree paths and the edge v-w."""
    anc = [v]
    while parent[anc[-1]] is not None:
        anc.append(parent[anc[-1]])
    pos = {u: i for i, u in enumerate(anc)}
    path_w = [w]
    while path_w[-1] not in pos:
        path_w.append(parent[path_w[-1]])
    lca = path_w[-1]
    # lca -> ... -> v, cross to w, climb back down to just above lca
    return tuple(reversed(anc[:pos[lca] + 1])) + tuple(path_w[:-1])


# -- bicolored cycles ---------------------------------------------------

class Cycle:
    """A {c,d}-colored cycle as a closed alternating walk.

    steps[i] = (edge id, +1 or -1); +1 traverses the stored edge from
    its low to its high endpoint.  The walk starts at the minimum
    vertex of the cycle along its min(c, d)-colored edge.
    """

    __slots__ = ("colors", "vertices", "steps")

    def __init__(self, colors, vertices, steps):
        self.colors = colors
        self.vertices = vertices    # visit order, len == len(steps)
        self.steps = steps

    @property
    def edge_ids(self):
        return tuple(e for e, _ in self.steps)

    def __len__(self):
        return len(self.steps)

    def __repr__(self):
        return "Cycle(colors=%s, length=%d, start=%d)" % (
            sorted(self.colors), len(self.steps), self.vertices[0])


def bicolored_cycles(g, c, d):
    """All {c,d}-cycles, ordered by their minimum vertex."""
    if c == d:
        raise GemError("need two distinct colors")
    seen = set()
    out = []
    for start in range(g.nv):
        if start in seen:
            continue
        verts = []
        steps = []
        v = start
        col = min(c, d)
        while True:
            verts.append(v)
            seen.add(v)
            w, eid = g.neighbor(v, col)
            u, _, _ = g.edges[eid]
            steps.append((eid, 1 if u == v else -1))
            v = w
            col = c if col == d else d
            if v == start and col == min(c, d):
                break
        out.append(Cycle(frozenset((c, d)), tuple(verts), tuple(steps)))
    return out


# -- manifold-preserving constructions ---------------------------------

def blob_insert(g, edge_id):
    """Insert a pair of vertices joined by all colors but one.

    The chosen edge u-v of color c is cut into u-x and y-v and the new
    vertices x, y are joined by edges of every color except c.  The
    encoded manifold is unchanged; the order grows by 2.
    """
    u, v, c = g.edges[edge_id]
    x, y = g.nv, g.nv + 1
    new_edges = [e for i, e in enumerate(g.edges) if i != edge_id]
    new_edges.append((u, x, c))
    new_edges.append((y, v, c))
    for col in g.colors:
        if col != c:
            new_edges.append((x, y, col))
    return ColoredGraph.build(g.n, new_edges)


def connected_sum(g1, g2, v1, v2):
    """Weld two graphs along deleted vertices v1 and v2.

    For each color the dangling ends left by the deletions are joined.
    When both graphs are bipartite the deleted vertices must lie in
    opposite canonical classes, which keeps the result bipartite with
    the orientation conventions used elsewhere.
    """
    if g1.n != g2.n:
        raise DimensionMismatchError(
            "dimensions differ: %d vs %d" % (g1.n, g2.n))
    b1, c1 = is_bipartite(g1)
    b2, c2 = is_bipartite(g2)
    if b1 and b2 and c1[v1] == c2[v2]:
        raise GemError(
            "vertices %d and %d lie in the same bipartition class" % (v1, v2))

    # g1 keeps its vertex order minus v1; g2 is appended minus v2.
    map1 = {}
    nxt = 0
    for w in range(g1.nv):
        if w != v1:
            map1[w] = nxt
            nxt += 1
    map2 = {}
    for w in range(g2.nv):
        if w != v2:
            map2[w] = nxt
            nxt += 1

    new_edges = []
    for u, w, c in g1.edges:
        if v1 not in (u, w):
            new_edges.append((map1[u], map1[w], c))
    for u, w, c in g2.edges:
        if v2 not in (u, w):
            new_edges.append((map2[u], map2[w], c))
    for c in g1.colors:
        a1 = g1.other_end(g1.incident(v1, c), v1)
        a2 = g2.other_end(g2.incident(v2, c), v2)
        new_edges.append((map1[a1], map2[a2], c))
    return ColoredGraph.build(g1.n, new_edges)


def residue_subgem(g, res):
    """Extract a residue as a standalone lower-dimensional graph.

    Colors are relabeled order-preservingly to 0..len(colors)-1 and
    vertices to 0..order-1.  Returns (graph, vertex_map, color_map)
    where the maps send parent ids to the new ids.
    """
    cols = sorted(res.colors)
    cmap = {c: i for i, c in enumerate(cols)}
    vmap = {v: i for i, v in enumerate(res.vertices)}
    edges = [(vmap[g.edges[e][0]], vmap[g.edges[e][1]], cmap[g.edges[e][2]])
             for e in res.edge_ids]
    return ColoredGraph.build(len(cols) - 1, edges), vmap, cmap


def standard_sphere_gem(n):
    """The order-2 gem of the n-sphere: two vertices, all colors."""
    return ColoredGraph.build(n, [(0, 1, c) for c in range(n + 1)])


def find_dipole(g):
    """First cancellable dipole as (u, v, colors), or None.

    A pair joined by exactly the colors S is a dipole when the two
    vertices lie in different residues of the complementary colors;
    cancelling such a pair preserves the represented manifold.
    """
    joins = {}
    for u, v, c in g.edges:
        joins.setdefault((u, v), set()).add(c)
    for (u, v), S in sorted(joins.items()):
        if len(S) == g.n + 1:
            continue
        comp = frozenset(g.colors) - S
        for res in residues(g, comp):
            vset = set(res.vertices)
            if u in vset:
                if v not in vset:
                    return (u, v, frozenset(S))
                break
    return None


def cancel_dipole(g, u, v, colors):
    """Delete a dipole pair and weld the dangling ends color-wise."""
    colors = frozenset(colors)
    keep = [w for w in range(g.nv) if w != u and w != v]
    remap = {w: i for i, w in enumerate(keep)}
    edges = []
    for a, b, c in g.edges:
        if a == u or a == v or b == u or b == v:
            continue
        edges.append((remap[a], remap[b], c))
    for c in g.colors:
        if c in colors:
            continue
        a = g.neighbor(u, c)[0]
        b = g.neighbor(v, c)[0]
        edges.append((remap[a], remap[b], c))
    return build_graph(g.n, edges)
