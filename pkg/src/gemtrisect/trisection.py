"""Square complexes, stabilization sets and collapse orderings.

With a distinguished apex color, each apex-colored edge of a 5-colored
gem spans a square whose four sides lie on the bicolored {apex,i}
cycles through the edge.  The middle piece of the induced decomposition
collapses to a graph exactly when the squares can be removed one free
side at a time; squares that block the collapse are stabilized instead,
and each stabilization raises the central surface genus by one.
"""

from __future__ import annotations

import heapq
import itertools

from .embedding import CyclicPermutation, rho, subgraph_rho
from .graphs import GemError, bicolored_cycles, residues


class ApexResidueDisconnected(GemError):
    """The subgraph missing the apex color must be connected."""


class Incomplete(GemError):
    """Stuck collapse: no residual square has a free side.

    Attributes:
        residual: square edge ids still unplaced, ascending.
        cycle_counts: unplaced-square count per Q1 edge at the stuck state.
    """

    def __init__(self, residual, cycle_counts):
        self.residual = tuple(sorted(residual))
        self.cycle_counts = tuple(cycle_counts)
        super().__init__("collapse stuck with %d residual squares"
                         % len(self.residual))


class Q1Edge:
    """One {apex,i}-cycle, seen as an edge of the mixed-residue graph."""

    __slots__ = ("index", "color", "cycle_index", "cycle", "nodes",
                 "squares")

    def __init__(self, index, color, cycle_index, cycle, nodes, squares):
        self.index = index
        self.color = color              # i, the non-apex color of the cycle
        self.cycle_index = cycle_index  # position among {apex,i}-cycles
        self.cycle = cycle
        self.nodes = nodes              # pair of q1 node ids, low first
        self.squares = squares          # apex edge ids on the cycle

    def __repr__(self):
        return "Q1Edge(%d, color=%d, squares=%s)" % (
            self.index, self.color, list(self.squares))


class QComplex:
    """Squares (apex edges) glued along {apex,i}-cycles.

    q1_nodes[j] = (colorset, residue) for the mixed 3-residues, the
    colorsets being {i, j, apex} with i from the even and j from the
    odd positions of eps.  sides[e][i] is the q1 edge index of the
    {apex,i}-cycle through square e.
    """

    __slots__ = ("graph", "eps", "apex", "squares", "q1_nodes", "q1_edges",
                 "sides")

    def __init__(self, graph, eps, apex, squares, q1_nodes, q1_edges, sides):
        self.graph = graph
        self.eps = eps
        self.apex = apex
        self.squares = squares
        self.q1_nodes = q1_nodes
        self.q1_edges = q1_edges
        self.sides = sides

    @property
    def p(self):
        return len(self.squares)


def _require_apex(g, eps, apex):
    if g.n != 4:
        raise GemError("square complex needs dimension 4, got %d" % g.n)
    eps = eps if isinstance(eps, CyclicPermutation) else CyclicPermutation(eps)
    if eps.seq[-1] != apex:
        raise GemError("apex %d must sit last in the cyclic order %s"
                       % (apex, list(eps.seq)))
    others = frozenset(g.colors) - {apex}
    if len(residues(g, others)) != 1:
        raise ApexResidueDisconnected(
            "complement of color %d splits into %d residues"
            % (apex, len(residues(g, others))))
    return eps


def build_Q(g, eps, apex=4):
    """Square complex of the gem for the given cyclic order."""
    eps = _require_apex(g, eps, apex)
    e0, e1, e2, e3 = eps.seq[:4]
    family_of = {}
    for i in (e0, e2):
        for j in (e1, e3):
            s = frozenset((i, j, apex))
            family_of.setdefault(i, []).append(s)
            family_of.setdefault(j, []).append(s)
    for c in (e0, e1, e2, e3):
        family_of[c].sort(key=sorted)

    q1_nodes = []
    node_of = {}            # (colorset, vertex) -> node id
    for s in sorted({fam for fams in family_of.values() for fam in fams},
                    key=sorted):
        for res in residues(g, s):
            nid = len(q1_nodes)
            q1_nodes.append((s, res))
            for v in res.vertices:
                node_of[(s, v)] = nid

    q1_edges = []
    sides = {eid: {} for eid in g.edge_ids(apex)}
    for i in sorted(c for c in g.colors if c != apex):
        fam_a, fam_b = family_of[i]
        for ci, cyc in enumerate(bicolored_cycles(g, i, apex)):
            v0 = cyc.vertices[0]
            nodes = tuple(sorted((node_of[(fam_a, v0)],
                                  node_of[(fam_b, v0)])))
            sqs = tuple(sorted(e for e in cyc.edge_ids
                               if g.edges[e][2] == apex))
            edge = Q1Edge(len(q1_edges), i, ci, cyc, nodes, sqs)
            q1_edges.append(edge)
            for e in sqs:
                sides[e][i] = edge.index

    for e, by_color in sides.items():
        if len(by_color) != 4:
            raise GemError("square %d has %d sides" % (e, len(by_color)))
    return QComplex(g, eps, apex, tuple(sorted(sides)), tuple(q1_nodes),
                    tuple(q1_edges), sides)


def stabilization_set(g, eps, apex=4):
    """Spanning forest of apex edges over the {eps0,eps3}-cycles.

    Contracting every {eps0,eps3}-cycle of the gem to a point leaves the
    apex edges as a multigraph whose components match the
    {eps0,eps3,apex}-residues; a spanning forest of it (lowest edge ids
    first) is the stabilization set, of size
    g_{eps0,eps3} - g_{eps0,eps3,apex}.
    """
    eps = _require_apex(g, eps, apex)
    e0, e3 = eps.seq[0], eps.seq[3]
    cyc_of = {}
    for idx, cyc in enumerate(bicolored_cycles(g, e0, e3)):
        for v in cyc.vertices:
            cyc_of[v] = idx

    parent = list(range(len(bicolored_cycles(g, e0, e3))))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    forest = []
    for eid in g.edge_ids(apex):
        u, v, _ = g.edges[eid]
        a, b = find(cyc_of[u]), find(cyc_of[v])
        if a != b:
            parent[a] = b
            forest.append(eid)
    return tuple(forest)


class CollapseOrdering:
    """A placement of every square: stabilized prefix, collapsed suffix.

    witnesses[j] = (color, q1 edge index) for collapsed[j]: the cycle
    whose other squares were all placed earlier, freeing the side.
    """

    __slots__ = ("stabilized", "collapsed", "witnesses")

    def __init__(self, stabilized, collapsed, witnesses):
        self.stabilized = tuple(stabilized)
        self.collapsed = tuple(collapsed)
        self.witnesses = tuple(witnesses)

    @property
    def k(self):
        return len(self.stabilized)

    @property
    def sequence(self):
        return self.stabilized + self.collapsed

    def __repr__(self):
        return "CollapseOrdering(k=%d, collapsed=%d)" % (
            self.k, len(self.collapsed))


def collapse_schedule(Q, stabilized):
    """Greedy free-side collapse after placing `stabilized` up front.

    A square is schedulable when one of its four cycles has no other
    unplaced square.  Ties break to the lowest square id, then the
    lowest q1 edge index for the witness.  Raises Incomplete when the
    residual squares all sit on cycles with two or more of them.
    """
    stabilized = tuple(sorted(set(stabilized)))
    square_set = set(Q.squares)
    for e in stabilized:
        if e not in square_set:
            raise GemError("edge %d is not a square of the complex" % e)

    unplaced_on = [set(edge.squares) for edge in Q.q1_edges]
    placed = set()
    heap = []

    def place(e):
        placed.add(e)
        for idx in Q.sides[e].values():
            unplaced_on[idx].discard(e)
            if len(unplaced_on[idx]) == 1:
                heapq.heappush(heap, (next(iter(unplaced_on[idx])), idx))

    for e in stabilized:
        place(e)
    for idx, on in enumerate(unplaced_on):
        if len(on) == 1:
            heapq.heappush(heap, (next(iter(on)), idx))

    collapsed = []
    witnesses = []
    while heap:
        e, idx = heapq.heappop(heap)
        if e in placed or unplaced_on[idx] != {e}:
            continue
        # e may sit alone on several cycles; report the lowest one
        best = min(i for i in Q.sides[e].values() if unplaced_on[i] == {e})
        collapsed.append(e)
        witnesses.append((Q.q1_edges[best].color, best))
        place(e)

    if len(placed) != len(Q.squares):
        residual = [e for e in Q.squares if e not in placed]
        raise Incomplete(residual, (len(s) for s in unplaced_on))
    return CollapseOrdering(stabilized, collapsed, witnesses)


def verify_ordering(Q, ordering):
    """Re-check an ordering against the free-side property.

    Independent of the scheduler: verifies the placement is a
    permutation of the squares and that each collapsed square is the
    last unplaced one on its witness cycle.  Returns (True, None) or
    (False, first violation message).
    """
    seq = ordering.sequence
    if sorted(seq) != list(Q.squares):
        return False, "placement is not a permutation of the squares"
    if len(ordering.witnesses) != len(ordering.collapsed):
        return False, "witness count differs from collapsed count"
    position = {e: j for j, e in enumerate(seq)}
    k = ordering.k
    for j, (e, (color, idx)) in enumerate(
            zip(ordering.collapsed, ordering.witnesses)):
        edge = Q.q1_edges[idx]
        if edge.color != color:
            return False, ("witness for square %d names color %d but cycle "
                           "%d has color %d" % (e, color, idx, edge.color))
        if e not in edge.squares:
            return False, ("square %d does not lie on its witness cycle %d"
                           % (e, idx))
        late = [f for f in edge.squares
                if f != e and position[f] > position[e]]
        if late:
            return False, ("square %d placed before square %d on its "
                           "witness cycle %d" % (late[0], e, idx))
    return True, None


class TrisectionCertificate:
    """Outcome of a scheduled collapse for one cyclic order.

    genus = rho of the apex-free subgraph plus the stabilization count;
    mode records whether the gem was certified closed or bounded.  The
    ledger slot is filled by the invariant bookkeeping stage.
    """

    __slots__ = ("eps", "apex", "ordering", "k", "genus", "mode",
                 "rho_surface", "rho_base", "ledger")

    def __init__(self, eps, apex, ordering, genus, mode, rho_surface,
                 rho_base):
        self.eps = eps
        self.apex = apex
        self.ordering = ordering
        self.k = ordering.k
        self.genus = genus
        self.mode = mode
        self.rho_surface = rho_surface
        self.rho_base = rho_base
        self.ledger = None

    def sort_key(self):
        return (self.genus, self.k, self.eps.seq)

    def as_dict(self):
        def num(x):
            return int(x) if x.denominator == 1 else str(x)
        return {
            "eps": list(self.eps.seq),
            "apex": self.apex,
            "k": self.k,
            "genus": num(self.genus),
            "mode": self.mode,
            "rho_surface": num(self.rho_surface),
            "rho_base": num(self.rho_base),
            "stabilized": list(self.ordering.stabilized),
            "collapsed": list(self.ordering.collapsed),
            "witnesses": [list(w) for w in self.ordering.witnesses],
        }

    def __repr__(self):
        return "TrisectionCertificate(genus=%s, k=%d, eps=%s)" % (
            self.genus, self.k, list(self.eps.seq))


def certificate(g, eps, ordering, apex=4, mode="closed"):
    """Assemble a certificate from a completed ordering."""
    eps = _require_apex(g, eps, apex)
    base = subgraph_rho(g, eps, apex)
    if isinstance(base, list):
        raise ApexResidueDisconnected(
            "complement of color %d is disconnected" % apex)
    return TrisectionCertificate(eps, apex, ordering, base + ordering.k,
                                 mode, rho(g, eps), base)


def minimize_k(g, eps, budget=0, apex=4, mode="closed"):
    """Search for a small stabilization set; never worse than the forest.

    Greedy from the empty set; each failure stabilizes one residual
    square whose cycles are closest to free (lowest unplaced counts,
    then lowest id).  If the additions reach the forest size the forest
    itself is used, which always schedules.  A positive budget
    additionally tries explicit subsets (smallest first, at most
    `budget` schedule attempts) below the best size found.
    """
    eps = _require_apex(g, eps, apex)
    Q = build_Q(g, eps, apex)
    forest = stabilization_set(g, eps, apex)

    stab = []
    best = None
    while True:
        try:
            best = collapse_schedule(Q, stab)
            break
        except Incomplete as stuck:
            if len(stab) + 1 >= len(forest):
                best = collapse_schedule(Q, forest)
                break
            counts = stuck.cycle_counts

            def key(e):
                return (min(counts[i] for i in Q.sides[e].values()), e)
            stab.append(min(stuck.residual, key=key))

    if budget > 0 and best.k > 0:
        attempts = 0
        done = False
        for size in range(best.k):
            for combo in itertools.combinations(Q.squares, size):
                if attempts >= budget:
                    done = True
                    break
                attempts += 1
                try:
                    best = collapse_schedule(Q, combo)
                    done = True
                    break
                except Incomplete:
                    continue
            if done:
                break

    return certificate(g, eps, best, apex, mode)
