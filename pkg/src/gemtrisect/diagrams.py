"""Curve systems on the stabilized central surface, with verification.

The three systems live combinatorially on the surface built by
`stabilized_surface`: alpha and beta are bicolored cycles of the two
color pairs that avoid the apex (minus a spanning forest's worth per
wall graph, plus the handle meridians), gamma is the surviving part of
the square-complex 1-skeleton, rewritten through witness cycles until
no apex edge remains.

Verification is homological plus cut-combinatorial: curves are resolved
into disjoint parallel strands inside edge corridors, crossings are
decided at vertex disks by the rotation order, and cutting is checked
by region bookkeeping.  Cross-system geometric disjointness is not
claimed; intersection numbers are the honest surrogate.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from functools import cmp_to_key

from .embedding import CyclicPermutation, stabilized_surface
from .graphs import (GemError, bicolored_cycles, is_bipartite, residues,
                     residue_subgem)
from .homology import _snf_divisors, pi1_presentation
from .trisection import build_Q


class CountMismatch(GemError):
    """A curve system's size disagrees with the certified genus."""


class ExpansionDiverged(GemError):
    """Witness rewriting failed to terminate (broken ordering)."""


class UnsupportedFormat(GemError):
    pass


# -- curves and wall graphs ------------------------------------------------

class Curve:
    """Closed walk on the stabilized surface, in label vocabulary.

    steps: ("e", gem edge id, +-1) traverses an apex-free edge (+1 is
    low to high); ("h", j, +-1) runs through handle j (+1 from the low
    endpoint of the stabilized edge); ("sc", j) is the meridian of
    handle j.  Handle indices are 0-based here, 1-based in exports.
    """

    __slots__ = ("kind", "steps", "cycle_index")

    def __init__(self, kind, steps, cycle_index=None):
        self.kind = kind
        self.steps = tuple(steps)
        self.cycle_index = cycle_index

    def multiplicities(self):
        """Edge id -> number of traversals, direction-blind."""
        out = {}
        for s in self.steps:
            if s[0] == "e":
                out[s[1]] = out.get(s[1], 0) + 1
        return out

    def __len__(self):
        return len(self.steps)

    def __repr__(self):
        return "Curve(%s, steps=%d, from=%r)" % (
            self.kind, len(self.steps), self.cycle_index)


class WallGraph:
    """Residue pair families joined by the complementary bicolored cycles.

    For node families c, d the edges are the {a,b}-cycles of the other
    two non-apex colors; each cycle joins the hat-c and hat-d residues
    (of the apex-free subgraph) containing it.
    """

    __slots__ = ("families", "cycle_colors", "nodes", "edges", "cycles",
                 "forest")

    def __init__(self, families, cycle_colors, nodes, edges, cycles, forest):
        self.families = families        # two node colorsets
        self.cycle_colors = cycle_colors
        self.nodes = nodes              # (colorset, residue) per node
        self.edges = edges              # (cycle index, node a, node b)
        self.cycles = cycles
        self.forest = forest            # cycle indices, minimum-id greedy

    def __repr__(self):
        return "WallGraph(nodes=%d, edges=%d, forest=%d)" % (
            len(self.nodes), len(self.edges), len(self.forest))


def _wall_graph(g, node_colors, cycle_colors, apex):
    delta3 = frozenset(g.colors) - {apex}
    fams = sorted((delta3 - {c} for c in node_colors), key=sorted)
    nodes = []
    node_of = {}
    for fam in fams:
        for res in residues(g, fam):
            node_of[(fam, res.vertices[0])] = len(nodes)
            for v in res.vertices:
                node_of[(fam, v)] = len(nodes)
            nodes.append((fam, res))
    a, b = sorted(cycle_colors)
    cycles = bicolored_cycles(g, a, b)
    edges = []
    parent = list(range(len(nodes)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    forest = []
    for ci, cyc in enumerate(cycles):
        v0 = cyc.vertices[0]
        na, nb = node_of[(fams[0], v0)], node_of[(fams[1], v0)]
        edges.append((ci, na, nb))
        ra, rb = find(na), find(nb)
        if ra != rb:
            parent[ra] = rb
            forest.append(ci)
    return WallGraph(tuple(fams), frozenset(cycle_colors), tuple(nodes),
                     tuple(edges), tuple(cycles), tuple(forest))


def wall_graphs(g, eps, apex=4):
    """(K over the {eps0,eps2} families, K over {eps1,eps3}).

    The first carries the {eps1,eps3}-cycles as edges and prunes beta;
    the second carries {eps0,eps2}-cycles and prunes alpha.
    """
    eps = eps if isinstance(eps, CyclicPermutation) else CyclicPermutation(eps)
    e0, e1, e2, e3 = eps.seq[:4]
    k02 = _wall_graph(g, (e0, e2), (e1, e3), apex)
    k13 = _wall_graph(g, (e1, e3), (e0, e2), apex)
    return k02, k13


def _cycle_curve(kind, cyc, index):
    return Curve(kind, tuple(("e", eid, d) for eid, d in cyc.steps), index)


def alpha_beta_curves(g, eps, certificate):
    """Wall cycles minus forests, plus one meridian per handle, per side."""
    eps = eps if isinstance(eps, CyclicPermutation) else CyclicPermutation(eps)
    k02, k13 = wall_graphs(g, eps, certificate.apex)
    k = certificate.k
    genus = certificate.genus
    if genus.denominator != 1:
        raise CountMismatch("non-integral genus %s" % genus)
    genus = int(genus)
    alpha = [_cycle_curve("alpha", cyc, ci)
             for ci, cyc in enumerate(k13.cycles) if ci not in k13.forest]
    beta = [_cycle_curve("beta", cyc, ci)
            for ci, cyc in enumerate(k02.cycles) if ci not in k02.forest]
    for j in range(k):
        alpha.append(Curve("stab_circle", (("sc", j),)))
        beta.append(Curve("stab_circle", (("sc", j),)))
    if len(alpha) != genus or len(beta) != genus:
        raise CountMismatch(
            "expected %d curves per side, built %d alpha / %d beta"
            % (genus, len(alpha), len(beta)))
    return alpha, beta


# -- gamma: surviving Q1 edges, expanded through witnesses ----------------

def gamma_curves(Q, certificate):
    """Expand the non-witness, non-forest {apex,i}-cycles to surface walks.

    Every apex edge inside a surviving cycle is rewritten: stabilized
    edges become handle traversals, collapsed edges are replaced by the
    rest of their witness cycle, walked against the cycle orientation.
    The ordering property bounds the rewriting depth by the number of
    squares; exceeding it raises ExpansionDiverged.
    """
    g = Q.graph
    apex = Q.apex
    ordering = certificate.ordering
    handle_of = {e: j for j, e in enumerate(ordering.stabilized)}
    witness_of = {e: idx for e, (_, idx) in
                  zip(ordering.collapsed, ordering.witnesses)}

    witness_set = set(witness_of.values())
    if len(witness_set) != len(ordering.collapsed):
        raise GemError("witness cycles are not distinct")

    parent = list(range(len(Q.q1_nodes)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    forest = set()
    for edge in Q.q1_edges:
        if edge.index in witness_set:
            continue
        ra, rb = find(edge.nodes[0]), find(edge.nodes[1])
        if ra != rb:
            parent[ra] = rb
            forest.add(edge.index)

    cache = {}
    in_progress = set()

    def expand(e, d):
        key = (e, d)
        if key in cache:
            return cache[key]
        if key in in_progress or len(in_progress) > len(Q.squares):
            raise ExpansionDiverged("rewriting loop through edge %d" % e)
        if e in handle_of:
            out = (("h", handle_of[e], d),)
            cache[key] = out
            return out
        in_progress.add(key)
        if e not in witness_of:
            raise GemError("apex edge %d is neither stabilized nor collapsed"
                           % e)
        cyc = Q.q1_edges[witness_of[e]].cycle
        x = next(i for i, (eid, _) in enumerate(cyc.steps) if eid == e)
        d_c = cyc.steps[x][1]
        L = len(cyc.steps)
        if d == d_c:
            # against the cycle: walk the complement backwards, inverted
            raw = [(cyc.steps[(x - 1 - t) % L][0],
                    -cyc.steps[(x - 1 - t) % L][1]) for t in range(L - 1)]
        else:
            raw = [cyc.steps[(x + 1 + t) % L] for t in range(L - 1)]
        out = []
        for eid, dd in raw:
            if g.edges[eid][2] == apex:
                out.extend(expand(eid, dd))
            else:
                out.append(("e", eid, dd))
        in_progress.discard(key)
        cache[key] = tuple(out)
        return cache[key]

    gamma = []
    for edge in Q.q1_edges:
        if edge.index in witness_set or edge.index in forest:
            continue
        steps = []
        for eid, d in edge.cycle.steps:
            if g.edges[eid][2] == apex:
                steps.extend(expand(eid, d))
            else:
                steps.append(("e", eid, d))
        gamma.append(Curve("gamma", _reduce_steps(steps), edge.index))
    return gamma


def _step_inverse(s):
    return (s[0], s[1], -s[2])


def _reduce_steps(steps):
    """Cyclic free reduction of a label walk."""
    out = []
    for s in steps:
        if out and s[0] != "sc" and out[-1] == _step_inverse(s):
            out.pop()
        else:
            out.append(s)
    while len(out) >= 2 and out[0][0] != "sc" and out[-1] == _step_inverse(out[0]):
        out.pop()
        out.pop(0)
    return tuple(out)


# -- curves as half-edge walks on the surface scheme ----------------------

def _to_walk(surf, curve):
    """Leaving half-edges of the curve on the stabilized scheme."""
    walk = []
    for s in curve.steps:
        if s[0] == "e":
            idx = surf.edge_of_gem[s[1]]
            walk.append(2 * idx if s[2] > 0 else 2 * idx + 1)
        elif s[0] == "h":
            h = surf.handles[s[1]]
            if s[2] > 0:
                walk.extend((2 * h.a, 2 * h.b))
            else:
                walk.extend((2 * h.b + 1, 2 * h.a + 1))
        elif s[0] == "sc":
            walk.append(2 * surf.handles[s[1]].m)
        else:
            raise GemError("unknown step %r" % (s,))
    walk = _reduce_walk(walk)
    vo = surf.scheme.vertex_of
    for i, h in enumerate(walk):
        if vo[walk[(i + 1) % len(walk)]] != vo[h ^ 1]:
            raise GemError("curve walk does not close up")
    return tuple(walk)


def _reduce_walk(walk):
    out = []
    for h in walk:
        if out and out[-1] == (h ^ 1):
            out.pop()
        else:
            out.append(h)
    while len(out) >= 2 and out[0] == (out[-1] ^ 1):
        out.pop()
        out.pop(0)
    return out


def _ccw_rotations(surf):
    """Rotations in counterclockwise order under the global orientation.

    Stored rotations of one bipartition class read clockwise; the class
    data extends to handle vertices, so reversing that class orients
    every disk coherently (handle a-edges are sign-reversing, b and m
    are not).
    """
    if surf.classes is None:
        raise GemError("curve verification needs a bipartite gem")
    rots = []
    pos = {}
    for v, slots in enumerate(surf.scheme.rot):
        ccw = tuple(slots) if surf.classes[v] == 0 else tuple(reversed(slots))
        rots.append(ccw)
        for i, h in enumerate(ccw):
            pos[h] = i
    return rots, pos


def _walk_chords(surf, walk):
    """(vertex, arriving half-edge, leaving half-edge) per walk step."""
    vo = surf.scheme.vertex_of
    out = []
    for i, h in enumerate(walk):
        t = walk[i - 1] ^ 1
        out.append((vo[h], t, h))
    return out


def _signed_intersection(surf, walk_a, walk_b, pos, deg_of):
    """Signed count of crossings, curve b pushed off to its left.

    Chords of a sit at exact slot positions (scaled by 3); chords of b
    enter just clockwise and leave just counterclockwise of their
    slots, so interleaving is never ambiguous and the total equals the
    homological pairing.
    """
    if not walk_a or not walk_b:
        return 0
    by_vertex = {}
    for w, t, h in _walk_chords(surf, walk_a):
        by_vertex.setdefault(w, ([], []))[0].append((t, h))
    for w, t, h in _walk_chords(surf, walk_b):
        by_vertex.setdefault(w, ([], []))[1].append((t, h))
    total = 0
    for w, (ca, cb) in by_vertex.items():
        if not ca or not cb:
            continue
        n = 3 * deg_of[w]

        def arc(x, lo, hi):
            return (x - lo) % n < (hi - lo) % n
        for ta, ha in ca:
            pa_t, pa_h = 3 * pos[ta], 3 * pos[ha]
            for tb, hb in cb:
                pb_t, pb_h = (3 * pos[tb] - 1) % n, (3 * pos[hb] + 1) % n
                if arc(pb_t, pa_t, pa_h) and arc(pb_h, pa_h, pa_t):
                    total += 1
                elif arc(pb_h, pa_t, pa_h) and arc(pb_t, pa_h, pa_t):
                    total -= 1
    return total


# -- corridor lanes and crossing-free resolution ---------------------------

class _Traversal:
    __slots__ = ("walk_id", "step", "edge", "down")

    def __init__(self, walk_id, step, edge, down):
        self.walk_id = walk_id
        self.step = step
        self.edge = edge
        self.down = down      # True when traversing high -> low


def _corridor_map(walks):
    corridors = {}
    for wi, walk in enumerate(walks):
        for i, h in enumerate(walk):
            t = _Traversal(wi, i, h >> 1, bool(h & 1))
            corridors.setdefault(h >> 1, []).append(t)
    return corridors


def _up_exits(walks, trav):
    """Leaving half-edges after each vertex, viewed travelling low->high.

    For a downward traversal the walk is read backwards; reversing a
    closed walk visits the same geometric strand.
    """
    walk = walks[trav.walk_id]
    L = len(walk)
    if not trav.down:
        j = trav.step
        while True:
            j = (j + 1) % L
            yield walk[j]
    else:
        j = trav.step
        while True:
            j = (j - 1) % L
            yield walk[j] ^ 1


def _lane_orders(surf, walks, corridors, pos):
    """Deterministic lane index per corridor traversal.

    Strands sharing a corridor are followed upward in lockstep until
    they diverge; the strand leaving closer counterclockwise to the
    shared arrival slot takes the lower lane.  Fully parallel strands
    order by (walk, step).  The final non-crossing check is the
    arbiter, so the comparator only has to be deterministic.
    """
    lanes = {}
    for e, travs in corridors.items():
        if len(travs) == 1:
            lanes[(travs[0].walk_id, travs[0].step)] = 0
            continue

        def compare(tx, ty):
            if tx.walk_id == ty.walk_id and tx.step == ty.step:
                return 0
            gx, gy = _up_exits(walks, tx), _up_exits(walks, ty)
            t_in = 2 * e + 1      # arrival half-edge at the high end
            limit = len(walks[tx.walk_id]) * len(walks[ty.walk_id]) + 1
            for _ in range(limit):
                hx, hy = next(gx), next(gy)
                if hx != hy:
                    w_deg = len(surf.scheme.rot[
                        surf.scheme.vertex_of[t_in]])
                    dx = (pos[hx] - pos[t_in]) % w_deg
                    dy = (pos[hy] - pos[t_in]) % w_deg
                    return -1 if dx < dy else 1
                t_in = hx ^ 1
            key_x = (tx.walk_id, tx.step)
            key_y = (ty.walk_id, ty.step)
            return -1 if key_x < key_y else 1

        for lane, t in enumerate(sorted(travs, key=cmp_to_key(compare))):
            lanes[(t.walk_id, t.step)] = lane
    return lanes


class _Resolution:
    """Marks (strand ports, ccw order) and chords per vertex disk."""

    __slots__ = ("marks", "index", "chords", "lane_count")

    def __init__(self, marks, index, chords, lane_count):
        self.marks = marks          # vertex -> [(slot, micro, port)]
        self.index = index          # port -> mark position
        self.chords = chords        # vertex -> [(mark a, mark b)]
        self.lane_count = lane_count


def _resolve(surf, walks, corridors, lanes, pos):
    vo = surf.scheme.vertex_of
    lane_count = {e: len(ts) for e, ts in corridors.items()}
    marks = {v: [] for v in range(surf.scheme.nv)}
    for e, travs in corridors.items():
        m = len(travs)
        for t in travs:
            lane = lanes[(t.walk_id, t.step)]
            for end, micro in ((0, lane), (1, m - 1 - lane)):
                h = 2 * e + end
                port = (t.walk_id, t.step, end)
                marks[vo[h]].append((pos[h], micro, port))
    index = {}
    for v in marks:
        marks[v].sort()
        for i, (_, _, port) in enumerate(marks[v]):
            index[port] = i
    chords = {v: [] for v in marks}
    for wi, walk in enumerate(walks):
        L = len(walk)
        for i, h in enumerate(walk):
            prev = walk[(i - 1) % L]
            arr = (wi, (i - 1) % L, 1 if prev % 2 == 0 else 0)
            dep = (wi, i, h & 1)
            chords[vo[h]].append((index[arr], index[dep]))
    return _Resolution(marks, index, chords, lane_count)


def _crossing_free(res):
    """Check all same-system chords pairwise non-interleaving."""
    for v, chords in res.chords.items():
        r = len(res.marks[v])
        for i in range(len(chords)):
            a, b = chords[i]
            for j in range(i + 1, len(chords)):
                c, d = chords[j]
                inside_c = (c - a) % r < (b - a) % r
                inside_d = (d - a) % r < (b - a) % r
                if inside_c != inside_d:
                    return False, (v, chords[i], chords[j])
    return True, None


def _complement_components(surf, res):
    """Count regions of the surface minus the resolved strands.

    Atoms are vertex-disk boundary arcs, corridor gaps and faces; a
    chord joins the arcs flanking its two ends on each side, corridor
    gaps open onto the arcs at their mouths, and every face meets the
    arc at each corner it turns.
    """
    uf = {}

    def find(x):
        root = x
        while uf[root] != root:
            root = uf[root]
        while uf[x] != root:
            uf[x], x = root, uf[x]
        return root

    def union(x, y):
        uf.setdefault(x, x)
        uf.setdefault(y, y)
        rx, ry = find(x), find(y)
        if rx != ry:
            uf[rx] = ry

    scheme = surf.scheme
    nv = scheme.nv
    for v in range(nv):
        r = len(res.marks[v])
        for i in range(max(r, 1)):
            uf.setdefault(("arc", v, i), ("arc", v, i))
    for e in range(len(scheme.edge_ends)):
        m = res.lane_count.get(e, 0)
        for t in range(m + 1):
            uf.setdefault(("gap", e, t), ("gap", e, t))
    for fi in range(len(surf.faces)):
        uf.setdefault(("face", fi), ("face", fi))

    # chords split disks; flanking arcs join along each side
    for v, chords in res.chords.items():
        r = len(res.marks[v])
        for a, b in chords:
            union(("arc", v, a), ("arc", v, (b - 1) % r))
            union(("arc", v, (a - 1) % r), ("arc", v, b))

    def locate(v, slot_coord):
        """Arc containing the boundary point just after slot_coord."""
        mk = res.marks[v]
        if not mk:
            return ("arc", v, 0)
        j = bisect_right(mk, (slot_coord, float("inf"), ()))
        return ("arc", v, (j - 1) % len(mk))

    vo = scheme.vertex_of
    # corridor mouths: gap t opens onto the arc between its bounding
    # ports (outermost gaps reach the arc past the first/last port)
    for e in range(len(scheme.edge_ends)):
        m = res.lane_count.get(e, 0)
        for end in (0, 1):
            h = 2 * e + end
            v = vo[h]
            slot = None
            for i, hh in enumerate(_ccw_slots(surf, v)):
                if hh == h:
                    slot = i
                    break
            if m == 0:
                union(("gap", e, 0), locate(v, slot))
                continue
            ports = [(micro, idx) for idx, (s, micro, port) in
                     enumerate(res.marks[v]) if s == slot]
            ports.sort()
            for t in range(m + 1):
                gap = t if end == 0 else m - t
                if t == 0:
                    arc = (ports[0][1] - 1) % len(res.marks[v])
                elif t == m:
                    arc = ports[m - 1][1]
                else:
                    arc = ports[t - 1][1]
                union(("gap", e, gap), ("arc", v, arc))

    # faces touch the arc at every corner their boundary walk turns
    ccw_pos = {}
    for v in range(nv):
        for i, hh in enumerate(_ccw_slots(surf, v)):
            ccw_pos[hh] = i
    for fi, orbit in enumerate(surf.faces):
        for i, h in enumerate(orbit):
            h_next = orbit[(i + 1) % len(orbit)]
            w = vo[h_next]
            t = h ^ 1
            deg = len(scheme.rot[w])
            pt, ph = ccw_pos[t], ccw_pos[h_next]
            if (pt + 1) % deg == ph:
                corner = pt
            elif (ph + 1) % deg == pt:
                corner = ph
            else:
                raise GemError("face walk skips a corner")
            union(("face", fi), locate(w, corner + 0.5))

    roots = {find(x) for x in uf}
    return len(roots)


def _ccw_slots(surf, v):
    slots = surf.scheme.rot[v]
    return tuple(slots) if surf.classes[v] == 0 else tuple(reversed(slots))


# -- assembled diagrams and verification -----------------------------------

class VerificationRecord:
    __slots__ = ("checks", "ok", "notes")

    def __init__(self, checks, ok, notes):
        self.checks = checks
        self.ok = ok
        self.notes = tuple(notes)

    def as_dict(self):
        return {"ok": self.ok, "checks": self.checks,
                "notes": list(self.notes)}

    def __repr__(self):
        flags = {k: v.get("pass") for k, v in self.checks.items()}
        return "VerificationRecord(ok=%s, %s)" % (self.ok, flags)


class TrisectionDiagram:
    """Surface plus alpha/beta/gamma systems and the verification record."""

    __slots__ = ("surface", "alpha", "beta", "gamma", "genus", "mode",
                 "record")

    def __init__(self, surface, alpha, beta, gamma, genus, mode):
        self.surface = surface
        self.alpha = tuple(alpha)
        self.beta = tuple(beta)
        self.gamma = tuple(gamma)
        self.genus = genus
        self.mode = mode        # "trisection" or "g-trisection"
        self.record = None

    def systems(self):
        return (("alpha", self.alpha), ("beta", self.beta),
                ("gamma", self.gamma))

    def __repr__(self):
        return "TrisectionDiagram(genus=%d, mode=%s, curves=%d/%d/%d)" % (
            self.genus, self.mode, len(self.alpha), len(self.beta),
            len(self.gamma))


def assemble_diagram(g, eps, certificate):
    """Build all three systems and attach the verification record."""
    eps = eps if isinstance(eps, CyclicPermutation) else CyclicPermutation(eps)
    if eps.seq != certificate.eps.seq:
        raise GemError("certificate was issued for %s, not %s"
                       % (list(certificate.eps.seq), list(eps.seq)))
    if not is_bipartite(g)[0]:
        raise GemError("trisection diagrams need a bipartite gem")
    if certificate.genus.denominator != 1:
        raise CountMismatch("non-integral genus %s" % certificate.genus)
    surf = stabilized_surface(g, eps, certificate.ordering.stabilized,
                              certificate.apex)
    alpha, beta = alpha_beta_curves(g, eps, certificate)
    Q = build_Q(g, eps, certificate.apex)
    gamma = gamma_curves(Q, certificate)
    mode = "trisection" if certificate.mode == "closed" else "g-trisection"
    d = TrisectionDiagram(surf, alpha, beta, gamma, int(certificate.genus),
                          mode)
    verify_diagram(d)
    return d


def _gf2_rank_vectors(vectors):
    basis = {}
    rank = 0
    for vec in vectors:
        while vec:
            low = vec & -vec
            if low in basis:
                vec ^= basis[low]
            else:
                basis[low] = vec
                rank += 1
                break
    return rank


def _coker(matrix_cols, size):
    divs = _snf_divisors(matrix_cols, size)
    return size - len(divs), sorted(d for d in divs if d > 1)


def verify_diagram(diagram):
    """Run the combinatorial checks and attach the record.

    counts, alpha/beta disjointness, Z/2 rank per system, the cut test
    per system (crossing-free strand resolution with connected
    complement), the (alpha, beta) pairing against the boundary
    homology, and the gamma cokernel ranks as k1/k2 candidates.
    """
    surf = diagram.surface
    g_ = diagram.genus
    checks = {}
    notes = ["verification is combinatorial: curves are resolved into "
             "corridor lanes; cross-system disjointness is not claimed"]

    counts = {name: len(curves) for name, curves in diagram.systems()}
    checks["counts"] = dict(counts, genus=g_, **{
        "pass": all(c == g_ for c in counts.values())})

    walks = {}
    for name, curves in diagram.systems():
        walks[name] = [_to_walk(surf, c) for c in curves]

    disj = {}
    for name in ("alpha", "beta"):
        vo = surf.scheme.vertex_of
        ok = True
        seen = set()
        for walk in walks[name]:
            mine = [vo[h] for h in walk]
            if len(set(mine)) != len(mine) or seen & set(mine):
                ok = False
                break
            seen |= set(mine)
        disj[name] = ok
    checks["disjoint"] = dict(disj, **{"pass": all(disj.values())})

    _, pos = _ccw_rotations(surf)
    deg_of = [len(r) for r in surf.scheme.rot]

    ne = len(surf.scheme.edge_ends)
    face_vecs = []
    for orbit in surf.faces:
        vec = 0
        for h in orbit:
            vec ^= 1 << (h >> 1)
        face_vecs.append(vec)
    base_rank = _gf2_rank_vectors(list(face_vecs))
    dim_h1 = (ne - surf.scheme.nv + 1) - base_rank
    z2 = {"dim_h1": dim_h1, "expected_dim": 2 * g_, "ranks": {},
          "self_zero": True}
    for name, ws in walks.items():
        vecs = []
        for walk in ws:
            vec = 0
            for h in walk:
                vec ^= 1 << (h >> 1)
            vecs.append(vec)
        z2["ranks"][name] = (_gf2_rank_vectors(face_vecs + vecs)
                             - base_rank)
        for walk in ws:
            if _signed_intersection(surf, walk, walk, pos, deg_of) != 0:
                z2["self_zero"] = False
    z2["pass"] = (dim_h1 == 2 * g_ and z2["self_zero"]
                  and all(r == g_ for r in z2["ranks"].values()))
    checks["z2"] = z2

    cut = {"systems": {}}
    for name, ws in walks.items():
        entry = {"resolved": False, "connected": False,
                 "chi_capped": None}
        if any(len(w) == 0 for w in ws):
            entry["empty_curve"] = True
            cut["systems"][name] = entry
            continue
        corridors = _corridor_map(ws)
        lanes = _lane_orders(surf, ws, corridors, pos)
        res = _resolve(surf, ws, corridors, lanes, pos)
        ok, witness = _crossing_free(res)
        entry["resolved"] = ok
        if not ok:
            entry["crossing_at"] = witness[0]
        else:
            pieces = _complement_components(surf, res)
            entry["connected"] = pieces == 1
            entry["pieces"] = pieces
            # cutting along disjoint circles keeps chi; capping the
            # 2 * len(ws) boundary circles gives chi of the cut-open
            # surface capped off
            entry["chi_capped"] = surf.chi + 2 * len(ws)
        cut["systems"][name] = entry
    cut["pass"] = all(e["resolved"] and e["connected"]
                      and e["chi_capped"] == 2
                      for e in cut["systems"].values())
    checks["cut"] = cut

    pair_cols = []
    for wb in walks["beta"]:
        col = {}
        for i, wa in enumerate(walks["alpha"]):
            v = _signed_intersection(surf, wa, wb, pos, deg_of)
            if v:
                col[i] = v
        pair_cols.append(col)
    rank, torsion = _coker(pair_cols, g_)
    apex_res = residues(surf.graph,
                        frozenset(surf.graph.colors) - {surf.apex})[0]
    sub, _, _ = residue_subgem(surf.graph, apex_res)
    h1b = pi1_presentation(sub).abelianization()
    expected_rank = surf.k + h1b.rank
    expected_torsion = sorted(h1b.torsion)
    checks["pairing_ab"] = {
        "rank": rank, "torsion": torsion,
        "expected_rank": expected_rank,
        "expected_torsion": expected_torsion,
        "pass": rank == expected_rank and torsion == expected_torsion,
    }

    gcok = {}
    for name, kname in (("alpha", "k1"), ("beta", "k2")):
        cols = []
        for wg_ in walks["gamma"]:
            col = {}
            for i, w in enumerate(walks[name]):
                v = _signed_intersection(surf, w, wg_, pos, deg_of)
                if v:
                    col[i] = v
            cols.append(col)
        r, tor = _coker(cols, g_)
        gcok[kname] = r
        gcok[kname + "_torsion"] = tor
    gcok["pass"] = True
    checks["gamma_cokernels"] = gcok

    ok = all(checks[c]["pass"] for c in
             ("counts", "disjoint", "z2", "cut", "pairing_ab"))
    record = VerificationRecord(checks, ok, notes)
    diagram.record = record
    return record


# -- export ----------------------------------------------------------------

def _step_json(s):
    if s[0] == "e":
        return {"t": "e", "id": s[1], "d": s[2]}
    if s[0] == "h":
        return {"t": "h", "j": s[1] + 1, "d": s[2]}
    return {"t": "sc", "j": s[1] + 1}


def diagram_json_dict(diagram):
    certificate_eps = diagram.surface.eps
    return {
        "genus": diagram.genus,
        "k": diagram.surface.k,
        "permutation": list(certificate_eps.seq),
        "alpha": [[_step_json(s) for s in c.steps] for c in diagram.alpha],
        "beta": [[_step_json(s) for s in c.steps] for c in diagram.beta],
        "gamma": [[_step_json(s) for s in c.steps] for c in diagram.gamma],
    }


def export_diagram(diagram, fmt="json"):
    """Serialize: canonical json, a dot overlay, or a best-effort svg."""
    if fmt == "json":
        payload = json.dumps(diagram_json_dict(diagram), sort_keys=True,
                             separators=(",", ":"))
        return (payload + "\n").encode("ascii")
    if fmt == "dot":
        return _export_dot(diagram)
    if fmt == "svg":
        return _export_svg(diagram)
    raise UnsupportedFormat("unknown diagram format %r" % (fmt,))


_DOT_COLORS = {"alpha": "red", "beta": "blue", "gamma": "green"}


def _export_dot(diagram):
    surf = diagram.surface
    g = surf.graph
    lines = ["graph diagram {", "  // apex-free gem with curve overlays"]
    for v in range(g.nv):
        lines.append("  v%d;" % v)
    for j in range(surf.k):
        lines.append('  x%d [shape=point, label="handle %d"];' % (j, j + 1))
    used = {}
    for name, curves in diagram.systems():
        for ci, c in enumerate(curves):
            for s in c.steps:
                if s[0] == "e":
                    used.setdefault(s[1], []).append("%s%d" % (name, ci))
    for eid, (u, v, c) in enumerate(g.edges):
        if c == surf.apex:
            continue
        mark = used.get(eid)
        attrs = ['label="c%d"' % c]
        if mark:
            attrs.append('penwidth=2, comment="%s"' % " ".join(mark))
        lines.append("  v%d -- v%d [%s];" % (u, v, ", ".join(attrs)))
    for j, h in enumerate(surf.handles):
        lines.append('  v%d -- x%d [style=dashed];' % (h.u, j))
        lines.append('  x%d -- v%d [style=dashed];' % (j, h.v))
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("ascii")


def _export_svg(diagram):
    import math
    surf = diagram.surface
    g = surf.graph
    n = surf.scheme.nv
    r, cx, cy = 180.0, 200.0, 200.0
    pts = []
    for i in range(n):
        a = 2 * math.pi * i / max(n, 1)
        pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
    bits = ['<?xml version="1.0" encoding="UTF-8"?>',
            '<svg xmlns="http://www.w3.org/2000/svg" '
            'width="400" height="400" viewBox="0 0 400 400">',
            '<title>genus %d %s diagram</title>' % (diagram.genus,
                                                    diagram.mode)]
    for idx, (u, v) in enumerate(surf.scheme.edge_ends):
        (x1, y1), (x2, y2) = pts[u], pts[v]
        bits.append('<line x1="%.1f" y1="%.1f" x2="%.1f" y2="%.1f" '
                    'stroke="#999" stroke-width="1"/>' % (x1, y1, x2, y2))
    for name, curves in diagram.systems():
        color = _DOT_COLORS[name]
        for c in curves:
            try:
                walk = _to_walk(surf, c)
            except GemError:
                continue
            coords = []
            for h in walk:
                u = surf.scheme.vertex_of[h]
                v = surf.scheme.vertex_of[h ^ 1]
                coords.append(((pts[u][0] + pts[v][0]) / 2,
                               (pts[u][1] + pts[v][1]) / 2))
            if not coords:
                continue
            path = " ".join("%.1f,%.1f" % p for p in coords)
            bits.append('<polyline points="%s %s" fill="none" '
                        'stroke="%s" stroke-width="1.5" opacity="0.7"/>'
                        % (path, "%.1f,%.1f" % coords[0], color))
    for i, (x, y) in enumerate(pts):
        bits.append('<circle cx="%.1f" cy="%.1f" r="3" fill="#222"/>'
                    % (x, y))
    bits.append("</svg>")
    return ("\n".join(bits) + "\n").encode("ascii")
