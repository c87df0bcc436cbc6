"""Cellular homology and fundamental group of the encoded complex.

The dual complex has one d-cell per residue over a color subset of
size n-d; a cell's vertices carry the complementary colors as labels,
so every simplex is globally ordered and the usual alternating-sign
boundary applies.  Integral coefficients are offered for bipartite
graphs only (the build contract); Z/2 works everywhere.
"""

from __future__ import annotations

import itertools

from .graphs import GemError, is_bipartite, residues


class MissingCertificate(GemError):
    pass


class HomologyGroup:
    """Finitely generated abelian group: free rank plus torsion."""

    __slots__ = ("rank", "torsion")

    def __init__(self, rank, torsion=()):
        self.rank = rank
        self.torsion = tuple(torsion)

    @property
    def min_generators(self):
        return self.rank + len(self.torsion)

    def __eq__(self, other):
        if isinstance(other, HomologyGroup):
            return (self.rank, self.torsion) == (other.rank, other.torsion)
        return NotImplemented

    def __hash__(self):
        return hash((self.rank, self.torsion))

    def __repr__(self):
        parts = ["Z"] * self.rank + ["Z/%d" % t for t in self.torsion]
        return " + ".join(parts) if parts else "0"


class ChainComplex:
    """Cells per dimension and integer boundary matrices.

    boundaries[d] maps dimension-d chains to dimension-(d-1) chains,
    stored as one column per d-cell: a dict {row: +-1}.
    """

    def __init__(self, n, cells, boundaries):
        self.n = n
        self.cells = cells
        self.boundaries = boundaries

    def cell_counts(self):
        return tuple(len(c) for c in self.cells)

    def euler_characteristic(self):
        return sum((-1) ** d * len(c) for d, c in enumerate(self.cells))

    def validate(self):
        """Check that consecutive boundaries compose to zero."""
        for d in range(2, self.n + 1):
            for col in self.boundaries[d]:
                acc = {}
                for mid, s1 in col.items():
                    for row, s2 in self.boundaries[d - 1][mid].items():
                        acc[row] = acc.get(row, 0) + s1 * s2
                if any(acc.values()):
                    raise GemError("boundary of boundary is nonzero")
        return True


def chain_complex(g):
    """Dual cell structure of the graph's colored triangulation.

    d-cells are the residues over color subsets of size n-d; the face
    of a cell obtained by dropping the i-th smallest complementary
    color gets sign (-1)^i.
    """
    n = g.n
    colors = list(g.colors)
    cells = []
    index = {}   # (colorset, min vertex) -> (dim, position)
    for d in range(n + 1):
        layer = []
        for sub in itertools.combinations(colors, n - d):
            key = frozenset(sub)
            for r in residues(g, key):
                index[(key, r.vertices[0])] = (d, len(layer))
                layer.append(r)
        cells.append(layer)

    vertex_lookup = {}  # (colorset, vertex) -> cell position, built lazily
    def locate(colorset, vertex):
        probe = (colorset, vertex)
        if probe not in vertex_lookup:
            for r in residues(g, colorset):
                for v in r.vertices:
                    vertex_lookup[(colorset, v)] = index[
                        (colorset, r.vertices[0])][1]
        return vertex_lookup[probe]

    boundaries = [None]
    for d in range(1, n + 1):
        cols = []
        for r in cells[d]:
            labels = sorted(set(colors) - r.colors)
            col = {}
            for i, c in enumerate(labels):
                face_key = r.colors | {c}
                row = locate(face_key, r.vertices[0])
                col[row] = 1 if i % 2 == 0 else -1
            cols.append(col)
        boundaries.append(cols)
    return ChainComplex(n, cells, boundaries)


# -- integer elimination -------------------------------------------------

def _snf_divisors(columns, nrows):
    """Nonzero Smith divisors of a sparse integer matrix.

    columns is a list of {row: value} dicts.  Unit pivots are cleared
    sparsely (they dominate on these matrices); whatever remains is
    reduced by the classical dense algorithm.
    """
    cols = [dict(c) for c in columns if c]
    divisors = []
    # sparse phase: repeatedly eliminate with +-1 pivots
    while True:
        pivot = None
        for j, col in enumerate(cols):
            for r, v in col.items():
                if v == 1 or v == -1:
                    pivot = (j, r, v)
                    break
            if pivot:
                break
        if not pivot:
            break
        j, r, v = pivot
        pcol = cols.pop(j)
        divisors.append(1)
        for col in cols:
            if r in col:
                f = col[r] * v  # pcol scaled by v has +1 in row r
                for rr, vv in pcol.items():
                    nv = col.get(rr, 0) - f * vv
                    if nv:
                        col[rr] = nv
                    elif rr in col:
                        del col[rr]
        cols = [c for c in cols if c]

    if not cols:
        return divisors

    # dense phase on the small residual block
    rows = sorted({r for c in cols for r in c})
    rmap = {r: i for i, r in enumerate(rows)}
    m = [[0] * len(cols) for _ in rows]
    for j, col in enumerate(cols):
        for r, v in col.items():
            m[rmap[r]][j] = v
    divisors.extend(_dense_snf(m))
    return divisors


def _dense_snf(m):
    """Divisors of a small dense integer matrix, classical algorithm."""
    m = [row[:] for row in m]
    nr, nc = len(m), len(m[0]) if m else 0
    out = []
    t = 0
    while t < nr and t < nc:
        # find smallest nonzero entry to use as pivot
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if m[i][j] and (best is None
                                or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        m[t], m[i] = m[i], m[t]
        for row in m:
            row[t], row[j] = row[j], row[t]
        # clear row and column t; restart when a remainder appears
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, nr):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    for j in range(t, nc):
                        m[i][j] -= q * m[t][j]
                    if m[i][t]:
                        m[t], m[i] = m[i], m[t]
                        dirty = True
            for j in range(t + 1, nc):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    for i in range(t, nr):
                        m[i][j] -= q * m[i][t]
                    if m[t][j]:
                        for i in range(t, nr):
                            m[i][t], m[i][j] = m[i][j], m[i][t]
                        dirty = True
        # enforce divisibility of later entries by the pivot
        p = abs(m[t][t])
        for i in range(t + 1, nr):
            for j in range(t + 1, nc):
                if m[i][j] % p:
                    for jj in range(t, nc):
                        m[t][jj] += m[i][jj]
                    dirty = True
                    break
            if dirty:
                break
        if dirty:
            continue  # redo pivot t with the merged row
        out.append(p)
        t += 1
    return out


def _gf2_rank(columns):
    """Rank over Z/2 of a sparse sign matrix, via bitmask elimination."""
    basis = {}
    rank = 0
    for col in columns:
        vec = 0
        for r, v in col.items():
            if v % 2:
                vec |= 1 << r
        while vec:
            low = vec & -vec
            if low in basis:
                vec ^= basis[low]
            else:
                basis[low] = vec
                rank += 1
                break
    return rank


def homology(g, coefficients="Z"):
    """Homology groups of the encoded complex, dimensions 0..n.

    coefficients: "Z" (bipartite graphs only) or "Z/2".
    """
    cx = chain_complex(g)
    counts = cx.cell_counts()
    if coefficients == "Z/2":
        ranks = [0] + [_gf2_rank(cx.boundaries[d]) for d in range(1, g.n + 1)]
        ranks.append(0)
        return [HomologyGroup(counts[d] - ranks[d] - ranks[d + 1])
                for d in range(g.n + 1)]
    if coefficients != "Z":
        raise GemError("unsupported coefficients %r" % (coefficients,))
    if not is_bipartite(g)[0]:
        raise GemError("integral homology is only offered for bipartite "
                       "graphs; use Z/2")
    divs = [[]] + [_snf_divisors(cx.boundaries[d], counts[d - 1])
                   for d in range(1, g.n + 1)]
    divs.append([])
    out = []
    for d in range(g.n + 1):
        rank = counts[d] - len(divs[d]) - len(divs[d + 1])
        torsion = sorted(x for x in divs[d + 1] if x > 1)
        out.append(HomologyGroup(rank, torsion))
    return out


# -- fundamental group ---------------------------------------------------

class GroupPresentation:
    """Generators 0..k-1 and relator words (tuples of nonzero ints).

    Letter +i-1 .. the word entry i>0 means generator i-1, entry -i
    its inverse.
    """

    def __init__(self, num_generators, relators):
        self.num_generators = num_generators
        self.relators = tuple(tuple(w) for w in relators)

    def abelianization(self):
        """H1 from exponent sums, as a HomologyGroup."""
        cols = []
        for word in self.relators:
            col = {}
            for letter in word:
                i = abs(letter) - 1
                col[i] = col.get(i, 0) + (1 if letter > 0 else -1)
            cols.append({k: v for k, v in col.items() if v})
        divs = _snf_divisors(cols, self.num_generators)
        rank = self.num_generators - len(divs)
        return HomologyGroup(rank, sorted(x for x in divs if x > 1))

    def __repr__(self):
        return "GroupPresentation(gens=%d, relators=%d)" % (
            self.num_generators, len(self.relators))


def _free_reduce(word, cyclic=True):
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    if cyclic:
        while len(out) > 1 and out[0] == -out[-1]:
            out = out[1:-1]
    return tuple(out)


def _substitute(word, gen, repl):
    """Replace letter gen (1-based) by the word repl in a relator."""
    out = []
    for x in word:
        if x == gen:
            out.extend(repl)
        elif x == -gen:
            out.extend(-y for y in reversed(repl))
        else:
            out.append(x)
    return tuple(out)


def pi1_presentation(g):
    """Presentation of the complex's fundamental group.

    Generators are the 1-cells outside a spanning tree of the dual
    1-skeleton, relators come from the 2-cells; sound Tietze moves
    (kill trivialized generators, merge identified pairs, drop
    generators occurring once in a single relator) run to a fix point.
    """
    cx = chain_complex(g)
    colors = set(g.colors)

    # locate 1-cells by (colorset, any member vertex); edges are
    # directed from their smaller-label endpoint to the larger one
    loc1 = {}
    ends = []
    for pos1, r in enumerate(cx.cells[1]):
        for v in r.vertices:
            loc1[(r.colors, v)] = pos1
        x, y = sorted(colors - r.colors)
        tail = (r.colors | {y}, r.vertices[0])
        head = (r.colors | {x}, r.vertices[0])
        ends.append((tail, head))

    loc0 = {}
    for pos0, r in enumerate(cx.cells[0]):
        loc0[(r.colors, r.vertices[0])] = pos0
        for v in r.vertices:
            loc0[(r.colors, v)] = pos0
    ends = [(loc0[t], loc0[h]) for t, h in ends]

    # spanning tree by breadth-first search over the multigraph
    nodes = len(cx.cells[0])
    adj = [[] for _ in range(nodes)]
    for eid, (t, h) in enumerate(ends):
        adj[t].append((h, eid))
        adj[h].append((t, eid))
    parent_edge = {0: None}
    order = [0]
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for w, eid in adj[v]:
            if w not in parent_edge:
                parent_edge[w] = eid
                order.append(w)
    tree = {e for e in parent_edge.values() if e is not None}
    gen_of = {}
    for eid in range(len(ends)):
        if eid not in tree:
            gen_of[eid] = len(gen_of) + 1   # 1-based letters

    # one relator per triangle: with labels a<b<c the boundary path is
    # (a->b)(b->c)(c->a), i.e. E_ab . E_bc . E_ac^-1
    words = []
    for r in cx.cells[2]:
        a, b, c = sorted(colors - r.colors)
        e_bc = loc1[(r.colors | {a}, r.vertices[0])]
        e_ac = loc1[(r.colors | {b}, r.vertices[0])]
        e_ab = loc1[(r.colors | {c}, r.vertices[0])]
        word = []
        for eid, sign in ((e_ab, 1), (e_bc, 1), (e_ac, -1)):
            if eid in gen_of:
                word.append(sign * gen_of[eid])
        words.append(_free_reduce(word))

    return _tietze(GroupPresentation(len(gen_of), [w for w in words if w]))


def _tietze(pres):
    gens = pres.num_generators
    words = [list(w) for w in pres.relators]
    alive = [True] * (gens + 1)   # 1-based
    changed = True
    while changed:
        changed = False
        words = [list(_free_reduce(w)) for w in words]
        words = [w for w in words if w]
        # kill generators forced trivial, merge identified pairs
        for w in list(words):
            if len(w) == 1:
                gen = abs(w[0])
                words.remove(w)
                words = [list(_substitute(u, gen, ())) for u in words]
                alive[gen] = False
                changed = True
                break
            if len(w) == 2:
                x, y = w
                if abs(x) != abs(y):
                    # x*y = 1 -> gen|x| = (y)^-sign ...
                    gen = abs(x)
                    repl = [-y] if x > 0 else [y]
                    words.remove(w)
                    words = [list(_substitute(u, gen, repl)) for u in words]
                    alive[gen] = False
                    changed = True
                    break
        if changed:
            continue
        # a generator appearing exactly once overall is free to solve
        count = {}
        where = {}
        for wi, w in enumerate(words):
            for x in w:
                count[abs(x)] = count.get(abs(x), 0) + 1
                where[abs(x)] = wi
        for gen, cnt in sorted(count.items()):
            if cnt == 1:
                wi = where[gen]
                words.pop(wi)
                alive[gen] = False
                changed = True
                break

    # compact the surviving generators
    remap = {}
    for gen in range(1, gens + 1):
        if alive[gen]:
            remap[gen] = len(remap) + 1
    final = []
    seen = set()
    for w in words:
        ww = tuple((1 if x > 0 else -1) * remap[abs(x)] for x in w)
        key = min(_rotations(ww))
        if key not in seen:
            seen.add(key)
            final.append(ww)
    return GroupPresentation(len(remap), final)


def _rotations(word):
    inv = tuple(-x for x in reversed(word))
    outs = []
    for w in (word, inv):
        for i in range(len(w)):
            outs.append(w[i:] + w[:i])
    return outs or [()]


# -- rank / genus bound ledger -------------------------------------------

class BoundLedger:
    """Interval bookkeeping around the produced trisection genus.

    Lower bounds come from first homology (a floor for group rank and
    for Heegaard genus); upper bounds from the presentation and the
    embedding genus of the boundary-role residue.
    """

    FIELDS = ("rho_eps_gamma", "rho_eps_gamma_hat4", "rk_lower", "rk_upper",
              "heegaard_lower", "heegaard_upper", "g_GT_upper", "g_T_upper")

    def __init__(self, **kw):
        for f in self.FIELDS:
            setattr(self, f, kw.get(f))
        self.notes = list(kw.get("notes", ()))

    def violations(self):
        """Inequalities that must hold on every run; violators listed."""
        out = []
        def num(x):
            return x
        if self.rk_lower > self.rk_upper:
            out.append("rk_lower > rk_upper")
        if self.heegaard_lower > self.heegaard_upper:
            out.append("heegaard_lower > heegaard_upper")
        if self.heegaard_lower + self.rk_lower > self.g_GT_upper:
            out.append("heegaard_lower + rk_lower > g_GT_upper")
        if self.g_GT_upper > self.rho_eps_gamma:
            out.append("g_GT_upper > rho_eps_gamma")
        for f in self.FIELDS:
            v = getattr(self, f)
            if v is not None and v < 0:
                out.append("%s < 0" % f)
        return out

    def as_dict(self):
        d = {f: getattr(self, f) for f in self.FIELDS}
        d["notes"] = list(self.notes)
        return d

    def __repr__(self):
        return "BoundLedger(%s)" % ", ".join(
            "%s=%s" % (f, getattr(self, f)) for f in self.FIELDS)


def bound_ledger(g, eps, certificate, boundary_spheres=None):
    """Assemble the bound ledger for one pipeline run.

    certificate: a completed trisection certificate (duck-typed: needs
    eps, apex, k, genus, mode).  boundary_spheres: number m from an
    attested or proven boundary of the form #_m(S1xS2); 0 means closed.
    """
    from .embedding import rho, subgraph_rho
    from .graphs import residue_subgem

    if certificate is None:
        raise MissingCertificate("trisection certificate required")
    apex = certificate.apex
    rg = rho(g, eps)
    rh = subgraph_rho(g, eps, apex)
    if isinstance(rh, list):
        raise GemError("boundary-role residue is disconnected")

    pres = pi1_presentation(g)
    ab = pres.abelianization()

    comp = residues(g, frozenset(c for c in g.colors if c != apex))[0]
    sub, _, _ = residue_subgem(g, comp)
    bpres = pi1_presentation(sub)
    bab = bpres.abelianization()

    g_T = None
    if certificate.mode == "closed" or boundary_spheres is not None:
        g_T = certificate.genus
    return BoundLedger(
        rho_eps_gamma=rg,
        rho_eps_gamma_hat4=rh,
        rk_lower=ab.min_generators,
        rk_upper=pres.num_generators,
        heegaard_lower=bab.min_generators,
        heegaard_upper=rh,
        g_GT_upper=certificate.genus,
        g_T_upper=g_T,
        notes=["rho sweep values bound the per-gem invariant only"],
    )
