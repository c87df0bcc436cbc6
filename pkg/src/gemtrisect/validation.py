"""Membership checks for the class of graphs the pipeline accepts.

A 5-colored graph qualifies when all its 3-colored residues are
2-spheres, the residue missing the apex color is unique, and every
other color's complementary residues are 3-spheres.  Sphere-ness in
dimension 3 is only semi-decidable at desk scale: genus-0 sweeps prove
it, nontrivial first homology refutes it, anything else stays
"unknown" until the user attests it.
"""

from __future__ import annotations

import re

from .embedding import cyclic_permutations, rho
from .graphs import (
    GemError,
    cancel_dipole,
    find_dipole,
    residue_subgem,
    residues,
    is_bipartite,
)
from .homology import chain_complex, pi1_presentation

SPHERE = "sphere"
NON_SPHERE = "non-sphere"
UNKNOWN = "unknown"


class PrerequisiteFailed(GemError):
    pass


class NotAGem(GemError):
    pass


class MultipleApexResidues(GemError):
    pass


class ValidationReport:
    """Everything certify_Gs4 decided, with its evidence trail."""

    def __init__(self, **kw):
        self.apex_color = kw["apex_color"]
        self.surface_verdicts = kw["surface_verdicts"]
        self.color_verdicts = kw["color_verdicts"]
        self.singular_colors = kw["singular_colors"]
        self.undetermined_colors = kw["undetermined_colors"]
        self.gs4_member = kw["gs4_member"]
        self.boundary_residue = kw["boundary_residue"]
        self.boundary_verdict = kw["boundary_verdict"]
        self.boundary_spheres = kw["boundary_spheres"]
        self.closed = kw["closed"]
        self.orientable = kw["orientable"]
        self.simply_connected = kw["simply_connected"]
        self.attestations_used = tuple(kw["attestations_used"])
        self.conflicts = tuple(kw["conflicts"])

    def as_dict(self):
        return {
            "apex_color": self.apex_color,
            "color_verdicts": {
                str(c): list(v) for c, v in self.color_verdicts.items()},
            "singular_colors": sorted(self.singular_colors),
            "undetermined_colors": sorted(self.undetermined_colors),
            "gs4_member": self.gs4_member,
            "boundary_verdict": self.boundary_verdict,
            "boundary_spheres": self.boundary_spheres,
            "closed": self.closed,
            "orientable": self.orientable,
            "simply_connected": self.simply_connected,
            "attestations_used": list(self.attestations_used),
            "conflicts": list(self.conflicts),
        }

    def __repr__(self):
        return ("ValidationReport(member=%s, closed=%s, singular=%s)"
                % (self.gs4_member, self.closed,
                   sorted(self.singular_colors)))


def check_surface_residues(g):
    """Exact sphere test for every 3-colored residue.

    A 3-colored residue on 2q vertices is a 2-sphere iff its three
    bicolored-cycle counts sum to q + 2.  Returns {(colors, index):
    verdict}; the verdict is "sphere" or "non-sphere", never unknown.
    """
    import itertools
    out = {}
    for sub in itertools.combinations(g.colors, 3):
        key = frozenset(sub)
        for idx, res in enumerate(residues(g, key)):
            q = len(res.vertices) // 2
            vset = set(res.vertices)
            cycles = 0
            for pair in itertools.combinations(sub, 2):
                # bicolored cycles never straddle residue components
                cycles += sum(1 for r in residues(g, frozenset(pair))
                              if r.vertices[0] in vset)
            out[(sub, idx)] = SPHERE if cycles - q == 2 else NON_SPHERE
    return out


def _three_manifold_verdict(sub):
    """sphere / non-sphere / unknown for a 4-colored graph.

    Genus 0 for some permutation proves the sphere, and dipole
    cancellation preserves the manifold, so the test is retried down
    the reduction chain.  Nonzero Euler characteristic or nontrivial
    H1 refutes the sphere; anything else stays undecided.
    """
    cur = sub
    while True:
        for eps in cyclic_permutations(3):
            if rho(cur, eps) == 0:
                return SPHERE
        dip = find_dipole(cur)
        if dip is None:
            break
        try:
            cur = cancel_dipole(cur, *dip)
        except GemError:
            break
    if chain_complex(sub).euler_characteristic() != 0:
        return NON_SPHERE
    if pi1_presentation(sub).abelianization().min_generators != 0:
        return NON_SPHERE
    return UNKNOWN


def classify_colors(g):
    """Per-color verdicts for the complementary 4-colored residues.

    Returns (singular, undetermined, verdicts) where verdicts maps
    each color to the tuple of its residues' verdicts in residue
    order.  Requires every 3-colored residue to pass the sphere
    criterion first.
    """
    surface = check_surface_residues(g)
    bad = [k for k, v in surface.items() if v == NON_SPHERE]
    if bad:
        raise PrerequisiteFailed(
            "3-colored residues fail the sphere criterion: %s"
            % sorted(bad))
    verdicts = {}
    singular = set()
    undetermined = set()
    for c in g.colors:
        key = frozenset(x for x in g.colors if x != c)
        vs = []
        for res in residues(g, key):
            sub, _, _ = residue_subgem(g, res)
            vs.append(_three_manifold_verdict(sub))
        verdicts[c] = tuple(vs)
        if NON_SPHERE in vs:
            singular.add(c)
        elif UNKNOWN in vs:
            undetermined.add(c)
    return frozenset(singular), frozenset(undetermined), verdicts


_BOUNDARY_RE = re.compile(r"^#(\d+)\(S1xS2\)$")


def parse_attestations(attest):
    """Normalize the attestation mapping; unknown keys are an error."""
    attest = dict(attest or {})
    out = {"sphere": set(), "boundary": None, "simply_connected": False,
           "name": attest.pop("name", None)}
    sphere = attest.pop("sphere", "")
    if sphere:
        for item in str(sphere).split(","):
            c, _, idx = item.strip().partition(":")
            out["sphere"].add((int(c), int(idx) if idx else 0))
    boundary = attest.pop("boundary", None)
    if boundary is not None:
        m = _BOUNDARY_RE.match(str(boundary).strip())
        if not m:
            raise GemError(
                "boundary attestation must look like #m(S1xS2), got %r"
                % boundary)
        out["boundary"] = int(m.group(1))
    sc = attest.pop("simply-connected", attest.pop("simply_connected", None))
    if sc is not None:
        out["simply_connected"] = str(sc).lower() in ("yes", "true", "1")
    if attest:
        raise GemError("unknown attestation keys: %s" % sorted(attest))
    return out


def certify_Gs4(g, attestations=None, apex=4):
    """Decide class membership and build the validation report.

    Attestations can only upgrade "unknown" verdicts, never flip a
    proven one; every upgrade and every conflict is recorded.
    """
    if g.n != 4:
        raise GemError("classification requires dimension 4")
    if apex not in g.colors:
        raise GemError("apex color %r out of range" % (apex,))
    surface = check_surface_residues(g)
    bad = sorted(k for k, v in surface.items() if v == NON_SPHERE)
    if bad:
        raise NotAGem("3-colored residues are not all spheres: %s" % bad)

    apex_key = frozenset(c for c in g.colors if c != apex)
    apex_residues = residues(g, apex_key)
    if len(apex_residues) != 1:
        raise MultipleApexResidues(
            "%d residues miss color %d; need exactly one"
            % (len(apex_residues), apex))
    boundary_residue = apex_residues[0]

    singular, undetermined, verdicts = classify_colors(g)
    att = parse_attestations(attestations)
    used = []
    conflicts = []

    # apply sphere attestations to unknown verdicts only
    upgraded = {c: list(v) for c, v in verdicts.items()}
    for (c, idx) in sorted(att["sphere"]):
        if c not in upgraded or idx >= len(upgraded[c]):
            conflicts.append("sphere attestation %d:%d matches no residue"
                             % (c, idx))
            continue
        cur = upgraded[c][idx]
        if cur == UNKNOWN:
            upgraded[c][idx] = SPHERE
            used.append("sphere=%d:%d" % (c, idx))
        elif cur == NON_SPHERE:
            conflicts.append(
                "sphere attestation %d:%d contradicts a proven non-sphere"
                % (c, idx))
        # already proven: attestation is redundant, not recorded

    member = True
    for c in g.colors:
        if c == apex:
            continue
        if any(v != SPHERE for v in upgraded[c]):
            member = False

    # boundary-role residue: its verdict plus optional classification
    boundary_verdict = upgraded[apex][0]
    boundary_spheres = None
    if att["boundary"] is not None:
        m = att["boundary"]
        sub, _, _ = residue_subgem(g, boundary_residue)
        h1 = pi1_presentation(sub).abelianization()
        if h1.rank != m or h1.torsion:
            conflicts.append(
                "boundary attestation #%d(S1xS2) inconsistent with H1=%r"
                % (m, h1))
        elif boundary_verdict == SPHERE and m > 0:
            conflicts.append(
                "boundary attested #%d(S1xS2) but proven a 3-sphere" % m)
        elif boundary_verdict == NON_SPHERE and m == 0:
            conflicts.append(
                "boundary attested a 3-sphere but proven otherwise")
        else:
            boundary_spheres = m
            used.append("boundary=#%d(S1xS2)" % m)
            if m == 0 and boundary_verdict == UNKNOWN:
                boundary_verdict = SPHERE

    closed = None
    if boundary_verdict == SPHERE:
        closed = True
        boundary_spheres = 0
    elif boundary_verdict == NON_SPHERE or boundary_spheres is not None:
        closed = False

    # A presentation with no generators left after reduction proves pi1 = 1.
    pres = pi1_presentation(g)
    simply_connected = pres.num_generators == 0
    if att["simply_connected"] and not simply_connected:
        h1 = pres.abelianization()
        if h1.min_generators != 0:
            conflicts.append(
                "simply-connected attestation inconsistent with H1=%r" % h1)
        else:
            simply_connected = True
            used.append("simply-connected=yes")

    recomputed_singular = frozenset(
        c for c in g.colors if NON_SPHERE in upgraded[c])
    recomputed_unknown = frozenset(
        c for c in g.colors
        if c not in recomputed_singular and UNKNOWN in upgraded[c])
    return ValidationReport(
        apex_color=apex,
        surface_verdicts=surface,
        color_verdicts={c: tuple(v) for c, v in upgraded.items()},
        singular_colors=recomputed_singular,
        undetermined_colors=recomputed_unknown,
        gs4_member=member,
        boundary_residue=boundary_residue,
        boundary_verdict=boundary_verdict,
        boundary_spheres=boundary_spheres,
        closed=closed,
        orientable=is_bipartite(g)[0],
        simply_connected=simply_connected,
        attestations_used=used,
        conflicts=conflicts,
    )
