"""Membership certification: surface criterion, link verdicts, attestations."""

import random

import pytest

from gemtrisect.graphs import GemError, blob_insert, build_graph, residues
from gemtrisect.validation import (
    NON_SPHERE,
    SPHERE,
    UNKNOWN,
    MultipleApexResidues,
    NotAGem,
    PrerequisiteFailed,
    certify_Gs4,
    check_surface_residues,
    classify_colors,
    parse_attestations,
    _three_manifold_verdict,
)
from gemtrisect.graphs import cancel_dipole, find_dipole, standard_sphere_gem

from conftest import grow_gem, pipeline_corpus


def _torus_inside_gem():
    # K33 Latin-square torus as the (0,1,2)-residue; colors 3 and 4 are
    # parallel matchings so the graph is a legal 5-regular multigraph
    edges = [(i, 3 + j, (i + j) % 3) for i in range(3) for j in range(3)]
    edges += [(0, 3, 3), (1, 4, 3), (2, 5, 3)]
    edges += [(0, 3, 4), (1, 4, 4), (2, 5, 4)]
    return build_graph(4, edges)


def test_surface_criterion_sphere_gem(s4_gem):
    verdicts = check_surface_residues(s4_gem)
    assert len(verdicts) == 10
    assert set(verdicts.values()) == {SPHERE}


def test_surface_criterion_flags_torus():
    g = _torus_inside_gem()
    verdicts = check_surface_residues(g)
    assert verdicts[((0, 1, 2), 0)] == NON_SPHERE
    with pytest.raises(NotAGem):
        certify_Gs4(g)
    with pytest.raises(PrerequisiteFailed):
        classify_colors(g)


def test_surface_criterion_on_corpus():
    rng = random.Random(11)
    for _ in range(20):
        g = grow_gem(standard_sphere_gem(4), rng.randrange(1, 7), rng)
        assert set(check_surface_residues(g).values()) == {SPHERE}


def test_link_verdict_sphere_direct(s3_gem):
    assert _three_manifold_verdict(s3_gem) == SPHERE


def test_link_verdict_sphere_through_dipole_chain():
    rng = random.Random(5)
    for _ in range(15):
        g = grow_gem(standard_sphere_gem(3), rng.randrange(1, 8), rng)
        assert _three_manifold_verdict(g) == SPHERE


def test_link_verdict_non_sphere(datadir_gem):
    gf = datadir_gem("s1s2_3manifold.gem")
    assert _three_manifold_verdict(gf.graph) == NON_SPHERE


def test_dipole_cancellation_shrinks_and_preserves():
    g = standard_sphere_gem(3)
    g = blob_insert(g, g.incident(0, 2))
    g = blob_insert(g, g.incident(0, 0))
    while True:
        dip = find_dipole(g)
        if dip is None:
            break
        h = cancel_dipole(g, *dip)
        assert h.nv == g.nv - 2
        assert _three_manifold_verdict(h) == SPHERE
        g = h
    assert g.nv == 2


def test_blob_pair_is_never_a_dipole_when_residue_agrees(s4_gem):
    # the two sphere-gem vertices share every residue, so no dipole
    assert find_dipole(s4_gem) is None


def test_certify_sphere_gem(s4_gem):
    rep = certify_Gs4(s4_gem)
    assert rep.gs4_member
    assert rep.closed
    assert rep.orientable
    assert rep.simply_connected
    assert rep.boundary_spheres == 0
    assert rep.singular_colors == frozenset()
    assert rep.undetermined_colors == frozenset()
    assert rep.conflicts == ()
    assert rep.attestations_used == ()
    d = rep.as_dict()
    assert d["gs4_member"] is True
    assert d["singular_colors"] == []


def test_certify_requires_dimension_four(s3_gem):
    with pytest.raises(GemError):
        certify_Gs4(s3_gem)
    with pytest.raises(GemError):
        certify_Gs4(standard_sphere_gem(4), apex=9)


def test_split_apex_residue_rejected(blob4_gem):
    with pytest.raises(MultipleApexResidues):
        certify_Gs4(blob4_gem)


def test_corpus_certifies_closed():
    for g in pipeline_corpus(count=30):
        rep = certify_Gs4(g)
        assert rep.gs4_member
        assert rep.closed
        assert rep.conflicts == ()


def test_fixture_closed_manifold(datadir_gem):
    rep = certify_Gs4(*_gf(datadir_gem, "projective_plane_like.gem"))
    assert rep.gs4_member
    assert rep.closed
    assert rep.simply_connected
    assert rep.singular_colors == frozenset()


def test_fixture_two_singular_colors(datadir_gem):
    rep = certify_Gs4(*_gf(datadir_gem, "two_singular_colors.gem"))
    assert not rep.gs4_member
    assert rep.singular_colors == frozenset({0, 3})
    assert rep.color_verdicts[0] == (NON_SPHERE,)
    assert rep.color_verdicts[1] == (SPHERE,)


def test_fixture_bounded(datadir_gem):
    rep = certify_Gs4(*_gf(datadir_gem, "bounded_s1s2.gem"))
    assert rep.gs4_member
    assert rep.closed is False
    assert rep.boundary_verdict == NON_SPHERE
    assert rep.boundary_spheres == 1
    assert rep.attestations_used == ("boundary=#1(S1xS2)",)
    assert rep.conflicts == ()


def _gf(loader, name):
    gf = loader(name)
    return gf.graph, gf.attestations


def test_boundary_attestation_checked_against_homology(datadir_gem):
    g, _ = _gf(datadir_gem, "bounded_s1s2.gem")
    rep = certify_Gs4(g, {"boundary": "#2(S1xS2)"})
    assert rep.boundary_spheres is None
    assert any("inconsistent with H1" in c for c in rep.conflicts)


def test_sphere_attestation_cannot_flip_proof(datadir_gem):
    g, _ = _gf(datadir_gem, "two_singular_colors.gem")
    rep = certify_Gs4(g, {"sphere": "0:0"})
    assert not rep.gs4_member
    assert rep.attestations_used == ()
    assert any("contradicts a proven non-sphere" in c for c in rep.conflicts)


def test_redundant_attestations_not_recorded(s4_gem):
    rep = certify_Gs4(s4_gem, {"sphere": "0:0", "simply-connected": "yes"})
    assert rep.attestations_used == ()
    assert rep.conflicts == ()
    assert rep.gs4_member


def test_sphere_attestation_out_of_range(s4_gem):
    rep = certify_Gs4(s4_gem, {"sphere": "2:9"})
    assert any("matches no residue" in c for c in rep.conflicts)


def test_zero_boundary_attestation_on_closed_gem(s4_gem):
    rep = certify_Gs4(s4_gem, {"boundary": "#0(S1xS2)"})
    assert rep.closed
    assert rep.boundary_spheres == 0
    assert "boundary=#0(S1xS2)" in rep.attestations_used


def test_parse_attestations():
    out = parse_attestations(
        {"sphere": "4:0, 4:1, 3", "boundary": "#12(S1xS2)",
         "simply-connected": "yes", "name": "x"})
    assert out["sphere"] == {(4, 0), (4, 1), (3, 0)}
    assert out["boundary"] == 12
    assert out["simply_connected"] is True
    assert out["name"] == "x"
    assert parse_attestations(None)["boundary"] is None
    assert parse_attestations({"simply_connected": "no"})[
        "simply_connected"] is False


def test_parse_attestations_rejects_garbage():
    with pytest.raises(GemError):
        parse_attestations({"boundary": "S1xS2"})
    with pytest.raises(GemError):
        parse_attestations({"flavor": "grape"})


def test_classify_colors_healthy(s4_gem):
    singular, undetermined, verdicts = classify_colors(s4_gem)
    assert singular == frozenset()
    assert undetermined == frozenset()
    assert all(v == (SPHERE,) for v in verdicts.values())


def test_other_apex_color_works(s4_gem):
    rep = certify_Gs4(s4_gem, apex=0)
    assert rep.gs4_member
    assert rep.apex_color == 0


def test_apex_split_detected_for_alternate_apex(s4_gem):
    g = blob_insert(s4_gem, s4_gem.incident(0, 2))
    with pytest.raises(MultipleApexResidues):
        certify_Gs4(g, apex=2)
    rep = certify_Gs4(g, apex=4)
    assert rep.gs4_member
