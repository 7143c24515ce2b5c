import json
import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy.matrices.normalforms import invariant_factors

from intransitive import catalog
from intransitive.cli import Setting
from intransitive.homotopy import (
    Cycle, ElementaryMove, HomotopyCertificate, InvalidCycle, NotGeometric, HypothesisFailed,
    CaseIIEncountered, CapExceeded, CertContext, CycleSampler, CoveringMap,
    verify_certificate, fan_certificate, reduce_to_point_line, certify_triangle,
    certify_triangle_dim4, certify_quadrangle, certify_pentagon, certify_cycle,
    homology_h1, smith_invariants, boundary_2, covering_check, fundamental_cover,
    fundamental_group_order, element_decoder,
)
from intransitive.orthospace import (
    BilinearForm, LineClass, Subspace, build_orth_geometry, image, is_nondegenerate, line_class,
    random_bireflection,
)
from intransitive.pregeo import Pregeometry, direct_sum, is_isomorphic

import oracles


def orth_setting(q, dim, sign, hall):
    return Setting({"geometry": {"kind": "orth", "q": q, "dim": dim, "gram": sign, "hall": hall}})


@pytest.fixture(scope="module")
def ctx11():
    return CertContext(orth_setting(11, 5, "plus", "recipe").geo)


@pytest.fixture(scope="module")
def ctx11_dim4():
    return CertContext(orth_setting(11, 4, "minus", "dim_four").geo)


def oracle_replay(cert, geo):
    gram = [list(r) for r in geo.f.gram]
    allowed = {oracles.subspace_label([tuple(r) for r in H.basis], gram, geo.q)
               for H in geo.realize_hall()}
    return oracles.replay_certificate(json.loads(cert.dumps()), gram, geo.q, allowed)


# certificates on a toy geometry

def tetra():
    return catalog.tetrahedron()[0]


def test_trivial_and_triangle_certificates():
    g = tetra()
    assert verify_certificate(HomotopyCertificate((0,), (), (0,)), g)
    a = g.labels.index(frozenset([0]))
    e = g.labels.index(frozenset([0, 1]))
    f = g.labels.index(frozenset([0, 1, 2]))
    c = HomotopyCertificate((a, e, f, a), (ElementaryMove("triangle", "delete", 0, (e, f)),), (a,))
    assert verify_certificate(c, g)


def test_illegal_moves_are_rejected():
    g = tetra()
    a = g.labels.index(frozenset([0]))
    b = g.labels.index(frozenset([1]))
    e = g.labels.index(frozenset([0, 1]))
    bad = HomotopyCertificate((a,), (ElementaryMove("return", "insert", 0, (b,)),), (a, b, a))
    v = verify_certificate(bad, g, require_null=False)
    assert not v and v.failed_at == 0
    # inserting a pair that is not a triangle of the incidence graph
    bad = HomotopyCertificate((a,), (ElementaryMove("triangle", "insert", 0, (e, b)),), (a, e, b, a))
    assert not verify_certificate(bad, g, require_null=False)
    with pytest.raises(InvalidCycle):
        Cycle([a, e])


def residue_walk(g, x, k, rng):
    """Closed walk of length k in the residue of x."""
    res = sorted(g.adj[x])
    while True:
        start = rng.choice(res)
        w = [start]
        for _ in range(k - 1):
            nb = [y for y in g.adj[w[-1]] if y in g.adj[x]]
            w.append(rng.choice(nb))
        if g.incident(w[-1], start):
            return w + [start]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 12))
def test_fan_certificate_length_bound(seed, k):
    g = catalog.simplex(4)[0]
    rng = random.Random(seed)
    x = rng.randrange(len(g))
    if len(g.adj[x]) < 2:
        return
    cyc = residue_walk(g, x, k, rng)
    cert = fan_certificate(cyc, x, g)
    assert verify_certificate(cert, g)
    assert len(cert.moves) <= 2 * (len(cyc) - 1) + 2


def test_fan_examples():
    g = tetra()
    v = g.labels.index(frozenset([0]))
    R = sorted(g.adj[v])
    # residue of a vertex is a hexagon: a 6-cycle of edges and faces
    e1 = g.labels.index(frozenset([0, 1]))
    f12 = g.labels.index(frozenset([0, 1, 2]))
    e2 = g.labels.index(frozenset([0, 2]))
    f23 = g.labels.index(frozenset([0, 2, 3]))
    e3 = g.labels.index(frozenset([0, 3]))
    f13 = g.labels.index(frozenset([0, 1, 3]))
    hexagon = [e1, f12, e2, f23, e3, f13, e1]
    cert = fan_certificate(hexagon, v, g)
    assert verify_certificate(cert, g) and cert.is_null
    tri = [v, e1, f12, v]
    f_any = g.labels.index(frozenset([0, 1, 2]))
    cert = fan_certificate(tri, f_any, g)
    assert len(cert.moves) == 1
    assert set(R) == set(hexagon)
    with pytest.raises(NotGeometric):
        fan_certificate(hexagon, g.labels.index(frozenset([1])), g)


def test_transport_invariance_toy():
    g, G, _ = catalog.tetrahedron()
    rng = random.Random(2)
    x = g.labels.index(frozenset([0]))
    cert = fan_certificate(residue_walk(g, x, 7, rng), x, g)
    pos = {l: i for i, l in enumerate(g.labels)}
    for s in G.elements():
        moved = cert.mapped(lambda i: pos[G.act(s, g.labels[i])])
        assert verify_certificate(moved, g)


def test_transport_invariance_orth(ctx11):
    geo = ctx11.geo
    rng = random.Random(4)
    sampler = CycleSampler(ctx11, seed=4)
    cert = ctx11.certify_points(sampler.triangle())
    for _ in range(3):
        M = random_bireflection(geo.f, rng)
        moved = cert.mapped(lambda S: image(M, S))
        assert verify_certificate(moved, geo)
        assert oracle_replay(moved, geo)[0]


# reduction to points and lines

def test_reduce_point_line_cycle_is_identity():
    s = orth_setting(5, 4, "minus", "dim_four")
    ctx = CertContext(s.geo)
    P = CycleSampler(ctx, seed=1).polygon(4)
    cyc = ctx.polygon_cycle(P)
    out, frag = reduce_to_point_line(cyc, s.geo)
    assert out == cyc and not frag.moves


def test_reduce_through_a_plane():
    s = orth_setting(5, 4, "minus", "dim_four")
    geo = s.geo
    p, pp, l, pi, pi2 = s.W
    cyc = [l, pi, p, l]
    out, frag = reduce_to_point_line(cyc, geo)
    assert all(x.dim <= 2 for x in out)
    assert out[0] == l and out[-1] == l
    assert verify_certificate(frag, geo, require_null=False)
    assert tuple(frag.final) == tuple(out)
    cert = certify_cycle(cyc, CertContext(geo))
    assert verify_certificate(cert, geo)


def test_reduce_hypothesis_failure():
    g = direct_sum(catalog.polygon(3), Pregeometry([3, 3], [], labels=["a", "b"]))
    # types 1, 2, 3 where 3 is joined to everything: diagram 1-2, 3 isolated
    x = 0
    L = next(iter(y for y in g.adj[x] if g.typ[y] == 2))
    with pytest.raises(HypothesisFailed):
        reduce_to_point_line([x, L, x], g)


# certificate procedures in the orthogonal geometries

def test_triangles_q11(ctx11):
    sampler = CycleSampler(ctx11, seed=7)
    for degenerate in (True, False, True, False):
        a, b, c = sampler.triangle(degenerate=degenerate)
        cert = certify_triangle(a, b, c, ctx11)
        assert verify_certificate(cert, ctx11.geo) and cert.is_null
        assert oracle_replay(cert, ctx11.geo) == (True, "")


def test_quadrangle_pentagon_long_q11(ctx11):
    sampler = CycleSampler(ctx11, seed=8)
    cert = certify_quadrangle(*sampler.polygon(4), ctx11)
    assert oracle_replay(cert, ctx11.geo)[0]
    cert = certify_pentagon(*sampler.polygon(5), ctx11)
    assert oracle_replay(cert, ctx11.geo)[0]
    cyc = sampler.cycle(8)
    cert = certify_cycle(cyc, ctx11)
    assert oracle_replay(cert, ctx11.geo)[0]
    assert cert.cycle == tuple(cyc)


def test_dim4_triangles(ctx11_dim4):
    geo = ctx11_dim4.geo
    sampler = CycleSampler(ctx11_dim4, seed=3)
    for degenerate in (True, False):
        a, b, c = sampler.triangle(degenerate=degenerate)
        nondeg = is_nondegenerate(ctx11_dim4.join([a, b, c]), geo.f)
        cert = certify_triangle_dim4(a, b, c, ctx11_dim4)
        assert oracle_replay(cert, geo)[0]
        if nondeg:
            # the plane is an element: the triangle is geometric
            assert len(cert.moves) <= 3 * 6


def test_dim4_triangle_needs_dim4(ctx11):
    sampler = CycleSampler(ctx11, seed=1)
    with pytest.raises(HypothesisFailed):
        certify_triangle_dim4(*sampler.triangle(), ctx11)


def test_cycle_based_at_higher_type_rejected(ctx11):
    geo = ctx11.geo
    H = geo.realize_hall()
    U, pi = H[4], H[3]
    with pytest.raises(HypothesisFailed):
        certify_cycle([pi, U, pi], ctx11)


def test_collinear_check(ctx11):
    a = ctx11.all_points()[0]
    with pytest.raises(InvalidCycle):
        certify_triangle(a, a, a, ctx11)


@pytest.mark.parametrize("q,dim,sign", [(3, 4, "+"), (3, 4, "-"), (5, 4, "-"), (3, 5, "-")])
def test_case_ii_unreachable_for_elliptic_pairs(q, dim, sign):
    f = BilinearForm.standard(dim, q, sign)
    geo = build_orth_geometry(dim - 1, f)
    ctx = CertContext(geo)
    ell = [L for L in geo.elements(2) if line_class(L, f) is LineClass.ELLIPTIC]
    firsts = ell if (q, dim) == (3, 4) else ell[:: max(1, len(ell) // 15)]
    cases = set()
    for l in firsts:
        for m in ell:
            if (l + m).dim != 4:
                continue
            cases.add(ctx.quadrangle_case(l, m))
    assert cases and "ii" not in cases


def test_case_ii_raises_when_hyperbolic():
    # three hyperbolic planes over F3; <l, m> = l + <e2, e3> has a 2-dim radical
    gram = [[0] * 6 for _ in range(6)]
    for i in range(3):
        gram[2 * i][2 * i + 1] = gram[2 * i + 1][2 * i] = 1
    f = BilinearForm(gram, 3)
    ctx = CertContext(build_orth_geometry(5, f))
    e = [tuple(int(i == j) for j in range(6)) for i in range(6)]
    l = Subspace.span([e[0], e[1]], 3)
    m = Subspace.span([tuple(a + b for a, b in zip(e[0], e[2])),
                       tuple(a + b for a, b in zip(e[1], e[4]))], 3)
    assert line_class(l, f) is LineClass.HYPERBOLIC and is_nondegenerate(m, f)
    with pytest.raises(CaseIIEncountered):
        ctx.quadrangle_case(l, m)


def test_certificates_roundtrip_json(ctx11):
    cert = ctx11.certify_points(CycleSampler(ctx11, seed=5).polygon(4))
    back = HomotopyCertificate.from_json(cert.dumps(), element_decoder(ctx11.geo))
    assert back.cycle == cert.cycle and back.moves == cert.moves
    assert verify_certificate(back, ctx11.geo)


# H1

def test_h1_fixtures():
    assert homology_h1(tetra()).trivial
    assert str(homology_h1(catalog.pg32())) == "0"
    h = homology_h1(catalog.polygon(3))
    assert h.rank == 1 and h.torsion == () and str(h) == "Z"
    assert str(homology_h1(catalog.hemicube()[0])) == "Z/2"


def _relabel(g, perm):
    inv = {p: i for i, p in enumerate(perm)}
    typ = [g.typ[perm[i]] for i in range(len(g))]
    inc = [(inv[a], inv[b]) for a, b in g.edges()]
    return Pregeometry(typ, inc)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["tetra", "hexagon", "hemicube", "fano"]))
def test_h1_relabel_invariance(seed, name):
    g = {"tetra": tetra, "hexagon": lambda: catalog.polygon(3),
         "hemicube": lambda: catalog.hemicube()[0], "fano": catalog.fano}[name]()
    perm = list(range(len(g)))
    random.Random(seed).shuffle(perm)
    h = _relabel(g, perm)
    assert is_isomorphic(g, h)
    assert homology_h1(g) == homology_h1(h)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10 ** 6))
def test_smith_invariants_match_sympy(r, c, seed):
    rng = random.Random(seed)
    M = [[rng.choice([0, 0, 1, -1, 2, 3, -4, 6]) for _ in range(c)] for _ in range(r)]
    entries = {(i, j): M[i][j] for i in range(r) for j in range(c) if M[i][j]}
    ours = sorted(abs(x) for x in smith_invariants(entries, r, c))
    theirs = sorted(abs(int(x)) for x in invariant_factors(sympy.Matrix(M)) if x != 0)
    assert ours == theirs


def test_boundary_matrix_snf_matches_sympy():
    for g in (catalog.hemicube()[0], catalog.polygon(4), tetra()):
        edges, tris, entries = boundary_2(g)
        M = sympy.zeros(len(edges), max(len(tris), 1))
        for (i, j), v in entries.items():
            M[i, j] = v
        theirs = sorted(abs(int(x)) for x in invariant_factors(M) if x != 0)
        assert sorted(smith_invariants(entries, len(edges), len(tris))) == theirs


# coverings

def test_identity_and_polygon_covers():
    g = tetra()
    assert covering_check(CoveringMap(g, g, list(range(len(g)))))[0]
    big, small, emap = catalog.polygon_cover(3, 2)
    assert len(big) == 12
    assert covering_check(CoveringMap(big, small, emap)) == (True, None)


def test_collapsing_quotient_is_not_a_cover():
    big = catalog.polygon(6)
    small = catalog.polygon(3)
    idx = {l: i for i, l in enumerate(small.labels)}
    # fold the 6-gon onto the triangle badly: points mod 3, lines squashed
    emap = []
    for l in big.labels:
        if len(l) == 1:
            emap.append(idx[frozenset(x % 3 for x in l)])
        else:
            emap.append(idx[frozenset([0, 1])])
    ok, witness = covering_check(CoveringMap(big, small, emap))
    assert not ok and witness["reason"]


def test_hemicube_cover():
    c, h, emap = catalog.hemicube_cover()
    assert covering_check(CoveringMap(c, h, emap)) == (True, None)


def test_fundamental_cover():
    g = tetra()
    cover, phi = fundamental_cover(g)
    assert len(cover) == len(g) and is_isomorphic(cover, g)
    assert covering_check(phi)[0]
    h = catalog.hemicube()[0]
    cover, phi = fundamental_cover(h)
    assert len(cover) == 26 and is_isomorphic(cover, catalog.cube()[0])
    assert fundamental_group_order(h) == 2
    with pytest.raises(CapExceeded):
        fundamental_cover(catalog.polygon(3), cap=500)
