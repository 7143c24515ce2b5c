"""Small fixture geometries, some with a group acting on their labels."""

from __future__ import annotations

import itertools

from .cosetgeo import GroupSpec
from .pregeo import Pregeometry


def _from_labels(elements, typ_of, incident):
    elements = list(elements)
    typ = [typ_of(x) for x in elements]
    inc = [(i, j) for i, j in itertools.combinations(range(len(elements)), 2)
           if typ[i] != typ[j] and incident(elements[i], elements[j])]
    return Pregeometry(typ, inc, labels=elements)


def simplex(n):
    """Faces of the n-simplex (n+1 vertices): nonempty proper subsets.

    Type = cardinality, incidence = containment. With the symmetric group
    acting on vertices, the chamber is the chain {0} < {0,1} < ...
    """
    pts = range(n + 1)
    els = [frozenset(c) for k in range(1, n + 1) for c in itertools.combinations(pts, k)]
    g = _from_labels(els, len, lambda a, b: a <= b or b <= a)
    G = GroupSpec.symmetric(n + 1)
    chamber = [frozenset(range(k)) for k in range(1, n + 1)]
    return g, G, chamber


def tetrahedron():
    return simplex(3)


def triangle():
    """Rank 2: 3 points, 3 lines; the incidence graph is a hexagon."""
    g, G, ch = simplex(2)
    return g, G, ch


def polygon(k):
    """Rank 2 k-gon: points i, lines {i, i+1}; incidence graph a 2k-cycle."""
    pts = [frozenset([i]) for i in range(k)]
    lines = [frozenset([i, (i + 1) % k]) for i in range(k)]
    return _from_labels(pts + lines, len, lambda a, b: a <= b or b <= a)


def polygon_cover(k, m):
    """The m-fold covering map from the km-gon onto the k-gon."""
    big = polygon(k * m)
    small = polygon(k)
    idx = {l: i for i, l in enumerate(small.labels)}
    emap = [idx[frozenset(x % k for x in l)] for l in big.labels]
    return big, small, emap


def digon():
    """Generalized digon: every point on every line."""
    els = [("p", 0), ("p", 1), ("L", 0), ("L", 1)]
    return _from_labels(els, lambda x: 1 if x[0] == "p" else 2, lambda a, b: True)


def _f2_subspaces(n):
    """Nonzero subspaces of F_2^n as frozensets of nonzero bitmask vectors."""
    vecs = range(1, 2 ** n)
    seen = set()
    for k in range(1, n):
        for gens in itertools.combinations(vecs, k):
            span = {0}
            for v in gens:
                span |= {x ^ v for x in span}
            S = frozenset(span - {0})
            if len(S) == 2 ** k - 1 and S not in seen:
                seen.add(S)
    return sorted(seen, key=lambda S: (len(S), sorted(S)))


def projective_space(n):
    """PG(n-1, 2): proper nonzero subspaces of F_2^n, type = vector dimension."""
    els = _f2_subspaces(n)
    dim = {S: (len(S) + 1).bit_length() - 1 for S in els}
    return _from_labels(els, dim.get, lambda a, b: a <= b or b <= a)


def fano():
    return projective_space(3)


def pg32():
    return projective_space(4)


# cube: vertices are sign vectors, edges and faces are sets of vertices

def _cube_parts():
    verts = list(itertools.product((1, -1), repeat=3))
    edges, faces = [], []
    for a, b in itertools.combinations(verts, 2):
        if sum(x != y for x, y in zip(a, b)) == 1:
            edges.append(frozenset([a, b]))
    for axis in range(3):
        for s in (1, -1):
            faces.append(frozenset(v for v in verts if v[axis] == s))
    return verts, edges, faces


def _neg(v):
    return tuple(-x for x in v)


def _cube_rotations():
    """Rotation group of the cube acting on the 8 vertices (index order)."""
    verts = list(itertools.product((1, -1), repeat=3))
    pos = {v: i for i, v in enumerate(verts)}
    rz = tuple(pos[(-v[1], v[0], v[2])] for v in verts)        # 90 degrees about z
    r3 = tuple(pos[(v[2], v[0], v[1])] for v in verts)         # 120 degrees about (1,1,1)
    return verts, GroupSpec.perm([rz, r3], 8, name="cube rotations")


def cube():
    """Vertices, edges, faces of the cube, labels are frozensets of vertex indices."""
    verts, G = _cube_rotations()
    pos = {v: i for i, v in enumerate(verts)}
    _, edges, faces = _cube_parts()
    els = ([frozenset([pos[v]]) for v in verts]
           + [frozenset(pos[v] for v in e) for e in edges]
           + [frozenset(pos[v] for v in f) for f in faces])
    typ = {1: 1, 2: 2, 4: 3}
    g = _from_labels(els, lambda x: typ[len(x)], lambda a, b: a <= b or b <= a)
    return g, G


def hemicube():
    """Antipodal quotient of the cube: 4 vertices, 6 edges, 3 faces.

    An element is the frozenset of its two antipodal preimages (each a
    frozenset of vertex indices), so the cube rotations act on labels
    directly. The rotation group (order 24) acts flag-regularly, and the
    universal cover is the cube.
    """
    verts, G = _cube_rotations()
    pos = {v: i for i, v in enumerate(verts)}
    _, edges, faces = _cube_parts()

    def pair(vs):
        return frozenset([frozenset(pos[v] for v in vs), frozenset(pos[_neg(v)] for v in vs)])

    els = []
    for part in ([[v] for v in verts], edges, faces):
        for vs in part:
            e = pair(vs)
            if e not in els:
                els.append(e)
    typ = {1: 1, 2: 2, 4: 3}

    def incident(a, b):
        return any(x <= y or y <= x for x in a for y in b)

    g = _from_labels(els, lambda x: typ[len(next(iter(x)))], incident)
    v0 = pair([verts[0]])
    e0 = next(x for x in els if len(next(iter(x))) == 2 and incident(x, v0))
    f0 = next(x for x in els if len(next(iter(x))) == 4 and incident(x, v0) and incident(x, e0))
    return g, G, [v0, e0, f0]


def hemicube_cover():
    """The covering map from the cube onto the hemicube, on element ids."""
    c, _ = cube()
    h, _, _ = hemicube()
    idx = {}
    for i, l in enumerate(h.labels):
        for part in l:
            idx[part] = i
    return c, h, [idx[l] for l in c.labels]
