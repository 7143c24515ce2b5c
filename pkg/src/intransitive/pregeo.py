"""Pregeometries with dense integer ids.

A pregeometry is stored as a type list plus adjacency sets; incidence is the
reflexive closure of the adjacency. Labels are arbitrary hashable payloads
kept only for display, serialization and isomorphism checks.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import deque

import networkx as nx


class PregeoError(ValueError):
    pass


class NotAFlag(PregeoError):
    pass


class TypeClash(PregeoError):
    pass


class DiagramPreconditionFailed(PregeoError):
    pass


class Pregeometry:
    def __init__(self, typ, incidences, labels=None, types=None):
        self.typ = list(typ)
        n = len(self.typ)
        self.labels = list(labels) if labels is not None else list(range(n))
        if len(self.labels) != n:
            raise PregeoError("one label per element")
        self.types = tuple(sorted(set(types) if types is not None else set(self.typ)))
        if not set(self.typ) <= set(self.types):
            raise PregeoError("element type outside the type set")
        adj = [set() for _ in range(n)]
        for a, b in incidences:
            if a == b:
                continue
            if self.typ[a] == self.typ[b]:
                raise PregeoError(f"(Pre) violated: {a} and {b} have the same type")
            adj[a].add(b)
            adj[b].add(a)
        self.adj = [frozenset(s) for s in adj]

    # basic queries
    def __len__(self):
        return len(self.typ)

    @property
    def rank(self):
        return len(self.types)

    def elements(self, t=None):
        if t is None:
            return range(len(self.typ))
        return [x for x, tx in enumerate(self.typ) if tx == t]

    def incident(self, x, y):
        return x == y or y in self.adj[x]

    def edges(self):
        for x, nb in enumerate(self.adj):
            for y in nb:
                if x < y:
                    yield (x, y)

    def is_flag(self, F):
        F = list(F)
        if len({self.typ[x] for x in F}) != len(F):
            return False
        return all(self.incident(x, y) for x, y in itertools.combinations(F, 2))

    def check_flag(self, F):
        if not self.is_flag(F):
            raise NotAFlag(f"{sorted(F)} is not a flag")

    def flags(self, size=None):
        """All flags (as sorted tuples), optionally of one cardinality."""
        out = []

        def grow(flag, cands):
            if size is None or len(flag) == size:
                out.append(tuple(sorted(flag)))
                if size is not None:
                    return
            for i, y in enumerate(cands):
                grow(flag + [y], [z for z in cands[i + 1:] if z in self.adj[y]])

        grow([], sorted(range(len(self))))
        return out

    def chambers(self):
        return self.flags(self.rank)

    def graph(self):
        G = nx.Graph()
        G.add_nodes_from(range(len(self)))
        G.add_edges_from(self.edges())
        return G

    def __repr__(self):
        counts = {t: len(self.elements(t)) for t in self.types}
        return f"Pregeometry(rank={self.rank}, counts={counts})"

    def summary(self):
        return {"rank": self.rank, "types": list(self.types),
                "counts": {str(t): len(self.elements(t)) for t in self.types},
                "incidences": sum(len(a) for a in self.adj) // 2}

    # constructors
    def induced(self, keep, types=None):
        keep = list(keep)
        idx = {x: i for i, x in enumerate(keep)}
        inc = [(idx[x], idx[y]) for x in keep for y in self.adj[x] if y in idx and x < y]
        g = Pregeometry([self.typ[x] for x in keep], inc,
                        labels=[self.labels[x] for x in keep], types=types)
        g.parent_ids = keep
        return g

    def view(self):
        return LabelView(self)

    def to_json(self):
        return {
            "types": list(self.types),
            "elements": [{"id": i, "typ": t, "label": _jsonable(l)}
                         for i, (t, l) in enumerate(zip(self.typ, self.labels))],
            "incidences": [list(e) for e in self.edges()],
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        els = sorted(data["elements"], key=lambda e: e["id"])
        if [e["id"] for e in els] != list(range(len(els))):
            raise PregeoError("element ids must be 0..N-1")
        labels = [_hashable(e.get("label", e["id"])) for e in els]
        return cls([e["typ"] for e in els], [tuple(p) for p in data["incidences"]],
                   labels=labels, types=data.get("types"))


class LabelView:
    """The pregeometry seen through its labels.

    Offers the same small interface as the lazy orthogonal geometries
    (``typ``, ``incident``, ``elements``, ``contains``), so group actions,
    which move labels, can work with either kind.
    """

    def __init__(self, g):
        self.g = g
        self.index = {l: i for i, l in enumerate(g.labels)}
        if len(self.index) != len(g):
            raise PregeoError("labels are not distinct")
        self.types = g.types

    def typ(self, x):
        return self.g.typ[self.index[x]]

    def incident(self, x, y):
        return self.g.incident(self.index[x], self.index[y])

    def contains(self, x):
        try:
            return x in self.index
        except TypeError:
            return False

    __contains__ = contains

    def elements(self, t=None):
        return [self.g.labels[i] for i in self.g.elements(t)]

    def materialize(self, cap=None):
        return self.g


def view(g):
    """Label-level interface for a Pregeometry; other geometries pass through."""
    return g.view() if isinstance(g, Pregeometry) else g


def _jsonable(x):
    if isinstance(x, (frozenset, set)):
        return sorted((_jsonable(y) for y in x), key=repr)
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    if hasattr(x, "key"):
        return x.key()
    return x


def _hashable(x):
    if isinstance(x, list):
        return tuple(_hashable(y) for y in x)
    return x


# ---------------------------------------------------------------------------

def is_geometry(g):
    """(Geo): every flag lies in a chamber. Returns (ok, witness).

    The witness is a maximal flag that is not a chamber. Maximal flags are the
    maximal cliques of the incidence graph, by (Pre).
    """
    for clique in nx.find_cliques(g.graph()):
        if len(clique) < g.rank:
            return False, tuple(sorted(clique))
    return True, None


def residue(g, F):
    F = list(F)
    g.check_flag(F)
    ftypes = {g.typ[x] for x in F}
    if F:
        cands = set(g.adj[F[0]])
        for x in F[1:]:
            cands &= g.adj[x]
    else:
        cands = set(range(len(g)))
    keep = sorted(x for x in cands if g.typ[x] not in ftypes)
    return g.induced(keep, types=[t for t in g.types if t not in ftypes])


def truncate(g, J):
    J = set(J)
    keep = [x for x in range(len(g)) if g.typ[x] in J]
    return g.induced(keep, types=[t for t in g.types if t in J])


def direct_sum(g1, g2):
    if set(g1.types) & set(g2.types):
        raise TypeClash(f"shared types {sorted(set(g1.types) & set(g2.types))}")
    n1 = len(g1)
    inc = list(g1.edges()) + [(a + n1, b + n1) for a, b in g2.edges()]
    inc += [(a, b + n1) for a in range(n1) for b in range(len(g2))]
    return Pregeometry(g1.typ + g2.typ, inc, labels=g1.labels + g2.labels,
                       types=list(g1.types) + list(g2.types))


def is_connected(g):
    if len(g) == 0:
        return True
    seen = {0}
    todo = deque([0])
    while todo:
        x = todo.popleft()
        for y in g.adj[x]:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return len(seen) == len(g)


def is_lounge(g, S):
    """Every type-injective subset of S is a flag, i.e. elements of
    different types in S are pairwise incident."""
    S = list(S)
    return all(g.typ[x] == g.typ[y] or g.incident(x, y) for x, y in itertools.combinations(S, 2))


def is_hall(g, S):
    return is_lounge(g, S) and {g.typ[x] for x in S} == set(g.types)


def _has_nonincident_pair(res, i, j):
    for x in res.elements(i):
        for y in res.elements(j):
            if not res.incident(x, y):
                return True
    return False


def basic_diagram(g, exhaustive_limit=100000, samples=200, seed=0):
    """Edges i~j of the basic diagram, plus a report of how it was decided.

    A flag of cotype {i, j} witnesses i~j when its residue has two
    non-incident elements. Below ``exhaustive_limit`` flags of a cotype every
    flag is examined, otherwise ``samples`` random ones.
    """
    rng = random.Random(seed)
    edges = set()
    sampled = False
    flags = {}
    for F in g.flags():
        flags.setdefault(frozenset(g.typ[x] for x in F), []).append(F)
    for i, j in itertools.combinations(g.types, 2):
        cot = frozenset(t for t in g.types if t not in (i, j))
        pool = flags.get(cot, [])
        if len(pool) > exhaustive_limit:
            pool = rng.sample(pool, samples)
            sampled = True
        for F in pool:
            if _has_nonincident_pair(residue(g, F), i, j):
                edges.add((i, j))
                break
    G = nx.Graph()
    G.add_nodes_from(g.types)
    G.add_edges_from(edges)
    return G, {"sampled": sampled}


def is_linear_diagram(D):
    """Diagram is a path through the types in their given order."""
    nodes = sorted(D.nodes)
    want = {(a, b) for a, b in zip(nodes, nodes[1:])}
    return {tuple(sorted(e)) for e in D.edges} == want


def collinearity_graph(g, point_type=None, line_type=None, diagram=None):
    """Type-1 elements, adjacent when incident with a common type-2 element.

    Types default to the two smallest; node 1 must have a unique neighbour
    in the basic diagram and that neighbour is used as the line type.
    """
    types = sorted(g.types)
    if point_type is None:
        point_type = types[0]
    D = diagram if diagram is not None else basic_diagram(g)[0]
    nbrs = list(D.neighbors(point_type))
    if len(nbrs) != 1:
        raise DiagramPreconditionFailed(
            f"type {point_type} has {len(nbrs)} neighbours in the basic diagram")
    if line_type is None:
        line_type = nbrs[0]
    G = nx.Graph()
    pts = g.elements(point_type)
    G.add_nodes_from(pts)
    for L in g.elements(line_type):
        on = [x for x in g.adj[L] if g.typ[x] == point_type]
        G.add_edges_from(itertools.combinations(on, 2))
    return G


def is_isomorphic(g1, g2):
    """Type-preserving isomorphism test via networkx VF2."""
    if sorted(g1.typ) != sorted(g2.typ):
        return False
    G1, G2 = g1.graph(), g2.graph()
    for g, G in ((g1, G1), (g2, G2)):
        nx.set_node_attributes(G, {x: g.typ[x] for x in range(len(g))}, "typ")
    return nx.is_isomorphic(G1, G2, node_match=lambda a, b: a["typ"] == b["typ"])


def find_isomorphism(g1, g2):
    if sorted(g1.typ) != sorted(g2.typ):
        return None
    G1, G2 = g1.graph(), g2.graph()
    for g, G in ((g1, G1), (g2, G2)):
        nx.set_node_attributes(G, {x: g.typ[x] for x in range(len(g))}, "typ")
    gm = nx.isomorphism.GraphMatcher(G1, G2, node_match=lambda a, b: a["typ"] == b["typ"])
    for m in gm.isomorphisms_iter():
        return m
    return None
