"""Finite groups by generators and the geometries built from their cosets.

Group elements are permutations stored as tuples, composed right to left:
``mul(g, h)[i] == g[h[i]]``. Matrix groups over F_q are handled through
their action on the nonzero vectors of F_q^n, which is faithful.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field

from . import gf
from .orthospace import Subspace
from .pregeo import Pregeometry, view


class GroupError(ValueError):
    pass


class DomainError(GroupError):
    pass


class IndexTooLarge(GroupError):
    pass


class NotRepresentatives(GroupError):
    pass


class HypothesisFailed(GroupError):
    def __init__(self, which, detail=""):
        super().__init__(f"hypothesis ({which}) failed: {detail}")
        self.which = which
        self.detail = detail


class NotIsomorphic(GroupError):
    pass


class NotAnAction(GroupError):
    pass


class NotAChamber(GroupError):
    pass


# ---------------------------------------------------------------------------
# permutations

def identity(n):
    return tuple(range(n))


def mul(g, h):
    return tuple([g[x] for x in h])


def inv(g):
    r = [0] * len(g)
    for i, x in enumerate(g):
        r[x] = i
    return tuple(r)


def is_identity(g):
    return all(i == x for i, x in enumerate(g))


def perm_order(g):
    n, seen, order = len(g), set(), 1
    from math import lcm
    for i in range(n):
        if i in seen:
            continue
        c, j = 0, i
        while j not in seen:
            seen.add(j)
            j = g[j]
            c += 1
        order = lcm(order, c)
    return order


def parse_cycles(s, degree):
    """1-based cycle notation such as "(1,2)(3,4)" or "(1 2)(3 4)" to a
    0-based tuple."""
    p = list(range(degree))
    for cyc in re.findall(r"\(([^()]*)\)", s):
        pts = [int(x) - 1 for x in re.split(r"[,\s]+", cyc.strip()) if x]
        if len(set(pts)) != len(pts):
            raise GroupError(f"repeated point in cycle {cyc!r}")
        if any(not 0 <= x < degree for x in pts):
            raise GroupError(f"point outside 1..{degree} in {s!r}")
        for a, b in zip(pts, pts[1:] + pts[:1]):
            p[a] = b
    return tuple(p)


# ---------------------------------------------------------------------------
# stabilizer chains

class StabChain:
    """Base and strong generating set (deterministic Schreier-Sims)."""

    def __init__(self, gens, degree):
        self.n = degree
        self.gens = [g for g in gens if not is_identity(g)]
        self.base = []
        self.trans = []
        self._build()

    def _first_moved(self, g):
        for i, x in enumerate(g):
            if i != x:
                return i
        raise GroupError("identity has no moved point")

    def _level_gens(self, i):
        b = self.base[:i]
        return [s for s in self.gens if all(s[x] == x for x in b)]

    def _orbit(self, i):
        b = self.base[i]
        gens = self._level_gens(i)
        T = {b: identity(self.n)}
        todo = deque([b])
        while todo:
            p = todo.popleft()
            u = T[p]
            for s in gens:
                y = s[p]
                if y not in T:
                    T[y] = mul(s, u)
                    todo.append(y)
        return T, gens

    def _build(self):
        for g in self.gens:
            if all(g[b] == b for b in self.base):
                self.base.append(self._first_moved(g))
        self.trans = [None] * len(self.base)
        i = len(self.base) - 1
        while i >= 0:
            T, gens = self._orbit(i)
            self.trans[i] = T
            restart = None
            for p, u in T.items():
                for s in gens:
                    sg = mul(inv(T[s[p]]), mul(s, u))
                    if is_identity(sg):
                        continue
                    h, j = self.sift(sg, i + 1)
                    if not is_identity(h):
                        self.gens.append(h)
                        if j == len(self.base):
                            self.base.append(self._first_moved(h))
                            self.trans.append(None)
                            self.trans[j], _ = self._orbit(j)
                        restart = j
                        break
                if restart is not None:
                    break
            if restart is not None:
                i = restart
            else:
                i -= 1

    def sift(self, g, start=0):
        for i in range(start, len(self.base)):
            u = self.trans[i].get(g[self.base[i]])
            if u is None:
                return g, i
            g = mul(inv(u), g)
        return g, len(self.base)

    def contains(self, g):
        h, _ = self.sift(tuple(g))
        return is_identity(h)

    def order(self):
        o = 1
        for T in self.trans:
            o *= len(T)
        return o

    def elements(self):
        """All elements, as products of transversal elements."""
        levels = [list(T.values()) for T in self.trans]
        out = []
        for combo in itertools.product(*levels):
            g = identity(self.n)
            for u in combo:
                g = mul(g, u)
            out.append(g)
        return out

    def canonical(self, g):
        """Canonical element of the left coset g H (H = this group).

        Level by level, the base image is made as small as possible.
        """
        x = g
        for b, T in zip(self.base, self.trans):
            best = min(T, key=lambda d: x[d])
            x = mul(x, T[best])
        return x


# ---------------------------------------------------------------------------
# groups

class GroupSpec:
    """A finite group given by generators, acting on a finite domain.

    ``kind == "perm"``: generators are permutations of ``range(degree)``.
    ``kind == "matrix"``: generators are matrices over F_q acting on column
    vectors; internally they become permutations of the nonzero vectors.
    """

    def __init__(self, gens, degree, kind="perm", q=None, dim=None, matrices=None, name=None):
        self.gens = [tuple(g) for g in gens]
        self.degree = degree
        self.kind = kind
        self.q = q
        self.dim = dim
        self.matrices = matrices
        self.name = name
        for g in self.gens:
            if len(g) != degree or sorted(g) != list(range(degree)):
                raise GroupError("generator is not a permutation of the domain")
        self._chain = None
        if kind == "matrix":
            self._vectors = list(itertools.product(range(q), repeat=dim))[1:]

    # constructors
    @classmethod
    def perm(cls, gens, degree=None, name=None):
        gens = [tuple(g) for g in gens]
        if degree is None:
            if not gens:
                raise GroupError("degree needed for the trivial group")
            degree = len(gens[0])
        return cls(gens, degree, name=name)

    @classmethod
    def matrix(cls, mats, q, dim, name=None):
        vecs = list(itertools.product(range(q), repeat=dim))[1:]
        gens = []
        for M in mats:
            if gf.det(M, q) == 0:
                raise GroupError("singular matrix generator")
            perm = []
            for v in vecs:
                w = tuple(sum(a * b for a, b in zip(row, v)) % q for row in M)
                perm.append(vector_index(w, q))
            gens.append(tuple(perm))
        return cls(gens, len(vecs), kind="matrix", q=q, dim=dim,
                   matrices=[tuple(map(tuple, M)) for M in mats], name=name)

    @classmethod
    def symmetric(cls, n):
        if n == 1:
            return cls([], 1, name="S1")
        gens = [tuple([1, 0] + list(range(2, n)))]
        if n > 2:
            gens.append(tuple(list(range(1, n)) + [0]))
        return cls(gens, n, name=f"S{n}")

    @classmethod
    def from_config(cls, cfg):
        kind = cfg.get("kind", "perm")
        if kind == "perm":
            deg = int(cfg["degree"])
            gens = []
            for g in cfg["generators"]:
                if isinstance(g, str):
                    gens.append(parse_cycles(g, deg))
                else:
                    gens.append(tuple(int(x) for x in g))
            return cls(gens, deg, name=cfg.get("name"))
        if kind == "matrix":
            return cls.matrix(cfg["generators"], int(cfg["q"]), int(cfg["dim"]), name=cfg.get("name"))
        raise GroupError(f"unknown group kind {kind!r}")

    def subgroup(self, gens, name=None):
        for g in gens:
            if not self.contains(g):
                raise GroupError("subgroup generator outside the group")
        return GroupSpec(gens, self.degree, kind=self.kind, q=self.q, dim=self.dim, name=name)

    def __repr__(self):
        return f"GroupSpec({self.name or self.kind}, degree={self.degree}, gens={len(self.gens)})"

    # group services
    @property
    def chain(self):
        if self._chain is None:
            self._chain = StabChain(self.gens, self.degree)
        return self._chain

    def order(self):
        return self.chain.order()

    def contains(self, g):
        g = tuple(g)
        if len(g) != self.degree:
            return False
        return self.chain.contains(g)

    def identity(self):
        return identity(self.degree)

    def elements(self, cap=10 ** 6):
        if self.order() > cap:
            raise IndexTooLarge(f"group of order {self.order()} exceeds cap {cap}")
        return self.chain.elements()

    def from_matrix(self, M):
        if self.kind != "matrix":
            raise GroupError("not a matrix group")
        q = self.q
        return tuple(vector_index(tuple(sum(a * b for a, b in zip(row, v)) % q for row in M), q)
                     for v in self._vectors)

    # action
    def act(self, g, x):
        if isinstance(x, Subspace):
            if self.kind != "matrix":
                raise DomainError("subspaces need a matrix group")
            if x.dim == 0:
                return x
            rows = [self._vectors[g[vector_index(r, self.q)]] for r in x.basis]
            return Subspace.span(rows, self.q, x.ambient_dim)
        if isinstance(x, bool):
            raise DomainError(f"cannot act on {x!r}")
        if isinstance(x, int):
            if not 0 <= x < self.degree:
                raise DomainError(f"point {x} outside the domain")
            return g[x]
        if isinstance(x, frozenset):
            return frozenset(self.act(g, y) for y in x)
        if isinstance(x, tuple):
            if self.kind == "matrix" and len(x) == self.dim and all(isinstance(c, int) for c in x):
                if not any(c % self.q for c in x):
                    return x
                return self._vectors[g[vector_index(x, self.q)]]
            return tuple(self.act(g, y) for y in x)
        raise DomainError(f"cannot act on {x!r}")


def vector_index(v, q):
    """Index of a nonzero vector among the nonzero vectors in lexicographic order."""
    i = 0
    for c in v:
        i = i * q + c % q
    return i - 1


# ---------------------------------------------------------------------------
# orbits and stabilizers

def orbit_transversal(G, x):
    """Orbit of x with, for every point y, an element mapping x to y."""
    T = {x: G.identity()}
    todo = deque([x])
    while todo:
        y = todo.popleft()
        u = T[y]
        for s in G.gens:
            z = G.act(s, y)
            if z not in T:
                T[z] = mul(s, u)
                todo.append(z)
    return T


def orbit(G, x):
    return set(orbit_transversal(G, x))


def stabilizer(G, x):
    """Stabilizer generated by Schreier generators, stopping once its order
    reaches |G| / |orbit|; the order relation is always checked."""
    T = orbit_transversal(G, x)
    target, r = divmod(G.order(), len(T))
    if r:
        raise GroupError("orbit length does not divide the group order")
    gens = []
    chain = StabChain([], G.degree)
    if target > 1:
        done = False
        for y, u in T.items():
            for s in G.gens:
                z = G.act(s, y)
                sg = mul(inv(T[z]), mul(s, u))
                if is_identity(sg) or chain.contains(sg):
                    continue
                gens.append(sg)
                chain = StabChain(gens, G.degree)
                if chain.order() == target:
                    done = True
                    break
            if done:
                break
    H = GroupSpec(gens, G.degree, kind=G.kind, q=G.q, dim=G.dim)
    H._chain = chain
    if chain.order() != target:
        raise GroupError(f"stabilizer order {chain.order()} != {target}")
    for g in gens:
        if G.act(g, x) != x:
            raise GroupError("Schreier generator does not fix the point")
    return H


# ---------------------------------------------------------------------------
# coset pregeometries

@dataclass
class SubgroupFamily:
    """Subgroups G^{t,i}: a list of (type i, tag t, GroupSpec)."""

    members: list = field(default_factory=list)

    def add(self, typ, tag, H):
        self.members.append((typ, tag, H))
        return self

    @classmethod
    def from_gens(cls, G, spec):
        """``spec``: list of (typ, tag, generator list)."""
        fam = cls()
        for typ, tag, gens in spec:
            fam.add(typ, tag, G.subgroup(gens))
        return fam

    def types(self):
        return sorted({t for t, _, _ in self.members})


class CosetSpace:
    """Left cosets g H with the left action of G's generators."""

    def __init__(self, G, H, cap=10 ** 6):
        self.G, self.H = G, H
        hc = H.chain
        start = hc.canonical(G.identity())
        index = {start: 0}
        reps = [start]
        table = [[] for _ in G.gens]
        expected = G.order() // H.order()
        if expected > cap:
            raise IndexTooLarge(f"index {expected} exceeds cap {cap}")
        i = 0
        while i < len(reps):
            x = reps[i]
            for k, s in enumerate(G.gens):
                y = hc.canonical(mul(s, x))
                j = index.get(y)
                if j is None:
                    j = len(reps)
                    index[y] = j
                    reps.append(y)
                table[k].append(j)
            i += 1
        if len(reps) != expected:
            raise GroupError(f"found {len(reps)} cosets, expected {expected}")
        self.reps = reps
        self.index = index
        self.table = table

    def __len__(self):
        return len(self.reps)

    def locate(self, g):
        return self.index[self.H.chain.canonical(tuple(g))]


def _pair_orbit(spaces, a, b):
    """Orbit of the pair (coset 0 of space a, coset 0 of space b)."""
    ta, tb = spaces[a].table, spaces[b].table
    seen = {(0, 0)}
    todo = deque([(0, 0)])
    while todo:
        x, y = todo.popleft()
        for k in range(len(ta)):
            p = (ta[k][x], tb[k][y])
            if p not in seen:
                seen.add(p)
                todo.append(p)
    return seen


class CosetPregeometry(Pregeometry):
    pass


def coset_pregeometry(G, fam, cap=10 ** 6):
    """Elements are cosets (C, t); gG^{t,i} and hG^{s,j} with i != j are
    incident iff they meet.

    Two cosets meet iff they are k G^{t,i} and k G^{s,j} for one k, so the
    incident pairs are the G-orbit of the pair of trivial cosets.
    """
    spaces = [CosetSpace(G, H, cap=cap) for _, _, H in fam.members]
    offsets, typ, labels = [], [], []
    for m, ((ti, tag, _), sp) in enumerate(zip(fam.members, spaces)):
        offsets.append(len(typ))
        typ.extend([ti] * len(sp))
        labels.extend((tag, c) for c in range(len(sp)))
        if len(typ) > cap:
            raise IndexTooLarge(f"more than {cap} cosets")
    inc = []
    for a, b in itertools.combinations(range(len(spaces)), 2):
        if fam.members[a][0] == fam.members[b][0]:
            continue
        for x, y in _pair_orbit(spaces, a, b):
            inc.append((offsets[a] + x, offsets[b] + y))
    g = CosetPregeometry(typ, inc, labels=labels, types=fam.types())
    g.spaces = spaces
    g.offsets = offsets
    g.family = fam
    return g


def generated_order(G, gens):
    return StabChain(list(gens), G.degree).order()


def connectivity_criterion(G, fam):
    if not fam.members:
        raise GroupError("the type set must be nonempty")
    gens = [s for _, _, H in fam.members for s in H.gens]
    return generated_order(G, gens) == G.order()


# ---------------------------------------------------------------------------
# G acting on a geometry

def _elements(geo):
    return list(geo.elements())


def check_action(geo, G, elements=None):
    """Generators must permute the elements preserving type and incidence."""
    els = elements if elements is not None else _elements(geo)
    eset = set(els)
    pairs = _incident_pairs(geo, els)
    for s in G.gens:
        img = {}
        for x in els:
            y = G.act(s, x)
            if y not in eset or geo.typ(y) != geo.typ(x):
                raise NotAnAction(f"generator maps {x!r} outside the geometry or off its type")
            img[x] = y
        if len(set(img.values())) != len(els):
            raise NotAnAction("generator is not injective on elements")
        # a bijection sending incident pairs to incident pairs preserves
        # non-incidence too, the pair set being finite
        for x, y in pairs:
            if not geo.incident(img[x], img[y]):
                raise NotAnAction("generator does not preserve incidence")
    return True


def _incident_pairs(geo, els):
    if isinstance(geo, Pregeometry):
        geo = view(geo)
    if hasattr(geo, "g"):
        g = geo.g
        return [(g.labels[a], g.labels[b]) for a, b in g.edges()]
    if hasattr(geo, "materialize"):
        mg = geo.materialize()
        return [(mg.labels[a], mg.labels[b]) for a, b in mg.edges()]
    return [(x, y) for x, y in itertools.combinations(els, 2)
            if geo.typ(x) != geo.typ(y) and geo.incident(x, y)]


def _flags_of(geo, els, size):
    by_type = {}
    for x in els:
        by_type.setdefault(geo.typ(x), []).append(x)
    types = sorted(by_type)
    out = []
    for ts in itertools.combinations(types, size):
        def grow(k, flag):
            if k == len(ts):
                out.append(tuple(flag))
                return
            for y in by_type[ts[k]]:
                if all(geo.incident(y, z) for z in flag):
                    grow(k + 1, flag + [y])
        grow(0, [])
    return out


def flag_orbits(geo, G, flags):
    """Orbits of G on the given flags (flags as tuples sorted by type)."""
    def key(F):
        return tuple(sorted(F, key=lambda x: (geo.typ(x), repr(x))))
    remaining = {key(F) for F in flags}
    orbits = []
    while remaining:
        F = min(remaining, key=repr)
        orb = {F}
        todo = deque([F])
        while todo:
            A = todo.popleft()
            for s in G.gens:
                B = key(tuple(G.act(s, x) for x in A))
                if B not in orb:
                    orb.add(B)
                    todo.append(B)
        remaining -= orb
        orbits.append(orb)
    return orbits


LEVELS = {"vertex": 1, "incidence": 2, "pennant": 3}


def transitivity_check(geo, G, level, verify_action=True):
    """Is G transitive on same-type flags of the size the level asks for?

    Returns (ok, report) with the number of orbits per type vector.
    ``flag`` means every size, ``chamber`` the full rank.
    """
    geo = view(geo)
    els = _elements(geo)
    if verify_action:
        check_action(geo, G, els)
    types = sorted({geo.typ(x) for x in els})
    if level == "flag":
        sizes = range(1, len(types) + 1)
    elif level == "chamber":
        sizes = [len(types)]
    elif level in LEVELS:
        sizes = [LEVELS[level]]
    else:
        raise ValueError(f"unknown level {level!r}")
    counts = {}
    for k in sizes:
        flags = _flags_of(geo, els, k)
        by_tv = {}
        for F in flags:
            by_tv.setdefault(tuple(sorted(geo.typ(x) for x in F)), []).append(F)
        for tv, fl in by_tv.items():
            counts[tv] = len(flag_orbits(geo, G, fl))
    ok = all(c == 1 for c in counts.values())
    return ok, {"level": level, "orbits": {",".join(map(str, k)): v for k, v in sorted(counts.items())}}


def orbit_geometry(geo, G, V, W=None):
    """Sub-pregeometry on the union of the G-orbits of the chamber V."""
    geo = view(geo)
    V = list(V)
    tv = [geo.typ(x) for x in V]
    if len(set(tv)) != len(tv) or not all(geo.incident(x, y) for x, y in itertools.combinations(V, 2)):
        raise NotAChamber("V is not a flag")
    if W is not None:
        wtypes = {geo.typ(x) for x in W}
        if set(tv) != wtypes or not set(V) <= set(W):
            raise NotAChamber("V is not a chamber of W")
    labels = []
    for x in V:
        labels.extend(sorted(orbit(G, x), key=_sort_key))
    typ = [geo.typ(x) for x in labels]
    inc = [(i, j) for i, j in itertools.combinations(range(len(labels)), 2)
           if typ[i] != typ[j] and geo.incident(labels[i], labels[j])]
    return Pregeometry(typ, inc, labels=labels, types=sorted(set(tv)))


def _sort_key(x):
    return x.basis if isinstance(x, Subspace) else repr(x)


# ---------------------------------------------------------------------------
# sketches and reconstruction

@dataclass
class Sketch:
    geometry: Pregeometry
    G: GroupSpec
    W: list
    stabilizers: list


def _check_representatives(geo, G, W):
    orbits = []
    for w in W:
        o = orbit(G, w)
        for j, other in enumerate(orbits):
            if w in other:
                raise NotRepresentatives(f"{W[j]!r} and {w!r} lie in one orbit")
        orbits.append(o)
    covered = set().union(*orbits) if orbits else set()
    for x in geo.elements():
        if x not in covered:
            raise NotRepresentatives(f"orbit of {x!r} has no representative")
    return orbits


def sketch(geo, G, W, cap=10 ** 6):
    geo = view(geo)
    W = list(W)
    _check_representatives(geo, G, W)
    stabs = [stabilizer(G, w) for w in W]
    fam = SubgroupFamily()
    for w, H in zip(W, stabs):
        fam.add(geo.typ(w), w, H)
    return Sketch(coset_pregeometry(G, fam, cap=cap), G, W, stabs)


def chambers_of(geo, W):
    """Chambers (maximal type-injective flags covering all types) inside W."""
    geo = view(geo)
    by_type = {}
    for w in W:
        by_type.setdefault(geo.typ(w), []).append(w)
    out = []
    for combo in itertools.product(*(by_type[t] for t in sorted(by_type))):
        if all(geo.incident(x, y) for x, y in itertools.combinations(combo, 2)):
            out.append(combo)
    return out


def incidence_transitive_orbits(geo, G, W):
    """Hypothesis (ii): every chamber's orbit pregeometry is incidence-transitive."""
    report = {}
    ok = True
    for V in chambers_of(geo, W):
        og = orbit_geometry(geo, G, V)
        t_ok, rep = transitivity_check(og, G, "incidence", verify_action=False)
        report[" ".join(map(_short, V))] = rep["orbits"]
        ok = ok and t_ok
    return ok, report


def _short(x):
    if isinstance(x, Subspace):
        return "[" + ";".join("".join(map(str, r)) for r in x.basis) + "]"
    return repr(x)


def stroppel_reconstruct(geo, G, W, cap=10 ** 6, check_hypotheses=True):
    """Check that g G_w -> g.w is an isomorphism of pregeometries and G-sets.

    Returns (verdict dict, map from (w index, coset index) to element).
    """
    gv = view(geo)
    W = list(W)
    if check_hypotheses:
        if not _hall(gv, W):
            raise HypothesisFailed("i", "W is not a hall")
        ok, rep = incidence_transitive_orbits(gv, G, W)
        if not ok:
            raise HypothesisFailed("ii", f"orbit counts {rep}")
    sk = sketch(gv, G, W, cap=cap)
    cg = sk.geometry
    mismatches = []
    phi = {}
    images = {}
    for m, (w, H) in enumerate(zip(W, sk.stabilizers)):
        for h in H.gens:
            if G.act(h, w) != w:
                mismatches.append(f"stabilizer generator moves {w!r}")
        sp = cg.spaces[m]
        for c, rep in enumerate(sp.reps):
            x = G.act(rep, w)
            phi[(m, c)] = x
            elem = cg.offsets[m] + c
            if x in images:
                mismatches.append(f"two cosets map to {x!r}")
            images[x] = elem
            if gv.typ(x) != cg.typ[elem]:
                mismatches.append(f"type mismatch at {x!r}")
        for k, s in enumerate(G.gens):
            for c in range(len(sp)):
                if G.act(s, phi[(m, c)]) != phi[(m, sp.table[k][c])]:
                    mismatches.append(f"action mismatch for generator {k}")
                    break
    all_elements = list(gv.elements())
    if set(images) != set(all_elements):
        mismatches.append(f"image has {len(images)} elements, geometry {len(all_elements)}")
    # incidence both ways
    coset_inc = set()
    for a, b in cg.edges():
        ea = phi[(_member(cg, a), cg.labels[a][1])]
        eb = phi[(_member(cg, b), cg.labels[b][1])]
        coset_inc.add(frozenset((ea, eb)))
    geo_inc = set()
    if hasattr(gv, "materialize") and not isinstance(geo, Pregeometry):
        mg = gv.materialize()
        for a, b in mg.edges():
            geo_inc.add(frozenset((mg.labels[a], mg.labels[b])))
    else:
        for x, y in itertools.combinations(all_elements, 2):
            if gv.typ(x) != gv.typ(y) and gv.incident(x, y):
                geo_inc.add(frozenset((x, y)))
    if coset_inc != geo_inc:
        mismatches.append(f"incidence: {len(coset_inc - geo_inc)} extra, {len(geo_inc - coset_inc)} missing")
    verdict = {
        "hall": True, "hypothesis_ii": check_hypotheses,
        "elements": len(all_elements), "cosets": len(cg),
        "incidences": len(geo_inc), "mismatches": mismatches,
        "isomorphism": not mismatches,
    }
    if mismatches:
        raise NotIsomorphic("; ".join(mismatches[:5]))
    return verdict, phi


def _member(cg, elem):
    m = 0
    while m + 1 < len(cg.offsets) and cg.offsets[m + 1] <= elem:
        m += 1
    return m


def _hall(gv, W):
    types = {gv.typ(w) for w in W}
    if types != set(gv.types):
        return False
    return all(gv.typ(x) == gv.typ(y) or gv.incident(x, y) for x, y in itertools.combinations(W, 2))


def element_permutation(geo, G, g, elements=None):
    """The permutation of element positions induced by a group element."""
    gv = view(geo)
    els = elements if elements is not None else list(gv.elements())
    pos = {x: i for i, x in enumerate(els)}
    return tuple(pos[G.act(g, x)] for x in els)
