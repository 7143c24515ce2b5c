"""Amalgams of finite groups, their universal completions, and the
verification pipelines built on them.

Words are lists of letters: 2k is generator k and 2k+1 its inverse, so
``letter ^ 1`` inverts a letter.
"""

from __future__ import annotations

import itertools
import random
import warnings
from collections import deque
from dataclasses import dataclass, field

from .cosetgeo import (GroupError, GroupSpec, HypothesisFailed, StabChain, SubgroupFamily,
                       _hall, _short, chambers_of, coset_pregeometry, identity, inv,
                       mul, orbit_geometry, stabilizer, transitivity_check)
from .pregeo import Pregeometry, basic_diagram, is_connected, residue, view


class AmalgamError(ValueError):
    pass


class CapExceeded(AmalgamError):
    pass


class TooLarge(AmalgamError):
    pass


class Inconclusive(AmalgamError):
    pass


class ResidueNotVerified(AmalgamError):
    def __init__(self, flag, detail=""):
        super().__init__(f"residue of {flag} not verified simply connected: {detail}")
        self.flag = flag
        self.detail = detail


class NotAMonomorphism(AmalgamError):
    pass


class Unreachable(AmalgamError):
    pass


# ---------------------------------------------------------------------------
# Todd-Coxeter

@dataclass
class CosetTable:
    """A complete coset table: ``table[c][letter]`` is the coset c.letter."""

    ngens: int
    table: list
    defined: int
    lookaheads: int = 0

    @property
    def index(self):
        return len(self.table)

    def trace(self, c, word):
        for x in word:
            c = self.table[c][x]
        return c

    def permutation(self, letter):
        return tuple(row[letter] for row in self.table)

    def spanning_words(self):
        """For each coset c a word w_c with 0.w_c = c (BFS order)."""
        words = [None] * self.index
        words[0] = []
        todo = deque([0])
        while todo:
            c = todo.popleft()
            for x in range(2 * self.ngens):
                d = self.table[c][x]
                if words[d] is None:
                    words[d] = words[c] + [x]
                    todo.append(d)
        return words


class _Restart(Exception):
    """A lookahead freed cosets; the current coset is processed again."""


class _Enumerator:
    """HLT coset enumeration with coincidence processing."""

    def __init__(self, ngens, cap, relators=()):
        self.ncols = 2 * ngens
        self.table = [[-1] * self.ncols]
        self.p = [0]
        self.cap = cap
        self.live = 1
        self.relators = relators
        self.lookaheads = 0

    def define(self, c, x):
        if self.live >= self.cap:
            self.lookahead()
            if self.live >= self.cap:
                raise CapExceeded(f"coset table reached the cap of {self.cap} live cosets")
            raise _Restart
        d = len(self.table)
        self.live += 1
        self.table.append([-1] * self.ncols)
        self.p.append(d)
        self.table[c][x] = d
        self.table[d][x ^ 1] = c

    def rep(self, c):
        p = self.p
        r = c
        while p[r] != r:
            r = p[r]
        while p[c] != r:
            p[c], c = r, p[c]
        return r

    def merge(self, k, l, queue):
        k, l = self.rep(k), self.rep(l)
        if k == l:
            return
        if k > l:
            k, l = l, k
        self.p[l] = k
        self.live -= 1
        queue.append(l)

    def coincidence(self, a, b):
        table = self.table
        queue = []
        self.merge(a, b, queue)
        i = 0
        while i < len(queue):
            e = queue[i]
            i += 1
            for x in range(self.ncols):
                f = table[e][x]
                if f < 0:
                    continue
                xi = x ^ 1
                table[f][xi] = -1
                e1, f1 = self.rep(e), self.rep(f)
                if table[e1][x] >= 0:
                    self.merge(f1, table[e1][x], queue)
                elif table[f1][xi] >= 0:
                    self.merge(e1, table[f1][xi], queue)
                else:
                    table[e1][x] = f1
                    table[f1][xi] = e1

    def scan_and_fill(self, c, w):
        table = self.table
        f = b = c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] >= 0:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and table[b][w[j] ^ 1] >= 0:
                b = table[b][w[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                table[f][w[i]] = b
                table[b][w[i] ^ 1] = f
                return
            self.define(f, w[i])

    def scan(self, c, w):
        """Like scan_and_fill but never defines cosets (used by lookahead)."""
        table = self.table
        f = b = c
        i, j = 0, len(w) - 1
        while i <= j and table[f][w[i]] >= 0:
            f = table[f][w[i]]
            i += 1
        if i > j:
            if f != b:
                self.coincidence(f, b)
            return
        while j >= i and table[b][w[j] ^ 1] >= 0:
            b = table[b][w[j] ^ 1]
            j -= 1
        if j < i:
            self.coincidence(f, b)
        elif i == j:
            table[f][w[i]] = b
            table[b][w[i] ^ 1] = f

    def lookahead(self):
        """Scan every live coset under every relator without defining any."""
        self.lookaheads += 1
        for c in range(len(self.table)):
            for r in self.relators:
                if self.p[c] != c:
                    break
                self.scan(c, r)

    def run(self, relators, subgroup):
        for w in subgroup:
            while w:
                try:
                    self.scan_and_fill(0, w)
                    break
                except _Restart:
                    pass
        c = 0
        while c < len(self.table):
            try:
                self._process(c, relators)
            except _Restart:
                continue
            c += 1

    def _process(self, c, relators):
        for r in relators:
            if self.p[c] != c:
                return
            self.scan_and_fill(c, r)
        row = self.table[c]
        for x in range(self.ncols):
            if self.p[c] != c:
                return
            if row[x] < 0:
                self.define(c, x)

    def compact(self, ngens):
        live = [c for c in range(len(self.table)) if self.p[c] == c]
        new = {c: i for i, c in enumerate(live)}
        table = [[new[self.rep(self.table[c][x])] for x in range(self.ncols)] for c in live]
        return CosetTable(ngens, table, len(self.table), self.lookaheads)


def todd_coxeter(pres, relators=None, subgroup=(), cap=10 ** 6):
    """Enumerate the cosets of <subgroup> in the finitely presented group.

    ``pres`` is a :class:`Presentation` or a generator count (then
    ``relators`` is required). Cosets are defined HLT-style, lowest
    undefined entry first. When ``cap`` live cosets are reached a lookahead
    pass runs; if it frees nothing, CapExceeded is raised, which says
    nothing about finiteness.
    """
    if isinstance(pres, Presentation):
        ngens, relators = pres.ngens, pres.relators
    else:
        ngens = int(pres)
    relators = [list(r) for r in (relators or []) if r]
    if ngens == 0:
        return CosetTable(0, [[]], 1)
    for r in relators:
        if any(not 0 <= x < 2 * ngens for x in r):
            raise AmalgamError("relator letter outside the generator range")
    E = _Enumerator(ngens, cap, relators)
    E.run(relators, [list(w) for w in subgroup])
    return E.compact(ngens)


def parse_word(s, names):
    """'a b^-1 a' or 'aB' style words; capital letter = inverse."""
    idx = {n: k for k, n in enumerate(names)}
    out = []
    toks = s.replace("*", " ").split()
    if len(toks) == 1 and all(ch.isalpha() for ch in toks[0]) and toks[0] not in idx:
        toks = list(toks[0])
    for t in toks:
        power = 1
        if "^" in t:
            t, e = t.split("^")
            power = int(e)
        if t in idx:
            k, sign = idx[t], 0
        elif t.lower() in idx and t.isupper():
            k, sign = idx[t.lower()], 1
        else:
            raise AmalgamError(f"unknown generator {t!r}")
        if power < 0:
            sign ^= 1
            power = -power
        out += [2 * k + sign] * power
    return out


def free_reduce(w, cyclic=True):
    out = []
    for x in w:
        if out and out[-1] == x ^ 1:
            out.pop()
        else:
            out.append(x)
    if cyclic:
        while len(out) >= 2 and out[0] == out[-1] ^ 1:
            out = out[1:-1]
    return out


# ---------------------------------------------------------------------------
# amalgams

def _extend_hom(src, images, dst_mul, dst_identity):
    """Map on all elements of src from generator images; None if inconsistent."""
    m = {src.identity(): dst_identity}
    todo = deque([src.identity()])
    while todo:
        e = todo.popleft()
        for s, img in zip(src.gens, images):
            ne = mul(s, e)
            val = dst_mul(img, m[e])
            if ne in m:
                if m[ne] != val:
                    return None
            else:
                m[ne] = val
                todo.append(ne)
    return m


class Amalgam:
    """Finite groups with identification monomorphisms between them.

    ``groups`` maps names to GroupSpecs. ``identifications`` is a list of
    (src, dst, images) with ``images`` either the list of images of src's
    generators or a dict on all of src. Every map is checked to be an
    injective homomorphism, and every group must reach a top-level group
    (default: the groups without outgoing identifications).
    """

    def __init__(self, groups, identifications, top=None, cap=10 ** 5, on_noncommuting="ignore"):
        self.groups = dict(groups)
        self.names = list(self.groups)
        self.elements = {}
        total = 0
        for n, G in self.groups.items():
            if G.order() > cap:
                raise TooLarge(f"group {n!r} has order {G.order()} > {cap}")
            self.elements[n] = G.elements()
            total += len(self.elements[n])
        self.size = total
        self.maps = []
        for src, dst, images in identifications:
            if src not in self.groups or dst not in self.groups:
                raise AmalgamError(f"identification between unknown groups {src!r}, {dst!r}")
            S, D = self.groups[src], self.groups[dst]
            if isinstance(images, dict):
                m = {tuple(k): tuple(v) for k, v in images.items()}
            else:
                m = _extend_hom(S, [tuple(x) for x in images], mul, D.identity())
                if m is None:
                    raise NotAMonomorphism(f"{src} -> {dst}: generator images do not define a homomorphism")
            if len(m) != len(self.elements[src]) or set(m) != set(self.elements[src]):
                raise NotAMonomorphism(f"{src} -> {dst}: map not defined on the whole group")
            # m(s x) = m(s) m(x) for generators s forces m to be a homomorphism
            for s in S.gens:
                for x in self.elements[src]:
                    if m[mul(s, x)] != mul(m[s], m[x]):
                        raise NotAMonomorphism(f"{src} -> {dst}: not a homomorphism")
            if len(set(m.values())) != len(m):
                raise NotAMonomorphism(f"{src} -> {dst}: not injective")
            if not all(D.contains(v) for v in m.values()):
                raise NotAMonomorphism(f"{src} -> {dst}: image outside the target group")
            self.maps.append((src, dst, m))
        outgoing = {s for s, _, _ in self.maps}
        self.top = list(top) if top is not None else [n for n in self.names if n not in outgoing]
        self._check_reachability()
        if on_noncommuting != "ignore":
            bad = self.non_commuting()
            if bad:
                msg = f"{len(bad)} pairs of composite identifications disagree, e.g. {bad[0]}"
                if on_noncommuting == "error":
                    raise AmalgamError(msg)
                warnings.warn(msg, stacklevel=2)

    @classmethod
    def from_config(cls, cfg):
        """JSON amalgam spec.

        ``{"groups": {name: group config}, "identifications": [{"from": a,
        "to": b, "images": [...]}], "top": [...]}``; images are permutations
        (lists or cycle strings in the target's degree) of the source
        generators.
        """
        from .cosetgeo import parse_cycles
        groups = {n: GroupSpec.from_config(g) for n, g in cfg["groups"].items()}
        idents = []
        for e in cfg.get("identifications", []):
            src, dst = e["from"], e["to"]
            if dst not in groups:
                raise AmalgamError(f"identification into unknown group {dst!r}")
            deg = groups[dst].degree
            images = [parse_cycles(x, deg) if isinstance(x, str) else tuple(int(v) for v in x)
                      for x in e["images"]]
            idents.append((src, dst, images))
        return cls(groups, idents, top=cfg.get("top"),
                   on_noncommuting=cfg.get("on_noncommuting", "ignore"))

    def _check_reachability(self):
        succ = {n: set() for n in self.names}
        for s, d, _ in self.maps:
            succ[s].add(d)
        top = set(self.top)
        for n in self.names:
            seen = {n}
            todo = [n]
            while todo:
                x = todo.pop()
                for y in succ[x]:
                    if y not in seen:
                        seen.add(y)
                        todo.append(y)
            if not seen & top:
                raise Unreachable(f"group {n!r} does not embed into a top-level group")

    def non_commuting(self):
        """Pairs of identification paths with equal ends but different composites."""
        paths = {}

        def walk(start, node, comp, trail):
            paths.setdefault((start, node), []).append((trail, comp))
            for s, d, m in self.maps:
                if s == node:
                    walk(start, d, {x: m[y] for x, y in comp.items()}, trail + [d])

        for n in self.names:
            walk(n, n, {x: x for x in self.elements[n]}, [n])
        out = []
        for (a, b), ps in paths.items():
            for (t1, c1), (t2, c2) in itertools.combinations(ps, 2):
                if c1 != c2:
                    out.append((t1, t2))
        return out

    def summary(self):
        return {"groups": {str(n): self.groups[n].order() for n in self.names},
                "identifications": len(self.maps), "top": [str(t) for t in self.top],
                "disjoint_union": self.size}


def image_amalgam(A, f, degree):
    """The quotient amalgam obtained by applying f to every member.

    ``f`` must be a homomorphism on each member (checked) into permutations
    of ``degree`` points; identifications become the induced inclusions.
    """
    groups = {}
    for n in A.names:
        imgs = {f(x) for x in A.elements[n]}
        for x in A.elements[n]:
            for y in A.elements[n]:
                if f(mul(x, y)) != mul(f(x), f(y)):
                    raise NotAMonomorphism(f"map is not a homomorphism on {n!r}")
        groups[n] = GroupSpec(sorted(imgs - {identity(degree)}), degree)
    idents = []
    for s, d, m in A.maps:
        mm = {}
        for x, y in m.items():
            fx, fy = f(x), f(y)
            if mm.setdefault(fx, fy) != fy:
                raise AmalgamError(f"identification {s} -> {d} does not descend")
        idents.append((s, d, mm))
    return Amalgam(groups, idents, top=A.top)


# ---------------------------------------------------------------------------
# presentations

@dataclass
class Presentation:
    ngens: int
    relators: list
    names: list = field(default_factory=list)
    symbol: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    def letter(self, group, x):
        """Letter of u_x for x in the named group, None for the identity."""
        return self.symbol[(group, tuple(x))]

    def word(self, group, x):
        k = self.letter(group, x)
        return [] if k is None else [k]


class _UF:
    def __init__(self):
        self.p = {}

    def find(self, x):
        p = self.p
        p.setdefault(x, x)
        r = x
        while p[r] != r:
            r = p[r]
        while p[x] != r:
            p[x], x = r, p[x]
        return r

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.p[b] = a


def universal_completion_presentation(A, cap=200000):
    """Generators u_x for x in the disjoint union, relations S1 and S2.

    S2 is applied by fusing generators before anything else, and the
    identity classes are removed (u_1 = 1 follows from u_1 u_1 = u_1).
    """
    if A.size > cap:
        raise TooLarge(f"disjoint union has {A.size} elements > cap {cap}")
    uf = _UF()
    order = []
    for n in A.names:
        for x in A.elements[n]:
            uf.find((n, x))
            order.append((n, x))
    for s, d, m in A.maps:
        for x, y in m.items():
            uf.union((d, y), (s, x))
    killed = set()
    for n in A.names:
        killed.add(uf.find((n, A.groups[n].identity())))
    gen_of = {}
    names = []
    symbol = {}
    for key in order:
        r = uf.find(key)
        if r in killed:
            symbol[key] = None
            continue
        if r not in gen_of:
            gen_of[r] = len(names)
            names.append(r)
        symbol[key] = 2 * gen_of[r]
    rels = set()
    s1 = 0
    for n in A.names:
        els = A.elements[n]
        for x in els:
            for y in els:
                s1 += 1
                z = mul(x, y)
                w = []
                for k in (symbol[(n, x)], symbol[(n, y)]):
                    if k is not None:
                        w.append(k)
                kz = symbol[(n, z)]
                if kz is not None:
                    w.append(kz ^ 1)
                w = free_reduce(w)
                if w:
                    rels.add(_canonical_rotation(w))
    relators = sorted(rels, key=lambda w: (len(w), w))
    stats = {"disjoint_union": A.size, "generators": len(names), "S1": s1,
             "S2": sum(len(m) for _, _, m in A.maps), "relators": len(relators),
             "killed_classes": len(killed)}
    return Presentation(len(names), [list(w) for w in relators], names, symbol, stats)


def _canonical_rotation(w):
    best = None
    for i in range(len(w)):
        r = tuple(w[i:] + w[:i])
        if best is None or r < best:
            best = r
    return best


def universal_completion(A, cap=10 ** 6, pres=None):
    """(P, table, U, psi): U(A) as a regular permutation group with the
    canonical maps psi[name][x] in U."""
    P = pres or universal_completion_presentation(A)
    T = todd_coxeter(P, cap=cap)
    U, lam = regular_representation(T)
    ident = identity(T.index)
    psi = {}
    for n in A.names:
        psi[n] = {}
        for x in A.elements[n]:
            k = P.symbol[(n, x)]
            psi[n][x] = ident if k is None else lam[k]
    return P, T, U, psi


def regular_representation(T):
    """Left regular action of the enumerated group (trivial subgroup).

    lam[letter] is the permutation c -> coset of (letter * w_c).
    """
    words = T.spanning_words()
    lam = {}
    for x in range(2 * T.ngens):
        lam[x] = tuple(T.trace(T.table[0][x], w) for w in words)
    gens = [lam[2 * k] for k in range(T.ngens)]
    if not gens:
        return GroupSpec([], T.index, name="U(A)"), lam
    return GroupSpec(gens, T.index, name="U(A)"), lam


def completion_check(A, target, psi):
    """Conditions of a completion (G, psi) of A, and faithfulness.

    ``psi[name]`` is a dict or a callable on the elements of that group.
    Compatibility is checked on every identification, which also forces the
    completion to equalize composite identifications.
    """
    def f(n, x):
        p = psi[n]
        return p(x) if callable(p) else p[x]

    report = {"homomorphism": True, "compatible": True, "generates": False,
              "faithful": True, "failures": []}
    for n in A.names:
        els = A.elements[n]
        for x in els:
            if not target.contains(f(n, x)):
                report["homomorphism"] = False
                report["failures"].append(f"{n}: image outside target")
                break
        for x in els:
            for y in els:
                if f(n, mul(x, y)) != mul(f(n, x), f(n, y)):
                    report["homomorphism"] = False
                    report["failures"].append(f"{n}: not a homomorphism")
                    break
            else:
                continue
            break
        if len({f(n, x) for x in els}) != len(els):
            report["faithful"] = False
    for s, d, m in A.maps:
        if any(f(d, y) != f(s, x) for x, y in m.items()):
            report["compatible"] = False
            report["failures"].append(f"{s} -> {d}: not compatible")
    images = {f(n, x) for n in A.names for x in A.elements[n]}
    report["generates"] = StabChain(sorted(images), target.degree).order() == target.order()
    if not report["generates"]:
        report["failures"].append("images do not generate the target")
    report["completion"] = report["homomorphism"] and report["compatible"] and report["generates"]
    report["faithful"] = report["faithful"] and report["completion"]
    return report


# ---------------------------------------------------------------------------
# shapes and parabolics

def _flag_key(geo, U):
    return tuple(sorted(U, key=lambda x: (geo.typ(x), _short(x))))


def flags_in(geo, W, include_empty=False):
    """All flags contained in W, as type-sorted tuples, smallest first."""
    geo = view(geo)
    W = list(W)
    out = []
    for k in range(0 if include_empty else 1, len(W) + 1):
        for U in itertools.combinations(W, k):
            if len({geo.typ(x) for x in U}) == k and all(
                    geo.incident(x, y) for x, y in itertools.combinations(U, 2)):
                out.append(_flag_key(geo, U))
    return out


@dataclass
class Shape:
    """A superset-closed family of flags inside W."""

    flags: frozenset

    @classmethod
    def all_nonempty(cls, geo, W):
        return cls(frozenset(flags_in(geo, W)))

    @classmethod
    def power_set(cls, geo, W):
        return cls(frozenset(flags_in(geo, W, include_empty=True)))

    @classmethod
    def rank_at_most(cls, geo, W, k):
        """Flags U of corank |types| - |U| <= k, i.e. parabolics of rank <= k."""
        geo = view(geo)
        r = len({geo.typ(x) for x in W})
        return cls(frozenset(U for U in flags_in(geo, W, include_empty=True) if r - len(U) <= k))

    def is_superset_closed(self, geo, W):
        allf = flags_in(geo, W, include_empty=True)
        for U in self.flags:
            for V in allf:
                if set(U) <= set(V) and V not in self.flags:
                    return False
        return True

    def __contains__(self, U):
        return U in self.flags

    def __len__(self):
        return len(self.flags)


def check_tits_hypotheses(geo, G, W, pennant=True):
    """(i) W is a hall; (ii) every chamber orbit pregeometry is incidence-
    and (optionally) pennant-transitive."""
    gv = view(geo)
    W = list(W)
    rep = {"hall": _hall(gv, W)}
    inc_ok = pen_ok = True
    details = {}
    for V in chambers_of(gv, W):
        og = orbit_geometry(gv, G, V)
        a, ra = transitivity_check(og, G, "incidence", verify_action=False)
        inc_ok &= a
        entry = {"incidence": ra["orbits"]}
        if pennant and len(V) >= 3:
            b, rb = transitivity_check(og, G, "pennant", verify_action=False)
            pen_ok &= b
            entry["pennant"] = rb["orbits"]
        details[" ".join(_short(x) for x in V)] = entry
    rep["incidence_transitive"] = inc_ok
    if pennant:
        rep["pennant_transitive"] = pen_ok
    rep["chambers"] = details
    rep["ok"] = rep["hall"] and inc_ok and (pen_ok or not pennant)
    return rep


def check_flag_transitive_orbits(geo, G, W):
    """Hypothesis (ii) of the shape theorem: flag-transitivity of the orbit
    pregeometry of every flag V inside W."""
    gv = view(geo)
    ok = True
    details = {}
    for V in flags_in(gv, W):
        og = orbit_geometry(gv, G, V)
        a, ra = transitivity_check(og, G, "flag", verify_action=False)
        ok &= a
        details[" ".join(_short(x) for x in V)] = ra["orbits"]
    return {"hall": _hall(gv, list(W)), "flag_transitive": ok, "flags": details,
            "ok": ok and _hall(gv, list(W))}


def amalgam_of_parabolics(geo, G, W, shape=None, check_hypotheses=True):
    """Stabilizers G_U of the flags U in the shape, with inclusions G_V <= G_U
    for U a maximal proper subflag of V. The empty flag contributes G itself."""
    gv = view(geo)
    W = list(W)
    if check_hypotheses:
        rep = check_tits_hypotheses(gv, G, W, pennant=False)
        if not rep["hall"]:
            raise HypothesisFailed("i", "W is not a hall")
        if not rep["incidence_transitive"]:
            raise HypothesisFailed("ii", f"orbit pregeometry not incidence-transitive: {rep['chambers']}")
    fl = sorted(shape.flags, key=lambda U: (len(U), [_short(x) for x in U])) if shape is not None \
        else flags_in(gv, W)
    groups = {}
    for U in fl:
        groups[U] = G if not U else stabilizer(G, tuple(U))
    idents = []
    fset = set(fl)
    for V in fl:
        for x in V:
            U = tuple(y for y in V if y != x)
            if U in fset:
                H = groups[V]
                idents.append((V, U, {e: e for e in H.elements()}))
    A = Amalgam(groups, idents)
    A.flags = fl
    A.G = G
    return A


def canonical_completion(A):
    """The inclusions of the parabolics into G."""
    return {n: {x: x for x in A.elements[n]} for n in A.names}


# ---------------------------------------------------------------------------
# Tits' lemma and the covering theorem

def _materialize(geo, cap=200000):
    if isinstance(geo, Pregeometry):
        return geo
    return geo.materialize(cap)


def tits_verify(geo, G, W, cap=10 ** 6, evidence=None, check_hypotheses=True):
    """Verdict on U(A) -> G for the amalgam of parabolics of (geo, G, W).

    Toy scale: enumerate U(A) and compare orders. Certificate scale (``G``
    too large, or the enumeration hits the cap): use ``evidence``, a dict
    with simple-connectivity evidence, and report the implied isomorphism.
    """
    gv = view(geo)
    W = list(W)
    rank = len({gv.typ(x) for x in W})
    if rank < 3:
        raise HypothesisFailed("rank", f"rank {rank} < 3")
    report = {"rank": rank, "cap": cap}
    if check_hypotheses:
        hyp = check_tits_hypotheses(gv, G, W)
        report["hypotheses"] = hyp
        if not hyp["ok"]:
            raise HypothesisFailed("ii" if hyp["hall"] else "i", str(hyp))
    mg = _materialize(geo)
    report["connected"] = is_connected(mg)
    if not report["connected"]:
        raise HypothesisFailed("connectivity", "geometry is not connected")
    A = amalgam_of_parabolics(gv, G, W, check_hypotheses=False)
    P = universal_completion_presentation(A)
    report["presentation"] = P.stats
    report["order_G"] = G.order()
    try:
        T = todd_coxeter(P, cap=cap)
    except CapExceeded as e:
        if evidence is None:
            raise Inconclusive(f"enumeration hit the cap and no evidence was supplied: {e}") from e
        report["order_U"] = None
        return _certified(report, evidence)
    report["order_U"] = T.index
    from .homotopy import TooLarge as HTooLarge, homology_h1
    try:
        h1 = homology_h1(mg)
        report["h1"] = str(h1)
        h1_trivial = h1.trivial
    except HTooLarge:
        report["h1"] = None
        h1_trivial = None
    iso = T.index == G.order()
    if iso and h1_trivial is False:
        report["verdict"] = "inconsistent"
        report["isomorphism"] = False
        report["note"] = "enumeration says isomorphism but H1 is nontrivial"
        return report
    report["isomorphism"] = iso
    report["index"] = T.index // G.order() if T.index % G.order() == 0 else None
    report["simply_connected"] = iso
    report["verdict"] = "isomorphism" if iso else "proper cover"
    return report


def _certified(report, evidence):
    ok = evidence.get("certificates_failed", 1) == 0 and evidence.get("certificates_verified", 0) > 0 \
        and evidence.get("search_exhausted", 0) == 0
    if evidence.get("h1") not in (None, "0"):
        ok = False
    report["evidence"] = evidence
    report["isomorphism"] = ok
    report["verdict"] = "certified isomorphism" if ok else "not certified"
    return report


def tits_verify_orth(geo, evidence, hypothesis_samples=20, seed=0):
    """Certificate-scale verdict for an orthogonal W-geometry under SO(V).

    Hypotheses are evidenced by explicit transporters in SO(V) between
    sampled flags of equal labels; simple connectivity by certificate
    evidence. No enumeration of the group happens.
    """
    rank = len(geo.types)
    if rank < 3:
        raise HypothesisFailed("rank", f"rank {rank} < 3")
    hyp = orth_hypothesis_evidence(geo, samples=hypothesis_samples, seed=seed)
    report = {"rank": rank, "hypotheses": hyp, "order_U": None,
              "group": f"SO_{geo.f.dim}(F_{geo.q})"}
    if not hyp["ok"]:
        raise HypothesisFailed("ii", str(hyp))
    return _certified(report, evidence)


def orth_hypothesis_evidence(geo, samples=20, seed=0):
    """Hall check plus sampled transporter evidence for transitivity of SO(V)
    on incident pairs and pennants with the labels occurring in the hall."""
    from .orthospace import image, is_isometry
    from . import gf
    rng = random.Random(seed)
    f = geo.f
    W = geo.realize_hall()
    labels = [(X.dim, geo.sign_of(X)) for X in W]
    hall_ok = all(geo.contains(X) for X in W) and all(
        geo.incident(X, Y) for X, Y in itertools.combinations(W, 2) if X.dim != Y.dim)
    checked = failed = 0
    for size in (2, 3):
        for V in itertools.combinations(W, size):
            if len({X.dim for X in V}) != size or not all(
                    geo.incident(X, Y) for X, Y in itertools.combinations(V, 2)):
                continue
            V = sorted(V, key=lambda X: X.dim)
            for _ in range(samples):
                Vp = _random_flag_like(geo, V, rng)
                g = witt_transporter(V, Vp, f)
                checked += 1
                if g is None or not is_isometry(g, f) or gf.det(g, f.q) != 1 or \
                        any(image(g, X) != Y for X, Y in zip(V, Vp)):
                    failed += 1
    return {"hall": hall_ok, "hall_labels": [(d, str(s)) for d, s in labels],
            "transporters_checked": checked, "transporters_failed": failed,
            "ok": hall_ok and failed == 0 and checked > 0,
            "method": "explicit SO transporters between sampled flags of equal labels"}


def _random_flag_like(geo, V, rng, tries=2000):
    from .orthospace import random_nondegenerate
    f = geo.f
    for _ in range(tries):
        out = []
        prev = None
        ok = True
        for X in V:
            if prev is None:
                Y = random_nondegenerate(f, X.dim, rng)
            else:
                from .orthospace import perp
                comp = random_nondegenerate(f, X.dim - prev.dim, rng,
                                            within=perp(prev, f))
                Y = prev + comp
            if geo.sign_of(Y) is not geo.sign_of(X):
                ok = False
                break
            out.append(Y)
            prev = Y
        if ok:
            return out
    raise GroupError("no random flag with the requested labels")


def _standard_basis(S, f):
    """Orthogonal basis of S with Q-values 1, ..., 1, delta."""
    from .orthospace import orthogonal_basis, perp, intersect, Subspace
    q = f.q
    out = []
    cur = S
    while cur.dim > 1:
        v = None
        # a vector with Q(v) = 1 exists in every nondegenerate space of dim >= 2
        for w in cur.vectors():
            if any(w) and f.Q(w) == 1:
                v = w
                break
        if v is None:
            return None
        out.append(v)
        cur = intersect(cur, perp(Subspace.span([v], q, f.dim), f))
    out.append(orthogonal_basis(cur, f)[0])
    return out


def witt_transporter(V, Vp, f):
    """g in SO(V) mapping the nested flag V onto Vp elementwise, or None."""
    from .orthospace import perp, intersect, reflection
    from . import gf
    q, N = f.q, f.dim
    def adapted(flag):
        parts = []
        prev = None
        for X in flag:
            parts.append(X if prev is None else intersect(X, perp(prev, f)))
            prev = X
        parts.append(perp(prev, f))
        return parts
    A, B = adapted(V), adapted(Vp)
    cols_a, cols_b = [], []
    for Pa, Pb in zip(A, B):
        if Pa.dim != Pb.dim:
            return None
        if Pa.dim == 0:
            continue
        ba, bb = _standard_basis(Pa, f), _standard_basis(Pb, f)
        if ba is None or bb is None:
            return None
        # last vectors: scale so the Q-values agree
        qa, qb = f.Q(ba[-1]), f.Q(bb[-1])
        ratio = qa * pow(qb, q - 2, q) % q
        c = gf.FieldSpec(q).sqrt(ratio)
        if c is None:
            return None
        bb[-1] = tuple(x * c % q for x in bb[-1])
        cols_a += ba
        cols_b += bb
    Ma = [[v[i] for v in cols_a] for i in range(N)]
    Mb = [[v[i] for v in cols_b] for i in range(N)]
    g = gf.matmul(Mb, gf.mat_inverse(Ma, q), q)
    if gf.det(g, q) != 1:
        # fix the determinant by a reflection inside the smallest flag member
        v = cols_b[0]
        g = gf.matmul(reflection(v, f), g, q)
    return g


def build_cover_geometry(A, geo, G, W, cap=10 ** 6):
    """Coset geometry of U(A) over the images of the point stabilizers, and
    its covering map onto ``geo`` via the canonical epimorphism U(A) -> G."""
    from .homotopy import CoveringMap, covering_check
    gv = view(geo)
    mg = _materialize(geo)
    W = list(W)
    P = universal_completion_presentation(A)
    T = todd_coxeter(P, cap=cap)
    U, lam = regular_representation(T)
    n = T.index
    # image in G of every coset word, by following the table
    gimg = {}
    for n_, x_ in P.symbol:
        k = P.symbol[(n_, x_)]
        if k is not None and k not in gimg:
            gimg[k] = x_
            gimg[k ^ 1] = inv(x_)
    pic = [None] * n
    pic[0] = G.identity()
    todo = deque([0])
    while todo:
        c = todo.popleft()
        for x in range(2 * T.ngens):
            d = T.table[c][x]
            if pic[d] is None:
                pic[d] = mul(pic[c], gimg[x])
                todo.append(d)
    fam = SubgroupFamily()
    for w in W:
        key = (w,)
        if key not in A.groups:
            raise AmalgamError(f"element {w!r} has no parabolic in the amalgam")
        letters = [P.symbol[(key, x)] for x in A.groups[key].gens]
        gens = [lam[k] for k in letters if k is not None]
        fam.add(gv.typ(w), w, GroupSpec(gens, n) if gens else GroupSpec([], n))
    cover = coset_pregeometry(U, fam, cap=cap)
    index = {l: i for i, l in enumerate(mg.labels)}
    emap = []
    for (w, c) in cover.labels:
        r = cover.spaces[[m[1] for m in fam.members].index(w)].reps[c]
        g = pic[r[0]]
        emap.append(index[G.act(g, w)])
    phi = CoveringMap(cover, mg, emap)
    ok, witness = covering_check(phi)
    order_G = G.order()
    rep = {"order_U": n, "order_G": order_G,
           "index": n // order_G if n % order_G == 0 else None,
           "covering": ok, "witness": witness,
           "cover_elements": len(cover), "base_elements": len(mg),
           "isomorphism": ok and len(cover) == len(mg)}
    return cover, phi, rep


# ---------------------------------------------------------------------------
# shape reduction

def disconnected_diagram_check(R):
    """Does R split as R1 (+) R2 with R1 connected of rank >= 2 and R2 nonempty?"""
    if R.rank < 2 or len(R) == 0:
        return False, "rank below two"
    D, _ = basic_diagram(R)
    import networkx as nx
    comps = [sorted(c) for c in nx.connected_components(D)]
    if len(comps) < 2:
        return False, "diagram connected"
    for c in comps:
        rest = [t for t in R.types if t not in c]
        cset = set(c)
        # direct sum: elements of types in c incident with every element of the other types
        split = all(R.incident(x, y) for x in range(len(R)) if R.typ[x] in cset
                    for y in range(len(R)) if R.typ[y] not in cset)
        if not split:
            continue
        from .pregeo import truncate
        R1 = truncate(R, c)
        R2 = truncate(R, rest)
        if len(c) >= 2 and is_connected(R1) and len(R2) > 0:
            return True, f"direct sum over types {c} (connected, rank {len(c)}) and {rest}"
    return False, "no direct-sum split with a connected part of rank >= 2"


def residue_simply_connected(R, cap=10 ** 5):
    """(verified?, method, detail) for the residue R."""
    from .homotopy import CapExceeded as HCap, fundamental_group_order, homology_h1
    if R.rank == 0:
        return True, "empty", "rank 0 residue"
    if not is_connected(R) or len(R) == 0:
        return False, "disconnected", "residue is not connected"
    ok, why = disconnected_diagram_check(R)
    if ok:
        return True, "disconnected diagram lemma", why
    h1 = homology_h1(R)
    if not h1.trivial:
        return False, "homology", f"H1 = {h1}"
    try:
        order = fundamental_group_order(R, cap=cap)
    except (CapExceeded, HCap) as e:
        return False, "fundamental group", f"enumeration inconclusive: {e}"
    if order == 1:
        return True, "fundamental group", "edge-path group enumerates to the trivial group"
    return False, "fundamental group", f"pi_1 has order {order}"


def shape_reduction_chain(geo, G, W, shape, cap=10 ** 5, strict=False):
    """Remove the flags of 2^W outside the shape one at a time, smallest
    first, recording for each the residue verdict and |U(A)| afterwards."""
    gv = view(geo)
    mg = _materialize(geo)
    W = list(W)
    hyp = check_flag_transitive_orbits(gv, G, W)
    if not hyp["ok"]:
        raise HypothesisFailed("ii", "orbit pregeometries not flag-transitive")
    current = Shape.power_set(gv, W).flags
    remove = sorted(current - shape.flags, key=lambda U: (len(U), [_short(x) for x in U]))
    index = {l: i for i, l in enumerate(mg.labels)}
    steps = []
    for U in remove:
        R = residue(mg, [index[x] for x in U]) if U else mg
        ok, method, detail = residue_simply_connected(R, cap=cap)
        current = current - {U}
        A = amalgam_of_parabolics(gv, G, W, shape=Shape(current), check_hypotheses=False)
        try:
            order = todd_coxeter(universal_completion_presentation(A), cap=cap).index
        except CapExceeded:
            order = None
        step = {"removed": "{" + ", ".join(_short(x) for x in U) + "}",
                "residue_rank": R.rank, "verified": ok, "method": method, "detail": detail,
                "order_U": order}
        steps.append(step)
        if strict and not ok:
            raise ResidueNotVerified(step["removed"], detail)
    return {"hypotheses": hyp, "order_G": G.order(), "steps": steps,
            "all_verified": all(s["verified"] for s in steps),
            "orders_at_verified_steps": [s["order_U"] for s in steps if s["verified"]]}


def shape_reduction_verify(geo, G, W, shape, cap=10 ** 5):
    """G = U(A_W) when every removed flag has a simply connected residue."""
    rep = shape_reduction_chain(geo, G, W, shape, cap=cap, strict=True)
    final = rep["steps"][-1]["order_U"] if rep["steps"] else G.order()
    rep["conclusion"] = f"G = U(A_W), |G| = {G.order()}"
    rep["consistent"] = final in (None, G.order())
    return rep
