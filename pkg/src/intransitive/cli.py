"""Batch command line front end.

Every command reads a JSON config, writes a JSON report (stdout or
``--out``) and exits with 0 pass, 1 verified failure, 2 config error,
3 search exhausted, 4 inconclusive cap.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import catalog
from .amalgam import (Amalgam, AmalgamError, CapExceeded, Inconclusive, Presentation, Shape,
                      TooLarge, amalgam_of_parabolics, build_cover_geometry, flags_in,
                      parse_word, shape_reduction_chain, tits_verify, tits_verify_orth,
                      todd_coxeter, universal_completion_presentation)
from .cosetgeo import GroupError, GroupSpec, HypothesisFailed
from .gf import FieldError
from .homotopy import (CaseIIEncountered, CertContext, CycleSampler, HomotopyCertificate,
                       HomotopyError, SearchExhausted, certify_cycle, element_decoder,
                       encode_element, verify_certificate)
from .homotopy import CapExceeded as HomotopyCap
from .homotopy import TooLarge as HomotopyTooLarge
from .orthospace import (HallSpec, OrthError, OrthGeometry, build_orth_geometry,
                         build_W_geometry, form_from_config, gaussian_binomial, so_generators,
                         verify_diameter, verify_elliptic_line_counts, verify_geometry_axioms,
                         verify_pointline, verify_type_rules)
from .pregeo import PregeoError, Pregeometry

SCHEMA_VERSION = 1
EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_EXHAUSTED, EXIT_CAP = 0, 1, 2, 3, 4


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# configs

def load_config(path):
    if path is None:
        raise ConfigError("--config is required")
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e


FIXTURES = {
    "tetrahedron": lambda c: catalog.tetrahedron(),
    "simplex": lambda c: catalog.simplex(int(c.get("n", 3))),
    "hemicube": lambda c: catalog.hemicube(),
    "cube": lambda c: catalog.cube() + (None,),
    "pg32": lambda c: (catalog.pg32(), None, None),
    "fano": lambda c: (catalog.fano(), None, None),
    "polygon": lambda c: (catalog.polygon(int(c.get("k", 6))), None, None),
}


class Setting:
    """Geometry, optional group and optional base set W from a config."""

    def __init__(self, cfg):
        gcfg = cfg.get("geometry", cfg)
        if not isinstance(gcfg, dict):
            raise ConfigError("geometry must be an object")
        self.gcfg = gcfg
        # a serialized pregeometry, e.g. the report written by build
        kind = gcfg.get("kind", "pregeometry" if "elements" in gcfg else "orth")
        self.kind = kind
        self.group = None
        self.W = None
        if kind == "orth":
            self.f = form_from_config(gcfg)
            n = self.f.dim - 1
            hall = gcfg.get("hall")
            if hall == "recipe":
                hall = HallSpec.recipe(n, gcfg.get("plane_sign", "+"))
            elif hall == "dim_four":
                hall = HallSpec.dim_four()
            self.geo = build_W_geometry(n, self.f, hall) if hall else build_orth_geometry(n, self.f)
            self.n = n
        elif kind == "fixture":
            name = gcfg.get("name")
            if name not in FIXTURES:
                raise ConfigError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}")
            self.geo, self.group, self.W = FIXTURES[name](gcfg)
        elif kind == "pregeometry":
            data = gcfg.get("data", gcfg if "elements" in gcfg else None)
            if data is None and "file" in gcfg:
                data = load_config(gcfg["file"])
                data = data.get("geometry", data)
            if not isinstance(data, dict):
                raise ConfigError("pregeometry needs 'data' or 'file'")
            self.geo = Pregeometry.from_json(data)
        else:
            raise ConfigError(f"unknown geometry kind {kind!r}")
        gr = cfg.get("group")
        if gr == "SO":
            if kind != "orth":
                raise ConfigError("group SO needs an orthogonal geometry")
            self.group = GroupSpec.matrix(so_generators(self.f), self.f.q, self.f.dim, name="SO")
        elif isinstance(gr, dict):
            self.group = GroupSpec.from_config(gr)
        if kind == "orth" and self.geo.hall is not None:
            self.W = self.geo.realize_hall()
        if "W" in cfg:
            self.W = [self._label(x) for x in cfg["W"]]

    def _label(self, x):
        if self.kind == "orth":
            return element_decoder(self.geo)(x)
        if isinstance(self.geo, Pregeometry):
            idx = int(x)
            return self.geo.labels[idx]
        return x

    @property
    def is_orth(self):
        return isinstance(self.geo, OrthGeometry)

    def need_group(self):
        if self.group is None or self.W is None:
            raise ConfigError("this action needs a group and a base set W")
        return self.group, self.W


def _summary(setting, count_limit=200000):
    geo = setting.geo
    if isinstance(geo, OrthGeometry):
        labels = {str(d): sorted(s.value for s in ss) for d, ss in sorted(geo.labels.items())}
        out = {"kind": "orth", "q": geo.q, "dim": geo.f.dim, "rank": len(geo.types),
               "labels": labels}
        bound = sum(gaussian_binomial(geo.f.dim, d, geo.q) for d in geo.types)
        if bound <= count_limit:
            counts = geo.count_by_label()
            out["counts"] = {f"{d}{s}": c for (d, s), c in sorted(counts.items())}
            out["elements"] = sum(counts.values())
        else:
            out["subspaces_of_allowed_dims"] = bound
        return out
    return dict(geo.summary(), kind=setting.kind)


# ---------------------------------------------------------------------------
# commands

def cmd_build(args, cfg):
    s = Setting(cfg)
    report = {"summary": _summary(s)}
    geo = s.geo
    if isinstance(geo, OrthGeometry):
        size = report["summary"].get("elements", report["summary"].get("subspaces_of_allowed_dims"))
        if size > args.cap:
            raise CapExceeded(f"{size} elements exceed --cap {args.cap}")
        geo = geo.materialize(args.cap)
    report["geometry"] = geo.to_json()
    return report, EXIT_PASS


def cmd_verify(args, cfg):
    lemma = args.lemma
    seed = args.seed
    if lemma == "typerules":
        qs = cfg.get("qs", [cfg["q"]] if "q" in cfg else None)
        if not qs:
            raise ConfigError("typerules needs q or qs")
        pairs = int(cfg.get("pairs", 1000))
        results = [verify_type_rules(int(q), pairs=pairs, seed=seed) for q in qs]
        return {"lemma": lemma, "results": results}, _status(all(r["passed"] for r in results))
    s = Setting(cfg)
    if lemma == "pointline":
        if not s.is_orth:
            raise ConfigError("pointline needs an orthogonal geometry")
        r = verify_pointline(s.n, s.f, exhaustive=args.exhaustive,
                             samples=int(cfg.get("samples", 1000)), seed=seed)
    elif lemma == "diameter":
        d = verify_diameter(s.geo)
        r = {"lemma": lemma, "diameter": d, "expected": 2, "passed": d == 2}
    elif lemma == "linecounts":
        if not s.is_orth:
            raise ConfigError("linecounts needs an orthogonal geometry")
        r = verify_elliptic_line_counts(s.n, s.f, samples=int(cfg.get("samples", 500)), seed=seed)
    elif lemma == "geometryaxioms":
        r = verify_geometry_axioms(s.geo, cap=args.cap)
    else:
        raise ConfigError(f"unknown lemma {lemma!r}")
    return r, _status(r["passed"])


def _status(ok):
    return EXIT_PASS if ok else EXIT_FAIL


def _digest(text):
    return hashlib.sha256(text.encode()).hexdigest()


def _cert_file(gcfg, cert):
    return json.dumps({"schema_version": SCHEMA_VERSION, "geometry": gcfg,
                       "certificate": cert.to_json()}, sort_keys=True, separators=(",", ":"))


def _sample_cycles(ctx, cfg, args):
    """(key, point list) pairs from the configured cycle source."""
    sampler = CycleSampler(ctx, seed=args.seed)
    if args.cycles:
        data = load_config(args.cycles)
        dec = element_decoder(ctx.geo)
        for i, c in enumerate(data["cycles"]):
            yield f"file{i:05d}", ("cycle", [dec(x) for x in c])
        return
    if args.exhaustive:
        pts = ctx.all_points()
        a = pts[0]
        nb = [b for b in pts if b != a and ctx.collinear(a, b)]
        count = 0
        for i, b in enumerate(nb):
            for c in nb[i + 1:]:
                if ctx.collinear(b, c) and ctx.line(a, b) != ctx.line(a, c):
                    if count >= args.cap:
                        return
                    yield f"tri{count:05d}", ("points", [a, b, c])
                    count += 1
        return
    # an explicit --kind overrides the config suite
    suite = {args.kind: args.count} if args.kind else cfg.get("suite") or {"triangle": args.count}
    for kind in sorted(suite):
        n = int(suite[kind])
        for i in range(n):
            if kind == "triangle":
                P = sampler.triangle()
            elif kind == "quadrangle":
                P = sampler.polygon(4)
            elif kind == "pentagon":
                P = sampler.polygon(5)
            elif kind.startswith("cycle"):
                k = int(kind[5:] or args.length)
                P = sampler.polygon(k)
            else:
                raise ConfigError(f"unknown cycle kind {kind!r}")
            yield f"{kind}{i:05d}", ("points", P)


def cmd_certify(args, cfg):
    if args.replay:
        return _replay_paths([args.replay], cfg)
    s = Setting(cfg)
    if not s.is_orth:
        raise ConfigError("certify needs an orthogonal geometry")
    ctx = CertContext(s.geo)
    outdir = Path(args.cert_dir) if args.cert_dir else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    entries = []
    status = EXIT_PASS
    try:
        for key, (how, data) in _sample_cycles(ctx, cfg, args):
            cert = ctx.certify_points(data) if how == "points" else certify_cycle(data, ctx)
            v = verify_certificate(cert, s.geo)
            text = _cert_file(s.gcfg, cert)
            if outdir:
                (outdir / f"{key}.json").write_text(text)
            entries.append({"key": key, "length": len(cert.cycle) - 1, "moves": len(cert.moves),
                            "verified": bool(v), "sha256": _digest(text)})
            if not v:
                status = EXIT_FAIL
    except (SearchExhausted, CaseIIEncountered) as e:
        entries.append({"key": "error", "error": type(e).__name__, "detail": str(e)})
        status = EXIT_EXHAUSTED
    report = {"geometry": _summary(s), "seed": args.seed, "certificates": len(entries),
              "verified": sum(1 for e in entries if e.get("verified")),
              "search_exhausted": int(status == EXIT_EXHAUSTED), "entries": entries,
              "stats": {k: ctx.stats[k] for k in sorted(ctx.stats)}}
    report["passed"] = status == EXIT_PASS
    return report, status


def _cert_paths(paths):
    for p in paths:
        p = Path(p)
        if p.is_dir():
            yield from sorted(p.glob("*.json"))
        else:
            yield p


def _replay_paths(paths, cfg=None):
    geos = {}
    entries = []
    for p in _cert_paths(paths):
        data = load_config(p)
        gcfg = data.get("geometry") if cfg is None else cfg.get("geometry", cfg)
        if gcfg is None:
            raise ConfigError(f"{p}: no geometry in the certificate and no --config")
        key = json.dumps(gcfg, sort_keys=True)
        if key not in geos:
            geos[key] = Setting({"geometry": gcfg}).geo
        geo = geos[key]
        try:
            cert = HomotopyCertificate.from_json(data.get("certificate", data), element_decoder(geo))
            v = verify_certificate(cert, geo)
            entries.append({"file": p.name, "ok": v.ok, "failed_at": v.failed_at, "reason": v.reason})
        except (HomotopyError, KeyError, TypeError, ValueError) as e:
            entries.append({"file": p.name, "ok": False, "failed_at": None,
                            "reason": f"{type(e).__name__}: {e}"})
    ok = bool(entries) and all(e["ok"] for e in entries)
    return {"replayed": len(entries), "passed_count": sum(e["ok"] for e in entries),
            "entries": entries, "passed": ok}, _status(ok)


def cmd_replay(args, cfg):
    return _replay_paths(args.paths, cfg or None)


def _shape(cfg, s):
    sh = cfg.get("shape")
    G, W = s.need_group()
    if sh is None:
        return None
    if "rank_at_most" in sh:
        return Shape.rank_at_most(s.geo, W, int(sh["rank_at_most"]))
    if "flags" in sh:
        allf = {frozenset(U): U for U in flags_in(s.geo, W, include_empty=True)}
        out = set()
        for idx in sh["flags"]:
            key = frozenset(W[i] for i in idx)
            if key not in allf:
                raise ConfigError(f"{idx} is not a flag of W")
            out.add(allf[key])
        shape = Shape(frozenset(out))
        if not shape.is_superset_closed(s.geo, W):
            raise ConfigError("shape is not closed under superflags")
        return shape
    raise ConfigError("shape needs rank_at_most or flags")


def _presentation_from(cfg):
    p = cfg["presentation"]
    names = list(p["generators"])
    rels = [parse_word(r, names) for r in p.get("relators", [])]
    H = [parse_word(w, names) for w in p.get("subgroup", [])]
    return Presentation(len(names), rels, names), H


def _amalgam_from(cfg, s=None):
    if "amalgam" in cfg:
        return Amalgam.from_config(cfg["amalgam"])
    G, W = s.need_group()
    return amalgam_of_parabolics(s.geo, G, W, shape=_shape(cfg, s))


def _orth_evidence(s, cfg, seed):
    ctx = CertContext(s.geo)
    sampler = CycleSampler(ctx, seed=seed)
    suite = cfg.get("evidence", {"triangle": 20, "quadrangle": 10, "pentagon": 10, "cycle8": 5})
    verified = failed = exhausted = 0
    for kind in sorted(suite):
        for _ in range(int(suite[kind])):
            try:
                if kind == "triangle":
                    P = sampler.triangle()
                else:
                    P = sampler.polygon({"quadrangle": 4, "pentagon": 5}.get(kind) or int(kind[5:]))
                cert = ctx.certify_points(P)
            except (SearchExhausted, CaseIIEncountered):
                exhausted += 1
                continue
            if verify_certificate(cert, s.geo):
                verified += 1
            else:
                failed += 1
    return {"suite": {k: int(v) for k, v in sorted(suite.items())}, "seed": seed,
            "certificates_verified": verified, "certificates_failed": failed,
            "search_exhausted": exhausted, "h1": None,
            "h1_note": "not computed at certificate scale; the complex is too large"}


def cmd_amalgam(args, cfg):
    action = args.action
    if action == "enumerate" and "presentation" in cfg:
        P, H = _presentation_from(cfg)
        T = todd_coxeter(P, subgroup=H, cap=args.cap)
        return {"action": action, "generators": P.names, "index": T.index,
                "subgroup_words": len(H), "cosets_defined": T.defined,
                "collapses": T.index == 1 and not H}, EXIT_PASS
    s = None if "amalgam" in cfg else Setting(cfg)
    if action == "present":
        A = _amalgam_from(cfg, s)
        P = universal_completion_presentation(A)
        rep = {"action": action, "amalgam": A.summary(), "stats": P.stats}
        if len(P.relators) <= 5000:
            rep["relators"] = P.relators
        return rep, EXIT_PASS
    if action == "enumerate":
        A = _amalgam_from(cfg, s)
        P = universal_completion_presentation(A)
        T = todd_coxeter(P, cap=args.cap)
        rep = {"action": action, "amalgam": A.summary(), "stats": P.stats, "order_U": T.index,
               "collapses": T.index == 1}
        if s is not None and s.group is not None:
            rep["order_G"] = s.group.order()
        return rep, EXIT_PASS
    if action == "tits":
        if s.is_orth and cfg.get("route", "certificate") == "certificate":
            ev = _orth_evidence(s, cfg, args.seed)
            rep = tits_verify_orth(s.geo, ev, hypothesis_samples=int(cfg.get("hypothesis_samples", 10)),
                                   seed=args.seed)
            rep = {"action": action, "geometry": _summary(s), **rep}
            return rep, _status(rep["isomorphism"])
        G, W = s.need_group()
        rep = tits_verify(s.geo, G, W, cap=args.cap)
        rep = {"action": action, **rep}
        expect = cfg.get("expect", "isomorphism")
        return rep, _status(rep["verdict"] == expect)
    if action == "shape-reduce":
        G, W = s.need_group()
        shape = _shape(cfg, s)
        if shape is None:
            raise ConfigError("shape-reduce needs a shape")
        rep = shape_reduction_chain(s.geo, G, W, shape, cap=args.cap)
        ok = all(o == G.order() for o in rep["orders_at_verified_steps"])
        rep = {"action": action, **rep, "passed": ok}
        return rep, _status(ok)
    if action == "cover":
        G, W = s.need_group()
        A = amalgam_of_parabolics(s.geo, G, W)
        cover, phi, rep = build_cover_geometry(A, s.geo, G, W, cap=args.cap)
        rep = {"action": action, **rep, "cover": cover.summary()}
        return rep, _status(rep["covering"])
    raise ConfigError(f"unknown action {action!r}")


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="intransitive", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=int, default=10 ** 6)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--exhaustive", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="build and serialize a geometry")
    v = sub.add_parser("verify", parents=[common], help="run a lemma verifier")
    v.add_argument("lemma", choices=["pointline", "diameter", "linecounts", "typerules",
                                     "geometryaxioms"])
    c = sub.add_parser("certify", parents=[common], help="null-homotopy certificates")
    c.add_argument("--kind", default=None,
                   help="triangle, quadrangle, pentagon or cycleK (K points)")
    c.add_argument("--count", type=int, default=10)
    c.add_argument("--length", type=int, default=8)
    c.add_argument("--cycles", help="JSON file with {'cycles': [[element, ...], ...]}")
    c.add_argument("--cert-dir", help="write one certificate file per cycle here")
    c.add_argument("--replay", help="re-verify the certificates in this directory")
    a = sub.add_parser("amalgam", parents=[common], help="amalgam actions")
    a.add_argument("action", choices=["present", "enumerate", "tits", "shape-reduce", "cover"])
    r = sub.add_parser("replay", parents=[common], help="re-verify certificate files")
    r.add_argument("paths", nargs="+")
    return p


COMMANDS = {"build": cmd_build, "verify": cmd_verify, "certify": cmd_certify,
            "amalgam": cmd_amalgam, "replay": cmd_replay}


def _emit(report, args):
    text = json.dumps(report, sort_keys=True, indent=1, default=_default) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _default(x):
    if isinstance(x, (set, frozenset)):
        return sorted(encode_element(x), key=repr)
    if hasattr(x, "key"):
        return x.key()
    if isinstance(x, tuple):
        return list(x)
    return str(x)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    header = {"schema_version": SCHEMA_VERSION, "command": args.command, "seed": args.seed,
              "cap": args.cap, "rng": "random.Random(seed)"}
    try:
        cfg = {} if args.config is None and args.command == "replay" else load_config(args.config)
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        report, code = COMMANDS[args.command](args, cfg)
    except ConfigError as e:
        report, code = {"error": "config", "detail": str(e)}, EXIT_CONFIG
    except (OrthError, FieldError, GroupError, PregeoError, AmalgamError, KeyError,
            TypeError, ValueError) as e:
        if isinstance(e, (CapExceeded, Inconclusive, TooLarge, HomotopyCap, HomotopyTooLarge)):
            report, code = {"error": type(e).__name__, "detail": str(e)}, EXIT_CAP
        elif isinstance(e, HypothesisFailed):
            report, code = {"error": "HypothesisFailed", "which": e.which, "detail": str(e)}, EXIT_FAIL
        elif isinstance(e, SearchExhausted):
            report, code = {"error": "SearchExhausted", "detail": str(e)}, EXIT_EXHAUSTED
        else:
            report, code = {"error": type(e).__name__, "detail": str(e)}, EXIT_CONFIG
    report = {**header, **report, "exit_code": code}
    _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
