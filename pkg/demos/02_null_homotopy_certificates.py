# Replayable null-homotopy certificates
#
# A certificate is a list of elementary moves (insert or delete a
# repetition, a return or a triangle) turning a closed walk in the
# incidence graph into the trivial walk. Anyone can replay it with nothing
# but an incidence test.

import json

from intransitive.cli import Setting
from intransitive.homotopy import (CertContext, CycleSampler, HomotopyCertificate,
                                   element_decoder, verify_certificate)

# The W-geometry over F_11 of rank 4: points of both signs, elliptic lines,
# planes of plus type and 4-spaces, all nondegenerate.

s = Setting({"geometry": {"kind": "orth", "q": 11, "dim": 5, "gram": "plus", "hall": "recipe"}})
geo = s.geo
print(geo)

ctx = CertContext(geo)
sampler = CycleSampler(ctx, seed=1)

# A random triangle of points, pairwise collinear.

a, b, c = sampler.triangle()
cert = ctx.certify_points([a, b, c])
print("triangle certificate:", len(cert.cycle) - 1, "edges,", len(cert.moves), "moves")
print("replay:", verify_certificate(cert, geo))

# Pentagons go through the same search; the branch counters say which
# decompositions were used.

for _ in range(5):
    cert = ctx.certify_points(sampler.polygon(5))
    assert verify_certificate(cert, geo)
print("branches:", dict(ctx.stats))

# Certificates serialize to JSON; subspaces are written as their reduced
# row echelon bases.

text = cert.dumps()
back = HomotopyCertificate.from_json(text, element_decoder(geo))
print("JSON bytes:", len(text), "round trip replays:", bool(verify_certificate(back, geo)))
print("first move:", json.loads(text)["moves"][0])
