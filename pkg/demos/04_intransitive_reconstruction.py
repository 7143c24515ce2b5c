# Reconstructing an intransitive geometry from stabilizers
#
# SO_4(F_5) does not act transitively on the points of the W-geometry:
# points of the two signs form two orbits. Choosing one representative
# per orbit (the hall W) and taking their stabilizers still recovers the
# geometry as a coset geometry.

import time

from intransitive.amalgam import amalgam_of_parabolics
from intransitive.cli import Setting
from intransitive.cosetgeo import sketch, stroppel_reconstruct, transitivity_check

s = Setting({"geometry": {"kind": "orth", "q": 5, "dim": 4, "gram": "minus", "hall": "dim_four"},
             "group": "SO"})
G, W = s.group, s.W
print("|SO_4(F_5)| =", G.order())
print("hall W:", [(w.dim, s.geo.sign_of(w).value) for w in W])

ok, rep = transitivity_check(s.geo, G, "vertex")
print("vertex-transitive:", ok, rep["orbits"])

sk = sketch(s.geo, G, W)
print("stabilizer orders:", [H.order() for H in sk.stabilizers])

t = time.time()
verdict, phi = stroppel_reconstruct(s.geo, G, W)
print("reconstruction:", {k: verdict[k] for k in ("elements", "incidences", "isomorphism")},
      f"({time.time() - t:.0f}s)")

# The amalgam of parabolics of the hall: one group per flag inside W.

A = amalgam_of_parabolics(s.geo, G, W, check_hypotheses=False)
print("parabolics:", len(A.names), "groups, disjoint union of", A.size, "elements")
