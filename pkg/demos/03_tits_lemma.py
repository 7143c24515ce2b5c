# Universal completions and coverings at toy scale
#
# For a flag-transitive group acting on a geometry, the universal
# completion of the amalgam of parabolics covers the group, and the cover
# is trivial exactly when the geometry is simply connected.

from intransitive import catalog
from intransitive.amalgam import amalgam_of_parabolics, build_cover_geometry, tits_verify
from intransitive.homotopy import homology_h1
from intransitive.pregeo import is_isomorphic

# The tetrahedron: vertices, edges and faces of a 3-simplex, with S_4.

g, G, chamber = catalog.tetrahedron()
A = amalgam_of_parabolics(g, G, chamber)
print("parabolics:", sorted(A.groups[n].order() for n in A.names))

rep = tits_verify(g, G, chamber)
print("tetrahedron: |U| =", rep["order_U"], "|G| =", rep["order_G"], "H1 =", rep["h1"], "->", rep["verdict"])

# The hemicube is the cube modulo the antipodal map. Its flag complex has
# H1 = Z/2, and the universal completion is twice as large as the group.

h, H, ch = catalog.hemicube()
print("hemicube H1:", homology_h1(h))
rep = tits_verify(h, H, ch)
print("hemicube: |U| =", rep["order_U"], "index", rep["index"], "->", rep["verdict"])

# The coset geometry of the completion is the universal cover: the cube.

B = amalgam_of_parabolics(h, H, ch)
cover, phi, rep = build_cover_geometry(B, h, H, ch)
print("cover:", rep["cover_elements"], "elements over", rep["base_elements"],
      "| covering map ok:", rep["covering"], "| cube:", is_isomorphic(cover, catalog.cube()[0]))
