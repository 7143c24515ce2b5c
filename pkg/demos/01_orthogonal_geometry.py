# Nondegenerate subspaces of an orthogonal space
#
# The elements of the geometry are the nondegenerate proper subspaces of
# F_q^{n+1} under a symmetric bilinear form, typed by dimension. Lines come
# in two kinds: hyperbolic lines contain isotropic vectors, elliptic ones
# do not.

from intransitive.orthospace import (BilinearForm, LineClass, build_orth_geometry, line_class,
                                     verify_diameter, verify_pointline, witt_index)

# A form of plus type on F_5^3, and the geometry of rank 2 it defines.

f = BilinearForm.standard(3, 5, "+")
geo = build_orth_geometry(2, f)
print(f)
print("elements by (dim, sign):", geo.count_by_label())

# Classify every line. Each nondegenerate plane of F_q^{n+1} is one of the two
# isometry classes; for lines the class is visible in the Witt index.

kinds = {LineClass.HYPERBOLIC: 0, LineClass.ELLIPTIC: 0}
for L in geo.elements(2):
    kinds[line_class(L, f)] += 1
print("lines:", {k.name: v for k, v in kinds.items()})

L = next(iter(geo.elements(2)))
print("one line:", L, line_class(L, f).name, "Witt index", witt_index(L, f))

# Point-line structure: a point off a line is collinear with all but at
# most two points of that line. The verifier checks every pair.

rep = verify_pointline(2, f, exhaustive=True)
print("point-line:", {k: rep[k] for k in ("max_noncollinear", "min_collinear", "passed")})

# Any two points are joined by a path of length at most 2 in the
# collinearity graph.

print("collinearity diameter:", verify_diameter(geo))
