"""Foams as group presentations: parsing, builtins, cellular homology, Tietze moves.

A foam is a cell 2-complex with one vertex (after reduction): edges are the
generators of its fundamental group and each face contributes one relator
word.  Cellular Betti numbers are computed exactly over the rationals.
"""

from foamtor import (builtin, cellular_homology, parse_foam, reduce_foam,
                     serialize_foam, tietze1_collapse, tietze1_expand)

# -- the flat torus, straight from its presentation <a, b | [a, b]>
torus = parse_foam("""
# one vertex, two loops, one square face
edges: a b
face: a b a^-1 b^-1
""", name="torus")
print("torus:", serialize_foam(torus).strip().replace("\n", " | "))
rep = cellular_homology(torus)
print("  Betti (b0, b1, b2) =", rep.betti, " Euler =", rep.euler)

# -- the catalog of builtin foams
for name in ("sphere", "genus:2", "appendix", "dunce_hat", "projective_plane"):
    foam = builtin(name)
    rep = cellular_homology(foam)
    print("%-17s V=%d E=%d F=%d  betti=%s  chi=%d"
          % (foam.name, foam.V, foam.E, foam.F, rep.betti, rep.euler))

# the dunce hat <a | a a a^-1> is contractible but not collapsible; its
# trivial relation must not be simplified away, and its net exponent matrix
# still sees a single +1
print("dunce hat boundary2:", cellular_homology(builtin("dunce_hat")).boundary2)

# -- multi-vertex foams are reduced by contracting a spanning tree
theta = parse_foam("""
edges: e1 e2 e3
vertices: 2
edge e1: 0 1
edge e2: 0 1
edge e3: 0 1
face: e1 e2^-1
face: e2 e3^-1
""", name="theta")
red = reduce_foam(theta)
print("theta graph reduced: V %d -> %d, E %d -> %d, betti %s -> %s"
      % (theta.V, red.V, theta.E, red.E,
         cellular_homology(theta).betti, cellular_homology(red).betti))

# -- Tietze move of type 1: add a generator with its defining relation.
# The foam encoding round-trips exactly; the partition function is invariant
# (see demo 04 for the numerical check).
bigger = tietze1_expand(torus, "a b", "c")
print("after 2-expansion: E=%d F=%d, new face '%s'"
      % (bigger.E, bigger.F, bigger.faces[-1]))
assert tietze1_collapse(bigger, "c") == torus
print("2-collapse restores the torus exactly")
