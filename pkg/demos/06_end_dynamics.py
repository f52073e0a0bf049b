"""A symmetry that preserves K permutes the ends of S - K periodically."""
from surfends import models
from surfends.builders import Cylinder
from surfends.core import Subcomplex
from surfends.dynamics import SimplicialAutomorphism, induced_end_map, verify_p51

cx = models.octahedron()
K = Subcomplex.from_edges(cx, [(0, 1), (1, 2), (2, 3), (0, 3)])
swap = SimplicialAutomorphism(cx, [0, 1, 2, 3, 5, 4])  # exchange the poles
print("pole swap:", verify_p51(swap, K)["orbit_lengths"])
quarter = SimplicialAutomorphism(cx, [1, 2, 3, 0, 4, 5])
print("quarter turn:", induced_end_map(quarter, K).perm)

# On the cylinder, the declared rotation fixes both ends; the point reflection swaps them.
c = Cylinder(4)
Km = Subcomplex.from_edges(c.window(7).complex, c.meridian_edges(0))
for name in ("rotation-1", "point-reflection"):
    f = SimplicialAutomorphism.from_stream(c, name, 6)
    print(name, verify_p51(f, Km, 6)["orbit_lengths"])
