"""Delete a compact piece K and count the ends of what is left."""
from surfends import models
from surfends.core import Subcomplex, barycentric_subdivision
from surfends.residual import check_end_bound, residual_domains

# Two disjoint circles on a sphere cut it into two disks and an annulus.
cx = models.icosahedron()
def link(v):
    return [tuple(sorted(x for x in f if x != v)) for f in cx.faces.tolist() if v in f]
K = Subcomplex.from_edges(cx, link(0) + link(3))
for d in residual_domains(cx, K):
    b = check_end_bound(cx, K, d)
    print(f"domain {d.index}: {len(d.faces)} faces, {b.count} ends, bound m(g+1) = {b.bound}, tight={b.tight}")

# On a torus the bound leaves room: a small circle has one end on its outer side.
t = barycentric_subdivision(models.torus7()).complex
K = Subcomplex.from_edges(t, [tuple(sorted(x for x in f if x != 0)) for f in t.faces.tolist() if 0 in f])
big = max(residual_domains(t, K), key=lambda d: len(d.faces))
b = check_end_bound(t, K, big)
print(f"torus minus a disk: {b.count} end(s), bound {b.bound}")
