"""Finite surfaces: validate a triangulation and read off its invariants."""
from surfends import models
from surfends.core import boundary_components, euler_characteristic, genus, validate_surface

# Seven vertices suffice for a torus; the Klein bottle needs a few more.
for name, cx in [("torus", models.torus7()), ("klein bottle", models.klein_bottle()),
                 ("pair of pants", models.pants()), ("moebius band", models.mobius5())]:
    g = genus(cx)
    kind = "genus" if g.orientable else "crosscaps"
    print(f"{name:14s} valid={validate_surface(cx).valid} chi={euler_characteristic(cx):3d} "
          f"boundary circles={len(boundary_components(cx))} {kind}={g.value}")

# Gluing two tetrahedra at a vertex gives a pinched point, which is reported.
t = models.tetrahedron().faces.tolist()
from surfends.core import SurfaceComplex
pinched = SurfaceComplex(7, t + [[0 if v == 0 else v + 3 for v in f] for f in t])
print("pinched:", validate_surface(pinched).violations)
