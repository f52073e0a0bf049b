"""The canonical exhaustion of a residual domain in the plane."""
from surfends.builders import PlaneGrid
from surfends.core import Subcomplex
from surfends.residual import canonical_exhaustion, relatively_compact_ends, union_of_impressions, region_frontier

s = PlaneGrid()
K = Subcomplex.from_faces(s.window(2).complex, s.block(-1, -1, 2, 2))
c = canonical_exhaustion(s, K, 0, 8)
print("split U = U- + U+ at depth", c.n0, "with", len(c.xi), "interface cycle(s)")
print("claims:", c.claims())
ends = relatively_compact_ends(c)
print(len(ends), "relatively compact end(s); impressions cover the frontier:",
      union_of_impressions(ends) == region_frontier(s, c.domain, 8))
print("collar check:", c.p12(0))
