"""Non-compact surfaces arrive as exhaustion streams; ends are branches of a tree."""
from surfends.builders import Cylinder, PlaneGrid, flute, jacobs_ladder
from surfends.exhaustion import end_is_planar, ends

# The plane has one end, the cylinder two.  The ladder has two non-planar ends.
for s in (PlaneGrid(), Cylinder(), jacobs_ladder()):
    r = ends(s, 8)
    kinds = [end_is_planar(e, s, 8, r.tree).kind for e in r.ends]
    print(f"{s.name:14s} leaves by depth {r.leaf_counts} stabilized={r.stabilized} kinds={kinds}")

# The flute keeps sprouting ends; at any horizon the count is only a lower bound.
r = ends(flute(), 8)
print(f"{'flute':14s} leaves by depth {r.leaf_counts} stabilized={r.stabilized}")
