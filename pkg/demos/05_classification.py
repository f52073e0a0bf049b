"""Signatures, homeomorphism and model surfaces."""
from surfends import models
from surfends.builders import jacobs_ladder
from surfends.classify import ClassificationSignature, double, generate_model, homeomorphic, signature

print(signature(models.klein_bottle()).to_dict())
print("ladder:", signature(jacobs_ladder(), 8).to_dict())
print("torus7 ~ 4x5 grid torus:", homeomorphic(models.torus7(), models.grid_torus(4, 5)))

# Any consistent signature yields a model that classifies back to itself.
want = ClassificationSignature("nonorientable-odd", 3, 1, (0, 0, 0))
m = generate_model(want)
print("round trip:", signature(m) == want)

# Doubling a Moebius band along its boundary gives the Klein bottle.
d = double(models.mobius5())
print("double of Moebius band ~ Klein bottle:", homeomorphic(d.complex, models.klein_bottle()))
