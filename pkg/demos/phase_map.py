"""Sign of the plate force over a grid of constant materials.

Plate 1 is a dielectric with permittivity eps1, plate 2 a magnetic material
with permeability mu2 and permittivity 2. Small contrasts attract;
once the magnetic plate dominates the dielectric one the force turns
repulsive. '-' attracts, '+' repels, '0' is below the zero threshold.
"""
import numpy as np

from casimir import HalfSpacePair, PlateSpec, classify

eps1 = np.geomspace(1.5, 1e3, 12)
mu2 = np.geomspace(1.5, 1e3, 12)
pairs = np.array([[HalfSpacePair(PlateSpec(e, 1.0), PlateSpec(2.0, m), 1.0) for e in eps1]
                  for m in mu2], dtype=object)
signs = classify(pairs, threads=4).signs
glyph = {-1: "-", 0: "0", 1: "+"}
print("mu2 \\ eps1 " + " ".join(f"{e:5.0f}" for e in eps1))
for m, row in zip(mu2, signs):
    print(f"{m:10.1f} " + " ".join(f"{glyph[int(s)]:>5}" for s in row))
