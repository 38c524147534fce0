"""A perfect dielectric facing a perfect magnet repels.

Between two ideal conductors the force per area is -pi^2 hbar c / (240 a^4).
Swapping one plate for an infinitely permeable one flips the sign and
leaves 7/8 of the magnitude. Real plates only approach these limits, and
this script shows how quickly.
"""
import numpy as np

from casimir import HalfSpacePair, PlateSpec, ResponseModel, ThermalState, force_per_area
from casimir.halfplanes import CONDUCTOR_REDUCED
from casimir.units import HBAR_C

ideal = ResponseModel.ideal()
conductor = force_per_area(HalfSpacePair(PlateSpec(ideal), PlateSpec(ideal), 1.0))
boyer = force_per_area(HalfSpacePair(PlateSpec(ideal), PlateSpec(1.0, ideal), 1.0))
print("ideal plates, f a^4 / hbar c")
print(f"  conductor  {conductor.reduced:+.10f}   ({conductor.sign})")
print(f"  boyer      {boyer.reduced:+.10f}   ({boyer.sign})")
print(f"  ratio      {boyer.reduced / abs(conductor.reduced):.10f}")

print("\nfinite plates: eps = big on one side, mu = big on the other")
print("       big     boyer/pi^2/240   same-material conductor/pi^2/240")
for big in 10.0 ** np.arange(2, 9, 2):
    b = force_per_area(HalfSpacePair(PlateSpec(big), PlateSpec(1.0, big), 1.0)).reduced
    c = force_per_area(HalfSpacePair(PlateSpec(big), PlateSpec(big), 1.0)).reduced
    print(f"  {big:8.0e}   {b / CONDUCTOR_REDUCED:+.6f}        {c / CONDUCTOR_REDUCED:+.6f}")

# A metal-like plate (plasma model, wavenumbers in 1/m) against a magnetic one
# whose permeability relaxes above ~1e13 rad/s (as a Lorentz response).
c_light = 299792458.0
metal = PlateSpec(ResponseModel.plasma(1.37e16 / c_light))
magnet = PlateSpec(1.0, ResponseModel.lorentz(1e13 / c_light, 3e14 / c_light, 1e11 / c_light))
print("\nplasma metal vs dispersive magnet, room temperature")
print("   gap [m]     force [Pa]      sign")
for gap in np.geomspace(1e-7, 1e-5, 5):
    r = force_per_area(HalfSpacePair(metal, magnet, gap), ThermalState.from_kelvin(300.0))
    print(f"  {gap:.2e}   {r.value:+.4e}   {r.sign}")
print(f"\n(conductor scale at 1 um: {-CONDUCTOR_REDUCED * HBAR_C / 1e-24:+.4e} Pa)")
