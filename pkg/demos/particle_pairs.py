"""Two small polarizable particles.

Electric-electric and magnetic-magnetic pairs attract with the retarded
r^-7 law (coefficient 23/(4 pi)); an electric particle facing a magnetic one
repels with coefficient 7/(4 pi). Heating the pair moves it to the classical
r^-6 regime, where only the static electric response survives.
"""
import math

from casimir import PairGeometry, ParticleSpec, ThermalState, free_energy

ee = free_energy(ParticleSpec(1.0), ParticleSpec(1.0), PairGeometry(1.0))
eh = free_energy(ParticleSpec(1.0), ParticleSpec(0.0, 1.0), PairGeometry(1.0))
print("zero temperature, r = 1, hbar c = 1")
print(f"  E-E  {ee.total:+.12f}   -23/(4 pi) = {-23 / (4 * math.pi):+.12f}")
print(f"  E-H  {eh.total:+.12f}    7/(4 pi) = {7 / (4 * math.pi):+.12f}")

print("\nE-E energy relative to the zero-temperature value")
print("  beta/r     ratio")
for beta in (1e3, 1e2, 10.0, 1.0, 0.1):
    g = PairGeometry(1.0, ThermalState.finite(beta))
    ratio = free_energy(ParticleSpec(1.0), ParticleSpec(1.0), g).total / ee.total
    print(f"  {beta:<8g}  {ratio:.6f}")
print("  (classical limit: -3/(beta r^6) grows without bound as beta -> 0)")
