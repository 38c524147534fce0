"""Two oscillators talking through a third.

Oscillators 1 and 2 never touch; each couples to oscillator 3 either through
its coordinate or through its momentum. Like couplings attract, mixed
couplings repel. Momentum coupling drops out of the zero-frequency term, so
the TE-like case loses its interaction in the classical (hot) limit.
"""
import math

from casimir import OscillatorTriplet, ThermalState, induced_free_energy_and_sign

print("  beta      TM (coord/coord)   TE (mom/mom)      mixed")
for beta in (math.inf, 10.0, 1.0, 0.1, 0.01):
    th = ThermalState.zero() if math.isinf(beta) else ThermalState.finite(beta)
    row = [induced_free_energy_and_sign(OscillatorTriplet(1.0, 1.5, 1.0, 0.3, m), th)
           for m in ("TM", "TE", "mixed")]
    print(f"  {beta:<7g}" + "".join(f"  {e.delta_f:+.6e}" for e in row))

print("\nbeta * delta F in the hot limit (the classical free energy)")
for m in ("TM", "TE", "mixed"):
    e = induced_free_energy_and_sign(OscillatorTriplet(1.0, 1.5, 1.0, 0.3, m),
                                     ThermalState.finite(1e-3))
    print(f"  {m:<6} {1e-3 * e.delta_f:+.3e}   {e.sign}")
