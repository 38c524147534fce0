"""Casimir interactions from induced dipole fluctuations.

Three layers, each usable on its own:

* :mod:`casimir.oscillator` -- the three-oscillator toy model whose coupling
  type decides between attraction and repulsion;
* :mod:`casimir.particles` -- two particles with static electric and magnetic
  polarizabilities;
* :mod:`casimir.halfplanes` -- two magnetodielectric half-spaces (the
  Lifshitz force) together with the algebra that checks it.

:mod:`casimir.numerics` and :mod:`casimir.materials` supply the quadrature,
Matsubara sums and response models they share.
"""
__version__ = "0.1.0"

from .exceptions import (CasimirError, ConvergenceError, DegenerateCouplingError,
                         DomainError, NonFiniteIntegrandError)
from .halfplanes import (HalfSpacePair, ReflectionPair, boundary_solve_te, boundary_solve_tm,
                         classify, coefficient_relations, derivation_audit, force_per_area,
                         reflection, sq_identities)
from .materials import ParticleSpec, PlateSpec, ResponseModel, kappa, parse_model, zero_freq_class
from .numerics import (Estimate, QuadratureConfig, ThermalState, integrate_semi_infinite,
                       matsubara_sum, zero_temperature_integral)
from .oscillator import OscillatorTriplet, induced_free_energy_and_sign, q_factored
from .particles import PairGeometry, free_energy, pair_force
from .results import ForceResult

__all__ = [
    "CasimirError", "ConvergenceError", "DegenerateCouplingError", "DomainError",
    "NonFiniteIntegrandError",
    "HalfSpacePair", "ReflectionPair", "boundary_solve_te", "boundary_solve_tm", "classify",
    "coefficient_relations", "derivation_audit", "force_per_area", "reflection",
    "sq_identities",
    "ParticleSpec", "PlateSpec", "ResponseModel", "kappa", "parse_model", "zero_freq_class",
    "Estimate", "QuadratureConfig", "ThermalState", "integrate_semi_infinite", "matsubara_sum",
    "zero_temperature_integral",
    "OscillatorTriplet", "induced_free_energy_and_sign", "q_factored",
    "PairGeometry", "free_energy", "pair_force",
    "ForceResult",
]
