"""Numeric tolerances, centralized so every module checks the same numbers."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # state-vector side
    norm: float = 1e-10              # norm preservation through a circuit
    gate_unitarity: float = 1e-9     # rejection threshold for 2x2 gates
    qft_roundtrip: float = 1e-12
    network_equivalence: float = 1e-12
    # oracle side
    det_one: float = 1e-10           # |det M - 1| for transfer matrices
    smatrix: float = 1e-10           # S-matrix unitarity and symmetry
    phase_shift_closure: float = 1e-6  # | |T +/- R| - 1 | before extraction
    # estimators
    amplitude_floor: float = 1e-12   # reference amplitude below this has no phase
    unitarity_probability: float = 1e-9  # P_refl + P_trans vs 1 on exact runs
    # simulation-vs-oracle comparisons
    oracle_modulus: float = 0.02
    oracle_phase: float = 0.05


TOL = Tolerances()
