"""
Two Zeeman-split three-level atoms in a single-mode cavity: invariant-sector
dynamics, photon post-selection and the entanglement protocols built on them.
"""

from .config import DriftModel, PhysicalParams, RunConfig
from .dynamics import evolve, propagator_closed_n0, propagator_closed_nm1, propagator_numeric
from .errors import ConfigError, ToleranceError, ZeemanCavityError
from .feedback import CouplingController, feedback_cycle
from .measurement import entropy, fidelity, measure_photons, negativity, reduced_density
from .models import (
    AtomLevel,
    BasisState,
    DensityMatrix,
    MeasurementOutcome,
    OperatorMatrix,
    Picture,
    ProtocolReport,
    QuantumState,
    Sector,
)
from .operators import hamiltonian_full, interaction_block, ladder_minus, ladder_plus, lz
from .protocols import epr_generate, local_exchange, state_at, transfer
from .serialization import deserialize_from_json, emit, serialize_to_json
from .state_space import conserved_number, full_basis, sector_basis

__all__ = [
    'AtomLevel',
    'BasisState',
    'ConfigError',
    'CouplingController',
    'DensityMatrix',
    'DriftModel',
    'MeasurementOutcome',
    'OperatorMatrix',
    'PhysicalParams',
    'Picture',
    'ProtocolReport',
    'QuantumState',
    'RunConfig',
    'Sector',
    'ToleranceError',
    'ZeemanCavityError',
    'conserved_number',
    'deserialize_from_json',
    'emit',
    'entropy',
    'epr_generate',
    'evolve',
    'feedback_cycle',
    'fidelity',
    'full_basis',
    'hamiltonian_full',
    'interaction_block',
    'ladder_minus',
    'ladder_plus',
    'local_exchange',
    'lz',
    'measure_photons',
    'negativity',
    'propagator_closed_n0',
    'propagator_closed_nm1',
    'propagator_numeric',
    'reduced_density',
    'sector_basis',
    'serialize_to_json',
    'state_at',
    'transfer',
]
