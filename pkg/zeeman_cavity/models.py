"""
Core data models for the Zeeman cavity simulator.

Atomic-only states (after the photon number has been measured or traced
out) reuse BasisState with photons=0.
"""

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import PhysicalParams
from .errors import (
    BasisMismatchError,
    InvalidAtomLevelError,
    NonHermitianError,
    NormalizationError,
)

NORM_TOLERANCE = 1e-12
HERMITIAN_TOLERANCE = 1e-13
UNITARY_TOLERANCE = 1e-11


class AtomLevel(IntEnum):
    """Magnetic quantum number of one three-level atom."""
    DOWN = -1
    MID = 0
    UP = 1

    @classmethod
    def coerce(cls, value) -> 'AtomLevel':
        try:
            return cls(int(value))
        except ValueError:
            raise InvalidAtomLevelError(f"Invalid magnetic quantum number {value!r}; must be -1, 0 or +1")


class Picture(Enum):
    """Frame a propagator is expressed in."""
    SCHRODINGER = "schrodinger"
    INTERACTION = "interaction"


@dataclass(frozen=True, order=True)
class BasisState:
    """Product state |photons> (x) |m1> (x) |m2>."""
    photons: int
    m1: AtomLevel
    m2: AtomLevel

    def __post_init__(self):
        if int(self.photons) != self.photons or self.photons < 0:
            raise ValueError(f"Photon number must be a non-negative integer, got {self.photons!r}")
        object.__setattr__(self, 'photons', int(self.photons))
        object.__setattr__(self, 'm1', AtomLevel.coerce(self.m1))
        object.__setattr__(self, 'm2', AtomLevel.coerce(self.m2))

    @property
    def atoms(self) -> Tuple[int, int]:
        return (int(self.m1), int(self.m2))

    @property
    def label(self) -> str:
        return f"|{self.photons}>({int(self.m1)},{int(self.m2)})"

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class Sector:
    """Ordered basis of the invariant subspace with conserved number N."""
    conserved_n: int
    basis: Tuple[BasisState, ...]

    def __post_init__(self):
        object.__setattr__(self, 'basis', tuple(self.basis))
        for state in self.basis:
            total = state.photons + state.m1 + state.m2
            if total != self.conserved_n:
                raise ValueError(
                    f"State {state.label} has conserved number {total}, not {self.conserved_n}"
                )

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def index(self, state: BasisState) -> int:
        return self.basis.index(state)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense complex square matrix whose row/column i is basis[i]."""
    basis: Tuple[BasisState, ...]
    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'basis', tuple(self.basis))
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"Operator matrix must be square, got shape {entries.shape}")
        if entries.shape[0] != len(self.basis):
            raise BasisMismatchError(
                f"Operator dimension {entries.shape[0]} does not match basis length {len(self.basis)}"
            )
        if self.hermitian:
            deviation = np.max(np.abs(entries - entries.conj().T)) if entries.size else 0.0
            if deviation > HERMITIAN_TOLERANCE:
                raise NonHermitianError(f"Operator flagged hermitian deviates by {deviation:.3e}")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def element(self, row: BasisState, col: BasisState) -> complex:
        return complex(self.entries[self.basis.index(row), self.basis.index(col)])

    def is_hermitian(self, tolerance: float = HERMITIAN_TOLERANCE) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tolerance)


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Unit-norm amplitude vector over an ordered basis."""
    basis: Tuple[BasisState, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'basis', tuple(self.basis))
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape[0] != len(self.basis):
            raise BasisMismatchError(
                f"State has {amplitudes.shape[0]} amplitudes for a basis of {len(self.basis)}"
            )
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise NormalizationError(f"State norm {norm!r} differs from 1 by more than {NORM_TOLERANCE}")
        amplitudes.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amplitudes)

    @classmethod
    def basis_vector(cls, basis: Sequence[BasisState], state: BasisState) -> 'QuantumState':
        """The state equal to one basis element."""
        basis = tuple(basis)
        amplitudes = np.zeros(len(basis), dtype=complex)
        amplitudes[basis.index(state)] = 1.0
        return cls(basis, amplitudes)

    @classmethod
    def normalized(cls, basis: Sequence[BasisState], amplitudes) -> 'QuantumState':
        """Build a state after rescaling the amplitudes to unit norm."""
        amplitudes = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amplitudes)
        if norm == 0:
            raise NormalizationError("Cannot normalize the zero vector")
        return cls(tuple(basis), amplitudes / norm)

    def amplitude(self, state: BasisState) -> complex:
        return complex(self.amplitudes[self.basis.index(state)])

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True, eq=False)
class Propagator:
    """Unitary time-evolution operator over a basis."""
    basis: Tuple[BasisState, ...]
    matrix: np.ndarray
    time: float
    picture: Picture = Picture.INTERACTION

    def __post_init__(self):
        object.__setattr__(self, 'basis', tuple(self.basis))
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (len(self.basis), len(self.basis)):
            raise BasisMismatchError(
                f"Propagator shape {matrix.shape} does not match basis length {len(self.basis)}"
            )
        deviation = np.max(np.abs(matrix.conj().T @ matrix - np.eye(len(self.basis)))) if matrix.size else 0.0
        if deviation > UNITARY_TOLERANCE:
            raise ValueError(f"Propagator is not unitary (max deviation {deviation:.3e})")
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    def apply(self, state: QuantumState) -> QuantumState:
        if state.basis != self.basis:
            raise BasisMismatchError("Propagator and state are over different bases")
        return QuantumState(self.basis, self.matrix @ state.amplitudes)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Trace-one positive semidefinite matrix over a tensor product of subsystems."""
    dims: Tuple[int, ...]
    entries: np.ndarray
    subsystems: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'dims', tuple(int(d) for d in self.dims))
        if not self.subsystems:
            object.__setattr__(self, 'subsystems', tuple(f"s{i}" for i in range(len(self.dims))))
        object.__setattr__(self, 'subsystems', tuple(self.subsystems))
        if len(self.subsystems) != len(self.dims):
            raise ValueError("One subsystem name is required per tensor factor")
        entries = np.asarray(self.entries, dtype=complex)
        size = int(np.prod(self.dims))
        if entries.shape != (size, size):
            raise BasisMismatchError(f"Density matrix shape {entries.shape} does not match dims {self.dims}")
        trace = complex(np.trace(entries))
        if abs(trace - 1.0) > NORM_TOLERANCE:
            raise NormalizationError(f"Density matrix trace {trace!r} is not 1")
        if np.max(np.abs(entries - entries.conj().T)) > HERMITIAN_TOLERANCE:
            raise NonHermitianError("Density matrix is not Hermitian")
        lowest = float(np.linalg.eigvalsh(entries).min())
        if lowest < -NORM_TOLERANCE:
            raise ValueError(f"Density matrix has negative eigenvalue {lowest:.3e}")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    def eigenvalues(self) -> np.ndarray:
        """Spectrum with tolerance-scale negatives clipped to zero."""
        values = np.linalg.eigvalsh(self.entries)
        return np.where(values < 0, 0.0, values)

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))


@dataclass(frozen=True)
class MeasurementOutcome:
    """One photon-number outcome with its post-selected atomic state."""
    photon_count: int
    probability: float
    conditional_state: QuantumState

    def __post_init__(self):
        if self.photon_count < 0:
            raise ValueError("Photon count cannot be negative")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"Invalid probability {self.probability}. Must be between 0.0 and 1.0")


@dataclass
class ProtocolReport:
    """
    Structured record of one protocol run.

    Attributes:
        protocol_name: Which procedure produced the report
        params: Physical parameters the run used
        schedule: (event, time) pairs in gt-independent time units, non-decreasing
        outcomes: Photon-measurement outcomes, where the protocol measures
        final_states: Labeled pure states at the end of the run
        final_densities: Labeled reduced states at the end of the run
        figures_of_merit: success_probability, fidelity_to_target, negativity, ...
        details: Protocol-specific scalars (phase audit, survival, estimates)
        seed: Seed of any pseudo-random element, recorded for reproducibility
    """
    protocol_name: str
    params: PhysicalParams
    schedule: List[Tuple[str, float]] = field(default_factory=list)
    outcomes: List[MeasurementOutcome] = field(default_factory=list)
    final_states: Dict[str, QuantumState] = field(default_factory=dict)
    final_densities: Dict[str, DensityMatrix] = field(default_factory=dict)
    figures_of_merit: Dict[str, float] = field(default_factory=dict)
    details: Dict[str, object] = field(default_factory=dict)
    seed: Optional[int] = None
    schema_version: str = "1"

    def __post_init__(self):
        """Validate report invariants."""
        previous = 0.0
        for event, time in self.schedule:
            if time < 0:
                raise ValueError(f"Schedule time for '{event}' cannot be negative")
            if time < previous:
                raise ValueError(f"Schedule time for '{event}' decreases from {previous} to {time}")
            previous = time
        for name, value in self.figures_of_merit.items():
            if (name.endswith('probability') or name.startswith('fidelity')) and not 0.0 <= value <= 1.0:
                raise ValueError(f"Figure of merit '{name}'={value} must be between 0.0 and 1.0")
