"""
Atomic ladder and field operators, the full Hamiltonian and resonant sector blocks.

Everything is assembled in tensor-product order (photon (x) atom1 (x) atom2,
ascending indices) with numpy.kron and then permuted onto the requested
basis ordering.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from .config import PhysicalParams
from .errors import InvalidAtomLevelError, OffResonanceError
from .models import BasisState, OperatorMatrix
from .state_space import (
    ATOM_DIM,
    conserved_number,
    full_basis,
    permutation_to_product,
    sector_basis,
)

logger = logging.getLogger(__name__)

MIN_HAMILTONIAN_CAP = 2


def atomic_raising() -> np.ndarray:
    """l+ = |1><0| + |0><-1| on one atom, rows/columns ordered m = -1, 0, +1."""
    raising = np.zeros((ATOM_DIM, ATOM_DIM), dtype=complex)
    raising[1, 0] = 1.0
    raising[2, 1] = 1.0
    return raising


def atomic_lz() -> np.ndarray:
    return np.diag([-1.0, 0.0, 1.0]).astype(complex)


def field_annihilation(photon_cap: int) -> np.ndarray:
    """Truncated a with a|n> = sqrt(n)|n-1> for n <= photon_cap."""
    return np.diag(np.sqrt(np.arange(1, photon_cap + 1)), k=1).astype(complex)


def _lift(photon: np.ndarray, atom1: np.ndarray, atom2: np.ndarray) -> np.ndarray:
    return np.kron(photon, np.kron(atom1, atom2))


def _on_atom(atom: int, single: np.ndarray, photon_cap: int) -> np.ndarray:
    identity_field = np.eye(photon_cap + 1)
    identity_atom = np.eye(ATOM_DIM)
    if atom == 1:
        return _lift(identity_field, single, identity_atom)
    if atom == 2:
        return _lift(identity_field, identity_atom, single)
    raise InvalidAtomLevelError(f"Atom index must be 1 or 2, got {atom!r}")


def _to_basis(product_matrix: np.ndarray, basis: Sequence[BasisState], hermitian: bool) -> OperatorMatrix:
    perm = permutation_to_product(basis)
    return OperatorMatrix(tuple(basis), product_matrix[np.ix_(perm, perm)], hermitian=hermitian)


def ladder_plus(atom: int, photon_cap: int = 0) -> OperatorMatrix:
    """l+ of one atom lifted to full_basis(photon_cap); photon_cap=0 is the bare two-atom space."""
    return _to_basis(_on_atom(atom, atomic_raising(), photon_cap), full_basis(photon_cap), hermitian=False)


def ladder_minus(atom: int, photon_cap: int = 0) -> OperatorMatrix:
    plus = ladder_plus(atom, photon_cap)
    return OperatorMatrix(plus.basis, plus.entries.conj().T)


def lz(atom: int, photon_cap: int = 0) -> OperatorMatrix:
    return _to_basis(_on_atom(atom, atomic_lz(), photon_cap), full_basis(photon_cap), hermitian=True)


def annihilation(photon_cap: int) -> OperatorMatrix:
    identity_atom = np.eye(ATOM_DIM)
    matrix = _lift(field_annihilation(photon_cap), identity_atom, identity_atom)
    return _to_basis(matrix, full_basis(photon_cap), hermitian=False)


def conserved_number_operator(basis: Sequence[BasisState]) -> OperatorMatrix:
    """Diagonal N = a^dag a + l1z + l2z over an arbitrary basis."""
    return OperatorMatrix(tuple(basis), np.diag([float(conserved_number(s)) for s in basis]), hermitian=True)


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> np.ndarray:
    if a.basis != b.basis:
        raise ValueError("Commutator requires operators over the same basis")
    return a.entries @ b.entries - b.entries @ a.entries


def _coupling_product(g: float, photon_cap: int, raising: Optional[np.ndarray]) -> np.ndarray:
    raising = atomic_raising() if raising is None else np.asarray(raising, dtype=complex)
    if raising.shape != (ATOM_DIM, ATOM_DIM):
        raise ValueError(f"Atomic raising operator must be 3x3, got shape {raising.shape}")
    a = _lift(field_annihilation(photon_cap), np.eye(ATOM_DIM), np.eye(ATOM_DIM))
    collective = _on_atom(1, raising, photon_cap) + _on_atom(2, raising, photon_cap)
    absorb = collective @ a
    return g * (absorb + absorb.conj().T)


def _dipole_product(alpha: float, photon_cap: int) -> np.ndarray:
    return alpha * _lift(np.eye(photon_cap + 1), atomic_lz(), atomic_lz())


def hamiltonian_full(params: PhysicalParams, photon_cap: int,
                     raising: Optional[np.ndarray] = None) -> OperatorMatrix:
    """
    omega a^dag a + beta (l1z + l2z) + g[(l1+ + l2+) a + h.c.] + alpha l1z l2z on full_basis(photon_cap).

    The field is hard-truncated at photon_cap, so states at the cap cannot
    absorb. ``raising`` replaces l+ in the coupling term; a custom operator
    may break conservation of N.

    Raises:
        ValueError: If photon_cap < 2
    """
    if photon_cap < MIN_HAMILTONIAN_CAP:
        raise ValueError(f"photon_cap must be at least {MIN_HAMILTONIAN_CAP}, got {photon_cap}")
    identity_atom = np.eye(ATOM_DIM)
    a = field_annihilation(photon_cap)
    free = (
        params.omega * _lift(a.conj().T @ a, identity_atom, identity_atom)
        + params.beta * (_on_atom(1, atomic_lz(), photon_cap) + _on_atom(2, atomic_lz(), photon_cap))
    )
    matrix = free + _coupling_product(params.g, photon_cap, raising) + _dipole_product(params.alpha, photon_cap)
    logger.debug(f"Built full Hamiltonian with photon cap {photon_cap} ({matrix.shape[0]} states)")
    return _to_basis(matrix, full_basis(photon_cap), hermitian=True)


def interaction_block(n: int, params: PhysicalParams) -> OperatorMatrix:
    """
    Resonant interaction-picture Hamiltonian g[(l1+ + l2+) a + h.c.] + alpha l1z l2z on sector n.

    For n >= 2 this is the generic 9x9 block with n as the conserved number;
    smaller n give its truncated principal block.

    Raises:
        OffResonanceError: If omega != beta; use hamiltonian_full instead
        EmptySectorError: If n < -2
    """
    if not params.is_resonant:
        raise OffResonanceError(
            f"interaction_block needs omega == beta (got omega={params.omega}, beta={params.beta}); "
            "use hamiltonian_full for off-resonant dynamics"
        )
    sector = sector_basis(n)
    cap = n + 2
    matrix = _coupling_product(params.g, cap, None) + _dipole_product(params.alpha, cap)
    return _to_basis(matrix, sector.basis, hermitian=True)
