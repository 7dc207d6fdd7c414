"""
Product basis enumeration and invariant sectors of N = a^dag a + l1z + l2z.

Ordering conventions:
    - sector bases follow the standard listing: descending photon number,
      and within one photon number descending m1;
    - full_basis is photons-major descending, then m1 descending, then m2
      descending, so every sector basis is a subsequence of it;
    - product (tensor) order, used for partial traces, is ascending:
      index = photons * 9 + (m1 + 1) * 3 + (m2 + 1).
"""

import itertools
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import EmptySectorError, SectorSupportError
from .models import AtomLevel, BasisState, QuantumState, Sector

LEVELS = (AtomLevel.UP, AtomLevel.MID, AtomLevel.DOWN)
ATOM_DIM = 3

# (photon offset from N, m1, m2) in sector order
_SECTOR_TEMPLATE = (
    (2, -1, -1),
    (1, 0, -1),
    (1, -1, 0),
    (0, 1, -1),
    (0, 0, 0),
    (0, -1, 1),
    (-1, 1, 0),
    (-1, 0, 1),
    (-2, 1, 1),
)

MIN_CONSERVED_NUMBER = -2


def conserved_number(state: BasisState) -> int:
    """Photon number plus both magnetic quantum numbers."""
    return state.photons + int(state.m1) + int(state.m2)


@lru_cache(maxsize=None)
def sector_basis(n: int) -> Sector:
    """
    Ordered basis of the invariant subspace with conserved number n.

    Raises:
        EmptySectorError: If n < -2, where no state has non-negative photons
    """
    if n < MIN_CONSERVED_NUMBER:
        raise EmptySectorError(f"Conserved number {n} < {MIN_CONSERVED_NUMBER} has an empty invariant space")
    states = [
        BasisState(n + offset, m1, m2)
        for offset, m1, m2 in _SECTOR_TEMPLATE
        if n + offset >= 0
    ]
    return Sector(conserved_n=n, basis=tuple(states))


@lru_cache(maxsize=None)
def _full_basis(photon_cap: int) -> Tuple[BasisState, ...]:
    return tuple(
        BasisState(photons, m1, m2)
        for photons, m1, m2 in itertools.product(range(photon_cap, -1, -1), LEVELS, LEVELS)
    )


def full_basis(photon_cap: int) -> List[BasisState]:
    """All 9 * (photon_cap + 1) product states in the documented order."""
    if photon_cap < 0:
        raise ValueError(f"Photon cap cannot be negative, got {photon_cap}")
    return list(_full_basis(int(photon_cap)))


def atomic_basis() -> List[BasisState]:
    """The nine two-atom states, labelled with photons=0."""
    return full_basis(0)


def sectors_in(basis: Iterable[BasisState]) -> List[int]:
    """Sorted distinct conserved numbers present in a basis."""
    return sorted({conserved_number(s) for s in basis})


def support_sectors(state: QuantumState, tolerance: float = 0.0) -> List[int]:
    """Conserved numbers carrying amplitude above ``tolerance``."""
    return sorted({
        conserved_number(s)
        for s, amplitude in zip(state.basis, state.amplitudes)
        if abs(amplitude) > tolerance
    })


def sector_indices(basis: Sequence[BasisState], n: int) -> np.ndarray:
    """Positions in ``basis`` of the states with conserved number n."""
    return np.array([i for i, s in enumerate(basis) if conserved_number(s) == n], dtype=int)


def is_sector_basis(basis: Sequence[BasisState]) -> Optional[int]:
    """Return N when ``basis`` is exactly sector_basis(N), else None."""
    numbers = sectors_in(basis)
    if len(numbers) != 1 or numbers[0] < MIN_CONSERVED_NUMBER:
        return None
    return numbers[0] if tuple(basis) == sector_basis(numbers[0]).basis else None


def restrict_to_sector(state: QuantumState, n: int) -> QuantumState:
    """
    Re-express a state supported on sector n over sector_basis(n).

    Raises:
        SectorSupportError: If the state has amplitude outside sector n
    """
    sector = sector_basis(n)
    amplitudes = np.zeros(sector.dimension, dtype=complex)
    for s, amplitude in zip(state.basis, state.amplitudes):
        if conserved_number(s) == n:
            amplitudes[sector.index(s)] = amplitude
        elif amplitude != 0:
            raise SectorSupportError(f"Amplitude {amplitude} on {s.label} lies outside sector {n}")
    return QuantumState(sector.basis, amplitudes)


def photon_cap_of(basis: Iterable[BasisState]) -> int:
    return max(s.photons for s in basis)


def product_index(state: BasisState) -> int:
    """Index of a basis state in ascending photon (x) atom1 (x) atom2 order."""
    return state.photons * ATOM_DIM ** 2 + (int(state.m1) + 1) * ATOM_DIM + (int(state.m2) + 1)


def to_product_vector(state: QuantumState, photon_cap: Optional[int] = None) -> np.ndarray:
    """Amplitudes laid out in tensor-product order up to ``photon_cap``."""
    cap = photon_cap_of(state.basis) if photon_cap is None else photon_cap
    vector = np.zeros((cap + 1) * ATOM_DIM ** 2, dtype=complex)
    for s, amplitude in zip(state.basis, state.amplitudes):
        if s.photons > cap:
            if amplitude != 0:
                raise ValueError(f"{s.label} exceeds photon cap {cap}")
            continue
        vector[product_index(s)] = amplitude
    return vector


def from_product_vector(vector: np.ndarray, basis: Sequence[BasisState]) -> QuantumState:
    """Pick the amplitudes of ``basis`` out of a tensor-product-ordered vector."""
    vector = np.asarray(vector, dtype=complex)
    return QuantumState(tuple(basis), np.array([vector[product_index(s)] for s in basis]))


def permutation_to_product(basis: Sequence[BasisState]) -> np.ndarray:
    """Indices mapping product order onto ``basis`` order (basis[i] sits at product slot perm[i])."""
    return np.array([product_index(s) for s in basis], dtype=int)


def sector_of(state: QuantumState) -> Dict[int, float]:
    """Weight of the state in each conserved-number sector it touches."""
    weights: Dict[int, float] = {}
    for s, probability in zip(state.basis, state.probabilities()):
        n = conserved_number(s)
        weights[n] = weights.get(n, 0.0) + float(probability)
    return {n: w for n, w in sorted(weights.items()) if w > 0.0}


def project_to_sector(state: QuantumState, n: int) -> QuantumState:
    """
    Normalized projection onto sector n, over sector_basis(n).

    Raises:
        SectorSupportError: If the state has no weight in sector n
    """
    sector = sector_basis(n)
    amplitudes = np.zeros(sector.dimension, dtype=complex)
    for s, amplitude in zip(state.basis, state.amplitudes):
        if conserved_number(s) == n:
            amplitudes[sector.index(s)] = amplitude
    if not np.any(amplitudes):
        raise SectorSupportError(f"State has no weight in sector {n}")
    return QuantumState.normalized(sector.basis, amplitudes)


def parse_basis_state(text: str) -> BasisState:
    """
    Parse "m1,m2" (vacuum field) or "n,m1,m2" into a BasisState.

    Raises:
        ValueError: On anything other than two or three integers
    """
    try:
        values = [int(part) for part in text.replace(' ', '').split(',')]
    except ValueError:
        raise ValueError(f"Basis label '{text}' must be comma-separated integers")
    if len(values) == 2:
        return BasisState(0, *values)
    if len(values) == 3:
        return BasisState(*values)
    raise ValueError(f"Basis label '{text}' needs two (m1,m2) or three (n,m1,m2) entries")
