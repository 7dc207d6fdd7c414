"""
Photon-number measurement with post-selection, partial traces and entanglement measures.
"""

import logging
from collections import OrderedDict
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import qutip
from scipy.linalg import eigvalsh
from scipy.special import entr

from .errors import BasisMismatchError, InvalidSubsystemError
from .models import BasisState, DensityMatrix, MeasurementOutcome, QuantumState
from .state_space import ATOM_DIM, photon_cap_of, to_product_vector

logger = logging.getLogger(__name__)

CLIP_TOLERANCE = 1e-12
OUTCOME_TOLERANCE = 1e-12
CAVITY_SUBSYSTEMS = ("photon", "atom1", "atom2")

Selector = Union[str, int]


def photon_statistics(state: QuantumState) -> Dict[int, float]:
    """Photon-number distribution, ascending photon count, zero entries included."""
    statistics: Dict[int, float] = {}
    for s, probability in zip(state.basis, state.probabilities()):
        statistics[s.photons] = statistics.get(s.photons, 0.0) + float(probability)
    return dict(sorted(statistics.items()))


def success_probability_formula(n_period: int) -> float:
    """Probability of detecting one photon after n EPR periods: sin^2(2 n pi / sqrt 7) / 2."""
    return 0.5 * float(np.sin(2.0 * n_period * np.pi / np.sqrt(7.0))) ** 2


def measure_photons(state: QuantumState) -> List[MeasurementOutcome]:
    """
    Projective photon-number measurement.

    Each outcome carries the renormalized atomic state, labelled with
    photons=0, over the atomic configurations present at that photon count
    (in basis order). Outcomes with probability at or below
    OUTCOME_TOLERANCE are omitted.
    """
    groups: "OrderedDict[int, List[Tuple[BasisState, complex]]]" = OrderedDict()
    for s, amplitude in zip(state.basis, state.amplitudes):
        groups.setdefault(s.photons, []).append((BasisState(0, s.m1, s.m2), amplitude))

    outcomes = []
    for photons in sorted(groups):
        labels = [label for label, _ in groups[photons]]
        amplitudes = np.array([amplitude for _, amplitude in groups[photons]], dtype=complex)
        probability = float(np.sum(np.abs(amplitudes) ** 2))
        if probability <= OUTCOME_TOLERANCE:
            continue
        conditional = QuantumState.normalized(labels, amplitudes)
        outcomes.append(MeasurementOutcome(photons, min(probability, 1.0), conditional))
        logger.debug(f"Photon outcome {photons}: probability {probability:.6f}")
    return outcomes


def outcome_for(outcomes: Sequence[MeasurementOutcome], photon_count: int):
    """The outcome with the given photon count, or None when it was omitted."""
    return next((o for o in outcomes if o.photon_count == photon_count), None)


def partial_trace(vector: np.ndarray, dims: Sequence[int], keep: Sequence[int],
                  names: Sequence[str] = ()) -> DensityMatrix:
    """
    Reduced state of a pure tensor-product vector, kept factors in ascending order.

    Factors of dimension 1 are dropped before calling qutip.
    """
    dims = [int(d) for d in dims]
    keep = sorted(set(keep))
    if not keep or any(not 0 <= k < len(dims) for k in keep):
        raise InvalidSubsystemError(f"Invalid subsystem selection {keep} for {len(dims)} factors")
    names = list(names) if names else [f"s{i}" for i in range(len(dims))]
    vector = np.asarray(vector, dtype=complex).reshape(-1, 1)
    if vector.shape[0] != int(np.prod(dims)):
        raise BasisMismatchError(f"Vector of length {vector.shape[0]} does not match dims {dims}")

    active = [i for i, d in enumerate(dims) if d > 1]
    kept_active = [active.index(k) for k in keep if dims[k] > 1]
    kept_dims = tuple(dims[k] for k in keep)
    kept_names = tuple(names[k] for k in keep)
    if not kept_active:
        return DensityMatrix(kept_dims, np.ones((1, 1)), kept_names)

    ket = qutip.Qobj(vector, dims=[[dims[i] for i in active], [1] * len(active)])
    reduced = ket.ptrace(kept_active).full()
    reduced = (reduced + reduced.conj().T) / 2.0
    return DensityMatrix(kept_dims, reduced / np.trace(reduced).real, kept_names)


def _subsystem_index(selector: Selector) -> int:
    if isinstance(selector, str):
        if selector not in CAVITY_SUBSYSTEMS:
            raise InvalidSubsystemError(f"Unknown subsystem '{selector}'; expected one of {CAVITY_SUBSYSTEMS}")
        return CAVITY_SUBSYSTEMS.index(selector)
    if isinstance(selector, (int, np.integer)) and 0 <= selector < len(CAVITY_SUBSYSTEMS):
        return int(selector)
    raise InvalidSubsystemError(f"Invalid subsystem selector {selector!r}")


def reduced_density(state: QuantumState, keep: Union[Selector, Sequence[Selector]]) -> DensityMatrix:
    """
    Partial trace over the complement of ``keep`` (names from photon/atom1/atom2 or indices 0-2).

    Raises:
        InvalidSubsystemError: If the selector names no valid subsystem
    """
    selectors = [keep] if isinstance(keep, (str, int, np.integer)) else list(keep)
    indices = [_subsystem_index(s) for s in selectors]
    cap = photon_cap_of(state.basis)
    dims = (cap + 1, ATOM_DIM, ATOM_DIM)
    return partial_trace(to_product_vector(state, cap), dims, indices, CAVITY_SUBSYSTEMS)


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """
    Phase-invariant overlap |<a|b>|^2.

    Raises:
        BasisMismatchError: If the states are over different bases
    """
    if a.basis != b.basis:
        raise BasisMismatchError("Fidelity requires states over the same basis")
    overlap = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(max(overlap, 0.0), 1.0))


def fidelity_to_pure(rho: DensityMatrix, target: np.ndarray) -> float:
    """<psi|rho|psi> for a pure target given in the density matrix's tensor order."""
    target = np.asarray(target, dtype=complex).reshape(-1)
    if target.shape[0] != rho.entries.shape[0]:
        raise BasisMismatchError("Target vector does not match the density matrix dimension")
    value = float(np.real(np.vdot(target, rho.entries @ target)))
    return min(max(value, 0.0), 1.0)


def _clipped(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    return np.where((values < 0) & (values >= -CLIP_TOLERANCE), 0.0, values)


def negativity(rho: DensityMatrix, split: Sequence[int] = (1,)) -> float:
    """
    Sum of |negative eigenvalues| of the partial transpose over the factors in ``split``.

    Raises:
        InvalidSubsystemError: If rho has fewer than two factors or split is not a bipartition
    """
    dims = list(rho.dims)
    if len(dims) < 2:
        raise InvalidSubsystemError("Negativity needs a bipartite state")
    split = sorted(set(split))
    if not split or len(split) == len(dims) or any(not 0 <= s < len(dims) for s in split):
        raise InvalidSubsystemError(f"Split {split} is not a bipartition of {len(dims)} factors")
    mask = [1 if i in split else 0 for i in range(len(dims))]
    transposed = qutip.partial_transpose(qutip.Qobj(rho.entries, dims=[dims, dims]), mask).full()
    values = _clipped(eigvalsh((transposed + transposed.conj().T) / 2.0))
    return float(-np.sum(values[values < 0]))


def entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in nats with 0 log 0 = 0."""
    return float(np.sum(entr(rho.eigenvalues())))


def atomic_product_vector(state: QuantumState) -> np.ndarray:
    """Nine-component 3 (x) 3 vector of an atomic (photons=0) state."""
    if photon_cap_of(state.basis) != 0:
        raise BasisMismatchError("Expected an atomic state labelled with photons=0")
    return to_product_vector(state, 0)


def atomic_density(state: QuantumState) -> DensityMatrix:
    """Pure two-atom density matrix of an atomic (photons=0) state."""
    vector = atomic_product_vector(state)
    return DensityMatrix((ATOM_DIM, ATOM_DIM), np.outer(vector, vector.conj()), ("atom1", "atom2"))
