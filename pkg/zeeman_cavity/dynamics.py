"""
Exact time evolution.

The eigendecomposition propagator is the ground truth; the transcribed
closed forms for the N=0 and N=-1 sectors are references checked against it.
At resonance H = omega * N + H_int with [N, H_int] = 0, so the Schrodinger
propagator of sector N is exp(-i omega N t) times the interaction-picture one.
"""

import logging
from typing import Iterable, Tuple

import numpy as np
from scipy.linalg import eigh

from .config import PhysicalParams
from .errors import NonHermitianError
from .models import HERMITIAN_TOLERANCE, OperatorMatrix, Picture, Propagator, QuantumState
from .operators import MIN_HAMILTONIAN_CAP, hamiltonian_full, interaction_block
from .state_space import (
    full_basis,
    is_sector_basis,
    photon_cap_of,
    sector_basis,
    sector_indices,
    sectors_in,
)

logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)
SQRT7 = np.sqrt(7.0)


def _exp_hermitian(matrix: np.ndarray, t: float) -> np.ndarray:
    """exp(-i matrix t) from the real spectrum of a Hermitian matrix."""
    if matrix.size == 0:
        return matrix.astype(complex)
    energies, vectors = eigh(matrix)
    return (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T


def propagator_numeric(block: OperatorMatrix, t: float,
                       picture: Picture = Picture.INTERACTION) -> Propagator:
    """
    exp(-i block t) via Hermitian eigendecomposition.

    Raises:
        NonHermitianError: If block is not Hermitian within 1e-13
    """
    if not block.is_hermitian(HERMITIAN_TOLERANCE):
        raise NonHermitianError("propagator_numeric requires a Hermitian operator")
    return Propagator(block.basis, _exp_hermitian(block.entries, t), float(t), picture)


def propagator_closed_n0(t: float, g: float) -> Propagator:
    """Transcribed closed-form propagator of the N=0 sector (resonance, alpha=0)."""
    c1, s1 = np.cos(g * t), np.sin(g * t)
    c7, s7 = np.cos(SQRT7 * g * t), np.sin(SQRT7 * g * t)
    d = c7 - 1.0
    p = SQRT7 / 14.0 * (SQRT7 * s1 + s7)
    q = SQRT7 / 14.0 * (SQRT7 * s1 - s7)
    r = np.sqrt(2.0 / 7.0) * s7

    u = np.zeros((6, 6), dtype=complex)
    u[0, 0] = (3.0 + 4.0 * c7) / 7.0
    u[0, 1] = u[0, 2] = -1j * r
    u[0, 3] = u[0, 5] = SQRT2 * d / 7.0
    u[0, 4] = 2.0 * SQRT2 * d / 7.0
    u[1, 1] = u[2, 2] = (c1 + c7) / 2.0
    u[1, 2] = (c7 - c1) / 2.0
    u[1, 3] = u[2, 5] = -1j * p
    u[1, 5] = u[2, 3] = 1j * q
    u[1, 4] = u[2, 4] = -1j * s7 / SQRT7
    u[3, 3] = u[5, 5] = (6.0 + 7.0 * c1 + c7) / 14.0
    u[3, 5] = (6.0 - 7.0 * c1 + c7) / 14.0
    u[3, 4] = u[4, 5] = d / 7.0
    u[4, 4] = (5.0 + 2.0 * c7) / 7.0
    # symmetric: fill the lower triangle from the upper one
    u = np.triu(u) + np.triu(u, k=1).T
    return Propagator(sector_basis(0).basis, u, float(t), Picture.SCHRODINGER)


def propagator_closed_nm1(t: float, params: PhysicalParams) -> Propagator:
    """Transcribed N=-1 propagator including the exp(i omega t) free phase."""
    c, s = np.cos(SQRT2 * params.g * t), np.sin(SQRT2 * params.g * t)
    u = np.array([
        [c, -1j * s / SQRT2, -1j * s / SQRT2],
        [-1j * s / SQRT2, (1.0 + c) / 2.0, (c - 1.0) / 2.0],
        [-1j * s / SQRT2, (c - 1.0) / 2.0, (1.0 + c) / 2.0],
    ], dtype=complex)
    return Propagator(sector_basis(-1).basis, np.exp(1j * params.omega * t) * u, float(t), Picture.SCHRODINGER)


def sector_propagator(n: int, t: float, params: PhysicalParams,
                      picture: Picture = Picture.SCHRODINGER) -> Propagator:
    """
    Propagator restricted to sector n.

    At resonance this is the interaction block exponential times the free
    phase exp(-i omega n t) (dropped in the interaction picture). Off
    resonance the sector block of hamiltonian_full is exponentiated.
    """
    basis = sector_basis(n).basis
    if params.is_resonant:
        interaction = propagator_numeric(interaction_block(n, params), t)
        if picture is Picture.INTERACTION:
            return interaction
        phase = np.exp(-1j * params.omega * n * t)
        return Propagator(basis, phase * interaction.matrix, float(t), Picture.SCHRODINGER)
    if picture is Picture.INTERACTION:
        raise ValueError("The interaction-picture propagator is time-independent only at resonance")
    hamiltonian = hamiltonian_full(params, max(n + 2, MIN_HAMILTONIAN_CAP))
    positions = [hamiltonian.basis.index(s) for s in basis]
    block = hamiltonian.entries[np.ix_(positions, positions)]
    return Propagator(basis, _exp_hermitian(block, t), float(t), Picture.SCHRODINGER)


def propagator_full(params: PhysicalParams, photon_cap: int, t: float) -> Propagator:
    """
    Schrodinger propagator on full_basis(photon_cap), exponentiated sector by sector.

    Entries between different conserved numbers are exact zeros.
    """
    hamiltonian = hamiltonian_full(params, photon_cap)
    matrix = np.zeros_like(hamiltonian.entries)
    for n in sectors_in(hamiltonian.basis):
        idx = sector_indices(hamiltonian.basis, n)
        matrix[np.ix_(idx, idx)] = _exp_hermitian(hamiltonian.entries[np.ix_(idx, idx)], t)
    return Propagator(hamiltonian.basis, matrix, float(t), Picture.SCHRODINGER)


def evolve(state: QuantumState, t: float, params: PhysicalParams,
           picture: Picture = Picture.SCHRODINGER) -> QuantumState:
    """
    State at time t.

    A state over sector_basis(N) stays in that basis; a state over
    full_basis(cap) is evolved with the truncated hamiltonian_full (cap >= 2).
    """
    n = is_sector_basis(state.basis)
    if n is not None:
        return sector_propagator(n, t, params, picture).apply(state)

    cap = photon_cap_of(state.basis)
    if tuple(state.basis) != tuple(full_basis(cap)):
        raise ValueError("evolve accepts states over a sector basis or a full truncated basis")
    if picture is Picture.INTERACTION:
        raise ValueError("Interaction-picture evolution is only defined sector by sector")
    return propagator_full(params, cap, t).apply(state)


def evolve_unstructured(state: QuantumState, t: float, hamiltonian: OperatorMatrix) -> QuantumState:
    """Evolve under an arbitrary Hermitian operator (no sector structure assumed)."""
    return propagator_numeric(hamiltonian, t, Picture.SCHRODINGER).apply(state)


def alpha_deviation(t: float, g: float, alpha: float, n: int = 0) -> float:
    """Spectral norm of U_alpha(t) - U_0(t) on sector n, interaction picture at resonance."""
    with_alpha = propagator_numeric(interaction_block(n, PhysicalParams(g=g, alpha=alpha)), t)
    without = propagator_numeric(interaction_block(n, PhysicalParams(g=g, alpha=0.0)), t)
    return float(np.linalg.norm(with_alpha.matrix - without.matrix, ord=2))


def closed_form_errors(gt: float, params: PhysicalParams) -> Tuple[float, float]:
    """
    Max-abs differences of the two closed forms from the numeric oracle at one gt.

    The N=-1 oracle is exp(i omega t) times the interaction-block exponential.
    """
    t = gt / params.g
    resonant = PhysicalParams(g=params.g, alpha=0.0, beta=params.omega, omega=params.omega)
    oracle_n0 = propagator_numeric(interaction_block(0, resonant), t).matrix
    oracle_nm1 = np.exp(1j * resonant.omega * t) * propagator_numeric(interaction_block(-1, resonant), t).matrix
    error_n0 = float(np.max(np.abs(propagator_closed_n0(t, params.g).matrix - oracle_n0)))
    error_nm1 = float(np.max(np.abs(propagator_closed_nm1(t, resonant).matrix - oracle_nm1)))
    logger.debug(f"gt={gt:.4f}: closed-form errors N=0 {error_n0:.2e}, N=-1 {error_nm1:.2e}")
    return error_n0, error_nm1


def closed_form_errors_on_grid(grid: Iterable[float], params: PhysicalParams):
    return [(gt, *closed_form_errors(gt, params)) for gt in grid]
