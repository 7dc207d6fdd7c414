"""
Protocol runs built on the exact dynamics.

    - epr_generate: evolve |0>(1,-1) for 2 n pi / (sqrt7 g) and post-select one photon
    - local_exchange: swap the excitation between the two atoms of one cavity
    - transfer: move a two-atom entangled state onto a fresh atom pair via two cavities
    - apply_damping / audit_report: phenomenological decay and the report self-audit

The feedback loop lives in feedback.py.
"""

import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
import qutip
from scipy.linalg import block_diag

from .config import PhysicalParams
from .errors import NormalizationError, OffResonanceError, SectorSupportError
from .measurement import (
    atomic_density,
    atomic_product_vector,
    fidelity,
    fidelity_to_pure,
    measure_photons,
    negativity,
    outcome_for,
    partial_trace,
    photon_statistics,
    success_probability_formula,
)
from .models import (
    NORM_TOLERANCE,
    BasisState,
    Picture,
    ProtocolReport,
    QuantumState,
)
from .dynamics import alpha_deviation, evolve, propagator_closed_n0, propagator_full, sector_propagator
from .state_space import (
    ATOM_DIM,
    atomic_basis,
    conserved_number,
    permutation_to_product,
    sector_basis,
)

logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)
SQRT7 = np.sqrt(7.0)

EPR_INITIAL = BasisState(0, 1, -1)
EXCHANGE_SECTORS = (-1, -2)
TRANSFER_PHOTON_CAP = 2
AUDIT_TOLERANCE = 1e-10

# Four-atom register: cavity A holds atoms (1, 3), cavity B holds atoms (2, 4).
# Joint tensor order is (photon_A, atom1, atom3, photon_B, atom2, atom4).
TRANSFER_DIMS = (TRANSFER_PHOTON_CAP + 1, ATOM_DIM, ATOM_DIM) * 2
TRANSFER_NAMES = ("photon_A", "atom1", "atom3", "photon_B", "atom2", "atom4")
ATOMS_12 = (1, 4)
ATOMS_34 = (2, 5)


def epr_time(n_period: int, g: float) -> float:
    return 2.0 * n_period * np.pi / (SQRT7 * g)


def exchange_time(n_period: int, g: float) -> float:
    return (2 * n_period + 1) * np.pi / (SQRT2 * g)


def epr_target() -> QuantumState:
    """(|0,-1> - |-1,0>)/sqrt2 over the atomic labels of the one-photon branch."""
    labels = (BasisState(0, 0, -1), BasisState(0, -1, 0))
    return QuantumState(labels, np.array([1.0, -1.0]) / SQRT2)


def _check_period(n_period: int, minimum: int) -> None:
    if isinstance(n_period, bool) or int(n_period) != n_period or n_period < minimum:
        raise ValueError(f"n_period must be an integer >= {minimum}, got {n_period!r}")


def state_at(t: float, params: PhysicalParams) -> QuantumState:
    """
    Closed-form state at time t grown from |0>(1,-1), over sector_basis(0).

    The closed form neglects alpha; the N=0 sector carries no free phase.

    Raises:
        OffResonanceError: If omega != beta
    """
    if not params.is_resonant:
        raise OffResonanceError("state_at uses the resonant closed form; omega must equal beta")
    if params.alpha != 0:
        logger.warning(f"state_at ignores alpha={params.alpha}; use dynamics.evolve for the exact state")
    sector = sector_basis(0)
    column = propagator_closed_n0(t, params.g).matrix[:, sector.index(EPR_INITIAL)]
    return QuantumState(sector.basis, column)


def epr_generate(n_period: int, params: PhysicalParams, t: Optional[float] = None) -> ProtocolReport:
    """
    Generate the atomic EPR pair by photon post-selection.

    Args:
        n_period: Number of sqrt7-periods to wait (>= 1)
        params: Physical parameters; must be resonant
        t: Evolution time overriding the scheduled 2 n pi / (sqrt7 g)

    Returns:
        ProtocolReport with the one-photon success probability, the fidelity of
        the conditional state to the EPR target and the zero-photon branch.
    """
    _check_period(n_period, 1)
    if not params.is_resonant:
        raise OffResonanceError("epr_generate requires omega == beta")
    scheduled = epr_time(n_period, params.g)
    t = scheduled if t is None else float(t)
    logger.info(f"EPR generation: n_period={n_period}, t={t:.6f} (scheduled {scheduled:.6f})")

    sector = sector_basis(0)
    evolved = evolve(QuantumState.basis_vector(sector.basis, EPR_INITIAL), t, params)
    outcomes = measure_photons(evolved)
    one_photon = outcome_for(outcomes, 1)
    no_photon = outcome_for(outcomes, 0)

    success = photon_statistics(evolved).get(1, 0.0)
    figures = {
        "success_probability": success,
        "success_probability_formula": success_probability_formula(n_period),
        "fidelity_to_target": 0.0,
        "negativity": 0.0,
    }
    final_states = {"evolved": evolved, "target": epr_target()}
    if one_photon is not None:
        final_states["conditional_photon1"] = one_photon.conditional_state
        figures["fidelity_to_target"] = fidelity(one_photon.conditional_state, epr_target())
        figures["negativity"] = negativity(atomic_density(one_photon.conditional_state))
    if no_photon is not None:
        final_states["conditional_photon0"] = no_photon.conditional_state
        figures["negativity_photon0"] = negativity(atomic_density(no_photon.conditional_state))

    details: Dict[str, object] = {"n_period": n_period, "scheduled_time": scheduled}
    if params.alpha != 0:
        figures["alpha_infidelity"] = 1.0 - figures["fidelity_to_target"]
        details["alpha_deviation"] = alpha_deviation(t, params.g, params.alpha)

    logger.info(
        f"EPR result: P(photon=1)={success:.10f}, fidelity={figures['fidelity_to_target']:.12f}"
    )
    return ProtocolReport(
        protocol_name="epr",
        params=params,
        schedule=[("prepare", 0.0), ("evolve", t), ("measure_photons", t)],
        outcomes=outcomes,
        final_states=final_states,
        figures_of_merit=figures,
        details=details,
    )


def exchange_basis() -> Tuple[BasisState, ...]:
    """Basis of sectors -1 and -2: |1>(-1,-1), |0>(0,-1), |0>(-1,0), |0>(-1,-1)."""
    return sector_basis(-1).basis + sector_basis(-2).basis


def _to_exchange_basis(state: QuantumState) -> np.ndarray:
    basis = exchange_basis()
    amplitudes = np.zeros(len(basis), dtype=complex)
    for s, amplitude in zip(state.basis, state.amplitudes):
        if s in basis:
            amplitudes[basis.index(s)] = amplitude
        elif amplitude != 0:
            raise SectorSupportError(
                f"local_exchange input has amplitude on {s.label} (N={conserved_number(s)}); "
                f"only sectors {EXCHANGE_SECTORS} are allowed"
            )
    return amplitudes


def local_exchange(joint_state: QuantumState, n_period: int, params: PhysicalParams,
                   picture: Picture = Picture.SCHRODINGER) -> QuantumState:
    """
    Evolve one cavity for (2n+1) pi / (sqrt2 g), swapping |0>(0,-1) and |0>(-1,0).

    The result is expressed over exchange_basis(). In the Schrodinger picture
    sector -1 picks up -exp(i omega t) and sector -2 exp(2 i omega t); the
    interaction picture drops those free phases.

    Raises:
        SectorSupportError: If the input has amplitude outside sectors -1 and -2
    """
    _check_period(n_period, 0)
    amplitudes = _to_exchange_basis(joint_state)
    t = exchange_time(n_period, params.g)
    propagator = block_diag(*(sector_propagator(n, t, params, picture).matrix for n in EXCHANGE_SECTORS))
    logger.debug(f"Local exchange over t={t:.6f} in the {picture.value} picture")
    return QuantumState(exchange_basis(), propagator @ amplitudes)


def expected_exchange(state: QuantumState) -> QuantumState:
    """Ideal exchange result up to phases: the (0,-1) and (-1,0) amplitudes swapped."""
    basis = exchange_basis()
    amplitudes = _to_exchange_basis(state)
    first, second = basis.index(BasisState(0, 0, -1)), basis.index(BasisState(0, -1, 0))
    amplitudes[[first, second]] = amplitudes[[second, first]]
    return QuantumState(basis, amplitudes)


def exchange_report(initial: BasisState, n_period: int, params: PhysicalParams,
                    picture: Picture = Picture.SCHRODINGER) -> ProtocolReport:
    """Run local_exchange on one basis input and score it against expected_exchange."""
    _check_period(n_period, 0)
    state = QuantumState.basis_vector(exchange_basis(), initial)
    output = local_exchange(state, n_period, params, picture)
    expected = expected_exchange(state)
    t = exchange_time(n_period, params.g)
    phase = complex(np.vdot(expected.amplitudes, output.amplitudes))
    logger.info(f"Exchange of {initial.label}: fidelity {fidelity(output, expected):.12f}")
    return ProtocolReport(
        protocol_name="exchange",
        params=params,
        schedule=[("prepare", 0.0), ("exchange", t)],
        final_states={"input": state, "output": output, "expected": expected},
        figures_of_merit={"fidelity_to_target": fidelity(output, expected)},
        details={"n_period": n_period, "picture": picture.value, "global_phase": phase},
    )


def _cavity_propagator(t: float, params: PhysicalParams) -> np.ndarray:
    """One-cavity Schrodinger propagator in (photon, atom, atom) tensor order."""
    propagator = propagator_full(params, TRANSFER_PHOTON_CAP, t)
    perm = permutation_to_product(propagator.basis)
    product = np.zeros_like(propagator.matrix)
    product[np.ix_(perm, perm)] = propagator.matrix
    return product


def _cavity_ket(m_first: int, m_second: int) -> qutip.Qobj:
    labels = [BasisState(0, m_first, m_second)]
    vector = np.zeros((TRANSFER_PHOTON_CAP + 1) * ATOM_DIM ** 2, dtype=complex)
    vector[permutation_to_product(labels)[0]] = 1.0
    return qutip.Qobj(vector.reshape(-1, 1), dims=[[TRANSFER_PHOTON_CAP + 1, ATOM_DIM, ATOM_DIM], [1, 1, 1]])


def _transfer_initial(c1: complex, c2: complex) -> np.ndarray:
    """(c1|0,-1>_12 + c2|-1,0>_12) (x) |-1,-1>_34 as a 27 x 27 (cavity A, cavity B) array."""
    joint = (
        c1 * qutip.tensor(_cavity_ket(0, -1), _cavity_ket(-1, -1))
        + c2 * qutip.tensor(_cavity_ket(-1, -1), _cavity_ket(0, -1))
    )
    side = (TRANSFER_PHOTON_CAP + 1) * ATOM_DIM ** 2
    return joint.full().reshape(side, side)


def transfer_evolve(c1: complex, c2: complex, t: float, params: PhysicalParams) -> Tuple[np.ndarray, np.ndarray]:
    """
    Evolve both cavities independently for time t.

    Returns:
        Flattened (initial, final) joint vectors in TRANSFER_DIMS order
    """
    initial = _transfer_initial(c1, c2)
    cavity = _cavity_propagator(t, params)
    final = cavity @ initial @ cavity.T
    return initial.reshape(-1), final.reshape(-1)


def _branch_phase(t: float, params: PhysicalParams, branch: int) -> complex:
    """Phase the c1 (branch 1) or c2 (branch 2) product component acquires."""
    coefficients = (1.0, 0.0) if branch == 1 else (0.0, 1.0)
    _, final = transfer_evolve(*coefficients, t, params)
    final = final.reshape((TRANSFER_PHOTON_CAP + 1) * ATOM_DIM ** 2, -1)
    ground = permutation_to_product([BasisState(0, -1, -1)])[0]
    excited = permutation_to_product([BasisState(0, -1, 0)])[0]
    return complex(final[excited, ground] if branch == 1 else final[ground, excited])


def atoms_34_target(c1: complex, c2: complex) -> QuantumState:
    """c1|0,-1> + c2|-1,0> for atoms (3, 4), labelled over atomic_basis()."""
    vector = np.zeros(ATOM_DIM ** 2, dtype=complex)
    vector[permutation_to_product([BasisState(0, 0, -1)])[0]] = c1
    vector[permutation_to_product([BasisState(0, -1, 0)])[0]] = c2
    basis = atomic_basis()
    return QuantumState(basis, vector[permutation_to_product(basis)])


def transfer(c1: complex, c2: complex, n_period: int, params: PhysicalParams,
             t: Optional[float] = None) -> ProtocolReport:
    """
    Transfer the atom (1, 2) entangled state onto atoms (3, 4).

    Atoms 1 and 3 share cavity A, atoms 2 and 4 share cavity B; both fields
    start in vacuum and atoms 3, 4 start in m=-1. Full Schrodinger phases
    are carried and the per-branch phases are audited.

    Raises:
        NormalizationError: If |c1|^2 + |c2|^2 differs from 1 by more than 1e-12
    """
    _check_period(n_period, 0)
    c1, c2 = complex(c1), complex(c2)
    norm = abs(c1) ** 2 + abs(c2) ** 2
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise NormalizationError(f"|c1|^2 + |c2|^2 = {norm!r}, expected 1")

    scheduled = exchange_time(n_period, params.g)
    t = scheduled if t is None else float(t)
    initial, final = transfer_evolve(c1, c2, t, params)
    before = partial_trace(initial, TRANSFER_DIMS, ATOMS_12, TRANSFER_NAMES)
    after = partial_trace(final, TRANSFER_DIMS, ATOMS_34, TRANSFER_NAMES)
    target = atoms_34_target(c1, c2)
    target_fidelity = fidelity_to_pure(after, atomic_product_vector(target))

    phase_c1 = _branch_phase(t, params, 1)
    phase_c2 = _branch_phase(t, params, 2)
    expected_phase = -np.exp(3j * params.omega * t)
    figures = {
        "fidelity_to_target": target_fidelity,
        "negativity_before": negativity(before),
        "negativity_after": negativity(after),
        "purity_after": after.purity(),
    }
    details = {
        "n_period": n_period,
        "branch_phase_c1": phase_c1,
        "branch_phase_c2": phase_c2,
        "expected_phase": complex(expected_phase),
        "branch_phase_mismatch": abs(phase_c1 - phase_c2),
    }
    logger.info(
        f"Transfer c1={c1:.6f}, c2={c2:.6f}: fidelity {target_fidelity:.12f}, "
        f"phase mismatch {details['branch_phase_mismatch']:.2e}"
    )
    return ProtocolReport(
        protocol_name="transfer",
        params=params,
        schedule=[("prepare", 0.0), ("evolve_cavities", t)],
        final_states={"target_34": target},
        final_densities={"atoms_12_initial": before, "atoms_34": after},
        figures_of_merit=figures,
        details=details,
    )


def apply_damping(state: QuantumState, gamma: float, elapsed: float) -> Tuple[QuantumState, float]:
    """
    Damp every component except the all-ground vacuum |0>(-1,-1) by exp(-gamma t / 2).

    Returns:
        (renormalized state, survival probability)
    """
    if gamma < 0 or elapsed < 0:
        raise ValueError("Damping rate and elapsed time cannot be negative")
    ground = BasisState(0, -1, -1)
    decay = np.exp(-gamma * elapsed / 2.0)
    factors = np.array([1.0 if s == ground else decay for s in state.basis])
    damped = state.amplitudes * factors
    survival = float(np.sum(np.abs(damped) ** 2))
    return QuantumState.normalized(state.basis, damped), min(survival, 1.0)


def _recompute(report: ProtocolReport, name: str) -> Optional[float]:
    states, densities = report.final_states, report.final_densities
    if name == "success_probability" and "evolved" in states:
        return photon_statistics(states["evolved"]).get(1, 0.0)
    if name == "fidelity_to_target":
        if "conditional_photon1" in states and "target" in states:
            return fidelity(states["conditional_photon1"], states["target"])
        if "atoms_34" in densities and "target_34" in states:
            return fidelity_to_pure(densities["atoms_34"], atomic_product_vector(states["target_34"]))
        if "output" in states and "expected" in states:
            return fidelity(states["output"], states["expected"])
    if name == "negativity" and "conditional_photon1" in states:
        return negativity(atomic_density(states["conditional_photon1"]))
    if name == "negativity_photon0" and "conditional_photon0" in states:
        return negativity(atomic_density(states["conditional_photon0"]))
    if name == "negativity_after" and "atoms_34" in densities:
        return negativity(densities["atoms_34"])
    if name == "negativity_before" and "atoms_12_initial" in densities:
        return negativity(densities["atoms_12_initial"])
    if name == "purity_after" and "atoms_34" in densities:
        return densities["atoms_34"].purity()
    return None


def audit_report(report: ProtocolReport, tolerance: float = AUDIT_TOLERANCE) -> Dict[str, float]:
    """
    Recompute each figure of merit from the recorded final states.

    Returns:
        Absolute deviation per recomputable figure; figures that depend on
        more than the recorded states are skipped
    """
    deviations = {}
    for name, value in report.figures_of_merit.items():
        recomputed = _recompute(report, name)
        if recomputed is None:
            continue
        deviations[name] = abs(recomputed - value)
        if deviations[name] > tolerance:
            logger.warning(f"Audit of {report.protocol_name}: '{name}' deviates by {deviations[name]:.3e}")
    return deviations


def random_coefficients(count: int, seed: int) -> List[Tuple[complex, complex]]:
    """Seeded Haar-random normalized (c1, c2) pairs."""
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        z /= np.linalg.norm(z)
        pairs.append((complex(z[0]), complex(z[1])))
    return pairs
