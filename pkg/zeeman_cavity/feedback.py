"""
Closed-loop calibration of the coupling constant.

Each cycle generates an EPR pair with times scheduled from the estimated g,
transfers it onto a probe pair, compares the probe state with the
prediction for candidate couplings and corrects the estimate. The true
coupling then drifts.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .config import DriftModel, PhysicalParams
from .measurement import (
    atomic_product_vector,
    fidelity_to_pure,
    measure_photons,
    outcome_for,
    partial_trace,
)
from .models import BasisState, DensityMatrix, ProtocolReport, QuantumState
from .dynamics import evolve
from .protocols import (
    ATOMS_34,
    EPR_INITIAL,
    TRANSFER_DIMS,
    TRANSFER_NAMES,
    apply_damping,
    atoms_34_target,
    epr_generate,
    epr_time,
    exchange_time,
    transfer,
    transfer_evolve,
)
from .state_space import sector_basis

logger = logging.getLogger(__name__)

DEFAULT_BRACKET = 0.05
DEFAULT_RESOLUTION = 1e-4
DEFAULT_GRID_POINTS = 11

_EXCITED_FIRST = BasisState(0, 0, -1)
_EXCITED_SECOND = BasisState(0, -1, 0)


def probe_target() -> np.ndarray:
    """EPR target for atoms (3, 4) in tensor order."""
    return atomic_product_vector(atoms_34_target(1.0 / np.sqrt(2.0), -1.0 / np.sqrt(2.0)))


@dataclass
class PipelineResult:
    """State of the EPR + transfer pipeline for one coupling and schedule."""
    evolved: QuantumState
    conditional: QuantumState
    rho_34: DensityMatrix
    success_probability: float
    survival_probability: float = 1.0

    @property
    def coefficients(self) -> Tuple[complex, complex]:
        return self.conditional.amplitude(_EXCITED_FIRST), self.conditional.amplitude(_EXCITED_SECOND)


def run_pipeline(g: float, t_epr: float, t_transfer: float, params: PhysicalParams,
                 gamma: float = 0.0) -> PipelineResult:
    """
    EPR evolution, one-photon post-selection and transfer with coupling g.

    With gamma > 0 both stages are damped for their duration and the
    product of the survival probabilities is recorded.
    """
    true_params = params.with_g(g)
    sector = sector_basis(0)
    evolved = evolve(QuantumState.basis_vector(sector.basis, EPR_INITIAL), t_epr, true_params)
    survival = 1.0
    if gamma > 0:
        evolved, survival = apply_damping(evolved, gamma, t_epr)
    one_photon = outcome_for(measure_photons(evolved), 1)
    if one_photon is None:
        raise ValueError(f"No one-photon outcome at t={t_epr}; EPR post-selection impossible")
    conditional = one_photon.conditional_state
    if gamma > 0:
        conditional, transfer_survival = apply_damping(conditional, gamma, t_transfer)
        survival *= transfer_survival

    c1, c2 = conditional.amplitude(_EXCITED_FIRST), conditional.amplitude(_EXCITED_SECOND)
    _, final = transfer_evolve(c1, c2, t_transfer, true_params)
    rho_34 = partial_trace(final, TRANSFER_DIMS, ATOMS_34, TRANSFER_NAMES)
    return PipelineResult(evolved, conditional, rho_34, one_photon.probability, survival)


def normalized_overlap(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Tr(rho sigma) / sqrt(Tr rho^2 Tr sigma^2); 1 iff the two states coincide."""
    cross = float(np.real(np.trace(rho.entries @ sigma.entries)))
    return cross / np.sqrt(rho.purity() * sigma.purity())


class CouplingController:
    """
    Estimates the coupling from the probe-pair state.

    The update is a coarse-to-fine coordinate search over a bracket around
    the current estimate, minimizing 1 - normalized_overlap between the
    predicted and the measured probe state.
    """

    def __init__(self, g_estimate: float, params: PhysicalParams, n_period: int = 1,
                 bracket: float = DEFAULT_BRACKET, resolution: float = DEFAULT_RESOLUTION,
                 grid_points: int = DEFAULT_GRID_POINTS):
        if g_estimate <= 0:
            raise ValueError(f"Coupling estimate must be positive, got {g_estimate}")
        if not 0 < bracket < 1:
            raise ValueError(f"Bracket must lie in (0, 1), got {bracket}")
        if grid_points < 3 or grid_points % 2 == 0:
            raise ValueError(f"grid_points must be an odd integer >= 3, got {grid_points}")
        self.g_estimate = float(g_estimate)
        self.params = params
        self.n_period = n_period
        self.bracket = bracket
        self.resolution = resolution
        self.grid_points = grid_points
        self.evaluations = 0

    def schedule(self) -> Tuple[float, float]:
        """(EPR time, transfer time) computed from the current estimate."""
        return epr_time(self.n_period, self.g_estimate), exchange_time(self.n_period, self.g_estimate)

    def objective(self, g_candidate: float, measured: DensityMatrix, times: Tuple[float, float]) -> float:
        self.evaluations += 1
        predicted = run_pipeline(g_candidate, times[0], times[1], self.params).rho_34
        return 1.0 - normalized_overlap(predicted, measured)

    def update(self, measured: DensityMatrix, times: Tuple[float, float]) -> float:
        """Refine the estimate against a measured probe state taken with ``times``."""
        center = self.g_estimate
        half_points = (self.grid_points - 1) // 2
        step = self.bracket * self.g_estimate / half_points
        best_value = self.objective(center, measured, times)

        while True:
            offsets = step * np.arange(-half_points, half_points + 1)
            candidates = [center + offset for offset in offsets if offset != 0.0]
            for candidate in candidates:
                value = self.objective(candidate, measured, times)
                if value < best_value:
                    center, best_value = candidate, value
            if step < self.resolution * self.g_estimate:
                break
            step = 2.0 * step / (self.grid_points - 1)

        logger.info(
            f"Controller update: g {self.g_estimate:.8f} -> {center:.8f} "
            f"(residual {best_value:.3e}, {self.evaluations} evaluations)"
        )
        self.g_estimate = center
        return center


def feedback_cycle(cycles: int, drift: DriftModel, params: PhysicalParams,
                   n_period: int = 1) -> List[ProtocolReport]:
    """
    Run the calibration loop for ``cycles`` rounds.

    Per cycle the probe is taken with the drifting true coupling while the
    controller schedules with its estimate; after the correction the pipeline
    is rerun with the new schedule and its fidelity reported. Drift is a
    seeded +/- g_drift_rate relative step applied after each cycle.
    """
    if cycles < 1:
        raise ValueError(f"cycles must be at least 1, got {cycles}")
    rng = np.random.default_rng(drift.seed)
    controller = CouplingController(params.g, params, n_period)
    target = probe_target()
    g_true = params.g
    reports = []

    for cycle in range(1, cycles + 1):
        t_epr, t_transfer = controller.schedule()
        true_params = params.with_g(g_true)
        epr = epr_generate(n_period, true_params, t=t_epr)
        measured = run_pipeline(g_true, t_epr, t_transfer, params, gamma=drift.damping_gamma)
        c1, c2 = measured.coefficients
        probe = transfer(c1, c2, n_period, true_params, t=t_transfer)
        fidelity_before = fidelity_to_pure(measured.rho_34, target)

        estimate_before = controller.g_estimate
        estimate_after = controller.update(measured.rho_34, (t_epr, t_transfer))
        t_epr_after, t_transfer_after = controller.schedule()
        corrected = run_pipeline(g_true, t_epr_after, t_transfer_after, params)
        fidelity_after = fidelity_to_pure(corrected.rho_34, target)

        logger.info(
            f"Cycle {cycle}/{cycles}: g_true={g_true:.8f}, fidelity {fidelity_before:.6f} -> {fidelity_after:.6f}"
        )
        reports.append(ProtocolReport(
            protocol_name="feedback_cycle",
            params=true_params,
            schedule=[("epr", t_epr), ("transfer", t_epr + t_transfer)],
            final_states={"conditional_photon1": measured.conditional},
            final_densities={"atoms_34": measured.rho_34, "atoms_34_corrected": corrected.rho_34},
            figures_of_merit={
                "success_probability": epr.figures_of_merit["success_probability"],
                "fidelity_before_correction": fidelity_before,
                "fidelity_after_correction": fidelity_after,
                "fidelity_transfer": probe.figures_of_merit["fidelity_to_target"],
                "survival_probability": measured.survival_probability,
            },
            details={
                "cycle": cycle,
                "g_true": g_true,
                "g_estimate_before": estimate_before,
                "g_estimate_after": estimate_after,
                "estimate_relative_error": abs(estimate_after - g_true) / g_true,
                "elapsed_time": t_epr + t_transfer,
            },
            seed=drift.seed,
        ))
        g_true *= 1.0 + drift.g_drift_rate * float(rng.choice((-1.0, 1.0)))

    return reports
