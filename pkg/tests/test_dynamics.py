"""
Unit tests for propagators and time evolution.
"""

import pytest
import sys
import os

import numpy as np
from scipy.linalg import expm

# Add the parent directory to the path so we can import the package
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from zeeman_cavity.config import PhysicalParams
from zeeman_cavity.dynamics import (
    alpha_deviation,
    closed_form_errors,
    evolve,
    evolve_unstructured,
    propagator_closed_n0,
    propagator_closed_nm1,
    propagator_full,
    propagator_numeric,
    sector_propagator,
)
from zeeman_cavity.errors import NonHermitianError
from zeeman_cavity.models import BasisState, OperatorMatrix, Picture, QuantumState
from zeeman_cavity.operators import hamiltonian_full, interaction_block
from zeeman_cavity.state_space import conserved_number, full_basis, sector_basis

SQRT7 = np.sqrt(7.0)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def random_state(rng, basis):
    z = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    return QuantumState.normalized(basis, z)


class TestPropagatorNumeric:
    """Test propagator_numeric."""

    def test_zero_time_is_identity(self):
        u = propagator_numeric(interaction_block(0, PhysicalParams()), 0.0)
        np.testing.assert_allclose(u.matrix, np.eye(6), atol=1e-14)

    def test_group_property(self):
        block = interaction_block(1, PhysicalParams(g=0.8, alpha=0.1))
        forward = propagator_numeric(block, 1.7).matrix
        backward = propagator_numeric(block, -1.7).matrix
        np.testing.assert_allclose(forward @ backward, np.eye(8), atol=1e-11)
        split = propagator_numeric(block, 0.6).matrix @ propagator_numeric(block, 1.1).matrix
        np.testing.assert_allclose(split, forward, atol=1e-10)

    def test_matches_expm(self):
        block = interaction_block(2, PhysicalParams(g=1.3, alpha=0.05))
        np.testing.assert_allclose(
            propagator_numeric(block, 2.2).matrix, expm(-1j * block.entries * 2.2), atol=1e-11
        )

    def test_exchange_time_swaps_components(self):
        g = 1.0
        u = propagator_numeric(interaction_block(-1, PhysicalParams(g=g)), np.pi / (np.sqrt(2) * g))
        expected = -np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
        np.testing.assert_allclose(u.matrix, expected, atol=1e-12)

    def test_rejects_non_hermitian(self):
        basis = sector_basis(-1).basis
        entries = np.zeros((3, 3))
        entries[0, 1] = 1.0
        with pytest.raises(NonHermitianError):
            propagator_numeric(OperatorMatrix(basis, entries), 1.0)


class TestClosedForms:
    """Test the transcribed closed-form propagators."""

    def test_n0_first_entry(self):
        t = 0.37
        u = propagator_closed_n0(t, 1.0)
        assert u.matrix[0, 0] == pytest.approx((3 + 4 * np.cos(SQRT7 * t)) / 7)

    def test_nm1_first_entry(self):
        params = PhysicalParams(g=1.0, omega=2.0, beta=2.0)
        u = propagator_closed_nm1(0.9, params)
        assert u.matrix[0, 0] == pytest.approx(np.exp(2j * 0.9) * np.cos(np.sqrt(2) * 0.9))

    def test_identity_at_zero(self):
        np.testing.assert_allclose(propagator_closed_n0(0.0, 1.0).matrix, np.eye(6), atol=1e-15)
        np.testing.assert_allclose(propagator_closed_nm1(0.0, PhysicalParams()).matrix, np.eye(3), atol=1e-15)

    def test_agreement_on_grid(self):
        params = PhysicalParams(g=1.0)
        errors = [closed_form_errors(gt, params) for gt in np.linspace(0, 10, 101)]
        assert max(e[0] for e in errors) < 1e-10
        assert max(e[1] for e in errors) < 1e-10

    def test_agreement_other_coupling(self):
        params = PhysicalParams(g=2.5, omega=0.3, beta=0.3)
        for gt in (0.5, 3.3, 9.9):
            err_n0, err_nm1 = closed_form_errors(gt, params)
            assert err_n0 < 1e-10
            assert err_nm1 < 1e-10


class TestEvolve:
    """Test evolve and the sector structure of the dynamics."""

    def test_epr_period_amplitudes(self):
        params = PhysicalParams(g=1.0)
        basis = sector_basis(0).basis
        state = QuantumState.basis_vector(basis, BasisState(0, 1, -1))
        t = 2 * np.pi / SQRT7
        evolved = evolve(state, t, params)
        c = np.cos(2 * np.pi / SQRT7)
        s = np.sin(2 * np.pi / SQRT7)
        assert evolved.amplitude(BasisState(1, 0, -1)) == pytest.approx(-0.5j * s, abs=1e-10)
        assert evolved.amplitude(BasisState(0, 1, -1)) == pytest.approx(0.5 * (1 + c), abs=1e-10)
        assert evolved.amplitude(BasisState(0, -1, 1)) == pytest.approx(0.5 * (1 - c), abs=1e-10)
        assert abs(evolved.amplitude(BasisState(2, -1, -1))) < 1e-10
        assert 0.5 * (1 + c) == pytest.approx(np.cos(np.pi / SQRT7) ** 2, abs=1e-12)

    def test_norm_preserved(self, rng):
        params = PhysicalParams(g=0.6, alpha=0.02)
        for n in (-1, 0, 1, 3):
            state = random_state(rng, sector_basis(n).basis)
            evolved = evolve(state, float(rng.uniform(0, 20)), params)
            assert evolved.norm() == pytest.approx(1.0, abs=1e-12)

    def test_zero_time_returns_input(self, rng):
        state = random_state(rng, sector_basis(1).basis)
        evolved = evolve(state, 0.0, PhysicalParams())
        np.testing.assert_allclose(evolved.amplitudes, state.amplitudes, atol=1e-14)

    def test_sector_confinement_is_exact(self, rng):
        params = PhysicalParams(g=1.2, alpha=0.1, beta=0.7, omega=0.9)
        basis = full_basis(3)
        amplitudes = np.zeros(len(basis), dtype=complex)
        for i, s in enumerate(basis):
            if conserved_number(s) == 0:
                amplitudes[i] = rng.normal() + 1j * rng.normal()
        state = QuantumState.normalized(basis, amplitudes)
        evolved = evolve(state, 3.1, params)
        for s, amplitude in zip(evolved.basis, evolved.amplitudes):
            if conserved_number(s) != 0:
                assert amplitude == 0

    def test_full_basis_agrees_with_sector_evolution(self, rng):
        params = PhysicalParams(g=0.8, alpha=0.03)
        sector_state = random_state(rng, sector_basis(-1).basis)
        basis = full_basis(2)
        amplitudes = np.zeros(len(basis), dtype=complex)
        for s, amplitude in zip(sector_state.basis, sector_state.amplitudes):
            amplitudes[basis.index(s)] = amplitude
        full_state = QuantumState(basis, amplitudes)
        t = 2.4
        by_sector = evolve(sector_state, t, params)
        by_full = evolve(full_state, t, params)
        for s, amplitude in zip(by_sector.basis, by_sector.amplitudes):
            assert by_full.amplitude(s) == pytest.approx(amplitude, abs=1e-12)

    def test_off_resonant_uses_full_hamiltonian(self):
        params = PhysicalParams(g=1.0, beta=1.0, omega=1.4)
        basis = sector_basis(-1).basis
        state = QuantumState.basis_vector(basis, BasisState(0, 0, -1))
        evolved = evolve(state, 1.3, params)
        h = hamiltonian_full(params, 2)
        idx = [h.basis.index(s) for s in basis]
        expected = expm(-1j * h.entries[np.ix_(idx, idx)] * 1.3) @ state.amplitudes
        np.testing.assert_allclose(evolved.amplitudes, expected, atol=1e-11)

    def test_interaction_picture_drops_free_phase(self):
        params = PhysicalParams(g=1.0, omega=3.0, beta=3.0)
        t = 0.8
        schrodinger = sector_propagator(-1, t, params).matrix
        interaction = sector_propagator(-1, t, params, Picture.INTERACTION).matrix
        np.testing.assert_allclose(schrodinger, np.exp(3j * t) * interaction, atol=1e-13)

    def test_propagator_full_block_structure(self):
        u = propagator_full(PhysicalParams(alpha=0.2), 2, 1.5)
        for i, row in enumerate(u.basis):
            for j, col in enumerate(u.basis):
                if conserved_number(row) != conserved_number(col):
                    assert u.matrix[i, j] == 0

    def test_unstructured_evolution_matches_expm(self, rng):
        raising = np.zeros((3, 3), dtype=complex)
        raising[2, 0] = 1.0
        h = hamiltonian_full(PhysicalParams(), 2, raising=raising)
        state = random_state(rng, h.basis)
        evolved = evolve_unstructured(state, 0.7, h)
        np.testing.assert_allclose(evolved.amplitudes, expm(-0.7j * h.entries) @ state.amplitudes, atol=1e-11)


class TestAlphaDeviation:
    """Test the first-order bound on the dipole-dipole correction."""

    def test_zero_alpha(self):
        assert alpha_deviation(3.0, 1.0, 0.0) == pytest.approx(0.0, abs=1e-14)

    def test_bound_on_grid(self):
        g, alpha = 1.0, 0.01
        for gt in np.linspace(0, 10, 51):
            t = gt / g
            assert alpha_deviation(t, g, alpha) <= 2 * alpha * t + 1e-9
