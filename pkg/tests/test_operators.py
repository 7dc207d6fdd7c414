"""
Unit tests for ladder operators, the full Hamiltonian and the sector blocks.
"""

import pytest
import sys
import os

import numpy as np

# Add the parent directory to the path so we can import the package
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from zeeman_cavity.config import PhysicalParams
from zeeman_cavity.errors import InvalidAtomLevelError, OffResonanceError
from zeeman_cavity.models import BasisState
from zeeman_cavity.operators import (
    atomic_raising,
    annihilation,
    commutator,
    conserved_number_operator,
    hamiltonian_full,
    interaction_block,
    ladder_minus,
    ladder_plus,
    lz,
)
from zeeman_cavity.state_space import conserved_number, full_basis, sector_basis


class TestLadderOperators:
    """Test the atomic ladder operators."""

    def test_raising_has_two_unit_entries(self):
        raising = atomic_raising()
        assert np.count_nonzero(raising) == 2
        assert np.sum(raising) == 2

    def test_raising_moves_down_to_mid(self):
        plus = ladder_plus(1)
        assert plus.element(BasisState(0, 0, -1), BasisState(0, -1, -1)) == 1.0

    def test_raising_annihilates_top(self):
        plus = ladder_plus(2)
        column = plus.entries[:, plus.basis.index(BasisState(0, -1, 1))]
        assert not np.any(column)

    def test_lowering_is_adjoint(self):
        np.testing.assert_array_equal(ladder_minus(1, 2).entries, ladder_plus(1, 2).entries.conj().T)

    def test_invalid_atom(self):
        with pytest.raises(InvalidAtomLevelError):
            ladder_plus(3)

    def test_lz_diagonal(self):
        operator = lz(2)
        for i, s in enumerate(operator.basis):
            assert operator.entries[i, i] == int(s.m2)

    def test_annihilation_element(self):
        a = annihilation(2)
        assert a.element(BasisState(1, 0, 0), BasisState(2, 0, 0)) == pytest.approx(np.sqrt(2))


class TestHamiltonianFull:
    """Test hamiltonian_full."""

    def setup_method(self):
        self.params = PhysicalParams(g=0.7, alpha=0.05, beta=1.3, omega=1.3)

    def test_coupling_element(self):
        h = hamiltonian_full(self.params, 2)
        assert h.element(BasisState(0, 0, -1), BasisState(1, -1, -1)) == pytest.approx(0.7)

    def test_hermitian(self):
        h = hamiltonian_full(PhysicalParams(g=1.1, alpha=0.2, beta=0.4, omega=2.0), 4)
        assert h.is_hermitian(1e-13)

    def test_commutes_with_conserved_number(self):
        h = hamiltonian_full(PhysicalParams(g=1.1, alpha=0.2, beta=0.4, omega=2.0), 3)
        n = conserved_number_operator(h.basis)
        assert np.max(np.abs(commutator(h, n))) < 1e-13

    def test_off_block_entries_are_zero(self):
        h = hamiltonian_full(self.params, 3)
        for i, row in enumerate(h.basis):
            for j, col in enumerate(h.basis):
                if conserved_number(row) != conserved_number(col):
                    assert h.entries[i, j] == 0

    def test_zero_coupling_is_diagonal(self):
        params = PhysicalParams(g=1e-300, alpha=0.3, beta=0.5, omega=1.7)
        h = hamiltonian_full(params, 2)
        expected = [1.7 * s.photons + 0.5 * (s.m1 + s.m2) + 0.3 * s.m1 * s.m2 for s in h.basis]
        np.testing.assert_allclose(np.diag(h.entries).real, expected, atol=1e-12)
        off_diagonal = h.entries - np.diag(np.diag(h.entries))
        assert np.max(np.abs(off_diagonal)) < 1e-290

    def test_cap_too_small(self):
        with pytest.raises(ValueError, match="photon_cap"):
            hamiltonian_full(self.params, 1)

    def test_custom_raising_hook(self):
        raising = np.zeros((3, 3), dtype=complex)
        raising[2, 0] = 1.0
        h = hamiltonian_full(PhysicalParams(), 2, raising=raising)
        assert h.element(BasisState(0, 1, -1), BasisState(1, -1, -1)) == pytest.approx(1.0)
        n = conserved_number_operator(h.basis)
        assert np.max(np.abs(commutator(h, n))) > 0.5

    def test_block_matches_interaction_block_plus_free_part(self):
        params = PhysicalParams(g=0.9, alpha=0.1, beta=1.5, omega=1.5)
        h = hamiltonian_full(params, 4)
        for n in (-2, -1, 0, 1, 2):
            basis = sector_basis(n).basis
            idx = [h.basis.index(s) for s in basis]
            block = h.entries[np.ix_(idx, idx)]
            expected = interaction_block(n, params).entries + params.omega * n * np.eye(len(basis))
            np.testing.assert_allclose(block, expected, atol=1e-13)


class TestInteractionBlock:
    """Test interaction_block."""

    def test_sector_zero_pattern(self):
        block = interaction_block(0, PhysicalParams(g=1.0)).entries
        assert np.all(np.diag(block) == 0)
        assert block[0, 1] == pytest.approx(np.sqrt(2))
        assert block[0, 2] == pytest.approx(np.sqrt(2))
        assert block[1, 3] == pytest.approx(1.0)
        assert block[1, 4] == pytest.approx(1.0)
        assert block[2, 4] == pytest.approx(1.0)
        assert block[2, 5] == pytest.approx(1.0)

    def test_sector_zero_spectrum(self):
        block = interaction_block(0, PhysicalParams(g=2.0)).entries
        spectrum = np.sort(np.linalg.eigvalsh(block))
        expected = np.sort([-2 * np.sqrt(7), -2, 0, 0, 2, 2 * np.sqrt(7)])
        np.testing.assert_allclose(spectrum, expected, atol=1e-12)
        assert np.trace(block) == pytest.approx(0)
        assert np.sum(np.abs(block) ** 2) == pytest.approx(16 * 4.0)

    def test_sector_minus_one(self):
        block = interaction_block(-1, PhysicalParams(g=0.5)).entries
        np.testing.assert_allclose(block, [[0, 0.5, 0.5], [0.5, 0, 0], [0.5, 0, 0]])
        spectrum = np.sort(np.linalg.eigvalsh(block))
        np.testing.assert_allclose(spectrum, [-0.5 * np.sqrt(2), 0, 0.5 * np.sqrt(2)], atol=1e-12)

    def test_sector_minus_two(self):
        block = interaction_block(-2, PhysicalParams(alpha=0.25)).entries
        np.testing.assert_allclose(block, [[0.25]])

    def test_nine_by_nine_diagonal_carries_alpha(self):
        n = 3
        block = interaction_block(n, PhysicalParams(alpha=0.4))
        for i, s in enumerate(block.basis):
            assert block.entries[i, i] == pytest.approx(0.4 * s.m1 * s.m2)
        assert block.entries[0, 1] == pytest.approx(np.sqrt(n + 2))

    def test_off_resonance_rejected(self):
        with pytest.raises(OffResonanceError, match="hamiltonian_full"):
            interaction_block(0, PhysicalParams(beta=1.0, omega=1.2))

    def test_full_basis_covers_blocks(self):
        assert set(sector_basis(0).basis) <= set(full_basis(2))
