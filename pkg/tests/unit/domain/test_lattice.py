"""
Unit tests for ladder geometry and van der Waals couplings.
"""

import math

import numpy as np
import pytest

from src.domain.entities.ladder import CouplingTable
from src.domain.services.lattice import build_ladder, couplings, physical_spacing_um
from src.shared.errors import ValidationError


class TestBuildLadder:
    """Test ladder construction."""

    def test_single_rung_positions(self):
        """Test a single rung holds two atoms a_y = 2a apart."""
        geom = build_ladder(1)

        assert geom.n_atoms == 2
        assert geom.positions == ((0.0, 0.0), (0.0, 2.0))

    def test_rung_major_numbering(self):
        """Test atom i sits on rung i // 2 and leg i % 2."""
        geom = build_ladder(3)

        assert geom.n_atoms == 6
        for atom, (x, y) in enumerate(geom.positions):
            assert x == geom.rung_of(atom) == atom // 2
            assert y == 2.0 * geom.leg_of(atom)

    @pytest.mark.parametrize("n_rungs", [0, -1, 2.5, True])
    def test_rejects_invalid_rung_count(self, n_rungs):
        """Test non-positive or non-integer rung counts are rejected."""
        with pytest.raises(ValidationError):
            build_ladder(n_rungs)

    def test_distances(self):
        """Test pair distances along legs, rungs and diagonals."""
        d = build_ladder(2).distances()

        assert d[0, 1] == pytest.approx(2.0)
        assert d[0, 2] == pytest.approx(1.0)
        assert d[0, 3] == pytest.approx(math.sqrt(5.0))
        assert np.all(np.diag(d) == 0.0)

    def test_as_report_keys_are_atom_indices(self):
        """Test geometry report maps atom index text to coordinates."""
        report = build_ladder(2).as_report()

        assert list(report) == ["0", "1", "2", "3"]
        assert report["3"] == [1.0, 2.0]


class TestCouplings:
    """Test the all-pairs coupling table."""

    def test_values_follow_inverse_sixth_power(self):
        """Test V_ij = (R_b/a)^6 / d_ij^6 on every pair type."""
        rb = 2.35
        table = couplings(build_ladder(2), rb)

        assert table.v[0, 2] == pytest.approx(rb**6)
        assert table.v[0, 1] == pytest.approx((rb / 2.0) ** 6)
        assert table.v[0, 3] == pytest.approx(rb**6 / 125.0)

    def test_table_is_symmetric_with_zero_diagonal(self):
        """Test symmetry, zero diagonal and read-only storage."""
        table = couplings(build_ladder(4), 1.75)

        assert np.array_equal(table.v, table.v.T)
        assert np.all(np.diag(table.v) == 0.0)
        assert not table.v.flags.writeable

    def test_no_interaction_cutoff(self):
        """Test the most distant pair still couples."""
        table = couplings(build_ladder(6), 2.35)

        assert table.v[0, 11] > 0.0

    @pytest.mark.parametrize("rb", [0.0, -1.0, float("nan")])
    def test_rejects_nonpositive_radius(self, rb):
        """Test invalid blockade radii are rejected."""
        with pytest.raises(ValidationError):
            couplings(build_ladder(1), rb)

    def test_coupling_table_rejects_asymmetric_matrix(self):
        """Test hand-built tables are validated."""
        v = np.array([[0.0, 1.0], [2.0, 0.0]])

        with pytest.raises(ValidationError):
            CouplingTable(rb_over_a=1.0, v=v)


class TestPhysicalSpacing:
    """Test physical unit conversion."""

    def test_spacing_from_blockade_radius(self):
        """Test a = R_b / (R_b/a)."""
        assert physical_spacing_um(2.5, 8.375) == pytest.approx(3.35)

    def test_rejects_zero_ratio(self):
        """Test zero ratio is rejected."""
        with pytest.raises(ValidationError):
            physical_spacing_um(0.0, 8.375)
