"""
Unit tests for the pipelines behind the CLI subcommands.
"""

import math

import pytest

from src.application.use_cases import pipelines
from src.application.use_cases.pipelines import LadderPipeline, bipartition_for, check_capability, grid_for
from src.domain.entities.distributions import ShotCounts
from src.domain.services import hamiltonian
from src.infrastructure.persistence.shot_files import write_counts_file
from src.shared.errors import CapabilityError, ValidationError


class TestCapability:
    """Test the exact-solve ceiling."""

    def test_refuses_above_ceiling(self, fast_config):
        """Test 24 atoms exceed the default 22-atom ceiling."""
        with pytest.raises(CapabilityError):
            check_capability(fast_config.with_updates(n_rungs=12))

    def test_allow_large_lifts_ceiling(self, fast_config):
        """Test the explicit acknowledgement flag."""
        check_capability(fast_config.with_updates(n_rungs=12, allow_large=True))

    def test_refusal_happens_before_solving(self, fast_config, mocker):
        """Test no solve is attempted for a refused size."""
        solve = mocker.patch.object(hamiltonian, "ground_state")

        with pytest.raises(CapabilityError):
            LadderPipeline().sweep_volume(fast_config, [2, 11, 12])

        solve.assert_not_called()


class TestSolve:
    """Test cached ground-state solves."""

    def test_second_solve_hits_cache(self, fast_config, mocker):
        """Test the cache makes a repeated solve skip the eigensolver."""
        spy = mocker.spy(hamiltonian, "ground_state")
        pipeline = LadderPipeline()

        first = pipeline.solve(fast_config)
        second = pipeline.solve(fast_config)

        assert spy.call_count == 1
        assert first.cache_path == second.cache_path
        assert first.cache_path.exists()
        assert second.state.energy == first.state.energy

    def test_no_cache_always_solves(self, fast_config, mocker):
        """Test use_cache=False never touches the cache directory."""
        spy = mocker.spy(hamiltonian, "ground_state")
        pipeline = LadderPipeline(use_cache=False)

        pipeline.solve(fast_config)
        result = pipeline.solve(fast_config)

        assert spy.call_count == 2
        assert result.cache_path is None
        assert not fast_config.cache_dir.exists()

    def test_summary_has_entropy(self, fast_config):
        """Test the configured cut's S^vN is reported."""
        result = LadderPipeline().solve(fast_config)

        assert result.s_vn >= 0.0
        assert result.s_vn <= 2 * math.log(2.0) + 1e-12
        assert result.geometry.n_atoms == 4


class TestEstimate:
    """Test the estimate pipelines."""

    def test_exact_estimate(self, fast_config):
        """Test exact runs carry the state and filtered S^vN."""
        result = LadderPipeline().estimate(fast_config)

        assert result.report.curve.source == "exact"
        assert result.report.reference_svn == pytest.approx(LadderPipeline().solve(fast_config).s_vn)
        assert result.report.curve.points[0].filtered_svn is not None
        assert result.grid.size == fast_config.grid_points + 1

    def test_sampled_estimate(self, fast_config):
        """Test --shots switches to the empirical pipeline with the exact S^vN as reference."""
        config = fast_config.with_updates(shots=5000)

        result = LadderPipeline().estimate(config)

        assert result.report.curve.source == "empirical"
        assert result.report.curve.n_shots == 5000
        assert result.report.reference_svn is not None
        assert result.report.curve.points[0].filtered_svn is None
        assert result.provenance["sampled_shots"] == 5000

    def test_min_count_rejected_on_exact_path(self, fast_config, mocker):
        """Test a count filter without shots is an error, not silently ignored."""
        solve = mocker.spy(hamiltonian, "ground_state")

        with pytest.raises(ValidationError, match="min_count"):
            LadderPipeline().estimate(fast_config.with_updates(min_count=10))

        solve.assert_not_called()

    def test_min_count_applies_to_sampled_shots(self, fast_config):
        """Test the count filter shrinks the sampled shot total."""
        result = LadderPipeline().estimate(fast_config.with_updates(shots=200, min_count=2))

        assert 0 < result.report.curve.n_shots <= 200
        assert result.report.curve.source == "empirical"

    def test_sampled_estimate_is_reproducible(self, fast_config):
        """Test the same seed gives the same empirical curve."""
        config = fast_config.with_updates(shots=2000, seed=7)

        first = LadderPipeline().estimate(config)
        second = LadderPipeline().estimate(config)

        assert list(first.report.curve.mutual_information) == list(second.report.curve.mutual_information)

    def test_ingest_with_min_count(self, fast_config, tmp_path):
        """Test the count filter drops rare bitstrings before the sweep."""
        path = write_counts_file(
            tmp_path / "shots.csv", ShotCounts.from_mapping({"1001": 60, "0110": 35, "0000": 5})
        )
        config = fast_config.with_updates(min_count=10)

        result = LadderPipeline().ingest(path, "auto", config)

        assert result.report.curve.n_shots == 95
        assert result.report.reference_svn is None
        assert result.state is None
        assert result.provenance["shot_file"] == str(path)

    def test_ingest_length_mismatch(self, fast_config, tmp_path):
        """Test shot files must match the configured ladder."""
        path = tmp_path / "shots.txt"
        path.write_text("010\n")

        with pytest.raises(ValidationError):
            LadderPipeline().ingest(path, "lines", fast_config)

    def test_schema_embeds_config(self, fast_config):
        """Test reports carry the resolved config and grid."""
        schema = LadderPipeline().estimate(fast_config).to_schema()

        assert schema.config["n_rungs"] == 2
        assert len(schema.grid) == fast_config.grid_points + 1
        assert schema.ground_state is not None


class TestSweeps:
    """Test sweep drivers."""

    def test_sweep_spacing_order(self, fast_config):
        """Test one result per value, in input order."""
        results = LadderPipeline().sweep_spacing(fast_config.with_updates(workers=2), [2.35, 1.0, 1.5])

        assert [result.config.rb_over_a for result in results] == [2.35, 1.0, 1.5]

    def test_single_value_sweep_matches_estimate(self, fast_config):
        """Test a one-element sweep is the plain estimate."""
        swept = LadderPipeline().sweep_spacing(fast_config, [fast_config.rb_over_a])[0]
        single = LadderPipeline().estimate(fast_config)

        assert swept.report.i_unfiltered == single.report.i_unfiltered

    def test_bipartition_symmetry(self, fast_config):
        """Test I and S^vN agree for |A| = k and N - k on the inversion-symmetric ladder."""
        config = fast_config.with_updates(n_rungs=3)

        results = LadderPipeline().sweep_bipartition(config, [1, 5, 2, 4])
        values = {result.config.resolved_size_a: result.report for result in results}

        for k in (1, 2):
            assert values[k].i_unfiltered == pytest.approx(values[6 - k].i_unfiltered, abs=1e-9)
            assert values[k].reference_svn == pytest.approx(values[6 - k].reference_svn, abs=1e-9)

    def test_bipartition_rejects_full_system(self, fast_config):
        """Test size_a = N is invalid."""
        with pytest.raises(ValidationError):
            LadderPipeline().sweep_bipartition(fast_config, [4])

    def test_volume_resets_cut_to_half(self, fast_config):
        """Test each size uses its own half cut."""
        results = LadderPipeline().sweep_volume(fast_config.with_updates(size_a=1), [1, 2])

        assert [bipartition_for(result.config).size_a for result in results] == [1, 2]

    def test_phase_scan_rows(self, fast_config):
        """Test one row per (rb, delta) cell obeying the bound chain."""
        rows = LadderPipeline().phase_scan(fast_config, [1.0, 2.35], [1.0, 3.5])

        assert [(row[0], row[1]) for row in rows] == [(1.0, 1.0), (1.0, 3.5), (2.35, 1.0), (2.35, 3.5)]
        for row in rows:
            s_a, s_b, s_vn, mutual = row[6], row[7], row[8], row[9]
            assert -1e-9 <= mutual <= s_vn + 1e-9
            assert s_vn <= min(s_a, s_b) + 1e-9


class TestSubsample:
    """Test the subsample pipeline."""

    def test_needs_a_pool(self, fast_config):
        """Test a shot file or --shots is required."""
        with pytest.raises(ValidationError):
            LadderPipeline().subsample(fast_config)

    def test_fresh_pool(self, fast_config):
        """Test sampling a pool from the exact state."""
        config = fast_config.with_updates(shots=5000, subsample_size=500, n_subsamples=20)

        errors = LadderPipeline().subsample(config)

        assert errors.n_subsamples == 20
        assert errors.grid.size == grid_for(config).size
        assert errors.std[0] > 0.0


def test_grid_follows_config(fast_config):
    """Test the grid is built from the config exponents."""
    grid = pipelines.grid_for(fast_config.with_updates(grid_points=5, grid_min_exponent=-3.0, grid_max_exponent=-1.0))

    assert grid[0] == 0.0
    assert list(grid[1:]) == pytest.approx([1e-3, 10**-2.5, 1e-2, 10**-1.5, 1e-1])
