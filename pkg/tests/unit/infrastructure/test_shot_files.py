"""
Unit tests for shot-file ingestion and export.
"""

import pytest

from src.domain.entities.distributions import ShotCounts
from src.infrastructure.persistence.shot_files import detect_format, read_shot_file, write_counts_file
from src.shared.errors import ShotFileError, ValidationError


class TestReadShotFile:
    """Test the two shot-file grammars."""

    def test_lines_format(self, tmp_path):
        """Test one bitstring per line, blank lines skipped."""
        path = tmp_path / "shots.txt"
        path.write_text("0110\n\n0110\n1001\n")

        counts = read_shot_file(path)

        assert counts.as_text_dict() == {"0110": 2, "1001": 1}
        assert counts.n_atoms == 4

    def test_counts_format_with_header(self, tmp_path):
        """Test CSV records with an optional header line."""
        path = tmp_path / "shots.csv"
        path.write_text("bitstring,count\n0110,2\n1001, 1\n")

        counts = read_shot_file(path)

        assert counts.as_text_dict() == {"0110": 2, "1001": 1}

    def test_formats_are_equivalent(self, tmp_path):
        """Test a counts file matches its expanded per-line form."""
        lines = tmp_path / "shots.txt"
        lines.write_text("".join(["01\n"] * 3 + ["10\n"] * 5))
        table = tmp_path / "shots.csv"
        table.write_text("01,3\n10,5\n")

        assert read_shot_file(lines).as_text_dict() == read_shot_file(table).as_text_dict()

    def test_repeated_count_records_accumulate(self, tmp_path):
        """Test the same bitstring on two records adds up."""
        path = tmp_path / "shots.csv"
        path.write_text("01,3\n01,4\n")

        assert read_shot_file(path).as_text_dict() == {"01": 7}

    def test_malformed_line_reports_line_number(self, tmp_path):
        """Test the error names the file and 1-based line."""
        path = tmp_path / "shots.txt"
        path.write_text("0110\n0110\n01x0\n")

        with pytest.raises(ShotFileError) as excinfo:
            read_shot_file(path)

        assert excinfo.value.line == 3
        assert f"{path}:3:" in str(excinfo.value)
        assert excinfo.value.exit_code == 2

    def test_inconsistent_length(self, tmp_path):
        """Test bitstrings must all have the same length."""
        path = tmp_path / "shots.txt"
        path.write_text("0110\n011\n")

        with pytest.raises(ShotFileError) as excinfo:
            read_shot_file(path)

        assert excinfo.value.line == 2

    def test_expected_atoms_mismatch(self, tmp_path):
        """Test the configured ladder size is enforced."""
        path = tmp_path / "shots.txt"
        path.write_text("0110\n")

        with pytest.raises(ShotFileError):
            read_shot_file(path, expected_atoms=12)

    def test_empty_file(self, tmp_path):
        """Test a file without records is rejected."""
        path = tmp_path / "shots.txt"
        path.write_text("\n\n")

        with pytest.raises(ShotFileError):
            read_shot_file(path)

    def test_zero_count(self, tmp_path):
        """Test counts must be positive."""
        path = tmp_path / "shots.csv"
        path.write_text("01,0\n")

        with pytest.raises(ShotFileError):
            read_shot_file(path, "counts")

    def test_missing_file(self, tmp_path):
        """Test a missing file is a shot-file error."""
        with pytest.raises(ShotFileError):
            read_shot_file(tmp_path / "absent.txt", "lines")

    def test_missing_file_with_auto_format(self, tmp_path):
        """Test format detection does not bypass the missing-file error."""
        with pytest.raises(ShotFileError, match="file not found"):
            read_shot_file(tmp_path / "absent.txt")

    def test_invalid_utf8_reports_line(self, tmp_path):
        """Test undecodable bytes are a shot-file error on their line."""
        path = tmp_path / "shots.txt"
        path.write_bytes(b"01\n\xff\xfe\n")

        with pytest.raises(ShotFileError) as excinfo:
            read_shot_file(path)

        assert excinfo.value.line == 2
        assert ":2:" in str(excinfo.value)

    def test_unknown_format(self, tmp_path):
        """Test only lines, counts and auto are accepted."""
        path = tmp_path / "shots.txt"
        path.write_text("01\n")

        with pytest.raises(ValidationError):
            read_shot_file(path, "hdf5")

    def test_detect_format(self, tmp_path):
        """Test auto-detection from the first non-blank line."""
        lines = tmp_path / "a.txt"
        lines.write_text("\n0101\n")
        table = tmp_path / "b.csv"
        table.write_text("0101,4\n")

        assert detect_format(lines) == "lines"
        assert detect_format(table) == "counts"


class TestWriteCountsFile:
    """Test exporting counts."""

    def test_written_file_reads_back(self, tmp_path):
        """Test the exported counts file is valid input."""
        counts = ShotCounts.from_mapping({"0011": 4, "1100": 6})

        path = write_counts_file(tmp_path / "out" / "counts.csv", counts)

        assert path.read_text().splitlines()[0] == "bitstring,count"
        assert read_shot_file(path).as_text_dict() == {"0011": 4, "1100": 6}
