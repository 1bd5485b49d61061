"""
Shot-file ingestion and export.

Two formats are understood:
  lines  - one bitstring per line, characters 0/1, atom 0 first
  counts - CSV records "bitstring,count", optional "bitstring,count" header
Blank lines are skipped in both.
"""

from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

from src.domain.entities.distributions import ShotCounts
from src.infrastructure.persistence.files import write_csv
from src.shared.errors import ShotFileError, ValidationError
from src.shared.utils.bitstrings import BITSTRING_PATTERN, MAX_BITSTRING_ATOMS, parse_count_line

ShotFormat = Literal["lines", "counts", "auto"]
COUNTS_HEADER = "bitstring,count"


def _read_lines(path: Path) -> List[Tuple[int, str]]:
    """Numbered, stripped, non-blank lines; decoding is checked line by line."""
    source = str(path)
    try:
        raw = Path(path).read_bytes()
    except FileNotFoundError as exc:
        raise ShotFileError("file not found", path=source) from exc
    except OSError as exc:
        raise ShotFileError(f"cannot read file: {exc.strerror}", path=source) from exc

    lines: List[Tuple[int, str]] = []
    for number, chunk in enumerate(raw.splitlines(), start=1):
        try:
            text = chunk.decode("utf-8").strip()
        except UnicodeDecodeError as exc:
            raise ShotFileError("line is not valid UTF-8 text", path=source, line=number) from exc
        if text:
            lines.append((number, text))
    return lines


def _detect(lines: List[Tuple[int, str]]) -> str:
    return "counts" if lines and "," in lines[0][1] else "lines"


def detect_format(path: Path) -> str:
    return _detect(_read_lines(path))


def read_shot_file(path: Path, fmt: ShotFormat = "auto", expected_atoms: Optional[int] = None) -> ShotCounts:
    """
    Parse a shot file into aggregated counts.

    Raises:
        ShotFileError: malformed line (with its line number), inconsistent
            or unexpected bitstring length, or no records at all
    """
    source = str(path)
    lines = _read_lines(Path(path))
    if fmt == "auto":
        fmt = _detect(lines)  # type: ignore[assignment]
    if fmt not in ("lines", "counts"):
        raise ValidationError(f"unknown shot-file format {fmt!r}")

    tallies: Dict[str, int] = {}
    n_atoms = expected_atoms
    for number, text in lines:
        if fmt == "counts":
            if number == 1 and text.replace(" ", "").lower() == COUNTS_HEADER:
                continue
            record = parse_count_line(text)
            if record is None:
                raise ShotFileError(f"expected 'bitstring,count', got {text!r}", path=source, line=number)
            bitstring, count = record
            if count < 1:
                raise ShotFileError(f"count must be at least 1, got {count}", path=source, line=number)
        else:
            if not BITSTRING_PATTERN.match(text):
                raise ShotFileError(f"invalid bitstring {text!r}", path=source, line=number)
            bitstring, count = text, 1

        if len(bitstring) > MAX_BITSTRING_ATOMS:
            raise ShotFileError(f"bitstring longer than {MAX_BITSTRING_ATOMS} atoms", path=source, line=number)
        if n_atoms is None:
            n_atoms = len(bitstring)
        elif len(bitstring) != n_atoms:
            raise ShotFileError(
                f"bitstring has {len(bitstring)} atoms, expected {n_atoms}", path=source, line=number
            )
        tallies[bitstring] = tallies.get(bitstring, 0) + count

    if not tallies:
        raise ShotFileError("no shot records found", path=source)
    return ShotCounts.from_mapping(tallies)


def write_counts_file(path: Path, counts: ShotCounts) -> Path:
    rows = sorted(counts.as_text_dict().items())
    return write_csv(Path(path), ["bitstring", "count"], rows)
