"""Character-count compression measurements."""

from __future__ import annotations

import math
import statistics
from collections.abc import Iterable
from dataclasses import asdict, dataclass, field

from rcmt.codec import encode
from rcmt.errors import RcmtError
from rcmt.molgraph import ALPHABET_SIZE
from rcmt.sdf import SdfRecord, format_record


@dataclass(frozen=True)
class CompressionReport:
    sdf_chars: int
    rcmt_chars: int
    ratio: float
    rate: float
    n_atoms: int
    n_bonds: int
    name: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CorpusSummary:
    per_molecule: tuple[CompressionReport, ...]
    mean_ratio: float
    median_ratio: float
    mean_rate: float
    failures: tuple[tuple[int, str], ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "per_molecule": [r.to_dict() for r in self.per_molecule],
            "mean_ratio": self.mean_ratio,
            "median_ratio": self.median_ratio,
            "mean_rate": self.mean_rate,
            "failures": [{"record": i, "error": msg} for i, msg in self.failures],
        }


def measure(record: SdfRecord) -> CompressionReport:
    """Compare the record's canonical V2000 text with its compact line.

    The SDF side counts every character of the written record, newlines,
    header and ``$$$$`` included; the compact side is the bare line.
    """
    sdf_chars = len(format_record(record))
    rcmt_chars = len(encode(record.graph))
    return CompressionReport(
        sdf_chars=sdf_chars,
        rcmt_chars=rcmt_chars,
        ratio=sdf_chars / rcmt_chars,
        rate=rcmt_chars / sdf_chars,
        n_atoms=record.graph.n_atoms,
        n_bonds=record.graph.n_bonds,
        name=record.header_lines[0].strip(),
    )


def theoretical_bound(n_atoms, n_bonds, coord_range, delta=1e-4, sigma_size=ALPHABET_SIZE) -> float:
    """Lower bound on the compression ratio as a function of molecule size.

    (3N log10 L + N |S|) / (N (|S| + 3 log10(1/delta)) + |E| log10 4)

    The bound counts symbols in its own units and may fall below 1 or
    below a realized ratio; it is an estimate, not a guarantee.
    """
    for name, value in (("n_atoms", n_atoms), ("coord_range", coord_range), ("delta", delta), ("sigma_size", sigma_size)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value!r}")
    if n_bonds < 0:
        raise ValueError(f"n_bonds must be nonnegative, got {n_bonds!r}")
    num = 3 * n_atoms * math.log10(coord_range) + n_atoms * sigma_size
    den = n_atoms * (sigma_size + 3 * math.log10(1 / delta)) + n_bonds * math.log10(4)
    return num / den


def summarize(reports: Iterable[CompressionReport], failures=()) -> CorpusSummary:
    reports = tuple(reports)
    if not reports:
        raise ValueError("corpus has no measurable records")
    ratios = [r.ratio for r in reports]
    return CorpusSummary(
        per_molecule=reports,
        mean_ratio=math.fsum(ratios) / len(ratios),
        median_ratio=statistics.median(ratios),
        mean_rate=math.fsum(r.rate for r in reports) / len(reports),
        failures=tuple(failures),
    )


def corpus_stats(records: Iterable[SdfRecord]) -> CorpusSummary:
    """Measure records in order; records that fail are skipped and listed."""
    reports = []
    failures = []
    for index, record in enumerate(records):
        try:
            reports.append(measure(record))
        except (RcmtError, ValueError) as exc:
            failures.append((index, str(exc)))
    if not reports and not failures:
        raise ValueError("empty corpus")
    return summarize(reports, failures)


def format_table(summary: CorpusSummary, bounds: list[float] | None = None) -> str:
    """Plain-text table: one row per molecule, then the corpus averages."""
    head = f"{'#':>4}  {'name':<20} {'atoms':>5} {'bonds':>5} {'sdf':>7} {'rcmt':>7} {'rate':>7} {'ratio':>6}"
    if bounds is not None:
        head += f" {'bound':>7}"
    rows = [head]
    for k, r in enumerate(summary.per_molecule):
        row = (
            f"{k + 1:>4}  {r.name[:20]:<20} {r.n_atoms:>5} {r.n_bonds:>5} "
            f"{r.sdf_chars:>7} {r.rcmt_chars:>7} {r.rate:>7.2%} {r.ratio:>6.3f}"
        )
        if bounds is not None:
            row += f" {bounds[k]:>7.4f}"
        rows.append(row)
    rows.append(
        f"mean rate {summary.mean_rate:.2%}  mean ratio {summary.mean_ratio:.3f}  "
        f"median ratio {summary.median_ratio:.3f}"
    )
    if summary.failures:
        rows.append(f"{len(summary.failures)} failed")
    return "\n".join(rows) + "\n"
