"""Reader and writer for V2000 structure-data files.

Only the parts of a record that make up the molecular graph survive a
parse: header lines, element symbols, coordinates, bond pairs and bond
orders. Charges, stereo flags, property blocks and data items are dropped.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

from rcmt.codec import quantize
from rcmt.errors import GraphError, SdfParseError
from rcmt.molgraph import (
    ELEMENTS,
    Atom,
    Bond,
    MolecularGraph,
    QuantizedCoord,
    format_fixed,
)

logger = logging.getLogger(__name__)

RECORD_DELIMITER = "$$$$"
COUNTS_TAIL = "  0  0  0  0  0  0  0  0  0999 V2000"
DEFAULT_HEADER = ("", "RCMT", "")
_N_HEADER = 3


@dataclass(frozen=True)
class SdfRecord:
    header_lines: tuple[str, str, str]
    graph: MolecularGraph
    # Diagnostics from parsing (sub-grid coordinates, skipped property lines).
    warnings: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class RawRecord:
    """Lines of one record before parsing, with their position in the file."""

    index: int
    first_line: int
    lines: tuple[str, ...]
    terminated: bool


def split_records(text: str) -> list[RawRecord]:
    """Cut file text at ``$$$$`` lines.

    Trailing blank lines after the last delimiter do not form a record.
    """
    lines = text.splitlines()
    records = []
    start = 0
    for n, line in enumerate(lines):
        if line.rstrip() == RECORD_DELIMITER:
            records.append(RawRecord(len(records), start + 1, tuple(lines[start:n]), True))
            start = n + 1
    tail = lines[start:]
    if any(line.strip() for line in tail):
        records.append(RawRecord(len(records), start + 1, tuple(tail), False))
    return records


def _coord_units(text: str, warnings: list[str], where: str) -> int:
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise ValueError(f"bad coordinate {text!r}") from None
    if not value.is_finite():
        raise ValueError(f"bad coordinate {text!r}")
    if value.as_tuple().exponent < -4:
        warnings.append(f"{where}: coordinate {text} has more than 4 decimals, floored to the 1e-4 grid")
    return quantize((value, 0, 0)).x


def _int_field(line: str, lo: int, hi: int) -> int:
    return int(line[lo:hi])


def _parse_counts(line: str) -> tuple[int, int]:
    if "V3000" in line.upper():
        raise ValueError("V3000 records are not supported")
    try:
        n_atoms, n_bonds = _int_field(line, 0, 3), _int_field(line, 3, 6)
    except ValueError:
        parts = line.split()
        if len(parts) < 2:
            raise ValueError(f"malformed counts line {line!r}") from None
        try:
            n_atoms, n_bonds = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"malformed counts line {line!r}") from None
    if n_atoms < 0 or n_bonds < 0:
        raise ValueError(f"negative counts in {line!r}")
    return n_atoms, n_bonds


def _parse_atom(line: str, warnings: list[str], where: str) -> Atom:
    # Fixed columns first; fall back to whitespace tokens for hand-edited files.
    fields = (line[0:10], line[10:20], line[20:30], line[31:34].strip())
    notes: list[str] = []
    try:
        units = [_coord_units(f.strip(), notes, where) for f in fields[:3]]
        symbol = fields[3]
        if not symbol or line[30:31].strip():
            raise ValueError
        warnings.extend(notes)
    except ValueError:
        parts = line.split()
        if len(parts) < 4:
            raise ValueError(f"malformed atom line {line!r}") from None
        units = [_coord_units(p, warnings, where) for p in parts[:3]]
        symbol = parts[3]
    if symbol not in ELEMENTS:
        raise ValueError(f"unrecognized element symbol {symbol!r}")
    return Atom(symbol, QuantizedCoord(*units))


def _parse_bond(line: str, n_atoms: int) -> tuple[int, int, int]:
    try:
        a, b, order = _int_field(line, 0, 3), _int_field(line, 3, 6), _int_field(line, 6, 9)
    except ValueError:
        parts = line.split()
        if len(parts) < 3:
            raise ValueError(f"malformed bond line {line!r}") from None
        try:
            a, b, order = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise ValueError(f"malformed bond line {line!r}") from None
    for idx in (a, b):
        if not 1 <= idx <= n_atoms:
            raise ValueError(f"bond references atom {idx} but record has {n_atoms} atoms")
    if a == b:
        raise ValueError(f"self-bond on atom {a}")
    if order not in (1, 2, 3, 4):
        raise ValueError(f"bond order {order} outside 1-4")
    return a, b, order


def parse_record(raw: RawRecord) -> SdfRecord:
    """Parse one record; errors name the record index and file line."""
    lines = raw.lines

    def fail(msg: str, offset: int):
        raise SdfParseError(msg, raw.index, raw.first_line + offset)

    if len(lines) < _N_HEADER + 1:
        fail("truncated record: missing header or counts line", len(lines))
    header = tuple(lines[:_N_HEADER])
    try:
        n_atoms, n_bonds = _parse_counts(lines[_N_HEADER])
    except ValueError as exc:
        fail(str(exc), _N_HEADER)

    warnings: list[str] = []
    atoms = []
    first_atom = _N_HEADER + 1
    if len(lines) < first_atom + n_atoms + n_bonds:
        fail(
            f"truncated record: counts line promises {n_atoms} atoms and {n_bonds} bonds",
            len(lines),
        )
    for k in range(n_atoms):
        off = first_atom + k
        try:
            atoms.append(_parse_atom(lines[off], warnings, f"line {raw.first_line + off}"))
        except (ValueError, GraphError) as exc:
            fail(str(exc), off)
    bonds = []
    seen = set()
    first_bond = first_atom + n_atoms
    for k in range(n_bonds):
        off = first_bond + k
        try:
            a, b, order = _parse_bond(lines[off], n_atoms)
        except ValueError as exc:
            fail(str(exc), off)
        key = (min(a, b), max(a, b))
        if key in seen:
            fail(f"duplicate bond {key[0]}-{key[1]}", off)
        seen.add(key)
        bonds.append(Bond.between(a, b, order))

    rest = lines[first_bond + n_bonds:]
    saw_end = False
    for k, line in enumerate(rest):
        if line.startswith("M  END"):
            saw_end = True
            break
        if line.strip():
            warnings.append(f"line {raw.first_line + first_bond + n_bonds + k}: skipped {line[:6].rstrip()!r}")
    if not saw_end:
        fail("truncated record: missing 'M  END'", len(lines))
    for w in warnings:
        logger.warning("record %d, %s", raw.index, w)
    return SdfRecord(header, MolecularGraph(tuple(atoms), tuple(bonds)), tuple(warnings))


def parse_sdf(text: str) -> list[SdfRecord]:
    """Parse every record in ``text``; the first bad record raises."""
    return [parse_record(raw) for raw in split_records(text)]


def _coord_field(units: int) -> str:
    text = format_fixed(units)
    if len(text) > 10:
        raise ValueError(f"coordinate {text} does not fit a 10-column SDF field")
    return f"{text:>10}"


def format_record(record: SdfRecord) -> str:
    g = record.graph
    if g.n_atoms > 999 or g.n_bonds > 999:
        raise ValueError("V2000 counts are limited to 999 atoms and 999 bonds")
    out = list(record.header_lines)
    out.append(f"{g.n_atoms:>3}{g.n_bonds:>3}{COUNTS_TAIL}")
    zeros = "  0" * 11
    for atom in g.atoms:
        x, y, z = (_coord_field(v) for v in atom.position)
        out.append(f"{x}{y}{z} {atom.element:<3} 0{zeros}")
    for b in g.bonds:
        out.append(f"{b.i:>3}{b.j:>3}{int(b.order):>3}  0")
    out.append("M  END")
    out.append(RECORD_DELIMITER)
    return "\n".join(out) + "\n"


def write_sdf(records) -> str:
    return "".join(format_record(r) for r in records)


def graph_record(g: MolecularGraph, header=DEFAULT_HEADER) -> SdfRecord:
    return SdfRecord(tuple(header), g)
