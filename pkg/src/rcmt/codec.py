"""Reversible text codec between molecular graphs and compact token lines.

A line holds the atom tokens ``El@x,y,z`` in atom order, the separator
``" | "``, then the bond tokens ``i-j:o`` sorted by ``(i, j)``::

    C@-2.9010,12.7890,-16.4760 O@-3.6540,13.0410,-15.5400 | 1-2:2

Only the nonzero upper triangle of the bond-order matrix is written, so an
encoding costs O(N + |E|) time and space.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from rcmt.errors import DecodeError, GraphError
from rcmt.molgraph import (
    ELEMENTS,
    MAX_UNITS,
    SCALE,
    Atom,
    Bond,
    MolecularGraph,
    QuantizedCoord,
    format_fixed,
)

SECTION_SEP = " | "
DEFAULT_DELTA = Fraction(1, SCALE)

_NUM = r"-?(?:0|[1-9][0-9]*)\.[0-9]{4}"
_ATOM_RE = re.compile(rf"([A-Z][a-z]{{0,2}})@({_NUM}),({_NUM}),({_NUM})")
_BOND_RE = re.compile(r"([1-9][0-9]*)-([1-9][0-9]*):([0-9]+)")


def _exact(value) -> Fraction:
    # Floats go through their shortest repr so 12.789 means 12.789, not the
    # nearest binary fraction below it.
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite coordinate {value!r}")
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        return Fraction(Decimal(value))
    return Fraction(value)


def as_delta(delta=None) -> Fraction:
    """Validate a grid step: positive and a whole number of 1e-4 units."""
    if delta is None:
        return DEFAULT_DELTA
    step = _exact(delta)
    if step <= 0:
        raise ValueError(f"grid step must be positive, got {delta!r}")
    if (step * SCALE).denominator != 1:
        raise ValueError(f"grid step must be a multiple of 1e-4 angstrom, got {delta!r}")
    return step


def quantize(r, delta=None) -> QuantizedCoord:
    """Floor a 3-vector in angstrom onto the ``delta`` grid.

    Each component becomes ``floor(c / delta) * delta`` computed in exact
    rational arithmetic (floor is toward minus infinity). Components may be
    ints, floats, strings, Decimals or Fractions.
    """
    step = as_delta(delta)
    if len(r) != 3:
        raise ValueError(f"expected 3 components, got {len(r)}")
    out = []
    for component in r:
        value = _exact(component)
        if abs(value) > MAX_UNITS / SCALE:
            raise ValueError(f"coordinate {component!r} exceeds 10000 angstrom")
        out.append(math.floor(value / step) * int(step * SCALE))
    return QuantizedCoord(*out)


def requantize(g: MolecularGraph, delta=None) -> MolecularGraph:
    """Floor every stored coordinate of ``g`` onto a coarser grid."""
    step = int(as_delta(delta) * SCALE)
    if step == 1:
        return g
    atoms = tuple(
        Atom(a.element, QuantizedCoord(*((v // step) * step for v in a.position))) for a in g.atoms
    )
    return MolecularGraph(atoms, g.bonds)


def atom_token(atom: Atom) -> str:
    x, y, z = atom.position
    return f"{atom.element}@{format_fixed(x)},{format_fixed(y)},{format_fixed(z)}"


def bond_token(bond: Bond) -> str:
    return f"{bond.i}-{bond.j}:{int(bond.order)}"


def encode(g: MolecularGraph) -> str:
    atoms = " ".join(map(atom_token, g.atoms))
    bonds = " ".join(map(bond_token, g.sorted_bonds()))
    return atoms + SECTION_SEP + bonds


def _units(text: str) -> int:
    negative = text[0] == "-"
    whole, frac = text.lstrip("-").split(".")
    units = int(whole) * SCALE + int(frac)
    return -units if negative else units


def decode(text: str, line: int | None = None) -> MolecularGraph:
    """Parse one compact line back into a graph.

    The parser is strict: any deviation from the canonical rendering is a
    :class:`DecodeError` carrying the 1-based column of the offending token.
    Bond tokens may appear in any order.
    """
    split = text.find(SECTION_SEP)
    if split < 0:
        raise DecodeError("missing section separator ' | '", 1, line)
    if text.find(SECTION_SEP, split + 1) >= 0:
        raise DecodeError("more than one section separator", text.find(SECTION_SEP, split + 1) + 1, line)

    atoms: list[Atom] = []
    atom_part = text[:split]
    if atom_part:
        pos = 0
        for tok in atom_part.split(" "):
            col = pos + 1
            m = _ATOM_RE.fullmatch(tok)
            if m is None:
                raise DecodeError(f"malformed atom token {tok!r}", col + _first_bad(tok), line)
            el, xs, ys, zs = m.groups()
            if el not in ELEMENTS:
                raise DecodeError(f"unknown element {el!r}", col, line)
            if xs == "-0.0000" or ys == "-0.0000" or zs == "-0.0000":
                raise DecodeError(f"negative zero in {tok!r}", col, line)
            coord = QuantizedCoord(_units(xs), _units(ys), _units(zs))
            try:
                atoms.append(Atom(el, coord))
            except GraphError as exc:
                raise DecodeError(str(exc), col, line) from None
            pos += len(tok) + 1

    n = len(atoms)
    bonds: list[Bond] = []
    seen: set[tuple[int, int]] = set()
    bond_part = text[split + len(SECTION_SEP):]
    if bond_part:
        pos = split + len(SECTION_SEP)
        for tok in bond_part.split(" "):
            col = pos + 1
            m = _BOND_RE.fullmatch(tok)
            if m is None:
                raise DecodeError(f"malformed bond token {tok!r}", col, line)
            i, j, order = (int(v) for v in m.groups())
            if i >= j:
                raise DecodeError(f"bond {tok!r} must satisfy i < j", col, line)
            if j > n:
                raise DecodeError(f"bond {tok!r} references atom {j} of {n}", col, line)
            if not 1 <= order <= 4:
                raise DecodeError(f"bond order {order} outside 1-4", col, line)
            if (i, j) in seen:
                raise DecodeError(f"duplicate bond {i}-{j}", col, line)
            seen.add((i, j))
            bonds.append(Bond(i, j, order))
            pos += len(tok) + 1
    return MolecularGraph(tuple(atoms), tuple(bonds))


def _first_bad(tok: str) -> int:
    """Offset of the first malformed field in an atom token."""
    at = tok.find("@")
    if at < 0 or not re.fullmatch(r"[A-Z][a-z]{0,2}", tok[:at]):
        return 0
    offset = at + 1
    for i, field in enumerate(tok[at + 1:].split(",")):
        if i > 2 or not re.fullmatch(_NUM, field):
            return offset
        offset += len(field) + 1
    return offset


@dataclass(frozen=True)
class RoundTripReport:
    elements_equal: bool
    coords_equal: bool
    bonds_equal: bool
    rmsd: float

    @property
    def ok(self) -> bool:
        return self.elements_equal and self.coords_equal and self.bonds_equal and self.rmsd == 0.0


def rmsd_units(a: MolecularGraph, b: MolecularGraph) -> Fraction:
    """Mean squared displacement between matched atoms in exact unit arithmetic."""
    if a.n_atoms != b.n_atoms:
        raise ValueError("graphs have different atom counts")
    if a.n_atoms == 0:
        return Fraction(0)
    sq = 0
    for p, q in zip(a.atoms, b.atoms):
        sq += sum((u - v) ** 2 for u, v in zip(p.position, q.position))
    return Fraction(sq, a.n_atoms)


def roundtrip_report(g: MolecularGraph, decoder=None) -> RoundTripReport:
    decoder = decoder or decode
    h = decoder(encode(g))
    same_size = h.n_atoms == g.n_atoms
    msd = rmsd_units(g, h) if same_size else None
    return RoundTripReport(
        elements_equal=g.elements == h.elements,
        coords_equal=same_size and all(p.position == q.position for p, q in zip(g.atoms, h.atoms)),
        bonds_equal=set(g.bonds) == set(h.bonds),
        rmsd=math.sqrt(msd) / SCALE if msd is not None else math.inf,
    )
