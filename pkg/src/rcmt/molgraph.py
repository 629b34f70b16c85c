"""Labeled molecular graph with exact fixed-point coordinates.

Coordinates are stored as integers in units of 1e-4 angstrom, so every
comparison made by the codec is exact.
"""

from __future__ import annotations

import hashlib
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from rcmt.errors import GraphError

# fmt: off
PERIODIC_TABLE: tuple[str, ...] = (
    "H", "He",
    "Li", "Be", "B", "C", "N", "O", "F", "Ne",
    "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar",
    "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr",
    "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I", "Xe",
    "Cs", "Ba",
    "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er",
    "Tm", "Yb", "Lu",
    "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg",
    "Tl", "Pb", "Bi", "Po", "At", "Rn",
    "Fr", "Ra",
    "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm",
    "Md", "No", "Lr",
    "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn",
    "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
)
# fmt: on
ELEMENTS = frozenset(PERIODIC_TABLE)
ALPHABET_SIZE = len(PERIODIC_TABLE)

# One stored coordinate unit is 1e-4 angstrom.
DECIMALS = 4
SCALE = 10**DECIMALS
MAX_UNITS = 10**8

_FIXED_RE = re.compile(r"-?(?:0|[1-9][0-9]*)\.[0-9]{4}\Z")


def is_element(symbol: str) -> bool:
    return symbol in ELEMENTS


def format_fixed(units: int) -> str:
    """Render an integer count of 1e-4 units as decimal text with 4 places."""
    whole, frac = divmod(abs(units), SCALE)
    sign = "-" if units < 0 else ""
    return f"{sign}{whole}.{frac:04d}"


def parse_fixed(text: str) -> int:
    """Inverse of :func:`format_fixed`; only the canonical rendering is accepted."""
    if not _FIXED_RE.match(text) or text == "-0.0000":
        raise ValueError(f"not a 4-decimal fixed-point number: {text!r}")
    negative = text.startswith("-")
    whole, frac = text.lstrip("-").split(".")
    units = int(whole) * SCALE + int(frac)
    return -units if negative else units


class QuantizedCoord(NamedTuple):
    """Position in integer units of 1e-4 angstrom."""

    x: int
    y: int
    z: int

    @classmethod
    def from_angstrom(cls, x, y, z) -> QuantizedCoord:
        # Late import: codec depends on this module.
        from rcmt.codec import quantize

        return quantize((x, y, z))

    def to_angstrom(self) -> tuple[float, float, float]:
        return (self.x / SCALE, self.y / SCALE, self.z / SCALE)

    def render(self) -> tuple[str, str, str]:
        return (format_fixed(self.x), format_fixed(self.y), format_fixed(self.z))


class BondOrder(IntEnum):
    SINGLE = 1
    DOUBLE = 2
    TRIPLE = 3
    AROMATIC = 4


@dataclass(frozen=True)
class Atom:
    element: str
    position: QuantizedCoord

    def __post_init__(self):
        if self.element not in ELEMENTS:
            raise GraphError(f"unrecognized element symbol {self.element!r}")
        pos = self.position
        if not isinstance(pos, QuantizedCoord):
            pos = QuantizedCoord(*pos)
            object.__setattr__(self, "position", pos)
        for value in pos:
            if not isinstance(value, int) or isinstance(value, bool):
                raise GraphError(f"coordinate must be an integer unit count, got {value!r}")
            if abs(value) > MAX_UNITS:
                raise GraphError(f"coordinate {format_fixed(value)} exceeds 10000 angstrom")


@dataclass(frozen=True)
class Bond:
    """Undirected bond between 1-based atom indices, stored with i < j."""

    i: int
    j: int
    order: BondOrder

    def __post_init__(self):
        if not 1 <= self.i < self.j:
            raise GraphError(f"bond indices must satisfy 1 <= i < j, got ({self.i}, {self.j})")
        try:
            order = BondOrder(self.order)
        except ValueError:
            raise GraphError(f"bond order must be 1-4, got {self.order!r}") from None
        object.__setattr__(self, "order", order)

    @classmethod
    def between(cls, a: int, b: int, order: int) -> Bond:
        """Build a bond from indices given in either orientation."""
        if a == b:
            raise GraphError(f"self-bond on atom {a}")
        return cls(min(a, b), max(a, b), order)


@dataclass(frozen=True, eq=False)
class MolecularGraph:
    """Atoms in significant order plus a set of bonds.

    Bonds keep the order they were given in (so an SDF bond block can be
    written back unchanged), but equality and hashing treat them as a set.
    """

    atoms: tuple[Atom, ...] = ()
    bonds: tuple[Bond, ...] = ()
    _adjacency: tuple = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        atoms = tuple(self.atoms)
        bonds = tuple(self.bonds)
        n = len(atoms)
        seen = set()
        for b in bonds:
            if b.j > n:
                raise GraphError(f"bond ({b.i}, {b.j}) references atom {b.j} but molecule has {n} atoms")
            key = (b.i, b.j)
            if key in seen:
                raise GraphError(f"duplicate bond ({b.i}, {b.j})")
            seen.add(key)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "bonds", bonds)

    def sorted_bonds(self) -> tuple[Bond, ...]:
        return tuple(sorted(self.bonds, key=lambda b: (b.i, b.j)))

    def __eq__(self, other):
        if not isinstance(other, MolecularGraph):
            return NotImplemented
        return self.atoms == other.atoms and set(self.bonds) == set(other.bonds)

    def __hash__(self):
        return hash((self.atoms, frozenset(self.bonds)))

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_bonds(self) -> int:
        return len(self.bonds)

    @property
    def elements(self) -> tuple[str, ...]:
        return tuple(a.element for a in self.atoms)

    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per-atom (neighbor index, bond order) lists, 0-based, cached."""
        if self._adjacency is None:
            adj: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
            for b in self.bonds:
                adj[b.i - 1].append((b.j - 1, int(b.order)))
                adj[b.j - 1].append((b.i - 1, int(b.order)))
            object.__setattr__(self, "_adjacency", tuple(tuple(a) for a in adj))
        return self._adjacency

    def coordinates(self) -> np.ndarray:
        """Positions in angstrom as an (N, 3) float array."""
        units = np.array([a.position for a in self.atoms], dtype=np.int64).reshape(-1, 3)
        return units / SCALE

    def permute(self, order: Sequence[int]) -> MolecularGraph:
        """Return the graph with atoms reordered; ``order[k]`` is the old
        0-based index of the atom placed at new position ``k``."""
        if sorted(order) != list(range(self.n_atoms)):
            raise ValueError("order must be a permutation of atom indices")
        new_index = {old: new for new, old in enumerate(order)}
        atoms = tuple(self.atoms[old] for old in order)
        bonds = tuple(
            Bond.between(new_index[b.i - 1] + 1, new_index[b.j - 1] + 1, b.order) for b in self.bonds
        )
        return MolecularGraph(atoms, bonds)

    def translate(self, dx: int, dy: int, dz: int) -> MolecularGraph:
        """Shift every atom by an integer number of coordinate units."""
        atoms = tuple(
            Atom(a.element, QuantizedCoord(a.position.x + dx, a.position.y + dy, a.position.z + dz))
            for a in self.atoms
        )
        return MolecularGraph(atoms, self.bonds)

    @classmethod
    def build(
        cls,
        atoms: Iterable[tuple[str, Sequence[int]]],
        bonds: Iterable[tuple[int, int, int]] = (),
    ) -> MolecularGraph:
        """Convenience constructor from ``(element, (x, y, z))`` pairs and
        ``(i, j, order)`` triples in either orientation."""
        return cls(
            tuple(Atom(el, QuantizedCoord(*pos)) for el, pos in atoms),
            tuple(Bond.between(i, j, o) for i, j, o in bonds),
        )


def disjoint_union(a: MolecularGraph, b: MolecularGraph) -> MolecularGraph:
    shift = a.n_atoms
    bonds = a.bonds + tuple(Bond(x.i + shift, x.j + shift, x.order) for x in b.bonds)
    return MolecularGraph(a.atoms + b.atoms, bonds)


def bond_matrix(g: MolecularGraph) -> np.ndarray:
    """Symmetric N x N matrix of bond orders, 0 where there is no bond."""
    n = g.n_atoms
    mat = np.zeros((n, n), dtype=np.int8)
    for b in g.bonds:
        mat[b.i - 1, b.j - 1] = mat[b.j - 1, b.i - 1] = int(b.order)
    return mat


VALENCE_MODES = ("integer", "kekule-free")


def valence_sum(g: MolecularGraph, i: int, mode: str = "integer") -> int | Fraction:
    """Sum of bond orders incident to 1-based atom ``i``.

    In ``"integer"`` mode an aromatic bond counts 1; in ``"kekule-free"``
    mode it counts 3/2 and the result is a :class:`~fractions.Fraction`.
    """
    if not 1 <= i <= g.n_atoms:
        raise IndexError(f"atom index {i} out of range 1..{g.n_atoms}")
    if mode not in VALENCE_MODES:
        raise ValueError(f"unknown valence mode {mode!r}")
    aromatic = Fraction(3, 2) if mode == "kekule-free" else 1
    total = Fraction(0) if mode == "kekule-free" else 0
    for _, order in g.adjacency()[i - 1]:
        total += aromatic if order == BondOrder.AROMATIC else order
    return total


def _digest(text: str) -> str:
    return hashlib.blake2b(text.encode("ascii"), digest_size=16).hexdigest()


def canonical_hash(g: MolecularGraph) -> str:
    """Topological digest invariant to atom order; coordinates are ignored.

    Weisfeiler-Lehman colour refinement over (element, multiset of
    (neighbour colour, bond order)). Refinement runs for at most N rounds
    and stops early once the colour partition no longer splits, after which
    further rounds cannot separate additional graphs.
    """
    adj = g.adjacency()
    colors = [_digest(el) for el in g.elements]
    n_classes = len(set(colors))
    rounds = 0
    for rounds in range(1, g.n_atoms + 1):
        colors = [
            _digest(colors[v] + "|" + ";".join(sorted(f"{colors[u]}:{o}" for u, o in adj[v])))
            for v in range(len(colors))
        ]
        refined = len(set(colors))
        if refined == n_classes:
            break
        n_classes = refined
    return _digest(f"{g.n_atoms}/{g.n_bonds}/{rounds}/" + ",".join(sorted(colors)))
