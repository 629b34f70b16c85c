"""Batch chemistry metrics: atom/molecule stability, validity, uniqueness."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass
from enum import Enum
from types import MappingProxyType

from rcmt.molgraph import MolecularGraph, canonical_hash, valence_sum


class StabilityMode(Enum):
    EXPLICIT_H = "explicit"
    IMPLICIT_H = "implicit"


DEFAULT_VALENCES: Mapping[str, frozenset[int]] = MappingProxyType(
    {
        "H": frozenset({1}),
        "C": frozenset({4}),
        "N": frozenset({3}),
        "O": frozenset({2}),
        "F": frozenset({1}),
        "B": frozenset({3}),
        "Si": frozenset({4}),
        "P": frozenset({3, 5}),
        "S": frozenset({2, 4, 6}),
        "Cl": frozenset({1}),
        "Br": frozenset({1}),
        "I": frozenset({1}),
    }
)


class ValenceTable:
    """Allowed total bond-order sums per element."""

    def __init__(self, valences: Mapping[str, Sequence[int]] | None = None, aromatic_mode: str = "integer"):
        source = DEFAULT_VALENCES if valences is None else valences
        table = {}
        for element, allowed in source.items():
            allowed = frozenset(allowed)
            if not allowed or min(allowed) < 1:
                raise ValueError(f"allowed valences for {element} must be >= 1, got {sorted(allowed)}")
            table[element] = allowed
        self._table = MappingProxyType(table)
        self.aromatic_mode = aromatic_mode

    def __contains__(self, element: str) -> bool:
        return element in self._table

    def allowed(self, element: str) -> frozenset[int] | None:
        return self._table.get(element)

    def deviation(self, element: str, valence) -> float:
        """Distance from ``valence`` to the nearest allowed value, 0 if unknown."""
        allowed = self._table.get(element)
        if allowed is None:
            return 0.0
        return float(min(abs(valence - v) for v in allowed))


DEFAULT_TABLE = ValenceTable()


def _mode(mode) -> StabilityMode:
    return mode if isinstance(mode, StabilityMode) else StabilityMode(mode)


def atom_stable(g: MolecularGraph, i: int, table: ValenceTable = DEFAULT_TABLE, mode=StabilityMode.EXPLICIT_H) -> bool:
    """Whether 1-based atom ``i`` has an acceptable bond-order sum.

    Explicit-H mode needs an exact match with an allowed valence; implicit-H
    mode only needs the sum not to exceed the largest allowed valence.
    Elements missing from the table are never stable.
    """
    allowed = table.allowed(g.atoms[i - 1].element)
    if allowed is None:
        return False
    v = valence_sum(g, i, table.aromatic_mode)
    if _mode(mode) is StabilityMode.EXPLICIT_H:
        return v in allowed
    return v <= max(allowed)


def molecule_stable(g: MolecularGraph, table: ValenceTable = DEFAULT_TABLE, mode=StabilityMode.EXPLICIT_H) -> bool:
    return all(atom_stable(g, i, table, mode) for i in range(1, g.n_atoms + 1))


def is_valid(g: MolecularGraph, table: ValenceTable = DEFAULT_TABLE) -> bool:
    # Graph invariants are enforced when MolecularGraph is constructed.
    return g.n_atoms > 0 and molecule_stable(g, table, StabilityMode.IMPLICIT_H)


@dataclass(frozen=True)
class MetricsReport:
    atom_stability_pct: float
    mol_stability_pct: float
    validity_pct: float
    uniqueness_pct: float
    n_molecules: int
    n_atoms: int
    n_valid: int
    n_unique: int
    n_unknown_element_atoms: int

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("atom_stability_pct", "mol_stability_pct", "validity_pct", "uniqueness_pct"):
            d[key] = round(d[key], 2)
        return d

    def table(self) -> str:
        cols = ("Atom Stability (%)", "Mol Stability (%)", "Valid (%)", "Unique (%)")
        vals = (self.atom_stability_pct, self.mol_stability_pct, self.validity_pct, self.uniqueness_pct)
        head = "  ".join(cols)
        row = "  ".join(f"{v:>{len(c)}.2f}" for c, v in zip(cols, vals))
        foot = f"molecules {self.n_molecules}  atoms {self.n_atoms}  valid {self.n_valid}  unique {self.n_unique}"
        if self.n_unknown_element_atoms:
            foot += f"  unknown-element atoms {self.n_unknown_element_atoms}"
        return f"{head}\n{row}\n{foot}\n"


def batch_metrics(
    molecules: Sequence[MolecularGraph],
    table: ValenceTable = DEFAULT_TABLE,
    mode=StabilityMode.EXPLICIT_H,
) -> MetricsReport:
    """Stability, validity and uniqueness percentages over a batch.

    Uniqueness counts distinct topological digests among valid molecules;
    with no valid molecules it is 0.
    """
    molecules = list(molecules)
    if not molecules:
        raise ValueError("batch_metrics needs at least one molecule")
    mode = _mode(mode)
    n_atoms = stable_atoms = stable_mols = unknown = 0
    digests = []
    for g in molecules:
        flags = [atom_stable(g, i, table, mode) for i in range(1, g.n_atoms + 1)]
        n_atoms += len(flags)
        stable_atoms += sum(flags)
        stable_mols += all(flags)
        unknown += sum(1 for el in g.elements if el not in table)
        if is_valid(g, table):
            digests.append(canonical_hash(g))
    n_valid = len(digests)
    n_unique = len(set(digests))
    return MetricsReport(
        atom_stability_pct=100.0 * stable_atoms / n_atoms if n_atoms else 100.0,
        mol_stability_pct=100.0 * stable_mols / len(molecules),
        validity_pct=100.0 * n_valid / len(molecules),
        uniqueness_pct=100.0 * n_unique / n_valid if n_valid else 0.0,
        n_molecules=len(molecules),
        n_atoms=n_atoms,
        n_valid=n_valid,
        n_unique=n_unique,
        n_unknown_element_atoms=unknown,
    )
