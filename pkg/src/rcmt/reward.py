"""Stability-centred reward and the clipped PPO surrogate.

The reward mixes four terms,

    R(m) = w_mol * S_mol + w_atom * S_atom + w_div * D + w_valid * V,

where the two stability terms are Boltzmann factors of energy gaps
supplied by a pluggable :class:`EnergyOracle`.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import asdict, dataclass, field, replace
from types import MappingProxyType
from typing import Protocol, runtime_checkable

import numpy as np

from rcmt.metrics import DEFAULT_TABLE, ValenceTable, is_valid
from rcmt.molgraph import MolecularGraph, canonical_hash, valence_sum


@runtime_checkable
class EnergyOracle(Protocol):
    e_ref: float

    def total_energy(self, g: MolecularGraph) -> float: ...

    def local_energy(self, g: MolecularGraph, i: int) -> float: ...

    def local_ref(self, element: str) -> float: ...


def _length_table(entries):
    table = {}
    for a, b, order, length in entries:
        table[(*sorted((a, b)), order)] = length
    return MappingProxyType(table)


# Equilibrium bond lengths in angstrom keyed by (element, element, order).
DEFAULT_BOND_LENGTHS = _length_table(
    [
        ("C", "C", 1, 1.54),
        ("C", "C", 2, 1.34),
        ("C", "C", 3, 1.20),
        ("C", "C", 4, 1.40),
        ("C", "H", 1, 1.09),
        ("C", "O", 1, 1.43),
        ("C", "O", 2, 1.23),
        ("C", "N", 1, 1.47),
        ("C", "N", 2, 1.28),
        ("C", "N", 3, 1.16),
        ("C", "F", 1, 1.35),
        ("O", "H", 1, 0.96),
        ("N", "H", 1, 1.01),
        ("N", "N", 1, 1.45),
        ("N", "O", 1, 1.40),
        ("H", "H", 1, 0.74),
    ]
)
FALLBACK_BOND_LENGTH = 1.5


@dataclass(frozen=True)
class HarmonicOracle:
    """Harmonic bond-stretch energy plus a quadratic valence penalty.

    E = sum_bonds k (l - l0)^2 + sum_atoms p * dev^2, where ``dev`` is the
    distance from the atom's bond-order sum to its nearest allowed valence.
    An atom's local energy is half of each incident bond term plus its own
    valence term, so local energies sum to the total.
    """

    k: float = 10.0
    p: float = 5.0
    lengths: Mapping = DEFAULT_BOND_LENGTHS
    table: ValenceTable = DEFAULT_TABLE
    e_ref: float = 0.0
    local_refs: Mapping[str, float] = field(default_factory=dict)

    def rest_length(self, a: str, b: str, order: int) -> float:
        return self.lengths.get((*sorted((a, b)), int(order)), FALLBACK_BOND_LENGTH)

    def _bond_arrays(self, g: MolecularGraph):
        idx = np.array([(b.i - 1, b.j - 1) for b in g.bonds], dtype=np.intp).reshape(-1, 2)
        rest = np.array([self.rest_length(g.atoms[b.i - 1].element, g.atoms[b.j - 1].element, b.order) for b in g.bonds])
        return idx, rest

    def valence_terms(self, g: MolecularGraph) -> np.ndarray:
        return np.array(
            [
                self.p * self.table.deviation(a.element, valence_sum(g, n + 1)) ** 2
                for n, a in enumerate(g.atoms)
            ],
            dtype=float,
        )

    def bond_terms(self, g: MolecularGraph, coords: np.ndarray | None = None) -> np.ndarray:
        xyz = g.coordinates() if coords is None else np.asarray(coords, dtype=float)
        idx, rest = self._bond_arrays(g)
        if not len(idx):
            return np.zeros(0)
        lengths = np.linalg.norm(xyz[idx[:, 0]] - xyz[idx[:, 1]], axis=1)
        return self.k * (lengths - rest) ** 2

    def energy(self, g: MolecularGraph, coords: np.ndarray | None = None) -> float:
        """Total energy with optionally overridden (N, 3) float coordinates."""
        return float(self.bond_terms(g, coords).sum() + self.valence_terms(g).sum())

    def gradient(self, g: MolecularGraph, coords: np.ndarray | None = None) -> np.ndarray:
        """Analytic dE/dr as an (N, 3) array."""
        xyz = g.coordinates() if coords is None else np.asarray(coords, dtype=float)
        grad = np.zeros_like(xyz)
        idx, rest = self._bond_arrays(g)
        if not len(idx):
            return grad
        diff = xyz[idx[:, 0]] - xyz[idx[:, 1]]
        lengths = np.linalg.norm(diff, axis=1)
        # Coincident atoms have no defined bond direction.
        safe = np.where(lengths > 0, lengths, 1.0)
        coef = 2 * self.k * (lengths - rest) / safe
        pair = coef[:, None] * diff
        np.add.at(grad, idx[:, 0], pair)
        np.add.at(grad, idx[:, 1], -pair)
        return grad

    def total_energy(self, g: MolecularGraph) -> float:
        return self.energy(g)

    def local_energies(self, g: MolecularGraph) -> np.ndarray:
        local = self.valence_terms(g)
        idx, _ = self._bond_arrays(g)
        if len(idx):
            half = 0.5 * self.bond_terms(g)
            np.add.at(local, idx[:, 0], half)
            np.add.at(local, idx[:, 1], half)
        return local

    def local_energy(self, g: MolecularGraph, i: int) -> float:
        if not 1 <= i <= g.n_atoms:
            raise IndexError(f"atom index {i} out of range 1..{g.n_atoms}")
        return float(self.local_energies(g)[i - 1])

    def local_ref(self, element: str) -> float:
        return self.local_refs.get(element, 0.0)

    def calibrated(self, corpus: Iterable[MolecularGraph]) -> HarmonicOracle:
        """Copy whose references are mean energies over a corpus of stable molecules."""
        totals = []
        per_element: dict[str, list[float]] = {}
        for g in corpus:
            totals.append(self.total_energy(g))
            for atom, e in zip(g.atoms, self.local_energies(g)):
                per_element.setdefault(atom.element, []).append(float(e))
        if not totals:
            raise ValueError("reference corpus is empty")
        refs = {el: math.fsum(v) / len(v) for el, v in sorted(per_element.items())}
        return replace(self, e_ref=math.fsum(totals) / len(totals), local_refs=refs)


@dataclass(frozen=True)
class Thermostat:
    kT: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.kT) and self.kT > 0):
            raise ValueError(f"kT must be positive, got {self.kT!r}")


@dataclass(frozen=True)
class RewardWeights:
    w_mol: float = 0.4
    w_atom: float = 0.3
    w_div: float = 0.2
    w_valid: float = 0.1

    def __post_init__(self):
        for name in ("w_mol", "w_atom", "w_div", "w_valid"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be a nonnegative number, got {value!r}")
        if not self.w_mol + self.w_atom > self.w_div + self.w_valid:
            raise ValueError(
                "reward weights must satisfy w_mol + w_atom > w_div + w_valid, got "
                f"{self.w_mol} + {self.w_atom} <= {self.w_div} + {self.w_valid}"
            )


@dataclass(frozen=True)
class RewardBreakdown:
    s_mol: float
    s_atom: float
    diversity: float
    validity: float
    total: float

    def to_dict(self) -> dict:
        return asdict(self)


def _boltzmann(energy: float, reference: float, thermo: Thermostat) -> float:
    if not math.isfinite(energy):
        raise ValueError(f"non-finite energy {energy!r}")
    try:
        return math.exp(-(energy - reference) / thermo.kT)
    except OverflowError:
        raise ValueError(f"energy {energy} is too far below reference {reference} for kT={thermo.kT}") from None


def molecular_stability_score(g: MolecularGraph, oracle: EnergyOracle, thermo: Thermostat = Thermostat()) -> float:
    return _boltzmann(oracle.total_energy(g), oracle.e_ref, thermo)


def atomic_stability_score(g: MolecularGraph, oracle: EnergyOracle, thermo: Thermostat = Thermostat()) -> float:
    """Mean per-atom Boltzmann factor of local energy against the element reference."""
    if g.n_atoms == 0:
        raise ValueError("atomic stability is undefined for an empty molecule")
    factors = [
        _boltzmann(oracle.local_energy(g, i), oracle.local_ref(g.atoms[i - 1].element), thermo)
        for i in range(1, g.n_atoms + 1)
    ]
    return math.fsum(factors) / len(factors)


def diversity(g: MolecularGraph, seen) -> float:
    """1.0 for a topology not in ``seen``, else 0.0. ``seen`` is not modified."""
    return 0.0 if canonical_hash(g) in seen else 1.0


def reward(
    g: MolecularGraph,
    weights: RewardWeights = RewardWeights(),
    oracle: EnergyOracle | None = None,
    thermo: Thermostat = Thermostat(),
    seen=frozenset(),
    table: ValenceTable = DEFAULT_TABLE,
) -> RewardBreakdown:
    oracle = HarmonicOracle(table=table) if oracle is None else oracle
    s_mol = molecular_stability_score(g, oracle, thermo)
    s_atom = atomic_stability_score(g, oracle, thermo)
    div = diversity(g, seen)
    valid = 1.0 if is_valid(g, table) else 0.0
    return combine(weights, s_mol, s_atom, div, valid)


def combine(weights: RewardWeights, s_mol: float, s_atom: float, div: float, valid: float) -> RewardBreakdown:
    # fsum keeps the weighted sum correctly rounded, so unit terms with the
    # default weights give exactly 1.0.
    total = math.fsum(
        (weights.w_mol * s_mol, weights.w_atom * s_atom, weights.w_div * div, weights.w_valid * valid)
    )
    return RewardBreakdown(s_mol, s_atom, div, valid, total)


def ppo_clip_objective(ratios: Sequence[float], advantages: Sequence[float], epsilon: float = 0.2) -> float:
    """Empirical mean of min(r * A, clip(r, 1 - eps, 1 + eps) * A)."""
    r = np.asarray(ratios, dtype=float)
    a = np.asarray(advantages, dtype=float)
    if r.ndim != 1 or a.ndim != 1:
        raise ValueError("ratios and advantages must be 1-D")
    if r.shape != a.shape:
        raise ValueError(f"length mismatch: {len(r)} ratios vs {len(a)} advantages")
    if not len(r):
        raise ValueError("empty input")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if not np.all(np.isfinite(r)) or not np.all(np.isfinite(a)):
        raise ValueError("ratios and advantages must be finite")
    if np.any(r <= 0):
        raise ValueError("probability ratios must be positive")
    terms = np.minimum(r * a, np.clip(r, 1 - epsilon, 1 + epsilon) * a)
    return math.fsum(terms.tolist()) / len(terms)


def policy_step(params: Sequence[float], gradient: Sequence[float], lr: float) -> np.ndarray:
    """One gradient-ascent step: params + lr * gradient."""
    theta = np.asarray(params, dtype=float)
    grad = np.asarray(gradient, dtype=float)
    if theta.shape != grad.shape:
        raise ValueError(f"shape mismatch: {theta.shape} vs {grad.shape}")
    if not lr >= 0:
        raise ValueError(f"learning rate must be nonnegative, got {lr!r}")
    return theta + lr * grad
