"""Random graph builders shared by the test modules."""

import random

from rcmt.molgraph import Atom, Bond, MolecularGraph, QuantizedCoord

ORGANIC = ("H", "C", "N", "O", "F")
MIXED = ("H", "C", "N", "O", "F", "Cl", "Br", "S", "P", "Si", "B", "I", "Na", "Og", "He")
# Largest magnitude that still fits a 10-column SDF coordinate field.
SDF_LIMIT = 99_999_999 // 10


def random_graph(rng: random.Random, max_atoms=50, elements=MIXED, coord_limit=100_000_000, bond_density=0.15):
    n = rng.randint(0, max_atoms)
    atoms = tuple(
        Atom(
            rng.choice(elements),
            QuantizedCoord(*(rng.randint(-coord_limit, coord_limit) for _ in range(3))),
        )
        for _ in range(n)
    )
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    rng.shuffle(pairs)
    k = min(len(pairs), int(bond_density * len(pairs)) + rng.randint(0, 3))
    bonds = tuple(Bond(i, j, rng.randint(1, 4)) for i, j in pairs[:k])
    return MolecularGraph(atoms, bonds)


def random_small_molecule(rng: random.Random, max_atoms=12):
    """Organic-element graph with few bonds; often but not always valence-valid."""
    n = rng.randint(1, max_atoms)
    atoms = tuple(
        Atom(rng.choice(ORGANIC), QuantizedCoord(*(rng.randint(-50_000, 50_000) for _ in range(3))))
        for _ in range(n)
    )
    bonds = {}
    for _ in range(rng.randint(0, 2 * n)):
        i, j = rng.sample(range(1, n + 1), 2) if n > 1 else (None, None)
        if i is None:
            break
        key = (min(i, j), max(i, j))
        bonds.setdefault(key, rng.choice((1, 1, 1, 2, 2, 3)))
    return MolecularGraph(atoms, tuple(Bond(i, j, o) for (i, j), o in bonds.items()))


def methane():
    return MolecularGraph.build(
        [
            ("C", (0, 0, 0)),
            ("H", (6290, 6290, 6290)),
            ("H", (-6290, -6290, 6290)),
            ("H", (-6290, 6290, -6290)),
            ("H", (6290, -6290, -6290)),
        ],
        [(1, 2, 1), (1, 3, 1), (1, 4, 1), (1, 5, 1)],
    )


def ammonia():
    return MolecularGraph.build(
        [("N", (0, 0, 0)), ("H", (10100, 0, 0)), ("H", (-3370, 9520, 0)), ("H", (-3370, -4760, 8250))],
        [(1, 2, 1), (1, 3, 1), (1, 4, 1)],
    )


def pentavalent_carbon():
    atoms = [("C", (0, 0, 0))] + [("H", (10_900 * k, 0, 0)) for k in range(1, 6)]
    return MolecularGraph.build(atoms, [(1, k, 1) for k in range(2, 7)])


def chain(n: int):
    """Carbon chain on a 1.54 A lattice, folded 100 x 100 per layer so that
    long chains stay inside the coordinate range."""
    atoms = tuple(
        Atom("C", QuantizedCoord(15_400 * (k % 100), 15_400 * (k // 100 % 100), 15_400 * (k // 10_000)))
        for k in range(n)
    )
    bonds = tuple(Bond(k, k + 1, 1) for k in range(1, n))
    return MolecularGraph(atoms, bonds)


def shuffled(g: MolecularGraph, rng: random.Random) -> MolecularGraph:
    order = list(range(g.n_atoms))
    rng.shuffle(order)
    return g.permute(order)


# PASS/FAIL lines from the acceptance suite, printed in the terminal summary.
ACCEPTANCE: list = []
