"""Regenerate tests/data/qm9_sample.sdf.

Embeds small C/N/O/F molecules (at most 9 heavy atoms, explicit hydrogens)
with RDKit and writes the first 100 with 10-29 atoms as V2000 records.
Requires the ``fixtures`` extra (rdkit); the package itself does not.

    python tools/make_qm9_sample.py tests/data/qm9_sample.sdf
"""

import sys

from rdkit import Chem
from rdkit.Chem import AllChem

SMILES = """
CC CCC CCO CC=O CC(C)=O CC#N OCC#N CC(=O)O NCC(=O)O CC(N)=O COC CCOC
CCCC CC(C)C CCCO CC(C)O CCCN CC(C)N CCC#C CC#CC C=CC=C OC=O CN(C)C
C1CC1 C1CCC1 C1CCCC1 C1CCCCC1 C1CO1 C1CN1 C1CCO1 C1CCOC1 C1CCNC1 C1CCOCC1
C1CCNCC1 OC1CC1 CC1CC1 NC1CC1 CC1CO1 OCC1CC1 CC1(C)CC1 O=C1CC1 O=C1CCC1
O=C1CCCC1 O=C1CCCCC1 CC1CCC1 CC1CCCC1 OC1CCC1 OC1CCCC1 N#CC1CC1 C#CC1CC1
c1ccccc1 Cc1ccccc1 Oc1ccccc1 Nc1ccccc1 Fc1ccccc1 c1ccncc1 c1cnccn1 c1ncncn1
c1ccoc1 c1cc[nH]c1 c1cn[nH]c1 c1c[nH]cn1 c1cocn1 c1cnoc1 Cc1ccco1 Cc1ccc[nH]1
OCc1ccco1 Cc1ncc[nH]1 O=Cc1ccco1 CC(=O)c1ccco1 FC(F)F FCC(F)(F)F OCC(F)(F)F
CCF CC(F)F FCCO FC1CC1 CC(C)(C)O CC(C)(C)N CCC(C)=O CCC(=O)O CCOC=O COC(C)=O
CCNC=O CNC(C)=O NC(=O)CO NC(=O)CN CC(O)C#N CC(O)C=O OCC(O)CO OCCO NCCO NCCN
CC(=O)C#C CC(=O)C=O O=CC=O O=CCC=O CC(=O)CC(C)=O CCCCO CCCCN CCCCC CCCC#N
CCC(C)C CC(C)CO CC(C)CN CC(C)(O)C#N OC1COC1 C1OCO1 C1COCO1 C1CC2CC2C1
C1CC2CCC1C2 C1CC11CC1 C12CC1C2 OC12CC1C2 CC12CC1C2 C1C2CC3C1CC23
N#CC#N N#CC=O N#CCC#N O=C=O NC=O NC(N)=O CC(=N)N CN=C=O OC(=O)C(=O)O
CCCCCC CCCCCCC CCCCCCCC CC(C)CC(C)C OCCCCO CCOCCO NCCCCN CC(=O)OCC CCCC(=O)O
CCCCC=O CCC(C)(C)O OC1CCCCC1 CC1CCCCC1 Cc1ccccc1O Cc1ccc(O)cc1 COc1ccccc1
Nc1ccncc1 Oc1ccncc1 Cc1ccncc1 CC(C)c1ccco1 CCc1ccccc1 C=Cc1ccccc1 O=Cc1ccccc1
OC(=O)c1ccco1 Cc1cc(C)on1 CN1CCCC1 CN1CCCCC1 OCC1CCCO1 CC(O)CC(C)O CCCCCCO
""".split()


def embed(smiles, seed=0xC0FFEE):
    mol = Chem.MolFromSmiles(smiles)
    if mol is None or any(a.GetSymbol() not in "CNOF" for a in mol.GetAtoms()):
        return None
    if mol.GetNumAtoms() > 9:
        return None
    mol = Chem.AddHs(mol)
    if not 10 <= mol.GetNumAtoms() <= 29:
        return None
    params = AllChem.ETKDGv3()
    params.randomSeed = seed
    if AllChem.EmbedMolecule(mol, params) != 0:
        return None
    AllChem.MMFFOptimizeMolecule(mol)
    mol.SetProp("_Name", smiles)
    return mol


def main(path):
    writer = Chem.SDWriter(path)
    writer.SetKekulize(True)
    count = 0
    for smi in SMILES:
        mol = embed(smi)
        if mol is None:
            continue
        writer.write(mol)
        count += 1
        if count == 100:
            break
    writer.close()
    print(f"wrote {count} molecules to {path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/qm9_sample.sdf")
