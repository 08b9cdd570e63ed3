"""Regenerate parser_corpus.tsv.

Counts for valid inputs come from RDKit (sanitized parse for hydrogen counts,
unsanitized parse for aromatic flags as written). Error kinds and byte offsets
for malformed inputs are written out by hand below.

    python3 make_parser_corpus.py > parser_corpus.tsv
"""

from rdkit import Chem

VALID = """
C CC CCC CCCC CC(C)C CC(C)(C)C CCCCCCCC C=C C#C CC=O CCO OCCO CO C=O O=C=O CN CNC CN(C)C C#N
CC#N N#CC#N CCl ClC(Cl)Cl FC(F)(F)F ICI CS CS(=O)C CS(=O)(=O)C OS(=O)(=O)O OP(=O)(O)O CP(C)C
B(O)(O)O CB(C)C C1CC1 C1CCCC1 C1CCCCC1 C1CCOC1 C1CCNCC1 C1COCCO1 C1CC2CCC1C2 N1CC1 c1ccccc1
Cc1ccccc1 Oc1ccccc1 Nc1ccccc1 c1ccncc1 c1ccoc1 c1ccsc1 c1cc[nH]c1 c1cnc[nH]1 c1ncncn1 [NH4+]
[Na+] [Cl-] [O-]C=O C[N+](C)(C)C [13CH4] [OH-] C[N+](=O)[O-] [Fe+2] C[Si](C)(C)C C[Se]C
c1cc[se]c1 CC(=O)O CC(=O)OC CC(=O)N NC(=O)N NC(N)=N OC(=O)C(=O)O C/C=C/C C/C=C\\C F/C=C/F
C[C@H](N)C(=O)O C[C@@H](O)CC O=C1CCCCC1 C1=CC=CC=C1 C%10CC%10 C1CC2(C1)CC2 CC(C)(C)O OCC(O)CO
C=CC=C C=C=C CC#CC N#N O=O [NH3+]CC(=O)[O-] C[S+](C)C c1cc[nH+]cc1 Cn1ccnc1 c1cscn1 c1ccon1
c1cn[nH]c1 B1OCCO1 [BH4-] [B-](F)(F)(F)F [PH4+] [N-]=[N+]=[N-] CCC(=O)CC P(Cl)(Cl)Cl
Oc1ccc(O)cc1 C1CC1C1CC1 [nH]1cccc1 CC[O-] C=1CC1 C:1:C:C:C:C:C:1 [2H]C([2H])([2H])[2H]
c1ccc2ccccc2c1 c1ccc2[nH]ccc2c1 C1CCC2CCCCC2C1 NS(=O)(=O)c1ccccc1 CC(=O)Nc1ccc(O)cc1
CN1CCC(CC1)c1ccccc1 NC1CC1c1ccccc1 O=C(O)c1ccccc1O CC(C)Cc1ccc(cc1)C(C)C(=O)O
""".split()

# (input, error kind, byte offset) -- derived by reading each string. Offsets
# point at the first byte that cannot be accepted: the element symbol inside a
# bracket, the closing digit of a ring bond, the start of an unclosed bracket.
MALFORMED = [
    ("C(", "UnmatchedParenthesis", 1),
    ("C)", "UnmatchedParenthesis", 1),
    ("C1CC", "UnmatchedRingClosure", 1),
    ("C((C)", "DanglingBond", 2),
    ("CC)C", "UnmatchedParenthesis", 2),
    ("X", "UnknownToken", 0),
    ("Cx", "UnknownToken", 1),
    ("C.C", "MultiComponentUnsupported", 1),
    ("CC.O", "MultiComponentUnsupported", 2),
    ("[NH4", "InvalidBracketAtom", 0),
    ("[]", "InvalidBracketAtom", 1),
    ("[Zz]", "InvalidBracketAtom", 1),
    ("C=", "DanglingBond", 1),
    ("=C", "DanglingBond", 0),
    ("(C)", "DanglingBond", 0),
    ("1CC1", "DanglingBond", 0),
    ("C%1", "UnknownToken", 1),
    ("C%", "UnknownToken", 1),
    ("C11", "InvalidRingBond", 2),
    ("C12CC12", "InvalidRingBond", 6),
    ("C=1CC-1", "ConflictingRingBond", 6),
    ("c1cccc", "UnmatchedRingClosure", 1),
    ("C(=O", "UnmatchedParenthesis", 1),
    ("CC(C)(", "UnmatchedParenthesis", 5),
    ("C[C@@H](O", "UnmatchedParenthesis", 7),
    ("C#", "DanglingBond", 1),
    ("[C+", "InvalidBracketAtom", 0),
    ("C$C", "UnknownToken", 1),
    ("Q", "UnknownToken", 0),
    ("c1ccccc1)", "UnmatchedParenthesis", 8),
    ("C1CC2", "UnmatchedRingClosure", 1),
    ("C C", "UnknownToken", 1),
    ("*C", "UnknownToken", 0),
    ("C(C)C)", "UnmatchedParenthesis", 5),
    ("", "EmptyInput", 0),
]


def counts(smiles):
    params = Chem.SmilesParserParams()
    params.removeHs = False
    mol = Chem.MolFromSmiles(smiles, params)
    assert mol is not None, smiles
    params.sanitize = False
    raw = Chem.MolFromSmiles(smiles, params)
    return (
        mol.GetNumAtoms(),
        mol.GetNumBonds(),
        sum(a.GetFormalCharge() for a in mol.GetAtoms()),
        sum(a.GetTotalNumHs() for a in mol.GetAtoms()),
        sum(a.GetIsAromatic() for a in raw.GetAtoms()),
        sum(a.GetAtomicNum() > 1 for a in mol.GetAtoms()),
    )


def main():
    print("# smiles\tatoms\tbonds\tcharge\thydrogens\taromatic_atoms\theavy_atoms")
    print("# smiles\tERROR\tkind\toffset")
    for s in VALID:
        print(s + "\t" + "\t".join(str(v) for v in counts(s)))
    for s, kind, off in MALFORMED:
        print(f"{s}\tERROR\t{kind}\t{off}")


if __name__ == "__main__":
    main()
