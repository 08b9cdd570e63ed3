//! Shared fixtures and brute-force reference implementations for the
//! integration tests. Nothing here calls into the code it checks.

#![allow(dead_code)]

pub mod baselines;
pub mod gradients;

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::path::PathBuf;

use probqsar::chem::{parse_smiles, Molecule, ParseErrorKind};
use probqsar::featurize::fnv1a64;

/// Resolves from either workspace crate.
pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidCase {
    pub smiles: String,
    pub atoms: usize,
    pub bonds: usize,
    pub charge: i32,
    pub hydrogens: u32,
    pub aromatic_atoms: usize,
    pub heavy_atoms: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalformedCase {
    pub smiles: String,
    pub kind: String,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusCase {
    Valid(ValidCase),
    Malformed(MalformedCase),
}

impl CorpusCase {
    pub fn smiles(&self) -> &str {
        match self {
            CorpusCase::Valid(c) => &c.smiles,
            CorpusCase::Malformed(c) => &c.smiles,
        }
    }
}

pub fn parser_corpus() -> Vec<CorpusCase> {
    let text = std::fs::read_to_string(fixture("parser_corpus.tsv")).expect("corpus fixture");
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|line| {
            let f: Vec<&str> = line.split('\t').collect();
            if f[1] == "ERROR" {
                CorpusCase::Malformed(MalformedCase {
                    smiles: f[0].to_string(),
                    kind: f[2].to_string(),
                    offset: f[3].parse().unwrap(),
                })
            } else {
                CorpusCase::Valid(ValidCase {
                    smiles: f[0].to_string(),
                    atoms: f[1].parse().unwrap(),
                    bonds: f[2].parse().unwrap(),
                    charge: f[3].parse().unwrap(),
                    hydrogens: f[4].parse().unwrap(),
                    aromatic_atoms: f[5].parse().unwrap(),
                    heavy_atoms: f[6].parse().unwrap(),
                })
            }
        })
        .collect()
}

pub fn kind_name(kind: ParseErrorKind) -> String {
    format!("{kind:?}")
}

/// Observed counts for one corpus line, or the mismatch description.
pub fn check_case(case: &CorpusCase) -> Result<(), String> {
    match case {
        CorpusCase::Valid(c) => {
            let m = parse_smiles(&c.smiles).map_err(|e| format!("{:?}: {e}", c.smiles))?;
            let got = ValidCase {
                smiles: c.smiles.clone(),
                atoms: m.atom_count(),
                bonds: m.bonds().len(),
                charge: m.atoms().iter().map(|a| i32::from(a.formal_charge)).sum(),
                hydrogens: (0..m.atom_count()).map(|a| m.implicit_h_count(a)).sum(),
                aromatic_atoms: m.atoms().iter().filter(|a| a.aromatic).count(),
                heavy_atoms: m.heavy_atom_count(),
            };
            if &got == c {
                Ok(())
            } else {
                Err(format!("expected {c:?}, got {got:?}"))
            }
        }
        CorpusCase::Malformed(c) => match parse_smiles(&c.smiles) {
            Ok(_) => Err(format!("{:?} parsed but should fail", c.smiles)),
            Err(e) if kind_name(e.kind) == c.kind && e.offset == c.offset => Ok(()),
            Err(e) => Err(format!(
                "{:?}: expected {} at {}, got {:?} at {}",
                c.smiles, c.kind, c.offset, e.kind, e.offset
            )),
        },
    }
}

// ---- circular fingerprint oracle -------------------------------------------

/// Shortest-path distances (in bonds) from `from` to every atom.
fn distances(m: &Molecule, from: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; m.atom_count()];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(a) = queue.pop_front() {
        for b in m.bonds() {
            if b.touches(a) {
                let o = b.other(a);
                if dist[o] == usize::MAX {
                    dist[o] = dist[a] + 1;
                    queue.push_back(o);
                }
            }
        }
    }
    dist
}

/// Bonds covered by the radius-`k` environment around `center`: every bond
/// with an endpoint fewer than `k` bonds away.
pub fn environment_bonds(m: &Molecule, center: usize, k: usize) -> BTreeSet<usize> {
    let d = distances(m, center);
    m.bonds()
        .iter()
        .enumerate()
        .filter(|(_, b)| d[b.begin].min(d[b.end]) < k)
        .map(|(i, _)| i)
        .collect()
}

/// A bond lies on a cycle iff its endpoints stay connected without it.
fn bond_in_cycle(m: &Molecule, bond: usize) -> bool {
    let skip = m.bonds()[bond];
    let mut seen = vec![false; m.atom_count()];
    let mut stack = vec![skip.begin];
    seen[skip.begin] = true;
    while let Some(a) = stack.pop() {
        for (i, b) in m.bonds().iter().enumerate() {
            if i != bond && b.touches(a) && !seen[b.other(a)] {
                seen[b.other(a)] = true;
                stack.push(b.other(a));
            }
        }
    }
    seen[skip.end]
}

fn initial_id(m: &Molecule, atom: usize) -> u64 {
    let a = &m.atoms()[atom];
    let incident: Vec<usize> = (0..m.bonds().len()).filter(|&i| m.bonds()[i].touches(atom)).collect();
    let heavy = incident
        .iter()
        .filter(|&&i| m.atoms()[m.bonds()[i].other(atom)].element != 1)
        .count() as u32;
    let in_ring = incident.iter().any(|&i| bond_in_cycle(m, i));
    let mut bytes = Vec::new();
    bytes.extend_from_slice(&u32::from(a.element).to_le_bytes());
    bytes.extend_from_slice(&heavy.to_le_bytes());
    bytes.extend_from_slice(&m.total_h_count(atom).to_le_bytes());
    bytes.extend_from_slice(&i32::from(a.formal_charge).to_le_bytes());
    bytes.push(u8::from(in_ring));
    bytes.push(u8::from(a.aromatic));
    fnv1a64(&bytes)
}

/// Identifier of the radius-`k` environment at `atom`, unfolded recursively.
pub fn environment_id(m: &Molecule, atom: usize, k: u32) -> u64 {
    if k == 0 {
        return initial_id(m, atom);
    }
    let mut nbrs: Vec<(u8, u64)> = m
        .bonds()
        .iter()
        .filter(|b| b.touches(atom))
        .map(|b| (b.order.code(), environment_id(m, b.other(atom), k - 1)))
        .collect();
    nbrs.sort();
    let mut bytes = Vec::new();
    bytes.extend_from_slice(&k.to_le_bytes());
    bytes.extend_from_slice(&environment_id(m, atom, k - 1).to_le_bytes());
    for (code, id) in nbrs {
        bytes.push(code);
        bytes.extend_from_slice(&id.to_le_bytes());
    }
    fnv1a64(&bytes)
}

/// Distinct identifiers up to `radius`, deduplicated by covered bond set.
pub fn oracle_identifiers(m: &Molecule, radius: u32) -> BTreeSet<u64> {
    let n = m.atom_count();
    let mut out: BTreeSet<u64> = (0..n).map(|a| environment_id(m, a, 0)).collect();
    let mut earlier: HashSet<BTreeSet<usize>> = HashSet::from([BTreeSet::new()]);
    for k in 1..=radius {
        let mut this_round: Vec<(BTreeSet<usize>, u64)> = (0..n)
            .map(|a| (environment_bonds(m, a, k as usize), environment_id(m, a, k)))
            .filter(|(bonds, _)| !earlier.contains(bonds))
            .collect();
        this_round.sort();
        this_round.dedup_by(|later, first| later.0 == first.0);
        for (bonds, id) in this_round {
            out.insert(id);
            earlier.insert(bonds);
        }
    }
    out
}

pub fn oracle_bits(m: &Molecule, radius: u32, length: usize) -> BTreeSet<usize> {
    oracle_identifiers(m, radius)
        .into_iter()
        .map(|id| (id % length as u64) as usize)
        .collect()
}

// ---- fixtures ---------------------------------------------------------------

pub fn activity_fixture() -> probqsar::dataio::Dataset {
    probqsar::dataio::load_chembl_csv(&fixture("activities.csv"), &Default::default()).expect("activity fixture")
}

/// Default configuration with every training loop cut to a few epochs.
pub fn quick_config() -> probqsar::dataio::RunConfig {
    let mut c = probqsar::dataio::RunConfig::default();
    c.skipgram.epochs = 2;
    c.autoencoder.epochs = 5;
    c.gan.epochs = 3;
    c.gan.samples = 20;
    c.mlp.epochs = 5;
    c
}
