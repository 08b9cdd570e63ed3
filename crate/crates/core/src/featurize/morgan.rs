//! Circular (Morgan / ECFP-style) fingerprints.
//!
//! Identifiers are 64-bit FNV-1a hashes over fixed little-endian byte
//! layouts, so bit positions are reproducible on every platform:
//!
//! ```text
//! initial invariant (18 bytes):
//!   element u32 | heavy degree u32 | total H u32 | formal charge i32 | in ring u8 | aromatic u8
//! iteration k ≥ 1:
//!   k u32 | previous id u64 | for each neighbor, sorted by (bond code, id): bond code u8 | id u64
//! ```
//!
//! Bond codes are single=1, double=2, triple=3, aromatic=4. Every kept
//! identifier sets bit `id mod L`.

use std::collections::HashSet;

use crate::chem::{ring_flags, Molecule};

use super::FeatureError;

pub const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
pub const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FingerprintConfig {
    /// Number of bits; a power of two, at least 64.
    pub length: usize,
    /// Number of neighborhood-expansion iterations, 0..=6.
    pub radius: u32,
}

impl Default for FingerprintConfig {
    fn default() -> Self {
        Self {
            length: 512,
            radius: 3,
        }
    }
}

impl FingerprintConfig {
    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.length < 64 || !self.length.is_power_of_two() {
            return Err(FeatureError::InvalidConfig(format!(
                "fingerprint length {} is not a power of two >= 64",
                self.length
            )));
        }
        if self.radius > 6 {
            return Err(FeatureError::InvalidConfig(format!(
                "fingerprint radius {} exceeds 6",
                self.radius
            )));
        }
        Ok(())
    }
}

/// Fixed-length folded bit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitFingerprint {
    bits: Vec<bool>,
}

impl BitFingerprint {
    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn set(&mut self, i: usize) {
        self.bits[i] = true;
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn on_bits(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&i| self.bits[i]).collect()
    }

    /// Whether every bit set here is also set in `other`.
    pub fn is_subset_of(&self, other: &BitFingerprint) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits.iter().zip(&other.bits).all(|(a, b)| !a || *b)
    }
}

/// Hash of (element, heavy degree, total H, formal charge, in-ring, aromatic).
pub fn atom_initial_invariant(m: &Molecule, atom: usize) -> u64 {
    let rings = ring_flags(m);
    initial_invariant_with(m, atom, &rings.atoms)
}

fn initial_invariant_with(m: &Molecule, atom: usize, in_ring: &[bool]) -> u64 {
    let a = &m.atoms()[atom];
    let mut bytes = [0u8; 18];
    bytes[0..4].copy_from_slice(&u32::from(a.element).to_le_bytes());
    bytes[4..8].copy_from_slice(&(m.heavy_degree(atom) as u32).to_le_bytes());
    bytes[8..12].copy_from_slice(&m.total_h_count(atom).to_le_bytes());
    bytes[12..16].copy_from_slice(&i32::from(a.formal_charge).to_le_bytes());
    bytes[16] = u8::from(in_ring[atom]);
    bytes[17] = u8::from(a.aromatic);
    fnv1a64(&bytes)
}

fn iteration_hash(iteration: u32, own: u64, neighbors: &mut [(u8, u64)]) -> u64 {
    neighbors.sort_unstable();
    let mut bytes = Vec::with_capacity(12 + 9 * neighbors.len());
    bytes.extend_from_slice(&iteration.to_le_bytes());
    bytes.extend_from_slice(&own.to_le_bytes());
    for (code, id) in neighbors.iter() {
        bytes.push(*code);
        bytes.extend_from_slice(&id.to_le_bytes());
    }
    fnv1a64(&bytes)
}

/// One kept environment: the iteration it was produced at and its identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Environment {
    pub iteration: u32,
    pub center: usize,
    pub id: u64,
}

/// Identifiers of every distinct circular environment up to `radius`.
///
/// Radius-0 environments (single atoms) are all kept. From iteration 1 on, an
/// environment is dropped when its bond set equals one already kept at an
/// earlier iteration; among equal bond sets within one iteration only the
/// smallest identifier is kept.
pub fn morgan_environments(m: &Molecule, radius: u32) -> Vec<Environment> {
    let n = m.atom_count();
    let rings = ring_flags(m);
    let nbonds = m.bonds().len();

    let mut ids: Vec<u64> = (0..n)
        .map(|a| initial_invariant_with(m, a, &rings.atoms))
        .collect();
    let mut envs: Vec<Environment> = ids
        .iter()
        .enumerate()
        .map(|(center, &id)| Environment {
            iteration: 0,
            center,
            id,
        })
        .collect();

    // Bond sets as bitmaps over bond indices.
    let mut covers: Vec<Vec<bool>> = vec![vec![false; nbonds]; n];
    // Radius-0 environments all cover the empty bond set.
    let mut seen: HashSet<Vec<bool>> = HashSet::from([vec![false; nbonds]]);

    for k in 1..=radius {
        let mut next_ids = Vec::with_capacity(n);
        let mut next_covers = Vec::with_capacity(n);
        for a in 0..n {
            let mut neighbors: Vec<(u8, u64)> = m
                .neighbors(a)
                .map(|(nb, b)| (m.bonds()[b].order.code(), ids[nb]))
                .collect();
            next_ids.push(iteration_hash(k, ids[a], &mut neighbors));

            let mut cover = covers[a].clone();
            for (nb, b) in m.neighbors(a) {
                cover[b] = true;
                for (c, &on) in cover.iter_mut().zip(&covers[nb]) {
                    *c |= on;
                }
            }
            next_covers.push(cover);
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| {
            next_covers[x]
                .cmp(&next_covers[y])
                .then(next_ids[x].cmp(&next_ids[y]))
        });
        let mut kept_this_round: HashSet<&Vec<bool>> = HashSet::new();
        let mut fresh = Vec::new();
        for &a in &order {
            let cover = &next_covers[a];
            if seen.contains(cover) || kept_this_round.contains(cover) {
                continue;
            }
            kept_this_round.insert(cover);
            fresh.push(Environment {
                iteration: k,
                center: a,
                id: next_ids[a],
            });
        }
        seen.extend(kept_this_round.into_iter().cloned());
        envs.extend(fresh);
        ids = next_ids;
        covers = next_covers;
    }
    envs
}

/// Folded circular fingerprint of `m`.
pub fn morgan_fingerprint(
    m: &Molecule,
    cfg: &FingerprintConfig,
) -> Result<BitFingerprint, FeatureError> {
    cfg.validate()?;
    if m.atom_count() == 0 {
        return Err(FeatureError::EmptyMolecule);
    }
    let mut fp = BitFingerprint::zeros(cfg.length);
    for env in morgan_environments(m, cfg.radius) {
        fp.set((env.id % cfg.length as u64) as usize);
    }
    Ok(fp)
}
