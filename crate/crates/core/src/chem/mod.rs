//! Molecular graphs parsed from SMILES.
//!
//! Only the subset of the grammar that appears in drug-like database exports is
//! supported: the organic subset, bracket atoms, branches, ring closures and
//! explicit bond symbols. Stereo markers are accepted and dropped.

mod elements;
mod parser;
mod rings;

pub use elements::{atomic_number, can_be_aromatic, default_valences, symbol};
pub use parser::{parse_smiles, ParseError, ParseErrorKind};
pub use rings::{ring_flags, RingFlags};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Fixed integer code used in fingerprint neighbor tuples.
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }

    /// Contribution to an atom's valence, doubled so aromatic bonds stay integral.
    fn twice_valence(self) -> u32 {
        match self {
            BondOrder::Single => 2,
            BondOrder::Double => 4,
            BondOrder::Triple => 6,
            BondOrder::Aromatic => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    /// Atomic number, 1..=118.
    pub element: u8,
    pub aromatic: bool,
    pub formal_charge: i8,
    /// Hydrogen count written inside brackets; `None` for organic-subset atoms.
    pub explicit_h: Option<u8>,
    pub isotope: Option<u16>,
}

impl Atom {
    pub fn is_bracket(&self) -> bool {
        self.explicit_h.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub begin: usize,
    pub end: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.begin == atom {
            self.end
        } else {
            self.begin
        }
    }

    pub fn touches(&self, atom: usize) -> bool {
        self.begin == atom || self.end == atom
    }
}

/// An immutable molecular graph in SMILES reading order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Bond indices incident to each atom, in bond-creation order.
    adjacency: Vec<Vec<usize>>,
    source_smiles: String,
}

impl Molecule {
    pub(crate) fn new(atoms: Vec<Atom>, bonds: Vec<Bond>, source_smiles: String) -> Self {
        let mut adjacency = vec![Vec::new(); atoms.len()];
        for (i, b) in bonds.iter().enumerate() {
            adjacency[b.begin].push(i);
            adjacency[b.end].push(i);
        }
        Self {
            atoms,
            bonds,
            adjacency,
            source_smiles,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn source_smiles(&self) -> &str {
        &self.source_smiles
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    /// Indices of bonds incident to `atom`.
    pub fn bonds_of(&self, atom: usize) -> &[usize] {
        &self.adjacency[atom]
    }

    /// `(neighbor, bond index)` pairs for `atom`.
    pub fn neighbors(&self, atom: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency[atom]
            .iter()
            .map(move |&b| (self.bonds[b].other(atom), b))
    }

    /// Number of non-hydrogen neighbors.
    pub fn heavy_degree(&self, atom: usize) -> usize {
        self.neighbors(atom)
            .filter(|&(n, _)| self.atoms[n].element != elements::HYDROGEN)
            .count()
    }

    /// Implicit hydrogens on `atom`.
    ///
    /// Bracket atoms carry exactly their written H count. Organic-subset atoms
    /// take the smallest default valence that accommodates their bond-order sum
    /// (aromatic bonds count 1.5) and fill the remainder with hydrogens, floored
    /// at zero. Aromatic atoms always use their lowest default valence, so
    /// thiophene sulfur gets no hydrogen.
    pub fn implicit_h_count(&self, atom: usize) -> u32 {
        let a = &self.atoms[atom];
        if let Some(h) = a.explicit_h {
            return u32::from(h);
        }
        let valences = default_valences(a.element);
        if valences.is_empty() {
            return 0;
        }
        let twice_sum: u32 = self.adjacency[atom]
            .iter()
            .map(|&b| self.bonds[b].order.twice_valence())
            .sum();
        let target = if a.aromatic {
            valences[0]
        } else {
            valences
                .iter()
                .copied()
                .find(|&v| 2 * v >= twice_sum)
                .unwrap_or(valences[valences.len() - 1])
        };
        (2 * target).saturating_sub(twice_sum) / 2
    }

    /// All hydrogens attached to `atom`: implicit, bracket-written, and explicit H atoms in the graph.
    pub fn total_h_count(&self, atom: usize) -> u32 {
        let graph_h = self
            .neighbors(atom)
            .filter(|&(n, _)| self.atoms[n].element == elements::HYDROGEN)
            .count() as u32;
        self.implicit_h_count(atom) + graph_h
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms
            .iter()
            .filter(|a| a.element != elements::HYDROGEN)
            .count()
    }
}
