use std::collections::BTreeMap;
use std::fmt;

use super::elements::{self, atomic_number, can_be_aromatic};
use super::{Atom, Bond, BondOrder, Molecule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptyInput,
    UnmatchedParenthesis,
    UnmatchedRingClosure,
    UnknownToken,
    MultiComponentUnsupported,
    InvalidBracketAtom,
    /// A bond symbol, branch or ring digit with no atom to attach to.
    DanglingBond,
    /// Ring closure onto the same atom or onto an already bonded pair.
    InvalidRingBond,
    ConflictingRingBond,
}

/// A SMILES syntax error at a byte offset of the input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParseErrorKind::EmptyInput => "empty input",
            ParseErrorKind::UnmatchedParenthesis => "unmatched parenthesis",
            ParseErrorKind::UnmatchedRingClosure => "unmatched ring closure",
            ParseErrorKind::UnknownToken => "unknown token",
            ParseErrorKind::MultiComponentUnsupported => "multi-component SMILES not supported",
            ParseErrorKind::InvalidBracketAtom => "invalid bracket atom",
            ParseErrorKind::DanglingBond => "bond or branch without a preceding atom",
            ParseErrorKind::InvalidRingBond => "ring closure creates a self or duplicate bond",
            ParseErrorKind::ConflictingRingBond => "ring closure bond symbols disagree",
        };
        f.write_str(s)
    }
}

fn err<T>(kind: ParseErrorKind, offset: usize) -> Result<T, ParseError> {
    Err(ParseError { kind, offset })
}

struct OpenRing {
    atom: usize,
    order: Option<BondOrder>,
    offset: usize,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    prev: Option<usize>,
    /// (atom to resume from, offset of '(')
    branches: Vec<(usize, usize)>,
    pending_bond: Option<(BondOrder, usize)>,
    rings: BTreeMap<u32, OpenRing>,
}

/// Parses a single-component SMILES string into a [`Molecule`].
pub fn parse_smiles(input: &str) -> Result<Molecule, ParseError> {
    if input.is_empty() {
        return err(ParseErrorKind::EmptyInput, 0);
    }
    let mut p = Parser {
        bytes: input.as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        bonds: Vec::new(),
        prev: None,
        branches: Vec::new(),
        pending_bond: None,
        rings: BTreeMap::new(),
    };
    p.run()?;
    Ok(Molecule::new(p.atoms, p.bonds, input.to_owned()))
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn run(&mut self) -> Result<(), ParseError> {
        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                b'(' => {
                    let Some(prev) = self.prev else {
                        return err(ParseErrorKind::DanglingBond, start);
                    };
                    if self.pending_bond.is_some() {
                        return err(ParseErrorKind::DanglingBond, start);
                    }
                    self.branches.push((prev, start));
                    self.pos += 1;
                    if matches!(self.peek(), Some(b')' | b'(')) {
                        return err(ParseErrorKind::DanglingBond, self.pos);
                    }
                }
                b')' => {
                    let Some((resume, _)) = self.branches.pop() else {
                        return err(ParseErrorKind::UnmatchedParenthesis, start);
                    };
                    if let Some((_, off)) = self.pending_bond {
                        return err(ParseErrorKind::DanglingBond, off);
                    }
                    self.prev = Some(resume);
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' => {
                    if self.prev.is_none() || self.pending_bond.is_some() {
                        return err(ParseErrorKind::DanglingBond, start);
                    }
                    let order = match c {
                        b'-' => BondOrder::Single,
                        b'=' => BondOrder::Double,
                        b'#' => BondOrder::Triple,
                        _ => BondOrder::Aromatic,
                    };
                    self.pending_bond = Some((order, start));
                    self.pos += 1;
                }
                // Directional single bonds: geometry is discarded, the bond is kept implicit.
                b'/' | b'\\' => {
                    if self.prev.is_none() {
                        return err(ParseErrorKind::DanglingBond, start);
                    }
                    self.pos += 1;
                }
                b'0'..=b'9' => {
                    self.pos += 1;
                    self.ring_closure(u32::from(c - b'0'), start)?;
                }
                b'%' => {
                    let digits = self.bytes.get(start + 1..start + 3);
                    match digits {
                        Some([a, b]) if a.is_ascii_digit() && b.is_ascii_digit() => {
                            self.pos += 3;
                            let n = u32::from(a - b'0') * 10 + u32::from(b - b'0');
                            self.ring_closure(n, start)?;
                        }
                        _ => return err(ParseErrorKind::UnknownToken, start),
                    }
                }
                b'.' => return err(ParseErrorKind::MultiComponentUnsupported, start),
                b'[' => {
                    let atom = self.bracket_atom()?;
                    self.add_atom(atom, start)?;
                }
                _ => {
                    let atom = self.organic_atom()?;
                    self.add_atom(atom, start)?;
                }
            }
        }
        if let Some((_, off)) = self.pending_bond {
            return err(ParseErrorKind::DanglingBond, off);
        }
        if let Some(&(_, off)) = self.branches.last() {
            return err(ParseErrorKind::UnmatchedParenthesis, off);
        }
        if let Some(open) = self.rings.values().min_by_key(|r| r.offset) {
            return err(ParseErrorKind::UnmatchedRingClosure, open.offset);
        }
        Ok(())
    }

    fn default_order(&self, a: usize, b: usize) -> BondOrder {
        if self.atoms[a].aromatic && self.atoms[b].aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }

    fn add_atom(&mut self, atom: Atom, _offset: usize) -> Result<(), ParseError> {
        let idx = self.atoms.len();
        self.atoms.push(atom);
        if let Some(prev) = self.prev {
            let order = match self.pending_bond.take() {
                Some((o, _)) => o,
                None => self.default_order(prev, idx),
            };
            self.bonds.push(Bond {
                begin: prev,
                end: idx,
                order,
            });
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn ring_closure(&mut self, label: u32, offset: usize) -> Result<(), ParseError> {
        let Some(current) = self.prev else {
            return err(ParseErrorKind::DanglingBond, offset);
        };
        let order = self.pending_bond.take().map(|(o, _)| o);
        match self.rings.remove(&label) {
            None => {
                self.rings.insert(
                    label,
                    OpenRing {
                        atom: current,
                        order,
                        offset,
                    },
                );
            }
            Some(open) => {
                if open.atom == current
                    || self.bonds.iter().any(|b| b.touches(open.atom) && b.touches(current))
                {
                    return err(ParseErrorKind::InvalidRingBond, offset);
                }
                let order = match (open.order, order) {
                    (Some(a), Some(b)) if a != b => {
                        return err(ParseErrorKind::ConflictingRingBond, offset)
                    }
                    (Some(a), _) | (None, Some(a)) => a,
                    (None, None) => self.default_order(open.atom, current),
                };
                self.bonds.push(Bond {
                    begin: open.atom,
                    end: current,
                    order,
                });
            }
        }
        Ok(())
    }

    fn organic_atom(&mut self) -> Result<Atom, ParseError> {
        let start = self.pos;
        let c = self.bytes[start];
        let next = self.bytes.get(start + 1).copied();
        let (element, aromatic, len) = match (c, next) {
            (b'C', Some(b'l')) => (elements::CHLORINE, false, 2),
            (b'B', Some(b'r')) => (elements::BROMINE, false, 2),
            (b'B', _) => (elements::BORON, false, 1),
            (b'C', _) => (elements::CARBON, false, 1),
            (b'N', _) => (elements::NITROGEN, false, 1),
            (b'O', _) => (elements::OXYGEN, false, 1),
            (b'P', _) => (elements::PHOSPHORUS, false, 1),
            (b'S', _) => (elements::SULFUR, false, 1),
            (b'F', _) => (elements::FLUORINE, false, 1),
            (b'I', _) => (elements::IODINE, false, 1),
            (b'b', _) => (elements::BORON, true, 1),
            (b'c', _) => (elements::CARBON, true, 1),
            (b'n', _) => (elements::NITROGEN, true, 1),
            (b'o', _) => (elements::OXYGEN, true, 1),
            (b'p', _) => (elements::PHOSPHORUS, true, 1),
            (b's', _) => (elements::SULFUR, true, 1),
            _ => return err(ParseErrorKind::UnknownToken, start),
        };
        self.pos += len;
        Ok(Atom {
            element,
            aromatic,
            formal_charge: 0,
            explicit_h: None,
            isotope: None,
        })
    }

    /// `[` isotope? symbol chirality? hcount? charge? class? `]`
    fn bracket_atom(&mut self) -> Result<Atom, ParseError> {
        let open = self.pos;
        let close = match self.bytes[open..].iter().position(|&b| b == b']') {
            Some(i) => open + i,
            None => return err(ParseErrorKind::InvalidBracketAtom, open),
        };
        let body = &self.bytes[open + 1..close];
        let bad = |i: usize| ParseError {
            kind: ParseErrorKind::InvalidBracketAtom,
            offset: open + 1 + i,
        };
        let mut i = 0;

        let digits_at = |i: usize| body[i..].iter().take_while(|b| b.is_ascii_digit()).count();

        let n = digits_at(i);
        let isotope = if n > 0 {
            let v: u16 = std::str::from_utf8(&body[i..i + n])
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(i))?;
            i += n;
            Some(v)
        } else {
            None
        };

        let (element, aromatic) = {
            let first = *body.get(i).ok_or_else(|| bad(i))?;
            let second = body.get(i + 1).copied();
            if first.is_ascii_lowercase() {
                let two = second
                    .filter(u8::is_ascii_lowercase)
                    .map(|s| [first, s])
                    .filter(|t| t == b"se" || t == b"as");
                match two {
                    Some(t) => {
                        i += 2;
                        let sym = if &t == b"se" { "Se" } else { "As" };
                        (atomic_number(sym).unwrap(), true)
                    }
                    None => {
                        let sym = (first as char).to_ascii_uppercase().to_string();
                        let z = atomic_number(&sym).filter(|&z| can_be_aromatic(z));
                        let z = z.ok_or_else(|| bad(i))?;
                        i += 1;
                        (z, true)
                    }
                }
            } else if first.is_ascii_uppercase() {
                let two = second.filter(u8::is_ascii_lowercase).and_then(|s| {
                    let sym = [first as char, s as char].iter().collect::<String>();
                    atomic_number(&sym)
                });
                match two {
                    Some(z) => {
                        i += 2;
                        (z, false)
                    }
                    None => {
                        let z = atomic_number(&(first as char).to_string()).ok_or_else(|| bad(i))?;
                        i += 1;
                        (z, false)
                    }
                }
            } else {
                return Err(bad(i));
            }
        };

        // Chirality (@, @@, @TH1, @SP2, ...) is discarded.
        if body.get(i) == Some(&b'@') {
            while body.get(i) == Some(&b'@') {
                i += 1;
            }
            let class = body.get(i..i + 2);
            if matches!(class, Some(b"TH" | b"AL" | b"SP" | b"TB" | b"OH")) && digits_at(i + 2) > 0 {
                i += 2;
                i += digits_at(i);
            }
        }

        let mut explicit_h = 0u8;
        if body.get(i) == Some(&b'H') {
            i += 1;
            let n = digits_at(i);
            explicit_h = if n > 0 {
                let v = std::str::from_utf8(&body[i..i + n])
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad(i))?;
                i += n;
                v
            } else {
                1
            };
        }

        let mut formal_charge = 0i32;
        if let Some(&sign @ (b'+' | b'-')) = body.get(i) {
            let unit = if sign == b'+' { 1 } else { -1 };
            i += 1;
            let n = digits_at(i);
            if n > 0 {
                let v: i32 = std::str::from_utf8(&body[i..i + n])
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad(i))?;
                formal_charge = unit * v;
                i += n;
            } else {
                formal_charge = unit;
                while body.get(i) == Some(&sign) {
                    formal_charge += unit;
                    i += 1;
                }
            }
            if !(-15..=15).contains(&formal_charge) {
                return Err(bad(i));
            }
        }

        // Atom class (:n) is discarded.
        if body.get(i) == Some(&b':') {
            i += 1;
            let n = digits_at(i);
            if n == 0 {
                return Err(bad(i));
            }
            i += n;
        }

        if i != body.len() {
            return Err(bad(i));
        }
        self.pos = close + 1;
        Ok(Atom {
            element,
            aromatic,
            formal_charge: formal_charge as i8,
            explicit_h: Some(explicit_h),
            isotope,
        })
    }
}
