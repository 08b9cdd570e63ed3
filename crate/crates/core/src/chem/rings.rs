use super::Molecule;

/// Per-atom and per-bond ring membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingFlags {
    pub atoms: Vec<bool>,
    pub bonds: Vec<bool>,
}

/// Flags every atom and bond lying on at least one cycle.
///
/// A bond is in a ring iff it is not a bridge; an atom is in a ring iff it
/// touches a ring bond. Bridges are found with an iterative lowlink DFS.
pub fn ring_flags(m: &Molecule) -> RingFlags {
    let n = m.atom_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut is_bridge = vec![false; m.bonds().len()];
    let mut time = 0;

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (atom, bond used to enter it, next adjacency position)
        let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(&mut (v, parent_bond, ref mut next)) = stack.last_mut() {
            if let Some(&b) = m.bonds_of(v).get(*next) {
                *next += 1;
                if Some(b) == parent_bond {
                    continue;
                }
                let w = m.bonds()[b].other(v);
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, Some(b), 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let (Some(b), Some(&(parent, _, _))) = (parent_bond, stack.last()) {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        is_bridge[b] = true;
                    }
                }
            }
        }
    }

    let bonds: Vec<bool> = is_bridge.iter().map(|b| !b).collect();
    let mut atoms = vec![false; n];
    for (i, bond) in m.bonds().iter().enumerate() {
        if bonds[i] {
            atoms[bond.begin] = true;
            atoms[bond.end] = true;
        }
    }
    RingFlags { atoms, bonds }
}
