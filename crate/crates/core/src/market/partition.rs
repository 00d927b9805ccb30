use std::collections::BTreeMap;

use thiserror::Error;

use super::{Market, ScenarioSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("partitions cover different ground sets")]
pub struct GroundSetMismatch;

/// A partition of a set of scenario indices; the finite stand-in for a
/// sigma-algebra. Atoms are kept sorted by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    atoms: Vec<ScenarioSet>,
}

impl Partition {
    /// Builds a partition from disjoint nonempty atoms.
    pub fn new(mut atoms: Vec<ScenarioSet>) -> Self {
        atoms.retain(|a| !a.is_empty());
        atoms.sort_by_key(|a| *a.first().unwrap());
        debug_assert!(
            atoms.iter().map(|a| a.len()).sum::<usize>()
                == atoms
                    .iter()
                    .flatten()
                    .copied()
                    .collect::<ScenarioSet>()
                    .len(),
            "atoms overlap"
        );
        Partition { atoms }
    }

    pub fn trivial(ground: ScenarioSet) -> Self {
        Partition::new(vec![ground])
    }

    /// Groups `ground` by equal keys.
    pub fn by_key<K: Ord>(
        ground: impl IntoIterator<Item = usize>,
        key: impl Fn(usize) -> K,
    ) -> Self {
        let mut groups: BTreeMap<K, ScenarioSet> = BTreeMap::new();
        for i in ground {
            groups.entry(key(i)).or_default().insert(i);
        }
        Partition::new(groups.into_values().collect())
    }

    pub fn atoms(&self) -> &[ScenarioSet] {
        &self.atoms
    }

    pub fn ground(&self) -> ScenarioSet {
        self.atoms.iter().flatten().copied().collect()
    }

    pub fn atom_of(&self, scenario: usize) -> Option<&ScenarioSet> {
        self.atoms.iter().find(|a| a.contains(&scenario))
    }

    pub fn contains_atom(&self, atom: &ScenarioSet) -> bool {
        self.atoms.iter().any(|a| a == atom)
    }

    /// Whether every atom of `self` lies inside an atom of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.atoms.iter().all(|a| {
            coarser
                .atom_of(*a.first().unwrap())
                .is_some_and(|c| a.is_subset(c))
        })
    }

    /// The partition induced on `subset` (atoms intersected, empties dropped).
    pub fn restrict(&self, subset: &ScenarioSet) -> Partition {
        Partition::new(self.atoms.iter().map(|a| a & subset).collect())
    }
}

/// Coarsest common refinement of two partitions of the same ground set.
pub fn refine(p: &Partition, q: &Partition) -> Result<Partition, GroundSetMismatch> {
    if p.ground() != q.ground() {
        return Err(GroundSetMismatch);
    }
    let atoms = p
        .atoms
        .iter()
        .flat_map(|a| q.atoms.iter().map(move |b| a & b))
        .collect();
    Ok(Partition::new(atoms))
}

/// `F_0, …, F_T`: scenarios grouped by equality of their price history up
/// to each time.
pub fn natural_filtration(m: &Market) -> Vec<Partition> {
    (0..=m.horizon())
        .map(|t| Partition::by_key(0..m.len(), |i| m.history(t, i)))
        .collect()
}
