use std::collections::HashMap;

use rand::Rng;

use crate::lattice::Vertex;

/// Finite set of infected vertices with O(1) expected insert, remove,
/// membership and uniform sampling.
///
/// Members live in a dense array; a hash map holds each member's slot so a
/// removal can swap the last member into the freed slot.
#[derive(Debug, Clone, Default)]
pub struct SparseConfig {
    members: Vec<Vertex>,
    slots: HashMap<Vertex, usize>,
}

impl SparseConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// The configuration `{O}`.
    pub fn single(v: Vertex) -> Self {
        let mut c = Self::new();
        c.insert(v);
        c
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.slots.contains_key(v)
    }

    /// Returns false if `v` was already present.
    pub fn insert(&mut self, v: Vertex) -> bool {
        if self.slots.contains_key(&v) {
            return false;
        }
        self.slots.insert(v.clone(), self.members.len());
        self.members.push(v);
        true
    }

    /// Returns false if `v` was absent.
    pub fn remove(&mut self, v: &Vertex) -> bool {
        let Some(slot) = self.slots.remove(v) else {
            return false;
        };
        self.members.swap_remove(slot);
        if let Some(moved) = self.members.get(slot) {
            *self.slots.get_mut(moved).expect("moved member is indexed") = slot;
        }
        true
    }

    /// Uniformly random member, `None` when empty.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<&Vertex> {
        if self.members.is_empty() {
            None
        } else {
            Some(&self.members[rng.random_range(0..self.members.len())])
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vertex> {
        self.members.iter()
    }

    #[cfg(test)]
    pub(crate) fn check_consistency(&self) {
        assert_eq!(self.members.len(), self.slots.len());
        for (i, v) in self.members.iter().enumerate() {
            assert_eq!(self.slots[v], i);
        }
    }
}

impl FromIterator<Vertex> for SparseConfig {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut c = SparseConfig::new();
        for v in iter {
            c.insert(v);
        }
        c
    }
}

impl PartialEq for SparseConfig {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.members.iter().all(|v| other.contains(v))
    }
}

impl Eq for SparseConfig {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use proptest::prelude::*;

    fn v(x: i32, y: i32) -> Vertex {
        Vertex::new([x, y]).unwrap()
    }

    #[test]
    fn insert_remove_roundtrip() {
        let mut c = SparseConfig::new();
        assert!(c.insert(v(0, 0)));
        assert!(!c.insert(v(0, 0)));
        assert!(c.insert(v(1, 0)));
        assert!(c.insert(v(2, 0)));
        assert!(c.remove(&v(0, 0)));
        assert!(!c.remove(&v(0, 0)));
        c.check_consistency();
        assert_eq!(c.len(), 2);
        assert!(c.contains(&v(2, 0)) && !c.contains(&v(0, 0)));
    }

    #[test]
    fn sampling_is_uniform() {
        let c: SparseConfig = (0..4).map(|i| v(i, 0)).collect();
        let mut rng = substream(1, 0);
        let mut counts = [0u32; 4];
        let n = 40_000;
        for _ in 0..n {
            counts[c.sample(&mut rng).unwrap().coords()[0] as usize] += 1;
        }
        let sd = (n as f64 * 0.25 * 0.75).sqrt();
        for k in counts {
            assert!((k as f64 - n as f64 / 4.0).abs() < 4.0 * sd, "{counts:?}");
        }
        assert!(SparseConfig::new().sample(&mut rng).is_none());
    }

    proptest! {
        #[test]
        fn matches_hashset_model(ops in proptest::collection::vec((any::<bool>(), 0i32..8, 0i32..8), 0..200)) {
            let mut c = SparseConfig::new();
            let mut model = std::collections::HashSet::new();
            for (add, x, y) in ops {
                if add {
                    prop_assert_eq!(c.insert(v(x, y)), model.insert(v(x, y)));
                } else {
                    prop_assert_eq!(c.remove(&v(x, y)), model.remove(&v(x, y)));
                }
            }
            c.check_consistency();
            prop_assert_eq!(c.len(), model.len());
            for m in &model {
                prop_assert!(c.contains(m));
            }
        }
    }
}
