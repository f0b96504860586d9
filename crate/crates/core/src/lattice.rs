//! Geometry of `Z^d` and its periodic tori.
//!
//! Every [`Vertex`] carries its own dimension, so simulations at several `d`
//! can coexist in one process. Functions that are symmetric under the
//! hyperoctahedral group (coordinate permutations and sign flips) are stored
//! per [`CanonicalVertex`]; [`CanonicalBall`] is the symmetry-reduced
//! sup-norm ball those solvers work on.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::{Error, Result};

type Coords = SmallVec<[i32; 8]>;

/// A point of `Z^d` (or of a torus, with coordinates reduced into `0..L`).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex(Coords);

impl Vertex {
    pub fn new(coords: impl IntoIterator<Item = i32>) -> Result<Self> {
        let coords: Coords = coords.into_iter().collect();
        if coords.is_empty() {
            return Err(Error::usage("a vertex needs dimension d >= 1"));
        }
        Ok(Vertex(coords))
    }

    /// The origin `O` of `Z^d`.
    pub fn origin(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be >= 1");
        Vertex(smallvec::smallvec![0; dim])
    }

    /// The unit vector `e_axis` (zero-based axis).
    pub fn unit(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for d={dim}");
        let mut v = Self::origin(dim);
        v.0[axis] = 1;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn l1_norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs() as u64).sum()
    }

    pub fn sup_norm(&self) -> u32 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// Neighbor number `k` on the infinite lattice, `k in 0..2d`.
    /// Even `k` steps `+1` along axis `k / 2`, odd `k` steps `-1`.
    #[inline]
    pub fn step(&self, k: usize) -> Vertex {
        let mut next = self.clone();
        let axis = k / 2;
        next.0[axis] += if k % 2 == 0 { 1 } else { -1 };
        next
    }

    /// True iff the two vertices differ by `±1` in exactly one coordinate.
    pub fn is_lattice_neighbor(&self, other: &Vertex) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let mut diffs = self.0.iter().zip(&other.0).filter(|(a, b)| a != b);
        matches!(
            (diffs.next(), diffs.next()),
            (Some((a, b)), None) if (a - b).abs() == 1
        )
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Periodic box `(Z / L Z)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Torus {
    dim: usize,
    side: u32,
}

impl Torus {
    /// `side` must be even and at least 4, so `e_1` and `O` are never
    /// identified and every vertex has `2d` distinct neighbors.
    pub fn new(dim: usize, side: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("torus dimension must be >= 1"));
        }
        if side < 4 || side % 2 != 0 {
            return Err(Error::usage(format!(
                "torus side must be even and >= 4, got {side}"
            )));
        }
        let volume = (side as u128).checked_pow(dim as u32);
        if !matches!(volume, Some(v) if v <= u32::MAX as u128) {
            return Err(Error::usage(format!(
                "torus {side}^{dim} is too large to simulate"
            )));
        }
        Ok(Torus { dim, side })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> u32 {
        self.side
    }

    pub fn volume(&self) -> usize {
        (self.side as usize).pow(self.dim as u32)
    }

    /// Coordinatewise reduction modulo `L` into `0..L`.
    pub fn wrap(&self, v: &Vertex) -> Vertex {
        let l = self.side as i32;
        Vertex(v.0.iter().map(|c| c.rem_euclid(l)).collect())
    }

    /// Row-major index of a (wrapped) vertex; the origin has index 0.
    pub fn index_of(&self, v: &Vertex) -> usize {
        debug_assert_eq!(v.dim(), self.dim);
        let l = self.side as i64;
        v.0.iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.side as usize + (c as i64).rem_euclid(l) as usize)
    }

    pub fn vertex_at(&self, mut index: usize) -> Vertex {
        let l = self.side as usize;
        let mut coords = Coords::with_capacity(self.dim);
        for _ in 0..self.dim {
            coords.push((index % l) as i32);
            index /= l;
        }
        Vertex(coords)
    }

    /// Index of neighbor `k in 0..2d` of the vertex at `index`.
    #[inline]
    pub fn neighbor_index(&self, index: usize, k: usize) -> usize {
        let l = self.side as usize;
        let stride = l.pow((k / 2) as u32);
        let c = (index / stride) % l;
        if k % 2 == 0 {
            if c + 1 == l {
                index + stride - l * stride
            } else {
                index + stride
            }
        } else if c == 0 {
            index + (l - 1) * stride
        } else {
            index - stride
        }
    }
}

/// Where a simulation lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    /// The infinite lattice `Z^d`.
    Lattice { dim: usize },
    Torus(Torus),
}

impl Geometry {
    pub fn dim(&self) -> usize {
        match self {
            Geometry::Lattice { dim } => *dim,
            Geometry::Torus(t) => t.dim(),
        }
    }

    pub fn torus(&self) -> Option<&Torus> {
        match self {
            Geometry::Torus(t) => Some(t),
            Geometry::Lattice { .. } => None,
        }
    }

    /// Neighbor `k in 0..2d` of `v`, wrapped on a torus.
    #[inline]
    pub fn neighbor(&self, v: &Vertex, k: usize) -> Vertex {
        let n = v.step(k);
        match self {
            Geometry::Lattice { .. } => n,
            Geometry::Torus(t) => t.wrap(&n),
        }
    }

    pub fn check_vertex(&self, v: &Vertex) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::usage(format!(
                "vertex {v:?} has dimension {} but geometry has {}",
                v.dim(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// All `2d` neighbors of `v`.
pub fn neighbors(v: &Vertex, geometry: &Geometry) -> Result<Vec<Vertex>> {
    geometry.check_vertex(v)?;
    Ok((0..2 * v.dim()).map(|k| geometry.neighbor(v, k)).collect())
}

/// Orbit representative under coordinate permutations and sign flips: the
/// absolute coordinates sorted in nonincreasing order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalVertex(SmallVec<[u32; 8]>);

impl CanonicalVertex {
    pub fn from_sorted(values: impl IntoIterator<Item = u32>) -> Result<Self> {
        let values: SmallVec<[u32; 8]> = values.into_iter().collect();
        if values.is_empty() || values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::usage("canonical values must be nonempty and nonincreasing"));
        }
        Ok(CanonicalVertex(values))
    }

    pub fn origin(dim: usize) -> Self {
        CanonicalVertex(smallvec::smallvec![0; dim])
    }

    /// Class of `e_1`.
    pub fn unit(dim: usize) -> Self {
        let mut c = Self::origin(dim);
        c.0[0] = 1;
        c
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn sup_norm(&self) -> u32 {
        self.0[0]
    }

    pub fn squared_norm(&self) -> u64 {
        self.0.iter().map(|&a| (a as u64) * (a as u64)).sum()
    }

    /// Representative vertex with nonnegative coordinates.
    pub fn representative(&self) -> Vertex {
        Vertex(self.0.iter().map(|&a| a as i32).collect())
    }

    /// Classes of the `2d` lattice neighbors of the representative, with
    /// repetition.
    pub fn lattice_neighbors(&self) -> impl Iterator<Item = CanonicalVertex> + '_ {
        (0..2 * self.dim()).map(move |k| {
            let mut vals = self.0.clone();
            let slot = k / 2;
            vals[slot] = if k % 2 == 0 {
                vals[slot] + 1
            } else {
                vals[slot].abs_diff(1)
            };
            vals.sort_unstable_by(|a, b| b.cmp(a));
            CanonicalVertex(vals)
        })
    }
}

impl fmt::Debug for CanonicalVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

pub fn canonicalize(v: &Vertex) -> CanonicalVertex {
    let mut vals: SmallVec<[u32; 8]> = v.0.iter().map(|c| c.unsigned_abs()).collect();
    vals.sort_unstable_by(|a, b| b.cmp(a));
    CanonicalVertex(vals)
}

/// All nonincreasing sequences of length `dim` whose first entry lies in
/// `first`, in lexicographic order of the reversed-priority sequence.
pub(crate) fn nonincreasing_sequences(
    dim: usize,
    first: std::ops::RangeInclusive<u32>,
) -> Vec<CanonicalVertex> {
    fn extend(prefix: &mut SmallVec<[u32; 8]>, dim: usize, out: &mut Vec<CanonicalVertex>) {
        if prefix.len() == dim {
            out.push(CanonicalVertex(prefix.clone()));
            return;
        }
        let cap = *prefix.last().expect("prefix is nonempty");
        for a in 0..=cap {
            prefix.push(a);
            extend(prefix, dim, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for a in first {
        let mut prefix = SmallVec::new();
        prefix.push(a);
        extend(&mut prefix, dim, &mut out);
    }
    out
}

/// Symmetry-reduced sup-norm ball `{x : |x|_inf < radius}` of `Z^d`.
///
/// Each class stores the multiplicity of its `2d` lattice neighbors grouped by
/// target class. Neighbors at sup-norm `radius` lie outside the ball and are
/// kept in a separate exterior table so that boundary data can be supplied.
#[derive(Debug, Clone)]
pub struct CanonicalBall {
    dim: usize,
    radius: u32,
    classes: Vec<CanonicalVertex>,
    lookup: HashMap<CanonicalVertex, usize>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    counts: Vec<u32>,
    ext_offsets: Vec<usize>,
    ext_targets: Vec<CanonicalVertex>,
    ext_counts: Vec<u32>,
}

impl CanonicalBall {
    /// Feasible sizes only: `dim >= 1`, `radius >= 2` and at most a few
    /// million classes.
    pub fn new(dim: usize, radius: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("dimension must be >= 1"));
        }
        if radius < 2 {
            return Err(Error::usage(format!("ball radius must be >= 2, got {radius}")));
        }
        let count = binomial(radius as u64 - 1 + dim as u64, dim as u64);
        if count > 5_000_000 {
            return Err(Error::usage(format!(
                "ball d={dim}, R={radius} has {count} canonical classes; too many"
            )));
        }
        let classes = nonincreasing_sequences(dim, 0..=radius - 1);
        let lookup: HashMap<_, _> = classes.iter().cloned().zip(0..).collect();

        let mut offsets = Vec::with_capacity(classes.len() + 1);
        let mut targets = Vec::new();
        let mut counts = Vec::new();
        let mut ext_offsets = Vec::with_capacity(classes.len() + 1);
        let mut ext_targets = Vec::new();
        let mut ext_counts = Vec::new();
        offsets.push(0);
        ext_offsets.push(0);
        for class in &classes {
            let mut inner: SmallVec<[(usize, u32); 16]> = SmallVec::new();
            let mut outer: SmallVec<[(CanonicalVertex, u32); 4]> = SmallVec::new();
            for n in class.lattice_neighbors() {
                match lookup.get(&n) {
                    Some(&j) => match inner.iter_mut().find(|(t, _)| *t == j) {
                        Some(e) => e.1 += 1,
                        None => inner.push((j, 1)),
                    },
                    None => match outer.iter_mut().find(|(t, _)| *t == n) {
                        Some(e) => e.1 += 1,
                        None => outer.push((n, 1)),
                    },
                }
            }
            for (t, c) in inner {
                targets.push(t);
                counts.push(c);
            }
            for (t, c) in outer {
                ext_targets.push(t);
                ext_counts.push(c);
            }
            offsets.push(targets.len());
            ext_offsets.push(ext_targets.len());
        }
        Ok(CanonicalBall {
            dim,
            radius,
            classes,
            lookup,
            offsets,
            targets,
            counts,
            ext_offsets,
            ext_targets,
            ext_counts,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[CanonicalVertex] {
        &self.classes
    }

    pub fn class(&self, index: usize) -> &CanonicalVertex {
        &self.classes[index]
    }

    pub fn index_of(&self, class: &CanonicalVertex) -> Option<usize> {
        self.lookup.get(class).copied()
    }

    /// Index of the origin class; always 0.
    pub fn origin(&self) -> usize {
        0
    }

    /// Index of the class of `e_1`.
    pub fn unit(&self) -> usize {
        self.lookup[&CanonicalVertex::unit(self.dim)]
    }

    /// `(target class, multiplicity)` pairs of interior neighbors.
    #[inline]
    pub fn interior_neighbors(&self, index: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let range = self.offsets[index]..self.offsets[index + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.counts[range].iter().copied())
    }

    /// `(exterior class, multiplicity)` pairs of neighbors outside the ball.
    pub fn exterior_neighbors(
        &self,
        index: usize,
    ) -> impl Iterator<Item = (&CanonicalVertex, u32)> + '_ {
        let range = self.ext_offsets[index]..self.ext_offsets[index + 1];
        self.ext_targets[range.clone()]
            .iter()
            .zip(self.ext_counts[range].iter().copied())
    }

    /// Number of lattice neighbors of class `index` that lie outside the ball.
    pub fn exterior_count(&self, index: usize) -> u32 {
        self.exterior_neighbors(index).map(|(_, c)| c).sum()
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}
