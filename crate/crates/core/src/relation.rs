//! Binary relations: finite relations over an indexed ground set, predicate
//! views over arbitrary carriers, closures, paths and `S`-closedness.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RelationError {
    #[error("pair ({0}, {1}) out of range for ground set of size {2}")]
    OutOfRange(usize, usize, usize),
    #[error("ground set must be non-empty")]
    EmptyGround,
    #[error("map has length {got}, expected {expected}")]
    MapLength { got: usize, expected: usize },
    #[error("map sends {from} to {to}, outside ground set of size {n}")]
    MapOutOfRange { from: usize, to: usize, n: usize },
}

/// Membership test for ordered pairs of a carrier.
pub trait Relation<E: ?Sized> {
    fn contains(&self, a: &E, b: &E) -> bool;

    /// `a` and `b` are comparable: `(a, b)` or `(b, a)` is in the relation.
    fn comparable(&self, a: &E, b: &E) -> bool {
        self.contains(a, b) || self.contains(b, a)
    }
}

impl<E: ?Sized, R: Relation<E> + ?Sized> Relation<E> for &R {
    fn contains(&self, a: &E, b: &E) -> bool {
        (**self).contains(a, b)
    }
}

/// A relation given by a deterministic comparability predicate, for carriers
/// that cannot be enumerated (the plane, grid functions).
#[derive(Clone, Copy)]
pub struct RelationView<F>(pub F);

impl<E: ?Sized, F: Fn(&E, &E) -> bool> Relation<E> for RelationView<F> {
    fn contains(&self, a: &E, b: &E) -> bool {
        (self.0)(a, b)
    }
}

impl<F> fmt::Debug for RelationView<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RelationView(..)")
    }
}

/// The universal relation: every pair is related. With it the iteration
/// engine reduces to the unrestricted contraction setting.
#[derive(Debug, Clone, Copy, Default)]
pub struct Universal;

impl<E: ?Sized> Relation<E> for Universal {
    fn contains(&self, _: &E, _: &E) -> bool {
        true
    }
}

/// Symmetric closure of an arbitrary relation, evaluated lazily.
#[derive(Debug, Clone, Copy)]
pub struct Symmetrized<R>(pub R);

impl<E: ?Sized, R: Relation<E>> Relation<E> for Symmetrized<R> {
    fn contains(&self, a: &E, b: &E) -> bool {
        self.0.comparable(a, b)
    }
}

/// An endomap of a carrier.
pub trait SelfMap<E> {
    fn apply(&self, x: &E) -> E;
}

impl<E, F: Fn(&E) -> E> SelfMap<E> for F {
    fn apply(&self, x: &E) -> E {
        self(x)
    }
}

/// A self-map of `0..n` given as its image table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteMap(pub Vec<usize>);

impl FiniteMap {
    pub fn new(image: Vec<usize>) -> Result<Self, RelationError> {
        let n = image.len();
        if n == 0 {
            return Err(RelationError::EmptyGround);
        }
        if let Some((from, &to)) = image.iter().enumerate().find(|(_, &t)| t >= n) {
            return Err(RelationError::MapOutOfRange { from, to, n });
        }
        Ok(Self(image))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn at(&self, i: usize) -> usize {
        self.0[i]
    }

    /// Sorted, duplicate-free image `S(Ω)`.
    pub fn image(&self) -> Vec<usize> {
        let mut seen = vec![false; self.0.len()];
        for &t in &self.0 {
            seen[t] = true;
        }
        (0..self.0.len()).filter(|&i| seen[i]).collect()
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] == i).collect()
    }
}

impl SelfMap<usize> for FiniteMap {
    fn apply(&self, x: &usize) -> usize {
        self.0[*x]
    }
}

/// Explicit binary relation over the ground set `0..n`.
///
/// Pairs are kept sorted and duplicate-free next to a dense membership
/// matrix, so lookups are O(1) and iteration order is canonical.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RelationJson", into = "RelationJson")]
pub struct FiniteRelation {
    n: usize,
    pairs: Vec<(usize, usize)>,
    matrix: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    n: usize,
    pairs: Vec<[usize; 2]>,
}

impl TryFrom<RelationJson> for FiniteRelation {
    type Error = RelationError;

    fn try_from(raw: RelationJson) -> Result<Self, Self::Error> {
        FiniteRelation::new(raw.n, raw.pairs.into_iter().map(|[r, s]| (r, s)))
    }
}

impl From<FiniteRelation> for RelationJson {
    fn from(rel: FiniteRelation) -> Self {
        RelationJson {
            n: rel.n,
            pairs: rel.pairs.iter().map(|&(r, s)| [r, s]).collect(),
        }
    }
}

impl fmt::Debug for FiniteRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteRelation(n={}, {:?})", self.n, self.pairs)
    }
}

impl FiniteRelation {
    /// Builds a relation, dropping duplicate pairs.
    pub fn new(
        n: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, RelationError> {
        if n == 0 {
            return Err(RelationError::EmptyGround);
        }
        let mut matrix = vec![false; n * n];
        for (r, s) in pairs {
            if r >= n || s >= n {
                return Err(RelationError::OutOfRange(r, s, n));
            }
            matrix[r * n + s] = true;
        }
        Ok(Self::from_matrix(n, matrix))
    }

    pub fn empty(n: usize) -> Result<Self, RelationError> {
        Self::new(n, std::iter::empty())
    }

    /// Decodes bit `r * n + s` of `mask` as membership of `(r, s)`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n > 0 && n * n <= 64, "mask encoding needs 1 <= n <= 8");
        let matrix = (0..n * n).map(|b| mask >> b & 1 == 1).collect();
        Self::from_matrix(n, matrix)
    }

    fn from_matrix(n: usize, matrix: Vec<bool>) -> Self {
        let pairs = (0..n * n)
            .filter(|&b| matrix[b])
            .map(|b| (b / n, b % n))
            .collect();
        Self { n, pairs, matrix }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn has(&self, r: usize, s: usize) -> bool {
        r < self.n && s < self.n && self.matrix[r * self.n + s]
    }

    /// Successors of `r` in ascending order.
    pub fn successors(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.matrix[r * self.n..(r + 1) * self.n];
        row.iter().enumerate().filter(|(_, &b)| b).map(|(s, _)| s)
    }

    pub fn inverse(&self) -> Self {
        let n = self.n;
        let matrix = (0..n * n)
            .map(|b| self.matrix[(b % n) * n + b / n])
            .collect();
        Self::from_matrix(n, matrix)
    }

    /// `R ∪ R⁻¹`.
    pub fn symmetric_closure(&self) -> Self {
        let n = self.n;
        let matrix = (0..n * n)
            .map(|b| self.matrix[b] || self.matrix[(b % n) * n + b / n])
            .collect();
        Self::from_matrix(n, matrix)
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs.iter().all(|&(r, s)| self.has(s, r))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.n == other.n && self.pairs.iter().all(|&(r, s)| other.has(r, s))
    }

    /// Shortest path of length >= 1 from `from` to `to`, breadth first with
    /// lower indices explored first. A path from a node to itself needs a
    /// cycle through it (a self-loop gives `[r, r]`).
    pub fn find_path(&self, from: usize, to: usize) -> Option<Path> {
        if from >= self.n || to >= self.n {
            return None;
        }
        let n = self.n;
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut first_hop = vec![false; n];
        let mut visited = vec![false; n];
        let mut queue = VecDeque::new();

        for s in self.successors(from) {
            visited[s] = true;
            first_hop[s] = true;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut nodes = vec![u];
                let mut v = u;
                while !first_hop[v] {
                    v = parent[v].expect("non-first-hop node has a parent");
                    nodes.push(v);
                }
                nodes.push(from);
                nodes.reverse();
                return Some(Path { nodes });
            }
            for s in self.successors(u) {
                if !visited[s] {
                    visited[s] = true;
                    parent[s] = Some(u);
                    queue.push_back(s);
                }
            }
        }
        None
    }

    /// Every ordered pair of `subset` is joined by a path.
    pub fn is_connected(&self, subset: &[usize]) -> bool {
        subset.iter().all(|&r| {
            let reach = self.reachable_from(r);
            subset.iter().all(|&s| s < self.n && reach[s])
        })
    }

    /// Nodes reachable from `r` by a path of length >= 1.
    fn reachable_from(&self, r: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        if r >= self.n {
            return seen;
        }
        let mut stack: Vec<usize> = self.successors(r).collect();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(u) = stack.pop() {
            for s in self.successors(u) {
                if !seen[s] {
                    seen[s] = true;
                    stack.push(s);
                }
            }
        }
        seen
    }

    /// First pair (in canonical order) whose image under `map` leaves the
    /// relation, or `None` when the relation is closed under `map`.
    pub fn closure_violation(&self, map: &FiniteMap) -> Option<(usize, usize)> {
        self.pairs
            .iter()
            .copied()
            .find(|&(r, s)| !self.has(map.at(r), map.at(s)))
    }

    pub fn is_closed_under(&self, map: &FiniteMap) -> bool {
        self.closure_violation(map).is_none()
    }

    pub fn check_map(&self, map: &FiniteMap) -> Result<(), RelationError> {
        if map.len() != self.n {
            return Err(RelationError::MapLength {
                got: map.len(),
                expected: self.n,
            });
        }
        Ok(())
    }

    pub fn is_transitive(&self) -> bool {
        self.pairs
            .iter()
            .all(|&(r, s)| self.successors(s).all(|t| self.has(r, t)))
    }
}

impl Relation<usize> for FiniteRelation {
    fn contains(&self, a: &usize, b: &usize) -> bool {
        self.has(*a, *b)
    }
}

/// A path `r_0, ..., r_k` (k >= 1) with every consecutive pair related.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path<E = usize> {
    nodes: Vec<E>,
}

impl<E> Path<E> {
    /// Validates length and edge membership against `rel`.
    pub fn new<R: Relation<E>>(nodes: Vec<E>, rel: &R) -> Option<Self> {
        (nodes.len() >= 2 && is_preserving_sequence(rel, &nodes)).then_some(Self { nodes })
    }

    pub fn nodes(&self) -> &[E] {
        &self.nodes
    }

    /// Number of edges.
    pub fn length(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn start(&self) -> &E {
        &self.nodes[0]
    }

    pub fn end(&self) -> &E {
        &self.nodes[self.nodes.len() - 1]
    }

    pub fn edges(&self) -> impl Iterator<Item = (&E, &E)> {
        self.nodes.windows(2).map(|w| (&w[0], &w[1]))
    }
}

/// Elements `u` of `candidates` with `(u, S u)` in the relation, order kept.
pub fn seed_set<E, R, M>(rel: &R, map: &M, candidates: &[E]) -> Vec<E>
where
    E: Clone,
    R: Relation<E> + ?Sized,
    M: SelfMap<E> + ?Sized,
{
    candidates
        .iter()
        .filter(|u| rel.contains(u, &map.apply(u)))
        .cloned()
        .collect()
}

/// Every consecutive pair of `seq` is related. Sequences of length 0 or 1
/// are vacuously preserving.
pub fn is_preserving_sequence<E, R: Relation<E> + ?Sized>(rel: &R, seq: &[E]) -> bool {
    seq.windows(2).all(|w| rel.contains(&w[0], &w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(n: usize, pairs: &[(usize, usize)]) -> FiniteRelation {
        FiniteRelation::new(n, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(rel(2, &[(0, 1)]).inverse(), rel(2, &[(1, 0)]));
        assert!(rel(3, &[]).inverse().is_empty());
        let sym = rel(2, &[(0, 1), (1, 0)]);
        assert_eq!(sym.inverse(), sym);
    }

    #[test]
    fn symmetric_closure_examples() {
        assert_eq!(
            rel(2, &[(0, 1)]).symmetric_closure(),
            rel(2, &[(0, 1), (1, 0)])
        );
        let sym = rel(2, &[(0, 1), (1, 0)]);
        assert_eq!(sym.symmetric_closure(), sym);
        assert_eq!(
            rel(3, &[(0, 1), (1, 2)]).symmetric_closure(),
            rel(3, &[(0, 1), (1, 0), (1, 2), (2, 1)])
        );
    }

    #[test]
    fn construction_rejects_out_of_range_and_dedups() {
        assert_eq!(
            FiniteRelation::new(2, [(0, 2)]),
            Err(RelationError::OutOfRange(0, 2, 2))
        );
        assert_eq!(FiniteRelation::new(0, []), Err(RelationError::EmptyGround));
        assert_eq!(rel(2, &[(0, 1), (0, 1)]).len(), 1);
    }

    #[test]
    fn find_path_chain_and_direction() {
        let chain = rel(3, &[(0, 1), (1, 2)]);
        assert_eq!(chain.find_path(0, 2).unwrap().nodes(), &[0, 1, 2]);
        assert!(rel(3, &[(2, 0)]).find_path(0, 2).is_none());
        assert!(chain.find_path(0, 0).is_none());
    }

    #[test]
    fn find_path_prefers_shortest_then_lower_index() {
        let r = rel(4, &[(0, 2), (0, 1), (1, 3), (2, 3), (0, 3)]);
        assert_eq!(r.find_path(0, 3).unwrap().nodes(), &[0, 3]);
        let r = rel(4, &[(0, 2), (0, 1), (1, 3), (2, 3)]);
        assert_eq!(r.find_path(0, 3).unwrap().nodes(), &[0, 1, 3]);
    }

    #[test]
    fn find_path_to_self_uses_cycle() {
        assert_eq!(rel(1, &[(0, 0)]).find_path(0, 0).unwrap().nodes(), &[0, 0]);
        let cyc = rel(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(cyc.find_path(0, 0).unwrap().nodes(), &[0, 1, 2, 0]);
    }

    #[test]
    fn connectivity_examples() {
        assert!(rel(2, &[(1, 1)]).is_connected(&[1]));
        assert!(!rel(2, &[(1, 1)]).is_connected(&[0]));
        assert!(!rel(2, &[]).is_connected(&[0, 1]));
        let sym_chain = rel(3, &[(0, 1), (1, 2)]).symmetric_closure();
        assert!(sym_chain.is_connected(&[0, 2]));
        assert!(sym_chain.is_connected(&[0, 1, 2]));
    }

    #[test]
    fn closedness_examples() {
        let r = rel(2, &[(0, 1)]);
        assert!(r.is_closed_under(&FiniteMap::identity(2)));
        let swap = FiniteMap::new(vec![1, 0]).unwrap();
        assert_eq!(r.closure_violation(&swap), Some((0, 1)));
    }

    #[test]
    fn seed_set_preserves_order() {
        let r = rel(3, &[(2, 0), (0, 1)]);
        let map = FiniteMap::new(vec![1, 1, 0]).unwrap();
        assert_eq!(seed_set(&r, &map, &[2, 1, 0]), vec![2, 0]);
        assert!(seed_set(&r, &map, &[]).is_empty());
    }

    #[test]
    fn preserving_sequences() {
        let r = rel(3, &[(0, 1), (1, 2)]);
        assert!(is_preserving_sequence(&r, &[2]));
        assert!(is_preserving_sequence(&r, &[0, 1, 2]));
        assert!(!is_preserving_sequence(&r, &[0, 1, 0]));
    }

    #[test]
    fn json_shape() {
        let r = rel(3, &[(1, 2), (0, 1)]);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"n":3,"pairs":[[0,1],[1,2]]}"#);
        let back: FiniteRelation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<FiniteRelation>(r#"{"n":2,"pairs":[[0,5]]}"#).is_err());
    }

    #[test]
    fn mask_decoding_matches_pairs() {
        let r = FiniteRelation::from_mask(2, 0b1001);
        assert_eq!(r.pairs(), &[(0, 0), (1, 1)]);
    }

    #[test]
    fn map_validation() {
        assert!(FiniteMap::new(vec![0, 3]).is_err());
        let m = FiniteMap::new(vec![1, 1, 0]).unwrap();
        assert_eq!(m.image(), vec![0, 1]);
        assert_eq!(m.fixed_points(), vec![1]);
    }
}
