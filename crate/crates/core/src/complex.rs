//! Finite pure weighted simplicial complexes.
//!
//! A complex is stored level by level: level `k + 1` holds the `k`-simplices
//! in lexicographic order, level 0 holds the empty simplex. All weights are
//! kept as integer numerators over one common denominator, so norms and
//! weight identities are checked without rounding.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HdxError, Result};
use crate::gf2::{Bits, LinearMap, Rref};
use crate::rational::{factorial, from_u128, Rational};

/// Largest value allowed for `m(∅)` and the common denominator, so that the
/// product of two scaled norms always fits in a `u128`.
const SCALE_LIMIT: u128 = 1 << 60;

/// A simplex as a strictly increasing vertex sequence. The empty simplex has
/// dimension -1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Simplex(Vec<u32>);

impl Simplex {
    pub fn new(vertices: impl Into<Vec<u32>>) -> Result<Self> {
        let mut v = vertices.into();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(HdxError::InvalidSimplex(v));
        }
        Ok(Simplex(v))
    }

    pub fn empty() -> Self {
        Simplex(Vec::new())
    }

    /// Caller guarantees `v` is strictly increasing.
    pub(crate) fn from_sorted(v: Vec<u32>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Simplex(v)
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains_vertex(*v))
    }

    pub fn is_disjoint(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| !other.contains_vertex(*v))
    }

    pub fn union(&self, other: &Simplex) -> Simplex {
        let set: BTreeSet<u32> = self.0.iter().chain(&other.0).copied().collect();
        Simplex(set.into_iter().collect())
    }

    pub fn minus(&self, other: &Simplex) -> Simplex {
        Simplex(self.0.iter().copied().filter(|v| !other.contains_vertex(*v)).collect())
    }

    pub fn without_position(&self, pos: usize) -> Simplex {
        let mut v = self.0.clone();
        v.remove(pos);
        Simplex(v)
    }
}

impl TryFrom<Vec<u32>> for Simplex {
    type Error = HdxError;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Simplex::new(v)
    }
}

impl From<Simplex> for Vec<u32> {
    fn from(s: Simplex) -> Self {
        s.0
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// How top-cell weights are assigned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightKind {
    /// Every top cell gets weight 1.
    Homogeneous,
    /// Every top cell gets weight `1 / |X^(n)|`.
    NormalizedHomogeneous,
    /// Explicit positive weights, parallel to the list of top simplices.
    Custom(Vec<Rational>),
}

/// A link `X_τ` together with the map sending each of its cells `σ` to the
/// index of `τ ∪ σ` in the parent complex.
#[derive(Clone, Debug)]
pub struct Link {
    pub tau: Simplex,
    pub complex: WeightedComplex,
    /// `lift[level][i]`: index of `τ ∪ σ` at parent level `level + dim τ + 1`.
    pub lift: Vec<Vec<usize>>,
}

#[derive(Debug)]
pub(crate) struct Differential {
    /// `d(e_σ)` for every σ in `X^(k)`.
    pub images: Vec<Bits>,
    pub map: LinearMap,
}

#[derive(Clone, Debug, Default)]
struct Caches {
    links: Vec<Vec<OnceLock<Arc<Link>>>>,
    diffs: Vec<OnceLock<Arc<Differential>>>,
    coboundaries: Vec<OnceLock<Arc<Rref>>>,
    cocycles: Vec<OnceLock<Arc<Rref>>>,
}

/// A finite pure `n`-dimensional simplicial complex with an exact weight
/// function determined by its top cells.
///
/// Immutable after construction; derived data (links, differentials,
/// subspace bases) is computed lazily and cached.
#[derive(Clone, Debug)]
pub struct WeightedComplex {
    n: usize,
    cells: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    facets: Vec<Vec<Vec<usize>>>,
    cofacets: Vec<Vec<Vec<usize>>>,
    weights: Vec<Vec<u128>>,
    denom: u128,
    digest: [u8; 32],
    caches: Caches,
}

impl PartialEq for WeightedComplex {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.cells == other.cells
            && self.weights.iter().zip(&other.weights).all(|(a, b)| {
                a.iter()
                    .zip(b)
                    .all(|(x, y)| x * other.denom == y * self.denom)
            })
    }
}

impl Eq for WeightedComplex {}

/// Builds a complex from top simplices (lists of vertex ids).
pub fn build_complex(
    tops: &[Vec<u32>],
    kind: &WeightKind,
) -> Result<WeightedComplex> {
    WeightedComplex::build(tops, kind)
}

impl WeightedComplex {
    pub fn build(tops: &[Vec<u32>], kind: &WeightKind) -> Result<Self> {
        if tops.is_empty() {
            return Err(HdxError::EmptyComplex);
        }
        let simplices = tops
            .iter()
            .map(|t| Simplex::new(t.clone()))
            .collect::<Result<Vec<_>>>()?;
        let first = simplices[0].dim();
        if first < 0 {
            return Err(HdxError::BadArgs("top simplices must be nonempty".into()));
        }
        if let Some(s) = simplices.iter().find(|s| s.dim() != first) {
            return Err(HdxError::MixedDimension { first, other: s.dim() });
        }
        let count = simplices.len() as u128;
        let (nums, denom): (Vec<u128>, u128) = match kind {
            WeightKind::Homogeneous => (vec![1; simplices.len()], 1),
            WeightKind::NormalizedHomogeneous => (vec![1; simplices.len()], count),
            WeightKind::Custom(ws) => {
                if ws.len() != simplices.len() {
                    return Err(HdxError::WeightCount { expected: simplices.len(), got: ws.len() });
                }
                scale_rationals(ws)?
            }
        };
        let mut paired: Vec<(Simplex, u128)> = simplices.into_iter().zip(nums).collect();
        paired.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = paired.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(HdxError::DuplicateTopSimplex(w[0].0.clone()));
        }
        let (tops, nums): (Vec<Simplex>, Vec<u128>) = paired.into_iter().unzip();
        // reduce the common scale
        let g = nums.iter().fold(denom, |g, &x| g.gcd(&x));
        let nums: Vec<u128> = nums.into_iter().map(|x| x / g).collect();
        Self::from_scaled(first as usize, tops, nums, denom / g)
    }

    /// `tops` sorted and distinct, all of dimension `n`; weights are
    /// `nums[i] / denom`.
    pub(crate) fn from_scaled(
        n: usize,
        tops: Vec<Simplex>,
        nums: Vec<u128>,
        denom: u128,
    ) -> Result<Self> {
        debug_assert!(tops.iter().all(|t| t.dim() == n as isize));
        if denom >= SCALE_LIMIT {
            return Err(HdxError::WeightOverflow);
        }
        let levels = n + 2;
        let mut acc: Vec<BTreeMap<Simplex, u128>> = vec![BTreeMap::new(); levels];
        for (top, &w) in tops.iter().zip(&nums) {
            let vs = top.vertices();
            for mask in 0u32..(1u32 << vs.len()) {
                let face: Vec<u32> = vs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                let level = face.len();
                let e = acc[level].entry(Simplex::from_sorted(face)).or_insert(0);
                *e = e.checked_add(w).ok_or(HdxError::WeightOverflow)?;
            }
        }
        let mut cells = Vec::with_capacity(levels);
        let mut weights = Vec::with_capacity(levels);
        for (level, map) in acc.into_iter().enumerate() {
            let k = level as isize - 1;
            let f = factorial((n as isize - k) as usize);
            let mut cs = Vec::with_capacity(map.len());
            let mut ws = Vec::with_capacity(map.len());
            for (s, w) in map {
                cs.push(s);
                ws.push(w.checked_mul(f).ok_or(HdxError::WeightOverflow)?);
            }
            cells.push(cs);
            weights.push(ws);
        }
        if weights[0][0] >= SCALE_LIMIT {
            return Err(HdxError::WeightOverflow);
        }
        let index: Vec<HashMap<Simplex, usize>> = cells
            .iter()
            .map(|cs| cs.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        let mut facets = vec![Vec::new(); levels];
        let mut cofacets: Vec<Vec<Vec<usize>>> =
            cells.iter().map(|cs| vec![Vec::new(); cs.len()]).collect();
        for level in 1..levels {
            facets[level] = cells[level]
                .iter()
                .map(|s| {
                    (0..s.vertices().len())
                        .map(|p| index[level - 1][&s.without_position(p)])
                        .collect::<Vec<usize>>()
                })
                .collect();
            for (i, fs) in facets[level].iter().enumerate() {
                for &f in fs {
                    cofacets[level - 1][f].push(i);
                }
            }
        }
        let digest = digest_of(n, &cells[n + 1], &weights[n + 1], denom);
        let caches = Caches {
            links: cells.iter().map(|cs| (0..cs.len()).map(|_| OnceLock::new()).collect()).collect(),
            diffs: (0..levels).map(|_| OnceLock::new()).collect(),
            coboundaries: (0..levels).map(|_| OnceLock::new()).collect(),
            cocycles: (0..levels).map(|_| OnceLock::new()).collect(),
        };
        Ok(WeightedComplex { n, cells, index, facets, cofacets, weights, denom, digest, caches })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub(crate) fn level(&self, k: isize) -> Result<usize> {
        self.check_dim(k)?;
        Ok((k + 1) as usize)
    }

    pub(crate) fn check_dim(&self, k: isize) -> Result<()> {
        if k < -1 || k > self.n as isize {
            return Err(HdxError::BadDimension { k, min: -1, max: self.n as isize });
        }
        Ok(())
    }

    /// The `k`-simplices in canonical order; empty outside `[-1, n]`.
    pub fn cells(&self, k: isize) -> &[Simplex] {
        match usize::try_from(k + 1) {
            Ok(l) if l < self.cells.len() => &self.cells[l],
            _ => &[],
        }
    }

    pub fn num_cells(&self, k: isize) -> usize {
        self.cells(k).len()
    }

    pub fn tops(&self) -> &[Simplex] {
        &self.cells[self.n + 1]
    }

    pub fn vertex_ids(&self) -> Vec<u32> {
        self.cells[1].iter().map(|s| s.vertices()[0]).collect()
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get((s.dim() + 1) as usize)?.get(s).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Indices (one dimension down) of the facets of cell `i` in `X^(k)`.
    pub fn facet_indices(&self, k: isize, i: usize) -> &[usize] {
        &self.facets[(k + 1) as usize][i]
    }

    /// Indices (one dimension up) of the cofacets of cell `i` in `X^(k)`.
    pub fn cofacet_indices(&self, k: isize, i: usize) -> &[usize] {
        &self.cofacets[(k + 1) as usize][i]
    }

    pub fn weight(&self, k: isize, i: usize) -> Rational {
        from_u128(self.weights[(k + 1) as usize][i], self.denom)
    }

    pub fn weight_of(&self, s: &Simplex) -> Option<Rational> {
        let i = self.index_of(s)?;
        Some(self.weight(s.dim(), i))
    }

    /// Numerators over [`Self::denom`] for the weights of `X^(k)`.
    pub fn scaled_weights(&self, k: isize) -> &[u128] {
        &self.weights[(k + 1) as usize]
    }

    pub fn denom(&self) -> u128 {
        self.denom
    }

    pub fn top_weights(&self) -> Vec<Rational> {
        (0..self.tops().len()).map(|i| self.weight(self.n as isize, i)).collect()
    }

    /// `m(X^(k))`.
    pub fn total_weight(&self, k: isize) -> Result<Rational> {
        let l = self.level(k)?;
        Ok(from_u128(self.weights[l].iter().sum(), self.denom))
    }

    pub(crate) fn total_scaled(&self, k: isize) -> u128 {
        self.weights[(k + 1) as usize].iter().sum()
    }

    /// Hex SHA-256 of the canonical content (tops and reduced weights).
    pub fn hash_hex(&self) -> String {
        hex::encode(self.digest)
    }

    /// First eight bytes of the content digest.
    pub fn id(&self) -> u64 {
        u64::from_le_bytes(self.digest[..8].try_into().expect("8 bytes"))
    }

    /// Number of top cells containing each `k`-simplex.
    pub fn containing_top_counts(&self, k: isize) -> Result<Vec<usize>> {
        let l = self.level(k)?;
        let mut counts = vec![0usize; self.cells[l].len()];
        for top in self.tops() {
            for_each_subset_of_size(top.vertices(), l, |face| {
                counts[self.index[l][&Simplex::from_sorted(face.to_vec())]] += 1;
            });
        }
        Ok(counts)
    }

    /// Indices of the top cells containing cell `i` of `X^(k)`.
    pub fn containing_tops(&self, k: isize, i: usize) -> Vec<usize> {
        let mut frontier: BTreeSet<usize> = BTreeSet::from([i]);
        let mut level = (k + 1) as usize;
        while level < self.n + 1 {
            frontier = frontier
                .iter()
                .flat_map(|&j| self.cofacets[level][j].iter().copied())
                .collect();
            level += 1;
        }
        frontier.into_iter().collect()
    }

    /// The link `X_τ` with induced weights `m_τ(σ) = m(τ ∪ σ)`.
    pub fn link(&self, tau: &Simplex) -> Result<WeightedComplex> {
        Ok(self.link_data(tau)?.complex.clone())
    }

    /// Cached link together with its lift map.
    pub fn link_data(&self, tau: &Simplex) -> Result<Arc<Link>> {
        let i = self
            .index_of(tau)
            .ok_or_else(|| HdxError::SimplexNotInComplex(tau.clone()))?;
        self.link_at(tau.dim(), i)
    }

    pub fn link_at(&self, j: isize, i: usize) -> Result<Arc<Link>> {
        let l = self.level(j)?;
        if j >= self.n as isize {
            return Err(HdxError::BadDimension { k: j, min: -1, max: self.n as isize - 1 });
        }
        if let Some(link) = self.caches.links[l][i].get() {
            return Ok(link.clone());
        }
        let link = Arc::new(self.compute_link(j, i)?);
        Ok(self.caches.links[l][i].get_or_init(|| link).clone())
    }

    fn compute_link(&self, j: isize, i: usize) -> Result<Link> {
        let l = (j + 1) as usize;
        let tau = self.cells[l][i].clone();
        let top_level = self.n + 1;
        let mut pairs: Vec<(Simplex, u128)> = self
            .containing_tops(j, i)
            .into_iter()
            .map(|t| (self.cells[top_level][t].minus(&tau), self.weights[top_level][t]))
            .collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let (tops, nums): (Vec<Simplex>, Vec<u128>) = pairs.into_iter().unzip();
        let link_dim = self.n - l;
        let complex = WeightedComplex::from_scaled(link_dim, tops, nums, self.denom)?;
        let lift = complex
            .cells
            .iter()
            .enumerate()
            .map(|(ll, cs)| {
                cs.iter().map(|s| self.index[ll + l][&s.union(&tau)]).collect()
            })
            .collect();
        Ok(Link { tau, complex, lift })
    }

    /// The `l`-skeleton re-weighted over its own top cells.
    pub fn skeleton(&self, l: isize, kind: &WeightKind) -> Result<WeightedComplex> {
        if l < 0 || l > self.n as isize {
            return Err(HdxError::BadDimension { k: l, min: 0, max: self.n as isize });
        }
        let tops: Vec<Vec<u32>> = self.cells(l).iter().map(|s| s.vertices().to_vec()).collect();
        WeightedComplex::build(&tops, kind)
    }

    /// Same cells with a different weight kind (custom weights follow the
    /// canonical top order).
    pub fn reweighted(&self, kind: &WeightKind) -> Result<WeightedComplex> {
        self.skeleton(self.n as isize, kind)
    }

    pub(crate) fn differential(&self, k: isize) -> Result<Arc<Differential>> {
        if k < -1 || k >= self.n as isize {
            return Err(HdxError::TopDimension { k });
        }
        let l = (k + 1) as usize;
        Ok(self.caches.diffs[l]
            .get_or_init(|| {
                let target = self.cells[l + 1].len();
                let images: Vec<Bits> = self.cofacets[l]
                    .iter()
                    .map(|cf| Bits::from_indices(target, cf.iter().copied()))
                    .collect();
                let map = LinearMap::new(images.len(), target, &images);
                Arc::new(Differential { images, map })
            })
            .clone())
    }

    /// `B^k = im d_{k-1}` in reduced form (`B^{-1} = 0`).
    pub fn coboundary_space(&self, k: isize) -> Result<Arc<Rref>> {
        let l = self.level(k)?;
        if let Some(r) = self.caches.coboundaries[l].get() {
            return Ok(r.clone());
        }
        let r = if k == -1 {
            Rref::new(1)
        } else {
            self.differential(k - 1)?.map.image()
        };
        Ok(self.caches.coboundaries[l].get_or_init(|| Arc::new(r)).clone())
    }

    /// `Z^k = ker d_k` in reduced form (`Z^n = C^n`).
    pub fn cocycle_space(&self, k: isize) -> Result<Arc<Rref>> {
        let l = self.level(k)?;
        if let Some(r) = self.caches.cocycles[l].get() {
            return Ok(r.clone());
        }
        let len = self.cells[l].len();
        let r = if k == self.n as isize {
            Rref::from_vectors(len, (0..len).map(|i| Bits::singleton(len, i)))
        } else {
            self.differential(k)?.map.kernel().clone()
        };
        Ok(self.caches.cocycles[l].get_or_init(|| Arc::new(r)).clone())
    }

    /// Checks purity, downward closure and both weight identities exactly.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let top_level = self.n + 1;
        // downward closure and purity
        for level in 1..=top_level {
            for s in &self.cells[level] {
                for p in 0..s.vertices().len() {
                    let f = s.without_position(p);
                    if !self.index[level - 1].contains_key(&f) {
                        return Err(Violation::NotClosed(f));
                    }
                }
            }
        }
        for level in 0..top_level {
            for (i, s) in self.cells[level].iter().enumerate() {
                if self.cofacets[level][i].is_empty() {
                    return Err(Violation::NotPure(s.clone()));
                }
            }
        }
        for level in 0..=top_level {
            if let Some(i) = self.weights[level].iter().position(|w| w.is_zero()) {
                return Err(Violation::NonPositive(self.cells[level][i].clone()));
            }
        }
        // summation law
        for level in 0..top_level {
            for (i, s) in self.cells[level].iter().enumerate() {
                let sum: u128 = self.cofacets[level][i].iter().map(|&c| self.weights[level + 1][c]).sum();
                if sum != self.weights[level][i] {
                    return Err(Violation::SummationLaw {
                        simplex: s.clone(),
                        weight: from_u128(self.weights[level][i], self.denom),
                        cofacet_sum: from_u128(sum, self.denom),
                    });
                }
            }
        }
        // closed form m(τ) = (n-k)! Σ_{η ⊇ τ} m(η)
        for level in 0..=top_level {
            let k = level as isize - 1;
            let f = factorial((self.n as isize - k) as usize);
            for (i, s) in self.cells[level].iter().enumerate() {
                let sum: u128 = self
                    .containing_tops(k, i)
                    .iter()
                    .map(|&t| self.weights[top_level][t])
                    .sum();
                if sum * f != self.weights[level][i] {
                    return Err(Violation::ClosedForm {
                        simplex: s.clone(),
                        weight: from_u128(self.weights[level][i], self.denom),
                        expected: from_u128(sum * f, self.denom),
                    });
                }
            }
        }
        Ok(())
    }

    /// Fault injection for validation tests: overwrites one stored weight.
    #[doc(hidden)]
    pub fn with_corrupted_weight(&self, k: isize, i: usize, numerator: u128) -> WeightedComplex {
        let mut out = self.clone();
        out.weights[(k + 1) as usize][i] = numerator;
        out.caches = Caches {
            links: out.cells.iter().map(|cs| (0..cs.len()).map(|_| OnceLock::new()).collect()).collect(),
            diffs: (0..out.cells.len()).map(|_| OnceLock::new()).collect(),
            coboundaries: (0..out.cells.len()).map(|_| OnceLock::new()).collect(),
            cocycles: (0..out.cells.len()).map(|_| OnceLock::new()).collect(),
        };
        out
    }
}

/// A failed structural or weight check, naming the offending simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotClosed(Simplex),
    NotPure(Simplex),
    NonPositive(Simplex),
    SummationLaw { simplex: Simplex, weight: Rational, cofacet_sum: Rational },
    ClosedForm { simplex: Simplex, weight: Rational, expected: Rational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::rational::fmt_rational as r;
        match self {
            Violation::NotClosed(s) => write!(f, "face {s} missing"),
            Violation::NotPure(s) => write!(f, "{s} is not contained in a top cell"),
            Violation::NonPositive(s) => write!(f, "{s} has non-positive weight"),
            Violation::SummationLaw { simplex, weight, cofacet_sum } => write!(
                f,
                "summation law fails at {simplex}: m = {}, cofacet sum = {}",
                r(weight),
                r(cofacet_sum)
            ),
            Violation::ClosedForm { simplex, weight, expected } => write!(
                f,
                "closed form fails at {simplex}: m = {}, expected {}",
                r(weight),
                r(expected)
            ),
        }
    }
}

fn scale_rationals(ws: &[Rational]) -> Result<(Vec<u128>, u128)> {
    use num_bigint::BigInt;
    use num_traits::{Signed, ToPrimitive};
    if let Some(i) = ws.iter().position(|w| !w.is_positive()) {
        return Err(HdxError::NonPositiveWeight { index: i });
    }
    let lcm = ws.iter().fold(BigInt::from(1), |acc, w| acc.lcm(w.denom()));
    let denom = lcm.to_u128().filter(|&d| d < SCALE_LIMIT).ok_or(HdxError::WeightOverflow)?;
    let nums = ws
        .iter()
        .map(|w| {
            (w.numer() * (&lcm / w.denom()))
                .to_u128()
                .filter(|&x| x < SCALE_LIMIT)
                .ok_or(HdxError::WeightOverflow)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((nums, denom))
}

fn digest_of(n: usize, tops: &[Simplex], nums: &[u128], denom: u128) -> [u8; 32] {
    let g = nums.iter().fold(denom, |g, &x| g.gcd(&x)).max(1);
    let mut h = Sha256::new();
    h.update((n as u64).to_le_bytes());
    for (t, &w) in tops.iter().zip(nums) {
        h.update((t.vertices().len() as u64).to_le_bytes());
        for v in t.vertices() {
            h.update(v.to_le_bytes());
        }
        h.update((w / g).to_le_bytes());
    }
    h.update((denom / g).to_le_bytes());
    let out = h.finalize();
    let mut d = [0u8; 32];
    d.copy_from_slice(&out[..]);
    d
}

fn for_each_subset_of_size(vs: &[u32], size: usize, mut f: impl FnMut(&[u32])) {
    fn rec(vs: &[u32], size: usize, start: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for i in start..vs.len() {
            if vs.len() - i < size - cur.len() {
                break;
            }
            cur.push(vs[i]);
            rec(vs, size, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(vs, size, 0, &mut Vec::with_capacity(size), &mut f);
}
