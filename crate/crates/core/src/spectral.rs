//! Weighted graph Laplacians, Cheeger bounds and link spectral profiles.

use nalgebra::{DMatrix, SymmetricEigen};
use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Simplex, WeightedComplex};
use crate::error::{HdxError, Result};
use crate::rational::{from_u128, to_f64, Rational};

/// A graph with positive edge weights; vertex weights are the sums of the
/// incident edge weights. Weights are numerators over a common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    ids: Vec<u32>,
    vertex_weights: Vec<u128>,
    edges: Vec<(usize, usize, u128)>,
    denom: u128,
}

impl WeightedGraph {
    /// Builds a graph from `(u, v, weight)` triples over vertex ids.
    pub fn new(edges: &[(u32, u32, Rational)]) -> Result<Self> {
        let tops: Vec<Vec<u32>> = edges.iter().map(|(u, v, _)| vec![*u, *v]).collect();
        let weights = edges.iter().map(|e| e.2.clone()).collect();
        let x = WeightedComplex::build(&tops, &crate::complex::WeightKind::Custom(weights))?;
        WeightedGraph::one_skeleton(&x)
    }

    /// Unit-weight graph on the given edges.
    pub fn unweighted(edges: &[(u32, u32)]) -> Result<Self> {
        let e: Vec<(u32, u32, Rational)> =
            edges.iter().map(|&(u, v)| (u, v, crate::rational::int(1))).collect();
        WeightedGraph::new(&e)
    }

    /// The 1-skeleton of a complex of dimension at least 1, with the
    /// complex's own vertex and edge weights.
    pub fn one_skeleton(x: &WeightedComplex) -> Result<Self> {
        if x.dim() < 1 {
            return Err(HdxError::BadDimension { k: x.dim() as isize, min: 1, max: isize::MAX });
        }
        let edges = x
            .cells(1)
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let f = x.facet_indices(1, i);
                // facets are listed by removed position: f[0] drops the first vertex
                (f[1], f[0], x.scaled_weights(1)[i])
            })
            .collect();
        Ok(WeightedGraph {
            ids: x.vertex_ids(),
            vertex_weights: x.scaled_weights(0).to_vec(),
            edges,
            denom: x.denom(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn vertex_weight(&self, i: usize) -> Rational {
        from_u128(self.vertex_weights[i], self.denom)
    }

    /// Edges as `(index, index, weight)`.
    pub fn edges(&self) -> Vec<(usize, usize, Rational)> {
        self.edges.iter().map(|&(u, v, w)| (u, v, from_u128(w, self.denom))).collect()
    }

    pub fn components(&self) -> usize {
        let mut uf = UnionFind::<usize>::new(self.ids.len());
        for &(u, v, _) in &self.edges {
            uf.union(u, v);
        }
        let mut labels = uf.into_labeling();
        labels.sort_unstable();
        labels.dedup();
        labels.len()
    }

    fn index_of(&self, id: u32) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }
}

/// Eigenvalues of `Δ⁺` in ascending order.
///
/// `Δ⁺ = I − D⁻¹A` is similar to `I − D^{-1/2} A D^{-1/2}`, which is
/// symmetric; that matrix is the one handed to the solver.
pub fn laplacian_spectrum(g: &WeightedGraph) -> Vec<f64> {
    let n = g.num_vertices();
    let inv_sqrt: Vec<f64> = g.vertex_weights.iter().map(|&w| 1.0 / (w as f64).sqrt()).collect();
    let mut m = DMatrix::<f64>::identity(n, n);
    for &(u, v, w) in &g.edges {
        let a = w as f64 * inv_sqrt[u] * inv_sqrt[v];
        m[(u, v)] -= a;
        m[(v, u)] -= a;
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// `λ(G)`, the smallest positive eigenvalue of a connected graph.
pub fn spectral_gap(g: &WeightedGraph) -> Result<f64> {
    if g.num_vertices() < 2 {
        return Err(HdxError::SingleVertex);
    }
    let c = g.components();
    if c > 1 {
        return Err(HdxError::Disconnected { components: c });
    }
    Ok(laplacian_spectrum(g)[1])
}

/// Both Cheeger inequalities evaluated on one vertex subset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheegerRecord {
    /// `m(U, V∖U)`.
    #[serde(with = "crate::rational::serde_str")]
    pub cut: Rational,
    /// `λ·m(U)·m(V∖U)/m(V)`.
    #[serde(with = "crate::rational::serde_float")]
    pub bound1_rhs: f64,
    /// `m(U)/2·(1 − λ·m(V∖U)/m(V))`.
    #[serde(with = "crate::rational::serde_float")]
    pub bound2_lhs: f64,
    /// `m(U, U)`, the weight of edges inside U.
    #[serde(with = "crate::rational::serde_str")]
    pub selfcut: Rational,
    pub ok1: bool,
    pub ok2: bool,
}

/// Checks both inequalities for `U` given by vertex ids.
pub fn cheeger_check(g: &WeightedGraph, subset: &[u32], tol: f64) -> Result<CheegerRecord> {
    let lambda = spectral_gap(g)?;
    cheeger_check_with(g, lambda, subset, tol)
}

/// As [`cheeger_check`] with a precomputed `λ(G)`.
pub fn cheeger_check_with(g: &WeightedGraph, lambda: f64, subset: &[u32], tol: f64) -> Result<CheegerRecord> {
    let mut inside = vec![false; g.num_vertices()];
    for &id in subset {
        let i = g.index_of(id).ok_or_else(|| HdxError::SimplexNotInComplex(Simplex::from_sorted(vec![id])))?;
        inside[i] = true;
    }
    cheeger_mask(g, lambda, &inside, tol)
}

pub(crate) fn cheeger_mask(g: &WeightedGraph, lambda: f64, inside: &[bool], tol: f64) -> Result<CheegerRecord> {
    let count = inside.iter().filter(|b| **b).count();
    if count == 0 || count == inside.len() {
        return Err(HdxError::EmptyOrFullSubset);
    }
    let total: u128 = g.vertex_weights.iter().sum();
    let mu: u128 = g.vertex_weights.iter().zip(inside).filter(|(_, b)| **b).map(|(w, _)| w).sum();
    let rest = total - mu;
    let (mut cut, mut selfcut) = (0u128, 0u128);
    for &(u, v, w) in &g.edges {
        match (inside[u], inside[v]) {
            (true, true) => selfcut += w,
            (false, false) => {}
            _ => cut += w,
        }
    }
    let d = g.denom as f64;
    let (muf, restf, totalf) = (mu as f64 / d, rest as f64 / d, total as f64 / d);
    let bound1_rhs = lambda * muf * restf / totalf;
    let bound2_lhs = muf / 2.0 * (1.0 - lambda * restf / totalf);
    let cut = from_u128(cut, g.denom);
    let selfcut = from_u128(selfcut, g.denom);
    let (cf, sf) = (to_f64(&cut), to_f64(&selfcut));
    Ok(CheegerRecord {
        ok1: cf >= bound1_rhs - tol * (1.0 + bound1_rhs.abs()),
        ok2: bound2_lhs >= sf - tol * (1.0 + sf.abs()),
        cut,
        bound1_rhs,
        bound2_lhs,
        selfcut,
    })
}

/// `λ_k = min_{τ ∈ X^(k−1)} λ(X_τ)` for `0 ≤ k ≤ n−1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralProfile {
    pub n: usize,
    /// Indexed by `k`.
    #[serde(serialize_with = "ser_floats")]
    pub lambdas: Vec<f64>,
    /// A simplex whose link attains each minimum (first in canonical order).
    pub argmin: Vec<Simplex>,
    /// Number of links examined per level; all of them were connected.
    pub links_checked: Vec<usize>,
    #[serde(with = "crate::rational::serde_float")]
    pub tolerance: f64,
}

fn ser_floats<S: serde::Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&crate::rational::fmt_float(*x))?;
    }
    seq.end()
}

/// Spectral gap of the 1-skeleton of the link of cell `i` in `X^(j)`.
pub(crate) fn link_gap(x: &WeightedComplex, j: isize, i: usize) -> Result<f64> {
    let link = x.link_at(j, i)?;
    let g = WeightedGraph::one_skeleton(&link.complex)?;
    match spectral_gap(&g) {
        Err(HdxError::Disconnected { .. }) | Err(HdxError::SingleVertex) => {
            Err(HdxError::DisconnectedLink(x.cells(j)[i].clone()))
        }
        other => other,
    }
}

pub fn spectral_profile(x: &WeightedComplex, tol: f64) -> Result<SpectralProfile> {
    let n = x.dim();
    let mut lambdas = Vec::with_capacity(n);
    let mut argmin = Vec::with_capacity(n);
    let mut links_checked = Vec::with_capacity(n);
    for k in 0..n as isize {
        let j = k - 1;
        let gaps: Vec<Result<f64>> =
            (0..x.num_cells(j)).into_par_iter().map(|i| link_gap(x, j, i)).collect();
        let mut best: Option<(f64, usize)> = None;
        for (i, g) in gaps.into_iter().enumerate() {
            let g = g?;
            if best.is_none_or(|(b, _)| g < b) {
                best = Some((g, i));
            }
        }
        let (l, i) = best.expect("every level has a cell");
        lambdas.push(l);
        argmin.push(x.cells(j)[i].clone());
        links_checked.push(x.num_cells(j));
    }
    Ok(SpectralProfile { n, lambdas, argmin, links_checked, tolerance: tol })
}

/// Outcome of the descent inequalities on a profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DescentCheck {
    /// `λ_k ≥ 2 − 1/λ_{k+1}` for `0 ≤ k ≤ n−2`.
    pub levels: Vec<bool>,
    /// `λ_{n−1} > (n−1)/n` implies `λ_k > k/(k+1)` for every k.
    pub threshold: bool,
}

impl DescentCheck {
    pub fn all(&self) -> bool {
        self.threshold && self.levels.iter().all(|b| *b)
    }
}

pub fn descent_check(p: &SpectralProfile) -> DescentCheck {
    let tol = p.tolerance;
    let l = &p.lambdas;
    let levels = (0..l.len().saturating_sub(1))
        .map(|k| l[k] >= 2.0 - 1.0 / l[k + 1] - tol)
        .collect();
    let threshold = match l.last() {
        Some(&top) if p.n >= 1 => {
            let n = p.n as f64;
            top <= (n - 1.0) / n + tol
                || l.iter().enumerate().all(|(k, &lk)| lk > k as f64 / (k as f64 + 1.0) - tol)
        }
        _ => true,
    };
    DescentCheck { levels, threshold }
}

/// `min_{τ ∈ X^(n−2)} λ(X_τ)` after checking every positive-dimensional link
/// is connected. For a graph this is `λ(X)`.
pub fn local_spectral_expansion(x: &WeightedComplex, tol: f64) -> Result<f64> {
    if x.dim() < 1 {
        return Err(HdxError::BadDimension { k: x.dim() as isize, min: 1, max: isize::MAX });
    }
    Ok(*spectral_profile(x, tol)?.lambdas.last().expect("n >= 1"))
}
