//! Deterministic and seeded constructions for the test corpus.

use std::fmt;
use std::path::PathBuf;

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{WeightKind, WeightedComplex};
use crate::error::{HdxError, Result};
use crate::io::read_complex;
use crate::rational::{fmt_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    FullSimplex { v: u32 },
    /// The `d`-skeleton of the full simplex on `v` vertices.
    Skeleton { v: u32, d: u32 },
    HollowSimplex { v: u32 },
    Join { left: Box<GeneratorSpec>, right: Box<GeneratorSpec> },
    LinialMeshulam {
        n: u32,
        v: u32,
        #[serde(with = "crate::rational::serde_str")]
        p: Rational,
        seed: u64,
    },
    #[serde(alias = "pg-flag")]
    ProjectivePlaneFlag { q: u32 },
    FromFile { path: PathBuf },
    /// `base` with seeded custom top weights.
    Reweighted { base: Box<GeneratorSpec>, seed: u64 },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<WeightedComplex> {
        match self {
            GeneratorSpec::FullSimplex { v } => full_simplex(*v),
            GeneratorSpec::Skeleton { v, d } => simplex_skeleton(*v, *d),
            GeneratorSpec::HollowSimplex { v } => hollow_simplex(*v),
            GeneratorSpec::Join { left, right } => Ok(join(&left.build()?, &right.build()?)),
            GeneratorSpec::LinialMeshulam { n, v, p, seed } => linial_meshulam(*n, *v, p, *seed),
            GeneratorSpec::ProjectivePlaneFlag { q } => projective_plane_flag(*q),
            GeneratorSpec::FromFile { path } => read_complex(path),
            GeneratorSpec::Reweighted { base, seed } => random_reweight(&base.build()?, *seed),
        }
    }

    fn join_of(a: GeneratorSpec, b: GeneratorSpec) -> GeneratorSpec {
        GeneratorSpec::Join { left: Box::new(a), right: Box::new(b) }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::FullSimplex { v } => write!(f, "full({v})"),
            GeneratorSpec::Skeleton { v, d } => write!(f, "skel({v},{d})"),
            GeneratorSpec::HollowSimplex { v } => write!(f, "hollow({v})"),
            GeneratorSpec::Join { left, right } => write!(f, "join({left},{right})"),
            GeneratorSpec::LinialMeshulam { n, v, p, seed } => {
                write!(f, "lm({n},{v},{},{seed})", fmt_rational(p))
            }
            GeneratorSpec::ProjectivePlaneFlag { q } => write!(f, "pg-flag({q})"),
            GeneratorSpec::FromFile { path } => write!(f, "file({})", path.display()),
            GeneratorSpec::Reweighted { base, seed } => write!(f, "rw({base},{seed})"),
        }
    }
}

/// All `size`-subsets of `0..v` in lexicographic order.
fn subsets(v: u32, size: u32) -> Vec<Vec<u32>> {
    fn go(start: u32, v: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for x in start..=v - left {
            cur.push(x);
            go(x + 1, v, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= v {
        go(0, v, size, &mut Vec::new(), &mut out);
    }
    out
}

pub fn full_simplex(v: u32) -> Result<WeightedComplex> {
    if v == 0 {
        return Err(HdxError::BadArgs("full simplex needs v >= 1".into()));
    }
    WeightedComplex::build(&[(0..v).collect()], &WeightKind::Homogeneous)
}

pub fn simplex_skeleton(v: u32, d: u32) -> Result<WeightedComplex> {
    if d >= v {
        return Err(HdxError::BadArgs(format!("skeleton dimension {d} needs more than {v} vertices")));
    }
    WeightedComplex::build(&subsets(v, d + 1), &WeightKind::Homogeneous)
}

/// Boundary of the simplex on `v` vertices.
pub fn hollow_simplex(v: u32) -> Result<WeightedComplex> {
    if v < 2 {
        return Err(HdxError::BadArgs("hollow simplex needs v >= 2".into()));
    }
    simplex_skeleton(v, v - 2)
}

/// Flag complex of PG(2, q): points and lines, edges are incident pairs.
pub fn projective_plane_flag(q: u32) -> Result<WeightedComplex> {
    if q != 2 && q != 3 {
        return Err(HdxError::UnsupportedQ(q));
    }
    // normalized: first nonzero coordinate is 1
    let mut pts: Vec<[u32; 3]> = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                let v = [a, b, c];
                if v.iter().find(|&&x| x != 0) == Some(&1) {
                    pts.push(v);
                }
            }
        }
    }
    let n = pts.len() as u32;
    let mut edges = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        for (j, l) in pts.iter().enumerate() {
            if (p[0] * l[0] + p[1] * l[1] + p[2] * l[2]) % q == 0 {
                edges.push(vec![i as u32, n + j as u32]);
            }
        }
    }
    WeightedComplex::build(&edges, &WeightKind::Homogeneous)
}

/// Each `n`-cell on `v` vertices kept with probability `p`; faces not under
/// a surviving cell are dropped.
pub fn linial_meshulam(n: u32, v: u32, p: &Rational, seed: u64) -> Result<WeightedComplex> {
    if n < 1 || v <= n {
        return Err(HdxError::BadArgs(format!("need v > n >= 1, got n = {n}, v = {v}")));
    }
    if *p <= Rational::zero() || *p > Rational::one() {
        return Err(HdxError::BadArgs(format!("p must lie in (0, 1], got {}", fmt_rational(p))));
    }
    let (num, den) = match (p.numer().to_u64(), p.denom().to_u64()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(HdxError::BadArgs("p has too large a denominator".into())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tops: Vec<Vec<u32>> = subsets(v, n + 1)
        .into_iter()
        .filter(|_| rng.random_range(0..den) < num)
        .collect();
    if tops.is_empty() {
        return Err(HdxError::EmptyTopLevel);
    }
    WeightedComplex::build(&tops, &WeightKind::Homogeneous)
}

/// Simplicial join. `y` is shifted past the ids of `x` when they overlap.
pub fn join(x: &WeightedComplex, y: &WeightedComplex) -> WeightedComplex {
    let xmax = x.vertex_ids().into_iter().max().unwrap_or(0);
    let ymin = y.vertex_ids().into_iter().min().unwrap_or(0);
    let shift = if ymin > xmax { 0 } else { xmax + 1 - ymin };
    let mut tops = Vec::with_capacity(x.tops().len() * y.tops().len());
    for s in x.tops() {
        for t in y.tops() {
            let mut v = s.vertices().to_vec();
            v.extend(t.vertices().iter().map(|&u| u + shift));
            tops.push(v);
        }
    }
    WeightedComplex::build(&tops, &WeightKind::Homogeneous).expect("join of valid complexes")
}

/// Top weights `a/b` with `a` in 1..=5 and `b` in 1..=3.
pub fn random_reweight(x: &WeightedComplex, seed: u64) -> Result<WeightedComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ws = (0..x.tops().len())
        .map(|_| rat(rng.random_range(1..=5), rng.random_range(1..=3)))
        .collect();
    let tops: Vec<Vec<u32>> = x.tops().iter().map(|s| s.vertices().to_vec()).collect();
    WeightedComplex::build(&tops, &WeightKind::Custom(ws))
}

/// The fixed corpus: dimensions 1 to 4, at most 200 top cells, at most 26
/// vertices.
pub fn corpus_specs() -> Vec<GeneratorSpec> {
    use GeneratorSpec::*;
    let pts = |v| Skeleton { v, d: 0 };
    let j = GeneratorSpec::join_of;
    let octa = j(pts(2), j(pts(2), pts(2)));
    let cross3 = j(pts(2), octa.clone());
    let mut out = Vec::new();
    for v in 2..=5 {
        out.push(FullSimplex { v });
    }
    for v in 4..=7u32 {
        for d in 1..=(v - 2).min(3) {
            if d != v - 2 {
                out.push(Skeleton { v, d });
            }
        }
    }
    for v in 3..=6 {
        out.push(HollowSimplex { v });
    }
    out.push(ProjectivePlaneFlag { q: 2 });
    out.push(ProjectivePlaneFlag { q: 3 });
    let mut seed = 1000;
    for n in 1..=3 {
        for v in 6..=8 {
            for p in [rat(1, 2), rat(3, 4)] {
                out.push(LinialMeshulam { n, v, p, seed });
                seed += 1;
            }
        }
    }
    out.extend([
        j(pts(3), pts(3)),
        j(pts(2), pts(2)),
        j(pts(2), pts(3)),
        octa.clone(),
        cross3.clone(),
        j(pts(2), cross3.clone()),
        j(HollowSimplex { v: 3 }, pts(2)),
        j(HollowSimplex { v: 3 }, HollowSimplex { v: 3 }),
        j(HollowSimplex { v: 3 }, FullSimplex { v: 1 }),
        j(ProjectivePlaneFlag { q: 2 }, FullSimplex { v: 1 }),
        j(pts(3), FullSimplex { v: 2 }),
        j(HollowSimplex { v: 4 }, pts(2)),
        j(pts(3), j(pts(3), pts(3))),
    ]);
    let rw = |base: GeneratorSpec, seed| Reweighted { base: Box::new(base), seed };
    out.extend([
        rw(Skeleton { v: 5, d: 2 }, 1),
        rw(HollowSimplex { v: 5 }, 2),
        rw(octa, 3),
        rw(LinialMeshulam { n: 2, v: 7, p: rat(3, 4), seed: 7 }, 4),
        rw(j(pts(3), pts(3)), 5),
        rw(Skeleton { v: 6, d: 3 }, 6),
        rw(cross3, 7),
    ]);
    out
}

pub struct CorpusEntry {
    pub name: String,
    pub spec: GeneratorSpec,
    pub complex: WeightedComplex,
}

pub fn standard_corpus() -> Result<Vec<CorpusEntry>> {
    corpus_specs()
        .into_par_iter()
        .map(|spec| {
            let complex = spec.build()?;
            Ok(CorpusEntry { name: spec.to_string(), spec, complex })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::complex_to_json;
    use crate::spectral::{spectral_gap, WeightedGraph};

    #[test]
    fn simplices() {
        let t = full_simplex(3).unwrap();
        assert_eq!((t.dim(), t.num_cells(0), t.num_cells(2)), (2, 3, 1));
        let p = full_simplex(1).unwrap();
        assert_eq!((p.dim(), p.num_cells(0)), (0, 1));
        assert!(matches!(full_simplex(0), Err(HdxError::BadArgs(_))));
        let h = hollow_simplex(4).unwrap();
        assert_eq!((h.dim(), h.num_cells(2), h.num_cells(1)), (2, 4, 6));
        assert!(simplex_skeleton(3, 3).is_err());
    }

    #[test]
    fn projective_planes() {
        let f = projective_plane_flag(2).unwrap();
        assert_eq!((f.dim(), f.num_cells(0), f.num_cells(1)), (1, 14, 21));
        let g = projective_plane_flag(3).unwrap();
        assert_eq!((g.num_cells(0), g.num_cells(1)), (26, 52));
        // every vertex has degree q + 1
        for x in [&f, &g] {
            let q = if x.num_cells(0) == 14 { 3 } else { 4 };
            for i in 0..x.num_cells(0) {
                assert_eq!(x.cofacet_indices(0, i).len(), q);
            }
        }
        assert!(matches!(projective_plane_flag(4), Err(HdxError::UnsupportedQ(4))));
        let gap = spectral_gap(&WeightedGraph::one_skeleton(&f).unwrap()).unwrap();
        assert!((gap - (1.0 - 2f64.sqrt() / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn linial_meshulam_cases() {
        let full = linial_meshulam(2, 6, &rat(1, 1), 3).unwrap();
        assert_eq!(full, simplex_skeleton(6, 2).unwrap());
        let a = linial_meshulam(2, 8, &rat(3, 4), 1).unwrap();
        let b = linial_meshulam(2, 8, &rat(3, 4), 1).unwrap();
        assert_eq!(complex_to_json(&a), complex_to_json(&b));
        assert!(a.validate().is_ok());
        assert!(a.num_cells(2) < 56);
        assert!(matches!(linial_meshulam(0, 3, &rat(1, 2), 0), Err(HdxError::BadArgs(_))));
        assert!(matches!(linial_meshulam(1, 3, &rat(0, 1), 0), Err(HdxError::BadArgs(_))));
        let tiny = Rational::new(1.into(), 1_000_000_000u64.into());
        assert!(matches!(linial_meshulam(1, 3, &tiny, 0), Err(HdxError::EmptyTopLevel)));
    }

    #[test]
    fn joins() {
        let pts = simplex_skeleton(3, 0).unwrap();
        let k33 = join(&pts, &pts);
        assert_eq!((k33.dim(), k33.num_cells(0), k33.num_cells(1)), (1, 6, 9));
        for e in k33.tops() {
            assert!(e.vertices()[0] < 3 && e.vertices()[1] >= 3);
        }
        let cone = join(&hollow_simplex(3).unwrap(), &full_simplex(1).unwrap());
        let fan = WeightedComplex::build(
            &[vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            &WeightKind::Homogeneous,
        )
        .unwrap();
        assert_eq!(cone, fan);
        let big = join(&hollow_simplex(4).unwrap(), &full_simplex(2).unwrap());
        assert_eq!(big.dim(), 2 + 1 + 1);
    }

    #[test]
    fn corpus_shape() {
        let corpus = standard_corpus().unwrap();
        assert!(corpus.len() >= 50);
        for e in &corpus {
            let x = &e.complex;
            assert!((1..=4).contains(&x.dim()), "{}", e.name);
            assert!(x.tops().len() <= 200, "{}", e.name);
            assert!(x.num_cells(0) <= 26, "{}", e.name);
            assert!(x.validate().is_ok(), "{}", e.name);
        }
        let names: std::collections::BTreeSet<_> = corpus.iter().map(|e| &e.name).collect();
        assert_eq!(names.len(), corpus.len());
    }

    #[test]
    fn spec_serde() {
        let spec = GeneratorSpec::LinialMeshulam { n: 2, v: 8, p: rat(3, 4), seed: 1 };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"kind":"linial-meshulam","n":2,"v":8,"p":"3/4","seed":1}"#);
        let back: GeneratorSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
