//! Exact coboundary and cocycle expansion, cofilling constants and systoles.
//!
//! Every quantity is a minimum or maximum over a finite GF(2) space and is
//! computed by exhaustive enumeration under the configured cap. Witnesses are
//! lexicographically least among the optimizers.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::cochain::{subspace_basis, Cochain, SubspaceBasis, SubspaceKind};
use crate::complex::WeightedComplex;
use crate::config::Config;
use crate::enumerate::{walk_par, walk_seq, MinNorm, Track};
use crate::error::{HdxError, Result};
use crate::gf2::{Bits, Rref};
use crate::rational::{binomial, from_u128, ExtRational, Rational};

/// How the outer minimization of an expansion constant is organized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Walk every cochain of `C^k`, tabulating coset minima by coset.
    Exhaustive,
    /// Walk one reduced representative per coset and minimize inside it.
    #[default]
    Quotient,
}

/// Minimum norm over a coset and the lexicographically least minimizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetMin {
    pub norm: Rational,
    pub witness: Cochain,
}

/// An optimum over a finite space of cochains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extremum {
    pub value: ExtRational,
    /// Attaining cochain; `None` when the optimized set is empty.
    pub witness: Option<Cochain>,
    /// Number of elements enumerated (log2).
    pub log2_size: u32,
}

pub(crate) fn unit_vectors(len: usize, positions: &[usize]) -> Vec<Bits> {
    positions.iter().map(|&p| Bits::singleton(len, p)).collect()
}

/// Minimum scaled norm over `start + span(rows)` on the current thread.
pub(crate) fn coset_min_seq(weights: &[u128], start: Bits, rows: &[Bits]) -> MinNorm {
    let track = Track::new(start, rows, weights);
    walk_seq(std::slice::from_ref(&track), &[], MinNorm::new(), |m, st| m.offer(st.norms[0], &st.bits[0]))
}

fn coset_min_par(weights: &[u128], start: Bits, rows: &[Bits]) -> MinNorm {
    let track = Track::new(start, rows, weights);
    walk_par(
        std::slice::from_ref(&track),
        &[],
        MinNorm::new,
        |m, st| m.offer(st.norms[0], &st.bits[0]),
        MinNorm::merge,
    )
}

/// `min_{ψ ∈ S} ‖φ − ψ‖` with its lexicographically least attaining element.
pub fn coset_min_norm(x: &WeightedComplex, phi: &Cochain, s: &SubspaceBasis, cfg: &Config) -> Result<CosetMin> {
    phi.check(x)?;
    if phi.k() != s.k {
        return Err(HdxError::BadArgs(format!("cochain has dimension {}, subspace {}", phi.k(), s.k)));
    }
    cfg.check_cap(s.dim())?;
    let m = coset_min_par(x.scaled_weights(phi.k()), phi.bits().clone(), s.rref().rows());
    let witness = Cochain::new(x, phi.k(), m.witness.expect("coset is nonempty"))?;
    Ok(CosetMin { norm: from_u128(m.norm, x.denom()), witness })
}

/// Best ratio seen so far, ties broken by the lexicographically least witness.
#[derive(Clone, Debug)]
struct BestRatio {
    num: u128,
    den: u128,
    witness: Option<Bits>,
    maximize: bool,
}

impl BestRatio {
    fn new(maximize: bool) -> Self {
        BestRatio { num: 0, den: 0, witness: None, maximize }
    }

    fn offer(&mut self, num: u128, den: u128, witness: &Bits) {
        let better = match &self.witness {
            None => true,
            Some(w) => {
                let (a, b) = (num * self.den, self.num * den);
                let strictly = if self.maximize { a > b } else { a < b };
                strictly || (a == b && witness.lex_cmp(w).is_lt())
            }
        };
        if better {
            self.num = num;
            self.den = den;
            self.witness = Some(witness.clone());
        }
    }

    fn merge(mut self, other: BestRatio) -> BestRatio {
        if let Some(w) = &other.witness {
            self.offer(other.num, other.den, w);
        }
        self
    }
}

fn check_expansion_k(x: &WeightedComplex, k: isize) -> Result<()> {
    if k < -1 || k > x.dim() as isize - 1 {
        return Err(HdxError::BadDimension { k, min: -1, max: x.dim() as isize - 1 });
    }
    Ok(())
}

/// `min_{φ ∉ S} ‖dφ‖ / min_{ψ ∈ S} ‖φ − ψ‖` for `S = B^k` or `Z^k`.
fn expansion(x: &WeightedComplex, k: isize, kind: SubspaceKind, mode: Mode, cfg: &Config) -> Result<Extremum> {
    check_expansion_k(x, k)?;
    let len = x.num_cells(k);
    cfg.check_cap(len)?;
    let s = subspace_basis(x, k, kind)?;
    let free = s.rref().free_positions();
    let log2_size = len as u32;
    if free.is_empty() {
        return Ok(Extremum { value: ExtRational::Infinity, witness: None, log2_size });
    }
    let best = match mode {
        Mode::Quotient => expansion_quotient(x, k, s.rref(), &free),
        Mode::Exhaustive => expansion_exhaustive(x, k, s.rref(), &free),
    }?;
    let witness = Cochain::new(x, k, best.witness.expect("nonempty quotient"))?;
    Ok(Extremum { value: ExtRational::Finite(from_u128(best.num, best.den)), witness: Some(witness), log2_size })
}

fn expansion_quotient(x: &WeightedComplex, k: isize, s: &Rref, free: &[usize]) -> Result<BestRatio> {
    let len = x.num_cells(k);
    let diff = x.differential(k)?;
    let reps = unit_vectors(len, free);
    let d_reps: Vec<Bits> = free.iter().map(|&p| diff.images[p].clone()).collect();
    let w = x.scaled_weights(k);
    let tracks = [
        Track::new(Bits::zeros(len), &reps, w),
        Track::new(Bits::zeros(x.num_cells(k + 1)), &d_reps, x.scaled_weights(k + 1)),
    ];
    Ok(walk_par(
        &tracks,
        &[],
        || BestRatio::new(false),
        |best, st| {
            if st.coeffs == 0 {
                return;
            }
            let inner = coset_min_seq(w, st.bits[0].clone(), s.rows());
            best.offer(st.norms[1], inner.norm, inner.witness.as_ref().expect("nonempty"));
        },
        BestRatio::merge,
    ))
}

fn expansion_exhaustive(x: &WeightedComplex, k: isize, s: &Rref, free: &[usize]) -> Result<BestRatio> {
    let len = x.num_cells(k);
    let diff = x.differential(k)?;
    let w = x.scaled_weights(k);
    // key of a cochain: its reduced form read off at the free positions
    let key_of = |v: &Bits| -> u64 {
        let r = s.reduce(v);
        free.iter().enumerate().filter(|(_, &p)| r.get(p)).fold(0u64, |acc, (i, _)| acc | 1 << i)
    };
    let units = unit_vectors(len, &(0..len).collect::<Vec<_>>());
    let keys: Vec<u64> = units.iter().map(key_of).collect();
    let table: Vec<AtomicU64> = (0..1usize << free.len()).map(|_| AtomicU64::new(u64::MAX)).collect();
    let track = Track::new(Bits::zeros(len), &units, w);
    walk_par(
        std::slice::from_ref(&track),
        &keys,
        || (),
        |_, st| {
            table[st.key as usize].fetch_min(st.norms[0] as u64, Ordering::Relaxed);
        },
        |_, _| (),
    );
    // dφ is constant on each coset; evaluate it on the reduced representatives
    let reps = unit_vectors(len, free);
    let d_reps: Vec<Bits> = free.iter().map(|&p| diff.images[p].clone()).collect();
    let dtrack = Track::new(Bits::zeros(x.num_cells(k + 1)), &d_reps, x.scaled_weights(k + 1));
    let smaller = |a: Option<(u128, u128)>, b: Option<(u128, u128)>| match (a, b) {
        (Some((n1, d1)), Some((n2, d2))) => Some(if n2 * d1 < n1 * d2 { (n2, d2) } else { (n1, d1) }),
        (a, None) => a,
        (None, b) => b,
    };
    let (num, den) = walk_par(
        std::slice::from_ref(&dtrack),
        &[],
        || None,
        |best: &mut Option<(u128, u128)>, st| {
            if st.coeffs != 0 {
                let min = table[st.coeffs as usize].load(Ordering::Relaxed) as u128;
                *best = smaller(*best, Some((st.norms[0], min)));
            }
        },
        smaller,
    )
    .expect("nonempty quotient");
    // every coset attaining the optimal ratio competes for the witness
    let mut best = BestRatio::new(false);
    let tied = walk_par(
        std::slice::from_ref(&dtrack),
        &[],
        Vec::new,
        |v: &mut Vec<u64>, st| {
            if st.coeffs != 0 {
                let min = table[st.coeffs as usize].load(Ordering::Relaxed) as u128;
                if st.norms[0] * den == num * min {
                    v.push(st.coeffs);
                }
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    );
    for c in tied {
        let mut start = Bits::zeros(len);
        for (i, r) in reps.iter().enumerate() {
            if c >> i & 1 == 1 {
                start.xor_assign(r);
            }
        }
        let inner = coset_min_seq(w, start, s.rows());
        best.offer(num, den, inner.witness.as_ref().expect("nonempty"));
    }
    Ok(best)
}

/// `ε_k(X)`; `+∞` when `C^k = B^k`.
pub fn coboundary_expansion(x: &WeightedComplex, k: isize, mode: Mode, cfg: &Config) -> Result<Extremum> {
    expansion(x, k, SubspaceKind::Bk, mode, cfg)
}

/// `ε̃_k(X)`; `+∞` when `C^k = Z^k`.
pub fn cocycle_expansion(x: &WeightedComplex, k: isize, mode: Mode, cfg: &Config) -> Result<Extremum> {
    expansion(x, k, SubspaceKind::Zk, mode, cfg)
}

/// `μ_k(X) = max_{0 ≠ φ ∈ B^{k+1}} min{‖ψ‖ : dψ = φ} / ‖φ‖`; zero when
/// `B^{k+1} = 0`.
///
/// Each φ is solved for one preimage, which is then minimized over `Z^k`.
pub fn cofilling(x: &WeightedComplex, k: isize, cfg: &Config) -> Result<Extremum> {
    check_expansion_k(x, k)?;
    let len = x.num_cells(k);
    cfg.check_cap(len)?;
    let b = x.coboundary_space(k + 1)?;
    let z = x.cocycle_space(k)?;
    let diff = x.differential(k)?;
    let log2_size = len as u32;
    if b.dim() == 0 {
        return Ok(Extremum { value: ExtRational::Finite(from_u128(0, 1)), witness: None, log2_size });
    }
    let w = x.scaled_weights(k);
    let track = Track::new(Bits::zeros(x.num_cells(k + 1)), b.rows(), x.scaled_weights(k + 1));
    let best = walk_par(
        std::slice::from_ref(&track),
        &[],
        || BestRatio::new(true),
        |best, st| {
            if st.coeffs == 0 {
                return;
            }
            let psi0 = diff.map.preimage(&st.bits[0]).expect("φ lies in the image");
            let inner = coset_min_seq(w, psi0, z.rows());
            best.offer(inner.norm, st.norms[0], &st.bits[0]);
        },
        BestRatio::merge,
    );
    let witness = Cochain::new(x, k + 1, best.witness.expect("nonzero coboundary"))?;
    Ok(Extremum { value: ExtRational::Finite(from_u128(best.num, best.den)), witness: Some(witness), log2_size })
}

/// `min{‖φ‖ : φ ∈ Z^k ∖ B^k}`; `+∞` when `H^k = 0`.
pub fn systole(x: &WeightedComplex, k: isize, cfg: &Config) -> Result<Extremum> {
    x.check_dim(k)?;
    let z = x.cocycle_space(k)?;
    let b = x.coboundary_space(k)?;
    cfg.check_cap(z.dim())?;
    let log2_size = z.dim() as u32;
    // cocycles that are independent modulo B^k
    let mut span = (*b).clone();
    let mut classes = Vec::new();
    for row in z.rows() {
        let r = span.reduce(row);
        if !r.is_zero() {
            span.insert(r.clone());
            classes.push(r);
        }
    }
    if classes.is_empty() {
        return Ok(Extremum { value: ExtRational::Infinity, witness: None, log2_size });
    }
    let len = x.num_cells(k);
    let w = x.scaled_weights(k);
    let track = Track::new(Bits::zeros(len), &classes, w);
    let best = walk_par(
        std::slice::from_ref(&track),
        &[],
        MinNorm::new,
        |m, st| {
            if st.coeffs == 0 {
                return;
            }
            let inner = coset_min_seq(w, st.bits[0].clone(), b.rows());
            m.offer(inner.norm, inner.witness.as_ref().expect("nonempty"));
        },
        MinNorm::merge,
    );
    let witness = Cochain::new(x, k, best.witness.expect("nontrivial class"))?;
    Ok(Extremum {
        value: ExtRational::Finite(from_u128(best.norm, x.denom())),
        witness: Some(witness),
        log2_size,
    })
}

/// `(C(n+1, k+2)²·|W|)^{-1}`, the coboundary expansion lower bound for
/// spherical buildings.
pub fn lmm_bound(n: usize, k: usize, weyl_order: u64) -> Result<Rational> {
    if n == 0 || k > n - 1 || weyl_order == 0 {
        return Err(HdxError::BadArgs(format!(
            "need 0 <= k <= n - 1 and |W| >= 1 (n = {n}, k = {k}, |W| = {weyl_order})"
        )));
    }
    let c = binomial(n + 1, k + 2);
    Ok(from_u128(1, c * c * weyl_order as u128))
}

/// Constants of one dimension with their witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionRecord {
    pub k: isize,
    pub epsilon: ExtRational,
    pub epsilon_tilde: ExtRational,
    pub mu: ExtRational,
    pub systole: ExtRational,
    pub epsilon_witness: Option<String>,
    pub epsilon_tilde_witness: Option<String>,
    pub mu_witness: Option<String>,
    pub systole_witness: Option<String>,
    /// `log2 |C^k|`, the size of the enumerated space.
    pub log2_space: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionReport {
    pub complex: String,
    pub mode: Mode,
    pub records: Vec<ExpansionRecord>,
}

pub fn expansion_record(x: &WeightedComplex, k: isize, mode: Mode, cfg: &Config) -> Result<ExpansionRecord> {
    let hex = |e: &Extremum| e.witness.as_ref().map(Cochain::hex);
    let eps = coboundary_expansion(x, k, mode, cfg)?;
    let eps_t = cocycle_expansion(x, k, mode, cfg)?;
    let mu = cofilling(x, k, cfg)?;
    let sys = systole(x, k, cfg)?;
    Ok(ExpansionRecord {
        k,
        epsilon_witness: hex(&eps),
        epsilon_tilde_witness: hex(&eps_t),
        mu_witness: hex(&mu),
        systole_witness: hex(&sys),
        epsilon: eps.value,
        epsilon_tilde: eps_t.value,
        mu: mu.value,
        systole: sys.value,
        log2_space: eps.log2_size,
    })
}

pub fn expansion_report(x: &WeightedComplex, ks: &[isize], mode: Mode, cfg: &Config) -> Result<ExpansionReport> {
    let records = ks.iter().map(|&k| expansion_record(x, k, mode, cfg)).collect::<Result<_>>()?;
    Ok(ExpansionReport { complex: x.hash_hex(), mode, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Simplex, WeightKind};
    use crate::rational::{int, rat};

    fn build(tops: &[Vec<u32>]) -> WeightedComplex {
        WeightedComplex::build(tops, &WeightKind::Homogeneous).unwrap()
    }

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn fin(e: &Extremum) -> Rational {
        e.value.finite().cloned().expect("finite")
    }

    #[test]
    fn coset_min_on_triangle() {
        let x = build(&[vec![0, 1, 2]]);
        let cfg = Config::default();
        let b0 = subspace_basis(&x, 0, SubspaceKind::Bk).unwrap();
        let phi = Cochain::indicator(&x, 0, &[s(&[0])]).unwrap();
        let m = coset_min_norm(&x, &phi, &b0, &cfg).unwrap();
        assert_eq!(m.norm, int(2));
        assert_eq!(m.witness, phi);
        let ones = Cochain::new(&x, 0, Bits::ones(3)).unwrap();
        let m = coset_min_norm(&x, &ones, &b0, &cfg).unwrap();
        assert_eq!(m.norm, int(0));
        assert!(m.witness.is_zero());
    }

    #[test]
    fn k_minus_one_constants_are_one() {
        let cfg = Config::default();
        for x in [build(&[vec![0, 1, 2]]), build(&[vec![0, 1], vec![1, 2]]), build(&[vec![0, 1, 2, 3]])] {
            for mode in [Mode::Quotient, Mode::Exhaustive] {
                assert_eq!(fin(&coboundary_expansion(&x, -1, mode, &cfg).unwrap()), int(1));
                assert_eq!(fin(&cocycle_expansion(&x, -1, mode, &cfg).unwrap()), int(1));
            }
            assert_eq!(fin(&cofilling(&x, -1, &cfg).unwrap()), int(1));
        }
    }

    #[test]
    fn triangle_graph_k0() {
        let k3 = build(&[vec![0, 1], vec![1, 2], vec![0, 2]]);
        let cfg = Config::default();
        let e = coboundary_expansion(&k3, 0, Mode::Exhaustive, &cfg).unwrap();
        assert_eq!(fin(&e), int(1));
        let q = coboundary_expansion(&k3, 0, Mode::Quotient, &cfg).unwrap();
        assert_eq!(e, q);
    }

    #[test]
    fn tetrahedron_k0_cocycle_equals_coboundary() {
        let t = build(&[vec![0, 1, 2, 3]]);
        let cfg = Config::default();
        let a = coboundary_expansion(&t, 0, Mode::Quotient, &cfg).unwrap();
        let b = cocycle_expansion(&t, 0, Mode::Quotient, &cfg).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn systoles() {
        let cfg = Config::default();
        let t = build(&[vec![0, 1, 2, 3]]);
        assert!(systole(&t, 1, &cfg).unwrap().value.is_infinite());
        assert!(systole(&t, 0, &cfg).unwrap().value.is_infinite());
        let hollow = build(&[vec![0, 1], vec![1, 2], vec![0, 2]]);
        let sys = systole(&hollow, 1, &cfg).unwrap();
        // a single edge already generates H¹
        assert_eq!(fin(&sys), int(1));
        assert_eq!(sys.witness.unwrap().support(&hollow), vec![s(&[1, 2])]);
    }

    #[test]
    fn mu_times_eps_tilde() {
        let cfg = Config::default();
        let x = WeightedComplex::build(
            &[vec![0, 1, 2], vec![1, 2, 3], vec![0, 3, 4]],
            &WeightKind::Custom(vec![int(1), rat(1, 3), rat(5, 2)]),
        )
        .unwrap();
        for k in -1..=1 {
            let mu = cofilling(&x, k, &cfg).unwrap();
            let et = cocycle_expansion(&x, k, Mode::Quotient, &cfg).unwrap();
            assert_eq!(mu.value, et.value.recip(), "k = {k}");
        }
    }

    #[test]
    fn lmm_values() {
        assert_eq!(lmm_bound(1, 0, 6).unwrap(), rat(1, 6));
        assert_eq!(lmm_bound(2, 1, 24).unwrap(), rat(1, 24));
        assert_eq!(lmm_bound(2, 0, 24).unwrap(), rat(1, 216));
        assert!(lmm_bound(2, 2, 24).is_err());
        assert!(lmm_bound(2, 0, 0).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let x = build(&[vec![0, 1, 2, 3]]);
        let cfg = Config::default().with_cap(8);
        assert!(matches!(
            coboundary_expansion(&x, 1, Mode::Quotient, &cfg),
            Err(HdxError::CapExceeded { .. })
        ));
    }
}
