//! Minimal, locally minimal and ε-locally minimal cochains; the local
//! correction procedure; thin simplices.

use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::{differential_bits, localized_bits, norm_scaled, Cochain};
use crate::complex::{Simplex, WeightedComplex};
use crate::config::Config;
use crate::enumerate::{walk_seq, MinNorm, Track};
use crate::error::{HdxError, Result};
use crate::expansion::{coset_min_seq, unit_vectors};
use crate::gf2::Bits;
use crate::rational::{from_u128, Frac, Rational};

/// `‖φ‖ ≤ ‖φ − ψ‖` for every `ψ ∈ B^k`.
pub fn is_minimal(x: &WeightedComplex, phi: &Cochain, cfg: &Config) -> Result<bool> {
    phi.check(x)?;
    minimal_bits(x, phi.k(), phi.bits(), cfg)
}

fn minimal_bits(x: &WeightedComplex, k: isize, bits: &Bits, cfg: &Config) -> Result<bool> {
    let b = x.coboundary_space(k)?;
    cfg.check_cap(b.dim())?;
    let w = x.scaled_weights(k);
    Ok(coset_min_seq(w, bits.clone(), b.rows()).norm == norm_scaled(x, k, bits))
}

/// Every vertex localization is minimal in its link; for `k = 0` this is
/// minimality itself.
pub fn is_locally_minimal(x: &WeightedComplex, phi: &Cochain, cfg: &Config) -> Result<bool> {
    phi.check(x)?;
    let k = phi.k();
    if k <= 0 {
        return minimal_bits(x, k, phi.bits(), cfg);
    }
    let results: Vec<Result<bool>> = (0..x.num_cells(0))
        .into_par_iter()
        .map(|v| {
            let link = x.link_at(0, v)?;
            let local = localized_bits(&link, k, 0, phi.bits());
            minimal_bits(&link.complex, k - 1, &local, cfg)
        })
        .collect();
    for r in results {
        if !r? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_eps(eps: &Rational, allow_zero: bool) -> Result<()> {
    use num_traits::{Signed, Zero};
    if eps.is_negative() || (!allow_zero && eps.is_zero()) {
        return Err(HdxError::BadEpsilon(crate::rational::fmt_rational(eps)));
    }
    Ok(())
}

/// A pair `(τ, ψ′)` witnessing that a cochain is not ε-locally minimal.
struct LocalViolation {
    j: isize,
    index: usize,
    /// Best correction in the link, in `C^{k−j−2}(X_τ)`.
    correction: Bits,
    before: u128,
    after: u128,
}

/// First `(j, τ)` in (dimension, canonical) order where the localization
/// can be improved by more than `ε·m(τ)`.
fn first_violation(
    x: &WeightedComplex,
    k: isize,
    bits: &Bits,
    eps: &Frac,
    want_correction: bool,
    cfg: &Config,
) -> Result<Option<LocalViolation>> {
    for j in 0..k {
        let kk = k - j - 1;
        let weights = x.scaled_weights(j);
        let found = (0..x.num_cells(j))
            .into_par_iter()
            .map(|i| -> Result<Option<LocalViolation>> {
                let link = x.link_at(j, i)?;
                let l = &link.complex;
                let local = localized_bits(&link, k, j, bits);
                let before = norm_scaled(l, kk, &local);
                let b = l.coboundary_space(kk)?;
                cfg.check_cap(b.dim())?;
                let best = coset_min_seq(l.scaled_weights(kk), local.clone(), b.rows()).norm;
                if eps.le_plus(before, best, weights[i]) {
                    return Ok(None);
                }
                let correction = if want_correction { best_correction(l, kk, &local)? } else { Bits::zeros(0) };
                Ok(Some(LocalViolation { j, index: i, correction, before, after: best }))
            })
            .find_map_first(|r| match r {
                Ok(None) => None,
                other => Some(other),
            });
        if let Some(r) = found {
            return r;
        }
    }
    Ok(None)
}

/// Lexicographically least `ψ′` among reduced representatives of
/// `C^{kk−1}/Z^{kk−1}` minimizing `‖φ_τ − dψ′‖`.
fn best_correction(l: &WeightedComplex, kk: isize, local: &Bits) -> Result<Bits> {
    let z = l.cocycle_space(kk - 1)?;
    let free = z.free_positions();
    let len = l.num_cells(kk - 1);
    let diff = l.differential(kk - 1)?;
    let reps = unit_vectors(len, &free);
    let images: Vec<Bits> = free.iter().map(|&p| diff.images[p].clone()).collect();
    let tracks = [
        Track::new(Bits::zeros(len), &reps, l.scaled_weights(kk - 1)),
        Track::new(local.clone(), &images, l.scaled_weights(kk)),
    ];
    let best = walk_seq(&tracks, &[], MinNorm::new(), |m, st| m.offer(st.norms[1], &st.bits[0]));
    Ok(best.witness.expect("nonempty"))
}

/// For `k ≥ 1`: for all `0 ≤ j ≤ k−1` and `τ ∈ X^(j)`,
/// `‖φ_τ‖ ≤ ‖φ_τ − ψ‖ + ε·m(τ)` for every `ψ ∈ B^{k−j−1}(X_τ)`.
/// For `k = 0`: `‖φ‖ ≤ (1+ε)·m(X^(0))/2`.
pub fn is_eps_locally_minimal(x: &WeightedComplex, phi: &Cochain, eps: &Rational, cfg: &Config) -> Result<bool> {
    phi.check(x)?;
    check_eps(eps, true)?;
    eps_locally_minimal_bits(x, phi.k(), phi.bits(), &Frac::new(eps), cfg)
}

pub(crate) fn eps_locally_minimal_bits(x: &WeightedComplex, k: isize, bits: &Bits, eps: &Frac, cfg: &Config) -> Result<bool> {
    match k {
        ..0 => Err(HdxError::BadDimension { k, min: 0, max: x.dim() as isize }),
        0 => Ok(k0_condition(x, bits, eps)),
        _ => Ok(first_violation(x, k, bits, eps, false, cfg)?.is_none()),
    }
}

/// `2‖φ‖ ≤ (1+ε)·m(X^(0))`.
fn k0_condition(x: &WeightedComplex, bits: &Bits, eps: &Frac) -> bool {
    let total: u128 = x.scaled_weights(0).iter().sum();
    eps.le_plus(2 * norm_scaled(x, 0, bits), total, total)
}

/// One correction `φ ← φ − dψ_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimizationStep {
    pub j: isize,
    pub tau: Simplex,
    /// Hex of the link correction `ψ′`.
    pub correction: String,
    #[serde(with = "crate::rational::serde_str")]
    pub local_before: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub local_after: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimizationTrace {
    pub input: Cochain,
    /// Accumulated correction ψ in `C^{k−1}`.
    pub psi: Cochain,
    /// `φ − dψ`, which is ε-locally minimal.
    pub output: Cochain,
    pub steps: Vec<MinimizationStep>,
    pub epsilon: Rational,
}

/// Finds ψ with `φ − dψ` ε-locally minimal and `‖φ‖ ≥ ‖φ − dψ‖ + ε‖ψ‖`.
pub fn eps_local_minimize(x: &WeightedComplex, phi: &Cochain, eps: &Rational, cfg: &Config) -> Result<MinimizationTrace> {
    phi.check(x)?;
    check_eps(eps, false)?;
    let k = phi.k();
    if k < 0 {
        return Err(HdxError::BadDimension { k, min: 0, max: x.dim() as isize });
    }
    let frac = Frac::new(eps);
    let mut cur = phi.bits().clone();
    let mut psi = Bits::zeros(x.num_cells(k - 1));
    let mut steps = Vec::new();
    if k == 0 {
        if !k0_condition(x, &cur, &frac) {
            psi.set(0, true);
            cur = cur.xor(&Bits::ones(cur.len()));
            let m = x.scaled_weights(-1)[0];
            steps.push(MinimizationStep {
                j: -1,
                tau: Simplex::empty(),
                correction: hex::encode(psi.to_bytes()),
                local_before: from_u128(norm_scaled(x, 0, phi.bits()), x.denom()),
                local_after: from_u128(m - norm_scaled(x, 0, phi.bits()), x.denom()),
            });
        }
    } else {
        while let Some(v) = first_violation(x, k, &cur, &frac, true, cfg)? {
            let link = x.link_at(v.j, v.index)?;
            let kk = k - v.j - 1;
            let lift = &link.lift[kk as usize];
            let mut step_psi = Bits::zeros(psi.len());
            for i in v.correction.ones_iter() {
                step_psi.set(lift[i], true);
            }
            cur.xor_assign(&differential_bits(x, k - 1, &step_psi)?);
            psi.xor_assign(&step_psi);
            steps.push(MinimizationStep {
                j: v.j,
                tau: x.cells(v.j)[v.index].clone(),
                correction: hex::encode(v.correction.to_bytes()),
                local_before: from_u128(v.before, x.denom()),
                local_after: from_u128(v.after, x.denom()),
            });
        }
    }
    Ok(MinimizationTrace {
        input: phi.clone(),
        psi: Cochain::new(x, k - 1, psi)?,
        output: Cochain::new(x, k, cur)?,
        steps,
        epsilon: eps.clone(),
    })
}

/// `‖φ_τ‖` for every `τ ∈ X^(k−1)`, as numerators over `x.denom()`.
pub(crate) fn codim_one_local_norms(x: &WeightedComplex, k: isize, bits: &Bits) -> Vec<u128> {
    let w = x.scaled_weights(k);
    (0..x.num_cells(k - 1))
        .map(|i| x.cofacet_indices(k - 1, i).iter().filter(|&&c| bits.get(c)).map(|&c| w[c]).sum())
        .collect()
}

/// The δ-thin simplices of a cochain and the share of norm they carry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThinnessReport {
    #[serde(with = "crate::rational::serde_str")]
    pub delta: Rational,
    /// `A_δ = {τ ∈ X^(k−1) : ‖φ_τ‖ ≤ δ·m(τ)}`.
    pub thin: Vec<Simplex>,
    /// `Σ_{τ ∈ A_δ} ‖φ_τ‖ / ((k+1)‖φ‖)`.
    #[serde(with = "crate::rational::serde_str")]
    pub r_star: Rational,
}

impl ThinnessReport {
    /// φ is `(r, δ)`-thin.
    pub fn is_thin(&self, r: &Rational) -> bool {
        &self.r_star >= r
    }
}

pub fn thinness(x: &WeightedComplex, phi: &Cochain, delta: &Rational) -> Result<ThinnessReport> {
    phi.check(x)?;
    let k = phi.k();
    if k < 1 {
        return Err(HdxError::BadDimension { k, min: 1, max: x.dim() as isize });
    }
    if phi.is_zero() {
        return Err(HdxError::ZeroCochain);
    }
    let (thin_idx, r_num, r_den) = thin_parts(x, k, phi.bits(), &Frac::new(delta));
    Ok(ThinnessReport {
        delta: delta.clone(),
        thin: thin_idx.iter().map(|&i| x.cells(k - 1)[i].clone()).collect(),
        r_star: from_u128(r_num, r_den),
    })
}

/// Indices of `A_δ`, and `r*` as a fraction of scaled integers.
pub(crate) fn thin_parts(x: &WeightedComplex, k: isize, bits: &Bits, delta: &Frac) -> (Vec<usize>, u128, u128) {
    let local = codim_one_local_norms(x, k, bits);
    let m = x.scaled_weights(k - 1);
    let thin: Vec<usize> = (0..local.len()).filter(|&i| delta.le_times(local[i], m[i])).collect();
    let carried: u128 = thin.iter().map(|&i| local[i]).sum();
    (thin, carried, (k as u128 + 1) * norm_scaled(x, k, bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{differential, norm};
    use crate::complex::WeightKind;
    use crate::rational::{int, rat};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn build(tops: &[Vec<u32>]) -> WeightedComplex {
        WeightedComplex::build(tops, &WeightKind::Homogeneous).unwrap()
    }

    #[test]
    fn minimality_on_triangle() {
        let x = build(&[vec![0, 1, 2]]);
        let cfg = Config::default();
        let one = Cochain::indicator(&x, 0, &[s(&[0])]).unwrap();
        let two = Cochain::indicator(&x, 0, &[s(&[0]), s(&[1])]).unwrap();
        assert!(is_minimal(&x, &one, &cfg).unwrap());
        assert!(!is_minimal(&x, &two, &cfg).unwrap());
        assert!(is_minimal(&x, &Cochain::zero(&x, 0).unwrap(), &cfg).unwrap());
        assert!(is_locally_minimal(&x, &Cochain::zero(&x, 1).unwrap(), &cfg).unwrap());
        assert!(is_eps_locally_minimal(&x, &one, &int(0), &cfg).unwrap());
        assert!(!is_eps_locally_minimal(&x, &two, &rat(1, 10), &cfg).unwrap());
    }

    #[test]
    fn locally_minimal_fails_somewhere_on_tetrahedron() {
        let t = build(&[vec![0, 1, 2, 3]]);
        let cfg = Config::default();
        // all three edges at vertex 0: the link of 0 sees the all-ones 0-cochain
        let phi = Cochain::indicator(&t, 1, &[s(&[0, 1]), s(&[0, 2]), s(&[0, 3])]).unwrap();
        assert!(!is_locally_minimal(&t, &phi, &cfg).unwrap());
    }

    #[test]
    fn k0_minimize_hand_example() {
        let x = build(&[vec![0, 1, 2]]);
        let cfg = Config::default();
        let phi = Cochain::indicator(&x, 0, &[s(&[0]), s(&[1])]).unwrap();
        let eps = rat(1, 10);
        let tr = eps_local_minimize(&x, &phi, &eps, &cfg).unwrap();
        assert_eq!(tr.psi.support(&x), vec![Simplex::empty()]);
        assert_eq!(tr.output.support(&x), vec![s(&[2])]);
        let lhs = norm(&x, &phi).unwrap();
        let rhs = norm(&x, &tr.output).unwrap() + &eps * norm(&x, &tr.psi).unwrap();
        assert!(lhs >= rhs);
        assert_eq!(lhs, int(4));
        assert_eq!(rhs, rat(13, 5));
    }

    #[test]
    fn minimize_already_minimal_is_identity() {
        let x = build(&[vec![0, 1, 2], vec![1, 2, 3]]);
        let cfg = Config::default();
        let phi = Cochain::indicator(&x, 1, &[s(&[0, 1])]).unwrap();
        let tr = eps_local_minimize(&x, &phi, &rat(1, 100), &cfg).unwrap();
        assert!(tr.psi.is_zero());
        assert!(tr.steps.is_empty());
        assert!(eps_local_minimize(&x, &phi, &int(0), &cfg).is_err());
    }

    #[test]
    fn minimize_random_two_triangles() {
        let x = build(&[vec![0, 1, 2], vec![1, 2, 3]]);
        let cfg = Config::default();
        let eps = rat(1, 100);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let phi = Cochain::random(&x, 1, &mut rng).unwrap();
            let tr = eps_local_minimize(&x, &phi, &eps, &cfg).unwrap();
            let dpsi = differential(&x, &tr.psi).unwrap();
            assert_eq!(phi.add(&dpsi).unwrap(), tr.output);
            assert!(is_eps_locally_minimal(&x, &tr.output, &eps, &cfg).unwrap());
            let lhs = norm(&x, &phi).unwrap();
            assert!(lhs >= norm(&x, &tr.output).unwrap() + &eps * norm(&x, &tr.psi).unwrap());
        }
    }

    #[test]
    fn thinness_examples() {
        let x = build(&[vec![0, 1, 2]]);
        let phi = Cochain::indicator(&x, 1, &[s(&[0, 1])]).unwrap();
        let r = thinness(&x, &phi, &rat(3, 5)).unwrap();
        assert_eq!(r.thin.len(), 3);
        assert_eq!(r.r_star, int(1));
        let r = thinness(&x, &phi, &rat(2, 5)).unwrap();
        assert_eq!(r.thin, vec![s(&[2])]);
        assert_eq!(r.r_star, int(0));
        assert!(matches!(thinness(&x, &Cochain::zero(&x, 1).unwrap(), &rat(1, 2)), Err(HdxError::ZeroCochain)));
    }
}
