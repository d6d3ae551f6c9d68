//! Hypothesis certificates for topological overlap.
//!
//! Nothing here produces an overlap constant. A certificate lists each
//! hypothesis of the 2-skeleton overlap criterion with the value computed on
//! the complex and whether it holds.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::complex::{Simplex, WeightKind, WeightedComplex};
use crate::config::Config;
use crate::error::{HdxError, Result};
use crate::expansion::{cofilling, systole};
use crate::isoperimetry::{ledger_k1, ledger_k2, link_expansion_floor};
use crate::rational::{binomial, factorial, fmt_float, from_u128, rat, to_f64, ExtRational, Rational};
use crate::spectral::spectral_profile;

pub const CERT_SCHEMA: &str = "hdx-cert/1";

/// `μ = max{1/ε, 1/C₀, 2/C₁, …, n/C_{n−1}}` and `ν = min{C₀, …, C_{n−1}}`.
pub fn mu_nu_from_isoperimetry(n: usize, eps: &Rational, c: &[Rational]) -> Result<(Rational, Rational)> {
    if n == 0 || c.len() != n {
        return Err(HdxError::BadArgs(format!("expected {n} constants C_0..C_{{n-1}}, got {}", c.len())));
    }
    if !eps.is_positive() || c.iter().any(|ci| !ci.is_positive()) {
        return Err(HdxError::BadArgs("epsilon and every C_k must be positive".into()));
    }
    let mut mu = eps.recip();
    for (k, ck) in c.iter().enumerate() {
        mu = mu.max(rat(k as i64 + 1, 1) / ck);
    }
    let nu = c.iter().min().expect("nonempty").clone();
    Ok((mu, nu))
}

/// `min{‖φ‖ : φ ∈ Z^k ∖ B^k}` against `ν·m(X^(k))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystoleCheck {
    pub k: isize,
    pub systole: ExtRational,
    pub witness: Option<String>,
    #[serde(with = "crate::rational::serde_str")]
    pub bound: Rational,
    /// `H^k = 0`.
    pub vacuous: bool,
    pub holds: bool,
}

pub fn systole_condition(x: &WeightedComplex, k: isize, nu: &Rational, cfg: &Config) -> Result<SystoleCheck> {
    let s = systole(x, k, cfg)?;
    let bound = nu * x.total_weight(k)?;
    let holds = s.value >= ExtRational::Finite(bound.clone());
    Ok(SystoleCheck {
        k,
        vacuous: s.value.is_infinite(),
        witness: s.witness.map(|w| w.hex()),
        systole: s.value,
        bound,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CofillingCheck {
    pub k: isize,
    pub mu_k: ExtRational,
    pub witness: Option<String>,
    pub holds: bool,
    /// Whether the bound on `μ_k` follows from isoperimetry (`k ≤ n−2`).
    pub derived: bool,
}

/// Both KKL conditions for `0 ≤ k ≤ n−1`, under normalized homogeneous weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KklCheck {
    pub complex: String,
    #[serde(with = "crate::rational::serde_str")]
    pub mu: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub nu: Rational,
    pub cofilling: Vec<CofillingCheck>,
    pub systoles: Vec<SystoleCheck>,
}

impl KklCheck {
    pub fn holds(&self) -> bool {
        self.cofilling.iter().all(|c| c.holds) && self.systoles.iter().all(|s| s.holds)
    }
}

/// Evaluates `μ_k(X) ≤ μ` and the systole bound `ν·m(X^(k))`. The complex
/// is reweighted to normalized homogeneous weights first.
pub fn kkl_hypothesis_check(x: &WeightedComplex, mu: &Rational, nu: &Rational, cfg: &Config) -> Result<KklCheck> {
    let xb = x.reweighted(&WeightKind::NormalizedHomogeneous)?;
    let n = xb.dim() as isize;
    let mut cof = Vec::new();
    let mut sys = Vec::new();
    for k in 0..n {
        let c = cofilling(&xb, k, cfg)?;
        cof.push(CofillingCheck {
            k,
            holds: c.value <= ExtRational::Finite(mu.clone()),
            witness: c.witness.map(|w| w.hex()),
            mu_k: c.value,
            derived: k <= n - 2,
        });
        sys.push(systole_condition(&xb, k, nu, cfg)?);
    }
    Ok(KklCheck { complex: xb.hash_hex(), mu: mu.clone(), nu: nu.clone(), cofilling: cof, systoles: sys })
}

/// Comparison of the normalized weights of `X` and of its `l`-skeleton.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkeletonComparison {
    pub l: isize,
    /// Least number of top cells over an `l`-cell.
    #[serde(rename = "M1")]
    pub m1: usize,
    #[serde(rename = "M2")]
    pub m2: usize,
    #[serde(rename = "M", with = "crate::rational::serde_str")]
    pub m: Rational,
    /// `(n−l)!·C(n+1, l+1)`.
    #[serde(with = "crate::rational::serde_str")]
    pub factor: Rational,
    /// `factor / M`.
    #[serde(with = "crate::rational::serde_str")]
    pub lower: Rational,
    /// `factor · M`.
    #[serde(with = "crate::rational::serde_str")]
    pub upper: Rational,
    /// Cells of dimension `≤ l` checked.
    pub checked: usize,
    /// A cell where the two-sided bound failed.
    pub violation: Option<Simplex>,
    pub holds: bool,
}

/// `lower·m̄_{h,l}(τ) ≤ m̄_h(τ) ≤ upper·m̄_{h,l}(τ)` on every cell of
/// dimension at most `l`.
pub fn skeleton_compare(x: &WeightedComplex, l: isize) -> Result<SkeletonComparison> {
    let n = x.dim() as isize;
    if l <= 0 || l >= n {
        return Err(HdxError::BadDimension { k: l, min: 1, max: n - 1 });
    }
    let counts = x.containing_top_counts(l)?;
    let m1 = *counts.iter().min().expect("nonempty level");
    let m2 = *counts.iter().max().expect("nonempty level");
    let m = from_u128(m2 as u128, m1 as u128);
    let factor = Rational::from_integer(
        (factorial((n - l) as usize) * binomial(n as usize + 1, l as usize + 1)).into(),
    );
    let lower = &factor / &m;
    let upper = &factor * &m;
    let full = x.reweighted(&WeightKind::NormalizedHomogeneous)?;
    let skel = x.skeleton(l, &WeightKind::NormalizedHomogeneous)?;
    let mut checked = 0;
    let mut violation = None;
    'outer: for k in 0..=l {
        for (i, tau) in full.cells(k).iter().enumerate() {
            let big = full.weight(k, i);
            let small = skel.weight_of(tau).ok_or_else(|| HdxError::SimplexNotInComplex(tau.clone()))?;
            checked += 1;
            if big < &lower * &small || big > &upper * &small {
                violation = Some(tau.clone());
                break 'outer;
            }
        }
    }
    Ok(SkeletonComparison { l, m1, m2, m, factor, lower, upper, checked, holds: violation.is_none(), violation })
}

/// Optional inputs to [`certify_2skeleton`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CertifyOptions {
    /// Link expansion floor `ϵ`; defaults to the computed floor.
    #[serde(with = "crate::rational::serde_opt_str")]
    pub epsilon: Option<Rational>,
    /// Upper bound on the `M`-ratio; without one the computed ratio is used.
    #[serde(with = "crate::rational::serde_opt_str")]
    pub m_bound: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralCondition {
    /// `λ`: least gap over links of `(n−2)`-cells.
    #[serde(with = "crate::rational::serde_float")]
    pub lambda: f64,
    /// `λ_0 … λ_{n−1}`.
    pub profile: Vec<String>,
    /// `θ = max{θ₁, θ₂}`, required of `λ_0, λ_1, λ_2`.
    #[serde(with = "crate::rational::serde_opt_str")]
    pub theta: Option<Rational>,
    /// Least `λ` whose descent bounds reach `θ` at level 0; absent when
    /// no finite value works.
    #[serde(with = "crate::rational::serde_opt_str")]
    pub lambda2_threshold: Option<Rational>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkCondition {
    pub floor: ExtRational,
    #[serde(with = "crate::rational::serde_opt_str")]
    pub epsilon: Option<Rational>,
    pub overridden: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatioCondition {
    pub comparison: SkeletonComparison,
    #[serde(with = "crate::rational::serde_str")]
    pub bound: Rational,
    pub holds: bool,
}

/// Constants pushed from the isoperimetric ledgers through to the skeleton.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantChain {
    #[serde(with = "crate::rational::serde_str")]
    pub epsilon: Rational,
    /// `C_0, C_1, C_2`.
    #[serde(with = "crate::rational::serde_vec_str")]
    pub c: Vec<Rational>,
    #[serde(with = "crate::rational::serde_str")]
    pub mu: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub nu: Rational,
    /// `M²μ`.
    #[serde(with = "crate::rational::serde_str")]
    pub mu_skeleton: Rational,
    /// `ν/M`, so that the systole bound on the skeleton reads `ν_skeleton·m̄_{h,2}(X^(k))`.
    #[serde(with = "crate::rational::serde_str")]
    pub nu_skeleton: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: &'static str,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapCertificate {
    pub schema: &'static str,
    pub version: &'static str,
    pub complex: String,
    pub n: usize,
    pub l: isize,
    pub options: CertifyOptions,
    pub spectral: SpectralCondition,
    pub links: LinkCondition,
    pub ratio: RatioCondition,
    pub chain: Option<ConstantChain>,
    /// KKL conditions evaluated directly on the 2-skeleton.
    pub kkl: Option<KklCheck>,
    pub verdicts: Vec<Verdict>,
    pub overall: &'static str,
}

impl OverlapCertificate {
    pub fn satisfied(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    /// Canonical JSON text.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// `λ_{k+1} ≥ 1/(2 − θ)` keeps `λ_k ≥ θ` under descent; iterated `n − 1`
/// times from level 0.
fn inverse_descent(theta: &Rational, steps: usize) -> Option<Rational> {
    let two = rat(2, 1);
    let mut t = theta.clone();
    for _ in 0..steps {
        if t >= two {
            return None;
        }
        t = (&two - &t).recip();
    }
    Some(t)
}

/// Evaluates the hypotheses of the 2-skeleton overlap criterion.
pub fn certify_2skeleton(x: &WeightedComplex, opts: &CertifyOptions, cfg: &Config) -> Result<OverlapCertificate> {
    let n = x.dim();
    if n <= 2 {
        return Err(HdxError::BadDimension { k: n as isize, min: 3, max: isize::MAX });
    }
    let l = 2;
    let profile = spectral_profile(x, cfg.tolerance)?;
    let lambda = *profile.lambdas.last().expect("n >= 1");

    let floor = link_expansion_floor(x, cfg)?;
    let eps = match &opts.epsilon {
        Some(e) => Some(e.clone()),
        None => match &floor {
            ExtRational::Infinity => Some(Rational::one()),
            ExtRational::Finite(f) if f.is_zero() => None,
            ExtRational::Finite(f) => Some(f.clone().min(Rational::one())),
        },
    };
    let links = LinkCondition {
        holds: eps.as_ref().is_some_and(|e| floor >= ExtRational::Finite(e.clone())),
        floor,
        epsilon: eps.clone(),
        overridden: opts.epsilon.is_some(),
    };

    let k1 = ledger_k1();
    let k2 = eps.as_ref().map(ledger_k2).transpose()?;
    let theta = k2.as_ref().map(|k2| k1.theta1.clone().max(k2.theta2.clone().expect("k = 2")));
    let threshold = theta.as_ref().and_then(|t| inverse_descent(t, n - 1));
    let spectral = SpectralCondition {
        lambda,
        profile: profile.lambdas.iter().map(|v| fmt_float(*v)).collect(),
        holds: threshold.as_ref().is_some_and(|t| lambda >= to_f64(t) - cfg.tolerance),
        theta,
        lambda2_threshold: threshold,
    };

    let comparison = skeleton_compare(x, l)?;
    let bound = opts.m_bound.clone().unwrap_or_else(|| comparison.m.clone());
    let ratio = RatioCondition { holds: comparison.m <= bound && comparison.holds, bound, comparison };

    let (chain, kkl) = match &k2 {
        Some(k2) => {
            let epsilon = k1.epsilon.clone().min(k2.epsilon.clone());
            let c = vec![Rational::one(), k1.c1.clone(), k2.c2.clone().expect("k = 2")];
            let (mu, nu) = mu_nu_from_isoperimetry(l as usize + 1, &epsilon, &c)?;
            let m = &ratio.bound;
            let chain = ConstantChain {
                mu_skeleton: m * m * &mu,
                nu_skeleton: &nu / m,
                epsilon,
                c,
                mu,
                nu,
            };
            let skel = x.skeleton(l, &WeightKind::NormalizedHomogeneous)?;
            let kkl = kkl_hypothesis_check(&skel, &chain.mu_skeleton, &chain.nu_skeleton, cfg)?;
            (Some(chain), Some(kkl))
        }
        None => (None, None),
    };

    let verdicts = vec![
        Verdict { name: "local_spectral_expansion", holds: spectral.holds },
        Verdict { name: "link_coboundary_expansion", holds: links.holds },
        Verdict { name: "top_cofacet_ratio", holds: ratio.holds },
        Verdict { name: "kkl_cofilling", holds: kkl.as_ref().is_some_and(|k| k.cofilling.iter().all(|c| c.holds)) },
        Verdict { name: "kkl_systole", holds: kkl.as_ref().is_some_and(|k| k.systoles.iter().all(|s| s.holds)) },
    ];
    let overall = if verdicts.iter().all(|v| v.holds) { "hypotheses-satisfied" } else { "hypotheses-not-satisfied" };
    Ok(OverlapCertificate {
        schema: CERT_SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        complex: x.hash_hex(),
        n,
        l,
        options: opts.clone(),
        spectral,
        links,
        ratio,
        chain,
        kkl,
        verdicts,
        overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(tops: &[Vec<u32>]) -> WeightedComplex {
        WeightedComplex::build(tops, &WeightKind::Homogeneous).unwrap()
    }

    fn boundary_of_4_simplex() -> WeightedComplex {
        let tops: Vec<Vec<u32>> = (0..5u32).map(|skip| (0..5).filter(|&v| v != skip).collect()).collect();
        build(&tops)
    }

    #[test]
    fn mu_nu_by_hand() {
        let (mu, nu) = mu_nu_from_isoperimetry(3, &rat(1, 10), &[rat(1, 2), rat(1, 4), rat(1, 5)]).unwrap();
        assert_eq!((mu, nu), (rat(15, 1), rat(1, 5)));
        let (mu, nu) = mu_nu_from_isoperimetry(4, &rat(1, 1), &vec![rat(1, 1); 4]).unwrap();
        assert_eq!((mu, nu), (rat(4, 1), rat(1, 1)));
        let (mu, nu) = mu_nu_from_isoperimetry(2, &rat(1, 2), &[rat(1, 1), rat(1, 1)]).unwrap();
        assert_eq!((mu, nu), (rat(2, 1), rat(1, 1)));
        assert!(mu_nu_from_isoperimetry(2, &rat(1, 2), &[rat(1, 1)]).is_err());
        assert!(mu_nu_from_isoperimetry(1, &rat(0, 1), &[rat(1, 1)]).is_err());
    }

    #[test]
    fn kkl_on_tetrahedron() {
        let x = build(&[vec![0, 1, 2, 3]]);
        let cfg = Config::default();
        let check = kkl_hypothesis_check(&x, &rat(2, 1), &rat(1, 10), &cfg).unwrap();
        assert_eq!(check.systoles.len(), 3);
        assert!(check.systoles.iter().all(|s| s.vacuous && s.holds));
        let xb = x.reweighted(&WeightKind::NormalizedHomogeneous).unwrap();
        for c in &check.cofilling {
            assert_eq!(c.mu_k, cofilling(&xb, c.k, &cfg).unwrap().value);
            assert_eq!(c.holds, c.mu_k <= ExtRational::Finite(rat(2, 1)));
        }
        assert_eq!(check.cofilling.iter().filter(|c| c.derived).count(), 2);
        let zero = kkl_hypothesis_check(&x, &rat(0, 1), &rat(1, 10), &cfg).unwrap();
        assert!(zero.cofilling.iter().all(|c| !c.holds));
    }

    #[test]
    fn hollow_triangle_systole_condition() {
        let x = build(&[vec![0, 1], vec![1, 2], vec![0, 2]]).reweighted(&WeightKind::NormalizedHomogeneous).unwrap();
        let cfg = Config::default();
        // m(X^(1)) = 1, so ν = 4 puts the bound at 4.
        let fail = systole_condition(&x, 1, &rat(4, 1), &cfg).unwrap();
        assert_eq!(fail.bound, rat(4, 1));
        assert_eq!(fail.systole, ExtRational::Finite(rat(1, 3)));
        assert!(!fail.holds && !fail.vacuous);
        assert!(systole_condition(&x, 1, &rat(1, 3), &cfg).unwrap().holds);
    }

    #[test]
    fn skeleton_compare_fixtures() {
        let t = build(&[vec![0, 1, 2, 3]]);
        let c = skeleton_compare(&t, 2).unwrap();
        assert_eq!((c.m1, c.m2, c.m.clone()), (1, 1, rat(1, 1)));
        assert_eq!(c.factor, rat(4, 1));
        assert_eq!((c.lower.clone(), c.upper.clone()), (rat(4, 1), rat(4, 1)));
        assert!(c.holds);
        let full = t.reweighted(&WeightKind::NormalizedHomogeneous).unwrap();
        let skel = t.skeleton(2, &WeightKind::NormalizedHomogeneous).unwrap();
        for tri in full.cells(2) {
            assert_eq!(full.weight_of(tri).unwrap(), rat(1, 1));
            assert_eq!(full.weight_of(tri).unwrap(), rat(4, 1) * skel.weight_of(tri).unwrap());
        }

        let glued = build(&[vec![0, 1, 2, 3], vec![0, 1, 2, 4]]);
        let g = skeleton_compare(&glued, 2).unwrap();
        assert_eq!((g.m1, g.m2, g.m.clone()), (1, 2, rat(2, 1)));
        assert!(g.holds);
        assert!(skeleton_compare(&glued, 3).is_err());
        assert!(skeleton_compare(&glued, 0).is_err());
    }

    #[test]
    fn certificate_components() {
        let x = boundary_of_4_simplex();
        let cfg = Config::default();
        let cert = certify_2skeleton(&x, &CertifyOptions::default(), &cfg).unwrap();
        assert_eq!(cert.schema, "hdx-cert/1");
        assert_eq!(cert.n, 3);
        assert!((cert.spectral.lambda - 1.5).abs() < 1e-9);
        assert!(cert.links.holds);
        assert!(cert.ratio.holds);
        let chain = cert.chain.as_ref().unwrap();
        assert_eq!(chain.c[1], rat(1, 8192));
        assert_eq!(cert.satisfied(), cert.overall == "hypotheses-satisfied");
        let again = certify_2skeleton(&x, &CertifyOptions::default(), &cfg).unwrap();
        assert_eq!(cert.to_json(), again.to_json());
    }

    #[test]
    fn certificate_with_override() {
        let x = boundary_of_4_simplex();
        let cfg = Config::default();
        let opts = CertifyOptions { epsilon: Some(rat(1, 6)), m_bound: Some(rat(1, 1)) };
        let cert = certify_2skeleton(&x, &opts, &cfg).unwrap();
        assert_eq!(cert.links.epsilon, Some(rat(1, 6)));
        assert!(cert.links.overridden);
        let json = cert.to_json();
        assert!(json.contains("\"m_bound\": \"1/1\""));
    }

    #[test]
    fn disconnected_vertex_link() {
        let x = build(&[vec![0, 1, 2, 3], vec![0, 4, 5, 6]]);
        let err = certify_2skeleton(&x, &CertifyOptions::default(), &Config::default());
        assert!(matches!(err, Err(HdxError::DisconnectedLink(_))));
    }
}
