//! Isoperimetric inequalities for small locally minimal cochains.
//!
//! The constants come out of the proofs as explicit rationals and are kept in
//! a [`ConstantsLedger`]. The scanners enumerate every cochain inside a
//! hypothesis set of the isoperimetric bound and report the worst ratio `‖dφ‖/‖φ‖` found.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::{differential_bits, localized_bits, norm_scaled, Cochain};
use crate::complex::{Simplex, WeightedComplex};
use crate::config::Config;
use crate::enumerate::{walk_par, Track};
use crate::error::{HdxError, Result};
use crate::expansion::{coboundary_expansion, unit_vectors, Mode};
use crate::gf2::Bits;
use crate::minimality::{eps_locally_minimal_bits, thin_parts};
use crate::rational::{fmt_float, from_u128, rat, to_f64, ExtRational, Frac, Rational};
use crate::spectral::{spectral_gap, WeightedGraph};

const CHUNK: usize = 4096;

/// One named constant with the step of the argument that fixes it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub name: &'static str,
    #[serde(with = "crate::rational::serde_str")]
    pub value: Rational,
    pub source: &'static str,
}

/// Constants of the `k = 1` or `k = 2` isoperimetric inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantsLedger {
    pub k: usize,
    /// Floor `ϵ` on the coboundary expansion of vertex links (`k = 2` only).
    #[serde(with = "crate::rational::serde_opt_str")]
    pub link_epsilon: Option<Rational>,
    #[serde(with = "crate::rational::serde_str")]
    pub delta: Rational,
    /// Local minimality parameter ε.
    #[serde(with = "crate::rational::serde_str")]
    pub epsilon: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub eps1: Rational,
    #[serde(with = "crate::rational::serde_opt_str")]
    pub eps2: Option<Rational>,
    #[serde(with = "crate::rational::serde_str")]
    pub c1_prime: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub theta1_prime: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub c1: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub theta1: Rational,
    #[serde(with = "crate::rational::serde_opt_str")]
    pub c2_prime: Option<Rational>,
    #[serde(with = "crate::rational::serde_opt_str")]
    pub theta2_prime: Option<Rational>,
    #[serde(with = "crate::rational::serde_opt_str")]
    pub c2: Option<Rational>,
    #[serde(with = "crate::rational::serde_opt_str")]
    pub theta2: Option<Rational>,
    pub entries: Vec<LedgerEntry>,
}

impl ConstantsLedger {
    /// Norm bound constant `C_k`.
    pub fn c(&self) -> &Rational {
        if self.k == 2 { self.c2.as_ref().expect("k = 2 ledger") } else { &self.c1 }
    }

    /// Spectral threshold `θ_k`.
    pub fn theta(&self) -> &Rational {
        if self.k == 2 { self.theta2.as_ref().expect("k = 2 ledger") } else { &self.theta1 }
    }

    /// Ratio promised by the bound: `1/4`, or `65ϵ/2000` for `k = 2`.
    pub fn target(&self) -> Rational {
        match &self.link_epsilon {
            Some(e) if self.k == 2 => rat(65, 2000) * e,
            _ => rat(1, 4),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.entries.iter().find(|e| e.name == name).map(|e| &e.value)
    }
}

fn entry(name: &'static str, value: &Rational, source: &'static str) -> LedgerEntry {
    LedgerEntry { name, value: value.clone(), source }
}

fn small_implies_thin(delta: &Rational, eps1: &Rational) -> (Rational, Rational) {
    (delta * delta * eps1, Rational::from_integer(1.into()) - delta * eps1)
}

pub fn ledger_k1() -> ConstantsLedger {
    let delta = rat(1, 16);
    let epsilon = rat(1, 16);
    let eps1 = rat(1, 32);
    let (c1p, t1p) = small_implies_thin(&delta, &eps1);
    let spectral = rat(1, 4) / (rat(1, 2) - rat(7, 32));
    let theta1 = t1p.clone().max(spectral);
    let src_thm = "k=1 inequality: choice of parameters";
    let src_lemma = "small-implies-thin lemma";
    ConstantsLedger {
        k: 1,
        link_epsilon: None,
        entries: vec![
            entry("delta", &delta, src_thm),
            entry("epsilon", &epsilon, src_thm),
            entry("eps1", &eps1, src_thm),
            entry("C1'", &c1p, src_lemma),
            entry("theta1'", &t1p, src_lemma),
            entry("C1", &c1p, "k=1 inequality: C1 = C1'"),
            entry("theta1", &theta1, "k=1 inequality: max(theta1', (1/4)/(1/2 - 7/32))"),
        ],
        delta,
        epsilon,
        eps1,
        eps2: None,
        c1: c1p.clone(),
        c1_prime: c1p,
        theta1_prime: t1p,
        theta1,
        c2_prime: None,
        theta2_prime: None,
        c2: None,
        theta2: None,
    }
}

/// Ledger for the `k = 2` inequality with link expansion floor `ϵ ∈ (0, 1]`.
pub fn ledger_k2(link_epsilon: &Rational) -> Result<ConstantsLedger> {
    let one = rat(1, 1);
    if !link_epsilon.is_positive() || link_epsilon > &one {
        return Err(HdxError::BadEpsilon(format!("link epsilon must lie in (0, 1], got {link_epsilon}")));
    }
    let e = link_epsilon;
    let eps2 = rat(35, 100) * e;
    let delta = e / rat(1000, 1);
    let eps1 = &eps2 / rat(60, 1);
    let (c1p, t1p) = small_implies_thin(&delta, &eps1);
    let t2p = t1p.clone().max(&one - &c1p * &eps2 / rat(60, 1));
    let c2p = &c1p * &c1p * &eps2 / rat(60, 1);
    let epsilon = (&c1p / rat(4, 1)).min(e / rat(1000, 1));
    let ratio = (rat(2, 1) + rat(3, 10) * e) / (rat(2, 1) + rat(61, 2000) * e);
    let theta2 = t2p.clone().max(ratio);
    let alt = "k=2 alternative: choice of constants";
    let main = "k=2 inequality: choice of parameters";
    Ok(ConstantsLedger {
        k: 2,
        link_epsilon: Some(e.clone()),
        entries: vec![
            entry("eps2", &eps2, main),
            entry("delta", &delta, main),
            entry("eps1", &eps1, alt),
            entry("C1'", &c1p, "small-implies-thin lemma at (delta, eps1)"),
            entry("theta1'", &t1p, "small-implies-thin lemma at (delta, eps1)"),
            entry("theta2'", &t2p, alt),
            entry("C2'", &c2p, alt),
            entry("epsilon", &epsilon, main),
            entry("C2", &c2p, "k=2 inequality: C2 = C2'"),
            entry("theta2", &theta2, main),
        ],
        delta,
        epsilon,
        eps1,
        eps2: Some(eps2),
        c1: c1p.clone(),
        theta1: t1p.clone(),
        c1_prime: c1p,
        theta1_prime: t1p,
        c2_prime: Some(c2p.clone()),
        theta2_prime: Some(t2p),
        c2: Some(c2p),
        theta2: Some(theta2),
    })
}

/// `λ_k`: the gap of `X` for `k = 0`, else the least gap over links of
/// `(k−1)`-cells. A disconnected graph has gap 0.
pub(crate) fn level_gap(x: &WeightedComplex, k: isize) -> Result<f64> {
    let gap_or_zero = |g: Result<f64>| match g {
        Err(HdxError::Disconnected { .. }) | Err(HdxError::SingleVertex) => Ok(0.0),
        other => other,
    };
    if k == 0 {
        return gap_or_zero(spectral_gap(&WeightedGraph::one_skeleton(x)?));
    }
    let gaps: Vec<Result<f64>> = (0..x.num_cells(k - 1))
        .into_par_iter()
        .map(|i| {
            let link = x.link_at(k - 1, i)?;
            gap_or_zero(spectral_gap(&WeightedGraph::one_skeleton(&link.complex)?))
        })
        .collect();
    gaps.into_iter().try_fold(f64::INFINITY, |m, g| Ok(m.min(g?)))
}

fn check_unit_interval(name: &str, v: &Rational, upper_closed: bool, upper: Rational) -> Result<()> {
    let ok = v.is_positive() && if upper_closed { v <= &upper } else { v < &upper };
    if ok {
        Ok(())
    } else {
        Err(HdxError::BadArgs(format!("{name} = {v} is out of range")))
    }
}

fn check_k(x: &WeightedComplex, k: isize) -> Result<()> {
    let n = x.dim() as isize;
    if k < 0 || k >= n {
        return Err(HdxError::BadDimension { k, min: 0, max: n - 1 });
    }
    Ok(())
}

/// Both sides of the thin-cochain Laplacian inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThinLaplacianRecord {
    pub k: isize,
    /// `‖dφ‖`.
    #[serde(with = "crate::rational::serde_str")]
    pub lhs: Rational,
    #[serde(with = "crate::rational::serde_float")]
    pub rhs: f64,
    #[serde(with = "crate::rational::serde_float")]
    pub lambda: f64,
    pub pass: bool,
}

/// For `k = 0` and δ-thin φ: `‖dφ‖ ≥ λ₀(1−δ)‖φ‖`. For `k ≥ 1` and φ
/// ε-locally minimal and `(r, δ)`-thin:
/// `‖dφ‖ ≥ (((r+1)/2 − δ − ε/2)·λ_k(k+1) − k)‖φ‖`.
pub fn verify_thin_laplacian(
    x: &WeightedComplex,
    phi: &Cochain,
    delta: &Rational,
    r: &Rational,
    eps: &Rational,
    cfg: &Config,
) -> Result<ThinLaplacianRecord> {
    phi.check(x)?;
    let k = phi.k();
    check_k(x, k)?;
    check_unit_interval("delta", delta, false, rat(1, 2))?;
    check_unit_interval("r", r, true, rat(1, 1))?;
    check_unit_interval("epsilon", eps, false, rat(1, 1))?;
    let bits = phi.bits();
    let norm = norm_scaled(x, k, bits);
    let total = x.total_scaled(k);
    if k == 0 {
        if !Frac::new(delta).le_times(norm, total) {
            return Err(HdxError::HypothesisNotMet(format!("cochain is not {delta}-thin")));
        }
    } else if !phi.is_zero() {
        if !eps_locally_minimal_bits(x, k, bits, &Frac::new(eps), cfg)? {
            return Err(HdxError::HypothesisNotMet(format!("cochain is not {eps}-locally minimal")));
        }
        let (_, carried, den) = thin_parts(x, k, bits, &Frac::new(delta));
        if from_u128(carried, den) < *r {
            return Err(HdxError::HypothesisNotMet(format!("cochain is not ({r}, {delta})-thin")));
        }
    }
    let lambda = level_gap(x, k)?;
    let d = differential_bits(x, k, bits)?;
    let lhs = from_u128(norm_scaled(x, k + 1, &d), x.denom());
    let phi_norm = to_f64(&from_u128(norm, x.denom()));
    let factor = if k == 0 {
        lambda * (1.0 - to_f64(delta))
    } else {
        let kf = k as f64;
        ((to_f64(r) + 1.0) / 2.0 - to_f64(delta) - to_f64(eps) / 2.0) * lambda * (kf + 1.0) - kf
    };
    let rhs = factor * phi_norm;
    let pass = to_f64(&lhs) >= rhs - cfg.tolerance * (1.0 + rhs.abs());
    Ok(ThinLaplacianRecord { k, lhs, rhs, lambda, pass })
}

/// Parameters a scan may take from the user instead of the ledger.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanOverrides {
    #[serde(with = "crate::rational::serde_opt_str")]
    pub epsilon: Option<Rational>,
    /// Norm bound constant `C` in `‖φ‖ ≤ C·m(X^(k))`.
    #[serde(with = "crate::rational::serde_opt_str")]
    pub c: Option<Rational>,
    #[serde(with = "crate::rational::serde_opt_str")]
    pub target: Option<Rational>,
    /// Link expansion floor `ϵ` for `k = 2`; computed when absent.
    #[serde(with = "crate::rational::serde_opt_str")]
    pub link_epsilon: Option<Rational>,
    /// Fail with `HypothesisNotMet` when a spectral hypothesis is false.
    pub enforce_spectral: bool,
}

impl ScanOverrides {
    pub fn is_empty(&self) -> bool {
        self.epsilon.is_none() && self.c.is_none() && self.target.is_none()
    }
}

/// A hypothesis on the complex, evaluated and reported.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub value: String,
    pub threshold: String,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    /// Every cochain of `C^k` was walked.
    Exhaustive,
    /// Every cochain under the norm bound was listed.
    Bounded,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoperimetryScan {
    pub k: isize,
    pub complex: String,
    pub seed: u64,
    pub mode: ScanMode,
    pub ledger: Option<ConstantsLedger>,
    pub overrides: ScanOverrides,
    #[serde(with = "crate::rational::serde_str")]
    pub epsilon: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub c: Rational,
    /// Exact target ratio; absent for `k = 0`, where it involves `λ₀`.
    #[serde(with = "crate::rational::serde_opt_str")]
    pub target: Option<Rational>,
    #[serde(with = "crate::rational::serde_float")]
    pub target_float: f64,
    pub hypotheses: Vec<HypothesisCheck>,
    /// Cochains examined.
    pub scanned: u64,
    /// Nonzero cochains inside the hypothesis set.
    pub in_hypothesis: u64,
    /// Of those, how many fall below the target.
    pub failures: u64,
    #[serde(with = "crate::rational::serde_opt_str")]
    pub worst_ratio: Option<Rational>,
    pub worst_witness: Option<String>,
    pub first_failure: Option<String>,
    pub vacuous: bool,
    pub pass: bool,
}

enum Target {
    Exact(Rational),
    Float(f64, f64),
}

impl Target {
    fn below(&self, dn: u128, n: u128) -> bool {
        match self {
            Target::Exact(t) => BigInt::from(dn) * t.denom() < BigInt::from(n) * t.numer(),
            Target::Float(t, tol) => (dn as f64) / (n as f64) < t - tol * (1.0 + t.abs()),
        }
    }
}

fn cmp_ratio(a: (u128, u128), b: (u128, u128)) -> Ordering {
    match (a.0.checked_mul(b.1), b.0.checked_mul(a.1)) {
        (Some(l), Some(r)) => l.cmp(&r),
        _ => (BigInt::from(a.0) * BigInt::from(b.1)).cmp(&(BigInt::from(b.0) * BigInt::from(a.1))),
    }
}

#[derive(Default)]
struct ScanAcc {
    scanned: u64,
    in_hyp: u64,
    failures: u64,
    worst: Option<(u128, u128, Bits)>,
    first_failure: Option<Bits>,
    err: Option<HdxError>,
}

impl ScanAcc {
    fn offer(&mut self, dn: u128, n: u128, bits: &Bits, fails: bool) {
        self.in_hyp += 1;
        if fails {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(bits.clone());
            }
        }
        let better = match &self.worst {
            None => true,
            Some((wd, wn, wb)) => match cmp_ratio((dn, n), (*wd, *wn)) {
                Ordering::Less => true,
                Ordering::Equal => bits.lex_cmp(wb).is_lt(),
                Ordering::Greater => false,
            },
        };
        if better {
            self.worst = Some((dn, n, bits.clone()));
        }
    }

    fn merge(mut self, other: ScanAcc) -> ScanAcc {
        self.scanned += other.scanned;
        if self.err.is_none() {
            self.err = other.err;
        }
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
        self.failures += other.failures;
        let in_hyp = self.in_hyp + other.in_hyp;
        if let Some((dn, n, b)) = other.worst {
            self.offer(dn, n, &b, false);
        }
        self.in_hyp = in_hyp;
        self
    }
}

struct Checker<'a> {
    x: &'a WeightedComplex,
    k: isize,
    eps: Frac,
    c: Frac,
    total: u128,
    target: Target,
    cfg: &'a Config,
}

impl Checker<'_> {
    /// Classifies one cochain whose norm and coboundary norm are known.
    fn visit(&self, acc: &mut ScanAcc, bits: &Bits, n: u128, dn: u128) {
        acc.scanned += 1;
        if n == 0 || acc.err.is_some() || !self.c.le_times(n, self.total) {
            return;
        }
        match eps_locally_minimal_bits(self.x, self.k, bits, &self.eps, self.cfg) {
            Ok(true) => acc.offer(dn, n, bits, self.target.below(dn, n)),
            Ok(false) => {}
            Err(e) => acc.err = Some(e),
        }
    }

    fn visit_bits(&self, acc: &mut ScanAcc, bits: &Bits) {
        let n = norm_scaled(self.x, self.k, bits);
        match differential_bits(self.x, self.k, bits) {
            Ok(d) => self.visit(acc, bits, n, norm_scaled(self.x, self.k + 1, &d)),
            Err(e) => acc.err = Some(e),
        }
    }

    fn run_chunks(&self, chunk: &[Bits]) -> ScanAcc {
        chunk
            .par_iter()
            .fold(ScanAcc::default, |mut acc, b| {
                self.visit_bits(&mut acc, b);
                acc
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(ScanAcc::default(), ScanAcc::merge)
    }
}

/// Calls `f` on every subset of cells with total weight at most `bound`,
/// in a fixed order. Gives up once more than `limit` subsets were seen.
fn for_each_bounded(weights: &[u128], bound: u128, limit: u64, f: &mut impl FnMut(&Bits)) -> bool {
    fn rec(
        w: &[u128],
        i: usize,
        left: u128,
        cur: &mut Bits,
        seen: &mut u64,
        limit: u64,
        f: &mut impl FnMut(&Bits),
    ) -> bool {
        if i == w.len() {
            *seen += 1;
            if *seen > limit {
                return false;
            }
            f(cur);
            return true;
        }
        if !rec(w, i + 1, left, cur, seen, limit, f) {
            return false;
        }
        if w[i] <= left {
            cur.set(i, true);
            let ok = rec(w, i + 1, left - w[i], cur, seen, limit, f);
            cur.set(i, false);
            return ok;
        }
        true
    }
    let mut cur = Bits::zeros(weights.len());
    let mut seen = 0;
    rec(weights, 0, bound, &mut cur, &mut seen, limit, f)
}

fn floor_times(c: &Rational, m: u128) -> u128 {
    let v = (BigInt::from(m) * c.numer()).div_floor(c.denom());
    v.to_u128().unwrap_or(u128::MAX)
}

fn ext_to_string(e: &ExtRational) -> String {
    match e {
        ExtRational::Finite(r) => crate::rational::fmt_rational(r),
        ExtRational::Infinity => "inf".to_string(),
    }
}

/// `min_v ε₁(X_v)` over vertex links.
pub fn link_expansion_floor(x: &WeightedComplex, cfg: &Config) -> Result<ExtRational> {
    if x.dim() < 2 {
        return Err(HdxError::BadDimension { k: x.dim() as isize, min: 2, max: isize::MAX });
    }
    let vals: Vec<Result<ExtRational>> = (0..x.num_cells(0))
        .into_par_iter()
        .map(|i| Ok(coboundary_expansion(&x.link_at(0, i)?.complex, 1, Mode::Quotient, cfg)?.value))
        .collect();
    let mut floor = ExtRational::Infinity;
    for v in vals {
        let v = v?;
        if v < floor {
            floor = v;
        }
    }
    Ok(floor)
}

fn spectral_hypotheses(x: &WeightedComplex, k: isize, theta: Option<&Rational>) -> Result<Vec<HypothesisCheck>> {
    let mut out = Vec::new();
    let n = x.dim() as isize;
    let levels = if k == 0 { 0..1 } else { 0..k + 1 };
    for l in levels {
        if l >= n {
            out.push(HypothesisCheck {
                name: format!("lambda_{l}"),
                value: "undefined".into(),
                threshold: format!("dimension > {l}"),
                holds: false,
            });
            continue;
        }
        let g = match level_gap(x, l) {
            Ok(g) => g,
            Err(HdxError::SingleVertex) => 0.0,
            Err(e) => return Err(e),
        };
        let (threshold, holds) = match theta {
            Some(t) => (crate::rational::fmt_rational(t), g >= to_f64(t)),
            None => ("0".to_string(), g > 0.0),
        };
        out.push(HypothesisCheck { name: format!("lambda_{l}"), value: fmt_float(g), threshold, holds });
    }
    Ok(out)
}

/// Enumerates the ε-locally minimal `φ ≠ 0` in `C^k` with
/// `‖φ‖ ≤ C·m(X^(k))` and records the least `‖dφ‖/‖φ‖`.
///
/// `k = 0` uses the corollary constant `λ₀(1−ε)/2` with ε defaulting to
/// `1/16`; `k = 1, 2` use the ledgers unless overridden.
pub fn scan_isoperimetry(x: &WeightedComplex, k: isize, ov: &ScanOverrides, cfg: &Config) -> Result<IsoperimetryScan> {
    if !(0..=2).contains(&k) {
        return Err(HdxError::BadK(k));
    }
    check_k(x, k)?;
    let ledger = match k {
        0 => None,
        1 => Some(ledger_k1()),
        _ => {
            let e = match &ov.link_epsilon {
                Some(e) => e.clone(),
                None => match link_expansion_floor(x, cfg)? {
                    ExtRational::Infinity => rat(1, 1),
                    ExtRational::Finite(f) if f.is_zero() => {
                        return Err(HdxError::HypothesisNotMet(
                            "a vertex link has zero 1-coboundary expansion; pass a link epsilon".into(),
                        ))
                    }
                    ExtRational::Finite(f) => f.min(rat(1, 1)),
                },
            };
            Some(ledger_k2(&e)?)
        }
    };
    let eps = ov
        .epsilon
        .clone()
        .or_else(|| ledger.as_ref().map(|l| l.epsilon.clone()))
        .unwrap_or_else(|| rat(1, 16));
    if !eps.is_positive() {
        return Err(HdxError::BadEpsilon(format!("epsilon must be positive, got {eps}")));
    }
    let c = ov.c.clone().or_else(|| ledger.as_ref().map(|l| l.c().clone())).unwrap_or_else(|| rat(1, 1));
    if c.is_negative() {
        return Err(HdxError::BadArgs(format!("C must be nonnegative, got {c}")));
    }

    let mut hypotheses = spectral_hypotheses(x, k, ledger.as_ref().map(|l| l.theta()))?;
    if let Some(l) = ledger.as_ref().filter(|l| l.k == 2) {
        let floor = match &ov.link_epsilon {
            Some(_) => link_expansion_floor(x, cfg)?,
            None => ExtRational::Finite(l.link_epsilon.clone().expect("k = 2")),
        };
        let e = ExtRational::Finite(l.link_epsilon.clone().expect("k = 2"));
        hypotheses.push(HypothesisCheck {
            name: "link_expansion".into(),
            value: ext_to_string(&floor),
            threshold: ext_to_string(&e),
            holds: floor >= e,
        });
    }
    if ov.enforce_spectral {
        if let Some(h) = hypotheses.iter().find(|h| !h.holds) {
            return Err(HdxError::HypothesisNotMet(format!("{} = {} below {}", h.name, h.value, h.threshold)));
        }
    }

    let (target, target_float, target_exact) = match (&ov.target, &ledger) {
        (Some(t), _) => (Target::Exact(t.clone()), to_f64(t), Some(t.clone())),
        (None, Some(l)) => {
            let t = l.target();
            (Target::Exact(t.clone()), to_f64(&t), Some(t))
        }
        (None, None) => {
            let t = level_gap(x, 0)? * (1.0 - to_f64(&eps)) / 2.0;
            (Target::Float(t, cfg.tolerance), t, None)
        }
    };

    let w = x.scaled_weights(k);
    let total = x.total_scaled(k);
    let checker = Checker { x, k, eps: Frac::new(&eps), c: Frac::new(&c), total, target, cfg };
    let len = w.len();
    let (mode, acc) = if cfg.check_cap(len).is_ok() {
        let units = unit_vectors(len, &(0..len).collect::<Vec<_>>());
        let diff = x.differential(k)?;
        let tracks = [
            Track::new(Bits::zeros(len), &units, w),
            Track::new(Bits::zeros(x.num_cells(k + 1)), &diff.images, x.scaled_weights(k + 1)),
        ];
        let acc = walk_par(
            &tracks,
            &[],
            ScanAcc::default,
            |acc, st| checker.visit(acc, &st.bits[0], st.norms[0], st.norms[1]),
            ScanAcc::merge,
        );
        (ScanMode::Exhaustive, acc)
    } else {
        let bound = floor_times(&c, total);
        let mut count = 0u64;
        if for_each_bounded(w, bound, cfg.cap, &mut |_| count += 1) {
            let mut acc = ScanAcc::default();
            let mut buf = Vec::with_capacity(CHUNK);
            for_each_bounded(w, bound, cfg.cap, &mut |b| {
                buf.push(b.clone());
                if buf.len() == CHUNK {
                    acc = std::mem::take(&mut acc).merge(checker.run_chunks(&buf));
                    buf.clear();
                }
            });
            acc = acc.merge(checker.run_chunks(&buf));
            (ScanMode::Bounded, acc)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ x.id());
            let mut order: Vec<usize> = (0..len).collect();
            let samples: Vec<Bits> = (0..cfg.samples)
                .map(|_| {
                    order.shuffle(&mut rng);
                    let mut b = Bits::zeros(len);
                    let mut left = bound;
                    for &i in &order {
                        if w[i] <= left && rng.random_bool(0.5) {
                            b.set(i, true);
                            left -= w[i];
                        }
                    }
                    b
                })
                .collect();
            let acc = samples.chunks(CHUNK).fold(ScanAcc::default(), |a, ch| a.merge(checker.run_chunks(ch)));
            (ScanMode::Sampled, acc)
        }
    };
    if let Some(e) = acc.err {
        return Err(e);
    }
    let hex = |b: &Bits| hex::encode(b.to_bytes());
    Ok(IsoperimetryScan {
        k,
        complex: x.hash_hex(),
        seed: cfg.seed,
        mode,
        ledger,
        overrides: ov.clone(),
        epsilon: eps,
        c,
        target: target_exact,
        target_float,
        hypotheses,
        scanned: acc.scanned,
        in_hypothesis: acc.in_hyp,
        failures: acc.failures,
        worst_ratio: acc.worst.as_ref().map(|(dn, n, _)| from_u128(*dn, *n)),
        worst_witness: acc.worst.as_ref().map(|(_, _, b)| hex(b)),
        first_failure: acc.first_failure.as_ref().map(hex),
        vacuous: acc.in_hyp == 0,
        pass: acc.failures == 0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum K2Case {
    Thin,
    S2,
    NeitherHolds,
}

/// Both branches of the `k = 2` alternative evaluated on one cochain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct K2AlternativeRecord {
    pub case: K2Case,
    /// `S² = {v : ‖φ_v‖ > C₁′·m(X_v^(1))}`.
    pub s2: Vec<Simplex>,
    /// `Σ_{v ∈ S²} ‖φ_v‖`.
    #[serde(with = "crate::rational::serde_str")]
    pub s2_local_norm: Rational,
    /// `Σ_{v ∈ S²} ‖d_v φ_v‖`.
    #[serde(with = "crate::rational::serde_str")]
    pub s2_local_coboundary: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub norm: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub coboundary_norm: Rational,
    /// `Σ_{v∈S²}‖φ_v‖ ≥ (9/20)‖φ‖`.
    pub s2_mass: bool,
    /// `‖dφ‖ ≥ Σ‖d_vφ_v‖ − (11ε₂/9)·Σ‖φ_v‖` over `S²`.
    pub s2_coboundary: bool,
    pub s2_holds: bool,
    /// Share of norm on δ-thin edges; absent for `φ = 0`.
    #[serde(with = "crate::rational::serde_opt_str")]
    pub r_star: Option<Rational>,
    #[serde(with = "crate::rational::serde_str")]
    pub r_required: Rational,
    pub thin_holds: bool,
    pub hypotheses: Vec<HypothesisCheck>,
}

/// Decides which branch of the `k = 2` alternative a cochain falls in.
/// The thin branch is reported first when both hold.
pub fn verify_k2_alternative(
    x: &WeightedComplex,
    phi: &Cochain,
    ledger: &ConstantsLedger,
) -> Result<K2AlternativeRecord> {
    phi.check(x)?;
    if x.dim() <= 2 {
        return Err(HdxError::BadDimension { k: x.dim() as isize, min: 3, max: isize::MAX });
    }
    if phi.k() != 2 {
        return Err(HdxError::BadK(phi.k()));
    }
    let (Some(eps2), Some(c2p), Some(t2p)) = (&ledger.eps2, &ledger.c2_prime, &ledger.theta2_prime) else {
        return Err(HdxError::BadArgs("verify_k2_alternative needs a k = 2 ledger".into()));
    };
    let bits = phi.bits();
    let norm = norm_scaled(x, 2, bits);
    if !Frac::new(c2p).le_times(norm, x.total_scaled(2)) {
        return Err(HdxError::HypothesisNotMet(format!("norm exceeds {c2p}·m(X^(2))")));
    }
    let hypotheses = spectral_hypotheses(x, 2, Some(t2p))?;

    let c1p = Frac::new(&ledger.c1_prime);
    let locals: Vec<Result<Option<(u128, u128)>>> = (0..x.num_cells(0))
        .into_par_iter()
        .map(|i| {
            let link = x.link_at(0, i)?;
            let lx = &link.complex;
            let loc = localized_bits(&link, 2, 0, bits);
            let ln = norm_scaled(lx, 1, &loc);
            let m1 = lx.total_scaled(1);
            if c1p.le_times(ln, m1) {
                return Ok(None);
            }
            let d = differential_bits(lx, 1, &loc)?;
            Ok(Some((ln, norm_scaled(lx, 2, &d))))
        })
        .collect();
    let mut s2 = Vec::new();
    let (mut sum_local, mut sum_dlocal) = (0u128, 0u128);
    for (i, r) in locals.into_iter().enumerate() {
        if let Some((ln, dn)) = r? {
            s2.push(x.cells(0)[i].clone());
            sum_local += ln;
            sum_dlocal += dn;
        }
    }
    let dnorm = norm_scaled(x, 3, &differential_bits(x, 2, bits)?);
    let s2_mass = 20 * sum_local >= 9 * norm;
    let slack = rat(11, 9) * eps2;
    let lhs = Rational::from_integer(BigInt::from(dnorm));
    let rhs = Rational::from_integer(BigInt::from(sum_dlocal)) - &slack * Rational::from_integer(BigInt::from(sum_local));
    let s2_coboundary = lhs >= rhs;
    let s2_holds = s2_mass && s2_coboundary;

    let r_required = rat(1, 3) + eps2 / rat(15, 1);
    let (r_star, thin_holds) = if norm == 0 {
        (None, true)
    } else {
        let (_, carried, den) = thin_parts(x, 2, bits, &Frac::new(&ledger.delta));
        let r = from_u128(carried, den);
        let holds = r >= r_required;
        (Some(r), holds)
    };
    let case = if thin_holds {
        K2Case::Thin
    } else if s2_holds {
        K2Case::S2
    } else {
        K2Case::NeitherHolds
    };
    let d = x.denom();
    Ok(K2AlternativeRecord {
        case,
        s2,
        s2_local_norm: from_u128(sum_local, d),
        s2_local_coboundary: from_u128(sum_dlocal, d),
        norm: from_u128(norm, d),
        coboundary_norm: from_u128(dnorm, d),
        s2_mass,
        s2_coboundary,
        s2_holds,
        r_star,
        r_required,
        thin_holds,
        hypotheses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::WeightKind;

    fn build(tops: &[Vec<u32>]) -> WeightedComplex {
        WeightedComplex::build(tops, &WeightKind::Homogeneous).unwrap()
    }

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn k1_ledger_by_hand() {
        let l = ledger_k1();
        assert_eq!(l.c1, rat(1, 8192));
        assert_eq!(l.c1_prime, rat(1, 16) * rat(1, 16) * rat(1, 32));
        assert_eq!(l.theta1_prime, rat(511, 512));
        assert_eq!(rat(1, 4) / rat(9, 32), rat(8, 9));
        assert_eq!(l.theta1, rat(511, 512));
        assert_eq!(l.get("C1"), Some(&rat(1, 8192)));
        assert_eq!(l.target(), rat(1, 4));
    }

    #[test]
    fn k2_ledger_by_hand() {
        let l = ledger_k2(&rat(1, 6)).unwrap();
        assert_eq!(l.eps2, Some(rat(7, 120)));
        assert_eq!(l.delta, rat(1, 6000));
        assert_eq!(l.eps1, rat(7, 7200));
        let c1p = Rational::new(BigInt::from(7), BigInt::from(36_000_000) * 7200);
        assert_eq!(l.c1_prime, c1p);
        let c2p = &c1p * &c1p * rat(7, 120) / rat(60, 1);
        assert_eq!(l.c2_prime, Some(c2p.clone()));
        assert_eq!(l.c2, Some(c2p));
        assert_eq!(l.epsilon, (&c1p / rat(4, 1)).min(rat(1, 6000)));
        assert_eq!(l.target(), rat(65, 12000));

        let one = ledger_k2(&rat(1, 1)).unwrap();
        assert_eq!(one.eps2, Some(rat(7, 20)));
        assert_eq!(one.delta, rat(1, 1000));
        // (2 + 3ϵ/10)/(2 + 61ϵ/2000) exceeds 1 for every ϵ > 0, so θ₂ does too.
        assert_eq!(one.theta2, Some(rat(4600, 4061)));
        assert_eq!(l.theta2, Some(rat(24600, 24061)));
        for l in [&l, &one] {
            for e in l.entries.iter().filter(|e| e.name != "theta2") {
                assert!(e.value.is_positive() && e.value < rat(1, 1), "{} = {}", e.name, e.value);
            }
            assert!(l.c2_prime.as_ref().unwrap() <= &l.c1_prime);
        }
        assert!(matches!(ledger_k2(&rat(0, 1)), Err(HdxError::BadEpsilon(_))));
        assert!(matches!(ledger_k2(&rat(3, 2)), Err(HdxError::BadEpsilon(_))));
    }

    #[test]
    fn thin_laplacian_triangle_equality() {
        let x = build(&[vec![0, 1, 2]]);
        let cfg = Config::default();
        let phi = Cochain::indicator(&x, 0, &[s(&[0])]).unwrap();
        let rec = verify_thin_laplacian(&x, &phi, &rat(1, 3), &rat(1, 1), &rat(1, 16), &cfg).unwrap();
        assert_eq!(rec.lhs, rat(2, 1));
        assert!((rec.rhs - 2.0).abs() < 1e-9);
        assert!((rec.lambda - 1.5).abs() < 1e-9);
        assert!(rec.pass);

        let thick = Cochain::indicator(&x, 0, &[s(&[0]), s(&[1])]).unwrap();
        let err = verify_thin_laplacian(&x, &thick, &rat(1, 3), &rat(1, 1), &rat(1, 16), &cfg);
        assert!(matches!(err, Err(HdxError::HypothesisNotMet(_))));
        let bad = verify_thin_laplacian(&x, &phi, &rat(1, 2), &rat(1, 1), &rat(1, 16), &cfg);
        assert!(matches!(bad, Err(HdxError::BadArgs(_))));
    }

    #[test]
    fn thin_laplacian_part_two_on_tetrahedron() {
        let x = build(&[vec![0, 1, 2, 3]]);
        let cfg = Config::default();
        let phi = Cochain::indicator(&x, 1, &[s(&[0, 1])]).unwrap();
        let rec = verify_thin_laplacian(&x, &phi, &rat(2, 5), &rat(1, 3), &rat(1, 16), &cfg).unwrap();
        assert!(rec.pass);
        assert_eq!(rec.k, 1);
        let thick = verify_thin_laplacian(&x, &phi, &rat(1, 4), &rat(1, 3), &rat(1, 16), &cfg);
        assert!(matches!(thick, Err(HdxError::HypothesisNotMet(_))));
    }

    #[test]
    fn k0_scan_on_triangle() {
        let x = build(&[vec![0, 1, 2]]);
        let cfg = Config::default();
        let scan = scan_isoperimetry(&x, 0, &ScanOverrides::default(), &cfg).unwrap();
        assert_eq!(scan.mode, ScanMode::Exhaustive);
        assert_eq!(scan.scanned, 8);
        // The three singletons; pairs exceed (1+ε)/2 of the vertex mass.
        assert_eq!(scan.in_hypothesis, 3);
        assert!(scan.pass);
        assert_eq!(scan.worst_ratio, Some(rat(1, 1)));
        assert!((scan.target_float - 1.5 * (15.0 / 16.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn ledger_constants_give_vacuous_scans() {
        let x = build(&[vec![0, 1, 2, 3]]);
        let cfg = Config::default();
        let scan = scan_isoperimetry(&x, 1, &ScanOverrides::default(), &cfg).unwrap();
        assert!(scan.vacuous && scan.pass);
        assert_eq!(scan.in_hypothesis, 0);
        assert_eq!(scan.c, rat(1, 8192));
        // λ₀ = 4/3 and λ₁ = 3/2 both clear 511/512.
        assert!(scan.hypotheses.iter().all(|h| h.holds));

        let y = build(&[vec![0, 1, 2, 3, 4]]);
        let scan2 = scan_isoperimetry(&y, 2, &ScanOverrides::default(), &cfg).unwrap();
        assert!(scan2.vacuous && scan2.pass);
        assert!(scan2.hypotheses.iter().any(|h| h.name == "link_expansion" && h.holds));
    }

    #[test]
    fn overridden_scan_reports_witness() {
        let x = build(&[vec![0, 1, 2, 3]]);
        let cfg = Config::default();
        let ov = ScanOverrides { c: Some(rat(1, 4)), target: Some(rat(1, 4)), ..Default::default() };
        let a = scan_isoperimetry(&x, 1, &ov, &cfg).unwrap();
        assert!(a.in_hypothesis > 0);
        assert!(a.worst_witness.is_some());
        assert!(a.pass, "worst ratio {:?}", a.worst_ratio);
        let b = scan_isoperimetry(&x, 1, &ov, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bounded_and_sampled_modes() {
        let x = build(&[vec![0, 1, 2, 3]]);
        let ov = ScanOverrides { c: Some(rat(1, 4)), target: Some(rat(1, 4)), ..Default::default() };
        let full = scan_isoperimetry(&x, 1, &ov, &Config::default()).unwrap();
        let bounded = scan_isoperimetry(&x, 1, &ov, &Config::default().with_cap(32)).unwrap();
        assert_eq!(bounded.mode, ScanMode::Bounded);
        assert_eq!(bounded.in_hypothesis, full.in_hypothesis);
        assert_eq!(bounded.worst_ratio, full.worst_ratio);
        assert_eq!(bounded.worst_witness, full.worst_witness);
        let sampled = scan_isoperimetry(&x, 1, &ov, &Config::default().with_cap(4)).unwrap();
        assert_eq!(sampled.mode, ScanMode::Sampled);
        assert_eq!(sampled.scanned, Config::default().samples as u64);
    }

    #[test]
    fn scan_rejects_bad_k() {
        let x = build(&[vec![0, 1, 2, 3]]);
        let cfg = Config::default();
        assert!(matches!(scan_isoperimetry(&x, 3, &ScanOverrides::default(), &cfg), Err(HdxError::BadK(3))));
        let y = build(&[vec![0, 1, 2]]);
        assert!(matches!(
            scan_isoperimetry(&y, 2, &ScanOverrides::default(), &cfg),
            Err(HdxError::BadDimension { .. })
        ));
    }

    #[test]
    fn k2_alternative_zero_is_thin() {
        let x = build(&[vec![0, 1, 2, 3]]);
        let l = ledger_k2(&rat(1, 2)).unwrap();
        let rec = verify_k2_alternative(&x, &Cochain::zero(&x, 2).unwrap(), &l).unwrap();
        assert_eq!(rec.case, K2Case::Thin);
        assert_eq!(rec.r_star, None);
        let big = Cochain::indicator(&x, 2, &[s(&[0, 1, 2])]).unwrap();
        assert!(matches!(verify_k2_alternative(&x, &big, &l), Err(HdxError::HypothesisNotMet(_))));
    }

    #[test]
    fn k2_alternative_heavy_vertex() {
        let x = build(&[vec![0, 1, 2, 3, 4]]);
        let mut l = ledger_k2(&rat(1, 2)).unwrap();
        l.c2_prime = Some(rat(1, 1));
        l.c1_prime = rat(1, 2);
        let star: Vec<Simplex> = x.cells(2).iter().filter(|t| t.contains_vertex(0)).cloned().collect();
        let phi = Cochain::indicator(&x, 2, &star).unwrap();
        let rec = verify_k2_alternative(&x, &phi, &l).unwrap();
        assert_eq!(rec.s2, vec![s(&[0])]);
        assert_eq!(rec.s2_local_norm, rec.norm);
        assert_eq!(rec.s2_local_coboundary, rec.coboundary_norm);
        assert_eq!(rec.r_star, Some(rat(0, 1)));
        assert_eq!(rec.case, K2Case::S2);
    }
}
