//! The lemma suite: every identity and inequality checked across a corpus,
//! one pass/fail line per identity.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cochain::{differential, localize, norm, Cochain};
use crate::complex::{Simplex, Violation, WeightKind, WeightedComplex};
use crate::config::Config;
use crate::error::{HdxError, Result};
use crate::expansion::{cocycle_expansion, coboundary_expansion, cofilling, Mode};
use crate::isoperimetry::{ledger_k2, scan_isoperimetry, verify_k2_alternative, verify_thin_laplacian, K2Case, ScanOverrides};
use crate::minimality::{eps_local_minimize, is_eps_locally_minimal, is_locally_minimal, is_minimal, thinness};
use crate::overlap::skeleton_compare;
use crate::rational::{binomial, factorial, fmt_rational, from_u128, rat, ExtRational, Rational};
use crate::spectral::{cheeger_mask, descent_check, laplacian_spectrum, spectral_gap, spectral_profile, WeightedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Id {
    Structure,
    SummationLaw,
    ClosedForm,
    LevelTotals,
    HomogeneousLaw,
    LinkOfLink,
    CheegerCut,
    CheegerInside,
    SpectralDescent,
    ScaleInvariance,
    NormBound,
    DdZero,
    Localization,
    VertexLocalization,
    CodimOneLocalization,
    VertexSplit,
    MinusOne,
    CocycleDominates,
    CofillingReciprocal,
    Relabeling,
    MinimizeContract,
    MinimizeSteps,
    MinimalityChain,
    ThinLaplacian,
    K0Isoperimetry,
    K2Dichotomy,
    SkeletonBound,
}

const IDS: [(Id, &str); 27] = [
    (Id::Structure, "purity-closure"),
    (Id::SummationLaw, "summation-law"),
    (Id::ClosedForm, "closed-form"),
    (Id::LevelTotals, "level-totals"),
    (Id::HomogeneousLaw, "homogeneous-weight-law"),
    (Id::LinkOfLink, "link-of-link"),
    (Id::CheegerCut, "cheeger-cut"),
    (Id::CheegerInside, "cheeger-inside"),
    (Id::SpectralDescent, "spectral-descent"),
    (Id::ScaleInvariance, "spectral-scale-invariance"),
    (Id::NormBound, "differential-norm-bound"),
    (Id::DdZero, "dd-zero"),
    (Id::Localization, "localization-norm"),
    (Id::VertexLocalization, "vertex-localization"),
    (Id::CodimOneLocalization, "codim-one-localization"),
    (Id::VertexSplit, "vertex-differential-split"),
    (Id::MinusOne, "expansion-minus-one"),
    (Id::CocycleDominates, "cocycle-dominates-coboundary"),
    (Id::CofillingReciprocal, "cofilling-reciprocal"),
    (Id::Relabeling, "relabel-invariance"),
    (Id::MinimizeContract, "minimize-contract"),
    (Id::MinimizeSteps, "minimize-step-bound"),
    (Id::MinimalityChain, "minimality-chain"),
    (Id::ThinLaplacian, "thin-laplacian"),
    (Id::K0Isoperimetry, "k0-isoperimetry"),
    (Id::K2Dichotomy, "k2-dichotomy"),
    (Id::SkeletonBound, "skeleton-two-sided"),
];

/// Sample sizes and caps for one suite run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOptions {
    /// Random cochains per complex and dimension.
    pub cochains: usize,
    /// `(φ, ε)` pairs per complex for the minimization checks.
    pub minimize_pairs: usize,
    /// Largest 1-skeleton checked against every vertex subset.
    pub cheeger_max_vertices: usize,
    /// Enumeration cap for expansion constants and minimality.
    pub expansion_cap: u64,
    /// Enumeration cap for the `k = 0` scan.
    pub scan_cap: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            cochains: 24,
            minimize_pairs: 16,
            cheeger_max_vertices: 12,
            expansion_cap: 1 << 14,
            scan_cap: 1 << 16,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IdentityResult {
    pub name: &'static str,
    pub checked: u64,
    /// Instances outside the identity's hypotheses or over a cap.
    pub skipped: u64,
    pub failures: u64,
    pub pass: bool,
    /// The first failure in corpus order.
    pub counterexample: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub complexes: Vec<String>,
    pub seed: u64,
    pub options: SuiteOptions,
    pub identities: Vec<IdentityResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.identities.iter().all(|r| r.pass)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityResult> {
        self.identities.iter().find(|r| r.name == name)
    }

    /// One line per identity.
    pub fn lines(&self) -> Vec<String> {
        self.identities
            .iter()
            .map(|r| {
                let mut s = format!(
                    "{} {} checked={} skipped={} failures={}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    r.checked,
                    r.skipped,
                    r.failures
                );
                if let Some(c) = &r.counterexample {
                    s.push_str(&format!(" counterexample={c}"));
                }
                s
            })
            .collect()
    }
}

#[derive(Clone, Debug, Default)]
struct Tally {
    checked: u64,
    skipped: u64,
    failures: u64,
    first: Option<Value>,
}

struct Tallies {
    name: String,
    t: Vec<Tally>,
}

impl Tallies {
    fn new(name: &str) -> Self {
        Tallies { name: name.to_string(), t: vec![Tally::default(); IDS.len()] }
    }

    fn check(&mut self, id: Id, ok: bool, detail: impl FnOnce() -> Value) {
        let t = &mut self.t[id as usize];
        t.checked += 1;
        if !ok {
            t.failures += 1;
            if t.first.is_none() {
                let mut d = detail();
                if let Value::Object(m) = &mut d {
                    m.insert("complex".into(), Value::String(self.name.clone()));
                }
                t.first = Some(d);
            }
        }
    }

    fn skip(&mut self, id: Id) {
        self.t[id as usize].skipped += 1;
    }

    fn skip_all(&mut self, except: &[Id]) {
        for (id, _) in IDS {
            if !except.contains(&id) {
                self.skip(id);
            }
        }
    }
}

fn over_cap(e: &HdxError) -> bool {
    matches!(e, HdxError::CapExceeded { .. })
}

/// Runs every identity on every named complex. Output is independent of
/// thread count.
pub fn lemma_suite(corpus: &[(String, WeightedComplex)], opts: &SuiteOptions, cfg: &Config) -> Result<SuiteReport> {
    let per: Vec<Tallies> = corpus
        .par_iter()
        .map(|(name, x)| check_complex(name, x, opts, cfg))
        .collect::<Result<_>>()?;
    let identities = IDS
        .iter()
        .map(|&(id, name)| {
            let mut r = IdentityResult { name, ..Default::default() };
            for p in &per {
                let t = &p.t[id as usize];
                r.checked += t.checked;
                r.skipped += t.skipped;
                r.failures += t.failures;
                if r.counterexample.is_none() {
                    r.counterexample = t.first.clone();
                }
            }
            r.pass = r.failures == 0;
            r
        })
        .collect();
    Ok(SuiteReport {
        complexes: corpus.iter().map(|(n, _)| n.clone()).collect(),
        seed: cfg.seed,
        options: opts.clone(),
        identities,
    })
}

fn check_complex(name: &str, x: &WeightedComplex, opts: &SuiteOptions, cfg: &Config) -> Result<Tallies> {
    let mut t = Tallies::new(name);
    weight_identities(&mut t, x)?;
    let structural = match x.validate() {
        Err(v @ (Violation::NotClosed(_) | Violation::NotPure(_) | Violation::NonPositive(_))) => {
            Some(v.to_string())
        }
        _ => None,
    };
    t.check(Id::Structure, structural.is_none(), || json!({ "violation": structural }));
    let weights_ok = [Id::Structure, Id::SummationLaw, Id::ClosedForm, Id::LevelTotals]
        .iter()
        .all(|&id| t.t[id as usize].failures == 0);
    if !weights_ok {
        // later checks assume a valid weight function
        t.skip_all(&[Id::Structure, Id::SummationLaw, Id::ClosedForm, Id::LevelTotals]);
        return Ok(t);
    }
    let hom = x.reweighted(&WeightKind::Homogeneous)?;
    t.check(Id::HomogeneousLaw, hom.validate().is_ok(), || {
        json!({ "violation": hom.validate().err().map(|v| v.to_string()) })
    });
    links(&mut t, x)?;
    spectral(&mut t, x, opts, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ x.id());
    f2(&mut t, x, opts, &mut rng)?;
    let ecfg = cfg.clone().with_cap(opts.expansion_cap);
    expansion(&mut t, x, &ecfg)?;
    minimization(&mut t, x, opts, &ecfg, &mut rng)?;
    isoperimetry(&mut t, x, opts, cfg, &mut rng)?;
    for l in 1..x.dim() as isize {
        let c = skeleton_compare(x, l)?;
        t.check(Id::SkeletonBound, c.holds, || {
            json!({ "l": l, "M": fmt_rational(&c.m), "simplex": c.violation.as_ref().map(|s| s.to_string()) })
        });
    }
    Ok(t)
}

/// All proper faces of `s`, including the empty simplex.
fn faces(s: &Simplex) -> Vec<Simplex> {
    let v = s.vertices();
    (0..(1u32 << v.len()) - 1)
        .map(|mask| Simplex::from_sorted((0..v.len()).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).collect()))
        .collect()
}

fn weight_identities(t: &mut Tallies, x: &WeightedComplex) -> Result<()> {
    let n = x.dim() as isize;
    let d = x.denom();
    // top down, so a corrupted cell is reported before the faces it feeds
    for k in (-1..n).rev() {
        let w = x.scaled_weights(k);
        let up = x.scaled_weights(k + 1);
        for (i, &m) in w.iter().enumerate() {
            let sum: u128 = x.cofacet_indices(k, i).iter().map(|&c| up[c]).sum();
            t.check(Id::SummationLaw, sum == m, || {
                json!({
                    "simplex": x.cells(k)[i].to_string(),
                    "weight": fmt_rational(&from_u128(m, d)),
                    "cofacet_sum": fmt_rational(&from_u128(sum, d)),
                })
            });
        }
    }
    // m(τ) = (l−k)!·Σ_{σ ∈ X^(l), σ ⊇ τ} m(σ)
    for l in 0..=n {
        let mut acc: Vec<Vec<u128>> = (-1..l).map(|k| vec![0; x.num_cells(k)]).collect();
        for (i, s) in x.cells(l).iter().enumerate() {
            let m = x.scaled_weights(l)[i];
            for f in faces(s) {
                let k = f.dim();
                let j = x.index_of(&f).ok_or_else(|| HdxError::SimplexNotInComplex(f.clone()))?;
                acc[(k + 1) as usize][j] += m;
            }
        }
        for k in -1..l {
            let f = factorial((l - k) as usize);
            for (i, &m) in x.scaled_weights(k).iter().enumerate() {
                let expect = f * acc[(k + 1) as usize][i];
                t.check(Id::ClosedForm, expect == m, || {
                    json!({
                        "simplex": x.cells(k)[i].to_string(),
                        "l": l,
                        "weight": fmt_rational(&from_u128(m, d)),
                        "expected": fmt_rational(&from_u128(expect, d)),
                    })
                });
            }
        }
    }
    for k in -1..n {
        for l in k + 1..=n {
            let lhs = x.total_scaled(k) * factorial((k + 1) as usize);
            let rhs = x.total_scaled(l) * factorial((l + 1) as usize);
            t.check(Id::LevelTotals, lhs == rhs, || {
                json!({
                    "k": k,
                    "l": l,
                    "total_k": fmt_rational(&from_u128(x.total_scaled(k), d)),
                    "total_l": fmt_rational(&from_u128(x.total_scaled(l), d)),
                })
            });
        }
    }
    Ok(())
}

fn links(t: &mut Tallies, x: &WeightedComplex) -> Result<()> {
    if x.dim() < 2 {
        t.skip(Id::LinkOfLink);
        return Ok(());
    }
    for v in x.cells(0).iter().take(8) {
        let lv = x.link(v)?;
        for u in lv.cells(0) {
            let lhs = lv.link(u)?;
            let rhs = x.link(&v.union(u))?;
            t.check(Id::LinkOfLink, lhs == rhs, || json!({ "tau": v.to_string(), "sigma": u.to_string() }));
        }
    }
    Ok(())
}

fn spectral(t: &mut Tallies, x: &WeightedComplex, opts: &SuiteOptions, cfg: &Config) -> Result<()> {
    let tol = cfg.tolerance;
    let g = WeightedGraph::one_skeleton(x)?;
    let connected = g.components() == 1 && g.num_vertices() > 1;
    if connected && g.num_vertices() <= opts.cheeger_max_vertices {
        let lambda = spectral_gap(&g)?;
        let v = g.num_vertices();
        for mask in 1u32..(1 << v) - 1 {
            let inside: Vec<bool> = (0..v).map(|i| mask >> i & 1 == 1).collect();
            let r = cheeger_mask(&g, lambda, &inside, tol)?;
            let subset = || -> Vec<u32> { (0..v).filter(|&i| inside[i]).map(|i| g.ids()[i]).collect() };
            t.check(Id::CheegerCut, r.ok1, || json!({ "subset": subset(), "cut": fmt_rational(&r.cut), "bound": r.bound1_rhs }));
            t.check(Id::CheegerInside, r.ok2, || {
                json!({ "subset": subset(), "inside": fmt_rational(&r.selfcut), "bound": r.bound2_lhs })
            });
        }
    } else {
        t.skip(Id::CheegerCut);
        t.skip(Id::CheegerInside);
    }
    match spectral_profile(x, tol) {
        Ok(p) => {
            let c = descent_check(&p);
            t.check(Id::SpectralDescent, c.all(), || json!({ "lambdas": p.lambdas, "levels": c.levels }))
        }
        Err(HdxError::Disconnected { .. } | HdxError::DisconnectedLink(_) | HdxError::SingleVertex) => {
            t.skip(Id::SpectralDescent)
        }
        Err(e) => return Err(e),
    }
    let scaled: Vec<Rational> = x.top_weights().iter().map(|w| w * rat(7, 1)).collect();
    let y = x.reweighted(&WeightKind::Custom(scaled))?;
    let a = laplacian_spectrum(&g);
    let b = laplacian_spectrum(&WeightedGraph::one_skeleton(&y)?);
    let ok = a.len() == b.len() && a.iter().zip(&b).all(|(p, q)| (p - q).abs() <= tol);
    t.check(Id::ScaleInvariance, ok, || json!({ "before": a, "after": b }));
    Ok(())
}

fn f2(t: &mut Tallies, x: &WeightedComplex, opts: &SuiteOptions, rng: &mut ChaCha8Rng) -> Result<()> {
    let n = x.dim() as isize;
    for k in 0..=n {
        for _ in 0..opts.cochains {
            let phi = Cochain::random(x, k, rng)?;
            f2_cochain(t, x, &phi)?;
        }
    }
    Ok(())
}

fn f2_cochain(t: &mut Tallies, x: &WeightedComplex, phi: &Cochain) -> Result<()> {
    let n = x.dim() as isize;
    let k = phi.k();
    let pn = norm(x, phi)?;
    let payload = || json!({ "k": k, "phi": phi.hex() });
    // localization at every level j < k, including j = −1
    for j in -1..k {
        let mut sum = Rational::zero();
        for tau in x.cells(j) {
            let (link, local) = localize(x, phi, tau)?;
            sum += norm(&link.complex, &local)?;
        }
        let lhs = pn.clone() * from_u128(binomial((k + 1) as usize, (j + 1) as usize), 1);
        t.check(Id::Localization, lhs == sum, || {
            json!({ "k": k, "j": j, "phi": phi.hex(), "lhs": fmt_rational(&lhs), "sum": fmt_rational(&sum) })
        });
    }
    if k == n {
        return Ok(());
    }
    let dphi = differential(x, phi)?;
    let dn = norm(x, &dphi)?;
    t.check(Id::NormBound, dn <= pn, payload);
    if k + 1 < n {
        let ddphi = differential(x, &dphi)?;
        t.check(Id::DdZero, ddphi.is_zero(), payload);
    }
    if k < 1 {
        return Ok(());
    }
    let kr = rat(k as i64, 1);
    let mut vsum = Rational::zero();
    for v in x.cells(0) {
        let (link, local) = localize(x, phi, v)?;
        let dl = differential(&link.complex, &local)?;
        vsum += norm(&link.complex, &dl)?;
        // dφ(η) = d_vφ_v(η∖v) + φ(η∖v)
        for (i, eta) in x.cells(k + 1).iter().enumerate() {
            if !eta.contains_vertex(v.vertices()[0]) {
                continue;
            }
            let rest = eta.minus(v);
            let li = link.complex.index_of(&rest).expect("link cell");
            let pi = x.index_of(&rest).expect("face");
            let ok = dphi.bits().get(i) == (dl.bits().get(li) ^ phi.bits().get(pi));
            t.check(Id::VertexSplit, ok, || json!({ "k": k, "phi": phi.hex(), "eta": eta.to_string(), "v": v.to_string() }));
        }
    }
    let bound = &kr * &dn + &pn;
    t.check(Id::VertexLocalization, bound >= vsum, || {
        json!({ "k": k, "phi": phi.hex(), "bound": fmt_rational(&bound), "sum": fmt_rational(&vsum) })
    });
    let mut csum = Rational::zero();
    for tau in x.cells(k - 1) {
        let (link, local) = localize(x, phi, tau)?;
        csum += norm(&link.complex, &differential(&link.complex, &local)?)?;
    }
    let rhs = &csum - &kr * &pn;
    t.check(Id::CodimOneLocalization, dn >= rhs, || {
        json!({ "k": k, "phi": phi.hex(), "dphi": fmt_rational(&dn), "rhs": fmt_rational(&rhs) })
    });
    Ok(())
}

fn ext(e: &ExtRational) -> String {
    match e {
        ExtRational::Finite(r) => fmt_rational(r),
        ExtRational::Infinity => "inf".into(),
    }
}

fn expansion(t: &mut Tallies, x: &WeightedComplex, cfg: &Config) -> Result<()> {
    let one = ExtRational::Finite(rat(1, 1));
    let a = coboundary_expansion(x, -1, Mode::Quotient, cfg)?.value;
    let b = cocycle_expansion(x, -1, Mode::Quotient, cfg)?.value;
    let c = cofilling(x, -1, cfg)?.value;
    t.check(Id::MinusOne, a == one && b == one && c == one, || {
        json!({ "eps": ext(&a), "eps_tilde": ext(&b), "mu": ext(&c) })
    });
    let n = x.dim() as isize;
    for k in -1..n {
        let pair = (|| -> Result<_> {
            Ok((
                coboundary_expansion(x, k, Mode::Quotient, cfg)?.value,
                cocycle_expansion(x, k, Mode::Quotient, cfg)?.value,
                cofilling(x, k, cfg)?.value,
            ))
        })();
        let (e, et, mu) = match pair {
            Ok(v) => v,
            Err(e) if over_cap(&e) => {
                t.skip(Id::CocycleDominates);
                t.skip(Id::CofillingReciprocal);
                continue;
            }
            Err(e) => return Err(e),
        };
        t.check(Id::CocycleDominates, et >= e, || json!({ "k": k, "eps": ext(&e), "eps_tilde": ext(&et) }));
        match (&mu, &et) {
            (ExtRational::Finite(m), ExtRational::Finite(r)) => {
                t.check(Id::CofillingReciprocal, m * r == rat(1, 1), || {
                    json!({ "k": k, "mu": ext(&mu), "eps_tilde": ext(&et) })
                })
            }
            _ => t.skip(Id::CofillingReciprocal),
        }
    }
    // reverse the vertex ids and compare ε₀
    let maxid = x.vertex_ids().into_iter().max().unwrap_or(0);
    let tops: Vec<Vec<u32>> = x.tops().iter().map(|s| s.vertices().iter().map(|&v| maxid - v).collect()).collect();
    // the reversal reorders tops, so pass weights keyed by the original order
    let y = WeightedComplex::build(&tops, &WeightKind::Custom(x.top_weights()))?;
    match (coboundary_expansion(x, 0, Mode::Quotient, cfg), coboundary_expansion(&y, 0, Mode::Quotient, cfg)) {
        (Ok(a), Ok(b)) => t.check(Id::Relabeling, a.value == b.value, || {
            json!({ "original": ext(&a.value), "relabeled": ext(&b.value) })
        }),
        (Err(e), _) | (_, Err(e)) if over_cap(&e) => t.skip(Id::Relabeling),
        (Err(e), _) | (_, Err(e)) => return Err(e),
    }
    Ok(())
}

const EPSILONS: [(i64, i64); 4] = [(1, 10), (1, 4), (1, 2), (1, 1)];

fn minimization(
    t: &mut Tallies,
    x: &WeightedComplex,
    opts: &SuiteOptions,
    cfg: &Config,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let n = x.dim() as isize;
    for _ in 0..opts.minimize_pairs {
        let k = rng.random_range(0..=n as i64) as isize;
        let (a, b) = EPSILONS[rng.random_range(0..EPSILONS.len())];
        let eps = rat(a, b);
        let phi = Cochain::random(x, k, rng)?;
        let run = eps_local_minimize(x, &phi, &eps, cfg)
            .and_then(|tr| is_eps_locally_minimal(x, &tr.output, &eps, cfg).map(|l| (tr, l)));
        let (tr, lmin) = match run {
            Ok(r) => r,
            Err(e) if over_cap(&e) => {
                t.skip(Id::MinimizeContract);
                t.skip(Id::MinimizeSteps);
                t.skip(Id::MinimalityChain);
                t.skip(Id::ThinLaplacian);
                continue;
            }
            Err(e) => return Err(e),
        };
        let before = norm(x, &phi)?;
        let after = norm(x, &tr.output)?;
        let psi = norm(x, &tr.psi)?;
        let ineq = before >= &after + &eps * &psi;
        let payload = || json!({ "k": k, "epsilon": fmt_rational(&eps), "phi": phi.hex() });
        t.check(Id::MinimizeContract, lmin && ineq, payload);
        let minw = x.scaled_weights(k - 1).iter().min().copied().unwrap_or(1);
        let used = rat(tr.steps.len() as i64, 1) * &eps * from_u128(minw, x.denom());
        t.check(Id::MinimizeSteps, used <= before, || {
            json!({ "k": k, "epsilon": fmt_rational(&eps), "phi": phi.hex(), "steps": tr.steps.len() })
        });
        for c in [&phi, &tr.output] {
            let chain = (|| -> Result<(bool, bool, bool)> {
                Ok((is_minimal(x, c, cfg)?, is_locally_minimal(x, c, cfg)?, is_eps_locally_minimal(x, c, &eps, cfg)?))
            })();
            match chain {
                Ok((m, l, e)) => t.check(Id::MinimalityChain, (!m || l) && (!l || e), || {
                    json!({ "k": k, "epsilon": fmt_rational(&eps), "phi": c.hex(), "minimal": m, "locally_minimal": l })
                }),
                Err(e) if over_cap(&e) => t.skip(Id::MinimalityChain),
                Err(e) => return Err(e),
            }
        }
        thin_laplacian(t, x, &tr.output, &eps, cfg)?;
    }
    Ok(())
}

fn thin_laplacian(t: &mut Tallies, x: &WeightedComplex, phi: &Cochain, eps: &Rational, cfg: &Config) -> Result<()> {
    let k = phi.k();
    if phi.is_zero() || k >= x.dim() as isize || eps >= &rat(1, 1) {
        t.skip(Id::ThinLaplacian);
        return Ok(());
    }
    for delta in [rat(1, 4), rat(2, 5)] {
        let r = if k == 0 { rat(1, 1) } else { thinness(x, phi, &delta)?.r_star };
        if r.is_zero() {
            t.skip(Id::ThinLaplacian);
            continue;
        }
        match verify_thin_laplacian(x, phi, &delta, &r, eps, cfg) {
            Ok(rec) => t.check(Id::ThinLaplacian, rec.pass, || {
                json!({
                    "k": k,
                    "phi": phi.hex(),
                    "delta": fmt_rational(&delta),
                    "r": fmt_rational(&r),
                    "lhs": fmt_rational(&rec.lhs),
                    "rhs": rec.rhs,
                })
            }),
            Err(HdxError::HypothesisNotMet(_) | HdxError::Disconnected { .. } | HdxError::DisconnectedLink(_)) => {
                t.skip(Id::ThinLaplacian)
            }
            Err(e) if over_cap(&e) => t.skip(Id::ThinLaplacian),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn isoperimetry(
    t: &mut Tallies,
    x: &WeightedComplex,
    opts: &SuiteOptions,
    cfg: &Config,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let g = WeightedGraph::one_skeleton(x)?;
    if g.components() == 1 {
        match scan_isoperimetry(x, 0, &ScanOverrides::default(), &cfg.clone().with_cap(opts.scan_cap)) {
            Ok(s) => t.check(Id::K0Isoperimetry, s.pass, || {
                json!({ "witness": s.first_failure, "worst_ratio": s.worst_ratio.as_ref().map(fmt_rational) })
            }),
            Err(e) if over_cap(&e) => t.skip(Id::K0Isoperimetry),
            Err(e) => return Err(e),
        }
    } else {
        t.skip(Id::K0Isoperimetry);
    }
    if x.dim() < 3 {
        t.skip(Id::K2Dichotomy);
        return Ok(());
    }
    let ledger = ledger_k2(&rat(1, 1))?;
    let mut candidates = vec![Cochain::zero(x, 2)?];
    for _ in 0..opts.cochains {
        candidates.push(Cochain::random(x, 2, rng)?);
    }
    for phi in &candidates {
        match verify_k2_alternative(x, phi, &ledger) {
            Ok(rec) => t.check(Id::K2Dichotomy, rec.case != K2Case::NeitherHolds, || json!({ "phi": phi.hex() })),
            Err(HdxError::HypothesisNotMet(_)) => t.skip(Id::K2Dichotomy),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Every identity's name, in report order.
pub fn identity_names() -> Vec<&'static str> {
    IDS.iter().map(|(_, n)| *n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{full_simplex, hollow_simplex, projective_plane_flag, simplex_skeleton};

    fn small() -> Vec<(String, WeightedComplex)> {
        vec![
            ("tetra".into(), full_simplex(4).unwrap()),
            ("hollow4".into(), hollow_simplex(4).unwrap()),
            ("skel52".into(), simplex_skeleton(5, 2).unwrap()),
            ("fano".into(), projective_plane_flag(2).unwrap()),
            ("full5".into(), full_simplex(5).unwrap()),
        ]
    }

    fn quick() -> SuiteOptions {
        SuiteOptions { cochains: 4, minimize_pairs: 4, ..Default::default() }
    }

    #[test]
    fn small_corpus_passes() {
        let r = lemma_suite(&small(), &quick(), &Config::default()).unwrap();
        assert_eq!(r.identities.len(), IDS.len());
        for line in r.lines() {
            assert!(line.starts_with("PASS"), "{line}");
        }
        assert!(r.get("cheeger-cut").unwrap().checked > 0);
        assert!(r.get("k2-dichotomy").unwrap().checked > 0);
    }

    #[test]
    fn corrupted_weight_is_caught() {
        let x = full_simplex(3).unwrap();
        let bad = x.with_corrupted_weight(0, 1, 5);
        let r = lemma_suite(&[("bad".into(), bad)], &quick(), &Config::default()).unwrap();
        let s = r.get("summation-law").unwrap();
        assert!(!s.pass);
        let c = s.counterexample.as_ref().unwrap();
        assert_eq!(c["simplex"], "{1}");
        assert_eq!(c["complex"], "bad");
        assert!(r.get("purity-closure").unwrap().pass);
    }

    #[test]
    fn deterministic() {
        let a = lemma_suite(&small(), &quick(), &Config::default()).unwrap();
        let b = lemma_suite(&small(), &quick(), &Config::default()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
