//! Command-line front end: argument types, dispatch and the report envelope.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hdx_core::cochain::{norm, Cochain};
use hdx_core::expansion::{expansion_report, Mode};
use hdx_core::generators::{standard_corpus, GeneratorSpec};
use hdx_core::io::complex_to_json;
use hdx_core::isoperimetry::{scan_isoperimetry, ScanOverrides};
use hdx_core::minimality::{eps_local_minimize, is_eps_locally_minimal};
use hdx_core::overlap::{certify_2skeleton, CertifyOptions};
use hdx_core::rational::{fmt_float, fmt_rational};
use hdx_core::spectral::{descent_check, spectral_gap, spectral_profile, WeightedGraph};
use hdx_core::suite::{lemma_suite, SuiteOptions};
use hdx_core::{parse_rational, read_complex, Bits, Config, HdxError, Rational, WeightKind, WeightedComplex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const REPORT_SCHEMA: &str = "hdx-report/1";

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[command(name = "hdx", version, about = "Weighted simplicial complexes as high-dimensional expanders")]
pub struct RunConfig {
    #[command(flatten)]
    pub knobs: Knobs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Knobs {
    /// Largest number of elements an exhaustive enumeration may visit.
    #[arg(long, global = true, default_value_t = 1 << 26)]
    pub cap: u64,
    /// Slack for comparisons involving eigenvalues.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[arg(long, global = true, default_value_t = 0xC0FFEE)]
    pub seed: u64,
    /// Random cochains drawn when a space is too large to enumerate.
    #[arg(long, global = true, default_value_t = 4096)]
    pub samples: usize,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Knobs {
    pub fn config(&self) -> Config {
        Config { cap: self.cap, tolerance: self.tolerance, seed: self.seed, samples: self.samples }
    }
}

/// A complex file or an inline generator spec.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Input {
    /// Complex file: {"top_simplices": [[..]], "weights": ["p/q", ..]}.
    #[arg(required_unless_present = "spec")]
    pub input: Option<PathBuf>,
    /// Generator spec as JSON instead of a file, e.g. '{"kind":"pg-flag","q":2}'.
    #[arg(long, conflicts_with = "input")]
    pub spec: Option<String>,
}

impl Input {
    pub fn load(&self) -> Result<WeightedComplex> {
        match (&self.input, &self.spec) {
            (Some(p), _) => Ok(read_complex(p)?),
            (None, Some(s)) => {
                let spec: GeneratorSpec = serde_json::from_str(s).context("generator spec")?;
                Ok(spec.build()?)
            }
            (None, None) => bail!("no input given"),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Quotient,
    Exhaustive,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    FullSimplex,
    Skeleton,
    HollowSimplex,
    LinialMeshulam,
    PgFlag,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check purity, closure and the weight law.
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// List every cell with its weight.
    Weights {
        #[command(flatten)]
        input: Input,
        /// Use normalized homogeneous weights.
        #[arg(long)]
        normalized: bool,
    },
    /// Link spectral gaps per level and the descent checks.
    Spectral {
        #[command(flatten)]
        input: Input,
    },
    /// Coboundary, cocycle, cofilling and systole constants.
    Expansion {
        #[command(flatten)]
        input: Input,
        /// Dimensions to compute (default: -1 to n-1).
        #[arg(long = "k", allow_negative_numbers = true)]
        ks: Vec<isize>,
        #[arg(long, value_enum, default_value = "quotient")]
        mode: ModeArg,
    },
    /// ε-local minimization of a cochain.
    Minimize {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        k: isize,
        #[arg(long, default_value = "1/10")]
        epsilon: String,
        /// Packed little-endian hex; a seeded random cochain when absent.
        #[arg(long)]
        cochain: Option<String>,
    },
    /// Isoperimetric scan for k = 0, 1 or 2.
    Scan {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        k: isize,
        /// Norm bound constant C.
        #[arg(long = "override-C")]
        override_c: Option<String>,
        #[arg(long = "override-epsilon")]
        override_epsilon: Option<String>,
        /// Target ratio ‖dφ‖/‖φ‖.
        #[arg(long)]
        target: Option<String>,
        /// Vertex-link expansion floor for k = 2.
        #[arg(long = "link-epsilon")]
        link_epsilon: Option<String>,
        /// Fail when the spectral hypotheses do not hold.
        #[arg(long = "enforce-spectral")]
        enforce_spectral: bool,
    },
    /// Overlap hypothesis certificate for the 2-skeleton.
    Certify {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        l: u32,
        /// Vertex-link expansion floor (default: computed).
        #[arg(long)]
        epsilon: Option<String>,
        /// Upper bound on the M-ratio (default: computed).
        #[arg(long = "m-bound")]
        m_bound: Option<String>,
    },
    /// Every identity across a corpus, one line each.
    LemmaSuite {
        /// Complex files (default: the standard corpus).
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = 24)]
        cochains: usize,
        #[arg(long = "minimize-pairs", default_value_t = 16)]
        minimize_pairs: usize,
        #[arg(long = "expansion-cap", default_value_t = 1 << 14)]
        expansion_cap: u64,
        #[arg(long = "scan-cap", default_value_t = 1 << 16)]
        scan_cap: u64,
        /// Fault injection: overwrite one weight numerator as `k,i,numerator`.
        #[arg(long, hide = true)]
        corrupt: Option<String>,
    },
    /// Write a generated complex in the complex file format.
    Gen {
        #[arg(long, value_enum, required_unless_present = "spec")]
        kind: Option<GenKind>,
        /// Vertex count.
        #[arg(long)]
        v: Option<u32>,
        /// Skeleton dimension.
        #[arg(long)]
        d: Option<u32>,
        /// Top dimension for Linial–Meshulam.
        #[arg(long)]
        n: Option<u32>,
        /// Cell probability for Linial–Meshulam.
        #[arg(long)]
        p: Option<String>,
        /// Field order for pg-flag.
        #[arg(long)]
        q: Option<u32>,
        /// Any generator spec as JSON.
        #[arg(long, conflicts_with = "kind")]
        spec: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Weights { .. } => "weights",
            Command::Spectral { .. } => "spectral",
            Command::Expansion { .. } => "expansion",
            Command::Minimize { .. } => "minimize",
            Command::Scan { .. } => "scan",
            Command::Certify { .. } => "certify",
            Command::LemmaSuite { .. } => "lemma-suite",
            Command::Gen { .. } => "gen",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    HypothesisFailure,
}

#[derive(Serialize)]
struct ComplexSummary {
    hash: String,
    dim: usize,
    /// Cell counts from dimension 0 up.
    f_vector: Vec<usize>,
}

#[derive(Serialize)]
struct Report<'a> {
    schema: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    complex: Option<ComplexSummary>,
    status: Status,
    result: Value,
}

/// What a command produced: the document to write and its status.
pub struct Outcome {
    pub document: String,
    pub status: Status,
    /// Lines for stderr.
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => EXIT_OK,
            Status::HypothesisFailure => EXIT_HYPOTHESIS,
        }
    }
}

fn summary(x: &WeightedComplex) -> ComplexSummary {
    ComplexSummary {
        hash: x.hash_hex(),
        dim: x.dim(),
        f_vector: (0..=x.dim() as isize).map(|k| x.num_cells(k)).collect(),
    }
}

fn rational(name: &str, s: &str) -> Result<Rational> {
    parse_rational(s).with_context(|| format!("--{name}"))
}

fn opt_rational(name: &str, s: &Option<String>) -> Result<Option<Rational>> {
    s.as_deref().map(|s| rational(name, s)).transpose()
}

fn envelope(cfg: &RunConfig, x: Option<&WeightedComplex>, status: Status, result: Value) -> String {
    let r = Report {
        schema: REPORT_SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        command: cfg.command.name(),
        config: cfg,
        complex: x.map(summary),
        status,
        result,
    };
    let mut s = serde_json::to_string_pretty(&r).expect("report serializes");
    s.push('\n');
    s
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

/// Runs one command and returns the document it produced.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let c = cfg.knobs.config();
    let done = |x: Option<&WeightedComplex>, status: Status, result: Value| Outcome {
        document: envelope(cfg, x, status, result),
        status,
        notes: Vec::new(),
    };
    Ok(match &cfg.command {
        Command::Validate { input } => {
            let x = input.load()?;
            match x.validate() {
                Ok(()) => done(
                    Some(&x),
                    Status::Ok,
                    json!({
                        "valid": true,
                        "totals": (-1..=x.dim() as isize)
                            .map(|k| Ok(fmt_rational(&x.total_weight(k)?)))
                            .collect::<Result<Vec<_>>>()?,
                    }),
                ),
                Err(v) => bail!("validation failed: {v}"),
            }
        }
        Command::Weights { input, normalized } => {
            let mut x = input.load()?;
            if *normalized {
                x = x.reweighted(&WeightKind::NormalizedHomogeneous)?;
            }
            let levels: Vec<Value> = (-1..=x.dim() as isize)
                .map(|k| {
                    let cells: Vec<Value> = x
                        .cells(k)
                        .iter()
                        .enumerate()
                        .map(|(i, s)| json!({ "simplex": s.vertices(), "weight": fmt_rational(&x.weight(k, i)) }))
                        .collect();
                    json!({ "k": k, "total": fmt_rational(&x.total_weight(k).expect("valid level")), "cells": cells })
                })
                .collect();
            done(Some(&x), Status::Ok, json!({ "normalized": normalized, "levels": levels }))
        }
        Command::Spectral { input } => {
            let x = input.load()?;
            let g = WeightedGraph::one_skeleton(&x)?;
            let gap = match spectral_gap(&g) {
                Ok(l) => Value::String(fmt_float(l)),
                Err(HdxError::Disconnected { .. } | HdxError::SingleVertex) => Value::Null,
                Err(e) => return Err(e.into()),
            };
            match spectral_profile(&x, c.tolerance) {
                Ok(p) => {
                    let d = descent_check(&p);
                    done(
                        Some(&x),
                        Status::Ok,
                        json!({ "one_skeleton_gap": gap, "profile": to_value(&p), "descent": to_value(&d), "descent_holds": d.all() }),
                    )
                }
                Err(e @ (HdxError::Disconnected { .. } | HdxError::DisconnectedLink(_) | HdxError::SingleVertex)) => done(
                    Some(&x),
                    Status::HypothesisFailure,
                    json!({ "one_skeleton_gap": gap, "connected": false, "reason": e.to_string() }),
                ),
                Err(e) => return Err(e.into()),
            }
        }
        Command::Expansion { input, ks, mode } => {
            let x = input.load()?;
            let ks: Vec<isize> = if ks.is_empty() { (-1..x.dim() as isize).collect() } else { ks.clone() };
            let mode = match mode {
                ModeArg::Quotient => Mode::Quotient,
                ModeArg::Exhaustive => Mode::Exhaustive,
            };
            let r = expansion_report(&x, &ks, mode, &c)?;
            done(Some(&x), Status::Ok, to_value(&r))
        }
        Command::Minimize { input, k, epsilon, cochain } => {
            let x = input.load()?;
            let eps = rational("epsilon", epsilon)?;
            if *k < 0 || *k > x.dim() as isize {
                bail!("--k {k} outside 0..={}", x.dim());
            }
            let len = x.num_cells(*k);
            let phi = match cochain {
                Some(h) => {
                    let bytes = hex_decode(h)?;
                    let bits = Bits::from_bytes(len, &bytes)
                        .with_context(|| format!("--cochain does not fit {len} cells"))?;
                    Cochain::new(&x, *k, bits)?
                }
                None => Cochain::random(&x, *k, &mut ChaCha8Rng::seed_from_u64(c.seed))?,
            };
            let tr = eps_local_minimize(&x, &phi, &eps, &c)?;
            let lmin = is_eps_locally_minimal(&x, &tr.output, &eps, &c)?;
            done(
                Some(&x),
                Status::Ok,
                json!({
                    "k": k,
                    "epsilon": fmt_rational(&eps),
                    "input": phi.hex(),
                    "input_norm": fmt_rational(&norm(&x, &phi)?),
                    "output": tr.output.hex(),
                    "output_norm": fmt_rational(&norm(&x, &tr.output)?),
                    "psi": tr.psi.hex(),
                    "psi_norm": fmt_rational(&norm(&x, &tr.psi)?),
                    "steps": to_value(&tr.steps),
                    "output_eps_locally_minimal": lmin,
                }),
            )
        }
        Command::Scan { input, k, override_c, override_epsilon, target, link_epsilon, enforce_spectral } => {
            let x = input.load()?;
            let ov = ScanOverrides {
                epsilon: opt_rational("override-epsilon", override_epsilon)?,
                c: opt_rational("override-C", override_c)?,
                target: opt_rational("target", target)?,
                link_epsilon: opt_rational("link-epsilon", link_epsilon)?,
                enforce_spectral: *enforce_spectral,
            };
            match scan_isoperimetry(&x, *k, &ov, &c) {
                Ok(s) => {
                    let status = if s.pass { Status::Ok } else { Status::HypothesisFailure };
                    done(Some(&x), status, to_value(&s))
                }
                Err(e @ HdxError::HypothesisNotMet(_)) => {
                    done(Some(&x), Status::HypothesisFailure, json!({ "hypothesis_not_met": e.to_string() }))
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Certify { input, l, epsilon, m_bound } => {
            if *l != 2 {
                bail!("--l {l}: only the 2-skeleton certificate is supported");
            }
            let x = input.load()?;
            let opts = CertifyOptions { epsilon: opt_rational("epsilon", epsilon)?, m_bound: opt_rational("m-bound", m_bound)? };
            let cert = certify_2skeleton(&x, &opts, &c)?;
            let status = if cert.satisfied() { Status::Ok } else { Status::HypothesisFailure };
            let mut document = cert.to_json();
            document.push('\n');
            Outcome { document, status, notes: Vec::new() }
        }
        Command::LemmaSuite { inputs, cochains, minimize_pairs, expansion_cap, scan_cap, corrupt } => {
            let mut corpus: Vec<(String, WeightedComplex)> = if inputs.is_empty() {
                standard_corpus()?.into_iter().map(|e| (e.name, e.complex)).collect()
            } else {
                inputs
                    .iter()
                    .map(|p| Ok((p.display().to_string(), read_complex(p)?)))
                    .collect::<Result<_>>()?
            };
            if let Some(spec) = corrupt {
                let parts: Vec<&str> = spec.split(',').collect();
                let [k, i, num] = parts[..] else { bail!("--corrupt expects k,i,numerator") };
                let (k, i, num): (isize, usize, u128) = (k.parse()?, i.parse()?, num.parse()?);
                for (_, x) in corpus.iter_mut() {
                    if i < x.num_cells(k) {
                        *x = x.with_corrupted_weight(k, i, num);
                    }
                }
            }
            let opts = SuiteOptions {
                cochains: *cochains,
                minimize_pairs: *minimize_pairs,
                cheeger_max_vertices: 12,
                expansion_cap: *expansion_cap,
                scan_cap: *scan_cap,
            };
            let r = lemma_suite(&corpus, &opts, &c)?;
            let status = if r.all_pass() { Status::Ok } else { Status::HypothesisFailure };
            let lines = r.lines();
            let mut out = done(None, status, json!({ "lines": lines, "suite": to_value(&r) }));
            out.notes = lines;
            out
        }
        Command::Gen { kind, v, d, n, p, q, spec } => {
            let spec = match (kind, spec) {
                (_, Some(s)) => serde_json::from_str(s).context("--spec")?,
                (Some(kind), None) => gen_spec(*kind, *v, *d, *n, p, *q, c.seed)?,
                (None, None) => bail!("gen needs --kind or --spec"),
            };
            let x = spec.build()?;
            Outcome { document: complex_to_json(&x), status: Status::Ok, notes: Vec::new() }
        }
    })
}

fn need<T>(v: Option<T>, flag: &str, kind: &str) -> Result<T> {
    v.with_context(|| format!("--kind {kind} needs --{flag}"))
}

fn gen_spec(
    kind: GenKind,
    v: Option<u32>,
    d: Option<u32>,
    n: Option<u32>,
    p: &Option<String>,
    q: Option<u32>,
    seed: u64,
) -> Result<GeneratorSpec> {
    Ok(match kind {
        GenKind::FullSimplex => GeneratorSpec::FullSimplex { v: need(v, "v", "full-simplex")? },
        GenKind::Skeleton => GeneratorSpec::Skeleton { v: need(v, "v", "skeleton")?, d: need(d, "d", "skeleton")? },
        GenKind::HollowSimplex => GeneratorSpec::HollowSimplex { v: need(v, "v", "hollow-simplex")? },
        GenKind::LinialMeshulam => GeneratorSpec::LinialMeshulam {
            n: need(n, "n", "linial-meshulam")?,
            v: need(v, "v", "linial-meshulam")?,
            p: rational("p", need(p.as_deref(), "p", "linial-meshulam")?)?,
            seed,
        },
        GenKind::PgFlag => GeneratorSpec::ProjectivePlaneFlag { q: need(q, "q", "pg-flag")? },
    })
}

fn hex_decode(h: &str) -> Result<Vec<u8>> {
    let h = h.trim();
    if h.len() % 2 != 0 || !h.bytes().all(|b| b.is_ascii_hexdigit()) {
        bail!("--cochain is not hex: {h:?}");
    }
    Ok((0..h.len()).step_by(2).map(|i| u8::from_str_radix(&h[i..i + 2], 16).expect("hex digits")).collect())
}

/// Runs `cfg`, writes its output and returns the exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    let result = (|| -> Result<Outcome> {
        if let Some(t) = cfg.knobs.threads {
            rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("--threads")?;
        }
        let out = execute(cfg)?;
        match &cfg.knobs.out {
            Some(p) => std::fs::write(p, &out.document).with_context(|| format!("writing {}", p.display()))?,
            None => std::io::stdout().write_all(out.document.as_bytes())?,
        }
        Ok(out)
    })();
    match result {
        Ok(out) => {
            for line in &out.notes {
                eprintln!("{line}");
            }
            out.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
