//! Approximate counting of `{0,1}` integer program solutions.

use crate::error::{Error, Result};
use crate::generators::{derive_params, seed_length, Constants, GeneratorParams, LabSettings};
use crate::lab::{exact_orthant_prob, generator_orthant_prob, SeedMode, SEED_BUDGET};
use crate::polytope::{standardize, zero_one_transform, Polytope};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const IP_SCHEMA: &str = "polyprg.ip/1";
pub const COUNT_SCHEMA: &str = "polyprg.count/1";

/// `A01 x <= b01` over `x ∈ {0,1}^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IpInstance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub domain: IpDomain,
    #[serde(rename = "A01")]
    pub a01: Vec<Vec<f64>>,
    pub b01: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IpDomain {
    ZeroOne,
}

impl IpInstance {
    pub fn new(a01: Vec<Vec<f64>>, b01: Vec<f64>) -> Result<Self> {
        let ip = IpInstance {
            schema: Some(IP_SCHEMA.into()),
            domain: IpDomain::ZeroOne,
            a01,
            b01,
        };
        ip.validate()?;
        Ok(ip)
    }

    pub fn n(&self) -> usize {
        self.a01.first().map_or(0, Vec::len)
    }

    pub fn m(&self) -> usize {
        self.a01.len()
    }

    /// Dimension and finiteness checks, naming the offending row.
    pub fn validate(&self) -> Result<()> {
        if let Some(s) = &self.schema {
            if s != IP_SCHEMA {
                return Err(Error::Schema(format!(
                    "unsupported schema {s:?} (expected {IP_SCHEMA:?})"
                )));
            }
        }
        if self.a01.is_empty() || self.n() == 0 {
            return Err(Error::Schema("A01 must have at least one nonempty row".into()));
        }
        if self.a01.len() != self.b01.len() {
            return Err(Error::Schema(format!(
                "A01 has {} rows but b01 has {} entries",
                self.a01.len(),
                self.b01.len()
            )));
        }
        for (i, r) in self.a01.iter().enumerate() {
            if r.len() != self.n() {
                return Err(Error::Schema(format!(
                    "A01 row {i} has {} entries, expected {}",
                    r.len(),
                    self.n()
                )));
            }
        }
        if self.a01.iter().flatten().chain(&self.b01).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ip: IpInstance = serde_json::from_str(text)?;
        ip.validate()?;
        Ok(ip)
    }

    /// The same constraints over `{-1,+1}^n`.
    pub fn to_polytope(&self) -> Result<Polytope<f64>> {
        zero_one_transform(&self.a01, &self.b01)
    }

    /// The complement of a single integer constraint: `a·x <= b` becomes
    /// `(-a)·x <= -b - 1`.
    pub fn mirror(&self) -> Result<Self> {
        if self.m() != 1 {
            return Err(Error::InvalidParameter(
                "only single-constraint instances have a mirror".into(),
            ));
        }
        if self.a01[0].iter().chain(&self.b01).any(|x| x.fract() != 0.0) {
            return Err(Error::InvalidParameter("mirroring needs integer data".into()));
        }
        IpInstance::new(vec![self.a01[0].iter().map(|x| -x).collect()], vec![-self.b01[0] - 1.0])
    }
}

/// `exact` counts the cube directly; the others evaluate the generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    Exact,
    Seeds(SeedMode),
}

impl FromStr for CountMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(CountMode::Exact);
        }
        s.parse().map(CountMode::Seeds).map_err(|_| {
            Error::InvalidParameter(format!(
                "unknown mode {s:?} (expected all-seeds, strided:N, exact or factored)"
            ))
        })
    }
}

impl fmt::Display for CountMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountMode::Exact => f.write_str("exact"),
            CountMode::Seeds(m) => m.fmt(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountOptions {
    pub delta: f64,
    pub eps: f64,
    pub mode: CountMode,
    pub params: Option<GeneratorParams>,
    pub enum_cap: usize,
    pub standardize: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            delta: 0.1,
            eps: 0.5,
            mode: CountMode::Seeds(SeedMode::AllSeeds),
            params: None,
            enum_cap: crate::enumerate::DEFAULT_CUBE_CAP,
            standardize: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub schema: String,
    pub n: usize,
    pub m: usize,
    pub estimated_count: f64,
    pub estimated_fraction: f64,
    /// Present iff `n <= enum_cap`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_count: Option<u64>,
    pub mode: String,
    pub seed_bits: Option<usize>,
    pub seeds_used: Option<String>,
    pub delta: f64,
    /// Additive target on the count, `δ · 2^n`.
    pub target_error: f64,
    pub standardized: bool,
    pub params: GeneratorParams,
    pub notice: Option<String>,
}

/// Lab settings that fit the all-seeds budget: one bucket, a constant
/// bucket string and the widest global family with at most 24 seed bits
/// (`s (2 + 2k) <= 24` for `s = ⌈log2 n⌉`).
pub fn lab_preset(n: usize) -> Result<LabSettings> {
    let s = crate::algebra::degree_for(n)? as usize;
    let k = (24 / s).saturating_sub(2) / 2;
    Ok(LabSettings {
        buckets: 1,
        r_hash: 1,
        r_bucket: 1,
        r_cnf: 0,
        k: k.max(1),
    })
}

/// Parameters for `count`: the override if given, else theory mode when it
/// fits the seed budget, else the lab preset with a notice.
pub fn resolve_params(n: usize, m: usize, opts: &CountOptions) -> Result<(GeneratorParams, Option<String>)> {
    if let Some(p) = &opts.params {
        if p.n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: p.n,
            });
        }
        return Ok((p.clone(), None));
    }
    let theory = derive_params(n, m.max(2), opts.delta, opts.eps, Constants::default())?;
    let bits = seed_length(&theory)?.0;
    if bits <= SEED_BUDGET {
        return Ok((theory, None));
    }
    let preset = lab_preset(n)?;
    let lab = GeneratorParams::lab(n, m, opts.delta, opts.eps, preset, Constants::default())?;
    let lab_bits = seed_length(&lab)?.0;
    let notice = format!(
        "NOTICE: theory-mode parameters need {bits} seed bits, over the all-seeds budget of {SEED_BUDGET}. \
         Falling back to LAB-MODE parameters (L={}, r_hash={}, r_bucket={}, r_cnf={}, k={}; {lab_bits} seed bits). \
         Lab-mode estimates carry no theoretical guarantee; pass --params to choose parameters explicitly.",
        preset.buckets, preset.r_hash, preset.r_bucket, preset.r_cnf, preset.k
    );
    Ok((lab, Some(notice)))
}

pub fn count(ip: &IpInstance, opts: &CountOptions) -> Result<CountResult> {
    ip.validate()?;
    let (n, m) = (ip.n(), ip.m());
    let original = ip.to_polytope()?;
    let (params, notice) = resolve_params(n, m, opts)?;
    let poly = if opts.standardize {
        standardize(&original, params.k, params.tau)?.poly
    } else {
        original.clone()
    };
    let (fraction, seed_bits, seeds_used) = match opts.mode {
        CountMode::Exact => (exact_orthant_prob(&poly, opts.enum_cap)?.probability, None, None),
        CountMode::Seeds(mode) => {
            let g = generator_orthant_prob(&poly, &params, mode, opts.enum_cap).map_err(|e| match e {
                Error::SeedBudget { bits, budget } => Error::InvalidParameter(format!(
                    "all-seeds mode needs 2^{bits} seeds, over the budget of 2^{budget}; \
                     rerun with --mode strided:N (for example strided:1000000) or supply smaller --params"
                )),
                other => other,
            })?;
            (
                g.estimate.probability,
                Some(g.seed_bits),
                Some(g.seeds_used.to_string()),
            )
        }
    };
    let exact_count = if n <= opts.enum_cap {
        Some(exact_orthant_prob(&original, opts.enum_cap)?.hits as u64)
    } else {
        None
    };
    let scale = (n as f64).exp2();
    Ok(CountResult {
        schema: COUNT_SCHEMA.into(),
        n,
        m,
        estimated_count: fraction * scale,
        estimated_fraction: fraction,
        exact_count,
        mode: opts.mode.to_string(),
        seed_bits,
        seeds_used,
        delta: opts.delta,
        target_error: opts.delta * scale,
        standardized: opts.standardize,
        params,
        notice,
    })
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

impl CountResult {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s += &format!("n = {}, m = {}, mode = {}\n", self.n, self.m, self.mode);
        s += &format!("estimated fraction = {}\n", sig17(self.estimated_fraction));
        s += &format!("estimated count    = {}\n", sig17(self.estimated_count));
        if let Some(c) = self.exact_count {
            s += &format!("exact count        = {c}\n");
        }
        s += &format!("target additive error on the count = {}\n", sig17(self.target_error));
        if let (Some(b), Some(u)) = (self.seed_bits, &self.seeds_used) {
            s += &format!("seed bits = {b}, seeds used = {u}\n");
        }
        s
    }
}
