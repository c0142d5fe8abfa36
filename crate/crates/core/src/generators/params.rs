//! Parameter tuples for the generator, derived or hand-set.
//!
//! All parameter formulas take logarithms in `log_base` (2 by default).
//! Integer parameters round up; `L` rounds up to a power of two.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The unspecified constants of the asymptotic formulas.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub c1: f64,
    pub c2: f64,
    pub c_beta: f64,
    /// Taylor order `d >= 2`.
    pub d: u32,
    pub log_base: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            c1: 1.0,
            c2: 1.0,
            c_beta: 1.0,
            d: 3,
            log_base: 2.0,
        }
    }
}

/// Where a parameter set came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSource {
    Derived,
    Lab,
}

/// Every field is stored explicitly; loading a JSON document never
/// recomputes anything.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub source: ParamSource,
    pub n: usize,
    pub m: usize,
    pub delta: f64,
    pub eps: f64,
    pub lambda: f64,
    pub tau: f64,
    pub d: u32,
    #[serde(rename = "L")]
    pub buckets: usize,
    pub r_hash: usize,
    pub r_bucket: usize,
    pub k: usize,
    /// `k` before rounding.
    pub k_real: f64,
    pub w: usize,
    pub delta_cnf: f64,
    pub r_cnf: usize,
    pub c1: f64,
    pub c2: f64,
    pub c_beta: f64,
    pub log_base: f64,
    /// `k > n/2`: the seed would exceed `n` bits and the claim is vacuous.
    pub trivial_regime: bool,
}

/// Hand-set integer parameters for desk-scale experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabSettings {
    #[serde(rename = "L")]
    pub buckets: usize,
    pub r_hash: usize,
    pub r_bucket: usize,
    pub r_cnf: usize,
    pub k: usize,
}

fn log_in(base: f64, x: f64) -> f64 {
    x.ln() / base.ln()
}

fn ceil_usize(x: f64, what: &str) -> Result<usize> {
    let c = x.ceil();
    if !c.is_finite() || c < 0.0 || c > (1u64 << 62) as f64 {
        return Err(Error::InvalidParameter(format!("{what} = {x} is out of range")));
    }
    Ok(c as usize)
}

struct RealParts {
    lambda: f64,
    tau: f64,
    l_real: f64,
    k_real: f64,
}

fn real_parts(m: usize, delta: f64, eps: f64, c: &Constants) -> RealParts {
    let lg = |x: f64| log_in(c.log_base, x);
    let m = m as f64;
    let lmd = lg(m / delta);
    let lm = lg(m);
    let tau = delta.powf(1.0 + eps) / lm.powf(2.5 + eps);
    RealParts {
        lambda: delta / (lmd * lm).sqrt(),
        tau,
        l_real: lm.powi(5) / delta.powf(2.0 + eps),
        k_real: c.c2 * lmd * lg(lmd) / (tau * tau),
    }
}

fn delta_cnf(n: usize, m: usize, delta: f64, buckets: usize, lambda: f64, d: u32) -> f64 {
    (delta / buckets as f64) * (lambda / (m as f64 * (n as f64).sqrt())).powi(d as i32 - 1)
}

/// Suggested CNF-fooler independence `w * ceil(log2(w / delta_cnf))`, capped
/// at `n`.
pub fn default_r_cnf(n: usize, w: usize, delta_cnf: f64) -> usize {
    let per = (w as f64 / delta_cnf).log2().ceil().max(1.0);
    if !per.is_finite() {
        return n;
    }
    ((w as f64) * per).min(n as f64) as usize
}

fn check_common(n: usize, m: usize, delta: f64, eps: f64, c: &Constants) -> Result<()> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 2 and m >= 2, got n = {n}, m = {m}"
        )));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, 1/2)")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, 1)")));
    }
    if c.d < 2 || !(c.log_base > 1.0) || !(c.c1 > 0.0) || !(c.c2 > 0.0) || !(c.c_beta > 0.0) {
        return Err(Error::InvalidParameter(
            "constants need d >= 2, base > 1 and positive C's".into(),
        ));
    }
    Ok(())
}

/// Theory-mode parameters.
pub fn derive_params(n: usize, m: usize, delta: f64, eps: f64, c: Constants) -> Result<GeneratorParams> {
    check_common(n, m, delta, eps, &c)?;
    let lg = |x: f64| log_in(c.log_base, x);
    let parts = real_parts(m, delta, eps, &c);
    let l_int = ceil_usize(parts.l_real, "L")?.max(1);
    let buckets = l_int
        .checked_next_power_of_two()
        .ok_or_else(|| Error::InvalidParameter("L overflows".into()))?;
    let mf = m as f64;
    let r_hash = ceil_usize(c.c1 * lg(buckets as f64 * mf / delta), "r_hash")?.max(1);
    let r_bucket = ceil_usize(lg(mf / delta), "r_bucket")?.max(2);
    let k = ceil_usize(parts.k_real, "k")?.max(1);
    let w = k.saturating_mul(2).div_ceil(buckets).max(1);
    let dc = delta_cnf(n, m, delta, buckets, parts.lambda, c.d);
    let p = GeneratorParams {
        source: ParamSource::Derived,
        n,
        m,
        delta,
        eps,
        lambda: parts.lambda,
        tau: parts.tau,
        d: c.d,
        buckets,
        r_hash,
        r_bucket,
        k,
        k_real: parts.k_real,
        w,
        delta_cnf: dc,
        r_cnf: default_r_cnf(n, w, dc),
        c1: c.c1,
        c2: c.c2,
        c_beta: c.c_beta,
        log_base: c.log_base,
        trivial_regime: 2 * k > n,
    };
    p.validate()?;
    Ok(p)
}

impl GeneratorParams {
    /// Lab mode: integer parameters are taken as given, the real-valued
    /// ones (`lambda`, `tau`, `delta_cnf`) still follow the formulas.
    pub fn lab(n: usize, m: usize, delta: f64, eps: f64, s: LabSettings, c: Constants) -> Result<Self> {
        check_common(n, m.max(2), delta, eps, &c)?;
        let parts = real_parts(m.max(2), delta, eps, &c);
        let w = (2 * s.k).div_ceil(s.buckets.max(1)).max(1);
        let p = GeneratorParams {
            source: ParamSource::Lab,
            n,
            m,
            delta,
            eps,
            lambda: parts.lambda,
            tau: parts.tau,
            d: c.d,
            buckets: s.buckets,
            r_hash: s.r_hash,
            r_bucket: s.r_bucket,
            k: s.k,
            k_real: s.k as f64,
            w,
            delta_cnf: delta_cnf(n, m.max(2), delta, s.buckets.max(1), parts.lambda, c.d),
            r_cnf: s.r_cnf,
            c1: c.c1,
            c2: c.c2,
            c_beta: c.c_beta,
            log_base: c.log_base,
            trivial_regime: 2 * s.k > n,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn lab_settings(&self) -> LabSettings {
        LabSettings {
            buckets: self.buckets,
            r_hash: self.r_hash,
            r_bucket: self.r_bucket,
            r_cnf: self.r_cnf,
            k: self.k,
        }
    }

    pub fn constants(&self) -> Constants {
        Constants {
            c1: self.c1,
            c2: self.c2,
            c_beta: self.c_beta,
            d: self.d,
            log_base: self.log_base,
        }
    }

    /// Structural checks needed before building a seed layout.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.buckets == 0 || !self.buckets.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(self.buckets));
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.r_hash == 0 || self.r_bucket == 0 {
            return bad("r_hash and r_bucket must be at least 1".into());
        }
        if self.w == 0 {
            return bad("w must be at least 1".into());
        }
        if self.source == ParamSource::Derived && self.r_bucket < 2 {
            return bad("r_bucket must be at least 2".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: GeneratorParams = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }
}
