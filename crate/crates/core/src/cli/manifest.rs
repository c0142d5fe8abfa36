//! Experiment manifests: parsing, dispatch and report files.

use super::count::{count, lab_preset, CountMode, CountOptions, IpInstance};
use crate::error::{Error, Result};
use crate::generators::{Constants, GeneratorParams, LabSettings};
use crate::lab::suite::{compute_goldens, Golden};
use crate::lab::{
    average_sensitivity, boundary_edge_census, cap_edge_census, discrepancy, lo_boundary_fraction,
    lo_lowerbound_search, soft_to_hard, SeedMode,
};
use crate::polytope::{Polytope, PolytopeDoc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};

pub const MANIFEST_SCHEMA: &str = "polyprg.manifest/1";
pub const SUMMARY_SCHEMA: &str = "polyprg.summary/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema: String,
    /// Output directory, relative to the manifest; `--out` overrides it.
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub experiments: Vec<Experiment>,
}

/// Generator parameters for one experiment. `params` wins over `lab`;
/// with neither, the counting preset for `n` is used.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamChoice {
    #[serde(default)]
    pub params: Option<GeneratorParams>,
    #[serde(default)]
    pub lab: Option<LabSettings>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

fn default_delta() -> f64 {
    0.1
}

fn default_eps() -> f64 {
    0.5
}

fn default_width() -> f64 {
    2.0
}

fn default_cap() -> usize {
    crate::enumerate::DEFAULT_CUBE_CAP
}

fn default_true() -> bool {
    true
}

fn default_mode() -> String {
    "all-seeds".into()
}

impl ParamChoice {
    fn resolve(&self, n: usize, m: usize) -> Result<GeneratorParams> {
        if let Some(p) = &self.params {
            if p.n != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: p.n,
                });
            }
            return Ok(p.clone());
        }
        let settings = match self.lab {
            Some(s) => s,
            None => lab_preset(n)?,
        };
        GeneratorParams::lab(n, m, self.delta, self.eps, settings, Constants::default())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Exact versus generated orthant probability. Asserting compares the
    /// gap with `delta`, which lab parameters do not guarantee.
    Discrepancy {
        id: String,
        instance: PolytopeDoc,
        #[serde(flatten)]
        choice: ParamChoice,
        #[serde(default = "default_mode")]
        mode: String,
        #[serde(default = "default_cap")]
        enum_cap: usize,
        #[serde(default)]
        assert: bool,
    },
    LoBoundary {
        id: String,
        instance: PolytopeDoc,
        #[serde(default = "default_width")]
        width: f64,
        #[serde(default = "default_cap")]
        enum_cap: usize,
        #[serde(default = "default_true")]
        assert: bool,
    },
    LowerBound {
        id: String,
        n: usize,
        m: usize,
        trials: usize,
        rng_seed: u64,
        #[serde(default = "default_cap")]
        enum_cap: usize,
        /// Asserted lower bound on the surface fraction.
        #[serde(default)]
        min_fraction: Option<f64>,
        /// Expected surface count, compared exactly.
        #[serde(default)]
        golden_surface_count: Option<u64>,
    },
    /// Cap census of the facets, or of the interior caps when `width` is set.
    EdgeCensus {
        id: String,
        instance: PolytopeDoc,
        #[serde(default)]
        width: Option<f64>,
        #[serde(default = "default_true")]
        assert: bool,
    },
    AverageSensitivity {
        id: String,
        instance: PolytopeDoc,
        #[serde(default = "default_true")]
        assert: bool,
    },
    SoftToHard {
        id: String,
        instance: PolytopeDoc,
        #[serde(flatten)]
        choice: ParamChoice,
        #[serde(default = "default_true")]
        assert: bool,
    },
    /// Recomputes the regression suite and compares it with a stored file
    /// (path relative to the manifest).
    GoldenSuite { id: String, golden: PathBuf },
    Count {
        id: String,
        instance: IpInstance,
        #[serde(flatten)]
        choice: ParamChoice,
        #[serde(default = "default_mode")]
        mode: String,
        #[serde(default = "default_cap")]
        enum_cap: usize,
        #[serde(default)]
        standardize: bool,
        /// Asserted bound on `|estimated - exact|` as a fraction of `2^n`.
        #[serde(default)]
        max_fraction_error: Option<f64>,
    },
}

impl Experiment {
    pub fn id(&self) -> &str {
        match self {
            Experiment::Discrepancy { id, .. }
            | Experiment::LoBoundary { id, .. }
            | Experiment::LowerBound { id, .. }
            | Experiment::EdgeCensus { id, .. }
            | Experiment::AverageSensitivity { id, .. }
            | Experiment::SoftToHard { id, .. }
            | Experiment::GoldenSuite { id, .. }
            | Experiment::Count { id, .. } => id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Discrepancy { .. } => "discrepancy",
            Experiment::LoBoundary { .. } => "lo_boundary",
            Experiment::LowerBound { .. } => "lower_bound",
            Experiment::EdgeCensus { .. } => "edge_census",
            Experiment::AverageSensitivity { .. } => "average_sensitivity",
            Experiment::SoftToHard { .. } => "soft_to_hard",
            Experiment::GoldenSuite { .. } => "golden_suite",
            Experiment::Count { .. } => "count",
        }
    }
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        let m: Manifest = serde_json::from_str(text)?;
        if m.schema != MANIFEST_SCHEMA {
            return Err(Error::Schema(format!(
                "unsupported schema {:?} (expected {MANIFEST_SCHEMA:?})",
                m.schema
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &m.experiments {
            let id = e.id();
            if id.is_empty() || id.contains(['/', '\\']) || id.starts_with('.') {
                return Err(Error::Schema(format!("experiment id {id:?} is not a plain file stem")));
            }
            if !seen.insert(id.to_string()) {
                return Err(Error::Schema(format!("duplicate experiment id {id:?}")));
            }
        }
        Ok(m)
    }
}

/// One line of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: String,
    pub kind: String,
    /// `None` when nothing was asserted or the check was skipped.
    pub held: Option<bool>,
    pub note: Option<String>,
    pub files: Vec<String>,
    pub runtime_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema: String,
    pub outcomes: Vec<Outcome>,
    pub all_held: bool,
}

/// The report of one experiment: JSON document plus CSV table.
struct Produced {
    json: Value,
    csv: Table,
    held: Option<bool>,
    note: Option<String>,
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn from_records<T: Serialize>(records: &[T]) -> Result<Self> {
        let mut header = Vec::new();
        let mut rows = Vec::new();
        for r in records {
            let flat = flatten(&serde_json::to_value(r)?);
            if header.is_empty() {
                header = flat.iter().map(|(k, _)| k.clone()).collect();
            }
            rows.push(flat.into_iter().map(|(_, v)| v).collect());
        }
        Ok(Table { header, rows })
    }

    /// Long format: one `key,value` row per scalar leaf.
    fn key_value(doc: &Value) -> Self {
        Table {
            header: vec!["key".into(), "value".into()],
            rows: flatten(doc).into_iter().map(|(k, v)| vec![k, v]).collect(),
        }
    }

    fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let io = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

/// Dotted paths to scalar leaves, in document order. Arrays use indices.
fn flatten(v: &Value) -> Vec<(String, String)> {
    fn go(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let join = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(map) => map.iter().for_each(|(k, x)| go(&join(k), x, out)),
            Value::Array(xs) => xs
                .iter()
                .enumerate()
                .for_each(|(i, x)| go(&join(&i.to_string()), x, out)),
            Value::Null => out.push((prefix.into(), String::new())),
            Value::String(s) => out.push((prefix.into(), s.clone())),
            Value::Number(x) => out.push((prefix.into(), render_number(x))),
            Value::Bool(b) => out.push((prefix.into(), b.to_string())),
        }
    }
    let mut out = Vec::new();
    go("", v, &mut out);
    out
}

fn render_number(x: &serde_json::Number) -> String {
    if x.is_f64() {
        super::count::sig17(x.as_f64().unwrap_or(f64::NAN))
    } else {
        x.to_string()
    }
}

fn poly_of(doc: &PolytopeDoc) -> Result<Polytope<f64>> {
    doc.to_polytope()
}

fn seed_mode(s: &str) -> Result<CountMode> {
    s.parse()
}

fn generator_mode(s: &str) -> Result<SeedMode> {
    match seed_mode(s)? {
        CountMode::Seeds(m) => Ok(m),
        CountMode::Exact => Err(Error::InvalidParameter(
            "mode \"exact\" applies to count experiments only".into(),
        )),
    }
}

fn run_one(e: &Experiment, base: &Path) -> Result<Produced> {
    match e {
        Experiment::Discrepancy {
            id,
            instance,
            choice,
            mode,
            enum_cap,
            assert,
        } => {
            let p = poly_of(instance)?;
            let params = choice.resolve(p.n(), p.m())?;
            let r = discrepancy(id, &p, &params, generator_mode(mode)?, *enum_cap)?;
            let rec = r.record();
            Ok(Produced {
                json: serde_json::to_value(&r)?,
                csv: Table::from_records(&[&rec])?,
                held: if *assert { rec.bound_satisfied } else { None },
                note: None,
            })
        }
        Experiment::LoBoundary {
            instance,
            width,
            enum_cap,
            assert,
            ..
        } => {
            let r = lo_boundary_fraction(&poly_of(instance)?, *width, *enum_cap)?;
            let doc = serde_json::to_value(&r)?;
            Ok(Produced {
                csv: Table::key_value(&doc),
                json: doc,
                held: if *assert { r.satisfied } else { None },
                note: r.note.map(|n| format!("bound check skipped: {n}")),
            })
        }
        Experiment::LowerBound {
            n,
            m,
            trials,
            rng_seed,
            enum_cap,
            min_fraction,
            golden_surface_count,
            ..
        } => {
            let r = lo_lowerbound_search(*n, *m, *trials, *rng_seed, *enum_cap)?;
            let mut held = None;
            let mut notes = Vec::new();
            if let Some(t) = min_fraction {
                held = Some(r.fraction >= *t);
                notes.push(format!("fraction {} against minimum {}", r.fraction, t));
            }
            if let Some(g) = golden_surface_count {
                held = Some(held.unwrap_or(true) && r.surface_count == *g);
                notes.push(format!("surface count {} against stored {g}", r.surface_count));
            }
            let doc = serde_json::to_value(&r)?;
            Ok(Produced {
                csv: Table::key_value(&doc),
                json: doc,
                held,
                note: (!notes.is_empty()).then(|| notes.join("; ")),
            })
        }
        Experiment::EdgeCensus {
            instance,
            width,
            assert,
            ..
        } => {
            let p = poly_of(instance)?;
            let r = match width {
                Some(w) => boundary_edge_census(&p, *w)?,
                None => cap_edge_census(&p, None)?,
            };
            Ok(Produced {
                json: serde_json::to_value(&r)?,
                csv: Table::from_records(&r.caps)?,
                held: assert.then(|| r.all_hold()),
                note: None,
            })
        }
        Experiment::AverageSensitivity { instance, assert, .. } => {
            let r = average_sensitivity(&poly_of(instance)?)?;
            let doc = serde_json::to_value(&r)?;
            Ok(Produced {
                csv: Table::key_value(&doc),
                json: doc,
                held: if *assert { r.satisfied } else { None },
                note: r
                    .bound
                    .is_none()
                    .then(|| "bound check skipped: needs m >= 2".to_string()),
            })
        }
        Experiment::SoftToHard {
            instance,
            choice,
            assert,
            ..
        } => {
            let p = poly_of(instance)?;
            let params = choice.resolve(p.n(), p.m())?;
            let r = soft_to_hard(&p, &params)?;
            let doc = serde_json::to_value(&r)?;
            Ok(Produced {
                csv: Table::key_value(&doc),
                json: doc,
                held: assert.then_some(r.holds),
                note: None,
            })
        }
        Experiment::GoldenSuite { golden, .. } => {
            let path = base.join(golden);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let stored: Vec<Golden> = serde_json::from_str(&text)?;
            let fresh = compute_goldens()?;
            let mismatched: Vec<String> = fresh
                .iter()
                .zip(&stored)
                .filter(|(a, b)| a != b)
                .map(|(a, _)| a.id.clone())
                .collect();
            let same = mismatched.is_empty() && fresh.len() == stored.len();
            Ok(Produced {
                json: serde_json::to_value(&fresh)?,
                csv: Table::from_records(&fresh)?,
                held: Some(same),
                note: (!same).then(|| format!("mismatched entries: {mismatched:?}")),
            })
        }
        Experiment::Count {
            instance,
            choice,
            mode,
            enum_cap,
            standardize,
            max_fraction_error,
            ..
        } => {
            let opts = CountOptions {
                delta: choice.delta,
                eps: choice.eps,
                mode: seed_mode(mode)?,
                params: match (&choice.params, choice.lab) {
                    (Some(p), _) => Some(p.clone()),
                    (None, Some(_)) => Some(choice.resolve(instance.n(), instance.m())?),
                    (None, None) => None,
                },
                enum_cap: *enum_cap,
                standardize: *standardize,
            };
            let r = count(instance, &opts)?;
            let held = match (max_fraction_error, r.exact_count) {
                (Some(t), Some(c)) => Some((r.estimated_fraction - c as f64 / (r.n as f64).exp2()).abs() <= *t),
                _ => None,
            };
            let doc = serde_json::to_value(&r)?;
            Ok(Produced {
                csv: Table::key_value(&doc),
                json: doc,
                held,
                note: r.notice.clone(),
            })
        }
    }
}

/// Runs every experiment, writing `<id>.json`, `<id>.csv` and
/// `summary.json` into `out` (default: the manifest's `out`, else the
/// manifest's directory).
pub fn run_manifest(path: &Path, out: Option<&Path>) -> Result<Summary> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let manifest = Manifest::parse(&text).map_err(|e| match e {
        Error::Schema(s) => Error::Schema(format!("{}: {s}", path.display())),
        other => other,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let out_dir = match (out, &manifest.out) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(o)) => base.join(o),
        (None, None) => base.to_path_buf(),
    };
    std::fs::create_dir_all(&out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let mut outcomes = Vec::new();
    for e in &manifest.experiments {
        let start = std::time::Instant::now();
        let produced =
            run_one(e, base).map_err(|err| Error::InvalidParameter(format!("experiment {:?}: {err}", e.id())))?;
        let json_name = format!("{}.json", e.id());
        let csv_name = format!("{}.csv", e.id());
        write_json(&out_dir.join(&json_name), &produced.json)?;
        produced.csv.write(&out_dir.join(&csv_name))?;
        outcomes.push(Outcome {
            id: e.id().to_string(),
            kind: e.kind().to_string(),
            held: produced.held,
            note: produced.note,
            files: vec![json_name, csv_name],
            runtime_secs: start.elapsed().as_secs_f64(),
        });
    }
    let summary = Summary {
        schema: SUMMARY_SCHEMA.into(),
        all_held: outcomes.iter().all(|o| o.held != Some(false)),
        outcomes,
    };
    write_json(&out_dir.join("summary.json"), &serde_json::to_value(&summary)?)?;
    Ok(summary)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiments_parse_with_defaults() {
        let text = r#"{
          "schema": "polyprg.manifest/1",
          "experiments": [
            {"kind": "lo_boundary", "id": "a",
             "instance": {"domain": "pm1", "A": [[1, 1, 1]], "b": [1]}},
            {"kind": "discrepancy", "id": "b", "lab": {"L": 1, "r_hash": 1, "r_bucket": 1, "r_cnf": 0, "k": 1},
             "instance": {"domain": "pm1", "A": [[1, 1, 1]], "b": [1]}}
          ]
        }"#;
        let m = Manifest::parse(text).unwrap();
        match &m.experiments[0] {
            Experiment::LoBoundary { width, assert, .. } => {
                assert_eq!(*width, 2.0);
                assert!(*assert);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(m.experiments[1].kind(), "discrepancy");
    }

    #[test]
    fn schema_violations_carry_positions() {
        let text = "{\n\"schema\": \"polyprg.manifest/1\",\n\"experiments\": [{\"kind\": \"nope\", \"id\": \"x\"}]\n}";
        let e = Manifest::parse(text).unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        let dup = r#"{"schema": "polyprg.manifest/1", "experiments": [
            {"kind": "golden_suite", "id": "x", "golden": "g.json"},
            {"kind": "golden_suite", "id": "x", "golden": "g.json"}]}"#;
        assert!(Manifest::parse(dup).is_err());
        assert!(Manifest::parse(r#"{"schema": "other/1", "experiments": []}"#).is_err());
    }

    #[test]
    fn flatten_orders_leaves() {
        let v: Value = serde_json::from_str(r#"{"a": 1, "b": {"c": [true, null]}, "d": 0.5}"#).unwrap();
        let f = flatten(&v);
        let keys: Vec<&str> = f.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys, ["a", "b.c.0", "b.c.1", "d"]);
        assert_eq!(f[3].1, "5.0000000000000000e-1");
    }
}
