//! Persistence, canonical serialization, ingestion, and report emission.
//!
//! Canonical JSON means: sorted object keys (the default serde_json map is
//! ordered), shortest round-trip float formatting, complex numbers as
//! [re, im] pairs, primes as decimal string keys, LF line endings, trailing
//! newline. Identical inputs therefore serialize to identical bytes, which
//! is what the manifest hash and the reproducibility checks rely on.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::familysim::MomentReport;
use crate::forms::{FormError, FormRecord, LanglandsParameter, SpectralParameter};
use crate::smoothing::{SmoothingError, Zero, ZeroSet};

pub const SCHEMA_VERSION: u64 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0}, expected {SCHEMA_VERSION}")]
    SchemaVersion(u64),
    #[error("record '{label}': {message}")]
    Record { label: String, message: String },
    #[error("malformed zero CSV at line {line}: {message}")]
    ZeroCsv { line: usize, message: String },
    #[error("no data source: set ARGSTAT_LMFDB_URL or pass a fixture path")]
    NoSource,
    #[error("fetch failed after retries: {0}")]
    Fetch(String),
}

fn record_err(label: &str, e: impl std::fmt::Display) -> IoError {
    IoError::Record {
        label: label.to_string(),
        message: e.to_string(),
    }
}

/// Canonical JSON bytes of any serializable value.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String, IoError> {
    // round-tripping through Value sorts object keys
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// Hex SHA-256 of the canonical serialization.
pub fn config_hash<T: Serialize>(value: &T) -> Result<String, IoError> {
    let bytes = canonical_json(value)?;
    let mut hasher = Sha256::new();
    hasher.update(bytes.as_bytes());
    Ok(format!("{:x}", hasher.finalize()))
}

type ComplexRepr = [f64; 2];

fn to_repr(z: Complex64) -> ComplexRepr {
    [z.re, z.im]
}

fn from_repr(r: ComplexRepr) -> Complex64 {
    Complex64::new(r[0], r[1])
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ZeroSetJson {
    pub complete_in_box: Option<[f64; 2]>,
    /// (beta, gamma) rows.
    pub zeros: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FormJson {
    pub label: String,
    /// The three Langlands components as [re, im].
    pub mu: [ComplexRepr; 3],
    /// Prime (decimal string) to the [A(1,p), A(p,1)] pair.
    pub coefficients: BTreeMap<String, [ComplexRepr; 2]>,
    pub zeros: Option<ZeroSetJson>,
    pub normalization: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FormFileJson {
    pub schema_version: u64,
    pub forms: Vec<FormJson>,
}

fn zero_set_to_json(z: &ZeroSet) -> ZeroSetJson {
    ZeroSetJson {
        complete_in_box: z.complete_in_box.map(|(b, h)| [b, h]),
        zeros: z.zeros().iter().map(|z| [z.beta, z.gamma]).collect(),
    }
}

fn zero_set_from_json(j: &ZeroSetJson) -> Result<ZeroSet, SmoothingError> {
    let set = ZeroSet::new(
        j.zeros
            .iter()
            .map(|&[beta, gamma]| Zero { beta, gamma })
            .collect(),
    )?;
    match j.complete_in_box {
        Some([b, h]) => set.with_box(b, h),
        None => Ok(set),
    }
}

pub fn form_to_json(f: &FormRecord) -> FormJson {
    FormJson {
        label: f.label.clone(),
        mu: f.mu.components().map(to_repr),
        coefficients: f
            .coefficients
            .iter()
            .map(|(&p, &(a, b))| (p.to_string(), [to_repr(a), to_repr(b)]))
            .collect(),
        zeros: f.zeros.as_ref().map(zero_set_to_json),
        normalization: f.normalization,
    }
}

pub fn form_from_json(j: &FormJson) -> Result<FormRecord, IoError> {
    let [m1, m2, m3] = j.mu;
    let mu = LanglandsParameter::new(from_repr(m1), from_repr(m2), from_repr(m3))
        .map_err(|e| record_err(&j.label, format!("mu: {e}")))?;
    let mut coefficients = BTreeMap::new();
    for (key, &[a, b]) in &j.coefficients {
        let p: u64 = key
            .parse()
            .map_err(|_| record_err(&j.label, format!("coefficient key '{key}' is not a prime")))?;
        coefficients.insert(p, (from_repr(a), from_repr(b)));
    }
    let mut record = FormRecord::new(j.label.clone(), mu, coefficients)
        .map_err(|e| record_err(&j.label, e))?
        .with_normalization(j.normalization)
        .map_err(|e| record_err(&j.label, format!("normalization: {e}")))?;
    if let Some(zj) = &j.zeros {
        record = record.with_zeros(
            zero_set_from_json(zj).map_err(|e| record_err(&j.label, format!("zeros: {e}")))?,
        );
    }
    Ok(record)
}

pub fn serialize_form_file(forms: &[FormRecord]) -> Result<String, IoError> {
    canonical_json(&FormFileJson {
        schema_version: SCHEMA_VERSION,
        forms: forms.iter().map(form_to_json).collect(),
    })
}

pub struct ParseOutcome {
    pub forms: Vec<FormRecord>,
    /// Per-record failures, populated only in lenient mode.
    pub errors: Vec<String>,
}

pub fn parse_form_file(path: &Path, lenient: bool) -> Result<ParseOutcome, IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: FormFileJson = serde_json::from_str(&text)?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(IoError::SchemaVersion(file.schema_version));
    }
    let mut forms = Vec::new();
    let mut errors = Vec::new();
    for j in &file.forms {
        match form_from_json(j) {
            Ok(f) => forms.push(f),
            Err(e) if lenient => errors.push(e.to_string()),
            Err(e) => return Err(e),
        }
    }
    Ok(ParseOutcome { forms, errors })
}

/// CSV with a completeness comment line when certified.
pub fn zero_set_to_csv(z: &ZeroSet) -> String {
    let mut out = String::new();
    if let Some((b, h)) = z.complete_in_box {
        out.push_str(&format!("# complete_in_box {b} {h}\n"));
    }
    out.push_str("beta,gamma\n");
    for zero in z.zeros() {
        out.push_str(&format!("{},{}\n", zero.beta, zero.gamma));
    }
    out
}

pub fn zero_set_from_csv(text: &str) -> Result<ZeroSet, IoError> {
    let mut complete: Option<(f64, f64)> = None;
    let mut zeros = Vec::new();
    let mut saw_header = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() == 3 && parts[0] == "complete_in_box" {
                let b = parts[1].parse().map_err(|_| IoError::ZeroCsv {
                    line: i + 1,
                    message: "bad box bound".into(),
                })?;
                let h = parts[2].parse().map_err(|_| IoError::ZeroCsv {
                    line: i + 1,
                    message: "bad box height".into(),
                })?;
                complete = Some((b, h));
            }
            continue;
        }
        if !saw_header {
            if line != "beta,gamma" {
                return Err(IoError::ZeroCsv {
                    line: i + 1,
                    message: format!("expected header 'beta,gamma', got '{line}'"),
                });
            }
            saw_header = true;
            continue;
        }
        let mut cols = line.split(',');
        let parse = |s: Option<&str>| -> Result<f64, IoError> {
            s.and_then(|v| v.trim().parse().ok())
                .ok_or(IoError::ZeroCsv {
                    line: i + 1,
                    message: "expected two numeric columns".into(),
                })
        };
        let beta = parse(cols.next())?;
        let gamma = parse(cols.next())?;
        zeros.push(Zero { beta, gamma });
    }
    let set = ZeroSet::new(zeros).map_err(|e| IoError::ZeroCsv {
        line: 0,
        message: e.to_string(),
    })?;
    match complete {
        Some((b, h)) => set.with_box(b, h).map_err(|e| IoError::ZeroCsv {
            line: 0,
            message: e.to_string(),
        }),
        None => Ok(set),
    }
}

/// Provenance record written next to every artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub artifacts: Vec<String>,
    pub tool_version: String,
}

impl RunManifest {
    pub fn start<T: Serialize>(command: &str, config: &T, seed: Option<u64>) -> Result<Self, IoError> {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap()
            .as_secs();
        Ok(Self {
            command: command.to_string(),
            config_hash: config_hash(config)?,
            seed,
            started_unix: now,
            finished_unix: now,
            artifacts: Vec::new(),
            tool_version: TOOL_VERSION.to_string(),
        })
    }

    pub fn finish(&mut self, artifacts: Vec<PathBuf>) {
        self.finished_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap()
            .as_secs();
        self.artifacts = artifacts
            .into_iter()
            .map(|p| p.display().to_string())
            .collect();
    }

    /// Writes `<first artifact dir>/manifest.json`.
    pub fn write_next_to(&self, artifact: &Path) -> Result<PathBuf, IoError> {
        let dir = artifact.parent().unwrap_or(Path::new("."));
        let path = dir.join("manifest.json");
        std::fs::write(&path, canonical_json(self)?)?;
        Ok(path)
    }
}

/// CSV view of a moment report: one row per order.
pub fn moment_report_csv(report: &MomentReport) -> String {
    let mut out = String::from("order,empirical,target,stderr\n");
    for (i, ((m, t), s)) in report
        .moments
        .iter()
        .zip(&report.targets)
        .zip(&report.stderrs)
        .enumerate()
    {
        out.push_str(&format!("{},{},{},{}\n", i + 1, m, t, s));
    }
    out
}

fn svg_header(width: u32, height: u32, caption: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n<text x=\"10\" y=\"16\" font-size=\"12\">{}</text>\n",
        xml_escape(caption)
    )
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Empirical CDF of the normalized samples overlaid on the limit-law CDF,
/// as two polylines.
pub fn cdf_overlay_svg(samples: &[f64], reciprocal_sum: f64, caption: &str) -> String {
    let (w, h) = (640u32, 400u32);
    let scale = reciprocal_sum.sqrt();
    let mut xs: Vec<f64> = samples.iter().map(|m| m / scale).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = -1.5;
    let hi = 1.5;
    let to_px = |x: f64, y: f64| {
        (
            20.0 + (x - lo) / (hi - lo) * (w as f64 - 40.0),
            (h as f64 - 20.0) - y * (h as f64 - 60.0),
        )
    };
    let mut empirical = String::new();
    let n = xs.len() as f64;
    for (i, x) in xs.iter().enumerate() {
        let (px, py) = to_px(x.clamp(lo, hi), (i + 1) as f64 / n);
        empirical.push_str(&format!("{px:.2},{py:.2} "));
    }
    let mut limit = String::new();
    for i in 0..=200 {
        let x = lo + (hi - lo) * i as f64 / 200.0;
        let (px, py) = to_px(x, crate::familysim::gaussian_cdf(x));
        limit.push_str(&format!("{px:.2},{py:.2} "));
    }
    let mut out = svg_header(w, h, caption);
    out.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        empirical.trim_end()
    ));
    out.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        limit.trim_end()
    ));
    out.push_str("</svg>\n");
    out
}

/// Empirical moments against targets as paired bars.
pub fn moment_bars_svg(report: &MomentReport, caption: &str) -> String {
    let (w, h) = (640u32, 400u32);
    let max_val = report
        .moments
        .iter()
        .chain(&report.targets)
        .fold(1e-12f64, |m, v| m.max(v.abs()));
    let mut out = svg_header(w, h, caption);
    let orders = report.moments.len();
    let band = (w as f64 - 40.0) / orders as f64;
    for (i, (m, t)) in report.moments.iter().zip(&report.targets).enumerate() {
        let x0 = 20.0 + i as f64 * band;
        let scale = (h as f64 - 60.0) / max_val;
        for (j, (v, color)) in [(m, "steelblue"), (t, "crimson")].iter().enumerate() {
            let bh = v.abs() * scale;
            out.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>\n",
                x0 + j as f64 * band * 0.4,
                (h as f64 - 20.0) - bh,
                band * 0.35,
                bh,
                color
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Raw ingestion record shape shared by the fixture file and the HTTP
/// endpoint: spectral coordinates as two complex nu components plus
/// per-prime eigenvalue lists (one entry means the dual value is missing).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawIngestRecord {
    pub label: String,
    pub nu: [ComplexRepr; 2],
    pub ap: BTreeMap<String, Vec<ComplexRepr>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawIngestFile {
    pub data: Vec<RawIngestRecord>,
}

pub struct IngestOutcome {
    pub forms: Vec<FormRecord>,
    /// (label, reason) of quarantined records.
    pub rejects: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

const KIM_SARNAK_INGEST_TOL: f64 = 1e-6;

fn map_record(
    raw: &RawIngestRecord,
    warnings: &mut Vec<String>,
) -> Result<FormRecord, IoError> {
    let n1 = from_repr(raw.nu[0]);
    let n2 = from_repr(raw.nu[1]);
    let nu = SpectralParameter::new(n1, n2, -n1 - n2)
        .map_err(|e| record_err(&raw.label, format!("nu: {e}")))?;
    let mu = crate::forms::nu_to_mu(&nu).map_err(|e: FormError| record_err(&raw.label, e))?;
    for m in mu.components() {
        if m.re.abs() > 5.0 / 14.0 + KIM_SARNAK_INGEST_TOL {
            return Err(record_err(
                &raw.label,
                format!("mu violates the unramified bound: Re = {}", m.re),
            ));
        }
    }
    let mut coefficients = BTreeMap::new();
    for (key, values) in &raw.ap {
        let p: u64 = match key.parse() {
            Ok(p) => p,
            Err(_) => {
                warnings.push(format!("{}: bad prime key '{key}' dropped", raw.label));
                continue;
            }
        };
        match values.as_slice() {
            [a, b] => {
                coefficients.insert(p, (from_repr(*a), from_repr(*b)));
            }
            _ => {
                warnings.push(format!(
                    "{}: coefficient at p = {p} dropped (dual value missing)",
                    raw.label
                ));
            }
        }
    }
    FormRecord::new(raw.label.clone(), mu, coefficients).map_err(|e| record_err(&raw.label, e))
}

pub fn ingest_records(raw: &RawIngestFile, limit: usize) -> IngestOutcome {
    let mut forms = Vec::new();
    let mut rejects = Vec::new();
    let mut warnings = Vec::new();
    for record in raw.data.iter().take(limit) {
        match map_record(record, &mut warnings) {
            Ok(f) => forms.push(f),
            Err(e) => rejects.push((record.label.clone(), e.to_string())),
        }
    }
    forms.sort_by(|a, b| a.label.cmp(&b.label));
    IngestOutcome {
        forms,
        rejects,
        warnings,
    }
}

fn fetch_with_retries(url: &str) -> Result<String, IoError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(30))
        .build()
        .map_err(|e| IoError::Fetch(e.to_string()))?;
    let mut last = String::new();
    for attempt in 0..3u32 {
        if attempt > 0 {
            std::thread::sleep(Duration::from_millis(500 * (1 << attempt)));
        }
        match client.get(url).send().and_then(|r| r.error_for_status()) {
            Ok(resp) => match resp.text() {
                Ok(t) => return Ok(t),
                Err(e) => last = e.to_string(),
            },
            Err(e) => last = e.to_string(),
        }
    }
    Err(IoError::Fetch(last))
}

/// Ingest degree-3 records from the configured endpoint, or from a local
/// fixture when one is given (no network in fixture mode).
pub fn ingest_lmfdb(
    base_url: Option<&str>,
    limit: usize,
    fixture: Option<&Path>,
) -> Result<IngestOutcome, IoError> {
    let text = match (fixture, base_url) {
        (Some(path), _) => std::fs::read_to_string(path)?,
        (None, Some(url)) => {
            let full = format!("{}?degree=3&limit={}", url.trim_end_matches('/'), limit);
            fetch_with_retries(&full)?
        }
        (None, None) => return Err(IoError::NoSource),
    };
    let raw: RawIngestFile = serde_json::from_str(&text)?;
    Ok(ingest_records(&raw, limit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::LanglandsParameter;

    fn sample_form(prime_count: usize) -> FormRecord {
        let mu = LanglandsParameter::tempered(1.0, 2.5, -3.5).unwrap();
        let mut coeffs = BTreeMap::new();
        let primes = crate::primes::primes_up_to(1000).unwrap();
        for &p in primes.iter().take(prime_count) {
            let z = Complex64::new((p as f64).cos(), (p as f64).sin() * 0.5);
            coeffs.insert(p, (z, z.conj()));
        }
        FormRecord::new(format!("test-{prime_count}"), mu, coeffs).unwrap()
    }

    #[test]
    fn form_file_round_trip_byte_identical() {
        let zeros = ZeroSet::new(vec![
            Zero {
                beta: 0.1,
                gamma: 3.0,
            },
            Zero {
                beta: -0.2,
                gamma: -1.0,
            },
        ])
        .unwrap()
        .with_box(0.3, 50.0)
        .unwrap();
        let forms = vec![sample_form(50).with_zeros(zeros), sample_form(3)];
        let first = serialize_form_file(&forms).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("forms.json");
        std::fs::write(&path, &first).unwrap();
        let parsed = parse_form_file(&path, false).unwrap();
        assert_eq!(parsed.forms.len(), 2);
        assert_eq!(parsed.forms[0], forms[0]);
        let second = serialize_form_file(&parsed.forms).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn minimal_record_defaults() {
        let json = r#"{
            "schema_version": 1,
            "forms": [{
                "label": "min",
                "mu": [[0.0, 1.0], [0.0, 2.0], [0.0, -3.0]],
                "coefficients": {},
                "zeros": null,
                "normalization": 1.0
            }]
        }"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.json");
        std::fs::write(&path, json).unwrap();
        let out = parse_form_file(&path, false).unwrap();
        assert_eq!(out.forms.len(), 1);
        assert_eq!(out.forms[0].normalization, 1.0);
    }

    #[test]
    fn bad_mu_is_rejected_with_field_path() {
        let json = r#"{
            "schema_version": 1,
            "forms": [{
                "label": "bad",
                "mu": [[0.0, 1.0], [0.0, 2.0], [0.0, -2.0]],
                "coefficients": {},
                "zeros": null,
                "normalization": 1.0
            }]
        }"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.json");
        std::fs::write(&path, json).unwrap();
        match parse_form_file(&path, false) {
            Err(IoError::Record { label, message }) => {
                assert_eq!(label, "bad");
                assert!(message.contains("mu"), "{message}");
            }
            other => panic!("expected record error, got {:?}", other.map(|o| o.forms.len())),
        }
        // lenient mode returns the valid subset
        let out = parse_form_file(&path, true).unwrap();
        assert!(out.forms.is_empty());
        assert_eq!(out.errors.len(), 1);
    }

    #[test]
    fn schema_version_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.json");
        std::fs::write(&path, r#"{"schema_version": 2, "forms": []}"#).unwrap();
        assert!(matches!(
            parse_form_file(&path, false),
            Err(IoError::SchemaVersion(2))
        ));
    }

    #[test]
    fn zero_csv_round_trip() {
        let set = ZeroSet::new(vec![
            Zero {
                beta: 0.05,
                gamma: -4.0,
            },
            Zero {
                beta: 0.0,
                gamma: 14.5,
            },
        ])
        .unwrap()
        .with_box(0.1, 100.0)
        .unwrap();
        let csv = zero_set_to_csv(&set);
        assert!(csv.starts_with("# complete_in_box 0.1 100\n"));
        let back = zero_set_from_csv(&csv).unwrap();
        assert_eq!(back, set);

        let plain = ZeroSet::new(vec![]).unwrap();
        assert_eq!(zero_set_from_csv(&zero_set_to_csv(&plain)).unwrap(), plain);
    }

    #[test]
    fn canonical_json_is_stable_and_sorted() {
        #[derive(Serialize)]
        struct Demo {
            zebra: u32,
            apple: u32,
        }
        let a = canonical_json(&Demo { zebra: 1, apple: 2 }).unwrap();
        let b = canonical_json(&Demo { zebra: 1, apple: 2 }).unwrap();
        assert_eq!(a, b);
        assert!(a.find("apple").unwrap() < a.find("zebra").unwrap());
        assert!(a.ends_with('\n'));
    }

    #[test]
    fn manifest_hash_tracks_config() {
        let m1 = RunManifest::start("sim moments", &("a", 1), Some(7)).unwrap();
        let m2 = RunManifest::start("sim moments", &("a", 1), Some(7)).unwrap();
        let m3 = RunManifest::start("sim moments", &("a", 2), Some(7)).unwrap();
        assert_eq!(m1.config_hash, m2.config_hash);
        assert_ne!(m1.config_hash, m3.config_hash);
    }

    #[test]
    fn ingest_fixture_validates() {
        let path = Path::new(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/fixtures/lmfdb_fixture.json"
        ));
        let out = ingest_lmfdb(None, 10, Some(path)).unwrap();
        assert_eq!(out.forms.len(), 2);
        assert!(out.rejects.is_empty());
        assert_eq!(out.forms[0].label, "maass-3-a");
        assert_eq!(out.forms[0].coefficients.len(), 3);
    }

    #[test]
    fn ingest_quarantines_bound_violations() {
        // nu with a large real part pushes Re mu past the unramified bound
        let raw = RawIngestFile {
            data: vec![
                RawIngestRecord {
                    label: "bad".into(),
                    nu: [[0.5, 1.0], [0.0, 2.0]],
                    ap: BTreeMap::new(),
                },
                RawIngestRecord {
                    label: "good".into(),
                    nu: [[0.0, 1.0], [0.0, 2.0]],
                    ap: BTreeMap::new(),
                },
            ],
        };
        let out = ingest_records(&raw, 10);
        assert_eq!(out.forms.len(), 1);
        assert_eq!(out.forms[0].label, "good");
        assert_eq!(out.rejects.len(), 1);
        assert_eq!(out.rejects[0].0, "bad");
    }

    #[test]
    fn ingest_drops_unpaired_coefficients() {
        let mut ap = BTreeMap::new();
        ap.insert("2".to_string(), vec![[1.0, 0.5]]);
        ap.insert("3".to_string(), vec![[1.0, 0.5], [1.0, -0.5]]);
        let raw = RawIngestFile {
            data: vec![RawIngestRecord {
                label: "partial".into(),
                nu: [[0.0, 1.0], [0.0, 2.0]],
                ap,
            }],
        };
        let out = ingest_records(&raw, 10);
        assert_eq!(out.forms.len(), 1);
        // the unpaired prime is dropped, the paired one kept
        assert_eq!(out.forms[0].coefficients.len(), 1);
        assert!(out.forms[0].coefficients.contains_key(&3));
        assert!(!out.warnings.is_empty());
    }

    #[test]
    fn ingest_requires_a_source() {
        assert!(matches!(
            ingest_lmfdb(None, 10, None),
            Err(IoError::NoSource)
        ));
    }

    #[test]
    fn svg_outputs_are_well_formed() {
        let samples: Vec<f64> = (0..500).map(|i| (i as f64 / 250.0 - 1.0) * 0.3).collect();
        let svg = cdf_overlay_svg(&samples, 2.0, "cdf overlay");
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        // balanced tags
        assert_eq!(svg.matches("<svg").count(), svg.matches("</svg>").count());
    }
}
