//! Benchmark specification: CLI flags merged over an optional key=value
//! config file (flags win) over per-problem defaults.

use std::collections::HashMap;
use std::path::PathBuf;
use xfrac_core::quadrature::Scheme;
use xfrac_core::sccm::DiskRuleKind;
use xfrac_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Griffith,
    Edge,
    Inclined,
    Multicrack,
    Bimaterial,
    Dcb,
}

impl Problem {
    pub fn parse(s: &str) -> Result<Problem> {
        Ok(match s {
            "griffith" => Problem::Griffith,
            "edge" => Problem::Edge,
            "inclined" => Problem::Inclined,
            "multicrack" => Problem::Multicrack,
            "bimaterial" => Problem::Bimaterial,
            "dcb" => Problem::Dcb,
            _ => return Err(Error::Domain(format!("unknown problem '{s}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Problem::Griffith => "griffith",
            Problem::Edge => "edge",
            Problem::Inclined => "inclined",
            Problem::Multicrack => "multicrack",
            Problem::Bimaterial => "bimaterial",
            Problem::Dcb => "dcb",
        }
    }

    fn default_meshes(&self, full_scale: bool) -> Vec<usize> {
        match self {
            Problem::Griffith | Problem::Edge => vec![10, 20, 40, 80],
            Problem::Bimaterial => vec![8, 16, 32, 64],
            Problem::Inclined => vec![if full_scale { 100 } else { 50 }],
            Problem::Multicrack => vec![if full_scale { 72 } else { 36 }],
            Problem::Dcb => vec![60],
        }
    }
}

/// Raw option set as it comes from one source (flags or config file).
#[derive(Debug, Clone, Default)]
pub struct RawOptions {
    pub mesh: Option<Vec<usize>>,
    pub scheme: Option<String>,
    pub rule: Option<String>,
    pub tip_points: Option<Vec<usize>>,
    pub alpha_ir: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub full_scale: Option<bool>,
}

impl RawOptions {
    /// Fill unset fields from a lower-priority source.
    pub fn or(mut self, other: RawOptions) -> RawOptions {
        self.mesh = self.mesh.or(other.mesh);
        self.scheme = self.scheme.or(other.scheme);
        self.rule = self.rule.or(other.rule);
        self.tip_points = self.tip_points.or(other.tip_points);
        self.alpha_ir = self.alpha_ir.or(other.alpha_ir);
        self.seed = self.seed.or(other.seed);
        self.out = self.out.or(other.out);
        self.full_scale = self.full_scale.or(other.full_scale);
        self
    }
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Domain(format!("bad integer '{t}'")))
        })
        .collect()
}

/// Parses a `key = value` config file; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<RawOptions> {
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Domain(format!("config line {}: expected key = value", lineno + 1))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    let mut raw = RawOptions::default();
    for (k, v) in map {
        match k.as_str() {
            "mesh" => raw.mesh = Some(parse_usize_list(&v)?),
            "scheme" => raw.scheme = Some(v),
            "rule" => raw.rule = Some(v),
            "tip-points" => raw.tip_points = Some(parse_usize_list(&v)?),
            "alpha-ir" => {
                raw.alpha_ir =
                    Some(v.parse().map_err(|_| Error::Domain(format!("bad float '{v}'")))?)
            }
            "seed" => {
                raw.seed =
                    Some(v.parse().map_err(|_| Error::Domain(format!("bad seed '{v}'")))?)
            }
            "out" => raw.out = Some(PathBuf::from(v)),
            "full-scale" => {
                raw.full_scale = Some(
                    v.parse()
                        .map_err(|_| Error::Domain(format!("bad bool '{v}'")))?,
                )
            }
            other => return Err(Error::Domain(format!("unknown config key '{other}'"))),
        }
    }
    Ok(raw)
}

/// Fully-resolved benchmark specification.
#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    pub problem: Problem,
    pub meshes: Vec<usize>,
    pub scheme: Scheme,
    /// None: parity with the 13-point subcell rule. One value: fixed budget.
    /// Several values (griffith): integration-point sweep mode.
    pub tip_points: Option<Vec<usize>>,
    pub alpha_ir: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub full_scale: bool,
}

impl BenchmarkSpec {
    pub fn resolve(problem: Problem, raw: RawOptions) -> Result<BenchmarkSpec> {
        let full_scale = raw.full_scale.unwrap_or(false);
        let meshes = raw
            .mesh
            .unwrap_or_else(|| problem.default_meshes(full_scale));
        if meshes.is_empty() || meshes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain(
                "mesh sizes must be nonempty and strictly increasing".into(),
            ));
        }
        let scheme_name = raw.scheme.unwrap_or_else(|| "sccm".into());
        let (mut scheme, _) = Scheme::parse(&scheme_name)
            .ok_or_else(|| Error::Domain(format!("unknown scheme '{scheme_name}'")))?;
        if let Some(rule) = &raw.rule {
            let kind = DiskRuleKind::parse(rule)
                .ok_or_else(|| Error::Domain(format!("unknown disk rule '{rule}'")))?;
            if let Scheme::Sccm(_) = scheme {
                scheme = Scheme::Sccm(kind);
            }
        }
        let alpha_ir = raw.alpha_ir.unwrap_or(0.0);
        if !(0.0..0.5).contains(&alpha_ir) {
            return Err(Error::Domain(format!(
                "alpha-ir {alpha_ir} outside [0, 0.5)"
            )));
        }
        Ok(BenchmarkSpec {
            problem,
            meshes,
            scheme,
            tip_points: raw.tip_points,
            alpha_ir,
            seed: raw.seed.unwrap_or(0),
            out: raw.out.unwrap_or_else(|| PathBuf::from(".")),
            full_scale,
        })
    }

    /// Fixed per-mesh tip budget (first entry) if one was requested.
    pub fn tip_budget(&self) -> Option<usize> {
        self.tip_points.as_ref().map(|v| v[0])
    }
}
