use std::path::Path;

use anyhow::{bail, Context, Result};
use geocomb::equidist::{Direction, Mode, Term, TestFunction, DEFAULT_BUDGET};
use geocomb::presets::Preset;
use geocomb::TorusPoint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One term `(re + i im) * chi_k` of the test function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub k: Vec<i64>,
    #[serde(default = "one")]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn one() -> f64 {
    1.0
}

impl std::str::FromStr for TermSpec {
    type Err = String;

    /// `K[:RE[:IM]]`, e.g. `1,0`, `0,0:2`, `-1,2:0.5:-1`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut parts = s.split(':');
        let k = parts
            .next()
            .unwrap_or("")
            .split(',')
            .map(|v| v.trim().parse::<i64>().map_err(|e| format!("bad frequency in {s:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut num = |name: &str, default: f64| -> std::result::Result<f64, String> {
            match parts.next() {
                Some(v) => v.trim().parse().map_err(|e| format!("bad {name} in {s:?}: {e}")),
                None => Ok(default),
            }
        };
        let re = num("real part", 1.0)?;
        let im = num("imaginary part", 0.0)?;
        if parts.next().is_some() {
            return Err(format!("too many ':' fields in {s:?}"));
        }
        Ok(TermSpec { k, re, im })
    }
}

/// Everything an experiment depends on. Files may give any subset of the
/// fields; command-line flags override them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Preset name, or `user:<path>` for an automaton file.
    pub preset: String,
    /// Coordinates as decimals, fractions or `sqrt(n)+c`; the preset's first basepoint if absent.
    pub basepoint: Option<Vec<String>>,
    /// Test function; `chi_(1,0,...,0)` if empty.
    pub function: Vec<TermSpec>,
    pub n_max: usize,
    pub mode: Mode,
    pub samples: usize,
    pub seed: u64,
    pub budget: u64,
    pub direction: Direction,
    pub source: Option<usize>,
    pub target: Option<usize>,
    pub rays: usize,
    pub radius: usize,
    pub lookahead: usize,
    pub output: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            preset: "free2_sanov".into(),
            basepoint: None,
            function: Vec::new(),
            n_max: 10,
            mode: Mode::Auto,
            samples: 10_000,
            seed: 0,
            budget: DEFAULT_BUDGET as u64,
            direction: Direction::Inverse,
            source: None,
            target: None,
            rays: 100,
            radius: 8,
            lookahead: 2,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fills in the preset-dependent defaults so the echoed config is complete.
    pub fn resolve(&mut self, preset: &Preset) -> Result<()> {
        let d = preset.system.dim();
        if self.basepoint.is_none() {
            let x = preset.basepoints.first().context("preset has no basepoint")?;
            self.basepoint = Some(x.coords().iter().map(|c| fixed_to_string(*c)).collect());
        }
        if self.function.is_empty() {
            let mut k = vec![0; d];
            k[0] = 1;
            self.function.push(TermSpec { k, re: 1.0, im: 0.0 });
        }
        if let Some(t) = self.function.iter().find(|t| t.k.len() != d) {
            bail!("frequency {:?} has {} entries, the torus has dimension {d}", t.k, t.k.len());
        }
        if self.basepoint.as_ref().map_or(0, |b| b.len()) != d {
            bail!("basepoint must have {d} coordinates");
        }
        if self.n_max == 0 {
            bail!("n_max must be at least 1");
        }
        Ok(())
    }

    pub fn basepoint(&self) -> Result<TorusPoint> {
        let coords = self.basepoint.as_ref().context("basepoint not resolved")?;
        Ok(TorusPoint::parse(coords)?)
    }

    pub fn test_function(&self) -> Result<TestFunction> {
        let terms = self.function.iter().map(|t| Term { k: t.k.clone(), coeff: Complex64::new(t.re, t.im) }).collect();
        Ok(TestFunction::new(terms)?)
    }
}

/// Exact fraction `c / 2^64`, so that echoing a resolved basepoint loses nothing.
fn fixed_to_string(c: u64) -> String {
    format!("{c}/18446744073709551616")
}
