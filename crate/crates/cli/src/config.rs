//! Resolved run configuration and the key-value file layer.
//!
//! Precedence: preset defaults, then the config file, then flags.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use szego_core::dynamics::{IntegratorConfig, RecordOptions, Scheme};
use szego_core::reduced::L1State;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Galerkin-truncated flow on N Fourier modes.
    Full,
    /// Three-variable system on the rank-one manifold.
    Reduced,
    /// Closed-form solution from z + √α.
    Exact,
    /// Randomized operator-identity and rank checks.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Identities,
    Kronecker,
}

/// Initial datum. Complex numbers are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Initial {
    /// `u₀ = z + √α`, resolved against the final α.
    GrowthDatum,
    /// `u₀ = b + cz/(1 − pz)`.
    Rational { b: [f64; 2], c: [f64; 2], p: [f64; 2] },
    /// Leading Fourier coefficients, zero-padded to N.
    Coefficients { coeffs: Vec<[f64; 2]> },
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub mode: Mode,
    pub alpha: f64,
    pub initial: Initial,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub sample_every: f64,
    pub adaptive: bool,
    pub adapt_tol: f64,
    pub pole_guard: f64,
    pub s_list: Vec<f64>,
    /// Growth-fit window; defaults to `[1, t_end]`.
    pub fit_window: Option<[f64; 2]>,
    /// Section size for the `K_u²` spectrum in full runs.
    pub spectral_section: Option<usize>,
    pub profile_grid: usize,
    pub checks: Vec<Check>,
    pub trials: usize,
    pub seed: u64,
    /// Pass thresholds for the operator-identity residuals.
    pub hpi_tol: f64,
    pub k_square_tol: f64,
    pub out: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        let integ = IntegratorConfig::default();
        Self {
            preset: None,
            mode: Mode::Reduced,
            alpha: 1.0,
            initial: Initial::GrowthDatum,
            n: 256,
            dt: integ.dt,
            t_end: integ.t_end,
            sample_every: integ.sample_every,
            adaptive: false,
            adapt_tol: integ.adapt_tol,
            pole_guard: integ.pole_guard,
            s_list: vec![1.0, 2.0],
            fit_window: None,
            spectral_section: None,
            profile_grid: 512,
            checks: vec![Check::Identities, Check::Kronecker],
            trials: 100,
            seed: 0,
            hpi_tol: 1e-10,
            k_square_tol: 1e-12,
            out: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

impl RunConfig {
    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            dt: self.dt,
            t_end: self.t_end,
            sample_every: self.sample_every,
            scheme: if self.adaptive {
                Scheme::Rk4Adaptive
            } else {
                Scheme::Rk4Fixed
            },
            adapt_tol: self.adapt_tol,
            pole_guard: self.pole_guard,
        }
    }

    pub fn record_options(&self) -> RecordOptions {
        RecordOptions {
            s_list: self.s_list.clone(),
            spectral_section: self.spectral_section,
            ..RecordOptions::default()
        }
    }

    pub fn fit_window(&self) -> (f64, f64) {
        match self.fit_window {
            Some([lo, hi]) => (lo, hi),
            None => (1.0_f64.min(self.t_end), self.t_end),
        }
    }

    /// The datum as a point of `L(1)`, when it is one.
    pub fn l1_state(&self) -> Result<Option<L1State>> {
        let state = match &self.initial {
            Initial::GrowthDatum => {
                if self.alpha <= 0.0 {
                    return Err(CliError::Config(format!(
                        "the growth datum z + √α needs alpha > 0, got {}",
                        self.alpha
                    )));
                }
                L1State::new(
                    Complex64::new(self.alpha.sqrt(), 0.0),
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.0, 0.0),
                )?
            }
            Initial::Rational { b, c, p } => L1State::new(complex(*b), complex(*c), complex(*p))?,
            Initial::Coefficients { .. } => return Ok(None),
        };
        Ok(Some(state))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !self.alpha.is_finite() {
            return bad(format!("alpha must be finite, got {}", self.alpha));
        }
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.s_list.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return bad(format!("s-list entries must be finite and >= 0: {:?}", self.s_list));
        }
        if self.profile_grid < 2 {
            return bad("profile grid needs at least 2 points".into());
        }
        if let Some([lo, hi]) = self.fit_window {
            if !(lo < hi) {
                return bad(format!("fit window [{lo}, {hi}] is empty"));
            }
        }
        match self.mode {
            Mode::Full => {
                if !self.n.is_power_of_two() {
                    return bad(format!("full mode needs n to be a power of two, got {}", self.n));
                }
                if let Some(m) = self.spectral_section {
                    if m == 0 || m > self.n {
                        return bad(format!("spectral section {m} must lie in 1..={}", self.n));
                    }
                }
                if let Initial::Coefficients { coeffs } = &self.initial {
                    if coeffs.len() > self.n {
                        return bad(format!("{} coefficients exceed n = {}", coeffs.len(), self.n));
                    }
                }
            }
            Mode::Reduced => {
                if matches!(self.initial, Initial::Coefficients { .. }) {
                    return bad("reduced mode needs a rank-one datum (b, c, p)".into());
                }
            }
            Mode::Exact => {
                let ok = match &self.initial {
                    Initial::GrowthDatum => true,
                    Initial::Rational { b, c, p } => {
                        self.alpha > 0.0
                            && (complex(*b) - self.alpha.sqrt()).norm() <= 1e-12
                            && (complex(*c) - 1.0).norm() <= 1e-12
                            && complex(*p).norm() <= 1e-12
                    }
                    Initial::Coefficients { .. } => false,
                };
                if !ok {
                    return bad("exact mode only covers the datum z + √α".into());
                }
            }
            Mode::Verify => {
                if self.trials == 0 {
                    return bad("verify mode needs trials >= 1".into());
                }
                if self.checks.is_empty() {
                    return bad("verify mode needs at least one check".into());
                }
                if !(self.hpi_tol >= 0.0 && self.k_square_tol >= 0.0) {
                    return bad("verification tolerances must be >= 0".into());
                }
            }
        }
        if self.mode != Mode::Verify {
            self.integrator().validate()?;
            self.l1_state()?;
        }
        Ok(())
    }
}

/// Config file layout. Every key is optional and overrides the preset.
///
/// ```toml
/// [run]
/// mode = "full"
/// alpha = 1.0
/// n = 256
///
/// [initial]
/// b = [1.0, 0.0]
/// c = [1.0, 0.0]
/// p = [0.0, 0.0]
///
/// [integrator]
/// dt = 0.001
/// t_end = 3.0
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub verify: VerifySection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub preset: Option<String>,
    pub mode: Option<Mode>,
    pub alpha: Option<f64>,
    pub n: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub checks: Option<Vec<Check>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// `"growth"` selects z + √α.
    pub datum: Option<String>,
    pub b: Option<[f64; 2]>,
    pub c: Option<[f64; 2]>,
    pub p: Option<[f64; 2]>,
    pub coeffs: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub sample_every: Option<f64>,
    pub adaptive: Option<bool>,
    pub adapt_tol: Option<f64>,
    pub pole_guard: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    pub s_list: Option<Vec<f64>>,
    pub fit_window: Option<[f64; 2]>,
    pub spectral_section: Option<usize>,
    pub profile_grid: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub hpi_tol: Option<f64>,
    pub k_square_tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        Self::parse(&text).map_err(|source| CliError::ConfigFile {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn parse(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        let r = &self.run;
        set(&mut cfg.mode, r.mode);
        set(&mut cfg.alpha, r.alpha);
        set(&mut cfg.n, r.n);
        set(&mut cfg.out, r.out.clone());
        set(&mut cfg.format, r.format);
        set(&mut cfg.trials, r.trials);
        set(&mut cfg.seed, r.seed);
        set(&mut cfg.checks, r.checks.clone());

        let i = &self.initial;
        match i.datum.as_deref() {
            None => {}
            Some("growth") => cfg.initial = Initial::GrowthDatum,
            Some(other) => return Err(CliError::Config(format!("unknown datum {other:?}"))),
        }
        if let Some(coeffs) = &i.coeffs {
            if i.b.is_some() || i.c.is_some() || i.p.is_some() {
                return Err(CliError::Config("give either coeffs or b/c/p, not both".into()));
            }
            cfg.initial = Initial::Coefficients {
                coeffs: coeffs.clone(),
            };
        }
        override_rational(cfg, i.b, i.c, i.p);

        let g = &self.integrator;
        set(&mut cfg.dt, g.dt);
        set(&mut cfg.t_end, g.t_end);
        set(&mut cfg.sample_every, g.sample_every);
        set(&mut cfg.adaptive, g.adaptive);
        set(&mut cfg.adapt_tol, g.adapt_tol);
        set(&mut cfg.pole_guard, g.pole_guard);

        let d = &self.diagnostics;
        set(&mut cfg.s_list, d.s_list.clone());
        if d.fit_window.is_some() {
            cfg.fit_window = d.fit_window;
        }
        if d.spectral_section.is_some() {
            cfg.spectral_section = d.spectral_section;
        }
        set(&mut cfg.profile_grid, d.profile_grid);

        set(&mut cfg.hpi_tol, self.verify.hpi_tol);
        set(&mut cfg.k_square_tol, self.verify.k_square_tol);
        Ok(())
    }
}

pub fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Replaces any of `b`, `c`, `p` on the datum, keeping the others. A growth
/// datum is first expanded with the α in force at this point.
pub fn override_rational(cfg: &mut RunConfig, b: Option<[f64; 2]>, c: Option<[f64; 2]>, p: Option<[f64; 2]>) {
    if b.is_none() && c.is_none() && p.is_none() {
        return;
    }
    let (b0, c0, p0) = match &cfg.initial {
        Initial::Rational { b, c, p } => (*b, *c, *p),
        Initial::GrowthDatum => ([cfg.alpha.max(0.0).sqrt(), 0.0], [1.0, 0.0], [0.0, 0.0]),
        Initial::Coefficients { .. } => ([0.0, 0.0], [1.0, 0.0], [0.0, 0.0]),
    };
    cfg.initial = Initial::Rational {
        b: b.unwrap_or(b0),
        c: c.unwrap_or(c0),
        p: p.unwrap_or(p0),
    };
}

/// Parses `re,im` (a bare real is accepted as `re,0`).
pub fn parse_complex(text: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(format!("expected re,im, got {text:?}")),
    }
}

pub fn parse_s_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_pairs() {
        assert_eq!(parse_complex("1.5,-2").unwrap(), [1.5, -2.0]);
        assert_eq!(parse_complex(" -0.3 ").unwrap(), [-0.3, 0.0]);
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("x,1").is_err());
    }

    #[test]
    fn file_overrides_defaults() {
        let file = FileConfig::parse(
            r#"
            [run]
            mode = "full"
            alpha = 2.0
            n = 128

            [initial]
            b = [0.5, 0.0]

            [integrator]
            t_end = 2.5
            adaptive = true

            [diagnostics]
            s_list = [0.5, 1.0]
            "#,
        )
        .unwrap();
        let mut cfg = RunConfig::default();
        file.apply(&mut cfg).unwrap();
        assert_eq!(cfg.mode, Mode::Full);
        assert_eq!(cfg.n, 128);
        assert_eq!(cfg.t_end, 2.5);
        assert!(cfg.adaptive);
        assert_eq!(cfg.s_list, vec![0.5, 1.0]);
        // b replaced, c and p kept from the growth datum
        assert_eq!(
            cfg.initial,
            Initial::Rational {
                b: [0.5, 0.0],
                c: [1.0, 0.0],
                p: [0.0, 0.0]
            }
        );
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(FileConfig::parse("[run]\nalfa = 1.0\n").is_err());
        assert!(FileConfig::parse("[solver]\ndt = 1.0\n").is_err());
    }

    #[test]
    fn validation_catches_bad_configs() {
        let full = |n| RunConfig {
            mode: Mode::Full,
            n,
            ..RunConfig::default()
        };
        assert!(full(256).validate().is_ok());
        assert!(full(200).validate().is_err());

        let exact = RunConfig {
            mode: Mode::Exact,
            initial: Initial::Rational {
                b: [1.0, 0.0],
                c: [0.5, 0.0],
                p: [0.0, 0.0],
            },
            ..RunConfig::default()
        };
        assert!(exact.validate().is_err());

        let outside = RunConfig {
            initial: Initial::Rational {
                b: [1.0, 0.0],
                c: [1.0, 0.0],
                p: [1.0, 0.0],
            },
            ..RunConfig::default()
        };
        assert!(outside.validate().is_err());

        let growth_negative = RunConfig {
            alpha: -1.0,
            ..RunConfig::default()
        };
        assert!(growth_negative.validate().is_err());

        let no_time = RunConfig {
            dt: 0.0,
            ..RunConfig::default()
        };
        assert!(no_time.validate().is_err());
    }
}
