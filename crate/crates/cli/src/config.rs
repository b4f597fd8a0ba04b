use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use susy_feshbach::source::SourceRegistry;
use susy_feshbach::FeshbachParams;

use crate::output::r12;
use crate::Failure;

pub const DEFAULT_TRIPLE: (f64, f64, f64) = (10.0, 7.0, 1.0);
pub const DEFAULT_EMIN: f64 = 0.05;
pub const DEFAULT_EMAX: f64 = 20.0;
pub const DEFAULT_POINTS: usize = 800;
pub const DEFAULT_RMAX: f64 = 12.0;
pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_SEED: (f64, f64) = (2.6, -0.1);
pub const DEFAULT_SOURCE: &str = "closed-form";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every option, as given on the command line or in a `--config` file. The file uses the
/// flag names as keys.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// Threshold gap Δ of the closed channel
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Resonance energy E_R
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub er: Option<f64>,
    /// Resonance width Γ
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kappa1: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kappa2: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Lowest scan energy
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub emin: Option<f64>,
    /// Highest scan energy
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub emax: Option<f64>,
    /// Number of samples (energies for `scan`, radii for `potential`)
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// Outer radius of the radial grid
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rmax: Option<f64>,
    /// Integration step of the radial grid
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub step: Option<f64>,
    /// Output file; standard output when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON file with any of these options; flags take precedence
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Worker threads for scans and validation
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Real part of the k1 seed for `resonance`
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub seed_re: Option<f64>,
    /// Imaginary part of the k1 seed for `resonance`
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub seed_im: Option<f64>,
    /// Jost-matrix route: closed-form, susy or numeric
    #[arg(long, global = true)]
    pub source: Option<String>,
    /// Energy for `jost`
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub energy: Option<f64>,
}

impl Options {
    pub fn from_file(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::Config(format!("invalid config {}: {e}", path.display())))
    }

    fn touches_physical(&self) -> bool {
        self.delta.is_some() || self.er.is_some() || self.gamma.is_some()
    }

    fn touches_raw(&self) -> bool {
        self.kappa1.is_some() || self.kappa2.is_some() || self.beta.is_some()
    }

    /// Flags win field by field. Naming a field of one parameter family on the command
    /// line drops the other family from the file, so a file model can be swapped out.
    pub fn merged_over(self, file: Options) -> Options {
        let (mut phys, mut raw) = (file.clone(), file.clone());
        if self.touches_raw() && !self.touches_physical() {
            phys = Options::default();
        }
        if self.touches_physical() && !self.touches_raw() {
            raw = Options::default();
        }
        Options {
            delta: self.delta.or(phys.delta),
            er: self.er.or(phys.er),
            gamma: self.gamma.or(phys.gamma),
            kappa1: self.kappa1.or(raw.kappa1),
            kappa2: self.kappa2.or(raw.kappa2),
            beta: self.beta.or(raw.beta),
            emin: self.emin.or(file.emin),
            emax: self.emax.or(file.emax),
            points: self.points.or(file.points),
            rmax: self.rmax.or(file.rmax),
            step: self.step.or(file.step),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            config: self.config,
            threads: self.threads.or(file.threads),
            seed_re: self.seed_re.or(file.seed_re),
            seed_im: self.seed_im.or(file.seed_im),
            source: self.source.or(file.source),
            energy: self.energy.or(file.energy),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelInput {
    Physical { delta: f64, er: f64, gamma: f64 },
    Raw { kappa1: f64, kappa2: f64, beta: f64 },
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub input: ModelInput,
    pub params: FeshbachParams,
    pub emin: f64,
    pub emax: f64,
    pub points: usize,
    pub rmax: f64,
    pub step: f64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub seed: Complex64,
    pub source: String,
    pub energy: Option<f64>,
}

fn finite(name: &str, x: Option<f64>) -> Result<(), Failure> {
    match x {
        Some(v) if !v.is_finite() => Err(Failure::Config(format!("--{name} must be finite, got {v}"))),
        _ => Ok(()),
    }
}

impl Settings {
    pub fn resolve(opts: Options) -> Result<Self, Failure> {
        for (name, v) in [
            ("delta", opts.delta),
            ("er", opts.er),
            ("gamma", opts.gamma),
            ("kappa1", opts.kappa1),
            ("kappa2", opts.kappa2),
            ("beta", opts.beta),
            ("emin", opts.emin),
            ("emax", opts.emax),
            ("rmax", opts.rmax),
            ("step", opts.step),
            ("seed-re", opts.seed_re),
            ("seed-im", opts.seed_im),
            ("energy", opts.energy),
        ] {
            finite(name, v)?;
        }

        let input = match (opts.touches_physical(), opts.touches_raw()) {
            (true, true) => {
                return Err(Failure::Config(
                    "give either --delta/--er/--gamma or --kappa1/--kappa2/--beta, not both".into(),
                ))
            }
            (true, false) => match (opts.delta, opts.er, opts.gamma) {
                (Some(delta), Some(er), Some(gamma)) => ModelInput::Physical { delta, er, gamma },
                _ => return Err(Failure::Config("--delta, --er and --gamma must be given together".into())),
            },
            (false, true) => match (opts.kappa1, opts.kappa2, opts.beta) {
                (Some(kappa1), Some(kappa2), Some(beta)) => ModelInput::Raw { kappa1, kappa2, beta },
                _ => {
                    return Err(Failure::Config(
                        "--kappa1, --kappa2 and --beta must be given together".into(),
                    ))
                }
            },
            (false, false) => {
                let (delta, er, gamma) = DEFAULT_TRIPLE;
                ModelInput::Physical { delta, er, gamma }
            }
        };
        let params = match input {
            ModelInput::Physical { delta, er, gamma } => FeshbachParams::from_physical(delta, er, gamma),
            ModelInput::Raw { kappa1, kappa2, beta } => FeshbachParams::from_raw(kappa1, kappa2, beta),
        }
        .map_err(|e| Failure::Config(format!("invalid model: {e}")))?;

        let emin = opts.emin.unwrap_or(DEFAULT_EMIN);
        let emax = opts.emax.unwrap_or(DEFAULT_EMAX);
        let points = opts.points.unwrap_or(DEFAULT_POINTS);
        if !(emin > 0.0) {
            return Err(Failure::Config(format!("--emin must be positive, got {emin}")));
        }
        if !(emin < emax) {
            return Err(Failure::Config(format!("--emin {emin} must be below --emax {emax}")));
        }
        if points < 2 {
            return Err(Failure::Config(format!("--points must be at least 2, got {points}")));
        }

        let rmax = opts.rmax.unwrap_or(DEFAULT_RMAX);
        let step = opts.step.unwrap_or(DEFAULT_STEP);
        if !(rmax > 0.0) {
            return Err(Failure::Config(format!("--rmax must be positive, got {rmax}")));
        }
        if !(step > 0.0 && step < rmax) {
            return Err(Failure::Config(format!("--step must lie in (0, rmax), got {step}")));
        }
        if opts.threads == Some(0) {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }

        let source = opts.source.unwrap_or_else(|| DEFAULT_SOURCE.to_string());
        if !SourceRegistry::default().names().any(|n| n == source) {
            let known: Vec<_> = SourceRegistry::default().names().collect();
            return Err(Failure::Config(format!(
                "unknown --source `{source}`; expected one of {}",
                known.join(", ")
            )));
        }

        Ok(Self {
            input,
            params,
            emin,
            emax,
            points,
            rmax,
            step,
            out: opts.out,
            format: opts.format,
            threads: opts.threads,
            seed: Complex64::new(
                opts.seed_re.unwrap_or(DEFAULT_SEED.0),
                opts.seed_im.unwrap_or(DEFAULT_SEED.1),
            ),
            source,
            energy: opts.energy,
        })
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// Resolved options that determine the output. The output path and thread count
    /// are left out: they never change the data.
    pub fn echo(&self) -> Value {
        let mut m = Map::new();
        match self.input {
            ModelInput::Physical { delta, er, gamma } => {
                m.insert("delta".into(), r12(delta));
                m.insert("er".into(), r12(er));
                m.insert("gamma".into(), r12(gamma));
            }
            ModelInput::Raw { kappa1, kappa2, beta } => {
                m.insert("kappa1".into(), r12(kappa1));
                m.insert("kappa2".into(), r12(kappa2));
                m.insert("beta".into(), r12(beta));
            }
        }
        m.insert("emin".into(), r12(self.emin));
        m.insert("emax".into(), r12(self.emax));
        m.insert("points".into(), json!(self.points));
        m.insert("rmax".into(), r12(self.rmax));
        m.insert("step".into(), r12(self.step));
        m.insert("seed-re".into(), r12(self.seed.re));
        m.insert("seed-im".into(), r12(self.seed.im));
        m.insert("source".into(), json!(self.source));
        if let Some(e) = self.energy {
            m.insert("energy".into(), r12(e));
        }
        if let Some(f) = self.format {
            m.insert("format".into(), json!(f));
        }
        Value::Object(m)
    }

    /// Derived model parameters.
    pub fn model_summary(&self) -> Value {
        let p = &self.params;
        json!({
            "delta": r12(p.delta),
            "e_r": r12(p.e_r),
            "gamma": r12(p.gamma),
            "kappa1": r12(p.kappa1),
            "kappa2": r12(p.kappa2),
            "beta": r12(p.beta),
            "alpha1": r12(p.alpha1),
            "alpha2": r12(p.alpha2),
        })
    }
}
