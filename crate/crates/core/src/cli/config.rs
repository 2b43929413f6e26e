//! Sectioned `key = value` configuration files.
//!
//! ```text
//! [bench]
//! n = 64
//! k = 2, 3, 4
//! snr_db = inf, 20
//!
//! [method.am_l1]
//! method = am
//! prior = l1_with_support
//! lambda = 0.2
//! ```
//!
//! Comments take a whole line starting with `#` or `;`. Unknown sections,
//! unknown keys and repeated keys or sections are errors that carry the line
//! number of the offending entry.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::{Ini, Properties};

use crate::error::{Error, Result};
use crate::harness::{BasisChoice, ExperimentConfig, MethodSpec, PriorTemplate, Timing, DEFAULT_LAMBDA};
use crate::priors::PriorKind;
use crate::solvers::{Inertia, Method};

pub struct ConfigFile {
    path: PathBuf,
    text: String,
    ini: Ini,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// `path` is only used in error messages.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let ini = Ini::load_from_str_noescape(text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            line: e.line,
            message: e.msg.to_string(),
        })?;
        let file = ConfigFile {
            path: path.to_path_buf(),
            text: text.to_string(),
            ini,
        };
        if let Some((key, _)) = file.ini.general_section().iter().next() {
            return Err(file.error(
                file.key_line(None, key),
                format!("`{key}` appears before any [section]"),
            ));
        }
        for name in file.section_names() {
            if file.ini.section_all(Some(name)).count() > 1 {
                let line = file.section_lines(name).get(1).copied().unwrap_or(0);
                return Err(file.error(line, format!("section [{name}] is repeated")));
            }
        }
        Ok(file)
    }

    fn error(&self, line: usize, message: String) -> Error {
        Error::Config {
            path: self.path.clone(),
            line,
            message,
        }
    }

    fn section_lines(&self, name: &str) -> Vec<usize> {
        self.text
            .lines()
            .enumerate()
            .filter(|(_, l)| section_name(l) == Some(name))
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Lines where `key` is assigned inside the first `[section]` (or before
    /// any section when `section` is `None`).
    fn key_lines(&self, section: Option<&str>, key: &str) -> Vec<usize> {
        let mut current: Option<&str> = None;
        let mut visited = false;
        let mut out = Vec::new();
        for (i, line) in self.text.lines().enumerate() {
            if let Some(name) = section_name(line) {
                if current == section && section.is_some() {
                    visited = true;
                }
                current = Some(name);
                continue;
            }
            if current == section && !visited && assigned_key(line) == Some(key) {
                out.push(i + 1);
            }
        }
        out
    }

    fn key_line(&self, section: Option<&str>, key: &str) -> usize {
        self.key_lines(section, key).first().copied().unwrap_or(0)
    }

    /// Distinct section names in file order.
    pub fn section_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for name in self.ini.sections().flatten() {
            if !names.contains(&name) {
                names.push(name);
            }
        }
        names
    }

    pub fn section(&self, name: &str) -> Option<Section<'_>> {
        self.ini.section(Some(name)).map(|props| Section {
            file: self,
            name: name.to_string(),
            props,
        })
    }

    /// Rejects any section whose name is not accepted by `allowed`.
    pub fn expect_sections(&self, allowed: impl Fn(&str) -> bool, expected: &str) -> Result<()> {
        for name in self.section_names() {
            if !allowed(name) {
                let line = self.section_lines(name).first().copied().unwrap_or(0);
                return Err(self.error(line, format!("unknown section [{name}]; expected {expected}")));
            }
        }
        Ok(())
    }

    pub fn require(&self, name: &str) -> Result<Section<'_>> {
        self.section(name)
            .ok_or_else(|| self.error(0, format!("missing section [{name}]")))
    }
}

fn section_name(line: &str) -> Option<&str> {
    let t = line.trim();
    t.strip_prefix('[')?.strip_suffix(']').map(str::trim)
}

fn assigned_key(line: &str) -> Option<&str> {
    let t = line.trim_start();
    if t.starts_with('#') || t.starts_with(';') {
        return None;
    }
    let end = t.find(['=', ':'])?;
    Some(t[..end].trim())
}

pub struct Section<'a> {
    file: &'a ConfigFile,
    name: String,
    props: &'a Properties,
}

impl<'a> Section<'a> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn error(&self, key: &str, message: String) -> Error {
        self.file.error(
            self.file.key_line(Some(&self.name), key),
            format!("[{}] {key}: {message}", self.name),
        )
    }

    /// Every key must be in `allowed` and appear at most once.
    pub fn expect_keys(&self, allowed: &[&str]) -> Result<()> {
        for (key, _) in self.props.iter() {
            if !allowed.contains(&key) {
                return Err(self.error(key, format!("unknown key; allowed keys are {}", allowed.join(", "))));
            }
            if self.props.get_all(key).count() > 1 {
                let lines = self.file.key_lines(Some(&self.name), key);
                let line = lines.get(1).copied().unwrap_or(0);
                return Err(self.file.error(line, format!("[{}] {key}: key is repeated", self.name)));
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&'a str> {
        self.props.get(key).map(str::trim)
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| self.error(key, format!("`{v}`: {e}"))))
            .transpose()
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    /// A comma-separated list; `None` when the key is absent.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(raw) = self.raw(key) else {
            return Ok(None);
        };
        let items = raw
            .split(',')
            .map(|item| {
                let item = item.trim();
                item.parse::<T>().map_err(|e| self.error(key, format!("`{item}`: {e}")))
            })
            .collect::<Result<Vec<T>>>()?;
        if items.is_empty() {
            return Err(self.error(key, "empty list".into()));
        }
        Ok(Some(items))
    }
}

/// Keys shared by `[solver]` and `[method.<label>]`.
pub const METHOD_KEYS: [&str; 11] = [
    "method",
    "prior",
    "lambda",
    "lambda_grid",
    "basis",
    "max_iters",
    "tol",
    "inertia",
    "initial_step",
    "shrink",
    "sufficient_decrease",
];

fn parse_inertia(s: &Section<'_>) -> Result<Inertia> {
    match s.raw("inertia") {
        None | Some("fista") => Ok(Inertia::Fista),
        Some("zero") => Ok(Inertia::Zero),
        Some(v) => v
            .parse::<f64>()
            .map(|alpha| Inertia::Constant { alpha })
            .map_err(|_| s.error("inertia", format!("`{v}`: expected fista, zero or a number in [0, 1)"))),
    }
}

/// Builds a method from a section; the label defaults to `default_label`.
pub fn method_spec(s: &Section<'_>, default_label: &str) -> Result<MethodSpec> {
    let method: Method = s
        .parse("method")?
        .ok_or_else(|| s.error("method", "missing; expected am, fistaph or mag2_pg".into()))?;
    let kind: PriorKind = s.parse_or("prior", PriorKind::L1WithSupport)?;
    let lambda: f64 = s.parse_or("lambda", DEFAULT_LAMBDA)?;
    let basis = match s.raw("basis") {
        None | Some("dct") => BasisChoice::Dct,
        Some("identity") => BasisChoice::Identity,
        Some(v) => return Err(s.error("basis", format!("`{v}`: expected dct or identity"))),
    };
    let prior = match kind {
        PriorKind::None => PriorTemplate::None,
        PriorKind::L1 => PriorTemplate::L1 { lambda },
        PriorKind::L0TopK => PriorTemplate::L0TopK,
        PriorKind::SupportOnly => PriorTemplate::SupportOnly,
        PriorKind::L1WithSupport => PriorTemplate::L1WithSupport { lambda },
        PriorKind::L0WithSupport => PriorTemplate::L0WithSupport,
        PriorKind::BasisL1 => PriorTemplate::BasisL1 { lambda, basis },
    };
    for key in ["lambda", "lambda_grid"] {
        if s.raw(key).is_some() && prior.lambda().is_none() {
            return Err(s.error(key, format!("prior {kind} has no lambda")));
        }
    }
    if s.raw("basis").is_some() && kind != PriorKind::BasisL1 {
        return Err(s.error("basis", format!("only used by basis_l1, not {kind}")));
    }

    let mut spec = MethodSpec::new(default_label, method, prior);
    spec.max_iters = s.parse_or("max_iters", spec.max_iters)?;
    spec.tol = s.parse_or("tol", spec.tol)?;
    spec.inertia = parse_inertia(s)?;
    spec.step_rule.initial_step = s.parse_or("initial_step", spec.step_rule.initial_step)?;
    spec.step_rule.shrink = s.parse_or("shrink", spec.step_rule.shrink)?;
    spec.step_rule.sufficient_decrease = s.parse_or("sufficient_decrease", spec.step_rule.sufficient_decrease)?;
    spec.lambda_grid = s.list("lambda_grid")?.unwrap_or_default();
    if let Some(first) = spec.lambda_grid.first() {
        spec.prior = spec.prior.with_lambda(*first)?;
    }
    // catch bad values here rather than deep inside a grid run
    spec.solver_config(8, 1).map_err(|e| s.error("method", e.to_string()))?;
    Ok(spec)
}

/// A benchmark grid: every method × n × SNR × K.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    pub snrs: Vec<f64>,
    pub trials: usize,
    pub restarts: usize,
    pub seed: u64,
    pub timing: Timing,
    pub methods: Vec<MethodSpec>,
}

const BENCH_KEYS: [&str; 7] = ["n", "k", "snr_db", "trials", "restarts", "seed", "timing"];

impl BenchConfig {
    pub fn from_file(file: &ConfigFile) -> Result<Self> {
        file.expect_sections(
            |name| name == "bench" || name.starts_with("method."),
            "[bench] and [method.<label>]",
        )?;
        let bench = file.require("bench")?;
        bench.expect_keys(&BENCH_KEYS)?;
        let timing = match bench.raw("timing") {
            None | Some("cpu") => Timing::Cpu,
            Some("off") => Timing::Off,
            Some(v) => return Err(bench.error("timing", format!("`{v}`: expected cpu or off"))),
        };

        let mut methods = Vec::new();
        for name in file.section_names() {
            let Some(label) = name.strip_prefix("method.") else {
                continue;
            };
            let section = file.section(name).expect("listed section");
            if label.is_empty() || label.contains([',', '"']) {
                return Err(section.error("method", format!("invalid label `{label}`")));
            }
            section.expect_keys(&METHOD_KEYS)?;
            methods.push(method_spec(&section, label)?);
        }
        if methods.is_empty() {
            return Err(file.error(0, "no [method.<label>] sections".into()));
        }

        let cfg = BenchConfig {
            ns: bench.list("n")?.unwrap_or_else(|| vec![64]),
            ks: bench.list("k")?.unwrap_or_else(|| vec![2, 3, 4]),
            snrs: bench.list("snr_db")?.unwrap_or_else(|| vec![f64::INFINITY]),
            trials: bench.parse_or("trials", 20)?,
            restarts: bench.parse_or("restarts", 50)?,
            seed: bench.parse_or("seed", 0)?,
            timing,
            methods,
        };
        for e in cfg.grid() {
            e.validate().map_err(|err| bench.error("k", err.to_string()))?;
        }
        Ok(cfg)
    }

    /// Cells ordered by method, then n, SNR and K.
    pub fn grid(&self) -> Vec<ExperimentConfig> {
        let mut out = Vec::new();
        for m in &self.methods {
            for &n in &self.ns {
                for &snr in &self.snrs {
                    for &k in &self.ks {
                        let mut e = ExperimentConfig::new(m.clone(), n, k, snr, self.seed);
                        e.trials = self.trials;
                        e.restarts = self.restarts;
                        e.timing = self.timing;
                        out.push(e);
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    Random,
    Truth,
    Zero,
}

/// A single solve: a generated or supplied instance and one method.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub n: usize,
    pub k: usize,
    pub snr_db: f64,
    pub seed: u64,
    pub measurements: Option<PathBuf>,
    pub init: InitMode,
    pub restarts: usize,
    pub truncate: bool,
    pub method: MethodSpec,
}

const PROBLEM_KEYS: [&str; 8] = [
    "n",
    "k",
    "snr_db",
    "seed",
    "measurements",
    "init",
    "restarts",
    "truncate",
];

impl SolveConfig {
    pub fn from_file(file: &ConfigFile) -> Result<Self> {
        file.expect_sections(|name| name == "problem" || name == "solver", "[problem] and [solver]")?;
        let problem = file.require("problem")?;
        problem.expect_keys(&PROBLEM_KEYS)?;
        let solver = file.require("solver")?;
        solver.expect_keys(&METHOD_KEYS)?;

        let init = match problem.raw("init") {
            None | Some("random") => InitMode::Random,
            Some("truth") => InitMode::Truth,
            Some("zero") => InitMode::Zero,
            Some(v) => return Err(problem.error("init", format!("`{v}`: expected random, truth or zero"))),
        };
        // relative measurement paths are resolved against the config file
        let measurements = problem.raw("measurements").map(|p| {
            let p = PathBuf::from(p);
            match file.path.parent() {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p,
            }
        });
        if measurements.is_some() && init == InitMode::Truth {
            return Err(problem.error("init", "truth is only available for generated instances".into()));
        }
        let method = method_spec(&solver, "solve")?;
        let label = format!("{}_{}", method.method.name(), kind_of(&method.prior));
        let cfg = SolveConfig {
            n: problem.parse_or("n", 32)?,
            k: problem.parse_or("k", 2)?,
            snr_db: problem.parse_or("snr_db", f64::INFINITY)?,
            seed: problem.parse_or("seed", 0)?,
            measurements,
            init,
            restarts: problem.parse_or("restarts", 1)?,
            truncate: problem.parse_or("truncate", false)?,
            method: MethodSpec { label, ..method },
        };
        if cfg.restarts == 0 {
            return Err(problem.error("restarts", "must be at least 1".into()));
        }
        Ok(cfg)
    }
}

fn kind_of(prior: &PriorTemplate) -> &'static str {
    match prior {
        PriorTemplate::None => PriorKind::None.name(),
        PriorTemplate::L1 { .. } => PriorKind::L1.name(),
        PriorTemplate::L0TopK => PriorKind::L0TopK.name(),
        PriorTemplate::SupportOnly => PriorKind::SupportOnly.name(),
        PriorTemplate::L1WithSupport { .. } => PriorKind::L1WithSupport.name(),
        PriorTemplate::L0WithSupport => PriorKind::L0WithSupport.name(),
        PriorTemplate::BasisL1 { .. } => PriorKind::BasisL1.name(),
    }
}
