use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eigen::EigenConfig;
use crate::error::{Error, Result};
use crate::ground_state::Potential;
use crate::mesh::Mesh1D;

pub const DEFAULT_S_GRID: [f64; 6] = [0.6, 0.7, 0.8, 0.9, 0.95, 0.99];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Eigen,
    GroundState,
    GammaCheck,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Eigen, Mode::GroundState, Mode::GammaCheck];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Eigen => "eigen",
            Mode::GroundState => "ground-state",
            Mode::GammaCheck => "gamma-check",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown mode '{s}' (expected eigen, ground-state or gamma-check)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format '{s}' (expected csv or json)"))),
        }
    }
}

/// Serializable description of a [`Potential`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialSpec {
    None,
    Constant(f64),
    Polynomial(Vec<f64>),
}

impl PotentialSpec {
    pub fn to_potential(&self) -> Potential {
        match self {
            PotentialSpec::None => Potential::Zero,
            PotentialSpec::Constant(c) => Potential::Constant(*c),
            PotentialSpec::Polynomial(c) => Potential::Polynomial(c.clone()),
        }
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::None => f.write_str("none"),
            PotentialSpec::Constant(c) => write!(f, "constant:{c}"),
            PotentialSpec::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(f64::to_string).collect();
                write!(f, "polynomial:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for PotentialSpec {
    type Err = Error;

    /// `none`, `constant:<c>` or `polynomial:<c0>,<c1>,...`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            return Ok(PotentialSpec::None);
        }
        let bad = || Error::Config(format!("bad potential '{s}' (expected none, constant:<c> or polynomial:<c0>,<c1>,...)"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "constant" => Ok(PotentialSpec::Constant(parse_real("potential", rest)?)),
            "polynomial" => Ok(PotentialSpec::Polynomial(parse_list("potential", rest)?)),
            _ => Err(bad()),
        }
    }
}

/// Reads a config file into a string.
pub fn read_config(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_real(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: '{value}' is not a real number")))?;
    if !v.is_finite() {
        return Err(Error::Config(format!("{key}: '{value}' is not finite")));
    }
    Ok(v)
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    if value.trim().is_empty() {
        return Err(Error::Config(format!("{key}: empty list")));
    }
    value.split(',').map(|v| parse_real(key, v)).collect()
}

fn parse_integer<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: '{value}' is not a nonnegative integer")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::Config(format!("{key}: '{value}' is not true or false"))),
    }
}

/// Keys accepted by [`SweepConfig::set`], shared by config files and CLI flags.
pub const KEYS: [&str; 15] = [
    "mode",
    "a",
    "b",
    "n",
    "p",
    "q",
    "s-grid",
    "tol",
    "step-tol",
    "max-iterations",
    "seed",
    "potential",
    "out",
    "format",
    "timing",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub mode: Mode,
    pub a: f64,
    pub b: f64,
    pub num_elements: usize,
    pub p: f64,
    pub q: f64,
    pub s_grid: Vec<f64>,
    pub solver: EigenConfig,
    pub potential: PotentialSpec,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Record wall times; off by default so that reports are reproducible.
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Eigen,
            a: 0.0,
            b: 1.0,
            num_elements: 256,
            p: 2.0,
            q: 4.0,
            s_grid: DEFAULT_S_GRID.to_vec(),
            solver: EigenConfig::default(),
            potential: PotentialSpec::None,
            out: None,
            format: Format::Csv,
            timing: false,
        }
    }
}

impl SweepConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "mode" => self.mode = value.parse()?,
            "a" => self.a = parse_real(key, value)?,
            "b" => self.b = parse_real(key, value)?,
            "n" => self.num_elements = parse_integer(key, value)?,
            "p" => self.p = parse_real(key, value)?,
            "q" => self.q = parse_real(key, value)?,
            "s-grid" => self.s_grid = parse_list(key, value)?,
            "tol" => self.solver.residual_tolerance = parse_real(key, value)?,
            "step-tol" => self.solver.step_tolerance = parse_real(key, value)?,
            "max-iterations" => self.solver.max_iterations = parse_integer(key, value)?,
            "seed" => self.solver.random_seed = parse_integer(key, value)?,
            "potential" => self.potential = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "timing" => self.timing = parse_bool(key, value)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines over the defaults. Blank lines and lines
    /// starting with `#` are ignored; unknown and repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        config.apply_text(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Applies `key = value` lines to `self` without validating the result.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen: Vec<&str> = Vec::new();
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", number + 1)))?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(Error::Config(format!("line {}: key '{key}' repeated", number + 1)));
            }
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {}", number + 1, strip_prefix(&e))))?;
            seen.push(key);
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&read_config(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a < self.b) {
            return Err(Error::Config(format!("a = {} must be below b = {}", self.a, self.b)));
        }
        if self.num_elements < 2 {
            return Err(Error::Config("n must be at least 2".into()));
        }
        if !(self.p > 1.0) {
            return Err(Error::Config(format!("p = {} must exceed 1", self.p)));
        }
        if self.mode == Mode::GroundState && !(self.q > self.p) {
            return Err(Error::Config(format!("q = {} must exceed p = {}", self.q, self.p)));
        }
        if self.s_grid.is_empty() {
            return Err(Error::Config("s-grid is empty".into()));
        }
        if let Some(s) = self.s_grid.iter().find(|&&s| !(s > 0.0 && s < 1.0)) {
            return Err(Error::Config(format!("s-grid value {s} is outside (0, 1)")));
        }
        if self.s_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("s-grid must be strictly increasing".into()));
        }
        if let PotentialSpec::Constant(c) = self.potential {
            if c < 0.0 {
                return Err(Error::Config(format!("constant potential {c} is negative")));
            }
        }
        self.solver.validate().map_err(|e| Error::Config(strip_prefix(&e)))
    }

    pub fn mesh(&self) -> Result<Mesh1D> {
        Mesh1D::new(self.a, self.b, self.num_elements)
    }

    /// `key = value` lines that [`SweepConfig::parse`] maps back to `self`.
    pub fn to_kv_string(&self) -> String {
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let mut lines = vec![
            format!("mode = {}", self.mode),
            format!("a = {}", self.a),
            format!("b = {}", self.b),
            format!("n = {}", self.num_elements),
            format!("p = {}", self.p),
            format!("q = {}", self.q),
            format!("s-grid = {}", list(&self.s_grid)),
            format!("tol = {}", self.solver.residual_tolerance),
            format!("step-tol = {}", self.solver.step_tolerance),
            format!("max-iterations = {}", self.solver.max_iterations),
            format!("seed = {}", self.solver.random_seed),
            format!("potential = {}", self.potential),
            format!("format = {}", self.format),
            format!("timing = {}", self.timing),
        ];
        if let Some(out) = &self.out {
            lines.push(format!("out = {}", out.display()));
        }
        lines.join("\n") + "\n"
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(msg) | Error::Domain(msg) => msg.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = SweepConfig::parse("").unwrap();
        assert_eq!(c, SweepConfig::default());
        assert_eq!(c.s_grid, vec![0.6, 0.7, 0.8, 0.9, 0.95, 0.99]);
        assert_eq!(c.solver.residual_tolerance, 1e-8);
    }

    #[test]
    fn parse_all_keys() {
        let text = "# comment\n\nmode = ground-state\na=-1\nb = 2\nn = 64\np = 2.5\nq = 5\n\
                    s-grid = 0.5, 0.75,0.9\ntol = 1e-9\nstep-tol = 1e-12\nmax-iterations = 100\n\
                    seed = 7\npotential = polynomial:1,0,2\nout = r.csv\nformat = json\ntiming = true\n";
        let c = SweepConfig::parse(text).unwrap();
        assert_eq!(c.mode, Mode::GroundState);
        assert_eq!((c.a, c.b, c.num_elements, c.p, c.q), (-1.0, 2.0, 64, 2.5, 5.0));
        assert_eq!(c.s_grid, vec![0.5, 0.75, 0.9]);
        assert_eq!(c.solver.residual_tolerance, 1e-9);
        assert_eq!(c.solver.step_tolerance, 1e-12);
        assert_eq!(c.solver.max_iterations, 100);
        assert_eq!(c.solver.random_seed, 7);
        assert_eq!(c.potential, PotentialSpec::Polynomial(vec![1.0, 0.0, 2.0]));
        assert_eq!(c.out, Some(PathBuf::from("r.csv")));
        assert_eq!(c.format, Format::Json);
        assert!(c.timing);
        assert_eq!(SweepConfig::parse(&c.to_kv_string()).unwrap(), c);
    }

    #[test]
    fn rejections() {
        for text in [
            "colour = red",
            "s-grid =",
            "s-grid = 0.9, 0.8",
            "s-grid = 0.5, 1.0",
            "s-grid = 0.5, 0.5",
            "n = 1",
            "n = -3",
            "p = 1",
            "a = 1\nb = 0",
            "tol = 0",
            "tol = nan",
            "p = 2\np = 3",
            "mode = heat",
            "format = xml",
            "potential = cubic:1",
            "potential = constant:-1",
            "timing = yes",
            "just text",
            "mode = ground-state\nq = 2",
        ] {
            assert!(matches!(SweepConfig::parse(text), Err(Error::Config(_))), "{text:?} accepted");
        }
        // q only matters for ground-state runs
        assert!(SweepConfig::parse("q = 2").is_ok());
    }

    #[test]
    fn errors_name_the_line() {
        let err = SweepConfig::parse("n = 8\nbogus = 1").unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("bogus"), "{err}");
    }

    #[test]
    fn potential_descriptors() {
        for text in ["none", "constant:1.5", "polynomial:1,-2,3"] {
            let spec: PotentialSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert_eq!(
            "polynomial:1,2".parse::<PotentialSpec>().unwrap().to_potential().eval(3.0),
            7.0
        );
    }
}
