//! Run configuration and its `key = value` file form.

use std::fmt;
use std::str::FromStr;

use symdet_core::oracle::claims::DEFAULT_SEED;
use symdet_core::resolvent::{OperatorKind, Recursion};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Latex,
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PathChoice {
    FeynmanFp,
    OperatorIdentity,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum RecursionChoice {
    Full,
    LeadingBracket,
}

impl From<RecursionChoice> for Recursion {
    fn from(r: RecursionChoice) -> Self {
        match r {
            RecursionChoice::Full => Recursion::Full,
            RecursionChoice::LeadingBracket => Recursion::LeadingBracket,
        }
    }
}

fn value_name<T: clap::ValueEnum>(v: &T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn parse_value<T: clap::ValueEnum>(s: &str) -> Result<T, String> {
    T::from_str(s, true)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub operator: Option<OperatorKind>,
    pub order: usize,
    pub dimension: u32,
    pub substitute: Option<String>,
    pub format: OutputFormat,
    pub path: PathChoice,
    pub recursion: RecursionChoice,
    pub seed: u64,
    pub tol: Option<f64>,
    pub coupling: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            operator: None,
            order: 2,
            dimension: 4,
            substitute: None,
            format: OutputFormat::Latex,
            path: PathChoice::FeynmanFp,
            recursion: RecursionChoice::Full,
            seed: DEFAULT_SEED,
            tol: None,
            coupling: None,
        }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(op) = self.operator {
            let name = match op {
                OperatorKind::Boson => "boson",
                OperatorKind::Dirac => "dirac",
            };
            writeln!(f, "operator = {name}")?;
        }
        writeln!(f, "order = {}", self.order)?;
        writeln!(f, "dimension = {}", self.dimension)?;
        if let Some(s) = &self.substitute {
            writeln!(f, "substitute = {s}")?;
        }
        writeln!(f, "format = {}", value_name(&self.format))?;
        writeln!(f, "path = {}", value_name(&self.path))?;
        writeln!(f, "recursion = {}", value_name(&self.recursion))?;
        writeln!(f, "seed = {}", self.seed)?;
        if let Some(t) = self.tol {
            writeln!(f, "tol = {t:e}")?;
        }
        if let Some(c) = &self.coupling {
            writeln!(f, "coupling = {c}")?;
        }
        Ok(())
    }
}

impl FromStr for RunConfig {
    type Err = String;

    /// One `key = value` per line; blank lines and `#` comments are skipped.
    fn from_str(src: &str) -> Result<Self, String> {
        let mut c = RunConfig::default();
        for (n, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            let (k, v) = (k.trim(), v.trim());
            let bad = |e: &dyn fmt::Display| format!("line {}: {k}: {e}", n + 1);
            match k {
                "operator" => {
                    c.operator = Some(match v {
                        "boson" => OperatorKind::Boson,
                        "dirac" => OperatorKind::Dirac,
                        _ => return Err(bad(&"expected boson or dirac")),
                    })
                }
                "order" => c.order = v.parse().map_err(|e| bad(&e))?,
                "dimension" => c.dimension = v.parse().map_err(|e| bad(&e))?,
                "substitute" => c.substitute = Some(v.to_string()),
                "format" => c.format = parse_value(v).map_err(|e| bad(&e))?,
                "path" => c.path = parse_value(v).map_err(|e| bad(&e))?,
                "recursion" => c.recursion = parse_value(v).map_err(|e| bad(&e))?,
                "seed" => c.seed = v.parse().map_err(|e| bad(&e))?,
                "tol" => c.tol = Some(v.parse().map_err(|e| bad(&e))?),
                "coupling" => c.coupling = Some(v.to_string()),
                _ => return Err(format!("line {}: unknown key '{k}'", n + 1)),
            }
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = RunConfig {
            operator: Some(OperatorKind::Dirac),
            order: 1,
            substitute: Some("V=lc*phi^2/2".into()),
            format: OutputFormat::Json,
            path: PathChoice::Both,
            recursion: RecursionChoice::LeadingBracket,
            seed: 42,
            tol: Some(1e-9),
            coupling: Some("gt".into()),
            ..RunConfig::default()
        };
        assert_eq!(c.to_string().parse::<RunConfig>().unwrap(), c);
        assert_eq!(RunConfig::default().to_string().parse::<RunConfig>().unwrap(), RunConfig::default());
    }

    #[test]
    fn comments_and_errors() {
        let c: RunConfig = "# defaults\n\norder = 0\n".parse().unwrap();
        assert_eq!(c.order, 0);
        assert!("order: 2".parse::<RunConfig>().is_err());
        assert!("colour = red".parse::<RunConfig>().is_err());
        assert!("path = sideways".parse::<RunConfig>().is_err());
    }
}
