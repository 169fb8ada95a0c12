//! Command-line grammar.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fselect_core::engine::DEFAULT_PAR_THRESHOLD;
use fselect_core::DiscretizeMethod;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Parser)]
#[command(name = "fselect", version, about = "Feature ranking by Cramer's V association and redundancy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank features and write the selection report.
    Rank(CommonArgs),
    /// Cross-validate naive Bayes accuracy over ranking prefixes.
    Cv(CommonArgs),
    /// Time end-to-end selection across worker counts.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Headed CSV file.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,

    /// Label column, by header name or zero-based index. Defaults to the last column.
    #[arg(long, value_name = "NAME|INDEX")]
    pub label_col: Option<String>,

    /// Field delimiter: a single character, or `tab`.
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: u8,

    #[arg(long, value_enum, default_value_t = Method::Mmaiq)]
    pub method: Method,

    /// Redundancy weight for mmais. Ignored by mmaiq.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,

    /// Number of features to rank, or `auto` to pick it by cross-validation.
    /// Defaults to all features.
    #[arg(long, value_name = "INT|auto")]
    pub k: Option<KArg>,

    /// Bins per numeric feature.
    #[arg(long, default_value_t = 16)]
    pub bins: usize,

    #[arg(long, value_enum, default_value_t = Discretizer::EqualFrequency)]
    pub discretizer: Discretizer,

    /// Cross-validation folds.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,

    /// Seed for fold assignment.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Worker threads. Defaults to the available parallelism.
    #[arg(long, env = "FSELECT_WORKERS")]
    pub threads: Option<usize>,

    /// Batches at or below this size run inline.
    #[arg(long, default_value_t = DEFAULT_PAR_THRESHOLD)]
    pub par_threshold: usize,

    /// Re-run selection on each training split instead of once on all rows.
    #[arg(long)]
    pub cv_reselect: bool,

    /// Output file. Defaults to standard output.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Timed runs per worker count.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,

    /// Comma-separated worker counts.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    pub workers_list: Vec<usize>,

    /// Rows of the generated dataset when no input is given.
    #[arg(long, default_value_t = 20_000)]
    pub synth_rows: usize,

    /// Features of the generated dataset when no input is given.
    #[arg(long, default_value_t = 200)]
    pub synth_features: usize,

    /// Classes of the generated dataset when no input is given.
    #[arg(long, default_value_t = 8)]
    pub synth_classes: usize,

    /// Informative features of the generated dataset when no input is given.
    #[arg(long, default_value_t = 20)]
    pub synth_informative: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Mmaiq,
    Mmais,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Discretizer {
    EqualFrequency,
    EqualWidth,
    Passthrough,
}

impl From<Discretizer> for DiscretizeMethod {
    fn from(d: Discretizer) -> Self {
        match d {
            Discretizer::EqualFrequency => DiscretizeMethod::EqualFrequency,
            Discretizer::EqualWidth => DiscretizeMethod::EqualWidth,
            Discretizer::Passthrough => DiscretizeMethod::Passthrough,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Requested subset size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KArg {
    Auto,
    Count(usize),
}

impl FromStr for KArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(KArg::Auto);
        }
        s.parse()
            .map(KArg::Count)
            .map_err(|_| format!("expected a non-negative integer or `auto`, got `{s}`"))
    }
}

impl fmt::Display for KArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KArg::Auto => f.write_str("auto"),
            KArg::Count(k) => write!(f, "{k}"),
        }
    }
}

impl Serialize for KArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            KArg::Auto => s.serialize_str("auto"),
            KArg::Count(k) => s.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for KArg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(usize),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(k) => Ok(KArg::Count(k)),
            Raw::Word(w) if w == "auto" => Ok(KArg::Auto),
            Raw::Word(w) => Err(serde::de::Error::custom(format!("invalid k `{w}`"))),
        }
    }
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        _ if s.len() == 1 => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be a single ASCII character or `tab`, got `{s}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_parsing() {
        assert_eq!("auto".parse::<KArg>(), Ok(KArg::Auto));
        assert_eq!("7".parse::<KArg>(), Ok(KArg::Count(7)));
        assert!("-1".parse::<KArg>().is_err());
        for k in [KArg::Auto, KArg::Count(3)] {
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(serde_json::from_str::<KArg>(&json).unwrap(), k);
        }
    }

    #[test]
    fn delimiters() {
        assert_eq!(parse_delimiter(";"), Ok(b';'));
        assert_eq!(parse_delimiter("tab"), Ok(b'\t'));
        assert!(parse_delimiter(";;").is_err());
    }

    #[test]
    fn grammar_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
