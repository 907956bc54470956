use serde::{Deserialize, Deserializer, Serialize};

use crate::budget::Budgets;
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    UniformRandom,
    Interval,
    ArithmeticProgression,
    GeometricProgression,
    MultiplicativeSubgroup,
    SubfieldCoset,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::UniformRandom,
        Family::Interval,
        Family::ArithmeticProgression,
        Family::GeometricProgression,
        Family::MultiplicativeSubgroup,
        Family::SubfieldCoset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::UniformRandom => "uniform_random",
            Family::Interval => "interval",
            Family::ArithmeticProgression => "arithmetic_progression",
            Family::GeometricProgression => "geometric_progression",
            Family::MultiplicativeSubgroup => "multiplicative_subgroup",
            Family::SubfieldCoset => "subfield_coset",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Sl2Product,
    Heis2Zero,
    Heis2Full,
    Heis1,
    Energies,
    Incidence,
    Inequalities,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Sl2Product,
        Experiment::Heis2Zero,
        Experiment::Heis2Full,
        Experiment::Heis1,
        Experiment::Energies,
        Experiment::Incidence,
        Experiment::Inequalities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Sl2Product => "sl2_product",
            Experiment::Heis2Zero => "heis2_zero",
            Experiment::Heis2Full => "heis2_full",
            Experiment::Heis1 => "heis1",
            Experiment::Energies => "energies",
            Experiment::Incidence => "incidence",
            Experiment::Inequalities => "inequalities",
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

fn default_n() -> u32 {
    1
}

fn default_trials() -> u32 {
    1
}

fn default_true() -> bool {
    true
}

fn default_k() -> usize {
    2
}

/// Experiment description, read from TOML:
///
/// ```toml
/// p = 401
/// family = ["interval", "uniform_random"]
/// sizes = [6, 8, 10, 12]
/// trials = 2
/// seed = 7
/// experiment = "sl2_product"
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: u64,
    #[serde(default = "default_n")]
    pub n: u32,
    #[serde(deserialize_with = "one_or_many")]
    pub family: Vec<Family>,
    pub sizes: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: u32,
    pub seed: u64,
    #[serde(deserialize_with = "one_or_many")]
    pub experiment: Vec<Experiment>,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default = "default_true")]
    pub exclude_zero: bool,
    /// Number of summands `B_i` in the inequalities experiment.
    #[serde(default = "default_k")]
    pub k: usize,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.family.is_empty() {
            return bad("no family given".into());
        }
        if self.experiment.is_empty() {
            return bad("no experiment given".into());
        }
        if self.sizes.is_empty() {
            return bad("no sizes given".into());
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if !(1..=8).contains(&self.k) {
            return bad(format!("k = {} outside 1..=8", self.k));
        }
        crate::field::make_field(self.p, self.n)?;
        let max = self.sizes.iter().copied().max().unwrap_or(0);
        let b = &self.budgets;
        for e in &self.experiment {
            let limit = match e {
                Experiment::Sl2Product => {
                    if self.n != 1 {
                        return Err(Error::NotPrimeField("SL2 experiments"));
                    }
                    b.sl2_max_size
                }
                Experiment::Heis2Zero | Experiment::Heis2Full | Experiment::Heis1 => b.heis_max_size,
                _ => usize::MAX,
            };
            if max > limit {
                return bad(format!("size {max} exceeds the {} budget of {limit}", e.name()));
            }
        }
        Ok(())
    }
}
