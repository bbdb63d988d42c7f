//! Household covariates and village membership.
//!
//! The covariate file is delimited text with a header row; one row per
//! household. Category fields are stored as lowercase tokens, booleans as
//! 0/1. Villages are the unit of observation: ordered lists of households
//! with stable in-village indices.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{lane, stream};

/// Parent education, four closed categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Education {
    None,
    Primary,
    Secondary,
    University,
}

impl Education {
    pub const ALL: [Education; 4] = [
        Education::None,
        Education::Primary,
        Education::Secondary,
        Education::University,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Education::None => "none",
            Education::Primary => "primary",
            Education::Secondary => "secondary",
            Education::University => "university",
        }
    }

    pub fn parse(token: &str) -> Option<Education> {
        Self::ALL.iter().copied().find(|e| e.token() == token)
    }
}

impl fmt::Display for Education {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Father's occupation, four closed categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Occupation {
    DailyLaborer,
    Farmer,
    SelfEmployed,
    Other,
}

impl Occupation {
    pub const ALL: [Occupation; 4] = [
        Occupation::DailyLaborer,
        Occupation::Farmer,
        Occupation::SelfEmployed,
        Occupation::Other,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Occupation::DailyLaborer => "daily_laborer",
            Occupation::Farmer => "farmer",
            Occupation::SelfEmployed => "self_employed",
            Occupation::Other => "other",
        }
    }

    pub fn parse(token: &str) -> Option<Occupation> {
        Self::ALL.iter().copied().find(|o| o.token() == token)
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One family's covariate record.
#[derive(Clone, Debug, PartialEq)]
pub struct Household {
    pub village_id: u32,
    pub household_id: u32,
    pub has_boy: bool,
    pub has_girl: bool,
    pub father_age: u32,
    pub mother_age: u32,
    /// Thousands of Taka.
    pub income: f64,
    /// Thousands of hectares.
    pub homestead_land: f64,
    /// Thousands of hectares.
    pub farming_land: f64,
    pub father_education: Education,
    pub mother_education: Education,
    pub father_occupation: Occupation,
    pub mother_stays_home: bool,
}

impl Household {
    /// Every sampled family has at least one child in the age band, and
    /// numeric covariates are non-negative.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !self.has_boy && !self.has_girl {
            return Err("household has neither a boy nor a girl".into());
        }
        for (name, v) in [
            ("income", self.income),
            ("homestead_land", self.homestead_land),
            ("farming_land", self.farming_land),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(format!("{name} must be a non-negative finite number, got {v}"));
            }
        }
        Ok(())
    }
}

/// One village: the unit of observation.
#[derive(Clone, Debug, PartialEq)]
pub struct Village {
    pub village_id: u32,
    pub households: Vec<Household>,
}

impl Village {
    pub fn new(village_id: u32, households: Vec<Household>) -> Result<Village> {
        if households.len() < 2 {
            return Err(Error::VillageTooSmall {
                village_id,
                n: households.len(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for h in &households {
            if !seen.insert(h.household_id) {
                return Err(Error::DuplicateHousehold {
                    village_id,
                    household_id: h.household_id,
                });
            }
        }
        Ok(Village {
            village_id,
            households,
        })
    }

    pub fn n(&self) -> usize {
        self.households.len()
    }

    /// In-village index of a household id.
    pub fn index_of(&self, household_id: u32) -> Option<usize> {
        self.households
            .iter()
            .position(|h| h.household_id == household_id)
    }
}

const COLUMNS: [&str; 13] = [
    "village_id",
    "household_id",
    "has_boy",
    "has_girl",
    "father_age",
    "mother_age",
    "income",
    "homestead_land",
    "farming_land",
    "father_education",
    "mother_education",
    "father_occupation",
    "mother_stays_home",
];

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim() {
        "0" | "false" => Some(false),
        "1" | "true" => Some(true),
        _ => None,
    }
}

/// Loads and validates a covariate file, grouping rows into villages ordered
/// by id. Every row is either consumed or rejected with a line-numbered error.
pub fn load_households(path: &Path) -> Result<Vec<Village>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?
        .clone();
    let mut index = Vec::with_capacity(COLUMNS.len());
    for col in COLUMNS {
        match headers.iter().position(|h| h == col) {
            Some(i) => index.push(i),
            None => return Err(Error::MissingColumn { column: col.into() }),
        }
    }

    let mut grouped: BTreeMap<u32, Vec<Household>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::io(path, std::io::Error::other(e)))?;
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or_default();
        let field = |i: usize| -> &str { record.get(index[i]).unwrap_or("") };
        let bad = |msg: String| Error::InvalidRow { line, message: msg };

        macro_rules! num {
            ($i:expr, $ty:ty, $name:expr) => {
                field($i)
                    .parse::<$ty>()
                    .map_err(|_| bad(format!("column '{}': cannot parse '{}'", $name, field($i))))?
            };
        }

        let household = Household {
            village_id: num!(0, u32, "village_id"),
            household_id: num!(1, u32, "household_id"),
            has_boy: parse_bool(field(2))
                .ok_or_else(|| bad(format!("column 'has_boy': cannot parse '{}'", field(2))))?,
            has_girl: parse_bool(field(3))
                .ok_or_else(|| bad(format!("column 'has_girl': cannot parse '{}'", field(3))))?,
            father_age: num!(4, u32, "father_age"),
            mother_age: num!(5, u32, "mother_age"),
            income: num!(6, f64, "income"),
            homestead_land: num!(7, f64, "homestead_land"),
            farming_land: num!(8, f64, "farming_land"),
            father_education: Education::parse(field(9)).ok_or_else(|| {
                bad(format!(
                    "column 'father_education': '{}' is not one of none/primary/secondary/university",
                    field(9)
                ))
            })?,
            mother_education: Education::parse(field(10)).ok_or_else(|| {
                bad(format!(
                    "column 'mother_education': '{}' is not one of none/primary/secondary/university",
                    field(10)
                ))
            })?,
            father_occupation: Occupation::parse(field(11)).ok_or_else(|| {
                bad(format!(
                    "column 'father_occupation': '{}' is not one of daily_laborer/farmer/self_employed/other",
                    field(11)
                ))
            })?,
            mother_stays_home: parse_bool(field(12)).ok_or_else(|| {
                bad(format!("column 'mother_stays_home': cannot parse '{}'", field(12)))
            })?,
        };
        household.validate().map_err(|m| bad(m))?;
        grouped
            .entry(household.village_id)
            .or_default()
            .push(household);
    }

    grouped
        .into_iter()
        .map(|(village_id, households)| Village::new(village_id, households))
        .collect()
}

/// Writes villages back to the covariate-file format. `load_households` on
/// the output reproduces the input exactly.
pub fn save_households(path: &Path, villages: &[Village]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&COLUMNS.join(","));
    out.push('\n');
    for village in villages {
        for h in &village.households {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                h.village_id,
                h.household_id,
                h.has_boy as u8,
                h.has_girl as u8,
                h.father_age,
                h.mother_age,
                h.income,
                h.homestead_land,
                h.farming_land,
                h.father_education,
                h.mother_education,
                h.father_occupation,
                h.mother_stays_home as u8,
            ));
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

/// Mean / SD / min / max of one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl SummaryRow {
    fn from_values(name: &str, values: impl Iterator<Item = f64>) -> SummaryRow {
        let values: Vec<f64> = values.collect();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        SummaryRow {
            name: name.into(),
            mean,
            sd: var.sqrt(),
            min,
            max,
        }
    }
}

/// Per-variable moments over all households plus the village-size
/// distribution.
#[derive(Clone, Debug)]
pub struct HouseholdSummary {
    pub rows: Vec<SummaryRow>,
    pub group_size: SummaryRow,
    pub villages: usize,
    pub households: usize,
}

pub fn summarize_households(villages: &[Village]) -> Result<HouseholdSummary> {
    if villages.is_empty() {
        return Err(Error::Other("no villages to summarize".into()));
    }
    let all: Vec<&Household> = villages.iter().flat_map(|v| &v.households).collect();
    let col = |name: &str, f: &dyn Fn(&Household) -> f64| {
        SummaryRow::from_values(name, all.iter().map(|h| f(h)))
    };

    let mut rows = vec![
        col("male_children", &|h| h.has_boy as u8 as f64),
        col("female_children", &|h| h.has_girl as u8 as f64),
        col("father_age", &|h| h.father_age as f64),
        col("mother_age", &|h| h.mother_age as f64),
        col("income", &|h| h.income),
        col("homestead_land", &|h| h.homestead_land),
        col("farming_land", &|h| h.farming_land),
    ];
    for edu in Education::ALL {
        rows.push(col(&format!("father_education_{edu}"), &|h| {
            (h.father_education == edu) as u8 as f64
        }));
    }
    for edu in Education::ALL {
        rows.push(col(&format!("mother_education_{edu}"), &|h| {
            (h.mother_education == edu) as u8 as f64
        }));
    }
    for occ in Occupation::ALL {
        rows.push(col(&format!("father_occupation_{occ}"), &|h| {
            (h.father_occupation == occ) as u8 as f64
        }));
    }
    rows.push(col("mother_stays_home", &|h| h.mother_stays_home as u8 as f64));

    Ok(HouseholdSummary {
        rows,
        group_size: SummaryRow::from_values(
            "group_size",
            villages.iter().map(|v| v.n() as f64),
        ),
        villages: villages.len(),
        households: all.len(),
    })
}

pub fn write_summary(path: &Path, header: &str, summary: &HouseholdSummary) -> Result<()> {
    let mut out = String::new();
    out.push_str(header);
    out.push_str("variable,mean,sd,min,max\n");
    for r in summary.rows.iter().chain(std::iter::once(&summary.group_size)) {
        out.push_str(&format!("{},{},{},{},{}\n", r.name, r.mean, r.sd, r.min, r.max));
    }
    out.push_str(&format!("villages,{},,,\n", summary.villages));
    out.push_str(&format!("households,{},,,\n", summary.households));
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// Marginal distribution for a continuous covariate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum Marginal {
    Uniform { lo: f64, hi: f64 },
    /// Draws are floored at zero to keep covariates valid.
    Normal { mean: f64, sd: f64 },
}

impl Marginal {
    fn validate(&self, name: &str) -> Result<()> {
        match *self {
            Marginal::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi < lo {
                    return Err(Error::Config(format!(
                        "{name}: uniform bounds must satisfy 0 <= lo <= hi, got [{lo}, {hi}]"
                    )));
                }
            }
            Marginal::Normal { mean, sd } => {
                if !(mean.is_finite() && sd.is_finite()) || sd < 0.0 {
                    return Err(Error::Config(format!(
                        "{name}: normal needs finite mean and sd >= 0, got ({mean}, {sd})"
                    )));
                }
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            Marginal::Uniform { lo, hi } => rng.random_range(lo..=hi),
            Marginal::Normal { mean, sd } => {
                if sd == 0.0 {
                    mean.max(0.0)
                } else {
                    Normal::new(mean, sd).expect("validated").sample(rng).max(0.0)
                }
            }
        }
    }
}

/// Integer age range, sampled uniformly (inclusive).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AgeRange {
    pub lo: u32,
    pub hi: u32,
}

impl AgeRange {
    fn validate(&self, name: &str) -> Result<()> {
        if self.lo > self.hi {
            return Err(Error::Config(format!(
                "{name}: age range lo must be <= hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

fn validate_probs(name: &str, probs: &[f64]) -> Result<()> {
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::Config(format!("{name}: probabilities must be non-negative")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "{name}: probabilities must sum to 1, got {total}"
        )));
    }
    Ok(())
}

fn sample_category(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Generator configuration: village count, size range, and independent
/// marginals for every covariate.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub villages: u32,
    pub size: AgeRange,
    /// P(household has a boy); boy/girl draws are independent and redrawn
    /// until at least one child is present.
    pub p_boy: f64,
    pub p_girl: f64,
    pub father_age: AgeRange,
    pub mother_age: AgeRange,
    pub income: Marginal,
    pub homestead_land: Marginal,
    pub farming_land: Marginal,
    /// none / primary / secondary / university.
    pub father_education: [f64; 4],
    pub mother_education: [f64; 4],
    /// daily_laborer / farmer / self_employed / other.
    pub father_occupation: [f64; 4],
    pub p_mother_stays_home: f64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.villages == 0 {
            return Err(Error::Config("villages must be >= 1".into()));
        }
        if self.size.lo < 2 {
            return Err(Error::Config(format!(
                "village size must be >= 2 (no dyads possible), got lo = {}",
                self.size.lo
            )));
        }
        self.size.validate("size")?;
        if self.size.hi > 64 {
            return Err(Error::Config(
                "village size above 64 exceeds the network representation".into(),
            ));
        }
        for (name, p) in [
            ("p_boy", self.p_boy),
            ("p_girl", self.p_girl),
            ("p_mother_stays_home", self.p_mother_stays_home),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        if self.p_boy == 0.0 && self.p_girl == 0.0 {
            return Err(Error::Config(
                "p_boy and p_girl cannot both be 0: every family has at least one child".into(),
            ));
        }
        self.father_age.validate("father_age")?;
        self.mother_age.validate("mother_age")?;
        self.income.validate("income")?;
        self.homestead_land.validate("homestead_land")?;
        self.farming_land.validate("farming_land")?;
        validate_probs("father_education", &self.father_education)?;
        validate_probs("mother_education", &self.mother_education)?;
        validate_probs("father_occupation", &self.father_occupation)?;
        Ok(())
    }

    /// A spec shaped like the original sample's marginals.
    pub fn sample_like() -> GeneratorSpec {
        GeneratorSpec {
            villages: 222,
            size: AgeRange { lo: 7, hi: 37 },
            p_boy: 0.5,
            p_girl: 0.5,
            father_age: AgeRange { lo: 20, hi: 50 },
            mother_age: AgeRange { lo: 18, hi: 40 },
            income: Marginal::Normal { mean: 11.2, sd: 5.06 },
            homestead_land: Marginal::Normal { mean: 0.084, sd: 0.114 },
            farming_land: Marginal::Normal { mean: 0.317, sd: 1.7 },
            father_education: [0.16, 0.32, 0.41, 0.11],
            mother_education: [0.08, 0.23, 0.62, 0.07],
            father_occupation: [0.35, 0.21, 0.31, 0.13],
            p_mother_stays_home: 0.93,
        }
    }
}

/// Generates villages from independent marginals. Deterministic given the
/// seed; per-village substreams make the output independent of iteration
/// order.
pub fn generate_synthetic(spec: &GeneratorSpec, seed: u64) -> Result<Vec<Village>> {
    spec.validate()?;
    let mut villages = Vec::with_capacity(spec.villages as usize);
    for village_id in 1..=spec.villages {
        let mut rng = stream(seed, &[lane::SYNTH, village_id as u64]);
        let n = rng.random_range(spec.size.lo..=spec.size.hi) as usize;
        let mut households = Vec::with_capacity(n);
        for household_id in 1..=n as u32 {
            let (has_boy, has_girl) = loop {
                let b = rng.random::<f64>() < spec.p_boy;
                let g = rng.random::<f64>() < spec.p_girl;
                if b || g {
                    break (b, g);
                }
            };
            households.push(Household {
                village_id,
                household_id,
                has_boy,
                has_girl,
                father_age: rng.random_range(spec.father_age.lo..=spec.father_age.hi),
                mother_age: rng.random_range(spec.mother_age.lo..=spec.mother_age.hi),
                income: spec.income.sample(&mut rng),
                homestead_land: spec.homestead_land.sample(&mut rng),
                farming_land: spec.farming_land.sample(&mut rng),
                father_education: Education::ALL[sample_category(&spec.father_education, &mut rng)],
                mother_education: Education::ALL[sample_category(&spec.mother_education, &mut rng)],
                father_occupation: Occupation::ALL[sample_category(&spec.father_occupation, &mut rng)],
                mother_stays_home: rng.random::<f64>() < spec.p_mother_stays_home,
            });
        }
        villages.push(Village::new(village_id, households)?);
    }
    Ok(villages)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_spec() -> GeneratorSpec {
        GeneratorSpec {
            villages: 20,
            size: AgeRange { lo: 5, hi: 9 },
            p_boy: 0.5,
            p_girl: 0.5,
            father_age: AgeRange { lo: 20, hi: 50 },
            mother_age: AgeRange { lo: 18, hi: 40 },
            income: Marginal::Uniform { lo: 2.0, hi: 20.0 },
            homestead_land: Marginal::Uniform { lo: 0.0, hi: 0.2 },
            farming_land: Marginal::Uniform { lo: 0.0, hi: 1.0 },
            father_education: [0.25, 0.25, 0.25, 0.25],
            mother_education: [0.1, 0.2, 0.6, 0.1],
            father_occupation: [0.35, 0.21, 0.31, 0.13],
            p_mother_stays_home: 0.9,
        }
    }

    #[test]
    fn generate_is_deterministic() {
        let a = generate_synthetic(&toy_spec(), 42).unwrap();
        let b = generate_synthetic(&toy_spec(), 42).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(&toy_spec(), 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generate_honors_degenerate_bernoulli() {
        let mut spec = toy_spec();
        spec.p_boy = 1.0;
        spec.p_girl = 0.0;
        let villages = generate_synthetic(&spec, 7).unwrap();
        assert!(villages
            .iter()
            .flat_map(|v| &v.households)
            .all(|h| h.has_boy && !h.has_girl));
    }

    #[test]
    fn generate_rejects_infeasible_spec() {
        let mut spec = toy_spec();
        spec.size = AgeRange { lo: 1, hi: 9 };
        assert!(matches!(generate_synthetic(&spec, 7), Err(Error::Config(_))));

        let mut spec = toy_spec();
        spec.p_boy = 0.0;
        spec.p_girl = 0.0;
        assert!(generate_synthetic(&spec, 7).is_err());
    }

    #[test]
    fn round_trip_through_file() {
        let villages = generate_synthetic(&toy_spec(), 11).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("households.csv");
        save_households(&path, &villages).unwrap();
        let loaded = load_households(&path).unwrap();
        assert_eq!(villages, loaded);
    }

    #[test]
    fn load_rejects_missing_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "village_id,household_id\n1,1\n").unwrap();
        match load_households(&path) {
            Err(Error::MissingColumn { column }) => assert_eq!(column, "has_boy"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
    }

    #[test]
    fn load_rejects_bad_category_with_line_number() {
        let villages = generate_synthetic(&toy_spec(), 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("households.csv");
        save_households(&path, &villages).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        text = text.replace("daily_laborer", "plumber");
        std::fs::write(&path, text).unwrap();
        match load_households(&path) {
            Err(Error::InvalidRow { line, message }) => {
                assert!(line >= 2);
                assert!(message.contains("father_occupation"));
            }
            other => panic!("expected InvalidRow, got {other:?}"),
        }
    }

    #[test]
    fn load_rejects_duplicate_household() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dup.csv");
        let header = super::COLUMNS.join(",");
        let row = "1,1,1,0,30,25,10,0.1,0.2,primary,primary,farmer,1";
        std::fs::write(&path, format!("{header}\n{row}\n{row}\n")).unwrap();
        assert!(matches!(
            load_households(&path),
            Err(Error::DuplicateHousehold { village_id: 1, household_id: 1 })
        ));
    }

    #[test]
    fn load_rejects_single_household_village() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.csv");
        let header = super::COLUMNS.join(",");
        let row = "1,1,1,0,30,25,10,0.1,0.2,primary,primary,farmer,1";
        std::fs::write(&path, format!("{header}\n{row}\n")).unwrap();
        assert!(matches!(
            load_households(&path),
            Err(Error::VillageTooSmall { village_id: 1, n: 1 })
        ));
    }

    #[test]
    fn summary_constant_column_has_zero_sd() {
        let mut villages = generate_synthetic(&toy_spec(), 5).unwrap();
        for v in &mut villages {
            for h in &mut v.households {
                h.income = 11.2;
            }
        }
        let summary = summarize_households(&villages).unwrap();
        let income = summary.rows.iter().find(|r| r.name == "income").unwrap();
        assert!((income.mean - 11.2).abs() < 1e-12);
        assert!(income.sd.abs() < 1e-12);
        assert_eq!(income.min, 11.2);
        assert_eq!(income.max, 11.2);
    }

    #[test]
    fn summary_is_permutation_invariant() {
        let villages = generate_synthetic(&toy_spec(), 9).unwrap();
        let mut shuffled = villages.clone();
        shuffled.reverse();
        for v in &mut shuffled {
            v.households.reverse();
        }
        let a = summarize_households(&villages).unwrap();
        let b = summarize_households(&shuffled).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.name, rb.name);
            assert!((ra.mean - rb.mean).abs() < 1e-12);
            assert!((ra.sd - rb.sd).abs() < 1e-12);
            assert_eq!(ra.min, rb.min);
            assert_eq!(ra.max, rb.max);
        }
    }

    #[test]
    fn synthetic_moments_match_generator() {
        // Uniform marginals have exact moments; compare at Monte Carlo scale.
        let mut spec = toy_spec();
        spec.villages = 200;
        let villages = generate_synthetic(&spec, 123).unwrap();
        let summary = summarize_households(&villages).unwrap();
        let n = summary.households as f64;

        let income = summary.rows.iter().find(|r| r.name == "income").unwrap();
        let mean = (2.0 + 20.0) / 2.0;
        let sd = (20.0f64 - 2.0).powi(2).sqrt() / 12f64.sqrt();
        assert!((income.mean - mean).abs() < 4.0 * sd / n.sqrt(), "mean {}", income.mean);
        assert!((income.sd - sd).abs() < 0.2, "sd {}", income.sd);

        let boys = summary.rows.iter().find(|r| r.name == "male_children").unwrap();
        // P(boy | at least one child) = p/(p + q - pq) with p = q = 0.5.
        let expect = 0.5 / 0.75;
        assert!((boys.mean - expect).abs() < 4.0 * 0.5 / n.sqrt(), "boys {}", boys.mean);
    }
}
