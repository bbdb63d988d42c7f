//! Dyadic regressors.
//!
//! Per village, builds the regressor vectors feeding the three utility
//! terms: an asymmetric set for direct links (may include each household's
//! own levels) and symmetric sets for mutual and indirect links (same-category
//! indicators and absolute differences only). Features are built once per
//! village and never change; parameter-dependent scores live in
//! [`crate::potential`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Household, Occupation, Village};
use crate::error::{Error, Result};

/// How a pair's child-gender indicators are coded.
///
/// `AnyOverlap` respects mixed (boy + girl) families: the pair counts as
/// same-gender if the two families share a child gender. `Exclusive` requires
/// every family to carry exactly one gender and codes indicators by equality;
/// the counterfactual engine forces it when it regenerates gender.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenderConvention {
    AnyOverlap,
    Exclusive,
}

/// Whether the gender effect enters as one indicator or split by gender.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenderCoding {
    /// One `gender` regressor: families have children of the same gender.
    Same,
    /// Two regressors: `male` (both have boys) and `female` (both have girls).
    Split,
}

/// Pairwise child-gender indicators for one dyad: `(gender, male, female)`.
pub fn gender_indicators(
    hi: &Household,
    hj: &Household,
    convention: GenderConvention,
) -> Result<(bool, bool, bool)> {
    if convention == GenderConvention::Exclusive {
        for h in [hi, hj] {
            if h.has_boy && h.has_girl {
                return Err(Error::MixedGenderHousehold {
                    village_id: h.village_id,
                    household_id: h.household_id,
                });
            }
        }
    }
    let male = hi.has_boy && hj.has_boy;
    let female = hi.has_girl && hj.has_girl;
    Ok((male || female, male, female))
}

/// Continuous covariates usable as levels or absolute differences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericCovariate {
    FatherAge,
    MotherAge,
    Income,
    HomesteadLand,
    FarmingLand,
}

impl NumericCovariate {
    pub fn token(self) -> &'static str {
        match self {
            NumericCovariate::FatherAge => "father_age",
            NumericCovariate::MotherAge => "mother_age",
            NumericCovariate::Income => "income",
            NumericCovariate::HomesteadLand => "homestead_land",
            NumericCovariate::FarmingLand => "farming_land",
        }
    }

    pub fn value(self, h: &Household) -> f64 {
        match self {
            NumericCovariate::FatherAge => h.father_age as f64,
            NumericCovariate::MotherAge => h.mother_age as f64,
            NumericCovariate::Income => h.income,
            NumericCovariate::HomesteadLand => h.homestead_land,
            NumericCovariate::FarmingLand => h.farming_land,
        }
    }
}

/// Categorical or binary covariates entering as agreement indicators:
/// the feature is 1 when the two households' values are equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchCovariate {
    FatherEducation,
    MotherEducation,
    FatherIsDailyLaborer,
    FatherIsFarmer,
    FatherIsSelfEmployed,
    MotherStaysHome,
}

impl MatchCovariate {
    pub fn token(self) -> &'static str {
        match self {
            MatchCovariate::FatherEducation => "father_education",
            MatchCovariate::MotherEducation => "mother_education",
            MatchCovariate::FatherIsDailyLaborer => "father_is_daily_laborer",
            MatchCovariate::FatherIsFarmer => "father_is_farmer",
            MatchCovariate::FatherIsSelfEmployed => "father_is_self_employed",
            MatchCovariate::MotherStaysHome => "mother_stays_home",
        }
    }

    fn code(self, h: &Household) -> u8 {
        match self {
            MatchCovariate::FatherEducation => h.father_education as u8,
            MatchCovariate::MotherEducation => h.mother_education as u8,
            MatchCovariate::FatherIsDailyLaborer => {
                (h.father_occupation == Occupation::DailyLaborer) as u8
            }
            MatchCovariate::FatherIsFarmer => (h.father_occupation == Occupation::Farmer) as u8,
            MatchCovariate::FatherIsSelfEmployed => {
                (h.father_occupation == Occupation::SelfEmployed) as u8
            }
            MatchCovariate::MotherStaysHome => h.mother_stays_home as u8,
        }
    }
}

/// Transforms included in one utility term.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecipe {
    #[serde(default = "default_true")]
    pub intercept: bool,
    #[serde(default)]
    pub gender: bool,
    #[serde(default)]
    pub adiff: Vec<NumericCovariate>,
    /// Individual levels for i and j; allowed in the direct term only.
    #[serde(default)]
    pub levels: Vec<NumericCovariate>,
    #[serde(default)]
    pub same: Vec<MatchCovariate>,
}

fn default_true() -> bool {
    true
}

impl TermRecipe {
    pub fn empty() -> TermRecipe {
        TermRecipe {
            intercept: false,
            gender: false,
            adiff: Vec::new(),
            levels: Vec::new(),
            same: Vec::new(),
        }
    }

    pub fn intercept_only() -> TermRecipe {
        TermRecipe {
            intercept: true,
            ..TermRecipe::empty()
        }
    }

    fn names(&self, coding: GenderCoding) -> Vec<String> {
        let mut names = Vec::new();
        if self.intercept {
            names.push("intercept".into());
        }
        if self.gender {
            match coding {
                GenderCoding::Same => names.push("gender".into()),
                GenderCoding::Split => {
                    names.push("male".into());
                    names.push("female".into());
                }
            }
        }
        for c in &self.adiff {
            names.push(format!("adiff_{}", c.token()));
            if self.levels.contains(c) {
                names.push(format!("{}_i", c.token()));
                names.push(format!("{}_j", c.token()));
            }
        }
        for c in &self.levels {
            if !self.adiff.contains(c) {
                names.push(format!("{}_i", c.token()));
                names.push(format!("{}_j", c.token()));
            }
        }
        for s in &self.same {
            names.push(format!("same_{}", s.token()));
        }
        names
    }

    /// Fills `out` with the dyad's features, in the order of `names`.
    fn fill(
        &self,
        out: &mut Vec<f64>,
        hi: &Household,
        hj: &Household,
        coding: GenderCoding,
        convention: GenderConvention,
    ) -> Result<()> {
        if self.intercept {
            out.push(1.0);
        }
        if self.gender {
            let (g, m, f) = gender_indicators(hi, hj, convention)?;
            match coding {
                GenderCoding::Same => out.push(g as u8 as f64),
                GenderCoding::Split => {
                    out.push(m as u8 as f64);
                    out.push(f as u8 as f64);
                }
            }
        }
        for c in &self.adiff {
            let (xi, xj) = (c.value(hi), c.value(hj));
            out.push((xi - xj).abs());
            if self.levels.contains(c) {
                out.push(xi);
                out.push(xj);
            }
        }
        for c in &self.levels {
            if !self.adiff.contains(c) {
                out.push(c.value(hi));
                out.push(c.value(hj));
            }
        }
        for s in &self.same {
            out.push((s.code(hi) == s.code(hj)) as u8 as f64);
        }
        Ok(())
    }
}

/// Which transforms feed each utility term, plus the gender coding rules.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureRecipe {
    #[serde(default = "default_coding")]
    pub gender: GenderCoding,
    #[serde(default = "default_convention")]
    pub convention: GenderConvention,
    pub u: TermRecipe,
    pub m: TermRecipe,
    pub v: TermRecipe,
}

fn default_coding() -> GenderCoding {
    GenderCoding::Same
}

fn default_convention() -> GenderConvention {
    GenderConvention::AnyOverlap
}

impl FeatureRecipe {
    /// The full specification: levels, gaps, and agreement indicators in the
    /// direct term; symmetric transforms in the mutual and indirect terms.
    pub fn standard(coding: GenderCoding) -> FeatureRecipe {
        use MatchCovariate::*;
        use NumericCovariate::*;
        let numeric = vec![FatherAge, MotherAge, Income, HomesteadLand, FarmingLand];
        let matches = vec![
            FatherEducation,
            MotherEducation,
            FatherIsDailyLaborer,
            FatherIsFarmer,
            FatherIsSelfEmployed,
            MotherStaysHome,
        ];
        let symmetric = TermRecipe {
            intercept: true,
            gender: true,
            adiff: numeric.clone(),
            levels: Vec::new(),
            same: matches.clone(),
        };
        FeatureRecipe {
            gender: coding,
            convention: GenderConvention::AnyOverlap,
            u: TermRecipe {
                intercept: true,
                gender: true,
                adiff: numeric.clone(),
                levels: numeric,
                same: matches,
            },
            m: symmetric.clone(),
            v: symmetric,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (term, recipe) in [('m', &self.m), ('v', &self.v)] {
            if !recipe.levels.is_empty() {
                return Err(Error::SymmetryViolation {
                    term,
                    names: recipe.levels.iter().map(|c| c.token().into()).collect(),
                });
            }
        }
        Ok(())
    }

    pub fn u_names(&self) -> Vec<String> {
        self.u.names(self.gender)
    }

    pub fn m_names(&self) -> Vec<String> {
        self.m.names(self.gender)
    }

    pub fn v_names(&self) -> Vec<String> {
        self.v.names(self.gender)
    }
}

/// Index of unordered pair (i, j), i < j, in a packed upper triangle.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Precomputed per-village regressor tensors.
///
/// The direct-term tensor is stored per ordered dyad; the mutual and
/// indirect tensors are stored once per unordered pair (they are symmetric
/// by construction).
#[derive(Clone, Debug)]
pub struct DyadFeatureSet {
    pub village_id: u32,
    pub n: usize,
    pub u_names: Vec<String>,
    pub m_names: Vec<String>,
    pub v_names: Vec<String>,
    u: Vec<f64>,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl DyadFeatureSet {
    pub fn ku(&self) -> usize {
        self.u_names.len()
    }

    pub fn km(&self) -> usize {
        self.m_names.len()
    }

    pub fn kv(&self) -> usize {
        self.v_names.len()
    }

    /// Direct-term features of ordered dyad (i, j).
    pub fn u_dyad(&self, i: usize, j: usize) -> &[f64] {
        let k = self.ku();
        &self.u[(i * self.n + j) * k..(i * self.n + j + 1) * k]
    }

    /// Mutual-term features of unordered pair {i, j}.
    pub fn m_pair(&self, i: usize, j: usize) -> &[f64] {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let k = self.km();
        let p = pair_index(self.n, lo, hi);
        &self.m[p * k..(p + 1) * k]
    }

    /// Indirect-term features of unordered pair {i, k}.
    pub fn v_pair(&self, i: usize, j: usize) -> &[f64] {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let k = self.kv();
        let p = pair_index(self.n, lo, hi);
        &self.v[p * k..(p + 1) * k]
    }
}

/// Builds the regressor tensors for one village.
pub fn build_features(village: &Village, recipe: &FeatureRecipe) -> Result<DyadFeatureSet> {
    build_features_with(village, recipe, recipe.convention)
}

/// As [`build_features`] but with the gender convention overridden
/// (the counterfactual engine forces `Exclusive` on regenerated gender).
pub fn build_features_with(
    village: &Village,
    recipe: &FeatureRecipe,
    convention: GenderConvention,
) -> Result<DyadFeatureSet> {
    recipe.validate()?;
    let n = village.n();
    let u_names = recipe.u_names();
    let m_names = recipe.m_names();
    let v_names = recipe.v_names();
    let (ku, km, kv) = (u_names.len(), m_names.len(), v_names.len());
    let pairs = n * (n - 1) / 2;

    let mut u = Vec::with_capacity(n * n * ku);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                u.extend(std::iter::repeat(0.0).take(ku));
            } else {
                recipe.u.fill(
                    &mut u,
                    &village.households[i],
                    &village.households[j],
                    recipe.gender,
                    convention,
                )?;
            }
        }
    }

    let mut m = Vec::with_capacity(pairs * km);
    let mut v = Vec::with_capacity(pairs * kv);
    for i in 0..n {
        for j in (i + 1)..n {
            recipe.m.fill(
                &mut m,
                &village.households[i],
                &village.households[j],
                recipe.gender,
                convention,
            )?;
            recipe.v.fill(
                &mut v,
                &village.households[i],
                &village.households[j],
                recipe.gender,
                convention,
            )?;
        }
    }

    Ok(DyadFeatureSet {
        village_id: village.village_id,
        n,
        u_names,
        m_names,
        v_names,
        u,
        m,
        v,
    })
}

/// Feature construction for all villages, in parallel.
pub fn build_all_features(
    villages: &[Village],
    recipe: &FeatureRecipe,
) -> Result<Vec<DyadFeatureSet>> {
    villages
        .par_iter()
        .map(|v| build_features(v, recipe))
        .collect()
}
