//! The potential function and its single-flip change statistic.
//!
//! The potential of a network aggregates direct payoffs over present links,
//! mutual payoffs over reciprocated pairs, and indirect payoffs over ordered
//! two-paths. Both samplers only ever need the change from toggling one
//! entry, which this module evaluates in O(degree) from precomputed score
//! matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::DyadFeatureSet;
use crate::graph::VillageNetwork;

/// Coefficients for the three utility terms, in feature order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    pub u: Vec<f64>,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl ParameterVector {
    pub fn zeros(ku: usize, km: usize, kv: usize) -> ParameterVector {
        ParameterVector {
            u: vec![0.0; ku],
            m: vec![0.0; km],
            v: vec![0.0; kv],
        }
    }

    pub fn len(&self) -> usize {
        self.u.len() + self.m.len() + self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        out.extend_from_slice(&self.u);
        out.extend_from_slice(&self.m);
        out.extend_from_slice(&self.v);
        out
    }

    pub fn from_flat(flat: &[f64], ku: usize, km: usize, kv: usize) -> Result<ParameterVector> {
        if flat.len() != ku + km + kv {
            return Err(Error::DimensionMismatch(format!(
                "flat vector has {} entries, expected {} + {} + {}",
                flat.len(),
                ku,
                km,
                kv
            )));
        }
        Ok(ParameterVector {
            u: flat[..ku].to_vec(),
            m: flat[ku..ku + km].to_vec(),
            v: flat[ku + km..].to_vec(),
        })
    }

    pub fn all_finite(&self) -> bool {
        self.u
            .iter()
            .chain(&self.m)
            .chain(&self.v)
            .all(|x| x.is_finite())
    }

    fn check_dims(&self, features: &DyadFeatureSet) -> Result<()> {
        if self.u.len() != features.ku()
            || self.m.len() != features.km()
            || self.v.len() != features.kv()
        {
            return Err(Error::DimensionMismatch(format!(
                "beta dims ({}, {}, {}) vs feature dims ({}, {}, {})",
                self.u.len(),
                self.m.len(),
                self.v.len(),
                features.ku(),
                features.km(),
                features.kv()
            )));
        }
        Ok(())
    }
}

/// Per-village linear scores at a fixed parameter vector. `u` is a dense
/// n-by-n matrix (diagonal unused); `m` and `v` are stored dense and
/// symmetric so the change statistic can index either orientation.
#[derive(Clone, Debug)]
pub struct ScoreMatrices {
    pub n: usize,
    pub u: Vec<f64>,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl ScoreMatrices {
    pub fn zeros(n: usize) -> ScoreMatrices {
        ScoreMatrices {
            n,
            u: vec![0.0; n * n],
            m: vec![0.0; n * n],
            v: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn u_at(&self, i: usize, j: usize) -> f64 {
        self.u[i * self.n + j]
    }

    #[inline]
    pub fn m_at(&self, i: usize, j: usize) -> f64 {
        self.m[i * self.n + j]
    }

    #[inline]
    pub fn v_at(&self, i: usize, j: usize) -> f64 {
        self.v[i * self.n + j]
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Evaluates the three score matrices at `beta`.
pub fn score(features: &DyadFeatureSet, beta: &ParameterVector) -> Result<ScoreMatrices> {
    beta.check_dims(features)?;
    let n = features.n;
    let mut scores = ScoreMatrices::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            scores.u[i * n + j] = dot(features.u_dyad(i, j), &beta.u);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let m = dot(features.m_pair(i, j), &beta.m);
            let v = dot(features.v_pair(i, j), &beta.v);
            scores.m[i * n + j] = m;
            scores.m[j * n + i] = m;
            scores.v[i * n + j] = v;
            scores.v[j * n + i] = v;
        }
    }
    Ok(scores)
}

/// Sums a slice pairwise to bound floating-point error growth.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// The potential of a network: direct payoffs over all present links, mutual
/// payoffs once per reciprocated unordered pair, and indirect payoffs over
/// ordered two-paths i -> j -> k (a direct i -> k link is not excluded).
pub fn potential(net: &VillageNetwork, scores: &ScoreMatrices) -> f64 {
    let n = net.n();
    debug_assert_eq!(n, scores.n);
    let mut terms = Vec::with_capacity(net.edge_count() * 4);
    for i in 0..n {
        let mut row = net.row(i);
        while row != 0 {
            let j = row.trailing_zeros() as usize;
            row &= row - 1;
            terms.push(scores.u_at(i, j));
            if i < j && net.has_edge(j, i) {
                terms.push(scores.m_at(i, j));
            }
        }
    }
    for j in 0..n {
        let out_j = net.row(j);
        let mut in_j = net.col(j);
        while in_j != 0 {
            let i = in_j.trailing_zeros() as usize;
            in_j &= in_j - 1;
            let mut ks = out_j & !(1u64 << i);
            while ks != 0 {
                let k = ks.trailing_zeros() as usize;
                ks &= ks - 1;
                terms.push(scores.v_at(i, k));
            }
        }
    }
    pairwise_sum(&terms)
}

/// Potential summed over independent villages.
pub fn total_potential(nets: &[VillageNetwork], scores: &[ScoreMatrices]) -> f64 {
    let terms: Vec<f64> = nets
        .iter()
        .zip(scores)
        .map(|(net, s)| potential(net, s))
        .collect();
    pairwise_sum(&terms)
}

/// Change in the potential from setting `a_ij = 1` versus `a_ij = 0`,
/// regardless of the entry's current value. O(degree) time.
pub fn delta_potential(
    net: &VillageNetwork,
    scores: &ScoreMatrices,
    i: usize,
    j: usize,
) -> Result<f64> {
    if i == j {
        return Err(Error::DiagonalEntry(i));
    }
    Ok(delta_unchecked(net, scores, i, j))
}

#[inline]
pub(crate) fn delta_unchecked(
    net: &VillageNetwork,
    scores: &ScoreMatrices,
    i: usize,
    j: usize,
) -> f64 {
    debug_assert!(i != j);
    let n = scores.n;
    let mut delta = scores.u[i * n + j];
    if net.has_edge(j, i) {
        delta += scores.m[i * n + j];
    }
    let excluded = !((1u64 << i) | (1u64 << j));
    // New two-paths i -> j -> k for k an out-neighbor of j.
    let mut out_j = net.row(j) & excluded;
    while out_j != 0 {
        let k = out_j.trailing_zeros() as usize;
        out_j &= out_j - 1;
        delta += scores.v[i * n + k];
    }
    // New two-paths k -> i -> j for k an in-neighbor of i; the payoff is
    // v_kj = v_jk by symmetry.
    let mut in_i = net.col(i) & excluded;
    while in_i != 0 {
        let k = in_i.trailing_zeros() as usize;
        in_i &= in_i - 1;
        delta += scores.v[j * n + k];
    }
    delta
}
