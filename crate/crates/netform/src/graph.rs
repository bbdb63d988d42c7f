//! Directed village networks and their statistics.
//!
//! Adjacency is kept as one u64 row mask and one u64 column mask per node, so
//! the Gibbs sampler's change statistic can walk neighborhoods with bit
//! scans. Villages in the data range from 7 to 37 households; the
//! representation caps out at 64.

use std::path::Path;

use crate::data::Village;
use crate::error::{Error, Result};
use crate::features::{gender_indicators, GenderConvention};

/// Directed adjacency for one village: `a[i][j] = 1` means household `i`
/// lists household `j`. The diagonal is always zero and `a_ij`, `a_ji` are
/// independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VillageNetwork {
    village_id: u32,
    n: usize,
    rows: Vec<u64>,
    cols: Vec<u64>,
}

impl VillageNetwork {
    pub fn empty(village_id: u32, n: usize) -> Result<VillageNetwork> {
        if n < 2 {
            return Err(Error::VillageTooSmall { village_id, n });
        }
        if n > 64 {
            return Err(Error::VillageTooLarge { village_id, n });
        }
        Ok(VillageNetwork {
            village_id,
            n,
            rows: vec![0; n],
            cols: vec![0; n],
        })
    }

    pub fn from_edges(
        village_id: u32,
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<VillageNetwork> {
        let mut net = VillageNetwork::empty(village_id, n)?;
        for (i, j) in edges {
            if i == j {
                return Err(Error::DiagonalEntry(i));
            }
            if i >= n || j >= n {
                return Err(Error::Other(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            net.set_edge(i, j, true);
        }
        Ok(net)
    }

    pub fn village_id(&self) -> u32 {
        self.village_id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    #[inline]
    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        debug_assert!(i != j && i < self.n && j < self.n);
        if present {
            self.rows[i] |= 1 << j;
            self.cols[j] |= 1 << i;
        } else {
            self.rows[i] &= !(1 << j);
            self.cols[j] &= !(1 << i);
        }
    }

    /// Out-neighborhood of `i` as a bit mask.
    #[inline]
    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    /// In-neighborhood of `j` as a bit mask.
    #[inline]
    pub fn col(&self, j: usize) -> u64 {
        self.cols[j]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.rows[i].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            let mut row = self.rows[i];
            std::iter::from_fn(move || {
                if row == 0 {
                    None
                } else {
                    let j = row.trailing_zeros() as usize;
                    row &= row - 1;
                    Some((i, j))
                }
            })
        })
    }

    /// Undirected neighborhood masks: edge {i, j} present iff a_ij or a_ji.
    pub fn symmetrized_rows(&self) -> Vec<u64> {
        (0..self.n).map(|i| self.rows[i] | self.cols[i]).collect()
    }

    /// Dense 0/1 text matrix, one row per line.
    pub fn to_dense_text(&self) -> String {
        let mut out = String::with_capacity(self.n * (self.n + 1));
        for i in 0..self.n {
            for j in 0..self.n {
                out.push(if self.has_edge(i, j) { '1' } else { '0' });
                if j + 1 < self.n {
                    out.push(' ');
                }
            }
            out.push('\n');
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn check_consistency(&self) {
        for i in 0..self.n {
            assert_eq!(self.rows[i] >> i & 1, 0, "diagonal must stay zero");
            for j in 0..self.n {
                assert_eq!(self.rows[i] >> j & 1, self.cols[j] >> i & 1);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// Share of present links among the n(n-1) possible ones.
pub fn density(net: &VillageNetwork) -> f64 {
    let n = net.n() as f64;
    net.edge_count() as f64 / (n * (n - 1.0))
}

/// Mean out-degree.
pub fn mean_degree(net: &VillageNetwork) -> f64 {
    net.edge_count() as f64 / net.n() as f64
}

/// Ratio of fully connected triples to triples with at least two links, on
/// the symmetrized graph. Zero when no triple has two links.
pub fn clustering(net: &VillageNetwork) -> Result<f64> {
    let n = net.n();
    if n < 3 {
        return Err(Error::UndefinedStatistic {
            statistic: "clustering",
            reason: format!("requires at least 3 nodes, village has {n}"),
        });
    }
    let sym = net.symmetrized_rows();
    // Each triangle is counted once per edge, i.e. three times.
    let mut triangle_ends = 0u64;
    for i in 0..n {
        let mut row = sym[i] & !((1u64 << (i + 1)) - 1); // j > i
        while row != 0 {
            let j = row.trailing_zeros() as usize;
            row &= row - 1;
            triangle_ends += (sym[i] & sym[j]).count_ones() as u64;
        }
    }
    let closed = triangle_ends / 3;
    // Sum of C(deg, 2) counts open triples once (at the center) and closed
    // triples three times.
    let centered: u64 = sym
        .iter()
        .map(|r| {
            let d = r.count_ones() as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    let at_least_two = centered - 2 * closed;
    if at_least_two == 0 {
        Ok(0.0)
    } else {
        Ok(closed as f64 / at_least_two as f64)
    }
}

/// Normalized variance of the generic link indicator: 4 p (1 - p) with
/// p the density, so the maximum value 1 is reached at density one half.
pub fn asymmetry(net: &VillageNetwork) -> f64 {
    let p = density(net);
    4.0 * p * (1.0 - p)
}

/// Average directed shortest-path length over reachable ordered pairs, plus
/// the reachable share of all ordered pairs.
pub fn mean_distance(net: &VillageNetwork) -> Result<(f64, f64)> {
    let n = net.n();
    let mut total = 0u64;
    let mut reachable = 0u64;
    for src in 0..n {
        // Level-synchronous BFS on bit masks.
        let mut visited = 1u64 << src;
        let mut frontier = visited;
        let mut dist = 0u64;
        while frontier != 0 {
            dist += 1;
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let i = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= net.row(i);
            }
            frontier = next & !visited;
            visited |= frontier;
            total += dist * frontier.count_ones() as u64;
            reachable += frontier.count_ones() as u64;
        }
    }
    if reachable == 0 {
        return Err(Error::UndefinedStatistic {
            statistic: "mean_distance",
            reason: "no reachable ordered pairs".into(),
        });
    }
    let pairs = (n * (n - 1)) as f64;
    Ok((total as f64 / reachable as f64, reachable as f64 / pairs))
}

/// The statistics tracked for every observed and simulated network.
#[derive(Clone, Debug)]
pub struct NetworkStats {
    pub mean_degree: f64,
    pub density: f64,
    /// Undefined below 3 nodes.
    pub clustering: Option<f64>,
    pub asymmetry: f64,
    /// Undefined when no ordered pair is reachable.
    pub mean_distance: Option<f64>,
    pub reachable_fraction: f64,
    pub degrees: Vec<usize>,
}

impl NetworkStats {
    pub fn compute(net: &VillageNetwork) -> NetworkStats {
        let (mean_distance, reachable_fraction) = match mean_distance(net) {
            Ok((d, r)) => (Some(d), r),
            Err(_) => (None, 0.0),
        };
        NetworkStats {
            mean_degree: mean_degree(net),
            density: density(net),
            clustering: clustering(net).ok(),
            asymmetry: asymmetry(net),
            mean_distance,
            reachable_fraction,
            degrees: (0..net.n()).map(|i| net.out_degree(i)).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Same-gender link diagnostics
// ---------------------------------------------------------------------------

/// Link proportions among dyads of families with same-gender children, per
/// village. Denominator-zero proportions are reported as `None`.
#[derive(Clone, Debug, Default)]
pub struct LinkDiagnostics {
    pub village_id: u32,
    /// Share of direct links that are also mutual.
    pub direct_mutual: Option<f64>,
    /// Share of indirect links whose intermediary matches: gender_ij = 1.
    pub through_gender_ij: Option<f64>,
    /// Variant: gender_jk = 1.
    pub through_gender_jk: Option<f64>,
    /// Variant: both legs same-gender.
    pub through_both: Option<f64>,
    /// Share of indirect links that are also non-mutually direct.
    pub indirect_direct_nonmutual: Option<f64>,
    /// Share of indirect links that are also mutually direct.
    pub indirect_direct_mutual: Option<f64>,
    /// Share of indirect links with a direct (non-mutual) link from k to i.
    pub indirect_reciprocal: Option<f64>,
}

/// Computes the same-gender link diagnostics for one village.
pub fn link_proportion_diagnostics(
    net: &VillageNetwork,
    village: &Village,
    convention: GenderConvention,
) -> Result<LinkDiagnostics> {
    let n = net.n();
    if n != village.n() {
        return Err(Error::DimensionMismatch(format!(
            "network has {n} nodes, village {} households",
            village.n()
        )));
    }
    let mut same = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let (g, _, _) =
                    gender_indicators(&village.households[i], &village.households[j], convention)?;
                same[i * n + j] = g;
            }
        }
    }

    let mut direct = 0u64;
    let mut direct_mutual = 0u64;
    for (i, j) in net.edges() {
        if same[i * n + j] {
            direct += 1;
            if net.has_edge(j, i) {
                direct_mutual += 1;
            }
        }
    }

    // Ordered two-paths i -> j -> k with same-gender endpoints i, k.
    let mut indirect = 0u64;
    let mut through_ij = 0u64;
    let mut through_jk = 0u64;
    let mut through_both = 0u64;
    let mut also_direct_nonmutual = 0u64;
    let mut also_direct_mutual = 0u64;
    let mut reciprocal = 0u64;
    for j in 0..n {
        let mut in_j = net.col(j);
        while in_j != 0 {
            let i = in_j.trailing_zeros() as usize;
            in_j &= in_j - 1;
            let mut out_j = net.row(j) & !(1 << i);
            while out_j != 0 {
                let k = out_j.trailing_zeros() as usize;
                out_j &= out_j - 1;
                if !same[i * n + k] {
                    continue;
                }
                indirect += 1;
                let leg_ij = same[i * n + j];
                let leg_jk = same[j * n + k];
                through_ij += leg_ij as u64;
                through_jk += leg_jk as u64;
                through_both += (leg_ij && leg_jk) as u64;
                let ik = net.has_edge(i, k);
                let ki = net.has_edge(k, i);
                also_direct_nonmutual += (ik && !ki) as u64;
                also_direct_mutual += (ik && ki) as u64;
                reciprocal += (ki && !ik) as u64;
            }
        }
    }

    let frac = |num: u64, den: u64| {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };
    Ok(LinkDiagnostics {
        village_id: net.village_id(),
        direct_mutual: frac(direct_mutual, direct),
        through_gender_ij: frac(through_ij, indirect),
        through_gender_jk: frac(through_jk, indirect),
        through_both: frac(through_both, indirect),
        indirect_direct_nonmutual: frac(also_direct_nonmutual, indirect),
        indirect_direct_mutual: frac(also_direct_mutual, indirect),
        indirect_reciprocal: frac(reciprocal, indirect),
    })
}

/// Quantiles of one diagnostic across villages (min, p25, median, p75, max).
pub fn diagnostic_quantiles(values: &[f64]) -> Option<[f64; 5]> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| {
        let idx = p * (sorted.len() - 1) as f64;
        let lo = idx.floor() as usize;
        let hi = idx.ceil() as usize;
        let w = idx - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    };
    Some([sorted[0], q(0.25), q(0.5), q(0.75), sorted[sorted.len() - 1]])
}

// ---------------------------------------------------------------------------
// Edge-list files
// ---------------------------------------------------------------------------

/// Writes edge lists as `village_id,src_household_id,dst_household_id` rows.
pub fn save_edges(path: &Path, villages: &[Village], nets: &[VillageNetwork]) -> Result<()> {
    let mut out = String::from("village_id,src_household_id,dst_household_id\n");
    for (village, net) in villages.iter().zip(nets) {
        for (i, j) in net.edges() {
            out.push_str(&format!(
                "{},{},{}\n",
                village.village_id,
                village.households[i].household_id,
                village.households[j].household_id
            ));
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Loads edge lists for the given villages. Villages without rows get empty
/// networks; unknown village or household ids are errors.
pub fn load_edges(path: &Path, villages: &[Village]) -> Result<Vec<VillageNetwork>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut nets: Vec<VillageNetwork> = villages
        .iter()
        .map(|v| VillageNetwork::empty(v.village_id, v.n()))
        .collect::<Result<_>>()?;
    let index_of_village: std::collections::BTreeMap<u32, usize> = villages
        .iter()
        .enumerate()
        .map(|(idx, v)| (v.village_id, idx))
        .collect();

    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 || line.is_empty() || line.starts_with('#') {
            continue;
        }
        let line_num = (lineno + 1) as u64;
        let mut parts = line.split(',');
        let mut next_u32 = |name: &str| -> Result<u32> {
            parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::InvalidRow {
                    line: line_num,
                    message: format!("cannot parse {name} in '{line}'"),
                })
        };
        let village_id = next_u32("village_id")?;
        let src = next_u32("src_household_id")?;
        let dst = next_u32("dst_household_id")?;
        let &vidx = index_of_village.get(&village_id).ok_or(Error::InvalidRow {
            line: line_num,
            message: format!("unknown village id {village_id}"),
        })?;
        let village = &villages[vidx];
        let i = village.index_of(src).ok_or(Error::InvalidRow {
            line: line_num,
            message: format!("unknown household id {src} in village {village_id}"),
        })?;
        let j = village.index_of(dst).ok_or(Error::InvalidRow {
            line: line_num,
            message: format!("unknown household id {dst} in village {village_id}"),
        })?;
        if i == j {
            return Err(Error::InvalidRow {
                line: line_num,
                message: "self-links are not allowed".into(),
            });
        }
        nets[vidx].set_edge(i, j, true);
    }
    Ok(nets)
}
