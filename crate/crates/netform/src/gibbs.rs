//! Gibbs simulation of village networks.
//!
//! One sweep resamples a uniformly chosen off-diagonal entry from its
//! conditional distribution given the rest of the network: the entry is set
//! with probability `sigmoid` of the potential's change statistic. The
//! stationary law of the scan is the Gibbs measure whose exponent is the
//! potential. Starting from any network, the state after the configured
//! number of sweeps is the simulated network.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VillageNetwork;
use crate::potential::{delta_unchecked, potential, ScoreMatrices};
use crate::rng::{lane, stream};
use rand::Rng;

/// Simulation length and entry-update width.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GibbsConfig {
    /// Number of update steps per simulated network.
    #[serde(default = "default_sweeps")]
    pub sweeps: u32,
    /// Distinct entries resampled per step (1 to 3).
    #[serde(default = "default_flips")]
    pub flips_per_step: u8,
    #[serde(default)]
    pub seed: u64,
}

fn default_sweeps() -> u32 {
    7_000
}

fn default_flips() -> u8 {
    1
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig {
            sweeps: default_sweeps(),
            flips_per_step: default_flips(),
            seed: 0,
        }
    }
}

impl GibbsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.flips_per_step) {
            return Err(Error::Config(format!(
                "flips_per_step must be 1, 2 or 3, got {}",
                self.flips_per_step
            )));
        }
        Ok(())
    }
}

/// Numerically stable logistic function.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Maps a uniform draw over the n(n-1) off-diagonal cells to (i, j).
#[inline]
fn cell(n: usize, idx: usize) -> (usize, usize) {
    let i = idx / (n - 1);
    let r = idx % (n - 1);
    let j = r + (r >= i) as usize;
    (i, j)
}

/// Resamples entry (i, j) from its conditional given the rest of the
/// network.
#[inline]
pub fn resample_entry(
    net: &mut VillageNetwork,
    scores: &ScoreMatrices,
    i: usize,
    j: usize,
    rng: &mut impl Rng,
) {
    let p = sigmoid(delta_unchecked(net, scores, i, j));
    let present = rng.random::<f64>() < p;
    net.set_edge(i, j, present);
}

/// One update step: a uniformly chosen entry is resampled. With
/// `flips_per_step` above one, that many distinct entries are resampled in
/// sequence within the step.
pub fn gibbs_step(net: &mut VillageNetwork, scores: &ScoreMatrices, rng: &mut impl Rng) {
    let n = net.n();
    let idx = rng.random_range(0..n * (n - 1));
    let (i, j) = cell(n, idx);
    resample_entry(net, scores, i, j, rng);
}

/// Runs `sweeps` update steps in place.
pub fn run_sweeps(
    net: &mut VillageNetwork,
    scores: &ScoreMatrices,
    sweeps: u32,
    flips_per_step: u8,
    rng: &mut impl Rng,
) {
    let n = net.n();
    let cells = n * (n - 1);
    if flips_per_step <= 1 {
        for _ in 0..sweeps {
            gibbs_step(net, scores, rng);
        }
        return;
    }
    let width = (flips_per_step as usize).min(cells);
    let mut chosen = [usize::MAX; 3];
    for _ in 0..sweeps {
        for slot in 0..width {
            let idx = loop {
                let idx = rng.random_range(0..cells);
                if !chosen[..slot].contains(&idx) {
                    break idx;
                }
            };
            chosen[slot] = idx;
            let (i, j) = cell(n, idx);
            resample_entry(net, scores, i, j, rng);
        }
        chosen = [usize::MAX; 3];
    }
}

/// Simulates one artificial network: the state after the configured number
/// of sweeps, starting from `start`. Deterministic given the config seed.
pub fn simulate_network(
    start: &VillageNetwork,
    scores: &ScoreMatrices,
    config: &GibbsConfig,
) -> Result<VillageNetwork> {
    config.validate()?;
    let mut rng = stream(config.seed, &[lane::SIMULATE, start.village_id() as u64]);
    let mut net = start.clone();
    run_sweeps(&mut net, scores, config.sweeps, config.flips_per_step, &mut rng);
    Ok(net)
}

/// As [`simulate_network`] but also records the density after every step,
/// for mixing diagnostics.
pub fn simulate_with_trace(
    start: &VillageNetwork,
    scores: &ScoreMatrices,
    config: &GibbsConfig,
) -> Result<(VillageNetwork, Vec<f64>)> {
    config.validate()?;
    let mut rng = stream(config.seed, &[lane::SIMULATE, start.village_id() as u64]);
    let mut net = start.clone();
    let mut trace = Vec::with_capacity(config.sweeps as usize);
    for _ in 0..config.sweeps {
        run_sweeps(&mut net, scores, 1, config.flips_per_step, &mut rng);
        trace.push(crate::graph::density(&net));
    }
    Ok((net, trace))
}

// ---------------------------------------------------------------------------
// Exact reference distribution for tiny villages
// ---------------------------------------------------------------------------

/// Index of the off-diagonal cell (i, j) in the canonical enumeration order.
pub fn cell_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j);
    i * (n - 1) + j - (j > i) as usize
}

/// Decodes a state code (one bit per off-diagonal cell) into a network.
pub fn network_from_code(village_id: u32, n: usize, code: u64) -> Result<VillageNetwork> {
    let mut net = VillageNetwork::empty(village_id, n)?;
    for i in 0..n {
        for j in 0..n {
            if i != j && code >> cell_index(n, i, j) & 1 == 1 {
                net.set_edge(i, j, true);
            }
        }
    }
    Ok(net)
}

/// Encodes a network as a state code.
pub fn network_code(net: &VillageNetwork) -> u64 {
    let n = net.n();
    let mut code = 0u64;
    for (i, j) in net.edges() {
        code |= 1 << cell_index(n, i, j);
    }
    code
}

/// Enumerates the exact stationary distribution over all networks of a tiny
/// village: probabilities indexed by state code. Only feasible for
/// n(n-1) <= 20 cells.
pub fn exact_stationary(scores: &ScoreMatrices) -> Result<Vec<f64>> {
    let n = scores.n;
    let cells = n * (n - 1);
    if cells > 20 {
        return Err(Error::Other(format!(
            "exact enumeration over 2^{cells} networks is not feasible"
        )));
    }
    let count = 1usize << cells;
    let mut log_weights = Vec::with_capacity(count);
    for code in 0..count as u64 {
        let net = network_from_code(0, n, code)?;
        log_weights.push(potential(&net, scores));
    }
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = log_weights.iter().map(|lw| (lw - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    Ok(probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn random_scores(n: usize, scale: f64, seed: u64) -> ScoreMatrices {
        let mut rng = stream(seed, &[50]);
        let mut s = ScoreMatrices::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s.u[i * n + j] = rng.random_range(-scale..scale);
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let m = rng.random_range(-scale..scale);
                let v = rng.random_range(-scale..scale);
                s.m[i * n + j] = m;
                s.m[j * n + i] = m;
                s.v[i * n + j] = v;
                s.v[j * n + i] = v;
            }
        }
        s
    }

    #[test]
    fn sigmoid_basics() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(40.0) > 1.0 - 1e-15);
        assert!(sigmoid(-40.0) < 1e-15);
        assert!((sigmoid(2.0) + sigmoid(-2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cell_mapping_is_a_bijection() {
        for n in 2..=8 {
            let mut seen = std::collections::BTreeSet::new();
            for idx in 0..n * (n - 1) {
                let (i, j) = cell(n, idx);
                assert!(i != j && i < n && j < n);
                assert!(seen.insert((i, j)));
                assert_eq!(cell_index(n, i, j), idx);
            }
        }
    }

    #[test]
    fn zero_sweeps_returns_start() {
        let scores = random_scores(4, 1.0, 1);
        let start = VillageNetwork::from_edges(3, 4, [(0, 1), (2, 3)]).unwrap();
        let config = GibbsConfig {
            sweeps: 0,
            flips_per_step: 1,
            seed: 9,
        };
        assert_eq!(simulate_network(&start, &scores, &config).unwrap(), start);
    }

    #[test]
    fn simulation_is_deterministic() {
        let scores = random_scores(5, 0.8, 2);
        let start = VillageNetwork::empty(7, 5).unwrap();
        let config = GibbsConfig {
            sweeps: 500,
            flips_per_step: 1,
            seed: 11,
        };
        let a = simulate_network(&start, &scores, &config).unwrap();
        let b = simulate_network(&start, &scores, &config).unwrap();
        assert_eq!(a, b);
        a.check_consistency();
    }

    #[test]
    fn fair_coin_when_scores_vanish() {
        let scores = ScoreMatrices::zeros(3);
        let mut net = VillageNetwork::empty(1, 3).unwrap();
        let mut rng = stream(21, &[1]);
        let mut ones = 0u32;
        let trials = 100_000;
        for _ in 0..trials {
            resample_entry(&mut net, &scores, 0, 1, &mut rng);
            ones += net.has_edge(0, 1) as u32;
        }
        let freq = ones as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 3.0 * 0.5 / (trials as f64).sqrt());
    }

    #[test]
    fn huge_direct_score_forces_link() {
        let mut scores = ScoreMatrices::zeros(3);
        scores.u[0 * 3 + 1] = 1e3;
        let mut net = VillageNetwork::empty(1, 3).unwrap();
        let mut rng = stream(22, &[1]);
        for _ in 0..1000 {
            resample_entry(&mut net, &scores, 0, 1, &mut rng);
            assert!(net.has_edge(0, 1));
        }
    }

    #[test]
    fn conditional_frequency_matches_change_statistic() {
        // Resample one entry of a fixed n = 3 network many times and compare
        // the empirical rate with the closed form.
        let scores = random_scores(3, 0.7, 33);
        let base = VillageNetwork::from_edges(1, 3, [(1, 0), (1, 2), (2, 0)]).unwrap();
        let p = sigmoid(crate::potential::delta_potential(&base, &scores, 0, 2).unwrap());
        let mut net = base.clone();
        let mut rng = stream(23, &[2]);
        let trials = 100_000;
        let mut ones = 0u32;
        for _ in 0..trials {
            resample_entry(&mut net, &scores, 0, 2, &mut rng);
            ones += net.has_edge(0, 2) as u32;
        }
        let freq = ones as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((freq - p).abs() < 3.0 * se, "freq {freq} vs p {p}");
    }

    #[test]
    fn detailed_balance_on_enumerable_state_space() {
        let n = 3;
        let cells = n * (n - 1);
        let scores = random_scores(n, 0.9, 44);
        let pi = exact_stationary(&scores).unwrap();
        // One-step transition probabilities of the uniform single-entry scan.
        for code_a in 0..1u64 << cells {
            let net_a = network_from_code(0, n, code_a).unwrap();
            for c in 0..cells {
                let code_b = code_a ^ (1 << c);
                let (i, j) = cell(n, c);
                // P(A -> B): choose cell c, then draw B's value for it.
                let d = crate::potential::delta_potential(&net_a, &scores, i, j).unwrap();
                let p_set = sigmoid(d);
                let to_one = code_b >> c & 1 == 1;
                let p_ab = if to_one { p_set } else { 1.0 - p_set } / cells as f64;
                let net_b = network_from_code(0, n, code_b).unwrap();
                let d_b = crate::potential::delta_potential(&net_b, &scores, i, j).unwrap();
                let p_set_b = sigmoid(d_b);
                let p_ba = if to_one { 1.0 - p_set_b } else { p_set_b } / cells as f64;
                let lhs = pi[code_a as usize] * p_ab;
                let rhs = pi[code_b as usize] * p_ba;
                assert!(
                    (lhs - rhs).abs() < 1e-12 * lhs.max(rhs).max(1e-300),
                    "detailed balance fails at {code_a} -> {code_b}"
                );
            }
        }
    }

    #[test]
    fn independent_dyads_when_interaction_terms_vanish() {
        // With zero mutual and indirect scores the entries are independent
        // Bernoulli draws with probability sigmoid(u_ij).
        let n = 4;
        let mut scores = ScoreMatrices::zeros(n);
        let mut rng = stream(55, &[1]);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    scores.u[i * n + j] = rng.random_range(-1.5..1.5);
                }
            }
        }
        let start = VillageNetwork::empty(1, n).unwrap();
        let reps = 4000;
        let mut counts = vec![0u32; n * n];
        for rep in 0..reps {
            let config = GibbsConfig {
                sweeps: 200,
                flips_per_step: 1,
                seed: rep,
            };
            let net = simulate_network(&start, &scores, &config).unwrap();
            for (i, j) in net.edges() {
                counts[i * n + j] += 1;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let p = sigmoid(scores.u_at(i, j));
                let freq = counts[i * n + j] as f64 / reps as f64;
                let se = (p * (1.0 - p) / reps as f64).sqrt();
                assert!(
                    (freq - p).abs() < 4.0 * se,
                    "dyad ({i},{j}): {freq} vs {p}"
                );
            }
        }
    }

    #[test]
    fn multi_flip_steps_preserve_stationary_distribution() {
        // Coarse total-variation check for flips_per_step = 2 on n = 3.
        let n = 3;
        let scores = random_scores(n, 0.6, 66);
        let pi = exact_stationary(&scores).unwrap();
        let mut rng = stream(67, &[1]);
        let mut net = VillageNetwork::empty(0, n).unwrap();
        let mut counts = vec![0u64; pi.len()];
        let burn = 2_000;
        let draws = 200_000;
        for step in 0..burn + draws {
            run_sweeps(&mut net, &scores, 1, 2, &mut rng);
            if step >= burn {
                counts[network_code(&net) as usize] += 1;
            }
        }
        let tv: f64 = counts
            .iter()
            .zip(&pi)
            .map(|(c, p)| (*c as f64 / draws as f64 - p).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.02, "tv = {tv}");
    }
}
