//! Deliberately simple reference implementations used to check the fast
//! paths: exhaustive walk enumeration, brute-force bound evaluation, and
//! Monte Carlo estimates of the probabilities the bounds dominate.
//!
//! Nothing here shares machinery with the code under test: adjacency is a
//! dense matrix scanned directly, Gaussians come from a polar-method sampler
//! on a splitmix64 stream, and the tail function is numerical quadrature.

use crate::bounds::ThetaTable;
use crate::error::{Error, Result};
use crate::signal::NoiseModel;

/// Hard limits for exhaustive enumeration; exceeding them is an error, never
/// a silent truncation.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationBudget {
    pub max_nodes: usize,
    pub max_t: usize,
    pub max_walks: u64,
}

impl EnumerationBudget {
    /// Budget for fine-level instances.
    pub fn fine() -> Self {
        EnumerationBudget {
            max_nodes: 8,
            max_t: 6,
            max_walks: 1_000_000,
        }
    }

    /// Budget for coarse-level instances.
    pub fn coarse() -> Self {
        EnumerationBudget {
            max_nodes: 5,
            max_t: 5,
            max_walks: 1_000_000,
        }
    }

    fn admit(&self, n: usize, t_len: usize) -> Result<()> {
        if n > self.max_nodes {
            return Err(Error::BudgetExceeded(format!(
                "{n} nodes exceeds the {} node budget",
                self.max_nodes
            )));
        }
        if t_len > self.max_t {
            return Err(Error::BudgetExceeded(format!(
                "T={t_len} exceeds the budget of {}",
                self.max_t
            )));
        }
        Ok(())
    }
}

/// Dense transition matrix for enumeration; `allowed[a][b]` says a walk may
/// step from a to b (diagonal entries encode self-loops).
#[derive(Clone, Debug)]
pub struct WalkMatrix {
    n: usize,
    allowed: Vec<bool>,
}

impl WalkMatrix {
    pub fn new(n: usize, edges: &[(u32, u32)], self_loops: &[u32]) -> WalkMatrix {
        let mut allowed = vec![false; n * n];
        for &(a, b) in edges {
            allowed[a as usize * n + b as usize] = true;
            allowed[b as usize * n + a as usize] = true;
        }
        for &c in self_loops {
            allowed[c as usize * n + c as usize] = true;
        }
        WalkMatrix { n, allowed }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn step_allowed(&self, from: u32, to: u32) -> bool {
        self.allowed[from as usize * self.n + to as usize]
    }
}

/// Visit every length-T walk in lexicographic order.
fn for_each_walk<F: FnMut(&[u32])>(
    matrix: &WalkMatrix,
    t_len: usize,
    budget: &EnumerationBudget,
    mut visit: F,
) -> Result<u64> {
    budget.admit(matrix.node_count(), t_len)?;
    let n = matrix.node_count() as u32;
    let mut walk: Vec<u32> = Vec::with_capacity(t_len);
    let mut count = 0u64;
    // Depth-first extension, ascending candidate order.
    fn extend<F: FnMut(&[u32])>(
        matrix: &WalkMatrix,
        t_len: usize,
        n: u32,
        walk: &mut Vec<u32>,
        count: &mut u64,
        max_walks: u64,
        visit: &mut F,
    ) -> Result<()> {
        if walk.len() == t_len {
            *count += 1;
            if *count > max_walks {
                return Err(Error::BudgetExceeded(format!(
                    "more than {max_walks} walks"
                )));
            }
            visit(walk);
            return Ok(());
        }
        for v in 0..n {
            if let Some(&last) = walk.last()
                && !matrix.step_allowed(last, v)
            {
                continue;
            }
            walk.push(v);
            extend(matrix, t_len, n, walk, count, max_walks, visit)?;
            walk.pop();
        }
        Ok(())
    }
    extend(
        matrix,
        t_len,
        n,
        &mut walk,
        &mut count,
        budget.max_walks,
        &mut visit,
    )?;
    Ok(count)
}

/// All length-T sequences with every consecutive step allowed, each exactly
/// once, lexicographically ordered.
pub fn enumerate_connected_walks(
    matrix: &WalkMatrix,
    t_len: usize,
    budget: &EnumerationBudget,
) -> Result<Vec<Vec<u32>>> {
    let mut walks = Vec::new();
    for_each_walk(matrix, t_len, budget, |w| walks.push(w.to_vec()))?;
    Ok(walks)
}

/// Exhaustive maximizer of the summed series values over connected walks;
/// ties resolve to the lexicographically smallest walk.
pub fn brute_force_max_sum(
    matrix: &WalkMatrix,
    rows: &[Vec<f64>],
    budget: &EnumerationBudget,
) -> Result<(Vec<u32>, f64)> {
    let mut best_sum = f64::NEG_INFINITY;
    let mut best_walk: Vec<u32> = Vec::new();
    for_each_walk(matrix, rows.len(), budget, |walk| {
        let sum: f64 = walk
            .iter()
            .enumerate()
            .map(|(t, &v)| rows[t][v as usize])
            .sum();
        if sum > best_sum {
            best_sum = sum;
            best_walk = walk.to_vec();
        }
    })?;
    if best_walk.is_empty() {
        return Err(Error::AllStatesUnreachable { t: rows.len() });
    }
    Ok((best_walk, best_sum))
}

fn log_sum_exp_acc(acc: f64, x: f64) -> f64 {
    if acc == f64::NEG_INFINITY {
        return x;
    }
    if x == f64::NEG_INFINITY {
        return acc;
    }
    let max = acc.max(x);
    max + ((acc - max).exp() + (x - max).exp()).ln()
}

fn walk_mismatch_ln_product(walk: &[u32], truth: &[u32], ln_theta: &[f64]) -> (usize, f64) {
    let mut mismatches = 0usize;
    let mut ln = 0.0;
    for (t, &c) in walk.iter().enumerate() {
        if c != truth[t] {
            mismatches += 1;
            ln += ln_theta[c as usize];
        }
    }
    (mismatches, ln)
}

/// Term-by-term evaluation of the coarse Hamming bound over enumerated
/// walks: for every delta on the {0, 1/T, ..., 1} grid, delta*T plus the sum
/// of |mismatches| * prod(theta) over walks with more than delta*T
/// mismatches. Returns the per-delta objective values and their minimum.
pub fn brute_force_hamming_super(
    matrix: &WalkMatrix,
    truth: &[u32],
    ln_theta: &[f64],
    budget: &EnumerationBudget,
) -> Result<(Vec<f64>, f64)> {
    let t_len = truth.len();
    // Accumulate ln of sum_{walks with w mismatches} prod theta, per w.
    let mut mass_ln = vec![f64::NEG_INFINITY; t_len + 1];
    for_each_walk(matrix, t_len, budget, |walk| {
        let (w, ln) = walk_mismatch_ln_product(walk, truth, ln_theta);
        mass_ln[w] = log_sum_exp_acc(mass_ln[w], ln);
    })?;
    let mut per_delta = Vec::with_capacity(t_len + 1);
    for j in 0..=t_len {
        let mut tail_ln = f64::NEG_INFINITY;
        for (w, &mass) in mass_ln.iter().enumerate().skip(j + 1) {
            tail_ln = log_sum_exp_acc(tail_ln, (w as f64).ln() + mass);
        }
        let tail = if tail_ln == f64::NEG_INFINITY {
            0.0
        } else {
            tail_ln.exp()
        };
        per_delta.push(j as f64 + tail);
    }
    let min = per_delta.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((per_delta, min))
}

/// Brute-force fine Hamming bound: the coarse objective plus, per walk, the
/// first-k sum of the agreeing steps.
pub fn brute_force_hamming_fine(
    matrix: &WalkMatrix,
    truth: &[u32],
    ln_theta: &[f64],
    first_k: &[f64],
    budget: &EnumerationBudget,
) -> Result<f64> {
    let (_, coarse_min) = brute_force_hamming_super(matrix, truth, ln_theta, budget)?;
    let t_len = truth.len();
    let mut refine_ln = f64::NEG_INFINITY;
    for_each_walk(matrix, t_len, budget, |walk| {
        let (w, ln) = walk_mismatch_ln_product(walk, truth, ln_theta);
        let f = first_k[t_len - w];
        if f > 0.0 {
            refine_ln = log_sum_exp_acc(refine_ln, f.ln() + ln);
        }
    })?;
    let refine = if refine_ln == f64::NEG_INFINITY {
        0.0
    } else {
        refine_ln.exp()
    };
    Ok(coarse_min + refine)
}

/// Brute-force destination bound: distance of each walk's final cluster to
/// the true destination, weighted by the walk's theta product.
pub fn brute_force_destination(
    matrix: &WalkMatrix,
    truth: &[u32],
    ln_theta: &[f64],
    distances: &[f64],
    budget: &EnumerationBudget,
) -> Result<f64> {
    let mut total_ln = f64::NEG_INFINITY;
    for_each_walk(matrix, truth.len(), budget, |walk| {
        let (_, ln) = walk_mismatch_ln_product(walk, truth, ln_theta);
        let d = distances[*walk.last().unwrap() as usize];
        if d > 0.0 {
            total_ln = log_sum_exp_acc(total_ln, d.ln() + ln);
        }
    })?;
    Ok(if total_ln == f64::NEG_INFINITY {
        0.0
    } else {
        total_ln.exp()
    })
}

/// Splitmix64 stream with polar-method Gaussians; deliberately a different
/// generator and a different Gaussian transform than the production sampler.
pub struct OracleRng {
    state: u64,
    spare: Option<f64>,
}

impl OracleRng {
    pub fn new(seed: u64) -> OracleRng {
        OracleRng {
            state: seed ^ 0x6A09_E667_F3BC_C909,
            spare: None,
        }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let scale = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * scale);
                return u * scale;
            }
        }
    }

    fn index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Monte Carlo estimate with a 3-sigma binomial radius.
#[derive(Clone, Copy, Debug)]
pub struct ExceedanceEstimate {
    pub frequency: f64,
    pub three_sigma: f64,
    pub samples: u64,
}

/// Empirical frequency of the event "an alternative walk's coarsened sum
/// beats the true walk's" for given per-step cluster sizes. Steps where the
/// walks overlap contribute the same value to both sides and cancel.
pub fn monte_carlo_exceedance(
    noise: &NoiseModel,
    true_sizes: &[u32],
    alt_sizes: &[u32],
    overlap: &[bool],
    samples: u64,
    seed: u64,
) -> Result<ExceedanceEstimate> {
    if true_sizes.len() != alt_sizes.len() || true_sizes.len() != overlap.len() {
        return Err(Error::DimensionMismatch(
            "size and overlap vectors must share a length".into(),
        ));
    }
    if samples < 10_000 {
        return Err(Error::InvalidInput(
            "at least 10^4 samples required for a stable frequency".into(),
        ));
    }
    let mu = noise.mu();
    let sigma = noise.sigma();
    let mut rng = OracleRng::new(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut true_sum = 0.0;
        let mut alt_sum = 0.0;
        for t in 0..true_sizes.len() {
            if overlap[t] {
                continue;
            }
            // On the true walk: max of one mean-mu draw and size-1 noise draws.
            let mut on = mu + sigma * rng.gaussian();
            for _ in 1..true_sizes[t] {
                on = on.max(sigma * rng.gaussian());
            }
            true_sum += on;
            // Off the true walk: max of size noise draws.
            let mut off = sigma * rng.gaussian();
            for _ in 1..alt_sizes[t] {
                off = off.max(sigma * rng.gaussian());
            }
            alt_sum += off;
        }
        if alt_sum >= true_sum {
            hits += 1;
        }
    }
    let frequency = hits as f64 / samples as f64;
    let three_sigma = 3.0 * (frequency * (1.0 - frequency) / samples as f64).sqrt();
    Ok(ExceedanceEstimate {
        frequency,
        three_sigma,
        samples,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct MgfEstimate {
    pub mean: f64,
    pub three_sigma: f64,
    pub samples: u64,
}

/// Empirical E[exp(s * max of l iid N(0, sigma^2))] with a bootstrap
/// interval. Rejects s*sigma > 3, where the estimator's tail makes the
/// sample mean unstable at any feasible sample size.
pub fn monte_carlo_mgf(sigma: f64, s: f64, l: u32, samples: u64, seed: u64) -> Result<MgfEstimate> {
    if s * sigma > 3.0 {
        return Err(Error::VarianceGuard(format!(
            "s*sigma = {} too large; use s*sigma <= 3",
            s * sigma
        )));
    }
    if l == 0 {
        return Err(Error::InvalidInput("l must be >= 1".into()));
    }
    let mut rng = OracleRng::new(seed);
    let mut draws = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        let mut max = sigma * rng.gaussian();
        for _ in 1..l {
            max = max.max(sigma * rng.gaussian());
        }
        draws.push((s * max).exp());
    }
    let mean = draws.iter().sum::<f64>() / samples as f64;
    // Bootstrap the sample mean.
    const RESAMPLES: usize = 64;
    let mut boot_means = Vec::with_capacity(RESAMPLES);
    for _ in 0..RESAMPLES {
        let mut sum = 0.0;
        for _ in 0..samples {
            sum += draws[rng.index(draws.len())];
        }
        boot_means.push(sum / samples as f64);
    }
    let boot_center = boot_means.iter().sum::<f64>() / RESAMPLES as f64;
    let boot_var = boot_means
        .iter()
        .map(|m| (m - boot_center) * (m - boot_center))
        .sum::<f64>()
        / (RESAMPLES - 1) as f64;
    Ok(MgfEstimate {
        mean,
        three_sigma: 3.0 * boot_var.sqrt(),
        samples,
    })
}

/// Q(x) by Simpson quadrature of the normal density over [x, x+14].
pub fn quadrature_gaussian_tail(x: f64) -> f64 {
    if x < -8.0 {
        return 1.0 - quadrature_gaussian_tail(-x);
    }
    let density = |u: f64| (-u * u / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let steps = 28_000usize; // even
    let width = 14.0;
    let h = width / steps as f64;
    let mut sum = density(x) + density(x + width);
    for i in 1..steps {
        let u = x + i as f64 * h;
        sum += density(u) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// All-pairs hop distances by Floyd-Warshall over an explicit edge list.
pub fn floyd_warshall(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<Option<u32>>> {
    const INF: u32 = u32::MAX / 4;
    let mut dist = vec![vec![INF; n]; n];
    for (v, row) in dist.iter_mut().enumerate() {
        row[v] = 0;
    }
    for &(a, b) in edges {
        dist[a as usize][b as usize] = 1;
        dist[b as usize][a as usize] = 1;
    }
    for k in 0..n {
        let row_k = dist[k].clone();
        for row_i in dist.iter_mut() {
            let dik = row_i[k];
            if dik == INF {
                continue;
            }
            for (dij, dkj) in row_i.iter_mut().zip(&row_k) {
                let through = dik + dkj;
                if through < *dij {
                    *dij = through;
                }
            }
        }
    }
    dist.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|d| if d >= INF { None } else { Some(d) })
                .collect()
        })
        .collect()
}

/// Two-sample Kolmogorov-Smirnov statistic (max CDF gap). Ties advance both
/// pointers together so equal samples compare as equal distributions.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j) = (0usize, 0usize);
    let mut stat = 0.0f64;
    while i < a.len() && j < b.len() {
        let value = a[i].min(b[j]);
        while i < a.len() && a[i] == value {
            i += 1;
        }
        while j < b.len() && b[j] == value {
            j += 1;
        }
        let fa = i as f64 / a.len() as f64;
        let fb = j as f64 / b.len() as f64;
        stat = stat.max((fa - fb).abs());
    }
    stat
}

/// Convenience: per-cluster ln theta values indexed by cluster id.
pub fn ln_theta_by_cluster(table: &ThetaTable, cluster_sizes: &[u32]) -> Vec<f64> {
    cluster_sizes.iter().map(|&l| table.ln_theta(l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_node_path_walks() {
        let matrix = WalkMatrix::new(2, &[(0, 1)], &[]);
        let walks = enumerate_connected_walks(&matrix, 3, &EnumerationBudget::fine()).unwrap();
        assert_eq!(walks, vec![vec![0, 1, 0], vec![1, 0, 1]]);
    }

    #[test]
    fn triangle_has_six_two_step_walks() {
        let matrix = WalkMatrix::new(3, &[(0, 1), (0, 2), (1, 2)], &[]);
        let walks = enumerate_connected_walks(&matrix, 2, &EnumerationBudget::fine()).unwrap();
        assert_eq!(walks.len(), 6);
    }

    #[test]
    fn walk_count_matches_adjacency_power() {
        // Deterministic 6-node graph; count of length-4 walks equals the sum
        // of all entries of A^3.
        let edges = [(0u32, 1), (0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (1, 5)];
        let matrix = WalkMatrix::new(6, &edges, &[]);
        let walks = enumerate_connected_walks(&matrix, 4, &EnumerationBudget::fine()).unwrap();
        let mut a = [[0u64; 6]; 6];
        for &(x, y) in &edges {
            a[x as usize][y as usize] = 1;
            a[y as usize][x as usize] = 1;
        }
        let mul = |p: [[u64; 6]; 6], q: [[u64; 6]; 6]| {
            let mut r = [[0u64; 6]; 6];
            for i in 0..6 {
                for k in 0..6 {
                    for j in 0..6 {
                        r[i][j] += p[i][k] * q[k][j];
                    }
                }
            }
            r
        };
        let a3 = mul(mul(a, a), a);
        let total: u64 = a3.iter().flatten().sum();
        assert_eq!(walks.len() as u64, total);
    }

    #[test]
    fn budget_is_enforced() {
        let matrix = WalkMatrix::new(9, &[(0, 1)], &[]);
        assert!(matches!(
            enumerate_connected_walks(&matrix, 2, &EnumerationBudget::fine()),
            Err(Error::BudgetExceeded(_))
        ));
        let matrix = WalkMatrix::new(4, &[(0, 1)], &[]);
        assert!(matches!(
            enumerate_connected_walks(&matrix, 7, &EnumerationBudget::fine()),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn self_loops_allow_staying() {
        let matrix = WalkMatrix::new(2, &[(0, 1)], &[0]);
        let walks = enumerate_connected_walks(&matrix, 2, &EnumerationBudget::coarse()).unwrap();
        assert_eq!(walks, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn quadrature_matches_known_tail_values() {
        assert!((quadrature_gaussian_tail(0.0) - 0.5).abs() < 1e-9);
        assert!((quadrature_gaussian_tail(1.96) - 0.0249979) < 1e-6);
        let q2 = quadrature_gaussian_tail(2.0);
        assert!(((q2 - 0.02275013194817921) / 0.02275013194817921).abs() < 1e-8);
    }

    #[test]
    fn exceedance_of_identical_walks_is_one() {
        let noise = NoiseModel::new(2.0, 1.0).unwrap();
        let est =
            monte_carlo_exceedance(&noise, &[3, 3], &[3, 3], &[true, true], 10_000, 1).unwrap();
        assert_eq!(est.frequency, 1.0);
    }

    #[test]
    fn high_snr_exceedance_is_rare() {
        let noise = NoiseModel::new(10.0, 1.0).unwrap();
        let est = monte_carlo_exceedance(&noise, &[1], &[1], &[false], 1_000_000, 7).unwrap();
        assert!(est.frequency < 1e-4, "frequency {}", est.frequency);
    }

    #[test]
    fn mgf_single_gaussian_matches_analytic() {
        let est = monte_carlo_mgf(1.0, 1.0, 1, 400_000, 3).unwrap();
        let analytic = (0.5f64).exp();
        assert!(
            (est.mean - analytic).abs() <= est.three_sigma.max(0.01),
            "mean {} vs {analytic} (3s {})",
            est.mean,
            est.three_sigma
        );
    }

    #[test]
    fn mgf_max_of_two_matches_closed_form() {
        // E[e^{s max(X1, X2)}] = 2 e^{s^2 sigma^2 / 2} Phi(s sigma / sqrt(2));
        // at sigma = 1, s = 1 that is 2 e^{1/2} Phi(1/sqrt(2)) ~= 2.50688.
        let analytic = 2.0 * (0.5f64).exp() * (1.0 - quadrature_gaussian_tail(1.0 / 2.0f64.sqrt()));
        assert!((analytic - 2.50688).abs() < 1e-4);
        let est = monte_carlo_mgf(1.0, 1.0, 2, 400_000, 5).unwrap();
        assert!(
            (est.mean - analytic).abs() <= est.three_sigma.max(0.02),
            "mean {} vs {analytic}",
            est.mean
        );
    }

    #[test]
    fn mgf_variance_guard() {
        assert!(matches!(
            monte_carlo_mgf(1.0, 4.0, 2, 10_000, 1),
            Err(Error::VarianceGuard(_))
        ));
    }

    #[test]
    fn floyd_warshall_line_graph() {
        let dist = floyd_warshall(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(dist[0][3], Some(3));
        assert_eq!(dist[2][2], Some(0));
        let split = floyd_warshall(3, &[(0, 1)]);
        assert_eq!(split[0][2], None);
    }

    #[test]
    fn ks_statistic_zero_for_identical_samples() {
        let a = vec![1.0, 2.0, 3.0, 4.0];
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        let b = vec![10.0, 11.0, 12.0, 13.0];
        assert_eq!(ks_two_sample(&a, &b), 1.0);
    }
}
