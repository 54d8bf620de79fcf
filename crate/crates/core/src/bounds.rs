//! Numerical evaluation of the decoding error bounds.
//!
//! The per-step factor theta(s, l) bounds the probability that the maximum of
//! l off-path Gaussians beats an on-path observation, with the exponent fixed
//! at s = mu/(2 sigma^2). Expected-distance bounds over all coarse walks are
//! sums of products of such factors; their sum-product structure makes them
//! computable by dynamic programming over (time, end cluster) — and, for the
//! Hamming flavors, the running mismatch count — instead of enumerating the
//! exponentially many walks. All accumulation runs in log space.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::digest::digest_hex;
use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::normal::gaussian_cdf_inv;
use crate::partition::SuperGraph;
use crate::signal::NoiseModel;

pub use crate::normal::{gaussian_cdf, gaussian_pdf, gaussian_quantile, gaussian_tail};

/// Resolution of the uniform grid scanned before golden-section refinement of
/// the split point eta.
pub const ETA_GRID_POINTS: usize = 1025;

/// Bound on E[exp(s * max of l iid N(0, sigma^2))]: for any split point eta
/// of the order statistic's CDF, the expectation splits into a below-eta part
/// bounded by l*eta^(l-1) times a Gaussian completion and an above-eta part
/// bounded via Cauchy-Schwarz; both reduce to normal tails. Minimized over
/// eta by grid scan plus golden-section refinement.
pub fn gaussian_max_mgf_bound(sigma: f64, s: f64, l: u32) -> f64 {
    debug_assert!(l >= 1);
    let e_half = (0.5 * s * s * sigma * sigma).exp();
    let e_full = (s * s * sigma * sigma).exp();
    let objective = |eta: f64| mgf_objective(sigma, s, l, eta, e_half, e_full);

    let mut best_idx = 0usize;
    let mut best = f64::INFINITY;
    let step = 1.0 / (ETA_GRID_POINTS - 1) as f64;
    for i in 0..ETA_GRID_POINTS {
        let value = objective(i as f64 * step);
        if value < best {
            best = value;
            best_idx = i;
        }
    }
    let lo = best_idx.saturating_sub(1) as f64 * step;
    let hi = ((best_idx + 1).min(ETA_GRID_POINTS - 1)) as f64 * step;
    let refined = golden_section_min(&objective, lo, hi);
    best.min(refined)
}

fn mgf_objective(sigma: f64, s: f64, l: u32, eta: f64, e_half: f64, e_full: f64) -> f64 {
    let lf = f64::from(l);
    let term1 = if eta == 0.0 {
        0.0
    } else {
        let z = gaussian_cdf_inv(eta);
        lf * eta.powi(l as i32 - 1) * e_half * gaussian_cdf(z - s * sigma)
    };
    let spread = (lf * lf / (2.0 * lf - 1.0)) * (1.0 - eta.powi(2 * l as i32 - 1));
    let term2 = if spread <= 0.0 {
        0.0
    } else {
        let z = gaussian_cdf_inv(eta);
        spread.sqrt() * e_full * gaussian_tail(z - 2.0 * s * sigma).sqrt()
    };
    term1 + term2
}

fn golden_section_min(objective: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    for _ in 0..70 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = objective(x2);
        }
    }
    f1.min(f2)
}

/// theta(mu/(2 sigma^2), l): the per-step exceedance factor. The eta = 1
/// evaluation equals l*exp(-mu^2/(4 sigma^2)) and is a member of the
/// minimized family, so the result is clamped to never exceed it. theta is a
/// strictly positive quantity; at extreme snr where the true value drops
/// below the floating-point range it floors at the smallest positive double
/// (still a valid upper bound).
pub fn theta(noise: &NoiseModel, l: u32) -> f64 {
    let sigma = noise.sigma();
    let mu = noise.mu();
    let s = mu / (2.0 * sigma * sigma);
    let on_path_factor = (0.5 * s * s * sigma * sigma - mu * s).exp();
    let raw = on_path_factor * gaussian_max_mgf_bound(sigma, s, l);
    let eta_one = f64::from(l) * (s * s * sigma * sigma - mu * s).exp();
    raw.min(eta_one).max(f64::MIN_POSITIVE)
}

/// Memoized theta values for the cluster sizes a computation will touch.
#[derive(Clone, Debug)]
pub struct ThetaTable {
    noise: NoiseModel,
    s: f64,
    values: BTreeMap<u32, (f64, f64)>,
}

impl ThetaTable {
    pub fn build(noise: NoiseModel, sizes: impl IntoIterator<Item = u32>) -> ThetaTable {
        let s = noise.mu() / (2.0 * noise.sigma() * noise.sigma());
        let mut values = BTreeMap::new();
        for l in sizes {
            values.entry(l).or_insert_with(|| {
                let t = theta(&noise, l);
                (t, t.ln())
            });
        }
        ThetaTable { noise, s, values }
    }

    pub fn for_supergraph(noise: NoiseModel, supergraph: &SuperGraph) -> ThetaTable {
        ThetaTable::build(noise, supergraph.cluster_sizes().iter().copied())
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Memoized theta for a cluster size covered at build time.
    pub fn theta(&self, l: u32) -> f64 {
        self.values
            .get(&l)
            .unwrap_or_else(|| panic!("theta table missing cluster size {l}"))
            .0
    }

    pub fn ln_theta(&self, l: u32) -> f64 {
        self.values
            .get(&l)
            .unwrap_or_else(|| panic!("theta table missing cluster size {l}"))
            .1
    }
}

/// Product of theta factors along the mismatch steps of a candidate walk,
/// accumulated in log space. The empty product is 1.
pub fn pairwise_path_bound(table: &ThetaTable, wrong_cluster_sizes: &[u32]) -> f64 {
    let ln: f64 = wrong_cluster_sizes.iter().map(|&l| table.ln_theta(l)).sum();
    ln.exp()
}

/// Prefix sums of the sorted (descending) theta values along the true
/// projected path: `get(k)` is the largest possible sum of theta over any k
/// of the true path's steps.
#[derive(Clone, Debug)]
pub struct FirstKSums {
    prefix: Vec<f64>,
}

impl FirstKSums {
    pub fn new(table: &ThetaTable, true_path_cluster_sizes: &[u32]) -> FirstKSums {
        let mut thetas: Vec<f64> = true_path_cluster_sizes
            .iter()
            .map(|&l| table.theta(l))
            .collect();
        thetas.sort_by(|a, b| b.total_cmp(a));
        let mut prefix = Vec::with_capacity(thetas.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for t in thetas {
            acc += t;
            prefix.push(acc);
        }
        FirstKSums { prefix }
    }

    pub fn get(&self, k: usize) -> f64 {
        self.prefix[k]
    }

    pub fn horizon(&self) -> usize {
        self.prefix.len() - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum BoundKind {
    HammingSuper,
    DestinationSuper,
    HammingFine,
    DestinationFine,
    RggClosedForm,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThetaParams {
    pub mu: f64,
    pub sigma: f64,
    pub s: f64,
}

/// One evaluated bound, ready for serialization.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    pub kind: BoundKind,
    /// Upper bound on the expected distance.
    pub value: f64,
    /// Hamming bounds are also reported per time step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized_value: Option<f64>,
    /// Minimizing delta for the Hamming bounds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_star: Option<f64>,
    pub theta_params: ThetaParams,
    pub runtime_ms: f64,
    pub config_digest: String,
}

impl BoundReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bound report serializes")
    }
}

fn log_sum_exp(acc: f64, x: f64) -> f64 {
    if acc == f64::NEG_INFINITY {
        return x;
    }
    if x == f64::NEG_INFINITY {
        return acc;
    }
    let max = acc.max(x);
    max + ((acc - max).exp() + (x - max).exp()).ln()
}

/// exp that keeps structural zeros at zero but never reports an underflowed
/// positive quantity as zero.
fn exp_guarded(ln: f64) -> f64 {
    if ln == f64::NEG_INFINITY {
        0.0
    } else {
        ln.exp().max(f64::MIN_POSITIVE)
    }
}

fn validate_bound_inputs(supergraph: &SuperGraph, truth: &[u32]) -> Result<()> {
    supergraph.validate_walk(truth)
}

/// ln S_T(cluster): sum over all walks ending at the cluster of the product
/// of theta factors along their mismatch steps. Two-case recursion per step:
/// multiply by theta when the walk sits off the true cluster, pass through
/// when it sits on it.
fn destination_partial_sums(
    supergraph: &SuperGraph,
    truth: &[u32],
    table: &ThetaTable,
) -> Vec<f64> {
    let m = supergraph.cluster_count();
    let ln_theta_of: Vec<f64> = (0..m as u32)
        .map(|c| table.ln_theta(supergraph.cluster_size(c)))
        .collect();
    let mut cur: Vec<f64> = (0..m as u32)
        .map(|c| {
            if c == truth[0] {
                0.0
            } else {
                ln_theta_of[c as usize]
            }
        })
        .collect();
    for &true_cluster in &truth[1..] {
        let mut next = vec![f64::NEG_INFINITY; m];
        for c in 0..m as u32 {
            let mut acc = f64::NEG_INFINITY;
            for &u in supergraph.step_neighbors(c) {
                acc = log_sum_exp(acc, cur[u as usize]);
            }
            if c != true_cluster {
                acc += ln_theta_of[c as usize];
            }
            next[c as usize] = acc;
        }
        cur = next;
    }
    cur
}

/// ln M[w] for w = 0..=T: total walk mass (theta products) of walks whose
/// mismatch count against the truth is exactly w, summed over end clusters.
fn hamming_mass_by_mismatch(
    supergraph: &SuperGraph,
    truth: &[u32],
    table: &ThetaTable,
) -> Vec<f64> {
    let m = supergraph.cluster_count();
    let t_len = truth.len();
    let ln_theta_of: Vec<f64> = (0..m as u32)
        .map(|c| table.ln_theta(supergraph.cluster_size(c)))
        .collect();

    // cur[w * m + c] = ln S_{tau, w}(c); only w <= tau is populated.
    let width = t_len + 1;
    let mut cur = vec![f64::NEG_INFINITY; width * m];
    for c in 0..m {
        if c as u32 == truth[0] {
            cur[c] = 0.0; // w = 0
        } else {
            cur[m + c] = ln_theta_of[c]; // w = 1
        }
    }
    let mut next = vec![f64::NEG_INFINITY; width * m];
    for (tau, &true_cluster) in truth.iter().enumerate().skip(1) {
        next.fill(f64::NEG_INFINITY);
        // A subpath through position tau has tau + 1 steps, so up to tau + 1
        // mismatches.
        for w in 0..=(tau + 1) {
            for c in 0..m as u32 {
                let value = if c == true_cluster {
                    if w == 0 {
                        // Only the all-correct subpath; the truth walk is
                        // validated, so its mass is exactly 1.
                        0.0
                    } else {
                        let mut acc = f64::NEG_INFINITY;
                        for &u in supergraph.step_neighbors(c) {
                            acc = log_sum_exp(acc, cur[w * m + u as usize]);
                        }
                        acc
                    }
                } else if w == 0 {
                    f64::NEG_INFINITY
                } else {
                    let mut acc = f64::NEG_INFINITY;
                    for &u in supergraph.step_neighbors(c) {
                        acc = log_sum_exp(acc, cur[(w - 1) * m + u as usize]);
                    }
                    acc + ln_theta_of[c as usize]
                };
                next[w * m + c as usize] = value;
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }

    (0..=t_len)
        .map(|w| {
            let mut acc = f64::NEG_INFINITY;
            for c in 0..m {
                acc = log_sum_exp(acc, cur[w * m + c]);
            }
            acc
        })
        .collect()
}

/// Scan delta over {0, 1/T, ..., 1}: delta*T plus the mismatch-weighted mass
/// of walks with more than delta*T mismatches. Returns (value, delta*).
fn minimize_over_delta(mass_ln: &[f64], t_len: usize) -> (f64, f64) {
    // suffix[j] = ln sum_{w > j} w * M[w]
    let mut suffix = vec![f64::NEG_INFINITY; t_len + 2];
    for w in (1..=t_len).rev() {
        suffix[w] = log_sum_exp(suffix[w + 1], (w as f64).ln() + mass_ln[w]);
    }
    let mut best = f64::INFINITY;
    let mut best_j = 0usize;
    for j in 0..=t_len {
        let value = j as f64 + exp_guarded_zero_ok(suffix[j + 1]);
        if value < best {
            best = value;
            best_j = j;
        }
    }
    (best, best_j as f64 / t_len as f64)
}

fn exp_guarded_zero_ok(ln: f64) -> f64 {
    if ln == f64::NEG_INFINITY {
        0.0
    } else {
        ln.exp()
    }
}

#[allow(clippy::too_many_arguments)]
fn report(
    kind: BoundKind,
    value: f64,
    t_len: usize,
    delta_star: Option<f64>,
    table: &ThetaTable,
    digest_payload: &str,
    started: Instant,
    normalized: bool,
) -> BoundReport {
    BoundReport {
        kind,
        value,
        normalized_value: normalized.then(|| value / t_len as f64),
        delta_star,
        theta_params: ThetaParams {
            mu: table.noise().mu(),
            sigma: table.noise().sigma(),
            s: table.s(),
        },
        runtime_ms: started.elapsed().as_secs_f64() * 1e3,
        config_digest: digest_hex(digest_payload.as_bytes()),
    }
}

fn digest_payload(
    kind: &str,
    supergraph: &SuperGraph,
    truth: &[u32],
    table: &ThetaTable,
) -> String {
    format!(
        "{kind}|m={}|T={}|mu={}|sigma={}|truth={truth:?}|sizes={:?}",
        supergraph.cluster_count(),
        truth.len(),
        table.noise().mu(),
        table.noise().sigma(),
        supergraph.cluster_sizes(),
    )
}

/// Expected coarse Hamming distance bound: min over delta of delta*T plus the
/// mismatch-weighted mass of walks with more than delta*T mismatches.
pub fn bound_hamming_super(
    supergraph: &SuperGraph,
    truth: &[u32],
    table: &ThetaTable,
) -> Result<BoundReport> {
    let started = Instant::now();
    validate_bound_inputs(supergraph, truth)?;
    let mass = hamming_mass_by_mismatch(supergraph, truth, table);
    let (raw, delta_star) = minimize_over_delta(&mass, truth.len());
    // Exactly zero only when no walk deviates from the truth at all; an
    // underflowed positive quantity reports the smallest positive double.
    let no_wrong_walks = mass[1..].iter().all(|&m| m == f64::NEG_INFINITY);
    let value = match (raw == 0.0, no_wrong_walks) {
        (true, true) => 0.0,
        (true, false) => f64::MIN_POSITIVE,
        _ => raw,
    };
    Ok(report(
        BoundKind::HammingSuper,
        value,
        truth.len(),
        Some(delta_star),
        table,
        &digest_payload("hamming-super", supergraph, truth, table),
        started,
        true,
    ))
}

/// Expected fine Hamming distance bound: the coarse bound plus, for every
/// walk, the largest possible sum of theta over the steps where the walk
/// agrees with the truth but the in-cluster refinement can still miss.
pub fn bound_hamming_fine(
    supergraph: &SuperGraph,
    truth: &[u32],
    table: &ThetaTable,
) -> Result<BoundReport> {
    let started = Instant::now();
    validate_bound_inputs(supergraph, truth)?;
    let t_len = truth.len();
    let truth_sizes: Vec<u32> = truth.iter().map(|&c| supergraph.cluster_size(c)).collect();
    let first_k = FirstKSums::new(table, &truth_sizes);
    let mass = hamming_mass_by_mismatch(supergraph, truth, table);
    let (coarse_part, delta_star) = minimize_over_delta(&mass, t_len);
    let mut refine_ln = f64::NEG_INFINITY;
    for (w, &mass_ln) in mass.iter().enumerate() {
        let f = first_k.get(t_len - w);
        if f > 0.0 {
            refine_ln = log_sum_exp(refine_ln, f.ln() + mass_ln);
        }
    }
    // The refinement term always includes the true walk's own first-k mass,
    // so this bound is structurally positive.
    let raw = coarse_part + exp_guarded_zero_ok(refine_ln);
    let value = raw.max(f64::MIN_POSITIVE);
    Ok(report(
        BoundKind::HammingFine,
        value,
        t_len,
        Some(delta_star),
        table,
        &digest_payload("hamming-fine", supergraph, truth, table),
        started,
        true,
    ))
}

/// Expected coarse destination distance bound: per end cluster, the distance
/// to the true final cluster weighted by that cluster's walk mass.
pub fn bound_destination_super(
    supergraph: &SuperGraph,
    truth: &[u32],
    table: &ThetaTable,
    distance_to_true_end: &[f64],
) -> Result<BoundReport> {
    destination_bound(
        supergraph,
        truth,
        table,
        distance_to_true_end,
        BoundKind::DestinationSuper,
        "destination-super",
    )
}

/// Expected fine destination distance bound: as the coarse flavor but
/// weighted by the maximum fine-node distance between cluster pairs.
pub fn bound_destination_fine(
    supergraph: &SuperGraph,
    truth: &[u32],
    table: &ThetaTable,
    max_distance_to_true_end: &[f64],
) -> Result<BoundReport> {
    destination_bound(
        supergraph,
        truth,
        table,
        max_distance_to_true_end,
        BoundKind::DestinationFine,
        "destination-fine",
    )
}

fn destination_bound(
    supergraph: &SuperGraph,
    truth: &[u32],
    table: &ThetaTable,
    distances: &[f64],
    kind: BoundKind,
    kind_name: &str,
) -> Result<BoundReport> {
    let started = Instant::now();
    validate_bound_inputs(supergraph, truth)?;
    if distances.len() != supergraph.cluster_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} distances for {} clusters",
            distances.len(),
            supergraph.cluster_count()
        )));
    }
    if distances.iter().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::InvalidInput(
            "destination distances must be finite and nonnegative".into(),
        ));
    }
    let partials = destination_partial_sums(supergraph, truth, table);
    let mut total_ln = f64::NEG_INFINITY;
    for (c, &ln_s) in partials.iter().enumerate() {
        if distances[c] > 0.0 {
            total_ln = log_sum_exp(total_ln, distances[c].ln() + ln_s);
        }
    }
    let value = exp_guarded(total_ln);
    let payload = format!(
        "{}|dist={:?}",
        digest_payload(kind_name, supergraph, truth, table),
        distances
    );
    Ok(report(
        kind,
        value,
        truth.len(),
        None,
        table,
        &payload,
        started,
        false,
    ))
}

/// Closed-form Hamming bound for square-partitioned random geometric graphs:
/// 9 * exp(-mu^2 / (4 sigma^2)) * s_m * T, valid above the SNR threshold
/// 2 * sqrt(ln(9 * s_m)).
pub fn rgg_closed_form_value(noise: &NoiseModel, max_cluster_size: u32, t_len: usize) -> f64 {
    let snr = noise.snr();
    9.0 * (-snr * snr / 4.0).exp() * f64::from(max_cluster_size) * t_len as f64
}

pub fn rgg_closed_form_threshold(max_cluster_size: u32) -> f64 {
    2.0 * (9.0 * f64::from(max_cluster_size)).ln().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClosedFormBound {
    Bound(f64),
    ConditionViolated { snr: f64, threshold: f64 },
}

pub fn rgg_closed_form(noise: &NoiseModel, max_cluster_size: u32, t_len: usize) -> ClosedFormBound {
    let threshold = rgg_closed_form_threshold(max_cluster_size);
    let snr = noise.snr();
    if snr > threshold {
        ClosedFormBound::Bound(rgg_closed_form_value(noise, max_cluster_size, t_len))
    } else {
        ClosedFormBound::ConditionViolated { snr, threshold }
    }
}
