use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every tunable of a scenario. Powers and thresholds are stored in the
/// units people quote them in (dBm, dB); the channel layer converts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub num_tenants: usize,
    pub cell_radius_m: f64,
    pub max_d2d_range_m: f64,
    pub num_cues: usize,
    pub num_d2d_links: usize,
    /// Fraction of the CUEs subscribed to each tenant.
    pub cue_split: Vec<f64>,
    /// RBs owned by each tenant.
    pub rb_pool_sizes: Vec<usize>,
    /// Fraction of each tenant's RBs carrying an active CUE.
    pub cue_utilization: Vec<f64>,
    pub p_cue_dbm: f64,
    pub p_due_dbm: f64,
    pub l_max: usize,
    pub gamma_th_db: f64,
    pub gamma_tilde_th_db: f64,
    pub r_th_bps: f64,
    pub shadowing_sigma_db: f64,
    pub noise_psd_dbm_hz: f64,
    pub rb_bandwidth_hz: f64,
    pub rng_seed: u64,
    /// Explicit initiator tenant per link; when absent links alternate
    /// 0, 1, 0, 1, ...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initiator_tenants: Option<Vec<usize>>,
    /// Inter-cell interference power in watts. Single-cell studies keep it 0.
    #[serde(default)]
    pub inter_cell_interference_w: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_tenants: 2,
            cell_radius_m: 400.0,
            max_d2d_range_m: 100.0,
            num_cues: 50,
            num_d2d_links: 20,
            cue_split: vec![2.0 / 3.0, 1.0 / 3.0],
            rb_pool_sizes: vec![50, 25],
            cue_utilization: vec![1.0, 1.0],
            p_cue_dbm: 20.0,
            p_due_dbm: 15.0,
            l_max: 4,
            gamma_th_db: 0.0,
            gamma_tilde_th_db: 5.0,
            r_th_bps: 180_000.0,
            shadowing_sigma_db: 8.0,
            noise_psd_dbm_hz: -174.0,
            rb_bandwidth_hz: 180_000.0,
            rng_seed: 1,
            initiator_tenants: None,
            inter_cell_interference_w: 0.0,
        }
    }
}

impl ScenarioConfig {
    /// Heterogeneous slices: tenant A holds a pool twice the size of B's,
    /// both fully loaded. One RB per CUE needs 75 CUEs to fill 50 + 25 RBs.
    pub fn double_pool() -> Self {
        Self {
            num_cues: 75,
            ..Self::default()
        }
    }

    /// Equal 25 + 25 RB slices with an even CUE split; used when sweeping
    /// tenant B's load.
    pub fn equal_pools() -> Self {
        Self {
            cue_split: vec![0.5, 0.5],
            rb_pool_sizes: vec![25, 25],
            ..Self::default()
        }
    }

    pub fn total_rbs(&self) -> usize {
        self.rb_pool_sizes.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_tenants;
        if n < 2 {
            return Err(invalid("num_tenants must be at least 2"));
        }
        for (name, len) in [
            ("cue_split", self.cue_split.len()),
            ("rb_pool_sizes", self.rb_pool_sizes.len()),
            ("cue_utilization", self.cue_utilization.len()),
        ] {
            if len != n {
                return Err(invalid(format!(
                    "{name} has {len} entries but num_tenants is {n}"
                )));
            }
        }
        if !(self.cell_radius_m.is_finite() && self.cell_radius_m > 0.0) {
            return Err(invalid("cell_radius_m must be positive"));
        }
        if !(self.max_d2d_range_m.is_finite() && self.max_d2d_range_m > 0.0) {
            return Err(invalid("max_d2d_range_m must be positive"));
        }
        if self.num_cues == 0 {
            return Err(invalid("num_cues must be at least 1"));
        }
        if self.l_max == 0 {
            return Err(invalid("l_max must be at least 1"));
        }
        if self.cue_split.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(invalid("cue_split fractions must lie in [0, 1]"));
        }
        let split_sum: f64 = self.cue_split.iter().sum();
        if (split_sum - 1.0).abs() > 1e-9 {
            return Err(invalid(format!(
                "cue_split must sum to 1 (got {split_sum})"
            )));
        }
        if self
            .cue_utilization
            .iter()
            .any(|u| !(0.0..=1.0).contains(u))
        {
            return Err(invalid("cue_utilization fractions must lie in [0, 1]"));
        }
        if self.rb_pool_sizes.contains(&0) {
            return Err(invalid("every rb_pool_sizes entry must be at least 1"));
        }
        if self.num_d2d_links > self.total_rbs() {
            return Err(invalid(format!(
                "num_d2d_links ({}) exceeds the {} RBs available; some link could never get an RB",
                self.num_d2d_links,
                self.total_rbs()
            )));
        }
        if !(self.rb_bandwidth_hz.is_finite() && self.rb_bandwidth_hz > 0.0) {
            return Err(invalid("rb_bandwidth_hz must be positive"));
        }
        if !(self.shadowing_sigma_db.is_finite() && self.shadowing_sigma_db >= 0.0) {
            return Err(invalid("shadowing_sigma_db must be non-negative"));
        }
        if self.r_th_bps.is_nan() || self.r_th_bps < 0.0 {
            return Err(invalid("r_th_bps must be non-negative"));
        }
        if self.gamma_th_db.is_nan() || self.gamma_tilde_th_db.is_nan() {
            return Err(invalid("SINR thresholds must be numbers"));
        }
        if !(self.inter_cell_interference_w.is_finite() && self.inter_cell_interference_w >= 0.0) {
            return Err(invalid("inter_cell_interference_w must be non-negative"));
        }
        if let Some(tenants) = &self.initiator_tenants {
            if tenants.len() != self.num_d2d_links {
                return Err(invalid(format!(
                    "initiator_tenants lists {} links but num_d2d_links is {}",
                    tenants.len(),
                    self.num_d2d_links
                )));
            }
            if tenants.iter().any(|&t| t >= n) {
                return Err(invalid("initiator_tenants refers to an unknown tenant"));
            }
        }
        Ok(())
    }

    /// Number of CUEs per tenant: floor of each share, with the leftover
    /// handed out by largest remainder (ties to the lower tenant id).
    pub fn cue_counts(&self) -> Vec<usize> {
        largest_remainder(&self.cue_split, self.num_cues)
    }
}

pub(crate) fn largest_remainder(fractions: &[f64], total: usize) -> Vec<usize> {
    let exact: Vec<f64> = fractions.iter().map(|f| f * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    // stable sort keeps lower tenant ids first on ties
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra)
    });
    for &t in order.iter().cycle().take(total.saturating_sub(assigned)) {
        counts[t] += 1;
    }
    counts
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}
