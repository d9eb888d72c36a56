//! Orthogonal round-robin uplink scheduling of cellular users.
//!
//! Each tenant serves its CUEs on its own pool, one RB per CUE and one CUE
//! per RB. At partial utilization the lowest-index CUEs are the active ones,
//! and the RB they start on rotates with the trial index so no RB is
//! systematically favoured.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CueId, RbId, ScenarioConfig, TenantId, Topology};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CueSchedule {
    rb_to_cue: Vec<Option<CueId>>,
    cue_to_rb: Vec<Option<RbId>>,
}

impl CueSchedule {
    /// Nobody transmits.
    pub fn idle(num_rbs: usize, num_cues: usize) -> Self {
        Self {
            rb_to_cue: vec![None; num_rbs],
            cue_to_rb: vec![None; num_cues],
        }
    }

    /// Builds a schedule from explicit (CUE, RB) pairs; both sides must be
    /// used at most once.
    pub fn from_pairs(
        num_rbs: usize,
        num_cues: usize,
        pairs: impl IntoIterator<Item = (CueId, RbId)>,
    ) -> Result<Self> {
        let mut s = Self::idle(num_rbs, num_cues);
        for (cue, rb) in pairs {
            if rb.0 >= num_rbs {
                return Err(Error::UnknownRb(rb));
            }
            if cue.0 >= num_cues {
                return Err(Error::InvalidConfig(format!("unknown {cue}")));
            }
            if s.rb_to_cue[rb.0].is_some() || s.cue_to_rb[cue.0].is_some() {
                return Err(Error::InvalidConfig(format!(
                    "{cue} on {rb} breaks orthogonality"
                )));
            }
            s.rb_to_cue[rb.0] = Some(cue);
            s.cue_to_rb[cue.0] = Some(rb);
        }
        Ok(s)
    }

    pub fn cue_on(&self, rb: RbId) -> Option<CueId> {
        self.rb_to_cue.get(rb.0).copied().flatten()
    }

    pub fn rb_of(&self, cue: CueId) -> Option<RbId> {
        self.cue_to_rb.get(cue.0).copied().flatten()
    }

    pub fn num_rbs(&self) -> usize {
        self.rb_to_cue.len()
    }

    pub fn occupied(&self) -> impl Iterator<Item = (RbId, CueId)> + '_ {
        self.rb_to_cue
            .iter()
            .enumerate()
            .filter_map(|(rb, c)| c.map(|c| (RbId(rb), c)))
    }

    pub fn active_cues(&self) -> usize {
        self.cue_to_rb.iter().flatten().count()
    }

    pub(crate) fn rb_to_cue(&self) -> &[Option<CueId>] {
        &self.rb_to_cue
    }
}

/// Number of RBs tenant `n` fills: `ceil(utilization * K_n)`, capped by the
/// CUEs it actually has.
pub fn occupied_count(utilization: f64, pool_size: usize, cues: usize) -> usize {
    // the epsilon keeps e.g. 0.6 * 25 = 14.999... from rounding up to 16
    let wanted = (utilization * pool_size as f64 - 1e-9).ceil().max(0.0) as usize;
    wanted.min(cues)
}

pub fn schedule_cues(
    topology: &Topology,
    cfg: &ScenarioConfig,
    trial_index: u64,
) -> Result<CueSchedule> {
    let pools = &topology.rb_pools;
    let mut schedule = CueSchedule::idle(pools.total(), topology.cues.len());
    for t in 0..pools.num_tenants() {
        let tenant = TenantId(t);
        let pool = pools.pool(tenant);
        let cues: Vec<CueId> = topology.cues_of(tenant).collect();
        let utilization = cfg.cue_utilization[t];
        if !(0.0..=1.0).contains(&utilization) {
            return Err(Error::InvalidConfig(format!(
                "utilization {utilization} of tenant {} is outside [0, 1]",
                tenant.label()
            )));
        }
        let active = occupied_count(utilization, pool.len(), cues.len());
        if active > pool.len() {
            return Err(Error::InvalidConfig(format!(
                "{active} active CUEs do not fit in the {} RBs of tenant {}",
                pool.len(),
                tenant.label()
            )));
        }
        let offset = (trial_index % pool.len() as u64) as usize;
        for (j, &cue) in cues.iter().take(active).enumerate() {
            let rb = pool[(offset + j) % pool.len()];
            schedule.rb_to_cue[rb.0] = Some(cue);
            schedule.cue_to_rb[cue.0] = Some(rb);
        }
    }
    Ok(schedule)
}
