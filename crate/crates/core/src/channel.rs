//! Path loss, shadowing, SINR and Shannon rates.
//!
//! The channel is frequency-flat: a link has one gain on every RB. What
//! makes RBs differ for a D2D link is which CUE, if any, transmits on
//! them. UE-to-UE paths (D2D pair, CUE to D2D receiver) use the D2D
//! path-loss law; UE-to-BS paths (CUE uplink, D2D transmitter to BS) use
//! the cellular one.
//!
//! The rate table is the hand-off to every allocator. An entry is zero
//! exactly when the pair is unusable: the D2D receiver would fall below
//! its SINR threshold, or the CUE already on that RB would fall below its
//! protection threshold. Because at most one D2D link may occupy an RB,
//! both conditions only depend on the (link, RB) pair and can be baked
//! into the table.

use std::io::Write;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CueId, LinkId, RbId, RbPools, ScenarioConfig, SeedStreams, Stream, Topology};
use crate::scheduler::CueSchedule;

/// Distances are clamped to this before path loss is evaluated.
pub const MIN_DISTANCE_M: f64 = 1.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}

fn check_distance(d_km: f64) -> Result<()> {
    if d_km > 0.0 && d_km.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "path loss needs a positive distance, got {d_km} km"
        )))
    }
}

/// D2D (UE-to-UE) path loss in dB for a distance in kilometres.
pub fn path_loss_d2d_db(d_km: f64) -> Result<f64> {
    check_distance(d_km)?;
    Ok(148.0 + 40.0 * d_km.log10())
}

/// Cellular (UE-to-BS) path loss in dB for a distance in kilometres.
pub fn path_loss_cue_db(d_km: f64) -> Result<f64> {
    check_distance(d_km)?;
    Ok(128.1 + 37.6 * d_km.log10())
}

/// Linear power gain of a path. Gains never exceed 1.
pub fn link_gain(pl_db: f64, shadow_db: f64) -> f64 {
    db_to_linear(-(pl_db + shadow_db)).min(1.0)
}

/// Thermal noise over `bw_hz`, in watts.
pub fn noise_power_w(psd_dbm_hz: f64, bw_hz: f64) -> Result<f64> {
    if !(bw_hz > 0.0) {
        return Err(Error::Domain(format!(
            "bandwidth must be positive, got {bw_hz} Hz"
        )));
    }
    Ok(dbm_to_watts(psd_dbm_hz + 10.0 * bw_hz.log10()))
}

pub fn shannon_rate(sinr: f64, bw_hz: f64) -> f64 {
    bw_hz * (1.0 + sinr).log2()
}

/// Rate-equivalent SINR of `rate_bps` spread over `rbs` RBs.
pub fn effective_sinr(rate_bps: f64, rbs: usize, bw_hz: f64) -> f64 {
    (rate_bps / (rbs as f64 * bw_hz)).exp2() - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PathKind {
    DeviceToDevice,
    DeviceToBs,
}

fn path_gain(kind: PathKind, distance_m: f64, shadow_db: f64) -> f64 {
    let d_km = distance_m.max(MIN_DISTANCE_M) / 1000.0;
    let pl = match kind {
        PathKind::DeviceToDevice => path_loss_d2d_db(d_km),
        PathKind::DeviceToBs => path_loss_cue_db(d_km),
    }
    .expect("clamped distance is positive");
    link_gain(pl, shadow_db)
}

/// Transmit powers, thresholds and noise shared by every SINR evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    pub p_cue_w: f64,
    pub p_due_w: f64,
    pub noise_power_w: f64,
    pub inter_cell_w: f64,
    /// D2D decoding threshold, linear.
    pub gamma_th: f64,
    /// CUE protection threshold, linear.
    pub gamma_tilde_th: f64,
    pub rb_bandwidth_hz: f64,
}

impl RadioParams {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        Ok(Self {
            p_cue_w: dbm_to_watts(cfg.p_cue_dbm),
            p_due_w: dbm_to_watts(cfg.p_due_dbm),
            noise_power_w: noise_power_w(cfg.noise_psd_dbm_hz, cfg.rb_bandwidth_hz)?,
            inter_cell_w: cfg.inter_cell_interference_w,
            gamma_th: db_to_linear(cfg.gamma_th_db),
            gamma_tilde_th: db_to_linear(cfg.gamma_tilde_th_db),
            rb_bandwidth_hz: cfg.rb_bandwidth_hz,
        })
    }
}

/// Linear gains of every path of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    /// D2D transmitter to its own receiver, per link.
    pub g_dd: Vec<f64>,
    /// CUE transmitter to D2D receiver, `[cue][link]`.
    pub g_cd: Vec<Vec<f64>>,
    /// CUE to BS, per CUE.
    pub g_cb: Vec<f64>,
    /// D2D transmitter to BS, per link.
    pub g_db: Vec<f64>,
}

impl Gains {
    /// Draws shadowing for every path and combines it with path loss.
    ///
    /// One standard normal is drawn per path, in a fixed order per stream:
    /// CUE uplinks from [`Stream::CueShadowing`]; the direct path, the
    /// path to the BS, then one path per CUE from the link's own
    /// [`Stream::LinkShadowing`].
    pub fn draw(topology: &Topology, sigma_db: f64, seeds: &SeedStreams) -> Self {
        let bs = topology.bs_position;
        let mut cue_rng = seeds.rng(Stream::CueShadowing);
        let g_cb = topology
            .cues
            .iter()
            .map(|c| {
                let z: f64 = StandardNormal.sample(&mut cue_rng);
                path_gain(PathKind::DeviceToBs, c.position.distance(&bs), sigma_db * z)
            })
            .collect();

        let num_links = topology.links.len();
        let mut g_dd = Vec::with_capacity(num_links);
        let mut g_db = Vec::with_capacity(num_links);
        let mut g_cd = vec![Vec::with_capacity(num_links); topology.cues.len()];
        for (i, link) in topology.links.iter().enumerate() {
            let mut rng = seeds.rng(Stream::LinkShadowing(i));
            let mut shadow = || -> f64 {
                let z: f64 = StandardNormal.sample(&mut rng);
                sigma_db * z
            };
            g_dd.push(path_gain(
                PathKind::DeviceToDevice,
                link.length_m(),
                shadow(),
            ));
            g_db.push(path_gain(
                PathKind::DeviceToBs,
                link.tx.distance(&bs),
                shadow(),
            ));
            for (c, cue) in topology.cues.iter().enumerate() {
                g_cd[c].push(path_gain(
                    PathKind::DeviceToDevice,
                    cue.position.distance(&link.rx),
                    shadow(),
                ));
            }
        }
        Self {
            g_dd,
            g_cd,
            g_cb,
            g_db,
        }
    }
}

/// Everything the allocators need about one trial's radio environment.
/// Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub gains: Gains,
    pub radio: RadioParams,
    pub rb_pools: RbPools,
    rb_to_cue: Vec<Option<CueId>>,
    /// Achieved D2D SINR per `[link][rb]`, linear.
    sinr: Vec<Vec<f64>>,
    /// Shannon rate per `[link][rb]` in bit/s; 0 marks an unusable pair.
    rate: Vec<Vec<f64>>,
}

impl ChannelRealization {
    /// Assembles the realization from explicit gains and a CUE schedule.
    pub fn from_gains(
        gains: Gains,
        radio: RadioParams,
        rb_pools: RbPools,
        schedule: &CueSchedule,
    ) -> Result<Self> {
        if schedule.num_rbs() != rb_pools.total() {
            return Err(Error::InvalidConfig(format!(
                "schedule covers {} RBs but the pools hold {}",
                schedule.num_rbs(),
                rb_pools.total()
            )));
        }
        let num_links = gains.g_dd.len();
        if gains.g_db.len() != num_links
            || gains.g_cb.len() != gains.g_cd.len()
            || gains.g_cd.iter().any(|row| row.len() != num_links)
        {
            return Err(Error::InvalidConfig(
                "gain matrices disagree on dimensions".into(),
            ));
        }
        let mut ch = Self {
            gains,
            radio,
            rb_pools,
            rb_to_cue: schedule.rb_to_cue().to_vec(),
            sinr: Vec::new(),
            rate: Vec::new(),
        };
        let num_rbs = ch.rb_to_cue.len();
        for l in 0..num_links {
            let link = LinkId(l);
            let mut sinr_row = Vec::with_capacity(num_rbs);
            let mut rate_row = Vec::with_capacity(num_rbs);
            for k in 0..num_rbs {
                let rb = RbId(k);
                let sinr = ch.d2d_sinr(link, rb)?;
                let usable = sinr >= ch.radio.gamma_th
                    && ch.cue_on(rb).is_none_or(|c| ch.cue_protection_ok(c, link));
                sinr_row.push(sinr);
                rate_row.push(if usable {
                    shannon_rate(sinr, ch.radio.rb_bandwidth_hz)
                } else {
                    0.0
                });
            }
            ch.sinr.push(sinr_row);
            ch.rate.push(rate_row);
        }
        Ok(ch)
    }

    pub fn num_links(&self) -> usize {
        self.gains.g_dd.len()
    }

    pub fn num_rbs(&self) -> usize {
        self.rb_to_cue.len()
    }

    pub fn cue_on(&self, rb: RbId) -> Option<CueId> {
        self.rb_to_cue.get(rb.0).copied().flatten()
    }

    /// SINR at the receiver of `link` if it transmits on `rb`. The only
    /// interferer is the CUE scheduled on `rb`, since D2D links never share
    /// an RB.
    pub fn d2d_sinr(&self, link: LinkId, rb: RbId) -> Result<f64> {
        if rb.0 >= self.num_rbs() {
            return Err(Error::UnknownRb(rb));
        }
        let r = &self.radio;
        let signal = self.gains.g_dd[link.0] * r.p_due_w;
        let cue_interference = self
            .cue_on(rb)
            .map_or(0.0, |c| self.gains.g_cd[c.0][link.0] * r.p_cue_w);
        Ok(signal / (cue_interference + r.inter_cell_w + r.noise_power_w))
    }

    /// Uplink SINR of `cue` at the BS if `link` reused its RB.
    pub fn cue_sinr_with(&self, cue: CueId, link: LinkId) -> f64 {
        let r = &self.radio;
        self.gains.g_cb[cue.0] * r.p_cue_w
            / (self.gains.g_db[link.0] * r.p_due_w + r.inter_cell_w + r.noise_power_w)
    }

    /// Whether `cue` keeps its protection threshold with `link` on its RB.
    pub fn cue_protection_ok(&self, cue: CueId, link: LinkId) -> bool {
        self.cue_sinr_with(cue, link) >= self.radio.gamma_tilde_th
    }

    pub fn sinr(&self, link: LinkId, rb: RbId) -> f64 {
        self.sinr[link.0][rb.0]
    }

    pub fn rate(&self, link: LinkId, rb: RbId) -> f64 {
        self.rate[link.0][rb.0]
    }

    pub fn usable(&self, link: LinkId, rb: RbId) -> bool {
        self.rate(link, rb) > 0.0
    }

    pub fn rate_table(&self) -> &[Vec<f64>] {
        &self.rate
    }

    /// Rate table as CSV: one row per link, one column per RB, bit/s.
    pub fn write_rate_table_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["link".to_string()];
        header.extend((0..self.num_rbs()).map(|k| RbId(k).to_string()));
        w.write_record(&header)?;
        for (l, row) in self.rate.iter().enumerate() {
            let mut rec = vec![LinkId(l).to_string()];
            rec.extend(row.iter().map(|r| r.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Every path gain as CSV rows `path,from,to,gain_db`.
    pub fn write_gains_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["path", "from", "to", "gain_db"])?;
        let g = &self.gains;
        for (l, v) in g.g_dd.iter().enumerate() {
            w.write_record([
                "d2d",
                &format!("link{l}.tx"),
                &format!("link{l}.rx"),
                &linear_to_db(*v).to_string(),
            ])?;
        }
        for (l, v) in g.g_db.iter().enumerate() {
            w.write_record([
                "d2d-bs",
                &format!("link{l}.tx"),
                "bs",
                &linear_to_db(*v).to_string(),
            ])?;
        }
        for (c, v) in g.g_cb.iter().enumerate() {
            w.write_record([
                "cue-bs",
                &CueId(c).to_string(),
                "bs",
                &linear_to_db(*v).to_string(),
            ])?;
        }
        for (c, row) in g.g_cd.iter().enumerate() {
            for (l, v) in row.iter().enumerate() {
                w.write_record([
                    "cue-d2d",
                    &CueId(c).to_string(),
                    &format!("link{l}.rx"),
                    &linear_to_db(*v).to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Draws the gains of one trial and tabulates SINR and rate for every
/// (link, RB) pair of the fused pool.
pub fn build_rate_table(
    topology: &Topology,
    schedule: &CueSchedule,
    cfg: &ScenarioConfig,
    seeds: &SeedStreams,
) -> Result<ChannelRealization> {
    let gains = Gains::draw(topology, cfg.shadowing_sigma_db, seeds);
    ChannelRealization::from_gains(
        gains,
        RadioParams::from_config(cfg)?,
        topology.rb_pools.clone(),
        schedule,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_topology, Cue, D2dLink, Point, TenantId};
    use crate::scheduler::schedule_cues;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn path_loss_examples() {
        assert_eq!(path_loss_d2d_db(1.0).unwrap(), 148.0);
        assert!((path_loss_d2d_db(0.1).unwrap() - 108.0).abs() < 1e-12);
        assert_eq!(path_loss_cue_db(1.0).unwrap(), 128.1);
        assert!((path_loss_cue_db(0.1).unwrap() - 90.5).abs() < 1e-12);
        assert!(matches!(path_loss_d2d_db(0.0), Err(Error::Domain(_))));
        assert!(path_loss_cue_db(-1.0).is_err());
    }

    #[test]
    fn gain_examples() {
        assert!(rel(link_gain(100.0, 0.0), 1e-10) < 1e-12);
        assert_eq!(link_gain(0.0, 0.0), 1.0);
        assert_eq!(link_gain(-20.0, 0.0), 1.0);
    }

    #[test]
    fn noise_examples() {
        assert!(rel(noise_power_w(0.0, 1.0).unwrap(), 1e-3) < 1e-12);
        assert!(noise_power_w(-174.0, 0.0).is_err());
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_rate(1.0, 180e3), 180e3);
        assert_eq!(shannon_rate(3.0, 180e3), 360e3);
        assert_eq!(shannon_rate(0.0, 180e3), 0.0);
        assert!(rel(effective_sinr(360e3, 1, 180e3), 3.0) < 1e-12);
        assert!(rel(effective_sinr(720e3, 2, 180e3), 3.0) < 1e-12);
    }

    #[test]
    fn db_round_trip() {
        for x in [1e-21, 3.7e-13, 1.0, 42.0, 9.9e7] {
            assert!(rel(db_to_linear(linear_to_db(x)), x) < 1e-12);
        }
    }

    fn params() -> RadioParams {
        RadioParams::from_config(&ScenarioConfig::default()).unwrap()
    }

    /// One link, one CUE, two RBs: RB 0 carries the CUE, RB 1 is idle.
    fn tiny(g_dd: f64, g_cd: f64, g_cb: f64, g_db: f64) -> ChannelRealization {
        let gains = Gains {
            g_dd: vec![g_dd],
            g_cd: vec![vec![g_cd]],
            g_cb: vec![g_cb],
            g_db: vec![g_db],
        };
        let schedule = CueSchedule::from_pairs(2, 1, [(CueId(0), RbId(0))]).unwrap();
        ChannelRealization::from_gains(gains, params(), RbPools::from_sizes(&[1, 1]), &schedule)
            .unwrap()
    }

    #[test]
    fn sinr_limits() {
        let r = params();
        // interference equal to the signal and negligible noise gives 0 dB
        let g_dd = 1e-2;
        let g_cd = g_dd * r.p_due_w / r.p_cue_w;
        let ch = tiny(g_dd, g_cd, 1e-9, 1e-14);
        assert!(rel(ch.d2d_sinr(LinkId(0), RbId(0)).unwrap(), 1.0) < 1e-9);
        // idle RB: plain SNR
        let snr = g_dd * r.p_due_w / r.noise_power_w;
        assert!(rel(ch.d2d_sinr(LinkId(0), RbId(1)).unwrap(), snr) < 1e-12);
        assert!(matches!(
            ch.d2d_sinr(LinkId(0), RbId(9)),
            Err(Error::UnknownRb(_))
        ));
    }

    #[test]
    fn protection_examples() {
        let r = params();
        // D2D transmitter out of reach: CUE SNR decides
        let g_cb = 10.0 * r.noise_power_w / r.p_cue_w;
        let ch = tiny(1e-9, 1e-15, g_cb, 0.0);
        assert!(ch.cue_protection_ok(CueId(0), LinkId(0)));
        // CUE below threshold even alone
        let ch = tiny(1e-9, 1e-15, 2.0 * r.noise_power_w / r.p_cue_w, 0.0);
        assert!(!ch.cue_protection_ok(CueId(0), LinkId(0)));
        // pair masked, idle RB still usable
        assert_eq!(ch.rate(LinkId(0), RbId(0)), 0.0);
        assert!(ch.usable(LinkId(0), RbId(1)));
    }

    #[test]
    fn frequency_flat_row_without_cues() {
        let cfg = ScenarioConfig {
            num_d2d_links: 1,
            cue_utilization: vec![0.0, 0.0],
            ..Default::default()
        };
        let seeds = SeedStreams::for_trial(3, 0);
        let topo = generate_topology(&cfg, &seeds).unwrap();
        let sched = schedule_cues(&topo, &cfg, 0).unwrap();
        let ch = build_rate_table(&topo, &sched, &cfg, &seeds).unwrap();
        let row = &ch.rate_table()[0];
        assert!(row[0] > 0.0);
        assert!(row.iter().all(|&r| r == row[0]));
    }

    #[test]
    fn infinite_threshold_masks_everything() {
        let cfg = ScenarioConfig {
            gamma_th_db: f64::INFINITY,
            ..Default::default()
        };
        let seeds = SeedStreams::for_trial(3, 0);
        let topo = generate_topology(&cfg, &seeds).unwrap();
        let sched = schedule_cues(&topo, &cfg, 0).unwrap();
        let ch = build_rate_table(&topo, &sched, &cfg, &seeds).unwrap();
        assert!(ch.rate_table().iter().flatten().all(|&r| r == 0.0));
    }

    #[test]
    fn hand_placed_scenario_matches_recomputation() {
        // BS at origin; link 0 tx (100, 0) -> rx (150, 0); CUE 0 (0, 60) on
        // RB 0, CUE 1 (-300, 0) on RB 1, RB 2 idle. Shadowing off.
        let topo = Topology {
            bs_position: Point::ORIGIN,
            cell_radius_m: 400.0,
            cues: vec![
                Cue {
                    position: Point::new(0.0, 60.0),
                    tenant: TenantId(0),
                },
                Cue {
                    position: Point::new(-300.0, 0.0),
                    tenant: TenantId(1),
                },
            ],
            links: vec![D2dLink {
                tx: Point::new(100.0, 0.0),
                rx: Point::new(150.0, 0.0),
                initiator: TenantId(0),
                receiver: TenantId(1),
            }],
            rb_pools: RbPools::from_sizes(&[2, 1]),
        };
        let sched =
            CueSchedule::from_pairs(3, 2, [(CueId(0), RbId(0)), (CueId(1), RbId(1))]).unwrap();
        let cfg = ScenarioConfig {
            shadowing_sigma_db: 0.0,
            gamma_tilde_th_db: 0.0,
            ..Default::default()
        };
        let ch = build_rate_table(&topo, &sched, &cfg, &SeedStreams::new(0)).unwrap();

        // spreadsheet-style recomputation in dBm
        let noise_dbm = -174.0 + 10.0 * 180e3f64.log10();
        let mw = |dbm: f64| 10f64.powf(dbm / 10.0);
        let rx_dbm = 15.0 - (148.0 + 40.0 * 0.05f64.log10());
        let i0_dbm = 20.0 - (148.0 + 40.0 * (0.15f64.hypot(0.06)).log10());
        let i1_dbm = 20.0 - (148.0 + 40.0 * 0.45f64.log10());
        let expected_sinr = [
            mw(rx_dbm) / (mw(i0_dbm) + mw(noise_dbm)),
            mw(rx_dbm) / (mw(i1_dbm) + mw(noise_dbm)),
            mw(rx_dbm) / mw(noise_dbm),
        ];
        // CUE protection with the D2D tx at 100 m from the BS
        let d2d_at_bs = mw(15.0 - (128.1 + 37.6 * 0.1f64.log10()));
        let cue0 = mw(20.0 - (128.1 + 37.6 * 0.06f64.log10())) / (d2d_at_bs + mw(noise_dbm));
        let cue1 = mw(20.0 - (128.1 + 37.6 * 0.3f64.log10())) / (d2d_at_bs + mw(noise_dbm));
        assert!(cue0 > 1.0 && cue1 < 1.0, "fixture should mask exactly RB 1");
        assert!(rel(ch.cue_sinr_with(CueId(0), LinkId(0)), cue0) < 1e-9);
        assert!(rel(ch.cue_sinr_with(CueId(1), LinkId(0)), cue1) < 1e-9);

        for k in 0..3 {
            assert!(rel(ch.sinr(LinkId(0), RbId(k)), expected_sinr[k]) < 1e-9);
        }
        assert!(
            rel(
                ch.rate(LinkId(0), RbId(0)),
                180e3 * (1.0 + expected_sinr[0]).log2()
            ) < 1e-9
        );
        assert_eq!(ch.rate(LinkId(0), RbId(1)), 0.0);
        assert!(
            rel(
                ch.rate(LinkId(0), RbId(2)),
                180e3 * (1.0 + expected_sinr[2]).log2()
            ) < 1e-9
        );
    }

    #[test]
    fn csv_dumps_have_expected_shape() {
        let ch = tiny(1e-9, 1e-15, 1e-10, 1e-14);
        let mut buf = Vec::new();
        ch.write_rate_table_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "link,rb0,rb1");
        assert_eq!(text.lines().count(), 2);
        let mut buf = Vec::new();
        ch.write_gains_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }
}
