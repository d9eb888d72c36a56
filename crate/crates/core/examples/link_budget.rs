//! Walks a single 50 m D2D link through the channel model: path loss,
//! shadowing, noise, SINR with and without a co-channel CUE, and rate.
//!
//! `cargo run --example link_budget`

use d2dshare::channel::{
    dbm_to_watts, effective_sinr, linear_to_db, link_gain, noise_power_w, path_loss_cue_db,
    path_loss_d2d_db, shannon_rate,
};
use d2dshare::model::ScenarioConfig;

fn main() -> d2dshare::Result<()> {
    let cfg = ScenarioConfig::default();
    let bw = cfg.rb_bandwidth_hz;
    let noise = noise_power_w(cfg.noise_psd_dbm_hz, bw)?;
    let p_d = dbm_to_watts(cfg.p_due_dbm);
    let p_c = dbm_to_watts(cfg.p_cue_dbm);

    let pl = path_loss_d2d_db(0.05)?;
    let g_dd = link_gain(pl, 8.0);
    println!("D2D path loss at 50 m      {pl:.3} dB");
    println!("gain with +8 dB shadowing  {g_dd:.4e}");
    println!(
        "noise per RB               {noise:.4e} W ({:.3} dBm)",
        linear_to_db(noise / 1e-3)
    );

    let snr = g_dd * p_d / noise;
    println!(
        "SNR on an idle RB          {snr:.1} ({:.2} dB)",
        linear_to_db(snr)
    );
    println!(
        "rate on an idle RB         {:.1} kbit/s",
        shannon_rate(snr, bw) / 1e3
    );

    // a CUE 150 m from the D2D receiver shares the RB
    let g_cd = link_gain(path_loss_d2d_db(0.15)?, 0.0);
    let sinr = g_dd * p_d / (g_cd * p_c + noise);
    println!(
        "SINR with a CUE at 150 m   {sinr:.1} ({:.2} dB)",
        linear_to_db(sinr)
    );

    // protection of that CUE, 100 m from the BS, with the D2D tx 380 m away
    let g_cb = link_gain(path_loss_cue_db(0.1)?, 0.0);
    let g_db = link_gain(path_loss_cue_db(0.38)?, 0.0);
    let cue_sinr = g_cb * p_c / (g_db * p_d + noise);
    println!(
        "CUE uplink SINR            {:.2} dB (threshold {} dB)",
        linear_to_db(cue_sinr),
        cfg.gamma_tilde_th_db
    );

    let two_rbs = shannon_rate(snr, bw) + shannon_rate(sinr, bw);
    println!(
        "two-RB rate                {:.1} kbit/s, effective SINR {:.2} dB",
        two_rbs / 1e3,
        linear_to_db(effective_sinr(two_rbs, 2, bw))
    );
    Ok(())
}
