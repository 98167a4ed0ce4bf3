//! `oracle`: run the time-domain validation suite at toy parameters and
//! report pass/fail per check. Deterministic for a fixed seed: the report
//! carries no timestamps or durations.

use std::path::Path;

use speedmeter::filter::{snr_optimal, Band, MatchedFilter};
use speedmeter::noise::{PositionMeter, VelocityMeter, WhiteNoise};
use speedmeter::oracle::{
    compare_psd_to_analytic, detection_statistic_from_snr, empirical_snr, estimate_force_psd,
    estimate_raw_psd, simulate, toy_double_params, toy_single_params, EmpiricalSnrConfig,
    InjectedImpulse, SimConfig, Topology, WelchConfig,
};
use speedmeter::parallel::Parallelism;
use speedmeter::signal::ImpulseSignal;

use crate::config::ScenarioConfig;

struct Suite {
    all_ok: bool,
}

impl Suite {
    fn report(&mut self, name: &str, ok: bool, detail: &str) {
        println!("{} {name}: {detail}", if ok { "ok  " } else { "FAIL" });
        self.all_ok &= ok;
    }
}

pub fn run(cfg: &ScenarioConfig, quick: bool, dump_trace: Option<&Path>) -> anyhow::Result<bool> {
    let seed = cfg.seed;
    let mut suite = Suite { all_ok: true };
    let scale = if quick { 0.25 } else { 1.0 };
    let segment_len = if quick { 1 << 13 } else { 1 << 15 };
    let min_segments = if quick { 12 } else { 32 };
    let welch = WelchConfig {
        segment_len,
        min_segments,
    };
    let seg_seconds = segment_len as f64 * 5e-5;
    let duration = |segments: f64| (segments + 1.0) * seg_seconds / 2.0;

    // 1. Welch calibration on filtered vacuum: G = 0 keeps only the
    //    reflected input, whose PSD is exactly 1 in quadrature units.
    {
        let mut p = toy_single_params();
        p.coupling = 0.0;
        p.temperature = 0.0;
        let sim = SimConfig {
            dt: 5e-5,
            duration: duration(48.0 * scale) + 1.0,
            warmup: 0.2,
            seed,
            topology: Topology::SingleSided,
            injected: None,
        };
        let trace = simulate(&p, &sim, 0)?;
        let est = estimate_raw_psd(&trace.y_out, trace.dt, &welch)?;
        let band = Band { lo: 40.0, hi: 2_000.0 };
        let rep = compare_psd_to_analytic(&est, &WhiteNoise(1.0), &band, 0.08);
        suite.report(
            "filtered-vacuum calibration",
            rep.pass,
            &format!("{} segments\n{rep}", est.n_segments),
        );
    }

    // 2. Single-sided toy run against the position-meter formula.
    let single_trace = {
        let p = toy_single_params();
        let sim = SimConfig {
            dt: 5e-5,
            duration: duration(64.0 * scale),
            warmup: 4.0,
            seed: seed + 1,
            topology: Topology::SingleSided,
            injected: None,
        };
        let trace = simulate(&p, &sim, 0)?;
        let est = estimate_force_psd(&trace, &welch)?;
        let band = Band { lo: 50.0, hi: 400.0 };
        let rep = compare_psd_to_analytic(&est, &PositionMeter(p), &band, 0.10);
        suite.report(
            "single-sided force PSD",
            rep.pass,
            &format!("{} segments\n{rep}", est.n_segments),
        );
        trace
    };
    if let Some(path) = dump_trace {
        let file = std::fs::File::create(path)?;
        single_trace.write_csv(std::io::BufWriter::new(file))?;
        println!("wrote trace {}", path.display());
    }

    // 3. Double-ring toy run against the velocity-meter formula.
    {
        let p = toy_double_params();
        let sim = SimConfig {
            dt: 5e-5,
            duration: duration(64.0 * scale),
            warmup: 4.0,
            seed: seed + 2,
            topology: Topology::DoubleRing,
            injected: None,
        };
        let trace = simulate(&p, &sim, 0)?;
        let est = estimate_force_psd(&trace, &welch)?;
        let band = Band { lo: 50.0, hi: 400.0 };
        let rep = compare_psd_to_analytic(&est, &VelocityMeter(trace.effective_params()), &band, 0.10);
        suite.report(
            "double-ring force PSD",
            rep.pass,
            &format!("{} segments\n{rep}", est.n_segments),
        );
    }

    // 4. Empirical matched-filter SNR against sqrt(2) x the one-sided value.
    {
        let p = toy_single_params();
        let band = Band { lo: 50.0, hi: 400.0 };
        let momentum = 6e-16;
        let t0 = 0.8;
        let sig = ImpulseSignal {
            momentum,
            event_time: t0,
        };
        let n_traj = if quick { 60 } else { 200 };
        let ecfg = EmpiricalSnrConfig {
            sim: SimConfig {
                dt: 5e-5,
                duration: 2.0,
                warmup: 2.0,
                seed: seed + 3,
                topology: Topology::SingleSided,
                injected: Some(InjectedImpulse {
                    momentum,
                    event_time: t0,
                }),
            },
            n_trajectories: n_traj,
            band,
            parallelism: Parallelism::default(),
        };
        let noise = PositionMeter(p);
        let filter = MatchedFilter {
            signal: &sig,
            noise: &noise,
        };
        let measured = empirical_snr(&p, &ecfg, &filter)?;
        let analytic = snr_optimal(&sig, &noise, &band, &[])?.snr;
        let expected = detection_statistic_from_snr(analytic);
        let rel = (measured / expected - 1.0).abs();
        let tol = if quick { 0.30 } else { 0.15 };
        suite.report(
            "empirical matched-filter SNR",
            rel < tol,
            &format!(
                "measured {measured:.3}, expected {expected:.3} (rel {rel:.3}, tol {tol})"
            ),
        );
    }

    println!(
        "oracle suite: {}",
        if suite.all_ok { "all checks passed" } else { "MISMATCH" }
    );
    Ok(suite.all_ok)
}
