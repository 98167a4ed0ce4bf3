//! `psd`: log-spaced force-noise PSD tables with refined sampling around the
//! shot-noise nulls.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use speedmeter::detuning::{
    detuned_double_psd, detuned_single_psd, equal_power_coupling,
    optimize_coupling_detuned_single,
};
use speedmeter::filter::Band;
use speedmeter::noise::{
    interference_nulls, position_force_psd, velocity_force_psd, PsdBreakdown,
};
use speedmeter::parallel::{map_slice, Parallelism};
use speedmeter::response::DetectorParams;

use crate::config::{MeterKind, ScenarioConfig};
use crate::commands::{position_detector, velocity_detector};

/// Dense sampling window around each null, in decades.
const NULL_WINDOW_DEC: f64 = 0.05;
const NULL_POINTS_PER_DECADE: usize = 400;

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    if !(hi > lo) {
        return Vec::new();
    }
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(2);
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

fn grid_with_null_refinement(band: &Band, nulls: &[f64], per_decade: usize) -> Vec<f64> {
    let mut grid = log_grid(band.lo, band.hi, per_decade);
    for &nu in nulls {
        let lo = (nu * 10f64.powf(-NULL_WINDOW_DEC)).max(band.lo);
        let hi = (nu * 10f64.powf(NULL_WINDOW_DEC)).min(band.hi);
        grid.extend(log_grid(lo, hi, NULL_POINTS_PER_DECADE));
        grid.push(nu);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    grid
}

struct Row {
    nu: f64,
    psd: PsdBreakdown,
    flag: &'static str,
}

fn write_csv(
    path: &Path,
    cfg: &ScenarioConfig,
    meter: &str,
    rows: &[Row],
) -> anyhow::Result<()> {
    let mut file = std::fs::File::create(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    writeln!(file, "# config = {}", cfg.resolved_json())?;
    writeln!(file, "# meter = {meter}")?;
    writeln!(file, "nu_rad_s,shot,thermal,backaction,total,flag")?;
    for r in rows {
        writeln!(
            file,
            "{:e},{:e},{:e},{:e},{:e},{}",
            r.nu,
            r.psd.shot,
            r.psd.thermal,
            r.psd.backaction,
            r.psd.total(),
            r.flag
        )?;
    }
    Ok(())
}

fn default_plot_band(p: &DetectorParams) -> Band {
    let lo = if p.omega_m > 0.0 { p.omega_m / 100.0 } else { 1e-2 };
    Band {
        lo,
        hi: 10.0 * p.kappa,
    }
}

fn out_path(base: Option<&Path>, meter: &str) -> std::path::PathBuf {
    match base {
        Some(p) => {
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("psd");
            let ext = p.extension().and_then(|s| s.to_str()).unwrap_or("csv");
            p.with_file_name(format!("{stem}.{meter}.{ext}"))
        }
        None => std::path::PathBuf::from(format!("psd.{meter}.csv")),
    }
}

pub fn run(cfg: &ScenarioConfig, out: Option<&Path>) -> anyhow::Result<()> {
    let write_velocity = matches!(cfg.meter, MeterKind::Velocity | MeterKind::Both);
    let write_position = matches!(cfg.meter, MeterKind::Position | MeterKind::Both);
    let detuning = cfg.detuning_params();

    if write_velocity {
        let mut p = velocity_detector(cfg);
        let meter_name = if detuning.is_some() {
            // Detuned double ring at the same circulating power as the
            // resonant reference.
            if let Some(d) = &detuning {
                if cfg.coupling.is_none() {
                    p.coupling = equal_power_coupling(&p, d, p.coupling);
                }
            }
            "velocity_detuned"
        } else {
            "velocity"
        };
        let band = cfg.band().unwrap_or_else(|| default_plot_band(&p));
        let rows = if band.hi > band.lo {
            let nulls = interference_nulls(&p, &band);
            let grid = grid_with_null_refinement(&band, &nulls, cfg.grid_per_decade);
            let psds = map_slice(Parallelism::default(), &grid, |&nu| match &detuning {
                Some(d) => detuned_double_psd(nu, &p, d),
                None => velocity_force_psd(nu, &p),
            });
            grid.iter()
                .zip(psds)
                .map(|(&nu, psd)| {
                    let psd = psd?;
                    let flag = if psd.is_null() { "null" } else { "ok" };
                    Ok(Row { nu, psd, flag })
                })
                .collect::<anyhow::Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let path = out_path(out, meter_name);
        write_csv(&path, cfg, meter_name, &rows)?;
        println!("wrote {} ({} rows)", path.display(), rows.len());
    }

    if write_position {
        let mut p = position_detector(cfg, cfg.tau_position)?;
        let meter_name = if detuning.is_some() {
            if let Some(d) = &detuning {
                if cfg.coupling.is_none() {
                    p.coupling = optimize_coupling_detuned_single(&p, d, 3.0)?;
                }
            }
            "position_detuned"
        } else {
            "position"
        };
        let band = cfg.band().unwrap_or_else(|| default_plot_band(&p));
        let rows = if band.hi > band.lo {
            let grid = log_grid(band.lo, band.hi, cfg.grid_per_decade);
            let psds = map_slice(Parallelism::default(), &grid, |&nu| match &detuning {
                Some(d) => detuned_single_psd(nu, &p, d),
                None => position_force_psd(nu, &p),
            });
            grid.iter()
                .zip(psds)
                .map(|(&nu, psd)| {
                    let psd = psd?;
                    let flag = if psd.is_null() { "null" } else { "ok" };
                    Ok(Row { nu, psd, flag })
                })
                .collect::<anyhow::Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let path = out_path(out, meter_name);
        write_csv(&path, cfg, meter_name, &rows)?;
        println!("wrote {} ({} rows)", path.display(), rows.len());
    }

    Ok(())
}
