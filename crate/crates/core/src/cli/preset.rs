//! Named experiment presets that regenerate the reference curves.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::config::{ExperimentConfig, ToleranceConfig};
use super::output::{column_set, fmt_num, rows_to_csv};
use super::{write_file, CliError};
use crate::channels::{ChannelKind, EvolveParams, NoiseConfig};
use crate::error::Result as LbcResult;
use crate::factorization::verify_points;
use crate::lbc::{lbc_closed_form, lbc_spectral_with_cap};
use crate::state::{ghz_density, xstate_view, GhzSpec};

/// Presets run the spectral route only up to this many qubits.
pub const PRESET_SPECTRAL_CAP: usize = 4;
/// Coarse scan density used to bracket the sudden-death onset.
const ONSET_SCAN_STEPS: usize = 1000;
/// Bisection stops once the bracket is narrower than this.
const ONSET_RESOLUTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2a,
    Fig2b,
    Fig2c,
    Esd,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig2c => "fig2c",
            Preset::Esd => "esd",
        }
    }
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "fig1" => Ok(Preset::Fig1),
            "fig2a" => Ok(Preset::Fig2a),
            "fig2b" => Ok(Preset::Fig2b),
            "fig2c" => Ok(Preset::Fig2c),
            "esd" => Ok(Preset::Esd),
            other => Err(CliError::UnknownPreset(other.to_string())),
        }
    }
}

struct Curve {
    stem: String,
    label: String,
    config: ExperimentConfig,
}

fn uniform_grid(size: usize) -> Vec<f64> {
    (0..size).map(|i| i as f64 / (size - 1) as f64).collect()
}

/// `m` identical channels on qubits `1..=m` of an `n`-qubit state `alpha|0..0> + beta|1..1>`.
fn curve(
    stem: String,
    label: String,
    (n, m): (usize, usize),
    (alpha, beta): (f64, f64),
    kind: ChannelKind,
    grid: &[f64],
) -> Curve {
    let mut config = ExperimentConfig::uniform_sweep(n, alpha, beta, &"0".repeat(n), kind, 1..=m, grid.to_vec());
    config.tolerances = Some(ToleranceConfig { spectral_max_qubits: Some(PRESET_SPECTRAL_CAP), ..Default::default() });
    Curve { stem, label, config }
}

fn curves(preset: Preset, grid: &[f64]) -> Vec<Curve> {
    use ChannelKind::{AmplitudeDamping as Ad, Depolarizing as D};
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match preset {
        Preset::Fig1 => {
            (1..=5).map(|m| curve(format!("fig1_M{m}"), format!("M{m}"), (m + 1, m), (h, h), Ad, grid)).collect()
        }
        Preset::Fig2a => {
            (1..=3).map(|m| curve(format!("fig2a_M{m}"), format!("M{m}"), (4, m), (h, h), D, grid)).collect()
        }
        Preset::Fig2b => {
            (2..=4).map(|n| curve(format!("fig2b_N{n}"), format!("N{n}"), (n, 1), (h, h), D, grid)).collect()
        }
        Preset::Fig2c => {
            (3..=4).map(|n| curve(format!("fig2c_N{n}"), format!("N{n}"), (n, 2), (h, h), D, grid)).collect()
        }
        Preset::Esd => ESD_BETA_SQ
            .iter()
            .map(|&b2: &f64| {
                let label = format!("beta2_{b2}");
                curve(format!("esd_{label}"), label, (3, 3), ((1.0 - b2).sqrt(), b2.sqrt()), Ad, grid)
            })
            .collect(),
    }
}

const ESD_BETA_SQ: [f64; 2] = [0.5, 0.8];

/// Smallest `p` from which `lbc` stays at or below `zero_tol`, or `None` if it only vanishes at `p = 1`.
///
/// Brackets the onset on a uniform scan of `[0, 1)` and refines it by bisection; `lbc` must be
/// nonincreasing in `p`.
pub fn sudden_death_threshold(mut lbc: impl FnMut(f64) -> LbcResult<f64>, zero_tol: f64) -> LbcResult<Option<f64>> {
    if lbc(0.0)? <= zero_tol {
        return Ok(Some(0.0));
    }
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..ONSET_SCAN_STEPS {
        let p = k as f64 / ONSET_SCAN_STEPS as f64;
        if lbc(p)? <= zero_tol {
            hi = Some(p);
            break;
        }
        lo = p;
    }
    let Some(mut hi) = hi else { return Ok(None) };
    while hi - lo > ONSET_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if lbc(mid)? <= zero_tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Closed-form and spectral LBC of a GHZ state under identical channels at shared probability `p`.
fn lbc_at(spec: &GhzSpec, noise: &NoiseConfig, p: f64, spectral: bool) -> LbcResult<f64> {
    let rho = crate::channels::evolve(&ghz_density(spec), noise, &EvolveParams::Shared(p))?;
    if spectral {
        Ok(lbc_spectral_with_cap(&rho, PRESET_SPECTRAL_CAP)?.total)
    } else {
        Ok(lbc_closed_form(&xstate_view(&rho, spec)?)?.total)
    }
}

fn esd_threshold_table() -> Result<String, CliError> {
    let mut out = String::from("beta_sq,p_star_closed_form,p_star_spectral,p_star_analytic\n");
    let numerical = |e: crate::error::Error| CliError::Numerical(e.to_string());
    for &b2 in &ESD_BETA_SQ {
        let spec = GhzSpec::real(3, (1.0 - b2).sqrt(), b2.sqrt(), "000").map_err(numerical)?;
        let noise = NoiseConfig::uniform(3, ChannelKind::AmplitudeDamping, 1..=3).map_err(numerical)?;
        let closed = sudden_death_threshold(|p| lbc_at(&spec, &noise, p, false), 0.0).map_err(numerical)?;
        let spectral = sudden_death_threshold(|p| lbc_at(&spec, &noise, p, true), 1e-12).map_err(numerical)?;
        let (a, b) = (spec.alpha().norm(), spec.beta().norm());
        let analytic = (b > a).then(|| (a / b).powf(2.0 / 3.0));
        let cell = |x: Option<f64>| x.map(fmt_num).unwrap_or_else(|| "none".into());
        out.push_str(&format!("{},{},{},{}\n", fmt_num(b2), cell(closed), cell(spectral), cell(analytic)));
    }
    Ok(out)
}

/// Writes the preset's per-curve CSVs, a combined plot CSV and (for `esd`) the threshold table.
pub fn run_preset(preset: Preset, grid_size: usize, outdir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if grid_size < 2 {
        return Err(CliError::GridTooSmall(grid_size));
    }
    let grid = uniform_grid(grid_size);
    let mut written = Vec::new();
    let mut combined: Vec<(String, Vec<String>)> = Vec::new();
    for c in curves(preset, &grid) {
        let exp = c.config.validate()?;
        let rows = verify_points(&exp.spec, &exp.noise, &exp.points, &exp.options).points;
        if let Some(err) = rows.iter().find_map(|r| r.errors.first()) {
            return Err(CliError::Numerical(format!("{}: {err}", c.stem)));
        }
        let path = outdir.join(format!("{}.csv", c.stem));
        write_file(&path, &rows_to_csv(&rows, &exp, &column_set(&c.config)))?;
        written.push(path);
        combined.push((c.label, rows.iter().map(|r| r.lbc_direct.map(fmt_num).unwrap_or_default()).collect()));
    }

    let mut plot = String::from("p");
    for (label, _) in &combined {
        plot.push(',');
        plot.push_str(label);
    }
    plot.push('\n');
    for (i, &p) in grid.iter().enumerate() {
        plot.push_str(&fmt_num(p));
        for (_, values) in &combined {
            plot.push(',');
            plot.push_str(&values[i]);
        }
        plot.push('\n');
    }
    let path = outdir.join(format!("{}.csv", preset.name()));
    write_file(&path, &plot)?;
    written.push(path);

    if preset == Preset::Esd {
        let path = outdir.join("esd_threshold.csv");
        write_file(&path, &esd_threshold_table()?)?;
        written.push(path);
    }
    Ok(written)
}
