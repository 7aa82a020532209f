use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use cryoion::axial::{
    beta_grid, characteristic_length, optimize_beta, ratio_curve, solve_equilibrium, solve_equilibrium_with,
    spacing_stats, Curvature, BETA_GRID_POINTS,
};
use cryoion::collision::{
    c4_coefficient, critical_impact_parameter, langevin_rate_coefficient, mean_energy_transfer,
    p_wave_barrier, scattering_angle, CaptureModel, DensityConvention, Interaction,
};
use cryoion::constants::{pa_to_torr, torr_to_pa, BOLTZMANN};
use cryoion::design::{
    budget_table, budget_totals, capacitance_for, reference_budget, reflected_power_for, resonant_frequency,
    BudgetItem, BudgetRow, ConductivityTable, HeatSource, Material, RadiativeSurface, ResonatorParams, Stage,
    WireRun,
};
use cryoion::experiments::{
    estimate_p_flip, infer_pressure_elastic, infer_pressure_ratio, run_cooling, synthetic_elastic_rate,
    CoolingRunConfig, FlipExperimentConfig, FlipResult, Measured, PressureEstimate, SampleKind,
};
use cryoion::parallel::parallel_map;
use cryoion::{BackgroundGas, IonSpecies};

use crate::error::{failed, invalid, CliError, CliResult};
use crate::output::{Cell, OutDir};

/// What a subcommand hands back for the manifest.
#[derive(Debug, Default)]
pub struct RunReport {
    pub config: serde_json::Value,
    /// (index, message) of samples that failed.
    pub failures: Vec<(usize, String)>,
    /// (first sample, sample count) per batch.
    pub batches: Vec<(usize, usize)>,
}

pub struct Context<'a> {
    pub seed: u64,
    pub workers: usize,
    pub progress_every: usize,
    pub out: &'a mut OutDir,
    pub name: &'static str,
}

impl Context<'_> {
    /// Progress callback printing `progress <name> <done>/<total>` lines.
    fn progress(&self) -> impl Fn(usize, usize) + Sync + '_ {
        let every = self.progress_every;
        let last = AtomicUsize::new(0);
        move |done, total| {
            if every > 0 && (done % every == 0 || done == total) && last.fetch_max(done, Ordering::Relaxed) < done {
                eprintln!("progress {} {done}/{total}", self.name);
            }
        }
    }
}

fn echo<T: Serialize>(config: &T) -> serde_json::Value {
    serde_json::to_value(config).unwrap_or(serde_json::Value::Null)
}

fn kelvin(joules: f64) -> f64 {
    joules / BOLTZMANN
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquilibriumConfig {
    pub ions: usize,
    pub beta: f64,
    pub curvature: Curvature,
    /// Scales positions to metres when positive.
    pub axial_frequency_hz: f64,
}

impl Default for EquilibriumConfig {
    fn default() -> Self {
        Self {
            ions: 3,
            beta: 0.0,
            curvature: Curvature::Confining,
            axial_frequency_hz: 0.0,
        }
    }
}

#[derive(Serialize)]
struct EquilibriumSummary {
    ions: usize,
    beta: f64,
    curvature: Curvature,
    residual_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_spacing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    std_spacing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spacing_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    length_m: Option<f64>,
}

pub fn equilibrium(ctx: &mut Context, config: EquilibriumConfig) -> CliResult<RunReport> {
    if config.ions == 0 {
        return Err(CliError::config("ions: must be positive"));
    }
    if !(config.beta >= 0.0 && config.beta.is_finite()) {
        return Err(CliError::config(format!("beta: must be non-negative, got {}", config.beta)));
    }
    if config.curvature == Curvature::Anticonfining && config.beta <= 0.0 {
        return Err(CliError::config("beta: the anticonfining curvature needs beta > 0"));
    }
    if !(config.axial_frequency_hz >= 0.0) {
        return Err(CliError::config("axial_frequency_hz: must be non-negative"));
    }
    let chain = solve_equilibrium_with(config.ions, config.beta, config.curvature, None).map_err(failed)?;
    let length = if config.axial_frequency_hz > 0.0 {
        Some(
            characteristic_length(&IonSpecies::yb171(), std::f64::consts::TAU * config.axial_frequency_hz)
                .map_err(invalid)?,
        )
    } else {
        None
    };
    let mut header = vec!["index", "u"];
    if length.is_some() {
        header.push("x_m");
    }
    let rows: Vec<Vec<Cell>> = chain
        .positions
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let mut row = vec![Cell::from(i), Cell::from(u)];
            if let Some(l) = length {
                row.push(Cell::from(u * l));
            }
            row
        })
        .collect();
    ctx.out.csv("equilibrium.csv", &header, &rows)?;
    let stats = (config.ions >= 2).then(|| spacing_stats(&chain)).transpose().map_err(failed)?;
    ctx.out.json(
        "summary.json",
        &EquilibriumSummary {
            ions: config.ions,
            beta: config.beta,
            curvature: config.curvature,
            residual_norm: chain.residual_norm,
            mean_spacing: stats.map(|s| s.mean_spacing),
            std_spacing: stats.map(|s| s.std_spacing),
            spacing_ratio: stats.map(|s| s.ratio),
            length_m: length,
        },
    )?;
    Ok(RunReport {
        config: echo(&config),
        ..Default::default()
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeBetaConfig {
    pub ions: Vec<usize>,
    /// Points of the log-spaced β grid written to `curve.csv`.
    pub curve_points: usize,
}

impl Default for OptimizeBetaConfig {
    fn default() -> Self {
        Self {
            ions: vec![20, 28, 36, 44],
            curve_points: BETA_GRID_POINTS,
        }
    }
}

#[derive(Serialize)]
struct BetaRow {
    ions: usize,
    beta: f64,
    curvature: Curvature,
    min_ratio: f64,
    harmonic_ratio: f64,
}

pub fn optimize_beta_cmd(ctx: &mut Context, config: OptimizeBetaConfig) -> CliResult<RunReport> {
    if config.ions.is_empty() || config.ions.iter().any(|&n| !(2..=200).contains(&n)) {
        return Err(CliError::config("ions: each entry must lie in 2..=200"));
    }
    if config.curve_points < 2 {
        return Err(CliError::config("curve_points: need at least 2"));
    }
    let grid = beta_grid(config.curve_points);
    let results = parallel_map(
        ctx.workers,
        config.ions.len(),
        |i| -> cryoion::Result<_> {
            let n = config.ions[i];
            let best = optimize_beta(n)?;
            let harmonic = spacing_stats(&solve_equilibrium(n, 0.0)?)?.ratio;
            let curve = ratio_curve(n, best.curvature, &grid)?;
            Ok((best, harmonic, curve))
        },
        ctx.progress(),
    );
    let mut rows = Vec::new();
    let mut table = Vec::new();
    let mut curve_rows = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        let n = config.ions[i];
        let (best, harmonic, curve) = r.map_err(CliError::physics)?.map_err(failed)?;
        table.push(vec![
            Cell::from(n),
            Cell::from(best.beta),
            Cell::from(curvature_name(best.curvature)),
            Cell::from(best.min_ratio),
            Cell::from(harmonic),
        ]);
        for (beta, ratio) in curve {
            curve_rows.push(vec![
                Cell::from(n),
                Cell::from(curvature_name(best.curvature)),
                Cell::from(beta),
                Cell::from(1.0 / beta),
                Cell::from(ratio),
            ]);
        }
        rows.push(BetaRow {
            ions: n,
            beta: best.beta,
            curvature: best.curvature,
            min_ratio: best.min_ratio,
            harmonic_ratio: harmonic,
        });
    }
    ctx.out.csv(
        "optimum.csv",
        &["ions", "beta", "curvature", "min_ratio", "harmonic_ratio"],
        &table,
    )?;
    ctx.out
        .csv("curve.csv", &["ions", "curvature", "beta", "inv_beta", "ratio"], &curve_rows)?;
    ctx.out.json("summary.json", &rows)?;
    Ok(RunReport {
        config: echo(&config),
        ..Default::default()
    })
}

fn curvature_name(c: Curvature) -> &'static str {
    match c {
        Curvature::Confining => "confining",
        Curvature::Anticonfining => "anticonfining",
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScatterConfig {
    pub gas_temperature_k: f64,
    /// Monte Carlo samples for ⟨ΔE⟩.
    pub samples: usize,
    pub b_max_factor: f64,
    pub capture_model: CaptureModel,
    /// Rows of the θ(b) table, evenly spaced in b up to `grid_max_factor` b_c.
    pub grid_points: usize,
    pub grid_max_factor: f64,
    /// Relative speed of the θ(b) table [m/s]; the most probable thermal
    /// speed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_speed_m_s: Option<f64>,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        Self {
            gas_temperature_k: 4.5,
            samples: 100_000,
            b_max_factor: 3.0,
            capture_model: CaptureModel::OverlapAngle,
            grid_points: 50,
            grid_max_factor: 5.0,
            relative_speed_m_s: None,
        }
    }
}

#[derive(Serialize)]
struct ScatterSummary {
    c4_j_m4: f64,
    relative_speed_m_s: f64,
    critical_impact_parameter_m: f64,
    p_wave_barrier_mk: f64,
    langevin_rate_coefficient_m3_s: f64,
    mean_energy_transfer_mk: f64,
    mean_energy_transfer_std_err_mk: f64,
    samples: usize,
}

pub fn scatter(ctx: &mut Context, config: ScatterConfig) -> CliResult<RunReport> {
    if config.grid_points == 0 || !(config.grid_max_factor > 0.0) {
        return Err(CliError::config("grid_points, grid_max_factor: must be positive"));
    }
    let gas = BackgroundGas::h2(config.gas_temperature_k)
        .map_err(|e| CliError::config(format!("gas_temperature_k: {e}")))?;
    let ion = IonSpecies::yb171();
    let interaction = Interaction::new(&gas, &ion);
    let v0 = config.relative_speed_m_s.unwrap_or_else(|| gas.most_probable_speed());
    if !(v0 > 0.0 && v0.is_finite()) {
        return Err(CliError::config("relative_speed_m_s: must be positive"));
    }
    let bc = critical_impact_parameter(v0, &interaction).map_err(failed)?;
    let mut rows = Vec::with_capacity(config.grid_points);
    for i in 1..=config.grid_points {
        let f = config.grid_max_factor * i as f64 / config.grid_points as f64;
        let s = scattering_angle(f * bc, v0, &interaction, config.capture_model).map_err(failed)?;
        rows.push(vec![
            Cell::from(f),
            Cell::from(f * bc),
            Cell::from(s.theta),
            Cell::from(if s.captured { "true" } else { "false" }),
        ]);
    }
    ctx.out.csv("scatter.csv", &["b_over_bc", "b_m", "theta_rad", "captured"], &rows)?;
    let est = mean_energy_transfer(
        &gas,
        &ion,
        config.samples,
        config.b_max_factor,
        config.capture_model,
        ctx.seed,
    )
    .map_err(invalid)?;
    ctx.out.json(
        "summary.json",
        &ScatterSummary {
            c4_j_m4: c4_coefficient(&gas, &ion),
            relative_speed_m_s: v0,
            critical_impact_parameter_m: bc,
            p_wave_barrier_mk: kelvin(p_wave_barrier(&gas, &ion)) * 1e3,
            langevin_rate_coefficient_m3_s: langevin_rate_coefficient(&gas, &ion),
            mean_energy_transfer_mk: kelvin(est.mean) * 1e3,
            mean_energy_transfer_std_err_mk: kelvin(est.std_err) * 1e3,
            samples: est.samples,
        },
    )?;
    Ok(RunReport {
        config: echo(&config),
        ..Default::default()
    })
}

#[derive(Serialize)]
struct FlipSummary<'a> {
    master_seed: u64,
    config: &'a FlipExperimentConfig,
    result: &'a FlipResult,
}

fn kind_name(k: SampleKind) -> &'static str {
    match k {
        SampleKind::Unflipped => "unflipped",
        SampleKind::Flipped => "flipped",
        SampleKind::Partial => "partial",
        SampleKind::Ejected => "ejected",
        SampleKind::Failed => "failed",
    }
}

pub fn flip_mc(ctx: &mut Context, config: FlipExperimentConfig) -> CliResult<RunReport> {
    config.validate().map_err(invalid)?;
    let (result, samples) = estimate_p_flip(&config, ctx.seed, ctx.workers, ctx.progress()).map_err(failed)?;
    let per = config.samples_per_batch;
    let rows: Vec<Vec<Cell>> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![
                Cell::from(i),
                Cell::from(i / per),
                Cell::from(kind_name(s.kind)),
                Cell::from(kelvin(s.kick_energy)),
                Cell::from(s.phase_step),
                Cell::from(s.ion),
            ]
        })
        .collect();
    ctx.out.csv(
        "samples.csv",
        &["index", "batch", "kind", "kick_energy_k", "phase_step", "ion"],
        &rows,
    )?;
    ctx.out.json(
        "summary.json",
        &FlipSummary {
            master_seed: ctx.seed,
            config: &config,
            result: &result,
        },
    )?;
    Ok(RunReport {
        config: echo(&config),
        failures: samples
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.failure.clone().map(|m| (i, m)))
            .collect(),
        batches: (0..config.batches).map(|b| (b * per, per)).collect(),
    })
}

/// Pressure inference inputs; `method` selects the variant.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PressureConfig {
    /// Invert a measured reconfiguration rate.
    Elastic {
        elastic_rate: Measured,
        p_flip: Measured,
        gas_temperature_k: f64,
        #[serde(default)]
        convention: DensityConvention,
    },
    /// Scale a warm reference pressure by the inelastic rate ratio.
    Ratio {
        cold_rate: Measured,
        warm_rate: Measured,
        warm_pressure_torr: f64,
        cold_temperature_k: f64,
        warm_temperature_k: f64,
    },
    /// Simulate reconfigurations at a known pressure and infer it back.
    Synthetic {
        pressure_torr: f64,
        p_flip: f64,
        ions: usize,
        duration_s: f64,
        gas_temperature_k: f64,
        #[serde(default)]
        convention: DensityConvention,
    },
}

impl Default for PressureConfig {
    fn default() -> Self {
        PressureConfig::Synthetic {
            pressure_torr: 2e-12,
            p_flip: 0.2,
            ions: 31,
            duration_s: 3e5,
            gas_temperature_k: 4.7,
            convention: DensityConvention::TwoThirds,
        }
    }
}

#[derive(Serialize)]
struct PressureSummary {
    pressure_torr: f64,
    uncertainty_torr: f64,
    estimate: PressureEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    true_pressure_torr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deviation_sigma: Option<f64>,
}

pub fn pressure(ctx: &mut Context, config: PressureConfig) -> CliResult<RunReport> {
    let ion = IonSpecies::yb171();
    let gas_at = |t: f64| {
        BackgroundGas::h2(t).map_err(|e| CliError::config(format!("gas_temperature_k: {e}")))
    };
    let (estimate, truth) = match &config {
        PressureConfig::Elastic {
            elastic_rate,
            p_flip,
            gas_temperature_k,
            convention,
        } => {
            let gas = gas_at(*gas_temperature_k)?;
            (infer_pressure_elastic(*elastic_rate, *p_flip, &gas, &ion, *convention).map_err(invalid)?, None)
        }
        PressureConfig::Ratio {
            cold_rate,
            warm_rate,
            warm_pressure_torr,
            cold_temperature_k,
            warm_temperature_k,
        } => (
            infer_pressure_ratio(
                *cold_rate,
                *warm_rate,
                torr_to_pa(*warm_pressure_torr),
                *cold_temperature_k,
                *warm_temperature_k,
            )
            .map_err(invalid)?,
            None,
        ),
        PressureConfig::Synthetic {
            pressure_torr,
            p_flip,
            ions,
            duration_s,
            gas_temperature_k,
            convention,
        } => {
            let gas = gas_at(*gas_temperature_k)?;
            let p = torr_to_pa(*pressure_torr);
            let measured =
                synthetic_elastic_rate(p, &gas, &ion, *convention, *p_flip, *ions, *duration_s, ctx.seed)
                    .map_err(invalid)?;
            let est = infer_pressure_elastic(measured, Measured::exact(*p_flip), &gas, &ion, *convention)
                .map_err(failed)?;
            (est, Some(p))
        }
    };
    let deviation = truth.map(|p| (estimate.pressure - p) / estimate.uncertainty);
    ctx.out.csv(
        "pressure.csv",
        &["method", "pressure_torr", "uncertainty_torr"],
        &[vec![
            Cell::from(match estimate.method {
                cryoion::experiments::PressureMethod::Elastic => "elastic",
                cryoion::experiments::PressureMethod::InelasticRatio => "inelastic-ratio",
            }),
            Cell::from(estimate.pressure_torr()),
            Cell::from(estimate.uncertainty_torr()),
        ]],
    )?;
    ctx.out.json(
        "summary.json",
        &PressureSummary {
            pressure_torr: estimate.pressure_torr(),
            uncertainty_torr: estimate.uncertainty_torr(),
            estimate,
            true_pressure_torr: truth.map(pa_to_torr),
            deviation_sigma: deviation,
        },
    )?;
    Ok(RunReport {
        config: echo(&config),
        ..Default::default()
    })
}

/// One budget entry in a heat-load config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HeatItemConfig {
    Radiative {
        component: String,
        stage: Stage,
        area_m2: f64,
        t_hot_k: f64,
        t_cold_k: f64,
        view_factor: f64,
    },
    /// Conductivity from a bundled `material` or a CSV `table` file.
    Conductive {
        component: String,
        stage: Stage,
        cross_section_m2: f64,
        length_m: f64,
        #[serde(default)]
        material: Option<Material>,
        #[serde(default)]
        table: Option<PathBuf>,
        t1_k: f64,
        t2_k: f64,
    },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatloadConfig {
    pub items: Vec<HeatItemConfig>,
}

fn build_items(config: &HeatloadConfig) -> CliResult<Vec<BudgetItem>> {
    config
        .items
        .iter()
        .enumerate()
        .map(|(i, item)| match item {
            HeatItemConfig::Radiative {
                component,
                stage,
                area_m2,
                t_hot_k,
                t_cold_k,
                view_factor,
            } => {
                let s = RadiativeSurface::new(*area_m2, *t_hot_k, *t_cold_k, *view_factor)
                    .map_err(|e| CliError::config(format!("items[{i}]: {e}")))?;
                Ok(BudgetItem {
                    component: component.clone(),
                    stage: *stage,
                    source: HeatSource::Radiative(s),
                })
            }
            HeatItemConfig::Conductive {
                component,
                stage,
                cross_section_m2,
                length_m,
                material,
                table,
                t1_k,
                t2_k,
            } => {
                let table = match (material, table) {
                    (Some(m), None) => m.table(),
                    (None, Some(path)) => {
                        let text = std::fs::read_to_string(path)
                            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
                        ConductivityTable::from_csv(&text)
                            .map_err(|e| CliError::config(format!("items[{i}].table: {e}")))?
                    }
                    _ => {
                        return Err(CliError::config(format!(
                            "items[{i}]: give exactly one of material, table"
                        )))
                    }
                };
                Ok(BudgetItem {
                    component: component.clone(),
                    stage: *stage,
                    source: HeatSource::Conductive(WireRun {
                        cross_section: *cross_section_m2,
                        length: *length_m,
                        table,
                        t1: *t1_k,
                        t2: *t2_k,
                    }),
                })
            }
        })
        .collect()
}

#[derive(Serialize)]
struct HeatloadSummary {
    rows: Vec<BudgetRow>,
    total_40k_w: f64,
    total_4k_w: f64,
}

/// Two-column budget with the 40 K stage in W and the 4 K stage in mW.
pub fn render_budget(rows: &[BudgetRow]) -> String {
    let cell = |q: Option<f64>, scale: f64| q.map_or("-".to_string(), |v| format!("{:.3}", v * scale));
    let mut s = format!("{:<16}{:>12}{:>12}\n", "Component", "Q_40K [W]", "Q_4K [mW]");
    for r in rows {
        s += &format!("{:<16}{:>12}{:>12}\n", r.component, cell(r.q_40k, 1.0), cell(r.q_4k, 1e3));
    }
    let (a, b) = budget_totals(rows);
    s += &format!("{:<16}{:>12.3}{:>12.3}\n", "total", a, b * 1e3);
    s
}

pub fn heatload(ctx: &mut Context, config: Option<HeatloadConfig>) -> CliResult<RunReport> {
    let items = match &config {
        Some(c) => build_items(c)?,
        None => reference_budget(),
    };
    let rows = budget_table(&items).map_err(|e| match e {
        cryoion::Error::TableGap { .. } | cryoion::Error::Domain(_) => CliError::config(e.to_string()),
        other => failed(other),
    })?;
    let opt = |q: Option<f64>, scale: f64| q.map_or(Cell::from(""), |v| Cell::from(v * scale));
    let table: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| vec![Cell::from(r.component.as_str()), opt(r.q_40k, 1.0), opt(r.q_4k, 1e3)])
        .collect();
    ctx.out.csv("budget.csv", &["component", "q_40k_w", "q_4k_mw"], &table)?;
    let (a, b) = budget_totals(&rows);
    print!("{}", render_budget(&rows));
    ctx.out.json(
        "summary.json",
        &HeatloadSummary {
            rows,
            total_40k_w: a,
            total_4k_w: b,
        },
    )?;
    Ok(RunReport {
        config: config.map_or_else(|| serde_json::json!({"preset": "paper-appendix-a"}), |c| echo(&c)),
        ..Default::default()
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResonatorConfig {
    pub resonator: ResonatorParams,
    /// Measured unloaded Q; reports the reflected power it implies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unloaded_q: Option<f64>,
    /// Drive frequency to tune to [Hz]; reports the capacitance it needs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_frequency_hz: Option<f64>,
}

impl Default for ResonatorConfig {
    fn default() -> Self {
        Self {
            resonator: ResonatorParams::reference(),
            unloaded_q: None,
            target_frequency_hz: Some(24e6),
        }
    }
}

#[derive(Serialize)]
struct ResonatorSummary {
    unloaded_q: f64,
    resonant_frequency_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    reflected_power_for_unloaded_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_capacitance_for_target_f: Option<f64>,
}

pub fn resonator(ctx: &mut Context, config: ResonatorConfig) -> CliResult<RunReport> {
    config
        .resonator
        .validate()
        .map_err(|e| CliError::config(format!("resonator: {e}")))?;
    let summary = ResonatorSummary {
        unloaded_q: config.resonator.unloaded_q().map_err(invalid)?,
        resonant_frequency_hz: resonant_frequency(&config.resonator).map_err(invalid)?,
        reflected_power_for_unloaded_q: config
            .unloaded_q
            .map(|q| reflected_power_for(q, config.resonator.q_load))
            .transpose()
            .map_err(|e| CliError::config(format!("unloaded_q: {e}")))?,
        total_capacitance_for_target_f: config
            .target_frequency_hz
            .map(|f| capacitance_for(f, config.resonator.self_inductance))
            .transpose()
            .map_err(|e| CliError::config(format!("target_frequency_hz: {e}")))?,
    };
    ctx.out.json("summary.json", &summary)?;
    Ok(RunReport {
        config: echo(&config),
        ..Default::default()
    })
}

#[derive(Serialize)]
struct CoolingSummary {
    final_mean_kinetic_energy_mk: f64,
    doppler_limit_mk: f64,
    photons: u64,
}

pub fn cool_demo(ctx: &mut Context, config: CoolingRunConfig) -> CliResult<RunReport> {
    config.validate().map_err(invalid)?;
    let run = run_cooling(&config, ctx.seed).map_err(failed)?;
    let rows: Vec<Vec<Cell>> = run
        .records
        .iter()
        .map(|r| {
            vec![
                Cell::from(r.time),
                Cell::from(kelvin(r.mean_kinetic_energy)),
                Cell::from(r.photons),
            ]
        })
        .collect();
    ctx.out
        .csv("cooling.csv", &["time_s", "mean_kinetic_energy_k", "photons"], &rows)?;
    ctx.out.json(
        "summary.json",
        &CoolingSummary {
            final_mean_kinetic_energy_mk: run.final_energy_k() * 1e3,
            doppler_limit_mk: kelvin(run.doppler_limit) * 1e3,
            photons: run.records.iter().map(|r| r.photons).sum(),
        },
    )?;
    Ok(RunReport {
        config: echo(&config),
        ..Default::default()
    })
}
