//! Cryostat heat loads and helical-resonator figures.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::STEFAN_BOLTZMANN;
use crate::error::{domain, Error, Result};

const COPPER_CSV: &str = include_str!("../data/ofhc_copper_rrr100.csv");
const STAINLESS_CSV: &str = include_str!("../data/stainless_304.csv");

/// Surface exchanging blackbody radiation with a warmer environment.
///
/// The load is Q̇ = σ A (T_hot⁴ − T_cold⁴) / V. The view factor V folds
/// geometry and emissivities into one number; V = 1 is a black surface
/// facing a black enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiativeSurface {
    /// [m²]
    pub area: f64,
    /// [K]
    pub t_hot: f64,
    /// [K]
    pub t_cold: f64,
    pub view_factor: f64,
}

impl RadiativeSurface {
    pub fn new(area: f64, t_hot: f64, t_cold: f64, view_factor: f64) -> Result<Self> {
        let s = Self {
            area,
            t_hot,
            t_cold,
            view_factor,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.area >= 0.0 && self.area.is_finite()) {
            return domain(format!("area must be non-negative, got {}", self.area));
        }
        if !(self.t_cold >= 0.0 && self.t_hot.is_finite()) {
            return domain("temperatures must be finite and non-negative");
        }
        if self.t_cold > self.t_hot {
            return domain(format!(
                "cold side ({} K) is warmer than hot side ({} K)",
                self.t_cold, self.t_hot
            ));
        }
        if !(self.view_factor > 0.0 && self.view_factor.is_finite()) {
            return domain(format!("view factor must be positive, got {}", self.view_factor));
        }
        Ok(())
    }
}

/// Radiative heat load [W].
pub fn radiative_load(surface: &RadiativeSurface) -> Result<f64> {
    surface.validate()?;
    Ok(STEFAN_BOLTZMANN * surface.area * (surface.t_hot.powi(4) - surface.t_cold.powi(4))
        / surface.view_factor)
}

/// Tabulated thermal conductivity λ(T), linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConductivityTable {
    temperature: Vec<f64>,
    conductivity: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct TableRow {
    temperature_k: f64,
    conductivity_w_per_m_k: f64,
}

impl ConductivityTable {
    /// Temperatures [K] strictly increasing, conductivities [W/(m·K)]
    /// strictly positive.
    pub fn new(temperature: Vec<f64>, conductivity: Vec<f64>) -> Result<Self> {
        if temperature.len() != conductivity.len() || temperature.len() < 2 {
            return domain("conductivity table needs at least two (T, λ) pairs of equal length");
        }
        if !temperature.windows(2).all(|w| w[0] < w[1]) || !temperature.iter().all(|t| t.is_finite()) {
            return domain("table temperatures must be finite and strictly increasing");
        }
        if !conductivity.iter().all(|&k| k > 0.0 && k.is_finite()) {
            return domain("table conductivities must be strictly positive");
        }
        Ok(Self {
            temperature,
            conductivity,
        })
    }

    /// Parses CSV with header `temperature_k,conductivity_w_per_m_k`;
    /// lines starting with `#` are comments.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut t = Vec::new();
        let mut k = Vec::new();
        for row in reader.deserialize::<TableRow>() {
            let row = row.map_err(|e| Error::Domain(format!("conductivity table: {e}")))?;
            t.push(row.temperature_k);
            k.push(row.conductivity_w_per_m_k);
        }
        Self::new(t, k)
    }

    pub fn temperatures(&self) -> &[f64] {
        &self.temperature
    }

    pub fn conductivities(&self) -> &[f64] {
        &self.conductivity
    }

    /// Keeps every `stride`-th point plus the last one.
    pub fn coarsened(&self, stride: usize) -> Self {
        let stride = stride.max(1);
        let last = self.temperature.len() - 1;
        let idx: Vec<usize> = (0..=last)
            .filter(|i| i % stride == 0 || *i == last)
            .collect();
        Self {
            temperature: idx.iter().map(|&i| self.temperature[i]).collect(),
            conductivity: idx.iter().map(|&i| self.conductivity[i]).collect(),
        }
    }

    fn value_at(&self, t: f64) -> f64 {
        let j = self.temperature.partition_point(|&x| x <= t).clamp(1, self.temperature.len() - 1);
        let (t0, t1) = (self.temperature[j - 1], self.temperature[j]);
        let (k0, k1) = (self.conductivity[j - 1], self.conductivity[j]);
        k0 + (k1 - k0) * (t - t0) / (t1 - t0)
    }

    /// ∫ λ dT between `t1` and `t2` by the trapezoid rule on the table
    /// nodes [W/m]. Sign follows the order of the limits.
    pub fn integral(&self, t1: f64, t2: f64) -> Result<f64> {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let (table_lo, table_hi) = (self.temperature[0], *self.temperature.last().unwrap());
        if !(lo >= table_lo && hi <= table_hi) {
            return Err(Error::TableGap {
                lo,
                hi,
                table_lo,
                table_hi,
            });
        }
        let mut nodes = vec![lo];
        nodes.extend(self.temperature.iter().copied().filter(|&t| t > lo && t < hi));
        nodes.push(hi);
        let sum: f64 = nodes
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * (self.value_at(w[0]) + self.value_at(w[1])))
            .sum();
        Ok(if t1 <= t2 { sum } else { -sum })
    }
}

/// Bundled conductivity data (NIST cryogenic material property fits,
/// tabulated 4 to 300 K in 1 K steps).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Material {
    OfhcCopperRrr100,
    Stainless304,
}

impl Material {
    pub fn table(self) -> ConductivityTable {
        let text = match self {
            Material::OfhcCopperRrr100 => COPPER_CSV,
            Material::Stainless304 => STAINLESS_CSV,
        };
        ConductivityTable::from_csv(text).expect("bundled table is valid")
    }
}

/// Conductor bridging two temperatures.
#[derive(Debug, Clone, PartialEq)]
pub struct WireRun {
    /// [m²]
    pub cross_section: f64,
    /// [m]
    pub length: f64,
    pub table: ConductivityTable,
    /// End temperatures [K], either order.
    pub t1: f64,
    pub t2: f64,
}

/// Conducted heat Q̇ = (A/L) |∫ λ dT| [W].
pub fn conductive_load(wire: &WireRun) -> Result<f64> {
    if !(wire.cross_section >= 0.0 && wire.length > 0.0) {
        return domain("wire needs a non-negative cross-section and a positive length");
    }
    Ok(wire.cross_section / wire.length * wire.table.integral(wire.t1, wire.t2)?.abs())
}

/// Cold stage a load lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    #[serde(rename = "40k")]
    K40,
    #[serde(rename = "4k")]
    K4,
}

/// One contribution to a stage budget.
#[derive(Debug, Clone, PartialEq)]
pub enum HeatSource {
    Radiative(RadiativeSurface),
    Conductive(WireRun),
}

impl HeatSource {
    pub fn load(&self) -> Result<f64> {
        match self {
            HeatSource::Radiative(s) => radiative_load(s),
            HeatSource::Conductive(w) => conductive_load(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetItem {
    pub component: String,
    pub stage: Stage,
    pub source: HeatSource,
}

/// Row of the two-column budget table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetRow {
    pub component: String,
    /// [W]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_40k: Option<f64>,
    /// [W]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_4k: Option<f64>,
}

/// Evaluates every item and groups loads by component, in first-seen order.
pub fn budget_table(items: &[BudgetItem]) -> Result<Vec<BudgetRow>> {
    let mut rows: Vec<BudgetRow> = Vec::new();
    for item in items {
        let q = item.source.load()?;
        let row = match rows.iter_mut().position(|r| r.component == item.component) {
            Some(i) => &mut rows[i],
            None => {
                rows.push(BudgetRow {
                    component: item.component.clone(),
                    q_40k: None,
                    q_4k: None,
                });
                rows.last_mut().unwrap()
            }
        };
        let slot = match item.stage {
            Stage::K40 => &mut row.q_40k,
            Stage::K4 => &mut row.q_4k,
        };
        *slot = Some(slot.unwrap_or(0.0) + q);
    }
    Ok(rows)
}

/// Stage totals (40 K, 4 K) [W].
pub fn budget_totals(rows: &[BudgetRow]) -> (f64, f64) {
    rows.iter().fold((0.0, 0.0), |(a, b), r| {
        (a + r.q_40k.unwrap_or(0.0), b + r.q_4k.unwrap_or(0.0))
    })
}

/// View factor shared by the viewport presets; room-temperature light
/// reaching the 4 K stage through the 40 K window sees a much larger one.
const VIEWPORT_V_40K: f64 = 1.163;
const VIEWPORT_V_4K: f64 = 1550.0;

fn window_area(diameter_inch: f64, count: f64) -> f64 {
    let r = 0.5 * diameter_inch * 0.0254;
    count * PI * r * r
}

/// Cryostat budget of the reference apparatus. Geometries are nominal and
/// the view factors are chosen so each entry reproduces the published
/// budget.
pub fn reference_budget() -> Vec<BudgetItem> {
    let surface = |area, t_hot, t_cold, v| RadiativeSurface {
        area,
        t_hot,
        t_cold,
        view_factor: v,
    };
    let rad = |component: &str, stage, s| BudgetItem {
        component: component.to_string(),
        stage,
        source: HeatSource::Radiative(s),
    };
    let copper = Material::OfhcCopperRrr100.table();
    // four SMA cables, 0.25 mm² copper-equivalent each
    let wire = |length, t1, t2| WireRun {
        cross_section: 4.0 * 0.25e-6,
        length,
        table: copper.clone(),
        t1,
        t2,
    };
    let two_inch = window_area(2.0, 1.0);
    let one_inch = window_area(1.0, 8.0);
    vec![
        rad("40 K shield", Stage::K40, surface(0.5, 300.0, 40.0, 41.0)),
        rad("4 K shield", Stage::K4, surface(0.35, 40.0, 4.0, 50.8)),
        rad("2'' viewport", Stage::K40, surface(two_inch, 300.0, 40.0, VIEWPORT_V_40K)),
        rad("2'' viewport", Stage::K4, surface(two_inch, 300.0, 4.0, VIEWPORT_V_4K)),
        rad("1'' viewports", Stage::K40, surface(one_inch, 300.0, 40.0, VIEWPORT_V_40K)),
        rad("1'' viewports", Stage::K4, surface(one_inch, 300.0, 4.0, VIEWPORT_V_4K)),
        BudgetItem {
            component: "wiring".into(),
            stage: Stage::K40,
            source: HeatSource::Conductive(wire(0.25, 300.0, 40.0)),
        },
        BudgetItem {
            component: "wiring".into(),
            stage: Stage::K4,
            source: HeatSource::Conductive(wire(0.314, 40.0, 4.0)),
        },
    ]
}

/// Lumped helical resonator and its coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonatorParams {
    /// [H]
    pub self_inductance: f64,
    /// [F]
    pub self_capacitance: f64,
    /// Trap plus wiring [F].
    #[serde(default)]
    pub load_capacitance: f64,
    pub q_load: f64,
    /// Reflected fraction of the RF power.
    #[serde(default)]
    pub reflected_power: f64,
}

impl ResonatorParams {
    /// 2 µH, 8 pF coil, unloaded, Q_load = 210 at R = 0.36.
    pub fn reference() -> Self {
        Self {
            self_inductance: 2e-6,
            self_capacitance: 8e-12,
            load_capacitance: 0.0,
            q_load: 210.0,
            reflected_power: 0.36,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.self_inductance > 0.0 && self.self_capacitance > 0.0) {
            return domain("self-inductance and self-capacitance must be positive");
        }
        if !(self.load_capacitance >= 0.0) {
            return domain("load capacitance must be non-negative");
        }
        if !(self.q_load > 0.0) {
            return domain(format!("loaded Q must be positive, got {}", self.q_load));
        }
        if !(0.0..1.0).contains(&self.reflected_power) {
            return domain(format!("reflected power must lie in [0, 1), got {}", self.reflected_power));
        }
        Ok(())
    }

    pub fn unloaded_q(&self) -> Result<f64> {
        unloaded_q(self.q_load, self.reflected_power)
    }
}

/// Q = 2 Q_load / (1 − √R).
pub fn unloaded_q(q_load: f64, reflected_power: f64) -> Result<f64> {
    if !(q_load > 0.0) {
        return domain(format!("loaded Q must be positive, got {q_load}"));
    }
    if !(0.0..1.0).contains(&reflected_power) {
        return domain(format!(
            "reflected power must lie in [0, 1), got {reflected_power}; R = 1 means no coupling"
        ));
    }
    Ok(2.0 * q_load / (1.0 - reflected_power.sqrt()))
}

/// Inverse of [`unloaded_q`]: R = (1 − 2 Q_load/Q)², requiring Q ≥ 2 Q_load.
pub fn reflected_power_for(q: f64, q_load: f64) -> Result<f64> {
    if !(q_load > 0.0 && q >= 2.0 * q_load) {
        return domain(format!("need Q ≥ 2 Q_load > 0, got Q = {q}, Q_load = {q_load}"));
    }
    Ok((1.0 - 2.0 * q_load / q).powi(2))
}

/// LC estimate f = 1 / (2π √(L (C_res + C_load))) [Hz].
pub fn resonant_frequency(params: &ResonatorParams) -> Result<f64> {
    if !(params.self_inductance > 0.0 && params.self_capacitance > 0.0 && params.load_capacitance >= 0.0) {
        return domain("inductance and capacitances must be positive");
    }
    let c = params.self_capacitance + params.load_capacitance;
    Ok(1.0 / (2.0 * PI * (params.self_inductance * c).sqrt()))
}

/// Total capacitance that tunes inductance `l` to `frequency` [F].
pub fn capacitance_for(frequency: f64, l: f64) -> Result<f64> {
    if !(frequency > 0.0 && l > 0.0) {
        return domain("frequency and inductance must be positive");
    }
    Ok(1.0 / (l * (2.0 * PI * frequency).powi(2)))
}
