//! Parameter sweeps over the physical Deutsch-Jozsa run, the feasibility
//! calculator, and standing-wave coupling geometry.
//!
//! Sweeps work in units of `Omega_1 = 1`: decay and dipole strengths are given
//! as ratios to `Omega_1`, so the tables are independent of the absolute scale.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dj::{run_physical, DjOutcome};
use crate::dynamics::{DipoleVariant, ModelParams};
use crate::error::{Error, Result};
use crate::gates::gate_time;
use crate::oracles::BooleanFunction;

/// Truth table of the three-qubit balanced function used by the 3-qubit sweeps.
pub const THREE_QUBIT_FUNCTION: &str = "0x9A";
/// Truth table of the four-qubit balanced function used by the 4-qubit sweep.
pub const FOUR_QUBIT_FUNCTION: &str = "0x665A";
/// Coupling ratios `Omega_1 : Omega_2 : Omega_3` of the three-qubit gate.
pub const THREE_QUBIT_RATIOS: [f64; 3] = [1.0, 10.0, 10.0];

/// Metric columns, in output order.
pub const METRIC_COLUMNS: [&str; 8] = [
    "fidelity_raw",
    "fidelity_normalized",
    "p_zero",
    "success_prob",
    "leakage",
    "norm_loss",
    "fidelity_raw_fixed",
    "fidelity_normalized_fixed",
];

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    end
                } else {
                    start + (end - start) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

pub fn default_kappa_grid() -> Vec<f64> {
    linspace(0.0, 0.1, 26)
}

pub fn default_deviation_grid() -> Vec<f64> {
    linspace(-0.05, 0.05, 21)
}

pub fn default_eta_grid() -> Vec<f64> {
    linspace(0.05, 0.5, 19)
}

pub fn default_delta_grid() -> Vec<f64> {
    linspace(0.0, 0.2, 21)
}

pub fn default_kappa_set() -> Vec<f64> {
    vec![0.1, 0.05, 0.02]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub unit: String,
}

impl Axis {
    fn new(name: &str, unit: &str) -> Self {
        Self {
            name: name.to_string(),
            unit: unit.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Number(f64),
    Label(String),
}

impl Coord {
    fn csv(&self) -> String {
        match self {
            Coord::Number(v) => fmt_float(*v),
            Coord::Label(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub fidelity_raw: f64,
    pub fidelity_normalized: f64,
    pub p_zero: f64,
    pub success_prob: f64,
    pub leakage: f64,
    pub norm_loss: f64,
    pub fidelity_raw_fixed: f64,
    pub fidelity_normalized_fixed: f64,
}

impl Metrics {
    fn values(&self) -> [f64; 8] {
        [
            self.fidelity_raw,
            self.fidelity_normalized,
            self.p_zero,
            self.success_prob,
            self.leakage,
            self.norm_loss,
            self.fidelity_raw_fixed,
            self.fidelity_normalized_fixed,
        ]
    }
}

impl From<&DjOutcome> for Metrics {
    fn from(o: &DjOutcome) -> Self {
        Self {
            fidelity_raw: o.fidelity_raw,
            fidelity_normalized: o.fidelity_normalized,
            p_zero: o.p_zero,
            success_prob: o.success_prob,
            leakage: o.leakage,
            norm_loss: o.norm_loss,
            fidelity_raw_fixed: o.fidelity_raw_fixed,
            fidelity_normalized_fixed: o.fidelity_normalized_fixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub coords: Vec<Coord>,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub name: String,
    pub function: String,
    pub axes: Vec<Axis>,
    pub rows: Vec<SweepRow>,
}

/// Scientific notation with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl SweepTable {
    pub fn header(&self) -> Vec<String> {
        self.axes
            .iter()
            .map(|a| a.name.clone())
            .chain(METRIC_COLUMNS.iter().map(|s| s.to_string()))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for row in &self.rows {
            let record: Vec<String> = row
                .coords
                .iter()
                .map(Coord::csv)
                .chain(row.metrics.values().iter().map(|&v| fmt_float(v)))
                .collect();
            w.write_record(record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }

    /// One flat JSON object per row, keyed by axis and metric names.
    pub fn to_json_records(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (axis, c) in self.axes.iter().zip(&row.coords) {
                    obj.insert(axis.name.clone(), serde_json::to_value(c).expect("coord"));
                }
                for (name, v) in METRIC_COLUMNS.iter().zip(row.metrics.values()) {
                    obj.insert(name.to_string(), serde_json::json!(v));
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    pub fn column(&self, metric: &str) -> Option<Vec<f64>> {
        let k = METRIC_COLUMNS.iter().position(|&m| m == metric)?;
        Some(self.rows.iter().map(|r| r.metrics.values()[k]).collect())
    }
}

/// Worker bound for grid evaluation; `None` uses the global pool.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepOptions {
    pub jobs: Option<usize>,
}

fn evaluate<P, F>(points: Vec<P>, options: SweepOptions, f: F) -> Result<Vec<Metrics>>
where
    P: Send + Sync,
    F: Fn(&P) -> Result<Metrics> + Send + Sync,
{
    let run = || points.par_iter().map(&f).collect::<Result<Vec<_>>>();
    match options.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(run),
        None => run(),
    }
}

fn require_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::param(name, "grid must not be empty"));
    }
    if let Some(v) = grid.iter().find(|v| !v.is_finite()) {
        return Err(Error::param(name, format!("non-finite grid value {v}")));
    }
    Ok(())
}

fn check_finite(rows: &[SweepRow]) -> Result<()> {
    if rows
        .iter()
        .any(|r| r.metrics.values().iter().any(|v| !v.is_finite()))
    {
        return Err(Error::NonFinite("sweep metrics"));
    }
    Ok(())
}

/// Fidelity over decay rate and timing deviation, three qubits, ratios 1:10:10.
pub fn sweep_fig3a(
    kappa_grid: &[f64],
    deviation_grid: &[f64],
    f: &BooleanFunction,
    options: SweepOptions,
) -> Result<SweepTable> {
    require_grid("kappa_grid", kappa_grid)?;
    require_grid("deviation_grid", deviation_grid)?;
    if let Some(k) = kappa_grid.iter().find(|&&k| !(0.0..4.0).contains(&k)) {
        return Err(Error::param(
            "kappa_grid",
            format!("kappa/omega1 must lie in [0, 4), got {k}"),
        ));
    }
    let base = ModelParams::from_ratios(1.0, &THREE_QUBIT_RATIOS)?;
    let points: Vec<(f64, f64)> = kappa_grid
        .iter()
        .flat_map(|&k| deviation_grid.iter().map(move |&d| (k, d)))
        .collect();
    let metrics = evaluate(points.clone(), options, |&(k, d)| {
        let p = base.clone().with_kappa(k).with_timing_deviation(d);
        Ok(Metrics::from(&run_physical(f, &p)?))
    })?;
    let rows: Vec<SweepRow> = points
        .into_iter()
        .zip(metrics)
        .map(|((k, d), metrics)| SweepRow {
            coords: vec![Coord::Number(k), Coord::Number(d)],
            metrics,
        })
        .collect();
    check_finite(&rows)?;
    Ok(SweepTable {
        name: "fig3a".into(),
        function: f.to_hex(),
        axes: vec![
            Axis::new("kappa_over_omega1", "1"),
            Axis::new("timing_deviation", "1"),
        ],
        rows,
    })
}

/// Four-qubit fidelity over the coupling ratio `eta = Omega_1 / Omega` and decay.
pub fn sweep_fig3b(
    eta_grid: &[f64],
    kappa_grid: &[f64],
    f: &BooleanFunction,
    options: SweepOptions,
) -> Result<SweepTable> {
    require_grid("eta_grid", eta_grid)?;
    require_grid("kappa_grid", kappa_grid)?;
    if let Some(e) = eta_grid.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::param(
            "eta_grid",
            format!("eta must lie in (0, 1), got {e}"),
        ));
    }
    let points: Vec<(f64, f64)> = eta_grid
        .iter()
        .flat_map(|&e| kappa_grid.iter().map(move |&k| (e, k)))
        .collect();
    let n = f.n();
    let metrics = evaluate(points.clone(), options, |&(eta, k)| {
        let p = ModelParams::star(n, 1.0, eta)?.with_kappa(k);
        Ok(Metrics::from(&run_physical(f, &p)?))
    })?;
    let rows: Vec<SweepRow> = points
        .into_iter()
        .zip(metrics)
        .map(|((e, k), metrics)| SweepRow {
            coords: vec![Coord::Number(e), Coord::Number(k)],
            metrics,
        })
        .collect();
    check_finite(&rows)?;
    Ok(SweepTable {
        name: "fig3b".into(),
        function: f.to_hex(),
        axes: vec![Axis::new("eta", "1"), Axis::new("kappa_over_omega1", "1")],
        rows,
    })
}

/// Fidelity over dipole strength for a set of decay rates and dipole forms.
pub fn sweep_fig4(
    delta_grid: &[f64],
    kappa_set: &[f64],
    variants: &[DipoleVariant],
    f: &BooleanFunction,
    options: SweepOptions,
) -> Result<SweepTable> {
    require_grid("delta_grid", delta_grid)?;
    require_grid("kappa_set", kappa_set)?;
    if variants.is_empty() {
        return Err(Error::param(
            "variants",
            "at least one dipole variant is required",
        ));
    }
    if let Some(d) = delta_grid.iter().find(|&&d| d < 0.0) {
        return Err(Error::param(
            "delta_grid",
            format!("delta/omega1 must be >= 0, got {d}"),
        ));
    }
    let base = ModelParams::from_ratios(1.0, &THREE_QUBIT_RATIOS)?;
    let mut points = Vec::new();
    for &v in variants {
        for &k in kappa_set {
            for &d in delta_grid {
                points.push((v, k, d));
            }
        }
    }
    let metrics = evaluate(points.clone(), options, |&(v, k, d)| {
        let p = base.clone().with_kappa(k).with_dipole(d, v);
        Ok(Metrics::from(&run_physical(f, &p)?))
    })?;
    let rows: Vec<SweepRow> = points
        .into_iter()
        .zip(metrics)
        .map(|((v, k, d), metrics)| SweepRow {
            coords: vec![
                Coord::Label(v.name().to_string()),
                Coord::Number(k),
                Coord::Number(d),
            ],
            metrics,
        })
        .collect();
    check_finite(&rows)?;
    Ok(SweepTable {
        name: "fig4".into(),
        function: f.to_hex(),
        axes: vec![
            Axis::new("dipole_variant", "projector|exchange"),
            Axis::new("kappa_over_omega1", "1"),
            Axis::new("delta_over_omega1", "1"),
        ],
        rows,
    })
}

/// `Omega_0 cos(2 pi z / lambda0) exp(-r^2 / w^2)`; pass `f64::INFINITY` for `waist`
/// to drop the transverse factor.
pub fn coupling_from_position(
    z: f64,
    lambda0: f64,
    omega0: f64,
    r: f64,
    waist: f64,
) -> Result<f64> {
    if !(lambda0 > 0.0) {
        return Err(Error::param(
            "lambda0",
            format!("must be positive, got {lambda0}"),
        ));
    }
    if !(waist > 0.0) {
        return Err(Error::param(
            "waist",
            format!("must be positive, got {waist}"),
        ));
    }
    let transverse = if waist.is_infinite() {
        1.0
    } else {
        (-(r * r) / (waist * waist)).exp()
    };
    Ok(omega0 * (2.0 * PI * z / lambda0).cos() * transverse)
}

/// Offset from an antinode at which the coupling drops to `ratio * Omega_0`.
pub fn position_for_ratio(ratio: f64, lambda0: f64) -> Result<f64> {
    if !(ratio.abs() <= 1.0) {
        return Err(Error::param(
            "ratio",
            format!("|ratio| must be <= 1, got {ratio}"),
        ));
    }
    if !(lambda0 > 0.0) {
        return Err(Error::param(
            "lambda0",
            format!("must be positive, got {lambda0}"),
        ));
    }
    Ok(lambda0 / (2.0 * PI) * ratio.acos())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomTrack {
    pub atom: usize,
    /// Position along the cavity axis in units of the wavelength.
    pub z_over_lambda: f64,
    /// Coupling relative to the antinode value.
    pub relative_coupling: f64,
}

/// Atom 1 offset to couple at `ratio`, atoms 2..N one wavelength apart on antinodes.
pub fn atom_tracks(n: usize, ratio: f64) -> Result<Vec<AtomTrack>> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let half = n as f64 / 2.0;
    (1..=n)
        .map(|j| {
            let z = if j == 1 {
                -half + position_for_ratio(ratio, 1.0)?
            } else {
                -half + (j - 1) as f64
            };
            Ok(AtomTrack {
                atom: j,
                z_over_lambda: z,
                relative_coupling: coupling_from_position(z, 1.0, 1.0, 0.0, f64::INFINITY)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityInput {
    /// rad/s
    pub omega0: f64,
    /// rad/s
    pub omega1: f64,
    /// rad/s
    pub kappa: f64,
    /// Atomic lifetime in seconds.
    pub lifetime: f64,
    pub n_min: usize,
    pub n_max: usize,
    /// Register size quoted elsewhere, compared against the computed bound.
    pub claimed_max_n: Option<usize>,
    /// Register size for which atom tracks are listed.
    pub track_atoms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeEntry {
    pub n: usize,
    /// `2^(N-1) T_D`, seconds.
    pub runtime: f64,
    /// `kappa <= Omega_1 / 2^(N-2)`
    pub satisfies_bound: bool,
    pub within_cavity_decay_time: bool,
    pub within_lifetime: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub omega0: f64,
    pub omega1: f64,
    pub kappa: f64,
    pub eta: f64,
    pub t_gate: f64,
    /// `2 pi / kappa`; infinite (serialized as null) for `kappa = 0`.
    pub cavity_decay_time: Option<f64>,
    pub lifetime: f64,
    pub runtimes: Vec<RuntimeEntry>,
    /// Largest N in range with `kappa <= Omega_1 / 2^(N-2)`.
    pub max_n: Option<usize>,
    /// True when the bound never binds inside the range and `max_n` is the range end.
    pub max_n_capped: bool,
    /// Largest N in range whose runtime is shorter than the atomic lifetime.
    pub max_n_lifetime: Option<usize>,
    pub claimed_max_n: Option<usize>,
    pub discrepancy: Option<String>,
    pub atom_tracks: Vec<AtomTrack>,
}

fn satisfies_bound(kappa: f64, omega1: f64, n: usize) -> bool {
    kappa * 2f64.powi(n as i32 - 2) <= omega1
}

pub fn feasibility(input: &FeasibilityInput) -> Result<FeasibilityReport> {
    for (name, v) in [
        ("omega0", input.omega0),
        ("omega1", input.omega1),
        ("lifetime", input.lifetime),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, format!("must be positive, got {v}")));
        }
    }
    if !(input.kappa >= 0.0 && input.kappa.is_finite()) {
        return Err(Error::param(
            "kappa",
            format!("must be finite and >= 0, got {}", input.kappa),
        ));
    }
    if input.n_min == 0 || input.n_min > input.n_max || input.n_max > 62 {
        return Err(Error::param(
            "n_range",
            format!(
                "need 1 <= n_min <= n_max <= 62, got {}..={}",
                input.n_min, input.n_max
            ),
        ));
    }
    let t_gate = gate_time(input.omega1, input.kappa)?;
    let decay_time = (input.kappa > 0.0).then(|| 2.0 * PI / input.kappa);
    let runtimes: Vec<RuntimeEntry> = (input.n_min..=input.n_max)
        .map(|n| {
            let runtime = 2f64.powi(n as i32 - 1) * t_gate;
            RuntimeEntry {
                n,
                runtime,
                satisfies_bound: satisfies_bound(input.kappa, input.omega1, n),
                within_cavity_decay_time: decay_time.is_none_or(|d| runtime < d),
                within_lifetime: runtime < input.lifetime,
            }
        })
        .collect();
    let max_n = runtimes
        .iter()
        .rev()
        .find(|r| r.satisfies_bound)
        .map(|r| r.n);
    let max_n_lifetime = runtimes
        .iter()
        .rev()
        .find(|r| r.within_lifetime)
        .map(|r| r.n);
    let max_n_capped =
        max_n == Some(input.n_max) && satisfies_bound(input.kappa, input.omega1, input.n_max + 1);
    let discrepancy = match (input.claimed_max_n, max_n) {
        (Some(c), Some(m)) if c != m => Some(format!(
            "bound kappa <= omega1 / 2^(N-2) allows N = {m}{}, claimed N = {c}",
            if max_n_capped { " (range end)" } else { "" }
        )),
        (Some(c), None) => Some(format!(
            "bound is violated for every N in range, claimed N = {c}"
        )),
        _ => None,
    };
    Ok(FeasibilityReport {
        omega0: input.omega0,
        omega1: input.omega1,
        kappa: input.kappa,
        eta: input.omega1 / input.omega0,
        t_gate,
        cavity_decay_time: decay_time,
        lifetime: input.lifetime,
        runtimes,
        max_n,
        max_n_capped,
        max_n_lifetime,
        claimed_max_n: input.claimed_max_n,
        discrepancy,
        atom_tracks: atom_tracks(input.track_atoms, input.omega1 / input.omega0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab_input(kappa_ratio: f64) -> FeasibilityInput {
        let omega0 = 2.0 * PI * 51e3;
        let omega1 = 2.0 * PI * 5.1e3;
        FeasibilityInput {
            omega0,
            omega1,
            kappa: kappa_ratio * omega1,
            lifetime: 30e-3,
            n_min: 2,
            n_max: 16,
            claimed_max_n: Some(9),
            track_atoms: 4,
        }
    }

    #[test]
    fn grids() {
        let g = default_kappa_grid();
        assert_eq!((g.len(), g[0], g[25]), (26, 0.0, 0.1));
        assert_eq!(default_deviation_grid().len(), 21);
        assert_eq!(default_eta_grid().len(), 19);
        assert_eq!(*default_eta_grid().last().unwrap(), 0.5);
        assert_eq!(default_delta_grid().len(), 21);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn geometry() {
        let lam = 5.87e-3;
        assert!(
            (coupling_from_position(2.0 * lam, lam, 3.0, 0.0, f64::INFINITY).unwrap() - 3.0).abs()
                < 1e-12
        );
        assert!(
            coupling_from_position(lam / 4.0, lam, 3.0, 0.0, f64::INFINITY)
                .unwrap()
                .abs()
                < 1e-12
        );
        let z = position_for_ratio(0.1, lam).unwrap();
        assert!(
            (coupling_from_position(z, lam, 3.0, 0.0, f64::INFINITY).unwrap() - 0.3).abs() < 1e-12
        );
        let w = coupling_from_position(0.0, lam, 1.0, 1.0, 2.0).unwrap();
        assert!((w - (-0.25f64).exp()).abs() < 1e-15);
        assert!(position_for_ratio(1.5, lam).is_err());
        assert!(coupling_from_position(0.0, 0.0, 1.0, 0.0, 1.0).is_err());
        assert!(coupling_from_position(0.0, 1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn tracks_give_one_tenth_coupling_to_atom_one() {
        let t = atom_tracks(4, 0.1).unwrap();
        assert!((t[0].z_over_lambda - (-2.0 + 0.1f64.acos() / (2.0 * PI))).abs() < 1e-15);
        assert!((t[0].relative_coupling - 0.1).abs() < 1e-12);
        for a in &t[1..] {
            assert!((a.relative_coupling - 1.0).abs() < 1e-12);
        }
        assert_eq!(t[1].z_over_lambda, -1.0);
    }

    #[test]
    fn feasibility_numbers() {
        let r = feasibility(&lab_input(1e-3)).unwrap();
        assert!((r.t_gate - 98e-6).abs() / 98e-6 < 0.01);
        assert!((r.cavity_decay_time.unwrap() - 0.2).abs() / 0.2 < 0.02);
        let t9 = r.runtimes.iter().find(|e| e.n == 9).unwrap();
        assert!((t9.runtime - 25.1e-3).abs() < 0.05e-3);
        for w in r.runtimes.windows(2) {
            assert_eq!(w[1].runtime / w[0].runtime, 2.0);
        }
        assert_eq!(r.max_n, Some(11));
        assert_eq!(r.max_n_lifetime, Some(9));
        assert!(!r.max_n_capped);
        assert!(r.discrepancy.unwrap().contains("N = 11"));
        let m = r.max_n.unwrap();
        assert!(satisfies_bound(r.kappa, r.omega1, m));
        assert!(!satisfies_bound(r.kappa, r.omega1, m + 1));
    }

    #[test]
    fn feasibility_without_decay_is_capped() {
        let r = feasibility(&lab_input(0.0)).unwrap();
        assert_eq!(r.max_n, Some(16));
        assert!(r.max_n_capped);
        assert_eq!(r.cavity_decay_time, None);
        assert!(feasibility(&FeasibilityInput {
            kappa: 5.0 * 2.0 * PI * 5.1e3,
            ..lab_input(0.0)
        })
        .is_err());
        assert!(feasibility(&FeasibilityInput {
            n_min: 5,
            n_max: 3,
            ..lab_input(0.0)
        })
        .is_err());
    }

    #[test]
    fn small_fig3a_grid() {
        let f = BooleanFunction::from_hex(3, THREE_QUBIT_FUNCTION).unwrap();
        let t = sweep_fig3a(
            &[0.0, 0.05, 0.1],
            &[-0.01, 0.0, 0.01],
            &f,
            SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(t.rows.len(), 9);
        let origin = &t.rows[1];
        assert_eq!(origin.coords, vec![Coord::Number(0.0), Coord::Number(0.0)]);
        assert!(origin.metrics.fidelity_raw >= 0.99);
        // Non-increasing in kappa at zero deviation.
        assert!(t.rows[1].metrics.fidelity_raw >= t.rows[4].metrics.fidelity_raw);
        assert!(t.rows[4].metrics.fidelity_raw >= t.rows[7].metrics.fidelity_raw);
        let csv = t.to_csv().unwrap();
        let header = csv.lines().next().unwrap();
        assert!(header.starts_with("kappa_over_omega1,timing_deviation,fidelity_raw,fidelity_normalized,p_zero,success_prob,leakage"));
        assert_eq!(csv.lines().count(), 10);
        assert!(sweep_fig3a(&[], &[0.0], &f, SweepOptions::default()).is_err());
        assert!(sweep_fig3a(&[4.5], &[0.0], &f, SweepOptions::default()).is_err());
    }

    #[test]
    fn sweep_rows_are_order_independent() {
        let f = BooleanFunction::from_hex(3, THREE_QUBIT_FUNCTION).unwrap();
        let a = sweep_fig3a(
            &[0.02, 0.07],
            &[0.0, 0.03],
            &f,
            SweepOptions { jobs: Some(1) },
        )
        .unwrap();
        let b = sweep_fig3a(
            &[0.07, 0.02],
            &[0.03, 0.0],
            &f,
            SweepOptions { jobs: Some(3) },
        )
        .unwrap();
        for ra in &a.rows {
            let rb = b.rows.iter().find(|r| r.coords == ra.coords).unwrap();
            assert_eq!(
                ra.metrics.values().map(f64::to_bits),
                rb.metrics.values().map(f64::to_bits)
            );
        }
    }

    #[test]
    fn json_records_are_flat() {
        let f = BooleanFunction::from_hex(3, THREE_QUBIT_FUNCTION).unwrap();
        let t = sweep_fig4(
            &[0.0],
            &[0.1],
            &[DipoleVariant::Exchange],
            &f,
            SweepOptions::default(),
        )
        .unwrap();
        let rec = t.to_json_records();
        assert_eq!(rec[0]["dipole_variant"], "exchange");
        assert_eq!(rec[0]["kappa_over_omega1"], 0.1);
        assert!(rec[0]["fidelity_raw"].as_f64().unwrap() > 0.9);
        assert!(t
            .to_csv()
            .unwrap()
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("exchange,1.0000000000000001e-1,"));
    }
}
