use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use cavity_dj::dj::{physical_gates, run_ideal, run_with_gates, DjOutcome, DEFAULT_THRESHOLD};
use cavity_dj::dynamics::{DipoleVariant, ModelParams};
use cavity_dj::gates::{synthesize_cpf, CpfLabel};
use cavity_dj::hilbert::{build_space, Encoding};
use cavity_dj::lab::{self, fmt_float, FeasibilityInput, SweepOptions, SweepTable};
use cavity_dj::oracles::{decompose_oracle, enumerate_functions, BooleanFunction};
use cavity_dj::Error;
use serde::Serialize;

use crate::config::{Format, Preset, RunConfig};
use crate::CliError;

fn khz(f: f64) -> f64 {
    2.0 * PI * f * 1e3
}

/// Maps a library error to an exit class, naming `field` for input errors.
fn lib_err(field: &str) -> impl Fn(Error) -> CliError + '_ {
    move |e| match e {
        Error::NonFinite(_)
        | Error::BlockStructure { .. }
        | Error::ZeroVector(_)
        | Error::Io(_) => CliError::Failure(e.to_string()),
        Error::Parameter { name, .. } => CliError::Validation(format!("{name}: {e}")),
        other => CliError::Validation(format!("{field}: {other}")),
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(format!("write failed: {e}"))
}

fn check_finite(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !x.is_finite() => Err(CliError::Validation(format!(
            "{name}: must be finite, got {x}"
        ))),
        _ => Ok(()),
    }
}

/// Writes to `--out` or stdout; a failed run leaves no file behind.
fn emit<F>(cfg: &RunConfig, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    match &cfg.out {
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            body(&mut w)?;
            w.flush().map_err(io_err)
        }
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                CliError::Validation(format!("out: cannot create {}: {e}", path.display()))
            })?;
            let mut w = BufWriter::new(file);
            let result = body(&mut w).and_then(|_| w.flush().map_err(io_err));
            if result.is_err() {
                drop(w);
                let _ = std::fs::remove_file(path);
            }
            result
        }
    }
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(io_err)?;
    writeln!(w).map_err(io_err)
}

fn write_csv(
    w: &mut dyn Write,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(io_err)?;
    for row in rows {
        out.write_record(&row).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

fn register_size(cfg: &RunConfig) -> Result<usize, CliError> {
    let n = cfg.n.or(cfg.ratios.as_ref().map(Vec::len)).unwrap_or(3);
    if n == 0 {
        return Err(CliError::Validation("n: must be at least 1".into()));
    }
    Ok(n)
}

/// Physical parameters in rad/s.
fn model_params(cfg: &RunConfig, n: usize) -> Result<ModelParams, CliError> {
    for (name, v) in [
        ("omega1_khz", cfg.omega1_khz),
        ("eta", cfg.eta),
        ("kappa_ratio", cfg.kappa_ratio),
        ("delta_ratio", cfg.delta_ratio),
        ("timing_deviation", cfg.timing_deviation),
    ] {
        check_finite(name, v)?;
    }
    let omega1_khz = cfg.omega1_khz.unwrap_or(5.1);
    if omega1_khz <= 0.0 {
        return Err(CliError::Validation(format!(
            "omega1_khz: must be positive, got {omega1_khz}"
        )));
    }
    let omega1 = khz(omega1_khz);
    let base = match &cfg.ratios {
        Some(r) if r.len() != n => {
            return Err(CliError::Validation(format!(
                "ratios: {} values given for n = {n}",
                r.len()
            )));
        }
        Some(r) => ModelParams::from_ratios(omega1, r).map_err(lib_err("ratios"))?,
        None => ModelParams::star(n, omega1, cfg.eta.unwrap_or(0.1)).map_err(lib_err("eta"))?,
    };
    let kappa_ratio = cfg.kappa_ratio.unwrap_or(0.0);
    if kappa_ratio < 0.0 {
        return Err(CliError::Validation(format!(
            "kappa_ratio: must be >= 0, got {kappa_ratio}"
        )));
    }
    let delta_ratio = cfg.delta_ratio.unwrap_or(0.0);
    let params = base
        .with_kappa(kappa_ratio * omega1)
        .with_dipole(delta_ratio * omega1, cfg.dipole_variant.unwrap_or_default())
        .with_timing_deviation(cfg.timing_deviation.unwrap_or(0.0))
        .with_photon_cutoff(cfg.photon_cutoff.unwrap_or(1));
    params.validate().map_err(lib_err("kappa_ratio"))?;
    Ok(params)
}

/// `0x...` masks, or ordinal ids into the enumeration order.
fn parse_function(text: &str, n: Option<usize>) -> Result<BooleanFunction, CliError> {
    let text = text.trim();
    if let Some(digits) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        let n = match n {
            Some(n) => n,
            None => match digits.len() {
                0 => return Err(CliError::Validation("function: empty mask".into())),
                1 => 2,
                d => (4 * d).next_power_of_two().trailing_zeros() as usize,
            },
        };
        return BooleanFunction::from_hex(n, text).map_err(lib_err("function"));
    }
    let id: u64 = text.parse().map_err(|_| {
        CliError::Validation(format!(
            "function: `{text}` is neither a 0x mask nor an ordinal id"
        ))
    })?;
    let n = n.unwrap_or(3);
    enumerate_functions(n)
        .map_err(lib_err("n"))?
        .nth(id as usize)
        .ok_or_else(|| {
            CliError::Validation(format!(
                "function: ordinal id {id} out of range for n = {n}"
            ))
        })
}

#[derive(Serialize)]
struct GateEntry {
    input: String,
    atomic: String,
    re: f64,
    im: f64,
    abs: f64,
    leakage: f64,
    norm_loss: f64,
}

#[derive(Serialize)]
struct GateReport {
    label: String,
    atomic_label: String,
    duration_s: f64,
    params: ModelParams,
    diagonal: Vec<GateEntry>,
}

pub fn gate(cfg: &RunConfig) -> Result<(), CliError> {
    let n = register_size(cfg)?;
    let params = model_params(cfg, n)?;
    let label = match &cfg.label {
        Some(bits) => CpfLabel::parse(bits, n).map_err(lib_err("label"))?,
        None => CpfLabel::native(n).map_err(lib_err("n"))?,
    };
    let space = build_space(n, params.photon_cutoff).map_err(lib_err("photon_cutoff"))?;
    let encoding = Encoding::standard(n);
    let g = synthesize_cpf(&space, &encoding, &params, label).map_err(lib_err("model"))?;
    let diagonal: Vec<GateEntry> = g
        .diagonal()
        .iter()
        .enumerate()
        .map(|(x, z)| GateEntry {
            input: format!("{x:0n$b}"),
            atomic: CpfLabel::new(n, x).expect("in range").atomic(&encoding),
            re: z.re,
            im: z.im,
            abs: z.norm(),
            leakage: g.leakage[x],
            norm_loss: g.norm_loss[x],
        })
        .collect();
    let report = GateReport {
        label: label.to_string(),
        atomic_label: label.atomic(&encoding),
        duration_s: g.duration,
        params,
        diagonal,
    };
    emit(cfg, |w| match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(w, &report),
        Format::Csv => write_csv(
            w,
            &[
                "input",
                "atomic",
                "re",
                "im",
                "abs",
                "leakage",
                "norm_loss",
                "duration_s",
            ],
            report.diagonal.iter().map(|e| {
                vec![
                    e.input.clone(),
                    e.atomic.clone(),
                    fmt_float(e.re),
                    fmt_float(e.im),
                    fmt_float(e.abs),
                    fmt_float(e.leakage),
                    fmt_float(e.norm_loss),
                    fmt_float(report.duration_s),
                ]
            }),
        ),
    })
}

#[derive(Serialize)]
struct EnumEntry {
    id: u64,
    function: String,
    class: String,
    weight: usize,
    gates: Vec<String>,
}

pub fn enumerate(cfg: &RunConfig) -> Result<(), CliError> {
    let n = cfg.n.unwrap_or(3);
    let functions = enumerate_functions(n).map_err(lib_err("n"))?;
    let limit = cfg.limit.unwrap_or(u64::MAX);
    let entries = functions
        .take(limit.min(usize::MAX as u64) as usize)
        .enumerate()
        .map(|(id, f)| {
            let gates = decompose_oracle(&f)
                .map(|s| s.labels.iter().map(ToString::to_string).collect())
                .unwrap_or_default();
            EnumEntry {
                id: id as u64,
                function: f.to_hex(),
                class: f.class().to_string(),
                weight: f.weight(),
                gates,
            }
        });
    emit(cfg, |w| match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => write_csv(
            w,
            &["id", "function", "class", "weight", "gates"],
            entries.map(|e| {
                vec![
                    e.id.to_string(),
                    e.function,
                    e.class,
                    e.weight.to_string(),
                    e.gates.join(" "),
                ]
            }),
        ),
        Format::Json => {
            writeln!(w, "[").map_err(io_err)?;
            for (k, e) in entries.enumerate() {
                let sep = if k == 0 { "" } else { ",\n" };
                write!(w, "{sep}  {}", serde_json::to_string(&e).map_err(io_err)?)
                    .map_err(io_err)?;
            }
            writeln!(w, "\n]").map_err(io_err)
        }
    })
}

#[derive(Serialize)]
struct DjReport {
    mode: &'static str,
    gates: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<ModelParams>,
    #[serde(flatten)]
    outcome: DjOutcome,
}

pub fn dj(cfg: &RunConfig) -> Result<(), CliError> {
    let text = cfg
        .function
        .as_deref()
        .ok_or_else(|| CliError::Validation("function: required (e.g. --function 0x9A)".into()))?;
    let f = parse_function(text, cfg.n)?;
    if let Some(n) = cfg.n {
        if n != f.n() {
            return Err(CliError::Validation(format!(
                "function: mask is for {} qubits, n = {n}",
                f.n()
            )));
        }
    }
    let threshold = cfg.threshold.unwrap_or(DEFAULT_THRESHOLD);
    if !(0.0..=1.0).contains(&threshold) {
        return Err(CliError::Validation(format!(
            "threshold: must lie in [0, 1], got {threshold}"
        )));
    }
    let sequence = decompose_oracle(&f).map_err(lib_err("function"))?;
    let gates = sequence.labels.iter().map(ToString::to_string).collect();
    let report = if cfg.ideal.unwrap_or(false) {
        let mut outcome = run_ideal(&f).map_err(lib_err("function"))?;
        outcome.classification =
            cavity_dj::dj::classify_outcome(&outcome, threshold).map_err(lib_err("threshold"))?;
        DjReport {
            mode: "ideal",
            gates,
            params: None,
            outcome,
        }
    } else {
        let params = model_params(cfg, f.n())?;
        let physical = physical_gates(&f, &params).map_err(lib_err("model"))?;
        let outcome = run_with_gates(&f, &physical, threshold).map_err(lib_err("function"))?;
        DjReport {
            mode: "physical",
            gates,
            params: Some(params),
            outcome,
        }
    };
    emit(cfg, |w| match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(w, &report),
        Format::Csv => {
            let o = &report.outcome;
            write_csv(
                w,
                &[
                    "function",
                    "mode",
                    "classification",
                    "gate_count",
                    "p_zero",
                    "success_prob",
                    "leakage",
                    "norm_loss",
                    "fidelity_raw",
                    "fidelity_normalized",
                    "fidelity_raw_fixed",
                    "fidelity_normalized_fixed",
                    "duration_s",
                ],
                [vec![
                    o.function.clone(),
                    report.mode.to_string(),
                    o.classification.to_string(),
                    o.gate_count.to_string(),
                    fmt_float(o.p_zero),
                    fmt_float(o.success_prob),
                    fmt_float(o.leakage),
                    fmt_float(o.norm_loss),
                    fmt_float(o.fidelity_raw),
                    fmt_float(o.fidelity_normalized),
                    fmt_float(o.fidelity_raw_fixed),
                    fmt_float(o.fidelity_normalized_fixed),
                    fmt_float(o.duration),
                ]],
            )
        }
    })
}

#[derive(Serialize)]
struct SweepJson<'a> {
    name: &'a str,
    function: &'a str,
    axes: &'a [lab::Axis],
    rows: serde_json::Value,
}

pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let preset = cfg
        .preset
        .ok_or_else(|| CliError::Validation("preset: required (fig3a, fig3b or fig4)".into()))?;
    if cfg.jobs == Some(0) {
        return Err(CliError::Validation("jobs: must be at least 1".into()));
    }
    let options = SweepOptions { jobs: cfg.jobs };
    let function = |n: usize, default: &str| -> Result<BooleanFunction, CliError> {
        let f = parse_function(cfg.function.as_deref().unwrap_or(default), Some(n))?;
        Ok(f)
    };
    let kappa_grid = cfg
        .kappa_grid
        .clone()
        .unwrap_or_else(lab::default_kappa_grid);
    let table: SweepTable = match preset {
        Preset::Fig3a => lab::sweep_fig3a(
            &kappa_grid,
            &cfg.deviation_grid
                .clone()
                .unwrap_or_else(lab::default_deviation_grid),
            &function(3, lab::THREE_QUBIT_FUNCTION)?,
            options,
        )
        .map_err(lib_err("grid"))?,
        Preset::Fig3b => lab::sweep_fig3b(
            &cfg.eta_grid.clone().unwrap_or_else(lab::default_eta_grid),
            &cfg.kappa_grid.clone().unwrap_or_else(|| vec![0.0]),
            &function(4, lab::FOUR_QUBIT_FUNCTION)?,
            options,
        )
        .map_err(lib_err("grid"))?,
        Preset::Fig4 => lab::sweep_fig4(
            &cfg.delta_grid
                .clone()
                .unwrap_or_else(lab::default_delta_grid),
            &cfg.kappa_set.clone().unwrap_or_else(lab::default_kappa_set),
            &cfg.variants
                .clone()
                .unwrap_or_else(|| vec![DipoleVariant::Projector, DipoleVariant::Exchange]),
            &function(3, lab::THREE_QUBIT_FUNCTION)?,
            options,
        )
        .map_err(lib_err("grid"))?,
    };
    emit(cfg, |w| match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => table.write_csv(w).map_err(io_err),
        Format::Json => write_json(
            w,
            &SweepJson {
                name: &table.name,
                function: &table.function,
                axes: &table.axes,
                rows: table.to_json_records(),
            },
        ),
    })
}

pub fn feasibility(cfg: &RunConfig) -> Result<(), CliError> {
    for (name, v) in [
        ("omega0_khz", cfg.omega0_khz),
        ("omega1_khz", cfg.omega1_khz),
        ("eta", cfg.eta),
        ("kappa_ratio", cfg.kappa_ratio),
        ("lifetime_ms", cfg.lifetime_ms),
    ] {
        check_finite(name, v)?;
    }
    let omega0 = khz(cfg.omega0_khz.unwrap_or(51.0));
    let omega1 = match (cfg.omega1_khz, cfg.eta) {
        (Some(f), _) => khz(f),
        (None, Some(eta)) => eta * omega0,
        (None, None) => khz(5.1),
    };
    let kappa_ratio = cfg.kappa_ratio.unwrap_or(1e-3);
    if kappa_ratio >= 4.0 {
        return Err(CliError::Validation(format!(
            "kappa_ratio: must be below 4, got {kappa_ratio}"
        )));
    }
    let input = FeasibilityInput {
        omega0,
        omega1,
        kappa: kappa_ratio * omega1,
        lifetime: cfg.lifetime_ms.unwrap_or(30.0) * 1e-3,
        n_min: cfg.n_min.unwrap_or(2),
        n_max: cfg.n_max.unwrap_or(16),
        claimed_max_n: Some(cfg.claimed_max_n.unwrap_or(9)),
        track_atoms: cfg.n.unwrap_or(3),
    };
    let report = lab::feasibility(&input).map_err(lib_err("feasibility"))?;
    if let Some(note) = &report.discrepancy {
        eprintln!("note: {note}");
    }
    emit(cfg, |w| match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(w, &report),
        Format::Csv => write_csv(
            w,
            &[
                "n",
                "runtime_s",
                "satisfies_bound",
                "within_cavity_decay_time",
                "within_lifetime",
            ],
            report.runtimes.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    fmt_float(r.runtime),
                    r.satisfies_bound.to_string(),
                    r.within_cavity_decay_time.to_string(),
                    r.within_lifetime.to_string(),
                ]
            }),
        ),
    })
}
