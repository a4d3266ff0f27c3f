//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cavity_dj::dj::{run_ideal, run_physical, DEFAULT_THRESHOLD};
use cavity_dj::dynamics::{add_dipole, evolve, DipoleVariant, ModelParams};
use cavity_dj::gates::{
    gate_time, ideal_cpf, pauli_x_layer, synthesize_cpf, synthesize_native, CpfLabel,
};
use cavity_dj::hilbert::{build_space, Encoding, StateVector, C64};
use cavity_dj::lab::{
    default_deviation_grid, default_kappa_grid, feasibility, sweep_fig3a, FeasibilityInput,
    SweepOptions,
};
use cavity_dj::oracles::{
    canonical_balanced_count, decompose_oracle, enumerate_functions, ideal_oracle,
    raw_balanced_masks, BooleanFunction, FunctionClass,
};
use nalgebra::DMatrix;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn ratios_1_10_10() -> ModelParams {
    ModelParams::from_ratios(1.0, &[1.0, 10.0, 10.0]).unwrap()
}

fn f_b1() -> BooleanFunction {
    BooleanFunction::from_hex(3, "0x9A").unwrap()
}

fn gate_timing() -> Check {
    let start = Instant::now();
    let omega1 = 2.0 * PI * 5.1e3;
    let kappa = 1e-3 * omega1;
    let t_d = gate_time(omega1, kappa).map_err(|e| e.to_string())?;
    let reference = PI / (omega1 * omega1 - kappa * kappa / 16.0).sqrt();
    ensure((t_d - reference).abs() <= 1e-15 * reference, || {
        format!("T_D {t_d} vs {reference}")
    })?;
    let rel_td = (t_d - 98e-6).abs() / 98e-6;
    let decay = 2.0 * PI / kappa;
    let rel_decay = (decay - 0.2).abs() / 0.2;
    ensure(rel_td <= 0.01, || {
        format!("T_D = {t_d:e} s, off by {rel_td:.3e}")
    })?;
    ensure(rel_decay <= 0.02, || {
        format!("2pi/kappa = {decay} s, off by {rel_decay:.3e}")
    })?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "T_D = {:.4} us, 2pi/kappa = {decay:.5} s",
        t_d * 1e6
    ))
}

/// `[Omega_1^2 cos(Theta T0) + Theta^2 - Omega_1^2] / Theta^2` for each input; qubit 1 is the MSB.
fn closed_form_diagonal(couplings: &[f64]) -> Vec<f64> {
    let n = couplings.len();
    let w1 = couplings[0];
    let t0 = PI / w1;
    (0..1usize << n)
        .map(|x| {
            if x >> (n - 1) & 1 == 0 {
                return 1.0;
            }
            let theta2 = w1 * w1
                + (1..n)
                    .filter(|&k| x >> (n - 1 - k) & 1 == 0)
                    .map(|k| couplings[k] * couplings[k])
                    .sum::<f64>();
            (w1 * w1 * (theta2.sqrt() * t0).cos() + theta2 - w1 * w1) / theta2
        })
        .collect()
}

fn gate_agreement() -> Check {
    let start = Instant::now();
    let params = ratios_1_10_10();
    let space = build_space(3, 1).map_err(|e| e.to_string())?;
    let gate =
        synthesize_native(&space, &Encoding::standard(3), &params).map_err(|e| e.to_string())?;
    let diag = gate.diagonal();
    let expected = closed_form_diagonal(&params.couplings);
    let err = diag
        .iter()
        .zip(&expected)
        .map(|(z, &e)| (z - C64::new(e, 0.0)).norm())
        .fold(0.0, f64::max);
    ensure(err <= 1e-8, || format!("diagonal deviates by {err:e}"))?;
    let corner = (diag[7] + 1.0).norm();
    ensure(corner <= 1e-12, || {
        format!("|e1i2i3> entry off -1 by {corner:e}")
    })?;
    let off = (0..8)
        .flat_map(|r| (0..8).map(move |c| (r, c)))
        .filter(|(r, c)| r != c)
        .map(|(r, c)| gate.effective[(r, c)].norm())
        .fold(0.0, f64::max);
    ensure(off <= 1e-12, || format!("off-diagonal magnitude {off:e}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "max diagonal error {err:.2e}, corner error {corner:.2e}"
    ))
}

fn conjugation() -> Check {
    let native = CpfLabel::native(3).unwrap();
    let j111 = ideal_cpf(native).into_matrix();
    for rho in 0..8 {
        let label = CpfLabel::new(3, rho).unwrap();
        let x = pauli_x_layer(3, label.flip_mask()).into_matrix();
        let conj = &x * &j111 * &x;
        ensure(conj == ideal_cpf(label).into_matrix(), || {
            format!("identity for J_{label} fails")
        })?;
        let sq = ideal_cpf(label).into_matrix();
        ensure(&sq * &sq == DMatrix::identity(8, 8), || {
            format!("J_{label}^2 != I")
        })?;
    }
    let mut worst = 0.0f64;
    let space = build_space(3, 1).unwrap();
    for kappa in [0.0, 0.1] {
        let params = ratios_1_10_10().with_kappa(kappa);
        let native_gate = synthesize_native(&space, &Encoding::standard(3), &params)
            .map_err(|e| e.to_string())?;
        let nd = native_gate.diagonal();
        for rho in 0..8 {
            let label = CpfLabel::new(3, rho).unwrap();
            let g = synthesize_cpf(&space, &Encoding::standard(3), &params, label)
                .map_err(|e| e.to_string())?;
            let m = label.flip_mask();
            for r in 0..8 {
                for c in 0..8 {
                    let want = if r == c {
                        nd[r ^ m]
                    } else {
                        C64::new(0.0, 0.0)
                    };
                    worst = worst.max((g.effective[(r, c)] - want).norm());
                }
            }
        }
    }
    ensure(worst <= 1e-10, || {
        format!("permuted diagonal error {worst:e}")
    })?;
    Ok(format!(
        "8 ideal identities exact, synthesized permutation error {worst:.2e}"
    ))
}

fn combinatorics() -> Check {
    let start = Instant::now();
    let raw = raw_balanced_masks(3).map_err(|e| e.to_string())?.count();
    ensure(raw == 70, || format!("{raw} raw balanced masks"))?;
    ensure(canonical_balanced_count(3) == 35, || {
        "canonical count".into()
    })?;
    let all: Vec<_> = enumerate_functions(3).map_err(|e| e.to_string())?.collect();
    ensure(all.len() == 36, || format!("{} transformations", all.len()))?;
    let balanced = all
        .iter()
        .filter(|f| f.class() == FunctionClass::Balanced)
        .count();
    ensure(balanced == 35, || format!("{balanced} balanced"))?;
    for f in &all {
        let seq = decompose_oracle(f).map_err(|e| e.to_string())?;
        ensure(seq.ideal_product() == ideal_oracle(f), || {
            format!("decomposition of {} differs", f.to_hex())
        })?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("70 raw, 35 canonical, 36 total; all products exact".into())
}

fn ideal_dichotomy() -> Check {
    for f in enumerate_functions(3).map_err(|e| e.to_string())? {
        let out = run_ideal(&f).map_err(|e| e.to_string())?;
        match f.class() {
            FunctionClass::Constant => ensure(out.p_zero == 1.0, || {
                format!("{}: p_zero {}", f.to_hex(), out.p_zero)
            })?,
            _ => ensure(out.p_zero <= 1e-12, || {
                format!("{}: p_zero {}", f.to_hex(), out.p_zero)
            })?,
        }
    }
    // Brute-force H (diag) H |000> for f_B1.
    let f = f_b1();
    let h = |a: usize, b: usize| {
        (if (a & b).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }) / 8f64.sqrt()
    };
    let state: Vec<f64> = (0..8)
        .map(|y| {
            (0..8)
                .map(|x| h(y, x) * if f.eval(x) { -1.0 } else { 1.0 } * h(x, 0))
                .sum()
        })
        .collect();
    let expected = [0.0, 0.5, 0.0, -0.5, 0.0, 0.5, 0.0, 0.5];
    let out = run_ideal(&f).map_err(|e| e.to_string())?;
    let mut err = 0.0f64;
    for y in 0..8 {
        ensure((state[y] - expected[y]).abs() <= 1e-12, || {
            "brute-force oracle mismatch".into()
        })?;
        err = err.max((out.output_state[y] - C64::new(expected[y], 0.0)).norm());
    }
    ensure(err <= 1e-12, || format!("f_B1 output error {err:e}"))?;
    Ok(format!(
        "36 functions separated, f_B1 output error {err:.2e}"
    ))
}

fn physical_quality() -> Check {
    let start = Instant::now();
    let params = ratios_1_10_10();
    let mut worst = f64::INFINITY;
    for f in enumerate_functions(3).map_err(|e| e.to_string())? {
        let out = run_physical(&f, &params).map_err(|e| e.to_string())?;
        ensure(out.classification == f.class(), || {
            format!("{} misclassified", f.to_hex())
        })?;
        worst = worst.min(out.fidelity_raw).min(out.fidelity_raw_fixed);
    }
    ensure(worst >= 0.99, || format!("worst fidelity_raw {worst}"))?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "36/36 classified at threshold {DEFAULT_THRESHOLD}, min fidelity_raw {worst:.6}"
    ))
}

fn decay_ordering() -> Check {
    let f = f_b1();
    let fid = |k: f64| run_physical(&f, &ratios_1_10_10().with_kappa(k)).map(|o| o.fidelity_raw);
    let (f50, f20, f10) = (
        fid(1.0 / 50.0).map_err(|e| e.to_string())?,
        fid(1.0 / 20.0).map_err(|e| e.to_string())?,
        fid(1.0 / 10.0).map_err(|e| e.to_string())?,
    );
    ensure(f50 >= f20 && f20 >= f10, || {
        format!("F = {f50}, {f20}, {f10}")
    })?;
    let space = build_space(3, 1).unwrap();
    let mut worst = 0.0f64;
    for kappa in [0.02, 0.05, 0.1, 0.5] {
        let g = synthesize_native(
            &space,
            &Encoding::standard(3),
            &ratios_1_10_10().with_kappa(kappa),
        )
        .map_err(|e| e.to_string())?;
        let a = (1.0 - kappa * kappa / 16.0).sqrt();
        let want = -(-kappa * PI / (4.0 * a)).exp();
        worst = worst.max((g.diagonal()[7] - C64::new(want, 0.0)).norm());
    }
    ensure(worst <= 1e-10, || format!("decayed corner error {worst:e}"))?;
    Ok(format!(
        "F(1/50) = {f50:.6} >= F(1/20) = {f20:.6} >= F(1/10) = {f10:.6}; corner error {worst:.2e}"
    ))
}

fn dipole() -> Check {
    let space = build_space(3, 1).unwrap();
    let base = ratios_1_10_10().with_kappa(0.05);
    let h0 = base.hamiltonian(&space).map_err(|e| e.to_string())?;
    let t = gate_time(1.0, 0.05).unwrap();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for delta in [0.05, 0.2, 1.0] {
        let h = add_dipole(&h0, delta, DipoleVariant::Projector).map_err(|e| e.to_string())?;
        for k in (0..space.dim()).filter(|&k| space.excitation_of(k) <= 1) {
            let psi = StateVector::basis(space, k);
            let a = evolve(&h0, t, &psi).map_err(|e| e.to_string())?;
            let b = evolve(&h, t, &psi).map_err(|e| e.to_string())?;
            worst = worst.max((a.amplitudes() - b.amplitudes()).camax());
            checked += 1;
        }
    }
    ensure(worst <= 1e-14, || {
        format!("projector dipole changed evolution by {worst:e}")
    })?;
    let f = f_b1();
    let deltas: Vec<f64> = (0..=10).map(|k| 0.02 * k as f64).collect();
    let mut fids = Vec::new();
    for &d in &deltas {
        let p = base.clone().with_dipole(d, DipoleVariant::Exchange);
        fids.push(
            run_physical(&f, &p)
                .map_err(|e| e.to_string())?
                .fidelity_raw,
        );
    }
    ensure(fids.windows(2).all(|w| w[1] < w[0]), || {
        format!("exchange fidelities not decreasing: {fids:?}")
    })?;
    Ok(format!(
        "projector max change {worst:.1e} over {checked} evolutions; exchange F {:.6} -> {:.6} over delta 0..0.2",
        fids[0],
        fids[fids.len() - 1]
    ))
}

fn four_qubit() -> Check {
    let start = Instant::now();
    let f = BooleanFunction::from_hex(4, "0x665A").map_err(|e| e.to_string())?;
    let seq = decompose_oracle(&f).map_err(|e| e.to_string())?;
    ensure(seq.len() == 8, || format!("{} gates", seq.len()))?;
    let p4 = ModelParams::star(4, 1.0, 0.1).map_err(|e| e.to_string())?;
    let out = run_physical(&f, &p4).map_err(|e| e.to_string())?;
    ensure(out.gate_count == 8, || {
        format!("{} gates run", out.gate_count)
    })?;
    ensure(out.fidelity_raw >= 0.98, || {
        format!("fidelity_raw {}", out.fidelity_raw)
    })?;
    ensure(out.classification == FunctionClass::Balanced, || {
        "misclassified".into()
    })?;
    let mut rel = 0.0f64;
    for kappa in [0.0, 0.05] {
        let d3 = synthesize_native(
            &build_space(3, 1).unwrap(),
            &Encoding::standard(3),
            &ratios_1_10_10().with_kappa(kappa),
        )
        .map_err(|e| e.to_string())?
        .duration;
        let d4 = synthesize_native(
            &build_space(4, 1).unwrap(),
            &Encoding::standard(4),
            &p4.clone().with_kappa(kappa),
        )
        .map_err(|e| e.to_string())?
        .duration;
        rel = rel.max((d3 - d4).abs() / d3);
    }
    ensure(rel <= 1e-15, || format!("durations differ by {rel:e}"))?;
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!(
        "8 gates, fidelity_raw {:.6}, duration mismatch {rel:.1e}",
        out.fidelity_raw
    ))
}

fn performance() -> Check {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let n = if trial % 2 == 0 { 3 } else { 4 };
        let couplings: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
        let variant = if rng.gen_bool(0.5) {
            DipoleVariant::Projector
        } else {
            DipoleVariant::Exchange
        };
        let params = ModelParams::new(couplings)
            .with_kappa(rng.gen_range(0.0..0.5))
            .with_dipole(rng.gen_range(0.0..0.5), variant)
            .with_photon_cutoff(rng.gen_range(1..=2));
        let space = build_space(n, params.photon_cutoff).unwrap();
        let h = params.hamiltonian(&space).map_err(|e| e.to_string())?;
        let amps = nalgebra::DVector::from_fn(space.dim(), |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let psi = StateVector::new(space, amps.normalize()).unwrap();
        let t = rng.gen_range(0.1..5.0);
        let dense = evolve(&h, t, &psi).map_err(|e| e.to_string())?;
        let blocked =
            cavity_dj::dynamics::evolve_blocked(&h, t, &psi).map_err(|e| e.to_string())?;
        worst = worst.max((dense.amplitudes() - blocked.amplitudes()).camax());
    }
    ensure(worst <= 1e-10, || format!("blocked vs dense {worst:e}"))?;
    let start = Instant::now();
    let table = sweep_fig3a(
        &default_kappa_grid(),
        &default_deviation_grid(),
        &f_b1(),
        SweepOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(table.rows.len() == 26 * 21, || {
        format!("{} rows", table.rows.len())
    })?;
    within(elapsed, Duration::from_secs(600))?;
    Ok(format!(
        "blocked vs dense max error {worst:.2e} over 100 instances; 26x21 grid in {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn feasibility_report() -> Check {
    let omega1 = 2.0 * PI * 5.1e3;
    let report = feasibility(&FeasibilityInput {
        omega0: 2.0 * PI * 51e3,
        omega1,
        kappa: 1e-3 * omega1,
        lifetime: 30e-3,
        n_min: 2,
        n_max: 16,
        claimed_max_n: Some(9),
        track_atoms: 3,
    })
    .map_err(|e| e.to_string())?;
    ensure(
        report
            .runtimes
            .windows(2)
            .all(|w| w[1].runtime == 2.0 * w[0].runtime),
        || "runtime not doubling".into(),
    )?;
    let max_n = report.max_n.ok_or("max_n missing")?;
    let bound = |n: usize| report.kappa * 2f64.powi(n as i32 - 2) <= report.omega1;
    ensure(bound(max_n) && !bound(max_n + 1), || {
        format!("max_n {max_n} violates the bound")
    })?;
    let note = report
        .discrepancy
        .clone()
        .ok_or("discrepancy not flagged")?;
    ensure(
        note.contains('9') && note.contains(&max_n.to_string()),
        || note.clone(),
    )?;
    let t9 = report
        .runtimes
        .iter()
        .find(|r| r.n == 9)
        .ok_or("no N = 9 entry")?
        .runtime;
    Ok(format!(
        "T_(9) = {:.3} ms, computed max_n = {max_n}, flagged: {note}",
        t9 * 1e3
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("gate timing", gate_timing),
        ("analytic/numeric gate agreement", gate_agreement),
        ("conjugation identities", conjugation),
        ("oracle combinatorics", combinatorics),
        ("ideal DJ dichotomy", ideal_dichotomy),
        ("physical DJ quality", physical_quality),
        ("decay ordering", decay_ordering),
        ("dipole inertness", dipole),
        ("four-qubit scaling", four_qubit),
        ("performance path", performance),
        ("feasibility report", feasibility_report),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2} s): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2} s): {why}", k + 1);
            }
        }
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
