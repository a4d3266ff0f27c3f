//! The ancilla-free Deutsch-Jozsa circuit `H^n U_f H^n |0...0>`, run either with
//! ideal phase oracles or with oracles assembled from synthesized CPF gates.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::ModelParams;
use crate::error::{Error, Result};
use crate::gates::{hadamard_all, ideal_cpf, synthesize_native, CpfLabel, GateResult};
use crate::hilbert::{build_space, Encoding, C64, ONE};
use crate::oracles::{decompose_oracle, ideal_oracle, BooleanFunction, FunctionClass};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityMode {
    /// Overlap for the algorithm's input `|0...0>` only.
    FixedInput,
    /// Mean overlap over every computational input pushed through the circuit.
    #[default]
    BasisAveraged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fidelity {
    /// `|<ideal|actual>|^2` with the unnormalized no-jump output.
    pub raw: f64,
    /// Same overlap after renormalizing the output.
    pub normalized: f64,
}

/// `|<ideal|actual>|^2 / <ideal|ideal>`; `actual` is not renormalized.
pub fn state_fidelity(ideal: &[C64], actual: &[C64]) -> Result<f64> {
    if ideal.len() != actual.len() {
        return Err(Error::Dimension {
            expected: ideal.len(),
            actual: actual.len(),
        });
    }
    let ideal_norm: f64 = ideal.iter().map(|a| a.norm_sqr()).sum();
    if ideal_norm == 0.0 {
        return Err(Error::ZeroVector("fidelity"));
    }
    let overlap: C64 = ideal.iter().zip(actual).map(|(i, a)| i.conj() * a).sum();
    Ok(overlap.norm_sqr() / ideal_norm)
}

fn column_fidelity(ideal: &DMatrix<C64>, actual: &DMatrix<C64>, x: usize) -> Result<Fidelity> {
    let i: Vec<C64> = ideal.column(x).iter().copied().collect();
    let a: Vec<C64> = actual.column(x).iter().copied().collect();
    let raw = state_fidelity(&i, &a)?;
    let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let normalized = if norm > 0.0 {
        (raw / norm).min(1.0)
    } else {
        0.0
    };
    Ok(Fidelity { raw, normalized })
}

/// Fidelity of the circuit `actual` against `ideal` (both on the register).
pub fn circuit_fidelity(
    ideal: &DMatrix<C64>,
    actual: &DMatrix<C64>,
    mode: FidelityMode,
) -> Result<Fidelity> {
    if ideal.shape() != actual.shape() || !ideal.is_square() {
        return Err(Error::Dimension {
            expected: ideal.nrows(),
            actual: actual.nrows(),
        });
    }
    match mode {
        FidelityMode::FixedInput => column_fidelity(ideal, actual, 0),
        FidelityMode::BasisAveraged => {
            let d = ideal.ncols();
            let mut sum = Fidelity {
                raw: 0.0,
                normalized: 0.0,
            };
            for x in 0..d {
                let f = column_fidelity(ideal, actual, x)?;
                sum.raw += f.raw;
                sum.normalized += f.normalized;
            }
            Ok(Fidelity {
                raw: sum.raw / d as f64,
                normalized: sum.normalized / d as f64,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DjOutcome {
    pub n: usize,
    pub function: String,
    pub gate_count: usize,
    /// Register amplitudes after the final Hadamard layer, as `[re, im]`.
    #[serde(with = "complex_pairs")]
    pub output_state: Vec<C64>,
    pub p_zero: f64,
    pub success_prob: f64,
    /// Population that left the register during the gates.
    pub leakage: f64,
    /// No-jump norm lost during the gates.
    pub norm_loss: f64,
    /// Basis-averaged fidelities.
    pub fidelity_raw: f64,
    pub fidelity_normalized: f64,
    /// Fidelities for the input `|0...0>` alone.
    pub fidelity_raw_fixed: f64,
    pub fidelity_normalized_fixed: f64,
    pub classification: FunctionClass,
    /// Total interaction time of all gates.
    pub duration: f64,
}

impl DjOutcome {
    pub fn fidelity(&self, mode: FidelityMode) -> Fidelity {
        match mode {
            FidelityMode::FixedInput => Fidelity {
                raw: self.fidelity_raw_fixed,
                normalized: self.fidelity_normalized_fixed,
            },
            FidelityMode::BasisAveraged => Fidelity {
                raw: self.fidelity_raw,
                normalized: self.fidelity_normalized,
            },
        }
    }
}

mod complex_pairs {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|z| [z.re, z.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

/// `H^n M H^n`, computed with the integer sign matrix so that the `1/sqrt(2^n)`
/// factors are applied once, as an exact power of two.
fn hadamard_sandwich(m: &DMatrix<C64>) -> DMatrix<C64> {
    let d = m.nrows();
    let signs = DMatrix::from_fn(d, d, |r, c| {
        if (r & c).count_ones() % 2 == 0 {
            ONE
        } else {
            -ONE
        }
    });
    (&signs * m * &signs).map(|z| z / d as f64)
}

/// `constant` iff `p_zero / success_prob > threshold`.
pub fn classify_outcome(outcome: &DjOutcome, threshold: f64) -> Result<FunctionClass> {
    classify(outcome.p_zero, outcome.success_prob, threshold)
}

fn classify(p_zero: f64, success_prob: f64, threshold: f64) -> Result<FunctionClass> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::param(
            "threshold",
            format!("must lie in (0, 1), got {threshold}"),
        ));
    }
    if !(success_prob > 0.0) {
        return Err(Error::ZeroVector(
            "classification (success probability is 0)",
        ));
    }
    Ok(if p_zero / success_prob > threshold {
        FunctionClass::Constant
    } else {
        FunctionClass::Balanced
    })
}

fn check_promise(f: &BooleanFunction) -> Result<()> {
    if f.class() == FunctionClass::Neither {
        return Err(Error::NotPromised {
            n: f.n(),
            weight: f.weight(),
        });
    }
    Ok(())
}

/// Ideal gate as a [`GateResult`], lossless and instantaneous.
pub fn ideal_gate(label: CpfLabel) -> GateResult {
    let d = 1usize << label.n();
    GateResult {
        label,
        effective: ideal_cpf(label).into_matrix(),
        leakage: vec![0.0; d],
        norm_loss: vec![0.0; d],
        duration: 0.0,
        retained_gram: DMatrix::identity(d, d),
    }
}

/// Runs the circuit with the given gates; the oracle is their product in list
/// order, so the last gate acts first.
pub fn run_with_gates(
    f: &BooleanFunction,
    gates: &[GateResult],
    threshold: f64,
) -> Result<DjOutcome> {
    check_promise(f)?;
    let n = f.n();
    let d = 1usize << n;
    if let Some(g) = gates.iter().find(|g| g.n_qubits() != n) {
        return Err(Error::LabelLength {
            label: g.label.to_string(),
            expected: n,
            actual: g.n_qubits(),
        });
    }
    let hadamard = hadamard_all(n).into_matrix();

    let mut oracle = DMatrix::<C64>::identity(d, d);
    for g in gates {
        oracle *= &g.effective;
    }

    // Loss bookkeeping for the algorithm's input.
    let mut v: DVector<C64> = hadamard.column(0).clone_owned();
    let (mut leakage, mut norm_loss) = (0.0, 0.0);
    for g in gates.iter().rev() {
        let before = v.norm_squared();
        let retained = v.dotc(&(&g.retained_gram * &v)).re;
        v = &g.effective * v;
        let kept = v.norm_squared();
        leakage += (retained - kept).max(0.0);
        norm_loss += (before - retained).max(0.0);
    }

    let actual = hadamard_sandwich(&oracle);
    let ideal = hadamard_sandwich(ideal_oracle(f).matrix());
    let output: Vec<C64> = actual.column(0).iter().copied().collect();
    let success_prob: f64 = output.iter().map(|z| z.norm_sqr()).sum();
    let p_zero = output[0].norm_sqr();
    let averaged = circuit_fidelity(&ideal, &actual, FidelityMode::BasisAveraged)?;
    let fixed = circuit_fidelity(&ideal, &actual, FidelityMode::FixedInput)?;
    Ok(DjOutcome {
        n,
        function: f.to_hex(),
        gate_count: gates.len(),
        output_state: output,
        p_zero,
        success_prob,
        leakage,
        norm_loss,
        fidelity_raw: averaged.raw,
        fidelity_normalized: averaged.normalized,
        fidelity_raw_fixed: fixed.raw,
        fidelity_normalized_fixed: fixed.normalized,
        classification: classify(p_zero, success_prob, threshold)?,
        duration: gates.iter().map(|g| g.duration).sum(),
    })
}

/// Exact circuit with the ideal oracle.
pub fn run_ideal(f: &BooleanFunction) -> Result<DjOutcome> {
    check_promise(f)?;
    let n = f.n();
    let circuit = hadamard_sandwich(ideal_oracle(f).matrix());
    let output: Vec<C64> = circuit.column(0).iter().copied().collect();
    let p_zero = output[0].norm_sqr();
    let success_prob: f64 = output.iter().map(|z| z.norm_sqr()).sum();
    Ok(DjOutcome {
        n,
        function: f.to_hex(),
        gate_count: decompose_oracle(f)?.len(),
        output_state: output,
        p_zero,
        success_prob,
        leakage: 0.0,
        norm_loss: 0.0,
        fidelity_raw: 1.0,
        fidelity_normalized: 1.0,
        fidelity_raw_fixed: 1.0,
        fidelity_normalized_fixed: 1.0,
        classification: classify(p_zero, success_prob, DEFAULT_THRESHOLD)?,
        duration: 0.0,
    })
}

/// Physical CPF gates realizing the oracle of `f`, in product order.
pub fn physical_gates(f: &BooleanFunction, params: &ModelParams) -> Result<Vec<GateResult>> {
    check_promise(f)?;
    if params.n_atoms() != f.n() {
        return Err(Error::Dimension {
            expected: f.n(),
            actual: params.n_atoms(),
        });
    }
    let sequence = decompose_oracle(f)?;
    if sequence.is_empty() {
        return Ok(Vec::new());
    }
    let space = build_space(f.n(), params.photon_cutoff)?;
    let native = synthesize_native(&space, &Encoding::standard(f.n()), params)?;
    sequence
        .labels
        .iter()
        .map(|&label| native.conjugated(label))
        .collect()
}

/// Circuit with oracle gates synthesized from the cavity dynamics.
pub fn run_physical(f: &BooleanFunction, params: &ModelParams) -> Result<DjOutcome> {
    run_physical_with_threshold(f, params, DEFAULT_THRESHOLD)
}

pub fn run_physical_with_threshold(
    f: &BooleanFunction,
    params: &ModelParams,
    threshold: f64,
) -> Result<DjOutcome> {
    params.validate()?;
    run_with_gates(f, &physical_gates(f, params)?, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DipoleVariant;
    use crate::oracles::enumerate_functions;

    fn f_b1() -> BooleanFunction {
        BooleanFunction::from_hex(3, "0x9A").unwrap()
    }

    fn params() -> ModelParams {
        ModelParams::from_ratios(1.0, &[1.0, 10.0, 10.0]).unwrap()
    }

    /// Straight 8x8 arithmetic, no shared helpers.
    fn brute_force_output(f: &BooleanFunction) -> Vec<f64> {
        let n = f.n();
        let d = 1usize << n;
        (0..d)
            .map(|y| {
                (0..d)
                    .map(|x| {
                        let sign_f = if f.eval(x) { -1.0 } else { 1.0 };
                        let sign_h = if (x & y).count_ones() % 2 == 1 {
                            -1.0
                        } else {
                            1.0
                        };
                        sign_f * sign_h
                    })
                    .sum::<f64>()
                    / d as f64
            })
            .collect()
    }

    #[test]
    fn fidelity_definitions() {
        let v = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        assert!((state_fidelity(&v, &v).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<C64> = v.iter().map(|z| -z).collect();
        assert!((state_fidelity(&v, &neg).unwrap() - 1.0).abs() < 1e-15);
        let phased: Vec<C64> = v.iter().map(|z| z * C64::from_polar(1.0, 0.7)).collect();
        assert!((state_fidelity(&v, &phased).unwrap() - 1.0).abs() < 1e-15);
        let scaled: Vec<C64> = v.iter().map(|z| z * 0.9).collect();
        assert!((state_fidelity(&v, &scaled).unwrap() - 0.81).abs() < 1e-15);
        assert!(matches!(
            state_fidelity(&[C64::new(0.0, 0.0); 2], &v),
            Err(Error::ZeroVector(_))
        ));
        assert!(state_fidelity(&v, &v[..1]).is_err());
    }

    #[test]
    fn ideal_constant_and_balanced() {
        let zero = run_ideal(&BooleanFunction::constant(3, false).unwrap()).unwrap();
        assert!((zero.output_state[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(zero.classification, FunctionClass::Constant);
        let one = run_ideal(&BooleanFunction::constant(3, true).unwrap()).unwrap();
        assert!((one.output_state[0] + C64::new(1.0, 0.0)).norm() < 1e-15);

        let b = run_ideal(&f_b1()).unwrap();
        let expect = [0.0, 0.5, 0.0, -0.5, 0.0, 0.5, 0.0, 0.5];
        for (a, e) in b.output_state.iter().zip(expect) {
            assert!((a - C64::new(e, 0.0)).norm() < 1e-12);
        }
        assert_eq!(b.classification, FunctionClass::Balanced);
        assert!(run_ideal(&BooleanFunction::from_mask(3, 1).unwrap()).is_err());
    }

    #[test]
    fn ideal_matches_brute_force_for_all_functions() {
        for f in enumerate_functions(3).unwrap() {
            let out = run_ideal(&f).unwrap();
            let expect = brute_force_output(&f);
            let ell = expect.iter().map(|v| v.abs()).fold(0.0, f64::max);
            for (a, e) in out.output_state.iter().zip(&expect) {
                assert!((a - C64::new(*e, 0.0)).norm() < 1e-12);
                assert!(e.abs() < 1e-15 || (e.abs() - ell).abs() < 1e-15);
            }
            match f.class() {
                FunctionClass::Constant => assert!((out.p_zero - 1.0).abs() < 1e-12),
                _ => assert!(out.p_zero < 1e-12),
            }
        }
    }

    #[test]
    fn ideal_gates_reproduce_ideal_run() {
        let seq = decompose_oracle(&f_b1()).unwrap();
        let gates: Vec<_> = seq.labels.iter().map(|&l| ideal_gate(l)).collect();
        let a = run_with_gates(&f_b1(), &gates, 0.5).unwrap();
        let b = run_ideal(&f_b1()).unwrap();
        for (x, y) in a.output_state.iter().zip(&b.output_state) {
            assert!((x - y).norm() < 1e-15);
        }
        assert!((a.fidelity_raw - 1.0).abs() < 1e-14);
        assert_eq!(a.leakage, 0.0);
    }

    #[test]
    fn physical_balanced_run() {
        let out = run_physical(&f_b1(), &params()).unwrap();
        assert_eq!(out.gate_count, 4);
        assert!(out.fidelity_raw >= 0.99, "{}", out.fidelity_raw);
        assert!(out.fidelity_raw_fixed >= 0.99);
        assert!(out.output_state[0].norm() <= 0.05);
        assert_eq!(out.classification, FunctionClass::Balanced);
        assert!(out.p_zero <= out.success_prob && out.success_prob <= 1.0 + 1e-12);
        assert!(out.fidelity_raw <= out.fidelity_normalized + 1e-15);
        assert!((1.0 - out.success_prob - out.leakage - out.norm_loss).abs() < 1e-12);
        assert!(out.p_zero <= 1.0 - out.fidelity_normalized_fixed + 1e-12);
    }

    #[test]
    fn physical_constant_run_is_exact() {
        let zero = BooleanFunction::constant(3, false).unwrap();
        let out = run_physical(&zero, &params().with_kappa(0.3)).unwrap();
        assert_eq!(out.output_state[0], C64::new(1.0, 0.0));
        assert_eq!(out.fidelity_raw, 1.0);
        assert_eq!(out.gate_count, 0);
    }

    #[test]
    fn decay_degrades_monotonically() {
        let mut last = f64::INFINITY;
        for k in [0.0, 0.02, 0.05, 0.1] {
            let out = run_physical(&f_b1(), &params().with_kappa(k)).unwrap();
            assert!(out.fidelity_raw <= last);
            assert!(out.fidelity_raw_fixed <= out.fidelity_normalized_fixed + 1e-15);
            assert!((1.0 - out.success_prob - out.leakage - out.norm_loss).abs() < 1e-12);
            last = out.fidelity_raw;
        }
    }

    #[test]
    fn classification_rules() {
        let zero = run_ideal(&BooleanFunction::constant(3, false).unwrap()).unwrap();
        let bal = run_ideal(&f_b1()).unwrap();
        for t in [0.01, 0.5, 0.99] {
            assert_eq!(classify_outcome(&zero, t).unwrap(), FunctionClass::Constant);
            assert_eq!(classify_outcome(&bal, t).unwrap(), FunctionClass::Balanced);
        }
        assert!(classify_outcome(&zero, 1.0).is_err());
        let mut dead = zero.clone();
        dead.success_prob = 0.0;
        assert!(classify_outcome(&dead, 0.5).is_err());
    }

    #[test]
    fn exchange_dipole_perturbs_balanced_run() {
        let base = run_physical(&f_b1(), &params()).unwrap();
        let dip =
            run_physical(&f_b1(), &params().with_dipole(0.1, DipoleVariant::Exchange)).unwrap();
        assert!(dip.fidelity_raw < base.fidelity_raw);
    }
}
