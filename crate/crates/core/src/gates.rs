//! Controlled-phase-flip gates: the native gate produced by one simultaneous
//! resonant passage, its X-conjugated relatives, and ideal reference gates.
//!
//! The native gate flips the phase of `|e1 i2 ... iN>` (all qubits `1`). With
//! atom 1 weakly coupled (`Omega_1 << Omega_k`), an excitation starting on
//! atom 1 returns after `pi / Omega_1` with phase `-1` when every other atom is
//! decoupled, and almost unchanged otherwise.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_blocked_many, ModelParams};
use crate::error::{Error, Result};
use crate::hilbert::{
    computational_embed, computational_project, Domain, Encoding, HilbertSpace, OperatorMatrix,
    C64, ONE, ZERO,
};

/// Names the computational basis state whose phase a CPF gate flips.
/// Qubit 1 is the most significant bit of `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CpfLabel {
    n: usize,
    rho: usize,
}

impl CpfLabel {
    pub fn new(n: usize, rho: usize) -> Result<Self> {
        if n == 0 || n >= usize::BITS as usize {
            return Err(Error::param("n", format!("unsupported qubit count {n}")));
        }
        if rho >> n != 0 {
            return Err(Error::param(
                "rho",
                format!("{rho} does not fit in {n} qubits"),
            ));
        }
        Ok(Self { n, rho })
    }

    /// The label all ones, i.e. the gate realized natively by the cavity.
    pub fn native(n: usize) -> Result<Self> {
        Self::new(n, (1usize << n) - 1)
    }

    /// Parses a bit string such as `"101"` for an `n`-qubit register.
    pub fn parse(bits: &str, n: usize) -> Result<Self> {
        let label: CpfLabel = bits.parse()?;
        if label.n != n {
            return Err(Error::LabelLength {
                label: bits.to_string(),
                expected: n,
                actual: label.n,
            });
        }
        Ok(label)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    /// Qubits to flip before and after the native gate to realize this label.
    pub fn flip_mask(&self) -> usize {
        !self.rho & ((1usize << self.n) - 1)
    }

    /// Atomic spelling, e.g. `e1g2i3`.
    pub fn atomic(&self, encoding: &Encoding) -> String {
        encoding
            .label_of(self.rho)
            .levels
            .iter()
            .enumerate()
            .map(|(j, l)| format!("{}{}", l.symbol(), j + 1))
            .collect()
    }
}

impl fmt::Display for CpfLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.rho, width = self.n)
    }
}

impl FromStr for CpfLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || !s.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Parse(format!(
                "label `{s}` must be a non-empty bit string"
            )));
        }
        let rho = usize::from_str_radix(s, 2).map_err(|e| Error::Parse(e.to_string()))?;
        CpfLabel::new(s.len(), rho)
    }
}

impl Serialize for CpfLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CpfLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A synthesized gate restricted to the computational subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct GateResult {
    pub label: CpfLabel,
    /// Column `x` is the register component of the evolved input `|x>`; not renormalized.
    pub effective: DMatrix<C64>,
    /// Population of each input left outside the register (photon or wrong level).
    pub leakage: Vec<f64>,
    /// No-jump norm deficit of each input.
    pub norm_loss: Vec<f64>,
    /// Seconds when couplings are in rad/s.
    pub duration: f64,
    /// Gram matrix of the evolved full-space images of the inputs.
    pub retained_gram: DMatrix<C64>,
}

impl GateResult {
    pub fn n_qubits(&self) -> usize {
        self.label.n()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        self.effective.diagonal().iter().copied().collect()
    }

    /// Conjugates the gate by X on `label.flip_mask()` relative to this gate's label.
    pub fn conjugated(&self, label: CpfLabel) -> Result<GateResult> {
        if label.n() != self.label.n() {
            return Err(Error::LabelLength {
                label: label.to_string(),
                expected: self.label.n(),
                actual: label.n(),
            });
        }
        let m = label.rho() ^ self.label.rho();
        let d = self.effective.nrows();
        Ok(GateResult {
            label,
            effective: DMatrix::from_fn(d, d, |r, c| self.effective[(r ^ m, c ^ m)]),
            leakage: (0..d).map(|x| self.leakage[x ^ m]).collect(),
            norm_loss: (0..d).map(|x| self.norm_loss[x ^ m]).collect(),
            duration: self.duration,
            retained_gram: DMatrix::from_fn(d, d, |r, c| self.retained_gram[(r ^ m, c ^ m)]),
        })
    }
}

/// Interaction time `pi / sqrt(Omega_1^2 - kappa^2 / 16)`.
pub fn gate_time(omega1: f64, kappa: f64) -> Result<f64> {
    if !(omega1 > 0.0 && omega1.is_finite()) {
        return Err(Error::param(
            "omega1",
            format!("must be positive, got {omega1}"),
        ));
    }
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::param(
            "kappa",
            format!("must be finite and >= 0, got {kappa}"),
        ));
    }
    if kappa >= 4.0 * omega1 {
        return Err(Error::Overdamped {
            kappa,
            limit: 4.0 * omega1,
        });
    }
    Ok(std::f64::consts::PI / (omega1 * omega1 - kappa * kappa / 16.0).sqrt())
}

/// Amplitude left on the bright mode of a damped two-mode exchange at rate `theta`.
fn bright_return(theta: f64, kappa: f64, t: f64) -> C64 {
    let a = C64::new(theta * theta - kappa * kappa / 16.0, 0.0).sqrt();
    let at = a * t;
    // sin(At)/A, continuous through A = 0.
    let sinc_t = if at.norm() < 1e-8 {
        C64::new(t, 0.0)
    } else {
        at.sin() / a
    };
    (-kappa * t / 4.0).exp() * (at.cos() + sinc_t * (kappa / 4.0))
}

/// Closed-form diagonal of the native gate for every computational input.
///
/// Inputs without an excitation on atom 1 are untouched. For `|e1, S>` with
/// `S` the set of other atoms in `g`, the excitation explores the star formed
/// by atom 1, the photon and the atoms in `S`; only the bright combination at
/// `Theta_S = sqrt(Omega_1^2 + sum_S Omega_k^2)` moves, and the no-jump decay
/// acts on it like a damped two-level exchange.
pub fn star_coefficients(couplings: &[f64], kappa: f64, t: f64) -> Result<Vec<C64>> {
    let n = couplings.len();
    if n == 0 || n >= usize::BITS as usize {
        return Err(Error::param("couplings", "need between 1 and 63 atoms"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("must be positive, got {t}")));
    }
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::param(
            "kappa",
            format!("must be finite and >= 0, got {kappa}"),
        ));
    }
    let w1 = couplings[0];
    if !(w1 > 0.0) {
        return Err(Error::param("couplings", "omega1 must be positive"));
    }
    let top = 1usize << (n - 1);
    Ok((0..1usize << n)
        .map(|x| {
            if x & top == 0 {
                return ONE;
            }
            let theta2: f64 = w1 * w1
                + (1..n)
                    .filter(|&k| (x >> (n - 1 - k)) & 1 == 0)
                    .map(|k| couplings[k] * couplings[k])
                    .sum::<f64>();
            let weight = w1 * w1 / theta2;
            bright_return(theta2.sqrt(), kappa, t) * weight + (1.0 - weight)
        })
        .collect())
}

/// Evolves every computational input through one cavity passage.
pub fn synthesize_native(
    space: &HilbertSpace,
    encoding: &Encoding,
    params: &ModelParams,
) -> Result<GateResult> {
    params.validate()?;
    if params.n_atoms() != space.n_atoms() || encoding.n_qubits() != space.n_atoms() {
        return Err(Error::Dimension {
            expected: space.n_atoms(),
            actual: params.n_atoms(),
        });
    }
    let n = space.n_atoms();
    let d = 1usize << n;
    let h = params.hamiltonian(space)?;
    let duration = gate_time(params.omega1(), params.kappa)? * (1.0 + params.timing_deviation);
    let inputs = (0..d)
        .map(|x| {
            let mut comp = vec![ZERO; d];
            comp[x] = ONE;
            computational_embed(space, encoding, &comp)
        })
        .collect::<Result<Vec<_>>>()?;
    let outputs = evolve_blocked_many(&h, duration, &inputs)?;

    let mut effective = DMatrix::zeros(d, d);
    let mut leakage = Vec::with_capacity(d);
    let mut norm_loss = Vec::with_capacity(d);
    for (x, out) in outputs.iter().enumerate() {
        let (column, leak) = computational_project(out, encoding)?;
        effective.set_column(x, &DVector::from_vec(column));
        leakage.push(leak);
        norm_loss.push((1.0 - out.norm_sqr()).max(0.0));
    }
    let retained_gram = DMatrix::from_fn(d, d, |r, c| {
        outputs[r].amplitudes().dotc(outputs[c].amplitudes())
    });
    Ok(GateResult {
        label: CpfLabel::native(n)?,
        effective,
        leakage,
        norm_loss,
        duration,
        retained_gram,
    })
}

/// Physical CPF gate for `label`: X layers around the native passage.
pub fn synthesize_cpf(
    space: &HilbertSpace,
    encoding: &Encoding,
    params: &ModelParams,
    label: CpfLabel,
) -> Result<GateResult> {
    if label.n() != space.n_atoms() {
        return Err(Error::LabelLength {
            label: label.to_string(),
            expected: space.n_atoms(),
            actual: label.n(),
        });
    }
    synthesize_native(space, encoding, params)?.conjugated(label)
}

/// `J_rho = I - 2 |rho><rho|`
pub fn ideal_cpf(label: CpfLabel) -> OperatorMatrix {
    let d = 1usize << label.n();
    let diag = DVector::from_fn(d, |x, _| if x == label.rho() { -ONE } else { ONE });
    OperatorMatrix::new(
        Domain::Computational(label.n()),
        DMatrix::from_diagonal(&diag),
    )
    .expect("diagonal has register size")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleQubitKind {
    Hadamard,
    PauliX,
}

impl SingleQubitKind {
    fn matrix(self) -> [[C64; 2]; 2] {
        match self {
            SingleQubitKind::Hadamard => {
                let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            SingleQubitKind::PauliX => [[ZERO, ONE], [ONE, ZERO]],
        }
    }
}

/// A 2x2 gate on `qubit` (1-based, most significant first) of an `n`-qubit register.
pub fn single_qubit(n: usize, kind: SingleQubitKind, qubit: usize) -> Result<OperatorMatrix> {
    if qubit == 0 || qubit > n {
        return Err(Error::AtomIndex {
            index: qubit,
            n_atoms: n,
        });
    }
    let shift = n - qubit;
    let g = kind.matrix();
    let d = 1usize << n;
    let m = DMatrix::from_fn(d, d, |r, c| {
        if (r ^ c) & !(1 << shift) != 0 {
            ZERO
        } else {
            g[(r >> shift) & 1][(c >> shift) & 1]
        }
    });
    OperatorMatrix::new(Domain::Computational(n), m)
}

/// `H^{(x)n}` with entries `(-1)^{popcount(r & c)} / sqrt(2^n)`.
pub fn hadamard_all(n: usize) -> OperatorMatrix {
    let d = 1usize << n;
    let s = (d as f64).sqrt().recip();
    let m = DMatrix::from_fn(d, d, |r, c| {
        C64::new(if (r & c).count_ones() % 2 == 0 { s } else { -s }, 0.0)
    });
    OperatorMatrix::new(Domain::Computational(n), m).expect("register size")
}

/// Product of X on every qubit set in `mask`.
pub fn pauli_x_layer(n: usize, mask: usize) -> OperatorMatrix {
    let d = 1usize << n;
    let m = DMatrix::from_fn(d, d, |r, c| if r == c ^ mask { ONE } else { ZERO });
    OperatorMatrix::new(Domain::Computational(n), m).expect("register size")
}
