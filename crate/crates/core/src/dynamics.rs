//! Resonant atom-cavity Hamiltonian, its no-jump decay extension, the
//! nearest-neighbour dipole perturbation, and time evolution.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expm;
use crate::hilbert::{
    excitation_blocks, AtomLevel, Domain, HilbertSpace, OperatorMatrix, StateVector, C64, ZERO,
};

/// Form of the dipole-dipole perturbation between neighbouring atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DipoleVariant {
    /// `delta |e_j e_j+1><e_j e_j+1|`
    #[default]
    Projector,
    /// `delta (S+_j S-_j+1 + S-_j S+_j+1)`
    Exchange,
}

impl DipoleVariant {
    pub fn name(self) -> &'static str {
        match self {
            DipoleVariant::Projector => "projector",
            DipoleVariant::Exchange => "exchange",
        }
    }
}

impl std::str::FromStr for DipoleVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projector" => Ok(DipoleVariant::Projector),
            "exchange" => Ok(DipoleVariant::Exchange),
            other => Err(Error::Parse(format!(
                "unknown dipole variant `{other}` (expected projector|exchange)"
            ))),
        }
    }
}

/// Physical parameters of one gate run. Rates are angular frequencies in rad/s
/// (or any consistent unit; only ratios and `rate * time` matter).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub couplings: Vec<f64>,
    pub kappa: f64,
    pub dipole_delta: f64,
    pub dipole_variant: DipoleVariant,
    pub photon_cutoff: usize,
    /// Relative deviation of the interaction time, `t = T_D (1 + deviation)`.
    pub timing_deviation: f64,
}

impl ModelParams {
    pub fn new(couplings: Vec<f64>) -> Self {
        Self {
            couplings,
            kappa: 0.0,
            dipole_delta: 0.0,
            dipole_variant: DipoleVariant::Projector,
            photon_cutoff: 1,
            timing_deviation: 0.0,
        }
    }

    /// Couplings proportional to `ratios`, scaled so that atom 1 has `omega1`.
    pub fn from_ratios(omega1: f64, ratios: &[f64]) -> Result<Self> {
        let first = *ratios
            .first()
            .ok_or_else(|| Error::param("ratios", "at least one ratio is required"))?;
        if !(first > 0.0) {
            return Err(Error::param("ratios", "the first ratio must be positive"));
        }
        let params = Self::new(ratios.iter().map(|r| omega1 * r / first).collect());
        params.validate()?;
        Ok(params)
    }

    /// Atom 1 at `omega1`, all others at `omega1 / eta`.
    pub fn star(n: usize, omega1: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::param("eta", format!("must be positive, got {eta}")));
        }
        if n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        let mut couplings = vec![omega1 / eta; n];
        couplings[0] = omega1;
        let params = Self::new(couplings);
        params.validate()?;
        Ok(params)
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_dipole(mut self, delta: f64, variant: DipoleVariant) -> Self {
        self.dipole_delta = delta;
        self.dipole_variant = variant;
        self
    }

    pub fn with_timing_deviation(mut self, deviation: f64) -> Self {
        self.timing_deviation = deviation;
        self
    }

    pub fn with_photon_cutoff(mut self, cutoff: usize) -> Self {
        self.photon_cutoff = cutoff;
        self
    }

    pub fn n_atoms(&self) -> usize {
        self.couplings.len()
    }

    pub fn omega1(&self) -> f64 {
        self.couplings.first().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.couplings.is_empty() {
            return Err(Error::param("couplings", "at least one atom is required"));
        }
        if let Some(bad) = self
            .couplings
            .iter()
            .find(|w| !(w.is_finite() && **w >= 0.0))
        {
            return Err(Error::param(
                "couplings",
                format!("couplings must be finite and non-negative, got {bad}"),
            ));
        }
        if !(self.omega1() > 0.0) {
            return Err(Error::param("couplings", "omega1 must be positive"));
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::param(
                "kappa",
                format!("must be finite and >= 0, got {}", self.kappa),
            ));
        }
        if self.kappa >= 4.0 * self.omega1() {
            return Err(Error::Overdamped {
                kappa: self.kappa,
                limit: 4.0 * self.omega1(),
            });
        }
        if !(self.dipole_delta.is_finite() && self.dipole_delta >= 0.0) {
            return Err(Error::param(
                "dipole_delta",
                format!("must be finite and >= 0, got {}", self.dipole_delta),
            ));
        }
        if !(self.timing_deviation.is_finite() && self.timing_deviation > -1.0) {
            return Err(Error::param(
                "timing_deviation",
                format!("must be finite and > -1, got {}", self.timing_deviation),
            ));
        }
        Ok(())
    }

    /// Interaction Hamiltonian with decay and (if `dipole_delta > 0`) the dipole term.
    pub fn hamiltonian(&self, space: &HilbertSpace) -> Result<OperatorMatrix> {
        self.validate()?;
        let mut h = add_decay(&build_interaction(space, &self.couplings)?, self.kappa)?;
        if self.dipole_delta > 0.0 {
            h = add_dipole(&h, self.dipole_delta, self.dipole_variant)?;
        }
        Ok(h)
    }
}

fn full_space(h: &OperatorMatrix) -> Result<HilbertSpace> {
    h.space()
        .ok_or_else(|| Error::param("H", "operator must act on the atom-cavity space"))
}

/// `H_I = sum_j Omega_j (a+ S-_j + a S+_j)`
pub fn build_interaction(space: &HilbertSpace, couplings: &[f64]) -> Result<OperatorMatrix> {
    if couplings.len() != space.n_atoms() {
        return Err(Error::Dimension {
            expected: space.n_atoms(),
            actual: couplings.len(),
        });
    }
    let mut h = OperatorMatrix::zeros(Domain::Full(*space));
    let m = h.matrix_mut();
    for col in 0..space.dim() {
        let n = space.photons_of(col);
        if n == space.photon_cutoff() {
            continue;
        }
        let amp = ((n + 1) as f64).sqrt();
        let mut label = space.label(col);
        for (j, &omega) in couplings.iter().enumerate() {
            if label.levels[j] != AtomLevel::E || omega == 0.0 {
                continue;
            }
            // |e_j, n> -> |g_j, n+1>
            label.levels[j] = AtomLevel::G;
            label.photons = n + 1;
            let row = space.index(&label)?;
            label.levels[j] = AtomLevel::E;
            label.photons = n;
            let v = C64::new(omega * amp, 0.0);
            m[(row, col)] = v;
            m[(col, row)] = v;
        }
    }
    Ok(h)
}

/// Adds the no-jump term `-i (kappa / 2) a+ a`.
pub fn add_decay(h: &OperatorMatrix, kappa: f64) -> Result<OperatorMatrix> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::param(
            "kappa",
            format!("must be finite and >= 0, got {kappa}"),
        ));
    }
    let space = full_space(h)?;
    let mut out = h.clone();
    if kappa > 0.0 {
        let m = out.matrix_mut();
        for k in 0..space.dim() {
            let n = space.photons_of(k) as f64;
            m[(k, k)] += C64::new(0.0, -0.5 * kappa * n);
        }
    }
    Ok(out)
}

/// Adds the open-chain nearest-neighbour dipole term of the given form.
pub fn add_dipole(
    h: &OperatorMatrix,
    delta: f64,
    variant: DipoleVariant,
) -> Result<OperatorMatrix> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::param(
            "delta",
            format!("must be finite and >= 0, got {delta}"),
        ));
    }
    let space = full_space(h)?;
    if space.n_atoms() < 2 {
        return Err(Error::param(
            "n_atoms",
            "dipole coupling needs at least two atoms",
        ));
    }
    let mut out = h.clone();
    let m = out.matrix_mut();
    for col in 0..space.dim() {
        let label = space.label(col);
        for j in 0..space.n_atoms() - 1 {
            let (a, b) = (label.levels[j], label.levels[j + 1]);
            match variant {
                DipoleVariant::Projector => {
                    if a == AtomLevel::E && b == AtomLevel::E {
                        m[(col, col)] += C64::new(delta, 0.0);
                    }
                }
                DipoleVariant::Exchange => {
                    let swapped = match (a, b) {
                        (AtomLevel::E, AtomLevel::G) => (AtomLevel::G, AtomLevel::E),
                        (AtomLevel::G, AtomLevel::E) => (AtomLevel::E, AtomLevel::G),
                        _ => continue,
                    };
                    let mut target = label.clone();
                    target.levels[j] = swapped.0;
                    target.levels[j + 1] = swapped.1;
                    let row = space.index(&target)?;
                    m[(row, col)] += C64::new(delta, 0.0);
                }
            }
        }
    }
    Ok(out)
}

fn check_evolution_inputs(h: &OperatorMatrix, t: f64, psi: &StateVector) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::param(
            "t",
            format!("must be finite and >= 0, got {t}"),
        ));
    }
    if h.domain() != Domain::Full(psi.space()) {
        return Err(Error::Dimension {
            expected: h.dim(),
            actual: psi.len(),
        });
    }
    if !h
        .matrix()
        .iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
    {
        return Err(Error::NonFinite("Hamiltonian"));
    }
    if !psi.is_finite() {
        return Err(Error::NonFinite("state"));
    }
    Ok(())
}

/// `exp(-iHt) psi` using the whole matrix.
pub fn evolve(h: &OperatorMatrix, t: f64, psi: &StateVector) -> Result<StateVector> {
    check_evolution_inputs(h, t, psi)?;
    if t == 0.0 {
        return Ok(psi.clone());
    }
    let out = if h.is_hermitian() {
        expm::hermitian_propagate(h.matrix(), t, psi.amplitudes())
    } else {
        expm::propagator(h.matrix(), t) * psi.amplitudes()
    };
    StateVector::new(psi.space(), out)
}

fn block_propagator(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let hermitian = (0..h.nrows()).all(|c| (c..h.nrows()).all(|r| h[(r, c)] == h[(c, r)].conj()));
    if hermitian {
        let eig = SymmetricEigen::new(h.clone());
        let phases = DVector::from_iterator(
            eig.eigenvalues.len(),
            eig.eigenvalues
                .iter()
                .map(|&l| C64::from_polar(1.0, -l * t)),
        );
        let v = &eig.eigenvectors;
        v * DMatrix::from_diagonal(&phases) * v.adjoint()
    } else {
        expm::propagator(h, t)
    }
}

/// Verifies that `h` has no element connecting different excitation numbers.
pub fn check_block_structure(h: &OperatorMatrix) -> Result<()> {
    let space = full_space(h)?;
    let blocks = excitation_blocks(&space);
    let m = h.matrix();
    for c in 0..space.dim() {
        let bc = blocks.block_of(c);
        for r in 0..space.dim() {
            let br = blocks.block_of(r);
            if br != bc && m[(r, c)] != ZERO {
                return Err(Error::BlockStructure { from: bc, to: br });
            }
        }
    }
    Ok(())
}

/// Evolves several states under one excitation-conserving `H`, one block at a time.
///
/// Blocks on which none of the states has support are never exponentiated.
pub fn evolve_blocked_many(
    h: &OperatorMatrix,
    t: f64,
    states: &[StateVector],
) -> Result<Vec<StateVector>> {
    let space = full_space(h)?;
    for psi in states {
        check_evolution_inputs(h, t, psi)?;
    }
    check_block_structure(h)?;
    if t == 0.0 {
        return Ok(states.to_vec());
    }
    let blocks = excitation_blocks(&space);
    let mut out: Vec<DVector<C64>> = states.iter().map(|_| DVector::zeros(space.dim())).collect();
    for block in blocks.blocks() {
        let supported = states
            .iter()
            .any(|psi| block.iter().any(|&k| psi.amplitudes()[k] != ZERO));
        if !supported {
            continue;
        }
        let sub = DMatrix::from_fn(block.len(), block.len(), |r, c| {
            h.matrix()[(block[r], block[c])]
        });
        let u = block_propagator(&sub, t);
        for (psi, dst) in states.iter().zip(out.iter_mut()) {
            let local =
                DVector::from_iterator(block.len(), block.iter().map(|&k| psi.amplitudes()[k]));
            let evolved = &u * local;
            for (&k, v) in block.iter().zip(evolved.iter()) {
                dst[k] = *v;
            }
        }
    }
    out.into_iter()
        .map(|amps| StateVector::new(space, amps))
        .collect()
}

/// Block-structured `exp(-iHt) psi`; `H` must conserve the excitation number.
pub fn evolve_blocked(h: &OperatorMatrix, t: f64, psi: &StateVector) -> Result<StateVector> {
    Ok(evolve_blocked_many(h, t, std::slice::from_ref(psi))?.remove(0))
}
