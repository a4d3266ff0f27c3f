//! Composite state space of `N` three-level atoms and one truncated cavity mode.
//!
//! Basis ordering: atoms are the most significant digits (atom 1 first, base 3
//! with level order `g, i, e`), the photon number is the least significant
//! digit. Computational basis states of the register are embedded at photon
//! number zero.

use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Internal level of a three-level atom. `I` is the decoupled level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AtomLevel {
    G,
    I,
    E,
}

impl AtomLevel {
    pub const ALL: [AtomLevel; 3] = [AtomLevel::G, AtomLevel::I, AtomLevel::E];

    pub fn digit(self) -> usize {
        match self {
            AtomLevel::G => 0,
            AtomLevel::I => 1,
            AtomLevel::E => 2,
        }
    }

    pub fn from_digit(d: usize) -> Self {
        match d {
            0 => AtomLevel::G,
            1 => AtomLevel::I,
            2 => AtomLevel::E,
            _ => panic!("atom level digit {d} out of range"),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            AtomLevel::G => 'g',
            AtomLevel::I => 'i',
            AtomLevel::E => 'e',
        }
    }
}

/// Atomic levels plus photon count of one basis state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub levels: Vec<AtomLevel>,
    pub photons: usize,
}

impl BasisLabel {
    pub fn new(levels: Vec<AtomLevel>, photons: usize) -> Self {
        Self { levels, photons }
    }

    /// Photon count plus number of excited atoms.
    pub fn excitation(&self) -> usize {
        self.photons + self.levels.iter().filter(|&&l| l == AtomLevel::E).count()
    }
}

impl std::fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "|")?;
        for (j, l) in self.levels.iter().enumerate() {
            write!(f, "{}{}", l.symbol(), j + 1)?;
        }
        write!(f, ",{}>", self.photons)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSpace {
    n_atoms: usize,
    photon_cutoff: usize,
    dim: usize,
}

impl HilbertSpace {
    pub fn new(n_atoms: usize, photon_cutoff: usize) -> Result<Self> {
        build_space(n_atoms, photon_cutoff)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn photon_cutoff(&self) -> usize {
        self.photon_cutoff
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn photon_levels(&self) -> usize {
        self.photon_cutoff + 1
    }

    /// Index distance between consecutive levels of `atom` (1-based).
    fn stride(&self, atom: usize) -> usize {
        3usize.pow((self.n_atoms - atom) as u32) * self.photon_levels()
    }

    pub fn label(&self, index: usize) -> BasisLabel {
        assert!(index < self.dim, "basis index {index} out of range");
        let photons = index % self.photon_levels();
        let mut rest = index / self.photon_levels();
        let mut levels = vec![AtomLevel::G; self.n_atoms];
        for slot in levels.iter_mut().rev() {
            *slot = AtomLevel::from_digit(rest % 3);
            rest /= 3;
        }
        BasisLabel { levels, photons }
    }

    pub fn index(&self, label: &BasisLabel) -> Result<usize> {
        if label.levels.len() != self.n_atoms {
            return Err(Error::Dimension {
                expected: self.n_atoms,
                actual: label.levels.len(),
            });
        }
        if label.photons > self.photon_cutoff {
            return Err(Error::param(
                "photons",
                format!("{} exceeds cutoff {}", label.photons, self.photon_cutoff),
            ));
        }
        let atoms = label
            .levels
            .iter()
            .fold(0usize, |acc, l| acc * 3 + l.digit());
        Ok(atoms * self.photon_levels() + label.photons)
    }

    /// Level of `atom` (1-based) in basis state `index`.
    pub fn level_of(&self, index: usize, atom: usize) -> AtomLevel {
        AtomLevel::from_digit((index / self.stride(atom)) % 3)
    }

    pub fn photons_of(&self, index: usize) -> usize {
        index % self.photon_levels()
    }

    pub fn excitation_of(&self, index: usize) -> usize {
        self.photons_of(index)
            + (1..=self.n_atoms)
                .filter(|&j| self.level_of(index, j) == AtomLevel::E)
                .count()
    }

    fn check_atom(&self, atom: usize) -> Result<()> {
        if atom == 0 || atom > self.n_atoms {
            return Err(Error::AtomIndex {
                index: atom,
                n_atoms: self.n_atoms,
            });
        }
        Ok(())
    }
}

/// Builds the space of `n_atoms` atoms and a mode holding at most `photon_cutoff` photons.
pub fn build_space(n_atoms: usize, photon_cutoff: usize) -> Result<HilbertSpace> {
    if n_atoms == 0 {
        return Err(Error::param("n_atoms", "must be at least 1"));
    }
    let capacity = Error::Capacity {
        n_atoms,
        photon_cutoff,
    };
    let atoms = u32::try_from(n_atoms)
        .ok()
        .and_then(|n| 3usize.checked_pow(n))
        .ok_or_else(|| capacity.clone())?;
    let dim = photon_cutoff
        .checked_add(1)
        .and_then(|p| atoms.checked_mul(p))
        .ok_or_else(|| capacity.clone())?;
    // A state vector must itself be allocatable.
    if dim > isize::MAX as usize / std::mem::size_of::<C64>() {
        return Err(capacity);
    }
    Ok(HilbertSpace {
        n_atoms,
        photon_cutoff,
        dim,
    })
}

/// Which space an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Full(HilbertSpace),
    Computational(usize),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Full(s) => s.dim(),
            Domain::Computational(n) => 1usize << n,
        }
    }
}

/// Dense complex square matrix tagged with the space it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    domain: Domain,
    matrix: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn new(domain: Domain, matrix: DMatrix<C64>) -> Result<Self> {
        let d = domain.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension {
                expected: d,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { domain, matrix })
    }

    pub fn zeros(domain: Domain) -> Self {
        let d = domain.dim();
        Self {
            domain,
            matrix: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(domain: Domain) -> Self {
        let d = domain.dim();
        Self {
            domain,
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn space(&self) -> Option<HilbertSpace> {
        match self.domain {
            Domain::Full(s) => Some(s),
            Domain::Computational(_) => None,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        let m = &self.matrix;
        let d = m.nrows();
        (0..d).all(|c| (c..d).all(|r| m[(r, c)] == m[(c, r)].conj()))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::Dimension {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            domain: self.domain,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            domain: self.domain,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.domain != Domain::Full(state.space) {
            return Err(Error::Dimension {
                expected: self.dim(),
                actual: state.len(),
            });
        }
        Ok(StateVector {
            space: state.space,
            amplitudes: &self.matrix * &state.amplitudes,
        })
    }
}

/// Amplitudes over a [`HilbertSpace`]; not necessarily normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(space: HilbertSpace, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::Dimension {
                expected: space.dim(),
                actual: amplitudes.len(),
            });
        }
        Ok(Self { space, amplitudes })
    }

    pub fn basis(space: HilbertSpace, index: usize) -> Self {
        let mut amplitudes = DVector::zeros(space.dim());
        amplitudes[index] = ONE;
        Self { space, amplitudes }
    }

    pub fn from_label(space: HilbertSpace, label: &BasisLabel) -> Result<Self> {
        Ok(Self::basis(space, space.index(label)?))
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Expectation value `<psi|op|psi>`.
    pub fn expectation(&self, op: &OperatorMatrix) -> Result<C64> {
        let applied = op.apply(self)?;
        Ok(self.amplitudes.dotc(&applied.amplitudes))
    }
}

/// Level encodings of each qubit: `|0>` is always `g`, `|1>` is `one_levels[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    one_levels: Vec<AtomLevel>,
}

impl Encoding {
    /// Qubit 1 in `{g, e}`, all others in `{g, i}`.
    pub fn standard(n: usize) -> Self {
        let mut one_levels = vec![AtomLevel::I; n];
        if n > 0 {
            one_levels[0] = AtomLevel::E;
        }
        Self { one_levels }
    }

    pub fn n_qubits(&self) -> usize {
        self.one_levels.len()
    }

    pub fn level(&self, qubit: usize, bit: bool) -> AtomLevel {
        if bit {
            self.one_levels[qubit - 1]
        } else {
            AtomLevel::G
        }
    }

    /// Atomic label of computational state `x`; qubit 1 is the most significant bit.
    pub fn label_of(&self, x: usize) -> BasisLabel {
        let n = self.n_qubits();
        let levels = (1..=n)
            .map(|q| self.level(q, (x >> (n - q)) & 1 == 1))
            .collect();
        BasisLabel { levels, photons: 0 }
    }

    /// Full-space index of every computational basis state, in computational order.
    pub fn basis_indices(&self, space: &HilbertSpace) -> Result<Vec<usize>> {
        if space.n_atoms() != self.n_qubits() {
            return Err(Error::Dimension {
                expected: space.n_atoms(),
                actual: self.n_qubits(),
            });
        }
        (0..1usize << self.n_qubits())
            .map(|x| space.index(&self.label_of(x)))
            .collect()
    }
}

/// Three-level operators on a single atom in `(g, i, e)` order.
pub mod local {
    use super::*;

    fn outer(row: AtomLevel, col: AtomLevel) -> Matrix3<C64> {
        let mut m = Matrix3::zeros();
        m[(row.digit(), col.digit())] = ONE;
        m
    }

    /// `S+ = |e><g|`
    pub fn raising() -> Matrix3<C64> {
        outer(AtomLevel::E, AtomLevel::G)
    }

    /// `S- = |g><e|`
    pub fn lowering() -> Matrix3<C64> {
        outer(AtomLevel::G, AtomLevel::E)
    }

    pub fn projector(level: AtomLevel) -> Matrix3<C64> {
        outer(level, level)
    }

    /// `|i><g| + |g><i|`
    pub fn flip_gi() -> Matrix3<C64> {
        outer(AtomLevel::I, AtomLevel::G) + outer(AtomLevel::G, AtomLevel::I)
    }

    /// `|e><g| + |g><e|`
    pub fn flip_ge() -> Matrix3<C64> {
        raising() + lowering()
    }
}

/// Embeds a 3x3 operator acting on atom `atom` (1-based) into the full space.
pub fn embed_atom_op(
    space: &HilbertSpace,
    atom: usize,
    local_op: &Matrix3<C64>,
) -> Result<OperatorMatrix> {
    space.check_atom(atom)?;
    let stride = space.stride(atom);
    let d = space.dim();
    let mut m = DMatrix::zeros(d, d);
    for col in 0..d {
        let from = space.level_of(col, atom).digit();
        let base = col - from * stride;
        for to in 0..3 {
            let v = local_op[(to, from)];
            if v != ZERO {
                m[(base + to * stride, col)] = v;
            }
        }
    }
    OperatorMatrix::new(Domain::Full(*space), m)
}

/// Truncated photon annihilation operator `a`.
pub fn annihilation(space: &HilbertSpace) -> OperatorMatrix {
    let d = space.dim();
    let mut m = DMatrix::zeros(d, d);
    for col in 0..d {
        let n = space.photons_of(col);
        if n > 0 {
            m[(col - 1, col)] = C64::new((n as f64).sqrt(), 0.0);
        }
    }
    OperatorMatrix {
        domain: Domain::Full(*space),
        matrix: m,
    }
}

/// Photon number operator `a+ a`.
pub fn photon_number(space: &HilbertSpace) -> OperatorMatrix {
    let d = space.dim();
    let diag = DVector::from_fn(d, |k, _| C64::new(space.photons_of(k) as f64, 0.0));
    OperatorMatrix {
        domain: Domain::Full(*space),
        matrix: DMatrix::from_diagonal(&diag),
    }
}

/// Excitation number operator `a+ a + sum_j |e_j><e_j|`.
pub fn excitation_number(space: &HilbertSpace) -> OperatorMatrix {
    let d = space.dim();
    let diag = DVector::from_fn(d, |k, _| C64::new(space.excitation_of(k) as f64, 0.0));
    OperatorMatrix {
        domain: Domain::Full(*space),
        matrix: DMatrix::from_diagonal(&diag),
    }
}

/// Places a register state (`2^N` amplitudes) onto the atoms, with the cavity in vacuum.
pub fn computational_embed(
    space: &HilbertSpace,
    encoding: &Encoding,
    comp_state: &[C64],
) -> Result<StateVector> {
    let indices = encoding.basis_indices(space)?;
    if comp_state.len() != indices.len() {
        return Err(Error::Dimension {
            expected: indices.len(),
            actual: comp_state.len(),
        });
    }
    let mut amplitudes = DVector::zeros(space.dim());
    for (&k, &a) in indices.iter().zip(comp_state) {
        amplitudes[k] = a;
    }
    Ok(StateVector {
        space: *space,
        amplitudes,
    })
}

/// Extracts register amplitudes and the population found outside the register.
pub fn computational_project(state: &StateVector, encoding: &Encoding) -> Result<(Vec<C64>, f64)> {
    let indices = encoding.basis_indices(&state.space)?;
    let comp: Vec<C64> = indices.iter().map(|&k| state.amplitudes[k]).collect();
    let inside: f64 = comp.iter().map(|a| a.norm_sqr()).sum();
    let leakage = (state.norm_sqr() - inside).max(0.0);
    Ok((comp, leakage))
}

/// Basis indices grouped by excitation number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcitationBlocks {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl ExcitationBlocks {
    /// Indices with excitation number `n` (empty if none).
    pub fn block(&self, n: usize) -> &[usize] {
        self.blocks.get(n).map_or(&[], |b| b.as_slice())
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, index: usize) -> usize {
        self.block_of[index]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }
}

pub fn excitation_blocks(space: &HilbertSpace) -> ExcitationBlocks {
    let max = space.n_atoms() + space.photon_cutoff();
    let mut blocks = vec![Vec::new(); max + 1];
    let mut block_of = Vec::with_capacity(space.dim());
    for k in 0..space.dim() {
        let n = space.excitation_of(k);
        blocks[n].push(k);
        block_of.push(n);
    }
    ExcitationBlocks { blocks, block_of }
}
