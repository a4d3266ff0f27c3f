//! Boolean functions under the Deutsch-Jozsa promise, their phase oracles and
//! the decomposition of each oracle into controlled-phase-flip gates.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{ideal_cpf, CpfLabel};
use crate::hilbert::{Domain, OperatorMatrix, ONE};

/// Largest register for which every promised function is enumerated.
pub const MAX_ENUMERATION_QUBITS: usize = 5;
/// Largest register a truth table may describe.
pub const MAX_FUNCTION_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionClass {
    Constant,
    Balanced,
    Neither,
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionClass::Constant => "constant",
            FunctionClass::Balanced => "balanced",
            FunctionClass::Neither => "neither",
        })
    }
}

/// Truth table of `f: {0,1}^n -> {0,1}`; entry `x` is `f(x)`, qubit 1 being the
/// most significant bit of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<bool>,
}

impl BooleanFunction {
    pub fn from_table(n: usize, table: Vec<bool>) -> Result<Self> {
        check_qubits(n)?;
        if table.len() != 1 << n {
            return Err(Error::Dimension {
                expected: 1 << n,
                actual: table.len(),
            });
        }
        Ok(Self { n, table })
    }

    /// Bit `x` of `mask` is `f(x)`. Needs `n <= 6`.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        if n == 0 || n > 6 {
            return Err(Error::param(
                "n",
                format!("a u64 mask holds 1..=6 qubits, got {n}"),
            ));
        }
        if n < 6 && mask >> (1 << n) != 0 {
            return Err(Error::param(
                "mask",
                format!("{mask:#x} has bits beyond 2^{n} entries"),
            ));
        }
        Ok(Self {
            n,
            table: (0..1 << n).map(|x| mask >> x & 1 == 1).collect(),
        })
    }

    /// Parses a hex truth-table mask such as `0x9A`.
    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        check_qubits(n)?;
        let digits = hex
            .strip_prefix("0x")
            .or_else(|| hex.strip_prefix("0X"))
            .unwrap_or(hex);
        if digits.is_empty() {
            return Err(Error::Parse(format!("empty function mask `{hex}`")));
        }
        let size = 1usize << n;
        let mut table = vec![false; size];
        for (pos, ch) in digits.chars().rev().enumerate() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit `{ch}` in `{hex}`")))?;
            for b in 0..4 {
                if v >> b & 1 == 1 {
                    let x = pos * 4 + b;
                    if x >= size {
                        return Err(Error::param(
                            "function",
                            format!("mask `{hex}` sets entry {x} beyond the {size} inputs of {n} qubits"),
                        ));
                    }
                    table[x] = true;
                }
            }
        }
        Ok(Self { n, table })
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        check_qubits(n)?;
        Ok(Self {
            n,
            table: vec![value; 1 << n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn eval(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn weight(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }

    pub fn class(&self) -> FunctionClass {
        let w = self.weight();
        if w == 0 || w == self.table.len() {
            FunctionClass::Constant
        } else if 2 * w == self.table.len() {
            FunctionClass::Balanced
        } else {
            FunctionClass::Neither
        }
    }

    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            table: self.table.iter().map(|b| !b).collect(),
        }
    }

    /// Representative of `{f, not f}` with `f(0...0) = 0`; both give the same oracle up to sign.
    pub fn canonical(&self) -> Self {
        if self.table[0] {
            self.complement()
        } else {
            self.clone()
        }
    }

    pub fn to_mask(&self) -> Option<u64> {
        (self.n <= 6).then(|| {
            self.table
                .iter()
                .enumerate()
                .fold(0u64, |m, (x, &b)| m | (b as u64) << x)
        })
    }

    /// Upper-case hex mask with `0x` prefix, `ceil(2^n / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.table.len().div_ceil(4);
        let mut s = String::with_capacity(digits + 2);
        s.push_str("0x");
        for pos in (0..digits).rev() {
            let v = (0..4)
                .filter(|b| self.table.get(pos * 4 + b).copied().unwrap_or(false))
                .fold(0u32, |acc, b| acc | 1 << b);
            s.push(char::from_digit(v, 16).unwrap().to_ascii_uppercase());
        }
        s
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_FUNCTION_QUBITS {
        return Err(Error::param(
            "n",
            format!("qubit count must be in 1..={MAX_FUNCTION_QUBITS}, got {n}"),
        ));
    }
    Ok(())
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of balanced truth tables on `n` qubits, `C(2^n, 2^(n-1))`.
pub fn raw_balanced_count(n: usize) -> u64 {
    binomial(1 << n, 1 << (n - 1))
}

/// Number of balanced functions with `f(0...0) = 0`, `C(2^n - 1, 2^(n-1) - 1)`.
pub fn canonical_balanced_count(n: usize) -> u64 {
    binomial((1 << n) - 1, (1 << (n - 1)) - 1)
}

/// Masks over `width` bits with exactly `k` ones, in increasing order.
struct FixedWeightMasks {
    next: Option<u64>,
    limit: u64,
}

impl FixedWeightMasks {
    fn new(width: u32, k: u32) -> Self {
        let first = if k == 0 { 0 } else { u64::MAX >> (64 - k) };
        Self {
            next: (k <= width).then_some(first),
            limit: 1u64 << width,
        }
    }
}

impl Iterator for FixedWeightMasks {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            // Gosper's hack.
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let n = (((r ^ cur) >> 2) / c) | r;
            (n < self.limit).then_some(n)
        };
        Some(cur)
    }
}

fn check_enumerable(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ENUMERATION_QUBITS {
        return Err(Error::EnumerationBound {
            n,
            max: MAX_ENUMERATION_QUBITS,
        });
    }
    Ok(())
}

/// Every balanced truth table as a mask, complements included.
pub fn raw_balanced_masks(n: usize) -> Result<impl Iterator<Item = u64>> {
    check_enumerable(n)?;
    Ok(FixedWeightMasks::new(1 << n, 1 << (n - 1)))
}

/// The constant `f = 0` followed by every canonical balanced function in
/// increasing mask order. The position in this sequence is the function's
/// ordinal id.
pub fn enumerate_functions(n: usize) -> Result<impl Iterator<Item = BooleanFunction>> {
    check_enumerable(n)?;
    let constant = BooleanFunction::constant(n, false)?;
    // f(0) = 0: the 2^(n-1) ones sit among entries 1..2^n.
    let balanced = FixedWeightMasks::new((1 << n) - 1, 1 << (n - 1))
        .map(move |m| BooleanFunction::from_mask(n, m << 1).expect("mask fits"));
    Ok(std::iter::once(constant).chain(balanced))
}

/// Diagonal oracle `|x> -> (-1)^f(x) |x>`.
pub fn ideal_oracle(f: &BooleanFunction) -> OperatorMatrix {
    let diag = DVector::from_iterator(
        f.table.len(),
        f.table.iter().map(|&b| if b { -ONE } else { ONE }),
    );
    OperatorMatrix::new(Domain::Computational(f.n), DMatrix::from_diagonal(&diag))
        .expect("oracle has register size")
}

/// Ordered CPF labels; the operator is the product in list order, so the last
/// label acts first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateSequence {
    pub n: usize,
    pub labels: Vec<CpfLabel>,
}

impl GateSequence {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Product of ideal CPF gates.
    pub fn ideal_product(&self) -> OperatorMatrix {
        self.labels.iter().fold(
            OperatorMatrix::identity(Domain::Computational(self.n)),
            |acc, &l| acc.mul(&ideal_cpf(l)).expect("same register"),
        )
    }

    /// The function whose oracle this sequence realizes.
    pub fn to_function(&self) -> BooleanFunction {
        let mut table = vec![false; 1 << self.n];
        for l in &self.labels {
            table[l.rho()] ^= true;
        }
        BooleanFunction { n: self.n, table }
    }
}

/// One CPF gate per input with `f(x) = 1`, in descending order of `x`.
pub fn decompose_oracle(f: &BooleanFunction) -> Result<GateSequence> {
    if f.class() == FunctionClass::Neither {
        return Err(Error::NotPromised {
            n: f.n,
            weight: f.weight(),
        });
    }
    let labels = (0..f.table.len())
        .rev()
        .filter(|&x| f.table[x])
        .map(|x| CpfLabel::new(f.n, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(GateSequence { n: f.n, labels })
}
