use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest spin count a label can hold (two bit-masks of 64 bits).
pub const MAX_SPINS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Factors from {1, Ix, Iy, Iz}.
    Cartesian,
    /// Factors from {1, Iz, I+, I-} with I± = Ix ± iIy.
    Spherical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    One,
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl Symbol {
    /// Two-bit storage code. Cartesian x/y and spherical +/- share codes 1/2.
    pub fn code(self) -> u8 {
        match self {
            Symbol::One => 0,
            Symbol::X | Symbol::Plus => 1,
            Symbol::Y | Symbol::Minus => 2,
            Symbol::Z => 3,
        }
    }

    pub fn from_code(code: u8, basis: Basis) -> Symbol {
        match (code & 3, basis) {
            (0, _) => Symbol::One,
            (3, _) => Symbol::Z,
            (1, Basis::Cartesian) => Symbol::X,
            (2, Basis::Cartesian) => Symbol::Y,
            (1, Basis::Spherical) => Symbol::Plus,
            _ => Symbol::Minus,
        }
    }

    /// `None` for symbols shared by both bases.
    pub fn basis(self) -> Option<Basis> {
        match self {
            Symbol::X | Symbol::Y => Some(Basis::Cartesian),
            Symbol::Plus | Symbol::Minus => Some(Basis::Spherical),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::One => '1',
            Symbol::X => 'x',
            Symbol::Y => 'y',
            Symbol::Z => 'z',
            Symbol::Plus => '+',
            Symbol::Minus => '-',
        }
    }

    pub fn from_char(c: char) -> Option<Symbol> {
        Some(match c {
            '1' | 'i' => Symbol::One,
            'x' | 'X' => Symbol::X,
            'y' | 'Y' => Symbol::Y,
            'z' | 'Z' => Symbol::Z,
            '+' | 'p' => Symbol::Plus,
            '-' | 'm' | '\u{2212}' => Symbol::Minus,
            _ => return None,
        })
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Product-operator label packed as two bit-planes, one bit per spin in each.
///
/// Spin `k` (0-based) occupies bit `k` of both planes; its code is
/// `lo_k | hi_k << 1`. The label does not know its own spin count or basis,
/// the owning operator does.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliLabel {
    lo: u64,
    hi: u64,
}

impl PauliLabel {
    pub const IDENTITY: PauliLabel = PauliLabel { lo: 0, hi: 0 };

    pub fn from_planes(lo: u64, hi: u64) -> Self {
        PauliLabel { lo, hi }
    }

    pub fn planes(self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    pub fn code(self, spin: usize) -> u8 {
        (((self.lo >> spin) & 1) | (((self.hi >> spin) & 1) << 1)) as u8
    }

    pub fn with_code(self, spin: usize, code: u8) -> Self {
        let bit = 1u64 << spin;
        let mut lo = self.lo & !bit;
        let mut hi = self.hi & !bit;
        if code & 1 != 0 {
            lo |= bit;
        }
        if code & 2 != 0 {
            hi |= bit;
        }
        PauliLabel { lo, hi }
    }

    pub fn with_symbol(self, spin: usize, symbol: Symbol) -> Self {
        self.with_code(spin, symbol.code())
    }

    pub fn symbol(self, spin: usize, basis: Basis) -> Symbol {
        Symbol::from_code(self.code(spin), basis)
    }

    /// Spins carrying a non-identity factor.
    pub fn support(self) -> u64 {
        self.lo | self.hi
    }

    /// Spins carrying a transverse factor (x/y or +/-).
    pub fn transverse(self) -> u64 {
        self.lo ^ self.hi
    }

    /// Spins carrying Iz.
    pub fn longitudinal(self) -> u64 {
        self.lo & self.hi
    }

    pub fn weight(self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_identity(self) -> bool {
        self.support() == 0
    }

    /// Builds a label from one symbol per spin; the basis is inferred.
    pub fn from_symbols(symbols: &[Symbol]) -> Result<(PauliLabel, Basis)> {
        if symbols.is_empty() || symbols.len() > MAX_SPINS {
            return Err(Error::SpinCount(symbols.len()));
        }
        let mut basis = None;
        let mut label = PauliLabel::IDENTITY;
        for (k, s) in symbols.iter().enumerate() {
            if let Some(b) = s.basis() {
                if basis.is_some_and(|prev| prev != b) {
                    return Err(Error::BasisMismatch);
                }
                basis = Some(b);
            }
            label = label.with_symbol(k, *s);
        }
        Ok((label, basis.unwrap_or(Basis::Cartesian)))
    }

    /// Parses a label such as `xz1y` or `+-z1`; spin 1 comes first.
    pub fn parse(text: &str) -> Result<(PauliLabel, usize, Basis)> {
        let symbols = text
            .trim()
            .chars()
            .map(|c| {
                Symbol::from_char(c)
                    .ok_or_else(|| Error::Parse { line: 0, msg: format!("bad label symbol '{c}' in '{text}'") })
            })
            .collect::<Result<Vec<_>>>()?;
        let (label, basis) = PauliLabel::from_symbols(&symbols)?;
        Ok((label, symbols.len(), basis))
    }

    pub fn render(self, n: usize, basis: Basis) -> String {
        (0..n).map(|k| self.symbol(k, basis).as_char()).collect()
    }

    /// Ordering used for human-facing output: by weight, then spin-major codes.
    pub(crate) fn display_key(self, n: usize) -> (u32, Vec<u8>) {
        let support: Vec<u8> = (0..n).map(|k| u8::from(self.code(k) == 0)).collect();
        let codes: Vec<u8> = (0..n).map(|k| self.code(k)).collect();
        (self.weight(), support.into_iter().chain(codes).collect())
    }
}
