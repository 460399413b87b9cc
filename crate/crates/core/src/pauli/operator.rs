use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use super::dense;
use super::label::{Basis, PauliLabel, Symbol, MAX_SPINS};
use crate::error::{Error, Result};

/// Default magnitude below which coefficients are dropped.
pub const DEFAULT_EPS: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Sparse linear combination of N-spin product operators.
///
/// Factors use the spin-1/2 normalization `I_w = σ_w / 2`. The identity
/// label stands for the scalar 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinOperator {
    n: usize,
    basis: Basis,
    terms: BTreeMap<PauliLabel, Complex64>,
    eps: f64,
}

/// Product of two Cartesian labels: `P_a P_b = phase * P_out`.
pub(crate) fn mul_labels(a: PauliLabel, b: PauliLabel) -> (PauliLabel, Complex64) {
    let (alo, ahi) = a.planes();
    let (blo, bhi) = b.planes();
    let out = PauliLabel::from_planes(alo ^ blo, ahi ^ bhi);
    let overlap = a.support() & b.support();
    let differ = ((alo ^ blo) | (ahi ^ bhi)) & overlap;
    let equal = overlap & !differ;
    let mut quarter_turns = 0u32;
    let mut bits = differ;
    while bits != 0 {
        let k = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let (u, v) = (a.code(k), b.code(k));
        // x->y->z->x is the positive cyclic order
        if v == u % 3 + 1 {
            quarter_turns += 1;
        } else {
            quarter_turns += 3;
        }
    }
    let mag = 0.25f64.powi(equal.count_ones() as i32) * 0.5f64.powi(differ.count_ones() as i32);
    let phase = match quarter_turns % 4 {
        0 => c(1.0),
        1 => I,
        2 => c(-1.0),
        _ => -I,
    };
    (out, phase * mag)
}

/// Whether two Cartesian labels commute.
pub(crate) fn labels_commute(a: PauliLabel, b: PauliLabel) -> bool {
    let (alo, ahi) = a.planes();
    let (blo, bhi) = b.planes();
    let differ = ((alo ^ blo) | (ahi ^ bhi)) & a.support() & b.support();
    differ.count_ones().is_multiple_of(2)
}

impl SpinOperator {
    fn empty(n: usize, basis: Basis) -> Self {
        assert!((1..=MAX_SPINS).contains(&n), "spin count {n} outside 1..={MAX_SPINS}");
        SpinOperator { n, basis, terms: BTreeMap::new(), eps: DEFAULT_EPS }
    }

    pub fn zero(n: usize) -> Self {
        Self::empty(n, Basis::Cartesian)
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, c(1.0))
    }

    pub fn scalar(n: usize, value: Complex64) -> Self {
        let mut op = Self::zero(n);
        op.accumulate(PauliLabel::IDENTITY, value);
        op
    }

    /// Single-spin factor `symbol` on `spin` (0-based), identity elsewhere.
    pub fn single(n: usize, spin: usize, symbol: Symbol) -> Self {
        assert!(spin < n, "spin {spin} out of range for {n} spins");
        let basis = symbol.basis().unwrap_or(Basis::Cartesian);
        let mut op = Self::empty(n, basis);
        op.accumulate(PauliLabel::IDENTITY.with_symbol(spin, symbol), c(1.0));
        op
    }

    pub fn ix(n: usize, spin: usize) -> Self {
        Self::single(n, spin, Symbol::X)
    }

    pub fn iy(n: usize, spin: usize) -> Self {
        Self::single(n, spin, Symbol::Y)
    }

    pub fn iz(n: usize, spin: usize) -> Self {
        Self::single(n, spin, Symbol::Z)
    }

    /// Raising operator `I+ = Ix + iIy`, stored in the spherical basis.
    pub fn i_plus(n: usize, spin: usize) -> Self {
        Self::single(n, spin, Symbol::Plus)
    }

    pub fn i_minus(n: usize, spin: usize) -> Self {
        Self::single(n, spin, Symbol::Minus)
    }

    /// Projector `E+ = ½(1 + 2Iz)` onto |0⟩ of `spin`.
    pub fn e_plus(n: usize, spin: usize) -> Self {
        Self::identity(n).scaled(c(0.5)) + Self::iz(n, spin)
    }

    /// Projector `E- = ½(1 - 2Iz)` onto |1⟩ of `spin`.
    pub fn e_minus(n: usize, spin: usize) -> Self {
        Self::identity(n).scaled(c(0.5)) - Self::iz(n, spin)
    }

    /// Single term from a label string such as `xz1y`.
    pub fn term(label: &str, coeff: Complex64) -> Result<Self> {
        let (label, n, basis) = PauliLabel::parse(label)?;
        let mut op = Self::empty(n, basis);
        op.accumulate(label, coeff);
        Ok(op)
    }

    /// Sum of `(label, coefficient)` pairs; all labels must agree in length and basis.
    pub fn from_terms<'a, It>(terms: It) -> Result<Self>
    where
        It: IntoIterator<Item = (&'a str, Complex64)>,
    {
        let mut acc: Option<SpinOperator> = None;
        for (label, coeff) in terms {
            let t = Self::term(label, coeff)?;
            acc = Some(match acc {
                None => t,
                Some(a) => a.try_add(&t)?,
            });
        }
        acc.ok_or_else(|| Error::InvalidArgument("no terms given".into()))
    }

    pub fn from_label_map(n: usize, basis: Basis, terms: impl IntoIterator<Item = (PauliLabel, Complex64)>) -> Self {
        let mut op = Self::empty(n, basis);
        for (l, v) in terms {
            op.accumulate(l, v);
        }
        op.prune_in_place();
        op
    }

    /// Sets the pruning threshold and applies it.
    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self.prune_in_place();
        self
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (PauliLabel, Complex64)> + '_ {
        self.terms.iter().map(|(l, v)| (*l, *v))
    }

    /// Terms in a stable human-facing order (identity first, then by weight).
    pub fn sorted_terms(&self) -> Vec<(PauliLabel, Complex64)> {
        let mut v: Vec<_> = self.terms().collect();
        v.sort_by_cached_key(|(l, _)| l.display_key(self.n));
        v
    }

    pub fn coeff(&self, label: PauliLabel) -> Complex64 {
        self.terms.get(&label).copied().unwrap_or_default()
    }

    /// Coefficient of a label given as text, e.g. `"xz1"`.
    pub fn coeff_of(&self, label: &str) -> Result<Complex64> {
        let (l, n, basis) = PauliLabel::parse(label)?;
        if n != self.n {
            return Err(Error::DimensionMismatch(self.n, n));
        }
        let has_transverse = l.transverse() != 0;
        if has_transverse && basis != self.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(self.coeff(l))
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coeff(PauliLabel::IDENTITY)
    }

    pub fn trace(&self) -> Complex64 {
        self.scalar_part() * 2f64.powi(self.n as i32)
    }

    pub(crate) fn accumulate(&mut self, label: PauliLabel, value: Complex64) {
        *self.terms.entry(label).or_default() += value;
    }

    fn prune_in_place(&mut self) {
        let eps = self.eps;
        self.terms.retain(|_, v| v.norm() > eps);
    }

    pub fn pruned(&self, eps: f64) -> Self {
        let mut out = self.clone();
        out.terms.retain(|_, v| v.norm() > eps);
        out
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= k;
        }
        out.prune_in_place();
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// Sum; the result takes the basis of `self`.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let other = other.in_basis(self.basis);
        let mut out = self.clone();
        for (l, v) in other.terms() {
            out.accumulate(l, v);
        }
        out.prune_in_place();
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scaled(c(-1.0)))
    }

    /// Exact operator product. Spherical operands are multiplied in the
    /// Cartesian basis and the result is returned in the basis of `self`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let a = self.in_basis(Basis::Cartesian);
        let b = other.in_basis(Basis::Cartesian);
        let mut out = Self::empty(self.n, Basis::Cartesian);
        out.eps = self.eps;
        for (la, va) in a.terms() {
            for (lb, vb) in b.terms() {
                let (l, ph) = mul_labels(la, lb);
                out.accumulate(l, va * vb * ph);
            }
        }
        out.prune_in_place();
        Ok(out.in_basis(self.basis))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.multiply(other)?.try_sub(&other.multiply(self)?)
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.multiply(other)?.try_add(&other.multiply(self)?)
    }

    /// Tensor product with an operator on additional spins appended after these.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        if n > MAX_SPINS {
            return Err(Error::SpinCount(n));
        }
        let a = self.in_basis(Basis::Cartesian);
        let b = other.in_basis(Basis::Cartesian);
        let mut out = Self::empty(n, Basis::Cartesian);
        for (la, va) in a.terms() {
            for (lb, vb) in b.terms() {
                let (blo, bhi) = lb.planes();
                let (alo, ahi) = la.planes();
                let l = PauliLabel::from_planes(alo | (blo << self.n), ahi | (bhi << self.n));
                out.accumulate(l, va * vb);
            }
        }
        out.prune_in_place();
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::empty(self.n, self.basis);
        out.eps = self.eps;
        for (l, v) in self.terms() {
            let l = match self.basis {
                Basis::Cartesian => l,
                Basis::Spherical => {
                    // + and - swap: exchange the two bit planes on transverse spins
                    let (lo, hi) = l.planes();
                    let t = lo ^ hi;
                    PauliLabel::from_planes(lo ^ t, hi ^ t)
                }
            };
            out.accumulate(l, v.conj());
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Largest coefficient difference after converting `other` to this basis.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        let other = other.in_basis(self.basis);
        let mut worst: f64 = 0.0;
        for (l, v) in self.terms() {
            worst = worst.max((v - other.coeff(l)).norm());
        }
        for (l, v) in other.terms() {
            if !self.terms.contains_key(&l) {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// `tr(self · rho)` without forming the product.
    pub fn expectation(&self, rho: &Self) -> Result<Complex64> {
        self.check_compatible(rho)?;
        let a = self.in_basis(Basis::Cartesian);
        let b = rho.in_basis(Basis::Cartesian);
        let mut s = Complex64::default();
        for (l, va) in a.terms() {
            let vb = b.coeff(l);
            if vb != Complex64::default() {
                s += va * vb * 0.25f64.powi(l.weight() as i32);
            }
        }
        Ok(s * 2f64.powi(self.n as i32))
    }

    /// Traces out every spin not in `keep` (0-based, any order; output keeps ascending order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::IndexClash(w[0] + 1));
            }
        }
        if let Some(&bad) = sorted.iter().find(|&&s| s >= self.n) {
            return Err(Error::SpinIndex { spin: bad, n: self.n });
        }
        let keep_mask: u64 = sorted.iter().fold(0, |m, &s| m | (1u64 << s));
        let factor = 2f64.powi((self.n - sorted.len()) as i32);
        let mut out = Self::empty(sorted.len(), self.basis);
        out.eps = self.eps;
        for (l, v) in self.terms() {
            if l.support() & !keep_mask != 0 {
                continue;
            }
            let mut nl = PauliLabel::IDENTITY;
            for (j, &s) in sorted.iter().enumerate() {
                nl = nl.with_code(j, l.code(s));
            }
            out.accumulate(nl, v * factor);
        }
        out.prune_in_place();
        Ok(out)
    }

    /// Relabels spins: spin `k` of `self` becomes spin `map[k]` of an `n`-spin operator.
    pub fn embed(&self, n: usize, map: &[usize]) -> Result<Self> {
        if map.len() != self.n {
            return Err(Error::DimensionMismatch(self.n, map.len()));
        }
        let mut seen = 0u64;
        for &m in map {
            if m >= n {
                return Err(Error::SpinIndex { spin: m, n });
            }
            if seen & (1 << m) != 0 {
                return Err(Error::IndexClash(m + 1));
            }
            seen |= 1 << m;
        }
        let mut out = Self::empty(n, self.basis);
        out.eps = self.eps;
        for (l, v) in self.terms() {
            let mut nl = PauliLabel::IDENTITY;
            for (k, &m) in map.iter().enumerate() {
                nl = nl.with_code(m, l.code(k));
            }
            out.accumulate(nl, v);
        }
        Ok(out)
    }

    pub fn in_basis(&self, basis: Basis) -> Self {
        match basis {
            Basis::Cartesian => self.to_cartesian(),
            Basis::Spherical => self.to_spherical(),
        }
    }

    /// Rewrites x/y factors as `Ix = ½(I+ + I-)`, `Iy = -(i/2)(I+ - I-)`.
    pub fn to_spherical(&self) -> Self {
        if self.basis == Basis::Spherical {
            return self.clone();
        }
        self.change_basis(Basis::Spherical, |code| match code {
            1 => [(1, c(0.5)), (2, c(0.5))],
            _ => [(1, -0.5 * I), (2, 0.5 * I)],
        })
    }

    /// Rewrites ± factors as `I± = Ix ± iIy`.
    pub fn to_cartesian(&self) -> Self {
        if self.basis == Basis::Cartesian {
            return self.clone();
        }
        self.change_basis(Basis::Cartesian, |code| match code {
            1 => [(1, c(1.0)), (2, I)],
            _ => [(1, c(1.0)), (2, -I)],
        })
    }

    fn change_basis(&self, target: Basis, rule: impl Fn(u8) -> [(u8, Complex64); 2]) -> Self {
        let mut out = Self::empty(self.n, target);
        out.eps = self.eps;
        for (l, v) in self.terms() {
            let mut partial = vec![(l, v)];
            let mut t = l.transverse();
            while t != 0 {
                let k = t.trailing_zeros() as usize;
                t &= t - 1;
                let code = l.code(k);
                partial = partial
                    .into_iter()
                    .flat_map(|(pl, pv)| rule(code).into_iter().map(move |(nc, f)| (pl.with_code(k, nc), pv * f)))
                    .collect();
            }
            for (pl, pv) in partial {
                out.accumulate(pl, pv);
            }
        }
        out.prune_in_place();
        out
    }

    /// Whether the operator is diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(|l| l.transverse() == 0)
    }

    /// `exp(-i·angle·G) · self · exp(+i·angle·G)` for Hermitian `G`.
    ///
    /// Generators whose terms commute pairwise are applied one product
    /// operator at a time in closed form; a generator squaring to a scalar
    /// uses `cos − i sin` directly; anything else goes through the dense
    /// eigendecomposition.
    pub fn conjugate(&self, generator: &Self, angle: f64) -> Result<Self> {
        self.check_compatible(generator)?;
        let g = generator.to_cartesian();
        if g.terms().any(|(_, v)| v.im.abs() > 1e-12 * v.norm().max(1.0)) {
            return Err(Error::NonHermitian);
        }
        // the scalar part only contributes a global phase
        let gen_terms: Vec<(PauliLabel, f64)> =
            g.terms().filter(|(l, _)| !l.is_identity()).map(|(l, v)| (l, v.re)).collect();
        if gen_terms.is_empty() || angle == 0.0 {
            return Ok(self.clone());
        }
        let commuting = gen_terms
            .iter()
            .enumerate()
            .all(|(i, (a, _))| gen_terms[i + 1..].iter().all(|(b, _)| labels_commute(*a, *b)));
        if commuting {
            let mut rho = self.to_cartesian();
            for (l, v) in &gen_terms {
                rho = rho.conjugate_single(*l, v * angle);
            }
            return Ok(rho.in_basis(self.basis));
        }
        let g = SpinOperator::from_label_map(self.n, Basis::Cartesian, gen_terms.iter().map(|(l, v)| (*l, c(*v))));
        let sq = g.multiply(&g)?;
        if sq.len() == 1 && sq.scalar_part().re > 0.0 {
            let gnorm = sq.scalar_part().re.sqrt();
            let (s, co) = (angle * gnorm).sin_cos();
            let ghat = g.scaled(c(1.0 / gnorm));
            let u = SpinOperator::identity(self.n).scaled(c(co)) - ghat.scaled(I * s);
            return self.unitary_conjugate(&u);
        }
        if self.n > dense::DEFAULT_DENSE_LIMIT {
            return Err(Error::DenseLimit { n: self.n, limit: dense::DEFAULT_DENSE_LIMIT });
        }
        let u = dense::expm_hermitian(&g.to_dense()?, -angle);
        let m = self.to_dense()?;
        let out = &u * m * u.adjoint();
        Ok(SpinOperator::from_dense(&out, self.n)?.with_eps(self.eps).in_basis(self.basis))
    }

    /// Conjugation by `exp(-i·alpha·P)` for a single Cartesian label `P`.
    fn conjugate_single(&self, p: PauliLabel, alpha: f64) -> Self {
        // P² = 4^{-w}; with Ĝ = 2^w P the exponent is alpha·2^{-w}·Ĝ
        let w = p.weight() as i32;
        let scale = 2f64.powi(w);
        let theta = 2.0 * alpha / scale;
        let (s, co) = theta.sin_cos();
        let mut out = Self::empty(self.n, Basis::Cartesian);
        out.eps = self.eps;
        for (l, v) in self.terms() {
            if labels_commute(p, l) {
                out.accumulate(l, v);
            } else {
                let (nl, ph) = mul_labels(p, l);
                out.accumulate(l, v * co);
                out.accumulate(nl, -I * s * scale * ph * v);
            }
        }
        out.prune_in_place();
        out
    }

    /// `U · self · U†` for an operator-valued `U`.
    pub fn unitary_conjugate(&self, u: &Self) -> Result<Self> {
        Ok(u.multiply(self)?.multiply(&u.adjoint())?.in_basis(self.basis))
    }

    pub fn to_dense(&self) -> Result<dense::Matrix> {
        dense::to_dense(self, dense::DEFAULT_DENSE_LIMIT)
    }

    pub fn from_dense(m: &dense::Matrix, n: usize) -> Result<Self> {
        dense::from_dense(m, n, dense::DEFAULT_DENSE_LIMIT)
    }

    /// Operator whose dense form is `Diag(diag)`.
    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        dense::from_diagonal(diag)
    }

    /// Computational-basis diagonal (length 2^N), spin 1 most significant.
    pub fn diagonal(&self) -> Result<Vec<Complex64>> {
        if self.n > 30 {
            return Err(Error::DenseLimit { n: self.n, limit: 30 });
        }
        let dim = 1usize << self.n;
        let mut d = vec![Complex64::default(); dim];
        for (l, v) in self.to_cartesian().terms() {
            if l.transverse() != 0 {
                continue;
            }
            let z = l.longitudinal();
            let w = 0.5f64.powi(z.count_ones() as i32);
            for (idx, slot) in d.iter_mut().enumerate() {
                let ones = (0..self.n).filter(|&k| z & (1 << k) != 0 && (idx >> (self.n - 1 - k)) & 1 == 1).count();
                let sign = if ones % 2 == 0 { 1.0 } else { -1.0 };
                *slot += v * (w * sign);
            }
        }
        Ok(d)
    }

    /// Matrix element ⟨row|self|col⟩ without building the dense matrix.
    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        let mut s = Complex64::default();
        for (l, v) in self.terms() {
            s += v * dense::label_element(l, self.n, self.basis, row, col);
        }
        s
    }
}

impl fmt::Display for SpinOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::text::write_text(self, f)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $call:ident) => {
        impl $tr<&SpinOperator> for &SpinOperator {
            type Output = SpinOperator;
            fn $m(self, rhs: &SpinOperator) -> SpinOperator {
                self.$call(rhs).expect("spin count mismatch")
            }
        }
        impl $tr<SpinOperator> for SpinOperator {
            type Output = SpinOperator;
            fn $m(self, rhs: SpinOperator) -> SpinOperator {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&SpinOperator> for SpinOperator {
            type Output = SpinOperator;
            fn $m(self, rhs: &SpinOperator) -> SpinOperator {
                (&self).$m(rhs)
            }
        }
        impl $tr<SpinOperator> for &SpinOperator {
            type Output = SpinOperator;
            fn $m(self, rhs: SpinOperator) -> SpinOperator {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, multiply);

impl AddAssign<&SpinOperator> for SpinOperator {
    fn add_assign(&mut self, rhs: &SpinOperator) {
        *self = &*self + rhs;
    }
}

impl Neg for SpinOperator {
    type Output = SpinOperator;
    fn neg(self) -> SpinOperator {
        self.scaled(c(-1.0))
    }
}

impl Neg for &SpinOperator {
    type Output = SpinOperator;
    fn neg(self) -> SpinOperator {
        self.scaled(c(-1.0))
    }
}

impl Mul<f64> for SpinOperator {
    type Output = SpinOperator;
    fn mul(self, k: f64) -> SpinOperator {
        self.scaled(c(k))
    }
}

impl Mul<f64> for &SpinOperator {
    type Output = SpinOperator;
    fn mul(self, k: f64) -> SpinOperator {
        self.scaled(c(k))
    }
}

impl Mul<Complex64> for SpinOperator {
    type Output = SpinOperator;
    fn mul(self, k: Complex64) -> SpinOperator {
        self.scaled(k)
    }
}

impl Mul<Complex64> for &SpinOperator {
    type Output = SpinOperator;
    fn mul(self, k: Complex64) -> SpinOperator {
        self.scaled(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(s: &str) -> SpinOperator {
        SpinOperator::term(s, c(1.0)).unwrap()
    }

    #[test]
    fn square_of_ix_is_quarter() {
        let p = op("x") * op("x");
        assert!(p.approx_eq(&SpinOperator::scalar(1, c(0.25)), 1e-15));
    }

    #[test]
    fn ix_iy_gives_half_i_iz() {
        let p = op("x") * op("y");
        assert!(p.approx_eq(&op("z").scaled(0.5 * I), 1e-15));
        let q = op("y") * op("x");
        assert!(q.approx_eq(&op("z").scaled(-0.5 * I), 1e-15));
    }

    #[test]
    fn commutation_relation() {
        let k = op("x").commutator(&op("y")).unwrap();
        assert!(k.approx_eq(&op("z").scaled(I), 1e-15));
        assert!(op("x1").commutator(&op("1y")).unwrap().is_empty());
    }

    #[test]
    fn scalar_part_of_projector_product() {
        let e = SpinOperator::e_plus(2, 0) * SpinOperator::e_plus(2, 1);
        assert!((e.scalar_part() - c(0.25)).norm() < 1e-15);
        assert!((e.trace() - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_projector() {
        let e = SpinOperator::e_plus(2, 0) * SpinOperator::e_plus(2, 1);
        let r = e.partial_trace(&[0]).unwrap();
        assert!(r.approx_eq(&SpinOperator::e_plus(1, 0), 1e-15));
        assert_eq!(e.partial_trace(&[]), Err(Error::EmptyKeep));
    }

    #[test]
    fn spherical_round_trip() {
        let a = op("xx");
        let s = a.to_spherical();
        assert_eq!(s.len(), 4);
        for (_, v) in s.terms() {
            assert!((v - c(0.25)).norm() < 1e-15);
        }
        assert!(s.to_cartesian().approx_eq(&a, 1e-15));
    }

    #[test]
    fn not_gate_on_projector() {
        let out = SpinOperator::e_plus(1, 0).conjugate(&op("x"), std::f64::consts::PI).unwrap();
        assert!(out.approx_eq(&SpinOperator::e_minus(1, 0), 1e-15));
    }

    #[test]
    fn antiphase_evolution() {
        let jt: f64 = 0.3;
        let rho = op("xz") * 4.0;
        let gen = op("zz") * 2.0;
        let out = rho.conjugate(&gen, std::f64::consts::PI * jt).unwrap();
        let expect = rho.scaled(c((std::f64::consts::PI * jt).cos()))
            + op("y1").scaled(c(2.0 * (std::f64::consts::PI * jt).sin()));
        assert!(out.approx_eq(&expect, 1e-14));
    }

    #[test]
    fn non_hermitian_generator_rejected() {
        let g = op("x").scaled(I);
        assert_eq!(op("z").conjugate(&g, 1.0), Err(Error::NonHermitian));
    }

    #[test]
    fn adjoint_swaps_spherical() {
        let p = SpinOperator::i_plus(1, 0);
        assert!(p.adjoint().approx_eq(&SpinOperator::i_minus(1, 0), 1e-15));
    }
}
