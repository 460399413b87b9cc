use std::ops::Deref;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dense;
use super::operator::SpinOperator;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// Unit trace: scalar part 2^{-N}.
    Full,
    /// The traceless ("hat") part only.
    Traceless,
}

/// A Hermitian operator with trace bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: SpinOperator,
    form: Form,
}

const TOL: f64 = 1e-12;

impl DensityOperator {
    /// Checks Hermiticity and the scalar part required by `form`.
    pub fn new(op: SpinOperator, form: Form) -> Result<Self> {
        if !op.is_hermitian(TOL) {
            return Err(Error::InvalidArgument("density operator must be Hermitian".into()));
        }
        let want = match form {
            Form::Full => 2f64.powi(-(op.n() as i32)),
            Form::Traceless => 0.0,
        };
        let got = op.scalar_part();
        if (got - Complex64::new(want, 0.0)).norm() > TOL {
            return Err(Error::InvalidArgument(format!("scalar part {got} does not match {form:?} form ({want})")));
        }
        Ok(DensityOperator { op, form })
    }

    /// Traceless part of any Hermitian operator.
    pub fn traceless(op: &SpinOperator) -> Result<Self> {
        let s = op.scalar_part();
        let hat = op - SpinOperator::scalar(op.n(), s);
        Self::new(hat, Form::Traceless)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        DensityOperator { op: SpinOperator::scalar(n, Complex64::new(2f64.powi(-(n as i32)), 0.0)), form: Form::Full }
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn op(&self) -> &SpinOperator {
        &self.op
    }

    pub fn into_op(self) -> SpinOperator {
        self.op
    }

    /// The traceless part.
    pub fn hat(&self) -> DensityOperator {
        match self.form {
            Form::Traceless => self.clone(),
            Form::Full => DensityOperator {
                op: &self.op - SpinOperator::scalar(self.op.n(), self.op.scalar_part()),
                form: Form::Traceless,
            },
        }
    }

    /// `2^{-N} + hat`.
    pub fn to_full(&self) -> DensityOperator {
        match self.form {
            Form::Full => self.clone(),
            Form::Traceless => DensityOperator {
                op: &self.op + SpinOperator::scalar(self.op.n(), Complex64::new(2f64.powi(-(self.op.n() as i32)), 0.0)),
                form: Form::Full,
            },
        }
    }

    pub fn conjugate(&self, generator: &SpinOperator, angle: f64) -> Result<Self> {
        Ok(DensityOperator { op: self.op.conjugate(generator, angle)?, form: self.form })
    }

    /// Applies a trace- and Hermiticity-preserving map to the underlying operator.
    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: FnOnce(&SpinOperator) -> Result<SpinOperator>,
    {
        Self::new(f(&self.op)?, self.form)
    }

    pub fn expectation(&self, obs: &SpinOperator) -> Result<Complex64> {
        obs.expectation(&self.op)
    }

    /// Smallest eigenvalue of the dense form is at least `-tol`.
    pub fn is_positive_semidefinite(&self, tol: f64) -> Result<bool> {
        let m = self.op.to_dense()?;
        let ev = dense::hermitian_eigenvalues(&m);
        Ok(ev.first().is_none_or(|&e| e >= -tol))
    }
}

impl Deref for DensityOperator {
    type Target = SpinOperator;
    fn deref(&self) -> &SpinOperator {
        &self.op
    }
}
