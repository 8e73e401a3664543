use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::DenseState;

/// Largest register for which mixed-state trace distances are computed.
pub const DENSITY_CAP: usize = 7;

/// Density operator stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn zeros(n: usize) -> Result<Self> {
        if n > DENSITY_CAP {
            return Err(Error::DenseCapExceeded { n, cap: DENSITY_CAP });
        }
        let dim = 1usize << n;
        Ok(Self { n, data: vec![Complex::new(T::zero(), T::zero()); dim * dim] })
    }

    pub(crate) fn from_raw(n: usize, data: Vec<Complex<T>>) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        if data.len() != m.data.len() {
            return Err(Error::DimensionMismatch { expected: m.data.len(), found: data.len() });
        }
        m.data = data;
        Ok(m)
    }

    /// `|ψ⟩⟨ψ|` for a normalised `ψ`.
    pub fn from_pure(psi: &DenseState<T>) -> Result<Self> {
        let mut m = Self::zeros(psi.num_qubits())?;
        m.add_pure(psi, T::one())?;
        Ok(m)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim() + col]
    }

    /// `ρ += weight·|ψ⟩⟨ψ|`.
    pub fn add_pure(&mut self, psi: &DenseState<T>, weight: T) -> Result<()> {
        if psi.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: psi.num_qubits() });
        }
        let dim = self.dim();
        let a = psi.amplitudes();
        for r in 0..dim {
            for c in 0..dim {
                self.data[r * dim + c] = self.data[r * dim + c] + a[r] * a[c].conj() * weight;
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: T) {
        for x in &mut self.data {
            *x = *x * factor;
        }
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).fold(T::zero(), |acc, i| acc + self.get(i, i).re)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, psi: &DenseState<T>) -> Result<T> {
        if psi.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: psi.num_qubits() });
        }
        let dim = self.dim();
        let a = psi.amplitudes();
        let mut acc = Complex::new(T::zero(), T::zero());
        for r in 0..dim {
            for c in 0..dim {
                acc = acc + a[r].conj() * self.data[r * dim + c] * a[c];
            }
        }
        Ok(acc.re)
    }

    /// Eigenvalues of the Hermitian matrix, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let dim = self.dim();
        let m = DMatrix::from_fn(dim, dim, |r, c| {
            let z = self.get(r, c);
            Complex::new(z.re.as_f64(), z.im.as_f64())
        });
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `½‖ρ − σ‖₁`, from the eigenvalues of the difference.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let diff = Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        };
        Ok(T::of(0.5 * diff.eigenvalues().iter().map(|l| l.abs()).sum::<f64>()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_distances() {
        let zero = DensityMatrix::from_pure(&DenseState::<f64>::zero(1).unwrap()).unwrap();
        let plus = DensityMatrix::from_pure(&DenseState::<f64>::plus(1).unwrap()).unwrap();
        let d = zero.trace_distance(&plus).unwrap();
        assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((zero.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_versus_pure() {
        let mut mixed = DensityMatrix::<f64>::zeros(1).unwrap();
        mixed.add_pure(&DenseState::zero(1).unwrap(), 0.5).unwrap();
        mixed.add_pure(&DenseState::basis(1, 1).unwrap(), 0.5).unwrap();
        let zero = DensityMatrix::from_pure(&DenseState::zero(1).unwrap()).unwrap();
        assert!((mixed.trace_distance(&zero).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cap_applies() {
        assert!(DensityMatrix::<f64>::zeros(DENSITY_CAP + 1).is_err());
    }
}
