//! Thomas algorithm for tridiagonal systems.

use crate::scalar::Real;

/// Tridiagonal matrix stored by diagonals. `lower[0]` and `upper[n-1]` are unused.
#[derive(Debug, Clone)]
pub struct Tridiagonal<T> {
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![T::zero(); n],
            diag: vec![T::zero(); n],
            upper: vec![T::zero(); n],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[T], y: &mut [T]) {
        let n = self.len();
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.lower[i] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.upper[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    /// Solves `A x = rhs` in place. Returns the index of a vanishing pivot on failure.
    pub fn solve_in_place(&self, rhs: &mut [T], scratch: &mut Vec<T>) -> Result<(), usize> {
        let n = self.len();
        scratch.clear();
        scratch.resize(n, T::zero());
        let tiny = T::min_positive_value();
        let mut pivot = self.diag[0];
        if pivot.abs() <= tiny || !pivot.is_finite() {
            return Err(0);
        }
        rhs[0] /= pivot;
        for i in 1..n {
            scratch[i] = self.upper[i - 1] / pivot;
            pivot = self.diag[i] - self.lower[i] * scratch[i];
            if pivot.abs() <= tiny || !pivot.is_finite() {
                return Err(i);
            }
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            let next = rhs[i + 1];
            rhs[i] -= scratch[i + 1] * next;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn solves_poisson_matrix() {
        let n = 5;
        let mut a = Tridiagonal::<f64>::zeros(n);
        for i in 0..n {
            a.diag[i] = 2.0;
            a.lower[i] = -1.0;
            a.upper[i] = -1.0;
        }
        let x: Vec<f64> = (0..n).map(|i| i as f64 + 1.0).collect();
        let mut b = vec![0.0; n];
        a.apply(&x, &mut b);
        let mut scratch = Vec::new();
        a.solve_in_place(&mut b, &mut scratch).unwrap();
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_pivot_reported() {
        let mut a = Tridiagonal::<f64>::zeros(3);
        a.diag = vec![1.0, 0.0, 1.0];
        let mut b = vec![1.0; 3];
        assert_eq!(a.solve_in_place(&mut b, &mut Vec::new()), Err(1));
    }

    proptest! {
        #[test]
        fn diagonally_dominant_round_trip(
            coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -5.0f64..5.0), 3..40)
        ) {
            let n = coeffs.len();
            let mut a = Tridiagonal::zeros(n);
            let mut x = vec![0.0; n];
            for (i, (l, u, v)) in coeffs.iter().enumerate() {
                a.lower[i] = *l;
                a.upper[i] = *u;
                a.diag[i] = 2.5 + l.abs() + u.abs();
                x[i] = *v;
            }
            let mut b = vec![0.0; n];
            a.apply(&x, &mut b);
            a.solve_in_place(&mut b, &mut Vec::new()).unwrap();
            for (u, v) in b.iter().zip(&x) {
                prop_assert!((u - v).abs() < 1e-10);
            }
        }
    }
}
