//! Small dense complex matrices, row-major.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    pub dim: usize,
    /// Row-major entries; `data[r * dim + c]`.
    #[serde(with = "complex_vec")]
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        let mut m = Self::identity(dim);
        m.scale_mut(s);
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.dim + c] = v;
    }

    #[inline]
    pub fn add_at(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.dim + c] += v;
    }

    pub fn scale_mut(&mut self, s: f64) {
        for z in &mut self.data {
            *z *= s;
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        CMatrix { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.norm() <= tol)
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        let n = m.nrows();
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[r * n + c] = m[(r, c)];
            }
        }
        out
    }

    pub fn singular_values(&self) -> Vec<f64> {
        if self.dim == 0 {
            return Vec::new();
        }
        self.to_nalgebra().singular_values().iter().copied().collect()
    }

    pub fn min_singular_value(&self) -> f64 {
        self.singular_values().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.to_nalgebra()
            .try_inverse()
            .map(|m| Self::from_nalgebra(&m))
            .ok_or_else(|| Error::Numerical("matrix is singular".into()))
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

/// Serializes complex vectors as `[[re, im], ...]`.
pub mod complex_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}
