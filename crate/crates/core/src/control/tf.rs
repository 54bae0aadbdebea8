use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `N(s)/D(s)` with coefficients in descending powers of `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalTransferFunction {
    num: Vec<f64>,
    den: Vec<f64>,
}

fn trim(mut c: Vec<f64>) -> Vec<f64> {
    let lead = c
        .iter()
        .position(|v| *v != 0.0)
        .unwrap_or(c.len().saturating_sub(1));
    c.drain(..lead);
    c
}

/// Product of two polynomials in descending order.
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Horner evaluation at a complex point.
pub fn poly_eval(c: &[f64], s: Complex64) -> Complex64 {
    c.iter()
        .fold(Complex64::new(0.0, 0.0), |acc, v| acc * s + v)
}

/// Roots as eigenvalues of the companion matrix.
pub fn poly_roots(c: &[f64]) -> Vec<Complex64> {
    let c = trim(c.to_vec());
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    // Exact zero roots are peeled off so they come back exactly.
    let zeros = c.iter().rev().take_while(|v| **v == 0.0).count();
    let m = n - zeros;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if m > 0 {
        let mut comp = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            comp[(0, j)] = -c[j + 1] / c[0];
        }
        for i in 1..m {
            comp[(i, i - 1)] = 1.0;
        }
        roots.extend(comp.complex_eigenvalues().iter().copied());
    }
    roots
}

impl RationalTransferFunction {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        let num = trim(num);
        let den = trim(den);
        if den.is_empty() || den[0] == 0.0 {
            return Err(Error::InvalidInput(
                "denominator must have a nonzero leading coefficient".into(),
            ));
        }
        if num.is_empty() {
            return Err(Error::InvalidInput("numerator is empty".into()));
        }
        if num.len() > den.len() {
            return Err(Error::InvalidInput(format!(
                "improper transfer function: numerator degree {} exceeds denominator degree {}",
                num.len() - 1,
                den.len() - 1
            )));
        }
        if !num.iter().chain(&den).all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(
                "non-finite transfer function coefficient".into(),
            ));
        }
        Ok(RationalTransferFunction { num, den })
    }

    /// `k / (1 + tau·s)`
    pub fn first_order_lag(k: f64, tau: f64) -> Result<Self> {
        Self::new(vec![k], vec![tau, 1.0])
    }

    pub fn numerator(&self) -> &[f64] {
        &self.num
    }

    pub fn denominator(&self) -> &[f64] {
        &self.den
    }

    pub fn num_degree(&self) -> usize {
        self.num.len() - 1
    }

    pub fn den_degree(&self) -> usize {
        self.den.len() - 1
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        poly_eval(&self.num, s) / poly_eval(&self.den, s)
    }

    pub fn at_frequency(&self, omega: f64) -> Complex64 {
        self.eval(Complex64::new(0.0, omega))
    }

    pub fn zeros(&self) -> Vec<Complex64> {
        poly_roots(&self.num)
    }

    pub fn poles(&self) -> Vec<Complex64> {
        poly_roots(&self.den)
    }

    pub fn series(&self, other: &Self) -> Self {
        RationalTransferFunction {
            num: poly_mul(&self.num, &other.num),
            den: poly_mul(&self.den, &other.den),
        }
    }

    /// Value at `s = 0`; infinite when the denominator vanishes there.
    pub fn dc_gain(&self) -> f64 {
        let n = *self.num.last().unwrap();
        let d = *self.den.last().unwrap();
        if d == 0.0 {
            f64::INFINITY
        } else {
            n / d
        }
    }
}
