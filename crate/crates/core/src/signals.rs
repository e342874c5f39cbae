//! Uniformly sampled signals and rational discrete-time filters.
//!
//! A `RationalFilter` is a ratio of polynomials in the unit-delay operator
//! `z^-1`, constant term first:
//!
//! ```text
//!            num[0] + num[1] z^-1 + ... + num[m] z^-m
//!   F(z^-1) = ----------------------------------------
//!            den[0] + den[1] z^-1 + ... + den[n] z^-n
//! ```
//!
//! Filtering runs the corresponding difference equation with zero initial
//! conditions, the convention for offline processing of logged records.

use crate::{Error, Result};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::Path;

/// Uniformly sampled scalar signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    /// Sampling time in seconds, > 0.
    pub ts: f64,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, ts: f64) -> Self {
        debug_assert!(ts > 0.0);
        TimeSeries { values, ts }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Elementwise difference; the two series must share length and ts.
    pub fn sub(&self, other: &TimeSeries) -> Result<TimeSeries> {
        check_aligned(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(TimeSeries::new(values, self.ts))
    }

    /// Two-column CSV: header `t,value`, t in seconds with 6 decimals,
    /// values with 9 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (k, v) in self.values.iter().enumerate() {
            let t = k as f64 * self.ts;
            writeln!(out, "{t:.6},{v:.8e}").unwrap();
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

fn check_aligned(a: &TimeSeries, b: &TimeSeries) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    debug_assert_eq!(a.ts, b.ts, "series combined arithmetically must share ts");
    Ok(())
}

/// Ratio of polynomials in z^-1, constant coefficients first.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFilter {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl RationalFilter {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Self {
        debug_assert!(!num.is_empty() && !den.is_empty());
        RationalFilter { num, den }
    }

    /// The identity filter 1/1.
    pub fn identity() -> Self {
        RationalFilter::new(vec![1.0], vec![1.0])
    }

    /// Product filter f*g (polynomial products of numerators and
    /// denominators); filtering with it equals filtering with f then g.
    pub fn product(&self, other: &RationalFilter) -> RationalFilter {
        RationalFilter::new(
            poly_mul(&self.num, &other.num),
            poly_mul(&self.den, &other.den),
        )
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Runs the difference equation
/// `y(k) = (1/den[0]) (sum_i num[i] x(k-i) - sum_{j>=1} den[j] y(k-j))`
/// with zero initial conditions. Output has the input's length and ts.
pub fn filter(f: &RationalFilter, x: &TimeSeries) -> Result<TimeSeries> {
    if f.den[0] == 0.0 {
        return Err(Error::ZeroLeadingDenominator);
    }
    let n = x.len();
    let mut y = vec![0.0; n];
    for k in 0..n {
        let mut acc = 0.0;
        for (i, &b) in f.num.iter().enumerate() {
            if i <= k {
                acc += b * x.values[k - i];
            }
        }
        for (j, &a) in f.den.iter().enumerate().skip(1) {
            if j <= k {
                acc -= a * y[k - j];
            }
        }
        let yk = acc / f.den[0];
        if !yk.is_finite() {
            return Err(Error::NonFinite { index: k });
        }
        y[k] = yk;
    }
    Ok(TimeSeries::new(y, x.ts))
}

/// Evaluates num(e^{-j omega ts}) / den(e^{-j omega ts}).
///
/// Valid for 0 <= omega <= pi/ts (up to Nyquist).
pub fn freq_response(f: &RationalFilter, omega: f64, ts: f64) -> Result<Complex64> {
    debug_assert!((0.0..=std::f64::consts::PI / ts + 1e-12).contains(&omega));
    let w = Complex64::from_polar(1.0, -omega * ts);
    let num = poly_eval(&f.num, w);
    let den = poly_eval(&f.den, w);
    if den.norm() < 1e-12 {
        return Err(Error::DenominatorZero { omega });
    }
    Ok(num / den)
}

fn poly_eval(coeffs: &[f64], w: Complex64) -> Complex64 {
    // Horner on the z^-1 polynomial, highest order first.
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
}

/// Root mean square of the pointwise difference, population divisor N.
pub fn rmse(a: &TimeSeries, b: &TimeSeries) -> Result<f64> {
    check_aligned(a, b)?;
    let n = a.len() as f64;
    let sum: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok((sum / n).sqrt())
}

/// Standard deviation of an error series, population divisor N.
pub fn sd(e: &TimeSeries) -> f64 {
    let n = e.len() as f64;
    let mean: f64 = e.values.iter().sum::<f64>() / n;
    let var: f64 = e.values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    var.sqrt()
}
