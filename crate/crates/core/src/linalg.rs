//! Small dense complex helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RVec = DVector<f64>;
pub type RMat = DMatrix<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Unit-variance circularly symmetric complex Gaussian sample.
pub fn cn01<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn cn01_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    // column-major fill keeps the draw order independent of nalgebra internals
    let mut m = CMat::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            m[(r, c)] = cn01(rng);
        }
    }
    m
}

/// `diag(d) * m`.
pub fn scale_rows(m: &CMat, d: &RVec) -> CMat {
    let mut out = m.clone();
    for (r, &s) in d.iter().enumerate() {
        out.row_mut(r).scale_mut(s);
    }
    out
}

/// `m * diag(d)`.
pub fn scale_cols(m: &CMat, d: &RVec) -> CMat {
    let mut out = m.clone();
    for (c, &s) in d.iter().enumerate() {
        out.column_mut(c).scale_mut(s);
    }
    out
}

/// Keeps only the diagonal of `m`.
pub fn diag_part(m: &CMat) -> CMat {
    CMat::from_diagonal(&m.diagonal())
}

/// `(m + m^H) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// `b b^H`, computed with real matrix products.
pub fn gram(b: &CMat) -> CMat {
    let re = b.map(|z| z.re);
    let im = b.map(|z| z.im);
    let real = &re * re.transpose() + &im * im.transpose();
    let imag = &im * re.transpose() - &re * im.transpose();
    CMat::from_fn(b.nrows(), b.nrows(), |r, c| Complex64::new(real[(r, c)], imag[(r, c)]))
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `||a - b||_F / max(||a||_F, ||b||_F)`, zero when both vanish.
pub fn rel_frobenius_err(a: &CMat, b: &CMat) -> f64 {
    let scale = frobenius(a).max(frobenius(b));
    if scale == 0.0 {
        0.0
    } else {
        frobenius(&(a - b)) / scale
    }
}

/// Relative error of two scalars with the same zero convention as [`rel_frobenius_err`].
pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// `Re(a^H b)` summed over all entries, i.e. `Re Tr(a^H b)`.
pub fn re_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// `Tr(a b)` without forming the product.
pub fn trace_of_product(a: &CMat, b: &CMat) -> Complex64 {
    assert_eq!(a.ncols(), b.nrows());
    assert_eq!(a.nrows(), b.ncols());
    let mut acc = ZERO;
    for k in 0..a.nrows() {
        for l in 0..a.ncols() {
            acc += a[(k, l)] * b[(l, k)];
        }
    }
    acc
}

/// Solves `C X = B` restricted to the `active` indices of a Hermitian positive
/// definite `C`; rows of the result outside `active` are zero.
pub fn masked_hpd_solve(c: &CMat, active: &[usize], rhs: &CMat) -> Result<CMat> {
    let n = active.len();
    let mut out = CMat::zeros(c.nrows(), rhs.ncols());
    if n == 0 {
        return Ok(out);
    }
    let sub = CMat::from_fn(n, n, |r, s| c[(active[r], active[s])]);
    let sub_rhs = CMat::from_fn(n, rhs.ncols(), |r, s| rhs[(active[r], s)]);
    let sol = match sub.clone().cholesky() {
        Some(ch) => ch.solve(&sub_rhs),
        None => sub
            .lu()
            .solve(&sub_rhs)
            .ok_or_else(|| Error::Numerical("singular interference covariance".into()))?,
    };
    for (r, &idx) in active.iter().enumerate() {
        for s in 0..rhs.ncols() {
            out[(idx, s)] = sol[(r, s)];
        }
    }
    Ok(out)
}
