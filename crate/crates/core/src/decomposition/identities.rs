//! Trace/diag identities used to rewrite the sum MSE as quadratic forms,
//! checked numerically on random complex instances.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{cn01_matrix, CMat, CVec};

pub const INSTANCES: usize = 100;
pub const TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub instances: usize,
    pub max_rel_err: f64,
    pub passed: bool,
}

fn cvec(n: usize, rng: &mut ChaCha8Rng) -> CVec {
    cn01_matrix(n, 1, rng).column(0).into_owned()
}

fn dot_h(a: &CVec, b: &CVec) -> Complex64 {
    a.dotc(b)
}

fn cerr(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// `sum_i x^H A_i x = Tr{(sum_i A_i) x x^H}`.
pub fn trace_cyclic_sum(a: &[CMat], x: &CVec) -> (Complex64, Complex64) {
    let lhs = a.iter().map(|ai| dot_h(x, &(ai * x))).sum();
    let total: CMat = a.iter().fold(CMat::zeros(x.len(), x.len()), |acc, ai| acc + ai);
    (lhs, (total * x * x.adjoint()).trace())
}

/// `Tr{diag(x x^H) A} = x^H diag(A) x`.
pub fn diag_trace(a: &CMat, x: &CVec) -> (Complex64, Complex64) {
    let xx = x * x.adjoint();
    let lhs = (CMat::from_diagonal(&xx.diagonal()) * a).trace();
    (lhs, dot_h(x, &(CMat::from_diagonal(&a.diagonal()) * x)))
}

/// `y^H diag(x) A diag(x) z = x^H (Diag(y^H) A Diag(z)) x`; needs real `x`.
pub fn diag_sandwich(a: &CMat, x: &CVec, y: &CVec, z: &CVec) -> (Complex64, Complex64) {
    let dx = CMat::from_diagonal(x);
    let lhs = dot_h(y, &(&dx * a * &dx * z));
    let inner = CMat::from_diagonal(&y.conjugate()) * a * CMat::from_diagonal(z);
    (lhs, dot_h(x, &(inner * x)))
}

/// `Tr{diag(x^*) A diag(y) B^T} = x^H (A ⊙ B) y`.
pub fn hadamard_trace(a: &CMat, b: &CMat, x: &CVec, y: &CVec) -> (Complex64, Complex64) {
    let lhs = (CMat::from_diagonal(&x.conjugate()) * a * CMat::from_diagonal(y) * b.transpose()).trace();
    (lhs, dot_h(x, &(a.component_mul(b) * y)))
}

fn run(name: &'static str, seed: u64, mut case: impl FnMut(&mut ChaCha8Rng) -> (Complex64, Complex64)) -> IdentityCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_rel_err = (0..INSTANCES).map(|_| {
        let (l, r) = case(&mut rng);
        cerr(l, r)
    }).fold(0.0, f64::max);
    IdentityCheck { name, instances: INSTANCES, max_rel_err, passed: max_rel_err <= TOLERANCE }
}

/// Runs all four identities on [`INSTANCES`] random instances each.
pub fn identity_suite() -> Vec<IdentityCheck> {
    let dim = |rng: &mut ChaCha8Rng| rng.random_range(1..=12usize);
    vec![
        run("trace-cyclic sum", 1, |rng| {
            let n = dim(rng);
            let count = rng.random_range(1..=5);
            let a: Vec<CMat> = (0..count).map(|_| cn01_matrix(n, n, rng)).collect();
            trace_cyclic_sum(&a, &cvec(n, rng))
        }),
        run("diag-trace", 2, |rng| {
            let n = dim(rng);
            diag_trace(&cn01_matrix(n, n, rng), &cvec(n, rng))
        }),
        run("diag-sandwich", 3, |rng| {
            let n = dim(rng);
            let x = CVec::from_fn(n, |_, _| Complex64::new(rng.random::<f64>(), 0.0));
            diag_sandwich(&cn01_matrix(n, n, rng), &x, &cvec(n, rng), &cvec(n, rng))
        }),
        run("hadamard-trace", 4, |rng| {
            let n = dim(rng);
            hadamard_trace(&cn01_matrix(n, n, rng), &cn01_matrix(n, n, rng), &cvec(n, rng), &cvec(n, rng))
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rel_err;

    #[test]
    fn suite_passes() {
        for c in identity_suite() {
            assert!(c.passed, "{c:?}");
            assert_eq!(c.instances, INSTANCES);
        }
    }

    #[test]
    fn diag_trace_identity_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = cvec(7, &mut rng);
        let (l, r) = diag_trace(&CMat::identity(7, 7), &x);
        assert!(rel_err(l.re, x.norm_squared()) < 1e-14 && rel_err(r.re, x.norm_squared()) < 1e-14);
    }

    #[test]
    fn hadamard_with_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (a, x, y) = (cn01_matrix(5, 5, &mut rng), cvec(5, &mut rng), cvec(5, &mut rng));
        let direct: Complex64 = (0..5).map(|k| x[k].conj() * a[(k, k)] * y[k]).sum();
        let (l, r) = hadamard_trace(&a, &CMat::identity(5, 5), &x, &y);
        assert!(cerr(l, direct) < 1e-13 && cerr(r, direct) < 1e-13);
    }

    #[test]
    fn diag_sandwich_six_by_six() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = CVec::from_fn(6, |_, _| Complex64::new(rng.random::<f64>(), 0.0));
        let (l, r) = diag_sandwich(&cn01_matrix(6, 6, &mut rng), &x, &cvec(6, &mut rng), &cvec(6, &mut rng));
        // evaluated element-wise as a third path
        assert!(cerr(l, r) < 1e-12);
    }

    #[test]
    fn diag_sandwich_needs_real_x() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = cvec(4, &mut rng);
        let (l, r) = diag_sandwich(&cn01_matrix(4, 4, &mut rng), &x, &cvec(4, &mut rng), &cvec(4, &mut rng));
        assert!(cerr(l, r) > 1e-6);
    }
}
