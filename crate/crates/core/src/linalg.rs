//! Dense linear algebra helpers on top of `nalgebra`.
//!
//! Hermitian inputs whose imaginary parts vanish are routed through the
//! real symmetric solver, which is several times faster.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

pub fn real_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.re)
}

pub fn complexify(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Largest entry of `|A - A*|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = if is_real(m) {
        real_part(m).symmetric_eigenvalues().iter().copied().collect()
    } else {
        m.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues (ascending) and matching unit eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (values, vectors) = if is_real(m) {
        let e = SymmetricEigen::new(real_part(m));
        (e.eigenvalues, complexify(&e.eigenvectors))
    } else {
        let e = SymmetricEigen::new(m.clone());
        (e.eigenvalues, e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted = order.iter().map(|&i| values[i]).collect();
    let cols: Vec<_> = order.iter().map(|&i| vectors.column(i).into_owned()).collect();
    let vecs = if cols.is_empty() {
        CMatrix::zeros(m.nrows(), 0)
    } else {
        CMatrix::from_columns(&cols)
    };
    (sorted, vecs)
}

/// `V diag(f(λ)) V*` for a Hermitian matrix.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    if is_real(m) {
        let e = SymmetricEigen::new(real_part(m));
        let d = e.eigenvalues.map(&f);
        let scaled = &e.eigenvectors * RMatrix::from_diagonal(&d);
        complexify(&(scaled * e.eigenvectors.transpose()))
    } else {
        let e = SymmetricEigen::new(m.clone());
        let d = e.eigenvalues.map(&f).map(|x| Complex64::new(x, 0.0));
        let scaled = &e.eigenvectors * CMatrix::from_diagonal(&d);
        scaled * e.eigenvectors.adjoint()
    }
}

/// Largest singular value of a dense matrix.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return 0.0;
    }
    let real = is_real(m);
    if m.is_square() && hermitian_defect(m) == 0.0 {
        let ev = if real {
            real_part(m).symmetric_eigenvalues()
        } else {
            m.clone().symmetric_eigenvalues()
        };
        return ev.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    }
    let sv = if real {
        real_part(m).singular_values()
    } else {
        m.clone().singular_values()
    };
    sv.iter().copied().fold(0.0, f64::max)
}

/// Top right singular pair `(σ, v)` of a dense matrix.
pub fn top_right_singular(m: &CMatrix) -> (f64, DVector<Complex64>) {
    let gram = m.adjoint() * m;
    let (values, vectors) = hermitian_eigen(&gram);
    let last = values.len() - 1;
    (values[last].max(0.0).sqrt(), vectors.column(last).into_owned())
}

/// Numerical rank: singular values above `rel_tol · σ_max`.
pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Settings for iterative norm estimation.
#[derive(Debug, Clone, Copy)]
pub struct PowerIteration {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration {
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

impl PowerIteration {
    /// `‖A‖` from repeated application of `A*A`, starting from a fixed
    /// deterministic vector.
    pub fn norm(&self, dim: usize, apply_gram: impl Fn(&[Complex64]) -> Vec<Complex64>) -> f64 {
        if dim == 0 {
            return 0.0;
        }
        // deterministic, generic start vector
        let mut v: Vec<Complex64> = (0..dim).map(|i| Complex64::new(1.0 + ((i * 7919) % 101) as f64 / 101.0, 0.0)).collect();
        normalize(&mut v);
        let mut estimate = 0.0;
        for _ in 0..self.max_iter {
            let mut w = apply_gram(&v);
            let lambda = vec_norm(&w);
            if lambda == 0.0 {
                return 0.0;
            }
            w.iter_mut().for_each(|z| *z /= lambda);
            let converged = (lambda - estimate).abs() <= self.tol * lambda.max(1e-300);
            estimate = lambda;
            v = w;
            if converged {
                break;
            }
        }
        estimate.sqrt()
    }
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) {
    let n = vec_norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}
