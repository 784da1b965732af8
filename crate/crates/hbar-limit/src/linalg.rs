//! Thin wrappers over faer so call sites stay readable.

use faer::linalg::solvers::Solve;
use faer::{c64, Accum, Mat, MatRef, Side};

use crate::{Error, Result};

fn par() -> faer::Par {
    faer::get_global_parallelism()
}

pub(crate) fn mul(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    faer::linalg::matmul::matmul(out.as_mut(), Accum::Replace, a, b, c64::new(1.0, 0.0), par());
    out
}

/// a * b^H
pub(crate) fn mul_adj(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    let mut out = Mat::zeros(a.nrows(), b.nrows());
    faer::linalg::matmul::matmul(
        out.as_mut(),
        Accum::Replace,
        a,
        b.adjoint(),
        c64::new(1.0, 0.0),
        par(),
    );
    out
}

/// a^H * b
pub(crate) fn adj_mul(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    let mut out = Mat::zeros(a.ncols(), b.ncols());
    faer::linalg::matmul::matmul(
        out.as_mut(),
        Accum::Replace,
        a.adjoint(),
        b,
        c64::new(1.0, 0.0),
        par(),
    );
    out
}

/// dst += a * b^H
pub(crate) fn add_mul_adj(dst: &mut Mat<c64>, a: MatRef<'_, c64>, b: MatRef<'_, c64>) {
    faer::linalg::matmul::matmul(
        dst.as_mut(),
        Accum::Add,
        a,
        b.adjoint(),
        c64::new(1.0, 0.0),
        par(),
    );
}

pub(crate) fn adjoint(a: MatRef<'_, c64>) -> Mat<c64> {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].conj())
}

/// Eigenvalues ascending and eigenvectors of a Hermitian matrix.
pub(crate) fn hermitian_eigen(a: MatRef<'_, c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let values = (0..a.nrows()).map(|i| evd.S()[i].re).collect();
    Ok((values, evd.U().to_owned()))
}

pub(crate) fn hermitian_eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))
}

pub(crate) fn real_symmetric_eigen(a: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let values = (0..a.nrows()).map(|i| evd.S()[i]).collect();
    Ok((values, evd.U().to_owned()))
}


/// Largest singular value.
pub(crate) fn spectral_norm(a: MatRef<'_, c64>) -> Result<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0.0);
    }
    let s = a.singular_values().map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    Ok(s.into_iter().fold(0.0, f64::max))
}

pub(crate) fn solve(a: MatRef<'_, c64>, rhs: MatRef<'_, c64>) -> Mat<c64> {
    a.partial_piv_lu().solve(rhs)
}

pub(crate) fn frobenius(a: MatRef<'_, c64>) -> f64 {
    a.norm_l2()
}

#[cfg(test)]
pub(crate) fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    let mut m = 0.0_f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}
