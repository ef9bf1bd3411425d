use super::{ComplexMatrix, ComplexVector, C64, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<ComplexVector>,
}

/// Cyclic Jacobi diagonalisation of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary and then applies the ordinary real Jacobi rotation, so the
/// iteration never leaves the Hermitian manifold.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    let n = h.rows();
    let scale = h.frobenius_norm();
    let tolerance = 1e-10 * scale.max(f64::MIN_POSITIVE);
    let defect = h.hermiticity_defect()?;
    if defect > tolerance.max(1e-12) {
        return Err(Error::NotHermitian { deviation: defect, tolerance });
    }

    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q, scale);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors =
        order.iter().map(|&k| ComplexVector::from_vec_unchecked((0..n).map(|i| v[(i, k)]).collect())).collect();
    Ok(HermitianEigen { values, vectors })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, scale: f64) {
    let n = a.rows();
    let b = a[(p, q)];
    let b_abs = b.norm();
    if b_abs <= 1e-300 || b_abs <= 1e-18 * scale {
        return;
    }
    let phase = b / b_abs; // e^{iθ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * b_abs);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U = diag(.., 1, .., e^{-iθ}, ..) · R(c, s) restricted to (p, q)
    let u_pp = C64::from(c);
    let u_pq = C64::from(s);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * u_pp + aiq * u_qp;
        a[(i, q)] = aip * u_pq + aiq * u_qq;
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * u_pp + viq * u_qp;
        v[(i, q)] = vip * u_pq + viq * u_qq;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = u_pp.conj() * apj + u_qp.conj() * aqj;
        a[(q, j)] = u_pq.conj() * apj + u_qq.conj() * aqj;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::from(a[(p, p)].re);
    a[(q, q)] = C64::from(a[(q, q)].re);
}

/// Orthonormal basis of the (numerical) null space of a Hermitian matrix:
/// eigenvectors whose eigenvalue magnitude is below `tol * ‖h‖_F`.
pub fn kernel_basis(h: &ComplexMatrix, tol: f64) -> Result<Vec<ComplexVector>> {
    if !h.is_square() {
        return Err(Error::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "kernel tolerance must be positive"));
    }
    let norm = h.frobenius_norm();
    let defect = h.hermiticity_defect()?;
    if defect > tol * norm.max(1.0) {
        return Err(Error::NotHermitian { deviation: defect, tolerance: tol * norm.max(1.0) });
    }
    let n = h.rows();
    if norm == 0.0 {
        return Ok((0..n).map(|i| ComplexVector::basis(n, i)).collect());
    }
    let eig = hermitian_eigen(h)?;
    let cutoff = tol * norm;
    Ok(eig.values.iter().zip(eig.vectors).filter(|(lambda, _)| lambda.abs() < cutoff).map(|(_, v)| v).collect())
}

/// Largest singular value, from the top eigenvalue of `A†A`.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    let gram = a.dagger().matmul(a)?;
    let eig = hermitian_eigen(&gram)?;
    Ok(eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}
