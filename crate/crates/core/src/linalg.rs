//! Dense complex linear algebra shared by every stage: nullspaces and ranks
//! through the SVD, Hermitian eigendecompositions, polar parts.

use nalgebra::{DMatrix, DVector, SymmetricEigen, QR, SVD};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Relative singular-value threshold used for every nullspace and rank.
pub const RANK_RTOL: f64 = 1e-8;

/// Eigenvalues closer than this belong to the same cluster.
pub const EIGENGAP_TOL: f64 = 1e-7;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest entry modulus, 0 for empty matrices.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Singular values sorted descending, with the matching right singular
/// vectors as columns of the returned matrix (always square, `ncols` wide).
fn sorted_svd(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.ncols();
    // Tall systems are compressed to their triangular factor first; padding
    // short systems with zero rows keeps the full right basis available.
    let work = if m.nrows() > 2 * n {
        QR::new(m.clone()).r()
    } else if m.nrows() < n {
        let mut padded = CMat::zeros(n, n);
        padded.rows_mut(0, m.nrows()).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = SVD::new(work, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut right = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        for r in 0..n {
            right[(r, col)] = v_t[(i, r)].conj();
        }
    }
    (values, right)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Numerical rank with threshold `rtol * sigma_max`.
pub fn rank(m: &CMat, rtol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rtol * top).count(),
        _ => 0,
    }
}

/// Orthonormal basis of the nullspace of `m`, as columns.
///
/// The basis is the trailing block of right singular vectors, so it is
/// deterministic for a given input.
pub fn nullspace(m: &CMat, rtol: f64) -> CMat {
    nullspace_with_floor(m, rtol, 0.0)
}

/// As [`nullspace`], but singular values below `rtol * floor` always count
/// as zero, so a system that is zero up to rounding keeps its full kernel.
pub fn nullspace_with_floor(m: &CMat, rtol: f64, floor: f64) -> CMat {
    let n = m.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return CMat::identity(n, n);
    }
    let (s, right) = sorted_svd(m);
    let top = s.first().copied().unwrap_or(0.0).max(floor);
    let r = if top > 0.0 {
        s.iter().filter(|&&x| x > rtol * top).count()
    } else {
        0
    };
    right.columns(r, n - r).into_owned()
}

/// Orthonormal basis of the column space of `m`.
pub fn range_basis(m: &CMat, rtol: f64) -> CMat {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let top = order
        .first()
        .map(|&i| svd.singular_values[i])
        .unwrap_or(0.0);
    let cols: Vec<CVec> = order
        .iter()
        .filter(|&&i| top > 0.0 && svd.singular_values[i] > rtol * top)
        .map(|&i| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        CMat::zeros(m.nrows(), 0)
    } else {
        CMat::from_columns(&cols)
    }
}

/// Orthogonal projection onto the column space of `m`.
pub fn projection_onto(m: &CMat, rtol: f64) -> CMat {
    let q = range_basis(m, rtol);
    &q * q.adjoint()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(herm);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<CVec> = order
        .iter()
        .map(|&i| normalize_phase(&eig.eigenvectors.column(i).into_owned()))
        .collect();
    let vectors = if cols.is_empty() {
        CMat::zeros(0, 0)
    } else {
        CMat::from_columns(&cols)
    };
    (values, vectors)
}

/// Rescale by a unit phase so the first entry with modulus above 1e-8 is
/// real positive.
pub fn normalize_phase(v: &CVec) -> CVec {
    match v.iter().find(|z| z.norm() > 1e-8) {
        Some(z) => v * (z.conj() / z.norm()),
        None => v.clone(),
    }
}

/// Group indices of ascending eigenvalues into clusters separated by gaps
/// larger than `gap`.
pub fn cluster_eigenvalues(values: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, &x) in values.iter().enumerate() {
        match clusters.last_mut() {
            Some(last) if (x - values[*last.last().unwrap()]).abs() <= gap => last.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    clusters
}

/// Inverse square root of a positive definite Hermitian matrix.
pub fn inv_sqrt_psd(m: &CMat) -> Option<CMat> {
    let (vals, vecs) = hermitian_eigen(m);
    if vals.iter().any(|&x| x <= 0.0) {
        return None;
    }
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&x| c(1.0 / x.sqrt(), 0.0)),
    ));
    Some(&vecs * d * vecs.adjoint())
}

/// Unitary factor of the polar decomposition `t = U |t|` of a square
/// invertible matrix.
pub fn polar_unitary(t: &CMat) -> Option<CMat> {
    let gram = t.adjoint() * t;
    inv_sqrt_psd(&gram).map(|s| t * s)
}

/// Least-squares solution of `a x = b` through the SVD.
pub fn lstsq(a: &CMat, b: &CMat) -> CMat {
    let svd = SVD::new(a.clone(), true, true);
    let top = svd.singular_values.max();
    svd.solve(b, RANK_RTOL * top.max(f64::MIN_POSITIVE))
        .expect("both singular subspaces were computed")
}

/// Convert a column-major vectorized matrix back to `rows x cols`.
pub fn unvec(v: &CVec, rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_rank_one() {
        let m = CMat::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE]);
        let ns = nullspace(&m, RANK_RTOL);
        assert_eq!(ns.ncols(), 1);
        assert!(max_abs(&(&m * &ns)) < 1e-14);
    }

    #[test]
    fn nullspace_of_wide_and_tall_systems() {
        let wide = CMat::from_row_slice(1, 3, &[ONE, ZERO, ZERO]);
        assert_eq!(nullspace(&wide, RANK_RTOL).ncols(), 2);
        let mut tall = CMat::zeros(9, 2);
        tall[(4, 0)] = ONE;
        assert_eq!(nullspace(&tall, RANK_RTOL).ncols(), 1);
        assert_eq!(nullspace(&CMat::zeros(3, 3), RANK_RTOL).ncols(), 3);
    }

    #[test]
    fn clusters_split_on_gaps() {
        let c = cluster_eigenvalues(&[0.0, 1e-9, 0.5, 0.5, 2.0], EIGENGAP_TOL);
        assert_eq!(c, vec![vec![0, 1], vec![2, 3], vec![4]]);
    }

    #[test]
    fn polar_of_scaled_unitary() {
        let u = CMat::from_row_slice(2, 2, &[ZERO, c(0.0, 1.0), ONE, ZERO]);
        let p = polar_unitary(&u.scale(3.0)).unwrap();
        assert!(max_abs(&(p - u)) < 1e-14);
    }

    #[test]
    fn eigen_sorted_and_phase_fixed() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        assert!(vecs[(0, 0)].im.abs() < 1e-14 && vecs[(0, 0)].re > 0.0);
    }
}
