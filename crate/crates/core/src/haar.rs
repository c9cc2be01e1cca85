//! The Haar state and its GNS space.

use nalgebra::Cholesky;
use serde::Serialize;

use crate::algebra::{AlgebraElement, Functional, QuantumGroup};
use crate::corep::CoRep;
use crate::error::{QgError, Result};
use crate::linalg::{self, CMat, CVec, C64, RANK_RTOL};

/// Diagnostics produced alongside the Haar state.
#[derive(Debug, Clone, Serialize)]
pub struct HaarDiagnostics {
    pub nullspace_dim: usize,
    pub invariance_residual: f64,
    pub gram_min_eigenvalue: f64,
    pub trace_residual: f64,
}

/// Solve `(ι⊗h)Δ(a) = (h⊗ι)Δ(a) = h(a)1` for `h` and normalize `h(1) = 1`.
pub fn haar_state(g: &QuantumGroup, tol: f64) -> Result<Functional> {
    haar_state_with_diagnostics(g, tol).map(|(h, _)| h)
}

/// The homogeneous invariance system, `2 dim²` rows over the coefficients of
/// `h`.
fn invariance_system(g: &QuantumGroup) -> CMat {
    let d = g.dim();
    let delta = g.delta();
    let unit = g.unit();
    let mut sys = CMat::zeros(2 * d * d, d);
    for j in 0..d {
        for a in 0..d {
            let row = j * d + a;
            for b in 0..d {
                // (ι⊗h)Δ(e_j), coefficient of e_a
                sys[(row, b)] += delta[(a * d + b, j)];
                // (h⊗ι)Δ(e_j), coefficient of e_a
                sys[(d * d + row, b)] += delta[(b * d + a, j)];
            }
            sys[(row, j)] -= unit.0[a];
            sys[(d * d + row, j)] -= unit.0[a];
        }
    }
    sys
}

pub fn haar_state_with_diagnostics(
    g: &QuantumGroup,
    tol: f64,
) -> Result<(Functional, HaarDiagnostics)> {
    let d = g.dim();
    let sys = invariance_system(g);
    let ns = linalg::nullspace(&sys, RANK_RTOL);
    if ns.ncols() != 1 {
        return Err(QgError::NonUniqueInvariant(ns.ncols()));
    }
    let raw = ns.column(0).into_owned();
    let h_one: C64 = raw.iter().zip(g.unit().0.iter()).map(|(x, u)| x * u).sum();
    if h_one.norm() < tol {
        return Err(QgError::NotAState(
            "invariant functional vanishes on 1".into(),
        ));
    }
    let h = Functional(raw / h_one);

    let invariance_residual = linalg::max_abs_vec(&(&sys * &h.0));
    let gram = gram_matrix(g, &h);
    let (eigs, _) = linalg::hermitian_eigen(&gram);
    let gram_min_eigenvalue = eigs.first().copied().unwrap_or(0.0);
    let hermitian_defect = linalg::max_abs(&(&gram - gram.adjoint()));
    if gram_min_eigenvalue < -tol || hermitian_defect > tol {
        return Err(QgError::NotAState(format!(
            "Gram matrix not positive semidefinite (min eigenvalue {gram_min_eigenvalue:.3e})"
        )));
    }
    let mut trace_residual: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let (a, b) = (g.basis(i), g.basis(j));
            let ab = h.eval(&g.mul_unchecked(&a, &b));
            let ba = h.eval(&g.mul_unchecked(&b, &a));
            trace_residual = trace_residual.max((ab - ba).norm());
        }
    }
    Ok((
        h,
        HaarDiagnostics {
            nullspace_dim: 1,
            invariance_residual,
            gram_min_eigenvalue,
            trace_residual,
        },
    ))
}

/// `G_ij = h(e_i* e_j)`.
pub fn gram_matrix(g: &QuantumGroup, h: &Functional) -> CMat {
    let d = g.dim();
    let mut gram = CMat::zeros(d, d);
    for i in 0..d {
        let ai = g.star_unchecked(&g.basis(i));
        for j in 0..d {
            gram[(i, j)] = h.eval(&g.mul_unchecked(&ai, &g.basis(j)));
        }
    }
    gram
}

/// The GNS triple `(H_h, π_h, ξ_h)` in an orthonormal basis of `H_h`.
#[derive(Debug, Clone)]
pub struct GnsSpace {
    pub gram: CMat,
    /// Maps algebra coefficients to orthonormal coordinates: the class of `a`
    /// in `H_h` is `onb * a`.
    pub onb: CMat,
    onb_inv: CMat,
    /// `π_h(e_i)` for every basis element.
    pub pi: Vec<CMat>,
    pub xi: CVec,
}

#[derive(Debug, Clone, Serialize)]
pub struct GnsResiduals {
    pub homomorphism: f64,
    pub star: f64,
    pub unit: f64,
    pub inner_product: f64,
    pub xi_norm_defect: f64,
}

impl GnsSpace {
    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    /// `π_h(a)ξ_h`, the class of `a` in `H_h`.
    pub fn vector(&self, a: &AlgebraElement) -> CVec {
        &self.onb * &a.0
    }

    /// `π_h(a)` as a matrix on `H_h`.
    pub fn pi_of(&self, a: &AlgebraElement) -> CMat {
        let n = self.dim();
        let mut m = CMat::zeros(n, n);
        for (i, p) in self.pi.iter().enumerate() {
            if a.0[i] != linalg::ZERO {
                m += p * a.0[i];
            }
        }
        m
    }

    /// Transport a matrix on algebra coefficients into the orthonormal basis.
    pub(crate) fn transport(&self, m: &CMat) -> CMat {
        &self.onb * m * &self.onb_inv
    }

    /// Residuals of the GNS invariants against `g` and `h`.
    pub fn residuals(&self, g: &QuantumGroup, h: &Functional) -> GnsResiduals {
        let d = g.dim();
        let mut homomorphism: f64 = 0.0;
        let mut inner: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let (a, b) = (g.basis(i), g.basis(j));
                let ab = g.mul_unchecked(&a, &b);
                homomorphism = homomorphism.max(linalg::max_abs(
                    &(self.pi_of(&ab) - &self.pi[i] * &self.pi[j]),
                ));
                let lhs = self.vector(&b).dotc(&self.vector(&a));
                let rhs = h.eval(&g.mul_unchecked(&g.star_unchecked(&b), &a));
                inner = inner.max((lhs - rhs).norm());
            }
        }
        let star = (0..d)
            .map(|i| {
                let s = g.star_unchecked(&g.basis(i));
                linalg::max_abs(&(self.pi_of(&s) - self.pi[i].adjoint()))
            })
            .fold(0.0, f64::max);
        let n = self.dim();
        let unit = linalg::max_abs(&(self.pi_of(&g.unit()) - CMat::identity(n, n)));
        GnsResiduals {
            homomorphism,
            star,
            unit,
            inner_product: inner,
            xi_norm_defect: (self.xi.norm() - 1.0).abs(),
        }
    }
}

/// Build `H_h` by Cholesky orthonormalization of the algebra basis with
/// respect to `⟨a, b⟩ = h(b* a)`.
pub fn gns_construct(g: &QuantumGroup, h: &Functional, tol: f64) -> Result<GnsSpace> {
    let gram = gram_matrix(g, h);
    let (eigs, _) = linalg::hermitian_eigen(&gram);
    let min_eig = eigs.first().copied().unwrap_or(0.0);
    if min_eig <= tol {
        return Err(QgError::GramNotPD(min_eig));
    }
    let herm = (&gram + gram.adjoint()).scale(0.5);
    let chol = Cholesky::new(herm).ok_or(QgError::GramNotPD(min_eig))?;
    // G = L L†, coordinates R = L† so that ⟨[a],[b]⟩ = b† G a
    let onb = chol.l().adjoint();
    let onb_inv = onb
        .clone()
        .try_inverse()
        .ok_or(QgError::GramNotPD(min_eig))?;
    let pi = (0..g.dim())
        .map(|i| &onb * g.left_mul_matrix(i) * &onb_inv)
        .collect();
    let xi = &onb * &g.unit().0;
    Ok(GnsSpace {
        gram,
        onb,
        onb_inv,
        pi,
        xi,
    })
}

/// Orthogonal projection onto `span{π_h(u_ij)ξ_h}` (all entries), or onto
/// `span{π_h(u_{row,i})ξ_h}` when `row` is given (0-based).
pub fn subspace_projection(gns: &GnsSpace, u: &CoRep, row: Option<usize>) -> Result<CMat> {
    if u.num_slices() != gns.pi.len() {
        return Err(QgError::ShapeMismatch(format!(
            "corepresentation over an algebra of dimension {}, GNS space of dimension {}",
            u.num_slices(),
            gns.pi.len()
        )));
    }
    if let Some(k) = row {
        if k >= u.d() {
            return Err(QgError::ShapeMismatch(format!(
                "row {k} out of range for a {}-dimensional corepresentation",
                u.d()
            )));
        }
    }
    let rows: Vec<usize> = match row {
        Some(k) => vec![k],
        None => (0..u.d()).collect(),
    };
    let mut cols = Vec::new();
    for &i in &rows {
        for j in 0..u.d() {
            cols.push(gns.vector(&u.entry(i, j)));
        }
    }
    Ok(linalg::projection_onto(
        &CMat::from_columns(&cols),
        RANK_RTOL,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_TOL;
    use crate::groups::{function_algebra, group_algebra, CayleyTable};
    use crate::linalg::{c, ONE};

    #[test]
    fn uniform_on_cz3() {
        let g = function_algebra(&CayleyTable::cyclic(3)).unwrap();
        let h = haar_state(&g, DEFAULT_TOL).unwrap();
        for x in h.0.iter() {
            assert!((x - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn delta_at_identity_on_group_algebra() {
        let t = CayleyTable::cyclic(3);
        let g = group_algebra(&t).unwrap();
        let h = haar_state(&g, DEFAULT_TOL).unwrap();
        for x in 0..3 {
            let lg = AlgebraElement(crate::groups::group_like(&t, x));
            let expected = if x == t.identity() { ONE } else { linalg::ZERO };
            assert!((h.eval(&lg) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn non_invariant_input_is_rejected() {
        // Δ = 0 makes every functional with h(1)·1 = 0 invariant
        let g = QuantumGroup::new(vec![1, 1], CMat::zeros(4, 2), None).unwrap();
        assert!(matches!(
            haar_state(&g, DEFAULT_TOL),
            Err(QgError::NonUniqueInvariant(_)) | Err(QgError::NotAState(_))
        ));
    }

    #[test]
    fn gns_of_cz2() {
        let g = function_algebra(&CayleyTable::cyclic(2)).unwrap();
        let h = haar_state(&g, DEFAULT_TOL).unwrap();
        let gns = gns_construct(&g, &h, DEFAULT_TOL).unwrap();
        assert_eq!(gns.dim(), 2);
        let inner = gns.vector(&g.basis(0)).dotc(&gns.vector(&g.basis(1)));
        assert!(inner.norm() < 1e-15);
        assert!((gns.xi.norm() - 1.0).abs() < 1e-14);
        let r = gns.residuals(&g, &h);
        assert!(r.homomorphism < 1e-12 && r.star < 1e-12 && r.inner_product < 1e-12);
    }

    #[test]
    fn non_faithful_state_rejected() {
        let g = function_algebra(&CayleyTable::cyclic(2)).unwrap();
        let point_mass = Functional(CVec::from_vec(vec![ONE, linalg::ZERO]));
        assert!(matches!(
            gns_construct(&g, &point_mass, DEFAULT_TOL),
            Err(QgError::GramNotPD(_))
        ));
    }

    #[test]
    fn trivial_corep_projects_onto_xi() {
        let g = function_algebra(&CayleyTable::cyclic(3)).unwrap();
        let h = haar_state(&g, DEFAULT_TOL).unwrap();
        let gns = gns_construct(&g, &h, DEFAULT_TOL).unwrap();
        let p = subspace_projection(&gns, &CoRep::trivial(&g), None).unwrap();
        let expected = &gns.xi * gns.xi.adjoint();
        assert!(linalg::max_abs(&(p - expected)) < 1e-12);
        assert!(subspace_projection(&gns, &CoRep::trivial(&g), Some(1)).is_err());
    }

    #[test]
    fn character_line_is_orthogonal_to_xi() {
        let g = function_algebra(&CayleyTable::cyclic(3)).unwrap();
        let h = haar_state(&g, DEFAULT_TOL).unwrap();
        let gns = gns_construct(&g, &h, DEFAULT_TOL).unwrap();
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let z = AlgebraElement(CVec::from_iterator(3, (0..3).map(|x| w.powu(x as u32))));
        let u = CoRep::one_dimensional(&z);
        let p = subspace_projection(&gns, &u, None).unwrap();
        assert_eq!(linalg::rank(&p, RANK_RTOL), 1);
        assert!(linalg::max_abs_vec(&(&p * &gns.xi)) < 1e-12);
    }
}
