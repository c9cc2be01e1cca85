//! Corepresentations `u ∈ B(H) ⊗ A` and their calculus.
//!
//! A corepresentation of dimension `d` is stored by slices: `u = Σ_k U_k ⊗ e_k`
//! with one `d x d` matrix per basis element of `A`, so the matrix
//! coefficient `u_ij` has coefficients `(U_k)_ij`.

use serde::Serialize;

use crate::algebra::{AlgebraElement, Functional, QuantumGroup};
use crate::error::{QgError, Result};
use crate::linalg::{self, CMat, CVec, C64, ONE, RANK_RTOL, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct CoRep {
    d: usize,
    slices: Vec<CMat>,
}

impl CoRep {
    pub fn new(slices: Vec<CMat>) -> Result<Self> {
        let d = slices
            .first()
            .map(|m| m.nrows())
            .ok_or_else(|| QgError::ShapeMismatch("corepresentation without slices".into()))?;
        if slices.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(QgError::ShapeMismatch(
                "corepresentation slices must all be d x d".into(),
            ));
        }
        Ok(CoRep { d, slices })
    }

    /// Build from the matrix of coefficients `u_ij`.
    pub fn from_entries(entries: &[Vec<AlgebraElement>]) -> Result<Self> {
        let d = entries.len();
        let dim = entries
            .first()
            .and_then(|row| row.first())
            .map(AlgebraElement::dim)
            .ok_or_else(|| QgError::ShapeMismatch("empty corepresentation".into()))?;
        let mut slices = vec![CMat::zeros(d, d); dim];
        for (i, row) in entries.iter().enumerate() {
            if row.len() != d {
                return Err(QgError::ShapeMismatch("entry matrix is not square".into()));
            }
            for (j, a) in row.iter().enumerate() {
                if a.dim() != dim {
                    return Err(QgError::ShapeMismatch(
                        "entries from different algebras".into(),
                    ));
                }
                for (k, s) in slices.iter_mut().enumerate() {
                    s[(i, j)] = a.0[k];
                }
            }
        }
        CoRep::new(slices)
    }

    pub fn one_dimensional(z: &AlgebraElement) -> Self {
        CoRep {
            d: 1,
            slices: z.0.iter().map(|&x| CMat::from_element(1, 1, x)).collect(),
        }
    }

    /// `[1]`.
    pub fn trivial(g: &QuantumGroup) -> Self {
        CoRep::one_dimensional(&g.unit())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_slices(&self) -> usize {
        self.slices.len()
    }

    pub fn slices(&self) -> &[CMat] {
        &self.slices
    }

    pub fn entry(&self, i: usize, j: usize) -> AlgebraElement {
        AlgebraElement(CVec::from_iterator(
            self.slices.len(),
            self.slices.iter().map(|s| s[(i, j)]),
        ))
    }

    /// `(T⊗1) u (S⊗1)` for `T: d → m`, `S: n → d`.
    pub fn sandwich(&self, left: &CMat, right: &CMat) -> CoRep {
        CoRep {
            d: left.nrows(),
            slices: self.slices.iter().map(|s| left * s * right).collect(),
        }
    }

    /// Restriction to the span of the orthonormal columns of `q`.
    pub fn restrict(&self, q: &CMat) -> CoRep {
        self.sandwich(&q.adjoint(), q)
    }

    /// Apply a linear map of `A` (given on coefficients) entrywise.
    pub fn map_entries(&self, map: &CMat) -> CoRep {
        let mut slices = vec![CMat::zeros(self.d, self.d); self.slices.len()];
        for (cidx, s) in self.slices.iter().enumerate() {
            for (x, out) in slices.iter_mut().enumerate() {
                let w = map[(x, cidx)];
                if w != ZERO {
                    *out += s * w;
                }
            }
        }
        CoRep { d: self.d, slices }
    }

    /// `(id ⊗ π)u` for a representation `π` of `A` given on the basis.
    pub fn represent(&self, pi: &[CMat]) -> CMat {
        let n = pi[0].nrows();
        let mut out = CMat::zeros(self.d * n, self.d * n);
        for (s, p) in self.slices.iter().zip(pi) {
            if s.iter().any(|z| *z != ZERO) {
                out += s.kronecker(p);
            }
        }
        out
    }
}

/// `(u v)_ij = Σ_k u_ik v_kj` in `M_d(A)`.
pub fn product(g: &QuantumGroup, u: &CoRep, v: &CoRep) -> CoRep {
    let mut slices = vec![CMat::zeros(u.d, v.d); g.dim()];
    for &(x, y, e, m) in g.mul_nz() {
        slices[e] += &u.slices[x] * &v.slices[y] * m;
    }
    CoRep { d: u.d, slices }
}

/// `(u*)_ij = u_ji*`.
pub fn adjoint(g: &QuantumGroup, u: &CoRep) -> CoRep {
    let star = g.star_matrix();
    let mut slices = vec![CMat::zeros(u.d, u.d); g.dim()];
    for (cidx, s) in u.slices.iter().enumerate() {
        let sa = s.adjoint();
        for (x, out) in slices.iter_mut().enumerate() {
            let w = star[(x, cidx)];
            if w != ZERO {
                *out += &sa * w;
            }
        }
    }
    CoRep { d: u.d, slices }
}

/// `max ‖Δ(u_ij) − Σ_k u_ik ⊗ u_kj‖`.
pub fn corep_residual(g: &QuantumGroup, u: &CoRep) -> f64 {
    let d = g.dim();
    let delta = g.delta();
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let mut lhs = CMat::zeros(u.d, u.d);
            for (cidx, s) in u.slices.iter().enumerate() {
                let w = delta[(a * d + b, cidx)];
                if w != ZERO {
                    lhs += s * w;
                }
            }
            let rhs = &u.slices[a] * &u.slices[b];
            worst = worst.max(linalg::max_abs(&(lhs - rhs)));
        }
    }
    worst
}

/// `max(‖u*u − 1‖, ‖uu* − 1‖)`.
pub fn unitarity_residual(g: &QuantumGroup, u: &CoRep) -> f64 {
    let ua = adjoint(g, u);
    let unit = g.unit();
    let id = CMat::identity(u.d, u.d);
    [product(g, &ua, u), product(g, u, &ua)]
        .iter()
        .map(|p| {
            p.slices
                .iter()
                .enumerate()
                .map(|(e, s)| linalg::max_abs(&(s - &id * unit.0[e])))
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorepCheck {
    pub is_corep: bool,
    pub corep_residual: f64,
    pub is_unitary: bool,
    pub unitarity_residual: f64,
}

pub fn is_corep(g: &QuantumGroup, u: &CoRep, tol: f64) -> Result<CorepCheck> {
    if u.num_slices() != g.dim() {
        return Err(QgError::ShapeMismatch(format!(
            "corepresentation over dimension {}, algebra of dimension {}",
            u.num_slices(),
            g.dim()
        )));
    }
    let corep_residual = corep_residual(g, u);
    let unitarity_residual = unitarity_residual(g, u);
    Ok(CorepCheck {
        is_corep: corep_residual < tol,
        corep_residual,
        is_unitary: unitarity_residual < tol,
        unitarity_residual,
    })
}

/// Orthonormal (Frobenius) basis of `{T : (T⊗1)u = w(T⊗1)}`, each `T` of
/// shape `d_w x d_u`.
pub fn intertwiner_space(u: &CoRep, w: &CoRep) -> Vec<CMat> {
    let (du, dw) = (u.d, w.d);
    let n = du * dw;
    let id_u = CMat::identity(du, du);
    let id_w = CMat::identity(dw, dw);
    let mut blocks = Vec::new();
    for (us, ws) in u.slices.iter().zip(&w.slices) {
        if us.iter().all(|z| *z == ZERO) && ws.iter().all(|z| *z == ZERO) {
            continue;
        }
        blocks.push(us.transpose().kronecker(&id_w) - id_u.kronecker(ws));
    }
    let mut sys = CMat::zeros(blocks.len() * n, n);
    for (i, b) in blocks.iter().enumerate() {
        sys.rows_mut(i * n, n).copy_from(b);
    }
    let scale = u
        .slices
        .iter()
        .chain(&w.slices)
        .map(linalg::max_abs)
        .fold(0.0, f64::max);
    let ns = linalg::nullspace_with_floor(&sys, RANK_RTOL, scale);
    ns.column_iter()
        .map(|col| linalg::unvec(&col.into_owned(), dw, du))
        .collect()
}

/// `max ‖T U_k − W_k T‖` over slices.
pub fn intertwining_residual(t: &CMat, u: &CoRep, w: &CoRep) -> f64 {
    u.slices
        .iter()
        .zip(&w.slices)
        .map(|(us, ws)| linalg::max_abs(&(t * us - ws * t)))
        .fold(0.0, f64::max)
}

pub fn is_irreducible(u: &CoRep) -> bool {
    intertwiner_space(u, u).len() == 1
}

/// Unitary factor of an intertwiner, with the phase fixed so that the first
/// nonzero entry of the first column is real positive.
fn phased_polar(t: &CMat) -> Option<CMat> {
    let p = linalg::polar_unitary(t)?;
    let first = p.column(0).iter().copied().find(|z| z.norm() > 1e-8)?;
    Some(p * (first.conj() / first.norm()))
}

/// A unitary `U` with `(U⊗1)u = w(U⊗1)`, if `u` and `w` are equivalent
/// irreducibles.
pub fn equivalence(g: &QuantumGroup, u: &CoRep, w: &CoRep, tol: f64) -> Result<Option<CMat>> {
    for x in [u, w] {
        let r = unitarity_residual(g, x);
        if r >= tol {
            return Err(QgError::NotUnitary(r));
        }
    }
    if u.d != w.d {
        return Ok(None);
    }
    let basis = intertwiner_space(u, w);
    Ok(basis.first().and_then(phased_polar))
}

/// `ū = Σ m_ij ⊗ u_ij*`: the entry at `(i, j)` is `u_ij*`.
pub fn contragredient(g: &QuantumGroup, u: &CoRep) -> CoRep {
    let star = g.star_matrix();
    let mut slices = vec![CMat::zeros(u.d, u.d); g.dim()];
    for (cidx, s) in u.slices.iter().enumerate() {
        let sc = s.map(|z| z.conj());
        for (x, out) in slices.iter_mut().enumerate() {
            let w = star[(x, cidx)];
            if w != ZERO {
                *out += &sc * w;
            }
        }
    }
    CoRep { d: u.d, slices }
}

/// `χ = Σ_i u_ii`.
pub fn character(u: &CoRep) -> AlgebraElement {
    AlgebraElement(CVec::from_iterator(
        u.slices.len(),
        u.slices.iter().map(|s| s.trace()),
    ))
}

/// The positive intertwiner `F` from `u` to `(id⊗κ²)u`, normalized so that
/// `Tr F = Tr F⁻¹`, and `M = Tr F`.
pub fn f_matrix(u: &CoRep, antipode: &CMat, tol: f64) -> Result<(CMat, f64)> {
    let kappa2 = antipode * antipode;
    let ucc = u.map_entries(&kappa2);
    let basis = intertwiner_space(u, &ucc);
    if basis.len() != 1 {
        return Err(QgError::DegenerateIntertwiner(basis.len()));
    }
    let t = &basis[0];
    let tr = t.trace();
    if tr.norm() < tol {
        return Err(QgError::DegenerateIntertwiner(0));
    }
    let t = t * (tr.conj() / tr.norm());
    let herm = (&t + t.adjoint()).scale(0.5);
    let (eigs, _) = linalg::hermitian_eigen(&herm);
    if eigs.first().copied().unwrap_or(0.0) <= 0.0 {
        return Err(QgError::DegenerateIntertwiner(1));
    }
    let inv = herm
        .clone()
        .try_inverse()
        .ok_or(QgError::DegenerateIntertwiner(1))?;
    let scale = (inv.trace().re / herm.trace().re).sqrt();
    let f = herm.scale(scale);
    let m = f.trace().re;
    Ok((f, m))
}

/// An irreducible class `α`: a unitary representative and the data attached
/// to it.
#[derive(Debug, Clone)]
pub struct IrrepClass {
    pub id: usize,
    pub rep: CoRep,
    pub f: CMat,
    pub m: f64,
    pub character: AlgebraElement,
    /// `a_α = M_α (f_1 ∗ χ_α)*`.
    pub a_elem: AlgebraElement,
    pub conj_class_id: usize,
}

impl IrrepClass {
    pub fn d(&self) -> usize {
        self.rep.d()
    }
}

/// Find `β` with `ū ∼ u^β` and the unitary part of an intertwiner.
pub fn conjugate_rep(g: &QuantumGroup, u: &CoRep, irreps: &[CoRep]) -> Result<(usize, CMat)> {
    let ubar = contragredient(g, u);
    for (beta, rep) in irreps.iter().enumerate() {
        if rep.d() != u.d() {
            continue;
        }
        if let Some(t) = intertwiner_space(&ubar, rep).first() {
            let unitary = phased_polar(t).ok_or(QgError::NotFound)?;
            return Ok((beta, unitary));
        }
    }
    Err(QgError::NotFound)
}

/// The functionals `f_{±1}` fixed by `f_{±1}(u^α_ij) = (F_α^{±1})_ij` on the
/// basis of matrix coefficients.
pub fn modular_functionals(
    g: &QuantumGroup,
    reps: &[(&CoRep, &CMat)],
) -> Result<(Functional, Functional)> {
    let dim = g.dim();
    let found: usize = reps.iter().map(|(u, _)| u.d() * u.d()).sum();
    if found != dim {
        return Err(QgError::BasisIncomplete { found, dim });
    }
    let mut basis = CMat::zeros(dim, dim);
    let mut plus = CVec::zeros(dim);
    let mut minus = CVec::zeros(dim);
    let mut col = 0;
    for (u, f) in reps {
        let finv = (*f)
            .clone()
            .try_inverse()
            .ok_or(QgError::DegenerateIntertwiner(0))?;
        for i in 0..u.d() {
            for j in 0..u.d() {
                basis.set_column(col, &u.entry(i, j).0);
                plus[col] = f[(i, j)];
                minus[col] = finv[(i, j)];
                col += 1;
            }
        }
    }
    let lu = basis.transpose().lu();
    let solve = |t: &CVec| {
        lu.solve(t)
            .map(Functional)
            .ok_or(QgError::BasisIncomplete { found, dim })
    };
    Ok((solve(&plus)?, solve(&minus)?))
}

/// `a_α = M (f_1 ∗ χ)*`.
pub fn a_element(
    g: &QuantumGroup,
    chi: &AlgebraElement,
    f1: &Functional,
    m: f64,
) -> Result<AlgebraElement> {
    Ok(g.star(&g.convolve_fa(f1, chi)?)?.scale(C64::new(m, 0.0)))
}

/// Residuals of the orthogonality relations for a complete list of classes.
///
/// Families 3 and 4 are evaluated twice: with the `1/M_α` normalization as
/// commonly stated (`*_as_stated`), and with the normalization `1` that the
/// definition `a_α = M_α (f_1 ∗ χ_α)*` forces (families 1 and 2 summed over
/// the diagonal).
#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityReport {
    pub family1: f64,
    pub family2: f64,
    pub family3: f64,
    pub family4: f64,
    pub family3_as_stated: f64,
    pub family4_as_stated: f64,
    pub characters: f64,
    pub f_identity_defect: f64,
    pub m_minus_d: f64,
    pub pass: bool,
    pub pass_as_stated: bool,
}

pub fn orthogonality_check(
    g: &QuantumGroup,
    classes: &[IrrepClass],
    h: &Functional,
    f1: &Functional,
    fm1: &Functional,
    tol: f64,
) -> OrthogonalityReport {
    let hmul = |x: &AlgebraElement, y: &AlgebraElement| h.eval(&g.mul_unchecked(x, y));
    let star = |x: &AlgebraElement| g.star_unchecked(x);
    let delta = |p: usize, q: usize| if p == q { ONE } else { ZERO };
    let (mut f1r, mut f2r, mut f3r, mut f4r, mut f3s, mut f4s, mut chr) =
        (0f64, 0f64, 0f64, 0f64, 0f64, 0f64, 0f64);

    for alpha in classes {
        let (ua, da, inv_m) = (&alpha.rep, alpha.d(), 1.0 / alpha.m);
        let a_star = star(&alpha.a_elem);
        for beta in classes {
            let (ub, db) = (&beta.rep, beta.d());
            let same = if alpha.id == beta.id { ONE } else { ZERO };
            for m in 0..da {
                for k in 0..da {
                    let umk = ua.entry(m, k);
                    let ukm_star = star(&umk);
                    for n in 0..db {
                        for l in 0..db {
                            let unl = ub.entry(n, l);
                            // h(u^α_mk (u^β_nl)*) = δ_αβ δ_mn f_1(u^α_lk) / M_α
                            let lhs = hmul(&umk, &star(&unl));
                            let rhs = if same == ONE {
                                delta(m, n) * f1.eval(&ua.entry(l, k)) * inv_m
                            } else {
                                ZERO
                            };
                            f1r = f1r.max((lhs - rhs).norm());
                            // h((u^α_km)* u^β_ln) = δ_αβ δ_mn f_{-1}(u^α_lk) / M_α,
                            // with (k, m) = (m, k) relabelled onto the loop indices
                            let lhs = hmul(&ukm_star, &ub.entry(l, n));
                            let rhs = if same == ONE {
                                delta(k, n) * fm1.eval(&ua.entry(l, m)) * inv_m
                            } else {
                                ZERO
                            };
                            f2r = f2r.max((lhs - rhs).norm());
                        }
                    }
                }
            }
            for n in 0..db {
                for l in 0..db {
                    let unl = ub.entry(n, l);
                    let expected = same * delta(n, l);
                    let lhs3 = hmul(&alpha.a_elem, &unl);
                    let lhs4 = hmul(&star(&unl), &a_star);
                    f3r = f3r.max((lhs3 - expected).norm());
                    f4r = f4r.max((lhs4 - expected).norm());
                    f3s = f3s.max((lhs3 - expected * inv_m).norm());
                    f4s = f4s.max((lhs4 - expected * inv_m).norm());
                }
            }
            let lhs = hmul(&star(&alpha.character), &beta.character);
            chr = chr.max((lhs - same).norm());
        }
    }

    let f_identity_defect = classes
        .iter()
        .map(|c| linalg::max_abs(&(&c.f - CMat::identity(c.d(), c.d()))))
        .fold(0.0, f64::max);
    let m_minus_d = classes
        .iter()
        .map(|c| (c.m - c.d() as f64).abs())
        .fold(0.0, f64::max);
    let pass = [f1r, f2r, f3r, f4r, chr].iter().all(|&r| r < tol);
    let pass_as_stated = [f1r, f2r, f3s, f4s].iter().all(|&r| r < tol);
    OrthogonalityReport {
        family1: f1r,
        family2: f2r,
        family3: f3r,
        family4: f4r,
        family3_as_stated: f3s,
        family4_as_stated: f4s,
        characters: chr,
        f_identity_defect,
        m_minus_d,
        pass,
        pass_as_stated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_TOL;
    use crate::groups::{function_algebra, CayleyTable};

    fn zn_character(n: usize, k: usize) -> AlgebraElement {
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
        AlgebraElement(CVec::from_iterator(
            n,
            (0..n).map(|x| w.powu((k * x) as u32)),
        ))
    }

    #[test]
    fn trivial_is_unitary_corep() {
        let g = function_algebra(&CayleyTable::cyclic(3)).unwrap();
        let c = is_corep(&g, &CoRep::trivial(&g), DEFAULT_TOL).unwrap();
        assert!(c.is_corep && c.is_unitary);
        assert_eq!(character(&CoRep::trivial(&g)), g.unit());
        assert_eq!(contragredient(&g, &CoRep::trivial(&g)), CoRep::trivial(&g));
    }

    #[test]
    fn characters_of_z3() {
        let g = function_algebra(&CayleyTable::cyclic(3)).unwrap();
        let z1 = CoRep::one_dimensional(&zn_character(3, 1));
        let z2 = CoRep::one_dimensional(&zn_character(3, 2));
        assert!(is_corep(&g, &z1, DEFAULT_TOL).unwrap().is_corep);
        assert!(is_irreducible(&z1));
        assert!(intertwiner_space(&z1, &z2).is_empty());
        assert!(equivalence(&g, &z1, &z2, DEFAULT_TOL).unwrap().is_none());
        let u = equivalence(&g, &z1, &z1, DEFAULT_TOL).unwrap().unwrap();
        assert!((u[(0, 0)] - ONE).norm() < 1e-12);
        // z* = z^{n-1}
        let zbar = contragredient(&g, &z1);
        assert!(zbar.entry(0, 0).sub(&zn_character(3, 2)).norm_max() < 1e-12);
        let (beta, _) =
            conjugate_rep(&g, &z1, &[CoRep::trivial(&g), z1.clone(), z2.clone()]).unwrap();
        assert_eq!(beta, 2);
        assert!(matches!(
            conjugate_rep(&g, &z1, &[CoRep::trivial(&g)]),
            Err(QgError::NotFound)
        ));
    }

    #[test]
    fn zeroed_entry_breaks_corep_law() {
        let g = function_algebra(&CayleyTable::cyclic(3)).unwrap();
        let mut z = zn_character(3, 1);
        z.0[1] = ZERO;
        let c = is_corep(&g, &CoRep::one_dimensional(&z), DEFAULT_TOL).unwrap();
        assert!(!c.is_corep);
        assert!(c.corep_residual > 0.5);
    }

    #[test]
    fn non_unitary_rejected_by_equivalence() {
        let g = function_algebra(&CayleyTable::cyclic(2)).unwrap();
        let u = CoRep::one_dimensional(&g.unit().scale(C64::new(2.0, 0.0)));
        assert!(matches!(
            equivalence(&g, &u, &u, DEFAULT_TOL),
            Err(QgError::NotUnitary(_))
        ));
    }

    #[test]
    fn contragredient_twice_is_identity() {
        let g = function_algebra(&CayleyTable::cyclic(4)).unwrap();
        let u = CoRep::one_dimensional(&zn_character(4, 1));
        assert_eq!(contragredient(&g, &contragredient(&g, &u)), u);
    }

    #[test]
    fn f_matrix_of_trivial() {
        let g = function_algebra(&CayleyTable::cyclic(2)).unwrap();
        let eps = g.counit(DEFAULT_TOL).unwrap();
        let k = g.antipode(&eps, DEFAULT_TOL).unwrap();
        let (f, m) = f_matrix(&CoRep::trivial(&g), &k, DEFAULT_TOL).unwrap();
        assert!((f[(0, 0)] - ONE).norm() < 1e-12);
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch_on_foreign_corep() {
        let g = function_algebra(&CayleyTable::cyclic(2)).unwrap();
        let h = function_algebra(&CayleyTable::cyclic(3)).unwrap();
        assert!(is_corep(&g, &CoRep::trivial(&h), DEFAULT_TOL).is_err());
    }
}
