//! Finite-dimensional C*-algebras in multi-matrix form together with a
//! comultiplication, and the axioms of a compact quantum group.
//!
//! The algebra `A = M_{n_1} ⊕ ... ⊕ M_{n_r}` uses the matrix-unit basis
//! `e^{(b)}_{pq}`, ordered block by block and row-major inside a block.
//! `A ⊗ A` uses the Kronecker-ordered basis: `e_a ⊗ e_b` has index
//! `a * dim + b`.

use serde::Serialize;

use crate::error::{QgError, Result};
use crate::linalg::{self, CMat, CVec, C64, ONE, ZERO};

/// Default absolute tolerance on residuals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// An element of `A`, as coefficients in the matrix-unit basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement(pub CVec);

impl AlgebraElement {
    pub fn zeros(dim: usize) -> Self {
        AlgebraElement(CVec::zeros(dim))
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = CVec::zeros(dim);
        v[i] = ONE;
        AlgebraElement(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &CVec {
        &self.0
    }

    pub fn scale(&self, s: C64) -> Self {
        AlgebraElement(&self.0 * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        AlgebraElement(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        AlgebraElement(&self.0 - &other.0)
    }

    pub fn norm_max(&self) -> f64 {
        linalg::max_abs_vec(&self.0)
    }
}

/// A linear functional on `A`: `coeffs[i]` is its value on the `i`-th basis
/// element.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional(pub CVec);

impl Functional {
    pub fn eval(&self, a: &AlgebraElement) -> C64 {
        self.0.iter().zip(a.0.iter()).map(|(f, x)| f * x).sum()
    }

    pub fn coeffs(&self) -> &CVec {
        &self.0
    }

    /// Evaluation at the `i`-th basis element.
    pub fn dual_basis(dim: usize, i: usize) -> Self {
        Functional(AlgebraElement::basis(dim, i).0)
    }
}

/// A finite-dimensional compact quantum group `(A, Δ)`.
#[derive(Debug, Clone)]
pub struct QuantumGroup {
    name: Option<String>,
    dim: usize,
    blocks: Vec<usize>,
    /// Dense structure constants, `mul_tensor[(i * dim + j) * dim + k]` is the
    /// coefficient of `e_k` in `e_i e_j`.
    mul_tensor: Vec<C64>,
    /// Nonzero structure constants `(i, j, k, value)`.
    mul_nz: Vec<(usize, usize, usize, C64)>,
    /// `a* = star_matrix * conj(a)`.
    star_matrix: CMat,
    unit: CVec,
    /// `dim^2 x dim`, column `j` holds `Δ(e_j)` in the Kronecker basis.
    delta: CMat,
}

impl QuantumGroup {
    pub fn new(blocks: Vec<usize>, delta: CMat, name: Option<String>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(QgError::ShapeMismatch(
                "blocks must be a nonempty list of positive sizes".into(),
            ));
        }
        let dim: usize = blocks.iter().map(|n| n * n).sum();
        if delta.nrows() != dim * dim || delta.ncols() != dim {
            return Err(QgError::ShapeMismatch(format!(
                "delta is {}x{}, expected {}x{} for blocks {:?}",
                delta.nrows(),
                delta.ncols(),
                dim * dim,
                dim,
                blocks
            )));
        }

        let mut mul_tensor = vec![ZERO; dim * dim * dim];
        let mut mul_nz = Vec::new();
        let mut star_matrix = CMat::zeros(dim, dim);
        let mut unit = CVec::zeros(dim);
        let mut offset = 0;
        for &n in &blocks {
            let idx = |p: usize, q: usize| offset + p * n + q;
            for p in 0..n {
                unit[idx(p, p)] = ONE;
                for q in 0..n {
                    star_matrix[(idx(q, p), idx(p, q))] = ONE;
                    for s in 0..n {
                        // e_pq e_qs = e_ps
                        let (i, j, k) = (idx(p, q), idx(q, s), idx(p, s));
                        mul_tensor[(i * dim + j) * dim + k] = ONE;
                        mul_nz.push((i, j, k, ONE));
                    }
                }
            }
            offset += n * n;
        }

        Ok(QuantumGroup {
            name,
            dim,
            blocks,
            mul_tensor,
            mul_nz,
            star_matrix,
            unit,
            delta,
        })
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn delta(&self) -> &CMat {
        &self.delta
    }

    pub fn star_matrix(&self) -> &CMat {
        &self.star_matrix
    }

    pub fn mul_tensor(&self) -> &[C64] {
        &self.mul_tensor
    }

    pub(crate) fn mul_nz(&self) -> &[(usize, usize, usize, C64)] {
        &self.mul_nz
    }

    pub fn unit(&self) -> AlgebraElement {
        AlgebraElement(self.unit.clone())
    }

    pub fn basis(&self, i: usize) -> AlgebraElement {
        AlgebraElement::basis(self.dim, i)
    }

    /// Replace the comultiplication, keeping the algebra.
    pub fn with_delta(&self, delta: CMat) -> Result<Self> {
        QuantumGroup::new(self.blocks.clone(), delta, self.name.clone())
    }

    fn check(&self, a: &AlgebraElement) -> Result<()> {
        if a.dim() != self.dim {
            return Err(QgError::ShapeMismatch(format!(
                "element of length {} in an algebra of dimension {}",
                a.dim(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub(crate) fn mul_unchecked(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let mut out = CVec::zeros(self.dim);
        for &(i, j, k, m) in &self.mul_nz {
            out[k] += a.0[i] * b.0[j] * m;
        }
        AlgebraElement(out)
    }

    pub fn star(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(a)?;
        Ok(self.star_unchecked(a))
    }

    pub(crate) fn star_unchecked(&self, a: &AlgebraElement) -> AlgebraElement {
        AlgebraElement(&self.star_matrix * a.0.map(|z| z.conj()))
    }

    /// `Δ(a)` as a Kronecker-ordered vector in `A ⊗ A`.
    pub fn comultiply(&self, a: &AlgebraElement) -> CVec {
        &self.delta * &a.0
    }

    /// Product in `A ⊗ A`.
    pub fn tensor_mul(&self, x: &CVec, y: &CVec) -> CVec {
        let d = self.dim;
        let mut out = CVec::zeros(d * d);
        for &(a, a2, c1, m1) in &self.mul_nz {
            for &(b, b2, c2, m2) in &self.mul_nz {
                let xv = x[a * d + b];
                if xv == ZERO {
                    continue;
                }
                out[c1 * d + c2] += xv * y[a2 * d + b2] * m1 * m2;
            }
        }
        out
    }

    /// Involution in `A ⊗ A`.
    pub fn tensor_star(&self, x: &CVec) -> CVec {
        let s = self.star_matrix.kronecker(&self.star_matrix);
        s * x.map(|z| z.conj())
    }

    /// `f ∗ a = (ι ⊗ f)Δ(a)`.
    pub fn convolve_fa(&self, f: &Functional, a: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(a)?;
        self.check(&AlgebraElement(f.0.clone()))?;
        let d = self.dim;
        let da = self.comultiply(a);
        let mut out = CVec::zeros(d);
        for i in 0..d {
            for k in 0..d {
                out[i] += da[i * d + k] * f.0[k];
            }
        }
        Ok(AlgebraElement(out))
    }

    /// `a ∗ f = (f ⊗ ι)Δ(a)`.
    pub fn convolve_af(&self, a: &AlgebraElement, f: &Functional) -> Result<AlgebraElement> {
        self.check(a)?;
        self.check(&AlgebraElement(f.0.clone()))?;
        let d = self.dim;
        let da = self.comultiply(a);
        let mut out = CVec::zeros(d);
        for i in 0..d {
            for k in 0..d {
                out[k] += da[i * d + k] * f.0[i];
            }
        }
        Ok(AlgebraElement(out))
    }

    /// Left multiplication by `e_i` as a matrix on coefficient vectors.
    pub(crate) fn left_mul_matrix(&self, i: usize) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for &(a, j, k, val) in &self.mul_nz {
            if a == i {
                m[(k, j)] += val;
            }
        }
        m
    }

    /// The counit: the functional with `(ι⊗ε)Δ = (ε⊗ι)Δ = id`, recovered by
    /// a least-squares solve and rejected if the residual exceeds `tol`.
    pub fn counit(&self, tol: f64) -> Result<Functional> {
        let d = self.dim;
        // rows (side, a, j), unknowns ε_b
        let mut sys = CMat::zeros(2 * d * d, d);
        let mut rhs = CMat::zeros(2 * d * d, 1);
        for j in 0..d {
            for a in 0..d {
                let row = a * d + j;
                for b in 0..d {
                    sys[(row, b)] = self.delta[(a * d + b, j)];
                    sys[(d * d + row, b)] = self.delta[(b * d + a, j)];
                }
                if a == j {
                    rhs[(row, 0)] = ONE;
                    rhs[(d * d + row, 0)] = ONE;
                }
            }
        }
        let eps = linalg::lstsq(&sys, &rhs);
        let residual = linalg::max_abs(&(&sys * &eps - &rhs));
        if residual > tol {
            return Err(QgError::NoCounit(residual));
        }
        Ok(Functional(eps.column(0).into_owned()))
    }

    /// The antipode `κ` as a `dim x dim` matrix on coefficients, solved from
    /// `m(κ⊗ι)Δ = m(ι⊗κ)Δ = ε(·)1`.
    pub fn antipode(&self, counit: &Functional, tol: f64) -> Result<CMat> {
        let d = self.dim;
        // unknown K[x, a] at column x + a * d
        let mut sys = CMat::zeros(2 * d * d, d * d);
        let mut rhs = CMat::zeros(2 * d * d, 1);
        for j in 0..d {
            for &(x, y, e, m) in &self.mul_nz {
                for other in 0..d {
                    // left: Δ(e_j) ∋ e_a ⊗ e_y, κ(e_a) e_y, so x is the image index
                    let dl = self.delta[(other * d + y, j)];
                    if dl != ZERO {
                        sys[(j * d + e, x + other * d)] += dl * m;
                    }
                    // right: Δ(e_j) ∋ e_x ⊗ e_b, e_x κ(e_b), so y is the image index
                    let dr = self.delta[(x * d + other, j)];
                    if dr != ZERO {
                        sys[(d * d + j * d + e, y + other * d)] += dr * m;
                    }
                }
            }
            for e in 0..d {
                rhs[(j * d + e, 0)] = counit.0[j] * self.unit[e];
                rhs[(d * d + j * d + e, 0)] = counit.0[j] * self.unit[e];
            }
        }
        let k = linalg::lstsq(&sys, &rhs);
        let residual = linalg::max_abs(&(&sys * &k - &rhs));
        if residual > tol {
            return Err(QgError::NoAntipode(residual));
        }
        Ok(linalg::unvec(&k.column(0).into_owned(), d, d))
    }
}

/// The axiom a failing residual belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Violation {
    AlgebraViolation,
    StarHomViolation,
    CoassociativityViolation,
    DensityViolation,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub axiom: &'static str,
    pub residual: f64,
    pub pass: bool,
    pub violation: Violation,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub tol: f64,
    pub checks: Vec<AxiomCheck>,
    pub left_cancellation_rank: usize,
    pub right_cancellation_rank: usize,
    pub required_rank: usize,
    pub violations: Vec<Violation>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn residual(&self, axiom: &str) -> Option<f64> {
        self.checks
            .iter()
            .find(|c| c.axiom == axiom)
            .map(|c| c.residual)
    }
}

/// Check every compact-quantum-group axiom of `g` and report residuals.
pub fn validate_cqg(g: &QuantumGroup, tol: f64) -> ValidationReport {
    let d = g.dim;
    let basis: Vec<AlgebraElement> = (0..d).map(|i| g.basis(i)).collect();
    let unit = g.unit();
    let mut checks = Vec::new();
    let mut push = |axiom, residual: f64, violation| {
        checks.push(AxiomCheck {
            axiom,
            residual,
            pass: residual < tol,
            violation,
        })
    };

    let mut assoc: f64 = 0.0;
    let mut antimul: f64 = 0.0;
    let mut dmul: f64 = 0.0;
    for a in &basis {
        for b in &basis {
            let ab = g.mul_unchecked(a, b);
            for cc in &basis {
                let lhs = g.mul_unchecked(&ab, cc);
                let rhs = g.mul_unchecked(a, &g.mul_unchecked(b, cc));
                assoc = assoc.max(lhs.sub(&rhs).norm_max());
            }
            let lhs = g.star_unchecked(&ab);
            let rhs = g.mul_unchecked(&g.star_unchecked(b), &g.star_unchecked(a));
            antimul = antimul.max(lhs.sub(&rhs).norm_max());
            let lhs = g.comultiply(&ab);
            let rhs = g.tensor_mul(&g.comultiply(a), &g.comultiply(b));
            dmul = dmul.max(linalg::max_abs_vec(&(lhs - rhs)));
        }
    }
    let involution = basis
        .iter()
        .map(|a| g.star_unchecked(&g.star_unchecked(a)).sub(a).norm_max())
        .fold(0.0, f64::max);
    let unit_law = basis
        .iter()
        .map(|a| {
            let l = g.mul_unchecked(&unit, a).sub(a).norm_max();
            let r = g.mul_unchecked(a, &unit).sub(a).norm_max();
            l.max(r)
        })
        .fold(0.0, f64::max);
    let dstar = basis
        .iter()
        .map(|a| {
            let lhs = g.comultiply(&g.star_unchecked(a));
            let rhs = g.tensor_star(&g.comultiply(a));
            linalg::max_abs_vec(&(lhs - rhs))
        })
        .fold(0.0, f64::max);
    let unit_tensor = unit.0.kronecker(&unit.0);
    let dunit = linalg::max_abs_vec(&(g.comultiply(&unit) - unit_tensor));

    let id = CMat::identity(d, d);
    let coassoc =
        linalg::max_abs(&(g.delta.kronecker(&id) * &g.delta - id.kronecker(&g.delta) * &g.delta));

    push("associativity", assoc, Violation::AlgebraViolation);
    push("star_involution", involution, Violation::AlgebraViolation);
    push(
        "star_antimultiplicative",
        antimul,
        Violation::AlgebraViolation,
    );
    push("unit", unit_law, Violation::AlgebraViolation);
    push("delta_multiplicative", dmul, Violation::StarHomViolation);
    push("delta_star", dstar, Violation::StarHomViolation);
    push("delta_unit", dunit, Violation::StarHomViolation);
    push(
        "coassociativity",
        coassoc,
        Violation::CoassociativityViolation,
    );

    let (left, right) = cancellation_maps(g);
    let left_rank = linalg::rank(&left, linalg::RANK_RTOL);
    let right_rank = linalg::rank(&right, linalg::RANK_RTOL);

    let mut violations: Vec<Violation> = Vec::new();
    for c in checks.iter().filter(|c| !c.pass) {
        if !violations.contains(&c.violation) {
            violations.push(c.violation);
        }
    }
    if (left_rank != d * d || right_rank != d * d)
        && !violations.contains(&Violation::DensityViolation)
    {
        violations.push(Violation::DensityViolation);
    }
    ValidationReport {
        tol,
        pass: violations.is_empty(),
        checks,
        left_cancellation_rank: left_rank,
        right_cancellation_rank: right_rank,
        required_rank: d * d,
        violations,
    }
}

/// Matrices of `a⊗b ↦ (a⊗1)Δ(b)` and `a⊗b ↦ (1⊗a)Δ(b)`, columns indexed by
/// `a * dim + b`.
pub fn cancellation_maps(g: &QuantumGroup) -> (CMat, CMat) {
    let d = g.dim;
    let unit = g.unit();
    let mut left = CMat::zeros(d * d, d * d);
    let mut right = CMat::zeros(d * d, d * d);
    for a in 0..d {
        let ea = g.basis(a);
        let a_one = ea.0.kronecker(&unit.0);
        let one_a = unit.0.kronecker(&ea.0);
        for b in 0..d {
            let db = g.comultiply(&g.basis(b));
            left.set_column(a * d + b, &g.tensor_mul(&a_one, &db));
            right.set_column(a * d + b, &g.tensor_mul(&one_a, &db));
        }
    }
    (left, right)
}

/// Evaluate `f ⊗ g` against a vector of `A ⊗ A`.
pub fn pair_tensor(dim: usize, x: &CVec, f: &Functional, g: &Functional) -> C64 {
    let mut acc = ZERO;
    for a in 0..dim {
        for b in 0..dim {
            acc += x[a * dim + b] * f.0[a] * g.0[b];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{function_algebra, CayleyTable};
    use crate::linalg::c;

    fn cz2() -> QuantumGroup {
        function_algebra(&CayleyTable::cyclic(2)).unwrap()
    }

    #[test]
    fn z2_is_valid() {
        let g = cz2();
        let r = validate_cqg(&g, DEFAULT_TOL);
        assert!(r.pass, "{:?}", r);
        assert!(r.checks.iter().all(|c| c.residual < 1e-12));
        assert_eq!(r.left_cancellation_rank, 4);
    }

    #[test]
    fn perturbed_delta_fails() {
        let g = cz2();
        let mut delta = g.delta().clone();
        delta[(0, 0)] += c(0.1, 0.0);
        let r = validate_cqg(&g.with_delta(delta).unwrap(), DEFAULT_TOL);
        assert!(!r.pass);
        assert!(
            r.violations.contains(&Violation::CoassociativityViolation)
                || r.violations.contains(&Violation::StarHomViolation)
        );
    }

    #[test]
    fn shape_mismatch_rejected() {
        assert!(matches!(
            QuantumGroup::new(vec![1, 1], CMat::zeros(3, 2), None),
            Err(QgError::ShapeMismatch(_))
        ));
        let g = cz2();
        assert!(g.mul(&AlgebraElement::zeros(3), &g.unit()).is_err());
    }

    #[test]
    fn unit_and_involution_laws() {
        let g = QuantumGroup::new(vec![1, 2], CMat::zeros(25, 5), None).unwrap();
        let a = AlgebraElement(CVec::from_iterator(
            5,
            (0..5).map(|k| c(k as f64 + 0.5, 1.0 - k as f64)),
        ));
        assert!(g.mul(&g.unit(), &a).unwrap().sub(&a).norm_max() < 1e-15);
        assert!(g.star(&g.star(&a).unwrap()).unwrap().sub(&a).norm_max() < 1e-15);
    }

    #[test]
    fn orthogonal_idempotents_in_cz2() {
        let g = cz2();
        let p = g.mul(&g.basis(0), &g.basis(1)).unwrap();
        assert_eq!(p.norm_max(), 0.0);
    }

    #[test]
    fn counit_laws_and_translation() {
        let g = cz2();
        let eps = g.counit(DEFAULT_TOL).unwrap();
        let a = AlgebraElement(CVec::from_vec(vec![c(2.0, 1.0), c(-3.0, 0.5)]));
        assert!(g.convolve_fa(&eps, &a).unwrap().sub(&a).norm_max() < 1e-12);
        assert!(g.convolve_af(&a, &eps).unwrap().sub(&a).norm_max() < 1e-12);
        // evaluation at the non-identity element translates δ_0 to δ_1
        let at_one = Functional::dual_basis(2, 1);
        let shifted = g.convolve_fa(&at_one, &g.basis(0)).unwrap();
        assert!(shifted.sub(&g.basis(1)).norm_max() < 1e-15);
    }

    #[test]
    fn antipode_of_function_algebra_is_inversion() {
        let t = CayleyTable::cyclic(3);
        let g = function_algebra(&t).unwrap();
        let eps = g.counit(DEFAULT_TOL).unwrap();
        let k = g.antipode(&eps, DEFAULT_TOL).unwrap();
        for x in 0..3 {
            let img = &k * g.basis(x).0;
            assert!((img[t.inverse(x)] - ONE).norm() < 1e-12);
        }
    }

    fn random_unitary(n: usize, seed: u64) -> CMat {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = CMat::from_fn(n, n, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        m.qr().q()
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

        #[test]
        fn left_and_right_convolutions_commute(k in 0usize..8, l in 0usize..8, a in 0usize..8) {
            let g = crate::groups::builtin("kac_paljutkin").unwrap();
            let (f, h) = (Functional::dual_basis(8, k), Functional::dual_basis(8, l));
            let x = g.basis(a);
            let lhs = g.convolve_fa(&f, &g.convolve_af(&x, &h).unwrap()).unwrap();
            let rhs = g.convolve_af(&g.convolve_fa(&f, &x).unwrap(), &h).unwrap();
            proptest::prop_assert!(lhs.sub(&rhs).norm_max() < 1e-12);
        }

        #[test]
        fn cancellation_rank_ignores_unitary_change_of_basis(seed in proptest::prelude::any::<u64>()) {
            let g = crate::groups::builtin("c_s3").unwrap();
            let (left, right) = cancellation_maps(&g);
            let w = random_unitary(6, seed);
            let ww = w.kronecker(&w);
            for m in [left, right] {
                let moved = &ww * &m * ww.adjoint();
                proptest::prop_assert_eq!(
                    linalg::rank(&moved, linalg::RANK_RTOL),
                    linalg::rank(&m, linalg::RANK_RTOL)
                );
            }
        }
    }
}
