//! The right regular representation `v`, the algebra `C*(G)` spanned by its
//! Fourier images, and the decomposition `v = ⊕_α d_α u^α`.
//!
//! Every matrix here lives in the orthonormal basis of `H_h`; the change of
//! basis from algebra coefficients happens once, in [`build_regular`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{AlgebraElement, Functional, QuantumGroup};
use crate::corep::{
    self, a_element, adjoint, character, conjugate_rep, contragredient, f_matrix,
    intertwiner_space, intertwining_residual, modular_functionals, CoRep, IrrepClass,
};
use crate::error::{QgError, Result};
use crate::groups::rounded_key;
use crate::haar::{subspace_projection, GnsSpace};
use crate::linalg::{self, c, CMat, CVec, C64, EIGENGAP_TOL, RANK_RTOL, ZERO};

/// `v ∈ B(H_h) ⊗ A` together with `v*` and `V = (id⊗π_h)v`.
#[derive(Debug, Clone)]
pub struct RegularRep {
    pub v: CoRep,
    pub v_star: CoRep,
    pub big_v: CMat,
}

impl RegularRep {
    pub fn dim_h(&self) -> usize {
        self.v.d()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularChecks {
    pub defining_property: f64,
    pub unitarity: f64,
    pub corep: f64,
    pub density_rank: usize,
    pub tensor_action: f64,
    pub counit: f64,
}

/// Write `Δ(e_j) = Σ_{i,k} Δ_{(i,k),j} e_i ⊗ e_k`; then `v_ij = Σ_k Δ_{(i,k),j} e_k`
/// on algebra coefficients, transported to the orthonormal basis of `H_h`.
pub fn build_regular(gns: &GnsSpace, g: &QuantumGroup, tol: f64) -> Result<RegularRep> {
    let d = g.dim();
    if gns.dim() != d {
        return Err(QgError::ShapeMismatch(format!(
            "GNS space of dimension {} for an algebra of dimension {d}",
            gns.dim()
        )));
    }
    let delta = g.delta();
    let slices: Vec<CMat> = (0..d)
        .map(|k| {
            let mut ck = CMat::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    ck[(i, j)] = delta[(i * d + k, j)];
                }
            }
            gns.transport(&ck)
        })
        .collect();
    let v = CoRep::new(slices)?;
    let v_star = adjoint(g, &v);
    let big_v = v.represent(&gns.pi);
    let vr = RegularRep { v, v_star, big_v };
    let residual = defining_property_residual(&vr, gns, g);
    if residual >= tol {
        return Err(QgError::ConstructionInconsistent {
            what: "defining property",
            residual,
        });
    }
    Ok(vr)
}

/// `max ‖[(id⊗f)v] π_h(a)ξ_h − π_h(f∗a)ξ_h‖` over the dual basis `f` and the
/// basis `a`.
pub fn defining_property_residual(vr: &RegularRep, gns: &GnsSpace, g: &QuantumGroup) -> f64 {
    let d = g.dim();
    let mut worst: f64 = 0.0;
    for k in 0..d {
        let f = Functional::dual_basis(d, k);
        for j in 0..d {
            let a = g.basis(j);
            let lhs = &vr.v.slices()[k] * gns.vector(&a);
            let rhs = gns.vector(&g.convolve_fa(&f, &a).expect("same algebra"));
            worst = worst.max(linalg::max_abs_vec(&(lhs - rhs)));
        }
    }
    worst
}

pub fn regular_checks(
    vr: &RegularRep,
    gns: &GnsSpace,
    g: &QuantumGroup,
    counit: &Functional,
) -> RegularChecks {
    let d = g.dim();
    let n = vr.dim_h();

    // V(π(a)ξ ⊗ η) = (π⊗π)Δ(a)(ξ ⊗ η) for every basis a, all η
    let id = CMat::identity(n, n);
    let delta = g.delta();
    let vectors: Vec<CMat> = (0..d)
        .map(|a| CMat::from_columns(&[gns.vector(&g.basis(a))]))
        .collect();
    let mut tensor_action: f64 = 0.0;
    for j in 0..d {
        let lhs = &vr.big_v * vectors[j].kronecker(&id);
        let mut rhs = CMat::zeros(n * n, n);
        for a in 0..d {
            for b in 0..d {
                let w = delta[(a * d + b, j)];
                if w != ZERO {
                    rhs += vectors[a].kronecker(&gns.pi[b]) * w;
                }
            }
        }
        tensor_action = tensor_action.max(linalg::max_abs(&(lhs - rhs)));
    }

    let mut entries = CMat::zeros(n * n, d);
    for (k, s) in vr.v.slices().iter().enumerate() {
        for (r, z) in s.iter().enumerate() {
            entries[(r, k)] = *z;
        }
    }

    let mut eps_v = CMat::zeros(n, n);
    for (k, s) in vr.v.slices().iter().enumerate() {
        eps_v += s * counit.0[k];
    }

    RegularChecks {
        defining_property: defining_property_residual(vr, gns, g),
        unitarity: corep::unitarity_residual(g, &vr.v),
        corep: corep::corep_residual(g, &vr.v),
        density_rank: linalg::rank(&entries, RANK_RTOL),
        tensor_action,
        counit: linalg::max_abs(&(eps_v - id)),
    }
}

/// Which product defines the functional `ha` in `F_v(a) = (id⊗ha)(v*)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FourierConvention {
    /// `ha(x) = h(xa)`
    RightMultiply,
    /// `ha(x) = h(ax)`
    LeftMultiply,
}

/// Which convolution defines `c_ij = M_α (u_ij ∘ f_1)*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConvolutionSide {
    /// `u ∗ f_1 = (f_1⊗ι)Δ(u)`
    ElementFirst,
    /// `f_1 ∗ u = (ι⊗f_1)Δ(u)`
    FunctionalFirst,
}

/// `F_v(a) = (id⊗ha)(v*)`.
pub fn fourier(
    vr: &RegularRep,
    g: &QuantumGroup,
    h: &Functional,
    a: &AlgebraElement,
    convention: FourierConvention,
) -> CMat {
    let n = vr.dim_h();
    let mut out = CMat::zeros(n, n);
    for (x, s) in vr.v_star.slices().iter().enumerate() {
        let ex = g.basis(x);
        let prod = match convention {
            FourierConvention::RightMultiply => g.mul_unchecked(&ex, a),
            FourierConvention::LeftMultiply => g.mul_unchecked(a, &ex),
        };
        let w = h.eval(&prod);
        if w != ZERO {
            out += s * w;
        }
    }
    out
}

/// One irreducible summand of `v`: an orthonormal basis of its subspace.
#[derive(Debug, Clone)]
pub struct Block {
    pub class: usize,
    pub basis: CMat,
}

/// The irreducible classes found in `v`, with the certificate that each
/// enters with multiplicity equal to its dimension.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub classes: Vec<IrrepClass>,
    pub blocks: Vec<Block>,
    /// `dim Hom(u^α, v)` per class.
    pub multiplicities: Vec<usize>,
    pub self_intertwiner_dim: usize,
    pub counit: Functional,
    pub antipode: CMat,
    pub f1: Functional,
    pub fm1: Functional,
    pub seed: u64,
}

impl Decomposition {
    pub fn sum_d_squared(&self) -> usize {
        self.classes.iter().map(|c| c.d() * c.d()).sum()
    }
}

fn random_hermitian(basis: &[CMat], rng: &mut ChaCha8Rng) -> CMat {
    let n = basis[0].nrows();
    let mut x = CMat::zeros(n, n);
    for b in basis {
        let w = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        x += b * w;
    }
    &x + x.adjoint()
}

/// Split `v` into irreducible blocks with seeded random Hermitian elements of
/// the self-intertwiner algebra, refining until every block is irreducible.
fn split_irreducible(vr: &RegularRep, top: &[CMat], seed: u64) -> Result<Vec<CMat>> {
    let n = vr.dim_h();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pending = vec![(CMat::identity(n, n), top.to_vec())];
    let mut done = Vec::new();
    while let Some((q, comm)) = pending.pop() {
        if comm.len() == 1 {
            done.push(q);
            continue;
        }
        let mut attempts = 0;
        let clusters = loop {
            attempts += 1;
            if attempts > n.max(1) {
                return Err(QgError::IrreducibilitySplitFailure(attempts - 1));
            }
            let (vals, vecs) = linalg::hermitian_eigen(&random_hermitian(&comm, &mut rng));
            let cl = linalg::cluster_eigenvalues(&vals, EIGENGAP_TOL);
            if cl.len() > 1 {
                break (cl, vecs);
            }
        };
        let (cl, vecs) = clusters;
        // reverse so that blocks come out in ascending eigenvalue order
        for idx in cl.into_iter().rev() {
            let cols: Vec<CVec> = idx.iter().map(|&i| vecs.column(i).into_owned()).collect();
            let sub = &q * CMat::from_columns(&cols);
            let restricted = vr.v.restrict(&sub);
            let comm = intertwiner_space(&restricted, &restricted);
            pending.push((sub, comm));
        }
    }
    Ok(done)
}

/// Decompose the right regular representation into irreducibles and attach
/// `F_α`, `M_α`, `a_α`, conjugate classes and `f_{±1}` to every class.
pub fn decompose_regular(
    vr: &RegularRep,
    g: &QuantumGroup,
    seed: u64,
    tol: f64,
) -> Result<Decomposition> {
    let self_intertwiners = intertwiner_space(&vr.v, &vr.v);
    let subspaces = split_irreducible(vr, &self_intertwiners, seed)?;

    // group blocks into equivalence classes; representative = first block seen
    let mut reps: Vec<CoRep> = Vec::new();
    let mut block_class: Vec<usize> = Vec::new();
    for q in &subspaces {
        let u = vr.v.restrict(q);
        let found = reps
            .iter()
            .position(|r| r.d() == u.d() && !intertwiner_space(&u, r).is_empty());
        match found {
            Some(i) => block_class.push(i),
            None => {
                block_class.push(reps.len());
                reps.push(u);
            }
        }
    }

    // canonical order: (d, rounded character coefficients)
    let mut order: Vec<usize> = (0..reps.len()).collect();
    let keys: Vec<(usize, Vec<(i64, i64)>)> = reps
        .iter()
        .map(|r| (r.d(), rounded_key(character(r).0.as_slice())))
        .collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut new_id = vec![0; reps.len()];
    for (pos, &old) in order.iter().enumerate() {
        new_id[old] = pos;
    }
    let reps: Vec<CoRep> = order.iter().map(|&i| reps[i].clone()).collect();
    let blocks: Vec<Block> = subspaces
        .into_iter()
        .zip(block_class)
        .map(|(basis, cl)| Block {
            class: new_id[cl],
            basis,
        })
        .collect();

    let multiplicities: Vec<usize> = reps
        .iter()
        .map(|u| intertwiner_space(u, &vr.v).len())
        .collect();

    let counit = g.counit(tol)?;
    let antipode = g.antipode(&counit, tol)?;
    let mut fs = Vec::with_capacity(reps.len());
    for u in &reps {
        fs.push(f_matrix(u, &antipode, tol)?);
    }
    let pairs: Vec<(&CoRep, &CMat)> = reps.iter().zip(fs.iter().map(|(f, _)| f)).collect();
    let (f1, fm1) = modular_functionals(g, &pairs)?;

    let mut classes = Vec::with_capacity(reps.len());
    for (id, (u, (f, m))) in reps.iter().zip(fs).enumerate() {
        let chi = character(u);
        let (conj, _) = conjugate_rep(g, u, &reps)?;
        classes.push(IrrepClass {
            id,
            rep: u.clone(),
            a_elem: a_element(g, &chi, &f1, m)?,
            f,
            m,
            character: chi,
            conj_class_id: conj,
        });
    }

    Ok(Decomposition {
        classes,
        blocks,
        multiplicities,
        self_intertwiner_dim: self_intertwiners.len(),
        counit,
        antipode,
        f1,
        fm1,
        seed,
    })
}

/// Fail with `MultiplicityMismatch` unless every class has `m_α = d_α`.
pub fn certify_multiplicities(dec: &Decomposition) -> Result<()> {
    for (cl, &m) in dec.classes.iter().zip(&dec.multiplicities) {
        if m != cl.d() {
            return Err(QgError::MultiplicityMismatch {
                class: cl.id,
                multiplicity: m,
                dim: cl.d(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct CStarChecks {
    pub fourier_convention: FourierConvention,
    pub convolution_side: ConvolutionSide,
    pub sum_p_identity: f64,
    pub p_orthogonality: f64,
    pub p_projection: f64,
    pub p_centrality: f64,
    pub p_matches_subspace: f64,
    pub matrix_unit_relations: f64,
    pub matrix_unit_action: f64,
    pub row_sum: f64,
    pub row_orthogonality: f64,
    pub block_dims: Vec<usize>,
    pub matrix_unit_span_dims: Vec<usize>,
    pub block_commutant_dims: Vec<usize>,
}

impl CStarChecks {
    pub fn max_residual(&self) -> f64 {
        [
            self.sum_p_identity,
            self.p_orthogonality,
            self.p_projection,
            self.p_centrality,
            self.p_matches_subspace,
            self.matrix_unit_relations,
            self.matrix_unit_action,
            self.row_sum,
            self.row_orthogonality,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `C*(G)` with its central projections `p_α`, the row projections `p_α^k`,
/// the elements `c_ij` and the matrix units `E_ij`.
#[derive(Debug, Clone)]
pub struct CStarG {
    pub convention: FourierConvention,
    pub side: ConvolutionSide,
    /// `F_v(e_i)` for every basis element; these span `C*(G)`.
    pub basis: Vec<CMat>,
    pub p: Vec<CMat>,
    pub p_rows: Vec<Vec<CMat>>,
    pub c: Vec<Vec<AlgebraElement>>,
    /// `E[α][i * d + j] = E_ij`.
    pub e: Vec<Vec<CMat>>,
    pub checks: CStarChecks,
}

fn c_elements(
    g: &QuantumGroup,
    class: &IrrepClass,
    f1: &Functional,
    side: ConvolutionSide,
) -> Vec<AlgebraElement> {
    let d = class.d();
    let m = C64::new(class.m, 0.0);
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let uij = class.rep.entry(i, j);
            let conv = match side {
                ConvolutionSide::ElementFirst => g.convolve_af(&uij, f1),
                ConvolutionSide::FunctionalFirst => g.convolve_fa(f1, &uij),
            }
            .expect("same algebra");
            out.push(g.star_unchecked(&conv).scale(m));
        }
    }
    out
}

/// `max ‖E_kl E_ij − δ_il E_kj‖` and `max ‖E_ij (u_rs)* − δ_sj (u_ri)*‖`.
fn matrix_unit_residuals(
    g: &QuantumGroup,
    gns: &GnsSpace,
    class: &IrrepClass,
    e: &[CMat],
) -> (f64, f64) {
    let d = class.d();
    let mut rel: f64 = 0.0;
    for k in 0..d {
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let lhs = &e[k * d + l] * &e[i * d + j];
                    let rhs = if i == l {
                        e[k * d + j].clone()
                    } else {
                        CMat::zeros(lhs.nrows(), lhs.ncols())
                    };
                    rel = rel.max(linalg::max_abs(&(lhs - rhs)));
                }
            }
        }
    }
    let conj_vec = |r: usize, s: usize| gns.vector(&g.star_unchecked(&class.rep.entry(r, s)));
    let mut act: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            for r in 0..d {
                for s in 0..d {
                    let lhs = &e[i * d + j] * conj_vec(r, s);
                    let rhs = if s == j {
                        conj_vec(r, i)
                    } else {
                        CVec::zeros(lhs.len())
                    };
                    act = act.max(linalg::max_abs_vec(&(lhs - rhs)));
                }
            }
        }
    }
    (rel, act)
}

/// Build `C*(G)` and all its block data without rejecting on residuals.
pub fn cstar_blocks_unchecked(
    vr: &RegularRep,
    gns: &GnsSpace,
    g: &QuantumGroup,
    h: &Functional,
    dec: &Decomposition,
    tol: f64,
) -> CStarG {
    let n = vr.dim_h();
    let subspace: Vec<CMat> = dec
        .classes
        .iter()
        .map(|cl| {
            subspace_projection(gns, &contragredient(g, &cl.rep), None).expect("same algebra")
        })
        .collect();

    // fix the meaning of `ha` by requiring F_v(a_α) to be the projection
    // onto H_h(ū^α) for every class
    let projections = |conv| -> (Vec<CMat>, f64) {
        let p: Vec<CMat> = dec
            .classes
            .iter()
            .map(|cl| fourier(vr, g, h, &cl.a_elem, conv))
            .collect();
        let err = p
            .iter()
            .zip(&subspace)
            .map(|(a, b)| linalg::max_abs(&(a - b)))
            .fold(0.0, f64::max);
        (p, err)
    };
    let (mut convention, (mut p, mut p_matches)) = (
        FourierConvention::RightMultiply,
        projections(FourierConvention::RightMultiply),
    );
    if p_matches >= tol {
        let (p2, err2) = projections(FourierConvention::LeftMultiply);
        if err2 < p_matches {
            convention = FourierConvention::LeftMultiply;
            p = p2;
            p_matches = err2;
        }
    }

    let basis: Vec<CMat> = (0..g.dim())
        .map(|i| fourier(vr, g, h, &g.basis(i), convention))
        .collect();
    let id = CMat::identity(n, n);
    let sum_p = p.iter().fold(CMat::zeros(n, n), |acc, x| acc + x);
    let sum_p_identity = linalg::max_abs(&(sum_p - &id));
    let mut p_orthogonality: f64 = 0.0;
    for (a, pa) in p.iter().enumerate() {
        for (b, pb) in p.iter().enumerate() {
            let expected = if a == b {
                pa.clone()
            } else {
                CMat::zeros(n, n)
            };
            p_orthogonality = p_orthogonality.max(linalg::max_abs(&(pa * pb - expected)));
        }
    }
    let p_projection = p
        .iter()
        .map(|x| linalg::max_abs(&(x * x - x)).max(linalg::max_abs(&(x - x.adjoint()))))
        .fold(0.0, f64::max);
    let p_centrality = p
        .iter()
        .flat_map(|x| basis.iter().map(move |b| linalg::max_abs(&(x * b - b * x))))
        .fold(0.0, f64::max);

    // pick the convolution side for c_ij by the matrix-unit relations
    let units = |side| -> (Vec<Vec<AlgebraElement>>, Vec<Vec<CMat>>, f64, f64) {
        let mut cs = Vec::new();
        let mut es = Vec::new();
        let (mut rel, mut act) = (0f64, 0f64);
        for (cl, pa) in dec.classes.iter().zip(&p) {
            let c = c_elements(g, cl, &dec.f1, side);
            let e: Vec<CMat> = c
                .iter()
                .map(|cij| fourier(vr, g, h, cij, convention).adjoint() * pa)
                .collect();
            let (r, a) = matrix_unit_residuals(g, gns, cl, &e);
            rel = rel.max(r);
            act = act.max(a);
            cs.push(c);
            es.push(e);
        }
        (cs, es, rel, act)
    };
    let mut side = ConvolutionSide::ElementFirst;
    let (mut c, mut e, mut rel, mut act) = units(side);
    if rel.max(act) >= tol {
        let alt = units(ConvolutionSide::FunctionalFirst);
        if alt.2.max(alt.3) < rel.max(act) {
            side = ConvolutionSide::FunctionalFirst;
            (c, e, rel, act) = alt;
        }
    }

    let mut p_rows = Vec::new();
    let (mut row_sum, mut row_orthogonality) = (0f64, 0f64);
    for (cl, pa) in dec.classes.iter().zip(&p) {
        let ubar = contragredient(g, &cl.rep);
        let rows: Vec<CMat> = (0..cl.d())
            .map(|k| subspace_projection(gns, &ubar, Some(k)).expect("row in range"))
            .collect();
        let total = rows.iter().fold(CMat::zeros(n, n), |acc, x| acc + x);
        row_sum = row_sum.max(linalg::max_abs(&(total - pa)));
        for (a, ra) in rows.iter().enumerate() {
            for (b, rb) in rows.iter().enumerate() {
                if a != b {
                    row_orthogonality = row_orthogonality.max(linalg::max_abs(&(ra * rb)));
                }
            }
        }
        p_rows.push(rows);
    }

    let flat = |ms: &[CMat]| -> CMat {
        let cols: Vec<CVec> = ms
            .iter()
            .map(|m| CVec::from_column_slice(m.as_slice()))
            .collect();
        CMat::from_columns(&cols)
    };
    let block_dims: Vec<usize> = p
        .iter()
        .map(|pa| {
            let images: Vec<CMat> = basis.iter().map(|b| b * pa).collect();
            linalg::rank(&flat(&images), RANK_RTOL)
        })
        .collect();
    let matrix_unit_span_dims = e
        .iter()
        .map(|es| linalg::rank(&flat(es), RANK_RTOL))
        .collect();
    // commutant of C*(G)p_α inside B(p_α H_h)
    let block_commutant_dims = p
        .iter()
        .map(|pa| {
            let q = linalg::range_basis(pa, RANK_RTOL);
            let restricted: Vec<CMat> = basis.iter().map(|b| q.adjoint() * b * &q).collect();
            let as_corep = CoRep::new(restricted).expect("square slices");
            intertwiner_space(&as_corep, &as_corep).len()
        })
        .collect();

    CStarG {
        convention,
        side,
        basis,
        p,
        p_rows,
        c,
        e,
        checks: CStarChecks {
            fourier_convention: convention,
            convolution_side: side,
            sum_p_identity,
            p_orthogonality,
            p_projection,
            p_centrality,
            p_matches_subspace: p_matches,
            matrix_unit_relations: rel,
            matrix_unit_action: act,
            row_sum,
            row_orthogonality,
            block_dims,
            matrix_unit_span_dims,
            block_commutant_dims,
        },
    }
}

/// Build `C*(G)` and reject with `BlockMismatch` if any relation fails.
pub fn cstar_blocks(
    vr: &RegularRep,
    gns: &GnsSpace,
    g: &QuantumGroup,
    h: &Functional,
    dec: &Decomposition,
    tol: f64,
) -> Result<CStarG> {
    let cs = cstar_blocks_unchecked(vr, gns, g, h, dec, tol);
    let residual = cs.checks.max_residual();
    if residual >= tol {
        return Err(QgError::BlockMismatch {
            relation: "central projections / matrix units".into(),
            residual,
        });
    }
    for (cl, (&bd, &ed)) in dec.classes.iter().zip(
        cs.checks
            .block_dims
            .iter()
            .zip(&cs.checks.matrix_unit_span_dims),
    ) {
        let want = cl.d() * cl.d();
        if bd != want || ed != want {
            return Err(QgError::BlockMismatch {
                relation: format!(
                    "dim C*(G)p_{} = {bd}, span E = {ed}, expected {want}",
                    cl.id
                ),
                residual: f64::NAN,
            });
        }
    }
    Ok(cs)
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutantReport {
    pub intertwiner_dim: usize,
    pub commutant_dim: usize,
    pub intertwiners_commute_with_cstar: f64,
    pub commutant_intertwines_v: f64,
    pub identity_residual: f64,
    pub pass: bool,
}

/// Compare the self-intertwiners of `v` with the commutant of `C*(G)`.
pub fn commutant_check(vr: &RegularRep, cstar: &CStarG, tol: f64) -> CommutantReport {
    let n = vr.dim_h();
    let intertwiners = intertwiner_space(&vr.v, &vr.v);
    let as_corep = CoRep::new(cstar.basis.clone()).expect("square slices");
    let commutant = intertwiner_space(&as_corep, &as_corep);

    let commutes = |x: &CMat| {
        cstar
            .basis
            .iter()
            .map(|b| linalg::max_abs(&(x * b - b * x)))
            .fold(0.0, f64::max)
    };
    let a = intertwiners.iter().map(commutes).fold(0.0, f64::max);
    let b = commutant
        .iter()
        .map(|x| intertwining_residual(x, &vr.v, &vr.v))
        .fold(0.0, f64::max);
    let id = CMat::identity(n, n);
    let identity_residual = commutes(&id).max(intertwining_residual(&id, &vr.v, &vr.v));
    CommutantReport {
        intertwiner_dim: intertwiners.len(),
        commutant_dim: commutant.len(),
        intertwiners_commute_with_cstar: a,
        commutant_intertwines_v: b,
        identity_residual,
        pass: intertwiners.len() == commutant.len()
            && a < tol
            && b < tol
            && identity_residual < tol,
    }
}

/// The intertwiner `S e_i = π_h(u_{k0 i}*)ξ_h` from `ū^α` into `H_h^{k0}(ū^α)`.
#[derive(Debug, Clone, Serialize)]
pub struct ExplicitIntertwiner {
    pub class: usize,
    pub row: usize,
    #[serde(skip)]
    pub s: CMat,
    pub residual: f64,
    pub sigma_min: f64,
    pub range_residual: f64,
    pub row_projection_commutes: f64,
    pub restriction_matches_conjugate: bool,
}

/// Build `S` for class `class` and row `row` (0-based) and check
/// `V(p^{k0}⊗1)(S⊗1) = (S⊗1)(id⊗π_h)ū^α`.
#[allow(clippy::too_many_arguments)]
pub fn explicit_intertwiner_unchecked(
    vr: &RegularRep,
    gns: &GnsSpace,
    g: &QuantumGroup,
    dec: &Decomposition,
    cstar: &CStarG,
    class: usize,
    row: usize,
) -> Result<ExplicitIntertwiner> {
    let cl = dec
        .classes
        .get(class)
        .ok_or_else(|| QgError::ShapeMismatch(format!("no class {class}")))?;
    if row >= cl.d() {
        return Err(QgError::ShapeMismatch(format!(
            "row {row} out of range for class {class} of dimension {}",
            cl.d()
        )));
    }
    let n = vr.dim_h();
    let d = cl.d();
    let cols: Vec<CVec> = (0..d)
        .map(|i| gns.vector(&g.star_unchecked(&cl.rep.entry(row, i))))
        .collect();
    let s = CMat::from_columns(&cols);
    let id = CMat::identity(n, n);
    let p_row = &cstar.p_rows[class][row];
    let ubar = contragredient(g, &cl.rep);
    let ubar_big = ubar.represent(&gns.pi);
    let s_big = s.kronecker(&id);
    let lhs = &vr.big_v * p_row.kronecker(&id) * &s_big;
    let rhs = &s_big * ubar_big;
    let residual = linalg::max_abs(&(lhs - rhs));

    let sigma_min = linalg::singular_values(&s).last().copied().unwrap_or(0.0);
    let range_residual = linalg::max_abs(&(p_row * &s - &s)).max(linalg::max_abs(
        &(linalg::projection_onto(&s, RANK_RTOL) - p_row),
    ));
    let row_projection_commutes = cstar
        .basis
        .iter()
        .map(|b| linalg::max_abs(&(p_row * b - b * p_row)))
        .fold(0.0, f64::max);

    let q = linalg::range_basis(p_row, RANK_RTOL);
    let restricted = vr.v.restrict(&q);
    let target = &dec.classes[cl.conj_class_id].rep;
    let restriction_matches_conjugate =
        restricted.d() == target.d() && intertwiner_space(&restricted, target).len() == 1;

    Ok(ExplicitIntertwiner {
        class,
        row,
        s,
        residual,
        sigma_min,
        range_residual,
        row_projection_commutes,
        restriction_matches_conjugate,
    })
}

/// As [`explicit_intertwiner_unchecked`], rejecting residuals at or above `tol`.
#[allow(clippy::too_many_arguments)]
pub fn explicit_intertwiner_s(
    vr: &RegularRep,
    gns: &GnsSpace,
    g: &QuantumGroup,
    dec: &Decomposition,
    cstar: &CStarG,
    class: usize,
    row: usize,
    tol: f64,
) -> Result<ExplicitIntertwiner> {
    let x = explicit_intertwiner_unchecked(vr, gns, g, dec, cstar, class, row)?;
    if x.residual >= tol || x.sigma_min <= tol || !x.restriction_matches_conjugate {
        return Err(QgError::IntertwinerResidual {
            class,
            row,
            residual: x.residual,
        });
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_TOL;
    use crate::groups::{builtin, group_like, CayleyTable};
    use crate::haar::{gns_construct, haar_state};

    struct Setup {
        g: QuantumGroup,
        h: Functional,
        gns: GnsSpace,
        vr: RegularRep,
    }

    fn trivial_class(s: &Setup, dec: &Decomposition) -> usize {
        let one = s.g.unit();
        dec.classes
            .iter()
            .position(|c| c.character.sub(&one).norm_max() < 1e-9)
            .unwrap()
    }

    fn setup(name: &str) -> Setup {
        let g = builtin(name).unwrap();
        let h = haar_state(&g, DEFAULT_TOL).unwrap();
        let gns = gns_construct(&g, &h, DEFAULT_TOL).unwrap();
        let vr = build_regular(&gns, &g, DEFAULT_TOL).unwrap();
        Setup { g, h, gns, vr }
    }

    #[test]
    fn regular_of_cz2_is_unitary_corep() {
        let s = setup("c_z2");
        let eps = s.g.counit(DEFAULT_TOL).unwrap();
        let rc = regular_checks(&s.vr, &s.gns, &s.g, &eps);
        assert!(rc.unitarity < 1e-12 && rc.corep < 1e-12);
        assert_eq!(rc.density_rank, 2);
        // (id⊗ε)v = 1
        assert!(rc.counit < 1e-12);
        assert!(rc.tensor_action < 1e-12);
    }

    #[test]
    fn group_likes_are_eigenvectors_of_regular_slices() {
        let s = setup("cstar_z3");
        let t = CayleyTable::cyclic(3);
        for g in 0..3 {
            let lam = AlgebraElement(group_like(&t, g));
            let x = s.gns.vector(&lam);
            for k in 0..s.g.dim() {
                let f = Functional::dual_basis(s.g.dim(), k);
                let y = &s.vr.v.slices()[k] * &x;
                assert!(linalg::max_abs_vec(&(y - &x * f.eval(&lam))) < 1e-12);
            }
        }
    }

    #[test]
    fn fourier_of_zero_and_of_trivial_class() {
        let s = setup("c_z2");
        let dec = decompose_regular(&s.vr, &s.g, 42, DEFAULT_TOL).unwrap();
        let zero = AlgebraElement::zeros(2);
        let conv = FourierConvention::RightMultiply;
        assert_eq!(fourier(&s.vr, &s.g, &s.h, &zero, conv), CMat::zeros(2, 2));
        let xi = &s.gns.xi;
        let t = trivial_class(&s, &dec);
        let triv = fourier(&s.vr, &s.g, &s.h, &dec.classes[t].a_elem, conv);
        assert!(linalg::max_abs(&(triv - xi * xi.adjoint())) < 1e-12);
        let sgn = fourier(&s.vr, &s.g, &s.h, &dec.classes[1 - t].a_elem, conv);
        assert_eq!(linalg::rank(&sgn, RANK_RTOL), 1);
        assert!(linalg::max_abs_vec(&(&sgn * xi)) < 1e-12);
    }

    #[test]
    fn decomposition_dims() {
        for (name, dims) in [
            ("c_z5", vec![1; 5]),
            ("c_s3", vec![1, 1, 2]),
            ("cstar_s3", vec![1; 6]),
            ("kac_paljutkin", vec![1, 1, 1, 1, 2]),
        ] {
            let s = setup(name);
            let dec = decompose_regular(&s.vr, &s.g, 42, DEFAULT_TOL).unwrap();
            let got: Vec<usize> = dec.classes.iter().map(|c| c.d()).collect();
            assert_eq!(got, dims, "{name}");
            assert_eq!(dec.multiplicities, dims, "{name}");
            certify_multiplicities(&dec).unwrap();
        }
    }

    #[test]
    fn tampered_multiplicity_is_reported() {
        let s = setup("c_s3");
        let mut dec = decompose_regular(&s.vr, &s.g, 42, DEFAULT_TOL).unwrap();
        dec.multiplicities[2] = 1;
        assert!(matches!(
            certify_multiplicities(&dec),
            Err(QgError::MultiplicityMismatch {
                class: 2,
                multiplicity: 1,
                dim: 2
            })
        ));
    }

    #[test]
    fn commutant_dims_match_sum_of_squares() {
        for (name, want) in [("c_z3", 3), ("kac_paljutkin", 8)] {
            let s = setup(name);
            let dec = decompose_regular(&s.vr, &s.g, 42, DEFAULT_TOL).unwrap();
            let cs = cstar_blocks(&s.vr, &s.gns, &s.g, &s.h, &dec, DEFAULT_TOL).unwrap();
            let rep = commutant_check(&s.vr, &cs, DEFAULT_TOL);
            assert!(rep.pass, "{name}");
            assert_eq!((rep.intertwiner_dim, rep.commutant_dim), (want, want));
        }
    }

    #[test]
    fn block_dims_of_cs3() {
        let s = setup("c_s3");
        let dec = decompose_regular(&s.vr, &s.g, 42, DEFAULT_TOL).unwrap();
        let cs = cstar_blocks(&s.vr, &s.gns, &s.g, &s.h, &dec, DEFAULT_TOL).unwrap();
        assert_eq!(cs.checks.block_dims, vec![1, 1, 4]);
        // trivial class: E_11 is p_triv
        let t = trivial_class(&s, &dec);
        assert!(linalg::max_abs(&(&cs.e[t][0] - &cs.p[t])) < 1e-12);
    }

    #[test]
    fn explicit_intertwiner_of_trivial_class_is_xi() {
        let s = setup("c_s3");
        let dec = decompose_regular(&s.vr, &s.g, 42, DEFAULT_TOL).unwrap();
        let cs = cstar_blocks(&s.vr, &s.gns, &s.g, &s.h, &dec, DEFAULT_TOL).unwrap();
        let t = trivial_class(&s, &dec);
        let x = explicit_intertwiner_s(&s.vr, &s.gns, &s.g, &dec, &cs, t, 0, DEFAULT_TOL).unwrap();
        assert!(linalg::max_abs_vec(&(x.s.column(0) - &s.gns.xi)) < 1e-12);
        for row in 0..2 {
            let x = explicit_intertwiner_s(&s.vr, &s.gns, &s.g, &dec, &cs, 2, row, DEFAULT_TOL)
                .unwrap();
            assert!(x.residual < 1e-12 && x.sigma_min > 1e-9);
        }
        assert!(matches!(
            explicit_intertwiner_s(&s.vr, &s.gns, &s.g, &dec, &cs, t, 1, DEFAULT_TOL),
            Err(QgError::ShapeMismatch(_))
        ));
    }
}
