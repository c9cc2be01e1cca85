use proptest::prelude::*;

use qgroup::corep::{character, contragredient, CoRep};
use qgroup::groups::{
    builtin, classical_character_oracle, function_algebra, group_algebra, group_like, CayleyTable,
};
use qgroup::haar::{gns_construct, haar_state, subspace_projection};
use qgroup::linalg::{c, max_abs, projection_onto, rank, CMat, C64, RANK_RTOL};
use qgroup::regular::{build_regular, decompose_regular, Decomposition};
use qgroup::report::{run_pipeline, Stage};
use qgroup::{validate_cqg, AlgebraElement, QuantumGroup, DEFAULT_TOL};

fn decompose(g: &QuantumGroup, seed: u64) -> Decomposition {
    let h = haar_state(g, DEFAULT_TOL).unwrap();
    let gns = gns_construct(g, &h, DEFAULT_TOL).unwrap();
    let vr = build_regular(&gns, g, DEFAULT_TOL).unwrap();
    decompose_regular(&vr, g, seed, DEFAULT_TOL).unwrap()
}

fn characters(dec: &Decomposition) -> Vec<Vec<C64>> {
    dec.classes
        .iter()
        .map(|cl| cl.character.0.iter().copied().collect())
        .collect()
}

fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
}

fn tables() -> Vec<CayleyTable> {
    let mut out: Vec<CayleyTable> = (2..=6).map(CayleyTable::cyclic).collect();
    out.push(CayleyTable::symmetric3());
    out
}

#[test]
fn function_algebras_reproduce_classical_characters() {
    for t in tables() {
        let dec = decompose(&function_algebra(&t).unwrap(), 42);
        let oracle = classical_character_oracle(&t);
        assert_eq!(dec.classes.len(), oracle.len());
        for chi in characters(&dec) {
            assert!(
                oracle.iter().any(|o| close(&o.values, &chi, 1e-8)),
                "order {}: unmatched character",
                t.order()
            );
        }
    }
}

#[test]
fn group_algebra_classes_are_group_likes_with_the_group_law() {
    for t in tables() {
        let g = group_algebra(&t).unwrap();
        let dec = decompose(&g, 42);
        let n = t.order();
        assert_eq!(dec.classes.len(), n);
        assert!(dec.classes.iter().all(|c| c.d() == 1));
        // each class is λ_x for exactly one group element x
        let lambdas: Vec<Vec<C64>> = (0..n)
            .map(|x| group_like(&t, x).iter().copied().collect())
            .collect();
        let elem: Vec<usize> = characters(&dec)
            .iter()
            .map(|chi| lambdas.iter().position(|l| close(l, chi, 1e-8)).unwrap())
            .collect();
        let mut seen = elem.clone();
        seen.sort();
        assert_eq!(seen, (0..n).collect::<Vec<_>>());
        // composing the classes multiplies their group-likes
        for a in 0..n {
            for b in 0..n {
                let prod = g
                    .mul(&dec.classes[a].character, &dec.classes[b].character)
                    .unwrap();
                let want = &lambdas[t.product(elem[a], elem[b])];
                assert!(close(prod.0.as_slice(), want, 1e-8));
            }
        }
    }
}

#[test]
fn conjugate_classes_pair_up() {
    for name in ["c_s3", "c_z4", "kac_paljutkin"] {
        let dec = decompose(&builtin(name).unwrap(), 42);
        for cl in &dec.classes {
            assert_eq!(dec.classes[cl.conj_class_id].conj_class_id, cl.id, "{name}");
        }
    }
}

#[test]
fn trivial_corep_is_a_class() {
    let g = builtin("kac_paljutkin").unwrap();
    let dec = decompose(&g, 42);
    let triv = character(&CoRep::trivial(&g));
    assert!(dec
        .classes
        .iter()
        .any(|cl| cl.character.sub(&triv).norm_max() < 1e-9));
}

#[test]
fn coefficient_subspaces_have_the_right_size() {
    let g = builtin("kac_paljutkin").unwrap();
    let h = haar_state(&g, DEFAULT_TOL).unwrap();
    let gns = gns_construct(&g, &h, DEFAULT_TOL).unwrap();
    let vr = build_regular(&gns, &g, DEFAULT_TOL).unwrap();
    let dec = decompose_regular(&vr, &g, 42, DEFAULT_TOL).unwrap();
    for cl in &dec.classes {
        let d = cl.d();
        let p = subspace_projection(&gns, &cl.rep, None).unwrap();
        assert_eq!(rank(&p, RANK_RTOL), d * d);
        for k in 0..d {
            let pk = subspace_projection(&gns, &cl.rep, Some(k)).unwrap();
            assert_eq!(rank(&pk, RANK_RTOL), d);
        }
        // lin{u^ᾱ_ij} and lin{(u^α_ij)*} coincide
        let conj = &dec.classes[cl.conj_class_id].rep;
        let stars = contragredient(&g, &cl.rep);
        let coeffs = |u: &CoRep| {
            let cols: Vec<_> = (0..d)
                .flat_map(|i| (0..d).map(move |j| (i, j)))
                .map(|(i, j)| u.entry(i, j).0)
                .collect();
            CMat::from_columns(&cols)
        };
        let (a, b) = (coeffs(conj), coeffs(&stars));
        let pa = projection_onto(&a, RANK_RTOL);
        let pb = projection_onto(&b, RANK_RTOL);
        assert!(max_abs(&(pa - pb)) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn decomposition_does_not_depend_on_seed(seed in any::<u64>()) {
        for name in ["c_s3", "kac_paljutkin"] {
            let g = builtin(name).unwrap();
            let base = characters(&decompose(&g, 42));
            let other = characters(&decompose(&g, seed));
            prop_assert_eq!(base.len(), other.len());
            for (a, b) in base.iter().zip(&other) {
                prop_assert!(close(a, b, 1e-8));
            }
        }
    }

    #[test]
    fn single_entry_perturbations_are_rejected(
        row in 0usize..64, col in 0usize..8, size in 1e-6f64..1.0, im in any::<bool>()
    ) {
        let g = builtin("kac_paljutkin").unwrap();
        let mut delta = g.delta().clone();
        delta[(row, col)] += if im { c(0.0, size) } else { c(size, 0.0) };
        let bad = g.with_delta(delta).unwrap();
        prop_assert!(!validate_cqg(&bad, DEFAULT_TOL).pass);
        prop_assert!(!run_pipeline(&bad, DEFAULT_TOL, 42, Stage::Full).pass);
    }

    #[test]
    fn haar_state_is_invariant_under_convolution(k in 0usize..8, a in 0usize..8) {
        // (h ⊗ f)Δ(a) = f(1) h(a) for the dual-basis functional f
        let g = builtin("kac_paljutkin").unwrap();
        let h = haar_state(&g, DEFAULT_TOL).unwrap();
        let f = qgroup::Functional::dual_basis(8, k);
        let x = g.basis(a);
        let lhs = h.eval(&g.convolve_af(&x, &f).unwrap());
        let rhs = f.eval(&g.unit()) * h.eval(&x);
        prop_assert!((lhs - rhs).norm() < 1e-12);
        let lhs = h.eval(&g.convolve_fa(&f, &x).unwrap());
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn haar_state_is_positive(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8)) {
        let g = builtin("kac_paljutkin").unwrap();
        let h = haar_state(&g, DEFAULT_TOL).unwrap();
        let a = AlgebraElement(coeffs.iter().map(|&(re, im)| c(re, im)).collect::<Vec<_>>().into());
        let v = h.eval(&g.mul(&g.star(&a).unwrap(), &a).unwrap());
        prop_assert!(v.re >= -1e-12 && v.im.abs() < 1e-12);
    }
}
