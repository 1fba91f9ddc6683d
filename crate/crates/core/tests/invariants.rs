//! Randomized algebraic invariants. Proptest drives the seeds; the matrices
//! themselves come from the library's own seeded generators.

use kreinrel::boundary::{main_transform, weyl};
use kreinrel::harness::gen::{
    gen_obt, gen_unitary_boundary_pair, random_krein, random_relation, random_subspace, trial_rng, Flavor,
    InstanceSpec,
};
use kreinrel::krein::krein_orth_complement;
use kreinrel::numkernel::{c, intersect, orth_complement, subspace_eq, subspace_sum, Tolerance};
use kreinrel::relcalc::{
    compose, cw_sum, hilbert_adjoint, inverse, krein_adjoint, rel_contains, rel_eq, rel_intersect,
};
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn krein_adjoint_is_an_involution(seed in any::<u64>(), n in 1usize..5, m in 1usize..5, frac in 0.0f64..1.0) {
        let mut rng = trial_rng(seed, 0);
        let kn = random_krein(&mut rng, n, n / 2).unwrap();
        let km = random_krein(&mut rng, m, m.min(1)).unwrap();
        let d = ((n + m) as f64 * frac) as usize;
        let t = random_relation(&mut rng, n, m, d);
        let ta = krein_adjoint(&t, &kn, &km, tol()).unwrap();
        prop_assert_eq!(ta.dim(), n + m - d);
        let taa = krein_adjoint(&ta, &km, &kn, tol()).unwrap();
        prop_assert!(rel_eq(&taa, &t, tol()));
    }

    #[test]
    fn hilbert_adjoint_swaps_dom_and_ker(seed in any::<u64>(), n in 1usize..5, d in 0usize..6) {
        let mut rng = trial_rng(seed, 1);
        let t = random_relation(&mut rng, n, n, d.min(2 * n));
        let ts = hilbert_adjoint(&t, tol()).unwrap();
        // ker T* = (ran T)^⊥ and mul T* = (dom T)^⊥
        prop_assert!(subspace_eq(&ts.ker(), &orth_complement(&t.ran(), tol()).unwrap(), tol()));
        prop_assert!(subspace_eq(&ts.mul(), &orth_complement(&t.dom(), tol()).unwrap(), tol()));
    }

    #[test]
    fn inverse_swaps_components(seed in any::<u64>(), n in 1usize..5, d in 0usize..8) {
        let mut rng = trial_rng(seed, 2);
        let t = random_relation(&mut rng, n, n, d.min(2 * n));
        let ti = inverse(&t);
        prop_assert!(subspace_eq(&ti.dom(), &t.ran(), tol()));
        prop_assert!(subspace_eq(&ti.ker(), &t.mul(), tol()));
        prop_assert!(rel_eq(&inverse(&ti), &t, tol()));
    }

    #[test]
    fn subspace_lattice_dimensions(seed in any::<u64>(), n in 1usize..7, a in 0usize..7, b in 0usize..7) {
        let mut rng = trial_rng(seed, 3);
        let u = random_subspace(&mut rng, n, a.min(n));
        let v = random_subspace(&mut rng, n, b.min(n));
        let cap = intersect(&u, &v, tol()).unwrap();
        let cup = subspace_sum(&u, &v, tol()).unwrap();
        prop_assert_eq!(cap.dim() + cup.dim(), u.dim() + v.dim());
        let uc = orth_complement(&u, tol()).unwrap();
        prop_assert_eq!(uc.dim(), n - u.dim());
        prop_assert!(subspace_eq(&orth_complement(&uc, tol()).unwrap(), &u, tol()));
    }

    #[test]
    fn krein_orth_complement_is_an_involution(seed in any::<u64>(), n in 1usize..6, k in 0usize..6) {
        let mut rng = trial_rng(seed, 4);
        let kk = random_krein(&mut rng, n, n / 2).unwrap();
        let u = random_subspace(&mut rng, n, k.min(n));
        let uc = krein_orth_complement(&u, &kk, tol()).unwrap();
        prop_assert_eq!(uc.dim(), n - u.dim());
        prop_assert!(subspace_eq(&krein_orth_complement(&uc, &kk, tol()).unwrap(), &u, tol()));
    }

    #[test]
    fn sum_and_intersection_adjoint_duality(seed in any::<u64>(), n in 1usize..4, a in 0usize..7, b in 0usize..7) {
        let mut rng = trial_rng(seed, 5);
        let v = random_relation(&mut rng, n, n, a.min(2 * n));
        let w = random_relation(&mut rng, n, n, b.min(2 * n));
        let lhs = hilbert_adjoint(&cw_sum(&v, &w, tol()).unwrap(), tol()).unwrap();
        let rhs = rel_intersect(
            &hilbert_adjoint(&v, tol()).unwrap(),
            &hilbert_adjoint(&w, tol()).unwrap(),
            tol(),
        )
        .unwrap();
        prop_assert!(rel_eq(&lhs, &rhs, tol()));
    }

    #[test]
    fn composition_adjoint_contains_reversed_product(seed in any::<u64>(), n in 1usize..4, a in 1usize..7, b in 1usize..7) {
        let mut rng = trial_rng(seed, 6);
        let x = random_relation(&mut rng, n, n, a.min(2 * n));
        let r = random_relation(&mut rng, n, n, b.min(2 * n));
        let rx = compose(&r, &x, tol()).unwrap();
        let lhs = hilbert_adjoint(&rx, tol()).unwrap();
        let rhs = compose(&hilbert_adjoint(&x, tol()).unwrap(), &hilbert_adjoint(&r, tol()).unwrap(), tol()).unwrap();
        // X*R* ⊆ (RX)* holds without any range condition
        prop_assert!(rel_contains(&lhs, &rhs, tol()));
    }

    #[test]
    fn unitary_generator_is_sound(seed in any::<u64>(), n in 1usize..4, m_off in 0usize..3) {
        let m = 1 + m_off.min(n - 1);
        let spec = InstanceSpec::new(n, m, n / 2, seed, Flavor::UnitaryBp).unwrap();
        let bp = gen_unitary_boundary_pair(&spec).unwrap();
        prop_assert!(bp.is_unitary());
        prop_assert!(bp.is_isometric());
    }

    #[test]
    fn obt_weyl_function_is_an_operator(seed in any::<u64>(), n in 1usize..4, m_off in 0usize..3, re in -3.0f64..3.0, im in 0.1f64..3.0) {
        let m = 1 + m_off.min(n - 1);
        let spec = InstanceSpec::new(n, m, 0, seed, Flavor::Obt).unwrap();
        let bp = gen_obt(&spec).unwrap();
        prop_assert!(bp.is_obt());
        let z = c(re, im);
        let w = weyl(&bp, z).unwrap();
        prop_assert_eq!(w.m.dim(), m);
        prop_assert!(w.m.is_operator());
        // For a Hilbert-space triplet M(z)* = M(z̄).
        let wz = weyl(&bp, z.conj()).unwrap();
        prop_assert!(rel_eq(&hilbert_adjoint(&w.m, tol()).unwrap(), &wz.m, tol()));
        prop_assert!(main_transform(&bp).dim() > 0);
    }
}
