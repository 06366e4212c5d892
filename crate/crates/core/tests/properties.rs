use proptest::prelude::*;

use ddgl2::analysis::{canonical_span, operator_algebra_closure};
use ddgl2::catalog::{self, central_powers_check, instantiate_case, root_of_unity_rep, sample_parameters_at, CyclicModuleSpec, CyclicVariant};
use ddgl2::chain::{chain_hamiltonian, global_action, ChainSpec};
use ddgl2::ddq::{check_relations, coproduct_chain, coproduct_chain_split, Generator};
use ddgl2::numerics::{c, in_span, span_basis, C64, Tolerance};

const VALID: [&str; 8] = ["1.1", "1.3", "2.1", "2.2", "3.2", "4.3", "5.4", "6.10"];

fn q_value() -> impl Strategy<Value = C64> {
    prop::sample::select(vec![2.0, 3.0, 0.5, -3.0, 5.0 / 3.0]).prop_map(c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn valid_rows_satisfy_relations_for_any_draw(idx in 0..VALID.len(), seed in 0u64..1000, q in q_value()) {
        let id = VALID[idx];
        let tol = Tolerance::default();
        let p = sample_parameters_at(id, seed, q).unwrap();
        let rep = instantiate_case(id, &p, q).unwrap();
        let rel = check_relations(&rep, &tol);
        prop_assert!(rel.passes(&tol), "{} {:?}", id, rel.failed(&tol));
    }

    #[test]
    fn coproduct_is_coassociative(idx in 0..VALID.len(), seed in 0u64..1000, g in 0usize..5) {
        let id = VALID[idx];
        let p = sample_parameters_at(id, seed, c(2.0)).unwrap();
        let rep = instantiate_case(id, &p, c(2.0)).unwrap();
        let g = Generator::ALL[g];
        let sites = [&rep, &rep, &rep];
        let left = coproduct_chain_split(g, &sites, 1).unwrap();
        let right = coproduct_chain_split(g, &sites, 2).unwrap();
        let scale = left.norm().max(1.0);
        prop_assert!(left.dist(&right) <= 1e-10 * scale);
        prop_assert!(left.dist(&coproduct_chain(g, &sites).unwrap()) <= 1e-10 * scale);
    }

    #[test]
    fn closure_is_multiplicatively_closed(idx in 0..VALID.len(), seed in 0u64..1000) {
        let id = VALID[idx];
        let tol = Tolerance::default();
        let p = sample_parameters_at(id, seed, c(2.0)).unwrap();
        let rep = instantiate_case(id, &p, c(2.0)).unwrap();
        let basis = operator_algebra_closure(&rep, &tol).unwrap();
        for a in &basis {
            for b in &basis {
                prop_assert!(in_span(&(a * b), &basis, &tol));
            }
        }
        for g in rep.generators() {
            prop_assert!(in_span(g, &basis, &tol));
        }
    }

    #[test]
    fn span_basis_is_orthonormal(idx in 0..catalog::CASES.len(), seed in 0u64..1000) {
        let id = catalog::CASES[idx].id;
        let tol = Tolerance::default();
        let p = sample_parameters_at(id, seed, c(2.0)).unwrap();
        let rep = instantiate_case(id, &p, c(2.0)).unwrap();
        let mats: Vec<_> = rep.generators().into_iter().cloned().collect();
        let basis = span_basis(&mats, &tol).unwrap();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((a.frobenius_inner(b) - c(want)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn canonical_span_ignores_the_chosen_basis(a in -4i32..=4, b in -4i32..=4, s in 1i32..=3, t in 1i32..=3) {
        let u = [c(1.0), c(a as f64), c(0.0)];
        let v = [c(0.0), c(b as f64), c(1.0)];
        let mix = |x: i32, y: i32| -> [C64; 3] {
            std::array::from_fn(|k| u[k] * (x as f64) + v[k] * (y as f64))
        };
        let reference = canonical_span(&[u, v], 1e-9);
        let mixed = canonical_span(&[mix(s, 1), mix(-1, t)], 1e-9);
        prop_assert_eq!(reference.len(), 2);
        for (x, y) in reference.iter().zip(&mixed) {
            for k in 0..3 {
                prop_assert!((x[k] - y[k]).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn diagonal_chains_commute_with_the_diagonal_generators(seed in 0u64..1000, a in -3i32..=3, b in -3i32..=3, k in -3i32..=3) {
        let p = sample_parameters_at("2.2", seed, c(2.0)).unwrap();
        let rep = instantiate_case("2.2", &p, c(2.0)).unwrap();
        let spec = ChainSpec::uniform(&rep, 3, [c(a as f64), c(b as f64), c(k as f64)]).unwrap();
        let h = chain_hamiltonian(&spec).unwrap();
        for g in [Generator::C11, Generator::C22, Generator::D] {
            let action = global_action(g, &spec).unwrap();
            prop_assert!(h.commutator(&action).norm() <= 1e-10 * h.norm().max(1.0));
        }
    }

    #[test]
    fn powers_are_central_at_roots_of_unity(p in 2usize..=7, alpha in 1i32..=4, eta in 1i32..=4) {
        let tol = Tolerance::default();
        let spec = CyclicModuleSpec::primitive(p, c(alpha as f64), c(1.0), c(eta as f64), CyclicVariant::Corrected);
        let rep = root_of_unity_rep(&spec).unwrap();
        prop_assert!(check_relations(&rep, &tol).passes(&tol));
        prop_assert!(central_powers_check(&rep, p, &tol).max_commutator <= 1e-9);
    }
}
