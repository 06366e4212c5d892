use ddgl2::analysis::analyze_case;
use ddgl2::catalog::{self, instantiate_case, instantiate_corrected, sample_parameters};
use ddgl2::ddq::{check_relations, quantum_determinant};
use ddgl2::numerics::{c, Tolerance};

/// Rows whose printed matrices break at least one defining relation.
const RELATION_FAILURES: [&str; 5] = ["3.1", "5.1", "6.2", "6.5", "6.11"];
/// Rows whose determinant differs from the family header.
const HEADER_FAILURES: [&str; 3] = ["3.1", "5.1", "6.11"];

#[test]
fn relations_hold_except_on_the_broken_rows() {
    let tol = Tolerance::default();
    for id in catalog::case_ids() {
        for seed in [1, 2, 3] {
            let p = sample_parameters(id, seed).unwrap();
            let rep = instantiate_case(id, &p, c(2.0)).unwrap();
            let rel = check_relations(&rep, &tol);
            assert!(rel.perturbation_norm <= 1e-12, "{id}: C12 C21 = {}", rel.perturbation_norm);
            assert_eq!(rel.passes(&tol), !RELATION_FAILURES.contains(&id), "{id} seed {seed}: {:?}", rel.failed(&tol));
        }
    }
}

#[test]
fn determinants_match_family_headers() {
    for id in catalog::case_ids() {
        let spec = catalog::case(id).unwrap();
        let p = sample_parameters(id, 1).unwrap();
        let rep = instantiate_case(id, &p, c(2.0)).unwrap();
        let resid = quantum_determinant(&rep).dist(&spec.d_expected(&p, c(2.0)).unwrap());
        assert_eq!(resid <= 1e-10, !HEADER_FAILURES.contains(&id), "{id}: {resid}");
    }
}

#[test]
fn corrected_rows_satisfy_everything() {
    let tol = Tolerance::default();
    for id in ["3.1", "5.1"] {
        let spec = catalog::case(id).unwrap();
        let p = sample_parameters(id, 1).unwrap();
        let fixed = instantiate_corrected(id, &p, c(2.0)).unwrap().unwrap();
        assert!(check_relations(&fixed, &tol).passes(&tol), "{id}");
        assert!(quantum_determinant(&fixed).dist(&spec.d_expected(&p, c(2.0)).unwrap()) <= 1e-10);
    }
}

// Frozen from an exact rational computation at q = 2 with the seed-1 draws.
#[test]
fn dimensions_match_exact_oracle() {
    let tol = Tolerance::default();
    for (id, dim_r, dim_i) in [("1.1", 7, 2), ("3.3", 5, 3), ("6.10", 4, 4)] {
        let p = sample_parameters(id, 1).unwrap();
        let a = analyze_case(id, &p, c(2.0), &tol).unwrap();
        assert_eq!((a.dim_r, a.dim_i), (dim_r, dim_i), "{id}");
    }
}

#[test]
fn computed_dimensions_are_seed_independent() {
    let tol = Tolerance::default();
    for id in catalog::case_ids() {
        let dims: Vec<(usize, usize)> = (1..=3)
            .map(|seed| {
                let a = analyze_case(id, &sample_parameters(id, seed).unwrap(), c(2.0), &tol).unwrap();
                (a.dim_r, a.dim_i)
            })
            .collect();
        assert!(dims.windows(2).all(|w| w[0] == w[1]), "{id}: {dims:?}");
    }
}
