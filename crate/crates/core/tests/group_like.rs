use ddgl2::catalog::{self, instantiate_case, sample_parameters};
use ddgl2::ddq::{coproduct_chain, determinant_four_term, quantum_determinant, Generator};
use ddgl2::numerics::{c, kron, kron_all};

#[test]
fn four_term_determinant_is_group_like_on_every_row() {
    for id in catalog::case_ids() {
        let p = sample_parameters(id, 1).unwrap();
        let rep = instantiate_case(id, &p, c(2.0)).unwrap();
        let d = quantum_determinant(&rep);
        let four = determinant_four_term(&rep, &rep).unwrap();
        assert!(four.dist(&kron(&d, &d)) <= 1e-10, "{id}");
    }
}

#[test]
fn three_site_determinant_factorizes() {
    for id in ["1.1", "3.2", "6.10"] {
        let p = sample_parameters(id, 1).unwrap();
        let rep = instantiate_case(id, &p, c(2.0)).unwrap();
        let d = quantum_determinant(&rep);
        let chain = coproduct_chain(Generator::D, &[&rep, &rep, &rep]).unwrap();
        let expected = kron_all([&d, &d, &d]).unwrap();
        assert!(chain.dist(&expected) <= 1e-10, "{id}: {}", chain.dist(&expected));
    }
}

#[test]
fn mixed_sites_factorize() {
    let a = instantiate_case("1.1", &sample_parameters("1.1", 1).unwrap(), c(2.0)).unwrap();
    let b = instantiate_case("1.3", &sample_parameters("1.3", 2).unwrap(), c(2.0)).unwrap();
    let chain = coproduct_chain(Generator::D, &[&a, &b]).unwrap();
    let expected = kron(&quantum_determinant(&a), &quantum_determinant(&b));
    assert!(chain.dist(&expected) <= 1e-10);
}
