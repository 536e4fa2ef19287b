use ewitness::catalogue;
use ewitness::mdiew::{
    decompose_witness, ideal_projector, joint_probability, mdiew_value, reconstruct, run_audit, tomographic_basis,
    AuditOptions, MdiewScenario, PovmElement, PovmModel, StateBasis,
};
use ewitness::witness::expectation;
use ewitness::{sampling, seed, Error, Execution, HermitianOperator, SystemLayout, Witness, C64};
use nalgebra::DMatrix;

fn witnesses() -> Vec<Witness> {
    vec![catalogue::choi(), catalogue::swap(2).unwrap()]
}

/// `P(0,0|s,t)` for qubits with `E = F = P+`, summed index by index.
fn brute_probability(rho: &DMatrix<C64>, sigma: &DMatrix<C64>, tau: &DMatrix<C64>) -> f64 {
    // <P+| on (x', x) has amplitude delta(x', x)/sqrt2, so with primed
    // indices tied to unprimed ones
    // P = 1/4 sum_{x,y,u,v} sigma^T[x, u] rho[(x, y), (u, v)] tau^T[y, v].
    let mut acc = C64::new(0.0, 0.0);
    for x in 0..2 {
        for y in 0..2 {
            for u in 0..2 {
                for v in 0..2 {
                    acc += sigma[(u, x)] * rho[(x * 2 + y, u * 2 + v)] * tau[(v, y)];
                }
            }
        }
    }
    acc.re / 4.0
}

#[test]
fn tomographic_decompositions_are_exact_and_real() {
    for w in witnesses() {
        let (da, db) = w.party_dims();
        let (l, r) = (tomographic_basis(da).unwrap(), tomographic_basis(db).unwrap());
        let dec = decompose_witness(&w, &l, &r).unwrap();
        assert!(dec.residual <= 1e-9, "{}", dec.residual);
        assert!(dec.max_imag <= 1e-10);
        assert!(reconstruct(&dec.beta, &l, &r).unwrap().distance(&w.op) <= 1e-9);
    }
    let mut rng = seed::rng(8);
    let w = Witness::new(sampling::random_hermitian(SystemLayout::bipartite(2, 3).unwrap(), &mut rng).unwrap(), "r")
        .unwrap();
    let dec = decompose_witness(&w, &tomographic_basis(2).unwrap(), &tomographic_basis(3).unwrap()).unwrap();
    assert!(dec.residual <= 1e-9);
}

#[test]
fn ideal_value_matches_normalized_expectation() {
    for w in witnesses() {
        let (da, db) = w.party_dims();
        let scenario = MdiewScenario::ideal(w.clone()).unwrap();
        let mut rng = seed::rng(9);
        for _ in 0..100 {
            let rho = sampling::random_density_on(SystemLayout::bipartite(da, db).unwrap(), &mut rng).unwrap();
            let want = expectation(&w, &rho).unwrap() / (da * db) as f64;
            assert!((mdiew_value(&scenario, &rho).unwrap() - want).abs() <= 1e-9);
        }
    }
    let scenario = MdiewScenario::ideal(catalogue::choi()).unwrap();
    let v = mdiew_value(&scenario, &catalogue::psi_plus(3).unwrap()).unwrap();
    assert!((v + 1.0 / 9.0).abs() <= 1e-9, "{v}");
}

#[test]
fn qubit_probabilities_match_brute_force() {
    let mut rng = seed::rng(10);
    let basis = tomographic_basis(2).unwrap();
    let p = ideal_projector(2).unwrap();
    for _ in 0..10 {
        let rho = sampling::random_density_on(SystemLayout::bipartite(2, 2).unwrap(), &mut rng).unwrap();
        for sigma in basis.states() {
            for tau in basis.states() {
                let got = joint_probability(&rho, sigma, tau, &p, &p).unwrap();
                let want = brute_probability(rho.matrix(), sigma.matrix(), tau.matrix());
                assert!((got - want).abs() < 1e-13);
            }
        }
    }
}

#[test]
fn product_states_factorize_under_ideal_measurements() {
    let mut rng = seed::rng(11);
    for (da, db) in [(2, 2), (2, 3), (3, 3)] {
        let (ra, rb) = (
            sampling::random_density_on(SystemLayout::single(da).unwrap(), &mut rng).unwrap(),
            sampling::random_density_on(SystemLayout::single(db).unwrap(), &mut rng).unwrap(),
        );
        let rho = ra.kron(&rb);
        let (e, f) = (ideal_projector(da).unwrap(), ideal_projector(db).unwrap());
        for sigma in tomographic_basis(da).unwrap().states() {
            for tau in tomographic_basis(db).unwrap().states() {
                let want = sigma.trace_product(&ra).unwrap().re * tau.trace_product(&rb).unwrap().re / (da * db) as f64;
                let got = joint_probability(&rho, sigma, tau, &e, &f).unwrap();
                assert!((got - want).abs() < 1e-13);
            }
        }
    }
}

fn audit(w: Witness, model: PovmModel, embed: Option<(usize, usize)>, trials: usize) -> ewitness::mdiew::AuditReport {
    let scenario = MdiewScenario::ideal(w).unwrap();
    let opts = AuditOptions { trials, seed: 12, povm_model: model, embed, ..AuditOptions::default() };
    run_audit(&scenario, &opts).unwrap().0
}

#[test]
fn separable_states_stay_nonnegative_under_every_model() {
    for w in witnesses() {
        for model in [PovmModel::Ideal, PovmModel::Misaligned, PovmModel::Arbitrary] {
            let r = audit(w.clone(), model, None, 200);
            assert!(r.passed, "{} {model:?}: {r:?}", w.provenance);
            assert!(r.min_direct >= -1e-9 && r.max_route_gap <= 1e-9);
        }
        let (da, db) = w.party_dims();
        let r = audit(w.clone(), PovmModel::Arbitrary, Some((da + 1, db + 1)), 100);
        assert!(r.passed, "{} embedded: {r:?}", w.provenance);
    }
}

#[test]
fn audit_flags_a_non_witness() {
    let neg = Witness::new(catalogue::swap_matrix(2).unwrap().scale(-1.0), "-swap").unwrap();
    let r = audit(neg, PovmModel::Ideal, None, 50);
    assert!(!r.passed);
    assert!(r.negative_trials > 0);
    assert_eq!(r.disagreeing_trials, 0);
}

#[test]
fn audit_is_reproducible_and_thread_independent() {
    let scenario = MdiewScenario::ideal(catalogue::choi()).unwrap();
    let par = AuditOptions { trials: 40, ..AuditOptions::default() };
    let seq = AuditOptions { exec: Execution::Sequential, ..par };
    let (a, oa) = run_audit(&scenario, &par).unwrap();
    let (_, ob) = run_audit(&scenario, &seq).unwrap();
    assert_eq!(oa, ob);
    assert_eq!(a.worst_trial, oa.iter().enumerate().min_by(|x, y| x.1.direct.total_cmp(&y.1.direct)).unwrap().0);
}

#[test]
fn invalid_inputs() {
    let l = SystemLayout::single(2).unwrap();
    let zero = HermitianOperator::diagonal(l.clone(), &[1.0, 0.0]).unwrap();
    let mut states = tomographic_basis(2).unwrap().states().to_vec();
    states[3] = zero;
    assert!(matches!(StateBasis::new(states), Err(Error::RankDeficient { .. })));
    assert!(StateBasis::new(tomographic_basis(2).unwrap().states()[..3].to_vec()).is_err());
    assert!(PovmElement::new(HermitianOperator::identity(l.clone()).scale(1.5)).is_err());
    let scenario = MdiewScenario::ideal(catalogue::swap(2).unwrap()).unwrap();
    let bad = scenario.to_json().unwrap().replacen("\"beta\":[[", "\"beta\":[[5.0,", 1);
    assert!(MdiewScenario::from_json(&bad).is_err());
    let zero_trials = AuditOptions { trials: 0, ..AuditOptions::default() };
    assert!(run_audit(&scenario, &zero_trials).is_err());
}

#[test]
fn scenario_json_round_trip() {
    let scenario = MdiewScenario::ideal(catalogue::choi()).unwrap();
    let back = MdiewScenario::from_json(&scenario.to_json().unwrap()).unwrap();
    assert_eq!(back.beta, scenario.beta);
    assert_eq!(back.witness.op, scenario.witness.op);
    assert_eq!(back.povm_left, scenario.povm_left);
}
