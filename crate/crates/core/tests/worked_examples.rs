use oqec::algebra::{commutant, commutant_of, generate_algebra};
use oqec::channel::restricted_choi;
use oqec::correction::{
    kl_check, oqec_check, reduce_to_standard, synthesize_oqec_recovery,
    synthesize_standard_recovery, triple_deviation, verify_correctable_triple,
};
use oqec::examples::{example1, example2, example_oqec, example_oqec_with_basis, example_uns};
use oqec::noiseless::{
    extract_tau, find_ns_unital, fixed_points, verify_ns, verify_ns_semantic,
    SubsystemDecomposition,
};
use oqec::uns::{uns_algebra, verify_uns};
use oqec::{ComplexMatrix, QuantumChannel, Tolerance, C64};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[test]
fn example1_is_noiseless_across_gamma() {
    for gamma in [0.0, 0.3, 0.7, 1.0] {
        let ex = example1(gamma).unwrap();
        let dec = ex.decomposition("AB").unwrap();
        let r = verify_ns(&ex.channel, dec, &tol()).unwrap();
        assert!(r.noiseless, "gamma {gamma}: {r:?}");
        assert!(verify_ns_semantic(&ex.channel, dec, &tol()).unwrap().noiseless);
    }
}

#[test]
fn example1_tau_is_the_a_channel() {
    let gamma: f64 = 0.3;
    let ex = example1(gamma).unwrap();
    let dec = ex.decomposition("AB").unwrap();
    let (g, h) = (gamma.sqrt(), (1.0 - gamma).sqrt());
    let f = [
        ComplexMatrix::from_real_rows(&[&[g, 0.0], &[0.0, h]]),
        ComplexMatrix::from_real_rows(&[&[0.0, g], &[h, 0.0]]),
    ];
    let sa = ComplexMatrix::from_row_major(2, 2, vec![c(0.6), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.4)]).unwrap();
    let sb = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
    let tau = extract_tau(&ex.channel, dec, &sa, &sb, &tol()).unwrap();
    let want = &(&(&f[0] * &sa) * &f[0].adjoint()) + &(&(&f[1] * &sa) * &f[1].adjoint());
    assert!(tau.distance(&want) < 1e-12);
}

#[test]
fn example1_unital_only_at_one_half() {
    assert!(example1(0.5).unwrap().channel.is_unital(&tol()));
    let r = example1(0.3).unwrap().channel.report(&tol());
    assert!(r.trace_preserving && !r.unital);
    // Σ E_i E_i† = diag(2γ, 2(1−γ)) ⊗ 1
    assert!((r.unital_residual - (2.0 * (0.16f64 + 0.16)).sqrt()).abs() < 1e-12);
}

#[test]
fn example2_both_subsystems_are_noiseless() {
    for q in [0.1, 0.25, 0.4] {
        let ex = example2(q).unwrap();
        for label in ["B1", "B2"] {
            let dec = ex.decomposition(label).unwrap();
            let r = verify_ns(&ex.channel, dec, &tol()).unwrap();
            assert!(r.noiseless, "q {q} {label}: {r:?}");
            assert!(verify_ns_semantic(&ex.channel, dec, &tol()).unwrap().noiseless);
        }
    }
}

#[test]
fn example2_b1_is_outside_the_noise_commutant() {
    let ex = example2(0.25).unwrap();
    let e1 = &ex.channel.kraus()[1];
    let s = ComplexMatrix::ket_bra(4, 1, 1);
    assert!((e1 * &s).frobenius_norm() < 1e-15);
    assert!((&s * e1).frobenius_norm() > 0.1);
    let comm = commutant(&generate_algebra(ex.channel.kraus(), &tol()).unwrap(), &tol()).unwrap();
    assert!(!comm.contains(&s, &tol()));
}

#[test]
fn example2_fixed_points_contain_b1_operators() {
    let ex = example2(0.25).unwrap();
    let fix = fixed_points(&ex.channel, &tol());
    for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        assert!(fix.contains(&ComplexMatrix::ket_bra(4, i, j), &tol()));
    }
}

#[test]
fn example2_lambda_table_from_the_kraus_operators() {
    // P_22 E_1 P_11 = β P_21: E_1|00⟩ = β(|00⟩ + |10⟩), E_1|11⟩ = β(|01⟩ + |11⟩)
    let q: f64 = 0.25;
    let (alpha, beta) = ((1.0 - 2.0 * q).sqrt(), q.sqrt());
    let ex = example2(q).unwrap();
    let r = verify_ns(&ex.channel, ex.decomposition("B2").unwrap(), &tol()).unwrap();
    let want = [
        ComplexMatrix::from_real_rows(&[&[alpha, 0.0], &[0.0, 1.0]]),
        ComplexMatrix::from_real_rows(&[&[beta, 0.0], &[beta, 0.0]]),
    ];
    for a in 0..2 {
        assert!(r.lambda[a].distance(&want[a]) < 1e-12, "{:?}", r.lambda[a]);
    }
    // τ = Σ_a λ_a λ_a†
    let tau = &(&want[0] * &want[0].adjoint()) + &(&want[1] * &want[1].adjoint());
    let reference_tau = ComplexMatrix::from_real_rows(&[&[1.0 - q, q], &[q, 1.0 + q]]);
    assert!(tau.distance(&reference_tau) < 1e-12);
}

#[test]
fn example2_tau_matrix() {
    let ex = example2(0.25).unwrap();
    let dec = ex.decomposition("B2").unwrap();
    let id = ComplexMatrix::identity(2);
    let tau = extract_tau(&ex.channel, dec, &id, &ComplexMatrix::ket_bra(2, 0, 0), &tol()).unwrap();
    let want = ComplexMatrix::from_real_rows(&[&[0.75, 0.25], &[0.25, 1.25]]);
    assert!(tau.distance(&want) < 1e-12);
    assert!(verify_ns_semantic(&ex.channel, dec, &tol()).unwrap().tau.distance(&want) < 1e-12);
}

#[test]
fn example2_b2_gives_a_code_subspace() {
    let ex = example2(0.25).unwrap();
    let dec = ex.decomposition("B2").unwrap();
    let id = QuantumChannel::identity(4);
    let red = reduce_to_standard(&id, &ex.channel, dec, 1, &tol()).unwrap();
    assert!(kl_check(&ex.channel, &red.code, &tol()).unwrap().satisfied);
    assert!(red.deviation < 1e-9);
    assert!((red.factor - 1.0).abs() < 1e-9);
    // B1 with m = 1 is also a subsystem code
    let b1 = ex.decomposition("B1").unwrap();
    assert!(oqec_check(&ex.channel, b1, &tol()).unwrap().correctable);
}

#[test]
fn oqec_example_lambda_relations() {
    let ex = example_oqec().unwrap();
    let dec = ex.decomposition("AB").unwrap();
    let r = oqec_check(&ex.channel, dec, &tol()).unwrap();
    assert!(r.correctable, "{r:?}");
    for a in 0..2 {
        for b in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let want = match (a == b, k == l) {
                        (false, _) => 0.0,
                        (true, true) => 0.5,
                        // E_1: +1/2, E_2: −1/2 on the off-diagonal units
                        (true, false) => if a == 0 { 0.5 } else { -0.5 },
                    };
                    assert!((r.lambda(a, b, k, l) - c(want)).norm() < 1e-12);
                }
            }
        }
    }
    let kl = kl_check(&ex.channel, &dec.matrix_unit(0, 0), &tol()).unwrap();
    assert!(kl.satisfied);
    assert!(kl.lambda.distance(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-12);
}

#[test]
fn oqec_example_is_not_noiseless() {
    let ex = example_oqec().unwrap();
    let dec = ex.decomposition("AB").unwrap();
    assert!(!verify_ns(&ex.channel, dec, &tol()).unwrap().noiseless);
    assert!(!verify_correctable_triple(&QuantumChannel::identity(4), &ex.channel, dec, &tol()).unwrap());
}

#[test]
fn oqec_example_known_recovery() {
    let ex = example_oqec().unwrap();
    let dec = ex.decomposition("AB").unwrap();
    let r = &ex.recoveries[0].channel;
    assert!(triple_deviation(r, &ex.channel, dec).unwrap() < 1e-9);
    // the B sector is noiseless for ℛ∘ℰ
    let re = QuantumChannel::compose(r, &ex.channel).unwrap();
    assert!(verify_ns(&re, dec, &tol()).unwrap().noiseless);
    // fixes all σ = 1_2 ⊗ σ_1
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let s = dec.embed_product(&ComplexMatrix::identity(2), &ComplexMatrix::ket_bra(2, i, j));
        assert!(re.apply(&s).unwrap().distance(&s) < 1e-12);
    }
}

#[test]
fn oqec_example_synthesized_recovery() {
    for seed_basis in [None, Some(ComplexMatrix::identity(4))] {
        let ex = match &seed_basis {
            None => example_oqec().unwrap(),
            Some(b) => example_oqec_with_basis(b).unwrap(),
        };
        let dec = ex.decomposition("AB").unwrap();
        let rec = synthesize_oqec_recovery(&ex.channel, dec, &tol()).unwrap();
        assert!(triple_deviation(&rec.channel, &ex.channel, dec).unwrap() < 1e-9);
        let re = QuantumChannel::compose(&rec.channel, &ex.channel).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let s = dec.embed_product(&ComplexMatrix::identity(2), &ComplexMatrix::ket_bra(2, i, j));
            assert!(re.apply(&s).unwrap().distance(&s) < 1e-9);
        }
    }
}

#[test]
fn oqec_example_standard_recovery_matches_known_one_on_the_code() {
    let ex = example_oqec().unwrap();
    let dec = ex.decomposition("AB").unwrap();
    let p1 = dec.matrix_unit(0, 0);
    let rec = synthesize_standard_recovery(&ex.channel, &p1, &tol()).unwrap();
    // the known recovery fixes P_11 only after compression onto P_11
    let known = &reduce_to_standard(&ex.recoveries[0].channel, &ex.channel, dec, 1, &tol())
        .unwrap()
        .recovery;
    let code = p1.range_basis(&tol());
    let run = |r: &QuantumChannel| {
        let r = r.clone();
        let e = ex.channel.clone();
        restricted_choi(&code, move |s| r.apply(&e.apply(s).unwrap()).unwrap())
    };
    assert!(run(&rec.channel).distance(&run(known)) < 1e-9);
}

#[test]
fn oqec_example_reduction() {
    let ex = example_oqec().unwrap();
    let dec = ex.decomposition("AB").unwrap();
    for k in 1..=2 {
        let red = reduce_to_standard(&ex.recoveries[0].channel, &ex.channel, dec, k, &tol()).unwrap();
        assert!(red.deviation < 1e-9);
        assert!((red.factor - 1.0).abs() < 1e-9);
        assert!(kl_check(&ex.channel, &red.code, &tol()).unwrap().satisfied);
    }
}

#[test]
fn uns_example() {
    let ex = example_uns().unwrap();
    let z = ComplexMatrix::diag_real(&[1.0, -1.0]);
    let id = ComplexMatrix::identity(2);
    let comm = commutant_of(&[z.tensor(&id), id.tensor(&z)], &tol()).unwrap();
    assert_eq!(comm.dim(), 4);
    let u = ex.unitary.clone().unwrap();
    let r = uns_algebra(&ex.channel, &u, &tol()).unwrap();
    assert_eq!(r.algebra.dim(), 6);
    assert_eq!(r.structure.sorted_dims(), vec![(2, 1), (1, 1), (1, 1)]);
    assert!(r.evolve_residual < 1e-10);
    let dec = ex.decomposition("UNS").unwrap();
    assert!(verify_uns(&ex.channel, dec, &u, &tol()).unwrap());
    assert!(!verify_uns(&ex.channel, dec, &ComplexMatrix::identity(4), &tol()).unwrap());
    // the M_2 sector found by the decomposition is corrected too
    let sectors = r.sectors();
    assert_eq!((sectors[0].m(), sectors[0].n()), (1, 2));
    assert!(verify_uns(&ex.channel, &sectors[0], &u, &tol()).unwrap());
}

#[test]
fn uns_example_has_no_nontrivial_noiseless_subsystem() {
    let ex = example_uns().unwrap();
    let found = find_ns_unital(&ex.channel, &tol(), 0).unwrap();
    assert!(found.noiseless.is_empty());
    assert_eq!(found.classical.len(), 4);
}

#[test]
fn full_space_is_noiseless_for_identity() {
    let dec = SubsystemDecomposition::standard(4, 1, 4).unwrap();
    assert!(verify_ns(&QuantumChannel::identity(4), &dec, &tol()).unwrap().noiseless);
}
