use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weilgap::arith::numth::is_prime;
use weilgap::arith::Mat2;
use weilgap::multiplier::{
    b_invariance, char_multiplier, cusp_parameter, pretend_constraints, random_twist,
    sixth_root_check, solve_pretend, DirichletChar, MultiplierSystem, Provenance,
};
use weilgap::presentation::build_presentation;

#[test]
fn level_101_kernel_and_infinite_order() {
    let gens = build_presentation(101).unwrap();
    let chi = DirichletChar::new(101, 10).unwrap();
    let cs = pretend_constraints(&gens, &chi, 5).unwrap();
    assert!(cs.rows.len() <= 12);
    let sol = solve_pretend(&cs, &chi, &gens, 0).unwrap();
    println!(
        "p=101 Q=5: free rank {}, rank {}, kernel {}",
        sol.free_rank, sol.rank, sol.kernel_dim
    );
    assert!(sol.kernel_dim >= 5);
    assert!(sol.multiplier.has_infinite_order());
    let kappa_i = cusp_parameter(&sol.multiplier, &gens, &Mat2::identity()).unwrap();
    let kappa_t = cusp_parameter(&sol.multiplier, &gens, &Mat2::t()).unwrap();
    assert!(kappa_i.is_zero() && kappa_t.is_zero());
}

#[test]
fn level_29_single_modulus() {
    let gens = build_presentation(29).unwrap();
    let chi = DirichletChar::trivial(29).unwrap();
    let cs = pretend_constraints(&gens, &chi, 1).unwrap();
    let sol = solve_pretend(&cs, &chi, &gens, 0).unwrap();
    println!("p=29 Q=1: kernel {} (heuristic bound holds: {})", sol.kernel_dim, sol.heuristic_bound_holds);
    assert!(sol.kernel_dim >= 1);
    assert!(!sol.heuristic_bound_holds);
}

#[test]
fn every_kernel_vector_solves_the_system() {
    let gens = build_presentation(61).unwrap();
    let chi = DirichletChar::quadratic(61).unwrap();
    let cs = pretend_constraints(&gens, &chi, 3).unwrap();
    let first = solve_pretend(&cs, &chi, &gens, 0).unwrap();
    for i in 0..first.kernel_dim {
        let sol = solve_pretend(&cs, &chi, &gens, i).unwrap();
        for row in &cs.rows {
            assert_eq!(sol.multiplier.apply(&gens, &row.exp), row.target);
        }
    }
    assert!(solve_pretend(&cs, &chi, &gens, first.kernel_dim).is_err());
}

#[test]
fn character_multiplier_matches_bottom_right_entry() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in [13u64, 29] {
        let gens = build_presentation(p).unwrap();
        let chi = DirichletChar::new(p, 2).unwrap();
        let ms = char_multiplier(&chi, &gens).unwrap();
        for _ in 0..50 {
            let g = gens.random_element(&mut rng, 1_000_000);
            let d = num_traits::ToPrimitive::to_i64(&g.d).unwrap();
            assert_eq!(ms.evaluate(&gens, &g).unwrap(), chi.angle(d).unwrap());
        }
    }
}

#[test]
fn sixth_roots_for_small_primes() {
    for p in (5..200u64).filter(|&p| is_prime(p)) {
        let gens = build_presentation(p).unwrap();
        let r = sixth_root_check(&gens).unwrap();
        assert!(r.consistent, "p = {p}: {r:?}");
        assert_eq!(6 % r.torsion_order, 0);
    }
}

#[test]
fn b_lifts_differ_by_kappa_classes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [13u64, 29] {
        let gens = build_presentation(p).unwrap();
        let chi = DirichletChar::trivial(p).unwrap();
        let cs = pretend_constraints(&gens, &chi, 1).unwrap();
        let sol = solve_pretend(&cs, &chi, &gens, 0).unwrap();
        for _ in 0..20 {
            let (a, q) = random_twist(&mut rng, p, 12);
            let (_, b) = weilgap::multiplier::pretend_matrix(p, a, q).unwrap();
            let t = rand::Rng::gen_range(&mut rng, -20..=20);
            let r = b_invariance(&gens, a, q, b, t).unwrap();
            assert!(r.holds(), "p={p} a={a} q={q}: {r:?}");
            let v1 = sol.multiplier.apply(&gens, &gens.abelianize_matrix(
                &weilgap::multiplier::pretend_matrix_with_b(p, a, q, b).unwrap()).unwrap());
            let v2 = sol.multiplier.apply(&gens, &gens.abelianize_matrix(
                &weilgap::multiplier::pretend_matrix_with_b(p, a, q, r.b_prime).unwrap()).unwrap());
            assert_eq!(v1, v2);
        }
    }
}

#[test]
fn provenance_is_recorded() {
    let gens = build_presentation(13).unwrap();
    let chi = DirichletChar::trivial(13).unwrap();
    let cs = pretend_constraints(&gens, &chi, 4).unwrap();
    assert!(matches!(cs.rows[0].provenance, Provenance::Kappa(_)));
    let pretend = cs
        .rows
        .iter()
        .filter(|r| matches!(r.provenance, Provenance::Pretend { .. }))
        .count();
    assert_eq!(pretend, 1 + 1 + 2 + 2);
    let trivial = MultiplierSystem::trivial(&gens);
    assert!(cs.rows.iter().all(|r| trivial.apply(&gens, &r.exp) == r.target));
}
