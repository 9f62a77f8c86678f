//! Acceptance suite: ten criteria, each a property checked across seeded random
//! instances at desk scale (d <= 3, m <= 3, deg B <= 2, N <= 6) with pinned
//! tolerances. Run with `cargo test --test acceptance -- --nocapture` to see one
//! line per criterion.

use freeac::clark::{
    cauchy_isometry_defect, clark_family, transposition_w_in, verify_clark_in, ClarkContext,
};
use freeac::commutative::{
    build_herglotz_space, build_vb, check_free_lift, comm_dbr_space, comm_gleason, comm_moments,
    lift_from_extension, random_extension, symmetric_gram_cross_check, c_h2,
};
use freeac::gns::{build_gns, quasi_extreme_indicator, row_isometry_defect, stinespring_check};
use freeac::herglotz::{
    cayley_to_herglotz, cayley_to_schur, herglotz_from_moments, moments_from_herglotz,
    moments_from_schur,
};
use freeac::instance::{random_comm_schur_with, random_free_schur_with};
use freeac::kernels::{
    dbr_kernel, herglotz_kernel_from_h, herglotz_kernel_from_moments, psd_check,
};
use freeac::linalg::{eye, max_abs, opnorm, rand_unitary, CMat};
use freeac::realization::{
    comm_colligation_from_extension, comm_colligation_from_free, comm_transfer_coeffs,
    free_colligation, random_nilpotent_point, route_agreement_defect, transfer_coeffs,
    transfer_eval,
};
use freeac::series::{CommSeries, FreeSeries};
use freeac::tol;
use freeac::word::{enumerate_multi_indices, enumerate_words, MultiIndex, Word};
use freeac::Side;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(re, 0.0)
}

/// Deterministic schedule of 50 free Schur instances across desk-scale shapes.
fn schedule_50() -> Vec<(usize, usize, usize, usize, u64)> {
    let shapes = [
        (1usize, 1usize, 2usize, 6usize),
        (1, 2, 2, 5),
        (2, 1, 1, 5),
        (2, 1, 2, 4),
        (2, 2, 2, 4),
        (2, 3, 1, 3),
        (3, 1, 1, 3),
        (3, 2, 1, 3),
        (2, 2, 1, 4),
        (3, 1, 2, 3),
    ];
    (0..50)
        .map(|k| {
            let (d, m, deg, n) = shapes[k % shapes.len()];
            (d, m, deg, n, 1000 + k as u64)
        })
        .collect()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {:44} {} ({detail})",
        criterion,
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn criterion_01_three_way_bijection_roundtrip() {
    let mut worst: f64 = 0.0;
    for (d, m, deg, n, seed) in schedule_50() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_free_schur_with(&mut rng, d, m, deg, n, 0.85).unwrap();
        let h = cayley_to_herglotz(&b).unwrap();
        let phi = moments_from_herglotz(&h).unwrap();
        let h2 = herglotz_from_moments(&phi, Side::Left).unwrap();
        let b2 = cayley_to_schur(&h2).unwrap();
        worst = worst.max(b2.max_coeff_diff(&b));
    }
    report(
        "1_three_way_bijection_roundtrip",
        worst < tol::ROUNDTRIP,
        &format!("50 instances, max coefficient error {worst:.3e} < 1e-10"),
    );
}

#[test]
fn criterion_02_positivity_suite() {
    let mut worst_neg: f64 = 0.0;
    let mut worst_complement: f64 = 0.0;
    for (k, (d, m, deg, n, seed)) in schedule_50().into_iter().enumerate() {
        if k % 5 != 0 {
            continue; // 10 instances: Gram assemblies dominate the runtime
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_free_schur_with(&mut rng, d, m, deg, n, 0.85).unwrap();
        let fock = freeac::fock::TruncatedFock::new(d, m, n).unwrap();
        let phi = moments_from_schur(&b).unwrap();
        for side in [Side::Left, Side::Right] {
            let series = match side {
                Side::Left => b.clone(),
                Side::Right => b.transpose_series(),
            };
            let (kern, _) = dbr_kernel(&series, side).unwrap();
            let gram = kern.gram();
            let rep = psd_check(&gram, tol::PSD_REL).unwrap();
            assert!(rep.pass, "dbr gram not PSD");
            worst_neg = worst_neg.max((-rep.min_eig).max(0.0) / rep.norm.max(1.0));
            let mult = series.mult_matrix(side, &fock).unwrap();
            worst_complement = worst_complement
                .max(max_abs(&(&gram - (eye(fock.dim()) - &mult * mult.adjoint()))));
            let herg = herglotz_kernel_from_moments(&phi, side).unwrap();
            let rep = psd_check(&herg.gram(), tol::PSD_REL).unwrap();
            assert!(rep.pass, "herglotz gram not PSD");
            worst_neg = worst_neg.max((-rep.min_eig).max(0.0) / rep.norm.max(1.0));
        }
        let gns = build_gns(&phi).unwrap();
        let rep = psd_check(gns.gram(), tol::PSD_REL).unwrap();
        assert!(rep.pass, "gns gram not PSD");
        worst_neg = worst_neg.max((-rep.min_eig).max(0.0) / rep.norm.max(1.0));
    }
    report(
        "2_positivity_suite",
        worst_neg < tol::PSD_REL && worst_complement < tol::DBR_GRAM,
        &format!(
            "min-eig deficiency {worst_neg:.3e} < 1e-9 rel, complement error {worst_complement:.3e} < 1e-12"
        ),
    );
}

#[test]
fn criterion_03_herglotz_kernel_crosscheck() {
    let mut all_equal = true;
    for (k, (d, m, deg, n, seed)) in schedule_50().into_iter().enumerate() {
        if k % 3 != 0 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_free_schur_with(&mut rng, d, m, deg, n, 0.85).unwrap();
        let h = cayley_to_herglotz(&b).unwrap();
        let phi = moments_from_herglotz(&h).unwrap();
        let left_eq = herglotz_kernel_from_h(&h, Side::Left)
            .unwrap()
            .bit_equal(&herglotz_kernel_from_moments(&phi, Side::Left).unwrap());
        let right_eq = herglotz_kernel_from_h(&h.transpose_series(), Side::Right)
            .unwrap()
            .bit_equal(&herglotz_kernel_from_moments(&phi, Side::Right).unwrap());
        all_equal = all_equal && left_eq && right_eq;
    }
    report(
        "3_herglotz_kernel_crosscheck",
        all_equal,
        "from_H == from_moments bit for bit, both sides, zero tolerance",
    );
}

#[test]
fn criterion_04_gns_stinespring() {
    let mut worst_stinespring: f64 = 0.0;
    let mut worst_isometry: f64 = 0.0;
    for (k, (d, m, deg, n, seed)) in schedule_50().into_iter().enumerate() {
        if k % 5 != 0 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_free_schur_with(&mut rng, d, m, deg, n, 0.85).unwrap();
        let phi = moments_from_schur(&b).unwrap();
        let gns = build_gns(&phi).unwrap();
        worst_stinespring = worst_stinespring.max(stinespring_check(&gns).unwrap());
        worst_isometry = worst_isometry.max(row_isometry_defect(&gns).isometry_defect);
    }
    report(
        "4_gns_stinespring",
        worst_stinespring < tol::STINESPRING && worst_isometry < tol::ROW_ISOMETRY,
        &format!(
            "dilation formula {worst_stinespring:.3e} < 1e-8, row-isometry defect {worst_isometry:.3e} < 1e-8"
        ),
    );
}

#[test]
fn criterion_05_cauchy_transforms() {
    let mut worst_transport: f64 = 0.0;
    let mut worst_weighted: f64 = 0.0;
    let mut worst_wt: f64 = 0.0;
    for (k, (d, m, deg, n, seed)) in schedule_50().into_iter().enumerate() {
        if k % 5 != 0 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_free_schur_with(&mut rng, d, m, deg, n, 0.85).unwrap();
        let ctx = ClarkContext::new(&b).unwrap();
        worst_transport = worst_transport.max(cauchy_isometry_defect(&ctx.gns));
        let wc = freeac::clark::weighted_cauchy(&ctx.gns, &ctx.dbr).unwrap();
        worst_weighted = worst_weighted.max(
            freeac::clark::weighted_cauchy_defect(&ctx.gns, &wc, n - b.degree()).max(wc.leak),
        );
        let wt = transposition_w_in(&ctx).unwrap();
        worst_wt = worst_wt.max(wt.action_error);
    }
    report(
        "5_cauchy_transforms",
        worst_transport < tol::CAUCHY_ISOMETRY
            && worst_weighted < tol::WEIGHTED_CAUCHY
            && worst_wt < tol::TRANSPOSITION_W,
        &format!(
            "gram transport {worst_transport:.3e} < 1e-8, weighted unitary {worst_weighted:.3e} < 1e-8, W_T action {worst_wt:.3e} < 1e-9"
        ),
    );
}

#[test]
fn criterion_06_clark_intertwining() {
    let mut worst_op: f64 = 0.0;
    let mut worst_coeff: f64 = 0.0;
    let mut worst_family: f64 = 0.0;
    for (d, m, deg, n, seed) in schedule_50() {
        // keep the per-instance spaces moderate so 50 runs stay in budget
        let n = n.min(4);
        let deg = deg.min(n - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc1a2);
        let b = random_free_schur_with(&mut rng, d, m, deg, n, 0.85).unwrap();
        let ctx = ClarkContext::new(&b).unwrap();
        let rep = verify_clark_in(&ctx).unwrap();
        worst_op = worst_op.max(rep.lhs_rhs_error);
        worst_coeff = worst_coeff
            .max(rep.kernel_identity_error)
            .max(rep.transform_identity_error);
        let u = rand_unitary(&mut rng, m);
        let fam = clark_family(&b, &u).unwrap();
        worst_family = worst_family.max(fam.d_invariance);
        worst_op = worst_op.max(fam.clark.lhs_rhs_error);
    }
    report(
        "6_clark_intertwining",
        worst_op < tol::CLARK && worst_coeff < tol::CLARK && worst_family < tol::FAMILY_INVARIANCE,
        &format!(
            "50 instances: operator {worst_op:.3e} < 1e-7, coefficient identities {worst_coeff:.3e} < 1e-7, family D-invariance {worst_family:.3e} < 1e-12"
        ),
    );
}

#[test]
fn criterion_07_classical_reduction() {
    let n = 5usize;
    let b = FreeSeries::variable(1, 1, n, 1).unwrap();
    // all-ones moments
    let phi = moments_from_schur(&b).unwrap();
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        let w = Word::new(1, &vec![1; k]).unwrap();
        worst = worst.max((phi.moment(&w).unwrap()[(0, 0)] - c(1.0)).norm());
    }
    worst = worst.max((phi.phi_i()[(0, 0)] - c(1.0)).norm());
    // rank-1 GNS with a 1x1 Cuntz unitary
    let gns = build_gns(&phi).unwrap();
    let rank_ok = gns.rank() == 1;
    worst = worst.max((gns.pi(1)[(0, 0)].norm() - 1.0).abs());
    let iso = row_isometry_defect(&gns);
    worst = worst.max(iso.isometry_defect).max(iso.cuntz_defect);
    // quasi-extreme indicator 0
    worst = worst.max(quasi_extreme_indicator(&phi).unwrap());
    // H(b) = constants
    let ctx = ClarkContext::new(&b).unwrap();
    let hb_ok = ctx.dbr.rank() == 1;
    // Clark perturbation equals the classical rank-one unitary [1]
    let clark_op = &ctx.weighted * ctx.gns.pi(1).adjoint() * ctx.weighted.adjoint();
    worst = worst.max((clark_op[(0, 0)].norm() - 1.0).abs());
    let rep = verify_clark_in(&ctx).unwrap();
    worst = worst.max(rep.lhs_rhs_error);
    report(
        "7_classical_reduction_d1",
        rank_ok && hb_ok && worst < tol::CLASSICAL,
        &format!("b(z)=z pipeline max deviation {worst:.3e} < 1e-10, GNS rank 1, H(b) = constants"),
    );
}

#[test]
fn criterion_08_free_lifts() {
    let mut worst_lift: f64 = 0.0;
    let mut worst_gram: f64 = 0.0;
    for case in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + case);
        let (deg, n) = if case % 2 == 0 { (1, 4) } else { (2, 4) };
        let m = if case % 5 == 0 { 2 } else { 1 };
        let b = random_comm_schur_with(&mut rng, 2, m, deg, n, 0.8).unwrap();
        let mu = comm_moments(&b).unwrap();
        let space = build_herglotz_space(&mu).unwrap();
        let vb = build_vb(&space).unwrap();
        for rho in [0.0, 0.5] {
            let ext = random_extension(&space, &vb, 7000 + case, rho).unwrap();
            let lift = lift_from_extension(&space, &ext).unwrap();
            let check = check_free_lift(&lift.b_left, &b).unwrap();
            worst_lift = worst_lift
                .max(check.symmetrization_error)
                .max(check.moment_error);
            worst_gram = worst_gram.max(symmetric_gram_cross_check(&lift.gns, &mu).unwrap());
        }
    }
    report(
        "8_free_lifts",
        worst_lift < tol::LIFT && worst_gram < tol::SYMMETRIC_GRAM,
        &format!(
            "20 bases x tight+random: lift check {worst_lift:.3e} < 1e-9, symmetric Gram oracle {worst_gram:.3e} < 1e-10"
        ),
    );
}

#[test]
fn criterion_09_transfer_functions() {
    // free side: coefficients and nilpotent-point exactness
    let mut worst_coeff: f64 = 0.0;
    let mut worst_nilpotent: f64 = 0.0;
    for (k, (d, m, deg, n, seed)) in schedule_50().into_iter().enumerate() {
        if k % 10 != 0 {
            continue; // 5 instances x 20 points
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
        let b = random_free_schur_with(&mut rng, d, m, deg, n, 0.85).unwrap();
        let b_right = b.transpose_series();
        let (col, _) = free_colligation(&b_right, Side::Right).unwrap();
        let coeffs = transfer_coeffs(&col, d, n - 1, n).unwrap();
        for w in enumerate_words(d, n - 1).unwrap() {
            worst_coeff = worst_coeff.max(max_abs(&(coeffs.coeff(&w) - b.coeff(&w))));
        }
        for _ in 0..20 {
            let p = random_nilpotent_point(&mut rng, d, n.min(4), 0.8).unwrap();
            let via = transfer_eval(&col, &p).unwrap();
            let direct = b.eval_nc(&p).unwrap();
            worst_nilpotent = worst_nilpotent.max(max_abs(&(via - direct)));
        }
    }
    // commutative side: route agreement and Taylor data
    let mut worst_route: f64 = 0.0;
    let mut worst_taylor: f64 = 0.0;
    for case in 0..4u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + case);
        let b = random_comm_schur_with(&mut rng, 2, 1, 2, 4, 0.8).unwrap();
        let mu = comm_moments(&b).unwrap();
        let space = build_herglotz_space(&mu).unwrap();
        let vb = build_vb(&space).unwrap();
        let comm_dbr = comm_dbr_space(&b).unwrap();
        let safe = 4 - b.degree() - 1;
        for rho in [0.0, 0.5] {
            let ext = random_extension(&space, &vb, 8000 + case, rho).unwrap();
            let lift = lift_from_extension(&space, &ext).unwrap();
            let (free_col, _) = free_colligation(&lift.b_right, Side::Right).unwrap();
            let dbr = freeac::clark::dbr_space(&lift.b_right, Side::Right).unwrap();
            let ch2 = c_h2(&dbr, &comm_dbr, 4 - b.degree()).unwrap();
            let via_free = comm_colligation_from_free(&free_col, &ch2);
            let direct = comm_colligation_from_extension(&space, &ext, &comm_dbr, safe).unwrap();
            worst_route =
                worst_route.max(route_agreement_defect(&via_free, &direct, &comm_dbr, safe).unwrap());
            let taylor = comm_transfer_coeffs(&direct, 2, 3, 4).unwrap();
            for nn in enumerate_multi_indices(2, 3) {
                worst_taylor = worst_taylor.max(max_abs(&(taylor.coeff(&nn) - b.coeff(&nn))));
            }
        }
    }
    report(
        "9_transfer_functions",
        worst_coeff < tol::TRANSFER_COEFF
            && worst_nilpotent < tol::NILPOTENT_EXACT
            && worst_route < tol::ROUTE_AGREEMENT
            && worst_taylor < tol::COMM_TAYLOR,
        &format!(
            "coefficients {worst_coeff:.3e} < 1e-10, nilpotent exactness {worst_nilpotent:.3e} < 1e-10, route agreement {worst_route:.3e} < 1e-8, Taylor {worst_taylor:.3e} < 1e-9"
        ),
    );
}

#[test]
fn criterion_10_quasi_extreme_behavior() {
    // inner b = z: indicator 0
    let b_inner = FreeSeries::variable(1, 1, 6, 1).unwrap();
    let phi_inner = moments_from_schur(&b_inner).unwrap();
    let q_inner = quasi_extreme_indicator(&phi_inner).unwrap();

    // b = 0.5 constant: strictly positive
    let b_half = FreeSeries::constant(1, 6, CMat::from_element(1, 1, c(0.5))).unwrap();
    let phi_half = moments_from_schur(&b_half).unwrap();
    let q_half = quasi_extreme_indicator(&phi_half).unwrap();

    // monotone non-increasing in N over {2,...,6} for both plus a generic case
    let mut monotone = true;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let b_generic = random_free_schur_with(&mut rng, 2, 1, 2, 6, 0.9).unwrap();
    for phi in [
        &phi_inner,
        &phi_half,
        &moments_from_schur(&b_generic).unwrap(),
    ] {
        let mut prev = f64::INFINITY;
        for n in 2..=6 {
            let q = quasi_extreme_indicator(&phi.restrict(n)).unwrap();
            if q > prev + 1e-12 {
                monotone = false;
            }
            prev = q;
        }
    }
    report(
        "10_quasi_extreme_behavior",
        q_inner < tol::QE_ZERO && q_half > tol::QE_POSITIVE && monotone,
        &format!(
            "inner {q_inner:.3e} ~ 0, constant {q_half:.3e} > 0.01, monotone non-increasing in N"
        ),
    );
}

#[test]
fn comm_gleason_identities_hold() {
    // supporting lemma-level check used by criteria 8/9 pipelines
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let b = random_comm_schur_with(&mut rng, 2, 1, 2, 4, 0.8).unwrap();
    let mu = comm_moments(&b).unwrap();
    let space = build_herglotz_space(&mu).unwrap();
    let vb = build_vb(&space).unwrap();
    let comm_dbr = comm_dbr_space(&b).unwrap();
    let g = comm_gleason(&space, &vb, &comm_dbr, 1).unwrap();
    assert!(g.gleason_identity_error < tol::COMM_TAYLOR);
    assert!(g.x_residual < 1e-8);
    let _ = opnorm(&g.b_sol[0]);
}

#[test]
fn generated_instances_are_certified() {
    // cmd_gen contract: l1 bound exact, deterministic bytes, PSD dbr gram
    let params = freeac::instance::GenParams {
        d: 2,
        m: 2,
        deg: 2,
        rho: 0.8,
        seed: 7,
        trunc: 4,
    };
    let a = freeac::instance::generate(&params, "free").unwrap();
    let b = freeac::instance::generate(&params, "free").unwrap();
    assert_eq!(a.to_bytes(), b.to_bytes());
    let series = a.free().unwrap();
    let l1: f64 = series.coeffs().map(|(_, m)| opnorm(m)).sum();
    assert!(l1 <= 0.8 + 1e-12);
    let (kern, cert) = dbr_kernel(series, Side::Right).unwrap();
    assert_eq!(cert, freeac::series::SchurCert::L1Certified);
    assert!(psd_check(&kern.gram(), tol::PSD_REL).unwrap().pass);
    let _ = CommSeries::zero(2, 1, 3);
    let _ = MultiIndex::zero(2);
}
