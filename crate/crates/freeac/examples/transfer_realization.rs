//! Transfer-function realizations: the canonical deBranges-Rovnyak colligation
//! of a free Schur pair, exactness of its Schur-complement transfer function at
//! jointly nilpotent matrix points, and the conjugation that turns it into a
//! canonical colligation for the commutative symmetrization.
//!
//! Run with: cargo run --example transfer_realization

use freeac::commutative::{
    build_herglotz_space, build_vb, c_h2, comm_dbr_space, comm_moments, lift_from_extension,
    random_extension,
};
use freeac::instance::{random_comm_schur_with, random_free_schur_with};
use freeac::linalg::max_abs;
use freeac::realization::{
    coisometry_defect, comm_colligation_from_extension, comm_colligation_from_free,
    comm_transfer_coeffs, comm_transfer_eval, free_colligation, observability_margin,
    random_nilpotent_point, route_agreement_defect, transfer_coeffs, transfer_eval,
};
use freeac::word::enumerate_words;
use freeac::Side;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> freeac::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let b_left = random_free_schur_with(&mut rng, 2, 1, 2, 5, 0.85)?;
    let b_right = b_left.transpose_series();

    // The canonical colligation lives on H^R(B): A = backward shifts, B = the
    // Gleason solution, C = the vacuum kernel functional, D = B(0).
    let (col, space) = free_colligation(&b_right, Side::Right)?;
    println!(
        "free colligation: state dim {}, coefficient dim {}",
        col.state_dim(),
        col.coeff_dim()
    );
    println!("co-isometry defect (coefficient form): {:.3e}", coisometry_defect(&b_right, Side::Right)?);
    println!("observability margin: {:.3}", observability_margin(&col, &space, 2, 4)?);

    // Its transfer function reproduces the left series coefficient by coefficient...
    let coeffs = transfer_coeffs(&col, 2, 4, 5)?;
    let mut worst: f64 = 0.0;
    for w in enumerate_words(2, 4)? {
        worst = worst.max(max_abs(&(coeffs.coeff(&w) - b_left.coeff(&w))));
    }
    println!("transfer coefficients vs series (degrees <= 4): {worst:.3e}");

    // ...and evaluates exactly at jointly nilpotent matrix points, where the
    // Neumann series for the resolvent terminates.
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let p = random_nilpotent_point(&mut rng, 2, 4, 0.8)?;
        let via = transfer_eval(&col, &p)?;
        let direct = b_left.eval_nc(&p)?;
        worst = worst.max(max_abs(&(via - direct)));
    }
    println!("transfer vs direct evaluation at 10 nilpotent points: {worst:.3e}");

    // Commutative side: the same colligation arises two ways — by conjugating
    // the free one with C_{H²}, or directly from the Gleason solutions of the
    // extension D ⊇ V^b that parametrizes the lift.
    let b = random_comm_schur_with(&mut rng, 2, 1, 2, 4, 0.8)?;
    let mu = comm_moments(&b)?;
    let herg = build_herglotz_space(&mu)?;
    let vb = build_vb(&herg)?;
    let ext = random_extension(&herg, &vb, 4, 0.5)?;
    let lift = lift_from_extension(&herg, &ext)?;
    let comm_dbr = comm_dbr_space(&b)?;
    let safe = 4 - b.degree() - 1;
    let (free_col, _) = free_colligation(&lift.b_right, Side::Right)?;
    let dbr = freeac::clark::dbr_space(&lift.b_right, Side::Right)?;
    let ch2 = c_h2(&dbr, &comm_dbr, 4 - b.degree())?;
    let via_free = comm_colligation_from_free(&free_col, &ch2);
    let direct = comm_colligation_from_extension(&herg, &ext, &comm_dbr, safe)?;
    println!(
        "\ncommutative colligation, conjugation route vs extension route: {:.3e}",
        route_agreement_defect(&via_free, &direct, &comm_dbr, safe)?
    );

    let taylor = comm_transfer_coeffs(&direct, 2, 3, 4)?;
    let mut worst: f64 = 0.0;
    for n in freeac::word::enumerate_multi_indices(2, 3) {
        worst = worst.max(max_abs(&(taylor.coeff(&n) - b.coeff(&n))));
    }
    println!("commutative transfer Taylor data vs b: {worst:.3e}");

    let z = [num_complex::Complex64::new(0.2, 0.1), num_complex::Complex64::new(-0.15, 0.05)];
    let value = comm_transfer_eval(&direct, &z)?;
    let expect = b.eval(&z)?;
    println!(
        "transfer at a ball point vs truncated series evaluation: {:.3e}",
        max_abs(&(value - expect))
    );
    Ok(())
}
