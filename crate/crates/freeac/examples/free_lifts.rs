//! Free lifts of a commutative (Drury-Arveson) Schur multiplier: the partial
//! isometry V^b on the Herglotz space, its row-contractive extensions, the
//! symmetric extensions φ_D they induce, and the resulting lift pairs — plus
//! the co-isometry C_{H²} tying the free and commutative deBranges-Rovnyak
//! spaces together.
//!
//! Run with: cargo run --example free_lifts

use freeac::commutative::{
    build_herglotz_space, build_vb, c_h2, check_free_lift, comm_dbr_space, comm_moments,
    lift_from_extension, random_extension, symmetric_gram_cross_check,
    weighted_cauchy_factorization_defect,
};
use freeac::gns::quasi_extreme_indicator;
use freeac::instance::random_comm_schur_with;
use freeac::Side;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> freeac::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let b = random_comm_schur_with(&mut rng, 2, 1, 2, 4, 0.8)?;
    let mu = comm_moments(&b)?;
    let space = build_herglotz_space(&mu)?;
    println!("commutative Herglotz space H⁺(H_b): rank {}", space.rank());

    // V^b: the canonical partial isometry solving Σ_j V_j K̃_{m-e_j} = K̃_m.
    let vb = build_vb(&space)?;
    println!(
        "V^b: constraint residual {:.3e}, partial-isometry defect {:.3e}, spectrum defect {:.3e}",
        vb.constraint_residual, vb.partial_isometry_defect, vb.spectrum_defect
    );

    let comm_dbr = comm_dbr_space(&b)?;
    let safe = 4 - b.degree();

    // Tight and random extensions give genuinely different free lifts of the
    // same b — the lift freedom of a non-quasi-extreme multiplier.
    let tight = lift_from_extension(&space, &vb)?;
    let ext = random_extension(&space, &vb, 9, 0.5)?;
    let loose = lift_from_extension(&space, &ext)?;
    println!(
        "\ntight vs random lift: coefficient distance {:.4} (both lift the same b)",
        tight.b_left.max_coeff_diff(&loose.b_left)
    );
    for (name, lift) in [("tight", &tight), ("random", &loose)] {
        let check = check_free_lift(&lift.b_left, &b)?;
        println!(
            "  {name:6} lift: symmetrization {:.3e}, moment fibers {:.3e}, dilation {:.3e}, qe indicator {:.4}",
            check.symmetrization_error,
            check.moment_error,
            lift.dilation_defect,
            quasi_extreme_indicator(&lift.phi)?
        );
        // the derived symmetric-Gram closed form against its lift-compression oracle
        println!(
            "         symmetric Gram closed form vs GNS compression: {:.3e}",
            symmetric_gram_cross_check(&lift.gns, &mu)?
        );
    }

    // C_{H²} maps H^R(B) co-isometrically onto H(b), and the commutative
    // weighted Cauchy transform factors through the free one.
    let dbr = freeac::clark::dbr_space(&loose.b_right, Side::Right)?;
    let ch2 = c_h2(&dbr, &comm_dbr, safe)?;
    println!(
        "\nC_H²: defining-column residual {:.3e}, co-isometry defect {:.3e}",
        ch2.residual, ch2.coisometry_defect
    );
    let defect =
        weighted_cauchy_factorization_defect(&space, &comm_dbr, &loose, &dbr, &ch2, safe)?;
    println!("commutative Cauchy transform factors through the free one: defect {defect:.3e}");
    Ok(())
}
