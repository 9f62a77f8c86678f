//! The GNS Hardy space F²(μ_B) of a noncommutative Clark measure: the moment
//! Gram matrix, the row isometry π(L), the Stinespring dilation formula, and
//! the quasi-extreme indicator.
//!
//! Run with: cargo run --example gns_hardy_space

use freeac::gns::{build_gns, quasi_extreme_indicator, row_isometry_defect, stinespring_check};
use freeac::herglotz::moments_from_schur;
use freeac::instance::random_free_schur_with;
use freeac::linalg::CMat;
use freeac::series::FreeSeries;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> freeac::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let b = random_free_schur_with(&mut rng, 2, 1, 2, 4, 0.85)?;
    let phi = moments_from_schur(&b)?;

    let gns = build_gns(&phi)?;
    println!(
        "F²(μ_B): Gram dimension {}, rank {} (eigenvalues in [{:.3}, {:.3}])",
        gns.gram().nrows(),
        gns.rank(),
        gns.eigenvalues().last().unwrap(),
        gns.eigenvalues()[0],
    );

    // Stinespring: μ_B(L^α) = [I⊗]* π(L)^α [I⊗] for |α| <= N-1.
    println!("Stinespring dilation residual: {:.3e}", stinespring_check(&gns)?);

    // π(L) is a row isometry on the safe block; the Cuntz defect measures how
    // far it is from being onto.
    let iso = row_isometry_defect(&gns);
    println!(
        "row isometry defect {:.3e}, Cuntz (onto-ness) defect {:.3}",
        iso.isometry_defect, iso.cuntz_defect
    );

    // The quasi-extreme indicator: squared distance from the constants to the
    // span of nonconstant symmetric monomials inside F²(μ). Monotone in N.
    println!("\nquasi-extreme indicator across truncations (monotone non-increasing):");
    for n in 2..=4 {
        let q = quasi_extreme_indicator(&phi.restrict(n))?;
        println!("  N = {n}: {q:.6}");
    }

    // Two classical poles: the inner function b(z) = z collapses F²(μ) to one
    // dimension with π(L) the unitary [1] (indicator 0), while a constant b
    // keeps the constants far from the monomials (indicator > 0).
    let z = FreeSeries::variable(1, 1, 4, 1)?;
    let phi_z = moments_from_schur(&z)?;
    let gns_z = build_gns(&phi_z)?;
    println!(
        "\nb(z) = z: GNS rank {}, π(L) = [{:.3}], indicator {:.3e}",
        gns_z.rank(),
        gns_z.pi(1)[(0, 0)].re,
        quasi_extreme_indicator(&phi_z)?
    );
    let half = FreeSeries::constant(1, 4, CMat::from_element(1, 1, num_complex::Complex64::new(0.5, 0.0)))?;
    let phi_half = moments_from_schur(&half)?;
    println!(
        "b = 0.5 constant: indicator {:.3} (strictly positive: not quasi-extreme)",
        quasi_extreme_indicator(&phi_half)?
    );
    Ok(())
}
