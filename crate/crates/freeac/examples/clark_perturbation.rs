//! The free Clark intertwining: the weighted Cauchy transform carries the
//! adjoint GNS row isometry to a rank-m perturbation of the restricted backward
//! shift on the right deBranges-Rovnyak space,
//!
//! ```text
//! F̂ π(L_j)* F̂*  =  (L_j* ⊗ I)|_{H^R(B)}  +  𝐁_j (I − B_0)^{-1} k̂_0*.
//! ```
//!
//! Run with: cargo run --example clark_perturbation

use freeac::clark::{
    cauchy_isometry_defect, clark_family, transposition_w_in, verify_clark_in, ClarkContext,
};
use freeac::instance::random_free_schur_with;
use freeac::linalg::rand_unitary;
use freeac::series::FreeSeries;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> freeac::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let b = random_free_schur_with(&mut rng, 2, 2, 2, 4, 0.85)?;
    let ctx = ClarkContext::new(&b)?;
    println!(
        "spaces: F²(μ) rank {}, H^R(B) rank {}, safe degree {}",
        ctx.gns.rank(),
        ctx.dbr.rank(),
        ctx.safe_degree()
    );

    // The free Cauchy transform transports the Gram exactly...
    println!("Cauchy Gram transport defect: {:.3e}", cauchy_isometry_defect(&ctx.gns));
    // ...and the weighted transform is unitary onto H^R(B).
    let wc = freeac::clark::weighted_cauchy(&ctx.gns, &ctx.dbr)?;
    println!("weighted Cauchy truncation leak: {:.3e}", wc.leak);

    // The transposition unitary W_T = F̂_L F̂_R* literally transposes coefficients.
    let wt = transposition_w_in(&ctx)?;
    println!(
        "W_T action-by-transposition error {:.3e}, unitarity defect {:.3e}",
        wt.action_error, wt.unitarity_defect
    );

    // The intertwining theorem, at the operator level and coefficient level.
    let rep = verify_clark_in(&ctx)?;
    println!(
        "Clark intertwining: operator {:.3e}, kernel identity {:.3e}, transform identity {:.3e}",
        rep.lhs_rhs_error, rep.kernel_identity_error, rep.transform_identity_error
    );

    // The unitary family B U*: same deBranges-Rovnyak complement, a whole
    // family of co-isometric perturbations.
    let u = rand_unitary(&mut rng, 2);
    let fam = clark_family(&b, &u)?;
    println!(
        "family member B U*: D-matrix invariance {:.3e}, intertwining {:.3e}",
        fam.d_invariance, fam.clark.lhs_rhs_error
    );

    // Classical reduction, d=1, b(z) = z: the perturbed operator is the 1x1
    // unitary [1] — the classical rank-one Clark perturbation at α = 1.
    let z = FreeSeries::variable(1, 1, 4, 1)?;
    let ctx_z = ClarkContext::new(&z)?;
    let clark_op = &ctx_z.weighted * ctx_z.gns.pi(1).adjoint() * ctx_z.weighted.adjoint();
    println!(
        "\nclassical b(z)=z: H(b) is {}-dimensional and the Clark operator is [{:.6}]",
        ctx_z.dbr.rank(),
        clark_op[(0, 0)].re
    );
    Ok(())
}
