//! Noncommutative Clark measures as moment functionals, the unitary parameter
//! family μ_{BU*}, and the single-variable sanity anchors they reduce to.
//!
//! Run with: cargo run --example clark_measures

use freeac::clark::clark_family;
use freeac::herglotz::moments_from_schur;
use freeac::instance::random_free_schur_with;
use freeac::linalg::CMat;
use freeac::series::FreeSeries;
use freeac::word::{enumerate_words, Word};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> freeac::Result<()> {
    // d = 2, B = (Z1 + Z2)/2: the moment of L^α is 2^{-|α|}.
    let mut b = FreeSeries::zero(2, 1, 3);
    for w in ["1", "2"] {
        b.set_coeff(Word::parse(2, w)?, CMat::from_element(1, 1, Complex64::new(0.5, 0.0)))?;
    }
    let phi = moments_from_schur(&b)?;
    println!("B = (Z1+Z2)/2 — Clark moments φ(L^α) = 2^(-|α|):");
    for w in enumerate_words(2, 2)? {
        if w.is_empty() {
            continue;
        }
        println!("  φ(L^{w}) = {:.4}", phi.moment(&w)?[(0, 0)].re);
    }

    // The unitary family: for scalar d = 1, b(z) = z and U = e^{iθ}, the Clark
    // measures of b·e^{-iθ} are the point masses at e^{iθ} — moments e^{ikθ}.
    let theta = std::f64::consts::FRAC_PI_3;
    let z = FreeSeries::variable(1, 1, 4, 1)?;
    let u = CMat::from_element(1, 1, Complex64::from_polar(1.0, theta));
    let bu = z.coeff_right_mul(&u.adjoint())?;
    let phi_u = moments_from_schur(&bu)?;
    println!("\nb(z) = z, U = e^(iπ/3): moments of the family member μ_(bU*):");
    for k in 1..=4usize {
        let w = Word::new(1, &vec![1; k])?;
        let m = phi_u.moment(&w)?[(0, 0)];
        let expect = Complex64::from_polar(1.0, theta * k as f64);
        println!(
            "  φ(L^{k}) = {:.4} + {:.4}i   (e^(ik·π/3) = {:.4} + {:.4}i)",
            m.re, m.im, expect.re, expect.im
        );
    }

    // The whole family shares one deBranges-Rovnyak complement: D is invariant
    // and the Clark intertwining holds for every member.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let b2 = random_free_schur_with(&mut rng, 2, 2, 1, 3, 0.8)?;
    let uu = freeac::linalg::rand_unitary(&mut rng, 2);
    let fam = clark_family(&b2, &uu)?;
    println!(
        "\nrandom m=2 family member: |D_BU* − D_B| = {:.3e}, intertwining error {:.3e}",
        fam.d_invariance, fam.clark.lhs_rhs_error
    );
    Ok(())
}
