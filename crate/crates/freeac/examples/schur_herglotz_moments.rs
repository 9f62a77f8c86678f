//! The three-way bijection: non-unital free Schur pairs ↔ Herglotz pairs ↔
//! completely positive moment functionals, via Cayley transforms and the free
//! Herglotz representation.
//!
//! Run with: cargo run --example schur_herglotz_moments

use freeac::herglotz::{
    cayley_to_herglotz, cayley_to_schur, herglotz_from_moments, moments_from_herglotz,
    moments_from_schur_right,
};
use freeac::instance::random_free_schur_with;
use freeac::kernels::{herglotz_kernel_from_h, herglotz_kernel_from_moments, psd_check};
use freeac::series::FreeSeries;
use freeac::word::Word;
use freeac::Side;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> freeac::Result<()> {
    // A random certified Schur-class series: l1 norm 0.85 < 1, Hermitian
    // constant term (the canonical representative modulo imaginary constants).
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let b = random_free_schur_with(&mut rng, 2, 2, 2, 4, 0.85)?;
    println!("random Schur series: d=2, m=2, deg 2, N=4, {} terms", b.num_terms());

    // Forward: B → H → φ
    let h = cayley_to_herglotz(&b)?;
    let phi = moments_from_herglotz(&h)?;
    println!("Herglotz series has {} terms; φ carries {} word moments", h.num_terms(), phi.moments().count());

    // The Herglotz kernel is PSD — the positivity direction of the bijection.
    let kernel = herglotz_kernel_from_moments(&phi, Side::Right)?;
    let rep = psd_check(&kernel.gram(), freeac::tol::PSD_REL)?;
    println!("Herglotz Gram: min eigenvalue {:.3e} (PSD: {})", rep.min_eig, rep.pass);

    // The kernel can be assembled two ways; the arithmetic is identical.
    let from_h = herglotz_kernel_from_h(&h, Side::Left)?;
    let from_m = herglotz_kernel_from_moments(&phi, Side::Left)?;
    println!("kernel from H == kernel from moments, bit for bit: {}", from_h.bit_equal(&from_m));

    // Backward: φ → H' → B', an exact round trip on canonical representatives.
    let h2 = herglotz_from_moments(&phi, Side::Left)?;
    let b2 = cayley_to_schur(&h2)?;
    println!("round trip B → H → φ → H' → B': max coefficient error {:.3e}", b2.max_coeff_diff(&b));

    // The pair (B^L, B^R = T∘B^L) shares one Clark measure: computing the
    // moments natively along the right route agrees.
    let phi_right = moments_from_schur_right(&b.transpose_series())?;
    println!("left route vs right route moments: {:.3e}", phi.max_diff(&phi_right));

    // Classical check, d = 1, b(z) = z: the Cayley transform is the geometric
    // series 1 + 2z + 2z² + … and every Clark moment is 1 — the point mass at 1.
    let z = FreeSeries::variable(1, 1, 5, 1)?;
    let hz = cayley_to_herglotz(&z)?;
    let phi_z = moments_from_herglotz(&hz)?;
    print!("classical b(z) = z: H coefficients");
    for k in 0..=5usize {
        let w = Word::new(1, &vec![1; k])?;
        print!(" {:.0}", hz.coeff(&w)[(0, 0)].re);
    }
    println!();
    print!("classical b(z) = z: moments       ");
    for k in 1..=5usize {
        let w = Word::new(1, &vec![1; k])?;
        print!(" {:.0}", phi_z.moment(&w)?[(0, 0)].re);
    }
    println!("  (all ones: the Clark point mass at 1)");
    Ok(())
}
