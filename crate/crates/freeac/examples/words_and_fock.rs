//! Tour of the combinatorial ground floor: words in the free monoid, the
//! truncated Fock space, creation operators, the symmetric (bosonic) subspace,
//! and the transposition unitary that exchanges left and right.
//!
//! Run with: cargo run --example words_and_fock

use freeac::fock::TruncatedFock;
use freeac::linalg::{eye, max_abs, opnorm};
use freeac::word::{cancel, enumerate_words, multinomial, MultiIndex, Word};
use freeac::Side;

fn main() -> freeac::Result<()> {
    let d = 2;
    let n = 3;
    let words = enumerate_words(d, n)?;
    println!("words of length <= {n} over {{1,..,{d}}} in graded-lex order:");
    println!(
        "  {}",
        words
            .iter()
            .map(|w| if w.is_empty() { "∅".into() } else { w.to_string() })
            .collect::<Vec<_>>()
            .join(" ")
    );

    let alpha = Word::parse(d, "12")?;
    let beta = Word::parse(d, "121")?;
    println!("\ntranspose of {alpha} is {}", alpha.transpose());
    println!("abelianization of {beta} is ({})", beta.abelianize());
    println!("cancel({alpha}, {beta}) = {:?}   // (L^α)* L^β collapses by prefix cancellation", cancel(&alpha, &beta));

    let n_idx = MultiIndex::new(vec![2, 1]);
    println!(
        "multinomial |n|!/n! for n = ({n_idx}) is {} — the number of words in its fiber",
        multinomial(&n_idx)?
    );

    // The truncated Fock space with one coefficient slot.
    let fock = TruncatedFock::new(d, 1, n)?;
    println!("\ntruncated Fock space: {} basis vectors", fock.dim());

    // Creation operators are row isometries below the truncation boundary.
    let l1 = fock.creation_matrix(Side::Left, 1)?;
    let l2 = fock.creation_matrix(Side::Left, 2)?;
    let sub = fock.dim_up_to(n - 1);
    let gram = l1.adjoint() * &l2;
    println!(
        "L1* L2 restricted below the boundary: max entry {} (exact zero)",
        max_abs(&gram.view((0, 0), (sub, sub)).into_owned())
    );
    let mut range = &l1 * l1.adjoint() + &l2 * l2.adjoint();
    range -= eye(fock.dim());
    println!(
        "Σ L_j L_j* - I has operator norm {:.3} (the vacuum is missed: the free shift is not onto)",
        opnorm(&range)
    );

    // Symmetric monomials e_n = Σ_{λ(α)=n} e_α have squared norm |n|!/n!.
    let sym = fock.symmetrizer();
    let k = sym
        .multi_indices
        .iter()
        .position(|m| m.counts() == [1, 1])
        .unwrap();
    let norm2: f64 = sym.vectors.column(k).iter().map(|z| z.norm().powi(2)).sum();
    println!("\n‖e_(1,1)‖² = {norm2}  (= multinomial 2)");

    // U_T intertwines left and right creation exactly, truncation included.
    let u = fock.transposition_unitary();
    let r1 = fock.creation_matrix(Side::Right, 1)?;
    println!(
        "U_T L_1 - R_1 U_T has max entry {} (exact)",
        max_abs(&(&u * &l1 - &r1 * &u))
    );
    Ok(())
}
