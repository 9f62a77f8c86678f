//! Free (noncommutative) Aleksandrov-Clark theory as finite matrix computations.
//!
//! Everything happens on the degree-truncated full Fock space over `C^d` with an
//! `m`-dimensional coefficient space: free formal power series and their left/right
//! multiplication operators, free Szegő / deBranges-Rovnyak / Herglotz coefficient
//! kernels, the Schur ↔ Herglotz ↔ CP-moment bijections, GNS Hardy spaces of
//! noncommutative Clark measures, weighted free Cauchy transforms and the Clark
//! intertwining perturbation, free lifts of Drury-Arveson Schur multipliers, and
//! deBranges-Rovnyak transfer-function colligations.
//!
//! Truncation at degree `N` makes every series a finite sum and every operator a
//! matrix. Identities that involve products of series of degrees `p, q, …` are exact
//! only on the "safe block" of degrees `≤ N - p - q - …`; each verification routine
//! reports the safe degree it used.
//!
//! Entry points by theme:
//! - [`word`], [`fock`]: free monoid combinatorics and the truncated Fock space.
//! - [`series`]: free formal power series arithmetic and NC-point evaluation.
//! - [`kernels`]: coefficient kernels, Gram matrices, PSD certificates.
//! - [`herglotz`]: Cayley transforms and the three-way bijection.
//! - [`gns`]: the GNS Hardy space `F²(μ)` of a CP moment functional.
//! - [`clark`]: deBranges-Rovnyak spaces, Cauchy transforms, Clark intertwining.
//! - [`commutative`]: the Drury-Arveson side and free lifts.
//! - [`realization`]: colligations and transfer functions.
//! - [`verify`]: the named check suites used by the CLI and the acceptance tests.

pub mod clark;
pub mod commutative;
pub mod error;
pub mod fock;
pub mod gns;
pub mod herglotz;
pub mod instance;
pub mod jsonio;
pub mod kernels;
pub mod linalg;
pub mod realization;
pub mod report;
pub mod series;
pub mod tol;
pub mod verify;
pub mod word;

pub use error::{Error, Result};

/// Which of the two free multiplications an operation refers to.
///
/// Left multiplication concatenates the multiplier's word on the left
/// (`Z^α · Z^β = Z^{αβ}`), right multiplication on the right
/// (`Z^α •_R Z^β = Z^{βα}`). The transposition unitary exchanges the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}
