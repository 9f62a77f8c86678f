//! Free deBranges-Rovnyak spaces, Gleason solutions, the free Cauchy transforms,
//! and the Clark intertwining perturbation.
//!
//! Conventions. A free Schur pair is handed around through its left series
//! `B^L`; the right series is `B^R = T ∘ B^L`. The intertwining theorem lives on
//! the right side: with `φ = μ_B`, `F²(μ_B)` the GNS space, and `H^R(B)` the right
//! deBranges-Rovnyak space, the weighted right Cauchy transform `F̂_R` carries
//! `π(L)^*` to a perturbed backward shift
//!
//! ```text
//! F̂_R π(L_j)^* F̂_R^*  =  (L_j^* ⊗ I)|_{H^R(B)}  +  𝐁_j (I − B_0)^{-1} k̂_0^*
//! ```
//!
//! with `𝐁` the unique contractive Gleason solution for `B^R`. All operator
//! identities are asserted on explicitly computed safe-degree blocks; every
//! report records the block it used.

use crate::error::{Error, Result};
use crate::fock::TruncatedFock;
use crate::gns::{build_gns, GnsSpace};
use crate::herglotz::moments_from_schur;
use crate::linalg::{
    eye, herm_eig, max_abs, on_from_complement, opnorm, pinv, range_basis, OnCoords, CMat,
};
use crate::series::FreeSeries;
use crate::tol;
use crate::word::{enumerate_words, Word};
use crate::Side;

/// A free deBranges-Rovnyak space `H(B)` realized as the range of
/// `D = I − M_B M_B^*` on the truncated Fock space, with the complementary-range
/// inner product `⟨f, D⁺ g⟩`.
pub struct DbrSpace {
    b: FreeSeries,
    side: Side,
    fock: TruncatedFock,
    dmat: CMat,
    on: OnCoords,
}

impl DbrSpace {
    pub fn series(&self) -> &FreeSeries {
        &self.b
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn fock(&self) -> &TruncatedFock {
        &self.fock
    }

    /// The complement operator `D = I − M_B M_B^*`.
    pub fn dmat(&self) -> &CMat {
        &self.dmat
    }

    pub fn rank(&self) -> usize {
        self.on.rank
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.on.eigvals
    }

    /// Fock representative → ON coordinates (projects along `ker D`).
    pub fn to_on(&self) -> &CMat {
        &self.on.to_on
    }

    /// ON coordinates → Fock representative in `ran D`.
    pub fn from_on(&self) -> &CMat {
        &self.on.from_on
    }

    /// Kernel coefficient map `k̂_α = D E_α : C^m → H(B)` as a Fock-representative
    /// matrix.
    pub fn kernel_map(&self, alpha: &Word) -> Result<CMat> {
        let e = self
            .fock
            .word_block(alpha)
            .ok_or_else(|| Error::InvalidParameter(format!("word \"{alpha}\" beyond truncation")))?;
        Ok(&self.dmat * e)
    }

    /// ON basis of the image of the degree `<= deg` raw block inside the space.
    pub fn safe_basis(&self, deg: usize) -> CMat {
        let cols = self.fock.dim_up_to(deg);
        range_basis(&self.on.to_on.columns(0, cols).into_owned(), tol::RANK_REL)
    }
}

/// Build `H(B)` for the given side. Errors if `I − M_B M_B^*` is not PSD at the
/// relative tolerance (the series is certainly not a contraction at this level).
pub fn dbr_space(b: &FreeSeries, side: Side) -> Result<DbrSpace> {
    let fock = TruncatedFock::new(b.d(), b.m(), b.trunc())?;
    let mult = b.mult_matrix(side, &fock)?;
    let dmat = eye(fock.dim()) - &mult * mult.adjoint();
    let eig = herm_eig(&dmat);
    let min_eig = eig.vals.last().copied().unwrap_or(0.0);
    let max_eig = eig.vals.first().copied().unwrap_or(0.0);
    if min_eig < -tol::PSD_REL * max_eig.abs().max(1.0) {
        return Err(Error::NotContractive { min_eig });
    }
    let on = on_from_complement(&dmat, tol::RANK_REL);
    Ok(DbrSpace { b: b.clone(), side, fock, dmat, on })
}

/// The unique contractive Gleason solution for the series itself: for the right
/// side, component `j` has coefficients `(𝐁_j)_α = B_{jα}` (the left-shift
/// adjoint of the coefficients); the left side strips the last letter instead.
/// Components are returned as Fock-representative matrices `C^m → F² ⊗ C^m`.
pub struct GleasonB {
    pub components: Vec<CMat>,
}

pub fn gleason_b(b: &FreeSeries, side: Side) -> Result<GleasonB> {
    let fock = TruncatedFock::new(b.d(), b.m(), b.trunc())?;
    let m = b.m();
    let dim = fock.dim();
    let mut components = Vec::with_capacity(b.d());
    for j in 1..=b.d() {
        let mut comp = CMat::zeros(dim, m);
        for (w, mat) in b.coeffs() {
            let stripped = match side {
                Side::Right => {
                    // w = j·α ⟹ contributes B_w at α
                    let mut it = w.letters();
                    if it.next() != Some(j) {
                        continue;
                    }
                    Word::new(b.d(), &w.letters().skip(1).collect::<Vec<_>>())?
                }
                Side::Left => {
                    // w = α·j ⟹ contributes B_w at α
                    let letters: Vec<usize> = w.letters().collect();
                    if letters.last() != Some(&j) {
                        continue;
                    }
                    Word::new(b.d(), &letters[..letters.len() - 1])?
                }
            };
            let base = fock.word_index(&stripped).expect("shorter word") * m;
            for r in 0..m {
                for cix in 0..m {
                    comp[(base + r, cix)] += mat[(r, cix)];
                }
            }
        }
        components.push(comp);
    }
    Ok(GleasonB { components })
}

/// Residual of the difference-quotient identity `Σ_j Z_j 𝐁_j(Z) = B(Z) − B_0`
/// (exact up to the truncation degree) and the contractivity margin
/// `min eig (I − B_0^* B_0 − 𝐁^* 𝐁)`.
pub struct GleasonBReport {
    pub identity_error: f64,
    pub contractivity_margin: f64,
}

pub fn gleason_b_check(b: &FreeSeries, side: Side, sol: &GleasonB) -> Result<GleasonBReport> {
    let fock = TruncatedFock::new(b.d(), b.m(), b.trunc())?;
    let m = b.m();
    // Rebuild Σ_j Z_j 𝐁_j coefficientwise and compare with B − B_0.
    let mut identity_error: f64 = 0.0;
    for w in enumerate_words(b.d(), b.trunc())? {
        let mut acc = CMat::zeros(m, m);
        if !w.is_empty() {
            let letters: Vec<usize> = w.letters().collect();
            match side {
                Side::Right => {
                    let j = letters[0];
                    let rest = Word::new(b.d(), &letters[1..])?;
                    let base = fock.word_index(&rest).expect("in range") * m;
                    let comp = &sol.components[j - 1];
                    for r in 0..m {
                        for cix in 0..m {
                            acc[(r, cix)] = comp[(base + r, cix)];
                        }
                    }
                }
                Side::Left => {
                    let j = *letters.last().expect("nonempty");
                    let rest = Word::new(b.d(), &letters[..letters.len() - 1])?;
                    let base = fock.word_index(&rest).expect("in range") * m;
                    let comp = &sol.components[j - 1];
                    for r in 0..m {
                        for cix in 0..m {
                            acc[(r, cix)] = comp[(base + r, cix)];
                        }
                    }
                }
            }
            identity_error = identity_error.max(max_abs(&(acc - b.coeff(&w))));
        }
    }
    // Contractivity in the H(B) metric: 𝐁^*𝐁 = Σ_j comp_j^* D⁺ comp_j ⪯ I − B_0^*B_0.
    let space = dbr_space(b, side)?;
    let mut gram = CMat::zeros(m, m);
    for comp in &sol.components {
        let on = space.to_on() * comp;
        gram += on.adjoint() * on;
    }
    let b0 = b.constant_coeff();
    let slack = eye(m) - b0.adjoint() * &b0 - gram;
    let eig = herm_eig(&slack);
    Ok(GleasonBReport {
        identity_error,
        contractivity_margin: eig.vals.last().copied().unwrap_or(0.0),
    })
}

/// The unique contractive Gleason solution for the space: `X̂_j^*` is the
/// compression of the backward shift `L_j^* ⊗ I` to `H(B)`, in ON coordinates.
/// Returns the adjoint matrices `X̂_j^*`.
pub fn gleason_x(space: &DbrSpace) -> Result<Vec<CMat>> {
    let mut out = Vec::with_capacity(space.fock.d());
    for j in 1..=space.fock.d() {
        let s = space.fock.creation_matrix(Side::Left, j)?;
        out.push(space.to_on() * s.adjoint() * space.from_on());
    }
    Ok(out)
}

/// Safe-block contractivity margin of the space's Gleason solution: smallest
/// eigenvalue of `J^* (I − k̂_0 k̂_0^* − X̂ X̂^*) J` with `J` spanning the image of
/// the degree `<= deg` block. Nonnegative up to truncation noise.
pub fn gleason_x_contractivity(space: &DbrSpace, deg: usize) -> Result<f64> {
    let x = gleason_x(space)?;
    let r = space.rank();
    let mut xx = CMat::zeros(r, r);
    for xj in &x {
        xx += xj.adjoint() * xj;
    }
    let e0 = space
        .fock()
        .word_block(&Word::empty(space.fock().d())?)
        .expect("vacuum block");
    let k0 = space.to_on() * space.dmat() * e0;
    let slack = eye(r) - &k0 * k0.adjoint() - xx;
    let j = space.safe_basis(deg);
    let eig = herm_eig(&(j.adjoint() * slack * j));
    Ok(eig.vals.last().copied().unwrap_or(0.0))
}

/// Everything the Clark verification needs, built once per Schur pair.
pub struct ClarkContext {
    pub b_left: FreeSeries,
    pub b_right: FreeSeries,
    pub gns: GnsSpace,
    pub dbr: DbrSpace,
    /// Weighted right Cauchy transform in ON coordinates (`H(B)` rank × GNS rank).
    pub weighted: CMat,
    /// Gleason solution components for `B^R` (Fock representatives).
    pub gleason: GleasonB,
}

impl ClarkContext {
    pub fn new(b_left: &FreeSeries) -> Result<ClarkContext> {
        let b_right = b_left.transpose_series();
        let phi = moments_from_schur(b_left)?;
        let gns = build_gns(&phi)?;
        let dbr = dbr_space(&b_right, Side::Right)?;
        let weighted = weighted_cauchy(&gns, &dbr)?.matrix;
        let gleason = gleason_b(&b_right, Side::Right)?;
        Ok(ClarkContext { b_left: b_left.clone(), b_right, gns, dbr, weighted, gleason })
    }

    /// Degree below which truncated operator identities are exact.
    pub fn safe_degree(&self) -> usize {
        let n = self.b_right.trunc();
        n.saturating_sub(self.b_right.degree()).saturating_sub(1)
    }
}

/// The free right Cauchy transform as a matrix from GNS ON coordinates to
/// power-series coefficient vectors: the GNS class of `π(L)^α [I⊗] e_i` maps to
/// the series whose coefficients are the kernel column `(K̂^R_{β,α} e_i)_β`.
pub fn cauchy_transform(gns: &GnsSpace, _b_right: &FreeSeries) -> CMat {
    gns.gram() * gns.from_on()
}

/// Gram-transport defect of the free right Cauchy transform: with `G` the right
/// Herglotz Gram, `Ĉ^* G⁺ Ĉ` must be the identity on GNS ON coordinates.
pub fn cauchy_isometry_defect(gns: &GnsSpace) -> f64 {
    let c = gns.gram() * gns.from_on();
    let gp = pinv(gns.gram(), tol::RANK_REL);
    let prod = c.adjoint() * gp * c;
    opnorm(&(prod - eye(gns.rank())))
}

pub struct WeightedCauchy {
    /// GNS ON coordinates → `H(B)` ON coordinates.
    pub matrix: CMat,
    /// Largest residual of an image column outside `ran D` (truncation leak).
    pub leak: f64,
}

/// The weighted free right Cauchy transform `F̂_R = (I − B^R) •_R Ĉ_R`, expressed
/// between ON coordinates. Unitary up to truncation noise; a leak above 1e-8
/// would mean an image escaped the range of `D` and is reported, not hidden.
pub fn weighted_cauchy(gns: &GnsSpace, dbr: &DbrSpace) -> Result<WeightedCauchy> {
    if dbr.side() != Side::Right {
        return Err(Error::InvalidParameter(
            "weighted Cauchy transform wants the right deBranges-Rovnyak space".into(),
        ));
    }
    let mult = dbr
        .series()
        .one_minus()
        .mult_matrix(Side::Right, dbr.fock())?;
    let raw = mult * gns.gram() * gns.from_on();
    // residual outside ran D
    let back = dbr.from_on() * (dbr.to_on() * &raw);
    let leak = max_abs(&(&back - &raw));
    Ok(WeightedCauchy { matrix: dbr.to_on() * raw, leak })
}

/// Unitarity defect of the weighted transform on the degree `<= deg` block of
/// the GNS space.
pub fn weighted_cauchy_defect(gns: &GnsSpace, w: &WeightedCauchy, deg: usize) -> f64 {
    let cols = gns.fock().dim_up_to(deg);
    let j = range_basis(&gns.to_on().columns(0, cols).into_owned(), tol::RANK_REL);
    let wj = &w.matrix * &j;
    opnorm(&(wj.adjoint() * wj - eye(j.ncols())))
}

/// The transposition unitary `W_T = F̂_L F̂_R^* : H^R(B) → H^L(B)` together with
/// its action defect against literal coefficient transposition and its
/// unitarity defect.
pub struct TranspositionW {
    pub matrix: CMat,
    pub action_error: f64,
    pub unitarity_defect: f64,
}

pub fn transposition_w(b_left: &FreeSeries) -> Result<TranspositionW> {
    let ctx = ClarkContext::new(b_left)?;
    transposition_w_in(&ctx)
}

pub fn transposition_w_in(ctx: &ClarkContext) -> Result<TranspositionW> {
    let dbr_l = dbr_space(&ctx.b_left, Side::Left)?;
    let fock = ctx.dbr.fock();
    let perm = fock.transposition_unitary();
    // Left Herglotz Gram = Π G Π; left Cauchy on raw coordinates is the
    // transposition permutation, so F̂_L = M^L_{I−B^L} · G_L · Π.
    let g_l = &perm * ctx.gns.gram() * &perm;
    let mult_l = ctx.b_left.one_minus().mult_matrix(Side::Left, fock)?;
    let f_l = dbr_l.to_on() * (mult_l * g_l * &perm * ctx.gns.from_on());
    let w = &f_l * ctx.weighted.adjoint();

    // Action on Fock representatives: W_T f = Π f for f ∈ ran D_R.
    let candidates = ctx.dbr.from_on(); // columns: an ON basis of ran D_R
    let image = dbr_l.from_on() * (&w * (ctx.dbr.to_on() * candidates));
    let expected = &perm * candidates;
    let action_error = max_abs(&(image - expected));
    let unitarity_defect = opnorm(&(w.adjoint() * &w - eye(ctx.dbr.rank())));
    Ok(TranspositionW { matrix: w, action_error, unitarity_defect })
}

/// Report of the right free Clark intertwining verification.
#[derive(Debug, Clone)]
pub struct ClarkReport {
    /// Max-entry error of the operator identity, per letter, on the safe block.
    pub lhs_rhs_error: f64,
    /// Coefficientwise error of the backward-shift kernel identity (ClarkA).
    pub kernel_identity_error: f64,
    /// Coefficientwise error of the transformed-side identity (ClarkB).
    pub transform_identity_error: f64,
    pub safe_degree: usize,
}

/// Verify the right free Clark intertwining for the pair of `b_left`:
/// both the operator-level identity in `H^R(B)` ON coordinates and the two
/// proof-level coefficient identities, all on the safe block.
pub fn verify_clark(b_left: &FreeSeries) -> Result<ClarkReport> {
    let ctx = ClarkContext::new(b_left)?;
    verify_clark_in(&ctx)
}

pub fn verify_clark_in(ctx: &ClarkContext) -> Result<ClarkReport> {
    let m = ctx.b_right.m();
    let safe_degree = ctx.safe_degree();
    let fock = ctx.dbr.fock();
    let b0 = ctx.b_right.constant_coeff();
    let b0_inv = pinv(&(eye(m) - &b0), 0.0);

    // vacuum kernel functional k̂_0^* in ON coordinates
    let e0 = fock.word_block(&Word::empty(ctx.b_right.d())?).expect("vacuum");
    let k0_star = e0.adjoint() * ctx.dbr.from_on();

    // Test vectors: columns restricted to the degree <= safe block of H(B), rows
    // to the F̂-image of the degree <= N-1 classes of F²(μ) — the block on which
    // every operator involved is an honest compression of its infinite original.
    let j = ctx.dbr.safe_basis(safe_degree);
    let u = &ctx.weighted * ctx.gns.safe_block();
    let mut lhs_rhs_error: f64 = 0.0;
    for jj in 1..=ctx.b_right.d() {
        let lhs = &ctx.weighted * ctx.gns.pi(jj).adjoint() * ctx.weighted.adjoint();
        let s = fock.creation_matrix(Side::Left, jj)?;
        let shift = ctx.dbr.to_on() * s.adjoint() * ctx.dbr.from_on();
        let pert = (ctx.dbr.to_on() * &ctx.gleason.components[jj - 1]) * &b0_inv * &k0_star;
        let diff = u.adjoint() * (lhs - (shift + pert)) * &j;
        lhs_rhs_error = lhs_rhs_error.max(max_abs(&diff));
    }

    // ClarkA: (L_j^* ⊗ I) k̂_γ = [γ=jβ] k̂_β − 𝐁_j B_γ^*, rows of degree <= safe.
    let rows = fock.dim_up_to(safe_degree);
    let mut kernel_identity_error: f64 = 0.0;
    for gamma in enumerate_words(ctx.b_right.d(), safe_degree)? {
        let k_gamma = ctx.dbr.kernel_map(&gamma)?;
        let bg_adj = ctx.b_right.coeff(&gamma).adjoint();
        for jj in 1..=ctx.b_right.d() {
            let s = fock.creation_matrix(Side::Left, jj)?;
            let lhs = s.adjoint() * &k_gamma;
            let mut rhs = -(&ctx.gleason.components[jj - 1] * &bg_adj);
            let letters: Vec<usize> = gamma.letters().collect();
            if letters.first() == Some(&jj) {
                let beta = Word::new(ctx.b_right.d(), &letters[1..])?;
                rhs += ctx.dbr.kernel_map(&beta)?;
            }
            let diff = (lhs - rhs).rows(0, rows).into_owned();
            kernel_identity_error = kernel_identity_error.max(max_abs(&diff));
        }
    }

    // ClarkB: F̂ π(L_j)^* F̂^* k̂_γ = [γ=jβ] k̂_β + 𝐁_j (I−B_0)^{-1}([γ=∅]I − B_γ^*).
    let mut transform_identity_error: f64 = 0.0;
    for gamma in enumerate_words(ctx.b_right.d(), safe_degree)? {
        let k_gamma_on = ctx.dbr.to_on() * ctx.dbr.kernel_map(&gamma)?;
        let bg_adj = ctx.b_right.coeff(&gamma).adjoint();
        for jj in 1..=ctx.b_right.d() {
            let lhs_on =
                &ctx.weighted * ctx.gns.pi(jj).adjoint() * ctx.weighted.adjoint() * &k_gamma_on;
            let lhs = ctx.dbr.from_on() * lhs_on;
            let mut scalar = -bg_adj.clone();
            if gamma.is_empty() {
                scalar += eye(m);
            }
            let mut rhs = &ctx.gleason.components[jj - 1] * &b0_inv * scalar;
            let letters: Vec<usize> = gamma.letters().collect();
            if letters.first() == Some(&jj) {
                let beta = Word::new(ctx.b_right.d(), &letters[1..])?;
                rhs += ctx.dbr.kernel_map(&beta)?;
            }
            let diff = (lhs - rhs).rows(0, rows).into_owned();
            transform_identity_error = transform_identity_error.max(max_abs(&diff));
        }
    }

    Ok(ClarkReport {
        lhs_rhs_error,
        kernel_identity_error,
        transform_identity_error,
        safe_degree,
    })
}

/// Report for one member of the unitary Clark family.
pub struct FamilyReport {
    /// `max |D_{BU^*} − D_B|`; the complement operator is invariant.
    pub d_invariance: f64,
    pub clark: ClarkReport,
}

/// Run the Clark verification on `B U^*` for a unitary `U` on the coefficient
/// space, and check that the deBranges-Rovnyak complement is unchanged.
pub fn clark_family(b_left: &FreeSeries, u: &CMat) -> Result<FamilyReport> {
    let m = b_left.m();
    if u.nrows() != m || u.ncols() != m {
        return Err(Error::DimensionMismatch("family unitary must be m x m".into()));
    }
    let defect = max_abs(&(u.adjoint() * u - eye(m)));
    if defect > 1e-12 {
        return Err(Error::NotUnitary { defect });
    }
    let bu = b_left.coeff_right_mul(&u.adjoint())?;
    let fock = TruncatedFock::new(b_left.d(), m, b_left.trunc())?;
    let d_of = |s: &FreeSeries| -> Result<CMat> {
        let mult = s.transpose_series().mult_matrix(Side::Right, &fock)?;
        Ok(eye(fock.dim()) - &mult * mult.adjoint())
    };
    let d_invariance = max_abs(&(d_of(&bu)? - d_of(b_left)?));
    let clark = verify_clark(&bu)?;
    Ok(FamilyReport { d_invariance, clark })
}

/// Solve the degree-truncated Gleason constraint system from scratch and compare
/// with the closed-form solution: the constraints `Σ_j Z_j 𝐁_j = B − B_0` pin the
/// coefficients of degree `< N` uniquely, so the contractive solution set is the
/// single point produced by [`gleason_b`]. Returns (residual to closed form,
/// smallest singular value of the constraint map — nonzero means uniqueness).
pub fn gleason_uniqueness_check(b: &FreeSeries, side: Side) -> Result<(f64, f64)> {
    let fock = TruncatedFock::new(b.d(), b.m(), b.trunc())?;
    let m = b.m();
    let d = b.d();
    let unknown_words = enumerate_words(d, b.trunc() - 1)?;
    let cols = d * unknown_words.len();
    let target_words = enumerate_words(d, b.trunc())?;
    let rows = target_words.len() - 1; // all nonempty words
    // Constraint matrix acting on stacked coefficient unknowns (per coefficient
    // column; the scalar structure is shared, so solve with m×m blocks folded in).
    let mut a = CMat::zeros(rows, cols);
    for (ri, w) in target_words.iter().filter(|w| !w.is_empty()).enumerate() {
        let letters: Vec<usize> = w.letters().collect();
        let (j, rest) = match side {
            Side::Right => (letters[0], Word::new(d, &letters[1..])?),
            Side::Left => (
                *letters.last().expect("nonempty"),
                Word::new(d, &letters[..letters.len() - 1])?,
            ),
        };
        let ui = unknown_words
            .binary_search(&rest)
            .expect("unknown word in range");
        a[(ri, (j - 1) * unknown_words.len() + ui)] = crate::linalg::c(1.0);
    }
    let smin = crate::linalg::singular_values(&a)
        .last()
        .copied()
        .unwrap_or(0.0);
    // Solve A x = rhs for each coefficient entry; compare with gleason_b.
    let sol = gleason_b(b, side)?;
    let a_pinv = pinv(&a, tol::RANK_REL);
    let mut resid: f64 = 0.0;
    for r in 0..m {
        for cix in 0..m {
            let mut rhs = CMat::zeros(rows, 1);
            for (ri, w) in target_words.iter().filter(|w| !w.is_empty()).enumerate() {
                rhs[(ri, 0)] = b.coeff(w)[(r, cix)];
            }
            let x = &a_pinv * rhs;
            for (ui, uw) in unknown_words.iter().enumerate() {
                for j in 1..=d {
                    let got = x[((j - 1) * unknown_words.len() + ui, 0)];
                    let base = fock.word_index(uw).expect("in range") * m;
                    let expect = sol.components[j - 1][(base + r, cix)];
                    resid = resid.max((got - expect).norm());
                }
            }
        }
    }
    Ok((resid, smin))
}
