//! deBranges-Rovnyak colligations and transfer-function realizations.
//!
//! The canonical right colligation of a free Schur pair has blocks
//! `A_j = (L_j^* ⊗ I)|_{H^R(B)}`, `B_j = 𝐁^R_j` (the Gleason solution for `B^R`),
//! `C = k̂_0^*`, `D = B_0`, all in `H^R(B)` ON coordinates; its transfer function
//! `D + C (I − ZA)^{-1} B` realizes the left series `B^L`. Conjugating the state
//! blocks by the co-isometry `C_{H²}` produces a canonical colligation for the
//! symmetrization `b`, and the same colligation arises directly from the
//! commutative Gleason solutions of the underlying extension `D ⊇ V^b` — the two
//! routes are compared blockwise.

use num_complex::Complex64;

use crate::clark::{dbr_space, gleason_b, gleason_x, DbrSpace};
use crate::commutative::{comm_gleason, CommDbrSpace, CommHerglotzSpace, RowContractionExt, CH2};
use crate::error::{Error, Result};
use crate::linalg::{eye, kron, max_abs, opnorm, solve, CMat};
use crate::series::{CommSeries, FreeSeries, NCPoint};
use crate::word::{enumerate_words, MultiIndex, Word};
use crate::Side;

/// Block operator `[A B; C D] : state ⊕ coeff → (state ⊗ C^d) ⊕ coeff`.
#[derive(Debug, Clone)]
pub struct Colligation {
    /// State blocks `A_j` (`r × r` each).
    pub a: Vec<CMat>,
    /// Input blocks `B_j` (`r × m` each).
    pub b: Vec<CMat>,
    /// Output block `C` (`m × r`).
    pub c: CMat,
    /// Feedthrough `D` (`m × m`).
    pub d: CMat,
}

impl Colligation {
    pub fn state_dim(&self) -> usize {
        self.c.ncols()
    }

    pub fn coeff_dim(&self) -> usize {
        self.d.nrows()
    }

    pub fn vars(&self) -> usize {
        self.a.len()
    }

    /// The full block matrix `[A_1 B_1; …; A_d B_d; C D]`.
    pub fn block_matrix(&self) -> CMat {
        let r = self.state_dim();
        let m = self.coeff_dim();
        let d = self.vars();
        let mut u = CMat::zeros(d * r + m, r + m);
        for j in 0..d {
            u.view_mut((j * r, 0), (r, r)).copy_from(&self.a[j]);
            u.view_mut((j * r, r), (r, m)).copy_from(&self.b[j]);
        }
        u.view_mut((d * r, 0), (m, r)).copy_from(&self.c);
        u.view_mut((d * r, r), (m, m)).copy_from(&self.d);
        u
    }

    /// Blockwise max-entry distance between two colligations.
    pub fn max_block_diff(&self, other: &Colligation) -> f64 {
        max_abs(&(self.block_matrix() - other.block_matrix()))
    }
}

/// The canonical deBranges-Rovnyak colligation of the side series in its own
/// deBranges-Rovnyak space. For `side = Right` the transfer function realizes
/// the transposed (left) series.
pub fn free_colligation(series: &FreeSeries, side: Side) -> Result<(Colligation, DbrSpace)> {
    let space = dbr_space(series, side)?;
    let x_adj = gleason_x(&space)?;
    let gleason = gleason_b(series, side)?;
    let b_blocks: Vec<CMat> = gleason
        .components
        .iter()
        .map(|comp| space.to_on() * comp)
        .collect();
    // Vacuum kernel functional k̂_0^*: pairs an element with its ∅ coefficient,
    // which on ON coordinates is plain row extraction through from_on.
    let e0 = space
        .fock()
        .word_block(&Word::empty(series.d())?)
        .expect("vacuum block");
    let c = e0.adjoint() * space.from_on();
    let colligation = Colligation {
        a: x_adj,
        b: b_blocks,
        c,
        d: series.constant_coeff(),
    };
    Ok((colligation, space))
}

/// Co-isometry defect of the canonical colligation in coefficient form: the
/// blocks of `U U^* − I` paired against kernel columns of degree `< N` reduce to
/// the exact level data
///
/// ```text
/// K(jγ, kδ) + 𝐁_j[γ] 𝐁_k[δ]^* − δ_jk K(γ, δ),
/// K(jγ, ∅) + 𝐁_j[γ] B_0^*,   and   K(∅,∅) + B_0 B_0^* − I,
/// ```
///
/// with `K` the side deBranges-Rovnyak coefficient kernel. Metric-projected
/// formulations smear the truncation boundary over all degrees; this one does
/// not, so the defect is floating-point small for any certified contraction.
pub fn coisometry_defect(series: &FreeSeries, side: Side) -> Result<f64> {
    let d = series.d();
    let m = series.m();
    let trunc = series.trunc();
    let (kern, _) = crate::kernels::dbr_kernel(series, side)?;
    let gl = gleason_b(series, side)?;
    let fock = crate::fock::TruncatedFock::new(d, m, trunc)?;
    let coeff = |j: usize, g: &Word| -> CMat {
        let base = fock.word_index(g).expect("degree < N") * m;
        gl.components[j - 1].rows(base, m).into_owned()
    };
    let extend = |g: &Word, j: usize| match side {
        Side::Right => g.prepend(j),
        Side::Left => g.append(j),
    };
    let b0 = series.constant_coeff();
    let empty = Word::empty(d)?;
    let mut worst: f64 = 0.0;
    for gamma in enumerate_words(d, trunc - 1)? {
        for delta in enumerate_words(d, trunc - 1)? {
            for j in 1..=d {
                for k in 1..=d {
                    let mut blk = kern.entry(&extend(&gamma, j), &extend(&delta, k))
                        + coeff(j, &gamma) * coeff(k, &delta).adjoint();
                    if j == k {
                        blk -= kern.entry(&gamma, &delta);
                    }
                    worst = worst.max(max_abs(&blk));
                }
            }
        }
        for j in 1..=d {
            let cross = kern.entry(&extend(&gamma, j), &empty) + coeff(j, &gamma) * b0.adjoint();
            worst = worst.max(max_abs(&cross));
        }
    }
    worst = worst.max(max_abs(&(kern.entry(&empty, &empty) + &b0 * b0.adjoint() - eye(m))));
    Ok(worst)
}

/// Contractivity defect `max(0, ||U J|| − 1)` on the safe block.
pub fn contraction_defect_on(colligation: &Colligation, j: &CMat) -> f64 {
    let u = colligation.block_matrix();
    let r = colligation.state_dim();
    let m = colligation.coeff_dim();
    let mut big = CMat::zeros(r + m, j.ncols() + m);
    big.view_mut((0, 0), (r, j.ncols())).copy_from(j);
    big.view_mut((r, j.ncols()), (m, m)).copy_from(&eye(m));
    (opnorm(&(u * big)) - 1.0).max(0.0)
}

/// Blockwise distance between two commutative colligations on the same `H(b)`,
/// measured where the truncation leaves the data meaningful: rows are pushed to
/// Taylor coefficients of degree `< N` (both routes agree below the boundary and
/// legitimately differ at degree `N`), state columns are restricted to the safe
/// basis.
pub fn route_agreement_defect(
    via_free: &Colligation,
    direct: &Colligation,
    comm_dbr: &CommDbrSpace,
    safe_deg: usize,
) -> Result<f64> {
    let taylor = comm_dbr.taylor_rows()?;
    let trunc = comm_dbr.series().trunc();
    let m = comm_dbr.series().m();
    let rows = comm_dbr
        .indices()
        .iter()
        .take_while(|n| n.degree() < trunc)
        .count()
        * m;
    let tfilter = taylor.rows(0, rows).into_owned();
    let j = comm_dbr.safe_basis(safe_deg);
    let mut worst = max_abs(&(&via_free.d - &direct.d));
    worst = worst.max(max_abs(&((&via_free.c - &direct.c) * &j)));
    for blk in 0..via_free.vars() {
        let da = &via_free.a[blk] - &direct.a[blk];
        let db = &via_free.b[blk] - &direct.b[blk];
        worst = worst.max(max_abs(&(&tfilter * da * &j)));
        worst = worst.max(max_abs(&(&tfilter * db)));
    }
    Ok(worst)
}

/// Transfer function at an NC point: `I ⊗ D + (I ⊗ C)(I − Σ Z_j ⊗ A_j)^{-1}(Σ Z_j ⊗ B_j)`.
/// Errors when the resolvent solve fails or its residual is untrustworthy.
pub fn transfer_eval(colligation: &Colligation, p: &NCPoint) -> Result<CMat> {
    if p.d() != colligation.vars() {
        return Err(Error::DimensionMismatch("point vars != colligation vars".into()));
    }
    let n = p.dim();
    let r = colligation.state_dim();
    let m = colligation.coeff_dim();
    let mut za = CMat::zeros(n * r, n * r);
    let mut zb = CMat::zeros(n * r, n * m);
    for j in 1..=colligation.vars() {
        za += kron(p.mat(j), &colligation.a[j - 1]);
        zb += kron(p.mat(j), &colligation.b[j - 1]);
    }
    let x = solve(&(eye(n * r) - za), &zb)?;
    Ok(kron(&eye(n), &colligation.d) + kron(&eye(n), &colligation.c) * x)
}

/// Coefficients of the transfer function as a left free series up to `maxdeg`:
/// the word `i_1 … i_k` carries `C A_{i_1} ⋯ A_{i_{k-1}} B_{i_k}`.
pub fn transfer_coeffs(
    colligation: &Colligation,
    d_vars: usize,
    maxdeg: usize,
    trunc: usize,
) -> Result<FreeSeries> {
    let m = colligation.coeff_dim();
    let mut out = FreeSeries::zero(d_vars, m, trunc);
    out.set_coeff(Word::empty(d_vars)?, colligation.d.clone())?;
    // running products C·A^w along the graded order
    let mut prods: std::collections::BTreeMap<Word, CMat> = std::collections::BTreeMap::new();
    prods.insert(Word::empty(d_vars)?, colligation.c.clone());
    for w in enumerate_words(d_vars, maxdeg)? {
        if w.is_empty() {
            continue;
        }
        let letters: Vec<usize> = w.letters().collect();
        let prefix = Word::new(d_vars, &letters[..letters.len() - 1])?;
        let last = *letters.last().expect("nonempty");
        let cw = prods.get(&prefix).expect("graded order");
        out.set_coeff(w.clone(), cw * &colligation.b[last - 1])?;
        if w.len() < maxdeg {
            let next = cw * &colligation.a[last - 1];
            prods.insert(w, next);
        }
    }
    Ok(out)
}

/// Conjugate the state blocks of a free colligation by `C_{H²}` to obtain a
/// canonical colligation for the symmetrization.
pub fn comm_colligation_from_free(colligation: &Colligation, ch2: &CH2) -> Colligation {
    let c = &ch2.matrix;
    Colligation {
        a: colligation.a.iter().map(|a| c * a * c.adjoint()).collect(),
        b: colligation.b.iter().map(|b| c * b).collect(),
        c: &colligation.c * c.adjoint(),
        d: colligation.d.clone(),
    }
}

/// The canonical commutative colligation `[X[D]^*  b[D]; k_0^*  b(0)]` built
/// directly from the Gleason solutions of an extension `D ⊇ V^b`.
pub fn comm_colligation_from_extension(
    space: &CommHerglotzSpace,
    ext: &RowContractionExt,
    comm_dbr: &CommDbrSpace,
    safe_deg: usize,
) -> Result<Colligation> {
    let g = comm_gleason(space, ext, comm_dbr, safe_deg)?;
    let k0 = comm_dbr.kernel_on(&MultiIndex::zero(space.d()))?;
    Ok(Colligation {
        a: g.x_adj,
        b: g.b_sol,
        c: k0.adjoint(),
        d: comm_dbr.series().constant_coeff(),
    })
}

/// Transfer function of a commutative colligation at a scalar point of the ball.
pub fn comm_transfer_eval(colligation: &Colligation, z: &[Complex64]) -> Result<CMat> {
    if z.len() != colligation.vars() {
        return Err(Error::DimensionMismatch("point vars != colligation vars".into()));
    }
    let r = colligation.state_dim();
    let mut za = CMat::zeros(r, r);
    let mut zb = CMat::zeros(r, colligation.coeff_dim());
    for j in 0..z.len() {
        za += colligation.a[j].map(|v| v * z[j]);
        zb += colligation.b[j].map(|v| v * z[j]);
    }
    let x = solve(&(eye(r) - za), &zb)?;
    Ok(&colligation.d + &colligation.c * x)
}

/// Taylor coefficients of the commutative transfer function up to `maxdeg`:
/// the symmetrization of the free-style coefficient expansion.
pub fn comm_transfer_coeffs(
    colligation: &Colligation,
    d_vars: usize,
    maxdeg: usize,
    trunc: usize,
) -> Result<CommSeries> {
    Ok(transfer_coeffs(colligation, d_vars, maxdeg, trunc)?.symmetrize())
}

/// Observability proxy: smallest relative singular value of the stacked map
/// `f ↦ (C A^w f)_{|w| <= maxdeg}`, with the state restricted to the image of
/// the degree `<= maxdeg` block (outputs over those words can only determine
/// those coefficients; deeper state directions need longer words than the
/// truncation affords). Near zero would mean an unobservable direction.
pub fn observability_margin(
    colligation: &Colligation,
    space: &DbrSpace,
    d_vars: usize,
    maxdeg: usize,
) -> Result<f64> {
    let r = colligation.state_dim();
    let m = colligation.coeff_dim();
    let words = enumerate_words(d_vars, maxdeg)?;
    let mut obs = CMat::zeros(words.len() * m, r);
    let mut prods: std::collections::BTreeMap<Word, CMat> = std::collections::BTreeMap::new();
    prods.insert(Word::empty(d_vars)?, colligation.c.clone());
    for (k, w) in words.iter().enumerate() {
        if !w.is_empty() {
            let letters: Vec<usize> = w.letters().collect();
            let prefix = Word::new(d_vars, &letters[..letters.len() - 1])?;
            let last = *letters.last().expect("nonempty");
            let cw = prods.get(&prefix).expect("graded order").clone() * &colligation.a[last - 1];
            prods.insert(w.clone(), cw);
        }
        obs.view_mut((k * m, 0), (m, r)).copy_from(prods.get(w).expect("just inserted"));
    }
    let j = space.safe_basis(maxdeg);
    let sig = crate::linalg::singular_values(&(obs * j));
    let smax = sig.first().copied().unwrap_or(0.0);
    let smin = sig.last().copied().unwrap_or(0.0);
    Ok(if smax > 0.0 { smin / smax } else { 0.0 })
}

/// Random jointly nilpotent NC point: strictly upper-triangular Gaussian blocks
/// scaled to row norm `target < 1`; nilpotency order is at most `n`.
pub fn random_nilpotent_point<R: rand::Rng>(
    rng: &mut R,
    d: usize,
    n: usize,
    target: f64,
) -> Result<NCPoint> {
    let mut mats = Vec::with_capacity(d);
    for _ in 0..d {
        let g = crate::linalg::rand_cmat(rng, n, n);
        let mut z = CMat::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                z[(i, j)] = g[(i, j)];
            }
        }
        mats.push(z);
    }
    let p = NCPoint::new(mats)?;
    let norm = p.row_norm();
    if norm == 0.0 {
        return Ok(p);
    }
    let scaled: Vec<CMat> = p
        .mats()
        .iter()
        .map(|z| z.map(|v| v.scale(target / norm)))
        .collect();
    NCPoint::new(scaled)
}
