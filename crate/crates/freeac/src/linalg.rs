//! Small dense complex linear-algebra helpers on top of nalgebra.
//!
//! Matrices stay modest (a few hundred rows at desk scale), so everything is
//! dense and accuracy wins over speed: operator norms via SVD, pseudo-inverses
//! with a relative singular-value cutoff, Hermitian eigendecompositions with
//! eigenvalues sorted descending.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tol;

pub type C = Complex64;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn c(re: f64) -> C {
    Complex64::new(re, 0.0)
}

pub fn ci(re: f64, im: f64) -> C {
    Complex64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Largest singular value by power iteration on `A^*A` with a residual-based
/// stop; 0 for empty matrices.
///
/// The estimate is a true lower bound for the operator norm (it is a Rayleigh
/// quotient), accurate to ~1e-12 relative for separated spectra and to the
/// cluster width otherwise — always enough for measurements and certificates.
pub fn opnorm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let q = m.ncols();
    let mut v = CVec::from_fn(q, |i, _| Complex64::new(1.0 + (i as f64) * 1e-3, 0.5));
    let nv = v.norm();
    v /= c(nv);
    let mut lam = 0.0f64;
    for it in 0..1000 {
        let av = m * &v;
        let w = m.adjoint() * av;
        let wnorm = w.norm();
        if wnorm == 0.0 {
            return 0.0;
        }
        lam = wnorm; // Rayleigh quotient of A^*A at unit v equals |w| asymptotically
        let next = w / c(wnorm);
        let resid = (&next - &v).norm().min((&next + &v).norm());
        v = next;
        if resid < 1e-13 && it > 4 {
            break;
        }
    }
    // one final Rayleigh evaluation
    let av = m * &v;
    let rayleigh = av.norm_squared() / v.norm_squared();
    lam = lam.max(rayleigh);
    lam.sqrt()
}

/// One-sided Jacobi SVD: returns `(U, σ, V)` with `A = U diag(σ) V^*`, singular
/// values sorted descending. Slower than bidiagonalization but reliably accurate
/// (nalgebra's complex SVD can lose several digits in `U` on matrices with
/// clustered columns, which is fatal for rank decisions here).
pub fn jacobi_svd(a: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (p, q) = (a.nrows(), a.ncols());
    let mut w = a.clone(); // becomes U·Σ column by column
    let mut v = eye(q);
    let tiny = f64::MIN_POSITIVE;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..q {
            for j in (i + 1)..q {
                let mut aii = 0.0f64;
                let mut ajj = 0.0f64;
                let mut aij = Complex64::new(0.0, 0.0);
                for r in 0..p {
                    let wi = w[(r, i)];
                    let wj = w[(r, j)];
                    aii += wi.norm_sqr();
                    ajj += wj.norm_sqr();
                    aij += wi.conj() * wj;
                }
                // dead (numerically zero) columns stay untouched; rotating them
                // divides by denormals and poisons the sweep with NaNs
                if aii < 1e-280 || ajj < 1e-280 {
                    continue;
                }
                let mag = aij.norm();
                let scale = (aii * ajj).sqrt().max(tiny);
                off = off.max(mag / scale);
                if mag <= 1e-15 * scale {
                    continue;
                }
                let tau = (ajj - aii) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0f64 + tau * tau).sqrt());
                let cth = 1.0 / (1.0f64 + t * t).sqrt();
                let sth = cth * t;
                // componentwise scaling: complex division would square `mag`
                // in its denominator and underflow for tiny columns
                let phase = Complex64::new(aij.re / mag, aij.im / mag);
                for r in 0..p {
                    let wi = w[(r, i)];
                    let wj = w[(r, j)];
                    w[(r, i)] = wi * c(cth) - wj * phase.conj() * c(sth);
                    w[(r, j)] = wi * phase * c(sth) + wj * c(cth);
                }
                for r in 0..q {
                    let vi = v[(r, i)];
                    let vj = v[(r, j)];
                    v[(r, i)] = vi * c(cth) - vj * phase.conj() * c(sth);
                    v[(r, j)] = vi * phase * c(sth) + vj * c(cth);
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = (0..q).map(|k| (w.column(k).norm(), k)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut u = CMat::zeros(p, q);
    let mut vv = CMat::zeros(q, q);
    let mut sig = Vec::with_capacity(q);
    for (out, (nk, k)) in order.iter().enumerate() {
        sig.push(*nk);
        if *nk > 0.0 {
            let col = w.column(*k).into_owned() / c(*nk);
            u.set_column(out, &col);
        }
        vv.set_column(out, &v.column(*k));
    }
    (u, sig, vv)
}

/// Largest entry modulus; 0 for empty matrices.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|z| z.scale(0.5))
}

/// How far `m` is from Hermitian, as a max-entry defect.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
pub struct HermEig {
    pub vals: Vec<f64>,
    pub vecs: CMat,
}

/// Cyclic Jacobi eigensolver for complex Hermitian matrices. Quadratically
/// convergent and uniformly accurate; used directly for small matrices and as
/// the per-cluster refinement for large ones. Output sorted descending.
fn jacobi_herm(h: &CMat) -> HermEig {
    let n = h.nrows();
    let mut a = h.clone();
    let mut v = eye(n);
    let scale = max_abs(h).max(f64::MIN_POSITIVE);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let aij = a[(i, j)];
                let mag = aij.norm();
                off = off.max(mag);
                if mag <= 1e-16 * scale {
                    continue;
                }
                let tau = (a[(j, j)].re - a[(i, i)].re) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0f64 + tau * tau).sqrt());
                let cth = 1.0 / (1.0f64 + t * t).sqrt();
                let sth = cth * t;
                let phase = Complex64::new(aij.re / mag, aij.im / mag);
                // columns: G has (i,i)=c, (j,i)=phase*s... apply A ← G^† A G, V ← V G
                for r in 0..n {
                    let ari = a[(r, i)];
                    let arj = a[(r, j)];
                    a[(r, i)] = ari * c(cth) - arj * phase.conj() * c(sth);
                    a[(r, j)] = ari * phase * c(sth) + arj * c(cth);
                }
                for cix in 0..n {
                    let aic = a[(i, cix)];
                    let ajc = a[(j, cix)];
                    a[(i, cix)] = aic * c(cth) - ajc * phase * c(sth);
                    a[(j, cix)] = aic * phase.conj() * c(sth) + ajc * c(cth);
                }
                for r in 0..n {
                    let vri = v[(r, i)];
                    let vrj = v[(r, j)];
                    v[(r, i)] = vri * c(cth) - vrj * phase.conj() * c(sth);
                    v[(r, j)] = vri * phase * c(sth) + vrj * c(cth);
                }
            }
        }
        if off <= 1e-16 * scale {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let mut vals = Vec::with_capacity(n);
    let mut vecs = CMat::zeros(n, n);
    for (out, &k) in order.iter().enumerate() {
        vals.push(a[(k, k)].re);
        vecs.set_column(out, &v.column(k));
    }
    HermEig { vals, vecs }
}

/// Eigendecomposition of a (Hermitized) complex matrix.
///
/// Small matrices go straight to cyclic Jacobi. Larger ones go through the real
/// symmetric embedding `H = A + iB ↦ [[A, −B], [B, A]]` (markedly more accurate
/// than complex tridiagonal QR on clustered spectra): every eigenvalue shows up
/// twice, and within a near-degenerate cluster the real eigenvectors mix the
/// complex lines arbitrarily, so the complex eigenvectors are recovered per
/// cluster — the candidates `x + iy` span the cluster's complex eigenspace, a
/// Jacobi SVD extracts an orthonormal half-dimension basis, and the compressed
/// block `U^* H U` is rediagonalized by small-matrix Jacobi for accurate
/// eigenvalues. A final Löwdin polish restores global orthonormality.
pub fn herm_eig(m: &CMat) -> HermEig {
    let h = hermitize(m);
    let n = h.nrows();
    if n == 0 {
        return HermEig { vals: Vec::new(), vecs: CMat::zeros(0, 0) };
    }
    if n <= 48 {
        return jacobi_herm(&h);
    }
    let mut big = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            big[(i, j)] = z.re;
            big[(i + n, j + n)] = z.re;
            big[(i, j + n)] = -z.im;
            big[(i + n, j)] = z.im;
        }
    }
    let eig = big.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let scale = eig
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut vals = Vec::with_capacity(n);
    let mut vecs = CMat::zeros(n, n);
    let mut count = 0;
    let mut start = 0;
    while start < 2 * n && count < n {
        // grow the cluster while consecutive gaps stay below the mixing scale;
        // every complex eigenvalue contributes exactly two real copies, so force
        // an even member count and keep exactly half — rank guessing here could
        // silently miscount and break orthonormality downstream
        let mut end = start + 1;
        while end < 2 * n
            && (eig.eigenvalues[order[end - 1]] - eig.eigenvalues[order[end]] <= 1e-4 * scale
                || (end - start) % 2 == 1)
        {
            end += 1;
        }
        let members = end - start;
        let mut candidates = CMat::zeros(n, members);
        for (c, &k) in order[start..end].iter().enumerate() {
            let col = eig.eigenvectors.column(k);
            for i in 0..n {
                candidates[(i, c)] = Complex64::new(col[i], col[i + n]);
            }
        }
        let (u, _sig, _) = jacobi_svd(&candidates);
        let keep = (members / 2).min(n - count);
        let u_c = u.columns(0, keep).into_owned();
        // rediagonalize the compressed block for accurate per-vector eigenvalues
        let block = u_c.adjoint() * &h * &u_c;
        let refined = jacobi_herm(&block);
        let rotated = u_c * &refined.vecs;
        for c in 0..keep {
            vecs.set_column(count, &rotated.column(c));
            vals.push(refined.vals[c]);
            count += 1;
        }
        start = end;
    }
    assert_eq!(count, n, "eigenvector recovery from the real embedding failed");
    let _ = vals;

    // Löwdin polish: V ← V (V^*V)^{-1/2} with Y_{k+1} = ½ Y_k (3I − S Y_k²),
    // quadratically convergent since S = V^*V ≈ I.
    let s = vecs.adjoint() * &vecs;
    let mut yk = CMat::identity(n, n);
    for _ in 0..3 {
        let y2 = &yk * &yk;
        yk = (&yk * (CMat::identity(n, n).map(|z| z * c(3.0)) - &s * y2)).map(|z| z.scale(0.5));
    }
    let vecs = vecs * yk;

    // Final refinement: the rotated matrix V^*HV is near-diagonal, so a couple
    // of cyclic Jacobi sweeps finish the decomposition to machine precision
    // whatever quality the embedding recovery achieved.
    let rotated = vecs.adjoint() * &h * &vecs;
    let refined = jacobi_herm(&rotated);
    let vecs = vecs * refined.vecs;
    HermEig { vals: refined.vals, vecs }
}

/// All singular values, descending (via the Jacobi SVD).
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    jacobi_svd(m).1
}

/// Moore-Penrose pseudo-inverse with singular values below `rel_tol * s_max` dropped.
pub fn pinv(m: &CMat, rel_tol: f64) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMat::zeros(m.ncols(), m.nrows());
    }
    let (u, sig, v) = jacobi_svd(m);
    let smax = sig.first().copied().unwrap_or(0.0);
    let cut = rel_tol * smax.max(f64::MIN_POSITIVE);
    let k = sig.len();
    let mut sinv = CMat::zeros(k, k);
    for i in 0..k {
        if sig[i] > cut {
            sinv[(i, i)] = c(1.0 / sig[i]);
        }
    }
    v * sinv * u.adjoint()
}

/// Orthonormal basis of the column space, singular values below `rel_tol * s_max` dropped.
pub fn range_basis(m: &CMat, rel_tol: f64) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let (u, sig, _v) = jacobi_svd(m);
    let smax = sig.first().copied().unwrap_or(0.0);
    let cut = rel_tol * smax.max(f64::MIN_POSITIVE);
    let r = sig.iter().filter(|&&s| s > cut).count();
    u.columns(0, r).into_owned()
}

/// PSD square root of a Hermitian matrix; tiny negative eigenvalues are clamped to 0.
pub fn psd_sqrt(m: &CMat) -> CMat {
    let eig = herm_eig(m);
    let n = m.nrows();
    let mut d = CMat::zeros(n, n);
    for k in 0..n {
        d[(k, k)] = c(eig.vals[k].max(0.0).sqrt());
    }
    &eig.vecs * d * eig.vecs.adjoint()
}

/// Solve `A X = B` by LU with a residual check.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    let lu = a.clone().lu();
    let x = lu
        .solve(b)
        .ok_or_else(|| Error::ResolventDiverged("LU solve failed (singular matrix)".into()))?;
    let resid = max_abs(&(a * &x - b));
    let scale = max_abs(b).max(1.0);
    if resid > 1e-6 * scale {
        return Err(Error::ResolventDiverged(format!(
            "solve residual {resid:.3e} too large"
        )));
    }
    Ok(x)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Standard complex Gaussian matrix (real and imaginary parts N(0, 1/2)).
pub fn rand_cmat<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im).scale(std::f64::consts::FRAC_1_SQRT_2)
    })
}

/// Haar-ish random unitary via QR of a complex Gaussian.
pub fn rand_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let g = rand_cmat(rng, n, n);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // Fix the phase convention so the distribution does not depend on the QR variant.
    let mut q = q;
    for k in 0..n {
        let rkk = r[(k, k)];
        if rkk.norm() > 0.0 {
            let phase = rkk / c(rkk.norm());
            for i in 0..n {
                q[(i, k)] *= phase;
            }
        }
    }
    q
}

/// Orthonormal coordinates for a space presented either by a Gram matrix of a
/// spanning set, or by a PSD "complement" operator whose range carries the
/// pseudo-inverse inner product.
///
/// For a Gram matrix `G = V Λ V*` the isometry raw → ON is `diag(√λ) V*`
/// (`⟨x, y⟩_G = (Qx)*(Qy)`), with right inverse `V diag(1/√λ)`. For a complement
/// operator `D` whose elements are vectors `f ∈ ran D` with `⟨f, g⟩ = f* D⁺ g`,
/// the roles of `√λ` and `1/√λ` swap.
pub struct OnCoords {
    pub eigvals: Vec<f64>,
    pub rank: usize,
    /// raw/ambient coordinates → orthonormal coordinates (r × D).
    pub to_on: CMat,
    /// orthonormal coordinates → raw/ambient representatives (D × r).
    pub from_on: CMat,
}

fn on_coords(g: &CMat, rank_rel_tol: f64, gram_style: bool) -> OnCoords {
    let eig = herm_eig(g);
    let lmax = eig.vals.first().copied().unwrap_or(0.0).max(0.0);
    let cut = rank_rel_tol * lmax;
    let rank = eig.vals.iter().filter(|&&l| l > cut && l > 0.0).count();
    let n = g.nrows();
    let mut to_on = CMat::zeros(rank, n);
    let mut from_on = CMat::zeros(n, rank);
    for k in 0..rank {
        let s = eig.vals[k].sqrt();
        let (a, b) = if gram_style { (s, 1.0 / s) } else { (1.0 / s, s) };
        for i in 0..n {
            to_on[(k, i)] = eig.vecs[(i, k)].conj().scale(a);
            from_on[(i, k)] = eig.vecs[(i, k)].scale(b);
        }
    }
    OnCoords {
        eigvals: eig.vals,
        rank,
        to_on,
        from_on,
    }
}

/// ON coordinates for a space given by the Gram matrix of its spanning set.
pub fn on_from_gram(g: &CMat, rank_rel_tol: f64) -> OnCoords {
    on_coords(g, rank_rel_tol, true)
}

/// ON coordinates for a complementary range space `ran D` with inner product `⟨f, D⁺g⟩`.
pub fn on_from_complement(d: &CMat, rank_rel_tol: f64) -> OnCoords {
    on_coords(d, rank_rel_tol, false)
}

/// Result of a finite-level positivity certificate.
#[derive(Debug, Clone)]
pub struct PsdReport {
    pub min_eig: f64,
    pub norm: f64,
    pub pass: bool,
    pub tolerance: f64,
}

/// Check a Hermitian matrix for positive semidefiniteness at relative tolerance
/// `tol`: pass iff `min_eig >= -tol * max(1, norm)`. Errors if the input is not
/// Hermitian to 1e-12 (relative to its largest entry).
pub fn psd_check(g: &CMat, tolerance: f64) -> Result<PsdReport> {
    let defect = hermiticity_defect(g);
    if defect > 1e-12 * max_abs(g).max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    let eig = herm_eig(g);
    let min_eig = eig.vals.last().copied().unwrap_or(0.0);
    let norm = eig
        .vals
        .iter()
        .map(|l| l.abs())
        .fold(0.0f64, f64::max);
    let pass = min_eig >= -tolerance * norm.max(1.0);
    Ok(PsdReport {
        min_eig,
        norm,
        pass,
        tolerance,
    })
}

/// Default-rank pseudo-inverse used in inner products on range spaces.
pub fn pinv_default(m: &CMat) -> CMat {
    pinv(m, tol::RANK_REL)
}


#[cfg(test)]
use rand::SeedableRng;
