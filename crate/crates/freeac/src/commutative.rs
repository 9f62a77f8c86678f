//! The commutative (Drury-Arveson) side and its bridge to the free theory.
//!
//! Commutative Schur multipliers `b` carry moment functionals on the symmetrized
//! operator system spanned by the symmetric monomials `L^n = Σ_{λ(α)=n} L^α`.
//! The Hardy space `H²(μ_b)` has the closed-form Gram
//! `⟨L^n ⊗ h, L^m ⊗ g⟩ = (|n|!/n!) ⟨h, μ_b(L^{m−n}) g⟩` for `m ≥ n` componentwise
//! (conjugate-transpose rule for `n ≥ m`, zero when incomparable) — a derived
//! formula that is cross-validated against the compression of a free lift's GNS
//! Gram to the symmetric fiber. On the Herglotz space the partial isometry `V^b`
//! and its row-contractive extensions `D ⊇ V^b` parametrize the free lifts of `b`
//! through the symmetric extensions `φ_D(L^α) = K_0^* D^α K_0`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gns::{build_gns, GnsSpace};
use crate::herglotz::{schur_pair_from_moments, MomentFunctional};
use crate::linalg::{
    eye, herm_eig, max_abs, on_from_complement, on_from_gram, opnorm, pinv, psd_sqrt, rand_cmat,
    range_basis, OnCoords, CMat,
};
use crate::series::{CommSeries, FreeSeries};
use crate::tol;
use crate::word::{enumerate_multi_indices, enumerate_words, multinomial, MultiIndex, Word};

/// Moment data of a CP map on the symmetrized operator system: `μ(I)` and
/// `μ(L^n)` for `1 <= |n| <= N`.
#[derive(Debug, Clone)]
pub struct CommMomentFunctional {
    d: usize,
    m: usize,
    trunc: usize,
    mu_i: CMat,
    moments: std::collections::BTreeMap<MultiIndex, CMat>,
}

impl CommMomentFunctional {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn mu_i(&self) -> &CMat {
        &self.mu_i
    }

    pub fn moment(&self, n: &MultiIndex) -> CMat {
        if n.degree() == 0 {
            return self.mu_i.clone();
        }
        self.moments
            .get(n)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.m, self.m))
    }

    pub fn moments(&self) -> impl Iterator<Item = (&MultiIndex, &CMat)> {
        self.moments.iter()
    }

    pub fn max_diff(&self, other: &CommMomentFunctional) -> f64 {
        let mut err = max_abs(&(&self.mu_i - &other.mu_i));
        for n in enumerate_multi_indices(self.d, self.trunc.min(other.trunc)) {
            err = err.max(max_abs(&(self.moment(&n) - other.moment(&n))));
        }
        err
    }
}

/// Commutative Cayley transform `H_b = (I − b)^{-1} (I + b)`, truncated.
pub fn comm_cayley(b: &CommSeries) -> Result<CommSeries> {
    let norm = opnorm(&b.constant_coeff());
    if norm >= 1.0 - tol::NON_UNITAL_MARGIN {
        return Err(Error::NonUnital { norm });
    }
    b.one_minus().invert()?.multiply(&b.one_plus())
}

/// Inverse commutative Cayley transform `b = (H + I)^{-1} (H − I)`.
pub fn comm_cayley_inv(h: &CommSeries) -> Result<CommSeries> {
    Ok(h.one_plus().invert()?.multiply(&h.one_minus())?.scale(-1.0))
}

/// Moment data of a commutative Schur multiplier: `μ(I) = Re H_b(0)` and
/// `μ(L^n) = ½ (H_b)_n^*`, mirroring the free coefficient identification
/// degree-wise.
pub fn comm_moments(b: &CommSeries) -> Result<CommMomentFunctional> {
    let h = comm_cayley(b)?;
    let h0 = h.constant_coeff();
    let mu_i = (&h0 + h0.adjoint()).map(|z| z.scale(0.5));
    let mut moments = std::collections::BTreeMap::new();
    for n in enumerate_multi_indices(b.d(), b.trunc()) {
        if n.degree() == 0 {
            continue;
        }
        moments.insert(n.clone(), h.coeff(&n).adjoint().map(|z| z.scale(0.5)));
    }
    Ok(CommMomentFunctional { d: b.d(), m: b.m(), trunc: b.trunc(), mu_i, moments })
}

/// The closed-form Gram of `H²(μ_b)` over the (unnormalized) symmetric
/// monomials: `(|n|!/n!) μ(L^{m−n})` when `m ≥ n` componentwise, the conjugate
/// transpose when `n ≥ m`, zero when incomparable.
pub fn symmetric_gram(mu: &CommMomentFunctional) -> Result<CMat> {
    let indices = enumerate_multi_indices(mu.d, mu.trunc);
    let m = mu.m;
    let k = indices.len();
    let mut g = CMat::zeros(k * m, k * m);
    for (p, n) in indices.iter().enumerate() {
        for (q, mm) in indices.iter().enumerate() {
            let block = if let Some(diff) = mm.checked_sub(n) {
                let w = multinomial(n)? as f64;
                mu.moment(&diff).map(|z| z.scale(w))
            } else if let Some(diff) = n.checked_sub(mm) {
                let w = multinomial(mm)? as f64;
                mu.moment(&diff).adjoint().map(|z| z.scale(w))
            } else {
                continue;
            };
            for i in 0..m {
                for j in 0..m {
                    g[(p * m + i, q * m + j)] = block[(i, j)];
                }
            }
        }
    }
    Ok(g)
}

/// The commutative Herglotz space `H⁺(H_b) ≅ H²(μ_b)`: raw coordinates are the
/// Taylor-coefficient kernel maps `K̃_n` (equivalently the symmetric monomial
/// classes — the Cauchy transform identifies the two), with Gram
/// [`symmetric_gram`].
pub struct CommHerglotzSpace {
    mu: CommMomentFunctional,
    indices: Vec<MultiIndex>,
    gram: CMat,
    on: OnCoords,
}

impl CommHerglotzSpace {
    pub fn mu(&self) -> &CommMomentFunctional {
        &self.mu
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.on.rank
    }

    pub fn to_on(&self) -> &CMat {
        &self.on.to_on
    }

    pub fn from_on(&self) -> &CMat {
        &self.on.from_on
    }

    pub fn m(&self) -> usize {
        self.mu.m
    }

    pub fn d(&self) -> usize {
        self.mu.d
    }

    pub fn trunc(&self) -> usize {
        self.mu.trunc
    }

    fn index_of(&self, n: &MultiIndex) -> usize {
        self.indices.binary_search(n).expect("index in range")
    }

    /// ON coordinates of the kernel column block `K̃_n` (an `r × m` matrix).
    pub fn kernel_on(&self, n: &MultiIndex) -> CMat {
        let p = self.index_of(n);
        self.on.to_on.columns(p * self.mu.m, self.mu.m).into_owned()
    }

    fn cols_up_to(&self, deg: usize) -> usize {
        self.indices.iter().take_while(|n| n.degree() <= deg).count() * self.mu.m
    }

    pub fn safe_basis(&self, deg: usize) -> CMat {
        range_basis(
            &self.on.to_on.columns(0, self.cols_up_to(deg)).into_owned(),
            tol::RANK_REL,
        )
    }
}

pub fn build_herglotz_space(mu: &CommMomentFunctional) -> Result<CommHerglotzSpace> {
    let gram = symmetric_gram(mu)?;
    let rep = crate::linalg::psd_check(&gram, tol::PSD_REL)?;
    if !rep.pass {
        return Err(Error::NotCpAtLevel { min_eig: rep.min_eig });
    }
    let on = on_from_gram(&gram, tol::RANK_REL);
    Ok(CommHerglotzSpace {
        mu: mu.clone(),
        indices: enumerate_multi_indices(mu.d, mu.trunc),
        gram,
        on,
    })
}

/// A row contraction `D = (D_1, …, D_d)` on the Herglotz space extending the
/// canonical partial isometry `V^b` (in the sense `D (V^b)^* V^b = V^b`).
pub struct RowContractionExt {
    /// The extension's component operators in ON coordinates.
    pub ops: Vec<CMat>,
    /// The components of `V^b` itself.
    pub v_ops: Vec<CMat>,
    /// Orthogonal projection onto the initial space of `V^b`.
    pub init_proj: CMat,
    pub tight: bool,
    /// `||V (V^*V) − V||`: partial isometry defect of the tight part.
    pub partial_isometry_defect: f64,
    /// Largest distance of an eigenvalue of `V^*V` from `{0, 1}`.
    pub spectrum_defect: f64,
    /// Residual of the defining constraints `Σ_j V_j K̃_{m−e_j} = K̃_m`.
    pub constraint_residual: f64,
}

impl RowContractionExt {
    pub fn d(&self) -> usize {
        self.ops.len()
    }

    pub fn row(&self) -> CMat {
        row_of(&self.ops)
    }

    pub fn v_row(&self) -> CMat {
        row_of(&self.v_ops)
    }

    pub fn row_norm(&self) -> f64 {
        opnorm(&self.row())
    }
}

fn row_of(ops: &[CMat]) -> CMat {
    let r = ops[0].nrows();
    let d = ops.len();
    let mut row = CMat::zeros(r, r * d);
    for (j, op) in ops.iter().enumerate() {
        row.view_mut((0, j * r), (r, r)).copy_from(op);
    }
    row
}

/// Build `V^b`: the minimal-norm solution of the linear constraints
/// `Σ_{j: m_j > 0} V_j K̃_{m−e_j} = K̃_m` for `0 ≠ |m| <= N`, zero on the
/// orthocomplement of the span of the constraint vectors (the initial space).
/// Minimal-norm extension by zero of the isometric action is exactly the
/// partial isometry with that initial space; the defects report how well the
/// finite data realizes it.
pub fn build_vb(space: &CommHerglotzSpace) -> Result<RowContractionExt> {
    let r = space.rank();
    let d = space.d();
    let m = space.m();
    let constraints: Vec<&MultiIndex> =
        space.indices.iter().filter(|n| n.degree() > 0).collect();
    let k = constraints.len() * m;
    let mut x = CMat::zeros(d * r, k);
    let mut y = CMat::zeros(r, k);
    for (ci, mm) in constraints.iter().enumerate() {
        let target = space.kernel_on(mm);
        for i in 0..m {
            y.set_column(ci * m + i, &target.column(i));
        }
        for j in 1..=d {
            if let Some(lowered) = mm.lower(j) {
                let source = space.kernel_on(&lowered);
                for i in 0..m {
                    x.view_mut(((j - 1) * r, ci * m + i), (r, 1))
                        .copy_from(&source.column(i));
                }
            }
        }
    }
    let x_pinv = pinv(&x, tol::RANK_REL);
    let v = &y * x_pinv;
    let constraint_residual = max_abs(&(&v * &x - &y));
    let scale = max_abs(&y).max(1.0);
    if constraint_residual > tol::PARTIAL_ISOMETRY * scale {
        return Err(Error::DegenerateInstance(format!(
            "V^b constraints inconsistent: residual {constraint_residual:.3e}"
        )));
    }
    let init_proj = {
        let u = range_basis(&x, tol::RANK_REL);
        &u * u.adjoint()
    };
    let vtv = v.adjoint() * &v;
    let partial_isometry_defect = opnorm(&(&v * &vtv - &v));
    let spectrum_defect = herm_eig(&vtv)
        .vals
        .iter()
        .map(|l| l.abs().min((l - 1.0).abs()))
        .fold(0.0f64, f64::max);
    let ops: Vec<CMat> = (0..d).map(|j| v.columns(j * r, r).into_owned()).collect();
    Ok(RowContractionExt {
        v_ops: ops.clone(),
        ops,
        init_proj,
        tight: true,
        partial_isometry_defect,
        spectrum_defect,
        constraint_residual,
    })
}

/// A random row-contractive extension `D ⊇ V^b`: the complement component `C`
/// is a Gaussian block supported on the orthocomplement of the initial space,
/// scaled to norm `ρ <= 1` and shaped by `(I − V V^*)^{1/2}` so the whole row
/// stays contractive. `ρ = 0` reproduces the tight extension.
pub fn random_extension(
    space: &CommHerglotzSpace,
    vb: &RowContractionExt,
    seed: u64,
    rho: f64,
) -> Result<RowContractionExt> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("rho = {rho} not in [0, 1]")));
    }
    let r = space.rank();
    let d = space.d();
    let v = vb.v_row();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g0 = rand_cmat(&mut rng, r, r * d);
    let mut g = g0 * (eye(r * d) - &vb.init_proj);
    let norm = opnorm(&g);
    if norm > 0.0 && rho > 0.0 {
        g = g.map(|z| z.scale(rho / norm));
    } else {
        g = CMat::zeros(r, r * d);
    }
    let shaper = psd_sqrt(&(eye(r) - &v * v.adjoint()));
    let dd = &v + shaper * g;
    let ops: Vec<CMat> = (0..d).map(|j| dd.columns(j * r, r).into_owned()).collect();
    let tight = rho == 0.0;
    Ok(RowContractionExt {
        ops,
        v_ops: vb.v_ops.clone(),
        init_proj: vb.init_proj.clone(),
        tight,
        partial_isometry_defect: vb.partial_isometry_defect,
        spectrum_defect: vb.spectrum_defect,
        constraint_residual: vb.constraint_residual,
    })
}

/// `||D (V^*V) − V||`: the extension property, exact by construction.
pub fn extension_defect(ext: &RowContractionExt) -> f64 {
    let row = ext.row();
    let v = ext.v_row();
    max_abs(&(row * (v.adjoint() * &v) - v))
}

/// Residual of the kernel-resolvent identity for an extension:
/// `K̃_m = Σ_{j: m_j>0} D_j K̃_{m−e_j}` for all `0 < |m| <= N`.
pub fn extension_resolvent_residual(space: &CommHerglotzSpace, ext: &RowContractionExt) -> f64 {
    let m = space.m();
    let mut err: f64 = 0.0;
    for mm in &space.indices {
        if mm.degree() == 0 {
            continue;
        }
        let mut acc = CMat::zeros(space.rank(), m);
        for j in 1..=space.d() {
            if let Some(lowered) = mm.lower(j) {
                acc += &ext.ops[j - 1] * space.kernel_on(&lowered);
            }
        }
        err = err.max(max_abs(&(acc - space.kernel_on(mm))));
    }
    err
}

/// The symmetric extension `φ_D ∈ CP(A)`: `φ_D(L^α) = K_0^* D_{i_1} ⋯ D_{i_k} K_0`.
pub fn phi_from_extension(
    space: &CommHerglotzSpace,
    ext: &RowContractionExt,
) -> Result<MomentFunctional> {
    let k0 = space.kernel_on(&MultiIndex::zero(space.d()));
    let phi_i = k0.adjoint() * &k0;
    let mut phi = MomentFunctional::new(space.d(), space.m(), space.trunc(), phi_i)?;
    // D^α K_0 along the graded word order: value(jβ) = D_j · value(β).
    let mut values: std::collections::BTreeMap<Word, CMat> = std::collections::BTreeMap::new();
    values.insert(Word::empty(space.d())?, k0.clone());
    for w in enumerate_words(space.d(), space.trunc())? {
        if w.is_empty() {
            continue;
        }
        let letters: Vec<usize> = w.letters().collect();
        let tail = Word::new(space.d(), &letters[1..])?;
        let val = &ext.ops[letters[0] - 1] * values.get(&tail).expect("graded order");
        phi.set_moment(w.clone(), k0.adjoint() * &val)?;
        values.insert(w, val);
    }
    Ok(phi)
}

/// A free lift produced from a symmetric extension, with its audit trail.
pub struct Lift {
    pub b_left: FreeSeries,
    pub b_right: FreeSeries,
    pub phi: MomentFunctional,
    pub gns: GnsSpace,
    /// Defect of `P_sym π(L_j) P_sym = D_j` under the isometric identification of
    /// `H²(μ_b)` with the symmetric subspace of `F²(φ_D)`, on degrees `<= N-1`.
    pub dilation_defect: f64,
}

/// Reconstruct the transpose-conjugate free lift pair of `φ_D` and check the
/// minimal-dilation picture: the compression of the GNS row isometry to the
/// symmetric subspace is the extension `D` itself. The defect is measured in
/// bilinear form over the symmetric monomials of degree `< N` —
/// `⟨L^{n'} ⊗ ·, π(L_j) L^n ⊗ ·⟩_φ` against `⟨K̃_{n'}, D_j K̃_n⟩` — which keeps
/// every factor bounded (no inverse-metric amplification).
pub fn lift_from_extension(space: &CommHerglotzSpace, ext: &RowContractionExt) -> Result<Lift> {
    let phi = phi_from_extension(space, ext)?;
    let (b_left, b_right) = schur_pair_from_moments(&phi)?;
    let gns = build_gns(&phi)?;
    let m = space.m();
    let inc = gns.fock().symmetrizer().inclusion(m);
    let sub = space
        .indices
        .iter()
        .filter(|n| n.degree() < space.trunc())
        .count();
    let mut dilation_defect: f64 = 0.0;
    for jj in 1..=space.d() {
        let s = gns.fock().creation_matrix(crate::Side::Left, jj)?;
        let lhs = inc.adjoint() * gns.gram() * s * &inc;
        for (pi, np) in space.indices.iter().take(sub).enumerate() {
            let kp = space.kernel_on(np);
            for (qi, nq) in space.indices.iter().take(sub).enumerate() {
                let kq = space.kernel_on(nq);
                let rhs = kp.adjoint() * &ext.ops[jj - 1] * kq;
                let lhs_block = lhs.view((pi * m, qi * m), (m, m));
                dilation_defect = dilation_defect.max(max_abs(&(lhs_block - rhs)));
            }
        }
    }
    Ok(Lift { b_left, b_right, phi, gns, dilation_defect })
}

/// Result of checking that a free series lifts a commutative one.
pub struct LiftCheck {
    pub symmetrization_error: f64,
    pub moment_error: f64,
    pub pass: bool,
}

/// `B` (left series) lifts `b` iff its symmetrization is `b` and the Clark
/// moment data of `B` restricts to the moment data of `b` on symmetric fibers.
pub fn check_free_lift(b_free: &FreeSeries, b: &CommSeries) -> Result<LiftCheck> {
    if b_free.d() != b.d() || b_free.m() != b.m() || b_free.trunc() != b.trunc() {
        return Err(Error::DimensionMismatch("lift and base disagree in (d, m, N)".into()));
    }
    let symmetrization_error = b_free.symmetrize().max_coeff_diff(b);
    let phi = crate::herglotz::moments_from_schur(b_free)?;
    let mu = comm_moments(b)?;
    let mut moment_error = max_abs(&(phi.phi_i() - mu.mu_i()));
    for n in enumerate_multi_indices(b.d(), b.trunc()) {
        if n.degree() == 0 {
            continue;
        }
        moment_error = moment_error.max(max_abs(&(phi.symmetric_moment(&n) - mu.moment(&n))));
    }
    let pass = symmetrization_error < tol::LIFT && moment_error < tol::LIFT;
    Ok(LiftCheck { symmetrization_error, moment_error, pass })
}

/// The commutative deBranges-Rovnyak space `H(b)` over the orthonormalized
/// symmetric basis `ě_n = e_n / √(|n|!/n!)`: multiplication matrix `m̌_b`,
/// complement `Ď = I − m̌ m̌^*`, and ON coordinates for the range metric.
pub struct CommDbrSpace {
    b: CommSeries,
    indices: Vec<MultiIndex>,
    mult: CMat,
    dmat: CMat,
    on: OnCoords,
}

impl CommDbrSpace {
    pub fn series(&self) -> &CommSeries {
        &self.b
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn mult(&self) -> &CMat {
        &self.mult
    }

    pub fn dmat(&self) -> &CMat {
        &self.dmat
    }

    pub fn rank(&self) -> usize {
        self.on.rank
    }

    pub fn to_on(&self) -> &CMat {
        &self.on.to_on
    }

    pub fn from_on(&self) -> &CMat {
        &self.on.from_on
    }

    fn index_of(&self, n: &MultiIndex) -> usize {
        self.indices.binary_search(n).expect("index in range")
    }

    fn cols_up_to(&self, deg: usize) -> usize {
        self.indices.iter().take_while(|n| n.degree() <= deg).count() * self.b.m()
    }

    pub fn safe_basis(&self, deg: usize) -> CMat {
        range_basis(
            &self.on.to_on.columns(0, self.cols_up_to(deg)).into_owned(),
            tol::RANK_REL,
        )
    }

    /// Kernel coefficient map `k̃_n = √(mult n) Ď Ě_n` in ON coordinates: pairs
    /// an element of `H(b)` with its `n`-th Taylor coefficient.
    pub fn kernel_on(&self, n: &MultiIndex) -> Result<CMat> {
        let m = self.b.m();
        let p = self.index_of(n);
        let w = (multinomial(n)? as f64).sqrt();
        let block = self.dmat.columns(p * m, m).into_owned();
        Ok(self.on.to_on.clone() * block.map(|z| z.scale(w)))
    }

    /// Taylor coefficients (row blocks over multi-indices) of elements given in
    /// ON coordinates: `from_on` rescaled row-wise by `√(mult n)`.
    pub fn taylor_rows(&self) -> Result<CMat> {
        let m = self.b.m();
        let mut rows = self.from_on().clone();
        for (p, n) in self.indices.iter().enumerate() {
            let w = (multinomial(n)? as f64).sqrt();
            for i in 0..m {
                for cix in 0..rows.ncols() {
                    rows[(p * m + i, cix)] = rows[(p * m + i, cix)].scale(w);
                }
            }
        }
        Ok(rows)
    }
}

pub fn comm_dbr_space(b: &CommSeries) -> Result<CommDbrSpace> {
    let indices = enumerate_multi_indices(b.d(), b.trunc());
    let m = b.m();
    let k = indices.len();
    let mut mult = CMat::zeros(k * m, k * m);
    for (q, n) in indices.iter().enumerate() {
        let wn = multinomial(n)? as f64;
        for (kk, bk) in b.coeffs() {
            if n.degree() + kk.degree() > b.trunc() {
                continue;
            }
            let target = n.add(kk);
            let p = indices.binary_search(&target).expect("within truncation");
            let wt = multinomial(&target)? as f64;
            let scale = (wn / wt).sqrt();
            for i in 0..m {
                for j in 0..m {
                    mult[(p * m + i, q * m + j)] += bk[(i, j)].scale(scale);
                }
            }
        }
    }
    let dmat = eye(k * m) - &mult * mult.adjoint();
    let eig = herm_eig(&dmat);
    let min_eig = eig.vals.last().copied().unwrap_or(0.0);
    if min_eig < -tol::PSD_REL * eig.vals.first().copied().unwrap_or(0.0).abs().max(1.0) {
        return Err(Error::NotContractive { min_eig });
    }
    let on = on_from_complement(&dmat, tol::RANK_REL);
    Ok(CommDbrSpace { b: b.clone(), indices, mult, dmat, on })
}

/// The co-isometry `C_{H²}: H(B) → H(b)` determined by
/// `C (I − M_B M_B^*) h = (I − M_b M_b^*) h` for `h` in the symmetric subspace,
/// assembled columnwise over the symmetric basis and zero on the orthocomplement
/// of its initial space.
pub struct CH2 {
    /// `H(B)` ON coordinates → `H(b)` ON coordinates.
    pub matrix: CMat,
    /// `||C C^* − I||` on the safe block of `H(b)`.
    pub coisometry_defect: f64,
    /// Residual of the defining columns.
    pub residual: f64,
}

pub fn c_h2(dbr: &crate::clark::DbrSpace, comm_dbr: &CommDbrSpace, safe_deg: usize) -> Result<CH2> {
    let m = comm_dbr.b.m();
    let iso = dbr.fock().symmetrizer().isometry(m);
    let a = dbr.to_on() * dbr.dmat() * iso;
    let t = comm_dbr.to_on() * comm_dbr.dmat();
    let c = &t * pinv(&a, tol::RANK_REL);
    let residual = max_abs(&(&c * a - t));
    let j = comm_dbr.safe_basis(safe_deg);
    let coisometry_defect =
        opnorm(&(j.adjoint() * (&c * c.adjoint() - eye(comm_dbr.rank())) * j));
    Ok(CH2 { matrix: c, coisometry_defect, residual })
}

/// The commutative weighted Cauchy transform `F_b = M_{(I−b)} C_b` from the
/// Hardy/Herglotz space onto `H(b)`, as a matrix from Herglotz ON coordinates to
/// `H(b)` ON coordinates.
pub fn comm_weighted_cauchy(space: &CommHerglotzSpace, comm_dbr: &CommDbrSpace) -> Result<CMat> {
    Ok(herg_to_hb(space, comm_dbr)? * space.from_on())
}

// Kernel-coordinate → H(b)-ON matrix of multiplication by (I − b): raw kernel
// coordinates have Taylor rows G_c; multiply by the Taylor convolution of
// (I − b), then renormalize rows into the ě basis.
fn herg_to_hb(space: &CommHerglotzSpace, comm_dbr: &CommDbrSpace) -> Result<CMat> {
    let m = space.m();
    let indices = &space.indices;
    let k = indices.len();
    let one_minus = comm_dbr.b.one_minus();
    let mut conv = CMat::zeros(k * m, k * m);
    for (p, mm) in indices.iter().enumerate() {
        for (q, n) in indices.iter().enumerate() {
            if let Some(diff) = mm.checked_sub(n) {
                let c = one_minus.coeff(&diff);
                for i in 0..m {
                    for j in 0..m {
                        conv[(p * m + i, q * m + j)] = c[(i, j)];
                    }
                }
            }
        }
    }
    let mut taylor = conv * &space.gram;
    for (p, n) in indices.iter().enumerate() {
        let w = 1.0 / (multinomial(n)? as f64).sqrt();
        for i in 0..m {
            for cix in 0..taylor.ncols() {
                taylor[(p * m + i, cix)] = taylor[(p * m + i, cix)].scale(w);
            }
        }
    }
    Ok(comm_dbr.to_on() * taylor)
}

/// Contractive Gleason solutions for `b` and `H(b)` parametrized by an
/// extension `D ⊇ V^b`: `b[D] = U_b^* D^* K_0 (I − b(0))` and the corresponding
/// `X[D]` solving the kernel recurrences `X^* k̃_n = k̃_{n−e_j} − b[D] b_n^*`.
pub struct CommGleason {
    /// Components of `b[D]` in `H(b)` ON coordinates (`r × m` each).
    pub b_sol: Vec<CMat>,
    /// Adjoints `X_j^*` of the space solution, in ON coordinates.
    pub x_adj: Vec<CMat>,
    /// Residual of `Σ_j z_j (b_sol_j)(z) = b(z) − b(0)` on Taylor data.
    pub gleason_identity_error: f64,
    /// Residual of the defining system for `X`.
    pub x_residual: f64,
    /// Safe-block contractivity margins (nonnegative up to truncation noise).
    pub b_contractivity_margin: f64,
    pub x_contractivity_margin: f64,
}

pub fn comm_gleason(
    space: &CommHerglotzSpace,
    ext: &RowContractionExt,
    comm_dbr: &CommDbrSpace,
    safe_deg: usize,
) -> Result<CommGleason> {
    let m = space.m();
    let d = space.d();
    let hb = herg_to_hb(space, comm_dbr)?;
    let k0 = space.kernel_on(&MultiIndex::zero(d));
    let b0 = comm_dbr.b.constant_coeff();
    let one_minus_b0 = eye(m) - &b0;
    let mut b_sol = Vec::with_capacity(d);
    for j in 0..d {
        let raw = space.from_on() * (ext.ops[j].adjoint() * &k0);
        b_sol.push(&hb * raw * &one_minus_b0);
    }

    // z·b_sol(z) = b(z) − b(0) on Taylor coefficients.
    let taylor = comm_dbr.taylor_rows()?;
    let mut gleason_identity_error: f64 = 0.0;
    for n in &space.indices {
        if n.degree() == 0 {
            continue;
        }
        let mut acc = CMat::zeros(m, m);
        for j in 1..=d {
            if let Some(lowered) = n.lower(j) {
                let p = space.index_of(&lowered);
                let rows = taylor.rows(p * m, m);
                acc += rows * &b_sol[j - 1];
            }
        }
        gleason_identity_error =
            gleason_identity_error.max(max_abs(&(acc - comm_dbr.b.coeff(n))));
    }

    // X_j^* k̃_n = [n_j>0] k̃_{n−e_j} − b_sol_j b_n^*, least squares over the
    // kernel columns (they span the space).
    let k = space.indices.len();
    let mut kmat = CMat::zeros(comm_dbr.rank(), k * m);
    let mut rhs: Vec<CMat> = (0..d).map(|_| CMat::zeros(comm_dbr.rank(), k * m)).collect();
    for (p, n) in space.indices.iter().enumerate() {
        let kn = comm_dbr.kernel_on(n)?;
        kmat.view_mut((0, p * m), (comm_dbr.rank(), m)).copy_from(&kn);
        let bn_adj = comm_dbr.b.coeff(n).adjoint();
        for j in 1..=d {
            let mut block = -(&b_sol[j - 1] * &bn_adj);
            if let Some(lowered) = n.lower(j) {
                block += comm_dbr.kernel_on(&lowered)?;
            }
            rhs[j - 1]
                .view_mut((0, p * m), (comm_dbr.rank(), m))
                .copy_from(&block);
        }
    }
    let k_pinv = pinv(&kmat, tol::RANK_REL);
    let mut x_adj = Vec::with_capacity(d);
    let mut x_residual: f64 = 0.0;
    for j in 0..d {
        let xj = &rhs[j] * &k_pinv;
        x_residual = x_residual.max(max_abs(&(&xj * &kmat - &rhs[j])));
        x_adj.push(xj);
    }

    // contractivity margins
    let mut bb = CMat::zeros(m, m);
    for sol in &b_sol {
        bb += sol.adjoint() * sol;
    }
    let b_slack = eye(m) - b0.adjoint() * &b0 - bb;
    let b_contractivity_margin = herm_eig(&b_slack).vals.last().copied().unwrap_or(0.0);

    let r = comm_dbr.rank();
    let mut xx = CMat::zeros(r, r);
    for xj in &x_adj {
        xx += xj.adjoint() * xj;
    }
    let k0b = comm_dbr.kernel_on(&MultiIndex::zero(d))?;
    let x_slack = eye(r) - &k0b * k0b.adjoint() - xx;
    let jb = comm_dbr.safe_basis(safe_deg);
    let x_contractivity_margin = herm_eig(&(jb.adjoint() * x_slack * jb))
        .vals
        .last()
        .copied()
        .unwrap_or(0.0);

    Ok(CommGleason {
        b_sol,
        x_adj,
        gleason_identity_error,
        x_residual,
        b_contractivity_margin,
        x_contractivity_margin,
    })
}

/// Cross-validation of the symmetric Gram closed form against the compression
/// of a free lift's GNS Gram to the symmetric fiber. Returns the max entry
/// difference; the mandatory oracle for the derived formula.
pub fn symmetric_gram_cross_check(gns: &GnsSpace, mu: &CommMomentFunctional) -> Result<f64> {
    let fiber = crate::gns::symmetric_fiber_gram(gns);
    let closed = symmetric_gram(mu)?;
    Ok(max_abs(&(fiber - closed)))
}

/// Defect of the factorization `F_b = C_{H²} ∘ F̂_R ∘ P` of the commutative
/// weighted Cauchy transform through the free one, on columns of degree
/// `<= safe_deg`.
pub fn weighted_cauchy_factorization_defect(
    space: &CommHerglotzSpace,
    comm_dbr: &CommDbrSpace,
    lift: &Lift,
    dbr: &crate::clark::DbrSpace,
    ch2: &CH2,
    safe_deg: usize,
) -> Result<f64> {
    let f_b = comm_weighted_cauchy(space, comm_dbr)?;
    let weighted = crate::clark::weighted_cauchy(&lift.gns, dbr)?.matrix;
    let inc = lift.gns.fock().symmetrizer().inclusion(space.m());
    let m_iso = lift.gns.to_on() * inc * space.from_on();
    let via_free = &ch2.matrix * weighted * m_iso;
    let j = space.safe_basis(safe_deg);
    Ok(max_abs(&((via_free - f_b) * j)))
}
