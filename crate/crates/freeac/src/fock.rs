//! The degree-truncated full Fock space `F²_d ⊗ C^m` and its canonical operators.
//!
//! The basis is `{ e_α ⊗ e_i }` over words `|α| <= N` in graded-lex order with the
//! coefficient index minor: flat index `word_index * m + i`. Creation operators are
//! compressions — a top-degree vector is sent to `0`, never an error — so operator
//! identities hold exactly per degree block below the truncation boundary.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{c, CMat};
use crate::word::{enumerate_multi_indices, enumerate_words, multinomial, MultiIndex, Word};
use crate::Side;

#[derive(Debug, Clone)]
pub struct TruncatedFock {
    d: usize,
    m: usize,
    trunc: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl TruncatedFock {
    pub fn new(d: usize, m: usize, trunc: usize) -> Result<TruncatedFock> {
        if m == 0 {
            return Err(Error::InvalidParameter("coefficient dimension m = 0".into()));
        }
        let words = enumerate_words(d, trunc)?;
        let index = words
            .iter()
            .enumerate()
            .map(|(k, w)| (w.clone(), k))
            .collect();
        Ok(TruncatedFock { d, m, trunc, words, index })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Truncation degree `N`.
    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn num_words(&self) -> usize {
        self.words.len()
    }

    /// Total dimension `#words * m`.
    pub fn dim(&self) -> usize {
        self.words.len() * self.m
    }

    pub fn word_index(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Flat basis index of `e_w ⊗ e_i`.
    pub fn basis_index(&self, w: &Word, i: usize) -> Option<usize> {
        self.word_index(w).map(|k| k * self.m + i)
    }

    /// Number of words of length `<= deg` (they occupy the leading indices).
    pub fn words_up_to(&self, deg: usize) -> usize {
        self.words.iter().take_while(|w| w.len() <= deg).count()
    }

    /// Dimension of the degree `<= deg` block.
    pub fn dim_up_to(&self, deg: usize) -> usize {
        self.words_up_to(deg) * self.m
    }

    /// Matrix of the left or right creation operator by the letter `j`, on the
    /// full space including the coefficient slots. Degree-`N` vectors map to 0.
    pub fn creation_matrix(&self, side: Side, j: usize) -> Result<CMat> {
        if j < 1 || j > self.d {
            return Err(Error::BadLetter { letter: j, d: self.d });
        }
        let dim = self.dim();
        let mut mat = CMat::zeros(dim, dim);
        for (q, w) in self.words.iter().enumerate() {
            if w.len() == self.trunc {
                continue;
            }
            let target = match side {
                Side::Left => w.prepend(j),
                Side::Right => w.append(j),
            };
            let t = self.word_index(&target).expect("target within truncation");
            for i in 0..self.m {
                mat[(t * self.m + i, q * self.m + i)] = c(1.0);
            }
        }
        Ok(mat)
    }

    /// The symmetric (bosonic) structure: unnormalized symmetric basis vectors
    /// `e_n = Σ_{λ(α)=n} e_α` with `||e_n||² = |n|!/n!`, and the orthogonal
    /// projection onto their span tensored with the coefficient space.
    pub fn symmetrizer(&self) -> Symmetrizer {
        let multi = enumerate_multi_indices(self.d, self.trunc);
        let nw = self.words.len();
        let mut vectors = CMat::zeros(nw, multi.len());
        let mut pos: HashMap<MultiIndex, usize> = HashMap::new();
        for (k, n) in multi.iter().enumerate() {
            pos.insert(n.clone(), k);
        }
        for (q, w) in self.words.iter().enumerate() {
            let k = pos[&w.abelianize()];
            vectors[(q, k)] = c(1.0);
        }
        // projection = Σ_n e_n e_n^* / ||e_n||², on the word factor, then ⊗ I_m
        let mut proj_words = CMat::zeros(nw, nw);
        for (k, n) in multi.iter().enumerate() {
            let norm2 = multinomial(n).expect("|n| <= N <= 20") as f64;
            let col = vectors.column(k);
            for (qi, zi) in col.iter().enumerate() {
                if zi.norm() == 0.0 {
                    continue;
                }
                for (qj, zj) in col.iter().enumerate() {
                    if zj.norm() == 0.0 {
                        continue;
                    }
                    proj_words[(qi, qj)] += (zi * zj.conj()).scale(1.0 / norm2);
                }
            }
        }
        let projection = proj_words.kronecker(&CMat::identity(self.m, self.m));
        Symmetrizer { multi_indices: multi, vectors, projection }
    }

    /// The transposition unitary `U_T e_α = e_{α^T}` (tensored with the identity on
    /// the coefficient space). A permutation with `U_T² = I` that intertwines left
    /// and right creation: `U_T L_j = R_j U_T`.
    pub fn transposition_unitary(&self) -> CMat {
        let dim = self.dim();
        let mut mat = CMat::zeros(dim, dim);
        for (q, w) in self.words.iter().enumerate() {
            let t = self.word_index(&w.transpose()).expect("same length");
            for i in 0..self.m {
                mat[(t * self.m + i, q * self.m + i)] = c(1.0);
            }
        }
        mat
    }

    /// Selector matrix of the `m` basis columns sitting at word `w`.
    pub fn word_block(&self, w: &Word) -> Option<CMat> {
        let k = self.word_index(w)?;
        let mut e = CMat::zeros(self.dim(), self.m);
        for i in 0..self.m {
            e[(k * self.m + i, i)] = c(1.0);
        }
        Some(e)
    }
}

/// Output of [`TruncatedFock::symmetrizer`].
pub struct Symmetrizer {
    /// Multi-indices `|n| <= N` in graded-lex order.
    pub multi_indices: Vec<MultiIndex>,
    /// Columns are the unnormalized symmetric vectors `e_n` on the word factor.
    pub vectors: CMat,
    /// Orthogonal projection onto `span{e_n} ⊗ C^m`, on the full space.
    pub projection: CMat,
}

impl Symmetrizer {
    /// Inclusion of the (unnormalized) symmetric basis into the full space:
    /// column `(n, i)` is `e_n ⊗ e_i`, laid out with the coefficient index minor.
    pub fn inclusion(&self, m: usize) -> CMat {
        self.vectors.kronecker(&CMat::identity(m, m))
    }

    /// Same inclusion with columns normalized to unit vectors, i.e. an isometry.
    pub fn isometry(&self, m: usize) -> CMat {
        let mut v = self.vectors.clone();
        for (k, n) in self.multi_indices.iter().enumerate() {
            let norm = (multinomial(n).expect("guarded") as f64).sqrt();
            for i in 0..v.nrows() {
                v[(i, k)] = v[(i, k)].scale(1.0 / norm);
            }
        }
        v.kronecker(&CMat::identity(m, m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eye, max_abs, opnorm};

    #[test]
    fn basis_size_and_order() {
        let f = TruncatedFock::new(2, 2, 2).unwrap();
        assert_eq!(f.num_words(), 7);
        assert_eq!(f.dim(), 14);
        assert_eq!(f.words()[0].to_string(), "");
        let f1 = TruncatedFock::new(1, 3, 4).unwrap();
        assert_eq!(f1.dim(), 3 * 5);
    }

    #[test]
    fn creation_d1_is_jordan_shift() {
        let f = TruncatedFock::new(1, 1, 2).unwrap();
        let l = f.creation_matrix(Side::Left, 1).unwrap();
        let mut expect = CMat::zeros(3, 3);
        expect[(1, 0)] = c(1.0);
        expect[(2, 1)] = c(1.0);
        assert_eq!(l, expect);
        // nilpotent: cube is zero
        assert!(max_abs(&(&l * &l * &l)) == 0.0);
    }

    #[test]
    fn creation_row_isometry_on_safe_block() {
        let f = TruncatedFock::new(2, 2, 3).unwrap();
        let l1 = f.creation_matrix(Side::Left, 1).unwrap();
        let l2 = f.creation_matrix(Side::Left, 2).unwrap();
        let sub = f.dim_up_to(2);
        // L_i^* L_j = δ_ij I on degrees <= N-1, exactly
        for (i, li) in [&l1, &l2].iter().enumerate() {
            for (j, lj) in [&l1, &l2].iter().enumerate() {
                let prod = li.adjoint() * *lj;
                let block = prod.view((0, 0), (sub, sub)).into_owned();
                let expect = if i == j { eye(sub) } else { CMat::zeros(sub, sub) };
                assert_eq!(block, expect, "i={i} j={j}");
            }
        }
        // same for right creations
        let r1 = f.creation_matrix(Side::Right, 1).unwrap();
        let r2 = f.creation_matrix(Side::Right, 2).unwrap();
        let prod = r1.adjoint() * &r2;
        assert!(max_abs(&prod.view((0, 0), (sub, sub)).into_owned()) == 0.0);
        let prod = r1.adjoint() * &r1;
        assert_eq!(prod.view((0, 0), (sub, sub)).into_owned(), eye(sub));
    }

    #[test]
    fn sum_ll_star_is_projection() {
        // Σ_j L_j L_j^* is idempotent and Hermitian, so its spectrum is {0,1}.
        let f = TruncatedFock::new(2, 1, 3).unwrap();
        let mut s = CMat::zeros(f.dim(), f.dim());
        for j in 1..=2 {
            let l = f.creation_matrix(Side::Left, j).unwrap();
            s += &l * l.adjoint();
        }
        assert!(max_abs(&(&s - s.adjoint())) < 1e-15);
        assert!(max_abs(&(&s * &s - &s)) < 1e-14);
    }

    #[test]
    fn symmetrizer_d1_is_identity() {
        let f = TruncatedFock::new(1, 2, 3).unwrap();
        let s = f.symmetrizer();
        assert!(max_abs(&(&s.projection - &eye(f.dim()))) < 1e-14);
    }

    #[test]
    fn symmetrizer_d2_norms() {
        let f = TruncatedFock::new(2, 1, 2).unwrap();
        let s = f.symmetrizer();
        // e_(1,1) = e_{12} + e_{21}, squared norm 2
        let k = s
            .multi_indices
            .iter()
            .position(|n| n.counts() == [1, 1])
            .unwrap();
        let col = s.vectors.column(k);
        let norm2: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm2 - 2.0).abs() < 1e-15);
        let i12 = f.word_index(&Word::parse(2, "12").unwrap()).unwrap();
        let i21 = f.word_index(&Word::parse(2, "21").unwrap()).unwrap();
        assert_eq!(col[i12], c(1.0));
        assert_eq!(col[i21], c(1.0));
        // projection is idempotent and Hermitian
        let p = &s.projection;
        assert!(max_abs(&(p * p - p)) < 1e-12);
        assert!(max_abs(&(p - &p.adjoint())) < 1e-12);
    }

    #[test]
    fn transposition_unitary_properties() {
        let f = TruncatedFock::new(2, 1, 3).unwrap();
        let u = f.transposition_unitary();
        assert!(max_abs(&(&u * &u - eye(f.dim()))) == 0.0);
        assert!(max_abs(&(u.adjoint() * &u - eye(f.dim()))) == 0.0);
        // U_T e_{12} = e_{21}
        let i12 = f.word_index(&Word::parse(2, "12").unwrap()).unwrap();
        let i21 = f.word_index(&Word::parse(2, "21").unwrap()).unwrap();
        assert_eq!(u[(i21, i12)], c(1.0));
        // d=1: identity
        let f1 = TruncatedFock::new(1, 2, 3).unwrap();
        assert_eq!(f1.transposition_unitary(), eye(f1.dim()));
    }

    #[test]
    fn transposition_intertwines_left_and_right() {
        let f = TruncatedFock::new(3, 2, 3).unwrap();
        let u = f.transposition_unitary();
        for j in 1..=3 {
            let l = f.creation_matrix(Side::Left, j).unwrap();
            let r = f.creation_matrix(Side::Right, j).unwrap();
            // U_T L_j = R_j U_T exactly, truncation included
            assert!(opnorm(&(&u * &l - &r * &u)) == 0.0);
        }
    }
}
