//! Exact field arithmetic (ℚ and 𝔽_p) and dense exact linear algebra.
//!
//! Everything downstream is built on the two types here: [`Scalar`] (an exact
//! field element) and [`Mat`] (a dense row-major matrix of scalars). There is
//! no floating point anywhere in the crate; all verdicts are exact.
//!
//! Row reduction uses deterministic first-nonzero pivoting so that every
//! derived basis (kernels, quotient complements, hom-space bases) is
//! reproducible across runs and platforms.

use num::{BigInt, BigRational, One, Zero};
use std::cmp::Ordering;
use std::fmt;

/// The base field: the rationals, or a prime field 𝔽_p.
///
/// Only prime fields are supported; non-prime finite fields are modeled as
/// algebras over their prime subfield. Over a prime field every unital ring
/// map is automatically linear, which is what lets the rest of the crate
/// represent ring maps as matrices.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
}

impl FieldSpec {
    /// Prime-field constructor that actually checks primality.
    pub fn prime(p: u64) -> FieldSpec {
        assert!(is_prime_u64(p), "{p} is not prime");
        FieldSpec::Prime(p)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, FieldSpec::Rationals)
    }

    /// Number of field elements, if finite.
    pub fn order(&self) -> Option<u64> {
        match self {
            FieldSpec::Rationals => None,
            FieldSpec::Prime(p) => Some(*p),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "F{p}"),
        }
    }
}

/// Deterministic Miller-Rabin, valid for the full u64 range.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// An exact field element: a reduced rational or a residue in [0, p).
///
/// Arithmetic panics on a field mismatch; mixing fields is always a
/// programming error, never a data condition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Scalar {
    Rat(BigRational),
    Mod { v: u64, p: u64 },
}

impl Scalar {
    pub fn zero(field: FieldSpec) -> Scalar {
        Scalar::from_i64(field, 0)
    }

    pub fn one(field: FieldSpec) -> Scalar {
        Scalar::from_i64(field, 1)
    }

    pub fn from_i64(field: FieldSpec, n: i64) -> Scalar {
        match field {
            FieldSpec::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            FieldSpec::Prime(p) => Scalar::Mod {
                v: (n as i128).rem_euclid(p as i128) as u64,
                p,
            },
        }
    }

    /// Exact fraction n/d over ℚ.
    pub fn rational(n: i64, d: i64) -> Scalar {
        assert!(d != 0, "zero denominator");
        Scalar::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rat(_) => FieldSpec::Rationals,
            Scalar::Mod { p, .. } => FieldSpec::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Mod { v, .. } => *v == 1,
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Mod { v: a, p }, Scalar::Mod { v: b, p: q }) if p == q => Scalar::Mod {
                v: ((*a as u128 + *b as u128) % *p as u128) as u64,
                p: *p,
            },
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn sub(&self, rhs: &Scalar) -> Scalar {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Mod { v: a, p }, Scalar::Mod { v: b, p: q }) if p == q => Scalar::Mod {
                v: mul_mod(*a, *b, *p),
                p: *p,
            },
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Mod { v, p } => Scalar::Mod {
                v: if *v == 0 { 0 } else { p - v },
                p: *p,
            },
        }
    }

    /// Multiplicative inverse; `None` exactly for zero.
    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Rat(a) => {
                if a.is_zero() {
                    None
                } else {
                    Some(Scalar::Rat(a.recip()))
                }
            }
            Scalar::Mod { v, p } => {
                if *v == 0 {
                    None
                } else {
                    Some(Scalar::Mod {
                        v: pow_mod(*v, p - 2, *p),
                        p: *p,
                    })
                }
            }
        }
    }

    pub fn div(&self, rhs: &Scalar) -> Option<Scalar> {
        rhs.inv().map(|r| self.mul(&r))
    }

    /// Deterministic total order used only for normalizing output listings
    /// (it has no algebraic meaning over 𝔽_p).
    pub fn lex_cmp(&self, rhs: &Scalar) -> Ordering {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => a.cmp(b),
            (Scalar::Mod { v: a, .. }, Scalar::Mod { v: b, .. }) => a.cmp(b),
            _ => panic!("scalar field mismatch"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Mod { v, .. } => write!(f, "{v}"),
        }
    }
}

/// A dense row-major matrix of scalars over a single field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub field: FieldSpec,
    entries: Vec<Scalar>,
}

impl Mat {
    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            field,
            entries: vec![Scalar::zero(field); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Mat {
        let mut m = Mat::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one(field));
        }
        m
    }

    pub fn from_fn(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Mat {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let s = f(i, j);
                assert_eq!(s.field(), field, "entry field mismatch");
                entries.push(s);
            }
        }
        Mat {
            rows,
            cols,
            field,
            entries,
        }
    }

    /// Small-literal constructor used heavily in tests and example data.
    pub fn from_i64(field: FieldSpec, rows: &[&[i64]]) -> Mat {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat::from_fn(field, r, c, |i, j| Scalar::from_i64(field, rows[i][j]))
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Mat {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat::from_fn(field, r, c, |i, j| rows[i][j].clone())
    }

    pub fn from_cols(field: FieldSpec, cols: Vec<Vec<Scalar>>) -> Mat {
        let c = cols.len();
        let r = if c == 0 { 0 } else { cols[0].len() };
        assert!(cols.iter().all(|col| col.len() == r), "ragged columns");
        Mat::from_fn(field, r, c, |i, j| cols[j][i].clone())
    }

    /// n×1 column matrix from a coordinate vector.
    pub fn col_vec(field: FieldSpec, v: &[Scalar]) -> Mat {
        Mat::from_fn(field, v.len(), 1, |i, _| v[i].clone())
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Scalar) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        assert_eq!(s.field(), self.field, "entry field mismatch");
        self.entries[i * self.cols + j] = s;
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        (0..self.cols).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|s| s.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Mat::from_fn(self.field, self.rows, self.cols, |i, j| {
            self.at(i, j).add(rhs.at(i, j))
        })
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Mat::from_fn(self.field, self.rows, self.cols, |i, j| {
            self.at(i, j).sub(rhs.at(i, j))
        })
    }

    pub fn neg(&self) -> Mat {
        Mat::from_fn(self.field, self.rows, self.cols, |i, j| self.at(i, j).neg())
    }

    pub fn scale(&self, s: &Scalar) -> Mat {
        Mat::from_fn(self.field, self.rows, self.cols, |i, j| self.at(i, j).mul(s))
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        assert_eq!(self.field, rhs.field, "field mismatch");
        let mut out = Mat::zero(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(i, j).add(&a.mul(b));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    /// Matrix–vector product on coordinate vectors.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero(self.field);
                for (j, vj) in v.iter().enumerate() {
                    if !self.at(i, j).is_zero() && !vj.is_zero() {
                        acc = acc.add(&self.at(i, j).mul(vj));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.field, self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn trace(&self) -> Scalar {
        assert!(self.is_square(), "trace of non-square matrix");
        let mut acc = Scalar::zero(self.field);
        for i in 0..self.rows {
            acc = acc.add(self.at(i, i));
        }
        acc
    }

    /// Horizontal concatenation [self | rhs].
    pub fn hstack(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.rows, rhs.rows, "row count mismatch");
        Mat::from_fn(self.field, self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                rhs.at(i, j - self.cols).clone()
            }
        })
    }

    /// Vertical concatenation [self; rhs].
    pub fn vstack(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.cols, "column count mismatch");
        Mat::from_fn(self.field, self.rows + rhs.rows, self.cols, |i, j| {
            if i < self.rows {
                self.at(i, j).clone()
            } else {
                rhs.at(i - self.rows, j).clone()
            }
        })
    }

    pub fn block_diag(blocks: &[&Mat]) -> Mat {
        assert!(!blocks.is_empty(), "block_diag of empty list");
        let field = blocks[0].field;
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zero(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.at(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Kronecker product; index (i·rhs.rows + k, j·rhs.cols + l) holds
    /// self[i,j]·rhs[k,l].
    pub fn kron(&self, rhs: &Mat) -> Mat {
        Mat::from_fn(
            self.field,
            self.rows * rhs.rows,
            self.cols * rhs.cols,
            |i, j| {
                self.at(i / rhs.rows, j / rhs.cols)
                    .mul(rhs.at(i % rhs.rows, j % rhs.cols))
            },
        )
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Reduced row echelon form with deterministic first-nonzero pivoting.
    /// Returns the reduced matrix and the pivot column indices in order.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // first nonzero entry in column c at or below row r
            let Some(pr) = (r..m.rows).find(|&i| !m.at(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    let a = m.at(r, j).clone();
                    let b = m.at(pr, j).clone();
                    m.set(r, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = m.at(r, c).inv().expect("pivot is nonzero");
            for j in 0..m.cols {
                let s = m.at(r, j).mul(&inv);
                m.set(r, j, s);
            }
            for i in 0..m.rows {
                if i != r && !m.at(i, c).is_zero() {
                    let f = m.at(i, c).clone();
                    for j in 0..m.cols {
                        let s = m.at(i, j).sub(&f.mul(m.at(r, j)));
                        m.set(i, j, s);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Two-sided inverse, or `None` when singular.
    pub fn invert(&self) -> Option<Mat> {
        assert!(self.is_square(), "invert of non-square matrix");
        let n = self.rows;
        let (red, pivots) = self.hstack(&Mat::identity(self.field, n)).rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
            return None;
        }
        Some(Mat::from_fn(self.field, n, n, |i, j| {
            red.at(i, n + j).clone()
        }))
    }

    /// Deterministic total order on equal-shape matrices (entry-lexicographic);
    /// used to normalize enumeration output.
    pub fn lex_cmp(&self, rhs: &Mat) -> Ordering {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        for (a, b) in self.entries.iter().zip(rhs.entries.iter()) {
            match a.lex_cmp(b) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Solve a·x = b column-wise; `None` when the system is inconsistent.
/// When underdetermined, free variables are set to zero (deterministic).
pub fn solve(a: &Mat, b: &Mat) -> Option<Mat> {
    assert_eq!(a.rows, b.rows, "solve: row count mismatch");
    assert_eq!(a.field, b.field, "solve: field mismatch");
    let (red, pivots) = a.hstack(b).rref();
    // a pivot inside the b-block means an inconsistent row
    if pivots.iter().any(|&c| c >= a.cols) {
        return None;
    }
    let mut x = Mat::zero(a.field, a.cols, b.cols);
    for (r, &c) in pivots.iter().enumerate() {
        for j in 0..b.cols {
            x.set(c, j, red.at(r, a.cols + j).clone());
        }
    }
    Some(x)
}

/// Basis of the right null space {v : m·v = 0}, one column vector per basis
/// element, ordered by ascending free-column index.
pub fn kernel_basis(m: &Mat) -> Vec<Mat> {
    let (red, pivots) = m.rref();
    let mut basis = Vec::new();
    for j in 0..m.cols {
        if pivots.contains(&j) {
            continue;
        }
        let mut v = Mat::zero(m.field, m.cols, 1);
        v.set(j, 0, Scalar::one(m.field));
        for (r, &c) in pivots.iter().enumerate() {
            v.set(c, 0, red.at(r, j).neg());
        }
        basis.push(v);
    }
    basis
}

/// A quotient of F^n by the row space of a relation matrix, carried as a
/// pivot-complement coordinate system: `project` reduces a vector modulo the
/// relations and reads off the non-pivot coordinates; `section` embeds
/// quotient coordinates back at the non-pivot positions (project ∘ section
/// is the identity).
#[derive(Clone, Debug)]
pub struct Quotient {
    pub field: FieldSpec,
    pub ambient: usize,
    pub rref: Mat,
    pub pivots: Vec<usize>,
    pub nonpivots: Vec<usize>,
}

impl Quotient {
    /// Build from relation vectors given as the rows of `relations`.
    pub fn from_relations(relations: &Mat) -> Quotient {
        let (rref, pivots) = relations.rref();
        let nonpivots = (0..relations.cols)
            .filter(|j| !pivots.contains(j))
            .collect();
        Quotient {
            field: relations.field,
            ambient: relations.cols,
            rref,
            pivots,
            nonpivots,
        }
    }

    pub fn dim(&self) -> usize {
        self.nonpivots.len()
    }

    /// Image of an ambient coordinate vector in quotient coordinates.
    pub fn project(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        let mut w = v.to_vec();
        for (r, &c) in self.pivots.iter().enumerate() {
            if w[c].is_zero() {
                continue;
            }
            let f = w[c].clone();
            // the rref row has 1 at c and zeros at all other pivot columns,
            // so one pass clears every pivot coordinate
            for (j, wj) in w.iter_mut().enumerate() {
                if !self.rref.at(r, j).is_zero() {
                    *wj = wj.sub(&f.mul(self.rref.at(r, j)));
                }
            }
        }
        self.nonpivots.iter().map(|&j| w[j].clone()).collect()
    }

    /// The canonical section: quotient coordinates placed at non-pivot
    /// positions, zero at pivots.
    pub fn section(&self, q: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(q.len(), self.dim(), "quotient dimension mismatch");
        let mut v = vec![Scalar::zero(self.field); self.ambient];
        for (k, &j) in self.nonpivots.iter().enumerate() {
            v[j] = q[k].clone();
        }
        v
    }

    /// Matrix of `project` (dim × ambient).
    pub fn projection_matrix(&self) -> Mat {
        let mut cols = Vec::with_capacity(self.ambient);
        for j in 0..self.ambient {
            let mut e = vec![Scalar::zero(self.field); self.ambient];
            e[j] = Scalar::one(self.field);
            cols.push(self.project(&e));
        }
        Mat::from_cols(self.field, cols)
    }

    /// Matrix of `section` (ambient × dim).
    pub fn section_matrix(&self) -> Mat {
        if self.dim() == 0 {
            // `from_cols` of an empty list cannot recover the row count
            return Mat::zero(self.field, self.ambient, 0);
        }
        let mut cols = Vec::with_capacity(self.dim());
        for k in 0..self.dim() {
            let mut e = vec![Scalar::zero(self.field); self.dim()];
            e[k] = Scalar::one(self.field);
            cols.push(self.section(&e));
        }
        Mat::from_cols(self.field, cols)
    }
}

/// Outcome of searching a (possibly affine) span of square matrices for an
/// invertible element.
///
/// `ProvablyNone` is only ever reported when a complete strategy ran: the
/// deterministic evaluation grid (valid by polynomial identity testing when
/// the field has more than `size` elements) or exhaustive enumeration over a
/// finite field.
#[derive(Clone, Debug)]
pub enum SpanSearch {
    Found { element: Mat, coeffs: Vec<Scalar> },
    ProvablyNone,
    Inconclusive,
}

impl SpanSearch {
    pub fn found(&self) -> Option<(&Mat, &[Scalar])> {
        match self {
            SpanSearch::Found { element, coeffs } => Some((element, coeffs)),
            _ => None,
        }
    }
}

/// Search the linear span of `basis` for an invertible matrix.
///
/// The determinant of a generic span element is a polynomial of total degree
/// ≤ s (s = matrix size), so evaluating on a grid of s+1 distinct values per
/// coefficient is sound *and complete* over ℚ and over 𝔽_p with p > s. When
/// the grid exceeds `budget`, falls back to exhaustive enumeration over 𝔽_p
/// (complete) and then to seeded random trials (incomplete).
pub fn find_invertible_in_span(basis: &[Mat], budget: u64) -> SpanSearch {
    find_invertible_affine(None, basis, budget, DEFAULT_SEARCH_SEED)
}

pub const DEFAULT_SEARCH_SEED: u64 = 0xB1F0;

/// Affine variant: search `base + span(gens)` (or the plain span when `base`
/// is `None`). `coeffs` in a `Found` result are the coefficients of `gens`.
pub fn find_invertible_affine(
    base: Option<&Mat>,
    gens: &[Mat],
    budget: u64,
    seed: u64,
) -> SpanSearch {
    let probe = base.or(gens.first());
    let Some(first) = probe else {
        // no base, no generators: nothing but an empty search space
        return SpanSearch::ProvablyNone;
    };
    let s = first.rows;
    let field = first.field;
    assert!(first.is_square(), "span search needs square matrices");
    for g in gens {
        assert_eq!((g.rows, g.cols), (s, s), "mixed sizes in span search");
        assert_eq!(g.field, field, "mixed fields in span search");
    }
    if let Some(b) = base {
        assert_eq!((b.rows, b.cols), (s, s), "mixed sizes in span search");
    }

    // 0×0 matrices are invertible (identity of the zero space)
    if s == 0 {
        return SpanSearch::Found {
            element: Mat::zero(field, 0, 0),
            coeffs: vec![Scalar::zero(field); gens.len()],
        };
    }

    let dim = gens.len();
    let assemble = |coeffs: &[Scalar]| -> Mat {
        let mut m = match base {
            Some(b) => b.clone(),
            None => Mat::zero(field, s, s),
        };
        for (c, g) in coeffs.iter().zip(gens.iter()) {
            if !c.is_zero() {
                m = m.add(&g.scale(c));
            }
        }
        m
    };

    if dim == 0 {
        let m = assemble(&[]);
        return if m.invert().is_some() {
            SpanSearch::Found {
                element: m,
                coeffs: vec![],
            }
        } else {
            SpanSearch::ProvablyNone
        };
    }

    let radix_grid = (s as u64) + 1; // s+1 distinct values per coefficient
    let grid_ok = match field {
        FieldSpec::Rationals => true,
        FieldSpec::Prime(p) => p >= radix_grid,
    };
    let try_exhaustive = |radix: u64| -> Option<SpanSearch> {
        // mixed-radix counter over `dim` digits; None if radix^dim > budget
        let mut total: u64 = 1;
        for _ in 0..dim {
            total = total.checked_mul(radix)?;
            if total > budget {
                return None;
            }
        }
        let mut coeffs = vec![Scalar::zero(field); dim];
        let mut digits = vec![0u64; dim];
        for _ in 0..total {
            let m = assemble(&coeffs);
            if m.invert().is_some() {
                return Some(SpanSearch::Found { element: m, coeffs });
            }
            // increment
            for i in 0..dim {
                digits[i] += 1;
                if digits[i] < radix {
                    coeffs[i] = Scalar::from_i64(field, digits[i] as i64);
                    break;
                }
                digits[i] = 0;
                coeffs[i] = Scalar::zero(field);
            }
        }
        Some(SpanSearch::ProvablyNone)
    };

    if grid_ok {
        if let Some(result) = try_exhaustive(radix_grid) {
            return result;
        }
    }
    if let FieldSpec::Prime(p) = field {
        // over a small prime field the whole coefficient space may fit
        if let Some(result) = try_exhaustive(p) {
            return result;
        }
    }

    // randomized fallback: deterministic cheap candidates first, then seeded
    // pseudo-random trials; a miss is only ever "inconclusive"
    let mut tried = 0u64;
    let check = |coeffs: Vec<Scalar>| -> Option<SpanSearch> {
        let m = assemble(&coeffs);
        if m.invert().is_some() {
            Some(SpanSearch::Found { element: m, coeffs })
        } else {
            None
        }
    };
    let zero_c = vec![Scalar::zero(field); dim];
    let one_c = vec![Scalar::one(field); dim];
    if let Some(r) = check(zero_c) {
        return r;
    }
    if let Some(r) = check(one_c) {
        return r;
    }
    for i in 0..dim {
        let mut c = vec![Scalar::zero(field); dim];
        c[i] = Scalar::one(field);
        if let Some(r) = check(c) {
            return r;
        }
        tried += 1;
        if tried >= budget {
            return SpanSearch::Inconclusive;
        }
    }
    let mut rng = SplitMix64::new(seed);
    while tried < budget {
        let c: Vec<Scalar> = (0..dim)
            .map(|_| match field {
                FieldSpec::Rationals => {
                    Scalar::from_i64(field, (rng.next_u64() % radix_grid) as i64)
                }
                FieldSpec::Prime(p) => Scalar::from_i64(field, (rng.next_u64() % p) as i64),
            })
            .collect();
        if let Some(r) = check(c) {
            return r;
        }
        tried += 1;
    }
    SpanSearch::Inconclusive
}

/// Tiny deterministic PRNG for the randomized search fallback; avoids pulling
/// a RNG crate into the kernel and is reproducible by construction.
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn f(p: u64) -> FieldSpec {
        FieldSpec::prime(p)
    }

    #[test]
    fn prime_check_accepts_primes() {
        for p in [2u64, 3, 5, 7, 11, 97, 65537] {
            assert!(is_prime_u64(p), "{p}");
        }
    }

    #[test]
    #[should_panic(expected = "not prime")]
    fn prime_check_rejects_composites() {
        FieldSpec::prime(4);
    }

    #[test]
    fn mod_arithmetic_basics() {
        let a = Scalar::from_i64(f(7), 5);
        let b = Scalar::from_i64(f(7), 4);
        assert_eq!(a.add(&b), Scalar::from_i64(f(7), 2));
        assert_eq!(a.mul(&b), Scalar::from_i64(f(7), 6));
        assert_eq!(a.neg(), Scalar::from_i64(f(7), 2));
        let inv = a.inv().unwrap();
        assert!(a.mul(&inv).is_one());
        assert!(Scalar::zero(f(7)).inv().is_none());
        // negative literals wrap into [0, p)
        assert_eq!(Scalar::from_i64(f(7), -1), Scalar::from_i64(f(7), 6));
    }

    #[test]
    fn rational_arithmetic_reduces() {
        let half = Scalar::rational(1, 2);
        let third = Scalar::rational(2, 6); // reduces to 1/3
        assert_eq!(third, Scalar::rational(1, 3));
        let s = half.add(&third);
        assert_eq!(s, Scalar::rational(5, 6));
        assert_eq!(half.mul(&half), Scalar::rational(1, 4));
        assert_eq!(Scalar::rational(-2, -4), Scalar::rational(1, 2));
    }

    #[test]
    #[should_panic(expected = "field mismatch")]
    fn mixed_field_arithmetic_panics() {
        let a = Scalar::from_i64(q(), 1);
        let b = Scalar::from_i64(f(2), 1);
        let _ = a.add(&b);
    }

    #[test]
    fn rref_identity_is_fixed() {
        let m = Mat::identity(q(), 2);
        let (r, p) = m.rref();
        assert_eq!(r, m);
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn rref_zero_has_no_pivots() {
        let m = Mat::zero(q(), 3, 3);
        let (r, p) = m.rref();
        assert_eq!(r, m);
        assert!(p.is_empty());
    }

    #[test]
    fn rref_rank_one_example() {
        let m = Mat::from_i64(q(), &[&[2, 4], &[1, 2]]);
        let (r, p) = m.rref();
        assert_eq!(r, Mat::from_i64(q(), &[&[1, 2], &[0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn rref_is_idempotent() {
        for m in [
            Mat::from_i64(q(), &[&[2, 4], &[1, 2]]),
            Mat::from_i64(q(), &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]),
            Mat::from_i64(f(5), &[&[1, 2, 3], &[4, 0, 1]]),
        ] {
            let (r1, p1) = m.rref();
            let (r2, p2) = r1.rref();
            assert_eq!(r1, r2);
            assert_eq!(p1, p2);
        }
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let b = Mat::from_i64(q(), &[&[7], &[-3]]);
        assert_eq!(solve(&Mat::identity(q(), 2), &b).unwrap(), b);
    }

    #[test]
    fn solve_detects_inconsistency() {
        let a = Mat::from_i64(q(), &[&[1, 1], &[1, 1]]);
        let b = Mat::from_i64(q(), &[&[0], &[1]]);
        assert!(solve(&a, &b).is_none());
    }

    #[test]
    fn solve_back_substitution_example() {
        let a = Mat::from_i64(q(), &[&[1, 1], &[0, 1]]);
        let b = Mat::from_i64(q(), &[&[3], &[1]]);
        let x = solve(&a, &b).unwrap();
        assert_eq!(x, Mat::from_i64(q(), &[&[2], &[1]]));
        assert_eq!(a.mul(&x), b);
    }

    #[test]
    fn solve_underdetermined_is_exact() {
        let a = Mat::from_i64(q(), &[&[1, 2, 3]]);
        let b = Mat::from_i64(q(), &[&[6]]);
        let x = solve(&a, &b).unwrap();
        assert_eq!(a.mul(&x), b);
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(kernel_basis(&Mat::identity(q(), 3)).is_empty());
    }

    #[test]
    fn kernel_of_zero_is_everything() {
        let ks = kernel_basis(&Mat::zero(q(), 2, 2));
        assert_eq!(ks.len(), 2);
    }

    #[test]
    fn kernel_rank_one_example() {
        let m = Mat::from_i64(q(), &[&[1, 2]]);
        let ks = kernel_basis(&m);
        assert_eq!(ks.len(), 1);
        assert_eq!(ks[0], Mat::from_i64(q(), &[&[-2], &[1]]));
        assert!(m.mul(&ks[0]).is_zero());
    }

    #[test]
    fn invert_identity() {
        let i3 = Mat::identity(f(3), 3);
        assert_eq!(i3.invert().unwrap(), i3);
    }

    #[test]
    fn invert_singular_is_none() {
        assert!(Mat::from_i64(q(), &[&[1, 1], &[1, 1]]).invert().is_none());
    }

    #[test]
    fn invert_unipotent_example() {
        let m = Mat::from_i64(q(), &[&[1, 1], &[0, 1]]);
        let inv = m.invert().unwrap();
        assert_eq!(inv, Mat::from_i64(q(), &[&[1, -1], &[0, 1]]));
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
    }

    #[test]
    fn kron_and_block_diag_shapes() {
        let a = Mat::from_i64(q(), &[&[1, 2], &[3, 4]]);
        let i2 = Mat::identity(q(), 2);
        let k = a.kron(&i2);
        assert_eq!((k.rows, k.cols), (4, 4));
        assert_eq!(k.at(0, 0), &Scalar::from_i64(q(), 1));
        assert_eq!(k.at(0, 2), &Scalar::from_i64(q(), 2));
        let d = Mat::block_diag(&[&a, &i2]);
        assert_eq!((d.rows, d.cols), (4, 4));
        assert!(d.at(0, 2).is_zero());
        assert!(d.at(2, 2).is_one());
    }

    #[test]
    fn span_of_identity_is_found() {
        let r = find_invertible_in_span(&[Mat::identity(q(), 2)], 1000);
        let (m, c) = r.found().expect("identity span");
        assert!(m.is_identity());
        assert_eq!(c, &[Scalar::one(q())]);
    }

    #[test]
    fn span_of_nilpotent_is_provably_none() {
        let e12 = Mat::from_i64(q(), &[&[0, 1], &[0, 0]]);
        match find_invertible_in_span(&[e12], 1000) {
            SpanSearch::ProvablyNone => {}
            other => panic!("expected ProvablyNone, got {other:?}"),
        }
    }

    #[test]
    fn span_of_diagonal_units_finds_identity() {
        let e11 = Mat::from_i64(q(), &[&[1, 0], &[0, 0]]);
        let e22 = Mat::from_i64(q(), &[&[0, 0], &[0, 1]]);
        let r = find_invertible_in_span(&[e11, e22], 1000);
        let (m, c) = r.found().expect("diagonal span contains I");
        assert!(m.is_identity());
        assert_eq!(c, &[Scalar::one(q()), Scalar::one(q())]);
    }

    #[test]
    fn span_search_zero_size_matrices() {
        let r = find_invertible_in_span(&[Mat::zero(q(), 0, 0)], 10);
        assert!(r.found().is_some());
    }

    #[test]
    fn span_search_empty_basis() {
        match find_invertible_in_span(&[], 10) {
            SpanSearch::ProvablyNone => {}
            other => panic!("expected ProvablyNone, got {other:?}"),
        }
    }

    #[test]
    fn affine_search_tests_base_alone() {
        let base = Mat::identity(f(2), 2);
        let r = find_invertible_affine(Some(&base), &[], 10, 0);
        let (m, c) = r.found().expect("base itself invertible");
        assert!(m.is_identity());
        assert!(c.is_empty());
        let r2 = find_invertible_affine(Some(&Mat::zero(f(2), 2, 2)), &[], 10, 0);
        assert!(matches!(r2, SpanSearch::ProvablyNone));
    }

    #[test]
    fn affine_search_needs_base_shift() {
        // span{e12} has no unit, but I + span{e12} is all unipotent
        let e12 = Mat::from_i64(f(2), &[&[0, 1], &[0, 0]]);
        let base = Mat::identity(f(2), 2);
        let r = find_invertible_affine(Some(&base), &[e12], 100, 0);
        assert!(r.found().is_some());
    }

    #[test]
    fn exhaustive_fallback_over_f2() {
        // size 3 needs a 4-point grid, but F2 only has 2 elements; the
        // exhaustive 2^dim path must still find the invertible combination
        let f2 = f(2);
        let mut gens = Vec::new();
        for i in 0..3 {
            let mut m = Mat::zero(f2, 3, 3);
            m.set(i, i, Scalar::one(f2));
            gens.push(m);
        }
        let r = find_invertible_in_span(&gens, 1000);
        let (m, _) = r.found().expect("identity is in the span");
        assert!(m.is_identity());
    }

    #[test]
    fn quotient_projection_and_section_roundtrip() {
        // F^3 modulo the single relation (1,1,0)
        let rel = Mat::from_i64(q(), &[&[1, 1, 0]]);
        let quo = Quotient::from_relations(&rel);
        assert_eq!(quo.dim(), 2);
        assert_eq!(quo.nonpivots, vec![1, 2]);
        // e0 ≡ -e1 mod the relation
        let e0 = [
            Scalar::one(q()),
            Scalar::zero(q()),
            Scalar::zero(q()),
        ];
        assert_eq!(
            quo.project(&e0),
            vec![Scalar::from_i64(q(), -1), Scalar::zero(q())]
        );
        // relation itself dies
        let r = [Scalar::one(q()), Scalar::one(q()), Scalar::zero(q())];
        assert!(quo.project(&r).iter().all(|s| s.is_zero()));
        // project ∘ section = id on quotient coordinates
        for k in 0..quo.dim() {
            let mut e = vec![Scalar::zero(q()); quo.dim()];
            e[k] = Scalar::one(q());
            assert_eq!(quo.project(&quo.section(&e)), e);
        }
        // matrices agree with the maps
        let pm = quo.projection_matrix();
        let sm = quo.section_matrix();
        assert!(pm.mul(&sm).is_identity());
    }

    #[test]
    fn display_formats() {
        assert_eq!(Scalar::rational(3, 2).to_string(), "3/2");
        assert_eq!(Scalar::from_i64(f(5), 9).to_string(), "4");
        assert_eq!(
            Mat::identity(q(), 2).to_string(),
            "[[1, 0], [0, 1]]"
        );
    }
}
