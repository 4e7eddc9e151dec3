//! Finite-dimensional unital associative algebras given by structure
//! constants, their centers, and their anti-endomorphisms.
//!
//! An algebra of dimension d over a field is the data c[i][j][k] with
//! e_i·e_j = Σ_k c_{ijk} e_k plus a distinguished unity vector. Elements are
//! plain coordinate vectors (`Vec<Scalar>`); operations take the `Algebra`
//! explicitly so values stay `Send + Sync` without reference counting.
//!
//! Anti-endomorphisms (additive unital maps with α(ab) = α(b)α(a)) are stored
//! as d×d matrices. `enumerate_anti_endos` lists all of them over a prime
//! field by backtracking over images of basis elements, pruning with the
//! linear closure of the partial map — at each choice point every constraint
//! that is linear in the unknown image is solved first, so only the affine
//! solution space is enumerated.

use crate::scalars::{
    find_invertible_in_span, kernel_basis, solve, FieldSpec, Mat, Scalar, SpanSearch,
};
use thiserror::Error;

/// Coordinate vector of an algebra element.
pub type Elem = Vec<Scalar>;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("associativity fails at basis triple ({0}, {1}, {2})")]
    AssociativityViolation(usize, usize, usize),
    #[error("unity axiom fails at basis element {0}")]
    UnityViolation(usize),
    #[error("pattern not closed: product of positions ({0},{1})·({2},{3}) leaves the pattern")]
    PatternNotClosed(usize, usize, usize, usize),
    #[error("pattern omits diagonal position ({0},{0})")]
    PatternNotUnital(usize),
    #[error("map does not fix the unity")]
    NotUnital,
    #[error("map is not anti-multiplicative at basis pair ({0}, {1})")]
    NotAntiMultiplicative(usize, usize),
    #[error("element is not invertible")]
    NotInvertible,
    #[error("search budget exceeded")]
    BudgetExceeded,
}

/// A finite-dimensional unital associative algebra by structure constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    pub field: FieldSpec,
    pub dim: usize,
    /// Flat structure constants, index (i·dim + j)·dim + k.
    sc: Vec<Scalar>,
    pub unity: Elem,
}

impl Algebra {
    pub fn structconst(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.sc[(i * self.dim + j) * self.dim + k]
    }

    pub fn zero_elem(&self) -> Elem {
        vec![Scalar::zero(self.field); self.dim]
    }

    pub fn basis_elem(&self, i: usize) -> Elem {
        let mut v = self.zero_elem();
        v[i] = Scalar::one(self.field);
        v
    }

    pub fn elem_from_i64(&self, coords: &[i64]) -> Elem {
        assert_eq!(coords.len(), self.dim, "coordinate count mismatch");
        coords
            .iter()
            .map(|&n| Scalar::from_i64(self.field, n))
            .collect()
    }

    /// Bilinear product via the structure constants.
    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Elem {
        assert_eq!(a.len(), self.dim, "element dimension mismatch");
        assert_eq!(b.len(), self.dim, "element dimension mismatch");
        let mut out = self.zero_elem();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let f = ai.mul(bj);
                for (k, ok) in out.iter_mut().enumerate() {
                    let c = self.structconst(i, j, k);
                    if !c.is_zero() {
                        *ok = ok.add(&f.mul(c));
                    }
                }
            }
        }
        out
    }

    /// Matrix of y ↦ x·y.
    pub fn lmul_mat(&self, x: &[Scalar]) -> Mat {
        let cols = (0..self.dim)
            .map(|j| self.mul(x, &self.basis_elem(j)))
            .collect();
        Mat::from_cols(self.field, cols)
    }

    /// Matrix of y ↦ y·x.
    pub fn rmul_mat(&self, x: &[Scalar]) -> Mat {
        let cols = (0..self.dim)
            .map(|j| self.mul(&self.basis_elem(j), x))
            .collect();
        Mat::from_cols(self.field, cols)
    }

    /// Invertibility via the left-regular representation: x is a unit iff
    /// left-multiplication by x is an invertible matrix.
    pub fn is_invertible_elem(&self, x: &[Scalar]) -> bool {
        self.lmul_mat(x).invert().is_some()
    }

    /// Two-sided inverse of x, or `None`.
    pub fn inverse_elem(&self, x: &[Scalar]) -> Option<Elem> {
        let l = self.lmul_mat(x).invert()?;
        let y = l.apply(&self.unity);
        debug_assert_eq!(self.mul(&y, x), self.unity);
        Some(y)
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim).all(|i| {
            (i + 1..self.dim).all(|j| {
                self.mul(&self.basis_elem(i), &self.basis_elem(j))
                    == self.mul(&self.basis_elem(j), &self.basis_elem(i))
            })
        })
    }

    /// Basis of the center {z : ze_i = e_iz for all i}.
    pub fn center(&self) -> Vec<Elem> {
        let mut stacked: Option<Mat> = None;
        for i in 0..self.dim {
            let e = self.basis_elem(i);
            let diff = self.lmul_mat(&e).sub(&self.rmul_mat(&e));
            stacked = Some(match stacked {
                None => diff,
                Some(s) => s.vstack(&diff),
            });
        }
        kernel_basis(&stacked.expect("algebra has dim ≥ 1"))
            .into_iter()
            .map(|v| v.col(0))
            .collect()
    }
}

/// Validate and construct an algebra from raw structure constants.
///
/// `structconsts` is flat with index (i·dim + j)·dim + k. Both the unity
/// axiom and associativity are checked on all basis tuples.
pub fn make_algebra(
    field: FieldSpec,
    dim: usize,
    structconsts: Vec<Scalar>,
    unity: Elem,
) -> Result<Algebra, AlgebraError> {
    assert!(dim >= 1, "algebras here are unital, so dim ≥ 1");
    assert_eq!(structconsts.len(), dim * dim * dim, "structure constant count");
    assert_eq!(unity.len(), dim, "unity coordinate count");
    let a = Algebra {
        field,
        dim,
        sc: structconsts,
        unity,
    };
    for i in 0..dim {
        let e = a.basis_elem(i);
        if a.mul(&a.unity, &e) != e || a.mul(&e, &a.unity) != e {
            return Err(AlgebraError::UnityViolation(i));
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            let ij = a.mul(&a.basis_elem(i), &a.basis_elem(j));
            for k in 0..dim {
                let left = a.mul(&ij, &a.basis_elem(k));
                let jk = a.mul(&a.basis_elem(j), &a.basis_elem(k));
                let right = a.mul(&a.basis_elem(i), &jk);
                if left != right {
                    return Err(AlgebraError::AssociativityViolation(i, j, k));
                }
            }
        }
    }
    Ok(a)
}

/// Convenience wrapper over [`make_algebra`] for small integer tables.
pub fn make_algebra_i64(
    field: FieldSpec,
    dim: usize,
    structconsts: &[i64],
    unity: &[i64],
) -> Result<Algebra, AlgebraError> {
    make_algebra(
        field,
        dim,
        structconsts
            .iter()
            .map(|&n| Scalar::from_i64(field, n))
            .collect(),
        unity.iter().map(|&n| Scalar::from_i64(field, n)).collect(),
    )
}

/// The base field as a 1-dimensional algebra over itself.
pub fn field_algebra(field: FieldSpec) -> Algebra {
    make_algebra_i64(field, 1, &[1], &[1]).expect("a field is an algebra over itself")
}

/// The full matrix algebra M_n on the matrix-unit basis e_{ij}, row-major
/// (basis index i·n + j).
pub fn matrix_algebra(field: FieldSpec, n: usize) -> Algebra {
    assert!(n >= 1);
    let dim = n * n;
    let mut sc = vec![Scalar::zero(field); dim * dim * dim];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if b == c {
                        // e_{ab}·e_{cd} = e_{ad}
                        let i = a * n + b;
                        let j = c * n + d;
                        let k = a * n + d;
                        sc[(i * dim + j) * dim + k] = Scalar::one(field);
                    }
                }
            }
        }
    }
    let mut unity = vec![Scalar::zero(field); dim];
    for a in 0..n {
        unity[a * n + a] = Scalar::one(field);
    }
    make_algebra(field, dim, sc, unity).expect("matrix algebra is associative and unital")
}

/// The span of the matrix units selected by a boolean n×n mask, as an
/// algebra. Returns the algebra together with the selected (row, col)
/// positions in row-major order (= the basis order).
pub fn structured_subalgebra(
    field: FieldSpec,
    n: usize,
    mask: &[Vec<bool>],
) -> Result<(Algebra, Vec<(usize, usize)>), AlgebraError> {
    assert_eq!(mask.len(), n, "mask row count");
    assert!(mask.iter().all(|r| r.len() == n), "mask column count");
    for (i, row) in mask.iter().enumerate() {
        if !row[i] {
            return Err(AlgebraError::PatternNotUnital(i));
        }
    }
    let positions: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| mask[i][j])
        .collect();
    // closure under matrix multiplication: e_{ij}·e_{jl} = e_{il}
    for &(i, j) in &positions {
        for &(k, l) in &positions {
            if j == k && !mask[i][l] {
                return Err(AlgebraError::PatternNotClosed(i, j, k, l));
            }
        }
    }
    let dim = positions.len();
    let index_of = |r: usize, c: usize| positions.iter().position(|&p| p == (r, c));
    let mut sc = vec![Scalar::zero(field); dim * dim * dim];
    for (bi, &(i, j)) in positions.iter().enumerate() {
        for (bj, &(k, l)) in positions.iter().enumerate() {
            if j == k {
                let bk = index_of(i, l).expect("closure was checked");
                sc[(bi * dim + bj) * dim + bk] = Scalar::one(field);
            }
        }
    }
    let mut unity = vec![Scalar::zero(field); dim];
    for i in 0..n {
        unity[index_of(i, i).expect("diagonal was checked")] = Scalar::one(field);
    }
    let alg = make_algebra(field, dim, sc, unity)
        .expect("masked matrix-unit span is associative and unital");
    Ok((alg, positions))
}

/// Direct product A × B with basis = A's basis followed by B's.
pub fn product_algebra(a: &Algebra, b: &Algebra) -> Algebra {
    assert_eq!(a.field, b.field, "field mismatch");
    let dim = a.dim + b.dim;
    let field = a.field;
    let mut sc = vec![Scalar::zero(field); dim * dim * dim];
    for i in 0..a.dim {
        for j in 0..a.dim {
            for k in 0..a.dim {
                sc[(i * dim + j) * dim + k] = a.structconst(i, j, k).clone();
            }
        }
    }
    for i in 0..b.dim {
        for j in 0..b.dim {
            for k in 0..b.dim {
                sc[((a.dim + i) * dim + (a.dim + j)) * dim + (a.dim + k)] =
                    b.structconst(i, j, k).clone();
            }
        }
    }
    let mut unity = a.unity.clone();
    unity.extend(b.unity.iter().cloned());
    make_algebra(field, dim, sc, unity).expect("product of algebras is an algebra")
}

/// The opposite algebra: same space, reversed multiplication.
pub fn opposite_algebra(a: &Algebra) -> Algebra {
    let dim = a.dim;
    let mut sc = vec![Scalar::zero(a.field); dim * dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                sc[(i * dim + j) * dim + k] = a.structconst(j, i, k).clone();
            }
        }
    }
    make_algebra(a.field, dim, sc, a.unity.clone()).expect("opposite of an algebra is an algebra")
}

/// A validated anti-endomorphism: additive, unital, product-reversing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiEndo {
    pub mat: Mat,
    pub bijective: bool,
}

impl AntiEndo {
    pub fn apply(&self, x: &[Scalar]) -> Elem {
        self.mat.apply(x)
    }

    pub fn is_involution(&self) -> bool {
        self.mat.mul(&self.mat).is_identity()
    }
}

/// Validate a matrix as an anti-endomorphism of R: α(1) = 1 and
/// α(e_i·e_j) = α(e_j)·α(e_i) on all basis pairs.
pub fn make_anti_endo(r: &Algebra, mat: Mat) -> Result<AntiEndo, AlgebraError> {
    assert_eq!((mat.rows, mat.cols), (r.dim, r.dim), "matrix shape");
    assert_eq!(mat.field, r.field, "field mismatch");
    if mat.apply(&r.unity) != r.unity {
        return Err(AlgebraError::NotUnital);
    }
    let images: Vec<Elem> = (0..r.dim).map(|i| mat.apply(&r.basis_elem(i))).collect();
    for i in 0..r.dim {
        for j in 0..r.dim {
            let lhs = mat.apply(&r.mul(&r.basis_elem(i), &r.basis_elem(j)));
            let rhs = r.mul(&images[j], &images[i]);
            if lhs != rhs {
                return Err(AlgebraError::NotAntiMultiplicative(i, j));
            }
        }
    }
    let bijective = mat.invert().is_some();
    Ok(AntiEndo { mat, bijective })
}

/// The transpose map e_{ij} ↦ e_{ji} on a matrix algebra built by
/// [`matrix_algebra`] (or any algebra whose basis is matrix units in
/// row-major order).
pub fn transpose_anti_endo(r: &Algebra, n: usize) -> AntiEndo {
    assert_eq!(r.dim, n * n, "expected the matrix-unit basis of M_n");
    let mut mat = Mat::zero(r.field, r.dim, r.dim);
    for i in 0..n {
        for j in 0..n {
            mat.set(j * n + i, i * n + j, Scalar::one(r.field));
        }
    }
    make_anti_endo(r, mat).expect("transpose reverses matrix products")
}

/// The block-swap map (x, y) ↦ (y, x) on a product algebra whose two factors
/// have dimension `half` each. Valid whenever the second factor is the
/// opposite of the first (in particular on A × A for commutative A).
pub fn swap_anti_endo(r: &Algebra, half: usize) -> Result<AntiEndo, AlgebraError> {
    assert_eq!(r.dim, 2 * half, "expected two equal-size blocks");
    let mut mat = Mat::zero(r.field, r.dim, r.dim);
    for i in 0..half {
        mat.set(half + i, i, Scalar::one(r.field));
        mat.set(i, half + i, Scalar::one(r.field));
    }
    make_anti_endo(r, mat)
}

/// The symplectic involution X ↦ J·Xᵀ·J⁻¹ on M₂ (J = [[0,1],[−1,0]]):
/// e₁₁ ↔ e₂₂, e₁₂ ↦ −e₁₂, e₂₁ ↦ −e₂₁.
pub fn symplectic_anti_endo_m2(r: &Algebra) -> AntiEndo {
    assert_eq!(r.dim, 4, "expected M₂ on the matrix-unit basis");
    let f = r.field;
    let one = Scalar::one(f);
    let minus = Scalar::from_i64(f, -1);
    let mut mat = Mat::zero(f, 4, 4);
    mat.set(3, 0, one.clone()); // e11 -> e22
    mat.set(1, 1, minus.clone()); // e12 -> -e12
    mat.set(2, 2, minus); // e21 -> -e21
    mat.set(0, 3, one); // e22 -> e11
    make_anti_endo(r, mat).expect("symplectic adjoint reverses products")
}

/// Matrix of the inner automorphism w ↦ u·w·u⁻¹.
pub fn inner_automorphism(r: &Algebra, u: &[Scalar]) -> Result<Mat, AlgebraError> {
    let uinv = r.inverse_elem(u).ok_or(AlgebraError::NotInvertible)?;
    Ok(r.lmul_mat(u).mul(&r.rmul_mat(&uinv)))
}

/// Composition φ∘α of an algebra endomorphism (matrix) with an
/// anti-endomorphism; the result is validated.
pub fn compose(r: &Algebra, phi: &Mat, alpha: &AntiEndo) -> Result<AntiEndo, AlgebraError> {
    make_anti_endo(r, phi.mul(&alpha.mat))
}

/// Outcome of the inner-equivalence test.
#[derive(Clone, Debug)]
pub enum InnerEquivalence {
    /// β = (u·_·u⁻¹) ∘ α, witnessed by the unit u.
    Equivalent { u: Elem },
    NotEquivalent,
    Inconclusive,
}

/// Decide whether β = φ∘α for some inner automorphism φ.
///
/// The condition β(w) = u·α(w)·u⁻¹ is linear in u once rewritten as
/// u·α(w) = β(w)·u, so the intertwiners form a subspace; inner equivalence
/// holds iff that subspace contains a unit, which is a span search over the
/// left-multiplication matrices.
pub fn is_inner_equivalent(
    r: &Algebra,
    alpha: &AntiEndo,
    beta: &AntiEndo,
    budget: u64,
) -> InnerEquivalence {
    let mut stacked: Option<Mat> = None;
    for i in 0..r.dim {
        let aw = alpha.apply(&r.basis_elem(i));
        let bw = beta.apply(&r.basis_elem(i));
        let diff = r.rmul_mat(&aw).sub(&r.lmul_mat(&bw));
        stacked = Some(match stacked {
            None => diff,
            Some(s) => s.vstack(&diff),
        });
    }
    let inters: Vec<Elem> = kernel_basis(&stacked.expect("dim ≥ 1"))
        .into_iter()
        .map(|v| v.col(0))
        .collect();
    if inters.is_empty() {
        return InnerEquivalence::NotEquivalent;
    }
    let lmuls: Vec<Mat> = inters.iter().map(|u| r.lmul_mat(u)).collect();
    match find_invertible_in_span(&lmuls, budget) {
        SpanSearch::Found { coeffs, .. } => {
            let mut u = r.zero_elem();
            for (c, v) in coeffs.iter().zip(inters.iter()) {
                for k in 0..r.dim {
                    u[k] = u[k].add(&c.mul(&v[k]));
                }
            }
            debug_assert!(r.is_invertible_elem(&u));
            InnerEquivalence::Equivalent { u }
        }
        SpanSearch::ProvablyNone => InnerEquivalence::NotEquivalent,
        SpanSearch::Inconclusive => InnerEquivalence::Inconclusive,
    }
}

// ---------------------------------------------------------------------------
// Backtracking enumeration of multiplicative / anti-multiplicative maps
// ---------------------------------------------------------------------------

/// A partial linear map defined on a subspace of the source algebra, kept in
/// reduced row form (each row: a domain vector with its image). Adjoining a
/// vector either extends the space, is consistent with it, or conflicts.
#[derive(Clone)]
struct PartialMap {
    dim_src: usize,
    rows: Vec<(Vec<Scalar>, Vec<Scalar>)>,
    pivots: Vec<usize>,
}

enum Adjoin {
    Extended,
    Consistent,
    Conflict,
}

impl PartialMap {
    fn new(dim_src: usize) -> PartialMap {
        PartialMap {
            dim_src,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn span_dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduce v against the rows, accumulating the image of the part that
    /// lies in the span. Returns (residual, image-of-reduced-part).
    fn reduce(&self, v: &[Scalar], field: FieldSpec, dim_dst: usize) -> (Vec<Scalar>, Vec<Scalar>) {
        let mut res = v.to_vec();
        let mut img = vec![Scalar::zero(field); dim_dst];
        for (r, &c) in self.pivots.iter().enumerate() {
            if res[c].is_zero() {
                continue;
            }
            let f = res[c].clone();
            let (brow, bimg) = &self.rows[r];
            for k in 0..self.dim_src {
                if !brow[k].is_zero() {
                    res[k] = res[k].sub(&f.mul(&brow[k]));
                }
            }
            for k in 0..dim_dst {
                if !bimg[k].is_zero() {
                    img[k] = img[k].add(&f.mul(&bimg[k]));
                }
            }
        }
        (res, img)
    }

    /// Image of v if v lies in the current span.
    fn image_of(&self, v: &[Scalar], field: FieldSpec, dim_dst: usize) -> Option<Vec<Scalar>> {
        let (res, img) = self.reduce(v, field, dim_dst);
        if res.iter().all(|s| s.is_zero()) {
            Some(img)
        } else {
            None
        }
    }

    /// Require L(v) = img; extends the domain if v is new.
    fn adjoin(&mut self, v: &[Scalar], img: &[Scalar], field: FieldSpec, dim_dst: usize) -> Adjoin {
        let (res, known) = self.reduce(v, field, dim_dst);
        let residual_img: Vec<Scalar> = img
            .iter()
            .zip(known.iter())
            .map(|(a, b)| a.sub(b))
            .collect();
        let Some(pc) = res.iter().position(|s| !s.is_zero()) else {
            return if residual_img.iter().all(|s| s.is_zero()) {
                Adjoin::Consistent
            } else {
                Adjoin::Conflict
            };
        };
        let inv = res[pc].inv().expect("leading coefficient is nonzero");
        let new_row: Vec<Scalar> = res.iter().map(|s| s.mul(&inv)).collect();
        let new_img: Vec<Scalar> = residual_img.iter().map(|s| s.mul(&inv)).collect();
        // clear the new pivot column from existing rows to keep full reduction
        for (brow, bimg) in self.rows.iter_mut() {
            if brow[pc].is_zero() {
                continue;
            }
            let f = brow[pc].clone();
            for k in 0..self.dim_src {
                if !new_row[k].is_zero() {
                    brow[k] = brow[k].sub(&f.mul(&new_row[k]));
                }
            }
            for k in 0..dim_dst {
                if !new_img[k].is_zero() {
                    bimg[k] = bimg[k].sub(&f.mul(&new_img[k]));
                }
            }
        }
        // insert keeping pivots ascending
        let at = self.pivots.iter().position(|&c| c > pc).unwrap_or(self.rows.len());
        self.rows.insert(at, (new_row, new_img));
        self.pivots.insert(at, pc);
        Adjoin::Extended
    }
}

/// Search driver shared by anti-endomorphism enumeration and algebra
/// isomorphism search. `reverse` selects whether images multiply in
/// reversed order.
struct MapSearch<'a> {
    src: &'a Algebra,
    dst: &'a Algebra,
    reverse: bool,
    budget: u64,
    work: u64,
}

impl<'a> MapSearch<'a> {
    fn new(src: &'a Algebra, dst: &'a Algebra, reverse: bool, budget: u64) -> MapSearch<'a> {
        MapSearch {
            src,
            dst,
            reverse,
            budget,
            work: 0,
        }
    }

    fn spend(&mut self, units: u64) -> Result<(), AlgebraError> {
        self.work = self.work.saturating_add(units);
        if self.work > self.budget {
            Err(AlgebraError::BudgetExceeded)
        } else {
            Ok(())
        }
    }

    fn image_product(&self, x: &[Scalar], y: &[Scalar]) -> Elem {
        if self.reverse {
            self.dst.mul(y, x)
        } else {
            self.dst.mul(x, y)
        }
    }

    /// Close the partial map under forced products. Returns false on conflict.
    fn close(&mut self, pm: &mut PartialMap) -> Result<bool, AlgebraError> {
        loop {
            let n = pm.span_dim();
            let mut grew = false;
            'pairs: for a in 0..n {
                for b in 0..n {
                    self.spend(1)?;
                    let (va, ya) = pm.rows[a].clone();
                    let (vb, yb) = pm.rows[b].clone();
                    let prod = self.src.mul(&va, &vb);
                    let img = self.image_product(&ya, &yb);
                    match pm.adjoin(&prod, &img, self.src.field, self.dst.dim) {
                        Adjoin::Conflict => return Ok(false),
                        Adjoin::Extended => {
                            grew = true;
                            break 'pairs;
                        }
                        Adjoin::Consistent => {}
                    }
                }
            }
            if !grew {
                return Ok(true);
            }
        }
    }

    /// Decompose v over span(domain) ⊕ F·e_t. The reduction of e_t has the
    /// form e_t = s + ℓ·r̂ with s in the domain, L(s) = μ, and r̂ the unit
    /// residual direction (leading coefficient 1 at `unit_pivot`). If v's
    /// residual is c·r̂ then v = u + γ·e_t with γ = c/ℓ and
    /// L(u) = (image of v's span part) − γ·μ. Returns (γ, L(u)), or None
    /// when v leaves span ⊕ F·e_t.
    fn split_against(
        &self,
        pm: &PartialMap,
        v: &[Scalar],
        unit_res: &[Scalar],
        unit_pivot: usize,
        lead_inv: &Scalar,
        span_img: &[Scalar],
    ) -> Option<(Scalar, Vec<Scalar>)> {
        let (res, img) = pm.reduce(v, self.src.field, self.dst.dim);
        let c = res[unit_pivot].clone();
        for k in 0..self.src.dim {
            if res[k] != c.mul(&unit_res[k]) {
                return None;
            }
        }
        let gamma = c.mul(lead_inv);
        let rhs = img
            .iter()
            .zip(span_img.iter())
            .map(|(a, b)| a.sub(&gamma.mul(b)))
            .collect();
        Some((gamma, rhs))
    }

    /// Enumerate extensions of `pm` to total maps; on each, call `emit`.
    /// `emit` returns true to stop the whole search early.
    fn dfs(
        &mut self,
        pm: PartialMap,
        next: usize,
        emit: &mut dyn FnMut(&PartialMap) -> bool,
    ) -> Result<bool, AlgebraError> {
        let field = self.src.field;
        let d = self.src.dim;
        let mut t = next;
        while t < d {
            let e = self.src.basis_elem(t);
            if pm.image_of(&e, field, self.dst.dim).is_some() {
                t += 1;
                continue;
            }
            break;
        }
        if t == d {
            return Ok(emit(&pm));
        }

        // decision point: choose the image X of basis element t.
        // Reduce e_t: e_t = s + ℓ·r̂ with L(s) = span_img.
        let e = self.src.basis_elem(t);
        let (mut unit_res, span_img) = pm.reduce(&e, field, self.dst.dim);
        let unit_pivot = unit_res
            .iter()
            .position(|s| !s.is_zero())
            .expect("e_t is outside the current span");
        let lead_inv = unit_res[unit_pivot]
            .inv()
            .expect("leading coefficient is nonzero");
        for s in unit_res.iter_mut() {
            *s = s.mul(&lead_inv);
        }

        // collect constraints linear in X: for every domain row v with image
        // y, products v·e_t and e_t·v that stay inside span ⊕ F·e_t force
        //   reverse:  X·y − c·X = img   resp.   y·X − c·X = img
        //   straight: y·X − c·X = img   resp.   X·y − c·X = img
        let mut sys_rows: Option<Mat> = None;
        let mut rhs_rows: Option<Mat> = None;
        let push = |lhs: Mat, rhs: Vec<Scalar>, sys: &mut Option<Mat>, r: &mut Option<Mat>| {
            let rhs_m = Mat::col_vec(field, &rhs);
            *sys = Some(match sys.take() {
                None => lhs,
                Some(s) => s.vstack(&lhs),
            });
            *r = Some(match r.take() {
                None => rhs_m,
                Some(s) => s.vstack(&rhs_m),
            });
        };
        for idx in 0..pm.span_dim() {
            let (v, y) = pm.rows[idx].clone();
            let right_prod = self.src.mul(&v, &e); // v·e_t
            if let Some((c, img)) =
                self.split_against(&pm, &right_prod, &unit_res, unit_pivot, &lead_inv, &span_img)
            {
                // L(v·e_t) = img + c·X must equal X·y (reverse) / y·X (straight)
                let mult = if self.reverse {
                    self.dst.rmul_mat(&y)
                } else {
                    self.dst.lmul_mat(&y)
                };
                let lhs = mult.sub(&Mat::identity(field, self.dst.dim).scale(&c));
                push(lhs, img, &mut sys_rows, &mut rhs_rows);
            }
            let left_prod = self.src.mul(&e, &v); // e_t·v
            if let Some((c, img)) =
                self.split_against(&pm, &left_prod, &unit_res, unit_pivot, &lead_inv, &span_img)
            {
                let mult = if self.reverse {
                    self.dst.lmul_mat(&y)
                } else {
                    self.dst.rmul_mat(&y)
                };
                let lhs = mult.sub(&Mat::identity(field, self.dst.dim).scale(&c));
                push(lhs, img, &mut sys_rows, &mut rhs_rows);
            }
        }

        // affine candidate space X = x0 + span(kernel)
        let (x0, kernel): (Vec<Scalar>, Vec<Vec<Scalar>>) = match (sys_rows, rhs_rows) {
            (Some(sys), Some(rhs)) => {
                let Some(part) = solve(&sys, &rhs) else {
                    return Ok(false); // no candidate image at all
                };
                let ker = kernel_basis(&sys).into_iter().map(|k| k.col(0)).collect();
                (part.col(0), ker)
            }
            _ => {
                // no constraints: the whole target space
                let ker = (0..self.dst.dim)
                    .map(|i| {
                        let mut v = vec![Scalar::zero(field); self.dst.dim];
                        v[i] = Scalar::one(field);
                        v
                    })
                    .collect();
                (vec![Scalar::zero(field); self.dst.dim], ker)
            }
        };

        let k = kernel.len();
        let p = match field.order() {
            Some(p) => p,
            None => {
                if k == 0 {
                    1 // single candidate: still enumerable over ℚ
                } else {
                    return Err(AlgebraError::BudgetExceeded); // infinite candidate space
                }
            }
        };
        let mut count: u64 = 1;
        for _ in 0..k {
            count = count
                .checked_mul(p)
                .ok_or(AlgebraError::BudgetExceeded)?;
            if count > self.budget {
                return Err(AlgebraError::BudgetExceeded);
            }
        }
        self.spend(count)?;

        let mut digits = vec![0u64; k];
        loop {
            // X = x0 + Σ digits[i]·kernel[i]
            let mut x = x0.clone();
            for (i, &dgt) in digits.iter().enumerate() {
                if dgt != 0 {
                    let c = Scalar::from_i64(field, dgt as i64);
                    for j in 0..self.dst.dim {
                        x[j] = x[j].add(&c.mul(&kernel[i][j]));
                    }
                }
            }
            let mut child = pm.clone();
            if matches!(child.adjoin(&e, &x, field, self.dst.dim), Adjoin::Extended)
                && self.close(&mut child)?
                && self.dfs(child, t + 1, emit)?
            {
                return Ok(true);
            }
            // advance mixed-radix counter
            let mut i = 0;
            loop {
                if i == k {
                    return Ok(false);
                }
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }

    fn run(&mut self, mut emit: impl FnMut(&PartialMap) -> bool) -> Result<(), AlgebraError> {
        let mut pm = PartialMap::new(self.src.dim);
        match pm.adjoin(
            &self.src.unity,
            &self.dst.unity,
            self.src.field,
            self.dst.dim,
        ) {
            Adjoin::Extended => {}
            _ => return Ok(()), // degenerate; unity is never zero in a unital algebra
        }
        if !self.close(&mut pm)? {
            return Ok(());
        }
        self.dfs(pm, 0, &mut emit)?;
        Ok(())
    }
}

/// Enumerate all anti-endomorphisms of R (a finite list over a prime field).
///
/// Backtracks over the images of basis elements in order; at each choice
/// point all constraints linear in the unknown image are solved first and
/// only the resulting affine space is enumerated, with multiplicative
/// closure pruning after each tentative assignment. Output is sorted
/// entry-lexicographically, so it is deterministic.
pub fn enumerate_anti_endos(r: &Algebra, budget: u64) -> Result<Vec<AntiEndo>, AlgebraError> {
    let mut found: Vec<Mat> = Vec::new();
    let mut search = MapSearch::new(r, r, true, budget);
    search.run(|pm| {
        found.push(search_matrix(r, pm));
        false
    })?;
    found.sort_by(|a, b| a.lex_cmp(b));
    found
        .into_iter()
        .map(|m| make_anti_endo(r, m))
        .collect::<Result<Vec<_>, _>>()
}

// free helper so the closure in enumerate_anti_endos can't alias `search`
fn search_matrix(r: &Algebra, pm: &PartialMap) -> Mat {
    let cols = (0..r.dim)
        .map(|i| {
            pm.image_of(&r.basis_elem(i), r.field, r.dim)
                .expect("map is total")
        })
        .collect();
    Mat::from_cols(r.field, cols)
}

/// Bijective anti-endomorphisms only.
pub fn enumerate_anti_autos(r: &Algebra, budget: u64) -> Result<Vec<AntiEndo>, AlgebraError> {
    Ok(enumerate_anti_endos(r, budget)?
        .into_iter()
        .filter(|a| a.bijective)
        .collect())
}

/// Find a unital algebra isomorphism A → B, optionally required to intertwine
/// a given pair of anti-endomorphisms (M·α_A = α_B·M). Returns the first hit
/// in deterministic search order, or `None` when the exhausted search proves
/// there is none.
pub fn find_algebra_iso(
    a: &Algebra,
    b: &Algebra,
    intertwine: Option<(&AntiEndo, &AntiEndo)>,
    budget: u64,
) -> Result<Option<Mat>, AlgebraError> {
    if a.dim != b.dim {
        return Ok(None);
    }
    let mut hit: Option<Mat> = None;
    let mut search = MapSearch::new(a, b, false, budget);
    search.run(|pm| {
        let m = search_matrix_rect(a, b, pm);
        if m.invert().is_none() {
            return false;
        }
        if let Some((alpha, beta)) = intertwine {
            if m.mul(&alpha.mat) != beta.mat.mul(&m) {
                return false;
            }
        }
        hit = Some(m);
        true
    })?;
    Ok(hit)
}

fn search_matrix_rect(a: &Algebra, b: &Algebra, pm: &PartialMap) -> Mat {
    let cols = (0..a.dim)
        .map(|i| {
            pm.image_of(&a.basis_elem(i), a.field, b.dim)
                .expect("map is total")
        })
        .collect();
    Mat::from_cols(a.field, cols)
}

/// Find an anti-isomorphism A → B (equivalently, an isomorphism A → B^op).
pub fn find_algebra_anti_iso(
    a: &Algebra,
    b: &Algebra,
    budget: u64,
) -> Result<Option<Mat>, AlgebraError> {
    find_algebra_iso(a, &opposite_algebra(b), None, budget)
}

/// Basis of the Jacobson radical.
///
/// In characteristic zero — and over 𝔽_p whenever p exceeds the dimension —
/// the radical is the kernel of the trace form (x, y) ↦ Tr(L_{xy}). For
/// small p that kernel only bounds the radical from above (the trace form of
/// M₂(𝔽₂) vanishes identically), so the subspace is refined with the lifted
/// trace functionals
///
///   T_k(z) = Tr(lift(L_z)^(p^k)) / p^k   (mod p),
///
/// computed on integer lifts: at stage k the space shrinks to
/// {x : T_k(x·y) = 0 for all y in the current space}, and after the stage
/// with p^k ≥ dim what remains is exactly the radical. Each T_k is linear on
/// the space it refines because the base field is prime, so every stage is
/// one kernel computation.
pub fn radical_basis(a: &Algebra) -> Vec<Vec<Scalar>> {
    let f = a.field;
    // Tr(L_z) as an exact scalar, for the functional at stage 0 and the
    // characteristic-zero trace form alike.
    let plain_trace = |z: &[Scalar]| -> Scalar {
        let mut t = Scalar::zero(f);
        for b in 0..a.dim {
            t = t.add(&a.mul(z, &a.basis_elem(b))[b]);
        }
        t
    };
    let shrink = |basis: &[Vec<Scalar>], func: &dyn Fn(&[Scalar]) -> Scalar| -> Vec<Vec<Scalar>> {
        // kernel of (x, y) ↦ func(x·y) restricted to the span of `basis`
        let cols = basis
            .iter()
            .map(|x| basis.iter().map(|y| func(&a.mul(x, y))).collect())
            .collect();
        kernel_basis(&Mat::from_cols(f, cols))
            .into_iter()
            .map(|c| {
                let coeffs = c.col(0);
                let mut v = vec![Scalar::zero(f); a.dim];
                for (w, bas) in coeffs.iter().zip(basis.iter()) {
                    for (acc, e) in v.iter_mut().zip(bas.iter()) {
                        *acc = acc.add(&w.mul(e));
                    }
                }
                v
            })
            .collect()
    };
    let basis: Vec<Vec<Scalar>> = (0..a.dim).map(|i| a.basis_elem(i)).collect();
    let small_p = match f {
        FieldSpec::Rationals => None,
        FieldSpec::Prime(p) => (p <= a.dim as u64).then_some(p),
    };
    let Some(p) = small_p else {
        return shrink(&basis, &plain_trace);
    };
    use num::BigInt;
    let lifted_trace = |z: &[Scalar], k: u32| -> Scalar {
        let l = a.lmul_mat(z);
        let lift: Vec<Vec<BigInt>> = (0..a.dim)
            .map(|i| {
                (0..a.dim)
                    .map(|j| match l.at(i, j) {
                        Scalar::Mod { v, .. } => BigInt::from(*v),
                        Scalar::Rat(_) => unreachable!("small-p branch"),
                    })
                    .collect()
            })
            .collect();
        let mul = |x: &[Vec<BigInt>], y: &[Vec<BigInt>]| -> Vec<Vec<BigInt>> {
            (0..a.dim)
                .map(|i| {
                    (0..a.dim)
                        .map(|j| (0..a.dim).map(|t| &x[i][t] * &y[t][j]).sum())
                        .collect()
                })
                .collect()
        };
        let mut acc: Option<Vec<Vec<BigInt>>> = None;
        let mut sq = lift;
        let mut e = p.pow(k);
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match &acc {
                    None => sq.clone(),
                    Some(m) => mul(m, &sq),
                });
            }
            e >>= 1;
            if e > 0 {
                sq = mul(&sq, &sq);
            }
        }
        let m = acc.expect("p^k ≥ 1");
        let trace: BigInt = (0..a.dim).map(|i| m[i][i].clone()).sum();
        let (q, r) = num::Integer::div_rem(&trace, &BigInt::from(p).pow(k));
        assert!(num::Zero::is_zero(&r), "lifted trace must divide by p^k");
        let residue = num::Integer::mod_floor(&q, &BigInt::from(p));
        let digits = residue.to_u64_digits().1;
        Scalar::from_i64(f, *digits.first().unwrap_or(&0) as i64)
    };
    let mut basis = basis;
    let mut k = 0u32;
    loop {
        if basis.is_empty() {
            return basis;
        }
        basis = shrink(&basis, &|z| lifted_trace(z, k));
        if p.pow(k) >= a.dim as u64 {
            return basis;
        }
        k += 1;
    }
}

/// Whether the algebra has zero radical.
pub fn is_semisimple(a: &Algebra) -> bool {
    radical_basis(a).is_empty()
}
