//! Right modules over a structure-constant algebra, given by one action
//! matrix per algebra basis element.
//!
//! Convention, fixed once: module coordinates are column vectors, and the
//! action of the basis element e_i is x·e_i = A_i·x. Because the action is
//! on the right, A is *contravariant*: A(e_i·e_j) = A_j·A_i, and A(1) = I.
//! The validator enforces both, so a module that confuses left and right
//! actions is rejected at construction.

use crate::algebra::{Algebra, AntiEndo};
use crate::scalars::{
    find_invertible_in_span, kernel_basis, solve, FieldSpec, Mat, Scalar, SpanSearch,
};
use thiserror::Error;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum ModError {
    #[error("action is not contravariant at basis pair ({0}, {1})")]
    ActionContravariance(usize, usize),
    #[error("unity does not act as the identity")]
    ActionUnity,
    #[error("action matrix {0} has the wrong shape")]
    ActionShape(usize),
    #[error("modules are over different algebras")]
    AlgebraMismatch,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("matrix is not a module homomorphism at basis index {0}")]
    NotLinear(usize),
    #[error("representation is not an algebra map at basis pair ({0}, {1})")]
    RepNotMultiplicative(usize, usize),
    #[error("representation is not injective")]
    RepNotInjective,
}

/// A right module: one action matrix per algebra basis element, column
/// coordinates, x·e_i = A_i·x.
#[derive(Clone, Debug, PartialEq)]
pub struct RightModule {
    pub algebra: Algebra,
    pub dim: usize,
    pub actions: Vec<Mat>,
}

impl RightModule {
    /// Action matrix of an arbitrary algebra element, A(Σ c_i e_i) = Σ c_i A_i.
    pub fn action_of(&self, r: &[Scalar]) -> Mat {
        assert_eq!(r.len(), self.algebra.dim, "element dimension mismatch");
        let mut out = Mat::zero(self.algebra.field, self.dim, self.dim);
        for (c, a) in r.iter().zip(self.actions.iter()) {
            if !c.is_zero() {
                out = out.add(&a.scale(c));
            }
        }
        out
    }

    pub fn zero_vec(&self) -> Vec<Scalar> {
        vec![Scalar::zero(self.algebra.field); self.dim]
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Scalar> {
        let mut v = self.zero_vec();
        v[i] = Scalar::one(self.algebra.field);
        v
    }
}

/// Validate action matrices as a right-module structure.
pub fn make_module(r: &Algebra, actions: Vec<Mat>) -> Result<RightModule, ModError> {
    assert_eq!(actions.len(), r.dim, "one action matrix per basis element");
    let dim = if actions.is_empty() { 0 } else { actions[0].rows };
    for (i, a) in actions.iter().enumerate() {
        if a.rows != dim || a.cols != dim || a.field != r.field {
            return Err(ModError::ActionShape(i));
        }
    }
    let m = RightModule {
        algebra: r.clone(),
        dim,
        actions,
    };
    if !m.action_of(&r.unity).is_identity() {
        return Err(ModError::ActionUnity);
    }
    for i in 0..r.dim {
        for j in 0..r.dim {
            let prod = r.mul(&r.basis_elem(i), &r.basis_elem(j));
            let lhs = m.action_of(&prod);
            let rhs = m.actions[j].mul(&m.actions[i]);
            if lhs != rhs {
                return Err(ModError::ActionContravariance(i, j));
            }
        }
    }
    Ok(m)
}

/// R acting on itself on the right: A_i = right-multiplication by e_i.
pub fn regular_module(r: &Algebra) -> RightModule {
    let actions = (0..r.dim).map(|i| r.rmul_mat(&r.basis_elem(i))).collect();
    make_module(r, actions).expect("right multiplication is a right action")
}

/// The n-dimensional natural module over a matrix algebra built by
/// [`crate::algebra::matrix_algebra`]: row vectors under x·A, stored in
/// column coordinates (so e_{ab} acts by the matrix unit e_{ba}).
pub fn natural_module(r: &Algebra, n: usize) -> RightModule {
    assert_eq!(r.dim, n * n, "expected the matrix-unit basis of M_n");
    let f = r.field;
    let actions = (0..n * n)
        .map(|idx| {
            let (a, b) = (idx / n, idx % n);
            let mut m = Mat::zero(f, n, n);
            m.set(b, a, Scalar::one(f));
            m
        })
        .collect();
    make_module(r, actions).expect("the row-vector action is a right action")
}

/// Reduced-row basis (sorted by pivot) of the smallest subspace containing
/// `vectors` and closed under every matrix in `actions`.
pub(crate) fn closed_span(actions: &[&Mat], vectors: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let add = |v: &[Scalar], rows: &mut Vec<Vec<Scalar>>| -> bool {
        // reduce against current rref rows (each normalized, leading 1)
        let mut res = v.to_vec();
        for row in rows.iter() {
            let p = row.iter().position(|s| s.is_one()).expect("normalized row");
            if !res[p].is_zero() {
                let c = res[p].clone();
                for k in 0..res.len() {
                    res[k] = res[k].sub(&c.mul(&row[k]));
                }
            }
        }
        let Some(p) = res.iter().position(|s| !s.is_zero()) else {
            return false;
        };
        let inv = res[p].inv().expect("nonzero");
        let newrow: Vec<Scalar> = res.iter().map(|s| s.mul(&inv)).collect();
        for row in rows.iter_mut() {
            if !row[p].is_zero() {
                let c = row[p].clone();
                for k in 0..row.len() {
                    row[k] = row[k].sub(&c.mul(&newrow[k]));
                }
            }
        }
        rows.push(newrow);
        true
    };
    for v in vectors {
        add(v, &mut rows);
    }
    loop {
        let snapshot = rows.clone();
        let mut grew = false;
        for v in &snapshot {
            for a in actions {
                if add(&a.apply(v), &mut rows) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    // deterministic basis order: sort by pivot position
    rows.sort_by_key(|row| row.iter().position(|s| s.is_one()).unwrap());
    rows
}

/// The submodule generated by the given vectors: closes the span under all
/// actions, then induces the action matrices on a reduced basis. Also
/// returns the inclusion matrix (parent.dim × sub.dim).
pub fn submodule_closure(
    parent: &RightModule,
    vectors: &[Vec<Scalar>],
) -> (RightModule, Mat) {
    let f = parent.algebra.field;
    let action_refs: Vec<&Mat> = parent.actions.iter().collect();
    let rows = closed_span(&action_refs, vectors);
    let inclusion = Mat::from_cols(f, rows.clone());
    let sub_dim = rows.len();
    let actions = parent
        .actions
        .iter()
        .map(|a| {
            let cols = rows
                .iter()
                .map(|v| {
                    let img = Mat::col_vec(f, &a.apply(v));
                    solve(&inclusion, &img)
                        .expect("span is closed under the action")
                        .col(0)
                })
                .collect();
            Mat::from_cols(f, cols)
        })
        .collect::<Vec<_>>();
    let sub = make_module(&parent.algebra, actions).expect("induced action is a right action");
    assert_eq!(sub.dim, sub_dim);
    (sub, inclusion)
}

/// The quotient of a module by the submodule generated by the given
/// vectors. Returns the quotient module and the projection matrix.
pub fn quotient_module(parent: &RightModule, vectors: &[Vec<Scalar>]) -> (RightModule, Mat) {
    let (sub, inclusion) = submodule_closure(parent, vectors);
    let rel_rows = if sub.dim == 0 {
        Mat::zero(parent.algebra.field, 1, parent.dim)
    } else {
        inclusion.transpose()
    };
    let q = crate::scalars::Quotient::from_relations(&rel_rows);
    let proj = q.projection_matrix();
    let sect = q.section_matrix();
    let actions = parent
        .actions
        .iter()
        .map(|a| proj.mul(a).mul(&sect))
        .collect();
    let m = make_module(&parent.algebra, actions)
        .expect("the induced action on a quotient by a submodule is a right action");
    (m, proj)
}

/// A module homomorphism M → N: matrix with B_i·H = H·A_i for all i.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleHom {
    pub source: RightModule,
    pub target: RightModule,
    pub matrix: Mat,
}

/// Validate a matrix as a module homomorphism.
pub fn make_hom(m: &RightModule, n: &RightModule, matrix: Mat) -> Result<ModuleHom, ModError> {
    if m.algebra != n.algebra {
        return Err(ModError::AlgebraMismatch);
    }
    if matrix.rows != n.dim || matrix.cols != m.dim {
        return Err(ModError::DimensionMismatch);
    }
    for i in 0..m.algebra.dim {
        if n.actions[i].mul(&matrix) != matrix.mul(&m.actions[i]) {
            return Err(ModError::NotLinear(i));
        }
    }
    Ok(ModuleHom {
        source: m.clone(),
        target: n.clone(),
        matrix,
    })
}

/// Basis of Hom_R(M, N): kernel of the stacked systems B_i·H − H·A_i = 0,
/// with H vectorized row-major. Deterministic order (ascending free column
/// of the kernel computation).
pub fn hom_space(m: &RightModule, n: &RightModule) -> Result<Vec<ModuleHom>, ModError> {
    if m.algebra != n.algebra {
        return Err(ModError::AlgebraMismatch);
    }
    let f = m.algebra.field;
    let idn = Mat::identity(f, n.dim);
    let idm = Mat::identity(f, m.dim);
    let mut stacked: Option<Mat> = None;
    for i in 0..m.algebra.dim {
        // row-major vec: vec(B·H) = (B ⊗ I)·vec(H), vec(H·A) = (I ⊗ Aᵀ)·vec(H)
        let block = n.actions[i]
            .kron(&idm)
            .sub(&idn.kron(&m.actions[i].transpose()));
        stacked = Some(match stacked {
            None => block,
            Some(s) => s.vstack(&block),
        });
    }
    let sys = stacked.expect("algebra has dim ≥ 1");
    let homs = kernel_basis(&sys)
        .into_iter()
        .map(|v| {
            let vv = v.col(0);
            let matrix = Mat::from_fn(f, n.dim, m.dim, |i, j| vv[i * m.dim + j].clone());
            make_hom(m, n, matrix).expect("kernel vectors satisfy the linearity system")
        })
        .collect();
    Ok(homs)
}

/// The endomorphism algebra W = End_R(M), acting on M on the left.
#[derive(Clone, Debug)]
pub struct EndoAlgebra {
    pub w: Algebra,
    /// rep[i] realizes the i-th W-basis element as a matrix on M;
    /// rep(w·w′) = rep(w)·rep(w′) (left composition).
    pub rep: Vec<Mat>,
}

impl EndoAlgebra {
    /// Matrix of an arbitrary W-element acting on M.
    pub fn rep_of(&self, w: &[Scalar]) -> Mat {
        assert_eq!(w.len(), self.w.dim, "element dimension mismatch");
        let mdim = self.rep[0].rows;
        let mut out = Mat::zero(self.w.field, mdim, mdim);
        for (c, m) in w.iter().zip(self.rep.iter()) {
            if !c.is_zero() {
                out = out.add(&m.scale(c));
            }
        }
        out
    }

    /// Coordinates of a matrix in the rep basis, if it lies in the span.
    pub fn coords_of(&self, m: &Mat) -> Option<Vec<Scalar>> {
        let f = self.w.field;
        let cols = self
            .rep
            .iter()
            .map(flatten)
            .collect::<Vec<_>>();
        let span = Mat::from_cols(f, cols);
        let target = Mat::col_vec(f, &flatten(m));
        solve(&span, &target).map(|s| s.col(0))
    }
}

/// Coordinates of `target` in the linear span of `basis` (matrices compared
/// entrywise), or None if it lies outside the span.
pub(crate) fn span_coords(field: FieldSpec, basis: &[Mat], target: &Mat) -> Option<Vec<Scalar>> {
    if basis.is_empty() {
        return target.is_zero().then(Vec::new);
    }
    let cols = basis.iter().map(flatten).collect::<Vec<_>>();
    let span = Mat::from_cols(field, cols);
    let tgt = Mat::col_vec(field, &flatten(target));
    solve(&span, &tgt).map(|s| s.col(0))
}

fn flatten(m: &Mat) -> Vec<Scalar> {
    let mut v = Vec::with_capacity(m.rows * m.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            v.push(m.at(i, j).clone());
        }
    }
    v
}

/// Validate a proposed endomorphism algebra for M: rep must be an injective
/// algebra map into matrices commuting with the module action.
pub fn make_endo_algebra(
    m: &RightModule,
    w: Algebra,
    rep: Vec<Mat>,
) -> Result<EndoAlgebra, ModError> {
    assert_eq!(rep.len(), w.dim, "one matrix per W-basis element");
    let f = w.field;
    for (i, mat) in rep.iter().enumerate() {
        if mat.rows != m.dim || mat.cols != m.dim || mat.field != f {
            return Err(ModError::ActionShape(i));
        }
        for a in &m.actions {
            if a.mul(mat) != mat.mul(a) {
                return Err(ModError::NotLinear(i));
            }
        }
    }
    let ea = EndoAlgebra { w, rep };
    for i in 0..ea.w.dim {
        for j in 0..ea.w.dim {
            let prod = ea.w.mul(&ea.w.basis_elem(i), &ea.w.basis_elem(j));
            if ea.rep_of(&prod) != ea.rep[i].mul(&ea.rep[j]) {
                return Err(ModError::RepNotMultiplicative(i, j));
            }
        }
    }
    let cols = ea.rep.iter().map(flatten).collect::<Vec<_>>();
    if Mat::from_cols(f, cols).rank() != ea.w.dim {
        return Err(ModError::RepNotInjective);
    }
    if !ea.rep_of(&ea.w.unity).is_identity() {
        return Err(ModError::ActionUnity);
    }
    Ok(ea)
}

/// Compute W = End_R(M) from the Hom-space basis: structure constants by
/// composing basis endomorphisms and re-expressing in the basis.
pub fn endo_algebra(m: &RightModule) -> EndoAlgebra {
    let f = m.algebra.field;
    let homs = hom_space(m, m).expect("same module on both sides");
    let rep: Vec<Mat> = homs.into_iter().map(|h| h.matrix).collect();
    let w = rep.len();
    let span = Mat::from_cols(f, rep.iter().map(flatten).collect());
    let mut sc = vec![Scalar::zero(f); w * w * w];
    for a in 0..w {
        for b in 0..w {
            let prod = rep[a].mul(&rep[b]);
            let coords = solve(&span, &Mat::col_vec(f, &flatten(&prod)))
                .expect("endomorphisms are closed under composition")
                .col(0);
            for (k, c) in coords.into_iter().enumerate() {
                sc[(a * w + b) * w + k] = c;
            }
        }
    }
    let unity = solve(&span, &Mat::col_vec(f, &flatten(&Mat::identity(f, m.dim))))
        .expect("the identity is an endomorphism")
        .col(0);
    let alg = crate::algebra::make_algebra(f, w, sc, unity)
        .expect("composition of endomorphisms is associative and unital");
    make_endo_algebra(m, alg, rep).expect("the Hom-space basis represents itself")
}

/// Is M a generator: does the combined image of Hom(M, R_R) span R?
/// (The span of those images is the trace ideal, and M is a generator
/// exactly when the trace ideal is all of R.)
pub fn is_generator(m: &RightModule) -> bool {
    let reg = regular_module(&m.algebra);
    let homs = hom_space(m, &reg).expect("same algebra by construction");
    if homs.is_empty() {
        return false;
    }
    let stacked = homs
        .iter()
        .map(|h| h.matrix.clone())
        .reduce(|a, b| a.hstack(&b))
        .expect("nonempty");
    stacked.rank() == m.algebra.dim
}

/// Is M finitely generated projective: does the presentation
/// π: R^(dim M) → M, (r_j) ↦ Σ e_j·r_j admit a splitting s with π∘s = id?
pub fn is_fg_projective(m: &RightModule) -> bool {
    let f = m.algebra.field;
    let d = m.algebra.dim;
    let reg = regular_module(&m.algebra);
    let mut free = reg.clone();
    for _ in 1..m.dim.max(1) {
        free = direct_sum(&free, &reg).expect("same algebra");
    }
    if m.dim == 0 {
        return true;
    }
    // π maps block j (the j-th free coordinate r) to (basis_j)·r
    let mut blocks: Vec<Mat> = Vec::new();
    for j in 0..m.dim {
        let cols = (0..d)
            .map(|s| m.actions[s].apply(&m.basis_vec(j)))
            .collect();
        blocks.push(Mat::from_cols(f, cols));
    }
    let pi = blocks
        .into_iter()
        .reduce(|a, b| a.hstack(&b))
        .expect("dim ≥ 1");
    let pi = make_hom(&free, m, pi).expect("π is right-linear");
    // look for s in the Hom(M, free) span with π∘s = id: linear in the
    // coefficients of the hom basis
    let homs = hom_space(m, &free).expect("same algebra");
    if homs.is_empty() {
        return false;
    }
    let cols = homs
        .iter()
        .map(|h| flatten(&pi.matrix.mul(&h.matrix)))
        .collect();
    let span = Mat::from_cols(f, cols);
    let target = Mat::col_vec(f, &flatten(&Mat::identity(f, m.dim)));
    solve(&span, &target).is_some()
}

/// Block-diagonal direct sum of two modules over the same algebra.
pub fn direct_sum(m: &RightModule, n: &RightModule) -> Result<RightModule, ModError> {
    if m.algebra != n.algebra {
        return Err(ModError::AlgebraMismatch);
    }
    let actions = m
        .actions
        .iter()
        .zip(n.actions.iter())
        .map(|(a, b)| Mat::block_diag(&[a, b]))
        .collect();
    make_module(&m.algebra, actions)
}

/// The twisted module M^α: M as a right W-module with x∘w = α(w)·x, where
/// W = End_R(M) acts through its representation.
pub fn twist(m: &RightModule, w: &EndoAlgebra, alpha: &AntiEndo) -> Result<RightModule, ModError> {
    if alpha.mat.rows != w.w.dim {
        return Err(ModError::DimensionMismatch);
    }
    assert_eq!(w.rep[0].rows, m.dim, "endomorphisms must act on M");
    let actions = (0..w.w.dim)
        .map(|i| w.rep_of(&alpha.apply(&w.w.basis_elem(i))))
        .collect();
    // x∘(vw) = α(vw)x = α(w)α(v)x = (x∘v)∘w: contravariance holds by
    // construction, but run the validator anyway
    make_module(&w.w, actions)
}

/// Module isomorphism testing: search for an invertible element in the span
/// of Hom(M, N). `Found` carries the isomorphism matrix.
pub fn is_module_isomorphic(m: &RightModule, n: &RightModule, budget: u64) -> SpanSearch {
    assert_eq!(m.algebra, n.algebra, "modules must share the algebra");
    if m.dim != n.dim {
        return SpanSearch::ProvablyNone;
    }
    if m.dim == 0 {
        return SpanSearch::Found {
            element: Mat::zero(m.algebra.field, 0, 0),
            coeffs: Vec::new(),
        };
    }
    let homs = hom_space(m, n).expect("same algebra");
    let mats: Vec<Mat> = homs.into_iter().map(|h| h.matrix).collect();
    find_invertible_in_span(&mats, budget)
}
