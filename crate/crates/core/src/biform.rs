//! Bilinear forms on a right module with values in a double module.
//!
//! A form b: M × M → K must interact with the algebra through both of K's
//! actions: acting on the first argument surfaces as ∘₀, on the second as
//! ∘₁. Both laws are validated eagerly at construction, because everything
//! downstream — adjoints, regularity, the induced reversal of End(M) —
//! assumes them.

use crate::algebra::{make_anti_endo, AntiEndo};
use crate::dblmod::{
    dual, dual_map, make_dbl_anti_auto, make_double, u_theta, DblAntiAuto, DoubleModule,
    DualModule,
};
use crate::modrep::{
    direct_sum, make_hom, make_module, regular_module, span_coords, EndoAlgebra, ModuleHom,
    RightModule,
};
use crate::scalars::{kernel_basis, solve, FieldSpec, Mat, Scalar};
use thiserror::Error;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum FormError {
    #[error("form is incompatible with the side-{side} action at basis ({s}, {i}, {j})")]
    CompatibilityViolation {
        side: usize,
        s: usize,
        i: usize,
        j: usize,
    },
    #[error("gram tensor has the wrong shape")]
    DimensionMismatch,
    #[error("module and codomain live over different algebras")]
    AlgebraMismatch,
    #[error("form is not right regular")]
    NotRightRegular,
    #[error("form is not left regular")]
    NotLeftRegular,
    #[error("forms have different codomains")]
    CodomainMismatch,
}

/// A bilinear form, stored by its Gram tensor: `gram[i][j]` holds the
/// codomain coordinates of the pairing of the i-th and j-th basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearForm {
    pub module: RightModule,
    pub codomain: DoubleModule,
    gram: Vec<Vec<Vec<Scalar>>>,
}

impl BilinearForm {
    /// Codomain coordinates of the pairing of two basis vectors.
    pub fn value(&self, i: usize, j: usize) -> &[Scalar] {
        &self.gram[i][j]
    }

    /// The pairing of two arbitrary coordinate vectors.
    pub fn eval(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.module.dim, "first argument dimension");
        assert_eq!(y.len(), self.module.dim, "second argument dimension");
        let f = self.module.algebra.field;
        let mut out = vec![Scalar::zero(f); self.codomain.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi.mul(yj);
                for (o, g) in out.iter_mut().zip(self.gram[i][j].iter()) {
                    *o = o.add(&c.mul(g));
                }
            }
        }
        out
    }
}

fn combine(field: FieldSpec, vecs: &[&[Scalar]], weights: &[Scalar], dim: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(field); dim];
    for (w, v) in weights.iter().zip(vecs.iter()) {
        if w.is_zero() {
            continue;
        }
        for (o, e) in out.iter_mut().zip(v.iter()) {
            *o = o.add(&w.mul(e));
        }
    }
    out
}

/// Validates both compatibility laws on all basis triples.
pub fn make_form(
    m: &RightModule,
    k: &DoubleModule,
    gram: Vec<Vec<Vec<Scalar>>>,
) -> Result<BilinearForm, FormError> {
    if m.algebra != k.algebra {
        return Err(FormError::AlgebraMismatch);
    }
    if gram.len() != m.dim
        || gram
            .iter()
            .any(|row| row.len() != m.dim || row.iter().any(|v| v.len() != k.dim))
    {
        return Err(FormError::DimensionMismatch);
    }
    let f = m.algebra.field;
    for s in 0..m.algebra.dim {
        let act = &m.actions[s];
        for i in 0..m.dim {
            for j in 0..m.dim {
                // pairing with the s-action on the first argument must
                // match the ∘₀ action on the value
                let moved = {
                    let col = act.col(i);
                    let rows: Vec<&[Scalar]> =
                        (0..m.dim).map(|t| gram[t][j].as_slice()).collect();
                    combine(f, &rows, &col, k.dim)
                };
                if moved != k.actions0[s].apply(&gram[i][j]) {
                    return Err(FormError::CompatibilityViolation { side: 0, s, i, j });
                }
                // and on the second argument, the ∘₁ action
                let moved = {
                    let col = act.col(j);
                    let rows: Vec<&[Scalar]> =
                        (0..m.dim).map(|t| gram[i][t].as_slice()).collect();
                    combine(f, &rows, &col, k.dim)
                };
                if moved != k.actions1[s].apply(&gram[i][j]) {
                    return Err(FormError::CompatibilityViolation { side: 1, s, i, j });
                }
            }
        }
    }
    Ok(BilinearForm {
        module: m.clone(),
        codomain: k.clone(),
        gram,
    })
}

/// Adjoints of a form and the regularity data derived from them.
///
/// `rad` sends x to the functional y ↦ b(y, x); `lad` sends x to
/// y ↦ b(x, y). Both are expressed in the stored bases of the duals, which
/// ride along so later computations refer to the same coordinates.
#[derive(Clone, Debug)]
pub struct FormReport {
    pub right_injective: bool,
    pub right_regular: bool,
    pub left_injective: bool,
    pub left_regular: bool,
    pub rad: ModuleHom,
    pub lad: ModuleHom,
    pub dual0: DualModule,
    pub dual1: DualModule,
    /// A nonzero x with b(M, x) = 0, when one exists.
    pub right_witness: Option<Vec<Scalar>>,
    /// A nonzero x with b(x, M) = 0, when one exists.
    pub left_witness: Option<Vec<Scalar>>,
}

pub fn adjoints(b: &BilinearForm) -> FormReport {
    let m = &b.module;
    let f = m.algebra.field;
    let dual0 = dual(m, &b.codomain, 0).expect("same algebra");
    let dual1 = dual(m, &b.codomain, 1).expect("same algebra");
    let build = |dualm: &DualModule, value: &dyn Fn(usize, usize) -> Vec<Scalar>| -> ModuleHom {
        let basis_mats: Vec<Mat> = dualm.basis.iter().map(|h| h.matrix.clone()).collect();
        let cols = (0..m.dim)
            .map(|j| {
                let hom_cols = (0..m.dim).map(|i| value(i, j)).collect();
                let hom = if m.dim == 0 {
                    Mat::zero(f, b.codomain.dim, 0)
                } else {
                    Mat::from_cols(f, hom_cols)
                };
                span_coords(f, &basis_mats, &hom)
                    .expect("compatibility makes each partial pairing a hom")
            })
            .collect();
        let matrix = if m.dim == 0 || dualm.basis.is_empty() {
            Mat::zero(f, dualm.basis.len(), m.dim)
        } else {
            Mat::from_cols(f, cols)
        };
        make_hom(m, &dualm.module, matrix).expect("adjoints of a valid form are homs")
    };
    // rad x = b(·, x): the hom's i-th column is gram[i][x]
    let rad = build(&dual1, &|i, j| b.gram[i][j].clone());
    // lad x = b(x, ·): the hom's i-th column is gram[x][i]
    let lad = build(&dual0, &|i, j| b.gram[j][i].clone());
    let witness = |h: &ModuleHom| -> Option<Vec<Scalar>> {
        kernel_basis(&h.matrix).first().map(|v| v.col(0))
    };
    let right_witness = witness(&rad);
    let left_witness = witness(&lad);
    let bijective = |h: &ModuleHom| h.matrix.rows == h.matrix.cols && h.matrix.invert().is_some();
    FormReport {
        right_injective: right_witness.is_none(),
        right_regular: bijective(&rad),
        left_injective: left_witness.is_none(),
        left_regular: bijective(&lad),
        rad,
        lad,
        dual0,
        dual1,
        right_witness,
        left_witness,
    }
}

/// The reversal of End(M) induced by a right-regular form: α(w) is the
/// unique endomorphism with b(w·x, y) = b(x, α(w)·y).
///
/// `w` must be the endomorphism algebra of b's module, and `report` the
/// adjoint data of `b`.
pub fn corresponding_anti_endo(
    b: &BilinearForm,
    report: &FormReport,
    w: &EndoAlgebra,
) -> Result<AntiEndo, FormError> {
    if !report.right_regular {
        return Err(FormError::NotRightRegular);
    }
    let radinv = report.rad.matrix.invert().expect("right regular");
    let m = &b.module;
    let f = m.algebra.field;
    let cols = (0..w.w.dim)
        .map(|t| {
            let hom = make_hom(m, m, w.rep[t].clone()).expect("rep matrices are endomorphisms");
            let lifted = dual_map(&hom, &report.dual1, &report.dual1)
                .expect("duals come from the same form");
            let composite = radinv.mul(&lifted.matrix).mul(&report.rad.matrix);
            w.coords_of(&composite)
                .expect("conjugating by the adjoint stays inside End(M)")
        })
        .collect();
    let mat = Mat::from_cols(f, cols);
    let alpha = make_anti_endo(&w.w, mat).expect("adjoint conjugation reverses composition");
    // the defining identity, on every basis triple
    for t in 0..w.w.dim {
        let moved = w.rep_of(&alpha.apply(&w.w.basis_elem(t)));
        for i in 0..m.dim {
            for j in 0..m.dim {
                let lhs = b.eval(&w.rep[t].col(i), &m.basis_vec(j));
                let rhs = b.eval(&m.basis_vec(i), &moved.col(j));
                assert_eq!(lhs, rhs, "adjoint-induced reversal failed its identity");
            }
        }
    }
    Ok(alpha)
}

/// The left counterpart: β(w) is the unique endomorphism with
/// b(x, w·y) = b(β(w)·x, y). When the form is regular on both sides, β is
/// the inverse of the right reversal.
pub fn left_corresponding_anti_endo(
    b: &BilinearForm,
    report: &FormReport,
    w: &EndoAlgebra,
) -> Result<AntiEndo, FormError> {
    if !report.left_regular {
        return Err(FormError::NotLeftRegular);
    }
    let ladinv = report.lad.matrix.invert().expect("left regular");
    let m = &b.module;
    let f = m.algebra.field;
    let cols = (0..w.w.dim)
        .map(|t| {
            let hom = make_hom(m, m, w.rep[t].clone()).expect("rep matrices are endomorphisms");
            let lifted = dual_map(&hom, &report.dual0, &report.dual0)
                .expect("duals come from the same form");
            let composite = ladinv.mul(&lifted.matrix).mul(&report.lad.matrix);
            w.coords_of(&composite)
                .expect("conjugating by the adjoint stays inside End(M)")
        })
        .collect();
    let mat = Mat::from_cols(f, cols);
    let beta = make_anti_endo(&w.w, mat).expect("adjoint conjugation reverses composition");
    for t in 0..w.w.dim {
        let moved = w.rep_of(&beta.apply(&w.w.basis_elem(t)));
        for i in 0..m.dim {
            for j in 0..m.dim {
                let lhs = b.eval(&m.basis_vec(i), &w.rep[t].col(j));
                let rhs = b.eval(&moved.col(i), &m.basis_vec(j));
                assert_eq!(lhs, rhs, "left reversal failed its identity");
            }
        }
    }
    Ok(beta)
}

/// Whether b(x, y) = θ(b(y, x)) on all basis pairs. θ must be an
/// involutory action-swapping automorphism of b's codomain.
pub fn is_theta_symmetric(b: &BilinearForm, theta: &DblAntiAuto) -> bool {
    assert_eq!(theta.module, b.codomain, "θ must act on the form's codomain");
    assert!(theta.involution, "symmetry is relative to an involution");
    for i in 0..b.module.dim {
        for j in 0..b.module.dim {
            if b.gram[i][j] != theta.matrix.apply(&b.gram[j][i]) {
                return false;
            }
        }
    }
    true
}

/// Outcome of the search for a right θ-asymmetry.
#[derive(Clone, Debug)]
pub enum AsymmetrySearch {
    /// The unique endomorphism λ with θ(b(x, y)) = b(y, λ·x).
    Unique(ModuleHom),
    /// A witness plus the dimension of the full solution space.
    Family(ModuleHom, usize),
    /// The defining identity has no endomorphism solution.
    NoneExists,
}

impl AsymmetrySearch {
    pub fn witness(&self) -> Option<&ModuleHom> {
        match self {
            AsymmetrySearch::Unique(h) | AsymmetrySearch::Family(h, _) => Some(h),
            AsymmetrySearch::NoneExists => None,
        }
    }
}

/// Searches for a right θ-asymmetry of b: an endomorphism λ of M with
/// θ(b(x, y)) = b(y, λ·x) for all x, y.
///
/// A right-regular form determines λ exactly, by conjugating the
/// θ-postcomposition map with the two adjoints. Otherwise the defining
/// identity and the endomorphism conditions are solved as one linear
/// system, and a solution space of positive dimension is reported as such.
pub fn right_asymmetry(
    b: &BilinearForm,
    theta: &DblAntiAuto,
    report: &FormReport,
) -> AsymmetrySearch {
    assert_eq!(theta.module, b.codomain, "θ must act on the form's codomain");
    let m = &b.module;
    let f = m.algebra.field;
    if report.right_regular {
        let u = u_theta(theta, &report.dual0, &report.dual1).expect("duals of the same module");
        let radinv = report.rad.matrix.invert().expect("right regular");
        let lambda = radinv.mul(&u.matrix).mul(&report.lad.matrix);
        let hom = make_hom(m, m, lambda).expect("composite of homs");
        for i in 0..m.dim {
            for j in 0..m.dim {
                let lhs = theta.matrix.apply(&b.gram[i][j]);
                let rhs = b.eval(&m.basis_vec(j), &hom.matrix.col(i));
                assert_eq!(lhs, rhs, "asymmetry failed its defining identity");
            }
        }
        return AsymmetrySearch::Unique(hom);
    }
    // unknowns: the entries of λ, row-major
    let dim = m.dim * m.dim;
    if dim == 0 {
        let hom = make_hom(m, m, Mat::zero(f, 0, 0)).expect("empty");
        return AsymmetrySearch::Unique(hom);
    }
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    for i in 0..m.dim {
        for j in 0..m.dim {
            let target = theta.matrix.apply(&b.gram[i][j]);
            for (c, t_c) in target.into_iter().enumerate() {
                let mut row = vec![Scalar::zero(f); dim];
                for t in 0..m.dim {
                    // coefficient of λ_{t,i} in the c-th coordinate of b(x_j, λ x_i)
                    row[t * m.dim + i] = b.gram[j][t][c].clone();
                }
                rows.push(row);
                rhs.push(t_c);
            }
        }
    }
    // endomorphism conditions: A_s·λ = λ·A_s
    for act in &m.actions {
        let block = act
            .kron(&Mat::identity(f, m.dim))
            .sub(&Mat::identity(f, m.dim).kron(&act.transpose()));
        for r in 0..block.rows {
            rows.push((0..dim).map(|c| block.at(r, c).clone()).collect());
            rhs.push(Scalar::zero(f));
        }
    }
    let sys = Mat::from_cols(f, {
        // from rows: transpose of the column-major constructor
        let mut cols = vec![Vec::with_capacity(rows.len()); dim];
        for row in &rows {
            for (c, v) in row.iter().enumerate() {
                cols[c].push(v.clone());
            }
        }
        cols
    });
    let rhs_mat = Mat::col_vec(f, &rhs);
    let Some(sol) = solve(&sys, &rhs_mat) else {
        return AsymmetrySearch::NoneExists;
    };
    let vals = sol.col(0);
    let lambda = Mat::from_fn(f, m.dim, m.dim, |i, j| vals[i * m.dim + j].clone());
    let hom = make_hom(m, m, lambda).expect("endomorphism conditions were in the system");
    let freedom = kernel_basis(&sys).len();
    if freedom == 0 {
        AsymmetrySearch::Unique(hom)
    } else {
        AsymmetrySearch::Family(hom, freedom)
    }
}

/// The orthogonal sum of two forms with the same codomain: the form on the
/// direct sum whose cross pairings vanish.
pub fn orthogonal_sum(b1: &BilinearForm, b2: &BilinearForm) -> Result<BilinearForm, FormError> {
    if b1.codomain != b2.codomain {
        return Err(FormError::CodomainMismatch);
    }
    let sum = direct_sum(&b1.module, &b2.module).map_err(|_| FormError::AlgebraMismatch)?;
    let f = sum.algebra.field;
    let (m1, kdim) = (b1.module.dim, b1.codomain.dim);
    let zero = vec![Scalar::zero(f); kdim];
    let gram = (0..sum.dim)
        .map(|i| {
            (0..sum.dim)
                .map(|j| match (i < m1, j < m1) {
                    (true, true) => b1.gram[i][j].clone(),
                    (false, false) => b2.gram[i - m1][j - m1].clone(),
                    _ => zero.clone(),
                })
                .collect()
        })
        .collect();
    make_form(&sum, &b1.codomain, gram)
}

/// The form b(x, y) = α(x)·y on the algebra itself, with values in the
/// standard double module attached to α. Always right regular; its
/// left kernel is the kernel of α.
pub fn standard_form(r: &crate::algebra::Algebra, alpha: &AntiEndo) -> BilinearForm {
    use crate::dblmod::standard_double;
    let k = standard_double(r, alpha);
    let m = regular_module(r);
    let gram = (0..r.dim)
        .map(|i| {
            let ai = alpha.apply(&r.basis_elem(i));
            (0..r.dim).map(|j| r.mul(&ai, &r.basis_elem(j))).collect()
        })
        .collect();
    make_form(&m, &k, gram).expect("reversal makes the two laws hold")
}

/// A bilinear space over the 7-dimensional incidence subalgebra of M₃,
/// assembled from matrix shapes: rows paired through the anti-diagonal
/// reflection A ↦ J·Aᵀ·J. The algebra itself has no anti-automorphism, yet
/// the form is symmetric relative to the reflection on its codomain — the
/// motivating situation for value-carrying symmetry.
#[derive(Clone, Debug)]
pub struct ReflectionSpace {
    pub r: crate::algebra::Algebra,
    pub k: DoubleModule,
    pub m: RightModule,
    pub b: BilinearForm,
    pub theta: DblAntiAuto,
}

/// Anti-diagonal reflection: for a p×q input the (i, j) output entry is
/// the (p−1−j, q−1−i) input entry. Reverses products of rectangular
/// matrices wherever they compose.
fn reflect(a: &Mat) -> Mat {
    Mat::from_fn(a.field, a.cols, a.rows, |i, j| {
        a.at(a.rows - 1 - j, a.cols - 1 - i).clone()
    })
}

fn pattern_mat(field: FieldSpec, rows: usize, cols: usize, pos: (usize, usize)) -> Mat {
    let mut m = Mat::zero(field, rows, cols);
    m.set(pos.0, pos.1, Scalar::one(field));
    m
}

fn into_pattern(positions: &[(usize, usize)], mat: &Mat) -> Vec<Scalar> {
    let coords: Vec<Scalar> = positions
        .iter()
        .map(|&(i, j)| mat.at(i, j).clone())
        .collect();
    // everything off the pattern must vanish
    for i in 0..mat.rows {
        for j in 0..mat.cols {
            if !positions.contains(&(i, j)) {
                assert!(mat.at(i, j).is_zero(), "value left the coordinate pattern");
            }
        }
    }
    coords
}

pub fn incidence_reflection_space(field: FieldSpec) -> ReflectionSpace {
    use crate::algebra::structured_subalgebra;
    let mask = vec![
        vec![true, true, true],
        vec![true, true, true],
        vec![false, false, true],
    ];
    let (r, rpos) = structured_subalgebra(field, 3, &mask).expect("pattern is closed and unital");
    let rmats: Vec<Mat> = rpos.iter().map(|&p| pattern_mat(field, 3, 3, p)).collect();

    // codomain: 3×3 matrices with first row free and the rest supported on
    // the last column; k ∘₀ r = reflect(r)·k, k ∘₁ r = k·r
    let kpos = [(0, 0), (0, 1), (0, 2), (1, 2), (2, 2)];
    let kmats: Vec<Mat> = kpos.iter().map(|&p| pattern_mat(field, 3, 3, p)).collect();
    let family = |by: &dyn Fn(&Mat, &Mat) -> Mat| -> Vec<Mat> {
        rmats
            .iter()
            .map(|rm| {
                let cols = kmats.iter().map(|km| into_pattern(&kpos, &by(km, rm))).collect();
                Mat::from_cols(field, cols)
            })
            .collect()
    };
    let actions0 = family(&|km, rm| reflect(rm).mul(km));
    let actions1 = family(&|km, rm| km.mul(rm));
    let k = make_double(&r, actions0, actions1).expect("both shapes are invariant");

    // module: 2×3 matrices with the bottom row supported on the last column
    let mpos = [(0, 0), (0, 1), (0, 2), (1, 2)];
    let mmats: Vec<Mat> = mpos.iter().map(|&p| pattern_mat(field, 2, 3, p)).collect();
    let actions = rmats
        .iter()
        .map(|rm| {
            let cols = mmats
                .iter()
                .map(|mm| into_pattern(&mpos, &mm.mul(rm)))
                .collect();
            Mat::from_cols(field, cols)
        })
        .collect();
    let m = make_module(&r, actions).expect("the row shape is invariant");

    let gram = mmats
        .iter()
        .map(|x| {
            mmats
                .iter()
                .map(|y| into_pattern(&kpos, &reflect(x).mul(y)))
                .collect()
        })
        .collect();
    let b = make_form(&m, &k, gram).expect("reflection pairing satisfies both laws");

    let theta_cols = kmats
        .iter()
        .map(|km| into_pattern(&kpos, &reflect(km)))
        .collect();
    let theta = make_dbl_anti_auto(&k, Mat::from_cols(field, theta_cols))
        .expect("reflection swaps the two actions");
    ReflectionSpace { r, k, m, b, theta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        field_algebra, find_algebra_iso, matrix_algebra, structured_subalgebra,
        transpose_anti_endo,
    };
    use crate::dblmod::standard_double;
    use crate::modrep::endo_algebra;

    fn fp(p: u64) -> FieldSpec {
        FieldSpec::prime(p)
    }

    fn rat() -> FieldSpec {
        FieldSpec::Rationals
    }

    /// The n-dimensional space over its own field, paired by the given
    /// matrix of scalars, with values in the trivial double module.
    fn scalar_form(field: FieldSpec, gram: &Mat) -> BilinearForm {
        let fa = field_algebra(field);
        let m = make_module(&fa, vec![Mat::identity(field, gram.rows)]).unwrap();
        let id = make_anti_endo(&fa, Mat::identity(field, 1)).unwrap();
        let k = standard_double(&fa, &id);
        let tensor = (0..gram.rows)
            .map(|i| {
                (0..gram.cols)
                    .map(|j| vec![gram.at(i, j).clone()])
                    .collect()
            })
            .collect();
        make_form(&m, &k, tensor).unwrap()
    }

    fn identity_theta(b: &BilinearForm) -> DblAntiAuto {
        make_dbl_anti_auto(&b.codomain, Mat::identity(b.module.algebra.field, b.codomain.dim))
            .unwrap()
    }

    #[test]
    fn zero_form_is_totally_degenerate() {
        let f = fp(3);
        let b = scalar_form(f, &Mat::zero(f, 2, 2));
        let rep = adjoints(&b);
        assert!(!rep.right_injective && !rep.right_regular);
        assert!(!rep.left_injective && !rep.left_regular);
        let w = rep.right_witness.as_ref().unwrap();
        assert!(w.iter().any(|s| !s.is_zero()));
        assert!(b.eval(&b.module.basis_vec(0), w).iter().all(Scalar::is_zero));
        assert!(matches!(
            corresponding_anti_endo(&b, &rep, &endo_algebra(&b.module)),
            Err(FormError::NotRightRegular)
        ));
    }

    #[test]
    fn make_form_rejects_an_incompatible_gram() {
        let f = fp(2);
        let r = matrix_algebra(f, 2);
        let alpha = transpose_anti_endo(&r, 2);
        let m = regular_module(&r);
        let k = standard_double(&r, &alpha);
        // a gram concentrated in one corner cannot absorb the action laws
        let mut gram = vec![vec![vec![Scalar::zero(f); k.dim]; m.dim]; m.dim];
        gram[0][0][0] = Scalar::one(f);
        match make_form(&m, &k, gram) {
            Err(FormError::CompatibilityViolation { .. }) => {}
            other => panic!("expected a compatibility violation, got {other:?}"),
        }
    }

    #[test]
    fn standard_form_recovers_its_reversal() {
        let f = fp(2);
        let r = matrix_algebra(f, 2);
        let alpha = transpose_anti_endo(&r, 2);
        let b = standard_form(&r, &alpha);
        let rep = adjoints(&b);
        assert!(rep.right_regular && rep.left_regular);
        let w = endo_algebra(&b.module);
        let induced = corresponding_anti_endo(&b, &rep, &w).unwrap();
        // left multiplications realize the algebra inside End(R); the induced
        // reversal must match alpha through that identification
        for i in 0..r.dim {
            let e = r.basis_elem(i);
            let coords = w.coords_of(&r.lmul_mat(&e)).unwrap();
            let moved = w.rep_of(&induced.apply(&coords));
            assert_eq!(moved, r.lmul_mat(&alpha.apply(&e)));
        }
    }

    #[test]
    fn standard_form_of_a_non_bijective_reversal_is_left_degenerate() {
        let f = fp(3);
        let mask = vec![vec![true, true], vec![false, true]];
        let (r, _) = structured_subalgebra(f, 2, &mask).unwrap();
        // project onto the upper-left character, times the identity
        let proj = Mat::from_i64(f, &[&[1, 0, 0], &[0, 0, 0], &[1, 0, 0]]);
        let alpha = make_anti_endo(&r, proj).unwrap();
        assert!(!alpha.bijective);
        let b = standard_form(&r, &alpha);
        let rep = adjoints(&b);
        assert!(rep.right_regular, "the standard form is always right regular");
        assert!(!rep.left_injective);
        // the left kernel of the form is exactly the kernel of the reversal
        let w = rep.left_witness.as_ref().unwrap();
        assert!(alpha.apply(w).iter().all(Scalar::is_zero));
        assert!(matches!(
            left_corresponding_anti_endo(&b, &rep, &endo_algebra(&b.module)),
            Err(FormError::NotLeftRegular)
        ));
    }

    #[test]
    fn plane_over_its_field_induces_transpose() {
        let b = scalar_form(fp(3), &Mat::identity(fp(3), 2));
        let rep = adjoints(&b);
        assert!(rep.right_regular && rep.left_regular);
        let w = endo_algebra(&b.module);
        assert_eq!(w.w.dim, 4);
        let alpha = corresponding_anti_endo(&b, &rep, &w).unwrap();
        for t in 0..w.w.dim {
            let moved = w.rep_of(&alpha.apply(&w.w.basis_elem(t)));
            assert_eq!(moved, w.rep[t].transpose());
        }
        assert!(alpha.is_involution());
    }

    #[test]
    fn left_reversal_inverts_the_right_one() {
        let f = rat();
        let b = scalar_form(f, &Mat::from_i64(f, &[&[1, 1], &[0, 1]]));
        let rep = adjoints(&b);
        let w = endo_algebra(&b.module);
        let alpha = corresponding_anti_endo(&b, &rep, &w).unwrap();
        let beta = left_corresponding_anti_endo(&b, &rep, &w).unwrap();
        assert_eq!(beta.mat, alpha.mat.invert().unwrap());
        assert!(alpha.mat.mul(&beta.mat).is_identity());
    }

    #[test]
    fn asymmetry_of_a_triangular_gram() {
        let f = rat();
        let b = scalar_form(f, &Mat::from_i64(f, &[&[1, 1], &[0, 1]]));
        let rep = adjoints(&b);
        let theta = identity_theta(&b);
        assert!(!is_theta_symmetric(&b, &theta));
        let lambda = match right_asymmetry(&b, &theta, &rep) {
            AsymmetrySearch::Unique(h) => h,
            other => panic!("regular form must determine its asymmetry, got {other:?}"),
        };
        assert_eq!(lambda.matrix, Mat::from_i64(f, &[&[0, -1], &[1, 1]]));
        // the asymmetry intertwines the two adjoints through θ
        let u = u_theta(&theta, &rep.dual0, &rep.dual1).unwrap();
        assert_eq!(
            u.matrix.mul(&rep.lad.matrix),
            rep.rad.matrix.mul(&lambda.matrix)
        );
        // and its inverse plays the same role on the other side
        let linv = lambda.matrix.invert().unwrap();
        let m = &b.module;
        for i in 0..m.dim {
            for j in 0..m.dim {
                let lhs = b.eval(&linv.apply(&m.basis_vec(j)), &m.basis_vec(i));
                assert_eq!(lhs, b.value(i, j).to_vec());
            }
        }
    }

    #[test]
    fn symmetric_gram_has_identity_asymmetry() {
        let f = rat();
        let b = scalar_form(f, &Mat::from_i64(f, &[&[1, 2], &[2, 1]]));
        let theta = identity_theta(&b);
        assert!(is_theta_symmetric(&b, &theta));
        let rep = adjoints(&b);
        match right_asymmetry(&b, &theta, &rep) {
            AsymmetrySearch::Unique(h) => assert!(h.matrix.is_identity()),
            other => panic!("expected a unique asymmetry, got {other:?}"),
        }
        // symmetry of a regular form forces its reversal to be an involution
        let alpha = corresponding_anti_endo(&b, &rep, &endo_algebra(&b.module)).unwrap();
        assert!(alpha.is_involution());
    }

    #[test]
    fn alternating_gram_is_not_symmetric_relative_to_the_identity() {
        let f = rat();
        let b = scalar_form(f, &Mat::from_i64(f, &[&[0, 1], &[-1, 0]]));
        let theta = identity_theta(&b);
        assert!(!is_theta_symmetric(&b, &theta));
        match right_asymmetry(&b, &theta, &adjoints(&b)) {
            AsymmetrySearch::Unique(h) => {
                assert_eq!(h.matrix, Mat::from_i64(f, &[&[-1, 0], &[0, -1]]))
            }
            other => panic!("expected a unique asymmetry, got {other:?}"),
        }
    }

    #[test]
    fn asymmetry_search_reports_degenerate_outcomes() {
        // every map is an asymmetry of the zero form
        let f = fp(3);
        let b = scalar_form(f, &Mat::zero(f, 2, 2));
        let theta = identity_theta(&b);
        match right_asymmetry(&b, &theta, &adjoints(&b)) {
            AsymmetrySearch::Family(_, freedom) => assert_eq!(freedom, 4),
            other => panic!("expected a solution family, got {other:?}"),
        }
        // a nilpotent gram admits none at all
        let f = rat();
        let b = scalar_form(f, &Mat::from_i64(f, &[&[0, 1], &[0, 0]]));
        let theta = identity_theta(&b);
        assert!(matches!(
            right_asymmetry(&b, &theta, &adjoints(&b)),
            AsymmetrySearch::NoneExists
        ));
    }

    #[test]
    fn orthogonal_sum_combines_grams_and_regularity() {
        let f = fp(3);
        let reg = scalar_form(f, &Mat::identity(f, 2));
        let degenerate = scalar_form(f, &Mat::zero(f, 1, 1));
        let both = orthogonal_sum(&reg, &reg).unwrap();
        assert!(adjoints(&both).right_regular);
        let mixed = orthogonal_sum(&reg, &degenerate).unwrap();
        assert_eq!(mixed.module.dim, 3);
        assert!(mixed.value(0, 2).iter().all(Scalar::is_zero));
        let rep = adjoints(&mixed);
        assert!(!rep.right_regular && !rep.right_injective);
        // the adjoint of a sum is the sum of the adjoints, read through the
        // inclusion of the summand duals into the dual of the sum
        let rep1 = adjoints(&reg);
        let rep2 = adjoints(&degenerate);
        let sum_basis: Vec<Mat> = rep.dual1.basis.iter().map(|h| h.matrix.clone()).collect();
        let kdim = reg.codomain.dim;
        let mut cols = Vec::new();
        for h in &rep1.dual1.basis {
            let ext = h.matrix.hstack(&Mat::zero(f, kdim, degenerate.module.dim));
            cols.push(span_coords(f, &sum_basis, &ext).unwrap());
        }
        for h in &rep2.dual1.basis {
            let ext = Mat::zero(f, kdim, reg.module.dim).hstack(&h.matrix);
            cols.push(span_coords(f, &sum_basis, &ext).unwrap());
        }
        let embed = Mat::from_cols(f, cols);
        let blocks = Mat::block_diag(&[&rep1.rad.matrix, &rep2.rad.matrix]);
        assert_eq!(rep.rad.matrix, embed.mul(&blocks));
    }

    #[test]
    fn summing_with_the_empty_form_changes_nothing() {
        let f = fp(3);
        let b = scalar_form(f, &Mat::identity(f, 2));
        let fa = field_algebra(f);
        let empty_mod = make_module(&fa, vec![Mat::identity(f, 0)]).unwrap();
        let empty = make_form(&empty_mod, &b.codomain, Vec::new()).unwrap();
        assert_eq!(orthogonal_sum(&b, &empty).unwrap(), b);
        // forms over different codomains refuse to combine
        let other = scalar_form(rat(), &Mat::identity(rat(), 1));
        assert_eq!(
            orthogonal_sum(&b, &other).unwrap_err(),
            FormError::CodomainMismatch
        );
    }

    #[test]
    fn reflection_space_is_symmetric_and_regular() {
        let rs = incidence_reflection_space(rat());
        assert_eq!(rs.r.dim, 7);
        assert_eq!(rs.k.dim, 5);
        assert_eq!(rs.m.dim, 4);
        let rep = adjoints(&rs.b);
        assert!(rep.right_regular && rep.left_regular);
        assert!(rep.right_injective && rep.left_injective);
        assert!(rs.theta.involution);
        assert!(is_theta_symmetric(&rs.b, &rs.theta));
        match right_asymmetry(&rs.b, &rs.theta, &rep) {
            AsymmetrySearch::Unique(h) => assert!(h.matrix.is_identity()),
            other => panic!("symmetric and regular, so λ = 1; got {other:?}"),
        }
    }

    #[test]
    fn reflection_space_reversal_is_the_reflection_on_triangular_mats() {
        let f = fp(3);
        let rs = incidence_reflection_space(f);
        let rep = adjoints(&rs.b);
        let w = endo_algebra(&rs.m);
        assert_eq!(w.w.dim, 3);
        let alpha = corresponding_anti_endo(&rs.b, &rep, &w).unwrap();
        assert!(alpha.bijective && alpha.is_involution());
        let beta = left_corresponding_anti_endo(&rs.b, &rep, &w).unwrap();
        assert_eq!(beta.mat, alpha.mat);
        // End(M) is the upper triangular 2×2 algebra, and through any such
        // identification the induced reversal is the anti-diagonal reflection
        let mask = vec![vec![true, true], vec![false, true]];
        let (tri, _) = structured_subalgebra(f, 2, &mask).unwrap();
        let refl_tri =
            make_anti_endo(&tri, Mat::from_i64(f, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]))
                .unwrap();
        let iso = find_algebra_iso(&w.w, &tri, Some((&alpha, &refl_tri)), 100_000).unwrap();
        assert!(iso.is_some(), "reversal should transport to the reflection");
    }

    #[test]
    fn reflection_space_base_algebra_is_not_commutative() {
        // the base pattern keeps both off-diagonal units of the full 2×2
        // corner, so their products land on different diagonal cells
        let rs = incidence_reflection_space(fp(2));
        let e01 = rs.r.basis_elem(1);
        let e10 = rs.r.basis_elem(3);
        assert_eq!(rs.r.mul(&e10, &e01), rs.r.elem_from_i64(&[0, 0, 0, 0, 1, 0, 0]));
        assert_eq!(rs.r.mul(&e01, &e10), rs.r.elem_from_i64(&[1, 0, 0, 0, 0, 0, 0]));
        assert!(!rs.r.is_commutative());
    }
}
