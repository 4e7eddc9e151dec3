//! The value space induced by a reversal of the endomorphism algebra, and
//! the transfers that move forms, swaps, and reversals along it.
//!
//! Starting from a right module M with endomorphism algebra W and a
//! product-reversing map `alpha` on W, the central construction quotients
//! the tensor square M ⊗ M by the relations  w·x ⊗ y − x ⊗ alpha(w)·y.
//! The quotient keeps both right actions of the base algebra (one through
//! each tensor leg) and carries the tautological pairing sending (x, y) to
//! the class of x ⊗ y.  That pairing is universal: any form compatible
//! with `alpha` factors through it uniquely.
//!
//! The rest of the module moves structure along the construction: the swap
//! induced when `alpha` is an involution, similarity of forms over a fixed
//! module, twisting by units of W, block extensions of a reversal, the
//! balanced-tensor description of the value space, a predictor for when
//! the pairing is regular, and the extraction of a reversal of the base
//! algebra itself when the module is free.

use crate::algebra::{
    compose, inner_automorphism, is_semisimple, make_algebra, make_anti_endo, Algebra, AntiEndo,
};
use crate::biform::{adjoints, corresponding_anti_endo, make_form, orthogonal_sum, BilinearForm};
use crate::dblmod::{
    is_dbl_isomorphic, make_dbl_anti_auto, make_dbl_hom, make_double, side_module, standard_double,
    DblAntiAuto, DblHom, DoubleModule,
};
use crate::modrep::{
    direct_sum, endo_algebra, hom_space, is_fg_projective, is_generator, is_module_isomorphic,
    make_hom, regular_module, span_coords, twist, EndoAlgebra, ModuleHom, RightModule,
};
use crate::scalars::{
    find_invertible_affine, kernel_basis, solve, Mat, Quotient, Scalar, SpanSearch,
    DEFAULT_SEARCH_SEED,
};
use thiserror::Error;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum CorError {
    #[error("the side-{side} action of basis element {s} does not preserve the relation space")]
    DescentFailure { side: usize, s: usize },
    #[error("the reversal is not an involution")]
    AlphaNotInvolution,
    #[error("the form is not right regular")]
    NotRightRegular,
    #[error("the element is not invertible")]
    NotInvertible,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(&'static str),
    #[error("the module could not be identified as free over its algebra")]
    NotFree,
    #[error("no identification of the value space with the regular module was found")]
    RankOneIdentificationFailed,
    #[error("the objects are incompatibly matched")]
    Mismatch,
}

/// A quotient of the tensor square of an m-dimensional space, with
/// x_i ⊗ x_j sitting at flat index i·m + j before projection.
#[derive(Clone, Debug)]
pub struct TensorQuotient {
    pub m: usize,
    pub quot: Quotient,
}

impl TensorQuotient {
    pub fn dim(&self) -> usize {
        self.quot.dim()
    }

    /// Coordinates of the class of x_i ⊗ x_j.
    pub fn class_of(&self, i: usize, j: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(self.quot.field); self.m * self.m];
        v[i * self.m + j] = Scalar::one(self.quot.field);
        self.quot.project(&v)
    }
}

/// The value space of a reversal: the quotiented tensor square together
/// with its two descended actions and the tautological pairing.
#[derive(Clone, Debug)]
pub struct KAlpha {
    pub tq: TensorQuotient,
    pub k: DoubleModule,
    pub b: BilinearForm,
    pub alpha: AntiEndo,
    pub w: EndoAlgebra,
}

fn flat(m: usize, i: usize, j: usize) -> usize {
    i * m + j
}

/// Rows spanning the defining relations  w_t·x_i ⊗ x_j − x_i ⊗ alpha(w_t)·x_j
/// inside the flat tensor square.
fn reversal_relations(m: &RightModule, w: &EndoAlgebra, alpha: &AntiEndo) -> Mat {
    let f = m.algebra.field;
    let md = m.dim;
    let mm = md * md;
    let mut rows = Vec::with_capacity(w.w.dim * mm);
    for t in 0..w.w.dim {
        let wt = &w.rep[t];
        let at = w.rep_of(&alpha.apply(&w.w.basis_elem(t)));
        for i in 0..md {
            for j in 0..md {
                let mut row = vec![Scalar::zero(f); mm];
                for u in 0..md {
                    let c = wt.at(u, i);
                    if !c.is_zero() {
                        row[flat(md, u, j)] = row[flat(md, u, j)].add(c);
                    }
                }
                for v in 0..md {
                    let c = at.at(v, j);
                    if !c.is_zero() {
                        row[flat(md, i, v)] = row[flat(md, i, v)].sub(c);
                    }
                }
                rows.push(row);
            }
        }
    }
    Mat::from_rows(f, rows)
}

/// Does `action` map the row span of `relations` into the kernel of the
/// quotient projection?
fn descends(quot: &Quotient, relations: &Mat, action: &Mat) -> bool {
    (0..relations.rows).all(|r| {
        let image = action.apply(&relations.row(r));
        quot.project(&image).iter().all(|c| c.is_zero())
    })
}

/// The permutation of the flat tensor square sending x_i ⊗ x_j to x_j ⊗ x_i.
fn swap_matrix(field: crate::scalars::FieldSpec, m: usize) -> Mat {
    Mat::from_fn(field, m * m, m * m, |r, c| {
        if r / m == c % m && r % m == c / m {
            Scalar::one(field)
        } else {
            Scalar::zero(field)
        }
    })
}

/// Quotient M ⊗ M by  w·x ⊗ y − x ⊗ alpha(w)·y  and package the descended
/// actions with the tautological pairing.
///
/// `w` must be (a validated subalgebra of) the endomorphism algebra of `m`,
/// and `alpha` a reversal of it; the relation space is then invariant under
/// both leg actions, and `DescentFailure` signals inconsistent inputs.
pub fn tensor_alpha(
    m: &RightModule,
    w: &EndoAlgebra,
    alpha: &AntiEndo,
) -> Result<KAlpha, CorError> {
    assert_eq!(
        alpha.mat.rows, w.w.dim,
        "the reversal must live on the given endomorphism algebra"
    );
    assert_eq!(w.rep[0].rows, m.dim, "endomorphisms must act on the module");
    let f = m.algebra.field;
    let md = m.dim;
    let relations = reversal_relations(m, w, alpha);
    let quot = Quotient::from_relations(&relations);
    let eye = Mat::identity(f, md);
    let left = |s: usize| m.actions[s].kron(&eye);
    let right = |s: usize| eye.kron(&m.actions[s]);
    for s in 0..m.algebra.dim {
        if !descends(&quot, &relations, &left(s)) {
            return Err(CorError::DescentFailure { side: 0, s });
        }
        if !descends(&quot, &relations, &right(s)) {
            return Err(CorError::DescentFailure { side: 1, s });
        }
    }
    let proj = quot.projection_matrix();
    let sect = quot.section_matrix();
    let a0: Vec<Mat> = (0..m.algebra.dim)
        .map(|s| proj.mul(&left(s)).mul(&sect))
        .collect();
    let a1: Vec<Mat> = (0..m.algebra.dim)
        .map(|s| proj.mul(&right(s)).mul(&sect))
        .collect();
    let k = make_double(&m.algebra, a0, a1).expect("descended tensor actions form a double module");
    let gram: Vec<Vec<Vec<Scalar>>> = (0..md)
        .map(|i| (0..md).map(|j| proj.col(flat(md, i, j))).collect())
        .collect();
    let b = make_form(m, &k, gram).expect("the class pairing is compatible with both actions");
    Ok(KAlpha {
        tq: TensorQuotient { m: md, quot },
        k,
        b,
        alpha: alpha.clone(),
        w: w.clone(),
    })
}

/// Factor `b` through the tautological pairing of `ka`, if possible.
///
/// The factoring exists exactly when b(w·x, y) = b(x, alpha(w)·y) for all
/// endomorphisms w; `None` reports that the form is incompatible with the
/// reversal.  When it exists it is unique, determined on classes of basis
/// tensors, and carries each pairing value b_alpha(x_i, x_j) to b(x_i, x_j).
pub fn universal_map(b: &BilinearForm, ka: &KAlpha) -> Option<DblHom> {
    assert_eq!(b.module, ka.b.module, "forms must share their source module");
    let f = b.module.algebra.field;
    let md = b.module.dim;
    let kd = b.codomain.dim;
    let relations = reversal_relations(&b.module, &ka.w, &ka.alpha);
    for r in 0..relations.rows {
        let row = relations.row(r);
        let mut acc = vec![Scalar::zero(f); kd];
        for i in 0..md {
            for j in 0..md {
                let c = &row[flat(md, i, j)];
                if c.is_zero() {
                    continue;
                }
                for (t, a) in acc.iter_mut().enumerate() {
                    *a = a.add(&c.mul(&b.value(i, j)[t]));
                }
            }
        }
        if acc.iter().any(|c| !c.is_zero()) {
            return None;
        }
    }
    let sect = ka.tq.quot.section_matrix();
    let cols: Vec<Vec<Scalar>> = (0..ka.k.dim)
        .map(|c| {
            let mut col = vec![Scalar::zero(f); kd];
            for i in 0..md {
                for j in 0..md {
                    let weight = sect.at(flat(md, i, j), c);
                    if weight.is_zero() {
                        continue;
                    }
                    for (t, a) in col.iter_mut().enumerate() {
                        *a = a.add(&weight.mul(&b.value(i, j)[t]));
                    }
                }
            }
            col
        })
        .collect();
    let mat = Mat::from_cols(f, cols);
    let hom = make_dbl_hom(&ka.k, &b.codomain, mat)
        .expect("a factoring of a compatible form intertwines both actions");
    for i in 0..md {
        for j in 0..md {
            assert_eq!(
                hom.matrix.apply(ka.b.value(i, j)),
                b.value(i, j).to_vec(),
                "the factoring must recover the original form"
            );
        }
    }
    Some(hom)
}

/// The swap x ⊗ y ↦ y ⊗ x descended to the value space of an involution.
///
/// Requires `alpha` to be an involution (otherwise the swap does not
/// preserve the relation space).  The result crosses the two actions,
/// squares to the identity, and makes the tautological pairing symmetric.
pub fn theta_alpha(ka: &KAlpha) -> Result<DblAntiAuto, CorError> {
    if !ka.alpha.is_involution() {
        return Err(CorError::AlphaNotInvolution);
    }
    let f = ka.b.module.algebra.field;
    let md = ka.tq.m;
    let swap = swap_matrix(f, md);
    let relations = reversal_relations(&ka.b.module, &ka.w, &ka.alpha);
    assert!(
        descends(&ka.tq.quot, &relations, &swap),
        "an involution always lets the swap descend"
    );
    let mat = ka
        .tq
        .quot
        .projection_matrix()
        .mul(&swap)
        .mul(&ka.tq.quot.section_matrix());
    let theta =
        make_dbl_anti_auto(&ka.k, mat).expect("the descended swap crosses the two actions");
    assert!(theta.involution, "the descended swap squares to the identity");
    for i in 0..md {
        for j in 0..md {
            assert_eq!(
                theta.matrix.apply(ka.b.value(i, j)),
                ka.b.value(j, i).to_vec(),
                "the tautological pairing is symmetric relative to the swap"
            );
        }
    }
    Ok(theta)
}

/// Search for an invertible map of value spaces carrying `b` to `b2`.
///
/// Both forms must live on the same module.  A similarity is an invertible
/// map F intertwining both action families with F(b(x, y)) = b2(x, y); the
/// linear conditions are solved exactly, and invertibility is then searched
/// within the affine solution set.  `ProvablyNone` is definitive (no such
/// map even exists linearly, or the value dimensions differ); `Inconclusive`
/// only reports an exhausted budget.
pub fn is_similar(b: &BilinearForm, b2: &BilinearForm, budget: u64) -> SpanSearch {
    is_similar_seeded(b, b2, budget, DEFAULT_SEARCH_SEED)
}

/// [`is_similar`] with a caller-chosen seed for the randomized phase of the
/// invertibility search, for reproducible runs under external drivers.
pub fn is_similar_seeded(
    b: &BilinearForm,
    b2: &BilinearForm,
    budget: u64,
    seed: u64,
) -> SpanSearch {
    assert_eq!(b.module, b2.module, "similarity compares forms on one module");
    let f = b.module.algebra.field;
    let kd = b.codomain.dim;
    if kd != b2.codomain.dim {
        return SpanSearch::ProvablyNone;
    }
    let md = b.module.dim;
    let d = b.module.algebra.dim;
    let unknowns = kd * kd;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    for s in 0..d {
        let pairs = [
            (&b.codomain.actions0[s], &b2.codomain.actions0[s]),
            (&b.codomain.actions1[s], &b2.codomain.actions1[s]),
        ];
        for (act, act2) in pairs {
            // F·act − act2·F = 0, entry by entry.
            for r in 0..kd {
                for c in 0..kd {
                    let mut row = vec![Scalar::zero(f); unknowns];
                    for t in 0..kd {
                        row[r * kd + t] = row[r * kd + t].add(act.at(t, c));
                        row[t * kd + c] = row[t * kd + c].sub(act2.at(r, t));
                    }
                    rows.push(row);
                    rhs.push(Scalar::zero(f));
                }
            }
        }
    }
    for i in 0..md {
        for j in 0..md {
            let (g, g2) = (b.value(i, j), b2.value(i, j));
            for r in 0..kd {
                let mut row = vec![Scalar::zero(f); unknowns];
                for (c, gc) in g.iter().enumerate() {
                    row[r * kd + c] = gc.clone();
                }
                rows.push(row);
                rhs.push(g2[r].clone());
            }
        }
    }
    let a = Mat::from_rows(f, rows);
    let Some(particular) = solve(&a, &Mat::col_vec(f, &rhs)) else {
        return SpanSearch::ProvablyNone;
    };
    let reshape = |v: &[Scalar]| Mat::from_fn(f, kd, kd, |r, c| v[r * kd + c].clone());
    let base = reshape(&particular.col(0));
    let gens: Vec<Mat> = kernel_basis(&a)
        .iter()
        .map(|kv| reshape(&kv.col(0)))
        .collect();
    find_invertible_affine(Some(&base), &gens, budget, seed)
}

/// Rebuild a right-regular form from its own reversal and test whether the
/// rebuilt form is similar to the original.
///
/// Returns the value space of the induced reversal together with the
/// similarity search outcome: `Found` certifies that `b` is, up to an
/// invertible change of values, the tautological pairing of its reversal.
pub fn generization(b: &BilinearForm, budget: u64) -> Result<(KAlpha, SpanSearch), CorError> {
    let report = adjoints(b);
    if !report.right_regular {
        return Err(CorError::NotRightRegular);
    }
    let w = endo_algebra(&b.module);
    let alpha =
        corresponding_anti_endo(b, &report, &w).expect("a right-regular form induces a reversal");
    let ka = tensor_alpha(&b.module, &w, &alpha)?;
    let status = is_similar(b, &ka.b, budget);
    Ok((ka, status))
}

/// Twist a reversal by an inner automorphism: alpha becomes
/// conjugation-by-`u` composed with alpha, and x ⊗ y ↦ x ⊗ u·y descends to
/// an isomorphism of the two value spaces.
pub fn inner_twist_iso(ka: &KAlpha, u: &[Scalar]) -> Result<(KAlpha, DblHom), CorError> {
    let wa = &ka.w.w;
    if !wa.is_invertible_elem(u) {
        return Err(CorError::NotInvertible);
    }
    let phi = inner_automorphism(wa, u).expect("conjugation by a unit is an automorphism");
    let beta = compose(wa, &phi, &ka.alpha)
        .expect("an automorphism composed with a reversal reverses products");
    let ka2 = tensor_alpha(&ka.b.module, &ka.w, &beta)?;
    let md = ka.tq.m;
    let lift = Mat::identity(wa.field, md).kron(&ka.w.rep_of(u));
    let relations = reversal_relations(&ka.b.module, &ka.w, &ka.alpha);
    assert!(
        descends(&ka2.tq.quot, &relations, &lift),
        "the unit twist maps old relations into new ones"
    );
    let mat = ka2
        .tq
        .quot
        .projection_matrix()
        .mul(&lift)
        .mul(&ka.tq.quot.section_matrix());
    let hom =
        make_dbl_hom(&ka.k, &ka2.k, mat).expect("the unit twist intertwines both action families");
    assert!(
        hom.matrix.invert().is_some(),
        "twisting by a unit is invertible"
    );
    Ok((ka2, hom))
}

/// Descend the twisted swap x ⊗ y ↦ y ⊗ lambda·x to the value space.
///
/// Hypotheses: lambda must satisfy alpha(alpha(w))·lambda = lambda·w for
/// every endomorphism w, and alpha(lambda)·lambda must be invertible.  The
/// result crosses the two actions, is an involution when
/// alpha(lambda)·lambda = 1, and satisfies
/// theta(b_alpha(x, y)) = b_alpha(y, lambda·x).
pub fn lambda_induced_theta(ka: &KAlpha, lambda: &[Scalar]) -> Result<DblAntiAuto, CorError> {
    let wa = &ka.w.w;
    let alpha = &ka.alpha;
    for t in 0..wa.dim {
        let e = wa.basis_elem(t);
        let lhs = wa.mul(&alpha.apply(&alpha.apply(&e)), lambda);
        let rhs = wa.mul(lambda, &e);
        if lhs != rhs {
            return Err(CorError::HypothesisViolated(
                "the twisting element must intertwine the squared reversal with the identity",
            ));
        }
    }
    let norm = wa.mul(&alpha.apply(lambda), lambda);
    if !wa.is_invertible_elem(&norm) {
        return Err(CorError::HypothesisViolated(
            "the reversal applied to the twisting element, times the element, must be invertible",
        ));
    }
    let f = wa.field;
    let md = ka.tq.m;
    let lmat = ka.w.rep_of(lambda);
    let twisted_swap = Mat::from_fn(f, md * md, md * md, |r, c| {
        let (a, bb) = (r / md, r % md);
        let (i, j) = (c / md, c % md);
        if a == j {
            lmat.at(bb, i).clone()
        } else {
            Scalar::zero(f)
        }
    });
    let relations = reversal_relations(&ka.b.module, &ka.w, alpha);
    assert!(
        descends(&ka.tq.quot, &relations, &twisted_swap),
        "the hypotheses force the twisted swap to descend"
    );
    let mat = ka
        .tq
        .quot
        .projection_matrix()
        .mul(&twisted_swap)
        .mul(&ka.tq.quot.section_matrix());
    let theta =
        make_dbl_anti_auto(&ka.k, mat).expect("the descended twisted swap crosses the two actions");
    if norm == wa.unity {
        assert!(theta.involution, "norm one forces an involution");
    }
    for i in 0..md {
        for j in 0..md {
            assert_eq!(
                theta.matrix.apply(ka.b.value(i, j)),
                ka.b.eval(&ka.b.module.basis_vec(j), &lmat.col(i)),
                "the twisted swap realizes the twisted symmetry of the pairing"
            );
        }
    }
    Ok(theta)
}

/// Check that (sigma, f) is a weak isometry from `b` to `b2`:
/// b2(sigma·x, sigma·y) = f(b(x, y)) with both maps invertible.
pub fn verify_weak_isometry(
    b: &BilinearForm,
    b2: &BilinearForm,
    sigma: &ModuleHom,
    f: &DblHom,
) -> bool {
    assert_eq!(sigma.source, b.module, "sigma must start at the source module");
    assert_eq!(sigma.target, b2.module, "sigma must land in the target module");
    assert_eq!(f.source, b.codomain, "f must start at the source values");
    assert_eq!(f.target, b2.codomain, "f must land in the target values");
    assert!(
        sigma.matrix.invert().is_some(),
        "weak isometries are invertible on the module"
    );
    assert!(
        f.matrix.invert().is_some(),
        "weak isometries are invertible on values"
    );
    let md = b.module.dim;
    (0..md).all(|i| {
        (0..md).all(|j| {
            b2.eval(&sigma.matrix.col(i), &sigma.matrix.col(j)) == f.matrix.apply(b.value(i, j))
        })
    })
}

/// Build the weak isometry between the tautological pairings of two
/// reversals conjugate under a unit u: sigma acts by u on the module and
/// the value map sends x ⊗ y to x ⊗ beta(u)·u·y.
pub fn inner_weak_isometry(
    ka: &KAlpha,
    kb: &KAlpha,
    u: &[Scalar],
) -> Result<(ModuleHom, DblHom), CorError> {
    if ka.b.module != kb.b.module || ka.w.w != kb.w.w {
        return Err(CorError::Mismatch);
    }
    let wa = &ka.w.w;
    if !wa.is_invertible_elem(u) {
        return Err(CorError::NotInvertible);
    }
    let phi = inner_automorphism(wa, u).expect("conjugation by a unit is an automorphism");
    if phi.mul(&ka.alpha.mat) != kb.alpha.mat.mul(&phi) {
        return Err(CorError::HypothesisViolated(
            "the two reversals must be conjugate under the given unit",
        ));
    }
    let sigma = make_hom(&ka.b.module, &kb.b.module, ka.w.rep_of(u))
        .expect("endomorphisms are module maps");
    let vu = wa.mul(&kb.alpha.apply(u), u);
    let lift = Mat::identity(wa.field, ka.tq.m).kron(&ka.w.rep_of(&vu));
    let relations = reversal_relations(&ka.b.module, &ka.w, &ka.alpha);
    assert!(
        descends(&kb.tq.quot, &relations, &lift),
        "conjugacy makes the twisted identity descend"
    );
    let mat = kb
        .tq
        .quot
        .projection_matrix()
        .mul(&lift)
        .mul(&ka.tq.quot.section_matrix());
    let hom = make_dbl_hom(&ka.k, &kb.k, mat)
        .expect("the induced value map intertwines both actions");
    assert!(hom.matrix.invert().is_some(), "the value map is invertible");
    Ok((sigma, hom))
}

/// Extend a reversal to n×n blocks: the algebra of n×n matrices over `w`,
/// with the reversal transposing blocks and applying `alpha` inside each.
pub fn t_n(w: &Algebra, alpha: &AntiEndo, n: usize) -> (Algebra, AntiEndo) {
    assert!(n >= 1, "block extensions need at least one block");
    assert_eq!(alpha.mat.rows, w.dim, "the reversal must live on the algebra");
    let f = w.field;
    let d = w.dim;
    let dim = n * n * d;
    let idx = |i: usize, j: usize, a: usize| (i * n + j) * d + a;
    let mut sc = vec![Scalar::zero(f); dim * dim * dim];
    for a in 0..d {
        for b in 0..d {
            let prod = w.mul(&w.basis_elem(a), &w.basis_elem(b));
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        for (c, pc) in prod.iter().enumerate() {
                            if !pc.is_zero() {
                                sc[(idx(i, j, a) * dim + idx(j, l, b)) * dim + idx(i, l, c)] =
                                    pc.clone();
                            }
                        }
                    }
                }
            }
        }
    }
    let mut unity = vec![Scalar::zero(f); dim];
    for i in 0..n {
        for (c, uc) in w.unity.iter().enumerate() {
            unity[idx(i, i, c)] = uc.clone();
        }
    }
    let alg = make_algebra(f, dim, sc, unity).expect("the block extension is an algebra");
    let tmat = Mat::from_fn(f, dim, dim, |row, col| {
        let (rb, rc) = (row / d, row % d);
        let (cb, ca) = (col / d, col % d);
        if rb / n == cb % n && rb % n == cb / n {
            alpha.mat.at(rc, ca).clone()
        } else {
            Scalar::zero(f)
        }
    });
    let anti = make_anti_endo(&alg, tmat).expect("the block reversal reverses products");
    (alg, anti)
}

/// The orthogonal sum of n copies of a form.
pub fn n_fold(b: &BilinearForm, n: usize) -> BilinearForm {
    assert!(n >= 1, "sums need at least one summand");
    let mut acc = b.clone();
    for _ in 1..n {
        acc = orthogonal_sum(&acc, b).expect("copies of one form share their value module");
    }
    acc
}

/// Transport the block extension of a reversal onto the endomorphism
/// algebra of an n-fold direct sum.
///
/// `w` is the endomorphism algebra of a module M, `w2` that of M^n with the
/// summand copies laid out consecutively.  The block embedding of w-matrices
/// identifies the abstract n×n extension with `w2`; the returned reversal is
/// the conjugate of the block reversal under that identification.
pub fn transport_t_n(
    w: &EndoAlgebra,
    alpha: &AntiEndo,
    w2: &EndoAlgebra,
    n: usize,
) -> Result<AntiEndo, CorError> {
    let f = w.w.field;
    let md = w.rep[0].rows;
    if w2.rep[0].rows != n * md || w2.w.dim != n * n * w.w.dim {
        return Err(CorError::Mismatch);
    }
    let (_, tn) = t_n(&w.w, alpha, n);
    let d = w.w.dim;
    let mut cols = Vec::with_capacity(n * n * d);
    for i in 0..n {
        for j in 0..n {
            for a in 0..d {
                let mut block = Mat::zero(f, n * md, n * md);
                for r in 0..md {
                    for c in 0..md {
                        let v = w.rep[a].at(r, c);
                        if !v.is_zero() {
                            block.set(i * md + r, j * md + c, v.clone());
                        }
                    }
                }
                cols.push(w2.coords_of(&block).ok_or(CorError::Mismatch)?);
            }
        }
    }
    let cmat = Mat::from_cols(f, cols);
    let cinv = cmat.invert().ok_or(CorError::Mismatch)?;
    let t2 = cmat.mul(&tn.mat).mul(&cinv);
    let anti = make_anti_endo(&w2.w, t2)
        .expect("transport along an algebra isomorphism preserves reversal");
    Ok(anti)
}

/// The balanced-tensor description of a value space.
pub struct WTensor {
    /// Quotient presentation of the alpha-twisted module tensored with
    /// itself over the endomorphism algebra, on the flat tensor basis.
    pub tq: TensorQuotient,
    /// Its double module: side 0 acts through the right tensor leg,
    /// side 1 through the left.
    pub k: DoubleModule,
    /// The swap x ⊗ y ↦ y ⊗ x as an isomorphism onto the reversal's value
    /// space.
    pub delta: DblHom,
    /// Matrix of x ⊗ w ↦ (y ↦ class of x ⊗ w·y), from the quotient of the
    /// twisted module tensored with the endomorphism algebra into the space
    /// of module maps M → (side 0 of `k`), in the morphism-space basis.
    pub gamma: Mat,
    pub gamma_bijective: bool,
}

/// Present the value space as a balanced tensor product over the
/// endomorphism algebra and certify the compatibilities of that picture.
///
/// Balancing quotients M ⊗ M by  alpha(w)·x ⊗ y − x ⊗ w·y, so the left leg
/// carries the twisted W-action.  The swap identifies the result with the
/// value space of `ka`, exchanging the two base-algebra actions, and the
/// multiplication map gamma lands in Hom(M, side 0) so that pairing against
/// the module and multiplying inside the tensor agree through the swap.
pub fn tensor_over_w(ka: &KAlpha) -> WTensor {
    let m = &ka.b.module;
    let w = &ka.w;
    let alpha = &ka.alpha;
    let f = m.algebra.field;
    let md = m.dim;
    let d = w.w.dim;
    let mm = md * md;
    let mut rows = Vec::with_capacity(d * mm);
    for a in 0..d {
        let am = w.rep_of(&alpha.apply(&w.w.basis_elem(a)));
        let wm = &w.rep[a];
        for i in 0..md {
            for j in 0..md {
                let mut row = vec![Scalar::zero(f); mm];
                for u in 0..md {
                    let c = am.at(u, i);
                    if !c.is_zero() {
                        row[flat(md, u, j)] = row[flat(md, u, j)].add(c);
                    }
                }
                for v in 0..md {
                    let c = wm.at(v, j);
                    if !c.is_zero() {
                        row[flat(md, i, v)] = row[flat(md, i, v)].sub(c);
                    }
                }
                rows.push(row);
            }
        }
    }
    let relations = Mat::from_rows(f, rows);
    let quot = Quotient::from_relations(&relations);
    let proj = quot.projection_matrix();
    let sect = quot.section_matrix();
    let eye = Mat::identity(f, md);
    let left = |s: usize| m.actions[s].kron(&eye);
    let right = |s: usize| eye.kron(&m.actions[s]);
    for s in 0..m.algebra.dim {
        assert!(
            descends(&quot, &relations, &left(s)) && descends(&quot, &relations, &right(s)),
            "leg actions commute with balancing over endomorphisms"
        );
    }
    let a0: Vec<Mat> = (0..m.algebra.dim)
        .map(|s| proj.mul(&right(s)).mul(&sect))
        .collect();
    let a1: Vec<Mat> = (0..m.algebra.dim)
        .map(|s| proj.mul(&left(s)).mul(&sect))
        .collect();
    let k = make_double(&m.algebra, a0, a1).expect("balanced tensor actions form a double module");
    let swap = swap_matrix(f, md);
    assert!(
        descends(&ka.tq.quot, &relations, &swap),
        "the swap always carries balancing into reversal relations"
    );
    let dmat = ka
        .tq
        .quot
        .projection_matrix()
        .mul(&swap)
        .mul(&sect);
    let delta = make_dbl_hom(&k, &ka.k, dmat).expect("the swap exchanges the two leg actions");
    assert!(
        delta.matrix.invert().is_some(),
        "the swap identifies the two quotients"
    );

    // The multiplication map, defined on the twisted module tensored with
    // the endomorphism algebra itself (flat index i·d + t for x_i ⊗ w_t).
    let dd = md * d;
    let mut dom_rows = Vec::with_capacity(d * dd);
    for a in 0..d {
        let am = w.rep_of(&alpha.apply(&w.w.basis_elem(a)));
        for i in 0..md {
            for t in 0..d {
                let mut row = vec![Scalar::zero(f); dd];
                for u in 0..md {
                    let c = am.at(u, i);
                    if !c.is_zero() {
                        row[u * d + t] = row[u * d + t].add(c);
                    }
                }
                let prod = w.w.mul(&w.w.basis_elem(a), &w.w.basis_elem(t));
                for (c, pc) in prod.iter().enumerate() {
                    if !pc.is_zero() {
                        row[i * d + c] = row[i * d + c].sub(pc);
                    }
                }
                dom_rows.push(row);
            }
        }
    }
    let dom_relations = Mat::from_rows(f, dom_rows);
    let dom_quot = Quotient::from_relations(&dom_relations);
    let side0 = side_module(&k, 0);
    let homs = hom_space(m, &side0).expect("the morphism space is computable");
    let hom_mats: Vec<Mat> = homs.iter().map(|h| h.matrix.clone()).collect();
    let mut gcols = Vec::with_capacity(dd);
    let mut images = Vec::with_capacity(dd);
    for i in 0..md {
        for t in 0..d {
            let cols: Vec<Vec<Scalar>> = (0..md)
                .map(|j| {
                    let mut v = vec![Scalar::zero(f); mm];
                    for u in 0..md {
                        let c = w.rep[t].at(u, j);
                        if !c.is_zero() {
                            v[flat(md, i, u)] = c.clone();
                        }
                    }
                    quot.project(&v)
                })
                .collect();
            let h = Mat::from_cols(f, cols);
            gcols.push(span_coords(f, &hom_mats, &h).expect("multiplication maps are morphisms"));
            images.push(h);
        }
    }
    let gamma_full = Mat::from_cols(f, gcols);
    for r in 0..dom_relations.rows {
        assert!(
            gamma_full
                .apply(&dom_relations.row(r))
                .iter()
                .all(|c| c.is_zero()),
            "multiplication is balanced over endomorphisms"
        );
    }
    let gamma = gamma_full.mul(&dom_quot.section_matrix());
    let gamma_bijective = gamma.is_square() && gamma.invert().is_some();

    // Pairing against the module and multiplying inside the tensor agree:
    // the right adjoint of the pairing, applied to alpha(w)·x, matches the
    // swapped multiplication map of x ⊗ w in the dual's own coordinates.
    let report = adjoints(&ka.b);
    let dual_mats: Vec<Mat> = report.dual1.basis.iter().map(|h| h.matrix.clone()).collect();
    for i in 0..md {
        for t in 0..d {
            let twisted = w.rep_of(&alpha.apply(&w.w.basis_elem(t))).col(i);
            let lhs = report.rad.matrix.apply(&twisted);
            let mapped = delta.matrix.mul(&images[i * d + t]);
            let rhs = span_coords(f, &dual_mats, &mapped).expect("the image pairs into the dual");
            assert_eq!(lhs, rhs, "multiplication and pairing agree through the swap");
        }
    }
    WTensor {
        tq: TensorQuotient { m: md, quot },
        k,
        delta,
        gamma,
        gamma_bijective,
    }
}

/// Sufficient conditions under which the tautological pairing of a reversal
/// is regular, each decided exactly on the given data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityPrediction {
    /// The module is finitely generated projective over the base algebra.
    pub module_fg_projective: bool,
    /// The alpha-twisted module is finitely generated projective over the
    /// endomorphism algebra.
    pub twist_fg_projective: bool,
    /// The endomorphism algebra is semisimple.
    pub endo_semisimple: bool,
    /// The module generates its category and the reversal is bijective.
    pub generator_with_bijective_reversal: bool,
    pub predicts_right_regular: bool,
    pub predicts_left_regular: bool,
    /// The first clause that fired, if any.
    pub clause: Option<&'static str>,
}

/// Evaluate the regularity clauses for the pairing induced by `alpha`.
///
/// The first three clauses each guarantee right regularity; the generator
/// clause guarantees regularity on both sides.  When no clause fires the
/// predictor stays silent — the pairing may still be regular or not.
pub fn regularity_predictor(
    m: &RightModule,
    w: &EndoAlgebra,
    alpha: &AntiEndo,
) -> RegularityPrediction {
    let module_fg_projective = is_fg_projective(m);
    let twisted = twist(m, w, alpha).expect("the reversal twists the module over endomorphisms");
    let twist_fg_projective = is_fg_projective(&twisted);
    let endo_semisimple = is_semisimple(&w.w);
    let generator_with_bijective_reversal = is_generator(m) && alpha.bijective;
    let clause = if module_fg_projective {
        Some("module-projective")
    } else if twist_fg_projective {
        Some("twist-projective")
    } else if endo_semisimple {
        Some("endo-semisimple")
    } else if generator_with_bijective_reversal {
        Some("generator-bijective")
    } else {
        None
    };
    RegularityPrediction {
        module_fg_projective,
        twist_fg_projective,
        endo_semisimple,
        generator_with_bijective_reversal,
        predicts_right_regular: clause.is_some(),
        predicts_left_regular: generator_with_bijective_reversal,
        clause,
    }
}

/// For a free module, pull the reversal of the endomorphism algebra back to
/// a reversal of the base algebra itself.
///
/// The value space of a reversal over a free module is a twisted copy of
/// the base algebra: identifying its side-1 module with the regular module
/// picks out a class k, and solving  (k ∘₀ e_i) = Σ_c gamma_c(e_i) (k ∘₁ e_c)
/// recovers the base reversal gamma.  The extraction verifies that the
/// standard value space of gamma is isomorphic to the given one.
pub fn gamma_of_alpha(ka: &KAlpha, budget: u64) -> Result<AntiEndo, CorError> {
    let m = &ka.b.module;
    let r = &m.algebra;
    let d = r.dim;
    if d == 0 || !m.dim.is_multiple_of(d) {
        return Err(CorError::NotFree);
    }
    let n = m.dim / d;
    if n == 0 {
        return Err(CorError::NotFree);
    }
    let reg = regular_module(r);
    let mut free = reg.clone();
    for _ in 1..n {
        free = direct_sum(&free, &reg).expect("sums over one algebra combine");
    }
    let SpanSearch::Found { .. } = is_module_isomorphic(m, &free, budget) else {
        return Err(CorError::NotFree);
    };
    let side1 = side_module(&ka.k, 1);
    let SpanSearch::Found { element, .. } = is_module_isomorphic(&reg, &side1, budget) else {
        return Err(CorError::RankOneIdentificationFailed);
    };
    let k0 = element.apply(&r.unity);
    let f = r.field;
    let bmat = Mat::from_cols(f, (0..d).map(|c| ka.k.actions1[c].apply(&k0)).collect());
    let cmat = Mat::from_cols(f, (0..d).map(|i| ka.k.actions0[i].apply(&k0)).collect());
    let Some(binv) = bmat.invert() else {
        return Err(CorError::RankOneIdentificationFailed);
    };
    let gmat = binv.mul(&cmat);
    let Ok(gamma) = make_anti_endo(r, gmat) else {
        return Err(CorError::RankOneIdentificationFailed);
    };
    assert_eq!(
        gamma.bijective, ka.alpha.bijective,
        "the base reversal is bijective exactly when the endomorphism one is"
    );
    let standard = standard_double(r, &gamma);
    assert!(
        !matches!(
            is_dbl_isomorphic(&standard, &ka.k, budget),
            SpanSearch::ProvablyNone
        ),
        "the standard value space of the extracted reversal matches the given one"
    );
    Ok(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        enumerate_anti_autos, enumerate_anti_endos, field_algebra, is_inner_equivalent,
        matrix_algebra, product_algebra, structured_subalgebra, swap_anti_endo,
        transpose_anti_endo, InnerEquivalence,
    };
    use crate::modrep::{make_module, quotient_module};
    use crate::scalars::FieldSpec;

    fn fp(p: u64) -> FieldSpec {
        FieldSpec::Prime(p)
    }

    fn rat() -> FieldSpec {
        FieldSpec::Rationals
    }

    /// A plain 2-dimensional vector space over its field, whose
    /// endomorphism algebra is the full 2×2 matrix algebra.
    fn plane(f: FieldSpec) -> (RightModule, EndoAlgebra) {
        let m = make_module(&field_algebra(f), vec![Mat::identity(f, 2)])
            .expect("a vector space is a module over its field");
        let w = endo_algebra(&m);
        assert_eq!(w.w.dim, 4);
        (m, w)
    }

    /// Transplant a concrete reversal of the representation matrices onto
    /// the abstract endomorphism algebra.
    fn transported(w: &EndoAlgebra, f: impl Fn(&Mat) -> Mat) -> AntiEndo {
        let field = w.w.field;
        let cols = (0..w.w.dim)
            .map(|t| {
                let img = f(&w.rep_of(&w.w.basis_elem(t)));
                w.coords_of(&img).expect("the image stays in the algebra")
            })
            .collect();
        make_anti_endo(&w.w, Mat::from_cols(field, cols))
            .expect("the transported map reverses products")
    }

    fn identity_reversal(r: &Algebra) -> AntiEndo {
        make_anti_endo(r, Mat::identity(r.field, r.dim))
            .expect("the identity reverses products of a commutative algebra")
    }

    /// A scalar-valued form on a vector space over its field.
    fn scalar_form(m: &RightModule, gram: &Mat) -> BilinearForm {
        let k = standard_double(&m.algebra, &identity_reversal(&m.algebra));
        let g = (0..m.dim)
            .map(|i| (0..m.dim).map(|j| vec![gram.at(i, j).clone()]).collect())
            .collect();
        make_form(m, &k, g).expect("scalar grams are always compatible")
    }

    /// The row plane F² over the upper triangular 2×2 algebra, pairing into
    /// the full matrix square by outer products (flat row-major values).
    struct RowPairing {
        m: RightModule,
        k: DoubleModule,
        b: BilinearForm,
    }

    fn row_pairing(field: FieldSpec) -> RowPairing {
        let mask = vec![vec![true, true], vec![false, true]];
        let (r, positions) =
            structured_subalgebra(field, 2, &mask).expect("triangular pattern closes");
        let units: Vec<Mat> = positions
            .iter()
            .map(|&(i, j)| {
                let mut u = Mat::zero(field, 2, 2);
                u.set(i, j, Scalar::one(field));
                u
            })
            .collect();
        let m = make_module(&r, units.iter().map(|u| u.transpose()).collect())
            .expect("row vectors form a right module");
        let eye = Mat::identity(field, 2);
        let a0 = units.iter().map(|u| u.transpose().kron(&eye)).collect();
        let a1 = units.iter().map(|u| eye.kron(&u.transpose())).collect();
        let k = make_double(&r, a0, a1).expect("matrix space carries both actions");
        let gram = (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| {
                        let mut v = vec![Scalar::zero(field); 4];
                        v[2 * i + j] = Scalar::one(field);
                        v
                    })
                    .collect()
            })
            .collect();
        let b = make_form(&m, &k, gram).expect("outer products are compatible");
        RowPairing { m, k, b }
    }

    /// Quotient the outer-product pairing by the span of the given flat
    /// matrix positions.
    fn quotient_pairing(fx: &RowPairing, kill: &[usize]) -> BilinearForm {
        let field = fx.m.algebra.field;
        let vecs: Vec<Vec<Scalar>> = kill
            .iter()
            .map(|&t| {
                let mut v = vec![Scalar::zero(field); 4];
                v[t] = Scalar::one(field);
                v
            })
            .collect();
        let (kq, proj) = crate::dblmod::quotient_double(&fx.k, &vecs);
        let gram = (0..2)
            .map(|i| (0..2).map(|j| proj.col(2 * i + j)).collect())
            .collect();
        make_form(&fx.m, &kq, gram).expect("quotient values stay compatible")
    }

    #[test]
    fn one_dimensional_module_gives_the_scalar_square() {
        let m = make_module(&field_algebra(rat()), vec![Mat::identity(rat(), 1)]).unwrap();
        let w = endo_algebra(&m);
        let ka = tensor_alpha(&m, &w, &identity_reversal(&w.w)).unwrap();
        assert_eq!(ka.k.dim, 1);
        assert!(!ka.b.value(0, 0)[0].is_zero());
        assert!(adjoints(&ka.b).right_regular);
    }

    #[test]
    fn commutative_triple_with_identity_reversal_degenerates() {
        // R spanned by the identity and two matrix units in the first
        // column, acting on rows of F³; its endomorphism algebra is R again
        // and the induced pairing kills the common image coordinate.
        let f = rat();
        let actions = vec![
            Mat::identity(f, 3),
            Mat::from_i64(f, &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]),
            Mat::from_i64(f, &[&[0, 0, 1], &[0, 0, 0], &[0, 0, 0]]),
        ];
        let sc: Vec<i64> = vec![
            // products of basis elements g0 = 1, g1, g2: only unity acts
            1, 0, 0, 0, 1, 0, 0, 0, 1, // g0·g_j
            0, 1, 0, 0, 0, 0, 0, 0, 0, // g1·g_j
            0, 0, 1, 0, 0, 0, 0, 0, 0, // g2·g_j
        ];
        let r = crate::algebra::make_algebra_i64(f, 3, &sc, &[1, 0, 0]).unwrap();
        let m = make_module(&r, actions).unwrap();
        let w = endo_algebra(&m);
        assert_eq!(w.w.dim, 3);
        assert!(w.w.is_commutative());
        let ka = tensor_alpha(&m, &w, &identity_reversal(&w.w)).unwrap();
        assert_eq!(ka.k.dim, 4);
        for i in 0..3 {
            assert!(ka.b.value(i, 0).iter().all(|c| c.is_zero()));
        }
        let report = adjoints(&ka.b);
        assert!(!report.right_injective);
        assert!(!report.left_injective);
        let prediction = regularity_predictor(&m, &w, &ka.alpha);
        assert!(!prediction.module_fg_projective);
        assert!(!prediction.twist_fg_projective);
        assert!(!prediction.endo_semisimple);
        assert!(!prediction.generator_with_bijective_reversal);
        assert_eq!(prediction.clause, None);
        assert!(!prediction.predicts_right_regular);
    }

    #[test]
    fn factoring_the_tautological_pairing_is_the_identity() {
        let (m, w) = plane(fp(3));
        let alpha = transported(&w, Mat::transpose);
        let ka = tensor_alpha(&m, &w, &alpha).unwrap();
        let hom = universal_map(&ka.b, &ka).expect("a pairing factors through itself");
        assert!(hom.matrix.is_identity());
    }

    #[test]
    fn universal_map_detects_compatibility() {
        let (m, w) = plane(fp(3));
        let alpha = transported(&w, Mat::transpose);
        let ka = tensor_alpha(&m, &w, &alpha).unwrap();
        assert_eq!(ka.k.dim, 1);
        let dot = scalar_form(&m, &Mat::identity(fp(3), 2));
        let hom = universal_map(&dot, &ka).expect("symmetric scalar grams respect the transpose");
        assert!(hom.matrix.invert().is_some());
        // A non-central gram fails b(w·x, y) = b(x, alpha(w)·y).
        let skew = scalar_form(&m, &Mat::from_i64(fp(3), &[&[1, 0], &[0, 2]]));
        assert!(universal_map(&skew, &ka).is_none());
    }

    #[test]
    fn incidence_form_is_right_generic() {
        let rs = crate::biform::incidence_reflection_space(rat());
        let (ka, status) = generization(&rs.b, 50_000).unwrap();
        assert_eq!(ka.k.dim, 5);
        assert!(matches!(status, SpanSearch::Found { .. }));
        let hom = universal_map(&rs.b, &ka).expect("the reflection pairing is compatible");
        assert!(hom.matrix.invert().is_some());
        let wt = tensor_over_w(&ka);
        assert_eq!(wt.tq.dim(), 5);
    }

    #[test]
    fn swap_symmetry_signs() {
        let (m, w) = plane(fp(3));
        // Orthogonal style: the transpose makes the pairing symmetric.
        let ka = tensor_alpha(&m, &w, &transported(&w, Mat::transpose)).unwrap();
        assert_eq!(ka.k.dim, 1);
        let theta = theta_alpha(&ka).unwrap();
        assert!(theta.matrix.is_identity());
        assert!(theta.involution);
        // Symplectic style: conjugated transpose makes it alternating.
        let j = Mat::from_i64(fp(3), &[&[0, 1], &[2, 0]]);
        let jinv = j.invert().unwrap();
        let symp = transported(&w, |a| j.mul(&a.transpose()).mul(&jinv));
        let ks = tensor_alpha(&m, &w, &symp).unwrap();
        assert_eq!(ks.k.dim, 1);
        let ts = theta_alpha(&ks).unwrap();
        assert_eq!(ts.matrix, Mat::identity(fp(3), 1).neg());
        assert!(ts.involution);
        // A conjugated transpose that fails to square to the identity.
        let u = Mat::from_i64(fp(3), &[&[1, 1], &[0, 1]]);
        let uinv = u.invert().unwrap();
        let twisted = transported(&w, |a| u.mul(&a.transpose()).mul(&uinv));
        assert!(!twisted.is_involution());
        let kt = tensor_alpha(&m, &w, &twisted).unwrap();
        assert_eq!(theta_alpha(&kt).unwrap_err(), CorError::AlphaNotInvolution);
    }

    #[test]
    fn quotient_forms_walk_the_regularity_ladder() {
        let fx = row_pairing(fp(2));
        let full = adjoints(&fx.b);
        assert!(full.right_regular && full.left_regular);

        let zero = quotient_pairing(&fx, &[0, 1, 2, 3]);
        assert_eq!(zero.codomain.dim, 0);
        let rz = adjoints(&zero);
        assert!(!rz.right_regular && !rz.left_regular);

        let top_killed = quotient_pairing(&fx, &[2, 3]); // rows through the radical survive
        let rt = adjoints(&top_killed);
        assert!(rt.right_regular);
        assert!(!rt.left_injective);

        let col_killed = quotient_pairing(&fx, &[1, 3]);
        let rc = adjoints(&col_killed);
        assert!(!rc.right_injective);
        assert!(rc.left_regular);

        let corner = quotient_pairing(&fx, &[3]);
        let rk = adjoints(&corner);
        assert!(rk.right_regular && rk.left_regular);
    }

    #[test]
    fn similarity_distinguishes_the_quotient_forms() {
        let fx = row_pairing(fp(2));
        let corner = quotient_pairing(&fx, &[3]);
        let top_killed = quotient_pairing(&fx, &[2, 3]);
        let col_killed = quotient_pairing(&fx, &[1, 3]);
        assert!(matches!(
            is_similar(&corner, &corner, 1 << 20),
            SpanSearch::Found { .. }
        ));
        // Different value dimensions: settled before any search.
        assert!(matches!(
            is_similar(&corner, &top_killed, 1 << 20),
            SpanSearch::ProvablyNone
        ));
        // Equal dimensions, but no linear map can carry one gram to the
        // other: a zero value would have to hit a nonzero one.
        assert!(matches!(
            is_similar(&top_killed, &col_killed, 1 << 20),
            SpanSearch::ProvablyNone
        ));
        assert!(matches!(
            is_similar(&fx.b, &fx.b, 1 << 20),
            SpanSearch::Found { .. }
        ));
    }

    #[test]
    fn regular_quotient_form_is_not_generic() {
        let fx = row_pairing(fp(2));
        let corner = quotient_pairing(&fx, &[3]);
        let (ka, status) = generization(&corner, 1 << 20).unwrap();
        assert_eq!(ka.k.dim, 4);
        assert!(matches!(status, SpanSearch::ProvablyNone));

        let (kf, status_full) = generization(&fx.b, 1 << 20).unwrap();
        assert_eq!(kf.k.dim, 4);
        assert!(matches!(status_full, SpanSearch::Found { .. }));

        let zero = quotient_pairing(&fx, &[0, 1, 2, 3]);
        assert_eq!(
            generization(&zero, 1 << 20).unwrap_err(),
            CorError::NotRightRegular
        );
    }

    #[test]
    fn units_twist_the_value_space() {
        let (m, w) = plane(fp(2));
        let alpha = transported(&w, Mat::transpose);
        let ka = tensor_alpha(&m, &w, &alpha).unwrap();
        assert_eq!(ka.k.dim, 1);

        let one = w.w.unity.clone();
        let (same, id_hom) = inner_twist_iso(&ka, &one).unwrap();
        assert_eq!(same.alpha, ka.alpha);
        assert!(id_hom.matrix.is_identity());

        let flip = w
            .coords_of(&Mat::from_i64(fp(2), &[&[0, 1], &[1, 0]]))
            .unwrap();
        let (twisted, hom) = inner_twist_iso(&ka, &flip).unwrap();
        assert_ne!(twisted.alpha, ka.alpha);
        assert_eq!(hom.matrix.rows, twisted.k.dim);

        let nilpotent = w
            .coords_of(&Mat::from_i64(fp(2), &[&[0, 1], &[0, 0]]))
            .unwrap();
        assert_eq!(
            inner_twist_iso(&ka, &nilpotent).unwrap_err(),
            CorError::NotInvertible
        );
    }

    #[test]
    fn inner_orbit_of_reversals_transfers_to_value_spaces() {
        let (m, w) = plane(fp(2));
        let autos = enumerate_anti_autos(&w.w, 1 << 24).unwrap();
        assert_eq!(autos.len(), 6);
        let base = &autos[0];
        let ka = tensor_alpha(&m, &w, base).unwrap();
        for beta in &autos {
            let InnerEquivalence::Equivalent { u } =
                is_inner_equivalent(&w.w, base, beta, 1 << 20)
            else {
                panic!("all reversals of a full matrix algebra are conjugate");
            };
            let (kb, hom) = inner_twist_iso(&ka, &u).unwrap();
            assert_eq!(kb.alpha.mat, beta.mat);
            assert_eq!(hom.matrix.rows, kb.k.dim);
        }
    }

    #[test]
    fn product_identity_and_swap_give_different_value_spaces() {
        let f = fp(2);
        let r = product_algebra(&field_algebra(f), &field_algebra(f));
        let m = regular_module(&r);
        let rep = (0..2).map(|i| r.lmul_mat(&r.basis_elem(i))).collect();
        let w = crate::modrep::make_endo_algebra(&m, r.clone(), rep).unwrap();
        let ka_id = tensor_alpha(&m, &w, &identity_reversal(&r)).unwrap();
        let swap = swap_anti_endo(&r, 1).unwrap();
        let ka_swap = tensor_alpha(&m, &w, &swap).unwrap();
        assert_eq!(ka_id.k.dim, 2);
        assert_eq!(ka_swap.k.dim, 2);
        assert!(matches!(
            is_dbl_isomorphic(&ka_id.k, &ka_swap.k, 1 << 20),
            SpanSearch::ProvablyNone
        ));
    }

    #[test]
    fn twisted_swaps_scale_the_symmetry() {
        let (m, w) = plane(rat());
        let ka = tensor_alpha(&m, &w, &transported(&w, Mat::transpose)).unwrap();
        let theta = theta_alpha(&ka).unwrap();

        let one = w.w.unity.clone();
        let by_one = lambda_induced_theta(&ka, &one).unwrap();
        assert_eq!(by_one.matrix, theta.matrix);

        let minus: Vec<Scalar> = one.iter().map(|c| c.neg()).collect();
        let by_minus = lambda_induced_theta(&ka, &minus).unwrap();
        assert_eq!(by_minus.matrix, theta.matrix.neg());
        assert!(by_minus.involution);

        let off_center = w
            .coords_of(&Mat::from_i64(rat(), &[&[0, 1], &[0, 0]]))
            .unwrap();
        assert!(matches!(
            lambda_induced_theta(&ka, &off_center).unwrap_err(),
            CorError::HypothesisViolated(msg) if msg.contains("squared reversal")
        ));

        let zero = vec![Scalar::zero(rat()); 4];
        assert!(matches!(
            lambda_induced_theta(&ka, &zero).unwrap_err(),
            CorError::HypothesisViolated(msg) if msg.contains("invertible")
        ));
    }

    #[test]
    fn weak_isometries_verify_and_fail() {
        let (m, w) = plane(fp(3));
        let alpha = transported(&w, Mat::transpose);
        let ka = tensor_alpha(&m, &w, &alpha).unwrap();
        let u = w
            .coords_of(&Mat::from_i64(fp(3), &[&[1, 1], &[0, 1]]))
            .unwrap();
        // Conjugating the reversal by the unit keeps a weak isometry in reach.
        let phi = inner_automorphism(&w.w, &u).unwrap();
        let conj = make_anti_endo(&w.w, phi.mul(&alpha.mat).mul(&phi.invert().unwrap())).unwrap();
        assert_ne!(conj.mat, alpha.mat);
        let kb = tensor_alpha(&m, &w, &conj).unwrap();
        let (sigma, f) = inner_weak_isometry(&ka, &kb, &u).unwrap();
        assert!(verify_weak_isometry(&ka.b, &kb.b, &sigma, &f));

        // The same module map with an identity value map is not an isometry.
        let shear = make_hom(&m, &m, Mat::from_i64(fp(3), &[&[1, 1], &[0, 1]])).unwrap();
        let id_values = make_dbl_hom(&ka.k, &ka.k, Mat::identity(fp(3), 1)).unwrap();
        assert!(!verify_weak_isometry(&ka.b, &ka.b, &shear, &id_values));

        // Reversals that are not conjugate under the offered unit are refused.
        assert!(matches!(
            inner_weak_isometry(&ka, &ka, &u).unwrap_err(),
            CorError::HypothesisViolated(_)
        ));
    }

    #[test]
    fn block_extension_of_the_trivial_reversal_is_the_transpose() {
        let f = fp(2);
        let scalars = field_algebra(f);
        let (ext, anti) = t_n(&scalars, &identity_reversal(&scalars), 2);
        assert_eq!(ext, matrix_algebra(f, 2));
        assert_eq!(anti.mat, transpose_anti_endo(&ext, 2).mat);

        let m3 = matrix_algebra(fp(3), 2);
        let tr = transpose_anti_endo(&m3, 2);
        let (same, same_anti) = t_n(&m3, &tr, 1);
        assert_eq!(same, m3);
        assert_eq!(same_anti.mat, tr.mat);
    }

    #[test]
    fn block_reversal_transports_to_the_doubled_module() {
        let f = fp(2);
        let r = matrix_algebra(f, 2);
        let m = crate::modrep::natural_module(&r, 2);
        let w = endo_algebra(&m);
        assert_eq!(w.w.dim, 1);
        let alpha = identity_reversal(&w.w);
        let ka = tensor_alpha(&m, &w, &alpha).unwrap();
        assert_eq!(ka.k.dim, 4);

        let m2 = direct_sum(&m, &m).unwrap();
        let w2 = endo_algebra(&m2);
        assert_eq!(w2.w.dim, 4);
        let t2 = transport_t_n(&w, &alpha, &w2, 2).unwrap();
        let ka2 = tensor_alpha(&m2, &w2, &t2).unwrap();
        assert_eq!(ka2.k.dim, 4);

        let doubled = n_fold(&ka.b, 2);
        assert_eq!(doubled.module, m2);
        assert!(matches!(
            is_similar(&doubled, &ka2.b, 1 << 22),
            SpanSearch::Found { .. }
        ));
    }

    #[test]
    fn balanced_tensor_matches_the_value_space() {
        // Free rank one over the triangular algebra, with the reflection.
        let f = fp(2);
        let mask = vec![vec![true, true], vec![false, true]];
        let (r, _) = structured_subalgebra(f, 2, &mask).unwrap();
        let m = regular_module(&r);
        let rep = (0..3).map(|i| r.lmul_mat(&r.basis_elem(i))).collect();
        let w = crate::modrep::make_endo_algebra(&m, r.clone(), rep).unwrap();
        let refl = make_anti_endo(
            &r,
            Mat::from_i64(f, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]),
        )
        .unwrap();
        let ka = tensor_alpha(&m, &w, &refl).unwrap();
        assert_eq!(ka.k.dim, 3);
        let wt = tensor_over_w(&ka);
        assert_eq!(wt.tq.dim(), 3);
        assert!(wt.gamma_bijective);

        // The natural plane over the full matrix algebra.
        let r2 = matrix_algebra(f, 2);
        let nat = crate::modrep::natural_module(&r2, 2);
        let wn = endo_algebra(&nat);
        let kn = tensor_alpha(&nat, &wn, &identity_reversal(&wn.w)).unwrap();
        let wtn = tensor_over_w(&kn);
        assert_eq!(wtn.tq.dim(), 4);
        assert!(wtn.gamma_bijective);
    }

    #[test]
    fn predictor_clauses_fire_where_promised() {
        // Free module over its field: every clause holds.
        let (m, w) = plane(fp(2));
        let alpha = transported(&w, Mat::transpose);
        let p = regularity_predictor(&m, &w, &alpha);
        assert!(p.module_fg_projective);
        assert_eq!(p.clause, Some("module-projective"));
        assert!(p.predicts_right_regular && p.predicts_left_regular);
        let ka = tensor_alpha(&m, &w, &alpha).unwrap();
        let report = adjoints(&ka.b);
        assert!(report.right_regular && report.left_regular);

        // The top simple over the triangular algebra: not projective (its
        // projective cover is the two-dimensional corner summand), but its
        // endomorphisms are a field, so the twist clause fires.
        let f = fp(2);
        let mask = vec![vec![true, true], vec![false, true]];
        let (r, positions) = structured_subalgebra(f, 2, &mask).unwrap();
        let reg = regular_module(&r);
        let killed: Vec<Vec<Scalar>> = positions
            .iter()
            .enumerate()
            .filter(|&(_, &(i, j))| (i, j) != (0, 0))
            .map(|(t, _)| reg.basis_vec(t))
            .collect();
        let (simple, _) = quotient_module(&reg, &killed);
        assert_eq!(simple.dim, 1);
        let ws = endo_algebra(&simple);
        let ps = regularity_predictor(&simple, &ws, &identity_reversal(&ws.w));
        assert!(!ps.module_fg_projective);
        assert!(ps.twist_fg_projective);
        assert!(ps.endo_semisimple);
        assert_eq!(ps.clause, Some("twist-projective"));
        let ks = tensor_alpha(&simple, &ws, &identity_reversal(&ws.w)).unwrap();
        assert!(adjoints(&ks.b).right_regular);
    }

    #[test]
    fn free_modules_return_the_base_reversal() {
        // Over a field the base reversal is the identity.
        let (m, w) = plane(fp(3));
        let ka = tensor_alpha(&m, &w, &transported(&w, Mat::transpose)).unwrap();
        let gamma = gamma_of_alpha(&ka, 1 << 16).unwrap();
        assert!(gamma.mat.is_identity());

        // The swap on a product of two fields comes back exactly.
        let f = fp(2);
        let r = product_algebra(&field_algebra(f), &field_algebra(f));
        let m2 = regular_module(&r);
        let rep = (0..2).map(|i| r.lmul_mat(&r.basis_elem(i))).collect();
        let w2 = crate::modrep::make_endo_algebra(&m2, r.clone(), rep).unwrap();
        let swap = swap_anti_endo(&r, 1).unwrap();
        let ks = tensor_alpha(&m2, &w2, &swap).unwrap();
        let gs = gamma_of_alpha(&ks, 1 << 16).unwrap();
        assert_eq!(gs.mat, swap.mat);

        // A module of the wrong dimension is rejected.
        let r4 = matrix_algebra(f, 2);
        let nat = crate::modrep::natural_module(&r4, 2);
        let wn = endo_algebra(&nat);
        let kn = tensor_alpha(&nat, &wn, &identity_reversal(&wn.w)).unwrap();
        assert_eq!(gamma_of_alpha(&kn, 1 << 16).unwrap_err(), CorError::NotFree);

        // Rank one over the triangular algebra: the reflection returns up
        // to conjugation by a unit.
        let mask = vec![vec![true, true], vec![false, true]];
        let (rt, _) = structured_subalgebra(f, 2, &mask).unwrap();
        let mt = regular_module(&rt);
        let rept = (0..3).map(|i| rt.lmul_mat(&rt.basis_elem(i))).collect();
        let wt = crate::modrep::make_endo_algebra(&mt, rt.clone(), rept).unwrap();
        let refl = make_anti_endo(
            &rt,
            Mat::from_i64(f, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]),
        )
        .unwrap();
        let kt = tensor_alpha(&mt, &wt, &refl).unwrap();
        let gt = gamma_of_alpha(&kt, 1 << 16).unwrap();
        assert!(matches!(
            is_inner_equivalent(&rt, &gt, &refl, 1 << 16),
            InnerEquivalence::Equivalent { .. }
        ));
    }

    fn inner_orbit_count(r: &Algebra, list: &[AntiEndo], budget: u64) -> usize {
        let mut reps: Vec<&AntiEndo> = Vec::new();
        'outer: for a in list {
            for rep in &reps {
                match is_inner_equivalent(r, rep, a, budget) {
                    InnerEquivalence::Equivalent { .. } => continue 'outer,
                    InnerEquivalence::NotEquivalent => {}
                    InnerEquivalence::Inconclusive => panic!("orbit search budget exhausted"),
                }
            }
            reps.push(a);
        }
        reps.len()
    }

    #[test]
    fn orbit_counts_transfer_to_matrix_extensions() {
        let f = fp(2);
        // Over the field itself: one reversal, one orbit, and the 2×2
        // extension has six reversals in a single orbit.
        let scalars = field_algebra(f);
        let base = enumerate_anti_endos(&scalars, 1 << 16).unwrap();
        assert_eq!(base.len(), 1);
        let (ext, _) = t_n(&scalars, &identity_reversal(&scalars), 2);
        let lifted = enumerate_anti_endos(&ext, 1 << 24).unwrap();
        assert_eq!(lifted.len(), 6);
        assert_eq!(inner_orbit_count(&ext, &lifted, 1 << 22), 1);

        // Over the product of two fields: four reversals, all inner-inert,
        // and the extension keeps exactly four orbits.
        let r = product_algebra(&field_algebra(f), &field_algebra(f));
        let base2 = enumerate_anti_endos(&r, 1 << 16).unwrap();
        assert_eq!(base2.len(), 4);
        assert_eq!(inner_orbit_count(&r, &base2, 1 << 16), 4);
        let (ext2, _) = t_n(&r, &identity_reversal(&r), 2);
        let lifted2 = enumerate_anti_endos(&ext2, 1 << 26).unwrap();
        assert_eq!(lifted2.len(), 144);
        assert_eq!(inner_orbit_count(&ext2, &lifted2, 1 << 24), 4);
    }
}
