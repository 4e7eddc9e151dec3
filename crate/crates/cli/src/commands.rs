//! The verbs: each one resolves names inside a parsed problem, drives the
//! library, and fills a [`Report`].
//!
//! Outcomes are split by kind.  Unknown names, failed identifications and
//! violated preconditions are [`CliError`]s (exit 2).  Mathematical claims a
//! verb makes about its inputs become checks (exit 1 when one fails), and
//! exhausted search budgets surface as inconclusive statuses (exit 3).

use bilform::algebra::{
    enumerate_anti_endos, is_inner_equivalent, AntiEndo, Elem, InnerEquivalence,
};
use bilform::biform::{adjoints, corresponding_anti_endo, is_theta_symmetric, right_asymmetry,
    AsymmetrySearch, BilinearForm};
use bilform::classify::{
    classify_involution, invariant_idempotent_hypothesis, osborn_classify, radical_is_zero,
    ClassifyError, IdempotentScan, InvolutionType, OsbornVerdict,
};
use bilform::corresp::{
    is_similar_seeded, regularity_predictor, tensor_alpha, theta_alpha, SpanSearch,
};
use bilform::modrep::{endo_algebra, make_endo_algebra, regular_module};
use bilform::{Mat, Scalar};

use crate::problem::{identify_endo, Problem};
use crate::report::{Entry, Report, FOUND, INCONCLUSIVE, PROVABLY_NONE};

/// Shared knobs for every verb.
#[derive(Clone, Copy)]
pub struct Opts {
    pub budget: u64,
    pub seed: u64,
}

/// An input-level failure: the report never starts.
#[derive(Debug)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for CliError {}

impl From<String> for CliError {
    fn from(msg: String) -> CliError {
        CliError(msg)
    }
}

fn span_status(s: &SpanSearch) -> &'static str {
    match s {
        SpanSearch::Found { .. } => FOUND,
        SpanSearch::ProvablyNone => PROVABLY_NONE,
        SpanSearch::Inconclusive => INCONCLUSIVE,
    }
}

fn field_label(p: &Problem) -> String {
    match p.field.order() {
        Some(q) => q.to_string(),
        None => "Q".to_string(),
    }
}

/// List every declared object with its validated shape.
pub fn cmd_check(p: &Problem, file: &str) -> Result<Report, CliError> {
    let mut rep = Report::new("check");
    rep.subject("file", file);
    rep.subject("field", field_label(p));
    for (name, e) in &p.algebras {
        rep.text_entry(&format!("algebra {name}"), format!("ok — dim {}", e.alg.dim));
    }
    for (name, e) in &p.modules {
        rep.text_entry(
            &format!("module {name}"),
            format!("ok — dim {} over {}", e.module.dim, e.over),
        );
    }
    for (name, e) in &p.antiendos {
        rep.text_entry(
            &format!("reversal {name}"),
            format!(
                "ok — on {} (bijective: {}, involution: {})",
                e.on,
                e.anti.bijective,
                e.anti.is_involution()
            ),
        );
    }
    for (name, e) in &p.doubles {
        rep.text_entry(
            &format!("value-space {name}"),
            format!("ok — dim {} over {}", e.double.dim, e.over),
        );
    }
    for (name, e) in &p.thetas {
        rep.text_entry(
            &format!("exchange {name}"),
            format!("ok — on {} (involution: {})", e.on, e.theta.involution),
        );
    }
    for (name, e) in &p.forms {
        let values = match &e.into {
            Some(k) => format!("into {k}"),
            None => "universal".to_string(),
        };
        rep.text_entry(
            &format!("form {name}"),
            format!("ok — on {} ({values}, value dim {})", e.on, e.form.codomain.dim),
        );
    }
    let total = p.algebras.len()
        + p.modules.len()
        + p.antiendos.len()
        + p.doubles.len()
        + p.thetas.len()
        + p.forms.len();
    rep.int_entry("objects", total);
    Ok(rep)
}

/// Adjoints, regularity, exchange symmetry and the induced reversal of a
/// declared form.
pub fn cmd_form_report(p: &Problem, form_name: &str, _opts: Opts) -> Result<Report, CliError> {
    let fe = p.form(form_name)?;
    let b = &fe.form;
    let m = &b.module;
    let mut rep = Report::new("form-report");
    rep.subject("form", form_name);
    rep.subject("field", field_label(p));
    rep.int_entry("module-dim", m.dim);
    rep.int_entry("value-dim", b.codomain.dim);
    let fr = adjoints(b);
    rep.bool_entry("right-injective", fr.right_injective);
    rep.bool_entry("right-regular", fr.right_regular);
    rep.bool_entry("left-injective", fr.left_injective);
    rep.bool_entry("left-regular", fr.left_regular);
    rep.int_entry("right-kernel-dim", m.dim - fr.rad.matrix.rank());
    rep.int_entry("left-kernel-dim", m.dim - fr.lad.matrix.rank());
    if let Some(w) = &fr.right_witness {
        rep.vector_entry("right-degeneracy-witness", w);
    }
    if let Some(w) = &fr.left_witness {
        rep.vector_entry("left-degeneracy-witness", w);
    }
    for (tname, te) in &p.thetas {
        if te.theta.module != b.codomain {
            continue;
        }
        if !te.theta.involution {
            rep.bool_entry(&format!("exchange-involution {tname}"), false);
            continue;
        }
        rep.bool_entry(
            &format!("symmetric-under {tname}"),
            is_theta_symmetric(b, &te.theta),
        );
        match right_asymmetry(b, &te.theta, &fr) {
            AsymmetrySearch::Unique(h) => {
                rep.text_entry(&format!("asymmetry-under {tname}"), "unique");
                rep.matrix_entry(&format!("asymmetry-matrix {tname}"), &h.matrix);
                rep.bool_entry(
                    &format!("asymmetry-is-identity {tname}"),
                    h.matrix.is_identity(),
                );
            }
            AsymmetrySearch::Family(h, dim) => {
                rep.text_entry(
                    &format!("asymmetry-under {tname}"),
                    format!("family of dimension {dim}"),
                );
                rep.matrix_entry(&format!("asymmetry-matrix {tname}"), &h.matrix);
            }
            AsymmetrySearch::NoneExists => {
                rep.text_entry(&format!("asymmetry-under {tname}"), "none");
            }
        }
    }
    if fr.right_regular {
        let w = endo_algebra(m);
        rep.int_entry("endo-dim", w.w.dim);
        let alpha = corresponding_anti_endo(b, &fr, &w)
            .map_err(|e| CliError(format!("induced reversal: {e}")))?;
        rep.matrix_entry("induced-reversal", &alpha.mat);
        rep.bool_entry("induced-reversal-involution", alpha.is_involution());
        rep.bool_entry("induced-reversal-bijective", alpha.bijective);
    }
    Ok(rep)
}

/// Build the value space of a reversal over a module and compare declared
/// forms on the same module against its tautological pairing.
pub fn cmd_correspond(
    p: &Problem,
    module_name: &str,
    reversal_name: &str,
    opts: Opts,
) -> Result<Report, CliError> {
    let me = p.module(module_name)?;
    let ae = p.antiendo(reversal_name)?;
    let r_entry = p.algebra(&ae.on)?;
    let m = &me.module;
    let w = identify_endo(m, &ae.on, r_entry)?;
    let ka = tensor_alpha(m, &w, &ae.anti)
        .map_err(|e| CliError(format!("the value space does not form: {e}")))?;
    let mut rep = Report::new("correspond");
    rep.subject("module", module_name);
    rep.subject("reversal", reversal_name);
    rep.subject("field", field_label(p));
    rep.int_entry("endo-dim", w.w.dim);
    rep.int_entry("tensor-square-dim", m.dim * m.dim);
    rep.int_entry("value-dim", ka.k.dim);
    let fr = adjoints(&ka.b);
    rep.bool_entry("right-regular", fr.right_regular);
    rep.bool_entry("left-regular", fr.left_regular);
    let pred = regularity_predictor(m, &w, &ae.anti);
    rep.text_entry("predictor-clause", pred.clause.unwrap_or("none"));
    if pred.predicts_right_regular {
        rep.check(
            "prediction-right-regular",
            fr.right_regular,
            Some("a fired predictor clause guarantees right regularity".into()),
        );
    }
    if pred.predicts_left_regular {
        rep.check(
            "prediction-left-regular",
            fr.left_regular,
            Some("the generator clause guarantees left regularity".into()),
        );
    }
    match theta_alpha(&ka) {
        Ok(th) => {
            rep.bool_entry("exchange-exists", true);
            rep.bool_entry("exchange-involution", th.involution);
        }
        Err(_) => rep.bool_entry("exchange-exists", false),
    }
    if fr.right_regular {
        let back = corresponding_anti_endo(&ka.b, &fr, &ka.w)
            .map_err(|e| CliError(format!("induced reversal: {e}")))?;
        rep.check(
            "roundtrip-reversal",
            back.mat == ae.anti.mat,
            Some("the tautological pairing induces the reversal it was built from".into()),
        );
    }
    let declared: Vec<(&String, &BilinearForm)> = p
        .forms
        .iter()
        .filter(|(_, fe)| fe.on == *module_name)
        .map(|(n, fe)| (n, &fe.form))
        .collect();
    for (name, form) in &declared {
        let s = is_similar_seeded(form, &ka.b, opts.budget, opts.seed);
        rep.status_entry(&format!("similar-to-universal {name}"), span_status(&s));
    }
    for i in 0..declared.len() {
        for j in i + 1..declared.len() {
            let (n1, f1) = declared[i];
            let (n2, f2) = declared[j];
            let s = is_similar_seeded(f1, f2, opts.budget, opts.seed);
            rep.status_entry(&format!("similar {n1} {n2}"), span_status(&s));
        }
    }
    Ok(rep)
}

fn elem_eq(a: &[Scalar], b: &[Scalar]) -> bool {
    a == b
}

fn elem_sum(a: &[Scalar], b: &[Scalar]) -> Elem {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

fn is_alternating(b: &BilinearForm) -> bool {
    let d = b.module.dim;
    for i in 0..d {
        if b.value(i, i).iter().any(|c| !c.is_zero()) {
            return false;
        }
        for j in i + 1..d {
            let sum = elem_sum(b.value(i, j), b.value(j, i));
            if sum.iter().any(|c| !c.is_zero()) {
                return false;
            }
        }
    }
    true
}

/// Involution type over the regular module, the invariant-idempotent scan,
/// and the semisimple trichotomy, with witnesses re-verified.
pub fn cmd_classify(
    p: &Problem,
    algebra_name: &str,
    reversal_name: &str,
    assume_hypothesis: bool,
    opts: Opts,
) -> Result<Report, CliError> {
    let entry = p.algebra(algebra_name)?;
    let ae = p.antiendo(reversal_name)?;
    if ae.on != *algebra_name {
        return Err(CliError(format!(
            "the reversal `{reversal_name}` lives on `{}`, not `{algebra_name}`",
            ae.on
        )));
    }
    let r = &entry.alg;
    if !ae.anti.is_involution() {
        return Err(CliError(
            "classification needs an involution; the declared reversal is not one".into(),
        ));
    }
    let mut rep = Report::new("classify");
    rep.subject("algebra", algebra_name);
    rep.subject("reversal", reversal_name);
    rep.subject("field", field_label(p));
    rep.int_entry("algebra-dim", r.dim);
    rep.bool_entry("semisimple", radical_is_zero(r));
    rep.bool_entry("commutative", r.is_commutative());

    let m = regular_module(r);
    let lmuls = (0..r.dim).map(|t| r.lmul_mat(&r.basis_elem(t))).collect();
    let w = make_endo_algebra(&m, r.clone(), lmuls)
        .map_err(|e| CliError(format!("the algebra does not act on itself: {e}")))?;
    match classify_involution(&m, &w, &ae.anti) {
        Ok(InvolutionType::Orthogonal) => rep.text_entry("involution-type", "orthogonal"),
        Ok(InvolutionType::Symplectic) => rep.text_entry("involution-type", "symplectic"),
        Ok(InvolutionType::Unitary { center_map }) => {
            rep.text_entry("involution-type", "unitary");
            rep.matrix_entry("center-action", &center_map);
        }
        Err(e @ (ClassifyError::NotFieldCase | ClassifyError::NotSemisimple)) => {
            rep.text_entry("involution-type", "not-applicable");
            rep.text_entry("involution-type-obstruction", e);
        }
        Err(e) => return Err(CliError(format!("involution type: {e}"))),
    }

    match invariant_idempotent_hypothesis(r, &ae.anti, opts.budget) {
        IdempotentScan::Holds => rep.bool_entry("only-trivial-invariant-idempotents", true),
        IdempotentScan::Fails { witness } => {
            rep.bool_entry("only-trivial-invariant-idempotents", false);
            rep.vector_entry("invariant-idempotent-witness", &witness);
        }
        IdempotentScan::Inconclusive => {
            rep.status_entry("only-trivial-invariant-idempotents", INCONCLUSIVE)
        }
    }

    match osborn_classify(r, &ae.anti, opts.budget, assume_hypothesis) {
        Ok(OsbornVerdict::DivisionRing) => rep.text_entry("trichotomy", "division-ring"),
        Ok(OsbornVerdict::DxDop { blocks: (e0, e1) }) => {
            rep.text_entry("trichotomy", "paired-blocks");
            rep.vector_entry("block-idempotent-0", &e0);
            rep.vector_entry("block-idempotent-1", &e1);
            let verified = elem_eq(&r.mul(&e0, &e0), &e0)
                && elem_eq(&r.mul(&e1, &e1), &e1)
                && elem_eq(&elem_sum(&e0, &e1), &r.unity)
                && elem_eq(&ae.anti.apply(&e0), &e1);
            rep.check(
                "paired-blocks-verified",
                verified,
                Some("central idempotents sum to 1 and the reversal swaps them".into()),
            );
        }
        Ok(OsbornVerdict::M2Symplectic { form }) => {
            rep.text_entry("trichotomy", "matrix-symplectic");
            rep.int_entry("symplectic-space-dim", form.module.dim);
            let fr = adjoints(&form);
            rep.check(
                "symplectic-form-verified",
                is_alternating(&form) && fr.right_regular && fr.left_regular,
                Some("the witnessing form is alternating and regular on both sides".into()),
            );
        }
        Err(ClassifyError::HypothesisFails { witness }) => {
            rep.text_entry("trichotomy", "hypothesis-fails");
            rep.vector_entry("hypothesis-witness", &witness);
            let e = &witness;
            let zero = vec![Scalar::zero(p.field); r.dim];
            let verified = elem_eq(&r.mul(e, e), e)
                && !elem_eq(e, &zero)
                && !elem_eq(e, &r.unity)
                && elem_eq(&ae.anti.apply(e), e);
            rep.check(
                "hypothesis-witness-verified",
                verified,
                Some("the witness is a nontrivial idempotent fixed by the reversal".into()),
            );
        }
        Err(ClassifyError::HypothesisUnverified) => {
            rep.status_entry("trichotomy", INCONCLUSIVE);
            rep.text_entry(
                "trichotomy-note",
                "the idempotent scan exhausted its budget; pass --assume-hypothesis to proceed",
            );
        }
        Err(ClassifyError::NotSemisimple) => {
            rep.text_entry("trichotomy", "not-applicable");
            rep.text_entry("trichotomy-obstruction", ClassifyError::NotSemisimple);
        }
        Err(ClassifyError::Unresolved(what)) => {
            rep.status_entry("trichotomy", INCONCLUSIVE);
            rep.text_entry("trichotomy-note", what);
        }
        Err(e) => {
            rep.check("trichotomy", false, Some(format!("internal failure: {e}")));
        }
    }
    Ok(rep)
}

/// Enumerate the anti-endomorphisms of a declared algebra and count their
/// orbits under inner automorphisms.
pub fn cmd_enumerate(p: &Problem, algebra_name: &str, opts: Opts) -> Result<Report, CliError> {
    let entry = p.algebra(algebra_name)?;
    let r = &entry.alg;
    let mut rep = Report::new("enumerate");
    rep.subject("algebra", algebra_name);
    rep.subject("field", field_label(p));
    rep.int_entry("algebra-dim", r.dim);
    let all = match enumerate_anti_endos(r, opts.budget) {
        Ok(v) => v,
        Err(e) => {
            rep.status_entry("anti-endomorphisms", INCONCLUSIVE);
            rep.text_entry("note", format!("{e}"));
            return Ok(rep);
        }
    };
    rep.int_entry("anti-endomorphisms", all.len());
    rep.int_entry(
        "involutions",
        all.iter().filter(|a| a.is_involution()).count(),
    );
    rep.int_entry("bijective", all.iter().filter(|a| a.bijective).count());
    match inner_orbit_count(r, &all, opts.budget) {
        Some(n) => rep.int_entry("inner-orbits", n),
        None => rep.status_entry("inner-orbits", INCONCLUSIVE),
    }
    rep.entry(
        "matrices",
        Entry::List(all.iter().map(|a| a.mat.to_string()).collect()),
    );
    Ok(rep)
}

/// Greedy orbit count of a family of reversals under inner automorphisms;
/// `None` when some pairing test exhausts its budget.
pub fn inner_orbit_count(
    r: &bilform::algebra::Algebra,
    all: &[AntiEndo],
    budget: u64,
) -> Option<usize> {
    let mut reps: Vec<&AntiEndo> = Vec::new();
    for a in all {
        let mut matched = false;
        for b in &reps {
            match is_inner_equivalent(r, b, a, budget) {
                InnerEquivalence::Equivalent { .. } => {
                    matched = true;
                    break;
                }
                InnerEquivalence::NotEquivalent => {}
                InnerEquivalence::Inconclusive => return None,
            }
        }
        if !matched {
            reps.push(a);
        }
    }
    Some(reps.len())
}
