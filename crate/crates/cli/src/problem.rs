//! Line-oriented problem files and their resolution into live objects.
//!
//! A problem file declares a field, then named algebras, modules, value
//! spaces, reversals and forms, in dependency order.  Each declaration is a
//! keyword line followed by the numeric rows it needs; `#` starts a comment
//! and blank lines are skipped.  The grammar:
//!
//! ```text
//! field <p|Q>
//!
//! algebra <name> matrix <n>            # full n×n matrix algebra
//! algebra <name> pattern <n>           # + n mask rows of 0/1: span of the
//!                                      #   matrix units the mask admits
//! algebra <name> scalars               # the field itself
//! algebra <name> product <a> <b>       # direct product of two algebras
//! algebra <name> structconsts <d>      # + d² rows: coordinates of eᵢ·eⱼ in
//!                                      #   row i·d+j, then `unity <d coords>`
//!
//! module <name> over <algebra> regular         # the algebra on itself
//! module <name> over <algebra> natural         # row space acted on by a
//!                                              #   matrix or pattern algebra
//! module <name> over <algebra> dsum <m> <m'>   # direct sum of two modules
//! module <name> over <algebra> actions <d>     # + one d×d block per basis
//!                                              #   element (column coords)
//!
//! antiendo <name> on <algebra> transpose|swap|symplectic|identity
//! antiendo <name> on <algebra> matrix          # + d×d block
//!
//! double <name> over <algebra> standard <antiendo>
//! double <name> over <algebra> explicit <d>    # + `actions0`, one d×d block
//!                                              #   per basis element, then
//!                                              #   `actions1` and its blocks
//!
//! theta <name> on <double>                     # + d×d block that swaps the
//!                                              #   two actions
//!
//! form <name> on <module> into <double> gram   # + m² value rows: b(xᵢ, xⱼ)
//!                                              #   in row i·m+j, d entries
//! form <name> on <module> balpha <antiendo>    # tautological pairing on the
//!                                              #   reversal's value space
//! ```
//!
//! Scalar literals are integers or fractions `a/b`; over a prime field a
//! fraction means a·b⁻¹.  A `balpha` form identifies the reversal's algebra
//! with the endomorphism algebra of the module (see [`identify_endo`]) and
//! quotients the tensor square by the reversal's exchange relations.
//!
//! Declarations refer to earlier names only, so files read top to bottom.
//! Every constructor runs the full validation of the underlying library;
//! a file that resolves is a certified instance, not just well-formed text.

use std::fmt;

use bilform::algebra::{
    field_algebra, make_algebra, make_anti_endo, matrix_algebra, product_algebra,
    structured_subalgebra, swap_anti_endo, symplectic_anti_endo_m2, transpose_anti_endo, AntiEndo,
};
use bilform::biform::{make_form, BilinearForm};
use bilform::corresp::{tensor_alpha, KAlpha};
use bilform::dblmod::{make_dbl_anti_auto, make_double, standard_double, DblAntiAuto, DoubleModule};
use bilform::modrep::{
    direct_sum, make_endo_algebra, make_module, natural_module, regular_module, EndoAlgebra,
    RightModule,
};
use bilform::{FieldSpec, Mat, Scalar};

/// A parse or resolution failure, pinned to a source position.
#[derive(Debug)]
pub struct SourceError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for SourceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.col > 0 {
            write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
        } else {
            write!(f, "line {}: {}", self.line, self.msg)
        }
    }
}

impl std::error::Error for SourceError {}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, SourceError> {
    Err(SourceError {
        line,
        col,
        msg: msg.into(),
    })
}

/// How an algebra was presented; guides the derived constructions
/// (`natural` modules, shaped reversals) that need more than the bare
/// structure constants.
#[derive(Clone, Debug)]
pub enum AlgKind {
    /// Full n×n matrix algebra; basis eᵢⱼ in row-major order.
    Matrix(usize),
    /// Span of the matrix units admitted by a multiplicatively closed 0/1
    /// mask, with the basis listed in mask order.
    Pattern(usize, Vec<(usize, usize)>),
    /// The field itself.
    Scalars,
    /// Direct product; the dimensions of the two factors.
    Product(usize, usize),
    /// Raw structure constants.
    Structconsts,
}

pub struct AlgEntry {
    pub alg: bilform::algebra::Algebra,
    pub kind: AlgKind,
}

pub struct ModuleEntry {
    pub over: String,
    pub module: RightModule,
}

pub struct AntiEndoEntry {
    pub on: String,
    pub anti: AntiEndo,
}

pub struct DoubleEntry {
    pub over: String,
    pub double: DoubleModule,
}

pub struct ThetaEntry {
    pub on: String,
    pub theta: DblAntiAuto,
}

pub struct FormEntry {
    pub on: String,
    /// Name of the value space for `gram` forms; `balpha` forms carry the
    /// whole universal package instead.
    pub into: Option<String>,
    pub form: BilinearForm,
    pub universal: Option<KAlpha>,
}

/// A fully resolved problem file: every object validated, in file order.
pub struct Problem {
    pub field: FieldSpec,
    pub algebras: Vec<(String, AlgEntry)>,
    pub modules: Vec<(String, ModuleEntry)>,
    pub antiendos: Vec<(String, AntiEndoEntry)>,
    pub doubles: Vec<(String, DoubleEntry)>,
    pub thetas: Vec<(String, ThetaEntry)>,
    pub forms: Vec<(String, FormEntry)>,
}

impl Problem {
    pub fn algebra(&self, name: &str) -> Result<&AlgEntry, String> {
        self.algebras
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
            .ok_or_else(|| format!("unknown algebra `{name}`"))
    }

    pub fn module(&self, name: &str) -> Result<&ModuleEntry, String> {
        self.modules
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
            .ok_or_else(|| format!("unknown module `{name}`"))
    }

    pub fn antiendo(&self, name: &str) -> Result<&AntiEndoEntry, String> {
        self.antiendos
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
            .ok_or_else(|| format!("unknown reversal `{name}`"))
    }

    pub fn double(&self, name: &str) -> Result<&DoubleEntry, String> {
        self.doubles
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
            .ok_or_else(|| format!("unknown value space `{name}`"))
    }

    pub fn form(&self, name: &str) -> Result<&FormEntry, String> {
        self.forms
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
            .ok_or_else(|| format!("unknown form `{name}`"))
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Parse a field designator: a prime, or `Q` for the rationals.
pub fn parse_field_token(tok: &str) -> Result<FieldSpec, String> {
    if tok == "Q" || tok == "q" {
        return Ok(FieldSpec::Rationals);
    }
    match tok.parse::<u64>() {
        Ok(p) if is_prime(p) => Ok(FieldSpec::Prime(p)),
        Ok(p) => Err(format!("field characteristic {p} is not prime")),
        Err(_) => Err(format!("expected a prime or `Q`, found `{tok}`")),
    }
}

#[derive(Clone, Copy)]
struct Tok<'a> {
    col: usize,
    s: &'a str,
}

struct Line<'a> {
    no: usize,
    toks: Vec<Tok<'a>>,
}

impl<'a> Line<'a> {
    fn kw(&self) -> &'a str {
        self.toks[0].s
    }

    /// Token at position `i`, or an error naming what was expected.
    fn tok(&self, i: usize, what: &str) -> Result<Tok<'a>, SourceError> {
        self.toks.get(i).copied().ok_or(SourceError {
            line: self.no,
            col: 0,
            msg: format!("missing {what}"),
        })
    }

    fn end(&self, i: usize) -> Result<(), SourceError> {
        match self.toks.get(i) {
            None => Ok(()),
            Some(t) => err(self.no, t.col, format!("unexpected `{}`", t.s)),
        }
    }
}

fn lex(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let mut toks = Vec::new();
        let mut col = 0;
        for (j, ch) in body.char_indices() {
            if ch.is_whitespace() {
                col = 0;
            } else if col == 0 {
                col = j + 1;
                toks.push(Tok { col, s: &body[j..j + 1] });
            } else {
                let last = toks.last_mut().expect("a token is open");
                let start = last.col - 1;
                last.s = &body[start..j + ch.len_utf8()];
            }
        }
        if !toks.is_empty() {
            lines.push(Line { no: i + 1, toks });
        }
    }
    lines
}

struct Cursor<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    field: FieldSpec,
}

impl<'a> Cursor<'a> {
    fn last_line_no(&self) -> usize {
        self.lines.last().map(|l| l.no).unwrap_or(0)
    }

    fn scalar(&self, t: Tok<'a>, line: usize) -> Result<Scalar, SourceError> {
        let (num_s, den_s) = match t.s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (t.s, None),
        };
        let num: i64 = match num_s.parse() {
            Ok(v) => v,
            Err(_) => return err(line, t.col, format!("`{}` is not a scalar", t.s)),
        };
        let Some(den_s) = den_s else {
            return Ok(Scalar::from_i64(self.field, num));
        };
        let den: i64 = match den_s.parse() {
            Ok(v) if v != 0 => v,
            _ => return err(line, t.col, format!("`{}` has a bad denominator", t.s)),
        };
        let d = Scalar::from_i64(self.field, den);
        match d.inv() {
            Some(dinv) => Ok(Scalar::from_i64(self.field, num).mul(&dinv)),
            None => err(
                line,
                t.col,
                format!("`{}`: denominator vanishes in this field", t.s),
            ),
        }
    }

    /// Take the next line's tokens, or report a truncated file.
    fn take_line(&mut self, what: &str) -> Result<(usize, Vec<Tok<'a>>), SourceError> {
        if self.pos >= self.lines.len() {
            return err(self.last_line_no(), 0, format!("missing {what}"));
        }
        let (no, toks) = {
            let l = &self.lines[self.pos];
            (l.no, l.toks.clone())
        };
        self.pos += 1;
        Ok((no, toks))
    }

    /// Consume one line of exactly `n` scalars.
    fn row(&mut self, n: usize, what: &str) -> Result<Vec<Scalar>, SourceError> {
        let (no, toks) = self.take_line(&format!("row for {what}"))?;
        if toks.len() != n {
            return err(
                no,
                toks[0].col,
                format!("{what} needs {n} entries, found {}", toks.len()),
            );
        }
        toks.iter().map(|t| self.scalar(*t, no)).collect()
    }

    /// Consume `rows` lines of `cols` scalars each as one matrix.
    fn block(&mut self, rows: usize, cols: usize, what: &str) -> Result<Mat, SourceError> {
        if rows == 0 {
            return Ok(Mat::zero(self.field, 0, cols));
        }
        let mut data = Vec::with_capacity(rows);
        for _ in 0..rows {
            data.push(self.row(cols, what)?);
        }
        Ok(Mat::from_rows(self.field, data))
    }

    /// Consume a line that must consist of the single word `word`.
    fn marker(&mut self, word: &str) -> Result<(), SourceError> {
        let (no, toks) = self.take_line(&format!("`{word}` line"))?;
        if toks.len() != 1 || toks[0].s != word {
            return err(no, toks[0].col, format!("expected `{word}` here"));
        }
        Ok(())
    }
}

/// Parse and resolve a problem file.  `field_override` reinterprets the
/// file's scalar literals over another field, for field-generic examples.
pub fn parse(text: &str, field_override: Option<FieldSpec>) -> Result<Problem, SourceError> {
    let lines = lex(text);
    let Some(first) = lines.first() else {
        return err(1, 0, "empty problem file");
    };
    if first.kw() != "field" {
        return err(first.no, first.toks[0].col, "a problem starts with `field`");
    }
    let ft = first.tok(1, "field designator")?;
    first.end(2)?;
    let declared = match parse_field_token(ft.s) {
        Ok(f) => f,
        Err(m) => return err(first.no, ft.col, m),
    };
    let field = field_override.unwrap_or(declared);
    let mut cur = Cursor {
        lines,
        pos: 1,
        field,
    };
    let mut p = Problem {
        field,
        algebras: Vec::new(),
        modules: Vec::new(),
        antiendos: Vec::new(),
        doubles: Vec::new(),
        thetas: Vec::new(),
        forms: Vec::new(),
    };
    while cur.pos < cur.lines.len() {
        let line_idx = cur.pos;
        cur.pos += 1;
        let (no, kw, kwcol) = {
            let l = &cur.lines[line_idx];
            (l.no, l.kw().to_string(), l.toks[0].col)
        };
        match kw.as_str() {
            "field" => return err(no, kwcol, "the field is declared once, first"),
            "algebra" => parse_algebra(&mut cur, line_idx, &mut p)?,
            "module" => parse_module(&mut cur, line_idx, &mut p)?,
            "antiendo" => parse_antiendo(&mut cur, line_idx, &mut p)?,
            "double" => parse_double(&mut cur, line_idx, &mut p)?,
            "theta" => parse_theta(&mut cur, line_idx, &mut p)?,
            "form" => parse_form(&mut cur, line_idx, &mut p)?,
            _ => return err(no, kwcol, format!("unknown declaration `{kw}`")),
        }
    }
    Ok(p)
}

fn fresh_name(
    p: &Problem,
    line: &Line<'_>,
    idx: usize,
    what: &str,
) -> Result<String, SourceError> {
    let t = line.tok(idx, &format!("{what} name"))?;
    let name = t.s.to_string();
    let taken = p.algebras.iter().any(|(n, _)| *n == name)
        || p.modules.iter().any(|(n, _)| *n == name)
        || p.antiendos.iter().any(|(n, _)| *n == name)
        || p.doubles.iter().any(|(n, _)| *n == name)
        || p.thetas.iter().any(|(n, _)| *n == name)
        || p.forms.iter().any(|(n, _)| *n == name);
    if taken {
        return err(line.no, t.col, format!("the name `{name}` is already used"));
    }
    Ok(name)
}

fn usize_tok(line: &Line<'_>, idx: usize, what: &str) -> Result<usize, SourceError> {
    let t = line.tok(idx, what)?;
    t.s.parse::<usize>()
        .map_err(|_| SourceError {
            line: line.no,
            col: t.col,
            msg: format!("`{}` is not a {what}", t.s),
        })
}

fn parse_algebra(cur: &mut Cursor<'_>, li: usize, p: &mut Problem) -> Result<(), SourceError> {
    let (no, name, kind_tok, kcol) = {
        let line = &cur.lines[li];
        let name = fresh_name(p, line, 1, "algebra")?;
        let kt = line.tok(2, "algebra kind")?;
        (line.no, name, kt.s.to_string(), kt.col)
    };
    let field = cur.field;
    let entry = match kind_tok.as_str() {
        "matrix" => {
            let n = usize_tok(&cur.lines[li], 3, "matrix size")?;
            cur.lines[li].end(4)?;
            AlgEntry {
                alg: matrix_algebra(field, n),
                kind: AlgKind::Matrix(n),
            }
        }
        "pattern" => {
            let n = usize_tok(&cur.lines[li], 3, "pattern size")?;
            cur.lines[li].end(4)?;
            let mut mask = Vec::with_capacity(n);
            for _ in 0..n {
                let row = cur.row(n, "a pattern mask row")?;
                let mut brow = Vec::with_capacity(n);
                for s in &row {
                    if s.is_zero() {
                        brow.push(false);
                    } else if s.is_one() {
                        brow.push(true);
                    } else {
                        return err(no, 0, "pattern masks use 0 and 1 only");
                    }
                }
                mask.push(brow);
            }
            let (alg, positions) = structured_subalgebra(field, n, &mask)
                .map_err(|e| SourceError {
                    line: no,
                    col: 0,
                    msg: format!("pattern `{name}`: {e}"),
                })?;
            AlgEntry {
                alg,
                kind: AlgKind::Pattern(n, positions),
            }
        }
        "scalars" => {
            cur.lines[li].end(3)?;
            AlgEntry {
                alg: field_algebra(field),
                kind: AlgKind::Scalars,
            }
        }
        "product" => {
            let (a_name, b_name) = {
                let line = &cur.lines[li];
                let a = line.tok(3, "left factor")?.s.to_string();
                let b = line.tok(4, "right factor")?.s.to_string();
                line.end(5)?;
                (a, b)
            };
            let a = p.algebra(&a_name).map_err(|m| SourceError {
                line: no,
                col: 0,
                msg: m,
            })?;
            let b = p.algebra(&b_name).map_err(|m| SourceError {
                line: no,
                col: 0,
                msg: m,
            })?;
            let (da, db) = (a.alg.dim, b.alg.dim);
            AlgEntry {
                alg: product_algebra(&a.alg, &b.alg),
                kind: AlgKind::Product(da, db),
            }
        }
        "structconsts" => {
            let d = usize_tok(&cur.lines[li], 3, "dimension")?;
            cur.lines[li].end(4)?;
            let mut sc = Vec::with_capacity(d * d * d);
            for i in 0..d {
                for j in 0..d {
                    let row = cur.row(d, &format!("the product row for ({i}, {j})"))?;
                    sc.extend(row);
                }
            }
            let unity = {
                let (uno, toks) = cur.take_line("`unity` row")?;
                if toks[0].s != "unity" || toks.len() != d + 1 {
                    return err(
                        uno,
                        toks[0].col,
                        format!("expected `unity` with {d} coordinates"),
                    );
                }
                toks[1..]
                    .iter()
                    .map(|t| cur.scalar(*t, uno))
                    .collect::<Result<Vec<_>, _>>()?
            };
            let alg = make_algebra(field, d, sc, unity).map_err(|e| SourceError {
                line: no,
                col: 0,
                msg: format!("algebra `{name}`: {e}"),
            })?;
            AlgEntry {
                alg,
                kind: AlgKind::Structconsts,
            }
        }
        _ => return err(no, kcol, format!("unknown algebra kind `{kind_tok}`")),
    };
    p.algebras.push((name, entry));
    Ok(())
}

fn parse_module(cur: &mut Cursor<'_>, li: usize, p: &mut Problem) -> Result<(), SourceError> {
    let (no, name, over, kind_tok, kcol) = {
        let line = &cur.lines[li];
        let name = fresh_name(p, line, 1, "module")?;
        let over_kw = line.tok(2, "`over`")?;
        if over_kw.s != "over" {
            return err(line.no, over_kw.col, "expected `over`");
        }
        let over = line.tok(3, "algebra name")?.s.to_string();
        let kt = line.tok(4, "module kind")?;
        (line.no, name, over, kt.s.to_string(), kt.col)
    };
    let src = |m: String| SourceError {
        line: no,
        col: 0,
        msg: m,
    };
    let entry = p.algebra(&over).map_err(src)?;
    let alg = entry.alg.clone();
    let kind = entry.kind.clone();
    let field = cur.field;
    let module = match kind_tok.as_str() {
        "regular" => {
            cur.lines[li].end(5)?;
            regular_module(&alg)
        }
        "natural" => {
            cur.lines[li].end(5)?;
            match &kind {
                AlgKind::Matrix(n) => natural_module(&alg, *n),
                AlgKind::Pattern(n, positions) => {
                    // Row vectors of length n; the unit at (a, b) sends the
                    // a-th coordinate to the b-th, so its column-coordinate
                    // action matrix is the (b, a) unit.
                    let acts = positions
                        .iter()
                        .map(|&(a, b)| {
                            let mut m = Mat::zero(field, *n, *n);
                            m.set(b, a, Scalar::one(field));
                            m
                        })
                        .collect();
                    make_module(&alg, acts).map_err(|e| src(format!("module `{name}`: {e}")))?
                }
                _ => {
                    return err(
                        no,
                        0,
                        "natural modules need a matrix or pattern algebra",
                    )
                }
            }
        }
        "dsum" => {
            let (m1, m2) = {
                let line = &cur.lines[li];
                let a = line.tok(5, "first summand")?.s.to_string();
                let b = line.tok(6, "second summand")?.s.to_string();
                line.end(7)?;
                (a, b)
            };
            let e1 = p.module(&m1).map_err(src)?;
            let e2 = p.module(&m2).map_err(src)?;
            if e1.over != over || e2.over != over {
                return err(no, 0, "direct summands must live over the same algebra");
            }
            direct_sum(&e1.module, &e2.module)
                .map_err(|e| src(format!("module `{name}`: {e}")))?
        }
        "actions" => {
            let d = usize_tok(&cur.lines[li], 5, "module dimension")?;
            cur.lines[li].end(6)?;
            let mut acts = Vec::with_capacity(alg.dim);
            for t in 0..alg.dim {
                acts.push(cur.block(d, d, &format!("the action of basis element {t}"))?);
            }
            make_module(&alg, acts).map_err(|e| src(format!("module `{name}`: {e}")))?
        }
        _ => return err(no, kcol, format!("unknown module kind `{kind_tok}`")),
    };
    p.modules.push((name, ModuleEntry { over, module }));
    Ok(())
}

fn parse_antiendo(cur: &mut Cursor<'_>, li: usize, p: &mut Problem) -> Result<(), SourceError> {
    let (no, name, on, kind_tok, kcol) = {
        let line = &cur.lines[li];
        let name = fresh_name(p, line, 1, "reversal")?;
        let on_kw = line.tok(2, "`on`")?;
        if on_kw.s != "on" {
            return err(line.no, on_kw.col, "expected `on`");
        }
        let on = line.tok(3, "algebra name")?.s.to_string();
        let kt = line.tok(4, "reversal kind")?;
        (line.no, name, on, kt.s.to_string(), kt.col)
    };
    let src = |m: String| SourceError {
        line: no,
        col: 0,
        msg: m,
    };
    let entry = p.algebra(&on).map_err(src)?;
    let alg = entry.alg.clone();
    let kind = entry.kind.clone();
    let field = cur.field;
    let anti = match kind_tok.as_str() {
        "transpose" => {
            cur.lines[li].end(5)?;
            match kind {
                AlgKind::Matrix(n) => transpose_anti_endo(&alg, n),
                _ => return err(no, 0, "`transpose` needs a matrix algebra"),
            }
        }
        "swap" => {
            cur.lines[li].end(5)?;
            match kind {
                AlgKind::Product(da, _) => swap_anti_endo(&alg, da)
                    .map_err(|e| src(format!("reversal `{name}`: {e}")))?,
                _ => return err(no, 0, "`swap` needs a product algebra"),
            }
        }
        "symplectic" => {
            cur.lines[li].end(5)?;
            match kind {
                AlgKind::Matrix(2) => symplectic_anti_endo_m2(&alg),
                _ => return err(no, 0, "`symplectic` needs a 2×2 matrix algebra"),
            }
        }
        "identity" => {
            cur.lines[li].end(5)?;
            make_anti_endo(&alg, Mat::identity(field, alg.dim))
                .map_err(|e| src(format!("reversal `{name}`: {e}")))?
        }
        "matrix" => {
            cur.lines[li].end(5)?;
            let mat = cur.block(alg.dim, alg.dim, "a reversal matrix row")?;
            make_anti_endo(&alg, mat).map_err(|e| src(format!("reversal `{name}`: {e}")))?
        }
        _ => return err(no, kcol, format!("unknown reversal kind `{kind_tok}`")),
    };
    p.antiendos.push((name, AntiEndoEntry { on, anti }));
    Ok(())
}

fn parse_double(cur: &mut Cursor<'_>, li: usize, p: &mut Problem) -> Result<(), SourceError> {
    let (no, name, over, kind_tok, kcol) = {
        let line = &cur.lines[li];
        let name = fresh_name(p, line, 1, "value space")?;
        let over_kw = line.tok(2, "`over`")?;
        if over_kw.s != "over" {
            return err(line.no, over_kw.col, "expected `over`");
        }
        let over = line.tok(3, "algebra name")?.s.to_string();
        let kt = line.tok(4, "value-space kind")?;
        (line.no, name, over, kt.s.to_string(), kt.col)
    };
    let src = |m: String| SourceError {
        line: no,
        col: 0,
        msg: m,
    };
    let alg = p.algebra(&over).map_err(src)?.alg.clone();
    let double = match kind_tok.as_str() {
        "standard" => {
            let anti_name = {
                let line = &cur.lines[li];
                let t = line.tok(5, "reversal name")?.s.to_string();
                line.end(6)?;
                t
            };
            let ae = p.antiendo(&anti_name).map_err(src)?;
            if ae.on != over {
                return err(no, 0, "the reversal must live on the same algebra");
            }
            standard_double(&alg, &ae.anti)
        }
        "explicit" => {
            let d = usize_tok(&cur.lines[li], 5, "value dimension")?;
            cur.lines[li].end(6)?;
            let mut read_family = |label: &str, cur: &mut Cursor<'_>| {
                cur.marker(label)?;
                let mut mats = Vec::with_capacity(alg.dim);
                for t in 0..alg.dim {
                    mats.push(cur.block(d, d, &format!("{label} block {t}"))?);
                }
                Ok::<Vec<Mat>, SourceError>(mats)
            };
            let a0 = read_family("actions0", cur)?;
            let a1 = read_family("actions1", cur)?;
            make_double(&alg, a0, a1).map_err(|e| src(format!("value space `{name}`: {e}")))?
        }
        _ => return err(no, kcol, format!("unknown value-space kind `{kind_tok}`")),
    };
    p.doubles.push((name, DoubleEntry { over, double }));
    Ok(())
}

fn parse_theta(cur: &mut Cursor<'_>, li: usize, p: &mut Problem) -> Result<(), SourceError> {
    let (no, name, on) = {
        let line = &cur.lines[li];
        let name = fresh_name(p, line, 1, "exchange map")?;
        let on_kw = line.tok(2, "`on`")?;
        if on_kw.s != "on" {
            return err(line.no, on_kw.col, "expected `on`");
        }
        let on = line.tok(3, "value-space name")?.s.to_string();
        line.end(4)?;
        (line.no, name, on)
    };
    let src = |m: String| SourceError {
        line: no,
        col: 0,
        msg: m,
    };
    let k = p.double(&on).map_err(src)?.double.clone();
    let mat = cur.block(k.dim, k.dim, "an exchange-map row")?;
    let theta =
        make_dbl_anti_auto(&k, mat).map_err(|e| src(format!("exchange map `{name}`: {e}")))?;
    p.thetas.push((name, ThetaEntry { on, theta }));
    Ok(())
}

fn parse_form(cur: &mut Cursor<'_>, li: usize, p: &mut Problem) -> Result<(), SourceError> {
    let (no, name, on, mode_tok, mcol) = {
        let line = &cur.lines[li];
        let name = fresh_name(p, line, 1, "form")?;
        let on_kw = line.tok(2, "`on`")?;
        if on_kw.s != "on" {
            return err(line.no, on_kw.col, "expected `on`");
        }
        let on = line.tok(3, "module name")?.s.to_string();
        let mt = line.tok(4, "`into` or `balpha`")?;
        (line.no, name, on, mt.s.to_string(), mt.col)
    };
    let src = |m: String| SourceError {
        line: no,
        col: 0,
        msg: m,
    };
    let me = p.module(&on).map_err(src)?;
    let m = me.module.clone();
    match mode_tok.as_str() {
        "into" => {
            let into = {
                let line = &cur.lines[li];
                let t = line.tok(5, "value-space name")?.s.to_string();
                let g = line.tok(6, "`gram`")?;
                if g.s != "gram" {
                    return err(line.no, g.col, "expected `gram`");
                }
                line.end(7)?;
                t
            };
            let de = p.double(&into).map_err(src)?;
            let k = de.double.clone();
            let md = m.dim;
            let mut gram = vec![vec![Vec::new(); md]; md];
            for i in 0..md {
                for j in 0..md {
                    gram[i][j] = if k.dim == 0 {
                        Vec::new()
                    } else {
                        cur.row(k.dim, &format!("the value of b(x{i}, x{j})"))?
                    };
                }
            }
            let form =
                make_form(&m, &k, gram).map_err(|e| src(format!("form `{name}`: {e}")))?;
            p.forms.push((
                name,
                FormEntry {
                    on,
                    into: Some(into),
                    form,
                    universal: None,
                },
            ));
        }
        "balpha" => {
            let anti_name = {
                let line = &cur.lines[li];
                let t = line.tok(5, "reversal name")?.s.to_string();
                line.end(6)?;
                t
            };
            let ae = p.antiendo(&anti_name).map_err(src)?;
            let r_entry = p.algebra(&ae.on).map_err(src)?;
            let w = identify_endo(&m, &ae.on, r_entry).map_err(src)?;
            let ka = tensor_alpha(&m, &w, &ae.anti)
                .map_err(|e| src(format!("form `{name}`: {e}")))?;
            p.forms.push((
                name,
                FormEntry {
                    on,
                    into: None,
                    form: ka.b.clone(),
                    universal: Some(ka),
                },
            ));
        }
        _ => return err(no, mcol, format!("expected `into` or `balpha`, found `{mode_tok}`")),
    }
    Ok(())
}

/// Identify a declared algebra with the endomorphism algebra of a module.
///
/// The candidates are tried in order and each is accepted only if the full
/// endomorphism-algebra validation passes (commutation with the module
/// action, multiplicativity, injectivity, unity):
///
/// 1. a one-dimensional algebra acts by scalars;
/// 2. the module's own algebra acts by left multiplication when the module
///    looks regular;
/// 3. the module's own algebra acts by its action matrices (the commutative
///    self-identification);
/// 4. an n×n matrix algebra acts by matrix units on an n-dimensional space.
pub fn identify_endo(
    m: &RightModule,
    r_name: &str,
    entry: &AlgEntry,
) -> Result<EndoAlgebra, String> {
    let r = &entry.alg;
    let f = r.field;
    if r.dim == 1 {
        if let Ok(w) = make_endo_algebra(m, r.clone(), vec![Mat::identity(f, m.dim)]) {
            return Ok(w);
        }
    }
    if r.dim == m.algebra.dim && m.dim == r.dim {
        let rep = (0..r.dim).map(|t| r.lmul_mat(&r.basis_elem(t))).collect();
        if let Ok(w) = make_endo_algebra(m, r.clone(), rep) {
            return Ok(w);
        }
    }
    if r.dim == m.algebra.dim {
        if let Ok(w) = make_endo_algebra(m, r.clone(), m.actions.clone()) {
            return Ok(w);
        }
    }
    if let AlgKind::Matrix(n) = entry.kind {
        if m.dim == n {
            let rep = (0..n * n)
                .map(|t| {
                    let mut u = Mat::zero(f, n, n);
                    u.set(t / n, t % n, Scalar::one(f));
                    u
                })
                .collect();
            if let Ok(w) = make_endo_algebra(m, r.clone(), rep) {
                return Ok(w);
            }
        }
    }
    Err(format!(
        "the algebra `{r_name}` does not identify with the endomorphisms of the module"
    ))
}
