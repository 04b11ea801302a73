//! Torus-level decisions: endomorphism algebra, the isogeny-to-`Eⁿ`
//! criterion, hyperplane cores and their censuses, quotients, and
//! products of elliptic curves.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::closure::{closure, forms_are_complex, is_complex_subspace, result_from_forms, ClosureResult};
use crate::elliptic::{cm_check, is_isogenous, tau_invariant, Isogeny};
use crate::error::{Error, Result};
use crate::field::{rational_kernel, AlgebraicNumber, Side};
use crate::lattice::{hnf, integer_kernel, to_qmat, IMat};
use crate::linalg::{determinant, left_kernel, mat_mul, mat_vec, rref, solve, Mat, QMat, Rationals};
use crate::torus::{ComplexSubgroupSpec, ComplexTorus, EllipticCurveSpec, FieldVector, RationalSubspace};
use crate::Q;

/// Rational matrices commuting with `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndAlgebra {
    pub basis: Vec<QMat>,
    pub dim: usize,
}

pub fn endomorphism_algebra(t: &ComplexTorus) -> EndAlgebra {
    let field = t.field();
    let m = 2 * t.n();
    let j = t.j();
    let zero = field.from_int(0);
    // row (p, q) of MJ − JM; column (a, b) is the unknown M[a][b]
    let system = Mat::from_fn(m * m, m * m, |row, col| {
        let (p, q) = (row / m, row % m);
        let (a, b) = (col / m, col % m);
        let mut acc = zero.clone();
        if a == p {
            acc = field.add(&acc, j.get(b, q));
        }
        if b == q {
            acc = field.sub(&acc, j.get(p, a));
        }
        acc
    });
    let ker = rational_kernel(field, &system, Side::Right);
    let basis: Vec<QMat> = (0..ker.rows()).map(|i| Mat::from_rows(ker.row(i).chunks(m).map(|c| c.to_vec()).collect(), m)).collect();
    EndAlgebra { dim: basis.len(), basis }
}

/// A primitive integer form on `ℤ²ⁿ` whose first nonzero entry is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HyperplaneForm {
    r: Vec<i64>,
}

impl HyperplaneForm {
    pub fn new(r: Vec<i64>) -> Result<Self> {
        let Some(first) = r.iter().find(|&&x| x != 0) else {
            return Err(Error::InvalidForm("form is zero".into()));
        };
        if *first < 0 {
            return Err(Error::InvalidForm("first nonzero entry must be positive".into()));
        }
        if r.iter().fold(0i64, |g, &x| g.gcd(&x)) != 1 {
            return Err(Error::InvalidForm("form is not primitive".into()));
        }
        Ok(HyperplaneForm { r })
    }

    pub fn entries(&self) -> &[i64] {
        &self.r
    }

    pub fn height(&self) -> i64 {
        self.r.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn to_q(&self) -> Vec<Q> {
        self.r.iter().map(|&x| Q::from_integer(x.into())).collect()
    }
}

/// All forms on `ℤ^dim` of height at most `height`, ordered by height, then
/// by number of nonzero entries, then by the positions of those entries,
/// then by their values.
pub fn hyperplane_forms(dim: usize, height: u32) -> Vec<HyperplaneForm> {
    let mut out = Vec::new();
    for h in 1..=height as i64 {
        for size in 1..=dim {
            let mut positions: Vec<usize> = (0..size).collect();
            loop {
                push_values(dim, h, &positions, &mut out);
                if !next_combination(&mut positions, dim) {
                    break;
                }
            }
        }
    }
    out
}

fn next_combination(pos: &mut [usize], n: usize) -> bool {
    let k = pos.len();
    for i in (0..k).rev() {
        if pos[i] < n - k + i {
            pos[i] += 1;
            for j in i + 1..k {
                pos[j] = pos[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn push_values(dim: usize, h: i64, positions: &[usize], out: &mut Vec<HyperplaneForm>) {
    let nonzero: Vec<i64> = (-h..=h).filter(|&x| x != 0).collect();
    let positive: Vec<i64> = (1..=h).collect();
    let mut idx = vec![0usize; positions.len()];
    loop {
        let vals: Vec<i64> = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| if k == 0 { positive[i] } else { nonzero[i] })
            .collect();
        if vals.iter().any(|x| x.abs() == h) && vals.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1 {
            let mut r = vec![0i64; dim];
            for (&p, &v) in positions.iter().zip(&vals) {
                r[p] = v;
            }
            out.push(HyperplaneForm { r });
        }
        // odometer, last position fastest
        let mut k = idx.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            let limit = if k == 0 { positive.len() } else { nonzero.len() };
            idx[k] += 1;
            if idx[k] < limit {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// `H ∩ iH` for the real hyperplane `H = ker φ`, where `φ` has lattice
/// coordinates `r`: the kernel of the complex-linear part of `φ`.
pub fn hyperplane_core(t: &ComplexTorus, r: &HyperplaneForm) -> Result<ComplexSubgroupSpec> {
    if r.r.len() != 2 * t.n() {
        return Err(Error::Dimension(format!("form has {} entries, expected {}", r.r.len(), 2 * t.n())));
    }
    let field = t.field();
    let a = t.complex_form(&r.to_q());
    let row = Mat::from_rows(vec![a], t.n());
    let ker = crate::linalg::right_kernel(field, &row)?;
    ComplexSubgroupSpec::new(field.clone(), t.n(), ker.row_vecs())
}

/// Closures of hyperplane cores without building the cores.
///
/// With `A` the first `n` columns of `P⁻¹` and `a = rᵀA`, a rational form `s`
/// vanishes on `ker a` iff `sᵀA` is proportional to `a`, i.e. all minors
/// `(sᵀA)_p a_q − (sᵀA)_q a_p` vanish. These are linear in `s` with
/// coefficients `Σ_l r_l H[p,q][j][l]`, and `H` depends only on `T`.
struct CoreTable {
    n: usize,
    /// `h[pair][j][l]`: power-basis coordinates of `A_jp A_lq − A_jq A_lp`.
    h: Vec<Vec<Vec<Vec<Q>>>>,
}

impl CoreTable {
    fn new(t: &ComplexTorus) -> Self {
        let n = t.n();
        let m = 2 * n;
        let f = t.field();
        let a = t.period_inverse();
        let mut h = Vec::new();
        for p in 0..n {
            for q in p + 1..n {
                let per_j = (0..m)
                    .map(|j| {
                        (0..m)
                            .map(|l| {
                                let x = f.sub(&f.mul(a.get(j, p), a.get(l, q)), &f.mul(a.get(j, q), a.get(l, p)));
                                x.coeffs().to_vec()
                            })
                            .collect()
                    })
                    .collect();
                h.push(per_j);
            }
        }
        CoreTable { n, h }
    }

    fn forms(&self, r: &HyperplaneForm) -> QMat {
        let m = 2 * self.n;
        let mut rows = Vec::new();
        for pair in &self.h {
            let d = pair[0][0].len();
            for t in 0..d {
                let row: Vec<Q> = (0..m)
                    .map(|j| {
                        let mut acc = Q::zero();
                        for (l, &rl) in r.r.iter().enumerate() {
                            if rl != 0 && !pair[j][l][t].is_zero() {
                                acc += &pair[j][l][t] * Q::from_integer(rl.into());
                            }
                        }
                        acc
                    })
                    .collect();
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
        let system = Mat::from_rows(rows, m);
        crate::linalg::right_kernel(&Rationals, &system).expect("rational elimination is total")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusExample {
    pub form: HyperplaneForm,
    pub real_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    pub height: u32,
    pub total: usize,
    pub complex_count: usize,
    /// The first ten forms whose core has a non-complex closure.
    pub non_complex_examples: Vec<CensusExample>,
    /// `(real_dim, is_complex)` → number of forms.
    pub outcomes: BTreeMap<(usize, bool), usize>,
}

impl Census {
    /// Every closure is the core itself (complex, dimension `2n − 2`) or the
    /// whole hyperplane (dimension `2n − 1`).
    pub fn dichotomy_holds(&self, n: usize) -> bool {
        self.outcomes.keys().all(|&(d, c)| (c && d + 2 == 2 * n) || (!c && d + 1 == 2 * n))
    }
}

/// Visits every form up to `height` with the dimension and complexity of the
/// closure of its core; stops early when `visit` returns `false`.
fn scan_cores(t: &ComplexTorus, height: u32, mut visit: impl FnMut(&HyperplaneForm, usize, bool) -> bool) {
    let table = CoreTable::new(t);
    for r in hyperplane_forms(2 * t.n(), height) {
        let forms = table.forms(&r);
        let dim = 2 * t.n() - forms.rows();
        let complex = forms_are_complex(t, &forms);
        if !visit(&r, dim, complex) {
            return;
        }
    }
}

pub fn census(t: &ComplexTorus, height: u32) -> Result<Census> {
    check_height(height)?;
    let mut c = Census { height, total: 0, complex_count: 0, non_complex_examples: Vec::new(), outcomes: BTreeMap::new() };
    scan_cores(t, height, |r, dim, complex| {
        c.total += 1;
        *c.outcomes.entry((dim, complex)).or_default() += 1;
        if complex {
            c.complex_count += 1;
        } else if c.non_complex_examples.len() < 10 {
            c.non_complex_examples.push(CensusExample { form: r.clone(), real_dim: dim });
        }
        true
    });
    Ok(c)
}

/// The first form whose core has a non-complex closure.
pub fn witness_search(t: &ComplexTorus, height: u32) -> Result<Option<(HyperplaneForm, ClosureResult)>> {
    check_height(height)?;
    let mut found = None;
    scan_cores(t, height, |r, _, complex| {
        if !complex {
            found = Some(r.clone());
        }
        complex
    });
    let Some(r) = found else { return Ok(None) };
    let res = closure(t, &hyperplane_core(t, &r)?)?;
    if res.is_complex {
        return Err(Error::Internal(format!("core closure of {:?} disagrees between engines", r.r)));
    }
    Ok(Some((r, res)))
}

fn check_height(height: u32) -> Result<()> {
    if height == 0 {
        return Err(Error::InvalidForm("height must be at least 1".into()));
    }
    Ok(())
}

/// Saturated integer forms vanishing on `c`, as rows.
fn integer_annihilator(c: &RationalSubspace) -> IMat {
    integer_kernel(&c.basis().transpose()).transpose()
}

/// `T/C` together with the maps realizing the projection.
#[derive(Debug, Clone)]
pub struct QuotientTorus {
    pub torus: ComplexTorus,
    /// Lattice coordinates `ℤ²ⁿ → ℤ²⁽ⁿ⁻ᵏ⁾`.
    pub lattice_map: IMat,
    /// The projection `ℂⁿ → ℂⁿ⁻ᵏ`.
    pub complex_map: Mat<AlgebraicNumber>,
    kernel_basis: Vec<FieldVector>,
}

impl QuotientTorus {
    /// `{x : Ax ∈ W}`.
    pub fn pullback(&self, w: &RationalSubspace) -> RationalSubspace {
        let ann = to_qmat(&w.annihilator());
        let forms = if w.dim() == w.ambient_dim() {
            Mat::from_rows(Vec::new(), self.lattice_map.cols())
        } else {
            mat_mul(&Rationals, &ann, &to_qmat(&self.lattice_map))
        };
        RationalSubspace::from_forms(&forms, self.lattice_map.cols())
    }

    /// Preimage of a complex subspace of the quotient.
    pub fn pullback_subgroup(&self, v: &ComplexSubgroupSpec) -> Result<ComplexSubgroupSpec> {
        let field = self.torus.field();
        let q = &self.complex_map;
        let mut basis = self.kernel_basis.clone();
        for u in v.basis() {
            let rhs = Mat::from_cols(vec![u.clone()], q.rows());
            let lift = solve(field, q, &rhs)?.ok_or_else(|| Error::Internal("projection is not surjective".into()))?;
            basis.push(lift.col(0));
        }
        ComplexSubgroupSpec::new(field.clone(), q.cols(), basis)
    }
}

pub fn quotient_torus(t: &ComplexTorus, c: &RationalSubspace) -> Result<QuotientTorus> {
    if !is_complex_subspace(t, c)? {
        return Err(Error::NotComplex("the subtorus is not J-invariant".into()));
    }
    let field = t.field();
    let n = t.n();
    let a = integer_annihilator(c);
    let m = a.rows();
    let h = hnf(&a);
    let expected = Mat::from_fn(m, 2 * n, |i, j| BigInt::from((i == j) as u8));
    if h.matrix != expected {
        return Err(Error::Internal("saturated annihilator is not onto".into()));
    }
    // complexification of C and its annihilator in the dual of ℂⁿ
    let cvecs: Vec<FieldVector> = (0..c.dim())
        .map(|j| t.lattice_vector(&c.basis().col(j).into_iter().map(Q::from_integer).collect::<Vec<_>>()))
        .collect();
    let (kernel_basis, q) = if cvecs.is_empty() {
        (Vec::new(), crate::linalg::identity(field, n))
    } else {
        let cm = Mat::from_cols(cvecs.clone(), n);
        let (_, piv) = rref(field, &cm)?;
        let kb: Vec<FieldVector> = piv.iter().map(|&p| cvecs[p].clone()).collect();
        (kb, left_kernel(field, &cm)?)
    };
    if q.rows() * 2 != m {
        return Err(Error::Internal("quotient dimensions disagree".into()));
    }
    let gens: Vec<FieldVector> = (0..m)
        .map(|i| {
            let d: Vec<Q> = (0..2 * n).map(|r| Q::from_integer(h.transform.get(r, i).clone())).collect();
            mat_vec(field, &q, &t.lattice_vector(&d))
        })
        .collect();
    let torus = ComplexTorus::new(field.clone(), gens).map_err(|e| Error::Internal(format!("quotient lattice: {e}")))?;
    Ok(QuotientTorus { torus, lattice_map: a, complex_map: q, kernel_basis })
}

/// Order of the kernel of `T → Π T/Cᵢ` for codimension-one complex subtori.
pub fn isogeny_to_product(t: &ComplexTorus, subtori: &[RationalSubspace]) -> Result<BigInt> {
    let n = t.n();
    if subtori.len() != n {
        return Err(Error::Dimension(format!("expected {n} subtori, got {}", subtori.len())));
    }
    let mut rows = Vec::new();
    for (k, c) in subtori.iter().enumerate() {
        if c.ambient_dim() != 2 * n || c.dim() + 2 != 2 * n {
            return Err(Error::Dimension(format!("subtorus {k} is not of complex codimension one")));
        }
        if !is_complex_subspace(t, c)? {
            return Err(Error::NotComplex(format!("subtorus {k}")));
        }
        rows.extend(integer_annihilator(c).row_vecs());
    }
    let s = Mat::from_rows(rows, 2 * n);
    let det = determinant(&Rationals, &to_qmat(&s))?;
    if det.is_zero() {
        return Err(Error::SubtoriDoNotSeparate("the intersection has positive dimension".into()));
    }
    Ok(det.abs().to_integer())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Slope {
    Finite(AlgebraicNumber),
    Vertical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineVerdict {
    pub slope: Slope,
    pub real_dim: usize,
    pub is_subtorus: bool,
}

/// Which lines `span{(1, μ)}` (or `{0} × ℂ`) close up to subtori of `B`.
pub fn line_census(b: &ComplexTorus, slopes: &[Slope]) -> Result<Vec<LineVerdict>> {
    if b.n() != 2 {
        return Err(Error::Dimension(format!("line census needs a two-dimensional torus, got {}", b.n())));
    }
    let field = b.field();
    slopes
        .iter()
        .map(|s| {
            let v = match s {
                Slope::Finite(mu) => vec![field.from_int(1), mu.clone()],
                Slope::Vertical => vec![field.from_int(0), field.from_int(1)],
            };
            let res = closure(b, &ComplexSubgroupSpec::new(field.clone(), 2, vec![v])?)?;
            Ok(LineVerdict { slope: s.clone(), real_dim: res.real_dim, is_subtorus: res.real_dim == 2 })
        })
        .collect()
}

/// `E₁ × … × Eₙ` with generators `ω₁eₖ, ω₂eₖ` factor by factor.
pub fn product_torus(curves: &[EllipticCurveSpec]) -> Result<ComplexTorus> {
    let Some(first) = curves.first() else {
        return Err(Error::Dimension("at least one curve is required".into()));
    };
    let field = first.field().clone();
    if curves.iter().any(|c| *c.field() != field) {
        return Err(Error::FieldMismatch("curves use different fields".into()));
    }
    let n = curves.len();
    let mut gens = Vec::with_capacity(2 * n);
    for (k, c) in curves.iter().enumerate() {
        for w in [c.omega1(), c.omega2()] {
            let mut v = vec![field.from_int(0); n];
            v[k] = w.clone();
            gens.push(v);
        }
    }
    ComplexTorus::new(field, gens)
}

/// All curves have complex multiplication and are pairwise isogenous.
pub fn product_form_classify(curves: &[EllipticCurveSpec]) -> Result<bool> {
    if curves.is_empty() {
        return Err(Error::Dimension("at least one curve is required".into()));
    }
    let taus = curves.iter().map(tau_invariant).collect::<Result<Vec<_>>>()?;
    if !taus.iter().all(|t| cm_check(t).has_cm) {
        return Ok(false);
    }
    for i in 0..taus.len() {
        for j in i + 1..taus.len() {
            if is_isogenous(&taus[i], &taus[j])? == Isogeny::No {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signal {
    Agrees,
    Disagrees,
    /// No witness found although the criterion predicts one.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics {
    pub witness_signal: Signal,
    pub oracle_agrees: Option<bool>,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    /// `T` is isogenous to `Eⁿ` for a CM curve `E`, decided as `dim End_ℚ(T) = 2n²`.
    pub condition_ii: bool,
    pub end_dim: usize,
    pub height: u32,
    pub witness: Option<CensusExample>,
    /// Verdict from the declared product form, if any.
    pub oracle: Option<bool>,
    pub diagnostics: Diagnostics,
}

pub fn classify(t: &ComplexTorus, product_form: Option<&[EllipticCurveSpec]>, height: u32) -> Result<ClassificationReport> {
    let witness = witness_search(t, height)?.map(|(form, res)| CensusExample { form, real_dim: res.real_dim });
    report(t, product_form, height, witness)
}

/// [`classify`] together with the full census at the same height, scanning
/// the forms once.
pub fn classify_with_census(
    t: &ComplexTorus,
    product_form: Option<&[EllipticCurveSpec]>,
    height: u32,
) -> Result<(ClassificationReport, Census)> {
    let c = census(t, height)?;
    let witness = match c.non_complex_examples.first() {
        None => None,
        Some(first) => {
            let res = closure(t, &hyperplane_core(t, &first.form)?)?;
            if res.is_complex || res.real_dim != first.real_dim {
                return Err(Error::Internal(format!("core closure of {:?} disagrees between engines", first.form.r)));
            }
            Some(first.clone())
        }
    };
    Ok((report(t, product_form, height, witness)?, c))
}

fn report(
    t: &ComplexTorus,
    product_form: Option<&[EllipticCurveSpec]>,
    height: u32,
    witness: Option<CensusExample>,
) -> Result<ClassificationReport> {
    let n = t.n();
    let end_dim = endomorphism_algebra(t).dim;
    let condition_ii = end_dim == 2 * n * n;
    let oracle = product_form.map(product_form_classify).transpose()?;
    let witness_signal = match (condition_ii, witness.is_some()) {
        (true, false) | (false, true) => Signal::Agrees,
        (true, true) => Signal::Disagrees,
        (false, false) => Signal::Undetermined,
    };
    let oracle_agrees = oracle.map(|o| o == condition_ii);
    let consistent = witness_signal == Signal::Agrees && oracle_agrees != Some(false);
    Ok(ClassificationReport {
        condition_ii,
        end_dim,
        height,
        witness,
        oracle,
        diagnostics: Diagnostics { witness_signal, oracle_agrees, consistent },
    })
}

/// Full closure of every core up to `height`, for cross-checking the census.
pub fn core_closures(t: &ComplexTorus, height: u32) -> Result<Vec<(HyperplaneForm, ClosureResult)>> {
    check_height(height)?;
    let table = CoreTable::new(t);
    Ok(hyperplane_forms(2 * t.n(), height).into_iter().map(|r| {
        let res = result_from_forms(t, &table.forms(&r));
        (r, res)
    }).collect())
}
