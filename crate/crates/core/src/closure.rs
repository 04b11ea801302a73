//! Closures of complex subspaces in a torus, complexity tests, and scalar
//! multipliers in lattice coordinates.
//!
//! The identity component of the closure of `V + Γ` is the smallest
//! rational subspace `W` (in lattice coordinates) containing the real span of
//! `V`. It is computed from the rational forms vanishing on `V`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{rational_kernel, AlgebraicNumber, FieldSpec, Side};
use crate::lattice::{primitive_rows, IMat};
use crate::linalg::{rank, Mat, QMat};
use crate::torus::{ComplexSubgroupSpec, ComplexTorus, RationalSubspace};
use crate::Q;

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureResult {
    pub w: RationalSubspace,
    pub real_dim: usize,
    pub is_complex: bool,
    /// Primitive integer rows spanning the rational forms vanishing on `W`.
    pub codim_forms: IMat,
}

/// Rational forms vanishing on the real span of `V`, as reduced echelon rows.
///
/// `rᵀ c(v) = 2 Re(rᵀ A v)` with `A` the first `n` columns of `P⁻¹`, so `r`
/// vanishes on `v` and `iv` iff `rᵀ A v = 0` in the field.
pub(crate) fn vanishing_forms(t: &ComplexTorus, v: &ComplexSubgroupSpec) -> QMat {
    let n = t.n();
    let field = t.field();
    let pinv = t.period_inverse();
    let av = Mat::from_fn(2 * n, v.dim(), |j, c| {
        let mut acc = field.from_int(0);
        for (k, x) in v.basis()[c].iter().enumerate() {
            if !x.is_zero() {
                acc = field.add(&acc, &field.mul(pinv.get(j, k), x));
            }
        }
        acc
    });
    rational_kernel(field, &av, Side::Left)
}

/// `ker(forms)` is `J`-invariant iff every `f·J` reduces to zero against the
/// echelon rows.
pub(crate) fn forms_are_complex(t: &ComplexTorus, forms: &QMat) -> bool {
    let field = t.field();
    let m = 2 * t.n();
    let pivots: Vec<usize> =
        (0..forms.rows()).map(|i| forms.row(i).iter().position(|x| !x.is_zero()).expect("echelon rows are nonzero")).collect();
    for i in 0..forms.rows() {
        let mut fj: Vec<AlgebraicNumber> = (0..m)
            .map(|c| {
                let mut acc = field.from_int(0);
                for (k, fk) in forms.row(i).iter().enumerate() {
                    if !fk.is_zero() {
                        acc = field.add(&acc, &field.scale(t.j().get(k, c), fk));
                    }
                }
                acc
            })
            .collect();
        for (row, &p) in pivots.iter().enumerate() {
            let coef = fj[p].clone();
            if coef.is_zero() {
                continue;
            }
            for (c, x) in forms.row(row).iter().enumerate() {
                if !x.is_zero() {
                    fj[c] = field.sub(&fj[c], &field.scale(&coef, x));
                }
            }
        }
        if fj.iter().any(|x| !x.is_zero()) {
            return false;
        }
    }
    true
}

pub(crate) fn result_from_forms(t: &ComplexTorus, forms: &QMat) -> ClosureResult {
    let ambient = 2 * t.n();
    let w = RationalSubspace::from_forms(forms, ambient);
    ClosureResult {
        real_dim: w.dim(),
        is_complex: forms_are_complex(t, forms),
        codim_forms: primitive_rows(forms),
        w,
    }
}

/// Identity component of the closure of the image of `V` in `T`.
pub fn closure(t: &ComplexTorus, v: &ComplexSubgroupSpec) -> Result<ClosureResult> {
    t.check_subgroup(v)?;
    if v.dim() == 0 {
        let ambient = 2 * t.n();
        let w = RationalSubspace::zero(ambient);
        return Ok(ClosureResult { codim_forms: w.annihilator(), w, real_dim: 0, is_complex: true });
    }
    Ok(result_from_forms(t, &vanishing_forms(t, v)))
}

/// `rank [W | JW] = rank W` over the field.
pub fn is_complex_subspace(t: &ComplexTorus, w: &RationalSubspace) -> Result<bool> {
    t.check_subspace(w)?;
    if w.dim() == 0 {
        return Ok(true);
    }
    let field = t.field();
    let wk = w.basis().map(|x| field.from_rational(Q::from_integer(x.clone())));
    let jw = crate::linalg::mat_mul(field, t.j(), &wk);
    Ok(rank(field, &wk.hcat(&jw))? == w.dim())
}

/// Scalar multiplication by `λ` in lattice coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierMatrix {
    pub matrix: Mat<AlgebraicNumber>,
    /// All entries rational, i.e. `λ(Γ⊗ℚ) = Γ⊗ℚ`.
    pub rational: bool,
}

impl MultiplierMatrix {
    pub fn rational_matrix(&self) -> Option<QMat> {
        if !self.rational {
            return None;
        }
        Some(self.matrix.map(|x| x.as_rational().expect("flagged rational")))
    }
}

pub fn multiplier_matrix(t: &ComplexTorus, lambda: &AlgebraicNumber) -> Result<MultiplierMatrix> {
    check_element(t.field(), lambda)?;
    if lambda.is_zero() {
        return Err(Error::ZeroMultiplier);
    }
    let matrix = t.scalar_matrix(lambda);
    let rational = matrix.entries().iter().all(|x| x.as_rational().is_some());
    Ok(MultiplierMatrix { matrix, rational })
}

/// Whether `M_λ` maps the closure of `V` into itself.
pub fn lambda_invariance_check(t: &ComplexTorus, v: &ComplexSubgroupSpec, lambda: &AlgebraicNumber) -> Result<bool> {
    let mm = multiplier_matrix(t, lambda)?;
    let Some(m) = mm.rational_matrix() else {
        return Err(Error::NotRationalEndomorphism);
    };
    let w = closure(t, v)?.w;
    let image = crate::linalg::mat_mul(&crate::linalg::Rationals, &m, &w.columns_q());
    Ok((0..image.cols()).all(|j| w.contains(&image.col(j))))
}

/// Smallest `m ≥ 1` making an integer matrix out of `m·M`.
pub(crate) fn denominator_lcm(m: &QMat) -> BigInt {
    m.entries().iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn check_element(field: &FieldSpec, x: &AlgebraicNumber) -> Result<()> {
    if x.coeffs().len() != field.degree() {
        return Err(Error::Dimension(format!(
            "element has {} coefficients, field degree is {}",
            x.coeffs().len(),
            field.degree()
        )));
    }
    Ok(())
}

/// Largest distance to ℤ of `r·x` over the annihilator rows `r` and sample
/// points `x` of `V + Γ` reduced mod `ℤ²ⁿ`. Each sample is a list of real
/// coefficients on the real span columns plus an integer shift. Floating
/// point; a diagnostic only.
pub fn fuzz_residual(t: &ComplexTorus, v: &ComplexSubgroupSpec, result: &ClosureResult, samples: &[Vec<f64>]) -> Result<f64> {
    let span = t.subgroup_real_span(v)?;
    let field = t.field();
    let span_f: Vec<Vec<f64>> = span.col_vecs().iter().map(|c| c.iter().map(|x| field.approx(x).re).collect()).collect();
    let forms: Vec<Vec<f64>> = (0..result.codim_forms.rows())
        .map(|i| result.codim_forms.row(i).iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
        .collect();
    let m = 2 * t.n();
    let mut worst: f64 = 0.0;
    for s in samples {
        let mut x = vec![0.0; m];
        for (coef, col) in s.iter().zip(&span_f) {
            for (xi, ci) in x.iter_mut().zip(col) {
                *xi += coef * ci;
            }
        }
        for (k, xi) in x.iter_mut().enumerate() {
            *xi += s.get(span_f.len() + k).copied().unwrap_or(0.0);
            *xi -= xi.floor();
        }
        for f in &forms {
            let val: f64 = f.iter().zip(&x).map(|(a, b)| a * b).sum();
            worst = worst.max((val - val.round()).abs());
        }
    }
    Ok(worst)
}
