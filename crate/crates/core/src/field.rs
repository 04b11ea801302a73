//! Number fields ℚ(θ) with a fixed complex embedding and an explicit
//! complex-conjugation automorphism.
//!
//! Elements are coefficient vectors over the power basis `1, θ, …, θ^{d-1}`.
//! Zero tests and equality are exact coefficient comparisons; the embedding
//! is only consulted for sign decisions on values already known to be
//! nonzero, by bisecting an isolating rectangle of θ.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::{count_roots_in_box, ComplexBox, Interval};
use crate::linalg::{right_kernel, Mat, QMat, Rationals, Scalars};
use crate::poly::Poly;
use crate::Q;

/// Coordinates over the power basis; always of length `degree`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraicNumber {
    coeffs: Vec<Q>,
}

impl AlgebraicNumber {
    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The value as a rational, if it has no θ-component.
    pub fn as_rational(&self) -> Option<Q> {
        if self.coeffs.iter().skip(1).all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}·θ"),
                _ => format!("{c}·θ^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

struct FieldInner {
    min_poly: Poly,
    degree: usize,
    root_box: ComplexBox,
    conj_image: AlgebraicNumber,
    imag_unit: AlgebraicNumber,
    /// θ^k reduced, for k < 2d - 1.
    power_table: Vec<Vec<Q>>,
    /// conj(θ)^k, for k < d.
    conj_powers: Vec<Vec<Q>>,
    /// Successive bisections of `root_box`; level k is a pure function of k.
    levels: Mutex<Vec<ComplexBox>>,
}

/// A conjugation-closed number field containing `i`, plus its embedding.
///
/// Cloning is cheap; clones share the refinement cache.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<FieldInner>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.min_poly == other.inner.min_poly
                && self.inner.root_box == other.inner.root_box
                && self.inner.conj_image == other.inner.conj_image)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("min_poly", &self.inner.min_poly)
            .field("root_box", &self.inner.root_box)
            .field("conj_image", &self.inner.conj_image)
            .finish()
    }
}

/// Upper bound on bisection depth when certifying the conjugation map.
const MAX_CERTIFY_LEVELS: usize = 400;

impl FieldSpec {
    /// Validates and builds a field. `min_poly` is in ascending coefficient
    /// order; `conj_image` gives conj(θ) over the power basis. The element
    /// `i` is located automatically.
    pub fn new(min_poly: Vec<Q>, root_box: ComplexBox, conj_image: Vec<Q>) -> Result<Self> {
        Self::build(min_poly, root_box, conj_image, None)
    }

    /// Like [`FieldSpec::new`] but with `i` supplied over the power basis.
    pub fn with_imag_unit(
        min_poly: Vec<Q>,
        root_box: ComplexBox,
        conj_image: Vec<Q>,
        imag_unit: Vec<Q>,
    ) -> Result<Self> {
        Self::build(min_poly, root_box, conj_image, Some(imag_unit))
    }

    fn build(min_poly: Vec<Q>, root_box: ComplexBox, conj_image: Vec<Q>, imag_unit: Option<Vec<Q>>) -> Result<Self> {
        let p = Poly::new(min_poly);
        let degree = match p.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(Error::InvalidMinPoly("degree must be at least 1".into())),
        };
        if !p.lead().is_some_and(One::is_one) {
            return Err(Error::InvalidMinPoly("polynomial is not monic".into()));
        }
        if p.gcd(&p.derivative()).degree() != Some(0) {
            return Err(Error::InvalidMinPoly("polynomial is not squarefree".into()));
        }
        if let Some(r) = p.rational_roots().first() {
            return Err(Error::InvalidMinPoly(format!("polynomial has the rational root {r}")));
        }
        match count_roots_in_box(&p, &root_box) {
            Ok(1) => {}
            Ok(k) => return Err(Error::InvalidRootBox(format!("box contains {k} roots, expected exactly one"))),
            Err(_) => return Err(Error::InvalidRootBox("a root lies on the box boundary".into())),
        }
        if conj_image.len() > degree {
            return Err(Error::InvalidConjugation(format!(
                "conj_image has {} coefficients, field degree is {degree}",
                conj_image.len()
            )));
        }

        let mut power_table = Vec::with_capacity(2 * degree);
        for k in 0..(2 * degree).saturating_sub(1) {
            let mut mono = vec![Q::zero(); k + 1];
            mono[k] = Q::one();
            let r = Poly::new(mono).rem(&p);
            power_table.push(pad(r.coeffs().to_vec(), degree));
        }
        let conj_image = AlgebraicNumber { coeffs: pad(conj_image, degree) };
        let mut inner = FieldInner {
            min_poly: p,
            degree,
            root_box: root_box.clone(),
            conj_image: conj_image.clone(),
            imag_unit: AlgebraicNumber { coeffs: vec![Q::zero(); degree] },
            power_table,
            conj_powers: Vec::new(),
            levels: Mutex::new(vec![root_box]),
        };
        // conj(θ)^k by repeated multiplication
        let mut acc = one_coeffs(degree);
        for _ in 0..degree {
            inner.conj_powers.push(acc.clone());
            acc = mul_coeffs(&inner, &acc, &conj_image.coeffs);
        }
        let mut field = FieldSpec { inner: Arc::new(inner) };
        field.check_conjugation()?;

        let unit = match imag_unit {
            Some(c) => {
                if c.len() > degree {
                    return Err(Error::NoImaginaryUnit("imag_unit has too many coefficients".into()));
                }
                let u = AlgebraicNumber { coeffs: pad(c, degree) };
                if !field.is_imag_unit(&u) {
                    return Err(Error::NoImaginaryUnit("supplied imag_unit does not embed to +i".into()));
                }
                u
            }
            None => field.find_imag_unit()?,
        };
        Arc::get_mut(&mut field.inner).expect("field not yet shared").imag_unit = unit;
        Ok(field)
    }

    fn check_conjugation(&self) -> Result<()> {
        let c = &self.inner.conj_image;
        let on_poly = self.eval_poly_at(&self.inner.min_poly, c);
        if !on_poly.is_zero() {
            return Err(Error::InvalidConjugation("min_poly(conj_image) is not zero".into()));
        }
        if self.conj(c) != self.theta() {
            return Err(Error::InvalidConjugation("conjugation is not an involution".into()));
        }
        // conj_image must embed to the conjugate of θ, the unique root in conj(root_box)
        let target = self.inner.root_box.conj();
        for level in 0..MAX_CERTIFY_LEVELS {
            let enclosure = self.level(level).eval_poly(c.coeffs());
            if enclosure.is_subset_of(&target) {
                return Ok(());
            }
            if !enclosure.intersects(&target) {
                return Err(Error::InvalidConjugation(
                    "conj_image embeds to a root other than the complex conjugate of θ".into(),
                ));
            }
        }
        Err(Error::InvalidConjugation("could not certify the embedding of conj_image".into()))
    }

    fn is_imag_unit(&self, u: &AlgebraicNumber) -> bool {
        let sq = self.mul(u, u);
        sq == self.from_int(-1) && self.conj(u) == self.neg(u) && self.im_sign(u) == Ordering::Greater
    }

    /// Locates `i` by solving the Vandermonde system over all complex
    /// embeddings in floating point, rounding to small rationals, and
    /// verifying the candidate exactly.
    fn find_imag_unit(&self) -> Result<AlgebraicNumber> {
        let d = self.degree();
        if d % 2 == 1 {
            return Err(Error::NoImaginaryUnit("odd degree fields have a real embedding".into()));
        }
        let fcoeffs: Vec<f64> = self
            .inner
            .min_poly
            .coeffs()
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect();
        let roots = numeric_roots(&fcoeffs);
        let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
        if roots.iter().any(|r| r.im.abs() < 1e-9 * scale) {
            return Err(Error::NoImaginaryUnit("minimal polynomial has a real root".into()));
        }
        let theta0 = {
            let b = self.embed(&self.theta(), &Q::new(1.into(), 1_000_000.into()));
            Complex64::new(b.re.midpoint().to_f64().unwrap_or(0.0), b.im.midpoint().to_f64().unwrap_or(0.0))
        };
        let chosen = (0..d)
            .min_by(|&a, &b| (roots[a] - theta0).norm().total_cmp(&(roots[b] - theta0).norm()))
            .unwrap_or(0);
        // group roots into conjugate pairs, upper half-plane first
        let mut upper: Vec<usize> = (0..d).filter(|&k| roots[k].im > 0.0).collect();
        let partner = |k: usize| {
            (0..d)
                .filter(|&j| j != k)
                .min_by(|&a, &b| (roots[a] - roots[k].conj()).norm().total_cmp(&(roots[b] - roots[k].conj()).norm()))
                .unwrap_or(k)
        };
        let chosen_upper = if roots[chosen].im > 0.0 { chosen } else { partner(chosen) };
        upper.retain(|&k| k != chosen_upper);
        upper.insert(0, chosen_upper);
        if upper.len() != d / 2 || upper.len() > 16 {
            return Err(Error::NoImaginaryUnit("could not pair the complex embeddings".into()));
        }
        let chosen_sign = if chosen == chosen_upper { 1.0 } else { -1.0 };
        let vander: Vec<Vec<Complex64>> =
            roots.iter().map(|r| (0..d).map(|k| r.powu(k as u32)).collect()).collect();
        for pattern in 0u32..(1 << (upper.len() - 1)) {
            let mut rhs = vec![Complex64::new(0.0, 0.0); d];
            for (slot, &k) in upper.iter().enumerate() {
                let s = if slot == 0 {
                    chosen_sign
                } else if pattern >> (slot - 1) & 1 == 1 {
                    -1.0
                } else {
                    1.0
                };
                rhs[k] = Complex64::new(0.0, s);
                rhs[partner(k)] = Complex64::new(0.0, -s);
            }
            let Some(sol) = solve_complex(&vander, &rhs) else { continue };
            if sol.iter().any(|c| c.im.abs() > 1e-6) {
                continue;
            }
            let coeffs: Option<Vec<Q>> = sol.iter().map(|c| rational_approx(c.re, 1_000_000, 1e-7)).collect();
            let Some(coeffs) = coeffs else { continue };
            let cand = AlgebraicNumber { coeffs };
            if self.is_imag_unit(&cand) {
                return Ok(cand);
            }
        }
        Err(Error::NoImaginaryUnit("no element of the field squares to -1".into()))
    }

    pub fn degree(&self) -> usize {
        self.inner.degree
    }

    pub fn min_poly(&self) -> &Poly {
        &self.inner.min_poly
    }

    pub fn root_box(&self) -> &ComplexBox {
        &self.inner.root_box
    }

    pub fn conj_image(&self) -> &AlgebraicNumber {
        &self.inner.conj_image
    }

    /// Builds an element from at most `degree` power-basis coordinates.
    pub fn element(&self, coeffs: Vec<Q>) -> Result<AlgebraicNumber> {
        if coeffs.len() > self.degree() {
            return Err(Error::Dimension(format!(
                "element has {} coefficients, field degree is {}",
                coeffs.len(),
                self.degree()
            )));
        }
        Ok(AlgebraicNumber { coeffs: pad(coeffs, self.degree()) })
    }

    pub fn from_rational(&self, q: Q) -> AlgebraicNumber {
        let mut coeffs = vec![Q::zero(); self.degree()];
        coeffs[0] = q;
        AlgebraicNumber { coeffs }
    }

    pub fn from_int(&self, n: i64) -> AlgebraicNumber {
        self.from_rational(Q::from_integer(n.into()))
    }

    pub fn theta(&self) -> AlgebraicNumber {
        let mut coeffs = vec![Q::zero(); self.degree()];
        if self.degree() > 1 {
            coeffs[1] = Q::one();
        } else {
            // degree one: θ is the rational root, excluded by validation
            coeffs[0] = -self.inner.min_poly.coeff(0);
        }
        AlgebraicNumber { coeffs }
    }

    /// The element of the field embedding to `+i`.
    pub fn i(&self) -> AlgebraicNumber {
        self.inner.imag_unit.clone()
    }

    pub fn add(&self, x: &AlgebraicNumber, y: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber { coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, x: &AlgebraicNumber, y: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber { coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self, x: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber { coeffs: x.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, x: &AlgebraicNumber, y: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber { coeffs: mul_coeffs(&self.inner, &x.coeffs, &y.coeffs) }
    }

    pub fn scale(&self, x: &AlgebraicNumber, s: &Q) -> AlgebraicNumber {
        AlgebraicNumber { coeffs: x.coeffs.iter().map(|a| a * s).collect() }
    }

    pub fn inv(&self, x: &AlgebraicNumber) -> Result<AlgebraicNumber> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = x.as_rational() {
            return Ok(self.from_rational(q.recip()));
        }
        let (g, s, _) = Poly::new(x.coeffs.clone()).ext_gcd(&self.inner.min_poly);
        if g.degree() != Some(0) {
            return Err(Error::ReducibleMinPoly(format!("{x} is a zero divisor")));
        }
        Ok(AlgebraicNumber { coeffs: pad(s.rem(&self.inner.min_poly).coeffs().to_vec(), self.degree()) })
    }

    pub fn div(&self, x: &AlgebraicNumber, y: &AlgebraicNumber) -> Result<AlgebraicNumber> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &AlgebraicNumber, mut e: u32) -> AlgebraicNumber {
        let mut base = x.clone();
        let mut acc = self.from_int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Image under complex conjugation.
    pub fn conj(&self, x: &AlgebraicNumber) -> AlgebraicNumber {
        let d = self.degree();
        let mut out = vec![Q::zero(); d];
        for (a, pw) in x.coeffs.iter().zip(&self.inner.conj_powers) {
            if a.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(pw) {
                *o += a * p;
            }
        }
        AlgebraicNumber { coeffs: out }
    }

    /// Exact test `x = conj(x)`.
    pub fn is_real(&self, x: &AlgebraicNumber) -> bool {
        self.conj(x) == *x
    }

    /// Real part, an element of the real subfield.
    pub fn re(&self, x: &AlgebraicNumber) -> AlgebraicNumber {
        self.scale(&self.add(x, &self.conj(x)), &Q::new(1.into(), 2.into()))
    }

    /// Imaginary part, an element of the real subfield.
    pub fn im(&self, x: &AlgebraicNumber) -> AlgebraicNumber {
        let diff = self.sub(x, &self.conj(x));
        // (x - x̄) / (2i) = -i (x - x̄) / 2
        self.scale(&self.mul(&diff, &self.i()), &Q::new((-1).into(), 2.into()))
    }

    fn eval_poly_at(&self, p: &Poly, x: &AlgebraicNumber) -> AlgebraicNumber {
        let mut acc = self.from_int(0);
        for c in p.coeffs().iter().rev() {
            acc = self.add(&self.mul(&acc, x), &self.from_rational(c.clone()));
        }
        acc
    }

    /// The k-th bisection of the root box; deterministic in `k`.
    pub fn level(&self, k: usize) -> ComplexBox {
        let mut levels = self.inner.levels.lock().unwrap_or_else(|e| e.into_inner());
        while levels.len() <= k {
            let last = levels.last().cloned().expect("level 0 is always present");
            let next = refine(&self.inner.min_poly, &last);
            levels.push(next);
        }
        levels[k].clone()
    }

    /// Rectangle containing the embedded value of `x` with both sides `< eps`.
    pub fn embed(&self, x: &AlgebraicNumber, eps: &Q) -> ComplexBox {
        assert!(eps.is_positive(), "embed precision must be positive");
        if let Some(q) = x.as_rational() {
            return ComplexBox::point(q, Q::zero());
        }
        let mut k = 0;
        loop {
            let enc = self.level(k).eval_poly(&x.coeffs);
            if enc.re.width() < *eps && enc.im.width() < *eps {
                return enc;
            }
            k += 1;
        }
    }

    /// Sign of the imaginary part of the embedded value.
    pub fn im_sign(&self, x: &AlgebraicNumber) -> Ordering {
        if self.is_real(x) {
            return Ordering::Equal;
        }
        let mut k = 0;
        loop {
            let enc = self.level(k).eval_poly(&x.coeffs);
            if enc.im.lo.is_positive() {
                return Ordering::Greater;
            }
            if enc.im.hi.is_negative() {
                return Ordering::Less;
            }
            k += 1;
        }
    }

    /// Sign of the real part of the embedded value.
    pub fn re_sign(&self, x: &AlgebraicNumber) -> Ordering {
        if self.conj(x) == self.neg(x) {
            return Ordering::Equal;
        }
        let mut k = 0;
        loop {
            let enc = self.level(k).eval_poly(&x.coeffs);
            if enc.re.lo.is_positive() {
                return Ordering::Greater;
            }
            if enc.re.hi.is_negative() {
                return Ordering::Less;
            }
            k += 1;
        }
    }

    /// Floating-point value of the embedding, accurate to about 1e-13.
    pub fn approx(&self, x: &AlgebraicNumber) -> Complex64 {
        let b = self.embed(x, &Q::new(1.into(), 10_000_000_000_000i64.into()));
        Complex64::new(
            b.re.midpoint().to_f64().unwrap_or(f64::NAN),
            b.im.midpoint().to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Scalars for FieldSpec {
    type Elem = AlgebraicNumber;

    fn zero(&self) -> AlgebraicNumber {
        self.from_int(0)
    }
    fn one(&self) -> AlgebraicNumber {
        self.from_int(1)
    }
    fn is_zero(&self, x: &AlgebraicNumber) -> bool {
        x.is_zero()
    }
    fn add(&self, x: &AlgebraicNumber, y: &AlgebraicNumber) -> AlgebraicNumber {
        FieldSpec::add(self, x, y)
    }
    fn sub(&self, x: &AlgebraicNumber, y: &AlgebraicNumber) -> AlgebraicNumber {
        FieldSpec::sub(self, x, y)
    }
    fn mul(&self, x: &AlgebraicNumber, y: &AlgebraicNumber) -> AlgebraicNumber {
        FieldSpec::mul(self, x, y)
    }
    fn neg(&self, x: &AlgebraicNumber) -> AlgebraicNumber {
        FieldSpec::neg(self, x)
    }
    fn inv(&self, x: &AlgebraicNumber) -> Result<AlgebraicNumber> {
        FieldSpec::inv(self, x)
    }
}

/// Which kernel [`rational_kernel`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `{ r ∈ ℚᵐ : rᵀ A = 0 }`
    Left,
    /// `{ r ∈ ℚᵏ : A r = 0 }`
    Right,
}

/// Rational solutions of a homogeneous system with field entries, as rows
/// in reduced echelon form. Each entry is expanded into its power-basis
/// coordinates, which turns the system into a purely rational one.
pub fn rational_kernel(field: &FieldSpec, a: &Mat<AlgebraicNumber>, side: Side) -> QMat {
    let a = match side {
        Side::Left => a.transpose(),
        Side::Right => a.clone(),
    };
    let d = field.degree();
    let mut rows = Vec::with_capacity(a.rows() * d);
    for i in 0..a.rows() {
        for t in 0..d {
            let row: Vec<Q> = (0..a.cols()).map(|j| a.get(i, j).coeffs[t].clone()).collect();
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    let system = Mat::from_rows(rows, a.cols());
    right_kernel(&Rationals, &system).expect("rational elimination is total")
}

fn pad(mut v: Vec<Q>, d: usize) -> Vec<Q> {
    v.resize(d, Q::zero());
    v
}

fn one_coeffs(d: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); d];
    v[0] = Q::one();
    v
}

fn mul_coeffs(inner: &FieldInner, x: &[Q], y: &[Q]) -> Vec<Q> {
    let d = inner.degree;
    let xs = x.iter().rposition(|c| !c.is_zero());
    let ys = y.iter().rposition(|c| !c.is_zero());
    let (Some(xs), Some(ys)) = (xs, ys) else {
        return vec![Q::zero(); d];
    };
    if xs == 0 && ys == 0 {
        let mut out = vec![Q::zero(); d];
        out[0] = &x[0] * &y[0];
        return out;
    }
    let mut conv = vec![Q::zero(); xs + ys + 1];
    for (i, a) in x[..=xs].iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y[..=ys].iter().enumerate() {
            if !b.is_zero() {
                conv[i + j] += a * b;
            }
        }
    }
    let mut out = vec![Q::zero(); d];
    for (k, c) in conv.into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if k < d {
            out[k] += c;
        } else {
            for (o, t) in out.iter_mut().zip(&inner.power_table[k]) {
                if !t.is_zero() {
                    *o += &c * t;
                }
            }
        }
    }
    out
}

/// One refinement step: a Krawczyk contraction when it shrinks the box by
/// at least a quarter, bisection otherwise. The root stays strictly inside
/// every returned box.
fn refine(p: &Poly, b: &ComplexBox) -> ComplexBox {
    if let Some(k) = krawczyk(p, b) {
        if k.max_side() * Q::from_integer(4.into()) <= b.max_side() * Q::from_integer(3.into()) {
            return k;
        }
    }
    bisect(p, b)
}

/// `(K(B) ∩ B)` with `K(B) = m − Y p(m) + (1 − Y p'(B))(B − m)`, rounded
/// outward to a dyadic grid. Any root of `p` in `B` lies in `K(B)`.
fn krawczyk(p: &Poly, b: &ComplexBox) -> Option<ComplexBox> {
    let dp = p.derivative();
    let m = ComplexBox::point(b.re.midpoint(), b.im.midpoint());
    let pm = m.eval_poly(p.coeffs());
    let dpm = m.eval_poly(dp.coeffs());
    let (dr, di) = (dpm.re.lo.to_f64()?, dpm.im.lo.to_f64()?);
    let norm = dr * dr + di * di;
    if !(norm.is_finite() && norm > 0.0) {
        return None;
    }
    let y = ComplexBox::point(Q::from_float(dr / norm)?, Q::from_float(-di / norm)?);
    let dpb = b.eval_poly(dp.coeffs());
    let one = ComplexBox::point(Q::one(), Q::zero());
    let factor = one.add(&y.mul(&dpb).scale(&-Q::one()));
    let shifted = ComplexBox::new(b.re.sub(&m.re), b.im.sub(&m.im));
    let k = m.add(&y.mul(&pm).scale(&-Q::one())).add(&factor.mul(&shifted));
    let k = round_outward(&k);
    let re = Interval::new(k.re.lo.clone().max(b.re.lo.clone()), k.re.hi.clone().min(b.re.hi.clone()));
    let im = Interval::new(k.im.lo.clone().max(b.im.lo.clone()), k.im.hi.clone().min(b.im.hi.clone()));
    if re.lo >= re.hi || im.lo >= im.hi {
        return None;
    }
    Some(ComplexBox::new(re, im))
}

/// Snaps a box outward to a dyadic grid a few bits finer than its width,
/// widening by one grid step so that enclosed points become interior.
fn round_outward(b: &ComplexBox) -> ComplexBox {
    let w = b.max_side();
    let mut bits: i64 = 12;
    if w.is_positive() {
        let ratio = w.recip();
        bits += ratio.to_integer().bits() as i64;
    }
    let scale = Q::from_integer(BigInt::one() << (bits as usize));
    let snap = |iv: &Interval| {
        let lo = ((&iv.lo * &scale).floor() - Q::one()) / &scale;
        let hi = ((&iv.hi * &scale).ceil() + Q::one()) / &scale;
        Interval::new(lo, hi)
    };
    ComplexBox::new(snap(&b.re), snap(&b.im))
}

/// Halves the longer side of an isolating rectangle, keeping the half that
/// holds the root. Cut positions are tried in a fixed order so that the
/// result only depends on the input.
fn bisect(p: &Poly, b: &ComplexBox) -> ComplexBox {
    const CUTS: [(i64, i64); 7] = [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (2, 5), (3, 5)];
    let vertical = b.re.width() >= b.im.width();
    for (num, den) in CUTS {
        let t = Q::new(num.into(), den.into());
        let (lo_half, hi_half) = if vertical {
            let cut = &b.re.lo + b.re.width() * &t;
            (
                ComplexBox::from_corners(b.re.lo.clone(), b.im.lo.clone(), cut.clone(), b.im.hi.clone()),
                ComplexBox::from_corners(cut, b.im.lo.clone(), b.re.hi.clone(), b.im.hi.clone()),
            )
        } else {
            let cut = &b.im.lo + b.im.width() * &t;
            (
                ComplexBox::from_corners(b.re.lo.clone(), b.im.lo.clone(), b.re.hi.clone(), cut.clone()),
                ComplexBox::from_corners(b.re.lo.clone(), cut, b.re.hi.clone(), b.im.hi.clone()),
            )
        };
        let (lo_half, hi_half) = (lo_half.expect("ordered corners"), hi_half.expect("ordered corners"));
        match count_roots_in_box(p, &lo_half) {
            Ok(1) => return lo_half,
            Ok(0) => return hi_half,
            _ => continue,
        }
    }
    unreachable!("a simple root lies on at most one of seven distinct cut lines")
}

/// All complex roots of a polynomial (ascending f64 coefficients) by
/// Durand–Kerner iteration.
fn numeric_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let radius = 1.0 + monic[..d].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, 0.4 + std::f64::consts::TAU * k as f64 / d as f64))
        .collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for k in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if j != k {
                    denom *= roots[k] - roots[j];
                }
            }
            let step = eval(roots[k]) / denom;
            roots[k] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

fn solve_complex(a: &[Vec<Complex64>], b: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = b.len();
    let mut m: Vec<Vec<Complex64>> = a.iter().zip(b).map(|(row, &r)| {
        let mut row = row.clone();
        row.push(r);
        row
    }).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x][c].norm().total_cmp(&m[y][c].norm()))?;
        if m[p][c].norm() < 1e-14 {
            return None;
        }
        m.swap(p, c);
        for r in 0..n {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..=n {
                    let v = m[c][k];
                    m[r][k] -= f * v;
                }
            }
        }
    }
    Some((0..n).map(|k| m[k][n] / m[k][k]).collect())
}

/// Best rational approximation with denominator at most `max_den`, if it
/// is within `tol` of `x`.
fn rational_approx(x: f64, max_den: i64, tol: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some(Q::new(h1.into(), k1.into()));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 != 0 && (x - h1 as f64 / k1 as f64).abs() <= tol {
        Some(Q::new(h1.into(), k1.into()))
    } else {
        None
    }
}

/// Convenience constructors for the fields used throughout the tests and
/// the bundled corpus.
pub mod fields {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn box_of(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> ComplexBox {
        ComplexBox::from_corners(q(a.0, a.1), q(b.0, b.1), q(c.0, c.1), q(d.0, d.1)).expect("ordered corners")
    }

    /// ℚ(i), θ = i.
    pub fn gaussian() -> FieldSpec {
        FieldSpec::new(vec![q(1, 1), q(0, 1), q(1, 1)], box_of((-1, 2), (1, 2), (1, 2), (3, 2)), vec![q(0, 1), q(-1, 1)])
            .expect("ℚ(i) is valid")
    }

    /// ℚ(√2 + i), θ = √2 + i, minimal polynomial x⁴ − 2x² + 9.
    pub fn sqrt2_i() -> FieldSpec {
        FieldSpec::new(
            vec![q(9, 1), q(0, 1), q(-2, 1), q(0, 1), q(1, 1)],
            box_of((1, 1), (1, 2), (2, 1), (3, 2)),
            vec![q(0, 1), q(2, 3), q(0, 1), q(-1, 3)],
        )
        .expect("ℚ(√2+i) is valid")
    }

    /// ℚ(√3 + i), θ = √3 + i, minimal polynomial x⁴ − 4x² + 16.
    pub fn sqrt3_i() -> FieldSpec {
        FieldSpec::new(
            vec![q(16, 1), q(0, 1), q(-4, 1), q(0, 1), q(1, 1)],
            box_of((3, 2), (1, 2), (2, 1), (3, 2)),
            vec![q(0, 1), q(1, 1), q(0, 1), q(-1, 4)],
        )
        .expect("ℚ(√3+i) is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::fields::*;
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn gaussian_defining_relation() {
        let k = gaussian();
        let t = k.theta();
        assert_eq!(k.mul(&t, &t), k.from_int(-1));
        assert_eq!(k.i(), t);
    }

    #[test]
    fn sqrt2_i_unit_squares_to_minus_one() {
        let k = sqrt2_i();
        let t = k.theta();
        // (θ³ + θ)/6
        let x = k.scale(&k.add(&k.pow(&t, 3), &t), &q(1, 6));
        assert_eq!(k.mul(&x, &x), k.from_int(-1));
        assert_eq!(k.i(), x);
    }

    #[test]
    fn add_zero_is_identity() {
        let k = sqrt2_i();
        let x = k.element(vec![q(1, 2), q(-3, 1), q(0, 1), q(5, 7)]).unwrap();
        assert_eq!(k.add(&x, &k.from_int(0)), x);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let k = gaussian();
        assert_eq!(k.div(&k.theta(), &k.from_int(0)), Err(Error::DivisionByZero));
    }

    #[test]
    fn division_inverts_multiplication() {
        let k = sqrt2_i();
        let x = k.element(vec![q(1, 1), q(2, 1), q(0, 1), q(-1, 3)]).unwrap();
        let y = k.element(vec![q(0, 1), q(1, 1), q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(k.div(&k.mul(&x, &y), &y).unwrap(), x);
    }

    #[test]
    fn embedding_of_generator() {
        let k = gaussian();
        let eps = q(1, 100);
        let b = k.embed(&k.theta(), &eps);
        assert!(b.contains(&Q::zero(), &Q::one()));
        assert!(b.max_side() < eps);
        assert_eq!(k.embed(&k.from_int(0), &eps), ComplexBox::zero());
    }

    #[test]
    fn embedding_of_sqrt2_i_unit() {
        let k = sqrt2_i();
        let b = k.embed(&k.i(), &q(1, 1000));
        assert!(b.contains(&Q::zero(), &Q::one()));
    }

    #[test]
    fn reality() {
        let k = gaussian();
        assert!(!k.is_real(&k.theta()));
        assert!(k.is_real(&k.mul(&k.theta(), &k.theta())));
        let k = sqrt2_i();
        let t = k.theta();
        // (−θ³ + 5θ)/6 = √2
        let s = k.scale(&k.sub(&k.scale(&t, &q(5, 1)), &k.pow(&t, 3)), &q(1, 6));
        assert!(k.is_real(&s));
        assert_eq!(k.mul(&s, &s), k.from_int(2));
        assert_eq!(k.re_sign(&s), Ordering::Greater);
        assert_eq!(k.conj_image(), &k.element(vec![q(0, 1), q(2, 3), q(0, 1), q(-1, 3)]).unwrap());
    }

    #[test]
    fn sqrt3_field_has_i() {
        let k = sqrt3_i();
        let t = k.theta();
        assert_eq!(k.i(), k.scale(&k.pow(&t, 3), &q(1, 8)));
    }

    #[test]
    fn rejects_bad_fields() {
        let bx = ComplexBox::from_corners(q(-1, 2), q(1, 2), q(1, 2), q(3, 2)).unwrap();
        // not monic
        assert!(matches!(
            FieldSpec::new(vec![q(1, 1), q(0, 1), q(2, 1)], bx.clone(), vec![q(0, 1), q(-1, 1)]),
            Err(Error::InvalidMinPoly(_))
        ));
        // rational root
        assert!(matches!(
            FieldSpec::new(vec![q(-1, 1), q(0, 1), q(1, 1)], bx.clone(), vec![q(0, 1), q(-1, 1)]),
            Err(Error::InvalidMinPoly(_))
        ));
        // not squarefree
        assert!(matches!(
            FieldSpec::new(vec![q(1, 1), q(0, 1), q(2, 1), q(0, 1), q(1, 1)], bx.clone(), vec![q(0, 1), q(-1, 1)]),
            Err(Error::InvalidMinPoly(_))
        ));
        // box holding both roots of x² + 1
        let wide = ComplexBox::from_corners(q(-1, 1), q(-2, 1), q(1, 1), q(2, 1)).unwrap();
        assert!(matches!(
            FieldSpec::new(vec![q(1, 1), q(0, 1), q(1, 1)], wide, vec![q(0, 1), q(-1, 1)]),
            Err(Error::InvalidRootBox(_))
        ));
        // identity is not conjugation on ℚ(i)
        assert!(matches!(
            FieldSpec::new(vec![q(1, 1), q(0, 1), q(1, 1)], bx.clone(), vec![q(0, 1), q(1, 1)]),
            Err(Error::InvalidConjugation(_))
        ));
        // ℚ(√2 + i) with conj_image sending θ to −√2 + i: a field automorphism,
        // but not complex conjugation
        let bx4 = ComplexBox::from_corners(q(1, 1), q(1, 2), q(2, 1), q(3, 2)).unwrap();
        assert!(matches!(
            FieldSpec::new(
                vec![q(9, 1), q(0, 1), q(-2, 1), q(0, 1), q(1, 1)],
                bx4,
                vec![q(0, 1), q(-2, 3), q(0, 1), q(1, 3)],
            ),
            Err(Error::InvalidConjugation(_))
        ));
    }

    #[test]
    fn rejects_field_without_i() {
        // ℚ(√−2): conjugation closed, but i ∉ ℚ(√−2)
        let bx = ComplexBox::from_corners(q(-1, 2), q(1, 1), q(1, 2), q(2, 1)).unwrap();
        assert!(matches!(
            FieldSpec::new(vec![q(2, 1), q(0, 1), q(1, 1)], bx, vec![q(0, 1), q(-1, 1)]),
            Err(Error::NoImaginaryUnit(_))
        ));
    }

    #[test]
    fn rational_kernel_examples() {
        let k = gaussian();
        let col = Mat::from_cols(vec![vec![k.from_int(1), k.theta()]], 2);
        assert_eq!(rational_kernel(&k, &col, Side::Left).rows(), 0);
        let id = Mat::from_fn(2, 2, |i, j| k.from_int((i == j) as i64));
        assert_eq!(rational_kernel(&k, &id, Side::Left).rows(), 0);
        // 1 + θ² = 0 in ℚ(i): left kernel of (1, θ, θ²)ᵀ is (1, 0, 1)
        let t = k.theta();
        let col = Mat::from_cols(vec![vec![k.from_int(1), t.clone(), k.mul(&t, &t)]], 3);
        let ker = rational_kernel(&k, &col, Side::Left);
        assert_eq!(ker.row_vecs(), vec![vec![q(1, 1), q(0, 1), q(1, 1)]]);
    }

    #[test]
    fn rational_approx_recovers_small_fractions() {
        assert_eq!(rational_approx(1.0 / 6.0, 1000, 1e-9), Some(q(1, 6)));
        assert_eq!(rational_approx(-2.0 / 3.0, 1000, 1e-9), Some(q(-2, 3)));
        assert_eq!(rational_approx(0.0, 1000, 1e-9), Some(q(0, 1)));
    }
}
