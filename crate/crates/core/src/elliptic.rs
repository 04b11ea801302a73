//! Elliptic curves `ℂ/(ℤω₁ + ℤω₂)`: period ratio, complex multiplication,
//! isogenies and denominators of multipliers.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::closure::{denominator_lcm, multiplier_matrix};
use crate::error::{Error, Result};
use crate::field::{rational_kernel, AlgebraicNumber, FieldSpec, Side};
use crate::lattice::content;
use crate::linalg::Mat;
use crate::poly::integer_coeffs;
use crate::torus::EllipticCurveSpec;
use crate::Q;

/// A period ratio in the upper half plane.
#[derive(Debug, Clone, PartialEq)]
pub struct TauInvariant {
    field: FieldSpec,
    tau: AlgebraicNumber,
}

impl TauInvariant {
    pub fn new(field: FieldSpec, tau: AlgebraicNumber) -> Result<Self> {
        if field.is_real(&tau) {
            return Err(Error::DegenerateLattice("tau is real".into()));
        }
        if field.im_sign(&tau) != Ordering::Greater {
            return Err(Error::DegenerateLattice("tau is in the lower half plane".into()));
        }
        Ok(TauInvariant { field, tau })
    }

    pub fn tau(&self) -> &AlgebraicNumber {
        &self.tau
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
}

/// `ω₂/ω₁`, or `ω₁/ω₂` when that is the one with positive imaginary part.
pub fn tau_invariant(e: &EllipticCurveSpec) -> Result<TauInvariant> {
    let field = e.field();
    let ratio = field.div(e.omega2(), e.omega1())?;
    if field.is_real(&ratio) {
        return Err(Error::DegenerateLattice("omega2/omega1 is real".into()));
    }
    let tau = if field.im_sign(&ratio) == Ordering::Greater { ratio } else { field.inv(&ratio)? };
    TauInvariant::new(field.clone(), tau)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmVerdict {
    pub has_cm: bool,
    /// `(a, b, c)` with `aτ² + bτ + c = 0`, primitive, `a > 0`.
    pub quadratic: Option<(BigInt, BigInt, BigInt)>,
    pub discriminant: Option<BigInt>,
}

pub fn cm_check(tau: &TauInvariant) -> CmVerdict {
    let field = &tau.field;
    let t = &tau.tau;
    let col = Mat::from_cols(vec![vec![field.from_int(1), t.clone(), field.mul(t, t)]], 3);
    let ker = rational_kernel(field, &col, Side::Left);
    if ker.rows() == 0 {
        return CmVerdict { has_cm: false, quadratic: None, discriminant: None };
    }
    debug_assert_eq!(ker.rows(), 1, "a non-real τ satisfies at most one quadratic");
    let mut v = integer_coeffs(ker.row(0));
    if v[2].is_negative() {
        v.iter_mut().for_each(|x| *x = -&*x);
    }
    let (c, b, a) = (v[0].clone(), v[1].clone(), v[2].clone());
    let disc = &b * &b - BigInt::from(4) * &a * &c;
    CmVerdict { has_cm: true, quadratic: Some((a, b, c)), discriminant: Some(disc) }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Isogeny {
    No,
    /// `(a, b, c, d)` with `cτ₁τ₂ + dτ₂ − aτ₁ − b = 0` and `ad − bc ≠ 0`.
    Yes { witness: [BigInt; 4] },
}

fn det_of(v: &[Q]) -> Q {
    &v[0] * &v[3] - &v[1] * &v[2]
}

/// Whether `ℂ/(ℤ + ℤτ₁)` and `ℂ/(ℤ + ℤτ₂)` are isogenous.
pub fn is_isogenous(tau1: &TauInvariant, tau2: &TauInvariant) -> Result<Isogeny> {
    if tau1.field != tau2.field {
        return Err(Error::FieldMismatch("the two period ratios lie in different fields".into()));
    }
    let f = &tau1.field;
    let (t1, t2) = (&tau1.tau, &tau2.tau);
    // unknowns (a, b, c, d)
    let col = Mat::from_cols(vec![vec![f.neg(t1), f.from_int(-1), f.mul(t1, t2), t2.clone()]], 4);
    let ker = rational_kernel(f, &col, Side::Left);
    let candidates: Vec<Vec<Q>> = match ker.rows() {
        0 => vec![],
        1 => vec![ker.row(0).to_vec()],
        _ => {
            let (e1, e2) = (ker.row(0), ker.row(1));
            let sum: Vec<Q> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
            vec![e1.to_vec(), e2.to_vec(), sum]
        }
    };
    for c in candidates {
        if !det_of(&c).is_zero() {
            let mut w = integer_coeffs(&c);
            if let Some(first) = w.iter().find(|x| !x.is_zero()) {
                if first.is_negative() {
                    w.iter_mut().for_each(|x| *x = -&*x);
                }
            }
            debug_assert!(content(&w) == BigInt::from(1));
            let [a, b, c, d]: [BigInt; 4] = w.try_into().expect("four unknowns");
            return Ok(Isogeny::Yes { witness: [a, b, c, d] });
        }
    }
    Ok(Isogeny::No)
}

/// Least `m ≥ 1` with `m·λ₀·Λ ⊆ Λ`.
pub fn endo_clear_denominator(e: &EllipticCurveSpec, lambda0: &AlgebraicNumber) -> Result<BigInt> {
    if lambda0.is_zero() {
        return Ok(BigInt::from(1));
    }
    let mm = multiplier_matrix(&e.torus(), lambda0)?;
    let m = mm.rational_matrix().ok_or(Error::NotRationalEndomorphism)?;
    Ok(denominator_lcm(&m))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::field::fields::{gaussian, sqrt2_i, sqrt3_i};
    use crate::torus::tests::{q, sqrt2};

    pub(crate) fn curve(f: &FieldSpec, w1: AlgebraicNumber, w2: AlgebraicNumber) -> EllipticCurveSpec {
        EllipticCurveSpec::new(f.clone(), w1, w2).unwrap()
    }

    fn tau(f: &FieldSpec, t: AlgebraicNumber) -> TauInvariant {
        TauInvariant::new(f.clone(), t).unwrap()
    }

    fn big(xs: [i64; 4]) -> [BigInt; 4] {
        xs.map(BigInt::from)
    }

    #[test]
    fn tau_normalization() {
        let k = gaussian();
        let t = tau_invariant(&curve(&k, k.from_int(1), k.i())).unwrap();
        assert_eq!(t.tau(), &k.i());
        let t = tau_invariant(&curve(&k, k.from_int(1), k.neg(&k.i()))).unwrap();
        assert_eq!(t.tau(), &k.i());
        let k = sqrt2_i();
        let s2i = k.element(vec![q(-1, 2), q(0, 1), q(1, 2), q(0, 1)]).unwrap();
        assert_eq!(s2i, k.mul(&sqrt2(&k), &k.i()));
        let t = tau_invariant(&curve(&k, k.from_int(1), s2i.clone())).unwrap();
        assert_eq!(t.tau(), &s2i);
        assert!(TauInvariant::new(k.clone(), k.neg(&s2i)).is_err());
    }

    #[test]
    fn cm_table() {
        let k = gaussian();
        let v = cm_check(&tau(&k, k.i()));
        assert_eq!(v.quadratic, Some((1.into(), 0.into(), 1.into())));
        assert_eq!(v.discriminant, Some((-4).into()));
        let k = sqrt2_i();
        let s2i = k.mul(&sqrt2(&k), &k.i());
        let v = cm_check(&tau(&k, s2i));
        assert_eq!(v.quadratic, Some((1.into(), 0.into(), 2.into())));
        assert_eq!(v.discriminant, Some((-8).into()));
        assert!(!cm_check(&tau(&k, k.theta())).has_cm);
        let k = sqrt3_i();
        // ω = (−1 + √3 i)/2
        let omega = k.element(vec![q(-1, 1), q(0, 1), q(1, 4), q(0, 1)]).unwrap();
        let v = cm_check(&tau(&k, omega));
        assert_eq!(v.quadratic, Some((1.into(), 1.into(), 1.into())));
        assert_eq!(v.discriminant, Some((-3).into()));
    }

    #[test]
    fn isogeny_table() {
        let k = gaussian();
        let i = tau(&k, k.i());
        let two_i = tau(&k, k.scale(&k.i(), &q(2, 1)));
        assert_eq!(is_isogenous(&i, &two_i).unwrap(), Isogeny::Yes { witness: big([2, 0, 0, 1]) });
        assert_eq!(is_isogenous(&i, &i).unwrap(), Isogeny::Yes { witness: big([1, 0, 0, 1]) });
        let k2 = sqrt2_i();
        let s2i = k2.mul(&sqrt2(&k2), &k2.i());
        assert_eq!(is_isogenous(&tau(&k2, k2.i()), &tau(&k2, s2i)).unwrap(), Isogeny::No);
        assert_eq!(is_isogenous(&i, &tau(&k2, k2.i())).unwrap_err().code(), "field_mismatch");
        // non-CM: τ and 2τ are isogenous, τ and 2√2 + i are not
        let t = k2.theta();
        let w = is_isogenous(&tau(&k2, t.clone()), &tau(&k2, k2.scale(&t, &q(2, 1)))).unwrap();
        assert_eq!(w, Isogeny::Yes { witness: big([2, 0, 0, 1]) });
        let other = k2.add(&k2.scale(&sqrt2(&k2), &q(2, 1)), &k2.i());
        assert_eq!(is_isogenous(&tau(&k2, t), &tau(&k2, other)).unwrap(), Isogeny::No);
    }

    #[test]
    fn denominators() {
        let k = gaussian();
        let e = curve(&k, k.from_int(1), k.i());
        assert_eq!(endo_clear_denominator(&e, &k.scale(&k.i(), &q(1, 2))).unwrap(), 2.into());
        assert_eq!(endo_clear_denominator(&e, &k.i()).unwrap(), 1.into());
        let k = sqrt2_i();
        let s2i = k.mul(&sqrt2(&k), &k.i());
        let e = curve(&k, k.from_int(1), s2i.clone());
        assert_eq!(endo_clear_denominator(&e, &k.scale(&s2i, &q(1, 3))).unwrap(), 3.into());
        assert_eq!(endo_clear_denominator(&e, &k.i()).unwrap_err(), Error::NotRationalEndomorphism);
    }
}
