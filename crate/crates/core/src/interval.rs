//! Rational interval arithmetic and exact complex root counting in rectangles.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::poly::{sign_variations, Poly};
use crate::Q;

/// Closed rational interval `[lo, hi]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Q) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Q::zero())
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let p = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let lo = p.iter().min().cloned().unwrap_or_default();
        let hi = p.iter().max().cloned().unwrap_or_default();
        Interval { lo, hi }
    }

    pub fn scale(&self, s: &Q) -> Interval {
        let (a, b) = (&self.lo * s, &self.hi * s);
        if s.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    pub fn midpoint(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(2.into())
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Axis-aligned rectangle in ℂ with rational corners.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ComplexBox {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexBox {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexBox { re, im }
    }

    pub fn from_corners(re_lo: Q, im_lo: Q, re_hi: Q, im_hi: Q) -> Option<Self> {
        if re_lo > re_hi || im_lo > im_hi {
            return None;
        }
        Some(ComplexBox { re: Interval::new(re_lo, re_hi), im: Interval::new(im_lo, im_hi) })
    }

    pub fn point(re: Q, im: Q) -> Self {
        ComplexBox { re: Interval::point(re), im: Interval::point(im) }
    }

    pub fn zero() -> Self {
        ComplexBox::point(Q::zero(), Q::zero())
    }

    pub fn conj(&self) -> ComplexBox {
        ComplexBox { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn max_side(&self) -> Q {
        self.re.width().max(self.im.width())
    }

    pub fn is_subset_of(&self, other: &ComplexBox) -> bool {
        self.re.is_subset_of(&other.re) && self.im.is_subset_of(&other.im)
    }

    pub fn intersects(&self, other: &ComplexBox) -> bool {
        self.re.intersects(&other.re) && self.im.intersects(&other.im)
    }

    pub fn contains(&self, re: &Q, im: &Q) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    pub fn add(&self, other: &ComplexBox) -> ComplexBox {
        ComplexBox { re: self.re.add(&other.re), im: self.im.add(&other.im) }
    }

    pub fn mul(&self, other: &ComplexBox) -> ComplexBox {
        ComplexBox {
            re: self.re.mul(&other.re).sub(&self.im.mul(&other.im)),
            im: self.re.mul(&other.im).add(&self.im.mul(&other.re)),
        }
    }

    pub fn scale(&self, s: &Q) -> ComplexBox {
        ComplexBox { re: self.re.scale(s), im: self.im.scale(s) }
    }

    /// Encloses `Σ coeffs[k]·z^k` for every `z` in `self`.
    pub fn eval_poly(&self, coeffs: &[Q]) -> ComplexBox {
        let mut acc = ComplexBox::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(self).add(&ComplexBox::point(c.clone(), Q::zero()));
        }
        acc
    }

    /// Corners in counter-clockwise order starting bottom-left.
    fn corners(&self) -> [(Q, Q); 4] {
        [
            (self.re.lo.clone(), self.im.lo.clone()),
            (self.re.hi.clone(), self.im.lo.clone()),
            (self.re.hi.clone(), self.im.hi.clone()),
            (self.re.lo.clone(), self.im.hi.clone()),
        ]
    }
}

impl fmt::Debug for ComplexBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + i{:?}", self.re, self.im)
    }
}

/// A root of the polynomial lies on the boundary of the queried rectangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryRoot;

/// `p(start + t·dir)` split into real and imaginary parts, as polynomials in `t`.
fn restrict_to_segment(p: &Poly, start: (&Q, &Q), dir: (&Q, &Q)) -> (Poly, Poly) {
    let zr = Poly::linear(start.0.clone(), dir.0.clone());
    let zi = Poly::linear(start.1.clone(), dir.1.clone());
    let (mut re, mut im) = (Poly::zero(), Poly::zero());
    for c in p.coeffs().iter().rev() {
        let nr = re.mul(&zr).sub(&im.mul(&zi)).add(&Poly::constant(c.clone()));
        let ni = re.mul(&zi).add(&im.mul(&zr));
        re = nr;
        im = ni;
    }
    (re, im)
}

/// Exact number of roots (with multiplicity) of the real-coefficient
/// polynomial `p` inside the closed rectangle, computed from the winding
/// number of `p` along the boundary via Sturm sequences.
///
/// Degenerate rectangles (a segment or a point) are not supported and
/// reported as [`BoundaryRoot`] when they touch a root, `Ok(0)` otherwise
/// only if `p` is nonzero there.
pub fn count_roots_in_box(p: &Poly, b: &ComplexBox) -> Result<usize, BoundaryRoot> {
    let corners = b.corners();
    let values: Vec<(Q, Q)> = corners
        .iter()
        .map(|(x, y)| {
            let ev = ComplexBox::point(x.clone(), y.clone()).eval_poly(p.coeffs());
            (ev.re.lo, ev.im.lo)
        })
        .collect();
    if values.iter().any(|(r, i)| r.is_zero() && i.is_zero()) {
        return Err(BoundaryRoot);
    }
    if b.re.width().is_zero() || b.im.width().is_zero() {
        // segment: only boundary matters
        let (s, e) = (&corners[0], &corners[2]);
        let dir = (&e.0 - &s.0, &e.1 - &s.1);
        let (re, im) = restrict_to_segment(p, (&s.0, &s.1), (&dir.0, &dir.1));
        let g = re.gcd(&im);
        if g.degree().unwrap_or(0) > 0 && g.count_real_roots(&Q::zero(), &Q::one()) > 0 {
            return Err(BoundaryRoot);
        }
        return Ok(0);
    }
    // Rotate by c = 1 + k·i so that no corner value is real.
    let mut rot = None;
    for k in 0..=4i64 {
        let k = Q::from_integer(k.into());
        if values.iter().all(|(r, i)| !(i + &k * r).is_zero()) {
            rot = Some(k);
            break;
        }
    }
    let k = rot.expect("at most four rotations are excluded");
    let mut total: i64 = 0;
    for e in 0..4 {
        let s = &corners[e];
        let t = &corners[(e + 1) % 4];
        let dir = (&t.0 - &s.0, &t.1 - &s.1);
        let (re, im) = restrict_to_segment(p, (&s.0, &s.1), (&dir.0, &dir.1));
        let g = re.gcd(&im);
        if g.degree().unwrap_or(0) > 0 && g.count_real_roots(&Q::zero(), &Q::one()) > 0 {
            return Err(BoundaryRoot);
        }
        // (1 + k i)(re + i im) = (re - k im) + i (im + k re)
        let rr = re.sub(&im.scale(&k));
        let ri = im.add(&re.scale(&k));
        let chain = ri.sturm_chain(&rr);
        let v0 = sign_variations(&chain, &Q::zero()) as i64;
        let v1 = sign_variations(&chain, &Q::one()) as i64;
        total += v0 - v1;
    }
    debug_assert!(total >= 0 && total % 2 == 0, "winding index must be even");
    Ok((total / 2) as usize)
}
