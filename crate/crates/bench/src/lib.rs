//! Fixtures shared by the benchmarks.

use subtori_core::field::fields::{gaussian, sqrt2_i};
use subtori_core::{product_torus, AlgebraicNumber, ComplexSubgroupSpec, ComplexTorus, EllipticCurveSpec, FieldSpec, Q};

fn curve(k: &FieldSpec, tau: AlgebraicNumber) -> EllipticCurveSpec {
    EllipticCurveSpec::new(k.clone(), k.from_int(1), tau).expect("non-real period ratio")
}

pub fn sqrt2(k: &FieldSpec) -> AlgebraicNumber {
    let c = [(0, 1), (5, 6), (0, 1), (-1, 6)];
    k.element(c.iter().map(|&(n, d): &(i64, i64)| Q::new(n.into(), d.into())).collect()).expect("degree four")
}

/// `E_i × E_i`.
pub fn moser() -> ComplexTorus {
    let k = gaussian();
    product_torus(&[curve(&k, k.i()), curve(&k, k.i())]).expect("valid lattice")
}

/// `E_i × E_√−2` over `ℚ(√2 + i)`.
pub fn mixed() -> ComplexTorus {
    let k = sqrt2_i();
    let s2i = k.mul(&sqrt2(&k), &k.i());
    product_torus(&[curve(&k, k.i()), curve(&k, s2i)]).expect("valid lattice")
}

pub fn gauss_cube() -> ComplexTorus {
    let k = gaussian();
    let e = curve(&k, k.i());
    product_torus(&[e.clone(), e.clone(), e]).expect("valid lattice")
}

pub fn diagonal(t: &ComplexTorus) -> ComplexSubgroupSpec {
    let k = t.field();
    ComplexSubgroupSpec::new(k.clone(), t.n(), vec![vec![k.from_int(1); t.n()]]).expect("nonzero vector")
}
