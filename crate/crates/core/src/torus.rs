//! Complex tori `ℂⁿ/Γ`, complex subspaces, rational subspaces in lattice
//! coordinates, and elliptic curves.
//!
//! Lattice coordinates are taken with respect to the generators in the order
//! given. With `Π` the `n × 2n` matrix of generators and `P = [Π; Π̄]`, the
//! real coordinates of `v ∈ ℂⁿ` are `P⁻¹ [v; v̄]`, and multiplication by a
//! scalar `λ` acts as `P⁻¹ diag(λ, …, λ̄, …) P`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{rational_kernel, AlgebraicNumber, FieldSpec, Side};
use crate::lattice::{hnf_saturate, primitive_rows, saturate, to_qmat, IMat};
use crate::linalg::{determinant, identity, inverse, left_kernel, mat_mul, mat_vec, rank, Mat, QMat, Rationals};
use crate::Q;

/// A vector in `Kⁿ`.
pub type FieldVector = Vec<AlgebraicNumber>;

/// `T = ℂⁿ/Γ` with Γ spanned by `2n` vectors with entries in a number field.
#[derive(Clone, PartialEq)]
pub struct ComplexTorus {
    n: usize,
    field: FieldSpec,
    generators: Vec<FieldVector>,
    period: Mat<AlgebraicNumber>,
    period_inv: Mat<AlgebraicNumber>,
    j: Mat<AlgebraicNumber>,
}

impl std::fmt::Debug for ComplexTorus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComplexTorus").field("n", &self.n).field("generators", &self.generators).finish()
    }
}

impl ComplexTorus {
    /// Validates the lattice and derives the complex structure `J`.
    pub fn new(field: FieldSpec, generators: Vec<FieldVector>) -> Result<Self> {
        if generators.is_empty() || generators.len() % 2 != 0 {
            return Err(Error::Dimension(format!("expected 2n generators, got {}", generators.len())));
        }
        let n = generators.len() / 2;
        if let Some((k, g)) = generators.iter().enumerate().find(|(_, g)| g.len() != n) {
            return Err(Error::Dimension(format!("generator {k} has {} entries, expected {n}", g.len())));
        }
        let period = Mat::from_fn(2 * n, 2 * n, |i, j| {
            if i < n {
                generators[j][i].clone()
            } else {
                field.conj(&generators[j][i - n])
            }
        });
        let Some(period_inv) = inverse(&field, &period)? else {
            return Err(Error::DegenerateLattice("generators are linearly dependent over ℝ".into()));
        };
        let torus_j = scalar_action(&field, &period, &period_inv, n, &field.i());
        let t = ComplexTorus { n, field, generators, period, period_inv, j: torus_j };
        if let Some(e) = t.j.entries().iter().find(|x| !t.field.is_real(x)) {
            return Err(Error::Internal(format!("complex structure has non-real entry {e}")));
        }
        let j2 = mat_mul(&t.field, &t.j, &t.j);
        let minus_one = t.field.from_int(-1);
        let ok = (0..2 * n).all(|r| {
            (0..2 * n).all(|c| if r == c { *j2.get(r, c) == minus_one } else { j2.get(r, c).is_zero() })
        });
        if !ok {
            return Err(Error::Internal("J² ≠ −I".into()));
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn generators(&self) -> &[FieldVector] {
        &self.generators
    }

    /// Multiplication by `i` in lattice coordinates.
    pub fn j(&self) -> &Mat<AlgebraicNumber> {
        &self.j
    }

    /// `P = [Π; Π̄]`.
    pub fn period_matrix(&self) -> &Mat<AlgebraicNumber> {
        &self.period
    }

    pub fn period_inverse(&self) -> &Mat<AlgebraicNumber> {
        &self.period_inv
    }

    /// Coordinates `c` with `Σ cⱼ γⱼ = v`; entries are real.
    pub fn real_coordinates(&self, v: &[AlgebraicNumber]) -> Result<FieldVector> {
        self.check_len(v)?;
        let stacked: Vec<AlgebraicNumber> = v.iter().cloned().chain(v.iter().map(|x| self.field.conj(x))).collect();
        Ok(mat_vec(&self.field, &self.period_inv, &stacked))
    }

    /// `Σ xⱼ γⱼ` for rational lattice coordinates `x`.
    pub fn lattice_vector(&self, x: &[Q]) -> FieldVector {
        assert_eq!(x.len(), 2 * self.n, "lattice coordinate length");
        let mut out = vec![self.field.from_int(0); self.n];
        for (xj, g) in x.iter().zip(&self.generators) {
            if xj.is_zero() {
                continue;
            }
            for (o, gi) in out.iter_mut().zip(g) {
                *o = self.field.add(o, &self.field.scale(gi, xj));
            }
        }
        out
    }

    /// Multiplication by the scalar `λ` in lattice coordinates.
    pub fn scalar_matrix(&self, lambda: &AlgebraicNumber) -> Mat<AlgebraicNumber> {
        scalar_action(&self.field, &self.period, &self.period_inv, self.n, lambda)
    }

    /// The complex-linear part `a` of `φ(v) = rᵀ c(v) = 2 Re(a·v)`.
    pub fn complex_form(&self, r: &[Q]) -> FieldVector {
        (0..self.n)
            .map(|k| {
                let mut acc = self.field.from_int(0);
                for (j, rj) in r.iter().enumerate() {
                    if !rj.is_zero() {
                        acc = self.field.add(&acc, &self.field.scale(self.period_inv.get(j, k), rj));
                    }
                }
                acc
            })
            .collect()
    }

    /// The real span of `V` in lattice coordinates: `c(v)` and `c(iv)` for each basis vector.
    pub fn subgroup_real_span(&self, v: &ComplexSubgroupSpec) -> Result<Mat<AlgebraicNumber>> {
        self.check_subgroup(v)?;
        let mut cols = Vec::with_capacity(2 * v.dim());
        for b in &v.basis {
            let c = self.real_coordinates(b)?;
            let jc = mat_vec(&self.field, &self.j, &c);
            cols.push(c);
            cols.push(jc);
        }
        Ok(Mat::from_cols(cols, 2 * self.n))
    }

    pub(crate) fn check_subgroup(&self, v: &ComplexSubgroupSpec) -> Result<()> {
        if v.field != self.field {
            return Err(Error::FieldMismatch("subgroup and torus use different fields".into()));
        }
        if v.n != self.n {
            return Err(Error::Dimension(format!("subgroup lives in ℂ^{}, torus in ℂ^{}", v.n, self.n)));
        }
        Ok(())
    }

    pub(crate) fn check_subspace(&self, w: &RationalSubspace) -> Result<()> {
        if w.ambient_dim() != 2 * self.n {
            return Err(Error::Dimension(format!(
                "subspace has ambient dimension {}, torus lattice has rank {}",
                w.ambient_dim(),
                2 * self.n
            )));
        }
        Ok(())
    }

    fn check_len(&self, v: &[AlgebraicNumber]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::Dimension(format!("vector has {} entries, expected {}", v.len(), self.n)));
        }
        Ok(())
    }
}

fn scalar_action(
    field: &FieldSpec,
    period: &Mat<AlgebraicNumber>,
    period_inv: &Mat<AlgebraicNumber>,
    n: usize,
    lambda: &AlgebraicNumber,
) -> Mat<AlgebraicNumber> {
    let lambda_bar = field.conj(lambda);
    let scaled = Mat::from_fn(2 * n, 2 * n, |i, j| {
        let s = if i < n { lambda } else { &lambda_bar };
        field.mul(s, period.get(i, j))
    });
    mat_mul(field, period_inv, &scaled)
}

/// A complex subspace `V ⊆ ℂⁿ` spanned by field-entry vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSubgroupSpec {
    field: FieldSpec,
    n: usize,
    basis: Vec<FieldVector>,
}

impl ComplexSubgroupSpec {
    pub fn new(field: FieldSpec, n: usize, basis: Vec<FieldVector>) -> Result<Self> {
        if let Some((k, b)) = basis.iter().enumerate().find(|(_, b)| b.len() != n) {
            return Err(Error::Dimension(format!("basis vector {k} has {} entries, expected {n}", b.len())));
        }
        if !basis.is_empty() {
            let m = Mat::from_cols(basis.clone(), n);
            let r = rank(&field, &m)?;
            if r != basis.len() {
                return Err(Error::Dimension(format!("{} basis vectors span only dimension {r}", basis.len())));
            }
        }
        Ok(ComplexSubgroupSpec { field, n, basis })
    }

    pub fn zero(field: FieldSpec, n: usize) -> Self {
        ComplexSubgroupSpec { field, n, basis: Vec::new() }
    }

    pub fn basis(&self) -> &[FieldVector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
}

/// A rational subspace of `ℚ²ⁿ` stored as the primitive HNF basis of its
/// integer points. Two subspaces are equal iff their bases are.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalSubspace {
    basis: IMat,
}

impl std::fmt::Debug for RationalSubspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RationalSubspace({:?})", self.basis)
    }
}

impl RationalSubspace {
    /// The span of the columns of `b`.
    pub fn from_span(b: &QMat) -> Self {
        RationalSubspace { basis: saturate(b) }
    }

    pub fn from_integer_columns(b: &IMat) -> Self {
        Self::from_span(&to_qmat(b))
    }

    /// The common kernel of the rows of `forms`.
    pub fn from_forms(forms: &QMat, ambient: usize) -> Self {
        if forms.rows() == 0 {
            return Self::full(ambient);
        }
        let ker = crate::linalg::right_kernel(&Rationals, forms).expect("rational elimination is total");
        Self::from_span(&ker.transpose())
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_span(&identity(&Rationals, ambient))
    }

    pub fn zero(ambient: usize) -> Self {
        RationalSubspace { basis: Mat::from_cols(Vec::new(), ambient) }
    }

    pub fn basis(&self) -> &IMat {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    /// Rows spanning the rational forms vanishing on the subspace: reduced
    /// echelon rows scaled to primitive integers.
    pub fn annihilator(&self) -> IMat {
        if self.dim() == 0 {
            return Mat::from_fn(self.ambient_dim(), self.ambient_dim(), |i, j| BigInt::from((i == j) as u8));
        }
        let forms = left_kernel(&Rationals, &to_qmat(&self.basis)).expect("rational elimination is total");
        primitive_rows(&forms)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        let ann = self.annihilator();
        (0..ann.rows()).all(|i| ann.row(i).iter().zip(x).map(|(a, b)| Q::from_integer(a.clone()) * b).sum::<Q>().is_zero())
    }

    pub fn is_subspace_of(&self, other: &RationalSubspace) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && (0..self.dim()).all(|j| {
                let col: Vec<Q> = self.basis.col(j).into_iter().map(Q::from_integer).collect();
                other.contains(&col)
            })
    }

    pub fn columns_q(&self) -> QMat {
        to_qmat(&self.basis)
    }

    /// Rechecks the HNF-saturation invariant.
    pub fn is_canonical(&self) -> bool {
        hnf_saturate(&self.columns_q()).basis() == self.basis
    }
}

/// `E = ℂ/(ℤω₁ + ℤω₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticCurveSpec {
    field: FieldSpec,
    omega1: AlgebraicNumber,
    omega2: AlgebraicNumber,
}

impl EllipticCurveSpec {
    pub fn new(field: FieldSpec, omega1: AlgebraicNumber, omega2: AlgebraicNumber) -> Result<Self> {
        if omega1.is_zero() {
            return Err(Error::DegenerateLattice("omega1 is zero".into()));
        }
        let ratio = field.div(&omega2, &omega1)?;
        if field.is_real(&ratio) {
            return Err(Error::DegenerateLattice("omega2/omega1 is real".into()));
        }
        Ok(EllipticCurveSpec { field, omega1, omega2 })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn omega1(&self) -> &AlgebraicNumber {
        &self.omega1
    }

    pub fn omega2(&self) -> &AlgebraicNumber {
        &self.omega2
    }

    /// The curve as a one-dimensional torus.
    pub fn torus(&self) -> ComplexTorus {
        ComplexTorus::new(self.field.clone(), vec![vec![self.omega1.clone()], vec![self.omega2.clone()]])
            .expect("a non-real period ratio spans a lattice")
    }
}

/// Outcome of [`commensurable`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Commensurability {
    No { intersection_rank: usize },
    /// `index1 = [L1 + L2 : L1]`, `index2 = [L1 + L2 : L2]`.
    Yes { index1: BigInt, index2: BigInt },
}

/// Decides whether two full lattices in the same `ℂⁿ` are commensurable.
pub fn commensurable(l1: &ComplexTorus, l2: &ComplexTorus) -> Result<Commensurability> {
    if l1.field != l2.field {
        return Err(Error::FieldMismatch("lattices use different fields".into()));
    }
    if l1.n != l2.n {
        return Err(Error::Dimension(format!("lattices live in ℂ^{} and ℂ^{}", l1.n, l2.n)));
    }
    let field = &l1.field;
    let m = 2 * l1.n;
    // x ∈ ℚ^{2n}, y ∈ ℚ^{2n} with Π₁x = Π₂y, i.e. x = C y
    let coords: Vec<FieldVector> =
        l2.generators.iter().map(|g| l1.real_coordinates(g)).collect::<Result<_>>()?;
    let system = Mat::from_fn(m, 2 * m, |i, j| {
        if j < m {
            coords[j][i].clone()
        } else if j - m == i {
            field.from_int(-1)
        } else {
            field.from_int(0)
        }
    });
    let ker = rational_kernel(field, &system, Side::Right);
    if ker.rows() < m {
        return Ok(Commensurability::No { intersection_rank: ker.rows() });
    }
    let inter = saturate(&ker.transpose());
    let y = to_qmat(&inter).select_rows(0..m);
    let x = to_qmat(&inter).select_rows(m..2 * m);
    let index_in_l2 = determinant(&Rationals, &y)?.abs().to_integer();
    let index_in_l1 = determinant(&Rationals, &x)?.abs().to_integer();
    // [L1+L2 : L1] = [L2 : L1∩L2]
    Ok(Commensurability::Yes { index1: index_in_l2, index2: index_in_l1 })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::field::fields::{gaussian, sqrt2_i};
    use crate::linalg::mat_mul;

    pub(crate) fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    pub(crate) fn moser() -> ComplexTorus {
        moser_over(gaussian())
    }

    /// `(ℂ/ℤ[i])²` presented over any field containing `i`.
    pub(crate) fn moser_over(k: FieldSpec) -> ComplexTorus {
        let (o, z, i) = (k.from_int(1), k.from_int(0), k.i());
        ComplexTorus::new(k, vec![vec![o.clone(), z.clone()], vec![i.clone(), z.clone()], vec![z.clone(), o], vec![z, i]])
            .unwrap()
    }

    pub(crate) fn sqrt2(k: &FieldSpec) -> AlgebraicNumber {
        k.element(vec![q(0, 1), q(5, 6), q(0, 1), q(-1, 6)]).unwrap()
    }

    pub(crate) fn mixed() -> ComplexTorus {
        let k = sqrt2_i();
        let s2i = k.mul(&sqrt2(&k), &k.i());
        let (o, z, i) = (k.from_int(1), k.from_int(0), k.i());
        ComplexTorus::new(k, vec![vec![o.clone(), z.clone()], vec![i, z.clone()], vec![z.clone(), o], vec![z, s2i]])
            .unwrap()
    }

    fn qv(k: &FieldSpec, xs: &[(i64, i64)]) -> FieldVector {
        xs.iter().map(|&(a, b)| k.from_rational(q(a, b))).collect()
    }

    #[test]
    fn moser_structure() {
        let t = moser();
        let k = t.field().clone();
        let expect = Mat::from_rows(
            vec![
                qv(&k, &[(0, 1), (-1, 1), (0, 1), (0, 1)]),
                qv(&k, &[(1, 1), (0, 1), (0, 1), (0, 1)]),
                qv(&k, &[(0, 1), (0, 1), (0, 1), (-1, 1)]),
                qv(&k, &[(0, 1), (0, 1), (1, 1), (0, 1)]),
            ],
            4,
        );
        assert_eq!(t.j(), &expect);
        let c = t.real_coordinates(&[k.i(), k.from_int(0)]).unwrap();
        assert_eq!(c, qv(&k, &[(0, 1), (1, 1), (0, 1), (0, 1)]));
    }

    #[test]
    fn mixed_structure() {
        let t = mixed();
        let k = t.field().clone();
        let s2 = sqrt2(&k);
        for e in t.j().entries() {
            assert!(k.is_real(e));
        }
        // i·(0, √2 i) = −√2·(0, 1)
        assert_eq!(*t.j().get(2, 3), k.neg(&s2));
        assert_eq!(*t.j().get(3, 2), k.inv(&s2).unwrap());
        let c = t.real_coordinates(&[k.from_int(1), k.from_int(1)]).unwrap();
        assert_eq!(c, qv(&k, &[(1, 1), (0, 1), (1, 1), (0, 1)]));
        let c = t.real_coordinates(&[k.i(), k.i()]).unwrap();
        let half_s2 = k.scale(&s2, &q(1, 2));
        assert_eq!(c, vec![k.from_int(0), k.from_int(1), k.from_int(0), half_s2]);
    }

    #[test]
    fn degenerate_lattice() {
        let k = gaussian();
        let (o, z, i) = (k.from_int(1), k.from_int(0), k.i());
        let err = ComplexTorus::new(
            k.clone(),
            vec![vec![o.clone(), z.clone()], vec![k.from_int(2), z.clone()], vec![z.clone(), o], vec![z, i]],
        )
        .unwrap_err();
        assert_eq!(err.code(), "degenerate_lattice");
        assert_eq!(ComplexTorus::new(k.clone(), vec![vec![k.from_int(1)]]).unwrap_err().code(), "dimension_mismatch");
    }

    #[test]
    fn real_spans() {
        let t = mixed();
        let k = t.field().clone();
        let diag = ComplexSubgroupSpec::new(k.clone(), 2, vec![vec![k.from_int(1), k.from_int(1)]]).unwrap();
        let s = t.subgroup_real_span(&diag).unwrap();
        assert_eq!(s.col(0), qv(&k, &[(1, 1), (0, 1), (1, 1), (0, 1)]));
        assert_eq!(s.col(1), vec![k.from_int(0), k.from_int(1), k.from_int(0), k.inv(&sqrt2(&k)).unwrap()]);
        let ker = rational_kernel(&k, &s, Side::Left);
        assert_eq!(ker.row_vecs(), vec![vec![q(1, 1), q(0, 1), q(-1, 1), q(0, 1)]]);

        let m = moser();
        let k = m.field().clone();
        let first = ComplexSubgroupSpec::new(k.clone(), 2, vec![vec![k.from_int(1), k.from_int(0)]]).unwrap();
        let s = m.subgroup_real_span(&first).unwrap();
        assert_eq!(s.col(0), qv(&k, &[(1, 1), (0, 1), (0, 1), (0, 1)]));
        assert_eq!(s.col(1), qv(&k, &[(0, 1), (1, 1), (0, 1), (0, 1)]));
        let full = ComplexSubgroupSpec::new(
            k.clone(),
            2,
            vec![vec![k.from_int(1), k.from_int(0)], vec![k.from_int(0), k.from_int(1)]],
        )
        .unwrap();
        assert_eq!(rank(&k, &m.subgroup_real_span(&full).unwrap()).unwrap(), 4);
    }

    #[test]
    fn j_acts_as_i() {
        let t = mixed();
        let k = t.field().clone();
        let v = vec![k.element(vec![q(1, 2), q(3, 1), q(-1, 1), q(2, 7)]).unwrap(), k.theta()];
        let iv: Vec<_> = v.iter().map(|x| k.mul(x, &k.i())).collect();
        let jc = mat_vec(&k, t.j(), &t.real_coordinates(&v).unwrap());
        assert_eq!(jc, t.real_coordinates(&iv).unwrap());
        let mi = t.scalar_matrix(&k.i());
        assert_eq!(&mi, t.j());
        let two = t.scalar_matrix(&k.from_int(2));
        assert_eq!(two, mat_mul(&k, &identity(&k, 4), &two));
    }

    #[test]
    fn subgroup_rank_is_checked() {
        let k = gaussian();
        let v = vec![vec![k.from_int(1), k.i()], vec![k.i(), k.from_int(-1)]];
        assert_eq!(ComplexSubgroupSpec::new(k, 2, v).unwrap_err().code(), "dimension_mismatch");
    }

    #[test]
    fn commensurability_examples() {
        let k = gaussian();
        let zi = EllipticCurveSpec::new(k.clone(), k.from_int(1), k.i()).unwrap().torus();
        let half = EllipticCurveSpec::new(k.clone(), k.from_rational(q(1, 2)), k.scale(&k.i(), &q(1, 2))).unwrap().torus();
        assert_eq!(
            commensurable(&zi, &half).unwrap(),
            Commensurability::Yes { index1: 4.into(), index2: 1.into() }
        );
        assert_eq!(
            commensurable(&zi, &zi).unwrap(),
            Commensurability::Yes { index1: 1.into(), index2: 1.into() }
        );
        let k = sqrt2_i();
        let a = EllipticCurveSpec::new(k.clone(), k.from_int(1), k.i()).unwrap().torus();
        let s2i = k.mul(&sqrt2(&k), &k.i());
        let b = EllipticCurveSpec::new(k.clone(), k.from_int(1), s2i).unwrap().torus();
        assert_eq!(commensurable(&a, &b).unwrap(), Commensurability::No { intersection_rank: 1 });
        assert_eq!(commensurable(&a, &zi).unwrap_err().code(), "field_mismatch");
    }

    #[test]
    fn curve_rejects_real_ratio() {
        let k = gaussian();
        let err = EllipticCurveSpec::new(k.clone(), k.from_int(1), k.from_int(3)).unwrap_err();
        assert_eq!(err.code(), "degenerate_lattice");
    }

    #[test]
    fn rational_subspace_forms() {
        let w = RationalSubspace::from_forms(&Mat::from_rows(vec![vec![q(1, 1), q(0, 1), q(-1, 1), q(0, 1)]], 4), 4);
        assert_eq!(w.dim(), 3);
        assert!(w.is_canonical());
        assert_eq!(w.annihilator(), crate::lattice::imat(&[&[1, 0, -1, 0]]));
        assert!(w.contains(&[q(1, 1), q(5, 1), q(1, 1), q(-2, 1)]));
        assert!(RationalSubspace::zero(4).is_subspace_of(&w));
        assert!(w.is_subspace_of(&RationalSubspace::full(4)));
        assert!(!RationalSubspace::full(4).is_subspace_of(&w));
    }
}
