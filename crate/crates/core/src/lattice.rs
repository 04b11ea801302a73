//! Integer lattices: column Hermite normal form, integer kernels,
//! saturation and indices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{determinant, left_kernel, rank, rref, solve, Mat, QMat, Rationals};
use crate::poly::integer_coeffs;
use crate::Q;

pub type IMat = Mat<BigInt>;

/// Column Hermite normal form `matrix = original · transform`.
///
/// The first `rank` columns of `matrix` are nonzero and echelon: column `j`
/// has its leading (topmost) nonzero entry in row `pivots[j]`, strictly
/// increasing in `j`, and positive. Entries of earlier columns in a pivot
/// row are reduced into `[0, pivot)`. The remaining columns are zero and the
/// matching columns of `transform` span the integer kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrixHNF {
    pub matrix: IMat,
    pub transform: IMat,
    pub pivots: Vec<usize>,
}

impl IntegerMatrixHNF {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// The nonzero columns.
    pub fn basis(&self) -> IMat {
        let idx: Vec<usize> = (0..self.rank()).collect();
        self.matrix.select_cols(&idx)
    }

    /// Columns of `transform` spanning `{x ∈ ℤᶜ : original·x = 0}`.
    pub fn kernel(&self) -> IMat {
        let idx: Vec<usize> = (self.rank()..self.transform.cols()).collect();
        self.transform.select_cols(&idx)
    }
}

fn col_axpy(m: &mut IMat, dst: usize, src: usize, q: &BigInt) {
    for i in 0..m.rows() {
        let v = m.get(i, dst) - q * m.get(i, src);
        m.set(i, dst, v);
    }
}

fn col_swap(m: &mut IMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let x = m.get(i, a).clone();
        let y = m.get(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

fn col_neg(m: &mut IMat, a: usize) {
    for i in 0..m.rows() {
        let v = -m.get(i, a);
        m.set(i, a, v);
    }
}

/// Column HNF with a unimodular transform.
pub fn hnf(original: &IMat) -> IntegerMatrixHNF {
    let (rows, cols) = (original.rows(), original.cols());
    let mut h = original.clone();
    let mut u = Mat::from_fn(cols, cols, |i, j| if i == j { BigInt::one() } else { BigInt::zero() });
    let mut pivots = Vec::new();
    let mut j = 0;
    for i in 0..rows {
        if j == cols {
            break;
        }
        loop {
            // smallest nonzero |h[i][k]| for k ≥ j moves to column j
            let best = (j..cols)
                .filter(|&k| !h.get(i, k).is_zero())
                .min_by(|&a, &b| h.get(i, a).abs().cmp(&h.get(i, b).abs()));
            let Some(best) = best else { break };
            col_swap(&mut h, j, best);
            col_swap(&mut u, j, best);
            let mut done = true;
            for k in j + 1..cols {
                if h.get(i, k).is_zero() {
                    continue;
                }
                let q = h.get(i, k).div_floor(h.get(i, j));
                col_axpy(&mut h, k, j, &q);
                col_axpy(&mut u, k, j, &q);
                if !h.get(i, k).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(i, j).is_zero() {
            continue;
        }
        if h.get(i, j).is_negative() {
            col_neg(&mut h, j);
            col_neg(&mut u, j);
        }
        for k in 0..j {
            let q = h.get(i, k).div_floor(h.get(i, j));
            if !q.is_zero() {
                col_axpy(&mut h, k, j, &q);
                col_axpy(&mut u, k, j, &q);
            }
        }
        pivots.push(i);
        j += 1;
    }
    IntegerMatrixHNF { matrix: h, transform: u, pivots }
}

pub fn to_qmat(m: &IMat) -> QMat {
    m.map(|x| Q::from_integer(x.clone()))
}

/// Scales each rational row to a primitive integer row, keeping its sign.
pub fn primitive_rows(m: &QMat) -> IMat {
    let rows: Vec<Vec<BigInt>> = (0..m.rows()).map(|i| integer_coeffs(m.row(i))).collect();
    Mat::from_rows(rows, m.cols())
}

/// Columns spanning `{x ∈ ℤᵐ : A x = 0}`, in HNF.
pub fn integer_kernel(a: &IMat) -> IMat {
    hnf(&hnf(a).kernel()).basis()
}

/// Primitive HNF basis of `span_ℚ(B) ∩ ℤᵐ` for a rational `m × c` matrix `B`.
///
/// `transform` relates `matrix` to the integer-kernel basis computed from
/// the rational annihilator of `B`, not to `B` itself: saturation is in
/// general not an integral column operation on `B`.
pub fn hnf_saturate(b: &QMat) -> IntegerMatrixHNF {
    let forms = left_kernel(&Rationals, b).expect("rational elimination is total");
    let forms = primitive_rows(&forms);
    let kernel = if forms.rows() == 0 {
        Mat::from_fn(b.rows(), b.rows(), |i, j| if i == j { BigInt::one() } else { BigInt::zero() })
    } else {
        hnf(&forms).kernel()
    };
    hnf(&kernel)
}

/// Saturated HNF basis of the span of the columns of `b`.
pub fn saturate(b: &QMat) -> IMat {
    hnf_saturate(b).basis()
}

/// Index `[L1 : L2]` where the columns of `l2` span a full-rank sublattice
/// of the lattice spanned by the columns of `l1`.
pub fn lattice_index(l1: &IMat, l2: &IMat) -> Result<BigInt> {
    if l1.rows() != l2.rows() {
        return Err(Error::Dimension(format!("ambient dimensions {} and {} differ", l1.rows(), l2.rows())));
    }
    if l1.cols() != l2.cols() {
        return Err(Error::Dimension(format!("ranks {} and {} differ", l1.cols(), l2.cols())));
    }
    let q1 = to_qmat(l1);
    if rank(&Rationals, &q1)? != l1.cols() {
        return Err(Error::Dimension("columns of the first lattice basis are dependent".into()));
    }
    let mut coords = Vec::with_capacity(l2.cols());
    for j in 0..l2.cols() {
        let col = Mat::from_cols(vec![l2.col(j).into_iter().map(Q::from_integer).collect()], l2.rows());
        let Some(x) = solve(&Rationals, &q1, &col)? else {
            return Err(Error::NotSublattice { column: j, reason: "does not lie in the span".into() });
        };
        if x.entries().iter().any(|v| !v.is_integer()) {
            return Err(Error::NotSublattice { column: j, reason: "has non-integral coordinates".into() });
        }
        coords.push(x.col(0));
    }
    let x = Mat::from_cols(coords, l1.cols());
    let det = determinant(&Rationals, &x)?;
    if det.is_zero() {
        let (_, piv) = rref(&Rationals, &x)?;
        let column = (0..x.cols()).find(|c| !piv.contains(c)).unwrap_or(0);
        return Err(Error::NotSublattice { column, reason: "is dependent on earlier columns".into() });
    }
    Ok(det.abs().to_integer())
}

pub fn imat(rows: &[&[i64]]) -> IMat {
    let cols = rows.first().map_or(0, |r| r.len());
    Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(), cols)
}

/// Content (gcd of entries) of an integer vector.
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}
