//! Linear algebra over the localization `R = Z[ζ_M]_P`.
//!
//! `R` is a discrete valuation ring, so every matrix over its fraction field
//! has a Smith form `E · A · U = diag(d_1, …, d_r, 0, …)` with `E`, `U`
//! invertible over `R`. Pivots are chosen by minimal `v_P`; after a pivot of
//! valuation `v` every remaining entry has valuation at least `v`, which lets
//! the pivot search stop early.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::cyclotomic::{field, CycNum, IdealTester, PrimeContext, Valuation};
use crate::error::{Error, Result};

/// A vector over `K` written as `α / den` with integral power-basis coordinates `α`.
#[derive(Clone, Debug)]
pub struct IntRow {
    pub coeffs: Vec<Vec<i64>>,
    pub den: BigInt,
}

impl IntRow {
    /// Exponent of 2 in the denominator.
    pub fn shift(&self) -> u64 {
        self.den.trailing_zeros().unwrap_or(0)
    }
}

/// Clears denominators of a vector of field elements (all at one conductor).
/// `None` if a scaled coordinate does not fit in 64 bits.
pub fn integral_row(row: &[CycNum]) -> Option<IntRow> {
    let den = row.iter().fold(BigInt::one(), |d, x| d.lcm(x.denominator()));
    let coeffs = row
        .iter()
        .map(|x| {
            let scale = &den / x.denominator();
            x.numerator().iter().map(|c| (c * &scale).to_i64()).collect()
        })
        .collect::<Option<_>>()?;
    Some(IntRow { coeffs, den })
}

/// Smith form of a `rows × cols` matrix over `R`, with both transforms.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// `E`, `rows × rows`, invertible over `R`.
    pub left: Vec<Vec<CycNum>>,
    /// `U`, `cols × cols`, invertible over `R`.
    pub right: Vec<Vec<CycNum>>,
    /// Nonzero diagonal entries `d_1, …, d_r`.
    pub diag: Vec<CycNum>,
    pub diag_valuations: Vec<i64>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

fn identity(n: usize, conductor: u32) -> Vec<Vec<CycNum>> {
    (0..n)
        .map(|i| (0..n).map(|j| CycNum::from_int(conductor, (i == j) as i64)).collect())
        .collect()
}

/// Smith form over `R`. Entries are lifted to the context conductor.
pub fn smith(ctx: &PrimeContext, a: &[Vec<CycNum>]) -> Result<SmithForm> {
    let m = ctx.conductor();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut mat: Vec<Vec<CycNum>> = a
        .iter()
        .map(|r| r.iter().map(|x| x.lift(m)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    if mat.iter().any(|r| r.len() != cols) {
        return Err(Error::Malformed("ragged matrix".into()));
    }
    let mut left = identity(rows, m);
    let mut right = identity(cols, m);
    let mut diag = Vec::new();
    let mut diag_valuations = Vec::new();
    let mut floor = i64::MIN;
    for s in 0..rows.min(cols) {
        // pivot of minimal valuation in the trailing block
        let mut best: Option<(i64, usize, usize)> = None;
        'scan: for i in s..rows {
            for j in s..cols {
                if let Valuation::Finite(v) = ctx.valuation(&mat[i][j]) {
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                        if v <= floor {
                            break 'scan;
                        }
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        floor = v;
        mat.swap(s, pi);
        left.swap(s, pi);
        if pj != s {
            for r in mat.iter_mut() {
                r.swap(s, pj);
            }
            for r in right.iter_mut() {
                r.swap(s, pj);
            }
        }
        let pivot = mat[s][s].clone();
        let pinv = pivot.inverse()?;
        // column operations clear row s
        for j in s + 1..cols {
            if mat[s][j].is_zero() {
                continue;
            }
            let q = &mat[s][j] * &pinv;
            for i in s + 1..rows {
                if !mat[i][s].is_zero() {
                    let t = &q * &mat[i][s];
                    mat[i][j] -= &t;
                }
            }
            for r in right.iter_mut() {
                if !r[s].is_zero() {
                    let t = &q * &r[s];
                    r[j] -= &t;
                }
            }
            mat[s][j] = CycNum::zero(m);
        }
        // row operations clear column s
        for i in s + 1..rows {
            if mat[i][s].is_zero() {
                continue;
            }
            let q = &mat[i][s] * &pinv;
            let (head, tail) = left.split_at_mut(i);
            for (x, y) in tail[0].iter_mut().zip(&head[s]) {
                if !y.is_zero() {
                    *x -= &(&q * y);
                }
            }
            mat[i][s] = CycNum::zero(m);
        }
        diag.push(pivot);
        diag_valuations.push(v);
    }
    Ok(SmithForm {
        left,
        right,
        diag,
        diag_valuations,
    })
}

/// Generators of `{x ∈ K^k : A·x ∈ R^c}` for `A` of full column rank `k`:
/// the columns of `U` divided by the diagonal entries.
pub fn preimage_basis(ctx: &PrimeContext, a: &[Vec<CycNum>]) -> Result<Vec<Vec<CycNum>>> {
    let k = a.first().map_or(0, Vec::len);
    let sf = smith(ctx, a)?;
    if sf.rank() != k {
        return Err(Error::Malformed(format!(
            "condition matrix has rank {} < {k}; the preimage is not a lattice",
            sf.rank()
        )));
    }
    (0..k)
        .map(|s| {
            let dinv = sf.diag[s].inverse()?;
            Ok(sf.right.iter().map(|row| &row[s] * &dinv).collect())
        })
        .collect()
}

/// The `R`-span of a finite set of vectors in `K^k`, with a membership test.
#[derive(Clone, Debug)]
pub struct RSpan {
    ctx: PrimeContext,
    dim: usize,
    smith: SmithForm,
}

/// Builds the `R`-span of `vectors` (each of length `dim`).
pub fn r_span(ctx: &PrimeContext, dim: usize, vectors: &[Vec<CycNum>]) -> Result<RSpan> {
    // columns are the spanning vectors
    let a: Vec<Vec<CycNum>> = (0..dim)
        .map(|i| vectors.iter().map(|v| v[i].clone()).collect())
        .collect();
    let smith = if vectors.is_empty() {
        SmithForm {
            left: identity(dim, ctx.conductor()),
            right: Vec::new(),
            diag: Vec::new(),
            diag_valuations: Vec::new(),
        }
    } else {
        smith(ctx, &a)?
    };
    Ok(RSpan {
        ctx: ctx.clone(),
        dim,
        smith,
    })
}

impl RSpan {
    pub fn rank(&self) -> usize {
        self.smith.rank()
    }

    /// `w ∈ span` iff `(E·w)_i ∈ d_i R` for `i < r` and `(E·w)_i = 0` beyond.
    pub fn contains(&self, w: &[CycNum]) -> bool {
        assert_eq!(w.len(), self.dim);
        let m = self.ctx.conductor();
        for (i, row) in self.smith.left.iter().enumerate() {
            let mut y = CycNum::zero(m);
            for (e, x) in row.iter().zip(w) {
                if !e.is_zero() && !x.is_zero() {
                    y += &(e * x);
                }
            }
            match self.smith.diag_valuations.get(i) {
                Some(&dv) => {
                    if !self.ctx.valuation(&y).is_at_least(dv) {
                        return false;
                    }
                }
                None => {
                    if !y.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Integer-arithmetic version of [`RSpan::contains`] for integral vectors.
#[derive(Clone, Debug)]
pub struct SpanTester {
    conductor: u32,
    rows: Vec<(Vec<Vec<i64>>, Option<IdealTester>)>,
}

impl RSpan {
    /// Precomputes an integer tester; `None` if the transform does not fit in 64 bits.
    pub fn int_tester(&self) -> Option<SpanTester> {
        let e = self.ctx.e() as i64;
        let mut rows = Vec::with_capacity(self.smith.left.len());
        for (i, row) in self.smith.left.iter().enumerate() {
            let ir = integral_row(row)?;
            let tester = match self.smith.diag_valuations.get(i) {
                Some(&dv) => {
                    let t = dv + e * ir.shift() as i64;
                    if t <= 0 {
                        continue;
                    }
                    Some(self.ctx.ideal_tester(t as usize))
                }
                None => None,
            };
            rows.push((ir.coeffs, tester));
        }
        Some(SpanTester {
            conductor: self.ctx.conductor(),
            rows,
        })
    }
}

impl SpanTester {
    /// Membership of an integral vector given by power-basis coordinates.
    pub fn contains(&self, w: &[Vec<i64>]) -> bool {
        let fld = field(self.conductor);
        let mut y = vec![0i64; fld.degree()];
        for (coeffs, tester) in &self.rows {
            y.fill(0);
            for (a, b) in coeffs.iter().zip(w) {
                if a.iter().any(|&c| c != 0) && b.iter().any(|&c| c != 0) {
                    fld.mul_add_int(&mut y, a, b);
                }
            }
            let ok = match tester {
                Some(t) => t.contains(&y),
                None => y.iter().all(|&c| c == 0),
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::prime_context;

    fn n(m: u32, v: i64) -> CycNum {
        CycNum::from_int(m, v)
    }

    #[test]
    fn smith_of_integer_matrix() {
        let ctx = prime_context(4, 0).unwrap();
        // diag(2, 6) ~ over R: valuations 2, 2 (6 = 2 · unit)
        let sf = smith(&ctx, &[vec![n(4, 2), n(4, 0)], vec![n(4, 0), n(4, 6)]]).unwrap();
        assert_eq!(sf.diag_valuations, vec![2, 2]);
        let sf = smith(&ctx, &[vec![n(4, 1), n(4, 1)], vec![n(4, 1), n(4, -1)]]).unwrap();
        // det = -2, v_P(2) = 2
        assert_eq!(sf.diag_valuations, vec![0, 2]);
    }

    #[test]
    fn preimage_for_c2_values() {
        // rows: classes of C2; columns: θ0, θ1
        let ctx = prime_context(2, 0).unwrap();
        let a = vec![vec![n(2, 1), n(2, 1)], vec![n(2, 1), n(2, -1)]];
        let gens = preimage_basis(&ctx, &a).unwrap();
        let half = CycNum::from_rational(2, &num_rational::BigRational::new(1.into(), 2.into()));
        // (1/2, -1/2) is a member: check A·x integral by direct evaluation
        let x = vec![half.clone(), -half.clone()];
        let vals: Vec<CycNum> = a.iter().map(|r| &(&r[0] * &x[0]) + &(&r[1] * &x[1])).collect();
        assert!(vals.iter().all(|v| ctx.is_integral(v)));
        // and lies in the R-span of the generators
        let span = r_span(&ctx, 2, &gens).unwrap();
        assert!(span.contains(&x));
        assert!(!span.contains(&[half, n(2, 0)]));
    }

    #[test]
    fn span_membership() {
        let ctx = prime_context(4, 0).unwrap();
        let z = CycNum::root_of_unity(4, 1);
        let one = n(4, 1);
        let v = vec![vec![&z - &one, n(4, 0)]];
        let span = r_span(&ctx, 2, &v).unwrap();
        assert!(span.contains(&[n(4, 2), n(4, 0)]));
        assert!(span.contains(&[n(4, 3) * (&z - &one), n(4, 0)]));
        assert!(!span.contains(&[one.clone(), n(4, 0)]));
        assert!(!span.contains(&[n(4, 0), n(4, 2)]));
    }
}
