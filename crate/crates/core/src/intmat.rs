//! Integer row lattices: Hermite normal form, left kernels, membership.
//!
//! A lattice is stored as the nonzero rows of its row-style Hermite normal
//! form: echelon shape, strictly increasing pivot columns, positive pivots and
//! entries above each pivot reduced into `[0, pivot)`. The form is unique, so
//! two lattices are equal iff their HNF matrices are equal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn from_i64(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

/// Converts back to machine integers; `None` if an entry does not fit.
pub fn to_i64(rows: &IntMatrix) -> Option<Vec<Vec<i64>>> {
    rows.iter().map(|r| r.iter().map(|x| x.to_i64()).collect()).collect()
}

/// Row Hermite normal form of the lattice spanned by `rows` (zero rows dropped).
pub fn hnf(rows: &[Vec<BigInt>]) -> IntMatrix {
    let Some(ncols) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut m: IntMatrix = rows
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..ncols {
        if pivot_row == m.len() {
            break;
        }
        // Euclid on the column until a single nonzero entry remains at or below pivot_row.
        loop {
            let best = (pivot_row..m.len())
                .filter(|&r| !m[r][col].is_zero())
                .min_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()));
            let Some(best) = best else { break };
            m.swap(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..m.len() {
                if m[r][col].is_zero() {
                    continue;
                }
                let q = m[r][col].div_floor(&m[pivot_row][col]);
                let (head, tail) = m.split_at_mut(r);
                axpy(&mut tail[0], &head[pivot_row], &(-q));
                if !tail[0][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < m.len() && !m[pivot_row][col].is_zero() {
            if m[pivot_row][col].is_negative() {
                for x in m[pivot_row].iter_mut() {
                    *x = -&*x;
                }
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
    }
    m.truncate(pivot_row);
    // reduce entries above pivots
    for &(pr, pc) in &pivots {
        for r in 0..pr {
            let q = m[r][pc].div_floor(&m[pr][pc]);
            if !q.is_zero() {
                let (head, tail) = m.split_at_mut(pr);
                axpy(&mut head[r], &tail[0], &(-q));
            }
        }
    }
    m
}

fn axpy(y: &mut [BigInt], x: &[BigInt], a: &BigInt) {
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += a * xi;
        }
    }
}

/// Whether `v` lies in the lattice given by the HNF rows `basis`.
pub fn contains(basis: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let mut w = v.to_vec();
    for row in basis {
        let pc = row.iter().position(|x| !x.is_zero()).expect("zero row in HNF");
        if w[pc].is_zero() {
            continue;
        }
        let (q, r) = w[pc].div_rem(&row[pc]);
        if !r.is_zero() {
            return false;
        }
        axpy(&mut w, row, &(-q));
    }
    w.iter().all(Zero::is_zero)
}

/// ℤ-basis (in HNF) of `{a ∈ ℤ^n : a · M = 0}` where `M` has `n` rows.
pub fn left_kernel(m: &[Vec<BigInt>]) -> IntMatrix {
    let n = m.len();
    if n == 0 {
        return Vec::new();
    }
    let width = m[0].len();
    // [M | I] reduced with unimodular row operations; rows whose M-part vanishes
    // carry a kernel basis in their identity part.
    let aug: IntMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let reduced = hnf(&aug);
    let kernel: IntMatrix = reduced
        .into_iter()
        .filter(|r| r[..width].iter().all(Zero::is_zero))
        .map(|r| r[width..].to_vec())
        .collect();
    hnf(&kernel)
}

/// Product `v · M` of a row vector with a matrix.
pub fn row_times(v: &[BigInt], m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let width = m.first().map_or(0, Vec::len);
    let mut out = vec![BigInt::zero(); width];
    for (vi, row) in v.iter().zip(m) {
        if !vi.is_zero() {
            axpy(&mut out, row, vi);
        }
    }
    out
}

/// Membership for machine-integer vectors against an HNF basis stored as `i128`.
/// Returns `None` if an intermediate value overflows.
pub fn contains_i128(basis: &[(usize, Vec<i128>)], v: &[i64]) -> Option<bool> {
    let mut w: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    for (pc, row) in basis {
        let x = w[*pc];
        if x == 0 {
            continue;
        }
        let p = row[*pc];
        if x % p != 0 {
            return Some(false);
        }
        let q = x / p;
        for (wi, &ri) in w.iter_mut().zip(row) {
            if ri != 0 {
                *wi = wi.checked_sub(q.checked_mul(ri)?)?;
            }
        }
    }
    Some(w.iter().all(|&x| x == 0))
}
