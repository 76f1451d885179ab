//! Polynomials over the two-element field packed into a `u128` (bit `i` is the
//! coefficient of `x^i`), and Berlekamp factorization of squarefree inputs.

pub type Poly2 = u128;

pub fn degree(p: Poly2) -> Option<u32> {
    if p == 0 {
        None
    } else {
        Some(127 - p.leading_zeros())
    }
}

fn mul_mod(a: Poly2, b: Poly2, m: Poly2) -> Poly2 {
    let dm = degree(m).expect("zero modulus");
    let mut a = rem(a, m);
    let mut b = b;
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> dm & 1 == 1 {
            a ^= m;
        }
    }
    acc
}

pub fn divmod(a: Poly2, b: Poly2) -> (Poly2, Poly2) {
    let db = degree(b).expect("division by zero polynomial");
    let mut q = 0;
    let mut r = a;
    while let Some(dr) = degree(r) {
        if dr < db {
            break;
        }
        q |= 1 << (dr - db);
        r ^= b << (dr - db);
    }
    (q, r)
}

pub fn rem(a: Poly2, b: Poly2) -> Poly2 {
    divmod(a, b).1
}

pub fn gcd(mut a: Poly2, mut b: Poly2) -> Poly2 {
    while b != 0 {
        let r = rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// Reduces integer coefficients modulo 2. Panics if the degree exceeds 127.
pub fn from_int_coeffs(c: &[i64]) -> Poly2 {
    assert!(c.len() <= 128, "polynomial degree too large for GF(2) packing");
    c.iter()
        .enumerate()
        .filter(|(_, &v)| v.rem_euclid(2) == 1)
        .fold(0, |acc, (i, _)| acc | (1 << i))
}

/// Irreducible factors of a squarefree polynomial, sorted ascending as integers
/// (i.e. lexicographically on the coefficient bit-string read from the top degree).
pub fn factor_squarefree(f: Poly2) -> Vec<Poly2> {
    let d = degree(f).expect("cannot factor zero") as usize;
    if d <= 1 {
        return vec![f];
    }
    // Berlekamp subalgebra: v with v(x)^2 ≡ v(x) (mod f). Columns of the linear
    // map v ↦ v^2 - v in the basis x^i.
    let mut cols: Vec<Poly2> = Vec::with_capacity(d);
    for i in 0..d {
        let xi2 = mul_mod(1 << i, 1 << i, f);
        cols.push(xi2 ^ (1 << i));
    }
    let kernel = kernel_gf2(&cols, d);
    let mut factors = split_all(f, &kernel);
    factors.sort_unstable();
    factors
}

/// Splits `f` by `gcd(h, v + s)` for every kernel vector `v` and `s` in GF(2);
/// for a squarefree `f` this separates every pair of irreducible factors.
fn split_all(f: Poly2, kernel: &[Poly2]) -> Vec<Poly2> {
    let target = kernel.len();
    let mut factors = vec![f];
    for &v in kernel {
        for s in [0, 1] {
            let mut next = Vec::new();
            for h in factors {
                let g1 = gcd(h, v ^ s);
                if degree(g1).unwrap_or(0) > 0 && g1 != h {
                    next.push(g1);
                    next.push(divmod(h, g1).0);
                } else {
                    next.push(h);
                }
            }
            factors = next;
            if factors.len() == target {
                return factors;
            }
        }
    }
    factors
}

/// Kernel of the `d × d` matrix over GF(2) whose column `i` is `cols[i]`.
fn kernel_gf2(cols: &[Poly2], d: usize) -> Vec<Poly2> {
    // rows[r] has bit c set iff entry (r, c) is 1
    let mut rows: Vec<Poly2> = (0..d)
        .map(|r| {
            cols.iter()
                .enumerate()
                .filter(|(_, &c)| c >> r & 1 == 1)
                .fold(0, |acc, (i, _)| acc | (1 << i))
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for c in 0..d {
        let Some(p) = (rank..d).find(|&r| rows[r] >> c & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..d {
            if r != rank && rows[r] >> c & 1 == 1 {
                rows[r] ^= rows[rank];
            }
        }
        pivot_cols.push(c);
        rank += 1;
    }
    let free: Vec<usize> = (0..d).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v: Poly2 = 1 << fc;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                if rows[r] >> fc & 1 == 1 {
                    v |= 1 << pc;
                }
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_x_cubed_plus_one() {
        // x^3 + 1 = (x + 1)(x^2 + x + 1)
        assert_eq!(factor_squarefree(0b1001), vec![0b11, 0b111]);
    }

    #[test]
    fn phi15_splits_into_two_quartics() {
        let phi15 = from_int_coeffs(&crate::cyclotomic::field::cyclotomic_polynomial(15));
        let f = factor_squarefree(phi15);
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|&p| degree(p) == Some(4)));
        assert_eq!(mul_mod(f[0], f[1], 1 << 20), phi15);
    }

    #[test]
    fn phi7_splits_into_two_cubics() {
        let phi7 = from_int_coeffs(&crate::cyclotomic::field::cyclotomic_polynomial(7));
        assert_eq!(factor_squarefree(phi7), vec![0b1011, 0b1101]);
    }
}
