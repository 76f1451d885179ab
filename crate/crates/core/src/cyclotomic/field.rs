//! Shared per-conductor data: the cyclotomic polynomial and the power table
//! `ζ^k mod Φ_M` for `0 <= k < M`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;

/// Immutable arithmetic data for `Q(ζ_M)` in the power basis `1, ζ, …, ζ^{φ(M)-1}`.
#[derive(Debug)]
pub struct Field {
    conductor: u32,
    phi: usize,
    cyclo: Vec<i64>,
    powers: Vec<Vec<i64>>,
    units: Vec<u32>,
}

static FIELDS: OnceLock<RwLock<HashMap<u32, Arc<Field>>>> = OnceLock::new();
static CYCLO: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();

/// Returns the (cached) field data for conductor `m`.
pub fn field(m: u32) -> Arc<Field> {
    assert!(m >= 1, "conductor must be positive");
    let cache = FIELDS.get_or_init(Default::default);
    if let Some(f) = cache.read().unwrap().get(&m) {
        return Arc::clone(f);
    }
    let built = Arc::new(Field::build(m));
    let mut w = cache.write().unwrap();
    Arc::clone(w.entry(m).or_insert(built))
}

/// Euler's totient.
pub fn totient(m: u32) -> usize {
    (1..=m).filter(|&k| k.gcd(&m) == 1).count()
}

/// Integer coefficients of the `m`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(m: u32) -> Arc<Vec<i64>> {
    let cache = CYCLO.get_or_init(Default::default);
    if let Some(p) = cache.read().unwrap().get(&m) {
        return Arc::clone(p);
    }
    // x^m - 1 divided by every Φ_d with d | m, d < m.
    let mut p = vec![0i64; m as usize + 1];
    p[0] = -1;
    p[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            let q = cyclotomic_polynomial(d);
            p = exact_div_monic(&p, &q);
        }
    }
    let p = Arc::new(p);
    cache.write().unwrap().insert(m, Arc::clone(&p));
    p
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quo = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quo[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quo
}

impl Field {
    fn build(m: u32) -> Self {
        let cyclo = cyclotomic_polynomial(m).as_ref().clone();
        let phi = cyclo.len() - 1;
        let mut powers = Vec::with_capacity(m as usize);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..m {
            powers.push(cur.clone());
            // multiply by x and reduce the x^phi term
            let top = cur[phi - 1];
            for i in (1..phi).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..phi {
                    cur[i] -= top * cyclo[i];
                }
            }
        }
        let units = (1..=m).filter(|&k| k.gcd(&m) == 1).map(|k| k % m).collect();
        Field {
            conductor: m,
            phi,
            cyclo,
            powers,
            units,
        }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Degree `φ(M)` of the field over `Q`.
    pub fn degree(&self) -> usize {
        self.phi
    }

    pub fn cyclotomic(&self) -> &[i64] {
        &self.cyclo
    }

    /// Power-basis coordinates of `ζ_M^k` (any integer `k`).
    pub fn power(&self, k: i64) -> &[i64] {
        let m = self.conductor as i64;
        &self.powers[k.rem_euclid(m) as usize]
    }

    /// Residues `j mod M` with `gcd(j, M) = 1`, ascending (`1` first).
    pub fn units(&self) -> &[u32] {
        &self.units
    }

    /// Reduces a polynomial of any length modulo `Φ_M` in place and truncates it to `φ(M)` terms.
    pub(crate) fn reduce_i128(&self, p: &mut Vec<i128>) {
        let phi = self.phi;
        while p.len() > phi {
            let c = p.pop().unwrap();
            if c != 0 {
                let shift = p.len() - phi;
                for i in 0..phi {
                    p[shift + i] -= c * self.cyclo[i] as i128;
                }
            }
        }
        p.resize(phi, 0);
    }

    /// Product of two integral elements given in power-basis coordinates.
    pub fn mul_int(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let phi = self.phi;
        let mut prod = vec![0i128; 2 * phi - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] += ai as i128 * bj as i128;
            }
        }
        self.reduce_i128(&mut prod);
        prod.into_iter()
            .map(|c| i64::try_from(c).expect("integral cyclotomic coefficient overflow"))
            .collect()
    }

    /// `acc += a * b` for integral elements.
    pub fn mul_add_int(&self, acc: &mut [i64], a: &[i64], b: &[i64]) {
        let prod = self.mul_int(a, b);
        for (x, y) in acc.iter_mut().zip(prod) {
            *x = x.checked_add(y).expect("integral cyclotomic coefficient overflow");
        }
    }

    /// Image of an integral element under `ζ ↦ ζ^j`.
    pub fn galois_int(&self, a: &[i64], j: i64) -> Vec<i64> {
        let mut out = vec![0i64; self.phi];
        for (i, &c) in a.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(self.power(i as i64 * j)) {
                *o += c * p;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        // Φ_105 is the first with a coefficient outside {-1, 0, 1}
        assert!(cyclotomic_polynomial(105).contains(&-2));
    }

    #[test]
    fn degree_is_totient() {
        for m in 1..=120 {
            assert_eq!(field(m).degree(), totient(m), "m = {m}");
        }
    }

    #[test]
    fn powers_wrap_around() {
        let f = field(12);
        assert_eq!(f.power(12), f.power(0));
        assert_eq!(f.power(-1), f.power(11));
        // ζ_12^6 = -1
        assert_eq!(f.power(6), &[-1, 0, 0, 0]);
    }
}
