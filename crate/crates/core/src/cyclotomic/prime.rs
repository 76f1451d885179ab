//! The prime `P` above 2 in `Z[ζ_M]` and the valuation `v_P`.
//!
//! `P = (2, F(ζ_M))` where `F` lifts an irreducible factor of `Φ_M mod 2`.
//! Powers `P^t` are kept as ℤ-lattices in HNF; `y ∈ P^t` is a lattice
//! membership test. `v_P(2) = e`, so for rationals the valuation is `e · v_2`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::field::{cyclotomic_polynomial, field, totient, Field};
use super::gf2;
use super::number::CycNum;
use crate::error::{Error, Result};
use crate::intmat;

/// `v_P(x)`, with `Infinity` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_at_least(self, t: i64) -> bool {
        match self {
            Valuation::Finite(v) => v >= t,
            Valuation::Infinity => true,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinity, Valuation::Infinity) => Ordering::Equal,
            (Valuation::Infinity, _) => Ordering::Greater,
            (_, Valuation::Infinity) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl std::ops::Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug)]
struct IdealBasis {
    rows: intmat::IntMatrix,
    small: Option<Vec<(usize, Vec<i128>)>>,
}

impl IdealBasis {
    fn new(rows: intmat::IntMatrix) -> Self {
        let small = rows
            .iter()
            .map(|r| {
                let pc = r.iter().position(|x| !x.is_zero())?;
                let vals: Option<Vec<i128>> = r.iter().map(|x| x.to_i64().map(|v| v as i128)).collect();
                Some((pc, vals?))
            })
            .collect();
        IdealBasis { rows, small }
    }
}

#[derive(Debug)]
struct Inner {
    field: Arc<Field>,
    factor: gf2::Poly2,
    factor_index: usize,
    num_factors: usize,
    e: u32,
    f: u32,
    generator: Vec<i64>,
    bases: RwLock<Vec<Arc<IdealBasis>>>,
}

/// A chosen prime above 2 in `Z[ζ_M]` with its ramification data and a
/// grow-only cache of ideal-power bases. Cheap to clone; safe to share.
#[derive(Clone, Debug)]
pub struct PrimeContext {
    inner: Arc<Inner>,
}

/// Builds the context for the `which_factor`-th irreducible factor (ascending
/// bit-string order) of `Φ_M mod 2`.
pub fn prime_context(m: u32, which_factor: usize) -> Result<PrimeContext> {
    if m == 0 {
        return Err(Error::Malformed("conductor must be positive".into()));
    }
    let fld = field(m);
    if fld.degree() >= 128 {
        return Err(Error::Unsupported(format!("conductor {m}: φ(M) must be below 128")));
    }
    let two_part = 1u32 << m.trailing_zeros();
    let odd = m / two_part;
    let e = totient(two_part) as u32;
    let factors = gf2::factor_squarefree(gf2::from_int_coeffs(&cyclotomic_polynomial(odd)));
    let num_factors = factors.len();
    let Some(&factor) = factors.get(which_factor) else {
        return Err(Error::FactorIndexOutOfRange {
            index: which_factor,
            count: num_factors,
        });
    };
    let f = gf2::degree(factor).unwrap();
    debug_assert_eq!(e as usize * f as usize * num_factors, fld.degree());

    // F(ζ) in the power basis of Q(ζ_M)
    let mut generator = vec![0i64; fld.degree()];
    for i in 0..=f {
        if factor >> i & 1 == 1 {
            for (g, &p) in generator.iter_mut().zip(fld.power(i as i64)) {
                *g += p;
            }
        }
    }
    let phi = fld.degree();
    let identity: intmat::IntMatrix = (0..phi)
        .map(|i| (0..phi).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let ctx = PrimeContext {
        inner: Arc::new(Inner {
            field: fld,
            factor,
            factor_index: which_factor,
            num_factors,
            e,
            f,
            generator,
            bases: RwLock::new(vec![Arc::new(IdealBasis::new(identity))]),
        }),
    };
    Ok(ctx)
}

/// Number of primes above 2 in `Z[ζ_M]`.
pub fn num_primes_above_two(m: u32) -> usize {
    let odd = m >> m.trailing_zeros();
    let fl = field(odd);
    let mut ord = 1usize;
    let mut p = 2 % odd;
    while p != 1 % odd {
        p = p * 2 % odd;
        ord += 1;
    }
    fl.degree() / ord
}

impl PrimeContext {
    pub fn conductor(&self) -> u32 {
        self.inner.field.conductor()
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.inner.field
    }

    /// Ramification index of 2.
    pub fn e(&self) -> u32 {
        self.inner.e
    }

    /// Residue degree.
    pub fn f(&self) -> u32 {
        self.inner.f
    }

    /// Number of primes above 2.
    pub fn g(&self) -> u32 {
        self.inner.num_factors as u32
    }

    pub fn factor_index(&self) -> usize {
        self.inner.factor_index
    }

    /// Coefficients (constant term first) of the chosen factor of `Φ_M mod 2`.
    pub fn factor(&self) -> Vec<u8> {
        let d = gf2::degree(self.inner.factor).unwrap();
        (0..=d).map(|i| (self.inner.factor >> i & 1) as u8).collect()
    }

    fn basis(&self, t: usize) -> Arc<IdealBasis> {
        if let Some(b) = self.inner.bases.read().unwrap().get(t) {
            return Arc::clone(b);
        }
        let mut w = self.inner.bases.write().unwrap();
        while w.len() <= t {
            let prev = Arc::clone(w.last().unwrap());
            let next = self.times_p(&prev.rows);
            w.push(Arc::new(IdealBasis::new(next)));
        }
        Arc::clone(&w[t])
    }

    /// ℤ-basis of `P · J` given a ℤ-basis of the ideal `J`.
    fn times_p(&self, j: &intmat::IntMatrix) -> intmat::IntMatrix {
        let fld = &self.inner.field;
        let two = BigInt::from(2);
        let gen: Vec<BigInt> = self.inner.generator.iter().map(|&c| BigInt::from(c)).collect();
        let mut rows = Vec::with_capacity(2 * j.len());
        for b in j {
            rows.push(b.iter().map(|x| x * &two).collect());
            rows.push(mul_big(fld, b, &gen));
        }
        intmat::hnf(&rows)
    }

    /// ℤ-basis of `P^t` in power-basis coordinates (rows, HNF).
    pub fn ideal_basis(&self, t: usize) -> intmat::IntMatrix {
        self.basis(t).rows.clone()
    }

    /// Whether the integral element `y` lies in `P^t`.
    pub fn int_in_ideal_power(&self, y: &[i64], t: usize) -> bool {
        if t == 0 {
            return true;
        }
        let b = self.basis(t);
        if let Some(small) = &b.small {
            if let Some(ans) = intmat::contains_i128(small, y) {
                return ans;
            }
        }
        let big: Vec<BigInt> = y.iter().map(|&c| BigInt::from(c)).collect();
        intmat::contains(&b.rows, &big)
    }

    /// Membership test for one fixed `P^t` that does not touch the shared cache.
    pub fn ideal_tester(&self, t: usize) -> IdealTester {
        IdealTester {
            t,
            basis: self.basis(t),
        }
    }

    fn big_in_ideal_power(&self, y: &[BigInt], t: usize) -> bool {
        if t == 0 {
            return true;
        }
        let b = self.basis(t);
        if let (Some(small), Some(y64)) = (
            &b.small,
            y.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<i64>>>(),
        ) {
            if let Some(ans) = intmat::contains_i128(small, &y64) {
                return ans;
            }
        }
        intmat::contains(&b.rows, y)
    }

    /// `v_P` of an integral element given by big-integer coordinates.
    fn int_valuation(&self, y: &[BigInt]) -> Valuation {
        let Some(q) = y
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| c.trailing_zeros().unwrap())
            .min()
        else {
            return Valuation::Infinity;
        };
        let reduced: Vec<BigInt> = y.iter().map(|c| c >> q).collect();
        let mut t = 0usize;
        while self.big_in_ideal_power(&reduced, t + 1) {
            t += 1;
        }
        Valuation::Finite(q as i64 * self.inner.e as i64 + t as i64)
    }

    /// `v_P(x)`; `x` must live in a subfield of `Q(ζ_M)`.
    pub fn valuation(&self, x: &CycNum) -> Valuation {
        let x = x
            .lift(self.conductor())
            .expect("element conductor must divide the context conductor");
        if x.is_zero() {
            return Valuation::Infinity;
        }
        let s = x.denominator().trailing_zeros().unwrap_or(0) as i64;
        match self.int_valuation(x.numerator()) {
            Valuation::Finite(v) => Valuation::Finite(v - self.inner.e as i64 * s),
            Valuation::Infinity => Valuation::Infinity,
        }
    }

    /// Whether `x ∈ 2^t · O_P`.
    pub fn in_scaled_ring(&self, x: &CycNum, t: i64) -> bool {
        self.valuation(x).is_at_least(t * self.inner.e as i64)
    }

    /// Whether `x ∈ O_P`, i.e. `v_P(x) >= 0`.
    pub fn is_integral(&self, x: &CycNum) -> bool {
        self.valuation(x).is_at_least(0)
    }
}

/// Handle for repeated `y ∈ P^t` tests on integral elements.
#[derive(Clone, Debug)]
pub struct IdealTester {
    t: usize,
    basis: Arc<IdealBasis>,
}

impl IdealTester {
    pub fn exponent(&self) -> usize {
        self.t
    }

    pub fn contains(&self, y: &[i64]) -> bool {
        if self.t == 0 || y.iter().all(|&c| c == 0) {
            return true;
        }
        if let Some(small) = &self.basis.small {
            if let Some(ans) = intmat::contains_i128(small, y) {
                return ans;
            }
        }
        let big: Vec<BigInt> = y.iter().map(|&c| BigInt::from(c)).collect();
        intmat::contains(&self.basis.rows, &big)
    }
}

fn mul_big(fld: &Field, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let phi = fld.degree();
    let mut prod = vec![BigInt::zero(); 2 * phi - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                prod[i + j] += x * y;
            }
        }
    }
    let cyclo = fld.cyclotomic();
    while prod.len() > phi {
        let c = prod.pop().unwrap();
        if !c.is_zero() {
            let shift = prod.len() - phi;
            for (k, &ck) in cyclo[..phi].iter().enumerate() {
                if ck != 0 {
                    prod[shift + k] -= &c * ck;
                }
            }
        }
    }
    prod
}

impl PrimeContext {
    /// Whether two contexts describe the same prime.
    pub fn same_prime(&self, other: &PrimeContext) -> bool {
        self.conductor() == other.conductor() && self.inner.factor == other.inner.factor
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(m: u32, k: i64) -> CycNum {
        CycNum::root_of_unity(m, k)
    }

    #[test]
    fn ramification_data() {
        let c4 = prime_context(4, 0).unwrap();
        assert_eq!((c4.e(), c4.f(), c4.g()), (2, 1, 1));
        let c12 = prime_context(12, 0).unwrap();
        assert_eq!((c12.e(), c12.f(), c12.g()), (2, 2, 1));
        let c60 = prime_context(60, 1).unwrap();
        assert_eq!((c60.e(), c60.f(), c60.g()), (2, 4, 2));
        assert!(matches!(
            prime_context(60, 2),
            Err(Error::FactorIndexOutOfRange { index: 2, count: 2 })
        ));
        for m in 1..=60 {
            let c = prime_context(m, 0).unwrap();
            assert_eq!((c.e() * c.f() * c.g()) as usize, totient(m), "m = {m}");
            assert_eq!(c.g() as usize, num_primes_above_two(m));
        }
    }

    #[test]
    fn valuation_examples() {
        let c4 = prime_context(4, 0).unwrap();
        assert_eq!(c4.valuation(&(z(4, 1) - CycNum::one(4))), Valuation::Finite(1));
        assert_eq!(c4.valuation(&CycNum::from_int(4, 2)), Valuation::Finite(2));
        assert_eq!(c4.valuation(&CycNum::zero(4)), Valuation::Infinity);
        let c12 = prime_context(12, 0).unwrap();
        assert_eq!(c12.valuation(&(CycNum::one(3) - z(3, 1))), Valuation::Finite(0));
        // 1/2 in Q(i)
        assert_eq!(
            c4.valuation(&CycNum::from_int(1, 2).inverse().unwrap()),
            Valuation::Finite(-2)
        );
    }

    #[test]
    fn scaled_ring_examples() {
        let c4 = prime_context(4, 0).unwrap();
        assert!(!c4.in_scaled_ring(&(CycNum::one(4) + z(4, 1)), 1));
        assert!(c4.in_scaled_ring(&z(4, 1).scale_int(2), 1));
        let c3 = prime_context(3, 0).unwrap();
        assert!(c3.in_scaled_ring(&z(3, 1), 0));
    }

    #[test]
    fn ideal_powers_are_nested() {
        let c = prime_context(24, 0).unwrap();
        let mut prev = c.ideal_basis(0);
        for t in 1..6 {
            let cur = c.ideal_basis(t);
            for row in &cur {
                assert!(intmat::contains(&prev, row));
            }
            prev = cur;
        }
        // P^e = 2 Z[ζ] when g = 1
        let e = c.e() as usize;
        let two: intmat::IntMatrix = (0..8)
            .map(|i| (0..8).map(|j| BigInt::from(if i == j { 2 } else { 0 })).collect())
            .collect();
        assert_eq!(c.ideal_basis(e), two);
    }

    #[test]
    fn root_of_two_power_minus_one_has_valuation_one() {
        for a in 1..=4 {
            let m = 1u32 << a;
            let c = prime_context(m, 0).unwrap();
            assert_eq!(
                c.valuation(&(z(m, 1) - CycNum::one(m))),
                Valuation::Finite(1),
                "a = {a}"
            );
            assert_eq!(c.valuation(&CycNum::from_int(m, 2)), Valuation::Finite(c.e() as i64));
        }
    }
}
