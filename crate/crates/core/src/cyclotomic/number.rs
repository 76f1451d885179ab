use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::field::{field, Field};
use crate::error::{Error, Result};

/// An element of `Q(ζ_M)` in power-basis coordinates.
///
/// Stored as an integer numerator vector over a positive common denominator,
/// with `gcd(content, den) = 1` (zero is `0/1`). This is the unique reduced
/// form for the conductor, so structural equality is value equality whenever
/// the conductors agree; mixed conductors are compared after lifting.
#[derive(Clone)]
pub struct CycNum {
    field: Arc<Field>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycNum {
    pub fn zero(conductor: u32) -> Self {
        let field = field(conductor);
        let num = vec![BigInt::zero(); field.degree()];
        CycNum {
            field,
            num,
            den: BigInt::one(),
        }
    }

    pub fn one(conductor: u32) -> Self {
        Self::from_int(conductor, 1)
    }

    pub fn from_int(conductor: u32, v: i64) -> Self {
        Self::from_rational(conductor, &BigRational::from_integer(v.into()))
    }

    pub fn from_rational(conductor: u32, v: &BigRational) -> Self {
        let mut x = Self::zero(conductor);
        x.num[0] = v.numer().clone();
        x.den = v.denom().clone();
        x.normalize();
        x
    }

    /// `ζ_M^k` for any integer `k`.
    pub fn root_of_unity(conductor: u32, k: i64) -> Self {
        let field = field(conductor);
        let num = field.power(k).iter().map(|&c| BigInt::from(c)).collect();
        CycNum {
            field,
            num,
            den: BigInt::one(),
        }
    }

    /// Builds an integral element from power-basis integer coordinates.
    pub fn from_int_coeffs(conductor: u32, coeffs: &[i64]) -> Self {
        let field = field(conductor);
        assert_eq!(coeffs.len(), field.degree(), "coefficient vector has wrong length");
        let num = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        CycNum {
            field,
            num,
            den: BigInt::one(),
        }
    }

    /// Builds an element from exact rational power-basis coordinates.
    pub fn from_coeffs(conductor: u32, coeffs: &[BigRational]) -> Result<Self> {
        let field = field(conductor);
        if coeffs.len() != field.degree() {
            return Err(Error::Malformed(format!(
                "conductor {conductor} needs {} coefficients, got {}",
                field.degree(),
                coeffs.len()
            )));
        }
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        let mut x = CycNum { field, num, den };
        x.normalize();
        Ok(x)
    }

    pub fn conductor(&self) -> u32 {
        self.field.conductor()
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// Rational power-basis coordinates (length `φ(M)`).
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|n| BigRational::new(n.clone(), self.den.clone()))
            .collect()
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// Integer coordinates if the element is integral and they fit in `i64`.
    pub fn to_int_coeffs(&self) -> Option<Vec<i64>> {
        if !self.den.is_one() {
            return None;
        }
        self.num.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational number, if it lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -&self.den;
            for x in self.num.iter_mut() {
                *x = -&*x;
            }
        }
        let g = self.num.iter().fold(self.den.clone(), |g, x| g.gcd(x));
        if !g.is_one() && !g.is_zero() {
            for x in self.num.iter_mut() {
                *x /= &g;
            }
            self.den /= &g;
        }
        if self.is_zero() {
            self.den = BigInt::one();
        }
    }

    /// Re-expresses the element in `Q(ζ_target)`; `target` must be a multiple of the conductor.
    pub fn lift(&self, target: u32) -> Result<Self> {
        let m = self.conductor();
        if target == m {
            return Ok(self.clone());
        }
        if target % m != 0 {
            return Err(Error::ConductorMismatch { from: m, to: target });
        }
        let step = (target / m) as i64;
        let f = field(target);
        let mut num = vec![BigInt::zero(); f.degree()];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &p) in num.iter_mut().zip(f.power(i as i64 * step)) {
                if p != 0 {
                    *o += c * p;
                }
            }
        }
        let mut x = CycNum {
            field: f,
            num,
            den: self.den.clone(),
        };
        x.normalize();
        Ok(x)
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let m = a.conductor().lcm(&b.conductor());
        (a.lift(m).unwrap(), b.lift(m).unwrap())
    }

    /// Image under the automorphism `ζ ↦ ζ^j`; requires `gcd(j, M) = 1`.
    pub fn galois(&self, j: i64) -> Result<Self> {
        let m = self.conductor() as i64;
        if j.gcd(&m) != 1 {
            return Err(Error::NotAnAutomorphism {
                j,
                conductor: self.conductor(),
            });
        }
        let mut num = vec![BigInt::zero(); self.field.degree()];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &p) in num.iter_mut().zip(self.field.power(i as i64 * j)) {
                if p != 0 {
                    *o += c * p;
                }
            }
        }
        let mut x = CycNum {
            field: Arc::clone(&self.field),
            num,
            den: self.den.clone(),
        };
        x.normalize();
        Ok(x)
    }

    /// Complex conjugation, realized as `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(-1).expect("-1 is always a unit")
    }

    /// Field norm down to `Q`.
    pub fn norm(&self) -> BigRational {
        let units = self.field.units().to_vec();
        let mut acc = self.clone();
        for &j in &units[1..] {
            acc = &acc * &self.galois(j as i64).unwrap();
        }
        acc.to_rational().expect("norm must be rational")
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // x^{-1} = (product of the other conjugates) / N(x)
        let units = self.field.units().to_vec();
        let mut others = CycNum::one(self.conductor());
        for &j in &units[1..] {
            others = &others * &self.galois(j as i64).unwrap();
        }
        let n = (self * &others).to_rational().expect("norm must be rational");
        Ok(others.scale(&n.recip()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut x = CycNum {
            field: Arc::clone(&self.field),
            num: self.num.iter().map(|c| c * r.numer()).collect(),
            den: &self.den * r.denom(),
        };
        x.normalize();
        x
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(k.into()))
    }

    /// Compares two elements of the same conductor by serialized coordinates
    /// (lexicographic on `(num_i / den)` as rationals).
    pub fn cmp_coeffs(&self, other: &Self) -> Ordering {
        let (a, b) = Self::common(self, other);
        a.coeffs().cmp(&b.coeffs())
    }

    fn add_impl(&self, other: &Self, sign: i64) -> Self {
        if self.conductor() != other.conductor() {
            let (a, b) = Self::common(self, other);
            return a.add_impl(&b, sign);
        }
        let den = self.den.lcm(&other.den);
        let fa = &den / &self.den;
        let fb = &den / &other.den;
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(x, y)| {
                let t = y * &fb;
                if sign > 0 {
                    x * &fa + t
                } else {
                    x * &fa - t
                }
            })
            .collect();
        let mut r = CycNum {
            field: Arc::clone(&self.field),
            num,
            den,
        };
        r.normalize();
        r
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.conductor() != other.conductor() {
            let (a, b) = Self::common(self, other);
            return a.mul_impl(&b);
        }
        let phi = self.field.degree();
        let mut prod = vec![BigInt::zero(); 2 * phi - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let cyclo = self.field.cyclotomic();
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
        let mut r = CycNum {
            field: Arc::clone(&self.field),
            num: prod,
            den: &self.den * &other.den,
        };
        r.normalize();
        r
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor() == other.conductor() {
            self.den == other.den && self.num == other.num
        } else {
            let (a, b) = Self::common(self, other);
            a == b
        }
    }
}

impl Eq for CycNum {}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let r = BigRational::new(c.clone(), self.den.clone());
            terms.push(match i {
                0 => format!("{r}"),
                1 => format!("{r}*z{}", self.conductor()),
                _ => format!("{r}*z{}^{i}", self.conductor()),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&CycNum> for &CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &CycNum) -> CycNum {
                $body(self, rhs)
            }
        }
        impl $tr<CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: CycNum) -> CycNum {
                $body(&self, &rhs)
            }
        }
        impl $tr<&CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &CycNum) -> CycNum {
                $body(&self, rhs)
            }
        }
    };
}

binop!(Add, add, |a: &CycNum, b: &CycNum| a.add_impl(b, 1));
binop!(Sub, sub, |a: &CycNum, b: &CycNum| a.add_impl(b, -1));
binop!(Mul, mul, |a: &CycNum, b: &CycNum| a.mul_impl(b));

impl AddAssign<&CycNum> for CycNum {
    fn add_assign(&mut self, rhs: &CycNum) {
        *self = self.add_impl(rhs, 1);
    }
}

impl SubAssign<&CycNum> for CycNum {
    fn sub_assign(&mut self, rhs: &CycNum) {
        *self = self.add_impl(rhs, -1);
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            field: Arc::clone(&self.field),
            num: self.num.iter().map(|x| -x).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    conductor: u32,
    coeffs: Vec<[i64; 2]>,
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        let coeffs = self
            .coeffs()
            .iter()
            .map(|c| match (c.numer().to_i64(), c.denom().to_i64()) {
                (Some(n), Some(d)) => Ok([n, d]),
                _ => Err(S::Error::custom("coefficient does not fit in 64 bits")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Wire {
            conductor: self.conductor(),
            coeffs,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        if w.conductor == 0 {
            return Err(D::Error::custom("conductor must be positive"));
        }
        let mut coeffs = Vec::with_capacity(w.coeffs.len());
        for [n, den] in w.coeffs {
            if den <= 0 {
                return Err(D::Error::custom("denominator must be positive"));
            }
            if n.gcd(&den) != 1 && n != 0 || (n == 0 && den != 1) {
                return Err(D::Error::custom("coefficient not in lowest terms"));
            }
            coeffs.push(BigRational::new(n.into(), den.into()));
        }
        CycNum::from_coeffs(w.conductor, &coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(m: u32, k: i64) -> CycNum {
        CycNum::root_of_unity(m, k)
    }

    #[test]
    fn roots_of_unity_examples() {
        assert!(z(1, 0).is_one());
        assert_eq!(z(4, 2), CycNum::from_int(4, -1));
        assert_eq!(z(3, 1) + z(3, 2), CycNum::from_int(3, -1));
    }

    #[test]
    fn field_op_examples() {
        let one = CycNum::one(3);
        assert_eq!((&one - &z(3, 1)) * (&one - &z(3, 2)), CycNum::from_int(3, 3));
        assert_eq!(z(4, 1).galois(3).unwrap(), -z(4, 1));
        let half = CycNum::from_int(1, 2).inverse().unwrap();
        assert_eq!(half.to_rational().unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(matches!(CycNum::zero(5).inverse(), Err(Error::DivisionByZero)));
        assert!(matches!(z(4, 1).galois(2), Err(Error::NotAnAutomorphism { .. })));
    }

    #[test]
    fn mixed_conductors_lift() {
        // ω + i lives in Q(ζ_12)
        let s = z(3, 1) + z(4, 1);
        assert_eq!(s.conductor(), 12);
        assert_eq!(z(3, 1), z(12, 4));
        assert_eq!(z(2, 1), CycNum::from_int(7, -1));
    }

    #[test]
    fn inverse_round_trip() {
        let x = z(15, 1) + CycNum::from_int(15, 2) + z(15, 7).scale_int(3);
        let y = x.inverse().unwrap();
        assert!((&x * &y).is_one());
    }

    #[test]
    fn order_of_root_of_unity() {
        for m in 1..=24u32 {
            for k in 0..m as i64 {
                let x = z(m, k);
                let ord = m / (k as u32).gcd(&m);
                let mut p = CycNum::one(m);
                for step in 1..=ord {
                    p = &p * &x;
                    assert_eq!(p.is_one(), step == ord, "m={m} k={k} step={step}");
                }
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let x = z(5, 2).scale(&BigRational::new(3.into(), 4.into())) - CycNum::one(5);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"conductor":5,"coeffs":[[-1,1],[0,1],[3,4],[0,1]]}"#);
        let back: CycNum = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<CycNum>(r#"{"conductor":5,"coeffs":[[2,4],[0,1],[0,1],[0,1]]}"#).is_err());
    }
}
