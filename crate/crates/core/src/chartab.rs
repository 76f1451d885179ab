//! Character tables of the model groups: cyclic groups, `A4`, `A5` and direct
//! products, plus the square-subgroup embeddings `C_{2^{n-1}} × H ⊂ C_{2^n} × H`.
//!
//! Every table is validated on construction (shape, class sizes, both
//! orthogonality relations, integral values), so a `CharTable` in hand is
//! always a genuine character table.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{field, CycNum};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassData {
    pub label: String,
    pub size: u64,
    #[serde(rename = "order")]
    pub element_order: u32,
    #[serde(rename = "centralizer")]
    pub centralizer_order: u64,
    #[serde(rename = "regular2")]
    pub is_2regular: bool,
}

impl ClassData {
    fn new(label: impl Into<String>, size: u64, element_order: u32, group_order: u64) -> Self {
        ClassData {
            label: label.into(),
            size,
            element_order,
            centralizer_order: group_order / size,
            is_2regular: element_order % 2 == 1,
        }
    }
}

/// Irreducible characters of one finite group, rows indexed by character and
/// columns by conjugacy class. Class 0 is the identity.
#[derive(Clone)]
pub struct CharTable {
    group_label: String,
    group_order: u64,
    conductor: u32,
    classes: Vec<ClassData>,
    values: Vec<Vec<CycNum>>,
    int_values: Vec<Vec<Vec<i64>>>,
}

#[derive(Serialize, Deserialize)]
struct TableWire {
    group: String,
    order: u64,
    conductor: u32,
    classes: Vec<ClassData>,
    chars: Vec<Vec<CycNum>>,
}

impl Serialize for CharTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TableWire {
            group: self.group_label.clone(),
            order: self.group_order,
            conductor: self.conductor,
            classes: self.classes.clone(),
            chars: self.values.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CharTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = TableWire::deserialize(d)?;
        CharTable::new(w.group, w.order, w.conductor, w.classes, w.chars).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for CharTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CharTable")
            .field("group", &self.group_label)
            .field("order", &self.group_order)
            .field("k", &self.values.len())
            .finish()
    }
}

impl CharTable {
    /// Validates and builds a table. Values are lifted to `conductor`.
    pub fn new(
        group_label: impl Into<String>,
        group_order: u64,
        conductor: u32,
        classes: Vec<ClassData>,
        values: Vec<Vec<CycNum>>,
    ) -> Result<Self> {
        let group_label = group_label.into();
        let bad = |msg: String| Error::Malformed(format!("table {group_label}: {msg}"));
        let c = classes.len();
        if c == 0 || values.len() != c || values.iter().any(|r| r.len() != c) {
            return Err(bad("value matrix must be square with one column per class".into()));
        }
        if classes[0].element_order != 1 || classes[0].size != 1 {
            return Err(bad("class 0 must be the identity".into()));
        }
        if classes.iter().map(|cl| cl.size).sum::<u64>() != group_order {
            return Err(bad("class sizes do not sum to the group order".into()));
        }
        for cl in &classes {
            if cl.size * cl.centralizer_order != group_order {
                return Err(bad(format!("class {}: size * centralizer != |G|", cl.label)));
            }
            if cl.is_2regular != (cl.element_order % 2 == 1) {
                return Err(bad(format!(
                    "class {}: 2-regularity flag disagrees with element order",
                    cl.label
                )));
            }
        }
        let mut lifted = Vec::with_capacity(c);
        let mut int_values = Vec::with_capacity(c);
        for row in values {
            let mut lrow = Vec::with_capacity(c);
            let mut irow = Vec::with_capacity(c);
            for v in row {
                let v = v.lift(conductor)?;
                let iv = v
                    .to_int_coeffs()
                    .ok_or_else(|| bad(format!("value {v} is not an algebraic integer in the power basis")))?;
                lrow.push(v);
                irow.push(iv);
            }
            lifted.push(lrow);
            int_values.push(irow);
        }
        let table = CharTable {
            group_label,
            group_order,
            conductor,
            classes,
            values: lifted,
            int_values,
        };
        table.check_degrees()?;
        table.check_orthogonality()?;
        Ok(table)
    }

    fn check_degrees(&self) -> Result<()> {
        for (i, row) in self.int_values.iter().enumerate() {
            let d = &row[0];
            if d[0] <= 0 || d[1..].iter().any(|&x| x != 0) {
                return Err(Error::Malformed(format!(
                    "table {}: degree of character {i} is not a positive integer",
                    self.group_label
                )));
            }
        }
        Ok(())
    }

    /// Exact check of both orthogonality relations.
    pub fn check_orthogonality(&self) -> Result<()> {
        let fld = field(self.conductor);
        let k = self.values.len();
        let order = self.group_order as i64;
        let conj: Vec<Vec<Vec<i64>>> = self
            .int_values
            .iter()
            .map(|r| r.iter().map(|v| fld.galois_int(v, -1)).collect())
            .collect();
        let phi = fld.degree();
        let scalar = |n: i64| {
            let mut v = vec![0i64; phi];
            v[0] = n;
            v
        };
        for a in 0..k {
            for b in a..k {
                let mut acc = vec![0i64; phi];
                for (j, cl) in self.classes.iter().enumerate() {
                    let term = fld.mul_int(&self.int_values[a][j], &conj[b][j]);
                    for (x, t) in acc.iter_mut().zip(term) {
                        *x += cl.size as i64 * t;
                    }
                }
                let want = scalar(if a == b { order } else { 0 });
                if acc != want {
                    return Err(Error::Malformed(format!(
                        "table {}: row orthogonality fails for characters {a}, {b}",
                        self.group_label
                    )));
                }
            }
        }
        for i in 0..k {
            for j in i..k {
                let mut acc = vec![0i64; phi];
                for a in 0..k {
                    fld.mul_add_int(&mut acc, &self.int_values[a][i], &conj[a][j]);
                }
                let want = scalar(if i == j {
                    self.classes[i].centralizer_order as i64
                } else {
                    0
                });
                if acc != want {
                    return Err(Error::Malformed(format!(
                        "table {}: column orthogonality fails for classes {i}, {j}",
                        self.group_label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn group_label(&self) -> &str {
        &self.group_label
    }

    pub fn group_order(&self) -> u64 {
        self.group_order
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn classes(&self) -> &[ClassData] {
        &self.classes
    }

    pub fn num_chars(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, chi: usize, class: usize) -> &CycNum {
        &self.values[chi][class]
    }

    /// Integral power-basis coordinates of `χ(g)` in `Q(ζ_conductor)`.
    pub fn value_int(&self, chi: usize, class: usize) -> &[i64] {
        &self.int_values[chi][class]
    }

    pub fn row(&self, chi: usize) -> &[CycNum] {
        &self.values[chi]
    }

    pub fn degree(&self, chi: usize) -> u64 {
        self.int_values[chi][0][0] as u64
    }

    pub fn degrees(&self) -> Vec<u64> {
        (0..self.num_chars()).map(|c| self.degree(c)).collect()
    }

    /// Character index whose values equal `row`, if any.
    pub fn find_char(&self, row: &[CycNum]) -> Option<usize> {
        self.values.iter().position(|r| r.as_slice() == row)
    }

    /// Copy of this table with values expressed over a larger conductor.
    pub fn lifted(&self, conductor: u32) -> Result<CharTable> {
        if conductor == self.conductor {
            return Ok(self.clone());
        }
        CharTable::new(
            self.group_label.clone(),
            self.group_order,
            conductor,
            self.classes.clone(),
            self.values.clone(),
        )
    }
}

/// Characters `θ_i(x^j) = ζ_m^{ij}` of the cyclic group of order `m`; classes `x^j`, `j = 0..m`.
pub fn cyclic_table(m: u32) -> CharTable {
    assert!(m >= 1);
    let order = m as u64;
    let classes = (0..m)
        .map(|j| ClassData::new(format!("x^{j}"), 1, m / j.gcd(&m), order))
        .collect();
    let values = (0..m as i64)
        .map(|i| (0..m as i64).map(|j| CycNum::root_of_unity(m, i * j)).collect())
        .collect();
    CharTable::new(format!("C{m}"), order, m, classes, values).expect("cyclic table is valid")
}

/// `A4` with classes `(), (12)(34), (123), (132)` and characters `χ1..χ4`
/// in the usual labelling (`χ2(123) = ω`, `χ3(123) = ω²`, `χ4` of degree 3).
pub fn a4_table() -> CharTable {
    let classes = vec![
        ClassData::new("()", 1, 1, 12),
        ClassData::new("(12)(34)", 3, 2, 12),
        ClassData::new("(123)", 4, 3, 12),
        ClassData::new("(132)", 4, 3, 12),
    ];
    let n = |v| CycNum::from_int(3, v);
    let w = |k| CycNum::root_of_unity(3, k);
    let values = vec![
        vec![n(1), n(1), n(1), n(1)],
        vec![n(1), n(1), w(1), w(2)],
        vec![n(1), n(1), w(2), w(1)],
        vec![n(3), n(-1), n(0), n(0)],
    ];
    CharTable::new("A4", 12, 3, classes, values).expect("A4 table is valid")
}

/// `A5` with classes `1a, 2a, 3a, 5a, 5b` (`5b` holds the squares of `5a`) and
/// characters of degrees `1, 3, 3, 4, 5`.
pub fn a5_table() -> CharTable {
    let classes = vec![
        ClassData::new("1a", 1, 1, 60),
        ClassData::new("2a", 15, 2, 60),
        ClassData::new("3a", 20, 3, 60),
        ClassData::new("5a", 12, 5, 60),
        ClassData::new("5b", 12, 5, 60),
    ];
    let n = |v| CycNum::from_int(5, v);
    let z = |k| CycNum::root_of_unity(5, k);
    // (1 + √5)/2 = -(ζ² + ζ³), (1 - √5)/2 = -(ζ + ζ⁴)
    let golden = -(z(2) + z(3));
    let conj_golden = -(z(1) + z(4));
    let values = vec![
        vec![n(1), n(1), n(1), n(1), n(1)],
        vec![n(3), n(-1), n(0), golden.clone(), conj_golden.clone()],
        vec![n(3), n(-1), n(0), conj_golden, golden],
        vec![n(4), n(0), n(1), n(-1), n(-1)],
        vec![n(5), n(1), n(-1), n(0), n(0)],
    ];
    CharTable::new("A5", 60, 5, classes, values).expect("A5 table is valid")
}

/// The trivial group.
pub fn trivial_table() -> CharTable {
    CharTable::new(
        "1",
        1,
        1,
        vec![ClassData::new("()", 1, 1, 1)],
        vec![vec![CycNum::one(1)]],
    )
    .expect("trivial table is valid")
}

/// Direct product: classes are pairs `(a, b)` (first factor major), characters
/// are `θ ⊗ χ` with index `i * k2 + m`.
pub fn product_table(t1: &CharTable, t2: &CharTable) -> CharTable {
    let conductor = t1.conductor.lcm(&t2.conductor);
    let order = t1.group_order * t2.group_order;
    let mut classes = Vec::new();
    for a in &t1.classes {
        for b in &t2.classes {
            classes.push(ClassData::new(
                format!("({},{})", a.label, b.label),
                a.size * b.size,
                a.element_order.lcm(&b.element_order),
                order,
            ));
        }
    }
    let mut values = Vec::new();
    for r1 in &t1.values {
        for r2 in &t2.values {
            let mut row = Vec::with_capacity(classes.len());
            for x in r1 {
                for y in r2 {
                    row.push(x * y);
                }
            }
            values.push(row);
        }
    }
    CharTable::new(
        format!("{}x{}", t1.group_label, t2.group_label),
        order,
        conductor,
        classes,
        values,
    )
    .expect("product of valid tables is valid")
}

/// `⟨φ, ψ⟩ = (1/|G|) Σ_g φ(g) conj(ψ(g))` for class functions given by
/// coefficient vectors over `Irr(T)`.
pub fn inner_product(t: &CharTable, phi: &[CycNum], psi: &[CycNum]) -> CycNum {
    let eval = |coeffs: &[CycNum], class: usize| {
        coeffs
            .iter()
            .enumerate()
            .fold(CycNum::zero(t.conductor), |acc, (a, c)| acc + c * &t.values[a][class])
    };
    let mut acc = CycNum::zero(t.conductor);
    for (j, cl) in t.classes.iter().enumerate() {
        let term = eval(phi, j) * eval(psi, j).conj();
        acc += &term.scale_int(cl.size as i64);
    }
    acc.scale(&BigRational::new(1.into(), (t.group_order as i64).into()))
}

/// Coefficient vector of a single irreducible character.
pub fn basis_vector(t: &CharTable, chi: usize) -> Vec<CycNum> {
    (0..t.num_chars())
        .map(|a| CycNum::from_int(t.conductor, (a == chi) as i64))
        .collect()
}

/// The groups the tables are built for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Trivial,
    Cyclic(u32),
    A4,
    A5,
    Product(Box<GroupSpec>, Box<GroupSpec>),
}

impl GroupSpec {
    pub fn table(&self) -> CharTable {
        match self {
            GroupSpec::Trivial => trivial_table(),
            GroupSpec::Cyclic(m) => cyclic_table(*m),
            GroupSpec::A4 => a4_table(),
            GroupSpec::A5 => a5_table(),
            GroupSpec::Product(a, b) => product_table(&a.table(), &b.table()),
        }
    }

    /// Parses a list of tokens; more than one group means a product.
    /// A leading `product` is optional and `cyclic 8` reads as `cyclic:8`.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Result<GroupSpec> {
        let mut words: Vec<String> = Vec::new();
        for (i, t) in tokens
            .iter()
            .map(|t| t.as_ref().trim().to_ascii_lowercase())
            .enumerate()
        {
            if i == 0 && t == "product" {
                continue;
            }
            let joins = t.parse::<u32>().is_ok() && words.last().is_some_and(|w| w == "cyclic");
            match words.last_mut() {
                Some(w) if joins => *w = format!("cyclic:{t}"),
                _ => words.push(t),
            }
        }
        let mut specs = words.iter().map(|t| t.parse::<GroupSpec>());
        let first = specs.next().ok_or_else(|| Error::UnknownGroup(String::new()))??;
        specs.try_fold(first, |acc, s| Ok(GroupSpec::Product(Box::new(acc), Box::new(s?))))
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Accepts `trivial`, `a4`, `a5`, `cyclic:<m>`/`c<m>`, and `<spec>x<spec>`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some((a, b)) = lower.split_once('x') {
            return Ok(GroupSpec::Product(Box::new(a.parse()?), Box::new(b.parse()?)));
        }
        match lower.as_str() {
            "trivial" | "1" => Ok(GroupSpec::Trivial),
            "a4" => Ok(GroupSpec::A4),
            "a5" => Ok(GroupSpec::A5),
            other => {
                let digits = other
                    .strip_prefix("cyclic:")
                    .or_else(|| other.strip_prefix("cyclic"))
                    .or_else(|| other.strip_prefix('c'))
                    .ok_or_else(|| Error::UnknownGroup(s.to_string()))?;
                match digits.trim().parse::<u32>() {
                    Ok(m) if m >= 1 => Ok(GroupSpec::Cyclic(m)),
                    _ => Err(Error::UnknownGroup(s.to_string())),
                }
            }
        }
    }
}

/// Second factor of the index-2 model pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cofactor {
    A4,
    A5,
    Trivial,
}

impl Cofactor {
    pub fn table(self) -> CharTable {
        match self {
            Cofactor::A4 => a4_table(),
            Cofactor::A5 => a5_table(),
            Cofactor::Trivial => trivial_table(),
        }
    }
}

/// A normal subgroup `N ⊴ G` given by the tables of both and the fusion of classes.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub sub: Arc<CharTable>,
    pub sup: Arc<CharTable>,
    pub class_map: Vec<usize>,
    pub index: u32,
}

/// `N = C_{2^{n-1}} × H` inside `G = C_{2^n} × H` through the squares of the cyclic factor.
pub fn index2_embedding(n: u32, h: Cofactor) -> Result<Embedding> {
    if n == 0 {
        return Err(Error::Malformed("index-2 embedding needs n >= 1".into()));
    }
    let ht = h.table();
    let big = 1u32 << n;
    let small = big / 2;
    let sup = Arc::new(product_table(&cyclic_table(big), &ht));
    let sub = Arc::new(product_table(&cyclic_table(small), &ht));
    let ch = ht.classes.len();
    let class_map = (0..small as usize)
        .flat_map(|i| (0..ch).map(move |b| (2 * i) * ch + b))
        .collect();
    let e = Embedding {
        sub,
        sup,
        class_map,
        index: 2,
    };
    e.validate()?;
    Ok(e)
}

impl Embedding {
    fn validate(&self) -> Result<()> {
        if self.class_map.len() != self.sub.classes.len() {
            return Err(Error::Malformed("class map must cover every subgroup class".into()));
        }
        if self.sup.group_order != self.sub.group_order * self.index as u64 {
            return Err(Error::Malformed("group orders disagree with the index".into()));
        }
        for (i, &j) in self.class_map.iter().enumerate() {
            if self.sub.classes[i].element_order != self.sup.classes[j].element_order {
                return Err(Error::Malformed(format!(
                    "class map does not preserve element order at {i}"
                )));
            }
        }
        Ok(())
    }

    /// Subgroup classes fused into the given `G`-class.
    pub fn fiber(&self, sup_class: usize) -> Vec<usize> {
        (0..self.class_map.len())
            .filter(|&i| self.class_map[i] == sup_class)
            .collect()
    }

    /// Whether the `G`-class meets `N`.
    pub fn meets_sub(&self, sup_class: usize) -> bool {
        self.class_map.contains(&sup_class)
    }
}

/// Decomposes `χ|_N` into `Irr(N)`; coefficients must be non-negative integers.
pub fn restrict_character(e: &Embedding, chi: usize) -> Result<Vec<u64>> {
    let sub = &e.sub;
    let conductor = sub.conductor.lcm(&e.sup.conductor);
    let restricted: Vec<CycNum> = e
        .class_map
        .iter()
        .map(|&j| e.sup.values[chi][j].lift(conductor))
        .collect::<Result<_>>()?;
    let mut coeffs = Vec::with_capacity(sub.num_chars());
    for psi in 0..sub.num_chars() {
        let mut acc = CycNum::zero(conductor);
        for (i, cl) in sub.classes.iter().enumerate() {
            let term = &restricted[i] * &sub.values[psi][i].conj();
            acc += &term.scale_int(cl.size as i64);
        }
        let c = acc.scale(&BigRational::new(1.into(), (sub.group_order as i64).into()));
        match c.to_rational() {
            Some(r) if r.is_integer() && *r.numer() >= 0.into() => {
                coeffs.push(
                    r.to_integer()
                        .try_into()
                        .map_err(|_| Error::NonIntegralRestriction { value: c.to_string() })?,
                );
            }
            _ => return Err(Error::NonIntegralRestriction { value: c.to_string() }),
        }
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_examples() {
        let c1 = cyclic_table(1);
        assert_eq!(c1.num_chars(), 1);
        assert!(c1.value(0, 0).is_one());
        let c2 = cyclic_table(2);
        assert_eq!(c2.value(1, 1), &CycNum::from_int(1, -1));
        let c4 = cyclic_table(4);
        assert_eq!(c4.value(1, 1), &CycNum::root_of_unity(4, 1));
        assert_eq!(c4.value(1, 2), &CycNum::from_int(4, -1));
    }

    #[test]
    fn a4_examples() {
        let t = a4_table();
        let row: Vec<CycNum> = [3, -1, 0, 0].iter().map(|&v| CycNum::from_int(3, v)).collect();
        assert_eq!(t.row(3), row.as_slice());
        assert_eq!(t.value(1, 3), &CycNum::root_of_unity(3, 2));
        let chi4 = basis_vector(&t, 3);
        assert!(inner_product(&t, &chi4, &chi4).is_one());
        let chi1 = basis_vector(&t, 0);
        assert!(inner_product(&t, &chi1, &chi4).is_zero());
        let sum: Vec<CycNum> = chi1.iter().zip(&chi4).map(|(a, b)| a + b).collect();
        assert!(inner_product(&t, &sum, &chi4).is_one());
        assert!(inner_product(&t, &chi1, &chi1).is_one());
    }

    #[test]
    fn a5_examples() {
        let t = a5_table();
        assert_eq!(t.degrees(), vec![1, 3, 3, 4, 5]);
        assert!(t.value(3, 1).is_zero());
        assert_eq!(t.value(4, 2), &CycNum::from_int(1, -1));
        let sizes: Vec<u64> = t.classes().iter().map(|c| c.size).collect();
        assert_eq!(sizes, vec![1, 15, 20, 12, 12]);
    }

    #[test]
    fn a5_permutation_character_oracle() {
        // The natural 5-point permutation character counts fixed points:
        // (), (12)(34), (123), (12345) fix 5, 1, 2, 0 points. Minus the
        // trivial character it is the degree-4 irreducible.
        let t = a5_table();
        let fixed = [5, 1, 2, 0, 0];
        for (j, f) in fixed.iter().enumerate() {
            assert_eq!(t.value(3, j), &CycNum::from_int(1, f - 1));
        }
        // The degree-5 character is the permutation character on the 6
        // Sylow-5 subgroups minus the trivial one: fixed counts 6, 2, 0, 1, 1.
        let sylow = [6, 2, 0, 1, 1];
        for (j, f) in sylow.iter().enumerate() {
            assert_eq!(t.value(4, j), &CycNum::from_int(1, f - 1));
        }
    }

    #[test]
    fn products() {
        let c2 = cyclic_table(2);
        let k4 = product_table(&c2, &c2);
        assert_eq!(k4.num_chars(), 4);
        for a in 0..4 {
            for j in 0..4 {
                let v = k4.value(a, j).to_rational().unwrap();
                assert!(v == BigRational::from_integer(1.into()) || v == BigRational::from_integer((-1).into()));
            }
        }
        let p = product_table(&cyclic_table(4), &a4_table());
        assert_eq!((p.num_chars(), p.classes().len(), p.group_order()), (16, 16, 48));
        // (θ1 ⊗ χ4)((x, (12)(34))) = -ζ4
        assert_eq!(p.value(4 + 3, 4 + 1), &-CycNum::root_of_unity(4, 1));
        assert_eq!(p.conductor(), 12);
    }

    #[test]
    fn degree_squares_sum_to_order() {
        for t in [
            a4_table(),
            a5_table(),
            cyclic_table(8),
            product_table(&cyclic_table(4), &a5_table()),
        ] {
            let s: u64 = t.degrees().iter().map(|d| d * d).sum();
            assert_eq!(s, t.group_order(), "{}", t.group_label());
        }
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let t = a4_table();
        let mut values: Vec<Vec<CycNum>> = (0..4).map(|a| t.row(a).to_vec()).collect();
        values[1][2] = CycNum::from_int(3, 1);
        assert!(CharTable::new("bad", 12, 3, t.classes().to_vec(), values).is_err());
    }

    #[test]
    fn embedding_examples() {
        let e = index2_embedding(1, Cofactor::A4).unwrap();
        assert_eq!(e.sub.group_order(), 12);
        assert_eq!(e.class_map[0], 0);
        let e2 = index2_embedding(2, Cofactor::A4).unwrap();
        // (y, (123)) ↦ (x^2, (123))
        assert_eq!(e2.class_map[4 + 2], 2 * 4 + 2);
        assert_eq!(e2.sub.classes()[6].label, "(x^1,(123))");
        assert_eq!(e2.sup.classes()[10].label, "(x^2,(123))");
        for n in 1..=3 {
            for h in [Cofactor::A4, Cofactor::A5, Cofactor::Trivial] {
                assert_eq!(index2_embedding(n, h).unwrap().index, 2);
            }
        }
    }

    #[test]
    fn restriction_examples() {
        let e = index2_embedding(1, Cofactor::A4).unwrap();
        // θ1 ⊗ χ4 restricts to χ4
        assert_eq!(restrict_character(&e, 4 + 3).unwrap(), vec![0, 0, 0, 1]);
        for m in 0..4 {
            assert_eq!(
                restrict_character(&e, m).unwrap(),
                restrict_character(&e, 4 + m).unwrap()
            );
        }
        let e2 = index2_embedding(2, Cofactor::A4).unwrap();
        for chi in 0..16 {
            let r = restrict_character(&e2, chi).unwrap();
            assert_eq!(r.iter().sum::<u64>(), 1, "restriction of {chi} is irreducible");
            // θ_i ⊗ χ_m restricts to θ̄_{i mod 2} ⊗ χ_m
            let (i, m) = (chi / 4, chi % 4);
            assert_eq!(r[(i % 2) * 4 + m], 1);
        }
    }

    #[test]
    fn group_spec_parsing() {
        assert_eq!("a4".parse::<GroupSpec>().unwrap(), GroupSpec::A4);
        assert_eq!("cyclic:8".parse::<GroupSpec>().unwrap(), GroupSpec::Cyclic(8));
        assert_eq!(
            GroupSpec::from_tokens(&["cyclic:4", "a4"]).unwrap(),
            GroupSpec::Product(Box::new(GroupSpec::Cyclic(4)), Box::new(GroupSpec::A4))
        );
        assert_eq!(
            GroupSpec::from_tokens(&["product", "cyclic:4", "a4"]).unwrap(),
            GroupSpec::from_tokens(&["cyclic", "4", "a4"]).unwrap()
        );
        assert_eq!(GroupSpec::from_tokens(&["cyclic", "8"]).unwrap(), GroupSpec::Cyclic(8));
        assert!(GroupSpec::from_tokens(&["s4"]).is_err());
        assert!("s4".parse::<GroupSpec>().is_err());
        assert!("cyclic:0".parse::<GroupSpec>().is_err());
    }
}
