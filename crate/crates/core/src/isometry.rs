//! Signed bijections between blocks and the perfectness tests.
//!
//! Two checkers decide perfectness independently:
//!
//! * the lattice checker builds `O_P`-bases of `CF(G,B,O)` and
//!   `CF_{p'}(G,B,O)` by Smith reduction and tests that each basis vector of
//!   either side maps into the lattice on the other side;
//! * the μ checker tests integrality and separation of
//!   `μ(g,h) = Σ_χ ε_χ χ(g) · conj(π(χ)(h))`.
//!
//! Conjugation always falls on the second argument and is realized as
//! `ζ ↦ ζ^{-1}`. Both checkers run on integer power-basis coordinates in
//! their inner loops; exact field arithmetic is only used while setting up.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::blocks::{central_character, Block};
use crate::cyclotomic::{field, CycNum, Field, IdealTester, PrimeContext};
use crate::dvr::{self, integral_row, SpanTester};
use crate::error::{Error, Result};

/// `I(χ_i) = signs[i] · ψ_{perm[i]}`, indices local to the two blocks.
#[derive(Clone)]
pub struct SignedBijection {
    source: Arc<Block>,
    target: Arc<Block>,
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedBijection {
    pub fn new(source: Arc<Block>, target: Arc<Block>, perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let k = source.k();
        if target.k() != k {
            return Err(Error::BlockMismatch(format!(
                "blocks have {k} and {} characters",
                target.k()
            )));
        }
        if perm.len() != k || signs.len() != k {
            return Err(Error::Malformed(
                "perm and signs must have one entry per character".into(),
            ));
        }
        let mut seen = vec![false; k];
        for &p in &perm {
            if p >= k || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Malformed("perm is not a bijection".into()));
            }
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Malformed("signs must be +1 or -1".into()));
        }
        Ok(SignedBijection {
            source,
            target,
            perm,
            signs,
        })
    }

    pub fn identity(block: &Arc<Block>) -> Self {
        let k = block.k();
        SignedBijection {
            source: Arc::clone(block),
            target: Arc::clone(block),
            perm: (0..k).collect(),
            signs: vec![1; k],
        }
    }

    /// `χ ↦ −χ` for every character.
    pub fn negation(block: &Arc<Block>) -> Self {
        let mut i = Self::identity(block);
        i.signs.fill(-1);
        i
    }

    pub fn source(&self) -> &Arc<Block> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Block> {
        &self.target
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_identity(&self) -> bool {
        self.source.same_as(&self.target)
            && self.perm.iter().enumerate().all(|(i, &p)| i == p)
            && self.signs.iter().all(|&s| s == 1)
    }

    /// Image of an integer coordinate vector.
    pub fn map_int(&self, a: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); a.len()];
        for (i, x) in a.iter().enumerate() {
            out[self.perm[i]] = if self.signs[i] > 0 { x.clone() } else { -x };
        }
        out
    }

    /// Image of a coordinate vector over the field (the `K`-linear extension).
    pub fn map_field(&self, a: &[CycNum]) -> Vec<CycNum> {
        let mut out = a.to_vec();
        for (i, x) in a.iter().enumerate() {
            out[self.perm[i]] = if self.signs[i] > 0 { x.clone() } else { -x };
        }
        out
    }

    fn same_key(&self, other: &Self) -> bool {
        self.perm == other.perm && self.signs == other.signs
    }
}

impl PartialEq for SignedBijection {
    fn eq(&self, other: &Self) -> bool {
        self.same_key(other) && self.source.same_as(&other.source) && self.target.same_as(&other.target)
    }
}

impl Eq for SignedBijection {}

impl Hash for SignedBijection {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.perm.hash(state);
        self.signs.hash(state);
    }
}

impl PartialOrd for SignedBijection {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: lexicographic on `perm`, then on `signs`.
impl Ord for SignedBijection {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.perm, &self.signs).cmp(&(&other.perm, &other.signs))
    }
}

impl fmt::Debug for SignedBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignedBijection{{perm: {:?}, signs: {:?}}}", self.perm, self.signs)
    }
}

impl Serialize for SignedBijection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            perm: &'a [usize],
            signs: &'a [i8],
        }
        Wire {
            perm: &self.perm,
            signs: &self.signs,
        }
        .serialize(s)
    }
}

/// `J ∘ I`.
pub fn compose(i: &SignedBijection, j: &SignedBijection) -> Result<SignedBijection> {
    if !i.target.same_as(&j.source) {
        return Err(Error::BlockMismatch(
            "codomain of the first map is not the domain of the second".into(),
        ));
    }
    let perm = i.perm.iter().map(|&p| j.perm[p]).collect();
    let signs = i.perm.iter().zip(&i.signs).map(|(&p, &s)| s * j.signs[p]).collect();
    Ok(SignedBijection {
        source: Arc::clone(&i.source),
        target: Arc::clone(&j.target),
        perm,
        signs,
    })
}

pub fn invert(i: &SignedBijection) -> SignedBijection {
    let k = i.perm.len();
    let mut perm = vec![0; k];
    let mut signs = vec![1; k];
    for (a, (&p, &s)) in i.perm.iter().zip(&i.signs).enumerate() {
        perm[p] = a;
        signs[p] = s;
    }
    SignedBijection {
        source: Arc::clone(&i.target),
        target: Arc::clone(&i.source),
        perm,
        signs,
    }
}

/// `θ ⊗ χ ↦ (ε_θ ε_χ) I1(θ) ⊗ I2(χ)` between blocks of product tables whose
/// character `a ⊗ b` has index `a · k2 + b`.
pub fn tensor(
    i1: &SignedBijection,
    i2: &SignedBijection,
    source: &Arc<Block>,
    target: &Arc<Block>,
) -> Result<SignedBijection> {
    let k2s = i2.source.table().num_chars();
    let k2t = i2.target.table().num_chars();
    if source.table().num_chars() != i1.source.table().num_chars() * k2s
        || target.table().num_chars() != i1.target.table().num_chars() * k2t
    {
        return Err(Error::BlockMismatch(
            "product blocks do not match the factor tables".into(),
        ));
    }
    if source.k() != i1.source.k() * i2.source.k() {
        return Err(Error::BlockMismatch(
            "source block is not the product of the factor blocks".into(),
        ));
    }
    let mut perm = Vec::with_capacity(source.k());
    let mut signs = Vec::with_capacity(source.k());
    for &t in source.char_indices() {
        let (a, b) = (t / k2s, t % k2s);
        let miss = || Error::BlockMismatch(format!("character {t} is not a product of block characters"));
        let pa = i1.source.position(a).ok_or_else(miss)?;
        let pb = i2.source.position(b).ok_or_else(miss)?;
        let ta = i1.target.char_indices()[i1.perm[pa]];
        let tb = i2.target.char_indices()[i2.perm[pb]];
        let image = target
            .position(ta * k2t + tb)
            .ok_or_else(|| Error::BlockMismatch(format!("image of {t} lies outside the target block")))?;
        perm.push(image);
        signs.push(i1.signs[pa] * i2.signs[pb]);
    }
    SignedBijection::new(Arc::clone(source), Arc::clone(target), perm, signs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MuCondition {
    SourceIntegrality,
    TargetIntegrality,
    Separation,
}

/// One reason a candidate fails.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Mu {
        g_class: usize,
        h_class: usize,
        condition: MuCondition,
    },
    Lattice {
        pprime: bool,
        direction: Direction,
        generator: usize,
        class: usize,
    },
    Central {
        direction: Direction,
        class: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerfectionReport {
    pub verdict: bool,
    pub failures: Vec<Witness>,
}

impl PerfectionReport {
    fn from_failures(mut failures: Vec<Witness>) -> Self {
        failures.sort();
        failures.dedup();
        PerfectionReport {
            verdict: failures.is_empty(),
            failures,
        }
    }
}

/// An `O_P`-lattice of class functions in coordinates over `Irr(B)`.
#[derive(Clone, Debug)]
pub struct DvrLattice {
    context: PrimeContext,
    ambient_dim: usize,
    generators: Vec<Vec<CycNum>>,
    /// `values[g][i] = χ_i(g)` over all classes of the group.
    values: Vec<Vec<CycNum>>,
    /// Classes on which members must vanish (empty for `CF`).
    vanish: Vec<bool>,
}

impl DvrLattice {
    pub fn context(&self) -> &PrimeContext {
        &self.context
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[Vec<CycNum>] {
        &self.generators
    }

    /// Direct test of the defining conditions: integral values, and zero on
    /// the vanishing classes.
    pub fn contains(&self, a: &[CycNum]) -> bool {
        let m = self.context.conductor();
        self.values.iter().enumerate().all(|(g, row)| {
            let mut y = CycNum::zero(m);
            for (v, x) in row.iter().zip(a) {
                if !x.is_zero() {
                    y += &(v * x);
                }
            }
            if self.vanish.get(g).copied().unwrap_or(false) {
                y.is_zero()
            } else {
                self.context.is_integral(&y)
            }
        })
    }

    /// Membership through the generators: `a` lies in their `R`-span.
    pub fn contains_by_generators(&self, a: &[CycNum]) -> Result<bool> {
        Ok(dvr::r_span(&self.context, self.ambient_dim, &self.generators)?.contains(a))
    }
}

fn check_conductor(b: &Block, ctx: &PrimeContext) -> Result<()> {
    if ctx.conductor() % b.table().conductor() != 0 {
        return Err(Error::ConductorMismatch {
            from: b.table().conductor(),
            to: ctx.conductor(),
        });
    }
    Ok(())
}

fn value_matrix(b: &Block, conductor: u32) -> Result<Vec<Vec<CycNum>>> {
    let t = b.table();
    (0..t.classes().len())
        .map(|g| {
            b.char_indices()
                .iter()
                .map(|&c| t.value(c, g).lift(conductor))
                .collect()
        })
        .collect()
}

fn prj_field_rows(b: &Block, conductor: u32) -> Vec<Vec<CycNum>> {
    b.prj_basis()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| CycNum::from_rational(conductor, &num_rational::BigRational::from_integer(x.clone())))
                .collect()
        })
        .collect()
}

/// `CF(G,B,O_P)`, or `CF_{p'}(G,B,O_P)` when `pprime_only`.
pub fn cf_lattice(b: &Block, ctx: &PrimeContext, pprime_only: bool) -> Result<DvrLattice> {
    check_conductor(b, ctx)?;
    let m = ctx.conductor();
    let values = value_matrix(b, m)?;
    let k = b.k();
    let (generators, vanish) = if !pprime_only {
        (dvr::preimage_basis(ctx, &values)?, Vec::new())
    } else {
        // members are K-combinations of the prj basis rows with integral values
        let kb = prj_field_rows(b, m);
        let w: Vec<Vec<CycNum>> = values
            .iter()
            .map(|row| {
                kb.iter()
                    .map(|p| row.iter().zip(p).fold(CycNum::zero(m), |acc, (v, x)| acc + v * x))
                    .collect()
            })
            .collect();
        let coords = dvr::preimage_basis(ctx, &w)?;
        let gens = coords
            .iter()
            .map(|c| {
                (0..k)
                    .map(|i| c.iter().zip(&kb).fold(CycNum::zero(m), |acc, (y, p)| acc + y * &p[i]))
                    .collect()
            })
            .collect();
        let vanish = b.table().classes().iter().map(|cl| !cl.is_2regular).collect();
        (gens, vanish)
    };
    Ok(DvrLattice {
        context: ctx.clone(),
        ambient_dim: k,
        generators,
        values,
        vanish,
    })
}

/// `R`-generators of `CF(G,B,O_P)` written as `α / 2^s` (after multiplying by
/// an odd integer, which is a unit) with `α` reduced modulo `2^s`. Subtracting
/// integral vectors does not change the outcome of an inclusion test because
/// every signed bijection maps integral vectors to integral vectors.
struct IntGen {
    coeffs: Vec<Vec<i64>>,
    shift: u32,
    pprime: bool,
}

fn reduce_row(row: &[CycNum], reduce: bool) -> Result<Option<(Vec<Vec<i64>>, u32)>> {
    let ir =
        integral_row(row).ok_or_else(|| Error::Unsupported("lattice generator exceeds 64-bit coordinates".into()))?;
    let shift = ir.shift() as u32;
    if !reduce {
        return Ok(Some((ir.coeffs, shift)));
    }
    if shift >= 62 {
        return Err(Error::Unsupported("lattice generator denominator too large".into()));
    }
    let modulus = 1i64 << shift;
    let coeffs: Vec<Vec<i64>> = ir
        .coeffs
        .iter()
        .map(|c| c.iter().map(|x| x.rem_euclid(modulus)).collect())
        .collect();
    if coeffs.iter().flatten().all(|&x| x == 0) {
        return Ok(None);
    }
    Ok(Some((coeffs, shift)))
}

fn int_generators(b: &Block, ctx: &PrimeContext) -> Result<Vec<IntGen>> {
    let m = ctx.conductor();
    let mut out = Vec::new();
    for g in cf_lattice(b, ctx, false)?.generators {
        if let Some((coeffs, shift)) = reduce_row(&g, true)? {
            out.push(IntGen {
                coeffs,
                shift,
                pprime: false,
            });
        }
    }
    // CF_{p'}: reduce in prj coordinates, where dropped parts are integral
    // combinations of prj rows; those rows are added back as generators.
    let values = value_matrix(b, m)?;
    let kb = prj_field_rows(b, m);
    let w: Vec<Vec<CycNum>> = values
        .iter()
        .map(|row| {
            kb.iter()
                .map(|p| row.iter().zip(p).fold(CycNum::zero(m), |acc, (v, x)| acc + v * x))
                .collect()
        })
        .collect();
    let phi = ctx.field().degree();
    let prj: Vec<Vec<i64>> =
        crate::intmat::to_i64(b.prj_basis()).ok_or_else(|| Error::Unsupported("prj basis exceeds 64 bits".into()))?;
    for c in dvr::preimage_basis(ctx, &w)? {
        if let Some((beta, shift)) = reduce_row(&c, true)? {
            let coeffs = (0..b.k())
                .map(|i| {
                    let mut v = vec![0i64; phi];
                    for (bj, row) in beta.iter().zip(&prj) {
                        for (x, y) in v.iter_mut().zip(bj) {
                            *x += row[i] * y;
                        }
                    }
                    v
                })
                .collect();
            out.push(IntGen {
                coeffs,
                shift,
                pprime: true,
            });
        }
    }
    for row in &prj {
        let coeffs = row
            .iter()
            .map(|&a| {
                let mut v = vec![0i64; phi];
                v[0] = a;
                v
            })
            .collect();
        out.push(IntGen {
            coeffs,
            shift: 0,
            pprime: true,
        });
    }
    Ok(out)
}

/// Integral power-basis coordinates of the block's values, `[local char][class]`.
fn int_values(b: &Block, conductor: u32) -> Result<Vec<Vec<Vec<i64>>>> {
    let t = b.table();
    b.char_indices()
        .iter()
        .map(|&c| {
            (0..t.classes().len())
                .map(|g| {
                    t.value(c, g)
                        .lift(conductor)?
                        .to_int_coeffs()
                        .ok_or_else(|| Error::Malformed("character value is not integral".into()))
                })
                .collect()
        })
        .collect()
}

const CACHE_LIMIT: usize = 1 << 21;

/// Generators of one side evaluated on the other side's characters.
struct LatticeSide {
    fld: Arc<Field>,
    gens: Vec<IntGen>,
    testers: Vec<IdealTester>,
    k: usize,
    classes: usize,
    other: Vec<Vec<Vec<i64>>>,
    other_singular: Vec<bool>,
    cache: Option<Vec<i64>>,
}

impl LatticeSide {
    fn new(ctx: &PrimeContext, gens: Vec<IntGen>, other: Vec<Vec<Vec<i64>>>, other_singular: Vec<bool>) -> Self {
        let fld = Arc::clone(ctx.field());
        let phi = fld.degree();
        let k = other.len();
        let classes = other_singular.len();
        let testers = gens
            .iter()
            .map(|g| ctx.ideal_tester((g.shift * ctx.e()) as usize))
            .collect();
        let size = gens.len() * k * k * classes * phi;
        let cache = (size <= CACHE_LIMIT).then(|| {
            let mut c = Vec::with_capacity(size);
            for g in &gens {
                for alpha in &g.coeffs {
                    for row in &other {
                        for v in row {
                            c.extend(fld.mul_int(alpha, v));
                        }
                    }
                }
            }
            c
        });
        LatticeSide {
            fld,
            gens,
            testers,
            k,
            classes,
            other,
            other_singular,
            cache,
        }
    }

    fn eval(&self, g: usize, perm: &[usize], signs: &[i8], acc: &mut [i64]) {
        acc.fill(0);
        let phi = self.fld.degree();
        let width = self.classes * phi;
        for i in 0..self.k {
            let sign = signs[i] as i64;
            match &self.cache {
                Some(cache) => {
                    let base = ((g * self.k + i) * self.k + perm[i]) * width;
                    for (a, b) in acc.iter_mut().zip(&cache[base..base + width]) {
                        *a += sign * b;
                    }
                }
                None => {
                    let alpha = &self.gens[g].coeffs[i];
                    if alpha.iter().all(|&x| x == 0) {
                        continue;
                    }
                    for (h, v) in self.other[perm[i]].iter().enumerate() {
                        let p = self.fld.mul_int(alpha, v);
                        for (a, b) in acc[h * phi..(h + 1) * phi].iter_mut().zip(p) {
                            *a += sign * b;
                        }
                    }
                }
            }
        }
    }

    /// Failing `(generator, class)` pairs; stops at the first when `fail_fast`.
    fn check(&self, perm: &[usize], signs: &[i8], fail_fast: bool) -> Vec<(usize, bool, usize)> {
        let phi = self.fld.degree();
        let mut acc = vec![0i64; self.classes * phi];
        let mut out = Vec::new();
        for (g, gen) in self.gens.iter().enumerate() {
            self.eval(g, perm, signs, &mut acc);
            for h in 0..self.classes {
                let y = &acc[h * phi..(h + 1) * phi];
                let ok = if gen.pprime && self.other_singular[h] {
                    y.iter().all(|&x| x == 0)
                } else {
                    self.testers[g].contains(y)
                };
                if !ok {
                    out.push((g, gen.pprime, h));
                    if fail_fast {
                        return out;
                    }
                }
            }
        }
        out
    }
}

struct MuEngine {
    fld: Arc<Field>,
    k: usize,
    cg: usize,
    ch: usize,
    x: Vec<Vec<Vec<i64>>>,
    y_conj: Vec<Vec<Vec<i64>>>,
    /// `[g][h]`: tester for `max(v_2|C_G(g)|, v_2|C_H(h)|)`, plus which side attains it
    thresholds: Vec<Vec<(IdealTester, IdealTester)>>,
    must_vanish: Vec<Vec<bool>>,
    cache: Option<Vec<i64>>,
}

impl MuEngine {
    fn new(ctx: &PrimeContext, source: &Block, target: &Block) -> Result<Self> {
        let m = ctx.conductor();
        let fld = Arc::clone(ctx.field());
        let phi = fld.degree();
        let x = int_values(source, m)?;
        let y_conj: Vec<Vec<Vec<i64>>> = int_values(target, m)?
            .into_iter()
            .map(|r| r.into_iter().map(|v| fld.galois_int(&v, -1)).collect())
            .collect();
        let gcl = source.table().classes();
        let hcl = target.table().classes();
        let e = ctx.e() as usize;
        let thresholds = gcl
            .iter()
            .map(|g| {
                hcl.iter()
                    .map(|h| {
                        (
                            ctx.ideal_tester(e * g.centralizer_order.trailing_zeros() as usize),
                            ctx.ideal_tester(e * h.centralizer_order.trailing_zeros() as usize),
                        )
                    })
                    .collect()
            })
            .collect();
        let must_vanish = gcl
            .iter()
            .map(|g| hcl.iter().map(|h| g.is_2regular != h.is_2regular).collect())
            .collect();
        let (k, cg, ch) = (x.len(), gcl.len(), hcl.len());
        let size = k * cg * k * ch * phi;
        let cache = (size <= CACHE_LIMIT).then(|| {
            let mut c = Vec::with_capacity(size);
            for xi in &x {
                for xg in xi {
                    for ym in &y_conj {
                        for yh in ym {
                            c.extend(fld.mul_int(xg, yh));
                        }
                    }
                }
            }
            c
        });
        Ok(MuEngine {
            fld,
            k,
            cg,
            ch,
            x,
            y_conj,
            thresholds,
            must_vanish,
            cache,
        })
    }

    /// Row `μ(g, ·)` as concatenated coordinate vectors.
    fn row(&self, g: usize, perm: &[usize], signs: &[i8], acc: &mut [i64]) {
        acc.fill(0);
        let phi = self.fld.degree();
        let width = self.ch * phi;
        for i in 0..self.k {
            let sign = signs[i] as i64;
            match &self.cache {
                Some(cache) => {
                    let base = ((i * self.cg + g) * self.k + perm[i]) * width;
                    for (a, b) in acc.iter_mut().zip(&cache[base..base + width]) {
                        *a += sign * b;
                    }
                }
                None => {
                    let xg = &self.x[i][g];
                    if xg.iter().all(|&v| v == 0) {
                        continue;
                    }
                    for (h, yh) in self.y_conj[perm[i]].iter().enumerate() {
                        let p = self.fld.mul_int(xg, yh);
                        for (a, b) in acc[h * phi..(h + 1) * phi].iter_mut().zip(p) {
                            *a += sign * b;
                        }
                    }
                }
            }
        }
    }

    fn check(&self, perm: &[usize], signs: &[i8], fail_fast: bool) -> Vec<Witness> {
        let phi = self.fld.degree();
        let mut acc = vec![0i64; self.ch * phi];
        let mut out = Vec::new();
        for g in 0..self.cg {
            self.row(g, perm, signs, &mut acc);
            for h in 0..self.ch {
                let mu = &acc[h * phi..(h + 1) * phi];
                let mut fails = Vec::new();
                if self.must_vanish[g][h] {
                    if mu.iter().any(|&v| v != 0) {
                        fails.push(MuCondition::Separation);
                    }
                } else {
                    let (ts, tt) = &self.thresholds[g][h];
                    if !ts.contains(mu) {
                        fails.push(MuCondition::SourceIntegrality);
                    }
                    if !tt.contains(mu) {
                        fails.push(MuCondition::TargetIntegrality);
                    }
                }
                for condition in fails {
                    out.push(Witness::Mu {
                        g_class: g,
                        h_class: h,
                        condition,
                    });
                    if fail_fast {
                        return out;
                    }
                }
            }
        }
        out
    }
}

/// Both perfectness checkers prepared for one pair of blocks and one prime.
pub struct Checker {
    ctx: PrimeContext,
    source: Arc<Block>,
    target: Arc<Block>,
    forward: LatticeSide,
    backward: LatticeSide,
    mu: MuEngine,
}

fn singular_flags(b: &Block) -> Vec<bool> {
    b.table().classes().iter().map(|c| !c.is_2regular).collect()
}

impl Checker {
    pub fn new(source: &Arc<Block>, target: &Arc<Block>, ctx: &PrimeContext) -> Result<Checker> {
        check_conductor(source, ctx)?;
        check_conductor(target, ctx)?;
        if source.k() != target.k() {
            return Err(Error::BlockMismatch(format!(
                "blocks have {} and {} characters",
                source.k(),
                target.k()
            )));
        }
        let m = ctx.conductor();
        let forward = LatticeSide::new(
            ctx,
            int_generators(source, ctx)?,
            int_values(target, m)?,
            singular_flags(target),
        );
        let backward = if source.same_as(target) {
            LatticeSide::new(
                ctx,
                int_generators(source, ctx)?,
                int_values(source, m)?,
                singular_flags(source),
            )
        } else {
            LatticeSide::new(
                ctx,
                int_generators(target, ctx)?,
                int_values(source, m)?,
                singular_flags(source),
            )
        };
        let mu = MuEngine::new(ctx, source, target)?;
        Ok(Checker {
            ctx: ctx.clone(),
            source: Arc::clone(source),
            target: Arc::clone(target),
            forward,
            backward,
            mu,
        })
    }

    pub fn context(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn source(&self) -> &Arc<Block> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Block> {
        &self.target
    }

    /// Number of lattice generators tested in each direction.
    pub fn generator_counts(&self) -> (usize, usize) {
        (self.forward.gens.len(), self.backward.gens.len())
    }

    fn lattice_failures(&self, perm: &[usize], signs: &[i8], fail_fast: bool) -> Vec<Witness> {
        let mut out: Vec<Witness> = self
            .forward
            .check(perm, signs, fail_fast)
            .into_iter()
            .map(|(generator, pprime, class)| Witness::Lattice {
                pprime,
                direction: Direction::Forward,
                generator,
                class,
            })
            .collect();
        if fail_fast && !out.is_empty() {
            return out;
        }
        let k = perm.len();
        let mut inv = vec![0; k];
        let mut inv_signs = vec![1; k];
        for i in 0..k {
            inv[perm[i]] = i;
            inv_signs[perm[i]] = signs[i];
        }
        out.extend(
            self.backward
                .check(&inv, &inv_signs, fail_fast)
                .into_iter()
                .map(|(generator, pprime, class)| Witness::Lattice {
                    pprime,
                    direction: Direction::Backward,
                    generator,
                    class,
                }),
        );
        out
    }

    /// Lattice verdict for raw local `perm`/`signs`, stopping at the first failure.
    pub fn lattice_verdict(&self, perm: &[usize], signs: &[i8]) -> bool {
        self.lattice_failures(perm, signs, true).is_empty()
    }

    pub fn mu_verdict(&self, perm: &[usize], signs: &[i8]) -> bool {
        self.mu.check(perm, signs, true).is_empty()
    }

    pub fn lattice_report(&self, i: &SignedBijection) -> PerfectionReport {
        PerfectionReport::from_failures(self.lattice_failures(&i.perm, &i.signs, false))
    }

    pub fn mu_report(&self, i: &SignedBijection) -> PerfectionReport {
        PerfectionReport::from_failures(self.mu.check(&i.perm, &i.signs, false))
    }

    /// `(lattice verdict, μ verdict)`.
    pub fn both(&self, i: &SignedBijection) -> (bool, bool) {
        (
            self.lattice_verdict(&i.perm, &i.signs),
            self.mu_verdict(&i.perm, &i.signs),
        )
    }

    pub fn matches(&self, i: &SignedBijection) -> bool {
        i.source.same_as(&self.source) && i.target.same_as(&self.target)
    }
}

/// Definition-level checker: `I_K` maps `CF` and `CF_{p'}` lattices onto each other.
pub fn is_perfect_lattice(i: &SignedBijection, ctx: &PrimeContext) -> Result<PerfectionReport> {
    Ok(Checker::new(&i.source, &i.target, ctx)?.lattice_report(i))
}

/// Integrality and separation of `μ`.
pub fn is_perfect_mu(i: &SignedBijection, ctx: &PrimeContext) -> Result<PerfectionReport> {
    Ok(Checker::new(&i.source, &i.target, ctx)?.mu_report(i))
}

/// `μ(g,h) = Σ_χ ε_χ χ(g) · conj(π(χ)(h))` over the classes of both groups.
pub fn mu_matrix(i: &SignedBijection) -> Result<Vec<Vec<CycNum>>> {
    let ts = i.source.table();
    let tt = i.target.table();
    let m = num_integer::lcm(ts.conductor(), tt.conductor());
    let mut out = vec![vec![CycNum::zero(m); tt.classes().len()]; ts.classes().len()];
    for (a, &chi) in i.source.char_indices().iter().enumerate() {
        let psi = i.target.char_indices()[i.perm[a]];
        for (g, row) in out.iter_mut().enumerate() {
            let xg = ts.value(chi, g).lift(m)?;
            for (h, cell) in row.iter_mut().enumerate() {
                let term = &xg * &tt.value(psi, h).lift(m)?.conj();
                if i.signs[a] > 0 {
                    *cell += &term;
                } else {
                    *cell -= &term;
                }
            }
        }
    }
    Ok(out)
}

/// Central-character vectors `(ω_χ(Ĉ))_{χ ∈ B}` for every class, as field elements.
fn central_vectors(b: &Block, conductor: u32) -> Result<Vec<Vec<CycNum>>> {
    let per_char: Vec<Vec<CycNum>> = b
        .char_indices()
        .iter()
        .map(|&c| central_character(b.table(), c, conductor))
        .collect::<Result<_>>()?;
    Ok((0..b.table().classes().len())
        .map(|g| per_char.iter().map(|w| w[g].clone()).collect())
        .collect())
}

fn to_int(v: &[CycNum]) -> Result<Vec<Vec<i64>>> {
    v.iter()
        .map(|x| {
            x.to_int_coeffs()
                .ok_or_else(|| Error::Malformed("central character is not integral".into()))
        })
        .collect()
}

/// Tests whether the idempotent bijection `e_χ ↦ e_{π(χ)}` carries `Z(B)` onto
/// `Z(C)`, both written in idempotent coordinates as `R`-spans of class-sum vectors.
pub struct CentralChecker {
    source_vectors: Vec<Vec<Vec<i64>>>,
    target_vectors: Vec<Vec<Vec<i64>>>,
    source_span: SpanTester,
    target_span: SpanTester,
    source: Arc<Block>,
    target: Arc<Block>,
}

impl CentralChecker {
    pub fn new(source: &Arc<Block>, target: &Arc<Block>, ctx: &PrimeContext) -> Result<Self> {
        check_conductor(source, ctx)?;
        check_conductor(target, ctx)?;
        let m = ctx.conductor();
        let sv = central_vectors(source, m)?;
        let tv = central_vectors(target, m)?;
        let tester = |b: &Block, v: &[Vec<CycNum>]| -> Result<SpanTester> {
            dvr::r_span(ctx, b.k(), v)?
                .int_tester()
                .ok_or_else(|| Error::Unsupported("centre span transform exceeds 64 bits".into()))
        };
        Ok(CentralChecker {
            source_span: tester(source, &sv)?,
            target_span: tester(target, &tv)?,
            source_vectors: sv.iter().map(|v| to_int(v)).collect::<Result<_>>()?,
            target_vectors: tv.iter().map(|v| to_int(v)).collect::<Result<_>>()?,
            source: Arc::clone(source),
            target: Arc::clone(target),
        })
    }

    pub fn check(&self, i: &SignedBijection) -> PerfectionReport {
        let mut failures = Vec::new();
        for (class, v) in self.source_vectors.iter().enumerate() {
            let mut w = v.clone();
            for (a, x) in v.iter().enumerate() {
                w[i.perm[a]] = x.clone();
            }
            if !self.target_span.contains(&w) {
                failures.push(Witness::Central {
                    direction: Direction::Forward,
                    class,
                });
            }
        }
        for (class, v) in self.target_vectors.iter().enumerate() {
            let w: Vec<Vec<i64>> = (0..v.len()).map(|a| v[i.perm[a]].clone()).collect();
            if !self.source_span.contains(&w) {
                failures.push(Witness::Central {
                    direction: Direction::Backward,
                    class,
                });
            }
        }
        PerfectionReport::from_failures(failures)
    }

    pub fn matches(&self, i: &SignedBijection) -> bool {
        i.source.same_as(&self.source) && i.target.same_as(&self.target)
    }
}

/// Induced centre map test; signs are ignored since idempotents are sign-blind.
pub fn central_iso_check(i: &SignedBijection, ctx: &PrimeContext) -> Result<PerfectionReport> {
    Ok(CentralChecker::new(&i.source, &i.target, ctx)?.check(i))
}

/// `v_2(|G| / χ(1))` for each character of the block.
pub fn codegree_valuations(b: &Block) -> Vec<u32> {
    let order = b.table().group_order();
    b.char_indices()
        .iter()
        .map(|&c| (order / b.table().degree(c)).trailing_zeros())
        .collect()
}

/// Whether the image of `Zprj(source)` is exactly `Zprj(target)`.
pub fn preserves_prj(i: &SignedBijection) -> bool {
    let image: Vec<Vec<BigInt>> = i.source.prj_basis().iter().map(|r| i.map_int(r)).collect();
    crate::intmat::hnf(&image) == *i.target.prj_basis()
}

/// Elementwise field of the context, for callers building vectors by hand.
pub fn context_field(ctx: &PrimeContext) -> Arc<Field> {
    field(ctx.conductor())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{partition_blocks, principal_block};
    use crate::chartab::{a4_table, a5_table, cyclic_table};
    use crate::cyclotomic::prime_context;
    use num_rational::BigRational;

    fn block_of(t: crate::chartab::CharTable, m: u32) -> (Arc<Block>, PrimeContext) {
        let ctx = prime_context(m, 0).unwrap();
        let b = principal_block(&Arc::new(t), &ctx).unwrap();
        (Arc::new(b), ctx)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn c2_lattice_examples() {
        let (b, ctx) = block_of(cyclic_table(2), 2);
        let cf = cf_lattice(&b, &ctx, false).unwrap();
        let half = |n| CycNum::from_rational(2, &q(n, 2));
        assert!(cf.contains(&[half(1), half(-1)]));
        assert!(!cf.contains(&[half(1), CycNum::zero(2)]));
        assert!(cf.contains_by_generators(&[half(1), half(-1)]).unwrap());
        assert!(!cf.contains_by_generators(&[half(1), CycNum::zero(2)]).unwrap());
        for g in cf.generators() {
            assert!(cf.contains(g));
        }
    }

    #[test]
    fn c2_sign_flip_is_not_perfect() {
        let (b, ctx) = block_of(cyclic_table(2), 2);
        let flip = SignedBijection::new(Arc::clone(&b), Arc::clone(&b), vec![0, 1], vec![1, -1]).unwrap();
        let rl = is_perfect_lattice(&flip, &ctx).unwrap();
        let rm = is_perfect_mu(&flip, &ctx).unwrap();
        assert!(!rl.verdict);
        assert!(!rm.verdict);
        assert!(rl
            .failures
            .iter()
            .any(|w| matches!(w, Witness::Lattice { pprime: true, .. })));
        assert!(!preserves_prj(&flip));
    }

    #[test]
    fn identity_and_negation_are_perfect() {
        for (t, m) in [(cyclic_table(4), 4), (a4_table(), 3), (a5_table(), 15)] {
            let (b, ctx) = block_of(t, m);
            for i in [SignedBijection::identity(&b), SignedBijection::negation(&b)] {
                assert!(is_perfect_lattice(&i, &ctx).unwrap().verdict);
                assert!(is_perfect_mu(&i, &ctx).unwrap().verdict);
                assert!(central_iso_check(&i, &ctx).unwrap().verdict);
            }
        }
    }

    #[test]
    fn mu_examples() {
        let (b, _) = block_of(cyclic_table(2), 2);
        let mu = mu_matrix(&SignedBijection::identity(&b)).unwrap();
        let n = |v| CycNum::from_int(1, v);
        assert_eq!(mu[0][0], n(2));
        assert_eq!(mu[0][1], n(0));
        assert_eq!(mu[1][1], n(2));
        let (b, _) = block_of(a4_table(), 3);
        let mu = mu_matrix(&SignedBijection::identity(&b)).unwrap();
        assert_eq!(mu[0][0], n(12));
        assert!(mu[2][1].is_zero());
        for (g, cl) in b.table().classes().iter().enumerate() {
            assert_eq!(mu[g][g], n(cl.centralizer_order as i64));
        }
    }

    #[test]
    fn a4_examples() {
        let (b, ctx) = block_of(a4_table(), 3);
        let swap = SignedBijection::new(Arc::clone(&b), Arc::clone(&b), vec![1, 0, 2, 3], vec![1; 4]).unwrap();
        let chk = Checker::new(&b, &b, &ctx).unwrap();
        assert_eq!(chk.both(&swap), (true, true));
        let bad = SignedBijection::new(Arc::clone(&b), Arc::clone(&b), vec![0, 1, 2, 3], vec![1, 1, 1, -1]).unwrap();
        assert_eq!(chk.both(&bad), (false, false));
        // (1/12)(χ1 + χ2 + χ3 + 3χ4) is the indicator of the identity class;
        // with 9χ4 instead the value at 1 is 5/2
        let cf = cf_lattice(&b, &ctx, false).unwrap();
        let elt = |c: [i64; 4]| -> Vec<CycNum> { c.iter().map(|&n| CycNum::from_rational(3, &q(n, 12))).collect() };
        assert!(cf.contains(&elt([1, 1, 1, 3])));
        assert!(cf.contains_by_generators(&elt([1, 1, 1, 3])).unwrap());
        assert!(!cf.contains(&elt([1, 1, 1, 9])));
        assert!(!cf.contains_by_generators(&elt([1, 1, 1, 9])).unwrap());
    }

    #[test]
    fn compose_invert_roundtrip() {
        let (b, _) = block_of(a4_table(), 3);
        let i = SignedBijection::new(Arc::clone(&b), Arc::clone(&b), vec![3, 1, 2, 0], vec![-1, 1, 1, -1]).unwrap();
        assert!(compose(&i, &invert(&i)).unwrap().is_identity());
        assert!(compose(&invert(&i), &i).unwrap().is_identity());
    }

    #[test]
    fn projection_vectors_span_cf() {
        // CF(G,B,O) is the R-span of the block projections of class indicators
        for (t, m) in [(cyclic_table(4), 4), (a4_table(), 3), (a5_table(), 15)] {
            let ctx = prime_context(m, 0).unwrap();
            let t = Arc::new(t);
            for b in partition_blocks(&t, &ctx).unwrap() {
                let cf = cf_lattice(&b, &ctx, false).unwrap();
                let proj: Vec<Vec<CycNum>> = t
                    .classes()
                    .iter()
                    .enumerate()
                    .map(|(g, cl)| {
                        b.char_indices()
                            .iter()
                            .map(|&c| {
                                t.value(c, g)
                                    .lift(m)
                                    .unwrap()
                                    .conj()
                                    .scale(&q(1, cl.centralizer_order as i64))
                            })
                            .collect()
                    })
                    .collect();
                let span = dvr::r_span(&ctx, b.k(), &proj).unwrap();
                for g in cf.generators() {
                    assert!(span.contains(g));
                }
                for p in &proj {
                    assert!(cf.contains_by_generators(p).unwrap());
                }
            }
        }
    }
}
