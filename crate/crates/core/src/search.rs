//! Enumeration of perfect isometries.
//!
//! `Exhaustive` walks every signed bijection (`k ≤ 8`), pruning on codegree
//! valuations, then applies the prj-lattice image test and finally both
//! checkers. `ProofGuided` reproduces the case analysis for the model blocks:
//! `A4`, `C_{2^n}` and `C_{2^n} × A4`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::blocks::Block;
use crate::chartab::{a4_table, cyclic_table};
use crate::cyclotomic::{prime_context, root_sum_classify, CycNum, PrimeContext};
use crate::error::{Error, Result};
use crate::intmat;
use crate::isometry::{codegree_valuations, compose, invert, tensor, Checker, SignedBijection};

pub const EXHAUSTIVE_MAX_K: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Exhaustive,
    ProofGuided,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "proof-guided" | "proof" => Ok(Strategy::ProofGuided),
            _ => Err(Error::Malformed(format!("unknown strategy `{s}`"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::ProofGuided => "proof-guided",
        })
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub node_limit: Option<u64>,
    pub parallel_width: usize,
}

impl SearchConfig {
    pub fn new(strategy: Strategy) -> Self {
        SearchConfig {
            strategy,
            node_limit: None,
            parallel_width: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GroupReport {
    pub order: usize,
    pub closure_verified: bool,
    pub expected_family_matched: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnumerationResult {
    pub strategy: Strategy,
    pub isometries: Vec<SignedBijection>,
    pub count: usize,
    pub group_report: Option<GroupReport>,
    /// For cross enumerations: every quotient `J⁻¹ ∘ I` lies in the source self-group
    /// and the sizes agree.
    pub torsor_verified: Option<bool>,
    pub nodes_visited: u64,
    /// Candidates that reached the two full checkers.
    pub examined: u64,
    /// Candidates on which the two checkers disagreed.
    pub disagreements: u64,
    #[serde(skip)]
    pub source: Arc<Block>,
    #[serde(skip)]
    pub target: Arc<Block>,
}

/// The model blocks with a closed-form self-isometry family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockKind {
    A4,
    Cyclic { n: u32 },
    Product { n: u32 },
    Other,
}

fn two_power_exponent(s: &str) -> Option<u32> {
    let m: u32 = s.strip_prefix('C')?.parse().ok()?;
    (m >= 2 && m.is_power_of_two()).then(|| m.trailing_zeros())
}

/// Recognizes whole-table blocks of `A4`, `C_{2^n}` and `C_{2^n} × A4`.
pub fn block_kind(b: &Block) -> BlockKind {
    let t = b.table();
    if b.k() != t.num_chars() {
        return BlockKind::Other;
    }
    let label = t.group_label();
    if label == "A4" {
        return BlockKind::A4;
    }
    if let Some(n) = two_power_exponent(label) {
        return BlockKind::Cyclic { n };
    }
    if let Some(n) = label.strip_suffix("xA4").and_then(two_power_exponent) {
        return BlockKind::Product { n };
    }
    BlockKind::Other
}

const DELTA: [i8; 4] = [1, 1, 1, -1];

/// `χ_j ↦ ε δ_j δ_{σ(j)} χ_{σ(j)}` with `δ = (1,1,1,−1)`; `sigma` is 0-based.
pub fn make_i_sigma_eps(block: &Arc<Block>, sigma: [usize; 4], eps: i8) -> Result<SignedBijection> {
    if block_kind(block) != BlockKind::A4 {
        return Err(Error::BlockMismatch("the σ,ε family lives on the A4 block".into()));
    }
    let mut seen = [false; 4];
    if sigma.iter().any(|&x| x > 3 || std::mem::replace(&mut seen[x], true)) {
        return Err(Error::Malformed(format!("{sigma:?} is not a permutation of 0..4")));
    }
    let signs = (0..4).map(|j| eps * DELTA[j] * DELTA[sigma[j]]).collect();
    SignedBijection::new(Arc::clone(block), Arc::clone(block), sigma.to_vec(), signs)
}

/// `θ_i ↦ ε θ_{j(i+l) mod 2^n}` for odd `j`.
pub fn make_i_jl_eps(block: &Arc<Block>, j: u64, l: u64, eps: i8) -> Result<SignedBijection> {
    let BlockKind::Cyclic { n } = block_kind(block) else {
        return Err(Error::BlockMismatch(
            "the j,l,ε family lives on a cyclic 2-group block".into(),
        ));
    };
    let size = 1u64 << n;
    if j % 2 == 0 || j >= size || l >= size {
        return Err(Error::Malformed(format!("need odd j and 0 <= j, l < {size}")));
    }
    let perm = (0..size).map(|i| ((j * (i + l)) % size) as usize).collect();
    SignedBijection::new(Arc::clone(block), Arc::clone(block), perm, vec![eps; size as usize])
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                if a != b && a != c && b != c {
                    out.push([a, b, c, 6 - a - b - c]);
                }
            }
        }
    }
    out
}

/// The 48 maps `I_{σ,ε}`.
pub fn a4_family(block: &Arc<Block>) -> Result<Vec<SignedBijection>> {
    let mut out = Vec::with_capacity(48);
    for sigma in permutations4() {
        for eps in [1, -1] {
            out.push(make_i_sigma_eps(block, sigma, eps)?);
        }
    }
    out.sort();
    Ok(out)
}

/// The `2 · 2^{n−1} · 2^n` maps `I_{j,l,ε}`; only `ε = +1` when `positive_only`.
pub fn cyclic_family(block: &Arc<Block>, positive_only: bool) -> Result<Vec<SignedBijection>> {
    let BlockKind::Cyclic { n } = block_kind(block) else {
        return Err(Error::BlockMismatch("not a cyclic 2-group block".into()));
    };
    let size = 1u64 << n;
    let signs: &[i8] = if positive_only { &[1] } else { &[1, -1] };
    let mut out = Vec::new();
    for j in (1..size).step_by(2) {
        for l in 0..size {
            for &eps in signs {
                out.push(make_i_jl_eps(block, j, l, eps)?);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Standalone blocks of the factors of a `C_{2^n} × A4` block.
fn product_factors(n: u32) -> Result<(Arc<Block>, Arc<Block>)> {
    let cyc = Arc::new(Block::whole(Arc::new(cyclic_table(1 << n)))?);
    let a4 = Arc::new(Block::whole(Arc::new(a4_table()))?);
    Ok((cyc, a4))
}

/// `tensor(I_{j,l,1}, I_{σ,ε})` over all parameters.
pub fn product_family(block: &Arc<Block>) -> Result<Vec<SignedBijection>> {
    let BlockKind::Product { n } = block_kind(block) else {
        return Err(Error::BlockMismatch("not a C_{2^n} x A4 block".into()));
    };
    let (cyc, a4) = product_factors(n)?;
    let cyclic = cyclic_family(&cyc, true)?;
    let a4f = a4_family(&a4)?;
    let mut out = Vec::with_capacity(cyclic.len() * a4f.len());
    for c in &cyclic {
        for a in &a4f {
            out.push(tensor(c, a, block, block)?);
        }
    }
    out.sort();
    Ok(out)
}

/// The closed-form family for a recognized block kind.
pub fn expected_family(block: &Arc<Block>) -> Result<Option<Vec<SignedBijection>>> {
    Ok(match block_kind(block) {
        BlockKind::A4 => Some(a4_family(block)?),
        BlockKind::Cyclic { .. } => Some(cyclic_family(block, false)?),
        BlockKind::Product { .. } => Some(product_family(block)?),
        BlockKind::Other => None,
    })
}

/// Integer test that a signed permutation maps `Zprj(source)` into `Zprj(target)`.
/// Both lattices are saturated of equal rank, so inclusion is equality; and a
/// vector lies in the saturated lattice iff it is annihilated by the
/// orthogonal complement.
#[derive(Clone, Debug)]
pub struct PrjFilter {
    rows: Vec<Vec<i64>>,
    complement: Vec<Vec<i64>>,
}

impl PrjFilter {
    pub fn new(source: &Block, target: &Block) -> Result<Self> {
        let big = |what: &str| Error::Unsupported(format!("{what} exceeds 64-bit entries"));
        let rows = intmat::to_i64(source.prj_basis()).ok_or_else(|| big("prj basis"))?;
        let tp = target.prj_basis();
        let k = target.k();
        let transposed: intmat::IntMatrix = (0..k).map(|i| tp.iter().map(|r| r[i].clone()).collect()).collect();
        let complement = if tp.len() == k {
            Vec::new()
        } else {
            intmat::to_i64(&intmat::left_kernel(&transposed)).ok_or_else(|| big("prj complement"))?
        };
        if rows.len() != tp.len() {
            return Err(Error::BlockMismatch(format!("l = {} and l = {}", rows.len(), tp.len())));
        }
        Ok(PrjFilter { rows, complement })
    }

    pub fn passes(&self, perm: &[usize], signs: &[i8]) -> bool {
        self.complement.iter().all(|a| {
            self.rows.iter().all(|r| {
                let mut acc = 0i64;
                for (i, &x) in r.iter().enumerate() {
                    if x != 0 {
                        acc += a[perm[i]] * signs[i] as i64 * x;
                    }
                }
                acc == 0
            })
        })
    }
}

#[derive(Default)]
struct Tally {
    found: Vec<(Vec<usize>, Vec<i8>)>,
    examined: u64,
    disagreements: u64,
    nodes: u64,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        self.found.extend(other.found);
        self.examined += other.examined;
        self.disagreements += other.disagreements;
        self.nodes += other.nodes;
    }

    /// Runs both checkers on one candidate.
    fn examine(&mut self, checker: &Checker, perm: &[usize], signs: &[i8]) {
        self.examined += 1;
        let lattice = checker.lattice_verdict(perm, signs);
        let mu = checker.mu_verdict(perm, signs);
        if lattice != mu {
            self.disagreements += 1;
        }
        if lattice {
            self.found.push((perm.to_vec(), signs.to_vec()));
        }
    }
}

const FLUSH: u64 = 1 << 12;

struct NodeCounter<'a> {
    shared: &'a AtomicU64,
    limit: Option<u64>,
    flush: u64,
}

impl<'a> NodeCounter<'a> {
    fn new(shared: &'a AtomicU64, limit: Option<u64>) -> Self {
        // small limits are honoured exactly on one thread
        let flush = limit.map_or(FLUSH, |l| l.saturating_add(1).min(FLUSH));
        NodeCounter { shared, limit, flush }
    }

    fn tick(&self, local: &mut u64) -> Result<()> {
        *local += 1;
        if *local % self.flush == 0 {
            self.add(self.flush)?;
        }
        Ok(())
    }

    /// Adds the part of `local` not yet flushed.
    fn finish(&self, local: u64) -> Result<()> {
        self.add(local % self.flush)
    }

    fn add(&self, n: u64) -> Result<()> {
        let total = self.shared.fetch_add(n, Ordering::Relaxed) + n;
        match self.limit {
            Some(l) if total > l => Err(Error::NodeLimit { visited: total }),
            _ => Ok(()),
        }
    }
}

struct Walk<'a> {
    k: usize,
    allowed: Vec<Vec<usize>>,
    prj: PrjFilter,
    checker: &'a Checker,
    counter: NodeCounter<'a>,
}

impl Walk<'_> {
    fn dfs(
        &self,
        depth: usize,
        perm: &mut [usize],
        signs: &mut [i8],
        used: &mut [bool],
        tally: &mut Tally,
    ) -> Result<()> {
        if depth == self.k {
            if self.prj.passes(perm, signs) {
                tally.examine(self.checker, perm, signs);
            }
            return Ok(());
        }
        for &t in &self.allowed[depth] {
            if used[t] {
                continue;
            }
            used[t] = true;
            perm[depth] = t;
            for s in [1, -1] {
                signs[depth] = s;
                self.counter.tick(&mut tally.nodes)?;
                self.dfs(depth + 1, perm, signs, used, tally)?;
            }
            used[t] = false;
        }
        Ok(())
    }

    fn subtree(&self, first: usize, sign: i8) -> Result<Tally> {
        let mut tally = Tally::default();
        let mut perm = vec![0; self.k];
        let mut signs = vec![1; self.k];
        let mut used = vec![false; self.k];
        perm[0] = first;
        signs[0] = sign;
        used[first] = true;
        self.counter.tick(&mut tally.nodes)?;
        self.dfs(1, &mut perm, &mut signs, &mut used, &mut tally)?;
        self.counter.finish(tally.nodes)?;
        Ok(tally)
    }
}

fn with_pool<T: Send>(width: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(width.max(1))
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn exhaustive(checker: &Checker, cfg: &SearchConfig) -> Result<Tally> {
    let (source, target) = (checker.source(), checker.target());
    let k = source.k();
    if k > EXHAUSTIVE_MAX_K {
        return Err(Error::GuardViolation { k });
    }
    let cs = codegree_valuations(source);
    let ct = codegree_valuations(target);
    let allowed: Vec<Vec<usize>> = cs.iter().map(|&c| (0..k).filter(|&t| ct[t] == c).collect()).collect();
    let shared = AtomicU64::new(0);
    let walk = Walk {
        k,
        allowed,
        prj: PrjFilter::new(source, target)?,
        checker,
        counter: NodeCounter::new(&shared, cfg.node_limit),
    };
    if k == 0 {
        return Ok(Tally::default());
    }
    let roots: Vec<(usize, i8)> = walk.allowed[0].iter().flat_map(|&t| [(t, 1), (t, -1)]).collect();
    let parts: Vec<Result<Tally>> = with_pool(cfg.parallel_width, || {
        roots.par_iter().map(|&(t, s)| walk.subtree(t, s)).collect()
    })?;
    let mut tally = Tally::default();
    for p in parts {
        tally.merge(p?);
    }
    tally.nodes = shared.load(Ordering::Relaxed);
    Ok(tally)
}

/// Runs both checkers on each candidate, counting candidates as nodes.
fn examine_all(checker: &Checker, candidates: &[SignedBijection], cfg: &SearchConfig, tally: &mut Tally) -> Result<()> {
    let shared = AtomicU64::new(tally.nodes);
    let counter = NodeCounter::new(&shared, cfg.node_limit);
    let parts: Vec<Tally> = with_pool(cfg.parallel_width, || {
        candidates
            .par_iter()
            .map(|c| {
                let mut t = Tally::default();
                t.examine(checker, c.perm(), c.signs());
                t
            })
            .collect()
    })?;
    counter.add(candidates.len() as u64)?;
    for p in parts {
        tally.merge(p);
    }
    tally.nodes = shared.load(Ordering::Relaxed);
    Ok(())
}

/// All signed bijections of a 4-character block with prj-invariant image.
fn prj_invariant_candidates(block: &Arc<Block>, filter: &PrjFilter) -> Result<Vec<SignedBijection>> {
    let k = block.k();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..k).collect();
    permute_all(&mut perm, 0, &mut |p| {
        for mask in 0..(1u32 << k) {
            let signs: Vec<i8> = (0..k).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            if filter.passes(p, &signs) {
                out.push((p.to_vec(), signs));
            }
        }
    });
    out.into_iter()
        .map(|(p, s)| SignedBijection::new(Arc::clone(block), Arc::clone(block), p, s))
        .collect()
}

fn permute_all(p: &mut Vec<usize>, start: usize, f: &mut impl FnMut(&[usize])) {
    if start == p.len() {
        f(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute_all(p, start + 1, f);
        p.swap(start, i);
    }
}

fn same_set(mut a: Vec<SignedBijection>, mut b: Vec<SignedBijection>) -> bool {
    a.sort();
    b.sort();
    a == b
}

fn proof_guided_a4(block: &Arc<Block>, checker: &Checker, cfg: &SearchConfig) -> Result<Tally> {
    // prj-invariant maps are the signed permutations of {χ1, χ2, χ3, −χ4}
    // and their negatives, i.e. exactly the σ,ε family
    let filter = PrjFilter::new(block, block)?;
    let candidates = prj_invariant_candidates(block, &filter)?;
    if !same_set(candidates.clone(), a4_family(block)?) {
        return Err(Error::ProofStep(
            "prj-invariant maps of A4 are not the σ,ε family".into(),
        ));
    }
    let mut tally = Tally {
        nodes: 384,
        ..Tally::default()
    };
    examine_all(checker, &candidates, cfg, &mut tally)?;
    Ok(tally)
}

/// Candidates for `C_{2^n}`: constant sign (prj is `Σθ_i`) and
/// `σ(i) = y⁻¹ (i + c)`, read off from the class `x^y` on which every
/// `ζ^{-i} θ_{σ(i)}` agrees.
fn cyclic_candidates(block: &Arc<Block>, n: u32, positive_only: bool) -> Result<Vec<SignedBijection>> {
    let size = 1u64 << n;
    let mut out = Vec::new();
    for y in (1..size).step_by(2) {
        let yinv = (1..size).step_by(2).find(|&z| z * y % size == 1).unwrap();
        for c in 0..size {
            let perm: Vec<usize> = (0..size).map(|i| (yinv * (i + c) % size) as usize).collect();
            let signs: &[i8] = if positive_only { &[1] } else { &[1, -1] };
            for &s in signs {
                out.push(SignedBijection::new(
                    Arc::clone(block),
                    Arc::clone(block),
                    perm.clone(),
                    vec![s; size as usize],
                )?);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn proof_guided_cyclic(block: &Arc<Block>, n: u32, checker: &Checker, cfg: &SearchConfig) -> Result<Tally> {
    // the lemma step: a sum of 2^n roots of unity in 2^n O is zero or has equal terms
    let size = 1i64 << n;
    let ctx = prime_context(size as u32, 0)?;
    for y in 0..size {
        let exps: Vec<i64> = (0..size).map(|i| (y * i - i).rem_euclid(size)).collect();
        crate::cyclotomic::root_sum_classify_in(&ctx, n, n, &exps)?;
    }
    let candidates = cyclic_candidates(block, n, false)?;
    let mut tally = Tally::default();
    examine_all(checker, &candidates, cfg, &mut tally)?;
    Ok(tally)
}

/// Tuples `(j1, j2, j3, j4)` passing (zeta1)–(zeta3) at `ζ` of order `2^n`.
pub fn zeta_survivors(n: u32, ctx: &PrimeContext) -> Result<Vec<[i64; 4]>> {
    let size = 1i64 << n;
    let m = ctx.conductor();
    if m % (3 * size as u32) != 0 {
        return Err(Error::ConductorMismatch {
            from: 3 * size as u32,
            to: m,
        });
    }
    let root = |e: i64| CycNum::root_of_unity(m, e * (m as i64 / size));
    let omega = CycNum::root_of_unity(m, m as i64 / 3);
    let omega2 = &omega * &omega;
    let mut out = Vec::new();
    for t in 0..size.pow(4) {
        let j = [t % size, t / size % size, t / size.pow(2) % size, t / size.pow(3)];
        if root_sum_classify(n.max(1), 2, &j)? == crate::cyclotomic::RootSum::NotInIdeal {
            continue;
        }
        let (a, b, c) = (root(j[0]), root(j[1]), root(j[2]));
        let z2 = &(&a + &(&omega * &b)) + &(&omega2 * &c);
        let z3 = &(&a + &(&omega2 * &b)) + &(&omega * &c);
        if ctx.in_scaled_ring(&z2, 2) && ctx.in_scaled_ring(&z3, 2) {
            out.push(j);
        }
    }
    Ok(out)
}

fn proof_guided_product(block: &Arc<Block>, n: u32, checker: &Checker, cfg: &SearchConfig) -> Result<Tally> {
    let ctx = checker.context();
    let size = 1usize << n;
    let (cyc, a4) = product_factors(n)?;
    let filter = PrjFilter::new(block, block)?;
    // phase 1: each family {θ_i ⊗ χ_m}_i goes to one family with one sign;
    // the family-level map must preserve Zprj
    let mut family_maps = Vec::new();
    let id_cyc = SignedBijection::identity(&cyc);
    for tau in permutations4() {
        for mask in 0..16u32 {
            let signs: Vec<i8> = (0..4).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            let fam = SignedBijection::new(Arc::clone(&a4), Arc::clone(&a4), tau.to_vec(), signs)?;
            let lifted = tensor(&id_cyc, &fam, block, block)?;
            if filter.passes(lifted.perm(), lifted.signs()) {
                family_maps.push(fam);
            }
        }
    }
    if !same_set(family_maps.clone(), a4_family(&a4)?) {
        return Err(Error::ProofStep(format!(
            "{} family-level maps preserve Zprj; expected the 48 σ,ε maps",
            family_maps.len()
        )));
    }
    // phase 2: after normalizing by I_{σ,ε}, θ_j ⊗ χ_m ↦ θ_{j_m} ⊗ χ_m and the
    // root-of-unity conditions force j_1 = j_2 = j_3 = j_4
    let zctx = if ctx.conductor() % (3 * size as u32) == 0 {
        ctx.clone()
    } else {
        prime_context(3 * size as u32, 0)?
    };
    let survivors = zeta_survivors(n, &zctx)?;
    if let Some(bad) = survivors.iter().find(|j| j.iter().any(|&x| x != j[0])) {
        return Err(Error::ProofStep(format!(
            "non-constant exponent tuple {bad:?} passes (zeta1)-(zeta3)"
        )));
    }
    // phase 3: the common permutation of the θ_i is a positive perfect
    // self-isometry of O C_{2^n}
    let cyclic = cyclic_candidates(&cyc, n, true)?;
    let cyc_checker = Checker::new(&cyc, &cyc, &prime_context(size as u32, 0)?)?;
    let cyclic: Vec<SignedBijection> = cyclic
        .into_iter()
        .filter(|c| cyc_checker.lattice_verdict(c.perm(), c.signs()))
        .collect();
    let mut candidates = Vec::with_capacity(cyclic.len() * family_maps.len());
    for c in &cyclic {
        for a in &family_maps {
            candidates.push(tensor(c, a, block, block)?);
        }
    }
    let mut tally = Tally {
        nodes: (24 * 16 + size.pow(4)) as u64,
        ..Tally::default()
    };
    examine_all(checker, &candidates, cfg, &mut tally)?;
    Ok(tally)
}

fn finish(checker: &Checker, strategy: Strategy, mut tally: Tally) -> Result<EnumerationResult> {
    tally.found.sort();
    let isometries = tally
        .found
        .into_iter()
        .map(|(p, s)| SignedBijection::new(Arc::clone(checker.source()), Arc::clone(checker.target()), p, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnumerationResult {
        strategy,
        count: isometries.len(),
        isometries,
        group_report: None,
        torsor_verified: None,
        nodes_visited: tally.nodes,
        examined: tally.examined,
        disagreements: tally.disagreements,
        source: Arc::clone(checker.source()),
        target: Arc::clone(checker.target()),
    })
}

/// Self-enumeration with a prepared checker (`checker.source() == checker.target()`).
pub fn enumerate_self_with(checker: &Checker, cfg: &SearchConfig) -> Result<EnumerationResult> {
    let block = checker.source();
    if !block.same_as(checker.target()) {
        return Err(Error::BlockMismatch(
            "self-enumeration needs equal source and target".into(),
        ));
    }
    let tally = match cfg.strategy {
        Strategy::Exhaustive => exhaustive(checker, cfg)?,
        Strategy::ProofGuided => match block_kind(block) {
            BlockKind::A4 => proof_guided_a4(block, checker, cfg)?,
            BlockKind::Cyclic { n } => proof_guided_cyclic(block, n, checker, cfg)?,
            BlockKind::Product { n } => proof_guided_product(block, n, checker, cfg)?,
            BlockKind::Other => {
                return Err(Error::Unsupported(format!(
                    "no proof-guided search for a block of {}",
                    block.table().group_label()
                )))
            }
        },
    };
    let mut result = finish(checker, cfg.strategy, tally)?;
    result.group_report = Some(group_structure(&result)?);
    Ok(result)
}

pub fn enumerate_self_perfect(b: &Arc<Block>, ctx: &PrimeContext, cfg: &SearchConfig) -> Result<EnumerationResult> {
    if cfg.strategy == Strategy::Exhaustive && b.k() > EXHAUSTIVE_MAX_K {
        return Err(Error::GuardViolation { k: b.k() });
    }
    enumerate_self_with(&Checker::new(b, b, ctx)?, cfg)
}

fn empty_result(b: &Arc<Block>, c: &Arc<Block>, strategy: Strategy) -> EnumerationResult {
    EnumerationResult {
        strategy,
        isometries: Vec::new(),
        count: 0,
        group_report: None,
        torsor_verified: None,
        nodes_visited: 0,
        examined: 0,
        disagreements: 0,
        source: Arc::clone(b),
        target: Arc::clone(c),
    }
}

/// Perfect isometries `B → C`, with the torsor property checked against the
/// self-group of `B`.
pub fn enumerate_perfect_between(
    b: &Arc<Block>,
    c: &Arc<Block>,
    ctx: &PrimeContext,
    cfg: &SearchConfig,
) -> Result<EnumerationResult> {
    if b.k() != c.k() {
        return Ok(empty_result(b, c, cfg.strategy));
    }
    if b.same_as(c) {
        return enumerate_self_perfect(b, ctx, cfg);
    }
    if cfg.strategy == Strategy::ProofGuided {
        return Err(Error::Unsupported(
            "proof-guided search is only defined for self-isometries".into(),
        ));
    }
    let checker = Checker::new(b, c, ctx)?;
    let mut result = finish(&checker, cfg.strategy, exhaustive(&checker, cfg)?)?;
    if !result.isometries.is_empty() {
        let own = enumerate_self_perfect(b, ctx, cfg)?;
        let target_own = enumerate_self_perfect(c, ctx, cfg)?;
        result.torsor_verified = Some(
            own.count == result.count
                && target_own.count == result.count
                && is_torsor(&result.isometries, &own.isometries)?,
        );
    }
    Ok(result)
}

/// Every `J⁻¹ ∘ I` for `I, J` in `cross` lies in `group`.
pub fn is_torsor(cross: &[SignedBijection], group: &[SignedBijection]) -> Result<bool> {
    let members: HashSet<&SignedBijection> = group.iter().collect();
    for i in cross {
        for j in cross {
            if !members.contains(&compose(i, &invert(j))?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Full closure table, identity and inverses; aborts on failure.
pub fn group_structure(r: &EnumerationResult) -> Result<GroupReport> {
    if !r.source.same_as(&r.target) {
        return Err(Error::BlockMismatch("group structure needs a self-enumeration".into()));
    }
    let members: HashSet<&SignedBijection> = r.isometries.iter().collect();
    if !r.isometries.is_empty() {
        if !members.contains(&SignedBijection::identity(&r.source)) {
            return Err(Error::ClosureFailure("identity missing".into()));
        }
        for i in &r.isometries {
            if !members.contains(&invert(i)) {
                return Err(Error::ClosureFailure(format!("inverse of {i:?} missing")));
            }
            for j in &r.isometries {
                if !members.contains(&compose(i, j)?) {
                    return Err(Error::ClosureFailure(format!("{i:?} then {j:?} leaves the set")));
                }
            }
        }
    }
    let expected_family_matched = match expected_family(&r.source)? {
        Some(f) => f == r.isometries,
        None => false,
    };
    Ok(GroupReport {
        order: r.count,
        closure_verified: true,
        expected_family_matched,
    })
}

/// Both checkers on `count` uniformly random signed bijections.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CrossValidation {
    pub examined: u64,
    pub perfect: u64,
    pub disagreements: u64,
}

pub fn random_cross_validation(checker: &Checker, count: usize, seed: u64) -> CrossValidation {
    let k = checker.source().k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CrossValidation::default();
    let mut perm: Vec<usize> = (0..k).collect();
    for _ in 0..count {
        perm.shuffle(&mut rng);
        let signs: Vec<i8> = (0..k).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        let lattice = checker.lattice_verdict(&perm, &signs);
        let mu = checker.mu_verdict(&perm, &signs);
        out.examined += 1;
        out.perfect += lattice as u64;
        out.disagreements += (lattice != mu) as u64;
    }
    out
}
