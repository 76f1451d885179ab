//! Index-2 covering data and the descent of perfect isometries to normal
//! subgroups of index 2, plus the sign twist `χ ↦ sgn · χ`.

use std::sync::Arc;

use serde::Serialize;

use crate::blocks::{central_character, Block};
use crate::chartab::{restrict_character, Embedding};
use crate::cyclotomic::{CycNum, PrimeContext};
use crate::error::{Error, Result};
use crate::isometry::{CentralChecker, Checker, PerfectionReport, SignedBijection};

/// Characters of the sup block grouped by their restriction to the sub block.
#[derive(Clone, Debug)]
pub struct CoveringData {
    pub embedding: Arc<Embedding>,
    pub sup_block: Arc<Block>,
    pub sub_block: Arc<Block>,
    /// `fibers[c]`: local positions in `sup_block` restricting to the sub
    /// block's character at local position `c`, ascending.
    pub fibers: Vec<[usize; 2]>,
    /// Inverse of `fibers`: sub-block position of each sup-block character.
    pub owner: Vec<usize>,
}

impl CoveringData {
    pub fn fiber_of(&self, sup_pos: usize) -> usize {
        self.owner[sup_pos]
    }
}

fn check_tables(e: &Embedding, big: &Block, small: &Block) -> Result<()> {
    let same = |a: &crate::chartab::CharTable, b: &crate::chartab::CharTable| {
        a.group_label() == b.group_label() && a.group_order() == b.group_order()
    };
    if !same(big.table(), &e.sup) || !same(small.table(), &e.sub) {
        return Err(Error::BlockMismatch(
            "blocks do not live on the embedding's tables".into(),
        ));
    }
    if e.index != 2 {
        return Err(Error::Unsupported(format!("index {} embeddings", e.index)));
    }
    Ok(())
}

pub fn covering_fusion(e: &Arc<Embedding>, big: &Arc<Block>, small: &Arc<Block>) -> Result<CoveringData> {
    check_tables(e, big, small)?;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); small.k()];
    let mut owner = Vec::with_capacity(big.k());
    for (pos, &chi) in big.char_indices().iter().enumerate() {
        let coeffs = restrict_character(e, chi)?;
        let total: u64 = coeffs.iter().sum();
        let psi = coeffs.iter().position(|&c| c == 1);
        let psi = match psi {
            Some(p) if total == 1 => p,
            _ => return Err(Error::ReducibleRestriction { index: chi }),
        };
        let local = small
            .position(psi)
            .ok_or_else(|| Error::BlockMismatch(format!("character {chi} restricts outside the sub block")))?;
        members[local].push(pos);
        owner.push(local);
    }
    let fibers = members
        .into_iter()
        .enumerate()
        .map(|(c, m)| match m.as_slice() {
            &[a, b] => Ok([a, b]),
            _ => Err(Error::BlockMismatch(format!(
                "sub character {} has {} extensions, expected 2",
                small.char_indices()[c],
                m.len()
            ))),
        })
        .collect::<Result<_>>()?;
    Ok(CoveringData {
        embedding: Arc::clone(e),
        sup_block: Arc::clone(big),
        sub_block: Arc::clone(small),
        fibers,
        owner,
    })
}

/// `χ ↦ sgn · χ`, where `sgn` is `+1` on classes meeting `N` and `−1` elsewhere.
pub fn sgn_twist(big: &Arc<Block>, e: &Embedding) -> Result<SignedBijection> {
    let t = big.table();
    let sgn: Vec<i64> = (0..t.classes().len())
        .map(|j| if e.meets_sub(j) { 1 } else { -1 })
        .collect();
    let mut perm = Vec::with_capacity(big.k());
    for &chi in big.char_indices() {
        let row: Vec<CycNum> = t.row(chi).iter().zip(&sgn).map(|(v, &s)| v.scale_int(s)).collect();
        let image = t.find_char(&row).ok_or(Error::UnmatchedTwist { index: chi })?;
        perm.push(big.position(image).ok_or(Error::UnmatchedTwist { index: chi })?);
    }
    SignedBijection::new(Arc::clone(big), Arc::clone(big), perm, vec![1; big.k()])
}

/// For each source fiber: the target fiber it lands on and the common sign.
fn fiber_images(i: &SignedBijection, f: &CoveringData, g: &CoveringData) -> Option<Vec<(usize, i8)>> {
    if !i.source().same_as(&f.sup_block) || !i.target().same_as(&g.sup_block) {
        return None;
    }
    f.fibers
        .iter()
        .map(|&[a, b]| {
            let (ta, tb) = (i.perm()[a], i.perm()[b]);
            let psi = g.owner[ta];
            (g.owner[tb] == psi && i.signs()[a] == i.signs()[b]).then_some((psi, i.signs()[a]))
        })
        .collect()
}

/// Each source fiber maps onto a single target fiber with a single sign.
pub fn check_descent_hypothesis(i: &SignedBijection, f: &CoveringData, g: &CoveringData) -> bool {
    fiber_images(i, f, g).is_some()
}

#[derive(Clone, Debug, Serialize)]
pub struct DescentResult {
    pub descended: Option<SignedBijection>,
    pub hypothesis_held: bool,
    /// Lattice-checker report for the descended map.
    pub report: Option<PerfectionReport>,
    /// μ-checker verdict for the descended map.
    pub mu_perfect: Option<bool>,
}

impl DescentResult {
    pub fn perfect(&self) -> bool {
        matches!((&self.report, self.mu_perfect), (Some(r), Some(true)) if r.verdict)
    }
}

/// The map `χ ↦ ε_χ ψ` on the sub blocks, without running any checker.
pub fn descended_map(i: &SignedBijection, f: &CoveringData, g: &CoveringData) -> Result<Option<SignedBijection>> {
    let Some(images) = fiber_images(i, f, g) else {
        return Ok(None);
    };
    let (perm, signs) = images.into_iter().unzip();
    Ok(Some(SignedBijection::new(
        Arc::clone(&f.sub_block),
        Arc::clone(&g.sub_block),
        perm,
        signs,
    )?))
}

/// Descent with prepared checkers for one pair of coverings.
pub struct Descent {
    pub source: CoveringData,
    pub target: CoveringData,
    checker: Checker,
    central: CentralChecker,
    /// Class-sum vectors of `Z(b)`, in idempotent coordinates of the sub block.
    sub_central: Vec<Vec<CycNum>>,
}

fn central_vectors(b: &Block, conductor: u32) -> Result<Vec<Vec<CycNum>>> {
    let per_char: Vec<Vec<CycNum>> = b
        .char_indices()
        .iter()
        .map(|&c| central_character(b.table(), c, conductor))
        .collect::<Result<_>>()?;
    Ok((0..b.table().classes().len())
        .map(|j| per_char.iter().map(|w| w[j].clone()).collect())
        .collect())
}

impl Descent {
    pub fn new(source: CoveringData, target: CoveringData, ctx: &PrimeContext) -> Result<Self> {
        let checker = Checker::new(&source.sub_block, &target.sub_block, ctx)?;
        let central = CentralChecker::new(&source.sub_block, &target.sub_block, ctx)?;
        let sub_central = central_vectors(&source.sub_block, ctx.conductor())?;
        Ok(Descent {
            source,
            target,
            checker,
            central,
            sub_central,
        })
    }

    pub fn descend(&self, i: &SignedBijection) -> Result<DescentResult> {
        match descended_map(i, &self.source, &self.target)? {
            None => Ok(DescentResult {
                descended: None,
                hypothesis_held: false,
                report: None,
                mu_perfect: None,
            }),
            Some(d) => Ok(DescentResult {
                report: Some(self.checker.lattice_report(&d)),
                mu_perfect: Some(self.checker.mu_verdict(d.perm(), d.signs())),
                descended: Some(d),
                hypothesis_held: true,
            }),
        }
    }

    /// `φ_{I_{N,N'}} = φ_I|_{Z(b)}`: each `e_χ = e_{χ1} + e_{χ2}` goes to
    /// `e_ψ = e_{ψ1} + e_{ψ2}` under `I`'s idempotent bijection, class sums of `b`
    /// embedded in `Z(KB)` map to the embedded class sums of `b'`, and the
    /// descended map carries `Z(b)` onto `Z(b')`.
    pub fn verify_centre_restriction(&self, i: &SignedBijection) -> Result<bool> {
        let Some(d) = descended_map(i, &self.source, &self.target)? else {
            return Ok(false);
        };
        for (c, &[a, b]) in self.source.fibers.iter().enumerate() {
            let mut image = [i.perm()[a], i.perm()[b]];
            image.sort_unstable();
            if image != self.target.fibers[d.perm()[c]] {
                return Ok(false);
            }
        }
        // embedded class sums: ω_χ(ĉ) repeated on both members of χ's fiber
        let lift = |v: &[CycNum], cover: &CoveringData| -> Vec<CycNum> {
            (0..cover.sup_block.k()).map(|p| v[cover.owner[p]].clone()).collect()
        };
        for v in &self.sub_central {
            let up = lift(v, &self.source);
            let mut mapped = up.clone();
            for (p, x) in up.iter().enumerate() {
                mapped[i.perm()[p]] = x.clone();
            }
            let mut down = v.clone();
            for (c, x) in v.iter().enumerate() {
                down[d.perm()[c]] = x.clone();
            }
            if mapped != lift(&down, &self.target) {
                return Ok(false);
            }
        }
        Ok(self.central.check(&d).verdict)
    }
}

pub fn descend(i: &SignedBijection, f: &CoveringData, g: &CoveringData, ctx: &PrimeContext) -> Result<DescentResult> {
    Descent::new(f.clone(), g.clone(), ctx)?.descend(i)
}

pub fn verify_centre_restriction(
    i: &SignedBijection,
    f: &CoveringData,
    g: &CoveringData,
    ctx: &PrimeContext,
) -> Result<bool> {
    Descent::new(f.clone(), g.clone(), ctx)?.verify_centre_restriction(i)
}
