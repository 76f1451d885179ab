//! 2-blocks of a character table by central-character linkage, their defects
//! and the lattice `Zprj(B)` of generalized characters vanishing off the
//! 2-regular classes.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::chartab::CharTable;
use crate::cyclotomic::{CycNum, PrimeContext};
use crate::error::{Error, Result};
use crate::intmat::{self, IntMatrix};

/// A set of characters of one table forming a 2-block (or a union of blocks).
#[derive(Clone, Debug)]
pub struct Block {
    table: Arc<CharTable>,
    char_indices: Vec<usize>,
    defect: u32,
    prj_basis: IntMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BlockInvariants {
    pub k: usize,
    pub l: usize,
    pub defect: u32,
}

impl Block {
    /// Builds the block on the given characters (sorted, deduplicated) and
    /// computes its defect and prj lattice. Linkage is not checked here.
    pub fn new(table: Arc<CharTable>, mut char_indices: Vec<usize>) -> Result<Block> {
        char_indices.sort_unstable();
        char_indices.dedup();
        if char_indices.is_empty() || char_indices.iter().any(|&c| c >= table.num_chars()) {
            return Err(Error::BlockMismatch(
                "block needs a non-empty set of valid character indices".into(),
            ));
        }
        let v2_order = table.group_order().trailing_zeros();
        let min_v2_degree = char_indices
            .iter()
            .map(|&c| table.degree(c).trailing_zeros())
            .min()
            .unwrap();
        let defect = v2_order - min_v2_degree;
        let prj_basis = compute_prj(&table, &char_indices);
        Ok(Block {
            table,
            char_indices,
            defect,
            prj_basis,
        })
    }

    /// All characters of the table as one block.
    pub fn whole(table: Arc<CharTable>) -> Result<Block> {
        let k = table.num_chars();
        Block::new(table, (0..k).collect())
    }

    pub fn table(&self) -> &Arc<CharTable> {
        &self.table
    }

    pub fn char_indices(&self) -> &[usize] {
        &self.char_indices
    }

    pub fn k(&self) -> usize {
        self.char_indices.len()
    }

    pub fn defect(&self) -> u32 {
        self.defect
    }

    pub fn prj_basis(&self) -> &IntMatrix {
        &self.prj_basis
    }

    /// Local position of a table character index.
    pub fn position(&self, chi: usize) -> Option<usize> {
        self.char_indices.binary_search(&chi).ok()
    }

    /// Same table (by label and order) and same characters.
    pub fn same_as(&self, other: &Block) -> bool {
        let same_table = Arc::ptr_eq(&self.table, &other.table)
            || (self.table.group_label() == other.table.group_label()
                && self.table.group_order() == other.table.group_order());
        same_table && self.char_indices == other.char_indices
    }
}

impl PartialEq for Block {
    fn eq(&self, other: &Block) -> bool {
        self.same_as(other)
    }
}

impl Eq for Block {}

impl Serialize for Block {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            chars: &'a [usize],
            k: usize,
            l: usize,
            defect: u32,
            prj_basis: Vec<Vec<i64>>,
        }
        let prj = intmat::to_i64(&self.prj_basis)
            .ok_or_else(|| serde::ser::Error::custom("prj basis entry exceeds 64 bits"))?;
        Wire {
            chars: &self.char_indices,
            k: self.k(),
            l: self.prj_basis.len(),
            defect: self.defect,
            prj_basis: prj,
        }
        .serialize(s)
    }
}

/// Rows of integer coordinates of `χ(g)` for the 2-singular classes, one row per character.
fn singular_expansion(table: &CharTable, chars: &[usize]) -> IntMatrix {
    let singular: Vec<usize> = (0..table.classes().len())
        .filter(|&j| !table.classes()[j].is_2regular)
        .collect();
    chars
        .iter()
        .map(|&c| {
            singular
                .iter()
                .flat_map(|&j| table.value_int(c, j).iter().map(|&x| BigInt::from(x)))
                .collect()
        })
        .collect()
}

fn compute_prj(table: &CharTable, chars: &[usize]) -> IntMatrix {
    let m = singular_expansion(table, chars);
    if m[0].is_empty() {
        // odd order: every generalized character vanishes on the (empty) singular set
        let k = chars.len();
        return (0..k)
            .map(|i| (0..k).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
    }
    intmat::left_kernel(&m)
}

/// `ω_χ(Ĉ) = |C| χ(g) / χ(1)` for every class, lifted to the context conductor.
pub fn central_character(table: &CharTable, chi: usize, conductor: u32) -> Result<Vec<CycNum>> {
    let deg = BigRational::new(1.into(), (table.degree(chi) as i64).into());
    table
        .classes()
        .iter()
        .enumerate()
        .map(|(j, cl)| {
            table
                .value(chi, j)
                .lift(conductor)
                .map(|v| v.scale_int(cl.size as i64).scale(&deg))
        })
        .collect()
}

fn check_context(table: &CharTable, ctx: &PrimeContext) -> Result<()> {
    if ctx.conductor() % table.conductor() != 0 {
        return Err(Error::ConductorMismatch {
            from: table.conductor(),
            to: ctx.conductor(),
        });
    }
    Ok(())
}

/// Splits `Irr(T)` into 2-blocks: `χ ~ ψ` iff `v_P(ω_χ(Ĉ) − ω_ψ(Ĉ)) > 0` for every class.
/// Blocks are ordered by their smallest character index (principal block first).
pub fn partition_blocks(table: &Arc<CharTable>, ctx: &PrimeContext) -> Result<Vec<Block>> {
    check_context(table, ctx)?;
    let k = table.num_chars();
    let omegas: Vec<Vec<CycNum>> = (0..k)
        .map(|c| central_character(table, c, ctx.conductor()))
        .collect::<Result<_>>()?;
    // linkage is an equivalence (equality of central characters mod P), so
    // comparing against one representative per block suffices
    let mut reps: Vec<usize> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for chi in 0..k {
        let found = reps.iter().position(|&r| {
            omegas[chi]
                .iter()
                .zip(&omegas[r])
                .all(|(a, b)| ctx.valuation(&(a - b)).is_at_least(1))
        });
        match found {
            Some(b) => members[b].push(chi),
            None => {
                reps.push(chi);
                members.push(vec![chi]);
            }
        }
    }
    members.into_iter().map(|m| Block::new(Arc::clone(table), m)).collect()
}

/// The block containing the trivial character.
pub fn principal_block(table: &Arc<CharTable>, ctx: &PrimeContext) -> Result<Block> {
    Ok(partition_blocks(table, ctx)?.swap_remove(0))
}

/// Canonical (HNF) basis of `Zprj(B)` in coordinates of `Irr(B)`.
pub fn prj_lattice(b: &Block) -> IntMatrix {
    b.prj_basis.clone()
}

pub fn block_invariants(b: &Block) -> BlockInvariants {
    BlockInvariants {
        k: b.k(),
        l: b.prj_basis.len(),
        defect: b.defect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartab::{a4_table, a5_table, cyclic_table, product_table};
    use crate::cyclotomic::prime_context;

    fn rows(r: &[&[i64]]) -> IntMatrix {
        intmat::from_i64(&r.iter().map(|x| x.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn a4_is_one_block() {
        let t = Arc::new(a4_table());
        let bl = partition_blocks(&t, &prime_context(3, 0).unwrap()).unwrap();
        assert_eq!(bl.len(), 1);
        let b = &bl[0];
        assert_eq!(block_invariants(b), BlockInvariants { k: 4, l: 3, defect: 2 });
        // χ_j + χ_4 for j = 1, 2, 3
        let expected = intmat::hnf(&rows(&[&[1, 0, 0, 1], &[0, 1, 0, 1], &[0, 0, 1, 1]]));
        assert_eq!(prj_lattice(b), expected);
    }

    #[test]
    fn a5_splits() {
        let t = Arc::new(a5_table());
        for which in 0..2 {
            let bl = partition_blocks(&t, &prime_context(15, which).unwrap()).unwrap();
            assert_eq!(bl.len(), 2);
            assert_eq!(bl[0].char_indices(), &[0, 1, 2, 4]);
            assert_eq!(bl[1].char_indices(), &[3]);
            assert_eq!(block_invariants(&bl[0]), BlockInvariants { k: 4, l: 3, defect: 2 });
            assert_eq!(block_invariants(&bl[1]), BlockInvariants { k: 1, l: 1, defect: 0 });
        }
    }

    #[test]
    fn cyclic_prj_is_regular_character() {
        for n in 1..=3 {
            let m = 1u32 << n;
            let t = Arc::new(cyclic_table(m));
            let bl = partition_blocks(&t, &prime_context(m, 0).unwrap()).unwrap();
            assert_eq!(bl.len(), 1);
            assert_eq!(prj_lattice(&bl[0]), rows(&[&vec![1; m as usize]]));
        }
    }

    #[test]
    fn product_blocks() {
        for n in 1..=3u32 {
            let m = 1u32 << n;
            let t = Arc::new(product_table(&cyclic_table(m), &a4_table()));
            let bl = partition_blocks(&t, &prime_context(3 * m, 0).unwrap()).unwrap();
            assert_eq!(bl.len(), 1);
            let b = &bl[0];
            assert_eq!(
                block_invariants(b),
                BlockInvariants {
                    k: 4 * m as usize,
                    l: 3,
                    defect: n + 2
                }
            );
            // (Σθ_i) ⊗ (χ_j + χ_4)
            let gens: Vec<Vec<i64>> = (0..3)
                .map(|j| (0..4 * m as usize).map(|c| (c % 4 == j || c % 4 == 3) as i64).collect())
                .collect();
            assert_eq!(prj_lattice(b), intmat::hnf(&intmat::from_i64(&gens)));
        }
    }

    #[test]
    fn prj_rows_vanish_on_singular_classes() {
        let t = Arc::new(product_table(&cyclic_table(2), &a5_table()));
        let ctx = prime_context(10, 0).unwrap();
        for b in partition_blocks(&t, &ctx).unwrap() {
            for row in prj_lattice(&b) {
                for (j, cl) in t.classes().iter().enumerate() {
                    if cl.is_2regular {
                        continue;
                    }
                    let mut acc = CycNum::zero(10);
                    for (a, &c) in row.iter().zip(b.char_indices()) {
                        acc += &t.value(c, j).scale(&BigRational::from_integer(a.clone()));
                    }
                    assert!(acc.is_zero());
                }
            }
        }
    }
}
