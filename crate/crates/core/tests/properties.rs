use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use perfiso::blocks::{principal_block, Block};
use perfiso::chartab::{
    a4_table, a5_table, cyclic_table, index2_embedding, product_table, restrict_character, trivial_table, CharTable,
    Cofactor,
};
use perfiso::cyclotomic::{num_primes_above_two, prime_context, totient, CycNum, PrimeContext, Valuation};
use perfiso::descent::{covering_fusion, CoveringData, Descent};
use perfiso::isometry::{compose, tensor, Checker, SignedBijection};
use perfiso::search::{a4_family, cyclic_family, enumerate_self_perfect, SearchConfig, Strategy as SearchStrategy};

const CONDUCTORS: [u32; 8] = [2, 4, 8, 12, 15, 16, 24, 60];

fn cyc(m: u32) -> impl Strategy<Value = CycNum> {
    let d = totient(m);
    (prop::collection::vec(-6i64..=6, d), 1i64..=4)
        .prop_map(move |(c, den)| CycNum::from_int_coeffs(m, &c).scale(&BigRational::new(1.into(), den.into())))
}

fn finite(v: Valuation) -> Option<i64> {
    v.finite()
}

fn v2(x: &BigInt) -> i64 {
    x.trailing_zeros().unwrap_or(0) as i64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn valuation_is_multiplicative_and_ultrametric(
        (m, x, y, which) in prop::sample::select(&CONDUCTORS[..])
            .prop_flat_map(|m| (Just(m), cyc(m), cyc(m), 0..num_primes_above_two(m)))
    ) {
        let ctx = prime_context(m, which).unwrap();
        let (vx, vy) = (ctx.valuation(&x), ctx.valuation(&y));
        match (finite(vx), finite(vy)) {
            (Some(a), Some(b)) => prop_assert_eq!(finite(ctx.valuation(&(&x * &y))), Some(a + b)),
            _ => prop_assert!((&x * &y).is_zero()),
        }
        let vs = ctx.valuation(&(&x + &y));
        match (finite(vx), finite(vy)) {
            (Some(a), Some(b)) => prop_assert!(vs.is_at_least(a.min(b))),
            (Some(a), None) | (None, Some(a)) => prop_assert_eq!(finite(vs), Some(a)),
            (None, None) => prop_assert!(finite(vs).is_none()),
        }
    }

    #[test]
    fn valuation_matches_norm_at_an_inert_prime(
        (m, x) in prop::sample::select(&[4u32, 8, 12, 16, 20, 24][..]).prop_flat_map(|m| (Just(m), cyc(m)))
    ) {
        prop_assume!(!x.is_zero());
        let ctx = prime_context(m, 0).unwrap();
        prop_assert_eq!(ctx.g(), 1);
        let n = x.norm();
        let expected = v2(n.numer()) - v2(n.denom());
        prop_assert_eq!(finite(ctx.valuation(&x)).unwrap() * ctx.f() as i64, expected);
    }

    #[test]
    fn galois_exchanges_the_primes_at_60(x in cyc(60)) {
        let (p0, p1, exchange, stabilizer) = primes_at_60();
        for &j in exchange {
            let gx = x.galois(j).unwrap();
            prop_assert_eq!(p1.valuation(&x), p0.valuation(&gx));
        }
        for &j in stabilizer {
            prop_assert_eq!(p0.valuation(&x), p0.valuation(&x.galois(j).unwrap()));
        }
    }
}

/// The two primes above 2 at conductor 60 and the automorphisms sending the
/// second to the first, resp. fixing the first, found on probe elements.
fn primes_at_60() -> &'static (PrimeContext, PrimeContext, Vec<i64>, Vec<i64>) {
    static CELL: OnceLock<(PrimeContext, PrimeContext, Vec<i64>, Vec<i64>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let p0 = prime_context(60, 0).unwrap();
        let p1 = prime_context(60, 1).unwrap();
        let probe = |c: &PrimeContext| {
            let coeffs: Vec<i64> = c.factor().iter().map(|&b| b as i64).collect();
            let mut full = coeffs.clone();
            full.resize(totient(60), 0);
            CycNum::from_int_coeffs(60, &full)
        };
        let probes = [probe(&p0), probe(&p1)];
        let units: Vec<i64> = (1..60).filter(|j| num_integer::gcd(*j, 60) == 1).collect();
        let agrees = |a: &PrimeContext, b: &PrimeContext, j: i64| {
            probes
                .iter()
                .all(|x| a.valuation(x) == b.valuation(&x.galois(j).unwrap()))
        };
        let exchange: Vec<i64> = units.iter().copied().filter(|&j| agrees(&p1, &p0, j)).collect();
        let stabilizer: Vec<i64> = units.iter().copied().filter(|&j| agrees(&p0, &p0, j)).collect();
        assert!(!exchange.is_empty() && !stabilizer.is_empty());
        assert_eq!(exchange.len() + stabilizer.len(), units.len());
        (p0, p1, exchange, stabilizer)
    })
}

fn small_table(i: usize) -> CharTable {
    match i {
        0 => trivial_table(),
        1 => a4_table(),
        2 => a5_table(),
        m => cyclic_table(m as u32 - 2),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_tables_are_orthogonal(a in 0usize..11, b in 0usize..11) {
        let t = product_table(&small_table(a), &small_table(b));
        prop_assert!(t.check_orthogonality().is_ok());
        let squares: u64 = t.degrees().iter().map(|d| d * d).sum();
        prop_assert_eq!(squares, t.group_order());
    }

    #[test]
    fn embeddings_are_compatible(n in 1u32..=3, a5 in any::<bool>()) {
        let e = index2_embedding(n, if a5 { Cofactor::A5 } else { Cofactor::A4 }).unwrap();
        for g_class in 0..e.sup.classes().len() {
            let fiber = e.fiber(g_class);
            let fused: u64 = fiber.iter().map(|&i| e.sub.classes()[i].size).sum();
            if e.meets_sub(g_class) {
                // N is normal, so a class meeting N lies in N
                prop_assert_eq!(fused, e.sup.classes()[g_class].size);
            } else {
                prop_assert!(fiber.is_empty());
            }
        }
        for chi in 0..e.sup.num_chars() {
            let coeffs = restrict_character(&e, chi).unwrap();
            for (i, &g_class) in e.class_map.iter().enumerate() {
                let mut value = CycNum::zero(e.sup.conductor());
                for (psi, &c) in coeffs.iter().enumerate() {
                    if c > 0 {
                        let v = e.sub.value(psi, i).lift(e.sup.conductor()).unwrap();
                        value += &v.scale_int(c as i64);
                    }
                }
                prop_assert_eq!(&value, e.sup.value(chi, g_class));
            }
        }
    }
}

/// Block pairs for the checker comparison, each with its context.
fn checker_pairs() -> &'static Vec<Checker> {
    static CELL: OnceLock<Vec<Checker>> = OnceLock::new();
    CELL.get_or_init(|| {
        let block = |t: CharTable, ctx: &PrimeContext| Arc::new(principal_block(&Arc::new(t), ctx).unwrap());
        let mut out = Vec::new();
        for (t, m) in [
            (a4_table(), 3),
            (cyclic_table(4), 4),
            (cyclic_table(8), 8),
            (product_table(&cyclic_table(2), &a4_table()), 6),
            (product_table(&cyclic_table(4), &a4_table()), 12),
        ] {
            let ctx = prime_context(m, 0).unwrap();
            let b = block(t, &ctx);
            out.push(Checker::new(&b, &b, &ctx).unwrap());
        }
        for which in 0..2 {
            let ctx = prime_context(15, which).unwrap();
            let a4 = block(a4_table(), &ctx);
            let a5 = block(a5_table(), &ctx);
            out.push(Checker::new(&a4, &a5, &ctx).unwrap());
            out.push(Checker::new(&a5, &a4, &ctx).unwrap());
        }
        out
    })
}

fn bijection() -> impl Strategy<Value = (usize, Vec<usize>, Vec<i8>)> {
    (0..checker_pairs().len()).prop_flat_map(|c| {
        let k = checker_pairs()[c].source().k();
        (
            Just(c),
            Just((0..k).collect::<Vec<_>>()).prop_shuffle(),
            prop::collection::vec(prop::sample::select(&[1i8, -1][..]), k),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn checkers_agree_on_random_bijections((c, perm, signs) in bijection()) {
        let checker = &checker_pairs()[c];
        prop_assert_eq!(checker.lattice_verdict(&perm, &signs), checker.mu_verdict(&perm, &signs));
    }
}

struct ProductSetup {
    group: Vec<SignedBijection>,
    descent: Descent,
    cover: CoveringData,
}

fn c4_a4() -> &'static ProductSetup {
    static CELL: OnceLock<ProductSetup> = OnceLock::new();
    CELL.get_or_init(|| {
        let e = Arc::new(index2_embedding(2, Cofactor::A4).unwrap());
        let ctx = prime_context(12, 0).unwrap();
        let big = Arc::new(principal_block(&e.sup, &ctx).unwrap());
        let small = Arc::new(principal_block(&e.sub, &ctx).unwrap());
        let group = enumerate_self_perfect(&big, &ctx, &SearchConfig::new(SearchStrategy::ProofGuided))
            .unwrap()
            .isometries;
        let cover = covering_fusion(&e, &big, &small).unwrap();
        let descent = Descent::new(cover.clone(), cover.clone(), &ctx).unwrap();
        ProductSetup { group, descent, cover }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn descent_is_functorial(a in 0usize..384, b in 0usize..384) {
        let s = c4_a4();
        prop_assert_eq!(s.group.len(), 384);
        let (i, j) = (&s.group[a], &s.group[b]);
        let di = s.descent.descend(i).unwrap().descended.unwrap();
        let dj = s.descent.descend(j).unwrap().descended.unwrap();
        let dij = s.descent.descend(&compose(i, j).unwrap()).unwrap().descended.unwrap();
        prop_assert_eq!(dij, compose(&di, &dj).unwrap());
        prop_assert!(perfiso::descent::check_descent_hypothesis(i, &s.cover, &s.cover));
    }
}

#[test]
fn tensors_of_perfect_isometries_are_perfect() {
    let a4_block = Arc::new(Block::whole(Arc::new(a4_table())).unwrap());
    let a4s = a4_family(&a4_block).unwrap();
    for n in 1..=2u32 {
        let m = 1u32 << n;
        let ctx = prime_context(3 * m, 0).unwrap();
        let cyc_block = Arc::new(Block::whole(Arc::new(cyclic_table(m))).unwrap());
        let product = Arc::new(principal_block(&Arc::new(product_table(&cyclic_table(m), &a4_table())), &ctx).unwrap());
        let checker = Checker::new(&product, &product, &ctx).unwrap();
        let cycs = cyclic_family(&cyc_block, false).unwrap();
        assert_eq!(cycs.len(), 1 << (2 * n));
        for c in &cycs {
            for a in &a4s {
                let t = tensor(c, a, &product, &product).unwrap();
                assert_eq!(checker.both(&t), (true, true), "tensor of {c:?} and {a:?}");
            }
        }
    }
}

#[test]
fn sign_flips_of_a_single_character_are_never_perfect() {
    // a negative control across all model blocks: one sign flipped breaks perfection
    for checker in checker_pairs().iter().take(5) {
        let k = checker.source().k();
        let perm: Vec<usize> = (0..k).collect();
        for flip in 0..k {
            let signs: Vec<i8> = (0..k).map(|i| if i == flip { -1 } else { 1 }).collect();
            assert!(!checker.lattice_verdict(&perm, &signs));
            assert!(!checker.mu_verdict(&perm, &signs));
        }
    }
}
