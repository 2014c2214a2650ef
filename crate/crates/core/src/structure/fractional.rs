//! The two simple fractional constructions: fractional first-fit over small
//! items and one configuration per item.

use num::integer::Integer;
use num::rational::BigRational;
use num::{BigInt, One, Signed, ToPrimitive, Zero};

use super::context::StructureContext;
use crate::error::{Error, Result};
use crate::model::{Configuration, CoverVector, FractionalSolution, ItemId};

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub(crate) fn check_unit_box(y: &CoverVector<BigRational>) -> Result<()> {
    for (id, v) in y.iter() {
        if v.is_negative() || *v > BigRational::one() {
            return Err(Error::input(format!("entry for item {id} is {v}, outside [0,1]")));
        }
    }
    Ok(())
}

/// `N·y_i` as a machine integer.
pub(crate) fn copies(n: &BigInt, v: &BigRational) -> Result<usize> {
    let c = BigRational::from_integer(n.clone()) * v;
    debug_assert!(c.is_integer());
    c.to_integer()
        .to_usize()
        .ok_or(Error::Capacity {
            what: "configuration copies",
            size: usize::MAX,
            limit: usize::MAX,
            hint: "; common denominator too large",
        })
}

/// A run of identical configurations.
struct Block {
    ids: Vec<ItemId>,
    weight: BigRational,
    count: usize,
}

/// Runs first-fit over `N` copies of each configuration slot: item `i` goes
/// into the first `N·y_i` open configurations it fits in, and singletons are
/// opened for whatever is missing.
pub fn fractional_first_fit(
    ctx: &StructureContext,
    y: &CoverVector<BigRational>,
) -> Result<FractionalSolution<BigRational>> {
    check_unit_box(y)?;
    for id in y.support() {
        if !ctx.items.contains(&id) || ctx.is_large(id) {
            return Err(Error::input(format!("item {id} is not a small item of the packed set")));
        }
    }
    let n = common_denominator(y.iter().map(|(_, v)| v));
    let mut blocks: Vec<Block> = Vec::new();
    for id in y.support() {
        let mut need = copies(&n, &y.get(id))?;
        let w = ctx.weight(id).clone();
        let mut b = 0;
        while b < blocks.len() && need > 0 {
            let fits = blocks[b].ids.len() < ctx.k && blocks[b].weight.clone() + &w <= BigRational::one();
            if fits {
                if blocks[b].count > need {
                    let rest = blocks[b].count - need;
                    blocks[b].count = need;
                    let split = Block {
                        ids: blocks[b].ids.clone(),
                        weight: blocks[b].weight.clone(),
                        count: rest,
                    };
                    blocks.insert(b + 1, split);
                }
                blocks[b].ids.push(id);
                blocks[b].weight += &w;
                need -= blocks[b].count;
            }
            b += 1;
        }
        if need > 0 {
            blocks.push(Block {
                ids: vec![id],
                weight: w,
                count: need,
            });
        }
    }
    let nr = BigRational::from_integer(n);
    let mut x = FractionalSolution::new();
    for blk in blocks {
        x.add(Configuration::new(blk.ids), BigRational::from_integer(BigInt::from(blk.count)) / nr.clone());
    }
    Ok(x)
}

/// `x_{{i}} = y_i`.
pub fn item_per_bin(y: &CoverVector<BigRational>) -> Result<FractionalSolution<BigRational>> {
    check_unit_box(y)?;
    let mut x = FractionalSolution::new();
    for (id, v) in y.iter() {
        if !v.is_zero() {
            x.add(Configuration::singleton(*id), v.clone());
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Instance, Item};
    use crate::scalar::rat;
    use crate::structure::context::build_context;
    use proptest::prelude::*;

    fn ctx_with(weights: &[f64], k: usize) -> StructureContext {
        let items = weights.iter().enumerate().map(|(i, &w)| Item::new(i as u32, w, 1.0)).collect();
        let inst = Instance::new(items, 1, k).unwrap();
        // one item per configuration keeps the packing valid for any weights
        let packing = (0..weights.len()).map(|i| Configuration::singleton(ItemId(i as u32))).collect::<Vec<_>>();
        build_context(&inst, &packing, &rat(1, 2)).unwrap()
    }

    #[test]
    fn two_items_share_a_configuration() {
        // k = 10: w̃ = 0.2 + 0.1 = 0.3 < 1/2
        let ctx = ctx_with(&[0.2, 0.2], 10);
        let y = CoverVector::from_entries(vec![(ItemId(0), rat(1, 1)), (ItemId(1), rat(1, 1))]);
        let x = fractional_first_fit(&ctx, &y).unwrap();
        assert_eq!(x.size(), rat(1, 1));
        assert_eq!(x.cover(), y);
        assert_eq!(x.support_len(), 1);
    }

    #[test]
    fn zero_vector() {
        let ctx = ctx_with(&[0.2], 10);
        assert_eq!(fractional_first_fit(&ctx, &CoverVector::new()).unwrap().support_len(), 0);
        assert_eq!(item_per_bin(&CoverVector::new()).unwrap().support_len(), 0);
    }

    #[test]
    fn rejects_large_items() {
        let ctx = ctx_with(&[0.45, 0.1], 10);
        let y = CoverVector::from_entries(vec![(ItemId(0), rat(1, 2))]);
        assert!(fractional_first_fit(&ctx, &y).is_err());
    }

    #[test]
    fn item_per_bin_examples() {
        let y = CoverVector::from_entries(vec![(ItemId(0), rat(1, 2)), (ItemId(1), rat(1, 4))]);
        let x = item_per_bin(&y).unwrap();
        assert_eq!(x.size(), rat(3, 4));
        assert_eq!(x.cover(), y);
        let ones = CoverVector::from_entries((0..7).map(|i| (ItemId(i), rat(1, 1))));
        assert_eq!(item_per_bin(&ones).unwrap().size(), rat(7, 1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn first_fit_cover_and_norm(
            entries in prop::collection::vec((1u32..40, 0i64..=6, 1i64..=6), 20),
            k in 3usize..12,
        ) {
            let weights: Vec<f64> = entries.iter().map(|e| e.0 as f64 / 100.0).collect();
            let ctx = ctx_with(&weights, k);
            let y = CoverVector::from_entries(entries.iter().enumerate().filter_map(|(i, &(_, a, b))| {
                let id = ItemId(i as u32);
                (!ctx.is_large(id)).then(|| (id, rat(a.min(b), b)))
            }));
            let x = fractional_first_fit(&ctx, &y).unwrap();
            prop_assert_eq!(x.cover(), y.clone());
            let bound = y.iter().fold(rat(1, 1), |a, (id, v)| a + rat(2, 1) * v * ctx.adjusted(*id));
            prop_assert!(x.size() <= bound);
            for (c, _) in x.iter() {
                prop_assert!(ctx.is_configuration(c.ids()));
            }
            let z = item_per_bin(&y).unwrap();
            prop_assert_eq!(z.cover(), y.clone());
            prop_assert_eq!(z.size(), y.norm());
        }
    }
}
