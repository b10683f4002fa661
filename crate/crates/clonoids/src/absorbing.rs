//! The unique splitting of a finitary function into summands that are
//! 0-absorbing in the subsets of factor blocks, computed per codomain
//! component by inclusion-exclusion over block maskings.

use crate::error::Result;
use crate::ffield::RingElement;
use crate::funcspace::{dep_set, zero_mask_index, FiniteFunction};
use std::collections::BTreeSet;

/// One summand of the decomposition: a function that is 0-absorbing in
/// `index_set`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsorbingComponent {
    pub index_set: BTreeSet<usize>,
    pub function: FiniteFunction,
}

fn mask_of(set: &BTreeSet<usize>) -> u32 {
    set.iter().fold(0u32, |m, &i| m | 1 << i)
}

fn set_of(mask: u32, m: usize) -> BTreeSet<usize> {
    (0..m).filter(|&i| mask >> i & 1 == 1).collect()
}

/// True iff Dep(f) is contained in `index_set` and f vanishes on every point
/// whose i-th block is zero in all arguments, for each i in the set.
pub fn is_absorbing(f: &FiniteFunction, index_set: &BTreeSet<usize>) -> bool {
    if !dep_set(f).is_subset(index_set) {
        return false;
    }
    let arity = f.arity();
    for &i in index_set {
        let drop_mask = !(1u32 << i);
        for (idx, value) in f.table().iter().enumerate() {
            // Block i is all-zero exactly when zeroing it changes nothing.
            if zero_mask_index(f.domain(), arity, idx, drop_mask) == idx && !value.is_zero() {
                return false;
            }
        }
    }
    true
}

/// The component f_I via inclusion-exclusion:
/// f_I(a) = sum over J contained in I of (-1)^(|I|+|J|) f(a^(J)),
/// with the signs reduced into each codomain component.
pub fn component(f: &FiniteFunction, index_set: &BTreeSet<usize>) -> Result<FiniteFunction> {
    let mask = mask_of(index_set);
    component_by_mask(f, mask)
}

fn component_by_mask(f: &FiniteFunction, mask: u32) -> Result<FiniteFunction> {
    let cod = f.codomain().clone();
    let size = mask.count_ones();
    let mut table: Vec<RingElement> = Vec::with_capacity(f.table().len());
    for idx in 0..f.table().len() {
        let mut acc = cod.zero();
        let mut sub = mask;
        loop {
            let masked = zero_mask_index(f.domain(), f.arity(), idx, sub);
            let term = &f.table()[masked];
            let positive = (size + sub.count_ones()) % 2 == 0;
            acc = if positive {
                cod.add(&acc, term)?
            } else {
                cod.add(&acc, &cod.neg(term)?)?
            };
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        table.push(acc);
    }
    FiniteFunction::new(f.domain().clone(), cod, f.arity(), table)
}

/// All 2^m components, listed by subset in increasing bitmask order. Their
/// pointwise sum reconstructs f, each is 0-absorbing in its index set, and
/// the sequence with these properties is unique.
pub fn decompose(f: &FiniteFunction) -> Result<Vec<AbsorbingComponent>> {
    let m = f.domain().num_factors();
    (0..1u32 << m)
        .map(|mask| {
            Ok(AbsorbingComponent {
                index_set: set_of(mask, m),
                function: component_by_mask(f, mask)?,
            })
        })
        .collect()
}
