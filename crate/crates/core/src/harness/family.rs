use std::collections::BTreeSet;
use std::sync::Arc;

use super::config::Family;
use super::prng::SplitMix64;
use crate::error::{Error, Result};
use crate::field::{list_subfields, Field, FieldElement};
use crate::setalg::FSet;

fn infeasible(family: Family, size: usize, why: impl std::fmt::Display) -> Error {
    Error::InfeasibleFamily(format!("{} of size {size}: {why}", family.name()))
}

fn random_nonzero(f: &Field, rng: &mut SplitMix64) -> FieldElement {
    FieldElement::from_raw(1 + rng.below(f.order() - 1) as u32)
}

/// A set of the given family and size, determined by `(family, size, seed)`.
///
/// * `interval`: encodings `1..=size` (from 0 when zero is allowed).
/// * `arithmetic_progression`: `a + i d`, with `a` and nonzero `d` drawn and
///   redrawn until the progression avoids 0 if required.
/// * `geometric_progression`: `a r^i` with `a` nonzero and `r` drawn until
///   its multiplicative order is at least `size`.
/// * `multiplicative_subgroup`: generated by `g^{(q-1)/size}` for the
///   smallest primitive element `g`; needs `size | q - 1`. Seed unused.
/// * `subfield_coset`: `λ F` for the subfield `F` with `|F| = size`, or
///   `λ F^*` with `|F| = size + 1` when zero is excluded; `λ` drawn nonzero.
/// * `uniform_random`: Floyd's sampling of `size` distinct indices from the
///   allowed universe (nonzero encodings when zero is excluded).
pub fn generate_set(
    family: Family,
    size: usize,
    seed: u64,
    field: &Arc<Field>,
    exclude_zero: bool,
) -> Result<FSet> {
    let f = &**field;
    let q = f.order();
    let universe = q - exclude_zero as u64;
    if size as u64 > universe {
        return Err(infeasible(family, size, format!("only {universe} admissible elements")));
    }
    if size == 0 {
        return Ok(FSet::empty(field));
    }
    let mut rng = SplitMix64::new(seed);
    let elems: Vec<FieldElement> = match family {
        Family::Interval => {
            let start = exclude_zero as u64;
            (start..start + size as u64).map(|v| FieldElement::from_raw(v as u32)).collect()
        }
        Family::ArithmeticProgression => {
            if size as u64 > f.p() - exclude_zero as u64 {
                return Err(infeasible(family, size, "longer than the additive order"));
            }
            loop {
                let a = FieldElement::from_raw(rng.below(q) as u32);
                let d = random_nonzero(f, &mut rng);
                let ap: Vec<_> = (0..size as u64).map(|i| f.add(a, f.mul(f.from_int(i as i64), d))).collect();
                if !exclude_zero || ap.iter().all(|e| !e.is_zero()) {
                    break ap;
                }
            }
        }
        Family::GeometricProgression => {
            let a = random_nonzero(f, &mut rng);
            let r = loop {
                let r = random_nonzero(f, &mut rng);
                if f.multiplicative_order(r)? >= size as u64 {
                    break r;
                }
            };
            let mut out = Vec::with_capacity(size);
            let mut cur = a;
            for _ in 0..size {
                out.push(cur);
                cur = f.mul(cur, r);
            }
            out
        }
        Family::MultiplicativeSubgroup => {
            if (q - 1) % size as u64 != 0 {
                return Err(infeasible(family, size, format!("size does not divide {}", q - 1)));
            }
            let h = f.pow(f.primitive_element(), (q - 1) / size as u64);
            let mut out = Vec::with_capacity(size);
            let mut cur = f.one();
            for _ in 0..size {
                out.push(cur);
                cur = f.mul(cur, h);
            }
            out
        }
        Family::SubfieldCoset => {
            let target = size as u64 + exclude_zero as u64;
            let sub = list_subfields(f)
                .into_iter()
                .find(|s| s.order() == target)
                .ok_or_else(|| infeasible(family, size, "no subfield of matching order"))?;
            let lambda = random_nonzero(f, &mut rng);
            sub.elements
                .iter()
                .filter(|e| !(exclude_zero && e.is_zero()))
                .map(|&e| f.mul(lambda, e))
                .collect()
        }
        Family::UniformRandom => {
            let mut chosen = BTreeSet::new();
            for j in universe - size as u64..universe {
                let t = rng.below(j + 1);
                if !chosen.insert(t) {
                    chosen.insert(j);
                }
            }
            let offset = exclude_zero as u64;
            chosen.into_iter().map(|i| FieldElement::from_raw((i + offset) as u32)).collect()
        }
    };
    let set = FSet::new(field, elems);
    debug_assert_eq!(set.len(), size);
    Ok(set)
}
