//! Set algebra and exact energy counting over `F_q`.
//!
//! All counts are exact integers. Representation functions accumulate in a
//! dense array when the field is small enough and fall back to sort-and-count
//! otherwise; convolution and energy sums use checked `u128` arithmetic.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{checked_add, checked_mul, Error, Result};
use crate::field::{generated_subfield, Field, FieldElement};

/// Fields up to this order use array-backed accumulation.
pub const DENSE_LIMIT: u64 = 1 << 20;

/// Limit on the number of 8-tuples visited by brute-force `Q`.
pub const BRUTE_FORCE_LIMIT: u128 = 100_000_000;

/// A finite subset of a field, sorted by encoding and duplicate-free.
#[derive(Clone)]
pub struct FSet {
    field: Arc<Field>,
    elems: Vec<FieldElement>,
}

impl PartialEq for FSet {
    fn eq(&self, other: &Self) -> bool {
        self.elems == other.elems && *self.field == *other.field
    }
}

impl Eq for FSet {}

impl std::fmt::Debug for FSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let items: Vec<String> = self.elems.iter().map(|&e| self.field.format(e)).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

impl FSet {
    pub fn new(field: &Arc<Field>, elems: impl IntoIterator<Item = FieldElement>) -> Self {
        let mut elems: Vec<FieldElement> = elems.into_iter().collect();
        elems.sort_unstable();
        elems.dedup();
        FSet {
            field: Arc::clone(field),
            elems,
        }
    }

    /// Integers reduced into the prime subfield.
    pub fn from_ints(field: &Arc<Field>, values: &[i64]) -> Self {
        Self::new(field, values.iter().map(|&v| field.from_int(v)))
    }

    pub fn empty(field: &Arc<Field>) -> Self {
        FSet {
            field: Arc::clone(field),
            elems: Vec::new(),
        }
    }

    pub fn full(field: &Arc<Field>) -> Self {
        FSet {
            field: Arc::clone(field),
            elems: field.elements().collect(),
        }
    }

    /// Builds from an unsorted iterator, choosing bitmap or sort dedup by
    /// density.
    pub(crate) fn collect(field: &Arc<Field>, items: impl IntoIterator<Item = FieldElement>) -> Self {
        let items: Vec<FieldElement> = items.into_iter().collect();
        let q = field.order();
        if q <= DENSE_LIMIT && items.len() as u64 >= q / 32 {
            let mut seen = vec![0u64; (q as usize).div_ceil(64)];
            for e in &items {
                seen[e.index() / 64] |= 1 << (e.index() % 64);
            }
            let elems = seen
                .iter()
                .enumerate()
                .flat_map(|(w, &bits)| {
                    (0..64)
                        .filter(move |b| bits >> b & 1 == 1)
                        .map(move |b| FieldElement::from_raw((w * 64 + b) as u32))
                })
                .collect();
            FSet {
                field: Arc::clone(field),
                elems,
            }
        } else {
            Self::new(field, items)
        }
    }

    #[inline]
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    #[inline]
    pub fn elements(&self) -> &[FieldElement] {
        &self.elems
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.elems.iter().copied()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, x: FieldElement) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    pub fn contains_zero(&self) -> bool {
        self.elems.first().is_some_and(|e| e.is_zero())
    }

    pub fn without_zero(&self) -> FSet {
        FSet {
            field: Arc::clone(&self.field),
            elems: self.elems.iter().copied().filter(|e| !e.is_zero()).collect(),
        }
    }

    pub fn is_subset(&self, other: &FSet) -> bool {
        self.elems.iter().all(|&e| other.contains(e))
    }

    pub fn intersection(&self, other: &FSet) -> Result<FSet> {
        same_field(self, other)?;
        Ok(FSet {
            field: Arc::clone(&self.field),
            elems: self.iter().filter(|&e| other.contains(e)).collect(),
        })
    }

    /// Raw encodings, for serialisation.
    pub fn raw(&self) -> Vec<u32> {
        self.elems.iter().map(|e| e.raw()).collect()
    }
}

pub(crate) fn same_field(a: &FSet, b: &FSet) -> Result<()> {
    if Arc::ptr_eq(&a.field, &b.field) || *a.field == *b.field {
        Ok(())
    } else {
        Err(Error::FieldMismatch)
    }
}

fn combine(
    a: &FSet,
    b: &FSet,
    op: impl Fn(&Field, FieldElement, FieldElement) -> Option<FieldElement>,
) -> Result<FSet> {
    same_field(a, b)?;
    let f = &*a.field;
    let items = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| (x, y)))
        .filter_map(|(x, y)| op(f, x, y));
    Ok(FSet::collect(&a.field, items))
}

/// `A + B`
pub fn sumset(a: &FSet, b: &FSet) -> Result<FSet> {
    combine(a, b, |f, x, y| Some(f.add(x, y)))
}

/// `A - B`
pub fn difference(a: &FSet, b: &FSet) -> Result<FSet> {
    combine(a, b, |f, x, y| Some(f.sub(x, y)))
}

/// `AB`
pub fn productset(a: &FSet, b: &FSet) -> Result<FSet> {
    combine(a, b, |f, x, y| Some(f.mul(x, y)))
}

/// `A / B`, skipping pairs with zero denominator.
pub fn quotient_set(a: &FSet, b: &FSet) -> Result<FSet> {
    combine(a, b, |f, x, y| f.div(x, y).ok())
}

/// `B_1 + ... + B_k`; the empty sum is `{0}`.
pub fn iterated_sumset(field: &Arc<Field>, sets: &[FSet]) -> Result<FSet> {
    let mut acc = FSet::new(field, [field.zero()]);
    for s in sets {
        acc = sumset(&acc, s)?;
    }
    Ok(acc)
}

/// `λA`
pub fn dilate(a: &FSet, lambda: FieldElement) -> Result<FSet> {
    if lambda.is_zero() {
        return Err(Error::ZeroDilation);
    }
    let f = &a.field;
    Ok(FSet::new(f, a.iter().map(|x| f.mul(lambda, x))))
}

/// `A + s`
pub fn translate(a: &FSet, s: FieldElement) -> FSet {
    let f = &a.field;
    FSet::new(f, a.iter().map(|x| f.add(x, s)))
}

/// `A_s = A ∩ (s - A)`
pub fn fiber_set(a: &FSet, s: FieldElement) -> FSet {
    let f = &a.field;
    FSet {
        field: Arc::clone(f),
        elems: a.iter().filter(|&x| a.contains(f.sub(s, x))).collect(),
    }
}

/// `R(A, B) = {(a1 - a2) / (b1 - b2) : b1 ≠ b2}`.
pub fn ratio_set(a: &FSet, b: &FSet) -> Result<FSet> {
    same_field(a, b)?;
    if b.len() < 2 {
        return Err(Error::RatioSetTooSmall(b.len()));
    }
    let numerators = difference(a, a)?;
    let denominators = difference(b, b)?.without_zero();
    quotient_set(&numerators, &denominators)
}

/// Closure tests behind the case split of the `|A + AB|` argument. Each flag is
/// the containment; the corresponding case fires when it is `false`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatioClosureReport {
    pub ratio_set_size: usize,
    /// `1 + R(A,B) ⊆ R(A,B)`
    pub case1: bool,
    /// `B · R(A,B) ⊆ R(A,B)`
    pub case2: bool,
    /// `B^{-1} · R(A,B) ⊆ R(A,B)` over nonzero `b`
    pub case3: bool,
    /// When all three hold: order of the subfield generated by `B`, and whether
    /// `F_B + R(A,B) ⊆ R(A,B)`.
    pub generated_subfield_order: Option<u64>,
    pub subfield_absorbs: Option<bool>,
}

impl RatioClosureReport {
    pub fn case4(&self) -> bool {
        self.case1 && self.case2 && self.case3
    }
}

pub fn ratio_closure_probe(a: &FSet, b: &FSet) -> Result<RatioClosureReport> {
    let r = ratio_set(a, b)?;
    let f = &*a.field;
    let case1 = r.iter().all(|x| r.contains(f.add(f.one(), x)));
    let case2 = b.iter().all(|s| r.iter().all(|x| r.contains(f.mul(s, x))));
    let case3 = b
        .iter()
        .filter_map(|s| f.inv(s).ok())
        .all(|si| r.iter().all(|x| r.contains(f.mul(si, x))));
    let (generated_subfield_order, subfield_absorbs) = if case1 && case2 && case3 {
        let sub = generated_subfield(b);
        let absorbs = sub
            .elements
            .iter()
            .all(|&u| r.iter().all(|x| r.contains(f.add(u, x))));
        (Some(sub.order()), Some(absorbs))
    } else {
        (None, None)
    };
    Ok(RatioClosureReport {
        ratio_set_size: r.len(),
        case1,
        case2,
        case3,
        generated_subfield_order,
        subfield_absorbs,
    })
}

/// Exact representation counts `r(x)` over `F_q`, stored by support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepFunction {
    field: Arc<Field>,
    support: Vec<(FieldElement, u128)>,
    total: u128,
}

impl RepFunction {
    /// Counts each item once.
    pub fn from_items(field: &Arc<Field>, items: impl IntoIterator<Item = FieldElement>) -> Self {
        let mut items: Vec<FieldElement> = items.into_iter().collect();
        let total = items.len() as u128;
        let q = field.order();
        let support = if q <= DENSE_LIMIT && items.len() as u64 >= q / 8 {
            let mut counts = vec![0u64; q as usize];
            for e in &items {
                counts[e.index()] += 1;
            }
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (FieldElement::from_raw(i as u32), c as u128))
                .collect()
        } else {
            items.sort_unstable();
            let mut support: Vec<(FieldElement, u128)> = Vec::new();
            for e in items {
                match support.last_mut() {
                    Some((x, c)) if *x == e => *c += 1,
                    _ => support.push((e, 1)),
                }
            }
            support
        };
        RepFunction {
            field: Arc::clone(field),
            support,
            total,
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn get(&self, x: FieldElement) -> u128 {
        self.support
            .binary_search_by_key(&x, |&(e, _)| e)
            .map_or(0, |i| self.support[i].1)
    }

    /// Nonzero entries in encoding order.
    pub fn support(&self) -> &[(FieldElement, u128)] {
        &self.support
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    /// Additive convolution `(r ⊛ s)(x) = Σ_{y+z=x} r(y) s(z)`, by a direct
    /// double loop over the supports.
    pub fn convolve(&self, other: &RepFunction) -> Result<RepFunction> {
        if *self.field != *other.field {
            return Err(Error::FieldMismatch);
        }
        let f = &*self.field;
        let q = f.order();
        let pairs = self.support.len() as u64 * other.support.len() as u64;
        let support = if q <= DENSE_LIMIT && pairs >= q / 8 {
            let mut counts = vec![0u128; q as usize];
            for &(x, cx) in &self.support {
                for &(y, cy) in &other.support {
                    let s = f.add(x, y).index();
                    counts[s] = checked_add(counts[s], checked_mul(cx, cy)?)?;
                }
            }
            counts
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c > 0)
                .map(|(i, c)| (FieldElement::from_raw(i as u32), c))
                .collect()
        } else {
            let mut counts: BTreeMap<FieldElement, u128> = BTreeMap::new();
            for &(x, cx) in &self.support {
                for &(y, cy) in &other.support {
                    let slot = counts.entry(f.add(x, y)).or_insert(0);
                    *slot = checked_add(*slot, checked_mul(cx, cy)?)?;
                }
            }
            counts.into_iter().collect()
        };
        Ok(RepFunction {
            field: Arc::clone(&self.field),
            support,
            total: checked_mul(self.total, other.total)?,
        })
    }

    /// `Σ_x r(x)^2`
    pub fn sum_of_squares(&self) -> Result<u128> {
        self.support
            .iter()
            .try_fold(0u128, |acc, &(_, c)| checked_add(acc, checked_mul(c, c)?))
    }
}

/// `r_{A+B}`
pub fn rep_add(a: &FSet, b: &FSet) -> Result<RepFunction> {
    same_field(a, b)?;
    let f = &*a.field;
    Ok(RepFunction::from_items(
        &a.field,
        a.iter().flat_map(|x| b.iter().map(move |y| f.add(x, y))),
    ))
}

/// `r_{AB}`
pub fn rep_mul(a: &FSet, b: &FSet) -> Result<RepFunction> {
    same_field(a, b)?;
    let f = &*a.field;
    Ok(RepFunction::from_items(
        &a.field,
        a.iter().flat_map(|x| b.iter().map(move |y| f.mul(x, y))),
    ))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMethod {
    Convolution,
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnergyReport {
    pub value: u128,
    pub method: EnergyMethod,
    pub operand_sizes: Vec<usize>,
}

/// `E+(A) = #{a + b = c + d}`
pub fn additive_energy(a: &FSet) -> Result<EnergyReport> {
    Ok(EnergyReport {
        value: rep_add(a, a)?.sum_of_squares()?,
        method: EnergyMethod::Convolution,
        operand_sizes: vec![a.len()],
    })
}

/// `E×(A, B) = #{a1 b1 = a2 b2}`
pub fn mult_energy(a: &FSet, b: &FSet) -> Result<EnergyReport> {
    Ok(EnergyReport {
        value: rep_mul(a, b)?.sum_of_squares()?,
        method: EnergyMethod::Convolution,
        operand_sizes: vec![a.len(), b.len()],
    })
}

/// `Q(A,B,C,D) = #{a1 b1 + c1 d1 = a2 b2 + c2 d2}`.
pub fn bilinear_energy_q(
    a: &FSet,
    b: &FSet,
    c: &FSet,
    d: &FSet,
    method: EnergyMethod,
) -> Result<EnergyReport> {
    same_field(a, b)?;
    same_field(a, c)?;
    same_field(a, d)?;
    let value = match method {
        EnergyMethod::Convolution => rep_mul(a, b)?.convolve(&rep_mul(c, d)?)?.sum_of_squares()?,
        EnergyMethod::BruteForce => q_brute_force(a, b, c, d)?,
    };
    Ok(EnergyReport {
        value,
        method,
        operand_sizes: vec![a.len(), b.len(), c.len(), d.len()],
    })
}

fn q_brute_force(a: &FSet, b: &FSet, c: &FSet, d: &FSet) -> Result<u128> {
    let quads = (a.len() * b.len()) as u128 * (c.len() * d.len()) as u128;
    let needed = quads * quads;
    if needed > BRUTE_FORCE_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "brute-force Q",
            needed,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let f = &*a.field;
    let mut count = 0u128;
    for a1 in a.iter() {
        for b1 in b.iter() {
            for c1 in c.iter() {
                for d1 in d.iter() {
                    let lhs = f.add(f.mul(a1, b1), f.mul(c1, d1));
                    for a2 in a.iter() {
                        for b2 in b.iter() {
                            for c2 in c.iter() {
                                for d2 in d.iter() {
                                    if f.add(f.mul(a2, b2), f.mul(c2, d2)) == lhs {
                                        count += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `#{a1 a2 + a3 a4 = a1' a2' + a3' a4'}`, i.e. `Q(A,A,A,A)`.
pub fn lemma22_count(a: &FSet) -> Result<EnergyReport> {
    bilinear_energy_q(a, a, a, a, EnergyMethod::Convolution)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftedIntersectionReport {
    /// `max_{x ≠ 0} |A ∩ (B + x)|`
    pub max: usize,
    /// Smallest nonzero shift attaining `max`.
    pub argmax: FieldElement,
    /// `max^4 |A|^2` and `|AB|^5`; the fourth power of `max / (|A|^{-1/2} |AB|^{5/4})`.
    pub ratio_pow4_num: u128,
    pub ratio_pow4_den: u128,
    pub rhs_ratio: f64,
    /// `|A|^2 |AB| / q^2`, the size hypothesis of the bound.
    pub hypothesis_ratio: f64,
}

pub fn max_shifted_intersection(a: &FSet, b: &FSet) -> Result<ShiftedIntersectionReport> {
    same_field(a, b)?;
    let f = &*a.field;
    let shifts = RepFunction::from_items(
        &a.field,
        a.iter().flat_map(|x| b.iter().map(move |y| f.sub(x, y))),
    );
    let (argmax, max) = shifts
        .support()
        .iter()
        .filter(|(x, _)| !x.is_zero())
        .fold((f.one(), 0u128), |best, &(x, c)| if c > best.1 { (x, c) } else { best });
    let ab = productset(a, b)?.len() as u128;
    let na = a.len() as u128;
    let num = checked_mul(max.pow(4), na * na)?;
    let den = ab.checked_pow(5).ok_or(Error::Overflow)?;
    let rhs_ratio = if ab == 0 {
        0.0
    } else {
        max as f64 * (na as f64).sqrt() / (ab as f64).powf(1.25)
    };
    let q = f.order() as f64;
    Ok(ShiftedIntersectionReport {
        max: max as usize,
        argmax,
        ratio_pow4_num: num,
        ratio_pow4_den: den,
        rhs_ratio,
        hypothesis_ratio: (na * na * ab) as f64 / (q * q),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrDifferenceCheck {
    /// `|B1 - B2|`
    pub lhs: u128,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrReport {
    /// `|B1 + ... + Bk|`
    pub lhs: u128,
    /// `Π |X + Bi|`
    pub rhs_num: u128,
    /// `|X|^{k-1}`
    pub rhs_den: u128,
    pub ok: bool,
    /// The difference form, for `k = 2`.
    pub difference: Option<PrDifferenceCheck>,
}

/// Checks `|B1 + ... + Bk| <= Π|X + Bi| / |X|^{k-1}` exactly, and for `k = 2`
/// also `|B1 - B2| <= |X + B1||X + B2| / |X|`.
pub fn pr_inequality_check(x: &FSet, bs: &[FSet]) -> Result<PrReport> {
    if x.is_empty() {
        return Err(Error::Invalid("X must be nonempty".into()));
    }
    if bs.is_empty() {
        return Err(Error::Invalid("need at least one B_i".into()));
    }
    let lhs = iterated_sumset(x.field(), bs)?.len() as u128;
    let mut rhs_num = 1u128;
    for bi in bs {
        rhs_num = checked_mul(rhs_num, sumset(x, bi)?.len() as u128)?;
    }
    let nx = x.len() as u128;
    let rhs_den = nx.checked_pow(bs.len() as u32 - 1).ok_or(Error::Overflow)?;
    let ok = checked_mul(lhs, rhs_den)? <= rhs_num;
    let difference = if bs.len() == 2 {
        let lhs = difference(&bs[0], &bs[1])?.len() as u128;
        Some(PrDifferenceCheck {
            lhs,
            ok: lhs * nx <= rhs_num,
        })
    } else {
        None
    };
    Ok(PrReport {
        lhs,
        rhs_num,
        rhs_den,
        ok,
        difference,
    })
}
