//! `SL_2(F_p)` and the restricted-entry sets `R(A)`.
//!
//! A product `M1·M2` of members of `R(A)` with top-left entry `t ≠ 0` is
//! determined by `(t, α, β)`, its first row and column:
//!
//! ```text
//! t = a11 b11 + a12 b21,   α = (b12 t + a12) / b11,   β = (a21 t + b21) / a11
//! ```
//!
//! [`nu_statistics`] counts 6-tuples through these formulas, while
//! [`product_set`] multiplies matrices; the two paths are checked against each
//! other.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{guard, Budgets};
use crate::error::{checked_add, checked_mul, Error, Result};
use crate::field::{Field, FieldElement};
use crate::keys::{distinct_keys, run_lengths};
use crate::setalg::{productset, sumset, FSet};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatSL2 {
    pub a11: FieldElement,
    pub a12: FieldElement,
    pub a21: FieldElement,
    pub a22: FieldElement,
}

impl MatSL2 {
    pub fn new(
        field: &Field,
        a11: FieldElement,
        a12: FieldElement,
        a21: FieldElement,
        a22: FieldElement,
    ) -> Result<Self> {
        let m = MatSL2 { a11, a12, a21, a22 };
        if m.det(field) != field.one() {
            return Err(Error::NotUnimodular);
        }
        Ok(m)
    }

    pub fn identity(field: &Field) -> Self {
        MatSL2 {
            a11: field.one(),
            a12: field.zero(),
            a21: field.zero(),
            a22: field.one(),
        }
    }

    pub fn det(&self, f: &Field) -> FieldElement {
        f.sub(f.mul(self.a11, self.a22), f.mul(self.a12, self.a21))
    }

    /// Adjugate, which is the inverse when the determinant is 1.
    pub fn inverse(&self, f: &Field) -> Self {
        MatSL2 {
            a11: self.a22,
            a12: f.neg(self.a12),
            a21: f.neg(self.a21),
            a22: self.a11,
        }
    }

    /// Bijective code in `[0, p^3 + p^2)`: `(a11, a12, a21)` when `a11 ≠ 0`,
    /// otherwise `(a12, a22)` since then `a21 = -1/a12`.
    pub fn key(&self, f: &Field) -> u64 {
        let p = f.p();
        if !self.a11.is_zero() {
            (self.a11.raw() as u64 * p + self.a12.raw() as u64) * p + self.a21.raw() as u64
        } else {
            p * p * p + self.a12.raw() as u64 * p + self.a22.raw() as u64
        }
    }

    pub fn from_key(f: &Field, key: u64) -> Self {
        let p = f.p();
        let e = |v: u64| FieldElement::from_raw(v as u32);
        if key < p * p * p {
            let (a11, a12, a21) = (e(key / (p * p)), e(key / p % p), e(key % p));
            let a22 = f.div(f.add(f.one(), f.mul(a12, a21)), a11).expect("a11 ≠ 0");
            MatSL2 { a11, a12, a21, a22 }
        } else {
            let rest = key - p * p * p;
            let (a12, a22) = (e(rest / p), e(rest % p));
            let a21 = f.neg(f.inv(a12).expect("a12 ≠ 0 when a11 = 0"));
            MatSL2 {
                a11: f.zero(),
                a12,
                a21,
                a22,
            }
        }
    }
}

pub(crate) fn key_universe(f: &Field) -> u64 {
    let p = f.p();
    p * p * p + p * p
}

pub fn mat_mul(f: &Field, m1: &MatSL2, m2: &MatSL2) -> MatSL2 {
    let dot = |a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement| {
        f.add(f.mul(a, b), f.mul(c, d))
    };
    let out = MatSL2 {
        a11: dot(m1.a11, m2.a11, m1.a12, m2.a21),
        a12: dot(m1.a11, m2.a12, m1.a12, m2.a22),
        a21: dot(m1.a21, m2.a11, m1.a22, m2.a21),
        a22: dot(m1.a21, m2.a12, m1.a22, m2.a22),
    };
    debug_assert_eq!(out.det(f), f.one());
    out
}

/// Distinct elements of `SL_2(F_p)`, sorted by [`MatSL2::key`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatSet {
    field: Arc<Field>,
    keys: Vec<u64>,
}

impl MatSet {
    pub fn new(field: &Arc<Field>, mats: impl IntoIterator<Item = MatSL2>) -> Self {
        let mut keys: Vec<u64> = mats.into_iter().map(|m| m.key(field)).collect();
        keys.sort_unstable();
        keys.dedup();
        MatSet {
            field: Arc::clone(field),
            keys,
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn contains(&self, m: &MatSL2) -> bool {
        self.keys.binary_search(&m.key(&self.field)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = MatSL2> + '_ {
        self.keys.iter().map(|&k| MatSL2::from_key(&self.field, k))
    }

    /// Members with nonzero top-left entry.
    pub fn count_nonzero_t(&self) -> usize {
        let p = self.field.p();
        self.keys.partition_point(|&k| k < p * p * p)
    }
}

fn require_prime(a: &FSet, what: &'static str) -> Result<()> {
    if a.field().is_prime_field() {
        Ok(())
    } else {
        Err(Error::NotPrimeField(what))
    }
}

/// `R(A)`: matrices of `SL_2(F_p)` with `a11, a12, a21 ∈ A`.
pub fn build_r(a: &FSet) -> Result<MatSet> {
    require_prime(a, "R(A)")?;
    let f = &**a.field();
    let mut mats = Vec::new();
    for a11 in a.iter() {
        for a12 in a.iter() {
            for a21 in a.iter() {
                let num = f.add(f.one(), f.mul(a12, a21));
                if !a11.is_zero() {
                    mats.push(MatSL2 {
                        a11,
                        a12,
                        a21,
                        a22: f.div(num, a11)?,
                    });
                } else if num.is_zero() {
                    mats.extend(f.elements().map(|a22| MatSL2 { a11, a12, a21, a22 }));
                }
            }
        }
    }
    Ok(MatSet::new(a.field(), mats))
}

/// Distinct products `{m1 m2 : m1 ∈ S1, m2 ∈ S2}`.
pub fn product_set(s1: &MatSet, s2: &MatSet, budgets: &Budgets) -> Result<MatSet> {
    if *s1.field != *s2.field {
        return Err(Error::FieldMismatch);
    }
    guard(
        "SL2 product set",
        s1.len() as u128 * s2.len() as u128,
        budgets.product_pairs as u128,
    )?;
    let f = &*s1.field;
    let left: Vec<MatSL2> = s1.iter().collect();
    let right: Vec<MatSL2> = s2.iter().collect();
    let keys = distinct_keys(key_universe(f), left.len(), |i, emit| {
        for m2 in &right {
            emit(mat_mul(f, &left[i], m2).key(f));
        }
    });
    Ok(MatSet {
        field: Arc::clone(&s1.field),
        keys,
    })
}

/// `R(A)·R(A)`
pub fn r_product_set(a: &FSet, budgets: &Budgets) -> Result<MatSet> {
    guard("|A| for R(A)·R(A)", a.len() as u128, budgets.sl2_max_size as u128)?;
    let r = build_r(a)?;
    product_set(&r, &r, budgets)
}

/// Collision statistics of the 6-tuples `(a11, a12, a21, b11, b12, b21) ∈ A^6`
/// under the `(t, α, β)` parametrisation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NuStats {
    /// Number of triples `(t, α, β)` with `t ≠ 0` and `ν > 0`.
    pub support: u64,
    /// `Σ_{t≠0} ν(t, α, β)`
    pub nonzero_t_total: u128,
    /// `Σ_{α,β} ν(0, α, β)`
    pub zero_t_total: u128,
    /// Distinct products with `t = 0`, which `(t, α, β)` does not separate.
    pub zero_t_distinct: u64,
    /// `T = Σ_{t≠0} ν^2`
    pub nu_sq_sum: u128,
    /// `Ω(t) = Σ_{α,β} ν(t, α, β)^2` for each `t ≠ 0` that occurs.
    pub omega: BTreeMap<u32, u128>,
    /// `Σ_t r(t)^2` where `r(t) = #{a11 b11 + a12 b21 = t}`.
    pub t_collisions: u128,
}

struct Quad {
    a11: FieldElement,
    b11: FieldElement,
    a12: FieldElement,
    b21: FieldElement,
}

fn quads_by_t(a: &FSet) -> Vec<Vec<Quad>> {
    let f = &**a.field();
    let mut buckets: Vec<Vec<Quad>> = (0..f.p()).map(|_| Vec::new()).collect();
    for a11 in a.iter() {
        for b11 in a.iter() {
            let ab = f.mul(a11, b11);
            for a12 in a.iter() {
                for b21 in a.iter() {
                    let t = f.add(ab, f.mul(a12, b21));
                    buckets[t.index()].push(Quad { a11, b11, a12, b21 });
                }
            }
        }
    }
    buckets
}

fn nu_preconditions(a: &FSet, budgets: &Budgets) -> Result<()> {
    require_prime(a, "ν statistics")?;
    if a.contains_zero() {
        return Err(Error::ZeroInSet("the (t, α, β) parametrisation"));
    }
    guard("|A| for ν statistics", a.len() as u128, budgets.sl2_max_size as u128)
}

pub fn nu_statistics(a: &FSet, budgets: &Budgets) -> Result<NuStats> {
    nu_preconditions(a, budgets)?;
    let f = &**a.field();
    let p = f.p();
    let n2 = (a.len() * a.len()) as u128;
    let buckets = quads_by_t(a);
    let elems = a.elements();

    let t_collisions = buckets
        .iter()
        .try_fold(0u128, |acc, b| checked_add(acc, (b.len() as u128).pow(2)))?;

    let per_t: Vec<(u32, u64, u128)> = buckets
        .par_iter()
        .enumerate()
        .skip(1)
        .filter(|(_, b)| !b.is_empty())
        .map(|(t, bucket)| {
            let t = FieldElement::from_raw(t as u32);
            let mut keys = Vec::with_capacity(bucket.len() * elems.len() * elems.len());
            for q in bucket {
                let b11i = f.inv(q.b11).expect("0 ∉ A");
                let a11i = f.inv(q.a11).expect("0 ∉ A");
                for &b12 in elems {
                    let alpha = f.mul(f.add(f.mul(b12, t), q.a12), b11i);
                    for &a21 in elems {
                        let beta = f.mul(f.add(f.mul(a21, t), q.b21), a11i);
                        keys.push(alpha.raw() as u64 * p + beta.raw() as u64);
                    }
                }
            }
            keys.sort_unstable();
            let mut support = 0u64;
            let mut omega = 0u128;
            for run in run_lengths(&keys) {
                support += 1;
                omega += (run as u128).pow(2);
            }
            (t.raw(), support, omega)
        })
        .collect();

    let mut stats = NuStats {
        support: 0,
        nonzero_t_total: 0,
        zero_t_total: checked_mul(buckets[0].len() as u128, n2)?,
        zero_t_distinct: 0,
        nu_sq_sum: 0,
        omega: BTreeMap::new(),
        t_collisions,
    };
    for (t, support, omega) in per_t {
        stats.support += support;
        stats.nu_sq_sum = checked_add(stats.nu_sq_sum, omega)?;
        stats.omega.insert(t, omega);
        stats.nonzero_t_total = checked_add(
            stats.nonzero_t_total,
            buckets[t as usize].len() as u128 * n2,
        )?;
    }

    // t = 0: the product is [[0, α], [β, δ]] with β = -1/α, keyed by (α, δ)
    let mut zero_keys = Vec::with_capacity(buckets[0].len() * elems.len() * elems.len());
    for q in &buckets[0] {
        let alpha = f.div(q.a12, q.b11)?;
        for &a21 in elems {
            let a22 = f.div(f.add(f.one(), f.mul(q.a12, a21)), q.a11)?;
            for &b12 in elems {
                let b22 = f.div(f.add(f.one(), f.mul(b12, q.b21)), q.b11)?;
                let delta = f.add(f.mul(a21, b12), f.mul(a22, b22));
                zero_keys.push(alpha.raw() as u64 * p + delta.raw() as u64);
            }
        }
    }
    zero_keys.sort_unstable();
    zero_keys.dedup();
    stats.zero_t_distinct = zero_keys.len() as u64;
    Ok(stats)
}

/// Full table `ν(t, α, β)` including the `t = 0` bucket, keyed by raw
/// encodings. Memory grows like `|A|^6`; intended for small sets.
pub fn nu_table(a: &FSet, budgets: &Budgets) -> Result<BTreeMap<(u32, u32, u32), u64>> {
    nu_preconditions(a, budgets)?;
    let f = &**a.field();
    let mut table = BTreeMap::new();
    for a11 in a.iter() {
        for a12 in a.iter() {
            for a21 in a.iter() {
                for b11 in a.iter() {
                    for b12 in a.iter() {
                        for b21 in a.iter() {
                            let t = f.add(f.mul(a11, b11), f.mul(a12, b21));
                            let alpha = f.div(f.add(f.mul(b12, t), a12), b11)?;
                            let beta = f.div(f.add(f.mul(a21, t), b21), a11)?;
                            *table.entry((t.raw(), alpha.raw(), beta.raw())).or_insert(0) += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CsCertificate {
    /// Distinct products in `R(A)·R(A)` with `t ≠ 0`, from matrix products.
    pub lhs: u64,
    /// `Σ_{t≠0} ν`
    pub nu_total: u128,
    /// `T`
    pub nu_sq_sum: u128,
    /// `lhs · T >= (Σ_{t≠0} ν)^2`
    pub ok: bool,
}

/// Cauchy–Schwarz lower bound `|R(A)·R(A)|_{t≠0} >= (Σ ν)^2 / T`.
pub fn cs_lower_bound_certificate(a: &FSet, budgets: &Budgets) -> Result<CsCertificate> {
    let nu = nu_statistics(a, budgets)?;
    let prod = r_product_set(a, budgets)?;
    cs_certificate_from(&prod, &nu)
}

/// [`cs_lower_bound_certificate`] from an already computed `R(A)·R(A)` and `ν`.
pub fn cs_certificate_from(prod: &MatSet, nu: &NuStats) -> Result<CsCertificate> {
    let lhs = prod.count_nonzero_t() as u64;
    let lhs_t = checked_mul(lhs as u128, nu.nu_sq_sum)?;
    let sq = checked_mul(nu.nonzero_t_total, nu.nonzero_t_total)?;
    Ok(CsCertificate {
        lhs,
        nu_total: nu.nonzero_t_total,
        nu_sq_sum: nu.nu_sq_sum,
        ok: lhs_t >= sq,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContainmentCertificate {
    /// `|R(A)·R(A)|`
    pub lhs: u64,
    /// `|(AA + AA) \ {0}|`
    pub aa_aa_nonzero: u64,
    /// `|(AA + AA) \ {0}| · |A|^2`
    pub rhs: u128,
    pub ok: bool,
}

/// `|R(A)·R(A)| >= |(AA + AA) \ {0}| · |A|^2`: fixing a representation of each
/// nonzero `t`, `α` and `β` range injectively over `b12` and `a21`.
pub fn containment_certificate(a: &FSet, budgets: &Budgets) -> Result<ContainmentCertificate> {
    require_prime(a, "containment certificate")?;
    if a.contains_zero() {
        return Err(Error::ZeroInSet("containment certificate"));
    }
    let prod = r_product_set(a, budgets)?;
    containment_certificate_from(a, &prod)
}

/// [`containment_certificate`] with `prod = R(A)·R(A)` already computed.
pub fn containment_certificate_from(a: &FSet, prod: &MatSet) -> Result<ContainmentCertificate> {
    require_prime(a, "containment certificate")?;
    if a.contains_zero() {
        return Err(Error::ZeroInSet("containment certificate"));
    }
    let aa = productset(a, a)?;
    let t_set = sumset(&aa, &aa)?.without_zero();
    let rhs = checked_mul(t_set.len() as u128, (a.len() as u128).pow(2))?;
    Ok(ContainmentCertificate {
        lhs: prod.len() as u64,
        aa_aa_nonzero: t_set.len() as u64,
        rhs,
        ok: prod.len() as u128 >= rhs,
    })
}
