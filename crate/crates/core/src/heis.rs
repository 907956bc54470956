//! Heisenberg groups `H_n(F_p)` and the cube sets `[A^n, B^n, C]`.
//!
//! `[x, y, z]` stands for the unitriangular matrix with first row `(1, x, z)`,
//! identity block `I_n`, and last column `(z, y^t, 1)`. Multiplying matrices
//! gives the law
//!
//! ```text
//! [x, y, z] · [x', y', z'] = [x + x', y + y', z + z' + x·y']
//! ```
//!
//! Product-set sizes of cubes are computed by fibring over the coordinate
//! sums: with `X = x + x'` and `Y = y + y'` fixed, `x_i` ranges over
//! `A ∩ (X_i - A')` and `y'_i` over `B' ∩ (Y_i - B)`, so the reachable
//! `z`-values are `(C + C') + Σ_i (A ∩ (X_i - A'))·(B' ∩ (Y_i - B))`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{guard, Budgets};
use crate::error::{checked_add, checked_mul, Error, Result};
use crate::field::{Field, FieldElement};
use crate::keys::run_lengths;
use crate::setalg::{fiber_set, productset, rep_mul, same_field, sumset, FSet, RepFunction};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeisElem {
    pub x: Vec<FieldElement>,
    pub y: Vec<FieldElement>,
    pub z: FieldElement,
}

impl HeisElem {
    pub fn new(x: Vec<FieldElement>, y: Vec<FieldElement>, z: FieldElement) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DegreeMismatch(x.len(), y.len()));
        }
        Ok(HeisElem { x, y, z })
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        HeisElem {
            x: vec![field.zero(); n],
            y: vec![field.zero(); n],
            z: field.zero(),
        }
    }

    pub fn degree(&self) -> usize {
        self.x.len()
    }

    /// `[-x, -y, -z + x·y]`
    pub fn inverse(&self, f: &Field) -> Self {
        HeisElem {
            x: self.x.iter().map(|&v| f.neg(v)).collect(),
            y: self.y.iter().map(|&v| f.neg(v)).collect(),
            z: f.add(f.neg(self.z), dot(f, &self.x, &self.y)),
        }
    }

    /// The `(n+2) × (n+2)` unitriangular matrix, row-major.
    pub fn to_matrix(&self, f: &Field) -> Vec<Vec<FieldElement>> {
        let n = self.degree();
        let mut m = vec![vec![f.zero(); n + 2]; n + 2];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = f.one();
        }
        m[0][1..=n].copy_from_slice(&self.x);
        m[0][n + 1] = self.z;
        for i in 0..n {
            m[i + 1][n + 1] = self.y[i];
        }
        m
    }

    /// Inverse of [`HeisElem::to_matrix`]; `None` if the matrix is not of the
    /// Heisenberg shape.
    pub fn from_matrix(f: &Field, m: &[Vec<FieldElement>]) -> Option<Self> {
        let size = m.len();
        if size < 2 {
            return None;
        }
        let n = size - 2;
        let g = HeisElem {
            x: m[0][1..=n].to_vec(),
            y: (0..n).map(|i| m[i + 1][n + 1]).collect(),
            z: m[0][n + 1],
        };
        (g.to_matrix(f) == m).then_some(g)
    }
}

fn dot(f: &Field, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    a.iter()
        .zip(b)
        .fold(f.zero(), |acc, (&u, &v)| f.add(acc, f.mul(u, v)))
}

pub fn heis_mul(f: &Field, g: &HeisElem, h: &HeisElem) -> Result<HeisElem> {
    if g.degree() != h.degree() {
        return Err(Error::DegreeMismatch(g.degree(), h.degree()));
    }
    Ok(HeisElem {
        x: g.x.iter().zip(&h.x).map(|(&a, &b)| f.add(a, b)).collect(),
        y: g.y.iter().zip(&h.y).map(|(&a, &b)| f.add(a, b)).collect(),
        z: f.add(f.add(g.z, h.z), dot(f, &g.x, &h.y)),
    })
}

/// `[A^n, B^n, C]`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeisCube {
    pub a: FSet,
    pub b: FSet,
    pub c: FSet,
    pub n: usize,
}

impl HeisCube {
    pub fn new(a: FSet, b: FSet, c: FSet, n: usize) -> Result<Self> {
        same_field(&a, &b)?;
        same_field(&a, &c)?;
        if n == 0 {
            return Err(Error::Invalid("Heisenberg degree must be at least 1".into()));
        }
        Ok(HeisCube { a, b, c, n })
    }

    /// `[A^n, A^n, {0}]`
    pub fn zero_center(a: &FSet, n: usize) -> Result<Self> {
        let zero = FSet::new(a.field(), [a.field().zero()]);
        Self::new(a.clone(), a.clone(), zero, n)
    }

    /// `[A^n, A^n, A]`
    pub fn full(a: &FSet, n: usize) -> Result<Self> {
        Self::new(a.clone(), a.clone(), a.clone(), n)
    }

    pub fn field(&self) -> &Arc<Field> {
        self.a.field()
    }

    /// `|A|^n |B|^n |C|`
    pub fn cardinality(&self) -> u128 {
        (self.a.len() as u128).pow(self.n as u32)
            * (self.b.len() as u128).pow(self.n as u32)
            * self.c.len() as u128
    }

    pub fn elements(&self) -> Vec<HeisElem> {
        let xs = tuples(&self.a, self.n);
        let ys = tuples(&self.b, self.n);
        let mut out = Vec::with_capacity(self.cardinality() as usize);
        for x in &xs {
            for y in &ys {
                for z in self.c.iter() {
                    out.push(HeisElem {
                        x: x.clone(),
                        y: y.clone(),
                        z,
                    });
                }
            }
        }
        out
    }
}

fn tuples(set: &FSet, n: usize) -> Vec<Vec<FieldElement>> {
    (0..n).fold(vec![Vec::new()], |acc, _| {
        acc.iter()
            .flat_map(|prefix| {
                set.iter().map(move |e| {
                    let mut v = prefix.clone();
                    v.push(e);
                    v
                })
            })
            .collect()
    })
}

fn elem_key(f: &Field, g: &HeisElem) -> u128 {
    let q = f.order() as u128;
    g.x.iter()
        .chain(&g.y)
        .chain(std::iter::once(&g.z))
        .fold(0u128, |acc, e| acc * q + e.raw() as u128)
}

fn check_key_width(f: &Field, n: usize) -> Result<()> {
    let bits = (f.order() as f64).log2() * (2 * n + 1) as f64;
    if bits >= 127.0 {
        return Err(Error::Invalid(format!(
            "H_{n} over a field of order {} does not fit a 128-bit key",
            f.order()
        )));
    }
    Ok(())
}

fn check_compatible(k1: &HeisCube, k2: &HeisCube) -> Result<()> {
    same_field(&k1.a, &k2.a)?;
    if k1.n != k2.n {
        return Err(Error::DegreeMismatch(k1.n, k2.n));
    }
    Ok(())
}

/// Distinct products of two cubes by explicit enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeisProductSet {
    pub degree: usize,
    /// Sorted packed `(x, y, z)` codes.
    pub keys: Vec<u128>,
}

impl HeisProductSet {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn contains(&self, f: &Field, g: &HeisElem) -> bool {
        self.keys.binary_search(&elem_key(f, g)).is_ok()
    }
}

pub fn cube_product_set(k1: &HeisCube, k2: &HeisCube, budgets: &Budgets) -> Result<HeisProductSet> {
    check_compatible(k1, k2)?;
    let f = &**k1.field();
    check_key_width(f, k1.n)?;
    guard(
        "Heisenberg cube product set",
        k1.cardinality().saturating_mul(k2.cardinality()),
        budgets.heis_pairs as u128,
    )?;
    let left = k1.elements();
    let right = k2.elements();
    let mut keys: Vec<u128> = left
        .par_iter()
        .flat_map_iter(|g| {
            let mut local: Vec<u128> = right
                .iter()
                .map(|h| elem_key(f, &heis_mul(f, g, h).expect("same degree")))
                .collect();
            local.sort_unstable();
            local.dedup();
            local
        })
        .collect();
    keys.par_sort_unstable();
    keys.dedup();
    Ok(HeisProductSet {
        degree: k1.n,
        keys,
    })
}

/// Subsets of `F_q` as bitmaps, with sumset-by-shift.
struct Bits<'f> {
    field: &'f Field,
    words: Vec<u64>,
}

impl<'f> Bits<'f> {
    fn empty(field: &'f Field) -> Self {
        Bits {
            field,
            words: vec![0; (field.order() as usize).div_ceil(64)],
        }
    }

    fn from_set(field: &'f Field, set: &FSet) -> Self {
        let mut b = Self::empty(field);
        for e in set.iter() {
            b.words[e.index() / 64] |= 1 << (e.index() % 64);
        }
        b
    }

    fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// `self |= src + shift`
    fn or_shifted(&mut self, src: &Bits, shift: FieldElement) {
        let f = self.field;
        if !f.is_prime_field() {
            for (w, &bits) in src.words.iter().enumerate() {
                let mut bits = bits;
                while bits != 0 {
                    let i = w * 64 + bits.trailing_zeros() as usize;
                    let t = f.add(FieldElement::from_raw(i as u32), shift).index();
                    self.words[t / 64] |= 1 << (t % 64);
                    bits &= bits - 1;
                }
            }
            return;
        }
        let p = f.p() as usize;
        let k = shift.index();
        let nw = self.words.len();
        // bits j < p - k move up by k
        let (wo, bo) = (k / 64, k % 64);
        for i in 0..nw.saturating_sub(wo) {
            self.words[i + wo] |= src.words[i] << bo;
            if bo > 0 && i + wo + 1 < nw {
                self.words[i + wo + 1] |= src.words[i] >> (64 - bo);
            }
        }
        // bits j >= p - k wrap to j + k - p
        if k > 0 {
            let m = p - k;
            let (wo, bo) = (m / 64, m % 64);
            for i in 0..nw.saturating_sub(wo) {
                self.words[i] |= src.words[i + wo] >> bo;
                if bo > 0 && i + wo + 1 < nw {
                    self.words[i] |= src.words[i + wo + 1] << (64 - bo);
                }
            }
        }
        let tail = p % 64;
        if tail != 0 {
            self.words[nw - 1] &= (1u64 << tail) - 1;
        }
    }
}

/// `|K1 · K2|` by fibring over `(x + x', y + y')`.
pub fn cube_product_size(k1: &HeisCube, k2: &HeisCube, budgets: &Budgets) -> Result<u128> {
    check_compatible(k1, k2)?;
    for s in [&k1.a, &k1.b, &k2.a, &k2.b] {
        guard("|A| for fibred Heisenberg product", s.len() as u128, budgets.heis_max_size as u128)?;
    }
    let f = &**k1.field();
    let xs = sumset(&k1.a, &k2.a)?;
    let ys = sumset(&k1.b, &k2.b)?;
    // x-values of the left factor with x + x' = s
    let fa: Vec<FSet> = xs
        .iter()
        .map(|s| {
            let shifted = FSet::new(f_arc(k1), k2.a.iter().map(|v| f.sub(s, v)));
            k1.a.intersection(&shifted)
        })
        .collect::<Result<_>>()?;
    // y'-values of the right factor with y + y' = s
    let fb: Vec<FSet> = ys
        .iter()
        .map(|s| {
            let shifted = FSet::new(f_arc(k1), k1.b.iter().map(|v| f.sub(s, v)));
            k2.b.intersection(&shifted)
        })
        .collect::<Result<_>>()?;
    let pieces: Vec<FSet> = fa
        .iter()
        .flat_map(|x| fb.iter().map(move |y| productset(x, y)))
        .collect::<Result<_>>()?;
    let cc = sumset(&k1.c, &k2.c)?;
    if cc.is_empty() {
        return Ok(0);
    }
    let n = k1.n;
    let piece_work: u128 = pieces.iter().map(|p| p.len() as u128).sum();
    guard(
        "fibred Heisenberg product work",
        (pieces.len() as u128).saturating_pow(n as u32 - 1).saturating_mul(piece_work),
        1 << 34,
    )?;

    let base = Bits::from_set(f, &cc);
    let total = pieces
        .par_iter()
        .map(|first| {
            let mut start = Bits::empty(f);
            for u in first.iter() {
                start.or_shifted(&base, u);
            }
            extend_count(f, &start, &pieces, n - 1)
        })
        .try_reduce(|| 0u128, checked_add)?;
    Ok(total)
}

fn f_arc(k: &HeisCube) -> &Arc<Field> {
    k.a.field()
}

/// Σ over `depth` further coordinates of `|acc + P(u_1) + ... + P(u_depth)|`.
fn extend_count(f: &Field, acc: &Bits, pieces: &[FSet], depth: usize) -> Result<u128> {
    if depth == 0 {
        return Ok(acc.count() as u128);
    }
    let mut total = 0u128;
    let mut next = Bits::empty(f);
    for piece in pieces {
        if piece.is_empty() {
            continue;
        }
        next.words.iter_mut().for_each(|w| *w = 0);
        for u in piece.iter() {
            next.or_shifted(acc, u);
        }
        total = checked_add(total, extend_count(f, &next, pieces, depth - 1)?)?;
    }
    Ok(total)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionMethod {
    Direct,
    FiberDecomposition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionReport {
    /// Number of `(x, y, z, t, x', y', z', t') ∈ A^16` with
    /// `[x, y, 0]·[z, t, 0] = [x', y', 0]·[z', t', 0]` in `H_2`.
    pub n: u128,
    pub method: CollisionMethod,
    /// `|[A^2, A^2, 0]^2|` when computed alongside.
    pub product_set_size: Option<u128>,
}

/// `N` by a hash join over the 5-coordinate key
/// `(x1+z1, x2+z2, y1+t1, y2+t2, x1 t1 + x2 t2)`, partitioned on `x1 + z1`.
pub fn collision_count_direct(a: &FSet, budgets: &Budgets) -> Result<CollisionReport> {
    guard("|A| for direct collision count", a.len() as u128, budgets.collision_max_size as u128)?;
    let f = &**a.field();
    let q = f.order() as u128;
    let elems = a.elements();
    let s1_values = sumset(a, a)?;
    let n = s1_values
        .elements()
        .par_iter()
        .map(|&s1| -> Result<u128> {
            let fiber = fiber_set(a, s1);
            let mut keys: Vec<u128> = Vec::with_capacity(fiber.len() * elems.len().pow(6));
            for x1 in fiber.iter() {
                for &t1 in elems {
                    let w1 = f.mul(x1, t1);
                    for &x2 in elems {
                        for &t2 in elems {
                            let w = f.add(w1, f.mul(x2, t2)).raw() as u128;
                            for &z2 in elems {
                                let s2 = f.add(x2, z2).raw() as u128;
                                for &y1 in elems {
                                    let s3 = f.add(y1, t1).raw() as u128;
                                    for &y2 in elems {
                                        let s4 = f.add(y2, t2).raw() as u128;
                                        keys.push(((s2 * q + s3) * q + s4) * q + w);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            keys.par_sort_unstable();
            let total = run_lengths(&keys).try_fold(0u128, |acc, r| checked_add(acc, (r as u128).pow(2)));
            total
        })
        .try_reduce(|| 0u128, checked_add)?;
    Ok(CollisionReport {
        n,
        method: CollisionMethod::Direct,
        product_set_size: None,
    })
}

/// `N = Σ_{s1,s2,s3,s4 ∈ A+A} Q(A_{s1}, A_{s3}, A_{s2}, A_{s4})`.
///
/// `x1` pairs with `t1` in the bilinear form, so the first product slot takes
/// the `x1` fibre (`s1`) and the `t1` fibre (`s3`); the second takes `s2` and
/// `s4`. Summed over all four indices the result is symmetric under `s2 ↔ s3`.
pub fn collision_count_fiber(a: &FSet) -> Result<CollisionReport> {
    let sums = sumset(a, a)?;
    let fibers: Vec<FSet> = sums.iter().map(|s| fiber_set(a, s)).collect();
    let reps: Vec<RepFunction> = fibers
        .iter()
        .flat_map(|x| fibers.iter().map(move |t| rep_mul(x, t)))
        .collect::<Result<_>>()?;
    let n = reps
        .par_iter()
        .map(|r13| {
            reps.iter().try_fold(0u128, |acc, r24| {
                checked_add(acc, r13.convolve(r24)?.sum_of_squares()?)
            })
        })
        .try_reduce(|| 0u128, checked_add)?;
    Ok(CollisionReport {
        n,
        method: CollisionMethod::FiberDecomposition,
        product_set_size: None,
    })
}

/// Direct count within budget, fibre decomposition beyond it.
pub fn collision_count(a: &FSet, budgets: &Budgets) -> Result<CollisionReport> {
    if a.len() <= budgets.collision_max_size {
        collision_count_direct(a, budgets)
    } else {
        collision_count_fiber(a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeisCsCertificate {
    /// `|[A^2, A^2, 0]^2|`
    pub lhs: u128,
    /// `|A|^16`
    pub rhs_num: u128,
    pub n: u128,
    /// `lhs · N >= |A|^16`
    pub ok: bool,
}

pub fn cs_certificate_heis(a: &FSet, budgets: &Budgets) -> Result<HeisCsCertificate> {
    let cube = HeisCube::zero_center(a, 2)?;
    let lhs = cube_product_size(&cube, &cube, budgets)?;
    let n = collision_count(a, budgets)?.n;
    HeisCsCertificate::from_parts(a.len(), lhs, n)
}

impl HeisCsCertificate {
    /// From `|A|`, `|[A^2, A^2, 0]^2|` and `N` computed elsewhere.
    pub fn from_parts(a_len: usize, lhs: u128, n: u128) -> Result<Self> {
        let rhs_num = (a_len as u128).checked_pow(16).ok_or(Error::Overflow)?;
        Ok(HeisCsCertificate {
            lhs,
            rhs_num,
            n,
            ok: checked_mul(lhs, n)? >= rhs_num,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImageCertificate {
    /// Product-set size of the cube.
    pub lhs: u128,
    /// Size of the `z`-image set: `AA + AA` or `AA + AA + A + A`.
    pub image: u128,
    /// `|A|^4 · image`
    pub rhs: u128,
    pub ok: bool,
}

/// `|[A^2, A^2, 0]^2| >= |A|^4 |{x1 t1 + x2 t2}|` where the image is `AA + AA`.
pub fn bilinear_image_certificate(a: &FSet, budgets: &Budgets) -> Result<ImageCertificate> {
    let cube = HeisCube::zero_center(a, 2)?;
    let lhs = cube_product_size(&cube, &cube, budgets)?;
    let aa = productset(a, a)?;
    let image = sumset(&aa, &aa)?.len() as u128;
    ImageCertificate::from_parts(a.len(), lhs, image)
}

impl ImageCertificate {
    pub fn from_parts(a_len: usize, lhs: u128, image: u128) -> Result<Self> {
        let rhs = checked_mul((a_len as u128).pow(4), image)?;
        Ok(ImageCertificate {
            lhs,
            image,
            rhs,
            ok: lhs >= rhs,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Thm4Certificate {
    #[serde(flatten)]
    pub image: ImageCertificate,
    /// `|AA + A + A|`, the intermediate quantity of the chain.
    pub aa_a_a: u128,
}

/// `|[A^2, A^2, A]^2| >= |A|^4 |AA + AA + A + A|`.
pub fn thm4_certificate(a: &FSet, budgets: &Budgets) -> Result<Thm4Certificate> {
    let cube = HeisCube::full(a, 2)?;
    let lhs = cube_product_size(&cube, &cube, budgets)?;
    let aa = productset(a, a)?;
    let aa_a_a = sumset(&sumset(&aa, a)?, a)?;
    let image = sumset(&aa_a_a, &aa)?.len() as u128;
    Ok(Thm4Certificate {
        image: ImageCertificate::from_parts(a.len(), lhs, image)?,
        aa_a_a: aa_a_a.len() as u128,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Heis1Report {
    /// `|[A, A, 0]^2|` in `H_1`
    pub size: u128,
    pub sumset_size: u64,
    pub productset_size: u64,
    pub aa_aa_size: u64,
    /// `size / min(p^{1/2} |A|^{5/2}, p^{-1/2} |A|^4)`
    pub large_set_ratio: f64,
    /// `size / |A|^{7/2}`
    pub small_set_ratio: f64,
    /// `size / |A|^{3 + 1/11}`
    pub fq_ratio: f64,
    /// `max(|A+A|, |AA|) / |A|^{12/11}`
    pub sum_product_ratio: f64,
    /// `|AA + AA| / |A|^{6/5}`
    pub aa_aa_ratio: f64,
    /// `size >= |A|^2 max(|A+A|, |AA|)`, asserted when `0 ∉ A`.
    pub cert_ok: Option<bool>,
}

pub fn hh_degree1_quantities(a: &FSet, budgets: &Budgets) -> Result<Heis1Report> {
    let cube = HeisCube::zero_center(a, 1)?;
    let size = cube_product_size(&cube, &cube, budgets)?;
    let ss = sumset(a, a)?.len() as u64;
    let aa = productset(a, a)?;
    let ps = aa.len() as u64;
    let aa_aa = sumset(&aa, &aa)?.len() as u64;
    let k = a.len() as f64;
    let p = a.field().order() as f64;
    let ratio = |den: f64| if den > 0.0 { size as f64 / den } else { 0.0 };
    let cert_ok = (!a.contains_zero()).then(|| {
        size >= (a.len() as u128).pow(2) * ss.max(ps) as u128
    });
    Ok(Heis1Report {
        size,
        sumset_size: ss,
        productset_size: ps,
        aa_aa_size: aa_aa,
        large_set_ratio: ratio((p.sqrt() * k.powf(2.5)).min(k.powi(4) / p.sqrt())),
        small_set_ratio: ratio(k.powf(3.5)),
        fq_ratio: ratio(k.powf(3.0 + 1.0 / 11.0)),
        sum_product_ratio: if k > 0.0 { ss.max(ps) as f64 / k.powf(12.0 / 11.0) } else { 0.0 },
        aa_aa_ratio: if k > 0.0 { aa_aa as f64 / k.powf(1.2) } else { 0.0 },
        cert_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn el(f: &Field, x: &[i64], y: &[i64], z: i64) -> HeisElem {
        HeisElem {
            x: x.iter().map(|&v| f.from_int(v)).collect(),
            y: y.iter().map(|&v| f.from_int(v)).collect(),
            z: f.from_int(z),
        }
    }

    fn matmul(f: &Field, a: &[Vec<FieldElement>], b: &[Vec<FieldElement>]) -> Vec<Vec<FieldElement>> {
        let n = a.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(f.zero(), |acc, k| f.add(acc, f.mul(a[i][k], b[k][j]))))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn law_examples() {
        let f = make_field(7, 1).unwrap();
        let g = el(&f, &[1], &[2], 3);
        let h = el(&f, &[4], &[5], 6);
        assert_eq!(heis_mul(&f, &g, &h).unwrap(), el(&f, &[5], &[0], 0));
        let id = HeisElem::identity(&f, 1);
        assert_eq!(heis_mul(&f, &g, &id).unwrap(), g);
        assert_eq!(heis_mul(&f, &g, &g.inverse(&f)).unwrap(), id);
        let prod = matmul(&f, &g.to_matrix(&f), &h.to_matrix(&f));
        assert_eq!(HeisElem::from_matrix(&f, &prod), Some(heis_mul(&f, &g, &h).unwrap()));
    }

    #[test]
    fn non_commutative() {
        let f = make_field(7, 1).unwrap();
        let a = el(&f, &[1], &[0], 0);
        let b = el(&f, &[0], &[1], 0);
        let ab = heis_mul(&f, &a, &b).unwrap();
        let ba = heis_mul(&f, &b, &a).unwrap();
        assert_eq!(f.sub(ab.z, ba.z), f.one());
    }

    #[test]
    fn degree_mismatch() {
        let f = make_field(7, 1).unwrap();
        let g = HeisElem::identity(&f, 1);
        let h = HeisElem::identity(&f, 2);
        assert_eq!(heis_mul(&f, &g, &h).unwrap_err(), Error::DegreeMismatch(1, 2));
    }

    #[test]
    fn cube_cardinality() {
        let f = make_field(11, 1).unwrap();
        let a = FSet::from_ints(&f, &[1, 2, 3]);
        let b = FSet::from_ints(&f, &[4, 5]);
        let c = FSet::from_ints(&f, &[0, 7]);
        let cube = HeisCube::new(a, b, c, 2).unwrap();
        assert_eq!(cube.cardinality(), 9 * 4 * 2);
        let mut elems = cube.elements();
        elems.sort_by_key(|g| elem_key(&f, g));
        elems.dedup();
        assert_eq!(elems.len(), 72);
    }

    #[test]
    fn product_set_examples() {
        let budgets = Budgets::default();
        let f = make_field(101, 1).unwrap();
        let one = FSet::from_ints(&f, &[1]);
        let zero = FSet::from_ints(&f, &[0]);
        let k = HeisCube::new(one.clone(), one.clone(), zero.clone(), 1).unwrap();
        assert_eq!(cube_product_set(&k, &k, &budgets).unwrap().len(), 1);
        assert_eq!(cube_product_size(&k, &k, &budgets).unwrap(), 1);

        let id = HeisCube::new(zero.clone(), zero.clone(), zero, 2).unwrap();
        let k2 = HeisCube::zero_center(&FSet::from_ints(&f, &[1, 2]), 2).unwrap();
        let prod = cube_product_set(&id, &k2, &budgets).unwrap();
        assert_eq!(prod.len(), 16);
        for g in k2.elements() {
            assert!(prod.contains(&f, &g));
        }
    }

    #[test]
    fn fibred_size_matches_enumeration() {
        let budgets = Budgets::default();
        for (p, sets) in [(7, vec![vec![1, 2], vec![0, 3, 5]]), (13, vec![vec![1, 2, 3], vec![2, 5, 11]])] {
            let f = make_field(p, 1).unwrap();
            for s in sets {
                let a = FSet::from_ints(&f, &s);
                for n in [1, 2] {
                    for cube in [HeisCube::zero_center(&a, n).unwrap(), HeisCube::full(&a, n).unwrap()] {
                        let explicit = cube_product_set(&cube, &cube, &budgets).unwrap().len() as u128;
                        assert_eq!(cube_product_size(&cube, &cube, &budgets).unwrap(), explicit);
                    }
                }
            }
        }
        // mixed cubes and an extension field
        let f9 = make_field(3, 2).unwrap();
        let a = FSet::new(&f9, [1, 4, 7].map(|v| f9.elem(v).unwrap()));
        let b = FSet::new(&f9, [0, 5].map(|v| f9.elem(v).unwrap()));
        let k1 = HeisCube::new(a.clone(), b.clone(), FSet::new(&f9, [f9.one()]), 2).unwrap();
        let k2 = HeisCube::new(b, a, FSet::new(&f9, [f9.zero(), f9.elem(8).unwrap()]), 2).unwrap();
        let explicit = cube_product_set(&k1, &k2, &budgets).unwrap().len() as u128;
        assert_eq!(cube_product_size(&k1, &k2, &budgets).unwrap(), explicit);
    }

    #[test]
    fn collision_counts_agree() {
        let budgets = Budgets::default();
        let f = make_field(101, 1).unwrap();
        let one = FSet::from_ints(&f, &[1]);
        assert_eq!(collision_count_direct(&one, &budgets).unwrap().n, 1);
        assert_eq!(collision_count_fiber(&one).unwrap().n, 1);
        let a = FSet::from_ints(&f, &[1, 2]);
        let direct = collision_count_direct(&a, &budgets).unwrap().n;
        assert!(direct >= 256);
        assert_eq!(collision_count_fiber(&a).unwrap().n, direct);
        let f5 = make_field(5, 1).unwrap();
        let z = FSet::from_ints(&f5, &[0, 1]);
        assert_eq!(
            collision_count_direct(&z, &budgets).unwrap().n,
            collision_count_fiber(&z).unwrap().n
        );
    }

    #[test]
    fn certificates() {
        let budgets = Budgets::default();
        let f = make_field(101, 1).unwrap();
        let one = FSet::from_ints(&f, &[1]);
        let cs = cs_certificate_heis(&one, &budgets).unwrap();
        assert_eq!((cs.lhs, cs.n, cs.rhs_num, cs.ok), (1, 1, 1, true));
        let bi = bilinear_image_certificate(&one, &budgets).unwrap();
        assert_eq!((bi.lhs, bi.rhs, bi.ok), (1, 1, true));
        let t4 = thm4_certificate(&one, &budgets).unwrap();
        assert_eq!((t4.image.image, t4.image.rhs, t4.image.ok), (1, 1, true));

        let f7 = make_field(7, 1).unwrap();
        let a = FSet::from_ints(&f7, &[1, 2]);
        let bi = bilinear_image_certificate(&a, &budgets).unwrap();
        assert_eq!(bi.rhs, 16 * bi.image);
        assert!(bi.ok);
        assert!(cs_certificate_heis(&a, &budgets).unwrap().ok);
        for s in [[1, 2, 3], [1, 2, 4]] {
            let a = FSet::from_ints(&f, &s);
            assert!(cs_certificate_heis(&a, &budgets).unwrap().ok);
            assert!(bilinear_image_certificate(&a, &budgets).unwrap().ok);
            assert!(thm4_certificate(&a, &budgets).unwrap().image.ok);
        }
    }

    #[test]
    fn degree_one_report() {
        let budgets = Budgets::default();
        let f = make_field(101, 1).unwrap();
        let r = hh_degree1_quantities(&FSet::from_ints(&f, &[1]), &budgets).unwrap();
        assert_eq!(r.size, 1);
        assert_eq!(r.cert_ok, Some(true));
        let a = FSet::from_ints(&f, &[1, 2, 3]);
        let r = hh_degree1_quantities(&a, &budgets).unwrap();
        let cube = HeisCube::zero_center(&a, 1).unwrap();
        assert_eq!(r.size, cube_product_set(&cube, &cube, &budgets).unwrap().len() as u128);
        assert_eq!(r.cert_ok, Some(true));
    }
}
