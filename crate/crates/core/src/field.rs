//! Prime fields `F_p` and extension fields `F_{p^n}` with exact arithmetic.
//!
//! Elements are stored as a packed base-`p` integer: for `n = 1` this is the
//! residue in `[0, p)`, for `n > 1` it is `c_0 + c_1 p + ... + c_{n-1} p^{n-1}`
//! where `c_i` are the coefficients of the representative polynomial modulo
//! the field's defining polynomial. The packing is canonical, so equality of
//! encodings is equality of elements, and the integer order on encodings is
//! the order used by every sorted set in this crate.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::setalg::FSet;

/// Default upper bound on `q = p^n`.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 20;

/// Hard ceiling imposed by the 32-bit element encoding.
pub const MAX_FIELD_CAP: u64 = 1 << 32;

/// Discrete log/exp tables are built for extension fields up to this order.
const TABLE_LIMIT: u64 = 1 << 22;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    /// Packed encoding. Only meaningful relative to the owning [`Field`].
    #[inline]
    pub fn raw(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub(crate) fn from_raw(v: u32) -> Self {
        FieldElement(v)
    }
}

struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// Arithmetic context for `F_{p^n}`. Immutable once constructed.
pub struct Field {
    p: u64,
    n: u32,
    q: u64,
    /// Monic defining polynomial, constant term first, length `n + 1`.
    modulus: Option<Vec<u64>>,
    tables: Option<LogTables>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Builds `F_{p^n}` with the default order cap.
pub fn make_field(p: u64, n: u32) -> Result<Arc<Field>> {
    Field::with_cap(p, n, DEFAULT_FIELD_CAP)
}

pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    if m % 2 == 0 {
        return m == 2;
    }
    let mut d = 3u64;
    while d * d <= m {
        if m % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

impl Field {
    pub fn new(p: u64, n: u32) -> Result<Arc<Field>> {
        make_field(p, n)
    }

    /// Builds `F_{p^n}`, rejecting `p^n > cap`. The cap may be raised up to
    /// [`MAX_FIELD_CAP`].
    pub fn with_cap(p: u64, n: u32, cap: u64) -> Result<Arc<Field>> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        let cap = cap.min(MAX_FIELD_CAP);
        let q = p
            .checked_pow(n)
            .filter(|&q| q <= cap)
            .ok_or(Error::CapExceeded { p, n, cap })?;
        if n == 1 {
            return Ok(Arc::new(Field {
                p,
                n,
                q,
                modulus: None,
                tables: None,
            }));
        }
        let modulus = poly::smallest_irreducible(p, n).ok_or(Error::NoIrreducible { p, n })?;
        let mut field = Field {
            p,
            n,
            q,
            modulus: Some(modulus),
            tables: None,
        };
        if q <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(Arc::new(field))
    }

    fn build_tables(&self) -> LogTables {
        let g = self.primitive_element_slow();
        let order = (self.q - 1) as usize;
        let mut exp = Vec::with_capacity(order);
        let mut log = vec![0u32; self.q as usize];
        let mut cur = 1u32;
        for i in 0..order {
            exp.push(cur);
            log[cur as usize] = i as u32;
            cur = self.mul_poly(cur, g.0);
        }
        debug_assert_eq!(cur, 1);
        LogTables { exp, log }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Number of elements `q = p^n`.
    #[inline]
    pub fn order(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn is_prime_field(&self) -> bool {
        self.n == 1
    }

    /// Defining polynomial (monic, constant term first), `None` for `n = 1`.
    pub fn modulus(&self) -> Option<&[u64]> {
        self.modulus.as_deref()
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// Element from its packed encoding.
    pub fn elem(&self, value: u64) -> Result<FieldElement> {
        if value >= self.q {
            return Err(Error::OutOfRange {
                value,
                order: self.q,
            });
        }
        Ok(FieldElement(value as u32))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.n as usize {
            return Err(Error::Invalid(format!(
                "{} coefficients for a degree-{} field",
                coeffs.len(),
                self.n
            )));
        }
        let mut v = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= self.p {
                return Err(Error::OutOfRange {
                    value: c,
                    order: self.p,
                });
            }
            v = v * self.p + c;
        }
        Ok(FieldElement(v as u32))
    }

    /// Coefficient vector of length `n`, constant term first.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u64> {
        let mut v = a.0 as u64;
        (0..self.n)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(|v| FieldElement(v as u32))
    }

    pub fn format(&self, a: FieldElement) -> String {
        if self.n == 1 {
            a.0.to_string()
        } else {
            let c: Vec<String> = self.coeffs(a).iter().map(u64::to_string).collect();
            format!("({})", c.join(","))
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.n == 1 {
            let s = a.0 as u64 + b.0 as u64;
            FieldElement(if s >= self.p { s - self.p } else { s } as u32)
        } else {
            self.digitwise(a, b, |x, y, p| (x + y) % p)
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.n == 1 {
            let (a, b) = (a.0 as u64, b.0 as u64);
            FieldElement(if a >= b { a - b } else { a + self.p - b } as u32)
        } else {
            self.digitwise(a, b, |x, y, p| (x + p - y) % p)
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.sub(FieldElement(0), a)
    }

    fn digitwise(
        &self,
        a: FieldElement,
        b: FieldElement,
        op: impl Fn(u64, u64, u64) -> u64,
    ) -> FieldElement {
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.n {
            out += op(x % self.p, y % self.p, self.p) * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FieldElement(out as u32)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.n == 1 {
            return FieldElement(((a.0 as u64 * b.0 as u64) % self.p) as u32);
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        match &self.tables {
            Some(t) => {
                let s = t.log[a.index()] as u64 + t.log[b.index()] as u64;
                FieldElement(t.exp[(s % (self.q - 1)) as usize])
            }
            None => FieldElement(self.mul_poly(a.0, b.0)),
        }
    }

    /// Schoolbook multiplication of representatives followed by reduction.
    /// Used to build the log tables and as the table-free fallback.
    pub(crate) fn mul_poly(&self, a: u32, b: u32) -> u32 {
        let m = self.modulus.as_ref().expect("extension field");
        let pa = self.coeffs(FieldElement(a));
        let pb = self.coeffs(FieldElement(b));
        let r = poly::mulmod(&pa, &pb, m, self.p);
        let mut v = 0u64;
        for &c in r.iter().rev() {
            v = v * self.p + c;
        }
        v as u32
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        if let (Some(t), false) = (&self.tables, a.0 == 0) {
            let l = (t.log[a.index()] as u128 * e as u128) % (self.q - 1) as u128;
            return FieldElement(t.exp[l as usize]);
        }
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_notable(acc, base);
            }
            base = self.mul_notable(base, base);
            e >>= 1;
        }
        acc
    }

    fn mul_notable(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.n == 1 {
            self.mul(a, b)
        } else if a.0 == 0 || b.0 == 0 {
            FieldElement(0)
        } else {
            FieldElement(self.mul_poly(a.0, b.0))
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let l = t.log[a.index()] as u64;
            let k = if l == 0 { 0 } else { self.q - 1 - l };
            return Ok(FieldElement(t.exp[k as usize]));
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^{p^d}`, the `d`-fold Frobenius image.
    pub fn frobenius(&self, a: FieldElement, d: u32) -> FieldElement {
        (0..d).fold(a, |x, _| self.pow(x, self.p))
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: FieldElement) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut ord = self.q - 1;
        for r in prime_factors(self.q - 1) {
            while ord % r == 0 && self.pow(a, ord / r) == self.one() {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// Generator of the multiplicative group with the smallest encoding. For
    /// prime fields this is the smallest primitive root mod `p`.
    pub fn primitive_element(&self) -> FieldElement {
        match &self.tables {
            // build_tables already searched in encoding order
            Some(t) => FieldElement(t.exp[1 % t.exp.len()]),
            None => self.primitive_element_slow(),
        }
    }

    fn primitive_element_slow(&self) -> FieldElement {
        let factors = prime_factors(self.q - 1);
        (1..self.q)
            .map(|v| FieldElement(v as u32))
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| self.pow_notable(g, (self.q - 1) / r) != self.one())
            })
            .expect("multiplicative group of a finite field is cyclic")
    }

    fn pow_notable(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_notable(acc, base);
            }
            base = self.mul_notable(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Polynomials over `F_p` as coefficient vectors, constant term first.
pub(crate) mod poly {
    fn inv_mod(a: u64, p: u64) -> u64 {
        let mut acc = 1u64;
        let mut base = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    }

    fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let m = trim(m.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        let mut r = trim(a.to_vec());
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let coef = r[r.len() - 1] * lead_inv % p;
            for (i, &mc) in m.iter().enumerate() {
                let idx = i + shift;
                r[idx] = (r[idx] + p - coef * mc % p) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, m, p)
    }

    fn powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        acc
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Ben-Or test: `f` of degree `n` is irreducible iff
    /// `gcd(f, x^{p^i} - x) = 1` for every `i <= n/2`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let n = f.len() - 1;
        let x = vec![0u64, 1];
        let mut h = x.clone();
        for _ in 1..=n / 2 {
            h = powmod(&h, p, f, p);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            if gcd(f, &diff, p).len() > 1 {
                return false;
            }
        }
        true
    }

    /// Lexicographically smallest monic irreducible of degree `n`, comparing
    /// coefficient vectors constant term first.
    pub fn smallest_irreducible(p: u64, n: u32) -> Option<Vec<u64>> {
        let n = n as usize;
        let count = p.checked_pow(n as u32)?;
        (0..count).find_map(|k| {
            // c_0 is the most significant digit of k
            let mut f = vec![0u64; n + 1];
            let mut rest = k;
            for i in (0..n).rev() {
                f[i] = rest % p;
                rest /= p;
            }
            f[n] = 1;
            (f[0] != 0 && is_irreducible(&f, p)).then_some(f)
        })
    }
}

/// A subfield `F_{p^d}` of `F_{p^n}`, listed by its elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubfieldDescriptor {
    pub degree: u32,
    /// Sorted by encoding.
    pub elements: Vec<FieldElement>,
}

impl SubfieldDescriptor {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        self.elements.binary_search(&a).is_ok()
    }
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// One descriptor per divisor `d` of `n`, ascending, each computed as the
/// fixed set of `a -> a^{p^d}`.
pub fn list_subfields(field: &Field) -> Vec<SubfieldDescriptor> {
    divisors(field.degree())
        .into_iter()
        .map(|d| subfield_of_degree(field, d))
        .collect()
}

pub(crate) fn subfield_of_degree(field: &Field, d: u32) -> SubfieldDescriptor {
    let elements = if d == field.degree() {
        field.elements().collect()
    } else {
        field
            .elements()
            .filter(|&a| field.frobenius(a, d) == a)
            .collect()
    };
    SubfieldDescriptor { degree: d, elements }
}

/// Smallest subfield containing `B`, by closing `B ∪ {0, 1}` under addition,
/// multiplication and inversion.
pub fn generated_subfield(set: &FSet) -> SubfieldDescriptor {
    let field = set.field();
    let mut seen = vec![false; field.order() as usize];
    let mut list: Vec<FieldElement> = Vec::new();
    let mut push = |x: FieldElement, list: &mut Vec<FieldElement>| {
        if !seen[x.index()] {
            seen[x.index()] = true;
            list.push(x);
        }
    };
    push(field.zero(), &mut list);
    push(field.one(), &mut list);
    for &b in set.elements() {
        push(b, &mut list);
    }
    let mut i = 0;
    while i < list.len() {
        let e = list[i];
        if let Ok(inv) = field.inv(e) {
            push(inv, &mut list);
        }
        for j in 0..=i {
            let f = list[j];
            push(field.add(e, f), &mut list);
            push(field.mul(e, f), &mut list);
        }
        i += 1;
    }
    list.sort_unstable();
    let mut degree = 0u32;
    let mut size = 1u64;
    while size < list.len() as u64 {
        size *= field.p();
        degree += 1;
    }
    debug_assert_eq!(size, list.len() as u64);
    SubfieldDescriptor {
        degree,
        elements: list,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubfieldWitness {
    pub lambda: FieldElement,
    pub subfield_degree: u32,
    pub subfield_order: u64,
    /// `|A ∩ λF|`
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubfieldConditionReport {
    /// `|A ∩ λF|^2 <= |F|` for every proper subfield `F` and `λ ≠ 0`.
    pub ok: bool,
    /// Pair maximising `|A ∩ λF|^2 / |F|`; first in (degree, λ) order on ties.
    pub worst: Option<SubfieldWitness>,
}

/// Exhaustive scan of `|A ∩ λF| <= |F|^{1/2}` over proper subfields `F` and
/// nonzero `λ`. `λ = 0` is skipped: `λF = {0}` meets `A` at most once.
pub fn check_subfield_condition(set: &FSet) -> SubfieldConditionReport {
    let field = set.field();
    let mut worst: Option<SubfieldWitness> = None;
    let mut ok = true;
    for d in divisors(field.degree()) {
        if d == field.degree() {
            continue;
        }
        let sub = subfield_of_degree(field, d);
        let mut member = vec![false; field.order() as usize];
        for &f in &sub.elements {
            member[f.index()] = true;
        }
        let order = sub.order();
        for lambda in field.elements().skip(1) {
            let li = field.inv(lambda).expect("nonzero");
            let count = set
                .elements()
                .iter()
                .filter(|&&a| member[field.mul(a, li).index()])
                .count();
            if (count as u64).pow(2) > order {
                ok = false;
            }
            let better = match &worst {
                None => true,
                Some(w) => {
                    (count as u128).pow(2) * w.subfield_order as u128
                        > (w.count as u128).pow(2) * order as u128
                }
            };
            if better {
                worst = Some(SubfieldWitness {
                    lambda,
                    subfield_degree: d,
                    subfield_order: order,
                    count,
                });
            }
        }
    }
    SubfieldConditionReport { ok, worst }
}
