//! Point-line incidences in `F^2` and point-plane incidences in `F^3`.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{checked_add, checked_mul, Error, Result};
use crate::field::{Field, FieldElement};
use crate::setalg::{rep_mul, same_field, FSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    field: Arc<Field>,
    dim: usize,
    points: Vec<Vec<FieldElement>>,
}

impl PointSet {
    /// Sorts and removes duplicates. Every point must have `dim` coordinates.
    pub fn new(field: &Arc<Field>, dim: usize, points: impl IntoIterator<Item = Vec<FieldElement>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("points need at least one coordinate".into()));
        }
        let mut points: Vec<_> = points.into_iter().collect();
        if let Some(bad) = points.iter().find(|pt| pt.len() != dim) {
            return Err(Error::DimensionMismatch(dim, bad.len()));
        }
        points.sort_unstable();
        points.dedup();
        Ok(PointSet {
            field: field.clone(),
            dim,
            points,
        })
    }

    /// `A × B` or `A × B × C`.
    pub fn grid(sets: &[&FSet]) -> Result<Self> {
        let field = sets
            .first()
            .ok_or_else(|| Error::Invalid("grid needs at least one factor".into()))?
            .field();
        for s in sets {
            same_field(sets[0], s)?;
        }
        let pts = sets.iter().fold(vec![Vec::new()], |acc, s| {
            acc.iter()
                .flat_map(|prefix| {
                    s.iter().map(move |e| {
                        let mut v: Vec<FieldElement> = prefix.clone();
                        v.push(e);
                        v
                    })
                })
                .collect()
        });
        Self::new(field, sets.len(), pts)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<FieldElement>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Affine hyperplanes `u_1 X_1 + ... + u_d X_d = c`, stored as `(u_1, ..., u_d, c)`
/// with the first nonzero `u_i` scaled to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperplaneSet {
    field: Arc<Field>,
    dim: usize,
    items: Vec<Vec<FieldElement>>,
}

pub type LineSet = HyperplaneSet;
pub type PlaneSet = HyperplaneSet;

/// Scales `v` so its first nonzero entry among the first `lead` is 1.
pub(crate) fn normalize(f: &Field, v: &mut [FieldElement], lead: usize) -> Result<()> {
    let first = v[..lead]
        .iter()
        .copied()
        .find(|e| !e.is_zero())
        .ok_or_else(|| Error::Invalid("zero normal vector".into()))?;
    let s = f.inv(first)?;
    for e in v.iter_mut() {
        *e = f.mul(*e, s);
    }
    Ok(())
}

impl HyperplaneSet {
    pub fn new(field: &Arc<Field>, dim: usize, items: impl IntoIterator<Item = Vec<FieldElement>>) -> Result<Self> {
        let mut out = Vec::new();
        for mut h in items {
            if h.len() != dim + 1 {
                return Err(Error::DimensionMismatch(dim + 1, h.len()));
            }
            normalize(field, &mut h, dim)?;
            out.push(h);
        }
        out.sort_unstable();
        out.dedup();
        Ok(HyperplaneSet {
            field: field.clone(),
            dim,
            items: out,
        })
    }

    /// Lines `uX + vY = w`.
    pub fn lines(field: &Arc<Field>, lines: impl IntoIterator<Item = [FieldElement; 3]>) -> Result<Self> {
        Self::new(field, 2, lines.into_iter().map(|l| l.to_vec()))
    }

    /// Planes `uX + vY + wZ = c`.
    pub fn planes(field: &Arc<Field>, planes: impl IntoIterator<Item = [FieldElement; 4]>) -> Result<Self> {
        Self::new(field, 3, planes.into_iter().map(|h| h.to_vec()))
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn items(&self) -> &[Vec<FieldElement>] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

fn on(f: &Field, h: &[FieldElement], pt: &[FieldElement]) -> bool {
    let lhs = pt
        .iter()
        .zip(h)
        .fold(f.zero(), |acc, (&x, &u)| f.add(acc, f.mul(x, u)));
    lhs == h[pt.len()]
}

fn check_dims(p: &PointSet, h: &HyperplaneSet) -> Result<()> {
    if p.field != h.field {
        return Err(Error::FieldMismatch);
    }
    if p.dim != h.dim {
        return Err(Error::DimensionMismatch(p.dim, h.dim));
    }
    Ok(())
}

/// Points of `p` on `h`, as indices into `p.points()`.
fn incident_indices<'a>(
    f: &'a Field,
    p: &'a PointSet,
    rows: &'a HashMap<&[FieldElement], Vec<usize>>,
    h: &'a [FieldElement],
) -> Box<dyn Iterator<Item = usize> + 'a> {
    let d = p.dim;
    let last = h[d - 1];
    if last.is_zero() {
        return Box::new((0..p.len()).filter(move |&i| on(f, h, &p.points[i])));
    }
    // solve for the last coordinate on each row of the first d-1 coordinates
    let inv = f.inv(last).expect("nonzero");
    Box::new(rows.iter().flat_map(move |(prefix, idx)| {
        let partial = prefix
            .iter()
            .zip(h)
            .fold(f.zero(), |acc, (&x, &u)| f.add(acc, f.mul(x, u)));
        let target = f.mul(f.sub(h[d], partial), inv);
        idx.iter().copied().filter(move |&i| p.points[i][d - 1] == target)
    }))
}

fn rows_of(p: &PointSet) -> HashMap<&[FieldElement], Vec<usize>> {
    let mut rows: HashMap<&[FieldElement], Vec<usize>> = HashMap::new();
    for (i, pt) in p.points.iter().enumerate() {
        rows.entry(&pt[..p.dim - 1]).or_default().push(i);
    }
    rows
}

/// `I(P, H)`: number of (point, hyperplane) pairs with the point on it.
pub fn count_incidences(p: &PointSet, h: &HyperplaneSet) -> Result<u64> {
    check_dims(p, h)?;
    let f = &*p.field;
    let rows = rows_of(p);
    Ok(h.items
        .par_iter()
        .map(|hp| incident_indices(f, p, &rows, hp).count() as u64)
        .sum())
}

/// `Σ w_P(x) w_H(h)` over incident pairs. Weights are indexed like
/// `p.points()` and `h.items()`.
pub fn weighted_incidences(p: &PointSet, wp: &[u128], h: &HyperplaneSet, wh: &[u128]) -> Result<u128> {
    check_dims(p, h)?;
    if wp.len() != p.len() {
        return Err(Error::DimensionMismatch(p.len(), wp.len()));
    }
    if wh.len() != h.len() {
        return Err(Error::DimensionMismatch(h.len(), wh.len()));
    }
    let f = &*p.field;
    let rows = rows_of(p);
    h.items
        .par_iter()
        .zip(wh)
        .map(|(hp, &w)| {
            incident_indices(f, p, &rows, hp)
                .try_fold(0u128, |acc, i| checked_add(acc, checked_mul(wp[i], w)?))
        })
        .try_reduce(|| 0, checked_add)
}

/// Largest number of points of `p` on a common line.
pub fn max_collinear(p: &PointSet) -> usize {
    if p.len() < 2 {
        return p.len();
    }
    let f = &*p.field;
    let pts = &p.points;
    (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut dirs: HashMap<Vec<FieldElement>, usize> = HashMap::new();
            for q in &pts[i + 1..] {
                let mut d: Vec<FieldElement> = q.iter().zip(&pts[i]).map(|(&a, &b)| f.sub(a, b)).collect();
                normalize(f, &mut d, p.dim).expect("distinct points");
                *dirs.entry(d).or_default() += 1;
            }
            dirs.values().max().map_or(1, |m| m + 1)
        })
        .max()
        .unwrap_or(1)
}

/// Dual lines of a planar point set: `(a, b) ↦ {Y = aX - b}`.
pub fn dual_lines(p: &PointSet) -> Result<LineSet> {
    if p.dim != 2 {
        return Err(Error::DimensionMismatch(2, p.dim));
    }
    let f = &*p.field;
    LineSet::new(&p.field, 2, p.points.iter().map(|pt| vec![pt[0], f.neg(f.one()), pt[1]]))
}

/// Dual points of the non-vertical lines: `{Y = aX - b} ↦ (a, b)`.
pub fn dual_points(l: &LineSet) -> Result<PointSet> {
    if l.dim != 2 {
        return Err(Error::DimensionMismatch(2, l.dim));
    }
    let f = &*l.field;
    let pts = l.items.iter().filter(|h| !h[1].is_zero()).map(|h| {
        // uX + vY = w  ⇔  Y = (-u/v) X - (-w/v)
        let s = f.neg(f.inv(h[1]).expect("nonzero"));
        vec![f.mul(h[0], s), f.mul(h[2], s)]
    });
    PointSet::new(&l.field, 2, pts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SdzReport {
    pub incidences: u64,
    /// `|A|^{3/4} |B|^{1/2} |L|^{3/4} + |L|`
    pub bound_main: f64,
    /// `|A| |B|^2 <= |L|^3`
    pub hyp1: bool,
    /// `|A| |L| / p^2`; the hypothesis wants this bounded.
    pub hyp2_ratio: f64,
    pub ratio: f64,
    /// `I <= bound_main`, decided in integers after raising to the 4th power.
    pub within_unit_constant: bool,
}

/// Point-line incidences on the grid `A × B`, `|A| <= |B|`.
pub fn sdz_bound_report(a: &FSet, b: &FSet, l: &LineSet) -> Result<SdzReport> {
    if a.len() > b.len() {
        return Err(Error::Invalid(format!("need |A| <= |B|, got {} > {}", a.len(), b.len())));
    }
    let grid = PointSet::grid(&[a, b])?;
    let i = count_incidences(&grid, l)?;
    let (na, nb, nl) = (a.len() as u128, b.len() as u128, l.len() as u128);
    let main = (na as f64).powf(0.75) * (nb as f64).sqrt() * (nl as f64).powf(0.75) + nl as f64;
    let excess = (i as u128).saturating_sub(nl);
    let within = excess == 0
        || checked_mul(excess * excess, excess * excess)?
            <= checked_mul(checked_mul(na.pow(3), nb * nb)?, nl.pow(3))?;
    let p = a.field().order() as f64;
    Ok(SdzReport {
        incidences: i,
        bound_main: main,
        hyp1: na * nb * nb <= nl.pow(3),
        hyp2_ratio: (na * nl) as f64 / (p * p),
        ratio: if main > 0.0 { i as f64 / main } else { 0.0 },
        within_unit_constant: within,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RudnevReport {
    pub incidences: u64,
    pub k: usize,
    /// `|P||Π|/p + |P|^{1/2}|Π| + k|P|`
    pub bound: f64,
    pub ratio: f64,
    /// `I <= bound`, decided exactly.
    pub ok: bool,
}

pub fn rudnev_bound_report(p: &PointSet, planes: &PlaneSet) -> Result<RudnevReport> {
    if p.dim != 3 {
        return Err(Error::DimensionMismatch(3, p.dim));
    }
    if p.len() > planes.len() {
        return Err(Error::Invalid(format!(
            "need |P| <= |planes|, got {} > {}",
            p.len(),
            planes.len()
        )));
    }
    let i = count_incidences(p, planes)?;
    let k = max_collinear(p);
    let q = p.field.order() as u128;
    let (np, nh) = (p.len() as u128, planes.len() as u128);
    // q I - q k |P| - |P||Π| <= q |P|^{1/2} |Π|
    let lhs = (q * i as u128) as i128 - (q * k as u128 * np) as i128 - (np * nh) as i128;
    let ok = lhs <= 0 || checked_mul(lhs as u128, lhs as u128)? <= checked_mul(q * q * nh * nh, np)?;
    let bound = (np * nh) as f64 / q as f64 + (np as f64).sqrt() * nh as f64 + (k as u128 * np) as f64;
    Ok(RudnevReport {
        incidences: i,
        k,
        bound,
        ratio: if bound > 0.0 { i as f64 / bound } else { 0.0 },
        ok,
    })
}

/// Weighted point-plane configuration whose incidence count is `Q(A,B,C,D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QConfiguration {
    /// `(a, d, λ)` with `a ∈ A`, `d ∈ D`, `λ ∈ CD`
    pub points: PointSet,
    /// `r_{CD}(λ)`
    pub point_weights: Vec<u128>,
    /// `bX - cY + Z = μ` with `b ∈ B`, `c ∈ C`, `μ ∈ AB`
    pub planes: PlaneSet,
    /// `r_{AB}(μ)`
    pub plane_weights: Vec<u128>,
}

impl QConfiguration {
    pub fn weighted_count(&self) -> Result<u128> {
        weighted_incidences(&self.points, &self.point_weights, &self.planes, &self.plane_weights)
    }
}

/// `a1 b1 + c1 d1 = a2 b2 + c2 d2` read as the point `(a1, d2, c1 d1)` on the
/// plane `b1 X - c2 Y + Z = a2 b2`.
pub fn q_configuration(a: &FSet, b: &FSet, c: &FSet, d: &FSet) -> Result<QConfiguration> {
    let field = a.field();
    let f = &**field;
    let r_cd = rep_mul(c, d)?;
    let r_ab = rep_mul(a, b)?;
    let mut points = Vec::new();
    for x in a.iter() {
        for y in d.iter() {
            for &(l, _) in r_cd.support() {
                points.push(vec![x, y, l]);
            }
        }
    }
    let points = PointSet::new(field, 3, points)?;
    let point_weights = points.points().iter().map(|pt| r_cd.get(pt[2])).collect();

    let mut raw = Vec::new();
    for u in b.iter() {
        for v in c.iter() {
            for &(m, w) in r_ab.support() {
                let mut h = vec![u, f.neg(v), f.one(), m];
                normalize(f, &mut h, 3)?;
                raw.push((h, w));
            }
        }
    }
    raw.sort_unstable();
    let planes = PlaneSet::new(field, 3, raw.iter().map(|(h, _)| h.clone()))?;
    let plane_weights = raw.into_iter().map(|(_, w)| w).collect();
    Ok(QConfiguration {
        points,
        point_weights,
        planes,
        plane_weights,
    })
}
