use std::collections::HashSet;

use super::config::{Experiment, Family};
use super::family::generate_set;
use super::prng::{mix, SplitMix64};
use super::Value;
use crate::budget::Budgets;
use crate::error::{checked_mul, Result};
use crate::field::{check_subfield_condition, FieldElement};
use crate::heis::{
    collision_count_direct, collision_count_fiber, cube_product_size, heis_mul, hh_degree1_quantities,
    thm4_certificate, HeisCsCertificate, HeisCube, HeisElem, ImageCertificate,
};
use crate::incidence::{
    normalize, q_configuration, rudnev_bound_report, sdz_bound_report, LineSet, PlaneSet, PointSet,
};
use crate::matgrp::{
    build_r, containment_certificate_from, cs_certificate_from, mat_mul, nu_statistics, r_product_set,
    MatSL2, MatSet,
};
use crate::setalg::{
    additive_energy, bilinear_energy_q, max_shifted_intersection, mult_energy, pr_inequality_check,
    productset, ratio_set, sumset, EnergyMethod, FSet, BRUTE_FORCE_LIMIT,
};

pub(crate) struct TrialCtx<'a> {
    pub budgets: &'a Budgets,
    pub family: Family,
    pub size: usize,
    pub seed: u64,
    pub exclude_zero: bool,
    pub k: usize,
}

pub(crate) type Row = Vec<(&'static str, Value)>;

/// Value columns per experiment, in output order. Columns ending in `_ok`
/// are constant-1 certificates or exact cross-checks.
pub(crate) fn columns(e: Experiment) -> &'static [&'static str] {
    match e {
        Experiment::Sl2Product => &[
            "r_size",
            "rr_size",
            "nonzero_t_products",
            "zero_t_products",
            "nu_support",
            "nu_total",
            "nu_sq_sum",
            "aa_aa_nonzero",
            "containment_rhs",
            "containment_ok",
            "cs_ok",
            "cross_path_ok",
            "axioms_ok",
        ],
        Experiment::Heis2Zero => &[
            "heis_size",
            "n_direct",
            "n_fiber",
            "n_methods_ok",
            "cs_ok",
            "aa_aa_size",
            "bilinear_rhs",
            "bilinear_ok",
            "axioms_ok",
        ],
        Experiment::Heis2Full => &["heis_size", "aa_a_a_size", "aa_aa_a_a_size", "thm4_rhs", "thm4_ok", "axioms_ok"],
        Experiment::Heis1 => &[
            "heis_size",
            "sumset_size",
            "productset_size",
            "aa_aa_size",
            "large_set_ratio",
            "small_set_ratio",
            "fq_ratio",
            "sum_product_ratio",
            "aa_aa_ratio",
            "degree1_ok",
            "axioms_ok",
        ],
        Experiment::Energies => &[
            "sumset_size",
            "productset_size",
            "additive_energy",
            "mult_energy",
            "q_conv",
            "q_brute",
            "q_methods_ok",
            "additive_cs_ok",
            "q_cs_ok",
            "max_shifted_intersection",
            "ratio_set_size",
            "subfield_condition",
        ],
        Experiment::Incidence => &[
            "lines",
            "incidences_2d",
            "sdz_ratio",
            "sdz_hyp1",
            "sdz_hyp2_ratio",
            "sdz_within_unit",
            "points",
            "planes",
            "incidences_3d",
            "collinear_k",
            "rudnev_ratio",
            "rudnev_ok",
            "q_incidence",
            "q_incidence_ok",
        ],
        Experiment::Inequalities => &["pr_lhs", "pr_rhs_num", "pr_rhs_den", "pr_ok", "pr_difference_ok"],
    }
}

/// Output quantities fitted against `|A|`, with a reference exponent where
/// one exists.
pub(crate) fn fit_targets(e: Experiment) -> &'static [(&'static str, Option<f64>)] {
    match e {
        Experiment::Sl2Product => &[("rr_size", Some(3.5 + 1.0 / 12.0))],
        Experiment::Heis2Zero => &[("heis_size", Some(5.5 + 25.0 / 262.0))],
        Experiment::Heis2Full => &[("heis_size", Some(5.5 + 23.0 / 90.0))],
        Experiment::Heis1 => &[("heis_size", Some(3.0 + 1.0 / 11.0))],
        Experiment::Energies => &[("sumset_size", None), ("additive_energy", None), ("q_conv", None)],
        Experiment::Incidence => &[("incidences_3d", None)],
        Experiment::Inequalities => &[("pr_lhs", None)],
    }
}

fn int(v: impl Into<u128>) -> Value {
    Value::Int(v.into())
}

fn opt_bool(v: Option<bool>) -> Value {
    v.map_or(Value::Missing, Value::Bool)
}

pub(crate) fn measure(e: Experiment, a: &FSet, ctx: &TrialCtx) -> Result<Row> {
    let vals = match e {
        Experiment::Sl2Product => sl2(a, ctx)?,
        Experiment::Heis2Zero => heis2_zero(a, ctx)?,
        Experiment::Heis2Full => heis2_full(a, ctx)?,
        Experiment::Heis1 => heis1(a, ctx)?,
        Experiment::Energies => energies(a)?,
        Experiment::Incidence => incidence(a, ctx)?,
        Experiment::Inequalities => inequalities(a, ctx)?,
    };
    let names = columns(e);
    debug_assert_eq!(vals.len(), names.len());
    Ok(names.iter().copied().zip(vals).collect())
}

fn sl2(a: &FSet, ctx: &TrialCtx) -> Result<Vec<Value>> {
    let r = build_r(a)?;
    let prod = r_product_set(a, ctx.budgets)?;
    let nu = nu_statistics(a, ctx.budgets)?;
    let cs = cs_certificate_from(&prod, &nu)?;
    let cont = containment_certificate_from(a, &prod)?;
    let nonzero_t = prod.count_nonzero_t();
    let zero_t = prod.len() - nonzero_t;
    Ok(vec![
        int(r.len() as u64),
        int(prod.len() as u64),
        int(nonzero_t as u64),
        int(zero_t as u64),
        int(nu.support),
        int(nu.nonzero_t_total),
        int(nu.nu_sq_sum),
        int(cont.aa_aa_nonzero),
        int(cont.rhs),
        Value::Bool(cont.ok),
        Value::Bool(cs.ok),
        Value::Bool(prod.len() as u64 == nu.support + nu.zero_t_distinct),
        Value::Bool(sl2_axioms(&r, ctx.seed)),
    ])
}

const AXIOM_SAMPLES: usize = 8;

fn sl2_axioms(r: &MatSet, seed: u64) -> bool {
    let f = &**r.field();
    let elems: Vec<MatSL2> = r.iter().collect();
    if elems.is_empty() {
        return true;
    }
    let mut rng = SplitMix64::new(mix(seed ^ 0xA5));
    let id = MatSL2::identity(f);
    (0..AXIOM_SAMPLES).all(|_| {
        let [g, h, k] = [0; 3].map(|_| elems[rng.below(elems.len() as u64) as usize]);
        let gh = mat_mul(f, &g, &h);
        mat_mul(f, &gh, &k) == mat_mul(f, &g, &mat_mul(f, &h, &k))
            && mat_mul(f, &g, &g.inverse(f)) == id
            && mat_mul(f, &id, &g) == g
            && gh.det(f) == f.one()
    })
}

fn heis_axioms(cube: &HeisCube, seed: u64) -> bool {
    let f = &**cube.field();
    let elems = cube.elements();
    if elems.is_empty() {
        return true;
    }
    let mut rng = SplitMix64::new(mix(seed ^ 0x5A));
    let id = HeisElem::identity(f, cube.n);
    let mul = |g: &HeisElem, h: &HeisElem| heis_mul(f, g, h).expect("same degree");
    (0..AXIOM_SAMPLES).all(|_| {
        let [g, h, k] = [0; 3].map(|_| &elems[rng.below(elems.len() as u64) as usize]);
        mul(&mul(g, h), k) == mul(g, &mul(h, k)) && mul(g, &g.inverse(f)) == id && mul(&id, g) == *g
    })
}

fn heis2_zero(a: &FSet, ctx: &TrialCtx) -> Result<Vec<Value>> {
    let cube = HeisCube::zero_center(a, 2)?;
    let size = cube_product_size(&cube, &cube, ctx.budgets)?;
    let direct = if a.len() <= ctx.budgets.collision_max_size {
        Some(collision_count_direct(a, ctx.budgets)?.n)
    } else {
        None
    };
    let fiber = collision_count_fiber(a)?.n;
    let cs = HeisCsCertificate::from_parts(a.len(), size, fiber)?;
    let aa = productset(a, a)?;
    let image = sumset(&aa, &aa)?.len() as u128;
    let bi = ImageCertificate::from_parts(a.len(), size, image)?;
    Ok(vec![
        int(size),
        direct.map_or(Value::Missing, Value::Int),
        int(fiber),
        opt_bool(direct.map(|d| d == fiber)),
        Value::Bool(cs.ok),
        int(image),
        int(bi.rhs),
        Value::Bool(bi.ok),
        Value::Bool(heis_axioms(&cube, ctx.seed)),
    ])
}

fn heis2_full(a: &FSet, ctx: &TrialCtx) -> Result<Vec<Value>> {
    let t = thm4_certificate(a, ctx.budgets)?;
    let cube = HeisCube::full(a, 2)?;
    Ok(vec![
        int(t.image.lhs),
        int(t.aa_a_a),
        int(t.image.image),
        int(t.image.rhs),
        Value::Bool(t.image.ok),
        Value::Bool(heis_axioms(&cube, ctx.seed)),
    ])
}

fn heis1(a: &FSet, ctx: &TrialCtx) -> Result<Vec<Value>> {
    let r = hh_degree1_quantities(a, ctx.budgets)?;
    let cube = HeisCube::zero_center(a, 1)?;
    Ok(vec![
        int(r.size),
        int(r.sumset_size),
        int(r.productset_size),
        int(r.aa_aa_size),
        Value::Float(r.large_set_ratio),
        Value::Float(r.small_set_ratio),
        Value::Float(r.fq_ratio),
        Value::Float(r.sum_product_ratio),
        Value::Float(r.aa_aa_ratio),
        opt_bool(r.cert_ok),
        Value::Bool(heis_axioms(&cube, ctx.seed)),
    ])
}

fn energies(a: &FSet) -> Result<Vec<Value>> {
    let ss = sumset(a, a)?.len() as u128;
    let aa = productset(a, a)?;
    let aa_aa = sumset(&aa, &aa)?.len() as u128;
    let e_add = additive_energy(a)?.value;
    let e_mul = mult_energy(a, a)?.value;
    let q = bilinear_energy_q(a, a, a, a, EnergyMethod::Convolution)?.value;
    let n = a.len() as u128;
    let brute = if (n.pow(4)).saturating_mul(n.pow(4)) <= BRUTE_FORCE_LIMIT {
        Some(bilinear_energy_q(a, a, a, a, EnergyMethod::BruteForce)?.value)
    } else {
        None
    };
    let shifted = if a.is_empty() {
        Value::Missing
    } else {
        int(max_shifted_intersection(a, a)?.max as u64)
    };
    let ratios = match ratio_set(a, a) {
        Ok(r) => int(r.len() as u64),
        Err(_) => Value::Missing,
    };
    Ok(vec![
        int(ss),
        int(aa.len() as u64),
        int(e_add),
        int(e_mul),
        int(q),
        brute.map_or(Value::Missing, Value::Int),
        opt_bool(brute.map(|b| b == q)),
        Value::Bool(checked_mul(e_add, ss)? >= n.pow(4)),
        Value::Bool(checked_mul(q, aa_aa)? >= n.pow(8)),
        shifted,
        ratios,
        Value::Bool(check_subfield_condition(a).ok),
    ])
}

/// `count` distinct random hyperplanes of `F^dim`, or all of them if fewer exist.
fn random_hyperplanes(a: &FSet, dim: usize, count: usize, rng: &mut SplitMix64) -> Result<Vec<Vec<FieldElement>>> {
    let f = &**a.field();
    let q = f.order() as u128;
    let total = (0..dim as u32).map(|i| q.pow(i + 1)).sum::<u128>();
    let target = (count as u128).min(total) as usize;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(target);
    while out.len() < target {
        let mut h: Vec<FieldElement> = (0..=dim).map(|_| FieldElement::from_raw(rng.below(q as u64) as u32)).collect();
        if h[..dim].iter().all(|e| e.is_zero()) {
            continue;
        }
        normalize(f, &mut h, dim)?;
        if seen.insert(h.clone()) {
            out.push(h);
        }
    }
    Ok(out)
}

fn incidence(a: &FSet, ctx: &TrialCtx) -> Result<Vec<Value>> {
    let field = a.field();
    let mut rng = SplitMix64::new(mix(ctx.seed ^ 0x11));
    let lines = LineSet::new(field, 2, random_hyperplanes(a, 2, a.len() * a.len(), &mut rng)?)?;
    let sdz = sdz_bound_report(a, a, &lines)?;
    let points = PointSet::grid(&[a, a, a])?;
    let planes = PlaneSet::new(field, 3, random_hyperplanes(a, 3, points.len().max(1), &mut rng)?)?;
    let (incid3, k, rudnev_ratio, rudnev_ok) = if points.len() <= planes.len() {
        let r = rudnev_bound_report(&points, &planes)?;
        (int(r.incidences), int(r.k as u64), Value::Float(r.ratio), Value::Bool(r.ok))
    } else {
        (Value::Missing, Value::Missing, Value::Missing, Value::Missing)
    };
    let q_inc = q_configuration(a, a, a, a)?.weighted_count()?;
    let q = bilinear_energy_q(a, a, a, a, EnergyMethod::Convolution)?.value;
    Ok(vec![
        int(lines.len() as u64),
        int(sdz.incidences),
        Value::Float(sdz.ratio),
        Value::Bool(sdz.hyp1),
        Value::Float(sdz.hyp2_ratio),
        Value::Bool(sdz.within_unit_constant),
        int(points.len() as u64),
        int(planes.len() as u64),
        incid3,
        k,
        rudnev_ratio,
        rudnev_ok,
        int(q_inc),
        Value::Bool(q_inc == q),
    ])
}

fn inequalities(a: &FSet, ctx: &TrialCtx) -> Result<Vec<Value>> {
    if a.is_empty() {
        return Ok(vec![Value::Missing; 5]);
    }
    let bs = (1..=ctx.k as u64)
        .map(|j| generate_set(ctx.family, ctx.size, mix(ctx.seed ^ j), a.field(), ctx.exclude_zero))
        .collect::<Result<Vec<_>>>()?;
    let pr = pr_inequality_check(a, &bs)?;
    Ok(vec![
        int(pr.lhs),
        int(pr.rhs_num),
        int(pr.rhs_den),
        Value::Bool(pr.ok),
        opt_bool(pr.difference.map(|d| d.ok)),
    ])
}
