use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use proptest::prelude::*;

use ffgrowth::field::{make_field, Field, FieldElement};
use ffgrowth::heis::{heis_mul, HeisElem};
use ffgrowth::incidence::{count_incidences, LineSet, PointSet};
use ffgrowth::setalg::{
    additive_energy, bilinear_energy_q, dilate, fiber_set, pr_inequality_check, productset, rep_add, rep_mul,
    ratio_set, sumset, translate, EnergyMethod, FSet,
};

fn field(p: u64) -> Arc<Field> {
    make_field(p, 1).unwrap()
}

fn set(f: &Arc<Field>, vals: &[u64]) -> FSet {
    FSet::new(f, vals.iter().map(|&v| f.elem(v % f.order()).unwrap()))
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![5u64, 7, 11, 13, 101])
}

fn vals(max_len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..1000, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(p in prime(), a in 0u64..1000, b in 0u64..1000, c in 0u64..1000) {
        let f = field(p);
        let [a, b, c] = [a, b, c].map(|v| f.elem(v % p).unwrap());
        prop_assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        }
    }

    #[test]
    fn extension_field_axioms(a in 0u64..125, b in 0u64..125, c in 0u64..125) {
        let f = make_field(5, 3).unwrap();
        let [a, b, c] = [a, b, c].map(|v| f.elem(v).unwrap());
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        if !b.is_zero() {
            prop_assert_eq!(f.mul(f.div(a, b).unwrap(), b), a);
        }
    }

    #[test]
    fn representation_totals(p in prime(), a in vals(10), b in vals(10)) {
        let f = field(p);
        let (a, b) = (set(&f, &a), set(&f, &b));
        let n = (a.len() * b.len()) as u128;
        prop_assert_eq!(rep_add(&a, &b).unwrap().total(), n);
        prop_assert_eq!(rep_mul(&a, &b).unwrap().total(), n);
        prop_assert_eq!(rep_add(&a, &b).unwrap().support().len(), sumset(&a, &b).unwrap().len());
    }

    #[test]
    fn q_methods_agree(p in prime(), s in prop::collection::vec(vals(4), 4)) {
        let f = field(p);
        let s: Vec<FSet> = s.iter().map(|v| set(&f, v)).collect();
        let conv = bilinear_energy_q(&s[0], &s[1], &s[2], &s[3], EnergyMethod::Convolution).unwrap();
        let brute = bilinear_energy_q(&s[0], &s[1], &s[2], &s[3], EnergyMethod::BruteForce).unwrap();
        prop_assert_eq!(conv.value, brute.value);
    }

    #[test]
    fn cauchy_schwarz_lower_bounds(p in prime(), a in vals(8), b in vals(5), c in vals(5), d in vals(5)) {
        let f = field(p);
        let a = set(&f, &a);
        let e = additive_energy(&a).unwrap().value;
        let n = a.len() as u128;
        prop_assert!(e * sumset(&a, &a).unwrap().len() as u128 >= n.pow(4));
        prop_assert!(e <= n.pow(3));

        let (b, c, d) = (set(&f, &b), set(&f, &c), set(&f, &d));
        let q = bilinear_energy_q(&a, &b, &c, &d, EnergyMethod::Convolution).unwrap().value;
        let image = sumset(&productset(&a, &b).unwrap(), &productset(&c, &d).unwrap()).unwrap().len() as u128;
        let total = (a.len() * b.len() * c.len() * d.len()) as u128;
        prop_assert!(q * image >= total * total);
    }

    #[test]
    fn fibres_partition_pairs(p in prime(), a in vals(10)) {
        let f = field(p);
        let a = set(&f, &a);
        let sums = sumset(&a, &a).unwrap();
        let total: usize = sums.iter().map(|s| fiber_set(&a, s).len()).sum();
        prop_assert_eq!(total, a.len() * a.len());
        for s in sums.iter() {
            let fib = fiber_set(&a, s);
            // x in A_s iff s - x in A_s
            for x in fib.iter() {
                prop_assert!(fib.contains(f.sub(s, x)));
            }
        }
    }

    #[test]
    fn ratio_set_invariances(p in prime(), a in vals(6), b in vals(6), l in 1u64..1000, t in 0u64..1000) {
        let f = field(p);
        let (a, b) = (set(&f, &a), set(&f, &b));
        prop_assume!(b.len() >= 2);
        let lambda = f.elem(1 + l % (p - 1)).unwrap();
        let shift = f.elem(t % p).unwrap();
        let r = ratio_set(&a, &b).unwrap();
        let moved = ratio_set(&dilate(&a, lambda).unwrap(), &dilate(&b, lambda).unwrap()).unwrap();
        prop_assert_eq!(&moved, &r);
        let shifted = ratio_set(&translate(&a, shift), &translate(&b, shift)).unwrap();
        prop_assert_eq!(&shifted, &r);
    }

    #[test]
    fn plunnecke_ruzsa(x in vals(12), bs in prop::collection::vec(vals(12), 1..=4)) {
        let f = field(101);
        let x = set(&f, &x);
        let bs: Vec<FSet> = bs.iter().map(|v| set(&f, v)).collect();
        let r = pr_inequality_check(&x, &bs).unwrap();
        prop_assert!(r.ok);
        prop_assert!(r.difference.map_or(true, |d| d.ok));
    }

    #[test]
    fn heisenberg_group_axioms(p in prime(), v in prop::collection::vec(0u64..1000, 15)) {
        let f = field(p);
        let e: Vec<FieldElement> = v.iter().map(|&x| f.elem(x % p).unwrap()).collect();
        let el = |i: usize| HeisElem::new(e[i..i + 2].to_vec(), e[i + 2..i + 4].to_vec(), e[i + 4]).unwrap();
        let (g, h, k) = (el(0), el(5), el(10));
        let m = |a: &HeisElem, b: &HeisElem| heis_mul(&f, a, b).unwrap();
        prop_assert_eq!(m(&m(&g, &h), &k), m(&g, &m(&h, &k)));
        prop_assert_eq!(m(&g, &g.inverse(&f)), HeisElem::identity(&f, 2));
        prop_assert_eq!(m(&g.inverse(&f), &g), HeisElem::identity(&f, 2));
    }

    #[test]
    fn incidences_match_naive_scan(p in prime(), pts in prop::collection::vec((0u64..1000, 0u64..1000), 1..20),
                                   lines in prop::collection::vec((0u64..1000, 0u64..1000, 0u64..1000), 1..20)) {
        let f = field(p);
        let e = |v: u64| f.elem(v % p).unwrap();
        let points = PointSet::new(&f, 2, pts.iter().map(|&(x, y)| vec![e(x), e(y)])).unwrap();
        let raw: Vec<[FieldElement; 3]> = lines
            .iter()
            .map(|&(u, v, w)| [e(u), e(v), e(w)])
            .filter(|l| !(l[0].is_zero() && l[1].is_zero()))
            .collect();
        let lines = LineSet::lines(&f, raw.clone()).unwrap();
        // canonical forms: one entry per distinct geometric line
        let mut distinct: HashSet<Vec<FieldElement>> = HashSet::new();
        for l in &raw {
            let members: Vec<FieldElement> = f
                .elements()
                .flat_map(|x| f.elements().map(move |y| (x, y)))
                .filter(|&(x, y)| f.add(f.mul(l[0], x), f.mul(l[1], y)) == l[2])
                .flat_map(|(x, y)| [x, y])
                .collect();
            distinct.insert(members);
        }
        prop_assert_eq!(lines.len(), distinct.len());
        let naive: u64 = lines
            .items()
            .iter()
            .map(|l| {
                points
                    .points()
                    .iter()
                    .filter(|pt| f.add(f.mul(l[0], pt[0]), f.mul(l[1], pt[1])) == l[2])
                    .count() as u64
            })
            .sum();
        let counted = count_incidences(&points, &lines).unwrap();
        prop_assert_eq!(counted, naive);
        prop_assert!(counted <= (points.len() * lines.len()) as u64);
    }
}

#[test]
fn additive_energy_of_interval_matches_formula() {
    // E+({1..n}) = (2n^3 + n) / 3, counted here by a hash of pair sums
    let f = field(101);
    for n in 1..=12u64 {
        let a = FSet::from_ints(&f, &(1..=n as i64).collect::<Vec<_>>());
        let mut sums: HashMap<FieldElement, u128> = HashMap::new();
        for x in a.iter() {
            for y in a.iter() {
                *sums.entry(f.add(x, y)).or_default() += 1;
            }
        }
        let hashed: u128 = sums.values().map(|c| c * c).sum();
        let e = additive_energy(&a).unwrap().value;
        assert_eq!(e, hashed);
        assert_eq!(e, ((2 * n.pow(3) + n) / 3) as u128);
    }
}
