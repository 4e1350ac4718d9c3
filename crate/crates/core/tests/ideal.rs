use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};
use theta_core::grobner::{buchberger_check, is_reduced, parse, to_text, Monomial, Polynomial};
use theta_core::ideal::{
    certified_basis, decompose_minor, generators, moment_structure, moment_structure_order3_fast, parse_minor,
    standard_monomials, variety_residual, Format, IdealSpec,
};
use theta_core::tensor::{random_unit_rank_one, seeded_rng, Dims, MultiIndex};
use theta_core::Tensor;

type Q = BigRational;
type P = Polynomial<Q>;

fn dims(s: &str) -> Dims {
    s.parse().unwrap()
}

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Oracle: one minor x_a x_b - x_{a∧b} x_{a∨b} per unordered incomparable pair.
fn incomparable_pair_minors(d: &Dims) -> BTreeSet<String> {
    let idx: Vec<MultiIndex> = d.indices().collect();
    let mut out = BTreeSet::new();
    for (i, a) in idx.iter().enumerate() {
        for b in &idx[i + 1..] {
            if a.comparable(b) {
                continue;
            }
            let lo: Vec<String> = a.0.iter().zip(&b.0).map(|(x, y)| x.min(y).to_string()).collect();
            let hi: Vec<String> = a.0.iter().zip(&b.0).map(|(x, y)| x.max(y).to_string()).collect();
            let s = |m: &MultiIndex| m.0.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
            let text = format!("x[{}]*x[{}] - x[{}]*x[{}]", s(a), s(b), lo.join(","), hi.join(","));
            let p: P = parse(&text, d).unwrap();
            out.insert(to_text(&p, d));
        }
    }
    out
}

#[test]
fn full_generators_match_pair_enumeration() {
    for (s, count) in [("2x2", 1), ("2x3", 3), ("3x3", 9), ("2x2x2", 9), ("2x2x3", 24), ("2x2x2x2", 55)] {
        let d = dims(s);
        let g = generators::<Q>(&IdealSpec::full(d.clone())).unwrap();
        let ours: BTreeSet<String> = g.minors.iter().map(|p| to_text(p, &d)).collect();
        assert_eq!(ours.len(), g.minors.len(), "{s}: duplicates");
        assert_eq!(ours, incomparable_pair_minors(&d), "{s}");
        assert_eq!(g.minors.len(), count, "{s}");
    }
}

#[test]
fn cubic_four_generator_count() {
    let d = dims("4x4x4");
    let g = generators::<Q>(&IdealSpec::full(d.clone())).unwrap();
    assert_eq!(g.minors.len(), incomparable_pair_minors(&d).len());
    assert_eq!(g.minors.len(), 1080);
}

#[test]
fn leading_terms_are_the_products_x_alpha_x_beta() {
    let d = dims("2x2x2");
    let g = generators::<Q>(&IdealSpec::full(d.clone())).unwrap();
    for m in &g.minors {
        assert_eq!(m.leading_coefficient(), Some(&q(1)));
        let trailing = &m.terms()[1].0;
        let vs: Vec<u32> = trailing.vars().collect();
        let (a, b) = (d.multi_index(vs[0] as usize), d.multi_index(vs[1] as usize));
        assert!(a.le(&b), "trailing term must be meet times join");
    }
    assert_eq!(g.frobenius_poly.leading_monomial(), Some(&Monomial::from_vars([0, 0])));
}

#[test]
fn perturbed_basis_is_rejected_with_a_witness() {
    let d = dims("2x2x2");
    let mut gens = generators::<Q>(&IdealSpec::full(d)).unwrap().all();
    let g0 = &gens[0];
    let flipped = P::from_terms(vec![g0.terms()[0].clone(), (g0.terms()[1].0.clone(), q(1))]);
    gens[0] = flipped;
    let report = buchberger_check(&gens).unwrap();
    assert!(!report.passes);
    assert!(report.failing_pair.is_some());
}

#[test]
fn small_bases_certify_and_are_reduced() {
    for s in ["2x2", "2x3", "3x3", "2x2x2"] {
        let gb = certified_basis(&dims(s)).unwrap();
        assert!(is_reduced(gb.generators()), "{s}");
    }
    assert!(!is_reduced(&[parse::<Q>("x[1,1]", &dims("2x2")).unwrap(), parse::<Q>("2*x[1,1]", &dims("2x2")).unwrap()]));
}

#[test]
fn normal_forms_in_the_matrix_case() {
    let d = dims("2x2");
    let gb = certified_basis(&d).unwrap();
    let f: P = parse("x[1,2]*x[2,1]", &d).unwrap();
    assert_eq!(to_text(&gb.normal_form(&f), &d), "1*x[1,1]*x[2,2]");
    let sq: P = parse("x[1,1]^2", &d).unwrap();
    let expect: P = parse("1 - x[1,2]^2 - x[2,1]^2 - x[2,2]^2", &d).unwrap();
    assert_eq!(gb.normal_form(&sq), expect);
}

#[test]
fn matrix_basis_sizes() {
    for (m, n) in [(2usize, 2usize), (2, 3), (3, 3), (3, 4)] {
        let d = Dims::new(vec![m, n]).unwrap();
        let b = standard_monomials(&IdealSpec::full(d), 1).unwrap();
        assert_eq!(b.count_up_to(1), m * n + 1);
        assert_eq!(b.len(), m * n + m * (m + 1) * n * (n + 1) / 4);
    }
}

#[test]
fn cube_two_basis_by_brute_force() {
    let d = dims("2x2x2");
    let b = standard_monomials(&IdealSpec::full(d.clone()), 1).unwrap();
    let idx: Vec<MultiIndex> = d.indices().collect();
    // all 45 monomials of degree <= 2, filtered by divisibility
    let mut quad = 0;
    for a in 0..8 {
        for c in a..8 {
            let bad = (a == 0 && c == 0) || !idx[a].comparable(&idx[c]);
            if !bad {
                quad += 1;
                assert!(b.position(&Monomial::from_vars([a as u32, c as u32])).is_some());
            }
        }
    }
    assert_eq!(quad, 26);
    assert_eq!(b.len(), 35);
    // nested levels
    let b2 = standard_monomials(&IdealSpec::full(d), 2).unwrap();
    assert_eq!(&b2.monomials()[..35], b.monomials());
}

#[test]
fn two_by_two_moment_matrix_entry_by_entry() {
    let d = dims("2x2");
    let ms = moment_structure(&IdealSpec::full(d.clone()), 1).unwrap();
    // coordinate names: y0, the four entries, then y1..y8
    let names = ["y0", "x11", "x12", "x21", "x22", "y1", "y2", "y3", "y4", "y5", "y6", "y7", "y8"];
    let expected = [
        ["y0", "x11", "x12", "x21", "x22"],
        ["x11", "-y4-y6-y8+y0", "y1", "y2", "y3"],
        ["x12", "y1", "y4", "y3", "y5"],
        ["x21", "y2", "y3", "y6", "y7"],
        ["x22", "y3", "y5", "y7", "y8"],
    ];
    let render = |form: &[(usize, Q)]| {
        let mut terms: Vec<(String, Q)> = form.iter().map(|(l, c)| (names[*l].to_string(), c.clone())).collect();
        terms.sort();
        terms
    };
    let parse_cell = |s: &str| {
        let mut terms: Vec<(String, Q)> = Vec::new();
        for (i, part) in s.replace('-', "+-").split('+').enumerate() {
            if part.is_empty() && i == 0 {
                continue;
            }
            let (c, n) = part.strip_prefix('-').map_or((q(1), part), |p| (q(-1), p));
            terms.push((n.to_string(), c));
        }
        terms.sort();
        terms
    };
    assert_eq!(ms.size(), 5);
    assert_eq!(ms.num_coordinates(), 13);
    for i in 0..5 {
        for j in 0..5 {
            assert_eq!(render(ms.entry(i, j)), parse_cell(expected[i][j]), "entry ({i},{j})");
        }
    }
    // trace: y0 twice once the quadratic coordinates cancel
    let mut trace = vec![Q::zero(); 13];
    for i in 0..5 {
        for (l, c) in ms.entry(i, i) {
            trace[*l] += c.clone();
        }
    }
    assert_eq!(trace[0], q(2));
    assert!(trace[1..].iter().all(Zero::is_zero));
}

#[test]
fn fast_path_equals_reduction_path() {
    for s in ["2x2x2", "2x2x3", "2x3x2", "3x2x2", "3x3x3"] {
        let d = dims(s);
        let general = moment_structure(&IdealSpec::full(d.clone()), 1).unwrap();
        let fast = moment_structure_order3_fast::<Q>(&d).unwrap();
        assert_eq!(*general, fast, "{s}");
    }
}

#[test]
fn tt_and_hosvd_generators_lie_in_full_ideal() {
    for s in ["2x2x2", "2x3x2"] {
        let d = dims(s);
        let gb = certified_basis(&d).unwrap();
        for fmt in [Format::Tt, Format::Hosvd, Format::Custom(vec![vec![2, 3]])] {
            let g = generators::<Q>(&IdealSpec::new(d.clone(), fmt).unwrap()).unwrap();
            assert!(g.minors.iter().all(|f| gb.contains(f)));
        }
    }
}

#[test]
fn every_full_generator_decomposes_into_tt_and_hosvd_minors() {
    let d = dims("2x3x2");
    let full = generators::<Q>(&IdealSpec::full(d.clone())).unwrap();
    for (fmt, fam) in [(Format::Tt, vec![vec![0], vec![0, 1]]), (Format::Hosvd, vec![vec![0], vec![1], vec![2]])] {
        for f in &full.minors {
            let parts = decompose_minor(f, &d, &fmt).unwrap();
            let sum = parts.iter().fold(P::zero(), |acc, p| &acc + p);
            assert_eq!(&sum, f);
            for p in &parts {
                let (m, c) = parse_minor(p, &d).unwrap();
                assert!(c == Q::one() || c == -Q::one());
                assert!(fam.iter().any(|s| m.belongs_to(s)), "{} not in {fmt}", to_text(p, &d));
            }
        }
    }
}

#[test]
fn variety_points_and_non_points() {
    let d = dims("2x2x2");
    let spec = IdealSpec::full(d.clone());
    let mut rng = seeded_rng(3);
    for _ in 0..10 {
        let x: Tensor = random_unit_rank_one(&mut rng, &d).unwrap();
        assert!(variety_residual(&spec, &x).unwrap() < 1e-12);
    }
    let mut t1 = Tensor::zeros(d.clone());
    t1.set(&[1, 1, 1], 1.0).unwrap();
    t1.set(&[2, 2, 2], 1.0).unwrap();
    assert!(variety_residual(&spec, &t1).unwrap() >= 1.0);
}

#[test]
fn moment_matrix_at_a_variety_point_is_an_outer_product() {
    let d = dims("2x2x3");
    let ms = moment_structure(&IdealSpec::full(d.clone()), 1).unwrap();
    let x: Tensor = random_unit_rank_one(&mut seeded_rng(11), &d).unwrap();
    let y = ms.point_coordinates(x.values());
    let m = ms.evaluate(&y).unwrap();
    let v = &y[..ms.size()];
    for i in 0..ms.size() {
        for j in 0..ms.size() {
            assert!((m[(i, j)] - v[i] * v[j]).abs() < 1e-12);
        }
    }
}
