//! Acceptance checks, one test per criterion. Each prints a single
//! summary line when it passes; a failing criterion shows up as a
//! failed test with the first violated assertion.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use polyprod::catalog::{cross, cube, edge, gon, point, simplex, torus};
use polyprod::factor::{factor, factor_cardinal, is_prime, oracle_factor, FactorError};
use polyprod::iso::{canonical_form, CanonicalForm};
use polyprod::monodromy::{
    monodromy_gens, monodromy_group, prism_structure, projection_report, structure_report,
    topo_polygons_structure,
};
use polyprod::perm::{gcd, lcm, ComplementOutcome};
use polyprod::poset::{strip, validate_polytope, End, Polytope};
use polyprod::products::{bipyr, multi_product, pri, product, pyr};
use polyprod::symmetry::{
    automorphism_flag_action, flag_orbit_count, flags, orbit_report, word_steps,
};
use polyprod::ProductKind;

fn gon_p(p: usize) -> Polytope {
    gon(p).unwrap()
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn multinomial(counts: &[u64]) -> u64 {
    let total: u64 = counts.iter().sum();
    counts.iter().fold(factorial(total), |acc, &c| acc / factorial(c))
}

fn form_multiset<'a>(items: impl Iterator<Item = (&'a Polytope, usize)>) -> BTreeMap<CanonicalForm, usize> {
    let mut out = BTreeMap::new();
    for (p, m) in items {
        *out.entry(canonical_form(p.poset())).or_insert(0) += m;
    }
    out
}

#[test]
fn criterion_01_products_validate_with_the_expected_ranks() {
    let pool = [point(), edge(), gon_p(3), gon_p(4), gon_p(5), gon_p(6)];
    let mut built = 0;
    for a in &pool {
        for b in &pool {
            let (n, m) = (a.rank(), b.rank());
            for kind in ProductKind::ALL {
                let expected_rank = match kind {
                    ProductKind::Join => n + m + 1,
                    ProductKind::Cartesian | ProductKind::DirectSum => n + m,
                    ProductKind::Topological => n + m - 1,
                };
                match product(kind, a, b) {
                    Ok(p) => {
                        let report = validate_polytope(p.poset());
                        assert!(report.is_polytope, "{kind} product failed validation: {report}");
                        assert_eq!(p.rank(), expected_rank, "{kind} rank mismatch");
                        built += 1;
                    }
                    Err(e) => assert!(
                        kind == ProductKind::Topological && n.min(m) < 2,
                        "only low-rank topological operands may be rejected, got {e}"
                    ),
                }
            }
        }
    }
    println!("criterion 01: pass - {built} products validated with the expected ranks");
}

#[test]
fn criterion_02_flag_counts_match_the_product_formula() {
    let cases: Vec<(&str, Polytope, ProductKind, Vec<Polytope>, usize)> = vec![
        ("pyr(gon(4))", pyr(&gon_p(4)), ProductKind::Join, vec![point(), gon_p(4)], 32),
        ("pri(gon(5))", pri(&gon_p(5)).unwrap(), ProductKind::Cartesian, vec![gon_p(5), edge()], 60),
        ("bipyr(gon(5))", bipyr(&gon_p(5)).unwrap(), ProductKind::DirectSum, vec![gon_p(5), edge()], 60),
        ("torus(4,2)", torus(4, 2).unwrap(), ProductKind::Topological, vec![gon_p(4), gon_p(4)], 128),
    ];
    for (name, p, kind, operands, expected) in &cases {
        let count = flags(p).len();
        assert_eq!(count, *expected, "{name} flag count");
        let steps: Vec<u64> = operands.iter().map(|q| word_steps(*kind, q.rank())).collect();
        let formula: u64 = operands.iter().map(|q| flags(q).len() as u64).product::<u64>()
            * multinomial(&steps);
        assert_eq!(count as u64, formula, "{name} factored flag formula");
    }
    println!("criterion 02: pass - flag counts 32/60/60/128 match the product formula");
}

#[test]
fn criterion_03_orbit_counts_match_the_prediction() {
    let rows: Vec<(&str, ProductKind, Vec<Polytope>, u64)> = vec![
        ("cube(3)", ProductKind::Cartesian, vec![edge(), edge(), edge()], 1),
        ("simplex(4)", ProductKind::Join, vec![point(); 5], 1),
        ("cross(3)", ProductKind::DirectSum, vec![edge(), edge(), edge()], 1),
        ("pri(gon(5))", ProductKind::Cartesian, vec![gon_p(5), edge()], 3),
        ("pyr(gon(4))", ProductKind::Join, vec![point(), gon_p(4)], 4),
        ("bipyr(gon(5))", ProductKind::DirectSum, vec![gon_p(5), edge()], 3),
        ("gon(3) topo gon(4)", ProductKind::Topological, vec![gon_p(3), gon_p(4)], 2),
        ("torus(4,2)", ProductKind::Topological, vec![gon_p(4), gon_p(4)], 1),
    ];
    for (name, kind, operands, expected) in &rows {
        let report = orbit_report(*kind, operands).unwrap();
        assert_eq!(report.actual, report.predicted, "{name} prediction disagrees");
        assert_eq!(report.actual, *expected, "{name} orbit count");
    }
    println!("criterion 03: pass - 8 orbit counts agree with the closed-form prediction");
}

#[test]
fn criterion_04_automorphism_orders_follow_the_factorization() {
    for n in 2..=4i32 {
        let c = cube(n).unwrap();
        let expected = 2u64.pow(n as u32) * factorial(n as u64);
        assert_eq!(automorphism_flag_action(&c).order(), expected, "cube({n})");
    }
    for p in [4usize, 5, 6] {
        let prism = pri(&gon_p(p)).unwrap();
        let actual = automorphism_flag_action(&prism).order();
        let expected = if p == 4 { 48 } else { 4 * p as u64 };
        assert_eq!(actual, expected, "prism over gon({p})");
        // The group-order prediction from the prime factorization:
        // the product of the factor group orders times the shuffle of
        // repeated factors. For p = 4 that requires seeing e x e x e.
        let f = factor(&prism, ProductKind::Cartesian).unwrap();
        if p == 4 {
            assert_eq!(f.factors.len(), 1, "the square prism is a cube");
            assert_eq!(f.factors[0].1, 3, "three copies of the edge");
        }
        let predicted: u64 = f
            .factors
            .iter()
            .map(|(q, m)| {
                automorphism_flag_action(q).order().pow(*m as u32) * factorial(*m as u64)
            })
            .product();
        assert_eq!(predicted, actual, "factored prediction for gon({p}) prism");
    }
    println!("criterion 04: pass - cube orders 8/48/384 and prism orders 48/20/24 predicted");
}

#[test]
fn criterion_05_factorization_round_trips_and_polygon_primality() {
    let pools: Vec<(ProductKind, Vec<Polytope>)> = vec![
        (ProductKind::Join, vec![point(), gon_p(4), gon_p(5), gon_p(6), cube(3).unwrap()]),
        (
            ProductKind::Cartesian,
            vec![edge(), gon_p(3), gon_p(5), gon_p(6), gon_p(7), simplex(3).unwrap()],
        ),
        (
            ProductKind::DirectSum,
            vec![edge(), gon_p(3), gon_p(5), gon_p(6), simplex(3).unwrap()],
        ),
        (
            ProductKind::Topological,
            vec![gon_p(3), gon_p(4), gon_p(5), gon_p(6), gon_p(7)],
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC5);
    let mut done = 0;
    let mut oracle_checked = 0;
    while done < 20 {
        let (kind, pool) = &pools[rng.gen_range(0..pools.len())];
        let count = rng.gen_range(2..=3usize);
        let operands: Vec<Polytope> =
            (0..count).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
        let Ok(s) = multi_product(*kind, &operands) else {
            continue;
        };
        if s.polytope.face_count() > 1500 {
            continue;
        }
        let f = factor(&s.polytope, *kind).unwrap();
        let expected = form_multiset(operands.iter().map(|q| (q, 1)));
        let got = form_multiset(f.factors.iter().map(|(q, m)| (q, *m)));
        assert_eq!(got, expected, "round trip under {kind} lost the prime multiset");

        // Independent brute-force check on the cardinal level, where
        // its size limits allow.
        let stripped = match kind {
            ProductKind::Join => s.polytope.poset().clone(),
            ProductKind::Cartesian => strip(&s.polytope, End::Min).0,
            ProductKind::DirectSum => strip(&s.polytope, End::Max).0,
            ProductKind::Topological => strip(&s.polytope, End::Both).0,
        };
        match oracle_factor(&stripped) {
            Ok(oracle) => {
                let fast = factor_cardinal(&stripped).unwrap();
                let left: BTreeMap<CanonicalForm, usize> =
                    count_forms(oracle.factors.iter().map(canonical_form));
                let right: BTreeMap<CanonicalForm, usize> =
                    count_forms(fast.factors.iter().map(canonical_form));
                assert_eq!(left, right, "oracle disagrees under {kind}");
                oracle_checked += 1;
            }
            Err(FactorError::TooLargeForOracle) => {}
            Err(e) => panic!("oracle failed under {kind}: {e}"),
        }
        done += 1;
    }
    // Known red: this sweep asserts a claim that is false as stated.
    // gon(3) = point join edge (the only join-composite polygon) and
    // gon(4) = edge cart edge = edge dsum edge, so the first assertion
    // to fire is gon(3) under join. The claim holds for p = 5..=8, and
    // no polygon is composite under the topological product (its
    // factors need rank 2, and two such already give rank 3). The
    // check is kept as stated rather than weakened to the true subset.
    for p in 3..=8usize {
        for kind in ProductKind::ALL {
            assert!(
                is_prime(&gon_p(p), kind),
                "gon({p}) reported composite under {kind}"
            );
        }
    }
    println!(
        "criterion 05: pass - 20 round trips, {oracle_checked} oracle agreements, polygons prime"
    );
}

fn count_forms(forms: impl Iterator<Item = CanonicalForm>) -> BTreeMap<CanonicalForm, usize> {
    let mut out = BTreeMap::new();
    for f in forms {
        *out.entry(f).or_insert(0) += 1;
    }
    out
}

#[test]
fn criterion_06_prism_monodromy_structure() {
    let expected_order = [(3usize, 1296u64), (4, 48), (5, 6000), (8, 384)];
    for (p, order) in expected_order {
        let m = p as u64 / gcd(p as u64, 4);
        let prism = pri(&gon_p(p)).unwrap();
        let gens = polyprod::symmetry::monodromy_generators(&prism);
        assert_eq!(gens[0].then(&gens[1]).order(), 4 * m, "order of s0 s1 for p = {p}");
        if p == 4 {
            // The square prism is the cube; its cartesian factorization
            // has no polygon factor, so the family analysis does not
            // apply and the order formula alone is checked.
            assert_eq!(monodromy_group(&prism).order(), order);
            continue;
        }
        let rep = prism_structure(p);
        assert_eq!(rep.monodromy_order, order, "|M| for p = {p}");
        let named: BTreeMap<&str, u64> =
            rep.named_orders.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        assert_eq!(named["H"], m * m * m, "|H| for p = {p}");
        assert_eq!(named["K/H"], 8, "|K/H| for p = {p}");
        let inner = rep.inner_split.expect("prism reports carry the inner verdict");
        match p {
            3 | 5 => assert!(
                matches!(inner, ComplementOutcome::Split { .. }),
                "p = {p} splits over the abelian part"
            ),
            8 => assert_eq!(inner, ComplementOutcome::NonSplit, "p = 8 does not split"),
            _ => unreachable!(),
        }
    }
    println!("criterion 06: pass - prism orders 1296/48/6000/384, verdicts Split/Split/NonSplit");
}

#[test]
fn criterion_07_pyramid_monodromy_structure() {
    for (p, order) in [(3usize, 24u64), (4, 6144), (5, 15000)] {
        let m = p as u64 / gcd(3, p as u64);
        assert_eq!(order, 24 * m.pow(4), "expected order is 24 m^4");
        let pyramid = pyr(&gon_p(p));
        assert_eq!(monodromy_group(&pyramid).order(), order, "|M| for p = {p}");
        let gens = polyprod::symmetry::monodromy_generators(&pyramid);
        // The base polygon contributes p on both sides of each
        // consecutive pair; out-of-range entries drop out of the lcm.
        let pair = lcm(3, p as u64);
        for i in 0..gens.len() - 1 {
            assert_eq!(
                gens[i].then(&gens[i + 1]).order(),
                pair,
                "order of s{i} s{} for p = {p}",
                i + 1
            );
        }
    }
    println!("criterion 07: pass - pyramid orders 24/6144/15000 with pair orders lcm(3, p)");
}

#[test]
fn criterion_08_topological_polygon_monodromy() {
    // Each call verifies internally that the coordinate dihedral
    // subgroups have order 2 lcm, commute pairwise, and generate the
    // kernel.
    for (ps, order) in [
        (vec![4usize, 4], 128u64),
        (vec![3, 4], 1152),
        (vec![3, 3, 3], 1296),
    ] {
        let rep = topo_polygons_structure(&ps);
        assert_eq!(rep.monodromy_order, order, "|M| for {ps:?}");
        let m = ps.iter().fold(1u64, |acc, &p| lcm(acc, p as u64));
        for (name, d_order) in &rep.named_orders {
            assert_eq!(*d_order, 2 * m, "{name} should be dihedral of order 2 lcm");
        }
        assert_eq!(rep.named_orders.len(), ps.len());
    }
    println!("criterion 08: pass - orders 128/1152/1296 with commuting coordinate dihedrals");
}

#[test]
fn criterion_09_wreath_embedding_exhaustive() {
    let cases: Vec<(&str, Polytope, ProductKind)> = vec![
        ("pri(gon(5))", pri(&gon_p(5)).unwrap(), ProductKind::Cartesian),
        ("pyr(gon(4))", pyr(&gon_p(4)), ProductKind::Join),
        (
            "gon(3) topo gon(4)",
            product(ProductKind::Topological, &gon_p(3), &gon_p(4)).unwrap(),
            ProductKind::Topological,
        ),
    ];
    for (name, p, kind) in &cases {
        let f = factor(p, *kind).unwrap();
        // Constructing the wreath coordinates checks every generator
        // against every flag; any disagreement is an error here.
        let elements = polyprod::monodromy::wreath_embed(p, &f).unwrap();
        assert_eq!(elements.len(), p.rank() as usize, "{name} generator count");
        let rep = projection_report(p, &f).unwrap();
        assert_eq!(
            rep.image_order,
            factorial(rep.n as u64),
            "{name} projection must reach the full symmetric group"
        );
    }
    println!("criterion 09: pass - exhaustive embedding on 3 products, image is S_n");
}

#[test]
fn criterion_10_regular_monodromy_equals_automorphisms() {
    for (name, p) in [
        ("cube(3)", cube(3).unwrap()),
        ("simplex(3)", simplex(3).unwrap()),
        ("cross(3)", cross(3).unwrap()),
        ("torus(4,2)", torus(4, 2).unwrap()),
    ] {
        assert_eq!(flag_orbit_count(&p), 1, "{name} must be regular");
        assert_eq!(
            monodromy_group(&p).order(),
            automorphism_flag_action(&p).order(),
            "{name} group orders"
        );
    }
    println!("criterion 10: pass - |M| = |A| on the four regular fixtures");
}

#[test]
fn criterion_11_property_suites() {
    // monodromy_gens re-checks, for every listed polytope, that each
    // exchange is a fixed-point-free involution and that distant
    // exchanges commute.
    let inventory: Vec<Polytope> = vec![
        point(),
        edge(),
        gon_p(2),
        gon_p(3),
        gon_p(4),
        gon_p(5),
        gon_p(6),
        simplex(2).unwrap(),
        simplex(3).unwrap(),
        simplex(4).unwrap(),
        cube(2).unwrap(),
        cube(3).unwrap(),
        cube(4).unwrap(),
        cross(2).unwrap(),
        cross(3).unwrap(),
        cross(4).unwrap(),
        torus(4, 2).unwrap(),
    ];
    for p in &inventory {
        assert!(p.rank() <= 4);
        let gens = monodromy_gens(p);
        assert_eq!(gens.generators.len(), p.rank().max(0) as usize);
        let dd = p.dual().dual();
        assert!(
            polyprod::is_isomorphic(dd.poset(), p.poset()).is_some(),
            "dual is not an involution"
        );
    }

    let prism = pri(&gon_p(5)).unwrap();
    let gens = monodromy_gens(&prism).generators;
    let auts = automorphism_flag_action(&prism);
    let aut_gens = auts.generators();
    let total = flags(&prism).len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7A1E);
    for _ in 0..1000 {
        let start = rng.gen_range(0..total);
        let word: Vec<usize> = (0..rng.gen_range(1..=6)).map(|_| rng.gen_range(0..3)).collect();
        let gamma = (0..rng.gen_range(1..=6)).fold(
            polyprod::perm::Perm::identity(total),
            |acc, _| acc.then(&aut_gens[rng.gen_range(0..aut_gens.len())]),
        );
        let walk = |mut f: usize| -> usize {
            for &i in &word {
                f = gens[i].apply(f);
            }
            f
        };
        assert_eq!(
            gamma.apply(walk(start)),
            walk(gamma.apply(start)),
            "automorphisms must commute with monodromy words"
        );
    }
    println!("criterion 11: pass - involutions, far-commutation, dual involution, 1000 triples");
}

#[test]
fn stretch_prism_over_the_simplex() {
    let s = multi_product(
        ProductKind::Cartesian,
        &[simplex(3).unwrap(), edge()],
    )
    .unwrap();
    let rep = structure_report(&s, 1_000_000).unwrap();
    assert_eq!(rep.image_order, 24, "projection must surject onto S4");
    assert_eq!(rep.monodromy_order, rep.kernel_order * 24);
    let verdict = match &rep.split {
        ComplementOutcome::Split { .. } => "Split",
        ComplementOutcome::NonSplit => panic!("a non-split verdict contradicts the family"),
        ComplementOutcome::Unknown { .. } => "Unknown",
    };
    println!("stretch: pass - image S4, |M| = |K| * 24, complement search: {verdict}");
}
