//! Flags, flag adjacency, automorphism groups, and the way a product's
//! flags decompose into operand flags plus an interleaving word.

use std::collections::HashMap;

use crate::iso::{canonical_form, verify_isomorphism};
use crate::perm::{Perm, PermGroup};
use crate::poset::{FaceId, Polytope};
use crate::products::{multi_product, ProductError, ProductKind, ProductStructure};

/// All flags (maximal chains, both improper ends included) listed in
/// lexicographic face-id order. A flag of a rank-n polytope has n+2
/// entries, indexed by rank+1.
pub fn flags(p: &Polytope) -> &Vec<Vec<FaceId>> {
    p.flag_cache().get_or_init(|| {
        let mut out = Vec::new();
        let mut chain = vec![p.min_face()];
        grow(p, &mut chain, &mut out);
        out
    })
}

fn grow(p: &Polytope, chain: &mut Vec<FaceId>, out: &mut Vec<Vec<FaceId>>) {
    let f = *chain.last().unwrap();
    let ups = p.poset().up(f);
    if ups.is_empty() {
        out.push(chain.clone());
        return;
    }
    for &u in ups {
        chain.push(u);
        grow(p, chain, out);
        chain.pop();
    }
}

/// `table[f][i]` is the unique flag agreeing with flag `f` everywhere
/// except at rank `i`, for the proper ranks `0..n`. Its columns are the
/// monodromy generators.
pub fn flag_adjacency(p: &Polytope) -> &Vec<Vec<usize>> {
    p.adjacency_cache().get_or_init(|| {
        let flags = flags(p);
        let index: HashMap<&[FaceId], usize> =
            flags.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
        let width = p.rank().max(0) as usize;
        let poset = p.poset();
        flags
            .iter()
            .map(|flag| {
                (0..width)
                    .map(|i| {
                        let pos = i + 1;
                        let (lower, this, upper) = (flag[pos - 1], flag[pos], flag[pos + 1]);
                        let other = poset
                            .up(lower)
                            .iter()
                            .copied()
                            .find(|&z| z != this && poset.down(upper).binary_search(&z).is_ok())
                            .expect("diamond condition gives a second middle face");
                        let mut adj = flag.clone();
                        adj[pos] = other;
                        index[adj.as_slice()]
                    })
                    .collect()
            })
            .collect()
    })
}

/// The rank-indexed involutions moving each flag to its i-adjacent
/// flag; words in these walk the whole flag graph.
pub fn monodromy_generators(p: &Polytope) -> Vec<Perm> {
    let adj = flag_adjacency(p);
    let nf = flags(p).len();
    let width = p.rank().max(0) as usize;
    (0..width)
        .map(|i| Perm::from_images((0..nf).map(|f| adj[f][i]).collect()))
        .collect()
}

fn automorphisms(p: &Polytope) -> &(PermGroup, PermGroup) {
    p.aut_cache().get_or_init(|| {
        let flags = flags(p);
        let adj = flag_adjacency(p);
        let nf = flags.len();
        let mut flag_gens: Vec<Perm> = Vec::new();
        let mut face_gens: Vec<Perm> = Vec::new();
        let mut reached = vec![false; nf];
        reached[0] = true;
        for target in 1..nf {
            if reached[target] {
                continue;
            }
            if let Some((flag_perm, face_perm)) = extend_to_automorphism(p, flags, adj, target) {
                flag_gens.push(flag_perm);
                face_gens.push(face_perm);
                // Refresh the orbit of the base flag.
                let group = PermGroup::new(nf, flag_gens.clone());
                reached = vec![false; nf];
                for orbit in group.orbits() {
                    if orbit.contains(&0) {
                        for f in orbit {
                            reached[f] = true;
                        }
                        break;
                    }
                }
            }
        }
        (PermGroup::new(nf, flag_gens), PermGroup::new(p.face_count(), face_gens))
    })
}

/// Tries to extend "base flag goes to `target`" to an automorphism.
/// Flag images propagate along adjacencies; the result must induce a
/// well-defined face bijection that preserves covers.
fn extend_to_automorphism(
    p: &Polytope,
    flags: &[Vec<FaceId>],
    adj: &[Vec<usize>],
    target: usize,
) -> Option<(Perm, Perm)> {
    let nf = flags.len();
    let width = adj.first().map_or(0, |r| r.len());
    let unset = usize::MAX;
    let mut img = vec![unset; nf];
    img[0] = target;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(f) = queue.pop_front() {
        for i in 0..width {
            let (a, b) = (adj[f][i], adj[img[f]][i]);
            if img[a] == unset {
                img[a] = b;
                queue.push_back(a);
            } else if img[a] != b {
                return None;
            }
        }
    }
    let mut hit = vec![false; nf];
    for &w in &img {
        if w == unset || hit[w] {
            return None;
        }
        hit[w] = true;
    }

    let mut face_map = vec![unset; p.face_count()];
    for (f, flag) in flags.iter().enumerate() {
        for (pos, &face) in flag.iter().enumerate() {
            let t = flags[img[f]][pos];
            if face_map[face] == unset {
                face_map[face] = t;
            } else if face_map[face] != t {
                return None;
            }
        }
    }
    if !verify_isomorphism(p.poset(), p.poset(), &face_map) {
        return None;
    }
    Some((Perm::from_images(img), Perm::from_images(face_map)))
}

/// The automorphism group acting on flags. The action is free, so its
/// order equals the number of valid base-flag images.
pub fn automorphism_flag_action(p: &Polytope) -> PermGroup {
    automorphisms(p).0.clone()
}

/// The automorphism group acting on faces.
pub fn automorphism_group(p: &Polytope) -> PermGroup {
    automorphisms(p).1.clone()
}

pub fn flag_orbit_count(p: &Polytope) -> u64 {
    automorphisms(p).0.orbits().len() as u64
}

/// Chain steps of a product flag that carry interleaving information:
/// steps into faces restored by capping are bookkeeping, not shuffle.
/// Returned as flag positions `pos` meaning the step `pos-1 -> pos`.
pub(crate) fn worded_positions(kind: ProductKind, rank: i32) -> Vec<usize> {
    let top = (rank + 1) as usize;
    let all = 1..=top;
    match kind {
        ProductKind::Join => all.collect(),
        ProductKind::Cartesian => all.skip(1).collect(),
        ProductKind::DirectSum => all.take(top - 1).collect(),
        ProductKind::Topological => all.skip(1).take(top.saturating_sub(2)).collect(),
    }
}

/// Steps a factor of this rank contributes to the shuffle word.
pub fn word_steps(kind: ProductKind, rank: i32) -> u64 {
    match kind {
        ProductKind::Join => (rank + 1) as u64,
        ProductKind::Cartesian | ProductKind::DirectSum => rank as u64,
        ProductKind::Topological => (rank - 1) as u64,
    }
}

/// Splits a product flag into one flag per factor plus the interleaving
/// word listing which factor moves at each worded step.
pub fn flag_decompose(s: &ProductStructure, flag_idx: usize) -> (Vec<usize>, Vec<usize>) {
    let flag = &flags(&s.polytope)[flag_idx];
    let k = s.factors.len();
    let worded = worded_positions(s.kind, s.polytope.rank());
    let mut chains: Vec<Vec<FaceId>> = vec![Vec::new(); k];
    let mut word = Vec::new();
    for (pos, &face) in flag.iter().enumerate() {
        let coords = &s.coords[face];
        let mut moved = Vec::new();
        for i in 0..k {
            if chains[i].last() != Some(&coords[i]) {
                chains[i].push(coords[i]);
                if pos > 0 {
                    moved.push(i);
                }
            }
        }
        if worded.binary_search(&pos).is_ok() {
            assert_eq!(moved.len(), 1, "worded steps move exactly one factor");
            word.push(moved[0]);
        }
    }
    let parts: Vec<usize> = chains
        .iter()
        .zip(&s.factors)
        .map(|(chain, f)| {
            flags(f)
                .iter()
                .position(|fl| fl == chain)
                .expect("every projected chain is a factor flag")
        })
        .collect();
    (parts, word)
}

/// Rebuilds the product flag from factor flags and an interleaving
/// word; inverse of [`flag_decompose`].
pub fn flag_compose(s: &ProductStructure, parts: &[usize], word: &[usize]) -> usize {
    let k = s.factors.len();
    let face_of: HashMap<&[FaceId], FaceId> = s
        .coords
        .iter()
        .enumerate()
        .map(|(id, tuple)| (tuple.as_slice(), id))
        .collect();
    let chains: Vec<&Vec<FaceId>> = parts
        .iter()
        .zip(&s.factors)
        .map(|(&p, f)| &flags(f)[p])
        .collect();
    let rank = s.polytope.rank();
    let worded = worded_positions(s.kind, rank);
    let mut ptr = vec![0usize; k];
    let mut tuple: Vec<FaceId> = chains.iter().map(|c| c[0]).collect();
    let mut chain: Vec<FaceId> = vec![face_of[tuple.as_slice()]];
    let mut next_word = 0usize;
    for pos in 1..=(rank + 1) as usize {
        if worded.binary_search(&pos).is_ok() {
            let i = word[next_word];
            next_word += 1;
            ptr[i] += 1;
            tuple[i] = chains[i][ptr[i]];
        } else {
            // A step restored by capping: every factor closes out
            // toward its own bounding face.
            for i in 0..k {
                if ptr[i] + 1 < chains[i].len() {
                    ptr[i] += 1;
                    tuple[i] = chains[i][ptr[i]];
                }
            }
        }
        chain.push(face_of[tuple.as_slice()]);
    }
    flags(&s.polytope)
        .iter()
        .position(|f| f == &chain)
        .expect("composed chain is a product flag")
}

pub(crate) fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Flag-orbit counts: the observed count for the assembled product next
/// to the closed-form prediction from the operands.
#[derive(Debug, Clone)]
pub struct OrbitReport {
    pub kind: ProductKind,
    pub operand_orbit_counts: Vec<u64>,
    pub actual: u64,
    pub predicted: u64,
}

/// Builds the product and compares its flag-orbit count against the
/// closed form, which multiplies operand orbit counts, shuffles the
/// worded steps, and discounts repeats of the same operand. The
/// prediction is exact when the operands are prime for the kind.
pub fn orbit_report(
    kind: ProductKind,
    operands: &[Polytope],
) -> Result<OrbitReport, ProductError> {
    let s = multi_product(kind, operands)?;
    let operand_orbit_counts: Vec<u64> = operands.iter().map(flag_orbit_count).collect();

    // Group operands up to isomorphism to find multiplicities.
    let mut groups: Vec<(crate::iso::CanonicalForm, u64, u64, u64)> = Vec::new();
    for (op, &k_i) in operands.iter().zip(&operand_orbit_counts) {
        let form = canonical_form(op.poset());
        let n_i = word_steps(kind, op.rank());
        match groups.iter_mut().find(|(f, ..)| *f == form) {
            Some((_, _, _, m)) => *m += 1,
            None => groups.push((form, k_i, n_i, 1)),
        }
    }
    let mut predicted: u128 = 1;
    let mut total_steps: u64 = 0;
    for &(_, k_i, n_i, m_i) in &groups {
        predicted *= (k_i as u128).pow(m_i as u32);
        total_steps += n_i * m_i;
    }
    predicted *= factorial(total_steps) as u128;
    for &(_, _, n_i, m_i) in &groups {
        predicted /= (factorial(n_i) as u128).pow(m_i as u32);
        predicted /= factorial(m_i) as u128;
    }

    Ok(OrbitReport {
        kind,
        operand_orbit_counts,
        actual: flag_orbit_count(&s.polytope),
        predicted: u64::try_from(predicted).expect("orbit prediction fits in 64 bits"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn gon(p: usize) -> Polytope {
        catalog::gon(p).unwrap()
    }

    #[test]
    fn pentagon_flags_and_adjacency() {
        let p = gon(5);
        let fl = flags(&p);
        assert_eq!(fl.len(), 10);
        // Lexicographic: the first flag is min, vertex 1, its least edge.
        assert_eq!(fl[0], vec![0, 1, 6, 11]);
        let adj = flag_adjacency(&p);
        for (f, row) in adj.iter().enumerate() {
            assert_eq!(row.len(), 2);
            for (i, &g) in row.iter().enumerate() {
                assert_ne!(f, g);
                assert_eq!(adj[g][i], f, "adjacency is an involution");
                // Exactly the rank-i entry differs.
                let diff: Vec<usize> = (0..4)
                    .filter(|&pos| fl[f][pos] != fl[g][pos])
                    .collect();
                assert_eq!(diff, vec![i + 1]);
            }
        }
    }

    #[test]
    fn flag_counts_for_small_polytopes() {
        assert_eq!(flags(&catalog::point()).len(), 1);
        assert_eq!(flags(&catalog::edge()).len(), 2);
        assert_eq!(flags(&gon(5)).len(), 10);
        assert_eq!(flags(&catalog::simplex(3).unwrap()).len(), 24);
        assert_eq!(flags(&catalog::cube(3).unwrap()).len(), 48);
        assert_eq!(flags(&crate::products::pri(&gon(5)).unwrap()).len(), 60);
        assert_eq!(flags(&crate::products::pyr(&gon(4))).len(), 32);
        assert_eq!(flags(&catalog::torus(4, 2).unwrap()).len(), 128);
        assert_eq!(flags(&Polytope::empty()).len(), 1);
    }

    #[test]
    fn monodromy_generators_are_fixed_point_free_involutions() {
        let p = catalog::cube(3).unwrap();
        for s in monodromy_generators(&p) {
            assert_eq!(s.order(), 2);
            assert!(s.cycles().iter().map(|c| c.len()).sum::<usize>() == flags(&p).len());
        }
    }

    #[test]
    fn automorphisms_of_the_regular_families() {
        // Polygons: dihedral, order 2p.
        for p in [3usize, 5, 6] {
            assert_eq!(automorphism_group(&gon(p)).order(), 2 * p as u64);
            assert_eq!(flag_orbit_count(&gon(p)), 1);
        }
        // Cubes: signed permutations of the axes.
        for n in 1..=4i32 {
            let c = catalog::cube(n).unwrap();
            let expect = (1u64 << n) * factorial(n as u64);
            assert_eq!(automorphism_group(&c).order(), expect);
            assert_eq!(automorphism_flag_action(&c).order(), expect);
            assert_eq!(flag_orbit_count(&c), 1);
        }
        // Simplices: all vertex permutations.
        for n in 1..=4i32 {
            let s = catalog::simplex(n).unwrap();
            assert_eq!(automorphism_group(&s).order(), factorial(n as u64 + 1));
        }
    }

    #[test]
    fn automorphisms_act_freely_on_flags() {
        let p = crate::products::pri(&gon(5)).unwrap();
        let g = automorphism_flag_action(&p);
        assert_eq!(g.order(), 20);
        for e in g.elements() {
            if !e.is_identity() {
                assert!((0..g.degree()).all(|f| e.apply(f) != f));
            }
        }
    }

    #[test]
    fn prism_and_pyramid_symmetries() {
        // Pentagonal prism: dihedral times the edge flip.
        let pri = crate::products::pri(&gon(5)).unwrap();
        assert_eq!(automorphism_group(&pri).order(), 20);
        assert_eq!(flag_orbit_count(&pri), 3);
        // Square pyramid: only the base's symmetries survive.
        let pyr = crate::products::pyr(&gon(4));
        assert_eq!(automorphism_group(&pyr).order(), 8);
        assert_eq!(flag_orbit_count(&pyr), 4);
    }

    #[test]
    fn product_flags_factor_into_flags_and_words() {
        let cases: Vec<(ProductKind, Polytope, Polytope)> = vec![
            (ProductKind::Join, gon(3), catalog::edge()),
            (ProductKind::Cartesian, gon(4), catalog::edge()),
            (ProductKind::DirectSum, gon(3), catalog::edge()),
            (ProductKind::Topological, gon(3), gon(4)),
        ];
        for (kind, p, q) in cases {
            let s = multi_product(kind, &[p.clone(), q.clone()]).unwrap();
            let total = flags(&s.polytope).len() as u64;
            let (n1, n2) = (word_steps(kind, p.rank()), word_steps(kind, q.rank()));
            let shuffles = factorial(n1 + n2) / (factorial(n1) * factorial(n2));
            assert_eq!(
                total,
                flags(&p).len() as u64 * flags(&q).len() as u64 * shuffles,
                "kind {}",
                kind.name()
            );
            let mut seen = std::collections::HashSet::new();
            for fi in 0..total as usize {
                let (parts, word) = flag_decompose(&s, fi);
                assert_eq!(word.len(), (n1 + n2) as usize);
                assert_eq!(word.iter().filter(|&&i| i == 0).count(), n1 as usize);
                assert_eq!(flag_compose(&s, &parts, &word), fi);
                assert!(seen.insert((parts, word)));
            }
        }
    }

    #[test]
    fn orbit_reports_match_known_counts() {
        let point = catalog::point();
        let edge = catalog::edge();
        let cases: Vec<(ProductKind, Vec<Polytope>, u64)> = vec![
            (ProductKind::Cartesian, vec![edge.clone(); 3], 1),
            (ProductKind::Join, vec![point.clone(); 4], 1),
            (ProductKind::Cartesian, vec![gon(5), edge.clone()], 3),
            (ProductKind::Join, vec![gon(4), point.clone()], 4),
            (ProductKind::DirectSum, vec![gon(5), edge.clone()], 3),
            (ProductKind::Topological, vec![gon(3), gon(4)], 2),
            (ProductKind::Topological, vec![gon(4), gon(4)], 1),
        ];
        for (kind, ops, expect) in cases {
            let r = orbit_report(kind, &ops).unwrap();
            assert_eq!(r.predicted, expect, "prediction for {}", kind.name());
            assert_eq!(r.actual, expect, "actual for {}", kind.name());
        }
    }
}
