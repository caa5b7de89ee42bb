//! Poset isomorphism by individualization and refinement, and a canonical
//! labeling used to name and hash posets deterministically.

use std::collections::BTreeMap;

use crate::poset::{FaceId, FacePoset};

/// Iterated neighborhood refinement over the disjoint union of both posets,
/// so the returned colors are comparable across them. Each seed pair is
/// individualized: the two faces share a color no other face gets.
fn refine_pair(a: &FacePoset, b: &FacePoset, seeds: &[(FaceId, FaceId)]) -> (Vec<u32>, Vec<u32>) {
    let na = a.face_count();
    let nb = b.face_count();
    let mut colors: Vec<u32> = Vec::with_capacity(na + nb);
    {
        let mut key_to_color: BTreeMap<i32, u32> = BTreeMap::new();
        for &r in a.ranks().iter().chain(b.ranks().iter()) {
            key_to_color.entry(r).or_insert(0);
        }
        for (i, (_, c)) in key_to_color.iter_mut().enumerate() {
            *c = i as u32;
        }
        for &r in a.ranks() {
            colors.push(key_to_color[&r]);
        }
        for &r in b.ranks() {
            colors.push(key_to_color[&r]);
        }
        let base = key_to_color.len() as u32;
        for (i, &(fa, fb)) in seeds.iter().enumerate() {
            colors[fa] = base + i as u32;
            colors[na + fb] = base + i as u32;
        }
    }

    let mut classes = {
        let mut distinct: Vec<u32> = colors.clone();
        distinct.sort_unstable();
        distinct.dedup();
        distinct.len()
    };
    loop {
        let key_of = |poset: &FacePoset, f: FaceId, offset: usize, colors: &[u32]| {
            let mut ups: Vec<u32> = poset.up(f).iter().map(|&g| colors[g + offset]).collect();
            let mut downs: Vec<u32> = poset.down(f).iter().map(|&g| colors[g + offset]).collect();
            ups.sort_unstable();
            downs.sort_unstable();
            (colors[f + offset], ups, downs)
        };
        let mut keys: Vec<(u32, Vec<u32>, Vec<u32>)> = Vec::with_capacity(na + nb);
        for f in 0..na {
            keys.push(key_of(a, f, 0, &colors));
        }
        for f in 0..nb {
            keys.push(key_of(b, f, na, &colors));
        }
        let key_to_color = densify(&keys);
        let new_classes = key_to_color.len();
        let new_colors: Vec<u32> = keys.iter().map(|k| key_to_color[k]).collect();
        if new_classes == classes {
            return (new_colors[..na].to_vec(), new_colors[na..].to_vec());
        }
        classes = new_classes;
        colors = new_colors;
    }
}

/// Dense color ids in sorted-key order, so ids are relabeling-invariant.
fn densify(keys: &[(u32, Vec<u32>, Vec<u32>)]) -> BTreeMap<&(u32, Vec<u32>, Vec<u32>), u32> {
    let mut key_to_color: BTreeMap<&(u32, Vec<u32>, Vec<u32>), u32> =
        keys.iter().map(|k| (k, 0)).collect();
    for (i, (_, c)) in key_to_color.iter_mut().enumerate() {
        *c = i as u32;
    }
    key_to_color
}

/// Returns a map from faces of `a` to faces of `b` preserving covers in both
/// directions, or None when the posets are not isomorphic.
pub fn is_isomorphic(a: &FacePoset, b: &FacePoset) -> Option<Vec<FaceId>> {
    if a.face_count() != b.face_count() || a.covers().len() != b.covers().len() {
        return None;
    }
    if a.face_count() == 0 {
        return Some(Vec::new());
    }
    ir_search(a, b, &mut Vec::new())
}

/// Refine jointly under the current individualizations; while some color
/// class stays ambiguous, pin one of its `a`-faces to each `b`-face of the
/// class in turn. Colors are isomorphism-invariant, so a discrete stable
/// coloring leaves exactly one candidate map, which is then verified.
fn ir_search(
    a: &FacePoset,
    b: &FacePoset,
    seeds: &mut Vec<(FaceId, FaceId)>,
) -> Option<Vec<FaceId>> {
    let (ca, cb) = refine_pair(a, b, seeds);
    let mut class_a: BTreeMap<u32, Vec<FaceId>> = BTreeMap::new();
    let mut class_b: BTreeMap<u32, Vec<FaceId>> = BTreeMap::new();
    for (f, &c) in ca.iter().enumerate() {
        class_a.entry(c).or_default().push(f);
    }
    for (f, &c) in cb.iter().enumerate() {
        class_b.entry(c).or_default().push(f);
    }
    if class_a.len() != class_b.len() {
        return None;
    }
    for ((&c1, fs), (&c2, gs)) in class_a.iter().zip(class_b.iter()) {
        if c1 != c2 || fs.len() != gs.len() {
            return None;
        }
    }

    let ambiguous = class_a
        .iter()
        .filter(|(_, fs)| fs.len() > 1)
        .min_by_key(|(_, fs)| fs.len());
    match ambiguous {
        None => {
            let mut map = vec![0 as FaceId; a.face_count()];
            for (c, fs) in &class_a {
                map[fs[0]] = class_b[c][0];
            }
            if verify_isomorphism(a, b, &map) {
                Some(map)
            } else {
                None
            }
        }
        Some((&c, fs)) => {
            let fa = fs[0];
            for fb in class_b[&c].clone() {
                seeds.push((fa, fb));
                let found = ir_search(a, b, seeds);
                seeds.pop();
                if found.is_some() {
                    return found;
                }
            }
            None
        }
    }
}

/// Checks that `map` is a cover-preserving and cover-reflecting bijection.
pub fn verify_isomorphism(a: &FacePoset, b: &FacePoset, map: &[FaceId]) -> bool {
    let n = a.face_count();
    if map.len() != n || b.face_count() != n {
        return false;
    }
    let mut hit = vec![false; n];
    for &w in map {
        if w >= n || hit[w] {
            return false;
        }
        hit[w] = true;
    }
    for f in 0..n {
        if a.rank_of(f) != b.rank_of(map[f]) {
            return false;
        }
    }
    if a.covers().len() != b.covers().len() {
        return false;
    }
    a.covers()
        .iter()
        .all(|&(u, l)| b.up(map[l]).binary_search(&map[u]).is_ok())
}

/// Relabeling-independent encoding of a poset: ranks in canonical face
/// order plus the relabeled, sorted cover list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub ranks: Vec<i32>,
    pub covers: Vec<(FaceId, FaceId)>,
}

/// Canonical labeling by individualization and refinement: branch over the
/// first ambiguous color class and keep the lexicographically least
/// encoding. Intended for the small posets that show up as prime factors.
pub fn canonical_form(poset: &FacePoset) -> CanonicalForm {
    let n = poset.face_count();
    if n == 0 {
        return CanonicalForm { ranks: vec![], covers: vec![] };
    }
    let colors = refine_single(poset, None);
    let mut best: Option<CanonicalForm> = None;
    canon_search(poset, colors, &mut best);
    best.unwrap()
}

fn refine_single(poset: &FacePoset, seed: Option<&[u32]>) -> Vec<u32> {
    let n = poset.face_count();
    let mut colors: Vec<u32> = match seed {
        Some(s) => s.to_vec(),
        None => {
            let mut key_to_color: BTreeMap<i32, u32> = BTreeMap::new();
            for &r in poset.ranks() {
                key_to_color.entry(r).or_insert(0);
            }
            for (i, (_, c)) in key_to_color.iter_mut().enumerate() {
                *c = i as u32;
            }
            poset.ranks().iter().map(|r| key_to_color[r]).collect()
        }
    };
    let mut classes = {
        let mut d = colors.clone();
        d.sort_unstable();
        d.dedup();
        d.len()
    };
    loop {
        let mut keys: Vec<(u32, Vec<u32>, Vec<u32>)> = Vec::with_capacity(n);
        for f in 0..n {
            let mut ups: Vec<u32> = poset.up(f).iter().map(|&g| colors[g]).collect();
            let mut downs: Vec<u32> = poset.down(f).iter().map(|&g| colors[g]).collect();
            ups.sort_unstable();
            downs.sort_unstable();
            keys.push((colors[f], ups, downs));
        }
        let key_to_color = densify(&keys);
        if key_to_color.len() == classes {
            return keys.iter().map(|k| key_to_color[k]).collect();
        }
        classes = key_to_color.len();
        colors = keys.iter().map(|k| key_to_color[k]).collect();
    }
}

fn canon_search(poset: &FacePoset, colors: Vec<u32>, best: &mut Option<CanonicalForm>) {
    let n = poset.face_count();
    let mut by_color: BTreeMap<u32, Vec<FaceId>> = BTreeMap::new();
    for f in 0..n {
        by_color.entry(colors[f]).or_default().push(f);
    }
    if let Some((_, class)) = by_color.iter().find(|(_, fs)| fs.len() > 1) {
        for &f in class {
            // Individualize f: split it off its class, then re-refine.
            let mut seeded: Vec<u32> = colors.iter().map(|&c| c * 2).collect();
            seeded[f] += 1;
            let refined = refine_single(poset, Some(&seeded));
            canon_search(poset, refined, best);
        }
        return;
    }
    // Discrete coloring: colors define the canonical order.
    let mut perm: Vec<FaceId> = (0..n).collect();
    perm.sort_by_key(|&f| colors[f]);
    let mut new_id = vec![0usize; n];
    for (i, &f) in perm.iter().enumerate() {
        new_id[f] = i;
    }
    let ranks: Vec<i32> = perm.iter().map(|&f| poset.rank_of(f)).collect();
    let mut covers: Vec<(FaceId, FaceId)> = poset
        .covers()
        .iter()
        .map(|&(u, l)| (new_id[u], new_id[l]))
        .collect();
    covers.sort_unstable();
    let candidate = CanonicalForm { ranks, covers };
    match best {
        Some(b) if *b <= candidate => {}
        _ => *best = Some(candidate),
    }
}

/// Stable 64-bit digest of the canonical form (FNV-1a over its encoding).
pub fn canonical_hash(poset: &FacePoset) -> u64 {
    let form = canonical_form(poset);
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |v: u64| {
        for byte in v.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(form.ranks.len() as u64);
    for r in &form.ranks {
        eat(*r as i64 as u64);
    }
    for &(u, l) in &form.covers {
        eat(u as u64);
        eat(l as u64);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::build_poset;

    fn gon_poset(p: usize) -> FacePoset {
        let mut ranks = vec![-1];
        ranks.extend(vec![0; p]);
        ranks.extend(vec![1; p]);
        ranks.push(2);
        let mut covers = Vec::new();
        for v in 1..=p {
            covers.push((v, 0));
        }
        for e in 0..p {
            covers.push((p + 1 + e, 1 + e));
            covers.push((p + 1 + e, 1 + (e + 1) % p));
        }
        for e in p + 1..=2 * p {
            covers.push((2 * p + 1, e));
        }
        build_poset(ranks, covers).unwrap()
    }

    fn relabel(poset: &FacePoset, perm: &[FaceId]) -> FacePoset {
        let n = poset.face_count();
        let mut ranks = vec![0i32; n];
        for f in 0..n {
            ranks[perm[f]] = poset.rank_of(f);
        }
        let covers: Vec<(FaceId, FaceId)> = poset
            .covers()
            .iter()
            .map(|&(u, l)| (perm[u], perm[l]))
            .collect();
        build_poset(ranks, covers).unwrap()
    }

    #[test]
    fn pentagon_matches_relabeled_pentagon() {
        let a = gon_poset(5);
        let perm: Vec<FaceId> = (0..12).map(|f| (f + 7) % 12).collect();
        let b = relabel(&a, &perm);
        let map = is_isomorphic(&a, &b).unwrap();
        assert!(verify_isomorphism(&a, &b, &map));
    }

    #[test]
    fn pentagon_is_not_a_hexagon() {
        assert!(is_isomorphic(&gon_poset(5), &gon_poset(6)).is_none());
    }

    #[test]
    fn polygon_is_self_dual() {
        let a = gon_poset(5);
        let d = a.reversed().with_shifted_ranks(1);
        let map = is_isomorphic(&a, &d).unwrap();
        assert!(verify_isomorphism(&a, &d, &map));
    }

    #[test]
    fn refinement_blind_pair_needs_individualization() {
        // Hexagon boundary vs two disjoint triangle boundaries: identical
        // local degrees everywhere, so only the search can tell them apart.
        let ranks: Vec<i32> = vec![0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1];
        let mut hex = Vec::new();
        for e in 0..6usize {
            hex.push((6 + e, e));
            hex.push((6 + e, (e + 1) % 6));
        }
        let mut tris = Vec::new();
        for t in 0..2usize {
            for e in 0..3usize {
                tris.push((6 + 3 * t + e, 3 * t + e));
                tris.push((6 + 3 * t + e, 3 * t + (e + 1) % 3));
            }
        }
        let a = build_poset(ranks.clone(), hex).unwrap();
        let b = build_poset(ranks, tris).unwrap();
        assert!(is_isomorphic(&a, &b).is_none());
    }

    #[test]
    fn canonical_form_is_relabeling_invariant() {
        let a = gon_poset(6);
        let perm: Vec<FaceId> = (0..a.face_count()).map(|f| (f * 5 + 3) % 14).collect();
        let b = relabel(&a, &perm);
        assert_eq!(canonical_form(&a), canonical_form(&b));
        assert_eq!(canonical_hash(&a), canonical_hash(&b));
        assert_ne!(canonical_hash(&a), canonical_hash(&gon_poset(5)));
    }

    proptest::proptest! {
        #[test]
        fn random_relabelings_stay_isomorphic(seed in 0u64..1000) {
            use rand::{SeedableRng, seq::SliceRandom};
            let a = gon_poset(4);
            let mut perm: Vec<FaceId> = (0..a.face_count()).collect();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            perm.shuffle(&mut rng);
            let b = relabel(&a, &perm);
            let map = is_isomorphic(&a, &b).unwrap();
            proptest::prop_assert!(verify_isomorphism(&a, &b, &map));
        }
    }
}
