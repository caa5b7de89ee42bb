//! Prime factorization with respect to each product. Each product kind
//! reduces to factoring a stripped poset as a cardinal product; every
//! accepted split is certified by an explicit isomorphism, and `factor`
//! re-checks the final answer by rebuilding the product.

use std::collections::HashMap;
use std::fmt;

use crate::iso::{canonical_form, is_isomorphic, verify_isomorphism, CanonicalForm};
use crate::poset::{strip, End, FaceId, FacePoset, Polytope};
use crate::products::{cardinal_product, multi_product, ProductKind};
use crate::symmetry::flags;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorError {
    /// The Hasse diagram is not weakly connected.
    Disconnected,
    /// Rebuilding the product from the computed factors did not
    /// reproduce the input. Signals a bug in this module, never a
    /// property of the input.
    RebuildMismatch,
    /// The input exceeds the brute-force oracle's size limits.
    TooLargeForOracle,
    /// The input is outside the operation's domain.
    UnsupportedInput(String),
}

impl fmt::Display for FactorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorError::Disconnected => write!(f, "poset is not connected"),
            FactorError::RebuildMismatch => {
                write!(f, "internal error: factors do not rebuild the input")
            }
            FactorError::TooLargeForOracle => write!(f, "input too large for the oracle"),
            FactorError::UnsupportedInput(why) => write!(f, "unsupported input: {why}"),
        }
    }
}

impl std::error::Error for FactorError {}

/// Prime cardinal factors plus, for every input face, its coordinate in
/// each factor (ids local to the factor posets).
#[derive(Debug, Clone)]
pub struct CardinalFactorization {
    pub factors: Vec<FacePoset>,
    pub coordinatization: Vec<Vec<FaceId>>,
}

/// A polytope expressed as a product of primes: the factors with their
/// multiplicities (canonically ordered) and the face coordinatization.
#[derive(Debug, Clone)]
pub struct FactorizationResult {
    pub kind: ProductKind,
    pub factors: Vec<(Polytope, usize)>,
    pub coordinatization: Vec<Vec<FaceId>>,
}

/// Factors a connected ranked poset into prime cardinal factors.
pub fn factor_cardinal(poset: &FacePoset) -> Result<CardinalFactorization, FactorError> {
    if !poset.is_connected() {
        return Err(FactorError::Disconnected);
    }
    factor_connected(poset, false)
}

/// Brute-force cross-check for [`factor_cardinal`]: exhaustive over
/// atom bipartitions (bounded case) or parallel-class labelings
/// (doubly unbounded case), skipping the production pruning rules.
pub fn oracle_factor(poset: &FacePoset) -> Result<CardinalFactorization, FactorError> {
    if !poset.is_connected() {
        return Err(FactorError::Disconnected);
    }
    factor_connected(poset, true)
}

fn singleton(poset: &FacePoset) -> CardinalFactorization {
    CardinalFactorization {
        factors: vec![poset.clone()],
        coordinatization: (0..poset.face_count()).map(|x| vec![x]).collect(),
    }
}

/// One verified binary split: two induced factor posets and, for every
/// input face, its pair of local coordinates.
struct Split {
    left: FacePoset,
    right: FacePoset,
    coords: Vec<(FaceId, FaceId)>,
}

fn factor_connected(poset: &FacePoset, oracle: bool) -> Result<CardinalFactorization, FactorError> {
    let n = poset.face_count();
    if n <= 1 {
        return Ok(singleton(poset));
    }
    let mins = poset.minimal_faces();
    let maxs = poset.maximal_faces();
    let split = if mins.len() == 1 {
        split_bounded_below(poset, mins[0], oracle)?
    } else if maxs.len() == 1 {
        // Factor the dual and flip the factors back.
        split_bounded_below(&poset.reversed(), maxs[0], oracle)?.map(|s| Split {
            left: s.left.reversed(),
            right: s.right.reversed(),
            coords: s.coords,
        })
    } else {
        split_doubly_unbounded(poset, oracle)?
    };
    match split {
        None => Ok(singleton(poset)),
        Some(s) => {
            let lf = factor_connected(&s.left, oracle)?;
            let rf = factor_connected(&s.right, oracle)?;
            let mut factors = lf.factors;
            factors.extend(rf.factors);
            let coordinatization = s
                .coords
                .iter()
                .map(|&(l, r)| {
                    let mut t = lf.coordinatization[l].clone();
                    t.extend(&rf.coordinatization[r]);
                    t
                })
                .collect();
            Ok(CardinalFactorization { factors, coordinatization })
        }
    }
}

/// Splits a poset with a unique minimum. Atoms of a product lie in
/// exactly one factor, so candidate factors come from atom
/// bipartitions: the faces whose atom support stays inside one side.
fn split_bounded_below(
    poset: &FacePoset,
    min: FaceId,
    oracle: bool,
) -> Result<Option<Split>, FactorError> {
    let atoms: Vec<FaceId> = poset.up(min).to_vec();
    let a = atoms.len();
    if a < 2 {
        return Ok(None);
    }
    if oracle && a > 14 {
        return Err(FactorError::TooLargeForOracle);
    }
    if a > 128 {
        return Err(FactorError::UnsupportedInput(format!("{a} atoms is too many")));
    }

    let n = poset.face_count();
    let mut support = vec![0u128; n];
    for (i, &atom) in atoms.iter().enumerate() {
        for x in 0..n {
            if poset.leq(atom, x) {
                support[x] |= 1u128 << i;
            }
        }
    }

    // Candidate sides are unions of groups: single atoms for the
    // oracle, forced-together blocks for the production path.
    let groups: Vec<u128> = if oracle {
        (0..a).map(|i| 1u128 << i).collect()
    } else {
        forced_blocks(poset, &atoms)
    };
    let g = groups.len();
    if g < 2 {
        return Ok(None);
    }
    if g > 24 {
        return Err(FactorError::UnsupportedInput(format!(
            "{g} independent atom blocks is too many"
        )));
    }

    // Group 0 stays on the left; a set mask moves groups to the right.
    for s in 1..(1u64 << (g - 1)) {
        let mut right_mask = 0u128;
        for (j, &grp) in groups.iter().enumerate().skip(1) {
            if s >> (j - 1) & 1 == 1 {
                right_mask |= grp;
            }
        }
        let left_mask: u128 = groups.iter().fold(0, |acc, &g| acc | g) & !right_mask;
        if let Some(split) = try_atom_split(poset, &support, left_mask, right_mask) {
            return Ok(Some(split));
        }
    }
    Ok(None)
}

/// Atoms that cannot lie in different factors, as support masks. In a
/// product, two atoms from different factors have a unique minimal
/// common upper bound covering exactly the pair; any other pattern
/// forces the atoms together.
fn forced_blocks(poset: &FacePoset, atoms: &[FaceId]) -> Vec<u128> {
    let n = poset.face_count();
    let mut dsu = Dsu::new(atoms.len());
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            let uppers: Vec<FaceId> = (0..n)
                .filter(|&z| poset.leq(atoms[i], z) && poset.leq(atoms[j], z))
                .collect();
            let minimal: Vec<FaceId> = uppers
                .iter()
                .copied()
                .filter(|&z| uppers.iter().all(|&w| w == z || !poset.leq(w, z)))
                .collect();
            let separable = minimal.len() == 1 && {
                let mut pair = [atoms[i], atoms[j]];
                pair.sort_unstable();
                poset.down(minimal[0]) == pair
            };
            if !separable {
                dsu.union(i, j);
            }
        }
    }
    let mut block_of_root: HashMap<usize, usize> = HashMap::new();
    let mut blocks: Vec<u128> = Vec::new();
    for i in 0..atoms.len() {
        let root = dsu.find(i);
        let b = *block_of_root.entry(root).or_insert_with(|| {
            blocks.push(0);
            blocks.len() - 1
        });
        blocks[b] |= 1u128 << i;
    }
    blocks
}

fn try_atom_split(
    poset: &FacePoset,
    support: &[u128],
    left_mask: u128,
    right_mask: u128,
) -> Option<Split> {
    let n = poset.face_count();
    let left_faces: Vec<FaceId> = (0..n).filter(|&x| support[x] & right_mask == 0).collect();
    let right_faces: Vec<FaceId> = (0..n).filter(|&x| support[x] & left_mask == 0).collect();
    if left_faces.len() * right_faces.len() != n {
        return None;
    }
    let (lposet, _) = poset.restrict(&left_faces);
    let (rposet, _) = poset.restrict(&right_faces);
    let lindex: HashMap<FaceId, usize> =
        left_faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let rindex: HashMap<FaceId, usize> =
        right_faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();

    // The coordinate of x in a factor is the unique top of the part of
    // the factor lying below x; a missing unique top kills the split.
    let mut coords = Vec::with_capacity(n);
    let mut map = Vec::with_capacity(n);
    for x in 0..n {
        let l = unique_max_below(poset, &left_faces, x)?;
        let r = unique_max_below(poset, &right_faces, x)?;
        coords.push((lindex[&l], rindex[&r]));
        map.push(lindex[&l] * right_faces.len() + rindex[&r]);
    }
    verify_split(poset, lposet, rposet, coords, map)
}

fn unique_max_below(poset: &FacePoset, faces: &[FaceId], x: FaceId) -> Option<FaceId> {
    let mut best: Option<FaceId> = None;
    for &y in faces {
        if poset.leq(y, x) && best.is_none_or(|b| poset.rank_of(y) > poset.rank_of(b)) {
            best = Some(y);
        }
    }
    let top = best?;
    faces
        .iter()
        .all(|&y| !poset.leq(y, x) || poset.leq(y, top))
        .then_some(top)
}

/// Checks the candidate map against the actual cardinal product of the
/// candidate factors; ranks are aligned by a constant shift.
fn verify_split(
    poset: &FacePoset,
    left: FacePoset,
    right: FacePoset,
    coords: Vec<(FaceId, FaceId)>,
    map: Vec<FaceId>,
) -> Option<Split> {
    let (prod, _) = cardinal_product(&[&left, &right]);
    let delta = poset.rank_of(0) - prod.rank_of(map[0]);
    let shifted = prod.with_shifted_ranks(delta);
    verify_isomorphism(poset, &shifted, &map).then_some(Split { left, right, coords })
}

/// Splits a poset with several minimal and several maximal faces.
/// Hasse edges of a product are parallel (same factor) when they sit on
/// opposite sides of a cover square, and co-located edges with no
/// square over them must be parallel too; a 2-coloring of the parallel
/// classes proposes the factor fibers directly.
fn split_doubly_unbounded(
    poset: &FacePoset,
    oracle: bool,
) -> Result<Option<Split>, FactorError> {
    let n = poset.face_count();
    let edges: Vec<(FaceId, FaceId)> = poset.covers().iter().map(|&(u, l)| (l, u)).collect();
    let eindex: HashMap<(FaceId, FaceId), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut dsu = Dsu::new(edges.len());

    // Opposite sides of every square are parallel.
    for w in 0..n {
        let dw = poset.down(w);
        for (yi, &y) in dw.iter().enumerate() {
            for &z in &dw[yi + 1..] {
                for &x in poset.down(y) {
                    if poset.down(z).binary_search(&x).is_ok() {
                        dsu.union(eindex[&(x, y)], eindex[&(z, w)]);
                        dsu.union(eindex[&(x, z)], eindex[&(y, w)]);
                    }
                }
            }
        }
    }

    if !oracle {
        // Edges from a shared face whose far ends have no common cover
        // cannot move different factors (factors always close squares).
        for x in 0..n {
            let ups = poset.up(x);
            for (i, &y1) in ups.iter().enumerate() {
                for &y2 in &ups[i + 1..] {
                    if poset.up(y1).iter().all(|u| poset.up(y2).binary_search(u).is_err()) {
                        dsu.union(eindex[&(x, y1)], eindex[&(x, y2)]);
                    }
                }
            }
            let downs = poset.down(x);
            for (i, &z1) in downs.iter().enumerate() {
                for &z2 in &downs[i + 1..] {
                    if poset
                        .down(z1)
                        .iter()
                        .all(|d| poset.down(z2).binary_search(d).is_err())
                    {
                        dsu.union(eindex[&(z1, x)], eindex[&(z2, x)]);
                    }
                }
            }
        }
    }

    // Dense class ids in first-occurrence order.
    let mut class_of_root: HashMap<usize, usize> = HashMap::new();
    let mut class = vec![0usize; edges.len()];
    for e in 0..edges.len() {
        let root = dsu.find(e);
        let next = class_of_root.len();
        class[e] = *class_of_root.entry(root).or_insert(next);
    }
    let c = class_of_root.len();
    if c < 2 {
        return Ok(None);
    }
    let cap = if oracle { 16 } else { 20 };
    if c > cap {
        return Err(if oracle {
            FactorError::TooLargeForOracle
        } else {
            FactorError::UnsupportedInput(format!("{c} parallel classes is too many"))
        });
    }

    // Class 0 stays on the left; a set mask moves classes to the right.
    for s in 1..(1u64 << (c - 1)) {
        let right_class = |cl: usize| cl > 0 && s >> (cl - 1) & 1 == 1;
        if let Some(split) = try_edge_labeling(poset, &edges, &class, &right_class) {
            return Ok(Some(split));
        }
    }
    Ok(None)
}

fn try_edge_labeling(
    poset: &FacePoset,
    edges: &[(FaceId, FaceId)],
    class: &[usize],
    right_class: &dyn Fn(usize) -> bool,
) -> Option<Split> {
    let n = poset.face_count();
    // Components under each label: left edges vary the left coordinate
    // (fixing the right one) and vice versa.
    let mut left_comp = Dsu::new(n);
    let mut right_comp = Dsu::new(n);
    for (e, &(l, u)) in edges.iter().enumerate() {
        if right_class(class[e]) {
            right_comp.union(l, u);
        } else {
            left_comp.union(l, u);
        }
    }

    let base = (0..n).min_by_key(|&x| (poset.rank_of(x), x)).unwrap();
    let fiber_left: Vec<FaceId> =
        (0..n).filter(|&x| left_comp.find(x) == left_comp.find(base)).collect();
    let fiber_right: Vec<FaceId> =
        (0..n).filter(|&x| right_comp.find(x) == right_comp.find(base)).collect();
    if fiber_left.len() < 2 || fiber_right.len() < 2 {
        return None;
    }
    if fiber_left.len() * fiber_right.len() != n {
        return None;
    }

    // x's left coordinate is the unique left-fiber face sharing its
    // right-component (the slice through x parallel to the left fiber).
    let mut left_rep: HashMap<usize, usize> = HashMap::new();
    for (i, &m) in fiber_left.iter().enumerate() {
        if left_rep.insert(right_comp.find(m), i).is_some() {
            return None;
        }
    }
    let mut right_rep: HashMap<usize, usize> = HashMap::new();
    for (i, &m) in fiber_right.iter().enumerate() {
        if right_rep.insert(left_comp.find(m), i).is_some() {
            return None;
        }
    }

    let mut coords = Vec::with_capacity(n);
    let mut map = Vec::with_capacity(n);
    for x in 0..n {
        let l = *left_rep.get(&right_comp.find(x))?;
        let r = *right_rep.get(&left_comp.find(x))?;
        coords.push((l, r));
        map.push(l * fiber_right.len() + r);
    }
    let (lposet, _) = poset.restrict(&fiber_left);
    let (rposet, _) = poset.restrict(&fiber_right);
    verify_split(poset, lposet, rposet, coords, map)
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }
    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            // Smaller root wins, keeping class order deterministic.
            let (lo, hi) = (rx.min(ry), rx.max(ry));
            self.parent[hi] = lo;
        }
    }
}

/// Factors a polytope with respect to `kind`: strip, factor cardinally,
/// re-cap each factor, group by isomorphism, and re-check by rebuild.
pub fn factor(p: &Polytope, kind: ProductKind) -> Result<FactorizationResult, FactorError> {
    if p.is_empty_polytope() {
        return match kind {
            ProductKind::Join => Ok(FactorizationResult {
                kind,
                factors: Vec::new(),
                coordinatization: vec![Vec::new()],
            }),
            _ => Err(FactorError::UnsupportedInput(
                "the empty polytope is a join-only operand".into(),
            )),
        };
    }
    if kind == ProductKind::Topological && p.rank() < 2 {
        // Operands of this product have rank at least 2, so nothing of
        // lower rank can be one.
        return Ok(trivial_result(p, kind));
    }

    let (stripped, back) = match kind.stripped() {
        None => {
            let ids: Vec<FaceId> = (0..p.poset().face_count()).collect();
            (p.poset().clone(), ids)
        }
        Some(end) => strip(p, end),
    };
    let cf = factor_cardinal(&stripped)?;

    let polys: Vec<Polytope> = cf
        .factors
        .iter()
        .map(|f| recap(f, kind))
        .collect::<Result<_, _>>()?;

    let keys: Vec<(usize, usize, CanonicalForm)> = polys
        .iter()
        .map(|q| (q.face_count(), flags(q).len(), canonical_form(q.poset())))
        .collect();
    let mut order: Vec<usize> = (0..polys.len()).collect();
    order.sort_by(|&i, &j| keys[i].cmp(&keys[j]));

    let mut factors: Vec<(Polytope, usize)> = Vec::new();
    let mut last_key: Option<&CanonicalForm> = None;
    for &i in &order {
        if last_key == Some(&keys[i].2) {
            factors.last_mut().unwrap().1 += 1;
        } else {
            factors.push((polys[i].clone(), 1));
            last_key = Some(&keys[i].2);
        }
    }

    let expanded: Vec<Polytope> = order.iter().map(|&i| polys[i].clone()).collect();
    let rebuilt = multi_product(kind, &expanded).map_err(|_| FactorError::RebuildMismatch)?;
    if is_isomorphic(rebuilt.polytope.poset(), p.poset()).is_none() {
        return Err(FactorError::RebuildMismatch);
    }

    let mut coordinatization = vec![Vec::new(); p.face_count()];
    for (sid, &orig) in back.iter().enumerate() {
        coordinatization[orig] = order.iter().map(|&i| cf.coordinatization[sid][i]).collect();
    }
    match kind.stripped() {
        None => {}
        Some(End::Min) => {
            coordinatization[p.min_face()] = expanded.iter().map(|q| q.min_face()).collect();
        }
        Some(End::Max) => {
            coordinatization[p.max_face()] = expanded.iter().map(|q| q.max_face()).collect();
        }
        Some(End::Both) => {
            coordinatization[p.min_face()] = expanded.iter().map(|q| q.min_face()).collect();
            coordinatization[p.max_face()] = expanded.iter().map(|q| q.max_face()).collect();
        }
    }

    Ok(FactorizationResult { kind, factors, coordinatization })
}

fn trivial_result(p: &Polytope, kind: ProductKind) -> FactorizationResult {
    FactorizationResult {
        kind,
        factors: vec![(p.clone(), 1)],
        coordinatization: (0..p.face_count()).map(|x| vec![x]).collect(),
    }
}

/// Restores the faces stripped by `kind` and renormalizes ranks so the
/// minimum sits at -1.
fn recap(f: &FacePoset, kind: ProductKind) -> Result<Polytope, FactorError> {
    let capped = match kind.stripped() {
        None => f.clone(),
        Some(end) => f.cap_always(end),
    };
    let based = capped.with_shifted_ranks(-1 - capped.min_rank());
    Polytope::from_poset(based).map_err(|_| FactorError::RebuildMismatch)
}

/// True iff `factor` returns a single factor with multiplicity 1.
pub fn is_prime(p: &Polytope, kind: ProductKind) -> bool {
    match factor(p, kind) {
        Ok(r) => r.factors.len() == 1 && r.factors[0].1 == 1,
        Err(_) => false,
    }
}
