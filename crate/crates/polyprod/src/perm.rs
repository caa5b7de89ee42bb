//! Permutations and permutation groups with a deterministic
//! stabilizer chain. Group orders, membership, orbits, kernels of
//! actions, and a search for complements of a normal subgroup.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

/// A permutation of `0..degree`, stored as its image table.
/// Products compose left to right: `(a.then(&b)).apply(x) == b.apply(a.apply(x))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    img: Vec<usize>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm { img: (0..degree).collect() }
    }

    /// Builds a permutation from its image table; panics unless `img`
    /// is a bijection on `0..img.len()`.
    pub fn from_images(img: Vec<usize>) -> Perm {
        let mut seen = vec![false; img.len()];
        for &x in &img {
            assert!(x < img.len() && !seen[x], "image table is not a bijection");
            seen[x] = true;
        }
        Perm { img }
    }

    /// The permutation exchanging `i` and `j`.
    pub fn transposition(degree: usize, i: usize, j: usize) -> Perm {
        let mut img: Vec<usize> = (0..degree).collect();
        img.swap(i, j);
        Perm { img }
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.img[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.img
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree());
        Perm { img: self.img.iter().map(|&x| other.img[x]).collect() }
    }

    pub fn inv(&self) -> Perm {
        let mut img = vec![0; self.img.len()];
        for (x, &y) in self.img.iter().enumerate() {
            img[y] = x;
        }
        Perm { img }
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(x, &y)| x == y)
    }

    pub fn pow(&self, k: u64) -> Perm {
        let mut acc = Perm::identity(self.degree());
        let mut sq = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.then(&sq);
            }
            sq = sq.then(&sq);
            k >>= 1;
        }
        acc
    }

    /// Cycles of length at least 2, each starting at its least point,
    /// ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.img[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.img[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.img[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Multiplicative order: lcm of the cycle lengths.
    pub fn order(&self) -> u64 {
        let mut acc = 1u64;
        for c in self.cycles() {
            acc = lcm(acc, c.len() as u64);
        }
        acc
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            f.write_str("(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", x)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone)]
struct Level {
    point: usize,
    /// Strong generators whose first moved base point is this one.
    gens: Vec<Perm>,
    /// orbit[i] in discovery order; transversal[p] maps the base point
    /// to p when p is in the orbit.
    orbit: Vec<usize>,
    transversal: Vec<Option<Perm>>,
}

/// A permutation group given by generators, with a stabilizer chain
/// built deterministically (no randomization), so all derived data is
/// reproducible run to run.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    levels: Vec<Level>,
}

enum Sift {
    Identity,
    /// Residue moves the base point at this level but leaves its orbit.
    Stuck(usize, Perm),
    /// Residue fixes every base point without sifting to the identity.
    FixesBase(Perm),
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> PermGroup {
        PermGroup::with_base_prefix(degree, gens, &[])
    }

    /// Builds the chain with the given points forced to the front of
    /// the base, so the pointwise stabilizer of `prefix` is generated
    /// by the strong generators of the later levels.
    pub fn with_base_prefix(degree: usize, gens: Vec<Perm>, prefix: &[usize]) -> PermGroup {
        let mut clean: Vec<Perm> = Vec::new();
        for g in gens {
            assert_eq!(g.degree(), degree, "generator degree mismatch");
            if !g.is_identity() && !clean.contains(&g) {
                clean.push(g);
            }
        }
        let mut group = PermGroup { degree, gens: clean.clone(), levels: Vec::new() };
        for &p in prefix {
            assert!(p < degree);
            group.levels.push(Level {
                point: p,
                gens: Vec::new(),
                orbit: Vec::new(),
                transversal: Vec::new(),
            });
        }
        for g in clean {
            group.place_generator(g);
        }
        group.complete();
        group
    }

    /// Stores a (non-identity) strong generator at the first level
    /// whose base point it moves, appending a level when it fixes the
    /// whole current base.
    fn place_generator(&mut self, g: Perm) {
        for i in 0..self.levels.len() {
            if g.apply(self.levels[i].point) != self.levels[i].point {
                self.levels[i].gens.push(g);
                return;
            }
        }
        let point = (0..self.degree).find(|&x| g.apply(x) != x).expect("identity placed");
        self.levels.push(Level {
            point,
            gens: vec![g],
            orbit: Vec::new(),
            transversal: Vec::new(),
        });
    }

    /// Orbit and transversal of the level's base point under the strong
    /// generators of this and all deeper levels.
    fn recompute(&mut self, level: usize) {
        let gens: Vec<Perm> = self.levels[level..]
            .iter()
            .flat_map(|l| l.gens.iter().cloned())
            .collect();
        let point = self.levels[level].point;
        let mut orbit = vec![point];
        let mut transversal: Vec<Option<Perm>> = vec![None; self.degree];
        transversal[point] = Some(Perm::identity(self.degree));
        let mut queue = VecDeque::from([point]);
        while let Some(p) = queue.pop_front() {
            for g in &gens {
                let q = g.apply(p);
                if transversal[q].is_none() {
                    let rep = transversal[p].as_ref().unwrap().then(g);
                    transversal[q] = Some(rep);
                    orbit.push(q);
                    queue.push_back(q);
                }
            }
        }
        self.levels[level].orbit = orbit;
        self.levels[level].transversal = transversal;
    }

    fn sift_from(&self, start: usize, g: Perm) -> Sift {
        let mut g = g;
        for i in start..self.levels.len() {
            let level = &self.levels[i];
            let image = g.apply(level.point);
            if image == level.point {
                continue;
            }
            match &level.transversal[image] {
                Some(rep) => g = g.then(&rep.inv()),
                None => return Sift::Stuck(i, g),
            }
        }
        if g.is_identity() {
            Sift::Identity
        } else {
            Sift::FixesBase(g)
        }
    }

    /// Deterministic Schreier-Sims, verifying levels deepest first so
    /// sifting only ever walks through already-verified levels. A
    /// residue lands deeper and re-dirties every level above it, which
    /// the climb back up re-verifies.
    fn complete(&mut self) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = self.levels.len() - 1;
        loop {
            self.recompute(i);
            let orbit = self.levels[i].orbit.clone();
            let gens: Vec<Perm> = self.levels[i..]
                .iter()
                .flat_map(|l| l.gens.iter().cloned())
                .collect();
            let mut dirty: Option<usize> = None;
            'scan: for p in orbit {
                let u_p = self.levels[i].transversal[p].clone().unwrap();
                for s in &gens {
                    let q = s.apply(p);
                    let u_q = self.levels[i].transversal[q].clone().unwrap();
                    let schreier = u_p.then(s).then(&u_q.inv());
                    match self.sift_from(i + 1, schreier) {
                        Sift::Identity => {}
                        Sift::Stuck(k, residue) => {
                            self.levels[k].gens.push(residue);
                            dirty = Some(k);
                            break 'scan;
                        }
                        Sift::FixesBase(residue) => {
                            // Moves no current base point, so it opens
                            // a fresh level at the end of the chain.
                            let at = self.levels.len();
                            self.place_generator(residue);
                            dirty = Some(at);
                            break 'scan;
                        }
                    }
                }
            }
            match dirty {
                Some(k) => i = k,
                None => {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                }
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn order(&self) -> u64 {
        self.levels.iter().map(|l| l.orbit.len() as u64).product()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        assert_eq!(g.degree(), self.degree);
        matches!(self.sift_from(0, g.clone()), Sift::Identity)
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// Orbits of the natural action on `0..degree`, each sorted, listed
    /// by least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(p) = queue.pop_front() {
                for g in &self.gens {
                    let q = g.apply(p);
                    if !seen[q] {
                        seen[q] = true;
                        orbit.push(q);
                        queue.push_back(q);
                    }
                }
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    /// All elements, by chain decomposition. Callers keep the order
    /// small; this is meant for groups of at most a few tens of
    /// thousands of elements.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = vec![Perm::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            let mut points = level.orbit.clone();
            points.sort_unstable();
            for e in &out {
                for &p in &points {
                    next.push(e.then(level.transversal[p].as_ref().unwrap()));
                }
            }
            out = next;
        }
        out
    }

    /// Whether `sub` (a subgroup) is normal in `self`.
    pub fn is_normal(&self, sub: &PermGroup) -> bool {
        assert_eq!(self.degree, sub.degree);
        for s in &sub.gens {
            for g in &self.gens {
                let conj = g.inv().then(s).then(g);
                if !sub.contains(&conj) {
                    return false;
                }
            }
        }
        true
    }

    /// The permutations each generator induces on the classes of
    /// `class_of` (values in `0..n_classes`), or None when some
    /// generator does not permute the classes.
    pub fn action_on_classes(&self, class_of: &[usize], n_classes: usize) -> Option<PermGroup> {
        assert_eq!(class_of.len(), self.degree);
        let mut images = Vec::with_capacity(self.gens.len());
        for g in &self.gens {
            let mut img: Vec<Option<usize>> = vec![None; n_classes];
            for x in 0..self.degree {
                let (c, d) = (class_of[x], class_of[g.apply(x)]);
                match img[c] {
                    None => img[c] = Some(d),
                    Some(prev) if prev == d => {}
                    Some(_) => return None,
                }
            }
            // A class missed by every point would leave a hole.
            let img: Option<Vec<usize>> = img.into_iter().collect();
            images.push(Perm::from_images(img?));
        }
        Some(PermGroup::new(n_classes, images))
    }

    /// Kernel of the action on the classes of `class_of`: the subgroup
    /// acting trivially on classes. None when the action is not
    /// well defined.
    pub fn kernel_of_action(&self, class_of: &[usize], n_classes: usize) -> Option<PermGroup> {
        self.action_on_classes(class_of, n_classes)?;
        // Chain over the combined domain (points then classes) with all
        // class points forced to the front of the base: the strong
        // generators of the later levels generate exactly the subgroup
        // fixing every class.
        let ext_degree = self.degree + n_classes;
        let ext_gens: Vec<Perm> = self
            .gens
            .iter()
            .map(|g| {
                let mut img: Vec<usize> = g.images().to_vec();
                let mut class_img = vec![0usize; n_classes];
                for x in 0..self.degree {
                    class_img[class_of[x]] = class_of[g.apply(x)];
                }
                img.extend(class_img.iter().map(|&c| self.degree + c));
                Perm::from_images(img)
            })
            .collect();
        let prefix: Vec<usize> = (self.degree..ext_degree).collect();
        let chain = PermGroup::with_base_prefix(ext_degree, ext_gens, &prefix);
        let kernel_gens: Vec<Perm> = chain.levels[n_classes..]
            .iter()
            .flat_map(|l| l.gens.iter())
            .map(|g| Perm::from_images(g.images()[..self.degree].to_vec()))
            .collect();
        Some(PermGroup::new(self.degree, kernel_gens))
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermGroup(degree {}, order {})", self.degree, self.order())
    }
}

/// Outcome of the complement search for a normal subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComplementOutcome {
    /// A subgroup meeting the normal subgroup trivially and covering
    /// every coset; its generators are the witness.
    Split { complement: Vec<Perm> },
    /// Exhaustive search proved no complement exists.
    NonSplit,
    /// The search gave up; the extension is unresolved either way.
    Unknown { reason: String },
}

/// Searches for a complement of the normal subgroup `k` in `g`: a
/// subgroup `H` with `H` meeting `k` only in the identity and `H k = g`.
///
/// The search lifts a minimal generating set of the quotient back into
/// `g`, pruning lifts whose order differs from their image's order; it
/// is exhaustive over such lifts, so `NonSplit` is a proof. `budget`
/// bounds the number of group multiplications before giving up.
pub fn find_complement(g: &PermGroup, k: &PermGroup, budget: u64) -> ComplementOutcome {
    assert!(g.is_normal(k), "complement search needs a normal subgroup");
    let index = g.order() / k.order();
    if index == 1 {
        return ComplementOutcome::Split { complement: Vec::new() };
    }
    if index > 5000 {
        return ComplementOutcome::Unknown {
            reason: format!("quotient of order {} is too large to enumerate", index),
        };
    }

    // Enumerate the right cosets of k by breadth-first search, labeling
    // each coset by the least image table it contains.
    let k_elements = k.elements();
    let mut spent: u64 = 0;
    let label = |rep: &Perm, spent: &mut u64| -> Vec<usize> {
        *spent += k_elements.len() as u64;
        k_elements.iter().map(|x| x.then(rep)).min().unwrap().img
    };
    let mut coset_of: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut reps: Vec<Perm> = vec![Perm::identity(g.degree())];
    coset_of.insert(label(&reps[0], &mut spent), 0);
    let mut i = 0;
    while i < reps.len() {
        for s in g.generators() {
            let next = reps[i].then(s);
            let l = label(&next, &mut spent);
            let n = coset_of.len();
            coset_of.entry(l).or_insert_with(|| {
                reps.push(next);
                n
            });
        }
        i += 1;
        if spent > budget {
            return ComplementOutcome::Unknown {
                reason: "multiplication budget exhausted while listing cosets".into(),
            };
        }
    }
    assert_eq!(reps.len() as u64, index, "coset count must match the index");

    // The quotient, acting on its own cosets by right multiplication.
    let q_gens: Vec<Perm> = g
        .generators()
        .iter()
        .map(|s| {
            let img: Vec<usize> = reps
                .iter()
                .map(|r| coset_of[&label(&r.then(s), &mut spent)])
                .collect();
            Perm::from_images(img)
        })
        .collect();
    let quotient = PermGroup::new(reps.len(), q_gens);
    let q_elements = quotient.elements();

    // Minimal generating set of the quotient: smallest subsets first,
    // in index order.
    let closure = |gens: &[&Perm], cap: usize, spent: &mut u64| -> Option<Vec<Perm>> {
        let degree = gens.first().map_or(0, |g| g.degree());
        let mut seen: HashSet<Perm> = HashSet::new();
        let mut out = vec![Perm::identity(degree)];
        seen.insert(out[0].clone());
        let mut i = 0;
        while i < out.len() {
            for s in gens {
                *spent += 1;
                let next = out[i].then(s);
                if seen.insert(next.clone()) {
                    if out.len() >= cap {
                        return None;
                    }
                    out.push(next);
                }
            }
            i += 1;
        }
        Some(out)
    };
    let q_order = quotient.order() as usize;
    let mut q_generating: Option<Vec<usize>> = None;
    'sizes: for size in 1..=3usize {
        let mut pick: Vec<usize> = (0..size).collect();
        loop {
            let gens: Vec<&Perm> = pick.iter().map(|&i| &q_elements[i]).collect();
            if let Some(c) = closure(&gens, q_order, &mut spent) {
                if c.len() == q_order {
                    q_generating = Some(pick.clone());
                    break 'sizes;
                }
            }
            if spent > budget {
                return ComplementOutcome::Unknown {
                    reason: "multiplication budget exhausted while generating the quotient".into(),
                };
            }
            // next combination of indices
            let mut j = size;
            loop {
                if j == 0 {
                    break;
                }
                j -= 1;
                if pick[j] + (size - j) < q_elements.len() {
                    pick[j] += 1;
                    for l in j + 1..size {
                        pick[l] = pick[l - 1] + 1;
                    }
                    break;
                }
                if j == 0 {
                    continue 'sizes;
                }
            }
        }
    }
    let q_generating = match q_generating {
        Some(g) => g,
        None => {
            return ComplementOutcome::Unknown {
                reason: "quotient needs more than 3 generators".into(),
            }
        }
    };

    // Lift each quotient generator: its coset is the image of coset 0
    // (right multiplication acts regularly), and every lift lives in
    // that coset. A section must preserve element orders exactly.
    let mut lift_sets: Vec<Vec<Perm>> = Vec::new();
    for &qi in &q_generating {
        let q = &q_elements[qi];
        let coset_rep = &reps[q.apply(0)];
        let want = q.order();
        let lifts: Vec<Perm> = k_elements
            .iter()
            .map(|x| x.then(coset_rep))
            .filter(|cand| cand.order() == want)
            .collect();
        if lifts.is_empty() {
            return ComplementOutcome::NonSplit;
        }
        lift_sets.push(lifts);
    }

    // Depth-first over lift choices; a choice works when its closure
    // has exactly the quotient's order.
    let mut choice: Vec<usize> = Vec::new();
    loop {
        if choice.len() == lift_sets.len() {
            let gens: Vec<&Perm> = choice
                .iter()
                .zip(&lift_sets)
                .map(|(&c, set)| &set[c])
                .collect();
            if let Some(h) = closure(&gens, q_order, &mut spent) {
                if h.len() == q_order {
                    return ComplementOutcome::Split {
                        complement: gens.into_iter().cloned().collect(),
                    };
                }
            }
            if spent > budget {
                return ComplementOutcome::Unknown {
                    reason: "multiplication budget exhausted during the section search".into(),
                };
            }
            // backtrack
            loop {
                match choice.pop() {
                    None => return ComplementOutcome::NonSplit,
                    Some(c) => {
                        if c + 1 < lift_sets[choice.len()].len() {
                            choice.push(c + 1);
                            break;
                        }
                    }
                }
            }
        } else {
            choice.push(0);
        }
    }
}
