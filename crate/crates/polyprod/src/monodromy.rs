//! Monodromy groups and their structure over products.
//!
//! The monodromy group of a polytope is generated by the exchange maps
//! r_0..r_{rank-1} sending each flag to its i-adjacent flag. For an
//! assembled product every flag splits into factor flags plus an
//! interleaving word, so each generator can be written in wreath
//! coordinates: a tuple of factor monodromy elements for every word,
//! plus a permutation of the word positions. Projecting onto the word
//! permutation exhibits the group as an extension of a symmetric group
//! by the kernel of that projection; this module builds the wreath
//! coordinates, checks them against flag adjacency exhaustively, and
//! verifies the known structure of the kernel for prisms, pyramids and
//! topological products of polygons.

use std::collections::BTreeMap;
use std::error::Error;
use std::fmt;

use crate::catalog;
use crate::factor::FactorizationResult;
use crate::perm::{find_complement, gcd, lcm, ComplementOutcome, Perm, PermGroup};
use crate::poset::Polytope;
use crate::products::{multi_product, ProductKind, ProductStructure};
use crate::symmetry::{
    self, factorial, flag_adjacency, flag_compose, flag_decompose, flags, word_steps,
    worded_positions,
};

/// Multiplication budget for complement searches started by the
/// report constructors.
pub const SPLIT_BUDGET: u64 = 50_000_000;

/// Kernels larger than this are not searched for complements; the
/// verdict degrades to Unknown instead of enumerating their elements.
const KERNEL_ELEMENT_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonodromyError {
    /// A constructed wreath generator disagreed with flag adjacency;
    /// this signals a bug, not bad input.
    EmbeddingMismatch { generator: usize, flag: usize },
    UnsupportedInput(String),
}

impl fmt::Display for MonodromyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonodromyError::EmbeddingMismatch { generator, flag } => write!(
                f,
                "internal error: wreath generator {generator} disagrees with adjacency at flag {flag}"
            ),
            MonodromyError::UnsupportedInput(why) => write!(f, "unsupported input: {why}"),
        }
    }
}

impl Error for MonodromyError {}

/// The exchange maps r_0..r_{rank-1} as permutations of flag indices.
#[derive(Debug, Clone)]
pub struct MonodromyGens {
    pub generators: Vec<Perm>,
    pub degree: usize,
}

impl MonodromyGens {
    pub fn group(&self) -> PermGroup {
        PermGroup::new(self.degree, self.generators.clone())
    }
}

/// Reads the exchange maps off the flag adjacency table and checks the
/// defining invariants: every r_i moves every flag, squares to the
/// identity, and commutes with r_j whenever |i - j| > 1.
///
/// Panics when an invariant fails; that would mean the underlying
/// poset slipped past validation.
pub fn monodromy_gens(p: &Polytope) -> MonodromyGens {
    let generators = symmetry::monodromy_generators(p);
    let degree = flags(p).len();
    for (i, r) in generators.iter().enumerate() {
        assert!(
            (0..degree).all(|x| r.apply(x) != x),
            "exchange {i} must move every flag"
        );
        assert!(r.then(r).is_identity(), "exchange {i} must be an involution");
    }
    for i in 0..generators.len() {
        for j in i + 2..generators.len() {
            assert_eq!(
                generators[i].then(&generators[j]),
                generators[j].then(&generators[i]),
                "distant exchanges {i} and {j} must commute"
            );
        }
    }
    MonodromyGens { generators, degree }
}

/// The monodromy group acting on flag indices.
pub fn monodromy_group(p: &Polytope) -> PermGroup {
    monodromy_gens(p).group()
}

/// One monodromy generator of a product in wreath coordinates: for
/// every interleaving word a tuple of factor monodromy elements, plus
/// one permutation of the word positions shared by all words.
#[derive(Debug, Clone)]
pub struct WreathElement {
    pub labels: BTreeMap<Vec<usize>, Vec<Perm>>,
    pub alpha: Perm,
}

impl WreathElement {
    /// Image of a decomposed flag: each factor flag moves by its label
    /// entry, and the word entries are pulled back through alpha.
    pub fn apply(&self, parts: &[usize], word: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let label = &self.labels[word];
        let parts: Vec<usize> = parts.iter().zip(label).map(|(&f, g)| g.apply(f)).collect();
        let inv = self.alpha.inv();
        let word: Vec<usize> = (0..word.len()).map(|i| word[inv.apply(i)]).collect();
        (parts, word)
    }
}

/// How a flag step is realized in a product: by one letter of the
/// interleaving word, or restored by capping.
#[derive(Clone, Copy)]
enum Step {
    Worded(usize),
    Capped,
}

fn classify(worded: &[usize], pos: usize) -> Step {
    match worded.binary_search(&pos) {
        Ok(i) => Step::Worded(i),
        Err(_) => Step::Capped,
    }
}

/// Every word with factor j appearing exactly counts[j] times, in
/// lexicographic order.
fn interleavings(counts: &[usize]) -> Vec<Vec<usize>> {
    fn grow(left: &mut [usize], cur: &mut Vec<usize>, remaining: usize, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        for j in 0..left.len() {
            if left[j] > 0 {
                left[j] -= 1;
                cur.push(j);
                grow(left, cur, remaining - 1, out);
                cur.pop();
                left[j] += 1;
            }
        }
    }
    let total: usize = counts.iter().sum();
    let mut out = Vec::new();
    grow(&mut counts.to_vec(), &mut Vec::with_capacity(total), total, &mut out);
    out
}

/// Wreath coordinates for every monodromy generator of an assembled
/// product, verified against flag adjacency on every flag.
///
/// Generator k exchanges the flag face of rank k, which sits between
/// the steps at positions k+1 and k+2 of the flag chain. When both
/// steps are worded and carry different letters the exchange swaps the
/// letters and leaves every factor alone; when they carry the same
/// letter, or one of them is a capped step, exactly one factor performs
/// its own exchange at the rank it has climbed to by that point.
pub fn wreath_elements(s: &ProductStructure) -> Result<Vec<WreathElement>, MonodromyError> {
    let p = &s.polytope;
    let rank = p.rank();
    let worded = worded_positions(s.kind, rank);
    let n = worded.len();
    let bottom_capped = worded.binary_search(&1).is_err();
    let counts: Vec<usize> = s
        .factors
        .iter()
        .map(|f| word_steps(s.kind, f.rank()) as usize)
        .collect();
    let words = interleavings(&counts);
    let factor_gens: Vec<Vec<Perm>> = s
        .factors
        .iter()
        .map(symmetry::monodromy_generators)
        .collect();
    let factor_degrees: Vec<usize> = s.factors.iter().map(|f| flags(f).len()).collect();

    let mut elements = Vec::new();
    for k in 0..rank.max(0) as usize {
        let lower = classify(&worded, k + 1);
        let upper = classify(&worded, k + 2);
        let alpha = match (lower, upper) {
            (Step::Worded(w), Step::Worded(_)) => Perm::transposition(n, w, w + 1),
            _ => Perm::identity(n),
        };
        let mut labels = BTreeMap::new();
        for b in &words {
            let mut tuple: Vec<Perm> =
                factor_degrees.iter().map(|&d| Perm::identity(d)).collect();
            let moved = match (lower, upper) {
                (Step::Worded(w), Step::Worded(w2)) => (b[w] == b[w2]).then_some(b[w]),
                (Step::Capped, Step::Worded(w)) | (Step::Worded(w), Step::Capped) => Some(b[w]),
                (Step::Capped, Step::Capped) => unreachable!("adjacent capped steps"),
            };
            if let Some(j) = moved {
                // Steps factor j has taken once the lower position is
                // reached; capping contributes one more for products
                // whose first step is restored.
                let done = b
                    .iter()
                    .zip(&worded)
                    .filter(|&(&letter, &pos)| letter == j && pos <= k + 1)
                    .count();
                let local = usize::from(bottom_capped) + done - 1;
                tuple[j] = factor_gens[j][local].clone();
            }
            labels.insert(b.clone(), tuple);
        }
        elements.push(WreathElement { labels, alpha });
    }

    let adjacency = flag_adjacency(p);
    for phi in 0..flags(p).len() {
        let (parts, word) = flag_decompose(s, phi);
        for (k, element) in elements.iter().enumerate() {
            let (np, nw) = element.apply(&parts, &word);
            if flag_compose(s, &np, &nw) != adjacency[phi][k] {
                return Err(MonodromyError::EmbeddingMismatch { generator: k, flag: phi });
            }
        }
    }
    Ok(elements)
}

/// Reassembles the product named by a factorization and returns the
/// wreath coordinates of its monodromy generators, one per rank.
pub fn wreath_embed(
    p: &Polytope,
    f: &FactorizationResult,
) -> Result<Vec<WreathElement>, MonodromyError> {
    let s = assemble(p, f)?;
    wreath_elements(&s)
}

fn assemble(p: &Polytope, f: &FactorizationResult) -> Result<ProductStructure, MonodromyError> {
    if f.coordinatization.len() != p.face_count() {
        return Err(MonodromyError::UnsupportedInput(
            "factorization does not describe this polytope".into(),
        ));
    }
    let expanded: Vec<Polytope> = f
        .factors
        .iter()
        .flat_map(|(q, m)| std::iter::repeat_n(q.clone(), *m))
        .collect();
    if expanded.is_empty() {
        return Err(MonodromyError::UnsupportedInput(
            "an empty factor list carries no wreath data".into(),
        ));
    }
    let s = multi_product(f.kind, &expanded)
        .map_err(|e| MonodromyError::UnsupportedInput(e.to_string()))?;
    if flags(&s.polytope).len() != flags(p).len() {
        return Err(MonodromyError::UnsupportedInput(
            "factorization flags disagree with the polytope".into(),
        ));
    }
    Ok(s)
}

/// Extension data for a product monodromy group: the order of its
/// image permuting word positions, the kernel of that projection, any
/// distinguished subgroups inside the kernel, and complement verdicts.
#[derive(Debug, Clone)]
pub struct ExtensionReport {
    pub monodromy_order: u64,
    /// Word length; the projection image is the full symmetric group
    /// on this many positions.
    pub n: usize,
    pub image_order: u64,
    pub kernel_order: u64,
    /// Orders of distinguished subgroups, by name.
    pub named_orders: Vec<(String, u64)>,
    /// Verdict for the whole group over the projection kernel.
    pub split: ComplementOutcome,
    /// Verdict for the kernel over its distinguished abelian subgroup,
    /// where the analysis names one.
    pub inner_split: Option<ComplementOutcome>,
}

/// Word class of every flag, the distinct words in lexicographic
/// order, and the word length.
fn word_classes(s: &ProductStructure) -> (Vec<usize>, Vec<Vec<usize>>, usize) {
    let count = flags(&s.polytope).len();
    let decomposed: Vec<Vec<usize>> = (0..count).map(|phi| flag_decompose(s, phi).1).collect();
    let mut index: BTreeMap<Vec<usize>, usize> = decomposed
        .iter()
        .map(|w| (w.clone(), 0))
        .collect();
    for (i, slot) in index.values_mut().enumerate() {
        *slot = i;
    }
    let class_of: Vec<usize> = decomposed.iter().map(|w| index[w]).collect();
    let n = decomposed.first().map_or(0, Vec::len);
    let words: Vec<Vec<usize>> = index.into_keys().collect();
    (class_of, words, n)
}

/// Builds the extension report for an assembled product: verifies the
/// wreath coordinates, projects onto the word-class action, checks the
/// image is the full symmetric group, and searches for a complement of
/// the kernel under the given multiplication budget.
pub fn structure_report(
    s: &ProductStructure,
    budget: u64,
) -> Result<ExtensionReport, MonodromyError> {
    if s.factors.len() < 2 {
        return Err(MonodromyError::UnsupportedInput(
            "the projection needs at least two factors".into(),
        ));
    }
    wreath_elements(s)?;
    let mono = monodromy_group(&s.polytope);
    let (class_of, words, n) = word_classes(s);
    let image = mono
        .action_on_classes(&class_of, words.len())
        .expect("monodromy permutes the interleaving words");
    let kernel = mono
        .kernel_of_action(&class_of, words.len())
        .expect("monodromy permutes the interleaving words");
    assert_eq!(
        image.order(),
        factorial(n as u64),
        "the projection must reach every arrangement of word positions"
    );
    assert_eq!(
        mono.order(),
        kernel.order() * image.order(),
        "group order must factor through the projection"
    );
    let split = if kernel.order() <= KERNEL_ELEMENT_CAP {
        find_complement(&mono, &kernel, budget)
    } else {
        ComplementOutcome::Unknown {
            reason: format!(
                "kernel of order {} exceeds the enumeration cap",
                kernel.order()
            ),
        }
    };
    Ok(ExtensionReport {
        monodromy_order: mono.order(),
        n,
        image_order: image.order(),
        kernel_order: kernel.order(),
        named_orders: Vec::new(),
        split,
        inner_split: None,
    })
}

/// Extension report for a factored polytope, under the default budget.
pub fn projection_report(
    p: &Polytope,
    f: &FactorizationResult,
) -> Result<ExtensionReport, MonodromyError> {
    let s = assemble(p, f)?;
    structure_report(&s, SPLIT_BUDGET)
}

/// One representative per coset of `h` in `k`, each the least element
/// of its coset, in image order.
fn coset_representatives(k: &PermGroup, h: &PermGroup) -> Vec<Perm> {
    let h_elements = h.elements();
    let mut reps: BTreeMap<Vec<usize>, Perm> = BTreeMap::new();
    for x in k.elements() {
        let least = h_elements.iter().map(|e| x.then(e)).min().unwrap();
        reps.entry(least.images().to_vec()).or_insert(least);
    }
    reps.into_values().collect()
}

/// Structural analysis of the monodromy group of the prism over a
/// p-gon, as an extension of the symmetric group on three word
/// positions.
///
/// With m = p / gcd(p, 4) and generators s_0, s_1, s_2, the analysis
/// verifies: |M| = 48 m^3; s_0 s_1 has order 4m; writing a = s_0,
/// b = (s_0 s_1)^2, c = s_2 b s_2 and d = s_1 c s_1 = abac, the kernel
/// K of the projection is generated by a, b, c and has order 8 m^3;
/// H = <b^2, c^2, d^2> is abelian of order m^3 with all three
/// generators of order m and is normal in K; K/H has eight cosets and
/// every representative squares into H. The report carries complement
/// verdicts both for the whole group over K and for K over H; only the
/// latter depends on p, failing to split exactly when 8 divides p.
///
/// Panics when any of these checks fails.
pub fn prism_structure(p: usize) -> ExtensionReport {
    assert!(p >= 3, "prisms need a polygon, so p >= 3");
    let base = catalog::gon(p).expect("p >= 3 is a valid polygon");
    let s = multi_product(ProductKind::Cartesian, &[base, catalog::edge()])
        .expect("a polygon prism is a valid cartesian product");
    wreath_elements(&s).expect("prism generators embed exactly");

    let m = p as u64 / gcd(p as u64, 4);
    let mono = monodromy_group(&s.polytope);
    assert_eq!(mono.order(), 48 * m * m * m, "prism monodromy order is 48 m^3");

    let gens = symmetry::monodromy_generators(&s.polytope);
    let (s0, s1, s2) = (&gens[0], &gens[1], &gens[2]);
    let s0s1 = s0.then(s1);
    assert_eq!(s0s1.order(), 4 * m, "s0 s1 has order 4m");
    let a = s0.clone();
    let b = s0s1.pow(2);
    let c = s2.then(&b).then(s2);
    let d = s1.then(&c).then(s1);
    assert_eq!(d, a.then(&b).then(&a).then(&c), "d = abac");

    let degree = mono.degree();
    let h = PermGroup::new(degree, vec![b.pow(2), c.pow(2), d.pow(2)]);
    assert_eq!(h.order(), m * m * m, "H has order m^3");
    for x in [&b, &c, &d] {
        assert_eq!(x.pow(2).order(), m, "each generator of H has order m");
    }
    for (x, y) in [(&b, &c), (&b, &d), (&c, &d)] {
        assert_eq!(
            x.pow(2).then(&y.pow(2)),
            y.pow(2).then(&x.pow(2)),
            "H is abelian"
        );
    }

    let (class_of, words, n) = word_classes(&s);
    let image = mono
        .action_on_classes(&class_of, words.len())
        .expect("monodromy permutes the interleaving words");
    let kernel = mono
        .kernel_of_action(&class_of, words.len())
        .expect("monodromy permutes the interleaving words");
    assert_eq!(kernel.order(), 8 * m * m * m, "the kernel has order 8 m^3");
    assert!(kernel.is_normal(&h), "H is normal in the kernel");
    for g in [&a, &b, &c] {
        assert!(kernel.contains(g), "a, b and c lie in the kernel");
    }
    let regenerated = PermGroup::new(degree, vec![a, b, c]);
    assert_eq!(
        regenerated.order(),
        kernel.order(),
        "a, b and c generate the kernel"
    );

    let cosets = coset_representatives(&kernel, &h);
    assert_eq!(cosets.len(), 8, "the kernel covers H by eight cosets");
    for rep in &cosets {
        assert!(
            h.contains(&rep.then(rep)),
            "every coset representative squares into H"
        );
    }

    let split = find_complement(&mono, &kernel, SPLIT_BUDGET);
    let inner = find_complement(&kernel, &h, SPLIT_BUDGET);
    ExtensionReport {
        monodromy_order: mono.order(),
        n,
        image_order: image.order(),
        kernel_order: kernel.order(),
        named_orders: vec![
            ("K".into(), kernel.order()),
            ("H".into(), h.order()),
            ("K/H".into(), kernel.order() / h.order()),
        ],
        split,
        inner_split: Some(inner),
    }
}

/// Structural analysis of the monodromy group of a topological product
/// of polygons.
///
/// With r polygons and m the least common multiple of their sizes, the
/// group has order (2m)^r r! and its projection kernel is the direct
/// product of r coordinate dihedral subgroups of order 2m, one per
/// word position: position i is handled by the bottom exchange
/// conjugated up by i swaps together with the top exchange conjugated
/// down. The analysis verifies the dihedral orders, that the
/// coordinate subgroups commute pairwise and together generate the
/// kernel, and searches for a complement of the kernel.
///
/// Panics when any of these checks fails.
pub fn topo_polygons_structure(ps: &[usize]) -> ExtensionReport {
    assert!(ps.len() >= 2, "need at least two polygons");
    assert!(ps.iter().all(|&p| p >= 2), "polygon parameters start at 2");
    let factors: Vec<Polytope> = ps
        .iter()
        .map(|&p| catalog::gon(p).expect("valid polygon"))
        .collect();
    let s = multi_product(ProductKind::Topological, &factors)
        .expect("polygons meet the rank threshold");
    let total = flags(&s.polytope).len();
    assert!(total <= 10_000, "flag count {total} exceeds the supported bound");
    wreath_elements(&s).expect("topological generators embed exactly");

    let r = ps.len();
    let m = ps.iter().fold(1u64, |acc, &p| lcm(acc, p as u64));
    let mono = monodromy_group(&s.polytope);
    let expected = (2 * m).pow(r as u32) * factorial(r as u64);
    assert_eq!(mono.order(), expected, "order is (2 lcm)^r r!");

    let gens = symmetry::monodromy_generators(&s.polytope);
    let mut bottom: Vec<Perm> = vec![gens[0].clone()];
    for i in 1..r {
        bottom.push(gens[i].then(&bottom[i - 1]).then(&gens[i]));
    }
    let mut top: Vec<Perm> = vec![gens[r].clone()];
    for i in (0..r - 1).rev() {
        let carried = gens[i + 1].then(top.last().unwrap()).then(&gens[i + 1]);
        top.push(carried);
    }
    top.reverse();

    let degree = mono.degree();
    for i in 0..r {
        let dihedral = PermGroup::new(degree, vec![bottom[i].clone(), top[i].clone()]);
        assert_eq!(dihedral.order(), 2 * m, "coordinate subgroups are dihedral of order 2 lcm");
        assert_eq!(bottom[i].then(&top[i]).order(), m, "the rotation part has order lcm");
    }
    for i in 0..r {
        for j in i + 1..r {
            for x in [&bottom[i], &top[i]] {
                for y in [&bottom[j], &top[j]] {
                    assert_eq!(x.then(y), y.then(x), "coordinate subgroups commute pairwise");
                }
            }
        }
    }

    let (class_of, words, n) = word_classes(&s);
    let image = mono
        .action_on_classes(&class_of, words.len())
        .expect("monodromy permutes the interleaving words");
    let kernel = mono
        .kernel_of_action(&class_of, words.len())
        .expect("monodromy permutes the interleaving words");
    assert_eq!(kernel.order(), (2 * m).pow(r as u32), "the kernel has order (2 lcm)^r");
    for g in bottom.iter().chain(&top) {
        assert!(kernel.contains(g), "coordinate generators lie in the kernel");
    }
    let mut all = bottom;
    all.extend(top);
    let regenerated = PermGroup::new(degree, all);
    assert_eq!(
        regenerated.order(),
        kernel.order(),
        "the coordinate subgroups generate the kernel"
    );

    let split = find_complement(&mono, &kernel, SPLIT_BUDGET);
    ExtensionReport {
        monodromy_order: mono.order(),
        n,
        image_order: image.order(),
        kernel_order: kernel.order(),
        named_orders: (0..r).map(|i| (format!("D{}", i + 1), 2 * m)).collect(),
        split,
        inner_split: None,
    }
}
