//! Ranked face posets stored as explicit Hasse diagrams.
//!
//! A [`FacePoset`] is a list of faces (dense ids `0..n-1`, each carrying an
//! integer rank) together with the cover pairs of the order. Only covers are
//! stored; the full order relation is computed on demand and cached. A
//! [`Polytope`] wraps a poset that satisfies the abstract polytope axioms:
//! unique minimum at rank -1 and unique maximum, all maximal chains of equal
//! length, the diamond condition (exactly two faces strictly between any two
//! faces whose ranks differ by two), and strong connectivity of sections.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::bits::{and_ones, BitMatrix};

pub type FaceId = usize;

/// Which bounding face(s) an operation touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Min,
    Max,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PosetError {
    /// A cover pair names a face id outside `0..face_count`.
    DanglingId { id: FaceId },
    /// The cover relation contains a directed cycle.
    CyclicCovers,
    /// A cover pair whose ranks do not differ by exactly one.
    NonHasseCover { upper: FaceId, lower: FaceId },
    /// `cap` was asked to bound a side that already has a unique extremum.
    AlreadyBounded { end: &'static str },
    /// `section` was asked for an interval whose ends are not comparable.
    NotComparable { lower: FaceId, upper: FaceId },
    /// JSON input that does not describe a poset (bad ids, malformed shape).
    Json { reason: String },
}

impl fmt::Display for PosetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosetError::DanglingId { id } => write!(f, "cover names unknown face id {id}"),
            PosetError::CyclicCovers => write!(f, "cover relation contains a cycle"),
            PosetError::NonHasseCover { upper, lower } => {
                write!(f, "cover ({upper}, {lower}) does not step down exactly one rank")
            }
            PosetError::AlreadyBounded { end } => {
                write!(f, "poset already has a unique {end} face")
            }
            PosetError::NotComparable { lower, upper } => {
                write!(f, "faces {lower} and {upper} are not comparable")
            }
            PosetError::Json { reason } => write!(f, "bad poset JSON: {reason}"),
        }
    }
}

impl std::error::Error for PosetError {}

/// A ranked poset given by its Hasse diagram.
///
/// Invariants established by [`build_poset`]: face ids are dense, covers are
/// deduplicated and sorted, and every cover steps down exactly one rank (so
/// the relation is automatically acyclic and graded).
#[derive(Clone)]
pub struct FacePoset {
    ranks: Vec<i32>,
    covers: Vec<(FaceId, FaceId)>,
    up: Vec<Vec<FaceId>>,
    down: Vec<Vec<FaceId>>,
    down_reach: OnceLock<BitMatrix>,
    up_reach: OnceLock<BitMatrix>,
}

impl PartialEq for FacePoset {
    fn eq(&self, other: &Self) -> bool {
        self.ranks == other.ranks && self.covers == other.covers
    }
}
impl Eq for FacePoset {}

impl fmt::Debug for FacePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FacePoset")
            .field("ranks", &self.ranks)
            .field("covers", &self.covers)
            .finish()
    }
}

/// Builds a poset from per-face ranks and (upper, lower) cover pairs.
pub fn build_poset(
    ranks: Vec<i32>,
    covers: Vec<(FaceId, FaceId)>,
) -> Result<FacePoset, PosetError> {
    let n = ranks.len();
    let mut covers = covers;
    for &(u, l) in &covers {
        if u >= n {
            return Err(PosetError::DanglingId { id: u });
        }
        if l >= n {
            return Err(PosetError::DanglingId { id: l });
        }
    }
    covers.sort_unstable();
    covers.dedup();

    // Cycle check on the raw digraph, before the rank check so that cyclic
    // input is reported as cyclic rather than as a rank mismatch.
    {
        let mut indeg = vec![0usize; n];
        let mut adj: Vec<Vec<FaceId>> = vec![Vec::new(); n];
        for &(u, l) in &covers {
            adj[u].push(l);
            indeg[l] += 1;
        }
        let mut queue: Vec<FaceId> = (0..n).filter(|&f| indeg[f] == 0).collect();
        let mut seen = 0usize;
        while let Some(f) = queue.pop() {
            seen += 1;
            for &g in &adj[f] {
                indeg[g] -= 1;
                if indeg[g] == 0 {
                    queue.push(g);
                }
            }
        }
        if seen != n {
            return Err(PosetError::CyclicCovers);
        }
    }

    for &(u, l) in &covers {
        if ranks[u] != ranks[l] + 1 {
            return Err(PosetError::NonHasseCover { upper: u, lower: l });
        }
    }

    let mut up: Vec<Vec<FaceId>> = vec![Vec::new(); n];
    let mut down: Vec<Vec<FaceId>> = vec![Vec::new(); n];
    for &(u, l) in &covers {
        up[l].push(u);
        down[u].push(l);
    }
    for v in up.iter_mut().chain(down.iter_mut()) {
        v.sort_unstable();
    }

    Ok(FacePoset {
        ranks,
        covers,
        up,
        down,
        down_reach: OnceLock::new(),
        up_reach: OnceLock::new(),
    })
}

impl FacePoset {
    pub fn face_count(&self) -> usize {
        self.ranks.len()
    }

    pub fn rank_of(&self, f: FaceId) -> i32 {
        self.ranks[f]
    }

    pub fn ranks(&self) -> &[i32] {
        &self.ranks
    }

    pub fn covers(&self) -> &[(FaceId, FaceId)] {
        &self.covers
    }

    /// Faces covering `f`, ascending by id.
    pub fn up(&self, f: FaceId) -> &[FaceId] {
        &self.up[f]
    }

    /// Faces covered by `f`, ascending by id.
    pub fn down(&self, f: FaceId) -> &[FaceId] {
        &self.down[f]
    }

    pub fn min_rank(&self) -> i32 {
        self.ranks.iter().copied().min().unwrap_or(0)
    }

    pub fn max_rank(&self) -> i32 {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    pub fn faces_of_rank(&self, r: i32) -> Vec<FaceId> {
        (0..self.face_count()).filter(|&f| self.ranks[f] == r).collect()
    }

    /// Faces with no face below them, ascending.
    pub fn minimal_faces(&self) -> Vec<FaceId> {
        (0..self.face_count()).filter(|&f| self.down[f].is_empty()).collect()
    }

    /// Faces with no face above them, ascending.
    pub fn maximal_faces(&self) -> Vec<FaceId> {
        (0..self.face_count()).filter(|&f| self.up[f].is_empty()).collect()
    }

    /// Reachability downward: row `f` holds every `g <= f`.
    pub(crate) fn down_reach(&self) -> &BitMatrix {
        self.down_reach.get_or_init(|| {
            let n = self.face_count();
            let mut m = BitMatrix::new(n, n);
            let mut order: Vec<FaceId> = (0..n).collect();
            order.sort_by_key(|&f| self.ranks[f]);
            for f in order {
                m.set(f, f);
                let lows = self.down[f].clone();
                for l in lows {
                    m.or_row_into(l, f);
                }
            }
            m
        })
    }

    /// Reachability upward: row `f` holds every `g >= f`.
    pub(crate) fn up_reach(&self) -> &BitMatrix {
        self.up_reach.get_or_init(|| {
            let n = self.face_count();
            let mut m = BitMatrix::new(n, n);
            let mut order: Vec<FaceId> = (0..n).collect();
            order.sort_by_key(|&f| std::cmp::Reverse(self.ranks[f]));
            for f in order {
                m.set(f, f);
                let ups = self.up[f].clone();
                for u in ups {
                    m.or_row_into(u, f);
                }
            }
            m
        })
    }

    pub fn leq(&self, a: FaceId, b: FaceId) -> bool {
        if self.ranks[a] > self.ranks[b] {
            return false;
        }
        self.down_reach().get(b, a)
    }

    /// The ids in the closed interval `[lower, upper]`, ascending.
    pub fn interval(&self, lower: FaceId, upper: FaceId) -> Vec<FaceId> {
        and_ones(self.up_reach().row(lower), self.down_reach().row(upper))
    }

    /// Same poset with the order reversed and ranks negated.
    pub fn reversed(&self) -> FacePoset {
        let ranks: Vec<i32> = self.ranks.iter().map(|&r| -r).collect();
        let covers: Vec<(FaceId, FaceId)> = self.covers.iter().map(|&(u, l)| (l, u)).collect();
        build_poset(ranks, covers).expect("reversing preserves the Hasse property")
    }

    pub fn with_shifted_ranks(&self, delta: i32) -> FacePoset {
        let ranks: Vec<i32> = self.ranks.iter().map(|&r| r + delta).collect();
        build_poset(ranks, self.covers.clone()).expect("shifting preserves the Hasse property")
    }

    /// Induced subposet on `keep` (ascending ids), renumbered densely.
    /// Returns the subposet and the map from new ids back to old ids.
    pub fn restrict(&self, keep: &[FaceId]) -> (FacePoset, Vec<FaceId>) {
        let mut old_to_new: HashMap<FaceId, FaceId> = HashMap::new();
        for (new, &old) in keep.iter().enumerate() {
            old_to_new.insert(old, new);
        }
        let ranks: Vec<i32> = keep.iter().map(|&f| self.ranks[f]).collect();
        let mut covers = Vec::new();
        for &(u, l) in &self.covers {
            if let (Some(&nu), Some(&nl)) = (old_to_new.get(&u), old_to_new.get(&l)) {
                covers.push((nu, nl));
            }
        }
        let poset = build_poset(ranks, covers).expect("restriction preserves the Hasse property");
        (poset, keep.to_vec())
    }

    /// Adds a new bounding face below (or above) everything currently
    /// minimal (or maximal). The new face always takes the largest id.
    pub fn cap(&self, end: End) -> Result<FacePoset, PosetError> {
        match end {
            End::Both => self.cap(End::Min)?.cap(End::Max),
            End::Min => {
                if self.minimal_faces().len() == 1 {
                    return Err(PosetError::AlreadyBounded { end: "minimum" });
                }
                Ok(self.cap_always(End::Min))
            }
            End::Max => {
                if self.maximal_faces().len() == 1 {
                    return Err(PosetError::AlreadyBounded { end: "maximum" });
                }
                Ok(self.cap_always(End::Max))
            }
        }
    }

    /// Like [`cap`](Self::cap) but also bounds a side that already has a
    /// unique extremal face (product assembly caps single-vertex layers).
    pub(crate) fn cap_always(&self, end: End) -> FacePoset {
        match end {
            End::Both => self.cap_always(End::Min).cap_always(End::Max),
            End::Min => {
                let mins = self.minimal_faces();
                let mut ranks = self.ranks.clone();
                let new = ranks.len();
                ranks.push(self.min_rank() - 1);
                let mut covers = self.covers.clone();
                for m in mins {
                    covers.push((m, new));
                }
                build_poset(ranks, covers).expect("capping preserves the Hasse property")
            }
            End::Max => {
                let maxs = self.maximal_faces();
                let mut ranks = self.ranks.clone();
                let new = ranks.len();
                ranks.push(self.max_rank() + 1);
                let mut covers = self.covers.clone();
                for m in maxs {
                    covers.push((new, m));
                }
                build_poset(ranks, covers).expect("capping preserves the Hasse property")
            }
        }
    }

    /// Is the Hasse diagram connected as an undirected graph?
    pub fn is_connected(&self) -> bool {
        let n = self.face_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(f) = stack.pop() {
            for &g in self.up[f].iter().chain(self.down[f].iter()) {
                if !seen[g] {
                    seen[g] = true;
                    count += 1;
                    stack.push(g);
                }
            }
        }
        count == n
    }

    pub fn to_json_string(&self) -> String {
        let faces: Vec<JsonFace> = (0..self.face_count())
            .map(|id| JsonFace { id, rank: self.ranks[id] })
            .collect();
        let doc = JsonPoset { faces, covers: self.covers.clone() };
        serde_json::to_string(&doc).expect("poset serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<FacePoset, PosetError> {
        let doc: JsonPoset = serde_json::from_str(s)
            .map_err(|e| PosetError::Json { reason: e.to_string() })?;
        let n = doc.faces.len();
        let mut ranks = vec![0i32; n];
        let mut seen = vec![false; n];
        for face in &doc.faces {
            if face.id >= n || seen[face.id] {
                return Err(PosetError::Json {
                    reason: format!("face ids must be exactly 0..{n} with no repeats"),
                });
            }
            seen[face.id] = true;
            ranks[face.id] = face.rank;
        }
        build_poset(ranks, doc.covers)
    }

    /// Graphviz rendering: one node per face labeled `id:rank`, one edge per
    /// cover drawn from lower to upper face, ranks grouped as levels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=box];\n");
        let mut r = self.min_rank();
        while r <= self.max_rank() {
            let level = self.faces_of_rank(r);
            if !level.is_empty() {
                out.push_str("  { rank=same;");
                for f in level {
                    out.push_str(&format!(" f{f} [label=\"{f}:{r}\"];"));
                }
                out.push_str(" }\n");
            }
            r += 1;
        }
        for &(u, l) in &self.covers {
            out.push_str(&format!("  f{l} -> f{u};\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
struct JsonFace {
    id: usize,
    rank: i32,
}

#[derive(Serialize, Deserialize)]
struct JsonPoset {
    faces: Vec<JsonFace>,
    covers: Vec<(FaceId, FaceId)>,
}

/// One defect found while checking the polytope axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Finding {
    NoFaces,
    MultipleMinima(Vec<FaceId>),
    MultipleMaxima(Vec<FaceId>),
    /// The unique minimum does not sit at rank -1.
    BottomRankMismatch { rank: i32 },
    /// No face exists at a rank inside the span.
    RankGap { rank: i32 },
    /// A maximal chain through this face is shorter than rank + 2.
    ChainLengthMismatch { face: FaceId },
    /// The open interval between the two faces does not hold exactly two faces.
    DiamondViolation { lower: FaceId, upper: FaceId, count: usize },
    /// The proper part of the section `[lower, upper]` is disconnected.
    SectionDisconnected { lower: FaceId, upper: FaceId },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::NoFaces => write!(f, "poset has no faces"),
            Finding::MultipleMinima(ids) => write!(f, "multiple minimal faces: {ids:?}"),
            Finding::MultipleMaxima(ids) => write!(f, "multiple maximal faces: {ids:?}"),
            Finding::BottomRankMismatch { rank } => {
                write!(f, "minimum sits at rank {rank}, expected -1")
            }
            Finding::RankGap { rank } => write!(f, "no faces at rank {rank}"),
            Finding::ChainLengthMismatch { face } => {
                write!(f, "face {face} truncates a maximal chain")
            }
            Finding::DiamondViolation { lower, upper, count } => {
                write!(f, "{count} faces strictly between {lower} and {upper}, expected 2")
            }
            Finding::SectionDisconnected { lower, upper } => {
                write!(f, "section [{lower}, {upper}] has a disconnected proper part")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub is_polytope: bool,
    /// Rank of the maximum when the poset is a polytope.
    pub rank: Option<i32>,
    pub findings: Vec<Finding>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polytope {
            write!(f, "valid polytope of rank {}", self.rank.unwrap())
        } else {
            writeln!(f, "not a polytope:")?;
            for finding in &self.findings {
                writeln!(f, "  - {finding}")?;
            }
            Ok(())
        }
    }
}

/// Checks the abstract polytope axioms and reports every defect found.
pub fn validate_polytope(poset: &FacePoset) -> ValidationReport {
    let mut findings = Vec::new();
    let n = poset.face_count();
    if n == 0 {
        return ValidationReport {
            is_polytope: false,
            rank: None,
            findings: vec![Finding::NoFaces],
        };
    }

    let mins = poset.minimal_faces();
    let maxs = poset.maximal_faces();
    if mins.len() > 1 {
        findings.push(Finding::MultipleMinima(mins.clone()));
    }
    if maxs.len() > 1 {
        findings.push(Finding::MultipleMaxima(maxs.clone()));
    }
    if mins.len() == 1 && poset.rank_of(mins[0]) != -1 {
        findings.push(Finding::BottomRankMismatch { rank: poset.rank_of(mins[0]) });
    }

    let lo = poset.min_rank();
    let hi = poset.max_rank();
    let mut present = vec![false; (hi - lo + 1) as usize];
    for f in 0..n {
        present[(poset.rank_of(f) - lo) as usize] = true;
    }
    for (i, p) in present.iter().enumerate() {
        if !p {
            findings.push(Finding::RankGap { rank: lo + i as i32 });
        }
    }

    // Equal chain length: with graded covers this reduces to "every face
    // except the maximum has an upper cover, every face except the minimum
    // has a lower cover".
    for f in 0..n {
        if poset.up(f).is_empty() && poset.rank_of(f) != hi {
            findings.push(Finding::ChainLengthMismatch { face: f });
        }
        if poset.down(f).is_empty() && poset.rank_of(f) != lo {
            findings.push(Finding::ChainLengthMismatch { face: f });
        }
    }

    // Diamond condition: count rank-two paths.
    for g in 0..n {
        let mut count: HashMap<FaceId, usize> = HashMap::new();
        for &h in poset.down(g) {
            for &f in poset.down(h) {
                *count.entry(f).or_insert(0) += 1;
            }
        }
        let mut bad: Vec<(FaceId, usize)> =
            count.into_iter().filter(|&(_, c)| c != 2).collect();
        bad.sort_unstable();
        for (f, c) in bad {
            findings.push(Finding::DiamondViolation { lower: f, upper: g, count: c });
        }
    }

    // Strong connectivity: every section spanning at least three ranks must
    // have a connected proper part. Only meaningful once the poset is
    // bounded and graded, so skip when structural defects were found.
    if findings.is_empty() {
        for upper in 0..n {
            for lower in 0..n {
                if poset.rank_of(upper) - poset.rank_of(lower) < 3 {
                    continue;
                }
                if !poset.leq(lower, upper) {
                    continue;
                }
                if !section_proper_part_connected(poset, lower, upper) {
                    findings.push(Finding::SectionDisconnected { lower, upper });
                }
            }
        }
    }

    let is_polytope = findings.is_empty();
    ValidationReport {
        is_polytope,
        rank: if is_polytope { Some(hi) } else { None },
        findings,
    }
}

fn section_proper_part_connected(poset: &FacePoset, lower: FaceId, upper: FaceId) -> bool {
    let members = and_ones(poset.up_reach().row(lower), poset.down_reach().row(upper));
    let proper: Vec<FaceId> =
        members.into_iter().filter(|&f| f != lower && f != upper).collect();
    if proper.len() <= 1 {
        return true;
    }
    let mut in_set = HashMap::new();
    for (i, &f) in proper.iter().enumerate() {
        in_set.insert(f, i);
    }
    let mut seen = vec![false; proper.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        let f = proper[i];
        for &g in poset.up(f).iter().chain(poset.down(f).iter()) {
            if let Some(&j) = in_set.get(&g) {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
    }
    count == proper.len()
}

/// A face poset that passed [`validate_polytope`] (or is trusted to).
#[derive(Clone)]
pub struct Polytope {
    poset: FacePoset,
    rank: i32,
    flags: OnceLock<Vec<Vec<FaceId>>>,
    adjacency: OnceLock<Vec<Vec<usize>>>,
    auts: OnceLock<(crate::perm::PermGroup, crate::perm::PermGroup)>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.poset == other.poset
    }
}
impl Eq for Polytope {}

impl fmt::Debug for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Polytope")
            .field("rank", &self.rank)
            .field("faces", &self.poset.face_count())
            .finish()
    }
}

impl Polytope {
    /// Validates and wraps a poset.
    pub fn from_poset(poset: FacePoset) -> Result<Polytope, ValidationReport> {
        let report = validate_polytope(&poset);
        if !report.is_polytope {
            return Err(report);
        }
        Ok(Polytope::trusted(poset))
    }

    /// Wraps a poset known to satisfy the axioms by construction.
    pub(crate) fn trusted(poset: FacePoset) -> Polytope {
        let rank = if poset.face_count() == 0 { -1 } else { poset.max_rank() };
        Polytope {
            poset,
            rank,
            flags: OnceLock::new(),
            adjacency: OnceLock::new(),
            auts: OnceLock::new(),
        }
    }

    /// The polytope of rank -1: a single improper face.
    pub fn empty() -> Polytope {
        Polytope::trusted(build_poset(vec![-1], vec![]).unwrap())
    }

    pub fn is_empty_polytope(&self) -> bool {
        self.rank == -1
    }

    pub fn poset(&self) -> &FacePoset {
        &self.poset
    }

    pub fn rank(&self) -> i32 {
        self.rank
    }

    pub fn face_count(&self) -> usize {
        self.poset.face_count()
    }

    /// The unique face at rank -1.
    pub fn min_face(&self) -> FaceId {
        self.poset.minimal_faces()[0]
    }

    /// The unique face at rank `self.rank()`.
    pub fn max_face(&self) -> FaceId {
        self.poset.maximal_faces()[0]
    }

    /// Face counts at proper ranks `0..rank`.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..self.rank)
            .map(|r| self.poset.faces_of_rank(r).len())
            .collect()
    }

    /// Order-reversed polytope; face ids are preserved.
    pub fn dual(&self) -> Polytope {
        Polytope::trusted(self.poset.reversed().with_shifted_ranks(self.rank - 1))
    }

    /// The closed interval `[lower, upper]` as a polytope of rank
    /// `rank(upper) - rank(lower) - 1`, faces renumbered. Also returns the
    /// map from section ids back to ids of `self`.
    pub fn section(
        &self,
        lower: FaceId,
        upper: FaceId,
    ) -> Result<(Polytope, Vec<FaceId>), PosetError> {
        if !self.poset.leq(lower, upper) {
            return Err(PosetError::NotComparable { lower, upper });
        }
        let members = self.poset.interval(lower, upper);
        let (sub, back) = self.poset.restrict(&members);
        let shift = -(self.poset.rank_of(lower) + 1);
        Ok((Polytope::trusted(sub.with_shifted_ranks(shift)), back))
    }

    /// The vertex figure at a rank-0 face.
    pub fn vertex_figure(&self, vertex: FaceId) -> Result<(Polytope, Vec<FaceId>), PosetError> {
        self.section(vertex, self.max_face())
    }

    pub(crate) fn flag_cache(&self) -> &OnceLock<Vec<Vec<FaceId>>> {
        &self.flags
    }

    pub(crate) fn adjacency_cache(&self) -> &OnceLock<Vec<Vec<usize>>> {
        &self.adjacency
    }

    pub(crate) fn aut_cache(
        &self,
    ) -> &OnceLock<(crate::perm::PermGroup, crate::perm::PermGroup)> {
        &self.auts
    }
}

/// Removes the chosen bounding face(s). The result is generally not a
/// polytope; remaining faces are renumbered densely preserving id order.
/// Also returns the map from new ids back to the original ids.
pub fn strip(p: &Polytope, end: End) -> (FacePoset, Vec<FaceId>) {
    let drop: Vec<FaceId> = match end {
        End::Min => vec![p.min_face()],
        End::Max => vec![p.max_face()],
        End::Both => {
            let mut v = vec![p.min_face(), p.max_face()];
            v.sort_unstable();
            v.dedup();
            v
        }
    };
    let keep: Vec<FaceId> = (0..p.face_count()).filter(|f| !drop.contains(f)).collect();
    p.poset().restrict(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Pentagon incidences written out by hand: ids 0 = bottom, 1-5 =
    /// vertices, 6-10 = edges (edge i joins vertices i and i mod 5 + 1),
    /// 11 = top.
    pub(crate) fn pentagon() -> FacePoset {
        let mut ranks = vec![-1];
        ranks.extend([0; 5]);
        ranks.extend([1; 5]);
        ranks.push(2);
        let mut covers = Vec::new();
        for v in 1..=5 {
            covers.push((v, 0));
        }
        for e in 0..5usize {
            covers.push((6 + e, 1 + e));
            covers.push((6 + e, 1 + (e + 1) % 5));
        }
        for e in 6..=10 {
            covers.push((11, e));
        }
        build_poset(ranks, covers).unwrap()
    }

    #[test]
    fn pentagon_has_twelve_faces_and_twenty_covers() {
        let p = pentagon();
        assert_eq!(p.face_count(), 12);
        assert_eq!(p.covers().len(), 20);
        let report = validate_polytope(&p);
        assert!(report.is_polytope, "{report}");
        assert_eq!(report.rank, Some(2));
    }

    #[test]
    fn build_rejects_dangling_ids() {
        let err = build_poset(vec![-1, 0], vec![(2, 0)]).unwrap_err();
        assert_eq!(err, PosetError::DanglingId { id: 2 });
    }

    #[test]
    fn build_rejects_cycles_before_rank_checks() {
        let err = build_poset(vec![0, 1], vec![(1, 0), (0, 1)]).unwrap_err();
        assert_eq!(err, PosetError::CyclicCovers);
    }

    #[test]
    fn build_rejects_rank_jumps() {
        let err = build_poset(vec![-1, 1], vec![(1, 0)]).unwrap_err();
        assert_eq!(err, PosetError::NonHasseCover { upper: 1, lower: 0 });
    }

    #[test]
    fn build_deduplicates_covers() {
        let p = build_poset(vec![-1, 0], vec![(1, 0), (1, 0)]).unwrap();
        assert_eq!(p.covers().len(), 1);
    }

    #[test]
    fn validation_flags_each_axiom() {
        // Two squares glued along min and max: diamonds hold, but the
        // whole poset (the only section spanning three ranks) falls apart.
        let mut ranks = vec![-1];
        ranks.extend([0; 4]);
        ranks.extend([1; 4]);
        ranks.push(2);
        let mut covers = Vec::new();
        for v in 1..=4 {
            covers.push((v, 0));
        }
        // Square A on vertices 1, 2; edges 5, 6. Square B on 3, 4; edges 7, 8.
        for (e, (a, b)) in [(5, (1, 2)), (6, (1, 2)), (7, (3, 4)), (8, (3, 4))] {
            covers.push((e, a));
            covers.push((e, b));
        }
        for e in 5..=8 {
            covers.push((9, e));
        }
        let p = build_poset(ranks, covers).unwrap();
        let report = validate_polytope(&p);
        assert!(!report.is_polytope);
        assert_eq!(
            report.findings,
            vec![Finding::SectionDisconnected { lower: 0, upper: 9 }]
        );

        // Chop one edge off the pentagon: chain and diamond defects.
        let pent = pentagon();
        let keep: Vec<FaceId> = (0..12).filter(|&f| f != 10).collect();
        let (chopped, _) = pent.restrict(&keep);
        let report = validate_polytope(&chopped);
        assert!(!report.is_polytope);
        assert!(report
            .findings
            .iter()
            .any(|f| matches!(f, Finding::DiamondViolation { count: 1, .. })));
    }

    #[test]
    fn empty_polytope_is_the_rank_minus_one_object() {
        let e = Polytope::empty();
        assert_eq!(e.rank(), -1);
        assert_eq!(e.face_count(), 1);
        let report = validate_polytope(e.poset());
        assert!(report.is_polytope);
        assert_eq!(report.rank, Some(-1));
    }

    #[test]
    fn dual_reverses_and_preserves_ids() {
        let p = Polytope::from_poset(pentagon()).unwrap();
        let d = p.dual();
        assert_eq!(d.rank(), 2);
        // Vertices of the dual are the old edges.
        assert_eq!(d.poset().faces_of_rank(0), vec![6, 7, 8, 9, 10]);
        let dd = d.dual();
        assert_eq!(p.poset(), dd.poset());
    }

    #[test]
    fn sections_shift_ranks() {
        let p = Polytope::from_poset(pentagon()).unwrap();
        let (edge_section, back) = p.section(1, 6).unwrap();
        assert_eq!(edge_section.rank(), 0);
        assert_eq!(edge_section.face_count(), 2);
        assert_eq!(back, vec![1, 6]);
        let err = p.section(6, 1).unwrap_err();
        assert_eq!(err, PosetError::NotComparable { lower: 6, upper: 1 });
        let err2 = p.section(1, 2).unwrap_err();
        assert_eq!(err2, PosetError::NotComparable { lower: 1, upper: 2 });
    }

    #[test]
    fn strip_and_cap_round_trip() {
        let p = Polytope::from_poset(pentagon()).unwrap();
        let (bare, _) = strip(&p, End::Both);
        assert_eq!(bare.face_count(), 10);
        assert_eq!(bare.min_rank(), 0);
        assert_eq!(bare.max_rank(), 1);
        let recapped = bare.cap(End::Both).unwrap();
        assert!(crate::iso::is_isomorphic(&recapped, p.poset()).is_some());
        assert_eq!(
            bare.cap(End::Min).unwrap().cap(End::Min).unwrap_err(),
            PosetError::AlreadyBounded { end: "minimum" }
        );
    }

    #[test]
    fn json_round_trip_and_rejects_sparse_ids() {
        let p = pentagon();
        let s = p.to_json_string();
        let q = FacePoset::from_json_str(&s).unwrap();
        assert_eq!(p, q);
        let bad = r#"{"faces":[{"id":0,"rank":-1},{"id":2,"rank":0}],"covers":[]}"#;
        assert!(matches!(
            FacePoset::from_json_str(bad),
            Err(PosetError::Json { .. })
        ));
    }

    #[test]
    fn dot_output_levels_faces_by_rank() {
        let p = build_poset(vec![-1, 0], vec![(1, 0)]).unwrap();
        let dot = p.to_dot();
        assert!(dot.contains("f0 [label=\"0:-1\"]"));
        assert!(dot.contains("f0 -> f1;"));
    }
}
