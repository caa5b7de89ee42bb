//! The four polytope products.
//!
//! All four are assembled the same way: strip the designated bounding
//! faces off each operand, take the cardinal product of what remains,
//! then cap the result back into a bounded poset. Which ends get
//! stripped (and restored) is the only thing that distinguishes the
//! join, the cartesian product, the direct sum, and the topological
//! product.

use crate::poset::{build_poset, strip, End, FaceId, FacePoset, Polytope};
use std::fmt;

/// Selects one of the four product constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProductKind {
    Join,
    Cartesian,
    DirectSum,
    Topological,
}

impl ProductKind {
    pub const ALL: [ProductKind; 4] = [
        ProductKind::Join,
        ProductKind::Cartesian,
        ProductKind::DirectSum,
        ProductKind::Topological,
    ];

    /// Short name used by the CLI and in reports.
    pub fn name(self) -> &'static str {
        match self {
            ProductKind::Join => "join",
            ProductKind::Cartesian => "cart",
            ProductKind::DirectSum => "dsum",
            ProductKind::Topological => "topo",
        }
    }

    pub fn parse(s: &str) -> Option<ProductKind> {
        match s {
            "join" => Some(ProductKind::Join),
            "cart" | "cartesian" => Some(ProductKind::Cartesian),
            "dsum" | "directsum" => Some(ProductKind::DirectSum),
            "topo" | "topological" => Some(ProductKind::Topological),
            _ => None,
        }
    }

    /// Ends removed from each operand before the cardinal product, and
    /// restored afterwards by capping.
    pub(crate) fn stripped(self) -> Option<End> {
        match self {
            ProductKind::Join => None,
            ProductKind::Cartesian => Some(End::Min),
            ProductKind::DirectSum => Some(End::Max),
            ProductKind::Topological => Some(End::Both),
        }
    }

    /// Rank of the product of operands with ranks `rs`.
    pub fn product_rank(self, rs: &[i32]) -> i32 {
        let k = rs.len() as i32;
        let sum: i32 = rs.iter().sum();
        match self {
            ProductKind::Join => sum + (k - 1),
            ProductKind::Cartesian | ProductKind::DirectSum => sum,
            ProductKind::Topological => sum - (k - 1),
        }
    }
}

impl fmt::Display for ProductKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProductError {
    /// Cartesian, direct-sum and topological products need operands
    /// with at least one proper face.
    EmptyOperand { position: usize },
    /// Topological products are defined for operands of rank 2 or
    /// higher; lower ranks leave nothing between the stripped ends.
    TopologicalRankTooLow { position: usize, rank: i32 },
}

impl fmt::Display for ProductError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductError::EmptyOperand { position } => {
                write!(f, "operand {} is the empty polytope", position)
            }
            ProductError::TopologicalRankTooLow { position, rank } => write!(
                f,
                "operand {} has rank {}; topological products need rank >= 2",
                position, rank
            ),
        }
    }
}

impl std::error::Error for ProductError {}

/// A product together with the data needed to take it apart again:
/// the operands and, for every face of the product, its coordinates.
#[derive(Clone)]
pub struct ProductStructure {
    pub kind: ProductKind,
    pub factors: Vec<Polytope>,
    pub polytope: Polytope,
    /// `coords[f][i]` is the face of `factors[i]` that face `f`
    /// projects to. Faces added back by capping project to the
    /// corresponding bounding face of every factor.
    pub coords: Vec<Vec<FaceId>>,
}

/// Cardinal product of posets: faces are tuples, and one tuple covers
/// another when they agree in all coordinates but one, where they
/// differ by a cover. Tuple ids are lexicographic in the coordinates.
pub(crate) fn cardinal_product(factors: &[&FacePoset]) -> (FacePoset, Vec<Vec<FaceId>>) {
    assert!(!factors.is_empty(), "cardinal product of no factors");
    let sizes: Vec<usize> = factors.iter().map(|p| p.face_count()).collect();
    let total: usize = sizes.iter().product();
    assert!(
        sizes.iter().all(|&s| s > 0) && total < (1 << 31),
        "cardinal product too large to enumerate"
    );

    let mut coords = Vec::with_capacity(total);
    let mut tuple = vec![0usize; factors.len()];
    for _ in 0..total {
        coords.push(tuple.clone());
        for i in (0..factors.len()).rev() {
            tuple[i] += 1;
            if tuple[i] < sizes[i] {
                break;
            }
            tuple[i] = 0;
        }
    }

    // Stride of coordinate i in the lexicographic tuple id.
    let mut stride = vec![1usize; factors.len()];
    for i in (0..factors.len().saturating_sub(1)).rev() {
        stride[i] = stride[i + 1] * sizes[i + 1];
    }

    let mut ranks = Vec::with_capacity(total);
    let mut covers = Vec::new();
    for (id, tuple) in coords.iter().enumerate() {
        let rank: i32 = tuple
            .iter()
            .zip(factors)
            .map(|(&c, p)| p.rank_of(c))
            .sum();
        ranks.push(rank);
        for (i, p) in factors.iter().enumerate() {
            for &lower in p.down(tuple[i]) {
                // Ids are arbitrary, so the step can go either way.
                let delta = (lower as i64 - tuple[i] as i64) * stride[i] as i64;
                covers.push((id, (id as i64 + delta) as usize));
            }
        }
    }

    let poset = build_poset(ranks, covers).expect("cardinal product covers are rank steps");
    (poset, coords)
}

/// Builds the `kind` product of `factors`, keeping the coordinate maps.
pub fn multi_product(
    kind: ProductKind,
    factors: &[Polytope],
) -> Result<ProductStructure, ProductError> {
    assert!(!factors.is_empty(), "product of no factors");
    for (position, p) in factors.iter().enumerate() {
        match kind {
            ProductKind::Join => {}
            ProductKind::Cartesian | ProductKind::DirectSum => {
                if p.is_empty_polytope() {
                    return Err(ProductError::EmptyOperand { position });
                }
            }
            ProductKind::Topological => {
                if p.is_empty_polytope() {
                    return Err(ProductError::EmptyOperand { position });
                }
                if p.rank() < 2 {
                    return Err(ProductError::TopologicalRankTooLow {
                        position,
                        rank: p.rank(),
                    });
                }
            }
        }
    }

    let stripped: Vec<(FacePoset, Vec<FaceId>)> = factors
        .iter()
        .map(|p| match kind.stripped() {
            None => {
                let ids: Vec<FaceId> = (0..p.poset().face_count()).collect();
                (p.poset().clone(), ids)
            }
            Some(end) => strip(p, end),
        })
        .collect();

    let parts: Vec<&FacePoset> = stripped.iter().map(|(q, _)| q).collect();
    let (core, core_coords) = cardinal_product(&parts);

    // A k-fold join sits k-1 ranks above the plain rank sum; the other
    // kinds inherit the sum of the stripped ranks directly.
    let shift = match kind {
        ProductKind::Join | ProductKind::DirectSum => factors.len() as i32 - 1,
        ProductKind::Cartesian | ProductKind::Topological => 0,
    };
    let core = core.with_shifted_ranks(shift);

    let capped = match kind.stripped() {
        None => core,
        Some(end) => core.cap_always(end),
    };

    // Coordinates: core faces map through the strip back-maps; capped
    // faces project to the matching bounding face of every factor.
    let mut coords: Vec<Vec<FaceId>> = core_coords
        .iter()
        .map(|tuple| {
            tuple
                .iter()
                .zip(&stripped)
                .map(|(&c, (_, back))| back[c])
                .collect()
        })
        .collect();
    let n_core = coords.len();
    for id in n_core..capped.face_count() {
        let tuple: Vec<FaceId> = if capped.rank_of(id) == capped.min_rank() {
            factors.iter().map(|p| p.min_face()).collect()
        } else {
            factors.iter().map(|p| p.max_face()).collect()
        };
        coords.push(tuple);
    }

    let polytope = Polytope::trusted(capped);
    Ok(ProductStructure {
        kind,
        factors: factors.to_vec(),
        polytope,
        coords,
    })
}

/// Binary product.
pub fn product(kind: ProductKind, p: &Polytope, q: &Polytope) -> Result<Polytope, ProductError> {
    Ok(multi_product(kind, &[p.clone(), q.clone()])?.polytope)
}

/// `k`-th power under `kind`; `k` must be at least 1.
pub fn power(kind: ProductKind, p: &Polytope, k: usize) -> Result<Polytope, ProductError> {
    assert!(k >= 1, "power exponent must be at least 1");
    Ok(multi_product(kind, &vec![p.clone(); k])?.polytope)
}

/// Direct sum built the long way around: dualize, take the cartesian
/// product, dualize back. Used to cross-check the stripped build.
pub fn dual_route_direct_sum(p: &Polytope, q: &Polytope) -> Result<Polytope, ProductError> {
    Ok(product(ProductKind::Cartesian, &p.dual(), &q.dual())?.dual())
}

/// Pyramid: join with a single apex vertex.
pub fn pyr(p: &Polytope) -> Polytope {
    product(ProductKind::Join, p, &point())
        .expect("joins accept every operand")
}

/// Prism: cartesian product with an edge.
pub fn pri(p: &Polytope) -> Result<Polytope, ProductError> {
    product(ProductKind::Cartesian, p, &edge())
}

/// Bipyramid: direct sum with an edge.
pub fn bipyr(p: &Polytope) -> Result<Polytope, ProductError> {
    product(ProductKind::DirectSum, p, &edge())
}

pub(crate) fn point() -> Polytope {
    let poset = build_poset(vec![-1, 0], vec![(1, 0)]).unwrap();
    Polytope::trusted(poset)
}

pub(crate) fn edge() -> Polytope {
    power(ProductKind::Join, &point(), 2).unwrap()
}
