//! Stock polytopes.
//!
//! Polygons are built directly from their incidences; every other
//! family is a product power: simplices are join powers of a point,
//! cubes cartesian powers of an edge, cross polytopes direct-sum
//! powers of an edge, and the torus-like family topological powers
//! of a polygon.

use crate::poset::{build_poset, Polytope};
use crate::products::{power, ProductKind};
use std::fmt;

/// Names a polytope from the built-in families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogSpec {
    Point,
    Edge,
    Gon(usize),
    Simplex(i32),
    Cube(i32),
    Cross(i32),
    Torus { p: usize, d: i32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadParameter {
    pub what: String,
}

impl fmt::Display for BadParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad parameter: {}", self.what)
    }
}

impl std::error::Error for BadParameter {}

fn bad(what: impl Into<String>) -> BadParameter {
    BadParameter { what: what.into() }
}

pub fn make(spec: &CatalogSpec) -> Result<Polytope, BadParameter> {
    match *spec {
        CatalogSpec::Point => Ok(point()),
        CatalogSpec::Edge => Ok(edge()),
        CatalogSpec::Gon(p) => gon(p),
        CatalogSpec::Simplex(n) => simplex(n),
        CatalogSpec::Cube(n) => cube(n),
        CatalogSpec::Cross(n) => cross(n),
        CatalogSpec::Torus { p, d } => torus(p, d),
    }
}

pub fn point() -> Polytope {
    crate::products::point()
}

pub fn edge() -> Polytope {
    crate::products::edge()
}

/// The p-gon, p >= 2. Edge i joins vertices i and i+1 (mod p); the
/// digon keeps two parallel edges on the same vertex pair.
pub fn gon(p: usize) -> Result<Polytope, BadParameter> {
    if !(2..=100_000).contains(&p) {
        return Err(bad(format!("gon needs 2 <= p <= 100000, got {}", p)));
    }
    let mut ranks = vec![-1];
    ranks.extend(std::iter::repeat(0).take(p));
    ranks.extend(std::iter::repeat(1).take(p));
    ranks.push(2);
    let mut covers = Vec::with_capacity(4 * p + 1);
    let top = 2 * p + 1;
    for v in 1..=p {
        covers.push((v, 0));
    }
    for e in 0..p {
        covers.push((p + 1 + e, 1 + e));
        covers.push((p + 1 + e, 1 + (e + 1) % p));
        covers.push((top, p + 1 + e));
    }
    let poset = build_poset(ranks, covers).expect("polygon incidences are rank steps");
    Ok(Polytope::trusted(poset))
}

/// Rank-n simplex: the join of n+1 points. `simplex(-1)` is the empty
/// polytope and `simplex(0)` a point.
pub fn simplex(n: i32) -> Result<Polytope, BadParameter> {
    if !(-1..=14).contains(&n) {
        return Err(bad(format!("simplex needs -1 <= n <= 14, got {}", n)));
    }
    if n == -1 {
        return Ok(Polytope::empty());
    }
    Ok(power(ProductKind::Join, &point(), n as usize + 1).unwrap())
}

/// Rank-n cube: the cartesian power of an edge.
pub fn cube(n: i32) -> Result<Polytope, BadParameter> {
    if !(1..=10).contains(&n) {
        return Err(bad(format!("cube needs 1 <= n <= 10, got {}", n)));
    }
    Ok(power(ProductKind::Cartesian, &edge(), n as usize).unwrap())
}

/// Rank-n cross polytope: the direct-sum power of an edge.
pub fn cross(n: i32) -> Result<Polytope, BadParameter> {
    if !(1..=10).contains(&n) {
        return Err(bad(format!("cross needs 1 <= n <= 10, got {}", n)));
    }
    Ok(power(ProductKind::DirectSum, &edge(), n as usize).unwrap())
}

/// Rank-(d+1) topological power of a p-gon. For d = 2 this is the
/// torus map {4, 4 | p} familiar from tilings; higher d keeps the
/// same flat, self-dual flavour.
pub fn torus(p: usize, d: i32) -> Result<Polytope, BadParameter> {
    if !(2..=1000).contains(&p) {
        return Err(bad(format!("torus needs 2 <= p <= 1000, got p = {}", p)));
    }
    if !(2..=6).contains(&d) {
        return Err(bad(format!("torus needs 2 <= d <= 6, got d = {}", d)));
    }
    let faces = (2u64 * p as u64).checked_pow(d as u32);
    if faces.map_or(true, |f| f > 2_000_000) {
        return Err(bad(format!("torus({}, {}) is too large to enumerate", p, d)));
    }
    Ok(power(ProductKind::Topological, &gon(p)?, d as usize).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::is_isomorphic;

    fn binom(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn polygons() {
        for p in [2usize, 3, 5, 12] {
            let g = gon(p).unwrap();
            assert_eq!(g.rank(), 2);
            assert_eq!(g.f_vector(), vec![p, p]);
            assert!(crate::poset::validate_polytope(g.poset()).is_polytope);
            // Self-dual as an abstract polytope.
            assert!(is_isomorphic(g.poset(), g.dual().poset()).is_some());
        }
        assert!(gon(1).is_err());
    }

    #[test]
    fn simplices_count_subsets() {
        for n in 0..=5i32 {
            let s = simplex(n).unwrap();
            assert_eq!(s.rank(), n);
            let fv = s.f_vector();
            for k in 0..n {
                // Faces of rank k pick k+1 of the n+1 vertices.
                assert_eq!(fv[k as usize] as u64, binom(n as u64 + 1, k as u64 + 1));
            }
            assert!(crate::poset::validate_polytope(s.poset()).is_polytope);
        }
        assert!(simplex(-1).unwrap().is_empty_polytope());
        assert!(is_isomorphic(simplex(2).unwrap().poset(), gon(3).unwrap().poset()).is_some());
    }

    #[test]
    fn cubes_count_free_coordinates() {
        for n in 1..=4i32 {
            let c = cube(n).unwrap();
            assert_eq!(c.rank(), n);
            let fv = c.f_vector();
            for k in 0..n {
                // Rank k fixes n-k of the n coordinates at an endpoint.
                let expect = binom(n as u64, k as u64) << (n - k) as u64;
                assert_eq!(fv[k as usize] as u64, expect);
            }
            assert!(crate::poset::validate_polytope(c.poset()).is_polytope);
        }
        assert_eq!(cube(3).unwrap().f_vector(), vec![8, 12, 6]);
    }

    #[test]
    fn cross_polytopes_dualize_cubes() {
        for n in 1..=4i32 {
            let x = cross(n).unwrap();
            let c = cube(n).unwrap();
            assert_eq!(x.rank(), n);
            let mut fv = x.f_vector();
            fv.reverse();
            assert_eq!(fv, c.f_vector());
            assert!(is_isomorphic(x.poset(), c.dual().poset()).is_some());
        }
        assert_eq!(cross(3).unwrap().f_vector(), vec![6, 12, 8]);
    }

    #[test]
    fn square_torus_layers() {
        let t = torus(4, 2).unwrap();
        assert_eq!(t.rank(), 3);
        assert_eq!(t.f_vector(), vec![16, 32, 16]);
        assert!(crate::poset::validate_polytope(t.poset()).is_polytope);
        // Rank 3 powers exist too, just bigger.
        let t3 = torus(2, 3).unwrap();
        assert_eq!(t3.rank(), 4);
        assert_eq!(t3.f_vector().iter().sum::<usize>(), 64);
    }

    #[test]
    fn vertex_figure_of_the_cube_is_a_triangle() {
        let c = cube(3).unwrap();
        let v = c.poset().faces_of_rank(0)[0];
        let (fig, _) = c.vertex_figure(v).unwrap();
        assert!(is_isomorphic(fig.poset(), gon(3).unwrap().poset()).is_some());
    }

    #[test]
    fn parameters_out_of_range_are_rejected() {
        assert!(gon(0).is_err());
        assert!(simplex(15).is_err());
        assert!(cube(0).is_err());
        assert!(cross(11).is_err());
        assert!(torus(1, 2).is_err());
        assert!(torus(4, 1).is_err());
        assert!(torus(1000, 6).is_err());
    }

    #[test]
    fn make_matches_direct_constructors() {
        let direct = cube(3).unwrap();
        let made = make(&CatalogSpec::Cube(3)).unwrap();
        assert_eq!(direct.poset(), made.poset());
        assert_eq!(
            make(&CatalogSpec::Torus { p: 3, d: 2 }).unwrap().f_vector(),
            vec![9, 18, 9]
        );
    }
}
