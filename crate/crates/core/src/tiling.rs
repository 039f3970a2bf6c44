//! The tiling of the upper half plane by the translates `h_M(D)` of the
//! fundamental domain `D = {|z| ≥ 1, |Re z| ≤ 1/2}`, and its 9-regular
//! adjacency graph, which is the Cayley graph of `PSL(2, ℤ)` for `E_0, …, E_8`.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::psl2z::{FloatPoint, GeneratorIndex, ProjectiveMatrix, UpperHalfPoint};

/// Width of the band around `∂D` in which float reduction is ambiguous.
pub const BOUNDARY_BAND: f64 = 1e-9;

/// Vertex cap for [`cayley_ball`].
pub const MAX_BALL_VERTICES: usize = 4_000_000;

const MAX_FLOAT_REDUCTIONS: usize = 100_000;

/// A tile `h_M(D)`, labeled by the canonical matrix `M`.
pub type TileId = ProjectiveMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub tile: TileId,
    pub point: UpperHalfPoint,
    /// The reduced point lies on `∂D`, so the tile is not unique.
    pub on_boundary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloatReduction {
    pub tile: TileId,
    pub point: FloatPoint,
    /// The reduced point lies within [`BOUNDARY_BAND`] of `∂D`.
    pub on_boundary: bool,
}

fn translation(k: BigInt) -> ProjectiveMatrix {
    ProjectiveMatrix::new(BigInt::one(), k, BigInt::zero(), BigInt::one()).expect("det 1")
}

fn e0() -> ProjectiveMatrix {
    ProjectiveMatrix::generator(GeneratorIndex::new(0).unwrap())
}

/// `(M, z_0)` with `z_0 ∈ D` and `z = h_M(z_0)`, in exact arithmetic.
pub fn reduce_to_fundamental(z: &UpperHalfPoint) -> Reduction {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let one = BigRational::one();
    let mut tile = ProjectiveMatrix::identity();
    let mut w = z.clone();
    loop {
        let k = (w.re() + &half).floor().to_integer();
        if !k.is_zero() {
            w = w.translate(&-&k);
            tile = tile.multiply(&translation(k));
        }
        if w.abs_sq() < one {
            w = w.invert();
            tile = tile.multiply(&e0());
        } else {
            break;
        }
    }
    let on_boundary = w.re().abs() == half || w.abs_sq() == one;
    Reduction {
        tile,
        point: w,
        on_boundary,
    }
}

/// Float version of [`reduce_to_fundamental`].
pub fn reduce_to_fundamental_f64(z: FloatPoint) -> Result<FloatReduction> {
    if !(z.im() > 0.0) || !z.re().is_finite() || !z.im().is_finite() {
        return Err(Error::domain("point of the upper half plane", z));
    }
    let mut tile = ProjectiveMatrix::identity();
    let mut w = z.0;
    for _ in 0..MAX_FLOAT_REDUCTIONS {
        let k = (w.re + 0.5).floor();
        if k != 0.0 {
            w.re -= k;
            let k = BigInt::from(k as i64);
            tile = tile.multiply(&translation(k));
        }
        if w.norm_sqr() < 1.0 {
            w = -1.0 / w;
            tile = tile.multiply(&e0());
        } else {
            let on_boundary =
                (w.re.abs() - 0.5).abs() < BOUNDARY_BAND || (w.norm() - 1.0).abs() < BOUNDARY_BAND;
            return Ok(FloatReduction {
                tile,
                point: FloatPoint(w),
                on_boundary,
            });
        }
    }
    Err(Error::Resource(format!("reduction of {z} did not terminate")))
}

/// The nine tiles adjacent to `h_M(D)`: `M·E_i`, `i = 0, …, 8`.
pub fn neighbors(m: &TileId) -> [TileId; 9] {
    std::array::from_fn(|i| m.multiply(&ProjectiveMatrix::generator(GeneratorIndex::new(i).unwrap())))
}

pub fn are_adjacent(m: &TileId, n: &TileId) -> bool {
    m.inverse().multiply(n).is_unit_neighbor()
}

/// Ball of radius `r` around the identity in the tiling graph, in BFS order.
#[derive(Debug, Clone)]
pub struct TilingGraph {
    vertices: Vec<TileId>,
    depth: Vec<usize>,
    index: HashMap<TileId, usize>,
    edges: Vec<(usize, usize)>,
    radius: usize,
}

pub fn cayley_ball(radius: usize) -> Result<TilingGraph> {
    let mut vertices = vec![ProjectiveMatrix::identity()];
    let mut depth = vec![0];
    let mut index = HashMap::from([(ProjectiveMatrix::identity(), 0)]);
    let mut head = 0;
    while head < vertices.len() {
        if depth[head] < radius {
            for n in neighbors(&vertices[head]) {
                if !index.contains_key(&n) {
                    if vertices.len() >= MAX_BALL_VERTICES {
                        return Err(Error::Resource(format!(
                            "cayley_ball({radius}) exceeds {MAX_BALL_VERTICES} vertices"
                        )));
                    }
                    index.insert(n.clone(), vertices.len());
                    depth.push(depth[head] + 1);
                    vertices.push(n);
                }
            }
        }
        head += 1;
    }
    let mut edges = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        for n in neighbors(v) {
            if let Some(&j) = index.get(&n) {
                if j > i {
                    edges.push((i, j));
                }
            }
        }
    }
    edges.sort_unstable();
    Ok(TilingGraph {
        vertices,
        depth,
        index,
        edges,
        radius,
    })
}

#[derive(Serialize)]
struct GraphJson<'a> {
    radius: usize,
    vertices: Vec<String>,
    edges: &'a [(usize, usize)],
}

impl TilingGraph {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn vertices(&self) -> &[TileId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn index_of(&self, m: &TileId) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Word distance of vertex `i` from the identity.
    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        neighbors(&self.vertices[i])
            .iter()
            .filter(|n| self.index.contains_key(n))
            .count()
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(|&i| self.depth[i] < self.radius)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph tiling {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(out, "  {i} [label=\"{}\"];", v.label()).unwrap();
        }
        for (i, j) in &self.edges {
            writeln!(out, "  {i} -- {j};").unwrap();
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson {
            radius: self.radius,
            vertices: self.vertices.iter().map(ProjectiveMatrix::label).collect(),
            edges: &self.edges,
        })
        .expect("plain data serializes")
    }
}

/// Tile of one point of a walk, with boundary ambiguity flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct TileStep {
    pub tile: TileId,
    pub on_boundary: bool,
}

pub fn project_walk(trajectory: &[UpperHalfPoint]) -> Vec<TileStep> {
    trajectory
        .iter()
        .map(|z| {
            let r = reduce_to_fundamental(z);
            TileStep {
                tile: r.tile,
                on_boundary: r.on_boundary,
            }
        })
        .collect()
}

pub fn project_walk_f64(trajectory: &[FloatPoint]) -> Result<Vec<TileStep>> {
    trajectory
        .iter()
        .map(|&z| {
            reduce_to_fundamental_f64(z).map(|r| TileStep {
                tile: r.tile,
                on_boundary: r.on_boundary,
            })
        })
        .collect()
}

/// True when consecutive tiles are equal or adjacent.
pub fn is_nearest_neighbor_path(steps: &[TileStep]) -> bool {
    steps
        .windows(2)
        .all(|p| p[0].tile == p[1].tile || are_adjacent(&p[0].tile, &p[1].tile))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrac::ExtendedRational;

    fn pt(re: &str, im: &str) -> UpperHalfPoint {
        UpperHalfPoint::from_parts(&re.parse().unwrap(), &im.parse::<ExtendedRational>().unwrap())
            .unwrap()
    }

    fn e(i: usize) -> ProjectiveMatrix {
        ProjectiveMatrix::generator(GeneratorIndex::new(i).unwrap())
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_to_fundamental(&pt("0", "2"));
        assert_eq!((r.tile.clone(), r.point.clone()), (ProjectiveMatrix::identity(), pt("0", "2")));
        let r = reduce_to_fundamental(&pt("2", "2"));
        assert_eq!((r.tile.clone(), r.point.clone()), (e(1).pow(2), pt("0", "2")));
        let r = reduce_to_fundamental(&pt("0", "1/2"));
        assert_eq!((r.tile.clone(), r.point.clone()), (e(0), pt("0", "2")));
        assert!(!r.on_boundary);
        assert!(reduce_to_fundamental(&pt("0", "1")).on_boundary);
        assert!(reduce_to_fundamental(&pt("1/2", "3")).on_boundary);
    }

    #[test]
    fn float_reduction_matches_exact() {
        let r = reduce_to_fundamental_f64(FloatPoint::new(2.0, 2.0).unwrap()).unwrap();
        assert_eq!(r.tile, e(1).pow(2));
        assert!((r.point.im() - 2.0).abs() < 1e-15);
        let r = reduce_to_fundamental_f64(FloatPoint::new(0.0, 1.0 + 1e-12).unwrap()).unwrap();
        assert!(r.on_boundary);
    }

    #[test]
    fn neighbor_examples() {
        let id_nbrs = neighbors(&ProjectiveMatrix::identity());
        assert_eq!(id_nbrs.to_vec(), ProjectiveMatrix::generators());
        assert!(neighbors(&e(1)).contains(&ProjectiveMatrix::identity()));
        assert!(neighbors(&e(0)).contains(&e(7)));
        let m = e(3).multiply(&e(6));
        let n = neighbors(&m);
        for i in 0..9 {
            for j in 0..i {
                assert_ne!(n[i], n[j]);
            }
            assert!(are_adjacent(&m, &n[i]) && are_adjacent(&n[i], &m));
        }
    }

    #[test]
    fn ball_examples() {
        let g0 = cayley_ball(0).unwrap();
        assert_eq!((g0.vertex_count(), g0.edges().len()), (1, 0));
        let g1 = cayley_ball(1).unwrap();
        assert_eq!(g1.vertex_count(), 10);
        assert_eq!(g1.degree(0), 9);
        let g2 = cayley_ball(2).unwrap();
        let mut products = std::collections::HashSet::new();
        products.insert(ProjectiveMatrix::identity());
        for a in ProjectiveMatrix::generators() {
            products.insert(a.clone());
            for b in ProjectiveMatrix::generators() {
                products.insert(a.multiply(&b));
            }
        }
        assert_eq!(g2.vertex_count(), products.len());
        assert!(g2.interior_vertices().all(|i| g2.degree(i) == 9));
    }

    #[test]
    fn exports() {
        let g = cayley_ball(1).unwrap();
        let dot = g.to_dot();
        assert!(dot.starts_with("graph tiling {\n  0 [label=\"1,0,0,1\"];"));
        let json: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(json["vertices"].as_array().unwrap().len(), 10);
        assert_eq!(json["edges"][0], serde_json::json!([0, 1]));
    }

    #[test]
    fn project_walk_examples() {
        let z = pt("0", "6/5");
        let steps = project_walk(&[z.clone(), z.clone()]);
        assert!(steps.iter().all(|s| s.tile.is_identity()));
        let steps = project_walk(&[z.clone(), e(1).mobius_complex(&z)]);
        assert_eq!(steps[0].tile, ProjectiveMatrix::identity());
        assert_eq!(steps[1].tile, e(1));
        assert!(is_nearest_neighbor_path(&steps));
    }
}
