//! Embedded oriented triangulations of compact manifolds (with boundary),
//! their refinement, and boundary extraction.
//!
//! A [`Triangulation`] stores vertex coordinates in an ambient Euclidean
//! space, top-dimensional simplices as vertex-index tuples, and a per-simplex
//! orientation sign relative to the stored vertex order. All geometry is
//! ambient; there are no local coordinates anywhere. The `manifold_tag`
//! records which ambient convention (flat determinant, outward sphere normal,
//! counterclockwise circle) realizes orientation signs geometrically.
//!
//! Values are immutable after construction and every operation is pure;
//! refinement returns a new triangulation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{distance, edge_det, gram_volume, permutations_with_sign, sort_parity};

/// Errors from mesh construction, refinement and I/O.
#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("simplex {simplex}: vertex index {index} out of range (have {n_vertices} vertices)")]
    VertexOutOfRange {
        simplex: usize,
        index: usize,
        n_vertices: usize,
    },
    #[error("simplex {simplex} repeats a vertex index")]
    RepeatedVertex { simplex: usize },
    #[error("face {face:?} is shared by {count} top simplices; a manifold allows only 1 or 2")]
    NonManifoldFace { face: Vec<usize>, count: usize },
    #[error("face {face:?} has incompatible induced orientations from its two cofaces")]
    InconsistentOrientation { face: Vec<usize> },
    #[error("simplex {simplex} is geometrically degenerate (zero volume)")]
    DegenerateSimplex { simplex: usize },
    #[error("vertex {vertex} must lie on the unit {surface} (|coords| - 1 exceeds 1e-12)")]
    OffSurfaceVertex { vertex: usize, surface: &'static str },
    #[error("refinement scheme {scheme:?} unsupported for dimension {dimension}")]
    UnsupportedScheme {
        scheme: RefinementScheme,
        dimension: usize,
    },
    #[error("no simplex with index {index}")]
    NoSuchSimplex { index: usize },
    #[error("mesh file error: {0}")]
    Io(#[from] std::io::Error),
    #[error("mesh file parse error: {0}")]
    Parse(String),
}

/// Which embedded geometry the vertex coordinates describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldTag {
    Flat,
    Sphere,
    Circle,
    TorusFlat,
    Interval,
}

impl fmt::Display for ManifoldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ManifoldTag::Flat => "flat",
            ManifoldTag::Sphere => "sphere",
            ManifoldTag::Circle => "circle",
            ManifoldTag::TorusFlat => "torus_flat",
            ManifoldTag::Interval => "interval",
        };
        f.write_str(s)
    }
}

/// Linear subdivision scheme used by [`Triangulation::refine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefinementScheme {
    /// Full barycentric subdivision: each `n`-simplex becomes `(n+1)!` children.
    Barycentric,
    /// Edge-midpoint ("red") subdivision, dimensions 1 and 2 only.
    EdgeMidpoint,
}

impl std::str::FromStr for RefinementScheme {
    type Err = MeshError;
    fn from_str(s: &str) -> Result<Self, MeshError> {
        match s {
            "barycentric" => Ok(RefinementScheme::Barycentric),
            "edge_midpoint" | "midpoint" => Ok(RefinementScheme::EdgeMidpoint),
            other => Err(MeshError::InvalidParameter(format!(
                "unknown refinement scheme '{other}' (expected barycentric or edge_midpoint)"
            ))),
        }
    }
}

/// Built-in mesh families for [`Triangulation::generate`].
#[derive(Debug, Clone, PartialEq)]
pub enum MeshKind {
    /// Uniform partition of `[a, b]` into `k` segments.
    Interval { a: f64, b: f64, k: usize },
    /// `[0,1]^n` cut into `k^n` subcubes, each split into `n!` Kuhn simplices.
    KuhnCube { n: usize, k: usize },
    /// Octahedron projected to the unit sphere, refined `level` times.
    OctaSphere { level: usize },
    /// Icosahedron projected to the unit sphere, refined `level` times.
    IcosaSphere { level: usize },
    /// `k`-gon inscribed in the unit circle, counterclockwise.
    Circle { k: usize },
    /// `k × k` grid triangulation of the flat square torus (`k >= 3`).
    FlatTorus { k: usize },
}

impl std::str::FromStr for MeshKind {
    type Err = MeshError;

    /// Parses CLI mesh specs like `interval:0,1,4` or `octa_sphere:2`.
    fn from_str(s: &str) -> Result<Self, MeshError> {
        let bad = |msg: &str| MeshError::InvalidParameter(format!("mesh spec '{s}': {msg}"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let parts: Vec<&str> = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',').collect()
        };
        let int = |p: &str| p.trim().parse::<usize>().map_err(|_| bad("expected integer"));
        let real = |p: &str| p.trim().parse::<f64>().map_err(|_| bad("expected number"));
        match kind {
            "interval" => {
                if parts.len() != 3 {
                    return Err(bad("expected interval:a,b,k"));
                }
                Ok(MeshKind::Interval {
                    a: real(parts[0])?,
                    b: real(parts[1])?,
                    k: int(parts[2])?,
                })
            }
            "kuhn_cube" => {
                if parts.len() != 2 {
                    return Err(bad("expected kuhn_cube:n,k"));
                }
                Ok(MeshKind::KuhnCube {
                    n: int(parts[0])?,
                    k: int(parts[1])?,
                })
            }
            "octa_sphere" => {
                if parts.len() != 1 {
                    return Err(bad("expected octa_sphere:level"));
                }
                Ok(MeshKind::OctaSphere { level: int(parts[0])? })
            }
            "icosa_sphere" => {
                if parts.len() != 1 {
                    return Err(bad("expected icosa_sphere:level"));
                }
                Ok(MeshKind::IcosaSphere { level: int(parts[0])? })
            }
            "circle" => {
                if parts.len() != 1 {
                    return Err(bad("expected circle:k"));
                }
                Ok(MeshKind::Circle { k: int(parts[0])? })
            }
            "flat_torus" => {
                if parts.len() != 1 {
                    return Err(bad("expected flat_torus:k"));
                }
                Ok(MeshKind::FlatTorus { k: int(parts[0])? })
            }
            other => Err(bad(&format!("unknown mesh kind '{other}'"))),
        }
    }
}

/// JSON mesh file layout. Numbers are IEEE-754 doubles serialized in full
/// round-trip precision by `serde_json`.
#[derive(Serialize, Deserialize)]
struct MeshFile {
    dimension: usize,
    ambient_dim: usize,
    manifold_tag: ManifoldTag,
    vertices: Vec<Vec<f64>>,
    simplices: Vec<Vec<usize>>,
    orientation_signs: Vec<i8>,
}

/// An oriented simplicial mesh embedded in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    dimension: usize,
    ambient_dim: usize,
    manifold_tag: ManifoldTag,
    vertices: Vec<Vec<f64>>,
    simplices: Vec<Vec<usize>>,
    orientation_signs: Vec<i8>,
}

impl Triangulation {
    /// Builds and validates a triangulation.
    ///
    /// Checks, in order: index ranges and coordinate shapes, unit-norm
    /// vertices for sphere/circle tags, geometric nondegeneracy, the manifold
    /// condition (each interior face in exactly two top simplices, boundary
    /// faces in one), and global orientability (the two cofaces of a shared
    /// face induce opposite orientations on it).
    pub fn new(
        dimension: usize,
        ambient_dim: usize,
        manifold_tag: ManifoldTag,
        vertices: Vec<Vec<f64>>,
        simplices: Vec<Vec<usize>>,
        orientation_signs: Vec<i8>,
    ) -> Result<Self, MeshError> {
        if ambient_dim < dimension {
            return Err(MeshError::InvalidParameter(format!(
                "ambient dimension {ambient_dim} smaller than mesh dimension {dimension}"
            )));
        }
        if simplices.len() != orientation_signs.len() {
            return Err(MeshError::InvalidParameter(format!(
                "{} simplices but {} orientation signs",
                simplices.len(),
                orientation_signs.len()
            )));
        }
        if let Some(s) = orientation_signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(MeshError::InvalidParameter(format!(
                "orientation sign {s} is not +1 or -1"
            )));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != ambient_dim {
                return Err(MeshError::InvalidParameter(format!(
                    "vertex {i} has {} coordinates, expected {ambient_dim}",
                    v.len()
                )));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(MeshError::InvalidParameter(format!(
                    "vertex {i} has a nonfinite coordinate"
                )));
            }
        }
        let mesh = Triangulation {
            dimension,
            ambient_dim,
            manifold_tag,
            vertices,
            simplices,
            orientation_signs,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    fn validate(&self) -> Result<(), MeshError> {
        let n = self.dimension;
        for (i, s) in self.simplices.iter().enumerate() {
            if s.len() != n + 1 {
                return Err(MeshError::InvalidParameter(format!(
                    "simplex {i} has {} vertices, expected {}",
                    s.len(),
                    n + 1
                )));
            }
            for &v in s {
                if v >= self.vertices.len() {
                    return Err(MeshError::VertexOutOfRange {
                        simplex: i,
                        index: v,
                        n_vertices: self.vertices.len(),
                    });
                }
            }
            let mut sorted = s.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(MeshError::RepeatedVertex { simplex: i });
            }
        }

        match self.manifold_tag {
            ManifoldTag::Sphere | ManifoldTag::Circle => {
                let surface = if self.manifold_tag == ManifoldTag::Sphere {
                    "sphere"
                } else {
                    "circle"
                };
                for (i, v) in self.vertices.iter().enumerate() {
                    let norm: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                    if (norm - 1.0).abs() > 1e-12 {
                        return Err(MeshError::OffSurfaceVertex { vertex: i, surface });
                    }
                }
            }
            _ => {}
        }

        // Zero-volume simplices break the Taylor-expansion arguments the
        // Riemann-like sums rest on; reject them outright. The flat-torus
        // coordinates wrap around, so the volume test does not apply there.
        if n >= 1 && self.manifold_tag != ManifoldTag::TorusFlat {
            for (i, s) in self.simplices.iter().enumerate() {
                let pts: Vec<&[f64]> = s.iter().map(|&v| self.vertices[v].as_slice()).collect();
                let diam = max_pairwise_distance(&pts);
                let vol = gram_volume(&pts);
                if !(vol > 1e-12 * diam.powi(n as i32)) {
                    return Err(MeshError::DegenerateSimplex { simplex: i });
                }
            }
        }

        if n >= 1 {
            // Face incidence: key is the sorted vertex set, value collects the
            // induced orientation parity from each coface.
            let mut incidence: BTreeMap<Vec<usize>, Vec<i8>> = BTreeMap::new();
            for i in 0..self.simplices.len() {
                let realized = self.realized_simplex(i)?;
                for p in 0..=n {
                    let mut face: Vec<usize> = realized.clone();
                    face.remove(p);
                    let drop_sign = if p % 2 == 0 { 1 } else { -1 };
                    let parity = drop_sign * sort_parity(&face);
                    let mut key = face;
                    key.sort_unstable();
                    incidence.entry(key).or_default().push(parity);
                }
            }
            for (face, parities) in &incidence {
                match parities.len() {
                    1 => {}
                    2 => {
                        if parities[0] + parities[1] != 0 {
                            return Err(MeshError::InconsistentOrientation { face: face.clone() });
                        }
                    }
                    c => {
                        return Err(MeshError::NonManifoldFace {
                            face: face.clone(),
                            count: c,
                        })
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn manifold_tag(&self) -> ManifoldTag {
        self.manifold_tag
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_simplices(&self) -> usize {
        self.simplices.len()
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn simplex(&self, i: usize) -> &[usize] {
        &self.simplices[i]
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn orientation_sign(&self, i: usize) -> i8 {
        self.orientation_signs[i]
    }

    /// The same mesh with every orientation sign flipped.
    pub fn reversed(&self) -> Triangulation {
        let mut t = self.clone();
        for s in &mut t.orientation_signs {
            *s = -*s;
        }
        t
    }

    /// Geometric orientation sign of a vertex tuple under this mesh's ambient
    /// convention, when one exists: determinant of edge vectors for
    /// full-dimensional flat meshes, outward-normal determinant for sphere
    /// surfaces, counterclockwise cross product on the unit circle.
    fn geometric_sign(&self, tuple: &[usize]) -> Option<f64> {
        let pts: Vec<&[f64]> = tuple.iter().map(|&v| self.vertices[v].as_slice()).collect();
        match self.manifold_tag {
            ManifoldTag::Flat | ManifoldTag::Interval
                if self.dimension >= 1 && self.dimension == self.ambient_dim =>
            {
                Some(edge_det(&pts))
            }
            ManifoldTag::Sphere if self.dimension == 2 && self.ambient_dim == 3 => {
                let centroid: Vec<f64> = (0..3)
                    .map(|c| (pts[0][c] + pts[1][c] + pts[2][c]) / 3.0)
                    .collect();
                let e1: Vec<f64> = (0..3).map(|c| pts[1][c] - pts[0][c]).collect();
                let e2: Vec<f64> = (0..3).map(|c| pts[2][c] - pts[0][c]).collect();
                Some(crate::numeric::det(&[e1, e2, centroid]))
            }
            ManifoldTag::Circle if self.dimension == 1 && self.ambient_dim == 2 => {
                Some(pts[0][0] * pts[1][1] - pts[0][1] * pts[1][0])
            }
            _ => None,
        }
    }

    /// Vertex indices of simplex `i` ordered to realize its orientation sign.
    ///
    /// When the tag provides an ambient geometric convention, the returned
    /// order is the stored one if its geometric sign matches the stored
    /// orientation sign, and the stored order with the last two entries
    /// swapped otherwise. Without a geometric convention the sign itself
    /// selects the parity. Zero-dimensional simplices are returned as stored;
    /// their sign cannot be encoded in an ordering and is consumed directly
    /// by the Riemann-sum routines.
    fn realized_simplex(&self, i: usize) -> Result<Vec<usize>, MeshError> {
        let s = self
            .simplices
            .get(i)
            .ok_or(MeshError::NoSuchSimplex { index: i })?;
        if self.dimension == 0 {
            return Ok(s.clone());
        }
        let sign = self.orientation_signs[i] as f64;
        let flip = match self.geometric_sign(s) {
            Some(g) => {
                if g == 0.0 {
                    return Err(MeshError::DegenerateSimplex { simplex: i });
                }
                g.signum() != sign
            }
            None => self.orientation_signs[i] != 1,
        };
        let mut out = s.clone();
        if flip {
            let len = out.len();
            out.swap(len - 1, len - 2);
        }
        Ok(out)
    }

    /// Ordered vertex indices realizing the orientation of simplex `i`.
    pub fn oriented_vertices(&self, i: usize) -> Result<Vec<usize>, MeshError> {
        self.realized_simplex(i)
    }

    /// Ordered vertex coordinates realizing the orientation of simplex `i`.
    pub fn oriented_points(&self, i: usize) -> Result<Vec<&[f64]>, MeshError> {
        Ok(self
            .realized_simplex(i)?
            .into_iter()
            .map(|v| self.vertices[v].as_slice())
            .collect())
    }

    /// Maximum over simplices of the maximum pairwise vertex distance
    /// (chordal distances for embedded sphere/circle meshes).
    pub fn mesh_size(&self) -> f64 {
        self.simplices
            .iter()
            .map(|s| {
                let pts: Vec<&[f64]> = s.iter().map(|&v| self.vertices[v].as_slice()).collect();
                max_pairwise_distance(&pts)
            })
            .fold(0.0, f64::max)
    }

    /// All `k`-faces as deduplicated sorted vertex-index sets.
    pub fn faces(&self, k: usize) -> Result<Vec<Vec<usize>>, MeshError> {
        if k > self.dimension {
            return Err(MeshError::InvalidParameter(format!(
                "face dimension {k} exceeds mesh dimension {}",
                self.dimension
            )));
        }
        let mut set: std::collections::BTreeSet<Vec<usize>> = std::collections::BTreeSet::new();
        let mut scratch = Vec::with_capacity(k + 1);
        for s in &self.simplices {
            let mut sorted = s.clone();
            sorted.sort_unstable();
            combinations(&sorted, k + 1, &mut scratch, &mut |c| {
                set.insert(c.to_vec());
            });
        }
        Ok(set.into_iter().collect())
    }

    /// The boundary `(n-1)`-complex with its induced orientation.
    ///
    /// The induced orientation is the one making the combinatorial Stokes
    /// identity exact: the face obtained by dropping position `p` from an
    /// oriented coface tuple carries parity `(-1)^p`. A closed mesh yields an
    /// empty complex.
    pub fn boundary(&self) -> Result<Triangulation, MeshError> {
        if self.dimension == 0 {
            return Err(MeshError::InvalidParameter(
                "0-dimensional meshes have no boundary complex".into(),
            ));
        }
        let n = self.dimension;
        // sorted face key -> (first-seen stored tuple, sign, coface count)
        let mut faces: BTreeMap<Vec<usize>, (Vec<usize>, i8, usize)> = BTreeMap::new();
        for i in 0..self.simplices.len() {
            let realized = self.realized_simplex(i)?;
            for p in 0..=n {
                let mut tuple: Vec<usize> = realized.clone();
                tuple.remove(p);
                let drop_sign: i8 = if p % 2 == 0 { 1 } else { -1 };
                let mut key = tuple.clone();
                key.sort_unstable();
                let stored_sign;
                if tuple.len() >= 2 {
                    if drop_sign < 0 {
                        let len = tuple.len();
                        tuple.swap(len - 1, len - 2);
                    }
                    stored_sign = 1;
                } else {
                    stored_sign = drop_sign;
                }
                let entry = faces.entry(key).or_insert((tuple, stored_sign, 0));
                entry.2 += 1;
            }
        }

        let mut simplices = Vec::new();
        let mut signs = Vec::new();
        for (_, (tuple, sign, count)) in faces {
            if count != 1 {
                continue;
            }
            simplices.push(tuple);
            signs.push(sign);
        }
        let used: std::collections::BTreeSet<usize> =
            simplices.iter().flatten().copied().collect();
        let remap: BTreeMap<usize, usize> =
            used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let vertices: Vec<Vec<f64>> = used.iter().map(|&v| self.vertices[v].clone()).collect();
        let simplices: Vec<Vec<usize>> = simplices
            .into_iter()
            .map(|t| t.into_iter().map(|v| remap[&v]).collect())
            .collect();
        Triangulation::new(
            n - 1,
            self.ambient_dim,
            self.manifold_tag,
            vertices,
            simplices,
            signs,
        )
    }

    /// Linear subdivision of every top simplex.
    ///
    /// New vertices are convex combinations of parent vertices, reprojected to
    /// the unit sphere/circle for those tags. Orientation signs are inherited
    /// so that the orientability invariant keeps holding.
    pub fn refine(&self, scheme: RefinementScheme) -> Result<Triangulation, MeshError> {
        if self.dimension == 0 {
            return Err(MeshError::UnsupportedScheme {
                scheme,
                dimension: 0,
            });
        }
        match scheme {
            RefinementScheme::Barycentric => self.refine_barycentric(),
            RefinementScheme::EdgeMidpoint => {
                if self.dimension > 2 {
                    return Err(MeshError::UnsupportedScheme {
                        scheme,
                        dimension: self.dimension,
                    });
                }
                self.refine_midpoint()
            }
        }
    }

    fn reproject(&self, mut p: Vec<f64>) -> Vec<f64> {
        if matches!(self.manifold_tag, ManifoldTag::Sphere | ManifoldTag::Circle) {
            let norm: f64 = p.iter().map(|c| c * c).sum::<f64>().sqrt();
            for c in &mut p {
                *c /= norm;
            }
        }
        p
    }

    fn refine_barycentric(&self) -> Result<Triangulation, MeshError> {
        let n = self.dimension;
        let mut vertices = self.vertices.clone();
        // barycenter of a vertex-index set -> new vertex index
        let mut centers: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for i in 0..self.vertices.len() {
            centers.insert(vec![i], i);
        }
        let mut simplices = Vec::new();
        let mut signs = Vec::new();
        let perms = permutations_with_sign(n + 1);
        for i in 0..self.simplices.len() {
            let realized = self.realized_simplex(i)?;
            let parent_sign = self.orientation_signs[i];
            for (perm, perm_sign) in &perms {
                let mut child = Vec::with_capacity(n + 1);
                for j in 0..=n {
                    let mut face: Vec<usize> = perm[..=j].iter().map(|&p| realized[p]).collect();
                    face.sort_unstable();
                    let idx = *centers.entry(face.clone()).or_insert_with(|| {
                        let mut coords = vec![0.0; self.ambient_dim];
                        for &v in &face {
                            for (c, x) in coords.iter_mut().zip(&self.vertices[v]) {
                                *c += x;
                            }
                        }
                        for c in &mut coords {
                            *c /= face.len() as f64;
                        }
                        vertices.push(self.reproject(coords));
                        vertices.len() - 1
                    });
                    child.push(idx);
                }
                if *perm_sign < 0 {
                    child.swap(n, n - 1);
                }
                simplices.push(child);
                signs.push(parent_sign);
            }
        }
        Triangulation::new(
            n,
            self.ambient_dim,
            self.manifold_tag,
            vertices,
            simplices,
            signs,
        )
    }

    fn refine_midpoint(&self) -> Result<Triangulation, MeshError> {
        let n = self.dimension;
        let mut vertices = self.vertices.clone();
        let mut midpoints: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vec<f64>>| -> usize {
            let key = (a.min(b), a.max(b));
            if let Some(&idx) = midpoints.get(&key) {
                return idx;
            }
            let coords: Vec<f64> = self.vertices[a]
                .iter()
                .zip(&self.vertices[b])
                .map(|(x, y)| 0.5 * (x + y))
                .collect();
            vertices.push(self.reproject(coords));
            let idx = vertices.len() - 1;
            midpoints.insert(key, idx);
            idx
        };
        let mut simplices = Vec::new();
        let mut signs = Vec::new();
        for i in 0..self.simplices.len() {
            let t = self.realized_simplex(i)?;
            let s = self.orientation_signs[i];
            match n {
                1 => {
                    let m = midpoint(t[0], t[1], &mut vertices);
                    simplices.push(vec![t[0], m]);
                    simplices.push(vec![m, t[1]]);
                    signs.push(s);
                    signs.push(s);
                }
                2 => {
                    let m01 = midpoint(t[0], t[1], &mut vertices);
                    let m12 = midpoint(t[1], t[2], &mut vertices);
                    let m02 = midpoint(t[0], t[2], &mut vertices);
                    simplices.push(vec![t[0], m01, m02]);
                    simplices.push(vec![t[1], m12, m01]);
                    simplices.push(vec![t[2], m02, m12]);
                    simplices.push(vec![m01, m12, m02]);
                    signs.extend([s, s, s, s]);
                }
                _ => unreachable!("scheme gate in refine()"),
            }
        }
        Triangulation::new(
            n,
            self.ambient_dim,
            self.manifold_tag,
            vertices,
            simplices,
            signs,
        )
    }

    /// Builds one of the standard mesh families.
    pub fn generate(kind: &MeshKind) -> Result<Triangulation, MeshError> {
        match *kind {
            MeshKind::Interval { a, b, k } => {
                if k < 1 {
                    return Err(MeshError::InvalidParameter(
                        "interval mesh needs k >= 1".into(),
                    ));
                }
                if !(a < b) {
                    return Err(MeshError::InvalidParameter(format!(
                        "interval mesh needs a < b, got a = {a}, b = {b}"
                    )));
                }
                let vertices: Vec<Vec<f64>> = (0..=k)
                    .map(|i| vec![a + (b - a) * i as f64 / k as f64])
                    .collect();
                let simplices: Vec<Vec<usize>> = (0..k).map(|i| vec![i, i + 1]).collect();
                let signs = vec![1; k];
                Triangulation::new(1, 1, ManifoldTag::Interval, vertices, simplices, signs)
            }
            MeshKind::KuhnCube { n, k } => {
                if n < 1 {
                    return Err(MeshError::InvalidParameter("kuhn_cube needs n >= 1".into()));
                }
                if k < 1 {
                    return Err(MeshError::InvalidParameter("kuhn_cube needs k >= 1".into()));
                }
                kuhn_cube(n, k)
            }
            MeshKind::OctaSphere { level } => {
                let mut t = octahedron()?;
                for _ in 0..level {
                    t = t.refine(RefinementScheme::EdgeMidpoint)?;
                }
                Ok(t)
            }
            MeshKind::IcosaSphere { level } => {
                let mut t = icosahedron()?;
                for _ in 0..level {
                    t = t.refine(RefinementScheme::EdgeMidpoint)?;
                }
                Ok(t)
            }
            MeshKind::Circle { k } => {
                if k < 3 {
                    return Err(MeshError::InvalidParameter(
                        "circle mesh needs k >= 3".into(),
                    ));
                }
                let vertices: Vec<Vec<f64>> = (0..k)
                    .map(|i| {
                        let theta = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                        vec![theta.cos(), theta.sin()]
                    })
                    .collect();
                let simplices: Vec<Vec<usize>> = (0..k).map(|i| vec![i, (i + 1) % k]).collect();
                let signs = vec![1; k];
                Triangulation::new(1, 2, ManifoldTag::Circle, vertices, simplices, signs)
            }
            MeshKind::FlatTorus { k } => {
                if k < 3 {
                    return Err(MeshError::InvalidParameter(
                        "flat_torus needs k >= 3 (smaller grids are not simplicial complexes)"
                            .into(),
                    ));
                }
                flat_torus(k)
            }
        }
    }

    /// Writes the mesh as JSON.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), MeshError> {
        let file = MeshFile {
            dimension: self.dimension,
            ambient_dim: self.ambient_dim,
            manifold_tag: self.manifold_tag,
            vertices: self.vertices.clone(),
            simplices: self.simplices.clone(),
            orientation_signs: self.orientation_signs.clone(),
        };
        let json = serde_json::to_string_pretty(&file)
            .map_err(|e| MeshError::Parse(e.to_string()))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    /// Reads and validates a JSON mesh file.
    pub fn load(path: impl AsRef<Path>) -> Result<Triangulation, MeshError> {
        let text = std::fs::read_to_string(&path)?;
        let file: MeshFile = serde_json::from_str(&text).map_err(|e| {
            MeshError::Parse(format!(
                "{} (line {}, column {})",
                e,
                e.line(),
                e.column()
            ))
        })?;
        Triangulation::new(
            file.dimension,
            file.ambient_dim,
            file.manifold_tag,
            file.vertices,
            file.simplices,
            file.orientation_signs,
        )
    }
}

fn max_pairwise_distance(pts: &[&[f64]]) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max(distance(pts[i], pts[j]));
        }
    }
    best
}

/// Calls `emit` with every sorted `take`-subset of `items` (itself sorted).
fn combinations(items: &[usize], take: usize, scratch: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if scratch.len() == take {
        emit(scratch);
        return;
    }
    let need = take - scratch.len();
    for i in 0..items.len() {
        if items.len() - i < need {
            break;
        }
        scratch.push(items[i]);
        combinations(&items[i + 1..], take, scratch, emit);
        scratch.pop();
    }
}

/// Kuhn (Freudenthal) triangulation of `[0,1]^n` on a `k`-subdivided grid:
/// the subcube at a grid corner is cut into `n!` simplices, one per order in
/// which the coordinate directions are traversed.
fn kuhn_cube(n: usize, k: usize) -> Result<Triangulation, MeshError> {
    let verts_per_axis = k + 1;
    let stride: Vec<usize> = (0..n).map(|i| verts_per_axis.pow(i as u32)).collect();
    let n_vertices = verts_per_axis.pow(n as u32);
    let mut vertices = Vec::with_capacity(n_vertices);
    for idx in 0..n_vertices {
        let mut rem = idx;
        let mut coords = Vec::with_capacity(n);
        for _ in 0..n {
            coords.push((rem % verts_per_axis) as f64 / k as f64);
            rem /= verts_per_axis;
        }
        vertices.push(coords);
    }
    let mut simplices = Vec::new();
    let mut signs = Vec::new();
    let perms = permutations_with_sign(n);
    let mut cell = vec![0usize; n];
    loop {
        let base: usize = cell.iter().zip(&stride).map(|(c, s)| c * s).sum();
        for (perm, _) in &perms {
            let mut tuple = Vec::with_capacity(n + 1);
            let mut at = base;
            tuple.push(at);
            for &axis in perm {
                at += stride[axis];
                tuple.push(at);
            }
            simplices.push(tuple);
            signs.push(1);
        }
        // advance the cell counter
        let mut axis = 0;
        loop {
            if axis == n {
                let tag = if n == 1 {
                    ManifoldTag::Interval
                } else {
                    ManifoldTag::Flat
                };
                return Triangulation::new(n, n, tag, vertices, simplices, signs);
            }
            cell[axis] += 1;
            if cell[axis] < k {
                break;
            }
            cell[axis] = 0;
            axis += 1;
        }
    }
}

/// Planar disk mesh: a triangle fan from the centroid of a simple polygon
/// (counterclockwise vertex order, star-shaped around its centroid).
pub fn fan_disk(polygon: &[Vec<f64>]) -> Result<Triangulation, MeshError> {
    if polygon.len() < 3 {
        return Err(MeshError::InvalidParameter(
            "fan disk needs at least 3 boundary vertices".into(),
        ));
    }
    if polygon.iter().any(|p| p.len() != 2) {
        return Err(MeshError::InvalidParameter(
            "fan disk polygon must be planar".into(),
        ));
    }
    let k = polygon.len();
    let centroid: Vec<f64> = (0..2)
        .map(|c| polygon.iter().map(|p| p[c]).sum::<f64>() / k as f64)
        .collect();
    let mut vertices = polygon.to_vec();
    vertices.push(centroid);
    let simplices: Vec<Vec<usize>> = (0..k).map(|i| vec![k, i, (i + 1) % k]).collect();
    let signs = vec![1; k];
    Triangulation::new(2, 2, ManifoldTag::Flat, vertices, simplices, signs)
}

fn octahedron() -> Result<Triangulation, MeshError> {
    let vertices = vec![
        vec![1.0, 0.0, 0.0],
        vec![-1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, -1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, -1.0],
    ];
    // one face per octant; outward orientation is repaired geometrically
    let simplices: Vec<Vec<usize>> = vec![
        vec![0, 2, 4],
        vec![2, 1, 4],
        vec![1, 3, 4],
        vec![3, 0, 4],
        vec![2, 0, 5],
        vec![1, 2, 5],
        vec![3, 1, 5],
        vec![0, 3, 5],
    ];
    let signs = vec![1; 8];
    Triangulation::new(2, 3, ManifoldTag::Sphere, vertices, simplices, signs)
}

fn icosahedron() -> Result<Triangulation, MeshError> {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let scale = 1.0 / (1.0 + phi * phi).sqrt();
    let raw = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let vertices: Vec<Vec<f64>> = raw
        .iter()
        .map(|v| v.iter().map(|c| c * scale).collect())
        .collect();
    let faces = [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let simplices: Vec<Vec<usize>> = faces.iter().map(|f| f.to_vec()).collect();
    let signs = vec![1; simplices.len()];
    Triangulation::new(2, 3, ManifoldTag::Sphere, vertices, simplices, signs)
}

/// Grid triangulation of the flat square torus: vertex `(i, j)` sits at
/// `(i/k, j/k)` and indices wrap modulo `k`. Wrapped simplices are
/// combinatorially fine but geometrically meaningless, so orientation is
/// handled combinatorially for this tag.
fn flat_torus(k: usize) -> Result<Triangulation, MeshError> {
    let vid = |i: usize, j: usize| (j % k) * k + (i % k);
    let vertices: Vec<Vec<f64>> = (0..k * k)
        .map(|idx| vec![(idx % k) as f64 / k as f64, (idx / k) as f64 / k as f64])
        .collect();
    let mut simplices = Vec::with_capacity(2 * k * k);
    for j in 0..k {
        for i in 0..k {
            let a = vid(i, j);
            let b = vid(i + 1, j);
            let c = vid(i + 1, j + 1);
            let d = vid(i, j + 1);
            simplices.push(vec![a, b, c]);
            simplices.push(vec![a, c, d]);
        }
    }
    let signs = vec![1; simplices.len()];
    Triangulation::new(2, 2, ManifoldTag::TorusFlat, vertices, simplices, signs)
}
