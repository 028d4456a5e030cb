//! Gauss–Bonnet via angle cochains.
//!
//! On the unit sphere the curvature cochain is the spherical excess of the
//! geodesic triangle through the three points (Girard: excess = area), signed
//! by the orientation of the tuple. Its Riemann-like sum over any admissible
//! sphere mesh is `2π·χ = 4π`, exactly as for a cocycle: excess is additive
//! under geodesic subdivision, so the sum never changes under refinement.
//!
//! On a flat disk the interior cochain vanishes (flat triangles have zero
//! angle defect) and the boundary cochain carries the signed exterior turning
//! of the boundary polygon, accumulated at each edge's terminal vertex; the
//! relative pairing is then the total turning `2π·χ(disk) = 2π` regardless of
//! the interior triangulation.

use thiserror::Error;

use crate::cochain::{Cochain, RelativeCochain, SymmetryTag};
use crate::integrate::{euler_characteristic, relative_pairing, riemann_sum, IntegrateError};
use crate::mesh::{ManifoldTag, MeshError, Triangulation};
use crate::numeric::distance;

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Cochain(#[from] crate::cochain::CochainError),
    #[error("mesh is not tagged as a sphere surface")]
    NotASphere,
    #[error("mesh is not a planar disk: {0}")]
    NotADisk(String),
}

/// A geodesic triangle on the unit sphere.
#[derive(Debug, Clone)]
pub struct GeodesicTriangle {
    pub vertices: [Vec<f64>; 3],
    pub orientation_sign: f64,
}

impl GeodesicTriangle {
    /// Builds from three points, radially projected to the unit sphere; the
    /// orientation sign is the sign of `det[x_0, x_1, x_2]`.
    pub fn new(a: &[f64], b: &[f64], c: &[f64]) -> Self {
        let normalize = |p: &[f64]| -> Vec<f64> {
            let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            p.iter().map(|x| x / n).collect()
        };
        let v = [normalize(a), normalize(b), normalize(c)];
        let sign = crate::numeric::det(&[v[0].clone(), v[1].clone(), v[2].clone()]).signum();
        GeodesicTriangle {
            vertices: v,
            orientation_sign: sign,
        }
    }

    /// Interior angle at vertex `i` between the great-circle arcs to the
    /// other two vertices. NaN for an antipodal pair (no unique arc).
    fn angle_at(&self, i: usize) -> f64 {
        let a = &self.vertices[i];
        let b = &self.vertices[(i + 1) % 3];
        let c = &self.vertices[(i + 2) % 3];
        let project = |p: &[f64]| -> Vec<f64> {
            let dot: f64 = a.iter().zip(p).map(|(x, y)| x * y).sum();
            p.iter().zip(a).map(|(pc, ac)| pc - dot * ac).collect()
        };
        let tb = project(b);
        let tc = project(c);
        let nb = tb.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nc = tc.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nb < 1e-14 || nc < 1e-14 {
            return f64::NAN;
        }
        let dot: f64 = tb.iter().zip(&tc).map(|(x, y)| x * y).sum();
        let cross = [
            tb[1] * tc[2] - tb[2] * tc[1],
            tb[2] * tc[0] - tb[0] * tc[2],
            tb[0] * tc[1] - tb[1] * tc[0],
        ];
        let cn = cross.iter().map(|x| x * x).sum::<f64>().sqrt();
        cn.atan2(dot)
    }

    /// Spherical excess `α + β + γ − π`; by Girard's theorem this is the
    /// triangle's area on the unit sphere.
    pub fn excess(&self) -> f64 {
        // coincident vertices span no area
        for i in 0..3 {
            for j in i + 1..3 {
                if distance(&self.vertices[i], &self.vertices[j]) < 1e-15 {
                    return 0.0;
                }
            }
        }
        // collinear (all on one great circle): zero excess, possibly with
        // one angle hitting π exactly
        if self.orientation_sign == 0.0 {
            return 0.0;
        }
        self.angle_at(0) + self.angle_at(1) + self.angle_at(2) - std::f64::consts::PI
    }

    /// Signed excess: positive for positively oriented tuples.
    pub fn signed_excess(&self) -> f64 {
        self.orientation_sign * self.excess()
    }
}

/// The degree-2 curvature cochain on the unit sphere: signed spherical
/// excess, completely antisymmetric, locality-limited to chordal `√2`
/// (a quarter sphere) so geodesics are unambiguous.
pub fn spherical_excess_cochain() -> Cochain {
    Cochain::from_fn(
        2,
        3,
        std::f64::consts::SQRT_2,
        SymmetryTag::CompletelyAntisymmetric,
        true,
        |t| GeodesicTriangle::new(t[0], t[1], t[2]).signed_excess(),
    )
}

/// Riemann-like sum of the excess cochain over a sphere mesh: `2π·χ = 4π`
/// for every admissible triangulation.
pub fn gauss_bonnet_sphere(mesh: &Triangulation) -> Result<f64, CurvatureError> {
    if mesh.manifold_tag() != ManifoldTag::Sphere || mesh.dimension() != 2 {
        return Err(CurvatureError::NotASphere);
    }
    Ok(riemann_sum(&spherical_excess_cochain(), mesh)?)
}

/// The flat-disk Gauss–Bonnet pair: zero interior cochain and the boundary
/// turning cochain of this mesh's boundary polygon.
///
/// The boundary evaluator looks its edge up in the polygon (either
/// orientation) and returns minus the exterior turning at the edge's terminal
/// vertex; vertices inserted along a straight edge by refinement contribute
/// zero turning, so the pairing is stable under refinement.
pub fn flat_disk_pair(mesh: &Triangulation) -> Result<RelativeCochain, CurvatureError> {
    let polygon = boundary_polygon(mesh)?;
    let n = polygon.len();
    let scale: f64 = polygon
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0, |m, c| m.max(c.abs()));
    let tol = 1e-9 * (1.0 + scale);
    let turning: Vec<f64> = (0..n)
        .map(|i| {
            let prev = &polygon[(i + n - 1) % n];
            let here = &polygon[i];
            let next = &polygon[(i + 1) % n];
            let u = [here[0] - prev[0], here[1] - prev[1]];
            let v = [next[0] - here[0], next[1] - here[1]];
            (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1])
        })
        .collect();
    let locate = move |p: &[f64]| -> Option<usize> {
        polygon
            .iter()
            .position(|q| (q[0] - p[0]).abs() <= tol && (q[1] - p[1]).abs() <= tol)
    };
    let omega_bdry = Cochain::from_fn(
        1,
        2,
        f64::INFINITY,
        SymmetryTag::None,
        false,
        move |t| {
            let (Some(i), Some(j)) = (locate(t[0]), locate(t[1])) else {
                return f64::NAN;
            };
            if (i + 1) % n == j {
                -turning[j]
            } else if (j + 1) % n == i {
                turning[i]
            } else {
                f64::NAN
            }
        },
    );
    Ok(RelativeCochain::new(Cochain::zero(2, 2), omega_bdry)?)
}

/// Relative pairing of the flat-disk Gauss–Bonnet pair over its mesh:
/// `2π·χ(disk) = 2π` for a positively oriented disk.
pub fn flat_disk_pairing(mesh: &Triangulation) -> Result<f64, CurvatureError> {
    let pair = flat_disk_pair(mesh)?;
    Ok(relative_pairing(&pair, mesh)?)
}

/// Extracts the boundary cycle of a planar disk mesh in traversal order.
fn boundary_polygon(mesh: &Triangulation) -> Result<Vec<Vec<f64>>, CurvatureError> {
    if mesh.dimension() != 2 || mesh.ambient_dim() != 2 {
        return Err(CurvatureError::NotADisk(
            "expected a 2-mesh embedded in the plane".into(),
        ));
    }
    let chi = euler_characteristic(mesh)?;
    if chi != 1 {
        return Err(CurvatureError::NotADisk(format!(
            "Euler characteristic {chi}, a disk has 1"
        )));
    }
    let boundary = mesh.boundary()?;
    if boundary.n_simplices() == 0 {
        return Err(CurvatureError::NotADisk("the mesh is closed".into()));
    }
    let mut successor = vec![usize::MAX; boundary.n_vertices()];
    for i in 0..boundary.n_simplices() {
        let e = boundary.oriented_vertices(i)?;
        if successor[e[0]] != usize::MAX {
            return Err(CurvatureError::NotADisk(
                "boundary is not a single simple cycle".into(),
            ));
        }
        successor[e[0]] = e[1];
    }
    let mut order = Vec::with_capacity(boundary.n_vertices());
    let mut at = 0usize;
    loop {
        order.push(boundary.vertex(at).to_vec());
        at = successor[at];
        if at == usize::MAX {
            return Err(CurvatureError::NotADisk("boundary cycle is broken".into()));
        }
        if at == 0 {
            break;
        }
        if order.len() > boundary.n_vertices() {
            return Err(CurvatureError::NotADisk("boundary cycle overruns".into()));
        }
    }
    if order.len() != boundary.n_vertices() {
        return Err(CurvatureError::NotADisk(
            "boundary has more than one component".into(),
        ));
    }
    Ok(order)
}
