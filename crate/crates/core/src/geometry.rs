//! The named points and domains of the w- and z-planes: the image polygon
//! `Pi` of the fundamental sector, its rotated union `Omega`, the slit plane
//! `Sigma`, membership tests and the reduction of a point to the fundamental
//! region by the rotation/reflection group.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{complex_serde, Params};

/// Relative width of the boundary band: points within `EPS_BOUNDARY * phi`
/// of a boundary piece are classified as on the boundary.
pub const EPS_BOUNDARY: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegionKind {
    /// `k <= 1`: no finite vertex, `Pi` is unbounded.
    #[serde(rename = "K_EQUALS_1")]
    KEqualsOne,
    /// `k > 1`: `Pi` is the quadrilateral `O A P B`.
    #[serde(rename = "K_GREATER_1")]
    KGreaterOne,
}

/// Geometric description of `Pi_{n,k}` and, by rotation, of `Omega_{n,k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub params: Params,
    pub phi: f64,
    #[serde(rename = "A", with = "complex_serde")]
    pub a: Complex64,
    #[serde(rename = "B", with = "complex_serde")]
    pub b: Complex64,
    #[serde(rename = "P", with = "complex_serde::option")]
    pub p: Option<Complex64>,
    pub op_len: Option<f64>,
    pub kind: RegionKind,
    /// Interior angle at `P` exceeds a straight angle.
    pub nonconvex: bool,
    /// Interior angle at `P` is exactly a straight angle (`k = n/2 + 1`).
    pub degenerate_vertex: bool,
    /// Absolute width of the boundary band.
    pub eps_bnd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundaryPiece {
    SegOa,
    SegOb,
    SegAp,
    SegBp,
    RayA,
    RayB,
    Vertex,
    Slit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Domain {
    /// The open sector `V_n` (z-plane).
    SectorV,
    /// The image polygon `Pi_{n,k}` (w-plane).
    Pi,
    /// The domain of univalence `Omega_{n,k}` (w-plane).
    Omega,
    /// The slit plane `Sigma_n` (z-plane).
    Sigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub status: Status,
    pub sector: u32,
    pub reflected: bool,
    pub boundary_piece: Option<BoundaryPiece>,
}

impl Membership {
    fn new(status: Status, sector: u32, reflected: bool, piece: Option<BoundaryPiece>) -> Self {
        debug_assert_eq!(status == Status::Boundary, piece.is_some());
        Self {
            status,
            sector,
            reflected,
            boundary_piece: piece,
        }
    }

    fn boundary(sector: u32, reflected: bool, piece: BoundaryPiece) -> Self {
        Self::new(Status::Boundary, sector, reflected, Some(piece))
    }
}

/// Position of a point relative to the symmetry group: `w = omega^j R^refl(w0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reduced {
    #[serde(with = "complex_serde")]
    pub w0: Complex64,
    pub j: u32,
    pub refl: bool,
}

/// `arg(z)` in `[0, 2pi)`.
pub fn arg_2pi(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    let a = if a < 0.0 { a + TAU } else { a };
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Index `j` of the sector `omega^j V_n` containing `z`.
pub fn sector_index(z: Complex64, n: u32) -> u32 {
    let j = (n as f64 * arg_2pi(z) / TAU).floor() as u32;
    j.min(n - 1)
}

/// Reflection across the bisector `L_n`: `zeta -> omega * conj(zeta)`.
pub fn reflect_bisector(zeta: Complex64, params: &Params) -> Complex64 {
    params.omega() * zeta.conj()
}

/// Fold `w` into the half-sector `0 <= arg <= pi/n` without any membership
/// check. On the bisector the non-reflected copy is preferred.
pub fn fold(w: Complex64, params: &Params) -> Reduced {
    let j = sector_index(w, params.n);
    let w1 = if j == 0 { w } else { w * params.omega_pow(-(j as i64)) };
    let theta = w1.im.atan2(w1.re);
    if theta > params.half_angle() {
        Reduced {
            w0: reflect_bisector(w1, params),
            j,
            refl: true,
        }
    } else {
        Reduced { w0: w1, j, refl: false }
    }
}

/// `omega^j R^refl(s0)`; the inverse of the group element found by
/// [`reduce_to_fundamental`].
pub fn apply_symmetry(s0: Complex64, j: i64, refl: bool, params: &Params) -> Complex64 {
    let s = if refl { reflect_bisector(s0, params) } else { s0 };
    if j.rem_euclid(params.n as i64) == 0 {
        s
    } else {
        params.omega_pow(j) * s
    }
}

impl Region {
    /// Builds `Pi_{n,k}` from the length `phi = F_{n,k}(1)`.
    pub fn new(params: Params, phi: f64) -> Result<Self> {
        let params = Params::new(params.n, params.k)?;
        if phi.is_nan() || phi <= 0.0 || !phi.is_finite() {
            return Err(Error::InvalidArgument(format!("phi must be positive, got {phi}")));
        }
        let n = params.nf();
        let k = params.k;
        let a = Complex64::new(phi, 0.0);
        let b = params.omega() * phi;
        let (p, op_len, kind) = if params.has_vertex() {
            let t = PI / n;
            let cot = 1.0 / ((k - 1.0) * t).tan();
            let len = phi * (t.cos() + t.sin() * cot);
            (Some(params.bisector() * len), Some(len), RegionKind::KGreaterOne)
        } else {
            (None, None, RegionKind::KEqualsOne)
        };
        let straight = n / 2.0 + 1.0;
        let degenerate_vertex = params.has_vertex() && (k - straight).abs() <= 1e-12 * n;
        let nonconvex = params.has_vertex() && k > straight && !degenerate_vertex;
        Ok(Self {
            params,
            phi,
            a,
            b,
            p,
            op_len,
            kind,
            nonconvex,
            degenerate_vertex,
            eps_bnd: EPS_BOUNDARY * phi,
        })
    }

    pub fn with_boundary_band(mut self, eps: f64) -> Self {
        self.eps_bnd = eps;
        self
    }

    /// Direction of the outer edge leaving `A`: inclination `k pi / n`.
    pub fn edge_direction(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.params.k * PI / self.params.nf())
    }

    /// Signed distance of a folded point to the line carrying the outer edge
    /// from `A`; positive on the side of the origin.
    pub fn edge_distance(&self, w0: Complex64) -> f64 {
        (self.edge_direction().conj() * (w0 - self.a)).im
    }

    /// All vertices `omega^j P`.
    pub fn vertices_p(&self) -> Vec<Complex64> {
        match self.p {
            Some(p) => (0..self.params.n).map(|j| self.params.omega_pow(j as i64) * p).collect(),
            None => Vec::new(),
        }
    }

    /// Distance from `w` to the nearest copy `omega^j P`, if `P` exists.
    pub fn distance_to_p(&self, w: Complex64) -> Option<f64> {
        let p = self.p?;
        Some((fold(w, &self.params).w0 - p).norm())
    }

    /// Boundary of `Omega` as a closed polygon `A, P, B, omega P, ...` for
    /// `k > 1`, or as `(start, direction)` rays for `k <= 1`.
    pub fn omega_boundary(&self) -> OmegaBoundary {
        let n = self.params.n as i64;
        match self.p {
            Some(p) => OmegaBoundary::Polygon(
                (0..n)
                    .flat_map(|j| {
                        let r = self.params.omega_pow(j);
                        [r * self.a, r * p]
                    })
                    .collect(),
            ),
            None => {
                let d = self.edge_direction();
                let mirrored = reflect_bisector(d, &self.params);
                OmegaBoundary::Rays(
                    (0..n)
                        .flat_map(|j| {
                            let r = self.params.omega_pow(j);
                            let start = r * self.a;
                            // At A the edge of copy j and the mirrored edge of copy j-1 meet.
                            let prev = self.params.omega_pow(j - 1);
                            [
                                BoundaryRay { start, direction: r * d },
                                BoundaryRay { start, direction: prev * mirrored },
                            ]
                        })
                        .collect(),
                )
            }
        }
    }

    /// Reduce `w` to the closed fundamental region: the triangle `O A P`
    /// (`k > 1`) or the half-strip below `L_n` (`k <= 1`).
    pub fn reduce_to_fundamental(&self, w: Complex64) -> Result<Reduced> {
        let red = fold(w, &self.params);
        let g = self.edge_distance(red.w0);
        if g < -self.eps_bnd {
            return Err(Error::Exterior { distance: -g });
        }
        Ok(red)
    }

    pub fn classify(&self, z: Complex64, domain: Domain) -> Membership {
        match domain {
            Domain::Sigma => self.classify_sigma(z),
            Domain::SectorV => self.classify_sector(z),
            Domain::Pi => self.classify_pi(z),
            Domain::Omega => self.classify_omega(z),
        }
    }

    fn classify_sigma(&self, z: Complex64) -> Membership {
        let n = self.params.n;
        let j = sector_index(z, n);
        let reflected = fold(z, &self.params).refl;
        for m in [j, (j + 1) % n] {
            let zr = z * self.params.omega_pow(-(m as i64));
            let dist = if zr.re >= 1.0 { zr.im.abs() } else { (zr - 1.0).norm() };
            if dist <= self.eps_bnd {
                return Membership::boundary(j, reflected, BoundaryPiece::Slit);
            }
        }
        Membership::new(Status::Interior, j, reflected, None)
    }

    fn outer_pieces(&self) -> (BoundaryPiece, BoundaryPiece) {
        match self.kind {
            RegionKind::KGreaterOne => (BoundaryPiece::SegAp, BoundaryPiece::SegBp),
            RegionKind::KEqualsOne => (BoundaryPiece::RayA, BoundaryPiece::RayB),
        }
    }

    fn classify_sector(&self, z: Complex64) -> Membership {
        let eps = self.eps_bnd;
        let n = self.params.n;
        let omega = self.params.omega();
        let below_real = -z.im;
        // Signed distance beyond the omega edge (positive = outside).
        let beyond_omega = (omega.conj() * z).im;
        let j = sector_index(z, n);
        let reflected = fold(z, &self.params).refl;
        let (outer_a, outer_b) = self.outer_pieces();
        if z.norm() <= eps || (z - 1.0).norm() <= eps || (z - omega).norm() <= eps {
            return Membership::boundary(0, reflected, BoundaryPiece::Vertex);
        }
        let outside = below_real > eps || beyond_omega > eps;
        if outside {
            return Membership::new(Status::Exterior, j, reflected, None);
        }
        if below_real.abs() <= eps && z.re > 0.0 {
            let piece = if z.re < 1.0 { BoundaryPiece::SegOa } else { outer_a };
            return Membership::boundary(0, false, piece);
        }
        let on_omega = beyond_omega.abs() <= eps && (omega.conj() * z).re > 0.0;
        if on_omega {
            let piece = if z.norm() < 1.0 { BoundaryPiece::SegOb } else { outer_b };
            return Membership::boundary(0, true, piece);
        }
        Membership::new(Status::Interior, 0, reflected, None)
    }

    fn classify_pi(&self, w: Complex64) -> Membership {
        let eps = self.eps_bnd;
        let omega = self.params.omega();
        let (outer_a, outer_b) = self.outer_pieces();
        let reduced = fold(w, &self.params);
        let vertex = w.norm() <= eps
            || (w - self.a).norm() <= eps
            || (w - self.b).norm() <= eps
            || self.p.is_some_and(|p| (w - p).norm() <= eps);
        if vertex {
            return Membership::boundary(0, reduced.refl, BoundaryPiece::Vertex);
        }
        let rot_b = omega.conj() * w;
        let in_cone = w.im >= -eps && rot_b.im <= eps;
        // Fold within sector 0 only; other sectors are exterior to Pi.
        let (w0, refl) = if w.im.atan2(w.re) > self.params.half_angle() {
            (reflect_bisector(w, &self.params), true)
        } else {
            (w, false)
        };
        let g = self.edge_distance(w0);
        if !in_cone || g < -eps {
            return Membership::new(Status::Exterior, reduced.j, reduced.refl, None);
        }
        if g <= eps {
            let piece = if refl { outer_b } else { outer_a };
            return Membership::boundary(0, refl, piece);
        }
        if w.im.abs() <= eps {
            return Membership::boundary(0, false, BoundaryPiece::SegOa);
        }
        if rot_b.im.abs() <= eps {
            return Membership::boundary(0, true, BoundaryPiece::SegOb);
        }
        Membership::new(Status::Interior, 0, refl, None)
    }

    fn classify_omega(&self, w: Complex64) -> Membership {
        let eps = self.eps_bnd;
        let red = fold(w, &self.params);
        let (outer_a, outer_b) = self.outer_pieces();
        let near_vertex = (red.w0 - self.a).norm() <= eps || self.p.is_some_and(|p| (red.w0 - p).norm() <= eps);
        if near_vertex {
            return Membership::boundary(red.j, red.refl, BoundaryPiece::Vertex);
        }
        let g = self.edge_distance(red.w0);
        if g < -eps {
            return Membership::new(Status::Exterior, red.j, red.refl, None);
        }
        if g <= eps {
            let piece = if red.refl { outer_b } else { outer_a };
            return Membership::boundary(red.j, red.refl, piece);
        }
        Membership::new(Status::Interior, red.j, red.refl, None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRay {
    #[serde(with = "complex_serde")]
    pub start: Complex64,
    #[serde(with = "complex_serde")]
    pub direction: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaBoundary {
    Polygon(#[serde(with = "vertex_list")] Vec<Complex64>),
    Rays(Vec<BoundaryRay>),
}

mod vertex_list {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Pt {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| Pt { re: c.re, im: c.im }).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pts = Vec::<Pt>::deserialize(d)?;
        Ok(pts.into_iter().map(|p| Complex64::new(p.re, p.im)).collect())
    }
}
