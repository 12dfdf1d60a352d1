//! Satellite-Earth-user geometry and the hexagonal cell layout.
//!
//! Users and cell centers live on a local tangent plane around the
//! footprint center (flat-footprint approximation, valid because the
//! footprint span is tiny against the Earth radius); the satellite
//! position is exact 3D from (altitude, elevation, azimuth).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Earth radius used by the slant-distance relation, km.
pub const EARTH_RADIUS_KM: f64 = 6378.0;

/// Maximum distance from the footprint origin a ground point may have,
/// keeping the flat-plane approximation honest.
pub const MAX_GROUND_RANGE_KM: f64 = 500.0;

/// Point on the local tangent plane, origin at the footprint center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundPoint {
    pub x_km: f64,
    pub y_km: f64,
}

impl GroundPoint {
    pub fn new(x_km: f64, y_km: f64) -> Result<Self> {
        if !(x_km.is_finite() && y_km.is_finite()) {
            return Err(Error::InvalidParameter("ground point must be finite".into()));
        }
        if (x_km * x_km + y_km * y_km).sqrt() > MAX_GROUND_RANGE_KM {
            return Err(Error::InvalidParameter(format!(
                "ground point ({x_km}, {y_km}) exceeds {MAX_GROUND_RANGE_KM} km from origin"
            )));
        }
        Ok(Self { x_km, y_km })
    }

    pub fn distance_to(&self, other: &GroundPoint) -> f64 {
        let dx = self.x_km - other.x_km;
        let dy = self.y_km - other.y_km;
        (dx * dx + dy * dy).sqrt()
    }
}

/// 3D vector in footprint-centered coordinates, km.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    fn sub(&self, o: &Vec3) -> Vec3 {
        Vec3 { x: self.x - o.x, y: self.y - o.y, z: self.z - o.z }
    }

    fn dot(&self, o: &Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    fn cross_norm(&self, o: &Vec3) -> f64 {
        let cx = self.y * o.z - self.z * o.y;
        let cy = self.z * o.x - self.x * o.z;
        let cz = self.x * o.y - self.y * o.x;
        (cx * cx + cy * cy + cz * cz).sqrt()
    }
}

/// Satellite snapshot: altitude plus elevation/azimuth relative to the
/// footprint origin.
///
/// Elevations in (90, 180) are folded to 180 - elevation with the azimuth
/// flipped, so the stored elevation always lies in (0, 90] while the
/// geometry reproduces the pass beyond zenith.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteState {
    pub altitude_km: f64,
    pub elevation_deg: f64,
    #[serde(default)]
    pub azimuth_deg: f64,
}

impl SatelliteState {
    pub fn new(altitude_km: f64, elevation_deg: f64, azimuth_deg: f64) -> Result<Self> {
        if !(altitude_km.is_finite() && elevation_deg.is_finite() && azimuth_deg.is_finite()) {
            return Err(Error::InvalidParameter("satellite state must be finite".into()));
        }
        if altitude_km <= 0.0 {
            return Err(Error::InvalidParameter(format!("altitude must be > 0, got {altitude_km}")));
        }
        let (mut elevation, mut azimuth) = (elevation_deg, azimuth_deg);
        if elevation > 90.0 && elevation < 180.0 {
            elevation = 180.0 - elevation;
            azimuth += 180.0;
        }
        if !(elevation > 0.0 && elevation <= 90.0) {
            return Err(Error::InvalidParameter(format!(
                "elevation must lie in (0, 90] after folding, got {elevation_deg}"
            )));
        }
        azimuth = azimuth.rem_euclid(360.0);
        Ok(Self { altitude_km, elevation_deg: elevation, azimuth_deg: azimuth })
    }

    /// Validated copy with a different elevation (used by sweeps).
    pub fn with_elevation(&self, elevation_deg: f64) -> Result<Self> {
        Self::new(self.altitude_km, elevation_deg, self.azimuth_deg)
    }
}

/// Slant distance to the satellite from the origin, km:
///
/// ```text
/// d = sqrt(Re^2 sin^2(e) + H^2 + 2 H Re) - Re sin(e)
/// ```
pub fn slant_distance(altitude_km: f64, elevation_deg: f64) -> Result<f64> {
    if !(elevation_deg > 0.0 && elevation_deg <= 90.0) {
        return Err(Error::InvalidParameter(format!(
            "elevation must lie in (0, 90], got {elevation_deg}"
        )));
    }
    if altitude_km <= 0.0 {
        return Err(Error::InvalidParameter(format!("altitude must be > 0, got {altitude_km}")));
    }
    let s = elevation_deg.to_radians().sin();
    let re = EARTH_RADIUS_KM;
    Ok((re * re * s * s + altitude_km * altitude_km + 2.0 * altitude_km * re).sqrt() - re * s)
}

/// Satellite position (d cos e cos phi, d cos e sin phi, d sin e).
pub fn satellite_position(state: &SatelliteState) -> Result<Vec3> {
    let d = slant_distance(state.altitude_km, state.elevation_deg)?;
    let e = state.elevation_deg.to_radians();
    let phi = state.azimuth_deg.to_radians();
    Ok(Vec3 { x: d * e.cos() * phi.cos(), y: d * e.cos() * phi.sin(), z: d * e.sin() })
}

/// Hexagonal cell tessellation with frequency-reuse coloring.
#[derive(Debug, Clone)]
pub struct BeamLayout {
    pub cell_centers: Vec<GroundPoint>,
    pub cell_radius_km: f64,
    pub reuse_factor: u32,
    pub colors: Vec<u8>,
    axial: Vec<(i32, i32)>,
}

impl BeamLayout {
    pub fn n_beams(&self) -> usize {
        self.cell_centers.len()
    }

    /// Axial lattice coordinates of each cell.
    pub fn axial_coords(&self) -> &[(i32, i32)] {
        &self.axial
    }

    /// Index of the cell whose center is closest to `p` (location-based
    /// association; points outside the tessellation attach to the nearest
    /// cell).
    pub fn nearest_cell(&self, p: &GroundPoint) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.cell_centers.iter().enumerate() {
            let d = c.distance_to(p);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Indices of beams sharing the serving cell's color, serving excluded.
    pub fn co_channel(&self, serving: usize) -> Vec<usize> {
        let color = self.colors[serving];
        (0..self.cell_centers.len())
            .filter(|&i| i != serving && self.colors[i] == color)
            .collect()
    }

    /// Index of the cell at the origin.
    pub fn center_cell(&self) -> usize {
        self.nearest_cell(&GroundPoint { x_km: 0.0, y_km: 0.0 })
    }
}

/// Build the hexagonal layout: axial coordinates (q, r) with
/// |q|, |r|, |q+r| <= rings, adjacent-center spacing sqrt(3) * cell radius,
/// and a proper 3-coloring ((q - r) mod 3) when the reuse factor is 3.
pub fn build_hex_layout(cell_radius_km: f64, rings: u32, reuse_factor: u32) -> Result<BeamLayout> {
    if cell_radius_km <= 0.0 || !cell_radius_km.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "cell radius must be > 0, got {cell_radius_km}"
        )));
    }
    if reuse_factor != 1 && reuse_factor != 3 {
        return Err(Error::InvalidParameter(format!(
            "reuse factor must be 1 or 3, got {reuse_factor}"
        )));
    }
    let spacing = 3f64.sqrt() * cell_radius_km;
    let n = rings as i32;
    let mut cell_centers = Vec::new();
    let mut colors = Vec::new();
    let mut axial = Vec::new();
    for q in -n..=n {
        for r in (-n).max(-n - q)..=n.min(n - q) {
            let x = spacing * (q as f64 + r as f64 / 2.0);
            let y = spacing * 3f64.sqrt() / 2.0 * r as f64;
            cell_centers.push(GroundPoint::new(x, y)?);
            let color = if reuse_factor == 3 { (q - r).rem_euclid(3) as u8 } else { 0 };
            colors.push(color);
            axial.push((q, r));
        }
    }
    Ok(BeamLayout { cell_centers, cell_radius_km, reuse_factor, colors, axial })
}

/// Absolute angle off antenna boresight, degrees in [0, 180]: the angle at
/// the satellite between the boresight target and the user, computed
/// directly from the 3D vectors.
pub fn off_boresight_angle(
    sat_pos: &Vec3,
    boresight_target: &GroundPoint,
    user: &GroundPoint,
) -> Result<f64> {
    if sat_pos.z <= 0.0 {
        return Err(Error::InvalidParameter("satellite must be strictly above the plane".into()));
    }
    let t = Vec3 { x: boresight_target.x_km, y: boresight_target.y_km, z: 0.0 };
    let u = Vec3 { x: user.x_km, y: user.y_km, z: 0.0 };
    let v1 = t.sub(sat_pos);
    let v2 = u.sub(sat_pos);
    if v1.norm() == 0.0 || v2.norm() == 0.0 {
        return Err(Error::InvalidParameter("degenerate zero-length boresight vector".into()));
    }
    Ok(v2.cross_norm(&v1).atan2(v2.dot(&v1)).to_degrees())
}

/// Per-user slant distance (km) and elevation (degrees) under the
/// flat-footprint approximation: distance to the satellite and the angle
/// of the satellite above the user's local horizontal plane.
pub fn user_slant_and_elevation(sat_pos: &Vec3, user: &GroundPoint) -> Result<(f64, f64)> {
    if sat_pos.z <= 0.0 {
        return Err(Error::InvalidParameter("satellite must be strictly above the plane".into()));
    }
    let d = sat_pos.sub(&Vec3 { x: user.x_km, y: user.y_km, z: 0.0 });
    let dist = d.norm();
    Ok((dist, (sat_pos.z / dist).asin().to_degrees()))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen oracle digits
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent slant-range oracle: place the satellite at central angle
    /// psi on a circular Earth section, bisect psi until the elevation seen
    /// at the user equals the target, then measure the chord.
    fn slant_oracle(altitude_km: f64, elevation_deg: f64) -> f64 {
        let re = EARTH_RADIUS_KM;
        let rs = re + altitude_km;
        let target = elevation_deg.to_radians();
        let elev = |psi: f64| {
            let (sx, sy) = (rs * psi.cos(), rs * psi.sin());
            let (dx, dy) = (sx - re, sy);
            (dx / (dx * dx + dy * dy).sqrt()).asin() - target
        };
        let (mut lo, mut hi) = (1e-12, std::f64::consts::FRAC_PI_2);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if elev(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let psi = 0.5 * (lo + hi);
        let (sx, sy) = (rs * psi.cos(), rs * psi.sin());
        ((sx - re) * (sx - re) + sy * sy).sqrt()
    }

    #[test]
    fn slant_at_zenith() {
        assert!((slant_distance(600.0, 90.0).unwrap() - 600.0).abs() < 1e-12);
    }

    #[test]
    fn slant_matches_independent_oracle() {
        for eps in [45.0, 30.0, 10.0] {
            let d = slant_distance(600.0, eps).unwrap();
            let o = slant_oracle(600.0, eps);
            assert!((d - o).abs() < 1e-9, "eps={eps}: {d} vs {o}");
        }
        // 40-digit references for the two swept elevations
        assert!((slant_distance(600.0, 45.0).unwrap() - 814.830408857363452).abs() < 1e-9);
        assert!((slant_distance(600.0, 30.0).unwrap() - 1075.19054452307513).abs() < 1e-9);
    }

    #[test]
    fn slant_rejects_out_of_range() {
        assert!(slant_distance(600.0, 0.0).is_err());
        assert!(slant_distance(600.0, 90.5).is_err());
        assert!(slant_distance(0.0, 45.0).is_err());
    }

    #[test]
    fn slant_decreasing_in_elevation() {
        let mut prev = f64::INFINITY;
        let mut e = 1.0;
        while e <= 90.0 {
            let d = slant_distance(600.0, e).unwrap();
            assert!(d < prev, "slant not decreasing at {e}");
            prev = d;
            e += 1.0;
        }
    }

    #[test]
    fn satellite_position_zenith_and_norm() {
        let s = SatelliteState::new(600.0, 90.0, 123.0).unwrap();
        let p = satellite_position(&s).unwrap();
        assert!(p.x.abs() < 1e-9 && p.y.abs() < 1e-9);
        assert!((p.z - 600.0).abs() < 1e-9);

        let s = SatelliteState::new(600.0, 45.0, 0.0).unwrap();
        let p = satellite_position(&s).unwrap();
        let d = slant_distance(600.0, 45.0).unwrap();
        assert!((p.x - p.z).abs() < 1e-9, "cos45 = sin45 components");
        assert!((p.norm() - d).abs() < 1e-9);
    }

    #[test]
    fn satellite_state_folds_beyond_zenith() {
        let s = SatelliteState::new(600.0, 135.0, 0.0).unwrap();
        assert!((s.elevation_deg - 45.0).abs() < 1e-12);
        assert!((s.azimuth_deg - 180.0).abs() < 1e-12);
        assert!(SatelliteState::new(600.0, 0.0, 0.0).is_err());
        assert!(SatelliteState::new(600.0, 180.0, 0.0).is_err());
    }

    #[test]
    fn ground_point_range_enforced() {
        assert!(GroundPoint::new(400.0, 0.0).is_ok());
        assert!(GroundPoint::new(400.0, 400.0).is_err());
    }

    #[test]
    fn hex_layout_sizes() {
        let single = build_hex_layout(10.0, 0, 1).unwrap();
        assert_eq!(single.n_beams(), 1);
        assert_eq!(single.cell_centers[0], GroundPoint { x_km: 0.0, y_km: 0.0 });
        assert_eq!(single.colors[0], 0);

        let layout = build_hex_layout(10.0, 2, 3).unwrap();
        assert_eq!(layout.n_beams(), 19);
        let mut sizes = [0usize; 3];
        for &c in &layout.colors {
            sizes[c as usize] += 1;
        }
        sizes.sort_unstable();
        assert_eq!(sizes, [6, 6, 7]);
    }

    #[test]
    fn hex_layout_spacing_and_neighbors() {
        let layout = build_hex_layout(10.0, 2, 3).unwrap();
        let spacing = 3f64.sqrt() * 10.0;
        let center = layout.center_cell();
        let c0 = layout.cell_centers[center];
        let mut neighbor_colors = Vec::new();
        for (i, c) in layout.cell_centers.iter().enumerate() {
            let d = c.distance_to(&c0);
            if i != center && d < spacing * 1.01 {
                assert!((d - spacing).abs() < 1e-9, "neighbor spacing {d}");
                neighbor_colors.push(layout.colors[i]);
            }
        }
        assert_eq!(neighbor_colors.len(), 6);
        assert!(neighbor_colors.iter().all(|&c| c == 1 || c == 2));
    }

    #[test]
    fn hex_coloring_is_proper() {
        // exhaustive adjacency check across the lattice
        for rings in 0..=4u32 {
            let layout = build_hex_layout(10.0, rings, 3).unwrap();
            let spacing = 3f64.sqrt() * 10.0;
            for i in 0..layout.n_beams() {
                for j in (i + 1)..layout.n_beams() {
                    let d = layout.cell_centers[i].distance_to(&layout.cell_centers[j]);
                    if (d - spacing).abs() < 1e-6 {
                        assert_ne!(
                            layout.colors[i], layout.colors[j],
                            "adjacent cells {i},{j} share color at rings={rings}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn hex_layout_rejects_bad_reuse() {
        assert!(build_hex_layout(10.0, 2, 2).is_err());
        assert!(build_hex_layout(-1.0, 2, 1).is_err());
    }

    #[test]
    fn off_boresight_basics() {
        let sat = Vec3 { x: 0.0, y: 0.0, z: 600.0 };
        let origin = GroundPoint { x_km: 0.0, y_km: 0.0 };
        let u = GroundPoint { x_km: 10.0, y_km: 0.0 };
        assert_eq!(off_boresight_angle(&sat, &origin, &origin).unwrap(), 0.0);
        // right-triangle oracle: atan(10/600)
        let z = off_boresight_angle(&sat, &origin, &u).unwrap();
        assert!((z - (10f64 / 600.0).atan().to_degrees()).abs() < 1e-12);
        // symmetric users about a nadir beam
        let v = GroundPoint { x_km: -10.0, y_km: 0.0 };
        let zu = off_boresight_angle(&sat, &origin, &u).unwrap();
        let zv = off_boresight_angle(&sat, &origin, &v).unwrap();
        assert!((zu - zv).abs() < 1e-12);
    }

    #[test]
    fn off_boresight_rejects_satellite_on_plane() {
        let sat = Vec3 { x: 100.0, y: 0.0, z: 0.0 };
        let o = GroundPoint { x_km: 0.0, y_km: 0.0 };
        assert!(off_boresight_angle(&sat, &o, &o).is_err());
    }

    #[test]
    fn off_boresight_rotation_invariant_at_nadir() {
        let sat = Vec3 { x: 0.0, y: 0.0, z: 600.0 };
        let target = GroundPoint { x_km: 5.0, y_km: 0.0 };
        let user = GroundPoint { x_km: 12.0, y_km: 3.0 };
        let base = off_boresight_angle(&sat, &target, &user).unwrap();
        for deg in [30.0f64, 111.0, 240.0] {
            let (s, c) = deg.to_radians().sin_cos();
            let rot = |p: &GroundPoint| GroundPoint {
                x_km: c * p.x_km - s * p.y_km,
                y_km: s * p.x_km + c * p.y_km,
            };
            let z = off_boresight_angle(&sat, &rot(&target), &rot(&user)).unwrap();
            assert!((z - base).abs() < 1e-9, "rotation by {deg}");
        }
    }

    #[test]
    fn user_slant_consistency_at_origin() {
        let state = SatelliteState::new(600.0, 37.0, 20.0).unwrap();
        let sat = satellite_position(&state).unwrap();
        let (d, e) = user_slant_and_elevation(&sat, &GroundPoint { x_km: 0.0, y_km: 0.0 }).unwrap();
        assert!((d - slant_distance(600.0, 37.0).unwrap()).abs() < 1e-9);
        assert!((e - 37.0).abs() < 1e-9);
    }

    #[test]
    fn user_slant_right_triangle() {
        let sat = Vec3 { x: 0.0, y: 0.0, z: 600.0 };
        let (d, e) = user_slant_and_elevation(&sat, &GroundPoint { x_km: 10.0, y_km: 0.0 }).unwrap();
        assert!((d - (600f64 * 600.0 + 100.0).sqrt()).abs() < 1e-12);
        assert!((e - (600f64 / 10.0).atan().to_degrees()).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn user_distance_at_least_plane_height(
            x in -50.0f64..50.0,
            y in -50.0f64..50.0,
            elev in 5.0f64..=90.0,
        ) {
            // The slant can never undercut the satellite's height above
            // the tangent plane. (It CAN dip slightly below the orbital
            // altitude off-zenith: the plane height d sin(e) is a touch
            // less than H, and a user near the sub-satellite point gets
            // the difference.)
            let state = SatelliteState::new(600.0, elev, 0.0).unwrap();
            let sat = satellite_position(&state).unwrap();
            let (d, _) = user_slant_and_elevation(&sat, &GroundPoint { x_km: x, y_km: y }).unwrap();
            prop_assert!(d >= sat.z - 1e-9);
        }
    }

    #[test]
    fn user_distance_at_least_altitude_at_zenith() {
        let sat = Vec3 { x: 0.0, y: 0.0, z: 600.0 };
        for (x, y) in [(0.0, 0.0), (10.0, -3.0), (-50.0, 50.0)] {
            let (d, _) = user_slant_and_elevation(&sat, &GroundPoint { x_km: x, y_km: y }).unwrap();
            assert!(d >= 600.0);
        }
    }
}
