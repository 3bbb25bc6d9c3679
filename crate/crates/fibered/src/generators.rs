//! Synthetic generators with analytic circular base maps, so every
//! experiment runs at desk scale without external data.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::{SeedSplitter, Stream};

/// Which synthetic dataset to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Cylinder,
    FlatTorus,
    Mobius,
    Klein,
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cylinder" => Ok(GeneratorKind::Cylinder),
            "flat_torus" | "torus" => Ok(GeneratorKind::FlatTorus),
            "mobius" => Ok(GeneratorKind::Mobius),
            "klein" => Ok(GeneratorKind::Klein),
            other => Err(Error::InvalidArgument(format!(
                "unknown generator '{other}'; expected cylinder, flat_torus, mobius, or klein"
            ))),
        }
    }
}

/// Generator parameters, recorded as run metadata.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: GeneratorKind,
    pub n: usize,
    pub seed: u64,
    /// Shape parameters: cylinder half-height, Möbius half-width, or Klein
    /// radii, depending on the generator.
    pub params: Vec<f64>,
}

const MIN_POINTS: usize = 50;
const TAU: f64 = 2.0 * std::f64::consts::PI;

fn check_n(n: usize) -> Result<()> {
    if n < MIN_POINTS {
        return Err(Error::InvalidArgument(format!(
            "generators need n >= {MIN_POINTS}, got {n}"
        )));
    }
    Ok(())
}

fn circle_base(angles: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(angles.len(), 2, |i, c| {
        if c == 0 {
            angles[i].cos()
        } else {
            angles[i].sin()
        }
    })
}

/// Generate by kind with default shape parameters.
pub fn generate(kind: GeneratorKind, n: usize, seed: u64) -> Result<(Dataset, GeneratorSpec)> {
    match kind {
        GeneratorKind::Cylinder => gen_cylinder(n, seed),
        GeneratorKind::FlatTorus => gen_flat_torus(n, seed),
        GeneratorKind::Mobius => gen_mobius(n, seed, MOBIUS_HALF_WIDTH),
        GeneratorKind::Klein => gen_klein(n, seed, 1.0, 0.4),
    }
}

/// A cylinder of radius 1 with height 0.15× its radius:
/// (cos θ, sin θ, z) with z uniform in [−0.075, 0.075]. Base map: the unit
/// circle in the first two coordinates.
pub fn gen_cylinder(n: usize, seed: u64) -> Result<(Dataset, GeneratorSpec)> {
    check_n(n)?;
    let mut rng = SeedSplitter::new(seed).stream(Stream::Generator);
    let half_height = 0.075;
    let mut angles = Vec::with_capacity(n);
    let mut points = DMatrix::zeros(n, 3);
    for i in 0..n {
        let theta: f64 = rng.random_range(0.0..TAU);
        let z: f64 = rng.random_range(-half_height..half_height);
        points[(i, 0)] = theta.cos();
        points[(i, 1)] = theta.sin();
        points[(i, 2)] = z;
        angles.push(theta);
    }
    let base = circle_base(&angles);
    let dataset = Dataset::new(Some(points), None, base, None)?;
    Ok((
        dataset,
        GeneratorSpec {
            name: GeneratorKind::Cylinder,
            n,
            seed,
            params: vec![half_height],
        },
    ))
}

/// The flat torus (cos u, sin u, cos v, sin v)/√2 ⊂ R⁴, a circle bundle over
/// the circle with an approximately flat metric. Base map: (cos u, sin u).
pub fn gen_flat_torus(n: usize, seed: u64) -> Result<(Dataset, GeneratorSpec)> {
    check_n(n)?;
    let mut rng = SeedSplitter::new(seed).stream(Stream::Generator);
    let scale = 1.0 / 2.0f64.sqrt();
    let mut angles = Vec::with_capacity(n);
    let mut points = DMatrix::zeros(n, 4);
    for i in 0..n {
        let u: f64 = rng.random_range(0.0..TAU);
        let v: f64 = rng.random_range(0.0..TAU);
        points[(i, 0)] = u.cos() * scale;
        points[(i, 1)] = u.sin() * scale;
        points[(i, 2)] = v.cos() * scale;
        points[(i, 3)] = v.sin() * scale;
        angles.push(u);
    }
    let base = circle_base(&angles);
    let dataset = Dataset::new(Some(points), None, base, None)?;
    Ok((
        dataset,
        GeneratorSpec {
            name: GeneratorKind::FlatTorus,
            n,
            seed,
            params: vec![],
        },
    ))
}

/// Default Möbius half-width w = 2π/3, so height/circumference = 2w/(2π) = 2/3.
pub const MOBIUS_HALF_WIDTH: f64 = TAU / 3.0;

/// Möbius band point for (u, v); well-defined on the quotient
/// (u + 2π, v) ~ (u, −v).
pub fn mobius_point(u: f64, v: f64) -> [f64; 4] {
    [u.cos(), u.sin(), v * (u / 2.0).cos(), v * (u / 2.0).sin()]
}

/// A Möbius band in R⁴ with height/circumference ratio 2/3:
/// (cos u, sin u, v·cos(u/2), v·sin(u/2)) with v ∈ [−w, w], w = 2π/3.
/// Base map: (cos u, sin u).
pub fn gen_mobius(n: usize, seed: u64, half_width: f64) -> Result<(Dataset, GeneratorSpec)> {
    check_n(n)?;
    if half_width <= 0.0 {
        return Err(Error::InvalidArgument("half_width must be positive".into()));
    }
    let mut rng = SeedSplitter::new(seed).stream(Stream::Generator);
    let mut angles = Vec::with_capacity(n);
    let mut points = DMatrix::zeros(n, 4);
    for i in 0..n {
        let u: f64 = rng.random_range(0.0..TAU);
        let v: f64 = rng.random_range(-half_width..half_width);
        let p = mobius_point(u, v);
        for c in 0..4 {
            points[(i, c)] = p[c];
        }
        angles.push(u);
    }
    let base = circle_base(&angles);
    let dataset = Dataset::new(Some(points), None, base, None)?;
    Ok((
        dataset,
        GeneratorSpec {
            name: GeneratorKind::Mobius,
            n,
            seed,
            params: vec![half_width],
        },
    ))
}

/// Klein bottle point for (u, v); well-defined on (u + 2π, v) ~ (u, −v).
pub fn klein_point(u: f64, v: f64, big_r: f64, r_tube: f64) -> [f64; 4] {
    [
        (big_r + r_tube * v.cos()) * u.cos(),
        (big_r + r_tube * v.cos()) * u.sin(),
        r_tube * v.sin() * (u / 2.0).cos(),
        r_tube * v.sin() * (u / 2.0).sin(),
    ]
}

/// A Klein bottle in R⁴ (figure-eight-free tube form), injective for
/// r_tube < R. Base map: (cos u, sin u).
pub fn gen_klein(n: usize, seed: u64, big_r: f64, r_tube: f64) -> Result<(Dataset, GeneratorSpec)> {
    check_n(n)?;
    if !(r_tube > 0.0 && r_tube < big_r) {
        return Err(Error::InvalidArgument(
            "klein generator needs 0 < r_tube < R for injectivity".into(),
        ));
    }
    let mut rng = SeedSplitter::new(seed).stream(Stream::Generator);
    let mut angles = Vec::with_capacity(n);
    let mut points = DMatrix::zeros(n, 4);
    for i in 0..n {
        let u: f64 = rng.random_range(0.0..TAU);
        let v: f64 = rng.random_range(0.0..TAU);
        let p = klein_point(u, v, big_r, r_tube);
        for c in 0..4 {
            points[(i, c)] = p[c];
        }
        angles.push(u);
    }
    let base = circle_base(&angles);
    let dataset = Dataset::new(Some(points), None, base, None)?;
    Ok((
        dataset,
        GeneratorSpec {
            name: GeneratorKind::Klein,
            n,
            seed,
            params: vec![big_r, r_tube],
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cylinder_radius_and_height() {
        let (ds, _) = gen_cylinder(100, 1).unwrap();
        let p = ds.points().unwrap();
        for i in 0..100 {
            let radial = (p[(i, 0)].powi(2) + p[(i, 1)].powi(2)).sqrt();
            assert_abs_diff_eq!(radial, 1.0, epsilon = 1e-12);
            assert!(p[(i, 2)].abs() <= 0.075);
        }
    }

    #[test]
    fn flat_torus_on_unit_sphere() {
        let (ds, _) = gen_flat_torus(100, 2).unwrap();
        let p = ds.points().unwrap();
        for i in 0..100 {
            let norm = (0..4).map(|c| p[(i, c)].powi(2)).sum::<f64>().sqrt();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn torus_angle_swap_is_isometric() {
        // Swapping u and v maps the point set to an isometric configuration:
        // verify the swap is an exact isometry of R⁴ on generated points.
        let (ds, _) = gen_flat_torus(60, 3).unwrap();
        let p = ds.points().unwrap();
        let swapped = DMatrix::from_fn(60, 4, |i, c| match c {
            0 => p[(i, 2)],
            1 => p[(i, 3)],
            2 => p[(i, 0)],
            _ => p[(i, 1)],
        });
        let d1 = crate::data::euclidean_distances(p);
        let d2 = crate::data::euclidean_distances(&swapped);
        for i in 0..60 {
            for j in 0..60 {
                assert_abs_diff_eq!(d1[(i, j)], d2[(i, j)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mobius_quotient_identity() {
        for (u, v) in [(0.3, 1.0), (2.0, -0.7), (5.5, 0.2)] {
            let a = mobius_point(u, v);
            let b = mobius_point(u + TAU, -v);
            for c in 0..4 {
                assert_abs_diff_eq!(a[c], b[c], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mobius_aspect_ratio() {
        // Height 2w over circumference 2π equals 2/3.
        assert_abs_diff_eq!(2.0 * MOBIUS_HALF_WIDTH / TAU, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn klein_quotient_identity() {
        for (u, v) in [(0.3, 1.0), (2.0, -0.7), (5.5, 0.2)] {
            let a = klein_point(u, v, 1.0, 0.4);
            let b = klein_point(u + TAU, -v, 1.0, 0.4);
            for c in 0..4 {
                assert_abs_diff_eq!(a[c], b[c], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn generators_deterministic_under_seed() {
        let (a, _) = gen_mobius(60, 9, MOBIUS_HALF_WIDTH).unwrap();
        let (b, _) = gen_mobius(60, 9, MOBIUS_HALF_WIDTH).unwrap();
        assert_eq!(a.points().unwrap(), b.points().unwrap());
        let (c, _) = gen_mobius(60, 10, MOBIUS_HALF_WIDTH).unwrap();
        assert_ne!(a.points().unwrap(), c.points().unwrap());
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(gen_cylinder(10, 0).is_err());
    }
}
