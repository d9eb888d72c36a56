use rand::Rng;
use serde::{Deserialize, Serialize};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Membership in the flat-top regular hexagon of circumradius `radius`
/// centred at the origin. Boundary points count as inside.
pub fn point_in_hexagon(p: Point, radius: f64) -> bool {
    let ax = p.x.abs();
    let ay = p.y.abs();
    ay <= radius * SQRT_3 / 2.0 && SQRT_3 * ax + ay <= SQRT_3 * radius
}

/// Uniform point in the hexagon, by rejection from its bounding box.
pub fn sample_in_hexagon<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Point {
    let half_height = radius * SQRT_3 / 2.0;
    loop {
        let p = Point::new(
            rng.random_range(-radius..=radius),
            rng.random_range(-half_height..=half_height),
        );
        if point_in_hexagon(p, radius) {
            return p;
        }
    }
}

/// Uniform point in the disc of radius `radius` around `center`.
pub fn sample_in_disc<R: Rng + ?Sized>(rng: &mut R, center: Point, radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Point::new(center.x + r * theta.cos(), center.y + r * theta.sin())
}
