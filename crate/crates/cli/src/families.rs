//! Built-in domain/potential families: the verification suite and the
//! sweep generators.

use crate::config::{DomainSpec, PotentialSpec, RunConfig};

fn base_config(domain: DomainSpec, potential: PotentialSpec) -> RunConfig {
    RunConfig {
        domain,
        potential,
        delta: None,
        v_max: None,
        scales: Default::default(),
        bounds: Default::default(),
        analysis: Default::default(),
        checks: None,
        output_dir: None,
        seed: 0,
    }
}

pub fn rectangle_config(a: f64, b: f64) -> RunConfig {
    base_config(
        DomainSpec::Polygon {
            vertices: vec![[0.0, 0.0], [a, 0.0], [a, b], [0.0, b]],
        },
        PotentialSpec::Constant,
    )
}

pub fn rotated_rectangle_config(a: f64, b: f64, angle: f64) -> RunConfig {
    let (s, c) = angle.sin_cos();
    let rot = |x: f64, y: f64| [c * x - s * y, s * x + c * y];
    base_config(
        DomainSpec::Polygon {
            vertices: vec![rot(0.0, 0.0), rot(a, 0.0), rot(a, b), rot(0.0, b)],
        },
        PotentialSpec::Constant,
    )
}

pub fn square_cone_config(side: f64, slope: f64) -> RunConfig {
    base_config(
        DomainSpec::Polygon {
            vertices: vec![[0.0, 0.0], [side, 0.0], [side, side], [0.0, side]],
        },
        PotentialSpec::Cone {
            peak: [side / 2.0, side / 2.0],
            slope,
            pieces: 256,
        },
    )
}

pub fn triangle_config(n1: f64, n2: f64) -> RunConfig {
    base_config(
        DomainSpec::Polygon {
            vertices: vec![[0.0, 0.0], [n2, 0.0], [0.0, n1]],
        },
        PotentialSpec::TriangleExample { n1, n2 },
    )
}

pub fn trapezoid_config(n1: f64, n2: f64, m: f64) -> RunConfig {
    let vertices = if m > 0.0 {
        vec![[0.0, 0.0], [n2, 0.0], [n2, m * n1], [0.0, n1]]
    } else {
        vec![[0.0, 0.0], [n2, 0.0], [0.0, n1]]
    };
    base_config(
        DomainSpec::Polygon { vertices },
        PotentialSpec::TrapezoidExample { n1, n2, m },
    )
}

pub fn constant_square_config(n1: f64) -> RunConfig {
    rectangle_config(2.0 * n1, 2.0 * n1)
}

/// The built-in verification suite: a mix of comparable and elongated
/// instances across the families.
pub fn suite() -> Vec<(&'static str, RunConfig)> {
    let mut rect_2x1 = rectangle_config(2.0, 1.0);
    rect_2x1.delta = Some(1.0 / 64.0);
    let rect_8x1 = rectangle_config(8.0, 1.0);
    let rect_rot = rotated_rectangle_config(6.0, 1.0, 0.4);
    let cone = square_cone_config(6.0, 0.5);
    let tri_4_32 = triangle_config(4.0, 32.0);
    let tri_5_25 = triangle_config(5.0, 25.0);
    let trap = trapezoid_config(4.0, 40.0, 0.5);
    vec![
        ("rect_2x1", rect_2x1),
        ("rect_8x1", rect_8x1),
        ("rect_rot_6x1", rect_rot),
        ("square_cone", cone),
        ("triangle_4_32", tri_4_32),
        ("triangle_5_25", tri_5_25),
        ("trapezoid_4_40", trap),
    ]
}
