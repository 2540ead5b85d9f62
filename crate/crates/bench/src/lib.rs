//! Shared fixtures for the solver benchmarks.

use lenscale::eig2d::{self, Grid2d, Operator2d};
use lenscale::geometry::{ConvexDomain, Point};
use lenscale::potential::{self, Potential};
use lenscale::sturm1d::Tridiagonal1d;

pub fn rectangle(a: f64, b: f64) -> ConvexDomain {
    ConvexDomain::from_polygon(vec![
        Point::new(0.0, 0.0),
        Point::new(a, 0.0),
        Point::new(a, b),
        Point::new(0.0, b),
    ])
    .unwrap()
}

pub fn rectangle_operator(a: f64, b: f64, delta: f64) -> (Potential, Operator2d) {
    let d = rectangle(a, b);
    let pot = Potential::new(potential::constant(&d));
    let grid = Grid2d::build(&d, &pot, delta).unwrap();
    let op = eig2d::assemble_2d(&pot, &grid).unwrap();
    (pot, op)
}

pub fn unit_well(n_sub: usize) -> Tridiagonal1d {
    let dy = 1.0 / n_sub as f64;
    let diag = vec![2.0 / (dy * dy) + 1.0; n_sub - 1];
    Tridiagonal1d::new(dy, dy, diag).unwrap()
}
