//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use gns_core::{BoxDomain, GnsInstance, OPoly, Order};

/// `(p, D)` over `Z` with `p` given by integer coefficients, constant term first.
pub fn integer_instance(p: &[i64]) -> GnsInstance {
    let z = Arc::new(Order::from_i64s(&[-1, 1]).unwrap());
    let coords: Vec<Vec<i64>> = p.iter().map(|&c| vec![c]).collect();
    GnsInstance::new(z, Arc::new(BoxDomain::unit(1)), OPoly::from_coords(&coords)).unwrap()
}

/// `(p, D)` over `Z[i]` with the unit box, coefficients as `(re, im)` pairs.
pub fn gaussian_instance(p: &[(i64, i64)]) -> GnsInstance {
    let g = Arc::new(Order::from_i64s(&[1, 0, 1]).unwrap());
    let coords: Vec<Vec<i64>> = p.iter().map(|&(a, b)| vec![a, b]).collect();
    GnsInstance::new(g, Arc::new(BoxDomain::unit(2)), OPoly::from_coords(&coords)).unwrap()
}
