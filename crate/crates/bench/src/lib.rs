//! Fixed inputs shared by the benchmarks.

use qrt_core::biquad::curve_from_json;
use qrt_core::{Biquadratic, ExactNumber, FourBarLink, TowerContext};

/// Order-8 curve over Q(sqrt(5), sqrt(sqrt(5) - 2)).
pub fn order8_curve() -> Biquadratic {
    let text = r#"{"coefficients": [["1/4","0","1/4 + 1/2*sqrt(sqrt(5) - 2)"],["0","-1","0"],["1/4","0","1/4 - 1/2*sqrt(sqrt(5) - 2)"]]}"#;
    curve_from_json(text, &TowerContext::new()).expect("fixture parses")
}

/// Smooth rational curve with no small order.
pub fn generic_curve() -> Biquadratic {
    Biquadratic::from_ints([[1, 2, -1], [3, -5, 2], [1, 4, 7]]).expect("fixture is valid")
}

/// Link with a 4-periodic Darboux map.
pub fn four_periodic_link() -> FourBarLink {
    FourBarLink::parse(&["1", "2", "4", "2"], &TowerContext::new()).expect("fixture is valid")
}

/// Sample parameters for step-set families.
pub fn t_values() -> Vec<ExactNumber> {
    [(1, 7), (1, 5), (1, 3)]
        .iter()
        .map(|&(n, d)| ExactNumber::from_ratio(n, d))
        .collect()
}
