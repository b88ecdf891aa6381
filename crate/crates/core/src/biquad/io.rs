//! Curve files: `{"coefficients": [[a00,a01,a02],[a10,a11,a12],[a20,a21,a22]]}`.

use serde::{Deserialize, Serialize};

use crate::error::{QrtError, Result};
use crate::numbers::{parse_number, ExactNumber, TowerContext};

use super::Biquadratic;

/// Wire form of a curve; every entry is a number string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub coefficients: Vec<Vec<String>>,
}

/// Parses a 3×3 grid of number strings (row = power of `x`).
pub fn parse_matrix(rows: &[Vec<String>], ctx: &TowerContext) -> Result<Biquadratic> {
    if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
        return Err(QrtError::Invalid(
            "coefficients must be a 3x3 matrix".into(),
        ));
    }
    let mut a: [[ExactNumber; 3]; 3] = Default::default();
    for (i, row) in rows.iter().enumerate() {
        for (j, text) in row.iter().enumerate() {
            a[i][j] = parse_number(text, ctx)
                .map_err(|e| QrtError::Invalid(format!("coefficients[{i}][{j}]: {e}")))?;
        }
    }
    Biquadratic::new(a)
}

pub fn curve_from_json(text: &str, ctx: &TowerContext) -> Result<Biquadratic> {
    let file: CurveFile =
        serde_json::from_str(text).map_err(|e| QrtError::Invalid(format!("curve file: {e}")))?;
    parse_matrix(&file.coefficients, ctx)
}

/// Canonical JSON text; parsing it back reproduces the same bytes.
pub fn curve_to_json(q: &Biquadratic) -> String {
    let file = CurveFile {
        coefficients: q
            .matrix()
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect(),
    };
    serde_json::to_string(&file).expect("serializing strings cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_exact() {
        let text = r#"{"coefficients":[["0","0","1/4 - 1/2*sqrt(-2 + sqrt(5))"],["0","-1","1/4"],["1/4","0","0"]]}"#;
        let ctx = TowerContext::new();
        let q = curve_from_json(text, &ctx).unwrap();
        let out = curve_to_json(&q);
        assert_eq!(out, text);
        let again = curve_to_json(&curve_from_json(&out, &TowerContext::new()).unwrap());
        assert_eq!(again, out);
    }

    #[test]
    fn rejects_bad_shapes_and_zero() {
        let ctx = TowerContext::new();
        assert!(matches!(
            curve_from_json(r#"{"coefficients":[]}"#, &ctx),
            Err(QrtError::Invalid(_))
        ));
        let zero = r#"{"coefficients":[["0","0","0"],["0","0","0"],["0","0","0"]]}"#;
        assert_eq!(curve_from_json(zero, &ctx), Err(QrtError::ZeroCurve));
        let bad = r#"{"coefficients":[["0","0","1+"],["0","0","0"],["0","0","1"]]}"#;
        let err = curve_from_json(bad, &ctx).unwrap_err().to_string();
        assert!(
            err.contains("coefficients[0][2]") && err.contains("position 2"),
            "{err}"
        );
    }
}
