//! JSON form of curves. Only the concrete classes serialize; lazily composed
//! curves are rejected.

use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Curve, ExpPolyCurve, ExpTerm, Extrapolation, GridCurve, MatExpCurve, RationalCurve, DEFAULT_VALIDITY};
use crate::linalg::SquareMatrix;

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeffs: Vec<f64>,
    mu: f64,
}

fn default_validity() -> f64 {
    DEFAULT_VALIDITY
}

fn default_extrapolation() -> Extrapolation {
    Extrapolation::Constant
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum CurveJson {
    #[serde(rename = "exppoly")]
    ExpPoly { terms: Vec<TermJson> },
    Grid {
        knots: Vec<f64>,
        values: Vec<f64>,
        #[serde(default = "default_extrapolation")]
        extrapolation: Extrapolation,
    },
    Rational {
        numerator: Box<Curve>,
        denominator: Box<Curve>,
        #[serde(default = "default_validity")]
        validity: f64,
    },
    #[serde(rename = "matexp")]
    MatExp {
        #[serde(default)]
        offset: f64,
        left: Vec<f64>,
        generator: SquareMatrix,
        right: Vec<f64>,
    },
}

impl Serialize for Curve {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let json = match self {
            Curve::ExpPoly(p) => CurveJson::ExpPoly {
                terms: p
                    .terms()
                    .iter()
                    .map(|t| TermJson {
                        coeffs: t.coeffs.clone(),
                        mu: t.mu,
                    })
                    .collect(),
            },
            Curve::Grid(g) => {
                if g.derivative_order() != 0 {
                    return Err(S::Error::custom("differentiated grid curves are not serializable"));
                }
                CurveJson::Grid {
                    knots: g.knots().to_vec(),
                    values: g.values().to_vec(),
                    extrapolation: g.extrapolation(),
                }
            }
            Curve::Rational(r) => CurveJson::Rational {
                numerator: Box::new(r.numerator().clone()),
                denominator: Box::new(r.denominator().clone()),
                validity: r.validity(),
            },
            Curve::MatExp(m) => CurveJson::MatExp {
                offset: m.offset(),
                left: m.left().to_vec(),
                generator: m.generator().clone(),
                right: m.right().to_vec(),
            },
            Curve::Lazy(_) => {
                return Err(S::Error::custom("composed curves have no JSON form"));
            }
        };
        json.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Curve {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = CurveJson::deserialize(deserializer)?;
        let curve = match json {
            CurveJson::ExpPoly { terms } => {
                ExpPolyCurve::new(terms.into_iter().map(|t| ExpTerm::new(t.coeffs, t.mu)).collect()).map(Curve::from)
            }
            CurveJson::Grid {
                knots,
                values,
                extrapolation,
            } => GridCurve::new(knots, values, extrapolation).map(Curve::from),
            CurveJson::Rational {
                numerator,
                denominator,
                validity,
            } => RationalCurve::new(*numerator, *denominator, validity).map(Curve::from),
            CurveJson::MatExp {
                offset,
                left,
                generator,
                right,
            } => MatExpCurve::new(offset, left, generator, right).map(Curve::from),
        };
        curve.map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(c: &Curve) -> Curve {
        let s = serde_json::to_string(c).unwrap();
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn exppoly_roundtrip_is_lossless() {
        let c: Curve = serde_json::from_str(
            r#"{"type":"exppoly","terms":[{"coeffs":[0.1,-0.30000000000000004],"mu":-0.7},{"coeffs":[1.0],"mu":0.0}]}"#,
        )
        .unwrap();
        assert_eq!(roundtrip(&c), c);
        assert_eq!(c.eval(0.0).unwrap(), 1.1);
    }

    #[test]
    fn grid_and_rational_roundtrip() {
        let g: Curve = serde_json::from_str(
            r#"{"type":"grid","knots":[0,1,2],"values":[0.01,0.02,0.025],"extrapolation":{"exponential_decay":0.1}}"#,
        )
        .unwrap();
        assert_eq!(roundtrip(&g), g);
        let r: Curve = serde_json::from_str(
            r#"{"type":"rational","numerator":{"type":"exppoly","terms":[{"coeffs":[0.5],"mu":-1}]},
                "denominator":{"type":"exppoly","terms":[{"coeffs":[0.5],"mu":-1},{"coeffs":[1],"mu":0}]}}"#,
        )
        .unwrap();
        assert_eq!(roundtrip(&r), r);
        assert!((r.eval(0.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(serde_json::from_str::<Curve>(r#"{"type":"spline"}"#).is_err());
        assert!(serde_json::from_str::<Curve>(r#"{"type":"grid","knots":[1,0],"values":[0,0]}"#).is_err());
        let lazy = Curve::exponential(1.0, -1.0).exp();
        assert!(serde_json::to_string(&lazy).is_err());
    }
}
