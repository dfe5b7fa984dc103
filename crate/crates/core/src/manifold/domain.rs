//! Open state domains U ⊂ ℝ^d: boxes with optional infinite sides, cut by
//! optional half-spaces.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// {z : ⟨normal, z⟩ < offset}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Open box Π(lowerᵢ, upperᵢ) intersected with half-spaces. `None` bounds
/// are infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainJson")]
pub struct StateDomain {
    lower: Vec<Option<f64>>,
    upper: Vec<Option<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    halfspaces: Vec<HalfSpace>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainJson {
    lower: Vec<Option<f64>>,
    upper: Vec<Option<f64>>,
    #[serde(default)]
    halfspaces: Vec<HalfSpace>,
}

impl TryFrom<DomainJson> for StateDomain {
    type Error = Error;

    fn try_from(j: DomainJson) -> Result<Self> {
        StateDomain::new(j.lower, j.upper, j.halfspaces)
    }
}

impl StateDomain {
    pub fn new(lower: Vec<Option<f64>>, upper: Vec<Option<f64>>, halfspaces: Vec<HalfSpace>) -> Result<Self> {
        StateDomain {
            lower,
            upper,
            halfspaces,
        }
        .validated()
    }

    /// The finite open box Π(loᵢ, hiᵢ).
    pub fn open_box(lower: &[f64], upper: &[f64]) -> Result<Self> {
        Self::new(
            lower.iter().map(|&v| Some(v)).collect(),
            upper.iter().map(|&v| Some(v)).collect(),
            Vec::new(),
        )
    }

    /// A one-dimensional interval (lo, hi) with optional infinite ends.
    pub fn interval(lo: Option<f64>, hi: Option<f64>) -> Result<Self> {
        Self::new(vec![lo], vec![hi], Vec::new())
    }

    /// ℝ^d.
    pub fn unbounded(d: usize) -> Self {
        StateDomain {
            lower: vec![None; d],
            upper: vec![None; d],
            halfspaces: Vec::new(),
        }
    }

    pub fn validated(self) -> Result<Self> {
        let d = self.lower.len();
        if d == 0 || self.upper.len() != d {
            return Err(Error::invalid("domain bounds must be non-empty and of equal length"));
        }
        for (lo, hi) in self.lower.iter().zip(&self.upper) {
            if lo.is_some_and(|v| !v.is_finite()) || hi.is_some_and(|v| !v.is_finite()) {
                return Err(Error::invalid(
                    "finite domain bounds must be finite numbers; use null for infinity",
                ));
            }
            if let (Some(l), Some(h)) = (lo, hi) {
                if !(l < h) {
                    return Err(Error::invalid(format!("empty domain interval ({l}, {h})")));
                }
            }
        }
        for hs in &self.halfspaces {
            if hs.normal.len() != d || hs.normal.iter().chain([&hs.offset]).any(|v| !v.is_finite()) {
                return Err(Error::invalid("half-space normals must have the domain dimension"));
            }
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[Option<f64>] {
        &self.lower
    }

    pub fn upper(&self) -> &[Option<f64>] {
        &self.upper
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        z.len() == self.dim()
            && z.iter().all(|v| v.is_finite())
            && z.iter()
                .enumerate()
                .all(|(i, &v)| self.lower[i].is_none_or(|l| v > l) && self.upper[i].is_none_or(|h| v < h))
            && self
                .halfspaces
                .iter()
                .all(|hs| hs.normal.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() < hs.offset)
    }

    /// Domain error unless z ∈ U.
    pub fn check(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::domain(format!(
                "state has dimension {}, domain has {}",
                z.len(),
                self.dim()
            )));
        }
        if !self.contains(z) {
            return Err(Error::domain(format!("state {z:?} lies outside the domain")));
        }
        Ok(())
    }

    /// Whether `inner` ⊂ this box with every face strictly inside.
    pub fn strictly_contains_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        if lo.len() != self.dim() || hi.len() != self.dim() {
            return false;
        }
        (0..self.dim()).all(|i| self.lower[i].is_none_or(|l| lo[i] > l) && self.upper[i].is_none_or(|h| hi[i] < h))
    }

    /// Uniform draws from the box part, restricted to `window` around the
    /// finite bounds: an infinite side is replaced by the finite one shifted
    /// by `window` (or ±window when both are infinite). Draws outside the
    /// half-spaces are rejected and redrawn.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize, window: f64) -> Vec<Vec<f64>> {
        let bounds: Vec<(f64, f64)> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| match (lo, hi) {
                (Some(l), Some(h)) => (*l, *h),
                (Some(l), None) => (*l, l + window),
                (None, Some(h)) => (h - window, *h),
                (None, None) => (-window, window),
            })
            .collect();
        let mut out = Vec::with_capacity(n);
        let mut attempts = 0usize;
        while out.len() < n && attempts < 1000 * n.max(1) {
            attempts += 1;
            let z: Vec<f64> = bounds
                .iter()
                .map(|&(l, h)| {
                    // open interval: keep away from the faces
                    let t: f64 = rng.random_range(0.01..0.99);
                    l + t * (h - l)
                })
                .collect();
            if self.contains(&z) {
                out.push(z);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn membership_is_strict() {
        let u = StateDomain::interval(Some(0.0), Some(10.0)).unwrap();
        assert!(u.contains(&[0.5]));
        assert!(!u.contains(&[0.0]));
        assert!(!u.contains(&[10.0]));
        let half = StateDomain::interval(None, Some(0.0)).unwrap();
        assert!(half.contains(&[-1e6]));
        assert!(half.check(&[0.0]).is_err());
    }

    #[test]
    fn halfspaces_cut_the_box() {
        let u = StateDomain::new(
            vec![Some(0.0), Some(0.0)],
            vec![None, None],
            vec![HalfSpace {
                normal: vec![1.0, 1.0],
                offset: 1.0,
            }],
        )
        .unwrap();
        assert!(u.contains(&[0.2, 0.2]));
        assert!(!u.contains(&[0.6, 0.6]));
    }

    #[test]
    fn rejects_empty_or_malformed() {
        assert!(StateDomain::interval(Some(1.0), Some(1.0)).is_err());
        assert!(StateDomain::new(vec![Some(0.0)], vec![], vec![]).is_err());
        assert!(StateDomain::interval(Some(f64::NAN), None).is_err());
    }

    #[test]
    fn samples_are_inside() {
        let u = StateDomain::new(vec![None, Some(-1.0)], vec![Some(0.0), Some(1.0)], vec![]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let zs = u.sample(&mut rng, 50, 2.0);
        assert_eq!(zs.len(), 50);
        assert!(zs.iter().all(|z| u.contains(z) && z[0] > -2.0));
    }

    #[test]
    fn json_uses_null_for_infinite_bounds() {
        let u = StateDomain::interval(None, Some(0.0)).unwrap();
        let s = serde_json::to_string(&u).unwrap();
        assert_eq!(s, r#"{"lower":[null],"upper":[0.0]}"#);
        let back: StateDomain = serde_json::from_str(&s).unwrap();
        assert_eq!(back, u);
        assert!(serde_json::from_str::<StateDomain>(r#"{"lower":[1.0],"upper":[0.0]}"#).is_err());
    }
}
