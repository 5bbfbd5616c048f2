//! Convex constraint sets with Euclidean and tangent-cone projections.
//!
//! Every dynamic in this crate evolves inside a nonempty closed convex
//! set; this module owns all of the projection geometry. Four shapes are
//! supported: interval boxes, origin-centered balls, coordinate
//! subspaces, and the full space. Boxes may have infinite endpoints, so
//! an unbounded box doubles as all of ℝⁿ.

use nalgebra::DVector;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Distance tolerance for "point belongs to the set" preconditions.
///
/// Projected-Euler iterates drift off a set boundary by rounding; a hard
/// zero tolerance would spuriously reject them.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Tolerance for detecting an active interval bound or ball boundary.
pub const ACTIVE_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SetError {
    #[error("dimension mismatch: set has dimension {expected}, vector has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside the set (distance {distance:.3e} exceeds tolerance)")]
    NotInSet { distance: f64 },
    #[error("interval has lo {lo} > hi {hi}")]
    EmptyInterval { lo: f64, hi: f64 },
    #[error("ball radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("subspace free index {index} out of range for dimension {dim}")]
    FreeIndexOutOfRange { index: usize, dim: usize },
}

/// A closed interval of the extended real line, `lo ≤ hi`, with infinite
/// endpoints allowed. The degenerate case `lo == hi` is representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarInterval {
    lo: f64,
    hi: f64,
}

impl ScalarInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, SetError> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(SetError::EmptyInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// The whole real line.
    pub fn unbounded() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn at_lower(&self, x: f64) -> bool {
        self.lo.is_finite() && (x - self.lo).abs() <= ACTIVE_TOL
    }

    fn at_upper(&self, x: f64) -> bool {
        self.hi.is_finite() && (x - self.hi).abs() <= ACTIVE_TOL
    }
}

impl Serialize for ScalarInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let encode = |v: f64| -> serde_json::Value {
            if v == f64::NEG_INFINITY {
                serde_json::Value::String("-inf".into())
            } else if v == f64::INFINITY {
                serde_json::Value::String("inf".into())
            } else {
                serde_json::json!(v)
            }
        };
        vec![encode(self.lo), encode(self.hi)].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ScalarInterval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(deserializer)?;
        if raw.len() != 2 {
            return Err(D::Error::custom("interval must be a [lo, hi] pair"));
        }
        let decode = |v: &serde_json::Value| -> Result<f64, D::Error> {
            match v {
                serde_json::Value::Number(n) => n
                    .as_f64()
                    .ok_or_else(|| D::Error::custom("non-finite interval endpoint")),
                serde_json::Value::String(s) if s == "inf" => Ok(f64::INFINITY),
                serde_json::Value::String(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(D::Error::custom(format!(
                    "interval endpoint must be a number or \"inf\"/\"-inf\", got {other}"
                ))),
            }
        };
        ScalarInterval::new(decode(&raw[0])?, decode(&raw[1])?)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// A nonempty, closed, convex constraint set in ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintSet {
    /// Product of per-coordinate intervals.
    Box { intervals: Vec<ScalarInterval> },
    /// Origin-centered Euclidean ball of positive radius.
    Ball {
        radius: f64,
        #[serde(skip)]
        dim: usize,
    },
    /// Coordinates in `free` range over ℝ; all others are pinned to zero.
    Subspace {
        free: Vec<usize>,
        #[serde(skip)]
        dim: usize,
    },
    /// All of ℝⁿ.
    Full { dim: usize },
}

impl ConstraintSet {
    pub fn new_box(intervals: Vec<ScalarInterval>) -> Self {
        ConstraintSet::Box { intervals }
    }

    /// Box `[lo, hi]ⁿ` with the same interval in every coordinate.
    pub fn uniform_box(lo: f64, hi: f64, dim: usize) -> Result<Self, SetError> {
        let iv = ScalarInterval::new(lo, hi)?;
        Ok(ConstraintSet::Box {
            intervals: vec![iv; dim],
        })
    }

    pub fn new_ball(radius: f64, dim: usize) -> Result<Self, SetError> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(SetError::NonPositiveRadius(radius));
        }
        Ok(ConstraintSet::Ball { radius, dim })
    }

    pub fn new_subspace(free: Vec<usize>, dim: usize) -> Result<Self, SetError> {
        let mut free = free;
        free.sort_unstable();
        free.dedup();
        if let Some(&bad) = free.iter().find(|&&i| i >= dim) {
            return Err(SetError::FreeIndexOutOfRange { index: bad, dim });
        }
        Ok(ConstraintSet::Subspace { free, dim })
    }

    pub fn full(dim: usize) -> Self {
        ConstraintSet::Full { dim }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConstraintSet::Box { intervals } => intervals.len(),
            ConstraintSet::Ball { dim, .. }
            | ConstraintSet::Subspace { dim, .. }
            | ConstraintSet::Full { dim } => *dim,
        }
    }

    /// True when the set is all of ℝⁿ: the `Full` variant, a box whose
    /// intervals are all unbounded, or a subspace with every coordinate
    /// free.
    pub fn is_all_of_rn(&self) -> bool {
        match self {
            ConstraintSet::Full { .. } => true,
            ConstraintSet::Box { intervals } => intervals
                .iter()
                .all(|iv| iv.lo == f64::NEG_INFINITY && iv.hi == f64::INFINITY),
            ConstraintSet::Subspace { free, dim } => free.len() == *dim,
            ConstraintSet::Ball { .. } => false,
        }
    }

    /// True when the set contains the origin exactly.
    pub fn contains_origin(&self) -> bool {
        match self {
            ConstraintSet::Box { intervals } => intervals.iter().all(|iv| iv.contains(0.0)),
            // Balls/subspaces/full space contain the origin by construction.
            _ => true,
        }
    }

    fn check_dim(&self, z: &DVector<f64>) -> Result<(), SetError> {
        if z.len() != self.dim() {
            return Err(SetError::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        Ok(())
    }

    fn check_membership(&self, x: &DVector<f64>) -> Result<(), SetError> {
        let distance = (x - self.project(x)?).norm();
        if distance > MEMBERSHIP_TOL {
            return Err(SetError::NotInSet { distance });
        }
        Ok(())
    }

    /// Euclidean projection of `z` onto the set: the unique minimizer of
    /// `‖y − z‖` over the set.
    pub fn project(&self, z: &DVector<f64>) -> Result<DVector<f64>, SetError> {
        self.check_dim(z)?;
        Ok(match self {
            ConstraintSet::Box { intervals } => {
                DVector::from_iterator(z.len(), z.iter().zip(intervals).map(|(&v, iv)| iv.clamp(v)))
            }
            ConstraintSet::Ball { radius, .. } => {
                let norm = z.norm();
                if norm <= *radius {
                    z.clone()
                } else {
                    z * (*radius / norm)
                }
            }
            ConstraintSet::Subspace { free, .. } => {
                let mut out = DVector::zeros(z.len());
                for &i in free {
                    out[i] = z[i];
                }
                out
            }
            ConstraintSet::Full { .. } => z.clone(),
        })
    }

    /// Projection of `v` onto the tangent cone of the set at `x`.
    ///
    /// `x` must belong to the set within [`MEMBERSHIP_TOL`].
    pub fn project_tangent(
        &self,
        x: &DVector<f64>,
        v: &DVector<f64>,
    ) -> Result<DVector<f64>, SetError> {
        self.check_dim(x)?;
        self.check_dim(v)?;
        self.check_membership(x)?;
        Ok(match self {
            ConstraintSet::Box { intervals } => DVector::from_iterator(
                v.len(),
                v.iter()
                    .zip(x.iter())
                    .zip(intervals)
                    .map(|((&vi, &xi), iv)| {
                        let blocked_below = iv.at_lower(xi) && vi < 0.0;
                        let blocked_above = iv.at_upper(xi) && vi > 0.0;
                        if blocked_below || blocked_above {
                            0.0
                        } else {
                            vi
                        }
                    }),
            ),
            ConstraintSet::Ball { radius, .. } => {
                let norm = x.norm();
                if norm < radius - ACTIVE_TOL {
                    v.clone()
                } else {
                    // On the boundary the tangent cone is the halfspace
                    // { v : v·x ≤ 0 }; drop the positive radial part.
                    let unit = x / norm;
                    let radial = v.dot(&unit);
                    if radial > 0.0 {
                        v - unit * radial
                    } else {
                        v.clone()
                    }
                }
            }
            ConstraintSet::Subspace { free, .. } => {
                let mut out = DVector::zeros(v.len());
                for &i in free {
                    out[i] = v[i];
                }
                out
            }
            ConstraintSet::Full { .. } => v.clone(),
        })
    }

    /// Moreau decomposition of `z` at `x` into a tangent-cone part and a
    /// normal-cone part with `tangent + normal == z` and
    /// `tangent ⟂ normal`.
    pub fn decompose_moreau(
        &self,
        x: &DVector<f64>,
        z: &DVector<f64>,
    ) -> Result<(DVector<f64>, DVector<f64>), SetError> {
        let tangent = self.project_tangent(x, z)?;
        let normal = z - &tangent;
        Ok((tangent, normal))
    }

    /// True iff the distance from `z` to the set is at most `tol`.
    pub fn contains(&self, z: &DVector<f64>, tol: f64) -> Result<bool, SetError> {
        let projected = self.project(z)?;
        Ok((z - projected).norm() <= tol)
    }

    /// Re-binds the ambient dimension after deserialization.
    ///
    /// The file schema omits the dimension for balls and subspaces (it
    /// is implied by the scenario's player count); this validates the
    /// set against that count and fills the missing dimension in.
    pub fn with_dim(self, dim: usize) -> Result<Self, SetError> {
        match self {
            ConstraintSet::Box { intervals } => {
                if intervals.len() != dim {
                    return Err(SetError::DimensionMismatch {
                        expected: dim,
                        got: intervals.len(),
                    });
                }
                Ok(ConstraintSet::Box { intervals })
            }
            ConstraintSet::Ball { radius, .. } => ConstraintSet::new_ball(radius, dim),
            ConstraintSet::Subspace { free, .. } => ConstraintSet::new_subspace(free, dim),
            ConstraintSet::Full { dim: d } => {
                if d != dim {
                    return Err(SetError::DimensionMismatch {
                        expected: dim,
                        got: d,
                    });
                }
                Ok(ConstraintSet::Full { dim })
            }
        }
    }
}
