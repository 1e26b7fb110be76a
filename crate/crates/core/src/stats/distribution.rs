use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::PairProfile;
use crate::topics::{normalize, TypeImpacts};

/// Empirical `P(X > x)` at every distinct value, in increasing `x`.
///
/// Left of the smallest value the function is 1; at the largest it is 0.
pub fn ccdf(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let x = sorted[i];
        let mut j = i;
        while j < n && sorted[j] == x {
            j += 1;
        }
        out.push((x, (n - j) as f64 / n as f64));
        i = j;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quadrant {
    /// Mentee ahead in both primary and secondary topics.
    Q1,
    /// Ahead in secondary only.
    Q2,
    /// Ahead in neither.
    Q3,
    /// Ahead in primary only.
    Q4,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::Q1, Quadrant::Q2, Quadrant::Q3, Quadrant::Q4];

    pub fn as_str(self) -> &'static str {
        match self {
            Quadrant::Q1 => "Q1",
            Quadrant::Q2 => "Q2",
            Quadrant::Q3 => "Q3",
            Quadrant::Q4 => "Q4",
        }
    }
}

/// Quadrant of the (mentee − mentor) differences in primary and secondary
/// impact. A zero difference counts as not exceeding.
pub fn quadrant_of(mentee: &TypeImpacts, mentor: &TypeImpacts) -> Quadrant {
    let dp = mentee.primary - mentor.primary;
    let ds = mentee.secondary - mentor.secondary;
    match (dp > 0.0, ds > 0.0) {
        (true, true) => Quadrant::Q1,
        (false, true) => Quadrant::Q2,
        (false, false) => Quadrant::Q3,
        (true, false) => Quadrant::Q4,
    }
}

pub fn quadrant(profile: &PairProfile) -> Result<Quadrant> {
    match (&profile.mentee_impacts, &profile.mentor_impacts) {
        (Some(e), Some(r)) => Ok(quadrant_of(e, r)),
        _ => Err(Error::MissingImpacts),
    }
}

/// Barycentric (primary, secondary, new) shares of the mentee's impact.
pub fn ternary_coordinates(mentee: &TypeImpacts) -> Result<(f64, f64, f64)> {
    let t = normalize(*mentee)?;
    Ok((t.primary, t.secondary, t.new))
}
