//! Cohort-level statistics: distributions, comparisons and regressions.

mod curve;
mod distribution;
mod ladder;
mod ols;

pub use curve::{binned_curve_with_quadratic_fit, BinPoint, CurveFit, QuadraticFit};
pub use distribution::{ccdf, quadrant, quadrant_of, ternary_coordinates, Quadrant};
pub use ladder::{default_ladder, model_ladder, LadderOptions, LadderResult};
pub use ols::{
    ols_fit, ols_regress, significance_stars, Coefficient, CovariateTable, RegressionResult,
    RegressionSpec, INTERCEPT,
};

/// Column names of the regression covariate table.
pub mod vars {
    pub const CUMULATIVE_IMPACT: &str = "cumulative_impact";
    pub const AVE_DISTANCE: &str = "ave_distance";
    pub const AVE_DISTANCE_SQ: &str = "ave_distance_sq";
    pub const CAREER_LEN_MTE: &str = "career_len_mte";
    pub const MTE_WORK_COUNT_FIRST_5Y: &str = "mte_work_count_first_5y";
    pub const MENTOR_CITATION_IMPACT: &str = "mentor_citation_impact";
    pub const TOPIC_NUM_MTO: &str = "topic_num_mto";
    pub const COLLA_WORK_COUNT: &str = "colla_work_count";
    pub const COLLA_WORK_COUNT_FIRST_5Y: &str = "colla_work_count_first_5y";
    pub const COLLA_WORK_COUNT_LATER: &str = "colla_work_count_later";
    pub const COMMON_COLLABORATORS_COUNT: &str = "common_collaborators_count";
}
