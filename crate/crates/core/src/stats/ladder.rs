use serde::{Deserialize, Serialize};

use super::ols::{ols_regress, CovariateTable, RegressionResult, RegressionSpec};
use super::vars::*;
use crate::corpus::Field;
use crate::error::{Error, Result};
use crate::profile::PairProfile;

/// The ten nested control sets, from distance only to the full model with
/// the collaboration count split into early and later years.
pub fn default_ladder() -> Vec<RegressionSpec> {
    let base = [AVE_DISTANCE, AVE_DISTANCE_SQ];
    let controls = [
        CAREER_LEN_MTE,
        MTE_WORK_COUNT_FIRST_5Y,
        MENTOR_CITATION_IMPACT,
        TOPIC_NUM_MTO,
        COLLA_WORK_COUNT,
        COMMON_COLLABORATORS_COUNT,
    ];
    let mut specs = vec![RegressionSpec::new(1, CUMULATIVE_IMPACT, &[AVE_DISTANCE])];
    for i in 0..=controls.len() {
        let mut regs = base.to_vec();
        regs.extend_from_slice(&controls[..i]);
        specs.push(RegressionSpec::new(2 + i as u32, CUMULATIVE_IMPACT, &regs));
    }
    let mut split = base.to_vec();
    split.extend_from_slice(&controls[..4]);
    split.extend_from_slice(&[COLLA_WORK_COUNT_FIRST_5Y, COLLA_WORK_COUNT_LATER]);
    specs.push(RegressionSpec::new(9, CUMULATIVE_IMPACT, &split));
    split.push(COMMON_COLLABORATORS_COUNT);
    specs.push(RegressionSpec::new(10, CUMULATIVE_IMPACT, &split));
    specs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderOptions {
    /// Model ids to run, in order; empty runs the whole ladder.
    pub models: Vec<u32>,
    /// Regress `ln(1 + impact)` instead of the raw impact.
    pub log1p_outcome: bool,
    /// Keep only mentees with careers of at least 30 years.
    pub require_career_30y: bool,
}

impl Default for LadderOptions {
    fn default() -> Self {
        Self {
            models: Vec::new(),
            log1p_outcome: false,
            require_career_30y: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderResult {
    pub field: Option<Field>,
    /// Profiles left after the field and career filters.
    pub n_cohort: usize,
    pub results: Vec<RegressionResult>,
}

/// Regression variables of each profile, one row per profile.
pub fn covariate_table(profiles: &[&PairProfile], log1p_outcome: bool) -> CovariateTable {
    let col = |f: &dyn Fn(&PairProfile) -> Option<f64>| profiles.iter().map(|p| f(p)).collect::<Vec<_>>();
    let mut t = CovariateTable::new(profiles.len());
    t.insert(
        CUMULATIVE_IMPACT,
        col(&|p| p.mentee_total_impact.map(|v| if log1p_outcome { v.ln_1p() } else { v })),
    );
    t.insert(AVE_DISTANCE, col(&|p| p.ave_distance));
    t.insert(AVE_DISTANCE_SQ, col(&|p| p.ave_distance.map(|d| d * d)));
    t.insert(CAREER_LEN_MTE, col(&|p| p.covariates.career_len_mte));
    t.insert(MTE_WORK_COUNT_FIRST_5Y, col(&|p| p.covariates.mte_work_count_first_5y));
    t.insert(MENTOR_CITATION_IMPACT, col(&|p| p.covariates.mentor_citation_impact));
    t.insert(TOPIC_NUM_MTO, col(&|p| p.covariates.topic_num_mto));
    t.insert(COLLA_WORK_COUNT, col(&|p| p.covariates.colla_work_count));
    t.insert(COLLA_WORK_COUNT_FIRST_5Y, col(&|p| p.covariates.colla_work_count_first_5y));
    t.insert(COLLA_WORK_COUNT_LATER, col(&|p| p.covariates.colla_work_count_later));
    t.insert(COMMON_COLLABORATORS_COUNT, col(&|p| p.covariates.common_collaborators_count));
    t
}

/// Runs the selected models on one cohort, every model on the same rows:
/// those complete for the union of all selected models' variables.
pub fn model_ladder(
    profiles: &[PairProfile],
    field: Option<Field>,
    options: &LadderOptions,
) -> Result<LadderResult> {
    let ladder = default_ladder();
    let specs: Vec<&RegressionSpec> = if options.models.is_empty() {
        ladder.iter().collect()
    } else {
        options
            .models
            .iter()
            .map(|id| {
                ladder
                    .iter()
                    .find(|s| s.model_id == *id)
                    .ok_or_else(|| Error::InvalidSpec(format!("no model {id} in the ladder")))
            })
            .collect::<Result<_>>()?
    };

    let cohort: Vec<&PairProfile> = profiles
        .iter()
        .filter(|p| field.is_none_or(|f| p.field == f))
        .filter(|p| !options.require_career_30y || p.mentee_flags.is_some_and(|f| f.career_30y))
        .collect();
    if cohort.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let table = covariate_table(&cohort, options.log1p_outcome);

    let mut names = vec![CUMULATIVE_IMPACT];
    for s in &specs {
        for r in &s.regressors {
            if !names.contains(&r.as_str()) {
                names.push(r);
            }
        }
    }
    let rows = table.complete_rows(&names)?;
    let shared = table.restrict(&rows);
    let results = specs
        .iter()
        .map(|spec| {
            let mut r = ols_regress(spec, &shared)?;
            r.n_dropped = cohort.len() - rows.len();
            Ok(r)
        })
        .collect::<Result<_>>()?;
    Ok(LadderResult {
        field,
        n_cohort: cohort.len(),
        results,
    })
}
