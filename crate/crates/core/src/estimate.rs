//! Population-proportion estimators for a chain-referral sample.
//!
//! All estimators drop seeds and work from reported quantities only:
//!
//! * `sample_proportion`: raw share of group A among non-seeds;
//! * `rdsi`: the recruitment-matrix estimator
//!   `P_A = s_BA·D_B / (s_AB·D_A + s_BA·D_B)` with the observed matrix `S`;
//! * `rdsii`: inverse-degree weighting `Σ_A 1/d / Σ 1/d`;
//! * `rdsi_ego`: the same formula as `rdsi` with `S` replaced by the
//!   ego-network estimate `ŝ_XY = (1/n_X) Σ_{i∈X} n_i^Y / d_i`.
//!
//! `D_X` is the harmonic-mean degree estimate `n_X / Σ_{i∈X} 1/d_i`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netcore::Group;
pub use crate::netcore::RecruitmentMatrix;
use crate::rdssim::{RdsSample, Respondent};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum EstimateError {
    #[error("sample has no non-seed respondents")]
    EmptySample,
    #[error("no non-seed respondents in group {0}")]
    EmptyGroup(Group),
    #[error("no recruitments between non-seed respondents")]
    NoRecruitments,
    #[error("recruitment matrix row for group {0} is undefined")]
    UndefinedRow(Group),
    #[error("no cross-group links in the recruitment matrix; estimate undefined")]
    NoCrossRecruitment,
}

/// The reported data one respondent contributes to the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EgoRecord {
    pub group: Group,
    pub degree: f64,
    pub n_a: f64,
    pub n_b: f64,
}

impl From<&Respondent> for EgoRecord {
    fn from(r: &Respondent) -> Self {
        EgoRecord {
            group: r.true_group,
            degree: r.reported_degree as f64,
            n_a: r.reported_n_a as f64,
            n_b: r.reported_n_b as f64,
        }
    }
}

/// Running sums from which every degree-weighted estimator is computed.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub count: [usize; 2],
    pub inverse_degree: [f64; 2],
    /// `ego[x][y] = Σ_{i∈x} n_i^y / d_i`
    pub ego: [[f64; 2]; 2],
}

impl Tally {
    pub fn push(&mut self, r: &EgoRecord) {
        let x = r.group.index();
        self.count[x] += 1;
        self.inverse_degree[x] += 1.0 / r.degree;
        self.ego[x][0] += r.n_a / r.degree;
        self.ego[x][1] += r.n_b / r.degree;
    }

    pub fn total(&self) -> usize {
        self.count[0] + self.count[1]
    }

    pub fn sample_proportion(&self) -> Result<f64, EstimateError> {
        match self.total() {
            0 => Err(EstimateError::EmptySample),
            n => Ok(self.count[0] as f64 / n as f64),
        }
    }

    pub fn mean_degree(&self, g: Group) -> Result<f64, EstimateError> {
        let x = g.index();
        if self.count[x] == 0 {
            return Err(EstimateError::EmptyGroup(g));
        }
        Ok(self.count[x] as f64 / self.inverse_degree[x])
    }

    pub fn rdsii(&self) -> Result<f64, EstimateError> {
        if self.total() == 0 {
            return Err(EstimateError::EmptySample);
        }
        Ok(self.inverse_degree[0] / (self.inverse_degree[0] + self.inverse_degree[1]))
    }

    pub fn ego_matrix(&self) -> RecruitmentMatrix {
        let row = |x: usize| {
            (self.count[x] > 0).then(|| {
                let n = self.count[x] as f64;
                [self.ego[x][0] / n, self.ego[x][1] / n]
            })
        };
        RecruitmentMatrix { rows: [row(0), row(1)] }
    }

    /// The recruitment-matrix estimator with the given matrix. A sample with
    /// only one group maps to 1 (all A) or 0 (all B).
    pub fn rdsi_with(&self, matrix: &RecruitmentMatrix) -> Result<f64, EstimateError> {
        match self.count {
            [0, 0] => return Err(EstimateError::EmptySample),
            [_, 0] => return Ok(1.0),
            [0, _] => return Ok(0.0),
            _ => {}
        }
        let s_ab = matrix.s_ab().ok_or(EstimateError::UndefinedRow(Group::A))?;
        let s_ba = matrix.s_ba().ok_or(EstimateError::UndefinedRow(Group::B))?;
        if s_ab == 0.0 && s_ba == 0.0 {
            return Err(EstimateError::NoCrossRecruitment);
        }
        let d_a = self.mean_degree(Group::A)?;
        let d_b = self.mean_degree(Group::B)?;
        Ok(s_ba * d_b / (s_ab * d_a + s_ba * d_b))
    }

    pub fn rdsi_ego(&self) -> Result<f64, EstimateError> {
        self.rdsi_with(&self.ego_matrix())
    }
}

impl<'a> FromIterator<&'a EgoRecord> for Tally {
    fn from_iter<I: IntoIterator<Item = &'a EgoRecord>>(iter: I) -> Self {
        let mut t = Tally::default();
        iter.into_iter().for_each(|r| t.push(r));
        t
    }
}

fn tally(sample: &RdsSample) -> Tally {
    let mut t = Tally::default();
    for r in sample.non_seeds() {
        t.push(&EgoRecord::from(r));
    }
    t
}

/// Recruitment counts `[from][to]` between non-seed respondents.
pub fn recruitment_counts(sample: &RdsSample) -> [[f64; 2]; 2] {
    let mut counts = [[0.0; 2]; 2];
    for r in sample.non_seeds() {
        let Some(p) = r.recruiter_index else { continue };
        let recruiter = &sample.respondents[p];
        if recruiter.is_seed {
            continue;
        }
        counts[recruiter.true_group.index()][r.true_group.index()] += 1.0;
    }
    counts
}

pub fn sample_proportion(sample: &RdsSample) -> Result<f64, EstimateError> {
    tally(sample).sample_proportion()
}

/// Observed recruitment proportions. Recruitments made by seeds are left out.
pub fn observed_matrix(sample: &RdsSample) -> Result<RecruitmentMatrix, EstimateError> {
    let counts = recruitment_counts(sample);
    if counts.iter().flatten().all(|&c| c == 0.0) {
        return Err(EstimateError::NoRecruitments);
    }
    Ok(RecruitmentMatrix::from_counts(counts))
}

pub fn mean_degree_estimate(sample: &RdsSample, group: Group) -> Result<f64, EstimateError> {
    tally(sample).mean_degree(group)
}

pub fn rdsi(sample: &RdsSample) -> Result<f64, EstimateError> {
    let t = tally(sample);
    // boundary conventions take precedence over a missing matrix
    if t.count[0] == 0 || t.count[1] == 0 {
        return t.rdsi_with(&RecruitmentMatrix { rows: [None, None] });
    }
    t.rdsi_with(&observed_matrix(sample)?)
}

pub fn rdsii(sample: &RdsSample) -> Result<f64, EstimateError> {
    tally(sample).rdsii()
}

pub fn ego_matrix(sample: &RdsSample) -> Result<RecruitmentMatrix, EstimateError> {
    let t = tally(sample);
    if t.total() == 0 {
        return Err(EstimateError::EmptySample);
    }
    Ok(t.ego_matrix())
}

pub fn rdsi_ego(sample: &RdsSample) -> Result<f64, EstimateError> {
    tally(sample).rdsi_ego()
}

/// Every point estimate for one sample. `None` marks an undefined value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSet {
    pub n_respondents: usize,
    pub n_non_seeds: usize,
    pub sample_proportion: Option<f64>,
    pub rdsi: Option<f64>,
    pub rdsii: Option<f64>,
    pub rdsi_ego: Option<f64>,
    pub s_observed: Option<RecruitmentMatrix>,
    pub s_ego: Option<RecruitmentMatrix>,
    pub dbar_a: Option<f64>,
    pub dbar_b: Option<f64>,
}

impl EstimateSet {
    pub fn s_ab(&self) -> Option<f64> {
        self.s_observed.and_then(|m| m.s_ab())
    }

    pub fn s_ego_ab(&self) -> Option<f64> {
        self.s_ego.and_then(|m| m.s_ab())
    }
}

pub fn estimate_all(sample: &RdsSample) -> EstimateSet {
    let t = tally(sample);
    let observed = observed_matrix(sample).ok();
    let rdsi = if t.count[0] == 0 || t.count[1] == 0 {
        t.rdsi_with(&RecruitmentMatrix { rows: [None, None] }).ok()
    } else {
        observed.and_then(|m| t.rdsi_with(&m).ok())
    };
    EstimateSet {
        n_respondents: sample.len(),
        n_non_seeds: t.total(),
        sample_proportion: t.sample_proportion().ok(),
        rdsi,
        rdsii: t.rdsii().ok(),
        rdsi_ego: t.rdsi_ego().ok(),
        s_observed: observed,
        s_ego: (t.total() > 0).then(|| t.ego_matrix()),
        dbar_a: t.mean_degree(Group::A).ok(),
        dbar_b: t.mean_degree(Group::B).ok(),
    }
}
