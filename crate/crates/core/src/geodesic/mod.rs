//! Geodesics of the induced metric, integrated in the chart `U_2`
//! (`Û_2` for `L(n)`), where a point is `z(0, 1, r₃, …, rₙ) [+ λ1⃗]`.

mod integrate;
mod jet;
mod lift;
mod residuals;
mod survey;

pub use integrate::{
    geodesic_step, integrate_geodesic, richardson_drift, Conserved, Drift, GeodesicTrajectory, IntegrateOptions,
    Termination,
};
pub use jet::{induced_metric, EmbeddingJet, InducedMetric};
pub use lift::{
    check_lift_condition, lift_m3_to_mn, lift_m_to_l, max_ambient_acceleration, LiftSpec, LiftToL, Shape, BALANCE_TOL,
};
pub use residuals::{
    monotonicity, residuals_l, residuals_m, DisplayedForm, MonotonicityReport, ResidualsL, ResidualsLSummary,
    ResidualsM, ResidualsMSummary,
};
pub use survey::{
    classify, geodesic_survey, max_second_difference, random_initial_data, survey_trial, Classification, SurveyReport,
    TrialReport, DRIFT_FLOOR, STRAIGHT_TOL,
};
