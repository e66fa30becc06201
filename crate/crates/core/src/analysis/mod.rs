//! Convergence diagnostics: the two-dimensional recurrence model, rate
//! checks on gradient traces, stepsize localization, and performance
//! profiles.

pub mod envelope;
pub mod profile;
pub mod property;
pub mod twodim;

pub use envelope::{rlinear_fit, superlinear_bound, superlinear_envelope_check, strictly_decreasing, window_log_ratios, BoundRow, EnvelopeReport, LinearFit};
pub use profile::{default_rho_grid, performance_profile, profile_svg, rho_grid, write_profile_csv, ProfileCurve};
pub use property::{property_a_check, EigenGradients, PropertyAReport};
pub use twodim::{
    accurate_prefix, h_eval, log_gradient_trajectory, log_h, log_norms, m_sequence, recurrence_m_step, recurrence_q_step, solver_vs_recurrence, xi_sequence,
    RecurrenceCheck, TwoDimState, XiRecord, XiReport, ROUNDOFF_LIMIT, THETA,
};
