//! Report generators for the a priori estimates: subsolutions, Harnack bounds, normal-form fits,
//! rescaling and the classification of bounded harmonic maps of the cone.

mod classify;
mod forms;
mod harnack;
mod subsolution;

pub use classify::{cone_classification_check, ClassificationReport};
pub use forms::{form_fit, form_fit_with, rescale_probe, FormFitReport, RescaleReport};
pub use harnack::{admissible_supersolution, harnack_check, HarnackReport};
pub use subsolution::{subsolution_check, SubsolutionReport};
