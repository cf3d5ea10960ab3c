//! Boosting toolkit: classical AdaBoost, AdaBoost with dynamic
//! (confidence-rated) weight adjustment, and binary gradient boosting, with
//! weighted Gaussian naive Bayes and decision-stump base learners plus an
//! experiment harness that writes accuracy reports and learning curves.

pub mod boosting;
pub mod dataset;
pub mod error;
pub mod gradboost;
pub mod harness;
pub mod metrics;
pub mod rng;
pub mod weak_learners;

pub use boosting::{
    alpha_from_error, clip_soft_margin, fit_adaboost, fit_adaboost_traced, init_weights,
    update_weights_dynamic, update_weights_indicator, weighted_error, AlphaRule, BoostConfig,
    Ensemble, FitTrace, InitWeights, RoundRecord, RoundTrace, SoftMargin, Variant, WeightVector,
    WorseThanRandomPolicy,
};
pub use dataset::{
    load_csv, read_csv, train_test_split, Dataset, LabelColumn, PreprocessConfig, SplitSpec,
};
pub use error::{Error, Result};
pub use gradboost::{
    fit_gradboost, line_search_gamma, logistic_loss, pseudo_residuals, GbConfig, GbModel,
    RegressionStump,
};
pub use metrics::{accuracy, confusion, ConfusionMatrix, CurvePoint, LearningCurve};
pub use weak_learners::{GaussianNb, Stump, WeakLearner, WeakLearnerSpec};
