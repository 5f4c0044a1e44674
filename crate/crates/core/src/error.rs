use thiserror::Error;

use crate::types::TimeNs;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("efficiency quadruple is not symmetric: eta1(t0)/eta0(t0) = {ratio_t0}, eta0(t1)/eta1(t1) = {ratio_t1}")]
    AsymmetricQuadruple { ratio_t0: f64, ratio_t1: f64 },

    #[error("QBER is undefined for an empty sifted key")]
    UndefinedQber,

    #[error("record alignment error: {0}")]
    Alignment(String),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("probe estimation failed at delay {delay} ns: {reason}")]
    ProbePoint { delay: TimeNs, reason: String },

    #[error("unsupported attack for this operation: {0}")]
    UnsupportedAttack(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}
