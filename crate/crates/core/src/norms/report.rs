use serde::{Deserialize, Serialize};

use crate::fields::Subdomain;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    /// `B^{σ,∞}_p` with `p = 2`.
    Besov { p: u32, sigma: f64 },
    SobolevFrac { s: f64 },
    SobolevNeg { s: f64 },
    L2,
    Lq { q: f64 },
    Holder { s: f64 },
}

impl NormKind {
    pub fn sobolev(s: f64) -> Self {
        if s < 0.0 {
            NormKind::SobolevNeg { s }
        } else {
            NormKind::SobolevFrac { s }
        }
    }
}

/// One entry of a norm breakdown: a shift length or wavenumber and its contribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormDetail {
    pub at: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub kind: NormKind,
    pub region: Subdomain,
    pub value: f64,
    pub details: Vec<NormDetail>,
}
