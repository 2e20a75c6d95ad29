//! Arithmetic over `(n, m)` schemes: derived sizes, similarity, base schemes
//! and the two savings percentages.
//!
//! Every ratio is kept as an exact [`Ratio`]; nothing in this module touches
//! floating point.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::SchemeError;

/// A scheme: split into `n` modules, recoverable from any `m` of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SchemeParams {
    n: u32,
    m: u32,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    n: u32,
    m: u32,
}

impl TryFrom<RawParams> for SchemeParams {
    type Error = SchemeError;
    fn try_from(raw: RawParams) -> Result<Self, SchemeError> {
        SchemeParams::new(raw.n, raw.m)
    }
}

impl From<SchemeParams> for RawParams {
    fn from(p: SchemeParams) -> Self {
        RawParams { n: p.n, m: p.m }
    }
}

impl SchemeParams {
    pub fn new(n: u32, m: u32) -> Result<Self, SchemeError> {
        if n == 0 || m == 0 || m > n {
            return Err(SchemeError::InvalidParams { n, m });
        }
        Ok(SchemeParams { n, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of modules holding each element, `n - m + 1`.
    pub fn copies(&self) -> u32 {
        self.n - self.m + 1
    }

    /// `gcd(n, n - m + 1)`, which equals `gcd(n, m - 1)`.
    pub fn gcd(&self) -> u32 {
        self.n.gcd(&self.copies())
    }

    /// Element count `R`.
    pub fn element_count(&self) -> u32 {
        self.n / self.gcd()
    }

    /// Elements per module `K`.
    pub fn elements_per_module(&self) -> u32 {
        self.copies() / self.gcd()
    }

    /// Smallest number of modules that can ever cover every element.
    pub fn min_modules(&self) -> u32 {
        self.n.div_ceil(self.copies())
    }
}

impl fmt::Display for SchemeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n, self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeCharacteristics {
    /// `R`
    pub big_r: u32,
    /// `K`
    pub k: u32,
    /// `Z`, total stored bytes over original bytes.
    pub redundancy_z: u32,
    /// `ml`, one module's size relative to the original.
    pub module_ratio_ml: Ratio<u64>,
    /// `D`
    pub min_modules_d: u32,
}

pub fn derive_characteristics(params: SchemeParams) -> SchemeCharacteristics {
    let big_r = params.element_count();
    let k = params.elements_per_module();
    SchemeCharacteristics {
        big_r,
        k,
        redundancy_z: params.copies(),
        module_ratio_ml: Ratio::new(u64::from(k), u64::from(big_r)),
        min_modules_d: params.min_modules(),
    }
}

/// Percentages from the two storage scenarios, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SavingsReport {
    /// Extra capacity over plain replication onto `n` equal carriers.
    pub pr1_percent: Ratio<u64>,
    /// Traffic saved over sending the whole file to each of `n` stores.
    pub pr2_percent: Ratio<u64>,
}

pub fn savings(params: SchemeParams) -> SavingsReport {
    let lost = u64::from(params.m - 1);
    SavingsReport {
        pr1_percent: Ratio::new(100 * lost, u64::from(params.copies())),
        pr2_percent: Ratio::new(100 * lost, u64::from(params.n)),
    }
}

/// `n_a / (m_a - 1) = n_b / (m_b - 1)`, cross-multiplied. All `(n, 1)`
/// schemes compare equal to each other under this form.
pub fn is_similar(a: SchemeParams, b: SchemeParams) -> bool {
    u64::from(a.n) * u64::from(b.m - 1) == u64::from(b.n) * u64::from(a.m - 1)
}

/// `gcd(n, m - 1) = 1`, with `gcd(n, 0) = n`.
pub fn is_base(params: SchemeParams) -> bool {
    params.n.gcd(&(params.m - 1)) == 1
}

/// The smallest scheme similar to `params`.
pub fn base_of(params: SchemeParams) -> SchemeParams {
    let g = params.n.gcd(&(params.m - 1));
    SchemeParams {
        n: params.n / g,
        m: (params.m - 1) / g + 1,
    }
}

/// Grows a scheme by an integer factor while keeping it similar.
pub fn scale(base: SchemeParams, scale_factor: u32) -> Result<SchemeParams, SchemeError> {
    if scale_factor == 0 {
        return Err(SchemeError::ZeroScale);
    }
    let n = base
        .n
        .checked_mul(scale_factor)
        .ok_or(SchemeError::Overflow)?;
    let m = (base.m - 1)
        .checked_mul(scale_factor)
        .and_then(|v| v.checked_add(1))
        .ok_or(SchemeError::Overflow)?;
    SchemeParams::new(n, m)
}

/// Members of the similarity family of `params` with `n` at most `max_n`,
/// smallest first.
pub fn family(params: SchemeParams, max_n: u32) -> Vec<SchemeParams> {
    let base = base_of(params);
    (1..)
        .map_while(|factor| scale(base, factor).ok().filter(|s| s.n <= max_n))
        .collect()
}

/// Renders an exact ratio as a percentage, e.g. `40%` or `200/3% (~66.67%)`.
pub fn format_percent(value: Ratio<u64>) -> String {
    if value.is_integer() {
        format!("{}%", value.to_integer())
    } else {
        format!(
            "{}/{}% (~{:.2}%)",
            value.numer(),
            value.denom(),
            *value.numer() as f64 / *value.denom() as f64
        )
    }
}
