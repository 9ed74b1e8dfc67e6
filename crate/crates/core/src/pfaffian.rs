//! Pfaffian formats `(α, β, ℓ)`: chain degree bound, outer polynomial degree
//! bound and chain length.
//!
//! Formats are exact integers. They end up in exponents of the
//! connected-component bound, where rounding would be meaningless.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("unknown activation {0:?} (expected atan, logsig or tanh)")]
    UnknownActivation(String),
    #[error("{name} must be at least 1, got {value}")]
    NonPositive { name: &'static str, value: u64 },
    #[error("format arithmetic overflowed")]
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PfaffianFormat {
    pub alpha: u64,
    pub beta: u64,
    pub ell: u64,
}

impl PfaffianFormat {
    pub const fn new(alpha: u64, beta: u64, ell: u64) -> Self {
        PfaffianFormat { alpha, beta, ell }
    }
}

impl fmt::Display for PfaffianFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.alpha, self.beta, self.ell)
    }
}

impl FromStr for PfaffianFormat {
    type Err = String;

    /// Parses `a,b,l`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim_matches(|c| c == '(' || c == ')').split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected alpha,beta,ell, got {s:?}"));
        }
        let p = |t: &str| t.parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
        Ok(PfaffianFormat::new(p(parts[0])?, p(parts[1])?, p(parts[2])?))
    }
}

/// Element-wise activation functions with known Pfaffian formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Atan,
    Logsig,
    Tanh,
}

impl Activation {
    pub const ALL: [Activation; 3] = [Activation::Atan, Activation::Logsig, Activation::Tanh];

    pub fn name(self) -> &'static str {
        match self {
            Activation::Atan => "atan",
            Activation::Logsig => "logsig",
            Activation::Tanh => "tanh",
        }
    }

    pub fn format(self) -> PfaffianFormat {
        match self {
            Activation::Atan => PfaffianFormat::new(3, 1, 2),
            Activation::Logsig | Activation::Tanh => PfaffianFormat::new(2, 1, 1),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "atan" | "arctan" => Ok(Activation::Atan),
            "logsig" | "sigmoid" => Ok(Activation::Logsig),
            "tanh" => Ok(Activation::Tanh),
            _ => Err(FormatError::UnknownActivation(s.to_string())),
        }
    }
}

/// Format of a named activation.
pub fn activation_format(name: &str) -> Result<PfaffianFormat, FormatError> {
    name.parse::<Activation>().map(Activation::format)
}

/// Polynomials are Pfaffian with an empty chain: `(0, degree, 0)`.
pub const fn polynomial_format(degree: u64) -> PfaffianFormat {
    PfaffianFormat::new(0, degree, 0)
}

/// Format of `outer ∘ inner`:
/// `(α_g + β_g − 1 + α_f β_g, β_f, ℓ_f + ℓ_g)`.
pub fn compose(outer: PfaffianFormat, inner: PfaffianFormat) -> PfaffianFormat {
    // β_g ≥ 1 for every legal format, so the subtraction cannot underflow.
    PfaffianFormat {
        alpha: inner.alpha + inner.beta.saturating_sub(1) + outer.alpha * inner.beta,
        beta: outer.beta,
        ell: outer.ell + inner.ell,
    }
}

/// Format of a whole system of equations, together with the number `H` of
/// chain-carrying computation units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemFormat {
    pub format: PfaffianFormat,
    pub h: u64,
}

fn positive(name: &'static str, value: u64) -> Result<u64, FormatError> {
    if value == 0 {
        Err(FormatError::NonPositive { name, value })
    } else {
        Ok(value)
    }
}

fn units(layers: u64, nodes: u64, dim: u64) -> Result<u64, FormatError> {
    positive("L", layers)?
        .checked_mul(positive("N", nodes)?)
        .and_then(|x| x.checked_mul(dim))
        .ok_or(FormatError::Overflow)
        .and_then(|x| positive("d", dim).map(|_| x))
}

/// System format for generic COMBINE/AGGREGATE/READOUT maps:
/// `α = max(α_agg + β_agg − 1 + α_comb β_agg, α_read)`,
/// `β = max(β_comb, β_read)`, `ℓ = H = LNd(ℓ_comb + ℓ_agg) + ℓ_read`.
pub fn system_format_general(
    comb: PfaffianFormat,
    agg: PfaffianFormat,
    read: PfaffianFormat,
    layers: u64,
    nodes: u64,
    dim: u64,
) -> Result<SystemFormat, FormatError> {
    let lnd = units(layers, nodes, dim)?;
    let update = compose(comb, agg);
    let h = lnd
        .checked_mul(comb.ell + agg.ell)
        .and_then(|x| x.checked_add(read.ell))
        .ok_or(FormatError::Overflow)?;
    Ok(SystemFormat {
        format: PfaffianFormat {
            alpha: update.alpha.max(read.alpha),
            beta: comb.beta.max(read.beta),
            ell: h,
        },
        h,
    })
}

/// System format for the sum-aggregation model with activation format `σ`:
/// `(2 + 3α_σ, β_σ, H ℓ_σ)` with `H = LNd + 1`.
///
/// The update equation wraps a degree-3 polynomial, the readout a degree-2
/// one; the system takes the larger `α` of the two.
pub fn system_format_simple(sigma: PfaffianFormat, layers: u64, nodes: u64, dim: u64) -> Result<SystemFormat, FormatError> {
    let h = units(layers, nodes, dim)?.checked_add(1).ok_or(FormatError::Overflow)?;
    let ell = h.checked_mul(sigma.ell).ok_or(FormatError::Overflow)?;
    Ok(SystemFormat {
        format: PfaffianFormat {
            alpha: 2 + 3 * sigma.alpha,
            beta: sigma.beta,
            ell,
        },
        h,
    })
}

/// Format of the update equation `h − σ(poly₃)` of the simple model.
pub fn simple_update_format(sigma: PfaffianFormat) -> PfaffianFormat {
    compose(sigma, polynomial_format(3))
}

/// Format of the readout equation `o − σ(poly₂)` of the simple model.
pub fn simple_readout_format(sigma: PfaffianFormat) -> PfaffianFormat {
    compose(sigma, polynomial_format(2))
}
