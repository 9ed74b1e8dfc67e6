//! Computable VC-dimension upper bounds.
//!
//! The connected-components bound `B` is far beyond any machine number for
//! realistic sizes, so it is carried as `log₂ B`. The quadratic exponent
//! `ℓ̄(ℓ̄−1)/2` is formed in `u128` before conversion. All logarithms in the
//! VC bounds are base 2; the generalization-gap bound uses natural logs.

use thiserror::Error;

use crate::par::{self, Execution};
use crate::pfaffian::{
    compose, polynomial_format, system_format_general, system_format_simple, Activation, FormatError, PfaffianFormat,
};

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("{name} must be at least 1, got {value}")]
    NonPositive { name: &'static str, value: u64 },
    #[error("last Gabrielov factor (2p-1)(alpha+beta)-2p+2 = {0} is not positive")]
    NonPositiveFactor(i128),
    #[error("integer overflow evaluating {0}")]
    Overflow(&'static str),
    #[error("colors: C1 = {c1} is smaller than C0 = {c0}")]
    ColorOrder { c0: u64, c1: u64 },
    #[error("the colors bound is stated for logsig-format activations, got {0}")]
    ColorsActivation(Activation),
    #[error("eta must lie in (0, 1), got {0}")]
    Eta(f64),
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Format(#[from] FormatError),
}

fn positive(name: &'static str, value: u64) -> Result<u64, BoundError> {
    if value == 0 {
        Err(BoundError::NonPositive { name, value })
    } else {
        Ok(value)
    }
}

/// `log₂` of a bound. `exact_note` is set when a term was clamped or could
/// not be carried exactly into `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBound {
    pub log2_value: f64,
    pub exact_note: bool,
}

/// Every quantity the Gabrielov + Karpinski–Macintyre chain consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundInputs {
    pub p_bar: u64,
    pub alpha_bar: u64,
    pub beta_bar: u64,
    pub ell_bar: u64,
    pub s_bar: u64,
    pub h: u64,
    pub layers: u64,
    pub nodes: u64,
    pub dim: u64,
    pub attr_dim: u64,
    pub c0: Option<u64>,
    pub c1: Option<u64>,
}

/// Parameter count of the sum-aggregation GNN:
/// `(2d+1)(d(L−1)+q+1) − q`.
pub fn param_count_simple(dim: u64, layers: u64, attr_dim: u64) -> Result<u64, BoundError> {
    positive("d", dim)?;
    positive("L", layers)?;
    positive("q", attr_dim)?;
    let of = || BoundError::Overflow("parameter count");
    let inner = dim
        .checked_mul(layers - 1)
        .and_then(|x| x.checked_add(attr_dim + 1))
        .ok_or_else(of)?;
    (2 * dim + 1).checked_mul(inner).map(|x| x - attr_dim).ok_or_else(of)
}

/// `log₂` of the Gabrielov bound
/// `2^{ℓ̄(ℓ̄−1)/2+1} (ᾱ+2β̄−1)^{p̄−1} ((2p̄−1)(ᾱ+β̄)−2p̄+2)^{ℓ̄}`.
pub fn log2_components_bound(p_bar: u64, alpha_bar: u64, beta_bar: u64, ell_bar: u64) -> Result<LogBound, BoundError> {
    positive("p_bar", p_bar)?;
    positive("beta_bar", beta_bar)?;
    let (p, a, b, l) = (
        u128::from(p_bar),
        u128::from(alpha_bar),
        u128::from(beta_bar),
        u128::from(ell_bar),
    );

    // u64 inputs cannot overflow the u128 product; the f64 conversion can round
    let quad_exact = l * l.saturating_sub(1) / 2;
    let quad = quad_exact as f64;
    let rounded = quad_exact > 1u128 << f64::MANTISSA_DIGITS;

    let mut log2 = quad + 1.0;
    let middle = a + 2 * b - 1;
    if p_bar > 1 {
        log2 += (p_bar - 1) as f64 * (middle as f64).log2();
    }
    if ell_bar > 0 {
        let last = (2 * p as i128 - 1) * (a + b) as i128 - 2 * p as i128 + 2;
        if last <= 0 {
            return Err(BoundError::NonPositiveFactor(last));
        }
        log2 += ell_bar as f64 * (last as f64).log2();
    }
    Ok(LogBound {
        log2_value: log2,
        exact_note: rounded,
    })
}

/// `2 log₂ B + p̄ (16 + 2 log₂ s̄)`.
pub fn vc_upper_bound(log_b: &LogBound, p_bar: u64, s_bar: u64) -> f64 {
    let s = (s_bar.max(1)) as f64;
    2.0 * log_b.log2_value + p_bar as f64 * (16.0 + 2.0 * s.log2())
}

/// Result of running the generic chain on a [`BoundInputs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainReport {
    pub inputs: BoundInputs,
    pub log2_b: LogBound,
    pub vc: f64,
    /// `p̄²H²` when it fits in 128 bits.
    pub dominant_term: Option<u128>,
}

pub fn evaluate_chain(inputs: BoundInputs) -> Result<ChainReport, BoundError> {
    let log2_b = log2_components_bound(inputs.p_bar, inputs.alpha_bar, inputs.beta_bar, inputs.ell_bar)?;
    let vc = vc_upper_bound(&log2_b, inputs.p_bar, inputs.s_bar);
    let dominant_term = u128::from(inputs.p_bar)
        .checked_mul(u128::from(inputs.h))
        .and_then(|x| x.checked_mul(x));
    Ok(ChainReport {
        inputs,
        log2_b,
        vc,
        dominant_term,
    })
}

/// `s̄ = LNd + Nq + 1`.
pub fn equation_count(layers: u64, nodes: u64, dim: u64, attr_dim: u64) -> Result<u64, BoundError> {
    layers
        .checked_mul(nodes)
        .and_then(|x| x.checked_mul(dim))
        .and_then(|x| x.checked_add(nodes.checked_mul(attr_dim)?))
        .and_then(|x| x.checked_add(1))
        .ok_or(BoundError::Overflow("s_bar"))
}

/// A GNN described only by the formats and parameter counts of its
/// COMBINE, AGGREGATE and READOUT maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneralModel {
    pub comb: PfaffianFormat,
    pub agg: PfaffianFormat,
    pub read: PfaffianFormat,
    pub p_comb1: u64,
    pub p_agg1: u64,
    pub p_comb: u64,
    pub p_agg: u64,
    pub p_read: u64,
    pub layers: u64,
    pub nodes: u64,
    pub dim: u64,
    pub attr_dim: u64,
}

impl GeneralModel {
    /// The sum-aggregation model viewed through generic maps: COMBINE is
    /// `σ` of a degree-2 polynomial, AGGREGATE the degree-2 sum
    /// `Σ_u m_{v,u} h_u`, READOUT `logsig` of a degree-2 polynomial.
    pub fn sum_aggregation(sigma: Activation, layers: u64, nodes: u64, dim: u64, attr_dim: u64) -> Self {
        let p2 = polynomial_format(2);
        GeneralModel {
            comb: compose(sigma.format(), p2),
            agg: p2,
            read: compose(Activation::Logsig.format(), p2),
            p_comb1: dim * attr_dim + dim,
            p_agg1: dim * attr_dim,
            p_comb: dim * dim + dim,
            p_agg: dim * dim,
            p_read: dim + 1,
            layers,
            nodes,
            dim,
            attr_dim,
        }
    }

    pub fn param_count(&self) -> Result<u64, BoundError> {
        (self.layers.saturating_sub(1))
            .checked_mul(self.p_comb + self.p_agg)
            .and_then(|x| x.checked_add(self.p_comb1 + self.p_agg1 + self.p_read))
            .ok_or(BoundError::Overflow("parameter count"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Bound {
    pub chain: ChainReport,
    pub gamma: u64,
    /// Expanded form with `ᾱ, β̄` replaced by `γ = max(ᾱ, β̄)`.
    pub expanded: f64,
}

/// VC bound for a GNN with generic Pfaffian COMBINE/AGGREGATE/READOUT.
pub fn bound_theorem1(model: &GeneralModel) -> Result<Theorem1Bound, BoundError> {
    positive("L", model.layers)?;
    positive("N", model.nodes)?;
    positive("d", model.dim)?;
    positive("q", model.attr_dim)?;
    let p_bar = positive("p_bar", model.param_count()?)?;
    let system = system_format_general(model.comb, model.agg, model.read, model.layers, model.nodes, model.dim)?;
    let ell_bar = p_bar.checked_mul(system.h).ok_or(BoundError::Overflow("ell_bar"))?;
    let s_bar = equation_count(model.layers, model.nodes, model.dim, model.attr_dim)?;
    let inputs = BoundInputs {
        p_bar,
        alpha_bar: system.format.alpha,
        beta_bar: system.format.beta,
        ell_bar,
        s_bar,
        h: system.h,
        layers: model.layers,
        nodes: model.nodes,
        dim: model.dim,
        attr_dim: model.attr_dim,
        c0: None,
        c1: None,
    };
    let chain = evaluate_chain(inputs)?;

    let gamma = system.format.alpha.max(system.format.beta);
    let (p, h, g) = (p_bar as f64, system.h as f64, gamma as f64);
    let expanded = p * p * h * h
        + 2.0 * p * (3.0 * g).log2()
        + 2.0 * p * h * ((4.0 * g - 2.0) * p + 2.0 - 2.0 * g).log2()
        + p * (16.0 + 2.0 * (s_bar as f64).log2())
        + 2.0;
    Ok(Theorem1Bound { chain, gamma, expanded })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem3Bound {
    pub sigma: Activation,
    pub chain: ChainReport,
    /// Closed form for logsig-format activations:
    /// `p̄²H² + 2p̄ log₂ 9 + 2p̄H log₂(16p̄−7) + p̄(16 + 2 log₂ s̄) + 2`.
    pub closed_form: Option<f64>,
}

impl Theorem3Bound {
    pub fn value(&self) -> f64 {
        self.chain.vc
    }
}

/// Closed form shared by the node-count and color-count logsig bounds.
fn logsig_closed_form(p_bar: u64, h: u64, s_bar: u64) -> f64 {
    let (p, h, s) = (p_bar as f64, h as f64, s_bar as f64);
    p * p * h * h + 2.0 * p * 9f64.log2() + 2.0 * p * h * (16.0 * p - 7.0).log2() + p * (16.0 + 2.0 * s.log2()) + 2.0
}

fn is_logsig_format(sigma: Activation) -> bool {
    sigma.format() == Activation::Logsig.format()
}

/// VC bound for the sum-aggregation GNN with activation `sigma`.
pub fn bound_theorem3(sigma: Activation, layers: u64, nodes: u64, dim: u64, attr_dim: u64) -> Result<Theorem3Bound, BoundError> {
    let p_bar = param_count_simple(dim, layers, attr_dim)?;
    positive("N", nodes)?;
    let fmt = sigma.format();
    let system = system_format_simple(fmt, layers, nodes, dim)?;
    let ell_bar = p_bar
        .checked_mul(system.h)
        .and_then(|x| x.checked_mul(fmt.ell))
        .ok_or(BoundError::Overflow("ell_bar"))?;
    let s_bar = equation_count(layers, nodes, dim, attr_dim)?;
    let chain = evaluate_chain(BoundInputs {
        p_bar,
        alpha_bar: system.format.alpha,
        beta_bar: system.format.beta,
        ell_bar,
        s_bar,
        h: system.h,
        layers,
        nodes,
        dim,
        attr_dim,
        c0: None,
        c1: None,
    })?;
    let closed_form = is_logsig_format(sigma).then(|| logsig_closed_form(p_bar, system.h, s_bar));
    Ok(Theorem3Bound {
        sigma,
        chain,
        closed_form,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem4Bound {
    pub p_bar: u64,
    /// `H_c = C₁d + 1`.
    pub h_c: u64,
    /// `s̄_c = C₁d + C₀q + 1`.
    pub s_c: u64,
    pub value: f64,
    /// The generic chain with `H_c`, `s̄_c` and `ℓ̄_c = p̄ H_c ℓ_σ`.
    pub chain: ChainReport,
}

/// VC bound for the logsig sum-aggregation GNN in terms of 1-WL color counts.
pub fn bound_theorem4(
    sigma: Activation,
    layers: u64,
    dim: u64,
    attr_dim: u64,
    c0: u64,
    c1: u64,
) -> Result<Theorem4Bound, BoundError> {
    if !is_logsig_format(sigma) {
        return Err(BoundError::ColorsActivation(sigma));
    }
    positive("C0", c0)?;
    if c1 < c0 {
        return Err(BoundError::ColorOrder { c0, c1 });
    }
    let p_bar = param_count_simple(dim, layers, attr_dim)?;
    let of = |what| BoundError::Overflow(what);
    let c1d = c1.checked_mul(dim).ok_or_else(|| of("C1 d"))?;
    let h_c = c1d.checked_add(1).ok_or_else(|| of("H_c"))?;
    let s_c = c0
        .checked_mul(attr_dim)
        .and_then(|x| x.checked_add(c1d))
        .and_then(|x| x.checked_add(1))
        .ok_or_else(|| of("s_c"))?;
    let fmt = sigma.format();
    let ell_c = p_bar
        .checked_mul(h_c)
        .and_then(|x| x.checked_mul(fmt.ell))
        .ok_or_else(|| of("ell_c"))?;
    let chain = evaluate_chain(BoundInputs {
        p_bar,
        alpha_bar: 2 + 3 * fmt.alpha,
        beta_bar: fmt.beta,
        ell_bar: ell_c,
        s_bar: s_c,
        h: h_c,
        layers,
        nodes: 0,
        dim,
        attr_dim,
        c0: Some(c0),
        c1: Some(c1),
    })?;
    Ok(Theorem4Bound {
        p_bar,
        h_c,
        s_c,
        value: logsig_closed_form(p_bar, h_c, s_c),
        chain,
    })
}

/// Least-squares slope of `log₂ y` against `log₂ x` over all points.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64, BoundError> {
    if points.len() < 2 {
        return Err(BoundError::Domain("need at least 2 points".into()));
    }
    for w in points.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(BoundError::Domain("x must be strictly increasing".into()));
        }
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| *x <= 0.0 || *y <= 0.0 || !y.is_finite()) {
        return Err(BoundError::Domain(format!("non-positive point ({x}, {y})")));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.log2()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.log2()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Empirical growth exponent of a bound over a geometric sweep: the
/// log-log slope over the upper half of the points.
pub fn asymptotic_exponent(sweep: &[(f64, f64)]) -> Result<f64, BoundError> {
    if sweep.len() < 4 {
        return Err(BoundError::Domain(format!("need at least 4 points, got {}", sweep.len())));
    }
    if let Some(&(x, y)) = sweep.iter().find(|(x, y)| *x <= 0.0 || *y <= 0.0 || !y.is_finite()) {
        return Err(BoundError::Domain(format!("non-positive point ({x}, {y})")));
    }
    let ratio = sweep[1].0 / sweep[0].0;
    if ratio.is_nan() || ratio <= 1.0 || sweep.windows(2).any(|w| ((w[1].0 / w[0].0) / ratio - 1.0).abs() > 1e-9) {
        return Err(BoundError::Domain("x must be a strictly increasing geometric sequence".into()));
    }
    fit_loglog_slope(&sweep[sweep.len() / 2..])
}

/// Hyperparameter swept by [`sweep_theorem3`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Layers,
    Nodes,
    Dim,
    AttrDim,
}

impl std::str::FromStr for SweepVariable {
    type Err = BoundError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L" | "layers" => Ok(SweepVariable::Layers),
            "N" | "nodes" => Ok(SweepVariable::Nodes),
            "d" | "dim" | "hidden" => Ok(SweepVariable::Dim),
            "q" | "attr_dim" => Ok(SweepVariable::AttrDim),
            _ => Err(BoundError::Domain(format!("unknown sweep variable {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: u64,
    pub p_bar: u64,
    pub bound: Theorem3Bound,
}

/// Evaluates [`bound_theorem3`] at every value of `var`, the rest fixed.
#[allow(clippy::too_many_arguments)]
pub fn sweep_theorem3(
    exec: Execution,
    sigma: Activation,
    layers: u64,
    nodes: u64,
    dim: u64,
    attr_dim: u64,
    var: SweepVariable,
    values: &[u64],
) -> Result<Vec<SweepPoint>, BoundError> {
    par::map_slice(exec, values, |&v| {
        let (mut l, mut n, mut d, mut q) = (layers, nodes, dim, attr_dim);
        match var {
            SweepVariable::Layers => l = v,
            SweepVariable::Nodes => n = v,
            SweepVariable::Dim => d = v,
            SweepVariable::AttrDim => q = v,
        }
        let bound = bound_theorem3(sigma, l, n, d, q)?;
        Ok(SweepPoint {
            value: v,
            p_bar: bound.chain.inputs.p_bar,
            bound,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapBound {
    pub value: f64,
    /// Set when the bracket went negative and was clamped to zero.
    pub clamped: bool,
}

/// `√((1/n)[VC (ln(2n/VC) + 1) − ln(η/4)])`, holding with probability
/// `1 − η`.
pub fn generalization_gap_bound(n_samples: u64, vcdim: f64, eta: f64) -> Result<GapBound, BoundError> {
    positive("n_samples", n_samples)?;
    if vcdim <= 0.0 || !vcdim.is_finite() {
        return Err(BoundError::Domain(format!("vcdim must be positive, got {vcdim}")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(BoundError::Eta(eta));
    }
    let n = n_samples as f64;
    let bracket = vcdim * ((2.0 * n / vcdim).ln() + 1.0) - (eta / 4.0).ln();
    let clamped = bracket < 0.0;
    Ok(GapBound {
        value: (bracket.max(0.0) / n).sqrt(),
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn param_count_examples() {
        assert_eq!(param_count_simple(2, 2, 1).unwrap(), 19);
        assert_eq!(param_count_simple(1, 1, 1).unwrap(), 5);
        assert_eq!(param_count_simple(32, 3, 37).unwrap(), 6593);
        assert!(param_count_simple(0, 1, 1).is_err());
    }

    #[test]
    fn param_count_matches_enumeration() {
        for d in 1..12u64 {
            for l in 1..6u64 {
                for q in 1..10u64 {
                    let layer1 = 2 * d * q + d;
                    let rest = (2 * d * d + d) * (l - 1);
                    let readout = d + 1;
                    assert_eq!(param_count_simple(d, l, q).unwrap(), layer1 + rest + readout);
                    let general = GeneralModel::sum_aggregation(Activation::Tanh, l, 1, d, q);
                    assert_eq!(general.param_count().unwrap(), layer1 + rest + readout);
                }
            }
        }
    }

    #[test]
    fn components_examples() {
        let b = log2_components_bound(1, 1, 1, 1).unwrap();
        assert_relative_eq!(b.log2_value, 2.0);
        let b = log2_components_bound(4, 3, 2, 0).unwrap();
        assert_relative_eq!(b.log2_value, 1.0 + 3.0 * 6f64.log2());
        // logsig system, p = 2: last factor is 16p - 7 = 25
        let b = log2_components_bound(2, 8, 1, 1).unwrap();
        assert_relative_eq!(b.log2_value, 1.0 + 9f64.log2() + 25f64.log2());
        assert!(log2_components_bound(0, 1, 1, 1).is_err());
    }

    #[test]
    fn karpinski_macintyre_examples() {
        let lb = |v| LogBound {
            log2_value: v,
            exact_note: false,
        };
        assert_relative_eq!(vc_upper_bound(&lb(0.0), 1, 1), 16.0);
        assert_relative_eq!(vc_upper_bound(&lb(2.0), 1, 2), 22.0);
        assert_relative_eq!(vc_upper_bound(&lb(10.0), 3, 8), 86.0);
    }

    #[test]
    fn general_bound_degenerate_instance() {
        let one = PfaffianFormat::new(1, 1, 0);
        let m = GeneralModel {
            comb: one,
            agg: one,
            read: one,
            p_comb1: 1,
            p_agg1: 1,
            p_comb: 1,
            p_agg: 1,
            p_read: 1,
            layers: 1,
            nodes: 1,
            dim: 1,
            attr_dim: 1,
        };
        let b = bound_theorem1(&m).unwrap();
        assert!(b.chain.vc.is_finite() && b.chain.vc > 0.0);
        assert!(b.expanded >= b.chain.vc);
    }

    #[test]
    fn general_bound_dominant_term() {
        let m = GeneralModel {
            comb: Activation::Logsig.format(),
            agg: polynomial_format(1),
            read: Activation::Logsig.format(),
            p_comb1: 4,
            p_agg1: 2,
            p_comb: 6,
            p_agg: 4,
            p_read: 3,
            layers: 2,
            nodes: 5,
            dim: 2,
            attr_dim: 1,
        };
        let b = bound_theorem1(&m).unwrap();
        let inputs = b.chain.inputs;
        assert_eq!((inputs.p_bar, inputs.h), (19, 21));
        let dominant = b.chain.dominant_term.unwrap() as f64;
        assert_eq!(dominant, 361.0 * 441.0);
        let ratio = b.chain.vc / dominant;
        assert!((1.0..=2.0).contains(&ratio), "ratio {ratio}");
        assert!(b.expanded >= b.chain.vc);
    }

    #[test]
    fn node_bound_logsig_small() {
        let b = bound_theorem3(Activation::Logsig, 1, 1, 1, 1).unwrap();
        let i = b.chain.inputs;
        assert_eq!((i.p_bar, i.h, i.alpha_bar, i.beta_bar, i.s_bar), (5, 2, 8, 1, 3));
        let expected = 100.0 + 10.0 * 9f64.log2() + 20.0 * 73f64.log2() + 5.0 * (16.0 + 2.0 * 3f64.log2()) + 2.0;
        assert_relative_eq!(b.closed_form.unwrap(), expected, max_relative = 1e-12);
        // closed form exceeds the generic chain by exactly p̄H + 2 log₂ 9
        assert_relative_eq!(b.closed_form.unwrap() - b.value(), 10.0 + 2.0 * 9f64.log2(), max_relative = 1e-9);
        assert!(bound_theorem3(Activation::Atan, 1, 1, 1, 1).unwrap().closed_form.is_none());
    }

    #[test]
    fn node_bound_activation_ordering() {
        for (l, n, d, q) in [(1, 1, 1, 1), (2, 10, 4, 3), (3, 30, 16, 7)] {
            let logsig = bound_theorem3(Activation::Logsig, l, n, d, q).unwrap().value();
            let tanh = bound_theorem3(Activation::Tanh, l, n, d, q).unwrap().value();
            let atan = bound_theorem3(Activation::Atan, l, n, d, q).unwrap().value();
            assert_eq!(logsig, tanh);
            assert!(atan > logsig);
        }
    }

    #[test]
    fn color_bound_examples() {
        let b4 = bound_theorem4(Activation::Logsig, 1, 1, 1, 1, 1).unwrap();
        let b3 = bound_theorem3(Activation::Logsig, 1, 1, 1, 1).unwrap();
        assert_eq!((b4.p_bar, b4.h_c, b4.s_c), (5, 2, 3));
        assert_eq!(b4.value, b3.closed_form.unwrap());
        assert_eq!(
            bound_theorem4(Activation::Logsig, 1, 1, 1, 3, 2),
            Err(BoundError::ColorOrder { c0: 3, c1: 2 })
        );
        assert!(matches!(
            bound_theorem4(Activation::Atan, 1, 1, 1, 1, 1),
            Err(BoundError::ColorsActivation(_))
        ));
    }

    #[test]
    fn color_bound_doubling_c1() {
        let mut prev = bound_theorem4(Activation::Logsig, 2, 4, 3, 1, 1 << 10).unwrap().value;
        for k in 11..16 {
            let next = bound_theorem4(Activation::Logsig, 2, 4, 3, 1, 1 << k).unwrap().value;
            assert!(next / prev <= 4.0 * (1.0 + 1e-3), "ratio {}", next / prev);
            prev = next;
        }
    }

    #[test]
    fn exponent_of_power_law() {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| 2f64.powi(i)).map(|x| (x, x * x * x)).collect();
        assert!((asymptotic_exponent(&pts).unwrap() - 3.0).abs() < 1e-9);
        assert!(asymptotic_exponent(&pts[..3]).is_err());
        let not_geometric = vec![(1.0, 1.0), (2.0, 1.0), (3.0, 1.0), (4.0, 1.0)];
        assert!(asymptotic_exponent(&not_geometric).is_err());
        let bad = vec![(1.0, 1.0), (2.0, -1.0), (4.0, 1.0), (8.0, 1.0)];
        assert!(asymptotic_exponent(&bad).is_err());
    }

    #[test]
    fn gap_bound_examples() {
        let g = generalization_gap_bound(100, 100.0, 0.05).unwrap();
        let expected = ((100.0 * (2f64.ln() + 1.0) + 80f64.ln()) / 100.0).sqrt();
        assert_relative_eq!(g.value, expected, max_relative = 1e-12);
        assert!(!g.clamped);

        let small = generalization_gap_bound(1_000_000, 10.0, 0.05).unwrap().value;
        let large = generalization_gap_bound(1_000, 10.0, 0.05).unwrap().value;
        assert!(small < large);

        let mut prev = 0.0;
        for v in 1..=100 {
            let g = generalization_gap_bound(100, v as f64, 0.05).unwrap().value;
            assert!(g > prev);
            prev = g;
        }
        assert_eq!(generalization_gap_bound(10, 1.0, 1.0), Err(BoundError::Eta(1.0)));
        assert_eq!(generalization_gap_bound(10, 1.0, 0.0), Err(BoundError::Eta(0.0)));
    }

    #[test]
    fn sweep_reports_every_value() {
        let pts = sweep_theorem3(
            Execution::default(),
            Activation::Logsig,
            2,
            8,
            2,
            1,
            SweepVariable::Nodes,
            &[8, 16, 32],
        )
        .unwrap();
        assert_eq!(pts.iter().map(|p| p.value).collect::<Vec<_>>(), vec![8, 16, 32]);
        assert!(pts.windows(2).all(|w| w[1].bound.value() > w[0].bound.value()));
    }
}
