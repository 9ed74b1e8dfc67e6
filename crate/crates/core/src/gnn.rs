//! The sum-aggregation message-passing GNN
//!
//! `h_v^(t+1) = σ(W_comb h_v^(t) + W_agg Σ_{u∈ne(v)} h_u^(t) + b)`, read out
//! as `logsig(Σ_v w·h_v^(L) + b)`, trained with binary cross-entropy and
//! Adam. Everything is `f64`; gradients are hand-written reverse mode.

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{attribute_matrix, AttributeMatrix, AttributeMode, Dataset, Graph, GraphError};
use crate::par::{self, Execution};
use crate::pfaffian::Activation;

/// Outputs are clamped to `[ε, 1 − ε]` inside the logarithm of the loss.
pub const LOSS_CLAMP: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GnnError {
    #[error("attribute block has {got} entries, expected {nodes} nodes x {dim}")]
    Shape { nodes: usize, dim: usize, got: usize },
    #[error("gradient has {got} entries, parameters have {expected}")]
    GradientShape { expected: usize, got: usize },
    #[error("label {0} is not binary")]
    Label(u8),
    #[error("split error: {0}")]
    Split(String),
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("accuracy of an empty set of graphs")]
    EmptyPart,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Offsets of every parameter block inside the flat parameter vector.
///
/// Per layer `t` (0-based) the order is `W_comb (d × in)`, `W_agg (d × in)`,
/// `b (d)`, row-major, where `in = q` for the first layer and `d` after.
/// The readout `w (d)` and scalar bias close the vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamLayout {
    pub layers: usize,
    pub hidden: usize,
    pub attr_dim: usize,
}

impl ParamLayout {
    pub fn input_dim(&self, t: usize) -> usize {
        if t == 0 {
            self.attr_dim
        } else {
            self.hidden
        }
    }

    fn layer_size(&self, t: usize) -> usize {
        2 * self.hidden * self.input_dim(t) + self.hidden
    }

    fn layer_offset(&self, t: usize) -> usize {
        (0..t).map(|s| self.layer_size(s)).sum()
    }

    pub fn comb(&self, t: usize) -> Range<usize> {
        let start = self.layer_offset(t);
        start..start + self.hidden * self.input_dim(t)
    }

    pub fn agg(&self, t: usize) -> Range<usize> {
        let start = self.comb(t).end;
        start..start + self.hidden * self.input_dim(t)
    }

    pub fn bias(&self, t: usize) -> Range<usize> {
        let start = self.agg(t).end;
        start..start + self.hidden
    }

    pub fn readout_weights(&self) -> Range<usize> {
        let start = self.layer_offset(self.layers);
        start..start + self.hidden
    }

    pub fn readout_bias(&self) -> usize {
        self.readout_weights().end
    }

    pub fn len(&self) -> usize {
        self.readout_bias() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// All trainable parameters `Θ` plus the activation they are used with.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub activation: Activation,
    pub layout: ParamLayout,
    pub values: Vec<f64>,
}

impl ModelParams {
    pub fn zeros(activation: Activation, layers: usize, hidden: usize, attr_dim: usize) -> Self {
        let layout = ParamLayout {
            layers,
            hidden,
            attr_dim,
        };
        ModelParams {
            activation,
            layout,
            values: vec![0.0; layout.len()],
        }
    }

    /// Uniform in `±1/√fan_in` per block; biases share their layer's bound.
    pub fn init<R: Rng>(activation: Activation, layers: usize, hidden: usize, attr_dim: usize, rng: &mut R) -> Self {
        let mut p = Self::zeros(activation, layers, hidden, attr_dim);
        let layout = p.layout;
        for t in 0..layers {
            let bound = 1.0 / (layout.input_dim(t) as f64).sqrt();
            for i in layout.comb(t).start..layout.bias(t).end {
                p.values[i] = rng.gen_range(-bound..=bound);
            }
        }
        let bound = 1.0 / (hidden as f64).sqrt();
        for i in layout.readout_weights().start..layout.len() {
            p.values[i] = rng.gen_range(-bound..=bound);
        }
        p
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn logsig(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn activate(sigma: Activation, z: f64) -> f64 {
    match sigma {
        Activation::Atan => z.atan(),
        Activation::Logsig => logsig(z),
        Activation::Tanh => z.tanh(),
    }
}

/// `σ'(z)` given both the pre-activation and `h = σ(z)`.
fn derivative(sigma: Activation, z: f64, h: f64) -> f64 {
    match sigma {
        Activation::Atan => 1.0 / (1.0 + z * z),
        Activation::Logsig => h * (1.0 - h),
        Activation::Tanh => 1.0 - h * h,
    }
}

/// Every intermediate of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPass {
    /// `hidden[t]` is the row-major `n × dim` block `h^(t)`; `hidden[0]` holds
    /// the input attributes.
    pub hidden: Vec<Vec<f64>>,
    /// Neighbor sums feeding layer `t + 1`, shaped like `hidden[t]`.
    pub aggregated: Vec<Vec<f64>>,
    /// Pre-activations of layer `t + 1`.
    pub pre: Vec<Vec<f64>>,
    pub logit: f64,
    pub output: f64,
    node_count: usize,
}

impl ForwardPass {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// `h_v^(t)`.
    pub fn node(&self, t: usize, v: usize) -> &[f64] {
        let dim = self.hidden[t].len() / self.node_count.max(1);
        &self.hidden[t][v * dim..(v + 1) * dim]
    }
}

fn check_attrs(params: &ModelParams, g: &Graph, attrs: &[f64]) -> Result<(), GnnError> {
    let (n, q) = (g.node_count(), params.layout.attr_dim);
    if attrs.len() != n * q {
        return Err(GnnError::Shape {
            nodes: n,
            dim: q,
            got: attrs.len(),
        });
    }
    Ok(())
}

/// Runs the network on one graph. `attrs` is the row-major `n × q` block.
pub fn forward(params: &ModelParams, g: &Graph, attrs: &[f64]) -> Result<ForwardPass, GnnError> {
    check_attrs(params, g, attrs)?;
    let layout = params.layout;
    let (n, d) = (g.node_count(), layout.hidden);
    let p = &params.values;

    let mut hidden = Vec::with_capacity(layout.layers + 1);
    let mut aggregated = Vec::with_capacity(layout.layers);
    let mut pre = Vec::with_capacity(layout.layers);
    hidden.push(attrs.to_vec());

    for t in 0..layout.layers {
        let inp = layout.input_dim(t);
        let prev = &hidden[t];
        let mut agg = vec![0.0; n * inp];
        for v in 0..n {
            let row = &mut agg[v * inp..(v + 1) * inp];
            for &u in g.neighbors(v) {
                for (a, x) in row.iter_mut().zip(&prev[u * inp..(u + 1) * inp]) {
                    *a += x;
                }
            }
        }
        let (wc, wa, b) = (&p[layout.comb(t)], &p[layout.agg(t)], &p[layout.bias(t)]);
        let mut z = vec![0.0; n * d];
        for v in 0..n {
            let hv = &prev[v * inp..(v + 1) * inp];
            let sv = &agg[v * inp..(v + 1) * inp];
            for i in 0..d {
                let (rc, ra) = (&wc[i * inp..(i + 1) * inp], &wa[i * inp..(i + 1) * inp]);
                let mut acc = b[i];
                for j in 0..inp {
                    acc += rc[j] * hv[j] + ra[j] * sv[j];
                }
                z[v * d + i] = acc;
            }
        }
        let h: Vec<f64> = z.iter().map(|&x| activate(params.activation, x)).collect();
        aggregated.push(agg);
        pre.push(z);
        hidden.push(h);
    }

    let w = &p[layout.readout_weights()];
    let last = &hidden[layout.layers];
    let mut logit = p[layout.readout_bias()];
    for v in 0..n {
        for (wi, hi) in w.iter().zip(&last[v * d..(v + 1) * d]) {
            logit += wi * hi;
        }
    }
    Ok(ForwardPass {
        hidden,
        aggregated,
        pre,
        logit,
        output: logsig(logit),
        node_count: n,
    })
}

/// One labelled graph with its attribute block.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub graph: &'a Graph,
    pub attrs: &'a [f64],
    pub label: u8,
}

/// Binary cross-entropy with the output clamped away from 0 and 1. The flag
/// reports whether the clamp was active.
pub fn bce(output: f64, label: u8) -> (f64, bool) {
    let clamped = output.clamp(LOSS_CLAMP, 1.0 - LOSS_CLAMP);
    let loss = if label == 1 { -clamped.ln() } else { -(1.0 - clamped).ln() };
    (loss, clamped != output)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossAndGrads {
    pub loss: f64,
    pub grads: Vec<f64>,
    /// Number of graphs whose output hit the loss clamp.
    pub saturated: usize,
}

fn sample_loss_and_grads(params: &ModelParams, s: &Sample) -> Result<(f64, Vec<f64>, bool), GnnError> {
    if s.label > 1 {
        return Err(GnnError::Label(s.label));
    }
    let fp = forward(params, s.graph, s.attrs)?;
    let (loss, saturated) = bce(fp.output, s.label);
    let layout = params.layout;
    let p = &params.values;
    let (n, d, l) = (s.graph.node_count(), layout.hidden, layout.layers);
    let mut g = vec![0.0; layout.len()];

    // d loss / d logit for logsig + BCE
    let dr = fp.output - f64::from(s.label);
    g[layout.readout_bias()] = dr;
    let rw = layout.readout_weights();
    let last = &fp.hidden[l];
    for v in 0..n {
        for i in 0..d {
            g[rw.start + i] += dr * last[v * d + i];
        }
    }
    let w = &p[rw];
    let mut gh: Vec<f64> = (0..n * d).map(|k| dr * w[k % d]).collect();

    for t in (0..l).rev() {
        let inp = layout.input_dim(t);
        let (z, h) = (&fp.pre[t], &fp.hidden[t + 1]);
        let gz: Vec<f64> = (0..n * d).map(|k| gh[k] * derivative(params.activation, z[k], h[k])).collect();
        let (prev, agg) = (&fp.hidden[t], &fp.aggregated[t]);
        let (rc, ra, rb) = (layout.comb(t), layout.agg(t), layout.bias(t));
        for v in 0..n {
            for i in 0..d {
                let gzi = gz[v * d + i];
                g[rb.start + i] += gzi;
                for j in 0..inp {
                    g[rc.start + i * inp + j] += gzi * prev[v * inp + j];
                    g[ra.start + i * inp + j] += gzi * agg[v * inp + j];
                }
            }
        }
        if t == 0 {
            break;
        }
        let (wc, wa) = (&p[rc], &p[ra]);
        let mut g_prev = vec![0.0; n * inp];
        let mut g_agg = vec![0.0; n * inp];
        for v in 0..n {
            for i in 0..d {
                let gzi = gz[v * d + i];
                for j in 0..inp {
                    g_prev[v * inp + j] += wc[i * inp + j] * gzi;
                    g_agg[v * inp + j] += wa[i * inp + j] * gzi;
                }
            }
        }
        // adjoint of the neighbor sum: scatter back over ne(v)
        for v in 0..n {
            for &u in s.graph.neighbors(v) {
                for j in 0..inp {
                    g_prev[v * inp + j] += g_agg[u * inp + j];
                }
            }
        }
        gh = g_prev;
    }
    Ok((loss, g, saturated))
}

/// Mean BCE over `batch` and its exact gradient. Per-graph work may run in
/// parallel; the reduction is always in batch order.
pub fn loss_and_grads(params: &ModelParams, batch: &[Sample], exec: Execution) -> Result<LossAndGrads, GnnError> {
    let per_graph = par::map_slice(exec, batch, |s| sample_loss_and_grads(params, s));
    let mut out = LossAndGrads {
        loss: 0.0,
        grads: vec![0.0; params.len()],
        saturated: 0,
    };
    for r in per_graph {
        let (loss, g, sat) = r?;
        out.loss += loss;
        out.saturated += usize::from(sat);
        for (a, b) in out.grads.iter_mut().zip(&g) {
            *a += b;
        }
    }
    if !batch.is_empty() {
        let m = batch.len() as f64;
        out.loss /= m;
        out.grads.iter_mut().for_each(|x| *x /= m);
    }
    if out.saturated > 0 {
        log::debug!("{} outputs saturated in the loss", out.saturated);
    }
    Ok(out)
}

/// Adam moment buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(len: usize, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        AdamState {
            m: vec![0.0; len],
            v: vec![0.0; len],
            step: 0,
            beta1,
            beta2,
            epsilon,
        }
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) -> Result<(), GnnError> {
        if grads.len() != params.len() || self.m.len() != params.len() {
            return Err(GnnError::GradientShape {
                expected: params.len(),
                got: grads.len(),
            });
        }
        self.step += 1;
        let c1 = 1.0 - self.beta1.powf(self.step as f64);
        let c2 = 1.0 - self.beta2.powf(self.step as f64);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.epsilon);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub activation: Activation,
    pub hidden: usize,
    pub layers: usize,
    pub train_fraction: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub attribute_mode: AttributeMode,
    pub execution: Execution,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            batch_size: 32,
            epochs: 100,
            seed: 0,
            activation: Activation::Tanh,
            hidden: 32,
            layers: 3,
            train_fraction: 0.8,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            attribute_mode: AttributeMode::default(),
            execution: Execution::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), GnnError> {
        let bad = |m: &str| Err(GnnError::Config(m.to_string()));
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad("train_fraction must lie in (0, 1)");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.batch_size == 0 || self.hidden == 0 || self.layers == 0 {
            return bad("batch_size, hidden and layers must be at least 1");
        }
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return bad("learning_rate must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub diff: f64,
    pub mean_loss: f64,
}

impl EpochRecord {
    fn new(epoch: usize, train_accuracy: f64, test_accuracy: f64, mean_loss: f64) -> Self {
        EpochRecord {
            epoch,
            train_accuracy,
            test_accuracy,
            diff: train_accuracy - test_accuracy,
            mean_loss,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory {
    /// Accuracies of the freshly initialized model, recorded as epoch 0.
    pub initial: EpochRecord,
    /// One record per epoch, `epochs[i].epoch == i + 1`.
    pub epochs: Vec<EpochRecord>,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

impl TrainHistory {
    pub fn last(&self) -> &EpochRecord {
        self.epochs.last().unwrap_or(&self.initial)
    }
}

/// Stratified split: each class contributes `round(n_c · fraction)` graphs
/// to training, kept in `[1, n_c − 1]` when the class has two or more.
pub fn stratified_split<R: Rng>(
    labels: &[u8],
    train_fraction: f64,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<usize>), GnnError> {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..=1u8 {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            return Err(GnnError::Split(format!("class {class} is absent from the training split")));
        }
        members.shuffle(rng);
        let n = members.len();
        let k = if n == 1 {
            1
        } else {
            ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1)
        };
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Network output for every sample.
pub fn predict(params: &ModelParams, samples: &[Sample], exec: Execution) -> Result<Vec<f64>, GnnError> {
    par::map_slice(exec, samples, |s| forward(params, s.graph, s.attrs).map(|f| f.output))
        .into_iter()
        .collect()
}

/// Fraction of samples with `(output ≥ 0.5) == label`.
pub fn accuracy(params: &ModelParams, samples: &[Sample], exec: Execution) -> Result<f64, GnnError> {
    let (acc, _) = accuracy_and_loss(params, samples, exec)?;
    Ok(acc)
}

fn accuracy_and_loss(params: &ModelParams, samples: &[Sample], exec: Execution) -> Result<(f64, f64), GnnError> {
    if samples.is_empty() {
        return Err(GnnError::EmptyPart);
    }
    let outputs = predict(params, samples, exec)?;
    let mut correct = 0usize;
    let mut loss = 0.0;
    for (o, s) in outputs.iter().zip(samples) {
        if u8::from(*o >= 0.5) == s.label {
            correct += 1;
        }
        loss += bce(*o, s.label).0;
    }
    let m = samples.len() as f64;
    Ok((correct as f64 / m, loss / m))
}

pub fn samples<'a>(dataset: &'a Dataset, attrs: &'a AttributeMatrix, indices: &[usize]) -> Vec<Sample<'a>> {
    indices
        .iter()
        .map(|&i| Sample {
            graph: &dataset.graphs()[i],
            attrs: &attrs.graphs[i],
            label: dataset.labels()[i],
        })
        .collect()
}

/// Trains on a dataset, deriving node attributes from `config.attribute_mode`.
pub fn train(dataset: &Dataset, config: &TrainConfig) -> Result<TrainHistory, GnnError> {
    let attrs = attribute_matrix(dataset, config.attribute_mode)?;
    train_with_attributes(dataset, &attrs, config)
}

/// Seeded split, initialization and minibatch order; per-epoch accuracies on
/// both halves.
pub fn train_with_attributes(
    dataset: &Dataset,
    attrs: &AttributeMatrix,
    config: &TrainConfig,
) -> Result<TrainHistory, GnnError> {
    Ok(train_model(dataset, attrs, config)?.0)
}

/// Like [`train_with_attributes`] but also returns the trained parameters.
pub fn train_model(
    dataset: &Dataset,
    attrs: &AttributeMatrix,
    config: &TrainConfig,
) -> Result<(TrainHistory, ModelParams), GnnError> {
    config.validate()?;
    let exec = config.execution;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (train_idx, test_idx) = stratified_split(dataset.labels(), config.train_fraction, &mut rng)?;
    if test_idx.is_empty() {
        return Err(GnnError::Split("test split is empty".into()));
    }
    let mut params = ModelParams::init(config.activation, config.layers, config.hidden, attrs.dim, &mut rng);
    let train_set = samples(dataset, attrs, &train_idx);
    let test_set = samples(dataset, attrs, &test_idx);

    let evaluate = |params: &ModelParams| -> Result<(f64, f64, f64), GnnError> {
        let (train_acc, train_loss) = accuracy_and_loss(params, &train_set, exec)?;
        let (test_acc, _) = accuracy_and_loss(params, &test_set, exec)?;
        Ok((train_acc, test_acc, train_loss))
    };
    let (tr, te, loss0) = evaluate(&params)?;
    let initial = EpochRecord::new(0, tr, te, loss0);

    let mut adam = AdamState::new(params.len(), config.beta1, config.beta2, config.epsilon);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut epochs = Vec::with_capacity(config.epochs);
    let mut batch = Vec::with_capacity(config.batch_size);
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| train_set[i]));
            let lg = loss_and_grads(&params, &batch, exec)?;
            adam.step(&mut params.values, &lg.grads, config.learning_rate)?;
            loss_sum += lg.loss * chunk.len() as f64;
        }
        let (tr, te, _) = evaluate(&params)?;
        epochs.push(EpochRecord::new(epoch, tr, te, loss_sum / train_set.len() as f64));
    }
    Ok((
        TrainHistory {
            initial,
            epochs,
            train_indices: train_idx,
            test_indices: test_idx,
        },
        params,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn layout_matches_parameter_count() {
        for (l, d, q) in [(1, 1, 1), (2, 2, 1), (3, 32, 37), (4, 16, 5)] {
            let layout = ParamLayout {
                layers: l,
                hidden: d,
                attr_dim: q,
            };
            let expected = crate::bounds::param_count_simple(d as u64, l as u64, q as u64).unwrap();
            assert_eq!(layout.len() as u64, expected);
        }
    }

    #[test]
    fn zero_params_give_one_half() {
        for sigma in Activation::ALL {
            let p = ModelParams::zeros(sigma, 2, 3, 1);
            let f = forward(&p, &triangle(), &[1.0, 1.0, 1.0]).unwrap();
            assert_eq!(f.output, 0.5);
        }
    }

    #[test]
    fn isolated_node_ignores_aggregation() {
        let g = Graph::from_edges(1, []).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = ModelParams::init(Activation::Tanh, 1, 2, 2, &mut rng);
        let x = [0.3, -0.7];
        let f = forward(&p, &g, &x).unwrap();
        let l = p.layout;
        for i in 0..2 {
            let wc = &p.values[l.comb(0)][i * 2..i * 2 + 2];
            let z = p.values[l.bias(0)][i] + wc[0] * x[0] + wc[1] * x[1];
            assert_eq!(f.hidden[1][i], z.tanh());
        }
    }

    #[test]
    fn shape_mismatch() {
        let p = ModelParams::zeros(Activation::Tanh, 1, 2, 2);
        assert!(matches!(
            forward(&p, &triangle(), &[1.0; 3]),
            Err(GnnError::Shape { .. })
        ));
    }

    #[test]
    fn bce_examples() {
        let (loss, sat) = bce(0.5, 0);
        assert!((loss - 2f64.ln()).abs() < 1e-15 && !sat);
        assert!((bce(0.5, 1).0 - 2f64.ln()).abs() < 1e-15);
        let (loss, _) = bce(1.0 - 1e-12, 1);
        assert!((loss - 1e-12).abs() < 1e-15);
        let (loss, sat) = bce(1.0, 0);
        assert!(sat && loss.is_finite());
    }

    #[test]
    fn adam_examples() {
        let mut p = vec![0.5, -1.0];
        let mut a = AdamState::new(2, 0.9, 0.999, 1e-8);
        a.step(&mut p, &[0.0, 0.0], 1e-3).unwrap();
        assert_eq!(p, vec![0.5, -1.0]);
        let mut a = AdamState::new(2, 0.9, 0.999, 1e-8);
        for _ in 0..200 {
            let before = p.clone();
            a.step(&mut p, &[0.3, -2.0], 1e-3).unwrap();
            for (x, y) in p.iter().zip(&before) {
                assert!((x - y).abs() <= 1e-3 * (1.0 + 1e-8));
            }
        }
    }

    #[test]
    fn split_is_stratified() {
        let labels = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (tr, te) = stratified_split(&labels, 0.8, &mut rng).unwrap();
        assert_eq!(tr.len(), 8);
        assert_eq!(te.iter().filter(|&&i| labels[i] == 1).count(), 1);
        assert!(stratified_split(&[1, 1], 0.8, &mut rng).is_err());
    }
}
