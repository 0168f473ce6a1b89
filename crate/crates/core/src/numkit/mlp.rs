//! Sequential multilayer perceptrons with exact reverse-mode gradients.
//!
//! Each layer computes `a = act(bn(x·W + b))` where `W` is stored
//! `in_dim × out_dim` and the batch-norm step is optional. A forward pass
//! returns a [`Tape`] holding every intermediate needed by [`MlpState::backward`].
//!
//! Forward passes never mutate the state. In `Train` mode the batch statistics
//! land on the tape and can be folded into the running estimates afterwards
//! with [`MlpState::absorb_batch_stats`].

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution, Uniform};
use rand::Rng;

use super::matrix::Matrix;
use crate::{Error, Result};

pub const DEFAULT_LEAKY_SLOPE: f64 = 0.01;
pub const BN_EPS: f64 = 1e-5;
/// Weight kept on the old running estimate at each update.
pub const BN_MOMENTUM: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Activation {
    LeakyRelu(f64),
    Sigmoid,
    Tanh,
    Softmax,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
    pub batch_norm: bool,
}

impl LayerSpec {
    pub fn new(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        LayerSpec {
            in_dim,
            out_dim,
            activation,
            batch_norm: false,
        }
    }

    pub fn with_batch_norm(mut self) -> Self {
        self.batch_norm = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MlpSpec {
    layers: Vec<LayerSpec>,
}

impl MlpSpec {
    pub fn new(layers: Vec<LayerSpec>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidConfig(
                "an MLP needs at least one layer".into(),
            ));
        }
        let last = layers.len() - 1;
        for (k, l) in layers.iter().enumerate() {
            if l.in_dim == 0 || l.out_dim == 0 {
                return Err(Error::InvalidConfig(format!(
                    "layer {k} has a zero dimension"
                )));
            }
            match l.activation {
                Activation::Softmax if k != last => {
                    return Err(Error::InvalidConfig(format!(
                        "softmax is only allowed on the last layer (found on layer {k})"
                    )))
                }
                Activation::LeakyRelu(s) if !(s > 0.0 && s < 1.0) => {
                    return Err(Error::InvalidConfig(format!(
                        "leaky relu slope must be in (0,1), got {s}"
                    )))
                }
                _ => {}
            }
            if k < last && l.out_dim != layers[k + 1].in_dim {
                return Err(Error::InvalidConfig(format!(
                    "layer {k} outputs {} but layer {} expects {}",
                    l.out_dim,
                    k + 1,
                    layers[k + 1].in_dim
                )));
            }
        }
        Ok(MlpSpec { layers })
    }

    /// A plain stack: `dims[0] → dims[1] → … → dims[n]`, `hidden` on every
    /// layer but the last, `output` on the last. `bn_layers` lists the layer
    /// indices that get batch normalization.
    pub fn stack(
        dims: &[usize],
        hidden: Activation,
        output: Activation,
        bn_layers: &[usize],
    ) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidConfig("stack needs at least two dims".into()));
        }
        let n = dims.len() - 1;
        let layers = (0..n)
            .map(|k| LayerSpec {
                in_dim: dims[k],
                out_dim: dims[k + 1],
                activation: if k + 1 == n { output } else { hidden },
                batch_norm: bn_layers.contains(&k),
            })
            .collect();
        MlpSpec::new(layers)
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Learnable tensors of one layer. `scale`/`shift` are empty without batch norm.
///
/// The same shape is reused for gradients and RMSProp accumulators.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LayerTensors {
    pub weight: Matrix,
    pub bias: Vec<f64>,
    pub scale: Vec<f64>,
    pub shift: Vec<f64>,
}

impl LayerTensors {
    fn zeros(spec: &LayerSpec) -> Self {
        let bn = if spec.batch_norm { spec.out_dim } else { 0 };
        LayerTensors {
            weight: Matrix::zeros(spec.in_dim, spec.out_dim),
            bias: vec![0.0; spec.out_dim],
            scale: vec![0.0; bn],
            shift: vec![0.0; bn],
        }
    }

    pub(crate) fn slices(&self) -> [&[f64]; 4] {
        [self.weight.as_slice(), &self.bias, &self.scale, &self.shift]
    }

    pub(crate) fn slices_mut(&mut self) -> [&mut [f64]; 4] {
        [
            self.weight.as_mut_slice(),
            &mut self.bias,
            &mut self.scale,
            &mut self.shift,
        ]
    }

    fn len(&self) -> usize {
        self.slices().iter().map(|s| s.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunningStats {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MlpState {
    spec: MlpSpec,
    params: Vec<LayerTensors>,
    running: Vec<Option<RunningStats>>,
    accum: Vec<LayerTensors>,
    /// Bumped on every parameter mutation; tapes remember the value they saw.
    version: u64,
}

/// Parameter gradients, shaped like [`MlpState`]'s parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    layers: Vec<LayerTensors>,
}

impl Gradients {
    pub fn zeros_like(state: &MlpState) -> Self {
        Gradients {
            layers: state.spec.layers.iter().map(LayerTensors::zeros).collect(),
        }
    }

    /// Inverse of [`Gradients::flat`].
    pub fn from_flat(state: &MlpState, values: &[f64]) -> Result<Self> {
        if values.len() != state.param_count() {
            return Err(Error::Shape {
                context: "Gradients::from_flat",
                expected: (state.param_count(), 1),
                actual: (values.len(), 1),
            });
        }
        let mut g = Gradients::zeros_like(state);
        let mut it = values.iter();
        for l in &mut g.layers {
            for s in l.slices_mut() {
                for v in s {
                    *v = *it.next().expect("length checked");
                }
            }
        }
        Ok(g)
    }

    pub fn layers(&self) -> &[LayerTensors] {
        &self.layers
    }

    pub fn add_assign(&mut self, other: &Gradients) -> Result<()> {
        if self.layers.len() != other.layers.len() {
            return Err(Error::Shape {
                context: "Gradients::add_assign",
                expected: (self.layers.len(), 0),
                actual: (other.layers.len(), 0),
            });
        }
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            if a.len() != b.len() || a.weight.shape() != b.weight.shape() {
                return Err(Error::Shape {
                    context: "Gradients::add_assign",
                    expected: a.weight.shape(),
                    actual: b.weight.shape(),
                });
            }
            for (sa, sb) in a.slices_mut().into_iter().zip(b.slices()) {
                for (x, y) in sa.iter_mut().zip(sb) {
                    *x += y;
                }
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, s: f64) {
        for l in &mut self.layers {
            for sl in l.slices_mut() {
                for v in sl {
                    *v *= s;
                }
            }
        }
    }

    /// Flattened in the same order as [`MlpState::param`].
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            for s in l.slices() {
                out.extend_from_slice(s);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.slices().iter().all(|s| s.iter().all(|v| v.is_finite())))
    }
}

#[derive(Debug, Clone)]
struct BnTape {
    normalized: Matrix,
    inv_std: Vec<f64>,
    batch_mean: Vec<f64>,
    batch_var: Vec<f64>,
    train: bool,
}

#[derive(Debug, Clone)]
struct LayerTape {
    input: Matrix,
    /// Input of the activation (after batch norm when present).
    act_in: Matrix,
    output: Matrix,
    bn: Option<BnTape>,
}

/// Everything recorded by one forward pass.
#[derive(Debug, Clone)]
pub struct Tape {
    version: u64,
    mode: Mode,
    layers: Vec<LayerTape>,
}

impl Tape {
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn output(&self) -> &Matrix {
        &self.layers[self.layers.len() - 1].output
    }
}

impl MlpState {
    /// Glorot-uniform weights, zero biases, batch-norm scale 1 and shift 0.
    pub fn new<R: Rng + ?Sized>(spec: MlpSpec, rng: &mut R) -> Self {
        let mut params = Vec::with_capacity(spec.layers.len());
        let mut running = Vec::with_capacity(spec.layers.len());
        for l in &spec.layers {
            let mut t = LayerTensors::zeros(l);
            let limit = libm::sqrt(6.0 / (l.in_dim + l.out_dim) as f64);
            let dist = Uniform::new_inclusive(-limit, limit);
            for w in t.weight.as_mut_slice() {
                *w = dist.sample(rng);
            }
            for s in &mut t.scale {
                *s = 1.0;
            }
            running.push(l.batch_norm.then(|| RunningStats {
                mean: vec![0.0; l.out_dim],
                var: vec![1.0; l.out_dim],
            }));
            params.push(t);
        }
        let accum = spec.layers.iter().map(LayerTensors::zeros).collect();
        MlpState {
            spec,
            params,
            running,
            accum,
            version: 0,
        }
    }

    /// Builds a state from explicit parameters (accumulators start at zero).
    pub fn from_params(spec: MlpSpec, params: Vec<LayerTensors>) -> Result<Self> {
        if params.len() != spec.layers.len() {
            return Err(Error::InvalidConfig(format!(
                "expected {} layers of parameters, got {}",
                spec.layers.len(),
                params.len()
            )));
        }
        for (k, (l, p)) in spec.layers.iter().zip(&params).enumerate() {
            let bn = if l.batch_norm { l.out_dim } else { 0 };
            if p.weight.shape() != (l.in_dim, l.out_dim)
                || p.bias.len() != l.out_dim
                || p.scale.len() != bn
                || p.shift.len() != bn
            {
                return Err(Error::InvalidConfig(format!(
                    "parameter shapes of layer {k} do not match its spec"
                )));
            }
            if p.slices().iter().any(|s| s.iter().any(|v| !v.is_finite())) {
                return Err(Error::NonFinite("MlpState::from_params"));
            }
        }
        let running = spec
            .layers
            .iter()
            .map(|l| {
                l.batch_norm.then(|| RunningStats {
                    mean: vec![0.0; l.out_dim],
                    var: vec![1.0; l.out_dim],
                })
            })
            .collect();
        let accum = spec.layers.iter().map(LayerTensors::zeros).collect();
        Ok(MlpState {
            spec,
            params,
            running,
            accum,
            version: 0,
        })
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn params(&self) -> &[LayerTensors] {
        &self.params
    }

    pub fn running_stats(&self) -> &[Option<RunningStats>] {
        &self.running
    }

    pub fn accumulators(&self) -> &[LayerTensors] {
        &self.accum
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn input_dim(&self) -> usize {
        self.spec.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.spec.output_dim()
    }

    pub fn param_count(&self) -> usize {
        self.params.iter().map(LayerTensors::len).sum()
    }

    fn locate(&self, mut idx: usize) -> (usize, usize, usize) {
        for (k, l) in self.params.iter().enumerate() {
            for (s, sl) in l.slices().iter().enumerate() {
                if idx < sl.len() {
                    return (k, s, idx);
                }
                idx -= sl.len();
            }
        }
        panic!("parameter index out of range");
    }

    /// Flat parameter access: per layer, weights (row-major), bias, scale, shift.
    pub fn param(&self, idx: usize) -> f64 {
        let (k, s, i) = self.locate(idx);
        self.params[k].slices()[s][i]
    }

    pub fn set_param(&mut self, idx: usize, value: f64) {
        let (k, s, i) = self.locate(idx);
        self.params[k].slices_mut()[s][i] = value;
        self.version += 1;
    }

    pub fn max_abs_param(&self) -> f64 {
        self.params
            .iter()
            .flat_map(|l| l.slices())
            .flat_map(|s| s.iter())
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    /// Mutable parameters and accumulators together; bumps the version.
    pub(crate) fn params_and_accum_mut(&mut self) -> (&mut [LayerTensors], &mut [LayerTensors]) {
        self.version += 1;
        (&mut self.params, &mut self.accum)
    }

    /// Runs the network on `batch` (one instance per row).
    pub fn forward(&self, batch: &Matrix, mode: Mode) -> Result<(Matrix, Tape)> {
        batch.ensure_shape("mlp forward input", batch.rows(), self.input_dim())?;
        if batch.rows() == 0 {
            return Err(Error::InvalidData("forward on an empty batch".into()));
        }
        batch.ensure_finite("mlp forward input")?;
        let mut layers = Vec::with_capacity(self.params.len());
        let mut x = batch.clone();
        for (k, (spec, p)) in self.spec.layers.iter().zip(&self.params).enumerate() {
            let mut pre = x.matmul(&p.weight)?;
            for r in 0..pre.rows() {
                for (v, b) in pre.row_mut(r).iter_mut().zip(&p.bias) {
                    *v += b;
                }
            }
            let (act_in, bn) = if spec.batch_norm {
                let (y, t) = batch_norm_forward(&pre, p, self.running[k].as_ref(), mode)?;
                (y, Some(t))
            } else {
                (pre, None)
            };
            let output = activate(&act_in, spec.activation);
            layers.push(LayerTape {
                input: x,
                act_in,
                output: output.clone(),
                bn,
            });
            x = output;
        }
        x.ensure_finite("mlp forward output")?;
        Ok((
            x,
            Tape {
                version: self.version,
                mode,
                layers,
            },
        ))
    }

    /// Folds the batch statistics recorded on a Train-mode tape into the
    /// running estimates. Parameters are untouched, so tapes stay valid.
    pub fn absorb_batch_stats(&mut self, tape: &Tape) {
        for (run, lt) in self.running.iter_mut().zip(&tape.layers) {
            if let (Some(run), Some(bn)) = (run.as_mut(), lt.bn.as_ref()) {
                if !bn.train {
                    continue;
                }
                let n = lt.input.rows() as f64;
                let unbias = n / (n - 1.0);
                for j in 0..run.mean.len() {
                    run.mean[j] =
                        BN_MOMENTUM * run.mean[j] + (1.0 - BN_MOMENTUM) * bn.batch_mean[j];
                    run.var[j] =
                        BN_MOMENTUM * run.var[j] + (1.0 - BN_MOMENTUM) * bn.batch_var[j] * unbias;
                }
            }
        }
    }

    /// Reverse pass. Returns parameter gradients and the gradient with
    /// respect to the forward input.
    pub fn backward(&self, tape: &Tape, output_grad: &Matrix) -> Result<(Gradients, Matrix)> {
        if tape.version != self.version || tape.layers.len() != self.params.len() {
            return Err(Error::StaleTape {
                recorded: tape.version,
                current: self.version,
            });
        }
        let out = tape.output();
        output_grad.ensure_shape("mlp backward output grad", out.rows(), out.cols())?;
        output_grad.ensure_finite("mlp backward output grad")?;

        let mut grads = Gradients::zeros_like(self);
        let mut g = output_grad.clone();
        for k in (0..self.params.len()).rev() {
            let spec = &self.spec.layers[k];
            let lt = &tape.layers[k];
            let p = &self.params[k];
            let mut g_pre = activation_backward(&g, &lt.act_in, &lt.output, spec.activation);
            if let Some(bn) = &lt.bn {
                g_pre = batch_norm_backward(&g_pre, bn, p, &mut grads.layers[k]);
            }
            let gl = &mut grads.layers[k];
            gl.weight = lt.input.t_matmul(&g_pre)?;
            gl.bias = g_pre.col_sums();
            g = g_pre.matmul_t(&p.weight)?;
        }
        Ok((grads, g))
    }
}

fn batch_norm_forward(
    pre: &Matrix,
    p: &LayerTensors,
    running: Option<&RunningStats>,
    mode: Mode,
) -> Result<(Matrix, BnTape)> {
    let (n, c) = pre.shape();
    let (mean, var, train) = match mode {
        Mode::Train => {
            if n < 2 {
                return Err(Error::BatchTooSmall { rows: n });
            }
            let mean: Vec<f64> = pre.col_sums().into_iter().map(|s| s / n as f64).collect();
            let mut var = vec![0.0; c];
            for r in pre.iter_rows() {
                for j in 0..c {
                    let d = r[j] - mean[j];
                    var[j] += d * d;
                }
            }
            for v in &mut var {
                *v /= n as f64;
            }
            (mean, var, true)
        }
        Mode::Eval => {
            let run = running.expect("batch-norm layer without running stats");
            (run.mean.clone(), run.var.clone(), false)
        }
    };
    let inv_std: Vec<f64> = var.iter().map(|v| 1.0 / libm::sqrt(v + BN_EPS)).collect();
    let mut normalized = Matrix::zeros(n, c);
    let mut out = Matrix::zeros(n, c);
    for r in 0..n {
        for j in 0..c {
            let xh = (pre[(r, j)] - mean[j]) * inv_std[j];
            normalized[(r, j)] = xh;
            out[(r, j)] = p.scale[j] * xh + p.shift[j];
        }
    }
    Ok((
        out,
        BnTape {
            normalized,
            inv_std,
            batch_mean: mean,
            batch_var: var,
            train,
        },
    ))
}

fn batch_norm_backward(g: &Matrix, bn: &BnTape, p: &LayerTensors, gl: &mut LayerTensors) -> Matrix {
    let (n, c) = g.shape();
    let mut g_norm = Matrix::zeros(n, c);
    for r in 0..n {
        for j in 0..c {
            gl.scale[j] += g[(r, j)] * bn.normalized[(r, j)];
            gl.shift[j] += g[(r, j)];
            g_norm[(r, j)] = g[(r, j)] * p.scale[j];
        }
    }
    let mut out = Matrix::zeros(n, c);
    if !bn.train {
        for r in 0..n {
            for j in 0..c {
                out[(r, j)] = g_norm[(r, j)] * bn.inv_std[j];
            }
        }
        return out;
    }
    let nf = n as f64;
    for j in 0..c {
        let mut sum = 0.0;
        let mut sum_xh = 0.0;
        for r in 0..n {
            sum += g_norm[(r, j)];
            sum_xh += g_norm[(r, j)] * bn.normalized[(r, j)];
        }
        for r in 0..n {
            out[(r, j)] =
                bn.inv_std[j] / nf * (nf * g_norm[(r, j)] - sum - bn.normalized[(r, j)] * sum_xh);
        }
    }
    out
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

pub(crate) fn softmax_rows(z: &Matrix) -> Matrix {
    let mut out = z.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = libm::exp(*v - max);
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    out
}

fn activate(z: &Matrix, act: Activation) -> Matrix {
    match act {
        Activation::LeakyRelu(s) => z.map(|v| if v > 0.0 { v } else { s * v }),
        Activation::Sigmoid => z.map(sigmoid),
        Activation::Tanh => z.map(libm::tanh),
        Activation::Softmax => softmax_rows(z),
        Activation::Identity => z.clone(),
    }
}

fn activation_backward(g: &Matrix, act_in: &Matrix, out: &Matrix, act: Activation) -> Matrix {
    match act {
        Activation::LeakyRelu(s) => g
            .zip_map(act_in, |gv, z| if z > 0.0 { gv } else { s * gv })
            .expect("tape shapes"),
        Activation::Sigmoid => g
            .zip_map(out, |gv, y| gv * y * (1.0 - y))
            .expect("tape shapes"),
        Activation::Tanh => g
            .zip_map(out, |gv, y| gv * (1.0 - y * y))
            .expect("tape shapes"),
        Activation::Identity => g.clone(),
        Activation::Softmax => {
            let mut res = Matrix::zeros(g.rows(), g.cols());
            for r in 0..g.rows() {
                let gr = g.row(r);
                let sr = out.row(r);
                let dot: f64 = gr.iter().zip(sr).map(|(a, b)| a * b).sum();
                for (o, (gv, sv)) in res.row_mut(r).iter_mut().zip(gr.iter().zip(sr)) {
                    *o = sv * (gv - dot);
                }
            }
            res
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_for;

    fn single_identity() -> MlpState {
        let spec = MlpSpec::new(vec![LayerSpec::new(2, 2, Activation::Identity)]).unwrap();
        let params = vec![LayerTensors {
            weight: Matrix::identity(2),
            bias: vec![0.0; 2],
            scale: vec![],
            shift: vec![],
        }];
        MlpState::from_params(spec, params).unwrap()
    }

    #[test]
    fn identity_layer_passes_input_through() {
        let s = single_identity();
        let x = Matrix::from_vec(1, 2, vec![0.5, -0.5]).unwrap();
        let (y, _) = s.forward(&x, Mode::Eval).unwrap();
        assert_eq!(y.as_slice(), &[0.5, -0.5]);
    }

    #[test]
    fn softmax_of_zero_row_is_uniform() {
        let spec = MlpSpec::new(vec![LayerSpec::new(1, 3, Activation::Softmax)]).unwrap();
        let params = vec![LayerTensors {
            weight: Matrix::zeros(1, 3),
            bias: vec![0.0; 3],
            scale: vec![],
            shift: vec![],
        }];
        let s = MlpState::from_params(spec, params).unwrap();
        let (y, _) = s.forward(&Matrix::filled(1, 1, 0.7), Mode::Eval).unwrap();
        for v in y.as_slice() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(MlpSpec::new(vec![
            LayerSpec::new(2, 3, Activation::Softmax),
            LayerSpec::new(3, 1, Activation::Identity),
        ])
        .is_err());
        assert!(MlpSpec::new(vec![LayerSpec::new(2, 3, Activation::LeakyRelu(1.5))]).is_err());
        assert!(MlpSpec::new(vec![LayerSpec::new(2, 3, Activation::LeakyRelu(0.0))]).is_err());
        assert!(MlpSpec::new(vec![
            LayerSpec::new(2, 3, Activation::Tanh),
            LayerSpec::new(4, 1, Activation::Identity),
        ])
        .is_err());
        assert!(MlpSpec::new(vec![]).is_err());
    }

    #[test]
    fn forward_errors() {
        let spec =
            MlpSpec::stack(&[2, 3, 1], Activation::Tanh, Activation::Identity, &[0]).unwrap();
        let s = MlpState::new(spec, &mut rng_for(1, 0));
        assert!(matches!(
            s.forward(&Matrix::zeros(2, 3), Mode::Eval),
            Err(Error::Shape { .. })
        ));
        assert_eq!(
            s.forward(&Matrix::zeros(1, 2), Mode::Train).unwrap_err(),
            Error::BatchTooSmall { rows: 1 }
        );
        assert!(s.forward(&Matrix::zeros(1, 2), Mode::Eval).is_ok());
    }

    #[test]
    fn stale_tape_is_rejected() {
        let mut s = single_identity();
        let x = Matrix::from_vec(1, 2, vec![0.5, -0.5]).unwrap();
        let (y, tape) = s.forward(&x, Mode::Eval).unwrap();
        s.set_param(0, 2.0);
        assert!(matches!(
            s.backward(&tape, &y),
            Err(Error::StaleTape {
                recorded: 0,
                current: 1
            })
        ));
    }

    #[test]
    fn zero_output_grad_gives_zero_gradients() {
        let spec = MlpSpec::stack(
            &[3, 4, 4, 2],
            Activation::LeakyRelu(0.01),
            Activation::Softmax,
            &[1],
        )
        .unwrap();
        let s = MlpState::new(spec, &mut rng_for(3, 0));
        let x = Matrix::from_vec(3, 3, (0..9).map(|i| i as f64 * 0.1 - 0.4).collect()).unwrap();
        let (y, tape) = s.forward(&x, Mode::Train).unwrap();
        let (g, gin) = s
            .backward(&tape, &Matrix::zeros(y.rows(), y.cols()))
            .unwrap();
        assert!(g.flat().iter().all(|&v| v == 0.0));
        assert!(gin.as_slice().iter().all(|&v| v == 0.0));
        assert_eq!(g.flat().len(), s.param_count());
        assert_eq!(gin.shape(), x.shape());
    }

    #[test]
    fn absorb_moves_running_stats_towards_batch() {
        let spec = MlpSpec::new(vec![
            LayerSpec::new(1, 1, Activation::Identity).with_batch_norm()
        ])
        .unwrap();
        let params = vec![LayerTensors {
            weight: Matrix::identity(1),
            bias: vec![0.0],
            scale: vec![1.0],
            shift: vec![0.0],
        }];
        let mut s = MlpState::from_params(spec, params).unwrap();
        let x = Matrix::from_vec(2, 1, vec![1.0, 3.0]).unwrap();
        let (_, tape) = s.forward(&x, Mode::Train).unwrap();
        let v = s.version();
        s.absorb_batch_stats(&tape);
        assert_eq!(s.version(), v);
        let run = s.running_stats()[0].as_ref().unwrap();
        // batch mean 2, unbiased var 2
        assert!((run.mean[0] - 0.2).abs() < 1e-15);
        assert!((run.var[0] - (0.9 + 0.1 * 2.0)).abs() < 1e-15);
    }
}
