use serde::{Deserialize, Serialize};

use crate::numerics::{Matrix, RandomSource};

use super::adam::{adam_step, AdamState};
use super::loss::{bce_loss, clamp_probability, sigmoid};
use super::spec::AnnParams;
use super::ModelError;

/// One hidden ReLU layer feeding a sigmoid output unit.
///
/// Parameters are one flat vector: hidden weights (`hidden × inputs`, row
/// major), hidden biases, output weights, output bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnModel {
    pub n_inputs: usize,
    pub hidden_units: usize,
    pub params: Vec<f64>,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub final_learning_rate: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub inputs: usize,
    pub hidden: usize,
}

impl Shape {
    pub fn n_params(&self) -> usize {
        self.hidden * self.inputs + 2 * self.hidden + 1
    }

    fn b1(&self) -> usize {
        self.hidden * self.inputs
    }

    fn w2(&self) -> usize {
        self.b1() + self.hidden
    }

    fn b2(&self) -> usize {
        self.w2() + self.hidden
    }
}

fn hidden_layer(params: &[f64], shape: Shape, row: &[f64], out: &mut [f64]) {
    for (u, h) in out.iter_mut().enumerate() {
        let w = &params[u * shape.inputs..(u + 1) * shape.inputs];
        let z = params[shape.b1() + u] + w.iter().zip(row).map(|(a, b)| a * b).sum::<f64>();
        *h = z.max(0.0);
    }
}

pub fn forward(params: &[f64], shape: Shape, row: &[f64]) -> f64 {
    let mut h = vec![0.0; shape.hidden];
    hidden_layer(params, shape, row, &mut h);
    output(params, shape, &h)
}

fn output(params: &[f64], shape: Shape, h: &[f64]) -> f64 {
    let w2 = &params[shape.w2()..shape.b2()];
    sigmoid(params[shape.b2()] + w2.iter().zip(h).map(|(a, b)| a * b).sum::<f64>())
}

/// Mean BCE over `rows` and its gradient by backpropagation.
pub fn loss_and_gradient(
    params: &[f64],
    shape: Shape,
    x: &Matrix,
    y: &[u8],
    rows: &[usize],
) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; params.len()];
    let mut h = vec![0.0; shape.hidden];
    let mut loss = 0.0;
    let inv_n = 1.0 / rows.len() as f64;
    for &i in rows {
        let row = x.row(i);
        hidden_layer(params, shape, row, &mut h);
        let p = output(params, shape, &h);
        let pc = clamp_probability(p);
        loss -= if y[i] == 1 { pc.ln() } else { (1.0 - pc).ln() };
        let dz = (p - f64::from(y[i])) * inv_n;
        grad[shape.b2()] += dz;
        for u in 0..shape.hidden {
            grad[shape.w2() + u] += dz * h[u];
            if h[u] > 0.0 {
                let dh = dz * params[shape.w2() + u];
                grad[shape.b1() + u] += dh;
                for (g, a) in grad[u * shape.inputs..(u + 1) * shape.inputs].iter_mut().zip(row) {
                    *g += dh * a;
                }
            }
        }
    }
    (loss * inv_n, grad)
}

impl AnnModel {
    pub fn shape(&self) -> Shape {
        Shape {
            inputs: self.n_inputs,
            hidden: self.hidden_units,
        }
    }

    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        let shape = self.shape();
        x.row_iter().map(|r| forward(&self.params, shape, r)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|v| v.is_finite())
    }
}

/// Glorot-uniform weights, zero biases.
pub fn initial_params(shape: Shape, rng: &mut RandomSource) -> Vec<f64> {
    let mut params = vec![0.0; shape.n_params()];
    let r1 = (6.0 / (shape.inputs + shape.hidden) as f64).sqrt();
    for w in &mut params[..shape.b1()] {
        *w = rng.uniform(-r1, r1);
    }
    let r2 = (6.0 / (shape.hidden + 1) as f64).sqrt();
    for w in &mut params[shape.w2()..shape.b2()] {
        *w = rng.uniform(-r2, r2);
    }
    params
}

/// Splits row indices into (train, validation), taking `fraction` of each
/// class for validation. A class with at least two rows contributes at
/// least one.
pub fn stratified_holdout(y: &[u8], fraction: f64, rng: &mut RandomSource) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut val = Vec::new();
    for class in [0u8, 1] {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        rng.shuffle(&mut members);
        let m = members.len();
        let mut take = (fraction * m as f64).round() as usize;
        if m >= 2 {
            take = take.clamp(1, m - 1);
        } else {
            take = 0;
        }
        val.extend_from_slice(&members[..take]);
        train.extend_from_slice(&members[take..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    (train, val)
}

/// Mini-batch Adam on BCE. After each epoch the validation loss is checked:
/// `plateau_patience` epochs without an improvement of `min_delta` divide
/// the learning rate by `decay_factor`, and `early_stop_patience` such
/// epochs end training. The best-validation weights are returned along
/// with the per-epoch validation losses.
pub fn train(
    x: &Matrix,
    y: &[u8],
    x_val: &Matrix,
    y_val: &[u8],
    params: &AnnParams,
    seed: u64,
) -> Result<(AnnModel, Vec<f64>), ModelError> {
    if x_val.rows() == 0 || y_val.is_empty() {
        return Err(ModelError::EmptyValidation);
    }
    let shape = Shape {
        inputs: x.cols(),
        hidden: params.hidden_units,
    };
    let mut rng = RandomSource::new(seed);
    let mut weights = initial_params(shape, &mut rng);
    let mut adam = AdamState::with_betas(
        weights.len(),
        params.learning_rate,
        params.beta1,
        params.beta2,
        params.epsilon,
    );
    let mut order: Vec<usize> = (0..x.rows()).collect();
    let mut best = (f64::INFINITY, weights.clone(), 0);
    let mut plateau = 0;
    let mut stale = 0;
    let mut log = Vec::new();
    let mut epochs_run = 0;

    for epoch in 1..=params.max_epochs {
        epochs_run = epoch;
        rng.shuffle(&mut order);
        for batch in order.chunks(params.batch_size) {
            let (_, grad) = loss_and_gradient(&weights, shape, x, y, batch);
            adam_step(&mut weights, &grad, &mut adam)?;
        }
        let val_probs: Vec<f64> = x_val.row_iter().map(|r| forward(&weights, shape, r)).collect();
        let val_loss = bce_loss(y_val, &val_probs)?;
        log.push(val_loss);

        if val_loss < best.0 - params.min_delta {
            best = (val_loss, weights.clone(), epoch);
            plateau = 0;
            stale = 0;
        } else {
            plateau += 1;
            stale += 1;
            if stale >= params.early_stop_patience {
                break;
            }
            if plateau >= params.plateau_patience {
                adam.learning_rate /= params.decay_factor;
                plateau = 0;
                log::debug!("epoch {epoch}: validation plateau, learning rate now {}", adam.learning_rate);
            }
        }
    }

    Ok((
        AnnModel {
            n_inputs: shape.inputs,
            hidden_units: shape.hidden,
            params: best.1,
            epochs_run,
            best_epoch: best.2,
            final_learning_rate: adam.learning_rate,
        },
        log,
    ))
}
