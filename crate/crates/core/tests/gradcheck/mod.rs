//! Analytic-versus-finite-difference gradient sweeps. Each returns the worst relative
//! error over its seeds and the seed where it occurred.
#![allow(dead_code)]

use fraudbench_core::numkit::{Activation, DenseNet, LayerSpec, Matrix};
use fraudbench_core::supervised::logistic_loss_and_grad;
use fraudbench_core::unsupervised::autoencoder::AeModel;
use fraudbench_core::unsupervised::gan::{GanModel, GanStop};

use super::oracles::{central_difference, relative_error, OracleRng};

pub const STEP: f64 = 1e-5;
pub const TOL: f64 = 1e-4;

fn random_matrix(rng: &mut OracleRng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.range(-1.5, 1.5)).collect()).unwrap()
}

/// Redraws every parameter, biases included, uniformly from (-0.8, 0.8).
fn randomize(net: &mut DenseNet, rng: &mut OracleRng) {
    let p: Vec<f64> = net.flat_params().iter().map(|_| rng.range(-0.8, 0.8)).collect();
    net.set_flat_params(&p);
}

/// Smallest |pre-activation| feeding a ReLU-type unit, computed independently of the
/// network's own forward pass.
fn kink_margin(net: &DenseNet, x: &Matrix) -> f64 {
    let mut current = x.clone();
    let mut margin = f64::INFINITY;
    for layer in net.layers() {
        let (n_in, n_out) = (layer.weights.rows(), layer.weights.cols());
        let mut next = Matrix::zeros(current.rows(), n_out);
        for r in 0..current.rows() {
            for j in 0..n_out {
                let z = layer.bias[j] + (0..n_in).map(|i| current.get(r, i) * layer.weights.get(i, j)).sum::<f64>();
                if matches!(layer.activation, Activation::Relu | Activation::LeakyRelu(_)) {
                    margin = margin.min(z.abs());
                }
                next.set(r, j, layer.activation.apply(z));
            }
        }
        current = next;
    }
    margin
}

/// Evaluation points closer than this to a kink are redrawn.
const KINK_MARGIN: f64 = 1e-3;

fn weighted_sum(out: &Matrix, weights: &Matrix) -> f64 {
    out.as_slice().iter().zip(weights.as_slice()).map(|(a, b)| a * b).sum()
}

const KINDS: [Activation; 5] = [
    Activation::Relu,
    Activation::LeakyRelu(0.2),
    Activation::Linear,
    Activation::Sigmoid,
    Activation::Tanh,
];

/// Largest error seen so far and its seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Worst {
    pub error: f64,
    pub seed: u64,
    pub part: &'static str,
}

impl Worst {
    fn new() -> Self {
        Worst {
            error: 0.0,
            seed: 0,
            part: "",
        }
    }

    fn record(&mut self, error: f64, seed: u64, part: &'static str) {
        if !(error <= self.error) {
            *self = Worst { error, seed, part };
        }
    }
}

/// Random nets of up to 3 layers x 8 units over every activation; parameter and input
/// gradients of a random linear functional of the output.
pub fn dense_net(seeds: u64) -> Worst {
    let mut worst = Worst::new();
    for seed in 0..seeds {
        let mut rng = OracleRng(seed + 1);
        let depth = 1 + rng.below(3);
        let input = 1 + rng.below(8);
        let specs: Vec<LayerSpec> = (0..depth)
            .map(|_| LayerSpec::new(1 + rng.below(8), KINDS[rng.below(KINDS.len())]))
            .collect();
        let mut net = DenseNet::new(input, &specs, seed);
        randomize(&mut net, &mut rng);
        let mut x = random_matrix(&mut rng, 4, input);
        while kink_margin(&net, &x) < KINK_MARGIN {
            x = random_matrix(&mut rng, 4, input);
        }
        let c = random_matrix(&mut rng, 4, net.output_dim());

        let (_, cache) = net.forward(&x).unwrap();
        let (grads, input_grad) = net.backward(&cache, &c).unwrap();
        let base = net.flat_params();
        let numeric = central_difference(&base, STEP, |p| {
            net.set_flat_params(p);
            weighted_sum(&net.predict(&x).unwrap(), &c)
        });
        net.set_flat_params(&base);
        worst.record(relative_error(&grads.flatten(), &numeric), seed, "parameters");

        let numeric_x = central_difference(x.as_slice(), STEP, |v| {
            let xm = Matrix::from_vec(4, input, v.to_vec()).unwrap();
            weighted_sum(&net.predict(&xm).unwrap(), &c)
        });
        worst.record(relative_error(input_grad.as_slice(), &numeric_x), seed, "inputs");
    }
    worst
}

fn mini_ae(seed: u64) -> AeModel {
    let encoder = DenseNet::new(
        5,
        &[
            LayerSpec::new(4, Activation::Relu),
            LayerSpec::new(6, Activation::Relu),
            LayerSpec::new(3, Activation::Linear),
        ],
        seed,
    );
    let decoder = DenseNet::new(
        3,
        &[
            LayerSpec::new(6, Activation::Relu),
            LayerSpec::new(4, Activation::Relu),
            LayerSpec::new(5, Activation::Linear),
        ],
        seed ^ 0xabc,
    );
    AeModel::from_nets(encoder, decoder).unwrap()
}

fn ae_margin(m: &AeModel, x: &Matrix) -> f64 {
    let code = m.encoder.predict(x).unwrap();
    kink_margin(&m.encoder, x).min(kink_margin(&m.decoder, &code))
}

/// Reconstruction-loss gradients of a miniature auto-encoder (5-4-6-3 / 3-6-4-5).
pub fn autoencoder(seeds: u64) -> Worst {
    let mut worst = Worst::new();
    for seed in 0..seeds {
        let mut rng = OracleRng(seed + 11);
        let mut model = mini_ae(seed);
        randomize(&mut model.encoder, &mut rng);
        randomize(&mut model.decoder, &mut rng);
        let mut x = random_matrix(&mut rng, 6, 5);
        while ae_margin(&model, &x) < KINK_MARGIN {
            x = random_matrix(&mut rng, 6, 5);
        }
        let (_, enc_g, dec_g) = model.loss_and_gradients(&x).unwrap();

        let enc0 = model.encoder.flat_params();
        let numeric = central_difference(&enc0, STEP, |p| {
            model.encoder.set_flat_params(p);
            model.loss_and_gradients(&x).unwrap().0
        });
        model.encoder.set_flat_params(&enc0);
        worst.record(relative_error(&enc_g.flatten(), &numeric), seed, "encoder");

        let dec0 = model.decoder.flat_params();
        let numeric = central_difference(&dec0, STEP, |p| {
            model.decoder.set_flat_params(p);
            model.loss_and_gradients(&x).unwrap().0
        });
        worst.record(relative_error(&dec_g.flatten(), &numeric), seed, "decoder");
    }
    worst
}

fn mini_gan(seed: u64) -> GanModel {
    let (d, latent) = (4, 3);
    GanModel {
        encoder: DenseNet::new(
            d,
            &[LayerSpec::new(5, Activation::LEAKY), LayerSpec::new(latent, Activation::Linear)],
            seed,
        ),
        generator: DenseNet::new(
            latent,
            &[
                LayerSpec::new(5, Activation::Relu),
                LayerSpec::new(7, Activation::Relu),
                LayerSpec::new(d, Activation::Linear),
            ],
            seed + 1,
        ),
        discriminator: DenseNet::new(
            d + latent,
            &[LayerSpec::new(5, Activation::LEAKY), LayerSpec::new(1, Activation::Linear)],
            seed + 2,
        ),
        alpha: 0.9,
        input_columns: (0..d).collect(),
        n_features: d,
        epochs_trained: 0,
        d_loss_history: Vec::new(),
        ge_loss_history: Vec::new(),
        stop: GanStop::Completed,
    }
}

fn gan_margin(m: &GanModel, x: &Matrix, z: &Matrix) -> f64 {
    let ex = m.encoder.predict(x).unwrap();
    let gz = m.generator.predict(z).unwrap();
    kink_margin(&m.encoder, x)
        .min(kink_margin(&m.generator, z))
        .min(kink_margin(&m.discriminator, &x.hconcat(&ex)))
        .min(kink_margin(&m.discriminator, &gz.hconcat(z)))
}

/// Discriminator, encoder and generator gradients of a miniature GAN. Panics if the
/// discriminator-only path disagrees with the joint one.
pub fn gan(seeds: u64) -> Worst {
    let mut worst = Worst::new();
    for seed in 0..seeds {
        let mut rng = OracleRng(seed + 101);
        let mut m = mini_gan(seed * 3);
        randomize(&mut m.encoder, &mut rng);
        randomize(&mut m.generator, &mut rng);
        randomize(&mut m.discriminator, &mut rng);
        let (mut x, mut z) = (random_matrix(&mut rng, 5, 4), random_matrix(&mut rng, 5, 3));
        while gan_margin(&m, &x, &z) < KINK_MARGIN {
            x = random_matrix(&mut rng, 5, 4);
            z = random_matrix(&mut rng, 5, 3);
        }
        let l = m.adversarial_losses(&x, &z).unwrap();

        let (d_only, d_only_grads) = m.discriminator_loss(&x, &z).unwrap();
        let consistency = (d_only - l.d_loss)
            .abs()
            .max(relative_error(&d_only_grads.flatten(), &l.d_grads.flatten()));
        assert!(consistency < 1e-12, "seed {seed}: discriminator-only path differs by {consistency}");

        let d0 = m.discriminator.flat_params();
        let numeric = central_difference(&d0, STEP, |p| {
            m.discriminator.set_flat_params(p);
            m.adversarial_losses(&x, &z).unwrap().d_loss
        });
        m.discriminator.set_flat_params(&d0);
        worst.record(relative_error(&l.d_grads.flatten(), &numeric), seed, "discriminator");

        let e0 = m.encoder.flat_params();
        let numeric = central_difference(&e0, STEP, |p| {
            m.encoder.set_flat_params(p);
            m.adversarial_losses(&x, &z).unwrap().ge_loss
        });
        m.encoder.set_flat_params(&e0);
        worst.record(relative_error(&l.e_grads.flatten(), &numeric), seed, "encoder");

        let g0 = m.generator.flat_params();
        let numeric = central_difference(&g0, STEP, |p| {
            m.generator.set_flat_params(p);
            m.adversarial_losses(&x, &z).unwrap().ge_loss
        });
        worst.record(relative_error(&l.g_grads.flatten(), &numeric), seed, "generator");
    }
    worst
}

/// Logistic negative log-likelihood gradient in the intercept and coefficients.
pub fn logistic(seeds: u64) -> Worst {
    let mut worst = Worst::new();
    for seed in 0..seeds {
        let mut rng = OracleRng(seed + 1001);
        let (n, p) = (8, 1 + rng.below(5));
        let x = random_matrix(&mut rng, n, p);
        let y: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
        let params: Vec<f64> = (0..=p).map(|_| rng.range(-2.0, 2.0)).collect();
        let (_, g0, g) = logistic_loss_and_grad(params[0], &params[1..], &x, &y);
        let numeric = central_difference(&params, STEP, |q| logistic_loss_and_grad(q[0], &q[1..], &x, &y).0);
        let mut analytic = vec![g0];
        analytic.extend(g);
        worst.record(relative_error(&analytic, &numeric), seed, "coefficients");
    }
    worst
}
