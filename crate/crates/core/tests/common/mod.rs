//! Reference implementations written without the library's internals: a
//! straight-line MLP with its own backprop, and a textbook Adam.
#![allow(dead_code)]

use std::f64::consts::PI;

use gan_mdf::nn::{ActivationKind, DenseNetwork};

#[derive(Debug, Clone, Copy)]
pub enum Act {
    Sigmoid,
    Leaky(f64),
    Ricker,
    Dft,
    Imq,
    Identity,
}

impl From<ActivationKind> for Act {
    fn from(k: ActivationKind) -> Self {
        match k {
            ActivationKind::Sigmoid => Act::Sigmoid,
            ActivationKind::LeakyRelu { alpha } => Act::Leaky(alpha),
            ActivationKind::Ricker => Act::Ricker,
            ActivationKind::Dft => Act::Dft,
            ActivationKind::InverseMultiquadratic => Act::Imq,
            ActivationKind::Identity => Act::Identity,
        }
    }
}

fn ricker_u(x: f64) -> f64 {
    (PI * x / 1000.0).powi(2)
}

pub fn activate(a: Act, z: &[f64]) -> Vec<f64> {
    match a {
        Act::Dft => {
            let m = z.len() as f64;
            (0..z.len())
                .map(|n| {
                    z.iter()
                        .enumerate()
                        .map(|(k, zk)| zk * (2.0 * PI * (n * k) as f64 / m).cos())
                        .sum()
                })
                .collect()
        }
        _ => z
            .iter()
            .map(|&x| match a {
                Act::Sigmoid => 1.0 / (1.0 + (-x).exp()),
                Act::Leaky(alpha) => {
                    if x > 0.0 {
                        x
                    } else {
                        alpha * x
                    }
                }
                Act::Ricker => {
                    let u = ricker_u(x);
                    (1.0 - 2.0 * u * (-u).exp()).powi(2)
                }
                Act::Imq => 1.0 / (1.0 + x * x).sqrt(),
                Act::Identity => x,
                Act::Dft => unreachable!(),
            })
            .collect(),
    }
}

/// Gradient w.r.t. the pre-activation `z`, given upstream gradient `g`.
pub fn activate_back(a: Act, z: &[f64], g: &[f64]) -> Vec<f64> {
    match a {
        Act::Dft => {
            let m = z.len() as f64;
            (0..z.len())
                .map(|k| {
                    g.iter()
                        .enumerate()
                        .map(|(n, gn)| gn * (2.0 * PI * (n * k) as f64 / m).cos())
                        .sum()
                })
                .collect()
        }
        _ => z
            .iter()
            .zip(g)
            .map(|(&x, &gi)| {
                let d = match a {
                    Act::Sigmoid => {
                        let s = 1.0 / (1.0 + (-x).exp());
                        s * (1.0 - s)
                    }
                    Act::Leaky(alpha) => {
                        if x > 0.0 {
                            1.0
                        } else {
                            alpha
                        }
                    }
                    Act::Ricker => {
                        let u = ricker_u(x);
                        let e = (-u).exp();
                        let inner = 1.0 - 2.0 * u * e;
                        let dinner_du = 2.0 * e * (u - 1.0);
                        let du_dx = 2.0 * PI * PI * x / 1.0e6;
                        2.0 * inner * dinner_du * du_dx
                    }
                    Act::Imq => -x / (1.0 + x * x).powf(1.5),
                    Act::Identity => 1.0,
                    Act::Dft => unreachable!(),
                };
                gi * d
            })
            .collect(),
    }
}

/// Plain MLP: `w[l][o][i]`, `b[l][o]`, activation per layer.
#[derive(Debug, Clone)]
pub struct Mlp {
    pub w: Vec<Vec<Vec<f64>>>,
    pub b: Vec<Vec<f64>>,
    pub acts: Vec<Act>,
}

pub struct Pass {
    pub pre: Vec<Vec<f64>>,
    pub post: Vec<Vec<f64>>, // post[0] is the input
}

impl Pass {
    pub fn output(&self) -> &[f64] {
        self.post.last().unwrap()
    }
}

/// Parameter gradients in the same layout as the network.
#[derive(Debug, Clone)]
pub struct MlpGrad {
    pub w: Vec<Vec<Vec<f64>>>,
    pub b: Vec<Vec<f64>>,
}

impl Mlp {
    pub fn from_network(net: &DenseNetwork) -> Self {
        let sizes = net.layer_sizes();
        let mut w = Vec::new();
        let mut b = Vec::new();
        let mut acts = Vec::new();
        for l in 0..sizes.len() - 1 {
            let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
            let flat = net.weights(l);
            w.push((0..fan_out).map(|o| flat[o * fan_in..(o + 1) * fan_in].to_vec()).collect());
            b.push(net.biases(l).to_vec());
            acts.push(Act::from(net.activation(l)));
        }
        Mlp { w, b, acts }
    }

    pub fn forward(&self, x: &[f64]) -> Pass {
        let mut pre = Vec::new();
        let mut post = vec![x.to_vec()];
        for l in 0..self.w.len() {
            let input = post.last().unwrap();
            let z: Vec<f64> = self.w[l]
                .iter()
                .zip(&self.b[l])
                .map(|(row, bias)| bias + row.iter().zip(input).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            post.push(activate(self.acts[l], &z));
            pre.push(z);
        }
        Pass { pre, post }
    }

    pub fn zero_grad(&self) -> MlpGrad {
        MlpGrad {
            w: self.w.iter().map(|l| l.iter().map(|r| vec![0.0; r.len()]).collect()).collect(),
            b: self.b.iter().map(|l| vec![0.0; l.len()]).collect(),
        }
    }

    /// Accumulates parameter gradients into `acc`; returns the input gradient.
    pub fn backward(&self, pass: &Pass, upstream: &[f64], acc: &mut MlpGrad) -> Vec<f64> {
        let mut g = upstream.to_vec();
        for l in (0..self.w.len()).rev() {
            let dz = activate_back(self.acts[l], &pass.pre[l], &g);
            let input = &pass.post[l];
            let mut dx = vec![0.0; input.len()];
            for (o, row) in self.w[l].iter().enumerate() {
                acc.b[l][o] += dz[o];
                for (i, wi) in row.iter().enumerate() {
                    acc.w[l][o][i] += dz[o] * input[i];
                    dx[i] += dz[o] * wi;
                }
            }
            g = dx;
        }
        g
    }

    pub fn flat_params(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for l in 0..self.w.len() {
            for row in &self.w[l] {
                v.extend(row);
            }
            v.extend(&self.b[l]);
        }
        v
    }

    pub fn set_flat_params(&mut self, v: &[f64]) {
        let mut it = v.iter().copied();
        for l in 0..self.w.len() {
            for row in self.w[l].iter_mut() {
                for p in row.iter_mut() {
                    *p = it.next().unwrap();
                }
            }
            for p in self.b[l].iter_mut() {
                *p = it.next().unwrap();
            }
        }
    }
}

impl MlpGrad {
    pub fn flat(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for l in 0..self.w.len() {
            for row in &self.w[l] {
                v.extend(row);
            }
            v.extend(&self.b[l]);
        }
        v
    }
}

/// Flattened parameters of a library network in the same order as [`Mlp::flat_params`].
pub fn network_params(net: &DenseNetwork) -> Vec<f64> {
    Mlp::from_network(net).flat_params()
}

/// Textbook Adam over a flat parameter vector.
#[derive(Debug, Clone)]
pub struct RefAdam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl RefAdam {
    pub fn new(n: usize) -> Self {
        RefAdam { m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) {
        let (b1, b2, eps) = (0.9f64, 0.999f64, 1e-8);
        self.t += 1;
        for i in 0..params.len() {
            self.m[i] = b1 * self.m[i] + (1.0 - b1) * grads[i];
            self.v[i] = b2 * self.v[i] + (1.0 - b2) * grads[i] * grads[i];
            let m_hat = self.m[i] / (1.0 - b1.powi(self.t));
            let v_hat = self.v[i] / (1.0 - b2.powi(self.t));
            params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}

/// The three networks of a model as plain MLPs.
#[derive(Debug, Clone)]
pub struct RefModel {
    pub lf: Mlp,
    pub hf: Mlp,
    pub disc: Mlp,
}

impl RefModel {
    pub fn generate(&self, x: &[f64]) -> (Vec<f64>, Pass) {
        let q = self.lf.forward(x).output().to_vec();
        let mut joined = x.to_vec();
        joined.extend(q);
        let pass = self.hf.forward(&joined);
        (pass.output().to_vec(), pass)
    }

    /// Mean squared error and its HF-block gradient.
    pub fn supervised(&self, batch: &[(Vec<f64>, Vec<f64>)]) -> (f64, Vec<f64>) {
        let n = batch.len() as f64;
        let mut grad = self.hf.zero_grad();
        let mut loss = 0.0;
        for (x, y) in batch {
            let (g, pass) = self.generate(x);
            let up: Vec<f64> = g.iter().zip(y).map(|(a, b)| 2.0 * (a - b) / n).collect();
            loss += g.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n;
            self.hf.backward(&pass, &up, &mut grad);
        }
        (loss, grad.flat())
    }

    /// `mean(1 - D(y)) + mean(D(G(x)))` with (HF, D) gradients.
    pub fn discriminative(&self, batch: &[(Vec<f64>, Vec<f64>)]) -> (f64, Vec<f64>, Vec<f64>) {
        let n = batch.len() as f64;
        let mut gh = self.hf.zero_grad();
        let mut gd = self.disc.zero_grad();
        let mut loss = 0.0;
        for (x, y) in batch {
            let real = self.disc.forward(y);
            loss += (1.0 - real.output()[0]) / n;
            self.disc.backward(&real, &[-1.0 / n], &mut gd);
            let (g, hp) = self.generate(x);
            let fake = self.disc.forward(&g);
            loss += fake.output()[0] / n;
            let dg = self.disc.backward(&fake, &[1.0 / n], &mut gd);
            self.hf.backward(&hp, &dg, &mut gh);
        }
        (loss, gh.flat(), gd.flat())
    }

    /// `mean(1 - D(G(x)))` with (HF, D) gradients.
    pub fn generative(&self, batch: &[(Vec<f64>, Vec<f64>)]) -> (f64, Vec<f64>, Vec<f64>) {
        let n = batch.len() as f64;
        let mut gh = self.hf.zero_grad();
        let mut gd = self.disc.zero_grad();
        let mut loss = 0.0;
        for (x, _) in batch {
            let (g, hp) = self.generate(x);
            let fake = self.disc.forward(&g);
            loss += (1.0 - fake.output()[0]) / n;
            let dg = self.disc.backward(&fake, &[-1.0 / n], &mut gd);
            self.hf.backward(&hp, &dg, &mut gh);
        }
        (loss, gh.flat(), gd.flat())
    }
}

/// Losses recorded by one scripted iteration.
#[derive(Debug, Clone, Copy)]
pub struct ScriptedLosses {
    pub supervised: f64,
    pub discriminative: f64,
    pub generative: f64,
}

/// Optimizer states for the scripted iteration, mirroring one state per
/// (network, loss) pair.
pub struct ScriptedOptimizers {
    pub hf_s: RefAdam,
    pub hf_d: RefAdam,
    pub hf_g: RefAdam,
    pub d_d: RefAdam,
    pub d_g: RefAdam,
}

impl ScriptedOptimizers {
    pub fn new(m: &RefModel) -> Self {
        let nh = m.hf.flat_params().len();
        let nd = m.disc.flat_params().len();
        ScriptedOptimizers {
            hf_s: RefAdam::new(nh),
            hf_d: RefAdam::new(nh),
            hf_g: RefAdam::new(nh),
            d_d: RefAdam::new(nd),
            d_g: RefAdam::new(nd),
        }
    }
}

/// The five update stages written out one after another.
pub fn scripted_iteration(
    m: &mut RefModel,
    batch: &[(Vec<f64>, Vec<f64>)],
    (eta_s, eta_d, eta_g): (f64, f64, f64),
    paper_faithful: bool,
    opt: &mut ScriptedOptimizers,
) -> ScriptedLosses {
    // Stage 1: supervised step on HF.
    let (l_s, g) = m.supervised(batch);
    let mut hf = m.hf.flat_params();
    opt.hf_s.step(&mut hf, &g, eta_s);
    m.hf.set_flat_params(&hf);

    // Stage 2: discriminative loss.
    let (l_d, gh, gd) = m.discriminative(batch);
    if paper_faithful {
        let mut hf = m.hf.flat_params();
        opt.hf_d.step(&mut hf, &gh, eta_d);
        m.hf.set_flat_params(&hf);
    }
    let mut d = m.disc.flat_params();
    opt.d_d.step(&mut d, &gd, eta_d);
    m.disc.set_flat_params(&d);

    // Stage 3.
    let (_, g) = m.supervised(batch);
    let mut hf = m.hf.flat_params();
    opt.hf_s.step(&mut hf, &g, eta_s);
    m.hf.set_flat_params(&hf);

    // Stage 4: generative loss.
    let (l_g, gh, gd) = m.generative(batch);
    let mut hf = m.hf.flat_params();
    opt.hf_g.step(&mut hf, &gh, eta_g);
    m.hf.set_flat_params(&hf);
    if paper_faithful {
        let mut d = m.disc.flat_params();
        opt.d_g.step(&mut d, &gd, eta_g);
        m.disc.set_flat_params(&d);
    }

    // Stage 5.
    let (_, g) = m.supervised(batch);
    let mut hf = m.hf.flat_params();
    opt.hf_s.step(&mut hf, &g, eta_s);
    m.hf.set_flat_params(&hf);

    ScriptedLosses { supervised: l_s, discriminative: l_d, generative: l_g }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

use gan_mdf::model::{AdversarialOptimizers, Architecture, GanMdfModel, TrainingConfig, TrainingMode};
use gan_mdf::data::Sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gradients this small are compared absolutely; relative error is
/// meaningless once finite-difference noise (~1e-10) dominates.
pub const GRAD_FLOOR: f64 = 1e-5;

fn rel_err(a: f64, f: f64) -> f64 {
    let scale = a.abs().max(f.abs());
    if scale < GRAD_FLOOR {
        (a - f).abs() / GRAD_FLOOR
    } else {
        (a - f).abs() / scale
    }
}

pub struct GradCheck {
    pub max_rel: f64,
    pub max_oracle_diff: f64,
    pub networks: usize,
}

/// Random network with `kind` in every hidden layer; kinked activations
/// are redrawn until no pre-activation sits near the kink.
pub fn random_network(kind: ActivationKind, rng: &mut ChaCha8Rng) -> (DenseNetwork, Vec<f64>) {
    loop {
        let depth = rng.random_range(1..=3);
        let mut sizes = vec![rng.random_range(1..=3)];
        for _ in 0..depth {
            sizes.push(rng.random_range(1..=5));
        }
        sizes.push(rng.random_range(1..=3));
        let mut net = DenseNetwork::new(&sizes, &vec![kind; depth], ActivationKind::Identity, rng).unwrap();
        for l in 0..net.num_layers() {
            for b in net.biases_mut(l) {
                *b = rng.random_range(-0.5..0.5);
            }
        }
        let x: Vec<f64> = (0..sizes[0]).map(|_| rng.random_range(-2.0..2.0)).collect();
        if let ActivationKind::LeakyRelu { .. } = kind {
            let pass = Mlp::from_network(&net).forward(&x);
            if pass.pre.iter().flatten().any(|z| z.abs() < 1e-4) {
                continue;
            }
        }
        return (net, x);
    }
}

pub fn gradient_check(kind: ActivationKind, networks: usize, seed: u64) -> GradCheck {
    let h = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel: f64 = 0.0;
    let mut max_oracle_diff: f64 = 0.0;
    for _ in 0..networks {
        let (net, x) = random_network(kind, &mut rng);
        let c: Vec<f64> = (0..net.output_width()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let objective = |n: &DenseNetwork, x: &[f64]| -> f64 {
            n.eval(x).unwrap().iter().zip(&c).map(|(o, ci)| o * ci).sum()
        };
        let (_, tape) = net.forward(&x).unwrap();
        let (grads, dx) = net.backward(&tape, &c).unwrap();

        let oracle = Mlp::from_network(&net);
        let pass = oracle.forward(&x);
        let mut og = oracle.zero_grad();
        let odx = oracle.backward(&pass, &c, &mut og);
        let mut flat = Vec::new();
        for l in 0..net.num_layers() {
            flat.extend(&grads.weights[l]);
            flat.extend(&grads.biases[l]);
        }
        max_oracle_diff = max_oracle_diff.max(max_abs_diff(&flat, &og.flat()));
        max_oracle_diff = max_oracle_diff.max(max_abs_diff(&dx, &odx));

        for l in 0..net.num_layers() {
            for which in 0..2 {
                let len = if which == 0 { net.weights(l).len() } else { net.biases(l).len() };
                for i in 0..len {
                    let mut plus = net.clone();
                    let mut minus = net.clone();
                    if which == 0 {
                        plus.weights_mut(l)[i] += h;
                        minus.weights_mut(l)[i] -= h;
                    } else {
                        plus.biases_mut(l)[i] += h;
                        minus.biases_mut(l)[i] -= h;
                    }
                    let fd = (objective(&plus, &x) - objective(&minus, &x)) / (2.0 * h);
                    let a = if which == 0 { grads.weights[l][i] } else { grads.biases[l][i] };
                    max_rel = max_rel.max(rel_err(a, fd));
                }
            }
        }
        for i in 0..x.len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (objective(&net, &xp) - objective(&net, &xm)) / (2.0 * h);
            max_rel = max_rel.max(rel_err(dx[i], fd));
        }
    }
    GradCheck { max_rel, max_oracle_diff, networks }
}

/// The toy problem used for the single-iteration oracle.
pub fn toy_model(seed: u64) -> GanMdfModel {
    let arch = Architecture {
        lf_hidden: vec![3],
        lf_activations: vec![ActivationKind::Sigmoid],
        hf_hidden: vec![4, 3],
        hf_activations: vec![ActivationKind::Sigmoid, ActivationKind::InverseMultiquadratic],
        disc_hidden: vec![3],
        disc_activations: vec![ActivationKind::Sigmoid],
    };
    let mut model = GanMdfModel::new(1, 1, &arch, seed).unwrap();
    model.freeze_lf();
    model
}

pub fn toy_batch() -> Vec<Sample> {
    vec![
        Sample { x: vec![0.25], y: vec![0.8] },
        Sample { x: vec![0.7], y: vec![-0.3] },
    ]
}

pub fn toy_config(mode: TrainingMode) -> TrainingConfig {
    TrainingConfig {
        eta_s: 0.05,
        eta_d: 0.02,
        eta_g: 0.01,
        mode,
        ..TrainingConfig::default()
    }
}

pub struct OracleComparison {
    pub max_param_diff: f64,
    pub max_loss_diff: f64,
    pub lf_unchanged: bool,
    /// How far the HF block travelled, so a no-op cannot pass.
    pub hf_displacement: f64,
}

/// Runs `iterations` library iterations and the scripted reference side by side.
pub fn compare_with_script(mode: TrainingMode, iterations: usize) -> OracleComparison {
    let mut model = toy_model(11);
    let config = toy_config(mode);
    let batch = toy_batch();
    let mut reference = RefModel {
        lf: Mlp::from_network(model.lf_block()),
        hf: Mlp::from_network(model.hf_block()),
        disc: Mlp::from_network(model.discriminator()),
    };
    let lf_before = network_params(model.lf_block());
    let hf_before = network_params(model.hf_block());
    let ref_batch: Vec<_> = batch.iter().map(|s| (s.x.clone(), s.y.clone())).collect();
    let mut opt = AdversarialOptimizers::new(&model);
    let mut ref_opt = ScriptedOptimizers::new(&reference);
    let mut max_loss_diff: f64 = 0.0;
    for k in 1..=iterations {
        let rec = model.adversarial_iteration(&batch, k, &config, &mut opt).unwrap();
        let losses = scripted_iteration(
            &mut reference,
            &ref_batch,
            (config.eta_s, config.eta_d, config.eta_g),
            mode == TrainingMode::PaperFaithful,
            &mut ref_opt,
        );
        max_loss_diff = max_loss_diff
            .max((rec.supervised - losses.supervised).abs())
            .max((rec.discriminative - losses.discriminative).abs())
            .max((rec.generative - losses.generative).abs());
    }
    let max_param_diff = max_abs_diff(&network_params(model.hf_block()), &reference.hf.flat_params())
        .max(max_abs_diff(&network_params(model.discriminator()), &reference.disc.flat_params()));
    OracleComparison {
        max_param_diff,
        max_loss_diff,
        lf_unchanged: network_params(model.lf_block()) == lf_before,
        hf_displacement: max_abs_diff(&network_params(model.hf_block()), &hf_before),
    }
}
