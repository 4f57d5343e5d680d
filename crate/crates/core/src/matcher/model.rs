use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Mlp,
    #[serde(rename = "logreg", alias = "log_reg", alias = "lr", alias = "logistic_regression")]
    LogReg,
}

impl ModelKind {
    pub fn tag(self) -> u8 {
        match self {
            ModelKind::Mlp => 0,
            ModelKind::LogReg => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(ModelKind::Mlp),
            1 => Some(ModelKind::LogReg),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Mlp => "mlp",
            ModelKind::LogReg => "logreg",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mlp" => Ok(ModelKind::Mlp),
            "logreg" | "lr" | "logistic_regression" => Ok(ModelKind::LogReg),
            _ => Err(Error::Config(format!("unknown model kind {s:?} (expected mlp or logreg)"))),
        }
    }
}

/// Architecture: kind plus hidden width (ignored for `LogReg`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub hidden: usize,
}

impl ModelSpec {
    pub fn mlp(hidden: usize) -> Self {
        ModelSpec { kind: ModelKind::Mlp, hidden }
    }

    pub fn logreg() -> Self {
        ModelSpec { kind: ModelKind::LogReg, hidden: 0 }
    }
}

/// `[query ‖ candidate]`, query half first.
pub fn featurize(query: &[f64], candidate: &[f64]) -> Result<Vec<f64>> {
    if query.len() != candidate.len() {
        return Err(Error::Data(format!(
            "query vector has dimension {}, candidate vector {}",
            query.len(),
            candidate.len()
        )));
    }
    let mut x = Vec::with_capacity(2 * query.len());
    x.extend_from_slice(query);
    x.extend_from_slice(candidate);
    Ok(x)
}

/// Two-way softmax, shifted by the max logit.
pub fn softmax2(z: [f64; 2]) -> [f64; 2] {
    let m = z[0].max(z[1]);
    let e0 = (z[0] - m).exp();
    let e1 = (z[1] - m).exp();
    let s = e0 + e1;
    [e0 / s, e1 / s]
}

/// Model parameters, flattened row-major.
///
/// MLP layout: `W1 (h × n)`, `b1 (h)`, `W2 (2 × h)`, `b2 (2)`.
/// LogReg layout: `w (n)`, `b (1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatcherModel {
    kind: ModelKind,
    input_dim: usize,
    hidden: usize,
    params: Vec<f64>,
}

/// Scratch buffers for one forward/backward pass.
#[derive(Debug, Default)]
pub(crate) struct Workspace {
    pre: Vec<f64>,
    act: Vec<f64>,
}

fn param_count(kind: ModelKind, n: usize, h: usize) -> usize {
    match kind {
        ModelKind::Mlp => h * n + h + 2 * h + 2,
        ModelKind::LogReg => n + 1,
    }
}

impl MatcherModel {
    pub fn zeros(spec: ModelSpec, input_dim: usize) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::Config("input dimension must be at least 1".into()));
        }
        let hidden = match spec.kind {
            ModelKind::Mlp if spec.hidden == 0 => return Err(Error::Config("MLP hidden size must be at least 1".into())),
            ModelKind::Mlp => spec.hidden,
            ModelKind::LogReg => 0,
        };
        Ok(MatcherModel { kind: spec.kind, input_dim, hidden, params: vec![0.0; param_count(spec.kind, input_dim, hidden)] })
    }

    /// Xavier-uniform weights, zero biases.
    pub fn xavier(spec: ModelSpec, input_dim: usize, seed: u64) -> Result<Self> {
        let mut m = Self::zeros(spec, input_dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, h) = (m.input_dim, m.hidden);
        match m.kind {
            ModelKind::Mlp => {
                let a1 = (6.0 / (n + h) as f64).sqrt();
                m.w1_mut().iter_mut().for_each(|w| *w = rng.random_range(-a1..a1));
                let a2 = (6.0 / (h + 2) as f64).sqrt();
                m.w2_mut().iter_mut().for_each(|w| *w = rng.random_range(-a2..a2));
            }
            ModelKind::LogReg => {
                let a = (6.0 / (n + 1) as f64).sqrt();
                m.params[..n].iter_mut().for_each(|w| *w = rng.random_range(-a..a));
            }
        }
        Ok(m)
    }

    pub fn from_params(spec: ModelSpec, input_dim: usize, params: Vec<f64>) -> Result<Self> {
        let mut m = Self::zeros(spec, input_dim)?;
        if params.len() != m.params.len() {
            return Err(Error::Data(format!("expected {} parameters, found {}", m.params.len(), params.len())));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Data("non-finite model parameter".into()));
        }
        m.params = params;
        Ok(m)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec { kind: self.kind, hidden: self.hidden }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn split(&self) -> (usize, usize, usize) {
        let (n, h) = (self.input_dim, self.hidden);
        (h * n, h * n + h, h * n + h + 2 * h)
    }

    pub fn w1(&self) -> &[f64] {
        &self.params[..self.split().0]
    }

    pub fn w1_mut(&mut self) -> &mut [f64] {
        let (a, _, _) = self.split();
        &mut self.params[..a]
    }

    pub fn b1_mut(&mut self) -> &mut [f64] {
        let (a, b, _) = self.split();
        &mut self.params[a..b]
    }

    pub fn w2_mut(&mut self) -> &mut [f64] {
        let (_, b, c) = self.split();
        &mut self.params[b..c]
    }

    pub fn b2_mut(&mut self) -> &mut [f64] {
        let (_, _, c) = self.split();
        &mut self.params[c..]
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::Data(format!("feature length {} != model input {}", x.len(), self.input_dim)));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite feature value".into()));
        }
        Ok(())
    }

    pub(crate) fn logits_with(&self, x: &[f64], ws: &mut Workspace) -> [f64; 2] {
        let n = self.input_dim;
        match self.kind {
            ModelKind::LogReg => {
                let z = self.params[..n].iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.params[n];
                [0.0, z]
            }
            ModelKind::Mlp => {
                let h = self.hidden;
                let (a, b, c) = self.split();
                let (w1, b1, w2, b2) = (&self.params[..a], &self.params[a..b], &self.params[b..c], &self.params[c..]);
                ws.pre.resize(h, 0.0);
                ws.act.resize(h, 0.0);
                for j in 0..h {
                    let row = &w1[j * n..(j + 1) * n];
                    let s = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b1[j];
                    ws.pre[j] = s;
                    ws.act[j] = s.max(0.0);
                }
                let mut z = [b2[0], b2[1]];
                for (k, zk) in z.iter_mut().enumerate() {
                    *zk += w2[k * h..(k + 1) * h].iter().zip(&ws.act).map(|(w, v)| w * v).sum::<f64>();
                }
                z
            }
        }
    }

    /// Pre-softmax logits `(no_match, match)`.
    pub fn logits(&self, x: &[f64]) -> Result<[f64; 2]> {
        self.check_input(x)?;
        Ok(self.logits_with(x, &mut Workspace::default()))
    }

    /// `(p_no_match, p_match)`.
    pub fn forward(&self, x: &[f64]) -> Result<[f64; 2]> {
        self.logits(x).map(softmax2)
    }

    pub fn p_match(&self, x: &[f64]) -> Result<f64> {
        self.forward(x).map(|p| p[1])
    }

    /// Negative log-likelihood of `label` (true = match).
    pub fn nll(&self, x: &[f64], label: bool) -> Result<f64> {
        let z = self.logits(x)?;
        Ok(nll_from_logits(z, label))
    }

    /// Adds `∂NLL/∂θ` for one example to `grad` and returns the loss.
    /// Inputs are assumed validated.
    pub(crate) fn accumulate_gradient(&self, x: &[f64], label: bool, grad: &mut [f64], ws: &mut Workspace) -> f64 {
        let z = self.logits_with(x, ws);
        let p = softmax2(z);
        let y = usize::from(label);
        let dz = [p[0] - if y == 0 { 1.0 } else { 0.0 }, p[1] - if y == 1 { 1.0 } else { 0.0 }];
        let n = self.input_dim;
        match self.kind {
            ModelKind::LogReg => {
                // Only the match logit depends on the parameters.
                for (g, v) in grad[..n].iter_mut().zip(x) {
                    *g += dz[1] * v;
                }
                grad[n] += dz[1];
            }
            ModelKind::Mlp => {
                let h = self.hidden;
                let (a, b, c) = self.split();
                let w2 = &self.params[b..c];
                let (g_w1, rest) = grad.split_at_mut(a);
                let (g_b1, rest) = rest.split_at_mut(b - a);
                let (g_w2, g_b2) = rest.split_at_mut(c - b);
                g_b2[0] += dz[0];
                g_b2[1] += dz[1];
                for j in 0..h {
                    g_w2[j] += dz[0] * ws.act[j];
                    g_w2[h + j] += dz[1] * ws.act[j];
                    if ws.pre[j] > 0.0 {
                        let da = dz[0] * w2[j] + dz[1] * w2[h + j];
                        g_b1[j] += da;
                        for (g, v) in g_w1[j * n..(j + 1) * n].iter_mut().zip(x) {
                            *g += da * v;
                        }
                    }
                }
            }
        }
        nll_from_logits(z, label)
    }

    /// Loss and full parameter gradient for one example.
    pub fn loss_and_gradient(&self, x: &[f64], label: bool) -> Result<(f64, Vec<f64>)> {
        self.check_input(x)?;
        let mut grad = vec![0.0; self.params.len()];
        let loss = self.accumulate_gradient(x, label, &mut grad, &mut Workspace::default());
        Ok((loss, grad))
    }
}

/// `-ln softmax(z)[label]` via log-sum-exp.
fn nll_from_logits(z: [f64; 2], label: bool) -> f64 {
    let m = z[0].max(z[1]);
    let lse = m + ((z[0] - m).exp() + (z[1] - m).exp()).ln();
    lse - z[usize::from(label)]
}
