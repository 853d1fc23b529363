//! Word2Vec (CBOW and skip-gram) trained with negative sampling.
//!
//! For an input vector `h` (the center word's input row for skip-gram, the mean
//! of the context input rows for CBOW), a target output row `u_t` and negative
//! output rows `u_n`, the per-example loss is
//!
//! ```text
//! L = -ln σ(u_t·h) - Σ_n ln σ(-u_n·h)
//! ```
//!
//! Training is plain single-threaded SGD with a linearly decaying learning rate,
//! so a model is a pure function of (token streams, parameters).

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::TokenStream;

use super::vector::{dot, DenseVector};
use super::vocab::Vocabulary;

pub const MODEL_MAGIC: &[u8; 8] = b"TXBW2VEC";
pub const MODEL_VERSION: u32 = 1;

/// Final learning rate as a fraction of the initial one.
pub const MIN_LR_FRACTION: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum W2vVariant {
    Cbow,
    Skipgram,
}

impl W2vVariant {
    pub fn name(self) -> &'static str {
        match self {
            W2vVariant::Cbow => "cbow",
            W2vVariant::Skipgram => "skipgram",
        }
    }

    fn tag(self) -> u8 {
        match self {
            W2vVariant::Cbow => 0,
            W2vVariant::Skipgram => 1,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(W2vVariant::Cbow),
            1 => Ok(W2vVariant::Skipgram),
            t => Err(Error::Format(format!("unknown variant tag {t}"))),
        }
    }
}

impl std::str::FromStr for W2vVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "cbow" => Ok(W2vVariant::Cbow),
            "skipgram" => Ok(W2vVariant::Skipgram),
            other => Err(Error::Config(format!("unknown word2vec variant '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Word2VecParams {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_count: u64,
    pub seed: u64,
    pub variant: W2vVariant,
}

impl Default for Word2VecParams {
    fn default() -> Self {
        Word2VecParams {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_count: 2,
            seed: 1,
            variant: W2vVariant::Skipgram,
        }
    }
}

impl Word2VecParams {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("word2vec dim must be >= 1".into()));
        }
        if self.window == 0 {
            return Err(Error::Config("word2vec window must be >= 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!("word2vec learning_rate must be positive, got {}", self.learning_rate)));
        }
        Ok(())
    }
}

/// Gradients of the loss on the rows touched by one example, keyed by row.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct W2vGradients {
    pub input: BTreeMap<usize, Vec<f64>>,
    pub output: BTreeMap<usize, Vec<f64>>,
}

impl W2vGradients {
    fn add(map: &mut BTreeMap<usize, Vec<f64>>, row: usize, coeff: f64, v: &[f64]) {
        let g = map.entry(row).or_insert_with(|| vec![0.0; v.len()]);
        for (gi, vi) in g.iter_mut().zip(v) {
            *gi += coeff * vi;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Word2VecModel {
    vocab: Vocabulary,
    params: Word2VecParams,
    w_in: Vec<f64>,
    w_out: Vec<f64>,
    epoch_losses: Vec<f64>,
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Loss of one (h, target, negatives) example and dL/ds for each score,
/// target first. `coeffs` is overwritten.
fn example_loss(
    h: &[f64],
    w_out: &[f64],
    dim: usize,
    target: usize,
    negatives: &[usize],
    coeffs: &mut Vec<f64>,
) -> f64 {
    coeffs.clear();
    let row = |i: usize| &w_out[i * dim..(i + 1) * dim];
    let s = dot(row(target), h);
    let mut loss = softplus(-s);
    coeffs.push(sigmoid(s) - 1.0);
    for &n in negatives {
        let s = dot(row(n), h);
        loss += softplus(s);
        coeffs.push(sigmoid(s));
    }
    loss
}

impl Word2VecModel {
    /// Seeded initialization: input rows uniform in `(-0.5/d, 0.5/d)`, output rows zero.
    fn initialize(vocab: Vocabulary, params: Word2VecParams, rng: &mut ChaCha8Rng) -> Self {
        let d = params.dim;
        let v = vocab.len();
        let w_in = (0..v * d).map(|_| (rng.gen::<f64>() - 0.5) / d as f64).collect();
        Word2VecModel { vocab, params, w_in, w_out: vec![0.0; v * d], epoch_losses: Vec::new() }
    }

    /// Assembles a model from explicit matrices (row-major, `V x dim`).
    pub fn from_parts(vocab: Vocabulary, params: Word2VecParams, w_in: Vec<f64>, w_out: Vec<f64>) -> Result<Self> {
        let expected = vocab.len() * params.dim;
        if w_in.len() != expected || w_out.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: w_in.len().max(w_out.len()) });
        }
        if w_in.iter().chain(&w_out).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("embedding matrices contain non-finite values".into()));
        }
        Ok(Word2VecModel { vocab, params, w_in, w_out, epoch_losses: Vec::new() })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn params(&self) -> &Word2VecParams {
        &self.params
    }

    pub fn variant(&self) -> W2vVariant {
        self.params.variant
    }

    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn input_matrix(&self) -> &[f64] {
        &self.w_in
    }

    pub fn output_matrix(&self) -> &[f64] {
        &self.w_out
    }

    pub fn input_matrix_mut(&mut self) -> &mut [f64] {
        &mut self.w_in
    }

    pub fn output_matrix_mut(&mut self) -> &mut [f64] {
        &mut self.w_out
    }

    /// Mean loss per example for each completed epoch.
    pub fn epoch_losses(&self) -> &[f64] {
        &self.epoch_losses
    }

    pub fn input_row(&self, i: usize) -> &[f64] {
        &self.w_in[i * self.dim()..(i + 1) * self.dim()]
    }

    pub fn output_row(&self, i: usize) -> &[f64] {
        &self.w_out[i * self.dim()..(i + 1) * self.dim()]
    }

    pub fn word_vector(&self, token: &str) -> Option<&[f64]> {
        self.vocab.get(token).map(|i| self.input_row(i))
    }

    /// Cosine similarity of two words' input vectors.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        let (u, v) = (self.word_vector(a)?, self.word_vector(b)?);
        Some(super::vector::cosine_from_parts(dot(u, v), dot(u, u).sqrt(), dot(v, v).sqrt()))
    }

    /// Mean of the input rows of in-vocabulary tokens; zero vector if none.
    pub fn embed_document(&self, stream: &TokenStream) -> DenseVector {
        let d = self.dim();
        let mut acc = vec![0.0; d];
        let mut n = 0usize;
        for i in stream.iter().filter_map(|t| self.vocab.get(t)) {
            for (a, x) in acc.iter_mut().zip(self.input_row(i)) {
                *a += x;
            }
            n += 1;
        }
        if n > 0 {
            let inv = 1.0 / n as f64;
            acc.iter_mut().for_each(|a| *a *= inv);
        }
        DenseVector::new(acc).expect("model rows are finite")
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.vocab.len() {
            return Err(Error::InvalidInput(format!(
                "token index {i} out of range for vocabulary of {}",
                self.vocab.len()
            )));
        }
        Ok(())
    }

    /// Loss and exact gradients for one center word.
    ///
    /// Skip-gram sums one example per context token (each against the same
    /// negatives) with `h` = input row of `center`. CBOW uses one example with
    /// `h` = mean of the context input rows and `center` as the target.
    pub fn loss_and_grad(&self, center: usize, context: &[usize], negatives: &[usize]) -> Result<(f64, W2vGradients)> {
        for &i in std::iter::once(&center).chain(context).chain(negatives) {
            self.check_index(i)?;
        }
        let d = self.dim();
        let mut grads = W2vGradients::default();
        let mut coeffs = Vec::with_capacity(negatives.len() + 1);
        let mut loss = 0.0;
        match self.variant() {
            W2vVariant::Skipgram => {
                let h = self.input_row(center);
                for &ctx in context {
                    loss += example_loss(h, &self.w_out, d, ctx, negatives, &mut coeffs);
                    for (&row, &g) in std::iter::once(&ctx).chain(negatives).zip(&coeffs) {
                        W2vGradients::add(&mut grads.input, center, g, self.output_row(row));
                        W2vGradients::add(&mut grads.output, row, g, h);
                    }
                }
            }
            W2vVariant::Cbow => {
                if context.is_empty() {
                    return Err(Error::InvalidInput("CBOW needs at least one context token".into()));
                }
                let h = self.context_mean(context);
                loss = example_loss(&h, &self.w_out, d, center, negatives, &mut coeffs);
                let mut grad_h = vec![0.0; d];
                for (&row, &g) in std::iter::once(&center).chain(negatives).zip(&coeffs) {
                    for (gh, u) in grad_h.iter_mut().zip(self.output_row(row)) {
                        *gh += g * u;
                    }
                    W2vGradients::add(&mut grads.output, row, g, &h);
                }
                let share = 1.0 / context.len() as f64;
                for &ctx in context {
                    W2vGradients::add(&mut grads.input, ctx, share, &grad_h);
                }
            }
        }
        Ok((loss, grads))
    }

    fn context_mean(&self, context: &[usize]) -> Vec<f64> {
        let mut h = vec![0.0; self.dim()];
        for &c in context {
            for (a, x) in h.iter_mut().zip(self.input_row(c)) {
                *a += x;
            }
        }
        let inv = 1.0 / context.len() as f64;
        h.iter_mut().for_each(|a| *a *= inv);
        h
    }

    /// Writes the binary model: magic, version, V, d, variant tag, tokens
    /// (u32 byte length + UTF-8), then W_in and W_out as little-endian f64, row-major.
    pub fn save<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MODEL_MAGIC)?;
        out.write_all(&MODEL_VERSION.to_le_bytes())?;
        out.write_all(&(self.vocab.len() as u64).to_le_bytes())?;
        out.write_all(&(self.dim() as u64).to_le_bytes())?;
        out.write_all(&[self.variant().tag()])?;
        for token in self.vocab.tokens() {
            out.write_all(&(token.len() as u32).to_le_bytes())?;
            out.write_all(token.as_bytes())?;
        }
        for x in self.w_in.iter().chain(&self.w_out) {
            out.write_all(&x.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the [`save`](Self::save) format. Frequency statistics and
    /// training hyperparameters other than `dim` and `variant` are not stored.
    pub fn load<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != MODEL_MAGIC {
            return Err(Error::Format("bad magic; not a word2vec model file".into()));
        }
        let version = read_u32(&mut input)?;
        if version != MODEL_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let v = read_u64(&mut input)? as usize;
        let d = read_u64(&mut input)? as usize;
        let mut tag = [0u8; 1];
        input.read_exact(&mut tag)?;
        let variant = W2vVariant::from_tag(tag[0])?;
        if d == 0 || v == 0 {
            return Err(Error::Format("empty model".into()));
        }
        let mut tokens = Vec::with_capacity(v);
        for _ in 0..v {
            let len = read_u32(&mut input)? as usize;
            let mut buf = vec![0u8; len];
            input.read_exact(&mut buf)?;
            tokens.push(String::from_utf8(buf).map_err(|_| Error::Format("token is not valid UTF-8".into()))?);
        }
        let vocab = Vocabulary::from_tokens(tokens)?;
        let mut read_matrix = || -> Result<Vec<f64>> {
            let mut m = Vec::with_capacity(v * d);
            let mut buf = [0u8; 8];
            for _ in 0..v * d {
                input.read_exact(&mut buf)?;
                m.push(f64::from_le_bytes(buf));
            }
            Ok(m)
        };
        let w_in = read_matrix()?;
        let w_out = read_matrix()?;
        let params = Word2VecParams { dim: d, variant, ..Word2VecParams::default() };
        Self::from_parts(vocab, params, w_in, w_out)
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Draws negatives with probability proportional to `count^0.75`.
struct NegativeSampler {
    cdf: Vec<f64>,
}

impl NegativeSampler {
    fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        for x in &mut cdf {
            *x /= acc;
        }
        NegativeSampler { cdf }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

/// Trains a model on the given token streams (one stream per sentence/document).
///
/// Tokens seen fewer than `min_count` times are dropped before windowing.
/// Each position uses a window shrunk by a random amount in `0..window`;
/// negatives that coincide with the target are skipped.
pub fn train_word2vec(docs: &[TokenStream], params: &Word2VecParams) -> Result<Word2VecModel> {
    params.validate()?;
    let vocab = Vocabulary::build_by_count(docs, params.min_count.max(1))
        .map_err(|_| Error::InvalidInput("word2vec vocabulary is empty after min_count filtering".into()))?;
    if vocab.len() < 2 {
        return Err(Error::InvalidInput(format!("word2vec needs at least 2 vocabulary tokens, got {}", vocab.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut model = Word2VecModel::initialize(vocab, params.clone(), &mut rng);
    if params.epochs == 0 {
        return Ok(model);
    }

    let sentences: Vec<Vec<usize>> =
        docs.iter().map(|d| d.iter().filter_map(|t| model.vocab.get(t)).collect()).collect();
    let sampler = NegativeSampler::new(model.vocab.counts());
    let total_positions: usize = sentences.iter().map(Vec::len).sum::<usize>() * params.epochs;
    let d = params.dim;
    let lr0 = params.learning_rate;

    let mut processed = 0usize;
    let mut context = Vec::with_capacity(2 * params.window);
    let mut negatives = Vec::with_capacity(params.negatives);
    let mut coeffs = Vec::with_capacity(params.negatives + 1);
    let mut h = vec![0.0; d];
    let mut grad_h = vec![0.0; d];

    for epoch in 1..=params.epochs {
        let mut loss_sum = 0.0;
        let mut examples = 0usize;
        for sentence in &sentences {
            for pos in 0..sentence.len() {
                let progress = processed as f64 / total_positions as f64;
                let lr = lr0 * (1.0 - progress * (1.0 - MIN_LR_FRACTION));
                processed += 1;

                let reach = params.window - rng.gen_range(0..params.window);
                context.clear();
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(sentence.len() - 1);
                context.extend((lo..=hi).filter(|&j| j != pos).map(|j| sentence[j]));
                if context.is_empty() {
                    continue;
                }
                let center = sentence[pos];

                match params.variant {
                    W2vVariant::Skipgram => {
                        for &target in &context {
                            draw_negatives(&sampler, &mut rng, params.negatives, target, &mut negatives);
                            h.copy_from_slice(model.input_row(center));
                            loss_sum +=
                                sgd_step(&mut model.w_out, d, &h, target, &negatives, lr, &mut coeffs, &mut grad_h);
                            examples += 1;
                            let row = &mut model.w_in[center * d..(center + 1) * d];
                            for (w, g) in row.iter_mut().zip(&grad_h) {
                                *w -= lr * g;
                            }
                        }
                    }
                    W2vVariant::Cbow => {
                        draw_negatives(&sampler, &mut rng, params.negatives, center, &mut negatives);
                        h.iter_mut().for_each(|x| *x = 0.0);
                        for &c in &context {
                            for (a, x) in h.iter_mut().zip(model.input_row(c)) {
                                *a += x;
                            }
                        }
                        let inv = 1.0 / context.len() as f64;
                        h.iter_mut().for_each(|x| *x *= inv);
                        loss_sum += sgd_step(&mut model.w_out, d, &h, center, &negatives, lr, &mut coeffs, &mut grad_h);
                        examples += 1;
                        for &c in &context {
                            let row = &mut model.w_in[c * d..(c + 1) * d];
                            for (w, g) in row.iter_mut().zip(&grad_h) {
                                *w -= lr * inv * g;
                            }
                        }
                    }
                }
            }
        }
        if !loss_sum.is_finite() {
            return Err(Error::Diverged(format!("non-finite word2vec loss in epoch {epoch}")));
        }
        model.epoch_losses.push(if examples > 0 { loss_sum / examples as f64 } else { 0.0 });
    }
    if model.w_in.iter().chain(&model.w_out).any(|x| !x.is_finite()) {
        return Err(Error::Diverged(format!("non-finite word2vec weights after epoch {}", params.epochs)));
    }
    Ok(model)
}

fn draw_negatives(sampler: &NegativeSampler, rng: &mut ChaCha8Rng, k: usize, target: usize, out: &mut Vec<usize>) {
    out.clear();
    for _ in 0..k {
        let n = sampler.sample(rng);
        if n != target {
            out.push(n);
        }
    }
}

/// One exact gradient step on the output rows; leaves dL/dh in `grad_h` for the caller.
#[allow(clippy::too_many_arguments)]
fn sgd_step(
    w_out: &mut [f64],
    d: usize,
    h: &[f64],
    target: usize,
    negatives: &[usize],
    lr: f64,
    coeffs: &mut Vec<f64>,
    grad_h: &mut [f64],
) -> f64 {
    let loss = example_loss(h, w_out, d, target, negatives, coeffs);
    grad_h.iter_mut().for_each(|g| *g = 0.0);
    for (&row, &g) in std::iter::once(&target).chain(negatives).zip(coeffs.iter()) {
        for (gh, u) in grad_h.iter_mut().zip(&w_out[row * d..(row + 1) * d]) {
            *gh += g * u;
        }
    }
    for (&row, &g) in std::iter::once(&target).chain(negatives).zip(coeffs.iter()) {
        for (u, x) in w_out[row * d..(row + 1) * d].iter_mut().zip(h) {
            *u -= lr * g * x;
        }
    }
    loss
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_block(n: usize) -> Vec<TokenStream> {
        let mut docs = Vec::new();
        for _ in 0..n {
            docs.push(TokenStream::from(["a", "b"]));
            docs.push(TokenStream::from(["z", "w"]));
        }
        docs
    }

    fn zero_model(variant: W2vVariant) -> Word2VecModel {
        let vocab = Vocabulary::from_tokens(vec!["a".into(), "b".into(), "c".into(), "d".into()]).unwrap();
        let params = Word2VecParams { dim: 3, variant, ..Word2VecParams::default() };
        Word2VecModel::from_parts(vocab, params, vec![0.0; 12], vec![0.0; 12]).unwrap()
    }

    #[test]
    fn zero_model_loss_is_ln2_per_score() {
        for variant in [W2vVariant::Skipgram, W2vVariant::Cbow] {
            let m = zero_model(variant);
            let (loss, _) = m.loss_and_grad(0, &[1], &[2, 3]).unwrap();
            assert!((loss - 3.0 * 2f64.ln()).abs() < 1e-15, "{variant:?}");
        }
    }

    #[test]
    fn empty_negatives_reduce_to_positive_term() {
        let mut m = zero_model(W2vVariant::Skipgram);
        m.input_matrix_mut().copy_from_slice(&[0.1, 0.2, 0.3, -0.1, 0.4, 0.0, 0.2, 0.2, 0.2, 0.0, 0.1, -0.3]);
        m.output_matrix_mut().copy_from_slice(&[0.3, 0.1, -0.2, 0.5, -0.1, 0.2, 0.0, 0.1, 0.1, 0.2, 0.2, 0.2]);
        let (loss, _) = m.loss_and_grad(0, &[1], &[]).unwrap();
        let s = dot(m.input_row(0), m.output_row(1));
        assert!((loss - (-(sigmoid(s)).ln())).abs() < 1e-15);
    }

    #[test]
    fn index_out_of_range_is_error() {
        let m = zero_model(W2vVariant::Skipgram);
        assert!(m.loss_and_grad(4, &[0], &[]).is_err());
        assert!(zero_model(W2vVariant::Cbow).loss_and_grad(0, &[], &[1]).is_err());
    }

    #[test]
    fn epochs_zero_returns_seeded_init() {
        let docs = two_block(10);
        let p = Word2VecParams { epochs: 0, dim: 8, seed: 5, ..Word2VecParams::default() };
        let m = train_word2vec(&docs, &p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let init = Word2VecModel::initialize(m.vocabulary().clone(), p.clone(), &mut rng);
        assert_eq!(m.input_matrix(), init.input_matrix());
        assert!(m.output_matrix().iter().all(|&x| x == 0.0));
        assert!(m.epoch_losses().is_empty());
    }

    #[test]
    fn training_is_bit_reproducible() {
        let docs = two_block(50);
        for variant in [W2vVariant::Skipgram, W2vVariant::Cbow] {
            let p = Word2VecParams { dim: 16, variant, ..Word2VecParams::default() };
            let a = train_word2vec(&docs, &p).unwrap();
            let b = train_word2vec(&docs, &p).unwrap();
            assert_eq!(a.input_matrix(), b.input_matrix());
            assert_eq!(a.output_matrix(), b.output_matrix());
        }
    }

    #[test]
    fn vocabulary_too_small_is_error() {
        let docs = vec![TokenStream::from(["a", "a", "b"])];
        let p = Word2VecParams { min_count: 2, ..Word2VecParams::default() };
        assert!(train_word2vec(&docs, &p).is_err());
    }

    #[test]
    fn save_load_round_trip() {
        let docs = two_block(20);
        let p = Word2VecParams { dim: 4, epochs: 1, variant: W2vVariant::Cbow, ..Word2VecParams::default() };
        let m = train_word2vec(&docs, &p).unwrap();
        let mut buf = Vec::new();
        m.save(&mut buf).unwrap();
        assert_eq!(&buf[..8], MODEL_MAGIC);
        assert_eq!(buf.len(), 8 + 4 + 8 + 8 + 1 + 4 * (4 + 1) + 2 * 4 * 4 * 8);
        let back = Word2VecModel::load(buf.as_slice()).unwrap();
        assert_eq!(back.input_matrix(), m.input_matrix());
        assert_eq!(back.output_matrix(), m.output_matrix());
        assert_eq!(back.vocabulary().tokens(), m.vocabulary().tokens());
        assert_eq!(back.variant(), W2vVariant::Cbow);

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(Word2VecModel::load(bad.as_slice()).is_err());
        assert!(Word2VecModel::load(&buf[..buf.len() - 3]).is_err());
    }

    #[test]
    fn embed_document_is_mean_of_rows() {
        let docs = two_block(20);
        let p = Word2VecParams { dim: 6, epochs: 1, ..Word2VecParams::default() };
        let m = train_word2vec(&docs, &p).unwrap();
        let a = m.word_vector("a").unwrap().to_vec();
        let b = m.word_vector("b").unwrap().to_vec();
        assert_eq!(m.embed_document(&TokenStream::from(["a"])).as_slice(), a.as_slice());
        let aa = m.embed_document(&TokenStream::from(["a", "a"]));
        for (x, y) in aa.as_slice().iter().zip(&a) {
            assert!((x - y).abs() < 1e-15);
        }
        let ab = m.embed_document(&TokenStream::from(["a", "b", "unknown"]));
        for i in 0..6 {
            assert!((ab.as_slice()[i] - (a[i] + b[i]) / 2.0).abs() < 1e-15);
        }
        assert!(m.embed_document(&TokenStream::from(["nope"])).as_slice().iter().all(|&x| x == 0.0));
        assert_eq!(m.embed_document(&TokenStream::default()).dim(), 6);
    }

    #[test]
    fn sampler_respects_smoothed_unigram() {
        let s = NegativeSampler::new(&[1, 0, 16]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut hits = [0usize; 3];
        for _ in 0..20_000 {
            hits[s.sample(&mut rng)] += 1;
        }
        assert_eq!(hits[1], 0);
        // 16^0.75 = 8, so the ratio should be near 8.
        let ratio = hits[2] as f64 / hits[0] as f64;
        assert!((ratio - 8.0).abs() < 1.0, "{ratio}");
    }
}
