//! Decoders over a parity-check matrix: flooding belief propagation,
//! min-sum, erasure peeling and exhaustive maximum likelihood.
//!
//! Error flags in [`DecodeResult`] are measured against the all-zero
//! codeword, which is what the simulators transmit.

pub mod sim;

use serde::{Deserialize, Serialize};

use crate::channel::{channel_llr, ReceivedWord, LLR_MAX};
use crate::construct::{ColumnClass, RootLdpcCode};
use crate::error::{Error, Result};
use crate::gf2::{for_each_codeword, BitMatrix, Codeword};

/// Largest information length accepted by the exhaustive ML decoder.
pub const ML_MAX_K: usize = 20;

/// Edge lists of a parity-check matrix, grouped by check and by variable.
#[derive(Clone, Debug)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    check_ptr: Vec<usize>,
    edge_var: Vec<u32>,
    var_ptr: Vec<usize>,
    var_edges: Vec<u32>,
}

impl TannerGraph {
    pub fn new(h: &BitMatrix) -> Self {
        let (m, n) = (h.rows(), h.cols());
        let mut check_ptr = Vec::with_capacity(m + 1);
        let mut edge_var = Vec::new();
        check_ptr.push(0);
        for r in 0..m {
            edge_var.extend(h.row_ones(r).into_iter().map(|c| c as u32));
            check_ptr.push(edge_var.len());
        }
        let mut degree = vec![0usize; n];
        for &v in &edge_var {
            degree[v as usize] += 1;
        }
        let mut var_ptr = vec![0usize; n + 1];
        for v in 0..n {
            var_ptr[v + 1] = var_ptr[v] + degree[v];
        }
        let mut fill = var_ptr.clone();
        let mut var_edges = vec![0u32; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v as usize]] = e as u32;
            fill[v as usize] += 1;
        }
        TannerGraph {
            n,
            m,
            check_ptr,
            edge_var,
            var_ptr,
            var_edges,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> usize {
        self.edge_var.len()
    }

    /// Variables adjacent to check `c`.
    pub fn check_vars(&self, c: usize) -> &[u32] {
        &self.edge_var[self.check_ptr[c]..self.check_ptr[c + 1]]
    }

    fn check_edges(&self, c: usize) -> std::ops::Range<usize> {
        self.check_ptr[c]..self.check_ptr[c + 1]
    }

    fn var_edges(&self, v: usize) -> &[u32] {
        &self.var_edges[self.var_ptr[v]..self.var_ptr[v + 1]]
    }

    /// Checks adjacent to variable `v`, in row order.
    pub fn var_checks(&self, v: usize) -> Vec<usize> {
        self.var_edges(v)
            .iter()
            .map(|&e| self.check_ptr.partition_point(|&p| p <= e as usize) - 1)
            .collect()
    }

    pub fn syndrome_is_zero(&self, bits: &[u8]) -> bool {
        (0..self.m).all(|c| {
            self.check_vars(c)
                .iter()
                .fold(0u8, |acc, &v| acc ^ bits[v as usize])
                == 0
        })
    }
}

/// A code ready for decoding: matrix, graph, information positions and
/// optional root-code column classes.
#[derive(Clone, Debug)]
pub struct Code {
    pub h: BitMatrix,
    pub graph: TannerGraph,
    info_mask: Vec<bool>,
    pub column_class: Option<Vec<ColumnClass>>,
}

impl Code {
    /// Wrap a matrix. Without explicit information positions the free
    /// columns of its echelon form are used.
    pub fn from_matrix(h: BitMatrix, info: Option<Vec<usize>>) -> Result<Self> {
        let info = info.unwrap_or_else(|| h.free_columns());
        let mut info_mask = vec![false; h.cols()];
        for i in info {
            if i >= h.cols() {
                return Err(Error::Dimension(format!(
                    "information position {i} outside length {}",
                    h.cols()
                )));
            }
            info_mask[i] = true;
        }
        Ok(Code {
            graph: TannerGraph::new(&h),
            h,
            info_mask,
            column_class: None,
        })
    }

    pub fn from_root(code: &RootLdpcCode) -> Self {
        Code {
            graph: TannerGraph::new(&code.h),
            h: code.h.clone(),
            info_mask: code.column_class.iter().map(|c| c.is_info()).collect(),
            column_class: Some(code.column_class.clone()),
        }
    }

    pub fn n(&self) -> usize {
        self.h.cols()
    }

    pub fn is_info(&self, i: usize) -> bool {
        self.info_mask[i]
    }

    pub fn info_positions(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.info_mask[i]).collect()
    }

    /// Decision error flags (info, word, parity) against the all-zero word.
    pub fn error_flags(&self, bits: &[u8]) -> (bool, bool, bool) {
        let mut info = false;
        let mut word = false;
        let mut parity = false;
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                word = true;
                if self.info_mask[i] {
                    info = true;
                } else {
                    parity = true;
                }
            }
        }
        (info, word, parity)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderVariant {
    Bp,
    MinSum,
    Peeling,
    MlExhaustive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecoderConfig {
    pub variant: DecoderVariant,
    pub max_iter: usize,
    pub llr_clip: f64,
    pub early_stop: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            variant: DecoderVariant::Bp,
            max_iter: 50,
            llr_clip: LLR_MAX,
            early_stop: true,
        }
    }
}

impl DecoderConfig {
    pub fn with_variant(variant: DecoderVariant) -> Self {
        DecoderConfig {
            variant,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if !(self.llr_clip > 0.0 && self.llr_clip <= LLR_MAX) {
            return Err(Error::Config(format!(
                "llr_clip must lie in (0, {LLR_MAX}]"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub hard_bits: Vec<u8>,
    pub converged: bool,
    pub iterations: usize,
    pub info_error: bool,
    pub word_error: bool,
    pub parity_error: bool,
}

impl DecodeResult {
    fn new(code: &Code, hard_bits: Vec<u8>, converged: bool, iterations: usize) -> Self {
        let (info_error, word_error, parity_error) = code.error_flags(&hard_bits);
        DecodeResult {
            hard_bits,
            converged,
            iterations,
            info_error,
            word_error,
            parity_error,
        }
    }
}

/// Check-node output of the tanh rule, clipped to ±`LLR_MAX`.
pub fn check_update_bp(inputs: &[f64]) -> f64 {
    let prod: f64 = inputs.iter().map(|&x| (0.5 * x).tanh()).product();
    (2.0 * prod.atanh()).clamp(-LLR_MAX, LLR_MAX)
}

/// Check-node output of the min-sum approximation.
pub fn check_update_minsum(inputs: &[f64]) -> f64 {
    let mag = inputs.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    let negative = inputs.iter().filter(|&&x| x < 0.0).count() % 2 == 1;
    if negative {
        -mag
    } else {
        mag
    }
}

#[inline]
fn hard(l: f64) -> u8 {
    (l <= 0.0) as u8
}

/// Message-passing decoder with reusable buffers.
pub struct Decoder<'a> {
    code: &'a Code,
    cfg: DecoderConfig,
    c2v: Vec<f64>,
    v2c: Vec<f64>,
    scratch: Vec<f64>,
    bits: Vec<u8>,
}

impl<'a> Decoder<'a> {
    pub fn new(code: &'a Code, cfg: &DecoderConfig) -> Self {
        let e = code.graph.edges();
        Decoder {
            code,
            cfg: cfg.clone(),
            c2v: vec![0.0; e],
            v2c: vec![0.0; e],
            scratch: Vec::new(),
            bits: vec![0; code.n()],
        }
    }

    /// Decode channel LLRs with the configured variant.
    pub fn decode(&mut self, llr: &[f64]) -> Result<DecodeResult> {
        if llr.len() != self.code.n() {
            return Err(Error::Dimension(format!(
                "{} LLRs for a length-{} code",
                llr.len(),
                self.code.n()
            )));
        }
        match self.cfg.variant {
            DecoderVariant::Bp | DecoderVariant::MinSum => Ok(self.message_passing(llr)),
            DecoderVariant::Peeling => {
                let erased: Vec<bool> = llr.iter().map(|&l| l == 0.0).collect();
                Ok(decode_peeling(self.code, &erased)?.result)
            }
            DecoderVariant::MlExhaustive => decode_ml_llr(self.code, llr),
        }
    }

    fn message_passing(&mut self, llr: &[f64]) -> DecodeResult {
        let g = &self.code.graph;
        let clip = self.cfg.llr_clip;
        for (b, &l) in self.bits.iter_mut().zip(llr) {
            *b = hard(l);
        }
        if g.syndrome_is_zero(&self.bits) {
            return DecodeResult::new(self.code, self.bits.clone(), true, 0);
        }
        self.c2v.fill(0.0);
        let min_sum = self.cfg.variant == DecoderVariant::MinSum;
        let mut converged = false;
        let mut iterations = 0;
        for it in 1..=self.cfg.max_iter {
            iterations = it;
            // Variable to check.
            for v in 0..g.n() {
                let edges = g.var_edges(v);
                let total: f64 = llr[v] + edges.iter().map(|&e| self.c2v[e as usize]).sum::<f64>();
                for &e in edges {
                    self.v2c[e as usize] = (total - self.c2v[e as usize]).clamp(-clip, clip);
                }
            }
            // Check to variable.
            for c in 0..g.m() {
                let range = g.check_edges(c);
                if min_sum {
                    minsum_check(&self.v2c[range.clone()], &mut self.c2v[range]);
                } else {
                    bp_check(&self.v2c[range.clone()], &mut self.c2v[range], &mut self.scratch, clip);
                }
            }
            // A-posteriori decisions.
            for v in 0..g.n() {
                let total: f64 = llr[v] + g.var_edges(v).iter().map(|&e| self.c2v[e as usize]).sum::<f64>();
                self.bits[v] = hard(total);
            }
            if g.syndrome_is_zero(&self.bits) {
                converged = true;
                if self.cfg.early_stop {
                    break;
                }
            } else {
                converged = false;
            }
        }
        DecodeResult::new(self.code, self.bits.clone(), converged, iterations)
    }
}

fn bp_check(input: &[f64], output: &mut [f64], scratch: &mut Vec<f64>, clip: f64) {
    let d = input.len();
    scratch.clear();
    scratch.extend(input.iter().map(|&x| (0.5 * x).tanh()));
    // output[k] = product of all tanh values except the k-th, by forward and
    // backward partial products.
    let mut forward = 1.0;
    for k in 0..d {
        output[k] = forward;
        forward *= scratch[k];
    }
    let mut backward = 1.0;
    for k in (0..d).rev() {
        let p = output[k] * backward;
        output[k] = (2.0 * p.atanh()).clamp(-clip, clip);
        backward *= scratch[k];
    }
}

fn minsum_check(input: &[f64], output: &mut [f64]) {
    let mut min1 = f64::INFINITY;
    let mut min2 = f64::INFINITY;
    let mut arg = 0;
    let mut negative = false;
    for (k, &x) in input.iter().enumerate() {
        let a = x.abs();
        if x < 0.0 {
            negative = !negative;
        }
        if a < min1 {
            min2 = min1;
            min1 = a;
            arg = k;
        } else if a < min2 {
            min2 = a;
        }
    }
    for (k, &x) in input.iter().enumerate() {
        let mag = if k == arg { min2 } else { min1 };
        let neg = negative ^ (x < 0.0);
        output[k] = if neg { -mag } else { mag };
    }
}

/// Decode with a fresh decoder.
pub fn decode(code: &Code, llr: &[f64], cfg: &DecoderConfig) -> Result<DecodeResult> {
    Decoder::new(code, cfg).decode(llr)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeelingResult {
    pub result: DecodeResult,
    /// Positions still erased at the fixpoint.
    pub residual: Vec<bool>,
    /// Residual erasures per root-code class (1i, 1p, 2i, 2p), when known.
    pub residual_by_class: Option<[usize; 4]>,
}

/// Erasure decoding: repeatedly solve checks with a single erased neighbour.
/// Unresolved bits are reported as errors.
pub fn decode_peeling(code: &Code, erased: &[bool]) -> Result<PeelingResult> {
    let g = &code.graph;
    if erased.len() != g.n() {
        return Err(Error::Dimension(format!(
            "erasure mask of length {} for a length-{} code",
            erased.len(),
            g.n()
        )));
    }
    let mut residual = erased.to_vec();
    let mut pending: Vec<usize> = (0..g.m())
        .map(|c| g.check_vars(c).iter().filter(|&&v| residual[v as usize]).count())
        .collect();
    let mut queue: Vec<usize> = (0..g.m()).filter(|&c| pending[c] == 1).collect();
    let mut rounds = 0;
    while !queue.is_empty() {
        rounds += 1;
        let mut next = Vec::new();
        for c in queue {
            if pending[c] != 1 {
                continue;
            }
            let Some(&v) = g.check_vars(c).iter().find(|&&v| residual[v as usize]) else {
                continue;
            };
            let v = v as usize;
            residual[v] = false;
            for other in g.var_checks(v) {
                pending[other] -= 1;
                if pending[other] == 1 {
                    next.push(other);
                }
            }
        }
        queue = next;
    }
    let bits: Vec<u8> = residual.iter().map(|&e| e as u8).collect();
    let converged = !residual.iter().any(|&e| e);
    let residual_by_class = code.column_class.as_ref().map(|classes| {
        let mut counts = [0usize; 4];
        for (i, &e) in residual.iter().enumerate() {
            if e {
                counts[classes[i] as usize] += 1;
            }
        }
        counts
    });
    Ok(PeelingResult {
        result: DecodeResult::new(code, bits, converged, rounds),
        residual,
        residual_by_class,
    })
}

/// Exhaustive ML decoding from channel LLRs: the codeword maximizing
/// Σ Λ_i x_i, equivalently minimizing the LLR sum over its support.
pub fn decode_ml_llr(code: &Code, llr: &[f64]) -> Result<DecodeResult> {
    if llr.len() != code.n() {
        return Err(Error::Dimension(format!(
            "{} LLRs for a length-{} code",
            llr.len(),
            code.n()
        )));
    }
    let mut best = f64::INFINITY;
    let mut best_word = Codeword::zeros(code.n());
    for_each_codeword(&code.h, ML_MAX_K, |c| {
        let mut metric = 0.0;
        for (w, &word) in c.words().iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                metric += llr[w * 64 + bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
        }
        if metric < best {
            best = metric;
            best_word = c.clone();
        }
    })?;
    Ok(DecodeResult::new(code, best_word.bits(), true, 0))
}

/// Exhaustive ML decoding of a received word; the LLR metric is
/// proportional to the fading-weighted correlation Σ y_i α_j x_i.
pub fn decode_ml_exhaustive(code: &Code, w: &ReceivedWord) -> Result<DecodeResult> {
    decode_ml_llr(code, &channel_llr(w)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::build_root_regular;

    #[test]
    fn bp_check_rule() {
        let out = check_update_bp(&[2.0, -3.0]);
        let want = 2.0 * ((1.0f64).tanh() * (-1.5f64).tanh()).atanh();
        assert!((out - want).abs() < 1e-12);
        assert!((out + 1.693_453_660_970_895).abs() < 1e-12);
        assert_eq!(check_update_bp(&[0.0, 4.0]), 0.0);
        assert!((check_update_bp(&[LLR_MAX, 1.7]) - 1.7).abs() < 1e-9);
    }

    #[test]
    fn minsum_rule() {
        assert_eq!(check_update_minsum(&[2.0, -3.0]), -2.0);
        assert_eq!(check_update_minsum(&[1.0, 2.0, 3.0, 4.0, 5.0]), 1.0);
    }

    #[test]
    fn minsum_dominates_bp_in_magnitude() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let d = rng.gen_range(1..8);
            let xs: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect();
            assert!(check_update_minsum(&xs).abs() >= check_update_bp(&xs).abs() * (1.0 - 1e-9));
        }
    }

    #[test]
    fn extrinsic_kernels_match_scalar_rules() {
        let xs = [1.5, -0.3, 4.0, 2.2, -7.0, 0.9];
        let mut out = [0.0; 6];
        let mut scratch = Vec::new();
        bp_check(&xs, &mut out, &mut scratch, LLR_MAX);
        for k in 0..6 {
            let others: Vec<f64> = xs.iter().enumerate().filter(|p| p.0 != k).map(|p| *p.1).collect();
            assert!((out[k] - check_update_bp(&others)).abs() < 1e-12);
        }
        minsum_check(&xs, &mut out);
        for k in 0..6 {
            let others: Vec<f64> = xs.iter().enumerate().filter(|p| p.0 != k).map(|p| *p.1).collect();
            assert_eq!(out[k], check_update_minsum(&others));
        }
    }

    #[test]
    fn graph_adjacency() {
        let h = BitMatrix::from_rows(&[[1, 1, 0], [0, 1, 1]]).unwrap();
        let g = TannerGraph::new(&h);
        assert_eq!(g.check_vars(1), &[1, 2]);
        assert_eq!(g.var_checks(1), vec![0, 1]);
        assert_eq!(g.edges(), 4);
    }

    #[test]
    fn noiseless_zero_word_needs_no_iterations() {
        let code = Code::from_root(&build_root_regular(16, 1).unwrap());
        let r = decode(&code, &[4.0; 16], &DecoderConfig::default()).unwrap();
        assert!(r.converged && !r.word_error);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn tie_resolves_to_one() {
        let code = Code::from_matrix(BitMatrix::from_rows(&[[1, 1]]).unwrap(), None).unwrap();
        let cfg = DecoderConfig { max_iter: 3, ..Default::default() };
        let r = decode(&code, &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(r.hard_bits, vec![1, 1]);
        assert!(r.converged);
    }

    #[test]
    fn root_code_recovers_info_from_one_block() {
        let root = build_root_regular(40, 2).unwrap();
        let code = Code::from_root(&root);
        let mut llr = vec![0.0; 40];
        llr[20..].fill(LLR_MAX);
        let r = decode(&code, &llr, &DecoderConfig::default()).unwrap();
        assert!(!r.info_error);
        let llr = vec![0.0; 40];
        let r = decode(&code, &llr, &DecoderConfig::default()).unwrap();
        assert!(r.info_error);
    }

    #[test]
    fn peeling_patterns_on_root_code() {
        let root = build_root_regular(40, 4).unwrap();
        let code = Code::from_root(&root);
        for (e1, e2) in [(false, false), (true, false), (false, true), (true, true)] {
            let mask: Vec<bool> = (0..40).map(|i| if i < 20 { e1 } else { e2 }).collect();
            let p = decode_peeling(&code, &mask).unwrap();
            assert_eq!(p.result.info_error, e1 && e2);
            let counts = p.residual_by_class.unwrap();
            assert_eq!(counts[0] + counts[2] > 0, e1 && e2);
        }
    }

    #[test]
    fn ml_decoder_returns_sent_word_when_noiseless() {
        let h = BitMatrix::from_rows(&[
            [1, 0, 1, 0, 1, 0, 1],
            [0, 1, 1, 0, 0, 1, 1],
            [0, 0, 0, 1, 1, 1, 1],
        ])
        .unwrap();
        let code = Code::from_matrix(h, None).unwrap();
        let sent = [1u8, 1, 1, 0, 0, 0, 0];
        let llr: Vec<f64> = sent.iter().map(|&b| if b == 1 { -3.0 } else { 3.0 }).collect();
        let r = decode_ml_llr(&code, &llr).unwrap();
        assert_eq!(r.hard_bits, sent);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let code = Code::from_matrix(BitMatrix::from_rows(&[[1, 1]]).unwrap(), None).unwrap();
        assert!(decode(&code, &[1.0], &DecoderConfig::default()).is_err());
    }
}
