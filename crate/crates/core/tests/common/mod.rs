//! Brute-force references computed straight from the parameter arrays.
#![allow(dead_code)]

use ndarray::{Array1, Array2};
use qrbm::rbm::RbmParams;
use rand::Rng;
use rand_distr::{Distribution, Normal};

pub fn bits(index: usize, len: usize) -> Vec<u8> {
    (0..len).map(|i| ((index >> i) & 1) as u8).collect()
}

pub fn energy(p: &RbmParams, v: &[u8], h: &[u8]) -> f64 {
    let (w, b, c) = (p.weights(), p.visible_bias(), p.hidden_bias());
    let mut e = 0.0;
    for i in 0..v.len() {
        e -= b[i] * v[i] as f64;
    }
    for j in 0..h.len() {
        e -= c[j] * h[j] as f64;
    }
    for i in 0..v.len() {
        for j in 0..h.len() {
            e -= w[[i, j]] * (v[i] * h[j]) as f64;
        }
    }
    e
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Joint Boltzmann distribution of `exp(−E/scale)`, indexed by
/// `v_index | h_index << n_visible`.
pub fn joint(p: &RbmParams, scale: f64) -> Vec<f64> {
    let (n, m) = (p.n_visible(), p.n_hidden());
    let mut logw = Vec::with_capacity(1 << (n + m));
    for s in 0..1usize << (n + m) {
        let v = bits(s & ((1 << n) - 1), n);
        let h = bits(s >> n, m);
        logw.push(-energy(p, &v, &h) / scale);
    }
    let z = log_sum_exp(&logw);
    logw.iter().map(|l| (l - z).exp()).collect()
}

pub fn log_unnormalised_marginal(p: &RbmParams, v: &[u8]) -> f64 {
    let m = p.n_hidden();
    let terms: Vec<f64> = (0..1usize << m).map(|hi| -energy(p, v, &bits(hi, m))).collect();
    log_sum_exp(&terms)
}

pub fn log_z(p: &RbmParams) -> f64 {
    let (n, m) = (p.n_visible(), p.n_hidden());
    let mut terms = Vec::with_capacity(1 << (n + m));
    for vi in 0..1usize << n {
        let v = bits(vi, n);
        for hi in 0..1usize << m {
            terms.push(-energy(p, &v, &bits(hi, m)));
        }
    }
    log_sum_exp(&terms)
}

pub fn log_likelihood(p: &RbmParams, data: &[Vec<u8>]) -> f64 {
    let lz = log_z(p);
    data.iter().map(|v| log_unnormalised_marginal(p, v) - lz).sum()
}

pub struct Expectations {
    pub vh: Array2<f64>,
    pub v: Array1<f64>,
    pub h: Array1<f64>,
}

pub fn expectations(p: &RbmParams) -> Expectations {
    let (n, m) = (p.n_visible(), p.n_hidden());
    let probs = joint(p, 1.0);
    let mut out = Expectations {
        vh: Array2::zeros((n, m)),
        v: Array1::zeros(n),
        h: Array1::zeros(m),
    };
    for (s, &pr) in probs.iter().enumerate() {
        let v = bits(s & ((1 << n) - 1), n);
        let h = bits(s >> n, m);
        for (i, &vi) in v.iter().enumerate() {
            out.v[i] += pr * vi as f64;
            for (j, &hj) in h.iter().enumerate() {
                out.vh[[i, j]] += pr * (vi * hj) as f64;
            }
        }
        for (j, &hj) in h.iter().enumerate() {
            out.h[j] += pr * hj as f64;
        }
    }
    out
}

pub fn random_params<R: Rng>(n: usize, m: usize, scale: f64, rng: &mut R) -> RbmParams {
    let d = Normal::new(0.0, scale).unwrap();
    let w = Array2::from_shape_fn((n, m), |_| d.sample(rng));
    let b = Array1::from_shape_fn(n, |_| d.sample(rng));
    let c = Array1::from_shape_fn(m, |_| d.sample(rng));
    RbmParams::from_parts(w, b, c).unwrap()
}

/// Total-variation distance between observed state counts and `probs`.
pub fn total_variation(counts: &[usize], probs: &[f64]) -> f64 {
    let n: usize = counts.iter().sum();
    0.5 * counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| (c as f64 / n as f64 - p).abs())
        .sum::<f64>()
}

pub fn state_index(v: &[u8], h: &[u8]) -> usize {
    v.iter().chain(h).enumerate().map(|(i, &b)| (b as usize) << i).sum()
}

/// Pearson χ² statistic against uniform expected counts.
pub fn chi_square_uniform(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    let e = n as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}

/// Hand-counted confusion fixtures: truth, predictions (`A` attack,
/// `B` benign, `I` indeterminate) and `[tp, tn, fp, fn]` with attack as the
/// positive class.
pub const CONFUSION_CASES: [(&str, &str, [usize; 4]); 20] = [
    ("ABAAABBBA", "ABAAABBBA", [5, 4, 0, 0]),
    ("AAAAABBBBB", "AAAAAAAAAA", [5, 0, 5, 0]),
    ("BBBBBB", "BBBBII", [0, 4, 2, 0]),
    ("BBBBBBBBBABBBAAABB", "ABIIBBBAABIABIAAAI", [2, 5, 9, 2]),
    ("BAAAABBAABBBAABB", "BABIBABBABAAABAB", [3, 4, 4, 5]),
    ("AAABB", "BAAIA", [2, 0, 2, 1]),
    ("ABBAABAABABBAA", "IAIABABBBAIBBB", [2, 2, 4, 6]),
    ("BAABAAAA", "IABABBBI", [1, 0, 2, 5]),
    ("ABBBBABBBBABAA", "AABIBBBABAAIAB", [3, 4, 5, 2]),
    ("AAABABBBBBBAAAABB", "IABBAABBBBBIAIIBB", [3, 8, 1, 5]),
    ("BAAABBBAABB", "BAAIBABBBBA", [2, 4, 2, 3]),
    ("AAABBAABA", "IIAABBBBA", [2, 2, 1, 4]),
    ("AABAAAABBABBAB", "BAIIIABAAIIAAB", [3, 1, 5, 5]),
    ("AAAAAABABABBBBAAB", "AIABABABBBBBBBABA", [4, 5, 2, 6]),
    ("BBABAAAAAB", "AAAABBAABA", [3, 0, 4, 3]),
    ("BAABABABBBABB", "AAIAAABBBIBAI", [2, 2, 6, 3]),
    ("ABABBABBAABAAABBBBAB", "AABAAAAAABIBABAAIIBB", [4, 1, 10, 5]),
    ("BAAAB", "AAABB", [2, 1, 1, 1]),
    ("BBBABBAA", "BAAIBAAA", [2, 2, 3, 1]),
    ("BBABAAA", "AAAAAAA", [4, 0, 3, 0]),
];

pub fn labels(code: &str) -> Vec<qrbm::ClassLabel> {
    use qrbm::ClassLabel::*;
    code.chars()
        .map(|c| match c {
            'A' => Attack,
            'B' => Benign,
            _ => Indeterminate,
        })
        .collect()
}
