//! Exact quantities by enumeration, for models small enough to sum over.
//!
//! Sums run over the smaller of the two layers; the other layer is
//! marginalised in closed form, so the cost is `2^min(N, M)` free-energy
//! evaluations.

use ndarray::{Array1, Array2};

use super::{Moments, RbmParams};
use crate::binary::BinaryVector;
use crate::error::{check_dim, Error, Result};

/// Largest `n_visible + n_hidden` accepted by the exact routines.
pub const ENUMERATION_LIMIT: usize = 24;

fn guard(params: &RbmParams) -> Result<()> {
    let units = params.n_visible() + params.n_hidden();
    if units > ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            units,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

fn bits_f64(index: u64, len: usize) -> Array1<f64> {
    (0..len).map(|i| ((index >> i) & 1) as f64).collect()
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

/// Which layer is enumerated explicitly.
enum Side {
    Visible,
    Hidden,
}

fn side(params: &RbmParams) -> (Side, usize) {
    if params.n_visible() <= params.n_hidden() {
        (Side::Visible, params.n_visible())
    } else {
        (Side::Hidden, params.n_hidden())
    }
}

/// Unnormalised log-marginals of every configuration of the enumerated layer.
fn log_marginals(params: &RbmParams) -> (Side, usize, Vec<f64>) {
    let (side, len) = side(params);
    let logs = (0..1u64 << len)
        .map(|idx| {
            let x = bits_f64(idx, len);
            match side {
                Side::Visible => -params.free_energy_of(x.view()),
                Side::Hidden => -params.hidden_free_energy_of(x.view()),
            }
        })
        .collect();
    (side, len, logs)
}

/// `log Z = log Σ_{v,h} exp(-E(v, h))`.
pub fn log_partition(params: &RbmParams) -> Result<f64> {
    guard(params)?;
    let (_, _, logs) = log_marginals(params);
    Ok(log_sum_exp(&logs))
}

/// Total log-likelihood `Σ_t log P(v_t)` of `data` under the model.
pub fn log_likelihood_exact(params: &RbmParams, data: &[BinaryVector]) -> Result<f64> {
    guard(params)?;
    let log_z = log_partition(params)?;
    let mut total = 0.0;
    for record in data {
        check_dim("record width", params.n_visible(), record.len())?;
        total -= params.free_energy_of(record.to_f64().view());
    }
    Ok(total - data.len() as f64 * log_z)
}

/// Exact `⟨v h⟩`, `⟨v⟩`, `⟨h⟩` under the model's Boltzmann distribution.
pub fn exact_model_expectations(params: &RbmParams) -> Result<Moments> {
    guard(params)?;
    let (side, len, logs) = log_marginals(params);
    let log_z = log_sum_exp(&logs);
    let (n, m) = (params.n_visible(), params.n_hidden());
    let mut vh = Array2::<f64>::zeros((n, m));
    let mut ev = Array1::<f64>::zeros(n);
    let mut eh = Array1::<f64>::zeros(m);
    for (idx, log_w) in logs.iter().enumerate() {
        let w = (log_w - log_z).exp();
        let x = bits_f64(idx as u64, len);
        // Pair the enumerated configuration with the conditional mean of the other layer.
        let (v, h) = match side {
            Side::Visible => {
                let h = params.hidden_probs_of(x.view());
                (x, h)
            }
            Side::Hidden => {
                let v = params.visible_probs_of(x.view());
                (v, x)
            }
        };
        ev.scaled_add(w, &v);
        eh.scaled_add(w, &h);
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                let mut row = vh.row_mut(i);
                row.scaled_add(w * vi, &h);
            }
        }
    }
    Ok(Moments { vh, v: ev, h: eh })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use ndarray::array;

    #[test]
    fn uniform_model_likelihood() {
        let zero = RbmParams::zeros(3, 4);
        let ll = log_likelihood_exact(&zero, &[BinaryVector::from_index(5, 3)]).unwrap();
        assert!((ll + 3.0 * 2f64.ln()).abs() < 1e-12);

        let zero = RbmParams::zeros(2, 2);
        let data: Vec<_> = (0..4).map(|i| BinaryVector::from_index(i, 2)).collect();
        let ll = log_likelihood_exact(&zero, &data).unwrap();
        assert!((ll + 5.545_177_444_479_562).abs() < 1e-12);
    }

    #[test]
    fn capacity_guard() {
        let p = RbmParams::zeros(13, 12);
        assert!(matches!(log_partition(&p), Err(Error::Capacity { units: 25, .. })));
        assert!(matches!(exact_model_expectations(&p), Err(Error::Capacity { .. })));
    }

    #[test]
    fn uniform_expectations() {
        let m = exact_model_expectations(&RbmParams::zeros(3, 2)).unwrap();
        assert!(m.vh.iter().all(|&x| (x - 0.25).abs() < 1e-15));
        assert!(m.v.iter().chain(m.h.iter()).all(|&x| (x - 0.5).abs() < 1e-15));
    }

    #[test]
    fn single_pair_expectation() {
        for w in [-2.0, 0.0, 0.7, 3.0] {
            let p = RbmParams::from_parts(array![[w]], array![0.0], array![0.0]).unwrap();
            let m = exact_model_expectations(&p).unwrap();
            let expected = f64::exp(w) / (3.0 + f64::exp(w));
            assert!((m.vh[[0, 0]] - expected).abs() < 1e-14, "w={w}");
        }
    }

    #[test]
    fn both_enumeration_sides_agree() {
        let mut rng = seeded(3);
        let p = RbmParams::random(5, 3, 1.0, &mut rng);
        let t = RbmParams::from_parts(
            p.weights().t().to_owned(),
            p.hidden_bias().clone(),
            p.visible_bias().clone(),
        )
        .unwrap();
        assert!((log_partition(&p).unwrap() - log_partition(&t).unwrap()).abs() < 1e-12);
        let a = exact_model_expectations(&p).unwrap();
        let b = exact_model_expectations(&t).unwrap();
        assert!(a.vh.iter().zip(b.vh.t().iter()).all(|(x, y)| (x - y).abs() < 1e-12));
        assert!(a.v.iter().zip(b.h.iter()).all(|(x, y)| (x - y).abs() < 1e-12));
    }
}
