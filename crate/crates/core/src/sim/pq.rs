use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng_for;
use crate::bch::ComponentCode;
use crate::error::{Error, Result};

const CHUNK: usize = 4096;

/// Monte Carlo estimates of `P(i)` and `Q(i)` with binomial standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalPq {
    pub i: usize,
    pub trials: usize,
    pub p_hat: f64,
    pub q_hat: f64,
    pub p_stderr: f64,
    pub q_stderr: f64,
}

/// Decodes `trials` words with the observed bit wrong and `trials` with it
/// right, each with `i` uniformly placed errors among the other `n − 1`
/// positions, and counts how often the observed bit comes out wrong.
///
/// Trials are split into fixed chunks, chunk `k` drawing from stream `k` of
/// `seed`, so the result does not depend on the thread count.
pub fn empirical_pq(code: &ComponentCode, i: usize, trials: usize, seed: u64) -> Result<EmpiricalPq> {
    let n = code.n();
    if i > n - 1 {
        return Err(Error::config(format!("i={i} exceeds n-1={}", n - 1)));
    }
    if trials < 1000 {
        return Err(Error::config(format!("need at least 1000 trials (got {trials})")));
    }
    let chunks = trials.div_ceil(CHUNK);
    let (p_wrong, q_wrong) = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_for(seed, k as u64);
            let count = CHUNK.min(trials - k * CHUNK);
            let (mut pw, mut qw) = (0usize, 0usize);
            for _ in 0..count {
                for observed_wrong in [true, false] {
                    let pos = rng.gen_range(0..n);
                    let mut support: Vec<usize> = sample(&mut rng, n - 1, i)
                        .into_iter()
                        .map(|j| if j >= pos { j + 1 } else { j })
                        .collect();
                    if observed_wrong {
                        support.push(pos);
                    }
                    let syn = code.syndromes_from_support(support.iter().copied());
                    let flipped = code.locate_errors(&syn).is_some_and(|p| p.contains(&pos));
                    let wrong = observed_wrong ^ flipped;
                    if wrong {
                        if observed_wrong {
                            pw += 1;
                        } else {
                            qw += 1;
                        }
                    }
                }
            }
            (pw, qw)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let nt = trials as f64;
    let p_hat = p_wrong as f64 / nt;
    let q_hat = q_wrong as f64 / nt;
    Ok(EmpiricalPq {
        i,
        trials,
        p_hat,
        q_hat,
        p_stderr: (p_hat * (1.0 - p_hat) / nt).sqrt(),
        q_stderr: (q_hat * (1.0 - q_hat) / nt).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bch::build_bch;

    #[test]
    fn below_t_is_exact() {
        let code = build_bch(5, 2, false).unwrap();
        let r = empirical_pq(&code, 1, 2000, 3).unwrap();
        assert_eq!(r.p_hat, 0.0);
        assert_eq!(r.q_hat, 0.0);
    }

    #[test]
    fn deterministic() {
        let code = build_bch(3, 1, false).unwrap();
        assert_eq!(empirical_pq(&code, 2, 5000, 8).unwrap(), empirical_pq(&code, 2, 5000, 8).unwrap());
    }

    #[test]
    fn rejects_few_trials() {
        let code = build_bch(3, 1, false).unwrap();
        assert!(empirical_pq(&code, 2, 10, 0).unwrap_err().is_config());
    }
}
