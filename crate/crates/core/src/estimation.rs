//! Exact progression counts and the fitted asymptotic count model
//! `C * x^2 / (ln x)^k * (1 + sum_i a_i / (ln x)^i)` with `x = n ln n`.

use thiserror::Error;

use crate::hypergraph::Family;
use crate::primes::{first_primes, sieve};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimationError {
    #[error("need at least {needed} samples for order {order}, got {got}")]
    TooFewSamples {
        needed: usize,
        order: usize,
        got: usize,
    },
    #[error("sample at n = {0} is below 2; the model needs ln(n ln n) > 0")]
    SampleTooSmall(usize),
    #[error("the least-squares system is singular for these samples")]
    Singular,
    #[error("samples line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Exact number of size-`k` progressions among the first `n` vertices of the family.
pub fn count_progressions(family: Family, k: usize, n: usize) -> u64 {
    let n64 = n as u64;
    match k {
        0 => 0,
        1 => n64,
        2 => n64 * n64.saturating_sub(1) / 2,
        _ => match family {
            Family::Vdw => {
                let span = k as u64 - 1;
                (1..)
                    .map(|d| span * d)
                    .take_while(|&reach| reach < n64)
                    .map(|reach| n64 - reach)
                    .sum()
            }
            Family::Gt => {
                let primes = first_primes(n);
                let Some(&max) = primes.last() else {
                    return 0;
                };
                let is_prime = sieve(max);
                let span = k as u64 - 1;
                let mut count = 0;
                for (i, &a) in primes.iter().enumerate() {
                    for &b in &primes[i + 1..] {
                        let d = b - a;
                        if a + span * d > max {
                            break;
                        }
                        if (2..=span).all(|t| is_prime[(a + t * d) as usize]) {
                            count += 1;
                        }
                    }
                }
                count
            }
        },
    }
}

/// The fitted model for progressions of size `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountModel {
    pub k: usize,
    /// Leading coefficient `C_k`.
    pub c: f64,
    /// Correction coefficients `a_1..a_N`.
    pub a: Vec<f64>,
}

impl CountModel {
    pub fn order(&self) -> usize {
        self.a.len()
    }
}

fn log_x(n: usize) -> f64 {
    let n = n as f64;
    (n * n.ln()).ln()
}

/// `x^2 / (ln x)^(k + i)` for `i = 0..=order`.
fn basis(k: usize, order: usize, n: usize) -> Vec<f64> {
    let nf = n as f64;
    let x = nf * nf.ln();
    let lx = x.ln();
    (0..=order)
        .map(|i| x * x / lx.powi((k + i) as i32))
        .collect()
}

pub fn estimate_count(model: &CountModel, n: usize) -> f64 {
    let nf = n as f64;
    let x = nf * nf.ln();
    let lx = x.ln();
    let correction: f64 = model
        .a
        .iter()
        .enumerate()
        .map(|(i, a)| a / lx.powi(i as i32 + 1))
        .sum();
    model.c * x * x / lx.powi(model.k as i32) * (1.0 + correction)
}

/// Least-squares fit of `C` and `a_1..a_order` to `(n, count)` samples.
///
/// The model is linear in `c_i = C * a_i` (with `a_0 = 1`) over the basis
/// `x^2 / (ln x)^(k+i)`; the normal equations are solved on unit-scaled columns.
pub fn fit_count_model(
    k: usize,
    samples: &[(usize, u64)],
    order: usize,
) -> Result<CountModel, EstimationError> {
    let dim = order + 1;
    if samples.len() < dim {
        return Err(EstimationError::TooFewSamples {
            needed: dim,
            order,
            got: samples.len(),
        });
    }
    if let Some(&(n, _)) = samples.iter().find(|(n, _)| *n < 2 || log_x(*n) <= 0.0) {
        return Err(EstimationError::SampleTooSmall(n));
    }
    let rows: Vec<Vec<f64>> = samples.iter().map(|&(n, _)| basis(k, order, n)).collect();
    let scale: Vec<f64> = (0..dim)
        .map(|j| rows.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt())
        .collect();
    if scale.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return Err(EstimationError::Singular);
    }
    let mut normal = vec![vec![0.0; dim + 1]; dim];
    for (row, &(_, y)) in rows.iter().zip(samples) {
        let z: Vec<f64> = row.iter().zip(&scale).map(|(v, s)| v / s).collect();
        for i in 0..dim {
            for j in 0..dim {
                normal[i][j] += z[i] * z[j];
            }
            normal[i][dim] += z[i] * y as f64;
        }
    }
    let solution = solve_linear(normal).ok_or(EstimationError::Singular)?;
    let coeffs: Vec<f64> = solution.iter().zip(&scale).map(|(c, s)| c / s).collect();
    let c = coeffs[0];
    if c == 0.0 || !c.is_finite() {
        return Err(EstimationError::Singular);
    }
    Ok(CountModel {
        k,
        c,
        a: coeffs[1..].iter().map(|ci| ci / c).collect(),
    })
}

/// Gaussian elimination with partial pivoting on an augmented `dim x (dim+1)` matrix.
fn solve_linear(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let dim = m.len();
    for col in 0..dim {
        let pivot = (col..dim).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        let (upper, lower) = m.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower {
            let factor = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * p;
            }
        }
    }
    let mut x = vec![0.0; dim];
    for row in (0..dim).rev() {
        let tail: f64 = (row + 1..dim).map(|j| m[row][j] * x[j]).sum();
        x[row] = (m[row][dim] - tail) / m[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Parses a samples file: one `n count` pair per line; blank lines and `#` comments are skipped.
pub fn parse_samples(text: &str) -> Result<Vec<(usize, u64)>, EstimationError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| EstimationError::Parse {
            line: i + 1,
            message,
        };
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() != 2 {
            return Err(err("expected `n count`".into()));
        }
        let n = words[0]
            .parse()
            .map_err(|_| err(format!("invalid n `{}`", words[0])))?;
        let count = words[1]
            .parse()
            .map_err(|_| err(format!("invalid count `{}`", words[1])))?;
        out.push((n, count));
    }
    Ok(out)
}

pub fn format_samples(samples: &[(usize, u64)]) -> String {
    samples.iter().map(|(n, c)| format!("{n} {c}\n")).collect()
}
