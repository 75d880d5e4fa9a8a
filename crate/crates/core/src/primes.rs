//! Prime tables indexed by rank, used as vertex sets of Green-Tao hypergraphs.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrimeError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
}

/// The first `n` primes, in increasing order. Rank `i` (1-based) is `primes()[i - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn with_count(n: usize) -> Self {
        Self {
            primes: first_primes(n),
        }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Rank of `p` within this table, if present.
    pub fn rank(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok().map(|i| i + 1)
    }
}

/// Sieve of Eratosthenes over `[0, limit]`; `result[i]` is true iff `i` is prime.
pub fn sieve(limit: u64) -> Vec<bool> {
    let limit = limit as usize;
    let mut is_prime = vec![true; limit + 1];
    is_prime[0] = false;
    if limit >= 1 {
        is_prime[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if is_prime[i] {
            let mut j = i * i;
            while j <= limit {
                is_prime[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is_prime
}

/// Upper bound on the `n`-th prime (Rosser's bound for n >= 6).
fn nth_prime_bound(n: usize) -> u64 {
    if n < 6 {
        return 15;
    }
    let nf = n as f64;
    (nf * (nf.ln() + nf.ln().ln())).ceil() as u64 + 1
}

/// The `n` smallest primes in increasing order.
pub fn first_primes(n: usize) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let mut limit = nth_prime_bound(n);
    loop {
        let flags = sieve(limit);
        let primes: Vec<u64> = flags
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(i, _)| i as u64)
            .take(n)
            .collect();
        if primes.len() == n {
            return primes;
        }
        limit *= 2;
    }
}

/// 1-based rank of the prime `p`.
pub fn prime_rank(p: u64) -> Result<usize, PrimeError> {
    if p < 2 {
        return Err(PrimeError::NotPrime(p));
    }
    let flags = sieve(p);
    if !flags[p as usize] {
        return Err(PrimeError::NotPrime(p));
    }
    Ok(flags.iter().filter(|&&b| b).count())
}
