//! Segmented prime sieve and prime-power enumeration.
//!
//! The sieve partitions `[2, limit]` into fixed-width segments that are
//! processed independently and concatenated in order, so the output is
//! deterministic regardless of how the segments are scheduled.

use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use thiserror::Error;

/// Hard ceiling on sieve range; operations refuse above this rather than
/// approximate silently.
pub const MAX_SIEVE_LIMIT: u64 = 100_000_000;

const SEGMENT_WIDTH: u64 = 1 << 21;

#[derive(Debug, Error, PartialEq)]
pub enum SieveError {
    #[error("sieve limit {0} exceeds supported maximum {MAX_SIEVE_LIMIT}")]
    LimitTooLarge(u64),
}

/// Simple Eratosthenes for the base primes up to `n` (small `n` only).
fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    out
}

fn sieve_segment(base: &[u64], lo: u64, hi: u64) -> Vec<u64> {
    let len = (hi - lo) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p >= hi {
            break;
        }
        let mut start = ((lo + p - 1) / p) * p;
        if start < p * p {
            start = p * p;
        }
        let mut q = start;
        while q < hi {
            composite[(q - lo) as usize] = true;
            q += p;
        }
    }
    (lo..hi)
        .filter(|&n| n >= 2 && !composite[(n - lo) as usize])
        .collect()
}

/// All primes `<= limit`, via the segmented sieve.
pub fn primes_up_to(limit: u64) -> Result<Vec<u64>, SieveError> {
    if limit > MAX_SIEVE_LIMIT {
        return Err(SieveError::LimitTooLarge(limit));
    }
    if limit < 2 {
        return Ok(Vec::new());
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = small_primes(root);
    let ranges: Vec<(u64, u64)> = (2..=limit)
        .step_by(SEGMENT_WIDTH as usize)
        .map(|lo| (lo, (lo + SEGMENT_WIDTH).min(limit + 1)))
        .collect();
    let segments: Vec<Vec<u64>> = ranges
        .par_iter()
        .map(|&(lo, hi)| sieve_segment(&base, lo, hi))
        .collect();
    Ok(segments.concat())
}

/// Process-wide cache of the largest prime list computed so far.
static PRIME_CACHE: OnceLock<Mutex<Option<(u64, Arc<Vec<u64>>)>>> = OnceLock::new();

/// Shared primes `<= limit`; reuses and extends a process-wide cache.
pub fn shared_primes(limit: u64) -> Result<Arc<Vec<u64>>, SieveError> {
    if limit > MAX_SIEVE_LIMIT {
        return Err(SieveError::LimitTooLarge(limit));
    }
    let cache = PRIME_CACHE.get_or_init(|| Mutex::new(None));
    let mut guard = cache.lock().unwrap();
    if let Some((cached_limit, ref primes)) = *guard {
        if cached_limit >= limit {
            return Ok(primes.clone());
        }
    }
    let primes = Arc::new(primes_up_to(limit)?);
    *guard = Some((limit, primes.clone()));
    Ok(primes)
}

/// Prime powers `p^k <= limit` visited in no particular order between primes;
/// the callback receives `(p, k, p^k)`.
pub fn for_each_prime_power<F: FnMut(u64, u32, u64)>(
    limit: u64,
    mut f: F,
) -> Result<(), SieveError> {
    let primes = shared_primes(limit)?;
    for &p in primes.iter() {
        if p > limit {
            break;
        }
        let mut q = p;
        let mut k = 1u32;
        loop {
            f(p, k, q);
            match q.checked_mul(p) {
                Some(next) if next <= limit => {
                    q = next;
                    k += 1;
                }
                _ => break,
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(primes_up_to(1).unwrap(), Vec::<u64>::new());
        assert_eq!(primes_up_to(10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(100).unwrap().len(), 25);
        assert_eq!(primes_up_to(1_000_000).unwrap().len(), 78_498);
    }

    #[test]
    fn segments_are_seamless() {
        // Limits straddling the segment width must agree with a direct sieve.
        let w = SEGMENT_WIDTH;
        for limit in [w - 1, w, w + 1, w + 100] {
            let seg = primes_up_to(limit).unwrap();
            let direct = small_primes(limit);
            assert_eq!(seg, direct, "limit = {limit}");
        }
    }

    #[test]
    fn refuses_oversized_limit() {
        assert_eq!(
            primes_up_to(MAX_SIEVE_LIMIT + 1),
            Err(SieveError::LimitTooLarge(MAX_SIEVE_LIMIT + 1))
        );
    }

    #[test]
    fn prime_powers_enumeration() {
        let mut seen = Vec::new();
        for_each_prime_power(32, |p, k, q| seen.push((p, k, q))).unwrap();
        assert!(seen.contains(&(2, 5, 32)));
        assert!(seen.contains(&(3, 3, 27)));
        assert!(seen.contains(&(31, 1, 31)));
        assert!(!seen.iter().any(|&(_, _, q)| q > 32));
        let count_2 = seen.iter().filter(|&&(p, _, _)| p == 2).count();
        assert_eq!(count_2, 5);
    }
}
