//! Prime sieve and summatory machinery for the builtin coefficient series.
//!
//! The von Mangoldt summatories cache prefix sums over blocks of 2^16 so a
//! repeated x-grid evaluation costs one block scan. The divisor summatory
//! uses the hyperbola identity `D(x) = 2 sum_{k<=sqrt x} floor(x/k) - floor(sqrt x)^2`,
//! which is exact and needs no storage.

use crate::error::{Error, Result};

const BLOCK: u64 = 1 << 16;

/// Bit-packed odd-only sieve of Eratosthenes.
pub struct PrimeSieve {
    limit: u64,
    bits: Vec<u64>, // bit i represents the odd number 2i+1
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::argument(format!("sieve limit {limit} too small")));
        }
        let n_odd = ((limit + 1) / 2) as usize;
        let mut bits = vec![u64::MAX; n_odd.div_ceil(64)];
        // clear 1
        bits[0] &= !1;
        let mut p = 3u64;
        while p * p <= limit {
            if bits[(p / 2) as usize / 64] >> ((p / 2) % 64) & 1 == 1 {
                let mut q = p * p;
                while q <= limit {
                    let idx = (q / 2) as usize;
                    bits[idx / 64] &= !(1 << (idx % 64));
                    q += 2 * p;
                }
            }
            p += 2;
        }
        Ok(PrimeSieve { limit, bits })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n == 2 {
            return true;
        }
        if n < 2 || n % 2 == 0 || n > self.limit {
            return false;
        }
        let idx = (n / 2) as usize;
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// Iterate all primes up to the limit.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        std::iter::once(2)
            .chain((1..=(self.limit.saturating_sub(1)) / 2).map(|i| 2 * i + 1))
            .filter(move |&n| self.is_prime(n))
    }

    /// If `n = p^k` for a prime `p`, return `(p, k)`.
    pub fn prime_power(&self, n: u64) -> Option<(u64, u32)> {
        if n < 2 {
            return None;
        }
        if self.is_prime(n) {
            return Some((n, 1));
        }
        for k in 2..=n.ilog2() {
            let r = (n as f64).powf(1.0 / k as f64).round() as u64;
            for cand in r.saturating_sub(1)..=r + 1 {
                if cand >= 2 && cand.checked_pow(k) == Some(n) && self.is_prime(cand) {
                    return Some((cand, k));
                }
            }
        }
        None
    }
}

/// Coefficient weighting applied on top of the von Mangoldt function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Twist {
    /// a_n = Lambda(n)
    Plain,
    /// a_n = 2 cos(ln n) Lambda(n)
    CosLog,
}

impl Twist {
    fn weight(self, n: u64) -> f64 {
        match self {
            Twist::Plain => 1.0,
            Twist::CosLog => 2.0 * (n as f64).ln().cos(),
        }
    }
}

/// Block-cached summatory of a (possibly twisted) von Mangoldt series.
pub struct MangoldtSummatory {
    sieve: PrimeSieve,
    twist: Twist,
    /// prefix[b] = sum of a_n for n <= b * BLOCK
    prefix: Vec<f64>,
}

impl MangoldtSummatory {
    pub fn build(limit: u64, twist: Twist) -> Result<Self> {
        let sieve = PrimeSieve::new(limit)?;
        let n_blocks = (limit / BLOCK) as usize + 1;
        let mut acc = vec![0.0f64; n_blocks + 1];
        for p in sieve.primes() {
            let lnp = (p as f64).ln();
            let mut q = p;
            loop {
                let b = (q / BLOCK) as usize;
                acc[b + 1] += twist.weight(q) * lnp;
                match q.checked_mul(p) {
                    Some(next) if next <= limit => q = next,
                    _ => break,
                }
            }
        }
        for i in 1..acc.len() {
            acc[i] += acc[i - 1];
        }
        Ok(MangoldtSummatory {
            sieve,
            twist,
            prefix: acc,
        })
    }

    pub fn limit(&self) -> u64 {
        self.sieve.limit()
    }

    pub fn sieve(&self) -> &PrimeSieve {
        &self.sieve
    }

    /// a_n for this series (0 unless n is a prime power).
    pub fn coefficient(&self, n: u64) -> f64 {
        match self.sieve.prime_power(n) {
            Some((p, _)) => self.twist.weight(n) * (p as f64).ln(),
            None => 0.0,
        }
    }

    /// Partial sum `A(x) = sum_{n <= x} a_n`; right-continuous in x.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < 2.0 {
            return Ok(0.0);
        }
        let n = x.floor() as u64;
        if n > self.limit() {
            return Err(Error::argument(format!(
                "summatory query at {n} beyond sieve limit {}",
                self.limit()
            )));
        }
        // prefix[b] covers m <= b*BLOCK - 1, so the scan starts at b*BLOCK
        let b = n / BLOCK;
        let mut sum = self.prefix[b as usize];
        for m in (b * BLOCK).max(2)..=n {
            if let Some((p, _)) = self.sieve.prime_power(m) {
                sum += self.twist.weight(m) * (p as f64).ln();
            }
        }
        Ok(sum)
    }
}

/// Exact divisor summatory `D(x) = sum_{n<=x} d(n)` by the hyperbola identity.
pub fn divisor_summatory(x: f64) -> f64 {
    if x < 1.0 {
        return 0.0;
    }
    let n = x.floor() as u64;
    let root = n.isqrt();
    let mut s: u64 = 0;
    for k in 1..=root {
        s += n / k;
    }
    (2 * s - root * root) as f64
}

/// Number of divisors of `n` by trial division against the square root.
pub fn divisor_count(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut count = 0;
    let mut k = 1;
    while k * k <= n {
        if n % k == 0 {
            count += if k * k == n { 1 } else { 2 };
        }
        k += 1;
    }
    count
}

/// Sieve the divisor-count table `d(1..=limit)` in O(limit log limit).
pub fn divisor_table(limit: u64) -> Vec<u32> {
    let n = limit as usize;
    let mut d = vec![0u32; n + 1];
    for k in 1..=n {
        let mut m = k;
        while m <= n {
            d[m] += 1;
            m += k;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_small_primes() {
        let s = PrimeSieve::new(1000).unwrap();
        let primes: Vec<u64> = (1..=30).filter(|&n| s.is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(s.primes().filter(|&p| p <= 100).count(), 25);
    }

    #[test]
    fn prime_power_detection() {
        let s = PrimeSieve::new(100_000).unwrap();
        assert_eq!(s.prime_power(8), Some((2, 3)));
        assert_eq!(s.prime_power(81), Some((3, 4)));
        assert_eq!(s.prime_power(97), Some((97, 1)));
        assert_eq!(s.prime_power(12), None);
        assert_eq!(s.prime_power(1), None);
        assert_eq!(s.prime_power(65536), Some((2, 16)));
    }

    #[test]
    fn psi_at_ten() {
        // psi(10) = 3 ln 2 + 2 ln 3 + ln 5 + ln 7
        let m = MangoldtSummatory::build(1_000, Twist::Plain).unwrap();
        let expected = 3.0 * 2.0f64.ln() + 2.0 * 3.0f64.ln() + 5.0f64.ln() + 7.0f64.ln();
        assert!((m.eval(10.0).unwrap() - expected).abs() < 1e-12);
        assert_eq!(m.eval(0.5).unwrap(), 0.0);
        assert_eq!(m.eval(1.9).unwrap(), 0.0);
    }

    #[test]
    fn psi_block_boundary_consistency() {
        // straddle the 2^16 block boundary: prefix + scan must agree with a
        // direct coefficient sum
        let m = MangoldtSummatory::build(2 * BLOCK + 10, Twist::Plain).unwrap();
        let x = BLOCK as f64 + 7.0;
        let direct: f64 = (2..=(x as u64)).map(|n| m.coefficient(n)).sum();
        assert!((m.eval(x).unwrap() - direct).abs() < 1e-9 * direct.abs());
    }

    #[test]
    fn psi_beyond_limit_is_error() {
        let m = MangoldtSummatory::build(1_000, Twist::Plain).unwrap();
        assert!(m.eval(1001.0).is_err());
    }

    #[test]
    fn cos_twist_coefficient() {
        let m = MangoldtSummatory::build(1_000, Twist::CosLog).unwrap();
        let a9 = m.coefficient(9);
        let expected = 2.0 * 9.0f64.ln().cos() * 3.0f64.ln();
        assert!((a9 - expected).abs() < 1e-14);
        assert_eq!(m.coefficient(10), 0.0);
    }

    #[test]
    fn divisor_summatory_small() {
        // sum_{n<=10} d(n) = 1+2+2+3+2+4+2+4+3+4 = 27
        assert_eq!(divisor_summatory(10.0), 27.0);
        assert_eq!(divisor_summatory(0.5), 0.0);
        assert_eq!(divisor_summatory(1.0), 1.0);
        // against brute force over a range
        for x in [37.0, 100.0, 999.0, 4096.0] {
            let brute: u64 = (1..=(x as u64)).map(divisor_count).sum();
            assert_eq!(divisor_summatory(x), brute as f64, "x={x}");
        }
    }

    #[test]
    fn divisor_table_matches_trial_division() {
        let table = divisor_table(500);
        for n in 1..=500u64 {
            assert_eq!(table[n as usize] as u64, divisor_count(n), "n={n}");
        }
    }
}
