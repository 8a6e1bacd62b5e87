//! Bernoulli and Euler number kernels.
//!
//! Conventions, fixed once and tested against each other:
//!
//! * `bernoulli(n)` is `B_n` for `t/(e^t - 1) = sum B_n t^n / n!`, so
//!   `B_1 = -1/2` and `B_{2k+1} = 0` for `k >= 1`.
//! * `euler_number(n)` is the Euler polynomial value `E_n(0)`, the
//!   coefficients of `1/(1 + e^t) = (1/2) sum E_n(0) t^n / n!`. These are
//!   not the integer secant numbers.
//!
//! The two families are linked by
//! `E_{2n-1}(0) = 2 (1 - 2^{2n}) B_{2n} / (2n)`, which is computed by an
//! independent route in [`euler_via_bernoulli`] and cross-checked in tests;
//! the right-hand side is nonzero for every `n >= 1`.
//!
//! Both tables are memoized behind a mutex; recomputation is deterministic,
//! so concurrent fills are idempotent.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::One;

use crate::rat::Rat;

static BERNOULLI: Mutex<Vec<Rat>> = Mutex::new(Vec::new());
static EULER: Mutex<Vec<Rat>> = Mutex::new(Vec::new());

pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// `B_n` under the `t/(e^t - 1)` convention.
pub fn bernoulli(n: usize) -> Rat {
    let mut table = BERNOULLI.lock().unwrap();
    if table.is_empty() {
        table.push(Rat::one());
    }
    while table.len() <= n {
        let m = table.len();
        let next = bernoulli_next(m, &table);
        table.push(next);
    }
    table[n].clone()
}

// Recurrence sum_{k=0}^{m} C(m+1, k) B_k = 0 for m >= 1, solved for B_m.
// Odd entries beyond B_1 vanish and are skipped in the sum.
fn bernoulli_next(m: usize, table: &[Rat]) -> Rat {
    if m % 2 == 1 && m > 1 {
        return Rat::zero();
    }
    let mut sum = Rat::zero();
    let mut binom = BigInt::one(); // C(m+1, 0)
    for (k, b_k) in table.iter().enumerate().take(m) {
        if !b_k.is_zero() {
            sum += &(Rat::from_bigint(binom.clone()) * b_k);
        }
        // C(m+1, k+1) from C(m+1, k)
        binom = binom * (m + 1 - k) / (k + 1);
    }
    -sum / Rat::int((m + 1) as i64)
}

/// Euler polynomial value `E_n(0)`, by truncated series inversion of
/// `(1 + e^t)/2`.
pub fn euler_number(n: usize) -> Rat {
    let mut table = EULER.lock().unwrap();
    if table.len() <= n {
        *table = euler_table(n);
    }
    table[n].clone()
}

fn euler_table(n: usize) -> Vec<Rat> {
    // a_k = [t^k] (1 + e^t)/2 = 1/(2 k!) for k >= 1, a_0 = 1.
    let mut fact = BigInt::one();
    let mut a = Vec::with_capacity(n + 1);
    a.push(Rat::one());
    for k in 1..=n {
        fact *= k;
        a.push(Rat::from_big(BigInt::one(), &fact * 2));
    }
    // b = 1/a as a power series; E_m(0) = m! b_m.
    let mut b: Vec<Rat> = Vec::with_capacity(n + 1);
    b.push(Rat::one());
    for m in 1..=n {
        let mut s = Rat::zero();
        for k in 1..=m {
            if !b[m - k].is_zero() {
                s += &(&a[k] * &b[m - k]);
            }
        }
        b.push(-s);
    }
    let mut fact = BigInt::one();
    b.into_iter()
        .enumerate()
        .map(|(m, bm)| {
            if m > 1 {
                fact *= m;
            }
            bm * Rat::from_bigint(fact.clone())
        })
        .collect()
}

/// `2 (1 - 2^{2n}) B_{2n} / (2n)` for `n >= 1`; equals `E_{2n-1}(0)`.
///
/// Panics if the value comes out zero: the even Bernoulli numbers never
/// vanish, so a zero here can only be an arithmetic bug.
pub fn euler_via_bernoulli(n: usize) -> Rat {
    assert!(n >= 1, "euler_via_bernoulli requires n >= 1");
    let two_pow = BigInt::from(2).pow(2 * n as u32);
    let factor = Rat::from_big((BigInt::one() - two_pow) * 2, BigInt::from(2 * n as u64));
    let value = factor * bernoulli(2 * n);
    assert!(
        !value.is_zero(),
        "euler_via_bernoulli({n}) = 0; B_{} should never vanish",
        2 * n
    );
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: invert (e^t - 1)/t = sum t^k/(k+1)! as a power
    // series and scale by n!. Shares no code with `bernoulli`.
    fn bernoulli_series_oracle(n: usize) -> Rat {
        let a: Vec<Rat> = (0..=n)
            .map(|k| Rat::from_big(BigInt::one(), factorial(k + 1)))
            .collect();
        let mut b: Vec<Rat> = vec![Rat::one()];
        for m in 1..=n {
            let mut s = Rat::zero();
            for k in 1..=m {
                s += &(&a[k] * &b[m - k]);
            }
            b.push(-s);
        }
        Rat::from_bigint(factorial(n)) * &b[n]
    }

    #[test]
    fn bernoulli_base_values() {
        assert_eq!(bernoulli(0), Rat::one());
        assert_eq!(bernoulli(1), Rat::new(-1, 2));
        assert_eq!(bernoulli(2), Rat::new(1, 6));
        assert_eq!(bernoulli(4), Rat::new(-1, 30));
        assert_eq!(bernoulli(12), Rat::new(-691, 2730));
    }

    #[test]
    fn bernoulli_matches_series_inversion_oracle() {
        for n in 0..=24 {
            assert_eq!(bernoulli(n), bernoulli_series_oracle(n), "B_{n}");
        }
    }

    #[test]
    fn odd_bernoulli_vanish() {
        for k in 1..=15 {
            assert!(bernoulli(2 * k + 1).is_zero(), "B_{} != 0", 2 * k + 1);
        }
    }

    #[test]
    fn euler_base_values() {
        assert_eq!(euler_number(0), Rat::one());
        assert_eq!(euler_number(1), Rat::new(-1, 2));
        assert_eq!(euler_number(3), Rat::new(1, 4));
        assert_eq!(euler_number(5), Rat::new(-1, 2));
        assert_eq!(euler_number(7), Rat::new(17, 8));
    }

    #[test]
    fn even_euler_vanish() {
        for k in 1..=12 {
            assert!(euler_number(2 * k).is_zero(), "E_{}(0) != 0", 2 * k);
        }
    }

    #[test]
    fn bridge_between_the_two_routes() {
        for n in 1..=16 {
            assert_eq!(
                euler_via_bernoulli(n),
                euler_number(2 * n - 1),
                "bridge at n={n}"
            );
        }
    }

    #[test]
    fn bridge_examples() {
        assert_eq!(euler_via_bernoulli(1), Rat::new(-1, 2));
        assert_eq!(euler_via_bernoulli(2), Rat::new(1, 4));
        assert_eq!(euler_via_bernoulli(5), euler_number(9));
    }

    #[test]
    fn memo_recomputation_is_identical() {
        let first = bernoulli(20);
        let second = bernoulli(20);
        assert_eq!(first, second);
        let e1 = euler_number(15);
        let e2 = euler_number(15);
        assert_eq!(e1, e2);
    }

    #[test]
    fn tables_are_safe_under_concurrent_access() {
        let handles: Vec<_> = (0..8)
            .map(|t| {
                std::thread::spawn(move || {
                    let n = 10 + 3 * (t % 4);
                    (bernoulli(2 * n), euler_number(2 * n - 1))
                })
            })
            .collect();
        for handle in handles {
            let (b, e) = handle.join().unwrap();
            assert!(!b.is_zero());
            assert!(!e.is_zero());
        }
        assert_eq!(bernoulli(26), bernoulli(26));
    }
}
