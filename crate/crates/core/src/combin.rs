//! Small combinatorial helpers shared by sampling and analytics.

/// Binomial coefficient C(n, k) as f64. Returns 0 for k > n and for negative
/// arguments encoded as `k > n`. Exact for small arguments, accurate to f64
/// rounding elsewhere.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for j in 0..k {
        acc *= (n - j) as f64;
        acc /= (j + 1) as f64;
    }
    acc
}

/// C(n, k) saturating at `cap`. Used for universe-size checks where only
/// "is it at least this big" matters.
pub(crate) fn binomial_capped(n: u64, k: u64, cap: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    for j in 0..k {
        num = num.saturating_mul((n - j) as u128) / (j as u128 + 1);
        if num >= cap {
            return cap;
        }
    }
    num
}

/// Advance `support` (sorted, distinct, drawn from 0..n) to the next
/// combination in lexicographic order. Returns false after the last one.
pub(crate) fn next_combination(support: &mut [u32], n: u32) -> bool {
    let k = support.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if support[i] < n - (k - i) as u32 {
            support[i] += 1;
            for j in i + 1..k {
                support[j] = support[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Kahan-compensated accumulator for sums of many small terms.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
