//! Small numeric helpers shared across modules.

/// Correctly rounded floating-point summation (Shewchuk's partials algorithm).
///
/// The result depends only on the multiset of values added, not on their order,
/// so two code paths summing the same contributions agree bit for bit.
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let mut x = value;
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // round-half-even correction when the remaining partials push past a tie
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Exact sum of nonnegative fractions `w / s`.
///
/// The value is the correctly rounded float of the exact rational sum. If the
/// reduced numerator or denominator leaves the range where that rounding is a
/// single division, it falls back to [`ExactSum`] over the rounded terms.
#[derive(Debug, Clone)]
pub struct FractionSum {
    num: u128,
    den: u128,
    exact: bool,
    float: ExactSum,
}

impl Default for FractionSum {
    fn default() -> Self {
        Self {
            num: 0,
            den: 1,
            exact: true,
            float: ExactSum::new(),
        }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl FractionSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, w: u64, s: u64) {
        assert!(s > 0, "zero denominator");
        self.float.add(w as f64 / s as f64);
        if !self.exact {
            return;
        }
        let (w, s) = (w as u128, s as u128);
        let g = gcd(self.den, s);
        let next = (self.den / g).checked_mul(s).and_then(|den| {
            let a = self.num.checked_mul(den / self.den)?;
            let b = w.checked_mul(den / s)?;
            Some((a.checked_add(b)?, den))
        });
        match next {
            Some((num, den)) => {
                let g = gcd(num, den).max(1);
                self.num = num / g;
                self.den = den / g;
            }
            None => self.exact = false,
        }
    }

    /// Reduced `(numerator, denominator)` while the sum is still tracked exactly.
    pub fn ratio(&self) -> Option<(u128, u128)> {
        self.exact.then_some((self.num, self.den))
    }

    pub fn value(&self) -> f64 {
        const LIMIT: u128 = 1 << 53;
        if self.exact && self.num < LIMIT && self.den < LIMIT {
            self.num as f64 / self.den as f64
        } else {
            self.float.value()
        }
    }
}


pub fn exact_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = ExactSum::new();
    acc.extend(values);
    acc.value()
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(exact_sum(values.iter().copied()) / values.len() as f64)
    }
}

/// Median with the midpoint rule for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    })
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_std(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values)?;
    let ss = exact_sum(values.iter().map(|v| (v - m) * (v - m)));
    Some((ss / (values.len() - 1) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    #[test]
    fn fraction_sum_is_exact() {
        let mut f = FractionSum::new();
        for _ in 0..3 {
            f.add(1, 3);
        }
        assert_eq!(f.ratio(), Some((1, 1)));
        assert_eq!(f.value(), 1.0);
        f.add(5, 10);
        f.add(7, 6);
        assert_eq!(f.ratio(), Some((8, 3)));
        assert_eq!(f.value(), 8.0 / 3.0);
        assert_eq!(FractionSum::new().value(), 0.0);
    }

    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_sum_cancellation() {
        assert_eq!(exact_sum([1e100, 1.0, -1e100]), 1.0);
        assert_eq!(exact_sum([0.1; 10]), 1.0);
        assert_eq!(exact_sum(std::iter::empty()), 0.0);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[0.5, 0.3, 0.2]), Some(0.3));
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    proptest! {
        #[test]
        fn exact_sum_is_order_independent(mut xs in prop::collection::vec(-1e6f64..1e6, 0..40), seed in any::<u64>()) {
            let forward = exact_sum(xs.iter().copied());
            let n = xs.len();
            if n > 1 {
                let k = (seed as usize) % n;
                xs.rotate_left(k);
                xs.reverse();
            }
            prop_assert_eq!(forward.to_bits(), exact_sum(xs.iter().copied()).to_bits());
        }
    }
}
