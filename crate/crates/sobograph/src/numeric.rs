//! Small numeric helpers shared across the crate: compensated summation,
//! guarded powers, conjugate exponents and significant-digit formatting.

/// Kahan–Neumaier compensated accumulator.
///
/// Keeps per-term rounding error out of long sums; used everywhere a result
/// is promised to be independent of how many terms happen to be zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sum a slice with compensation.
pub fn kahan_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = KahanSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// |x|^p with exact fast paths for p ∈ {1, 2} and exp(p·ln|x|) otherwise,
/// guarded at x = 0 where ln is undefined.
#[inline]
pub fn abs_pow(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x.abs()
    } else if p == 2.0 {
        x * x
    } else if x == 0.0 {
        0.0
    } else {
        (p * x.abs().ln()).exp()
    }
}

/// w^{1/p} with exact fast paths for p ∈ {1, 2}.
#[inline]
pub fn root_pow(w: f64, p: f64) -> f64 {
    if p == 1.0 {
        w
    } else if p == 2.0 {
        w.sqrt()
    } else if w == 0.0 {
        0.0
    } else {
        (w.ln() / p).exp()
    }
}

/// 1/p' for the Hölder conjugate p' of p (1/p + 1/p' = 1). For p = 1 the
/// conjugate is ∞ and the reciprocal is 0.
#[inline]
pub fn conjugate_reciprocal(p: f64) -> f64 {
    1.0 - 1.0 / p
}

/// Format a nonnegative value as plain decimal with `sig` significant digits.
/// Zero prints as "0".
pub fn format_significant(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let exp = v.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}
