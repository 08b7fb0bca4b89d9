/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959964;

/// Wilson score interval for a binomial proportion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilsonInterval {
    pub lower: f64,
    pub upper: f64,
}

impl WilsonInterval {
    pub fn new(errors: u64, trials: u64, z: f64) -> Self {
        if trials == 0 {
            return WilsonInterval { lower: 0.0, upper: 1.0 };
        }
        let n = trials as f64;
        let p = errors as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        WilsonInterval { lower: (centre - half).max(0.0), upper: (centre + half).min(1.0) }
    }

    pub fn ci95(errors: u64, trials: u64) -> Self {
        Self::new(errors, trials, Z95)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }

    pub fn overlaps(&self, other: &WilsonInterval) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}
