//! Compensated summation.

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation, applied to real and imaginary
/// parts separately. The result depends on the order of `add` calls only
/// through rounding of the compensation, so callers feed terms in a fixed
/// order to get reproducible bits.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    re: (f64, f64),
    im: (f64, f64),
}

fn step((sum, comp): (f64, f64), x: f64) -> (f64, f64) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() {
        (sum - t) + x
    } else {
        (x - t) + sum
    };
    (t, comp + c)
}

impl Neumaier {
    pub fn add(&mut self, z: Complex64) {
        self.re = step(self.re, z.re);
        self.im = step(self.im, z.im);
    }

    pub fn add_real(&mut self, x: f64) {
        self.re = step(self.re, x);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

impl FromIterator<Complex64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = Neumaier::default();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}
