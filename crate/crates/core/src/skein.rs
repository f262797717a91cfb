//! Scalar engine: quantum integers, loop values, theta and tetrahedral
//! networks, recoupling coefficients and twist phases at the root of unity
//! `A = exp(2 pi i / 4r)`.
//!
//! Everything here is a pure function of a [`QuantumParams`]; the factorial
//! and theta tables are built once in [`QuantumParams::new`] and never
//! mutated afterwards, so a `QuantumParams` can be shared freely between
//! threads.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

/// Edge and circle labels. Valid colors are `0..=r-2`.
pub type Color = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkeinError {
    #[error("level r = {0} is below the minimum of 3")]
    LevelTooSmall(u32),
    #[error("triple ({0}, {1}, {2}) is not admissible at level r = {3}")]
    Inadmissible(Color, Color, Color, u32),
}

/// Which way a crossed pair of legs is twisted relative to the flat vertex.
///
/// `Positive` is the phase `lambda^{ij}_k` itself, `Negative` its reciprocal.
/// A positive-writhe curl on an `n`-colored strand contributes
/// `(-1)^n A^{n^2 + 2n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwistSense {
    Positive,
    Negative,
}

impl TwistSense {
    pub fn flip(self) -> Self {
        match self {
            TwistSense::Positive => TwistSense::Negative,
            TwistSense::Negative => TwistSense::Positive,
        }
    }
}

#[derive(Debug)]
struct Tables {
    delta: Vec<f64>,
    /// `delta_fact[n + 1] = Delta_n!`, starting at `n = -1`.
    delta_fact: Vec<f64>,
    /// `qfact[n] = [n]!`.
    qfact: Vec<f64>,
    /// Flattened `(r-1)^3` cube, NaN where inadmissible.
    theta: Vec<f64>,
}

/// Level `r` together with the derived root of unity and memoized tables.
#[derive(Debug, Clone)]
pub struct QuantumParams {
    r: u32,
    a: Complex64,
    tables: Arc<Tables>,
}

/// `sin(m pi / r)` with exact zeros at multiples of `r`.
fn sin_pi_over(m: i64, r: u32) -> f64 {
    let period = 2 * r as i64;
    let m = m.rem_euclid(period);
    if m % r as i64 == 0 {
        0.0
    } else {
        (m as f64 * PI / r as f64).sin()
    }
}

impl QuantumParams {
    pub fn new(r: u32) -> Result<Self, SkeinError> {
        if r < 3 {
            return Err(SkeinError::LevelTooSmall(r));
        }
        let a = Complex64::from_polar(1.0, 2.0 * PI / (4.0 * r as f64));
        let top = 2 * r as usize + 2;
        let s1 = sin_pi_over(1, r);

        let delta: Vec<f64> = (0..top)
            .map(|n| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign * sin_pi_over(n as i64 + 1, r) / s1
            })
            .collect();

        let mut delta_fact = Vec::with_capacity(top + 1);
        delta_fact.push(1.0);
        for d in &delta {
            let last = *delta_fact.last().unwrap();
            delta_fact.push(last * d);
        }

        let mut qfact = Vec::with_capacity(top);
        qfact.push(1.0);
        for n in 1..top {
            let last = qfact[n - 1];
            qfact.push(last * sin_pi_over(n as i64, r) / s1);
        }

        let mut params = QuantumParams {
            r,
            a,
            tables: Arc::new(Tables {
                delta,
                delta_fact,
                qfact,
                theta: Vec::new(),
            }),
        };

        let side = (r - 1) as usize;
        let mut theta = vec![f64::NAN; side * side * side];
        for i in 0..side as Color {
            for j in 0..side as Color {
                for k in 0..side as Color {
                    if params.admissible(i, j, k) {
                        theta[(i as usize * side + j as usize) * side + k as usize] =
                            params.theta_formula(i, j, k);
                    }
                }
            }
        }
        Arc::get_mut(&mut params.tables).unwrap().theta = theta;
        Ok(params)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// The root of unity `A = exp(2 pi i / 4r)`.
    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn color_max(&self) -> Color {
        self.r - 2
    }

    pub fn colors(&self) -> std::ops::RangeInclusive<Color> {
        0..=self.color_max()
    }

    /// `A^m` for any integer exponent, computed from the reduced angle.
    pub fn a_pow(&self, m: i64) -> Complex64 {
        let period = 4 * self.r as i64;
        let m = m.rem_euclid(period);
        Complex64::from_polar(1.0, 2.0 * PI * m as f64 / period as f64)
    }

    /// Quantum integer `[n] = sin(n pi / r) / sin(pi / r)`.
    pub fn quantum_int(&self, n: i64) -> f64 {
        sin_pi_over(n, self.r) / sin_pi_over(1, self.r)
    }

    /// `[n]!` for `n >= 0`; zero once the product reaches `[r]`.
    pub fn quantum_factorial(&self, n: i64) -> f64 {
        assert!(n >= 0, "quantum factorial of negative integer {n}");
        match self.tables.qfact.get(n as usize) {
            Some(v) => *v,
            None => 0.0,
        }
    }

    /// Loop value `Delta_n = (-1)^n sin((n+1) pi / r) / sin(pi / r)`.
    pub fn delta(&self, n: i64) -> f64 {
        assert!(n >= -1, "delta is defined for n >= -1, got {n}");
        if n >= 0 {
            if let Some(v) = self.tables.delta.get(n as usize) {
                return *v;
            }
        }
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        sign * self.quantum_int(n + 1)
    }

    /// `Delta_n! = Delta_n Delta_{n-1} ... Delta_0`, with `Delta_{-1}! = 1`.
    pub fn delta_factorial(&self, n: i64) -> f64 {
        assert!(n >= -1, "delta factorial is defined for n >= -1, got {n}");
        match self.tables.delta_fact.get((n + 1) as usize) {
            Some(v) => *v,
            None => (0..=n).map(|k| self.delta(k)).product(),
        }
    }

    /// Triangle inequalities, even perimeter and the level bound.
    pub fn admissible(&self, i: Color, j: Color, k: Color) -> bool {
        let max = self.color_max();
        i <= max
            && j <= max
            && k <= max
            && i <= j + k
            && j <= i + k
            && k <= i + j
            && (i + j + k) % 2 == 0
            && i + j + k <= 2 * max
    }

    fn check(&self, i: Color, j: Color, k: Color) -> Result<(), SkeinError> {
        if self.admissible(i, j, k) {
            Ok(())
        } else {
            Err(SkeinError::Inadmissible(i, j, k, self.r))
        }
    }

    fn theta_formula(&self, i: Color, j: Color, k: Color) -> f64 {
        let (i, j, k) = (i as i64, j as i64, k as i64);
        let x = (j + k - i) / 2;
        let y = (i + k - j) / 2;
        let z = (i + j - k) / 2;
        let df = |n| self.delta_factorial(n);
        df(x + y + z) * df(x - 1) * df(y - 1) * df(z - 1)
            / (df(y + z - 1) * df(x + z - 1) * df(x + y - 1))
    }

    /// Theta network value. Symmetric in its arguments: the table stores the
    /// value under every ordering of the triple.
    pub fn theta(&self, i: Color, j: Color, k: Color) -> Result<f64, SkeinError> {
        self.check(i, j, k)?;
        let side = (self.r - 1) as usize;
        Ok(self.tables.theta[(i as usize * side + j as usize) * side + k as usize])
    }

    /// Tetrahedral network with vertex triples `(i,j,k)`, `(i,m,n)`,
    /// `(j,l,n)` and `(k,l,m)`. Opposite edge pairs are `(i,l)`, `(j,m)`
    /// and `(k,n)`.
    pub fn tet(
        &self,
        i: Color,
        j: Color,
        k: Color,
        l: Color,
        m: Color,
        n: Color,
    ) -> Result<f64, SkeinError> {
        self.check(i, j, k)?;
        self.check(i, m, n)?;
        self.check(j, l, n)?;
        self.check(k, l, m)?;
        let (i, j, k, l, m, n) = (i as i64, j as i64, k as i64, l as i64, m as i64, n as i64);
        let a = [(i + j + k) / 2, (i + m + n) / 2, (j + l + n) / 2, (k + l + m) / 2];
        let b = [(i + j + l + m) / 2, (i + k + l + n) / 2, (j + k + m + n) / 2];
        let qf = |x: i64| self.quantum_factorial(x);

        let mut f = 1.0;
        for bt in b {
            for asv in a {
                f *= qf(bt - asv);
            }
        }
        let e = qf(i) * qf(j) * qf(k) * qf(l) * qf(m) * qf(n);

        let lo = *a.iter().max().unwrap();
        let hi = *b.iter().min().unwrap();
        let mut sum = 0.0;
        for z in lo..=hi {
            let sign = if z % 2 == 0 { 1.0 } else { -1.0 };
            let num = qf(z + 1);
            if num == 0.0 {
                continue;
            }
            let den: f64 = a.iter().map(|&x| qf(z - x)).product::<f64>()
                * b.iter().map(|&x| qf(x - z)).product::<f64>();
            sum += sign * num / den;
        }
        Ok(f / e * sum)
    }

    /// Recoupling coefficient `{i j m; k l n}`: the weight of the channel
    /// `n` (joining `i,l` and `j,k`) when rewriting the edge `m` that joins
    /// `(i,j)` to `(k,l)`.
    pub fn sixj(
        &self,
        i: Color,
        j: Color,
        m: Color,
        k: Color,
        l: Color,
        n: Color,
    ) -> Result<f64, SkeinError> {
        let t1 = self.theta(i, l, n)?;
        let t2 = self.theta(j, k, n)?;
        let tet = self.tet(i, j, m, k, l, n)?;
        Ok(tet * self.delta(n as i64) / (t1 * t2))
    }

    /// Twist phase for a crossed pair of legs `i, j` meeting at a vertex
    /// with third leg `k`.
    pub fn lambda(
        &self,
        i: Color,
        j: Color,
        k: Color,
        sense: TwistSense,
    ) -> Result<Complex64, SkeinError> {
        self.check(i, j, k)?;
        let (i, j, k) = (i as i64, j as i64, k as i64);
        let half = (i + j - k) / 2;
        let exp = i + j - k + (i * i + j * j - k * k) / 2;
        let sign = if half % 2 == 0 { 1.0 } else { -1.0 };
        let exp = match sense {
            TwistSense::Positive => exp,
            TwistSense::Negative => -exp,
        };
        Ok(self.a_pow(exp) * sign)
    }

    /// Phase picked up when removing a curl from an `n`-colored strand.
    pub fn curl(&self, n: Color, sense: TwistSense) -> Complex64 {
        let n = n as i64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let exp = n * n + 2 * n;
        let exp = match sense {
            TwistSense::Positive => exp,
            TwistSense::Negative => -exp,
        };
        self.a_pow(exp) * sign
    }

    /// `N = sum_n Delta_n^2`, the value of an Omega-colored unknot.
    pub fn n_value(&self) -> f64 {
        self.colors().map(|n| self.delta(n as i64).powi(2)).sum()
    }

    /// `r / (2 sin^2(pi / r))`.
    pub fn n_closed_form(&self) -> f64 {
        let s = (PI / self.r as f64).sin();
        self.r as f64 / (2.0 * s * s)
    }

    pub fn kappa(&self) -> Complex64 {
        let r = self.r as f64;
        Complex64::from_polar(1.0, PI * (r - 2.0) * (3.0 - 2.0 * r) / (4.0 * r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 1.618_033_988_749_895;

    fn p(r: u32) -> QuantumParams {
        QuantumParams::new(r).unwrap()
    }

    #[test]
    fn rejects_small_level() {
        assert_eq!(QuantumParams::new(2).unwrap_err(), SkeinError::LevelTooSmall(2));
    }

    #[test]
    fn root_of_unity() {
        for r in 3..=16 {
            let q = p(r);
            assert!((q.a().norm() - 1.0).abs() < 1e-15);
            assert!((q.a().powu(4 * r) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert_eq!(q.colors().count() as u32, r - 1);
        }
    }

    #[test]
    fn quantum_integers() {
        let q = p(5);
        assert_eq!(q.quantum_int(0), 0.0);
        assert!((q.quantum_int(1) - 1.0).abs() < 1e-15);
        assert!((q.quantum_int(2) - GOLDEN).abs() < 1e-12);
        for r in 3..=16 {
            let q = p(r);
            for n in 1..r as i64 {
                let lhs = q.quantum_int(n);
                let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
                assert!((lhs - sign * q.delta(n - 1)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn loop_values() {
        let q = p(5);
        assert_eq!(q.delta(0), 1.0);
        assert!((q.delta(1) + GOLDEN).abs() < 1e-12);
        assert_eq!(q.delta_factorial(-1), 1.0);
        assert_eq!(q.delta_factorial(0), 1.0);
        assert!((q.delta_factorial(2) + 2.618_033_988_749_895).abs() < 1e-12);
        for r in 3..=16 {
            assert!(p(r).delta(r as i64 - 1).abs() < 1e-12);
        }
    }

    #[test]
    fn admissibility() {
        assert!(p(5).admissible(0, 0, 0));
        assert!(!p(5).admissible(1, 1, 1));
        assert!(p(5).admissible(2, 2, 2));
        assert!(!p(4).admissible(2, 2, 2));
        assert!(!p(5).admissible(0, 1, 3));
    }

    #[test]
    fn theta_values() {
        let q = p(5);
        assert_eq!(q.theta(0, 0, 0).unwrap(), 1.0);
        assert!((q.theta(1, 1, 0).unwrap() + GOLDEN).abs() < 1e-12);
        assert!((q.theta(1, 1, 2).unwrap() - GOLDEN).abs() < 1e-12);
        assert!(matches!(q.theta(1, 1, 1), Err(SkeinError::Inadmissible(..))));
    }

    #[test]
    fn theta_permutation_symmetry() {
        for r in 3..=16 {
            let q = p(r);
            for i in q.colors() {
                for j in q.colors() {
                    for k in q.colors() {
                        if !q.admissible(i, j, k) {
                            continue;
                        }
                        let t = q.theta(i, j, k).unwrap();
                        assert!(t != 0.0);
                        for (a, b, c) in [(i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                            assert!((q.theta(a, b, c).unwrap() - t).abs() < 1e-12 * t.abs().max(1.0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tet_trivial_and_degenerate() {
        let q = p(5);
        assert!((q.tet(0, 0, 0, 0, 0, 0).unwrap() - 1.0).abs() < 1e-15);
        // A zero edge pair collapses the tetrahedron onto a theta network.
        let t = q.tet(1, 1, 0, 1, 1, 0).unwrap();
        assert!((t - q.theta(1, 1, 0).unwrap()).abs() < 1e-12);
        assert!(q.tet(1, 1, 1, 1, 1, 1).is_err());
    }

    #[test]
    fn sixj_trivial() {
        let q = p(5);
        assert!((q.sixj(0, 0, 0, 0, 0, 0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_phases() {
        let q = p(5);
        let one = Complex64::new(1.0, 0.0);
        for s in [TwistSense::Positive, TwistSense::Negative] {
            assert!((q.lambda(0, 0, 0, s).unwrap() - one).norm() < 1e-15);
        }
        let pos = q.lambda(1, 1, 0, TwistSense::Positive).unwrap();
        let neg = q.lambda(1, 1, 0, TwistSense::Negative).unwrap();
        assert!((pos + q.a().powu(3)).norm() < 1e-12);
        assert!((pos * neg - one).norm() < 1e-12);
    }

    #[test]
    fn n_value_examples() {
        assert!((p(3).n_value() - 2.0).abs() < 1e-12);
        assert!((p(4).n_value() - 4.0).abs() < 1e-12);
        assert!((p(5).n_value() - 7.236_067_977_499_79).abs() < 1e-9);
        for r in 3..=16 {
            let q = p(r);
            assert!((q.n_value() - q.n_closed_form()).abs() < 1e-9);
        }
    }

    #[test]
    fn kappa_values() {
        let expected = Complex64::from_polar(1.0, -PI / 4.0);
        assert!((p(3).kappa() - expected).norm() < 1e-12);
        for r in 3..=16 {
            assert!((p(r).kappa().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stabilization_identity() {
        for r in 3..=16 {
            let q = p(r);
            let lhs: Complex64 = q
                .colors()
                .map(|n| q.curl(n, TwistSense::Positive) * q.delta(n as i64).powi(2))
                .sum();
            let rhs = q.kappa() * q.n_value().sqrt();
            assert!((lhs - rhs).norm() < 1e-9, "r = {r}: {lhs} vs {rhs}");
        }
    }
}
