//! Summary statistics and Welch's unequal-variance t-test.
//!
//! The two-sided p-value uses the identity
//! `P(|T| > t) = I_{ν/(ν+t²)}(ν/2, 1/2)` with the regularized incomplete
//! beta function evaluated by continued fraction, so no external statistics
//! dependency is needed.

use serde::{Deserialize, Serialize};

/// Arithmetic mean; 0.0 for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n − 1 denominator); 0.0 when n < 2.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchTest {
    /// t statistic, (m1 − m2) / √(s1²/n1 + s2²/n2).
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
}

/// Welch's two-sample t-test from summary statistics (sample stdevs).
pub fn welch_from_summary(m1: f64, s1: f64, n1: usize, m2: f64, s2: f64, n2: usize) -> WelchTest {
    assert!(n1 >= 2 && n2 >= 2, "welch test needs at least 2 samples per side");
    let va = s1 * s1 / n1 as f64;
    let vb = s2 * s2 / n2 as f64;
    let se = (va + vb).sqrt();
    if se == 0.0 {
        // Both samples are constant. Equal means give t = 0, p = 1; unequal
        // means are infinitely separated.
        let t = if m1 == m2 { 0.0 } else { f64::INFINITY * (m1 - m2).signum() };
        let p = if m1 == m2 { 1.0 } else { 0.0 };
        return WelchTest {
            t,
            df: (n1 + n2 - 2) as f64,
            p,
        };
    }
    let t = (m1 - m2) / se;
    let df = (va + vb) * (va + vb)
        / (va * va / (n1 as f64 - 1.0) + vb * vb / (n2 as f64 - 1.0));
    WelchTest {
        t,
        df,
        p: student_t_two_sided_p(t, df),
    }
}

/// Welch's two-sample t-test from raw samples.
pub fn welch_from_samples(a: &[f64], b: &[f64]) -> WelchTest {
    welch_from_summary(mean(a), sample_std(a), a.len(), mean(b), sample_std(b), b.len())
}

/// Two-sided tail probability of Student's t distribution with `df` degrees
/// of freedom.
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if !t.is_finite() {
        return 0.0;
    }
    if t == 0.0 {
        return 1.0;
    }
    reg_inc_beta(0.5 * df, 0.5, df / (df + t * t))
}

/// Regularized incomplete beta function I_x(a, b).
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "beta parameters must be positive");
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    // Use the continued fraction in its rapidly converging region.
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 3e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Natural log of the gamma function (Lanczos approximation, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_known_values() {
        assert_relative_eq!(ln_gamma(0.5), (std::f64::consts::PI).sqrt().ln(), epsilon = 1e-12);
        assert_relative_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(ln_gamma(5.0), 24.0_f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn t_distribution_closed_forms() {
        // ν = 1 is Cauchy: P(|T| > 1) = 1/2 exactly.
        assert_relative_eq!(student_t_two_sided_p(1.0, 1.0), 0.5, epsilon = 1e-10);
        // ν = 2 has the closed form P(|T| > t) = 1 − t/√(2 + t²).
        for t in [0.5f64, 1.0, 1.886, 2.92] {
            let expect = 1.0 - t / (2.0 + t * t).sqrt();
            assert_relative_eq!(student_t_two_sided_p(t, 2.0), expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn t_table_spot_checks() {
        // Two-sided 5% critical values from the standard t table.
        assert_relative_eq!(student_t_two_sided_p(2.228, 10.0), 0.05, epsilon = 1e-3);
        assert_relative_eq!(student_t_two_sided_p(1.980, 120.0), 0.05, epsilon = 1e-3);
        // Symmetry.
        assert_relative_eq!(
            student_t_two_sided_p(-2.228, 10.0),
            student_t_two_sided_p(2.228, 10.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn welch_identical_samples() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let r = welch_from_samples(&xs, &xs);
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn welch_summary_hand_check() {
        // (10, 1, 60) vs (0, 1, 60): t = 10/√(2/60) ≈ 54.772.
        let r = welch_from_summary(10.0, 1.0, 60, 0.0, 1.0, 60);
        assert_relative_eq!(r.t, 54.77225575051661, max_relative = 1e-12);
        assert_relative_eq!(r.df, 118.0, max_relative = 1e-10);
        assert!(r.p < 1e-6);
    }

    #[test]
    fn welch_constant_samples_with_different_means() {
        let r = welch_from_samples(&[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0]);
        assert_eq!(r.p, 0.0);
        assert!(r.t.is_infinite() && r.t < 0.0);
    }
}
