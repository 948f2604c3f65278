//! Complex log-gamma by the Lanczos approximation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

// Godfrey's coefficients, g = 607/128, 15 terms.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_76e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `true` when `z` is (numerically) a pole of Γ, i.e. a non-positive integer.
pub fn is_gamma_pole(z: Complex64) -> bool {
    z.im.abs() < 1e-14 && z.re <= 0.5 && (z.re - z.re.round()).abs() < 1e-14
}

/// A logarithm of Γ(z). The imaginary part is only defined modulo 2π, which
/// is all that ratios of gamma values need.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain(format!("ln_gamma of non-finite {z}")));
    }
    if is_gamma_pole(z) {
        return Err(Error::Pole { z, what: "gamma function pole".into() });
    }
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let sin = (z * PI).sin();
        return Ok(Complex64::new(PI.ln(), 0.0) - sin.ln() - ln_gamma_lanczos(Complex64::new(1.0, 0.0) - z));
    }
    Ok(ln_gamma_lanczos(z))
}

fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    let zm1 = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (zm1 + k as f64);
    }
    let tmp = zm1 + LANCZOS_G + 0.5;
    (zm1 + 0.5) * tmp.ln() - tmp + LN_SQRT_2PI + series.ln()
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    ln_gamma(z).map(|l| l.exp())
}

/// Real gamma function.
pub fn gamma_real(x: f64) -> Result<f64> {
    gamma(Complex64::new(x, 0.0)).map(|v| v.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    // 40-digit reference values, rounded to 20 significant digits.
    const TABLE: &[(f64, f64, f64, f64)] = &[
        (0.5, 0.0, 1.7724538509055160273, 0.0),
        (1.5, 0.0, 0.88622692545275801365, 0.0),
        (3.7, 0.0, 4.1706517837966040301, 0.0),
        (10.25, 0.0, 639232.59877957679428, 0.0),
        (0.1, 0.0, 9.5135076986687312858, 0.0),
        (-0.25, 0.0, -4.9016668098607105805, 0.0),
        (-1.5, 0.0, 2.3632718012073547031, 0.0),
        (-2.7, 0.0, -0.93108278483896396546, 0.0),
        (0.5, 2.0, 0.089855176706431635814, -0.06049376029288756848),
        (-0.3, 0.7, -0.84835962739534080496, -0.53024136947899736438),
        (0.001, 0.0, 999.4237724845954453, 0.0),
        (25.5, 0.0, 3.0867705405286967828e24, 0.0),
        (0.2, 10.0, 1.8932641265127329622e-7, -2.2895530904312069322e-9),
    ];

    #[test]
    fn matches_high_precision_table() {
        for &(re, im, vre, vim) in TABLE {
            let got = gamma(Complex64::new(re, im)).unwrap();
            let err = rel(got, Complex64::new(vre, vim));
            assert!(err < 1e-13, "Γ({re}+{im}i): rel err {err:e}");
        }
    }

    #[test]
    fn recurrence_and_reflection() {
        for &z in &[Complex64::new(0.3, 0.4), Complex64::new(-1.7, 2.1), Complex64::new(4.2, -0.5)] {
            let lhs = gamma(z + 1.0).unwrap();
            let rhs = z * gamma(z).unwrap();
            assert!(rel(lhs, rhs) < 1e-13);
            let refl = gamma(z).unwrap() * gamma(Complex64::new(1.0, 0.0) - z).unwrap();
            assert!(rel(refl, PI / (z * PI).sin()) < 1e-13);
        }
    }

    #[test]
    fn poles_rejected() {
        for x in [0.0, -1.0, -4.0] {
            assert!(matches!(ln_gamma(Complex64::new(x, 0.0)), Err(Error::Pole { .. })));
        }
        assert!(ln_gamma(Complex64::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn integer_factorials() {
        let mut fact = 1.0;
        for n in 1..20 {
            let got = gamma_real(n as f64).unwrap();
            assert!((got - fact).abs() / fact < 1e-13, "Γ({n})");
            fact *= n as f64;
        }
    }
}
