//! Gamma function by the Lanczos approximation (g = 7, nine terms) with
//! reflection below 1/2. Relative error stays near 1e-14 on `[0.05, 20]`.

use std::f64::consts::PI;

use super::FracError;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64, FracError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(FracError::Domain(format!(
            "gamma needs a positive finite argument, got {x}"
        )));
    }
    Ok(gamma_positive(x))
}

fn gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_positive(1.0 - x));
    }
    let z = x - 1.0;
    let series = LANCZOS_COEF[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEF[0], |acc, (i, c)| {
            acc + c / (z + (i + 1) as f64)
        });
    let t = z + LANCZOS_G + 0.5;
    // t^(z + 1/2) split in two halves so large arguments do not overflow early
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (-t).exp() * half * series
}
