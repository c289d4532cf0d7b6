//! Ordinary-least-squares trend test: slope with a two-sided t-test
//! p-value for the null hypothesis slope = 0.

use crate::IlsError;

/// Lanczos approximation of ln Γ(x), x > 0.
fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_9e-2,
        -0.539_523_938_495_3e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5 - (x + 0.5) * (x + 5.5).ln();
    let mut ser = 1.000_000_000_190_015;
    for g in G {
        y += 1.0;
        ser += g / y;
    }
    -tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

/// Continued fraction for the regularized incomplete beta (Lentz's method).
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_IT: usize = 200;
    const EPS: f64 = 3e-12;
    const FPMIN: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_IT {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
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

/// Regularized incomplete beta I_x(a, b).
fn betai(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let bt = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        bt * betacf(a, b, x) / a
    } else {
        1.0 - bt * betacf(b, a, 1.0 - x) / b
    }
}

/// Two-sided p-value of a t statistic with `df` degrees of freedom.
pub(crate) fn p_from_t(t: f64, df: f64) -> f64 {
    betai(df / 2.0, 0.5, df / (df + t * t))
}

/// OLS slope and the two-sided p-value for slope = 0.
///
/// A perfectly flat series reports p = 1; an exact non-flat line reports
/// p = 0 (the fit leaves no residual variance).
pub fn trend_test(series: &[(f64, f64)]) -> Result<(f64, f64), IlsError> {
    let n = series.len();
    if n < 3 {
        return Err(IlsError::InvalidParams(format!("trend test needs >= 3 points, got {n}")));
    }
    let nf = n as f64;
    let mean_x = series.iter().map(|(x, _)| x).sum::<f64>() / nf;
    let mean_y = series.iter().map(|(_, y)| y).sum::<f64>() / nf;
    let sxx: f64 = series.iter().map(|(x, _)| (x - mean_x) * (x - mean_x)).sum();
    if sxx == 0.0 {
        return Err(IlsError::DegenerateSeries);
    }
    let sxy: f64 = series.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = series
        .iter()
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();

    let scale = series.iter().map(|(_, y)| y * y).sum::<f64>().max(1.0);
    if sse <= 1e-12 * scale {
        // Exact fit: flat line accepts the null, any other line rejects it.
        let p = if slope.abs() <= 1e-12 { 1.0 } else { 0.0 };
        return Ok((slope, p));
    }
    let df = nf - 2.0;
    let se = (sse / df / sxx).sqrt();
    let t = slope / se;
    Ok((slope, p_from_t(t, df)))
}
