//! Dawson's integral `D(x) = exp(-x^2) * int_0^x exp(t^2) dt` and its
//! running integral.

use std::sync::OnceLock;

use super::quad::gk15;

/// Switch from the convergent series to the asymptotic expansion.
const ASYMPTOTIC_FROM: f64 = 6.0;

/// Dawson's integral. Odd, maximal at `x ~ 0.9241` where `D ~ 0.5410`, and
/// `~ 1/(2x)` for large `|x|`.
pub fn dawson(x: f64) -> f64 {
    let y = x.abs();
    let r = if y < ASYMPTOTIC_FROM {
        series(y)
    } else {
        asymptotic(y)
    };
    if x < 0.0 {
        -r
    } else {
        r
    }
}

/// `exp(-y^2) * sum_n y^(2n+1) / (n! (2n+1))`. Every term is positive, so
/// the sum carries no cancellation.
fn series(y: f64) -> f64 {
    let y2 = y * y;
    let mut power = y;
    let mut sum = y;
    let mut n = 1.0;
    loop {
        power *= y2 / n;
        let term = power / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
        n += 1.0;
    }
    sum * (-y2).exp()
}

/// `1/(2y) * sum_n (2n-1)!! / (2y^2)^n`, truncated at its smallest term.
fn asymptotic(y: f64) -> f64 {
    let u = 0.5 / (y * y);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 1.0;
    loop {
        let next = term * (2.0 * n - 1.0) * u;
        if next >= term || next < 1e-17 {
            break;
        }
        sum += next;
        term = next;
        n += 1.0;
    }
    sum / (2.0 * y)
}

const PANEL: f64 = 0.25;
const TABLE_END: f64 = 8.0;
const PANELS: usize = 32;

fn cumulative_table() -> &'static [f64; PANELS + 1] {
    static TABLE: OnceLock<[f64; PANELS + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; PANELS + 1];
        for k in 0..PANELS {
            let a = k as f64 * PANEL;
            t[k + 1] = t[k] + gk15(&dawson, a, a + PANEL).0;
        }
        t
    })
}

/// Antiderivative of the asymptotic expansion of `D`, up to a constant:
/// `ln(t)/2 - sum_n a_n / (2n t^(2n))` with `a_n = (2n-1)!! / 2^(n+1)`.
fn asymptotic_antiderivative(t: f64) -> f64 {
    let u = 1.0 / (t * t);
    let mut a = 0.5;
    let mut power = 1.0;
    let mut tail = 0.0;
    let mut prev = f64::INFINITY;
    for n in 1..200 {
        let nf = n as f64;
        a *= (2.0 * nf - 1.0) / 2.0;
        power *= u;
        let term = a * power / (2.0 * nf);
        if term >= prev || term < 1e-18 {
            break;
        }
        tail += term;
        prev = term;
    }
    0.5 * t.ln() - tail
}

/// `int_0^x D(t) dt`, an even function growing like `ln|x| / 2`.
pub fn dawson_integral(x: f64) -> f64 {
    let y = x.abs();
    let table = cumulative_table();
    if y <= TABLE_END {
        let k = ((y / PANEL) as usize).min(PANELS);
        let a = k as f64 * PANEL;
        if y == a {
            table[k]
        } else {
            table[k] + gk15(&dawson, a, y).0
        }
    } else {
        table[PANELS] + asymptotic_antiderivative(y) - asymptotic_antiderivative(TABLE_END)
    }
}

/// `int_a^b D(t) dt`, integrated directly on short intervals to avoid the
/// cancellation of two running integrals.
pub fn dawson_integral_between(a: f64, b: f64) -> f64 {
    if (b - a).abs() <= 0.5 {
        gk15(&dawson, a, b).0
    } else {
        dawson_integral(b) - dawson_integral(a)
    }
}
