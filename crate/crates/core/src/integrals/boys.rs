//! Boys function F_m(x) = ∫_0^1 t^{2m} exp(-x t²) dt.

use std::sync::OnceLock;

/// Highest order the interpolation table serves directly.
pub const MAX_ORDER: usize = 32;

const STEP: f64 = 0.05;
const X_TABLE: f64 = 36.0;
const TAYLOR: usize = 7;
const N_GRID: usize = (X_TABLE / STEP) as usize + 2;
const TABLE_M: usize = MAX_ORDER + TAYLOR + 1;

fn table() -> &'static Vec<[f64; TABLE_M]> {
    static T: OnceLock<Vec<[f64; TABLE_M]>> = OnceLock::new();
    T.get_or_init(|| {
        (0..N_GRID)
            .map(|i| {
                let mut row = [0.0; TABLE_M];
                boys_series_downward(TABLE_M - 1, i as f64 * STEP, &mut row);
                row
            })
            .collect()
    })
}

/// Series for the highest order followed by downward recursion.
fn boys_series_downward(m_max: usize, x: f64, out: &mut [f64]) {
    let ex = (-x).exp();
    let mut term = 1.0 / (2 * m_max + 1) as f64;
    let mut sum = term;
    let mut k = 1;
    loop {
        term *= 2.0 * x / (2 * m_max + 2 * k + 1) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
        k += 1;
    }
    out[m_max] = ex * sum;
    for m in (0..m_max).rev() {
        out[m] = (2.0 * x * out[m + 1] + ex) / (2 * m + 1) as f64;
    }
}

/// Fills `out[0..=m_max]` with F_0(x)..F_{m_max}(x).
pub fn boys_array(m_max: usize, x: f64, out: &mut [f64]) {
    debug_assert!(x >= 0.0);
    if m_max > MAX_ORDER {
        if x < X_TABLE + 4.0 * m_max as f64 {
            boys_series_downward(m_max, x, out);
        } else {
            boys_asymptotic(m_max, x, out);
        }
        return;
    }
    if x >= X_TABLE {
        boys_asymptotic(m_max, x, out);
        return;
    }
    let tab = table();
    let i = (x / STEP + 0.5) as usize;
    let dx = i as f64 * STEP - x;
    let row = &tab[i];
    // Taylor expansion of the top order, then downward recursion.
    let mut f = 0.0;
    let mut fac = 1.0;
    for k in 0..TAYLOR {
        f += row[m_max + k] * fac;
        fac *= dx / (k + 1) as f64;
    }
    out[m_max] = f;
    if m_max > 0 {
        let ex = (-x).exp();
        for m in (0..m_max).rev() {
            out[m] = (2.0 * x * out[m + 1] + ex) / (2 * m + 1) as f64;
        }
    }
}

fn boys_asymptotic(m_max: usize, x: f64, out: &mut [f64]) {
    let ex = (-x).exp();
    out[0] = 0.5 * (std::f64::consts::PI / x).sqrt();
    for m in 0..m_max {
        out[m + 1] = ((2 * m + 1) as f64 * out[m] - ex) / (2.0 * x);
    }
}

/// Single Boys function value.
pub fn boys(m: usize, x: f64) -> f64 {
    let mut buf = vec![0.0; m + 1];
    boys_array(m, x, &mut buf);
    buf[m]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        assert_eq!(boys(0, 0.0), 1.0);
        for m in 0..20 {
            assert!((boys(m, 0.0) - 1.0 / (2 * m + 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn zeroth_order_closed_form() {
        for &x in &[1e-3, 0.3, 1.0, 5.0, 10.0, 20.0, 35.9, 36.1, 50.0] {
            let exact = 0.5 * (std::f64::consts::PI / x).sqrt() * libm::erf(x.sqrt());
            assert!(((boys(0, x) - exact) / exact).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn recursion_identity() {
        let mut f = [0.0; 12];
        for i in 0..100 {
            let x = 0.5 * i as f64;
            boys_array(10, x, &mut f);
            for m in 0..10 {
                let lhs = 2.0 * x * f[m + 1];
                let rhs = (2 * m + 1) as f64 * f[m] - (-x).exp();
                assert!((lhs - rhs).abs() < 1e-12, "x={x} m={m}");
            }
        }
    }

    #[test]
    fn table_matches_series() {
        let mut a = [0.0; 16];
        let mut b = [0.0; 16];
        for i in 0..400 {
            let x = 0.0913 * i as f64;
            boys_array(15, x, &mut a);
            boys_series_downward(15, x, &mut b);
            for m in 0..16 {
                assert!(((a[m] - b[m]) / b[m]).abs() < 1e-13, "x={x} m={m}");
            }
        }
    }
}
