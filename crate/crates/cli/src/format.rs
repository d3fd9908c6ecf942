//! Ten-significant-digit report formatting.

use entchan_core::ComplexScalar as Complex64;

const DIGITS: i32 = 10;

/// `x` with ten significant digits; scientific outside `[1e-4, 1e10)`.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mut exponent = x.abs().log10().floor() as i32;
    // Rounding to ten digits can carry into the next decade.
    let rounded: f64 = format!("{:.*e}", (DIGITS - 1) as usize, x).parse().unwrap_or(x);
    if rounded.abs() >= 10f64.powi(exponent + 1) {
        exponent += 1;
    }
    if !(-4..DIGITS).contains(&exponent) {
        return format!("{:.*e}", (DIGITS - 1) as usize, x);
    }
    let decimals = (DIGITS - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn sig_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        sig(z.re)
    } else if z.re == 0.0 {
        format!("{}i", sig(z.im))
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", sig(z.re), sig(z.im.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(sig(0.9023689270621825), "0.9023689271");
        assert_eq!(sig(0.06903559372884), "0.06903559373");
        assert_eq!(sig(1.0), "1.000000000");
        assert_eq!(sig(-2.5e-7), "-2.500000000e-7");
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(123456.0), "123456.0000");
        assert_eq!(sig(0.99999999999), "1.000000000");
        assert_eq!(sig(9.99999999996e-5), "0.0001000000000");
        assert_eq!(sig(9.99999999996e-6), "1.000000000e-5");
    }

    #[test]
    fn complex_forms() {
        assert_eq!(sig_complex(Complex64::new(0.5, 0.0)), "0.5000000000");
        assert_eq!(sig_complex(Complex64::new(0.5, -0.25)), "0.5000000000-0.2500000000i");
        assert_eq!(sig_complex(Complex64::new(0.0, 1.0)), "1.000000000i");
    }
}
