//! Number formatting for text outputs.

/// C-style `%.17g`: round-trips every `f64` and is stable across platforms.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= 17 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::g17;

    #[test]
    fn matches_c_printf() {
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(-2.5), "-2.5");
        assert_eq!(g17(1e6), "1000000");
        assert_eq!(g17(1e17), "1e+17");
        assert_eq!(g17(1.5e-5), "1.5e-05");
        assert_eq!(g17(1.0 / 3.0e7), "3.3333333333333334e-08");
        assert_eq!(g17(0.0001), "0.0001");
        assert_eq!(g17(123456789.125), "123456789.125");
    }

    #[test]
    fn round_trips() {
        for &x in &[std::f64::consts::PI, 1.0 / 3.0, -7.25e-300, 6.02214076e23] {
            assert_eq!(g17(x).parse::<f64>().unwrap(), x);
        }
    }
}
