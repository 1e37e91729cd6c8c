//! Fixed-precision numeric formatting for emitted CSV/JSON files.

/// Formats a float with 12 significant digits, `%.12g` style.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_like_g12() {
        assert_eq!(fmt_num(162.9), "162.9");
        assert_eq!(fmt_num(-0.25), "-0.25");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(1e-7), "1e-7");
        assert_eq!(fmt_num(1.5e15), "1.5e15");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    proptest! {
        #[test]
        fn round_trips_within_12_digits(x in -1e30f64..1e30) {
            let back: f64 = fmt_num(x).parse().unwrap();
            prop_assert!((back - x).abs() <= 5.000001e-12 * x.abs());
        }
    }
}
