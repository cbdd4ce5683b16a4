//! Float formatting shared by every CSV writer.

/// Formats `v` with 12 significant digits, like C's `%.12g`.
pub fn sig12(v: f64) -> String {
    const DIGITS: i32 = 12;
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    // the exponent comes from the rounded scientific form so a carry into the next
    // decade is accounted for
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, e) = sci.split_once('e').expect("exponent marker");
    let e: i32 = e.parse().expect("exponent");
    if !(-4..DIGITS).contains(&e) {
        let m = trim_zeros(mantissa);
        let sign = if e < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", e.abs())
    } else {
        let decimals = (DIGITS - 1 - e).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
