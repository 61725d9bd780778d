/// Formats `x` in fixed-point notation with 12 significant digits.
///
/// Negative zero prints as `0`, as does exact zero. Non-finite values print as
/// `nan`, `inf` or `-inf`.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    if x == 0.0 {
        return "0".to_string();
    }
    // Round to 12 significant digits first so the exponent reflects any carry.
    let sci = format!("{x:.11e}");
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("scientific formatting always carries an exponent");
    let decimals = (11 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}
