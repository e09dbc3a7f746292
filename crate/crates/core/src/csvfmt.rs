//! Float formatting shared by the CSV writers.

/// Shortest round-trip representation, switching to exponent form for very
/// small or very large magnitudes.
pub(crate) fn float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [
            0.0,
            1.0,
            -0.25,
            3.2609231792984355e-33,
            0.16664478284459489,
            1e20,
            7.999999999999999,
        ] {
            let s = float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            assert!(s.len() < 26, "{s}");
        }
    }
}
