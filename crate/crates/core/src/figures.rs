//! CCDF-difference tables for the very-strong interference condition on
//! symmetric exponential channels (cross means `c = 1`).

use crate::classifier::very_strong_ccdf_gap;
use crate::error::{invalid, Result};

pub const DEFAULT_HMAX: f64 = 20.0;
pub const DEFAULT_POINTS: usize = 2000;

/// Column labels and `(a, P)` parameters of figure `fig` (3 or 4).
pub fn figure_columns(fig: u32) -> Result<Vec<(String, f64, f64)>> {
    match fig {
        3 => Ok([0.1, 0.3, 0.5, 0.7].iter().map(|&a| (format!("diff_a{a}"), a, 1.0)).collect()),
        4 => Ok([1.0, 10.0, 50.0, 100.0]
            .iter()
            .map(|&p| (format!("diff_P{p}"), 0.1, p))
            .collect()),
        other => Err(invalid("fig", format!("unknown figure {other}; expected 3 or 4"))),
    }
}

/// CSV with column `h = hmax·i/points`, `i = 1..=points`, followed by one
/// `F̄_{Z1}(h) - F̄_{H11}(h)` column per parameter set.
pub fn figure_csv(fig: u32, hmax: f64, points: usize) -> Result<String> {
    if !(hmax > 0.0 && hmax.is_finite()) {
        return Err(invalid("hmax", format!("must be positive and finite, got {hmax}")));
    }
    if points == 0 {
        return Err(invalid("points", "must be at least 1"));
    }
    let cols = figure_columns(fig)?;
    let mut out = String::from("h");
    for (label, _, _) in &cols {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for i in 1..=points {
        let h = hmax * i as f64 / points as f64;
        out.push_str(&h.to_string());
        for &(_, a, p) in &cols {
            out.push(',');
            out.push_str(&very_strong_ccdf_gap(a, 1.0, p, h)?.to_string());
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headers() {
        let csv = figure_csv(3, 1.0, 4).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "h,diff_a0.1,diff_a0.3,diff_a0.5,diff_a0.7");
        assert_eq!(csv.lines().nth(1).unwrap().split(',').next().unwrap(), "0.25");
        let csv = figure_csv(4, 1.0, 4).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "h,diff_P1,diff_P10,diff_P50,diff_P100");
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(figure_csv(5, 20.0, 10).is_err());
        assert!(figure_csv(3, 0.0, 10).is_err());
        assert!(figure_csv(3, 20.0, 0).is_err());
    }
}
