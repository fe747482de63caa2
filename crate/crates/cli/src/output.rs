//! CSV and report formatting.

use std::fmt::Write as _;

use lds_core::algebra::DenseMatrix;

/// `%.17g`: 17 significant digits, enough for any `f64` to parse back to the
/// same bits.
pub fn sig17(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, v);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Fixed four decimals, as in human-readable reports.
pub fn dec4(v: f64) -> String {
    format!("{v:.4}")
}

pub fn vector4(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| dec4(x)).collect();
    format!("[{}]", parts.join(", "))
}

pub fn matrix_csv(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|&v| sig17(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// A trajectory table: header `t,<prefix>1,…`, one row per time.
pub fn trajectory_csv<I, R>(prefix: &str, width: usize, rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut out = String::from("t");
    for i in 1..=width {
        let _ = write!(out, ",{prefix}{i}");
    }
    out.push('\n');
    for (t, row) in rows.into_iter().enumerate() {
        let _ = write!(out, "{t}");
        for cell in row {
            out.push(',');
            out.push_str(&cell);
        }
        out.push('\n');
    }
    out
}
