//! Locale-independent CSV: `.` decimal separator, `\n` line endings, 17
//! significant digits so every f64 round-trips.

use std::fmt::Write;

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn push_row(out: &mut String, values: impl IntoIterator<Item = f64>) {
    for (i, v) in values.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v:.16e}").expect("writing to a String cannot fail");
    }
    out.push('\n');
}
