//! Minimal CSV emission. Every float is written with 17 significant digits in
//! Rust's locale-independent exponent notation, so values parse back exactly.

use std::io::{self, Write};

/// Formats `x` with 17 significant digits, e.g. `3.5087719298245612e-1`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_header<W: Write + ?Sized>(w: &mut W, columns: &[&str]) -> io::Result<()> {
    writeln!(w, "{}", columns.join(","))
}

pub fn write_row<W: Write + ?Sized>(w: &mut W, fields: &[String]) -> io::Result<()> {
    writeln!(w, "{}", fields.join(","))
}
