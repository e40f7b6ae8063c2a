//! Deterministic JSON encoding: every float is written with 17 significant
//! digits in scientific form, enough to round-trip any `f64` bit-exactly
//! and to make reports byte-identical across runs and thread counts.

use std::io;

use serde::Serialize;

#[derive(Clone, Copy, Default)]
pub struct SciFloatFormatter;

impl serde_json::ser::Formatter for SciFloatFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.8e}")
    }
}

/// Serializes any value with the fixed float format, newline-terminated.
pub fn to_string<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFloatFormatter);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf)?)
}
