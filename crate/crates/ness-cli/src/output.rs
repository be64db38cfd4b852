//! Deterministic serialization: JSON with 17-significant-digit reals and
//! RFC-style CSV (comma, `.` decimal, LF, header row).

use serde::Serialize;

/// 17 significant digits; round-trips every finite f64.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// serde_json formatter that pins the float representation.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes any payload to deterministic JSON (LF-terminated).
pub fn to_json<T: Serialize>(value: &T) -> std::io::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value
        .serialize(&mut ser)
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| std::io::Error::other(e.to_string()))
}

/// Minimal RFC-4180 quoting for CSV fields.
pub fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

/// Joins rows into a CSV document with LF line endings.
pub fn csv_document(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}
