//! Canonical JSON: sorted keys, two-space indent, floats in `{:.16e}` form.
//!
//! Seventeen significant digits pin every `f64` exactly, so reading a file
//! back and writing it again reproduces the same bytes.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

pub const SCHEMA_VERSION: u64 = 1;

struct CanonicalFormatter<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident $(($arg:ident: $ty:ty))?;)*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)?) -> io::Result<()> {
                self.0.$name(writer $(, $arg)?)
            }
        )*
    };
}

impl Formatter for CanonicalFormatter<'_> {
    delegate! {
        begin_array;
        end_array;
        begin_array_value(first: bool);
        end_array_value;
        begin_object;
        end_object;
        begin_object_key(first: bool);
        begin_object_value;
        end_object_value;
    }

    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", format_float(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// `1.2345678901234567e-3` style with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes a value tree canonically, with a trailing newline.
pub fn to_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("writing to a Vec cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

/// Parses and re-serializes a document.
pub fn reformat(text: &str) -> serde_json::Result<String> {
    let value: Value = serde_json::from_str(text)?;
    Ok(to_string(&value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_floats_fixed() {
        let v = json!({"zeta": 0.5, "alpha": [1, -0.0, 1e-300], "schema": 1});
        let s = to_string(&v);
        assert_eq!(
            s,
            "{\n  \"alpha\": [\n    1,\n    -0.0000000000000000e0,\n    1.0000000000000000e-300\n  ],\n  \"schema\": 1,\n  \"zeta\": 5.0000000000000000e-1\n}\n"
        );
        assert_eq!(reformat(&s).unwrap(), s);
    }

    #[test]
    fn awkward_floats_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            std::f64::consts::FRAC_1_SQRT_2,
            5e-324,
            f64::MAX,
            -123456.789,
        ] {
            let s = to_string(&json!({ "x": x }));
            assert_eq!(reformat(&s).unwrap(), s);
            let back: Value = serde_json::from_str(&s).unwrap();
            assert_eq!(back["x"].as_f64().unwrap().to_bits(), x.to_bits());
        }
    }
}
