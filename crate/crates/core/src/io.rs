//! JSON interchange: the `simplex/1` document and float formatting.
//!
//! Every float is written with 17 significant digits (shortest `%.17g`
//! form), which round-trips any `f64` exactly.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};
use serde_json::Value;

use crate::error::Result;
use crate::simplex::{normalize_rows, Simplex};

pub const FORMAT_TAG: &str = "simplex/1";

/// On-disk simplex: `{"format": "simplex/1", "A": [[...], ...], "b": [...]}`.
///
/// `format` may be omitted on input. Rows need not be normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl SimplexDoc {
    pub fn from_simplex(s: &Simplex) -> Self {
        SimplexDoc {
            format: Some(FORMAT_TAG.to_string()),
            a: s.rows(),
            b: s.b_vector().iter().copied().collect(),
        }
    }

    /// Normalizes and validates into a [`Simplex`].
    pub fn to_simplex(&self) -> Result<Simplex> {
        normalize_rows(&self.a, &self.b)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("plain data serializes")
    }
}

/// Why a document could not be read.
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format tag {0:?}, expected \"simplex/1\"")]
    Format(String),
}

pub fn parse_simplex_doc(text: &str) -> std::result::Result<SimplexDoc, ParseError> {
    let doc: SimplexDoc = serde_json::from_str(text)?;
    match &doc.format {
        Some(tag) if tag != FORMAT_TAG => Err(ParseError::Format(tag.clone())),
        _ => Ok(doc),
    }
}

/// `%.17g`: 17 significant digits, trailing zeros trimmed, exponent form
/// outside `[1e-5, 1e17)`.
pub fn format_g17(v: f64) -> String {
    if !v.is_finite() {
        return "null".to_string();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0" } else { "0" }.to_string();
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };

    if (-5..17).contains(&exp) {
        let body = if exp >= 0 {
            let split = exp as usize + 1;
            let (int, frac) = digits.split_at(split);
            let frac = frac.trim_end_matches('0');
            if frac.is_empty() {
                int.to_string()
            } else {
                format!("{int}.{frac}")
            }
        } else {
            let zeros = "0".repeat((-exp - 1) as usize);
            format!("0.{zeros}{}", digits.trim_end_matches('0'))
        };
        format!("{sign}{body}")
    } else {
        let (lead, rest) = digits.split_at(1);
        let rest = rest.trim_end_matches('0');
        let mant = if rest.is_empty() {
            lead.to_string()
        } else {
            format!("{lead}.{rest}")
        };
        let esign = if exp < 0 { '-' } else { '+' };
        format!("{sign}{mant}e{esign}{:02}", exp.abs())
    }
}

struct G17<F>(F);

impl<F: Formatter> Formatter for G17<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn end_object_key<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_key(w)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn write_with<F: Formatter>(value: &Value, formatter: F) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17(formatter));
    value.serialize(&mut ser).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("JSON output is UTF-8")
}

pub fn to_json_string(value: &Value) -> String {
    write_with(value, CompactFormatter)
}

pub fn to_json_string_pretty(value: &Value) -> String {
    write_with(value, PrettyFormatter::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn g17_examples() {
        assert_eq!(format_g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(format_g17(0.5), "0.5");
        assert_eq!(format_g17(-2.0), "-2");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_g17(1.5e20), "1.5e+20");
        assert_eq!(format_g17(0.0), "0");
        assert_eq!(format_g17(std::f64::consts::FRAC_1_SQRT_2), "0.70710678118654757");
    }

    #[test]
    fn formatter_applies_to_nested_values() {
        let v = json!({"x": [0.5, 1.0 / 3.0], "n": 3, "s": "a"});
        assert_eq!(to_json_string(&v), r#"{"n":3,"s":"a","x":[0.5,0.33333333333333331]}"#);
    }

    #[test]
    fn parse_accepts_missing_tag_and_rejects_wrong_one() {
        let doc = parse_simplex_doc(r#"{"A": [[-1], [1]], "b": [0, 1]}"#).unwrap();
        assert_eq!(doc.a, vec![vec![-1.0], vec![1.0]]);
        assert!(matches!(
            parse_simplex_doc(r#"{"format": "simplex/2", "A": [[-1], [1]], "b": [0, 1]}"#),
            Err(ParseError::Format(_))
        ));
        assert!(matches!(parse_simplex_doc("{not json"), Err(ParseError::Json(_))));
        assert!(matches!(
            parse_simplex_doc(r#"{"A": [[-1], [1]], "b": [0, 1], "c": 2}"#),
            Err(ParseError::Json(_))
        ));
    }

    proptest! {
        #[test]
        fn g17_round_trips(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let text = format_g17(v);
            let back: f64 = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.to_bits(), v.to_bits());
        }
    }
}
