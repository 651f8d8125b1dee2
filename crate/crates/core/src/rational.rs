//! Exact rationals used for every threshold and function value.
//!
//! Values are written as `"p/q"` or `"p"` strings; decimal notation is refused
//! so that thresholds such as `(3 - α)/2` compare bit-exactly.

use num_rational::Ratio;

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Parses `"p/q"` or `"p"`. Decimal and exponent forms are rejected.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if t.contains(['.', 'e', 'E']) {
        return Err(Error::Parse(format!(
            "rational `{t}` must be written as an integer fraction \"p/q\""
        )));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: i64 = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in `{t}`")))?;
    let den: i64 = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in `{t}`")))?;
    if den == 0 {
        return Err(Error::Parse(format!("zero denominator in `{t}`")));
    }
    Ok(Rational::new(num, den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn ratio(num: usize, den: usize) -> Rational {
    Rational::new(num as i64, den as i64)
}

/// Serde adapter writing a rational as its `"p/q"` string.
pub mod as_string {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Same as [`as_string`] for optional fields.
pub mod opt_string {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_some(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("3/2").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_rational(" 4 ").unwrap(), int(4));
        assert_eq!(parse_rational("-2/6").unwrap(), Rational::new(-1, 3));
    }

    #[test]
    fn rejects_decimals() {
        assert!(matches!(parse_rational("1.5"), Err(Error::Parse(_))));
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("a/b").is_err());
    }
}
