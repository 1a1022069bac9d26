//! CSV and JSON encodings of assembled curves.
//!
//! Energies are written in scientific notation. Values inside the `f64`
//! range use the shortest round-trip representation; smaller ones are
//! rebuilt from `ln e` with 15 significant digits. Enstrophies are written
//! as `log10 E` rounded to 12 significant digits. Both formats share the
//! same token formatting, so a CSV row and the matching JSON entry carry
//! identical text.

use std::f64::consts::LN_10;
use std::str::FromStr;

use serde_json::{json, Map, Number, Value};

use crate::curve::{PiecewiseCurve, SegmentTag};
use crate::error::{Error, Result};
use crate::logscalar::sci_from_log10;

/// Energy token for `ln e`.
pub fn format_e(ln_e: f64) -> String {
    let v = ln_e.exp();
    let text = if v.is_normal() {
        format!("{v:e}")
    } else {
        sci_from_log10(ln_e / LN_10, 14)
    };
    // JSON numbers normalize `e5` to `e+5`; emit that form everywhere
    match text.split_once('e') {
        Some((m, k)) if !k.starts_with('-') => format!("{m}e+{k}"),
        _ => text,
    }
}

/// `log10` token rounded to 12 significant digits.
pub fn format_log10(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded}")
}

/// `ln` of a decimal token such as `1.5e-3582`, without going through `f64`.
pub fn parse_ln(token: &str) -> Result<f64> {
    let bad = || Error::InvalidArgument(format!("not a positive decimal: `{token}`"));
    let t = token.trim();
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let m: f64 = mant.parse().map_err(|_| bad())?;
    if !(m > 0.0) || !m.is_finite() {
        return Err(bad());
    }
    Ok(m.ln() + exp as f64 * LN_10)
}

/// JSON number holding `token` verbatim.
pub fn number(token: &str) -> Value {
    match Number::from_str(token) {
        Ok(n) => Value::Number(n),
        Err(_) => Value::String(token.to_string()),
    }
}

fn float(x: f64) -> Value {
    if x.is_finite() {
        number(&format!("{x}"))
    } else {
        Value::Null
    }
}

/// CSV with header `e,log10_E,segment`, segments in canonical order.
pub fn to_csv(curve: &PiecewiseCurve) -> String {
    let mut out = String::from("e,log10_E,segment\n");
    for seg in &curve.segments {
        for (x, y) in seg.points() {
            out.push_str(&format_e(x));
            out.push(',');
            out.push_str(&format_log10(y / LN_10));
            out.push(',');
            out.push_str(seg.tag.as_str());
            out.push('\n');
        }
    }
    out
}

pub fn to_json_value(curve: &PiecewiseCurve) -> Value {
    let b = &curve.breakpoints;
    let echo: Map<String, Value> = curve
        .params_echo
        .iter()
        .map(|(k, v)| (k.clone(), float(*v)))
        .collect();
    let opt_e = |v: Option<f64>| v.map_or(Value::Null, |x| number(&format_e(x)));
    let opt_l = |v: Option<f64>| v.map_or(Value::Null, |x| number(&format_log10(x / LN_10)));
    let segments: Vec<Value> = curve
        .segments
        .iter()
        .map(|s| {
            json!({
                "tag": s.tag.as_str(),
                "e": s.ln_e.iter().map(|&x| number(&format_e(x))).collect::<Vec<_>>(),
                "log10_E": s.ln_enstrophy.iter().map(|&y| number(&format_log10(y / LN_10))).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "model": curve.model,
        "params_echo": Value::Object(echo),
        "breakpoints": {
            "e0": number(&format_e(b.ln_e0)),
            "E0": float(b.ln_enstrophy0.exp()),
            "e_max": number(&format_e(b.ln_e_max)),
            "log10_E_max": number(&format_log10(b.ln_enstrophy_max / LN_10)),
            "e_min": opt_e(b.ln_e_min),
            "log10_E_min": opt_l(b.ln_enstrophy_min),
        },
        "segments": segments,
        "flags": curve.flags,
    })
}

pub fn to_json(curve: &PiecewiseCurve) -> String {
    let mut s = serde_json::to_string(&to_json_value(curve)).expect("curve JSON is serializable");
    s.push('\n');
    s
}

/// Samples of one segment as read back from an emitted file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSegment {
    pub tag: SegmentTag,
    pub ln_e: Vec<f64>,
    pub log10_enstrophy: Vec<f64>,
}

fn token_of(v: &Value) -> Result<String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        other => Err(Error::InvalidArgument(format!(
            "expected a number, got {other}"
        ))),
    }
}

/// Segments of an emitted JSON curve.
pub fn parse_json_segments(text: &str) -> Result<Vec<ParsedSegment>> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::InvalidArgument(format!("curve file is not JSON: {e}")))?;
    let segs = v
        .get("segments")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidArgument("curve file has no `segments` array".into()))?;
    segs.iter()
        .map(|s| {
            let tag: SegmentTag = s
                .get("tag")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::InvalidArgument("segment without `tag`".into()))?
                .parse()?;
            let arr = |k: &str| {
                s.get(k)
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::InvalidArgument(format!("segment without `{k}`")))
            };
            let ln_e = arr("e")?
                .iter()
                .map(|x| parse_ln(&token_of(x)?))
                .collect::<Result<Vec<_>>>()?;
            let log10_enstrophy = arr("log10_E")?
                .iter()
                .map(|x| {
                    token_of(x)?
                        .parse::<f64>()
                        .map_err(|e| Error::InvalidArgument(format!("bad log10_E: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if ln_e.len() != log10_enstrophy.len() {
                return Err(Error::InvalidArgument(format!(
                    "segment {tag}: length mismatch"
                )));
            }
            Ok(ParsedSegment {
                tag,
                ln_e,
                log10_enstrophy,
            })
        })
        .collect()
}

/// Rows of an emitted CSV as `(e token, log10_E token, tag)`.
pub fn parse_csv_rows(text: &str) -> Result<Vec<(String, String, SegmentTag)>> {
    let mut lines = text.lines();
    if lines.next() != Some("e,log10_E,segment") {
        return Err(Error::InvalidArgument("missing CSV header".into()));
    }
    lines
        .map(|l| {
            let mut it = l.split(',');
            match (it.next(), it.next(), it.next(), it.next()) {
                (Some(e), Some(y), Some(t), None) => Ok((e.to_string(), y.to_string(), t.parse()?)),
                _ => Err(Error::InvalidArgument(format!("malformed CSV row `{l}`"))),
            }
        })
        .collect()
}

/// Rows of an emitted JSON curve in the same form as [`parse_csv_rows`].
pub fn json_rows(text: &str) -> Result<Vec<(String, String, SegmentTag)>> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::InvalidArgument(format!("curve file is not JSON: {e}")))?;
    let mut out = Vec::new();
    for s in v["segments"].as_array().into_iter().flatten() {
        let tag: SegmentTag = s["tag"].as_str().unwrap_or("").parse()?;
        let es = s["e"].as_array().into_iter().flatten();
        let ys = s["log10_E"].as_array().into_iter().flatten();
        for (e, y) in es.zip(ys) {
            out.push((token_of(e)?, token_of(y)?, tag));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_tokens() {
        assert_eq!(format_e(0.0), "1e+0");
        assert!(format_e(1e5f64.ln()).ends_with("e+5"));
        let tiny = format_e(-8248.909);
        assert!(tiny.ends_with("e-3583"), "{tiny}");
        assert!((parse_ln(&tiny).unwrap() + 8248.909).abs() < 1e-9);
        let v = 0.1234_f64;
        assert!((parse_ln(&format_e(v.ln())).unwrap() - v.ln()).abs() < 1e-15);
    }

    #[test]
    fn log10_tokens_have_twelve_digits() {
        assert_eq!(format_log10(36.10484511251543), "36.1048451125");
        assert_eq!(format_log10(-1.0), "-1");
        assert_eq!(format_log10(1.0 / 3.0), "0.333333333333");
    }

    #[test]
    fn tiny_tokens_are_json_numbers() {
        assert!(matches!(number("1.5e-3582"), Value::Number(_)));
        assert!(parse_ln("-1").is_err());
        assert!(parse_ln("abc").is_err());
    }
}
