use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

use super::config::SweepConfig;
use super::sweep::SweepRow;

const SIG_DIGITS: usize = 12;

/// Locale-independent rendering with 12 significant digits: plain decimal for
/// exponents in [-5, 12), scientific otherwise. Trailing zeros are trimmed and
/// negative zero prints as `0`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };

    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let body = if exp >= 0 {
            let split = exp as usize + 1;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        let body = body.trim_end_matches('0').trim_end_matches('.');
        format!("{sign}{body}")
    } else {
        let frac = digits[1..].trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{}e{exp}", &digits[..1])
        } else {
            format!("{sign}{}.{frac}e{exp}", &digits[..1])
        }
    }
}

/// Round to the printed precision so JSON and CSV carry the same values.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("round trip")
}

fn columns(tomographic: bool) -> Vec<&'static str> {
    let mut c = vec![
        "epsilon",
        "lambda_min",
        "block_positive",
        "verdict",
        "C1",
        "C2",
        "C_diff",
    ];
    if tomographic {
        c.extend(["std_lambda_min", "std_C1", "std_C2"]);
    }
    c
}

pub fn write_csv<W: Write>(out: &mut W, cfg: &SweepConfig, rows: &[SweepRow]) -> io::Result<()> {
    let tomographic = rows.iter().any(|r| r.std_lambda_min.is_some());
    writeln!(out, "# {}", cfg.header_line())?;
    writeln!(out, "{}", columns(tomographic).join(","))?;
    for r in rows {
        let mut fields = vec![
            fmt_num(r.epsilon),
            fmt_num(r.lambda_min),
            r.block_positive.to_string(),
            r.verdict.as_str().to_string(),
            fmt_num(r.c1),
            fmt_num(r.c2),
            fmt_num(r.c_diff),
        ];
        if tomographic {
            for v in [r.std_lambda_min, r.std_c1, r.std_c2] {
                fields.push(v.map(fmt_num).unwrap_or_default());
            }
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonSweep<'a> {
    config: &'a SweepConfig,
    entropy_units: &'static str,
    rows: &'a [SweepRow],
}

/// Rounds every float in a JSON tree to the printed precision.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64"));
            let x = if x == 0.0 { 0.0 } else { x };
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

pub fn write_json_value<W: Write, T: Serialize>(out: &mut W, doc: &T) -> io::Result<()> {
    let value = round_json(serde_json::to_value(doc)?);
    serde_json::to_writer_pretty(&mut *out, &value)?;
    writeln!(out)
}

pub fn write_json<W: Write>(out: &mut W, cfg: &SweepConfig, rows: &[SweepRow]) -> io::Result<()> {
    let doc = JsonSweep {
        config: cfg,
        entropy_units: "bits",
        rows,
    };
    write_json_value(out, &doc)
}
