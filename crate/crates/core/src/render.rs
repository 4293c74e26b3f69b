//! Text and `key=value` record output. Exact rationals always come before
//! their decimal rendering.

use std::fmt::Write;
use std::str::FromStr;

use crate::analytic::{to_decimal, Enclosure, IntPolynomial};
use crate::error::{Error, Result};
use crate::estimator::Estimate;
use crate::measure::MeasureResult;
use crate::pattern::{FirmDecomposition, Pattern};
use crate::registry::{Count, Positivity};
use crate::trees::{CompleteTree, Rational};

pub const DECIMAL_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Record,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "record" => Ok(Format::Record),
            other => Err(format!("unknown format `{other}` (expected text|record)")),
        }
    }
}

/// `p/q`, with the denominator even when it is 1.
pub fn fmt_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

struct Out {
    format: Format,
    buf: String,
}

impl Out {
    fn new(format: Format) -> Self {
        Out {
            format,
            buf: String::new(),
        }
    }

    fn field(&mut self, key: &str, value: impl std::fmt::Display) {
        let value = value.to_string().replace('\n', "; ");
        match self.format {
            Format::Text => writeln!(self.buf, "{}: {value}", key.replace('_', " ")),
            Format::Record => writeln!(self.buf, "{key}={value}"),
        }
        .expect("writing to a String");
    }

    /// Text-only line.
    fn line(&mut self, text: impl std::fmt::Display) {
        if self.format == Format::Text {
            writeln!(self.buf, "{text}").expect("writing to a String");
        }
    }

    fn tree(&mut self, prefix: &str, t: &CompleteTree) {
        match self.format {
            // the canonical form already ends in a newline
            Format::Text => self.buf.push_str(&t.to_string()),
            Format::Record => {
                let labels: Vec<&str> = t.labels().iter().map(|&s| t.alphabet().name(s)).collect();
                self.field(&format!("{prefix}_height"), t.height());
                self.field(&format!("{prefix}_labels"), labels.join(" "));
            }
        }
    }
}

pub fn render_measure(r: &MeasureResult, format: Format) -> String {
    let mut o = Out::new(format);
    match format {
        Format::Text => {
            o.line(fmt_rational(&r.value));
            o.line(to_decimal(&r.value, DECIMAL_DIGITS));
        }
        Format::Record => {
            o.field("measure", fmt_rational(&r.value));
            o.field("decimal", to_decimal(&r.value, DECIMAL_DIGITS));
        }
    }
    o.field("pipeline", r.pipeline);
    if let Some(d) = r.determining_depth {
        o.field("determining_depth", d);
    }
    if let (Some(s), Some(t)) = (&r.satisfying_count, &r.total_count) {
        match format {
            Format::Text => o.field("count", format!("{s} / {t}")),
            Format::Record => {
                o.field("satisfying_count", s);
                o.field("total_count", t);
            }
        }
    }
    for n in &r.notes {
        o.field("note", n);
    }
    o.buf
}

pub fn render_positivity(p: &Positivity, format: Format) -> String {
    let mut o = Out::new(format);
    match p {
        Positivity::Zero => match format {
            Format::Text => o.line("zero"),
            Format::Record => o.field("result", "zero"),
        },
        Positivity::Positive(w) => {
            match format {
                Format::Text => o.line("positive"),
                Format::Record => o.field("result", "positive"),
            }
            o.tree("witness", &w.tree);
            if let Some(c) = &w.certificate {
                o.field("homomorphism", c);
            }
        }
    }
    o.buf
}

pub fn render_count(c: &Count, format: Format) -> String {
    match format {
        Format::Text => format!("{} / {}\n", c.satisfying, c.total),
        Format::Record => {
            let mut o = Out::new(format);
            o.field("height", c.height);
            o.field("satisfying_count", &c.satisfying);
            o.field("total_count", &c.total);
            o.buf
        }
    }
}

pub fn render_estimate(e: &Estimate, format: Format) -> String {
    let mut o = Out::new(format);
    o.field("estimate", format!("{:.6}", e.point));
    o.field("ci_low", format!("{:.6}", e.ci_low));
    o.field("ci_high", format!("{:.6}", e.ci_high));
    o.field("hits", e.hits);
    o.field("samples", e.samples);
    o.field("seed", e.seed);
    o.field("depth", e.depth);
    o.buf
}

pub fn render_solve(p: &IntPolynomial, enc: &Enclosure, roots: &[Rational], format: Format) -> String {
    let mut o = Out::new(format);
    o.field("polynomial", p);
    match format {
        Format::Text => o.line(format!(
            "enclosure: [{}, {}]",
            to_decimal(&enc.lo, DECIMAL_DIGITS),
            to_decimal(&enc.hi, DECIMAL_DIGITS)
        )),
        Format::Record => {
            o.field("lo", fmt_rational(&enc.lo));
            o.field("hi", fmt_rational(&enc.hi));
        }
    }
    o.field("midpoint", to_decimal(&enc.midpoint(), DECIMAL_DIGITS));
    o.field("width", to_decimal(&enc.width(), DECIMAL_DIGITS));
    o.field("steps", enc.steps);
    let shown = if roots.is_empty() {
        "none".to_string()
    } else {
        roots.iter().map(fmt_rational).collect::<Vec<_>>().join(", ")
    };
    o.field("rational_roots", shown);
    o.buf
}

pub fn render_decomposition(d: &FirmDecomposition, p: &Pattern, format: Format) -> String {
    match format {
        Format::Text => d.display(p).to_string(),
        Format::Record => {
            let mut o = Out::new(format);
            o.field("components", d.components.len());
            for (i, comp) in d.components.iter().enumerate() {
                let names: Vec<&str> = comp.iter().map(|&v| p.vertices()[v].name.as_str()).collect();
                o.field(&format!("component.{i}"), names.join(" "));
            }
            for (a, b) in &d.dag_edges {
                o.field("dag", format!("{a}->{b}"));
            }
            match d.root_component {
                Some(i) => o.field("root_component", i),
                None => o.field("root_component", "none"),
            }
            o.buf
        }
    }
}

/// Reads `key=value` lines back, in order; keys may repeat.
pub fn parse_record(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let (k, v) = l
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, format!("expected `key=value`, got `{l}`")))?;
            let ok = !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.');
            if !ok {
                return Err(Error::parse(i + 1, format!("bad key `{k}`")));
            }
            Ok((k.to_string(), v.to_string()))
        })
        .collect()
}

/// First value stored under `key`.
pub fn record_field<'a>(record: &'a [(String, String)], key: &str) -> Option<&'a str> {
    record.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::parse_rational;
    use crate::registry::Registry;
    use crate::EngineConfig;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    #[test]
    fn measure_text_puts_the_rational_first() {
        let r = MeasureResult::counted("cq", 1, BigUint::from(4u32), 2);
        let text = render_measure(&r, Format::Text);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("1/2"));
        assert_eq!(lines.next(), Some("0.500000000000"));
        assert!(text.contains("count: 4 / 8"));
        let zero = MeasureResult::exact("fo-local", Rational::from_integer(0.into()), Some(0));
        assert!(render_measure(&zero, Format::Text).starts_with("0/1\n"));
    }

    #[test]
    fn positivity_rendering() {
        let q = Registry::with_builtins()
            .load("cq", "alphabet a b\nvertex x label=a root\n", None)
            .unwrap();
        let p = q.positive(&EngineConfig::default()).unwrap();
        assert_eq!(render_positivity(&p, Format::Text), "positive\nheight 0\na\nhomomorphism: x=e\n");
        let rec = parse_record(&render_positivity(&p, Format::Record)).unwrap();
        assert_eq!(record_field(&rec, "witness_labels"), Some("a"));
        assert_eq!(render_positivity(&Positivity::Zero, Format::Text), "zero\n");
    }

    #[test]
    fn record_rejects_garbage() {
        assert!(parse_record("measure 1/2\n").is_err());
        assert!(parse_record("a b=1\n").is_err());
        assert_eq!(parse_record("\nk=v=w\n").unwrap(), [("k".to_string(), "v=w".to_string())]);
    }

    proptest! {
        #[test]
        fn record_round_trips_the_exact_value(n in 0u64..1_000_000, extra in 0u64..1_000_000, depth in 0u32..5) {
            let value = Rational::new(n.into(), (n + extra + 1).into());
            let r = MeasureResult::exact("cq", value.clone(), Some(depth)).note("a note\nwith a newline");
            let rec = parse_record(&render_measure(&r, Format::Record)).unwrap();
            prop_assert_eq!(parse_rational(record_field(&rec, "measure").unwrap()).unwrap(), value);
            let d = depth.to_string();
            prop_assert_eq!(record_field(&rec, "determining_depth"), Some(d.as_str()));
            prop_assert_eq!(record_field(&rec, "note"), Some("a note; with a newline"));
        }
    }
}
