use std::collections::BTreeMap;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{ExtractionRule, Extractor, Measurement};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionError {
    pub metric: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Extraction {
    pub values: BTreeMap<String, Measurement>,
    pub errors: Vec<ExtractionError>,
}

fn parse_number(text: &str) -> Option<f64> {
    text.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Applies each rule independently to `raw`; the first match wins.
pub fn parse_output(raw: &str, rules: &[ExtractionRule]) -> Extraction {
    let mut out = Extraction::default();
    for rule in rules {
        let found = match &rule.extract {
            Extractor::Pattern(pattern) => match Regex::new(pattern) {
                Err(e) => Err(format!("invalid pattern: {e}")),
                Ok(re) => match re.captures(raw) {
                    None => Err(format!("pattern `{pattern}` matched nothing")),
                    Some(c) => {
                        let text = c.get(1).or_else(|| c.get(0)).map(|m| m.as_str()).unwrap_or_default();
                        parse_number(text).ok_or_else(|| format!("matched `{text}`, which is not a number"))
                    }
                },
            },
            Extractor::Field { index, delimiter, line_prefix } => raw
                .lines()
                .filter(|line| line_prefix.as_deref().is_none_or(|p| line.starts_with(p)))
                .find_map(|line| {
                    let field = match delimiter {
                        Some(d) => line.split(d.as_str()).nth(*index),
                        None => line.split_whitespace().nth(*index),
                    };
                    field.and_then(parse_number)
                })
                .ok_or_else(|| format!("no line has a numeric field {index}")),
        };
        match found {
            Ok(value) => {
                out.values.insert(rule.metric.clone(), Measurement { value, unit: rule.unit.clone() });
            }
            Err(reason) => out.errors.push(ExtractionError { metric: rule.metric.clone(), reason }),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(metric: &str, p: &str) -> ExtractionRule {
        ExtractionRule { metric: metric.into(), extract: Extractor::Pattern(p.into()), unit: "Mbit/s".into() }
    }

    #[test]
    fn captures_number() {
        let e = parse_output("throughput: 943.2 Mbit/s", &[pattern("tput", r"throughput:\s*([0-9.]+)")]);
        assert_eq!(e.values["tput"].value, 943.2);
        assert_eq!(e.values["tput"].unit, "Mbit/s");
        assert!(e.errors.is_empty());
    }

    #[test]
    fn empty_output_fails_every_rule() {
        let e = parse_output("", &[pattern("a", r"a=(\d+)"), pattern("b", r"b=(\d+)")]);
        assert!(e.values.is_empty());
        assert_eq!(e.errors.len(), 2);
    }

    #[test]
    fn first_match_wins() {
        let e = parse_output("v=1\nv=2\n", &[pattern("v", r"v=(\d+)")]);
        assert_eq!(e.values["v"].value, 1.0);
    }

    #[test]
    fn delimited_fields() {
        let raw = "# header\nrow,a,b\nresult,12.5,7\nresult,99,1\n";
        let rule = ExtractionRule {
            metric: "x".into(),
            extract: Extractor::Field { index: 1, delimiter: Some(",".into()), line_prefix: Some("result".into()) },
            unit: String::new(),
        };
        assert_eq!(parse_output(raw, &[rule]).values["x"].value, 12.5);
        let ws = ExtractionRule { metric: "y".into(), extract: Extractor::Field { index: 6, delimiter: None, line_prefix: None }, unit: String::new() };
        assert_eq!(parse_output("[ 3]  0.0-10.0 sec  1.1 GBytes  943 Mbits/sec\n", &[ws]).values["y"].value, 943.0);
    }

    #[test]
    fn non_numeric_match() {
        let e = parse_output("v=abc", &[pattern("v", r"v=(\w+)")]);
        assert!(e.errors[0].reason.contains("not a number"));
    }
}
