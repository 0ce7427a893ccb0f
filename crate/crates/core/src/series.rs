//! Scalar time series and the JSON-lines diagnostics record.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{Error, Result};

/// Named samples `(t, value)` with strictly increasing `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub name: String,
    samples: Vec<(f64, f64)>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>) -> Self {
        TimeSeries {
            name: name.into(),
            samples: Vec::new(),
        }
    }

    pub fn from_samples(name: impl Into<String>, samples: Vec<(f64, f64)>) -> Result<Self> {
        let mut s = TimeSeries::new(name);
        for (t, v) in samples {
            s.push(t, v)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, t: f64, value: f64) -> Result<()> {
        if let Some(&(last, _)) = self.samples.last() {
            if !(t > last) {
                return Err(Error::param(format!(
                    "series '{}': time {t} does not follow {last}",
                    self.name
                )));
            }
        }
        self.samples.push((t, value));
        Ok(())
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.0).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    pub fn sup(&self) -> f64 {
        self.samples.iter().fold(f64::NEG_INFINITY, |m, s| m.max(s.1))
    }

    /// One `{"t": .., "<name>": ..}` object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for &(t, v) in &self.samples {
            let mut obj = serde_json::Map::new();
            obj.insert("t".into(), t.into());
            obj.insert(self.name.clone(), v.into());
            out.push_str(&Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }

    /// Reads `key` from every JSON-lines record; dots descend into nested
    /// objects, so `Hs_norms.u:L2` reads a diagnostics entry.
    pub fn from_jsonl(text: &str, key: &str) -> Result<Self> {
        let mut s = TimeSeries::new(key);
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let v: Value = serde_json::from_str(line)?;
            let t = v
                .get("t")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::param(format!("line {}: missing numeric 't'", lineno + 1)))?;
            let val = lookup(&v, key)
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::param(format!("line {}: missing numeric '{key}'", lineno + 1)))?;
            s.push(t, val)?;
        }
        Ok(s)
    }
}

fn lookup<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    if let Some(direct) = v.get(key) {
        return Some(direct);
    }
    let (head, rest) = key.split_once('.')?;
    lookup(v.get(head)?, rest)
}

/// One line of the trajectory diagnostics stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub t: f64,
    /// `½(‖u‖² + ‖B‖²)`.
    #[serde(rename = "E")]
    pub energy: f64,
    /// `μ‖∇u‖²`.
    pub diss_u: f64,
    /// `ν‖∇B‖²`.
    #[serde(rename = "diss_B")]
    pub diss_b: f64,
    #[serde(rename = "Hs_norms")]
    pub hs_norms: BTreeMap<String, f64>,
    pub besov_neg: BTreeMap<String, f64>,
    pub blowup_proxy: f64,
}

impl DiagnosticRecord {
    pub fn to_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)? + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn times_must_increase() {
        let mut s = TimeSeries::new("x");
        s.push(0.0, 1.0).unwrap();
        assert!(s.push(0.0, 2.0).is_err());
        assert!(s.push(-1.0, 2.0).is_err());
    }

    #[test]
    fn jsonl_round_trip_with_nested_keys() {
        let s = TimeSeries::from_samples("E", vec![(0.0, 1.5), (0.1, 0.1 + 0.2)]).unwrap();
        let back = TimeSeries::from_jsonl(&s.to_jsonl(), "E").unwrap();
        assert_eq!(back.samples(), s.samples());

        let line = r#"{"t":1.0,"Hs_norms":{"u:L2":2.5}}"#;
        let n = TimeSeries::from_jsonl(line, "Hs_norms.u:L2").unwrap();
        assert_eq!(n.samples(), &[(1.0, 2.5)]);
    }

    #[test]
    fn record_keys_are_stable() {
        let r = DiagnosticRecord {
            t: 0.0,
            energy: 1.0,
            diss_u: 0.0,
            diss_b: 0.0,
            hs_norms: BTreeMap::from([("u:L2".into(), 1.0), ("B:L2".into(), 2.0)]),
            besov_neg: BTreeMap::new(),
            blowup_proxy: 0.0,
        };
        assert_eq!(
            r.to_line().unwrap(),
            "{\"t\":0.0,\"E\":1.0,\"diss_u\":0.0,\"diss_B\":0.0,\"Hs_norms\":{\"B:L2\":2.0,\"u:L2\":1.0},\"besov_neg\":{},\"blowup_proxy\":0.0}\n"
        );
    }
}
