//! Machine-readable spectrum reports (JSON and CSV).

use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicRational;

/// Exact dyadic value `num / 2^exp2`, numerator as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactValue {
    pub num: String,
    pub exp2: u64,
}

impl From<&DyadicRational> for ExactValue {
    fn from(v: &DyadicRational) -> Self {
        ExactValue {
            num: v.numerator().to_string(),
            exp2: v.exponent(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeSection {
    pub n: usize,
    pub k: usize,
    pub construction: String,
    pub info_set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformSection {
    /// `ensemble`, `identity`, `random`, `pac` or `crc`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_prime: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactValue>,
    pub decimal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturated: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub code: CodeSection,
    pub transform: TransformSection,
    /// `recursion`, `brute`, `exhaustive-ensemble`, `monte-carlo` or `scl`.
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub list_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub entries: Vec<Entry>,
}

pub const CSV_HEADER: [&str; 7] = ["d", "value_decimal", "num", "exp2", "variance", "samples", "saturated"];

impl SpectrumReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for e in &self.entries {
            let (num, exp2) = e
                .exact
                .as_ref()
                .map_or((String::new(), String::new()), |x| (x.num.clone(), x.exp2.to_string()));
            w.write_record([
                e.d.to_string(),
                e.decimal.clone(),
                num,
                exp2,
                e.variance.map(|v| v.to_string()).unwrap_or_default(),
                e.samples.map(|v| v.to_string()).unwrap_or_default(),
                e.saturated.map(|v| v.to_string()).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// Reads the entry rows back from CSV; code/transform metadata is JSON-only.
    pub fn entries_from_csv(text: &str) -> Result<Vec<Entry>, String> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = r
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(str::to_string)
            .collect();
        if header != CSV_HEADER {
            return Err(format!("unexpected header {header:?}"));
        }
        fn opt<T: std::str::FromStr>(s: &str) -> Result<Option<T>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| format!("bad field {s:?}"))
            }
        }
        r.records()
            .map(|rec| {
                let rec = rec.map_err(|e| e.to_string())?;
                let exact = match (opt::<String>(&rec[2])?, opt::<u64>(&rec[3])?) {
                    (Some(num), Some(exp2)) => Some(ExactValue { num, exp2 }),
                    (None, None) => None,
                    _ => return Err("num and exp2 must both be present or absent".into()),
                };
                Ok(Entry {
                    d: rec[0].parse().map_err(|_| format!("bad weight {:?}", &rec[0]))?,
                    exact,
                    decimal: rec[1].to_string(),
                    variance: opt(&rec[4])?,
                    samples: opt(&rec[5])?,
                    saturated: opt(&rec[6])?,
                })
            })
            .collect()
    }
}
