//! Plain-text plot data from result records.

use std::str::FromStr;

use serde_json::Value;

use crate::config::ResultRecord;
use crate::error::{config, CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Transform {
    Id,
    Ln,
    Sqrt,
}

/// A dot path into a record, like `outputs.p` or `config.params.n`,
/// optionally prefixed with `ln:` or `sqrt:`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selector {
    transform: Transform,
    path: Vec<String>,
    label: String,
}

impl FromStr for Selector {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let (transform, rest) = match s.split_once(':') {
            Some(("ln", r)) => (Transform::Ln, r),
            Some(("sqrt", r)) => (Transform::Sqrt, r),
            Some((t, _)) => return Err(config(format!("unknown transform {t:?}"))),
            None => (Transform::Id, s),
        };
        if rest.is_empty() {
            return Err(config("empty field selector"));
        }
        Ok(Selector { transform, path: rest.split('.').map(str::to_string).collect(), label: s.to_string() })
    }
}

impl Selector {
    fn pick(&self, record: &Value) -> CliResult<f64> {
        let mut v = record;
        for key in &self.path {
            v = match v {
                Value::Object(m) => m.get(key),
                Value::Array(a) => key.parse::<usize>().ok().and_then(|i| a.get(i)),
                _ => None,
            }
            .ok_or_else(|| config(format!("field {} not found", self.label)))?;
        }
        let x = v.as_f64().ok_or_else(|| config(format!("field {} is not a number", self.label)))?;
        Ok(match self.transform {
            Transform::Id => x,
            Transform::Ln => x.ln(),
            Transform::Sqrt => x.sqrt(),
        })
    }
}

/// One row per record: `x y` plus optional error-bar columns.
pub fn emit_plot_data(
    records: &[ResultRecord],
    x: &Selector,
    y: &Selector,
    err: Option<(&Selector, &Selector)>,
) -> CliResult<String> {
    let first = records.first().ok_or_else(|| config("no records to plot"))?;
    if let Some(r) = records.iter().find(|r| r.task != first.task) {
        return Err(config(format!("heterogeneous records: {:?} and {:?}", first.task, r.task)));
    }
    let mut out = format!("# {} {}", x.label, y.label);
    if let Some((lo, hi)) = err {
        out += &format!(" {} {}", lo.label, hi.label);
    }
    out.push('\n');
    for r in records {
        let v = serde_json::to_value(r).expect("records serialize");
        out += &format!("{} {}", x.pick(&v)?, y.pick(&v)?);
        if let Some((lo, hi)) = err {
            out += &format!(" {} {}", lo.pick(&v)?, hi.pick(&v)?);
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;
    use serde_json::json;

    fn record(task: &str, p: f64, n: usize) -> ResultRecord {
        ResultRecord {
            task: task.into(),
            config: ExperimentConfig::default(),
            outputs: json!({ "p": p, "params": { "n": n } }),
            wall_time_ms: 1.0,
            version: "0".into(),
            seed: None,
            rng: None,
        }
    }

    #[test]
    fn rows_and_errors() {
        let x: Selector = "sqrt:outputs.params.n".parse().unwrap();
        let y: Selector = "ln:outputs.p".parse().unwrap();
        let one = emit_plot_data(&[record("exact-prob", 1.0, 100)], &x, &y, None).unwrap();
        assert_eq!(one, "# sqrt:outputs.params.n ln:outputs.p\n10 0\n");
        let recs: Vec<_> = (1..=5).map(|i| record("exact-prob", 0.1 * i as f64, 100 * i)).collect();
        assert_eq!(emit_plot_data(&recs, &x, &y, None).unwrap().lines().count(), 6);
        assert!(emit_plot_data(&[], &x, &y, None).is_err());
        let mixed = [record("exact-prob", 0.1, 100), record("stats v", 0.1, 100)];
        assert!(emit_plot_data(&mixed, &x, &y, None).is_err());
        assert!("exp:outputs.p".parse::<Selector>().is_err());
        let missing: Selector = "outputs.q".parse().unwrap();
        assert!(emit_plot_data(&recs, &x, &missing, None).is_err());
    }
}
