//! The CSV result format.
//!
//! Columns: `experiment,domain,planner,seed_or_budget,metric,value,stderr`.
//! `seed_or_budget` holds the budget for regret curves, the run index for
//! per-run episode rows, and `all` for aggregates. `stderr` is empty for
//! single observations.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub experiment: String,
    pub domain: String,
    pub planner: String,
    pub seed_or_budget: String,
    pub metric: String,
    pub value: f64,
    pub stderr: Option<f64>,
}

impl Row {
    fn sort_key(&self) -> (&str, &str, u8, u64, &str, &str) {
        // Numeric keys sort numerically, ahead of `all`.
        let (tag, num) = match self.seed_or_budget.parse::<u64>() {
            Ok(n) => (0, n),
            Err(_) => (1, 0),
        };
        (&self.domain, &self.planner, tag, num, &self.seed_or_budget, &self.metric)
    }
}

/// Sorts rows by (domain, planner, seed or budget, metric).
pub fn sort_rows(rows: &mut [Row]) {
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

pub fn write_csv<W: Write>(out: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(planner: &str, key: &str) -> Row {
        Row {
            experiment: "e".into(),
            domain: "d".into(),
            planner: planner.into(),
            seed_or_budget: key.into(),
            metric: "m".into(),
            value: 0.5,
            stderr: None,
        }
    }

    #[test]
    fn header_and_ordering() {
        let mut rows = vec![row("b", "10"), row("a", "all"), row("a", "100"), row("a", "20")];
        sort_rows(&mut rows);
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "experiment,domain,planner,seed_or_budget,metric,value,stderr\n\
             e,d,a,20,m,0.5,\ne,d,a,100,m,0.5,\ne,d,a,all,m,0.5,\ne,d,b,10,m,0.5,\n"
        );
    }
}
