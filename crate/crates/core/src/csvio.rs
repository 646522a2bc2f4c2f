//! CSV tables emitted by the command-line tool.
//!
//! Floating-point cells carry 17 significant digits (`{:.16e}`), enough to
//! recover the exact double, so parsing a file and writing it back
//! reproduces it byte for byte.

use std::io::{Read, Write};

use crate::fit::FitResult;
use crate::simulation::{SimulationResult, TrueMse};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A header plus string rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn write<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(input: R) -> csv::Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let header = r.headers()?.iter().map(str::to_owned).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_owned).collect()))
            .collect::<csv::Result<_>>()?;
        Ok(Self { header, rows })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        buf
    }
}

pub const ESTIMATE_HEADER: [&str; 10] = [
    "method",
    "n",
    "t",
    "p_hat",
    "objective",
    "iterations",
    "converged",
    "x",
    "pmf",
    "cdf",
];

/// Rows for one fitted method, one per evaluation point.
pub fn fit_rows(fit: &FitResult, n: usize, t: u64, xs: &[u64]) -> Vec<Vec<String>> {
    xs.iter()
        .map(|&x| {
            vec![
                fit.method.name().to_owned(),
                n.to_string(),
                t.to_string(),
                fmt_f64(fit.p()),
                fmt_f64(fit.objective_value),
                fit.iterations.to_string(),
                fit.converged.to_string(),
                x.to_string(),
                fmt_f64(fit.pmf(x)),
                fmt_f64(fit.cdf(x)),
            ]
        })
        .collect()
}

/// A UMVUE row has no parameter estimate; those cells stay empty.
pub fn umvue_row(n: usize, t: u64, x: u64, pmf: f64, cdf: f64) -> Vec<String> {
    vec![
        "UMVUE".to_owned(),
        n.to_string(),
        t.to_string(),
        String::new(),
        String::new(),
        String::new(),
        "true".to_owned(),
        x.to_string(),
        fmt_f64(pmf),
        fmt_f64(cdf),
    ]
}

pub const SIMULATION_HEADER: [&str; 14] = [
    "method",
    "n",
    "p",
    "x",
    "replications",
    "mse_pmf",
    "mse_cdf",
    "bias_pmf",
    "bias_cdf",
    "mean_pmf",
    "mean_cdf",
    "se_mse_pmf",
    "se_mse_cdf",
    "failures",
];

/// One row per (method, n). With `true_mse`, two extra columns carry the
/// exact UMVUE variances on UMVUE rows and stay empty elsewhere.
pub fn simulation_table(
    result: &SimulationResult,
    p: f64,
    x: u64,
    true_mse: Option<&[TrueMse]>,
) -> Table {
    let mut header: Vec<&str> = SIMULATION_HEADER.to_vec();
    if true_mse.is_some() {
        header.extend(["true_mse_pmf", "true_mse_cdf"]);
    }
    let mut table = Table::new(header);
    for c in &result.cells {
        let mut row = vec![
            c.method.name().to_owned(),
            c.n.to_string(),
            fmt_f64(p),
            x.to_string(),
            c.replications.to_string(),
            fmt_f64(c.mse_pmf),
            fmt_f64(c.mse_cdf),
            fmt_f64(c.bias_pmf),
            fmt_f64(c.bias_cdf),
            fmt_f64(c.mean_pmf),
            fmt_f64(c.mean_cdf),
            fmt_f64(c.se_mse_pmf),
            fmt_f64(c.se_mse_cdf),
            c.failure_count.to_string(),
        ];
        if let Some(exact) = true_mse {
            let hit = (c.method == crate::simulation::Estimator::Umvue)
                .then(|| exact.iter().find(|e| e.n == c.n))
                .flatten();
            match hit {
                Some(e) => row.extend([fmt_f64(e.pmf), fmt_f64(e.cdf)]),
                None => row.extend([String::new(), String::new()]),
            }
        }
        table.push(row);
    }
    table
}
