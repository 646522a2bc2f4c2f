//! Unsigned Stirling numbers of the first kind, held as natural logarithms,
//! and the law of a sum of `n` logarithmic series variables (the Stirling
//! distribution of the first kind).
//!
//! `|s(m,k)|` overflows a double near `m = 170`, so the table stores
//! `ln|s(m,k)|` with `-inf` for the structural zeros and fills rows with
//! `|s(m,k)| = |s(m-1,k-1)| + (m-1) |s(m-1,k)|` through log-sum-exp.

use std::sync::{RwLock, RwLockReadGuard};

use crate::dist::LogSeries;
use crate::error::{Error, Result};
use crate::numeric::{log_add_exp, KahanSum};

pub const DEFAULT_ROW_CAP: usize = 50_000;

#[derive(Debug, Default)]
struct Cells {
    /// `rows[m][k] = ln|s(m,k)|` for `k <= min(m, width)`.
    rows: Vec<Vec<f64>>,
    /// `ln_fact[m] = ln m!`.
    ln_fact: Vec<f64>,
    width: usize,
}

impl Cells {
    fn max_m(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    fn rebuild(&mut self, width: usize, max_m: usize) {
        self.rows.clear();
        self.width = width;
        self.extend(max_m);
    }

    fn extend(&mut self, max_m: usize) {
        let width = self.width;
        if self.rows.is_empty() {
            self.rows.push(vec![0.0]);
        }
        if self.ln_fact.is_empty() {
            self.ln_fact.push(0.0);
        }
        while self.ln_fact.len() <= max_m {
            let m = self.ln_fact.len();
            let mut acc = KahanSum::new();
            acc.add(self.ln_fact[m - 1]);
            acc.add((m as f64).ln());
            self.ln_fact.push(acc.value());
        }
        while self.rows.len() <= max_m {
            let m = self.rows.len();
            let prev = &self.rows[m - 1];
            let ln_mult = ((m - 1) as f64).ln();
            let cols = m.min(width);
            let mut row = Vec::with_capacity(cols + 1);
            row.push(f64::NEG_INFINITY);
            for k in 1..=cols {
                let from_new_cycle = prev[k - 1];
                let from_insert = prev.get(k).map_or(f64::NEG_INFINITY, |&v| ln_mult + v);
                row.push(log_add_exp(from_new_cycle, from_insert));
            }
            self.rows.push(row);
        }
    }
}

/// Memoized table of `ln|s(m,k)|` and `ln m!`.
///
/// Rows are append-only. Growth takes the write lock; lookups go through a
/// [`StirlingView`] holding the read lock, so one table can be shared by many
/// workers.
#[derive(Debug)]
pub struct LogStirlingTable {
    cap: usize,
    cells: RwLock<Cells>,
}

impl Default for LogStirlingTable {
    fn default() -> Self {
        Self::new()
    }
}

impl LogStirlingTable {
    pub fn new() -> Self {
        Self::with_cap(DEFAULT_ROW_CAP)
    }

    /// A table that refuses to grow beyond `cap` rows.
    pub fn with_cap(cap: usize) -> Self {
        Self {
            cap,
            cells: RwLock::new(Cells::default()),
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Highest row currently materialized.
    pub fn rows(&self) -> usize {
        self.read().max_m().unwrap_or(0)
    }

    fn read(&self) -> RwLockReadGuard<'_, Cells> {
        self.cells.read().unwrap_or_else(|e| e.into_inner())
    }

    /// Make rows `0..=max_m` available with columns up to `max_k`, and
    /// return a read view over them.
    pub fn view(&self, max_m: usize, max_k: usize) -> Result<StirlingView<'_>> {
        if max_m >= self.cap {
            return Err(Error::Capacity {
                requested: max_m,
                cap: self.cap,
            });
        }
        let max_k = max_k.min(max_m);
        {
            let cells = self.read();
            if cells.max_m().is_some_and(|top| top >= max_m) && cells.width >= max_k {
                return Ok(StirlingView { cells });
            }
        }
        {
            let mut cells = self.cells.write().unwrap_or_else(|e| e.into_inner());
            if cells.width < max_k {
                let width = max_k.max(2 * cells.width).max(8);
                let rows = cells.max_m().unwrap_or(0).max(max_m);
                cells.rebuild(width, rows);
            } else if cells.max_m().is_none_or(|top| top < max_m) {
                cells.extend(max_m);
            }
        }
        Ok(StirlingView { cells: self.read() })
    }

    pub fn log_stirling(&self, m: usize, k: usize) -> Result<f64> {
        if k > m {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(self.view(m, k)?.ln_stirling(m, k))
    }

    pub fn ln_factorial(&self, m: usize) -> Result<f64> {
        Ok(self.view(m, 0)?.ln_factorial(m))
    }
}

/// Read access to a materialized region of a [`LogStirlingTable`].
pub struct StirlingView<'a> {
    cells: RwLockReadGuard<'a, Cells>,
}

impl StirlingView<'_> {
    pub fn max_m(&self) -> usize {
        self.cells.max_m().unwrap_or(0)
    }

    pub fn width(&self) -> usize {
        self.cells.width
    }

    /// `ln|s(m,k)|`, `-inf` when the number is zero.
    ///
    /// Panics if `(m, k)` lies outside the region this view was built for.
    #[inline]
    pub fn ln_stirling(&self, m: usize, k: usize) -> f64 {
        if k > m {
            return f64::NEG_INFINITY;
        }
        assert!(
            k <= self.cells.width,
            "column {k} beyond table width {}",
            self.cells.width
        );
        self.cells.rows[m][k]
    }

    #[inline]
    pub fn ln_factorial(&self, m: usize) -> f64 {
        self.cells.ln_fact[m]
    }
}

/// Law of `T = X_1 + ... + X_n` for i.i.d. logarithmic series `X_i`:
/// `P(T = t) = n! |s(t,n)| p^t / (t! (-ln(1-p))^n)` for `t >= n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sdfk {
    n: usize,
    dist: LogSeries,
}

impl Sdfk {
    pub fn new(n: usize, dist: LogSeries) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("SDFK sample size must be >= 1".into()));
        }
        Ok(Self { n, dist })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self) -> &LogSeries {
        &self.dist
    }

    /// Log mass at `t` from an already-materialized view covering row `t`.
    #[inline]
    pub fn ln_pmf_in(&self, view: &StirlingView<'_>, t: usize) -> f64 {
        if t < self.n {
            return f64::NEG_INFINITY;
        }
        view.ln_factorial(self.n) + view.ln_stirling(t, self.n) + t as f64 * self.dist.ln_p()
            - view.ln_factorial(t)
            - self.n as f64 * self.dist.ln_normalizer()
    }

    pub fn pmf(&self, t: usize, table: &LogStirlingTable) -> Result<f64> {
        if t < self.n {
            return Ok(0.0);
        }
        let view = table.view(t, self.n)?;
        Ok(self.ln_pmf_in(&view, t).exp())
    }

    /// Smallest `T*` whose accumulated mass exceeds `1 - eps`.
    pub fn tail_cutoff(&self, eps: f64, table: &LogStirlingTable) -> Result<usize> {
        let target = 1.0 - eps;
        let mut acc = KahanSum::new();
        let mut limit = (2 * self.n).max(64);
        let mut t = self.n;
        loop {
            let view = table.view(limit.min(table.cap().saturating_sub(1)), self.n)?;
            let top = view.max_m();
            while t <= top {
                acc.add(self.ln_pmf_in(&view, t).exp());
                if acc.value() > target {
                    return Ok(t);
                }
                t += 1;
            }
            drop(view);
            if top + 1 >= table.cap() {
                return Err(Error::Capacity {
                    requested: top + 1,
                    cap: table.cap(),
                });
            }
            limit *= 2;
        }
    }
}
