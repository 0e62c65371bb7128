//! Symmetric summation of two-sided image series `Σ_{n∈Z} term(n)`.

use crate::error::{Error, Result};

/// Truncation control for [`sum_images`].
///
/// Summation stops once `tail_run` consecutive paired terms `term(n) + term(-n)`
/// fall below `tail_tol * |partial sum|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesSpec {
    pub max_terms: usize,
    pub tail_tol: f64,
    pub tail_run: usize,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        SeriesSpec { max_terms: 1_000_000, tail_tol: 1e-10, tail_run: 3 }
    }
}

impl SeriesSpec {
    pub fn new(max_terms: usize, tail_tol: f64) -> Result<Self> {
        let spec = SeriesSpec { max_terms, tail_tol, ..Default::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 1 {
            return Err(Error::invalid("max_terms", "must be at least 1"));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::invalid("tail_tol", "must be positive"));
        }
        if self.tail_run < 1 {
            return Err(Error::invalid("tail_run", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    /// Largest `|n|` included.
    pub terms: usize,
    /// Magnitude of the last paired term added.
    pub last_term: f64,
}

/// Sums `term(n)` over `|n| <= N` with `N` chosen by the tail rule of `spec`.
///
/// `term(n)` and `term(-n)` are always added together before the tail test.
pub fn sum_images<F: FnMut(i64) -> f64>(mut term: F, spec: &SeriesSpec) -> Result<SeriesSum> {
    spec.validate()?;
    let mut sum = term(0);
    let mut run = 0;
    for n in 1..=spec.max_terms {
        let pair = term(n as i64) + term(-(n as i64));
        sum += pair;
        let last = pair.abs();
        if !sum.is_finite() {
            return Err(Error::invalid("term", "non-finite series term"));
        }
        if last < spec.tail_tol * sum.abs() || (pair == 0.0 && sum == 0.0) {
            run += 1;
            if run >= spec.tail_run {
                return Ok(SeriesSum { value: sum, terms: n, last_term: last });
            }
        } else {
            run = 0;
        }
    }
    Err(Error::SeriesNotConverged { estimate: sum, terms: spec.max_terms })
}

/// Fixed symmetric truncation `Σ_{|n|<=n_max} term(n)`.
pub fn sum_images_truncated<F: FnMut(i64) -> f64>(mut term: F, n_max: usize) -> f64 {
    let mut sum = term(0);
    for n in 1..=n_max as i64 {
        sum += term(n) + term(-n);
    }
    sum
}
