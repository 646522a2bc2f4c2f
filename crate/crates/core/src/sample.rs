use crate::error::{Error, Result};

/// Observed draws on `{1, 2, ...}` together with the sufficient statistic `T = sum x_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    values: Vec<u64>,
    total: u64,
}

impl Sample {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| v == 0) {
            return Err(Error::OutOfSupport { index, value });
        }
        let total = values.iter().sum();
        Ok(Self { values, total })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The sufficient statistic `T`.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn mean(&self) -> f64 {
        self.total as f64 / self.values.len() as f64
    }

    pub fn max(&self) -> u64 {
        self.values.iter().copied().max().unwrap_or(0)
    }
}

impl TryFrom<Vec<u64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<u64>) -> Result<Self> {
        Sample::new(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_support() {
        assert_eq!(Sample::new(vec![]), Err(Error::EmptySample));
        assert_eq!(
            Sample::new(vec![1, 0, 3]),
            Err(Error::OutOfSupport { index: 1, value: 0 })
        );
        let s = Sample::new(vec![1, 1, 2]).unwrap();
        assert_eq!(s.total(), 4);
        assert_eq!(s.len(), 3);
        assert!(s.total() >= s.len() as u64);
    }
}
