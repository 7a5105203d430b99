use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::direction::Direction;
use crate::error::{Error, Result};

/// Harmonized summary statistics for one SNP on both traits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnpRecord {
    pub id: String,
    pub beta_d: f64,
    pub se_d: f64,
    pub beta_y: f64,
    pub se_y: f64,
}

impl SnpRecord {
    pub fn new(id: impl Into<String>, beta_d: f64, se_d: f64, beta_y: f64, se_y: f64) -> Self {
        Self {
            id: id.into(),
            beta_d,
            se_d,
            beta_y,
            se_y,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::InvalidArgument("SNP id must be nonempty".into()));
        }
        if !(self.se_d > 0.0 && self.se_d.is_finite() && self.se_y > 0.0 && self.se_y.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "SNP {}: standard errors must be positive and finite",
                self.id
            )));
        }
        if !self.beta_d.is_finite() || !self.beta_y.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "SNP {}: effect estimates must be finite",
                self.id
            )));
        }
        Ok(())
    }

    /// Statistics with the exposure of `direction` first.
    pub fn oriented(&self, direction: Direction) -> Oriented {
        match direction {
            Direction::DtoY => Oriented {
                beta_exp: self.beta_d,
                se_exp: self.se_d,
                beta_out: self.beta_y,
                se_out: self.se_y,
            },
            Direction::YtoD => Oriented {
                beta_exp: self.beta_y,
                se_exp: self.se_y,
                beta_out: self.beta_d,
                se_out: self.se_d,
            },
        }
    }
}

/// One SNP seen from the exposure/outcome roles of a direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oriented {
    pub beta_exp: f64,
    pub se_exp: f64,
    pub beta_out: f64,
    pub se_out: f64,
}

impl Oriented {
    pub fn ratio(&self) -> f64 {
        self.beta_out / self.beta_exp
    }

    /// `beta_exp^2 / se_out^2`
    pub fn weight(&self) -> f64 {
        self.beta_exp * self.beta_exp / (self.se_out * self.se_out)
    }
}

/// A validated set of SNPs with unique ids, assumed LD-independent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SnpRecord>", into = "Vec<SnpRecord>")]
pub struct Panel {
    records: Vec<SnpRecord>,
}

impl Panel {
    pub fn new(records: Vec<SnpRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::InvalidArgument("panel needs at least one SNP".into()));
        }
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            r.validate()?;
            if !seen.insert(r.id.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate SNP id {}", r.id)));
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[SnpRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, index: usize) -> &SnpRecord {
        &self.records[index]
    }

    pub fn oriented(&self, index: usize, direction: Direction) -> Oriented {
        self.records[index].oriented(direction)
    }

    pub fn ids(&self, indices: &[usize]) -> Vec<String> {
        indices.iter().map(|&i| self.records[i].id.clone()).collect()
    }
}

impl TryFrom<Vec<SnpRecord>> for Panel {
    type Error = Error;

    fn try_from(records: Vec<SnpRecord>) -> Result<Self> {
        Panel::new(records)
    }
}

impl From<Panel> for Vec<SnpRecord> {
    fn from(panel: Panel) -> Self {
        panel.records
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_panels() {
        assert!(Panel::new(vec![]).is_err());
        let a = SnpRecord::new("rs1", 0.1, 0.01, 0.2, 0.02);
        assert!(Panel::new(vec![a.clone(), a.clone()]).is_err());
        assert!(Panel::new(vec![SnpRecord::new("", 0.1, 0.01, 0.2, 0.02)]).is_err());
        assert!(Panel::new(vec![SnpRecord::new("x", 0.1, 0.0, 0.2, 0.02)]).is_err());
        assert!(Panel::new(vec![SnpRecord::new("x", f64::NAN, 0.1, 0.2, 0.02)]).is_err());
        assert!(Panel::new(vec![a]).is_ok());
    }

    #[test]
    fn orientation_swaps_roles() {
        let r = SnpRecord::new("rs1", 0.5, 0.1, 0.15, 0.2);
        let dy = r.oriented(Direction::DtoY);
        let yd = r.oriented(Direction::YtoD);
        assert!((dy.ratio() - 0.3).abs() < 1e-15);
        assert_eq!(yd.beta_exp, 0.15);
        assert_eq!(yd.se_out, 0.1);
        assert!((dy.weight() - 6.25).abs() < 1e-12);
    }
}
