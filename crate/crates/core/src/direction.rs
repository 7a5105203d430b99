use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Causal direction under test. `DtoY` treats D as the exposure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "dy")]
    DtoY,
    #[serde(rename = "yd")]
    YtoD,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::DtoY, Direction::YtoD];

    pub fn reverse(self) -> Self {
        match self {
            Direction::DtoY => Direction::YtoD,
            Direction::YtoD => Direction::DtoY,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::DtoY => "dy",
            Direction::YtoD => "yd",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::DtoY => "D->Y",
            Direction::YtoD => "Y->D",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dy" | "DtoY" | "D->Y" => Ok(Direction::DtoY),
            "yd" | "YtoD" | "Y->D" => Ok(Direction::YtoD),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}
