//! The two-bit-in, trit-and-bit-out noisy classical channel.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `c1 + c2 + c3 = 1` for a constructed spec.
pub const SUM_TOL: f64 = 1e-12;
/// Looser tolerance accepted when parsing decimal strings, which are renormalized.
pub const PARSE_SUM_TOL: f64 = 1e-9;

/// Output probabilities of the three channel forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ChannelSpec {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let spec = Self { c1, c2, c3 };
        spec.validate()?;
        Ok(spec)
    }

    /// `(1/3, 1/3, 1/3)`
    pub fn equal() -> Self {
        let third = 1.0 / 3.0;
        Self {
            c1: third,
            c2: third,
            c3: third,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cs = [self.c1, self.c2, self.c3];
        if cs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidChannel("non-finite probability".into()));
        }
        if cs.iter().any(|&c| c < 0.0) {
            return Err(Error::InvalidChannel(format!("negative probability in {self}")));
        }
        let sum: f64 = cs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidChannel(format!("probabilities sum to {sum}")));
        }
        Ok(())
    }

    /// Exchange the roles of the first and second outputs.
    pub fn swap_first_second(&self) -> Self {
        Self {
            c1: self.c2,
            c2: self.c1,
            c3: self.c3,
        }
    }

    pub fn probabilities(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.c1, self.c2, self.c3)
    }
}

/// Parses `"c1,c2,c3"`. Sums within `1e-9` of one are renormalized.
impl FromStr for ChannelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidChannel(format!(
                "expected three comma-separated probabilities, got {}",
                parts.len()
            )));
        }
        let mut cs = [0.0; 3];
        for (c, part) in cs.iter_mut().zip(&parts) {
            *c = part
                .parse::<f64>()
                .map_err(|e| Error::InvalidChannel(format!("{part:?}: {e}")))?;
            if !c.is_finite() {
                return Err(Error::InvalidChannel(format!("{part:?} is not finite")));
            }
            if *c < 0.0 {
                return Err(Error::InvalidChannel(format!("negative probability {part}")));
            }
        }
        let sum: f64 = cs.iter().sum();
        if (sum - 1.0).abs() > PARSE_SUM_TOL {
            return Err(Error::InvalidChannel(format!("probabilities sum to {sum}")));
        }
        Self::new(cs[0] / sum, cs[1] / sum, cs[2] / sum)
    }
}

/// The two input bits `(q1, q2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelInput {
    pub q1: bool,
    pub q2: bool,
}

impl ChannelInput {
    pub fn new(q1: bool, q2: bool) -> Self {
        Self { q1, q2 }
    }
}

/// Which form the channel emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutputTag {
    First,
    Second,
    Parity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelOutput {
    pub tag: OutputTag,
    pub bit: bool,
}

impl ChannelOutput {
    pub fn new(tag: OutputTag, bit: bool) -> Self {
        Self { tag, bit }
    }
}

impl fmt::Display for ChannelOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.tag {
            OutputTag::First => "1",
            OutputTag::Second => "2",
            OutputTag::Parity => "P",
        };
        write!(f, "({tag},{})", u8::from(self.bit))
    }
}

/// The three outputs `(First, q1)`, `(Second, q2)`, `(Parity, q1 ⊕ q2)` with their probabilities.
pub fn output_distribution(input: ChannelInput, spec: &ChannelSpec) -> [(ChannelOutput, f64); 3] {
    [
        (ChannelOutput::new(OutputTag::First, input.q1), spec.c1),
        (ChannelOutput::new(OutputTag::Second, input.q2), spec.c2),
        (ChannelOutput::new(OutputTag::Parity, input.q1 ^ input.q2), spec.c3),
    ]
}

/// Inverse-CDF sampling over (First, Second, Parity) for a uniform draw in `[0, 1)`.
///
/// Draws past the accumulated mass (possible only through rounding) land on the
/// last branch with nonzero probability, so zero-probability outputs never occur.
pub fn sample_output(input: ChannelInput, spec: &ChannelSpec, draw: f64) -> ChannelOutput {
    let dist = output_distribution(input, spec);
    let mut cumulative = 0.0;
    for &(output, p) in &dist {
        cumulative += p;
        if draw < cumulative && p > 0.0 {
            return output;
        }
    }
    dist.iter()
        .rev()
        .find(|(_, p)| *p > 0.0)
        .map(|&(o, _)| o)
        .unwrap_or(dist[2].0)
}
