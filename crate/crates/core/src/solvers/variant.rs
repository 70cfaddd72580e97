use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverVariant {
    /// Cyclic row projections, Euclidean, consistent systems only.
    Kaczmarz,
    /// Randomized Kaczmarz.
    Rk,
    /// Randomized Bregman-Kaczmarz (no extension step).
    Bk,
    /// Randomized extended Kaczmarz.
    Rek,
    /// Randomized extended Bregman-Kaczmarz.
    Rebk,
    /// Averaging block extended Kaczmarz (Euclidean, unit step).
    Rabek,
    /// Averaging block extended Bregman-Kaczmarz, unit step.
    Rabebk,
    /// Relaxed averaging block extended Bregman-Kaczmarz.
    RRabebk,
}

impl SolverVariant {
    pub const ALL: [SolverVariant; 8] = [
        Self::Kaczmarz,
        Self::Rk,
        Self::Bk,
        Self::Rek,
        Self::Rebk,
        Self::Rabek,
        Self::Rabebk,
        Self::RRabebk,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::Kaczmarz => "Kaczmarz",
            Self::Rk => "RK",
            Self::Bk => "BK",
            Self::Rek => "REK",
            Self::Rebk => "REBK",
            Self::Rabek => "RABEK",
            Self::Rabebk => "RABEBK",
            Self::RRabebk => "rRABEBK",
        }
    }

    /// Runs the auxiliary `z` update.
    pub fn is_extended(self) -> bool {
        !matches!(self, Self::Kaczmarz | Self::Rk | Self::Bk)
    }

    /// Uses row/column blocks from the partition rather than single indices.
    pub fn is_block(self) -> bool {
        matches!(self, Self::Rabek | Self::Rabebk | Self::RRabebk)
    }

    /// Ignores the configured `f` and `g` and uses the squared norm.
    pub fn is_euclidean(self) -> bool {
        matches!(self, Self::Kaczmarz | Self::Rk | Self::Rek | Self::Rabek)
    }

    /// Step size fixed to one regardless of the configured relaxation.
    pub fn has_unit_step(self) -> bool {
        self != Self::RRabebk
    }
}

impl fmt::Display for SolverVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SolverVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        Self::ALL
            .into_iter()
            .find(|v| v.label() == t || v.label().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::Parse(format!("unknown solver variant '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for v in SolverVariant::ALL {
            assert_eq!(v.label().parse::<SolverVariant>().unwrap(), v);
        }
        assert_eq!("rrabebk".parse::<SolverVariant>().unwrap(), SolverVariant::RRabebk);
        assert!("nope".parse::<SolverVariant>().is_err());
    }
}
