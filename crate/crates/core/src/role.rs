//! Variable roles shared by every stage of the model.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The part a series plays in the partial VAR.
///
/// `Polm` is the monetary-policy variable (a short rate or a money aggregate),
/// `Price` the general price level, `Ya` national sector output and `Yaeur`
/// the European sector aggregate, which only ever enters as an exogenous
/// regressor of the output equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Price,
    Polm,
    Ya,
    Yaeur,
}

impl Role {
    /// Endogenous roles in the default identification order.
    pub const ENDOGENOUS: [Role; 3] = [Role::Price, Role::Polm, Role::Ya];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Price => "price",
            Role::Polm => "polm",
            Role::Ya => "ya",
            Role::Yaeur => "yaeur",
        }
    }

    /// True for the macro block that the sector cannot feed back into.
    pub fn is_macro(self) -> bool {
        matches!(self, Role::Price | Role::Polm)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "price" | "varmac" => Ok(Role::Price),
            "polm" => Ok(Role::Polm),
            "ya" => Ok(Role::Ya),
            "yaeur" => Ok(Role::Yaeur),
            other => Err(Error::InvalidInput(format!("unknown role `{other}`"))),
        }
    }
}

/// Parses a comma-separated ordering such as `price,polm,ya`.
///
/// The result must be a permutation of the three endogenous roles.
pub fn parse_ordering(s: &str) -> Result<Vec<Role>, Error> {
    let roles = s.split(',').map(str::parse).collect::<Result<Vec<Role>, _>>()?;
    validate_ordering(&roles)?;
    Ok(roles)
}

pub fn validate_ordering(roles: &[Role]) -> Result<(), Error> {
    let mut sorted = roles.to_vec();
    sorted.sort();
    if sorted != Role::ENDOGENOUS {
        return Err(Error::InvalidInput(format!("ordering must be a permutation of price, polm, ya; got {roles:?}")));
    }
    Ok(())
}
