use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Configuration, InitialConfiguration};

/// Ordering of initial configurations fed to a system.
///
/// Both schemes are bijections from `0..2^w` onto the `w`-cell configurations,
/// so every configuration is reached after finitely many inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnumerationScheme {
    /// Index `j` is the big-endian, zero-padded binary representation of `j`.
    #[default]
    Binary,
    /// Index `j` is the reflected Gray code of `j`, so neighbours differ in one cell.
    Gray,
}

impl fmt::Display for EnumerationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnumerationScheme::Binary => "binary",
            EnumerationScheme::Gray => "gray",
        })
    }
}

impl FromStr for EnumerationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(EnumerationScheme::Binary),
            "gray" => Ok(EnumerationScheme::Gray),
            other => Err(Error::invalid(format!("unknown enumeration scheme `{other}`"))),
        }
    }
}

impl EnumerationScheme {
    fn code(self, index: u64) -> u64 {
        match self {
            EnumerationScheme::Binary => index,
            EnumerationScheme::Gray => index ^ (index >> 1),
        }
    }
}

fn capacity_exceeded(width: usize, count: u128) -> bool {
    width < 128 && count > (1u128 << width)
}

/// The configuration at position `index` of `scheme` for `width` cells.
pub fn configuration_at(width: usize, index: u64, scheme: EnumerationScheme) -> Result<Configuration> {
    if capacity_exceeded(width, u128::from(index) + 1) {
        return Err(Error::ExhaustedEnumeration {
            width,
            requested: usize::try_from(index).unwrap_or(usize::MAX).saturating_add(1),
        });
    }
    let code = scheme.code(index);
    let cells = (0..width)
        .map(|b| {
            let bit = width - 1 - b;
            if bit < 64 {
                ((code >> bit) & 1) as u8
            } else {
                0
            }
        })
        .collect();
    Ok(Configuration(cells))
}

/// The first `n` inputs of `scheme` on `width` cells.
pub fn enumerate_inputs(
    width: usize,
    n: usize,
    scheme: EnumerationScheme,
) -> Result<Vec<InitialConfiguration>> {
    if width == 0 {
        return Err(Error::invalid("enumeration width must be positive"));
    }
    if capacity_exceeded(width, n as u128) {
        return Err(Error::ExhaustedEnumeration { width, requested: n });
    }
    (0..n as u64)
        .map(|j| Ok(InitialConfiguration::new(configuration_at(width, j, scheme)?, j)))
        .collect()
}
