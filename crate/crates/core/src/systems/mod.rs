//! Discrete dynamical systems under test: elementary cellular automata and
//! external black-box programs, plus the enumeration of their inputs.

mod blackbox;
mod enumerate;
mod evolution;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use blackbox::{BlackBox, CommandBlackBox};
pub use enumerate::{configuration_at, enumerate_inputs, EnumerationScheme};
pub use evolution::Evolution;

/// Smallest width an elementary neighbourhood fits into.
pub const MIN_WIDTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    #[default]
    Cyclic,
    FixedZero,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Cyclic => "cyclic",
            Boundary::FixedZero => "fixed-zero",
        })
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(Boundary::Cyclic),
            "fixed-zero" | "fixed" | "zero" => Ok(Boundary::FixedZero),
            other => Err(Error::invalid(format!("unknown boundary `{other}`"))),
        }
    }
}

/// A row of cells, each 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration(Vec<u8>);

impl Configuration {
    pub fn from_cells(cells: Vec<u8>) -> Result<Self> {
        if let Some(bad) = cells.iter().find(|&&c| c > 1) {
            return Err(Error::invalid(format!("cell value {bad} is not 0 or 1")));
        }
        Ok(Configuration(cells))
    }

    pub fn zeros(width: usize) -> Self {
        Configuration(vec![0; width])
    }

    /// All zeros except a single 1 at `width / 2`.
    pub fn single_seed(width: usize) -> Self {
        let mut cells = vec![0; width];
        if width > 0 {
            cells[width / 2] = 1;
        }
        Configuration(cells)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn cells(&self) -> &[u8] {
        &self.0
    }

    pub fn into_cells(self) -> Vec<u8> {
        self.0
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.bytes()
            .map(|b| match b {
                b'0' => Ok(0),
                b'1' => Ok(1),
                other => Err(Error::invalid(format!(
                    "configuration character {:?} is not '0' or '1'",
                    other as char
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Configuration)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.0 {
            f.write_str(if c == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A configuration paired with its position in the enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InitialConfiguration {
    pub cells: Configuration,
    pub enum_index: u64,
}

impl InitialConfiguration {
    pub fn new(cells: Configuration, enum_index: u64) -> Self {
        InitialConfiguration { cells, enum_index }
    }
}

/// Wolfram-numbered elementary rule: bit `4l + 2c + r` of the rule number is
/// the successor of neighbourhood `(l, c, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementaryRule(u8);

impl ElementaryRule {
    pub fn new(rule: u32) -> Result<Self> {
        u8::try_from(rule)
            .map(ElementaryRule)
            .map_err(|_| Error::invalid(format!("elementary rule {rule} is outside 0..=255")))
    }

    pub fn number(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn apply(self, left: u8, center: u8, right: u8) -> u8 {
        (self.0 >> ((left << 2) | (center << 1) | right)) & 1
    }
}

/// Stable, serialisable identity of a system, recorded in every report.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemId {
    Eca {
        rule: u8,
        width: usize,
        boundary: Boundary,
    },
    BlackBox {
        label: String,
        width: usize,
    },
}

impl SystemId {
    pub fn rule(&self) -> Option<u8> {
        match self {
            SystemId::Eca { rule, .. } => Some(*rule),
            SystemId::BlackBox { .. } => None,
        }
    }

    pub fn width(&self) -> usize {
        match self {
            SystemId::Eca { width, .. } | SystemId::BlackBox { width, .. } => *width,
        }
    }

    /// Ordering used for tie-breaks: rules ascending, then black boxes by label.
    pub fn sort_key(&self) -> (u16, &str) {
        match self {
            SystemId::Eca { rule, .. } => (u16::from(*rule), ""),
            SystemId::BlackBox { label, .. } => (256, label.as_str()),
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemId::Eca {
                rule,
                width,
                boundary,
            } => write!(f, "rule-{rule}/w{width}/{boundary}"),
            SystemId::BlackBox { label, width } => write!(f, "blackbox:{label}/w{width}"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum SystemKind {
    ElementaryCa(ElementaryRule),
    BlackBox(Arc<dyn BlackBox>),
}

/// The system under test: a finite, deterministic map from configurations to
/// configurations.
#[derive(Debug, Clone)]
pub struct RuleSystem {
    kind: SystemKind,
    width: usize,
    boundary: Boundary,
}

impl RuleSystem {
    pub fn elementary(rule: u32, width: usize, boundary: Boundary) -> Result<Self> {
        let rule = ElementaryRule::new(rule)?;
        if width < MIN_WIDTH {
            return Err(Error::invalid(format!(
                "width {width} is below the minimum of {MIN_WIDTH}"
            )));
        }
        Ok(RuleSystem {
            kind: SystemKind::ElementaryCa(rule),
            width,
            boundary,
        })
    }

    pub fn black_box(system: Arc<dyn BlackBox>, width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::invalid("black-box width must be positive"));
        }
        Ok(RuleSystem {
            kind: SystemKind::BlackBox(system),
            width,
            boundary: Boundary::Cyclic,
        })
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn rule(&self) -> Option<ElementaryRule> {
        match self.kind {
            SystemKind::ElementaryCa(r) => Some(r),
            SystemKind::BlackBox(_) => None,
        }
    }

    pub fn id(&self) -> SystemId {
        match &self.kind {
            SystemKind::ElementaryCa(rule) => SystemId::Eca {
                rule: rule.number(),
                width: self.width,
                boundary: self.boundary,
            },
            SystemKind::BlackBox(bb) => SystemId::BlackBox {
                label: bb.label(),
                width: self.width,
            },
        }
    }

    pub fn step(&self, config: &Configuration) -> Result<Configuration> {
        let mut next = vec![0; self.width];
        self.step_into(config.cells(), &mut next)?;
        Ok(Configuration(next))
    }

    fn step_into(&self, cur: &[u8], next: &mut [u8]) -> Result<()> {
        let rule = match self.kind {
            SystemKind::ElementaryCa(r) => r,
            SystemKind::BlackBox(_) => {
                return Err(Error::Unsupported(
                    "black-box systems are only observable through whole runs".into(),
                ))
            }
        };
        if cur.len() != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: cur.len(),
            });
        }
        let w = self.width;
        let (first_left, last_right) = match self.boundary {
            Boundary::Cyclic => (cur[w - 1], cur[0]),
            Boundary::FixedZero => (0, 0),
        };
        for x in 0..w {
            let left = if x == 0 { first_left } else { cur[x - 1] };
            let right = if x == w - 1 { last_right } else { cur[x + 1] };
            next[x] = rule.apply(left, cur[x], right);
        }
        Ok(())
    }

    /// Runs the system for `steps` rows (row 0 is the input itself).
    ///
    /// Black boxes receive only the enumeration index and step count; their
    /// row 0 is whatever the program reports.
    pub fn evolve(&self, init: &InitialConfiguration, steps: usize) -> Result<Evolution> {
        if steps == 0 {
            return Err(Error::invalid("evolution needs at least one step (t >= 1)"));
        }
        match &self.kind {
            SystemKind::ElementaryCa(_) => {
                let w = self.width;
                if init.cells.len() != w {
                    return Err(Error::WidthMismatch {
                        expected: w,
                        found: init.cells.len(),
                    });
                }
                let mut cells = vec![0u8; w * steps];
                cells[..w].copy_from_slice(init.cells.cells());
                for k in 1..steps {
                    let (done, rest) = cells.split_at_mut(k * w);
                    self.step_into(&done[(k - 1) * w..], &mut rest[..w])?;
                }
                Ok(Evolution::from_flat(self.id(), init.enum_index, w, cells))
            }
            SystemKind::BlackBox(bb) => {
                let rows = bb.run(init.enum_index, steps)?;
                if rows.len() != steps {
                    return Err(Error::BlackBox(format!(
                        "expected {steps} rows, program produced {}",
                        rows.len()
                    )));
                }
                let mut cells = Vec::with_capacity(self.width * steps);
                for row in rows {
                    if row.len() != self.width {
                        return Err(Error::WidthMismatch {
                            expected: self.width,
                            found: row.len(),
                        });
                    }
                    cells.extend_from_slice(row.cells());
                }
                Ok(Evolution::from_flat(
                    self.id(),
                    init.enum_index,
                    self.width,
                    cells,
                ))
            }
        }
    }
}

pub fn step(system: &RuleSystem, config: &Configuration) -> Result<Configuration> {
    system.step(config)
}

pub fn evolve(system: &RuleSystem, init: &InitialConfiguration, steps: usize) -> Result<Evolution> {
    system.evolve(init, steps)
}
