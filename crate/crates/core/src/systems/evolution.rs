use crate::error::{Error, Result};

use super::{InitialConfiguration, RuleSystem, SystemId};

/// Space-time diagram: `steps` rows of `width` cells, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Evolution {
    system: SystemId,
    input_index: u64,
    width: usize,
    cells: Vec<u8>,
}

impl Evolution {
    pub(crate) fn from_flat(system: SystemId, input_index: u64, width: usize, cells: Vec<u8>) -> Self {
        debug_assert!(width > 0 && cells.len().is_multiple_of(width));
        Evolution {
            system,
            input_index,
            width,
            cells,
        }
    }

    pub fn system(&self) -> &SystemId {
        &self.system
    }

    pub fn input_index(&self) -> u64 {
        self.input_index
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of rows, i.e. the runtime `t`.
    pub fn steps(&self) -> usize {
        self.cells.len() / self.width
    }

    pub fn row(&self, k: usize) -> &[u8] {
        &self.cells[k * self.width..(k + 1) * self.width]
    }

    pub fn rows(&self) -> std::slice::Chunks<'_, u8> {
        self.cells.chunks(self.width)
    }

    /// First `steps` rows, which is the evolution a shorter run would produce.
    pub fn truncated(&self, steps: usize) -> Result<Evolution> {
        if steps == 0 || steps > self.steps() {
            return Err(Error::invalid(format!(
                "cannot truncate a {}-row evolution to {steps} rows",
                self.steps()
            )));
        }
        Ok(Evolution {
            system: self.system.clone(),
            input_index: self.input_index,
            width: self.width,
            cells: self.cells[..steps * self.width].to_vec(),
        })
    }

    /// Length in bytes of [`Evolution::to_text`].
    pub fn text_len(&self) -> usize {
        self.steps() * (self.width + 1)
    }

    /// Canonical serialisation: one row per line of `'0'`/`'1'`, each line
    /// newline-terminated.
    pub fn to_text(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.text_len());
        for row in self.rows() {
            out.extend(row.iter().map(|&c| b'0' + c));
            out.push(b'\n');
        }
        out
    }

    pub fn from_text(system: SystemId, input_index: u64, text: &[u8]) -> Result<Evolution> {
        let body = text
            .strip_suffix(b"\n")
            .ok_or_else(|| Error::invalid("evolution text must end with a newline"))?;
        let mut width = None;
        let mut cells = Vec::with_capacity(text.len());
        for (k, line) in body.split(|&b| b == b'\n').enumerate() {
            match width {
                None if line.is_empty() => return Err(Error::invalid("evolution rows must be non-empty")),
                None => width = Some(line.len()),
                Some(w) if w != line.len() => {
                    return Err(Error::invalid(format!(
                        "row {k} has {} cells, expected {w}",
                        line.len()
                    )))
                }
                Some(_) => {}
            }
            for &b in line {
                cells.push(match b {
                    b'0' => 0,
                    b'1' => 1,
                    other => return Err(Error::invalid(format!("row {k} contains {:?}", other as char))),
                });
            }
        }
        let width = width.ok_or_else(|| Error::invalid("empty evolution text"))?;
        if width != system.width() {
            return Err(Error::WidthMismatch {
                expected: system.width(),
                found: width,
            });
        }
        Ok(Evolution::from_flat(system, input_index, width, cells))
    }

    /// Re-simulates from row 0 and reports whether every row matches.
    pub fn is_consistent_with(&self, system: &RuleSystem) -> Result<bool> {
        let init = InitialConfiguration::new(
            super::Configuration::from_cells(self.row(0).to_vec())?,
            self.input_index,
        );
        let replay = system.evolve(&init, self.steps())?;
        Ok(replay.cells == self.cells)
    }
}
