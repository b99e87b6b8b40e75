use std::fmt;
use std::io::Write;
use std::process::{Command, Stdio};

use crate::error::{Error, Result};

use super::Configuration;

/// A system observed only through whole runs: given an input index `j` and a
/// step count `t`, it reports `t` rows.
///
/// Halting is the caller's concern; implementations may block.
pub trait BlackBox: Send + Sync + fmt::Debug {
    fn label(&self) -> String;

    fn run(&self, input_index: u64, steps: usize) -> Result<Vec<Configuration>>;
}

/// External program speaking the pipe contract: it reads `"<j> <t>\n"` on
/// standard input and writes `t` lines of `'0'`/`'1'` on standard output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandBlackBox {
    command: String,
}

impl CommandBlackBox {
    pub fn new(command: impl Into<String>) -> Self {
        CommandBlackBox {
            command: command.into(),
        }
    }

    pub fn command(&self) -> &str {
        &self.command
    }
}

impl BlackBox for CommandBlackBox {
    fn label(&self) -> String {
        self.command.clone()
    }

    fn run(&self, input_index: u64, steps: usize) -> Result<Vec<Configuration>> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| Error::BlackBox(format!("cannot spawn `{}`: {e}", self.command)))?;
        {
            let mut stdin = child.stdin.take().expect("stdin is piped");
            // A program that exits without reading closes the pipe early; its
            // exit status decides success.
            let _ = writeln!(stdin, "{input_index} {steps}");
        }
        let out = child
            .wait_with_output()
            .map_err(|e| Error::BlackBox(format!("`{}`: {e}", self.command)))?;
        if !out.status.success() {
            return Err(Error::BlackBox(format!(
                "`{}` exited with {}: {}",
                self.command,
                out.status,
                String::from_utf8_lossy(&out.stderr).trim()
            )));
        }
        let text =
            String::from_utf8(out.stdout).map_err(|_| Error::BlackBox("output is not UTF-8".into()))?;
        text.lines()
            .map(|line| {
                line.trim_end_matches('\r')
                    .parse::<Configuration>()
                    .map_err(|e| Error::BlackBox(e.to_string()))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rows_from_program_output() {
        let bb = CommandBlackBox::new(
            r#"read j t; if [ $((j % 2)) -eq 1 ]; then r=0101; else r=0000; fi; i=0; while [ $i -lt $t ]; do echo $r; i=$((i+1)); done"#,
        );
        let rows = bb.run(3, 4).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.to_string() == "0101"));
        let rows = bb.run(0, 3).unwrap();
        assert!(rows.iter().all(|r| r.to_string() == "0000"));
    }

    #[test]
    fn failing_program_is_reported() {
        let bb = CommandBlackBox::new("exit 3");
        assert!(matches!(bb.run(0, 2), Err(Error::BlackBox(_))));
    }

    #[test]
    fn garbage_output_is_reported() {
        let bb = CommandBlackBox::new("echo 01x");
        assert!(matches!(bb.run(0, 1), Err(Error::BlackBox(_))));
    }
}
