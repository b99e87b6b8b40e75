use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;

use crate::error::{Error, Result};

/// Runs `sh -c <command>` with `data` on stdin and returns its stdout.
pub(crate) fn run_filter(command: &str, data: &[u8]) -> Result<Vec<u8>> {
    let integrity = |msg: String| Error::CompressorIntegrity(format!("`{command}`: {msg}"));
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| integrity(format!("cannot spawn: {e}")))?;

    let mut stdin = child.stdin.take().expect("stdin is piped");
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let output = thread::scope(|s| {
        let writer = s.spawn(move || {
            // Broken pipes are judged by the exit status below.
            let _ = stdin.write_all(data);
        });
        let mut buf = Vec::new();
        let read = stdout.read_to_end(&mut buf);
        let _ = writer.join();
        read.map(|_| buf)
    })
    .map_err(|e| integrity(format!("reading output: {e}")))?;

    let status = child.wait().map_err(|e| integrity(format!("waiting: {e}")))?;
    if !status.success() {
        return Err(integrity(format!("exited with {status}")));
    }
    if output.is_empty() {
        return Err(integrity("produced no output".into()));
    }
    Ok(output)
}

/// Output length of `command`, probed twice; differing lengths are an error.
pub(crate) fn probed_len(command: &str, data: &[u8]) -> Result<usize> {
    let first = run_filter(command, data)?.len();
    let second = run_filter(command, data)?.len();
    if first != second {
        return Err(Error::CompressorIntegrity(format!(
            "`{command}` is not reproducible: {first} then {second} bytes"
        )));
    }
    Ok(first)
}
