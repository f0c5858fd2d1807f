//! Proposer backed by an external process speaking newline-delimited JSON.
//!
//! Each request is one line `{"action": ..., "context": ...}` on the child's
//! stdin; the child answers with one line holding a proposal
//! `{"hypothesis": ..., "analysisSpecId": ..., "solverSpecId": ..., "params": ...}`.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use serde_json::json;

use super::{Action, Proposal, ProposalContext, Proposer};
use crate::error::{Error, Result};

pub struct SubprocessProposer {
    name: String,
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl SubprocessProposer {
    pub fn spawn(program: &str, args: &[String]) -> Result<Self> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(SubprocessProposer {
            name: program.to_string(),
            child,
            stdin,
            stdout,
        })
    }
}

impl Proposer for SubprocessProposer {
    fn name(&self) -> &str {
        &self.name
    }

    fn propose(&mut self, action: Action, ctx: &ProposalContext) -> Result<Proposal> {
        let mut line = serde_json::to_string(&json!({ "action": action, "context": ctx }))?;
        line.push('\n');
        self.stdin.write_all(line.as_bytes())?;
        self.stdin.flush()?;
        let mut reply = String::new();
        if self.stdout.read_line(&mut reply)? == 0 {
            return Err(Error::Parse(format!("proposer process {} closed its output", self.name)));
        }
        serde_json::from_str(reply.trim()).map_err(|e| Error::Parse(format!("bad proposal from {}: {e}", self.name)))
    }
}

impl Drop for SubprocessProposer {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
