//! Objective oracle backed by a long-running external program.
//!
//! Protocol: for each evaluation one line of space-separated decimal
//! coordinates is written to the program's standard input, and the program
//! answers with one line holding the objective value on standard output.

use std::io::{BufRead, BufReader, Write};
use std::marker::PhantomData;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use crate::error::OracleError;
use crate::problem::Objective;
use crate::scalar::Real;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

struct Session {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    dead: bool,
}

impl Session {
    fn exit_description(&mut self) -> String {
        match self.child.try_wait() {
            Ok(Some(status)) => status.to_string(),
            Ok(None) => "stdout closed".to_string(),
            Err(e) => e.to_string(),
        }
    }

    fn kill(&mut self) {
        self.dead = true;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub struct SubprocessOracle<T> {
    command: String,
    timeout: Duration,
    session: Mutex<Session>,
    _scalar: PhantomData<fn() -> T>,
}

impl<T> std::fmt::Debug for SubprocessOracle<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SubprocessOracle")
            .field("command", &self.command)
            .field("timeout", &self.timeout)
            .finish()
    }
}

impl<T: Real> SubprocessOracle<T> {
    /// Starts `command` through `sh -c` with the default 60 s timeout.
    pub fn spawn(command: &str) -> Result<Self, OracleError> {
        Self::with_timeout(command, DEFAULT_TIMEOUT)
    }

    pub fn with_timeout(command: &str, timeout: Duration) -> Result<Self, OracleError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| OracleError::Io(format!("failed to start `{command}`: {e}")))?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Self {
            command: command.to_string(),
            timeout,
            session: Mutex::new(Session {
                child,
                stdin,
                lines: rx,
                dead: false,
            }),
            _scalar: PhantomData,
        })
    }

    pub fn command(&self) -> &str {
        &self.command
    }
}

fn format_request<T: Real>(x: &[T]) -> String {
    let mut line = x
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    line.push('\n');
    line
}

impl<T: Real> Objective<T> for SubprocessOracle<T> {
    fn value(&self, x: &[T]) -> Result<T, OracleError> {
        let mut session = self
            .session
            .lock()
            .unwrap_or_else(|poisoned| poisoned.into_inner());
        if session.dead {
            return Err(OracleError::ProcessExited(
                "oracle was shut down after an earlier failure".into(),
            ));
        }
        let request = format_request(x);
        let written = session
            .stdin
            .write_all(request.as_bytes())
            .and_then(|_| session.stdin.flush());
        if written.is_err() {
            let why = session.exit_description();
            session.kill();
            return Err(OracleError::ProcessExited(why));
        }
        let line = match session.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => {
                session.kill();
                return Err(OracleError::Io(e.to_string()));
            }
            Err(RecvTimeoutError::Timeout) => {
                session.kill();
                return Err(OracleError::Timeout(self.timeout.as_secs_f64()));
            }
            Err(RecvTimeoutError::Disconnected) => {
                let why = session.exit_description();
                session.kill();
                return Err(OracleError::ProcessExited(why));
            }
        };
        let text = line.trim();
        match text.parse::<T>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(OracleError::Protocol(format!(
                "expected a finite decimal value, got `{text}`"
            ))),
        }
    }
}

impl<T> Drop for SubprocessOracle<T> {
    fn drop(&mut self) {
        if let Ok(mut session) = self.session.lock() {
            if !session.dead {
                session.kill();
            }
        }
    }
}
