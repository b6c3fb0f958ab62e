//! Child-process agents over newline-delimited JSON on stdin/stdout.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::action::EgoAction;
use super::{Policy, PolicyFault, PolicyStep};
use crate::perception::Observation;

pub const PROTOCOL_VERSION: u32 = 1;
/// Consecutive substituted replies that end the run.
pub const MAX_CONSECUTIVE_FAULTS: u32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message<T> {
    #[serde(rename = "type")]
    pub kind: String,
    pub tick: u64,
    pub payload: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionMode {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Handshake {
    pub schema_version: u32,
    pub scenario_id: String,
    pub dt: f64,
    pub lidar_rays: usize,
    pub action_modes: Vec<ActionMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HandshakeAck {
    pub schema_version: u32,
    pub action_mode: ActionMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Terminate {
    pub outcome: String,
}

#[derive(Debug, thiserror::Error)]
pub enum HandshakeError {
    #[error("failed to start agent `{0}`: {1}")]
    Spawn(String, std::io::Error),
    #[error("agent did not acknowledge the handshake within {0:?}")]
    Timeout(Duration),
    #[error("agent exited during the handshake")]
    Exited,
    #[error("bad handshake reply: {0}")]
    Malformed(String),
    #[error("agent speaks protocol version {found}, engine speaks {PROTOCOL_VERSION}")]
    Version { found: u32 },
}

pub fn encode<T: Serialize>(kind: &str, tick: u64, payload: &T) -> String {
    let msg = Message {
        kind: kind.to_string(),
        tick,
        payload,
    };
    let mut line = serde_json::to_string(&msg).expect("message serializes");
    line.push('\n');
    line
}

enum Reply {
    Action(EgoAction),
    Stale,
    Malformed(String),
}

fn parse_reply(line: &str, tick: u64, mode: ActionMode) -> Reply {
    let msg: Message<Value> = match serde_json::from_str(line) {
        Ok(m) => m,
        Err(e) => return Reply::Malformed(format!("unparseable reply: {e}")),
    };
    if msg.kind != "action" {
        return Reply::Malformed(format!("expected `action`, got `{}`", msg.kind));
    }
    if msg.tick < tick {
        return Reply::Stale;
    }
    if msg.tick > tick {
        return Reply::Malformed(format!("reply for future tick {}", msg.tick));
    }
    match serde_json::from_value::<EgoAction>(msg.payload) {
        Ok(a) => {
            let ok = matches!(
                (mode, &a),
                (ActionMode::Discrete, EgoAction::Discrete(_)) | (ActionMode::Continuous, EgoAction::Continuous(_))
            );
            if !ok {
                return Reply::Malformed("action does not match the negotiated mode".into());
            }
            Reply::Action(match a {
                EgoAction::Continuous(c) => EgoAction::Continuous(c.clamped()),
                d => d,
            })
        }
        Err(e) => Reply::Malformed(format!("bad action payload: {e}")),
    }
}

/// A running agent process in lockstep with the engine.
pub struct ExternalAgent {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<String>,
    tick_timeout: Duration,
    mode: ActionMode,
    consecutive: u32,
    dead: bool,
}

impl ExternalAgent {
    pub fn spawn(
        command: &[String],
        scenario_id: &str,
        lidar_rays: usize,
        handshake_timeout: Duration,
        tick_timeout: Duration,
    ) -> Result<Self, HandshakeError> {
        let shown = command.join(" ");
        let (prog, args) = command
            .split_first()
            .ok_or_else(|| HandshakeError::Spawn(shown.clone(), std::io::Error::other("empty command")))?;
        let mut child = Command::new(prog)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| HandshakeError::Spawn(shown, e))?;
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            // bytes, not `lines()`: invalid UTF-8 is a malformed reply, not EOF
            let mut reader = BufReader::new(stdout);
            let mut buf = Vec::new();
            loop {
                buf.clear();
                match reader.read_until(b'\n', &mut buf) {
                    Ok(0) | Err(_) => break,
                    Ok(_) => {}
                }
                let line = String::from_utf8_lossy(&buf).trim_end_matches(['\n', '\r']).to_string();
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut agent = ExternalAgent {
            stdin: child.stdin.take(),
            child,
            lines: rx,
            tick_timeout,
            mode: ActionMode::Discrete,
            consecutive: 0,
            dead: false,
        };
        let hello = Handshake {
            schema_version: PROTOCOL_VERSION,
            scenario_id: scenario_id.to_string(),
            dt: crate::engine::DT,
            lidar_rays,
            action_modes: vec![ActionMode::Discrete, ActionMode::Continuous],
        };
        match agent.handshake(&hello, handshake_timeout) {
            Ok(mode) => {
                agent.mode = mode;
                Ok(agent)
            }
            Err(e) => {
                agent.shutdown();
                Err(e)
            }
        }
    }

    fn send(&mut self, line: &str) -> bool {
        match self.stdin.as_mut() {
            Some(s) => s.write_all(line.as_bytes()).and_then(|_| s.flush()).is_ok(),
            None => false,
        }
    }

    fn handshake(&mut self, hello: &Handshake, timeout: Duration) -> Result<ActionMode, HandshakeError> {
        if !self.send(&encode("handshake", 0, hello)) {
            return Err(HandshakeError::Exited);
        }
        let line = match self.lines.recv_timeout(timeout) {
            Ok(l) => l,
            Err(RecvTimeoutError::Timeout) => return Err(HandshakeError::Timeout(timeout)),
            Err(RecvTimeoutError::Disconnected) => return Err(HandshakeError::Exited),
        };
        let msg: Message<HandshakeAck> =
            serde_json::from_str(&line).map_err(|e| HandshakeError::Malformed(e.to_string()))?;
        if msg.kind != "handshake_ack" {
            return Err(HandshakeError::Malformed(format!("expected `handshake_ack`, got `{}`", msg.kind)));
        }
        if msg.payload.schema_version != PROTOCOL_VERSION {
            return Err(HandshakeError::Version {
                found: msg.payload.schema_version,
            });
        }
        Ok(msg.payload.action_mode)
    }

    pub fn action_mode(&self) -> ActionMode {
        self.mode
    }

    fn substitute(&mut self, fault: String, fatal: bool) -> PolicyStep {
        self.consecutive += 1;
        let fatal = fatal || self.consecutive >= MAX_CONSECUTIVE_FAULTS;
        PolicyStep {
            action: EgoAction::STOP,
            fault: Some(PolicyFault { fault, fatal }),
        }
    }

    fn exchange(&mut self, obs: &Observation) -> PolicyStep {
        if self.dead || !self.send(&encode("observation", obs.tick, obs)) {
            self.dead = true;
            return self.substitute("agent exited".into(), true);
        }
        let deadline = Instant::now() + self.tick_timeout;
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            match self.lines.recv_timeout(left) {
                Ok(line) => match parse_reply(&line, obs.tick, self.mode) {
                    Reply::Action(a) => {
                        self.consecutive = 0;
                        return a.into();
                    }
                    Reply::Stale => continue,
                    Reply::Malformed(why) => return self.substitute(why, false),
                },
                Err(RecvTimeoutError::Timeout) => {
                    return self.substitute(format!("no reply within {} ms", self.tick_timeout.as_millis()), false)
                }
                Err(RecvTimeoutError::Disconnected) => {
                    self.dead = true;
                    return self.substitute("agent exited".into(), true);
                }
            }
        }
    }

    fn shutdown(&mut self) {
        self.stdin.take();
        let deadline = Instant::now() + Duration::from_millis(500);
        while Instant::now() < deadline {
            if let Ok(Some(_)) = self.child.try_wait() {
                return;
            }
            thread::sleep(Duration::from_millis(5));
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Policy for ExternalAgent {
    fn act(&mut self, obs: &Observation) -> PolicyStep {
        self.exchange(obs)
    }

    fn finish(&mut self, tick: u64, outcome: &str) {
        if !self.dead {
            let line = encode(
                "terminate",
                tick,
                &Terminate {
                    outcome: outcome.to_string(),
                },
            );
            self.send(&line);
        }
        self.shutdown();
    }
}

impl Drop for ExternalAgent {
    fn drop(&mut self) {
        if self.stdin.is_some() {
            self.shutdown();
        }
    }
}
