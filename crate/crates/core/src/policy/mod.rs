//! Ego decision sources: baseline policies, external agents speaking the
//! line protocol, and replay of recorded actions.

pub mod action;
pub mod builtin;
pub mod external;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

pub use action::{map_discrete, resolve_action, DiscreteAction, EgoAction};
pub use builtin::{builtin_act, braking_distance, BuiltinPolicy};
pub use external::{ExternalAgent, HandshakeError};

use crate::perception::Observation;

pub const DEFAULT_HANDSHAKE_TIMEOUT: Duration = Duration::from_secs(5);
pub const DEFAULT_TICK_TIMEOUT: Duration = Duration::from_millis(50);

/// Where ego decisions come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyBinding {
    Builtin(BuiltinPolicy),
    External {
        command: Vec<String>,
        handshake_timeout: Duration,
        tick_timeout: Duration,
    },
}

impl PolicyBinding {
    pub fn external(command: Vec<String>) -> Self {
        PolicyBinding::External {
            command,
            handshake_timeout: DEFAULT_HANDSHAKE_TIMEOUT,
            tick_timeout: DEFAULT_TICK_TIMEOUT,
        }
    }

    /// Selector text, as accepted by `from_str`.
    pub fn descriptor(&self) -> String {
        match self {
            PolicyBinding::Builtin(b) => format!("builtin:{b}"),
            PolicyBinding::External { command, .. } => format!("exec:{}", command.join(" ")),
        }
    }
}

impl fmt::Display for PolicyBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl FromStr for PolicyBinding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(name) = s.strip_prefix("builtin:") {
            return name.parse().map(PolicyBinding::Builtin);
        }
        if let Some(cmd) = s.strip_prefix("exec:") {
            let command: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
            if command.is_empty() {
                return Err("`exec:` needs a command".into());
            }
            return Ok(PolicyBinding::external(command));
        }
        Err(format!("policy selector `{s}` must start with `builtin:` or `exec:`"))
    }
}

/// A substituted or failed reply from an external agent.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyFault {
    pub fault: String,
    /// The run must end with `policy_fault`.
    pub fatal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyStep {
    pub action: EgoAction,
    pub fault: Option<PolicyFault>,
}

impl From<EgoAction> for PolicyStep {
    fn from(action: EgoAction) -> Self {
        PolicyStep { action, fault: None }
    }
}

pub trait Policy {
    fn act(&mut self, obs: &Observation) -> PolicyStep;

    /// Called once with the outcome name after the last tick.
    fn finish(&mut self, _tick: u64, _outcome: &str) {}
}

/// In-process baseline. `cap` is the lidar miss value for the run.
pub struct BuiltinAgent {
    pub policy: BuiltinPolicy,
    pub cap: f64,
}

impl Policy for BuiltinAgent {
    fn act(&mut self, obs: &Observation) -> PolicyStep {
        builtin_act(self.policy, obs, self.cap).into()
    }
}

/// Feeds back a recorded sequence of actions and faults.
pub struct RecordedPolicy {
    steps: Vec<PolicyStep>,
}

impl RecordedPolicy {
    pub fn new(steps: Vec<PolicyStep>) -> Self {
        RecordedPolicy { steps }
    }
}

impl Policy for RecordedPolicy {
    fn act(&mut self, obs: &Observation) -> PolicyStep {
        self.steps
            .get(obs.tick as usize)
            .cloned()
            .unwrap_or_else(|| EgoAction::STOP.into())
    }
}
