//! The per-tick loop: observe, decide, step, evaluate, record.

use crate::dataset::trace::{actor_records, Channels, ObservationRecord, TickRecord, Trace, TraceError, TraceHeader, TRACE_SCHEMA_VERSION};
use crate::engine::{init_world, step, ContinuousControl, EventKind, InitError, WorldEvent};
use crate::evaluation::{score_run, Evaluator, RunResult, TerminalReason, Verdict};
use crate::model::{apply_overrides, OverrideError, Overrides, ScenarioSpec};
use crate::perception::{observe, render_occupancy, PerceptionConfig};
use crate::policy::{resolve_action, BuiltinAgent, EgoAction, ExternalAgent, HandshakeError, Policy, PolicyBinding};
use crate::ENGINE_VERSION;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub channels: Channels,
    pub perception: PerceptionConfig,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            channels: Channels {
                lidar: true,
                detections: true,
                raster: false,
            },
            perception: PerceptionConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Override(#[from] OverrideError),
    #[error(transparent)]
    Init(#[from] InitError),
    #[error("internal trace error: {0}")]
    Trace(#[from] TraceError),
    #[error("agent startup failed: {0}")]
    Handshake(#[from] HandshakeError),
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// The scenario after overrides.
    pub scenario: ScenarioSpec,
    pub seed: u64,
    pub trace: Trace,
    pub result: RunResult,
}

/// Scenario with overrides applied, and the seed the run uses.
pub fn effective_scenario(spec: &ScenarioSpec, overrides: &Overrides) -> Result<(ScenarioSpec, u64), RunError> {
    let eff = apply_overrides(spec, overrides)?;
    let seed = eff.default_seed;
    Ok((eff, seed))
}

pub fn make_policy(binding: &PolicyBinding, scenario: &ScenarioSpec, opts: &RunOptions) -> Result<Box<dyn Policy>, RunError> {
    Ok(match binding {
        PolicyBinding::Builtin(b) => Box::new(BuiltinAgent {
            policy: *b,
            cap: opts.perception.range_cap(&scenario.weather.preset()),
        }),
        PolicyBinding::External {
            command,
            handshake_timeout,
            tick_timeout,
        } => Box::new(ExternalAgent::spawn(
            command,
            &scenario.id,
            opts.perception.lidar_rays,
            *handshake_timeout,
            *tick_timeout,
        )?),
    })
}

/// Run `spec` under `overrides` with the policy the binding names.
pub fn run(spec: &ScenarioSpec, overrides: &Overrides, opts: &RunOptions, binding: &PolicyBinding) -> Result<RunOutput, RunError> {
    let (eff, _) = effective_scenario(spec, overrides)?;
    let mut policy = make_policy(binding, &eff, opts)?;
    simulate(spec, overrides, opts, policy.as_mut())
}

/// Run to a terminal state with an already constructed policy.
pub fn simulate(spec: &ScenarioSpec, overrides: &Overrides, opts: &RunOptions, policy: &mut dyn Policy) -> Result<RunOutput, RunError> {
    let (eff, seed) = effective_scenario(spec, overrides)?;
    let weather = eff.weather.preset();
    let cfg = opts.perception;
    let mut world = init_world(&eff, seed)?;
    let mut evaluator = Evaluator::new(&eff, &world);
    let mut trace = Trace::new(TraceHeader {
        scenario_id: spec.id.clone(),
        seed,
        overrides: overrides.clone(),
        engine_version: ENGINE_VERSION.to_string(),
        schema_version: TRACE_SCHEMA_VERSION,
        dt: world.dt,
        channels: opts.channels,
        perception: cfg,
    });

    let terminal = loop {
        let k = world.tick;
        let obs = observe(&mut world, &eff.goal_region, &weather, &cfg);
        let raster = opts
            .channels
            .raster
            .then(|| render_occupancy(&world, &eff.map, &weather, &cfg).cells);
        let obs_record = ObservationRecord::new(&obs, raster.as_deref(), &opts.channels);

        let decision = policy.act(&obs);
        let mut events = Vec::new();
        let mut fatal = false;
        if let Some(f) = &decision.fault {
            fatal = f.fatal;
            events.push(WorldEvent {
                tick: k,
                event: EventKind::ProtocolFault {
                    fault: f.fault.clone(),
                    fatal: f.fatal,
                },
            });
        }

        let (control, verdict) = if fatal {
            world.event_log.extend(events.iter().cloned());
            (ContinuousControl::STOP, Verdict::Terminal(TerminalReason::PolicyFault))
        } else {
            let action = if decision.fault.is_some() { EgoAction::STOP } else { decision.action };
            let (control, warning) = resolve_action(&action, &world.ego, &eff.map);
            if let Some(message) = warning {
                events.push(WorldEvent {
                    tick: k,
                    event: EventKind::PolicyWarning { message },
                });
            }
            world.event_log.extend(events.iter().cloned());
            let stepped = step(&mut world, &control, &eff, &weather);
            let verdict = evaluator.update(&world, &stepped, &eff);
            events.extend(stepped);
            if verdict == Verdict::Terminal(TerminalReason::Goal) {
                world.log(EventKind::GoalReached);
                events.push(world.event_log.last().cloned().expect("just logged"));
            }
            (control, verdict)
        };

        let terminal = match verdict {
            Verdict::Terminal(t) => Some(t),
            Verdict::Continue => None,
        };
        trace.record_tick(TickRecord {
            tick: k,
            sim_time: world.sim_time,
            ego: world.ego,
            actors: actor_records(&world),
            observation: obs_record,
            action: decision.action,
            control,
            events,
            terminal,
        })?;
        if let Some(t) = terminal {
            break t;
        }
    };

    let ticks = trace.records.len() as u64;
    let metrics = evaluator.metrics(&world, &eff, ticks);
    let result = score_run(&world.event_log, &eff.constraints, terminal, metrics);
    policy.finish(world.tick, result.outcome.as_str());
    Ok(RunOutput {
        scenario: eff,
        seed,
        trace,
        result,
    })
}
