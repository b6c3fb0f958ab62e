//! Scripted agent for protocol tests.
//!
//! Modes: `stop`, `straight`, `random` (nondeterministic discrete actions),
//! `random-continuous`, `stop-sign` (stops for apparent stop signs ahead),
//! `garbage-once`, `silent-once` (misses one deadline; both then drive
//! straight), `garbage-always`, `die-after:<n>`, `bad-version`, `no-ack`.

use std::io::{self, BufRead, Write};
use std::thread;
use std::time::Duration;

use rand::Rng;
use serde_json::{json, Value};

fn send(out: &mut impl Write, v: &Value) {
    let _ = writeln!(out, "{v}");
    let _ = out.flush();
}

fn stop_sign_ahead(obs: &Value) -> bool {
    obs["detections"].as_array().is_some_and(|ds| {
        ds.iter().any(|d| {
            let x = d["position"][0].as_f64().unwrap_or(-1.0);
            let y = d["position"][1].as_f64().unwrap_or(99.0);
            d["apparent_class"] == "stop_sign" && x > 0.0 && x < 40.0 && y.abs() < 6.0
        })
    })
}

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_else(|| "stop".into());
    let continuous = mode == "random-continuous";
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    let mut rng = rand::rng();
    let mut misbehaved = false;
    let die_after: Option<u64> = mode.strip_prefix("die-after:").and_then(|n| n.parse().ok());

    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        let Ok(msg) = serde_json::from_str::<Value>(&line) else { continue };
        let tick = msg["tick"].as_u64().unwrap_or(0);
        match msg["type"].as_str() {
            Some("handshake") => match mode.as_str() {
                "no-ack" => {}
                "bad-version" => send(&mut out, &json!({"type": "handshake_ack", "tick": 0, "payload": {"schema_version": 99, "action_mode": "discrete"}})),
                _ => {
                    let m = if continuous { "continuous" } else { "discrete" };
                    send(&mut out, &json!({"type": "handshake_ack", "tick": 0, "payload": {"schema_version": 1, "action_mode": m}}));
                }
            },
            Some("observation") => {
                if die_after.is_some_and(|n| tick >= n) {
                    std::process::exit(0);
                }
                let payload = match mode.as_str() {
                    "garbage-once" if !misbehaved => {
                        misbehaved = true;
                        let _ = out.write_all(b"\x00\xffnot json at all\n");
                        let _ = out.flush();
                        continue;
                    }
                    "garbage-always" => {
                        let _ = out.write_all(b"{{{{\n");
                        let _ = out.flush();
                        continue;
                    }
                    "silent-once" if !misbehaved => {
                        misbehaved = true;
                        thread::sleep(Duration::from_millis(150));
                        json!({"discrete": "straight"})
                    }
                    "random" => {
                        let a = ["straight", "turn_left", "turn_right", "stop"][rng.random_range(0..4)];
                        json!({ "discrete": a })
                    }
                    "random-continuous" => json!({"continuous": {
                        "throttle": rng.random::<f64>(),
                        "brake": rng.random::<f64>() * 0.3,
                        "steer": rng.random_range(-1.0..1.0),
                    }}),
                    "stop-sign" => {
                        if stop_sign_ahead(&msg["payload"]) {
                            json!({"discrete": "stop"})
                        } else {
                            json!({"discrete": "straight"})
                        }
                    }
                    "straight" | "garbage-once" | "silent-once" => json!({"discrete": "straight"}),
                    _ => json!({"discrete": "stop"}),
                };
                send(&mut out, &json!({"type": "action", "tick": tick, "payload": payload}));
            }
            Some("terminate") => break,
            _ => {}
        }
    }
}
