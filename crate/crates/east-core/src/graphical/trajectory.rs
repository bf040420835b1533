//! Trajectory replay on a noise field.

use std::io::{self, Write};

use crate::model::Configuration;

use super::noise::NoiseField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub site: usize,
    /// The coin value the ring carried, applied only when legal.
    pub new_spin: u8,
    pub legal: bool,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub initial: Configuration,
    pub events: Vec<Event>,
    pub final_state: Configuration,
    pub horizon: f64,
}

impl Trajectory {
    /// State at time `t` by replaying the legal events up to and including
    /// `t`.
    pub fn state_at(&self, t: f64) -> Configuration {
        let mut cur = self.initial;
        for e in &self.events {
            if e.time > t {
                break;
            }
            if e.legal {
                cur = cur.with_spin(e.site, e.new_spin);
            }
        }
        cur
    }

    /// One event per line: `time site newspin legal`, tab-separated.
    pub fn export_tsv(&self, out: &mut impl Write) -> io::Result<()> {
        for e in &self.events {
            writeln!(
                out,
                "{}\t{}\t{}\t{}",
                e.time, e.site, e.new_spin, e.legal as u8
            )?;
        }
        Ok(())
    }
}

/// Run the chain from `initial` on the given noise up to `horizon`,
/// recording every ring with its legality flag.
pub fn evolve(initial: Configuration, noise: &mut NoiseField, horizon: f64) -> Trajectory {
    run(initial, noise, horizon, false)
}

/// Same run, recording only the legal rings.
pub fn evolve_thinned(initial: Configuration, noise: &mut NoiseField, horizon: f64) -> Trajectory {
    run(initial, noise, horizon, true)
}

fn run(initial: Configuration, noise: &mut NoiseField, horizon: f64, thin: bool) -> Trajectory {
    assert_eq!(noise.len(), initial.len());
    let mut cur = initial;
    let mut events = Vec::new();
    for ring in noise.merged(horizon) {
        let legal = cur.constraint(ring.site);
        let new_spin = ring.coin as u8;
        if legal {
            cur = cur.with_spin(ring.site, new_spin);
        }
        if legal || !thin {
            events.push(Event {
                time: ring.time,
                site: ring.site,
                new_spin,
                legal,
            });
        }
    }
    Trajectory {
        initial,
        events,
        final_state: cur,
        horizon,
    }
}
