use super::dag::ConditionalPlanDag;
use super::run::{execute_conditional, InitialSet};
use crate::error::{Error, Result};
use crate::model::{Agent, Config, StateId, SystemModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorEvent {
    /// Some honest runs still match; `remaining` counts them.
    Consistent { remaining: usize },
    /// No honest run matches. Reported again for every later observation.
    Detected { step: usize },
}

/// Online detection for one agent: fed the agent's own state after every
/// step (starting with the initial state), it tracks which possible initial
/// configurations have honest runs matching everything seen so far.
///
/// An observation past the end of a witness's honest run is inconsistent
/// with that witness.
#[derive(Debug, Clone)]
pub struct DetectionMonitor {
    detector: Agent,
    num_states: usize,
    state_names: Vec<String>,
    witnesses: Vec<(Config, Vec<StateId>)>,
    consistent: Vec<bool>,
    step: usize,
    detected: Option<usize>,
}

impl DetectionMonitor {
    pub fn new(
        system: &SystemModel,
        c0s: &InitialSet,
        plan1: &ConditionalPlanDag,
        plan2: &ConditionalPlanDag,
        detector: Agent,
    ) -> Result<Self> {
        let witnesses: Vec<(Config, Vec<StateId>)> = c0s
            .configs()
            .iter()
            .map(|&c| {
                let run = execute_conditional(system, c, plan1, plan2)?;
                Ok((c, run.trajectory.states(detector).collect()))
            })
            .collect::<Result<_>>()?;
        Ok(DetectionMonitor {
            detector,
            num_states: system.num_states(detector),
            state_names: system.state_names(detector).to_vec(),
            consistent: vec![true; witnesses.len()],
            witnesses,
            step: 0,
            detected: None,
        })
    }

    pub fn detector(&self) -> Agent {
        self.detector
    }

    /// Number of observations consumed.
    pub fn steps(&self) -> usize {
        self.step
    }

    pub fn detected(&self) -> Option<usize> {
        self.detected
    }

    /// Initial configurations whose honest runs still match.
    pub fn consistent(&self) -> impl Iterator<Item = Config> + '_ {
        self.witnesses
            .iter()
            .zip(&self.consistent)
            .filter(|(_, &ok)| ok)
            .map(|((c, _), _)| *c)
    }

    pub fn observe(&mut self, state: StateId) -> Result<MonitorEvent> {
        if state.0 as usize >= self.num_states {
            return Err(Error::ObservationOutOfRange(format!("#{}", state.0)));
        }
        let step = self.step;
        self.step += 1;
        if let Some(step) = self.detected {
            return Ok(MonitorEvent::Detected { step });
        }
        for ((_, obs), ok) in self.witnesses.iter().zip(self.consistent.iter_mut()) {
            *ok &= obs.get(step) == Some(&state);
        }
        let remaining = self.consistent.iter().filter(|&&ok| ok).count();
        if remaining == 0 {
            self.detected = Some(step);
            return Ok(MonitorEvent::Detected { step });
        }
        Ok(MonitorEvent::Consistent { remaining })
    }

    pub fn observe_named(&mut self, name: &str) -> Result<MonitorEvent> {
        let id = self
            .state_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::ObservationOutOfRange(name.to_string()))?;
        self.observe(StateId(id as u32))
    }
}
