use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Ring buffer of past states covering at least `[t − span, t]`.
///
/// States are flat component-major vectors; lookups interpolate linearly
/// between stored times.
#[derive(Clone, Debug)]
pub struct History {
    span: f64,
    times: VecDeque<f64>,
    states: VecDeque<Vec<f64>>,
}

/// Relative slack when checking whether a lookup time lies inside the buffer.
const TIME_SLACK: f64 = 1e-12;

impl History {
    pub fn new(span: f64) -> Result<Self> {
        if !(span >= 0.0 && span.is_finite()) {
            return Err(Error::InvalidParameter(format!("history span must be >= 0, got {span}")));
        }
        Ok(Self { span, times: VecDeque::new(), states: VecDeque::new() })
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn oldest_time(&self) -> Option<f64> {
        self.times.front().copied()
    }

    pub fn newest_time(&self) -> Option<f64> {
        self.times.back().copied()
    }

    pub fn newest(&self) -> Option<&[f64]> {
        self.states.back().map(Vec::as_slice)
    }

    /// Appends a snapshot; times must increase strictly. Entries no longer
    /// needed to cover `[t − span, t]` are dropped.
    pub fn push(&mut self, t: f64, state: Vec<f64>) -> Result<()> {
        if let Some(last) = self.times.back() {
            if !(t > *last) {
                return Err(Error::InvalidParameter(format!("history times must increase ({t} after {last})")));
            }
        }
        if let Some(first) = self.states.front() {
            if first.len() != state.len() {
                return Err(Error::DimensionMismatch { expected: first.len(), found: state.len() });
            }
        }
        self.times.push_back(t);
        self.states.push_back(state);
        let horizon = t - self.span;
        while self.times.len() >= 2 && self.times[1] <= horizon {
            self.times.pop_front();
            self.states.pop_front();
        }
        Ok(())
    }

    /// Overwrites the newest snapshot (used for impulsive jumps).
    pub fn replace_newest(&mut self, state: Vec<f64>) -> Result<()> {
        match self.states.back_mut() {
            Some(last) if last.len() == state.len() => {
                *last = state;
                Ok(())
            }
            Some(last) => Err(Error::DimensionMismatch { expected: last.len(), found: state.len() }),
            None => Err(Error::InvalidParameter("history is empty".into())),
        }
    }

    /// Linearly interpolated state at time `t`.
    pub fn lookup(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let (first, last) = match (self.times.front(), self.times.back()) {
            (Some(a), Some(b)) => (*a, *b),
            _ => return Err(Error::HistoryUnderrun { requested: t, oldest: f64::NAN }),
        };
        let slack = TIME_SLACK * (1.0 + t.abs());
        if t < first - slack {
            return Err(Error::HistoryUnderrun { requested: t, oldest: first });
        }
        if t > last + slack {
            return Err(Error::InvalidParameter(format!("lookup at {t} is ahead of the newest state {last}")));
        }
        if t >= last {
            out.copy_from_slice(&self.states[self.states.len() - 1]);
            return Ok(());
        }
        if t <= first {
            out.copy_from_slice(&self.states[0]);
            return Ok(());
        }
        let k = self.times.partition_point(|s| *s <= t) - 1;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let w = (t - t0) / (t1 - t0);
        let (a, b) = (&self.states[k], &self.states[k + 1]);
        for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
            *o = x + w * (y - x);
        }
        Ok(())
    }
}
