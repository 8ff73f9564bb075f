use super::events::EventRecord;
use super::tableau::DENSE_ORDER;
use super::Termination;
use crate::error::{Error, Result};

/// One accepted step and its continuous extension.
///
/// The interpolant is parametrized by `σ = (s - s0) / h` over the full step
/// even when `end` was pulled back to a terminal event.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<const N: usize> {
    pub s0: f64,
    pub h: f64,
    pub end: f64,
    pub y0: [f64; N],
    pub(crate) coeffs: [[f64; N]; DENSE_ORDER],
}

impl<const N: usize> Segment<N> {
    pub fn eval(&self, s: f64) -> [f64; N] {
        if s == self.s0 {
            return self.y0;
        }
        let x = (s - self.s0) / self.h;
        let mut y = [0.0; N];
        for (i, f) in self.coeffs.iter().enumerate().rev() {
            let w = if i % 2 == 0 { x } else { 1.0 - x };
            for (yd, fd) in y.iter_mut().zip(f) {
                *yd = (*yd + fd) * w;
            }
        }
        for (yd, y0) in y.iter_mut().zip(&self.y0) {
            *yd += y0;
        }
        y
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShotStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// The outcome of one integration run.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotResult<const N: usize> {
    pub termination: Termination,
    /// Located crossings in order of increasing `s`.
    pub events: Vec<EventRecord<N>>,
    pub start_s: f64,
    pub start_state: [f64; N],
    pub final_s: f64,
    pub final_state: [f64; N],
    pub segments: Vec<Segment<N>>,
    pub stats: ShotStats,
}

impl<const N: usize> ShotResult<N> {
    pub(crate) fn new(s0: f64, y0: [f64; N]) -> Self {
        Self {
            termination: Termination::ArcLengthExhausted,
            events: Vec::new(),
            start_s: s0,
            start_state: y0,
            final_s: s0,
            final_state: y0,
            segments: Vec::new(),
            stats: ShotStats::default(),
        }
    }

    /// Interpolated state at `s`. Exact at accepted step points.
    pub fn dense_eval(&self, s: f64) -> Result<[f64; N]> {
        if !(s >= self.start_s && s <= self.final_s) {
            return Err(Error::Range { s, start: self.start_s, end: self.final_s });
        }
        if s == self.final_s {
            return Ok(self.final_state);
        }
        let idx = self.segments.partition_point(|seg| seg.s0 <= s);
        // idx ≥ 1 because the first segment starts at start_s ≤ s
        Ok(self.segments[idx - 1].eval(s))
    }

    /// `samples` states uniformly spaced over `[start_s, final_s]`, endpoints
    /// included.
    pub fn resample(&self, samples: usize) -> Vec<(f64, [f64; N])> {
        match samples {
            0 => Vec::new(),
            1 => vec![(self.start_s, self.start_state)],
            _ => {
                let span = self.final_s - self.start_s;
                (0..samples)
                    .map(|i| {
                        let s = if i + 1 == samples {
                            self.final_s
                        } else {
                            self.start_s + span * i as f64 / (samples - 1) as f64
                        };
                        (s, self.dense_eval(s).expect("sample inside range"))
                    })
                    .collect()
            }
        }
    }

    /// Concatenate a run that was started from this run's final point.
    pub fn append(&mut self, next: ShotResult<N>) -> Result<()> {
        if next.start_s != self.final_s || next.start_state != self.final_state {
            return Err(Error::InvalidConfig(format!(
                "cannot append a run starting at s = {} to one ending at s = {}",
                next.start_s, self.final_s
            )));
        }
        self.segments.extend(next.segments);
        self.events.extend(next.events);
        self.final_s = next.final_s;
        self.final_state = next.final_state;
        self.termination = next.termination;
        self.stats.accepted += next.stats.accepted;
        self.stats.rejected += next.stats.rejected;
        self.stats.rhs_evals += next.stats.rhs_evals;
        Ok(())
    }

    /// Accepted step points followed by the final state.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, [f64; N])> + '_ {
        self.segments
            .iter()
            .map(|seg| (seg.s0, seg.y0))
            .chain(std::iter::once((self.final_s, self.final_state)))
    }
}
