use super::{Field, Grid};
use crate::error::{Error, Result};

/// Uniform time grid `t_k = kT/K`, `k = 0..=K`, with composite-trapezoid weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    intervals: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, intervals: usize) -> Result<Self> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::InvalidParameter(format!("final time {t_final} must be positive")));
        }
        if intervals == 0 {
            return Err(Error::InvalidParameter("time grid needs at least one interval".into()));
        }
        Ok(Self { t_final, intervals })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Number of intervals `K`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of nodes `K + 1`.
    pub fn node_count(&self) -> usize {
        self.intervals + 1
    }

    pub fn step(&self) -> f64 {
        self.t_final / self.intervals as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k == self.intervals {
            self.t_final
        } else {
            k as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.node_count()).map(|k| self.node(k)).collect()
    }

    /// Trapezoid weights; they sum to `T`.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.step();
        let mut w = vec![h; self.node_count()];
        w[0] = h / 2.0;
        w[self.intervals] = h / 2.0;
        w
    }

    /// Same window with `factor` times as many intervals.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            t_final: self.t_final,
            intervals: self.intervals * factor,
        }
    }
}

/// A field sampled at every node of a time grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    time: TimeGrid,
    states: Vec<Field>,
}

impl Trajectory {
    pub fn new(time: TimeGrid, states: Vec<Field>) -> Result<Self> {
        if states.len() != time.node_count() {
            return Err(Error::SizeMismatch {
                expected: time.node_count(),
                got: states.len(),
            });
        }
        if let Some(first) = states.first() {
            let g = *first.grid();
            for s in &states[1..] {
                g.check_same(s.grid())?;
            }
        }
        Ok(Self { time, states })
    }

    /// The same field at every node.
    pub fn constant(time: TimeGrid, f: &Field) -> Self {
        Self {
            time,
            states: vec![f.clone(); time.node_count()],
        }
    }

    pub fn zeros(time: TimeGrid, grid: Grid) -> Self {
        Self::constant(time, &Field::zeros(grid))
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn grid(&self) -> &Grid {
        self.states[0].grid()
    }

    pub fn states(&self) -> &[Field] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &Field {
        &self.states[k]
    }

    pub fn last(&self) -> &Field {
        self.states.last().expect("trajectory has at least one node")
    }

    pub fn into_states(self) -> Vec<Field> {
        self.states
    }

    pub(crate) fn check_time(&self, tg: &TimeGrid) -> Result<()> {
        if &self.time == tg {
            Ok(())
        } else {
            Err(Error::TimeGridMismatch)
        }
    }
}
