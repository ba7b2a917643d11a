use crate::error::{Error, Result};
use crate::potentials::Band;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Supercritical,
    Subcritical,
    CriticalLog,
    AnisoH2plus,
    /// `d = 2, r = 1` sweep with no pass/fail.
    Exploratory,
    SeriesConvergence,
    IdentitySuite,
    RegularityProbe,
    Strichartz,
    Solve,
}

impl Experiment {
    pub fn is_inflation(self) -> bool {
        matches!(
            self,
            Experiment::Supercritical
                | Experiment::Subcritical
                | Experiment::CriticalLog
                | Experiment::AnisoH2plus
                | Experiment::Exploratory
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Bump,
    PowerLaw,
}

/// Experiment configuration. Unset fields take the defaults of the chosen
/// experiment (see [`SweepConfig::preset`]).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub experiment: Option<Experiment>,
    pub dim: Option<usize>,
    /// Lebesgue exponent of the potential.
    pub r: Option<f64>,
    /// Sobolev index of the measured norm.
    pub gamma: Option<f64>,
    /// Ratio `M/N` in the supercritical construction.
    pub k0: Option<f64>,
    /// Regularity gap below the critical index.
    pub eps0: Option<f64>,
    /// Swept scale values (`N` or `M`), or band scales for Strichartz.
    pub sweep: Option<Vec<f64>>,
    /// Fixed secondary scale (`N` when `M` is swept, bump scale otherwise).
    pub scale: Option<f64>,
    /// Data scale of the box construction.
    pub data_scale: Option<f64>,
    /// Use a lattice of this many points per axis instead of the continuum
    /// evaluators.
    pub grid_n: Option<usize>,
    pub period: Option<f64>,
    /// Frequency step of the separable evaluator.
    pub step: Option<f64>,
    pub t_final: Option<f64>,
    /// Time intervals; a list for refinement studies.
    pub intervals: Option<Vec<usize>>,
    pub n0: Option<f64>,
    pub m0: Option<f64>,
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
    pub terms: Option<usize>,
    pub samples: Option<usize>,
    /// Strichartz exponents `(q, p)`.
    pub q: Option<f64>,
    pub p: Option<f64>,
    pub potential: Option<PotentialKind>,
    /// Power-law exponent `a` or bump strength multiplier.
    pub strength: Option<f64>,
    pub band: Option<Band>,
    pub seed: Option<u64>,
    pub expected_slope: Option<f64>,
    pub tolerance: Option<f64>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn for_experiment(e: Experiment) -> Self {
        Self {
            experiment: Some(e),
            ..Self::default()
        }
    }

    /// Defaults of each experiment; these are the desk configurations.
    pub fn preset(e: Experiment) -> Self {
        let base = Self::for_experiment(e);
        let p2 = |a: i32, b: i32| Some((a..=b).map(|k| 2f64.powi(k)).collect::<Vec<_>>());
        match e {
            Experiment::Supercritical => Self {
                dim: Some(3),
                r: Some(1.0),
                gamma: Some(1.0),
                k0: Some(128.0),
                sweep: p2(3, 6),
                band: Some(Band::HalfToTwo),
                tolerance: Some(0.15),
                ..base
            },
            Experiment::Exploratory => Self {
                dim: Some(2),
                r: Some(1.0),
                gamma: Some(1.0),
                k0: Some(128.0),
                sweep: p2(3, 6),
                band: Some(Band::HalfToTwo),
                tolerance: Some(0.15),
                ..base
            },
            Experiment::Subcritical => Self {
                dim: Some(2),
                r: Some(2.0),
                gamma: Some(2.5),
                scale: Some(4.0),
                sweep: p2(5, 9),
                band: Some(Band::OneToTwo),
                tolerance: Some(0.15),
                ..base
            },
            Experiment::CriticalLog => Self {
                dim: Some(3),
                sweep: p2(4, 8),
                band: Some(Band::HalfToTwo),
                ..base
            },
            Experiment::AnisoH2plus => Self {
                dim: Some(2),
                r: Some(4.0),
                gamma: Some(2.5),
                scale: Some(4.0),
                data_scale: Some(1.0),
                step: Some(0.125),
                sweep: p2(5, 9),
                tolerance: Some(0.15),
                ..base
            },
            Experiment::SeriesConvergence => Self {
                dim: Some(2),
                r: Some(2.0),
                gamma: Some(0.0),
                grid_n: Some(16),
                period: Some(2.0 * std::f64::consts::PI),
                scale: Some(2.0),
                strength: Some(1.0),
                intervals: Some(vec![256]),
                terms: Some(8),
                band: Some(Band::HalfToTwo),
                tolerance: Some(1e-4),
                ..base
            },
            Experiment::IdentitySuite => Self {
                dim: Some(2),
                r: Some(2.0),
                alpha: Some(1.0),
                grid_n: Some(16),
                period: Some(std::f64::consts::PI / 2.0),
                scale: Some(8.0),
                strength: Some(1.0),
                n0: Some(16.0),
                m0: Some(4.0),
                t_final: Some(0.005),
                intervals: Some(vec![128, 256, 512]),
                band: Some(Band::HalfToTwo),
                tolerance: Some(1e-4),
                ..base
            },
            Experiment::RegularityProbe => Self {
                dim: Some(2),
                r: Some(2.0),
                grid_n: Some(64),
                period: Some(2.0 * std::f64::consts::PI),
                potential: Some(PotentialKind::Bump),
                scale: Some(2.0),
                strength: Some(1.0),
                t_final: Some(0.1),
                intervals: Some(vec![200]),
                band: Some(Band::HalfToTwo),
                ..base
            },
            Experiment::Strichartz => Self {
                dim: Some(3),
                q: Some(2.0),
                p: Some(6.0),
                grid_n: Some(16),
                period: Some(2.0 * std::f64::consts::PI),
                sweep: Some(vec![1.0, 2.0, 3.0]),
                samples: Some(100),
                t_final: Some(0.25),
                intervals: Some(vec![32]),
                ..base
            },
            Experiment::Solve => Self {
                dim: Some(2),
                r: Some(2.0),
                grid_n: Some(32),
                period: Some(2.0 * std::f64::consts::PI),
                potential: Some(PotentialKind::Bump),
                scale: Some(2.0),
                strength: Some(1.0),
                t_final: Some(0.5),
                intervals: Some(vec![100]),
                band: Some(Band::HalfToTwo),
                tolerance: Some(1e-12),
                ..base
            },
        }
    }

    /// Fill unset fields from the preset of the named experiment and validate.
    pub fn resolved(&self) -> Result<Self> {
        let e = self
            .experiment
            .ok_or_else(|| Error::Config("missing field `experiment`".into()))?;
        let p = Self::preset(e);
        macro_rules! pick {
            ($($f:ident),*) => { Self { $($f: self.$f.clone().or(p.$f.clone()),)* } };
        }
        let mut out = pick!(
            experiment, dim, r, gamma, k0, eps0, sweep, scale, data_scale, grid_n, period, step, t_final, intervals,
            n0, m0, beta, alpha, terms, samples, q, p, potential, strength, band, seed, expected_slope, tolerance
        );
        if out.seed.is_none() {
            out.seed = Some(0);
        }
        if out.expected_slope.is_none() {
            out.expected_slope = out.predicted_rate();
        }
        out.validate()?;
        Ok(out)
    }

    /// Predicted exponent of the swept norm, where one exists.
    pub fn predicted_rate(&self) -> Option<f64> {
        let d = self.dim? as f64;
        match self.experiment? {
            Experiment::Supercritical | Experiment::Exploratory => Some(d / self.r? - 2.0),
            Experiment::Subcritical => Some(self.gamma? - (2.0 + d / 2.0 - d / self.r?)),
            Experiment::AnisoH2plus => Some(self.gamma? - 2.0),
            _ => None,
        }
    }

    pub fn dim_or_err(&self) -> Result<usize> {
        self.dim.ok_or_else(|| Error::Config("missing `dim`".into()))
    }

    pub(crate) fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
        v.clone().ok_or_else(|| Error::Config(format!("missing `{name}`")))
    }

    fn validate(&self) -> Result<()> {
        let e = self.experiment.unwrap();
        let d = self.dim_or_err()?;
        if d == 0 || d > 5 {
            return Err(Error::Config(format!("dimension {d} outside 1..=5")));
        }
        let bad = |msg: String| Err(Error::Config(msg));
        let df = d as f64;
        if e.is_inflation() {
            let sweep = Self::need(&self.sweep, "sweep")?;
            if sweep.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return bad("sweep values must be positive".into());
            }
            if e != Experiment::CriticalLog && sweep.len() < 3 {
                return bad(format!("fit needs at least 3 sweep points, got {}", sweep.len()));
            }
            if e == Experiment::CriticalLog && sweep.iter().any(|&m| m < 4.0) {
                return bad("log-shell sweep values must be at least 4".into());
            }
        }
        match e {
            Experiment::Supercritical => {
                let r = Self::need(&self.r, "r")?;
                if d < 3 || !(1.0..df / 2.0).contains(&r) {
                    return bad(format!("supercritical sweep needs d ≥ 3 and 1 ≤ r < d/2, got d = {d}, r = {r}"));
                }
            }
            Experiment::Subcritical => {
                let r = Self::need(&self.r, "r")?;
                let g = Self::need(&self.gamma, "gamma")?;
                if !(d == 2 || d == 3) || !(r > df / 2.0 && r <= 2.0) {
                    return bad(format!("subcritical sweep needs d ∈ {{2,3}} and d/2 < r ≤ 2, got d = {d}, r = {r}"));
                }
                if g <= 2.0 + df / 2.0 - df / r {
                    return bad(format!("γ = {g} not above 2 + d/2 − d/r"));
                }
            }
            Experiment::CriticalLog => {
                if !(d == 3 || d == 4) {
                    return bad(format!("critical construction needs d ∈ {{3,4}}, got {d}"));
                }
            }
            Experiment::AnisoH2plus => {
                let r = Self::need(&self.r, "r")?;
                let g = Self::need(&self.gamma, "gamma")?;
                if !(r > 2.0 && r >= df / 2.0) || g <= 2.0 || d < 2 {
                    return bad(format!("box construction needs d ≥ 2, r > 2, r ≥ d/2, γ > 2; got d = {d}, r = {r}, γ = {g}"));
                }
            }
            Experiment::Exploratory => {
                Self::need(&self.r, "r")?;
            }
            _ => {}
        }
        if let Some(iv) = &self.intervals {
            if iv.is_empty() || iv.contains(&0) {
                return bad("intervals must be a nonempty list of positive counts".into());
            }
        }
        Ok(())
    }
}
