//! Labelled spectra shared by the analytic solvers, the oracle and the CLI.

use serde::Serialize;

use crate::model2d::{EnergyZero, ModelParams};

/// Exchange parity of a two-particle state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    #[serde(rename = "S")]
    Symmetric,
    #[serde(rename = "A")]
    Antisymmetric,
}

/// Where a level comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    ClosedForm,
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Level {
    /// First quantum number (`k` for the zero-mode levels).
    pub n: usize,
    /// Second quantum number for two-particle labels.
    pub m: Option<usize>,
    pub energy: f64,
    pub degeneracy: usize,
    pub parities: Vec<Parity>,
    pub retained: bool,
    pub source: Source,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Level {
    pub fn closed_form(n: usize, m: Option<usize>, energy: f64) -> Self {
        Self {
            n,
            m,
            energy,
            degeneracy: 1,
            parities: Vec::new(),
            retained: true,
            source: Source::ClosedForm,
            note: String::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub branch: String,
    pub params: ModelParams,
    pub energy_zero: EnergyZero,
    /// Only part of the spectrum is known in closed form.
    pub partial: bool,
    pub levels: Vec<Level>,
    pub notes: Vec<String>,
}

impl SpectrumTable {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn retained(&self) -> impl Iterator<Item = &Level> {
        self.levels.iter().filter(|l| l.retained)
    }

    /// Shifts every energy to the other energy zero.
    pub fn with_energy_zero(mut self, zero: EnergyZero) -> Self {
        if zero != self.energy_zero {
            let c = self.params.energy_constant();
            let delta = match zero {
                EnergyZero::Full => c,
                EnergyZero::Reduced => -c,
            };
            self.levels.iter_mut().for_each(|l| l.energy += delta);
            self.energy_zero = zero;
        }
        self
    }

    /// Sorts levels by energy, then by labels.
    pub fn sort(&mut self) {
        self.levels.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.n.cmp(&b.n)).then(a.m.cmp(&b.m)));
    }
}
