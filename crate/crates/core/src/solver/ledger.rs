use serde::{Deserialize, Serialize};

/// Cumulative energy budget, one row per recorded time.
///
/// `dissipation_bulk` is `ν ∫₀ᵗ ‖∇u‖²` evaluated with the quadratic form of the discrete
/// diffusion operator (on flat walls with `v = 0` this equals `2ν ∫₀ᵗ ‖D(u)‖²`),
/// `dissipation_wall` is `ν ∫₀ᵗ ∫_{walls} α |u|²`, and `force_work` is `∫₀ᵗ ∫ f·u`.
/// Flat walls make the curvature contribution identically zero.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub dissipation_bulk: Vec<f64>,
    pub dissipation_wall: Vec<f64>,
    pub curvature_term: Vec<f64>,
    pub force_work: Vec<f64>,
}

/// Increments accumulated over one step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LedgerIncrement {
    pub bulk: f64,
    pub wall: f64,
    pub work: f64,
}

impl EnergyLedger {
    pub fn start(t0: f64, e0: f64) -> Self {
        EnergyLedger {
            times: vec![t0],
            kinetic: vec![e0],
            dissipation_bulk: vec![0.0],
            dissipation_wall: vec![0.0],
            curvature_term: vec![0.0],
            force_work: vec![0.0],
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn e0(&self) -> f64 {
        self.kinetic.first().copied().unwrap_or(0.0)
    }

    pub fn push(&mut self, t: f64, kinetic: f64, inc: LedgerIncrement) {
        let last = self.len() - 1;
        self.times.push(t);
        self.kinetic.push(kinetic);
        self.dissipation_bulk.push(self.dissipation_bulk[last] + inc.bulk);
        self.dissipation_wall.push(self.dissipation_wall[last] + inc.wall);
        self.curvature_term.push(0.0);
        self.force_work.push(self.force_work[last] + inc.work);
    }

    /// `E(t) − E(0) + D_bulk + D_wall − W_force` at row `k`; the energy inequality says this
    /// is at most zero.
    pub fn budget(&self, k: usize) -> f64 {
        self.kinetic[k] - self.kinetic[0] + self.dissipation_bulk[k] + self.dissipation_wall[k]
            - self.force_work[k]
    }

    /// Largest budget excess over all rows, in units of `E(0)`.
    pub fn max_relative_violation(&self) -> f64 {
        let e0 = self.e0().max(f64::MIN_POSITIVE);
        (0..self.len()).map(|k| self.budget(k) / e0).fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when every row satisfies the budget to `tol · E(0)`.
    pub fn satisfies_inequality(&self, tol: f64) -> bool {
        self.max_relative_violation() <= tol
    }

    /// Total dissipation `D_bulk + D_wall` at the final row.
    pub fn total_dissipation(&self) -> f64 {
        self.dissipation_bulk.last().copied().unwrap_or(0.0)
            + self.dissipation_wall.last().copied().unwrap_or(0.0)
    }

    /// CSV with columns `t,E,D_bulk,D_wall,W_force`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,E,D_bulk,D_wall,W_force\n");
        for k in 0..self.len() {
            s.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.times[k],
                self.kinetic[k],
                self.dissipation_bulk[k],
                self.dissipation_wall[k],
                self.force_work[k]
            ));
        }
        s
    }
}
