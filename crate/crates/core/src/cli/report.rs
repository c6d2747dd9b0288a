//! JSON reports, CSV rows and plot scripts.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "grid,value,aux";

/// One raw data point: a grid value, the measured value, and a secondary
/// quantity whose meaning is given by [`Columns`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub grid: f64,
    pub value: f64,
    pub aux: Option<f64>,
}

/// What the three CSV columns mean for this experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Columns {
    pub grid: String,
    pub value: String,
    pub aux: String,
}

/// A theoretical value the measurement is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub quantity: String,
    pub value: f64,
    /// Where the value comes from.
    pub basis: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    /// The experiment probes an open question; no prediction is asserted.
    pub exploratory: bool,
    /// The fit has `r² < 0.9`.
    pub unreliable_fit: bool,
    /// `β̂ > d/2`, the regime where the set would have positive Lebesgue
    /// measure. Reported, never proved.
    pub positive_measure_regime: bool,
}

/// How the plot script should draw the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotHints {
    pub log_x: bool,
    pub log_y: bool,
    /// Labelled extra curve over the same grid, e.g. the split bound.
    pub overlay: Option<(String, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub library_version: String,
    pub name: String,
    pub kind: String,
    pub config: ExperimentConfig,
    pub columns: Columns,
    pub rows: Vec<Row>,
    pub results: Value,
    pub predicted: Vec<Prediction>,
    pub flags: Flags,
    pub plot: PlotHints,
    pub wall_clock_seconds: f64,
    pub threads: usize,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize") + "\n"
    }

    /// `grid,value,aux` rows; floats use the shortest round-trip form, so
    /// equal data gives identical bytes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let aux = r.aux.map(|a| a.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{aux}", r.grid, r.value);
        }
        out
    }

    /// A standalone matplotlib script with the data inlined.
    pub fn plot_script(&self) -> String {
        let list = |v: &mut dyn Iterator<Item = f64>| {
            let items: Vec<String> = v.map(|x| if x.is_finite() { x.to_string() } else { "float('nan')".into() }).collect();
            format!("[{}]", items.join(", "))
        };
        let grid = list(&mut self.rows.iter().map(|r| r.grid));
        let value = list(&mut self.rows.iter().map(|r| r.value));
        let aux = list(&mut self.rows.iter().map(|r| r.aux.unwrap_or(f64::NAN)));
        let mut s = String::new();
        let _ = writeln!(s, "#!/usr/bin/env python3");
        let _ = writeln!(s, "# {} ({}), generated by kakeya-lab {}", self.name, self.kind, self.library_version);
        let _ = writeln!(s, "import math");
        let _ = writeln!(s, "import matplotlib.pyplot as plt\n");
        let _ = writeln!(s, "grid = {grid}");
        let _ = writeln!(s, "value = {value}");
        let _ = writeln!(s, "aux = {aux}\n");
        let _ = writeln!(s, "fig, ax = plt.subplots()");
        let _ = writeln!(s, "ax.plot(grid, value, 'o-', label={:?})", self.columns.value);
        let _ = writeln!(s, "if not all(math.isnan(a) for a in aux):");
        let _ = writeln!(s, "    ax.plot(grid, aux, '--', label={:?})", self.columns.aux);
        if let Some((label, curve)) = &self.plot.overlay {
            let _ = writeln!(s, "ax.plot(grid, {}, ':', label={:?})", list(&mut curve.iter().copied()), label);
        }
        if self.plot.log_x {
            let _ = writeln!(s, "ax.set_xscale('log')");
        }
        if self.plot.log_y {
            let _ = writeln!(s, "ax.set_yscale('log')");
        }
        let _ = writeln!(s, "ax.set_xlabel({:?})", self.columns.grid);
        let _ = writeln!(s, "ax.set_title({:?})", format!("{} ({})", self.name, self.kind));
        let _ = writeln!(s, "ax.legend()");
        let _ = writeln!(s, "fig.savefig({:?}, dpi=150)", format!("{}.png", self.name));
        let _ = writeln!(s, "plt.show()");
        s
    }
}
