use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Resample;
use crate::growth::GrowthConfig;
use crate::nlc::NlcConfig;

/// Flat JSON configuration shared by every subcommand. Absent keys fall back
/// to flag values and then to defaults. Lengths are in box units (the box is
/// `[-L, L)³`), times in solver time units with `ν = 1`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    // simulate
    pub init: Option<String>,
    /// Nodes per axis.
    pub n: Option<usize>,
    /// Box half-width.
    pub l: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub snapshot_every: Option<f64>,

    // monitor
    /// Norm exponent, also used by `norms`.
    pub p: Option<f64>,
    pub phi: Option<GrowthConfig>,
    /// `exhaustive` or `dyadic:<stride>`, also used by `norms`.
    pub balls: Option<String>,
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    /// Blowup time in the threshold `C (T - t)^{-α} / u₃(0, t)`.
    pub t_blowup: Option<f64>,
    /// Window radii, box units.
    pub radii: Option<Vec<f64>>,
    pub resample: Option<Resample>,
    /// Relative tie tolerance for maximum points.
    pub tie_tol: Option<f64>,
    /// Decay-check radius, box units.
    pub decay_radius: Option<f64>,
    pub series: Option<PathBuf>,

    // norms
    pub input: Option<PathBuf>,
    pub component: Option<String>,
    pub space: Option<String>,

    // counterexample
    pub lambda: Option<f64>,
    /// Gaussian width `w`; the box is `L = 8w`.
    pub bump_width: Option<f64>,

    /// Output file or directory.
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Monitor settings; `t_blowup` from the flag wins over the file.
    pub fn nlc_config(&self, t_blowup: Option<f64>) -> Result<NlcConfig> {
        let t = t_blowup.or(self.t_blowup).ok_or_else(|| Error::Config("--T / tBlowup is required".into()))?;
        let mut c = NlcConfig::new(t);
        if let Some(v) = self.p {
            c.p = v;
        }
        if let Some(v) = &self.phi {
            c.phi = v.clone();
        }
        if let Some(v) = &self.balls {
            c.balls = v.clone();
        }
        if let Some(v) = self.c {
            c.c = v;
        }
        if let Some(v) = self.alpha {
            c.alpha = v;
        }
        if let Some(v) = &self.radii {
            c.radii = v.clone();
        }
        if let Some(v) = self.resample {
            c.resample = v;
        }
        if let Some(v) = self.tie_tol {
            c.tie_tol = v;
        }
        c.decay_radius = self.decay_radius;
        Ok(c)
    }
}
