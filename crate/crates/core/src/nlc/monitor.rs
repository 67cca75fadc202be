//! Runs every diagnostic on a snapshot series and writes one CSV row per snapshot.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{
    bkm_integrand, decay_check, lemma_checks, pressure_derivative_origin, sigma_products, threshold, LemmaChecks, NlcConfig,
    PressureDerivative, VSpace,
};
use crate::error::{Error, Result};
use crate::frame::{build_frame, find_max_points, infimize_nlc, to_frame, Frame, MaxPoint};
use crate::grid::{read_snapshot, Grid3, Snapshot};

pub const CSV_HEADER: &str =
    "t,functional,threshold,u3_origin,via_full,via_remainder,symmetric_part,u3_lap_u3,bkm,linf_speed,decay_const,verdict_flag";

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NlcReport {
    pub t: f64,
    pub functional: f64,
    pub threshold: f64,
    pub u3_at_origin: f64,
    pub pressure_deriv: PressureDerivative<f64>,
    pub lemma_checks: LemmaChecks<f64>,
    pub bkm_integrand: f64,
    pub l_inf_speed: f64,
    pub decay_constant: f64,
    /// Largest torus mean among the products whose `σ` should vanish.
    pub sigma_max: f64,
    /// Window radius of the winning decomposition.
    pub window: Option<f64>,
    pub candidates: Vec<(Option<f64>, f64)>,
    pub max_point: MaxPoint<f64>,
    pub frame: Frame<f64>,
}

impl NlcReport {
    pub fn satisfied(&self) -> bool {
        self.functional <= self.threshold
    }
}

#[derive(Clone, Debug)]
pub enum MonitorRow {
    Ok(Box<NlcReport>),
    Failed { source: String, t: Option<f64>, message: String },
}

#[derive(Clone, Debug)]
pub struct MonitorOutcome {
    pub rows: Vec<MonitorRow>,
    pub failures: usize,
    /// True when every processed snapshot has functional ≤ threshold and none failed.
    pub satisfied: bool,
}

impl MonitorOutcome {
    pub fn reports(&self) -> impl Iterator<Item = &NlcReport> {
        self.rows.iter().filter_map(|r| match r {
            MonitorRow::Ok(r) => Some(r.as_ref()),
            MonitorRow::Failed { .. } => None,
        })
    }

    pub fn verdict(&self) -> String {
        if self.satisfied {
            "criterion satisfied over series".into()
        } else {
            let violated = self.reports().filter(|r| !r.satisfied()).count();
            format!("criterion not established: {violated} violations, {} failures", self.failures)
        }
    }
}

/// Reads every `*.nscv` file of `dir` in name order. Unreadable files become
/// per-entry errors; an empty directory is an error.
pub fn load_series(dir: &Path) -> Result<Vec<(PathBuf, Result<Snapshot>)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "nscv"))
        .collect();
    if paths.is_empty() {
        return Err(Error::Series(format!("no .nscv snapshots in {}", dir.display())));
    }
    paths.sort();
    Ok(paths.into_iter().map(|p| {
        let s = read_snapshot(&p);
        (p, s)
    }).collect())
}

fn process(snap: &Snapshot, cfg: &NlcConfig, space: &VSpace<f64>) -> Result<NlcReport> {
    let v = &snap.field;
    let t = snap.time;
    let m = find_max_points(v, cfg.tie_tol, t)?[0];
    let frame = build_frame(v, m.index)?;
    let framed = to_frame(v, &frame, m.index, cfg.resample, t);
    let u3 = framed.at_origin()[2];
    let thr = threshold(cfg.c, cfg.alpha, cfg.t_blowup, t, u3)?;
    let inf = infimize_nlc(&framed, space, &cfg.radii)?;
    let dec = &inf.decomposition;
    let pressure = pressure_derivative_origin(dec);
    let lemma = lemma_checks(v, &m, &frame, &pressure)?;
    let g = v.grid();
    let radius = cfg.decay_radius.unwrap_or(0.5 * g.l());
    Ok(NlcReport {
        t,
        functional: inf.functional.value,
        threshold: thr,
        u3_at_origin: u3,
        pressure_deriv: pressure,
        lemma_checks: lemma,
        bkm_integrand: bkm_integrand(v),
        l_inf_speed: m.speed,
        decay_constant: decay_check(v, radius)?,
        sigma_max: sigma_products(dec),
        window: dec.window,
        candidates: inf.candidates.clone(),
        max_point: m,
        frame,
    })
}

/// Processes `series` in order. A failing snapshot is recorded and the run continues.
pub fn monitor_run(series: &[(String, Result<Snapshot>)], cfg: &NlcConfig) -> Result<MonitorOutcome> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(series.len());
    let mut spaces: Vec<(Grid3<f64>, VSpace<f64>)> = Vec::new();
    let mut last_t: Option<f64> = None;
    for (source, snap) in series {
        let snap = match snap {
            Ok(s) => s,
            Err(e) => {
                rows.push(MonitorRow::Failed { source: source.clone(), t: None, message: e.to_string() });
                continue;
            }
        };
        if let Some(prev) = last_t {
            if !(snap.time > prev) {
                return Err(Error::Series(format!("time {} in {source} does not increase past {prev}", snap.time)));
            }
        }
        last_t = Some(snap.time);
        let g = *snap.field.grid();
        let space = match spaces.iter().position(|(sg, _)| *sg == g) {
            Some(i) => &spaces[i].1,
            None => match cfg.space(&g) {
                Ok(s) => {
                    spaces.push((g, s));
                    &spaces.last().expect("just pushed").1
                }
                Err(e) => {
                    rows.push(MonitorRow::Failed { source: source.clone(), t: Some(snap.time), message: e.to_string() });
                    continue;
                }
            },
        };
        match process(snap, cfg, space) {
            Ok(r) => rows.push(MonitorRow::Ok(Box::new(r))),
            Err(e) => rows.push(MonitorRow::Failed { source: source.clone(), t: Some(snap.time), message: e.to_string() }),
        }
    }
    let failures = rows.iter().filter(|r| matches!(r, MonitorRow::Failed { .. })).count();
    let satisfied = failures == 0 && rows.iter().all(|r| matches!(r, MonitorRow::Ok(r) if r.satisfied()));
    Ok(MonitorOutcome { rows, failures, satisfied })
}

/// Writes the header and one line per row. Failed rows carry `error` as their flag.
pub fn write_csv<W: Write>(out: &mut W, outcome: &MonitorOutcome) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in &outcome.rows {
        match row {
            MonitorRow::Ok(r) => writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
                r.t,
                r.functional,
                r.threshold,
                r.u3_at_origin,
                r.pressure_deriv.via_full,
                r.pressure_deriv.via_remainder,
                r.pressure_deriv.symmetric_part,
                r.lemma_checks.v_laplacian_v,
                r.bkm_integrand,
                r.l_inf_speed,
                r.decay_constant,
                if r.satisfied() { "ok" } else { "violated" }
            )?,
            MonitorRow::Failed { t, .. } => {
                let t = t.map(|t| format!("{t:e}")).unwrap_or_default();
                writeln!(out, "{t},,,,,,,,,,,error")?
            }
        }
    }
    Ok(())
}
