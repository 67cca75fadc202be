//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nlcrit::frame::{
    build_frame, counterexample_field, find_max_points, frame_at_max, origin_vorticity, symmetrize, to_frame, AngularProfile, Decomposition,
    FramedField, Resample, DEFAULT_TIE_TOL,
};
use nlcrit::grid::{sample_balls, BallStrategy, Grid3, VectorField3};
use nlcrit::growth::GrowthFunction;
use nlcrit::harmonic::{riesz, riesz_invariants};
use nlcrit::nlc::{lemma_checks, nlc_functional, pressure_derivative_origin, pressure_scale, VSpace};
use nlcrit::norms::{campanato_norm, morrey_norm, pointed_campanato_norm, PreparedFamily};
use nlcrit::solver::{self, InitialData, Scheme, SolverConfig, SpectralState};
use nlcrit::synth::Synth;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn grid(n: usize, l: f64) -> Grid3<f64> {
    Grid3::new(n, l).unwrap()
}

fn d3(v: &VectorField3<f64>) -> VectorField3<f64> {
    FramedField::from_y_field(v.clone(), 0.0).du3
}

fn c1_pressure_cancellation() -> Verdict {
    let start = Instant::now();
    let g = grid(32, PI);
    let mut syn = Synth::new(101);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let u = syn.symmetric(&g, 6);
        let dec = Decomposition::symmetric_only(u.clone(), d3(&u));
        let p = pressure_derivative_origin(&dec);
        worst = worst.max(p.symmetric_part.abs() / pressure_scale(&u));
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(worst <= 1e-10 && secs <= 30.0, format!("max |sym part|/scale = {worst:.2e} (<= 1e-10), {secs:.1} s (<= 30 s)"))
}

fn c2_remainder_identity() -> Verdict {
    let g = grid(16, PI);
    let mut syn = Synth::new(202);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let s = syn.uniform(0.01, 2.0);
        let dec = syn.decomposition(&g, 5, s);
        worst = worst.max(pressure_derivative_origin(&dec).identity_defect());
    }
    verdict(worst <= 1e-11, format!("max relative defect over 50 decompositions = {worst:.2e} (<= 1e-11)"))
}

fn c3_riesz_identities() -> Verdict {
    let rows = riesz_invariants(32, 303).unwrap();
    let failed: Vec<_> = rows.iter().filter(|r| !r.holds).map(|r| r.name).collect();
    let summary = rows.iter().map(|r| format!("{}={:.1e}", r.name, r.value)).collect::<Vec<_>>().join(" ");
    verdict(failed.is_empty(), format!("{summary}; failing: {failed:?}"))
}

fn c4_norm_oracle() -> Verdict {
    let g = grid(16, PI);
    let phi = GrowthFunction::<f64>::default_phi();
    let exhaustive = PreparedFamily::new(&g, &sample_balls(&g, &BallStrategy::exhaustive()).unwrap()).unwrap();
    let unit = PreparedFamily::new(&g, &sample_balls(&g, &BallStrategy::dyadic(1)).unwrap()).unwrap();
    let coarse = PreparedFamily::new(&g, &sample_balls(&g, &BallStrategy::dyadic(2)).unwrap()).unwrap();
    let covering = PreparedFamily::new(&g, &sample_balls(&g, &BallStrategy::dyadic(4)).unwrap().with_covering(&g)).unwrap();
    let mut syn = Synth::new(404);
    let (mut sub_ok, mut eq_ok, mut cm_ok, mut lp_worst) = (true, true, true, 0.0f64);
    for k in 0..20 {
        let f = syn.band_limited(&g, 1 + k % 5);
        let p = [2.0, 3.0, 4.0][k % 3];
        let full = campanato_norm(&f, p, &phi, &exhaustive).unwrap().value;
        sub_ok &= campanato_norm(&f, p, &phi, &coarse).unwrap().value <= full;
        eq_ok &= campanato_norm(&f, p, &phi, &unit).unwrap().value == full;
        for fam in [&exhaustive, &coarse] {
            cm_ok &= campanato_norm(&f, p, &phi, fam).unwrap().value <= 2.0 * morrey_norm(&f, p, &phi, fam).unwrap().value;
        }
        let crit = GrowthFunction::morrey_critical(3, p).unwrap();
        let m = morrey_norm(&f, p, &crit, &covering).unwrap().value;
        let lp = (f.data().iter().map(|v| v.abs().powf(p)).sum::<f64>() * g.cell_volume()).powf(1.0 / p);
        lp_worst = lp_worst.max((m - lp).abs() / lp);
    }
    verdict(
        sub_ok && eq_ok && cm_ok && lp_worst <= 0.01,
        format!("dyadic<=exhaustive {sub_ok}, stride-1 equality {eq_ok}, campanato<=2 morrey {cm_ok}, morrey-critical vs Lp {lp_worst:.2e} (<= 1e-2)"),
    )
}

fn c5_decomposition() -> Verdict {
    let g = grid(16, PI);
    let space = VSpace::new(&g, 4.0, GrowthFunction::default_phi(), &BallStrategy::dyadic(4)).unwrap();
    let mut syn = Synth::new(505);
    let (mut recon, mut parity, mut idem, mut func) = (0.0f64, 0.0f64, true, 0.0f64);
    for _ in 0..10 {
        let v = syn.vector(&g, 3);
        let (_, framed) = frame_at_max(&v, Resample::Spectral, 0.0).unwrap();
        let dec = symmetrize(&framed);
        recon = recon.max(dec.reconstruction_defect(&framed.u));
        parity = parity.max(dec.parity_defect());
        let again = symmetrize(&FramedField::from_y_field(dec.sym.clone(), 0.0));
        idem &= again.sym == dec.sym && again.rem.max_abs() == 0.0;
        func = func.max(nlc_functional(&again, &space).unwrap().value);
    }
    verdict(
        recon == 0.0 && parity == 0.0 && idem && func == 0.0,
        format!("reconstruction defect {recon:e}, parity defect {parity:e}, idempotent {idem}, functional on symmetric input {func:e}"),
    )
}

fn lemma_holds(v: &VectorField3<f64>) -> (bool, f64) {
    let m = find_max_points(v, DEFAULT_TIE_TOL, 0.0).unwrap()[0];
    let frame = build_frame(v, m.index).unwrap();
    let framed = to_frame(v, &frame, m.index, Resample::Spectral, 0.0);
    let p = pressure_derivative_origin(&symmetrize(&framed));
    let c = lemma_checks(v, &m, &frame, &p).unwrap();
    (c.holds, c.v_laplacian_v / c.slack)
}

fn c6_lemma() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SolverConfig::new(32, PI, 1e-2, 1.0);
    cfg.snapshot_every = Some(0.1);
    let run = solver::run(&InitialData::beltrami(), &cfg, dir.path()).unwrap();
    let (mut ok, mut worst, mut count) = (run.complete(), f64::NEG_INFINITY, 0);
    for p in &run.paths {
        let (h, r) = lemma_holds(&nlcrit::grid::read_snapshot(p).unwrap().field);
        ok &= h;
        worst = worst.max(r);
        count += 1;
    }
    let g = grid(32, PI);
    let mut syn = Synth::new(606);
    for _ in 0..20 {
        let (h, r) = lemma_holds(&syn.bump(&g));
        ok &= h;
        worst = worst.max(r);
        count += 1;
    }
    verdict(ok, format!("{count} fields, max (u3 lap u3)/slack = {worst:.3e} (<= 1)"))
}

fn c7_counterexample() -> Verdict {
    let mut prev: Option<f64> = None;
    let (mut ratios, mut rem, mut func) = (Vec::new(), 0.0f64, 0.0f64);
    for lambda in [1.0, 10.0, 100.0] {
        let prof = AngularProfile::new(1.0, 0.006, lambda);
        let g = prof.default_grid(64).unwrap();
        let u = counterexample_field(&g, &prof).unwrap();
        let w = origin_vorticity(&u)[1];
        if let Some(q) = prev {
            ratios.push(w / q);
        }
        prev = Some(w);
        let dec = symmetrize(&FramedField::from_y_field(u, 0.0));
        let space = VSpace::new(&g, 4.0, GrowthFunction::default_phi(), &BallStrategy::dyadic(16)).unwrap();
        let rep = nlc_functional(&dec, &space).unwrap();
        for k in 0..3 {
            rem = rem.max(rep.rem[k].value).max(rep.d3_rem[k].value);
        }
        func = func.max(rep.value.abs());
    }
    let ratios_ok = ratios.iter().all(|r| (r - 10.0).abs() <= 0.1);
    verdict(ratios_ok && rem <= 1e-12 && func == 0.0, format!("curl ratios {ratios:?} (10 +- 1%), remainder norm {rem:e} (<= 1e-12), functional {func:e}"))
}

fn c8_solver() -> Verdict {
    let start = Instant::now();
    let g = grid(32, PI);
    let s0 = SpectralState::from_initial(&g, &InitialData::beltrami(), 1.0).unwrap();
    let u0 = s0.velocity();
    let rel = |s: &SpectralState<f64>, t: f64| {
        let exact = u0.scale((-t).exp());
        s.velocity().sub(&exact).max_abs() / exact.max_abs()
    };
    let err = rel(&s0.advance_to(0.1, 1e-3, Scheme::IntegratingFactor).unwrap(), 0.1);
    let secs = start.elapsed().as_secs_f64();
    let e1 = rel(&s0.advance_to(1.0, 1.0 / 125.0, Scheme::Explicit).unwrap(), 1.0);
    let e2 = rel(&s0.advance_to(1.0, 1.0 / 250.0, Scheme::Explicit).unwrap(), 1.0);
    let ratio = e1 / e2;
    verdict(
        err <= 1e-6 && secs <= 60.0 && (14.0..=18.0).contains(&ratio),
        format!("error at t=0.1 {err:.2e} (<= 1e-6) in {secs:.1} s (<= 60 s); dt-halving ratio {ratio:.2} in [14, 18]"),
    )
}

fn c9_multiplication() -> Verdict {
    let phi = GrowthFunction::<f64>::default_phi();
    let psi = GrowthFunction::<f64>::default_psi();
    let mut maxima = Vec::new();
    for n in [16, 32] {
        let g = grid(n, PI);
        let fam = PreparedFamily::new(&g, &sample_balls(&g, &BallStrategy::dyadic(4)).unwrap()).unwrap();
        let mut syn = Synth::new(909);
        let mut m: f64 = 0.0;
        for _ in 0..50 {
            let f = syn.trig_poly(&g, 3, true);
            let h = syn.trig_poly(&g, 3, true);
            let num = pointed_campanato_norm(&f.mul(&h), 2.0, &psi, &fam).unwrap().value;
            let den = pointed_campanato_norm(&f, 4.0, &phi, &fam).unwrap().value * pointed_campanato_norm(&h, 4.0, &phi, &fam).unwrap().value;
            m = m.max(num / den);
        }
        maxima.push(m);
    }
    let drift = (maxima[1] / maxima[0] - 1.0).abs();
    verdict(maxima.iter().all(|m| m.is_finite()) && drift <= 0.2, format!("max ratio 16^3 {:.4}, 32^3 {:.4}, drift {drift:.3} (<= 0.2)", maxima[0], maxima[1]))
}

fn c10_riesz_bounded() -> Verdict {
    let psi = GrowthFunction::<f64>::default_psi();
    let mut maxima = Vec::new();
    for n in [16, 32] {
        let g = grid(n, PI);
        let fam = PreparedFamily::new(&g, &sample_balls(&g, &BallStrategy::dyadic(4)).unwrap()).unwrap();
        let mut syn = Synth::new(1010);
        let mut m: f64 = 0.0;
        for _ in 0..50 {
            let f = syn.trig_poly(&g, 3, false);
            let base = pointed_campanato_norm(&f, 4.0, &psi, &fam).unwrap().value;
            for j in 0..3 {
                m = m.max(pointed_campanato_norm(&riesz(&f, j), 4.0, &psi, &fam).unwrap().value / base);
            }
        }
        maxima.push(m);
    }
    let drift = (maxima[1] / maxima[0] - 1.0).abs();
    verdict(maxima.iter().all(|m| m.is_finite()) && drift <= 0.2, format!("max ratio 16^3 {:.4}, 32^3 {:.4}, drift {drift:.3} (<= 0.2)", maxima[0], maxima[1]))
}

/// `∫_r^M φ(x,t)/t dt` for the piecewise power φ, written out by hand.
fn phi_star_star_closed(x: &[f64; 3], r: f64, alpha: f64, alpha_tilde: f64, beta: f64) -> f64 {
    let nx = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let m = nx.max(2.0).max(r);
    let small = if nx <= 2.0 { alpha } else { alpha_tilde };
    let seg = |e: f64, a: f64, b: f64| if b > a { (b.powf(e) - a.powf(e)) / e } else { 0.0 };
    seg(small, r, m.min(2.0)) + seg(beta, r.max(2.0), m)
}

fn c11_phi() -> Verdict {
    let phi = GrowthFunction::<f64>::default_phi();
    let p = *phi.params();
    let g = grid(16, 4.0);
    let fam = sample_balls(&g, &BallStrategy::dyadic(2)).unwrap();
    let (mut lo, mut hi, mut closed) = (f64::INFINITY, 0.0f64, 0.0f64);
    for b in &fam.balls {
        let s = phi.phi_star(&b.center, b.radius).unwrap();
        lo = lo.min(s);
        hi = hi.max(s);
        let got = phi.phi_star_star(&b.center, b.radius).unwrap();
        let want = phi_star_star_closed(&b.center, b.radius, p.alpha, p.alpha_tilde, p.beta);
        closed = closed.max((got - want).abs());
    }
    verdict(hi / lo <= 3.0 && closed <= 1e-10, format!("Phi* in [{lo:.4}, {hi:.4}], c2/c1 = {:.3} (<= 3); Phi** vs closed form {closed:.2e} (<= 1e-10)", hi / lo))
}

fn run_bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nlcrit")).args(args).output().unwrap()
}

fn simulate_and_monitor(root: &Path, tag: &str) -> Vec<u8> {
    let series = root.join(format!("series-{tag}"));
    let csv = root.join(format!("monitor-{tag}.csv"));
    let every = (1.0f64 / 9.0).to_string();
    let sim = run_bin(&[
        "--quiet", "simulate", "--init", "beltrami", "--N", "32", "--L", &PI.to_string(), "--dt", "0.01", "--T", "1", "--snapshot-every", &every,
        "--out", series.to_str().unwrap(),
    ]);
    assert!(sim.status.success(), "{}", String::from_utf8_lossy(&sim.stderr));
    let mon = run_bin(&["--quiet", "monitor", "--series", series.to_str().unwrap(), "--T", "2", "--out", csv.to_str().unwrap()]);
    assert!(mon.status.success(), "{}", String::from_utf8_lossy(&mon.stderr));
    std::fs::read(csv).unwrap()
}

fn c12_end_to_end() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let a = simulate_and_monitor(dir.path(), "a");
    let b = simulate_and_monitor(dir.path(), "b");
    let text = String::from_utf8(a.clone()).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    let violated = rows.iter().filter(|r| !r.ends_with(",ok")).count();
    let identical = a == b;
    verdict(
        rows.len() == 10 && violated == 0 && identical,
        format!("{} rows (10), {violated} rows with functional > threshold (0), byte-identical re-run {identical}", rows.len()),
    )
}

fn main() {
    let criteria: [(u32, fn() -> Verdict); 12] = [
        (1, c1_pressure_cancellation),
        (2, c2_remainder_identity),
        (3, c3_riesz_identities),
        (4, c4_norm_oracle),
        (5, c5_decomposition),
        (6, c6_lemma),
        (7, c7_counterexample),
        (8, c8_solver),
        (9, c9_multiplication),
        (10, c10_riesz_bounded),
        (11, c11_phi),
        (12, c12_end_to_end),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (k, f) in criteria {
        if !only.is_empty() && !only.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {k:>2}: {tag}  {} [{:.1} s]", v.detail, start.elapsed().as_secs_f64());
        if !v.pass {
            failed.push(k);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
