use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use spincool_core::analysis::{
    fit_gap_scaling, log_grid, phase_point, two_spin_diagonal, two_spin_reference, GapEntry, GapSeries, PhasePoint,
    ScalingModel,
};
use spincool_core::correlation::{
    all_down, build_generator, dense_spectrum, evolve, infinite_temperature, leading_spectrum, CorrelationState,
    Generator, Scenario, SpectrumResult,
};
use spincool_core::jump_algebra::{
    check_closure_antisymmetric, check_closure_symmetric, AntisymmetricBilocalCoefficients, ClosureReport, JumpKind,
    SymmetricBilocalCoefficients, C3,
};
use spincool_core::lattice::{BoundaryCondition, GeometryKind, Lattice, LatticeGeometry, PairMode};
use spincool_core::oracle::{channels_from_density, evolve_exact, DensityMatrix, LindbladSpec};

use crate::config::{Command, InitialState, RunConfig};
use crate::output::{fmt_f64, ArtifactWriter};

pub fn run(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Value> {
    match cfg.command {
        Command::Evolve => run_evolve(cfg, out),
        Command::Gap => run_gap(cfg, out),
        Command::GapScan => run_gap_scan(cfg, out),
        Command::Spectrum => run_spectrum(cfg, out),
        Command::PhaseDiagram => run_phase_diagram(cfg, out),
        Command::ClosureCheck => run_closure_check(cfg, out),
        Command::OracleCompare => run_oracle_compare(cfg, out),
        Command::TwoSpin => run_two_spin(cfg, out),
    }
}

/// Geometry, boundary condition and pair mode; validation guarantees they parse.
fn lattice_parts(cfg: &RunConfig) -> (GeometryKind, BoundaryCondition, PairMode) {
    (cfg.geometry().expect("validated"), cfg.bc().expect("validated"), cfg.pair_mode().expect("validated"))
}

fn build_lattice(kind: GeometryKind, extent: usize, bc: BoundaryCondition) -> Result<Lattice> {
    Lattice::new(LatticeGeometry::new(kind, extent), bc).with_context(|| format!("building {kind} L={extent} ({bc})"))
}

fn configured_lattice(cfg: &RunConfig) -> Result<(Lattice, PairMode)> {
    let (kind, bc, mode) = lattice_parts(cfg);
    Ok((build_lattice(kind, cfg.lattice.extent.expect("validated"), bc)?, mode))
}

fn initial_state(cfg: &RunConfig, g: &Generator) -> CorrelationState {
    match cfg.numerics.initial {
        InitialState::InfiniteTemperature => infinite_temperature(g.scenario(), g.index()),
        InitialState::AllDown => all_down(g.scenario(), g.index()),
        InitialState::Random => unreachable!("rejected by validation"),
    }
}

/// Labels each flat index with its channel and the index within that channel.
fn flat_labels(g: &Generator) -> Vec<(&'static str, usize)> {
    let layout = g.layout();
    (0..g.dim())
        .map(|i| {
            let ch = layout.channel_at(i);
            (ch.name(), i - layout.offset(ch).expect("channel"))
        })
        .collect()
}

fn index_manifest(g: &Generator) -> Value {
    let index = g.index();
    json!({
        "pair_mode": index.mode(),
        "pairs": index.representatives(),
        "pair_multiplicities": index.multiplicities(),
        "site_representatives": (0..index.n_site_classes()).map(|c| index.site_representative(c)).collect::<Vec<_>>(),
        "site_multiplicities": index.site_multiplicities(),
    })
}

fn run_evolve(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Value> {
    let (la, mode) = configured_lattice(cfg)?;
    let g = build_generator(&la, cfg.scenario(), mode)?;
    let init = initial_state(cfg, &g);
    let times = cfg.numerics.times.times();
    let states = evolve(&g, &init, &times)?;
    let labels = flat_labels(&g);
    let rows = times.iter().zip(&states).flat_map(|(t, s)| {
        labels
            .iter()
            .zip(&s.values)
            .map(move |((ch, i), v)| vec![fmt_f64(*t), ch.to_string(), i.to_string(), fmt_f64(*v)])
    });
    out.csv(
        "trajectory.csv",
        "off-diagonal correlation channels; pair index refers to trajectory.json pairs, S3 index to site classes",
        &["tau", "channel", "pair_or_site_index", "value"],
        rows,
    )?;
    let condensate: Vec<f64> = states.iter().map(|s| g.condensate(s)).collect();
    out.csv(
        "condensate.csv",
        "zero-momentum weight (1/N^2) sum_xy C_xy",
        &["tau", "condensate"],
        times.iter().zip(&condensate).map(|(t, c)| vec![fmt_f64(*t), fmt_f64(*c)]),
    )?;
    let sidecar = json!({
        "scenario": g.scenario(),
        "initial": cfg.numerics.initial,
        "lattice": g.lattice(),
        "channels": g.layout().channels,
        "index": index_manifest(&g),
        "times": times.len(),
    });
    out.json("trajectory.json", "scenario parameters, lattice and pair index of trajectory.csv", &sidecar)?;
    Ok(json!({
        "dim": g.dim(),
        "final_condensate": condensate.last(),
        "max_bound_violation": states.iter().map(|s| s.bound_violation()).fold(0.0, f64::max),
    }))
}

fn spectrum_rows(s: &SpectrumResult) -> impl Iterator<Item = Vec<String>> + '_ {
    s.eigenvalues.iter().enumerate().map(|(i, z)| vec![i.to_string(), fmt_f64(z.re), fmt_f64(z.im)])
}

fn spectrum_summary(g: &Generator, s: &SpectrumResult) -> Value {
    json!({
        "n_sites": g.lattice().n_sites,
        "dim": g.dim(),
        "gap": s.gap,
        "zero_modes": s.zero_modes,
        "tol_zero": s.tol_zero,
        "eigenvalues": s.eigenvalues.len(),
        "blocks": s.blocks,
    })
}

fn run_gap(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Value> {
    let (la, mode) = configured_lattice(cfg)?;
    let g = build_generator(&la, cfg.scenario(), mode)?;
    let s = leading_spectrum(&g, cfg.numerics.k.min(g.dim()))?;
    out.csv(
        "spectrum.csv",
        "leading eigenvalues of the correlation generator",
        &["index", "re", "im"],
        spectrum_rows(&s),
    )?;
    let summary = spectrum_summary(&g, &s);
    out.json("gap.json", "dissipative gap and solver report", &summary)?;
    Ok(summary)
}

fn run_spectrum(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Value> {
    let (la, mode) = configured_lattice(cfg)?;
    let g = build_generator(&la, cfg.scenario(), mode)?;
    let s = match cfg.numerics.k {
        0 => dense_spectrum(&g)?,
        k => leading_spectrum(&g, k.min(g.dim()))?,
    };
    out.csv("spectrum.csv", "eigenvalues of the correlation generator", &["index", "re", "im"], spectrum_rows(&s))?;
    let summary = spectrum_summary(&g, &s);
    out.json("spectrum.json", "spectrum summary and solver report", &summary)?;
    Ok(summary)
}

fn run_gap_scan(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Value> {
    let (kind, bc, mode) = lattice_parts(cfg);
    let scenario = cfg.scenario();
    let entries = cfg
        .lattice
        .sizes
        .par_iter()
        .map(|&l| {
            let la = build_lattice(kind, l, bc)?;
            let g = build_generator(&la, scenario, mode)?;
            let gap = leading_spectrum(&g, 2).with_context(|| format!("gap at L={l}"))?.gap;
            Ok(GapEntry { geometry: kind, bc, n_sites: la.n_sites(), extent: l, gap })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut series = GapSeries::new(scenario);
    for e in &entries {
        series.push(*e)?;
    }
    out.csv(
        "gaps.csv",
        "dissipative gap per linear size",
        &["geometry", "bc", "L", "N", "gap"],
        entries.iter().map(|e| {
            vec![e.geometry.to_string(), e.bc.to_string(), e.extent.to_string(), e.n_sites.to_string(), fmt_f64(e.gap)]
        }),
    )?;
    let fits: Vec<Value> = [ScalingModel::PowerLaw, ScalingModel::PowerLog]
        .into_iter()
        .map(|model| match fit_gap_scaling(&series, model) {
            Ok(f) => json!({
                "model": model.name(),
                "z": f.z,
                "amplitude": f.amplitude,
                "log_scale": f.log_scale,
                "residual": f.residual,
                "window": f.window,
            }),
            Err(e) => json!({ "model": model.name(), "error": e.to_string() }),
        })
        .collect();
    out.json("fit.json", "least-squares fits of 1/gap over the largest half-decade of sizes", &fits)?;
    Ok(json!({ "sizes": entries.len(), "fits": fits }))
}

fn run_phase_diagram(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Value> {
    let (la, mode) = configured_lattice(cfg)?;
    let num = &cfg.numerics;
    let gks = log_grid(num.gamma_over_kappa.lo, num.gamma_over_kappa.hi, num.gamma_over_kappa.count);
    let temps = log_grid(num.t_over_h.lo, num.t_over_h.hi, num.t_over_h.count);
    let grid: Vec<(f64, f64)> = gks.iter().flat_map(|&gk| temps.iter().map(move |&t| (gk, t))).collect();
    let points = grid
        .par_iter()
        .map(|&(gk, t)| phase_point(&la, mode, gk, t))
        .collect::<spincool_core::Result<Vec<PhasePoint>>>()?;
    out.csv(
        "phase.csv",
        "steady-state condensate over the (gamma/kappa, T/h) grid, T/h varying fastest",
        &["gamma_over_kappa", "T_over_h", "n_T", "condensate"],
        points
            .iter()
            .map(|p| vec![fmt_f64(p.gamma_over_kappa), fmt_f64(p.t_over_h), fmt_f64(p.n_t), fmt_f64(p.condensate)]),
    )?;
    let best = points.iter().max_by(|a, b| a.condensate.total_cmp(&b.condensate)).expect("nonempty grid");
    Ok(json!({
        "n_sites": la.n_sites(),
        "points": points.len(),
        "max_condensate": best.condensate,
        "max_at": { "gamma_over_kappa": best.gamma_over_kappa, "T_over_h": best.t_over_h },
    }))
}

fn random_c3(rng: &mut ChaCha8Rng) -> C3 {
    std::array::from_fn(|_| {
        let r = rng.random::<f64>().sqrt();
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        Complex64::from_polar(r, phi)
    })
}

fn run_closure_check(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Value> {
    let spec = cfg.jump.spec().map_err(anyhow::Error::msg)?;
    let tol = cfg.numerics.closure_tol;
    let check = |kind: &JumpKind| -> Result<ClosureReport> {
        Ok(match kind {
            JumpKind::Symmetric(c) => check_closure_symmetric(c, tol),
            JumpKind::Antisymmetric(c) => check_closure_antisymmetric(c, tol),
            _ => bail!("closure conditions apply to bilocal symmetric or antisymmetric operators"),
        })
    };
    let report = check(&spec.kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.numerics.seed);
    let (mut closing, mut consistent) = (0usize, 0usize);
    for _ in 0..cfg.numerics.random_samples {
        let kind = match spec.kind {
            JumpKind::Symmetric(_) => JumpKind::Symmetric(SymmetricBilocalCoefficients {
                l0: rng.random_range(-1.0..1.0),
                l: random_c3(&mut rng),
                a: random_c3(&mut rng),
                b: random_c3(&mut rng),
            }),
            _ => JumpKind::Antisymmetric(AntisymmetricBilocalCoefficients {
                l: random_c3(&mut rng),
                k: random_c3(&mut rng),
            }),
        };
        let r = check(&kind)?;
        closing += usize::from(r.passed);
        consistent += usize::from(r.consistent);
    }
    let summary = json!({
        "passed": report.passed,
        "consistent_with_brute_force": report.consistent,
        "max_residual": report.max_residual,
        "brute_force_max_m2": report.brute_force_max_m2,
        "random": {
            "samples": cfg.numerics.random_samples,
            "seed": cfg.numerics.seed,
            "closing": closing,
            "consistent_with_brute_force": consistent,
        },
    });
    out.json(
        "closure.json",
        "closure report of the configured jump operator",
        &json!({ "report": report, "summary": summary }),
    )?;
    Ok(summary)
}

/// `A A† / tr(A A†)` with entries of `A` uniform in the unit square.
fn random_density(rng: &mut ChaCha8Rng, n: usize) -> Result<DensityMatrix> {
    let dim = 1usize << n;
    let a: Vec<Complex64> =
        (0..dim * dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for j in 0..dim {
        for i in 0..dim {
            data[j * dim + i] = (0..dim).map(|k| a[k * dim + i] * a[k * dim + j].conj()).sum();
        }
    }
    let tr: Complex64 = (0..dim).map(|i| data[i * dim + i]).sum();
    Ok(DensityMatrix::from_column_major(n, data.into_iter().map(|v| v / tr).collect())?)
}

fn run_oracle_compare(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Value> {
    let (kind, bc, _) = lattice_parts(cfg);
    let la = build_lattice(kind, cfg.lattice.extent.expect("validated"), bc)?;
    let n = la.n_sites();
    let scenario = cfg.scenario();
    // The oracle state carries no symmetry, so the engine runs on every pair.
    let g = build_generator(&la, scenario, PairMode::FullPairs)?;
    let spec = LindbladSpec::for_scenario(&la, scenario)?;
    let rho0 = match cfg.numerics.initial {
        InitialState::InfiniteTemperature => DensityMatrix::maximally_mixed(n),
        InitialState::AllDown => {
            let mut ket = vec![Complex64::new(0.0, 0.0); 1 << n];
            ket[(1 << n) - 1] = Complex64::new(1.0, 0.0);
            DensityMatrix::pure(n, &ket)?
        }
        InitialState::Random => random_density(&mut ChaCha8Rng::seed_from_u64(cfg.numerics.seed), n)?,
    };
    let times = cfg.numerics.times.times();
    let init = channels_from_density(&rho0, &g, 0.0)?;
    let engine = evolve(&g, &init, &times)?;
    let exact = evolve_exact(&spec, &rho0, &times)?;
    let channels = &g.layout().channels;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for ((t, e), r) in times.iter().zip(&engine).zip(&exact) {
        let o = channels_from_density(r, &g, *t)?;
        for &ch in channels {
            let dev = e
                .channel(ch)
                .expect("channel")
                .iter()
                .zip(o.channel(ch).expect("channel"))
                .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
            worst = worst.max(dev);
            rows.push(vec![fmt_f64(*t), ch.name().to_string(), fmt_f64(dev)]);
        }
    }
    out.csv(
        "deviation.csv",
        "max |engine - exact Lindblad| per channel and time",
        &["tau", "channel", "max_abs_deviation"],
        rows,
    )?;
    let summary = json!({
        "n_sites": n,
        "scenario": scenario,
        "initial": cfg.numerics.initial,
        "seed": cfg.numerics.seed,
        "max_deviation": worst,
        "lattice": la.description(),
    });
    out.json("comparison.json", "engine vs exact Lindblad summary", &summary)?;
    Ok(summary)
}

fn run_two_spin(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Value> {
    let Scenario::Field { eta } = cfg.scenario() else { unreachable!("rejected by validation") };
    let times = cfg.numerics.times.times();
    let la = build_lattice(GeometryKind::Chain, 2, BoundaryCondition::Open)?;
    let exact = evolve_exact(
        &LindbladSpec::for_scenario(&la, Scenario::Field { eta })?,
        &DensityMatrix::maximally_mixed(2),
        &times,
    )?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (&t, rho) in times.iter().zip(&exact) {
        let reference = two_spin_reference(eta, t)?;
        let dev = reference.rho.max_abs_diff(rho);
        worst = worst.max(dev);
        let d = two_spin_diagonal(eta, t);
        rows.push(
            [t, d.t_plus, d.t_minus, d.t_zero, d.singlet, reference.correlation_c, dev]
                .iter()
                .map(|v| fmt_f64(*v))
                .collect(),
        );
    }
    out.csv(
        "two_spin.csv",
        "closed-form two-spin populations from the maximally mixed state, with deviation from the exact solver",
        &["tau", "t_plus", "t_minus", "t_zero", "singlet", "correlation_c", "oracle_deviation"],
        rows,
    )?;
    let summary = json!({ "eta": eta, "max_oracle_deviation": worst });
    out.json("two_spin.json", "two-spin summary", &summary)?;
    Ok(summary)
}
