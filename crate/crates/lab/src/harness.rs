//! Experiment drivers: norm ratios, exponent sweeps, decomposition and
//! tree-estimate reports, Littlewood–Paley monitors, A_p tables.

use carleson_core::decomposition::{
    check_well_separated, counting_function, density_decompose, level_set_masses, size_decompose, tree_estimates,
    two_parameter_decompose, DecompositionResult, TopData, TreeRole,
};
use carleson_core::fourier::{
    carleson_maximal, partial_sum, partial_sum_sequence_at, variation_norm, variational_partial_sums,
    variational_truncation, VariationMode,
};
use carleson_core::lepingle::{lepingle_ratio, lp_family, sharp_ratio};
use carleson_core::math::fit_slope;
use carleson_core::phaseplane::{
    bilinear_form_with, build_on_levels, coefficients, density, frequency_cell, model_operator_with, size,
    AdmissibleConstants, DensityMode, Linearization, PacketTable, TileCollection,
};
use carleson_core::weights::{ap_constant, doubling_exponent, power_weight, weighted_lp_norm, DyadicGrid};
use carleson_core::{Complex64, Signal, Weight};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Exponent, ExperimentConfig, FamilySpec, OperatorSpec, WeightSpec};
use crate::error::{LabError, Result};
use crate::families::{generate, random_trig, trial_rng};
use crate::formats::{
    decomposition_from_json, decomposition_to_json, read_weight_csv, recheck_density_certificates, recheck_size_certificates,
};
use crate::report::{num, ExperimentReport, Monitor, Summary, Table, TrialRecord};

pub fn resolve_weight(spec: &WeightSpec, n: usize) -> Result<Weight> {
    match spec {
        WeightSpec::Lebesgue => Ok(Weight::lebesgue(n)?),
        WeightSpec::Power { a } => Ok(power_weight(n, *a)?),
        WeightSpec::Csv { path } => {
            let w = read_weight_csv(path)?;
            if w.len() != n {
                return Err(LabError::Config(format!("weight file has {} samples, grid has {n}", w.len())));
            }
            Ok(w)
        }
    }
}

fn weight_label(spec: &WeightSpec) -> String {
    match spec {
        WeightSpec::Lebesgue => "lebesgue".into(),
        WeightSpec::Power { a } => format!("power({a})"),
        WeightSpec::Csv { path } => format!("csv({})", path.display()),
    }
}

/// `sup_n |S_n f|` computed as the `r = inf` variation with the initial term.
pub fn sup_variation_with_initial(f: &Signal) -> Result<Signal> {
    let values = (0..f.len())
        .map(|j| variation_norm(&partial_sum_sequence_at(f, j), f64::INFINITY, VariationMode::WithInitial))
        .collect::<carleson_core::Result<Vec<f64>>>()?;
    Ok(Signal::from_real(values)?)
}

pub fn apply_operator(op: &OperatorSpec, r: f64, f: &Signal) -> Result<Signal> {
    Ok(match op {
        OperatorSpec::PartialSum { n } => partial_sum(f, *n)?,
        OperatorSpec::VariationalPartialSums => variational_partial_sums(f, r)?,
        OperatorSpec::VariationalTruncation => variational_truncation(f, r)?,
        OperatorSpec::CarlesonMaximal => carleson_maximal(f)?,
    })
}

/// `||op f||_{L^p(w)} / ||f||_{L^p(w)}` over `trials` members of `family`; trial `t`
/// draws from stream `(seed, t)` so the result does not depend on scheduling.
#[allow(clippy::too_many_arguments)]
pub fn estimate_norm_ratio(
    op: &OperatorSpec,
    r: f64,
    p: f64,
    w: &Weight,
    family: &FamilySpec,
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    if trials == 0 {
        return Err(LabError::Config("trials must be at least 1".into()));
    }
    let n = w.len();
    let records = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let f = generate(family, n, t, &mut trial_rng(seed, t))?;
            let den = weighted_lp_norm(&f, p, w)?;
            if den == 0.0 {
                return Ok(TrialRecord { n, trial: t, ratio: None });
            }
            let num = weighted_lp_norm(&apply_operator(op, r, &f)?, p, w)?;
            Ok(TrialRecord { n, trial: t, ratio: Some(num / den) })
        })
        .collect::<Result<Vec<_>>>()?;
    if records.iter().all(|r| r.ratio.is_none()) {
        return Err(LabError::Config("every member of the family has zero norm".into()));
    }
    Ok(records)
}

fn log2_slope(ns: &[usize], values: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).log2()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.log2()).collect();
    fit_slope(&xs, &ys)
}

/// Norm ratio of the configured operator for every grid size.
pub fn norm_ratio_report(cfg: &ExperimentConfig, command: &str) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(cfg.hash(), cfg.seed, command);
    report.annotations = cfg.threshold_annotations();
    let ns = cfg.sizes();
    let mut table = Table::new("norm_ratio", &["n", "weight", "r", "max_ratio", "median_ratio"]);
    let mut maxima = Vec::new();
    for &n in &ns {
        let w = resolve_weight(&cfg.weight, n)?;
        let recs = estimate_norm_ratio(&cfg.operator, cfg.r.0, cfg.p, &w, &cfg.family, cfg.trials, cfg.seed)?;
        let ratios: Vec<f64> = recs.iter().filter_map(|r| r.ratio).collect();
        let s = Summary::of(&ratios);
        table.push(vec![n.to_string(), weight_label(&cfg.weight), cfg.r.to_string(), num(s.max), num(s.median)]);
        maxima.push(s.max);
        report.trials.extend(recs);
    }
    let all: Vec<f64> = report.trials.iter().filter_map(|r| r.ratio).collect();
    report.summary = Summary::of(&all);
    if ns.len() > 1 {
        let slope = log2_slope(&ns, &maxima);
        report.summary.slope = Some(slope);
        report.monitors.push(Monitor::at_most("max_ratio_slope", slope, cfg.thresholds.max_slope));
    }
    report.monitors.push(Monitor::at_most("max_ratio", report.summary.max, cfg.thresholds.max_ratio));
    report.tables.push(table);
    Ok(report)
}

/// Weights of a sweep: power weights over `a_grid`, or the configured weight.
fn sweep_weights(cfg: &ExperimentConfig) -> Vec<(String, WeightSpec)> {
    if cfg.a_grid.is_empty() {
        vec![(weight_label(&cfg.weight), cfg.weight.clone())]
    } else {
        cfg.a_grid.iter().map(|&a| (num(a), WeightSpec::Power { a })).collect()
    }
}

/// Max-ratio table over `(a, r, N)` and fitted growth slope per `(a, r)`.
///
/// Operator outputs do not depend on the weight, so each `(N, r, trial)` is
/// evaluated once. The `r = inf` column is the supremum with initial term and
/// is compared pointwise with the Carleson maximal operator.
pub fn sweep_r(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let ns = cfg.sizes();
    if cfg.r_grid.len() < 2 || ns.len() < 2 {
        return Err(LabError::Config("sweep needs at least two values in r_grid and in n_grid".into()));
    }
    if cfg.trials == 0 {
        return Err(LabError::Config("trials must be at least 1".into()));
    }
    let mut report = ExperimentReport::new(cfg.hash(), cfg.seed, "sweep-r");
    report.annotations = cfg.threshold_annotations();
    let weights = sweep_weights(cfg);
    // maxima[weight][r][n]
    let mut maxima = vec![vec![vec![0.0f64; ns.len()]; cfg.r_grid.len()]; weights.len()];
    let mut inf_gap = 0.0f64;
    for (ni, &n) in ns.iter().enumerate() {
        let ws = weights.iter().map(|(_, spec)| resolve_weight(spec, n)).collect::<Result<Vec<_>>>()?;
        let signals =
            (0..cfg.trials as u64).map(|t| generate(&cfg.family, n, t, &mut trial_rng(cfg.seed, t))).collect::<Result<Vec<_>>>()?;
        for (ri, r) in cfg.r_grid.iter().enumerate() {
            let outputs = signals
                .par_iter()
                .map(|f| {
                    if r.0.is_infinite() {
                        let sup = sup_variation_with_initial(f)?;
                        let max = carleson_maximal(f)?;
                        let gap = sup
                            .samples()
                            .iter()
                            .zip(max.samples())
                            .map(|(a, b)| (a.re - b.re).abs() / b.re.max(1.0))
                            .fold(0.0, f64::max);
                        Ok((sup, gap))
                    } else {
                        Ok((apply_operator(&cfg.operator, r.0, f)?, 0.0))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            inf_gap = outputs.iter().map(|o| o.1).fold(inf_gap, f64::max);
            for (wi, w) in ws.iter().enumerate() {
                for (t, (f, (out, _))) in signals.iter().zip(&outputs).enumerate() {
                    let den = weighted_lp_norm(f, cfg.p, w)?;
                    let ratio = if den > 0.0 { Some(weighted_lp_norm(out, cfg.p, w)? / den) } else { None };
                    maxima[wi][ri][ni] = maxima[wi][ri][ni].max(ratio.unwrap_or(0.0));
                    report.trials.push(TrialRecord { n, trial: t as u64, ratio });
                }
            }
        }
    }
    if report.trials.iter().all(|t| t.ratio.is_none()) {
        return Err(LabError::Config("every member of the family has zero norm".into()));
    }
    let mut cells = Table::new("sweep", &["a", "r", "n", "max_ratio"]);
    let mut slopes = Table::new("slopes", &["a", "r", "slope"]);
    for ((label, _), per_r) in weights.iter().zip(&maxima) {
        let mut row = Vec::new();
        for (r, per_n) in cfg.r_grid.iter().zip(per_r) {
            for (&n, &m) in ns.iter().zip(per_n) {
                cells.push(vec![label.clone(), r.to_string(), n.to_string(), num(m)]);
            }
            let slope = log2_slope(&ns, per_n);
            slopes.push(vec![label.clone(), r.to_string(), num(slope)]);
            row.push(slope);
        }
        // pointwise monotonicity in r suggests slopes decrease along r; recorded, not enforced
        let rises = row.windows(2).filter(|s| s[1] > s[0] + 1e-9).count();
        report.annotations.push(format!("weight {label}: {rises} slope increases along r"));
    }
    if cfg.r_grid.iter().any(|r| r.0.is_infinite()) {
        report.monitors.push(Monitor::at_most("r_inf_vs_maximal_gap", inf_gap, Some(1e-12)));
    }
    if let Some(limit) = cfg.thresholds.max_slope {
        let worst = slopes.numbers("slope").unwrap_or_default().into_iter().fold(f64::NEG_INFINITY, f64::max);
        report.monitors.push(Monitor::at_most("max_slope", worst, Some(limit)));
    }
    let all: Vec<f64> = report.trials.iter().filter_map(|r| r.ratio).collect();
    report.summary = Summary::of(&all);
    report.tables.push(cells);
    report.tables.push(slopes);
    Ok(report)
}

/// `A_p` constants and doubling exponents of the configured weights.
pub fn apconst_report(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(cfg.hash(), cfg.seed, "apconst");
    let mut table = Table::new("ap", &["weight", "n", "p", "ap_constant", "doubling"]);
    let mut ps = vec![1.5, 2.0, 3.0, 4.0];
    if !ps.contains(&cfg.p) {
        ps.push(cfg.p);
        ps.sort_by(f64::total_cmp);
    }
    for (label, spec) in sweep_weights(cfg) {
        for n in cfg.sizes() {
            let w = resolve_weight(&spec, n)?;
            let gamma = doubling_exponent(&w);
            for &p in &ps {
                table.push(vec![label.clone(), n.to_string(), num(p), num(ap_constant(&w, p)?), num(gamma)]);
            }
        }
    }
    report.tables.push(table);
    Ok(report)
}

/// One random instance for the decomposition monitors.
pub struct DecompositionInstance {
    pub coll: TileCollection,
    pub f: Signal,
    pub g: Signal,
    pub w: Weight,
    pub lin: Linearization,
}

pub fn decomposition_instance(cfg: &ExperimentConfig, n: usize, rng: &mut ChaCha8Rng) -> Result<DecompositionInstance> {
    let grid = DyadicGrid::for_len(n);
    let full = build_on_levels(grid, AdmissibleConstants::default(), &cfg.decomposition.levels)?;
    let count = cfg.decomposition.bitiles.min(full.len());
    let mut picks: Vec<usize> = sample(rng, full.len(), count).into_vec();
    picks.sort_unstable();
    let coll = full.select(&picks);
    let f = random_trig(n, n as i64 / 2, rng)?;
    let g = Signal::new((0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())?;
    let half = n as i64 / 2;
    let lin = Linearization::random(n, cfg.r.0, -half, half, rng)?;
    Ok(DecompositionInstance { coll, f, g, w: resolve_weight(&cfg.weight, n)?, lin })
}

/// Per-instance outcome of the certified pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionOutcome {
    pub bitiles: usize,
    pub size_trees: usize,
    pub size_remainder_ok: bool,
    pub witnesses_separated: bool,
    pub density_trees: usize,
    pub density_remainder_ok: bool,
    pub tops_disjoint: bool,
    pub certificate_failures: usize,
    /// `sum w(I_T) / (alpha^{-r'} w(supp g))` for the density selection.
    pub density_mass_ratio: f64,
    /// `|<C_P f, g w> - B_P(f, g)|` relative to `1 + |B_P|`.
    pub operator_path_error: f64,
    /// `|B_P - sum_n B_{P_n}|` relative to `1 + |B_P|`.
    pub reconstruction_error: f64,
    pub levels: usize,
    pub level_bounds_ok: bool,
    pub mass_constant: f64,
    pub tree_core_max: f64,
    pub tree_tail_max: f64,
    pub tree_improved_max: f64,
    /// Fitted slope of `log w({N > lambda})` against `log lambda`.
    pub counting_slope: Option<f64>,
}

pub fn run_decomposition_instance(cfg: &ExperimentConfig, inst: &DecompositionInstance) -> Result<DecompositionOutcome> {
    let DecompositionInstance { coll, f, g, w, lin } = inst;
    let frac = cfg.decomposition.alpha_fraction;
    let mut out = DecompositionOutcome {
        bitiles: coll.len(),
        size_trees: 0,
        size_remainder_ok: true,
        witnesses_separated: true,
        density_trees: 0,
        density_remainder_ok: true,
        tops_disjoint: true,
        certificate_failures: 0,
        density_mass_ratio: 0.0,
        operator_path_error: 0.0,
        reconstruction_error: 0.0,
        levels: 0,
        level_bounds_ok: true,
        mass_constant: 0.0,
        tree_core_max: 0.0,
        tree_tail_max: 0.0,
        tree_improved_max: 0.0,
        counting_slope: None,
    };
    if coll.is_empty() {
        return Ok(out);
    }

    let s = size(coll, f, w)?;
    if s > 0.0 {
        let alpha = frac * s;
        let r = size_decompose(coll, f, w, alpha)?;
        out.size_trees = r.trees.len();
        out.size_remainder_ok = r.is_partition() && size(&r.remainder_collection(coll), f, w)? < alpha;
        out.witnesses_separated = check_well_separated(coll, &r.witness_trees())?.separated;
        out.certificate_failures += r.trees.iter().filter(|t| !t.certificate.holds()).count();
        let tops: Vec<_> = r.trees.iter().map(|t| t.top.interval).collect();
        let counts = counting_function(&tops, 0, w.len());
        let lambdas = [0.5, 1.5, 2.5, 3.5];
        let masses = level_set_masses(&counts, w, &lambdas)?;
        let pts: Vec<(f64, f64)> =
            lambdas.iter().zip(&masses).filter(|(_, &m)| m > 0.0).map(|(&l, &m)| (l.ln(), m.ln())).collect();
        if pts.len() >= 2 {
            let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            out.counting_slope = Some(fit_slope(&xs, &ys));
        }
        for t in r.trees.iter().take(5) {
            let est = tree_estimates(coll, &t.top, &t.members, f, g, w, lin, cfg.decomposition.s, cfg.decomposition.max_shell)?;
            out.tree_core_max = out.tree_core_max.max(est.core);
            out.tree_tail_max = est.tails.iter().map(|x| x.1).fold(out.tree_tail_max, f64::max);
            out.tree_improved_max = out.tree_improved_max.max(est.improved.unwrap_or(0.0));
        }
    }

    let d = density(coll, g, w, lin, DensityMode::Standard)?;
    if d > 0.0 {
        let alpha = frac * d;
        let r = density_decompose(coll, g, w, lin, alpha)?;
        out.density_trees = r.trees.len();
        let rest = density(&r.remainder_collection(coll), g, w, lin, DensityMode::Standard)?;
        out.density_remainder_ok = r.is_partition() && rest <= alpha;
        out.certificate_failures += r.trees.iter().filter(|t| !t.certificate.holds()).count();
        let tops: Vec<&TopData> = r.selected().map(|t| &t.top).collect();
        out.tops_disjoint = tops.iter().enumerate().all(|(i, a)| {
            tops[i + 1..].iter().all(|b| {
                let nested = a.interval.contains(&b.interval) || b.interval.contains(&a.interval);
                !nested || !a.omega().intersects(&b.omega())
            })
        });
        let rc = lin.r_conj();
        let support: f64 =
            g.samples().iter().zip(w.samples()).filter(|(z, _)| z.norm() > 0.0).map(|(_, &v)| v).sum::<f64>() / w.len() as f64;
        let mass: f64 = r.trees.iter().filter(|t| t.role == TreeRole::Selected).map(|t| w.dyadic_mass(t.top.interval)).sum();
        out.density_mass_ratio = mass / (alpha.powf(-rc) * support);
    }

    let coeffs = coefficients(coll, f)?;
    let packets = PacketTable::new(coll)?;
    let all: Vec<usize> = (0..coll.len()).collect();
    let bp = bilinear_form_with(coll, &all, &coeffs, &packets, g, w, lin);
    let cf = model_operator_with(coll, &all, &coeffs, &packets, lin);
    let n = w.len() as f64;
    let direct: Complex64 =
        cf.samples().iter().zip(g.samples()).zip(w.samples()).map(|((c, z), &v)| c * z.conj() * v).sum::<Complex64>() / n;
    out.operator_path_error = (direct - bp).norm() / (1.0 + bp.norm());

    let q0 = cfg.q0.unwrap_or(1.5);
    let two = two_parameter_decompose(coll, f, g, w, lin, q0, cfg.r.0)?;
    out.levels = two.levels.len();
    out.level_bounds_ok = two.is_partition() && two.bounds_hold();
    out.mass_constant = two.max_mass_constant();
    out.certificate_failures += two.levels.iter().flat_map(|l| &l.trees).filter(|t| !t.certificate.holds()).count();
    let parts: Complex64 =
        two.levels.iter().map(|l| bilinear_form_with(coll, &l.members, &coeffs, &packets, g, w, lin)).sum();
    out.reconstruction_error = (parts - bp).norm() / (1.0 + bp.norm());
    Ok(out)
}

/// Certified decomposition pipeline over `trials` generated instances at size `n`.
pub fn run_decomposition_report(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(cfg.hash(), cfg.seed, "report");
    report.annotations = cfg.threshold_annotations();
    let n = cfg.n;
    let outcomes = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let inst = decomposition_instance(cfg, n, &mut trial_rng(cfg.seed, t))?;
            run_decomposition_instance(cfg, &inst)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(
        "decomposition",
        &[
            "trial",
            "bitiles",
            "size_trees",
            "size_ok",
            "separated",
            "density_trees",
            "density_ok",
            "tops_disjoint",
            "certificate_failures",
            "density_mass_ratio",
            "operator_path_error",
            "reconstruction_error",
            "levels",
            "level_bounds_ok",
            "mass_constant",
            "tree_core_max",
            "tree_tail_max",
            "tree_improved_max",
            "counting_slope",
        ],
    );
    for (t, o) in outcomes.iter().enumerate() {
        table.push(vec![
            t.to_string(),
            o.bitiles.to_string(),
            o.size_trees.to_string(),
            o.size_remainder_ok.to_string(),
            o.witnesses_separated.to_string(),
            o.density_trees.to_string(),
            o.density_remainder_ok.to_string(),
            o.tops_disjoint.to_string(),
            o.certificate_failures.to_string(),
            num(o.density_mass_ratio),
            num(o.operator_path_error),
            num(o.reconstruction_error),
            o.levels.to_string(),
            o.level_bounds_ok.to_string(),
            num(o.mass_constant),
            num(o.tree_core_max),
            num(o.tree_tail_max),
            num(o.tree_improved_max),
            o.counting_slope.map(num).unwrap_or_default(),
        ]);
        report.trials.push(TrialRecord { n, trial: t as u64, ratio: (o.bitiles > 0).then_some(o.tree_core_max) });
    }
    let all_ok = |f: fn(&DecompositionOutcome) -> bool| outcomes.iter().all(f);
    let worst = |f: fn(&DecompositionOutcome) -> f64| outcomes.iter().map(f).fold(0.0, f64::max);
    report.monitors.extend([
        Monitor::at_most("certificate_failures", outcomes.iter().map(|o| o.certificate_failures).sum::<usize>() as f64, Some(0.0)),
        Monitor::check("size_remainder_below_alpha", all_ok(|o| o.size_remainder_ok)),
        Monitor::check("witnesses_well_separated", all_ok(|o| o.witnesses_separated)),
        Monitor::check("density_remainder_at_most_alpha", all_ok(|o| o.density_remainder_ok)),
        Monitor::check("density_tops_disjoint", all_ok(|o| o.tops_disjoint)),
        Monitor::check("two_parameter_bounds", all_ok(|o| o.level_bounds_ok)),
        Monitor::at_most("operator_path_error", worst(|o| o.operator_path_error), Some(1e-10)),
        Monitor::at_most("reconstruction_error", worst(|o| o.reconstruction_error), Some(1e-9)),
        Monitor::at_most("density_mass_ratio", worst(|o| o.density_mass_ratio), None),
        Monitor::at_most("mass_constant", worst(|o| o.mass_constant), None),
        Monitor::at_most("tree_core_max", worst(|o| o.tree_core_max), cfg.thresholds.max_ratio),
    ]);
    let cores: Vec<f64> = report.trials.iter().filter_map(|r| r.ratio).collect();
    report.summary = Summary::of(&cores);
    report.tables.push(table);
    Ok(report)
}

/// Size and density decompositions of the first generated instance, serialized for replay.
pub struct DecomposeOutput {
    pub report: ExperimentReport,
    pub size_json: Option<String>,
    pub density_json: Option<String>,
}

pub fn decompose(cfg: &ExperimentConfig) -> Result<DecomposeOutput> {
    let mut report = ExperimentReport::new(cfg.hash(), cfg.seed, "decompose");
    let inst = decomposition_instance(cfg, cfg.n, &mut trial_rng(cfg.seed, 0))?;
    let DecompositionInstance { coll, f, g, w, lin } = &inst;
    let mut table = Table::new("trees", &["kind", "alpha", "level", "index", "xi", "role", "members", "certificate_holds"]);
    let (mut size_json, mut density_json) = (None, None);
    let mut failures = 0usize;
    let s = if coll.is_empty() { 0.0 } else { size(coll, f, w)? };
    if s > 0.0 {
        let alpha = cfg.decomposition.alpha_fraction * s;
        let r = size_decompose(coll, f, w, alpha)?;
        push_trees(&mut table, "size", alpha, &r, &mut failures);
        size_json = Some(decomposition_to_json(coll, &r)?);
    }
    let d = if coll.is_empty() { 0.0 } else { density(coll, g, w, lin, DensityMode::Standard)? };
    if d > 0.0 {
        let alpha = cfg.decomposition.alpha_fraction * d;
        let r = density_decompose(coll, g, w, lin, alpha)?;
        push_trees(&mut table, "density", alpha, &r, &mut failures);
        density_json = Some(decomposition_to_json(coll, &r)?);
    }
    report.monitors.push(Monitor::at_most("certificate_failures", failures as f64, Some(0.0)));
    report.tables.push(table);
    Ok(DecomposeOutput { report, size_json, density_json })
}

fn push_trees(table: &mut Table, kind: &str, alpha: f64, r: &DecompositionResult, failures: &mut usize) {
    for t in &r.trees {
        let holds = t.certificate.holds();
        *failures += usize::from(!holds);
        table.push(vec![
            kind.into(),
            num(alpha),
            t.top.interval.level.to_string(),
            t.top.interval.index.to_string(),
            num(t.top.xi),
            format!("{:?}", t.role).to_lowercase(),
            t.members.len().to_string(),
            holds.to_string(),
        ]);
    }
}

/// Reloads a stored decomposition, regenerates the instance from `cfg` and
/// recomputes every certificate bit for bit.
pub fn replay(cfg: &ExperimentConfig, text: &str) -> Result<ExperimentReport> {
    let (stored, result) = decomposition_from_json(text)?;
    let inst = decomposition_instance(cfg, cfg.n, &mut trial_rng(cfg.seed, 0))?;
    if stored != inst.coll {
        return Err(LabError::Replay("stored collection differs from the one generated by this config".into()));
    }
    recheck_size_certificates(&stored, &result, &inst.f, &inst.w)?;
    recheck_density_certificates(&stored, &result, &inst.g, &inst.w, &inst.lin)?;
    let mut report = ExperimentReport::new(cfg.hash(), cfg.seed, "decompose --replay");
    report.monitors.push(Monitor::check("partition", result.is_partition()));
    report.monitors.push(Monitor::check("certificates_reproduce", true));
    report.annotations.push(format!("{} trees, {} remainder bitiles", result.trees.len(), result.remainder.len()));
    Ok(report)
}

/// Random tree for the tree-estimate monitors.
///
/// The instance is the same continuous object at every `N >= COARSE_LEN`: the
/// anchor bitile is drawn from the band of the coarse grid, `f` is a trigonometric
/// polynomial on fixed frequencies, and `g` and the linearization are piecewise
/// constant on the coarse grid. Larger `N` only refines the sampling.
pub struct TreeInstance {
    pub coll: TileCollection,
    pub top: TopData,
    pub members: Vec<usize>,
    pub f: Signal,
    pub g: Signal,
    pub lin: Linearization,
}

pub const COARSE_LEN: usize = 256;

pub fn random_tree_instance(n: usize, levels: &[u32], r: f64, rng: &mut ChaCha8Rng) -> Result<TreeInstance> {
    let coll = build_on_levels(DyadicGrid::for_len(n), AdmissibleConstants::default(), levels)?;
    let lat = *coll.lattice();
    let m_len = COARSE_LEN.min(n);
    let band = (m_len / 2) as f64;
    let level = levels[rng.random_range(0..levels.len())];
    let position = rng.random_range(0..1u64 << level);
    let window: Vec<usize> = (0..coll.len())
        .filter(|&i| {
            let b = &coll.tiles()[i];
            let o = lat.omega_tilde(b);
            b.level == level && b.position == position && o.lo >= -band - 0.5 && o.hi <= band - 0.5
        })
        .collect();
    if window.is_empty() {
        return Err(LabError::Config(format!("no bitile at level {level} fits the frequency window of N = {m_len}")));
    }
    let anchor = coll.tiles()[window[rng.random_range(0..window.len())]];
    let top_level = rng.random_range(0..=anchor.level);
    let interval = anchor.interval().ancestor(top_level);
    let tilde = lat.omega_tilde(&anchor);
    let width = (1u64 << top_level) as f64;
    // cells of width 2^top_level inside omega~ of the anchor
    let cells: Vec<i64> = (((tilde.lo + 0.5) / width).floor() as i64..=((tilde.hi + 0.5) / width).ceil() as i64)
        .filter(|&m| tilde.contains_interval(&frequency_cell(top_level, m)))
        .collect();
    let cell = frequency_cell(top_level, cells[rng.random_range(0..cells.len())]);
    let top = TopData { interval, xi: cell.center() };
    let members: Vec<usize> = (0..coll.len())
        .filter(|&i| {
            let b = &coll.tiles()[i];
            interval.contains(&b.interval()) && lat.omega_tilde(b).contains_interval(&cell)
        })
        .collect();

    let span = 4 * lat.omega(&anchor).len() as i64;
    let centre = top.xi.round() as i64;
    let half = m_len as i64 / 2;
    let (lo, hi) = ((centre - span).max(-half), (centre + span).min(half - 1));
    let pairs: Vec<(i64, Complex64)> =
        (lo..=hi).map(|k| (k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))).collect();
    let f = carleson_core::fourier::idft(&carleson_core::Spectrum::from_pairs(n, &pairs)?);
    let coarse_g: Vec<Complex64> =
        (0..m_len).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let g = Signal::new((0..n).map(|i| coarse_g[i * m_len / n]).collect())?;
    let coarse_lin = Linearization::random(m_len, r, lo, hi.max(lo + 5), rng)?;
    let lin = Linearization::new(r, (0..n).map(|i| coarse_lin.point(i * m_len / n).clone()).collect())?;
    Ok(TreeInstance { coll, top, members, f, g, lin })
}

/// Max core, annulus and improved ratios over random trees per `(N, weight)`, with slopes across `N`.
pub fn tree_estimate_report(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let ns = cfg.sizes();
    let mut report = ExperimentReport::new(cfg.hash(), cfg.seed, "tree-estimate");
    let mut cells = Table::new("tree_estimates", &["weight", "n", "core", "tail", "improved"]);
    let mut slopes = Table::new("tree_estimate_slopes", &["weight", "core", "tail", "improved"]);
    let s = cfg.decomposition.s;
    for (label, spec) in sweep_weights(cfg) {
        let mut maxima: Vec<[f64; 3]> = Vec::new();
        for &n in &ns {
            let w = resolve_weight(&spec, n)?;
            let per = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| {
                    let inst = random_tree_instance(n, &cfg.decomposition.levels, cfg.r.0, &mut trial_rng(cfg.seed, t))?;
                    let est = tree_estimates(
                        &inst.coll,
                        &inst.top,
                        &inst.members,
                        &inst.f,
                        &inst.g,
                        &w,
                        &inst.lin,
                        s,
                        cfg.decomposition.max_shell,
                    )?;
                    let tail = est.tails.iter().map(|x| x.1).fold(0.0, f64::max);
                    Ok([est.core, tail, est.improved.unwrap_or(0.0)])
                })
                .collect::<Result<Vec<_>>>()?;
            let m = per.iter().fold([0.0f64; 3], |a, b| [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])]);
            cells.push(vec![label.clone(), n.to_string(), num(m[0]), num(m[1]), num(m[2])]);
            for (t, v) in per.iter().enumerate() {
                report.trials.push(TrialRecord { n, trial: t as u64, ratio: Some(v[0]) });
            }
            maxima.push(m);
        }
        if ns.len() > 1 {
            let sl: Vec<f64> = (0..3)
                .map(|k| {
                    let v: Vec<f64> = maxima.iter().map(|m| m[k]).collect();
                    if v.iter().all(|&x| x > 0.0) { log2_slope(&ns, &v) } else { 0.0 }
                })
                .collect();
            slopes.push(vec![label.clone(), num(sl[0]), num(sl[1]), num(sl[2])]);
            for (k, name) in ["core", "tail", "improved"].iter().enumerate() {
                report.monitors.push(Monitor::at_most(&format!("{label} {name} slope |.|"), sl[k].abs(), Some(0.2)));
            }
        }
    }
    let all: Vec<f64> = report.trials.iter().filter_map(|r| r.ratio).collect();
    report.summary = Summary::of(&all);
    report.tables.push(cells);
    report.tables.push(slopes);
    Ok(report)
}

/// Max Lépingle ratio per `(weight, N, r, p)` over families built from the configured signals.
#[allow(clippy::too_many_arguments)]
pub fn lepingle_table(
    weights: &[(String, WeightSpec)],
    ns: &[usize],
    rs: &[Exponent],
    ps: &[f64],
    c: f64,
    family: &FamilySpec,
    trials: usize,
    seed: u64,
) -> Result<Table> {
    let mut table = Table::new("lepingle", &["weight", "n", "r", "p", "max_ratio", "max_sharp_ratio"]);
    for (label, spec) in weights {
        for &n in ns {
            let w = resolve_weight(spec, n)?;
            let fams = (0..trials as u64)
                .into_par_iter()
                .map(|t| Ok(lp_family(&generate(family, n, t, &mut trial_rng(seed, t))?, c)?))
                .collect::<Result<Vec<_>>>()?;
            for r in rs {
                let sharp = fams
                    .par_iter()
                    .map(|fam| Ok(sharp_ratio(fam, r.0, 1.5)?))
                    .collect::<Result<Vec<f64>>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                for &p in ps {
                    let m = fams
                        .par_iter()
                        .map(|fam| Ok(lepingle_ratio(fam, r.0, p, &w)?.value))
                        .collect::<Result<Vec<f64>>>()?
                        .into_iter()
                        .fold(0.0, f64::max);
                    table.push(vec![label.clone(), n.to_string(), r.to_string(), num(p), num(m), num(sharp)]);
                }
            }
        }
    }
    Ok(table)
}

pub fn lepingle_report(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(cfg.hash(), cfg.seed, "lepingle");
    let rs = if cfg.r_grid.is_empty() { vec![cfg.r] } else { cfg.r_grid.clone() };
    let table = lepingle_table(
        &sweep_weights(cfg),
        &cfg.sizes(),
        &rs,
        &[cfg.p],
        cfg.lepingle.c,
        &cfg.family,
        cfg.trials,
        cfg.seed,
    )?;
    let maxima = table.numbers("max_ratio").unwrap_or_default();
    report.summary = Summary::of(&maxima);
    report.monitors.push(Monitor::at_most("max_ratio", report.summary.max, cfg.thresholds.max_ratio));
    report.tables.push(table);
    Ok(report)
}
