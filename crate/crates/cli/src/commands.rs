use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sts_core::closure::{closure, enumerate_closed_sets, is_saturating_set};
use sts_core::completion::{complete_partial, random_sts, CompletionBudget, CompletionReport};
use sts_core::constructions::{ag3, perturbed_pg, pg2, section4_partial, subsystem_free_sts15};
use sts_core::format::{parse, parse_labels, serialize, serialize_labels};
use sts_core::saturation::{
    deviating_hyperplane, intersection_extremes, min_saturating_size, min_saturating_size_pg, saturation_bound,
    variance_identity,
};
use sts_core::spread::{
    check_projective, enumerate_minimal_spreading_sets, greedy_spreading_set, is_minimal_spreading_set,
    log2_bound, min_spreading_size, reduce_to_minimal, verify_dimension_theorem,
};
use sts_core::{GeometryTag, PointSet, TripleSystem};

use crate::report::show_set;
use crate::{
    with_suffix, AnalyzeCmd, AnalyzeSaturateCmd, BudgetArgs, CliError, CliResult, ConstructArgs, ConstructKind,
    EmbedArgs, Output, Report, SaturateCmd, SpreadCmd, EXIT_BUDGET,
};

fn need<T: Copy>(value: Option<T>, flag: &str, kind: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("{kind} needs --{flag}")))
}

pub fn build_construction(a: &ConstructArgs, seed: u64) -> CliResult<TripleSystem> {
    Ok(match a.kind {
        ConstructKind::Pg2 => pg2(need(a.dim, "dim", "pg2")?)?,
        ConstructKind::Ag3 => ag3(need(a.dim, "dim", "ag3")?)?,
        ConstructKind::Sts15Free => subsystem_free_sts15(seed)?,
        ConstructKind::PerturbedPg => perturbed_pg(a.dim.unwrap_or(4), seed)?,
        ConstructKind::Section4 => section4_partial(need(a.n, "n", "section4")?)?.system,
        ConstructKind::Random => random_sts(need(a.order, "order", "random")?, seed)?,
    })
}

/// System file plus its label sidecar, if present.
pub fn files_for(ts: &TripleSystem, path: &Path) -> Vec<(PathBuf, String)> {
    let mut files = vec![(path.to_path_buf(), serialize(ts))];
    if let Some(labels) = &ts.tag().labels {
        files.push((with_suffix(path, "labels"), serialize_labels(labels)));
    }
    files
}

pub fn construct(a: &ConstructArgs, seed: u64) -> CliResult<Output> {
    let ts = build_construction(a, seed)?;
    let mut report = Report::new();
    match &a.out {
        None => {
            report.note(serialize(&ts).trim_end());
            Ok(Output::new(report))
        }
        Some(path) => {
            report
                .field("wrote", path.display())
                .field("order", ts.order())
                .field("blocks", ts.triples().len())
                .field("kind", ts.kind())
                .field("tag", ts.tag().variant);
            let mut out = Output::new(report);
            out.written = files_for(&ts, path);
            Ok(out)
        }
    }
}

/// Reads a system file and attaches labels from `<file>.labels` when present.
pub fn load(path: &Path) -> CliResult<(TripleSystem, Vec<PathBuf>)> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let ts = parse(&text)?;
    let mut inputs = vec![path.to_path_buf()];
    let sidecar = with_suffix(path, "labels");
    if sidecar.exists() {
        let text = fs::read_to_string(&sidecar)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", sidecar.display())))?;
        let labels = parse_labels(&text)?;
        let tag = GeometryTag::new(ts.tag().variant, Some(labels));
        inputs.push(sidecar);
        return Ok((ts.with_tag(tag), inputs));
    }
    Ok((ts, inputs))
}

pub fn analyze(path: &Path, what: &AnalyzeCmd, seed: u64) -> CliResult<Output> {
    let (ts, inputs) = load(path)?;
    let mut out = match what {
        AnalyzeCmd::Closure { set, trace } => {
            let s = ts.point_set(set.iter().copied())?;
            let t = closure(&ts, &s)?;
            let mut r = Report::new();
            r.field("set", show_set(&ts, &s))
                .field("closure_size", t.closure().len())
                .field("closure", show_set(&ts, t.closure()))
                .field("spreading", t.closure().is_full())
                .field("steps", t.steps().len() - 1);
            if *trace {
                r.note(t.report().trim_end());
            }
            Output::new(r)
        }
        AnalyzeCmd::Spread { what } => spread(&ts, what)?,
        AnalyzeCmd::Subsystems { budget } => {
            let found = enumerate_closed_sets(&ts, *budget)?;
            let mut r = Report::new();
            r.field("subsystems", found.sets.len()).field("truncated", found.truncated);
            let rows = found
                .sets
                .iter()
                .map(|s| vec![s.len().to_string(), show_set(&ts, s)])
                .collect();
            r.table(&["size", "points"], rows);
            Output::new(r)
        }
        AnalyzeCmd::Projective => spread(&ts, &SpreadCmd::Projective)?,
        AnalyzeCmd::Dimension { trials } => {
            let rep = verify_dimension_theorem(&ts, *trials, seed)?;
            let mut r = Report::new();
            r.field("trials", rep.trials).field("disjoint_pairs", rep.disjoint_pairs);
            for c in &rep.counterexamples {
                r.note(format!("counterexample Y={{{}}} Z={{{}}}: {}", c.y, c.z, c.reason));
            }
            r.check(
                "dimension_theorem",
                rep.passed(),
                format!("{} counterexamples", rep.counterexamples.len()),
            );
            Output::new(r)
        }
        AnalyzeCmd::Saturate { what } => match what {
            AnalyzeSaturateCmd::Min => {
                let (k, w) = min_saturating_size(&ts)?;
                let mut r = Report::new();
                r.field("min_saturating_size", k).field("witness", show_set(&ts, &w));
                Output::new(r)
            }
            AnalyzeSaturateCmd::Check { set } => {
                let s = ts.point_set(set.iter().copied())?;
                let mut r = Report::new();
                r.field("set", show_set(&ts, &s))
                    .field("saturating", is_saturating_set(&ts, &s)?);
                Output::new(r)
            }
        },
    };
    out.inputs = inputs;
    Ok(out)
}

pub fn spread(ts: &TripleSystem, what: &SpreadCmd) -> CliResult<Output> {
    let mut r = Report::new();
    match what {
        SpreadCmd::Greedy { pair } => {
            let pair = pair.as_ref().map(|p| (p[0], p[1]));
            let g = greedy_spreading_set(ts, pair)?;
            let reduced = reduce_to_minimal(ts, &g.witness)?;
            let sizes: Vec<String> = g.closure_sizes.iter().map(|c| c.to_string()).collect();
            r.field("greedy_size", g.size)
                .field("witness", show_set(ts, &g.witness))
                .field("bound", log2_bound(ts.order()))
                .field("closure_sizes", sizes.join(" "))
                .field("reduced_size", reduced.len())
                .field("reduced", show_set(ts, &reduced));
        }
        SpreadCmd::Min => {
            let (k, w) = min_spreading_size(ts)?;
            r.field("min_spreading_size", k).field("witness", show_set(ts, &w));
        }
        SpreadCmd::Enumerate { max_size, budget } => {
            let found = enumerate_minimal_spreading_sets(ts, max_size.unwrap_or(ts.order()), *budget)?;
            r.field("minimal_spreading_sets", found.sets.len())
                .field("truncated", found.truncated);
            let rows = found
                .sets
                .iter()
                .map(|s| vec![s.len().to_string(), show_set(ts, s)])
                .collect();
            r.table(&["size", "points"], rows);
        }
        SpreadCmd::Projective => {
            r.field("projective", check_projective(ts)?);
        }
        SpreadCmd::Minimal { set } => {
            let s = ts.point_set(set.iter().copied())?;
            let ok = is_minimal_spreading_set(ts, &s)?;
            r.field("set", show_set(ts, &s));
            r.check("minimal_spreading", ok, "");
        }
    }
    Ok(Output::new(r))
}

fn random_subset<R: Rng>(rng: &mut R, order: usize) -> PointSet {
    let m = rng.gen_range(0..=order);
    PointSet::from_points(order, sample(rng, order, m)).expect("sampled in range")
}

/// Checks the variance identity and the deviating-hyperplane inequality on
/// one subset of PG(n,2).
pub fn szoras_case(r: &mut Report, n: usize, u: &PointSet, verbose: bool) -> CliResult<(bool, bool)> {
    let (lhs, rhs) = variance_identity(n, u)?;
    let dev = deviating_hyperplane(n, u)?;
    let identity = lhs == rhs;
    let bound = dev.bound_holds.unwrap_or(true);
    if verbose || !identity || !bound {
        r.note(format!(
            "n={n} m={} lhs={lhs} rhs={rhs} deviation={} radicand={}{}",
            u.len(),
            dev.deviation,
            dev.radicand,
            match dev.bound_holds {
                Some(true) => "",
                Some(false) => " bound FAILS",
                None => " (bound vacuous)",
            }
        ));
    }
    Ok((identity, bound))
}

pub fn szoras_trials(r: &mut Report, n: usize, trials: usize, seed: u64) -> CliResult<(usize, usize, usize)> {
    let order = (1usize << (n + 1)) - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    let (mut id_fail, mut bound_fail, mut bound_tested) = (0, 0, 0);
    for _ in 0..trials {
        let u = random_subset(&mut rng, order);
        let (identity, bound) = szoras_case(r, n, &u, false)?;
        id_fail += usize::from(!identity);
        bound_fail += usize::from(!bound);
        bound_tested += usize::from(deviating_hyperplane(n, &u)?.bound_holds.is_some());
    }
    Ok((id_fail, bound_fail, bound_tested))
}

pub fn saturate(what: &SaturateCmd, seed: u64) -> CliResult<Output> {
    let mut r = Report::new();
    match what {
        SaturateCmd::Min { dim } => {
            let (k, w) = min_saturating_size_pg(*dim)?;
            let ts = pg2(*dim)?;
            r.field("min_saturating_size", k).field("witness", show_set(&ts, &w));
        }
        SaturateCmd::Bounds { max_n, q } => {
            let mut rows = Vec::new();
            for n in 1..=*max_n {
                let b = saturation_bound(n, *q)?;
                rows.push(vec![
                    n.to_string(),
                    q.to_string(),
                    b.lunelli_sce_min.to_string(),
                    b.refined_min.map_or("-".into(), |v| v.to_string()),
                ]);
            }
            r.table(&["n", "q", "lunelli_sce", "refined"], rows);
        }
        SaturateCmd::Variance { n, set, trials } => match set {
            Some(points) => {
                let order = (1usize << (n + 1)) - 1;
                let u = PointSet::from_points(order, points.iter().copied())?;
                let (identity, bound) = szoras_case(&mut r, *n, &u, true)?;
                r.check("variance_identity", identity, "");
                r.check("deviation_bound", bound, "");
            }
            None => {
                let (id_fail, bound_fail, tested) = szoras_trials(&mut r, *n, *trials, seed)?;
                r.check("variance_identity", id_fail == 0, format!("{trials} subsets, {id_fail} failures"));
                r.check(
                    "deviation_bound",
                    bound_fail == 0,
                    format!("{tested} applicable, {bound_fail} failures"),
                );
            }
        },
        SaturateCmd::Extremes { n, m, budget } => {
            let e = intersection_extremes(*n, *m, *budget)?;
            let ts = pg2(*n)?;
            r.table(
                &["n", "m", "maxmin", "minmax", "examined", "truncated"],
                vec![vec![
                    n.to_string(),
                    m.to_string(),
                    e.maxmin.to_string(),
                    e.minmax.to_string(),
                    e.examined.to_string(),
                    e.truncated.to_string(),
                ]],
            );
            r.field("maxmin_witness", show_set(&ts, &e.maxmin_witness))
                .field("minmax_witness", show_set(&ts, &e.minmax_witness));
        }
    }
    Ok(Output::new(r))
}

pub fn budget_from(b: &BudgetArgs) -> CompletionBudget {
    CompletionBudget {
        restarts: b.restarts,
        moves_per_restart: b.moves,
        ..CompletionBudget::default()
    }
}

pub fn completion_report(r: &mut Report, c: &CompletionReport) {
    for check in &c.verified {
        r.check(check.name.clone(), check.passed, "");
    }
    for line in c.key_values().lines() {
        if let Some((k, v)) = line.split_once('=') {
            r.field(k, v);
        }
    }
}

pub fn embed(a: &EmbedArgs, seed: u64) -> CliResult<Output> {
    let (ts, inputs) = load(&a.system)?;
    let budget = CompletionBudget {
        allow_small_target: a.allow_small,
        ..budget_from(&a.budget)
    };
    let c = complete_partial(&ts, a.order, seed, &budget)?;
    let mut r = Report::new();
    completion_report(&mut r, &c);
    let mut out = Output::new(r);
    out.inputs = inputs;
    match (&c.system, &a.out) {
        (Some(sys), Some(path)) => out.written = files_for(sys, path),
        (None, _) => out.code = EXIT_BUDGET,
        _ => {}
    }
    if c.system.is_none() {
        out.report.note("no completion within budget");
    }
    Ok(out)
}
