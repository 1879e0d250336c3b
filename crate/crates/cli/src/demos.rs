//! End-to-end replications. Each prints one PASS/FAIL line per sub-check and
//! exits nonzero unless all pass.

use std::path::PathBuf;

use sts_core::closure::{closure_set, is_saturating_set, is_spreading_set};
use sts_core::completion::{random_sts, two_minimal_sizes_sts, CompletionBudget};
use sts_core::constructions::{ag3, perturbed_pg, perturbed_witness, pg2, subsystem_free_sts15};
use sts_core::saturation::{lunelli_sce_min, min_saturating_size_pg, refined_saturating_bound};
use sts_core::spread::{
    check_projective, exact_log2, greedy_spreading_set, is_minimal_spreading_set, log2_bound,
    min_spreading_size, verify_dimension_theorem,
};
use sts_core::TripleSystem;

use crate::commands::{budget_from, completion_report, files_for, szoras_trials};
use crate::report::show_set;
use crate::{CliResult, DemoCmd, Output, Report};

/// Orders used for the random part of the corpus.
pub const RANDOM_ORDERS: [usize; 8] = [7, 9, 13, 15, 19, 21, 25, 27];
pub const RANDOM_COUNT: usize = 30;

/// The named systems every corpus-wide check runs over: PG(d,2) for
/// d = 2..4, AG(d,3) for d = 2..3, a subsystem-free STS(15), the perturbed
/// PG(4,2), and 30 random systems cycling through [`RANDOM_ORDERS`].
pub fn corpus(seed: u64) -> CliResult<Vec<(String, TripleSystem)>> {
    let mut out = Vec::new();
    for d in 2..=4 {
        out.push((format!("pg2({d})"), pg2(d)?));
    }
    for d in 2..=3 {
        out.push((format!("ag3({d})"), ag3(d)?));
    }
    out.push(("sts15-free".into(), subsystem_free_sts15(seed)?));
    out.push(("perturbed-pg(4)".into(), perturbed_pg(4, seed)?));
    for i in 0..RANDOM_COUNT {
        let order = RANDOM_ORDERS[i % RANDOM_ORDERS.len()];
        let s = seed.wrapping_add(i as u64);
        out.push((format!("random({order},{s})"), random_sts(order, s)?));
    }
    Ok(out)
}

pub fn run_demo(what: &DemoCmd, seed: u64) -> CliResult<Output> {
    let mut r = Report::new();
    let mut written = Vec::new();
    match what {
        DemoCmd::Maxofmin { orders } => maxofmin(&mut r, orders.as_deref(), seed)?,
        DemoCmd::Unicity { trials } => unicity(&mut r, *trials, seed)?,
        DemoCmd::Almostmax { dim } => almostmax(&mut r, *dim, seed)?,
        DemoCmd::TwoSizes {
            n,
            budget,
            max_orders,
            out,
        } => {
            let budget = CompletionBudget {
                max_orders: *max_orders,
                ..budget_from(budget)
            };
            written = two_sizes(&mut r, *n, seed, &budget, out.as_ref())?;
        }
        DemoCmd::Szoras { n, trials } => {
            let ns = n.clone().unwrap_or_else(|| vec![2, 3, 4, 5]);
            for n in ns {
                let (id_fail, bound_fail, tested) = szoras_trials(&mut r, n, *trials, seed)?;
                r.check(
                    format!("variance_identity n={n}"),
                    id_fail == 0,
                    format!("{trials} subsets, {id_fail} mismatches"),
                );
                r.check(
                    format!("deviation_bound n={n}"),
                    bound_fail == 0,
                    format!("{tested} applicable, {bound_fail} violations"),
                );
            }
        }
        DemoCmd::Bounds { max_n } => bounds(&mut r, *max_n)?,
    }
    let ok = r.all_checks_pass();
    r.note(format!("RESULT {}", if ok { "PASS" } else { "FAIL" }));
    let mut out = Output::new(r);
    out.written = written;
    Ok(out)
}

fn greedy_check(r: &mut Report, name: &str, ts: &TripleSystem) -> CliResult<()> {
    let g = greedy_spreading_set(ts, None)?;
    let bound = log2_bound(ts.order());
    let spreads = is_spreading_set(ts, &g.witness)?;
    r.check(
        format!("greedy {name}"),
        spreads && g.size <= bound,
        format!("n={} greedy={} bound={bound}", ts.order(), g.size),
    );
    if name.starts_with("pg2") {
        r.check(format!("greedy_equals_bound {name}"), g.size == bound, "");
    }
    Ok(())
}

fn maxofmin(r: &mut Report, orders: Option<&[usize]>, seed: u64) -> CliResult<()> {
    match orders {
        Some(orders) => {
            for (i, &order) in orders.iter().enumerate() {
                let s = seed.wrapping_add(i as u64);
                let ts = random_sts(order, s)?;
                greedy_check(r, &format!("random({order},{s})"), &ts)?;
            }
        }
        None => {
            for (name, ts) in corpus(seed)? {
                greedy_check(r, &name, &ts)?;
            }
        }
    }
    Ok(())
}

fn unicity(r: &mut Report, trials: usize, seed: u64) -> CliResult<()> {
    for (name, ts) in corpus(seed)? {
        if ts.order() > 31 {
            continue;
        }
        let (k, _) = min_spreading_size(&ts)?;
        let extremal = exact_log2(ts.order()) == Some(k);
        let projective = check_projective(&ts)?;
        r.check(
            format!("unicity {name}"),
            extremal == projective,
            format!("n={} min={k} projective={projective}", ts.order()),
        );
    }
    for d in [3, 4] {
        let rep = verify_dimension_theorem(&pg2(d)?, trials, seed)?;
        r.check(
            format!("dimension pg2({d})"),
            rep.passed(),
            format!(
                "{} trials, {} disjoint, {} counterexamples",
                rep.trials,
                rep.disjoint_pairs,
                rep.counterexamples.len()
            ),
        );
    }
    Ok(())
}

fn almostmax(r: &mut Report, dim: usize, seed: u64) -> CliResult<()> {
    let x = perturbed_pg(dim, seed)?;
    let u = perturbed_witness(dim);
    let full = log2_bound(x.order());
    r.field("order", x.order()).field("witness", show_set(&x, &u));
    r.check(
        "witness_minimal_spreading",
        is_minimal_spreading_set(&x, &u)?,
        format!("size {} = {} - 1", u.len(), full),
    );
    r.check("not_projective", !check_projective(&x)?, "");
    if x.order() <= 31 {
        let (k, w) = min_spreading_size(&x)?;
        r.field("min_witness", show_set(&x, &w));
        r.check("min_below_maximum", k <= u.len() && k < full, format!("min={k} < {full}"));
    }
    Ok(())
}

fn two_sizes(
    r: &mut Report,
    n: usize,
    seed: u64,
    budget: &CompletionBudget,
    out: Option<&PathBuf>,
) -> CliResult<Vec<(PathBuf, String)>> {
    let res = two_minimal_sizes_sts(n, seed, budget)?;
    let art = &res.artifacts;
    r.field("partial_order", art.system.order())
        .field("partial_blocks", art.system.triples().len())
        .field("triple", show_set(&res.system, &res.triple))
        .field("base", show_set(&res.system, &res.base));
    for failed in &res.failed_targets {
        r.note(format!(
            "target v={} failed: rejected={} moves={}",
            failed.target_order, failed.rejected, failed.total_iterations
        ));
    }
    completion_report(r, &res.report);
    let c3 = closure_set(&res.system, &res.triple)?;
    let cn = closure_set(&res.system, &res.base)?;
    r.field("closure_sizes", format!("{} {}", c3.len(), cn.len()));
    Ok(match out {
        Some(path) => files_for(&res.system, path),
        None => Vec::new(),
    })
}

fn bounds(r: &mut Report, max_n: usize) -> CliResult<()> {
    r.check("lunelli_sce n=2", lunelli_sce_min(2, 2)? == 4, "4");
    r.check("lunelli_sce n=3", lunelli_sce_min(3, 2)? == 5, "5");
    let rows = (1..=max_n)
        .map(|n| -> CliResult<Vec<String>> {
            Ok(vec![
                n.to_string(),
                lunelli_sce_min(n, 2)?.to_string(),
                refined_saturating_bound(n)?.to_string(),
            ])
        })
        .collect::<CliResult<Vec<_>>>()?;
    r.table(&["n", "lunelli_sce", "refined"], rows);
    for n in [2, 3] {
        let (k, w) = min_saturating_size_pg(n)?;
        let ts = pg2(n)?;
        let sat = is_saturating_set(&ts, &w)?;
        let spreads = is_spreading_set(&ts, &w)?;
        let expected = if n == 2 { k == 4 } else { k >= 5 };
        r.check(
            format!("min_saturating pg2({n})"),
            expected && sat,
            format!("{k} witness {}", show_set(&ts, &w)),
        );
        r.check(format!("saturating_spreads pg2({n})"), spreads, "");
        r.check(
            format!("lower_bound pg2({n})"),
            k as u64 >= lunelli_sce_min(n, 2)?,
            "",
        );
    }
    Ok(())
}
