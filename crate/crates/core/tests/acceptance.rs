//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria 1, 2, 10, 11 and 12 are correctness properties and fail the
//! target. Criteria 3 to 9 compare policies on the bundled scenarios; they
//! are reported, and fail the target only with `RTS_ACCEPT_STRICT=1`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{bfs_oracle, bundled};
use rtsim_core::harness::experiment::{jobs, mean_std, run_experiment, run_single, BatchResult, PlotSeries};
use rtsim_core::routing::{Protocol, RepairOutcome};
use rtsim_core::scheduling::{
    compute_eetd, target_delay_dynamic, target_delay_nonlinear, target_delay_static, EtdEstimator, HopContext, Metric,
    Policy, Variant,
};

/// Closed-form examples must match to this absolute error.
const EQ_TOL: f64 = 1e-9;
/// Criterion 3: ordering must hold at this many of the four deadlines.
const ORDER_MIN_POINTS: usize = 3;
/// Criterion 4: largest relative spread of the VMS drop ratio over the sweep.
const VMS_FLAT_REL: f64 = 0.10;
/// Criterion 4: an RTS drop-ratio rise smaller than this many standard
/// errors of the difference counts as seed noise.
const NOISE_Z: f64 = 2.0;
/// Criterion 6: fraction of burst deadlines where DRTS must beat SVM.
const BURST_MIN_FRACTION: f64 = 0.8;
/// Criterion 7: NLRTS must not lose to SRTS at this many deadlines.
const NONLINEAR_MIN_POINTS: usize = 3;
/// Criterion 8: rank α = 0.7 must reach among the four values.
const ALPHA_MAX_RANK: usize = 2;
const ALPHA: f64 = 0.7;

struct Verdict {
    id: u32,
    name: &'static str,
    hard: bool,
    pass: bool,
    detail: String,
}

fn series(b: &BatchResult, v: Variant, p: Protocol) -> PlotSeries {
    b.find(v, p, ALPHA)
        .unwrap_or_else(|| panic!("{} has no {v} {p} series", b.scenario))
}

fn fmt(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
}

fn misses(s: &PlotSeries) -> Vec<f64> {
    s.points.iter().map(|p| p.mean_miss).collect()
}

fn drops(s: &PlotSeries) -> Vec<f64> {
    s.points.iter().map(|p| p.mean_drop).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < EQ_TOL
}

fn equations() -> (bool, String) {
    let hops = Policy::new(Variant::Drts, Metric::Hops);
    let euclid = Policy::new(Variant::Svm, Metric::Euclidean);
    let dvm = Policy::new(Variant::Dvm, Metric::Euclidean);
    let ctx = |deadline, elapsed, src, rem| HopContext {
        deadline,
        elapsed,
        etd: 0.05,
        source_distance: src,
        remaining_distance: rem,
    };
    let mut etd = EtdEstimator::with_initial(0.10, 0.2);
    let checks: Vec<(&str, f64, f64)> = vec![
        ("ewma", etd.update(0.20).unwrap(), 0.12),
        ("eetd meters", compute_eetd(0.05, 500.0, 250.0).unwrap(), 0.1),
        ("eetd hops", compute_eetd(0.05, 4.0, 1.0).unwrap(), 0.2),
        ("eetd at sink", compute_eetd(0.05, 0.0, 250.0).unwrap(), 0.0),
        ("static", target_delay_static(1.0, 0.2, 4.0, 0.7), 0.14),
        ("static zero slack", target_delay_static(0.2, 0.2, 4.0, 0.7), 0.0),
        ("static negative slack", target_delay_static(0.2, 0.5, 4.0, 0.7), 0.0),
        ("dynamic", target_delay_dynamic(1.0, 0.4, 0.1, 2.0, 0.7), 0.175),
        ("dynamic via policy", hops.target_delay(&ctx(1.0, 0.4, 6.0, 2.0)), 0.175),
        ("dynamic expired", target_delay_dynamic(1.0, 1.2, 0.05, 2.0, 0.7), 0.0),
        ("nonlinear hops", target_delay_nonlinear(1.0, 0.2, 3.0, 0.7), 0.07),
        (
            "nonlinear meters",
            target_delay_nonlinear(1.0, 0.2, 500.0 / 250.0, 0.7),
            0.14,
        ),
        ("nonlinear last hop", target_delay_nonlinear(1.0, 0.2, 1.0, 0.7), 0.28),
        (
            "svm velocity",
            euclid.velocity(&ctx(1.0, 0.0, 500.0, 500.0)).unwrap(),
            500.0,
        ),
        (
            "dvm velocity",
            dvm.velocity(&ctx(1.0, 0.75, 500.0, 250.0)).unwrap(),
            1000.0,
        ),
    ];
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| !close(*got, *want))
        .map(|(n, got, want)| format!("{n}: {got} != {want}"))
        .collect();
    // equal split spends exactly α of the slack over the path
    let budget = (0..4).map(|_| target_delay_static(1.0, 0.2, 4.0, 0.7)).sum::<f64>();
    let geometric = (1..=5)
        .map(|h| target_delay_nonlinear(1.0, 0.2, f64::from(h), 0.7))
        .sum::<f64>();
    let mut ok = bad.is_empty();
    ok &= close(budget, 0.7 * 0.8);
    ok &= close(geometric, 0.7 * 0.8 * (1.0 - 0.5f64.powi(5)));
    let detail = if bad.is_empty() {
        format!("{} examples and both budget identities within {EQ_TOL:e}", checks.len())
    } else {
        bad.join("; ")
    };
    (ok, detail)
}

fn main() -> ExitCode {
    let strict = std::env::var("RTS_ACCEPT_STRICT").is_ok_and(|v| v == "1");
    let started = Instant::now();
    let load = |name: &str| {
        let cfg = bundled(name);
        let t = Instant::now();
        let b = run_experiment(&cfg).unwrap();
        eprintln!(
            "  ran {name}: {} runs in {:.1}s",
            b.records.len(),
            t.elapsed().as_secs_f64()
        );
        (cfg, b)
    };
    let (_, grid) = load("paper_grid");
    let (_, random) = load("paper_random");
    let (_, bursty) = load("paper_bursty");
    let (alpha_cfg, alpha) = load("alpha_sweep");
    let (fig_cfg, fig) = load("fig2_repair");
    let mut verdicts = Vec::new();

    let (ok, detail) = equations();
    verdicts.push(Verdict {
        id: 1,
        name: "slack and velocity equations",
        hard: true,
        pass: ok,
        detail,
    });

    let all: Vec<_> = [&grid, &random, &bursty, &alpha, &fig]
        .into_iter()
        .flat_map(|b| &b.records)
        .collect();
    let broken = all
        .iter()
        .filter(|r| !(r.summary.conserves() && r.summary.drop_ratio <= r.summary.miss_ratio))
        .count();
    verdicts.push(Verdict {
        id: 2,
        name: "drop ratio bounds miss ratio",
        hard: true,
        pass: broken == 0,
        detail: format!("{} runs, {broken} violations", all.len()),
    });

    let gf = Protocol::Greedy;
    let sp = Protocol::ShortestPath;
    let (drts, srts, svm, dvm) = (
        series(&grid, Variant::Drts, gf),
        series(&grid, Variant::Srts, gf),
        series(&grid, Variant::Svm, gf),
        series(&grid, Variant::Dvm, gf),
    );
    let (d, s, v, w) = (misses(&drts), misses(&srts), misses(&svm), misses(&dvm));
    let held = (0..d.len()).filter(|&i| d[i] <= s[i] && s[i] <= v[i].min(w[i])).count();
    verdicts.push(Verdict {
        id: 3,
        name: "grid GF: DRTS <= SRTS <= VMS",
        hard: false,
        pass: held >= ORDER_MIN_POINTS,
        detail: format!(
            "held at {held}/{}; miss drts [{}] srts [{}] svm [{}] dvm [{}]",
            d.len(),
            fmt(&d),
            fmt(&s),
            fmt(&v),
            fmt(&w)
        ),
    });

    let spread = |xs: &[f64]| {
        let (m, _) = mean_std(xs);
        let hi = xs.iter().cloned().fold(f64::MIN, f64::max);
        let lo = xs.iter().cloned().fold(f64::MAX, f64::min);
        if m > 0.0 {
            (hi - lo) / m
        } else {
            0.0
        }
    };
    let n = grid.records.iter().filter(|r| r.point == grid.records[0].point).count() as f64;
    let nonincreasing = |s: &PlotSeries| {
        s.points.windows(2).all(|p| {
            let se = ((p[0].std_drop.powi(2) + p[1].std_drop.powi(2)) / n).sqrt();
            p[1].mean_drop - p[0].mean_drop <= NOISE_Z * se
        })
    };
    let (fv, fw) = (spread(&drops(&svm)), spread(&drops(&dvm)));
    let (md, ms) = (nonincreasing(&drts), nonincreasing(&srts));
    verdicts.push(Verdict {
        id: 4,
        name: "VMS drop flat, RTS drop nonincreasing",
        hard: false,
        pass: fv < VMS_FLAT_REL && fw < VMS_FLAT_REL && md && ms,
        detail: format!(
            "spread svm {fv:.3} dvm {fw:.3}; nonincreasing drts {md} srts {ms}; drop drts [{}] srts [{}]",
            fmt(&drops(&drts)),
            fmt(&drops(&srts))
        ),
    });

    let mut lost = Vec::new();
    let mut compared = 0;
    for gs in grid.series() {
        let Some(rs) = random.find(gs.policy, gs.protocol, gs.alpha) else {
            continue;
        };
        for gp in &gs.points {
            if let Some(rp) = rs.at(gp.deadline) {
                compared += 1;
                if rp.mean_miss >= gp.mean_miss {
                    lost.push(format!(
                        "{}/{}@{}: {:.4}>={:.4}",
                        gs.policy, gs.protocol, gp.deadline, rp.mean_miss, gp.mean_miss
                    ));
                }
            }
        }
    }
    verdicts.push(Verdict {
        id: 5,
        name: "random deployment beats grid",
        hard: false,
        pass: compared > 0 && lost.is_empty(),
        detail: format!(
            "{}/{compared} points lower; worst: {}",
            compared - lost.len(),
            lost.iter().take(3).cloned().collect::<Vec<_>>().join(", ")
        ),
    });

    let (bd, bs) = (
        misses(&series(&bursty, Variant::Drts, gf)),
        misses(&series(&bursty, Variant::Svm, gf)),
    );
    let wins = bd.iter().zip(&bs).filter(|(a, b)| a < b).count();
    verdicts.push(Verdict {
        id: 6,
        name: "bursty: DRTS below SVM",
        hard: false,
        pass: wins as f64 >= BURST_MIN_FRACTION * bd.len() as f64,
        detail: format!("{wins}/{} deadlines", bd.len()),
    });

    let nl = misses(&series(&grid, Variant::NlrtsStatic, gf));
    let nl_ok = nl.iter().zip(&s).filter(|(a, b)| a <= b).count();
    let (nl_sp, s_sp) = (
        misses(&series(&grid, Variant::NlrtsStatic, sp)),
        misses(&series(&grid, Variant::Srts, sp)),
    );
    verdicts.push(Verdict {
        id: 7,
        name: "grid GF: NLRTS <= SRTS",
        hard: false,
        pass: nl_ok >= NONLINEAR_MIN_POINTS,
        detail: format!(
            "held at {nl_ok}/{}; miss nlrts [{}] srts [{}] (sp: nlrts [{}] srts [{}])",
            nl.len(),
            fmt(&nl),
            fmt(&s),
            fmt(&nl_sp),
            fmt(&s_sp)
        ),
    });

    let mut by_alpha: Vec<(f64, f64)> = alpha_cfg
        .alphas
        .iter()
        .map(|&a| {
            let s = alpha.find(Variant::Drts, gf, a).unwrap();
            (a, mean_std(&misses(&s)).0)
        })
        .collect();
    by_alpha.sort_by(|x, y| x.1.total_cmp(&y.1));
    let rank = by_alpha
        .iter()
        .position(|(a, _)| *a == ALPHA)
        .map_or(usize::MAX, |r| r + 1);
    verdicts.push(Verdict {
        id: 8,
        name: "alpha 0.7 among the best two",
        hard: false,
        pass: rank <= ALPHA_MAX_RANK,
        detail: format!(
            "rank {rank}; mean miss {}",
            by_alpha
                .iter()
                .map(|(a, m)| format!("a{a}={m:.4}"))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    });

    let (dsp, dgf) = (misses(&series(&grid, Variant::Drts, sp)), d.clone());
    let sp_wins = dsp.iter().zip(&dgf).filter(|(a, b)| a < b).count();
    verdicts.push(Verdict {
        id: 9,
        name: "DRTS: SP below GF",
        hard: false,
        pass: sp_wins == dsp.len(),
        detail: format!("{sp_wins}/{}; miss sp [{}] gf [{}]", dsp.len(), fmt(&dsp), fmt(&dgf)),
    });

    let label = |path: &[usize]| {
        path.iter()
            .map(|&n| fig_cfg.nodes[n].label.clone())
            .collect::<Vec<_>>()
            .join("-")
    };
    let job = jobs(&fig_cfg)[0];
    let with_vn = run_single(&fig_cfg, job, false, true).unwrap();
    let mut flood_cfg = fig_cfg.clone();
    flood_cfg.vn = false;
    let flood = run_single(&flood_cfg, job, false, true).unwrap();
    let (ok, detail) = match with_vn.repairs.first().map(|r| &r.outcome) {
        Some(RepairOutcome::Spliced { vn, path, messages }) => {
            let before = with_vn.deliveries.first().map(|d| label(&d.path)).unwrap_or_default();
            let (a, b) = (with_vn.summary.control_messages, flood.summary.control_messages);
            let ok =
                before == "A-B-H-G-F-E-D" && label(path) == "A-B-H-I-F-E-D" && fig_cfg.nodes[*vn].label == "I" && a < b;
            (
                ok,
                format!(
                    "{before} -> {} via {}; {} msgs vs {b} for rediscovery",
                    label(path),
                    fig_cfg.nodes[*vn].label,
                    messages.len()
                ),
            )
        }
        other => (false, format!("no splice: {other:?}")),
    };
    verdicts.push(Verdict {
        id: 10,
        name: "virtual-node repair replay",
        hard: true,
        pass: ok,
        detail,
    });

    let mut checked = 0;
    let mut bad = Vec::new();
    for name in ["paper_grid", "paper_random"] {
        let cfg = bundled(name);
        for seed in cfg.seeds.iter().copied().take(2) {
            for proto in [sp, gf] {
                let mut job = jobs(&cfg)[0];
                job.seed = seed;
                job.point.protocol = proto;
                job.point.policy = Variant::Drts;
                let out = run_single(&cfg, job, false, true).unwrap();
                let topo = cfg.build_topology(seed).unwrap();
                let sink = topo.position(topo.sink);
                let oracle = bfs_oracle(&topo, topo.sink, cfg.radio_range, |_| true);
                for dl in &out.deliveries {
                    checked += 1;
                    let fine = match proto {
                        Protocol::ShortestPath => oracle[dl.path[0]] == Some(dl.path.len() as u32 - 1),
                        Protocol::Greedy => dl
                            .path
                            .windows(2)
                            .all(|w| topo.position(w[1]).distance(&sink) < topo.position(w[0]).distance(&sink)),
                    };
                    if !fine {
                        bad.push(format!("{name}/{proto}/{seed}: {:?}", dl.path));
                    }
                }
            }
        }
    }
    verdicts.push(Verdict {
        id: 11,
        name: "routing oracles",
        hard: true,
        pass: bad.is_empty() && checked > 0,
        detail: format!(
            "{checked} delivered paths checked (SP hops vs BFS, GF monotone); danger avoidance in tests/oracles.rs; {} bad",
            bad.len()
        ),
    });

    let again = [run_experiment(&alpha_cfg).unwrap(), run_experiment(&fig_cfg).unwrap()];
    let same = again[0].csv() == alpha.csv() && again[1].csv() == fig.csv();
    verdicts.push(Verdict {
        id: 12,
        name: "byte-identical reruns",
        hard: true,
        pass: same,
        detail: format!("alpha_sweep and fig2_repair CSVs rerun: identical={same}"),
    });

    println!();
    for v in &verdicts {
        println!(
            "[{}] {:>2} {:<40} {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.id,
            v.name,
            v.detail
        );
    }
    let hard_fail = verdicts.iter().any(|v| v.hard && !v.pass);
    let soft_fail = verdicts.iter().filter(|v| !v.hard && !v.pass).count();
    println!(
        "acceptance: {}/{} criteria pass ({:.0}s){}",
        verdicts.iter().filter(|v| v.pass).count(),
        verdicts.len(),
        started.elapsed().as_secs_f64(),
        if soft_fail > 0 && !strict {
            " - comparison failures reported, not fatal (set RTS_ACCEPT_STRICT=1)"
        } else {
            ""
        }
    );
    if hard_fail || (strict && soft_fail > 0) {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
