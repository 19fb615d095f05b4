use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{ExperimentError, SimError};
use crate::harness::config::ScenarioConfig;
use crate::harness::traffic::build_workload;
use crate::metrics::{csv_row, RunKey, Summary, CSV_HEADER};
use crate::routing::Protocol;
use crate::scheduling::Variant;
use crate::sim::{simulate, RunOutput};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "RTS_SIM_OUT";

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("results"), PathBuf::from)
}

/// One point of the batch before seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub policy: Variant,
    pub protocol: Protocol,
    pub alpha: f64,
    pub deadline: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    pub point: SweepPoint,
    pub seed: u64,
}

/// Every run of the batch, in output order: policy, routing, alpha,
/// deadline, then seed varying fastest.
pub fn jobs(cfg: &ScenarioConfig) -> Vec<Job> {
    let mut out = Vec::with_capacity(cfg.run_count());
    for &policy in &cfg.policies {
        for &protocol in &cfg.protocols {
            for &alpha in &cfg.alphas {
                for &deadline in &cfg.deadlines {
                    for &seed in &cfg.seeds {
                        out.push(Job {
                            point: SweepPoint {
                                policy,
                                protocol,
                                alpha,
                                deadline,
                            },
                            seed,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Run a single simulation of the scenario.
pub fn run_single(cfg: &ScenarioConfig, job: Job, trace: bool, record_paths: bool) -> Result<RunOutput, SimError> {
    let topo = cfg.build_topology(job.seed)?;
    let workload = build_workload(cfg, &topo, job.seed);
    let p = job.point;
    let mut rc = cfg.run_config(p.policy, p.protocol, p.alpha, p.deadline, job.seed);
    rc.trace = trace;
    rc.record_paths = record_paths;
    simulate(topo, &workload, rc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub key: RunKey,
    pub point: SweepPoint,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotPoint {
    pub deadline: f64,
    pub mean_miss: f64,
    pub std_miss: f64,
    pub mean_drop: f64,
    pub std_drop: f64,
}

/// Seed-aggregated miss and drop ratios of one (policy, routing, alpha)
/// combination across the deadline sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub policy: Variant,
    pub protocol: Protocol,
    pub alpha: f64,
    pub points: Vec<PlotPoint>,
}

impl PlotSeries {
    pub fn file_name(&self, scenario: &str) -> String {
        format!("{scenario}_{}_{}_a{}.dat", self.policy, self.protocol, self.alpha)
    }

    pub fn render(&self) -> String {
        let mut s = String::from("# deadline mean_miss std_miss mean_drop std_drop\n");
        for p in &self.points {
            s.push_str(&format!(
                "{} {:.6} {:.6} {:.6} {:.6}\n",
                p.deadline, p.mean_miss, p.std_miss, p.mean_drop, p.std_drop
            ));
        }
        s
    }

    pub fn at(&self, deadline: f64) -> Option<&PlotPoint> {
        self.points.iter().find(|p| p.deadline == deadline)
    }
}

/// Sample mean and standard deviation (n - 1 denominator; 0 for one value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub scenario: String,
    pub records: Vec<RunRecord>,
}

impl BatchResult {
    pub fn csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.records {
            s.push_str(&csv_row(&r.key, &r.summary));
            s.push('\n');
        }
        s
    }

    pub fn series(&self) -> Vec<PlotSeries> {
        let mut out: Vec<PlotSeries> = Vec::new();
        for r in &self.records {
            let p = r.point;
            let idx = match out
                .iter()
                .position(|s| s.policy == p.policy && s.protocol == p.protocol && s.alpha == p.alpha)
            {
                Some(i) => i,
                None => {
                    out.push(PlotSeries {
                        policy: p.policy,
                        protocol: p.protocol,
                        alpha: p.alpha,
                        points: Vec::new(),
                    });
                    out.len() - 1
                }
            };
            let series = &mut out[idx];
            if series.at(p.deadline).is_none() {
                let runs: Vec<&RunRecord> = self.records.iter().filter(|o| o.point == p).collect();
                let miss: Vec<f64> = runs.iter().map(|o| o.summary.miss_ratio).collect();
                let drop: Vec<f64> = runs.iter().map(|o| o.summary.drop_ratio).collect();
                let (mean_miss, std_miss) = mean_std(&miss);
                let (mean_drop, std_drop) = mean_std(&drop);
                series.points.push(PlotPoint {
                    deadline: p.deadline,
                    mean_miss,
                    std_miss,
                    mean_drop,
                    std_drop,
                });
            }
        }
        out
    }

    /// Seed-averaged series for one combination.
    pub fn find(&self, policy: Variant, protocol: Protocol, alpha: f64) -> Option<PlotSeries> {
        self.series()
            .into_iter()
            .find(|s| s.policy == policy && s.protocol == protocol && s.alpha == alpha)
    }

    /// Write `<scenario>.csv` and one plot-data file per series into `dir`.
    pub fn write(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.scenario));
        fs::write(&csv_path, self.csv())?;
        let mut written = vec![csv_path];
        for s in self.series() {
            let path = dir.join(s.file_name(&self.scenario));
            fs::write(&path, s.render())?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Run every (sweep point, seed) of the scenario. Runs execute in parallel;
/// records come back in `jobs` order.
pub fn run_experiment(cfg: &ScenarioConfig) -> Result<BatchResult, ExperimentError> {
    let records = jobs(cfg)
        .into_par_iter()
        .map(|job| {
            let p = job.point;
            let out = run_single(cfg, job, false, false).map_err(|source| ExperimentError::Run {
                policy: p.policy.to_string(),
                routing: p.protocol.to_string(),
                alpha: p.alpha,
                deadline: p.deadline,
                seed: job.seed,
                source,
            })?;
            Ok(RunRecord {
                key: RunKey {
                    scenario: cfg.name.clone(),
                    policy: p.policy.to_string(),
                    routing: p.protocol.to_string(),
                    deadline: p.deadline,
                    alpha: p.alpha,
                    seed: job.seed,
                },
                point: p,
                summary: out.summary,
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(BatchResult {
        scenario: cfg.name.clone(),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::parse_config;

    #[test]
    fn mean_std_sample() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - 1.290_994_448_7).abs() < 1e-9);
        assert_eq!(mean_std(&[0.4]), (0.4, 0.0));
    }

    #[test]
    fn rows_and_plot_lines_count() {
        let cfg = parse_config("nodeCount = 16\nsimTime = 2\ndeadline = 0.5,1.0,1.5,2.0\nseeds = 1,2,3,4,5").unwrap();
        let batch = run_experiment(&cfg).unwrap();
        assert_eq!(batch.records.len(), 20);
        assert_eq!(batch.csv().lines().count(), 21);
        let series = batch.series();
        assert_eq!(series.len(), 1);
        assert_eq!(series[0].render().lines().filter(|l| !l.starts_with('#')).count(), 4);
        // seeds vary fastest
        let seeds: Vec<u64> = batch.records.iter().take(5).map(|r| r.key.seed).collect();
        assert_eq!(seeds, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let cfg =
            parse_config("nodeCount = 25\nsimTime = 3\ndeadline = 0.3,0.6\nseeds = 1,2\npolicy = drts,svm").unwrap();
        let a = run_experiment(&cfg).unwrap().csv();
        let b = run_experiment(&cfg).unwrap().csv();
        assert_eq!(a, b);
    }
}
