use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::spec::{MatrixSpec, TestMatrix};
use crate::error::{Error, Result};
use crate::estimators::{self, EstimateReport, SamplerKind};
use crate::exec::Execution;
use crate::matrix::Spectrum;
use crate::rng::{derive_seed, label_tag};
use crate::samplers::{NnzZeroing, NormZeroing};

pub const CSV_HEADER: [&str; 15] = [
    "experiment_id",
    "sampler",
    "n",
    "s",
    "sample_fraction",
    "trial",
    "seed",
    "target_index",
    "true_eig",
    "est_eig",
    "abs_err",
    "scaled_err",
    "zeroed_count",
    "sample_size",
    "elapsed_ms",
];

/// Sampler label of the all-zeros baseline rows.
pub const ZERO_BASELINE: &str = "zero";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment_id: String,
    pub sampler: String,
    pub n: usize,
    pub s: f64,
    pub sample_fraction: f64,
    pub trial: usize,
    pub seed: u64,
    pub target_index: usize,
    pub true_eig: f64,
    pub est_eig: f64,
    pub abs_err: f64,
    pub scaled_err: f64,
    pub zeroed_count: usize,
    pub sample_size: usize,
    pub elapsed_ms: f64,
}

impl ResultRow {
    /// A trial whose estimator returned an error.
    pub fn is_failed(&self) -> bool {
        self.est_eig.is_nan()
    }
}

/// One estimator run for `kind`, with zeroing constants taken from `cfg`.
pub fn run_sampler(
    kind: SamplerKind,
    m: &TestMatrix,
    s: f64,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<EstimateReport> {
    let theorem_nnz = NnzZeroing::Theorem {
        eps: cfg.eps,
        c2: cfg.c2_theorem,
    };
    let theorem_norm = NormZeroing::Theorem {
        eps: cfg.eps,
        c2: cfg.c2_theorem,
    };
    match kind {
        SamplerKind::Uniform => estimators::estimate_uniform(&m.dense, s, seed),
        SamplerKind::NnzTheorem => estimators::estimate_nnz(&m.store, s, theorem_nnz, seed),
        SamplerKind::NnzPractical => {
            estimators::estimate_nnz(&m.store, s, NnzZeroing::Practical { c2: cfg.c2 }, seed)
        }
        SamplerKind::NnzSimple => estimators::estimate_nnz(&m.store, s, NnzZeroing::Off, seed),
        SamplerKind::NormTheorem => estimators::estimate_norm(&m.store, s, theorem_norm, seed),
        SamplerKind::NormSimple => estimators::estimate_norm(&m.store, s, NormZeroing::Off, seed),
        SamplerKind::Entrywise => {
            estimators::estimate_entrywise_pipeline(&m.dense, s, cfg.entrywise_p, seed)
        }
        SamplerKind::Singular => estimators::estimate_singular(&m.dense, s, seed),
        SamplerKind::Psd => estimators::estimate_psd(&m.dense, s, seed),
    }
}

fn cache_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".spectrum");
    PathBuf::from(os)
}

fn read_cache(path: &Path, key: &str, n: usize) -> Option<Spectrum> {
    let text = fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    if lines.next()? != key {
        return None;
    }
    let values: Vec<f64> = lines.map(|l| l.trim().parse().ok()).collect::<Option<_>>()?;
    (values.len() == n).then_some(())?;
    Spectrum::new(values).ok()
}

/// Exact spectrum of `m`. For file-backed specs the result is cached next
/// to the file as `<file>.spectrum`, keyed by the SHA-256 of the file
/// contents; a stale or unreadable cache is recomputed, and a cache that
/// cannot be written is skipped.
pub fn exact_spectrum_cached(spec: &MatrixSpec, m: &TestMatrix) -> Result<Spectrum> {
    let MatrixSpec::File(path) = spec else {
        return estimators::exact_spectrum(&m.dense);
    };
    let digest = Sha256::digest(fs::read(path)?);
    let key = format!("# sha256={digest:x} n={}", m.n());
    let cache = cache_path(path);
    if let Some(hit) = read_cache(&cache, &key, m.n()) {
        return Ok(hit);
    }
    let spectrum = estimators::exact_spectrum(&m.dense)?;
    let mut body = key;
    body.push('\n');
    for v in spectrum.values() {
        body.push_str(&format_float(*v));
        body.push('\n');
    }
    let _ = fs::write(&cache, body);
    Ok(spectrum)
}

/// Value at a resolved rank; NaN if a spectrum is shorter than expected.
fn at(s: &Spectrum, rank: usize) -> f64 {
    s.by_rank(rank).unwrap_or(f64::NAN)
}

struct Trial {
    report: Result<EstimateReport>,
    seed: u64,
}

/// Shared per-experiment values used to build rows.
struct RowContext<'a> {
    cfg: &'a ExperimentConfig,
    n: usize,
    root_nnz: f64,
    targets: &'a [usize],
}

impl RowContext<'_> {
    fn blank(&self, sampler: &str, fi: usize, trial: usize, seed: u64, target: usize) -> ResultRow {
        let fraction = self.cfg.fractions[fi];
        ResultRow {
            experiment_id: self.cfg.id.clone(),
            sampler: sampler.to_string(),
            n: self.n,
            s: fraction * self.n as f64,
            sample_fraction: fraction,
            trial,
            seed,
            target_index: target,
            true_eig: f64::NAN,
            est_eig: f64::NAN,
            abs_err: f64::NAN,
            scaled_err: f64::NAN,
            zeroed_count: 0,
            sample_size: 0,
            elapsed_ms: 0.0,
        }
    }

    fn filled(&self, mut r: ResultRow, truth: f64, est: f64) -> ResultRow {
        r.true_eig = truth;
        r.est_eig = est;
        r.abs_err = (truth - est).abs();
        r.scaled_err = r.abs_err / self.root_nnz;
        r
    }

    /// One row per target; a failed trial keeps NaN estimates and errors.
    fn trial_rows(&self, sampler: &str, fi: usize, trial: usize, t: &Trial, truth: &Spectrum) -> Vec<ResultRow> {
        self.targets
            .iter()
            .map(|&target| {
                let base = self.blank(sampler, fi, trial, t.seed, target);
                match &t.report {
                    Ok(rep) => {
                        let mut r =
                            self.filled(base, at(truth, target), at(&rep.estimates, target));
                        r.zeroed_count = rep.zeroed_count;
                        r.sample_size = rep.sample_size;
                        if self.cfg.record_timing {
                            r.elapsed_ms = rep.elapsed.as_secs_f64() * 1e3;
                        }
                        r
                    }
                    Err(_) => ResultRow {
                        true_eig: at(truth, target),
                        ..base
                    },
                }
            })
            .collect()
    }
}

/// Runs every (sampler, fraction, trial) of `cfg` and returns rows ordered by
/// sampler, fraction, trial and target as listed in the config, followed by
/// the all-zeros baseline. Writes the CSV when `cfg.output` is set.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let m = cfg.matrix.materialize()?;
    let n = m.n();
    let nnz = m.store.total_nnz();
    if nnz == 0 {
        return Err(Error::config("matrix", "matrix has no nonzero entries"));
    }
    let targets: Vec<usize> = cfg
        .targets
        .iter()
        .map(|t| t.resolve(n))
        .collect::<Result<_>>()?;
    let eigs = exact_spectrum_cached(&cfg.matrix, &m)?;
    let singular_truth = Spectrum::from_unsorted(eigs.values().iter().map(|v| v.abs()).collect());
    let ctx = RowContext {
        cfg,
        n,
        root_nnz: (nnz as f64).sqrt(),
        targets: &targets,
    };

    let per_sampler = cfg.fractions.len() * cfg.trials;
    let locate = |job: usize| {
        (
            cfg.samplers[job / per_sampler],
            (job % per_sampler) / cfg.trials,
            job % cfg.trials,
        )
    };
    let trials = exec.map(cfg.samplers.len() * per_sampler, |job| {
        let (kind, fi, trial) = locate(job);
        let seed = derive_seed(cfg.seed, &[label_tag(kind.name()), fi as u64, trial as u64]);
        let s = cfg.fractions[fi] * n as f64;
        Trial {
            report: run_sampler(kind, &m, s, cfg, seed),
            seed,
        }
    });

    let mut rows = Vec::with_capacity((trials.len() + cfg.fractions.len()) * targets.len());
    for (job, t) in trials.iter().enumerate() {
        let (kind, fi, trial) = locate(job);
        let truth = if kind == SamplerKind::Singular {
            &singular_truth
        } else {
            &eigs
        };
        rows.extend(ctx.trial_rows(kind.name(), fi, trial, t, truth));
    }
    for fi in 0..cfg.fractions.len() {
        for &target in &targets {
            let base = ctx.blank(ZERO_BASELINE, fi, 0, 0, target);
            rows.push(ctx.filled(base, at(&eigs, target), 0.0));
        }
    }

    if let Some(path) = &cfg.output {
        write_results(path, &rows)?;
    }
    Ok(rows)
}

/// `{:.16e}`: seventeen significant digits, enough to round-trip any f64.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    write_results_to(std::io::BufWriter::new(fs::File::create(path)?), rows)
}

pub fn write_results_to<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.experiment_id.clone(),
            r.sampler.clone(),
            r.n.to_string(),
            format_float(r.s),
            format_float(r.sample_fraction),
            r.trial.to_string(),
            r.seed.to_string(),
            r.target_index.to_string(),
            format_float(r.true_eig),
            format_float(r.est_eig),
            format_float(r.abs_err),
            format_float(r.scaled_err),
            r.zeroed_count.to_string(),
            r.sample_size.to_string(),
            format_float(r.elapsed_ms),
        ])?;
    }
    w.flush()?;
    w.into_inner()
        .map_err(|e| Error::Io(e.into_error()))?
        .flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Format(format!(
            "{}: unexpected CSV header `{}`",
            path.display(),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |col: usize| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("invalid `{}` value `{}`", CSV_HEADER[col], &rec[col]),
        };
        macro_rules! field {
            ($col:expr) => {
                rec[$col].parse().map_err(|_| bad($col))?
            };
        }
        rows.push(ResultRow {
            experiment_id: rec[0].to_string(),
            sampler: rec[1].to_string(),
            n: field!(2),
            s: field!(3),
            sample_fraction: field!(4),
            trial: field!(5),
            seed: field!(6),
            target_index: field!(7),
            true_eig: field!(8),
            est_eig: field!(9),
            abs_err: field!(10),
            scaled_err: field!(11),
            zeroed_count: field!(12),
            sample_size: field!(13),
            elapsed_ms: field!(14),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::TargetIndex;

    fn small_cfg() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(MatrixSpec::Block { n: 40, k: 20 });
        cfg.samplers = vec![SamplerKind::Uniform, SamplerKind::NnzPractical];
        cfg.fractions = vec![0.25, 0.5];
        cfg.trials = 3;
        cfg.targets = vec![TargetIndex::Rank(1), TargetIndex::FromBottom(0)];
        cfg
    }

    #[test]
    fn row_order_and_baseline() {
        let rows = run_experiment(&small_cfg(), Execution::Sequential).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 3 * 2 + 2 * 2);
        assert_eq!(rows[0].sampler, "uniform");
        assert_eq!((rows[0].trial, rows[0].target_index), (0, 1));
        assert_eq!((rows[1].trial, rows[1].target_index), (0, 40));
        assert_eq!(rows[2].trial, 1);
        assert_eq!(rows[6].sample_fraction, 0.5);
        assert_eq!(rows[12].sampler, "nnz_practical");
        let zero: Vec<_> = rows.iter().filter(|r| r.sampler == ZERO_BASELINE).collect();
        assert_eq!(zero.len(), 4);
        for r in zero {
            assert_eq!(r.est_eig, 0.0);
            assert_eq!(r.scaled_err, r.true_eig.abs() / 20.0);
        }
    }

    #[test]
    fn execution_modes_agree() {
        let cfg = small_cfg();
        let a = run_experiment(&cfg, Execution::Sequential).unwrap();
        let b = run_experiment(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let mut cfg = small_cfg();
        cfg.output = Some(path.clone());
        let rows = run_experiment(&cfg, Execution::Parallel).unwrap();
        let back = read_results(&path).unwrap();
        assert_eq!(rows, back);
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    }

    #[test]
    fn failed_trials_become_nan_rows() {
        let cfg = small_cfg();
        let targets = [1, 40];
        let ctx = RowContext {
            cfg: &cfg,
            n: 40,
            root_nnz: 20.0,
            targets: &targets,
        };
        let truth = Spectrum::from_unsorted((0..40).map(f64::from).collect());
        let t = Trial {
            report: Err(Error::NoConvergence {
                index: 0,
                iterations: 60,
            }),
            seed: 5,
        };
        let rows = ctx.trial_rows("uniform", 1, 2, &t, &truth);
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(ResultRow::is_failed));
        assert!(rows.iter().all(|r| r.abs_err.is_nan() && r.scaled_err.is_nan()));
        assert_eq!((rows[0].true_eig, rows[1].true_eig), (39.0, 0.0));
        assert_eq!((rows[0].seed, rows[0].trial, rows[0].sample_fraction), (5, 2, 0.5));
    }

    #[test]
    fn spectrum_cache_is_keyed_by_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        fs::write(&path, "0 1\n1 2\n").unwrap();
        let spec = MatrixSpec::File(path.clone());
        let m = spec.materialize().unwrap();
        let first = exact_spectrum_cached(&spec, &m).unwrap();
        let cache = cache_path(&path);
        assert!(cache.exists());
        assert_eq!(exact_spectrum_cached(&spec, &m).unwrap(), first);

        fs::write(&path, "0 1\n").unwrap();
        let m2 = spec.materialize().unwrap();
        let second = exact_spectrum_cached(&spec, &m2).unwrap();
        assert_eq!(second.len(), 2);
        assert!((second.values()[0] - 1.0).abs() < 1e-12);
    }
}
