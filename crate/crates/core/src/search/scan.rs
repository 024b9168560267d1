use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter};
use std::path::{Path, PathBuf};

use super::SearchError;
use crate::bounds::{best_sieve_with, theorem31_check, CoreMode};
use crate::ffcore::{factorize, prime_power_iter, Factorization, PrimePower};

pub const CSV_HEADER: [&str; 7] = ["q", "p", "k", "omega", "q_minus_1_factors", "verdict", "best_core"];
pub const CHECKPOINT_DIR_ENV: &str = "PRIMPAIR_CHECKPOINT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    PassThm31,
    PassSieve,
    Candidate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::PassThm31 => "pass_thm31",
            Verdict::PassSieve => "pass_sieve",
            Verdict::Candidate => "candidate",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Criterion outcome for one prime power.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanRecord {
    pub q: u64,
    pub p: u64,
    pub k: u32,
    pub factorization: Factorization,
    pub verdict: Verdict,
    /// Core with the largest sieve margin among the admissible ones.
    pub best_core: Vec<u64>,
}

impl ScanRecord {
    pub fn evaluate(pp: PrimePower, n: u64, mode: CoreMode) -> Result<ScanRecord, SearchError> {
        let factorization = factorize(pp.q - 1)?;
        let best = best_sieve_with(pp.q, &factorization, n, mode)?;
        let verdict = if theorem31_check(n, pp.q, factorization.w()) {
            Verdict::PassThm31
        } else if best.pass {
            Verdict::PassSieve
        } else {
            Verdict::Candidate
        };
        Ok(ScanRecord { q: pp.q, p: pp.p, k: pp.k, factorization, verdict, best_core: best.params.core })
    }

    pub fn csv_row(&self) -> [String; 7] {
        let core = if self.best_core.is_empty() {
            "none".to_string()
        } else {
            self.best_core.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
        };
        [
            self.q.to_string(),
            self.p.to_string(),
            self.k.to_string(),
            self.factorization.omega().to_string(),
            self.factorization.to_factor_string(),
            self.verdict.to_string(),
            core,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanConfig {
    pub n: u64,
    pub mode: CoreMode,
    /// Emit only candidates instead of every record.
    pub candidates_only: bool,
    /// Worker threads; 0 lets the pool decide.
    #[serde(skip)]
    pub workers: usize,
    /// Records between checkpoints.
    #[serde(skip)]
    pub checkpoint_every: u64,
}

impl Default for ScanConfig {
    fn default() -> ScanConfig {
        ScanConfig { n: 2, mode: CoreMode::Exact, candidates_only: true, workers: 0, checkpoint_every: 100_000 }
    }
}

impl ScanConfig {
    /// Hash of the settings that determine the output; worker count and
    /// checkpoint cadence are excluded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("plain struct");
        hex::encode(&Sha256::digest(json.as_bytes())[..8])
    }

    pub(crate) fn pool(&self) -> Result<rayon::ThreadPool, SearchError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| SearchError::Internal(format!("thread pool: {e}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub lo: u64,
    pub hi: u64,
    pub scanned: u64,
    pub records_emitted: u64,
    pub candidates: u64,
    pub max_candidate: Option<u64>,
}

impl ScanSummary {
    fn absorb(&mut self, r: &ScanRecord, emitted: bool) {
        self.scanned += 1;
        if emitted {
            self.records_emitted += 1;
        }
        if r.verdict == Verdict::Candidate {
            self.candidates += 1;
            self.max_candidate = Some(r.q);
        }
    }
}

/// Numbers per work unit; fixed so results do not depend on the pool size.
const CHUNK: u64 = 1 << 18;

fn check_range(lo: u64, hi: u64) -> Result<(), SearchError> {
    let bad = |reason: &str| Err(SearchError::Range { lo, hi, reason: reason.into() });
    if lo < 3 {
        return bad("the scan starts at q = 3");
    }
    if hi < lo {
        return bad("hi must be at least lo");
    }
    if hi > 1 << 62 {
        return bad("hi must stay below 2^62");
    }
    Ok(())
}

/// Evaluates every prime power in `[lo, hi]` in increasing order, passing
/// the emitted records to `sink`. `progress(next_q, summary)` runs after
/// each batch once its records have been emitted.
fn run_scan(
    lo: u64,
    hi: u64,
    cfg: &ScanConfig,
    summary: &mut ScanSummary,
    mut sink: impl FnMut(&ScanRecord) -> Result<(), SearchError>,
    mut progress: impl FnMut(u64, &ScanSummary) -> Result<(), SearchError>,
) -> Result<(), SearchError> {
    let pool = cfg.pool()?;
    let per_batch = 4 * pool.current_num_threads().max(1) as u64;
    let mut start = lo;
    while start <= hi {
        let chunks: Vec<(u64, u64)> = (0..per_batch)
            .map(|i| start.saturating_add(i * CHUNK))
            .take_while(|&a| a <= hi)
            .map(|a| (a, a.saturating_add(CHUNK - 1).min(hi)))
            .collect();
        let batch_end = chunks.last().expect("nonempty").1;
        let results: Vec<Vec<ScanRecord>> = pool.install(|| {
            chunks
                .par_iter()
                .map(|&(a, b)| {
                    prime_power_iter(a, b)
                        .map(|pp| ScanRecord::evaluate(pp, cfg.n, cfg.mode))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()
        })?;
        for r in results.iter().flatten() {
            let emit = !cfg.candidates_only || r.verdict == Verdict::Candidate;
            if emit {
                sink(r)?;
            }
            summary.absorb(r, emit);
        }
        start = batch_end + 1;
        progress(start, summary)?;
    }
    Ok(())
}

/// Scans `[lo, hi]` and returns the emitted records in increasing `q`.
pub fn exception_scan(lo: u64, hi: u64, cfg: &ScanConfig) -> Result<(Vec<ScanRecord>, ScanSummary), SearchError> {
    check_range(lo, hi)?;
    let mut out = Vec::new();
    let mut summary = ScanSummary { lo, hi, ..ScanSummary::default() };
    run_scan(lo, hi, cfg, &mut summary, |r| {
        out.push(r.clone());
        Ok(())
    }, |_, _| Ok(()))?;
    Ok((out, summary))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub range: [u64; 2],
    pub next_q: u64,
    pub records_emitted: u64,
    pub config_hash: String,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Option<Checkpoint>, SearchError> {
        match fs::read_to_string(path) {
            Ok(s) => serde_json::from_str(&s).map(Some).map_err(|e| SearchError::Checkpoint {
                path: path.display().to_string(),
                reason: format!("unreadable ({e}); delete it to start over"),
            }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_err(path, e)),
        }
    }

    fn store(&self, path: &Path) -> Result<(), SearchError> {
        let tmp = path.with_extension("tmp");
        let body = serde_json::to_string_pretty(self).expect("plain struct");
        fs::write(&tmp, body).map_err(|e| io_err(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| io_err(path, e))
    }
}

fn io_err(path: &Path, e: std::io::Error) -> SearchError {
    SearchError::Io(format!(
        "{}: {e}; rerun the same command to resume from the last checkpoint",
        path.display()
    ))
}

/// Where the checkpoint for a CSV output lives: under `$PRIMPAIR_CHECKPOINT_DIR`
/// when set, otherwise next to the output.
pub fn checkpoint_path_for(out: &Path, lo: u64, hi: u64, cfg: &ScanConfig) -> PathBuf {
    match std::env::var_os(CHECKPOINT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(format!("scan-{lo}-{hi}-{}.checkpoint.json", cfg.hash())),
        None => {
            let mut name = out.file_name().map(|s| s.to_os_string()).unwrap_or_default();
            name.push(".checkpoint.json");
            out.with_file_name(name)
        }
    }
}

fn write_row(w: &mut csv::Writer<BufWriter<File>>, row: &[String], path: &Path) -> Result<(), SearchError> {
    w.write_record(row).map_err(|e| SearchError::Io(format!("{}: {e}", path.display())))
}

/// Keeps the header and the first `rows` records of an existing CSV,
/// returning the summary they contribute.
fn truncate_csv(path: &Path, rows: u64, lo: u64, hi: u64) -> Result<ScanSummary, SearchError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = BufReader::new(file);
    let mut keep = 0u64;
    let mut line = String::new();
    let mut summary = ScanSummary { lo, hi, ..ScanSummary::default() };
    for i in 0..=rows {
        line.clear();
        let n = reader.read_line(&mut line).map_err(|e| io_err(path, e))?;
        if n == 0 || !line.ends_with('\n') {
            return Err(SearchError::Checkpoint {
                path: path.display().to_string(),
                reason: format!("output has fewer than {rows} complete rows; delete both files to start over"),
            });
        }
        keep += n as u64;
        if i > 0 {
            let cols: Vec<&str> = line.trim_end().split(',').collect();
            summary.records_emitted += 1;
            if cols.get(5) == Some(&"candidate") {
                let q = cols[0].parse().unwrap_or(0);
                summary.candidates += 1;
                summary.max_candidate = Some(q);
            }
        }
    }
    OpenOptions::new()
        .write(true)
        .open(path)
        .and_then(|f| f.set_len(keep))
        .map_err(|e| io_err(path, e))?;
    Ok(summary)
}

/// Scans `[lo, hi]` into a CSV at `out`, checkpointing to `checkpoint` every
/// `cfg.checkpoint_every` scanned records. An existing checkpoint with the
/// same range and configuration resumes the run; the CSV is cut back to the
/// rows it covers first. `summary.scanned` counts this invocation only.
pub fn scan_to_csv(
    lo: u64,
    hi: u64,
    cfg: &ScanConfig,
    out: &Path,
    checkpoint: Option<&Path>,
) -> Result<ScanSummary, SearchError> {
    check_range(lo, hi)?;
    let hash = cfg.hash();
    let resume = match checkpoint {
        Some(cp) => Checkpoint::load(cp)?,
        None => None,
    };
    let (start, mut summary, file) = match resume {
        Some(c) if c.range == [lo, hi] && c.config_hash == hash && out.exists() => {
            let summary = truncate_csv(out, c.records_emitted, lo, hi)?;
            let file = OpenOptions::new().append(true).open(out).map_err(|e| io_err(out, e))?;
            (c.next_q, summary, file)
        }
        Some(c) => {
            return Err(SearchError::Checkpoint {
                path: checkpoint.expect("loaded").display().to_string(),
                reason: format!(
                    "belongs to range [{}, {}] with config {} (or its output is missing); remove it or change the output path",
                    c.range[0], c.range[1], c.config_hash
                ),
            })
        }
        None => {
            let file = File::create(out).map_err(|e| io_err(out, e))?;
            (lo, ScanSummary { lo, hi, ..ScanSummary::default() }, file)
        }
    };
    let fresh = start == lo && summary.records_emitted == 0;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(BufWriter::new(file));
    if fresh {
        let header: Vec<String> = CSV_HEADER.iter().map(|s| s.to_string()).collect();
        write_row(&mut w, &header, out)?;
    }
    if start > hi {
        return Ok(summary);
    }
    let w = std::cell::RefCell::new(w);
    let mut since = 0u64;
    let mut last_scanned = summary.scanned;
    let flush = |w: &std::cell::RefCell<csv::Writer<BufWriter<File>>>| -> Result<(), SearchError> {
        let mut w = w.borrow_mut();
        w.flush().map_err(|e| io_err(out, e))?;
        w.get_ref().get_ref().sync_data().map_err(|e| io_err(out, e))
    };
    run_scan(
        start,
        hi,
        cfg,
        &mut summary,
        |r| write_row(&mut w.borrow_mut(), &r.csv_row(), out),
        |next_q, s| {
            since += s.scanned - last_scanned;
            last_scanned = s.scanned;
            if let Some(cp) = checkpoint {
                if since >= cfg.checkpoint_every || next_q > hi {
                    since = 0;
                    flush(&w)?;
                    Checkpoint {
                        range: [lo, hi],
                        next_q,
                        records_emitted: s.records_emitted,
                        config_hash: hash.clone(),
                    }
                    .store(cp)?;
                }
            }
            Ok(())
        },
    )?;
    flush(&w)?;
    Ok(summary)
}
