use serde::Serialize;

use super::membership::q_in_q_with;
use super::pair::verify_absent;
use super::scan::{exception_scan, ScanConfig};
use super::SearchError;
use crate::bounds::CoreMode;
use crate::ffcore::FieldCtx;
use crate::polyrat::{Family, FamilyOptions, RationalFunc};

/// Work units allowed by default: enough for every candidate up to roughly
/// `q = 2000`.
pub const DEFAULT_BUDGET: u64 = 20_000_000_000;

/// Rough cost of classifying one field: the family has about `q³` members.
pub fn work_estimate(q: u64) -> u64 {
    q.saturating_mul(q).saturating_mul(q)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifyConfig {
    pub family: Family,
    pub q_max: u64,
    pub n: u64,
    /// Cores used to pick the candidates that get the exhaustive check.
    pub mode: CoreMode,
    pub budget: u64,
    pub workers: usize,
    pub options: FamilyOptions,
}

impl ClassifyConfig {
    pub fn new(family: Family, q_max: u64) -> ClassifyConfig {
        ClassifyConfig {
            family,
            q_max,
            n: family.degree() as u64,
            mode: CoreMode::Exact,
            budget: DEFAULT_BUDGET,
            workers: 0,
            options: FamilyOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionRecord {
    pub q: u64,
    pub family: Family,
    pub failing: RationalFunc,
}

/// One line of the witness report.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessLine {
    pub q: u64,
    pub family: String,
    pub f: FuncCoeffs,
    pub witness: Option<WitnessLogs>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuncCoeffs {
    pub num: Vec<u32>,
    pub den: Vec<u32>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WitnessLogs {
    pub alpha_dlog: u64,
    pub falpha_dlog: u64,
}

impl WitnessLine {
    pub fn new(q: u64, family: Family, f: &RationalFunc, witness: Option<WitnessLogs>) -> WitnessLine {
        WitnessLine {
            q,
            family: family.to_string(),
            f: FuncCoeffs { num: f.num().to_indices(), den: f.den().to_indices() },
            witness,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct")
    }
}

impl ExceptionRecord {
    pub fn witness_line(&self) -> WitnessLine {
        WitnessLine::new(self.q, self.family, &self.failing, None)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub family: Family,
    pub q_max: u64,
    pub candidates: Vec<u64>,
    pub exceptions: Vec<ExceptionRecord>,
    /// Every `q ≤ high_water` has been classified.
    pub high_water: u64,
    pub complete: bool,
    pub work: u64,
    /// Work the full request would need.
    pub work_required: u64,
}

impl ClassifyReport {
    pub fn exception_qs(&self) -> Vec<u64> {
        self.exceptions.iter().map(|e| e.q).collect()
    }
}

pub fn classify_true_exceptions(q_max: u64, family: Family) -> Result<ClassifyReport, SearchError> {
    classify_with(&ClassifyConfig::new(family, q_max))
}

/// Runs the criterion scan on `[3, q_max]` and checks each surviving
/// candidate exhaustively, stopping before the budget would be exceeded.
pub fn classify_with(cfg: &ClassifyConfig) -> Result<ClassifyReport, SearchError> {
    let mut report = ClassifyReport {
        family: cfg.family,
        q_max: cfg.q_max,
        candidates: Vec::new(),
        exceptions: Vec::new(),
        high_water: cfg.q_max,
        complete: true,
        work: 0,
        work_required: 0,
    };
    if cfg.q_max < 3 {
        return Ok(report);
    }
    let scan_cfg = ScanConfig { n: cfg.n, mode: cfg.mode, candidates_only: true, workers: cfg.workers, ..ScanConfig::default() };
    let (records, _) = exception_scan(3, cfg.q_max, &scan_cfg)?;
    report.candidates = records.iter().map(|r| r.q).collect();
    report.work_required = report.candidates.iter().map(|&q| work_estimate(q)).fold(0, u64::saturating_add);
    let pool = scan_cfg.pool()?;
    for &q in &report.candidates {
        let cost = work_estimate(q);
        if report.work.saturating_add(cost) > cfg.budget {
            report.complete = false;
            report.high_water = q - 1;
            break;
        }
        report.work += cost;
        let ctx = FieldCtx::from_order(q)?;
        let m = pool.install(|| q_in_q_with(&ctx, cfg.family, cfg.options))?;
        if let Some(f) = m.failing {
            if !verify_absent(&ctx, &f) {
                return Err(SearchError::Internal(format!("failing f over F_{q} has a primitive pair")));
            }
            report.exceptions.push(ExceptionRecord { q, family: cfg.family, failing: f });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_ranges() {
        let r = classify_true_exceptions(2, Family::LINEAR_FRACTIONAL).unwrap();
        assert!(r.exceptions.is_empty() && r.complete);
        let r = classify_true_exceptions(20, Family::QUADRATIC).unwrap();
        assert_eq!(r.exception_qs(), vec![3, 4, 5, 7, 9, 11, 13, 16, 19]);
        let mut cfg = ClassifyConfig::new(Family::QUADRATIC, 20);
        cfg.options.irreducible_quadratics = true;
        assert_eq!(classify_with(&cfg).unwrap().exception_qs(), vec![3, 4, 5, 7, 11, 13, 19]);
        let line = r.exceptions[0].witness_line().to_json();
        assert!(line.starts_with(r#"{"q":3,"family":"2,0","f":{"num":"#));
        assert!(line.ends_with(r#""witness":null}"#));
    }

    #[test]
    fn budget_stops_with_high_water() {
        let mut cfg = ClassifyConfig::new(Family::LINEAR_FRACTIONAL, 60);
        cfg.budget = work_estimate(3) + work_estimate(4) + work_estimate(5);
        let r = classify_with(&cfg).unwrap();
        assert!(!r.complete);
        assert_eq!(r.exception_qs(), vec![3, 4, 5]);
        assert_eq!(r.high_water, 6);
        assert!(r.work_required > cfg.budget);
    }
}
