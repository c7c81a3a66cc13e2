//! Benchmark harness: run solve methods over generated instance suites and
//! emit per-instance CSV plus aggregated markdown tables.
//!
//! Records carry every table column; failed runs become `n/a` rows instead
//! of aborting a suite, and cells that are undefined for a method (such as
//! the reduction percentage outside PFL) render as `--`.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::instance::{generate_instance, Family};
use crate::model::{build_fl, build_std, preprocess_fl};
use crate::solver::{solve_bc, solve_bnb, solve_mh, SolveConfig, SolveReport};

/// Solve method selector, named as in the benchmark tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Std,
    Fl,
    Pfl,
    Bc,
    Mh(usize),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Std => write!(f, "STD"),
            Method::Fl => write!(f, "FL"),
            Method::Pfl => write!(f, "PFL"),
            Method::Bc => write!(f, "BC"),
            Method::Mh(k) => write!(f, "MH-{k}"),
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "STD" => Ok(Method::Std),
            "FL" => Ok(Method::Fl),
            "PFL" => Ok(Method::Pfl),
            "BC" => Ok(Method::Bc),
            other => match other.strip_prefix("MH-") {
                Some(k) => k
                    .parse::<usize>()
                    .ok()
                    .filter(|&k| k >= 1)
                    .map(Method::Mh)
                    .ok_or_else(|| format!("bad MH window in `{other}`")),
                None => Err(format!("unknown method `{other}`")),
            },
        }
    }
}

/// One (instance, method) outcome. `report` is `None` for failed runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub group: (usize, usize, usize),
    pub family: Family,
    pub seed: u64,
    pub method: Method,
    pub ub: Option<f64>,
    pub lb: Option<f64>,
    pub root_bound: Option<f64>,
    pub pure_lp_bound: Option<f64>,
    pub time_s: Option<f64>,
    pub nodes: Option<usize>,
    pub cuts: Option<usize>,
    pub proven_optimal: Option<bool>,
    pub gap_pct: Option<f64>,
    /// Preprocessing reduction, PFL only.
    pub red_pct: Option<f64>,
}

impl RunRecord {
    fn from_report(
        group: (usize, usize, usize),
        family: Family,
        seed: u64,
        method: Method,
        report: &SolveReport,
        red_pct: Option<f64>,
    ) -> Self {
        Self {
            group,
            family,
            seed,
            method,
            ub: Some(report.ub),
            lb: Some(report.lb),
            root_bound: Some(report.root_bound),
            pure_lp_bound: Some(report.pure_lp_bound),
            time_s: Some(report.time),
            nodes: Some(report.nodes),
            cuts: Some(report.cuts_added),
            proven_optimal: Some(report.proven_optimal),
            gap_pct: Some(report.gap_pct),
            red_pct,
        }
    }

    fn failed(group: (usize, usize, usize), family: Family, seed: u64, method: Method) -> Self {
        Self {
            group,
            family,
            seed,
            method,
            ub: None,
            lb: None,
            root_bound: None,
            pure_lp_bound: None,
            time_s: None,
            nodes: None,
            cuts: None,
            proven_optimal: None,
            gap_pct: None,
            red_pct: None,
        }
    }
}

/// Runs every (group, seed, method) combination for one family. Failures
/// produce `n/a` records. Work is spread over up to `workers` threads;
/// output order is deterministic regardless.
pub fn run_suite(
    groups: &[(usize, usize, usize)],
    family: Family,
    seeds: &[u64],
    methods: &[Method],
    cfg: &SolveConfig,
    workers: usize,
) -> Vec<RunRecord> {
    let mut tasks: Vec<((usize, usize, usize), u64, Method)> = Vec::new();
    for &group in groups {
        for &seed in seeds {
            for &method in methods {
                tasks.push((group, seed, method));
            }
        }
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, RunRecord)>> = Mutex::new(Vec::with_capacity(tasks.len()));
    let workers = workers.clamp(1, tasks.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(group, seed, method)) = tasks.get(idx) else {
                    break;
                };
                let record = run_one(group, family, seed, method, cfg);
                results.lock().unwrap().push((idx, record));
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|&(idx, _)| idx);
    results.into_iter().map(|(_, r)| r).collect()
}

/// Runs one method on one generated instance. MH runs are capped at the
/// heuristic time limit of 600 seconds.
pub fn run_one(
    group: (usize, usize, usize),
    family: Family,
    seed: u64,
    method: Method,
    cfg: &SolveConfig,
) -> RunRecord {
    let (nj, ni, nt) = group;
    let inst = generate_instance(nj, ni, nt, family, seed);
    let solved = match method {
        Method::Std => solve_bnb(&inst, &build_std(&inst), cfg).map(|(r, _)| (r, None)),
        Method::Fl => solve_bnb(&inst, &build_fl(&inst), cfg).map(|(r, _)| (r, None)),
        Method::Pfl => {
            let (model, report) = preprocess_fl(&inst);
            solve_bnb(&inst, &model, cfg).map(|(r, _)| (r, Some(report.reduction_pct)))
        }
        Method::Bc => solve_bc(&inst, cfg).map(|(r, _)| (r, None)),
        Method::Mh(k) => {
            let hcfg = SolveConfig {
                time_limit: cfg.time_limit.min(600.0),
                ..cfg.clone()
            };
            solve_mh(&inst, k.min(nt), &hcfg).map(|(r, _)| (r, None))
        }
    };
    match solved {
        Ok((report, red_pct)) => {
            RunRecord::from_report(group, family, seed, method, &report, red_pct)
        }
        Err(_) => RunRecord::failed(group, family, seed, method),
    }
}

pub const CSV_HEADER: &str =
    "group,family,seed,method,ub,lb,root_bound,pure_lp_bound,time_s,nodes,cuts,proven_optimal,gap_pct,red_pct";

fn opt_cell<T: fmt::Display>(v: &Option<T>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => "n/a".to_string(),
    }
}

/// Serializes records under the fixed header. Groups render as `NJxNIxNT`;
/// missing values render as `n/a`, undefined reduction as `--`.
pub fn emit_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let (nj, ni, nt) = r.group;
        let red = match (r.red_pct, r.ub.is_some()) {
            (Some(p), _) => p.to_string(),
            (None, true) => "--".to_string(),
            (None, false) => "n/a".to_string(),
        };
        out.push_str(&format!(
            "{nj}x{ni}x{nt},{},{},{},{},{},{},{},{},{},{},{},{},{red}\n",
            r.family.name(),
            r.seed,
            r.method,
            opt_cell(&r.ub),
            opt_cell(&r.lb),
            opt_cell(&r.root_bound),
            opt_cell(&r.pure_lp_bound),
            opt_cell(&r.time_s),
            opt_cell(&r.nodes),
            opt_cell(&r.cuts),
            opt_cell(&r.proven_optimal),
            opt_cell(&r.gap_pct),
        ));
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("missing or wrong header row")]
    BadHeader,
}

fn parse_opt<T: FromStr>(field: &str, line: usize, what: &str) -> Result<Option<T>, CsvError> {
    if field == "n/a" || field == "--" {
        return Ok(None);
    }
    field
        .parse::<T>()
        .map(Some)
        .map_err(|_| CsvError::Malformed {
            line,
            message: format!("bad {what} `{field}`"),
        })
}

/// Parses output of [`emit_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<RunRecord>, CsvError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == CSV_HEADER => {}
        _ => return Err(CsvError::BadHeader),
    }
    let mut records = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.trim().split(',').collect();
        if fields.len() != 14 {
            return Err(CsvError::Malformed {
                line,
                message: format!("expected 14 fields, got {}", fields.len()),
            });
        }
        let dims: Vec<&str> = fields[0].split('x').collect();
        let [nj, ni, nt] = dims.as_slice() else {
            return Err(CsvError::Malformed {
                line,
                message: format!("bad group `{}`", fields[0]),
            });
        };
        let dim = |s: &str| {
            s.parse::<usize>().map_err(|_| CsvError::Malformed {
                line,
                message: format!("bad group `{}`", fields[0]),
            })
        };
        let family = fields[1].parse::<Family>().map_err(|e| CsvError::Malformed {
            line,
            message: e,
        })?;
        let method = fields[3].parse::<Method>().map_err(|e| CsvError::Malformed {
            line,
            message: e,
        })?;
        records.push(RunRecord {
            group: (dim(nj)?, dim(ni)?, dim(nt)?),
            family,
            seed: parse_opt(fields[2], line, "seed")?.ok_or(CsvError::Malformed {
                line,
                message: "seed may not be n/a".into(),
            })?,
            method,
            ub: parse_opt(fields[4], line, "ub")?,
            lb: parse_opt(fields[5], line, "lb")?,
            root_bound: parse_opt(fields[6], line, "root_bound")?,
            pure_lp_bound: parse_opt(fields[7], line, "pure_lp_bound")?,
            time_s: parse_opt(fields[8], line, "time_s")?,
            nodes: parse_opt(fields[9], line, "nodes")?,
            cuts: parse_opt(fields[10], line, "cuts")?,
            proven_optimal: parse_opt(fields[11], line, "proven_optimal")?,
            gap_pct: parse_opt(fields[12], line, "gap_pct")?,
            red_pct: parse_opt(fields[13], line, "red_pct")?,
        });
    }
    Ok(records)
}

/// One aggregated table row per (group, family, method).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRow {
    pub group: (usize, usize, usize),
    pub family: Family,
    pub method: Method,
    pub runs: usize,
    pub failed: usize,
    pub solved: usize,
    /// Mean upper bound over non-failed runs.
    pub mean_ub: Option<f64>,
    /// Mean time over runs that proved optimality.
    pub mean_time_s: Option<f64>,
    /// Mean open gap over runs that did not prove optimality.
    pub mean_gap_pct: Option<f64>,
    pub mean_red_pct: Option<f64>,
}

/// Aggregates records per (group, family, method), in deterministic order.
pub fn aggregate(records: &[RunRecord]) -> Vec<GroupRow> {
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    let method_key = |m: Method| match m {
        Method::Std => (0usize, 0usize),
        Method::Fl => (1, 0),
        Method::Pfl => (2, 0),
        Method::Bc => (3, 0),
        Method::Mh(k) => (4, k),
    };
    sorted.sort_by_key(|r| (r.group, r.family.name(), method_key(r.method), r.seed));
    let mut rows: Vec<GroupRow> = Vec::new();
    for r in sorted {
        let matches_last = rows
            .last()
            .is_some_and(|g| g.group == r.group && g.family == r.family && g.method == r.method);
        if !matches_last {
            rows.push(GroupRow {
                group: r.group,
                family: r.family,
                method: r.method,
                runs: 0,
                failed: 0,
                solved: 0,
                mean_ub: None,
                mean_time_s: None,
                mean_gap_pct: None,
                mean_red_pct: None,
            });
        }
        let row = rows.last_mut().unwrap();
        row.runs += 1;
        match r.ub {
            None => row.failed += 1,
            Some(ub) => {
                accumulate(&mut row.mean_ub, ub, row.runs - row.failed);
                if let Some(p) = r.red_pct {
                    accumulate(&mut row.mean_red_pct, p, row.runs - row.failed);
                }
                if r.proven_optimal == Some(true) {
                    row.solved += 1;
                    if let Some(t) = r.time_s {
                        accumulate(&mut row.mean_time_s, t, row.solved);
                    }
                } else if let Some(g) = r.gap_pct {
                    let unsolved = row.runs - row.failed - row.solved;
                    accumulate(&mut row.mean_gap_pct, g, unsolved);
                }
            }
        }
    }
    rows
}

/// Running mean update: `mean` holds the mean of `count - 1` values.
fn accumulate(mean: &mut Option<f64>, value: f64, count: usize) {
    debug_assert!(count >= 1);
    let prev = mean.unwrap_or(0.0);
    *mean = Some(prev + (value - prev) / count as f64);
}

/// Renders aggregated rows as a markdown table. Undefined cells are `--`;
/// rows where every run failed show `n/a`.
pub fn markdown_table(rows: &[GroupRow]) -> String {
    let mut out = String::from(
        "| group | family | method | #opt | mean ub | mean time (s) | mean gap (%) | red (%) |\n\
         |---|---|---|---|---|---|---|---|\n",
    );
    let cell = |v: Option<f64>, all_failed: bool| {
        if all_failed {
            "n/a".to_string()
        } else {
            match v {
                Some(x) => format!("{x:.2}"),
                None => "--".to_string(),
            }
        }
    };
    for row in rows {
        let (nj, ni, nt) = row.group;
        let all_failed = row.failed == row.runs;
        out.push_str(&format!(
            "| {nj}x{ni}x{nt} | {} | {} | {}/{} | {} | {} | {} | {} |\n",
            row.family.name(),
            row.method,
            row.solved,
            row.runs,
            cell(row.mean_ub, all_failed),
            cell(row.mean_time_s, all_failed),
            cell(row.mean_gap_pct, all_failed),
            cell(row.mean_red_pct, all_failed),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolveConfig {
        SolveConfig::default()
    }

    #[test]
    fn method_names_round_trip() {
        for m in [
            Method::Std,
            Method::Fl,
            Method::Pfl,
            Method::Bc,
            Method::Mh(10),
        ] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("MH-0".parse::<Method>().is_err());
        assert!("GRB".parse::<Method>().is_err());
    }

    #[test]
    fn empty_seed_list_yields_empty_suite() {
        let records = run_suite(&[(2, 2, 3)], Family::Original, &[], &[Method::Std], &cfg(), 2);
        assert!(records.is_empty());
    }

    #[test]
    fn suite_produces_one_record_per_task_in_order() {
        let records = run_suite(
            &[(2, 1, 3)],
            Family::Original,
            &[1, 2],
            &[Method::Std, Method::Pfl],
            &cfg(),
            4,
        );
        assert_eq!(records.len(), 4);
        assert_eq!(records[0].method, Method::Std);
        assert_eq!(records[1].method, Method::Pfl);
        assert!(records.iter().all(|r| r.proven_optimal == Some(true)));
        // STD and PFL agree per seed when both prove optimality.
        for pair in records.chunks(2) {
            let (a, b) = (pair[0].ub.unwrap(), pair[1].ub.unwrap());
            assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()));
        }
        // red_pct only on PFL records.
        assert!(records[0].red_pct.is_none());
        assert!(records[1].red_pct.is_some());
    }

    #[test]
    fn csv_round_trips_and_recomputes_gap() {
        let mut records = run_suite(
            &[(1, 1, 3)],
            Family::N1,
            &[1, 2, 3],
            &[Method::Bc],
            &cfg(),
            1,
        );
        records.push(RunRecord::failed((9, 9, 9), Family::N2, 7, Method::Mh(5)));
        let text = emit_csv(&records);
        assert!(text.starts_with(CSV_HEADER));
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed, records);
        assert_eq!(aggregate(&parsed), aggregate(&records));
        for r in &parsed {
            if let (Some(ub), Some(lb), Some(gap)) = (r.ub, r.lb, r.gap_pct) {
                if ub > 0.0 {
                    assert!((gap - 100.0 * (ub - lb) / ub).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn parse_rejects_bad_rows() {
        assert!(matches!(parse_csv("nonsense\n"), Err(CsvError::BadHeader)));
        let bad = format!("{CSV_HEADER}\n2x2,original,1,STD,1,1,1,1,0,0,0,true,0,--\n");
        assert!(parse_csv(&bad).is_err());
        let bad = format!("{CSV_HEADER}\n2x2x2,original,1,STD,oops,1,1,1,0,0,0,true,0,--\n");
        assert!(parse_csv(&bad).is_err());
    }

    #[test]
    fn aggregate_single_record_equals_that_record() {
        let records = run_suite(&[(2, 2, 3)], Family::N2, &[5], &[Method::Fl], &cfg(), 1);
        let rows = aggregate(&records);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].runs, 1);
        assert_eq!(rows[0].solved, 1);
        assert_eq!(rows[0].mean_ub, records[0].ub);
        assert_eq!(rows[0].mean_gap_pct, None);
    }

    #[test]
    fn aggregate_marks_gap_dashes_when_all_solved() {
        let records = run_suite(
            &[(2, 2, 3)],
            Family::Original,
            &[1, 2, 3],
            &[Method::Pfl],
            &cfg(),
            3,
        );
        let rows = aggregate(&records);
        assert_eq!(rows[0].solved, 3);
        assert_eq!(rows[0].mean_gap_pct, None);
        let table = markdown_table(&rows);
        assert!(table.contains("| 3/3 |"));
        assert!(table.contains("--"));
    }

    #[test]
    fn failed_rows_render_na() {
        let records = vec![RunRecord::failed((2, 2, 2), Family::Original, 1, Method::Std)];
        let rows = aggregate(&records);
        assert_eq!(rows[0].failed, 1);
        assert!(markdown_table(&rows).contains("n/a"));
        assert!(emit_csv(&records).contains("n/a"));
    }
}
