//! Stability sweeps: Betti numbers of `DF_n(R*_{w,h})` against those of the
//! configuration space of `n` points in the plane, with an on-disk cache.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{config_for_board, BuildOptions, DEFAULT_CELL_BUDGET, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::homology::{betti_numbers, Coefficients, HomologyOptions};
use crate::wheels::betti_fn;

/// Environment variable naming the default cache directory.
pub const CACHE_DIR_ENV: &str = "SQCONF_CACHE_DIR";

/// Column header of the CSV table.
pub const CSV_HEADER: &str = "n,w,h,k,betti_square,betti_point,stable_range,k1_range,agrees,cells,seconds";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::invalid(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n_min: u32,
    pub n_max: u32,
    pub w_max: u32,
    pub h_max: u32,
    pub k_max: usize,
    pub coefficients: Coefficients,
    pub budget: u64,
    pub cache_dir: Option<PathBuf>,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            n_min: 1,
            n_max: 3,
            w_max: 6,
            h_max: 6,
            k_max: 2,
            coefficients: Coefficients::Rationals,
            budget: DEFAULT_CELL_BUDGET,
            cache_dir: None,
            jobs: None,
        }
    }
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::invalid("empty or invalid n range"));
        }
        if self.w_max < 2 || self.h_max < 2 {
            return Err(Error::invalid("boards start at 2 x 2"));
        }
        if self.budget == 0 {
            return Err(Error::invalid("budget must be positive"));
        }
        if let Coefficients::Prime(p) = self.coefficients {
            crate::homology::rank_mod_p(&crate::SparseMatrix::zeros(0, 0), p)?;
        }
        Ok(())
    }
}

/// Homological stable range: `min{w,h} >= k+2` and
/// `wh - n >= max{(k+1)(k+2), hk+2}` with `h = min{w,h}`.
pub fn in_stable_range(n: u32, w: u32, h: u32, k: usize) -> bool {
    let (lo, area) = (u64::from(w.min(h)), u64::from(w) * u64::from(h));
    let k = k as u64;
    let Some(free) = area.checked_sub(u64::from(n)) else { return false };
    lo >= k + 2 && free >= ((k + 1) * (k + 2)).max(lo * k + 2)
}

/// First-homology range: `min{w,h} >= 3` and `wh - n >= 6`.
pub fn in_k1_range(n: u32, w: u32, h: u32, k: usize) -> bool {
    let area = u64::from(w) * u64::from(h);
    k == 1 && w.min(h) >= 3 && area >= u64::from(n) + 6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u32,
    pub w: u32,
    pub h: u32,
    pub k: usize,
    /// `None` when the complex exceeded the cell budget.
    pub betti_square: Option<usize>,
    pub betti_point: u64,
    pub stable_range: bool,
    pub k1_range: bool,
    pub agrees: Option<bool>,
    pub cells: Option<u64>,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct CachedBetti {
    betti: Option<Vec<usize>>,
    cells: Option<u64>,
    seconds: f64,
}

#[derive(Serialize)]
struct CacheKey<'a> {
    version: u32,
    w: u32,
    h: u32,
    n: u32,
    max_dim: usize,
    subdivision: &'a str,
    coefficients: Coefficients,
    budget: u64,
}

fn cache_path(dir: &Path, key: &CacheKey) -> PathBuf {
    let json = serde_json::to_vec(key).expect("cache key serializes");
    dir.join(format!("{}.json", hex::encode(Sha256::digest(&json))))
}

fn read_cache(path: &Path) -> Option<CachedBetti> {
    let bytes = fs::read(path).ok()?;
    serde_json::from_slice(&bytes).ok()
}

fn write_cache(dir: &Path, path: &Path, value: &CachedBetti) -> Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    serde_json::to_writer(&mut tmp, value).map_err(|e| Error::Format(e.to_string()))?;
    tmp.flush().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn compute_betti(w: u32, h: u32, n: u32, spec: &SweepSpec) -> Result<CachedBetti> {
    let start = Instant::now();
    let opts = BuildOptions {
        max_dim: Some(spec.k_max + 1),
        budget: spec.budget,
    };
    let c = match config_for_board(w, h, n as usize, &opts) {
        Ok(c) => c,
        Err(Error::BudgetExceeded { .. }) => {
            return Ok(CachedBetti {
                betti: None,
                cells: None,
                seconds: start.elapsed().as_secs_f64(),
            })
        }
        Err(e) => return Err(e),
    };
    let hopts = HomologyOptions {
        max_degree: Some(spec.k_max),
        ..HomologyOptions::default()
    };
    let mut betti = betti_numbers(&c.chain_complex(), spec.coefficients, &hopts)?.betti();
    betti.resize(spec.k_max + 1, 0);
    Ok(CachedBetti {
        betti: Some(betti),
        cells: Some(c.total_cells() as u64),
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn board_betti(w: u32, h: u32, n: u32, spec: &SweepSpec) -> Result<CachedBetti> {
    // DF_n(R*_{w,h}) and DF_n(R*_{h,w}) are isomorphic
    let (w, h) = (w.max(h), w.min(h));
    let Some(dir) = &spec.cache_dir else {
        return compute_betti(w, h, n, spec);
    };
    let key = CacheKey {
        version: FORMAT_VERSION,
        w,
        h,
        n,
        max_dim: spec.k_max + 1,
        subdivision: "cubical",
        coefficients: spec.coefficients,
        budget: spec.budget,
    };
    let path = cache_path(dir, &key);
    if let Some(hit) = read_cache(&path) {
        return Ok(hit);
    }
    let value = compute_betti(w, h, n, spec)?;
    write_cache(dir, &path, &value)?;
    Ok(value)
}

/// One row per `(n, w, h, k)`, ordered lexicographically.
pub fn stability_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    if let Some(dir) = &spec.cache_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut boards = Vec::new();
    for n in spec.n_min..=spec.n_max {
        for w in 2..=spec.w_max {
            for h in 2..=spec.h_max {
                boards.push((n, w, h));
            }
        }
    }
    let run = || -> Result<Vec<CachedBetti>> {
        boards.par_iter().map(|&(n, w, h)| board_betti(w, h, n, spec)).collect()
    };
    let results = match spec.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::invalid(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let mut rows = Vec::new();
    for (&(n, w, h), res) in boards.iter().zip(results) {
        for k in 0..=spec.k_max {
            let betti_square = res.betti.as_ref().map(|b| b[k]);
            let betti_point = betti_fn(n, k);
            rows.push(SweepRow {
                n,
                w,
                h,
                k,
                betti_square,
                betti_point,
                stable_range: in_stable_range(n, w, h, k),
                k1_range: in_k1_range(n, w, h, k),
                agrees: betti_square.map(|b| b as u64 == betti_point),
                cells: res.cells,
                seconds: res.seconds,
            });
        }
    }
    Ok(rows)
}

/// Exit status of a sweep: 0 when every check passes, 2 when a row inside
/// a proven range disagrees, 3 when the only problem is budget exhaustion.
pub fn exit_code(rows: &[SweepRow]) -> i32 {
    let violation = rows
        .iter()
        .any(|r| (r.stable_range || r.k1_range) && r.agrees == Some(false));
    if violation {
        2
    } else if rows.iter().any(|r| r.betti_square.is_none()) {
        3
    } else {
        0
    }
}

fn opt<T: ToString>(v: &Option<T>, none: &str) -> String {
    v.as_ref().map_or_else(|| none.to_string(), T::to_string)
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{:.6}",
            r.n,
            r.w,
            r.h,
            r.k,
            opt(&r.betti_square, "budget-exceeded"),
            r.betti_point,
            r.stable_range,
            r.k1_range,
            opt(&r.agrees, ""),
            opt(&r.cells, ""),
            r.seconds
        );
    }
    out
}

pub fn to_json(rows: &[SweepRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

pub fn render_table(rows: &[SweepRow], format: TableFormat) -> String {
    match format {
        TableFormat::Csv => to_csv(rows),
        TableFormat::Json => to_json(rows),
    }
}

/// Writes the table to `path`.
pub fn emit_table(rows: &[SweepRow], format: TableFormat, path: &Path) -> Result<()> {
    fs::write(path, render_table(rows, format)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: u32, w: u32, h: u32, k: usize) -> SweepSpec {
        SweepSpec {
            n_min: n,
            n_max: n,
            w_max: w,
            h_max: h,
            k_max: k,
            ..SweepSpec::default()
        }
    }

    fn row(rows: &[SweepRow], n: u32, w: u32, h: u32, k: usize) -> SweepRow {
        rows.iter()
            .find(|r| (r.n, r.w, r.h, r.k) == (n, w, h, k))
            .cloned()
            .unwrap()
    }

    #[test]
    fn range_arithmetic() {
        assert!(in_stable_range(3, 3, 3, 1));
        assert!(!in_stable_range(3, 3, 2, 1));
        assert!(in_k1_range(3, 3, 3, 1));
        assert!(!in_k1_range(4, 3, 3, 1));
        assert!(!in_k1_range(3, 3, 3, 2));
        assert!(in_stable_range(2, 2, 2, 0));
        assert!(!in_stable_range(40, 2, 2, 0));
    }

    #[test]
    fn small_rows() {
        let rows = stability_sweep(&spec(3, 3, 3, 1)).unwrap();
        let r = row(&rows, 3, 3, 3, 1);
        assert_eq!((r.betti_square, r.betti_point, r.stable_range, r.agrees), (Some(3), 3, true, Some(true)));
        let r = row(&rows, 3, 3, 2, 1);
        assert!(!r.stable_range);
        assert!(r.betti_square.unwrap() > 3);
        let rows = stability_sweep(&spec(2, 2, 2, 1)).unwrap();
        assert_eq!(row(&rows, 2, 2, 2, 1).betti_square, Some(1));
        assert_eq!(exit_code(&rows), 0);
    }

    #[test]
    fn transposed_boards_agree() {
        let rows = stability_sweep(&spec(3, 4, 4, 2)).unwrap();
        for r in &rows {
            assert_eq!(r.betti_square, row(&rows, r.n, r.h, r.w, r.k).betti_square);
        }
    }

    #[test]
    fn budget_rows_are_marked() {
        let s = SweepSpec { budget: 10, ..spec(2, 3, 3, 1) };
        let rows = stability_sweep(&s).unwrap();
        assert!(rows.iter().any(|r| r.betti_square.is_none() && r.agrees.is_none() && r.cells.is_none()));
        assert_eq!(exit_code(&rows), 3);
        assert!(to_csv(&rows).contains("budget-exceeded"));
    }

    #[test]
    fn exit_code_flags_violations() {
        let mut rows = stability_sweep(&spec(2, 2, 2, 0)).unwrap();
        rows[0].stable_range = true;
        rows[0].agrees = Some(false);
        assert_eq!(exit_code(&rows), 2);
    }

    #[test]
    fn csv_header_only() {
        assert_eq!(to_csv(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = SweepSpec {
            cache_dir: Some(dir.path().join("cache")),
            ..spec(2, 3, 3, 1)
        };
        let cold = stability_sweep(&s).unwrap();
        let files = fs::read_dir(dir.path().join("cache")).unwrap().count();
        // transposes share entries
        assert_eq!(files, 3);
        let warm = stability_sweep(&s).unwrap();
        assert_eq!(cold, warm);
        assert_eq!(to_csv(&cold), to_csv(&warm));
    }

    #[test]
    fn unwritable_cache_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain-file");
        fs::write(&file, b"x").unwrap();
        let s = SweepSpec {
            cache_dir: Some(file.clone()),
            ..spec(1, 2, 2, 0)
        };
        match stability_sweep(&s) {
            Err(Error::Io { path, .. }) => assert_eq!(path, file),
            other => panic!("expected i/o error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(stability_sweep(&spec(0, 3, 3, 1)).is_err());
        assert!(stability_sweep(&SweepSpec { budget: 0, ..spec(1, 3, 3, 1) }).is_err());
        assert!(stability_sweep(&SweepSpec { w_max: 1, ..spec(1, 3, 3, 1) }).is_err());
    }
}
