use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sqconf_core::config::{config_for_board, ordered_for_board, BuildOptions, DEFAULT_CELL_BUDGET};
use sqconf_core::homology::{betti_numbers, Coefficients, HomologyOptions};
use sqconf_core::puzzle::{self, Board, Constraints, PuzzleState};
use sqconf_core::spectral::{build_double_complex, compute_pages, rightmost_cover, spectral_report};
use sqconf_core::sweep::{self, SweepSpec, TableFormat, CACHE_DIR_ENV};
use sqconf_core::wheels::enumerate_wheel_basis;
use sqconf_core::words::{reutenauer_basis, top_homology_basis};

/// Homology of configuration spaces of hard squares in a rectangle.
#[derive(Parser)]
#[command(name = "sqconf", version)]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare Betti numbers of square and point configurations over a range of boards.
    Sweep(SweepArgs),
    /// Homology of a single discrete configuration complex.
    Homology(HomologyArgs),
    /// Sliding-square state graphs.
    #[command(subcommand)]
    Puzzle(PuzzleCmd),
    /// Bases of the algebraic models.
    #[command(subcommand)]
    Basis(BasisCmd),
    /// Mayer–Vietoris spectral sequence of the right-most cover.
    #[command(subcommand)]
    Spectral(SpectralCmd),
}

#[derive(Args)]
struct SweepArgs {
    /// Number of squares, `N` or `A-B`.
    #[arg(long, default_value = "1-3")]
    n: String,
    #[arg(long, default_value_t = 6)]
    w_max: u32,
    #[arg(long, default_value_t = 6)]
    h_max: u32,
    #[arg(long, default_value_t = 2)]
    k_max: usize,
    #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
    budget: u64,
    #[arg(long, env = CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    jobs: Option<usize>,
    /// `q`, `z`, or a prime.
    #[arg(long, default_value = "q")]
    coefficients: String,
}

#[derive(Args)]
struct BoardArgs {
    #[arg(long)]
    w: u32,
    #[arg(long)]
    h: u32,
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct HomologyArgs {
    #[command(flatten)]
    board: BoardArgs,
    #[arg(long, default_value = "z")]
    coefficients: String,
    /// Build cells only up to this dimension; homology is reported below it.
    #[arg(long)]
    max_dim: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct PuzzleBoardArgs {
    #[arg(long)]
    w: u32,
    #[arg(long)]
    h: u32,
    /// Number of unit squares (ignored when --sizes is given).
    #[arg(long)]
    n: Option<usize>,
    /// Side length of each square, comma separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<u32>,
    /// Labels pinned to the right-most column, top to bottom.
    #[arg(long, value_delimiter = ',')]
    pinned: Vec<u32>,
    /// Labels forced into the right-most column in any order.
    #[arg(long, value_delimiter = ',')]
    right: Vec<u32>,
}

impl PuzzleBoardArgs {
    fn board(&self) -> Result<Board> {
        if !self.sizes.is_empty() {
            return Ok(Board::new(self.w, self.h, self.sizes.clone())?);
        }
        match self.n {
            Some(n) => Ok(Board::unit(self.w, self.h, n)),
            None => bail!("give --n or --sizes"),
        }
    }

    fn constraints(&self) -> Constraints {
        Constraints {
            pinned: self.pinned.clone(),
            right_column: self.right.clone(),
        }
    }
}

#[derive(Subcommand)]
enum PuzzleCmd {
    /// Count states and path-components.
    Components(PuzzleBoardArgs),
    /// Slide sequence between two states, as `x,y;x,y;...` anchors by label.
    Path {
        #[command(flatten)]
        board: PuzzleBoardArgs,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Parity class of a state with one empty cell.
    Parity {
        #[arg(long)]
        w: u32,
        #[arg(long)]
        h: u32,
        #[arg(long)]
        state: String,
    },
}

#[derive(Subcommand)]
enum BasisCmd {
    /// Wheel products spanning the k-th homology of n points in the plane.
    Wheels {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: usize,
    },
    /// Lie basis on the letters 1..=m.
    Reutenauer {
        #[arg(long)]
        m: u32,
    },
    /// Basis of the top homology with blocks of size at least r.
    Top {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 2)]
        r: usize,
    },
}

#[derive(Subcommand)]
enum SpectralCmd {
    /// Page ranks and the collapse verdict.
    Pages {
        #[command(flatten)]
        board: BoardArgs,
        /// Labels pinned to the right-most column, top to bottom.
        #[arg(long, value_delimiter = ',')]
        pinned: Vec<u32>,
        /// Last page to report; defaults to the stabilization page.
        #[arg(long)]
        pages: Option<usize>,
    },
}

fn parse_range(s: &str) -> Result<(u32, u32)> {
    let parse = |t: &str| t.trim().parse::<u32>().with_context(|| format!("bad number '{t}'"));
    match s.split_once('-') {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let v = parse(s)?;
            Ok((v, v))
        }
    }
}

fn parse_state(s: &str) -> Result<PuzzleState> {
    let anchors = s
        .split(';')
        .map(|p| {
            let (x, y) = p.split_once(',').with_context(|| format!("bad anchor '{p}'"))?;
            Ok((x.trim().parse()?, y.trim().parse()?))
        })
        .collect::<Result<Vec<(u32, u32)>>>()?;
    Ok(PuzzleState::new(anchors))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            let newline = if text.ends_with('\n') { "" } else { "\n" };
            match write!(stdout, "{text}{newline}") {
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                r => r.context("writing to stdout"),
            }
        }
    }
}

fn pretty(v: &serde_json::Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn lines<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| format!("{x}\n")).collect()
}

fn run(cli: Cli) -> Result<i32> {
    let mut code = 0;
    let text = match cli.command {
        Command::Sweep(a) => {
            let (n_min, n_max) = parse_range(&a.n)?;
            let spec = SweepSpec {
                n_min,
                n_max,
                w_max: a.w_max,
                h_max: a.h_max,
                k_max: a.k_max,
                coefficients: a.coefficients.parse()?,
                budget: a.budget,
                cache_dir: a.cache_dir,
                jobs: a.jobs,
            };
            let format: TableFormat = a.format.parse()?;
            let rows = sweep::stability_sweep(&spec)?;
            code = sweep::exit_code(&rows);
            sweep::render_table(&rows, format)
        }
        Command::Homology(a) => {
            let opts = BuildOptions {
                max_dim: a.max_dim,
                budget: a.budget,
            };
            let c = config_for_board(a.board.w, a.board.h, a.board.n, &opts)?;
            let coefficients: Coefficients = a.coefficients.parse()?;
            let hopts = HomologyOptions {
                max_degree: a.max_dim.map(|d| d.saturating_sub(1)),
                ..HomologyOptions::default()
            };
            let report = betti_numbers(&c.chain_complex(), coefficients, &hopts)?;
            pretty(&json!({
                "w": a.board.w,
                "h": a.board.h,
                "n": a.board.n,
                "cells": (0..c.degrees()).map(|k| c.count(k)).collect::<Vec<_>>(),
                "truncated": c.is_truncated(),
                "homology": report,
            }))?
        }
        Command::Puzzle(PuzzleCmd::Components(a)) => {
            let g = puzzle::enumerate_states(&a.board()?, &a.constraints())?;
            let (count, sizes) = puzzle::component_count(&g);
            pretty(&json!({
                "states": g.len(),
                "edges": g.edge_count(),
                "components": count,
                "sizes": sizes,
            }))?
        }
        Command::Puzzle(PuzzleCmd::Path { board, from, to }) => {
            let g = puzzle::enumerate_states(&board.board()?, &board.constraints())?;
            let path = puzzle::find_path(&g, &parse_state(&from)?, &parse_state(&to)?)?;
            if path.is_none() {
                code = 1;
            }
            pretty(&json!(path))?
        }
        Command::Puzzle(PuzzleCmd::Parity { w, h, state }) => {
            let s = parse_state(&state)?;
            let board = Board::unit(w, h, s.anchors.len());
            pretty(&json!(puzzle::parity_class(&board, &s)?))?
        }
        Command::Basis(BasisCmd::Wheels { n, k }) => lines(&enumerate_wheel_basis(n, k)),
        Command::Basis(BasisCmd::Reutenauer { m }) => {
            let letters: Vec<u32> = (1..=m).collect();
            lines(&reutenauer_basis(&letters)?)
        }
        Command::Basis(BasisCmd::Top { m, r }) => lines(&top_homology_basis(m, r)?),
        Command::Spectral(SpectralCmd::Pages { board, pinned, pages }) => {
            let c = ordered_for_board(board.w, board.h, board.n)?;
            let dc = build_double_complex(&rightmost_cover(&c, &pinned)?)?;
            let last = pages.unwrap_or((dc.pmax() + 2).max(1) as usize);
            let sp = compute_pages(&dc, last)?;
            pretty(&json!(spectral_report(&sp)))?
        }
    };
    emit(&cli.out, &text)?;
    Ok(code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
