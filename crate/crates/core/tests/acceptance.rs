//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test --release -p sqconf-core --test acceptance -- --nocapture`.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqconf_core::config::{config_for_board, ordered_for_board, BuildOptions};
use sqconf_core::homology::{betti_numbers, Coefficients, HomologyOptions};
use sqconf_core::puzzle::{
    component_count, enumerate_states, find_path, matches_skeleton, parity_class, replay, Board, Constraints,
};
use sqconf_core::spectral::{build_double_complex, check_collapse, compute_pages, rightmost_cover};
use sqconf_core::sweep::{stability_sweep, SweepSpec};
use sqconf_core::wheels::{betti_fn, enumerate_wheel_basis, er_entry_rank, BracketExpr};
use sqconf_core::words::{derangements, injective_word_complex, pi_basis_all, reutenauer_basis, top_homology_basis};

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> std::result::Result<(), String> {
    ensure(start.elapsed() <= limit, format!("took {:?}, limit {limit:?}", start.elapsed()))
}

fn wheel_basis_count() -> Check {
    let t = Instant::now();
    let b = enumerate_wheel_basis(8, 1);
    ensure(b.len() == 28, format!("{} elements", b.len()))?;
    within(t, Duration::from_secs(1))?;
    Ok("enumerate_wheel_basis(8,1) has 28 elements".into())
}

fn two_components() -> Check {
    let t = Instant::now();
    let g = enumerate_states(&Board::unit(2, 2, 3), &Constraints::default()).map_err(|e| e.to_string())?;
    let (count, sizes) = component_count(&g);
    ensure(count == 2 && sizes == [12, 12], format!("components {count} sizes {sizes:?}"))?;
    let (_, comp) = g.components();
    let mut class = [None, None];
    for (s, &c) in g.states().iter().zip(&comp) {
        let p = parity_class(g.board(), s).map_err(|e| e.to_string())?;
        ensure(*class[c].get_or_insert(p) == p, "parity varies within a component")?;
    }
    ensure(class[0] != class[1], "parity does not separate the components")?;
    let g2 = enumerate_states(&Board::unit(2, 2, 2), &Constraints::default()).map_err(|e| e.to_string())?;
    ensure(component_count(&g2).0 == 1, "two squares on 2x2 not connected")?;
    within(t, Duration::from_secs(1))?;
    Ok("2x2 with 3 squares: 2 components of 12, parity separates; 2 squares: connected".into())
}

fn integral_betti(w: u32, h: u32, n: usize) -> std::result::Result<Vec<usize>, String> {
    let c = config_for_board(w, h, n, &BuildOptions::default()).map_err(|e| e.to_string())?;
    let r = betti_numbers(&c.chain_complex(), Coefficients::Integers, &HomologyOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(!r.betti_only, "torsion not computed")?;
    ensure(r.summaries.iter().all(|s| s.torsion.is_empty()), "unexpected torsion")?;
    Ok(r.betti())
}

fn discrete_vs_points() -> Check {
    let t = Instant::now();
    for (w, n, expect) in [(2u32, 2usize, vec![1, 1]), (3, 3, vec![1, 3, 2])] {
        let b = integral_betti(w, w, n)?;
        let padded: Vec<usize> = (0..b.len().max(expect.len()))
            .map(|k| b.get(k).copied().unwrap_or(0))
            .collect();
        for (k, &v) in padded.iter().enumerate() {
            let want = expect.get(k).copied().unwrap_or(0);
            ensure(v == want, format!("DF_{n}({w}x{w}) beta_{k} = {v}, want {want}"))?;
            ensure(v as u64 == betti_fn(n as u32, k), format!("beta_{k} differs from points"))?;
        }
    }
    within(t, Duration::from_secs(120))?;
    Ok("DF_2(2x2) = (1,1), DF_3(3x3) = (1,3,2), torsion-free, equal to points".into())
}

fn stability() -> Check {
    let t = Instant::now();
    let rows = stability_sweep(&SweepSpec::default()).map_err(|e| e.to_string())?;
    ensure(rows.iter().all(|r| r.betti_square.is_some()), "budget exhausted")?;
    let stable: Vec<_> = rows.iter().filter(|r| r.stable_range).collect();
    let k1: Vec<_> = rows.iter().filter(|r| r.k1_range).collect();
    for r in stable.iter().chain(&k1) {
        ensure(
            r.agrees == Some(true),
            format!("n={} w={} h={} k={}: {:?} vs {}", r.n, r.w, r.h, r.k, r.betti_square, r.betti_point),
        )?;
    }
    within(t, Duration::from_secs(30 * 60))?;
    Ok(format!("{} stable-range rows and {} k=1 rows agree", stable.len(), k1.len()))
}

const PI_4_2: &str = "[[1,2],3] [[1,3],2] 1[2,3] 2[1,3] 3[1,2] 123 [[1,2],4] [[1,4],2] 1[2,4] 2[1,4] 4[1,2] 124 \
    [[1,3],4] [[1,4],3] 1[3,4] 3[1,4] 4[1,3] 134 [[2,3],4] [[2,4],3] 2[3,4] 3[2,4] 4[2,3] 234";
const PI_4_3: &str = "1234 12[3,4] 13[2,4] 14[2,3] 23[1,4] 24[1,3] 34[1,2] 1[[2,3],4] 1[[2,4],3] 2[[1,3],4] \
    2[[1,4],3] 3[[1,2],4] 3[[1,4],2] 4[[1,2],3] 4[[1,3],2] [1,2][3,4] [1,3][2,4] [1,4][2,3] [[[1,2],3],4] \
    [[[1,2],4],3] [[[1,3],2],4] [[[1,3],4],2] [[[1,4],2],3] [[[1,4],3],2]";
const TOP_4_2: &str = "[1,2][3,4] [1,3][2,4] [1,4][2,3] [[[1,2],3],4] [[[1,2],4],3] [[[1,3],2],4] [[[1,3],4],2] \
    [[[1,4],2],3] [[[1,4],3],2]";
const TOP_4_3: &str = "[[[1,2],3],4] [[[1,2],4],3] [[[1,3],2],4] [[[1,3],4],2] [[[1,4],2],3] [[[1,4],3],2]";

fn same_set<T: ToString>(got: &[T], listed: &str, name: &str) -> std::result::Result<(), String> {
    let got: Vec<String> = got.iter().map(T::to_string).collect();
    let want: BTreeSet<&str> = listed.split_whitespace().collect();
    ensure(
        got.len() == want.len() && got.iter().all(|g| want.contains(g.as_str())),
        format!("{name}: got {got:?}"),
    )
}

fn injective_words() -> Check {
    let t = Instant::now();
    let mut fact = 1usize;
    for m in 2..=7u32 {
        fact *= (m - 1) as usize;
        let letters: Vec<u32> = (1..=m).collect();
        let b = reutenauer_basis(&letters).map_err(|e| e.to_string())?;
        ensure(b.len() == fact, format!("Lie basis on {m} letters has {}", b.len()))?;
    }
    let err = |e: sqconf_core::Error| e.to_string();
    same_set(&pi_basis_all(4, 2).map_err(err)?, PI_4_2, "Pi^4_2")?;
    same_set(&pi_basis_all(4, 3).map_err(err)?, PI_4_3, "Pi^4_3")?;
    same_set(&top_homology_basis(4, 2).map_err(err)?, TOP_4_2, "Pi*_3")?;
    same_set(&top_homology_basis(4, 3).map_err(err)?, TOP_4_3, "Pi*_3(3)")?;
    for m in 1..=5u32 {
        let cc = injective_word_complex(m);
        let r = betti_numbers(&cc, Coefficients::Integers, &HomologyOptions::default()).map_err(err)?;
        ensure(!r.betti_only, "SNF skipped")?;
        let top = top_homology_basis(m, 2).map_err(err)?.len();
        for s in &r.summaries {
            ensure(s.torsion.is_empty(), format!("torsion in Inj({m})"))?;
            let want = if s.degree == m as usize { top } else { 0 };
            ensure(s.betti == want, format!("Inj({m}) degree {}: {} vs {want}", s.degree, s.betti))?;
        }
        ensure(top as u64 == derangements(m), "top rank is not the derangement number")?;
    }
    within(t, Duration::from_secs(300))?;
    Ok("Lie basis sizes (m-1)!, listed bases reproduced, Inj(m) homology concentrated on top".into())
}

fn spectral() -> Check {
    let t = Instant::now();
    let err = |e: sqconf_core::Error| e.to_string();
    let dc = build_double_complex(&rightmost_cover(&ordered_for_board(2, 2, 2).map_err(err)?, &[]).map_err(err)?)
        .map_err(err)?;
    let sp = compute_pages(&dc, 4).map_err(err)?;
    let column: Vec<usize> = (0..4).map(|q| sp.rank(1, -1, q)).collect();
    ensure(column == [1, 1, 0, 0], format!("E^1 augmentation column {column:?}"))?;
    ensure(sp.differential_rank(2, 1, 0) == 1, "d^2 out of (1,0) does not have rank 1")?;
    let verdict = check_collapse(&sp);
    ensure(verdict.passed, verdict.message)?;
    for (w, n) in [(2u32, 1u32), (2, 2), (3, 2), (3, 3)] {
        let cov = rightmost_cover(&ordered_for_board(w, w, n as usize).map_err(err)?, &[]).map_err(err)?;
        let sp = compute_pages(&build_double_complex(&cov).map_err(err)?, 2).map_err(err)?;
        ensure(sp.prime_discrepancies == 0, "prime ranks disagree")?;
        for p in -1..=n as i64 {
            for q in 0..=n as usize {
                let (got, want) = (sp.rank(2, p, q as i64) as u64, er_entry_rank(n, p, q, 2));
                ensure(got == want, format!("n={n} {w}x{w} E^2_({p},{q}) = {got}, want {want}"))?;
            }
        }
    }
    within(t, Duration::from_secs(300))?;
    Ok("E^1 column (1,1,0), d^2 rank 1, collapse, E^2 matches closed form for n <= 3".into())
}

fn algebra() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..1000 {
        let [a, b, _] = common::random_triple(&mut rng, 7);
        ensure(common::antisymmetry_holds(&a, &b), format!("antisymmetry #{i}: {a} / {b}"))?;
    }
    for i in 0..1000 {
        let [a, b, c] = common::random_triple(&mut rng, 7);
        ensure(common::jacobi_holds(&a, &b, &c), format!("Jacobi #{i}: {a} / {b} / {c}"))?;
    }
    for i in 0..1000 {
        let total = rng.gen_range(2..=9);
        let labels: Vec<u32> = (1..=total).collect();
        let ws = common::random_wheels(&mut rng, &labels, 2);
        ensure(common::product_commutation_holds(&ws[0], &ws[1]), format!("product sign #{i}"))?;
    }
    for i in 0..200 {
        let mut labels: Vec<u32> = (1..=6).collect();
        labels.shuffle(&mut rng);
        let leaves: Vec<BracketExpr> = labels.iter().map(|&l| BracketExpr::leaf(&[l]).unwrap()).collect();
        let e = common::random_tree(&mut rng, leaves);
        ensure(common::confluent(&mut rng, &e), format!("confluence #{i}: {e}"))?;
    }
    Ok(format!("1000 antisymmetry, 1000 Jacobi, 1000 product-sign, 200 confluence instances in {:?}", t.elapsed()))
}

fn skeleton_and_paths() -> Check {
    let t = Instant::now();
    let err = |e: sqconf_core::Error| e.to_string();
    let mut boards = 0;
    for w in 2..=8u32 {
        for h in 2..=8u32 {
            for n in 1..=(w * h) as usize {
                let states: u64 = (0..n as u64).map(|i| u64::from(w * h) - i).product();
                if states > 100_000 {
                    break;
                }
                let g = enumerate_states(&Board::unit(w, h, n), &Constraints::default()).map_err(err)?;
                let opts = BuildOptions {
                    max_dim: Some(1),
                    ..BuildOptions::default()
                };
                let c = config_for_board(w, h, n, &opts).map_err(err)?;
                ensure(matches_skeleton(&g, &c).map_err(err)?, format!("{w}x{h} n={n}"))?;
                boards += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    let graphs: Vec<_> = [(2u32, 2u32, 3usize), (3, 2, 4), (3, 3, 5), (3, 3, 8), (4, 3, 6)]
        .iter()
        .map(|&(w, h, n)| enumerate_states(&Board::unit(w, h, n), &Constraints::default()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    while checked < 100 {
        let g = &graphs[rng.gen_range(0..graphs.len())];
        let (_, comp) = g.components();
        let (i, j) = (rng.gen_range(0..g.len()), rng.gen_range(0..g.len()));
        if comp[i] != comp[j] {
            continue;
        }
        let (a, b) = (&g.states()[i], &g.states()[j]);
        let path = find_path(g, a, b).map_err(err)?.ok_or("no path in one component")?;
        ensure(&replay(g.board(), a, &path).map_err(err)? == b, "certificate does not replay")?;
        checked += 1;
    }
    Ok(format!("{boards} boards match, 100 path certificates replay ({:?})", t.elapsed()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("wheel basis count", wheel_basis_count),
        ("two puzzle components", two_components),
        ("discrete model vs points", discrete_vs_points),
        ("stability sweep", stability),
        ("injective words", injective_words),
        ("spectral engine", spectral),
        ("algebra relations", algebra),
        ("skeleton and paths", skeleton_and_paths),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
