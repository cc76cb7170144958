//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use normloc::expanders::{
    cheeger, decay_experiment, family, projection_approximant, spectrum, FamilySpec, Method, Multigraph, CHEEGER_CAP,
};
use normloc::io;
use normloc::operators::{localize_vector, opa_estimate, random_band_operator, Side};
use normloc::scalar::rational;
use normloc::space::{build_graph_space, FiniteMetricSpace, Measure, Subset};
use normloc::sparsify::{
    best_decomposition, game_value, sparsify_interval, verify_decomposition, GridSparsifier, IntervalSparsifier,
    Sparsifier,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Approximant degrees of the SL(2, Z/p) family, p = 3, 5, 7, 11, at ε = 0.05.
const SL2_GOLDEN_DEGREES: [usize; 4] = [4, 6, 7, 9];
/// Approximant degrees of C₁₀₀, C₂₀₀, C₄₀₀ at ε = 0.05.
const CYCLE_GOLDEN_DEGREES: [usize; 3] = [59, 118, 235];

fn random_measure(n: usize, rng: &mut ChaCha8Rng) -> Measure<f64> {
    let exp = Exp::new(1.0).unwrap();
    let w: Vec<f64> = match rng.random_range(0..4) {
        0 => vec![1.0; n],
        1 => (0..n).map(|_| exp.sample(rng)).collect(),
        2 => (0..n).map(|_| if rng.random_bool(0.02) { rng.random_range(0.0..1e6) } else { 0.0 }).collect(),
        _ => {
            let c = rng.random_range(0..n) as f64;
            let s = rng.random_range(1.0..50.0);
            (0..n).map(|x| (-((x as f64 - c) / s).powi(2)).exp()).collect()
        }
    };
    if w.iter().all(|x| *x == 0.0) {
        return Measure::point_mass(n, rng.random_range(0..n)).unwrap();
    }
    Measure::new(w).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::INFINITY;
    for i in 0..500 {
        let n = rng.random_range(1..=10_000);
        let (m, k) = (rng.random_range(1..=50), rng.random_range(2..=20));
        let mu = random_measure(n, &mut rng);
        let space = FiniteMetricSpace::<f64>::path(n).unwrap();
        let d = sparsify_interval(&mu, m, k).map_err(|e| format!("measure {i}: {e}"))?;
        let c = 1.0 - 1.0 / k as f64;
        let r = verify_decomposition(&space, &d, &mu, &(m as f64), &((k * m) as f64), &c).map_err(|e| e.to_string())?;
        ensure!(r.passes(), "measure {i} (n={n}, m={m}, k={k}) fails: {r:?}");
        let excess = r.mass_ratio - (1.0 - 1.0 / (k + 1) as f64);
        ensure!(excess >= -1e-12, "measure {i}: ratio {} below k/(k+1)", r.mass_ratio);
        worst = worst.min(excess);
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(10), "took {t:?}");
    Ok(format!("500 measures verified, min slack over k/(k+1) {worst:.3e}, {t:.2?}"))
}

fn small_corpus() -> Vec<(String, FiniteMetricSpace<f64>)> {
    let mut out = Vec::new();
    for n in 1..=6 {
        out.push((format!("path{n}"), FiniteMetricSpace::path(n).unwrap()));
    }
    for n in [4, 5, 7] {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
        out.push((format!("cycle{n}"), build_graph_space(n, &edges).unwrap()));
    }
    out.push(("grid2x3".into(), FiniteMetricSpace::grid(2, 3).unwrap()));
    out.push(("grid3x3".into(), FiniteMetricSpace::grid(3, 3).unwrap()));
    out.push(("petersen".into(), Multigraph::new(10, &petersen()).unwrap().metric_space().unwrap()));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for t in 0..4 {
        let n = rng.random_range(5..=10);
        let mut edges: Vec<_> = (1..n).map(|i| (rng.random_range(0..i), i, 1)).collect();
        edges.push((0, n - 1, 1));
        out.push((format!("tree+{t}"), build_graph_space(n, &edges).unwrap()));
    }
    out
}

fn petersen() -> Vec<(usize, usize, u32)> {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5, 1));
        e.push((i, i + 5, 1));
        e.push((5 + i, 5 + (i + 2) % 5, 1));
    }
    e
}

fn criterion_2() -> Outcome {
    let p3 = FiniteMetricSpace::<BigRational>::path(3).unwrap();
    let g = game_value(&p3, &rational(2, 1), &rational(0, 1), 14).map_err(|e| e.to_string())?;
    ensure!(g.value == rational(1, 2), "c*(path3, m=2, R=0) = {}", g.value);
    let one = FiniteMetricSpace::<BigRational>::path(1).unwrap();
    let g = game_value(&one, &rational(1, 1), &rational(0, 1), 14).map_err(|e| e.to_string())?;
    ensure!(g.value.is_one(), "single point gives {}", g.value);

    let mut checks = 0;
    for (name, space) in small_corpus() {
        let diam = space.diameter_all();
        let mut by_m: Vec<Vec<f64>> = Vec::new();
        for m in 1..=4 {
            let mut row = Vec::new();
            for r in 0..=(diam as usize + 1) {
                let (m, r) = (m as f64, r as f64);
                let g = game_value(&space, &m, &r, 14).map_err(|e| format!("{name}: {e}"))?;
                let (_, ratio) = best_decomposition(&space, &g.mu_star, &m, &r, 16).map_err(|e| e.to_string())?;
                ensure!((ratio - g.value).abs() <= 1e-9, "{name} m={m} R={r}: game {} vs oracle {ratio}", g.value);
                if r >= diam {
                    ensure!((g.value - 1.0).abs() <= 1e-9, "{name}: R ≥ diam gives {}", g.value);
                }
                row.push(g.value);
                checks += 1;
            }
            ensure!(row.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{name} m={m}: not nondecreasing in R: {row:?}");
            by_m.push(row);
        }
        for w in by_m.windows(2) {
            ensure!(w[0].iter().zip(&w[1]).all(|(a, b)| *b <= a + 1e-9), "{name}: not nonincreasing in m");
        }
    }
    Ok(format!("{checks} games match the exhaustive oracle; hand values and monotonicity hold"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let space = FiniteMetricSpace::<f64>::path(300).unwrap();
    let k = 10;
    let sparsifier = IntervalSparsifier { k };
    let floor = (1.0 - 1.0 / k as f64).sqrt() * (1.0 - 1e-9);
    let mut worst = f64::INFINITY;
    for trial in 0..200u64 {
        let r = (trial % 4) as usize;
        let h = 1 + (trial / 4 % 2) as usize;
        let m = 2 * r + 1;
        let op = random_band_operator(&space, &(r as f64), h, 1000 + trial, 1.0).map_err(|e| e.to_string())?;
        let rep = localize_vector(&space, &op, m, &sparsifier, None).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure!(rep.ratio >= floor, "trial {trial}: ratio {} below {floor}", rep.ratio);
        let budget = (k * 3 * m + 2 * m) as f64;
        ensure!(rep.support_diameter <= budget, "trial {trial}: diameter {} > {budget}", rep.support_diameter);
        let chain = rep.chain.as_ref().expect("sparsifier run records its chain");
        ensure!(chain.holds(), "trial {trial}: chain fails {chain:?}");
        worst = worst.min(rep.ratio);
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(60), "took {t:?}");
    Ok(format!("200 operators, min ratio {worst:.6} ≥ {floor:.6}, chains hold, {t:.2?}"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut largest = 0.0f64;
    let mut nontrivial = 0;
    for trial in 0..100u64 {
        let space = match trial % 3 {
            0 => FiniteMetricSpace::<f64>::path(rng.random_range(5..60)).unwrap(),
            1 => FiniteMetricSpace::grid(rng.random_range(2..7), rng.random_range(2..7)).unwrap(),
            _ => {
                let n = rng.random_range(5..40);
                let edges: Vec<_> = (1..n).map(|i| (rng.random_range(0..i), i, 1)).collect();
                build_graph_space(n, &edges).unwrap()
            }
        };
        let n = space.len();
        let k = rng.random_range(0..5) as f64;
        let a = random_band_operator(&space, &k, rng.random_range(1..3), trial, 1.0).map_err(|e| e.to_string())?;
        let mut idx: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.2)).collect();
        idx.push(rng.random_range(0..n));
        let u = Subset::new(n, idx).unwrap();
        let far = space.neighborhood(&u, &k).unwrap().complement();
        if far.is_empty() {
            continue;
        }
        nontrivial += 1;
        let b = a.project(&u, Side::Left).and_then(|b| b.project(&far, Side::Right)).map_err(|e| e.to_string())?;
        for x in 0..n {
            for y in 0..n {
                largest = largest.max(b.block_norm(x, y));
            }
        }
    }
    ensure!(largest <= 1e-14, "largest block {largest:e}");
    Ok(format!("100 instances ({nontrivial} with nonempty far set), largest block {largest:e}"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let spec = FamilySpec::Sl2 { primes: vec![3, 5, 7, 11] };
    let rows = decay_experiment::<f64>(&spec, &2.0, 0.05, Method::Chebyshev).map_err(|e| e.to_string())?;
    ensure!(rows.len() == 4, "{} rows", rows.len());
    let sizes: Vec<usize> = rows.iter().map(|r| r.vertices).collect();
    ensure!(sizes == [24, 120, 336, 1320], "sizes {sizes:?}");
    for r in &rows {
        ensure!(r.norm >= 0.95, "|V|={}: norm {}", r.vertices, r.norm);
        ensure!(r.ratio <= r.bound + 1e-9, "|V|={}: ratio {} > bound {}", r.vertices, r.ratio, r.bound);
    }
    ensure!(rows.windows(2).all(|w| w[1].bound < w[0].bound), "bound column not strictly decreasing");
    let degrees: Vec<usize> = rows.iter().map(|r| r.degree).collect();
    ensure!(degrees == SL2_GOLDEN_DEGREES, "degrees {degrees:?} differ from {SL2_GOLDEN_DEGREES:?}");
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(120), "took {t:?}");
    let ratios: Vec<String> = rows.iter().map(|r| format!("{:.4}", r.ratio)).collect();
    Ok(format!("ratios [{}], degrees {degrees:?}, {t:.2?}", ratios.join(", ")))
}

fn criterion_6() -> Outcome {
    let mut degrees = Vec::new();
    for n in [100usize, 200, 400] {
        let g = Multigraph::cycle(n).unwrap();
        let l1 = spectrum::<f64>(&g, false).map_err(|e| e.to_string())?.lambda1;
        let closed = 2.0 * (1.0 - (2.0 * std::f64::consts::PI / n as f64).cos());
        ensure!((l1 - closed).abs() <= 1e-9, "C{n}: λ₁ {l1} vs {closed}");
        degrees.push(projection_approximant::<f64>(&g, 0.05, Method::Chebyshev).map_err(|e| e.to_string())?.degree);
    }
    ensure!(degrees.windows(2).all(|w| w[1] > w[0]), "degrees {degrees:?} not increasing");
    ensure!(degrees == CYCLE_GOLDEN_DEGREES, "degrees {degrees:?} differ from {CYCLE_GOLDEN_DEGREES:?}");
    Ok(format!("λ₁ matches closed form, degrees {degrees:?}"))
}

fn criterion_7() -> Outcome {
    let mut corpus: Vec<(String, Multigraph)> = Vec::new();
    for n in 3..=12 {
        corpus.push((format!("C{n}"), Multigraph::cycle(n).unwrap()));
    }
    for n in 2..=12 {
        corpus.push((format!("P{n}"), Multigraph::path(n).unwrap()));
        corpus.push((format!("K{n}"), Multigraph::complete(n).unwrap()));
    }
    for (d, sizes) in [(3usize, vec![4, 6, 8, 10, 12]), (4, vec![5, 7, 9, 11, 12])] {
        for n in sizes {
            corpus.push((format!("R{d}_{n}"), Multigraph::random_regular(n, d, (d * 100 + n) as u64).unwrap()));
        }
    }
    for (name, g) in &corpus {
        let h = cheeger(g, CHEEGER_CAP).map_err(|e| e.to_string())?;
        let hv = h.value.to_f64().unwrap();
        let l1 = spectrum::<f64>(g, false).map_err(|e| e.to_string())?.lambda1;
        ensure!(l1 / 2.0 <= hv + 1e-12, "{name}: λ₁/2 = {} > h = {hv}", l1 / 2.0);
        let upper = (2.0 * g.max_degree() as f64 * l1).sqrt();
        ensure!(hv <= upper + 1e-12, "{name}: h = {hv} > {upper}");
    }
    let exact = |g: Multigraph| cheeger(&g, CHEEGER_CAP).unwrap().value;
    ensure!(exact(Multigraph::cycle(4).unwrap()) == 1.into(), "h(C4) ≠ 1");
    ensure!(exact(Multigraph::complete(4).unwrap()) == 2.into(), "h(K4) ≠ 2");
    let l1 = |g: Multigraph| spectrum::<f64>(&g, false).unwrap().lambda1;
    ensure!((l1(Multigraph::cycle(4).unwrap()) - 2.0).abs() < 1e-12, "λ₁(C4) ≠ 2");
    ensure!((l1(Multigraph::complete(4).unwrap()) - 4.0).abs() < 1e-12, "λ₁(K4) ≠ 4");
    Ok(format!("{} graphs satisfy λ₁/2 ≤ h ≤ √(2 d λ₁); anchors reproduced", corpus.len()))
}

fn criterion_8() -> Outcome {
    let (m, k) = (2usize, 4usize);
    let s = GridSparsifier { k };
    let grid = FiniteMetricSpace::<f64>::grid(20, 20).unwrap();
    let mu = Measure::uniform(400);
    let d = s.sparsify(&grid, &mu, m).map_err(|e| e.to_string())?;
    let c: f64 = Sparsifier::<f64>::constant(&s);
    ensure!(c == 9.0 / 16.0, "constant {c}");
    let dmax = (2 * k * m) as f64;
    let r = verify_decomposition(&grid, &d, &mu, &(m as f64), &dmax, &c).map_err(|e| e.to_string())?;
    ensure!(r.passes(), "float run fails: {r:?}");

    let exact = FiniteMetricSpace::<BigRational>::grid(20, 20).unwrap();
    let mu_q = Measure::<BigRational>::uniform(400);
    let dq = s.sparsify(&exact, &mu_q, m).map_err(|e| e.to_string())?;
    let cq = rational(9, 16);
    let rq = verify_decomposition(&exact, &dq, &mu_q, &rational(m as i64, 1), &rational(dmax as i64, 1), &cq)
        .map_err(|e| e.to_string())?;
    ensure!(rq.passes(), "exact run fails: {rq:?}");
    Ok(format!("{} clusters, mass ratio {:.4} ≥ 9/16, max diameter {} ≤ {dmax}", d.len(), r.mass_ratio, r.max_diam))
}

fn normloc_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_normloc")).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let space_path = dir.path().join("x.json");
    std::fs::write(&space_path, r#"{"path":120}"#).map_err(|e| e.to_string())?;
    let sp = space_path.to_str().unwrap();
    let runs: [Vec<&str>; 4] = [
        vec!["--seed", "5", "onl", "estimate", "--space", sp, "--r", "2", "--R", "4", "--trials", "6", "--h", "2"],
        vec!["--seed", "5", "onl", "localize", "--space", sp, "--r", "3", "--m", "7", "--k", "10"],
        vec!["--seed", "9", "expander", "decay", "--family", "random_regular", "--degree", "3", "--sizes", "20,40", "--R", "2", "--eps", "0.1", "--format", "csv"],
        vec!["--seed", "9", "expander", "report", "--family", "random_regular", "--degree", "4", "--sizes", "9,12", "--eps", "0.1"],
    ];
    for args in &runs {
        let a = normloc_cli(args)?;
        let b = normloc_cli(args)?;
        let c = normloc_cli(&[&["--threads", "1"], &args[..]].concat())?;
        ensure!(a == b && a == c, "{args:?} not byte-identical across runs");
    }

    let space = FiniteMetricSpace::<f64>::path(150).unwrap();
    let render = || -> Result<String, String> {
        let op = random_band_operator(&space, &2.0, 2, 77, 1.0).map_err(|e| e.to_string())?;
        let rep = localize_vector(&space, &op, 5, &IntervalSparsifier { k: 10 }, None).map_err(|e| e.to_string())?;
        let est = opa_estimate(&space, &1.0, &3.0, 5, 3, 1).map_err(|e| e.to_string())?;
        let fam = family(&FamilySpec::RandomRegular { degree: 3, sizes: vec![10, 16], seed: 4 }).map_err(|e| e.to_string())?;
        Ok(format!("{}|{:?}|{:?}", io::report_json(&rep), est, fam))
    };
    ensure!(render()? == render()?, "library runs differ");
    Ok(format!("{} CLI artifacts byte-identical across repeats and thread counts; library runs identical", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("interval sparsifier suite", criterion_1),
        ("game value vs exhaustive oracle", criterion_2),
        ("constructive localization", criterion_3),
        ("separated blocks vanish", criterion_4),
        ("expander decay", criterion_5),
        ("cycle contrast", criterion_6),
        ("Cheeger and spectral gap", criterion_7),
        ("grid extension", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
