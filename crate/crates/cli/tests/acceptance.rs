//! The acceptance criteria, one line of output per criterion.
//!
//! Runs without the libtest harness so every line is printed; the process
//! exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use hierarch::finite_type::{
    aperiodicity_certificate_1d, certify_separation, is_member, separation_certificate, sft_from_language,
};
use hierarch::sliding_block::{compose, BlockMap, SlidingBlockCode};
use hierarch::subst1d::fibonacci;
use hierarch::subst2d::{fibonacci_product, Substitution2D};
use hierarch::symbolic::contains;
use hierarch::tiling_line::*;
use hierarch::tiling_plane::*;
use hierarch::{Alphabet, Dimension, GoldenNumber, Pattern, PeriodicConfig, Symbol, Window};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type G = GoldenNumber;
type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn g(s: &str) -> G {
    s.parse().unwrap()
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn fib_word(k: usize) -> String {
    let mut w = String::from("b");
    for _ in 0..k {
        w = w.chars().map(|c| if c == 'a' { "b" } else { "ab" }).collect();
    }
    w
}

/// Block from rows listed top first, tokens separated by spaces.
fn block(alpha: &Alphabet, rows: &[&str]) -> Pattern {
    let cells: Vec<Symbol> = rows
        .iter()
        .rev()
        .flat_map(|r| r.split_whitespace().map(|t| alpha.symbol(t).unwrap()))
        .collect();
    let width = rows[0].split_whitespace().count();
    Pattern::block(width, rows.len(), cells).unwrap()
}

fn product_rule_table() -> Outcome {
    let f2 = fibonacci_product();
    let a = f2.alphabet();
    let table = [
        ("a×a", vec!["b×b"]),
        ("b×a", vec!["a×b b×b"]),
        ("a×b", vec!["b×b", "b×a"]),
        ("b×b", vec!["a×b b×b", "a×a b×a"]),
    ];
    for (letter, rows) in table {
        let got = f2.rule(ok(a.symbol(letter))?);
        ensure!(got == block(a, &rows), "{letter} maps to {:?}", a.render(&got));
    }
    Ok(())
}

fn constant_block_in_level3() -> Outcome {
    let f2 = fibonacci_product();
    let bb = ok(f2.alphabet().symbol("b×b"))?;
    let big = f2.iterate2d(bb, 3);
    let hits = contains(&big, &Pattern::constant(Dimension::Two, 2, 2, bb));
    ensure!(!hits.is_empty(), "no 2x2 block of b×b in the level-3 letter");
    Ok(())
}

fn fibonacci_lengths() -> Outcome {
    let fib = fibonacci();
    let b = ok(fib.alphabet().symbol("b"))?;
    let lens: Vec<usize> = (0..=6).map(|k| fib.iterate(b, k).width()).collect();
    ensure!(lens == [1, 2, 3, 5, 8, 13, 21], "lengths {lens:?}");
    for k in 0..=6 {
        ensure!(fib.level_length(b, k) == (lens[k] as u64).into(), "level_length at {k}");
    }
    Ok(())
}

fn language_complexity() -> Outcome {
    let fib = fibonacci();
    let text = fib_word(25);
    for m in 1..=20 {
        let brute: BTreeSet<String> = (0..=text.len() - m).map(|i| text[i..i + m].to_string()).collect();
        let lang: BTreeSet<String> = ok(fib.language(m))?.iter().map(|p| fib.alphabet().render(p)).collect();
        ensure!(lang.len() == m + 1, "m = {m}: {} words", lang.len());
        ensure!(lang == brute, "m = {m}: saturation and brute force differ");
    }
    Ok(())
}

fn separation_1d() -> Outcome {
    let fib = fibonacci();
    let ab = PeriodicConfig::new(ok(fib.alphabet().word("ab"))?);
    let x1 = ok(is_member(&ab, &ok(sft_from_language(&fib, 1))?))?;
    ensure!(x1.member, "(ab) is not in X_1");
    let x2 = ok(is_member(&ab, &ok(sft_from_language(&fib, 2))?))?;
    ensure!(!x2.member, "(ab) is in X_2");
    let failing = x2.first_failure().map(|c| fib.alphabet().render(c.window.pattern()));
    ensure!(failing.as_deref() == Some("ababa"), "first failing window {failing:?}");
    let cert = ok(certify_separation(ab, &fib, 1, 10))?;
    let word = fib.alphabet().render(&cert.refutation.factor);
    ensure!(word == "ababa", "refutation {word}");
    ok(cert.revalidate(&fib))?;
    Ok(())
}

fn separation_2d() -> Outcome {
    let f2 = fibonacci_product();
    for n in [1, 2] {
        let cert = ok(separation_certificate(&f2, n, None))?;
        ensure!(cert.refutation.radius() > n, "n = {n}: refutation radius {}", cert.refutation.radius());
        ok(cert.revalidate(&f2)).map_err(|e| format!("n = {n}: {e}"))?;
    }
    Ok(())
}

fn bounded_aperiodicity() -> Outcome {
    let rep = ok(aperiodicity_certificate_1d(&fibonacci(), 6, 40))?;
    ensure!(rep.all_refuted(), "{} survivors", rep.survivors().len());
    ensure!(!rep.candidates.is_empty(), "no candidates");
    Ok(())
}

fn random_code(alpha: &Alphabet, radius: usize, rng: &mut ChaCha8Rng) -> SlidingBlockCode {
    let side = 2 * radius + 1;
    let domain: Vec<Window> = (0..1usize << side)
        .map(|i| {
            let cells = (0..side).map(|b| Symbol(((i >> (side - 1 - b)) & 1) as u16)).collect();
            Window::new(radius, Pattern::word(cells)).unwrap()
        })
        .collect();
    let table: Vec<u16> = (0..domain.len()).map(|_| rng.gen_range(0..2)).collect();
    let map = BlockMap::from_fn(alpha.clone(), alpha.clone(), Dimension::One, radius, domain, |w| {
        let idx = w.pattern().cells().iter().fold(0usize, |acc, s| acc * 2 + s.index());
        Symbol(table[idx])
    })
    .unwrap();
    SlidingBlockCode::new(map)
}

fn composition_law() -> Outcome {
    let alpha = Alphabet::new(["a", "b"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let inner = random_code(&alpha, 1, &mut rng);
    let outer = random_code(&alpha, 2, &mut rng);
    let both = ok(compose(&outer, &inner))?;
    ensure!(both.radius() == 3, "composite radius {}", both.radius());
    for i in 0..100 {
        let len = rng.gen_range(1..=12);
        let cells = (0..len).map(|_| Symbol(rng.gen_range(0..2))).collect();
        let c = PeriodicConfig::new(Pattern::word(cells));
        let direct = ok(both.apply_periodic(&c))?;
        let chained = ok(outer.apply_periodic(&ok(inner.apply_periodic(&c))?))?;
        ensure!(direct.same_config(&chained), "config {i} differs");
    }
    Ok(())
}

fn invariant_identity() -> Outcome {
    let tau = G::tau();
    let lhs = &G::one() + &(&tau * &G::one());
    let rhs = &tau + &(&tau * &(&tau - &G::one()));
    ensure!(lhs == rhs, "{lhs} != {rhs}");
    let unit = TileSpec::unit();
    let image = rows_image_spec();
    ensure!(length_invariant(&unit) == length_invariant(&image), "invariants differ");
    ensure!(length_invariant(&unit) == g("1+tau"), "invariant {}", length_invariant(&unit));
    Ok(())
}

/// Source `(1, τ)` and `(1, 1)` scaled to the same invariant.
fn scaled_pair() -> (TileSpec, TileSpec) {
    (TileSpec::golden(), TileSpec::new(g("3-tau"), g("3-tau")).unwrap())
}

fn conjugacy_convergence() -> Outcome {
    let (xs, ys) = scaled_pair();
    let c = correction_constant(&xs, &ys);
    for seed in 0..5 {
        let x = LineTiling::sample(&xs, seed);
        let offs = ok(approximant_offsets(&x, &ys, 26))?;
        let corr: Vec<(usize, G)> = (5..=25).map(|n| (n, &offs[n + 1] - &offs[n])).collect();
        for (n, d) in &corr {
            ensure!(d.abs() <= &c * &G::tau_pow(-(*n as i64)), "seed {seed}: correction at {n} too large");
        }
        let r = decay_ratio(&corr).ok_or("no ratio")?;
        let target = 1.0 / G::tau().to_f64();
        ensure!((r - target).abs() < 0.02, "seed {seed}: ratio {r}");
    }
    Ok(())
}

fn equivariance() -> Outcome {
    let eps = g("1e-8");
    let two_eps = &eps + &eps;
    let pairs = [scaled_pair(), (TileSpec::unit(), rows_image_spec())];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..20u64 {
        let (xs, ys) = &pairs[seed as usize % 2];
        let x = LineTiling::sample(xs, seed);
        let q = rng.gen_range(1..10);
        let alpha = G::from_fracs(rng.gen_range(-40..40), q, rng.gen_range(-20..20), q);
        let lhs = ok(conjugate(&ok(x.translate(&alpha))?, ys, &eps))?.tiling;
        let rhs = ok(ok(conjugate(&x, ys, &eps))?.tiling.translate(&alpha))?;
        let d = ok(tiling_metric(&lhs, &rhs))?;
        ensure!(d < two_eps, "seed {seed}, alpha {alpha}: distance {d}");
    }
    Ok(())
}

fn witness_ladder() -> Outcome {
    let (xs, ys) = scaled_pair();
    let r0 = g("2");
    let mut last: Option<G> = None;
    for j in 0..4 {
        let r = &r0 * &G::tau_pow(j);
        let w = ok(non_sbc_witness(&xs, &ys, &r, 1))?;
        ensure!(ok(w.x.boundary_points(&r))? == ok(w.x_prime.boundary_points(&r))?, "R = {r}: x and x' differ");
        let t = w.t.abs();
        ensure!(t.is_positive(), "R = {r}: t = 0");
        if let Some(prev) = &last {
            ensure!(&t < prev, "R = {r}: |t| = {t} did not shrink");
            let ratio = t.to_f64() / prev.to_f64();
            ensure!((ratio - 1.0 / G::tau().to_f64()).abs() < 0.05, "R = {r}: ratio {ratio}");
        }
        last = Some(t);
    }
    for (r, d) in ok(witness_detection(&xs, &ys, &[1, 2, 3, 5, 8, 13], 4))? {
        ensure!(!d.is_consistent(), "a code of radius {r} fits the samples");
    }
    Ok(())
}

fn brute_metric(x: &LineTiling, y: &LineTiling, up_to: i64) -> G {
    let h = G::integer(up_to);
    let bx = x.boundary_points(&h).unwrap();
    let by = y.boundary_points(&h).unwrap();
    let mut best = G::zero();
    for n in 1..=up_to {
        let ng = G::integer(n);
        let (a, b) = (bx.within(&ng), by.within(&ng));
        let m = match (a.is_empty(), b.is_empty()) {
            (true, true) => G::zero(),
            (false, false) => hausdorff(&a, &b).unwrap(),
            _ => G::integer(2 * n),
        };
        best = best.max(&m / &ng);
    }
    best
}

fn metric_correctness() -> Outcome {
    let spec = TileSpec::golden();
    for seed in 0..50u64 {
        let x = LineTiling::sample(&spec, seed);
        let y = LineTiling::sample(&spec, seed + 1000);
        let d = ok(tiling_metric(&x, &y))?;
        let brute = brute_metric(&x, &y, 200);
        ensure!(d == brute, "seed {seed}: {d} vs brute force {brute}");
    }
    let u = LineTiling::unit();
    let d = ok(tiling_metric(&u, &ok(u.translate(&g("1/10")))?))?;
    ensure!(d == g("9/10"), "shifted unit tiling at distance {d}");
    Ok(())
}

fn census_region(rows: usize, half: &G) -> Rect {
    let y0 = -(rows as i64 / 2);
    Rect::new(-half.clone(), half.clone(), G::integer(y0), G::integer(y0 + rows as i64)).unwrap()
}

fn non_local_finiteness() -> Outcome {
    let (rows, half) = (48, g("160"));
    let x = rows_sample(9, rows, &(&half + &g("4")));
    let y = ok(rows_conjugate(&x, &g("1e-8")))?;
    let region = census_region(rows, &half);
    let r = g("3/2");
    let cy = ok(neighborhood_census(&ok(y.patch(&region))?, &r, 10_000, 1))?;
    ensure!(cy.candidates >= 10_000, "only {} candidate tiles", cy.candidates);
    ensure!(!cy.saturated, "image side saturated: {:?}", cy.growth);
    let cx = ok(neighborhood_census(&ok(x.patch(&region))?, &r, 10_000, 1))?;
    ensure!(cx.saturated, "source side did not saturate: {:?}", cx.growth);
    let x = rows_sample(4, 6, &g("110"));
    let y = ok(rows_conjugate(&x, &g("1e-8")))?;
    let n = ok(distinct_offsets(&y, &g("100"), &g("1e-6")))?;
    ensure!(n >= 10, "{n} distinct offsets by R = 100");
    Ok(())
}

fn periodic_frame() -> Outcome {
    let fx = ok(frame_fixture(&TileSpec::golden(), 5))?;
    match ok(frame_check(&fx.tiling, &fx.s, &fx.t))? {
        FrameOutcome::Witness(w) => ensure!(w.margin == g("1/8"), "margin {}", w.margin),
        FrameOutcome::Refusal(r) => return Err(format!("fixture refused at {:?}", r.tile.label)),
    }
    let generic = ProductTiling::new(LineTiling::sample(&TileSpec::golden(), 8), LineTiling::sample(&TileSpec::golden(), 9));
    let out = ok(frame_check(&generic, &[g("3/2"), g("1/3")], &[g("-1/5"), g("2")]))?;
    ensure!(!out.is_witness(), "generic translations gave a witness");
    Ok(())
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hierarch")
}

fn rules(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("rules").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(bin()).args(args).output().map_err(|e| e.to_string())?;
    if out.status.code() == Some(2) {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |n: &str| -> String { dir.path().join(n).to_string_lossy().into_owned() };
    let write = |n: &str, bytes: &[u8]| -> Outcome { std::fs::write(path(n), bytes).map_err(|e| e.to_string()) };
    write("x.json", &run(&["tiling", "--kind", "line", "--seed", "3"])?)?;
    write("y.json", &run(&["tiling", "--kind", "line", "--seed", "4"])?)?;
    write("ff.json", &run(&["tiling", "--kind", "frame-fixture", "--seed", "5"])?)?;
    let fx = ok(frame_fixture(&TileSpec::golden(), 5))?;
    let s = format!("{},{}", fx.s[0], fx.s[1]);
    let t = format!("{},{}", fx.t[0], fx.t[1]);
    let (fib, chair, f2) = (rules("fibonacci.json"), rules("chair.json"), rules("fibonacci_product.json"));
    let (svg1, svg2) = (path("a.svg"), path("b.svg"));
    let commands: Vec<Vec<String>> = [
        vec!["substitute", "--rules", &chair, "--letter", "NE", "--level", "3", "--render", &svg1],
        vec!["language", "--rules", &fib, "--length", "8"],
        vec!["language", "--rules", &f2, "--radius", "1"],
        vec!["aperiodic", "--rules", &fib, "--period-cap", "6", "--m-cap", "40"],
        vec!["separation", "--radius", "2"],
        vec!["separation", "--rules", &fib, "--radius", "1", "--config", "ab"],
        vec!["conjugate", "--from", "1,1", "--to", "tau,tau-1", "--seed", "7"],
        vec!["conjugate", "--from", "1,tau", "--to", "3-tau,3-tau", "--witness", "4", "--seed", "2"],
        vec!["metric", &path("x.json"), &path("y.json")],
        vec!["offsets", "--seed", "4", "--rows", "6", "--radius", "50"],
        vec!["census", "--seed", "9", "--rows", "12", "--width", "40", "--radius", "3/2", "--budget", "500", "--side", "y"],
        vec!["frame", "--tiling", &path("ff.json"), "--s", &s, "--t", &t],
        vec!["patch", "--tiling", &path("ff.json"), "--radius", "4"],
        vec!["tiling", "--kind", "rows", "--seed", "2", "--rows", "4", "--horizon", "10"],
    ]
    .iter()
    .map(|c| c.iter().map(|s| s.to_string()).collect())
    .collect();
    for c in &commands {
        let args: Vec<&str> = c.iter().map(String::as_str).collect();
        let first = run(&args)?;
        let again: Vec<String> = c.iter().map(|a| if *a == svg1 { svg2.clone() } else { a.clone() }).collect();
        let second = run(&again.iter().map(String::as_str).collect::<Vec<_>>())?;
        let normalise = |b: &[u8]| String::from_utf8_lossy(b).replace(&svg2, &svg1);
        ensure!(!first.is_empty(), "{}: empty output", c[0]);
        ensure!(normalise(&first) == normalise(&second), "{}: reports differ", c[0]);
    }
    let (a, b) = (std::fs::read(&svg1), std::fs::read(&svg2));
    ensure!(ok(a)? == ok(b)?, "SVG files differ");
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 16] = [
        ("product rule table", product_rule_table),
        ("constant block at level 3", constant_block_in_level3),
        ("Fibonacci lengths", fibonacci_lengths),
        ("language complexity m+1", language_complexity),
        ("1D separation by ababa", separation_1d),
        ("2D separation certificates", separation_2d),
        ("aperiodicity up to period 6", bounded_aperiodicity),
        ("composition of sizes 1 and 2", composition_law),
        ("length invariant identity", invariant_identity),
        ("conjugacy convergence ratio", conjugacy_convergence),
        ("conjugacy equivariance", equivariance),
        ("non-SBC witness ladder", witness_ladder),
        ("metric against brute force", metric_correctness),
        ("census and offsets", non_local_finiteness),
        ("periodic frame", periodic_frame),
        ("CLI determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS [{secs:6.2}s] {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:6.2}s] {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
