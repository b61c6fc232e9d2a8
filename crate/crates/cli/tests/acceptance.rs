//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use gmarkov_cli::{lmt_primes, run_suites, Format, KRange, RunConfig, Suite, TreeSel, VerifyOpts};
use gmarkov_core::address::TreeKind;
use gmarkov_core::cohn::{self, Mat2};
use gmarkov_core::criterion::{criterion_applies, k_universal_check, uniqueness_empirical};
use gmarkov_core::markov_tree::{self, is_gsme_solution, is_induced};
use gmarkov_core::numtheory::{solve_quadratic_by_factoring, Budget};
use num_bigint::BigUint;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn golden(k: u64) -> Vec<String> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("testdata/appendix/k{k}_depth10.txt"));
    fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect()
}

fn golden_primes() -> Outcome {
    let expected_counts = [93, 67, 0, 55, 49, 38, 37, 34, 31, 28, 34];
    let mut counts = Vec::new();
    for k in 0..=10u64 {
        let got: Vec<String> = lmt_primes(k, 10, 0).iter().map(|p| p.to_string()).collect();
        let want = golden(k);
        if want.len() != expected_counts[k as usize] {
            return Err(format!("golden file for k={k} has {} lines", want.len()));
        }
        if got != want {
            let at = got.iter().zip(&want).position(|(a, b)| a != b).unwrap_or(got.len().min(want.len()));
            return Err(format!("k={k}: {} primes vs {} expected, first difference at index {at}", got.len(), want.len()));
        }
        counts.push(got.len().to_string());
    }
    Ok(format!("counts {}", counts.join(", ")))
}

fn spot_checks() -> Outcome {
    let v = criterion_applies(7, &BigUint::from(9u32), Budget::default()).map_err(|e| e.to_string())?;
    let sols: Vec<String> = v.solutions.unwrap().residues().iter().map(|r| r.to_string()).collect();
    if sols != ["1", "4", "7"] {
        return Err(format!("(7, 9) solutions {sols:?}"));
    }
    let n = |v: u32| BigUint::from(v);
    if !is_gsme_solution(4, &n(9), &n(9), &n(22)) {
        return Err("(9, 9, 22) does not solve GSME(4)".into());
    }
    if is_induced(4, &n(9), &n(9), &n(22)) {
        return Err("(9, 9, 22) is induced".into());
    }
    Ok("(7, 9) -> {1, 4, 7}; (9, 9, 22) solves GSME(4), not induced".into())
}

fn universality() -> Outcome {
    let expected = [
        1u64, 2, 3, 4, 5, 8, 9, 12, 13, 15, 17, 19, 21, 24, 28, 31, 32, 33, 35, 36, 37, 39, 40, 41, 44, 45, 49,
        53, 55, 57, 59, 60, 63, 64, 67, 68, 69, 71, 72, 75, 76, 80, 81, 84, 85, 87, 89, 91, 93, 95, 99,
    ];
    let mut got = Vec::new();
    for k in 0..100 {
        if k_universal_check(k, Budget::default()).map_err(|e| e.to_string())? {
            got.push(k);
        }
    }
    if got != expected {
        return Err(format!("got {got:?}"));
    }
    Ok(format!("{} values below 100", got.len()))
}

const KS: usize = 21;
/// Lanes in the brute-force inner loop; the extra ones are ignored.
const LANES: usize = 24;
const B_MAX: u32 = 100_000;

/// Roots of `x^2 + kx + 1` mod `b` for `k = 0..KS`, by stepping `x` through
/// `[0, b)` and updating `f(x)` by its first difference `2x + 1 + k`.
fn brute_force(b: u32, roots: &mut [Vec<u32>; KS]) {
    for r in roots.iter_mut() {
        r.clear();
    }
    if b < 3 {
        for (k, r) in roots.iter_mut().enumerate() {
            r.extend((0..b).filter(|&x| (x as u64 * x as u64 + k as u64 * x as u64 + 1).is_multiple_of(b as u64)));
        }
        return;
    }
    let m = b as i32;
    let mut f = [1i32; LANES];
    let mut d: [i32; LANES] = std::array::from_fn(|k| (1 + k as i32) % m);
    // branch-free reduction of v in [0, 2m) to [0, m)
    let reduce = |v: i32| {
        let s = v.wrapping_sub(m);
        s.wrapping_add(m & (s >> 31))
    };
    for x in 0..b {
        let mut zero = 0;
        for v in &f[..KS] {
            zero |= (*v == 0) as i32;
        }
        if zero != 0 {
            for (k, r) in roots.iter_mut().enumerate() {
                if f[k] == 0 {
                    r.push(x);
                }
            }
        }
        for k in 0..LANES {
            f[k] = reduce(f[k].wrapping_add(d[k]));
            d[k] = reduce(d[k].wrapping_add(2));
        }
    }
}

fn oracle_equivalence() -> Outcome {
    let mut roots: [Vec<u32>; KS] = Default::default();
    let mut compared = 0u64;
    for b in 1..=B_MAX {
        brute_force(b, &mut roots);
        for (k, want) in roots.iter().enumerate() {
            let set = solve_quadratic_by_factoring(k as u64, &BigUint::from(b), Budget::default())
                .map_err(|e| format!("k={k} b={b}: {e}"))?;
            let got: Vec<u32> = set.residues().iter().map(|r| u32::try_from(r).unwrap()).collect();
            if !set.is_complete() || &got != want {
                return Err(format!("k={k} b={b}: factoring gives {got:?}, brute force {want:?}"));
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} (k, b) pairs"))
}

fn isomorphism() -> Outcome {
    let mut vertices = 0;
    for k in 0..=5u64 {
        let l = -(k as i64);
        for tree in [TreeKind::Wide, TreeKind::Main, TreeKind::Left] {
            let cohn = cohn::enumerate_cohn(k, l, 8, tree);
            let markov: Vec<_> = markov_tree::enumerate(k, 8, tree).collect();
            if cohn.len() != markov.len() {
                return Err(format!("k={k} {tree:?}: vertex counts differ"));
            }
            for (c, m) in cohn.iter().zip(&markov) {
                if c.address() != m.address() || c.markov_entries() != [m.a().clone(), m.b().clone(), m.c().clone()] {
                    return Err(format!("k={k} {tree:?} at {:?}", m.address()));
                }
                vertices += 1;
            }
        }
        let k = k as i64;
        let root = cohn::tree_root(k as u64, l, TreeKind::Left);
        let p = Mat2::from_i64(-k, 1, -3 * k * k - 3 * k - 1, 3 * k + 3);
        let q = Mat2::from_i64(k + 2, 2 * k * k + 6 * k + 5, 3 * k * k + 9 * k + 5, 6 * k * k * k + 24 * k * k + 31 * k + 13);
        let r = Mat2::from_i64(1, k + 2, 3 * k + 2, 3 * k * k + 8 * k + 5);
        if root.matrices() != [&p, &q, &r] {
            return Err(format!("LGCT({k}, {l}) root differs"));
        }
    }
    Ok(format!("{vertices} vertices, 6 LGCT roots"))
}

fn invariant_suites() -> Outcome {
    let config = RunConfig {
        ks: KRange { start: 0, end: 10 },
        depth: 10,
        depth_cap: 16,
        tree: TreeSel::Wmt,
        l: None,
        format: Format::Json,
        budget: Budget::default(),
        prime_rounds: 0,
        threads: None,
        output: None,
    };
    let mut checked = 0;
    let mut names = 0;
    for suite in [Suite::Trees, Suite::Cohn, Suite::Farey, Suite::Identity] {
        let opts = VerifyOpts { suite, samples: 1000, seed: 7, broken_mediant: false };
        for r in run_suites(&config, &opts).map_err(|e| e.to_string())? {
            if !r.passed() {
                return Err(format!("{}: {} failures, first {:?}", r.name, r.failed, r.failures.first()));
            }
            checked += r.checked;
            names += 1;
        }
    }
    Ok(format!("{names} reports, {checked} checks"))
}

fn empirical_uniqueness() -> Outcome {
    let mut maxima = 0;
    for k in 0..=10 {
        let r = uniqueness_empirical(k, 10, Budget::default()).map_err(|e| e.to_string())?;
        if !r.passed() {
            return Err(format!(
                "k={k}: duplicates {:?}, labels {:?}, violations {:?}",
                r.duplicate_maxima, r.duplicate_labels, r.violations
            ));
        }
        maxima += r.distinct_maxima;
    }
    Ok(format!("{maxima} distinct maxima, none repeated"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("golden prime lists", golden_primes),
        ("criterion spot checks", spot_checks),
        ("k-universality list", universality),
        ("oracle equivalence", oracle_equivalence),
        ("structural isomorphism", isomorphism),
        ("invariant suites", invariant_suites),
        ("desk-scale uniqueness", empirical_uniqueness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
