//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::collections::HashSet;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use progcoef::compress::{approx_k, CodeWidth, CompressorSpec, DictionaryFull, Lz78Params};
use progcoef::measure::{
    coefficient, default_runtimes, fit_slope, variability_with, Coefficient, CompressionProfile,
    MeasureParams, Normalization,
};
use progcoef::systems::{
    enumerate_inputs, Boundary, Configuration, EnumerationScheme, InitialConfiguration, RuleSystem, SystemId,
};
use progcoef::taxonomy::{self, label_for, simplicity_label, DeltaPolicy, Label, Simplicity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Golden bound on |C| for the constant rules, pinned from the first sweep:
/// |C(0)| = 1.714e-5, |C(255)| = 1.143e-4, cohort max = 0.03416.
const EPS0: f64 = 2e-4;
/// Golden compression ratios at t = 100, w = 201 (single seed).
const RULE0_RATIO: f64 = 521.0 / 20_200.0;
const RULE30_RATIO: f64 = 3175.0 / 20_200.0;

const WIDTH: usize = 41;
const N: usize = 8;
const T: usize = 100;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sweep_params() -> MeasureParams {
    MeasureParams::new(N, default_runtimes(T).unwrap()).unwrap()
}

fn measure_rule(rule: u32) -> Coefficient {
    let s = RuleSystem::elementary(rule, WIDTH, Boundary::Cyclic).unwrap();
    coefficient(&s, &sweep_params(), &CompressorSpec::default()).unwrap()
}

fn full_cohort() -> Vec<Coefficient> {
    use rayon::prelude::*;
    (0..=255).into_par_iter().map(measure_rule).collect()
}

fn within(elapsed: Duration, budget: Duration) -> bool {
    elapsed < budget
}

fn zero_coefficients() -> Outcome {
    let start = Instant::now();
    let c0 = measure_rule(0).value;
    let c255 = measure_rule(255).value;
    let elapsed = start.elapsed();
    let max = taxonomy::cohort_max(&full_cohort());
    let pass =
        c0.abs() < EPS0 && c255.abs() < EPS0 && EPS0 < 0.01 * max && within(elapsed, Duration::from_secs(5));
    outcome(
        pass,
        format!(
            "|C(0)|={:.3e} |C(255)|={:.3e} eps0={EPS0:.0e} 1%·max={:.3e} in {elapsed:.2?} (budget 5s)",
            c0.abs(),
            c255.abs(),
            0.01 * max
        ),
    )
}

fn rock_like_rule_4() -> Outcome {
    let start = Instant::now();
    let (c4, c30, c110) = (
        measure_rule(4).value,
        measure_rule(30).value,
        measure_rule(110).value,
    );
    let elapsed = start.elapsed();
    let pass = c4 < c110 && c4 < c30 && within(elapsed, Duration::from_secs(30));
    outcome(
        pass,
        format!("C(4)={c4:.5} C(30)={c30:.5} C(110)={c110:.5} in {elapsed:.2?} (budget 30s)"),
    )
}

fn simplicity_split() -> Outcome {
    let start = Instant::now();
    let spec = CompressorSpec::default();
    let ratio = |rule| {
        let s = RuleSystem::elementary(rule, 201, Boundary::Cyclic).unwrap();
        let ev = s
            .evolve(
                &InitialConfiguration::new(Configuration::single_seed(201), 0),
                100,
            )
            .unwrap();
        (
            approx_k(&spec, &ev).unwrap().ratio(),
            simplicity_label(&ev, &spec, 0.2).unwrap(),
        )
    };
    let (r0, s0) = ratio(0);
    let (r30, s30) = ratio(30);
    let elapsed = start.elapsed();
    let golden = (r0 - RULE0_RATIO).abs() < 1e-12 && (r30 - RULE30_RATIO).abs() < 1e-12;
    let rule0_ok = r0 < 0.20 && s0 == Simplicity::Simple;
    let rule30_ok = r30 > 0.30 && s30 == Simplicity::Complex;
    let pass = golden && rule0_ok && rule30_ok && within(elapsed, Duration::from_secs(10));
    outcome(
        pass,
        format!(
            "rule 0 ratio={r0:.4} (<0.20: {rule0_ok}), rule 30 ratio={r30:.4} (>0.30: {rule30_ok}), \
             labels@0.2 {s0:?}/{s30:?}, golden={golden}, in {elapsed:.2?} (budget 10s)"
        ),
    )
}

fn full_sweep_determinism() -> Outcome {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_progcoef"))
            .args([
                "sweep",
                "--width",
                "41",
                "--n",
                "8",
                "--t",
                "100",
                "--no-timestamp",
            ])
            .args(["--delta", "cohort-median"])
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    let start = Instant::now();
    let first = run();
    let elapsed = start.elapsed();
    let second = run();

    let rows: Vec<Vec<&str>> = first
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    let rank_of = |rule: &str| {
        rows.iter()
            .find(|r| r[1] == rule)
            .map(|r| r[0].parse::<usize>().unwrap())
    };
    let (r0, r255) = (rank_of("0").unwrap(), rank_of("255").unwrap());
    let bottom_decile = 256 - 256 / 10 + 1;
    let label110 = rows.iter().find(|r| r[1] == "110").unwrap()[4];

    let pass = first == second
        && rows.len() == 256
        && r0 >= bottom_decile
        && r255 >= bottom_decile
        && label110 == "computer"
        && within(elapsed, Duration::from_secs(600));
    outcome(
        pass,
        format!(
            "{} rows, identical={}, rank(0)={r0} rank(255)={r255} (bottom decile ≥ {bottom_decile}), \
             rule 110 at cohort median: {label110}, in {elapsed:.2?} (budget 600s)",
            rows.len(),
            first == second
        ),
    )
}

/// Σ|Δ| over consecutive inputs, computed without the library.
fn brute_variation(row: &[usize]) -> u128 {
    let mut s = 0u128;
    for j in 1..row.len() {
        s += (row[j] as i128 - row[j - 1] as i128).unsigned_abs();
    }
    s
}

fn variability_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(2..=12);
        let m = rng.gen_range(2..=5);
        let mut runtimes: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=500)).collect();
        runtimes.sort_unstable();
        runtimes.dedup();
        if runtimes.len() < 2 {
            runtimes = vec![1, 2];
        }
        let lengths: Vec<Vec<usize>> = runtimes
            .iter()
            .map(|_| (0..n).map(|_| rng.gen_range(1..=1_000_000)).collect())
            .collect();
        let id = SystemId::Eca {
            rule: 0,
            width: 8,
            boundary: Boundary::Cyclic,
        };
        let p = CompressionProfile::from_lengths(id, "mock", runtimes.clone(), lengths.clone()).unwrap();
        let horizon = *runtimes.last().unwrap();
        for (k, row) in lengths.iter().enumerate() {
            let sum = brute_variation(row);
            for (norm, t) in [
                (Normalization::Horizon, horizon),
                (Normalization::Runtime, runtimes[k]),
            ] {
                let got = variability_with(&p, k, norm).unwrap();
                let denom = (t * (n - 1)) as u128;
                let expected = sum as f64 / denom as f64;
                let rel = if expected == 0.0 {
                    got.abs()
                } else {
                    ((got - expected) / expected).abs()
                };
                worst = worst.max(rel);
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("100 random profiles, worst relative error {worst:.2e} (tol 1e-12)"),
    )
}

/// Exact least squares over integer points, in i128.
fn closed_form(points: &[(i64, i64)]) -> (f64, f64) {
    let n = points.len() as i128;
    let (sx, sy) = points
        .iter()
        .fold((0i128, 0i128), |(a, b), &(x, y)| (a + x as i128, b + y as i128));
    let sxx: i128 = points.iter().map(|&(x, _)| (x as i128) * (x as i128)).sum();
    let sxy: i128 = points.iter().map(|&(x, y)| (x as i128) * (y as i128)).sum();
    let num = n * sxy - sx * sy;
    let den = n * sxx - sx * sx;
    let slope = num as f64 / den as f64;
    // intercept = (sy·sxx − sx·sxy) / den
    let intercept = (sy * sxx - sx * sxy) as f64 / den as f64;
    (slope, intercept)
}

fn ols_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut worst = 0.0f64;
    let mut cases = 0;
    while cases < 1000 {
        let k = rng.gen_range(2..=12);
        let pts: Vec<(i64, i64)> = (0..k)
            .map(|_| (rng.gen_range(1..=1000), rng.gen_range(-1_000_000..=1_000_000)))
            .collect();
        if pts.iter().all(|p| p.0 == pts[0].0) {
            continue;
        }
        cases += 1;
        let (slope, intercept) = closed_form(&pts);
        let fp: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
        let fit = fit_slope(&fp).unwrap();
        let rel = |a: f64, b: f64| {
            let scale = b.abs().max(1.0);
            (a - b).abs() / scale
        };
        worst = worst
            .max(rel(fit.slope, slope))
            .max(rel(fit.intercept, intercept));
    }
    outcome(
        worst <= 1e-9,
        format!("1000 random point sets, worst relative error {worst:.2e} (tol 1e-9)"),
    )
}

fn random_payload(rng: &mut ChaCha8Rng) -> Vec<u8> {
    let len = rng.gen_range(1..=64 * 1024);
    match rng.gen_range(0..4) {
        0 => (0..len).map(|_| rng.gen()).collect(),
        1 => (0..len)
            .map(|_| if rng.gen_bool(0.5) { b'1' } else { b'0' })
            .collect(),
        2 => {
            let alphabet: Vec<u8> = (0..rng.gen_range(1..=4)).map(|_| rng.gen()).collect();
            (0..len)
                .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                .collect()
        }
        _ => {
            let motif: Vec<u8> = (0..rng.gen_range(1..=40)).map(|_| rng.gen()).collect();
            motif.iter().copied().cycle().take(len).collect()
        }
    }
}

fn round_trip() -> Outcome {
    let specs: Vec<CompressorSpec> = [
        Lz78Params::default(),
        Lz78Params {
            dictionary_bits: 9,
            code_width: CodeWidth::Fixed,
            on_full: DictionaryFull::Freeze,
        },
        Lz78Params {
            dictionary_bits: 12,
            code_width: CodeWidth::Variable,
            on_full: DictionaryFull::Reset,
        },
    ]
    .into_iter()
    .map(|p| CompressorSpec::builtin(p).unwrap())
    .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut failures = 0usize;
    let mut check = |spec: &CompressorSpec, data: &[u8]| {
        let enc = spec.encode(data).unwrap();
        let ok = spec.decode(&enc).map(|d| d == data).unwrap_or(false)
            && enc.len() <= data.len() + spec.overhead_bound(data.len()).unwrap();
        if !ok {
            failures += 1;
        }
    };
    for i in 0..1000 {
        let data = random_payload(&mut rng);
        check(&specs[i % specs.len()], &data);
    }
    let mut evolutions = 0;
    for rule in 0..=255u32 {
        for (width, t) in [(41, 40), (201, 100)] {
            if width == 201 && ![0, 4, 30, 90, 110, 255].contains(&rule) {
                continue;
            }
            let s = RuleSystem::elementary(rule, width, Boundary::Cyclic).unwrap();
            let ev = s
                .evolve(
                    &InitialConfiguration::new(Configuration::single_seed(width), 0),
                    t,
                )
                .unwrap();
            for spec in &specs {
                check(spec, &ev.to_text());
            }
            evolutions += 1;
        }
    }
    outcome(
        failures == 0,
        format!(
            "1000 random strings (1 B to 64 KiB) + {evolutions} evolutions × 3 settings, {failures} failures"
        ),
    )
}

fn enumeration_completeness() -> Outcome {
    let mut bad = Vec::new();
    for scheme in [EnumerationScheme::Binary, EnumerationScheme::Gray] {
        for w in 1..=12usize {
            let all = enumerate_inputs(w, 1 << w, scheme).unwrap();
            let distinct: HashSet<Vec<u8>> = all.iter().map(|c| c.cells.cells().to_vec()).collect();
            let indices_ok = all.iter().enumerate().all(|(j, c)| c.enum_index == j as u64);
            let sized = all.iter().all(|c| c.cells.len() == w);
            let over = enumerate_inputs(w, (1 << w) + 1, scheme).is_err();
            if distinct.len() != 1 << w || !indices_ok || !sized || !over {
                bad.push(format!("{scheme}/w{w}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("binary and gray, w = 1..12, failures: {bad:?}"),
    )
}

fn classification_logic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let mut violations = 0;
    for _ in 0..1000 {
        let v: f64 = rng.gen_range(-0.05..0.1);
        let v2: f64 = v + rng.gen_range(0.0..0.05);
        let d: f64 = rng.gen_range(0.0..0.1);
        let d2: f64 = d + rng.gen_range(0.0..0.05);
        let band = if rng.gen_bool(0.5) {
            0.0
        } else {
            rng.gen_range(0.0..0.01)
        };
        let l = |v, d| label_for(v, d, band).unwrap();
        if l(v, d) > l(v2, d) {
            violations += 1;
        }
        if l(v, d) < l(v, d2) {
            violations += 1;
        }
        if band == 0.0 && (l(v, d) == Label::Computer) != (v > d) {
            violations += 1;
        }
    }
    let exact = label_for(0.01, 0.01, 0.0).unwrap() == Label::NonComputer
        && label_for(0.0, 0.01, 0.0).unwrap() == Label::NonComputer;
    let ranked_ok = {
        let cohort: Vec<Coefficient> = [0, 4, 30, 110].into_iter().map(measure_rule).collect();
        let ranked = taxonomy::rank_cohort(&cohort).unwrap();
        let (_, labels) = taxonomy::classify_cohort(&ranked, DeltaPolicy::Fixed(0.0)).unwrap();
        labels.windows(2).all(|w| w[0].label >= w[1].label)
    };
    outcome(
        violations == 0 && exact && ranked_ok,
        format!("1000 random (value, δ) pairs, {violations} violations, exact-δ case ok={exact}, ranked labels ordered={ranked_ok}"),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("zero-coefficient fixtures (rules 0, 255)", zero_coefficients),
        ("rock-like rule 4 below rules 30 and 110", rock_like_rule_4),
        ("simplicity split (rule 0 < 20%, rule 30 > 30%)", simplicity_split),
        ("full 256-rule sweep", full_sweep_determinism),
        ("variability formula oracle", variability_oracle),
        ("least-squares oracle", ols_oracle),
        ("compressor round trip and overhead bound", round_trip),
        ("enumeration completeness", enumeration_completeness),
        ("classification monotonicity", classification_logic),
    ];
    let mut failed = 0;
    let mut err = std::io::stderr().lock();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let status = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        writeln!(err, "criterion {}: {status}: {name}: {}", i + 1, o.detail).unwrap();
    }
    writeln!(
        err,
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    )
    .unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
