//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the report reads top to
//! bottom; the process exits non-zero if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use dsfusion::baselines::{
    class_evidence, descending_order, fuzzy_integral, measure_chain, solve_lambda, FuzzyDensities,
    CLASS_BIT, COMPLEMENT_BIT, FRAME_MASK,
};
use dsfusion::data::{gen_split, SynthSpec};
use dsfusion::dempster::{
    combine_many, combine_pair, combine_pair_with_conflict, combine_powerset, lift_to_powerset,
    project,
};
use dsfusion::evidence::{argmax, bba_from_scores, fuse, predict};
use dsfusion::metrics::{err, mean_accuracy};
use dsfusion::trainer::{compute_gradients, dataset_mse, train};
use dsfusion::{one_hot, EvidenceParams, MassFunction, Mode, Rule, ScoreVector, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took <= limit, || {
        format!("took {took:.2?}, limit {limit:?}")
    })
}

fn random_mass(rng: &mut impl Rng, k: usize) -> MassFunction {
    let raw: Vec<f64> = (0..=k).map(|_| rng.random::<f64>() + 1e-9).collect();
    let s: f64 = raw.iter().sum();
    MassFunction::new(raw[..k].iter().map(|r| r / s).collect(), raw[k] / s).unwrap()
}

fn max_gap(a: &MassFunction, b: &MassFunction) -> f64 {
    let mut gap = (a.theta() - b.theta())
        .abs()
        .max((a.empty() - b.empty()).abs());
    for k in 0..a.frame_size() {
        gap = gap.max((a.singleton(k) - b.singleton(k)).abs());
    }
    gap
}

// 1 -------------------------------------------------------------------------

fn err_fixture() -> Outcome {
    let two = err(91.14, 92.40).map_err(|e| e.to_string())?;
    let nine = err(83.65, 92.48).map_err(|e| e.to_string())?;
    ensure((two - 14.22).abs() <= 0.05, || format!("2 classes: {two}"))?;
    ensure((14.0..=16.0).contains(&two), || {
        format!("2 classes outside 14-16%: {two}")
    })?;
    ensure((nine - 54.0).abs() <= 0.1, || format!("9 classes: {nine}"))?;
    Ok(format!("ERR {two:.4} (2 classes), {nine:.4} (9 classes)"))
}

// 2 -------------------------------------------------------------------------

fn overall_fixture() -> Outcome {
    let ds1 = [
        92.46, 91.62, 85.10, 92.40, 92.47, 91.68, 85.43, 92.21, 92.32, 92.25, 91.78, 86.66, 92.21,
    ];
    let overall = mean_accuracy(ds1).map_err(|e| e.to_string())?;
    ensure((overall - 90.66).abs() <= 0.05, || {
        format!("overall {overall}")
    })?;
    let subsets = dsfusion_cli::subsets::enumerate(&dsfusion_cli::SubsetPolicy::PaperStyle, 5)
        .map_err(|e| e.to_string())?;
    ensure(subsets.len() == ds1.len(), || {
        format!(
            "paper-style enumerates {} subsets for 5 classifiers",
            subsets.len()
        )
    })?;
    Ok(format!("mean of 13 DS1 accuracies {overall:.4}"))
}

// 3 -------------------------------------------------------------------------

const H: f64 = 1e-6;
const GRAD_TOL: f64 = 1e-5;

fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

/// z(k) of a ⊕ b by enumerating focal-element pairs; index K is Θ.
fn brute_force_z(a: &[f64], b: &[f64], k: usize) -> f64 {
    let theta = a.len() - 1;
    let (mut hit, mut conflict) = (0.0, 0.0);
    for (i, &ma) in a.iter().enumerate() {
        for (j, &mb) in b.iter().enumerate() {
            let meet = if i == theta {
                j
            } else if j == theta || i == j {
                i
            } else {
                conflict += ma * mb;
                continue;
            };
            if meet == k {
                hit += ma * mb;
            }
        }
    }
    hit / (1.0 - conflict)
}

fn mass_vec(m: &MassFunction) -> Vec<f64> {
    let mut v = m.singletons().to_vec();
    v.push(m.theta());
    v
}

fn perturbed(
    p: &EvidenceParams,
    weight: Option<usize>,
    ignorance: Option<usize>,
    d: f64,
) -> EvidenceParams {
    let mut w = p.weights().to_vec();
    let mut g = p.ignorance().to_vec();
    if let Some(i) = weight {
        w[i] += d;
    }
    if let Some(n) = ignorance {
        g[n] += d;
    }
    EvidenceParams::new(p.mode(), p.classifiers(), p.classes(), w, g).unwrap()
}

fn gradient_battery() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut checks, mut excluded, mut worst) = (0usize, 0usize, 0.0f64);
    for config in 0..100 {
        let k_cls = [2, 3, 5, 9][config % 4];
        let n_cls = [2, 3, 5][(config / 4) % 3];
        let mode = if config % 2 == 0 {
            Mode::Ds1
        } else {
            Mode::Ds2
        };
        let dim = mode.reference_len(k_cls);
        let weights = (0..n_cls * k_cls * dim).map(|_| rng.random()).collect();
        let ignorance = (0..n_cls).map(|_| rng.random_range(0.01..1.0)).collect();
        let params = EvidenceParams::new(mode, n_cls, k_cls, weights, ignorance).unwrap();
        let ys: Vec<ScoreVector> = (0..n_cls)
            .map(|n| ScoreVector::new((0..k_cls).map(|_| rng.random()).collect(), n).unwrap())
            .collect();
        let t = one_hot(rng.random_range(1..=k_cls), k_cls).unwrap();
        let grads = compute_gradients(&params, &ys, &t).map_err(|e| e.to_string())?;
        let mut record = |analytic: f64, numeric: f64, what: &str| -> Result<(), String> {
            let e = rel_err(analytic, numeric);
            worst = worst.max(e);
            checks += 1;
            ensure(e <= GRAD_TOL, || {
                format!("config {config} {what}: analytic {analytic} vs numeric {numeric}")
            })
        };

        // squared error against z
        let z = fuse(&params, &ys).unwrap().z;
        for k in 0..k_cls {
            let at = |zk: f64| {
                let mut zz = z.clone();
                zz[k] = zk;
                zz.iter().zip(&t).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            };
            record(
                grads.d_err_dz[k],
                (at(z[k] + H) - at(z[k] - H)) / (2.0 * H),
                "dErr/dz",
            )?;
        }

        for n in 0..n_cls {
            let m_n = bba_from_scores(&params, n, &ys[n]).unwrap();
            let others: Vec<MassFunction> = (0..n_cls)
                .filter(|&i| i != n)
                .map(|i| bba_from_scores(&params, i, &ys[i]).unwrap())
                .collect();
            let m_i = combine_many(&others, Rule::Normalized).unwrap();
            let (_, report) = combine_pair_with_conflict(&m_n, &m_i, Rule::Normalized).unwrap();
            let near_total_conflict = 1.0 - report.conflict_mass < 1e-6;
            let (a, b) = (mass_vec(&m_n), mass_vec(&m_i));
            for k in 0..k_cls {
                if near_total_conflict {
                    excluded += 1;
                } else {
                    let (mut up, mut down) = (a.clone(), a.clone());
                    up[k] += H;
                    down[k] -= H;
                    let numeric =
                        (brute_force_z(&up, &b, k) - brute_force_z(&down, &b, k)) / (2.0 * H);
                    record(grads.dz_dm[n * k_cls + k], numeric, "dz/dm")?;
                }

                let mass = |p: &EvidenceParams| bba_from_scores(p, n, &ys[n]).unwrap().singleton(k);
                for j in 0..dim {
                    let idx = (n * k_cls + k) * dim + j;
                    let numeric = (mass(&perturbed(&params, Some(idx), None, H))
                        - mass(&perturbed(&params, Some(idx), None, -H)))
                        / (2.0 * H);
                    record(grads.dm_dw[idx], numeric, "dm/dw")?;
                }
                let numeric = (mass(&perturbed(&params, None, Some(n), H))
                    - mass(&perturbed(&params, None, Some(n), -H)))
                    / (2.0 * H);
                record(grads.dm_dg[n * k_cls + k], numeric, "dm/dg")?;
            }
        }
    }
    within_time(start, Duration::from_secs(10))?;
    Ok(format!(
        "{checks} factor checks over 100 configurations, worst relative error {worst:.2e}, {excluded} excluded, {:.2?}",
        start.elapsed()
    ))
}

// 4 -------------------------------------------------------------------------

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let k = [2, 3, 5, 9][i % 4];
        let (m1, m2) = (random_mass(&mut rng, k), random_mass(&mut rng, k));
        for rule in [Rule::Normalized, Rule::Unnormalized] {
            let fast = combine_pair(&m1, &m2, rule).unwrap();
            let general = project(
                &combine_powerset(&lift_to_powerset(&m1), &lift_to_powerset(&m2), rule).unwrap(),
            )
            .unwrap();
            worst = worst.max(max_gap(&fast, &general));
        }
    }
    ensure(worst <= 1e-12, || format!("pair gap {worst:e}"))?;

    let mut fold_worst = 0.0f64;
    let orders = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for i in 0..500 {
        let k = [2, 3, 5, 9][i % 4];
        let ms: Vec<MassFunction> = (0..3).map(|_| random_mass(&mut rng, k)).collect();
        let base = combine_many(&ms, Rule::Normalized).unwrap();
        for order in &orders {
            let permuted: Vec<MassFunction> = order.iter().map(|&j| ms[j].clone()).collect();
            fold_worst = fold_worst.max(max_gap(
                &base,
                &combine_many(&permuted, Rule::Normalized).unwrap(),
            ));
        }
    }
    ensure(fold_worst <= 1e-10, || {
        format!("fold-order gap {fold_worst:e}")
    })?;
    within_time(start, Duration::from_secs(5))?;
    Ok(format!(
        "pair gap {worst:.1e}, fold-order gap {fold_worst:.1e}"
    ))
}

// 5 -------------------------------------------------------------------------

fn rule_algebra() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut comm, mut consist) = (0.0f64, 0.0f64);
    for i in 0..1000 {
        let k = [2, 3, 5, 9][i % 4];
        let (m1, m2) = (random_mass(&mut rng, k), random_mass(&mut rng, k));
        let v = MassFunction::vacuous(k);
        for rule in [Rule::Normalized, Rule::Unnormalized] {
            ensure(combine_pair(&v, &m1, rule).unwrap() == m1, || {
                "vacuous ⊕ m ≠ m".into()
            })?;
            ensure(combine_pair(&m1, &v, rule).unwrap() == m1, || {
                "m ⊕ vacuous ≠ m".into()
            })?;
            comm = comm.max(max_gap(
                &combine_pair(&m1, &m2, rule).unwrap(),
                &combine_pair(&m2, &m1, rule).unwrap(),
            ));
        }
        let norm = combine_pair(&m1, &m2, Rule::Normalized).unwrap();
        let un = combine_pair(&m1, &m2, Rule::Unnormalized).unwrap();
        let scale = 1.0 - un.empty();
        let stripped = MassFunction::new(
            un.singletons().iter().map(|v| v / scale).collect(),
            un.theta() / scale,
        )
        .map_err(|e| e.to_string())?;
        consist = consist.max(max_gap(&norm, &stripped));
    }
    ensure(comm <= 1e-12, || format!("commutativity gap {comm:e}"))?;
    ensure(consist <= 1e-12, || format!("consistency gap {consist:e}"))?;
    within_time(start, Duration::from_secs(5))?;
    Ok(format!(
        "neutral exactly; commutativity {comm:.1e}; consistency {consist:.1e}"
    ))
}

// 6 -------------------------------------------------------------------------

fn fuzzy_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut residual, mut chain_gap) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let n = rng.random_range(2..=6);
        let target = rng.random_range(0.5..=2.0);
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let g: Vec<f64> = raw
            .iter()
            .map(|r| (target * r / s).clamp(1e-6, 0.9999))
            .collect();
        let lambda = solve_lambda(&g).map_err(|e| e.to_string())?;
        ensure(lambda > -1.0, || format!("λ = {lambda} for {g:?}"))?;
        let product: f64 = g.iter().map(|x| 1.0 + lambda * x).product();
        residual = residual.max(((lambda + 1.0) - product).abs());

        let dens = FuzzyDensities::from_densities(g).map_err(|e| e.to_string())?;
        let h: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let chain = measure_chain(&dens, &descending_order(&h));
        ensure(chain.windows(2).all(|w| w[0] <= w[1]), || {
            format!("chain not monotone: {chain:?}")
        })?;
        chain_gap = chain_gap.max((chain[n - 1] - 1.0).abs());
    }
    ensure(residual <= 1e-10, || format!("residual {residual:e}"))?;
    ensure(chain_gap <= 1e-9, || format!("g(A_N) off by {chain_gap:e}"))?;

    let dens = FuzzyDensities::from_densities(vec![0.3, 0.3]).map_err(|e| e.to_string())?;
    ensure((dens.lambda - 4.44444).abs() <= 1e-4, || {
        format!("λ = {}", dens.lambda)
    })?;
    let e = fuzzy_integral(&[0.8, 0.5], &dens).map_err(|e| e.to_string())?;
    ensure(e == 0.5, || format!("e = {e}"))?;
    within_time(start, Duration::from_secs(5))?;
    Ok(format!(
        "residual {residual:.1e}, chain end gap {chain_gap:.1e}, λ(0.3,0.3) = {:.5}, e = {e}",
        dens.lambda
    ))
}

// 7 -------------------------------------------------------------------------

fn training_end_to_end() -> Outcome {
    let start = Instant::now();
    let accuracy = [0.70, 0.76, 0.82, 0.88];
    let spec = SynthSpec {
        classes: 3,
        classifiers: 4,
        pattern_count: 2000,
        test_pattern_count: 1000,
        accuracy: accuracy.iter().map(|&a| vec![a; 3]).collect(),
        noise_temperature: 1.0,
        correlation: 0.0,
        seed: 7,
        labels: None,
    };
    let (train_set, test_set) = gen_split(&spec).map_err(|e| e.to_string())?;
    let config = TrainConfig {
        seed: 7,
        ..TrainConfig::default()
    };
    let (params, trace) = train(&train_set, &config).map_err(|e| e.to_string())?;
    ensure(trace.epochs_run <= 50, || {
        format!("{} epochs", trace.epochs_run)
    })?;
    let returned = dataset_mse(&params, &train_set).map_err(|e| e.to_string())?;
    ensure(returned <= trace.initial_mse, || {
        format!("returned mse {returned} > initial {}", trace.initial_mse)
    })?;

    let labels: Vec<usize> = test_set.patterns().iter().map(|p| p.label()).collect();
    let pct = |hits: usize| 100.0 * hits as f64 / labels.len() as f64;
    let best_single = (0..4)
        .map(|n| {
            pct(test_set
                .patterns()
                .iter()
                .filter(|p| argmax(p.scores[n].scores()) == p.label())
                .count())
        })
        .fold(0.0, f64::max);
    let fused = pct(test_set
        .patterns()
        .iter()
        .filter(|p| predict(&params, &p.scores).unwrap() == p.label())
        .count());
    ensure(fused >= best_single - 0.5, || {
        format!("DS1 {fused:.2}% vs best single {best_single:.2}%")
    })?;
    within_time(start, Duration::from_secs(60))?;
    Ok(format!(
        "{} epochs, mse {:.4} -> {returned:.4}, DS1 {fused:.2}% vs best single {best_single:.2}%, {:.2?}",
        trace.epochs_run,
        trace.initial_mse,
        start.elapsed()
    ))
}

// 8 -------------------------------------------------------------------------

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dsfusion"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let bytes = fs::read(&path).unwrap();
                files.push((path.strip_prefix(dir).unwrap().to_path_buf(), bytes));
            }
        }
    }
    files.sort();
    files
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = root.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"classes":3,"classifiers":3,"pattern_count":600,"test_pattern_count":300,
            "accuracy":[[0.7,0.75,0.8],[0.8,0.8,0.8],[0.85,0.7,0.9]],
            "noise_temperature":1.0,"correlation":0.2,"seed":11}"#,
    )
    .map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for run in ["a", "b"] {
        let dir = root.path().join(run);
        let s = |p: PathBuf| p.to_string_lossy().into_owned();
        run_cli(&[
            "gen",
            "--config",
            &s(spec.clone()),
            "--out",
            &s(dir.join("data")),
        ])?;
        run_cli(&[
            "train",
            "--manifest",
            &s(dir.join("data/train/manifest.json")),
            "--out",
            &s(dir.join("artifacts")),
            "--seed",
            "5",
        ])?;
        run_cli(&[
            "evaluate",
            "--manifest",
            &s(dir.join("data/test/manifest.json")),
            "--artifacts",
            &s(dir.join("artifacts")),
            "--out",
            &s(dir.join("report")),
        ])?;
        runs.push(snapshot(&dir));
    }
    ensure(!runs[0].is_empty(), || "no files written".into())?;
    ensure(runs[0].len() == runs[1].len(), || {
        "different file sets".into()
    })?;
    for ((pa, ba), (pb, bb)) in runs[0].iter().zip(&runs[1]) {
        ensure(pa == pb, || format!("{} vs {}", pa.display(), pb.display()))?;
        ensure(ba == bb, || {
            format!("{} differs between runs", pa.display())
        })?;
    }
    Ok(format!(
        "{} files byte-identical across two gen/train/evaluate runs",
        runs[0].len()
    ))
}

// 9 -------------------------------------------------------------------------

fn ds0_worked_example() -> Outcome {
    let m = class_evidence(&[0.8, 0.5, 0.5], 0).map_err(|e| e.to_string())?;
    let got = [
        m.mass(CLASS_BIT),
        m.mass(COMPLEMENT_BIT),
        m.mass(FRAME_MASK),
    ];
    let expected = [0.5, 0.375, 0.125];
    let gap = got
        .iter()
        .zip(expected)
        .map(|(g, e)| (g - e).abs())
        .fold(0.0, f64::max);
    ensure(gap <= 1e-15, || format!("masses {got:?}"))?;
    ensure(m.focal_elements().count() == 3, || {
        "expected three focal elements".into()
    })?;
    Ok(format!(
        "m(θk) = {}, m(¬θk) = {}, m(Θ) = {}",
        got[0], got[1], got[2]
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("ERR fixture", err_fixture),
        ("overall-performance fixture", overall_fixture),
        ("gradient battery", gradient_battery),
        ("oracle equivalence", oracle_equivalence),
        ("combination-rule algebra", rule_algebra),
        ("fuzzy-integral suite", fuzzy_suite),
        ("training end-to-end", training_end_to_end),
        ("determinism", determinism),
        ("DS0 worked example", ds0_worked_example),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
