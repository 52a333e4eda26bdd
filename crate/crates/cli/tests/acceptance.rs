//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p gek-cli --test acceptance`.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gek::baselines::{girvan_newman, greedy_modularity, kernighan_lin, louvain, Selection};
use gek::clustering::{detect_communities, Algorithm, PointCloud, Sweep};
use gek::embed::{stress, stress_gradient, Kappa};
use gek::graph::{apsp, read_edge_list, DistanceMatrix, Graph};
use gek::metrics::{ars, modularity, nmi, read_partition, rmrse, rmse, Partition};
use gek::neural::{mlp_gradient, network_inputs, train_neural, MlpParams, NeuralConfig};
use gek::{optimize_direct, EmbeddingSet, KappaMode, LossKind, OptimConfig};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn load(name: &str) -> (Graph, Partition) {
    let g = read_edge_list(data(&format!("{name}.edges"))).unwrap();
    let truth = read_partition(data(&format!("{name}.truth")), g.names()).unwrap();
    (g, truth)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(a).max(norm(b)).max(1e-300)
}

// ---------------------------------------------------------------- 1

/// Optimum stress of the 4-cycle at κ = 1: the sides fit exactly and both
/// diagonals measure √2 instead of 2, giving (√2 − 2)² / 6.
fn square_kappa_one_optimum() -> f64 {
    (2f64.sqrt() - 2.0).powi(2) / 6.0
}

fn square() -> Outcome {
    let d = apsp(&read_edge_list(data("square.edges")).unwrap());
    let mut notes = Vec::new();
    let mut pass = true;
    for seed in 1..=5 {
        let cfg = OptimConfig {
            kappa: KappaMode::Learned,
            seed,
            ..OptimConfig::default()
        };
        let fit = optimize_direct(&d, &cfg).unwrap();
        let k = fit.embedding.kappa();
        let ok = fit.stress < 1e-3 && (1.8..=2.0).contains(&k);
        pass &= ok;
        if seed == 1 {
            notes.push(format!("learned kappa {k:.4} stress {:.2e}", fit.stress));
        }
    }
    let floor = square_kappa_one_optimum();
    let best_fixed = (1..=5)
        .map(|seed| {
            let cfg = OptimConfig {
                seed,
                ..OptimConfig::default()
            };
            let fit = optimize_direct(&d, &cfg).unwrap();
            stress(&fit.embedding, &d, LossKind::Absolute, 0.0)
        })
        .fold(f64::INFINITY, f64::min);
    pass &= best_fixed >= floor - 1e-6 && best_fixed <= floor + 1e-3;
    notes.push(format!(
        "kappa=1 stress {best_fixed:.6} vs optimum {floor:.6}"
    ));
    outcome(pass, notes.join(", "))
}

// ---------------------------------------------------------------- 2

/// Stress written out from the definition, independent of the library.
fn oracle_stress(
    coords: &[f64],
    n: usize,
    m: usize,
    d: &DistanceMatrix,
    kappa: f64,
    loss: LossKind,
) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..i {
            let sq: f64 = (0..m)
                .map(|c| (coords[i * m + c] - coords[j * m + c]).powi(2))
                .sum();
            let dist = (sq + 1e-12).powf(kappa / 2.0);
            let target = d.get(i, j);
            sum += match loss {
                LossKind::Absolute => (dist - target).powi(2),
                LossKind::Relative => (dist / target - 1.0).powi(2),
            };
        }
    }
    2.0 * sum / (n * (n - 1)) as f64
}

fn oracle_kappa(alpha: f64) -> f64 {
    0.05 + 1.95 / (1.0 + (-alpha).exp())
}

fn random_distances(n: usize, rng: &mut ChaCha8Rng) -> DistanceMatrix {
    let mut dm = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..i {
            let x = rng.random_range(0.5..4.0);
            dm[[i, j]] = x;
            dm[[j, i]] = x;
        }
    }
    DistanceMatrix::new(dm).unwrap()
}

fn hand_forward(p: &MlpParams, x: &[f64]) -> Vec<f64> {
    let layers = p.weights().len();
    let mut a = x.to_vec();
    for l in 0..layers {
        let (w, b) = (&p.weights()[l], &p.biases()[l]);
        a = (0..w.nrows())
            .map(|o| {
                let z = b[o] + (0..a.len()).map(|i| w[[o, i]] * a[i]).sum::<f64>();
                if l + 1 < layers {
                    z.tanh()
                } else {
                    z
                }
            })
            .collect();
    }
    a
}

fn gradients() -> Outcome {
    let h = 1e-6;
    let mut worst_direct: f64 = 0.0;
    let mut worst_neural: f64 = 0.0;
    for instance in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + instance);
        let n = rng.random_range(3..=8);
        let m = rng.random_range(1..=4);
        let loss = if instance % 2 == 0 {
            LossKind::Absolute
        } else {
            LossKind::Relative
        };
        let learned = instance % 4 >= 2;
        let d = random_distances(n, &mut rng);
        let kappa = if learned {
            Kappa::Learned {
                alpha: rng.random_range(-1.5..1.5),
            }
        } else {
            Kappa::Fixed(rng.random_range(0.3..2.0))
        };
        let k_of = |a: f64| {
            if learned {
                oracle_kappa(a)
            } else {
                kappa.value()
            }
        };
        let alpha0 = match kappa {
            Kappa::Learned { alpha } => alpha,
            Kappa::Fixed(_) => 0.0,
        };

        // direct path
        let coords: Vec<f64> = (0..n * m).map(|_| rng.random_range(-2.0..2.0)).collect();
        let view = Array2::from_shape_vec((n, m), coords.clone()).unwrap();
        let g = stress_gradient(view.view(), kappa, &d, loss, 1e-12);
        let mut analytic: Vec<f64> = g.coords.iter().copied().collect();
        let mut numeric = Vec::new();
        for idx in 0..n * m {
            let (mut up, mut down) = (coords.clone(), coords.clone());
            up[idx] += h;
            down[idx] -= h;
            numeric.push(
                (oracle_stress(&up, n, m, &d, k_of(alpha0), loss)
                    - oracle_stress(&down, n, m, &d, k_of(alpha0), loss))
                    / (2.0 * h),
            );
        }
        if learned {
            analytic.push(g.alpha);
            numeric.push(
                (oracle_stress(&coords, n, m, &d, k_of(alpha0 + h), loss)
                    - oracle_stress(&coords, n, m, &d, k_of(alpha0 - h), loss))
                    / (2.0 * h),
            );
        }
        worst_direct = worst_direct.max(relative_error(&analytic, &numeric));

        // network path
        let hidden: Vec<usize> = (0..rng.random_range(1..=2))
            .map(|_| rng.random_range(3..=8))
            .collect();
        let mut sizes = vec![n];
        sizes.extend(&hidden);
        sizes.push(m);
        let mut p = MlpParams::xavier(&sizes, &mut rng);
        for b in p.biases_mut() {
            b.mapv_inplace(|_| rng.random_range(-0.5..0.5));
        }
        let inputs = network_inputs(&d, d.max());
        let objective = |q: &MlpParams, kv: f64| {
            let out: Vec<f64> = inputs
                .outer_iter()
                .flat_map(|row| hand_forward(q, row.as_slice().unwrap()))
                .collect();
            oracle_stress(&out, n, m, &d, kv, loss)
        };
        let g = mlp_gradient(&p, inputs.view(), &d, loss, kappa, 1e-12);
        let mut analytic = Vec::new();
        let mut numeric = Vec::new();
        for l in 0..p.weights().len() {
            for idx in 0..p.weights()[l].len() {
                let (mut up, mut down) = (p.clone(), p.clone());
                up.weights_mut()[l].as_slice_mut().unwrap()[idx] += h;
                down.weights_mut()[l].as_slice_mut().unwrap()[idx] -= h;
                numeric.push(
                    (objective(&up, k_of(alpha0)) - objective(&down, k_of(alpha0))) / (2.0 * h),
                );
                analytic.push(g.weights[l].as_slice().unwrap()[idx]);
            }
            for idx in 0..p.biases()[l].len() {
                let (mut up, mut down) = (p.clone(), p.clone());
                up.biases_mut()[l][idx] += h;
                down.biases_mut()[l][idx] -= h;
                numeric.push(
                    (objective(&up, k_of(alpha0)) - objective(&down, k_of(alpha0))) / (2.0 * h),
                );
                analytic.push(g.biases[l][idx]);
            }
        }
        if learned {
            analytic.push(g.alpha);
            numeric.push(
                (objective(&p, k_of(alpha0 + h)) - objective(&p, k_of(alpha0 - h))) / (2.0 * h),
            );
        }
        worst_neural = worst_neural.max(relative_error(&analytic, &numeric));
    }
    outcome(
        worst_direct < 1e-5 && worst_neural < 1e-4,
        format!("worst relative error direct {worst_direct:.2e}, network {worst_neural:.2e}"),
    )
}

// ---------------------------------------------------------------- 3

fn zachary_fit() -> Outcome {
    let (g, _) = load("karate");
    let d = apsp(&g);
    let direct = (1..=5)
        .map(|seed| {
            let cfg = OptimConfig {
                seed,
                ..OptimConfig::default()
            };
            rmse(&optimize_direct(&d, &cfg).unwrap().embedding, &d)
        })
        .fold(f64::INFINITY, f64::min);
    let neural = (1..=5)
        .map(|seed| {
            let base = NeuralConfig::default();
            let cfg = NeuralConfig {
                optim: OptimConfig {
                    seed,
                    ..base.optim.clone()
                },
                ..base
            };
            rmse(&train_neural(&d, &cfg).unwrap().embedding, &d)
        })
        .fold(f64::INFINITY, f64::min);
    let within = |x: f64| (0.35..=0.75).contains(&x);
    outcome(
        within(direct) && within(neural),
        format!("best RMSE direct {direct:.4}, neural {neural:.4}"),
    )
}

// ---------------------------------------------------------------- 4

/// The top-modularity cell of a sweep, scored against the truth.
fn top_cell(g: &Graph, e: &EmbeddingSet, algo: Algorithm, truth: &Partition) -> (f64, f64, usize) {
    let sweep = Sweep::default_for(&PointCloud::from_embedding(e));
    let res = detect_communities(g, e, &[algo], &sweep).unwrap();
    let top = &res[0].partition;
    (ars(top, truth), nmi(top, truth), top.k())
}

fn zachary_communities() -> Outcome {
    let (g, truth) = load("karate");
    let d = apsp(&g);
    let mut best: (f64, f64, &str, u64) = (f64::NEG_INFINITY, 0.0, "", 0);
    for method in ["direct", "neural"] {
        for seed in 1..=10 {
            let opt = OptimConfig {
                seed,
                loss: LossKind::Relative,
                kappa: KappaMode::Fixed(1.5),
                ..OptimConfig::default()
            };
            let e = if method == "direct" {
                optimize_direct(&d, &opt).unwrap().embedding
            } else {
                let base = NeuralConfig::default();
                let cfg = NeuralConfig {
                    optim: OptimConfig {
                        learning_rate: base.optim.learning_rate,
                        ..opt
                    },
                    ..base
                };
                train_neural(&d, &cfg).unwrap().embedding
            };
            let (a, n, _) = top_cell(&g, &e, Algorithm::MeanShift, &truth);
            if a > best.0 {
                best = (a, n, method, seed);
            }
        }
    }
    outcome(
        best.0 >= 0.88 && best.1 >= 0.80,
        format!(
            "best ARS {:.4}, NMI {:.4} ({} seed {})",
            best.0, best.1, best.2, best.3
        ),
    )
}

// ---------------------------------------------------------------- 5

fn football() -> Outcome {
    let (g, truth) = load("football");
    let d = apsp(&g);
    let mut pass_any = false;
    let mut notes = Vec::new();
    for loss in [LossKind::Absolute, LossKind::Relative] {
        let cfg = OptimConfig {
            loss,
            dim: 15,
            ..OptimConfig::default()
        };
        let e = optimize_direct(&d, &cfg).unwrap().embedding;
        let (a, n, k) = top_cell(&g, &e, Algorithm::AffinityPropagation, &truth);
        pass_any |= a >= 0.75 && n >= 0.85;
        notes.push(format!("affinity {loss} ARS {a:.4} NMI {n:.4} k={k}"));
    }
    let gn = girvan_newman(&g, Selection::TargetK(12));
    let gn_nmi = nmi(&gn, &truth);
    notes.push(format!("Girvan-Newman NMI {gn_nmi:.4}"));
    outcome(pass_any && gn_nmi >= 0.85, notes.join(", "))
}

// ---------------------------------------------------------------- 6

fn baselines() -> Outcome {
    let (g, _) = load("karate");
    let best_of = |f: &dyn Fn(u64) -> Partition| {
        (0..10)
            .map(|s| modularity(&g, &f(s)))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let lv = best_of(&|s| louvain(&g, s));
    let gr = modularity(&g, &greedy_modularity(&g));
    let kl = best_of(&|s| kernighan_lin(&g, s));
    outcome(
        lv >= 0.40 && gr >= 0.36 && kl >= 0.34,
        format!("Louvain {lv:.4}, greedy {gr:.4}, Kernighan-Lin {kl:.4}"),
    )
}

// ---------------------------------------------------------------- 7

/// All-pairs shortest paths by Floyd–Warshall, then the cross-component rule.
fn floyd_warshall(g: &Graph) -> Array2<f64> {
    let n = g.n();
    let mut d = Array2::from_elem((n, n), f64::INFINITY);
    for i in 0..n {
        d[[i, i]] = 0.0;
    }
    for e in g.edges() {
        d[[e.u, e.v]] = d[[e.u, e.v]].min(e.w);
        d[[e.v, e.u]] = d[[e.v, e.u]].min(e.w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[[i, k]] + d[[k, j]];
                if via < d[[i, j]] {
                    d[[i, j]] = via;
                }
            }
        }
    }
    let finite_max = d
        .iter()
        .filter(|x| x.is_finite())
        .fold(0.0f64, |a, &b| a.max(b));
    let fill = if g.edge_count() == 0 {
        1.0
    } else {
        finite_max + 1.0
    };
    d.mapv_inplace(|x| if x.is_finite() { x } else { fill });
    d
}

fn random_partition(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let k = rng.random_range(1..=6);
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

fn relabel(labels: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..10).map(|x| x * 7 + 3).collect();
    for i in (1..perm.len()).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    labels.iter().map(|&l| perm[l]).collect()
}

fn metric_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst_fit: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=10);
        let m = rng.random_range(1..=4);
        let d = random_distances(n, &mut rng);
        let coords = Array2::from_shape_fn((n, m), |_| rng.random_range(-3.0..3.0));
        let e = EmbeddingSet::new(coords, rng.random_range(0.05..2.0)).unwrap();
        let abs = stress(&e, &d, LossKind::Absolute, 0.0);
        let rel = stress(&e, &d, LossKind::Relative, 0.0);
        worst_fit = worst_fit
            .max((rmse(&e, &d).powi(2) - abs).abs() / abs.max(1.0))
            .max((rmrse(&e, &d).powi(2) - rel).abs() / rel.max(1.0));
    }

    let mut worst_label: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=40);
        let a = random_partition(n, &mut rng);
        let b = random_partition(n, &mut rng);
        let (pa, pb) = (
            Partition::from_labels(a.clone()),
            Partition::from_labels(b.clone()),
        );
        let qa = Partition::from_labels(relabel(&a, &mut rng));
        let qb = Partition::from_labels(relabel(&b, &mut rng));
        worst_label = worst_label
            .max((ars(&pa, &pb) - ars(&qa, &qb)).abs())
            .max((nmi(&pa, &pb) - nmi(&qa, &qb)).abs());
    }

    let mut worst_whole: f64 = 0.0;
    let mut apsp_mismatch = 0;
    for sample in 0..500 {
        let n = rng.random_range(1..=8);
        let p = rng.random_range(0.1..0.9);
        let weighted = sample % 2 == 1;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    let w = if weighted {
                        rng.random_range(0.1..5.0)
                    } else {
                        1.0
                    };
                    edges.push((i, j, w));
                }
            }
        }
        let g = Graph::from_edges(n, edges).unwrap();
        worst_whole = worst_whole.max(modularity(&g, &Partition::whole(n)).abs());
        let fast = apsp(&g);
        let slow = floyd_warshall(&g);
        let tol = if weighted { 1e-9 } else { 0.0 };
        let same = fast
            .as_array()
            .iter()
            .zip(slow.iter())
            .all(|(a, b)| (a - b).abs() <= tol);
        if !same {
            apsp_mismatch += 1;
        }
    }
    outcome(
        worst_fit <= 1e-12 && worst_label <= 1e-12 && worst_whole <= 1e-12 && apsp_mismatch == 0,
        format!(
            "fit identity {worst_fit:.1e}, relabeling {worst_label:.1e}, single community {worst_whole:.1e}, APSP mismatches {apsp_mismatch}/500"
        ),
    )
}

// ---------------------------------------------------------------- 8

fn zachary_runs(dim: usize, kappa: KappaMode) -> (DistanceMatrix, Vec<EmbeddingSet>) {
    let (g, _) = load("karate");
    let d = apsp(&g);
    let runs = (1..=5)
        .map(|seed| {
            let cfg = OptimConfig {
                seed,
                dim,
                kappa,
                ..OptimConfig::default()
            };
            optimize_direct(&d, &cfg).unwrap().embedding
        })
        .collect();
    (d, runs)
}

fn dimension_trend() -> Outcome {
    let medians: Vec<f64> = [2, 5, 10]
        .iter()
        .map(|&m| {
            let (d, runs) = zachary_runs(m, KappaMode::Fixed(1.0));
            median(runs.iter().map(|e| rmse(e, &d)).collect())
        })
        .collect();
    outcome(
        medians.windows(2).all(|w| w[1] <= 1.05 * w[0]),
        format!(
            "median RMSE m=2 {:.4}, m=5 {:.4}, m=10 {:.4}",
            medians[0], medians[1], medians[2]
        ),
    )
}

fn kappa_trend() -> Outcome {
    let kappas: Vec<f64> = [2, 10]
        .iter()
        .map(|&m| {
            median(
                zachary_runs(m, KappaMode::Learned)
                    .1
                    .iter()
                    .map(EmbeddingSet::kappa)
                    .collect(),
            )
        })
        .collect();
    outcome(
        kappas[1] >= kappas[0],
        format!(
            "median learned kappa m=2 {:.4}, m=10 {:.4}",
            kappas[0], kappas[1]
        ),
    )
}

// ---------------------------------------------------------------- 9

fn gek(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_gek"))
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "gek {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn determinism() -> Outcome {
    let karate = data("karate.edges");
    let truth = data("karate.truth");
    let karate = karate.to_str().unwrap();
    let truth = truth.to_str().unwrap();
    let run = |dir: &Path| -> Vec<(String, Vec<u8>)> {
        let p = |name: &str| dir.join(name).to_str().unwrap().to_owned();
        let mut stdout = Vec::new();
        gek(&[
            "embed",
            "--graph",
            karate,
            "--out",
            &p("direct.tsv"),
            "--kappa",
            "auto",
            "--seed",
            "3",
        ]);
        gek(&[
            "embed",
            "--graph",
            karate,
            "--out",
            &p("neural.tsv"),
            "--method",
            "neural",
            "--iters",
            "200",
            "--hidden",
            "32,32",
            "--loss",
            "rel",
            "--seed",
            "3",
            "--model-out",
            &p("model.json"),
        ]);
        stdout.push((
            "communities".to_owned(),
            gek(&[
                "communities",
                "--graph",
                karate,
                "--embedding",
                &p("direct.tsv"),
                "--truth",
                truth,
                "--out",
                &p("communities.txt"),
                "--summary",
                &p("summary.json"),
            ]),
        ));
        for algo in ["louvain", "gn", "greedy", "lpa", "kl"] {
            stdout.push((
                algo.to_owned(),
                gek(&[
                    "baselines",
                    "--graph",
                    karate,
                    "--algo",
                    algo,
                    "--seed",
                    "5",
                    "--truth",
                    truth,
                    "--out",
                    &p(&format!("{algo}.txt")),
                ]),
            ));
        }
        stdout.push((
            "eval".to_owned(),
            gek(&[
                "eval",
                "--graph",
                karate,
                "--embedding",
                &p("neural.tsv"),
                "--communities",
                &p("communities.txt"),
                "--truth",
                truth,
            ]),
        ));
        gek(&[
            "draw",
            "--graph",
            karate,
            "--embedding",
            &p("direct.tsv"),
            "--communities",
            &p("communities.txt"),
            "--out",
            &p("drawing.svg"),
        ]);
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|path| {
                (
                    path.file_name().unwrap().to_string_lossy().into_owned(),
                    std::fs::read(&path).unwrap(),
                )
            })
            .collect();
        files.sort();
        files.extend(stdout);
        files
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run(a.path());
    let second = run(b.path());
    let differing: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.0.as_str())
        .collect();
    outcome(
        first.len() == second.len() && differing.is_empty(),
        format!("{} outputs compared, differing: {differing:?}", first.len()),
    )
}

// ----------------------------------------------------------------

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check, Duration); 9] = [
        ("1 square-graph exactness", square, Duration::from_secs(5)),
        ("2 gradient correctness", gradients, Duration::from_secs(30)),
        (
            "3 Zachary fit quality",
            zachary_fit,
            Duration::from_secs(120),
        ),
        (
            "4 Zachary community detection",
            zachary_communities,
            Duration::from_secs(300),
        ),
        ("5 American Football", football, Duration::from_secs(600)),
        ("6 baseline sanity", baselines, Duration::from_secs(60)),
        (
            "7 metric identities",
            metric_identities,
            Duration::from_secs(60),
        ),
        (
            "8 dimension trend",
            dimension_trend,
            Duration::from_secs(300),
        ),
        ("9 CLI determinism", determinism, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    let report = |name: &str, o: Outcome, elapsed: Duration, limit: Duration| {
        let pass = o.pass && elapsed < limit;
        println!(
            "{} [{name}] {} ({:.1} s, limit {} s)",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        pass
    };
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let o = check();
        if !report(name, o, start.elapsed(), limit) {
            failed += 1;
        }
    }
    let start = Instant::now();
    let note = kappa_trend();
    if !report(
        "note kappa grows with dimension",
        note,
        start.elapsed(),
        Duration::from_secs(300),
    ) {
        failed += 1;
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        ExitCode::FAILURE
    } else {
        println!("all acceptance checks passed");
        ExitCode::SUCCESS
    }
}
