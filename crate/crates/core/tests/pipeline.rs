use std::path::Path;

use gek::clustering::{detect_communities, Algorithm, PointCloud, Sweep};
use gek::metrics::{ars, read_partition};
use gek::{
    apsp, optimize_direct, read_edge_list, rmse, train_neural, Graph, LossKind, NeuralConfig,
    NeuralModel, OptimConfig,
};

fn karate() -> Graph {
    read_edge_list(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/karate.edges")).unwrap()
}

#[test]
fn neural_tracks_direct_in_higher_dimensions() {
    let d = apsp(&karate());
    let direct = optimize_direct(
        &d,
        &OptimConfig {
            dim: 10,
            ..OptimConfig::default()
        },
    )
    .unwrap();
    let defaults = NeuralConfig::default();
    let neural = train_neural(
        &d,
        &NeuralConfig {
            optim: OptimConfig {
                dim: 10,
                ..defaults.optim
            },
            ..defaults
        },
    )
    .unwrap();
    assert!(
        neural.stress <= 2.0 * direct.stress,
        "{} vs {}",
        neural.stress,
        direct.stress
    );
}

#[test]
fn saved_model_reproduces_training_embedding() {
    let d = apsp(&karate());
    let cfg = NeuralConfig {
        optim: OptimConfig {
            iterations: 200,
            ..OptimConfig::default()
        },
        hidden: vec![16, 16],
        ..NeuralConfig::default()
    };
    let fit = train_neural(&d, &cfg).unwrap();
    let model = NeuralModel::from_json(&fit.model().to_json().unwrap()).unwrap();
    let again = model.embed(&d).unwrap();
    assert_eq!(again.coords(), fit.embedding.coords());
    assert!((rmse(&again, &d) - rmse(&fit.embedding, &d)).abs() < 1e-12);
}

#[test]
fn embedding_recovers_karate_split() {
    let g = karate();
    let truth = read_partition(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/karate.truth"),
        g.names(),
    )
    .unwrap();
    let d = apsp(&g);
    let cfg = OptimConfig {
        loss: LossKind::Relative,
        ..OptimConfig::default()
    };
    let e = optimize_direct(&d, &cfg).unwrap().embedding;
    let sweep = Sweep::default_for(&PointCloud::from_embedding(&e));
    let results = detect_communities(&g, &e, &[Algorithm::Agglomerative], &sweep).unwrap();
    let two = results.iter().find(|r| r.partition.k() == 2).unwrap();
    assert!(ars(&two.partition, &truth) > 0.5);
}
