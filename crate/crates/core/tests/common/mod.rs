#![allow(dead_code, clippy::needless_range_loop)]

use std::sync::Arc;

use posture_core::{GroundDistance, Lexicon, MassVector, Skeleton};
use rand::Rng;

pub fn lexicon(n: usize) -> Arc<Lexicon> {
    Arc::new(Lexicon::new(format!("t{n}"), (0..n).map(|i| format!("t{i}"))).unwrap())
}

/// Random unit-mass vector; roughly a third of the terms get zero mass.
pub fn random_masses<R: Rng>(rng: &mut R, lex: &Arc<Lexicon>) -> MassVector {
    loop {
        let masses: Vec<f64> = (0..lex.len())
            .map(|_| if rng.gen_bool(0.33) { 0.0 } else { rng.gen_range(0.0..1.0) })
            .collect();
        if let Ok(m) = MassVector::new(lex.clone(), masses) {
            return m;
        }
    }
}

/// Euclidean distances between random points: a metric with positive
/// off-diagonal entries.
pub fn euclidean_ground<R: Rng>(rng: &mut R, lex: &Arc<Lexicon>) -> GroundDistance {
    let dim = rng.gen_range(1..=4);
    let pts: Vec<Vec<f64>> = (0..lex.len())
        .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let rows = (0..lex.len())
        .map(|i| {
            (0..lex.len())
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        let d: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                        d.sqrt()
                    }
                })
                .collect()
        })
        .collect::<Vec<Vec<f64>>>();
    GroundDistance::new(lex.clone(), symmetrize(rows)).unwrap()
}

/// Shortest-path closure of random symmetric edge weights.
pub fn graph_ground<R: Rng>(rng: &mut R, lex: &Arc<Lexicon>) -> GroundDistance {
    let n = lex.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.gen_range(0.1..3.0);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    GroundDistance::new(lex.clone(), symmetrize(d)).unwrap()
}

pub fn random_metric<R: Rng>(rng: &mut R, lex: &Arc<Lexicon>) -> GroundDistance {
    if rng.gen_bool(0.5) {
        euclidean_ground(rng, lex)
    } else {
        graph_ground(rng, lex)
    }
}

fn symmetrize(mut d: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = d.len();
    for i in 0..n {
        d[i][i] = 0.0;
        for j in (i + 1)..n {
            d[j][i] = d[i][j];
        }
    }
    d
}

/// Independent reference value from the dense LP oracle on the full matrix.
pub fn oracle_distance(a: &MassVector, b: &MassVector, ground: &GroundDistance) -> f64 {
    let n = ground.len();
    let cost: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| ground.get(i, j)).collect();
    lp_oracle::transport_cost(a.masses(), b.masses(), &cost)
}

/// Random but anatomically loose skeleton with non-degenerate segments and
/// a well-defined shoulder frame.
pub fn random_skeleton<R: Rng>(rng: &mut R) -> Skeleton {
    let mut p = |scale: f64| -> [f64; 3] {
        [rng.gen_range(-scale..scale), rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)]
    };
    let jitter = p(0.05);
    let torso = [jitter[0], 1.1 + jitter[1], jitter[2]];
    let j2 = p(0.05);
    let right_shoulder = [0.2 + j2[0], 1.4 + j2[1], j2[2]];
    let j3 = p(0.05);
    let left_shoulder = [-0.2 + j3[0], 1.4 + j3[1], j3[2]];
    let arm = loop {
        let v = p(1.0);
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.05 && n <= 1.0 {
            break [v[0] / n * 0.3, v[1] / n * 0.3, v[2] / n * 0.3];
        }
    };
    let fore = loop {
        let v = p(1.0);
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.05 && n <= 1.0 {
            break [v[0] / n * 0.25, v[1] / n * 0.25, v[2] / n * 0.25];
        }
    };
    let elbow = [right_shoulder[0] + arm[0], right_shoulder[1] + arm[1], right_shoulder[2] + arm[2]];
    let wrist = [elbow[0] + fore[0], elbow[1] + fore[1], elbow[2] + fore[2]];
    Skeleton::default()
        .with_joint("torso", torso)
        .with_joint("right_shoulder", right_shoulder)
        .with_joint("left_shoulder", left_shoulder)
        .with_joint("right_elbow", elbow)
        .with_joint("right_wrist", wrist)
}
