#![allow(dead_code)]

use antires::spectral::{antiresonances, resonances};
use antires::{Mode, ModeNetwork};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn label(i: usize) -> String {
    format!("n{}", i + 1)
}

/// Connected network of `n` modes: a random spanning chain plus each other
/// pair with probability 1/3. Node `n1` is driven.
pub fn random_network(
    rng: &mut ChaCha8Rng,
    n: usize,
    frequency_span: f64,
    decays: &[f64],
    coupling: (f64, f64),
) -> ModeNetwork {
    let modes = (0..n)
        .map(|i| {
            let f = rng.random_range(-frequency_span..frequency_span);
            if rng.random_bool(0.5) {
                Mode::resonator(label(i), f, decays[i])
            } else {
                Mode::emitter(label(i), f, decays[i])
            }
        })
        .collect();
    let mut net = ModeNetwork::from_modes(modes).unwrap();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut linked = vec![vec![false; n]; n];
    for w in order.windows(2) {
        linked[w[0]][w[1]] = true;
        linked[w[1]][w[0]] = true;
    }
    for (i, row) in linked.iter().enumerate() {
        for (j, &link) in row.iter().enumerate().skip(i + 1) {
            if link || rng.random_bool(1.0 / 3.0) {
                let g = rng.random_range(coupling.0..coupling.1);
                net = net.with_coupling(&label(i), &label(j), g).unwrap();
            }
        }
    }
    net.with_drive("n1", Complex64::new(1.0, 0.0)).unwrap()
}

/// Poles and zeros (`center`, `half_width`, is_pole) of the `n1`-driven
/// response, sorted by center.
pub fn features(net: &ModeNetwork) -> Vec<(f64, f64, bool)> {
    let mut out: Vec<(f64, f64, bool)> = resonances(net)
        .unwrap()
        .iter()
        .map(|p| (p.center, p.half_width, true))
        .chain(antiresonances(net, "n1").unwrap().iter().map(|z| (z.center, z.half_width, false)))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Every neighbouring pair of features is separated by at least `factor`
/// times the larger of their half-widths, and nothing is degenerate.
pub fn well_resolved(features: &[(f64, f64, bool)], factor: f64) -> bool {
    features
        .windows(2)
        .all(|w| w[1].0 - w[0].0 >= factor * w[0].1.max(w[1].1))
        && features.iter().all(|f| f.1 > 0.0)
}

/// Up to `count` well-resolved random networks drawn from consecutive seeds.
pub fn resolved_networks(count: usize, n: usize) -> Vec<(u64, ModeNetwork)> {
    use rand::SeedableRng;
    let mut out = Vec::new();
    for seed in 0..200_000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let decays: Vec<f64> = (0..n).map(|_| rng.random_range(0.02..0.1)).collect();
        let net = random_network(&mut rng, n, 25.0, &decays, (2.0, 6.0));
        if features(&net).len() == 2 * n - 1 && well_resolved(&features(&net), 10.0) {
            out.push((seed, net));
            if out.len() == count {
                break;
            }
        }
    }
    out
}
