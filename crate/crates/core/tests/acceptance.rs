//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use antires::fit::stark_calibration;
use antires::heterodyne::{demodulate, phase_stream, synthesize, BeatNoteConfig};
use antires::network::{closed_form_two_mode, steady_state};
use antires::oracle::{linear_limit_check, JCParams, DEFAULT_ETA_OVER_KAPPA};
use antires::scenario::{oracle_check, stark_scan, ScenarioConfig};
use antires::spectral::{
    antiresonances, detect_antiresonances_numeric, lossy_component_identify, resonances, sweep, DetectOptions,
    DEFAULT_AMBIGUITY_TOLERANCE,
};
use antires::{Mode, ModeNetwork, ProbeGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// g²(0) at the cavity-driven antiresonance for g 16, γ 3, κ 1.5 MHz,
/// η = 0.015 MHz.
const ANTIRESONANCE_G2: f64 = 713.559_620_242_516_8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn config(json: &str) -> ScenarioConfig {
    ScenarioConfig::parse(json, Path::new(env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn two_mode(omega_c: f64, kappa: f64, omega_a: f64, gamma: f64, g: f64) -> ModeNetwork {
    ModeNetwork::from_modes(vec![Mode::resonator("cavity", omega_c, kappa), Mode::emitter("atom", omega_a, gamma)])
        .unwrap()
        .with_coupling("cavity", "atom", g)
        .unwrap()
        .with_drive("cavity", Complex64::new(1.0, 0.0))
        .unwrap()
}

fn closed_form_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws: Vec<[f64; 6]> = (0..10_000)
        .map(|_| {
            [
                rng.random_range(0.0..50.0),
                rng.random_range(0.1..10.0),
                rng.random_range(0.1..10.0),
                rng.random_range(-30.0..30.0),
                rng.random_range(-60.0..60.0),
                rng.random_range(0.01..2.0),
            ]
        })
        .collect();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for &[g, gamma, kappa, delta_ac, probe, eta] in &draws {
        let net = ModeNetwork::atom_cavity(g, gamma, kappa, delta_ac)
            .unwrap()
            .with_drive("cavity", Complex64::new(eta, 0.0))
            .unwrap();
        let general = steady_state(&net, probe).unwrap().amplitudes[0];
        let exact = closed_form_two_mode(probe - delta_ac, probe, gamma, kappa, g, eta);
        worst = worst.max((general - exact).norm() / exact.norm());
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-12 && elapsed < Duration::from_secs(1),
        format!("10^4 draws, worst relative error {worst:.2e}, {:.3} s", elapsed.as_secs_f64()),
    )
}

fn antiresonance_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let g = 1.0 + 49.0 * (k as f64 + 0.5) / 1000.0;
        let (omega_c, kappa) = (rng.random_range(-10.0..10.0), rng.random_range(0.1..5.0));
        let (omega_a, gamma) = (rng.random_range(-10.0..10.0), rng.random_range(0.1..5.0));
        let net = two_mode(omega_c, kappa, omega_a, gamma, g);
        let cavity = antiresonances(&net, "cavity").unwrap();
        let atom = antiresonances(&net.driven_only_at("atom").unwrap(), "atom").unwrap();
        assert_eq!((cavity.len(), atom.len()), (1, 1));
        worst = worst
            .max((cavity[0].center - omega_a).abs())
            .max((cavity[0].half_width - gamma).abs())
            .max((atom[0].center - omega_c).abs())
            .max((atom[0].half_width - kappa).abs());
    }
    outcome(
        worst <= 1e-12,
        format!("1000 couplings in (1, 50) MHz, worst deviation {worst:.2e} MHz"),
    )
}

fn stark_scan_reproduction() -> Outcome {
    let start = Instant::now();
    let still = stark_scan(&config("{}")).unwrap().fit;
    let moving = stark_scan(&config(r#"{ "motion": { "enabled": true } }"#)).unwrap().fit;
    let elapsed = start.elapsed();
    let pass = (still.observed_swing - 150.0).abs() <= 1.0
        && (still.width - 3.0).abs() <= 0.06
        && (135.0..=145.0).contains(&moving.observed_swing)
        && (2.9..=3.5).contains(&moving.width)
        && elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "motionless swing {:.2} deg width {:.3} MHz; motion-averaged swing {:.2} deg width {:.3} MHz; {:.2} s",
            still.observed_swing,
            still.width,
            moving.observed_swing,
            moving.width,
            elapsed.as_secs_f64()
        ),
    )
}

fn scan_tracking() -> Outcome {
    let grid = ProbeGrid::new(-30.0, 30.0, 601).unwrap();
    let mut pass = true;
    let mut found = Vec::new();
    for (delta_ac, expected) in [(12.0, -12.0), (-5.0, 5.0), (-14.0, 14.0)] {
        let net = ModeNetwork::atom_cavity(16.0, 3.0, 1.5, delta_ac).unwrap();
        let spectrum = sweep(&net, &grid).unwrap();
        let zeros = detect_antiresonances_numeric(&spectrum, "cavity", &DetectOptions::default()).unwrap();
        let centers: Vec<f64> = zeros.iter().map(|z| z.zero.center).collect();
        pass &= centers.iter().any(|c| (c - expected).abs() <= grid.step());
        found.push(format!("Δac {delta_ac:+}: expected {expected:+}, found {centers:+.3?}"));
    }
    outcome(pass, format!("{} (the zero sits at the atom frequency, Δpc = +Δac)", found.join("; ")))
}

fn stark_calibration_intercept() -> Outcome {
    let cal = stark_calibration(&[(1400.0, 12.0), (950.0, -5.0), (700.0, -14.0)]).unwrap();
    outcome(
        (cal.intercept + 40.0).abs() <= 2.0,
        format!("intercept {:.3} MHz, slope {:.5} MHz/nW", cal.intercept, cal.slope),
    )
}

fn oracle_convergence() -> Outcome {
    let base = JCParams::default();
    let etas: Vec<f64> = DEFAULT_ETA_OVER_KAPPA.iter().map(|r| r * base.kappa).collect();
    let start = Instant::now();
    let report = linear_limit_check(&base, &etas).unwrap();
    let elapsed = start.elapsed();
    let deviations: Vec<String> = report.points.iter().map(|p| format!("{:.2e}", p.deviation)).collect();
    let weakest = report.points.last().unwrap().deviation;
    outcome(
        report.monotone && report.all_states_valid && weakest < 1e-3 && elapsed < Duration::from_secs(5),
        format!(
            "η/κ = 0.3, 0.1, 0.03, 0.01 deviations [{}], states valid {}, {:.2} s",
            deviations.join(", "),
            report.all_states_valid,
            elapsed.as_secs_f64()
        ),
    )
}

fn intensity_fluctuations() -> Outcome {
    let bunching = oracle_check(&config("{}")).unwrap().bunching;
    let pinned = ((bunching.antiresonance_g2 - ANTIRESONANCE_G2) / ANTIRESONANCE_G2).abs() < 1e-9;
    let lowest = bunching.antiresonance_g2 / bunching.normal_mode_g2.iter().copied().fold(0.0, f64::max);
    outcome(
        lowest >= 10.0 && pinned,
        format!(
            "g2 antiresonance {:.6}, normal modes {:.6?}, ratio {:.1}, regression {}",
            bunching.antiresonance_g2,
            bunching.normal_mode_g2,
            lowest,
            if pinned { "matches" } else { "differs" }
        ),
    )
}

fn lossy_identification() -> Outcome {
    let mut correct = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let baseline = rng.random_range(0.2..1.0);
        let lossy = rng.random_range(0..5);
        let decays: Vec<f64> = (0..5)
            .map(|i| if i == lossy { 10.0 * baseline } else { baseline * rng.random_range(0.8..1.25) })
            .collect();
        let net = common::random_network(&mut rng, 5, 20.0, &decays, (1.0, 10.0));
        let verdict = lossy_component_identify(&net, None, DEFAULT_AMBIGUITY_TOLERANCE).unwrap();
        correct += usize::from(verdict.label == common::label(lossy));
    }
    outcome(correct == 100, format!("{correct}/100 random 5-node networks"))
}

fn heterodyne_roundtrip() -> Outcome {
    let noiseless = BeatNoteConfig::default();
    let mut worst: f64 = 0.0;
    for ia in 0..20 {
        let amplitude = 0.05 * (ia + 1) as f64;
        for ip in 0..36 {
            let phase = -PI + (ip as f64 + 0.5) * 2.0 * PI / 36.0;
            let field = Complex64::from_polar(amplitude, phase);
            let trace = synthesize(field, &noiseless, 3).unwrap();
            for w in demodulate(&trace.current, &noiseless).unwrap().windows {
                let error = (w.phase() - phase + PI).rem_euclid(2.0 * PI) - PI;
                worst = worst.max(error.abs());
            }
        }
    }

    let noisy = BeatNoteConfig {
        snr: Some(10.0),
        seed: 9,
        ..BeatNoteConfig::default()
    };
    let field = Complex64::from_polar(1.0, 0.7);
    let phases = phase_stream(field, &noisy, 10_000).unwrap();
    let (s, c) = phases
        .iter()
        .map(|p| (p.to_radians() - 0.7).sin_cos())
        .fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
    let mean = s.atan2(c);
    let spread = (phases
        .iter()
        .map(|p| ((p.to_radians() - 0.7 - mean + PI).rem_euclid(2.0 * PI) - PI).powi(2))
        .sum::<f64>()
        / phases.len() as f64)
        .sqrt();
    let relative = (spread - 0.1).abs() / 0.1;
    outcome(
        worst < 1e-6 && relative <= 0.2,
        format!("noiseless worst error {worst:.2e} rad on 20x36 grid; SNR 10 phase noise {spread:.4} rad vs 0.1"),
    )
}

fn invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut drive_invariant = true;
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let decays: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..3.0)).collect();
        let net = common::random_network(&mut rng, n, 20.0, &decays, (0.5, 10.0));
        let reference = resonances(&net).unwrap();
        for i in 0..n {
            drive_invariant &= resonances(&net.driven_only_at(&common::label(i)).unwrap()).unwrap() == reference;
        }
    }

    let kappa = 1.5;
    let net = ModeNetwork::empty_cavity(kappa).unwrap();
    let mut worst: f64 = 0.0;
    for half_span in [20.0, 200.0, 2000.0] {
        let phase = sweep(&net, &ProbeGrid::new(-half_span, half_span, 400_001).unwrap())
            .unwrap()
            .phase_unwrapped(0);
        let rise = phase[phase.len() - 1] - phase[0];
        worst = worst.max((rise - (PI - 2.0 * (kappa / half_span).atan())).abs());
    }
    outcome(
        drive_invariant && worst < 1e-12,
        format!(
            "poles identical under every single-node drive in 100 networks: {drive_invariant}; empty-cavity rise off π − 2·atan(κ/L) by {worst:.1e} rad"
        ),
    )
}

type Check = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("general solver equals the two-mode closed form", closed_form_equivalence),
        ("antiresonance sits at the bare undriven mode", antiresonance_identity),
        ("Stark-scan swing and width", stark_scan_reproduction),
        ("antiresonance centers in the detuning scan", scan_tracking),
        ("Stark calibration intercept", stark_calibration_intercept),
        ("quantum oracle converges to the linear model", oracle_convergence),
        ("intensity fluctuations at the antiresonance", intensity_fluctuations),
        ("lossy component identification", lossy_identification),
        ("heterodyne phase roundtrip", heterodyne_roundtrip),
        ("drive-invariant poles and empty-cavity phase rise", invariants),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        failed += usize::from(!result.pass);
        println!(
            "criterion {:>2} {}: {} ({})",
            k + 1,
            if result.pass { "PASS" } else { "FAIL" },
            name,
            result.detail
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
