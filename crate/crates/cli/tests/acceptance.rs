//! Acceptance suite: one test per quantitative exit criterion, each printing
//! a PASS line with the measured numbers (visible under `--nocapture`).
//!
//! Criterion 3 is knowingly red: past the death threshold the X-state
//! coherence decays like `eps^-4`, so quantum discord falls through the fixed
//! 1e-3 floor near `eps = 2.5` and geometric discord through 1e-4 near
//! `eps = 4.1`. No implementation can hold those floors out to `eps = 10`;
//! the test keeps the stated thresholds and reports the measured decay.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcorr_core::linalg::{HermitianMatrix, Matrix};
use qcorr_core::measures::{
    ara_discord_xstate, concurrence, concurrence_xstate, log_negativity, log_negativity_bipartite,
    measure_all, negativity, negativity_xstate, quantum_discord, DiscordOptimizerConfig,
    MeasureSet,
};
use qcorr_core::noise::{epsilon_at, epsilon_closed_form, QuadratureConfig};
use qcorr_core::state::{bell_initial, rho_normalized};
use qcorr_core::sweep::{
    detect_transitions, parallelism_stats, run_sweep, GridSpec, KernelSpec, Preset, SweepConfig,
    TransitionKind, TRANSITION_TOL,
};

/// Analytic death threshold: root of `eps sqrt(1 + eps^2) = 1/2`.
fn eps_star() -> f64 {
    ((2.0f64.sqrt() - 1.0) / 2.0).sqrt()
}

fn assert_close(what: &str, got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: {got} vs {want} (tol {tol})"
    );
}

fn bisect_positive_boundary(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) > 0.0 && f(hi) <= 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> HermitianMatrix {
    let gaussian = |rng: &mut ChaCha8Rng| {
        let u1: f64 = rng.random_range(f64::EPSILON..1.0);
        let u2: f64 = rng.random_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let g = Matrix::from_fn(dim, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    let prod = g.mul(&g.adjoint());
    let tr = prod.trace().re;
    HermitianMatrix::new(prod.scale(1.0 / tr).hermitized()).unwrap()
}

#[test]
fn criterion_01_bell_point_exactness() {
    let start = Instant::now();
    let state = rho_normalized(0.0).unwrap();
    assert_eq!(
        state,
        bell_initial(),
        "zero-energy state is not the Bell state"
    );
    let diff = state
        .to_dense()
        .as_matrix()
        .max_abs_diff(bell_initial().to_dense().as_matrix());
    assert_eq!(diff, 0.0, "dense forms differ");

    let ms = measure_all(&state, &DiscordOptimizerConfig::default()).unwrap();
    assert_close("concurrence", ms.concurrence, 1.0, 1e-9);
    assert_close("eof", ms.eof, 1.0, 1e-9);
    assert_close("negativity", ms.negativity, 0.5, 1e-9);
    assert_close("log_negativity", ms.log_negativity, 1.0, 1e-9);
    assert_close("discord", ms.discord, 1.0, 1e-6);
    assert_close("geometric_discord", ms.geometric_discord, 0.5, 1e-9);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    println!(
        "criterion 01 PASS: Bell point exact, measures {:?} in {elapsed:?}",
        ms.as_array()
    );
}

#[test]
fn criterion_02_entanglement_death_anchor() {
    let start = Instant::now();
    let conc_root = bisect_positive_boundary(
        |eps| concurrence(&rho_normalized(eps).unwrap().to_dense()).unwrap() - 1e-12,
        0.0,
        1.0,
    );
    assert_close("death threshold", conc_root, 0.45509, 1e-4);
    assert_eq!(
        (conc_root * 1000.0).round() / 1000.0,
        0.455,
        "threshold does not round to 0.455"
    );
    let neg_root = bisect_positive_boundary(
        |eps| negativity(&rho_normalized(eps).unwrap().to_dense()).unwrap() - 1e-12,
        0.0,
        1.0,
    );
    let ln_root = bisect_positive_boundary(
        |eps| log_negativity(&rho_normalized(eps).unwrap().to_dense()).unwrap() - 1e-12,
        0.0,
        1.0,
    );
    assert_close("negativity root", neg_root, conc_root, 1e-6);
    assert_close("log negativity root", ln_root, conc_root, 1e-6);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    println!(
        "criterion 02 PASS: death at eps = {conc_root:.7} (negativity {neg_root:.7}, \
         log negativity {ln_root:.7}) in {elapsed:?}"
    );
}

#[test]
fn criterion_03_discord_survival() {
    let start = Instant::now();
    let cfg = DiscordOptimizerConfig::default();
    let star = eps_star();
    let ratio = (10.0 / star).powf(1.0 / 20.0);
    let mut rows = Vec::new();
    for k in 1..=20 {
        let eps = star * ratio.powi(k);
        let ms = measure_all(&rho_normalized(eps).unwrap(), &cfg).unwrap();
        println!(
            "  eps = {eps:9.5}: C = {}, N = {}, E_N = {}, QD = {:.3e}, G = {:.3e}",
            ms.concurrence, ms.negativity, ms.log_negativity, ms.discord, ms.geometric_discord
        );
        rows.push((eps, ms));
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "took {elapsed:?}, budget 30 s"
    );

    for (eps, ms) in &rows {
        assert!(ms.concurrence == 0.0, "concurrence alive at eps = {eps}");
        assert!(ms.negativity == 0.0, "negativity alive at eps = {eps}");
        assert!(
            ms.log_negativity.abs() <= 1e-12,
            "log negativity alive at eps = {eps}"
        );
    }
    let failures: Vec<String> = rows
        .iter()
        .filter(|(_, ms)| !(ms.discord > 1e-3 && ms.geometric_discord > 1e-4))
        .map(|(eps, ms)| {
            format!(
                "eps = {eps:.4}: QD = {:.3e} (floor 1e-3), G = {:.3e} (floor 1e-4)",
                ms.discord, ms.geometric_discord
            )
        })
        .collect();
    assert!(
        failures.is_empty(),
        "discord floors not held over the full decade; both discords stay strictly \
         positive but the family's coherence falls off like eps^-4, crossing the fixed \
         floors inside the stated range:\n  {}",
        failures.join("\n  ")
    );
    println!("criterion 03 PASS: discord floors held on all 20 points in {elapsed:?}");
}

#[test]
fn criterion_04_white_noise_linearity() {
    let gamma = 0.1;
    let kernel = qcorr_core::noise::NoiseKernel::white(gamma).unwrap();
    let quad = QuadratureConfig::default();
    let n = 101;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut pts = Vec::with_capacity(n);
    for i in 0..n {
        let t = 10.0 * i as f64 / (n - 1) as f64;
        let e = epsilon_at(&kernel, 1.0, t, &quad).unwrap();
        num += t * e;
        den += t * t;
        pts.push((t, e));
    }
    let slope = num / den;
    let rss: f64 = pts.iter().map(|(t, e)| (e - slope * t).powi(2)).sum();
    let residual = (rss / n as f64).sqrt();
    assert!(
        residual < 1e-12,
        "least-squares residual {residual:.3e} exceeds 1e-12"
    );
    assert_close("fitted slope", slope, gamma, 1e-12);
    println!("criterion 04 PASS: slope {slope:.12}, rms residual {residual:.3e} over {n} points");
}

#[test]
fn criterion_05_quadrature_matches_closed_form() {
    for preset in [Preset::White, Preset::Partial, Preset::Colored] {
        let kernel = preset.kernel_for(1.0).unwrap();
        let horizon = preset.horizon();
        let quad = QuadratureConfig::default();
        let mut worst_rel = 0.0f64;
        for i in 1..=50 {
            let t = horizon * i as f64 / 50.0;
            let exact = epsilon_closed_form(&kernel, 1.0, t).unwrap();
            let approx = epsilon_at(&kernel, 1.0, t, &quad).unwrap();
            worst_rel = worst_rel.max((approx - exact).abs() / exact.abs().max(1e-300));
        }
        assert!(
            worst_rel < 1e-6,
            "{}: worst relative error {worst_rel:.3e} at 64 panels",
            preset.name()
        );

        // convergence order: doubling panels must gain at least 4x while
        // the error sits between rounding noise and 1e-3
        let max_err = |panels: usize| -> f64 {
            let q = QuadratureConfig::new(panels).unwrap();
            (1..=50)
                .map(|i| {
                    let t = horizon * i as f64 / 50.0;
                    let exact = epsilon_closed_form(&kernel, 1.0, t).unwrap();
                    (epsilon_at(&kernel, 1.0, t, &q).unwrap() - exact).abs()
                })
                .fold(0.0f64, f64::max)
        };
        let mut checked = 0;
        let mut prev: Option<(usize, f64)> = None;
        for panels in [2usize, 4, 8, 16, 32] {
            let err = max_err(panels);
            if let Some((pp, pe)) = prev {
                if pe < 1e-3 && pe > 1e-13 {
                    assert!(
                        pe / err.max(1e-300) >= 4.0,
                        "{}: error {pe:.3e} at {pp} panels only fell to {err:.3e} at {panels}",
                        preset.name()
                    );
                    checked += 1;
                }
            }
            prev = Some((panels, err));
        }
        if matches!(preset, Preset::White) {
            // white bypasses quadrature entirely; the errors are all zero
            assert_eq!(worst_rel, 0.0);
        } else {
            assert!(checked >= 2, "{}: too few convergence pairs", preset.name());
        }
        println!(
            "criterion 05 PASS ({}): 64-panel worst relative error {worst_rel:.3e}, \
             {checked} doubling pairs at order",
            preset.name()
        );
    }
}

#[test]
fn criterion_06_log_negativity_additivity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let rho = random_density(&mut rng, 4);
        let sigma = random_density(&mut rng, 4);
        let separate = log_negativity(&rho).unwrap() + log_negativity(&sigma).unwrap();
        let joint = rho
            .kron(&sigma)
            .permute_systems(&[2, 2, 2, 2], &[0, 2, 1, 3])
            .unwrap();
        let joint_ln = log_negativity_bipartite(&joint, (4, 4)).unwrap();
        worst = worst.max((joint_ln - separate).abs());
    }
    let elapsed = start.elapsed();
    assert!(worst < 1e-8, "worst additivity violation {worst:.3e}");
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "took {elapsed:?}, budget 10 s"
    );
    println!(
        "criterion 06 PASS: 50 random pairs, worst additivity deviation {worst:.3e} in {elapsed:?}"
    );
}

#[test]
fn criterion_07_fast_path_equivalence() {
    let cfg = DiscordOptimizerConfig::default();
    let mut worst_c = 0.0f64;
    let mut worst_n = 0.0f64;
    let mut worst_gap = f64::NEG_INFINITY;
    for i in 0..200 {
        let eps = 10f64.powf(-3.0 + 4.0 * i as f64 / 199.0);
        let s = rho_normalized(eps).unwrap();
        let rho = s.to_dense();
        worst_c = worst_c.max((concurrence_xstate(&s).unwrap() - concurrence(&rho).unwrap()).abs());
        worst_n = worst_n.max((negativity_xstate(&s).unwrap() - negativity(&rho).unwrap()).abs());
        let numeric = quantum_discord(&rho, &cfg).unwrap();
        let candidate = ara_discord_xstate(&s).unwrap();
        worst_gap = worst_gap.max(numeric - candidate);
    }
    assert!(
        worst_c <= 1e-10,
        "concurrence routes differ by {worst_c:.3e}"
    );
    assert!(
        worst_n <= 1e-10,
        "negativity routes differ by {worst_n:.3e}"
    );
    assert!(
        worst_gap <= 1e-8,
        "numeric discord exceeds the candidate value by {worst_gap:.3e}"
    );
    println!(
        "criterion 07 PASS: 200 energies, concurrence gap {worst_c:.2e}, negativity gap \
         {worst_n:.2e}, discord excess {worst_gap:.2e}"
    );
}

#[test]
fn criterion_08_decay_to_zero() {
    let ms = measure_all(
        &rho_normalized(1e3).unwrap(),
        &DiscordOptimizerConfig::default(),
    )
    .unwrap();
    for (name, v) in MeasureSet::NAMES.iter().zip(ms.as_array()) {
        assert!(v < 1e-2, "{name} still at {v} for eps = 1e3");
    }
    println!(
        "criterion 08 PASS: all measures below 1e-2 at eps = 1e3: {:?}",
        ms.as_array()
    );
}

#[test]
fn criterion_09_parallelism_on_white_noise() {
    let gamma = 0.1;
    let t_star = eps_star() / gamma;
    let cfg = SweepConfig {
        kernel: KernelSpec::Explicit(qcorr_core::noise::NoiseKernel::White { gamma }),
        omega_grid: GridSpec::Points(vec![1.0]),
        t_grid: GridSpec::Linspace {
            start: 0.0,
            stop: t_star,
            points: 101,
        },
        quadrature: QuadratureConfig::default(),
        discord: DiscordOptimizerConfig::default(),
        output_path: None,
        format: qcorr_core::sweep::OutputFormat::Csv,
    };
    let table = run_sweep(&cfg).unwrap();
    let report = parallelism_stats(&table).unwrap();
    let mut min_pearson = 1.0f64;
    for i in 0..6 {
        for j in (i + 1)..6 {
            let sign = report.sign_agreement[i][j];
            assert_eq!(
                sign, 1.0,
                "derivative signs disagree for {} vs {}",
                report.measures[i], report.measures[j]
            );
            let r = report.pearson[i][j].expect("series vary on this range");
            assert!(
                r > 0.9,
                "correlation {} vs {} is {r}",
                report.measures[i],
                report.measures[j]
            );
            min_pearson = min_pearson.min(r);
        }
    }
    println!(
        "criterion 09 PASS: 15 pairs, all sign agreements 1.0, minimum correlation {min_pearson:.6}"
    );
}

#[test]
fn criterion_10_revival_detection() {
    // crossing times of the injected energy through the death threshold,
    // located by bisection on the closed form before the build
    const ORACLE_DEATH_1: f64 = 3.709677888;
    const ORACLE_REVIVAL: f64 = 4.732935360;
    const ORACLE_DEATH_2: f64 = 5.840397807;

    let table = run_sweep(&Preset::Colored.sweep_config()).unwrap();
    let events = detect_transitions(&table, TRANSITION_TOL);
    let neg_events: Vec<_> = events
        .iter()
        .filter(|e| e.measure == "negativity" && e.omega == 1.0)
        .collect();
    assert!(
        neg_events.len() >= 3,
        "expected death, revival, death; got {neg_events:?}"
    );
    let kinds: Vec<TransitionKind> = neg_events.iter().map(|e| e.kind).collect();
    assert_eq!(
        &kinds[..3],
        &[
            TransitionKind::Death,
            TransitionKind::Revival,
            TransitionKind::Death
        ],
        "event order is wrong"
    );
    let grid_step = 7.5 / 100.0;
    for (event, oracle) in neg_events
        .iter()
        .zip([ORACLE_DEATH_1, ORACLE_REVIVAL, ORACLE_DEATH_2])
    {
        let left_t = table.rows[event.left_index].t;
        let right_t = table.rows[event.right_index].t;
        assert!(
            left_t <= oracle && oracle <= right_t,
            "oracle time {oracle} outside bracket [{left_t}, {right_t}]"
        );
        assert!(
            (event.t - oracle).abs() <= grid_step + 1e-9,
            "event at {} vs oracle {oracle}, more than one grid step apart",
            event.t
        );
        assert!(
            (event.epsilon - eps_star()).abs() < 2e-3,
            "event energy {} far from the death threshold",
            event.epsilon
        );
    }
    println!(
        "criterion 10 PASS: negativity death {:.4} / revival {:.4} / death {:.4} against \
         oracle {ORACLE_DEATH_1:.4} / {ORACLE_REVIVAL:.4} / {ORACLE_DEATH_2:.4}",
        neg_events[0].t, neg_events[1].t, neg_events[2].t
    );
}

#[test]
fn criterion_11_reproducible_sweeps_are_byte_identical() {
    let preset_path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../presets/white.json");
    let run = |out: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_qcorr"))
            .args([
                "sweep",
                "--config",
                preset_path,
                "--reproducible",
                "--output",
                out,
            ])
            .status()
            .expect("binary runs");
        assert!(status.success(), "sweep exited with {status}");
        std::fs::read(out).expect("output written")
    };
    let dir = std::env::temp_dir();
    let first = run(dir.join("qcorr_accept_a.csv").to_str().unwrap());
    let second = run(dir.join("qcorr_accept_b.csv").to_str().unwrap());
    assert!(!first.is_empty());
    assert_eq!(first, second, "reproducible runs differ");
    println!(
        "criterion 11 PASS: two reproducible runs produced {} identical bytes",
        first.len()
    );
}
