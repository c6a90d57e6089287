//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs without the libtest harness so the lines always print.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use irs_noma::analytics::{
    branch_pdf, diversity_slope, lemma1_exact, lemma2_exact, lemma2_floor, multi_pair_branch_outage,
    onoff_branch_outage, AnalyticParams,
};
use irs_noma::channel::{draw_realization, ChannelRealization, SystemConfig};
use irs_noma::irs_control::{ideal_theta, Scheme};
use irs_noma::linkmetrics::ProjectedGains;
use irs_noma::numerics::{bessel_k_int, null_space, sample_cn_matrix, ComplexMatrix, RandomStream};
use irs_noma::simulator::Engine;
use irs_noma::Result;
use num_complex::Complex64;

use common::{bessel_k_quadrature, config, factorial, integrate, integrate_to_infinity};

const TRIALS: u64 = 1_000_000;
const Z_LIMIT: f64 = 4.0;
const SEED: u64 = 20_240_601;

type Criterion = fn() -> Result<Check>;

struct Check {
    pass: bool,
    detail: String,
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

/// Simulates on-off control over `rho_db` and returns the largest |z|
/// against `closed_form`, with the curve's runtime in seconds.
fn z_sweep(template: &SystemConfig, rho_db: &[f64], closed_form: fn(&SystemConfig) -> Result<f64>) -> Result<(f64, f64)> {
    let start = Instant::now();
    let result = Engine::default().sweep(template, &[Scheme::OnOff], rho_db, TRIALS, SEED)?;
    let seconds = start.elapsed().as_secs_f64();
    let mut worst: f64 = 0.0;
    for point in &result.points {
        let est = &point.estimates[0];
        let z = est.z_score(closed_form(&est.config)?);
        worst = worst.max(z.abs());
    }
    Ok((worst, seconds))
}

fn criterion_1() -> Result<Check> {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [4, 12] {
        let (z, secs) = z_sweep(&config(1, n, 1, 2.0, 0.0), &grid(0.0, 30.0, 3.0), lemma1_exact)?;
        pass &= z <= Z_LIMIT && secs <= 60.0;
        parts.push(format!("N={n}: max|z|={z:.2} in {secs:.1}s"));
    }
    Ok(Check { pass, detail: parts.join("; ") })
}

fn criterion_2() -> Result<Check> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, q) in [(6, 2), (4, 3)] {
        let template = config(1, p * q, q, 2.0, 0.0);
        let (z, _) = z_sweep(&template, &grid(0.0, 30.0, 3.0), lemma1_exact)?;
        let slope = diversity_slope(|db| lemma1_exact(&template.with_snr_db(db)), 40.0, 60.0)?;
        let rel = (slope - p as f64).abs() / p as f64;
        pass &= z <= Z_LIMIT && rel <= 0.15;
        parts.push(format!("P={p} Q={q}: max|z|={z:.2}, slope={slope:.3}"));
    }
    Ok(Check { pass, detail: parts.join("; ") })
}

fn criterion_3() -> Result<Check> {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [2, 3] {
        let template = config(k, 4, 1, 1.0, 0.0);
        let (z, _) = z_sweep(&template, &grid(0.0, 50.0, 5.0), lemma2_exact)?;
        let at60 = template.with_snr_db(60.0);
        let floor = lemma2_floor(&at60)?;
        let rel = (lemma2_exact(&at60)? - floor).abs() / floor;
        pass &= z <= Z_LIMIT && rel <= 0.01;
        parts.push(format!("K={k}: max|z|={z:.2}, 60 dB gap to floor {:.3}%", 100.0 * rel));
    }
    let floor = lemma2_floor(&config(2, 4, 1, 1.0, 0.0))?;
    pass &= (floor - 0.152_587_890_625).abs() <= 1e-15;
    parts.push(format!("K=2 floor={floor}"));
    Ok(Check { pass, detail: parts.join("; ") })
}

fn criterion_4() -> Result<Check> {
    let engine = Engine::default();
    let mut pass = true;
    let mut parts = Vec::new();

    // Single pair: ideal <= on-off <= DFT, no reversal beyond 3 sigma.
    let rho = grid(0.0, 30.0, 3.0);
    let single = engine.sweep(&config(1, 12, 1, 2.0, 0.0), &Scheme::ALL, &rho, TRIALS, SEED)?;
    let mut worst: f64 = f64::NEG_INFINITY;
    for (i, &db) in rho.iter().enumerate().filter(|(_, &db)| db > 10.0) {
        for (better, worse) in [(Scheme::Ideal, Scheme::OnOff), (Scheme::OnOff, Scheme::Dft)] {
            let z = single.paired(i, better, worse).expect("schemes present").z_score();
            worst = worst.max(z);
            if z > 3.0 {
                pass = false;
                parts.push(format!("{better} above {worse} at {db} dB (z={z:.2})"));
            }
        }
    }
    parts.push(format!("K=1 largest reversal z={worst:.2}"));

    // Two pairs: ideal keeps falling, codebooks settle on a floor.
    let rho = grid(0.0, 50.0, 5.0);
    let multi = engine.sweep(&config(2, 4, 1, 1.0, 0.0), &Scheme::ALL, &rho, TRIALS, SEED)?;
    let ideal: Vec<u64> = multi.curve(Scheme::Ideal).iter().map(|e| e.failures).collect();
    let monotone = ideal.windows(2).all(|w| w[1] <= w[0]) && ideal.last() < ideal.first();
    pass &= monotone;
    parts.push(format!("K=2 ideal monotone={monotone}"));
    for scheme in [Scheme::Dft, Scheme::OnOff] {
        let curve = multi.curve(scheme);
        let end = curve.last().expect("non-empty").p_hat;
        let spread = curve
            .iter()
            .filter(|e| e.config.snr_db() >= 40.0 - 1e-9)
            .map(|e| (e.p_hat - end).abs() / end)
            .fold(0.0, f64::max);
        pass &= end > 0.0 && spread <= 0.10;
        parts.push(format!("{scheme} 40-50 dB spread {:.2}% of {end:.4}", 100.0 * spread));
    }
    Ok(Check { pass, detail: parts.join("; ") })
}

fn criterion_5() -> Result<Check> {
    let mut worst_cdf: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for q in [1usize, 2, 4] {
        let pdf = |x: f64| if x == 0.0 { 0.0 } else { branch_pdf(q, x).expect("valid density argument") };
        for xi in [0.05, 0.25, 1.0] {
            let quad = integrate(pdf, 0.0, xi, 1e-13);
            worst_cdf = worst_cdf.max((onoff_branch_outage(q, xi)? - quad).abs());
        }
        worst_norm = worst_norm.max((integrate_to_infinity(pdf, 0.0, 1e-12) - 1.0).abs());
    }

    // Per-branch multi-pair outage as a double integral over the far user's
    // IRS link gain x ~ Exp(1) and the interference gain z ~ Gamma(K-1, 1).
    let mut worst_2d: f64 = 0.0;
    for k in [2usize, 3, 4] {
        for db in [0.0, 10.0, 25.0, 40.0] {
            let cfg = config(k, 4, 1, 1.0, db);
            let AnalyticParams { epsilon, tau, .. } = AnalyticParams::new(&cfg);
            let rho = cfg.snr;
            let norm = factorial(k - 2);
            let outer = |x: f64| {
                if x == 0.0 {
                    return 0.0;
                }
                let inner = integrate_to_infinity(
                    |z| {
                        let threshold = (epsilon * x * z + epsilon / rho) / (x * tau);
                        -(-threshold).exp_m1() * z.powi(k as i32 - 2) * (-z).exp() / norm
                    },
                    0.0,
                    1e-11,
                );
                inner * (-x).exp()
            };
            let quad = integrate_to_infinity(outer, 0.0, 1e-10);
            worst_2d = worst_2d.max((multi_pair_branch_outage(&cfg)? - quad).abs());
        }
    }
    Ok(Check {
        pass: worst_cdf <= 1e-8 && worst_norm <= 1e-6 && worst_2d <= 1e-6,
        detail: format!("cdf err {worst_cdf:.1e}, pdf mass err {worst_norm:.1e}, 2-D err {worst_2d:.1e}"),
    })
}

fn criterion_6() -> Result<Check> {
    let mut worst_bessel: f64 = 0.0;
    for n in 0..=8u32 {
        for i in 0..=30 {
            // Log-spaced over [1e-4, 20].
            let z = 1e-4 * (2e5f64).powf(i as f64 / 30.0);
            let oracle = bessel_k_quadrature(n, z);
            worst_bessel = worst_bessel.max((bessel_k_int(n, z)? - oracle).abs() / oracle);
        }
    }

    let mut worst_null: f64 = 0.0;
    let mut rng = RandomStream::new(SEED, 0).rng();
    for t in 0..1000usize {
        // N x J constraint matrices, J < N; the basis must be orthogonal to
        // every column.
        let n = 2 + t % 11;
        let j = 1 + (t / 11) % (n - 1);
        let mut a = sample_cn_matrix(n, j, &mut rng)?;
        if t % 5 == 0 && j >= 2 {
            // Rank-deficient instance: repeat a scaled column.
            let copy: Vec<Complex64> = a.column(0).iter().map(|z| z * 2.5).collect();
            a.column_mut(j - 1).copy_from_slice(&copy);
        }
        let basis = null_space(&a);
        let residual = a.adjoint().matmul(&basis)?.max_abs() / a.max_abs();
        let gram = basis.adjoint().matmul(&basis)?.sub(&ComplexMatrix::identity(basis.cols()))?.max_abs();
        let rank_ok = basis.cols() == n - j + usize::from(t % 5 == 0 && j >= 2);
        worst_null = worst_null.max(residual).max(gram);
        if !rank_ok {
            worst_null = f64::INFINITY;
        }
    }

    let mut worst_zf: f64 = 0.0;
    let cfg = SystemConfig::reference(3, 8, 1, 1.0, 20.0);
    for t in 0..1000u64 {
        let real: ChannelRealization = draw_realization(&cfg, 0, &RandomStream::new(SEED + 1, t))?;
        let theta = ideal_theta(&real)?;
        let gains = ProjectedGains::project(&theta.values, &real)?;
        worst_zf = worst_zf.max(gains.inter_pair / gains.served);
    }
    Ok(Check {
        pass: worst_bessel <= 1e-10 && worst_null < 1e-10 && worst_zf < 1e-9,
        detail: format!("bessel rel err {worst_bessel:.1e}, null-space residual {worst_null:.1e}, ZF leakage {worst_zf:.1e}"),
    })
}

fn criterion_7() -> Result<Check> {
    let cfg = config(2, 8, 1, 1.0, 15.0);
    let mut pass = true;
    for seed in [1u64, 42, 987_654_321] {
        for scheme in Scheme::ALL {
            let one = Engine::with_workers(1).estimate_outage(&cfg, scheme, 100_000, seed)?;
            let eight = Engine::with_workers(8).estimate_outage(&cfg, scheme, 100_000, seed)?;
            pass &= format!("{one:?}") == format!("{eight:?}");
        }
    }
    Ok(Check {
        pass,
        detail: "estimates for 3 seeds x 3 schemes, 1 vs 8 workers".into(),
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 7] = [
        ("single-pair closed form vs Monte Carlo, Q=1", criterion_1),
        ("single-pair closed form vs Monte Carlo, Q>=2, diversity", criterion_2),
        ("multi-pair closed form vs Monte Carlo, error floor", criterion_3),
        ("scheme ordering and error floors", criterion_4),
        ("closed forms vs numerical integration", criterion_5),
        ("Bessel, null space, zero forcing", criterion_6),
        ("worker-count reproducibility", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(check) => (check.pass, check.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "[{}] criterion {}: {name} | {detail} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
