//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Every tolerance is pinned in code. The financial-pipeline criterion lives
//! in the CLI crate, which owns file ingestion and manifests.

use tailcert::audit::default_direction_panel;
use tailcert::{
    certify_diffusion, certify_gaussian, certify_logconcave, certify_manifold,
    certify_strongly_logconcave, compare_to_certificate, hill_estimator, linear_schedule,
    max_growth_check, orlicz_psi2_estimate, per_step_lipschitz, pushforward_samples,
    random_network, sample_target, Activation, Centering, ConstantConfig, ConstantMode,
    DiffusionChain, FeedForwardNetwork, GaussianSpec, LatentSpec, Layer, Matrix, RngStream,
    SampleSet, SigmaRule, SlackRule, TailCertificate, TargetSpec, Vector,
};

fn linspace(from: f64, to: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| from + (to - from) * i as f64 / (points - 1) as f64)
        .collect()
}

fn random_spd(stream: &RngStream, d: usize) -> Matrix {
    use rand::Rng;
    let mut r = stream.rng();
    let a: Vec<f64> = (0..d * d).map(|_| r.random_range(-1.0..1.0)).collect();
    let mut sigma = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0.0;
            for k in 0..d {
                acc += a[k * d + i] * a[k * d + j];
            }
            sigma[i * d + j] = acc / d as f64 + if i == j { 0.25 } else { 0.0 };
        }
    }
    Matrix::new(d, d, sigma).unwrap()
}

fn mixed_random_net(seed: u64, widths: &[usize], weight_scale: f64) -> FeedForwardNetwork {
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};
    let acts = [
        Activation::Relu,
        Activation::Tanh,
        Activation::Logistic,
        Activation::Identity,
    ];
    let mut r = RngStream::new(seed, 13).rng();
    let layers = widths
        .windows(2)
        .enumerate()
        .map(|(l, pair)| {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let std = weight_scale / (fan_in as f64).sqrt();
            let entries: Vec<f64> = (0..fan_in * fan_out)
                .map(|_| {
                    std * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut r)
                })
                .collect();
            let bias: Vec<f64> = (0..fan_out).map(|_| r.random_range(-0.5..0.5)).collect();
            Layer::new(
                Matrix::new(fan_out, fan_in, entries).unwrap(),
                Vector::new(bias).unwrap(),
                acts[(seed as usize + l) % acts.len()],
            )
            .unwrap()
        })
        .collect();
    FeedForwardNetwork::new(layers).unwrap()
}

/// Audit a sample set over the default direction panel; panics with context
/// on any violation verdict.
fn assert_panel_consistent(
    label: &str,
    set: &SampleSet,
    cert: &TailCertificate,
    grid: &[f64],
    panel_stream: &RngStream,
) {
    let panel = default_direction_panel(set.dim(), panel_stream, 8);
    for (i, u) in panel.iter().enumerate() {
        let report =
            compare_to_certificate(set, u, cert, grid, &SlackRule::default(), Centering::Mean)
                .unwrap();
        assert!(
            !report.verdict.is_violation(),
            "{label}: violation in direction {i}: {:?}",
            report.verdict
        );
    }
}

fn testable_grid(cert: &TailCertificate, n: usize, points: usize) -> Vec<f64> {
    // Keep every grid point's bound above the 10/n testability floor.
    let delta = (20.0 / n as f64).min(0.5);
    linspace(0.0, cert.quantile(delta).unwrap(), points)
}

#[test]
fn criterion_1_lipschitz_soundness() {
    let menu: [&[usize]; 9] = [
        &[2, 4, 2],
        &[3, 8, 8, 1],
        &[1, 16, 4],
        &[8, 2],
        &[4, 32, 16, 2],
        &[16, 3],
        &[2, 2, 2, 2],
        &[32, 8, 4],
        &[6, 24, 2],
    ];
    let mut violations = 0usize;
    for i in 0..50u64 {
        let widths: &[usize] = if i % 5 == 0 {
            &[64, 128, 256, 2]
        } else {
            menu[(i as usize) % menu.len()]
        };
        let scale = [0.5, 1.0, 2.0][(i as usize) % 3];
        let net = mixed_random_net(i, widths, scale);
        let certified = net.certified_lipschitz(1e-6).value;
        let ratio = net
            .empirical_lipschitz_lower_bound(&RngStream::new(i, 1), 10_000, 1.0)
            .unwrap();
        if ratio > certified {
            violations += 1;
            eprintln!("network {i}: empirical {ratio} > certified {certified}");
        }
    }
    assert_eq!(violations, 0);
    println!("acceptance criterion 1 (Lipschitz soundness, 50 networks x 1e4 pairs): PASS");
}

#[test]
fn criterion_2_gaussian_certificate_soundness() {
    let n = 100_000;
    for i in 0..20u64 {
        let d = [2usize, 4, 8, 16][(i % 4) as usize];
        let sigma = random_spd(&RngStream::new(400 + i, 0), d);
        let spec = LatentSpec::Gaussian(GaussianSpec {
            mu: Vector::zeros(d),
            sigma,
        });
        let net = mixed_random_net(200 + i, &[d, 12, 2], 1.0);
        let set = pushforward_samples(&net, &spec, &RngStream::new(500 + i, 0), n).unwrap();
        let cert = certify_gaussian(
            &net.certified_lipschitz(1e-6),
            &spec.certificate_params(None).unwrap(),
            net.output_dim(),
            ConstantMode::Tight,
            &ConstantConfig::default(),
        )
        .unwrap();
        let grid = testable_grid(&cert, n, 41);
        assert_panel_consistent(
            &format!("gaussian config {i}"),
            &set,
            &cert,
            &grid,
            &RngStream::new(600 + i, 0),
        );
    }
    println!("acceptance criterion 2 (Gaussian certificates, 20 configs x 1e5 samples): PASS");
}

#[test]
fn criterion_3_strongly_logconcave_and_sphere() {
    let n = 100_000;
    // Gaussian viewed as gamma-strongly log-concave, gamma = 1/||sigma||.
    for i in 0..10u64 {
        let d = [2usize, 4, 8][(i % 3) as usize];
        let sigma = random_spd(&RngStream::new(700 + i, 0), d);
        let spec = LatentSpec::StronglyLogConcave {
            base: GaussianSpec {
                mu: Vector::zeros(d),
                sigma,
            },
            gamma: None,
        };
        let net = mixed_random_net(300 + i, &[d, 12, 2], 1.0);
        let set = pushforward_samples(&net, &spec, &RngStream::new(800 + i, 0), n).unwrap();
        let cert = certify_strongly_logconcave(
            &net.certified_lipschitz(1e-6),
            &spec.certificate_params(None).unwrap(),
            net.output_dim(),
            ConstantMode::Tight,
            &ConstantConfig::default(),
        )
        .unwrap();
        let grid = testable_grid(&cert, n, 41);
        assert_panel_consistent(
            &format!("strongly log-concave config {i}"),
            &set,
            &cert,
            &grid,
            &RngStream::new(900 + i, 0),
        );
    }
    // Uniform-on-sphere latents in R^64: Ricci lower bound 62, embedding 1.
    for i in 0..10u64 {
        let spec = LatentSpec::Sphere {
            ambient_dim: 64,
            radius: 1.0,
        };
        let params = spec.certificate_params(None).unwrap();
        assert_eq!(params.ricci_lower.unwrap(), 62.0);
        let net = mixed_random_net(350 + i, &[64, 16, 2], 1.0);
        let set = pushforward_samples(&net, &spec, &RngStream::new(1000 + i, 0), n).unwrap();
        let cert = certify_manifold(
            &net.certified_lipschitz(1e-6),
            &params,
            net.output_dim(),
            ConstantMode::Tight,
            &ConstantConfig::default(),
        )
        .unwrap();
        let grid = testable_grid(&cert, n, 41);
        assert_panel_consistent(
            &format!("sphere config {i}"),
            &set,
            &cert,
            &grid,
            &RngStream::new(1100 + i, 0),
        );
    }
    println!("acceptance criterion 3 (strongly log-concave + sphere certificates, 20 seeds): PASS");
}

#[test]
fn criterion_4_logconcave_cube_pipeline() {
    let n = 100_000;
    let spec = LatentSpec::UniformCube {
        dim: 8,
        half_side: 1.0,
    };
    let net = mixed_random_net(42, &[8, 12, 2], 1.0);
    let params = spec.certificate_params(Some(0.1)).unwrap();
    let cert = certify_logconcave(
        &net.certified_lipschitz(1e-6),
        &params,
        net.output_dim(),
        ConstantMode::Tight,
        &ConstantConfig::default(),
    )
    .unwrap();
    let set = pushforward_samples(&net, &spec, &RngStream::new(4242, 0), n).unwrap();
    let grid = testable_grid(&cert, n, 41);
    assert_panel_consistent("cube config", &set, &cert, &grid, &RngStream::new(4243, 0));

    // Family-shape check: past the scale, the sub-exponential form must sit
    // above the sub-Gaussian form of equal scale and prefactor.
    let scale = cert.scale();
    let prefactor = cert.prefactor();
    for &t in grid.iter().filter(|&&t| t > scale) {
        let sub_exp = (prefactor * (-(t / scale)).exp()).min(1.0);
        let sub_gauss = (prefactor * (-(t / scale) * (t / scale)).exp()).min(1.0);
        assert!(
            sub_exp >= sub_gauss,
            "family shapes out of order at t = {t}"
        );
    }
    println!("acceptance criterion 4 (log-concave cube pipeline + family shape): PASS");
}

#[test]
fn criterion_5_diffusion_reduction() {
    let noise_net =
        random_network(&RngStream::new(77, 0), &[3, 8, 2], Activation::Relu, 0.8).unwrap();
    let lip_f = noise_net.certified_lipschitz(1e-6);
    assert!(
        lip_f.value <= 5.0,
        "noise net certified Lipschitz {} exceeds 5",
        lip_f.value
    );

    for (idx, t_steps) in [1usize, 5, 50].into_iter().enumerate() {
        let schedule = linear_schedule(t_steps, 0.0001, 0.02, SigmaRule::SqrtBeta).unwrap();
        let chain = DiffusionChain::new(schedule, noise_net.clone()).unwrap();
        let bound = per_step_lipschitz(&chain, &lip_f);

        // (a) composite equals the per-step product.
        let product: f64 = bound.per_step.iter().product();
        assert!(
            (bound.composite - product).abs() <= 1e-9 * bound.composite,
            "T = {t_steps}: composite {} vs product {product}",
            bound.composite
        );

        // (b) empirical ratio over augmented pairs never exceeds composite.
        let mut r = RngStream::new(88, idx as u64).rng();
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let (xa, ea) = chain.sample_augmented_input(&mut r);
            let (xb, eb) = chain.sample_augmented_input(&mut r);
            let out_a = chain.run_deterministic(&xa, &ea).unwrap();
            let out_b = chain.run_deterministic(&xb, &eb).unwrap();
            let mut denom_sq = xa.sub(&xb).norm().powi(2);
            for (na, nb) in ea.iter().zip(&eb) {
                denom_sq += na.sub(nb).norm().powi(2);
            }
            let denom = denom_sq.sqrt();
            if denom == 0.0 {
                continue;
            }
            let ratio = out_a.sub(&out_b).norm() / denom;
            assert!(
                ratio <= bound.composite,
                "T = {t_steps}: augmented ratio {ratio} exceeds composite {}",
                bound.composite
            );
            worst = worst.max(ratio);
        }
        assert!(worst > 0.0);

        // (c) sampled X_0 audits clean against the chain certificate.
        let n = 10_000;
        let cert = certify_diffusion(
            &chain,
            &lip_f,
            ConstantMode::Tight,
            &ConstantConfig::default(),
        )
        .unwrap();
        let draws = chain.sample(&RngStream::new(99, idx as u64), n).unwrap();
        let set = SampleSet::new(draws, format!("diffusion T={t_steps}")).unwrap();
        let grid = testable_grid(&cert, n, 31);
        assert_panel_consistent(
            &format!("diffusion T={t_steps}"),
            &set,
            &cert,
            &grid,
            &RngStream::new(990, idx as u64),
        );
    }
    println!("acceptance criterion 5 (diffusion reduction, T in {{1, 5, 50}}): PASS");
}

#[test]
fn criterion_6_heavy_tail_detection() {
    let n = 10_000;
    let k = 500;

    // (a) Bivariate Cauchy magnitudes: Hill index near 1.
    let cauchy_set =
        sample_target(&TargetSpec::standard_cauchy(2), &RngStream::new(1234, 0), n).unwrap();
    let cauchy_magnitudes: Vec<f64> = cauchy_set
        .samples()
        .iter()
        .map(|v| v.norm())
        .filter(|m| *m > 0.0)
        .collect();
    let cauchy_hill = hill_estimator(&cauchy_magnitudes, k).unwrap();
    assert!(
        (0.85..=1.15).contains(&cauchy_hill),
        "Cauchy hill index {cauchy_hill}"
    );

    // (b) Pushforward magnitudes: much lighter tail.
    let net = random_network(
        &RngStream::new(2024, 7),
        &[64, 128, 256, 2],
        Activation::Relu,
        1.0,
    )
    .unwrap();
    let latent = LatentSpec::Gaussian(GaussianSpec::standard(64));
    let push_set = pushforward_samples(&net, &latent, &RngStream::new(1234, 1), n).unwrap();
    let push_magnitudes: Vec<f64> = push_set
        .centered_magnitudes(Centering::Mean)
        .into_iter()
        .filter(|m| *m > 0.0)
        .collect();
    let push_hill = hill_estimator(&push_magnitudes, k).unwrap();
    assert!(
        push_hill >= 2.5,
        "pushforward hill index {push_hill} below 2.5"
    );

    // (c) Max-growth check separates the two in at least 9 of 10 seeds.
    let cert = certify_gaussian(
        &net.certified_lipschitz(1e-6),
        &latent.certificate_params(None).unwrap(),
        net.output_dim(),
        ConstantMode::Tight,
        &ConstantConfig::default(),
    )
    .unwrap();
    let direction = Vector::basis(2, 0);
    let mut successes = 0;
    for seed in 0..10u64 {
        let push = pushforward_samples(&net, &latent, &RngStream::new(3000 + seed, 0), n).unwrap();
        let heavy = sample_target(
            &TargetSpec::standard_cauchy(2),
            &RngStream::new(3000 + seed, 1),
            n,
        )
        .unwrap();
        let push_ok = max_growth_check(&push, &direction, &cert, 0.01)
            .unwrap()
            .pass;
        let heavy_flagged = !max_growth_check(&heavy, &direction, &cert, 0.01)
            .unwrap()
            .pass;
        if push_ok && heavy_flagged {
            successes += 1;
        }
    }
    assert!(successes >= 9, "separation in only {successes} of 10 seeds");
    println!(
        "acceptance criterion 6 (heavy-tail detection: hill {cauchy_hill:.3} vs {push_hill:.3}, \
         separation {successes}/10): PASS"
    );
}

#[test]
fn criterion_7_orlicz_calibration() {
    use rand_distr::{Distribution, StandardNormal};
    let mut r = RngStream::new(777, 0).rng();
    let normals: Vec<f64> = (0..100_000)
        .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut r))
        .collect();
    let psi2 = orlicz_psi2_estimate(&normals).unwrap();
    let expected = (8.0_f64 / 3.0).sqrt();
    assert!(
        (psi2 - expected).abs() < 0.05,
        "normal psi2 {psi2}, expected {expected}"
    );

    let mut rademacher = vec![1.0; 50_000];
    rademacher.extend(vec![-1.0; 50_000]);
    let psi2_rad = orlicz_psi2_estimate(&rademacher).unwrap();
    let expected_rad = 1.0 / 2.0_f64.ln().sqrt();
    assert!(
        (psi2_rad - expected_rad).abs() < 1e-3,
        "rademacher psi2 {psi2_rad}, expected {expected_rad}"
    );
    println!(
        "acceptance criterion 7 (Orlicz calibration: {psi2:.4} vs {expected:.4}, \
         {psi2_rad:.6} vs {expected_rad:.6}): PASS"
    );
}

#[test]
fn criterion_9_dimension_free_certificates() {
    let n = 100_000;
    let mut scales = Vec::new();
    for &d in &[2usize, 64, 512] {
        // Fixed Lipschitz constant 1 at every d: the first two coordinates.
        let mut entries = vec![0.0; 2 * d];
        entries[0] = 1.0;
        entries[d + 1] = 1.0;
        let net = FeedForwardNetwork::new(vec![Layer::new(
            Matrix::new(2, d, entries).unwrap(),
            Vector::zeros(2),
            Activation::Identity,
        )
        .unwrap()])
        .unwrap();
        let spec = LatentSpec::Gaussian(GaussianSpec::standard(d));
        let cert = certify_gaussian(
            &net.certified_lipschitz(1e-9),
            &spec.certificate_params(None).unwrap(),
            2,
            ConstantMode::Tight,
            &ConstantConfig::default(),
        )
        .unwrap();
        scales.push(cert.scale());

        let set = pushforward_samples(&net, &spec, &RngStream::new(5000 + d as u64, 0), n).unwrap();
        let grid = testable_grid(&cert, n, 41);
        assert_panel_consistent(
            &format!("dimension-free d={d}"),
            &set,
            &cert,
            &grid,
            &RngStream::new(6000 + d as u64, 0),
        );
    }
    for s in &scales[1..] {
        assert!(
            (s - scales[0]).abs() <= 1e-12 * scales[0],
            "certificate scales differ across d: {scales:?}"
        );
    }
    println!("acceptance criterion 9 (dimension-free certificates, d in {{2, 64, 512}}): PASS");
}
