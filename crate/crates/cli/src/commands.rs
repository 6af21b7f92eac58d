//! Subcommand implementations. Each returns the process exit code on
//! success (0, or 3 for a certificate-violation verdict) and writes a
//! manifest beside its primary output.

use std::path::{Path, PathBuf};

use serde_json::json;

use tailcert::audit::default_direction_panel;
use tailcert::data_io::{read_samples_csv, samples_to_csv};
use tailcert::network::{load_network, network_to_json, Activation};
use tailcert::{
    certify_diffusion, certify_gaussian, certify_logconcave, certify_manifold,
    certify_strongly_logconcave, compare_to_certificate, ingest_returns, linear_schedule,
    pushforward_samples, random_network, sample_target, Centering, ConstantConfig, ConstantMode,
    DiffusionChain, LatentSpec, ReturnMode, RngStream, SampleSet, SigmaRule, SlackRule,
    TailCertificate, TargetSpec,
};

use crate::cli::{
    AuditArgs, CertifyArgs, CertifyDiffusionArgs, GenNetworkArgs, IngestReturnsArgs, PushArgs,
    SampleArgs,
};
use crate::manifest::{now_ms, write_atomic, write_manifest};
use crate::{grammar, CliError};

fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

/// Either kind of sampling spec a `--spec-file` may hold; the JSON `kind`
/// tags are disjoint across the two families.
#[derive(serde::Deserialize)]
#[serde(untagged)]
enum SpecFile {
    Latent(LatentSpec),
    Target(TargetSpec),
}

fn read_spec_file(path: &PathBuf) -> Result<SpecFile, CliError> {
    let body = std::fs::read_to_string(path).map_err(data_err)?;
    let spec: SpecFile = serde_json::from_str(&body).map_err(data_err)?;
    if let SpecFile::Latent(latent) = &spec {
        latent.validate().map_err(data_err)?;
    }
    Ok(spec)
}

fn load_latent(inline: &Option<String>, file: &Option<PathBuf>) -> Result<LatentSpec, CliError> {
    match (inline, file) {
        (Some(text), None) => grammar::parse_latent_spec(text),
        (None, Some(path)) => match read_spec_file(path)? {
            SpecFile::Latent(spec) => Ok(spec),
            SpecFile::Target(_) => Err(CliError::Data(format!(
                "{} holds a target spec; a latent spec is required here",
                path.display()
            ))),
        },
        _ => Err(CliError::Usage(
            "provide exactly one of --latent or --spec-file".into(),
        )),
    }
}

fn mode_from_flag(mode: &str) -> Result<ConstantMode, CliError> {
    match mode {
        "tight" => Ok(ConstantMode::Tight),
        "paper" => Ok(ConstantMode::PaperForm),
        other => Err(CliError::Usage(format!(
            "mode must be tight or paper, got {other:?}"
        ))),
    }
}

fn centering_from_flag(c: &str) -> Result<Centering, CliError> {
    match c {
        "mean" => Ok(Centering::Mean),
        "median" => Ok(Centering::Median),
        other => Err(CliError::Usage(format!(
            "centering must be mean or median, got {other:?}"
        ))),
    }
}

pub fn certify(args: &CertifyArgs, argv: &[String]) -> Result<i32, CliError> {
    let started = now_ms();
    let net = load_network(&args.model).map_err(data_err)?;
    let spec = load_latent(&args.latent, &args.spec_file)?;
    if spec.dim() != net.input_dim() {
        return Err(CliError::Data(format!(
            "latent dim {} does not match network input dim {}",
            spec.dim(),
            net.input_dim()
        )));
    }
    let mode = mode_from_flag(&args.mode)?;
    let cfg = ConstantConfig {
        c: args.c,
        c6: args.c6,
    };
    let lip = net.certified_lipschitz(args.tol);
    let params = spec.certificate_params(args.cheeger).map_err(data_err)?;
    let p = args.p_override.unwrap_or(net.output_dim());
    let cert = match &spec {
        LatentSpec::Gaussian(_) => certify_gaussian(&lip, &params, p, mode, &cfg),
        LatentSpec::UniformCube { .. } | LatentSpec::UniformBall { .. } => {
            certify_logconcave(&lip, &params, p, mode, &cfg)
        }
        LatentSpec::StronglyLogConcave { .. } => {
            certify_strongly_logconcave(&lip, &params, p, mode, &cfg)
        }
        LatentSpec::Sphere { .. } => certify_manifold(&lip, &params, p, mode, &cfg),
    }
    .map_err(data_err)?;

    let body = serde_json::to_string_pretty(&cert).map_err(data_err)?;
    write_atomic(&args.out, &body)?;
    write_manifest(
        &args.out,
        argv,
        json!({
            "model": args.model,
            "latent": spec,
            "mode": args.mode,
            "p": p,
            "cheeger_override": args.cheeger,
            "constants": {"c": args.c, "c6": args.c6},
            "tol": args.tol,
            "certified_lipschitz": lip,
            "out": args.out,
        }),
        None,
        started,
    )?;
    Ok(0)
}

pub fn certify_diffusion_cmd(
    args: &CertifyDiffusionArgs,
    argv: &[String],
) -> Result<i32, CliError> {
    let started = now_ms();
    let net = load_network(&args.model).map_err(data_err)?;
    let (t_steps, beta_start, beta_end) = grammar::parse_schedule(&args.schedule)?;
    let schedule =
        linear_schedule(t_steps, beta_start, beta_end, SigmaRule::SqrtBeta).map_err(data_err)?;
    let chain = DiffusionChain::new(schedule, net).map_err(data_err)?;
    let mode = mode_from_flag(&args.mode)?;
    let cfg = ConstantConfig { c: args.c, c6: 1.0 };
    let lip = chain.noise_net().certified_lipschitz(args.tol);
    let cert = certify_diffusion(&chain, &lip, mode, &cfg).map_err(data_err)?;

    let body = serde_json::to_string_pretty(&cert).map_err(data_err)?;
    write_atomic(&args.out, &body)?;
    write_manifest(
        &args.out,
        argv,
        json!({
            "model": args.model,
            "schedule": {"t_steps": t_steps, "beta_start": beta_start, "beta_end": beta_end,
                          "sigma_rule": "sqrt_beta"},
            "mode": args.mode,
            "c": args.c,
            "tol": args.tol,
            "noise_net_lipschitz": lip,
            "out": args.out,
        }),
        None,
        started,
    )?;
    Ok(0)
}

fn write_sample_outputs(
    set: &SampleSet,
    out: &Path,
    spec_json: serde_json::Value,
    seed: Option<u64>,
    argv: &[String],
    started: u128,
) -> Result<(), CliError> {
    write_atomic(out, &samples_to_csv(set))?;
    let meta = json!({
        "provenance": set.provenance(),
        "seed": seed,
        "spec": spec_json,
    });
    let mut meta_path = out.as_os_str().to_owned();
    meta_path.push(".meta.json");
    write_atomic(
        Path::new(&meta_path),
        &serde_json::to_string_pretty(&meta).map_err(data_err)?,
    )?;
    write_manifest(
        out,
        argv,
        json!({"spec": spec_json, "n": set.len(), "out": out}),
        seed,
        started,
    )
}

pub fn sample(args: &SampleArgs, argv: &[String]) -> Result<i32, CliError> {
    let started = now_ms();
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let rng = RngStream::new(args.seed, args.stream);
    let sources = [
        args.latent.is_some() || args.spec_file.is_some(),
        args.target.is_some(),
        args.chain.is_some(),
    ];
    if sources.iter().filter(|s| **s).count() != 1 {
        return Err(CliError::Usage(
            "provide exactly one of --latent/--spec-file, --target, or --chain".into(),
        ));
    }
    let (set, spec_json) = if let Some(target) = &args.target {
        let spec: TargetSpec = grammar::parse_target_spec(target)?;
        let set = sample_target(&spec, &rng, args.n).map_err(data_err)?;
        let spec_json = serde_json::to_value(&spec).map_err(data_err)?;
        (set, spec_json)
    } else if let Some(SpecFile::Target(spec)) =
        args.spec_file.as_ref().map(read_spec_file).transpose()?
    {
        // A --spec-file may carry a heavy-tailed target instead of a latent.
        let set = sample_target(&spec, &rng, args.n).map_err(data_err)?;
        let spec_json = serde_json::to_value(&spec).map_err(data_err)?;
        (set, spec_json)
    } else if let Some(chain_model) = &args.chain {
        let schedule_text = args.schedule.as_ref().ok_or_else(|| {
            CliError::Usage("--chain requires --schedule T,beta_start,beta_end".into())
        })?;
        let (t_steps, beta_start, beta_end) = grammar::parse_schedule(schedule_text)?;
        let schedule = linear_schedule(t_steps, beta_start, beta_end, SigmaRule::SqrtBeta)
            .map_err(data_err)?;
        let net = load_network(chain_model).map_err(data_err)?;
        let chain = DiffusionChain::new(schedule, net).map_err(data_err)?;
        let draws = chain.sample(&rng, args.n).map_err(data_err)?;
        let set = SampleSet::new(
            draws,
            format!(
                "diffusion chain T={t_steps} from {}, seed={}/{}",
                chain_model.display(),
                rng.seed,
                rng.stream_id
            ),
        )
        .map_err(data_err)?;
        let spec_json = json!({
            "chain_model": chain_model,
            "schedule": {"t_steps": t_steps, "beta_start": beta_start, "beta_end": beta_end,
                          "sigma_rule": "sqrt_beta"},
        });
        (set, spec_json)
    } else {
        let spec = load_latent(&args.latent, &args.spec_file)?;
        let draws = spec.sample(&rng, args.n).map_err(data_err)?;
        let set = SampleSet::new(
            draws,
            format!("latent {spec:?} seed={}/{}", rng.seed, rng.stream_id),
        )
        .map_err(data_err)?;
        let spec_json = serde_json::to_value(&spec).map_err(data_err)?;
        (set, spec_json)
    };
    write_sample_outputs(&set, &args.out, spec_json, Some(args.seed), argv, started)?;
    Ok(0)
}

pub fn push(args: &PushArgs, argv: &[String]) -> Result<i32, CliError> {
    let started = now_ms();
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let net = load_network(&args.model).map_err(data_err)?;
    let spec = load_latent(&args.latent, &args.spec_file)?;
    let rng = RngStream::new(args.seed, args.stream);
    let set = pushforward_samples(&net, &spec, &rng, args.n).map_err(data_err)?;
    let spec_json = json!({
        "model": args.model,
        "latent": serde_json::to_value(&spec).map_err(data_err)?,
    });
    write_sample_outputs(&set, &args.out, spec_json, Some(args.seed), argv, started)?;
    Ok(0)
}

fn per_direction_path(base: &Path, index: usize, total: usize) -> PathBuf {
    if total == 1 {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = base
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    base.with_file_name(format!("{stem}.d{index}{ext}"))
}

pub fn audit(args: &AuditArgs, argv: &[String]) -> Result<i32, CliError> {
    let started = now_ms();
    let set = read_samples_csv(&args.samples).map_err(data_err)?;
    let cert_body = std::fs::read_to_string(&args.cert).map_err(data_err)?;
    let cert: TailCertificate = serde_json::from_str(&cert_body).map_err(data_err)?;
    if cert.output_dim() != set.dim() {
        return Err(CliError::Data(format!(
            "certificate is for dimension {}, samples have dimension {}",
            cert.output_dim(),
            set.dim()
        )));
    }
    let centering = centering_from_flag(&args.centering)?;
    let extra = grammar::parse_directions(&args.directions)?;
    let panel = default_direction_panel(set.dim(), &RngStream::new(args.seed, 9000), extra);
    let grid = match &args.grid {
        Some(text) => grammar::parse_grid(text)?,
        None => {
            let delta = (20.0 / set.len() as f64).clamp(1e-6, 0.5);
            let top = cert.quantile(delta).map_err(data_err)?;
            (0..41).map(|i| top * i as f64 / 40.0).collect()
        }
    };
    let slack = SlackRule::default();
    let reports: Vec<_> = panel
        .iter()
        .map(|u| compare_to_certificate(&set, u, &cert, &grid, &slack, centering))
        .collect::<Result<_, _>>()
        .map_err(data_err)?;
    let any_violation = reports.iter().any(|r| r.verdict.is_violation());

    // Full JSON report.
    let report_json = json!({
        "samples": args.samples,
        "samples_provenance": set.provenance(),
        "n": set.len(),
        "certificate": cert,
        "grid": grid,
        "slack_rule": slack,
        "rng_algorithm": tailcert::RNG_ALGORITHM,
        "overall": if any_violation { "violation" } else { "consistent_with_certificate" },
        "reports": reports,
    });
    write_atomic(
        &args.out_json,
        &serde_json::to_string_pretty(&report_json).map_err(data_err)?,
    )?;

    // Per-direction CSV: t, empirical_exceedance, certificate_bound.
    for (i, report) in reports.iter().enumerate() {
        let mut csv = String::from("t,empirical_exceedance,certificate_bound\n");
        for ((t, emp), bound) in report
            .grid
            .iter()
            .zip(&report.empirical_exceedance)
            .zip(&report.certificate_bound)
        {
            csv.push_str(&format!("{t},{emp},{bound}\n"));
        }
        write_atomic(&per_direction_path(&args.out_csv, i, reports.len()), &csv)?;
    }

    // Optional survival curves for log-log tail plots.
    if let Some(survival_out) = &args.out_survival {
        let center = set.center(centering);
        for (i, u) in panel.iter().enumerate() {
            let magnitudes: Vec<f64> = set
                .samples()
                .iter()
                .map(|x| u.dot(&x.sub(&center)).abs())
                .collect();
            let mut csv = String::from("log10_t,log10_survival\n");
            for (lt, ls) in tailcert::survival_curve(&magnitudes) {
                csv.push_str(&format!("{lt},{ls}\n"));
            }
            write_atomic(&per_direction_path(survival_out, i, panel.len()), &csv)?;
        }
    }

    write_manifest(
        &args.out_json,
        argv,
        json!({
            "samples": args.samples,
            "cert": args.cert,
            "directions": args.directions,
            "grid": grid,
            "centering": args.centering,
            "out_json": args.out_json,
            "out_csv": args.out_csv,
            "out_survival": args.out_survival,
        }),
        Some(args.seed),
        started,
    )?;
    Ok(if any_violation { 3 } else { 0 })
}

pub fn ingest(args: &IngestReturnsArgs, argv: &[String]) -> Result<i32, CliError> {
    let started = now_ms();
    if args.csv.is_empty() {
        return Err(CliError::Usage("provide at least one --csv path".into()));
    }
    let mode = if args.log_returns {
        ReturnMode::Log
    } else {
        ReturnMode::Simple
    };
    let set = ingest_returns(&args.csv, &args.date_col, &args.price_col, mode).map_err(data_err)?;
    let spec_json = json!({
        "csv": args.csv,
        "date_col": args.date_col,
        "price_col": args.price_col,
        "mode": mode,
    });
    write_sample_outputs(&set, &args.out, spec_json, None, argv, started)?;
    Ok(0)
}

pub fn gen_network(args: &GenNetworkArgs, argv: &[String]) -> Result<i32, CliError> {
    let started = now_ms();
    let widths = grammar::parse_widths(&args.widths)?;
    let activation =
        Activation::parse(&args.activation).map_err(|e| CliError::Usage(e.to_string()))?;
    if args.scale < 0.0 {
        return Err(CliError::Usage("--scale must be nonnegative".into()));
    }
    let rng = RngStream::new(args.seed, args.stream);
    let net = random_network(&rng, &widths, activation, args.scale).map_err(data_err)?;
    write_atomic(&args.out, &network_to_json(&net))?;
    write_manifest(
        &args.out,
        argv,
        json!({
            "widths": widths,
            "activation": args.activation,
            "scale": args.scale,
            "out": args.out,
        }),
        Some(args.seed),
        started,
    )?;
    Ok(0)
}
