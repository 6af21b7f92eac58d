//! Command-line mini-grammar for latent and target specs, schedules, grids,
//! and direction panels. Full matrices go through `--spec-file` JSON instead.

use tailcert::{GaussianSpec, LatentSpec, Matrix, TargetSpec, Vector};

use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

struct KvPairs<'a> {
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> KvPairs<'a> {
    fn parse(body: &'a str) -> Result<Self, CliError> {
        let mut pairs = Vec::new();
        if body.trim().is_empty() {
            return Ok(Self { pairs });
        }
        for item in body.split(',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| usage(format!("expected key=value, got {item:?}")))?;
            pairs.push((k.trim(), v.trim()));
        }
        Ok(Self { pairs })
    }

    fn get(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn require(&self, key: &str, context: &str) -> Result<&'a str, CliError> {
        self.get(key)
            .ok_or_else(|| usage(format!("{context} requires {key}=<value>")))
    }

    fn reject_unknown(&self, allowed: &[&str], context: &str) -> Result<(), CliError> {
        for (k, _) in &self.pairs {
            if !allowed.contains(k) {
                return Err(usage(format!(
                    "unknown key {k:?} for {context}; allowed: {}",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }
}

fn parse_usize(v: &str, what: &str) -> Result<usize, CliError> {
    v.parse()
        .map_err(|_| usage(format!("{what} must be a positive integer, got {v:?}")))
}

fn parse_f64(v: &str, what: &str) -> Result<f64, CliError> {
    v.parse()
        .map_err(|_| usage(format!("{what} must be a number, got {v:?}")))
}

/// `I` or `<s>I` as an isotropic matrix of the given dimension.
fn parse_isotropic(v: &str, dim: usize, what: &str) -> Result<Matrix, CliError> {
    let body = v
        .strip_suffix('I')
        .ok_or_else(|| usage(format!("{what} must be I or <scale>I, got {v:?}")))?;
    let scale = if body.is_empty() {
        1.0
    } else {
        parse_f64(body, what)?
    };
    if scale <= 0.0 {
        return Err(usage(format!("{what} scale must be positive")));
    }
    Ok(Matrix::scaled_identity(dim, scale))
}

/// Parse a latent spec such as `gaussian:d=64,sigma=I`, `cube:d=8,h=1`,
/// `ball:d=4,r=1`, `slc:d=8,sigma=2I,gamma=0.5`, `sphere:d=64,r=1`.
pub fn parse_latent_spec(text: &str) -> Result<LatentSpec, CliError> {
    let (kind, body) = text.split_once(':').unwrap_or((text, ""));
    let kv = KvPairs::parse(body)?;
    let spec = match kind {
        "gaussian" => {
            kv.reject_unknown(&["d", "sigma"], "gaussian")?;
            let d = parse_usize(kv.require("d", "gaussian")?, "d")?;
            let sigma = match kv.get("sigma") {
                Some(v) => parse_isotropic(v, d, "sigma")?,
                None => Matrix::identity(d),
            };
            LatentSpec::Gaussian(GaussianSpec {
                mu: Vector::zeros(d),
                sigma,
            })
        }
        "cube" => {
            kv.reject_unknown(&["d", "h"], "cube")?;
            LatentSpec::UniformCube {
                dim: parse_usize(kv.require("d", "cube")?, "d")?,
                half_side: kv
                    .get("h")
                    .map(|v| parse_f64(v, "h"))
                    .transpose()?
                    .unwrap_or(1.0),
            }
        }
        "ball" => {
            kv.reject_unknown(&["d", "r"], "ball")?;
            LatentSpec::UniformBall {
                dim: parse_usize(kv.require("d", "ball")?, "d")?,
                radius: kv
                    .get("r")
                    .map(|v| parse_f64(v, "r"))
                    .transpose()?
                    .unwrap_or(1.0),
            }
        }
        "slc" => {
            kv.reject_unknown(&["d", "sigma", "gamma"], "slc")?;
            let d = parse_usize(kv.require("d", "slc")?, "d")?;
            let sigma = match kv.get("sigma") {
                Some(v) => parse_isotropic(v, d, "sigma")?,
                None => Matrix::identity(d),
            };
            LatentSpec::StronglyLogConcave {
                base: GaussianSpec {
                    mu: Vector::zeros(d),
                    sigma,
                },
                gamma: kv.get("gamma").map(|v| parse_f64(v, "gamma")).transpose()?,
            }
        }
        "sphere" => {
            kv.reject_unknown(&["d", "r"], "sphere")?;
            LatentSpec::Sphere {
                ambient_dim: parse_usize(kv.require("d", "sphere")?, "d")?,
                radius: kv
                    .get("r")
                    .map(|v| parse_f64(v, "r"))
                    .transpose()?
                    .unwrap_or(1.0),
            }
        }
        other => {
            return Err(usage(format!(
                "unknown latent kind {other:?}; expected gaussian, cube, ball, slc, or sphere"
            )))
        }
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    Ok(spec)
}

/// Parse a target spec such as `cauchy:d=2`, `student:d=2,dof=3`,
/// `gaussian:d=2,sigma=I`.
pub fn parse_target_spec(text: &str) -> Result<TargetSpec, CliError> {
    let (kind, body) = text.split_once(':').unwrap_or((text, ""));
    let kv = KvPairs::parse(body)?;
    match kind {
        "cauchy" => {
            kv.reject_unknown(&["d", "scale"], "cauchy")?;
            let d = parse_usize(kv.require("d", "cauchy")?, "d")?;
            let scale = match kv.get("scale") {
                Some(v) => parse_isotropic(v, d, "scale")?,
                None => Matrix::identity(d),
            };
            Ok(TargetSpec::Cauchy {
                mode: Vector::zeros(d),
                scale,
            })
        }
        "student" => {
            kv.reject_unknown(&["d", "dof", "scale"], "student")?;
            let d = parse_usize(kv.require("d", "student")?, "d")?;
            let dof = parse_f64(kv.require("dof", "student")?, "dof")?;
            let scale = match kv.get("scale") {
                Some(v) => parse_isotropic(v, d, "scale")?,
                None => Matrix::identity(d),
            };
            Ok(TargetSpec::StudentT {
                dof,
                mode: Vector::zeros(d),
                scale,
            })
        }
        "gaussian" => {
            kv.reject_unknown(&["d", "sigma"], "gaussian target")?;
            let d = parse_usize(kv.require("d", "gaussian target")?, "d")?;
            let sigma = match kv.get("sigma") {
                Some(v) => parse_isotropic(v, d, "sigma")?,
                None => Matrix::identity(d),
            };
            Ok(TargetSpec::GaussianTarget {
                mu: Vector::zeros(d),
                sigma,
            })
        }
        other => Err(usage(format!(
            "unknown target kind {other:?}; expected cauchy, student, or gaussian"
        ))),
    }
}

/// Parse `T,beta_start,beta_end`.
pub fn parse_schedule(text: &str) -> Result<(usize, f64, f64), CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(usage(format!(
            "schedule must be T,beta_start,beta_end, got {text:?}"
        )));
    }
    Ok((
        parse_usize(parts[0], "schedule T")?,
        parse_f64(parts[1], "beta_start")?,
        parse_f64(parts[2], "beta_end")?,
    ))
}

/// Parse `t0:t1:points` into an inclusive linear grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("grid must be t0:t1:points, got {text:?}")));
    }
    let t0 = parse_f64(parts[0], "grid start")?;
    let t1 = parse_f64(parts[1], "grid end")?;
    let points = parse_usize(parts[2], "grid points")?;
    if points < 2 || t1 <= t0 || t0 < 0.0 {
        return Err(usage(
            "grid needs t0 >= 0, t1 > t0, and at least 2 points".to_string(),
        ));
    }
    Ok((0..points)
        .map(|i| t0 + (t1 - t0) * i as f64 / (points - 1) as f64)
        .collect())
}

/// Parse a direction panel such as `axes+8` or `axes`.
pub fn parse_directions(text: &str) -> Result<usize, CliError> {
    if text == "axes" {
        return Ok(0);
    }
    text.strip_prefix("axes+")
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| usage(format!("directions must be axes or axes+K, got {text:?}")))
}

/// Parse comma-separated layer widths.
pub fn parse_widths(text: &str) -> Result<Vec<usize>, CliError> {
    let widths: Vec<usize> = text
        .split(',')
        .map(|w| parse_usize(w.trim(), "width"))
        .collect::<Result<_, _>>()?;
    if widths.len() < 2 {
        return Err(usage(
            "need at least two widths (input and output)".to_string(),
        ));
    }
    Ok(widths)
}
