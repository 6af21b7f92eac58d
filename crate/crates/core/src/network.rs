//! Finite feed-forward networks: evaluation, certified Lipschitz upper
//! bounds, an empirical lower-bound witness, and the versioned network file
//! format.
//!
//! A network of depth `L` composes affine layers `x -> W x + b` with
//! elementwise activations. Each activation has a known Lipschitz constant
//! and each affine layer's operator norm is bounded by
//! `min(inflated power-iteration estimate, Frobenius norm)`, so the product
//! over layers is a sound upper bound on the network's global Lipschitz
//! constant.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::numerics::{operator_norm_upper_bound, Matrix, RngStream, Vector};
use crate::{Error, Result};

/// Elementwise activation with a verified Lipschitz constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Logistic,
    Tanh,
    Identity,
}

impl Activation {
    pub fn lipschitz_constant(self) -> f64 {
        match self {
            Activation::Relu | Activation::Tanh | Activation::Identity => 1.0,
            // sup of the logistic derivative, attained at 0.
            Activation::Logistic => 0.25,
        }
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Logistic => 1.0 / (1.0 + (-x).exp()),
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Logistic => "logistic",
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "relu" => Ok(Activation::Relu),
            "logistic" => Ok(Activation::Logistic),
            "tanh" => Ok(Activation::Tanh),
            "identity" => Ok(Activation::Identity),
            other => Err(Error::Domain(format!(
                "unknown activation {other:?}; supported: relu, logistic, tanh, identity"
            ))),
        }
    }
}

/// One affine layer plus its activation.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    weight: Matrix,
    bias: Vector,
    activation: Activation,
}

impl Layer {
    pub fn new(weight: Matrix, bias: Vector, activation: Activation) -> Result<Self> {
        if bias.dim() != weight.rows() {
            return Err(Error::Shape(format!(
                "layer bias has dim {} but weight has {} rows",
                bias.dim(),
                weight.rows()
            )));
        }
        Ok(Self {
            weight,
            bias,
            activation,
        })
    }

    pub fn weight(&self) -> &Matrix {
        &self.weight
    }

    pub fn bias(&self) -> &Vector {
        &self.bias
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    fn apply(&self, x: &Vector) -> Result<Vector> {
        let pre = self.weight.matvec(x)?.add(&self.bias);
        Ok(Vector::new(
            pre.as_slice()
                .iter()
                .map(|&v| self.activation.apply(v))
                .collect(),
        )
        .expect("activation of finite input is finite"))
    }
}

/// Finite feed-forward network: consecutive layer shapes must chain and all
/// entries are finite (checked at construction and at load).
#[derive(Debug, Clone, PartialEq)]
pub struct FeedForwardNetwork {
    layers: Vec<Layer>,
    input_dim: usize,
    output_dim: usize,
}

impl FeedForwardNetwork {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape("network must have at least one layer".into()));
        }
        for (l, pair) in layers.windows(2).enumerate() {
            if pair[1].weight.cols() != pair[0].weight.rows() {
                return Err(Error::Shape(format!(
                    "layer {} expects input dim {} but layer {} outputs dim {}",
                    l + 1,
                    pair[1].weight.cols(),
                    l,
                    pair[0].weight.rows()
                )));
            }
        }
        let input_dim = layers[0].weight.cols();
        let output_dim = layers.last().unwrap().weight.rows();
        Ok(Self {
            layers,
            input_dim,
            output_dim,
        })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Evaluate the layer composition.
    pub fn forward(&self, z: &Vector) -> Result<Vector> {
        if z.dim() != self.input_dim {
            return Err(Error::Shape(format!(
                "layer 0 expects input dim {}, got {}",
                self.input_dim,
                z.dim()
            )));
        }
        let mut x = self.layers[0].apply(z)?;
        for layer in &self.layers[1..] {
            x = layer.apply(&x)?;
        }
        Ok(x)
    }

    /// Sound upper bound on the global Lipschitz constant: the product over
    /// layers of `operator bound x activation constant`. Bias vectors shift
    /// outputs without affecting the bound.
    pub fn certified_lipschitz(&self, tol: f64) -> LipschitzBound {
        let max_iters = 10_000;
        let mut value = 1.0;
        let mut per_layer = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let operator_bound = operator_norm_upper_bound(&layer.weight, tol, max_iters);
            let activation_constant = layer.activation.lipschitz_constant();
            value *= operator_bound * activation_constant;
            per_layer.push(LayerBound {
                operator_bound,
                activation_constant,
            });
        }
        LipschitzBound {
            value,
            per_layer,
            method: BoundMethod::Min,
        }
    }

    /// Max observed ratio `||f(x) - f(y)|| / ||x - y||` over sampled pairs: a
    /// lower-bound witness for the certified upper bound. Probes the axis
    /// directions first, then Gaussian perturbations of scale
    /// `sampling_radius`, then independent uniform pairs in the cube
    /// `[-sampling_radius, sampling_radius]^d`.
    pub fn empirical_lipschitz_lower_bound(
        &self,
        rng: &RngStream,
        n_pairs: usize,
        sampling_radius: f64,
    ) -> Result<f64> {
        if n_pairs == 0 {
            return Err(Error::Domain("n_pairs must be at least 1".into()));
        }
        if sampling_radius <= 0.0 {
            return Err(Error::Domain("sampling_radius must be positive".into()));
        }
        let d = self.input_dim;
        let mut r = rng.rng();
        let mut best = 0.0_f64;
        let mut consider = |net: &Self, x: &Vector, y: &Vector| -> Result<()> {
            let denom = x.sub(y).norm();
            if denom == 0.0 {
                return Ok(());
            }
            let num = net.forward(x)?.sub(&net.forward(y)?).norm();
            best = best.max(num / denom);
            Ok(())
        };

        let origin = Vector::zeros(d);
        let mut produced = 0usize;
        for j in 0..d {
            for sign in [1.0, -1.0] {
                if produced >= n_pairs {
                    break;
                }
                let y = Vector::basis(d, j).scale(sign * sampling_radius);
                consider(self, &origin, &y)?;
                produced += 1;
            }
        }

        while produced < n_pairs {
            if produced.is_multiple_of(2) {
                let x = uniform_cube_point(&mut r, d, sampling_radius);
                let delta: Vec<f64> = (0..d)
                    .map(|_| {
                        sampling_radius
                            * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut r)
                    })
                    .collect();
                let y = x.add(&Vector::new(delta).expect("finite"));
                consider(self, &x, &y)?;
            } else {
                let x = uniform_cube_point(&mut r, d, sampling_radius);
                let y = uniform_cube_point(&mut r, d, sampling_radius);
                consider(self, &x, &y)?;
            }
            produced += 1;
        }
        Ok(best)
    }

    /// Feed the output of `self` into `other`.
    pub fn concat(&self, other: &FeedForwardNetwork) -> Result<FeedForwardNetwork> {
        let mut layers = self.layers.clone();
        layers.extend(other.layers.iter().cloned());
        FeedForwardNetwork::new(layers)
    }
}

fn uniform_cube_point(r: &mut impl rand::Rng, dim: usize, half_side: f64) -> Vector {
    Vector::new(
        (0..dim)
            .map(|_| r.random_range(-half_side..=half_side))
            .collect(),
    )
    .expect("finite")
}

/// How the per-layer operator bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMethod {
    Spectral,
    Frobenius,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerBound {
    pub operator_bound: f64,
    pub activation_constant: f64,
}

/// Certified Lipschitz upper bound with its per-layer factorization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzBound {
    pub value: f64,
    pub per_layer: Vec<LayerBound>,
    pub method: BoundMethod,
}

/// Weights i.i.d. `N(0, weight_scale^2 / fan_in)`, biases zero, one shared
/// activation per layer; deterministic in `rng`.
pub fn random_network(
    rng: &RngStream,
    widths: &[usize],
    activation: Activation,
    weight_scale: f64,
) -> Result<FeedForwardNetwork> {
    if widths.len() < 2 {
        return Err(Error::Domain(
            "random_network needs at least two widths (input and output)".into(),
        ));
    }
    if widths.contains(&0) {
        return Err(Error::Domain("widths must be positive".into()));
    }
    if weight_scale < 0.0 {
        return Err(Error::Domain("weight_scale must be nonnegative".into()));
    }
    let mut r = rng.rng();
    let mut layers = Vec::with_capacity(widths.len() - 1);
    for pair in widths.windows(2) {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        let std = weight_scale / (fan_in as f64).sqrt();
        let entries: Vec<f64> = (0..fan_in * fan_out)
            .map(|_| std * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut r))
            .collect();
        layers.push(Layer::new(
            Matrix::new(fan_out, fan_in, entries)?,
            Vector::zeros(fan_out),
            activation,
        )?);
    }
    FeedForwardNetwork::new(layers)
}

// --- network file format (versioned JSON) ---

pub const NETWORK_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    format_version: u32,
    input_dim: usize,
    output_dim: usize,
    layers: Vec<LayerFile>,
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
    activation: String,
}

/// Serialize to the versioned JSON network format. Numbers round-trip
/// exactly.
pub fn network_to_json(net: &FeedForwardNetwork) -> String {
    let file = NetworkFile {
        format_version: NETWORK_FORMAT_VERSION,
        input_dim: net.input_dim(),
        output_dim: net.output_dim(),
        layers: net
            .layers()
            .iter()
            .map(|l| LayerFile {
                rows: l.weight.rows(),
                cols: l.weight.cols(),
                weights: l.weight.as_slice().to_vec(),
                bias: l.bias.as_slice().to_vec(),
                activation: l.activation.name().to_string(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("network file serialization cannot fail")
}

/// Parse and fully validate a network file, naming the offending field and
/// index on violation.
pub fn network_from_json(json: &str) -> Result<FeedForwardNetwork> {
    let file: NetworkFile = serde_json::from_str(json)?;
    if file.format_version != NETWORK_FORMAT_VERSION {
        return Err(Error::NetworkFile {
            field: "format_version".into(),
            message: format!(
                "unsupported version {} (expected {NETWORK_FORMAT_VERSION})",
                file.format_version
            ),
        });
    }
    if file.layers.is_empty() {
        return Err(Error::NetworkFile {
            field: "layers".into(),
            message: "network must have at least one layer".into(),
        });
    }
    let mut layers = Vec::with_capacity(file.layers.len());
    for (l, lf) in file.layers.iter().enumerate() {
        let field = |name: &str| format!("layers[{l}].{name}");
        if lf.rows == 0 || lf.cols == 0 {
            return Err(Error::NetworkFile {
                field: field("rows"),
                message: "dimensions must be positive".into(),
            });
        }
        if lf.weights.len() != lf.rows * lf.cols {
            return Err(Error::NetworkFile {
                field: field("weights"),
                message: format!(
                    "expected {} entries for {}x{}, got {}",
                    lf.rows * lf.cols,
                    lf.rows,
                    lf.cols,
                    lf.weights.len()
                ),
            });
        }
        if let Some(i) = lf.weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NetworkFile {
                field: field("weights"),
                message: format!("entry {i} is not finite"),
            });
        }
        if lf.bias.len() != lf.rows {
            return Err(Error::NetworkFile {
                field: field("bias"),
                message: format!("expected {} entries, got {}", lf.rows, lf.bias.len()),
            });
        }
        if let Some(i) = lf.bias.iter().position(|b| !b.is_finite()) {
            return Err(Error::NetworkFile {
                field: field("bias"),
                message: format!("entry {i} is not finite"),
            });
        }
        let activation = Activation::parse(&lf.activation).map_err(|_| Error::NetworkFile {
            field: field("activation"),
            message: format!("unknown activation {:?}", lf.activation),
        })?;
        let weight = Matrix::new(lf.rows, lf.cols, lf.weights.clone())?;
        let bias = Vector::new(lf.bias.clone()).unwrap_or_else(|_| Vector::zeros(lf.rows));
        layers.push(Layer::new(weight, bias, activation)?);
    }
    let net = FeedForwardNetwork::new(layers).map_err(|e| Error::NetworkFile {
        field: "layers".into(),
        message: e.to_string(),
    })?;
    if net.input_dim() != file.input_dim {
        return Err(Error::NetworkFile {
            field: "input_dim".into(),
            message: format!(
                "declared {} but layers imply {}",
                file.input_dim,
                net.input_dim()
            ),
        });
    }
    if net.output_dim() != file.output_dim {
        return Err(Error::NetworkFile {
            field: "output_dim".into(),
            message: format!(
                "declared {} but layers imply {}",
                file.output_dim,
                net.output_dim()
            ),
        });
    }
    Ok(net)
}

pub fn save_network(net: &FeedForwardNetwork, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, network_to_json(net))?;
    Ok(())
}

pub fn load_network(path: &std::path::Path) -> Result<FeedForwardNetwork> {
    let json = std::fs::read_to_string(path)?;
    network_from_json(&json)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_net(dim: usize, activation: Activation) -> FeedForwardNetwork {
        FeedForwardNetwork::new(vec![Layer::new(
            Matrix::identity(dim),
            Vector::zeros(dim),
            activation,
        )
        .unwrap()])
        .unwrap()
    }

    #[test]
    fn forward_identity_relu_on_nonnegative() {
        let net = identity_net(2, Activation::Relu);
        let out = net.forward(&Vector::new(vec![1.0, 2.0]).unwrap()).unwrap();
        assert_eq!(out.as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn forward_relu_clips() {
        let net = FeedForwardNetwork::new(vec![Layer::new(
            Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap(),
            Vector::zeros(1),
            Activation::Relu,
        )
        .unwrap()])
        .unwrap();
        let out = net.forward(&Vector::new(vec![1.0, -2.0]).unwrap()).unwrap();
        assert_eq!(out.as_slice(), &[0.0]);
    }

    #[test]
    fn forward_generator_shape() {
        let net = random_network(
            &RngStream::new(7, 0),
            &[64, 128, 256, 2],
            Activation::Relu,
            1.0,
        )
        .unwrap();
        assert_eq!(net.input_dim(), 64);
        assert_eq!(net.output_dim(), 2);
        let z = Vector::new(vec![0.1; 64]).unwrap();
        assert_eq!(net.forward(&z).unwrap().dim(), 2);
    }

    #[test]
    fn forward_rejects_dim_mismatch() {
        let net = identity_net(2, Activation::Relu);
        let err = net.forward(&Vector::new(vec![1.0]).unwrap()).unwrap_err();
        assert!(err.to_string().contains("layer 0"), "{err}");
    }

    #[test]
    fn certified_identity_is_one() {
        let b = identity_net(3, Activation::Identity).certified_lipschitz(1e-9);
        assert!((b.value - 1.0).abs() < 1e-8, "got {}", b.value);
    }

    #[test]
    fn certified_two_diagonal_layers() {
        let net = FeedForwardNetwork::new(vec![
            Layer::new(
                Matrix::scaled_identity(2, 2.0),
                Vector::zeros(2),
                Activation::Relu,
            )
            .unwrap(),
            Layer::new(
                Matrix::scaled_identity(2, 3.0),
                Vector::zeros(2),
                Activation::Relu,
            )
            .unwrap(),
        ])
        .unwrap();
        let b = net.certified_lipschitz(1e-9);
        assert!((b.value - 6.0).abs() < 6.0 * 1e-8, "got {}", b.value);
        assert_eq!(b.per_layer.len(), 2);
        let product: f64 = b
            .per_layer
            .iter()
            .map(|l| l.operator_bound * l.activation_constant)
            .product();
        assert!((b.value - product).abs() <= 1e-12 * b.value);
    }

    #[test]
    fn certified_logistic_quarter() {
        let b = identity_net(2, Activation::Logistic).certified_lipschitz(1e-9);
        assert!((b.value - 0.25).abs() < 1e-8, "got {}", b.value);
    }

    #[test]
    fn empirical_identity_at_most_one() {
        let net = identity_net(2, Activation::Identity);
        let ratio = net
            .empirical_lipschitz_lower_bound(&RngStream::new(1, 0), 200, 1.0)
            .unwrap();
        assert!(ratio > 0.0 && ratio <= 1.0 + 1e-12, "got {ratio}");
    }

    #[test]
    fn empirical_diagonal_finds_top_direction() {
        let net = FeedForwardNetwork::new(vec![Layer::new(
            Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 4.0]]).unwrap(),
            Vector::zeros(2),
            Activation::Identity,
        )
        .unwrap()])
        .unwrap();
        let ratio = net
            .empirical_lipschitz_lower_bound(&RngStream::new(2, 0), 10_000, 1.0)
            .unwrap();
        assert!((3.9..=4.0 + 1e-12).contains(&ratio), "got {ratio}");
    }

    #[test]
    fn empirical_never_exceeds_certified() {
        let net = random_network(
            &RngStream::new(3, 0),
            &[64, 128, 256, 2],
            Activation::Relu,
            1.0,
        )
        .unwrap();
        let cert = net.certified_lipschitz(1e-6);
        let ratio = net
            .empirical_lipschitz_lower_bound(&RngStream::new(3, 1), 2_000, 2.0)
            .unwrap();
        assert!(ratio <= cert.value, "ratio {ratio} > cert {}", cert.value);
    }

    #[test]
    fn random_network_deterministic() {
        let a = random_network(&RngStream::new(5, 9), &[2, 2], Activation::Tanh, 1.0).unwrap();
        let b = random_network(&RngStream::new(5, 9), &[2, 2], Activation::Tanh, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_network_zero_scale() {
        let net = random_network(&RngStream::new(5, 0), &[3, 2], Activation::Relu, 0.0).unwrap();
        let b = net.certified_lipschitz(1e-9);
        assert_eq!(b.value, 0.0);
    }

    #[test]
    fn json_round_trip() {
        let net = random_network(
            &RngStream::new(11, 0),
            &[3, 5, 2],
            Activation::Logistic,
            0.7,
        )
        .unwrap();
        let json = network_to_json(&net);
        let back = network_from_json(&json).unwrap();
        assert_eq!(net, back);
    }

    #[test]
    fn json_rejects_nonfinite_weights() {
        let json = r#"{
            "format_version": 1,
            "input_dim": 1,
            "output_dim": 1,
            "layers": [{"rows": 1, "cols": 1, "weights": [1e400], "bias": [0.0], "activation": "relu"}]
        }"#;
        // 1e400 parses as infinity in serde_json's f64 path only when
        // arbitrary precision is off; it errors instead, which is also fine.
        match network_from_json(json) {
            Err(_) => {}
            Ok(_) => panic!("expected rejection of non-finite weight"),
        }
    }

    #[test]
    fn json_names_bad_field() {
        let json = r#"{
            "format_version": 1,
            "input_dim": 2,
            "output_dim": 1,
            "layers": [{"rows": 1, "cols": 2, "weights": [1.0, 2.0], "bias": [0.0], "activation": "gelu"}]
        }"#;
        let err = network_from_json(json).unwrap_err();
        assert!(
            err.to_string().contains("layers[0].activation"),
            "unexpected error: {err}"
        );
    }

    #[test]
    fn json_rejects_wrong_version() {
        let json = r#"{"format_version": 9, "input_dim": 1, "output_dim": 1, "layers": []}"#;
        let err = network_from_json(json).unwrap_err();
        assert!(err.to_string().contains("format_version"), "{err}");
    }
}
