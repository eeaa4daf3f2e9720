use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use countcomp::dist::{BetaBinomialParams, DirichletParams, GammaMixtureParams};
use countcomp::simplex::Composition;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistName {
    Dirichlet,
    InvertedDirichlet,
    AlrDirichlet,
    Gamma,
    Poisson,
    #[value(alias = "nb")]
    NegativeBinomial,
    Multinomial,
    DirichletMultinomial,
    BetaBinomial,
    NormalizedNb,
}

impl DistName {
    pub fn as_str(self) -> &'static str {
        match self {
            DistName::Dirichlet => "dirichlet",
            DistName::InvertedDirichlet => "inverted-dirichlet",
            DistName::AlrDirichlet => "alr-dirichlet",
            DistName::Gamma => "gamma",
            DistName::Poisson => "poisson",
            DistName::NegativeBinomial => "negative-binomial",
            DistName::Multinomial => "multinomial",
            DistName::DirichletMultinomial => "dirichlet-multinomial",
            DistName::BetaBinomial => "beta-binomial",
            DistName::NormalizedNb => "normalized-nb",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlphaKeys {
    alpha: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GammaKeys {
    shape: f64,
    scale: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PoissonKeys {
    rate: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NbKeys {
    #[serde(rename = "R")]
    total_shape: f64,
    p: Option<f64>,
    theta: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MultinomialKeys {
    m: u64,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DmKeys {
    r: Vec<f64>,
    m: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BbKeys {
    a: f64,
    b: f64,
    m: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormalizedNbKeys {
    shapes: Vec<f64>,
    scale: f64,
    component: usize,
}

/// A validated distribution with its parameters.
#[derive(Debug, Clone)]
pub enum Model {
    Dirichlet(DirichletParams),
    InvertedDirichlet(DirichletParams),
    AlrDirichlet(DirichletParams),
    Gamma { shape: f64, scale: f64 },
    Poisson { rate: f64 },
    /// Stored as `(R, p)`; `theta = p / (1 - p)`.
    NegativeBinomial { total_shape: f64, p: f64 },
    Multinomial { m: u64, probs: Composition },
    DirichletMultinomial { m: u64, shapes: DirichletParams },
    BetaBinomial(BetaBinomialParams),
    NormalizedNb { params: GammaMixtureParams, component: usize },
}

fn keys<T: DeserializeOwned>(dist: DistName, params: &Value) -> Result<T, CliError> {
    T::deserialize(params)
        .map_err(|e| CliError::Usage(format!("bad parameters for {}: {e}", dist.as_str())))
}

pub fn parse_model(dist: DistName, params: &Value) -> Result<Model, CliError> {
    Ok(match dist {
        DistName::Dirichlet | DistName::InvertedDirichlet | DistName::AlrDirichlet => {
            let k: AlphaKeys = keys(dist, params)?;
            let alpha = DirichletParams::new(k.alpha)?;
            match dist {
                DistName::Dirichlet => Model::Dirichlet(alpha),
                DistName::InvertedDirichlet => Model::InvertedDirichlet(alpha),
                _ => Model::AlrDirichlet(alpha),
            }
        }
        DistName::Gamma => {
            let k: GammaKeys = keys(dist, params)?;
            Model::Gamma { shape: k.shape, scale: k.scale }
        }
        DistName::Poisson => {
            let k: PoissonKeys = keys(dist, params)?;
            Model::Poisson { rate: k.rate }
        }
        DistName::NegativeBinomial => {
            let k: NbKeys = keys(dist, params)?;
            let p = match (k.p, k.theta) {
                (Some(p), None) => p,
                (None, Some(theta)) => theta / (1.0 + theta),
                _ => {
                    return Err(CliError::Usage(
                        "negative-binomial needs R and exactly one of p, theta".into(),
                    ))
                }
            };
            Model::NegativeBinomial { total_shape: k.total_shape, p }
        }
        DistName::Multinomial => {
            let k: MultinomialKeys = keys(dist, params)?;
            Model::Multinomial { m: k.m, probs: Composition::new(k.probs)? }
        }
        DistName::DirichletMultinomial => {
            let k: DmKeys = keys(dist, params)?;
            Model::DirichletMultinomial { m: k.m, shapes: DirichletParams::new(k.r)? }
        }
        DistName::BetaBinomial => {
            let k: BbKeys = keys(dist, params)?;
            Model::BetaBinomial(BetaBinomialParams::new(k.a, k.b, k.m)?)
        }
        DistName::NormalizedNb => {
            let k: NormalizedNbKeys = keys(dist, params)?;
            let params = GammaMixtureParams::new(k.shapes, k.scale)?;
            if k.component >= params.len() {
                return Err(CliError::Usage(format!(
                    "component {} out of range for {} shapes",
                    k.component,
                    params.len()
                )));
            }
            Model::NormalizedNb { params, component: k.component }
        }
    })
}
