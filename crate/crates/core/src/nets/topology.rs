use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Mlp,
    Conv,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Erf,
    Tanh,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Erf => libm::erf(x),
            Activation::Tanh => libm::tanh(x),
        }
    }

    /// Beyond this magnitude the activation equals ±1 in double precision.
    pub fn saturation(self) -> f64 {
        match self {
            Activation::Erf => 6.0,
            Activation::Tanh => 19.5,
        }
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "erf" => Ok(Activation::Erf),
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::Config(format!("unknown activation `{other}` (expected erf or tanh)"))),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Erf => "erf",
            Activation::Tanh => "tanh",
        })
    }
}

/// Linear layer family and its shape.
///
/// `kernel_size` is only meaningful for [`TopologyKind::Conv`];
/// `diagonal_stages` and `final_fourier` only for [`TopologyKind::Structured`].
/// The named presets (`fdf`, `fdfd`) fix the latter two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TopologyConfig {
    pub kind: TopologyKind,
    pub width: usize,
    pub kernel_size: usize,
    pub diagonal_stages: usize,
    pub final_fourier: bool,
    pub activation: Activation,
}

impl TopologyConfig {
    pub fn mlp(width: usize) -> Self {
        Self {
            kind: TopologyKind::Mlp,
            width,
            kernel_size: width,
            diagonal_stages: 0,
            final_fourier: false,
            activation: Activation::Erf,
        }
    }

    pub fn conv(width: usize, kernel_size: usize) -> Self {
        Self { kind: TopologyKind::Conv, kernel_size, ..Self::mlp(width) }
    }

    /// `Re(F D F)`: one diagonal stage followed by a final transform.
    pub fn fdf(width: usize) -> Self {
        Self { kind: TopologyKind::Structured, diagonal_stages: 1, final_fourier: true, ..Self::mlp(width) }
    }

    /// `Re(F D F D)`: two diagonal stages, no final transform.
    pub fn fdfd(width: usize) -> Self {
        Self { kind: TopologyKind::Structured, diagonal_stages: 2, final_fourier: false, ..Self::mlp(width) }
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    /// Parses the CLI topology names `mlp`, `conv`, `fdf`, `fdfd`.
    pub fn from_name(name: &str, width: usize, kernel_size: Option<usize>) -> Result<Self> {
        let cfg = match name {
            "mlp" => Self::mlp(width),
            "conv" => Self::conv(width, kernel_size.unwrap_or(width)),
            "fdf" => Self::fdf(width),
            "fdfd" => Self::fdfd(width),
            other => {
                return Err(Error::Config(format!("unknown topology `{other}` (expected mlp, conv, fdf or fdfd)")))
            }
        };
        if kernel_size.is_some() && cfg.kind != TopologyKind::Conv {
            return Err(Error::Config(format!("kernel size only applies to conv, not {name}")));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Short name used in file metadata; structured variants outside the two
    /// presets are reported as `structured`.
    pub fn name(&self) -> &'static str {
        match self.kind {
            TopologyKind::Mlp => "mlp",
            TopologyKind::Conv => "conv",
            TopologyKind::Structured => match (self.diagonal_stages, self.final_fourier) {
                (1, true) => "fdf",
                (2, false) => "fdfd",
                _ => "structured",
            },
        }
    }

    /// True for the two structured combinations used in the reference
    /// experiments; other combinations run but are flagged.
    pub fn is_reference_structured(&self) -> bool {
        self.kind != TopologyKind::Structured || self.name() != "structured"
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 2 {
            return Err(Error::Config(format!("width must be at least 2, got {}", self.width)));
        }
        match self.kind {
            TopologyKind::Conv if self.kernel_size == 0 || self.kernel_size > self.width => {
                Err(Error::Config(format!("kernel size must be in 1..={}, got {}", self.width, self.kernel_size)))
            }
            TopologyKind::Structured if !matches!(self.diagonal_stages, 1 | 2) => {
                Err(Error::Config(format!("diagonal stages must be 1 or 2, got {}", self.diagonal_stages)))
            }
            _ => Ok(()),
        }
    }
}
