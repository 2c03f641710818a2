//! Parsing of command-line values and TOML configuration files.

use std::path::Path;

use fce_core::constraints::Enforcement;
use fce_core::field::FceKind;
use fce_core::solver::{CollocationKind, RowWeights, ScalingSpec};
use fce_core::{Error, Result};
use serde::Deserialize;

use crate::cases::ScalingChoice;
use crate::runner::Overrides;
use crate::sweep::SweepAxis;

/// Settings read from a configuration file. Every key is optional and
/// command-line flags take precedence.
///
/// ```toml
/// case = "helmholtz2d"
/// fce = "c0"
/// elements = "8x8"
/// order = 6
/// colloc = "gll"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub case: Option<String>,
    pub fce: Option<String>,
    pub elements: Option<String>,
    pub order: Option<usize>,
    pub edge_order: Option<usize>,
    pub points: Option<usize>,
    pub colloc: Option<String>,
    pub scaling: Option<String>,
    pub relative: Option<String>,
    pub weights: Option<String>,
    pub axis: Option<String>,
    pub values: Option<Vec<usize>>,
    pub out: Option<String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Overrides described by the file.
    pub fn overrides(&self) -> Result<Overrides> {
        let mut o = Overrides::default();
        if let Some(s) = &self.fce {
            o.kind = Some(parse_kind(s)?);
        }
        if let Some(s) = &self.elements {
            let (nx, ny) = parse_elements(s)?;
            o.nx = Some(nx);
            o.ny = ny;
        }
        o.p = self.order;
        o.m = self.edge_order;
        o.q = self.points;
        if let Some(s) = &self.colloc {
            o.colloc = Some(parse_colloc(s)?);
        }
        if let Some(s) = &self.scaling {
            o.scaling = Some(parse_scaling(s)?);
        }
        if let Some(s) = &self.relative {
            o.relative = Some(parse_relative(s)?);
        }
        if let Some(s) = &self.weights {
            o.weights = Some(parse_weights(s)?);
        }
        Ok(o)
    }
}

/// Fills unset fields of `o` from `base`.
pub fn merge(o: Overrides, base: Overrides) -> Overrides {
    Overrides {
        kind: o.kind.or(base.kind),
        nx: o.nx.or(base.nx),
        ny: o.ny.or(base.ny),
        p: o.p.or(base.p),
        m: o.m.or(base.m),
        q: o.q.or(base.q),
        colloc: o.colloc.or(base.colloc),
        scaling: o.scaling.or(base.scaling),
        relative: o.relative.or(base.relative),
        weights: o.weights.or(base.weights),
    }
}

pub fn parse_kind(s: &str) -> Result<FceKind> {
    FceKind::parse(s).ok_or_else(|| Error::Config(format!("unknown FCE kind '{s}' (c1, c0, mixed-x, mixed-y, nc)")))
}

pub fn parse_colloc(s: &str) -> Result<CollocationKind> {
    CollocationKind::parse(s).ok_or_else(|| Error::Config(format!("unknown collocation '{s}' (gll, uniform)")))
}

pub fn parse_axis(s: &str) -> Result<SweepAxis> {
    SweepAxis::parse(s).ok_or_else(|| Error::Config(format!("unknown sweep axis '{s}' (h, p)")))
}

pub fn parse_weights(s: &str) -> Result<RowWeights> {
    RowWeights::parse(s)
        .ok_or_else(|| Error::Config(format!("unknown row weighting '{s}' (unit, quadrature, quadrature-jacobian)")))
}

pub fn parse_relative(s: &str) -> Result<Enforcement> {
    match s {
        "exact" => Ok(Enforcement::Exact),
        "approx" | "lsq" => Ok(Enforcement::LeastSquares),
        _ => Err(Error::Config(format!("unknown relative mode '{s}' (exact, approx)"))),
    }
}

/// `"N"` or `"NxxNy"`.
pub fn parse_elements(s: &str) -> Result<(usize, Option<usize>)> {
    let bad = || Error::Config(format!("bad element count '{s}' (expected N or NxM)"));
    let num = |t: &str| t.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(bad);
    match s.split_once('x') {
        Some((a, b)) => Ok((num(a)?, Some(num(b)?))),
        None => Ok((num(s)?, None)),
    }
}

/// `auto`, `none`, or `sigma,sigma0,sigma1`.
pub fn parse_scaling(s: &str) -> Result<ScalingChoice> {
    match s {
        "auto" => Ok(ScalingChoice::Auto),
        "none" => Ok(ScalingChoice::None),
        _ => {
            let v: Vec<f64> = s
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Config(format!("bad scaling '{s}' (auto, none or s,s0,s1)")))?;
            if v.len() != 3 {
                return Err(Error::Config(format!("scaling needs three values, got {}", v.len())));
            }
            Ok(ScalingChoice::Custom(ScalingSpec::new(v[0], v[1], v[2])?))
        }
    }
}

/// Comma-separated list of positive integers.
pub fn parse_values(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad sweep value '{t}'"))))
        .collect()
}
