//! JSON/TOML input files.
//!
//! A file names a lattice either by a Gram matrix or by a standard name, lists
//! named vectors, and optionally the Néron–Severi generators and `Σ`:
//!
//! ```toml
//! kind = "cubic"
//! lattice = "cubic_h4_default"
//! distinguished = "h2"
//! ns = ["h2", [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]]
//! ```
//!
//! Integers may be given as numbers or as decimal strings.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::analytic::ScenarioInput;
use crate::brauer::K3HodgeDatum;
use crate::error::{Error, Result};
use crate::lattice::{self, Lattice, LatticeVector};
use crate::matrix::IntegerMatrix;
use crate::section_ring::AmbientPreset;
use crate::sha::{CubicInput, K3Input};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigKind {
    #[serde(alias = "cubic_fourfold")]
    Cubic,
    #[serde(alias = "k3_linear_system")]
    K3,
}

/// A vector given by name or by coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum VectorRef {
    Name(String),
    Coords(LatticeVector),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Toml,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    pub kind: Option<ConfigKind>,
    /// Standard lattice name, used when `gram` is absent.
    pub lattice: Option<String>,
    pub gram: Option<IntegerMatrix>,
    #[serde(default)]
    pub vectors: BTreeMap<String, LatticeVector>,
    /// `h²` for a cubic, `c₁(L)` for a K3 surface.
    pub distinguished: Option<VectorRef>,
    /// Néron–Severi generators; defaults to the distinguished vector.
    pub ns: Option<Vec<VectorRef>>,
    pub sigma: Option<Vec<VectorRef>>,
    pub defect_general: Option<bool>,
    /// Genus of the K3 linear system.
    pub g: Option<u32>,
}

/// A lattice together with its named vectors, checked for consistency.
#[derive(Clone, Debug)]
pub struct ResolvedLattice {
    pub lattice: Lattice,
    pub vectors: BTreeMap<String, LatticeVector>,
}

impl ResolvedLattice {
    pub fn vector(&self, r: &VectorRef) -> Result<LatticeVector> {
        let v = match r {
            VectorRef::Name(name) => self
                .vectors
                .get(name)
                .cloned()
                .ok_or_else(|| Error::InvalidInput(format!("unknown vector {name:?}")))?,
            VectorRef::Coords(v) => v.clone(),
        };
        check_len(&self.lattice, &v, &format!("{r:?}"))?;
        Ok(v)
    }
}

fn check_len(lat: &Lattice, v: &LatticeVector, what: &str) -> Result<()> {
    if v.len() != lat.rank() {
        return Err(Error::InvalidInput(format!(
            "vector {what} has length {}, lattice has rank {}",
            v.len(),
            lat.rank()
        )));
    }
    Ok(())
}

impl InputConfig {
    pub fn parse(text: &str, format: Format) -> Result<Self> {
        let cfg: Self = match format {
            Format::Json => serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("JSON: {e}")))?,
            Format::Toml => toml::from_str(text).map_err(|e| Error::InvalidInput(format!("TOML: {e}")))?,
        };
        cfg.resolve_lattice()?;
        Ok(cfg)
    }

    /// Reads a file; `.toml` is parsed as TOML and everything else as JSON.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        let format = match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("toml") => Format::Toml,
            _ => Format::Json,
        };
        Self::parse(&text, format)
    }

    fn kind_or(&self, default: ConfigKind) -> ConfigKind {
        self.kind.unwrap_or(default)
    }

    /// The lattice named by `gram` or `lattice`, falling back to the default for `kind`.
    pub fn resolve_lattice(&self) -> Result<ResolvedLattice> {
        let (lattice, mut vectors) = match (&self.gram, &self.lattice) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidInput("give either `gram` or `lattice`, not both".into()))
            }
            (Some(g), None) => (Lattice::new(g.clone())?, BTreeMap::new()),
            (None, Some(name)) => (lattice::standard_lattice(name)?, lattice::standard_vectors(name)),
            (None, None) => match self.kind_or(ConfigKind::Cubic) {
                ConfigKind::Cubic => {
                    (lattice::cubic_h4_default(), lattice::standard_vectors("cubic_h4_default"))
                }
                ConfigKind::K3 => (lattice::k3_lattice(), BTreeMap::new()),
            },
        };
        if self.kind == Some(ConfigKind::K3) && self.gram.is_none() && lattice.rank() == 22 {
            if let Some(g) = self.g {
                vectors.entry("L".to_string()).or_insert_with(|| lattice::k3_polarization(g));
            }
        }
        for (name, v) in &self.vectors {
            check_len(&lattice, v, name)?;
            vectors.insert(name.clone(), v.clone());
        }
        let resolved = ResolvedLattice { lattice, vectors };
        for r in self.ns.iter().flatten().chain(self.sigma.iter().flatten()).chain(self.distinguished.iter()) {
            resolved.vector(r)?;
        }
        Ok(resolved)
    }

    fn distinguished(&self, lat: &ResolvedLattice, kind: ConfigKind) -> Result<LatticeVector> {
        let default = match kind {
            ConfigKind::Cubic => "h2",
            ConfigKind::K3 => "L",
        };
        let r = self.distinguished.clone().unwrap_or_else(|| VectorRef::Name(default.to_string()));
        lat.vector(&r)
    }

    fn ns(&self, lat: &ResolvedLattice, distinguished: &LatticeVector) -> Result<Vec<LatticeVector>> {
        match &self.ns {
            Some(list) => list.iter().map(|r| lat.vector(r)).collect(),
            None => Ok(vec![distinguished.clone()]),
        }
    }

    fn datum(&self, kind: ConfigKind) -> Result<(K3HodgeDatum, LatticeVector)> {
        let lat = self.resolve_lattice()?;
        let d = self.distinguished(&lat, kind)?;
        let ns = self.ns(&lat, &d)?;
        let weight = match kind {
            ConfigKind::Cubic => 2,
            ConfigKind::K3 => 1,
        };
        Ok((K3HodgeDatum::new(lat.lattice, ns, weight)?, d))
    }

    fn expect_kind(&self, kind: ConfigKind) -> Result<()> {
        match self.kind {
            Some(k) if k != kind => Err(Error::InvalidInput(format!("config kind is {k:?}, expected {kind:?}"))),
            _ => Ok(()),
        }
    }

    pub fn cubic_input(&self) -> Result<CubicInput> {
        self.expect_kind(ConfigKind::Cubic)?;
        let (hodge, h2) = self.datum(ConfigKind::Cubic)?;
        let lat = self.resolve_lattice()?;
        let mut input = match &self.sigma {
            Some(s) => {
                let sigma = s.iter().map(|r| lat.vector(r)).collect::<Result<Vec<_>>>()?;
                CubicInput::with_sigma(hodge, h2, sigma)
            }
            None => CubicInput::new(hodge, h2),
        };
        if let Some(dg) = self.defect_general {
            input.defect_general = dg;
        }
        Ok(input)
    }

    pub fn k3_input(&self) -> Result<K3Input> {
        self.expect_kind(ConfigKind::K3)?;
        let cfg = Self { kind: Some(ConfigKind::K3), ..self.clone() };
        let (hodge, l) = cfg.datum(ConfigKind::K3)?;
        Ok(K3Input { hodge, l })
    }

    pub fn scenario_input(&self) -> Result<ScenarioInput> {
        self.expect_kind(ConfigKind::Cubic)?;
        let (datum, h2) = self.datum(ConfigKind::Cubic)?;
        Ok(ScenarioInput { datum, h2 })
    }

    /// The ambient preset; a K3 genus is read from `g` or from `L²`.
    pub fn preset(&self) -> Result<AmbientPreset> {
        let kind = self.kind_or(ConfigKind::Cubic);
        let lat = self.resolve_lattice()?;
        let d = self.distinguished(&lat, kind)?;
        match kind {
            ConfigKind::Cubic => AmbientPreset::cubic(lat.lattice, d),
            ConfigKind::K3 => {
                let sq = lat.lattice.norm(&d)?;
                let from_norm = u32::try_from(&sq / 2 + 1).map_err(|_| Error::BadPreset(format!("L² = {sq}")))?;
                let g = self.g.unwrap_or(from_norm);
                AmbientPreset::k3(lat.lattice, d, g)
            }
        }
    }
}

impl FromStr for InputConfig {
    type Err = Error;

    /// Parses JSON if the text starts with `{`, TOML otherwise.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            Self::parse(s, Format::Json)
        } else {
            Self::parse(s, Format::Toml)
        }
    }
}

/// A list of vectors for the Fujiki checks, with an optional Gram matrix.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorsFile {
    pub lattice: Option<String>,
    pub gram: Option<IntegerMatrix>,
    pub vectors: Vec<LatticeVector>,
    pub theta: Option<LatticeVector>,
    pub eta: Option<LatticeVector>,
}

impl VectorsFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        let is_toml = path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        let file: Self = if is_toml {
            toml::from_str(&text).map_err(|e| Error::InvalidInput(format!("TOML: {e}")))?
        } else {
            serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("JSON: {e}")))?
        };
        if let Some(lat) = file.lattice_or_none()? {
            for (i, v) in file.vectors.iter().chain(file.theta.iter()).chain(file.eta.iter()).enumerate() {
                check_len(&lat, v, &format!("#{i}"))?;
            }
        }
        Ok(file)
    }

    /// The lattice given in the file, if any.
    pub fn lattice_or_none(&self) -> Result<Option<Lattice>> {
        match (&self.gram, &self.lattice) {
            (Some(_), Some(_)) => Err(Error::InvalidInput("give either `gram` or `lattice`, not both".into())),
            (Some(g), None) => Ok(Some(Lattice::new(g.clone())?)),
            (None, Some(name)) => Ok(Some(lattice::standard_lattice(name)?)),
            (None, None) => Ok(None),
        }
    }
}
