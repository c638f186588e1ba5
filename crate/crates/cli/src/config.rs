//! The run configuration: one TOML file, strictly validated.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sobe_core::boundary::BoundaryTriple;
use sobe_core::estimates::SweepConfig;
use sobe_core::io::read_boundary_csv_path;
use sobe_core::series::Profile;
use sobe_core::solver::{ProblemData, SolverConfig};
use std::path::{Path, PathBuf};

use crate::Failure;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub data: DataConfig,
    pub sweep: SweepConfig,
    pub verify: VerifyConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    /// `u(x, 0)` on `x ≥ 0`.
    pub phi: Profile,
    /// `u_t(x, 0) = ψ''(x)`.
    pub psi: Profile,
    pub boundary: BoundaryData,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            phi: Profile::Zero,
            psi: Profile::Zero,
            boundary: BoundaryData::default(),
        }
    }
}

/// Lateral data as named profiles, or a CSV file with columns `t,h1,h2,h3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundaryData {
    pub h1: Profile,
    pub h2: Profile,
    pub h3: Profile,
    pub csv: Option<PathBuf>,
}

impl Default for BoundaryData {
    fn default() -> Self {
        Self {
            h1: Profile::Zero,
            h2: Profile::Zero,
            h3: Profile::Zero,
            csv: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Random `(α, β, ρ)` draws of the root suite.
    pub root_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { root_samples: 1000 }
    }
}

impl RunConfig {
    /// Reads and validates `path`; without a path the defaults are used.
    /// A relative boundary CSV path is resolved against the config directory.
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        if !path.is_file() {
            return Err(Failure::config(format!("config not found: {}", path.display())));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| Failure::config(format!("invalid config {}: {e}", path.display())))?;
        if let Some(csv) = &cfg.data.boundary.csv {
            if csv.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.data.boundary.csv = Some(base.join(csv));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        self.solver.validate().map_err(Failure::from)?;
        self.sweep.validate().map_err(Failure::from)?;
        let b = &self.data.boundary;
        if b.csv.is_some() && [&b.h1, &b.h2, &b.h3].iter().any(|h| !h.is_zero()) {
            return Err(Failure::config(
                "data.boundary: give either csv or h1/h2/h3 profiles, not both".into(),
            ));
        }
        for (name, p) in [("phi", &self.data.phi), ("psi", &self.data.psi)] {
            p.validate_shape()
                .map_err(|e| Failure::config(format!("data.{name}: {e}")))?;
        }
        for (name, p) in [("h1", &b.h1), ("h2", &b.h2), ("h3", &b.h3)] {
            p.validate()
                .map_err(|e| Failure::config(format!("data.boundary.{name}: {e}")))?;
        }
        if self.verify.root_samples == 0 {
            return Err(Failure::config("verify.root_samples must be positive".into()));
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<ProblemData, Failure> {
        let b = &self.data.boundary;
        let h = match &b.csv {
            Some(p) => read_boundary_csv_path(p).map_err(|e| Failure::config(format!("data.boundary.csv: {e}")))?,
            None => [b.h1.clone(), b.h2.clone(), b.h3.clone()],
        };
        Ok(ProblemData {
            phi: self.data.phi.clone(),
            psi: self.data.psi.clone(),
            boundary: BoundaryTriple::new(h[0].clone(), h[1].clone(), h[2].clone(), self.solver.s),
        })
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("configuration serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}
