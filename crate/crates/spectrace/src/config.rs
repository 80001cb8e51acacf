//! Job configuration: JSON schema, flag overrides and validation.

use std::path::Path;

use serde::{Deserialize, Serialize};
use spectrace_core::{
    Complex64, CouplingModel, PathSpec, Region, RootConfig, SampledPotential, Segment,
    StepPotential, TraceConfig,
};

use crate::CliError;

/// Complex number as `[re, im]`.
pub type Pair = [f64; 2];

pub fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Find,
    Trace,
    Scan,
    Count,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Find => "find",
            Command::Trace => "trace",
            Command::Scan => "scan",
            Command::Count => "count",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum PotentialSpec {
    Step { segments: Vec<(f64, Pair)> },
    Sampled { a: f64, values: Vec<Pair> },
}

impl PotentialSpec {
    pub fn unit_well(v: f64) -> Self {
        PotentialSpec::Step {
            segments: vec![(1.0, [v, 0.0])],
        }
    }

    pub fn step(&self, field: &'static str) -> Result<Option<StepPotential>, CliError> {
        match self {
            PotentialSpec::Step { segments } => {
                let segs = segments.iter().map(|&(l, v)| Segment::new(l, complex(v))).collect();
                StepPotential::new(segs)
                    .map(Some)
                    .map_err(|e| CliError::config(field, e.to_string()))
            }
            PotentialSpec::Sampled { .. } => Ok(None),
        }
    }

    pub fn sampled(&self, field: &'static str) -> Result<Option<SampledPotential>, CliError> {
        match self {
            PotentialSpec::Sampled { a, values } => {
                SampledPotential::new(*a, values.iter().map(|&v| complex(v)).collect())
                    .map(Some)
                    .map_err(|e| CliError::config(field, e.to_string()))
            }
            PotentialSpec::Step { .. } => Ok(None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathJson {
    pub vertices: Vec<Pair>,
    #[serde(default = "default_steps_per_edge")]
    pub steps_per_edge: usize,
}

fn default_steps_per_edge() -> usize {
    PathSpec::DEFAULT_STEPS_PER_EDGE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanJson {
    pub from: f64,
    pub to: f64,
    pub samples: usize,
}

/// Tolerances; anything omitted keeps its library default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub newton_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collision_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_step_halvings: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_separation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedClass {
    Eigenvalue,
    Resonance,
    Antibound,
}

/// On-disk job description. The report of every run echoes the resolved
/// form, which reproduces the run when fed back through `--config`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PotentialSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathJson>,
    /// Starting λ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<Pair>,
    /// Starting κ, resolved to λ on the sheet named by `seed_class`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_kappa: Option<Pair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_class: Option<SeedClass>,
    /// `[re0, im0, re1, im1]`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanJson>,
    /// RK4 steps across the support for sampled potentials.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integration_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub overrides: Overrides,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_prefix: Option<String>,
}

fn is_default(o: &Overrides) -> bool {
    *o == Overrides::default()
}

impl JobConfig {
    /// Reads a job file, or the `config` block of an earlier report.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
        let value = match value {
            // a report: rerun its resolved config
            serde_json::Value::Object(mut map) if map.contains_key("config") => map.remove("config").unwrap(),
            v => v,
        };
        serde_json::from_value(value).map_err(|e| {
            let message = e.to_string();
            CliError::config(field_of(&message), message)
        })
    }

    pub fn trace_config(&self) -> Result<TraceConfig, CliError> {
        let d = TraceConfig::default();
        let o = &self.overrides;
        let cfg = TraceConfig {
            band: o.band.unwrap_or(d.band),
            newton_tol: o.newton_tol.unwrap_or(d.newton_tol),
            collision_threshold: o.collision_threshold.unwrap_or(d.collision_threshold),
            max_step_halvings: o.max_step_halvings.unwrap_or(d.max_step_halvings),
            divergence_radius: o.divergence_radius.unwrap_or(d.divergence_radius),
        };
        cfg.validate().map_err(|e| CliError::config("overrides", e.to_string()))?;
        Ok(cfg)
    }

    pub fn root_config(&self) -> Result<RootConfig, CliError> {
        let d = RootConfig::default();
        let o = &self.overrides;
        let cfg = RootConfig {
            newton_tol: o.newton_tol.unwrap_or(d.newton_tol),
            max_iter: o.max_iter.unwrap_or(d.max_iter),
            min_separation: o.min_separation.unwrap_or(d.min_separation),
            max_depth: o.max_depth.unwrap_or(d.max_depth),
        };
        cfg.validate().map_err(|e| CliError::config("overrides", e.to_string()))?;
        Ok(cfg)
    }

    pub fn region(&self) -> Result<Region, CliError> {
        let r = self
            .region
            .ok_or_else(|| CliError::config("region", "required for this command"))?;
        Region::from_bounds(r[0], r[1], r[2], r[3]).map_err(|e| CliError::config("region", e.to_string()))
    }

    pub fn potential(&self) -> Result<&PotentialSpec, CliError> {
        self.potential
            .as_ref()
            .ok_or_else(|| CliError::config("potential", "required (or pass --well)"))
    }

    pub fn path(&self) -> Result<PathSpec, CliError> {
        let p = self.path.as_ref().ok_or_else(|| CliError::config("path", "required for trace"))?;
        PathSpec::new(p.vertices.iter().map(|&v| complex(v)).collect(), p.steps_per_edge)
            .map_err(|e| CliError::config("path", e.to_string()))
    }

    pub fn model(&self) -> Result<CouplingModel, CliError> {
        let v0 = self.potential()?;
        let v1 = self
            .perturbation
            .as_ref()
            .ok_or_else(|| CliError::config("perturbation", "required for trace"))?;
        let mismatch = |e: spectrace_core::TraceError| CliError::config("perturbation", e.to_string());
        match (v0.step("potential")?, v1.step("perturbation")?) {
            (Some(a), Some(b)) => CouplingModel::from_steps(&a, &b).map_err(mismatch),
            (None, None) => {
                let a = v0.sampled("potential")?.expect("sampled");
                let b = v1.sampled("perturbation")?.expect("sampled");
                CouplingModel::from_samples(&a, &b, self.integration_steps).map_err(mismatch)
            }
            _ => Err(CliError::config("perturbation", "must be the same kind as potential")),
        }
    }

    /// `V0` alone, for jobs that never move the coupling.
    pub fn static_model(&self) -> Result<CouplingModel, CliError> {
        if self.perturbation.is_some() {
            return self.model();
        }
        let v0 = self.potential()?;
        let mismatch = |e: spectrace_core::TraceError| CliError::config("potential", e.to_string());
        if let Some(p) = v0.step("potential")? {
            let zero = StepPotential::new(
                p.segments().iter().map(|s| Segment::new(s.length, Complex64::new(0.0, 0.0))).collect(),
            )
            .map_err(|e| CliError::config("potential", e.to_string()))?;
            return CouplingModel::from_steps(&p, &zero).map_err(mismatch);
        }
        let p = v0.sampled("potential")?.expect("sampled");
        let zero = SampledPotential::new(p.support_end(), vec![Complex64::new(0.0, 0.0); p.len()])
            .map_err(|e| CliError::config("potential", e.to_string()))?;
        CouplingModel::from_samples(&p, &zero, self.integration_steps).map_err(mismatch)
    }

    /// Seed as λ, resolving `seed_kappa` when no λ is given.
    pub fn seed(&self) -> Result<Complex64, CliError> {
        if let Some(s) = self.seed {
            if !(s[0].is_finite() && s[1].is_finite()) {
                return Err(CliError::config("seed", "must be finite"));
            }
            return Ok(complex(s));
        }
        let k = self
            .seed_kappa
            .ok_or_else(|| CliError::config("seed", "trace needs seed or seed_kappa"))?;
        let class = self
            .seed_class
            .ok_or_else(|| CliError::config("seed_class", "required with seed_kappa"))?;
        let root = (-complex(k)).sqrt();
        let root = if root.re < 0.0 { -root } else { root };
        Ok(match class {
            SeedClass::Eigenvalue => root,
            SeedClass::Resonance | SeedClass::Antibound => -root,
        })
    }
}

/// The field a serde message complains about: the first backquoted name,
/// which for `unknown field` errors is the stray key itself.
fn field_of(message: &str) -> String {
    message
        .split('`')
        .nth(1)
        .filter(|f| !f.is_empty())
        .unwrap_or("config")
        .to_string()
}
