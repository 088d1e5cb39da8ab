use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use jfilter::projection::{MeasurementMode, ProjectionSchedule, Target, ORACLE_LIMIT};
use jfilter::simulator::{Backend, Layout};
use jfilter::spmodel::{build_space, generate_deformation, load_deformation, DeformedBasis, ModelSpace, ShellSpec, Species};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceSpec {
    /// `"sd"` (protons and neutrons), `"sd-proton"` or `"sd-neutron"`.
    Named(String),
    Shells(Vec<ShellSpec>),
}

impl SpaceSpec {
    pub fn build(&self) -> Result<ModelSpace> {
        match self {
            SpaceSpec::Named(name) => match name.as_str() {
                "sd" => Ok(ModelSpace::sd_shell(&[Species::Proton, Species::Neutron])),
                "sd-proton" => Ok(ModelSpace::sd_shell(&[Species::Proton])),
                "sd-neutron" => Ok(ModelSpace::sd_shell(&[Species::Neutron])),
                other => bail!("unknown model space `{other}` (expected sd, sd-proton, sd-neutron or a shell list)"),
            },
            SpaceSpec::Shells(list) => Ok(build_space(list)?),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DeformationSource {
    #[default]
    Spherical,
    Generate {
        seed: u64,
        strength: f64,
    },
    /// A species document or a manifest, relative to the config file.
    File {
        path: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    #[default]
    Auto,
    Full,
    Sector,
}

impl BackendChoice {
    pub fn resolve(self) -> Backend {
        match self {
            BackendChoice::Full => Backend::Full,
            BackendChoice::Auto | BackendChoice::Sector => Backend::Sector,
        }
    }
}

impl std::str::FromStr for BackendChoice {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(BackendChoice::Auto),
            "full" => Ok(BackendChoice::Full),
            "sector" => Ok(BackendChoice::Sector),
            other => bail!("unknown backend `{other}` (auto, full, sector)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetName {
    J0,
    Jhalf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub n_proj: usize,
    pub n_iter: usize,
    #[serde(default = "default_target")]
    pub target: TargetName,
    #[serde(default = "default_sign")]
    pub sign: i8,
}

fn default_target() -> TargetName {
    TargetName::J0
}

fn default_sign() -> i8 {
    1
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { n_proj: 6, n_iter: 6, target: TargetName::J0, sign: 1 }
    }
}

impl ScheduleConfig {
    pub fn build(&self) -> Result<ProjectionSchedule> {
        let target = match self.target {
            TargetName::J0 => Target::J0,
            TargetName::Jhalf => Target::Jhalf { sign: self.sign },
        };
        Ok(ProjectionSchedule::for_target(target, self.n_proj, self.n_iter)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// `project` exits 0 only if the final `<J^2>` (minus 3/4 for a
    /// `J = 1/2` target) is at most this.
    #[serde(default = "default_j2_threshold")]
    pub j2_threshold: f64,
    /// Relative residual accepted from every KHK fit.
    #[serde(default = "default_residual")]
    pub residual: f64,
}

fn default_j2_threshold() -> f64 {
    1e-6
}

fn default_residual() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { j2_threshold: default_j2_threshold(), residual: default_residual() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourcesConfig {
    /// `(N_proj, N_iter)` rows of the table.
    #[serde(default = "default_partitions")]
    pub partitions: Vec<(usize, usize)>,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub include_final_deformed_return: bool,
    #[serde(default)]
    pub trial_in_spherical_basis: bool,
    /// Pauli-sum text file whose Trotter step is costed instead of the
    /// deformed `J^2`.
    #[serde(default)]
    pub operator_file: Option<PathBuf>,
}

fn default_partitions() -> Vec<(usize, usize)> {
    vec![(4, 10), (6, 6), (8, 5)]
}

fn default_epsilons() -> Vec<f64> {
    vec![1e-3]
}

impl Default for ResourcesConfig {
    fn default() -> Self {
        ResourcesConfig {
            partitions: default_partitions(),
            epsilons: default_epsilons(),
            include_final_deformed_return: false,
            trial_in_spherical_basis: false,
            operator_file: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_space")]
    pub model_space: SpaceSpec,
    #[serde(default)]
    pub deformation: DeformationSource,
    /// Particles per species, filling the lowest deformed modes. Empty
    /// keeps the occupations stored in a deformation file.
    #[serde(default)]
    pub occupations: BTreeMap<Species, usize>,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default = "default_mode")]
    pub mode: MeasurementMode,
    #[serde(default)]
    pub backend: BackendChoice,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Optimizer seed for the KHK fits.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub return_deformed: bool,
    #[serde(default)]
    pub resources: ResourcesConfig,
}

fn default_space() -> SpaceSpec {
    SpaceSpec::Named("sd".into())
}

fn default_mode() -> MeasurementMode {
    MeasurementMode::Postselect
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_seed() -> u64 {
    1
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

/// 1-based line of the first occurrence of `"key"` in the source.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

/// A parsed config plus everything needed to report errors against it.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub source: Option<(PathBuf, String)>,
}

impl LoadedConfig {
    pub fn defaults() -> Self {
        LoadedConfig { config: RunConfig::default(), source: None }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text).map_err(|e| {
            anyhow!("{}:{}:{}: {}", path.display(), e.line(), e.column(), e)
        })?;
        Ok(LoadedConfig { config, source: Some((path.to_path_buf(), text)) })
    }

    /// Error located at the line that sets `key`, when known.
    pub fn at(&self, key: &str, message: impl std::fmt::Display) -> anyhow::Error {
        self.at_first(&[key], message)
    }

    /// Like [`LoadedConfig::at`], using the first of `keys` present.
    pub fn at_first(&self, keys: &[&str], message: impl std::fmt::Display) -> anyhow::Error {
        match &self.source {
            Some((path, text)) => match keys.iter().find_map(|k| line_of(text, k)) {
                Some(line) => anyhow!("{}:{line}: {message}", path.display()),
                None => anyhow!("{}: {message}", path.display()),
            },
            None => anyhow!("{message}"),
        }
    }

    /// Resolves a relative `output_dir` against the config file's directory.
    pub fn anchor_output(&mut self) {
        if self.config.output_dir.is_relative() {
            self.config.output_dir = self.base_dir().join(&self.config.output_dir);
        }
    }

    fn base_dir(&self) -> PathBuf {
        self.source.as_ref().and_then(|(p, _)| p.parent().map(Path::to_path_buf)).unwrap_or_default()
    }

    pub fn space(&self) -> Result<ModelSpace> {
        self.config.model_space.build().map_err(|e| self.at("model_space", e))
    }

    pub fn basis(&self, space: &ModelSpace) -> Result<DeformedBasis<f64>> {
        let mut basis = match &self.config.deformation {
            DeformationSource::Spherical => DeformedBasis::identity(space),
            DeformationSource::Generate { seed, strength } => {
                if !(*strength >= 0.0) {
                    return Err(self.at("strength", format!("deformation strength must be non-negative, got {strength}")));
                }
                generate_deformation(space, *seed, *strength)
            }
            DeformationSource::File { path } => {
                let full = self.base_dir().join(path);
                load_deformation(&full).with_context(|| format!("loading deformation {}", full.display()))?
            }
        };
        for (&species, &count) in &self.config.occupations {
            basis.occupy_lowest(species, count).map_err(|e| self.at("occupations", e))?;
        }
        basis.check_against(space).map_err(|e| self.at("deformation", e))?;
        Ok(basis)
    }

    pub fn schedule(&self, basis: &DeformedBasis<f64>) -> Result<ProjectionSchedule> {
        let schedule = self.config.schedule.build().map_err(|e| self.at("schedule", e))?;
        let total: usize = basis.particle_numbers().iter().sum();
        let want_even = schedule.target == Target::J0;
        if (total % 2 == 0) != want_even {
            let what = if want_even { "J0 needs an even" } else { "jhalf needs an odd" };
            return Err(self.at_first(&["target", "occupations", "deformation"], format!("{what} total particle number, got {total}")));
        }
        Ok(schedule)
    }

    pub fn oracle_fits(&self, space: &ModelSpace, basis: &DeformedBasis<f64>) -> bool {
        let counts: Vec<usize> = basis.particle_numbers();
        Layout::sector(space, &counts).map(|l| l.dim() <= ORACLE_LIMIT).unwrap_or(false)
    }
}
