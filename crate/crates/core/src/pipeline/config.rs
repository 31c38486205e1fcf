use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::LrConfig;
use crate::cluster::CutCriterion;
use crate::error::{Error, Result};
use crate::forest::Criterion;
use crate::omics_io::{OmicKind, OmicSynthSpec, SampleType, SyntheticSpec};
use crate::report::ImportanceMode;
use crate::scaling::ScalerKind;
use crate::stats::{tcga_scheme, PValueWindow, TMode, ALPHA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Qnn256,
    Qnn64,
    Qnn32,
    Lr,
    Mlp,
    Rf,
}

impl ModelChoice {
    pub const ALL: [ModelChoice; 6] = [
        ModelChoice::Qnn256,
        ModelChoice::Qnn64,
        ModelChoice::Qnn32,
        ModelChoice::Lr,
        ModelChoice::Mlp,
        ModelChoice::Rf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelChoice::Qnn256 => "qnn256",
            ModelChoice::Qnn64 => "qnn64",
            ModelChoice::Qnn32 => "qnn32",
            ModelChoice::Lr => "lr",
            ModelChoice::Mlp => "mlp",
            ModelChoice::Rf => "rf",
        }
    }

    pub fn is_qnn(self) -> bool {
        matches!(
            self,
            ModelChoice::Qnn256 | ModelChoice::Qnn64 | ModelChoice::Qnn32
        )
    }

    /// Input width: fixed for the QNN presets, configurable for baselines.
    pub fn width(self, baseline_width: usize) -> usize {
        match self {
            ModelChoice::Qnn256 => 256,
            ModelChoice::Qnn64 => 64,
            ModelChoice::Qnn32 => 32,
            _ => baseline_width,
        }
    }
}

impl fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelChoice::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown model {s:?}")))
    }
}

/// User-supplied omic files; several paths are concatenated as cohorts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmicInput {
    pub kind: OmicKind,
    pub paths: Vec<PathBuf>,
    #[serde(default)]
    pub unit: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputsConfig {
    /// Empty means: use the files written by the `synth` stage.
    pub omics: Vec<OmicInput>,
    pub clinical: Option<PathBuf>,
    pub impute_mean: bool,
    pub sample_type: Option<SampleType>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmicScheme {
    pub kind: OmicKind,
    /// `"tcga"` for the built-in windows; otherwise `windows` is used.
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub windows: Vec<PValueWindow>,
}

impl OmicScheme {
    pub fn resolve(&self) -> Result<Vec<PValueWindow>> {
        match self.preset.as_deref() {
            Some("tcga") => Ok(tcga_scheme(self.kind)),
            Some(other) => Err(Error::Config(format!("unknown p-value scheme {other:?}"))),
            None if self.windows.is_empty() => Err(Error::Config(format!(
                "{}: empty p-value scheme",
                self.kind
            ))),
            None => Ok(self.windows.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineerConfig {
    pub t_mode: TMode,
    pub alpha: f64,
    pub schemes: Vec<OmicScheme>,
}

impl Default for EngineerConfig {
    fn default() -> Self {
        let w = |low, high, cap| PValueWindow::new(low, high, Some(cap));
        let three = vec![w(0.0, 1e-4, 600), w(1e-4, ALPHA, 600), w(ALPHA, 1.0, 600)];
        Self {
            t_mode: TMode::Paper,
            alpha: ALPHA,
            schemes: vec![
                OmicScheme {
                    kind: OmicKind::DnaMethylation,
                    preset: None,
                    windows: three.clone(),
                },
                OmicScheme {
                    kind: OmicKind::RnaSeq,
                    preset: None,
                    windows: three,
                },
                OmicScheme {
                    kind: OmicKind::MirnaSeq,
                    preset: None,
                    windows: vec![w(0.0, ALPHA, 600), w(ALPHA, 1.0, 600)],
                },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmicSelect {
    pub kind: OmicKind,
    /// Features kept from each p-value subset, in scheme order.
    pub subset_targets: Vec<usize>,
    /// Top-k per scoring method for each subset; defaults to the target.
    #[serde(default)]
    pub k_per_method: Option<Vec<usize>>,
    /// Size of the per-omic list after merging subsets; a larger union is
    /// truncated by ascending p-value.
    pub final_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterCriterion {
    /// Cut into exactly as many clusters as the subset target.
    Maxclust,
    /// Cut at `cluster_distance`, then keep the most important clusters.
    Distance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectConfig {
    pub mi_bins: usize,
    pub pca_components: usize,
    pub rf_trees: usize,
    pub rf_max_depth: Option<usize>,
    pub auc_threshold: f64,
    pub auc_trees: usize,
    pub auc_max_depth: Option<usize>,
    pub auc_test_fraction: f64,
    pub cluster_criterion: ClusterCriterion,
    pub cluster_distance: f64,
    pub omics: Vec<OmicSelect>,
}

impl SelectConfig {
    pub fn cut(&self, target: usize) -> CutCriterion {
        match self.cluster_criterion {
            ClusterCriterion::Maxclust => CutCriterion::MaxClust(target),
            ClusterCriterion::Distance => CutCriterion::Distance(self.cluster_distance),
        }
    }
}

impl Default for SelectConfig {
    fn default() -> Self {
        let sel = |kind, targets: &[usize], final_count| OmicSelect {
            kind,
            subset_targets: targets.to_vec(),
            k_per_method: None,
            final_count,
        };
        Self {
            mi_bins: 10,
            pca_components: 10,
            rf_trees: 100,
            rf_max_depth: None,
            auc_threshold: 0.80,
            auc_trees: 250,
            auc_max_depth: None,
            auc_test_fraction: 0.2,
            cluster_criterion: ClusterCriterion::Maxclust,
            cluster_distance: 3.5,
            omics: vec![
                sel(OmicKind::DnaMethylation, &[10, 25, 50], 85),
                sel(OmicKind::RnaSeq, &[20, 32, 34], 86),
                sel(OmicKind::MirnaSeq, &[35, 51], 85),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrateConfig {
    pub targets: Vec<usize>,
}

impl Default for IntegrateConfig {
    fn default() -> Self {
        Self {
            targets: vec![256, 64, 32],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QnnSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub validation_fraction: f64,
    pub scaler: ScalerKind,
}

impl Default for QnnSection {
    fn default() -> Self {
        Self {
            epochs: 100,
            batch_size: 16,
            learning_rate: 0.01,
            validation_fraction: 0.2,
            scaler: ScalerKind::MinMax,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpSection {
    pub hidden: usize,
    pub iters: usize,
    pub learning_rate: f64,
}

impl Default for MlpSection {
    fn default() -> Self {
        Self {
            hidden: 64,
            iters: 500,
            learning_rate: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfSection {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub criterion: Criterion,
}

impl Default for RfSection {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            criterion: Criterion::Entropy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub model: ModelChoice,
    pub test_fraction: f64,
    /// Integrated width the baselines train on.
    pub baseline_width: usize,
    pub qnn: QnnSection,
    pub lr: LrConfig,
    pub mlp: MlpSection,
    pub rf: RfSection,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            model: ModelChoice::Qnn256,
            test_fraction: 0.2,
            baseline_width: 256,
            qnn: QnnSection::default(),
            lr: LrConfig::default(),
            mlp: MlpSection::default(),
            rf: RfSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub top_n: usize,
    pub deviation_top_n: usize,
    pub importance_mode: ImportanceMode,
    /// Optional `feature_id<TAB>name` file.
    pub names: Option<PathBuf>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            top_n: 32,
            deviation_top_n: 40,
            importance_mode: ImportanceMode::Gradient,
            names: None,
        }
    }
}

fn default_synth() -> SyntheticSpec {
    SyntheticSpec {
        samples_per_class: 500,
        omics: OmicKind::ALL
            .iter()
            .map(|&k| OmicSynthSpec {
                informative_fraction: 0.2,
                effect_min: 1.5,
                effect_max: 12.0,
                ..OmicSynthSpec::new(k, 5000)
            })
            .collect(),
    }
}

/// Whole-pipeline configuration. Every section has defaults, so an empty
/// file is valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub synth: SyntheticSpec,
    pub inputs: InputsConfig,
    pub engineer: EngineerConfig,
    pub select: SelectConfig,
    pub integrate: IntegrateConfig,
    pub train: TrainConfig,
    pub report: ReportConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            output_dir: None,
            synth: default_synth(),
            inputs: InputsConfig::default(),
            engineer: EngineerConfig::default(),
            select: SelectConfig::default(),
            integrate: IntegrateConfig::default(),
            train: TrainConfig::default(),
            report: ReportConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load a config file; relative input paths are resolved against the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for o in &mut cfg.inputs.omics {
            o.paths.iter_mut().for_each(fix);
        }
        if let Some(p) = cfg.inputs.clinical.as_mut() {
            fix(p);
        }
        if let Some(p) = cfg.report.names.as_mut() {
            fix(p);
        }
        if let Some(p) = cfg.output_dir.as_mut() {
            fix(p);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.engineer.alpha > 0.0 && self.engineer.alpha < 1.0) {
            return bad(format!("alpha {} must lie in (0, 1)", self.engineer.alpha));
        }
        let s = &self.select;
        if !(s.auc_test_fraction > 0.0 && s.auc_test_fraction < 1.0) {
            return bad("auc_test_fraction must lie in (0, 1)".into());
        }
        if s.mi_bins < 2 || s.pca_components == 0 || s.rf_trees == 0 || s.auc_trees == 0 {
            return bad(
                "mi_bins >= 2 and positive pca_components, rf_trees, auc_trees required".into(),
            );
        }
        for o in &s.omics {
            if o.subset_targets.contains(&0) || o.final_count == 0 {
                return bad(format!("{}: targets must be positive", o.kind));
            }
            if let Some(k) = &o.k_per_method {
                if k.len() != o.subset_targets.len() {
                    return bad(format!(
                        "{}: k_per_method length differs from subset_targets",
                        o.kind
                    ));
                }
            }
        }
        if self.integrate.targets.is_empty() {
            return bad("integrate.targets is empty".into());
        }
        let t = &self.train;
        if !(t.test_fraction > 0.0 && t.test_fraction < 1.0) {
            return bad("train.test_fraction must lie in (0, 1)".into());
        }
        if !self.inputs.omics.is_empty() && self.inputs.clinical.is_none() {
            return bad("inputs.omics given without inputs.clinical".into());
        }
        Ok(())
    }

    /// Omic kinds in pipeline order.
    pub fn kinds(&self) -> Vec<OmicKind> {
        if self.inputs.omics.is_empty() {
            self.synth.omics.iter().map(|o| o.kind).collect()
        } else {
            let mut out: Vec<OmicKind> = Vec::new();
            for o in &self.inputs.omics {
                if !out.contains(&o.kind) {
                    out.push(o.kind);
                }
            }
            out
        }
    }

    pub fn scheme(&self, kind: OmicKind) -> Result<Vec<PValueWindow>> {
        self.engineer
            .schemes
            .iter()
            .find(|s| s.kind == kind)
            .map_or_else(|| Ok(tcga_scheme(kind)), OmicScheme::resolve)
    }

    pub fn selection(&self, kind: OmicKind) -> Result<&OmicSelect> {
        self.select
            .omics
            .iter()
            .find(|s| s.kind == kind)
            .ok_or_else(|| Error::Config(format!("no [[select.omics]] entry for {kind}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = PipelineConfig::from_toml("").unwrap();
        assert_eq!(c, PipelineConfig::default());
        assert_eq!(c.seed, 42);
        assert_eq!(c.engineer.alpha, 0.05);
        assert_eq!(c.select.auc_threshold, 0.80);
        assert_eq!(c.select.cluster_distance, 3.5);
        assert_eq!(c.select.auc_trees, 250);
        assert_eq!(c.train.qnn.learning_rate, 0.01);
        assert_eq!(c.train.qnn.batch_size, 16);
    }

    #[test]
    fn toml_round_trip_and_overrides() {
        let c = PipelineConfig::default();
        assert_eq!(PipelineConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
        let c = PipelineConfig::from_toml("seed = 7\n[train]\nmodel = \"rf\"\n").unwrap();
        assert_eq!((c.seed, c.train.model), (7, ModelChoice::Rf));
        assert!(PipelineConfig::from_toml("bogus = 1").is_err());
        assert!(PipelineConfig::from_toml("[select]\nauc_test_fraction = 1.5").is_err());
    }

    #[test]
    fn model_names() {
        for m in ModelChoice::ALL {
            assert_eq!(m.as_str().parse::<ModelChoice>().unwrap(), m);
        }
        assert!("svm".parse::<ModelChoice>().is_err());
        assert_eq!(ModelChoice::Qnn64.width(256), 64);
        assert_eq!(ModelChoice::Lr.width(128), 128);
    }
}
