//! File-based pipeline stages driven by a [`PipelineConfig`].
//!
//! Layout under the output directory:
//!
//! ```text
//! synth/       <kind>.tsv, clinical.tsv, informative.tsv
//! ingest/      <kind>.tsv                (labeled, feature-by-sample)
//! engineer/    <kind>_stats.tsv, <kind>_subsets.tsv
//! select/      <kind>_s<i>_{scores,auc,linkage,clusters}.tsv, <kind>_s<i>_venn.json,
//!              <kind>_selected.tsv
//! integrate/   integrated_<width>.tsv
//! train/<m>/   model.json, split.tsv, history.tsv (QNN only)
//! evaluate/<m>/ metrics.json, predictions.tsv, roc_{train,test}.tsv, loss_curve.tsv
//! report/<m>/  feature_report.tsv, top_features.tsv, deviation_top.tsv, plot_data.tsv
//! ```
//!
//! Every stage directory also holds a `manifest.json`.

mod config;
mod manifest;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

pub use config::{
    ClusterCriterion, EngineerConfig, InputsConfig, IntegrateConfig, MlpSection, ModelChoice,
    OmicInput, OmicScheme, OmicSelect, PipelineConfig, QnnSection, ReportConfig, RfSection,
    SelectConfig, TrainConfig,
};
use manifest::StageRecorder;
pub use manifest::{sha256_hex, Manifest, MANIFEST_NAME};

use crate::baselines::{
    lr_train, mlp_train, rf_train, BaselineModel, BaselineParams, MlpConfig, RfConfig,
};
use crate::checkpoint::{self, AnyModel};
use crate::cluster::{
    cluster_importance, cut_tree, pairwise_euclidean, top_k_per_cluster, ward_linkage,
};
use crate::error::{Error, Result};
use crate::metrics::{classification_scores, confusion, roc_auc, roc_points, ConfusionMatrix};
use crate::omics_io::{
    concat_cohorts, drop_nonpositive_features, generate_synthetic_cohort, intersect_and_join,
    join_clinical, parse_clinical, parse_labeled_dataset, parse_omic_matrix, subsample_features,
    write_clinical, write_labeled_dataset, write_omic_matrix, LabeledDataset, OmicKind,
    OmicsMatrix, ParseOptions,
};
use crate::qnn::{self, bce_loss, QnnConfig};
use crate::report::{
    build_report_from_importance, dense_importance, gradient_importance, parse_name_map, top_n,
    tp_tn_deviation_scores, write_deviation_tsv, write_plot_data, write_report_tsv, ImportanceMode,
};
use crate::scaling::ScalerKind;
use crate::seeding::derive_seed;
use crate::select::{
    auc_screen, chi_square_scores, mutual_info_scores, pca_feature_scores, rf_feature_importances,
    select_k_best, venn_partition, AucScreenParams, ScoreTable,
};
use crate::stats::{parse_stats_tsv, split_by_pvalue, t_statistic, write_stats_tsv, FeatureStats};

fn bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    buf
}

fn json_bytes(v: &impl serde::Serialize) -> Result<Vec<u8>> {
    Ok((serde_json::to_string_pretty(v)? + "\n").into_bytes())
}

pub struct Pipeline {
    cfg: PipelineConfig,
    out: PathBuf,
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig, out: impl Into<PathBuf>) -> Result<Self> {
        cfg.validate()?;
        let out = out.into();
        fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
        Ok(Self { cfg, out })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }

    fn snapshot(&self) -> Result<serde_json::Value> {
        let mut c = self.cfg.clone();
        c.output_dir = None;
        Ok(serde_json::to_value(c)?)
    }

    fn finish(&self, r: StageRecorder, summary: serde_json::Value) -> Result<Manifest> {
        r.finish(self.cfg.seed, self.snapshot()?, summary)
    }

    fn read_labeled(&self, r: &mut StageRecorder, rel: &str) -> Result<LabeledDataset> {
        let path = r.input_path(rel);
        let text = r.read(&path)?;
        parse_labeled_dataset(&text, &path)
    }

    pub fn synth(&self) -> Result<Manifest> {
        let cohort = generate_synthetic_cohort(&self.cfg.synth, self.cfg.seed)?;
        let mut r = StageRecorder::new(&self.out, "synth", "synth")?;
        let mut features = BTreeMap::new();
        for m in &cohort.omics {
            r.write(
                &format!("{}.tsv", m.omic_kind()),
                &bytes(|w| write_omic_matrix(w, m)),
            )?;
            features.insert(m.omic_kind().to_string(), m.n_features());
        }
        r.write(
            "clinical.tsv",
            &bytes(|w| write_clinical(w, &cohort.clinical)),
        )?;
        let truth = bytes(|w| {
            writeln!(w, "omic\tfeature_id\teffect_sd")?;
            for (m, inf) in cohort.omics.iter().zip(&cohort.informative) {
                for (id, e) in inf {
                    writeln!(w, "{}\t{id}\t{e}", m.omic_kind())?;
                }
            }
            Ok(())
        });
        r.write("informative.tsv", &truth)?;
        self.finish(
            r,
            json!({"samples": cohort.clinical.len(), "features": features}),
        )
    }

    pub fn ingest(&self) -> Result<Manifest> {
        let mut r = StageRecorder::new(&self.out, "ingest", "ingest")?;
        let inputs = &self.cfg.inputs;
        let clinical_path = match &inputs.clinical {
            Some(p) if !inputs.omics.is_empty() => p.clone(),
            _ => self.out.join("synth/clinical.tsv"),
        };
        let mut clinical = parse_clinical(&r.read(&clinical_path)?, &clinical_path)?;
        if let Some(t) = inputs.sample_type {
            clinical = clinical.filter_sample_type(t);
        }
        let mut summary = BTreeMap::new();
        for kind in self.cfg.kinds() {
            let (paths, unit) = if inputs.omics.is_empty() {
                (vec![self.out.join(format!("synth/{kind}.tsv"))], None)
            } else {
                let mut paths = Vec::new();
                let mut unit = None;
                for o in inputs.omics.iter().filter(|o| o.kind == kind) {
                    paths.extend(o.paths.iter().cloned());
                    unit = unit.or_else(|| o.unit.clone());
                }
                (paths, unit)
            };
            let opts = ParseOptions {
                impute_mean: inputs.impute_mean,
                unit,
            };
            let mut merged: Option<OmicsMatrix> = None;
            for p in &paths {
                let m = parse_omic_matrix(&r.read(p)?, kind, &opts, p)?;
                merged = Some(match merged {
                    None => m,
                    Some(acc) => concat_cohorts(&acc, &m)?,
                });
            }
            let merged = merged.ok_or_else(|| Error::Config(format!("{kind}: no input files")))?;
            let kept = drop_nonpositive_features(&merged);
            let d = join_clinical(&kept, &clinical)?;
            if !d.has_both_classes() {
                return Err(Error::invalid(format!(
                    "{kind}: both subtypes are required"
                )));
            }
            r.write(
                &format!("{kind}.tsv"),
                &bytes(|w| write_labeled_dataset(w, &d)),
            )?;
            summary.insert(
                kind.to_string(),
                json!({
                    "samples": d.n_samples(),
                    "lusc": d.class_count(0),
                    "luad": d.class_count(1),
                    "features_in": merged.n_features(),
                    "features_kept": d.n_features(),
                }),
            );
        }
        self.finish(r, json!(summary))
    }

    pub fn engineer(&self) -> Result<Manifest> {
        let mut r = StageRecorder::new(&self.out, "engineer", "engineer")?;
        let mut summary = BTreeMap::new();
        for kind in self.cfg.kinds() {
            let d = self.read_labeled(&mut r, &format!("ingest/{kind}.tsv"))?;
            let stats = t_statistic(&d, self.cfg.engineer.t_mode)?;
            r.write(
                &format!("{kind}_stats.tsv"),
                &bytes(|w| write_stats_tsv(w, &stats)),
            )?;
            let subsets = split_by_pvalue(&stats, &self.cfg.scheme(kind)?)?;
            let p_of: HashMap<&str, f64> = stats
                .iter()
                .map(|s| (s.feature_id.as_str(), s.p_value))
                .collect();
            r.write(
                &format!("{kind}_subsets.tsv"),
                &bytes(|w| {
                    writeln!(w, "subset\tfeature_id\tp_value")?;
                    for (i, s) in subsets.iter().enumerate() {
                        for id in s {
                            writeln!(w, "{}\t{id}\t{}", i + 1, p_of[id.as_str()])?;
                        }
                    }
                    Ok(())
                }),
            )?;
            let alpha = self.cfg.engineer.alpha;
            summary.insert(
                kind.to_string(),
                json!({
                    "features": stats.len(),
                    "significant": stats.iter().filter(|s| s.is_significant(alpha)).count(),
                    "subset_sizes": subsets.iter().map(Vec::len).collect::<Vec<_>>(),
                }),
            );
        }
        self.finish(r, json!(summary))
    }

    pub fn select(&self) -> Result<Manifest> {
        let mut r = StageRecorder::new(&self.out, "select", "select")?;
        let mut summary = BTreeMap::new();
        for kind in self.cfg.kinds() {
            let d = self.read_labeled(&mut r, &format!("ingest/{kind}.tsv"))?;
            let stats_path = r.input_path(&format!("engineer/{kind}_stats.tsv"));
            let stats = parse_stats_tsv(&r.read(&stats_path)?)?;
            let subsets_path = r.input_path(&format!("engineer/{kind}_subsets.tsv"));
            let subsets = parse_subsets(&r.read(&subsets_path)?)?;
            let (final_ids, per_subset) = self.select_omic(&mut r, kind, &d, &stats, &subsets)?;
            let p_of: HashMap<&str, f64> = stats
                .iter()
                .map(|s| (s.feature_id.as_str(), s.p_value))
                .collect();
            let origin: HashMap<&str, usize> = per_subset
                .iter()
                .enumerate()
                .rev()
                .flat_map(|(i, ids)| ids.iter().map(move |id| (id.as_str(), i + 1)))
                .collect();
            r.write(
                &format!("{kind}_selected.tsv"),
                &bytes(|w| {
                    writeln!(w, "feature_id\tsubset\tp_value")?;
                    for id in &final_ids {
                        writeln!(w, "{id}\t{}\t{}", origin[id.as_str()], p_of[id.as_str()])?;
                    }
                    Ok(())
                }),
            )?;
            summary.insert(
                kind.to_string(),
                json!({
                    "per_subset": per_subset.iter().map(Vec::len).collect::<Vec<_>>(),
                    "selected": final_ids.len(),
                }),
            );
        }
        self.finish(r, json!(summary))
    }

    /// Per-subset scoring, AUC screening and Ward reduction for one omic.
    /// Returns the final list (ascending p-value) and each subset's picks.
    fn select_omic(
        &self,
        r: &mut StageRecorder,
        kind: OmicKind,
        d: &LabeledDataset,
        stats: &[FeatureStats],
        subsets: &[Vec<String>],
    ) -> Result<(Vec<String>, Vec<Vec<String>>)> {
        let sc = &self.cfg.select;
        let plan = self.cfg.selection(kind)?;
        if subsets.len() != plan.subset_targets.len() {
            return Err(Error::Config(format!(
                "{kind}: {} p-value subsets but {} subset targets",
                subsets.len(),
                plan.subset_targets.len()
            )));
        }
        let split = d.stratified_split(sc.auc_test_fraction, self.cfg.seed)?;
        let auc_params = AucScreenParams {
            threshold: sc.auc_threshold,
            n_trees: sc.auc_trees,
            max_depth: sc.auc_max_depth,
            seed: self.cfg.seed,
        };
        let mut per_subset = Vec::with_capacity(subsets.len());
        for (i, ids) in subsets.iter().enumerate() {
            let tag = format!("{kind}_s{}", i + 1);
            let target = plan.subset_targets[i];
            if ids.is_empty() {
                return Err(Error::invalid(format!("{tag}: empty p-value subset")));
            }
            let sub = d.select_features(ids)?;
            let k = plan
                .k_per_method
                .as_ref()
                .map_or(target, |k| k[i])
                .min(ids.len());
            let rf_seed = derive_seed(self.cfg.seed, format!("{tag}/rf").as_bytes());
            let pcs = sc.pca_components.min(sub.n_samples()).min(sub.n_features());
            let tables = [
                mutual_info_scores(&sub, sc.mi_bins),
                chi_square_scores(&sub, sc.mi_bins),
                pca_feature_scores(&sub, pcs)?,
                rf_feature_importances(&sub, sc.rf_trees, sc.rf_max_depth, rf_seed)?,
            ];
            r.write(
                &format!("{tag}_scores.tsv"),
                &bytes(|w| write_score_tables(w, &tables)),
            )?;
            let picks = tables
                .iter()
                .map(|t| select_k_best(t, k))
                .collect::<Result<Vec<_>>>()?;
            let venn = venn_partition(&picks)?;
            r.write(&format!("{tag}_venn.json"), &json_bytes(&venn)?)?;

            let screened = auc_screen(&split.train, &split.test, &venn.unique, &auc_params)?;
            r.write(
                &format!("{tag}_auc.tsv"),
                &bytes(|w| {
                    writeln!(w, "feature_id\ttrain_auc\ttest_auc\tpass")?;
                    for a in &screened {
                        let pass = a.passes(sc.auc_threshold);
                        writeln!(
                            w,
                            "{}\t{}\t{}\t{pass}",
                            a.feature_id, a.train_auc, a.test_auc
                        )?;
                    }
                    Ok(())
                }),
            )?;
            let survivors: Vec<String> = screened
                .into_iter()
                .filter(|a| a.passes(sc.auc_threshold))
                .map(|a| a.feature_id)
                .collect();
            if survivors.len() < target {
                return Err(Error::invalid(format!(
                    "{tag}: {} features passed the AUC filter (threshold {}), {target} required",
                    survivors.len(),
                    sc.auc_threshold
                )));
            }
            let chosen = if survivors.len() == 1 {
                survivors.clone()
            } else {
                let x = d.select_features(&survivors)?;
                let linkage = ward_linkage(&pairwise_euclidean(x.values().view())?)?;
                r.write(
                    &format!("{tag}_linkage.tsv"),
                    &bytes(|w| linkage.write_tsv(w)),
                )?;
                let labels = cut_tree(&linkage, sc.cut(target))?;
                let reps = top_k_per_cluster(x.values().view(), &survivors, &labels, 1)?;
                let importance = cluster_importance(x.values().view(), &labels)?;
                r.write(
                    &format!("{tag}_clusters.tsv"),
                    &bytes(|w| {
                        writeln!(w, "feature_id\tcluster\tcluster_importance\trepresentative")?;
                        for (id, &l) in survivors.iter().zip(&labels) {
                            let rep = reps.contains(id);
                            writeln!(w, "{id}\t{l}\t{}\t{rep}", importance[l - 1])?;
                        }
                        Ok(())
                    }),
                )?;
                // reps come one per cluster in label order; keep the most
                // important clusters when the cut left more than the target
                let mut ranked: Vec<(usize, String)> = reps
                    .into_iter()
                    .map(|id| {
                        (
                            labels[survivors
                                .iter()
                                .position(|s| *s == id)
                                .expect("rep is a survivor")],
                            id,
                        )
                    })
                    .collect();
                ranked.sort_by(|a, b| {
                    importance[b.0 - 1]
                        .total_cmp(&importance[a.0 - 1])
                        .then(a.0.cmp(&b.0))
                });
                ranked
                    .into_iter()
                    .take(target)
                    .map(|(_, id)| id)
                    .collect::<Vec<_>>()
            };
            if chosen.len() < target {
                return Err(Error::invalid(format!(
                    "{tag}: clustering left {} features, {target} required",
                    chosen.len()
                )));
            }
            per_subset.push(chosen);
        }

        let p_of: HashMap<&str, f64> = stats
            .iter()
            .map(|s| (s.feature_id.as_str(), s.p_value))
            .collect();
        let mut seen = HashSet::new();
        let mut union: Vec<String> = per_subset
            .iter()
            .flatten()
            .filter(|id| seen.insert(id.as_str()))
            .cloned()
            .collect();
        union.sort_by(|a, b| {
            p_of[a.as_str()]
                .total_cmp(&p_of[b.as_str()])
                .then_with(|| a.cmp(b))
        });
        if union.len() < plan.final_count {
            return Err(Error::invalid(format!(
                "{kind}: {} features selected, {} required",
                union.len(),
                plan.final_count
            )));
        }
        union.truncate(plan.final_count);
        Ok((union, per_subset))
    }

    pub fn integrate(&self) -> Result<Manifest> {
        let mut r = StageRecorder::new(&self.out, "integrate", "integrate")?;
        let mut parts = Vec::new();
        for kind in self.cfg.kinds() {
            let d = self.read_labeled(&mut r, &format!("ingest/{kind}.tsv"))?;
            let sel_path = r.input_path(&format!("select/{kind}_selected.tsv"));
            let ids = first_column(&r.read(&sel_path)?);
            parts.push((kind, d.select_features(&ids)?));
        }
        let refs: Vec<(OmicKind, &LabeledDataset)> = parts.iter().map(|(k, d)| (*k, d)).collect();
        let full = if refs.len() == 1 {
            let (kind, d) = refs[0];
            let ids: Vec<String> = d
                .feature_ids()
                .iter()
                .map(|f| format!("{}{f}", kind.prefix()))
                .collect();
            LabeledDataset::new(
                ids,
                d.sample_ids().to_vec(),
                d.values().clone(),
                d.labels().to_vec(),
            )?
        } else {
            intersect_and_join(&refs)?
        };
        let mut widths = Vec::new();
        for &t in &self.cfg.integrate.targets {
            let d = subsample_features(
                &full,
                t,
                derive_seed(self.cfg.seed, format!("integrate/{t}").as_bytes()),
            )?;
            r.write(
                &format!("integrated_{t}.tsv"),
                &bytes(|w| write_labeled_dataset(w, &d)),
            )?;
            widths.push(t);
        }
        let per_omic: BTreeMap<String, usize> = parts
            .iter()
            .map(|(k, d)| (k.to_string(), d.n_features()))
            .collect();
        self.finish(
            r,
            json!({
                "samples": full.n_samples(),
                "lusc": full.class_count(0),
                "luad": full.class_count(1),
                "full_width": full.n_features(),
                "per_omic": per_omic,
                "widths": widths,
            }),
        )
    }

    fn integrated(&self, r: &mut StageRecorder, model: ModelChoice) -> Result<LabeledDataset> {
        let width = model.width(self.cfg.train.baseline_width);
        if !self.cfg.integrate.targets.contains(&width) {
            return Err(Error::Config(format!(
                "{model} needs an integrated width of {width}; add it to integrate.targets"
            )));
        }
        self.read_labeled(r, &format!("integrate/integrated_{width}.tsv"))
    }

    fn load_split(
        &self,
        r: &mut StageRecorder,
        model: ModelChoice,
        d: &LabeledDataset,
    ) -> Result<(LabeledDataset, LabeledDataset)> {
        let path = r.input_path(&format!("train/{model}/split.tsv"));
        let text = r.read(&path)?;
        let pos: HashMap<&str, usize> = d
            .sample_ids()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let (mut train, mut test) = (Vec::new(), Vec::new());
        for line in text.lines().skip(1).filter(|l| !l.is_empty()) {
            let (id, part) = line
                .split_once('\t')
                .ok_or_else(|| Error::invalid(format!("{}: malformed line", path.display())))?;
            let i = *pos
                .get(id)
                .ok_or_else(|| Error::invalid(format!("split sample {id} not in data")))?;
            match part {
                "train" => train.push(i),
                "test" => test.push(i),
                other => return Err(Error::invalid(format!("unknown split {other:?}"))),
            }
        }
        Ok((d.select_rows(&train)?, d.select_rows(&test)?))
    }

    pub fn train(&self, model: ModelChoice) -> Result<Manifest> {
        let dir = format!("train/{model}");
        let mut r = StageRecorder::new(&self.out, &dir, "train")?;
        let d = self.integrated(&mut r, model)?;
        let t = &self.cfg.train;
        let split = d.stratified_split(t.test_fraction, self.cfg.seed)?;
        let test_set: HashSet<usize> = split.test_rows.iter().copied().collect();
        r.write(
            "split.tsv",
            &bytes(|w| {
                writeln!(w, "sample_id\tsplit")?;
                for (i, s) in d.sample_ids().iter().enumerate() {
                    let part = if test_set.contains(&i) {
                        "test"
                    } else {
                        "train"
                    };
                    writeln!(w, "{s}\t{part}")?;
                }
                Ok(())
            }),
        )?;
        let seed = self.cfg.seed;
        let mut extra = json!({});
        let fitted = match model {
            ModelChoice::Lr => AnyModel::Baseline(lr_train(&split.train, &t.lr)?),
            ModelChoice::Mlp => AnyModel::Baseline(mlp_train(
                &split.train,
                &MlpConfig {
                    hidden: t.mlp.hidden,
                    iters: t.mlp.iters,
                    learning_rate: t.mlp.learning_rate,
                    seed,
                    scaler: ScalerKind::Standard,
                },
            )?),
            ModelChoice::Rf => AnyModel::Baseline(rf_train(
                &split.train,
                &RfConfig {
                    n_trees: t.rf.n_trees,
                    max_depth: t.rf.max_depth,
                    criterion: t.rf.criterion,
                    seed,
                },
            )?),
            _ => {
                let mut qc = QnnConfig::preset(model.as_str())?;
                qc.epochs = t.qnn.epochs;
                qc.batch_size = t.qnn.batch_size;
                qc.learning_rate = t.qnn.learning_rate;
                qc.validation_fraction = t.qnn.validation_fraction;
                qc.scaler = t.qnn.scaler;
                qc.seed = seed;
                let (m, history) = qnn::train(&qc, &split.train)?;
                r.write("history.tsv", &bytes(|w| history.write_tsv(w)))?;
                extra = json!({"best_epoch": history.best_epoch, "epochs": history.epochs.len()});
                AnyModel::Qnn(m)
            }
        };
        r.write("model.json", checkpoint::to_json(&fitted)?.as_bytes())?;
        self.finish(
            r,
            json!({
                "model": model.as_str(),
                "width": d.n_features(),
                "train_samples": split.train.n_samples(),
                "test_samples": split.test.n_samples(),
                "training": extra,
            }),
        )
    }

    fn load_model(&self, r: &mut StageRecorder, model: ModelChoice) -> Result<AnyModel> {
        let path = r.input_path(&format!("train/{model}/model.json"));
        checkpoint::from_json(&r.read(&path)?)
    }

    pub fn evaluate(&self, model: ModelChoice) -> Result<Manifest> {
        let dir = format!("evaluate/{model}");
        let mut r = StageRecorder::new(&self.out, &dir, "evaluate")?;
        let fitted = self.load_model(&mut r, model)?;
        let d = self.integrated(&mut r, model)?;
        let (train, test) = self.load_split(&mut r, model, &d)?;
        let clf = fitted.classifier();
        let mut report = BTreeMap::new();
        let mut rows = Vec::new();
        for (name, part) in [("train", &train), ("test", &test)] {
            let probs = clf.predict_proba_rows(part.values().view())?;
            let preds: Vec<u8> = probs.iter().map(|&p| u8::from(p >= 0.5)).collect();
            report.insert(name, split_metrics(part.labels(), &probs, &preds)?);
            let roc = roc_points(part.labels(), &probs)?;
            r.write(
                &format!("roc_{name}.tsv"),
                &bytes(|w| {
                    writeln!(w, "threshold\tfpr\ttpr")?;
                    for (t, f, p) in &roc {
                        writeln!(w, "{t}\t{f}\t{p}")?;
                    }
                    Ok(())
                }),
            )?;
            for (i, s) in part.sample_ids().iter().enumerate() {
                rows.push(format!(
                    "{name}\t{s}\t{}\t{}\t{}",
                    part.labels()[i],
                    probs[i],
                    preds[i]
                ));
            }
        }
        r.write(
            "predictions.tsv",
            &bytes(|w| {
                writeln!(w, "split\tsample_id\tlabel\tprobability\tprediction")?;
                for row in &rows {
                    writeln!(w, "{row}")?;
                }
                Ok(())
            }),
        )?;
        if model.is_qnn() {
            let path = r.input_path(&format!("train/{model}/history.tsv"));
            let hist = r.read(&path)?;
            r.write("loss_curve.tsv", &loss_curve(&hist)?)?;
        }
        let metrics = json!({"model": model.as_str(), "splits": report});
        r.write("metrics.json", &json_bytes(&metrics)?)?;
        self.finish(r, metrics)
    }

    pub fn report(&self, model: ModelChoice) -> Result<Manifest> {
        let dir = format!("report/{model}");
        let mut r = StageRecorder::new(&self.out, &dir, "report")?;
        let fitted = self.load_model(&mut r, model)?;
        let d = self.integrated(&mut r, model)?;
        let (_, test) = self.load_split(&mut r, model, &d)?;
        let mut stats = Vec::new();
        for kind in self.cfg.kinds() {
            let path = r.input_path(&format!("engineer/{kind}_stats.tsv"));
            for mut s in parse_stats_tsv(&r.read(&path)?)? {
                s.feature_id = format!("{}{}", kind.prefix(), s.feature_id);
                stats.push(s);
            }
        }
        let rc = &self.cfg.report;
        // a forest is piecewise constant, so its input gradients vanish;
        // impurity importances stand in for them
        let (importance, source) = match (rc.importance_mode, &fitted) {
            (
                ImportanceMode::Gradient,
                AnyModel::Baseline(BaselineModel {
                    params: BaselineParams::Rf { forest, .. },
                    ..
                }),
            ) => (forest.feature_importances().to_vec(), "impurity"),
            (ImportanceMode::Gradient, _) => (
                gradient_importance(fitted.classifier(), test.values().view())?,
                "gradient",
            ),
            (ImportanceMode::Dense, AnyModel::Qnn(m)) => (dense_importance(m)?, "dense"),
            (ImportanceMode::Dense, AnyModel::Baseline(_)) => {
                return Err(Error::Config(
                    "dense importance applies to QNN models only".into(),
                ))
            }
        };
        let features = build_report_from_importance(&importance, &d, &stats)?;
        let names = match &rc.names {
            Some(p) => Some(parse_name_map(&r.read(p)?)?),
            None => None,
        };
        let top = top_n(&features, rc.top_n);
        r.write(
            "feature_report.tsv",
            &bytes(|w| write_report_tsv(w, &features, names.as_ref())),
        )?;
        r.write(
            "top_features.tsv",
            &bytes(|w| write_report_tsv(w, top, names.as_ref())),
        )?;
        let dev = tp_tn_deviation_scores(
            fitted.classifier(),
            &test,
            rc.deviation_top_n.min(test.n_features()),
        )?;
        r.write(
            "deviation_top.tsv",
            &bytes(|w| write_deviation_tsv(w, &dev)),
        )?;
        let top_ids: Vec<&str> = top.iter().map(|f| f.feature_id.as_str()).collect();
        let mut plot = Vec::new();
        write_plot_data(&mut plot, &d, &top_ids)?;
        r.write("plot_data.tsv", &plot)?;
        self.finish(
            r,
            json!({
                "model": model.as_str(),
                "importance_mode": rc.importance_mode,
                "importance_source": source,
                "top_features": top_ids,
            }),
        )
    }

    /// Every stage in order; `synth` runs only when no input files are
    /// configured.
    pub fn run_all(&self, model: ModelChoice) -> Result<Vec<Manifest>> {
        let mut out = Vec::new();
        if self.cfg.inputs.omics.is_empty() {
            out.push(self.synth()?);
        }
        out.push(self.ingest()?);
        out.push(self.engineer()?);
        out.push(self.select()?);
        out.push(self.integrate()?);
        out.push(self.train(model)?);
        out.push(self.evaluate(model)?);
        out.push(self.report(model)?);
        Ok(out)
    }
}

fn write_score_tables<W: Write>(mut w: W, tables: &[ScoreTable]) -> std::io::Result<()> {
    write!(w, "feature_id")?;
    for t in tables {
        write!(w, "\t{}", t.method)?;
    }
    writeln!(w)?;
    let n = tables.first().map_or(0, |t| t.entries.len());
    for i in 0..n {
        write!(w, "{}", tables[0].entries[i].0)?;
        for t in tables {
            write!(w, "\t{}", t.entries[i].1)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

fn first_column(text: &str) -> Vec<String> {
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| l.split('\t').next().unwrap_or_default().to_string())
        .collect()
}

fn parse_subsets(text: &str) -> Result<Vec<Vec<String>>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for line in text.lines().skip(1).filter(|l| !l.is_empty()) {
        let mut c = line.split('\t');
        let idx: usize = c
            .next()
            .and_then(|v| v.parse().ok())
            .filter(|&v| v > 0)
            .ok_or_else(|| Error::invalid(format!("bad subset line {line:?}")))?;
        let id = c
            .next()
            .ok_or_else(|| Error::invalid(format!("bad subset line {line:?}")))?;
        if out.len() < idx {
            out.resize(idx, Vec::new());
        }
        out[idx - 1].push(id.to_string());
    }
    Ok(out)
}

fn class_scores(cm: &ConfusionMatrix) -> Result<serde_json::Value> {
    let s = classification_scores(cm)?;
    Ok(json!({
        "precision": s.precision,
        "recall": s.recall,
        "f1": s.f1,
        "support": cm.tp + cm.fn_,
        "precision_undefined": s.precision_undefined,
        "recall_undefined": s.recall_undefined,
        "f1_undefined": s.f1_undefined,
    }))
}

fn split_metrics(labels: &[u8], probs: &[f64], preds: &[u8]) -> Result<serde_json::Value> {
    let cm = confusion(labels, preds)?;
    let s = classification_scores(&cm)?;
    let auc = if labels.contains(&0) && labels.contains(&1) {
        Some(roc_auc(labels, probs)?)
    } else {
        None
    };
    Ok(json!({
        "n": labels.len(),
        "accuracy": s.accuracy,
        "loss": bce_loss(probs, labels)?,
        "auc": auc,
        "confusion": cm,
        "classes": {
            "LUAD": class_scores(&cm)?,
            "LUSC": class_scores(&cm.flipped())?,
        },
    }))
}

/// Long-format `epoch, split, loss, accuracy` rows from a history TSV.
fn loss_curve(history_tsv: &str) -> Result<Vec<u8>> {
    let mut out = String::from("epoch\tsplit\tloss\taccuracy\n");
    for line in history_tsv.lines().skip(1).filter(|l| !l.is_empty()) {
        let c: Vec<&str> = line.split('\t').collect();
        if c.len() != 5 {
            return Err(Error::invalid("malformed history line"));
        }
        out.push_str(&format!("{}\ttrain\t{}\t{}\n", c[0], c[1], c[2]));
        if c[3] != "NA" {
            out.push_str(&format!("{}\tvalidation\t{}\t{}\n", c[0], c[3], c[4]));
        }
    }
    Ok(out.into_bytes())
}
