use std::borrow::Cow;

use rayon::prelude::*;

use super::{CSource, ExperimentError, RunConfig, TaskId, WeightingMode};
use crate::elm::{
    build_hidden_matrix, build_input_matrix, encode_input, implied_c, optical_readout, predict_digital,
    predict_optical, preprocess, readout_filters, split_weights, train_c, train_digital, HiddenMatrix, PhotonicElm,
    Prediction, PreprocessConfig, ReadoutCoefficients, WeightSet, E0,
};
use crate::optics::{CombState, DarkNoise, FilterShape};
use crate::seed::{derive, mix, stream};
use crate::tasks::{
    bundled, evaluate, load_tabular_task, nlc_generate, split, Metrics, NlcConfig, ScoreKind, TabularSchema,
    TaskDataset,
};

/// Data a run draws its samples from. Tabular tasks use one fixed dataset;
/// the channel task draws a fresh symbol stream for every repeat.
#[derive(Debug, Clone)]
pub enum TaskSource {
    Fixed(TaskDataset),
    Nlc(NlcConfig),
}

impl TaskSource {
    pub fn load(cfg: &RunConfig) -> Result<Self, ExperimentError> {
        let schema = match cfg.task {
            TaskId::Nlc => {
                let nlc = NlcConfig {
                    n_symbols: cfg.nlc.symbols,
                    snr_db: cfg.nlc.snr_db,
                    seed: cfg.seed,
                    reference: cfg.nlc.reference,
                };
                nlc.validate()?;
                return Ok(TaskSource::Nlc(nlc));
            }
            TaskId::Iris => TabularSchema::Iris,
            TaskId::Wine => TabularSchema::Wine,
            TaskId::Banknote => TabularSchema::Banknote {
                features: cfg.banknote_features,
            },
        };
        let data = match &cfg.data_path {
            Some(p) => load_tabular_task(p, schema)?,
            None => bundled(cfg.task.name())?,
        };
        Ok(TaskSource::Fixed(data))
    }

    pub fn score_kind(&self) -> ScoreKind {
        match self {
            TaskSource::Fixed(d) => d.score_kind(),
            TaskSource::Nlc(_) => ScoreKind::SymbolErrorRate,
        }
    }

    fn dataset(&self, repeat: usize) -> Result<Cow<'_, TaskDataset>, ExperimentError> {
        Ok(match self {
            TaskSource::Fixed(d) => Cow::Borrowed(d),
            TaskSource::Nlc(cfg) => Cow::Owned(nlc_generate(&NlcConfig {
                seed: mix(cfg.seed, repeat as u64),
                ..*cfg
            })?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMetrics {
    pub lambda: f64,
    pub metrics: Metrics,
}

/// Decisions of one repeat at the selected `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatRecord {
    pub repeat: usize,
    /// Sample indices that were scored, in scoring order.
    pub evaluated: Vec<usize>,
    pub predictions: Vec<Prediction>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkResult {
    pub kind: ScoreKind,
    pub selected_lambda: f64,
    pub metrics: Metrics,
    pub per_lambda: Vec<LambdaMetrics>,
    pub repeats: Vec<RepeatRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layer {
    Elm,
    Perceptron,
}

/// Split, train and score `cfg.repeats` times; `λ` is chosen by the best
/// median test score.
pub fn run_benchmark(cfg: &RunConfig) -> Result<BenchmarkResult, ExperimentError> {
    cfg.validate()?;
    run(cfg, &TaskSource::load(cfg)?, Layer::Elm)
}

pub fn run_benchmark_on(cfg: &RunConfig, source: &TaskSource) -> Result<BenchmarkResult, ExperimentError> {
    run(cfg, source, Layer::Elm)
}

/// Same protocol with the mixing modulator bypassed: the readout sees the
/// encoded input comb directly.
pub fn perceptron_baseline(cfg: &RunConfig) -> Result<BenchmarkResult, ExperimentError> {
    cfg.validate()?;
    run(cfg, &TaskSource::load(cfg)?, Layer::Perceptron)
}

pub fn perceptron_baseline_on(cfg: &RunConfig, source: &TaskSource) -> Result<BenchmarkResult, ExperimentError> {
    run(cfg, source, Layer::Perceptron)
}

struct Outcome {
    evaluated: Vec<usize>,
    predictions: Vec<Prediction>,
    score: f64,
}

fn run(cfg: &RunConfig, source: &TaskSource, layer: Layer) -> Result<BenchmarkResult, ExperimentError> {
    cfg.validate()?;
    let elm = PhotonicElm::new(E0, &cfg.pm1()?, &cfg.pm2()?)?;
    let kind = source.score_kind();
    let per_repeat: Vec<Vec<Outcome>> = (0..cfg.repeats)
        .into_par_iter()
        .map(|r| {
            run_repeat(cfg, source, &elm, layer, r).map_err(|e| ExperimentError::Repeat {
                repeat: r,
                source: Box::new(e),
            })
        })
        .collect::<Result<_, _>>()?;

    let per_lambda = cfg
        .lambdas
        .iter()
        .enumerate()
        .map(|(li, &lambda)| {
            let scores = per_repeat.iter().map(|o| o[li].score).collect();
            Ok(LambdaMetrics {
                lambda,
                metrics: Metrics::from_scores(kind, scores)?,
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let mut best = 0;
    for (i, lm) in per_lambda.iter().enumerate().skip(1) {
        if kind.better(lm.metrics.median(), per_lambda[best].metrics.median()) {
            best = i;
        }
    }
    let repeats = per_repeat
        .into_iter()
        .enumerate()
        .map(|(r, mut o)| {
            let o = o.swap_remove(best);
            RepeatRecord {
                repeat: r,
                evaluated: o.evaluated,
                predictions: o.predictions,
            }
        })
        .collect();
    Ok(BenchmarkResult {
        kind,
        selected_lambda: per_lambda[best].lambda,
        metrics: per_lambda[best].metrics.clone(),
        per_lambda,
        repeats,
    })
}

fn run_repeat(
    cfg: &RunConfig,
    source: &TaskSource,
    elm: &PhotonicElm,
    layer: Layer,
    r: usize,
) -> Result<Vec<Outcome>, ExperimentError> {
    let data = source.dataset(r)?;
    let (train, test) = split(data.len(), &cfg.split_plan(), r);
    let pre = preprocess(&data.features, &PreprocessConfig::new(cfg.d).with_scale(cfg.input_scale), &train)?;
    let filters: Vec<FilterShape> = pre
        .attenuations
        .rows_iter()
        .map(encode_input)
        .collect::<Result<_, _>>()?;
    let noise = (cfg.noise.hidden_sigma > 0.0).then(|| DarkNoise {
        sigma: cfg.noise.hidden_sigma,
        seed: derive(cfg.seed, stream::HIDDEN_NOISE, r as u64),
    });
    let h = match layer {
        Layer::Elm => build_hidden_matrix(&filters, elm, noise)?,
        Layer::Perceptron => build_input_matrix(&filters, elm, noise)?,
    };
    let h_train = h.select_rows(&train);
    let y_train = data.targets.select_rows(&train);
    let fields = match cfg.mode {
        WeightingMode::Digital => Vec::new(),
        WeightingMode::Optical => test
            .par_iter()
            .map(|&i| match layer {
                Layer::Elm => elm.hidden_field(&filters[i]),
                Layer::Perceptron => Ok(elm.input_field(&filters[i])),
            })
            .collect::<Result<Vec<_>, _>>()?,
    };

    cfg.lambdas
        .iter()
        .map(|&lambda| {
            let ws = train_digital(&h_train, &y_train, lambda)?;
            let (evaluated, predictions) = match cfg.mode {
                WeightingMode::Digital => digital_decisions(&h, &ws, &data, &test)?,
                WeightingMode::Optical => optical_decisions(cfg, &ws, &data, &test, &fields, r)?,
            };
            let truths: Vec<Prediction> = evaluated.iter().map(|&i| data.truth(i)).collect();
            let score = evaluate(&predictions, &truths, source.score_kind())?;
            Ok(Outcome {
                evaluated,
                predictions,
                score,
            })
        })
        .collect()
}

fn digital_decisions(
    h: &HiddenMatrix,
    ws: &WeightSet,
    data: &TaskDataset,
    test: &[usize],
) -> Result<(Vec<usize>, Vec<Prediction>), ExperimentError> {
    let predictions = test
        .iter()
        .map(|&i| predict_digital(h.row(i), ws, data.kind))
        .collect::<Result<_, _>>()?;
    Ok((test.to_vec(), predictions))
}

/// Dual-photodiode readout of the test samples. With learned coefficients
/// the first tenth of the acquisitions (at least three) calibrates `C` and
/// only the rest is scored.
fn optical_decisions(
    cfg: &RunConfig,
    ws: &WeightSet,
    data: &TaskDataset,
    test: &[usize],
    fields: &[CombState],
    r: usize,
) -> Result<(Vec<usize>, Vec<Prediction>), ExperimentError> {
    let ws = WeightSet {
        weight_mapping: cfg.mapping,
        ..split_weights(ws)
    };
    let filters = readout_filters(&ws)?;
    let outputs = ws.outputs();
    let noise_base = derive(cfg.seed, stream::READOUT_NOISE, r as u64);
    let readings: Vec<Vec<(f64, f64)>> = test
        .par_iter()
        .zip(fields)
        .map(|(&i, field)| {
            filters
                .iter()
                .enumerate()
                .map(|(o, (fp, fm))| {
                    let noise = (cfg.noise.readout_sigma > 0.0).then(|| {
                        let key = mix(noise_base, (i * outputs + o) as u64);
                        let dark = |s| DarkNoise {
                            sigma: cfg.noise.readout_sigma,
                            seed: mix(key, s),
                        };
                        (dark(0), dark(1))
                    });
                    optical_readout(field, fp, fm, noise)
                })
                .collect()
        })
        .collect();

    let (c, first): (Vec<ReadoutCoefficients>, usize) = match cfg.c_source {
        CSource::FromWeights => (implied_c(&ws)?, 0),
        CSource::Learned => {
            let n_cal = test.len().div_ceil(10).max(3).min(test.len());
            let c = (0..outputs)
                .map(|o| {
                    let rd: Vec<(f64, f64)> = readings[..n_cal].iter().map(|row| row[o]).collect();
                    let y: Vec<f64> = test[..n_cal].iter().map(|&i| data.targets.get(i, o)).collect();
                    train_c(&rd, &y)
                })
                .collect::<Result<_, _>>()?;
            (c, n_cal)
        }
    };
    let predictions = readings[first..]
        .iter()
        .map(|row| predict_optical(row, &c, data.kind))
        .collect::<Result<_, _>>()?;
    Ok((test[first..].to_vec(), predictions))
}
