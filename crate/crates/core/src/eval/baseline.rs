use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::{Dataset, Utterance};
use crate::operators::{tokenize, TokenKind};
use crate::taxonomy::BasicEmotion;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyper {
    pub epochs: usize,
    /// L2 regularization strength.
    pub reg: f64,
    pub seed: u64,
}

impl Default for Hyper {
    fn default() -> Self {
        Self {
            epochs: 20,
            reg: 1e-4,
            seed: 0,
        }
    }
}

/// Unigrams and bigrams over lowercased word and placeholder tokens.
pub fn ngrams(text: &str) -> BTreeSet<String> {
    let toks: Vec<String> = tokenize(text)
        .tokens
        .into_iter()
        .filter(|t| t.kind != TokenKind::Punct)
        .map(|t| t.text.to_lowercase())
        .collect();
    let mut out: BTreeSet<String> = toks.iter().cloned().collect();
    out.extend(toks.windows(2).map(|w| format!("{} {}", w[0], w[1])));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scorer {
    pub bias: f64,
    pub weights: Vec<f64>,
}

impl Scorer {
    fn score(&self, features: &[usize]) -> f64 {
        self.bias + features.iter().map(|&j| self.weights[j]).sum::<f64>()
    }
}

/// One-vs-rest linear scorers over binary n-gram presence features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineModel {
    pub hyper: Hyper,
    pub vocabulary: Vec<String>,
    pub scorers: BTreeMap<BasicEmotion, Scorer>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub predicted: BTreeSet<BasicEmotion>,
}

impl BaselineModel {
    fn build_index(&mut self) {
        self.index = self.vocabulary.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let mut model: BaselineModel = serde_json::from_str(text)?;
        model.build_index();
        Ok(model)
    }

    /// Feature indices of `text`; n-grams unseen in training are ignored.
    pub fn features(&self, text: &str) -> Vec<usize> {
        let mut idx: Vec<usize> = ngrams(text).iter().filter_map(|g| self.index.get(g).copied()).collect();
        idx.sort_unstable();
        idx
    }

    pub fn scores(&self, text: &str) -> BTreeMap<BasicEmotion, f64> {
        let x = self.features(text);
        self.scorers.iter().map(|(e, s)| (*e, s.score(&x))).collect()
    }

    /// Emotions whose score is strictly positive.
    pub fn predict_text(&self, text: &str) -> BTreeSet<BasicEmotion> {
        self.scores(text).into_iter().filter(|(_, s)| *s > 0.0).map(|(e, _)| e).collect()
    }

    pub fn predict(&self, ds: &Dataset) -> Vec<Prediction> {
        ds.instances
            .par_iter()
            .map(|u| Prediction {
                id: u.id.clone(),
                predicted: self.predict_text(&u.masked_text),
            })
            .collect()
    }
}

/// Hinge-loss subgradient descent with step `1/(reg·t)`, the bias being a
/// regularized constant feature. `w` is kept as `s·v` so the shrink step
/// costs O(1).
fn train_scorer(xs: &[Vec<usize>], ys: &[f64], dim: usize, hyper: &Hyper, seed: u64) -> Scorer {
    let mut v = vec![0.0; dim];
    let mut vb = 0.0;
    let mut s = 1.0;
    let mut t = 0u64;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..hyper.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (hyper.reg * t as f64);
            let margin = ys[i] * s * (vb + xs[i].iter().map(|&j| v[j]).sum::<f64>());
            s *= 1.0 - eta * hyper.reg;
            if s <= 0.0 {
                v.iter_mut().for_each(|w| *w = 0.0);
                vb = 0.0;
                s = 1.0;
            }
            if margin < 1.0 {
                let step = eta * ys[i] / s;
                for &j in &xs[i] {
                    v[j] += step;
                }
                vb += step;
            }
        }
    }
    Scorer {
        bias: vb * s,
        weights: v.into_iter().map(|w| w * s).collect(),
    }
}

pub fn train_baseline(train: &Dataset, hyper: &Hyper) -> Result<BaselineModel, EvalError> {
    train_on(&train.instances, hyper)
}

/// As [`train_baseline`], over any slice of utterances.
pub fn train_on(train: &[Utterance], hyper: &Hyper) -> Result<BaselineModel, EvalError> {
    if train.is_empty() {
        return Err(EvalError::EmptyTrainingSet);
    }
    let grams: Vec<BTreeSet<String>> = train.iter().map(|u| ngrams(&u.masked_text)).collect();
    let vocabulary: Vec<String> = grams.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut model = BaselineModel {
        hyper: *hyper,
        vocabulary,
        scorers: BTreeMap::new(),
        index: HashMap::new(),
    };
    model.build_index();
    let xs: Vec<Vec<usize>> = grams
        .iter()
        .map(|g| g.iter().map(|f| model.index[f]).collect())
        .collect();
    let dim = model.vocabulary.len();
    model.scorers = BasicEmotion::ALL
        .par_iter()
        .map(|&e| {
            let ys: Vec<f64> = train.iter().map(|u| if u.labels.contains(&e) { 1.0 } else { -1.0 }).collect();
            if ys.iter().all(|&y| y < 0.0) {
                log::warn!("no {e} positives in training data; {e} will never be predicted");
                return (
                    e,
                    Scorer {
                        bias: -1.0,
                        weights: vec![0.0; dim],
                    },
                );
            }
            let seed = hyper.seed ^ (e.index() as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            (e, train_scorer(&xs, &ys, dim, hyper, seed))
        })
        .collect();
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use BasicEmotion::*;

    fn toy() -> Dataset {
        let rows = [
            ("1", "this is awesome work", true),
            ("2", "awesome, thanks for the fix", true),
            ("3", "really awesome patch", true),
            ("4", "please rebase this branch", false),
            ("5", "the build fails on windows", false),
            ("6", "can you add a test", false),
        ];
        let instances = rows
            .iter()
            .map(|(id, text, pos)| Utterance::new(*id, *text, if *pos { vec![Joy] } else { vec![] }))
            .collect();
        Dataset::new(instances, "toy").unwrap()
    }

    #[test]
    fn ngram_features() {
        let g = ngrams("Nice <code>, thanks!");
        let expected: BTreeSet<String> = ["nice", "<code>", "thanks", "nice <code>", "<code> thanks"]
            .map(String::from)
            .into();
        assert_eq!(g, expected);
    }

    #[test]
    fn separable_toy_set() {
        let ds = toy();
        let model = train_baseline(&ds, &Hyper::default()).unwrap();
        for p in model.predict(&ds) {
            let gold = &ds.instances.iter().find(|u| u.id == p.id).unwrap().labels;
            assert_eq!(p.predicted.contains(&Joy), gold.contains(&Joy), "{}", p.id);
            assert!(!p.predicted.contains(&Fear));
        }
    }

    #[test]
    fn deterministic_and_round_trips() {
        let ds = toy();
        let a = train_baseline(&ds, &Hyper::default()).unwrap();
        let b = train_baseline(&ds, &Hyper::default()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let back = BaselineModel::from_json(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back.predict(&ds), a.predict(&ds));
    }

    #[test]
    fn empty_text_uses_bias_only() {
        let model = train_baseline(&toy(), &Hyper::default()).unwrap();
        let scores = model.scores("");
        assert_eq!(scores[&Joy], model.scorers[&Joy].bias);
    }

    #[test]
    fn empty_training_set_is_an_error() {
        assert!(matches!(
            train_baseline(&Dataset::default(), &Hyper::default()),
            Err(EvalError::EmptyTrainingSet)
        ));
    }
}
