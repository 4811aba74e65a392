//! Dataset-level driver.
//!
//! Sample `k` owns the eight-draw RNG window starting at counter `8k`:
//!
//! | slot | use                                             |
//! |------|-------------------------------------------------|
//! | 0    | source index                                    |
//! | 1-5  | target index; redrawn while it equals the source |
//! | 6    | combination ratio                               |
//! | 7    | apply gate                                      |
//!
//! Results therefore depend only on `(dataset, count, seed, scheme, method)`
//! and never on thread count or scheduling.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use super::{mix_with_maps, AugmentedSample, MixPlan, PatchRect, Scheme};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::saliency::{detect, PeakLocation, SaliencyMethod};
use crate::types::SaliencyMap;

pub const SLOTS_PER_SAMPLE: u64 = 8;
const SLOT_SOURCE: u64 = 0;
const SLOT_TARGET: u64 = 1;
const TARGET_ATTEMPTS: u64 = 5;
const SLOT_LAMBDA: u64 = 6;
const SLOT_GATE: u64 = 7;
/// Counter offset of the permutation stream, disjoint from per-sample windows.
const PERMUTATION_BASE: u64 = 1 << 63;

/// Samples processed per parallel chunk before handing results to the sink.
const CHUNK: usize = 1024;

/// How sources are matched with targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pairing {
    /// Independent uniform draws with replacement; self-pairs are redrawn.
    #[default]
    Random,
    /// Target `k mod n` receives a patch from `perm[k mod n]` of a seeded shuffle.
    Permutation,
}

#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub count: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub method: SaliencyMethod,
    pub pairing: Pairing,
    /// Probability of mixing; otherwise the target passes through unchanged.
    pub apply_probability: f64,
    pub cache_saliency: bool,
    pub threads: usize,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            count: 0,
            seed: 0,
            scheme: Scheme::Sal2Corr,
            method: SaliencyMethod::default(),
            pairing: Pairing::Random,
            apply_probability: 1.0,
            cache_saliency: false,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSample {
    pub index: usize,
    pub source_index: usize,
    pub target_index: usize,
    /// False when the apply gate passed the target through unmixed.
    pub applied: bool,
    pub sample: AugmentedSample,
}

/// Runs the batch and collects every sample in index order.
pub fn augment_batch(dataset: &Dataset, config: &BatchConfig) -> Result<Vec<BatchSample>> {
    let mut out = Vec::with_capacity(config.count);
    augment_batch_with(dataset, config, |s| {
        out.push(s);
        Ok(())
    })?;
    Ok(out)
}

/// Runs the batch, handing samples to `sink` strictly in index order.
pub fn augment_batch_with(
    dataset: &Dataset,
    config: &BatchConfig,
    mut sink: impl FnMut(BatchSample) -> Result<()>,
) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("dataset has no items".into()));
    }
    if !(0.0..=1.0).contains(&config.apply_probability) {
        return Err(Error::InvalidArgument(format!(
            "apply probability {} outside [0, 1]",
            config.apply_probability
        )));
    }
    if config.count == 0 {
        return Ok(());
    }
    let driver = Driver::new(dataset, config);
    let pool = if config.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.threads)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };

    let mut start = 0;
    while start < config.count {
        let end = (start + CHUNK).min(config.count);
        let chunk: Vec<BatchSample> = match &pool {
            Some(pool) => pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map(|k| driver.sample(k))
                    .collect::<Result<_>>()
            })?,
            None => (start..end)
                .map(|k| driver.sample(k))
                .collect::<Result<_>>()?,
        };
        for s in chunk {
            sink(s)?;
        }
        start = end;
    }
    Ok(())
}

/// Source and target indices for sample `k` under random pairing.
pub fn draw_pair(seed: u64, k: usize, n: usize) -> (usize, usize) {
    let base = k as u64 * SLOTS_PER_SAMPLE;
    let source = RngState::new(seed, base + SLOT_SOURCE).index(n);
    if n == 1 {
        return (0, 0);
    }
    for attempt in 0..TARGET_ATTEMPTS - 1 {
        let t = RngState::new(seed, base + SLOT_TARGET + attempt).index(n);
        if t != source {
            return (source, t);
        }
    }
    // last slot draws directly among the other n-1 items, which has the same
    // conditional distribution as redrawing until distinct
    let t = RngState::new(seed, base + SLOT_TARGET + TARGET_ATTEMPTS - 1).index(n - 1);
    (source, if t >= source { t + 1 } else { t })
}

/// Seeded Fisher-Yates shuffle of `0..n`.
pub fn permutation(seed: u64, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = RngState::new(seed, PERMUTATION_BASE);
    for i in (1..n).rev() {
        let j = rng.index(i + 1);
        perm.swap(i, j);
    }
    perm
}

struct Driver<'a> {
    dataset: &'a Dataset,
    config: &'a BatchConfig,
    perm: Option<Vec<usize>>,
    cache: Option<Vec<OnceLock<Arc<SaliencyMap>>>>,
}

impl<'a> Driver<'a> {
    fn new(dataset: &'a Dataset, config: &'a BatchConfig) -> Self {
        let perm = (config.pairing == Pairing::Permutation)
            .then(|| permutation(config.seed, dataset.len()));
        let cache = config
            .cache_saliency
            .then(|| (0..dataset.len()).map(|_| OnceLock::new()).collect());
        Self {
            dataset,
            config,
            perm,
            cache,
        }
    }

    fn saliency(&self, index: usize) -> Result<Arc<SaliencyMap>> {
        let compute = || detect(&self.config.method, &self.dataset.get(index).image).map(Arc::new);
        match &self.cache {
            None => compute(),
            Some(cache) => {
                if let Some(m) = cache[index].get() {
                    return Ok(m.clone());
                }
                let m = compute()?;
                Ok(cache[index].get_or_init(|| m).clone())
            }
        }
    }

    fn sample(&self, k: usize) -> Result<BatchSample> {
        let cfg = self.config;
        let n = self.dataset.len();
        let (source_index, target_index) = match &self.perm {
            Some(perm) => (perm[k % n], k % n),
            None => draw_pair(cfg.seed, k, n),
        };
        let base = k as u64 * SLOTS_PER_SAMPLE;
        let lambda = RngState::new(cfg.seed, base + SLOT_LAMBDA).uniform();
        let gate = RngState::new(cfg.seed, base + SLOT_GATE).uniform();
        let applied = gate < cfg.apply_probability;

        let src = self.dataset.get(source_index);
        let tgt = self.dataset.get(target_index);
        let sample = if applied {
            let src_map = self.saliency(source_index)?;
            let tgt_map = if cfg.scheme.needs_target_map() {
                Some(self.saliency(target_index)?)
            } else {
                None
            };
            mix_with_maps(
                &src.image,
                &self.dataset.one_hot(source_index),
                &tgt.image,
                &self.dataset.one_hot(target_index),
                cfg.scheme,
                cfg.method.tag(),
                &src_map,
                tgt_map.as_deref(),
                lambda,
            )?
        } else {
            let (w, h) = (tgt.image.width(), tgt.image.height());
            AugmentedSample {
                image: tgt.image.clone(),
                label: self.dataset.one_hot(target_index),
                plan: MixPlan {
                    lambda_raw: lambda,
                    lambda_eff: 1.0,
                    src_rect: PatchRect::default(),
                    tgt_rect: PatchRect::default(),
                    scheme: cfg.scheme,
                    method: cfg.method.tag(),
                    src_peak: PeakLocation::center_of(w, h),
                    tgt_anchor: None,
                },
            }
        };
        Ok(BatchSample {
            index: k,
            source_index,
            target_index,
            applied,
            sample,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::DatasetItem;
    use crate::types::Image;

    fn tiny_dataset(n: usize) -> Dataset {
        let items = (0..n)
            .map(|i| DatasetItem {
                id: format!("img{i}"),
                image: Image::from_fn_rgb(12, 12, |x, y| {
                    [(x * 20 + i) as u8, (y * 20) as u8, (i * 40) as u8]
                })
                .unwrap(),
                label: i % 3,
            })
            .collect();
        Dataset::new(items, 3).unwrap()
    }

    #[test]
    fn empty_dataset_rejected() {
        let ds = Dataset::new(vec![], 3).unwrap();
        let cfg = BatchConfig {
            count: 3,
            ..Default::default()
        };
        assert!(matches!(
            augment_batch(&ds, &cfg),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn zero_count_is_empty() {
        let out = augment_batch(&tiny_dataset(3), &BatchConfig::default()).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn pairs_are_distinct_and_in_range() {
        for n in 2..8 {
            for k in 0..500 {
                let (s, t) = draw_pair(3, k, n);
                assert!(s < n && t < n && s != t);
            }
        }
        assert_eq!(draw_pair(3, 9, 1), (0, 0));
    }

    #[test]
    fn permutation_is_a_permutation() {
        let mut p = permutation(11, 50);
        p.sort_unstable();
        assert_eq!(p, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn single_item_dataset_self_pairs() {
        let cfg = BatchConfig {
            count: 4,
            seed: 2,
            ..Default::default()
        };
        let out = augment_batch(&tiny_dataset(1), &cfg).unwrap();
        assert!(out
            .iter()
            .all(|s| s.source_index == 0 && s.target_index == 0));
    }

    #[test]
    fn thread_count_does_not_matter() {
        let ds = tiny_dataset(6);
        for scheme in Scheme::ALL {
            let one = BatchConfig {
                count: 40,
                seed: 9,
                scheme,
                ..Default::default()
            };
            let four = BatchConfig {
                threads: 4,
                cache_saliency: true,
                ..one.clone()
            };
            assert_eq!(
                augment_batch(&ds, &one).unwrap(),
                augment_batch(&ds, &four).unwrap()
            );
        }
    }

    #[test]
    fn apply_probability_extremes() {
        let ds = tiny_dataset(4);
        let off = BatchConfig {
            count: 30,
            seed: 1,
            apply_probability: 0.0,
            ..Default::default()
        };
        for s in augment_batch(&ds, &off).unwrap() {
            assert!(!s.applied);
            assert_eq!(s.sample.image, ds.get(s.target_index).image);
            assert_eq!(s.sample.label, ds.one_hot(s.target_index));
            s.sample.plan.validate(12, 12).unwrap();
        }
        let on = BatchConfig {
            apply_probability: 1.0,
            ..off
        };
        assert!(augment_batch(&ds, &on).unwrap().iter().all(|s| s.applied));
        assert!(augment_batch(
            &ds,
            &BatchConfig {
                apply_probability: 1.5,
                count: 1,
                ..Default::default()
            }
        )
        .is_err());
    }

    #[test]
    fn permutation_pairing_targets_batch_element() {
        let ds = tiny_dataset(5);
        let cfg = BatchConfig {
            count: 10,
            seed: 4,
            pairing: Pairing::Permutation,
            ..Default::default()
        };
        let perm = permutation(4, 5);
        for s in augment_batch(&ds, &cfg).unwrap() {
            assert_eq!(s.target_index, s.index % 5);
            assert_eq!(s.source_index, perm[s.index % 5]);
        }
    }

    #[test]
    fn sink_errors_stop_the_run() {
        let ds = tiny_dataset(3);
        let cfg = BatchConfig {
            count: 5,
            ..Default::default()
        };
        let mut seen = 0;
        let res = augment_batch_with(&ds, &cfg, |s| {
            seen += 1;
            if s.index == 2 {
                Err(Error::InvalidArgument("stop".into()))
            } else {
                Ok(())
            }
        });
        assert!(res.is_err());
        assert_eq!(seen, 3);
    }
}
