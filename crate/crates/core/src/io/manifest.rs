//! Augmentation manifests: one JSON object per line, one line per sample.
//!
//! Floats are written in shortest round-trip form, so reading a manifest back
//! recovers every bit of `lambda_raw` and `lambda_eff`.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::mixer::{BatchSample, PatchRect, Scheme};
use crate::saliency::MethodTag;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRecord {
    pub index: u64,
    pub source_id: String,
    pub target_id: String,
    pub lambda_raw: f64,
    pub lambda_eff: f64,
    pub src_rect: PatchRect,
    pub tgt_rect: PatchRect,
    pub scheme: Scheme,
    pub method: MethodTag,
    pub seed: u64,
}

impl ManifestRecord {
    pub fn from_sample(sample: &BatchSample, dataset: &Dataset, seed: u64) -> Self {
        let plan = &sample.sample.plan;
        Self {
            index: sample.index as u64,
            source_id: dataset.get(sample.source_index).id.clone(),
            target_id: dataset.get(sample.target_index).id.clone(),
            lambda_raw: plan.lambda_raw,
            lambda_eff: plan.lambda_eff,
            src_rect: plan.src_rect,
            tgt_rect: plan.tgt_rect,
            scheme: plan.scheme,
            method: plan.method,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_raw.is_finite() && self.lambda_raw > 0.0 && self.lambda_raw < 1.0) {
            return Err(Error::NumericDomain(format!(
                "record {}: lambda_raw {} outside (0, 1)",
                self.index, self.lambda_raw
            )));
        }
        if !(self.lambda_eff.is_finite() && (0.0..=1.0).contains(&self.lambda_eff)) {
            return Err(Error::NumericDomain(format!(
                "record {}: lambda_eff {} outside [0, 1]",
                self.index, self.lambda_eff
            )));
        }
        if (self.src_rect.w, self.src_rect.h) != (self.tgt_rect.w, self.tgt_rect.h) {
            return Err(Error::Shape(format!(
                "record {}: rect sizes differ",
                self.index
            )));
        }
        Ok(())
    }

    pub fn to_line(&self) -> Result<String> {
        self.validate()?;
        serde_json::to_string(self).map_err(|e| Error::NumericDomain(e.to_string()))
    }
}

/// Streams records to disk in index order, buffering any that arrive early.
pub struct ManifestWriter<W: Write> {
    out: W,
    next: u64,
    pending: BTreeMap<u64, String>,
}

impl ManifestWriter<BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io_at(path, e))?;
        Ok(Self::new(BufWriter::new(file)))
    }
}

impl<W: Write> ManifestWriter<W> {
    pub fn new(out: W) -> Self {
        Self {
            out,
            next: 0,
            pending: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, record: &ManifestRecord) -> Result<()> {
        if record.index < self.next || self.pending.contains_key(&record.index) {
            return Err(Error::InvalidArgument(format!(
                "duplicate manifest index {}",
                record.index
            )));
        }
        self.pending.insert(record.index, record.to_line()?);
        while let Some(line) = self.pending.remove(&self.next) {
            writeln!(self.out, "{line}")?;
            self.next += 1;
        }
        Ok(())
    }

    /// Flushes and returns the sink. Fails if any index below the highest
    /// pushed one is still missing.
    pub fn finish(mut self) -> Result<W> {
        if let Some((&first, _)) = self.pending.iter().next() {
            return Err(Error::InvalidArgument(format!(
                "manifest gap: index {} missing before {first}",
                self.next
            )));
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

pub fn write_manifest(records: &[ManifestRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut w = ManifestWriter::create(path)?;
    for r in records {
        w.push(r)?;
    }
    w.finish()?;
    Ok(())
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let record: ManifestRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        record.validate().map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        if record.index != out.len() as u64 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected index {}, found {}", out.len(), record.index),
            });
        }
        out.push(record);
    }
    Ok(out)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestRecord>> {
    let path = path.as_ref();
    parse_manifest(&fs::read_to_string(path).map_err(|e| Error::io_at(path, e))?)
}
