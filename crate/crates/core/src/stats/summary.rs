use std::collections::BTreeMap;

use super::{mean, sample_std, StatsError};

/// Descriptive statistics of one feature within one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub group: String,
    pub feature: String,
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1); 0 when `n = 1`.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl GroupStats {
    pub fn from_samples(group: &str, feature: &str, values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        Some(Self {
            group: group.to_string(),
            feature: feature.to_string(),
            n: values.len(),
            mean: mean(values),
            std: sample_std(values),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

/// Per-image feature values keyed by group. Missing values are allowed and
/// skipped by the aggregations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureTable {
    features: Vec<String>,
    rows: Vec<FeatureRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub group: String,
    pub image_id: String,
    pub values: Vec<Option<f64>>,
}

impl FeatureTable {
    pub fn new<S: Into<String>>(features: impl IntoIterator<Item = S>) -> Self {
        Self {
            features: features.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn rows(&self) -> &[FeatureRow] {
        &self.rows
    }

    /// Append a row; `values` follows the order of [`FeatureTable::features`].
    pub fn push(&mut self, group: &str, image_id: &str, values: Vec<Option<f64>>) -> Result<(), StatsError> {
        if values.len() != self.features.len() {
            return Err(StatsError::InvalidArgument(format!(
                "row has {} values for {} features",
                values.len(),
                self.features.len()
            )));
        }
        self.rows.push(FeatureRow {
            group: group.to_string(),
            image_id: image_id.to_string(),
            values,
        });
        Ok(())
    }

    fn column(&self, feature: &str) -> Result<usize, StatsError> {
        self.features
            .iter()
            .position(|f| f == feature)
            .ok_or_else(|| StatsError::UnknownFeature(feature.to_string()))
    }

    /// Present values of `feature`, grouped and ordered by group name.
    pub fn samples(&self, feature: &str) -> Result<BTreeMap<String, Vec<f64>>, StatsError> {
        let col = self.column(feature)?;
        let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for row in &self.rows {
            let slot = out.entry(row.group.clone()).or_default();
            if let Some(v) = row.values[col] {
                slot.push(v);
            }
        }
        Ok(out)
    }
}

/// Stats of `feature` per group, ordered by group name. Groups without any
/// value for the feature are omitted.
pub fn summarize_groups(table: &FeatureTable, feature: &str) -> Result<Vec<GroupStats>, StatsError> {
    Ok(table
        .samples(feature)?
        .iter()
        .filter_map(|(group, values)| GroupStats::from_samples(group, feature, values))
        .collect())
}
