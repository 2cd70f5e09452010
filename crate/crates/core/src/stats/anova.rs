use super::{mean, StatsError};

/// One-way ANOVA outcome for one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct AnovaResult {
    pub feature: String,
    pub f_stat: f64,
    pub df_between: u32,
    pub df_within: u32,
    pub p_value: f64,
    pub group_means: Vec<f64>,
    pub grand_mean: f64,
}

/// Plain (equal-variance) one-way ANOVA over `groups`.
pub fn one_way_anova(feature: &str, groups: &[Vec<f64>]) -> Result<AnovaResult, StatsError> {
    let k = groups.len();
    if k < 2 {
        return Err(StatsError::TooFewGroups(k));
    }
    if let Some((index, g)) = groups.iter().enumerate().find(|(_, g)| g.len() < 2) {
        return Err(StatsError::GroupTooSmall { index, n: g.len() });
    }
    if let Some(v) = groups.iter().flatten().find(|v| !v.is_finite()) {
        return Err(StatsError::InvalidArgument(format!("non-finite sample {v}")));
    }
    let n_total: usize = groups.iter().map(Vec::len).sum();
    let group_means: Vec<f64> = groups.iter().map(|g| mean(g)).collect();
    let grand_mean = groups.iter().flatten().sum::<f64>() / n_total as f64;

    let ss_between: f64 = groups
        .iter()
        .zip(&group_means)
        .map(|(g, m)| g.len() as f64 * (m - grand_mean).powi(2))
        .sum();
    let ss_within: f64 = groups
        .iter()
        .zip(&group_means)
        .map(|(g, m)| g.iter().map(|x| (x - m).powi(2)).sum::<f64>())
        .sum();
    let df_between = (k - 1) as u32;
    let df_within = (n_total - k) as u32;
    let ms_between = ss_between / f64::from(df_between);
    let ms_within = ss_within / f64::from(df_within);

    let (f_stat, p_value) = if ms_within == 0.0 {
        if ms_between > 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            (0.0, 1.0)
        }
    } else {
        let f = ms_between / ms_within;
        (f, super::f_sf(f, df_between, df_within)?.clamp(0.0, 1.0))
    };

    Ok(AnovaResult {
        feature: feature.to_string(),
        f_stat,
        df_between,
        df_within,
        p_value,
        group_means,
        grand_mean,
    })
}
