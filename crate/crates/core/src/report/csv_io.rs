use std::collections::HashSet;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::mask_io::Channel;
use crate::stats::{AnovaResult, GroupStats};

use super::{fmt_opt, fmt_sig, io_err, ReportError};

pub const SUBJECT_COLUMNS: [&str; 13] = [
    "group",
    "image_id",
    "channel",
    "label",
    "area_px",
    "area_um2",
    "perimeter_um",
    "roundness",
    "centroid_x_px",
    "centroid_y_px",
    "paired_label",
    "ratio",
    "flags",
];
pub const IMAGE_COLUMNS: [&str; 9] = [
    "group",
    "image_id",
    "n_cells",
    "n_nuclei",
    "coverage_cells",
    "coverage_nuclei",
    "density_per_mm2",
    "voronoi_entropy",
    "mean_csm",
];
pub const GROUP_COLUMNS: [&str; 7] = ["group", "feature", "n", "mean", "std", "min", "max"];
pub const ANOVA_COLUMNS: [&str; 5] = ["feature", "f_stat", "df_between", "df_within", "p_value"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SubjectFlags {
    pub small: bool,
    pub multi_nucleate: bool,
    pub clamped_roundness: bool,
}

impl SubjectFlags {
    fn encode(&self) -> String {
        let mut parts = Vec::new();
        if self.small {
            parts.push("small");
        }
        if self.multi_nucleate {
            parts.push("multi_nucleate");
        }
        if self.clamped_roundness {
            parts.push("clamped_roundness");
        }
        parts.join(";")
    }

    fn decode(s: &str) -> Result<Self, String> {
        let mut flags = Self::default();
        for part in s.split(';').filter(|p| !p.is_empty()) {
            match part {
                "small" => flags.small = true,
                "multi_nucleate" => flags.multi_nucleate = true,
                "clamped_roundness" => flags.clamped_roundness = true,
                other => return Err(format!("unknown flag {other:?}")),
            }
        }
        Ok(flags)
    }
}

/// One row of `subjects.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub group: String,
    pub image_id: String,
    pub channel: Channel,
    pub label: u32,
    pub area_px: usize,
    pub area_um2: f64,
    pub perimeter_um: f64,
    pub roundness: f64,
    pub centroid_x_px: f64,
    pub centroid_y_px: f64,
    pub paired_label: Option<u32>,
    pub ratio: Option<f64>,
    pub flags: SubjectFlags,
}

/// One row of `images.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRecord {
    pub group: String,
    pub image_id: String,
    pub n_cells: usize,
    pub n_nuclei: usize,
    pub coverage_cells: f64,
    pub coverage_nuclei: f64,
    pub density_per_mm2: f64,
    pub voronoi_entropy: Option<f64>,
    pub mean_csm: Option<f64>,
}

/// One row of `anova.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnovaRecord {
    pub feature: String,
    pub f_stat: f64,
    pub df_between: u32,
    pub df_within: u32,
    pub p_value: f64,
}

impl From<&AnovaResult> for AnovaRecord {
    fn from(r: &AnovaResult) -> Self {
        Self {
            feature: r.feature.clone(),
            f_stat: r.f_stat,
            df_between: r.df_between,
            df_within: r.df_within,
            p_value: r.p_value,
        }
    }
}

fn create(path: &Path) -> Result<csv::Writer<File>, ReportError> {
    let file = File::create(path).map_err(io_err(path))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(file))
}

fn write_rows<const N: usize>(
    path: &Path,
    header: [&str; N],
    rows: impl Iterator<Item = [String; N]>,
) -> Result<(), ReportError> {
    let csv_err = |source| ReportError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = create(path)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    let mut file = w.into_inner().map_err(|e| ReportError::Io {
        path: path.to_path_buf(),
        source: e.into_error(),
    })?;
    file.flush().map_err(io_err(path))
}

fn read_rows<const N: usize>(path: &Path, header: [&str; N]) -> Result<Vec<[String; N]>, ReportError> {
    let csv_err = |source| ReportError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::ReaderBuilder::new().from_path(path).map_err(csv_err)?;
    let found: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if found != header {
        return Err(ReportError::Parse {
            path: path.to_path_buf(),
            row: 0,
            reason: format!("unexpected header {found:?}"),
        });
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        out.push(fields.try_into().map_err(|_| ReportError::Parse {
            path: path.to_path_buf(),
            row: out.len() + 1,
            reason: "wrong field count".into(),
        })?);
    }
    Ok(out)
}

struct Fields<'a> {
    path: &'a Path,
    row: usize,
}

impl Fields<'_> {
    fn err(&self, reason: String) -> ReportError {
        ReportError::Parse {
            path: self.path.to_path_buf(),
            row: self.row,
            reason,
        }
    }

    fn parse<T: std::str::FromStr>(&self, name: &str, s: &str) -> Result<T, ReportError> {
        s.parse().map_err(|_| self.err(format!("bad {name} {s:?}")))
    }

    fn opt<T: std::str::FromStr>(&self, name: &str, s: &str) -> Result<Option<T>, ReportError> {
        if s.is_empty() {
            Ok(None)
        } else {
            self.parse(name, s).map(Some)
        }
    }
}

/// Write `subjects.csv` sorted by (group, image, channel, label).
pub fn write_subject_csv(records: &[FeatureRecord], path: &Path) -> Result<(), ReportError> {
    let mut sorted: Vec<&FeatureRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.group, &a.image_id, a.channel, a.label).cmp(&(&b.group, &b.image_id, b.channel, b.label))
    });
    let mut seen = HashSet::new();
    for r in &sorted {
        if !seen.insert((&r.group, &r.image_id, r.channel, r.label)) {
            return Err(ReportError::DuplicateKey(format!(
                "{}/{}/{}/{}",
                r.group, r.image_id, r.channel, r.label
            )));
        }
    }
    write_rows(
        path,
        SUBJECT_COLUMNS,
        sorted.into_iter().map(|r| {
            [
                r.group.clone(),
                r.image_id.clone(),
                r.channel.to_string(),
                r.label.to_string(),
                r.area_px.to_string(),
                fmt_sig(r.area_um2),
                fmt_sig(r.perimeter_um),
                fmt_sig(r.roundness),
                fmt_sig(r.centroid_x_px),
                fmt_sig(r.centroid_y_px),
                r.paired_label.map(|l| l.to_string()).unwrap_or_default(),
                fmt_opt(r.ratio),
                r.flags.encode(),
            ]
        }),
    )
}

pub fn read_subject_csv(path: &Path) -> Result<Vec<FeatureRecord>, ReportError> {
    read_rows(path, SUBJECT_COLUMNS)?
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let p = Fields { path, row: i + 1 };
            Ok(FeatureRecord {
                group: f[0].clone(),
                image_id: f[1].clone(),
                channel: f[2].parse().map_err(|e: String| p.err(e))?,
                label: p.parse("label", &f[3])?,
                area_px: p.parse("area_px", &f[4])?,
                area_um2: p.parse("area_um2", &f[5])?,
                perimeter_um: p.parse("perimeter_um", &f[6])?,
                roundness: p.parse("roundness", &f[7])?,
                centroid_x_px: p.parse("centroid_x_px", &f[8])?,
                centroid_y_px: p.parse("centroid_y_px", &f[9])?,
                paired_label: p.opt("paired_label", &f[10])?,
                ratio: p.opt("ratio", &f[11])?,
                flags: SubjectFlags::decode(&f[12]).map_err(|e| p.err(e))?,
            })
        })
        .collect()
}

/// Write `images.csv` sorted by (group, image).
pub fn write_image_csv(records: &[ImageRecord], path: &Path) -> Result<(), ReportError> {
    let mut sorted: Vec<&ImageRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (&a.group, &a.image_id).cmp(&(&b.group, &b.image_id)));
    if let Some(w) = sorted
        .windows(2)
        .find(|w| (&w[0].group, &w[0].image_id) == (&w[1].group, &w[1].image_id))
    {
        return Err(ReportError::DuplicateKey(format!("{}/{}", w[0].group, w[0].image_id)));
    }
    write_rows(
        path,
        IMAGE_COLUMNS,
        sorted.into_iter().map(|r| {
            [
                r.group.clone(),
                r.image_id.clone(),
                r.n_cells.to_string(),
                r.n_nuclei.to_string(),
                fmt_sig(r.coverage_cells),
                fmt_sig(r.coverage_nuclei),
                fmt_sig(r.density_per_mm2),
                fmt_opt(r.voronoi_entropy),
                fmt_opt(r.mean_csm),
            ]
        }),
    )
}

pub fn read_image_csv(path: &Path) -> Result<Vec<ImageRecord>, ReportError> {
    read_rows(path, IMAGE_COLUMNS)?
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let p = Fields { path, row: i + 1 };
            Ok(ImageRecord {
                group: f[0].clone(),
                image_id: f[1].clone(),
                n_cells: p.parse("n_cells", &f[2])?,
                n_nuclei: p.parse("n_nuclei", &f[3])?,
                coverage_cells: p.parse("coverage_cells", &f[4])?,
                coverage_nuclei: p.parse("coverage_nuclei", &f[5])?,
                density_per_mm2: p.parse("density_per_mm2", &f[6])?,
                voronoi_entropy: p.opt("voronoi_entropy", &f[7])?,
                mean_csm: p.opt("mean_csm", &f[8])?,
            })
        })
        .collect()
}

/// Write `groups.csv`, rows sorted by group, features kept in input order.
pub fn write_group_csv(stats: &[GroupStats], path: &Path) -> Result<(), ReportError> {
    let mut sorted: Vec<&GroupStats> = stats.iter().collect();
    sorted.sort_by(|a, b| a.group.cmp(&b.group));
    let mut seen = HashSet::new();
    for s in &sorted {
        if !seen.insert((&s.group, &s.feature)) {
            return Err(ReportError::DuplicateKey(format!("{}/{}", s.group, s.feature)));
        }
    }
    write_rows(
        path,
        GROUP_COLUMNS,
        sorted.into_iter().map(|s| {
            [
                s.group.clone(),
                s.feature.clone(),
                s.n.to_string(),
                fmt_sig(s.mean),
                fmt_sig(s.std),
                fmt_sig(s.min),
                fmt_sig(s.max),
            ]
        }),
    )
}

pub fn read_group_csv(path: &Path) -> Result<Vec<GroupStats>, ReportError> {
    read_rows(path, GROUP_COLUMNS)?
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let p = Fields { path, row: i + 1 };
            Ok(GroupStats {
                group: f[0].clone(),
                feature: f[1].clone(),
                n: p.parse("n", &f[2])?,
                mean: p.parse("mean", &f[3])?,
                std: p.parse("std", &f[4])?,
                min: p.parse("min", &f[5])?,
                max: p.parse("max", &f[6])?,
            })
        })
        .collect()
}

/// Write `anova.csv`, one row per feature in input order.
pub fn write_anova_csv(results: &[AnovaRecord], path: &Path) -> Result<(), ReportError> {
    let mut seen = HashSet::new();
    for r in results {
        if !seen.insert(&r.feature) {
            return Err(ReportError::DuplicateKey(r.feature.clone()));
        }
    }
    write_rows(
        path,
        ANOVA_COLUMNS,
        results.iter().map(|r| {
            [
                r.feature.clone(),
                fmt_sig(r.f_stat),
                r.df_between.to_string(),
                r.df_within.to_string(),
                fmt_sig(r.p_value),
            ]
        }),
    )
}

pub fn read_anova_csv(path: &Path) -> Result<Vec<AnovaRecord>, ReportError> {
    read_rows(path, ANOVA_COLUMNS)?
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let p = Fields { path, row: i + 1 };
            Ok(AnovaRecord {
                feature: f[0].clone(),
                f_stat: p.parse("f_stat", &f[1])?,
                df_between: p.parse("df_between", &f[2])?,
                df_within: p.parse("df_within", &f[3])?,
                p_value: p.parse("p_value", &f[4])?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(label: u32, channel: Channel) -> FeatureRecord {
        FeatureRecord {
            group: "g,1".into(),
            image_id: "img".into(),
            channel,
            label,
            area_px: 100,
            area_um2: 39.0625,
            perimeter_um: 22.5,
            roundness: 0.9696273622190652,
            centroid_x_px: 6.5,
            centroid_y_px: 6.5,
            paired_label: Some(3),
            ratio: None,
            flags: SubjectFlags {
                small: true,
                clamped_roundness: true,
                ..Default::default()
            },
        }
    }

    #[test]
    fn empty_subjects_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_subject_csv(&[], &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), SUBJECT_COLUMNS.join(",") + "\n");
    }

    #[test]
    fn one_subject_two_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_subject_csv(&[record(1, Channel::Nuclei)], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[1],
            "\"g,1\",img,nuclei,1,100,39.0625,22.5,0.969627,6.5,6.5,3,,small;clamped_roundness"
        );
        let back = read_subject_csv(&path).unwrap();
        assert_eq!(back[0].roundness, 0.969627);
        assert_eq!(back[0].flags, record(1, Channel::Nuclei).flags);
    }

    #[test]
    fn rows_sorted_and_duplicates_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let recs = [record(2, Channel::Nuclei), record(5, Channel::Cytoplasm), record(1, Channel::Nuclei)];
        write_subject_csv(&recs, &path).unwrap();
        let back = read_subject_csv(&path).unwrap();
        let keys: Vec<_> = back.iter().map(|r| (r.channel, r.label)).collect();
        assert_eq!(keys, [(Channel::Cytoplasm, 5), (Channel::Nuclei, 1), (Channel::Nuclei, 2)]);
        let dup = [record(2, Channel::Nuclei), record(2, Channel::Nuclei)];
        assert!(matches!(write_subject_csv(&dup, &path), Err(ReportError::DuplicateKey(_))));
    }

    #[test]
    fn anova_infinite_f_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        let rec = AnovaRecord {
            feature: "ratio".into(),
            f_stat: f64::INFINITY,
            df_between: 1,
            df_within: 4,
            p_value: 0.0,
        };
        write_anova_csv(std::slice::from_ref(&rec), &path).unwrap();
        assert_eq!(read_anova_csv(&path).unwrap(), vec![rec]);
    }
}
