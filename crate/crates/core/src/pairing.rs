//! Nucleus-to-cell matching by maximal pixel overlap.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::mask_io::{LabelMask, MaskError};

/// One matched cytoplasm/nucleus pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CellNucleusPair {
    pub cell_label: u32,
    pub nucleus_label: u32,
    /// Full cytoplasm area `C_i` in µm².
    pub cell_area_um2: f64,
    /// Nucleus area `N_i` in µm².
    pub nucleus_area_um2: f64,
    /// `C_i / N_i`.
    pub ratio: f64,
    pub overlap_px: usize,
    /// The cell received two or more nuclei.
    pub multi_nucleate: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Pairing {
    /// Ordered by nucleus label.
    pub pairs: Vec<CellNucleusPair>,
    pub unpaired_nuclei: Vec<u32>,
    pub unpaired_cells: Vec<u32>,
}

impl Pairing {
    pub fn pair_for_nucleus(&self, nucleus: u32) -> Option<&CellNucleusPair> {
        self.pairs
            .binary_search_by_key(&nucleus, |p| p.nucleus_label)
            .ok()
            .map(|i| &self.pairs[i])
    }

    /// Pairs whose cell is `cell`, by nucleus label.
    pub fn pairs_for_cell(&self, cell: u32) -> impl Iterator<Item = &CellNucleusPair> {
        self.pairs.iter().filter(move |p| p.cell_label == cell)
    }
}

#[derive(Debug, Error)]
pub enum PairingError {
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error("cytoplasm and nuclei masks use different pixel scales")]
    ScaleMismatch,
}

/// Per-pixel intersection counts `(nucleus, cell) -> px`, plus per-label
/// pixel counts for both channels.
pub fn overlap_counts(cells: &LabelMask, nuclei: &LabelMask) -> Result<OverlapTable, MaskError> {
    cells.ensure_same_shape(nuclei)?;
    let mut table = OverlapTable::default();
    for (&c, &n) in cells.labels().iter().zip(nuclei.labels()) {
        if c != 0 {
            *table.cell_px.entry(c).or_default() += 1;
        }
        if n != 0 {
            *table.nucleus_px.entry(n).or_default() += 1;
            if c != 0 {
                *table.overlap.entry((n, c)).or_default() += 1;
            }
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OverlapTable {
    pub overlap: HashMap<(u32, u32), usize>,
    pub cell_px: HashMap<u32, usize>,
    pub nucleus_px: HashMap<u32, usize>,
}

/// Assign each nucleus to the cell it overlaps most (ties go to the smaller
/// cell label). A cell receiving several nuclei yields one pair per nucleus,
/// each carrying the cell's full area and the `multi_nucleate` flag.
pub fn pair_subjects(cells: &LabelMask, nuclei: &LabelMask) -> Result<Pairing, PairingError> {
    if cells.scale() != nuclei.scale() {
        return Err(PairingError::ScaleMismatch);
    }
    let table = overlap_counts(cells, nuclei)?;
    let area_per_px = cells.scale().area_per_px();

    // best cell per nucleus
    let mut best: BTreeMap<u32, (u32, usize)> = BTreeMap::new();
    for (&(n, c), &px) in &table.overlap {
        let slot = best.entry(n).or_insert((c, px));
        if px > slot.1 || (px == slot.1 && c < slot.0) {
            *slot = (c, px);
        }
    }
    let mut nuclei_per_cell: HashMap<u32, usize> = HashMap::new();
    for &(c, _) in best.values() {
        *nuclei_per_cell.entry(c).or_default() += 1;
    }

    let pairs = best
        .iter()
        .map(|(&n, &(c, px))| {
            let cell_area_um2 = table.cell_px[&c] as f64 * area_per_px;
            let nucleus_area_um2 = table.nucleus_px[&n] as f64 * area_per_px;
            CellNucleusPair {
                cell_label: c,
                nucleus_label: n,
                cell_area_um2,
                nucleus_area_um2,
                ratio: cell_area_um2 / nucleus_area_um2,
                overlap_px: px,
                multi_nucleate: nuclei_per_cell[&c] > 1,
            }
        })
        .collect();

    let mut unpaired_nuclei: Vec<u32> = table
        .nucleus_px
        .keys()
        .copied()
        .filter(|n| !best.contains_key(n))
        .collect();
    unpaired_nuclei.sort_unstable();
    let mut unpaired_cells: Vec<u32> = table
        .cell_px
        .keys()
        .copied()
        .filter(|c| !nuclei_per_cell.contains_key(c))
        .collect();
    unpaired_cells.sort_unstable();

    Ok(Pairing {
        pairs,
        unpaired_nuclei,
        unpaired_cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask_io::{Channel, PixelScale};

    fn blank(w: usize, h: usize, channel: Channel) -> LabelMask {
        LabelMask::new(w, h, vec![0; w * h], channel, PixelScale::default()).unwrap()
    }

    fn fill(mask: &LabelMask, x0: usize, y0: usize, w: usize, h: usize, label: u32) -> LabelMask {
        let mut labels = mask.labels().to_vec();
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                labels[y * mask.width() + x] = label;
            }
        }
        LabelMask::new(mask.width(), mask.height(), labels, mask.channel(), mask.scale()).unwrap()
    }

    #[test]
    fn concentric_squares_ratio_four() {
        let cells = fill(&blank(30, 30, Channel::Cytoplasm), 5, 5, 20, 20, 1);
        let nuclei = fill(&blank(30, 30, Channel::Nuclei), 10, 10, 10, 10, 1);
        let p = pair_subjects(&cells, &nuclei).unwrap();
        assert_eq!(p.pairs.len(), 1);
        assert_eq!(p.pairs[0].ratio, 4.0);
        assert_eq!(p.pairs[0].overlap_px, 100);
        assert!(!p.pairs[0].multi_nucleate);
        assert!(p.unpaired_cells.is_empty() && p.unpaired_nuclei.is_empty());
    }

    #[test]
    fn nucleus_on_background_is_unpaired() {
        let cells = fill(&blank(20, 20, Channel::Cytoplasm), 0, 0, 5, 5, 3);
        let nuclei = fill(&blank(20, 20, Channel::Nuclei), 10, 10, 4, 4, 8);
        let p = pair_subjects(&cells, &nuclei).unwrap();
        assert!(p.pairs.is_empty());
        assert_eq!(p.unpaired_nuclei, vec![8]);
        assert_eq!(p.unpaired_cells, vec![3]);
    }

    #[test]
    fn two_nuclei_in_one_cell() {
        let cells = fill(&blank(20, 20, Channel::Cytoplasm), 0, 0, 20, 10, 1);
        let nuclei = fill(&blank(20, 20, Channel::Nuclei), 1, 1, 3, 3, 1);
        let nuclei = fill(&nuclei, 10, 1, 4, 4, 2);
        let p = pair_subjects(&cells, &nuclei).unwrap();
        assert_eq!(p.pairs.len(), 2);
        assert!(p.pairs.iter().all(|q| q.multi_nucleate && q.cell_label == 1));
        assert_eq!(p.pairs_for_cell(1).count(), 2);
        assert_eq!(p.pair_for_nucleus(2).unwrap().ratio, 200.0 / 16.0);
    }

    #[test]
    fn tie_goes_to_smaller_cell_label() {
        let cells = fill(&blank(10, 10, Channel::Cytoplasm), 0, 0, 5, 10, 7);
        let cells = fill(&cells, 5, 0, 5, 10, 4);
        let nuclei = fill(&blank(10, 10, Channel::Nuclei), 3, 3, 4, 2, 1);
        let p = pair_subjects(&cells, &nuclei).unwrap();
        assert_eq!(p.pairs[0].cell_label, 4);
        assert_eq!(p.unpaired_cells, vec![7]);
    }

    #[test]
    fn mismatched_shapes_and_scales() {
        let a = blank(4, 4, Channel::Cytoplasm);
        let b = blank(5, 4, Channel::Nuclei);
        assert!(matches!(pair_subjects(&a, &b), Err(PairingError::Mask(_))));
        let c = blank(4, 4, Channel::Nuclei).with_scale(PixelScale::from_pitch(2.0).unwrap());
        assert!(matches!(pair_subjects(&a, &c), Err(PairingError::ScaleMismatch)));
    }
}
