#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use image::{ImageBuffer, Luma};

pub const SIDE: usize = 200;
const GRID: usize = 6;
const BLOCK: usize = 30;
const OFFSET: usize = 10;

pub fn write_label_png(path: &Path, width: usize, height: usize, labels: &[u32]) {
    let img: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_fn(width as u32, height as u32, |x, y| Luma([labels[y as usize * width + x as usize] as u16]));
    img.save(path).unwrap();
}

/// 6×6 grid of square cells, each holding one square nucleus. `nucleus`
/// is the nucleus side and `shift` a per-image jitter seed.
pub fn synthetic_pair(nucleus: usize, shift: usize) -> (Vec<u32>, Vec<u32>) {
    let mut cells = vec![0u32; SIDE * SIDE];
    let mut nuclei = vec![0u32; SIDE * SIDE];
    for gy in 0..GRID {
        for gx in 0..GRID {
            let label = (gy * GRID + gx + 1) as u32;
            let (x0, y0) = (OFFSET + gx * BLOCK, OFFSET + gy * BLOCK);
            for y in y0..y0 + BLOCK {
                for x in x0..x0 + BLOCK {
                    cells[y * SIDE + x] = label;
                }
            }
            let jitter = (label as usize * 7 + shift * 3) % 5;
            let nx = x0 + (BLOCK - nucleus) / 2 + jitter - 2;
            let ny = y0 + (BLOCK - nucleus) / 2 + (jitter * 3) % 5 - 2;
            for y in ny..ny + nucleus {
                for x in nx..nx + nucleus {
                    nuclei[y * SIDE + x] = label;
                }
            }
        }
    }
    (cells, nuclei)
}

/// Two groups × three images under `root`.
pub fn build_fixture(root: &Path) {
    for (g, nucleus) in [("g1", 10), ("g2", 12)] {
        let dir = root.join(g);
        std::fs::create_dir_all(&dir).unwrap();
        for i in 0..3 {
            let (cells, nuclei) = synthetic_pair(nucleus, i);
            write_label_png(&dir.join(format!("img{i}_cyto.png")), SIDE, SIDE, &cells);
            write_label_png(&dir.join(format!("img{i}_nuclei.png")), SIDE, SIDE, &nuclei);
        }
    }
}

pub fn cellmorph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellmorph")).args(args).output().unwrap()
}

pub fn analyze(root: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["analyze", "--root", root.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    cellmorph(&args)
}

pub fn files_with_suffix(dir: &Path, suffix: &str) -> Vec<PathBuf> {
    let mut out = Vec::new();
    if let Ok(rd) = std::fs::read_dir(dir) {
        for e in rd.flatten() {
            let p = e.path();
            if p.is_dir() {
                out.extend(files_with_suffix(&p, suffix));
            } else if p.to_string_lossy().ends_with(suffix) {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

/// Warning count from the summary line of `run.log`.
pub fn logged_warnings(out: &Path) -> usize {
    let log = std::fs::read_to_string(out.join("run.log")).unwrap();
    let last = log.lines().last().unwrap();
    let count = last.rsplit(", ").next().unwrap();
    count.split_whitespace().next().unwrap().parse().unwrap()
}
