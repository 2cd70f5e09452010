//! Plain NPY v1.0 label arrays: 2-D, C order, little-endian integers of
//! 1–4 bytes.

use npyz::{DType, Endianness, NpyFile, Order, TypeChar};

use super::RawGrid;

pub(super) const MAGIC: &[u8] = b"\x93NUMPY";

pub(super) fn decode(bytes: &[u8]) -> Result<RawGrid, String> {
    match bytes.get(6..8) {
        Some([1, 0]) => {}
        Some([major, minor]) => return Err(format!("NPY version {major}.{minor} is not supported (expected 1.0)")),
        _ => return Err("truncated NPY preamble".into()),
    }
    let file = NpyFile::new(bytes).map_err(|e| format!("bad NPY header: {e}"))?;
    if file.order() == Order::Fortran {
        return Err("Fortran-ordered arrays are not supported".into());
    }
    let (height, width) = match *file.shape() {
        [h, w] => (h as usize, w as usize),
        ref other => return Err(format!("expected a 2-D array, got shape {other:?}")),
    };
    let ts = match file.dtype() {
        DType::Plain(ts) => ts,
        other => return Err(format!("unsupported dtype {}", other.descr())),
    };
    if ts.endianness() == Endianness::Big {
        return Err(format!("big-endian dtype {ts} is not supported"));
    }
    let values: Vec<u32> = match (ts.type_char(), ts.size_field()) {
        (TypeChar::Uint, 1) => widen(file.into_vec::<u8>(), |v| Ok(u32::from(v)))?,
        (TypeChar::Uint, 2) => widen(file.into_vec::<u16>(), |v| Ok(u32::from(v)))?,
        (TypeChar::Uint, 4) => widen(file.into_vec::<u32>(), Ok)?,
        (TypeChar::Int, 1) => widen(file.into_vec::<i8>(), |v| non_negative(i64::from(v)))?,
        (TypeChar::Int, 2) => widen(file.into_vec::<i16>(), |v| non_negative(i64::from(v)))?,
        (TypeChar::Int, 4) => widen(file.into_vec::<i32>(), |v| non_negative(i64::from(v)))?,
        _ => return Err(format!("unsupported dtype {ts}; expected a 1-4 byte integer")),
    };
    if values.len() != width * height {
        return Err(format!(
            "array holds {} values but shape is {height}x{width}",
            values.len()
        ));
    }
    Ok(RawGrid { width, height, values })
}

fn non_negative(v: i64) -> Result<u32, String> {
    u32::try_from(v).map_err(|_| format!("negative label value {v}"))
}

fn widen<T>(data: std::io::Result<Vec<T>>, f: impl Fn(T) -> Result<u32, String>) -> Result<Vec<u32>, String> {
    data.map_err(|e| format!("bad NPY payload: {e}"))?
        .into_iter()
        .map(f)
        .collect()
}
