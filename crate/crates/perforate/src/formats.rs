//! Bitmaps, CSV tables and binary snapshot grids.

use perforate_core::geometry::{CellState, FilledRaster};
use perforate_core::pde::PdeSolution;
use perforate_core::percolation::LatticeField;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Plain PBM of a 2D field, top row first; `1` marks a blocked vertex.
pub fn field_to_pbm(field: &LatticeField) -> Result<Vec<u8>> {
    if field.dim() != 2 {
        return Err(Error::Format("PBM export needs a 2D field".into()));
    }
    let n = field.n();
    let mut out = format!("P1\n{n} {n}\n");
    for y in (0..n).rev() {
        let row: Vec<&str> = (0..n)
            .map(|x| if field.is_open(field.index([x, y, 0])) { "0" } else { "1" })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out.into_bytes())
}

pub fn field_from_pbm(bytes: &[u8]) -> Result<LatticeField> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::Format("PBM is not ASCII".into()))?;
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    if tokens.next() != Some("P1") {
        return Err(Error::Format("expected a plain PBM (P1)".into()));
    }
    let mut dim = || -> Result<usize> {
        tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Format("bad PBM header".into()))
    };
    let (w, h) = (dim()?, dim()?);
    if w != h || w == 0 {
        return Err(Error::Format("field bitmaps are square".into()));
    }
    let bits: Vec<&str> = tokens.collect();
    if bits.len() != w * h {
        return Err(Error::Format(format!("expected {} pixels, found {}", w * h, bits.len())));
    }
    let mut open = vec![false; w * h];
    for (k, b) in bits.iter().enumerate() {
        let (x, y) = (k % w, h - 1 - k / w);
        open[x + w * y] = match *b {
            "0" => true,
            "1" => false,
            _ => return Err(Error::Format("PBM pixels must be 0 or 1".into())),
        };
    }
    Ok(LatticeField::from_open(2, w, open)?)
}

pub const PGM_COVERED: u8 = 0;
pub const PGM_ISLAND: u8 = 128;
pub const PGM_VACANT: u8 = 255;

/// Binary PGM of a 2D filled raster, top row first.
pub fn raster_to_pgm(raster: &FilledRaster) -> Result<Vec<u8>> {
    let g = &raster.grid;
    if g.dim != 2 {
        return Err(Error::Format("PGM export needs a 2D raster".into()));
    }
    let (w, h) = (g.shape[0], g.shape[1]);
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    for j in (0..h).rev() {
        for i in 0..w {
            out.push(match raster.state(g.index(i, j, 0)) {
                CellState::Covered => PGM_COVERED,
                CellState::VacantIsland => PGM_ISLAND,
                CellState::VacantUnbounded => PGM_VACANT,
            });
        }
    }
    Ok(out)
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<csv buffer>", e))?;
    w.into_inner().map_err(|e| Error::Format(e.to_string()))
}

/// Sidecar describing a snapshot file: `f64` little endian, shape
/// `[snapshots, ny, nx]`, x fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotSidecar {
    pub format: String,
    pub shape: [usize; 3],
    pub dx: f64,
    pub dy: f64,
    pub times: Vec<f64>,
    pub active_cells: usize,
    pub params_hash: String,
}

pub fn snapshots_to_bytes(sol: &PdeSolution, params_hash: &str) -> (Vec<u8>, Vec<u8>) {
    let mut bin = Vec::with_capacity(sol.snapshots.len() * sol.nx * sol.ny * 8);
    for snap in &sol.snapshots {
        for v in snap {
            bin.extend_from_slice(&v.to_le_bytes());
        }
    }
    let sidecar = SnapshotSidecar {
        format: "f64-le".into(),
        shape: [sol.snapshots.len(), sol.ny, sol.nx],
        dx: sol.dx,
        dy: sol.dy,
        times: sol.times.clone(),
        active_cells: sol.active.iter().filter(|&&a| a).count(),
        params_hash: params_hash.into(),
    };
    let mut json = serde_json::to_vec_pretty(&sidecar).expect("sidecar serializes");
    json.push(b'\n');
    (bin, json)
}

pub fn snapshots_from_bytes(bin: &[u8], sidecar: &SnapshotSidecar) -> Result<Vec<Vec<f64>>> {
    let [s, ny, nx] = sidecar.shape;
    if sidecar.format != "f64-le" || bin.len() != s * ny * nx * 8 {
        return Err(Error::Format("snapshot file does not match its sidecar".into()));
    }
    let values: Vec<f64> = bin
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(values.chunks(nx * ny).map(<[f64]>::to_vec).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pbm_round_trip() {
        let mut f = LatticeField::all_open(2, 3);
        f.set_open(f.index([0, 2, 0]), false);
        f.set_open(f.index([2, 0, 0]), false);
        let bytes = field_to_pbm(&f).unwrap();
        assert_eq!(std::str::from_utf8(&bytes).unwrap(), "P1\n3 3\n1 0 0\n0 0 0\n0 0 1\n");
        assert_eq!(field_from_pbm(&bytes).unwrap(), f);
    }

    #[test]
    fn snapshots_round_trip() {
        let sol = PdeSolution {
            nx: 2,
            ny: 1,
            dx: 0.5,
            dy: 1.0,
            active: vec![true, false],
            times: vec![0.0, 0.1],
            snapshots: vec![vec![1.0, 0.0], vec![0.5, -2.0]],
            l2_sq: vec![0.0; 2],
            grad_sq: vec![0.0; 2],
            mass: vec![0.0; 2],
            cg_iterations: 0,
            max_residual: 0.0,
        };
        let (bin, json) = snapshots_to_bytes(&sol, "abc");
        let side: SnapshotSidecar = serde_json::from_slice(&json).unwrap();
        assert_eq!(side.shape, [2, 1, 2]);
        assert_eq!(snapshots_from_bytes(&bin, &side).unwrap(), sol.snapshots);
    }

    #[test]
    fn csv_has_header() {
        #[derive(Serialize)]
        struct Row {
            n: usize,
            p: f64,
        }
        let out = to_csv(&[Row { n: 2, p: 0.5 }]).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "n,p\n2,0.5\n");
    }
}
