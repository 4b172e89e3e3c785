//! CSV time series and binary field snapshots.
//!
//! Snapshot layout (little-endian):
//!
//! | bytes | content                                   |
//! |-------|-------------------------------------------|
//! | 4     | magic `ELCF`                              |
//! | 1     | version, `1`                              |
//! | 1     | dim (`u8`)                                |
//! | 4     | res (`u32`)                               |
//! | 8     | length (`f64`)                            |
//! | 8     | t (`f64`)                                 |
//! | ...   | u components then d components, each `res^dim` `f64`, row-major, last axis fastest |

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::spectral::{Field, Grid};
use crate::state::FluidState;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "t,u_l2,grad_d_l2,omega_l2,omega_linf,grad_d_linf,hess_d_l2,energy,dissipation,monitor_integrand,monitor_accum,sphere_norm_err,sphere_identity_err";

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"ELCF";
pub const SNAPSHOT_VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 1 + 4 + 8 + 8;

fn row(r: &DiagnosticsRecord) -> [f64; 13] {
    [
        r.t,
        r.u_l2,
        r.grad_d_l2,
        r.omega_l2,
        r.omega_linf,
        r.grad_d_linf,
        r.hess_d_l2,
        r.energy,
        r.dissipation,
        r.monitor_integrand,
        r.monitor_accum,
        r.sphere_norm_err,
        r.sphere_identity_err,
    ]
}

pub fn format_timeseries(history: &[DiagnosticsRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in history {
        // `{:?}` prints the shortest string that round-trips exactly.
        let cells: Vec<String> = row(r).iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_timeseries(history: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    std::fs::write(path, format_timeseries(history)).map_err(|e| Error::io(path, e))
}

pub fn parse_timeseries(text: &str) -> Result<Vec<DiagnosticsRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Format("time series header mismatch".into()));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let vals: Vec<f64> = line
                .split(',')
                .map(|c| c.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Format(format!("row {}: {e}", i + 1)))?;
            if vals.len() != 13 {
                return Err(Error::Format(format!(
                    "row {}: expected 13 columns, got {}",
                    i + 1,
                    vals.len()
                )));
            }
            Ok(DiagnosticsRecord {
                t: vals[0],
                u_l2: vals[1],
                grad_d_l2: vals[2],
                omega_l2: vals[3],
                omega_linf: vals[4],
                grad_d_linf: vals[5],
                hess_d_l2: vals[6],
                energy: vals[7],
                dissipation: vals[8],
                monitor_integrand: vals[9],
                monitor_accum: vals[10],
                sphere_norm_err: vals[11],
                sphere_identity_err: vals[12],
            })
        })
        .collect()
}

pub fn read_timeseries(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_timeseries(&text)
}

/// Exact snapshot size for a grid.
pub fn snapshot_len(dim: usize, res: usize) -> usize {
    HEADER_LEN + (dim + 3) * res.pow(dim as u32) * 8
}

pub fn encode_snapshot(s: &FluidState) -> Vec<u8> {
    let grid = s.grid();
    let mut buf = Vec::with_capacity(snapshot_len(grid.dim(), grid.res()));
    buf.extend_from_slice(SNAPSHOT_MAGIC);
    buf.push(SNAPSHOT_VERSION);
    buf.push(grid.dim() as u8);
    buf.extend_from_slice(&(grid.res() as u32).to_le_bytes());
    buf.extend_from_slice(&grid.length().to_le_bytes());
    buf.extend_from_slice(&s.t().to_le_bytes());
    for comp in s.u_values().iter().chain(s.d_values()) {
        for v in comp {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    buf
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<FluidState> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "truncated header: {} bytes",
            bytes.len()
        )));
    }
    if &bytes[..4] != SNAPSHOT_MAGIC {
        return Err(Error::Format("bad magic bytes".into()));
    }
    if bytes[4] != SNAPSHOT_VERSION {
        return Err(Error::Format(format!("unsupported version {}", bytes[4])));
    }
    let dim = bytes[5] as usize;
    let res = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let length = f64::from_le_bytes(bytes[10..18].try_into().unwrap());
    let t = f64::from_le_bytes(bytes[18..26].try_into().unwrap());
    let grid = Grid::shared(dim, res, length).map_err(|e| Error::Format(e.to_string()))?;
    let expected = snapshot_len(dim, res);
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "expected {expected} bytes, found {}",
            bytes.len()
        )));
    }
    let n = grid.len();
    let mut comps: Vec<Vec<f64>> = bytes[HEADER_LEN..]
        .chunks_exact(n * 8)
        .map(|chunk| {
            chunk
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                .collect()
        })
        .collect();
    let d = comps.split_off(dim);
    FluidState::new(
        Field::from_physical(grid.clone(), comps)?,
        Field::from_physical(grid, d)?,
        t,
    )
}

pub fn write_snapshot(s: &FluidState, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&encode_snapshot(s))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<FluidState> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    decode_snapshot(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::random_smooth;
    use std::f64::consts::PI;

    #[test]
    fn empty_history_is_header_only() {
        assert_eq!(format_timeseries(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn zero_record_row() {
        let text = format_timeseries(&[DiagnosticsRecord {
            t: 0.25,
            ..Default::default()
        }]);
        let row = text.lines().nth(1).unwrap();
        assert_eq!(row, format!("0.25{}", ",0.0".repeat(12)));
    }

    #[test]
    fn snapshot_layout() {
        let g = Grid::shared(2, 8, 2.0 * PI).unwrap();
        let s = random_smooth(&g, 1, 4.0, 0.5).unwrap().with_time(0.75);
        let bytes = encode_snapshot(&s);
        assert_eq!(bytes.len(), 5 + 1 + 4 + 16 + 5 * 64 * 8);
        assert_eq!(&bytes[..6], b"ELCF\x01\x02");
        assert_eq!(&bytes[6..10], &8u32.to_le_bytes());
        assert_eq!(&bytes[18..26], &0.75f64.to_le_bytes());
        // first u sample follows the header
        assert_eq!(&bytes[26..34], &s.u().values()[0][0].to_le_bytes());
    }

    #[test]
    fn corrupt_snapshots_are_rejected() {
        let g = Grid::shared(2, 8, 2.0 * PI).unwrap();
        let bytes = encode_snapshot(&FluidState::quiescent(g));
        for cut in [0, 3, 25, 26, bytes.len() - 1] {
            assert!(matches!(
                decode_snapshot(&bytes[..cut]),
                Err(Error::Format(_))
            ));
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_snapshot(&bad).is_err());
        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(decode_snapshot(&bad).is_err());
        let mut bad = bytes;
        bad[5] = 7;
        assert!(decode_snapshot(&bad).is_err());
    }

    #[test]
    fn bad_csv_is_rejected() {
        assert!(parse_timeseries("t,u\n").is_err());
        assert!(parse_timeseries(&format!("{CSV_HEADER}\n1,2,3\n")).is_err());
    }
}
