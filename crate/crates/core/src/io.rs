//! JSON file formats for states and channels.
//!
//! Floats are written in shortest round-trip form and parsed with correct
//! rounding, so a write-then-read cycle reproduces every entry bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::states::{BipartiteState, DensityMatrix, PureState};

#[derive(Debug, Serialize, Deserialize)]
struct DensityFile {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_a: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PureFile {
    dim: usize,
    amp_re: Vec<f64>,
    amp_im: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixParts {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ChannelFile {
    d_in: usize,
    d_out: usize,
    kraus: Vec<MatrixParts>,
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidState(format!("field `{field}`: {msg}"))
}

fn check_grid(field: &str, rows: &[Vec<f64>], n_rows: usize, n_cols: usize) -> Result<()> {
    if rows.len() != n_rows {
        return Err(field_error(
            field,
            format!("expected {n_rows} rows, got {}", rows.len()),
        ));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n_cols {
            return Err(field_error(
                field,
                format!("row {i} has {} entries, expected {n_cols}", r.len()),
            ));
        }
        if let Some(j) = r.iter().position(|x| !x.is_finite()) {
            return Err(field_error(
                field,
                format!("entry ({i}, {j}) is not finite"),
            ));
        }
    }
    Ok(())
}

fn parts_to_matrix(
    field: &str,
    re: &[Vec<f64>],
    im: &[Vec<f64>],
    rows: usize,
    cols: usize,
) -> Result<ComplexMatrix> {
    check_grid(&format!("{field}re"), re, rows, cols)?;
    check_grid(&format!("{field}im"), im, rows, cols)?;
    ComplexMatrix::from_parts(re, im)
}

/// A state read from a file, with subsystem dimensions when recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedState {
    pub state: DensityMatrix,
    pub subsystems: Option<(usize, usize)>,
}

impl LoadedState {
    pub fn bipartite(&self) -> Result<Option<BipartiteState>> {
        self.subsystems
            .map(|(d_s, d_a)| BipartiteState::new(d_s, d_a, self.state.clone()))
            .transpose()
    }
}

/// Parses a density-matrix file `{"dim", "re", "im"}` (optionally with
/// `"d_s"`, `"d_a"`) or a pure-state file `{"dim", "amp_re", "amp_im"}`.
pub fn parse_state(text: &str) -> Result<LoadedState> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::InvalidState("expected a JSON object".into()))?;
    if obj.contains_key("amp_re") || obj.contains_key("amp_im") {
        let f: PureFile = serde_json::from_value(value)?;
        for (name, v) in [("amp_re", &f.amp_re), ("amp_im", &f.amp_im)] {
            if v.len() != f.dim {
                return Err(field_error(
                    name,
                    format!("expected {} entries, got {}", f.dim, v.len()),
                ));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(field_error(name, "non-finite entry"));
            }
        }
        let amps = f
            .amp_re
            .iter()
            .zip(&f.amp_im)
            .map(|(&re, &im)| num_complex::Complex64::new(re, im))
            .collect();
        let psi = PureState::new(amps).map_err(|e| field_error("amp_re/amp_im", e))?;
        return Ok(LoadedState {
            state: psi.to_density(),
            subsystems: None,
        });
    }
    let f: DensityFile = serde_json::from_value(value)?;
    if f.dim == 0 {
        return Err(field_error("dim", "must be positive"));
    }
    let m = parts_to_matrix("", &f.re, &f.im, f.dim, f.dim)?;
    let subsystems = match (f.d_s, f.d_a) {
        (None, None) => None,
        (Some(s), Some(a)) if s * a == f.dim && s > 0 => Some((s, a)),
        (Some(s), Some(a)) => {
            return Err(field_error(
                "d_s/d_a",
                format!("{s}x{a} does not factor dim {}", f.dim),
            ))
        }
        _ => return Err(field_error("d_s/d_a", "both or neither must be given")),
    };
    let state = DensityMatrix::new(m).map_err(|e| Error::InvalidState(format!("matrix: {e}")))?;
    Ok(LoadedState { state, subsystems })
}

pub fn state_to_json(rho: &DensityMatrix, subsystems: Option<(usize, usize)>) -> Result<String> {
    let m = rho.matrix();
    let f = DensityFile {
        dim: rho.dim(),
        re: m.real_rows(),
        im: m.imag_rows(),
        d_s: subsystems.map(|s| s.0),
        d_a: subsystems.map(|s| s.1),
    };
    Ok(serde_json::to_string(&f)?)
}

pub fn bipartite_to_json(rho: &BipartiteState) -> Result<String> {
    state_to_json(rho.state(), Some((rho.d_s(), rho.d_a())))
}

pub fn read_state(path: &Path) -> Result<LoadedState> {
    parse_state(&fs::read_to_string(path)?)
}

pub fn write_state(
    path: &Path,
    rho: &DensityMatrix,
    subsystems: Option<(usize, usize)>,
) -> Result<()> {
    let mut s = state_to_json(rho, subsystems)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// Parses `{"d_in", "d_out", "kraus": [{"re", "im"}, ...]}`.
pub fn parse_channel(text: &str) -> Result<KrausChannel> {
    let f: ChannelFile = serde_json::from_str(text)?;
    if f.d_in == 0 || f.d_out == 0 {
        return Err(Error::InvalidChannel(
            "field `d_in`/`d_out`: must be positive".into(),
        ));
    }
    let ops = f
        .kraus
        .iter()
        .enumerate()
        .map(|(l, k)| {
            parts_to_matrix(&format!("kraus[{l}]."), &k.re, &k.im, f.d_out, f.d_in)
                .map_err(|e| Error::InvalidChannel(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::new(ops)
}

pub fn channel_to_json(channel: &KrausChannel) -> Result<String> {
    let f = ChannelFile {
        d_in: channel.d_in(),
        d_out: channel.d_out(),
        kraus: channel
            .kraus_ops()
            .iter()
            .map(|k| MatrixParts {
                re: k.real_rows(),
                im: k.imag_rows(),
            })
            .collect(),
    };
    Ok(serde_json::to_string(&f)?)
}

pub fn read_channel(path: &Path) -> Result<KrausChannel> {
    parse_channel(&fs::read_to_string(path)?)
}

pub fn write_channel(path: &Path, channel: &KrausChannel) -> Result<()> {
    let mut s = channel_to_json(channel)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}
