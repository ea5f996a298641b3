//! JSON state files.
//!
//! ```json
//! {"dims": [2, 2], "kind": "pure", "data": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]}
//! ```
//!
//! `data` holds `[re, im]` pairs: a length-D vector for `"pure"` and a
//! row-major D x D matrix for `"mixed"`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{CMatrix, CVector, DensityMatrix, PureState, SystemShape, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Pure,
    Mixed,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    dims: Vec<usize>,
    kind: Kind,
    data: serde_json::Value,
}

#[derive(Clone, Debug)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn shape(&self) -> &SystemShape {
        match self {
            State::Pure(p) => p.shape(),
            State::Mixed(m) => m.shape(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => p.density(),
            State::Mixed(m) => m.clone(),
        }
    }

    /// The pure state, or the rank-one content of a mixed state.
    pub fn as_pure(&self) -> Option<PureState> {
        match self {
            State::Pure(p) => Some(p.clone()),
            State::Mixed(m) => m.as_pure(),
        }
    }
}

fn complex(v: &serde_json::Value, at: &str) -> Result<C64> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Format(format!("{at}: expected [re, im] pair")))?;
    let re = pair[0]
        .as_f64()
        .ok_or_else(|| Error::Format(format!("{at}: real part is not a number")))?;
    let im = pair[1]
        .as_f64()
        .ok_or_else(|| Error::Format(format!("{at}: imaginary part is not a number")))?;
    Ok(C64::new(re, im))
}

fn array<'a>(v: &'a serde_json::Value, len: usize, at: &str) -> Result<&'a Vec<serde_json::Value>> {
    let a = v
        .as_array()
        .ok_or_else(|| Error::Format(format!("{at}: expected an array")))?;
    if a.len() != len {
        return Err(Error::Format(format!(
            "{at}: expected {len} entries, found {}",
            a.len()
        )));
    }
    Ok(a)
}

pub fn parse_state(text: &str) -> Result<State> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Format(format!("invalid JSON: {e}")))?;
    let shape = SystemShape::new(file.dims).map_err(|e| Error::Format(e.to_string()))?;
    let d = shape.total_dim();
    match file.kind {
        Kind::Pure => {
            let rows = array(&file.data, d, "data")?;
            let v = rows
                .iter()
                .enumerate()
                .map(|(i, z)| complex(z, &format!("data[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Ok(State::Pure(PureState::new(shape, CVector::from_vec(v))?))
        }
        Kind::Mixed => {
            let rows = array(&file.data, d, "data")?;
            let mut m = CMatrix::zeros(d, d);
            for (i, row) in rows.iter().enumerate() {
                let cols = array(row, d, &format!("data[{i}]"))?;
                for (j, z) in cols.iter().enumerate() {
                    m[(i, j)] = complex(z, &format!("data[{i}][{j}]"))?;
                }
            }
            Ok(State::Mixed(DensityMatrix::new(shape, m)?))
        }
    }
}

pub fn read_state(path: &Path) -> Result<State> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_state(&text)
}

fn pair(z: &C64) -> serde_json::Value {
    serde_json::json!([z.re, z.im])
}

pub fn state_to_json(state: &State) -> String {
    let (kind, data) = match state {
        State::Pure(p) => (Kind::Pure, p.amplitudes().iter().map(pair).collect()),
        State::Mixed(m) => {
            let mat = m.matrix();
            let rows = (0..mat.nrows())
                .map(|i| serde_json::Value::Array((0..mat.ncols()).map(|j| pair(&mat[(i, j)])).collect()))
                .collect();
            (Kind::Mixed, rows)
        }
    };
    let file = StateFile {
        dims: state.shape().dims().to_vec(),
        kind,
        data: serde_json::Value::Array(data),
    };
    serde_json::to_string(&file).expect("state serializes")
}
