//! JSON tensor format: `{"dims": [d1, .., dN], "data": [[re, im], ..]}` with
//! `data` in row-major order, last party fastest.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{ComplexTensor, PureState, Shape, DEFAULT_MAX_TOTAL};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorFile {
    dims: Vec<usize>,
    data: Vec<[f64; 2]>,
}

pub fn tensor_to_json(t: &ComplexTensor) -> String {
    let file = TensorFile {
        dims: t.dims().to_vec(),
        data: t.data().iter().map(|z| [z.re, z.im]).collect(),
    };
    serde_json::to_string(&file).expect("finite tensor serializes")
}

/// Parses the tensor format; non-finite entries, wrong lengths and shapes
/// beyond the default cap are rejected.
pub fn tensor_from_json(text: &str) -> Result<ComplexTensor> {
    let file: TensorFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let shape = Shape::with_limit(file.dims, DEFAULT_MAX_TOTAL)?;
    if file.data.len() != shape.total() {
        return Err(Error::Parse(format!(
            "data has {} entries, dims need {}",
            file.data.len(),
            shape.total()
        )));
    }
    if file.data.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Parse("non-finite coefficient".into()));
    }
    ComplexTensor::new(shape, file.data.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<ComplexTensor> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    tensor_from_json(&text)
}

pub fn write_tensor(path: impl AsRef<Path>, t: &ComplexTensor) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, tensor_to_json(t)).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Reads a tensor and normalizes it into a state.
pub fn read_state(path: impl AsRef<Path>) -> Result<PureState> {
    PureState::from_tensor(read_tensor(path)?)
}
