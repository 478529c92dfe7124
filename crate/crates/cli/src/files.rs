//! On-disk artifacts. Every loader accepts either the bare object or a
//! result envelope whose payload holds it, so stages compose through files.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use shallowscope::parenth::LocalHamiltonian;
use shallowscope::qcore::linalg::{matrix_from_rows, matrix_to_rows};
use shallowscope::tomography::MarginalEstimateSet;
use shallowscope::{DensityMatrix, LayeredCircuit, PureState, QubitSubset};

use crate::error::CliError;

/// `{"n": 2, "amplitudes": [[re, im], ...]}`, basis index order with
/// qubit 0 most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&PureState> for StateFile {
    fn from(psi: &PureState) -> Self {
        Self {
            n: psi.n_qubits(),
            amplitudes: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// `{"n": 2, "matrix": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub n: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl From<&DensityMatrix> for DensityFile {
    fn from(rho: &DensityMatrix) -> Self {
        Self {
            n: rho.n_qubits(),
            matrix: matrix_to_rows(rho.matrix()),
        }
    }
}

/// Interaction graph: `{"n": 4, "subsets": [[0, 1], [1, 2]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub subsets: Vec<Vec<usize>>,
}

fn read_value(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(path, e))
}

/// The object stored under `key`, looking inside an envelope payload
/// first; falls back to the whole document.
fn artifact(path: &Path, key: &str) -> Result<Value, CliError> {
    let mut v = read_value(path)?;
    if let Some(p) = v.get_mut("payload") {
        v = p.take();
    }
    if let Some(inner) = v.get_mut(key) {
        return Ok(inner.take());
    }
    Ok(v)
}

fn decode<T: DeserializeOwned>(path: &Path, v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::input(path, e))
}

pub fn load_circuit(path: &Path) -> Result<LayeredCircuit, CliError> {
    let v = artifact(path, "circuit")?;
    LayeredCircuit::from_json(&v.to_string()).map_err(|e| CliError::input(path, e))
}

pub fn load_state(path: &Path) -> Result<PureState, CliError> {
    let file: StateFile = decode(path, artifact(path, "state")?)?;
    if file.amplitudes.len() != 1usize << file.n {
        return Err(CliError::input(
            path,
            format!("{} amplitudes for {} qubits", file.amplitudes.len(), file.n),
        ));
    }
    let amps = file
        .amplitudes
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    PureState::new(amps).map_err(|e| CliError::input(path, e))
}

/// A density file, or a state file read as a pure density matrix.
pub fn load_density(path: &Path) -> Result<DensityMatrix, CliError> {
    let v = artifact(path, "density")?;
    if v.get("matrix").is_none() {
        return Ok(load_state(path)?.density_matrix());
    }
    let file: DensityFile = decode(path, v)?;
    let m = matrix_from_rows(&file.matrix)
        .ok_or_else(|| CliError::input(path, "density matrix is not square"))?;
    if m.nrows() != 1usize << file.n {
        return Err(CliError::input(path, format!("matrix size {} for {} qubits", m.nrows(), file.n)));
    }
    DensityMatrix::new(m).map_err(|e| CliError::input(path, e))
}

pub fn load_hamiltonian(path: &Path) -> Result<LocalHamiltonian, CliError> {
    let v = artifact(path, "hamiltonian")?;
    LocalHamiltonian::from_json(&v.to_string()).map_err(|e| CliError::input(path, e))
}

pub fn load_estimates(path: &Path) -> Result<MarginalEstimateSet, CliError> {
    let v = artifact(path, "estimates")?;
    MarginalEstimateSet::from_json(&v.to_string()).map_err(|e| CliError::input(path, e))
}

/// A graph file, or a bare list of subsets when `n` is known.
pub fn load_graph(path: &Path, n: usize) -> Result<Vec<QubitSubset>, CliError> {
    let v = artifact(path, "graph")?;
    let (file_n, lists) = match v {
        Value::Array(_) => (n, decode::<Vec<Vec<usize>>>(path, v)?),
        other => {
            let g: GraphFile = decode(path, other)?;
            (g.n, g.subsets)
        }
    };
    if file_n != n {
        return Err(CliError::input(path, format!("graph is on {file_n} qubits, state on {n}")));
    }
    lists
        .into_iter()
        .map(|s| QubitSubset::new(s, n).map_err(|e| CliError::input(path, e)))
        .collect()
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Output {
        path: path.to_owned(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_round_trip_through_envelope() {
        let dir = tempfile::tempdir().unwrap();
        let psi = PureState::ghz(3);
        let bare = dir.path().join("bare.json");
        write_text(&bare, &serde_json::to_string(&StateFile::from(&psi)).unwrap()).unwrap();
        assert_eq!(load_state(&bare).unwrap(), psi);

        let wrapped = dir.path().join("env.json");
        let env = serde_json::json!({"payload": {"state": StateFile::from(&psi)}});
        write_text(&wrapped, &env.to_string()).unwrap();
        assert_eq!(load_state(&wrapped).unwrap(), psi);
        let rho = load_density(&wrapped).unwrap();
        assert_eq!(rho, psi.density_matrix());
    }

    #[test]
    fn graph_forms() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.json");
        write_text(&p, "[[0,1],[1,2]]").unwrap();
        assert_eq!(load_graph(&p, 3).unwrap().len(), 2);
        write_text(&p, r#"{"n":3,"subsets":[[2]]}"#).unwrap();
        assert_eq!(load_graph(&p, 3).unwrap()[0].indices(), &[2]);
        assert!(load_graph(&p, 4).is_err());
        write_text(&p, "[[0,5]]").unwrap();
        assert!(load_graph(&p, 3).is_err());
    }

    #[test]
    fn bad_state_is_an_input_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.json");
        write_text(&p, r#"{"n":1,"amplitudes":[[1,0],[1,0]]}"#).unwrap();
        assert_eq!(load_state(&p).unwrap_err().exit_code(), 2);
    }
}
