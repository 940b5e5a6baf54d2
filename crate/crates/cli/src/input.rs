use std::io::Read;
use std::path::Path;

use crystalk_core::lattice::{self, InvolutiveLattice, LatticeError};
use crystalk_core::toruskt::InputMatrix;

use crate::catalog;
use crate::CliError;

/// Reads `{"n": .., "matrix": [[..]]}` from a file, or stdin when no path is given.
pub fn read_input(path: Option<&Path>) -> Result<InputMatrix, CliError> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display())))?,
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Input(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    parse_input(&text)
}

pub fn parse_input(text: &str) -> Result<InputMatrix, CliError> {
    let input: InputMatrix =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid input JSON: {e}")))?;
    let m = &input.matrix;
    if input.n == 0 {
        return Err(CliError::Input("n must be at least 1".into()));
    }
    if m.rows() != input.n || m.cols() != input.n {
        return Err(CliError::Input(format!(
            "\"n\" is {} but the matrix is {}x{}",
            input.n,
            m.rows(),
            m.cols()
        )));
    }
    Ok(input)
}

pub fn validate(input: &InputMatrix) -> Result<InvolutiveLattice, CliError> {
    lattice::validate_involution(&input.matrix).map_err(|e| match e {
        LatticeError::NotSquare { .. } => CliError::Input(e.to_string()),
        LatticeError::NotInvolution { .. } => CliError::NotInvolution(e.to_string()),
    })
}

/// Input from `--entry NAME` if given, else from the file or stdin.
pub fn load(path: Option<&Path>, entry: Option<&str>) -> Result<InvolutiveLattice, CliError> {
    let input = match entry {
        Some(name) => {
            let e = catalog::find(name)?;
            InputMatrix { n: e.n, matrix: e.matrix.clone() }
        }
        None => read_input(path)?,
    };
    validate(&input)
}
