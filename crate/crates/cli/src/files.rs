use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sl0::linalg::{parse_matrix, parse_vector, DenseMatrix, DenseVector};
use sl0::Sl0Error;

#[derive(Debug)]
pub enum CliError {
    Lib(Sl0Error),
    /// A library error attributed to an input file.
    Input(PathBuf, Sl0Error),
    Io(PathBuf, io::Error),
    Usage(String),
}

impl CliError {
    /// 2 usage, 3 parse, 4 rank deficient, 5 threshold unreachable,
    /// 6 enumeration guard, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) | CliError::Input(_, e) => match e {
                Sl0Error::Parse { .. } | Sl0Error::NonFinite { .. } | Sl0Error::Empty => 3,
                Sl0Error::RankDeficient { .. } => 4,
                Sl0Error::ThresholdUnreachable { .. } => 5,
                Sl0Error::TooLarge { .. } => 6,
                Sl0Error::InvalidConfig(_)
                | Sl0Error::NonPositiveSigma(_)
                | Sl0Error::DimensionMismatch(_)
                | Sl0Error::NotUnderdetermined { .. } => 2,
                _ => 1,
            },
            CliError::Usage(_) => 2,
            CliError::Io(..) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Input(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Usage(msg) => f.write_str(msg),
        }
    }
}

impl From<Sl0Error> for CliError {
    fn from(e: Sl0Error) -> Self {
        CliError::Lib(e)
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix, CliError> {
    parse_matrix(&read_text(path)?).map_err(|e| CliError::Input(path.to_path_buf(), e))
}

pub fn read_vector(path: &Path) -> Result<DenseVector, CliError> {
    parse_vector(&read_text(path)?).map_err(|e| CliError::Input(path.to_path_buf(), e))
}

fn temp_path(path: &Path) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
    path.with_file_name(format!(".{name}.{}.tmp", std::process::id()))
}

/// Writes every file to a temporary sibling first and renames them into
/// place only once all writes succeeded.
pub fn write_all(outputs: &[(PathBuf, String)]) -> Result<(), CliError> {
    let mut staged = Vec::with_capacity(outputs.len());
    for (path, contents) in outputs {
        let tmp = temp_path(path);
        if let Err(e) = fs::write(&tmp, contents) {
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(CliError::Io(path.clone(), e));
        }
        staged.push((tmp, path));
    }
    for (tmp, path) in &staged {
        fs::rename(tmp, path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    }
    Ok(())
}
