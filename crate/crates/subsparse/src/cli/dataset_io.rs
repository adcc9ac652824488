//! Dataset directory export/import: `meta.toml` plus one SSMX container per
//! matrix. Import reproduces X, Z, and Y bit-exactly and re-validates the
//! dataset's structural invariants (including Y = X + Z).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::datagen::{Dataset, NoiseParams};
use crate::geometry::Subspace;

use super::ssmx::{self, Encoding, FormatError};

/// Version of the directory layout (independent of the SSMX version).
pub const DATASET_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    format: String,
    version: u32,
    encoding: Encoding,
    ambient_dim: usize,
    seed: u64,
    uniform_points: bool,
    subspace_dims: Vec<usize>,
    labels: Vec<usize>,
    permutation: Vec<usize>,
    noise: MetaNoise,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaNoise {
    epsilon: f64,
    rho: f64,
}

fn invalid(path: &Path, detail: impl Into<String>) -> FormatError {
    FormatError::Invalid {
        path: path.to_path_buf(),
        detail: detail.into(),
    }
}

fn basis_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("basis_{index:03}.ssmx"))
}

/// Write `dataset` into `dir` (created if missing).
pub fn export_dataset(
    dir: &Path,
    dataset: &Dataset,
    encoding: Encoding,
) -> Result<(), FormatError> {
    std::fs::create_dir_all(dir).map_err(|e| FormatError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let meta = Meta {
        format: "subsparse-dataset".to_string(),
        version: DATASET_VERSION,
        encoding,
        ambient_dim: dataset.ambient_dim(),
        seed: dataset.seed,
        uniform_points: dataset.uniform_points,
        subspace_dims: dataset.subspaces.iter().map(|s| s.dim()).collect(),
        labels: dataset.labels.clone(),
        permutation: dataset.permutation.clone(),
        noise: MetaNoise {
            epsilon: dataset.noise.epsilon_raw(),
            rho: dataset.noise.rho(),
        },
    };
    let meta_path = dir.join("meta.toml");
    let meta_text = toml::to_string_pretty(&meta)
        .map_err(|e| invalid(&meta_path, format!("cannot serialize metadata: {e}")))?;
    std::fs::write(&meta_path, meta_text).map_err(|e| FormatError::Io {
        path: meta_path.clone(),
        source: e,
    })?;
    ssmx::write_matrix(&dir.join("clean.ssmx"), &dataset.x, encoding)?;
    ssmx::write_matrix(&dir.join("noise.ssmx"), &dataset.z, encoding)?;
    ssmx::write_matrix(&dir.join("observed.ssmx"), &dataset.y, encoding)?;
    for (i, s) in dataset.subspaces.iter().enumerate() {
        ssmx::write_matrix(&basis_path(dir, i), s.basis(), encoding)?;
    }
    Ok(())
}

/// Read a dataset directory written by [`export_dataset`], re-checking all
/// structural invariants.
pub fn import_dataset(dir: &Path) -> Result<Dataset, FormatError> {
    let meta_path = dir.join("meta.toml");
    let meta_text = std::fs::read_to_string(&meta_path).map_err(|e| FormatError::Io {
        path: meta_path.clone(),
        source: e,
    })?;
    let meta: Meta = toml::from_str(&meta_text)
        .map_err(|e| invalid(&meta_path, format!("metadata does not parse: {e}")))?;
    if meta.format != "subsparse-dataset" {
        return Err(invalid(
            &meta_path,
            format!("format field is `{}`, expected `subsparse-dataset`", meta.format),
        ));
    }
    if meta.version != DATASET_VERSION {
        return Err(FormatError::VersionMismatch {
            path: meta_path.clone(),
            found: meta.version.to_string(),
            supported: DATASET_VERSION,
        });
    }

    let x = ssmx::read_matrix(&dir.join("clean.ssmx"))?;
    let z = ssmx::read_matrix(&dir.join("noise.ssmx"))?;
    let y = ssmx::read_matrix(&dir.join("observed.ssmx"))?;
    let mut subspaces = Vec::with_capacity(meta.subspace_dims.len());
    for (i, &dim) in meta.subspace_dims.iter().enumerate() {
        let path = basis_path(dir, i);
        let basis = ssmx::read_matrix(&path)?;
        if basis.nrows() != meta.ambient_dim || basis.ncols() != dim {
            return Err(invalid(
                &path,
                format!(
                    "basis is {}x{}, metadata says {}x{}",
                    basis.nrows(),
                    basis.ncols(),
                    meta.ambient_dim,
                    dim
                ),
            ));
        }
        let s = Subspace::from_orthonormal(basis)
            .map_err(|e| invalid(&path, format!("stored basis rejected: {e}")))?;
        subspaces.push(s);
    }
    let noise = NoiseParams::new(meta.noise.epsilon, meta.noise.rho)
        .map_err(|e| invalid(&meta_path, format!("noise parameters rejected: {e}")))?;
    let dataset = Dataset {
        subspaces,
        x,
        z,
        y,
        labels: meta.labels,
        permutation: meta.permutation,
        noise,
        seed: meta.seed,
        uniform_points: meta.uniform_points,
    };
    dataset
        .validate()
        .map_err(|e| invalid(dir, format!("dataset invariants violated: {e}")))?;
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::DatasetParams;

    fn sample_dataset() -> Dataset {
        DatasetParams {
            ambient_dim: 8,
            subspace_dims: vec![2, 2],
            points_per_subspace: vec![6, 5],
            noise: NoiseParams::new(0.02, 0.1).unwrap(),
            seed: 2024,
            min_angle: None,
            uniform_points: true,
        }
        .generate()
        .unwrap()
    }

    fn matrix_bits(m: &nalgebra::DMatrix<f64>) -> Vec<u64> {
        m.as_slice().iter().map(|v| v.to_bits()).collect()
    }

    #[test]
    fn round_trip_is_bit_exact_in_both_encodings() {
        let dataset = sample_dataset();
        for encoding in [Encoding::Text, Encoding::F64le] {
            let dir = tempfile::tempdir().unwrap();
            export_dataset(dir.path(), &dataset, encoding).unwrap();
            let back = import_dataset(dir.path()).unwrap();
            assert_eq!(matrix_bits(&dataset.x), matrix_bits(&back.x));
            assert_eq!(matrix_bits(&dataset.z), matrix_bits(&back.z));
            assert_eq!(matrix_bits(&dataset.y), matrix_bits(&back.y));
            assert_eq!(dataset.labels, back.labels);
            assert_eq!(dataset.permutation, back.permutation);
            assert_eq!(dataset.seed, back.seed);
            assert_eq!(dataset.uniform_points, back.uniform_points);
            assert_eq!(dataset.noise.epsilon().to_bits(), back.noise.epsilon().to_bits());
            for (a, b) in dataset.subspaces.iter().zip(&back.subspaces) {
                assert_eq!(matrix_bits(a.basis()), matrix_bits(b.basis()));
            }
        }
    }

    #[test]
    fn tampered_observed_matrix_is_rejected() {
        let dataset = sample_dataset();
        let dir = tempfile::tempdir().unwrap();
        export_dataset(dir.path(), &dataset, Encoding::F64le).unwrap();
        // Flip one payload byte of Y so Y != X + Z.
        let path = dir.path().join("observed.ssmx");
        let mut bytes = std::fs::read(&path).unwrap();
        let at = bytes.len() - 3;
        bytes[at] ^= 0x40;
        std::fs::write(&path, &bytes).unwrap();
        let err = import_dataset(dir.path()).unwrap_err();
        assert!(matches!(err, FormatError::Invalid { .. }), "got {err:?}");
    }

    #[test]
    fn version_mismatch_names_versions() {
        let dataset = sample_dataset();
        let dir = tempfile::tempdir().unwrap();
        export_dataset(dir.path(), &dataset, Encoding::F64le).unwrap();
        let meta_path = dir.path().join("meta.toml");
        let text = std::fs::read_to_string(&meta_path)
            .unwrap()
            .replace("version = 1", "version = 3");
        std::fs::write(&meta_path, text).unwrap();
        let err = import_dataset(dir.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('3') && msg.contains('1'), "got: {msg}");
    }

    #[test]
    fn truncated_matrix_file_is_reported() {
        let dataset = sample_dataset();
        let dir = tempfile::tempdir().unwrap();
        export_dataset(dir.path(), &dataset, Encoding::F64le).unwrap();
        let path = dir.path().join("clean.ssmx");
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 1]).unwrap();
        assert!(matches!(
            import_dataset(dir.path()).unwrap_err(),
            FormatError::Truncated { .. }
        ));
    }
}
