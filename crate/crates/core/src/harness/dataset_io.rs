//! On-disk datasets: `DIR/{train,val,test}/<id>.json` plus `DIR/manifest.json`
//! recording the family spec, split sizes, and a sha256 per file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::generators::{FamilySpec, Split, SplitSpec, TargetDataset};
use crate::instance::Instance;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    pub spec: FamilySpec,
    pub split: SplitSpec,
    /// Relative path -> sha256 of its bytes.
    pub files: BTreeMap<String, String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_dataset(dir: &Path, d: &TargetDataset) -> Result<Manifest> {
    let mut files = BTreeMap::new();
    for split in Split::ALL {
        let sub = dir.join(split.name());
        fs::create_dir_all(&sub)?;
        for inst in d.part(split) {
            let text = inst.to_json();
            let rel = format!("{}/{}.json", split.name(), inst.id());
            fs::write(dir.join(&rel), &text)?;
            files.insert(rel, sha256_hex(text.as_bytes()));
        }
    }
    let manifest = Manifest {
        spec: d.spec.clone(),
        split: d.split,
        files,
    };
    fs::write(dir.join(MANIFEST), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Loads one split, checking every file against the manifest digest.
pub fn read_split(dir: &Path, manifest: &Manifest, split: Split) -> Result<Vec<Instance>> {
    let prefix = format!("{}/", split.name());
    manifest
        .files
        .iter()
        .filter(|(rel, _)| rel.starts_with(&prefix))
        .map(|(rel, digest)| {
            let path: PathBuf = dir.join(rel);
            let text = fs::read_to_string(&path)
                .map_err(|e| Error::Parse(format!("missing dataset file {}: {e}", path.display())))?;
            if sha256_hex(text.as_bytes()) != *digest {
                return Err(Error::Parse(format!("checksum mismatch for {}", path.display())));
            }
            Instance::from_json(&text)
        })
        .collect()
}

/// Train and validation only; never opens the test directory.
pub fn read_selection_splits(dir: &Path) -> Result<(Manifest, Vec<Instance>, Vec<Instance>)> {
    let m = read_manifest(dir)?;
    let train = read_split(dir, &m, Split::Train)?;
    let val = read_split(dir, &m, Split::Val)?;
    Ok((m, train, val))
}

pub fn read_dataset(dir: &Path) -> Result<TargetDataset> {
    let m = read_manifest(dir)?;
    Ok(TargetDataset {
        train: read_split(dir, &m, Split::Train)?,
        val: read_split(dir, &m, Split::Val)?,
        test: read_split(dir, &m, Split::Test)?,
        spec: m.spec,
        split: m.split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_target, SizeProfile};
    use crate::instance::ProblemClass;

    #[test]
    fn round_trip_and_tamper_detection() {
        let spec = FamilySpec::new(ProblemClass::Mdkp, "single-resource", SizeProfile::Desk, 4).unwrap();
        let d = generate_target(&spec, SplitSpec { n_train: 2, n_val: 1, n_test: 1 }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_dataset(dir.path(), &d).unwrap();
        let back = read_dataset(dir.path()).unwrap();
        assert_eq!(back.train, d.train);
        assert_eq!(back.test, d.test);
        let victim = dir.path().join("val").join(format!("{}.json", d.val[0].id()));
        fs::write(&victim, d.train[0].to_json()).unwrap();
        assert!(read_selection_splits(dir.path()).is_err());
    }
}
