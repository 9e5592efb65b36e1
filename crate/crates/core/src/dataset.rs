//! Dataset manifest and feature-table files.
//!
//! The manifest CSV (`source_id,audio_path,transcript_path,label,subject_id`)
//! ties recordings, transcripts, binary labels, and subjects together; paths
//! are relative to the manifest's directory and must exist at load time.
//! The feature CSV carries `source_id,label` followed by the 136 named
//! acoustic columns.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Maps a PHQ-9 item-9 response to the binary label: only "not at all" is
/// negative, any other answer marks the recording positive.
pub fn phq9_item9_label(response: &str) -> u8 {
    u8::from(!response.trim().eq_ignore_ascii_case("not at all"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub source_id: String,
    pub audio_path: String,
    pub transcript_path: String,
    pub label: u8,
    pub subject_id: String,
}

#[derive(Debug, Clone)]
pub struct DatasetManifest {
    pub rows: Vec<ManifestRow>,
    /// directory the relative paths resolve against
    pub base_dir: PathBuf,
}

impl DatasetManifest {
    /// Loads and validates a manifest: unique source ids, binary labels,
    /// and referenced files present on disk.
    pub fn load(path: &Path) -> Result<Self> {
        let base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        let mut reader = csv::Reader::from_path(path)?;
        let mut rows: Vec<ManifestRow> = Vec::new();
        for record in reader.deserialize() {
            let row: ManifestRow = record?;
            if row.label > 1 {
                return Err(Error::Manifest(format!(
                    "row {}: label {} not in {{0,1}}",
                    row.source_id, row.label
                )));
            }
            if rows.iter().any(|r| r.source_id == row.source_id) {
                return Err(Error::Manifest(format!(
                    "duplicate source_id {}",
                    row.source_id
                )));
            }
            for rel in [&row.audio_path, &row.transcript_path] {
                let p = base_dir.join(rel);
                if !p.exists() {
                    return Err(Error::Manifest(format!(
                        "row {}: referenced file {} does not exist",
                        row.source_id,
                        p.display()
                    )));
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Manifest("manifest has no rows".into()));
        }
        Ok(Self { rows, base_dir })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        for row in &self.rows {
            writer.serialize(row)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn audio_file(&self, row: &ManifestRow) -> PathBuf {
        self.base_dir.join(&row.audio_path)
    }

    pub fn transcript_file(&self, row: &ManifestRow) -> PathBuf {
        self.base_dir.join(&row.transcript_path)
    }

    /// Reads every transcript, in row order.
    pub fn transcripts(&self) -> Result<Vec<String>> {
        self.rows
            .iter()
            .map(|r| Ok(std::fs::read_to_string(self.transcript_file(r))?))
            .collect()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.rows.iter().map(|r| r.label).collect()
    }
}

/// In-memory feature table matching the feature CSV layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub feature_names: Vec<String>,
    pub source_ids: Vec<String>,
    pub labels: Vec<u8>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Column-major copy, for per-feature statistics.
    pub fn columns(&self) -> Vec<Vec<f64>> {
        let dim = self.feature_names.len();
        (0..dim)
            .map(|c| self.rows.iter().map(|r| r[c]).collect())
            .collect()
    }
}

pub fn write_feature_csv(path: &Path, table: &FeatureTable) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["source_id".to_string(), "label".to_string()];
    header.extend(table.feature_names.iter().cloned());
    writer.write_record(&header)?;
    for i in 0..table.len() {
        let mut record = vec![table.source_ids[i].clone(), table.labels[i].to_string()];
        record.extend(table.rows[i].iter().map(|v| v.to_string()));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_feature_csv(path: &Path) -> Result<FeatureTable> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    if header.len() < 3 || &header[0] != "source_id" || &header[1] != "label" {
        return Err(Error::Manifest(format!(
            "feature csv {} must start with source_id,label",
            path.display()
        )));
    }
    let feature_names: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
    let mut table = FeatureTable {
        feature_names,
        source_ids: Vec::new(),
        labels: Vec::new(),
        rows: Vec::new(),
    };
    for record in reader.records() {
        let record = record?;
        table.source_ids.push(record[0].to_string());
        let label: u8 = record[1]
            .parse()
            .map_err(|_| Error::Manifest(format!("bad label {:?}", &record[1])))?;
        if label > 1 {
            return Err(Error::Manifest(format!("label {label} not in {{0,1}}")));
        }
        table.labels.push(label);
        let row: std::result::Result<Vec<f64>, _> =
            record.iter().skip(2).map(str::parse::<f64>).collect();
        table
            .rows
            .push(row.map_err(|e| Error::Manifest(format!("bad feature value: {e}")))?);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phq9_mapping() {
        assert_eq!(phq9_item9_label("not at all"), 0);
        assert_eq!(phq9_item9_label("Not At All "), 0);
        assert_eq!(phq9_item9_label("several days"), 1);
        assert_eq!(phq9_item9_label("more than half the days"), 1);
        assert_eq!(phq9_item9_label("nearly every day"), 1);
    }

    #[test]
    fn manifest_roundtrip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir_all(dir.path().join("audio")).unwrap();
        std::fs::create_dir_all(dir.path().join("text")).unwrap();
        std::fs::write(dir.path().join("audio/a.wav"), b"x").unwrap();
        std::fs::write(dir.path().join("text/a.txt"), b"hello").unwrap();

        let manifest = DatasetManifest {
            rows: vec![ManifestRow {
                source_id: "a".into(),
                audio_path: "audio/a.wav".into(),
                transcript_path: "text/a.txt".into(),
                label: 1,
                subject_id: "s0".into(),
            }],
            base_dir: dir.path().to_path_buf(),
        };
        let path = dir.path().join("manifest.csv");
        manifest.save(&path).unwrap();
        let loaded = DatasetManifest::load(&path).unwrap();
        assert_eq!(loaded.rows, manifest.rows);
        assert_eq!(loaded.transcripts().unwrap(), vec!["hello".to_string()]);
    }

    #[test]
    fn manifest_missing_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.csv");
        std::fs::write(
            &path,
            "source_id,audio_path,transcript_path,label,subject_id\na,missing.wav,missing.txt,0,s0\n",
        )
        .unwrap();
        assert!(matches!(
            DatasetManifest::load(&path),
            Err(Error::Manifest(_))
        ));
    }

    #[test]
    fn manifest_duplicate_id_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.wav"), b"x").unwrap();
        std::fs::write(dir.path().join("a.txt"), b"x").unwrap();
        let path = dir.path().join("manifest.csv");
        std::fs::write(
            &path,
            "source_id,audio_path,transcript_path,label,subject_id\n\
             a,a.wav,a.txt,0,s0\na,a.wav,a.txt,1,s1\n",
        )
        .unwrap();
        assert!(matches!(
            DatasetManifest::load(&path),
            Err(Error::Manifest(_))
        ));
    }

    #[test]
    fn feature_csv_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.csv");
        let table = FeatureTable {
            feature_names: vec!["f1".into(), "f2".into()],
            source_ids: vec!["a".into(), "b".into()],
            labels: vec![1, 0],
            rows: vec![vec![0.25, -1.5e-7], vec![3.0, 0.1 + 0.2]],
        };
        write_feature_csv(&path, &table).unwrap();
        let loaded = read_feature_csv(&path).unwrap();
        assert_eq!(loaded, table);
    }

    #[test]
    fn feature_csv_header_is_validated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "wrong,label,f\nx,0,1\n").unwrap();
        assert!(read_feature_csv(&path).is_err());
    }
}
