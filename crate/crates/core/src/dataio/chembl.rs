use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chem::{parse_smiles, ParseErrorKind};
use crate::eval::MoleculeSet;

use super::DataError;

/// Column names of an activity export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnMap {
    pub smiles: String,
    pub activity: String,
    pub id: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            smiles: "canonical_smiles".into(),
            activity: "pchembl_value".into(),
            id: "molecule_chembl_id".into(),
        }
    }
}

pub const ACTIVITY_RANGE: std::ops::RangeInclusive<f64> = 0.0..=14.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ActivityRecord {
    pub smiles: String,
    pub pchembl: f64,
    pub id: String,
}

/// Rows dropped at ingestion, by reason.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SkipCounts {
    /// Empty SMILES or id, or a missing / non-numeric activity.
    pub missing_value: usize,
    /// Activity outside `[0, 14]`.
    pub out_of_range: usize,
    pub parse_error: usize,
    /// Salts and mixtures (`.`-separated SMILES).
    pub multi_component: usize,
}

impl SkipCounts {
    pub fn total(&self) -> usize {
        self.missing_value + self.out_of_range + self.parse_error + self.multi_component
    }

    /// `(reason, count)` for every reason that occurred.
    pub fn nonzero(&self) -> Vec<(&'static str, usize)> {
        [
            ("missing_value", self.missing_value),
            ("out_of_range", self.out_of_range),
            ("parse_error", self.parse_error),
            ("multi_component", self.multi_component),
        ]
        .into_iter()
        .filter(|(_, c)| *c > 0)
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub source: PathBuf,
    pub input_rows: usize,
    pub skipped: SkipCounts,
    /// Rows folded into an earlier row with the same compound id.
    pub duplicates_merged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<ActivityRecord>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn molecules(&self) -> MoleculeSet {
        MoleculeSet {
            smiles: self.records.iter().map(|r| r.smiles.clone()).collect(),
            activities: self.records.iter().map(|r| r.pchembl).collect(),
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn detect_delimiter(text: &str) -> u8 {
    let header = text.lines().next().unwrap_or("");
    if header.contains('\t') {
        b'\t'
    } else {
        b','
    }
}

/// Reads a comma- or tab-separated activity export (delimiter taken from the
/// header line), drops unusable rows with a per-reason count, and merges rows
/// sharing a compound id into one record carrying their median activity and
/// the first row's SMILES. Records keep first-appearance order.
pub fn load_chembl_csv(path: &Path, columns: &ColumnMap) -> Result<Dataset, DataError> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => DataError::FileNotFound(path.to_owned()),
        _ => DataError::Io {
            path: path.to_owned(),
            source: e,
        },
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(detect_delimiter(&text))
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| DataError::Csv(e.to_string()))?.clone();
    let position = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_owned()))
    };
    let (c_smiles, c_act, c_id) = (position(&columns.smiles)?, position(&columns.activity)?, position(&columns.id)?);

    let mut skipped = SkipCounts::default();
    let mut input_rows = 0;
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, (String, Vec<f64>)> = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| DataError::Csv(e.to_string()))?;
        input_rows += 1;
        let field = |c: usize| row.get(c).map(str::trim).unwrap_or("");
        let (smiles, id) = (field(c_smiles), field(c_id));
        let activity = field(c_act).parse::<f64>().ok().filter(|v| v.is_finite());
        let Some(activity) = activity.filter(|_| !smiles.is_empty() && !id.is_empty()) else {
            skipped.missing_value += 1;
            continue;
        };
        if !ACTIVITY_RANGE.contains(&activity) {
            skipped.out_of_range += 1;
            continue;
        }
        match parse_smiles(smiles) {
            Ok(_) => {}
            Err(e) if e.kind == ParseErrorKind::MultiComponentUnsupported => {
                skipped.multi_component += 1;
                continue;
            }
            Err(_) => {
                skipped.parse_error += 1;
                continue;
            }
        }
        groups
            .entry(id.to_owned())
            .or_insert_with(|| {
                order.push(id.to_owned());
                (smiles.to_owned(), Vec::new())
            })
            .1
            .push(activity);
    }
    let kept_rows: usize = groups.values().map(|g| g.1.len()).sum();
    let records: Vec<ActivityRecord> = order
        .into_iter()
        .map(|id| {
            let (smiles, mut values) = groups.remove(&id).expect("grouped");
            ActivityRecord {
                smiles,
                pchembl: median(&mut values),
                id,
            }
        })
        .collect();
    if records.is_empty() {
        return Err(DataError::NoValidRows {
            path: path.to_owned(),
            skipped: skipped.total(),
        });
    }
    let provenance = Provenance {
        source: path.to_owned(),
        input_rows,
        skipped,
        duplicates_merged: kept_rows - records.len(),
    };
    log::info!(
        "{}: {} rows, {} records, {} merged duplicates, skipped {:?}",
        path.display(),
        input_rows,
        records.len(),
        provenance.duplicates_merged,
        skipped.nonzero()
    );
    Ok(Dataset {
        records,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(text: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), text).unwrap();
        f
    }

    #[test]
    fn three_row_fixture() {
        let f = write(
            "molecule_chembl_id,canonical_smiles,pchembl_value\n\
             A,CCO,6.5\n\
             B,CCN,\n\
             C,C1CC,7.0\n",
        );
        let d = load_chembl_csv(f.path(), &ColumnMap::default()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.records[0].pchembl, 6.5);
        assert_eq!(d.provenance.skipped.nonzero(), vec![("missing_value", 1), ("parse_error", 1)]);
    }

    #[test]
    fn duplicates_take_the_median() {
        let f = write(
            "molecule_chembl_id\tcanonical_smiles\tpchembl_value\n\
             X\tCCO\t6.0\nY\tc1ccccc1\t5.0\nX\tOCC\t9.0\nX\tCCO\t7.0\n",
        );
        let d = load_chembl_csv(f.path(), &ColumnMap::default()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!((d.records[0].id.as_str(), d.records[0].pchembl), ("X", 7.0));
        assert_eq!(d.records[0].smiles, "CCO");
        assert_eq!(d.provenance.duplicates_merged, 2);
        let p = &d.provenance;
        assert_eq!(p.skipped.total(), p.input_rows - d.len() - p.duplicates_merged);
    }

    #[test]
    fn skip_reasons_are_counted() {
        let f = write(
            "molecule_chembl_id,canonical_smiles,pchembl_value\n\
             A,CCO,abc\nB,CC.O,5\nC,CCC,15\nD,,4\nE,CCCl,4.5\n",
        );
        let d = load_chembl_csv(f.path(), &ColumnMap::default()).unwrap();
        let s = d.provenance.skipped;
        assert_eq!((s.missing_value, s.multi_component, s.out_of_range, s.parse_error), (2, 1, 1, 0));
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn errors() {
        let missing = Path::new("/nonexistent/file.csv");
        assert!(matches!(
            load_chembl_csv(missing, &ColumnMap::default()),
            Err(DataError::FileNotFound(_))
        ));
        let f = write("id,smiles\nA,CCO\n");
        assert!(matches!(
            load_chembl_csv(f.path(), &ColumnMap::default()),
            Err(DataError::MissingColumn(c)) if c == "canonical_smiles"
        ));
        let f = write("molecule_chembl_id,canonical_smiles,pchembl_value\nA,C(,5\n");
        assert!(matches!(
            load_chembl_csv(f.path(), &ColumnMap::default()),
            Err(DataError::NoValidRows { skipped: 1, .. })
        ));
        let custom = ColumnMap {
            smiles: "smi".into(),
            activity: "p".into(),
            id: "cid".into(),
        };
        let f = write("cid,smi,p\nA,CCO,5\n");
        assert_eq!(load_chembl_csv(f.path(), &custom).unwrap().len(), 1);
    }
}
