//! Table files for the `transform` subcommand.

use serde::{Deserialize, Serialize};

use partlab_core::table::{CumulantTable, Label, LabeledTable, MomentTable};
use partlab_core::transform::{cumulants_to_moments, exclusive_transform, moments_to_cumulants, Direction};
use partlab_core::{FamilyTag, Partition, Q};

use crate::error::{config_err, CliError, Result};

pub const TABLE_FORMAT: &str = "partlab-table/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Moments,
    Cumulants,
    Exclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub partition: String,
    pub word: Vec<Label>,
    /// A rational in the form `n` or `n/d`.
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFile {
    pub format: String,
    pub kind: TableKind,
    /// Partition family; required for cumulant tables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    pub alphabet: Vec<Label>,
    pub entries: Vec<TableEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    MomentsToCumulants,
    CumulantsToMoments,
    ToExclusive,
    FromExclusive,
}

impl TableFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: TableFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = crate::config::pointer(e.path());
            CliError::Config { path: if path.is_empty() { "/".into() } else { path }, message: e.into_inner().to_string() }
        })?;
        if file.format != TABLE_FORMAT {
            return config_err("/format", format!("expected {TABLE_FORMAT:?}"));
        }
        Ok(file)
    }

    fn family(&self) -> Result<Option<FamilyTag>> {
        match &self.family {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|e: partlab_core::Error| CliError::Config {
                path: "/family".into(),
                message: e.to_string(),
            }),
        }
    }

    fn fill(&self, table: &mut LabeledTable, cumulant_tag: Option<FamilyTag>) -> Result<()> {
        for (i, e) in self.entries.iter().enumerate() {
            let p: Partition = e.partition.parse().map_err(|err: partlab_core::Error| CliError::Config {
                path: format!("/entries/{i}/partition"),
                message: err.to_string(),
            })?;
            let v: Q = e.value.trim().parse().map_err(|_| CliError::Config {
                path: format!("/entries/{i}/value"),
                message: format!("{:?} is not a rational number", e.value),
            })?;
            if let Some(tag) = cumulant_tag {
                if !tag.contains(&p) {
                    return config_err(&format!("/entries/{i}/partition"), format!("{p} is not in family {tag}"));
                }
            }
            table.insert(&p, &e.word, v).map_err(|err| CliError::Config {
                path: format!("/entries/{i}"),
                message: err.to_string(),
            })?;
        }
        Ok(())
    }

    fn from_table(kind: TableKind, family: Option<FamilyTag>, table: &LabeledTable) -> Self {
        TableFile {
            format: TABLE_FORMAT.into(),
            kind,
            family: family.map(|t| t.to_string()),
            alphabet: table.alphabet().iter().cloned().collect(),
            entries: table
                .iter()
                .map(|((p, w), v)| TableEntry { partition: p.to_string(), word: w.clone(), value: v.to_string() })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Applies `op`. `family` overrides the file's family where one is needed.
pub fn transform(file: &TableFile, op: Op, family: Option<FamilyTag>) -> Result<TableFile> {
    let expected = match op {
        Op::MomentsToCumulants | Op::ToExclusive => TableKind::Moments,
        Op::CumulantsToMoments => TableKind::Cumulants,
        Op::FromExclusive => TableKind::Exclusive,
    };
    if file.kind != expected {
        return config_err("/kind", format!("this operation takes a {expected:?} table").to_lowercase());
    }
    let tag = family.or(file.family()?).unwrap_or(FamilyTag::P);
    match op {
        Op::MomentsToCumulants | Op::ToExclusive => {
            let mut m = MomentTable::new(file.alphabet.iter().cloned());
            file.fill(&mut m.inner, None)?;
            if op == Op::MomentsToCumulants {
                let k = moments_to_cumulants(&m, tag)?;
                Ok(TableFile::from_table(TableKind::Cumulants, Some(tag), &k.inner))
            } else {
                let ex = exclusive_transform(&m, tag, Direction::ToExclusive)?;
                Ok(TableFile::from_table(TableKind::Exclusive, Some(tag), &ex.inner))
            }
        }
        Op::CumulantsToMoments => {
            let mut k = CumulantTable::new(tag, file.alphabet.iter().cloned());
            file.fill(&mut k.inner, Some(tag))?;
            let m = cumulants_to_moments(&k)?;
            Ok(TableFile::from_table(TableKind::Moments, Some(tag), &m.inner))
        }
        Op::FromExclusive => {
            let mut ex = MomentTable::new(file.alphabet.iter().cloned());
            file.fill(&mut ex.inner, None)?;
            let m = exclusive_transform(&ex, tag, Direction::FromExclusive)?;
            Ok(TableFile::from_table(TableKind::Moments, Some(tag), &m.inner))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn semicircle_moments() -> TableFile {
        // Moments of a semicircular element on P_2, up to orbit.
        let mut m = MomentTable::new(["s"]);
        let w = vec!["s".to_string(); 2];
        for p in partlab_core::enumerate_family(2, FamilyTag::P).unwrap() {
            let v = if p.cycles() == 1 { Q::from_integer(1.into()) } else { Q::from_integer(0.into()) };
            m.insert(&p, &w, v).unwrap();
        }
        TableFile::from_table(TableKind::Moments, None, &m.inner)
    }

    #[test]
    fn round_trip_through_text() {
        let f = semicircle_moments();
        let again = TableFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(again, f);
        let k = transform(&again, Op::MomentsToCumulants, Some(FamilyTag::P)).unwrap();
        let back = transform(&k, Op::CumulantsToMoments, None).unwrap();
        assert_eq!(back.entries, f.entries);
        let ex = transform(&f, Op::ToExclusive, None).unwrap();
        assert_eq!(transform(&ex, Op::FromExclusive, None).unwrap().entries, f.entries);
    }

    #[test]
    fn wrong_kind_and_bad_value_are_named() {
        let f = semicircle_moments();
        assert!(matches!(transform(&f, Op::CumulantsToMoments, None), Err(CliError::Config { path, .. }) if path == "/kind"));
        let mut bad = f.clone();
        bad.entries[1].value = "x".into();
        assert!(matches!(transform(&bad, Op::MomentsToCumulants, None), Err(CliError::Config { path, .. }) if path == "/entries/1/value"));
    }
}
