//! On-disk result archives.
//!
//! Campaign trials live at `<root>/<backend>/<p>/<trial>.json` and stress
//! trials at `<root>/<backend>/<p>/stress-<order>/<trial>.json`. Each file
//! wraps the result together with the run configuration that produced it,
//! so analysis never needs the original command line.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use crate::protocol::{CampaignResult, StressResult};

pub const FORMAT: &str = "xtalk-archive/1";

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: not an archive of the expected kind")]
    WrongKind { path: PathBuf },
    #[error("{0} does not exist")]
    Missing(PathBuf),
    #[error("no archives found under {0}")]
    Empty(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchiveKind {
    Campaign,
    Stress,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Archive<T> {
    pub format: String,
    pub kind: ArchiveKind,
    /// Run configuration echoed verbatim.
    pub config: serde_json::Value,
    pub result: T,
}

pub fn campaign_path(root: &Path, r: &CampaignResult) -> PathBuf {
    root.join(&r.backend).join(r.padding.to_string()).join(format!("{}.json", r.trial))
}

pub fn stress_path(root: &Path, r: &StressResult) -> PathBuf {
    root.join(&r.backend)
        .join(r.padding.to_string())
        .join(format!("stress-{}", r.order.label().to_lowercase()))
        .join(format!("{}.json", r.trial))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ArchiveError> {
    let io = |source| ArchiveError::Io { path: path.to_owned(), source };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut text =
        serde_json::to_string_pretty(value).map_err(|source| ArchiveError::Json { path: path.to_owned(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(io)
}

pub fn write_campaign(root: &Path, config: &serde_json::Value, r: &CampaignResult) -> Result<PathBuf, ArchiveError> {
    let path = campaign_path(root, r);
    let archive = Archive { format: FORMAT.into(), kind: ArchiveKind::Campaign, config: config.clone(), result: r };
    write_json(&path, &archive)?;
    Ok(path)
}

pub fn write_stress(root: &Path, config: &serde_json::Value, r: &StressResult) -> Result<PathBuf, ArchiveError> {
    let path = stress_path(root, r);
    let archive = Archive { format: FORMAT.into(), kind: ArchiveKind::Stress, config: config.clone(), result: r };
    write_json(&path, &archive)?;
    Ok(path)
}

#[derive(Deserialize)]
struct Header {
    format: String,
    kind: ArchiveKind,
}

fn read_kind<T: for<'de> Deserialize<'de>>(path: &Path, kind: ArchiveKind) -> Result<Option<Archive<T>>, ArchiveError> {
    let text = fs::read_to_string(path).map_err(|source| ArchiveError::Io { path: path.to_owned(), source })?;
    let json = |source| ArchiveError::Json { path: path.to_owned(), source };
    let header: Header = serde_json::from_str(&text).map_err(json)?;
    if header.format != FORMAT {
        return Err(ArchiveError::WrongKind { path: path.to_owned() });
    }
    if header.kind != kind {
        return Ok(None);
    }
    serde_json::from_str(&text).map(Some).map_err(json)
}

pub fn read_campaign(path: &Path) -> Result<Archive<CampaignResult>, ArchiveError> {
    read_kind(path, ArchiveKind::Campaign)?.ok_or_else(|| ArchiveError::WrongKind { path: path.to_owned() })
}

pub fn read_stress(path: &Path) -> Result<Archive<StressResult>, ArchiveError> {
    read_kind(path, ArchiveKind::Stress)?.ok_or_else(|| ArchiveError::WrongKind { path: path.to_owned() })
}

fn json_files(root: &Path) -> Result<Vec<PathBuf>, ArchiveError> {
    if !root.exists() {
        return Err(ArchiveError::Missing(root.to_owned()));
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| ArchiveError::Io {
            path: e.path().map(Path::to_owned).unwrap_or_else(|| root.to_owned()),
            source: e.into(),
        })?;
        let path = entry.path();
        let is_trial = path.extension().is_some_and(|e| e == "json")
            && path.file_stem().and_then(|s| s.to_str()).is_some_and(|s| s.parse::<usize>().is_ok());
        if entry.file_type().is_file() && is_trial {
            files.push(entry.into_path());
        }
    }
    Ok(files)
}

fn load_kind<T: for<'de> Deserialize<'de>>(root: &Path, kind: ArchiveKind) -> Result<Vec<T>, ArchiveError> {
    let mut out = Vec::new();
    for path in json_files(root)? {
        if let Some(a) = read_kind::<T>(&path, kind)? {
            out.push(a.result);
        }
    }
    if out.is_empty() {
        return Err(ArchiveError::Empty(root.to_owned()));
    }
    Ok(out)
}

/// Every campaign trial under `root`, sorted by backend, padding and
/// trial. Only `<number>.json` files are read, so reports may sit next to
/// the archives; stress archives are skipped and any other JSON in a trial
/// file is an error.
pub fn load_campaigns(root: &Path) -> Result<Vec<CampaignResult>, ArchiveError> {
    let mut v: Vec<CampaignResult> = load_kind(root, ArchiveKind::Campaign)?;
    v.sort_by(|a, b| (&a.backend, a.padding, a.trial).cmp(&(&b.backend, b.padding, b.trial)));
    Ok(v)
}

pub fn load_stress(root: &Path) -> Result<Vec<StressResult>, ArchiveError> {
    let mut v: Vec<StressResult> = load_kind(root, ArchiveKind::Stress)?;
    v.sort_by(|a, b| (&a.backend, a.padding, a.trial).cmp(&(&b.backend, b.padding, b.trial)));
    Ok(v)
}

/// Campaign trials grouped by `(backend, padding)`.
pub fn group_campaigns(results: Vec<CampaignResult>) -> Vec<((String, usize), Vec<CampaignResult>)> {
    let mut groups: Vec<((String, usize), Vec<CampaignResult>)> = Vec::new();
    for r in results {
        let key = (r.backend.clone(), r.padding);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups
}
