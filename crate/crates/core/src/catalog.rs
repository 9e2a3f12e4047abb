//! Named diagram collections loaded from a directory of diagram files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::diagram::{parse_diagram, DiagramError, DiagramShadow};

/// Default catalog directory when no path is given.
pub const CATALOG_ENV: &str = "REGION_SELECT_CATALOG";

/// The corpus manifest shares the directory but is not a diagram.
pub const MANIFEST_FILE: &str = "corpus.json";

pub(crate) const BUILTIN_FILES: &[(&str, &str)] = &[
    ("loop.json", include_str!("../catalog/loop.json")),
    ("curl.json", include_str!("../catalog/curl.json")),
    ("trefoil.json", include_str!("../catalog/trefoil.json")),
    ("figure_eight.json", include_str!("../catalog/figure_eight.json")),
    ("5_1.json", include_str!("../catalog/5_1.json")),
    ("5_2.json", include_str!("../catalog/5_2.json")),
    ("6_2.json", include_str!("../catalog/6_2.json")),
    ("trefoil_curl.json", include_str!("../catalog/trefoil_curl.json")),
    ("double_curl.json", include_str!("../catalog/double_curl.json")),
];

pub(crate) const BUILTIN_MANIFEST: &str = include_str!("../catalog/corpus.json");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {source}")]
    Parse {
        file: String,
        #[source]
        source: DiagramError,
    },
    #[error("diagram name {name:?} is used by both {first} and {second}")]
    DuplicateName { name: String, first: String, second: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramSummary {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub has_layout: bool,
}

/// Diagrams indexed by their `name` field. Immutable once loaded.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    diagrams: BTreeMap<String, (String, Arc<DiagramShadow>)>,
}

impl Catalog {
    /// The diagrams bundled with the crate.
    pub fn builtin() -> Catalog {
        Catalog::from_texts(BUILTIN_FILES.iter().map(|&(f, t)| (f.to_string(), t.to_string())))
            .expect("bundled catalog is valid")
    }

    /// Every `*.json` file in `dir` except the corpus manifest.
    pub fn load_dir(dir: &Path) -> Result<Catalog, CatalogError> {
        let io = |source| CatalogError::Io {
            path: dir.to_path_buf(),
            source,
        };
        let mut files = Vec::new();
        for entry in fs::read_dir(dir).map_err(io)? {
            let path = entry.map_err(io)?.path();
            let is_json = path.extension().is_some_and(|e| e == "json");
            let is_manifest = path.file_name().is_some_and(|f| f == MANIFEST_FILE);
            if is_json && !is_manifest && path.is_file() {
                files.push(path);
            }
        }
        files.sort();
        let mut texts = Vec::with_capacity(files.len());
        for path in files {
            let text = fs::read_to_string(&path).map_err(|source| CatalogError::Io {
                path: path.clone(),
                source,
            })?;
            let file = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
            texts.push((file, text));
        }
        Catalog::from_texts(texts)
    }

    /// `dir` if given, else the directory named by `REGION_SELECT_CATALOG`,
    /// else the bundled diagrams.
    pub fn resolve(dir: Option<&Path>) -> Result<Catalog, CatalogError> {
        match dir.map(Path::to_path_buf).or_else(|| std::env::var_os(CATALOG_ENV).map(PathBuf::from)) {
            Some(dir) => Catalog::load_dir(&dir),
            None => Ok(Catalog::builtin()),
        }
    }

    /// Builds a catalog from `(file name, contents)` pairs.
    pub fn from_texts(texts: impl IntoIterator<Item = (String, String)>) -> Result<Catalog, CatalogError> {
        let mut diagrams: BTreeMap<String, (String, Arc<DiagramShadow>)> = BTreeMap::new();
        for (file, text) in texts {
            let shadow = parse_diagram(&text).map_err(|source| CatalogError::Parse {
                file: file.clone(),
                source,
            })?;
            let name = shadow.name().to_string();
            if let Some((first, _)) = diagrams.get(&name) {
                return Err(CatalogError::DuplicateName {
                    name,
                    first: first.clone(),
                    second: file,
                });
            }
            diagrams.insert(name, (file, Arc::new(shadow)));
        }
        Ok(Catalog { diagrams })
    }

    pub fn get(&self, name: &str) -> Option<&Arc<DiagramShadow>> {
        self.diagrams.get(name).map(|(_, s)| s)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.diagrams.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.diagrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagrams.is_empty()
    }

    /// Sorted by name.
    pub fn summaries(&self) -> Vec<DiagramSummary> {
        self.diagrams
            .iter()
            .map(|(name, (_, s))| DiagramSummary {
                name: name.clone(),
                n: s.vertex_count(),
                m: s.region_count(),
                has_layout: s.layout().is_some(),
            })
            .collect()
    }
}
