use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{parse_scenario, ParseError, FILE_EXTENSION};
use crate::model::{CornerCaseCategory, ScenarioSpec};

/// Number of scenarios a complete catalog holds.
pub const CATALOG_SIZE: usize = 32;

/// Scenarios named in the corner-case taxonomy, by category.
pub const NAMED_SCENARIOS: [(&str, CornerCaseCategory); 24] = {
    use CornerCaseCategory::*;
    [
        ("carla-cola-video-ad", StateAnomaly),
        ("party-billboard-traffic-light", StateAnomaly),
        ("sneeze-stop-billboard", StateAnomaly),
        ("bar-members-parking-sign", StateAnomaly),
        ("soft-drink-turn-ad", StateAnomaly),
        ("yield-to-fun-billboard", StateAnomaly),
        ("go-for-sale-green-light-ad", StateAnomaly),
        ("stop-for-dinner-billboard", StateAnomaly),
        ("stop-sign-ad", StateAnomaly),
        ("stop-tshirt-pedestrian", StateAnomaly),
        ("lane-blocking-crash", BehaviorAnomaly),
        ("emergency-roundabout-exit", BehaviorAnomaly),
        ("police-car-chase", BehaviorAnomaly),
        ("hesitant-crosswalk-pedestrian", BehaviorAnomaly),
        ("erratic-biker", BehaviorAnomaly),
        ("shopping-cart-downhill", BehaviorAnomaly),
        ("wrong-way-one-way", BehaviorAnomaly),
        ("ball-over-obstacle-highway", BehaviorAnomaly),
        ("ball-evidence-child", EvidenceBasedAnomaly),
        ("luggage-fall", EvidenceBasedAnomaly),
        ("parked-car-door-open", EvidenceBasedAnomaly),
        ("worker-behind-van", EvidenceBasedAnomaly),
        ("courier-barrel-fall", EvidenceBasedAnomaly),
        ("ems-hospital-exit", EvidenceBasedAnomaly),
    ]
};

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {error}")]
    File { path: PathBuf, error: ParseError },
    #[error("{path}: {message}")]
    Layout { path: PathBuf, message: String },
    #[error("duplicate scenario id `{id}` in {first} and {second}")]
    DuplicateId {
        id: String,
        first: PathBuf,
        second: PathBuf,
    },
    #[error("catalog holds {found} scenarios, expected {CATALOG_SIZE}")]
    Count { found: usize },
    #[error("category {0} has no scenarios")]
    EmptyCategory(CornerCaseCategory),
    #[error("catalog lacks named scenarios: {}", .0.join(", "))]
    MissingNamed(Vec<String>),
}

/// Immutable, id-ordered set of scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    scenarios: Vec<ScenarioSpec>,
    by_id: BTreeMap<String, usize>,
    by_category: BTreeMap<CornerCaseCategory, Vec<usize>>,
}

impl Catalog {
    /// Build from already-validated specs; ids must be unique.
    pub fn from_specs(mut specs: Vec<ScenarioSpec>) -> Result<Catalog, CatalogError> {
        specs.sort_by(|a, b| a.id.cmp(&b.id));
        let mut by_id = BTreeMap::new();
        let mut by_category: BTreeMap<_, Vec<usize>> = BTreeMap::new();
        for (i, s) in specs.iter().enumerate() {
            if by_id.insert(s.id.clone(), i).is_some() {
                return Err(CatalogError::DuplicateId {
                    id: s.id.clone(),
                    first: PathBuf::new(),
                    second: PathBuf::new(),
                });
            }
            by_category.entry(s.category).or_default().push(i);
        }
        Ok(Catalog {
            scenarios: specs,
            by_id,
            by_category,
        })
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ScenarioSpec> {
        self.by_id.get(id).map(|&i| &self.scenarios[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &ScenarioSpec> {
        self.scenarios.iter()
    }

    pub fn in_category(&self, cat: CornerCaseCategory) -> impl Iterator<Item = &ScenarioSpec> {
        self.by_category
            .get(&cat)
            .into_iter()
            .flatten()
            .map(move |&i| &self.scenarios[i])
    }

    /// Enforce the complete-catalog invariants.
    pub fn check_complete(&self) -> Result<(), CatalogError> {
        if self.len() != CATALOG_SIZE {
            return Err(CatalogError::Count { found: self.len() });
        }
        for cat in CornerCaseCategory::ALL {
            if self.in_category(cat).next().is_none() {
                return Err(CatalogError::EmptyCategory(cat));
            }
        }
        let missing: Vec<String> = NAMED_SCENARIOS
            .iter()
            .filter(|(id, cat)| self.get(id).is_none_or(|s| s.category != *cat))
            .map(|(id, _)| id.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(CatalogError::MissingNamed(missing));
        }
        Ok(())
    }
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), CatalogError> {
    let entries = std::fs::read_dir(dir).map_err(|source| CatalogError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for entry in entries {
        let entry = entry.map_err(|source| CatalogError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        if path.is_dir() {
            collect_files(&path, out)?;
        } else if path.extension().and_then(|e| e.to_str()) == Some(FILE_EXTENSION) {
            out.push(path);
        }
    }
    Ok(())
}

/// Load every `.3cs` file under `dir`. In strict mode the file layout
/// (`<category>/<id>.3cs`) and the complete-catalog invariants are enforced.
pub fn load_catalog(dir: &Path, strict: bool) -> Result<Catalog, CatalogError> {
    let mut files = Vec::new();
    collect_files(dir, &mut files)?;
    files.sort();
    let mut seen: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut specs = Vec::with_capacity(files.len());
    for path in files {
        let bytes = std::fs::read(&path).map_err(|source| CatalogError::Io {
            path: path.clone(),
            source,
        })?;
        let spec = parse_scenario(&bytes).map_err(|error| CatalogError::File {
            path: path.clone(),
            error,
        })?;
        if let Some(first) = seen.get(&spec.id) {
            return Err(CatalogError::DuplicateId {
                id: spec.id.clone(),
                first: first.clone(),
                second: path,
            });
        }
        if strict {
            check_layout(&path, &spec)?;
        }
        seen.insert(spec.id.clone(), path);
        specs.push(spec);
    }
    let catalog = Catalog::from_specs(specs)?;
    if strict {
        catalog.check_complete()?;
    }
    Ok(catalog)
}

fn check_layout(path: &Path, spec: &ScenarioSpec) -> Result<(), CatalogError> {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
    if stem != spec.id {
        return Err(CatalogError::Layout {
            path: path.to_path_buf(),
            message: format!("file name does not match scenario id `{}`", spec.id),
        });
    }
    let parent = path
        .parent()
        .and_then(|p| p.file_name())
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    if parent != spec.category.short_name() {
        return Err(CatalogError::Layout {
            path: path.to_path_buf(),
            message: format!("scenario of category {} must live under `{}/`", spec.category, spec.category.short_name()),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CatalogFilter {
    pub category: Option<CornerCaseCategory>,
    pub id_prefix: Option<String>,
    /// Case-insensitive match against id, name and description.
    pub text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub id: String,
    pub name: String,
    pub category: CornerCaseCategory,
    pub description: String,
    pub variant: bool,
}

pub fn query_catalog(catalog: &Catalog, filter: &CatalogFilter) -> Vec<ScenarioSummary> {
    let needle = filter.text.as_ref().map(|t| t.to_lowercase());
    catalog
        .iter()
        .filter(|s| filter.category.is_none_or(|c| s.category == c))
        .filter(|s| filter.id_prefix.as_ref().is_none_or(|p| s.id.starts_with(p.as_str())))
        .filter(|s| {
            needle.as_ref().is_none_or(|n| {
                s.id.to_lowercase().contains(n)
                    || s.name.to_lowercase().contains(n)
                    || s.description.to_lowercase().contains(n)
            })
        })
        .map(|s| ScenarioSummary {
            id: s.id.clone(),
            name: s.name.clone(),
            category: s.category,
            description: s.description.lines().next().unwrap_or_default().to_string(),
            variant: s.variant,
        })
        .collect()
}

/// Catalog directory: `CORNERSIM_CATALOG` if set, else the shipped one.
pub fn default_catalog_dir() -> PathBuf {
    match std::env::var_os("CORNERSIM_CATALOG") {
        Some(dir) => PathBuf::from(dir),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../catalog"),
    }
}
