use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{validate_bundle, ArtefactError, KnowledgeBundle};
use crate::reporting::EvaluationTemplate;

pub const BUNDLE_FILE: &str = "bundle.json";
const TAXONOMY_FILE: &str = "taxonomy.json";
const CATALOGUE_FILE: &str = "catalogue.json";
const FACTORS_FILE: &str = "factors.json";
const BLUEPRINTS_FILE: &str = "blueprints.json";
const TEMPLATES_DIR: &str = "templates";

#[derive(Serialize, Deserialize)]
struct BundleMeta {
    schema_version: u32,
    domain: String,
    version: String,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ArtefactError + '_ {
    move |source| ArtefactError::Io { path: path.display().to_string(), source }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, ArtefactError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| ArtefactError::Parse { path: path.display().to_string(), source })
}

fn read_list<T: DeserializeOwned>(dir: &Path, name: &str) -> Result<Vec<T>, ArtefactError> {
    let path = dir.join(name);
    if path.exists() {
        read_json(&path)
    } else {
        Ok(Vec::new())
    }
}

/// Loads a bundle directory (or the path of its `bundle.json`) and validates it.
pub fn load_bundle(path: impl AsRef<Path>) -> Result<KnowledgeBundle, ArtefactError> {
    let bundle = read_bundle(path.as_ref())?;
    let report = validate_bundle(&bundle);
    if report.is_valid() {
        Ok(bundle)
    } else {
        Err(ArtefactError::Invalid(report))
    }
}

fn read_bundle(path: &Path) -> Result<KnowledgeBundle, ArtefactError> {
    let dir: PathBuf = if path.is_file() { path.parent().unwrap_or(Path::new(".")).to_path_buf() } else { path.to_path_buf() };
    let meta: BundleMeta = read_json(&dir.join(BUNDLE_FILE))?;

    let mut templates: Vec<EvaluationTemplate> = Vec::new();
    let tdir = dir.join(TEMPLATES_DIR);
    if tdir.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(&tdir)
            .map_err(io_err(&tdir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        for file in files {
            templates.push(read_json(&file)?);
        }
    }

    Ok(KnowledgeBundle {
        schema_version: meta.schema_version,
        domain: meta.domain,
        version: meta.version,
        taxonomy: read_list(&dir, TAXONOMY_FILE)?,
        catalogue: read_list(&dir, CATALOGUE_FILE)?,
        factors: read_list(&dir, FACTORS_FILE)?,
        blueprints: read_list(&dir, BLUEPRINTS_FILE)?,
        templates,
    })
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), ArtefactError> {
    let mut text = serde_json::to_string_pretty(value).expect("bundle types serialise");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Writes `bundle` into `dir`, creating it if needed. Template files are named
/// after the template id.
pub fn save_bundle(bundle: &KnowledgeBundle, dir: impl AsRef<Path>) -> Result<(), ArtefactError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let meta = BundleMeta { schema_version: bundle.schema_version, domain: bundle.domain.clone(), version: bundle.version.clone() };
    write_json(&dir.join(BUNDLE_FILE), &meta)?;
    write_json(&dir.join(TAXONOMY_FILE), &bundle.taxonomy)?;
    write_json(&dir.join(CATALOGUE_FILE), &bundle.catalogue)?;
    write_json(&dir.join(FACTORS_FILE), &bundle.factors)?;
    write_json(&dir.join(BLUEPRINTS_FILE), &bundle.blueprints)?;
    if !bundle.templates.is_empty() {
        let tdir = dir.join(TEMPLATES_DIR);
        fs::create_dir_all(&tdir).map_err(io_err(&tdir))?;
        for (i, template) in bundle.templates.iter().enumerate() {
            // index prefix keeps the file-name load order equal to list order
            write_json(&tdir.join(format!("{i:04}-{}.json", template.id)), template)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artefact::IssueCode;

    #[test]
    fn empty_bundle_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let bundle = KnowledgeBundle::empty("cloud", "0.1");
        save_bundle(&bundle, dir.path()).unwrap();
        assert_eq!(load_bundle(dir.path()).unwrap(), bundle);
        assert_eq!(load_bundle(dir.path().join(BUNDLE_FILE)).unwrap(), bundle);
    }

    #[test]
    fn only_meta_file_is_required() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(BUNDLE_FILE), r#"{"schema_version":1,"domain":"d","version":"1"}"#).unwrap();
        let b = load_bundle(dir.path()).unwrap();
        assert!(b.taxonomy.is_empty() && b.templates.is_empty());
    }

    #[test]
    fn malformed_file_names_path() {
        let dir = tempfile::tempdir().unwrap();
        save_bundle(&KnowledgeBundle::empty("d", "1"), dir.path()).unwrap();
        fs::write(dir.path().join(TAXONOMY_FILE), "[{").unwrap();
        match load_bundle(dir.path()) {
            Err(ArtefactError::Parse { path, .. }) => assert!(path.ends_with(TAXONOMY_FILE)),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_catalogue_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        save_bundle(&KnowledgeBundle::empty("d", "1"), dir.path()).unwrap();
        fs::write(
            dir.path().join(CATALOGUE_FILE),
            r#"[{"feature_id":"missing-feature","metric":{"name":"m","direction":"higher-better"},"benchmarks":[{"name":"b"}]}]"#,
        )
        .unwrap();
        match load_bundle(dir.path()) {
            Err(ArtefactError::Invalid(report)) => {
                let issue = report.errors().next().unwrap();
                assert_eq!(issue.code, IssueCode::DanglingReference);
                assert_eq!(issue.element, "missing-feature");
                assert_eq!(issue.location, "catalogue.json[0]");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }
}
