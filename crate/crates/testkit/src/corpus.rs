//! Loading the repository corpus from test code in any workspace crate.

use std::path::PathBuf;

use oruga_core::dsl::{parse_document, Document};

/// The `corpus/` directory at the workspace root.
pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("corpus")
}

/// Reads the named corpus files, in order, as `(name, text)` pairs.
pub fn read_corpus_files(names: &[&str]) -> Vec<(String, String)> {
    names
        .iter()
        .map(|name| {
            let path = corpus_dir().join(name);
            let text = std::fs::read_to_string(&path)
                .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
            (name.to_string(), text)
        })
        .collect()
}

/// Parses the named corpus files into one document, panicking on errors.
pub fn load_corpus(names: &[&str]) -> Document {
    let files = read_corpus_files(names);
    let borrowed: Vec<(&str, &str)> = files
        .iter()
        .map(|(n, t)| (n.as_str(), t.as_str()))
        .collect();
    match parse_document(&borrowed) {
        Ok(doc) => doc,
        Err(diags) => {
            let rendered: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            panic!("corpus {names:?} failed to parse:\n{}", rendered.join("\n"));
        }
    }
}
