//! Loading operators and specs from files or bundled fixtures.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use ewitness::{HermitianOperator, Witness};

/// Bundled operator fixtures, addressed on the command line as `@name`.
pub const BUILTINS: &[(&str, &str)] = &[
    ("choi", include_str!("../fixtures/choi.json")),
    ("swap", include_str!("../fixtures/swap.json")),
    ("identity", include_str!("../fixtures/identity.json")),
    ("choi-ppt-state", include_str!("../fixtures/choi_ppt_state.json")),
    ("choi-extension-spec", include_str!("../fixtures/choi_extension_spec.json")),
    ("choi-ab-params", include_str!("../fixtures/choi_ab_params.json")),
];

pub fn builtin(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Reads `@name` from the bundled fixtures, anything else from disk.
pub fn read_source(arg: &str) -> Result<String> {
    if let Some(name) = arg.strip_prefix('@') {
        let names: Vec<&str> = BUILTINS.iter().map(|(n, _)| *n).collect();
        return builtin(name)
            .map(str::to_owned)
            .with_context(|| format!("unknown builtin '@{name}' (available: {})", names.join(", ")));
    }
    fs::read_to_string(arg).with_context(|| format!("cannot read '{arg}'"))
}

fn provenance(arg: &str) -> String {
    match arg.strip_prefix('@') {
        Some(name) => name.to_string(),
        None => Path::new(arg).file_stem().map_or_else(|| arg.to_string(), |s| s.to_string_lossy().into_owned()),
    }
}

pub fn operator(arg: &str) -> Result<HermitianOperator> {
    let text = read_source(arg)?;
    HermitianOperator::from_json(&text).with_context(|| format!("'{arg}' is not a valid operator"))
}

pub fn witness(arg: &str) -> Result<Witness> {
    Witness::new(operator(arg)?, provenance(arg)).with_context(|| format!("'{arg}' is not bipartite"))
}
