//! Plain-text run configuration: one `key = value` per line.
//!
//! Blank lines and `#` comments are skipped. Every key corresponds to a
//! `run` flag of the same name and is overridden by that flag. Unknown keys
//! and duplicate keys are errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use deproles::clustering::InitMethod;
use deproles::pipeline::{ClosureOrder, PipelineKind, RunConfig};
use deproles::regular::DistanceRule;

/// Reads a config file into key/value entries.
pub fn parse_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut entries = BTreeMap::new();
    for (number, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').with_context(|| {
            format!("{}:{}: expected 'key = value'", path.display(), number + 1)
        })?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if entries.insert(key.clone(), value).is_some() {
            bail!("{}:{}: duplicate key '{key}'", path.display(), number + 1);
        }
    }
    Ok(entries)
}

/// Extracts the pipeline choice, when the file names one.
pub fn pipeline_from_entries(entries: &BTreeMap<String, String>) -> Result<Option<PipelineKind>> {
    entries
        .get("pipeline")
        .map(|v| parse_pipeline(v))
        .transpose()
}

fn parse_pipeline(value: &str) -> Result<PipelineKind> {
    match value {
        "structural" => Ok(PipelineKind::Structural),
        "regular" => Ok(PipelineKind::Regular),
        other => bail!("pipeline '{other}' is not 'structural' or 'regular'"),
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    value
        .parse()
        .with_context(|| format!("config key '{key}': '{value}' is not true/false"))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    value
        .parse()
        .with_context(|| format!("config key '{key}': invalid number '{value}'"))
}

/// Applies config-file entries onto a run configuration.
pub fn apply_entries(cfg: &mut RunConfig, entries: &BTreeMap<String, String>) -> Result<()> {
    for (key, value) in entries {
        match key.as_str() {
            "pipeline" => cfg.pipeline = parse_pipeline(value)?,
            "symmetrize" => cfg.symmetrize = parse_bool(key, value)?,
            "sample" => cfg.sample = parse_bool(key, value)?,
            "sample-size" => cfg.sample_size = parse_num(key, value)?,
            "samples" => cfg.sample_count = parse_num(key, value)?,
            "seed" => cfg.seed = parse_num(key, value)?,
            "restart-prob" => cfg.restart_probability = parse_num(key, value)?,
            "max-steps" => cfg.max_steps = Some(parse_num(key, value)?),
            "k-min" => cfg.k_min = parse_num(key, value)?,
            "k-max" => cfg.k_max = parse_num(key, value)?,
            "init" => {
                cfg.init = match value.as_str() {
                    "build" => InitMethod::Build,
                    "random" => InitMethod::Random,
                    other => bail!("init '{other}' is not 'build' or 'random'"),
                }
            }
            "closure" => cfg.closure = parse_bool(key, value)?,
            "closure-order" => {
                cfg.closure_order = match value.as_str() {
                    "sample-then-close" => ClosureOrder::SampleThenClose,
                    "close-then-sample" => ClosureOrder::CloseThenSample,
                    other => bail!(
                        "closure-order '{other}' is not 'sample-then-close' or 'close-then-sample'"
                    ),
                }
            }
            "out-dir" => cfg.out_dir = Some(PathBuf::from(value)),
            "purity" => cfg.role_purity = parse_num(key, value)?,
            "pair-budget" => cfg.pair_budget = parse_num(key, value)?,
            "edge-budget" => cfg.edge_budget = parse_num(key, value)?,
            "node-cap" => cfg.node_cap = parse_num(key, value)?,
            "allow-over-cap" => cfg.allow_over_cap = parse_bool(key, value)?,
            "distance" => {
                cfg.distance_rule = match value.as_str() {
                    "inverse" => DistanceRule::InverseIteration,
                    "remaining" => DistanceRule::RemainingFraction,
                    other => bail!("distance '{other}' is not 'inverse' or 'remaining'"),
                }
            }
            other => bail!("unknown config key '{other}'"),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn temp_config(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_keys_comments_and_blanks() {
        let f = temp_config("# run setup\n\npipeline = regular\nseed = 9\nsample = false\n");
        let entries = parse_file(f.path()).unwrap();
        assert_eq!(entries.len(), 3);
        assert_eq!(entries["seed"], "9");
        assert_eq!(
            pipeline_from_entries(&entries).unwrap(),
            Some(PipelineKind::Regular)
        );
        let mut cfg = RunConfig::regular();
        apply_entries(&mut cfg, &entries).unwrap();
        assert_eq!(cfg.seed, 9);
        assert!(!cfg.sample);
    }

    #[test]
    fn rejects_unknown_and_malformed_keys() {
        let f = temp_config("mystery = 1\n");
        let entries = parse_file(f.path()).unwrap();
        let mut cfg = RunConfig::structural();
        assert!(apply_entries(&mut cfg, &entries).is_err());

        let f = temp_config("just-a-key\n");
        assert!(parse_file(f.path()).is_err());

        let f = temp_config("seed = 1\nseed = 2\n");
        assert!(parse_file(f.path()).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        for line in [
            "pipeline = diagonal",
            "sample = maybe",
            "seed = one",
            "init = kmeans",
            "closure-order = never",
            "distance = hamming",
        ] {
            let f = temp_config(&format!("{line}\n"));
            let entries = parse_file(f.path()).unwrap();
            let mut cfg = RunConfig::structural();
            assert!(
                pipeline_from_entries(&entries).is_err()
                    || apply_entries(&mut cfg, &entries).is_err(),
                "accepted: {line}"
            );
        }
    }
}
