//! `key = value` configuration files. Lines starting with `#` are comments.
//!
//! Recognized keys: `max_pairs`, `max_basis`, `max_terms`, `max_quotient`,
//! `exhaustive_threshold`, `exhaustive_cap`, `workers`, and `field.<q>`
//! whose value is a JSON field descriptor overriding the canonical
//! construction of the field of order `q`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use trigonal::ff::FieldDescriptor;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    pub max_pairs: Option<usize>,
    pub max_basis: Option<usize>,
    pub max_terms: Option<usize>,
    pub max_quotient: Option<usize>,
    pub exhaustive_threshold: Option<u64>,
    pub exhaustive_cap: Option<u64>,
    pub workers: Option<usize>,
    pub fields: BTreeMap<u64, FieldDescriptor>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Config::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Config> {
        let mut c = Config::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`", n + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.replace('_', "").parse::<u64>().with_context(|| format!("line {}: bad number {v:?}", n + 1));
            match key {
                "max_pairs" => c.max_pairs = Some(num(value)? as usize),
                "max_basis" => c.max_basis = Some(num(value)? as usize),
                "max_terms" => c.max_terms = Some(num(value)? as usize),
                "max_quotient" => c.max_quotient = Some(num(value)? as usize),
                "exhaustive_threshold" => c.exhaustive_threshold = Some(num(value)?),
                "exhaustive_cap" => c.exhaustive_cap = Some(num(value)?),
                "workers" => c.workers = Some(num(value)? as usize),
                _ => match key.strip_prefix("field.") {
                    Some(q) => {
                        let q = num(q)?;
                        let d: FieldDescriptor = serde_json::from_str(value)
                            .with_context(|| format!("line {}: bad field descriptor", n + 1))?;
                        c.fields.insert(q, d);
                    }
                    None => bail!("line {}: unknown key {key:?}", n + 1),
                },
            }
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let c = Config::parse(
            "# budgets\nmax_pairs = 2_000\nworkers=3\nfield.49 = {\"p\":7,\"degree\":2,\"modulus\":[1,0,1],\"zeta\":[4,6]}\n",
        )
        .unwrap();
        assert_eq!(c.max_pairs, Some(2000));
        assert_eq!(c.workers, Some(3));
        assert_eq!(c.fields[&49].modulus, vec![1, 0, 1]);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(Config::parse("colour = blue").is_err());
        assert!(Config::parse("max_pairs").is_err());
    }
}
