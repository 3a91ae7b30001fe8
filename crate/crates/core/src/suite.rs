//! The bundled problem suite: one directory per problem holding a
//! description document and `demo/` and `eval/` instance directories.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::ConfigError;
use crate::problems::adapter;
use crate::types::{InstanceRef, ProblemId, Split};

/// Suite shipped with this crate.
pub fn bundled_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("suite")
}

/// Reference costs shipped with this crate.
pub fn bundled_refs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("refs")
}

#[derive(Debug, Clone)]
pub struct Suite {
    pub problem: ProblemId,
    pub description: String,
    /// Sorted by instance id.
    pub demo: Vec<InstanceRef>,
    pub eval: Vec<InstanceRef>,
}

fn load_split(dir: &Path, problem: ProblemId, split: Split) -> Result<Vec<InstanceRef>, ConfigError> {
    let sub = dir.join(split.dir_name());
    let entries = fs::read_dir(&sub).map_err(|e| ConfigError::io(&sub, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == problem.instance_extension()))
        .collect();
    paths.sort();
    let a = adapter(problem);
    paths
        .into_iter()
        .map(|p| {
            let payload = fs::read(&p).map_err(|e| ConfigError::io(&p, e))?;
            let id = p.file_stem().unwrap().to_string_lossy().into_owned();
            a.check_instance(&String::from_utf8_lossy(&payload))
                .map_err(|e| ConfigError::Invalid(format!("instance {}: {e}", p.display())))?;
            Ok(InstanceRef {
                problem,
                instance_id: id,
                split,
                payload,
            })
        })
        .collect()
}

impl Suite {
    pub fn load(root: &Path, problem: ProblemId) -> Result<Suite, ConfigError> {
        let dir = root.join(problem.as_str());
        let desc_path = dir.join("description.md");
        let description = fs::read_to_string(&desc_path).map_err(|_| ConfigError::MissingDescription(desc_path))?;
        let demo = load_split(&dir, problem, Split::Demo)?;
        let eval = load_split(&dir, problem, Split::Eval)?;
        if demo.is_empty() || eval.is_empty() {
            return Err(ConfigError::Invalid(format!(
                "{problem} needs at least one demo and one eval instance"
            )));
        }
        let mut seen = BTreeSet::new();
        for i in demo.iter().chain(&eval) {
            if !seen.insert(i.instance_id.as_str()) {
                return Err(ConfigError::Invalid(format!("{problem}: instance id `{}` used twice", i.instance_id)));
            }
        }
        Ok(Suite {
            problem,
            description,
            demo,
            eval,
        })
    }

    pub fn bundled(problem: ProblemId) -> Result<Suite, ConfigError> {
        Self::load(&bundled_root(), problem)
    }

    /// The first `n` demo instances by id, or all of them.
    pub fn select_demos(&self, n: Option<usize>) -> Result<Vec<InstanceRef>, ConfigError> {
        match n {
            None => Ok(self.demo.clone()),
            Some(0) => Err(ConfigError::Invalid("num_demos must be at least 1".into())),
            Some(n) if n > self.demo.len() => Err(ConfigError::Invalid(format!(
                "num_demos {n} exceeds the {} available demo instances",
                self.demo.len()
            ))),
            Some(n) => Ok(self.demo[..n].to_vec()),
        }
    }

    pub fn instances(&self) -> impl Iterator<Item = &InstanceRef> {
        self.demo.iter().chain(&self.eval)
    }
}
