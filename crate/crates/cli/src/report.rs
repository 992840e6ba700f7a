use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use zerorect_core::disclab::{ConstantSet, ConstantTag};
use zerorect_core::oracles::OracleBudget;

use crate::error::CliError;

pub const SCHEMA: &str = "zerorect/1";

/// Settings shared by every subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub constants: ConstantTag,
    pub budget: OracleBudget,
    /// Worker threads as requested; `None` means one per logical core.
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            constants: ConstantTag::Practical,
            budget: OracleBudget::default(),
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn constant_set(&self) -> ConstantSet {
        ConstantSet::from_tag(self.constants)
    }

    /// Fields present in `file` replace the current ones; nested objects merge.
    pub fn overridden_by(&self, file: Value) -> Result<RunConfig, CliError> {
        fn merge(base: &mut Value, over: Value) {
            match (base, over) {
                (Value::Object(b), Value::Object(o)) => {
                    for (k, v) in o {
                        merge(b.entry(k).or_insert(Value::Null), v);
                    }
                }
                (b, o) => *b = o,
            }
        }
        let mut base = serde_json::to_value(self).expect("config serializes");
        merge(&mut base, file);
        serde_json::from_value(base).map_err(|e| CliError::Input(format!("bad config file: {e}")))
    }
}

#[derive(Serialize)]
struct ReportConfig {
    seed: u64,
    constants: ConstantSet,
    budget: OracleBudget,
    jobs: Option<usize>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
    config: ReportConfig,
    verified: bool,
    #[serde(flatten)]
    result: Value,
}

/// Renders the versioned report around a command result, which must
/// serialize to a JSON object.
pub fn render(command: &str, cfg: &RunConfig, timestamp: bool, verified: bool, result: Value) -> String {
    let env = Envelope {
        schema: SCHEMA,
        command,
        timestamp: timestamp.then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())),
        config: ReportConfig {
            seed: cfg.seed,
            constants: cfg.constant_set(),
            budget: cfg.budget,
            jobs: cfg.jobs,
        },
        verified,
        result,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
    s.push('\n');
    s
}

/// Writes through a temporary file in the target directory and renames it,
/// so readers never see a partial report.
pub fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io("stdout".into(), e))
        }
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let io = |e| CliError::Io(path.display().to_string(), e);
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(text.as_bytes()).map_err(io)?;
            tmp.persist(path).map_err(|e| io(e.error))?;
            Ok(())
        }
    }
}
