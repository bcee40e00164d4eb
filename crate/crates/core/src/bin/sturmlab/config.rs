//! Run configuration: a plain-text `key=value` file overridden by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

/// Problems the user can fix by changing the invocation (exit code 2).
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Reads `key=value` lines. Blank lines and lines starting with `#` are skipped.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, Usage> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Usage(format!("config line {}: expected key=value", n + 1)))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

pub fn load_file(path: &Path) -> std::io::Result<String> {
    std::fs::read_to_string(path)
}

/// Effective settings of one run. Every value that influenced the run is recorded
/// here, so it can be written back into each output file.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub settings: BTreeMap<String, String>,
    #[serde(skip)]
    file: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new(command: &str, file: BTreeMap<String, String>) -> Self {
        RunConfig { command: command.to_string(), settings: BTreeMap::new(), file }
    }

    /// Flag value, else file value, else default; the winner is recorded.
    pub fn raw(&mut self, key: &str, flag: Option<&str>, default: Option<&str>) -> Option<String> {
        let v = flag.map(str::to_string).or_else(|| self.file.get(key).cloned()).or_else(|| default.map(str::to_string));
        if let Some(v) = &v {
            self.settings.insert(key.to_string(), v.clone());
        }
        v
    }

    pub fn get<T: FromStr>(&mut self, key: &str, flag: Option<&str>, default: Option<&str>) -> Result<Option<T>, Usage> {
        match self.raw(key, flag, default) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| Usage(format!("--{key}: cannot parse {v:?}"))),
        }
    }

    pub fn need<T: FromStr>(&mut self, key: &str, flag: Option<&str>, default: Option<&str>) -> Result<T, Usage> {
        self.get(key, flag, default)?.ok_or_else(|| Usage(format!("--{key} is required")))
    }

    pub fn flag(&mut self, key: &str, flag: bool) -> Result<bool, Usage> {
        if flag {
            self.settings.insert(key.to_string(), "true".into());
            return Ok(true);
        }
        match self.file.get(key).map(String::as_str) {
            None => Ok(false),
            Some("true" | "1" | "yes") => {
                self.settings.insert(key.to_string(), "true".into());
                Ok(true)
            }
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(Usage(format!("{key}: expected true/false, got {v:?}"))),
        }
    }

    /// `key=value` lines, sorted by key.
    pub fn lines(&self) -> String {
        let mut s = format!("command={}\n", self.command);
        for (k, v) in &self.settings {
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }
}

/// Comma-separated unsigned integers with an exact count.
pub fn uints(s: &str, n: usize, what: &str) -> Result<Vec<u64>, Usage> {
    let v: Vec<u64> = s
        .split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Usage(format!("--{what}: expected {n} comma-separated positive integers, got {s:?}")))?;
    if v.len() != n {
        return Err(Usage(format!("--{what}: expected {n} values, got {}", v.len())));
    }
    Ok(v)
}

/// `lo:hi`; an empty window is a usage error.
pub fn window(s: &str, what: &str) -> Result<(usize, usize), Usage> {
    let (a, b) = s.split_once(':').ok_or_else(|| Usage(format!("--{what}: expected lo:hi, got {s:?}")))?;
    let lo = a.trim().parse::<usize>().map_err(|_| Usage(format!("--{what}: bad lower end {a:?}")))?;
    let hi = b.trim().parse::<usize>().map_err(|_| Usage(format!("--{what}: bad upper end {b:?}")))?;
    if lo > hi {
        return Err(Usage(format!("--{what}: empty window {lo}:{hi}")));
    }
    Ok((lo, hi))
}
