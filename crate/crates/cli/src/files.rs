use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use hyrepair::model::HybridModel;
use hyrepair::synth::{MinedParam, Monotonicity};

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_model(path: &Path) -> Result<HybridModel> {
    let text = read(path)?;
    HybridModel::from_json(&text).with_context(|| format!("{} is not a valid model file", path.display()))
}

/// Writes through a temporary file in the same directory, so a failed run
/// never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Parses repeated `name=value` flags.
pub fn assignments(items: &[String]) -> Result<BTreeMap<String, f64>> {
    items
        .iter()
        .map(|s| {
            let (k, v) = s.split_once('=').ok_or_else(|| anyhow!("expected name=value, got '{s}'"))?;
            let v: f64 = v.trim().parse().with_context(|| format!("bad number in '{s}'"))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

/// Parses `name:lo:hi`.
pub fn range(s: &str) -> Result<(String, f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    let [name, lo, hi] = parts[..] else { bail!("expected name:lo:hi, got '{s}'") };
    Ok((name.to_string(), num(lo, s)?, num(hi, s)?))
}

/// Parses `name:lo:hi:inc|dec`.
pub fn mined(s: &str) -> Result<MinedParam> {
    let parts: Vec<&str> = s.split(':').collect();
    let [name, lo, hi, mono] = parts[..] else { bail!("expected name:lo:hi:inc|dec, got '{s}'") };
    let monotonicity: Monotonicity = mono.parse().map_err(|e: String| anyhow!("{e} in '{s}'"))?;
    Ok(MinedParam { name: name.to_string(), lo: num(lo, s)?, hi: num(hi, s)?, monotonicity })
}

fn num(x: &str, whole: &str) -> Result<f64> {
    x.trim().parse().with_context(|| format!("bad number '{x}' in '{whole}'"))
}
