//! On-disk persistence of the 6j memo.
//!
//! The file is line oriented: a version header, then one entry per line as
//! `<six twice-j integers><TAB><surd string>`, sorted by canonical key.

use std::fs;
use std::path::Path;

use surd::{HalfInt, SurdSum, SurdTerm};

use crate::error::{Result, SpinError};
use crate::wigner::{admissible_6j, export_6j_cache, import_6j_cache, wigner_6j_term, SixJKey};

/// First line of every cache file.
pub const CACHE_HEADER: &str = "# spinnet-6j-cache v1";

/// Environment variable naming the default cache path for the command-line tool.
pub const CACHE_ENV: &str = "SPINNET_CACHE";

/// Evaluate every admissible 6j with arguments <= jmax so the memo holds them.
pub fn prefill_6j_cache(jmax: HalfInt) -> usize {
    let all = admissible_6j(jmax);
    for j in &all {
        wigner_6j_term(*j);
    }
    all.len()
}

/// Render the current memo in the cache text format.
pub fn cache_to_string() -> String {
    let mut out = String::from(CACHE_HEADER);
    out.push('\n');
    for (k, v) in export_6j_cache() {
        out.push_str(&format!("{k}\t{}\n", v.to_surd()));
    }
    out
}

/// Write the memo to `path`; returns the number of entries written.
pub fn save_cache(path: &Path) -> Result<usize> {
    let text = cache_to_string();
    fs::write(path, &text)?;
    Ok(text.lines().count() - 1)
}

/// Parse cache text into entries, rejecting any malformed line.
pub fn parse_cache(text: &str) -> Result<Vec<(SixJKey, SurdSum)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == CACHE_HEADER => {}
        Some((_, h)) => return Err(SpinError::Invalid(format!("cache header `{h}` is not `{CACHE_HEADER}`"))),
        None => return Err(SpinError::Invalid("cache file is empty".into())),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |why: &str| SpinError::Invalid(format!("cache line {}: {why}", i + 1));
        let (key, value) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
        let key: SixJKey = key.parse().map_err(|_| bad("bad key"))?;
        let value: SurdSum = value.trim().parse().map_err(|_| bad("bad surd"))?;
        if !value.is_zero() && value.as_term().is_none() {
            return Err(bad("6j value must be a single surd term"));
        }
        out.push((key, value));
    }
    Ok(out)
}

/// Merge a cache file into the memo; returns the number of new entries.
pub fn load_cache(path: &Path) -> Result<usize> {
    let text = fs::read_to_string(path)?;
    let entries = parse_cache(&text)?;
    Ok(import_6j_cache(
        entries.into_iter().map(|(k, v)| (k, v.as_term().unwrap_or_else(SurdTerm::zero))),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wigner::six_j_cache_len;

    #[test]
    fn round_trip_through_text() {
        prefill_6j_cache(HalfInt::ONE);
        let text = cache_to_string();
        let parsed = parse_cache(&text).unwrap();
        assert!(parsed.len() >= six_j_cache_len().min(1));
        for (k, v) in parsed {
            assert_eq!(wigner_6j_term(k.args()).to_surd(), v, "{k}");
        }
    }

    #[test]
    fn rejects_corruption() {
        assert!(parse_cache("").is_err());
        assert!(parse_cache("wrong header\n").is_err());
        let h = CACHE_HEADER;
        assert!(parse_cache(&format!("{h}\n0 0 0 0 0 0 1\n")).is_err());
        assert!(parse_cache(&format!("{h}\n0 0 0 0 0\t1\n")).is_err());
        assert!(parse_cache(&format!("{h}\n0 0 0 0 0 0\tsqrt(\n")).is_err());
        assert!(parse_cache(&format!("{h}\n0 0 0 0 0 0\t1+sqrt(2)\n")).is_err());
        assert_eq!(parse_cache(&format!("{h}\n0 0 0 0 0 0\t1\n")).unwrap().len(), 1);
    }

    #[test]
    fn save_and_load_file() {
        let dir = std::env::temp_dir().join(format!("spinnet-cache-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("six.txt");
        prefill_6j_cache(HalfInt::HALF);
        let n = save_cache(&path).unwrap();
        assert!(n > 0);
        // loading into a populated memo adds nothing new
        assert_eq!(load_cache(&path).unwrap(), 0);
        fs::remove_dir_all(&dir).unwrap();
    }
}
