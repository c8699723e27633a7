//! On-disk cache of [`DualTable`]s.
//!
//! Directory resolution: explicit path, then `$CHARRANK_CACHE_DIR`, then
//! `$XDG_CACHE_HOME/charrank`, then `$HOME/.cache/charrank`. Writers hold `<dir>/.lock`
//! (created exclusively) while writing; files are written to a temporary name and renamed.
//! A file that fails to parse, has another format version, or violates the recurrence is
//! discarded and recomputed.

use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use crate::duals::DualTable;
use crate::error::{Error, Result};

pub const CACHE_ENV: &str = "CHARRANK_CACHE_DIR";

const LOCK_NAME: &str = ".lock";
const LOCK_TIMEOUT: Duration = Duration::from_secs(30);
const LOCK_POLL: Duration = Duration::from_millis(50);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheDir {
    root: PathBuf,
}

/// Exclusive write lock on a cache directory, released on drop.
#[derive(Debug)]
pub struct CacheLock {
    path: PathBuf,
}

impl CacheLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        let path = dir.join(LOCK_NAME);
        let start = Instant::now();
        loop {
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(_) => return Ok(CacheLock { path }),
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    if start.elapsed() > LOCK_TIMEOUT {
                        return Err(Error::CacheFormat {
                            path,
                            reason: format!(
                                "lock held for more than {}s; remove it if no other process is running",
                                LOCK_TIMEOUT.as_secs()
                            ),
                        });
                    }
                    thread::sleep(LOCK_POLL);
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
}

impl Drop for CacheLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

impl CacheDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        CacheDir { root: root.into() }
    }

    /// Resolves the cache directory, or `None` when no candidate location is known.
    pub fn resolve(explicit: Option<PathBuf>) -> Option<Self> {
        if let Some(p) = explicit {
            return Some(CacheDir::new(p));
        }
        let from_env = |var: &str| std::env::var_os(var).filter(|v| !v.is_empty());
        if let Some(p) = from_env(CACHE_ENV) {
            return Some(CacheDir::new(p));
        }
        if let Some(p) = from_env("XDG_CACHE_HOME") {
            return Some(CacheDir::new(PathBuf::from(p).join("charrank")));
        }
        from_env("HOME").map(|h| CacheDir::new(PathBuf::from(h).join(".cache").join("charrank")))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn table_path(&self, k: usize, killed: &[usize]) -> PathBuf {
        let mut killed = killed.to_vec();
        killed.sort_unstable();
        killed.dedup();
        let tag = if killed.is_empty() {
            "full".to_string()
        } else {
            let ids: Vec<String> = killed.iter().map(|i| i.to_string()).collect();
            format!("kill{}", ids.join("_"))
        };
        self.root.join(format!("duals-k{k}-{tag}.txt"))
    }

    /// Loads the table for `(k, killed)` if a valid file exists, otherwise an empty table.
    pub fn load_table(&self, k: usize, killed: &[usize]) -> Result<DualTable> {
        let path = self.table_path(k, killed);
        match File::open(&path) {
            Ok(f) => match DualTable::read_from(BufReader::new(f), k, killed, &path) {
                Ok(t) => {
                    log::debug!("loaded {} (up to {})", path.display(), t.computed_up_to());
                    Ok(t)
                }
                Err(Error::CacheFormat { reason, .. }) => {
                    log::warn!("discarding cache file {}: {reason}", path.display());
                    let _ = fs::remove_file(&path);
                    DualTable::reduced(k, killed)
                }
                Err(e) => Err(e),
            },
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => DualTable::reduced(k, killed),
            Err(e) => Err(e.into()),
        }
    }

    /// Writes `table` unless the file on disk already covers at least as many degrees.
    pub fn store_table(&self, table: &DualTable) -> Result<()> {
        fs::create_dir_all(&self.root)?;
        let _lock = CacheLock::acquire(&self.root)?;
        let path = self.table_path(table.k(), table.killed());
        if let Ok(f) = File::open(&path) {
            if let Ok(existing) =
                DualTable::read_from(BufReader::new(f), table.k(), table.killed(), &path)
            {
                if existing.computed_up_to() >= table.computed_up_to() {
                    return Ok(());
                }
            }
        }
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        table.write_to(BufWriter::new(File::create(&tmp)?))?;
        fs::rename(&tmp, &path)?;
        log::debug!(
            "stored {} (up to {})",
            path.display(),
            table.computed_up_to()
        );
        Ok(())
    }

    /// Loads the table, extends it through degree `up_to`, and writes it back if it grew.
    pub fn table_through(&self, k: usize, killed: &[usize], up_to: u32) -> Result<DualTable> {
        let mut table = self.load_table(k, killed)?;
        let before = table.computed_up_to();
        table.extend_to(up_to);
        if table.computed_up_to() > before {
            self.store_table(&table)?;
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scratch(name: &str) -> PathBuf {
        let dir =
            std::env::temp_dir().join(format!("charrank-cache-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn store_load_extend() {
        let dir = scratch("sle");
        let cache = CacheDir::new(&dir);
        let t = cache.table_through(3, &[1], 40).unwrap();
        assert_eq!(t.computed_up_to(), 40);
        let again = cache.load_table(3, &[1]).unwrap();
        assert_eq!(again.entries(), t.entries());
        // A shorter request does not shrink the file.
        cache.table_through(3, &[1], 10).unwrap();
        assert_eq!(cache.load_table(3, &[1]).unwrap().computed_up_to(), 40);
        assert!(!dir.join(LOCK_NAME).exists());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn corrupt_file_is_discarded() {
        let dir = scratch("corrupt");
        let cache = CacheDir::new(&dir);
        fs::create_dir_all(&dir).unwrap();
        fs::write(
            cache.table_path(4, &[]),
            "charrank-duals v999 k=4 killed=- up_to=0\n1\n",
        )
        .unwrap();
        let t = cache.load_table(4, &[]).unwrap();
        assert_eq!(t.computed_up_to(), 0);
        assert!(!cache.table_path(4, &[]).exists());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn explicit_path_wins() {
        let c = CacheDir::resolve(Some(PathBuf::from("/x/y"))).unwrap();
        assert_eq!(c.root(), Path::new("/x/y"));
        assert_eq!(
            c.table_path(4, &[3, 1, 2]),
            PathBuf::from("/x/y/duals-k4-kill1_2_3.txt")
        );
    }
}
