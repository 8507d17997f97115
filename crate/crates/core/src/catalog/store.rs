use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{parse_sign_matrices, to_sign_text, ParseError};
use crate::gf2::SignMatrix;

pub const DEFAULT_BASE_URL: &str = "http://neilsloane.com/hadamard/";
const MANIFEST: &str = "manifest.jsonl";

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("no such catalog order: {0} (Hadamard orders are 1, 2 and multiples of 4 up to 256)")]
    NoSuchOrder(usize),
    #[error(
        "could not fetch {url}: {message}\n\
         hint: the vendored fixtures work offline (drop --remote), or point \
         FUGLEDE_CATALOG_URL at a reachable mirror"
    )]
    Network { url: String, message: String },
    #[error("catalog index {url} lists no files for order {order}")]
    NoFiles { order: usize, url: String },
    #[error("{file}: {source}")]
    Parse { file: String, source: ParseError },
    #[error("{file}: content hash {found} does not match manifest {expected}")]
    Checksum {
        file: String,
        expected: String,
        found: String,
    },
    #[error("{file}: not a Hadamard matrix")]
    InvalidHadamard { file: String },
    #[error("{path}: malformed manifest: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CatalogError + '_ {
    move |source| CatalogError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntrySource {
    RemoteUrl,
    LocalFile,
    Vendored,
}

impl EntrySource {
    fn of_url(url: &str) -> Self {
        if url.starts_with("http://") || url.starts_with("https://") {
            EntrySource::RemoteUrl
        } else if url.starts_with("file:") {
            EntrySource::LocalFile
        } else {
            EntrySource::Vendored
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub order: usize,
    pub class_label: String,
    pub source: EntrySource,
    pub matrix: SignMatrix,
}

/// One line of `manifest.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub order: usize,
    #[serde(rename = "class-label")]
    pub class_label: String,
    pub url: String,
    #[serde(rename = "content-hash")]
    pub content_hash: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub records: Vec<ManifestRecord>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Manifest, CatalogError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let records = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                serde_json::from_str(l).map_err(|e| CatalogError::Manifest {
                    path: path.to_path_buf(),
                    message: e.to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Manifest { records })
    }

    pub fn to_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("plain struct") + "\n")
            .collect()
    }
}

pub fn content_hash(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

/// Hadamard matrices exist only in orders 1, 2 and multiples of 4; the
/// remote library stops at 256.
pub fn is_catalog_order(order: usize) -> bool {
    matches!(order, 1 | 2) || (order.is_multiple_of(4) && (4..=256).contains(&order))
}

/// Number of equivalence classes, where the classification is complete.
pub fn expected_class_count(order: usize) -> Option<usize> {
    match order {
        1 | 2 | 4 | 8 | 12 => Some(1),
        16 => Some(5),
        20 => Some(3),
        24 => Some(60),
        28 => Some(487),
        _ => None,
    }
}

/// Extracts the file names for `order` from the library's index page:
/// every quoted or bare token of the form `had.<order>.txt` or
/// `had.<order>.<anything>.txt`.
pub fn catalog_files(index_html: &str, order: usize) -> Vec<String> {
    let exact = format!("had.{order}.txt");
    let prefix = format!("had.{order}.");
    let mut files: Vec<String> = index_html
        .split(|c: char| c == '"' || c == '\'' || c == '<' || c == '>' || c == '/' || c.is_whitespace())
        .filter(|tok| tok == &exact || (tok.starts_with(&prefix) && tok.ends_with(".txt")))
        .map(str::to_string)
        .collect();
    files.sort();
    files.dedup();
    files
}

/// Source of remote bytes. Abstracted so tests can serve files locally.
pub trait Fetcher: Sync {
    fn get(&self, url: &str) -> Result<Vec<u8>, String>;
}

/// Blocking HTTP GET.
#[derive(Debug, Default, Clone, Copy)]
pub struct HttpFetcher;

impl Fetcher for HttpFetcher {
    #[cfg(feature = "fetch")]
    fn get(&self, url: &str) -> Result<Vec<u8>, String> {
        let mut response = ureq::get(url).call().map_err(|e| e.to_string())?;
        response.body_mut().read_to_vec().map_err(|e| e.to_string())
    }

    #[cfg(not(feature = "fetch"))]
    fn get(&self, _url: &str) -> Result<Vec<u8>, String> {
        Err("built without the `fetch` feature".into())
    }
}

/// Catalog copies shipped with the sources, one `order-<m>` directory each.
pub fn vendored_fixtures_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/catalog"))
}

#[derive(Debug, Clone)]
pub struct CatalogConfig {
    pub base_url: String,
    pub cache_dir: PathBuf,
    /// Directory with the same layout as the cache, shipped with the sources.
    pub fixtures_dir: Option<PathBuf>,
    pub use_vendored: bool,
    /// Consult the cache before anything else.
    pub use_cache: bool,
    pub allow_network: bool,
    pub validate: bool,
    /// Remote file names to use instead of discovering them from the index.
    pub files: Option<Vec<String>>,
}

impl CatalogConfig {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        CatalogConfig {
            base_url: DEFAULT_BASE_URL.to_string(),
            cache_dir: cache_dir.into(),
            fixtures_dir: None,
            use_vendored: true,
            use_cache: true,
            allow_network: true,
            validate: true,
            files: None,
        }
    }

    /// Reads `FUGLEDE_CATALOG_URL`, `FUGLEDE_CACHE_DIR` and
    /// `FUGLEDE_FIXTURES_DIR`, falling back to the defaults.
    pub fn from_env() -> Self {
        let cache_dir = std::env::var_os("FUGLEDE_CACHE_DIR")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache/fuglede")))
            .unwrap_or_else(|| PathBuf::from(".fuglede-cache"));
        let mut cfg = CatalogConfig::new(cache_dir);
        if let Ok(url) = std::env::var("FUGLEDE_CATALOG_URL") {
            cfg.base_url = url;
        }
        cfg.fixtures_dir = std::env::var_os("FUGLEDE_FIXTURES_DIR")
            .map(PathBuf::from)
            .or_else(|| Some(vendored_fixtures_dir()).filter(|d| d.is_dir()));
        cfg
    }

    fn order_dir(&self, root: &Path, order: usize) -> PathBuf {
        root.join(format!("order-{order}"))
    }

    fn url_for(&self, file: &str) -> String {
        if self.base_url.ends_with('/') {
            format!("{}{file}", self.base_url)
        } else {
            format!("{}/{file}", self.base_url)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Cache,
    Vendored,
    Remote,
}

#[derive(Debug, Clone)]
pub struct FetchOutcome {
    pub order: usize,
    pub entries: Vec<CatalogEntry>,
    pub origin: Origin,
}

impl FetchOutcome {
    pub fn cache_hit(&self) -> bool {
        self.origin == Origin::Cache
    }

    /// `Some(expected)` when fewer entries than known classes were found.
    pub fn missing_classes(&self) -> Option<usize> {
        expected_class_count(self.order).filter(|&n| self.entries.len() < n)
    }
}

/// Returns every catalog entry of `order`, trying the cache, then the
/// vendored fixtures, then the network. Whatever is found outside the cache
/// is written into it.
pub fn fetch_order(
    order: usize,
    config: &CatalogConfig,
    fetcher: &dyn Fetcher,
) -> Result<FetchOutcome, CatalogError> {
    if !is_catalog_order(order) {
        return Err(CatalogError::NoSuchOrder(order));
    }
    let cache = config.order_dir(&config.cache_dir, order);
    if config.use_cache && cache.join(MANIFEST).is_file() {
        let entries = load_dir(&cache, order, config.validate)?;
        return Ok(FetchOutcome { order, entries, origin: Origin::Cache });
    }

    if config.use_vendored {
        if let Some(fixtures) = &config.fixtures_dir {
            let dir = config.order_dir(fixtures, order);
            if dir.join(MANIFEST).is_file() {
                let manifest = Manifest::read(&dir.join(MANIFEST))?;
                let entries = load_dir(&dir, order, config.validate)?;
                write_dir(&cache, &manifest, &entries)?;
                return Ok(FetchOutcome { order, entries, origin: Origin::Vendored });
            }
        }
    }

    if !config.allow_network {
        return Err(CatalogError::Network {
            url: config.base_url.clone(),
            message: "network access disabled and no cached or vendored copy".into(),
        });
    }
    let (manifest, entries) = download(order, config, fetcher)?;
    write_dir(&cache, &manifest, &entries)?;
    Ok(FetchOutcome { order, entries, origin: Origin::Remote })
}

fn download(
    order: usize,
    config: &CatalogConfig,
    fetcher: &dyn Fetcher,
) -> Result<(Manifest, Vec<CatalogEntry>), CatalogError> {
    let get = |url: &str| {
        fetcher.get(url).map_err(|message| CatalogError::Network {
            url: url.to_string(),
            message,
        })
    };
    let files = match &config.files {
        Some(files) => files.clone(),
        None => {
            let index = get(&config.base_url)?;
            catalog_files(&String::from_utf8_lossy(&index), order)
        }
    };
    if files.is_empty() {
        return Err(CatalogError::NoFiles { order, url: config.base_url.clone() });
    }

    let mut manifest = Manifest::default();
    let mut entries = Vec::new();
    for file in &files {
        let url = config.url_for(file);
        let bytes = get(&url)?;
        let text = String::from_utf8_lossy(&bytes);
        let matrices = parse_sign_matrices(&text, Some(order)).map_err(|source| CatalogError::Parse {
            file: file.clone(),
            source,
        })?;
        let stem = file.strip_suffix(".txt").unwrap_or(file);
        let many = matrices.len() > 1;
        for (k, matrix) in matrices.into_iter().enumerate() {
            let class_label = if many { format!("{stem}.{}", k + 1) } else { stem.to_string() };
            if config.validate && !matrix.is_hadamard() {
                return Err(CatalogError::InvalidHadamard { file: class_label });
            }
            manifest.records.push(ManifestRecord {
                order,
                class_label: class_label.clone(),
                url: url.clone(),
                content_hash: content_hash(to_sign_text(&matrix).as_bytes()),
            });
            entries.push(CatalogEntry {
                order,
                class_label,
                source: EntrySource::RemoteUrl,
                matrix,
            });
        }
    }
    Ok((manifest, entries))
}

/// Reads and checks every entry listed in `dir/manifest.jsonl`.
pub fn load_dir(dir: &Path, order: usize, validate: bool) -> Result<Vec<CatalogEntry>, CatalogError> {
    let manifest = Manifest::read(&dir.join(MANIFEST))?;
    let mut entries = Vec::with_capacity(manifest.records.len());
    for record in &manifest.records {
        let path = dir.join(&record.class_label);
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        let found = content_hash(&bytes);
        if found != record.content_hash {
            return Err(CatalogError::Checksum {
                file: path.display().to_string(),
                expected: record.content_hash.clone(),
                found,
            });
        }
        let mut matrices = parse_sign_matrices(&String::from_utf8_lossy(&bytes), Some(order))
            .map_err(|source| CatalogError::Parse {
                file: path.display().to_string(),
                source,
            })?;
        if matrices.len() != 1 {
            return Err(CatalogError::Manifest {
                path: path.clone(),
                message: format!("expected one matrix per entry, found {}", matrices.len()),
            });
        }
        let matrix = matrices.remove(0);
        if validate && !matrix.is_hadamard() {
            return Err(CatalogError::InvalidHadamard {
                file: path.display().to_string(),
            });
        }
        entries.push(CatalogEntry {
            order,
            class_label: record.class_label.clone(),
            source: EntrySource::of_url(&record.url),
            matrix,
        });
    }
    entries.sort_by(|a, b| a.class_label.cmp(&b.class_label));
    Ok(entries)
}

/// Writes entry files, then the manifest, each via temp-file-and-rename.
pub fn write_dir(dir: &Path, manifest: &Manifest, entries: &[CatalogEntry]) -> Result<(), CatalogError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for entry in entries {
        write_atomic(&dir.join(&entry.class_label), to_sign_text(&entry.matrix).as_bytes())?;
    }
    write_atomic(&dir.join(MANIFEST), manifest.to_jsonl().as_bytes())
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CatalogError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| CatalogError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

/// Parses a local catalog file; every matrix in it becomes one entry.
pub fn load_local_file(path: &Path, validate: bool) -> Result<Vec<CatalogEntry>, CatalogError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let file = path.display().to_string();
    let matrices = parse_sign_matrices(&text, None).map_err(|source| CatalogError::Parse {
        file: file.clone(),
        source,
    })?;
    let stem = path
        .file_name()
        .map(|s| s.to_string_lossy().trim_end_matches(".txt").to_string())
        .unwrap_or_else(|| file.clone());
    let many = matrices.len() > 1;
    matrices
        .into_iter()
        .enumerate()
        .map(|(k, matrix)| {
            if validate && !matrix.is_hadamard() {
                return Err(CatalogError::InvalidHadamard { file: file.clone() });
            }
            Ok(CatalogEntry {
                order: matrix.order(),
                class_label: if many { format!("{stem}.{}", k + 1) } else { stem.clone() },
                source: EntrySource::LocalFile,
                matrix,
            })
        })
        .collect()
}
