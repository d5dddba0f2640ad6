use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use patsim_core::embed::{read_dbow, read_w2v, EmbedError, Embedder, ExternalVectors, HashingEmbedder};

/// A model named in the config: `vecs:<file>`, `w2v:<checkpoint>`,
/// `dbow:<checkpoint>` or `hash:<dim>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSpec {
    Vecs(PathBuf),
    W2v(PathBuf),
    Dbow(PathBuf),
    Hash(usize),
}

impl FromStr for ModelSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| format!("model spec `{s}` is not kind:arg"))?;
        if arg.is_empty() {
            return Err(format!("model spec `{s}` has an empty argument"));
        }
        match kind {
            "vecs" => Ok(Self::Vecs(arg.into())),
            "w2v" => Ok(Self::W2v(arg.into())),
            "dbow" => Ok(Self::Dbow(arg.into())),
            "hash" => match arg.parse::<usize>() {
                Ok(d) if d > 0 => Ok(Self::Hash(d)),
                _ => Err(format!("hash dimension `{arg}` is not a positive integer")),
            },
            other => Err(format!("unknown model kind `{other}` (expected vecs, w2v, dbow or hash)")),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Vecs(p) => write!(f, "vecs:{}", p.display()),
            Self::W2v(p) => write!(f, "w2v:{}", p.display()),
            Self::Dbow(p) => write!(f, "dbow:{}", p.display()),
            Self::Hash(d) => write!(f, "hash:{d}"),
        }
    }
}

impl ModelSpec {
    pub fn path(&self) -> Option<&Path> {
        match self {
            Self::Vecs(p) | Self::W2v(p) | Self::Dbow(p) => Some(p),
            Self::Hash(_) => None,
        }
    }

    /// Anchors a relative file argument at `base`. Returns whether it changed.
    pub fn resolve_path(&mut self, base: &Path) -> bool {
        match self {
            Self::Vecs(p) | Self::W2v(p) | Self::Dbow(p) if p.is_relative() => {
                *p = base.join(&*p);
                true
            }
            _ => false,
        }
    }

    /// Stable label with the directory stripped, used in artifacts so that
    /// outputs do not depend on where the inputs live.
    pub fn label(&self) -> String {
        match self {
            Self::Hash(d) => format!("hash:{d}"),
            other => {
                let kind = other.to_string();
                let kind = kind.split(':').next().unwrap_or_default().to_string();
                let name = other
                    .path()
                    .and_then(Path::file_name)
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                format!("{kind}:{name}")
            }
        }
    }

    pub fn load(&self, hash_seed: u64) -> Result<Arc<dyn Embedder<f32>>, EmbedError> {
        Ok(match self {
            Self::Vecs(p) => Arc::new(ExternalVectors::<f32>::load(p)?),
            Self::W2v(p) => Arc::new(read_w2v::<f32>(p)?),
            Self::Dbow(p) => Arc::new(read_dbow::<f32>(p)?),
            Self::Hash(d) => Arc::new(HashingEmbedder::new(*d, hash_seed)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["vecs:a/b.vecs", "w2v:m.ckpt", "dbow:/abs/d.ckpt", "hash:64"] {
            assert_eq!(s.parse::<ModelSpec>().unwrap().to_string(), s);
        }
        for bad in ["vecs", "hash:0", "hash:x", "bert:foo", "w2v:"] {
            assert!(bad.parse::<ModelSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn label_hides_directories() {
        let mut m: ModelSpec = "vecs:x/y/sbert.vecs".parse().unwrap();
        assert!(m.resolve_path(Path::new("/data")));
        assert_eq!(m.to_string(), "vecs:/data/x/y/sbert.vecs");
        assert_eq!(m.label(), "vecs:sbert.vecs");
    }
}
